//! The explicit diffeomorphism of the rank-1 normal form and numerical
//! verification that it pulls `α = cos θ(z) dx - sin θ(z) dy` back to
//! `dz + x dy`.

use serde::Serialize;

use crate::error::Error;
use crate::expr::{Dual3, ExprValue, VectorFieldSpec};
use crate::linalg::{Mat3, Point3, Vec3};
use crate::scalar::Real;

use super::theta::ThetaFunction;
use super::AffineFrame;

/// Φ over plain scalars or first-order duals. Derivatives of `θ` enter
/// through `chain` with the jet at `y`, so only first-order number types are
/// correct here.
fn phi<T: Real, N: ExprValue<T>>(p: [N; 3], (th, th1, th2): (T, T, T)) -> [N; 3] {
    let [x, y, z] = p;
    let theta = y.chain(th, th1, T::zero());
    let theta_prime = y.chain(th1, th2, T::zero());
    let c = theta.chain(th.cos(), -th.sin(), T::zero());
    let s = theta.chain(th.sin(), th.cos(), T::zero());
    let q = x / theta_prime;
    [z * c + q * s, q * c - z * s, y]
}

fn theta_jet_at<T: Real>(theta: &dyn ThetaFunction<T>, y: T) -> Result<(T, T, T), Error> {
    let jet = theta.jet(y)?;
    if jet.1.is_zero() || !jet.1.is_finite() {
        return Err(Error::ThetaPrimeVanishes {
            z: y.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(jet)
}

/// `Φ(x,y,z) = (z cos θ(y) + (x/θ'(y)) sin θ(y), -z sin θ(y) + (x/θ'(y)) cos θ(y), y)`.
pub fn standardizing_diffeo<T: Real>(
    theta: &dyn ThetaFunction<T>,
    p: &Point3<T>,
) -> Result<Point3<T>, Error> {
    let jet = theta_jet_at(theta, p.y())?;
    Ok(Vec3(phi(p.0, jet)))
}

/// `Φ(p)` and `dΦ_p` (row `i`, column `j` = `∂Φᵢ/∂xⱼ`) by dual numbers.
pub fn standardizing_diffeo_jet<T: Real>(
    theta: &dyn ThetaFunction<T>,
    p: &Point3<T>,
) -> Result<(Point3<T>, Mat3<T>), Error> {
    let jet = theta_jet_at(theta, p.y())?;
    let out = phi(Dual3::seed(p.0), jet);
    Ok((Vec3(out.map(|d| d.value)), Mat3(out.map(|d| d.partials))))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PullbackCheck<T> {
    pub max_defect: T,
    pub points: usize,
    pub tolerance: T,
    pub passed: bool,
}

/// Largest `|(Φ*α)_p(eⱼ) - (dz + x dy)_p(eⱼ)|` given the coefficients of `α`
/// at `Φ(p)`.
fn pullback_defect_at<T: Real>(coeffs: &Vec3<T>, dphi: &Mat3<T>, p: &Point3<T>) -> T {
    let pulled = dphi.left_mul_vec(coeffs);
    let standard = Vec3::new(T::zero(), p.x(), T::one());
    pulled.max_abs_diff(&standard)
}

/// Checks `Φ*α = dz + x dy` at each sample, with `α` built from `θ`.
pub fn verify_pullback<T: Real>(
    theta: &dyn ThetaFunction<T>,
    points: &[Point3<T>],
    tol: T,
) -> Result<PullbackCheck<T>, Error> {
    let mut worst = T::zero();
    for p in points {
        let (q, dphi) = standardizing_diffeo_jet(theta, p)?;
        let (th, _, _) = theta.jet(q.z())?;
        let alpha = Vec3::new(th.cos(), -th.sin(), T::zero());
        worst = worst.max(pullback_defect_at(&alpha, &dphi, p));
    }
    Ok(PullbackCheck {
        max_defect: worst,
        points: points.len(),
        tolerance: tol,
        passed: worst < tol,
    })
}

/// Same check with `α` taken from the field itself, read in `frame`
/// coordinates at `Φ(p)`.
pub fn verify_field_pullback<T: Real>(
    field: &VectorFieldSpec,
    frame: &AffineFrame<T>,
    theta: &dyn ThetaFunction<T>,
    points: &[Point3<T>],
    tol: T,
) -> Result<PullbackCheck<T>, Error> {
    let mut worst = T::zero();
    for p in points {
        let (q, dphi) = standardizing_diffeo_jet(theta, p)?;
        let v = field.evaluate(&frame.to_world(&q))?;
        let alpha = frame.to_local(&v);
        worst = worst.max(pullback_defect_at(&alpha, &dphi, p));
    }
    Ok(PullbackCheck {
        max_defect: worst,
        points: points.len(),
        tolerance: tol,
        passed: worst < tol,
    })
}

/// Smallest distance between images of distinct points under Φ.
pub fn min_image_separation<T: Real>(
    theta: &dyn ThetaFunction<T>,
    points: &[Point3<T>],
) -> Result<T, Error> {
    let images = points
        .iter()
        .map(|p| standardizing_diffeo(theta, p))
        .collect::<Result<Vec<_>, _>>()?;
    let mut best = T::infinity();
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            best = best.min((images[i] - images[j]).norm());
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::super::theta::ClosedFormTheta;
    use super::*;
    use crate::expr::parse_expression;

    fn linear() -> ClosedFormTheta {
        ClosedFormTheta::new(parse_expression("z").unwrap()).unwrap()
    }

    #[test]
    fn diffeo_values() {
        let th = linear();
        assert_eq!(
            standardizing_diffeo::<f64>(&th, &Vec3::zero()).unwrap(),
            Vec3::zero()
        );
        assert_eq!(
            standardizing_diffeo(&th, &Vec3::new(1.0, 0.0, 2.0)).unwrap(),
            Vec3::new(2.0, 1.0, 0.0)
        );
    }

    #[test]
    fn diffeo_on_y_zero_plane_is_linear() {
        // θ(0) = 0, θ'(0) = 1: Φ(x, 0, z) = (z, x, 0), i.e. the matrix below.
        let m = Mat3([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        for p in [[0.3, 0.0, -1.2], [-2.0, 0.0, 0.7], [1.0, 0.0, 1.0]] {
            let p = Vec3(p);
            assert_eq!(standardizing_diffeo(&linear(), &p).unwrap(), m.mul_vec(&p));
        }
    }

    #[test]
    fn dx_coefficient_cancels_on_x_zero_plane() {
        let th = linear();
        for y in [-1.5f64, -0.2, 0.0, 0.9] {
            let p = Vec3::new(0.0, y, 0.4);
            let (q, d) = standardizing_diffeo_jet(&th, &p).unwrap();
            let t = q.z();
            let pulled = d.left_mul_vec(&Vec3::new(t.cos(), -t.sin(), 0.0));
            assert!(pulled.x().abs() <= 1e-16, "{pulled:?}");
        }
    }

    #[test]
    fn diffeo_refuses_vanishing_derivative() {
        let th = ClosedFormTheta::new(parse_expression("z^3").unwrap()).unwrap();
        assert!(matches!(
            standardizing_diffeo(&th, &Vec3::new(1.0, 0.0, 0.0)),
            Err(Error::ThetaPrimeVanishes { .. })
        ));
    }
}
