//! The rank-1 normal form: adapted frame, recovery of the angle profile
//! `θ`, and the explicit standardizing diffeomorphism.
//!
//! When `dV` has rank 1 everywhere, the flow lines of `ker dV ∩ ξ` project
//! to straight lines and the lines of the fibration through one of them
//! sweep an affine plane. In coordinates where that plane is `{z = 0}` and
//! `V = ∂x` on it, `V(x,y,z) = (cos θ(z), -sin θ(z), 0)` with `θ(0) = 0`
//! and `θ' ≠ 0`.

mod classify;
mod diffeo;
mod theta;

use serde::Serialize;

pub use classify::{
    classify_field, flow_check, random_points, winding_check, Classification, ClassifyOptions,
    FlowCheck, LemmaChecks, Standardization, Verdict, WindingCheck, RANK2_CITATION,
};
pub use diffeo::{
    min_image_separation, standardizing_diffeo, standardizing_diffeo_jet, verify_field_pullback,
    verify_pullback, PullbackCheck,
};
pub use theta::{ClosedFormTheta, SplineTheta, ThetaFunction};

use crate::error::{Error, EvalError};
use crate::expr::VectorFieldSpec;
use crate::lemmas::kernel_line_field;
use crate::linalg::{Mat3, Point3, Vec3};
use crate::scalar::{lit, Real};

/// Half-width of the in-plane patch used to validate a normal frame.
pub const FRAME_PATCH_HALF_WIDTH: f64 = 0.2;
pub const FRAME_PATCH_TOL: f64 = 1e-7;
pub const OUT_OF_PLANE_TOL: f64 = 1e-7;
pub const THETA_PRIME_MIN: f64 = 1e-9;
/// Grid refinements allowed when unwrapping trips the `π/2` guard.
pub const THETA_REFINEMENTS: usize = 3;

/// Right-handed orthonormal frame with an origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AffineFrame<T> {
    pub origin: Point3<T>,
    pub e1: Vec3<T>,
    pub e2: Vec3<T>,
    pub e3: Vec3<T>,
}

impl<T: Real> AffineFrame<T> {
    pub fn identity() -> Self {
        AffineFrame {
            origin: Vec3::zero(),
            e1: Vec3::axis(0),
            e2: Vec3::axis(1),
            e3: Vec3::axis(2),
        }
    }

    /// Columns `e1, e2, e3`.
    pub fn basis(&self) -> Mat3<T> {
        Mat3::from_cols([self.e1, self.e2, self.e3])
    }

    pub fn to_world(&self, local: &Point3<T>) -> Point3<T> {
        self.origin + self.basis().mul_vec(local)
    }

    /// Components of a vector in the frame.
    pub fn to_local(&self, v: &Vec3<T>) -> Vec3<T> {
        Vec3::new(v.dot(&self.e1), v.dot(&self.e2), v.dot(&self.e3))
    }

    /// Largest deviation of `basisᵀ basis` from the identity.
    pub fn orthonormality_defect(&self) -> T {
        let b = self.basis();
        let g = b.transpose().mul_mat(&b);
        let mut worst = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { T::one() } else { T::zero() };
                worst = worst.max((g.0[i][j] - want).abs());
            }
        }
        worst
    }
}

/// Frame of the normal form at `p0`: `e1 = V(p0)`, `e2` the kernel line
/// field, `e3 = e1 × e2`. The field must be constant on a 5x5 patch of the
/// `(e1, e2)`-plane around `p0`.
pub fn find_normal_frame<T: Real>(
    field: &VectorFieldSpec,
    p0: &Point3<T>,
    rank_tol: T,
) -> Result<AffineFrame<T>, Error> {
    let e2 = kernel_line_field(field, p0, rank_tol)?;
    let v0 = field.evaluate(p0)?;
    let e1 = v0.normalized().ok_or(EvalError::ZeroVector)?;
    let e3 = e1.cross(&e2);
    let frame = AffineFrame {
        origin: *p0,
        e1,
        e2,
        e3,
    };
    let half = lit::<T>(FRAME_PATCH_HALF_WIDTH);
    let mut worst = T::zero();
    for i in 0..5 {
        for j in 0..5 {
            let a = half * lit((i as f64 - 2.0) / 2.0);
            let b = half * lit((j as f64 - 2.0) / 2.0);
            let v = field.evaluate(&(*p0 + e1 * a + e2 * b))?;
            worst = worst.max((v - v0).norm());
        }
    }
    if worst > lit(FRAME_PATCH_TOL) {
        return Err(Error::PlaneValidation(worst.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(frame)
}

/// Samples of `θ` and `θ'` on a uniform grid over `[-Z, Z]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaProfile<T> {
    pub z: Vec<T>,
    pub theta: Vec<T>,
    pub theta_prime: Vec<T>,
}

impl<T: Real> ThetaProfile<T> {
    /// Samples a closed-form `θ` (used to build reference fields and oracles).
    pub fn sample(theta: &dyn ThetaFunction<T>, z_half: T, n: usize) -> Result<Self, Error> {
        let z = uniform_grid(z_half, n);
        let mut th = Vec::with_capacity(z.len());
        let mut thp = Vec::with_capacity(z.len());
        for &s in &z {
            let (a, b, _) = theta.jet(s)?;
            th.push(a);
            thp.push(b);
        }
        Ok(ThetaProfile {
            z,
            theta: th,
            theta_prime: thp,
        })
    }

    pub fn theta_prime_range(&self) -> (T, T) {
        self.theta_prime
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &d| {
                (lo.min(d), hi.max(d))
            })
    }

    /// Anchoring `θ(0) = 0`, constant sign of `θ'` bounded away from zero,
    /// and sampled continuity.
    pub fn validate(&self) -> Result<(), Error> {
        let n = self.z.len();
        if n < 3 || self.theta.len() != n || self.theta_prime.len() != n {
            return Err(Error::InvalidArgument(
                "theta profile needs three or more aligned samples".into(),
            ));
        }
        let mid = n / 2;
        if self.theta[mid].abs() > lit(1e-9) {
            return Err(Error::InvalidArgument(format!(
                "theta(0) = {} is not anchored at zero",
                self.theta[mid]
            )));
        }
        if let Some(z) = theta_prime_failure(&self.z, &self.theta_prime) {
            return Err(Error::ThetaPrimeVanishes { z });
        }
        if self
            .theta
            .windows(2)
            .any(|w| (w[1] - w[0]).abs() >= T::FRAC_PI_2())
        {
            return Err(Error::ThetaAliasing);
        }
        Ok(())
    }
}

/// Symmetric grid with an odd number of points so that `z = 0` is a knot.
pub fn uniform_grid<T: Real>(z_half: T, n: usize) -> Vec<T> {
    let n = if n.is_multiple_of(2) { n + 1 } else { n }.max(3);
    let mid = (n / 2) as f64;
    (0..n)
        .map(|k| z_half * lit((k as f64 - mid) / mid))
        .collect()
}

/// Location of the zero or sign change of `θ'` closest to the middle of the
/// grid, preferring the upper side on ties.
fn theta_prime_failure<T: Real>(z: &[T], dtheta: &[T]) -> Option<f64> {
    let min = lit::<T>(THETA_PRIME_MIN);
    let mid = z.len() / 2;
    let reference = dtheta[mid];
    let f = |t: T| t.to_f64().unwrap_or(f64::NAN);
    if reference.abs() < min {
        return Some(f(z[mid]));
    }
    let bad =
        |k: usize| dtheta[k].abs() < min || (dtheta[k] > T::zero()) != (reference > T::zero());
    for step in 1..=mid {
        for k in [mid + step, mid - step] {
            if k >= z.len() || !bad(k) {
                continue;
            }
            if dtheta[k].abs() < min {
                return Some(f(z[k]));
            }
            // Linear interpolation towards the neighbour closer to the middle.
            let j = if k > mid { k - 1 } else { k + 1 };
            let (za, zb, da, db) = (z[j], z[k], dtheta[j], dtheta[k]);
            return Some(f(za - da * (zb - za) / (db - da)));
        }
    }
    None
}

/// Reads `θ` off the field along `origin + z·e3`, where the field in frame
/// coordinates must be `(cos θ, -sin θ, r)` with `|r| < 1e-7`. `θ` is
/// unwrapped outward from `z = 0` and `θ'` comes from the Jacobian, not
/// from differences of samples. The grid is refined up to three times if
/// consecutive samples differ by `π/2` or more.
pub fn recover_theta<T: Real>(
    field: &VectorFieldSpec,
    frame: &AffineFrame<T>,
    z_half: T,
    n: usize,
) -> Result<ThetaProfile<T>, Error> {
    if !(z_half > T::zero()) {
        return Err(Error::InvalidArgument(
            "theta window must be positive".into(),
        ));
    }
    let mut n = n;
    for _ in 0..=THETA_REFINEMENTS {
        let z = uniform_grid(z_half, n);
        let mut raw = Vec::with_capacity(z.len());
        let mut dtheta = Vec::with_capacity(z.len());
        for &s in &z {
            let q = frame.origin + frame.e3 * s;
            let jet = field.evaluate_jet(&q)?;
            let local = frame.to_local(&jet.value);
            if local.z().abs() > lit(OUT_OF_PLANE_TOL) {
                return Err(Error::OutOfPlane {
                    z: s.to_f64().unwrap_or(f64::NAN),
                    r: local.z().to_f64().unwrap_or(f64::NAN),
                });
            }
            let (c, sn) = (local.x(), -local.y());
            let dv = jet.jacobian.mul_vec(&frame.e3);
            let (dc, ds) = (dv.dot(&frame.e1), -dv.dot(&frame.e2));
            raw.push(sn.atan2(c));
            dtheta.push((c * ds - sn * dc) / (c * c + sn * sn));
        }
        if let Some(zc) = theta_prime_failure(&z, &dtheta) {
            return Err(Error::ThetaPrimeVanishes { z: zc });
        }
        let mid = z.len() / 2;
        let mut theta = raw.clone();
        let mut aliased = false;
        let wrap = |d: T| {
            let tau = T::TAU();
            d - tau * ((d + T::PI()) / tau).floor()
        };
        for k in mid + 1..z.len() {
            let inc = wrap(raw[k] - theta[k - 1]);
            aliased |= inc.abs() >= T::FRAC_PI_2();
            theta[k] = theta[k - 1] + inc;
        }
        for k in (0..mid).rev() {
            let inc = wrap(raw[k] - theta[k + 1]);
            aliased |= inc.abs() >= T::FRAC_PI_2();
            theta[k] = theta[k + 1] + inc;
        }
        if aliased {
            n = 2 * (z.len() - 1) + 1;
            continue;
        }
        let profile = ThetaProfile {
            z,
            theta,
            theta_prime: dtheta,
        };
        profile.validate()?;
        return Ok(profile);
    }
    Err(Error::ThetaAliasing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffgeo::DEFAULT_RANK_TOL;

    fn theta_field(theta: &str) -> VectorFieldSpec {
        VectorFieldSpec::from_components(
            &format!("cos({theta})"),
            &format!("-sin({theta})"),
            "0",
            false,
        )
        .unwrap()
    }

    #[test]
    fn theta_field_frame_is_identity() {
        let f =
            find_normal_frame(&theta_field("z"), &Vec3::<f64>::zero(), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(f, AffineFrame::identity());
    }

    #[test]
    fn frame_requires_rank_one() {
        let skew = VectorFieldSpec::parse("z*x-y,x+z*y,1+z^2", true).unwrap();
        assert!(matches!(
            find_normal_frame(&skew, &Vec3::<f64>::zero(), DEFAULT_RANK_TOL),
            Err(Error::RankMismatch { found: 2, .. })
        ));
    }

    #[test]
    fn frame_rejects_field_not_in_normal_form() {
        // Rank 1 at the origin (only ∂/∂z of the first components is nonzero)
        // but not constant along the kernel plane.
        let f = VectorFieldSpec::parse("cos(z + y^2),-sin(z + y^2),0", false).unwrap();
        assert!(matches!(
            find_normal_frame(&f, &Vec3::<f64>::zero(), DEFAULT_RANK_TOL),
            Err(Error::PlaneValidation(_))
        ));
    }

    #[test]
    fn recovers_linear_and_cubic_profiles() {
        let frame = AffineFrame::<f64>::identity();
        let p = recover_theta(&theta_field("z"), &frame, 1.0, 201).unwrap();
        for k in 0..p.z.len() {
            assert!((p.theta[k] - p.z[k]).abs() < 1e-12);
            assert!((p.theta_prime[k] - 1.0).abs() < 1e-12);
        }
        let p = recover_theta(&theta_field("z + z^3/3"), &frame, 1.5, 101).unwrap();
        for k in 0..p.z.len() {
            let z = p.z[k];
            assert!((p.theta[k] - (z + z * z * z / 3.0)).abs() < 1e-12);
            assert!((p.theta_prime[k] - (1.0 + z * z)).abs() < 1e-12);
        }
    }

    #[test]
    fn theta_sine_fails_near_half_pi() {
        let frame = AffineFrame::<f64>::identity();
        match recover_theta(&theta_field("sin(z)"), &frame, 2.0, 401) {
            Err(Error::ThetaPrimeVanishes { z }) => {
                assert!((z - std::f64::consts::FRAC_PI_2).abs() < 1e-4, "{z}")
            }
            other => panic!("expected vanishing theta', got {other:?}"),
        }
    }

    #[test]
    fn coarse_grid_is_refined_for_fast_rotation() {
        // θ = 20z turns by 4 radians per sample at n = 11 on [-1, 1].
        let p = recover_theta(
            &theta_field("20*z"),
            &AffineFrame::<f64>::identity(),
            1.0,
            11,
        )
        .unwrap();
        assert!(p.z.len() > 11);
        assert!((p.theta[p.z.len() - 1] - 20.0).abs() < 1e-10);
    }

    #[test]
    fn out_of_plane_component_is_reported() {
        let f = VectorFieldSpec::parse("cos(z),-sin(z),z/10", true).unwrap();
        assert!(matches!(
            recover_theta(&f, &AffineFrame::<f64>::identity(), 1.0, 21),
            Err(Error::OutOfPlane { .. })
        ));
    }

    #[test]
    fn even_sample_counts_still_hit_zero() {
        let g = uniform_grid(1.0f64, 10);
        assert_eq!(g.len(), 11);
        assert_eq!(g[5], 0.0);
    }
}
