//! Pointwise differential geometry of a field: curl, the contact
//! criterion, the rank of `dV` and frames of the plane field `ξ`.

use serde::Serialize;

use crate::error::{Error, EvalError};
use crate::expr::{Jet, VectorFieldSpec};
use crate::linalg::{svd3, Mat3, Point3, Vec3};
use crate::scalar::{lit, Real};

/// Default relative threshold for singular values of `dV`.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Orthonormal frame `(e1, e2)` of the plane through `base` orthogonal to
/// `normal`; `(e1, e2, normal)` is right-handed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlaneFrame<T> {
    pub base: Point3<T>,
    pub normal: Vec3<T>,
    pub e1: Vec3<T>,
    pub e2: Vec3<T>,
}

impl<T: Real> PlaneFrame<T> {
    /// Frame with the given normal direction. `e1 = normalize(a × n)` where
    /// `a` is the first of `ẑ`, `ŷ` with `|a·n| < 0.9`, and `e2 = n × e1`.
    pub fn with_normal(base: Point3<T>, normal: Vec3<T>) -> Option<Self> {
        let n = normal.normalized()?;
        let limit = lit::<T>(0.9);
        let a = if n.dot(&Vec3::axis(2)).abs() < limit {
            Vec3::axis(2)
        } else {
            Vec3::axis(1)
        };
        let e1 = a.cross(&n).normalized()?;
        let e2 = n.cross(&e1);
        Some(PlaneFrame {
            base,
            normal: n,
            e1,
            e2,
        })
    }

    /// Point of the plane with in-plane coordinates `(u, v)`.
    pub fn point(&self, u: T, v: T) -> Point3<T> {
        self.base + self.e1 * u + self.e2 * v
    }

    /// In-plane coordinates of the orthogonal projection of `w` onto the plane
    /// direction.
    pub fn coords(&self, w: &Vec3<T>) -> (T, T) {
        (w.dot(&self.e1), w.dot(&self.e2))
    }
}

/// Rank of `dV` decided by singular value thresholding.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RankClass<T> {
    pub rank: usize,
    /// Sorted descending.
    pub singular_values: [T; 3],
    pub tolerance: T,
}

impl<T: Real> RankClass<T> {
    /// `rank = #{σ > tol · max(σ₁, 1)}`.
    pub fn of_jacobian(jacobian: &Mat3<T>, tol: T) -> Self {
        let sv = svd3(jacobian).singular_values;
        let threshold = tol * sv[0].max(T::one());
        RankClass {
            rank: sv.iter().filter(|&&s| s > threshold).count(),
            singular_values: sv,
            tolerance: tol,
        }
    }

    pub fn singular_values_f64(&self) -> [f64; 3] {
        self.singular_values.map(|s| s.to_f64().unwrap_or(f64::NAN))
    }
}

/// `curl V` assembled from a Jacobian.
pub fn curl_of_jacobian<T: Real>(j: &Mat3<T>) -> Vec3<T> {
    let d = |i: usize, k: usize| j.0[i][k];
    Vec3::new(d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1))
}

pub fn curl<T: Real>(field: &VectorFieldSpec, p: &Point3<T>) -> Result<Vec3<T>, EvalError> {
    Ok(curl_of_jacobian(&field.evaluate_jet(p)?.jacobian))
}

/// `⟨V, curl V⟩` from a jet.
pub fn contact_defect_of_jet<T: Real>(jet: &Jet<T>) -> T {
    jet.value.dot(&curl_of_jacobian(&jet.jacobian))
}

/// `⟨V(p), curl V(p)⟩`. The plane field is contact near `p` iff this is
/// nonzero.
pub fn contact_defect<T: Real>(field: &VectorFieldSpec, p: &Point3<T>) -> Result<T, EvalError> {
    Ok(contact_defect_of_jet(&field.evaluate_jet(p)?))
}

/// Sign of the permutation `(i, j, k)` of `(0, 1, 2)`, zero on repeats.
fn levi_civita(i: usize, j: usize, k: usize) -> i8 {
    if i == j || j == k || i == k {
        return 0;
    }
    let idx = [i, j, k];
    let inversions = (0..3)
        .flat_map(|a| (a + 1..3).map(move |b| (a, b)))
        .filter(|&(a, b)| idx[a] > idx[b])
        .count();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Coefficient of `dx∧dy∧dz` in `α∧dα` for `α = Σ aᵢ dxᵢ`, computed by
/// expanding the wedge product term by term from a jet of the coefficients.
///
/// `dα = Σ_{j,i} ∂ⱼaᵢ dxⱼ∧dxᵢ` (unreduced, all ordered pairs), so
/// `α∧dα = Σ_{k,j,i} aₖ ∂ⱼaᵢ dxₖ∧dxⱼ∧dxᵢ` and each monomial reorders to
/// `sgn(k,j,i) dx∧dy∧dz`. Grouping by `k` gives `aₖ Σ_{j,i} sgn(k,j,i) ∂ⱼaᵢ`,
/// whose inner sum is the `k`-th component of `curl a`; hence the
/// coefficient equals `⟨a, curl a⟩` for every C¹ coefficient field, unit or
/// not. The expansion here does not go through the curl.
pub fn alpha_wedge_dalpha_of_jet<T: Real>(jet: &Jet<T>) -> T {
    let mut acc = T::zero();
    for k in 0..3 {
        for j in 0..3 {
            for i in 0..3 {
                match levi_civita(k, j, i) {
                    0 => {}
                    s => {
                        let term = jet.value[k] * jet.jacobian.0[i][j];
                        acc = if s > 0 { acc + term } else { acc - term };
                    }
                }
            }
        }
    }
    acc
}

pub fn alpha_wedge_dalpha_coeff<T: Real>(
    field: &VectorFieldSpec,
    p: &Point3<T>,
) -> Result<T, EvalError> {
    Ok(alpha_wedge_dalpha_of_jet(&field.evaluate_jet(p)?))
}

pub fn rank_dv<T: Real>(
    field: &VectorFieldSpec,
    p: &Point3<T>,
    tol: T,
) -> Result<RankClass<T>, EvalError> {
    Ok(RankClass::of_jacobian(
        &field.evaluate_jet(p)?.jacobian,
        tol,
    ))
}

/// Frame of `ξ_p = V(p)^⊥`, based at `p`.
pub fn xi_frame<T: Real>(field: &VectorFieldSpec, p: &Point3<T>) -> Result<PlaneFrame<T>, Error> {
    let v = field.evaluate(p)?;
    PlaneFrame::with_normal(*p, v).ok_or(Error::Eval(EvalError::ZeroVector))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(s: &str, normalize: bool) -> VectorFieldSpec {
        VectorFieldSpec::parse(s, normalize).unwrap()
    }

    #[test]
    fn curl_examples() {
        let p = Vec3::new(0.4, -1.0, 0.8);
        assert_eq!(curl(&field("1,0,0", false), &p).unwrap(), Vec3::zero());
        assert_eq!(
            curl(&field("-y,x,0", false), &p).unwrap(),
            Vec3::new(0.0, 0.0, 2.0)
        );
        let c = curl(&field("cos(z),-sin(z),0", false), &p).unwrap();
        assert!(c.max_abs_diff(&Vec3::new(0.8f64.cos(), -0.8f64.sin(), 0.0)) < 1e-15);
    }

    #[test]
    fn contact_defect_examples() {
        let p = Vec3::new(1.0f64, 2.0, 0.3);
        assert_eq!(contact_defect(&field("1,0,0", false), &p).unwrap(), 0.0);
        let d = contact_defect(&field("cos(z),-sin(z),0", false), &p).unwrap();
        assert!((d - 1.0).abs() < 1e-15);
        let skew = field("z*x-y,x+z*y,1+z^2", true);
        assert_eq!(contact_defect(&skew, &Vec3::<f64>::zero()).unwrap(), 2.0);
    }

    #[test]
    fn wedge_expansion_examples() {
        let f = field("cos(z),-sin(z),0", false);
        let c = alpha_wedge_dalpha_coeff(&f, &Vec3::new(0.0f64, 0.0, 1.0)).unwrap();
        assert!((c - 1.0).abs() < 1e-15);
        assert_eq!(
            alpha_wedge_dalpha_coeff(&field("1,0,0", false), &Vec3::<f64>::zero()).unwrap(),
            0.0
        );
    }

    #[test]
    fn levi_civita_signs() {
        assert_eq!(levi_civita(0, 1, 2), 1);
        assert_eq!(levi_civita(1, 2, 0), 1);
        assert_eq!(levi_civita(1, 0, 2), -1);
        assert_eq!(levi_civita(2, 1, 0), -1);
        assert_eq!(levi_civita(0, 0, 2), 0);
    }

    #[test]
    fn rank_examples() {
        let tol = DEFAULT_RANK_TOL;
        let p = Vec3::new(0.1, 0.2, 0.3);
        assert_eq!(rank_dv(&field("1,0,0", false), &p, tol).unwrap().rank, 0);
        assert_eq!(
            rank_dv(&field("cos(z),-sin(z),0", false), &p, tol)
                .unwrap()
                .rank,
            1
        );
        let skew = field("z*x-y,x+z*y,1+z^2", true);
        assert_eq!(rank_dv(&skew, &Vec3::zero(), tol).unwrap().rank, 2);
    }

    #[test]
    fn frame_conventions() {
        let up = PlaneFrame::with_normal(Vec3::zero(), Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!((up.e1, up.e2), (Vec3::axis(0), Vec3::axis(1)));
        let ex = PlaneFrame::with_normal(Vec3::zero(), Vec3::new(1.0, 0.0, 0.0)).unwrap();
        assert_eq!((ex.e1, ex.e2), (Vec3::axis(1), Vec3::axis(2)));
        assert!(PlaneFrame::with_normal(Vec3::zero(), Vec3::<f64>::zero()).is_none());
        assert_eq!(
            xi_frame(&field("x,y,z", true), &Vec3::<f64>::zero()),
            Err(Error::Eval(EvalError::ZeroVector))
        );
    }
}
