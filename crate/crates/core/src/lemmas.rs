//! Numerical checks of the two proof mechanisms: the winding of the
//! projected field around a rank-2 point, and the flow of the kernel line
//! field `ker dV ∩ ξ` in the rank-1 case.

use serde::Serialize;

use crate::diffgeo::{PlaneFrame, RankClass};
use crate::error::{Error, EvalError};
use crate::expr::VectorFieldSpec;
use crate::linalg::{svd3, Point3, Vec3};
use crate::scalar::{lit, Real};

/// `|W|` below this on the circle makes the winding degenerate.
pub const WINDING_DEGENERACY: f64 = 1e-9;
/// Sampling is doubled at most this many times when increments exceed π/2.
pub const WINDING_RETRIES: usize = 3;
/// Kernel direction is ambiguous when `σ₂ > KERNEL_SEPARATION · σ₁`.
pub const KERNEL_SEPARATION: f64 = 1e-4;
/// ... or when the row space direction is within this of `V`.
pub const KERNEL_TRANSVERSALITY: f64 = 1e-6;
pub const DEFAULT_FLOW_STEP: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindingResult<T> {
    /// Only meaningful when `degenerate` is false.
    pub winding: i64,
    pub min_w: T,
    pub samples: usize,
    pub epsilon: T,
    pub degenerate: bool,
    pub reason: Option<String>,
}

/// Turns of `W(p) = V(p) - ⟨V(p), V₀⟩V₀` as `p` runs once around the circle
/// of radius `epsilon` about `p0` in the plane orthogonal to `V₀ = V(p0)`.
///
/// The plane is oriented by `V₀` as its normal, so counterclockwise turns in
/// the `(e1, e2)` frame of [`PlaneFrame::with_normal`] count positive.
/// Angle increments between consecutive samples are taken in `(-π, π]`; if
/// one exceeds `π/2` the circle is resampled at twice the density, up to
/// three times, before the result is flagged degenerate.
pub fn winding_number<T: Real>(
    field: &VectorFieldSpec,
    p0: &Point3<T>,
    epsilon: T,
    n_samples: usize,
) -> Result<WindingResult<T>, Error> {
    if !(epsilon > T::zero()) {
        return Err(Error::InvalidArgument(
            "winding radius must be positive".into(),
        ));
    }
    if n_samples < 16 {
        return Err(Error::InvalidArgument(format!(
            "winding needs at least 16 samples, got {n_samples}"
        )));
    }
    let v0 = field.evaluate(p0)?;
    let frame = PlaneFrame::with_normal(*p0, v0).ok_or(EvalError::ZeroVector)?;
    let n0 = frame.normal;
    let half_pi = T::FRAC_PI_2();

    let mut n = n_samples;
    let mut result = None;
    for attempt in 0..=WINDING_RETRIES {
        let mut ws = Vec::with_capacity(n);
        let mut min_w = T::infinity();
        for k in 0..n {
            let phi = T::TAU() * lit::<T>(k as f64) / lit::<T>(n as f64);
            let p = frame.point(epsilon * phi.cos(), epsilon * phi.sin());
            let v = field.evaluate(&p)?;
            let w = v - n0 * v.dot(&n0);
            let (a, b) = frame.coords(&w);
            min_w = min_w.min((a * a + b * b).sqrt());
            ws.push((a, b));
        }
        if min_w < lit(WINDING_DEGENERACY) {
            return Ok(WindingResult {
                winding: 0,
                min_w,
                samples: n,
                epsilon,
                degenerate: true,
                reason: Some("projected field vanishes on the circle".into()),
            });
        }
        let mut total = T::zero();
        let mut max_step = T::zero();
        for k in 0..n {
            let (a0, b0) = ws[k];
            let (a1, b1) = ws[(k + 1) % n];
            let inc = (a0 * b1 - b0 * a1).atan2(a0 * a1 + b0 * b1);
            max_step = max_step.max(inc.abs());
            total = total + inc;
        }
        if max_step > half_pi {
            result = Some(WindingResult {
                winding: 0,
                min_w,
                samples: n,
                epsilon,
                degenerate: true,
                reason: Some(format!(
                    "angle increment above pi/2 after {attempt} refinement(s)"
                )),
            });
            n *= 2;
            continue;
        }
        let turns = (total / T::TAU()).round().to_i64().unwrap_or(0);
        return Ok(WindingResult {
            winding: turns,
            min_w,
            samples: n,
            epsilon,
            degenerate: false,
            reason: None,
        });
    }
    Ok(result.expect("at least one attempt"))
}

fn canonical_sign<T: Real>(v: Vec3<T>) -> Vec3<T> {
    let mut k = 0;
    for i in 1..3 {
        if v[i].abs() > v[k].abs() {
            k = i;
        }
    }
    if v[k] < T::zero() {
        -v
    } else {
        v
    }
}

/// Unit vector spanning `ker dV(p) ∩ ξ_p` where `dV` has rank 1.
///
/// With top right singular vector `v₁` (the row space of a rank-1 `dV`), the
/// kernel is `v₁^⊥`, and intersecting with `ξ_p = V^⊥` gives `v₁ × V`. When
/// `reference` is given the sign is chosen to agree with it; otherwise the
/// largest component is made positive.
pub fn kernel_direction<T: Real>(
    field: &VectorFieldSpec,
    p: &Point3<T>,
    tol: T,
    reference: Option<&Vec3<T>>,
) -> Result<Vec3<T>, Error> {
    let jet = field.evaluate_jet(p)?;
    let rank = RankClass::of_jacobian(&jet.jacobian, tol);
    if rank.rank != 1 {
        return Err(Error::RankMismatch {
            expected: 1,
            found: rank.rank,
            singular_values: rank.singular_values_f64(),
        });
    }
    let sv = rank.singular_values;
    if sv[1] > lit::<T>(KERNEL_SEPARATION) * sv[0] {
        return Err(Error::KernelAmbiguity(format!(
            "singular values {:?} not separated",
            rank.singular_values_f64()
        )));
    }
    let v = jet.value.normalized().ok_or(EvalError::ZeroVector)?;
    let row = svd3(&jet.jacobian).v.col(0);
    let x = row.cross(&v);
    let len = x.norm();
    if len < lit(KERNEL_TRANSVERSALITY) {
        return Err(Error::KernelAmbiguity(
            "row space of dV is parallel to V".into(),
        ));
    }
    let x = x * (T::one() / len);
    Ok(match reference {
        Some(r) if x.dot(r) < T::zero() => -x,
        Some(_) => x,
        None => canonical_sign(x),
    })
}

/// [`kernel_direction`] with the canonical sign rule.
pub fn kernel_line_field<T: Real>(
    field: &VectorFieldSpec,
    p: &Point3<T>,
    tol: T,
) -> Result<Vec3<T>, Error> {
    kernel_direction(field, p, tol, None)
}

/// Sampled integral curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowCurve<T> {
    pub times: Vec<T>,
    pub points: Vec<Point3<T>>,
    pub step: T,
}

impl<T: Real> FlowCurve<T> {
    /// Curve from explicit samples; `times` and `points` must have equal
    /// length.
    pub fn from_samples(times: Vec<T>, points: Vec<Point3<T>>, step: T) -> Self {
        assert_eq!(times.len(), points.len(), "one time per point");
        FlowCurve {
            times,
            points,
            step,
        }
    }

    /// Sample at the time closest to zero.
    pub fn origin(&self) -> Option<&Point3<T>> {
        let k = (0..self.times.len()).min_by(|&a, &b| {
            self.times[a]
                .abs()
                .partial_cmp(&self.times[b].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        self.points.get(k)
    }
}

fn rk4_leg<T: Real>(
    field: &VectorFieldSpec,
    p0: Point3<T>,
    start_dir: Vec3<T>,
    h: T,
    steps: usize,
    tol: T,
) -> Result<Vec<Point3<T>>, Error> {
    let half = lit::<T>(0.5);
    let sixth = T::one() / lit(6.0);
    let mut p = p0;
    let mut prev = start_dir;
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let k1 = kernel_direction(field, &p, tol, Some(&prev))?;
        let k2 = kernel_direction(field, &(p + k1 * (h * half)), tol, Some(&k1))?;
        let k3 = kernel_direction(field, &(p + k2 * (h * half)), tol, Some(&k2))?;
        let k4 = kernel_direction(field, &(p + k3 * h), tol, Some(&k3))?;
        p += (k1 + k2 * lit(2.0) + k3 * lit(2.0) + k4) * (h * sixth);
        prev = k1;
        out.push(p);
    }
    Ok(out)
}

/// Flows the kernel line field from `p0` over `[-t_max, t_max]` with
/// fixed-step RK4. The line field is lifted to a vector field along the
/// trajectory by keeping each evaluation on the same side as the previous
/// one; `dV` must stay of rank 1 at every stage.
pub fn flow_kernel_field<T: Real>(
    field: &VectorFieldSpec,
    p0: &Point3<T>,
    t_max: T,
    step: T,
    rank_tol: T,
) -> Result<FlowCurve<T>, Error> {
    if !(t_max > T::zero() && step > T::zero()) {
        return Err(Error::InvalidArgument(
            "flow time and step must be positive".into(),
        ));
    }
    let steps = (t_max / step).ceil().to_usize().unwrap_or(1).max(1);
    let h = t_max / lit(steps as f64);
    let x0 = kernel_line_field(field, p0, rank_tol)?;
    let forward = rk4_leg(field, *p0, x0, h, steps, rank_tol)?;
    let backward = rk4_leg(field, *p0, -x0, h, steps, rank_tol)?;

    let mut times = Vec::with_capacity(2 * steps + 1);
    let mut points = Vec::with_capacity(2 * steps + 1);
    for (k, p) in backward.iter().enumerate().rev() {
        times.push(-h * lit((k + 1) as f64));
        points.push(*p);
    }
    times.push(T::zero());
    points.push(*p0);
    for (k, p) in forward.iter().enumerate() {
        times.push(h * lit((k + 1) as f64));
        points.push(*p);
    }
    Ok(FlowCurve {
        times,
        points,
        step: h,
    })
}

/// Projects the curve along `v0` onto the plane through its first point and
/// returns the largest distance of a projected point from the chord through
/// the first and last projected points, divided by the projected length.
pub fn projected_straightness<T: Real>(curve: &FlowCurve<T>, v0: &Vec3<T>) -> Result<T, Error> {
    let pts = &curve.points;
    if pts.len() < 2 {
        return Err(Error::InvalidArgument(
            "curve needs at least two points".into(),
        ));
    }
    let n = v0.normalized().ok_or(EvalError::ZeroVector)?;
    let start = pts[0];
    let proj: Vec<Point3<T>> = pts
        .iter()
        .map(|p| {
            let d = *p - start;
            start + d - n * d.dot(&n)
        })
        .collect();
    let chord = proj[proj.len() - 1] - proj[0];
    let chord_len = chord.norm();
    if chord_len < lit(1e-9) {
        return Err(Error::ProjectionCollapse(chord_len.to_f64().unwrap_or(0.0)));
    }
    if pts.len() == 2 {
        return Ok(T::zero());
    }
    let u = chord * (T::one() / chord_len);
    let length = proj
        .windows(2)
        .fold(T::zero(), |acc, w| acc + (w[1] - w[0]).norm());
    let max_dist = proj.iter().fold(T::zero(), |m, q| {
        let d = *q - proj[0];
        m.max((d - u * d.dot(&u)).norm())
    });
    Ok(max_dist / length)
}

/// `max_t ‖V(γ(t)) - V(γ(0))‖`.
pub fn constancy_along_flow<T: Real>(
    field: &VectorFieldSpec,
    curve: &FlowCurve<T>,
) -> Result<T, Error> {
    let Some(origin) = curve.origin() else {
        return Ok(T::zero());
    };
    let v0 = field.evaluate(origin)?;
    let mut worst = T::zero();
    for p in &curve.points {
        worst = worst.max((field.evaluate(p)? - v0).norm());
    }
    Ok(worst)
}
