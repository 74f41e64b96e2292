//! Lines of a field and grid audits on a box: is `{V}` plausibly a
//! fibration by oriented lines there, and does it contain parallel lines?
//!
//! Grid sampling is the only global probe. A clean report means no
//! violation was found at the sampled resolution, nothing more.

use rayon::prelude::*;
use serde::Serialize;

use crate::diffgeo::{contact_defect_of_jet, RankClass, DEFAULT_RANK_TOL};
use crate::error::{Error, EvalError};
use crate::expr::VectorFieldSpec;
use crate::linalg::{Point3, Vec3};
use crate::scalar::{lit, Real};

/// `|d1·d2|` above `1 - PARALLEL_EPS` counts as parallel.
pub const PARALLEL_EPS: f64 = 1e-12;

/// Oriented affine line `{base + t·direction}` with unit direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Line<T> {
    pub base: Point3<T>,
    pub direction: Vec3<T>,
}

impl<T: Real> Line<T> {
    /// Normalizes `direction`; `None` if it vanishes.
    pub fn new(base: Point3<T>, direction: Vec3<T>) -> Option<Self> {
        Some(Line {
            base,
            direction: direction.normalized()?,
        })
    }

    pub fn point_at(&self, t: T) -> Point3<T> {
        self.base + self.direction * t
    }
}

/// The line `ℓ_p` through `p` in direction `V(p)`.
pub fn line_through<T: Real>(field: &VectorFieldSpec, p: &Point3<T>) -> Result<Line<T>, Error> {
    let v = field.evaluate(p)?;
    Line::new(*p, v).ok_or(Error::Eval(EvalError::ZeroVector))
}

/// `‖dV(p)·V(p)‖`: the derivative of `V` along itself, zero iff the
/// integral curve through `p` keeps its direction to first order.
pub fn straightness_defect<T: Real>(
    field: &VectorFieldSpec,
    p: &Point3<T>,
) -> Result<T, EvalError> {
    let jet = field.evaluate_jet(p)?;
    Ok(jet.jacobian.mul_vec(&jet.value).norm())
}

/// Mutual closest points `l1(t1)`, `l2(t2)` of two lines and their distance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClosestApproach<T> {
    pub t1: T,
    pub t2: T,
    pub gap: T,
    pub parallel: bool,
}

/// Closest approach of two lines. Parallel lines (`|d1·d2| > 1 - 1e-12`)
/// report `t1 = t2 = 0` and their distance. Symmetric in its arguments
/// bit for bit.
pub fn lines_closest_approach<T: Real>(l1: &Line<T>, l2: &Line<T>) -> ClosestApproach<T> {
    let (d1, d2) = (l1.direction, l2.direction);
    let w0 = l1.base - l2.base;
    let b = d1.dot(&d2);
    if b.abs() > T::one() - lit(PARALLEL_EPS) {
        // Symmetric mean direction, so swapping the lines only flips signs.
        let mean = if b >= T::zero() { d1 + d2 } else { d1 - d2 };
        let u = mean.normalized().unwrap_or(d1);
        let off = w0 - u * w0.dot(&u);
        return ClosestApproach {
            t1: T::zero(),
            t2: T::zero(),
            gap: off.norm(),
            parallel: true,
        };
    }
    let d = d1.dot(&w0);
    let e = d2.dot(&w0);
    let denom = T::one() - b * b;
    let t1 = (b * e - d) / denom;
    let t2 = (e - b * d) / denom;
    let gap = (l1.point_at(t1) - l2.point_at(t2)).norm();
    ClosestApproach {
        t1,
        t2,
        gap,
        parallel: false,
    }
}

/// Same line: parallel and the base offset lies along the direction.
pub fn same_line<T: Real>(l1: &Line<T>, l2: &Line<T>, gap_tol: T) -> bool {
    let ca = lines_closest_approach(l1, l2);
    ca.parallel && ca.gap < gap_tol
}

/// Unoriented angle between the lines' directions, in `[0, π/2]`.
pub fn line_angle<T: Real>(l1: &Line<T>, l2: &Line<T>) -> T {
    let c = l1.direction.cross(&l2.direction).norm();
    c.atan2(l1.direction.dot(&l2.direction).abs())
}

/// Axis-aligned audit window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AuditBox<T> {
    pub min: Point3<T>,
    pub max: Point3<T>,
}

impl<T: Real> AuditBox<T> {
    pub fn new(min: Point3<T>, max: Point3<T>) -> Result<Self, Error> {
        if (0..3).all(|i| min[i] < max[i]) && min.is_finite() && max.is_finite() {
            Ok(AuditBox { min, max })
        } else {
            Err(Error::InvalidArgument(format!(
                "box needs min < max componentwise, got {min:?} and {max:?}"
            )))
        }
    }

    pub fn cube(lo: T, hi: T) -> Result<Self, Error> {
        Self::new(Vec3::new(lo, lo, lo), Vec3::new(hi, hi, hi))
    }

    pub fn center(&self) -> Point3<T> {
        (self.min + self.max) * lit(0.5)
    }

    pub fn half_extents(&self) -> Vec3<T> {
        (self.max - self.min) * lit(0.5)
    }

    /// Same center, every extent (hence the diagonal) scaled by `factor`.
    pub fn enlarged(&self, factor: T) -> Self {
        let c = self.center();
        let h = self.half_extents() * factor;
        AuditBox {
            min: c - h,
            max: c + h,
        }
    }

    pub fn contains(&self, p: &Point3<T>) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    /// Regular grid with `n` points per axis, `z` fastest.
    pub fn grid(&self, n: usize) -> Vec<Point3<T>> {
        let step = |i: usize, k: usize| {
            self.min[i]
                + (self.max[i] - self.min[i]) * lit::<T>(k as f64) / lit::<T>((n - 1) as f64)
        };
        let mut pts = Vec::with_capacity(n * n * n);
        for ix in 0..n {
            for iy in 0..n {
                for iz in 0..n {
                    pts.push(Vec3::new(step(0, ix), step(1, iy), step(2, iz)));
                }
            }
        }
        pts
    }

    /// Parameter interval of `line` inside the box (slab method).
    pub fn clip(&self, line: &Line<T>) -> Option<(T, T)> {
        let mut lo = T::neg_infinity();
        let mut hi = T::infinity();
        for i in 0..3 {
            let d = line.direction[i];
            let b = line.base[i];
            if d == T::zero() {
                if b < self.min[i] || b > self.max[i] {
                    return None;
                }
                continue;
            }
            let ta = (self.min[i] - b) / d;
            let tb = (self.max[i] - b) / d;
            lo = lo.max(ta.min(tb));
            hi = hi.min(ta.max(tb));
        }
        (lo <= hi).then_some((lo, hi))
    }
}

/// Thresholds of the audit. Defaults: unit 1e-10, straightness 1e-8,
/// intersection gap 1e-7, angle 1e-6 rad, rank 1e-8 (relative), contact
/// 1e-8.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AuditTolerances<T> {
    pub unit: T,
    pub straightness: T,
    pub intersection_gap: T,
    pub angle: T,
    pub rank: T,
    /// `|⟨V, curl V⟩|` at or below this counts as vanishing.
    pub contact: T,
    /// Enlargement of the box for intersection tests.
    pub enlarge: T,
}

impl<T: Real> Default for AuditTolerances<T> {
    fn default() -> Self {
        AuditTolerances {
            unit: lit(1e-10),
            straightness: lit(1e-8),
            intersection_gap: lit(1e-7),
            angle: lit(1e-6),
            rank: lit(DEFAULT_RANK_TOL),
            contact: lit(1e-8),
            enlarge: lit(1.5),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RankProfile {
    Constant0,
    Constant1,
    Constant2,
    Mixed,
}

impl RankProfile {
    pub fn from_histogram(hist: &[usize; 4]) -> Self {
        let nonzero: Vec<usize> = (0..4).filter(|&r| hist[r] > 0).collect();
        match nonzero.as_slice() {
            [0] => RankProfile::Constant0,
            [1] => RankProfile::Constant1,
            [2] => RankProfile::Constant2,
            _ => RankProfile::Mixed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntersectingPair<T> {
    pub i: usize,
    pub j: usize,
    pub p_i: Point3<T>,
    pub p_j: Point3<T>,
    pub t_i: T,
    pub t_j: T,
    pub gap: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParallelPair<T> {
    pub i: usize,
    pub j: usize,
    pub angle: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointFailure {
    pub index: usize,
    pub point: [f64; 3],
    pub error: String,
}

/// Measurements of one grid point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointSample<T> {
    pub point: Point3<T>,
    pub line: Line<T>,
    pub unit_defect: T,
    pub straightness_defect: T,
    pub rank: RankClass<T>,
    pub contact_defect: T,
}

/// Outcome of [`fibration_audit`]. Verdicts are pure functions of the
/// recorded numbers and `tolerances`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport<T> {
    pub grid_per_axis: usize,
    pub points_sampled: usize,
    pub tolerances: AuditTolerances<T>,
    pub unit_defect_max: T,
    pub straightness_defect_max: T,
    pub intersections: Vec<IntersectingPair<T>>,
    pub parallel_pairs_count: usize,
    #[serde(skip)]
    pub parallel_pairs: Vec<ParallelPair<T>>,
    /// Counts of points with rank 0, 1, 2, 3.
    pub rank_histogram: [usize; 4],
    pub contact_defect_min: T,
    pub contact_defect_max: T,
    pub failures: Vec<PointFailure>,
    pub is_fibration_on_box: bool,
    pub is_contact_on_box: bool,
    pub zero_set_detected: bool,
    pub rank_profile: RankProfile,
    pub note: String,
}

fn sample_point<T: Real>(
    field: &VectorFieldSpec,
    p: &Point3<T>,
    tol: &AuditTolerances<T>,
) -> Result<PointSample<T>, EvalError> {
    let jet = field.evaluate_jet(p)?;
    let line = Line::new(*p, jet.value).ok_or(EvalError::ZeroVector)?;
    Ok(PointSample {
        point: *p,
        line,
        unit_defect: (jet.value.norm() - T::one()).abs(),
        straightness_defect: jet.jacobian.mul_vec(&jet.value).norm(),
        rank: RankClass::of_jacobian(&jet.jacobian, tol.rank),
        contact_defect: contact_defect_of_jet(&jet),
    })
}

/// Per-point samples (`None` where evaluation failed) and the failures.
pub type GridSamples<T> = (Vec<Option<PointSample<T>>>, Vec<PointFailure>);

/// Evaluates the grid, keeping failures per point.
pub fn sample_grid<T: Real>(
    field: &VectorFieldSpec,
    bx: &AuditBox<T>,
    n_per_axis: usize,
    tol: &AuditTolerances<T>,
) -> Result<GridSamples<T>, Error> {
    if n_per_axis < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid needs at least 2 points per axis, got {n_per_axis}"
        )));
    }
    let pts = bx.grid(n_per_axis);
    let results: Vec<Result<PointSample<T>, EvalError>> = pts
        .par_iter()
        .map(|p| sample_point(field, p, tol))
        .collect();
    let mut samples = Vec::with_capacity(pts.len());
    let mut failures = Vec::new();
    for (index, r) in results.into_iter().enumerate() {
        match r {
            Ok(s) => samples.push(Some(s)),
            Err(e) => {
                failures.push(PointFailure {
                    index,
                    point: pts[index].cast::<f64>().0,
                    error: e.to_string(),
                });
                samples.push(None);
            }
        }
    }
    Ok((samples, failures))
}

type PairScan<T> = (Vec<IntersectingPair<T>>, Vec<ParallelPair<T>>);

/// All-pairs scan. Rows are processed in parallel and concatenated in
/// ascending index order.
fn scan_pairs<T: Real>(
    samples: &[Option<PointSample<T>>],
    bx: &AuditBox<T>,
    tol: &AuditTolerances<T>,
) -> PairScan<T> {
    let big = bx.enlarged(tol.enlarge);
    let clips: Vec<Option<(T, T)>> = samples
        .iter()
        .map(|s| s.as_ref().and_then(|s| big.clip(&s.line)))
        .collect();
    let rows: Vec<PairScan<T>> = (0..samples.len())
        .into_par_iter()
        .map(|i| {
            let mut hits = Vec::new();
            let mut parallel = Vec::new();
            let Some(si) = &samples[i] else {
                return (hits, parallel);
            };
            for j in i + 1..samples.len() {
                let Some(sj) = &samples[j] else { continue };
                let ca = lines_closest_approach(&si.line, &sj.line);
                let same = ca.parallel && ca.gap < tol.intersection_gap;
                if same {
                    continue;
                }
                let angle = line_angle(&si.line, &sj.line);
                if angle < tol.angle {
                    parallel.push(ParallelPair { i, j, angle });
                }
                if !ca.parallel && ca.gap < tol.intersection_gap {
                    let inside = |c: Option<(T, T)>, t: T| c.is_some_and(|(a, b)| t >= a && t <= b);
                    if inside(clips[i], ca.t1) && inside(clips[j], ca.t2) {
                        hits.push(IntersectingPair {
                            i,
                            j,
                            p_i: si.point,
                            p_j: sj.point,
                            t_i: ca.t1,
                            t_j: ca.t2,
                            gap: ca.gap,
                        });
                    }
                }
            }
            (hits, parallel)
        })
        .collect();
    let mut hits = Vec::new();
    let mut parallel = Vec::new();
    for (h, p) in rows {
        hits.extend(h);
        parallel.extend(p);
    }
    (hits, parallel)
}

/// Samples a regular grid on `bx` and records unit, straightness, rank and
/// contact measurements, then tests every pair of sampled lines for
/// crossings inside the enlarged box and for parallelism.
pub fn fibration_audit<T: Real>(
    field: &VectorFieldSpec,
    bx: &AuditBox<T>,
    n_per_axis: usize,
    tol: &AuditTolerances<T>,
) -> Result<AuditReport<T>, Error> {
    let (samples, failures) = sample_grid(field, bx, n_per_axis, tol)?;
    let (intersections, parallel_pairs) = scan_pairs(&samples, bx, tol);

    let ok: Vec<&PointSample<T>> = samples.iter().flatten().collect();
    let mut rank_histogram = [0usize; 4];
    let mut unit_defect_max = T::zero();
    let mut straightness_defect_max = T::zero();
    let mut contact_defect_min = T::infinity();
    let mut contact_defect_max = T::neg_infinity();
    for s in &ok {
        rank_histogram[s.rank.rank] += 1;
        unit_defect_max = unit_defect_max.max(s.unit_defect);
        straightness_defect_max = straightness_defect_max.max(s.straightness_defect);
        contact_defect_min = contact_defect_min.min(s.contact_defect);
        contact_defect_max = contact_defect_max.max(s.contact_defect);
    }
    if ok.is_empty() {
        contact_defect_min = T::nan();
        contact_defect_max = T::nan();
    }
    let is_contact_on_box = !ok.is_empty()
        && failures.is_empty()
        && (contact_defect_min > tol.contact || contact_defect_max < -tol.contact);
    let is_fibration_on_box = !ok.is_empty()
        && failures.is_empty()
        && unit_defect_max <= tol.unit
        && straightness_defect_max <= tol.straightness
        && intersections.is_empty();
    Ok(AuditReport {
        grid_per_axis: n_per_axis,
        points_sampled: samples.len(),
        tolerances: *tol,
        unit_defect_max,
        straightness_defect_max,
        parallel_pairs_count: parallel_pairs.len(),
        intersections,
        parallel_pairs,
        rank_histogram,
        contact_defect_min,
        contact_defect_max,
        zero_set_detected: !ok.is_empty() && !is_contact_on_box,
        failures,
        is_fibration_on_box,
        is_contact_on_box,
        rank_profile: RankProfile::from_histogram(&rank_histogram),
        note: format!(
            "box-local evidence: no violation found at resolution {n_per_axis} is not a proof"
        ),
    })
}

/// Sampled pairs on distinct lines whose directions differ by less than
/// `angle_tol` (unoriented).
pub fn parallel_pairs<T: Real>(
    field: &VectorFieldSpec,
    bx: &AuditBox<T>,
    n_per_axis: usize,
    angle_tol: T,
) -> Result<Vec<ParallelPair<T>>, Error> {
    let tol = AuditTolerances {
        angle: angle_tol,
        ..AuditTolerances::default()
    };
    let (samples, _) = sample_grid(field, bx, n_per_axis, &tol)?;
    Ok(scan_pairs(&samples, bx, &tol).1)
}
