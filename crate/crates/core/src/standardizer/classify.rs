use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Error;
use crate::expr::{Expr, VectorFieldSpec};
use crate::fibration::{fibration_audit, AuditBox, AuditReport, AuditTolerances, RankProfile};
use crate::lemmas::{
    constancy_along_flow, flow_kernel_field, projected_straightness, winding_number,
    DEFAULT_FLOW_STEP,
};
use crate::linalg::{Point3, Vec3};
use crate::scalar::{lit, Real};

use super::{
    find_normal_frame, min_image_separation, recover_theta, verify_field_pullback, verify_pullback,
    AffineFrame, ClosedFormTheta, SplineTheta, ThetaFunction,
};

/// Reported with rank-2 verdicts; tightness is cited, never computed.
pub const RANK2_CITATION: &str =
    "M. Harrison, tightness criterion for line fibrations (Theorem 2): a line \
     fibration with a line parallel to no other line induces a tight contact structure, hence the \
     standard one by Eliashberg's classification. Cited, not computed.";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    NotAFibrationOnBox,
    FibrationNotContact,
    ContactRank2Skew,
    ContactRank1Standardized,
    MixedRank,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassifyOptions<T> {
    pub tolerances: AuditTolerances<T>,
    pub theta_samples: usize,
    pub pullback_points: usize,
    pub pullback_tol: T,
    pub seed: u64,
    /// Closed-form `θ` in `z`, preferred over the sampled spline when given.
    pub theta: Option<Expr>,
    pub winding_epsilon: T,
    pub winding_samples: usize,
    pub flow_step: T,
    /// Grid points per axis for the injectivity check of Φ.
    pub injectivity_grid: usize,
}

impl<T: Real> Default for ClassifyOptions<T> {
    fn default() -> Self {
        ClassifyOptions {
            tolerances: AuditTolerances::default(),
            theta_samples: 401,
            pullback_points: 100,
            pullback_tol: lit(1e-8),
            seed: 42,
            theta: None,
            winding_epsilon: lit(0.05),
            winding_samples: 64,
            flow_step: lit(DEFAULT_FLOW_STEP),
            injectivity_grid: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindingCheck<T> {
    pub at: Point3<T>,
    pub epsilon: T,
    pub winding: Option<i64>,
    pub degenerate: bool,
    pub samples: usize,
    pub min_w: Option<T>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowCheck<T> {
    pub from: Point3<T>,
    pub t_max: T,
    pub step: T,
    pub points: usize,
    pub constancy: Option<T>,
    pub projected_straightness: Option<T>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LemmaChecks<T> {
    pub winding: Vec<WindingCheck<T>>,
    pub flow: Vec<FlowCheck<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Standardization<T> {
    pub frame: Option<AffineFrame<T>>,
    pub theta_source: &'static str,
    pub theta_z: Vec<T>,
    pub theta_values: Vec<T>,
    pub theta_prime_min: Option<T>,
    pub theta_prime_max: Option<T>,
    /// `Φ*α - (dz + x dy)` with `α` built from `θ`.
    pub pullback_defect: Option<T>,
    /// Same with `α` read off the field through the frame.
    pub field_pullback_defect: Option<T>,
    pub pullback_tolerance: T,
    pub pullback_points: usize,
    /// Smallest image distance of distinct grid points under Φ.
    pub min_image_separation: Option<T>,
    pub theta_prime_zero_near: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification<T> {
    pub verdict: Verdict,
    pub audit: AuditReport<T>,
    pub lemma_checks: LemmaChecks<T>,
    pub standardization: Option<Standardization<T>>,
    pub citation: Option<&'static str>,
    pub diagnostics: Vec<String>,
}

/// Uniform points in the cube `[-h, h]³`, reproducible from `seed`.
pub fn random_points<T: Real>(seed: u64, count: usize, half_width: T) -> Vec<Point3<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = half_width.to_f64().unwrap_or(1.0);
    (0..count)
        .map(|_| Vec3([0; 3].map(|_| lit::<T>(rng.gen_range(-h..=h)))))
        .collect()
}

/// Kernel flow from `from` over `[-t_max, t_max]`, reduced to its constancy
/// and projected straightness defects.
pub fn flow_check<T: Real>(
    field: &VectorFieldSpec,
    from: Point3<T>,
    t_max: T,
    step: T,
    rank_tol: T,
) -> FlowCheck<T> {
    let result = flow_kernel_field(field, &from, t_max, step, rank_tol).and_then(|curve| {
        let v0 = field.evaluate(&from)?;
        Ok((
            curve.points.len(),
            constancy_along_flow(field, &curve)?,
            projected_straightness(&curve, &v0)?,
        ))
    });
    let mut out = FlowCheck {
        from,
        t_max,
        step,
        points: 0,
        constancy: None,
        projected_straightness: None,
        error: None,
    };
    match result {
        Ok((n, c, s)) => {
            out.points = n;
            out.constancy = Some(c);
            out.projected_straightness = Some(s);
        }
        Err(e) => out.error = Some(e.to_string()),
    }
    out
}

/// Winding number at `at`, with errors folded into the record.
pub fn winding_check<T: Real>(
    field: &VectorFieldSpec,
    at: Point3<T>,
    epsilon: T,
    samples: usize,
) -> WindingCheck<T> {
    match winding_number(field, &at, epsilon, samples) {
        Ok(w) => WindingCheck {
            at,
            epsilon: w.epsilon,
            winding: (!w.degenerate).then_some(w.winding),
            degenerate: w.degenerate,
            samples: w.samples,
            min_w: Some(w.min_w),
            error: w.reason,
        },
        Err(e) => WindingCheck {
            at,
            epsilon,
            winding: None,
            degenerate: true,
            samples: 0,
            min_w: None,
            error: Some(e.to_string()),
        },
    }
}

impl<T: Real> Standardization<T> {
    /// Record with nothing computed yet.
    pub fn empty(
        theta_source: &'static str,
        pullback_tolerance: T,
        pullback_points: usize,
    ) -> Self {
        Standardization {
            frame: None,
            theta_source,
            theta_z: Vec::new(),
            theta_values: Vec::new(),
            theta_prime_min: None,
            theta_prime_max: None,
            pullback_defect: None,
            field_pullback_defect: None,
            pullback_tolerance,
            pullback_points,
            min_image_separation: None,
            theta_prime_zero_near: None,
            error: None,
        }
    }
}

fn standardize<T: Real>(
    field: &VectorFieldSpec,
    bx: &AuditBox<T>,
    opts: &ClassifyOptions<T>,
) -> (Standardization<T>, Option<Error>) {
    let z_half = {
        let h = bx.half_extents();
        h.x().min(h.y()).min(h.z())
    };
    let source = if opts.theta.is_some() {
        "closed_form"
    } else {
        "spline"
    };
    let mut out = Standardization::empty(source, opts.pullback_tol, opts.pullback_points);
    let run = |out: &mut Standardization<T>| -> Result<(), Error> {
        let frame = find_normal_frame(field, &bx.center(), opts.tolerances.rank)?;
        out.frame = Some(frame);
        let profile = recover_theta(field, &frame, z_half, opts.theta_samples)?;
        let (lo, hi) = profile.theta_prime_range();
        out.theta_prime_min = Some(lo);
        out.theta_prime_max = Some(hi);
        out.theta_z = profile.z.clone();
        out.theta_values = profile.theta.clone();
        let theta: Box<dyn ThetaFunction<T>> = match &opts.theta {
            Some(e) => Box::new(ClosedFormTheta::new(e.clone())?),
            None => Box::new(SplineTheta::from_profile(&profile)?),
        };
        let points = random_points(opts.seed, opts.pullback_points, z_half);
        out.pullback_defect =
            Some(verify_pullback(theta.as_ref(), &points, opts.pullback_tol)?.max_defect);
        out.field_pullback_defect = Some(
            verify_field_pullback(field, &frame, theta.as_ref(), &points, opts.pullback_tol)?
                .max_defect,
        );
        let grid = AuditBox::cube(-z_half, z_half)?.grid(opts.injectivity_grid.max(2));
        out.min_image_separation = Some(min_image_separation(theta.as_ref(), &grid)?);
        Ok(())
    };
    match run(&mut out) {
        Ok(()) => (out, None),
        Err(e) => {
            if let Error::ThetaPrimeVanishes { z } = e {
                out.theta_prime_zero_near = Some(z);
            }
            out.error = Some(e.to_string());
            (out, Some(e))
        }
    }
}

/// Audit, contact test and rank profile, then the matching construction:
/// the winding check for rank 2, or the normal form, kernel flow and
/// pullback verification for rank 1. Sub-steps run sequentially.
pub fn classify_field<T: Real>(
    field: &VectorFieldSpec,
    bx: &AuditBox<T>,
    grid: usize,
    opts: &ClassifyOptions<T>,
) -> Result<Classification<T>, Error> {
    let audit = fibration_audit(field, bx, grid, &opts.tolerances)?;
    let mut out = Classification {
        verdict: Verdict::NotAFibrationOnBox,
        lemma_checks: LemmaChecks::default(),
        standardization: None,
        citation: None,
        diagnostics: Vec::new(),
        audit,
    };
    if !out.audit.is_fibration_on_box {
        out.diagnostics
            .push("unit, straightness or intersection audit failed on the box".into());
        return Ok(out);
    }
    let contact = out.audit.is_contact_on_box;
    match out.audit.rank_profile {
        RankProfile::Constant1 => {
            let center = bx.center();
            let h = bx.half_extents();
            out.lemma_checks.flow.push(flow_check(
                field,
                center,
                h.x().min(h.y()).min(h.z()),
                opts.flow_step,
                opts.tolerances.rank,
            ));
            let (std, err) = standardize(field, bx, opts);
            let pullback_ok = std.pullback_defect.is_some_and(|d| d < opts.pullback_tol);
            out.verdict = match (&err, contact) {
                (_, false) => Verdict::FibrationNotContact,
                (None, true) if pullback_ok => Verdict::ContactRank1Standardized,
                (Some(Error::ThetaPrimeVanishes { .. }), true) => Verdict::FibrationNotContact,
                _ => {
                    out.diagnostics.push(
                        "rank 1 contact field is not in the normal form expected of a global fibration".into(),
                    );
                    Verdict::NotAFibrationOnBox
                }
            };
            if !contact {
                out.diagnostics
                    .push("contact condition fails on the box; standardization refused".into());
            }
            out.standardization = Some(std);
        }
        _ if !contact => {
            out.verdict = Verdict::FibrationNotContact;
        }
        RankProfile::Constant2 => {
            out.verdict = Verdict::ContactRank2Skew;
            out.citation = Some(RANK2_CITATION);
            let check = winding_check(
                field,
                bx.center(),
                opts.winding_epsilon,
                opts.winding_samples,
            );
            out.lemma_checks.winding.push(check);
        }
        RankProfile::Constant0 | RankProfile::Mixed => {
            out.verdict = Verdict::MixedRank;
            out.diagnostics
                .push("rank of dV is not constant on the box; no standardization attempted".into());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_points_are_reproducible() {
        let a = random_points::<f64>(7, 5, 2.0);
        let b = random_points::<f64>(7, 5, 2.0);
        assert_eq!(a, b);
        assert!(a.iter().all(|p| p.0.iter().all(|c| c.abs() <= 2.0)));
        assert_ne!(a, random_points::<f64>(8, 5, 2.0));
    }
}
