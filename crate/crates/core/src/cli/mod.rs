//! Command-line front end. Every subcommand prints one pretty JSON report
//! embedding the tool version and the fully resolved configuration.
//!
//! Exit codes: 0 when a result was computed, 1 for invalid input, 2 for a
//! numerical failure such as a degenerate winding circle or an ambiguous
//! kernel direction.

mod args;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;

pub use args::{
    parse_box, parse_point, Cli, Command, CommonArgs, ExamplesArgs, FlowArgs, StandardizeArgs,
    WindingArgs,
};

use crate::error::Error;
use crate::expr::{parse_expression, split_top_level, VectorFieldSpec};
use crate::fibration::{
    fibration_audit, parallel_pairs, sample_grid, AuditBox, AuditReport, AuditTolerances,
    ParallelPair, PointSample, RankProfile,
};
use crate::gallery::{example, example_gallery, GalleryEntry};
use crate::linalg::Point3;
use crate::standardizer::{
    classify_field, flow_check, winding_check, ClassifyOptions, FlowCheck, Standardization,
    Verdict, WindingCheck,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_INPUT: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Clone, Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

const TOOL: ToolInfo = ToolInfo {
    name: env!("CARGO_PKG_NAME"),
    version: env!("CARGO_PKG_VERSION"),
};

#[derive(Clone, Debug, Serialize)]
pub struct FieldConfig {
    /// `inline` or `example:<name>`.
    pub source: String,
    pub components: [String; 3],
    pub normalize: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WindingConfig {
    pub at: Point3<f64>,
    pub epsilon: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowConfig {
    pub at: Point3<f64>,
    pub t_max: f64,
    pub step: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StandardizeConfig {
    pub theta: Option<String>,
    pub theta_samples: usize,
    pub pullback_points: usize,
    pub pullback_tolerance: f64,
    pub winding_epsilon: f64,
    pub winding_samples: usize,
    pub flow_step: f64,
    pub injectivity_grid: usize,
}

/// Resolved inputs of one run, echoed in the report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub field: FieldConfig,
    #[serde(rename = "box")]
    pub bounds: AuditBox<f64>,
    pub grid: usize,
    pub seed: u64,
    pub tolerances: AuditTolerances<f64>,
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winding: Option<WindingConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub standardize: Option<StandardizeConfig>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContactBlock {
    pub defect_min: f64,
    pub defect_max: f64,
    pub zero_set_detected: bool,
    pub is_contact_on_box: bool,
    pub tolerance: f64,
    pub points: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RankBlock {
    pub histogram: [usize; 4],
    pub profile: RankProfile,
    pub tolerance: f64,
    pub points: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SkewBlock {
    pub angle_tolerance: f64,
    pub parallel_pairs_count: usize,
    pub skew_on_box: bool,
    pub pairs: Vec<ParallelPair<f64>>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LemmaBlock {
    pub winding: Vec<WindingCheck<f64>>,
    pub flow: Vec<FlowCheck<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StandardizationBlock {
    pub verdict: Verdict,
    pub citation: Option<&'static str>,
    pub diagnostics: Vec<String>,
    #[serde(flatten)]
    pub details: Standardization<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: ToolInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<RunConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditReport<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contact: Option<ContactBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<RankBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skew: Option<SkewBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemma_checks: Option<LemmaBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub standardization: Option<StandardizationBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub examples: Option<Vec<GalleryEntry>>,
}

impl Report {
    fn new(config: Option<RunConfig>) -> Self {
        Report {
            tool: TOOL,
            config,
            audit: None,
            contact: None,
            rank: None,
            skew: None,
            lemma_checks: None,
            standardization: None,
            examples: None,
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::InvalidArgument(_) => EXIT_INVALID_INPUT,
        _ => EXIT_NUMERICAL,
    }
}

fn resolve_field(common: &CommonArgs) -> Result<(VectorFieldSpec, FieldConfig), Error> {
    let (spec, source) = match (&common.field, &common.example) {
        (Some(text), None) => (
            VectorFieldSpec::parse(text, common.normalize)?,
            "inline".to_string(),
        ),
        (None, Some(name)) => {
            let entry = example(name)?;
            let mut spec = entry.field();
            spec.normalize |= common.normalize;
            (spec, format!("example:{name}"))
        }
        _ => {
            return Err(Error::InvalidArgument(
                "exactly one of --field or --example is required".into(),
            ))
        }
    };
    let components = match &common.field {
        Some(text) => {
            let pieces = split_top_level(text);
            [0, 1, 2].map(|i| pieces[i].0.trim().to_string())
        }
        None => spec.components.clone().map(|e| e.to_string()),
    };
    let normalize = spec.normalize;
    Ok((
        spec,
        FieldConfig {
            source,
            components,
            normalize,
        },
    ))
}

fn base_config(
    command: &'static str,
    common: &CommonArgs,
) -> Result<(VectorFieldSpec, RunConfig), Error> {
    let (spec, field) = resolve_field(common)?;
    if common.grid < 2 {
        return Err(Error::InvalidArgument(format!(
            "--grid must be at least 2, got {}",
            common.grid
        )));
    }
    let config = RunConfig {
        command,
        field,
        bounds: parse_box(&common.bounds)?,
        grid: common.grid,
        seed: common.seed,
        tolerances: common.tolerances(),
        out: common.out.clone(),
        winding: None,
        flow: None,
        standardize: None,
    };
    Ok((spec, config))
}

fn summarize_samples(samples: &[Option<PointSample<f64>>]) -> (Vec<&PointSample<f64>>, usize) {
    let ok: Vec<&PointSample<f64>> = samples.iter().flatten().collect();
    let failures = samples.len() - ok.len();
    (ok, failures)
}

fn contact_block(spec: &VectorFieldSpec, cfg: &RunConfig) -> Result<ContactBlock, Error> {
    let (samples, _) = sample_grid(spec, &cfg.bounds, cfg.grid, &cfg.tolerances)?;
    let (ok, failures) = summarize_samples(&samples);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in &ok {
        lo = lo.min(s.contact_defect);
        hi = hi.max(s.contact_defect);
    }
    let tol = cfg.tolerances.contact;
    let contact = !ok.is_empty() && failures == 0 && (lo > tol || hi < -tol);
    Ok(ContactBlock {
        defect_min: lo,
        defect_max: hi,
        zero_set_detected: !ok.is_empty() && !contact,
        is_contact_on_box: contact,
        tolerance: tol,
        points: samples.len(),
        failures,
    })
}

fn contact_from_audit(audit: &AuditReport<f64>) -> ContactBlock {
    ContactBlock {
        defect_min: audit.contact_defect_min,
        defect_max: audit.contact_defect_max,
        zero_set_detected: audit.zero_set_detected,
        is_contact_on_box: audit.is_contact_on_box,
        tolerance: audit.tolerances.contact,
        points: audit.points_sampled,
        failures: audit.failures.len(),
    }
}

fn rank_block(spec: &VectorFieldSpec, cfg: &RunConfig) -> Result<RankBlock, Error> {
    let (samples, _) = sample_grid(spec, &cfg.bounds, cfg.grid, &cfg.tolerances)?;
    let (ok, failures) = summarize_samples(&samples);
    let mut histogram = [0usize; 4];
    for s in &ok {
        histogram[s.rank.rank] += 1;
    }
    Ok(RankBlock {
        histogram,
        profile: RankProfile::from_histogram(&histogram),
        tolerance: cfg.tolerances.rank,
        points: samples.len(),
        failures,
    })
}

/// Runs one command and returns the report together with its exit code.
pub fn execute(command: &Command) -> Result<(Report, i32), Error> {
    match command {
        Command::Examples(_) => {
            let mut report = Report::new(None);
            report.examples = Some(example_gallery().to_vec());
            Ok((report, EXIT_OK))
        }
        Command::Audit(common) => {
            let (spec, cfg) = base_config("audit", common)?;
            let audit = fibration_audit(&spec, &cfg.bounds, cfg.grid, &cfg.tolerances)?;
            let mut report = Report::new(Some(cfg));
            report.audit = Some(audit);
            Ok((report, EXIT_OK))
        }
        Command::Contact(common) => {
            let (spec, cfg) = base_config("contact", common)?;
            let block = contact_block(&spec, &cfg)?;
            let mut report = Report::new(Some(cfg));
            report.contact = Some(block);
            Ok((report, EXIT_OK))
        }
        Command::Rank(common) => {
            let (spec, cfg) = base_config("rank", common)?;
            let block = rank_block(&spec, &cfg)?;
            let mut report = Report::new(Some(cfg));
            report.rank = Some(block);
            Ok((report, EXIT_OK))
        }
        Command::Skew(common) => {
            let (spec, cfg) = base_config("skew", common)?;
            let pairs = parallel_pairs(&spec, &cfg.bounds, cfg.grid, cfg.tolerances.angle)?;
            let mut report = Report::new(Some(cfg.clone()));
            report.skew = Some(SkewBlock {
                angle_tolerance: cfg.tolerances.angle,
                parallel_pairs_count: pairs.len(),
                skew_on_box: pairs.is_empty(),
                pairs,
            });
            Ok((report, EXIT_OK))
        }
        Command::Winding(w) => {
            let (spec, mut cfg) = base_config("winding", &w.common)?;
            let at = match &w.at {
                Some(text) => parse_point(text)?,
                None => cfg.bounds.center(),
            };
            if !(w.eps > 0.0 && w.eps.is_finite()) || w.samples < 16 {
                return Err(Error::InvalidArgument(
                    "--eps must be positive and --samples at least 16".into(),
                ));
            }
            cfg.winding = Some(WindingConfig {
                at,
                epsilon: w.eps,
                samples: w.samples,
            });
            let check = winding_check(&spec, at, w.eps, w.samples);
            let code = if check.degenerate {
                EXIT_NUMERICAL
            } else {
                EXIT_OK
            };
            let mut report = Report::new(Some(cfg));
            report.lemma_checks = Some(LemmaBlock {
                winding: vec![check],
                flow: Vec::new(),
            });
            Ok((report, code))
        }
        Command::Flow(f) => {
            let (spec, mut cfg) = base_config("flow", &f.common)?;
            let at = match &f.at {
                Some(text) => parse_point(text)?,
                None => cfg.bounds.center(),
            };
            if !(f.tmax > 0.0 && f.step > 0.0 && f.tmax.is_finite() && f.step.is_finite()) {
                return Err(Error::InvalidArgument(
                    "--tmax and --step must be positive".into(),
                ));
            }
            cfg.flow = Some(FlowConfig {
                at,
                t_max: f.tmax,
                step: f.step,
            });
            let check = flow_check(&spec, at, f.tmax, f.step, cfg.tolerances.rank);
            let code = if check.error.is_some() {
                EXIT_NUMERICAL
            } else {
                EXIT_OK
            };
            let mut report = Report::new(Some(cfg));
            report.lemma_checks = Some(LemmaBlock {
                winding: Vec::new(),
                flow: vec![check],
            });
            Ok((report, code))
        }
        Command::Standardize(s) => {
            let (spec, mut cfg) = base_config("standardize", &s.common)?;
            let theta = s.theta.as_deref().map(parse_expression).transpose()?;
            if s.theta_samples < 3 || s.pullback_points == 0 {
                return Err(Error::InvalidArgument(
                    "--theta-samples must be at least 3 and --pullback-points positive".into(),
                ));
            }
            let opts = ClassifyOptions {
                tolerances: cfg.tolerances,
                theta_samples: s.theta_samples,
                pullback_points: s.pullback_points,
                seed: cfg.seed,
                theta,
                ..ClassifyOptions::default()
            };
            cfg.standardize = Some(StandardizeConfig {
                theta: s.theta.clone(),
                theta_samples: opts.theta_samples,
                pullback_points: opts.pullback_points,
                pullback_tolerance: opts.pullback_tol,
                winding_epsilon: opts.winding_epsilon,
                winding_samples: opts.winding_samples,
                flow_step: opts.flow_step,
                injectivity_grid: opts.injectivity_grid,
            });
            let c = classify_field(&spec, &cfg.bounds, cfg.grid, &opts)?;
            let mut report = Report::new(Some(cfg));
            report.contact = Some(contact_from_audit(&c.audit));
            report.audit = Some(c.audit);
            report.lemma_checks = Some(LemmaBlock {
                winding: c.lemma_checks.winding,
                flow: c.lemma_checks.flow,
            });
            let details = c.standardization.unwrap_or_else(|| {
                Standardization::empty("none", opts.pullback_tol, opts.pullback_points)
            });
            report.standardization = Some(StandardizationBlock {
                verdict: c.verdict,
                citation: c.citation,
                diagnostics: c.diagnostics,
                details,
            });
            Ok((report, EXIT_OK))
        }
    }
}

fn first_error(l: &LemmaBlock) -> Option<String> {
    l.winding
        .iter()
        .filter_map(|w| w.error.clone())
        .chain(l.flow.iter().filter_map(|f| f.error.clone()))
        .next()
}

fn out_path(command: &Command) -> Option<&PathBuf> {
    match command {
        Command::Audit(c) | Command::Contact(c) | Command::Rank(c) | Command::Skew(c) => {
            c.out.as_ref()
        }
        Command::Winding(w) => w.common.out.as_ref(),
        Command::Flow(f) => f.common.out.as_ref(),
        Command::Standardize(s) => s.common.out.as_ref(),
        Command::Examples(e) => e.out.as_ref(),
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// the JSON report to `stdout` or to `--out`. Returns the process exit code.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_INVALID_INPUT
                }
            };
        }
    };
    let (report, code) = match execute(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    if code != EXIT_OK {
        if let Some(err) = report.lemma_checks.as_ref().and_then(first_error) {
            let _ = writeln!(stderr, "numerical failure: {err}");
        }
    }
    let mut json = match serde_json::to_string_pretty(&report) {
        Ok(j) => j,
        Err(e) => {
            let _ = writeln!(stderr, "error: could not serialize report: {e}");
            return EXIT_NUMERICAL;
        }
    };
    json.push('\n');
    match out_path(&cli.command) {
        Some(path) => {
            if let Err(e) = std::fs::write(path, json) {
                let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                return EXIT_INVALID_INPUT;
            }
        }
        None => {
            let _ = stdout.write_all(json.as_bytes());
        }
    }
    code
}
