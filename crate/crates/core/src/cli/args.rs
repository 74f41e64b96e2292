use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::fibration::{AuditBox, AuditTolerances};
use crate::linalg::Vec3;

#[derive(Debug, Parser)]
#[command(
    name = "linefib",
    version,
    about = "Audit line fibrations of R^3, test the contact condition and standardize the rank-1 normal form"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fibration audit on a grid: unit length, straightness, crossings, rank
    Audit(CommonArgs),
    /// Statistics of the contact defect <V, curl V> on the grid
    Contact(CommonArgs),
    /// Rank profile of dV on the grid
    Rank(CommonArgs),
    /// Scan for distinct parallel lines
    Skew(CommonArgs),
    /// Winding of the projected field around a point
    Winding(WindingArgs),
    /// Flow of the kernel line field ker dV ∩ ξ
    Flow(FlowArgs),
    /// Full classification, with the normal form and pullback check for rank 1
    Standardize(StandardizeArgs),
    /// List the built-in example fields
    Examples(ExamplesArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Three comma-separated component expressions, e.g. "cos(z),-sin(z),0"
    #[arg(long, allow_hyphen_values = true, conflicts_with = "example")]
    pub field: Option<String>,
    /// Name of a built-in example field
    #[arg(long)]
    pub example: Option<String>,
    /// Divide the field by its norm before analysis
    #[arg(long)]
    pub normalize: bool,
    /// `lo,hi` for a cube or `x0,x1,y0,y1,z0,z1`
    #[arg(long = "box", allow_hyphen_values = true, default_value = "-1,1")]
    pub bounds: String,
    /// Grid points per axis
    #[arg(long, default_value_t = 5)]
    pub grid: usize,
    /// Seed for random sample points
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub unit_tol: Option<f64>,
    #[arg(long)]
    pub straight_tol: Option<f64>,
    #[arg(long)]
    pub gap_tol: Option<f64>,
    #[arg(long)]
    pub angle_tol: Option<f64>,
    #[arg(long)]
    pub rank_tol: Option<f64>,
    #[arg(long)]
    pub contact_tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct WindingArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Base point `x,y,z` (default: box center)
    #[arg(long, allow_hyphen_values = true)]
    pub at: Option<String>,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct FlowArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Start point `x,y,z` (default: box center)
    #[arg(long, allow_hyphen_values = true)]
    pub at: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
}

#[derive(Debug, Clone, Args)]
pub struct StandardizeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Closed-form theta in z, used for the diffeomorphism instead of the spline
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<String>,
    #[arg(long, default_value_t = 401)]
    pub theta_samples: usize,
    #[arg(long, default_value_t = 100)]
    pub pullback_points: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ExamplesArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_floats(text: &str, what: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    Error::InvalidArgument(format!("{what}: `{s}` is not a finite number"))
                })
        })
        .collect()
}

pub fn parse_box(text: &str) -> Result<AuditBox<f64>, Error> {
    match parse_floats(text, "--box")?.as_slice() {
        [lo, hi] => AuditBox::cube(*lo, *hi),
        [x0, x1, y0, y1, z0, z1] => {
            AuditBox::new(Vec3::new(*x0, *y0, *z0), Vec3::new(*x1, *y1, *z1))
        }
        other => Err(Error::InvalidArgument(format!(
            "--box takes 2 or 6 numbers, got {}",
            other.len()
        ))),
    }
}

pub fn parse_point(text: &str) -> Result<Vec3<f64>, Error> {
    match parse_floats(text, "--at")?.as_slice() {
        [x, y, z] => Ok(Vec3::new(*x, *y, *z)),
        other => Err(Error::InvalidArgument(format!(
            "--at takes 3 numbers, got {}",
            other.len()
        ))),
    }
}

impl CommonArgs {
    pub fn tolerances(&self) -> AuditTolerances<f64> {
        let d = AuditTolerances::default();
        AuditTolerances {
            unit: self.unit_tol.unwrap_or(d.unit),
            straightness: self.straight_tol.unwrap_or(d.straightness),
            intersection_gap: self.gap_tol.unwrap_or(d.intersection_gap),
            angle: self.angle_tol.unwrap_or(d.angle),
            rank: self.rank_tol.unwrap_or(d.rank),
            contact: self.contact_tol.unwrap_or(d.contact),
            enlarge: d.enlarge,
        }
    }
}
