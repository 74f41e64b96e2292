//! Line fibrations of R^3 and the plane fields they induce.
//!
//! A unit vector field `V` whose integral curves are straight lines fibres
//! R^3 by oriented lines; its orthogonal planes `ξ_p = V(p)^⊥` form the
//! kernel of `α = V₁dx + V₂dy + V₃dz`. This crate audits such fields on a
//! box, tests the contact condition `⟨V, curl V⟩ ≠ 0`, classifies the rank
//! of `dV`, checks the winding and kernel-flow arguments numerically, and in
//! the rank-1 case recovers the normal form `V = (cos θ(z), -sin θ(z), 0)`
//! and verifies the explicit diffeomorphism pulling `α` back to
//! `dz + x dy`.
//!
//! Numerics are generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix the double-precision types the CLI uses.

// `!(x > 0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diffgeo;
pub mod error;
pub mod expr;
pub mod fibration;
pub mod gallery;
pub mod lemmas;
pub mod linalg;
pub mod scalar;
pub mod standardizer;

pub use error::{Error, EvalError, ParseError};
pub use expr::{parse_expression, Dual3, Expr, Jet, Taylor2, VectorFieldSpec};
pub use linalg::{Mat3, Point3, Vec3};
pub use scalar::Real;

pub type Vec3f64 = Vec3<f64>;
pub type Mat3f64 = Mat3<f64>;
pub type Jet64 = Jet<f64>;
pub type Dual64 = Dual3<f64>;
pub type PlaneFrame64 = diffgeo::PlaneFrame<f64>;
pub type RankClass64 = diffgeo::RankClass<f64>;
pub type Line64 = fibration::Line<f64>;
pub type Box64 = fibration::AuditBox<f64>;
pub type AuditReport64 = fibration::AuditReport<f64>;
pub type WindingResult64 = lemmas::WindingResult<f64>;
pub type FlowCurve64 = lemmas::FlowCurve<f64>;
pub type AffineFrame64 = standardizer::AffineFrame<f64>;
pub type ThetaProfile64 = standardizer::ThetaProfile<f64>;
pub type Classification64 = standardizer::Classification<f64>;

pub type Result<T, E = Error> = std::result::Result<T, E>;
