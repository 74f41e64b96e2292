use std::fmt;

use serde::Serialize;

use super::ast::{BinOp, Expr, Var};
use super::number::{Dual3, ExprValue};
use super::parser::{parse_expression, split_top_level};
use crate::error::{EvalError, ParseError};
use crate::linalg::{Mat3, Point3, Vec3};
use crate::scalar::{lit, Real};

/// A vector field on R^3 given by three closed-form component expressions.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFieldSpec {
    pub components: [Expr; 3],
    /// Divide by the pointwise norm before any analysis.
    pub normalize: bool,
}

/// Value and Jacobian of a field at a point; `jacobian.0[i][j] = ∂V_i/∂x_j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Jet<T> {
    pub value: Vec3<T>,
    pub jacobian: Mat3<T>,
}

impl VectorFieldSpec {
    pub fn new(components: [Expr; 3], normalize: bool) -> Self {
        VectorFieldSpec {
            components,
            normalize,
        }
    }

    /// Parses `"v1,v2,v3"`; commas inside parentheses do not split.
    pub fn parse(text: &str, normalize: bool) -> Result<Self, ParseError> {
        let parts = split_top_level(text);
        if parts.len() != 3 {
            return Err(ParseError::ComponentCount(parts.len()));
        }
        let mut exprs = Vec::with_capacity(3);
        for (piece, offset) in parts {
            let e = parse_expression(piece).map_err(|err| shift(err, offset))?;
            exprs.push(e);
        }
        let components: [Expr; 3] = exprs.try_into().expect("three components");
        Ok(VectorFieldSpec::new(components, normalize))
    }

    /// Parses three separate component strings.
    pub fn from_components(
        v1: &str,
        v2: &str,
        v3: &str,
        normalize: bool,
    ) -> Result<Self, ParseError> {
        Ok(VectorFieldSpec::new(
            [
                parse_expression(v1)?,
                parse_expression(v2)?,
                parse_expression(v3)?,
            ],
            normalize,
        ))
    }

    fn eval_generic<T: Real, N: ExprValue<T>>(&self, vars: &[N; 3]) -> Result<[N; 3], EvalError> {
        let raw = [
            self.components[0].eval(vars)?,
            self.components[1].eval(vars)?,
            self.components[2].eval(vars)?,
        ];
        if !self.normalize {
            return Ok(raw);
        }
        let sq = raw[0] * raw[0] + raw[1] * raw[1] + raw[2] * raw[2];
        let s = sq.value();
        if s.is_zero() {
            return Err(EvalError::ZeroVector);
        }
        let n = s.sqrt();
        let norm = sq.chain(
            n,
            T::one() / (lit::<T>(2.0) * n),
            -T::one() / (lit::<T>(4.0) * n * s),
        );
        let out = raw.map(|c| c / norm);
        if out.iter().all(|c| c.is_finite()) {
            Ok(out)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    /// `V(p)`, unit length when `normalize` is set.
    pub fn evaluate<T: Real>(&self, p: &Point3<T>) -> Result<Vec3<T>, EvalError> {
        self.eval_generic(&p.0).map(Vec3)
    }

    /// `V(p)` and `dV(p)` by forward-mode differentiation. With `normalize`
    /// set, the quotient by the norm is differentiated as well.
    pub fn evaluate_jet<T: Real>(&self, p: &Point3<T>) -> Result<Jet<T>, EvalError> {
        let out = self.eval_generic(&Dual3::seed(p.0))?;
        Ok(Jet {
            value: Vec3(out.map(|d| d.value)),
            jacobian: Mat3(out.map(|d| d.partials)),
        })
    }

    /// The field `p ↦ R·V(Rᵀ p)`, i.e. this field expressed after rotating
    /// space by `rotation`.
    pub fn rotated(&self, rotation: &Mat3<f64>) -> VectorFieldSpec {
        let r = rotation.0;
        let vars = [Var::X, Var::Y, Var::Z];
        // (Rᵀ p)_j = Σ_i R_ij p_i
        let args: [Expr; 3] =
            [0, 1, 2].map(|j| linear_combination((0..3).map(|i| (r[i][j], Expr::Var(vars[i])))));
        let pulled: Vec<Expr> = self
            .components
            .iter()
            .map(|c| c.substitute(&args))
            .collect();
        let components =
            [0, 1, 2].map(|i| linear_combination((0..3).map(|j| (r[i][j], pulled[j].clone()))));
        VectorFieldSpec::new(components, self.normalize)
    }
}

fn linear_combination(terms: impl Iterator<Item = (f64, Expr)>) -> Expr {
    let mut acc: Option<Expr> = None;
    for (c, e) in terms {
        if c == 0.0 {
            continue;
        }
        let term = Expr::binary(BinOp::Mul, Expr::Num(c.abs()), e);
        acc = Some(match acc {
            None if c < 0.0 => Expr::Neg(Box::new(term)),
            None => term,
            Some(a) if c < 0.0 => Expr::binary(BinOp::Sub, a, term),
            Some(a) => Expr::binary(BinOp::Add, a, term),
        });
    }
    acc.unwrap_or(Expr::Num(0.0))
}

fn shift(err: ParseError, by: usize) -> ParseError {
    match err {
        ParseError::Syntax { offset, message } => ParseError::Syntax {
            offset: offset + by,
            message,
        },
        ParseError::UnknownIdentifier { name, offset } => ParseError::UnknownIdentifier {
            name,
            offset: offset + by,
        },
        ParseError::Arity {
            func,
            expected,
            found,
            offset,
        } => ParseError::Arity {
            func,
            expected,
            found,
            offset: offset + by,
        },
        other => other,
    }
}

impl fmt::Display for VectorFieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{}",
            self.components[0], self.components[1], self.components[2]
        )
    }
}
