//! Closed-form scalar expressions in `x`, `y`, `z` and vector fields built
//! from them, with exact first derivatives by forward-mode differentiation.

mod ast;
mod eval;
mod field;
mod number;
mod parser;

pub use ast::{BinOp, Constant, Expr, Func, Var};
pub use field::{Jet, VectorFieldSpec};
pub use number::{Dual3, ExprValue, Taylor2};
pub use parser::{parse_expression, split_top_level};
