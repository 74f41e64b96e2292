use super::ast::{BinOp, Constant, Expr, Func};
use super::number::ExprValue;
use crate::error::EvalError;
use crate::scalar::{lit, Real};

impl Expr {
    /// Evaluates the expression with `vars` substituted for `(x, y, z)`.
    ///
    /// Works for any [`ExprValue`]: plain scalars give the value, dual
    /// numbers additionally give first derivatives, Taylor jets second
    /// derivatives along one parameter.
    pub fn eval<T: Real, N: ExprValue<T>>(&self, vars: &[N; 3]) -> Result<N, EvalError> {
        let out = self.eval_inner(vars)?;
        if out.is_finite() {
            Ok(out)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    fn eval_inner<T: Real, N: ExprValue<T>>(&self, vars: &[N; 3]) -> Result<N, EvalError> {
        Ok(match self {
            Expr::Num(v) => N::constant(lit(*v)),
            Expr::Const(Constant::Pi) => N::constant(T::PI()),
            Expr::Const(Constant::E) => N::constant(T::E()),
            Expr::Var(v) => vars[v.index()],
            Expr::Neg(e) => -e.eval_inner(vars)?,
            Expr::Binary(op, l, r) => {
                let a = l.eval_inner(vars)?;
                let b = r.eval_inner(vars)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b.value().is_zero() {
                            return Err(EvalError::DivisionByZero);
                        }
                        a / b
                    }
                    BinOp::Pow => pow(a, b)?,
                }
            }
            Expr::Call(f, a) => call(*f, a.eval_inner(vars)?)?,
            Expr::Atan2(a, b) => atan2(a.eval_inner(vars)?, b.eval_inner(vars)?)?,
        })
    }
}

fn call<T: Real, N: ExprValue<T>>(f: Func, a: N) -> Result<N, EvalError> {
    let v = a.value();
    let one = T::one();
    let two = lit::<T>(2.0);
    Ok(match f {
        Func::Sin => a.chain(v.sin(), v.cos(), -v.sin()),
        Func::Cos => a.chain(v.cos(), -v.sin(), -v.cos()),
        Func::Tan => {
            let t = v.tan();
            let sec2 = one + t * t;
            a.chain(t, sec2, two * t * sec2)
        }
        Func::Atan => {
            let q = one + v * v;
            a.chain(v.atan(), one / q, -two * v / (q * q))
        }
        Func::Exp => {
            let e = v.exp();
            a.chain(e, e, e)
        }
        Func::Log => {
            if v <= T::zero() {
                return Err(EvalError::LogDomain);
            }
            a.chain(v.ln(), one / v, -one / (v * v))
        }
        Func::Sqrt => {
            if v < T::zero() {
                return Err(EvalError::SqrtDomain);
            }
            let s = v.sqrt();
            a.chain(s, one / (two * s), -one / (lit::<T>(4.0) * s * s * s))
        }
        Func::Abs => {
            let sign = if v > T::zero() {
                one
            } else if v < T::zero() {
                -one
            } else {
                T::zero()
            };
            a.chain(v.abs(), sign, T::zero())
        }
    })
}

fn atan2<T: Real, N: ExprValue<T>>(y: N, x: N) -> Result<N, EvalError> {
    let (yv, xv) = (y.value(), x.value());
    let r2 = xv * xv + yv * yv;
    if r2.is_zero() {
        // The value is defined (atan2(0, 0) = 0) but the derivative is not.
        return if y.is_constant() && x.is_constant() {
            Ok(N::constant(yv.atan2(xv)))
        } else {
            Err(EvalError::NonFinite)
        };
    }
    let r4 = r2 * r2;
    let two = lit::<T>(2.0);
    Ok(y.chain2(
        x,
        yv.atan2(xv),
        [xv / r2, -yv / r2],
        [
            -two * xv * yv / r4,
            (yv * yv - xv * xv) / r4,
            two * xv * yv / r4,
        ],
    ))
}

fn pow<T: Real, N: ExprValue<T>>(base: N, exponent: N) -> Result<N, EvalError> {
    let b = base.value();
    let e = exponent.value();
    if exponent.is_constant() {
        if e.fract().is_zero() && e.abs() < lit(2_147_483_647.0) {
            let n = e.to_i32().expect("integral exponent fits i32");
            if b.is_zero() && n < 0 {
                return Err(EvalError::DivisionByZero);
            }
            let nt = lit::<T>(n as f64);
            let df = if n == 0 {
                T::zero()
            } else {
                nt * b.powi(n - 1)
            };
            let d2f = if n == 0 || n == 1 {
                T::zero()
            } else {
                nt * (nt - T::one()) * b.powi(n - 2)
            };
            return Ok(base.chain(b.powi(n), df, d2f));
        }
        if b < T::zero() {
            return Err(EvalError::PowDomain);
        }
        let one = T::one();
        return Ok(base.chain(
            b.powf(e),
            e * b.powf(e - one),
            e * (e - one) * b.powf(e - lit(2.0)),
        ));
    }
    if b <= T::zero() {
        return Err(EvalError::PowDomain);
    }
    let f = b.powf(e);
    let lnb = b.ln();
    let one = T::one();
    let bm1 = b.powf(e - one);
    Ok(base.chain2(
        exponent,
        f,
        [e * bm1, f * lnb],
        [
            e * (e - one) * b.powf(e - lit(2.0)),
            bm1 * (one + e * lnb),
            f * lnb * lnb,
        ],
    ))
}
