//! Angle functions `θ` of the rank-1 normal form, available with their first
//! two derivatives.

use crate::error::Error;
use crate::expr::{Expr, Taylor2, Var};
use crate::scalar::{lit, Real};

use super::ThetaProfile;

/// A smooth angle function `θ: R → R` with `θ`, `θ'`, `θ''` on demand.
pub trait ThetaFunction<T: Real> {
    fn jet(&self, s: T) -> Result<(T, T, T), Error>;
}

/// `θ` given as an expression in `z`; derivatives by second-order Taylor
/// arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedFormTheta {
    pub expr: Expr,
}

impl ClosedFormTheta {
    pub fn new(expr: Expr) -> Result<Self, Error> {
        if expr.mentions(Var::X) || expr.mentions(Var::Y) {
            return Err(Error::InvalidArgument(format!(
                "theta must depend on z only, got `{expr}`"
            )));
        }
        Ok(ClosedFormTheta { expr })
    }
}

impl<T: Real> ThetaFunction<T> for ClosedFormTheta {
    fn jet(&self, s: T) -> Result<(T, T, T), Error> {
        let zero = Taylor2::constant(T::zero());
        let t = self.expr.eval(&[zero, zero, Taylor2::variable(s)])?;
        Ok((t.value, t.d1, t.d2))
    }
}

/// Natural cubic spline through uniformly sampled `θ` values.
#[derive(Clone, Debug, PartialEq)]
pub struct SplineTheta<T> {
    z0: T,
    h: T,
    values: Vec<T>,
    /// Second derivatives at the knots; zero at both ends.
    moments: Vec<T>,
}

impl<T: Real> SplineTheta<T> {
    /// Spline through uniformly spaced `(z, θ)` samples.
    pub fn new(z: &[T], values: &[T]) -> Result<Self, Error> {
        let n = z.len();
        if n < 3 || values.len() != n {
            return Err(Error::InvalidArgument(
                "spline needs at least three (z, theta) samples".into(),
            ));
        }
        let h = (z[n - 1] - z[0]) / lit((n - 1) as f64);
        if !(h > T::zero()) {
            return Err(Error::InvalidArgument("spline knots must increase".into()));
        }
        // Natural spline on a uniform grid:
        // M[i-1] + 4 M[i] + M[i+1] = 6 (y[i-1] - 2 y[i] + y[i+1]) / h², M[0] = M[n-1] = 0.
        let m = n - 2;
        let six_h2 = lit::<T>(6.0) / (h * h);
        let rhs: Vec<T> = (1..n - 1)
            .map(|i| six_h2 * (values[i - 1] - lit::<T>(2.0) * values[i] + values[i + 1]))
            .collect();
        // Thomas algorithm, sub/super diagonals 1, diagonal 4.
        let four = lit::<T>(4.0);
        let mut c = vec![T::zero(); m];
        let mut d = vec![T::zero(); m];
        for i in 0..m {
            let denom = if i == 0 { four } else { four - c[i - 1] };
            c[i] = T::one() / denom;
            d[i] = if i == 0 {
                rhs[0] / denom
            } else {
                (rhs[i] - d[i - 1]) / denom
            };
        }
        let mut inner = vec![T::zero(); m];
        for i in (0..m).rev() {
            inner[i] = if i + 1 < m {
                d[i] - c[i] * inner[i + 1]
            } else {
                d[i]
            };
        }
        let mut moments = vec![T::zero(); n];
        moments[1..n - 1].copy_from_slice(&inner);
        Ok(SplineTheta {
            z0: z[0],
            h,
            values: values.to_vec(),
            moments,
        })
    }

    pub fn from_profile(profile: &ThetaProfile<T>) -> Result<Self, Error> {
        Self::new(&profile.z, &profile.theta)
    }

    pub fn window(&self) -> (T, T) {
        (
            self.z0,
            self.z0 + self.h * lit((self.values.len() - 1) as f64),
        )
    }
}

impl<T: Real> ThetaFunction<T> for SplineTheta<T> {
    fn jet(&self, s: T) -> Result<(T, T, T), Error> {
        let (lo, hi) = self.window();
        let slack = lit::<T>(1e-12) * (T::one() + hi.abs().max(lo.abs()));
        if !(s >= lo - slack && s <= hi + slack) {
            return Err(Error::OutsideWindow(s.to_f64().unwrap_or(f64::NAN)));
        }
        let last = self.values.len() - 2;
        let k = ((s - self.z0) / self.h)
            .floor()
            .to_usize()
            .unwrap_or(0)
            .min(last);
        let h = self.h;
        let a = self.z0 + h * lit(k as f64);
        let (l, r) = (s - a, h - (s - a));
        let (m0, m1) = (self.moments[k], self.moments[k + 1]);
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let six = lit::<T>(6.0);
        let two = lit::<T>(2.0);
        let c0 = y0 / h - m0 * h / six;
        let c1 = y1 / h - m1 * h / six;
        let value = m0 * r * r * r / (six * h) + m1 * l * l * l / (six * h) + c0 * r + c1 * l;
        let d1 = -m0 * r * r / (two * h) + m1 * l * l / (two * h) - c0 + c1;
        let d2 = (m0 * r + m1 * l) / h;
        Ok((value, d1, d2))
    }
}
