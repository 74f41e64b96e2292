//! Number types expressions can be evaluated over: plain scalars,
//! first-order dual numbers in three variables, and second-order
//! univariate Taylor jets.

use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::Serialize;

use crate::scalar::{lit, Real};

/// Arithmetic an expression evaluator needs. Nonlinear functions are
/// lifted through [`ExprValue::chain`] and [`ExprValue::chain2`], which take
/// the function's value and derivatives at the current value.
pub trait ExprValue<T: Real>:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(c: T) -> Self;
    fn value(&self) -> T;
    /// True when every derivative part is zero.
    fn is_constant(&self) -> bool;
    /// `f(self)` given `f`, `f'`, `f''` at `self.value()`.
    fn chain(self, f: T, df: T, d2f: T) -> Self;
    /// `f(self, other)` given the value, gradient `[fa, fb]` and Hessian
    /// `[faa, fab, fbb]` at the current values.
    fn chain2(self, other: Self, f: T, grad: [T; 2], hess: [T; 3]) -> Self;
    fn is_finite(&self) -> bool;
}

impl<T: Real> ExprValue<T> for T {
    fn constant(c: T) -> Self {
        c
    }
    fn value(&self) -> T {
        *self
    }
    fn is_constant(&self) -> bool {
        true
    }
    fn chain(self, f: T, _df: T, _d2f: T) -> Self {
        f
    }
    fn chain2(self, _other: Self, f: T, _grad: [T; 2], _hess: [T; 3]) -> Self {
        f
    }
    fn is_finite(&self) -> bool {
        num_traits::Float::is_finite(*self)
    }
}

/// Value together with its gradient with respect to `(x, y, z)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Dual3<T> {
    pub value: T,
    pub partials: [T; 3],
}

impl<T: Real> Dual3<T> {
    pub fn constant(value: T) -> Self {
        Dual3 {
            value,
            partials: [T::zero(); 3],
        }
    }

    /// The coordinate `axis` seeded with unit derivative.
    pub fn variable(value: T, axis: usize) -> Self {
        let mut partials = [T::zero(); 3];
        partials[axis] = T::one();
        Dual3 { value, partials }
    }

    /// Seeds all three coordinates of a point.
    pub fn seed(p: [T; 3]) -> [Self; 3] {
        [0, 1, 2].map(|i| Self::variable(p[i], i))
    }
}

impl<T: Real> Add for Dual3<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Dual3 {
            value: self.value + rhs.value,
            partials: [0, 1, 2].map(|i| self.partials[i] + rhs.partials[i]),
        }
    }
}

impl<T: Real> Sub for Dual3<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Dual3 {
            value: self.value - rhs.value,
            partials: [0, 1, 2].map(|i| self.partials[i] - rhs.partials[i]),
        }
    }
}

impl<T: Real> Mul for Dual3<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Self) -> Self {
        Dual3 {
            value: self.value * rhs.value,
            partials: [0, 1, 2]
                .map(|i| self.partials[i] * rhs.value + self.value * rhs.partials[i]),
        }
    }
}

impl<T: Real> Div for Dual3<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let inv = T::one() / rhs.value;
        let q = self.value * inv;
        Dual3 {
            value: q,
            partials: [0, 1, 2].map(|i| (self.partials[i] - q * rhs.partials[i]) * inv),
        }
    }
}

impl<T: Real> Neg for Dual3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual3 {
            value: -self.value,
            partials: self.partials.map(|d| -d),
        }
    }
}

impl<T: Real> ExprValue<T> for Dual3<T> {
    fn constant(c: T) -> Self {
        Dual3::constant(c)
    }
    fn value(&self) -> T {
        self.value
    }
    fn is_constant(&self) -> bool {
        self.partials.iter().all(|d| d.is_zero())
    }
    fn chain(self, f: T, df: T, _d2f: T) -> Self {
        Dual3 {
            value: f,
            partials: self.partials.map(|d| df * d),
        }
    }
    fn chain2(self, other: Self, f: T, grad: [T; 2], _hess: [T; 3]) -> Self {
        Dual3 {
            value: f,
            partials: [0, 1, 2].map(|i| grad[0] * self.partials[i] + grad[1] * other.partials[i]),
        }
    }
    fn is_finite(&self) -> bool {
        self.value.is_finite() && self.partials.iter().all(|d| d.is_finite())
    }
}

/// Univariate second-order jet: value, first and second derivative along a
/// single parameter.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Taylor2<T> {
    pub value: T,
    pub d1: T,
    pub d2: T,
}

impl<T: Real> Taylor2<T> {
    pub fn constant(value: T) -> Self {
        Taylor2 {
            value,
            d1: T::zero(),
            d2: T::zero(),
        }
    }

    pub fn variable(value: T) -> Self {
        Taylor2 {
            value,
            d1: T::one(),
            d2: T::zero(),
        }
    }
}

impl<T: Real> Add for Taylor2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Taylor2 {
            value: self.value + rhs.value,
            d1: self.d1 + rhs.d1,
            d2: self.d2 + rhs.d2,
        }
    }
}

impl<T: Real> Sub for Taylor2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Taylor2 {
            value: self.value - rhs.value,
            d1: self.d1 - rhs.d1,
            d2: self.d2 - rhs.d2,
        }
    }
}

impl<T: Real> Mul for Taylor2<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let two = lit::<T>(2.0);
        Taylor2 {
            value: self.value * rhs.value,
            d1: self.d1 * rhs.value + self.value * rhs.d1,
            d2: self.d2 * rhs.value + two * self.d1 * rhs.d1 + self.value * rhs.d2,
        }
    }
}

impl<T: Real> Div for Taylor2<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let b = rhs.value;
        let recip = rhs.chain(
            T::one() / b,
            -T::one() / (b * b),
            lit::<T>(2.0) / (b * b * b),
        );
        self * recip
    }
}

impl<T: Real> Neg for Taylor2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Taylor2 {
            value: -self.value,
            d1: -self.d1,
            d2: -self.d2,
        }
    }
}

impl<T: Real> ExprValue<T> for Taylor2<T> {
    fn constant(c: T) -> Self {
        Taylor2::constant(c)
    }
    fn value(&self) -> T {
        self.value
    }
    fn is_constant(&self) -> bool {
        self.d1.is_zero() && self.d2.is_zero()
    }
    fn chain(self, f: T, df: T, d2f: T) -> Self {
        Taylor2 {
            value: f,
            d1: df * self.d1,
            d2: df * self.d2 + d2f * self.d1 * self.d1,
        }
    }
    fn chain2(self, other: Self, f: T, grad: [T; 2], hess: [T; 3]) -> Self {
        let (a1, b1) = (self.d1, other.d1);
        let two = lit::<T>(2.0);
        Taylor2 {
            value: f,
            d1: grad[0] * a1 + grad[1] * b1,
            d2: grad[0] * self.d2
                + grad[1] * other.d2
                + hess[0] * a1 * a1
                + two * hess[1] * a1 * b1
                + hess[2] * b1 * b1,
        }
    }
    fn is_finite(&self) -> bool {
        self.value.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}
