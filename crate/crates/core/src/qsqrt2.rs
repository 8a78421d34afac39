//! Exact arithmetic in the quadratic field `Q[sqrt 2]`.
//!
//! The CM table of the modular form lives in this field: the eta-quotient
//! values `psi_k`, several of the `f_k`, and all inhomogeneity values
//! `R(f_k)` are elements of `Q[sqrt 2]`, so their identities can be checked
//! without any rounding.

use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::precision::{BigReal, Ctx, RealOps};

/// `a + b*sqrt(2)` with exact rational `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSqrt2 {
    pub a: BigRational,
    pub b: BigRational,
}

impl QSqrt2 {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QSqrt2 { a, b }
    }

    pub fn from_int(v: i64) -> Self {
        QSqrt2 { a: BigRational::from_integer(v.into()), b: BigRational::zero() }
    }

    pub fn from_ints(a_num: i64, a_den: i64, b_num: i64, b_den: i64) -> Self {
        QSqrt2 {
            a: BigRational::new(a_num.into(), a_den.into()),
            b: BigRational::new(b_num.into(), b_den.into()),
        }
    }

    /// `sqrt(2) - 1`, the fixed point of the involution.
    pub fn sqrt2_minus_one() -> Self {
        QSqrt2 { a: -BigRational::one(), b: BigRational::one() }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        QSqrt2 { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn sub(&self, o: &Self) -> Self {
        QSqrt2 { a: &self.a - &o.a, b: &self.b - &o.b }
    }

    pub fn neg(&self) -> Self {
        QSqrt2 { a: -self.a.clone(), b: -self.b.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        QSqrt2 {
            a: &self.a * &o.a + BigRational::from_integer(2.into()) * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        QSqrt2 { a: &self.a * c, b: &self.b * c }
    }

    /// Field inverse: `(a - b sqrt2)/(a^2 - 2 b^2)`.
    pub fn inv(&self) -> Self {
        let norm = &self.a * &self.a - BigRational::from_integer(2.into()) * &self.b * &self.b;
        assert!(!norm.is_zero(), "inverse of zero in Q[sqrt2]");
        QSqrt2 { a: &self.a / &norm, b: -(&self.b / &norm) }
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// Exact sign of `a + b*sqrt2`.
    pub fn is_positive(&self) -> bool {
        let (pa, pb) = (self.a.is_positive(), self.b.is_positive());
        if self.a.is_zero() {
            return pb;
        }
        if self.b.is_zero() {
            return pa;
        }
        match (pa, pb) {
            (true, true) => true,
            (false, false) => false,
            // mixed signs: compare a^2 with 2 b^2
            (true, false) => &self.a * &self.a > BigRational::from_integer(2.into()) * &self.b * &self.b,
            (false, true) => &self.a * &self.a < BigRational::from_integer(2.into()) * &self.b * &self.b,
        }
    }

    pub fn to_real(&self, ctx: &Ctx) -> BigReal {
        &ctx.from_rational(&self.a) + &(&ctx.from_rational(&self.b) * &ctx.sqrt2())
    }
}

impl std::fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}*sqrt2", self.b)
        } else if self.b.is_negative() {
            write!(f, "{} - {}*sqrt2", self.a, -self.b.clone())
        } else {
            write!(f, "{} + {}*sqrt2", self.a, self.b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_spot() {
        let x = QSqrt2::from_ints(3, 7, -2, 5);
        let i = x.inv();
        assert_eq!(x.mul(&i), QSqrt2::one());
        let y = QSqrt2::sqrt2_minus_one();
        // (sqrt2 - 1)(sqrt2 + 1) = 1
        let z = QSqrt2::new(BigRational::one(), BigRational::one());
        assert_eq!(y.mul(&z), QSqrt2::one());
    }

    #[test]
    fn exact_sign() {
        // 99 sqrt2 - 140 is positive but tiny
        let v = QSqrt2::from_ints(-140, 1, 99, 1);
        assert!(v.is_positive());
        let w = QSqrt2::from_ints(-141, 1, 99, 1);
        assert!(!w.is_positive());
        assert!(!QSqrt2::zero().is_positive());
    }
}
