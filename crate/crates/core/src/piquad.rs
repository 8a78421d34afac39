//! Exact values of the form `r + s*pi^2` with rational `r`, `s`.
//!
//! This small ring is closed under addition and rational scaling; products
//! are defined only when at least one operand is purely rational, which is
//! all the series machinery ever needs.  Keeping the `pi^2` part symbolic
//! lets identities that must cancel it be checked exactly.

use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::precision::{BigReal, Ctx, RealOps};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiQuadratic {
    /// Rational part.
    pub r: BigRational,
    /// Coefficient of `pi^2`.
    pub s: BigRational,
}

impl serde::Serialize for PiQuadratic {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("PiQuadratic", 2)?;
        st.serialize_field("r", &self.r.to_string())?;
        st.serialize_field("s", &self.s.to_string())?;
        st.end()
    }
}

impl PiQuadratic {
    pub fn new(r: BigRational, s: BigRational) -> Self {
        PiQuadratic { r, s }
    }

    pub fn from_rational(r: BigRational) -> Self {
        PiQuadratic { r, s: BigRational::zero() }
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(BigRational::from_integer(v.into()))
    }

    /// `pi^2` times a rational.
    pub fn pi2(s: BigRational) -> Self {
        PiQuadratic { r: BigRational::zero(), s }
    }

    pub fn is_rational(&self) -> bool {
        self.s.is_zero()
    }

    pub fn zero() -> Self {
        PiQuadratic { r: BigRational::zero(), s: BigRational::zero() }
    }

    pub fn one() -> Self {
        PiQuadratic { r: BigRational::one(), s: BigRational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.s.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        PiQuadratic { r: &self.r + &o.r, s: &self.s + &o.s }
    }

    pub fn sub(&self, o: &Self) -> Self {
        PiQuadratic { r: &self.r - &o.r, s: &self.s - &o.s }
    }

    pub fn neg(&self) -> Self {
        PiQuadratic { r: -self.r.clone(), s: -self.s.clone() }
    }

    /// Product; panics if both operands carry a `pi^2` part, since `pi^4`
    /// leaves the ring.
    pub fn mul(&self, o: &Self) -> Self {
        if !self.s.is_zero() && !o.s.is_zero() {
            panic!("PiQuadratic product would produce a pi^4 term");
        }
        if o.s.is_zero() {
            PiQuadratic { r: &self.r * &o.r, s: &self.s * &o.r }
        } else {
            PiQuadratic { r: &self.r * &o.r, s: &self.r * &o.s }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        PiQuadratic { r: &self.r * c, s: &self.s * c }
    }

    pub fn to_real(&self, ctx: &Ctx) -> BigReal {
        let pi2 = ctx.pi().square();
        &ctx.from_rational(&self.r) + &(&ctx.from_rational(&self.s) * &pi2)
    }
}

impl std::fmt::Display for PiQuadratic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.s.is_zero() {
            write!(f, "{}", self.r)
        } else if self.r.is_zero() {
            write!(f, "{}*pi^2", self.s)
        } else if self.s.is_negative() {
            write!(f, "{} - {}*pi^2", self.r, -self.s.clone())
        } else {
            write!(f, "{} + {}*pi^2", self.r, self.s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::PrecisionContext;

    #[test]
    fn ring_operations() {
        let a = PiQuadratic::new(BigRational::new(1.into(), 2.into()), BigRational::one());
        let b = PiQuadratic::from_int(3);
        let p = a.mul(&b);
        assert_eq!(p.r, BigRational::new(3.into(), 2.into()));
        assert_eq!(p.s, BigRational::from_integer(3.into()));
        assert_eq!(a.add(&a.neg()), PiQuadratic::zero());
    }

    #[test]
    #[should_panic(expected = "pi^4")]
    fn pi4_is_rejected() {
        let a = PiQuadratic::pi2(BigRational::one());
        let _ = a.mul(&a);
    }

    #[test]
    fn numeric_value() {
        let ctx = PrecisionContext::new(30).unwrap();
        let v = PiQuadratic::new(BigRational::from_integer(1.into()), BigRational::one());
        let x = v.to_real(&ctx);
        let expect = &ctx.one() + &ctx.pi().square();
        assert!((&x - &expect).abs() < ctx.pow10(-28));
    }

    #[test]
    fn display_forms() {
        let v = PiQuadratic::new(
            BigRational::from_integer((-1).into()),
            BigRational::new(1.into(), 4.into()),
        );
        assert_eq!(v.to_string(), "-1 + 1/4*pi^2");
        assert_eq!(PiQuadratic::pi2(BigRational::new(1.into(), 2.into())).to_string(), "1/2*pi^2");
    }
}
