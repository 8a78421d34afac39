//! Exact truncated power series over integers, rationals, or
//! [`PiQuadratic`] coefficients.
//!
//! A series carries an optional fractional `prefactor` exponent (e.g. `1/2`
//! for `q^{1/2}`-type expansions) kept separate from the integer-indexed
//! coefficients.  Truncation order is explicit state: binary operations
//! truncate to the smaller order, and no operation ever reads beyond it.
//! All arithmetic is exact; multiplication switches to Karatsuba above a
//! size threshold and is bit-identical to the schoolbook product.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};

use crate::error::{MagError, Result};
use crate::piquad::PiQuadratic;
use crate::precision::{BigReal, Ctx, RealOps};

/// Exact coefficient ring used by [`ExactSeries`].
pub trait Coeff: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Scale by an exact rational; panics when the result leaves the ring.
    fn scale_rat(&self, c: &BigRational) -> Self;
    /// Multiplicative inverse, when one exists in the ring.
    fn inv(&self) -> Option<Self>;
    /// Square root, when one exists in the ring.
    fn csqrt(&self) -> Option<Self>;
    fn to_real(&self, ctx: &Ctx) -> BigReal;
}

impl Coeff for BigInt {
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }
    fn one() -> Self {
        <BigInt as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale_rat(&self, c: &BigRational) -> Self {
        let v = self * c.numer();
        let (q, r) = v.div_rem(c.denom());
        assert!(Zero::is_zero(&r), "non-integral scale of an integer series");
        q
    }
    fn inv(&self) -> Option<Self> {
        if self.abs() == <BigInt as One>::one() {
            Some(self.clone())
        } else {
            None
        }
    }
    fn csqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let r = self.sqrt();
        if &(&r * &r) == self {
            Some(r)
        } else {
            None
        }
    }
    fn to_real(&self, ctx: &Ctx) -> BigReal {
        ctx.from_bigint(self)
    }
}

impl Coeff for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale_rat(&self, c: &BigRational) -> Self {
        self * c
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn csqrt(&self) -> Option<Self> {
        let n = Coeff::csqrt(self.numer())?;
        let d = Coeff::csqrt(self.denom())?;
        Some(BigRational::new(n, d))
    }
    fn to_real(&self, ctx: &Ctx) -> BigReal {
        ctx.from_rational(self)
    }
}

impl Coeff for PiQuadratic {
    fn zero() -> Self {
        PiQuadratic::zero()
    }
    fn one() -> Self {
        PiQuadratic::one()
    }
    fn is_zero(&self) -> bool {
        PiQuadratic::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        PiQuadratic::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        PiQuadratic::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        PiQuadratic::mul(self, o)
    }
    fn neg(&self) -> Self {
        PiQuadratic::neg(self)
    }
    fn scale_rat(&self, c: &BigRational) -> Self {
        self.scale(c)
    }
    fn inv(&self) -> Option<Self> {
        if self.is_rational() && !Zero::is_zero(&self.r) {
            Some(PiQuadratic::from_rational(self.r.recip()))
        } else {
            None
        }
    }
    fn csqrt(&self) -> Option<Self> {
        if self.is_rational() {
            Coeff::csqrt(&self.r).map(PiQuadratic::from_rational)
        } else {
            None
        }
    }
    fn to_real(&self, ctx: &Ctx) -> BigReal {
        PiQuadratic::to_real(self, ctx)
    }
}

/// Truncated power series `x^prefactor * sum_{n=0}^{order} c_n x^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactSeries<T: Coeff> {
    prefactor: BigRational,
    coeffs: Vec<T>,
}

const KARATSUBA_THRESHOLD: usize = 48;

impl<T: Coeff> ExactSeries<T> {
    pub fn from_coeffs(prefactor: BigRational, coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least the constant term");
        ExactSeries { prefactor, coeffs }
    }

    pub fn from_integer_coeffs(coeffs: Vec<T>) -> Self {
        Self::from_coeffs(<BigRational as Zero>::zero(), coeffs)
    }

    pub fn zero(order: usize) -> Self {
        Self::from_integer_coeffs(vec![T::zero(); order + 1])
    }

    pub fn one(order: usize) -> Self {
        let mut c = vec![T::zero(); order + 1];
        c[0] = T::one();
        Self::from_integer_coeffs(c)
    }

    /// `c * x^k` padded to `order`.
    pub fn monomial(c: T, k: usize, order: usize) -> Self {
        assert!(k <= order);
        let mut v = vec![T::zero(); order + 1];
        v[k] = c;
        Self::from_integer_coeffs(v)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn prefactor(&self) -> &BigRational {
        &self.prefactor
    }

    pub fn coeff(&self, n: usize) -> &T {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        Self::from_coeffs(self.prefactor.clone(), self.coeffs[..=n].to_vec())
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> ExactSeries<U> {
        ExactSeries {
            prefactor: self.prefactor.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.prefactor, o.prefactor, "prefactor mismatch in add");
        let n = self.order().min(o.order());
        let c = (0..=n).map(|i| self.coeffs[i].add(&o.coeffs[i])).collect();
        Self::from_coeffs(self.prefactor.clone(), c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Self::from_coeffs(self.prefactor.clone(), self.coeffs.iter().map(T::neg).collect())
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::from_coeffs(self.prefactor.clone(), self.coeffs.iter().map(|x| x.mul(c)).collect())
    }

    pub fn scale_rat(&self, c: &BigRational) -> Self {
        Self::from_coeffs(
            self.prefactor.clone(),
            self.coeffs.iter().map(|x| x.scale_rat(c)).collect(),
        )
    }

    /// Cauchy product truncated to the smaller order; prefactors add.
    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        let full = mul_dispatch(&self.coeffs[..=n.min(self.order())], &o.coeffs[..=n.min(o.order())]);
        let mut c: Vec<T> = full.into_iter().take(n + 1).collect();
        while c.len() < n + 1 {
            c.push(T::zero());
        }
        Self::from_coeffs(&self.prefactor + &o.prefactor, c)
    }

    /// Fold a non-negative integer prefactor exponent into the coefficient
    /// indices, leaving a plain series.  The truncation order is preserved,
    /// so the top `p` coefficients are dropped.
    pub fn absorb_integer_prefactor(&self) -> Result<Self> {
        if Zero::is_zero(&self.prefactor) {
            return Ok(self.clone());
        }
        if !self.prefactor.is_integer() || self.prefactor.is_negative() {
            return Err(MagError::SingularSeries(format!(
                "cannot absorb fractional or negative prefactor {}",
                self.prefactor
            )));
        }
        let p: usize = self
            .prefactor
            .to_integer()
            .try_into()
            .map_err(|_| MagError::SingularSeries("prefactor too large".into()))?;
        let mut c = vec![T::zero(); self.order() + 1];
        for i in p..=self.order() {
            c[i] = self.coeffs[i - p].clone();
        }
        Ok(Self::from_integer_coeffs(c))
    }

    /// Multiply by plain `x^k`, keeping the truncation order.
    pub fn shift_up(&self, k: usize) -> Self {
        let n = self.order();
        let mut c = vec![T::zero(); n + 1];
        for i in k..=n {
            c[i] = self.coeffs[i - k].clone();
        }
        Self::from_coeffs(self.prefactor.clone(), c)
    }

    /// Divide by `x^k`; the low-order coefficients must vanish.
    pub fn shift_down(&self, k: usize) -> Result<Self> {
        for i in 0..k {
            if !self.coeffs[i].is_zero() {
                return Err(MagError::SingularSeries(format!(
                    "division by x^{k} of a series with nonzero coefficient at {i}"
                )));
            }
        }
        Ok(Self::from_coeffs(self.prefactor.clone(), self.coeffs[k..].to_vec()))
    }

    /// Multiplicative inverse; the constant term must be invertible.
    pub fn reciprocal(&self) -> Result<Self> {
        let c0 = self.coeffs[0].inv().ok_or_else(|| {
            MagError::SingularSeries("reciprocal needs an invertible constant term".into())
        })?;
        let n = self.order();
        let mut out = vec![T::zero(); n + 1];
        out[0] = c0.clone();
        for k in 1..=n {
            let mut s = T::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    s = s.add(&self.coeffs[j].mul(&out[k - j]));
                }
            }
            out[k] = s.neg().mul(&c0);
        }
        Ok(Self::from_coeffs(-self.prefactor.clone(), out))
    }

    /// Square root; the constant term must be a square in the ring and the
    /// prefactor exponent must halve exactly.
    pub fn sqrt(&self) -> Result<Self> {
        let r0 = self.coeffs[0].csqrt().ok_or_else(|| {
            MagError::SingularSeries("sqrt needs a square constant term".into())
        })?;
        let inv_2r0 = r0.add(&r0).inv().ok_or_else(|| {
            MagError::SingularSeries("sqrt needs an invertible constant term".into())
        })?;
        let n = self.order();
        let mut out = vec![T::zero(); n + 1];
        out[0] = r0;
        for k in 1..=n {
            let mut s = T::zero();
            for j in 1..k {
                s = s.add(&out[j].mul(&out[k - j]));
            }
            out[k] = self.coeffs[k].sub(&s).mul(&inv_2r0);
        }
        Ok(Self::from_coeffs(&self.prefactor / BigRational::from_integer(2.into()), out))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.order());
        acc.prefactor = <BigRational as Zero>::zero();
        let mut base = self.clone();
        let mut k = e;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `(x d/dx)^k` including the prefactor shift: `c_n -> (n + prefactor)^k c_n`.
    pub fn theta(&self, k: u32) -> Self {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, v)| {
                let factor = (&BigRational::from_integer(n.into()) + &self.prefactor)
                    .pow(k as i32);
                v.scale_rat(&factor)
            })
            .collect();
        Self::from_coeffs(self.prefactor.clone(), c)
    }

    /// Numeric evaluation at `x` by Horner's rule (prefactor ignored).
    pub fn eval_real(&self, x: &BigReal, ctx: &Ctx) -> BigReal {
        let mut acc = ctx.zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &c.to_real(ctx);
        }
        acc
    }
}

fn mul_dispatch<T: Coeff>(a: &[T], b: &[T]) -> Vec<T> {
    if a.len().min(b.len()) < KARATSUBA_THRESHOLD {
        mul_schoolbook(a, b)
    } else {
        mul_karatsuba(a, b)
    }
}

pub(crate) fn mul_schoolbook<T: Coeff>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                out[i + j] = out[i + j].add(&ai.mul(bj));
            }
        }
    }
    out
}

pub(crate) fn mul_karatsuba<T: Coeff>(a: &[T], b: &[T]) -> Vec<T> {
    if a.len().min(b.len()) < KARATSUBA_THRESHOLD {
        return mul_schoolbook(a, b);
    }
    let m = a.len().max(b.len()).div_ceil(2);
    let (a0, a1) = a.split_at(m.min(a.len()));
    let (b0, b1) = b.split_at(m.min(b.len()));
    let z0 = mul_karatsuba(a0, b0);
    let z2 = if a1.is_empty() || b1.is_empty() { Vec::new() } else { mul_karatsuba(a1, b1) };
    let sa = add_slices(a0, a1);
    let sb = add_slices(b0, b1);
    let mut z1 = mul_karatsuba(&sa, &sb);
    for (i, v) in z0.iter().enumerate() {
        z1[i] = z1[i].sub(v);
    }
    for (i, v) in z2.iter().enumerate() {
        z1[i] = z1[i].sub(v);
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, v) in z0.into_iter().enumerate() {
        out[i] = out[i].add(&v);
    }
    for (i, v) in z1.into_iter().enumerate() {
        if i + m < out.len() {
            out[i + m] = out[i + m].add(&v);
        } else {
            debug_assert!(v.is_zero());
        }
    }
    for (i, v) in z2.into_iter().enumerate() {
        out[i + 2 * m] = out[i + 2 * m].add(&v);
    }
    out
}

fn add_slices<T: Coeff>(a: &[T], b: &[T]) -> Vec<T> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x.add(y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => T::zero(),
        })
        .collect()
}

/// `exp` of a series with zero constant term, by the first-order recurrence
/// `E_n = (1/n) sum_{k=1}^{n} k a_k E_{n-k}`.
pub fn exp_series<T: Coeff>(a: &ExactSeries<T>) -> Result<ExactSeries<T>> {
    if !a.coeff(0).is_zero() {
        return Err(MagError::SingularSeries("exp needs a zero constant term".into()));
    }
    let n = a.order();
    let mut e = vec![T::zero(); n + 1];
    e[0] = T::one();
    for m in 1..=n {
        let mut s = T::zero();
        for k in 1..=m {
            if !a.coeff(k).is_zero() {
                let t = a.coeff(k).scale_rat(&BigRational::from_integer(k.into()));
                s = s.add(&t.mul(&e[m - k]));
            }
        }
        e[m] = s.scale_rat(&BigRational::new(1.into(), m.into()));
    }
    Ok(ExactSeries::from_integer_coeffs(e))
}

/// Geometric series `1/(1+x)` to the given order, over any ring.
pub fn geometric_alternating<T: Coeff>(order: usize) -> ExactSeries<T> {
    let c = (0..=order).map(|n| if n % 2 == 0 { T::one() } else { T::one().neg() }).collect();
    ExactSeries::from_integer_coeffs(c)
}

/// The operator `L(f, theta) = (1/f)(theta^3 - 2f(theta^3+theta)f + f^2 theta^3 f^2) 1/(1+f)`
/// applied to the `f`-expansion of the double integral.
///
/// Each literal `f` in the operator acts as multiplication; the factors apply
/// right to left.  The result is trustworthy to a few orders below the input
/// truncation (the final shift by `1/f` consumes one order).
pub fn apply_l(i2_series: &ExactSeries<PiQuadratic>) -> Result<ExactSeries<PiQuadratic>> {
    let n = i2_series.order();
    if n < 8 {
        return Err(MagError::InsufficientOrder { need: 8, have: n });
    }
    assert!(Zero::is_zero(i2_series.prefactor()), "apply_l expects an integer-exponent series");
    let g = i2_series.mul(&geometric_alternating(n));
    let t1 = g.theta(3);
    let fg = g.shift_up(1);
    let t2 = fg.theta(3).add(&fg.theta(1)).shift_up(1).scale_rat(&BigRational::from_integer(2.into()));
    let f2g = g.shift_up(2);
    let t3 = f2g.theta(3).shift_up(2);
    t1.sub(&t2).add(&t3).shift_down(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(v: &[i64]) -> ExactSeries<BigRational> {
        ExactSeries::from_integer_coeffs(
            v.iter().map(|&x| BigRational::from_integer(x.into())).collect(),
        )
    }

    #[test]
    fn product_of_binomials() {
        // (1+x)(1-x) = 1 - x^2
        let p = rs(&[1, 1, 0, 0]).mul(&rs(&[1, -1, 0, 0]));
        assert_eq!(p, rs(&[1, 0, -1, 0]));
    }

    #[test]
    fn mismatched_orders_truncate_to_minimum() {
        let a = rs(&[1, 2, 3, 4, 5]);
        let b = rs(&[1, 1]);
        assert_eq!(a.mul(&b).order(), 1);
        assert_eq!(a.add(&b).order(), 1);
    }

    #[test]
    fn reciprocal_geometric() {
        let r = rs(&[1, -1, 0, 0, 0, 0]).reciprocal().unwrap();
        assert_eq!(r, rs(&[1, 1, 1, 1, 1, 1]));
        assert!(rs(&[0, 1]).reciprocal().is_err());
    }

    #[test]
    fn sqrt_binomial() {
        // sqrt(1-x) = 1 - x/2 - x^2/8 - x^3/16 - ...
        let s = rs(&[1, -1, 0, 0]).sqrt().unwrap();
        assert_eq!(s.coeff(1), &BigRational::new((-1).into(), 2.into()));
        assert_eq!(s.coeff(2), &BigRational::new((-1).into(), 8.into()));
        assert_eq!(s.coeff(3), &BigRational::new((-1).into(), 16.into()));
        let sq = s.mul(&s);
        assert_eq!(sq, rs(&[1, -1, 0, 0]));
    }

    #[test]
    fn theta_on_monomials() {
        for n in 0..=5usize {
            let m: ExactSeries<BigRational> =
                ExactSeries::monomial(<BigRational as One>::one(), n, 5);
            let t = m.theta(1);
            assert_eq!(t.coeff(n), &BigRational::from_integer(n.into()));
        }
    }

    #[test]
    fn theta_with_half_prefactor() {
        // theta^3 on q^{1/2} * 1 gives (1/2)^3 q^{1/2}
        let s: ExactSeries<BigRational> = ExactSeries::from_coeffs(
            BigRational::new(1.into(), 2.into()),
            vec![<BigRational as One>::one(), <BigRational as Zero>::zero()],
        );
        let t = s.theta(3);
        assert_eq!(t.coeff(0), &BigRational::new(1.into(), 8.into()));
    }

    #[test]
    fn theta_is_a_derivation() {
        let a = rs(&[3, 1, 4, 1, 5, 9]);
        let b = rs(&[2, 7, 1, 8, 2, 8]);
        let lhs = a.mul(&b).theta(1);
        let rhs = a.theta(1).mul(&b).add(&a.mul(&b.theta(1)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn apply_l_zero_and_order_guard() {
        let z: ExactSeries<PiQuadratic> = ExactSeries::zero(12);
        assert!(apply_l(&z).unwrap().is_zero());
        let small: ExactSeries<PiQuadratic> = ExactSeries::zero(5);
        assert!(matches!(apply_l(&small), Err(MagError::InsufficientOrder { .. })));
    }

    #[test]
    fn karatsuba_matches_schoolbook_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for case in 0..100 {
            let n = rng.gen_range(1..=512usize);
            let m = rng.gen_range(1..=512usize);
            let a: Vec<BigInt> =
                (0..n).map(|_| BigInt::from(rng.gen_range(-1_000_000i64..1_000_000))).collect();
            let b: Vec<BigInt> =
                (0..m).map(|_| BigInt::from(rng.gen_range(-1_000_000i64..1_000_000))).collect();
            let s = mul_schoolbook(&a, &b);
            let k = mul_karatsuba(&a, &b);
            assert_eq!(s, k, "mismatch in case {case} with sizes {n}x{m}");
        }
    }

    #[test]
    fn shift_round_trip() {
        let a = rs(&[0, 0, 5, 7]);
        let d = a.shift_down(2).unwrap();
        assert_eq!(d.coeff(0), &BigRational::from_integer(5.into()));
        assert!(rs(&[1, 0]).shift_down(1).is_err());
    }
}
