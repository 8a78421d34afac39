//! Arbitrary-precision arithmetic context, AGM, elementary constants, and
//! gamma values.
//!
//! Every numeric quantity in this crate is a [`BigReal`] (or a [`BigComplex`]
//! pair of them) tied to a [`PrecisionContext`].  A context requests `digits`
//! decimal digits and computes internally with `digits + guard` working
//! digits; results are trustworthy to the requested digits provided the
//! algorithm's own error bound allows it.
//!
//! Two independent routes to gamma values are kept deliberately separate:
//! [`gamma_quarter`] goes through the AGM, while [`gamma_rational`] uses a
//! shifted Stirling series with an enveloping remainder bound.  Tests that
//! relate the two are therefore not circular.

use std::sync::{Arc, Mutex, OnceLock};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::{MagError, Result};

const RM: RoundingMode = RoundingMode::ToEven;
const LOG2_10: f64 = 3.321928094887362;

/// Requested precision plus guard digits; immutable once created.
pub struct PrecisionContext {
    digits: u32,
    guard: u32,
    bits: usize,
    cc: Mutex<Consts>,
    pi: OnceLock<BigFloat>,
}

/// Shared handle to a precision context.
pub type Ctx = Arc<PrecisionContext>;

impl PrecisionContext {
    /// Context with the default 20 guard digits.  `digits` must be at least 10.
    pub fn new(digits: u32) -> Result<Ctx> {
        Self::with_guard(digits, 20)
    }

    pub fn with_guard(digits: u32, guard: u32) -> Result<Ctx> {
        if digits < 10 {
            return Err(MagError::Domain(format!(
                "precision must be at least 10 digits, got {digits}"
            )));
        }
        let bits = (((digits + guard) as f64) * LOG2_10).ceil() as usize + 32;
        let cc = Consts::new().map_err(|e| MagError::Domain(format!("constants cache: {e:?}")))?;
        Ok(Arc::new(PrecisionContext {
            digits,
            guard,
            bits,
            cc: Mutex::new(cc),
            pi: OnceLock::new(),
        }))
    }

    /// A context identical to this one but with the guard doubled, for
    /// cancellation-detection reruns of multi-stage pipelines.
    pub fn doubled_guard(self: &Ctx) -> Ctx {
        PrecisionContext::with_guard(self.digits, 2 * self.guard.max(10)).unwrap()
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn guard(&self) -> u32 {
        self.guard
    }

    /// Working precision in bits.
    pub fn work_bits(&self) -> usize {
        self.bits
    }

    fn pi_raw(&self) -> BigFloat {
        self.pi
            .get_or_init(|| self.cc.lock().unwrap().pi(self.bits, RM))
            .clone()
    }
}

impl std::fmt::Debug for PrecisionContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PrecisionContext({} digits + {} guard)", self.digits, self.guard)
    }
}

/// An arbitrary-precision real value carrying its context.
#[derive(Clone)]
pub struct BigReal {
    x: BigFloat,
    ctx: Ctx,
}

/// Context-aware constructors.
pub trait RealOps {
    fn zero(&self) -> BigReal;
    fn one(&self) -> BigReal;
    fn from_i64(&self, v: i64) -> BigReal;
    fn from_f64(&self, v: f64) -> BigReal;
    fn from_dec_str(&self, s: &str) -> BigReal;
    fn from_bigint(&self, v: &BigInt) -> BigReal;
    fn from_rational(&self, v: &BigRational) -> BigReal;
    fn pi(&self) -> BigReal;
    fn sqrt2(&self) -> BigReal;
    /// 10^k at working precision.
    fn pow10(&self, k: i64) -> BigReal;
}

impl RealOps for Ctx {
    fn zero(&self) -> BigReal {
        self.from_i64(0)
    }

    fn one(&self) -> BigReal {
        self.from_i64(1)
    }

    fn from_i64(&self, v: i64) -> BigReal {
        BigReal { x: BigFloat::from_i64(v, self.bits), ctx: self.clone() }
    }

    fn from_f64(&self, v: f64) -> BigReal {
        BigReal { x: BigFloat::from_f64(v, self.bits), ctx: self.clone() }
    }

    fn from_dec_str(&self, s: &str) -> BigReal {
        let mut cc = self.cc.lock().unwrap();
        let x = BigFloat::parse(s, astro_float::Radix::Dec, self.bits, RM, &mut cc);
        BigReal { x, ctx: self.clone() }
    }

    fn from_bigint(&self, v: &BigInt) -> BigReal {
        let (sign, words) = v.to_u64_digits();
        if words.is_empty() {
            return self.zero();
        }
        let s = match sign {
            num::bigint::Sign::Minus => Sign::Neg,
            _ => Sign::Pos,
        };
        let e = (64 * words.len()) as astro_float::Exponent;
        let x = BigFloat::from_words(&words, s, e);
        // Round to working precision.
        let one = BigFloat::from_i64(1, self.bits);
        BigReal { x: x.mul(&one, self.bits.max(64 * words.len()), RM), ctx: self.clone() }
    }

    fn from_rational(&self, v: &BigRational) -> BigReal {
        let n = self.from_bigint(v.numer());
        let d = self.from_bigint(v.denom());
        &n / &d
    }

    fn pi(&self) -> BigReal {
        BigReal { x: self.pi_raw(), ctx: self.clone() }
    }

    fn sqrt2(&self) -> BigReal {
        self.from_i64(2).sqrt()
    }

    fn pow10(&self, k: i64) -> BigReal {
        let ten = BigFloat::from_i64(10, self.bits);
        let p = ten.powi(k.unsigned_abs() as usize, self.bits, RM);
        let x = if k < 0 { BigFloat::from_i64(1, self.bits).div(&p, self.bits, RM) } else { p };
        BigReal { x, ctx: self.clone() }
    }
}

macro_rules! unary_cc {
    ($name:ident) => {
        pub fn $name(&self) -> BigReal {
            let p = self.ctx.bits;
            let mut cc = self.ctx.cc.lock().unwrap();
            self.wrap(self.x.$name(p, RM, &mut cc))
        }
    };
}

impl BigReal {
    fn wrap(&self, x: BigFloat) -> BigReal {
        debug_assert!(!x.is_nan(), "NaN produced in BigReal operation");
        BigReal { x, ctx: self.ctx.clone() }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.x.is_negative() && !self.x.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.x.is_positive() && !self.x.is_zero()
    }

    pub fn abs(&self) -> BigReal {
        self.wrap(self.x.abs())
    }

    pub fn floor(&self) -> BigReal {
        self.wrap(self.x.floor())
    }

    pub fn sqrt(&self) -> BigReal {
        self.wrap(self.x.sqrt(self.ctx.bits, RM))
    }

    pub fn recip(&self) -> BigReal {
        self.wrap(self.x.reciprocal(self.ctx.bits, RM))
    }

    pub fn square(&self) -> BigReal {
        self * self
    }

    pub fn powi(&self, n: u64) -> BigReal {
        self.wrap(self.x.powi(n as usize, self.ctx.bits, RM))
    }

    pub fn mul_i64(&self, v: i64) -> BigReal {
        let f = BigFloat::from_i64(v, self.ctx.bits);
        self.wrap(self.x.mul(&f, self.ctx.bits, RM))
    }

    pub fn div_i64(&self, v: i64) -> BigReal {
        let f = BigFloat::from_i64(v, self.ctx.bits);
        self.wrap(self.x.div(&f, self.ctx.bits, RM))
    }

    unary_cc!(exp);
    unary_cc!(ln);
    unary_cc!(sin);
    unary_cc!(cos);
    unary_cc!(atan);
    unary_cc!(sinh);
    unary_cc!(cosh);
    unary_cc!(tanh);

    /// Base-10 logarithm of |self|, as f64.  Cheap scale estimate.
    pub fn log10_abs_f64(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let p = 64;
        let mut cc = self.ctx.cc.lock().unwrap();
        let l = self.x.abs().log10(p, RM, &mut cc);
        bigfloat_to_f64(&l)
    }

    pub fn to_f64(&self) -> f64 {
        bigfloat_to_f64(&self.x)
    }

    /// Exact rational value of the underlying binary float.
    pub fn to_rational_exact(&self) -> BigRational {
        if self.x.is_zero() {
            return BigRational::zero();
        }
        let (words, n, sign, e, _) = self.x.as_raw_parts().expect("finite value");
        let mut m = BigInt::new(num::bigint::Sign::Plus, words_to_u32(words));
        if sign == Sign::Neg {
            m = -m;
        }
        let shift = e as i64 - (n as i64);
        let num = if shift >= 0 { m << shift as usize } else { m };
        let den = if shift >= 0 { BigInt::one() } else { BigInt::one() << (-shift) as usize };
        BigRational::new(num, den)
    }

    /// Decimal string with `digits` significant digits, scientific form.
    pub fn to_decimal(&self, digits: u32) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let r = self.to_rational_exact();
        rational_to_decimal(&r, digits)
    }

    /// Compare to another value; both must share a context.
    pub fn cmp_val(&self, other: &BigReal) -> std::cmp::Ordering {
        match self.x.cmp(&other.x) {
            Some(v) if v < 0 => std::cmp::Ordering::Less,
            Some(v) if v > 0 => std::cmp::Ordering::Greater,
            _ => std::cmp::Ordering::Equal,
        }
    }
}

fn words_to_u32(words: &[u64]) -> Vec<u32> {
    let mut out = Vec::with_capacity(words.len() * 2);
    for w in words {
        out.push((*w & 0xffff_ffff) as u32);
        out.push((*w >> 32) as u32);
    }
    out
}

fn bigfloat_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let (words, n, sign, e, _) = match x.as_raw_parts() {
        Some(p) => p,
        None => return f64::NAN,
    };
    // value = 0.m * 2^e with m occupying n bits, MSB first in the last word
    let top = words.last().copied().unwrap_or(0);
    let _ = n;
    let frac = top as f64 / 2f64.powi(64);
    let v = frac * 2f64.powi(e);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

/// `digits`-significant-digit scientific decimal of an exact rational.
pub fn rational_to_decimal(r: &BigRational, digits: u32) -> String {
    if r.is_zero() {
        return "0".into();
    }
    let neg = r.is_negative();
    let a = r.abs();
    // decimal exponent: number of digits of floor part, or leading zeros
    let (num, den) = (a.numer().clone(), a.denom().clone());
    let mut e10: i64 = (num.bits() as i64 - den.bits() as i64) as i64 * 30103 / 100000;
    // refine so that 10^e10 <= a < 10^(e10+1)
    loop {
        let p = pow10_int(e10);
        // a >= 10^e10 <=> num*den(p) >= p.num*den
        if ge_rat(&num, &den, &p) {
            let p1 = pow10_int(e10 + 1);
            if !ge_rat(&num, &den, &p1) {
                break;
            }
            e10 += 1;
        } else {
            e10 -= 1;
        }
    }
    // I = round(a * 10^(digits-1-e10))
    let shift = digits as i64 - 1 - e10;
    let (sn, sd) = if shift >= 0 {
        (num * BigInt::from(10u32).pow(shift as u32), den)
    } else {
        (num, den * BigInt::from(10u32).pow((-shift) as u32))
    };
    let (q, rem) = num::Integer::div_rem(&sn, &sd);
    let q = if &rem * 2 >= sd { q + 1 } else { q };
    let ds = q.to_string();
    // rounding may carry into one more digit
    let (head, tail, e10) = if ds.len() as u32 > digits {
        (&ds[..1], &ds[1..ds.len() - 1], e10 + 1)
    } else {
        (&ds[..1], &ds[1..], e10)
    };
    let sign = if neg { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{e10}")
    } else {
        format!("{sign}{head}.{tail}e{e10}")
    }
}

fn pow10_int(e: i64) -> (BigInt, BigInt) {
    if e >= 0 {
        (BigInt::from(10u32).pow(e as u32), BigInt::one())
    } else {
        (BigInt::one(), BigInt::from(10u32).pow((-e) as u32))
    }
}

fn ge_rat(num: &BigInt, den: &BigInt, p: &(BigInt, BigInt)) -> bool {
    num * &p.1 >= &p.0 * den
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $op:ident) => {
        impl std::ops::$trait for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                debug_assert!(Arc::ptr_eq(&self.ctx, &rhs.ctx), "context mismatch");
                self.wrap(self.x.$op(&rhs.x, self.ctx.bits, RM))
            }
        }
    };
}

impl_binop!(Add, add, add);
impl_binop!(Sub, sub, sub);
impl_binop!(Mul, mul, mul);
impl_binop!(Div, div, div);

impl std::ops::Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        self.wrap(BigFloat::neg(&self.x))
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_val(other) == std::cmp::Ordering::Equal
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp_val(other))
    }
}

impl std::fmt::Debug for BigReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_decimal(self.ctx.digits.min(30)))
    }
}

impl std::fmt::Display for BigReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_decimal(self.ctx.digits))
    }
}

/// Complex value as a pair of [`BigReal`].
#[derive(Clone, Debug)]
pub struct BigComplex {
    pub re: BigReal,
    pub im: BigReal,
}

impl BigComplex {
    pub fn new(re: BigReal, im: BigReal) -> Self {
        BigComplex { re, im }
    }

    pub fn zero(ctx: &Ctx) -> Self {
        BigComplex { re: ctx.zero(), im: ctx.zero() }
    }

    pub fn one(ctx: &Ctx) -> Self {
        BigComplex { re: ctx.one(), im: ctx.zero() }
    }

    pub fn add(&self, o: &Self) -> Self {
        BigComplex { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &Self) -> Self {
        BigComplex { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn mul(&self, o: &Self) -> Self {
        BigComplex {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }

    pub fn div(&self, o: &Self) -> Self {
        let d = o.norm_sqr();
        let n = self.mul(&o.conj());
        BigComplex { re: &n.re / &d, im: &n.im / &d }
    }

    pub fn scale(&self, s: &BigReal) -> Self {
        BigComplex { re: &self.re * s, im: &self.im * s }
    }

    pub fn neg(&self) -> Self {
        BigComplex { re: -&self.re, im: -&self.im }
    }

    pub fn conj(&self) -> Self {
        BigComplex { re: self.re.clone(), im: -&self.im }
    }

    pub fn norm_sqr(&self) -> BigReal {
        &self.re.square() + &self.im.square()
    }

    pub fn abs(&self) -> BigReal {
        self.norm_sqr().sqrt()
    }

    pub fn powi(&self, n: u64) -> Self {
        let ctx = self.re.ctx().clone();
        let mut base = self.clone();
        let mut acc = BigComplex::one(&ctx);
        let mut k = n;
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

    pub fn recip(&self) -> Self {
        let ctx = self.re.ctx().clone();
        BigComplex::one(&ctx).div(self)
    }
}

/// Arithmetic-geometric mean of two positive reals.
///
/// Iterates the arithmetic/geometric pair until the relative gap is below
/// the working precision; convergence is quadratic.
pub fn agm(a: &BigReal, b: &BigReal) -> Result<BigReal> {
    if !a.is_positive() || !b.is_positive() {
        return Err(MagError::Domain("agm requires positive arguments".into()));
    }
    let ctx = a.ctx().clone();
    let eps = ctx.pow10(-((ctx.digits() + ctx.guard()) as i64));
    let mut x = a.clone();
    let mut y = b.clone();
    for _ in 0..10_000 {
        let gap = (&x - &y).abs();
        if gap <= &eps * &x.abs() {
            return Ok((&x + &y).div_i64(2));
        }
        let m = (&x + &y).div_i64(2);
        let g = (&x * &y).sqrt();
        x = m;
        y = g;
    }
    Err(MagError::Domain("agm failed to converge".into()))
}

/// Complete elliptic integral `I1(f) = pi / (2 agm(1, f))` for `f > 0`.
pub fn elliptic_i1(f: &BigReal) -> Result<BigReal> {
    if !f.is_positive() {
        return Err(MagError::Domain("I1 requires f > 0".into()));
    }
    let ctx = f.ctx().clone();
    let m = agm(&ctx.one(), f)?;
    Ok(&ctx.pi() / &m.mul_i64(2))
}

/// `Gamma(1/4)` through the lemniscatic AGM relation
/// `Gamma(1/4)^2 = (2 pi)^{3/2} / agm(1, sqrt 2)`.
pub fn gamma_quarter(ctx: &Ctx) -> BigReal {
    let two_pi = ctx.pi().mul_i64(2);
    let num = &two_pi * &two_pi.sqrt();
    let den = agm(&ctx.one(), &ctx.sqrt2()).expect("agm(1, sqrt2)");
    (&num / &den).sqrt()
}

/// The nome `q = exp(-pi agm(1+f, 1-f) / agm(1, f))` for `0 < f < 1`.
pub fn nome_from_f(f: &BigReal) -> Result<BigReal> {
    let ctx = f.ctx().clone();
    if !f.is_positive() || *f >= ctx.one() {
        return Err(MagError::Domain("nome requires 0 < f < 1".into()));
    }
    let a = agm(&(&ctx.one() + f), &(&ctx.one() - f))?;
    let b = agm(&ctx.one(), f)?;
    Ok((-&(&(&ctx.pi() * &a) / &b)).exp())
}

// ---------------------------------------------------------------------------
// Bernoulli numbers (shared by the Stirling series and by tail certificates)
// ---------------------------------------------------------------------------

static BERNOULLI: Mutex<Vec<BigRational>> = Mutex::new(Vec::new());

/// `B_{2n}` as an exact rational, from the tangent-number triangle.
pub fn bernoulli_even(n: usize) -> BigRational {
    let mut cache = BERNOULLI.lock().unwrap();
    if n >= cache.len() {
        let upto = (n + 16).max(2 * cache.len());
        *cache = build_bernoulli(upto);
    }
    cache[n].clone()
}

fn build_bernoulli(upto: usize) -> Vec<BigRational> {
    // tangent numbers T_1..T_upto
    let n = upto.max(1);
    let mut t: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    t[1] = BigInt::one();
    for k in 2..=n {
        t[k] = &t[k - 1] * BigInt::from(k - 1);
    }
    for k in 2..=n {
        for j in k..=n {
            t[j] = &t[j - 1] * BigInt::from(j - k) + &t[j] * BigInt::from(j - k + 2);
        }
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(BigRational::one()); // B_0
    for m in 1..=n {
        let four_m = BigInt::from(4u32).pow(m as u32);
        let den = &four_m * (&four_m - BigInt::one());
        let mut num = &t[m] * BigInt::from(2 * m);
        if m % 2 == 0 {
            num = -num;
        }
        out.push(BigRational::new(num, den));
    }
    out
}

/// `Gamma(x)` for rational `x > 0` by the shifted Stirling series.
///
/// The series remainder on the positive real axis is enveloped by the first
/// omitted term, so the shift is chosen large enough that the smallest term
/// falls below the working precision before the terms turn around.
pub fn gamma_rational(ctx: &Ctx, x: &BigRational) -> Result<BigReal> {
    if !x.is_positive() {
        return Err(MagError::Domain(format!("gamma requires x > 0, got {x}")));
    }
    let d = (ctx.digits() + ctx.guard()) as i64;
    let xf = ctx.from_rational(x);
    let z0 = 0.385 * (d as f64 + 12.0) + 4.0;
    let xv = x.to_integer().to_string().parse::<f64>().unwrap_or(0.0);
    let shift = (z0 - xv).ceil().max(0.0) as i64;
    let z = &xf + &ctx.from_i64(shift);

    let lnz = z.ln();
    let half = ctx.from_rational(&BigRational::new(BigInt::one(), BigInt::from(2)));
    let ln_two_pi = ctx.pi().mul_i64(2).ln();
    let mut acc = &(&(&z - &half) * &lnz) - &z;
    acc = &acc + &ln_two_pi.div_i64(2);

    let eps = ctx.pow10(-(d + 8));
    let z2inv = z.square().recip();
    let mut zpow = z.recip(); // z^{1-2k}
    let mut prev: Option<BigReal> = None;
    for k in 1..(20 * z0 as usize) {
        let b = bernoulli_even(k);
        let coef = b / BigRational::from_integer(BigInt::from((2 * k * (2 * k - 1)) as i64));
        let term = &ctx.from_rational(&coef) * &zpow;
        let ta = term.abs();
        if let Some(p) = &prev {
            if ta > *p {
                return Err(MagError::Domain(
                    "stirling series diverged before reaching tolerance".into(),
                ));
            }
        }
        acc = &acc + &term;
        if ta < eps {
            let mut g = acc.exp();
            for j in 0..shift {
                g = &g / &(&xf + &ctx.from_i64(j));
            }
            return Ok(g);
        }
        prev = Some(ta);
        zpow = &zpow * &z2inv;
    }
    Err(MagError::Domain("stirling series did not terminate".into()))
}

// ---------------------------------------------------------------------------
// Rational reconstruction
// ---------------------------------------------------------------------------

/// Recover a small-denominator rational from a high-precision value by
/// continued fractions.
///
/// Returns the first convergent `p/q` with `|x - p/q| < eps`; `None` if the
/// denominator exceeds `max_den` first.  Callers confirm the result by
/// re-deriving it at a higher precision.
pub fn reconstruct_rational(x: &BigReal, eps: &BigReal, max_den: &BigInt) -> Option<BigRational> {
    let target = x.to_rational_exact();
    let epsr = eps.to_rational_exact();
    let mut a = target.clone();
    let (mut h0, mut h1) = (BigInt::one(), a.to_integer());
    let (mut k0, mut k1) = (BigInt::zero(), BigInt::one());
    let mut frac = &a - BigRational::from_integer(a.to_integer());
    for _ in 0..10_000 {
        let conv = BigRational::new(h1.clone(), k1.clone());
        if (&target - &conv).abs() < epsr {
            return Some(conv);
        }
        if k1 > *max_den {
            return None;
        }
        if frac.is_zero() {
            return None;
        }
        a = frac.recip();
        let ai = a.to_integer();
        frac = &a - BigRational::from_integer(ai.clone());
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
    }
    None
}
