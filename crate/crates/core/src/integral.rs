//! Evaluation of the double integral `I2(f)` on the whole real line, its
//! exact series data, and the series-level checks of both differential
//! equations.
//!
//! Evaluation reduces the argument into `[0, sqrt2 - 1]` by three exact maps
//! (to negative `f` via the AGM relation, inversion `I2(f) = I2(1/f)/f`, and
//! the involution `f -> (1-f)/(1+f)`), then splits the value into an AGM
//! part and a rapidly convergent odd series whose coefficients `a_n` satisfy
//! a three-term recursion with an inhomogeneous tail.

use std::sync::Mutex;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};

use crate::error::{MagError, Result};
use crate::piquad::PiQuadratic;
use crate::precision::{agm, BigReal, Ctx, RealOps};
use crate::quadrature::TanhSinhRule;
use crate::series::{apply_l, ExactSeries};

/// `(1/2)_n` as an exact rational.
pub(crate) fn poch_half(n: usize) -> BigRational {
    let mut num = BigInt::one();
    for i in 0..n {
        num *= BigInt::from(2 * i as i64 + 1);
    }
    BigRational::new(num, BigInt::one() << n)
}

pub(crate) fn factorial(n: usize) -> BigInt {
    let mut v = BigInt::one();
    for i in 2..=n {
        v *= BigInt::from(i as i64);
    }
    v
}

// ---------------------------------------------------------------------------
// Series coefficients
// ---------------------------------------------------------------------------

static A_CACHE: Mutex<Vec<BigRational>> = Mutex::new(Vec::new());

/// Exact odd-part coefficients `a_0..a_n` from
/// `(2n+1)^3 a_n = 4n(4n^2+1) a_{n-1} - (2n-1)^3 a_{n-2} + 8(-1)^n n`.
pub fn a_coeffs(n: usize) -> Vec<BigRational> {
    let mut cache = A_CACHE.lock().unwrap();
    if cache.is_empty() {
        cache.push(BigRational::one());
    }
    while cache.len() <= n {
        let k = cache.len();
        let prev1 = &cache[k - 1];
        let prev2 = if k >= 2 { cache[k - 2].clone() } else { BigRational::zero() };
        let kk = k as i64;
        let val = (BigRational::from_integer((4 * kk * (4 * kk * kk + 1)).into()) * prev1
            - BigRational::from_integer(((2 * kk - 1).pow(3)).into()) * prev2
            + BigRational::from_integer((8 * (if k % 2 == 0 { kk } else { -kk })).into()))
            / BigRational::from_integer(((2 * kk + 1).pow(3)).into());
        cache.push(val);
    }
    cache[..=n].to_vec()
}

/// The same recursion run in floating point, for evaluation at orders where
/// exact denominators would be enormous.  Returns the coefficients and the
/// largest absolute value seen (used by the tail bound).
fn a_coeffs_real(ctx: &Ctx, n: usize) -> (Vec<BigReal>, BigReal) {
    let mut v = Vec::with_capacity(n + 1);
    v.push(ctx.one());
    let mut max = ctx.one();
    for k in 1..=n {
        let kk = k as i64;
        let prev2 = if k >= 2 { v[k - 2].clone() } else { ctx.zero() };
        let t = &(&v[k - 1].mul_i64(4 * kk * (4 * kk * kk + 1)) - &prev2.mul_i64((2 * kk - 1).pow(3)))
            + &ctx.from_i64(8 * if k % 2 == 0 { kk } else { -kk });
        let val = t.div_i64((2 * kk + 1).pow(3));
        if val.abs() > max {
            max = val.abs();
        }
        v.push(val);
    }
    (v, max)
}

/// Exact `T(0)..T(n)` from `2T(n+1) - T(n) = (1/2)_n/n!`, `T(0) = 0`.
pub fn t_coeffs(n: usize) -> Vec<BigRational> {
    let mut t = vec![BigRational::zero()];
    let mut poch = BigRational::one(); // (1/2)_k / k!
    for k in 0..n {
        let next = (&t[k] + &poch) / BigRational::from_integer(2.into());
        t.push(next);
        poch = poch * BigRational::new((2 * k as i64 + 1).into(), (2 * (k as i64 + 1)).into());
    }
    t
}

/// Exact `S_0(0)..S_0(n)` (the `h^n` coefficients of `Y(h)`) from the
/// three-term recursion seeded by `S_0(0) = pi^2/2`.
pub fn y_coeffs(n: usize) -> Vec<PiQuadratic> {
    let t = t_coeffs(n + 1);
    let mut s = vec![PiQuadratic::pi2(BigRational::new(1.into(), 2.into()))];
    for k in 0..n {
        let kk = k as i64;
        let mut acc = s[k].scale(&BigRational::new(
            ((2 * kk + 1) * (2 * kk * kk + 2 * kk + 1)).into(),
            8.into(),
        ));
        if k >= 1 {
            acc = acc.sub(&s[k - 1].scale(&BigRational::new((kk * kk * kk).into(), 4.into())));
        }
        let inhom = &t[k] * BigRational::new(kk.into(), 2.into())
            - poch_half(k + 1) / (BigRational::from_integer(factorial(k)) * BigRational::from_integer(2.into()));
        acc = acc.add(&PiQuadratic::from_rational(inhom));
        s.push(acc.scale(&BigRational::new(4.into(), ((kk + 1) * (kk + 1) * (kk + 1)).into())));
    }
    s
}

// ---------------------------------------------------------------------------
// Argument reduction
// ---------------------------------------------------------------------------

/// One exact identity used to move `f` toward `[0, sqrt2 - 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionStep {
    /// `I2(f) = (1+f)[J(f) - I2(-f)/(1-f)]` for `f < 0`.
    NegativeMap,
    /// `I2(f) = I2(1/f)/f`.
    InverseMap,
    /// `I2(f) = I2((1-f)/(1+f))`.
    InvolutionMap,
}

/// The reduction plan for one evaluation: each step records the value of `f`
/// it was applied to, so the plan can be unwound or composed back exactly.
#[derive(Clone, Debug)]
pub struct ReductionTrace {
    pub input: BigReal,
    pub steps: Vec<(ReductionStep, BigReal)>,
    pub final_f: BigReal,
}

impl ReductionTrace {
    /// Applies the inverse maps to `final_f`; returns the reconstructed input.
    pub fn compose_back(&self) -> BigReal {
        let ctx = self.input.ctx().clone();
        let mut f = self.final_f.clone();
        for (step, _) in self.steps.iter().rev() {
            f = match step {
                ReductionStep::InvolutionMap => &(&ctx.one() - &f) / &(&ctx.one() + &f),
                ReductionStep::InverseMap => f.recip(),
                ReductionStep::NegativeMap => -&f,
            };
        }
        f
    }
}

/// Reduce `f` to `final_f` in `[0, sqrt2 - 1]`, recording the identities used.
pub fn reduce_f(f: &BigReal) -> Result<ReductionTrace> {
    let ctx = f.ctx().clone();
    let one = ctx.one();
    if *f == -&one {
        return Err(MagError::Pole);
    }
    let s2m1 = &ctx.sqrt2() - &one;
    let mut steps = Vec::new();
    let mut cur = f.clone();
    if cur < -&one {
        steps.push((ReductionStep::InverseMap, cur.clone()));
        cur = cur.recip();
    }
    if cur.is_negative() {
        steps.push((ReductionStep::NegativeMap, cur.clone()));
        cur = -&cur;
    }
    if cur > one {
        steps.push((ReductionStep::InverseMap, cur.clone()));
        cur = cur.recip();
    }
    if cur > s2m1 {
        steps.push((ReductionStep::InvolutionMap, cur.clone()));
        cur = &(&one - &cur) / &(&one + &cur);
    }
    Ok(ReductionTrace { input: f.clone(), steps, final_f: cur })
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// `J(f) = (pi/2)^2 / agm(1+f, 1-f)^2` for `|f| < 1`.
pub fn j_function(f: &BigReal) -> Result<BigReal> {
    let ctx = f.ctx().clone();
    if f.abs() >= ctx.one() {
        return Err(MagError::Domain("J(f) requires |f| < 1".into()));
    }
    let m = agm(&(&ctx.one() + f), &(&ctx.one() - f))?;
    Ok(&ctx.pi().div_i64(2).square() / &m.square())
}

/// Direct series evaluation of `I2(f)` for `|f| < 1`, without any argument
/// reduction.  This is the raw convergent formula
/// `I2(f)/(1+f) = (pi^2/8) agm(1+f,1-f)^{-2} - sum a_n f^{2n+1}`;
/// the reduced path in [`i2_eval`] is preferred, but this one gives an
/// independent route for testing the reduction identities.
pub fn i2_eval_unreduced(f: &BigReal) -> Result<BigReal> {
    let ctx = f.ctx().clone();
    if f.abs() >= ctx.one() {
        return Err(MagError::Domain("unreduced evaluation requires |f| < 1".into()));
    }
    let d = (ctx.digits() + ctx.guard()) as f64;
    let af = f.abs().to_f64();
    let n_terms = if af < 1e-300 {
        1
    } else {
        let n = (d + 6.0) * std::f64::consts::LN_10 / (-2.0 * af.ln());
        if !n.is_finite() || n > 2e5 {
            return Err(MagError::Truncation(
                "series too close to |f| = 1 for direct evaluation".into(),
            ));
        }
        n.ceil() as usize + 4
    };
    eval_series_at(f, n_terms)
}

fn eval_series_at(f: &BigReal, n_terms: usize) -> Result<BigReal> {
    let ctx = f.ctx().clone();
    let one = ctx.one();
    let even = &ctx.pi().square().div_i64(8) / &agm(&(&one + f), &(&one - f))?.square();
    let (a, amax) = a_coeffs_real(&ctx, n_terms);
    debug_assert!(amax <= ctx.from_f64(1.5), "odd-part coefficients left their observed bound");
    let f2 = f.square();
    let mut odd = ctx.zero();
    let mut fpow = f.clone();
    for an in &a {
        odd = &odd + &(an * &fpow);
        fpow = &fpow * &f2;
    }
    Ok(&(&one + f) * &(&even - &odd))
}

/// Evaluate `I2(f)` anywhere on the real line except the pole `f = -1`.
pub fn i2_eval(f: &BigReal) -> Result<BigReal> {
    Ok(i2_eval_with_trace(f)?.0)
}

/// Evaluation together with the reduction plan that produced it.
pub fn i2_eval_with_trace(f: &BigReal) -> Result<(BigReal, ReductionTrace)> {
    let ctx = f.ctx().clone();
    let one = ctx.one();
    let pi2_8 = ctx.pi().square().div_i64(8);
    if *f == one {
        // closed boundary value; the series would meet agm(2, 0)
        let trace = ReductionTrace { input: f.clone(), steps: Vec::new(), final_f: f.clone() };
        return Ok((pi2_8, trace));
    }
    let trace = reduce_f(f)?;
    // after reduction f^2 <= (sqrt2 - 1)^2 < 0.172
    let d = (ctx.digits() + ctx.guard()) as f64;
    let n_terms = ((d + 6.0) * std::f64::consts::LN_10 / 1.7603).ceil() as usize + 4;
    let mut val = eval_series_at(&trace.final_f, n_terms)?;
    for (step, f_before) in trace.steps.iter().rev() {
        val = match step {
            ReductionStep::InvolutionMap => val,
            ReductionStep::InverseMap => &val / f_before,
            ReductionStep::NegativeMap => {
                let j = j_function(f_before)?;
                &(&one + f_before) * &(&j - &(&val / &(&one - f_before)))
            }
        };
    }
    Ok((val, trace))
}

/// Direct nested tanh-sinh quadrature of the defining double integral, the
/// independent oracle for [`i2_eval`].
///
/// In the variables `X = cos 2a`, `Y = cos 2b` the triangle
/// `pi/2 > a > b > 0` becomes `-1 < X < Y < 1` and the integrand is
/// algebraic:
/// `I2(f) = (1+f)/4 * double integral of
///  [ (1-X^2)(1-Y^2)(1+f^2-2fX)(1+f^2+2fY) ]^{-1/2}`.
pub fn i2_quadrature(f: &BigReal, target_digits: u32) -> Result<BigReal> {
    if target_digits > 50 {
        return Err(MagError::UnsupportedPrecision(
            "the quadrature oracle is capped at 50 digits".into(),
        ));
    }
    let ctx = f.ctx().clone();
    if f.abs() >= ctx.one() {
        return Err(MagError::Domain("quadrature oracle requires |f| < 1".into()));
    }
    let one = ctx.one();
    let one_p_f2 = &one + &f.square();
    let two_f = f.mul_i64(2);
    let rule = TanhSinhRule::new(&ctx);
    let m_one = -&one;

    let outer = rule.integrate(&m_one, &one, target_digits + 2, &mut |y, da, db| {
        // da = Y+1, db = 1-Y
        let wy = &(da * db) * &(&one_p_f2 + &(&two_f * y));
        let inner = rule
            .integrate_from(&m_one, da, target_digits + 4, &mut |x, da_in, db_in| {
                // 1 - X = (1 - Y) + (Y - X), both from stable endpoint distances
                let one_m_x = db + db_in;
                let wx = &(da_in * &one_m_x) * &(&one_p_f2 - &(&two_f * x));
                wx.sqrt().recip()
            })
            .expect("inner quadrature");
        &inner / &wy.sqrt()
    })?;
    Ok(&outer * &(&one + f).div_i64(4))
}

// ---------------------------------------------------------------------------
// Exact series of I2 and the two theorems at series level
// ---------------------------------------------------------------------------

/// The `f`-expansion of `I2(f)` with exact `PiQuadratic` coefficients:
/// `I2(f) = (1+f) [ (pi^2/8)(sum ((1/2)_n/n!)^2 f^{2n})^2 - sum a_n f^{2n+1} ]`.
pub fn i2_series(order: usize) -> ExactSeries<PiQuadratic> {
    assert!(order >= 4, "i2_series needs order >= 4");
    let mut hyp = vec![BigRational::zero(); order + 1];
    let mut c = BigRational::one();
    for n in 0..=(order / 2) {
        hyp[2 * n] = &c * &c;
        c = c * BigRational::new((2 * n as i64 + 1).into(), (2 * (n as i64 + 1)).into());
    }
    let hyp = ExactSeries::from_integer_coeffs(hyp);
    let even = hyp.mul(&hyp); // rational series, squared
    let a = a_coeffs(order / 2);
    let coeffs: Vec<PiQuadratic> = (0..=order)
        .map(|k| {
            let s = even.coeff(k) / BigRational::from_integer(8.into());
            let r = if k % 2 == 1 { -a[(k - 1) / 2].clone() } else { BigRational::zero() };
            PiQuadratic::new(r, s)
        })
        .collect();
    let g = ExactSeries::from_integer_coeffs(coeffs);
    let one_plus_f = {
        let mut v = vec![PiQuadratic::zero(); order + 1];
        v[0] = PiQuadratic::one();
        v[1] = PiQuadratic::one();
        ExactSeries::from_integer_coeffs(v)
    };
    g.mul(&one_plus_f)
}

/// The closed form `R(f) = 2(2f/(1+f^2))^2 - 1` expanded as an exact series:
/// `-1 + 8f^2 - 16f^4 + 24f^6 - ...`.
pub fn theorem1_rhs_series(order: usize) -> ExactSeries<PiQuadratic> {
    let mut c = vec![PiQuadratic::zero(); order + 1];
    c[0] = PiQuadratic::from_int(-1);
    let mut k = 0i64;
    while (2 * k + 2) as usize <= order {
        let v = 8 * (k + 1) * if k % 2 == 0 { 1 } else { -1 };
        c[(2 * k + 2) as usize] = PiQuadratic::from_int(v);
        k += 1;
    }
    ExactSeries::from_integer_coeffs(c)
}

/// Outcome of the series-level check of the third-order equation for `Y(h)`.
#[derive(Clone, Debug)]
pub struct Theorem2Report {
    pub order: usize,
    pub residual_is_zero: bool,
    pub first_nonzero_order: Option<usize>,
}

/// Applies `theta^3 - (1/2) h (2 theta + 1)(2 theta^2 + 2 theta + 1) + h^2 (theta + 1)^3`
/// to `Y(h) = sum S_0(n) h^n` and subtracts the series of
/// `-(4 - 4h - h^2) h / ((2-h)^2 sqrt(1-h))`; the residual must vanish
/// identically, rational and `pi^2` parts separately.
pub fn verify_theorem2(order: usize) -> Result<Theorem2Report> {
    if order < 10 {
        return Err(MagError::InsufficientOrder { need: 10, have: order });
    }
    let s0 = y_coeffs(order);
    // coefficient n of the operator applied to Y:
    //   n^3 S0(n) - (1/2)(2n-1)(2n^2-2n+1) S0(n-1) + (n-1)^3 S0(n-2)
    let mut lhs = Vec::with_capacity(order + 1);
    for n in 0..=order {
        let nn = n as i64;
        let mut v = s0[n].scale(&BigRational::from_integer((nn * nn * nn).into()));
        if n >= 1 {
            v = v.sub(&s0[n - 1].scale(&BigRational::new(
                ((2 * nn - 1) * (2 * nn * nn - 2 * nn + 1)).into(),
                2.into(),
            )));
        }
        if n >= 2 {
            let w = (nn - 1) * (nn - 1) * (nn - 1);
            v = v.add(&s0[n - 2].scale(&BigRational::from_integer(w.into())));
        }
        lhs.push(v);
    }
    let lhs = ExactSeries::from_integer_coeffs(lhs);

    // rhs = -(4 - 4h - h^2) h (2-h)^{-2} (1-h)^{-1/2}
    let two_m_h = ExactSeries::from_integer_coeffs(int_poly(&[2, -1], order));
    let one_m_h = ExactSeries::from_integer_coeffs(int_poly(&[1, -1], order));
    let inv_sq = two_m_h.mul(&two_m_h).reciprocal()?;
    let inv_root = one_m_h.sqrt()?.reciprocal()?;
    let poly = ExactSeries::from_integer_coeffs(int_poly(&[0, -4, 4, 1], order));
    let rhs = poly.mul(&inv_sq).mul(&inv_root);

    let mut first = None;
    for n in 0..=order {
        let diff = lhs.coeff(n).sub(&PiQuadratic::from_rational(rhs.coeff(n).clone()));
        if !diff.is_zero() {
            first = Some(n);
            break;
        }
    }
    Ok(Theorem2Report { order, residual_is_zero: first.is_none(), first_nonzero_order: first })
}

fn int_poly(v: &[i64], order: usize) -> Vec<BigRational> {
    let mut c = vec![BigRational::zero(); order + 1];
    for (i, x) in v.iter().enumerate() {
        c[i] = BigRational::from_integer((*x).into());
    }
    c
}

/// Convenience wrapper: `apply_l(i2_series(order))` compared with the
/// expansion of `2(2f/(1+f^2))^2 - 1`, exactly, through `order - 4`.
pub fn verify_theorem1(order: usize) -> Result<bool> {
    let lhs = apply_l(&i2_series(order))?;
    let rhs = theorem1_rhs_series(order);
    let upto = order - 4;
    for n in 0..=upto {
        if lhs.coeff(n) != rhs.coeff(n) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::PrecisionContext;
    use num::Signed;

    fn ctx(d: u32) -> Ctx {
        PrecisionContext::new(d).unwrap()
    }

    #[test]
    fn a_coefficients_exact() {
        let a = a_coeffs(2);
        assert_eq!(a[0], BigRational::one());
        assert_eq!(a[1], BigRational::new(4.into(), 9.into()));
        assert_eq!(a[2], BigRational::new(89.into(), 225.into()));
        // observed bound used by the evaluation tail estimate
        let a = a_coeffs(400);
        assert!(a.iter().all(|v| v.abs() <= BigRational::one()));
    }

    #[test]
    fn t_and_s0_values() {
        let t = t_coeffs(3);
        assert_eq!(t[1], BigRational::new(1.into(), 2.into()));
        assert_eq!(t[2], BigRational::new(1.into(), 2.into()));
        // 2T(3) - T(2) = (1/2)_2/2! = 3/8
        let lhs = &t[3] * BigRational::from_integer(2.into()) - &t[2];
        assert_eq!(lhs, BigRational::new(3.into(), 8.into()));
        let s0 = y_coeffs(1);
        assert_eq!(s0[0], PiQuadratic::pi2(BigRational::new(1.into(), 2.into())));
        assert_eq!(
            s0[1],
            PiQuadratic::new(BigRational::from_integer((-1).into()), BigRational::new(1.into(), 4.into()))
        );
    }

    #[test]
    fn t_generating_function() {
        // sum T(n) h^n = h/((2-h) sqrt(1-h))
        let order = 50;
        let t = t_coeffs(order);
        let two_m_h = ExactSeries::from_integer_coeffs(int_poly(&[2, -1], order));
        let one_m_h = ExactSeries::from_integer_coeffs(int_poly(&[1, -1], order));
        let h = ExactSeries::from_integer_coeffs(int_poly(&[0, 1], order));
        let gf = h.mul(&two_m_h.mul(&one_m_h.sqrt().unwrap()).reciprocal().unwrap());
        for n in 0..=order {
            assert_eq!(gf.coeff(n), &t[n], "mismatch at order {n}");
        }
    }

    #[test]
    fn reduction_traces() {
        let c = ctx(40);
        // f = 0.1: no steps
        let tr = reduce_f(&c.from_f64(0.1)).unwrap();
        assert!(tr.steps.is_empty());
        // f = 5 -> inverse only (1/5 < sqrt2 - 1)
        let tr = reduce_f(&c.from_i64(5)).unwrap();
        assert_eq!(tr.steps.len(), 1);
        assert_eq!(tr.steps[0].0, ReductionStep::InverseMap);
        assert!((&tr.final_f - &c.one().div_i64(5)).abs() < c.pow10(-35));
        // f = 0.9 -> involution to 1/19
        let tr = reduce_f(&c.from_dec_str("0.9")).unwrap();
        assert_eq!(tr.steps.len(), 1);
        assert_eq!(tr.steps[0].0, ReductionStep::InvolutionMap);
        let expect = c.one().div_i64(19);
        assert!((&tr.final_f - &expect).abs() < c.pow10(-35));
        // compose_back returns the input
        for f in [-3.7, -0.6, 0.3, 0.9, 42.0] {
            let tr = reduce_f(&c.from_f64(f)).unwrap();
            assert!((&tr.compose_back() - &c.from_f64(f)).abs() < c.pow10(-33));
            let bound = &(&c.sqrt2() - &c.one()) + &c.pow10(-30);
            assert!(tr.final_f <= bound && !tr.final_f.is_negative());
        }
        assert!(matches!(reduce_f(&c.from_i64(-1)), Err(MagError::Pole)));
    }

    #[test]
    fn boundary_values() {
        let c = ctx(50);
        let pi2_8 = c.pi().square().div_i64(8);
        assert!((&i2_eval(&c.zero()).unwrap() - &pi2_8).abs() < c.pow10(-48));
        assert!((&i2_eval(&c.one()).unwrap() - &pi2_8).abs() < c.pow10(-48));
    }

    #[test]
    fn inversion_and_involution_bookkeeping() {
        let c = ctx(50);
        let v3 = i2_eval(&c.from_i64(3)).unwrap();
        let v13 = i2_eval(&c.one().div_i64(3)).unwrap();
        assert!((&v3 - &v13.div_i64(3)).abs() < c.pow10(-45));
        // unreduced route agrees with the reduced one across (0, 1)
        for f in [0.2, 0.5, 0.8] {
            let fv = c.from_f64(f);
            let a = i2_eval(&fv).unwrap();
            let b = i2_eval_unreduced(&fv).unwrap();
            assert!((&a - &b).abs() < c.pow10(-45), "mismatch at f = {f}");
        }
        // negative arguments against the unreduced series
        for f in [-0.3, -0.7] {
            let fv = c.from_f64(f);
            let a = i2_eval(&fv).unwrap();
            let b = i2_eval_unreduced(&fv).unwrap();
            assert!((&a - &b).abs() < c.pow10(-44), "mismatch at f = {f}");
        }
    }

    #[test]
    fn j_function_values() {
        let c = ctx(45);
        assert!((&j_function(&c.zero()).unwrap() - &c.pi().square().div_i64(4)).abs() < c.pow10(-43));
        let f = c.from_f64(0.25);
        let j1 = j_function(&f).unwrap();
        let j2 = j_function(&(-&f)).unwrap();
        assert!((&j1 - &j2).abs() < c.pow10(-42));
        // J(f) = I2(f)/(1+f) + I2(-f)/(1-f)
        let f = c.from_f64(0.4);
        let lhs = j_function(&f).unwrap();
        let rhs = &(&i2_eval(&f).unwrap() / &(&c.one() + &f))
            + &(&i2_eval(&(-&f)).unwrap() / &(&c.one() - &f));
        assert!((&lhs - &rhs).abs() < c.pow10(-42));
        assert!(j_function(&c.from_i64(2)).is_err());
    }

    #[test]
    fn i2_series_leading_coefficients() {
        let s = i2_series(8);
        // constant term pi^2/8
        assert_eq!(s.coeff(0), &PiQuadratic::pi2(BigRational::new(1.into(), 8.into())));
        // f^1 coefficient: pi^2/8 - 1
        assert_eq!(
            s.coeff(1),
            &PiQuadratic::new(BigRational::from_integer((-1).into()), BigRational::new(1.into(), 8.into()))
        );
    }

    #[test]
    fn theorem1_series_identity() {
        assert!(verify_theorem1(24).unwrap());
    }

    #[test]
    fn theorem2_residual_vanishes() {
        let r = verify_theorem2(30).unwrap();
        assert!(r.residual_is_zero, "first nonzero at {:?}", r.first_nonzero_order);
        assert!(verify_theorem2(5).is_err());
    }

    #[test]
    fn quadrature_oracle_trivial_case() {
        let c = ctx(40);
        let v = i2_quadrature(&c.zero(), 30).unwrap();
        assert!((&v - &c.pi().square().div_i64(8)).abs() < c.pow10(-29));
        assert!(i2_quadrature(&c.zero(), 51).is_err());
        assert!(i2_quadrature(&c.from_i64(2), 20).is_err());
    }

    #[test]
    fn quadrature_vs_series_spot() {
        let c = ctx(42);
        let f = c.from_f64(0.3);
        let q = i2_quadrature(&f, 27).unwrap();
        let s = i2_eval(&f).unwrap();
        assert!((&q - &s).abs() < c.pow10(-25), "delta = {:?}", (&q - &s).abs());
    }
}
