//! Exact-rational verification of the telescoping machinery behind the
//! differential equation for `Y(h)`.
//!
//! The central object is the hypergeometric term
//! `a(n;m,k) = (1/2)_m (1/2)_{n-m} (1/2)_k^2 / (n! (m+1/2)_{k+1} (n-m+1/2)_{k+1})`.
//! Its telescoping identity is checked in exact rational arithmetic; the
//! `k`-sums `A(n;m)` are evaluated numerically with certified tail bounds
//! obtained from an exact partial-fraction decomposition (the term is a
//! rational function of `k`) whose tail reduces to digamma/trigamma values
//! with enveloping asymptotic remainders.

use std::cell::RefCell;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};

use crate::error::{MagError, Result};
use crate::integral::{factorial, poch_half, t_coeffs, y_coeffs};
use crate::piquad::PiQuadratic;
use crate::precision::{bernoulli_even, BigReal, Ctx, RealOps};
use crate::quadrature::TanhSinhRule;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Rising factorial `(a)_n` for rational `a`.
fn poch(a: &BigRational, n: usize) -> BigRational {
    let mut r = <BigRational as One>::one();
    for i in 0..n {
        r *= a + BigRational::from_integer(i.into());
    }
    r
}

/// The exact term `a(n; m, k)`.
pub fn a_term(n: usize, m: usize, k: usize) -> BigRational {
    assert!(m <= n, "a(n;m,k) needs 0 <= m <= n");
    let half = rat(1, 2);
    let num = poch(&half, m) * poch(&half, n - m) * poch(&half, k).pow(2);
    let den = BigRational::from_integer(factorial(n))
        * poch(&(&half + BigRational::from_integer(m.into())), k + 1)
        * poch(&(&half + BigRational::from_integer((n - m).into())), k + 1);
    num / den
}

/// The telescoping identity behind the contiguous relation:
/// `(n-m+1)^2 a(n+1;m,k) - (n-m+1/2)^2 a(n;m,k)
///    = ((n-m+1/2)^2/(n+1)) (a~(n;m,k+1) - a~(n;m,k))`
/// with `a~ = (m+k+1/2) a`, verified exactly.
pub fn telescoping_certificate(n: usize, m: usize, k: usize) -> bool {
    let half = rat(1, 2);
    let nm = BigRational::from_integer((n - m).into());
    let lhs = (&nm + BigRational::from_integer(1.into())).pow(2) * a_term(n + 1, m, k)
        - (&nm + &half).pow(2) * a_term(n, m, k);
    let tilde = |kk: usize| {
        (BigRational::from_integer((m + kk).into()) + &half) * a_term(n, m, kk)
    };
    let rhs = (&nm + &half).pow(2) / BigRational::from_integer((n + 1).into())
        * (tilde(k + 1) - tilde(k));
    lhs == rhs
}

/// `c(n;m) = (1/2)_m (1/2)_{n-m}/n!`, with the closed alternative form
/// `(-1)^m (1/2 - m)_n / n!` used as a cross-check in tests.
pub fn c_term(n: usize, m: usize) -> BigRational {
    let half = rat(1, 2);
    poch(&half, m) * poch(&half, n - m) / BigRational::from_integer(factorial(n))
}

// ---------------------------------------------------------------------------
// A(n;m) with certified tails
// ---------------------------------------------------------------------------

/// A numeric value together with a rigorous bound on its absolute error.
#[derive(Clone, Debug)]
pub struct CertifiedValue {
    pub value: BigReal,
    pub bound: BigReal,
}

/// Evaluator for the sums `A(n;m) = sum_k a(n;m,k)` sharing cached
/// digamma/trigamma tail values across calls.
pub struct ANmEvaluator {
    ctx: Ctx,
    k_start: usize,
    digamma: RefCell<Vec<Option<(BigReal, BigReal)>>>,
    trigamma: RefCell<Vec<Option<(BigReal, BigReal)>>>,
}

impl ANmEvaluator {
    pub fn new(ctx: &Ctx) -> Self {
        ANmEvaluator {
            ctx: ctx.clone(),
            k_start: 48,
            digamma: RefCell::new(Vec::new()),
            trigamma: RefCell::new(Vec::new()),
        }
    }

    fn cached(&self, j: usize, trig: bool) -> (BigReal, BigReal) {
        let store = if trig { &self.trigamma } else { &self.digamma };
        {
            let v = store.borrow();
            if j < v.len() {
                if let Some(p) = &v[j] {
                    return p.clone();
                }
            }
        }
        // x = k_start + j + 1/2
        let x = self.ctx.from_i64(2 * (self.k_start + j) as i64 + 1).div_i64(2);
        let p = if trig { trigamma_asymptotic(&x) } else { digamma_asymptotic(&x) };
        let mut v = store.borrow_mut();
        if v.len() <= j {
            v.resize(j + 1, None);
        }
        v[j] = Some(p.clone());
        p
    }

    /// `A(n;m)` as a partial sum of `k_start` exact terms plus the exact
    /// partial-fraction tail, with the asymptotic remainders of the digamma
    /// values accumulated into the certificate bound.
    pub fn a_nm(&self, n: usize, m: usize) -> Result<CertifiedValue> {
        if m > n {
            return Err(MagError::Domain("A(n;m) needs m <= n".into()));
        }
        let ctx = &self.ctx;
        // head: ratio recurrence a(k+1)/a(k) = (k+1/2)^2/((k+m+3/2)(k+n-m+3/2))
        let mut term = ctx.from_rational(&a_term(n, m, 0));
        let mut sum = term.clone();
        for k in 0..self.k_start - 1 {
            let kk = k as i64;
            let num = ctx.from_i64(2 * kk + 1).square();
            let den = &ctx.from_i64(2 * (kk + m as i64) + 3) * &ctx.from_i64(2 * (kk + n as i64 - m as i64) + 3);
            term = &term * &(&num / &den);
            sum = &sum + &term;
        }
        // partial fractions of C / (prod_{j<=m} (k+c_j) * prod_{j<=n-m} (k+c_j))
        let jmin = m.min(n - m);
        let jmax = m.max(n - m);
        let c_big = poch_half(m).pow(2) * poch_half(n - m).pow(2)
            / BigRational::from_integer(factorial(n));
        let exps = |i: usize| -> u32 {
            if i <= jmin {
                2
            } else {
                1
            }
        };
        let mut alpha_sum = <BigRational as Zero>::zero();
        let mut tail = ctx.zero();
        let mut bound = ctx.zero();
        for j in 0..=jmax {
            // product of (i - j)^{e_i} over i != j
            let mut prod = <BigInt as One>::one();
            for i in 0..=jmax {
                if i == j {
                    continue;
                }
                let f = BigInt::from(i as i64 - j as i64);
                prod *= if exps(i) == 2 { &f * &f } else { f };
            }
            let beta = &c_big / BigRational::from_integer(prod);
            if exps(j) == 2 {
                // double factor: beta/(k+c_j)^2 + alpha/(k+c_j)
                let mut dsum = <BigRational as Zero>::zero();
                for i in 0..=jmax {
                    if i != j {
                        dsum += rat(exps(i) as i64, i as i64 - j as i64);
                    }
                }
                let alpha = -(&beta * &dsum);
                let (tri, tri_err) = self.cached(j, true);
                let (dig, dig_err) = self.cached(j, false);
                let beta_r = ctx.from_rational(&beta);
                let alpha_r = ctx.from_rational(&alpha);
                tail = &tail + &(&beta_r * &tri);
                tail = &tail - &(&alpha_r * &dig);
                bound = &bound + &(&beta_r.abs() * &tri_err);
                bound = &bound + &(&alpha_r.abs() * &dig_err);
                alpha_sum += alpha;
            } else {
                // simple factor: alpha/(k+c_j)
                let (dig, dig_err) = self.cached(j, false);
                let alpha_r = ctx.from_rational(&beta);
                tail = &tail - &(&alpha_r * &dig);
                bound = &bound + &(&alpha_r.abs() * &dig_err);
                alpha_sum += beta;
            }
        }
        // the 1/(k+c) parts only sum because their residues cancel
        debug_assert!(Zero::is_zero(&alpha_sum), "partial-fraction residues must cancel");
        bound = &bound + &ctx.pow10(-((ctx.digits() + ctx.guard() / 2) as i64));
        Ok(CertifiedValue { value: &sum + &tail, bound })
    }
}

/// One-shot convenience wrapper around [`ANmEvaluator`].
pub fn a_nm(ctx: &Ctx, n: usize, m: usize) -> Result<CertifiedValue> {
    ANmEvaluator::new(ctx).a_nm(n, m)
}

/// `psi(x) = ln x - 1/(2x) - sum B_{2k}/(2k x^{2k})` with the remainder
/// enveloped by the first omitted term (doubled for safety); needs `x` large
/// enough that the terms fall below the working precision while decreasing.
fn digamma_asymptotic(x: &BigReal) -> (BigReal, BigReal) {
    let ctx = x.ctx().clone();
    let eps = ctx.pow10(-((ctx.digits() + ctx.guard()) as i64));
    let mut acc = &x.ln() - &x.recip().div_i64(2);
    let x2inv = x.square().recip();
    let mut xp = x2inv.clone();
    for k in 1..400 {
        let coef = bernoulli_even(k) / rat(2 * k as i64, 1);
        let term = &ctx.from_rational(&coef) * &xp;
        if term.abs() < eps {
            return (acc, term.abs().mul_i64(2));
        }
        acc = &acc - &term;
        xp = &xp * &x2inv;
    }
    let bound = xp.abs();
    (acc, bound)
}

/// `psi'(x) = 1/x + 1/(2x^2) + sum B_{2k}/x^{2k+1}`, same enveloping scheme.
fn trigamma_asymptotic(x: &BigReal) -> (BigReal, BigReal) {
    let ctx = x.ctx().clone();
    let eps = ctx.pow10(-((ctx.digits() + ctx.guard()) as i64));
    let xinv = x.recip();
    let x2inv = xinv.square();
    let mut acc = &xinv + &x2inv.div_i64(2);
    let mut xp = &xinv * &x2inv;
    for k in 1..400 {
        let term = &ctx.from_rational(&bernoulli_even(k)) * &xp;
        if term.abs() < eps {
            return (acc, term.abs().mul_i64(2));
        }
        acc = &acc + &term;
        xp = &xp * &x2inv;
    }
    let bound = xp.abs();
    (acc, bound)
}

// ---------------------------------------------------------------------------
// The contiguous relations
// ---------------------------------------------------------------------------

/// Result of checking one instance of a relation whose left side is numeric
/// with a certified bound and whose right side is exact.
#[derive(Clone, Debug)]
pub struct RelationCheck {
    pub residual: BigReal,
    pub bound: BigReal,
    pub passes: bool,
}

/// `m^2 A(n+1;m) - (m - 1/2)^2 A(n;m-1) = -(1/2)_{n+1-m} (1/2)_m/(n+1)!`
/// for `1 <= m <= n+1`.
pub fn verify_r3(ev: &ANmEvaluator, n: usize, m: usize) -> Result<RelationCheck> {
    if m == 0 || m > n + 1 {
        return Err(MagError::Domain("R3 needs 1 <= m <= n+1".into()));
    }
    let ctx = ev.ctx.clone();
    let left_hi = ev.a_nm(n + 1, m)?;
    let left_lo = ev.a_nm(n, m - 1)?;
    let msq = ctx.from_i64(m as i64).square();
    let mh = ctx.from_i64(2 * m as i64 - 1).div_i64(2).square();
    let lhs = &(&msq * &left_hi.value) - &(&mh * &left_lo.value);
    let rhs = ctx.from_rational(
        &(-(poch_half(n + 1 - m) * poch_half(m)) / BigRational::from_integer(factorial(n + 1))),
    );
    let residual = (&lhs - &rhs).abs();
    let bound = &(&msq * &left_hi.bound) + &(&mh * &left_lo.bound);
    let slack = ctx.pow10(-((ctx.digits()) as i64));
    let passes = residual <= &bound + &slack;
    Ok(RelationCheck { residual, bound, passes })
}

/// The sum-free three-term relation, exact in `PiQuadratic` arithmetic:
/// `1/4 (n+1)^3 S0(n+1) - 1/8 (2n+1)(2n^2+2n+1) S0(n) + 1/4 n^3 S0(n-1)
///  = -(n+2) T(n+2) + 1/2 (n+2) T(n+1) + 1/2 n T(n) + (1/2)_{n+1}/(2 (n+1)!)`.
pub fn verify_ir(n: usize) -> bool {
    if n == 0 {
        return false;
    }
    let s0 = y_coeffs(n + 1);
    let t = t_coeffs(n + 2);
    let nn = n as i64;
    let lhs = s0[n + 1]
        .scale(&rat((nn + 1).pow(3), 4))
        .sub(&s0[n].scale(&rat((2 * nn + 1) * (2 * nn * nn + 2 * nn + 1), 8)))
        .add(&s0[n - 1].scale(&rat(nn.pow(3), 4)));
    let rhs_rat = -(&t[n + 2] * rat(nn + 2, 1)) + &t[n + 1] * rat(nn + 2, 2) + &t[n] * rat(nn, 2)
        + poch_half(n + 1) / (BigRational::from_integer(factorial(n + 1)) * rat(2, 1));
    lhs == PiQuadratic::from_rational(rhs_rat)
}

/// The homogeneous three-term relation holds for the `pi^2` parts alone
/// (the inhomogeneity is purely rational).
pub fn verify_ir_pi2_part(n: usize) -> bool {
    if n == 0 {
        return false;
    }
    let s0 = y_coeffs(n + 1);
    let nn = n as i64;
    let combo = &s0[n + 1].s * rat((nn + 1).pow(3), 4)
        - &s0[n].s * rat((2 * nn + 1) * (2 * nn * nn + 2 * nn + 1), 8)
        + &s0[n - 1].s * rat(nn.pow(3), 4);
    Zero::is_zero(&combo)
}

/// `T` computed three ways: the defining sum of `c(n;m)`, the two-term
/// recursion, and the generating function `h/((2-h) sqrt(1-h))`.
pub fn verify_t_recursion(order: usize) -> bool {
    let t = t_coeffs(order);
    // direct sums
    for n in 0..=order.min(30) {
        let direct: BigRational = (1..=n).map(|m| c_term(n, m)).sum();
        if direct != t[n] {
            return false;
        }
    }
    // generating function
    use crate::series::ExactSeries;
    let poly = |v: &[i64]| {
        let mut c = vec![<BigRational as Zero>::zero(); order + 1];
        for (i, x) in v.iter().enumerate() {
            c[i] = BigRational::from_integer((*x).into());
        }
        ExactSeries::from_integer_coeffs(c)
    };
    let gf = poly(&[0, 1]).mul(
        &poly(&[2, -1])
            .mul(&poly(&[1, -1]).sqrt().expect("square constant"))
            .reciprocal()
            .expect("unit constant"),
    );
    (0..=order).all(|n| gf.coeff(n) == &t[n])
}

/// `S_2` reconstructed from `S_2(n+1) - S_2(n) - (2n+1)/4 S_0(n) = -T(n+1)`
/// (seeded `S_2(0) = 0`) against direct moment sums, numerically with the
/// certified `A(n;m)` values.
pub fn verify_s2_reconstruction(ev: &ANmEvaluator, n_max: usize) -> Result<bool> {
    let ctx = ev.ctx.clone();
    let s0 = y_coeffs(n_max + 1);
    let t = t_coeffs(n_max + 1);
    let mut s2 = PiQuadratic::zero();
    let tol = ctx.pow10(-((ctx.digits() - 8) as i64));
    for n in 0..=n_max {
        // direct moment sum at this n
        let mut direct = ctx.zero();
        for m in 0..=n {
            let v = ev.a_nm(n, m)?;
            direct = &direct + &v.value.mul_i64((m * m) as i64);
        }
        if (&direct - &s2.to_real(&ctx)).abs() > tol {
            return Ok(false);
        }
        // step the recursion
        s2 = s2
            .add(&s0[n].scale(&rat(2 * n as i64 + 1, 4)))
            .sub(&PiQuadratic::from_rational(t[n + 1].clone()));
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// End-to-end validation of the double-sum representation
// ---------------------------------------------------------------------------

/// The three routes to `Y(h)` compared at one point: direct 2-D quadrature
/// of the `(u,v)` integral, the triple sum with certified tails, and the
/// recursion-generated series.
#[derive(Clone, Debug)]
pub struct Eq1Report {
    pub quadrature: BigReal,
    pub triple_sum: BigReal,
    pub series: BigReal,
    pub max_delta: BigReal,
}

/// Direct nested tanh-sinh quadrature of
/// `Y(h) = double integral over 0<u<v<1 of
///  [u v (1-u)(1-v)(1-u h)(1-(1-v) h)]^{-1/2}`.
pub fn y_quadrature(h: &BigReal, target_digits: u32) -> Result<BigReal> {
    let ctx = h.ctx().clone();
    if !(h.is_positive() && *h < ctx.one()) {
        return Err(MagError::Domain("Y(h) quadrature needs 0 < h < 1".into()));
    }
    let rule = TanhSinhRule::new(&ctx);
    let one = ctx.one();
    rule.integrate(&ctx.zero(), &one, target_digits + 2, &mut |_v, da, db| {
        // da = v, db = 1 - v
        let wv = &(da * db) * &(&one - &(db * h));
        let inner = rule
            .integrate_from(&ctx.zero(), da, target_digits + 4, &mut |u, da_in, db_in| {
                // 1 - u = (1 - v) + (v - u), both from stable endpoint distances
                let one_m_u = db + db_in;
                let wu = &(da_in * &one_m_u) * &(&one - &(u * h));
                wu.sqrt().recip()
            })
            .expect("inner quadrature");
        &inner / &wv.sqrt()
    })
}

/// Three-way agreement at one `h`, to roughly `target_digits`.
pub fn verify_eq1_end_to_end(h: &BigReal, target_digits: u32) -> Result<Eq1Report> {
    let ctx = h.ctx().clone();
    let quadrature = y_quadrature(h, target_digits)?;
    // series from the recursion
    let hf = h.to_f64();
    let n_terms =
        ((target_digits as f64 + 6.0) * std::f64::consts::LN_10 / -hf.ln()).ceil() as usize + 4;
    let s0 = y_coeffs(n_terms);
    let mut series = ctx.zero();
    let mut hp = ctx.one();
    for s in &s0 {
        series = &series + &(&s.to_real(&ctx) * &hp);
        hp = &hp * h;
    }
    // triple sum: sum_N h^N sum_m A(N;m) with certified tails
    let ev = ANmEvaluator::new(&ctx);
    let mut triple = ctx.zero();
    let mut hp = ctx.one();
    for n in 0..=n_terms {
        let mut row = ctx.zero();
        for m in 0..=n {
            row = &row + &ev.a_nm(n, m)?.value;
        }
        triple = &triple + &(&row * &hp);
        hp = &hp * h;
    }
    let d1 = (&quadrature - &triple).abs();
    let d2 = (&quadrature - &series).abs();
    let d3 = (&triple - &series).abs();
    let mut max_delta = d1;
    for d in [d2, d3] {
        if d > max_delta {
            max_delta = d;
        }
    }
    Ok(Eq1Report { quadrature, triple_sum: triple, series, max_delta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::PrecisionContext;

    fn ctx(d: u32) -> Ctx {
        PrecisionContext::new(d).unwrap()
    }

    #[test]
    fn telescoping_smallest_and_grid() {
        assert!(telescoping_certificate(0, 0, 0));
        for n in 0..=8 {
            for m in 0..=n {
                for k in 0..=8 {
                    assert!(telescoping_certificate(n, m, k), "failed at ({n},{m},{k})");
                }
            }
        }
    }

    #[test]
    fn telescoping_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let n = rng.gen_range(0..=50usize);
            let m = rng.gen_range(0..=n);
            let k = rng.gen_range(0..=50usize);
            assert!(telescoping_certificate(n, m, k), "failed at ({n},{m},{k})");
        }
    }

    #[test]
    fn term_symmetry_and_positivity() {
        for n in 0..=7 {
            for m in 0..=n {
                for k in 0..=5 {
                    let a = a_term(n, m, k);
                    assert!(a.is_positive());
                    assert_eq!(a, a_term(n, n - m, k));
                }
            }
        }
    }

    #[test]
    fn c_term_closed_form() {
        // c(n;m) = (-1)^m (1/2 - m)_n / n!
        for n in 0..=20 {
            for m in 0..=n + 2 {
                let direct = c_term(n.max(m), m.min(n.max(m)));
                let _ = direct;
            }
        }
        for n in 0..=20usize {
            for m in 0..=n {
                let alt = poch(&rat(1 - 2 * m as i64, 2), n)
                    / BigRational::from_integer(factorial(n));
                let alt = if m % 2 == 1 { -alt } else { alt };
                assert_eq!(c_term(n, m), alt, "({n},{m})");
            }
        }
    }

    #[test]
    fn a00_is_pi_squared_over_two() {
        let c = ctx(35);
        let v = a_nm(&c, 0, 0).unwrap();
        let expect = c.pi().square().div_i64(2);
        assert!((&v.value - &expect).abs() < c.pow10(-30));
        assert!(v.bound < c.pow10(-30));
    }

    #[test]
    fn a_nm_symmetry_numeric() {
        let c = ctx(35);
        let ev = ANmEvaluator::new(&c);
        let a = ev.a_nm(7, 2).unwrap();
        let b = ev.a_nm(7, 5).unwrap();
        assert!((&a.value - &b.value).abs() < c.pow10(-30));
    }

    #[test]
    fn a_nm_row_matches_s0() {
        let c = ctx(35);
        let ev = ANmEvaluator::new(&c);
        let s0 = y_coeffs(5);
        let mut row = c.zero();
        for m in 0..=5 {
            row = &row + &ev.a_nm(5, m).unwrap().value;
        }
        assert!((&row - &s0[5].to_real(&c)).abs() < c.pow10(-30));
    }

    #[test]
    fn r3_small_grid() {
        let c = ctx(35);
        let ev = ANmEvaluator::new(&c);
        let chk = verify_r3(&ev, 0, 1).unwrap();
        assert!(chk.passes && chk.residual < c.pow10(-30));
        for n in 0..=10 {
            for m in 1..=n + 1 {
                assert!(verify_r3(&ev, n, m).unwrap().passes, "R3 failed at ({n},{m})");
            }
        }
        assert!(verify_r3(&ev, 3, 0).is_err());
    }

    #[test]
    fn boundary_convention_m_equals_n_plus_one() {
        // A(n; n+1) does not occur: the m = n+1 instance of R3 relates
        // A(n+1; n+1) to A(n; n), both within range
        let c = ctx(30);
        let ev = ANmEvaluator::new(&c);
        assert!(verify_r3(&ev, 4, 5).unwrap().passes);
    }

    #[test]
    fn ir_exact_sweep() {
        for n in 1..=50 {
            assert!(verify_ir(n), "IR failed at n = {n}");
            assert!(verify_ir_pi2_part(n), "homogeneous part failed at n = {n}");
        }
        assert!(!verify_ir(0));
    }

    #[test]
    fn t_three_ways() {
        assert!(verify_t_recursion(40));
        let t = t_coeffs(3);
        assert_eq!(t[0], <BigRational as Zero>::zero());
        assert_eq!(t[1], rat(1, 2));
        // 2T(3) - T(2) = (1/2)_2/2!
        assert_eq!(&t[3] * rat(2, 1) - &t[2], rat(3, 8));
    }

    #[test]
    fn s2_reconstruction() {
        let c = ctx(30);
        let ev = ANmEvaluator::new(&c);
        assert!(verify_s2_reconstruction(&ev, 8).unwrap());
    }

    #[test]
    fn eq1_three_routes_agree() {
        let c = ctx(30);
        let h = c.from_dec_str("0.5");
        let rep = verify_eq1_end_to_end(&h, 21).unwrap();
        assert!(rep.max_delta < c.pow10(-20), "max delta {:?}", rep.max_delta);
    }

    #[test]
    fn y_quadrature_h_near_zero_limit() {
        // Y(h) -> pi^2/2 as h -> 0+
        let c = ctx(25);
        let v = y_quadrature(&c.from_dec_str("0.0001"), 12).unwrap();
        let expect = c.pi().square().div_i64(2);
        assert!((&v - &expect).abs() < c.from_f64(1e-3));
    }
}
