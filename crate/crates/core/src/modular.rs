//! Eta quotients, the weight-4 form `phi(tau)`, its Fourier coefficients
//! `A(n)`, and the CM special values.
//!
//! The Fourier table is computed in pure integer series arithmetic: with
//! `u = prod_{j odd} (1 - q^j)^{-24}` the eta quotient
//! `psi = 64 (eta_2/eta_1)^24` equals `64 q u`, the inhomogeneity is
//! `R = (64qu - 1)/(64qu + 1)` (an integer series), and
//! `phi / q^{1/2} = (1/2) P R` with `P = prod (1-q^k)^4 (1-q^{2k})^4`.
//! Integrality of `A(n)` is then a divisibility check of an exact integer
//! by `2n+1`, never a floating-point judgement.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Zero};
use sha2::{Digest, Sha256};

use crate::error::{MagError, Result};
use crate::precision::{BigComplex, BigReal, Ctx, RealOps};
use crate::qsqrt2::QSqrt2;
use crate::series::ExactSeries;

// ---------------------------------------------------------------------------
// Eta q-expansions
// ---------------------------------------------------------------------------

/// Coefficients of `prod_{k>=1} (1 - q^{mk})` to the given order.
fn euler_product(m: usize, order: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); order + 1];
    v[0] = BigInt::one();
    let mut j = m;
    while j <= order {
        for i in (j..=order).rev() {
            let t = v[i - j].clone();
            v[i] -= t;
        }
        j += m;
    }
    v
}

/// Coefficients of `prod_{j odd} (1 - q^j)` to the given order.
fn euler_product_odd(order: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); order + 1];
    v[0] = BigInt::one();
    let mut j = 1;
    while j <= order {
        for i in (j..=order).rev() {
            let t = v[i - j].clone();
            v[i] -= t;
        }
        j += 2;
    }
    v
}

/// `eta_m = q^{m/24} prod (1 - q^{mk})` as an exact integer series with
/// fractional prefactor `m/24`.
pub fn eta_qexp(m: u32, order: usize) -> ExactSeries<BigInt> {
    assert!(m >= 1, "eta level must be positive");
    ExactSeries::from_coeffs(
        BigRational::new((m as i64).into(), 24.into()),
        euler_product(m as usize, order),
    )
}

/// A formal product `prod eta_{m_i}^{e_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaQuotient {
    factors: Vec<(u32, i32)>,
}

impl EtaQuotient {
    pub fn new(factors: &[(u32, i32)]) -> Self {
        EtaQuotient { factors: factors.to_vec() }
    }

    pub fn factors(&self) -> &[(u32, i32)] {
        &self.factors
    }

    /// `sum m_i e_i / 24`, the exponent of the leading `q` power.
    pub fn prefactor(&self) -> BigRational {
        let mut s = <BigRational as Zero>::zero();
        for (m, e) in &self.factors {
            s += BigRational::new(((*m as i64) * (*e as i64)).into(), 24.into());
        }
        s
    }

    /// The q-expansion; coefficients are exact integers because every
    /// denominator eta has unit constant term.
    pub fn qexp(&self, order: usize) -> ExactSeries<BigInt> {
        let mut acc = ExactSeries::<BigInt>::one(order);
        for (m, e) in &self.factors {
            let base = ExactSeries::from_integer_coeffs(euler_product(*m as usize, order));
            let p = base.pow(e.unsigned_abs());
            if *e >= 0 {
                acc = acc.mul(&p);
            } else {
                acc = acc.mul(&p.reciprocal().expect("eta product has unit constant term"));
            }
        }
        ExactSeries::from_coeffs(self.prefactor(), acc.coeffs().to_vec())
    }
}

// ---------------------------------------------------------------------------
// f^2 and psi as q-series
// ---------------------------------------------------------------------------

/// `f^2 = 16 (eta_1 eta_4^2 / eta_2^3)^8`, returned as `q * (integer series)`
/// folded into a plain series (prefactor exponent 1 absorbed).
///
/// Asserts the identity with the second expression
/// `1 - (eta_1^2 eta_4 / eta_2^3)^8` through the requested order.
pub fn f_squared_qexp(order: usize) -> Result<ExactSeries<BigInt>> {
    if order < 1 {
        return Err(MagError::InsufficientOrder { need: 1, have: order });
    }
    let x = EtaQuotient::new(&[(1, 8), (4, 16), (2, -24)]).qexp(order);
    debug_assert_eq!(x.prefactor(), &BigRational::one());
    let f2 = x.absorb_integer_prefactor()?.scale(&BigInt::from(16));
    let y = EtaQuotient::new(&[(1, 16), (4, 8), (2, -24)]).qexp(order);
    debug_assert!(Zero::is_zero(y.prefactor()));
    let alt = ExactSeries::<BigInt>::one(order)
        .sub(&ExactSeries::from_integer_coeffs(y.coeffs().to_vec()));
    if f2 != alt {
        return Err(MagError::ConjectureViolation(
            "the two eta expressions for f^2 disagree".into(),
        ));
    }
    Ok(f2)
}

/// `psi = 64 (eta_2/eta_1)^24 = 64 q / prod_{j odd} (1-q^j)^24` as a plain
/// integer series (the factor `64 q` absorbed into the coefficients).
pub fn psi_qexp(order: usize) -> ExactSeries<BigInt> {
    let base = ExactSeries::from_integer_coeffs(euler_product_odd(order));
    let u = base.pow(24).reciprocal().expect("unit constant term");
    u.shift_up(1).scale(&BigInt::from(64))
}

// ---------------------------------------------------------------------------
// Pointwise eta and phi
// ---------------------------------------------------------------------------

/// `q = exp(2 pi i tau)` and `q^{1/2} = exp(pi i tau)` for `Im tau > 0`.
fn nome_pair(tau: &BigComplex) -> Result<(BigComplex, BigComplex)> {
    let ctx = tau.re.ctx().clone();
    if !tau.im.is_positive() {
        return Err(MagError::Domain("tau must lie in the upper half plane".into()));
    }
    let pi = ctx.pi();
    let half_arg = &pi * &tau.re;
    let half_mod = (-&(&pi * &tau.im)).exp();
    let qh = BigComplex::new(&half_mod * &half_arg.cos(), &half_mod * &half_arg.sin());
    Ok((qh.mul(&qh), qh))
}

fn eval_poly_complex(coeffs: &[BigInt], q: &BigComplex, ctx: &Ctx) -> BigComplex {
    let mut acc = BigComplex::zero(ctx);
    for c in coeffs.iter().rev() {
        acc = acc.mul(q);
        if !Zero::is_zero(c) {
            acc.re = &acc.re + &ctx.from_bigint(c);
        }
    }
    acc
}

fn terms_for(ctx: &Ctx, im_tau: f64) -> Result<usize> {
    let d = (ctx.digits() + ctx.guard()) as f64;
    let n = (d + 8.0) * std::f64::consts::LN_10 / (2.0 * std::f64::consts::PI * im_tau);
    if !n.is_finite() || n > 200_000.0 {
        return Err(MagError::Domain(format!(
            "Im tau = {im_tau} too small for direct series evaluation"
        )));
    }
    Ok(n.ceil() as usize + 8)
}

/// Pointwise `phi(tau)` by direct eta products, without any argument
/// reduction.  The transformation checks use this form so they do not assume
/// the identities they test.
pub fn phi_eval_raw(tau: &BigComplex) -> Result<BigComplex> {
    let ctx = tau.re.ctx().clone();
    let n = terms_for(&ctx, tau.im.to_f64())?;
    let (q, qh) = nome_pair(tau)?;
    let e1 = euler_product(1, n);
    let p1 = eval_poly_complex(&e1, &q, &ctx);
    let p2 = eval_poly_complex(&e1, &q.mul(&q), &ctx);
    let p1_24 = p1.powi(24);
    let p2_24 = p2.powi(24).mul(&q).scale(&ctx.from_i64(64));
    let num = p2_24.sub(&p1_24);
    let den = p2_24.add(&p1_24);
    // |psi + 1| in disguise: vanishes exactly on the pole orbit of (1+i)/2
    let rel = &den.abs() / &p1_24.abs();
    if rel < ctx.pow10(-((ctx.digits() / 2) as i64)) {
        return Err(MagError::PoleProximity(rel.to_decimal(6)));
    }
    let pref = qh.mul(&p1.mul(&p2).powi(4));
    Ok(pref.mul(&num.div(&den)).scale(&ctx.one().div_i64(2)))
}

/// Pointwise `psi(tau)` by direct eta products.
pub fn psi_eval(tau: &BigComplex) -> Result<BigComplex> {
    let ctx = tau.re.ctx().clone();
    let n = terms_for(&ctx, tau.im.to_f64())?;
    let (q, _) = nome_pair(tau)?;
    let e1 = euler_product(1, n);
    let p1 = eval_poly_complex(&e1, &q, &ctx);
    let p2 = eval_poly_complex(&e1, &q.mul(&q), &ctx);
    Ok(p2.div(&p1).powi(24).mul(&q).scale(&ctx.from_i64(64)))
}

/// Pointwise `phi(tau)` with argument reduction under `tau -> tau + 1` and
/// `tau -> -1/(2 tau)`, applying the corresponding transformation factors,
/// so the eta series are always summed at `|q| <= e^{-pi}` up to pole
/// proximity.
pub fn phi_eval(tau: &BigComplex) -> Result<BigComplex> {
    let ctx = tau.re.ctx().clone();
    if !tau.im.is_positive() {
        return Err(MagError::Domain("tau must lie in the upper half plane".into()));
    }
    let mut t = tau.clone();
    let mut factor = BigComplex::one(&ctx);
    let half = ctx.one().div_i64(2);
    for _ in 0..256 {
        // shift the real part into [-1/2, 1/2); phi(tau) = (-1)^k phi(tau - k)
        let k = (&t.re + &half).floor();
        if !k.is_zero() {
            t.re = &t.re - &k;
            let ki = k.to_f64() as i64;
            if ki.rem_euclid(2) != 0 {
                factor = factor.neg();
            }
        }
        // |tau|^2 < 1/2: apply tau -> -1/(2 tau); phi(tau) = -phi(-1/(2 tau))/(4 tau^4)
        let n2 = t.norm_sqr();
        if n2 < half {
            let scale = t.powi(4).scale(&ctx.from_i64(4));
            factor = factor.div(&scale).neg();
            let inv = t.recip();
            t = BigComplex::new(-&inv.re.div_i64(2), -&inv.im.div_i64(2));
        } else {
            return Ok(factor.mul(&phi_eval_raw(&t)?));
        }
    }
    Err(MagError::Domain("argument reduction for phi did not terminate".into()))
}

/// Residuals of the two transformation identities at one point:
/// `phi(tau+1) = -phi(tau) = (1/(4 tau^4)) phi(-1/(2 tau))`.
#[derive(Clone, Debug)]
pub struct Lemma2Report {
    pub shift_delta: BigReal,
    pub inversion_delta: BigReal,
    pub scale: BigReal,
}

impl Lemma2Report {
    pub fn max_delta(&self) -> BigReal {
        if self.shift_delta > self.inversion_delta {
            self.shift_delta.clone()
        } else {
            self.inversion_delta.clone()
        }
    }
}

/// Checks both Lemma-2 identities at `tau` using raw (unreduced) evaluation
/// at each of the three points.
pub fn verify_lemma2(tau: &BigComplex) -> Result<Lemma2Report> {
    let ctx = tau.re.ctx().clone();
    let one = BigComplex::one(&ctx);
    let shifted = phi_eval_raw(&tau.add(&one))?;
    let base = phi_eval_raw(tau)?;
    let inv = tau.recip();
    let inv_pt = BigComplex::new(-&inv.re.div_i64(2), -&inv.im.div_i64(2));
    let inverted = phi_eval_raw(&inv_pt)?;
    let quarter_t4 = tau.powi(4).scale(&ctx.from_i64(4));
    let shift_delta = shifted.add(&base).abs();
    let inversion_delta = base.neg().sub(&inverted.div(&quarter_t4)).abs();
    Ok(Lemma2Report { shift_delta, inversion_delta, scale: base.abs() })
}

// ---------------------------------------------------------------------------
// Fourier coefficients A(n)
// ---------------------------------------------------------------------------

/// Exact Fourier data of `phi = -sum (n + 1/2) A(n) q^{n+1/2}`.
#[derive(Clone, Debug)]
pub struct FourierTable {
    a: Vec<BigInt>,
    violations: Vec<usize>,
}

impl FourierTable {
    pub fn n_max(&self) -> usize {
        self.a.len() - 1
    }

    pub fn a(&self, n: usize) -> &BigInt {
        &self.a[n]
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.a
    }

    /// Indices where the divisibility `(2n+1) | coefficient` failed; empty
    /// everywhere this crate has looked (the integrality conjecture holds
    /// at this scale).
    pub fn violations(&self) -> &[usize] {
        &self.violations
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,A(n)\n");
        for (n, a) in self.a.iter().enumerate() {
            s.push_str(&format!("{n},{a}\n"));
        }
        s
    }

    pub fn to_json(&self) -> String {
        let csv = self.to_csv();
        let checksum = hex_digest(csv.as_bytes());
        let obj = serde_json::json!({
            "truncation": self.n_max(),
            "checksum_sha256": checksum,
            "integrality_violations": self.violations,
            "a": self.a.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        });
        serde_json::to_string_pretty(&obj).expect("fourier table serialization")
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Builds `A(0..order)` in exact integer arithmetic.
///
/// Non-integral entries are recorded as violations (with the truncated
/// quotient stored) rather than aborting the run.
pub fn phi_qexp(order: usize) -> Result<FourierTable> {
    if order < 1 {
        return Err(MagError::InsufficientOrder { need: 1, have: order });
    }
    let u = ExactSeries::from_integer_coeffs(euler_product_odd(order))
        .pow(24)
        .reciprocal()
        .expect("unit constant term");
    let qu64 = u.shift_up(1).scale(&BigInt::from(64));
    let one = ExactSeries::<BigInt>::one(order);
    let den = qu64.add(&one).reciprocal().expect("unit constant term");
    let num = qu64.sub(&one);
    let r = num.mul(&den);
    let e1 = ExactSeries::from_integer_coeffs(euler_product(1, order));
    let e2 = ExactSeries::from_integer_coeffs(euler_product(2, order));
    let p = e1.mul(&e2).pow(4);
    let g = p.mul(&r);
    let mut a = Vec::with_capacity(order + 1);
    let mut violations = Vec::new();
    for n in 0..=order {
        let m = 2 * n as i64 + 1;
        let (q, rem) = (-g.coeff(n)).div_rem(&BigInt::from(m));
        if !Zero::is_zero(&rem) {
            violations.push(n);
        }
        a.push(q);
    }
    Ok(FourierTable { a, violations })
}

/// `pi^2/8 - sum A(n) q^{n+1/2}/(n+1/2)^2`, which equals
/// `agm(1+f,1-f)^2 I2(f)/(1+f)` at the matching nome.
///
/// Fails with a truncation error when the table is too short for the
/// requested precision at this `q` (tail estimated from
/// `|A(n)| ~ (1/2) e^{(n+1/2) pi}`).
pub fn triple_sum_eval(q: &BigReal, table: &FourierTable) -> Result<BigReal> {
    let ctx = q.ctx().clone();
    if !q.is_positive() || *q >= ctx.one() {
        return Err(MagError::Domain("triple sum requires 0 < q < 1".into()));
    }
    let n = table.n_max();
    // tail bound: (1/2) e^{(n+3/2) pi} q^{n+3/2} / (n+3/2)^2
    let lnq = q.ln();
    let ln_tail = &(&(&ctx.pi() + &lnq) * &ctx.from_f64(n as f64 + 1.5))
        - &ctx.from_f64(2.0 * (n as f64 + 1.5).ln() + std::f64::consts::LN_2);
    let limit = ctx.pow10(-((ctx.digits() + 2) as i64)).ln();
    if ln_tail > limit {
        return Err(MagError::Truncation(format!(
            "table up to n = {n} cannot reach {} digits at this q",
            ctx.digits()
        )));
    }
    let qh = q.sqrt();
    let mut qpow = qh.clone();
    let mut sum = ctx.zero();
    for (k, a) in table.coeffs().iter().enumerate() {
        let denom = ctx.from_i64(2 * k as i64 + 1).square().div_i64(4);
        sum = &sum + &(&ctx.from_bigint(a) * &(&qpow / &denom));
        qpow = &qpow * q;
    }
    Ok(&ctx.pi().square().div_i64(8) - &sum)
}

// ---------------------------------------------------------------------------
// j-invariant and the CM table
// ---------------------------------------------------------------------------

/// Klein's invariant in the eta-quotient variable: `j = 64 (1 + 4 psi)^3 / psi`.
pub fn j_invariant(psi: &QSqrt2) -> Result<QSqrt2> {
    if psi.is_zero() {
        return Err(MagError::Domain("j has a pole at psi = 0".into()));
    }
    let t = QSqrt2::one().add(&psi.scale(&BigRational::from_integer(4.into())));
    Ok(t.mul(&t).mul(&t).scale(&BigRational::from_integer(64.into())).div(psi))
}

/// The three exact factorisations of `j(psi) - j(CM point)`, verified as
/// polynomial identities in `psi`.
pub fn j_factorization_identities() -> bool {
    // coefficients of psi^0..psi^3 in 64 (1+4 psi)^3
    let j_num = vec![64i64, 768, 3072, 4096];
    // j - 12^3: 64 (1+psi)(1-8 psi)^2
    let f1: Vec<i64> =
        poly_mul(&poly_mul(&[1, 1], &[1, -8]), &[1, -8]).iter().map(|c| 64 * c).collect();
    let lhs1 = poly_sub(&j_num, &[0, 1728]);
    // j - 20^3: 64 (1-psi)(1-112 psi - 64 psi^2)
    let f2: Vec<i64> = poly_mul(&[1, -1], &[1, -112, -64]).iter().map(|c| 64 * c).collect();
    let lhs2 = poly_sub(&j_num, &[0, 8000]);
    // j - 66^3: 8 (8-psi)(1-4480 psi - 512 psi^2)
    let f3: Vec<i64> = poly_mul(&[8, -1], &[1, -4480, -512]).iter().map(|c| 8 * c).collect();
    let lhs3 = poly_sub(&j_num, &[0, 287_496]);
    lhs1 == f1 && lhs2 == f2 && lhs3 == f3
}

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    let n = a.len().max(b.len());
    (0..n).map(|i| a.get(i).copied().unwrap_or(0) - b.get(i).copied().unwrap_or(0)).collect()
}

/// One row of the CM table: `psi_k = psi(2^{(k-1)/2} i)` with its modulus
/// `f_k` and inhomogeneity value `R(f_k) = (psi_k - 1)/(psi_k + 1)`.
#[derive(Clone, Debug)]
pub struct CMRecord {
    pub k: i32,
    pub psi: QSqrt2,
    /// Exact value where `f_k` lies in `Q[sqrt2]` (k = 0, +-1); the other
    /// rows are algebraic of higher degree and carry numeric values only.
    pub f_exact: Option<QSqrt2>,
    pub r: QSqrt2,
}

impl CMRecord {
    /// `tau = 2^{(k-1)/2} i` for this row.
    pub fn tau(&self, ctx: &Ctx) -> BigComplex {
        let e = self.k - 1;
        let mut im = ctx.one();
        for _ in 0..(e.abs() / 2) {
            im = if e > 0 { im.mul_i64(2) } else { im.div_i64(2) };
        }
        if e.rem_euclid(2) != 0 {
            im = if e > 0 { &im * &ctx.sqrt2() } else { &im / &ctx.sqrt2() };
        }
        BigComplex::new(ctx.zero(), im)
    }

    /// Numeric `f_k = (sqrt(1 + psi_k) - 1)/sqrt(psi_k)`.
    pub fn f_value(&self, ctx: &Ctx) -> BigReal {
        let psi = self.psi.to_real(ctx);
        &(&(&ctx.one() + &psi).sqrt() - &ctx.one()) / &psi.sqrt()
    }
}

/// The seven CM rows with positive `psi(tau)` in `Q[sqrt2]`.
pub fn cm_table() -> Vec<CMRecord> {
    let r_of = |psi: &QSqrt2| psi.sub(&QSqrt2::one()).div(&psi.add(&QSqrt2::one()));
    let psi1 = QSqrt2::from_ints(1, 8, 0, 1);
    let psi2 = QSqrt2::from_ints(-7, 8, 5, 8); // f0^3/8 = (5 sqrt2 - 7)/8
    let psi3 = QSqrt2::from_ints(-35, 8, 99, 32); // sqrt8 psi2^2
    let f0 = QSqrt2::sqrt2_minus_one();
    let f1 = QSqrt2::from_ints(3, 1, -2, 1);
    let fm1 = QSqrt2::from_ints(0, 1, 1, 2); // 1/sqrt2
    let mut rows = Vec::new();
    for k in -3i32..=3 {
        let psi = match k.abs() {
            0 => QSqrt2::one(),
            1 => psi1.clone(),
            2 => psi2.clone(),
            _ => psi3.clone(),
        };
        let psi = if k < 0 { psi.inv() } else { psi };
        let f_exact = match k {
            0 => Some(f0.clone()),
            1 => Some(f1.clone()),
            -1 => Some(fm1.clone()),
            _ => None,
        };
        rows.push(CMRecord { k, r: r_of(&psi), psi, f_exact });
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::PrecisionContext;
    use crate::series::Coeff;

    fn ctx(d: u32) -> Ctx {
        PrecisionContext::new(d).unwrap()
    }

    #[test]
    fn eta_pentagonal_oracle() {
        // 1 - q - q^2 + q^5 + q^7 - q^12 - q^15 + ...
        let e = eta_qexp(1, 30);
        assert_eq!(e.prefactor(), &BigRational::new(1.into(), 24.into()));
        let mut expect = vec![0i64; 31];
        expect[0] = 1;
        for k in 1i64..6 {
            let s = if k % 2 == 0 { 1 } else { -1 };
            for g in [k * (3 * k - 1) / 2, k * (3 * k + 1) / 2] {
                if g <= 30 {
                    expect[g as usize] = s;
                }
            }
        }
        for (n, v) in expect.iter().enumerate() {
            assert_eq!(e.coeff(n), &BigInt::from(*v), "pentagonal mismatch at {n}");
        }
        assert_eq!(eta_qexp(2, 5).prefactor(), &BigRational::new(1.into(), 12.into()));
    }

    #[test]
    fn f_squared_dual_expressions() {
        let f2 = f_squared_qexp(120).unwrap();
        assert!(Coeff::is_zero(f2.coeff(0)));
        assert_eq!(f2.coeff(1), &BigInt::from(16));
    }

    #[test]
    fn psi_series_matches_eta_quotient_form() {
        let direct = psi_qexp(60);
        let quot = EtaQuotient::new(&[(2, 24), (1, -24)]).qexp(60);
        assert_eq!(quot.prefactor(), &<BigRational as One>::one());
        let shifted = quot.absorb_integer_prefactor().unwrap().scale(&BigInt::from(64));
        assert_eq!(direct, shifted);
        // integer coefficients after factoring 64 q
        assert!(direct
            .coeffs()
            .iter()
            .skip(1)
            .all(|c| Zero::is_zero(&c.mod_floor(&BigInt::from(64)))));
    }

    #[test]
    fn theta_log_f2_is_eta_quotient() {
        // (q d/dq) log(f^2) = (eta_1^2/eta_2)^4
        let order = 100;
        let f2 = f_squared_qexp(order).unwrap();
        // f^2 = 16 q F with F a unit series; theta log f^2 = 1 + theta(F)/F
        let f_unit = f2
            .shift_down(1)
            .unwrap()
            .map(|c| BigRational::from_integer(c / 16));
        let ratio = f_unit.theta(1).mul(&f_unit.reciprocal().unwrap());
        let lhs = ExactSeries::<BigRational>::one(order - 1).add(&ratio);
        let rhs = EtaQuotient::new(&[(1, 8), (2, -4)]).qexp(order - 1);
        assert!(Zero::is_zero(rhs.prefactor()));
        for n in 0..order - 1 {
            assert_eq!(
                lhs.coeff(n),
                &BigRational::from_integer(rhs.coeff(n).clone()),
                "mismatch at {n}"
            );
        }
    }

    #[test]
    fn fourier_table_first_coefficients() {
        let t = phi_qexp(12).unwrap();
        let expect: [i64; 10] = [
            1,
            -44,
            1126,
            -27096,
            640909,
            -15036548,
            351245038,
            -8183857544,
            190367634194,
            -4423279591132,
        ];
        for (n, e) in expect.iter().enumerate() {
            assert_eq!(t.a(n), &BigInt::from(*e), "A({n})");
        }
        assert!(t.violations().is_empty());
    }

    #[test]
    fn fourier_table_export_formats() {
        let t = phi_qexp(3).unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("n,A(n)\n0,1\n1,-44\n"));
        let json = t.to_json();
        assert!(json.contains("\"truncation\": 3"));
        assert!(json.contains("checksum_sha256"));
    }

    #[test]
    fn triple_sum_identities() {
        let c = ctx(40);
        let t = phi_qexp(60).unwrap();
        let q = crate::precision::nome_from_f(&c.from_dec_str("0.2")).unwrap();
        let lhs = triple_sum_eval(&q, &t).unwrap();
        let f = c.from_dec_str("0.2");
        let m = crate::precision::agm(&(&c.one() + &f), &(&c.one() - &f)).unwrap();
        let rhs = &m.square() * &(&crate::integral::i2_eval(&f).unwrap() / &(&c.one() + &f));
        assert!((&lhs - &rhs).abs() < c.pow10(-35), "delta {:?}", (&lhs - &rhs).abs());
        // short table cannot reach the tolerance
        let t3 = phi_qexp(3).unwrap();
        assert!(matches!(triple_sum_eval(&q, &t3), Err(MagError::Truncation(_))));
    }

    #[test]
    fn psi_special_values_numeric() {
        let c = ctx(45);
        let i = BigComplex::new(c.zero(), c.one());
        let v = psi_eval(&i).unwrap();
        assert!((&v.re - &c.one().div_i64(8)).abs() < c.pow10(-40));
        assert!(v.im.abs() < c.pow10(-40));
        let isq = BigComplex::new(c.zero(), &c.one() / &c.sqrt2());
        let v = psi_eval(&isq).unwrap();
        assert!((&v.re - &c.one()).abs() < c.pow10(-40));
        // psi(-1/(2 tau)) = 1/psi(tau) at a generic point
        let tau = BigComplex::new(c.from_dec_str("0.21"), c.from_dec_str("0.83"));
        let inv = tau.recip();
        let inv_pt = BigComplex::new(-&inv.re.div_i64(2), -&inv.im.div_i64(2));
        let a = psi_eval(&tau).unwrap();
        let b = psi_eval(&inv_pt).unwrap();
        let prod = a.mul(&b);
        assert!((&prod.re - &c.one()).abs() < c.pow10(-38));
        assert!(prod.im.abs() < c.pow10(-38));
    }

    #[test]
    fn j_invariant_cm_values() {
        let psi1 = QSqrt2::from_ints(1, 8, 0, 1);
        assert_eq!(j_invariant(&psi1).unwrap(), QSqrt2::from_int(1728));
        let psi2 = QSqrt2::from_ints(-7, 8, 5, 8);
        assert_eq!(j_invariant(&psi2).unwrap(), QSqrt2::from_int(8000));
        assert!(j_invariant(&QSqrt2::zero()).is_err());
        assert!(j_factorization_identities());
    }

    #[test]
    fn cm_table_exact_relations() {
        let rows = cm_table();
        assert_eq!(rows.len(), 7);
        let by_k = |k: i32| rows.iter().find(|r| r.k == k).unwrap();
        for k in 1..=3 {
            assert_eq!(by_k(-k).psi, by_k(k).psi.inv());
        }
        assert_eq!(by_k(1).r, QSqrt2::from_ints(-7, 9, 0, 1));
        assert_eq!(by_k(2).r, QSqrt2::from_ints(65, 49, -80, 49));
        assert_eq!(by_k(3).r, QSqrt2::from_ints(57, 441, -352, 441));
        // psi_3 is the positive root of 1 - 4480 psi - 512 psi^2
        let p3 = &by_k(3).psi;
        assert!(p3.is_positive());
        let quad = QSqrt2::one()
            .sub(&p3.scale(&BigRational::from_integer(4480.into())))
            .sub(&p3.square().scale(&BigRational::from_integer(512.into())));
        assert!(quad.is_zero());
        // f_{-1} = (1 - f_1)/(1 + f_1) and f_1 = 3 - 2 sqrt2
        let f1 = by_k(1).f_exact.clone().unwrap();
        assert_eq!(f1, QSqrt2::from_ints(3, 1, -2, 1));
        let fm1 = QSqrt2::one().sub(&f1).div(&QSqrt2::one().add(&f1));
        assert_eq!(fm1, by_k(-1).f_exact.clone().unwrap());
    }

    #[test]
    fn cm_table_numeric_psi_and_f() {
        let c = ctx(45);
        for row in cm_table() {
            let tau = row.tau(&c);
            let got = psi_eval(&tau).unwrap();
            let want = row.psi.to_real(&c);
            assert!((&got.re - &want).abs() < c.pow10(-38), "psi mismatch at k={}", row.k);
            assert!(got.im.abs() < c.pow10(-38));
            if let Some(fe) = &row.f_exact {
                assert!((&row.f_value(&c) - &fe.to_real(&c)).abs() < c.pow10(-40));
            }
            // R(f_k) = 2 (2 f/(1+f^2))^2 - 1 numerically
            let f = row.f_value(&c);
            let r_num =
                &(&f.mul_i64(2) / &(&c.one() + &f.square())).square().mul_i64(2) - &c.one();
            assert!((&r_num - &row.r.to_real(&c)).abs() < c.pow10(-38), "R mismatch at k={}", row.k);
        }
    }

    #[test]
    fn lemma2_at_generic_point() {
        let c = ctx(50);
        let tau = BigComplex::new(c.from_dec_str("0.3"), c.from_dec_str("0.8"));
        let rep = verify_lemma2(&tau).unwrap();
        assert!(rep.max_delta() < c.pow10(-40), "delta {:?}", rep.max_delta());
    }

    #[test]
    fn phi_special_ratios_and_zero() {
        let c = ctx(45);
        let i = BigComplex::new(c.zero(), c.one());
        let phi_i = phi_eval_raw(&i).unwrap();
        // phi(i) = (-7/9) Gamma(1/4)^8 / (2^{21/2} pi^6)
        let g = crate::precision::gamma_quarter(&c);
        let expect = &g.powi(8).mul_i64(-7).div_i64(9)
            / &(&(&c.from_i64(1 << 10) * &c.sqrt2()) * &c.pi().powi(6));
        assert!((&phi_i.re - &expect).abs() < c.pow10(-38));
        assert!(phi_i.im.abs() < c.pow10(-38));
        // phi(i) = -1/4 phi(i/2)
        let phi_i2 = phi_eval_raw(&BigComplex::new(c.zero(), c.one().div_i64(2))).unwrap();
        assert!((&phi_i.re - &(-&phi_i2.re.div_i64(4))).abs() < c.pow10(-38));
        // phi(2i) = -1/64 phi(i/4)
        let phi_2i = phi_eval_raw(&BigComplex::new(c.zero(), c.from_i64(2))).unwrap();
        let phi_i4 = phi_eval_raw(&BigComplex::new(c.zero(), c.one().div_i64(4))).unwrap();
        assert!((&phi_2i.re - &(-&phi_i4.re.div_i64(64))).abs() < c.pow10(-36));
        // phi(i/sqrt2) = 0
        let z = phi_eval_raw(&BigComplex::new(c.zero(), &c.one() / &c.sqrt2())).unwrap();
        assert!(z.abs() < c.pow10(-40));
        // reduced evaluation agrees with raw at a shifted point
        let tau = BigComplex::new(c.from_dec_str("2.3"), c.from_dec_str("0.9"));
        let a = phi_eval(&tau).unwrap();
        let b = phi_eval_raw(&tau).unwrap();
        assert!(a.sub(&b).abs() < c.pow10(-38));
        // reduction reaches small-|tau| points the raw series cannot
        let tiny = BigComplex::new(c.from_dec_str("0.002"), c.from_dec_str("0.004"));
        assert!(phi_eval(&tiny).is_ok());
    }

    #[test]
    fn phi_qexp_pointwise_consistency() {
        // phi(tau) from the Fourier table vs direct eta products
        let c = ctx(40);
        let tau = BigComplex::new(c.from_dec_str("0.1"), c.from_dec_str("0.9"));
        let table = phi_qexp(40).unwrap();
        let (q, qh) = nome_pair(&tau).unwrap();
        let mut sum = BigComplex::zero(&c);
        let mut qpow = qh;
        for (n, a) in table.coeffs().iter().enumerate() {
            let w = &c.from_i64(2 * n as i64 + 1).div_i64(2) * &c.from_bigint(a);
            sum = sum.add(&qpow.scale(&w));
            qpow = qpow.mul(&q);
        }
        let direct = phi_eval_raw(&tau).unwrap();
        let delta = direct.add(&sum).abs();
        assert!(delta < c.pow10(-30), "delta {:?}", delta);
    }
}
