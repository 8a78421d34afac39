//! The exponential asymptotic model for the Fourier coefficients `A(n)` and
//! the congruence arithmetic that locates the singularities driving it.
//!
//! The model is `2 (-1)^n A(n) = sum_m C(m,n) E((2n+1) pi/(2m))` over the
//! integers `m` whose prime factors are all `1 mod 4`, with
//! `E(x) = ((x-1)/x) e^x` and trigonometric coefficients produced by an
//! integer `r(m) < m/2`.  The integer is found by mapping the pole at
//! `(1+i)/2` around with explicit matrices `(a,b;c,d)`, `ad - bc = 1`,
//! `c` even, and the cosine-product identity tying the map images together
//! is checked exactly as a multiset identity on residues.

use std::collections::BTreeMap;

use num::rational::BigRational;
use serde::Serialize;

use crate::error::{MagError, Result};
use crate::modular::FourierTable;
use crate::precision::{BigReal, Ctx, RealOps};

/// `E(x) = ((x-1)/x) e^x` for `x > 0`.
pub fn growth_term(x: &BigReal) -> Result<BigReal> {
    if !x.is_positive() {
        return Err(MagError::Domain("E(x) requires x > 0".into()));
    }
    let ctx = x.ctx().clone();
    Ok(&(&(x - &ctx.one()) / x) * &x.exp())
}

/// `1` and every integer up to `limit` whose prime factors are all `1 mod 4`.
pub fn s_sequence(limit: u64) -> Vec<u64> {
    (1..=limit).filter(|&m| in_s(m)).collect()
}

pub(crate) fn in_s(m: u64) -> bool {
    let mut x = m;
    let mut p = 2u64;
    while p * p <= x {
        if x % p == 0 {
            if p % 4 != 1 {
                return false;
            }
            while x % p == 0 {
                x /= p;
            }
        }
        p += 1;
    }
    x == 1 || x % 4 == 1
}

fn prime_powers(m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut x = m;
    let mut p = 2u64;
    while p * p <= x {
        if x % p == 0 {
            let mut q = 1;
            while x % p == 0 {
                q *= p;
                x /= p;
            }
            out.push(q);
        }
        p += 1;
    }
    if x > 1 {
        out.push(x);
    }
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

/// The `2^{omega-1}` ways of writing `m` as a sum of coprime squares
/// `gamma^2 + delta^2` with `gamma` odd positive and `delta > 0`.
///
/// Brute force over `gamma <= sqrt(m)`; instant at this scale.
pub fn coprime_square_decompositions(m: u64) -> Result<Vec<(u64, u64)>> {
    if m <= 1 || !in_s(m) {
        return Err(MagError::Domain(format!(
            "{m} is not a sequence element greater than 1"
        )));
    }
    let mut out = Vec::new();
    let mut g = 1u64;
    while g * g < m {
        let rest = m - g * g;
        let d = rest.isqrt();
        if d * d == rest && g % 2 == 1 && d > 0 && gcd(g, d) == 1 {
            out.push((g, d));
        }
        g += 1;
    }
    let omega = prime_powers(m).len() as u32;
    if out.len() != (1usize << (omega - 1)) {
        return Err(MagError::Construction(format!(
            "expected {} decompositions of {m}, found {}",
            1u64 << (omega - 1),
            out.len()
        )));
    }
    Ok(out)
}

/// The image data of the pole `(1+i)/2` under one matrix of the even-`c`
/// Moebius group: the matrix entries, the new pole `(w+i)/(2m)`, and
/// `r = (m-w)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SingularityDatum {
    pub m: u64,
    pub gamma: u64,
    pub delta: i64,
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub w: u64,
    pub r: u64,
}

fn mod_inverse(a: i64, modulus: i64) -> Option<i64> {
    let (mut old_r, mut r) = (a.rem_euclid(modulus), modulus);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(modulus))
}

/// Builds the matrix for one signed decomposition: `c = 2 gamma`,
/// `d = delta - gamma`, `a` the unique odd positive inverse of `d` below
/// `c`, `b = (ad-1)/c`, and `w = (a+b)(c+d) + bd`.  Returns the datum only
/// when `w` is an odd positive integer below `m`, which happens for exactly
/// one of the two signs of `delta`.
pub fn locate_singularity(gamma: u64, delta: i64) -> Result<Option<SingularityDatum>> {
    if gamma % 2 == 0 || gcd(gamma, delta.unsigned_abs()) != 1 {
        return Err(MagError::Domain("decomposition needs odd gamma coprime to delta".into()));
    }
    let c = 2 * gamma as i64;
    let d = delta - gamma as i64;
    let a = mod_inverse(d, c)
        .ok_or_else(|| MagError::Construction(format!("no inverse of {d} modulo {c}")))?;
    debug_assert!(a % 2 == 1 && 0 < a && a < c);
    let b = (a * d - 1) / c;
    debug_assert_eq!(a * d - b * c, 1);
    let m = gamma * gamma + (delta * delta) as u64;
    let w = (a + b) * (c + d) + b * d;
    if w > 0 && (w as u64) < m && w % 2 == 1 {
        let w = w as u64;
        Ok(Some(SingularityDatum { m, gamma, delta, a, b, c, d, w, r: (m - w) / 2 }))
    } else {
        Ok(None)
    }
}

/// All singularity images for `m`, one per decomposition; checks the
/// "precisely one sign works" property.
pub fn singularities(m: u64) -> Result<Vec<SingularityDatum>> {
    let mut out = Vec::new();
    for (g, d) in coprime_square_decompositions(m)? {
        let hits: Vec<SingularityDatum> = [d as i64, -(d as i64)]
            .into_iter()
            .filter_map(|s| locate_singularity(g, s).transpose())
            .collect::<Result<_>>()?;
        if hits.len() != 1 {
            return Err(MagError::ConjectureViolation(format!(
                "decomposition ({g}, {d}) of {m} admits {} valid signs instead of 1",
                hits.len()
            )));
        }
        out.push(hits[0]);
    }
    Ok(out)
}

/// Exact check that the matrix maps `(1+i)/2` to `(w+i)/(2m)`, in rational
/// complex arithmetic.
pub fn maps_pole_correctly(s: &SingularityDatum) -> bool {
    let rat = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    // numerator a(1+i)/2 + b, denominator c(1+i)/2 + d
    let (nr, ni) = (rat(s.a, 2) + rat(s.b, 1), rat(s.a, 2));
    let (dr, di) = (rat(s.c, 2) + rat(s.d, 1), rat(s.c, 2));
    let norm = &dr * &dr + &di * &di;
    let re = (&nr * &dr + &ni * &di) / &norm;
    let im = (&ni * &dr - &nr * &di) / &norm;
    re == rat(s.w as i64, 2 * s.m as i64) && im == rat(1, 2 * s.m as i64)
}

/// Exact multiset form of the cosine-product identity
/// `mu prod_k cos(2 s pi r M_k / m) = sum_j cos(2 s pi r_j / m)` for all
/// integers `s`: expanding the product with `2 cos A cos B = cos(A+B) + cos(A-B)`
/// turns the left side into residues `r (M_1 +- M_2 +- ...) mod m`, which
/// must match the `r_j` up to sign as a multiset.
pub fn cosine_multiset_matches(m: u64, r: u64, rjs: &[u64]) -> bool {
    let qs = prime_powers(m);
    let mults: Vec<u64> = qs.iter().map(|q| m / q).collect();
    let omega = qs.len();
    let fold = |u: u64| -> u64 {
        let u = u % m;
        u.min(m - u)
    };
    let mut lhs: Vec<u64> = (0..(1u64 << (omega - 1)))
        .map(|bits| {
            let mut total = mults[0] as i64;
            for (i, mk) in mults.iter().enumerate().skip(1) {
                let sign = if (bits >> (i - 1)) & 1 == 0 { 1 } else { -1 };
                total += sign * *mk as i64;
            }
            fold((r as i64 * total).rem_euclid(m as i64) as u64)
        })
        .collect();
    let mut rhs: Vec<u64> = rjs.iter().map(|&v| fold(v)).collect();
    lhs.sort_unstable();
    rhs.sort_unstable();
    lhs == rhs
}

/// The verified integer `r(m)` together with everything used to find it.
#[derive(Clone, Debug, Serialize)]
pub struct RmReport {
    pub m: u64,
    pub r: u64,
    pub w_list: Vec<u64>,
    pub matrices: Vec<SingularityDatum>,
    pub verified: bool,
}

/// Determines `r(m)` for `m > 1` in the sequence.
///
/// Single prime power: `r = (m-w)/2` directly.  Otherwise candidates are
/// filtered by the residue classes of `r M_k` modulo each prime power (they
/// must hit `+- r_j`), then confirmed by the exact multiset identity; the
/// smallest survivor wins.
pub fn r_of_m(m: u64) -> Result<RmReport> {
    let sings = singularities(m)?;
    let rjs: Vec<u64> = sings.iter().map(|s| s.r).collect();
    let w_list: Vec<u64> = sings.iter().map(|s| s.w).collect();
    let qs = prime_powers(m);
    if qs.len() == 1 {
        return Ok(RmReport { m, r: rjs[0], w_list, matrices: sings, verified: true });
    }
    let mults: Vec<u64> = qs.iter().map(|q| m / q).collect();
    // allowed residues of r * M_k modulo q_k
    let allowed: Vec<Vec<u64>> = qs
        .iter()
        .map(|&q| {
            let mut set: Vec<u64> =
                rjs.iter().flat_map(|&rj| [rj % q, (q - rj % q) % q]).collect();
            set.sort_unstable();
            set.dedup();
            set
        })
        .collect();
    for r in 1..m.div_ceil(2) {
        let ok_residues = qs
            .iter()
            .zip(&mults)
            .zip(&allowed)
            .all(|((&q, &mk), set)| set.binary_search(&((r * mk) % q)).is_ok());
        if ok_residues && cosine_multiset_matches(m, r, &rjs) {
            return Ok(RmReport { m, r, w_list, matrices: sings, verified: true });
        }
    }
    Err(MagError::ConjectureViolation(format!(
        "no r < {m}/2 reproduces the singularity data of {m}"
    )))
}

/// The model terms `m -> r(m)` for every sequence element up to `m_max`.
#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticModel {
    pub m_max: u64,
    pub terms: BTreeMap<u64, u64>,
}

impl AsymptoticModel {
    pub fn build(m_max: u64) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for m in s_sequence(m_max) {
            if m == 1 {
                terms.insert(1, 0);
            } else {
                terms.insert(m, r_of_m(m)?.r);
            }
        }
        Ok(AsymptoticModel { m_max, terms })
    }
}

/// `C(m,n)`: `1` for `m = 1`, `0` off the sequence, otherwise
/// `2^omega prod_k cos((2n+1-m) r(m) pi / q_k)`.
pub fn c_coeff(ctx: &Ctx, m: u64, n: u64, r: u64) -> BigReal {
    if m == 1 {
        return ctx.one();
    }
    if !in_s(m) {
        return ctx.zero();
    }
    let qs = prime_powers(m);
    let t = 2 * n as i64 + 1 - m as i64;
    let mut acc = ctx.from_i64(1 << qs.len());
    for q in qs {
        // reduce the angle (t r / q) pi modulo 2 pi exactly
        let red = (t * r as i64).rem_euclid(2 * q as i64);
        let angle = ctx.pi().mul_i64(red).div_i64(q as i64);
        acc = &acc * &angle.cos();
    }
    acc
}

/// One scanned index of the residual table.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualRow {
    pub n: u64,
    pub log10_abs_residual: f64,
    pub digits_explained: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub m_max: u64,
    pub window: (u64, u64),
    pub rows: Vec<ResidualRow>,
    /// Mean per-`n` digit coverage over the window.
    pub mean_coverage: f64,
    /// Least-squares slope of `ln |rho(n)|` against `n`.
    pub decay_exponent: f64,
}

impl ResidualReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,log10_abs_residual,digits_explained\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{}\n", r.n, r.log10_abs_residual, r.digits_explained));
        }
        s
    }
}

/// Computes `rho(n) = 2(-1)^n A(n) - sum_m C(m,n) E((2n+1) pi/(2m))` across
/// the window and reports coverage and decay statistics.
///
/// The context must carry enough digits for the window: the leading term is
/// of size `e^{(n+1/2) pi}` while the residual is exponentially smaller.
pub fn residual_scan(
    ctx: &Ctx,
    table: &FourierTable,
    window: (u64, u64),
    m_max: u64,
) -> Result<ResidualReport> {
    let (lo, hi) = window;
    if hi as usize > table.n_max() || lo >= hi {
        return Err(MagError::Domain(format!(
            "window ({lo}, {hi}) outside the table (n <= {})",
            table.n_max()
        )));
    }
    let need = 1.3644 * (hi as f64 + 0.5) + 30.0;
    if (ctx.digits() as f64) < need {
        return Err(MagError::UnsupportedPrecision(format!(
            "window up to n = {hi} needs about {need:.0} digits, context has {}",
            ctx.digits()
        )));
    }
    let model = AsymptoticModel::build(m_max)?;
    let mut rows = Vec::new();
    for n in lo..=hi {
        let mut rho = ctx.from_bigint(table.a(n as usize)).mul_i64(2);
        if n % 2 == 1 {
            rho = -&rho;
        }
        let target = rho.log10_abs_f64();
        for (&m, &r) in &model.terms {
            let x = ctx.pi().mul_i64(2 * n as i64 + 1).div_i64(2 * m as i64);
            let term = &c_coeff(ctx, m, n, r) * &growth_term(&x)?;
            rho = &rho - &term;
        }
        let lg = rho.log10_abs_f64();
        let coverage = (1.0 - lg / target).clamp(0.0, 1.0);
        rows.push(ResidualRow { n, log10_abs_residual: lg, digits_explained: coverage });
    }
    let mean_coverage = rows.iter().map(|r| r.digits_explained).sum::<f64>() / rows.len() as f64;
    let ln10 = std::f64::consts::LN_10;
    let pts: Vec<(f64, f64)> =
        rows.iter().map(|r| (r.n as f64, r.log10_abs_residual * ln10)).collect();
    let decay_exponent = least_squares_slope(&pts);
    Ok(ResidualReport { m_max, window, rows, mean_coverage, decay_exponent })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Least-squares estimate of `C(m, n)` in each residue class of `n mod m`,
/// from the residuals left after subtracting all confirmed terms below `m`.
#[derive(Clone, Debug, Serialize)]
pub struct FitReport {
    pub m: u64,
    pub window: (u64, u64),
    /// `(class, fitted coefficient, model coefficient when m is in the sequence)`
    pub classes: Vec<(u64, f64, Option<f64>)>,
    pub max_relative_error: Option<f64>,
}

pub fn fit_unknown_c(
    ctx: &Ctx,
    table: &FourierTable,
    window: (u64, u64),
    m: u64,
) -> Result<FitReport> {
    let (lo, hi) = window;
    if hi as usize > table.n_max() || lo >= hi {
        return Err(MagError::Domain("window outside the table".into()));
    }
    let model = AsymptoticModel::build(m - 1)?;
    let r_m = if m > 1 && in_s(m) { Some(r_of_m(m)?.r) } else { None };
    let mut num = vec![ctx.zero(); m as usize];
    let mut den = vec![ctx.zero(); m as usize];
    for n in lo..=hi {
        let mut rho = ctx.from_bigint(table.a(n as usize)).mul_i64(2);
        if n % 2 == 1 {
            rho = -&rho;
        }
        for (&mm, &r) in &model.terms {
            let x = ctx.pi().mul_i64(2 * n as i64 + 1).div_i64(2 * mm as i64);
            rho = &rho - &(&c_coeff(ctx, mm, n, r) * &growth_term(&x)?);
        }
        let e = growth_term(&ctx.pi().mul_i64(2 * n as i64 + 1).div_i64(2 * m as i64))?;
        let cls = (n % m) as usize;
        num[cls] = &num[cls] + &(&rho * &e);
        den[cls] = &den[cls] + &e.square();
    }
    let mut classes = Vec::new();
    let mut max_rel: Option<f64> = None;
    for cls in 0..m as usize {
        if den[cls].is_zero() {
            continue;
        }
        let fitted = (&num[cls] / &den[cls]).to_f64();
        let expect = r_m.map(|r| c_coeff(ctx, m, cls as u64, r).to_f64());
        if let Some(e) = expect {
            if e.abs() > 1e-9 {
                let rel = ((fitted - e) / e).abs();
                max_rel = Some(max_rel.map_or(rel, |v: f64| v.max(rel)));
            }
        }
        classes.push((cls as u64, fitted, expect));
    }
    Ok(FitReport { m, window, classes, max_relative_error: max_rel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::PrecisionContext;

    #[test]
    fn sequence_members() {
        let s = s_sequence(100);
        assert_eq!(&s[..15], &[1, 5, 13, 17, 25, 29, 37, 41, 53, 61, 65, 73, 85, 89, 97]);
        assert!(in_s(65) && !in_s(15));
        assert!(in_s(160225));
    }

    #[test]
    fn decompositions() {
        assert_eq!(coprime_square_decompositions(5).unwrap(), vec![(1, 2)]);
        assert_eq!(coprime_square_decompositions(65).unwrap(), vec![(1, 8), (7, 4)]);
        assert_eq!(coprime_square_decompositions(25).unwrap(), vec![(3, 4)]);
        assert!(coprime_square_decompositions(15).is_err());
        assert!(coprime_square_decompositions(1).is_err());
    }

    #[test]
    fn singularity_construction_by_hand() {
        // m=5, (gamma, delta) = (1, +2): c=2, d=1, a=1, b=0, w=3, r=1
        let s = locate_singularity(1, 2).unwrap().unwrap();
        assert_eq!((s.a, s.b, s.c, s.d, s.w, s.r), (1, 0, 2, 1, 3, 1));
        assert!(locate_singularity(1, -2).unwrap().is_none());
        // m=13, (3, -2): c=6, d=-5, a=1, b=-1, w=5, r=4 -- the pole at (5+i)/26
        let s = locate_singularity(3, -2).unwrap().unwrap();
        assert_eq!((s.a, s.b, s.c, s.d, s.w, s.r), (1, -1, 6, -5, 5, 4));
        assert!(maps_pole_correctly(&s));
        assert!(locate_singularity(2, 1).is_err());
    }

    #[test]
    fn all_matrices_map_the_pole_exactly() {
        for m in s_sequence(600).into_iter().skip(1) {
            for s in singularities(m).unwrap() {
                assert_eq!(s.a * s.d - s.b * s.c, 1, "determinant at m={m}");
                assert_eq!(s.c % 2, 0, "even c at m={m}");
                assert!(maps_pole_correctly(&s), "pole map at m={m}");
            }
        }
    }

    #[test]
    fn r_values_from_the_known_list() {
        for (m, want) in [(5, 1), (13, 4), (65, 7), (1105, 216), (2017, 894)] {
            let rep = r_of_m(m).unwrap();
            assert_eq!(rep.r, want, "r({m})");
            assert!(rep.verified);
        }
    }

    #[test]
    fn big_composite_case() {
        // m = 5^2 * 13 * 17 * 29: eight matrices and r = 2999
        let rep = r_of_m(160225).unwrap();
        assert_eq!(rep.r, 2999);
        let mut got: Vec<(i64, i64, i64, i64)> =
            rep.matrices.iter().map(|s| (s.a, s.b, s.c, s.d)).collect();
        got.sort_unstable();
        let mut want = vec![
            (5, -11, 226, -497),
            (39, -32, 674, -553),
            (55, -81, 366, -539),
            (25, -73, 162, -473),
            (181, -73, 786, -317),
            (187, -101, 798, -431),
            (215, -182, 658, -557),
            (253, -24, 622, -59),
        ];
        want.sort_unstable();
        assert_eq!(got, want);
    }

    #[test]
    fn cosine_identity_sweep_to_1000() {
        for m in s_sequence(1000).into_iter().skip(1) {
            let rep = r_of_m(m).unwrap();
            assert!(rep.r < m.div_ceil(2));
            let rjs: Vec<u64> = rep.matrices.iter().map(|s| s.r).collect();
            assert!(cosine_multiset_matches(m, rep.r, &rjs), "identity at m={m}");
        }
    }

    #[test]
    fn c_coefficients() {
        let ctx = PrecisionContext::new(40).unwrap();
        // C(1, n) = 1
        assert_eq!(c_coeff(&ctx, 1, 17, 0), ctx.one());
        // C(m, n) = 0 off the sequence
        assert!(c_coeff(&ctx, 15, 3, 1).is_zero());
        // C(5, n) = 2 cos(2(n-2) pi/5); equals 2 when 5 | 2n+1
        let v = c_coeff(&ctx, 5, 2, 1);
        assert!((&v - &ctx.from_i64(2)).abs() < ctx.pow10(-35));
        let v = c_coeff(&ctx, 5, 7, 1); // 2n+1 = 15
        assert!((&v - &ctx.from_i64(2)).abs() < ctx.pow10(-35));
        // C(65, n) = 4 when 65 | 2n+1 (n = 32)
        let r65 = r_of_m(65).unwrap().r;
        let v = c_coeff(&ctx, 65, 32, r65);
        assert!((&v - &ctx.from_i64(4)).abs() < ctx.pow10(-34));
    }

    #[test]
    fn growth_term_values() {
        let ctx = PrecisionContext::new(40).unwrap();
        assert!(growth_term(&ctx.one()).unwrap().is_zero());
        assert!(growth_term(&ctx.zero()).is_err());
        // the leading-order constant (1/2) e^{pi/2} (1 - 2/pi) = E(pi/2)/2
        let c = growth_term(&ctx.pi().div_i64(2)).unwrap().div_i64(2);
        let expect = &(&ctx.one() - &(&ctx.from_i64(2) / &ctx.pi()))
            * &ctx.pi().div_i64(2).exp().div_i64(2);
        assert!((&c - &expect).abs() < ctx.pow10(-35));
    }

    #[test]
    fn residual_scan_mini_window() {
        // small-scale version of the acceptance window
        let ctx = PrecisionContext::new(220).unwrap();
        let table = crate::modular::phi_qexp(130).unwrap();
        let rep = residual_scan(&ctx, &table, (60, 120), 1).unwrap();
        assert!((rep.mean_coverage - 0.80).abs() < 0.03, "coverage {}", rep.mean_coverage);
        let rep5 = residual_scan(&ctx, &table, (60, 120), 5).unwrap();
        assert!((rep5.mean_coverage - 0.923).abs() < 0.03, "coverage {}", rep5.mean_coverage);
        assert!(rep5.mean_coverage > rep.mean_coverage);
        // decay of the residual after m <= 5 follows e^{n pi/13}
        let want = std::f64::consts::PI / 13.0;
        assert!((rep5.decay_exponent - want).abs() < 0.1 * want, "slope {}", rep5.decay_exponent);
        // insufficient precision is refused
        let low = PrecisionContext::new(60).unwrap();
        assert!(residual_scan(&low, &table, (60, 120), 1).is_err());
    }

    #[test]
    fn fit_recovers_known_coefficients() {
        let ctx = PrecisionContext::new(220).unwrap();
        let table = crate::modular::phi_qexp(130).unwrap();
        // m = 1 recovers the constant 1
        let rep = fit_unknown_c(&ctx, &table, (60, 120), 1).unwrap();
        assert!((rep.classes[0].1 - 1.0).abs() < 1e-3);
        // m = 5 recovers 2 cos(2(n-2) pi/5); the short window limits accuracy
        // to the next-term contamination ~ e^{-n pi (1/10 - 1/13)}
        let rep = fit_unknown_c(&ctx, &table, (60, 120), 5).unwrap();
        assert!(rep.max_relative_error.unwrap() < 1e-2, "{:?}", rep.max_relative_error);
        // m = 13 after subtracting 1 and 5
        let rep = fit_unknown_c(&ctx, &table, (60, 120), 13).unwrap();
        assert!(rep.max_relative_error.unwrap() < 2e-2);
        // m = 9 is off the sequence: fitted coefficients are noise-small
        let rep = fit_unknown_c(&ctx, &table, (60, 120), 9).unwrap();
        assert!(rep.classes.iter().all(|c| c.1.abs() < 1e-3), "{:?}", rep.classes);
    }
}
