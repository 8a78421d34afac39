//! Tanh-sinh (double-exponential) quadrature over [`BigReal`].
//!
//! The substitution `x = tanh((pi/2) sinh t)` clusters nodes doubly
//! exponentially at the endpoints, so integrable endpoint singularities of
//! the kind appearing in the double integral (inverse square roots) are
//! handled without special casing.  Node positions are stored as the exact
//! fractional distances to both endpoints, letting integrands evaluate
//! `x - a` and `b - x` without cancellation.

use std::cell::RefCell;

use crate::error::{MagError, Result};
use crate::precision::{BigReal, Ctx, RealOps};

struct Node {
    /// `2 pi cosh(t) * sigma(v) * sigma(-v)` with `v = pi sinh t`.
    weight: BigReal,
    /// `(1 + x)/2 = sigma(v)`, the fractional distance from the left endpoint.
    left: BigReal,
    /// `(1 - x)/2 = sigma(-v)`.
    right: BigReal,
}

pub struct TanhSinhRule {
    ctx: Ctx,
    levels: RefCell<Vec<std::rc::Rc<Vec<Node>>>>,
    t_max: f64,
}

const MAX_LEVEL: usize = 9;

impl TanhSinhRule {
    pub fn new(ctx: &Ctx) -> Self {
        let d = (ctx.digits() + ctx.guard()) as f64;
        let t_max = (0.7331 * (d + 16.0)).asinh() + 0.25;
        TanhSinhRule { ctx: ctx.clone(), levels: RefCell::new(Vec::new()), t_max }
    }

    fn node_at(&self, t: f64) -> Node {
        let ctx = &self.ctx;
        // sinh/cosh from e^t keeps one transcendental call per node
        let et = ctx.from_f64(t).exp();
        let emt = et.recip();
        let s = (&et - &emt).div_i64(2);
        let c = (&et + &emt).div_i64(2);
        let v = &ctx.pi() * &s;
        let emv = (-&v).exp();
        let left = (&ctx.one() + &emv).recip();
        let right = &emv * &left;
        let weight = &(&ctx.pi().mul_i64(2) * &c) * &(&left * &right);
        Node { weight, left, right }
    }

    /// Nodes for refinement level `level` (positive `t` only; `t = 0` is the
    /// single level-0 node).  Level 0: integer `t`; level `L`: odd multiples
    /// of `2^-L`.
    fn ensure_level(&self, level: usize) {
        let mut levels = self.levels.borrow_mut();
        while levels.len() <= level {
            let l = levels.len();
            let h = f64_powi(l);
            let mut nodes = Vec::new();
            if l == 0 {
                let mut t = 0.0;
                while t <= self.t_max {
                    nodes.push(self.node_at(t));
                    t += 1.0;
                }
            } else {
                let mut j = 1u64;
                loop {
                    let t = j as f64 * h;
                    if t > self.t_max {
                        break;
                    }
                    nodes.push(self.node_at(t));
                    j += 2;
                }
            }
            levels.push(std::rc::Rc::new(nodes));
        }
    }

    fn level(&self, l: usize) -> std::rc::Rc<Vec<Node>> {
        self.ensure_level(l);
        self.levels.borrow()[l].clone()
    }

    /// Integrate `f` over `(a, b)` to roughly `target_digits` digits.
    ///
    /// `f` receives `(x, x - a, b - x)`; the endpoint distances are computed
    /// from the node fractions and stay accurate arbitrarily close to the
    /// endpoints.
    pub fn integrate(
        &self,
        a: &BigReal,
        b: &BigReal,
        target_digits: u32,
        f: &mut dyn FnMut(&BigReal, &BigReal, &BigReal) -> BigReal,
    ) -> Result<BigReal> {
        self.integrate_from(a, &(b - a), target_digits, f)
    }

    /// Like [`integrate`](Self::integrate) over `(a, a + range)`, with the
    /// range supplied directly.  Nested integrals whose upper endpoint is an
    /// outer quadrature node pass the node's endpoint distance here, which
    /// stays exact where `b - a` would be absorbed by rounding.
    pub fn integrate_from(
        &self,
        a: &BigReal,
        range: &BigReal,
        target_digits: u32,
        f: &mut dyn FnMut(&BigReal, &BigReal, &BigReal) -> BigReal,
    ) -> Result<BigReal> {
        let ctx = &self.ctx;
        let mut eval = |left: &BigReal, right: &BigReal| -> BigReal {
            let da = range * left;
            let db = range * right;
            let x = a + &da;
            f(&x, &da, &db)
        };

        let mut acc = ctx.zero();
        let mut prev: Option<BigReal> = None;
        for level in 0..=MAX_LEVEL {
            let nodes = self.level(level);
            let mut sum = ctx.zero();
            for (i, n) in nodes.iter().enumerate() {
                let term = &n.weight * &eval(&n.left, &n.right);
                sum = &sum + &term;
                let mirrored = level > 0 || i > 0;
                if mirrored {
                    let term = &n.weight * &eval(&n.right, &n.left);
                    sum = &sum + &term;
                }
            }
            let h = ctx.one().div_i64(1i64 << level);
            acc = if level == 0 { &h * &sum } else { &acc.div_i64(2) + &(&h * &sum) };
            if acc.to_f64().is_nan() || acc.to_f64().is_infinite() {
                return Err(MagError::Truncation(
                    "integrand evaluated non-finite near an endpoint".into(),
                ));
            }
            if let Some(p) = &prev {
                let delta = (&acc - p).abs();
                let scale = &acc.abs() + &ctx.pow10(-(target_digits as i64));
                if level >= 3 && delta <= &ctx.pow10(-(target_digits as i64 + 2)) * &scale {
                    return Ok(&acc * &range.div_i64(2));
                }
            }
            prev = Some(acc.clone());
        }
        Err(MagError::Truncation(format!(
            "tanh-sinh did not reach {target_digits} digits within {MAX_LEVEL} levels"
        )))
    }
}

fn f64_powi(l: usize) -> f64 {
    1.0 / (1u64 << l) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::PrecisionContext;

    #[test]
    fn polynomial_and_singular_integrands() {
        let ctx = PrecisionContext::new(35).unwrap();
        let rule = TanhSinhRule::new(&ctx);
        // integral of x^2 over (0,1) = 1/3
        let v = rule
            .integrate(&ctx.zero(), &ctx.one(), 30, &mut |x, _, _| x.square())
            .unwrap();
        let third = ctx.one().div_i64(3);
        assert!((&v - &third).abs() < ctx.pow10(-29));
        // integral of 1/sqrt(x(1-x)) over (0,1) = pi
        let v = rule
            .integrate(&ctx.zero(), &ctx.one(), 30, &mut |_, da, db| {
                (da * db).sqrt().recip()
            })
            .unwrap();
        assert!((&v - &ctx.pi()).abs() < ctx.pow10(-28));
    }

    #[test]
    fn arctangent_integral() {
        // integral of 1/(1+x^2) over (0,1) = pi/4
        let ctx = PrecisionContext::new(40).unwrap();
        let rule = TanhSinhRule::new(&ctx);
        let v = rule
            .integrate(&ctx.zero(), &ctx.one(), 35, &mut |x, _, _| {
                (&ctx.one() + &x.square()).recip()
            })
            .unwrap();
        assert!((&v - &ctx.pi().div_i64(4)).abs() < ctx.pow10(-33));
    }
}
