//! The algebra `C = Q[v−D]{a(f, g)}` inside `Cend_2`, whose radical has no
//! complementary subalgebra, where
//!
//! ```text
//! a(f, g) = [[v²f, v²f + v²g(v−D)²], [0, f(v−D)²]].
//! ```

mod psi;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::arith::{binomial, falling, MatrixDV, Poly, PolyDV, Rational};
use crate::conformal::{locality_bound, CendElem};

pub use psi::{
    cx_forced_psi, cx_obstruction, cx_propagate_psi, expand_in_v_minus_d, forced_form, psi_instance,
    ControlReport, ObstructionCertificate, ObstructionRow, PropagationStep, PsiError, PsiPropagation,
    PsiSolution, WitnessReplay,
};

/// `Σ_k (v−D)^k a(f_k, g_k)`, stored as `k ↦ (f_k, g_k)` without zero terms.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CxElem {
    terms: BTreeMap<usize, (Poly, Poly)>,
}

fn v_squared() -> Poly {
    Poly::monomial(2, Rational::from_integer(1.into()))
}

impl CxElem {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `a(f, g)`.
    pub fn a(f: Poly, g: Poly) -> Self {
        Self::term(0, f, g)
    }

    /// `(v−D)^k a(f, g)`.
    pub fn term(k: usize, f: Poly, g: Poly) -> Self {
        let mut x = Self::zero();
        x.add_term(k, f, g);
        x
    }

    pub fn add_term(&mut self, k: usize, f: Poly, g: Poly) {
        let entry = self.terms.entry(k).or_insert_with(|| (Poly::zero(), Poly::zero()));
        entry.0 += &f;
        entry.1 += &g;
        if entry.0.is_zero() && entry.1.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Poly, &Poly)> + '_ {
        self.terms.iter().map(|(k, (f, g))| (*k, f, g))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `h(v)·x`, using `h(v) a(f, g) = a(hf, hg)`.
    pub fn mul_v(&self, h: &Poly) -> Self {
        let mut out = Self::zero();
        for (k, f, g) in self.terms() {
            out.add_term(k, h * f, h * g);
        }
        out
    }

    /// `(v−D)^j·x`.
    pub fn mul_v_minus_d(&self, j: usize) -> Self {
        CxElem {
            terms: self.terms.iter().map(|(k, fg)| (k + j, fg.clone())).collect(),
        }
    }

    /// `D·x = v·x − (v−D)·x`.
    pub fn d_action(&self) -> Self {
        &self.mul_v(&Poly::x()) - &self.mul_v_minus_d(1)
    }
}

impl<'a> std::ops::Add<&'a CxElem> for &'a CxElem {
    type Output = CxElem;
    fn add(self, o: &'a CxElem) -> CxElem {
        let mut out = self.clone();
        for (k, f, g) in o.terms() {
            out.add_term(k, f.clone(), g.clone());
        }
        out
    }
}

impl<'a> std::ops::Sub<&'a CxElem> for &'a CxElem {
    type Output = CxElem;
    fn sub(self, o: &'a CxElem) -> CxElem {
        let mut out = self.clone();
        for (k, f, g) in o.terms() {
            out.add_term(k, -f.clone(), -g.clone());
        }
        out
    }
}

impl fmt::Display for CxElem {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(out, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(k, f, g)| {
                let a = format!("a({}, {})", f.fmt_in("v"), g.fmt_in("v"));
                match k {
                    0 => a,
                    1 => format!("(v - D)*{a}"),
                    _ => format!("(v - D)^{k}*{a}"),
                }
            })
            .collect();
        write!(out, "{}", parts.join(" + "))
    }
}

impl Serialize for CxElem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The matrix `Σ (v−D)^k a(f_k, g_k)` in `Cend_2`.
pub fn cx_embed(x: &CxElem) -> CendElem {
    let sq = PolyDV::v_minus_d_pow(2);
    let v2 = v_squared();
    let mut m = [PolyDV::zero(), PolyDV::zero(), PolyDV::zero(), PolyDV::zero()];
    for (k, f, g) in x.terms() {
        let shift = PolyDV::v_minus_d_pow(k);
        let v2f = PolyDV::from_v(&v2 * f);
        let v2g = PolyDV::from_v(&v2 * g);
        m[0] += &(&shift * &v2f);
        m[1] += &(&shift * &(&v2f + &(&v2g * &sq)));
        m[3] += &(&shift * &(&PolyDV::from_v(f.clone()) * &sq));
    }
    CendElem::new(MatrixDV::from_entries(2, m.to_vec()))
}

/// `a(f1, g1) ⊛_n a(f2, g2) = a(f1 (v²f2)^(n), f1 (v²g2)^(n) + f1 f2^(n) + g1 (v²f2)^(n))`.
fn base_product(f1: &Poly, g1: &Poly, f2: &Poly, g2: &Poly, n: usize) -> (Poly, Poly) {
    let v2 = v_squared();
    let d = (&v2 * f2).deriv(n);
    let f = f1 * &d;
    let g = &(&(f1 * &(&v2 * g2).deriv(n)) + &(f1 * &f2.deriv(n))) + &(g1 * &d);
    (f, g)
}

/// `x ⊛_n y` by the closed formula. A left factor `(v−D)^k` acts as
/// `(v+λ)^k` on the λ-product and a right factor `(v−D)^l` passes through.
pub fn cx_product(x: &CxElem, y: &CxElem, n: usize) -> CxElem {
    let mut out = CxElem::zero();
    for (k, f1, g1) in x.terms() {
        for (l, f2, g2) in y.terms() {
            for j in 0..=k.min(n) {
                let c = binomial(k, j) * falling(n, j);
                let (f, g) = base_product(f1, g1, f2, g2, n - j);
                if f.is_zero() && g.is_zero() {
                    continue;
                }
                let h = Poly::monomial(k - j, c);
                out.add_term(l, &h * &f, &h * &g);
            }
        }
    }
    out
}

/// All products `x ⊛_n y` up to the first index past which they vanish.
pub fn cx_product_table(x: &CxElem, y: &CxElem) -> Vec<CxElem> {
    let bound = locality_bound(&cx_embed(x), &cx_embed(y));
    let mut table: Vec<CxElem> = (0..bound).map(|n| cx_product(x, y, n)).collect();
    while table.last().is_some_and(CxElem::is_zero) {
        table.pop();
    }
    table
}

/// Membership in `Rad(C) = Q[v−D]{a(0, g)}`: every `f_k` vanishes.
pub fn cx_radical_membership(x: &CxElem) -> bool {
    x.terms().all(|(_, f, _)| f.is_zero())
}

/// Whether every product `x ⊛_n y` of two radical members is zero.
pub fn cx_radical_products_vanish(x: &CxElem, y: &CxElem) -> bool {
    cx_product_table(x, y).is_empty()
}

/// Whether `x ⊛_n x = 0` for every `n`, computed in `Cend_2`.
pub fn cx_square_zero(x: &CxElem) -> bool {
    let e = cx_embed(x);
    crate::conformal::product_table(&e, &e).expect("same size").is_empty()
}

/// `θ(Σ (v−D)^k a(f_k, g_k)) = Σ f_k(v) (v−D)^(k+2)`.
pub fn cx_theta(x: &CxElem) -> PolyDV {
    let mut out = PolyDV::zero();
    for (k, f, _) in x.terms() {
        out += &(&PolyDV::from_v(f.clone()) * &PolyDV::v_minus_d_pow(k + 2));
    }
    out
}

/// Whether `p(v, D)` is a multiple of `(v−D)^2`.
pub fn divisible_by_v_minus_d_squared(p: &PolyDV) -> bool {
    let expanded = expand_in_v_minus_d(p);
    expanded.keys().all(|&(k, _)| k >= 2)
}

/// The generators `a(v^i, 0)`, `i ≤ bound − 2`, and `a(0, v^j)`,
/// `j ≤ bound − 4`, of `C` as a `Q[D]`-module, within `v`-degree `bound`.
pub fn cx_module_generators(bound: usize) -> Vec<CxElem> {
    let mut out = Vec::new();
    let one = Rational::from_integer(1.into());
    for i in 0..=bound.saturating_sub(2) {
        if i + 2 <= bound {
            out.push(CxElem::a(Poly::monomial(i, one.clone()), Poly::zero()));
        }
    }
    for j in 0..=bound.saturating_sub(4) {
        if j + 4 <= bound {
            out.push(CxElem::a(Poly::zero(), Poly::monomial(j, one.clone())));
        }
    }
    out
}

/// The radical generators `a(0, v^j)` within `v`-degree `bound`.
pub fn cx_radical_generators(bound: usize) -> Vec<CxElem> {
    let one = Rational::from_integer(1.into());
    (0..=bound.saturating_sub(4))
        .filter(|j| j + 4 <= bound)
        .map(|j| CxElem::a(Poly::zero(), Poly::monomial(j, one.clone())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_poly;
    use crate::conformal::{nth_product, product_table};

    fn p(s: &str) -> Poly {
        parse_poly(s).unwrap().d_coeff(0)
    }

    fn el(s: &str) -> CendElem {
        CendElem::parse(s).unwrap()
    }

    #[test]
    fn embedding_examples() {
        assert_eq!(cx_embed(&CxElem::a(p("1"), p("0"))), el("[[v^2, v^2],[0, (v - D)^2]]"));
        assert!(cx_embed(&CxElem::zero()).is_zero());
        assert_eq!(
            cx_embed(&CxElem::term(1, p("0"), p("1"))),
            el("[[0, (v - D)*v^2*(v - D)^2],[0, 0]]")
        );
    }

    #[test]
    fn product_examples() {
        let a = CxElem::a(p("1"), p("0"));
        assert_eq!(cx_product(&a, &a, 0), CxElem::a(p("v^2"), p("1")));
        assert_eq!(cx_product(&a, &a, 1), CxElem::a(p("2*v"), p("0")));
        assert!(cx_product(&a, &CxElem::zero(), 3).is_zero());
    }

    #[test]
    fn closed_formula_matches_embedding() {
        let xs = [
            CxElem::a(p("1"), p("0")),
            CxElem::term(1, p("v"), p("v^2 + 1")),
            &CxElem::term(2, p("3"), p("0")) + &CxElem::a(p("v^3 - v"), p("2*v")),
        ];
        for x in &xs {
            for y in &xs {
                let table = product_table(&cx_embed(x), &cx_embed(y)).unwrap();
                let cx = cx_product_table(x, y);
                assert_eq!(cx.len(), table.len(), "{x} | {y}");
                for (n, z) in cx.iter().enumerate() {
                    assert_eq!(cx_embed(z), nth_product(&cx_embed(x), &cx_embed(y), n).unwrap());
                }
            }
        }
    }

    #[test]
    fn polynomial_multiples_stay_inside() {
        let x = CxElem::term(1, p("v + 2"), p("v^2"));
        let h = p("v^2 - 3");
        let scaled = cx_embed(&x).mul_scalar(&PolyDV::from_v(h.clone()));
        assert_eq!(cx_embed(&x.mul_v(&h)), scaled);
        assert_eq!(cx_embed(&x.d_action()), cx_embed(&x).d_action());
    }

    #[test]
    fn radical_examples() {
        assert!(cx_radical_membership(&CxElem::a(p("0"), p("v^3 + 1"))));
        assert!(!cx_radical_membership(&CxElem::a(p("1"), p("0"))));
        assert!(cx_radical_membership(&CxElem::zero()));
        let r = CxElem::term(2, p("0"), p("v"));
        assert!(cx_radical_products_vanish(&r, &CxElem::a(p("0"), p("1"))));
        assert!(cx_square_zero(&r));
        assert!(!cx_square_zero(&CxElem::a(p("1"), p("0"))));
    }

    #[test]
    fn theta_examples() {
        let sq = PolyDV::v_minus_d_pow(2);
        assert_eq!(cx_theta(&CxElem::a(p("1"), p("0"))), sq);
        assert!(cx_theta(&CxElem::a(p("0"), p("v^2"))).is_zero());
        let x = CxElem::term(1, p("v"), p("0"));
        assert_eq!(cx_theta(&x), &PolyDV::from_v(p("v")) * &PolyDV::v_minus_d_pow(3));
        assert!(divisible_by_v_minus_d_squared(&cx_theta(&x)));
        assert!(!divisible_by_v_minus_d_squared(&PolyDV::v_minus_d_pow(1)));
    }

    #[test]
    fn theta_is_multiplicative() {
        let x = CxElem::term(1, p("v + 1"), p("v"));
        let y = &CxElem::a(p("v^2"), p("1")) + &CxElem::term(2, p("2"), p("0"));
        for n in 0..8 {
            let lhs = cx_theta(&cx_product(&x, &y, n));
            let rhs = CendElem::from_poly(cx_theta(&x)).prod(&CendElem::from_poly(cx_theta(&y)), n);
            assert_eq!(CendElem::from_poly(lhs), rhs, "n = {n}");
        }
    }
}
