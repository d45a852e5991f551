use std::collections::HashSet;

use serde::Serialize;

use super::{HSpan, SpanError};
use crate::conformal::{brace_from_table, is_idempotent, product_table, CendElem};

/// A span closed under every `⊛_n`, together with the bound it was closed in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubalgebraPresentation {
    pub span: HSpan,
    pub closed_under_products: bool,
    pub bound: usize,
}

impl SubalgebraPresentation {
    /// Wraps a span after checking closure of its Hermite basis.
    pub fn verified(span: HSpan) -> Result<Self, SpanError> {
        let closed = products_reduce_into(&span, &span)?;
        let bound = span.bound();
        Ok(SubalgebraPresentation {
            span,
            closed_under_products: closed,
            bound,
        })
    }
}

fn products_reduce_into(span: &HSpan, target: &HSpan) -> Result<bool, SpanError> {
    let basis = span.basis();
    for x in &basis {
        for y in &basis {
            for p in product_table(x, y).expect("span elements share a size") {
                match target.contains(&p) {
                    Ok(true) => {}
                    Ok(false) | Err(SpanError::BoundExceeded { .. }) => return Ok(false),
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(true)
}

/// Saturates the span of `gens` under all `n`-products.
///
/// Any product whose `v`-degree passes `bound` is an error naming the pair.
pub fn close_subalgebra(
    size: usize,
    gens: Vec<CendElem>,
    bound: usize,
) -> Result<SubalgebraPresentation, SpanError> {
    let mut span = HSpan::new(size, bound, gens)?;
    let mut done: HashSet<(CendElem, CendElem)> = HashSet::new();
    loop {
        let basis = span.basis();
        let mut grew = false;
        for x in &basis {
            for y in &basis {
                if !done.insert((x.clone(), y.clone())) {
                    continue;
                }
                for (n, p) in product_table(x, y).expect("span elements share a size").into_iter().enumerate() {
                    if p.deg_v().is_some_and(|d| d > bound) {
                        return Err(SpanError::Escape {
                            left: x.to_string(),
                            right: y.to_string(),
                            n,
                            bound,
                        });
                    }
                    if !span.contains(&p)? {
                        span.push(p)?;
                        grew = true;
                    }
                }
            }
        }
        if !grew {
            return Ok(SubalgebraPresentation {
                span,
                closed_under_products: true,
                bound,
            });
        }
    }
}

/// A product that leaves the candidate ideal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdealWitness {
    /// `x⊛_n a`, `a⊛_n x` or `{a⊛_n x}`.
    pub kind: String,
    pub x: CendElem,
    pub a: CendElem,
    pub n: usize,
    pub product: CendElem,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdealCheck {
    pub is_ideal: bool,
    pub witness: Option<IdealWitness>,
    /// Products left undecided because they leave a windowed algebra's bound.
    pub skipped: usize,
}

/// Checks that `x⊛_n a`, `a⊛_n x` and `{a⊛_n x}` stay in `ideal` for
/// algebra generators `x` and ideal generators `a`.
///
/// When the algebra is a window (not closed under products), products that
/// exceed the ideal's bound are skipped and counted instead of failing.
pub fn verify_ideal(ideal: &HSpan, algebra: &SubalgebraPresentation) -> Result<IdealCheck, SpanError> {
    let windowed = !algebra.closed_under_products;
    let mut skipped = 0;
    for g in ideal.generators() {
        let inside = match algebra.span.contains(g) {
            Ok(b) => b,
            Err(SpanError::BoundExceeded { .. }) if windowed => {
                skipped += 1;
                true
            }
            Err(SpanError::BoundExceeded { .. }) => false,
            Err(e) => return Err(e),
        };
        if !inside {
            return Err(SpanError::NotContained(g.to_string()));
        }
    }
    let size = ideal.size();
    let mut inside = |p: &CendElem| -> Result<bool, SpanError> {
        match ideal.contains(p) {
            Err(SpanError::BoundExceeded { .. }) if windowed => {
                skipped += 1;
                Ok(true)
            }
            Err(SpanError::BoundExceeded { .. }) => Ok(false),
            other => other,
        }
    };
    let ideal_basis = ideal.basis();
    for x in algebra.span.basis() {
        for a in &ideal_basis {
            let left = product_table(&x, a).expect("sizes agree");
            let right = product_table(a, &x).expect("sizes agree");
            let braces: Vec<CendElem> = (0..right.len()).map(|n| brace_from_table(&right, n, size)).collect();
            for (kind, table) in [("x⊛_n a", &left), ("a⊛_n x", &right), ("{a⊛_n x}", &braces)] {
                for (n, p) in table.iter().enumerate() {
                    if !inside(p)? {
                        return Ok(IdealCheck {
                            is_ideal: false,
                            witness: Some(IdealWitness {
                                kind: kind.to_string(),
                                x: x.clone(),
                                a: a.clone(),
                                n,
                                product: p.clone(),
                            }),
                            skipped: 0,
                        });
                    }
                }
            }
        }
    }
    Ok(IdealCheck {
        is_ideal: true,
        witness: None,
        skipped,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NilpotencyReport {
    /// Smallest `m` whose `m`-fold product span vanishes.
    pub index: usize,
    /// Ranks over `Q(D)` of the `k`-fold product spans, `k = 1..index`.
    pub ranks: Vec<usize>,
}

/// Smallest `m ≤ cap` such that all `m`-fold products of the ideal vanish.
pub fn nilpotency_index(ideal: &HSpan, cap: usize) -> Result<NilpotencyReport, SpanError> {
    let chain = power_chain(ideal, cap)?;
    Ok(NilpotencyReport {
        index: chain.len(),
        ranks: chain.iter().map(HSpan::rank).collect(),
    })
}

/// `I, I^2, …` up to and including the first zero power.
pub fn power_chain(ideal: &HSpan, cap: usize) -> Result<Vec<HSpan>, SpanError> {
    let size = ideal.size();
    let gens = ideal.basis();
    let mut chain = vec![ideal.clone()];
    while !chain.last().unwrap().is_zero() {
        if chain.len() >= cap {
            return Err(SpanError::CapExhausted { cap });
        }
        let mut prods = Vec::new();
        for a in chain.last().unwrap().basis() {
            for b in &gens {
                prods.extend(product_table(&a, b).expect("sizes agree"));
            }
        }
        chain.push(HSpan::from_elements(size, prods)?);
    }
    Ok(chain)
}

/// Canonical representative of `x + I`.
pub fn quotient_reduce(x: &CendElem, ideal: &HSpan) -> Result<CendElem, SpanError> {
    ideal.reduce(x)
}

/// The four corner spans of an idempotent, in the order
/// `e·C·e`, `(1-e)·C·e`, `e·C·(1-e)`, `(1-e)·C·(1-e)`, where left
/// multiplication is `e⊛_0 -` and right multiplication is `{-⊛_0 e}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PierceDecomposition {
    pub ee: HSpan,
    pub fe: HSpan,
    pub ef: HSpan,
    pub ff: HSpan,
    pub sums_to_algebra: bool,
    pub independent: bool,
}

impl PierceDecomposition {
    pub fn spans(&self) -> [&HSpan; 4] {
        [&self.ee, &self.fe, &self.ef, &self.ff]
    }
}

/// `e⊛_0 x` and `{x⊛_0 e}`.
pub(crate) fn left_mul(e: &CendElem, x: &CendElem) -> CendElem {
    e.prod(x, 0)
}

pub(crate) fn right_mul(x: &CendElem, e: &CendElem) -> CendElem {
    x.brace(e, 0)
}

pub fn pierce_decompose(algebra: &SubalgebraPresentation, e: &CendElem) -> Result<PierceDecomposition, SpanError> {
    if !is_idempotent(e) {
        return Err(SpanError::NotIdempotent(e.to_string()));
    }
    match algebra.span.contains(e) {
        Ok(true) => {}
        Ok(false) | Err(SpanError::BoundExceeded { .. }) => return Err(SpanError::NotMember(e.to_string())),
        Err(err) => return Err(err),
    }
    let size = algebra.span.size();
    let mut parts: [Vec<CendElem>; 4] = Default::default();
    for c in algebra.span.basis() {
        let r = right_mul(&c, e);
        let rest = &c - &r;
        let ee = left_mul(e, &r);
        let ef = left_mul(e, &rest);
        parts[1].push(&r - &ee);
        parts[0].push(ee);
        parts[3].push(&rest - &ef);
        parts[2].push(ef);
    }
    let bound = parts
        .iter()
        .flatten()
        .filter_map(CendElem::deg_v)
        .max()
        .unwrap_or(0)
        .max(algebra.span.bound());
    let [ee, fe, ef, ff] = parts.map(|p| HSpan::new(size, bound, p));
    let (ee, fe, ef, ff) = (ee?, fe?, ef?, ff?);
    let total = HSpan::sum(size, &[&ee, &fe, &ef, &ff])?;
    let sums_to_algebra = total.same_module(&algebra.span)?;
    let independent = total.rank() == ee.rank() + fe.rank() + ef.rank() + ff.rank();
    Ok(PierceDecomposition {
        ee,
        fe,
        ef,
        ff,
        sums_to_algebra,
        independent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(s: &str) -> CendElem {
        CendElem::parse(s).unwrap()
    }

    fn units(n: usize) -> Vec<CendElem> {
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                out.push(CendElem::unit(n, i, j));
            }
        }
        out
    }

    fn strict_upper(n: usize) -> Vec<CendElem> {
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                out.push(CendElem::unit(n, i, j));
            }
        }
        out
    }

    fn triangular(n: usize) -> Vec<CendElem> {
        let mut out = Vec::new();
        for i in 0..n {
            for j in i..n {
                out.push(CendElem::unit(n, i, j));
            }
        }
        out
    }

    #[test]
    fn current_algebra_is_closed() {
        let curr = close_subalgebra(2, units(2), 0).unwrap();
        assert!(curr.closed_under_products);
        assert_eq!(curr.span.rank(), 4);
        assert_eq!(curr.span.generators().len(), 4);
        let again = close_subalgebra(2, curr.span.basis(), 0).unwrap();
        assert!(again.span.same_module(&curr.span).unwrap());
    }

    #[test]
    fn unbounded_closure_is_reported() {
        let err = close_subalgebra(1, vec![el("v")], 4).unwrap_err();
        assert!(matches!(err, SpanError::Escape { bound: 4, .. }), "{err}");
    }

    #[test]
    fn empty_generators_give_zero_span() {
        let s = close_subalgebra(2, Vec::new(), 1).unwrap();
        assert!(s.span.is_zero());
    }

    #[test]
    fn ideal_examples() {
        let tri = close_subalgebra(2, triangular(2), 0).unwrap();
        let strict = HSpan::new(2, 0, strict_upper(2)).unwrap();
        assert!(verify_ideal(&strict, &tri).unwrap().is_ideal);
        assert!(verify_ideal(&tri.span, &tri).unwrap().is_ideal);

        let curr = close_subalgebra(2, units(2), 0).unwrap();
        let check = verify_ideal(&strict, &curr).unwrap();
        assert!(!check.is_ideal);
        let w = check.witness.unwrap();
        assert_eq!((w.kind.as_str(), w.n), ("x⊛_n a", 0));
        assert_eq!(w.x, CendElem::unit(2, 1, 0));
        assert_eq!(w.product, CendElem::unit(2, 1, 1));

        let outside = HSpan::new(2, 0, [CendElem::unit(2, 1, 0)]).unwrap();
        assert!(matches!(verify_ideal(&outside, &tri), Err(SpanError::NotContained(_))));
    }

    #[test]
    fn nilpotency_examples() {
        let n2 = HSpan::new(2, 0, strict_upper(2)).unwrap();
        assert_eq!(nilpotency_index(&n2, 10).unwrap().index, 2);
        let n3 = HSpan::new(3, 0, strict_upper(3)).unwrap();
        let r = nilpotency_index(&n3, 10).unwrap();
        assert_eq!(r.index, 3);
        assert_eq!(r.ranks, vec![3, 1, 0]);
        assert_eq!(nilpotency_index(&HSpan::zero(2, 0), 10).unwrap().index, 1);
        let full = HSpan::new(2, 0, units(2)).unwrap();
        assert_eq!(nilpotency_index(&full, 4).unwrap_err(), SpanError::CapExhausted { cap: 4 });
    }

    #[test]
    fn quotient_example() {
        let strict = HSpan::new(2, 0, strict_upper(2)).unwrap();
        let x = el("[[1, D],[0, 0]]");
        assert_eq!(quotient_reduce(&x, &strict).unwrap(), CendElem::unit(2, 0, 0));
    }

    #[test]
    fn pierce_examples() {
        let curr = close_subalgebra(2, units(2), 0).unwrap();
        let e11 = CendElem::unit(2, 0, 0);
        let p = pierce_decompose(&curr, &e11).unwrap();
        let expect = |i, j| HSpan::new(2, 0, [CendElem::unit(2, i, j)]).unwrap();
        assert!(p.ee.same_module(&expect(0, 0)).unwrap());
        assert!(p.fe.same_module(&expect(1, 0)).unwrap());
        assert!(p.ef.same_module(&expect(0, 1)).unwrap());
        assert!(p.ff.same_module(&expect(1, 1)).unwrap());
        assert!(p.sums_to_algebra && p.independent);

        let unit = pierce_decompose(&curr, &CendElem::identity(2)).unwrap();
        assert!(unit.ee.same_module(&curr.span).unwrap());
        assert!(unit.fe.is_zero() && unit.ef.is_zero() && unit.ff.is_zero());

        let zero = pierce_decompose(&curr, &CendElem::zero(2)).unwrap();
        assert!(zero.ff.same_module(&curr.span).unwrap());
        assert!(zero.ee.is_zero());

        assert!(matches!(pierce_decompose(&curr, &el("[[1, 1],[1, 1]]")), Err(SpanError::NotIdempotent(_))));
    }
}
