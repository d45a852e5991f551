use std::collections::BTreeMap;

use serde::Serialize;

use super::{
    corner_of, lift_conformal_generator, lift_idempotent, lift_orthogonal_family, units::build_matrix_units,
    units::verify_cend_relations, units::MatrixUnitSystem, LiftContext, LiftError, LiftReport, LiftStage,
};
use crate::arith::linsolve::{Inconsistency, SparseSystem, SparseVec};
use crate::arith::Rational;
use crate::conformal::{product_table, sum_elems, table_entry, CendElem};
use crate::span::{HSpan, SpanError, SubalgebraPresentation};
use crate::weyl::DegreeBounds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BlockKind {
    Curr,
    Cend,
}

/// One simple summand of `C/R`, given by representatives of its matrix units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSpec {
    pub kind: BlockKind,
    /// Classes of `e_11, …, e_NN`.
    pub diagonal: Vec<CendElem>,
    /// Classes of `e_12, …, e_1N`.
    pub row: Vec<CendElem>,
    /// Classes of `e_21, …, e_N1`.
    pub column: Vec<CendElem>,
    /// Class of `v·e_11` for a `Cend` block.
    pub generator: Option<CendElem>,
    /// Highest power of the lifted generator put into `S` for a `Cend` block.
    pub window: usize,
}

impl BlockSpec {
    pub fn curr(diagonal: Vec<CendElem>, row: Vec<CendElem>, column: Vec<CendElem>) -> Self {
        BlockSpec {
            kind: BlockKind::Curr,
            diagonal,
            row,
            column,
            generator: None,
            window: 0,
        }
    }

    pub fn cend(
        diagonal: Vec<CendElem>,
        row: Vec<CendElem>,
        column: Vec<CendElem>,
        generator: CendElem,
        window: usize,
    ) -> Self {
        BlockSpec {
            kind: BlockKind::Cend,
            diagonal,
            row,
            column,
            generator: Some(generator),
            window,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SplitInput {
    pub algebra: SubalgebraPresentation,
    pub radical: HSpan,
    /// A unit of `C/R`; searched for on the algebra basis when absent.
    pub unit_class: Option<CendElem>,
    pub blocks: Vec<BlockSpec>,
    pub bounds: DegreeBounds,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitResult {
    pub semisimple: HSpan,
    pub unit: CendElem,
    pub blocks: Vec<MatrixUnitSystem>,
    pub generators: Vec<Option<CendElem>>,
    pub report: LiftReport,
}

/// Result of looking for `u` with `u⊛_0 x ≡ x mod R` on the algebra basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitSearch {
    pub unit: Option<CendElem>,
    pub candidates: usize,
    pub equations: usize,
    /// Basis elements left out because a product leaves the radical's bound.
    pub skipped: usize,
    pub inconsistency: Option<Inconsistency>,
}

fn coordinates(x: &CendElem, tag: usize, out: &mut BTreeMap<(usize, usize, usize, usize), Rational>) {
    for (pos, p) in x.matrix().entries().iter().enumerate() {
        for (d, k, c) in p.terms() {
            *out.entry((tag, pos, d, k)).or_default() += c;
        }
    }
}

/// Solves for a left unit modulo `radical` among `Q`-combinations of the
/// algebra basis. `D`-multiples need no search: `(D a)⊛_0 x = 0`.
pub fn unit_search(algebra: &SubalgebraPresentation, radical: &HSpan) -> Result<UnitSearch, LiftError> {
    let cands = algebra.span.basis();
    let mut rows: BTreeMap<(usize, usize, usize, usize), SparseVec> = BTreeMap::new();
    let mut rhs: BTreeMap<(usize, usize, usize, usize), Rational> = BTreeMap::new();
    let mut skipped = 0;
    'basis: for (xi, x) in cands.iter().enumerate() {
        let mut prods = Vec::with_capacity(cands.len());
        for w in &cands {
            match radical.reduce(&w.prod(x, 0)) {
                Ok(r) => prods.push(r),
                Err(SpanError::BoundExceeded { .. }) => {
                    skipped += 1;
                    continue 'basis;
                }
                Err(e) => return Err(e.into()),
            }
        }
        let target = match radical.reduce(x) {
            Ok(r) => r,
            Err(SpanError::BoundExceeded { .. }) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        for (wi, r) in prods.iter().enumerate() {
            let mut coords = BTreeMap::new();
            coordinates(r, xi, &mut coords);
            for (key, c) in coords {
                if !num_traits::Zero::is_zero(&c) {
                    rows.entry(key).or_default().insert(wi, c);
                }
            }
        }
        coordinates(&target, xi, &mut rhs);
    }
    for key in rhs.keys() {
        rows.entry(*key).or_default();
    }
    let mut sys = SparseSystem::new();
    let equations = rows.len();
    for (tag, (key, coeffs)) in rows.into_iter().enumerate() {
        let b = rhs.get(&key).cloned().unwrap_or_default();
        if let Err(inc) = sys.add_equation(coeffs, b, tag) {
            return Ok(UnitSearch {
                unit: None,
                candidates: cands.len(),
                equations,
                skipped,
                inconsistency: Some(inc),
            });
        }
    }
    let sol = sys.solve();
    let size = algebra.span.size();
    let unit = sol
        .iter()
        .fold(CendElem::zero(size), |acc, (wi, c)| &acc + &cands[*wi].scale(c));
    Ok(UnitSearch {
        unit: Some(unit),
        candidates: cands.len(),
        equations,
        skipped,
        inconsistency: None,
    })
}

/// Membership that treats a product beyond a windowed span's bound as
/// undecided (`None`).
fn windowed_member(ctx: &LiftContext, span: &HSpan, x: &CendElem) -> Result<Option<bool>, LiftError> {
    match ctx.member(span, x) {
        Err(LiftError::Span(SpanError::BoundExceeded { .. })) if !ctx.algebra().closed_under_products => Ok(None),
        other => other.map(Some),
    }
}

/// Splits `C = S ⊕ R` for a radical `R` when `C/R` has a unit.
pub fn split_radical(input: &SplitInput) -> Result<SplitResult, LiftError> {
    let size = input.algebra.span.size();
    let mut report = LiftReport::default();

    let mut stage = LiftStage::new("radical");
    let ctx = LiftContext::new(input.algebra.clone(), input.radical.clone())?;
    stage.check("R is an ideal of C", true);
    stage.check(format!("R^{} = 0", ctx.nilpotency()), ctx.power(ctx.nilpotency()).is_zero());
    report.require(stage)?;

    let mut stage = LiftStage::new("unit of C/R");
    let unit_class = match &input.unit_class {
        Some(u) => u.clone(),
        None => {
            let search = unit_search(&input.algebra, &input.radical)?;
            stage.iterations = search.candidates;
            match search.unit {
                Some(u) => u,
                None => {
                    stage.check("C/R contains a left unit", false);
                    report.stages.push(stage);
                    return Err(LiftError::UnitHypothesis {
                        reason: format!(
                            "no u in C with u⊛_0x ≡ x mod R: {} equations in {} unknowns are inconsistent",
                            search.equations, search.candidates
                        ),
                        report: Box::new(report),
                    });
                }
            }
        }
    };
    stage.element("ū", &unit_class);
    let mut ok = stage.check("ū ∈ C", ctx.in_algebra(&unit_class)?);
    let table = product_table(&unit_class, &unit_class).expect("sizes agree");
    for n in 0..table.len().max(1) {
        let mut defect = table_entry(&table, n, size);
        if n == 0 {
            defect = &defect - &unit_class;
        }
        let inside = windowed_member(&ctx, ctx.ideal(), &defect)?.unwrap_or(true);
        ok &= stage.check(format!("ū⊛_{n}ū − δ_(n,0)ū ∈ R"), inside);
    }
    let mut left_unit = true;
    for x in input.algebra.span.basis() {
        left_unit &= windowed_member(&ctx, ctx.ideal(), &(&unit_class.prod(&x, 0) - &x))?.unwrap_or(true);
    }
    ok &= stage.check("ū⊛_0x ≡ x mod R", left_unit);
    if !ok {
        let reason = stage.first_failure().map(|c| c.relation.clone()).unwrap_or_default();
        report.stages.push(stage);
        return Err(LiftError::UnitHypothesis {
            reason,
            report: Box::new(report),
        });
    }
    report.stages.push(stage);

    let lifted = lift_idempotent(&ctx, &unit_class, input.bounds)?;
    let e = lifted.value;
    report.extend(lifted.report);

    let mut stage = LiftStage::new("Pierce corner");
    let ctx0 = ctx.corner(&e)?;
    let mut outside = true;
    for c in input.algebra.span.basis() {
        outside &= windowed_member(&ctx, ctx.ideal(), &(&c - &corner_of(&e, &c)))?.unwrap_or(true);
    }
    stage.element("e", &e);
    stage.check("C ⊆ e⊛_0{C⊛_0e} + R", outside);
    report.finish(stage)?;

    let classes: Vec<CendElem> = input.blocks.iter().map(|b| sum_elems(size, &b.diagonal)).collect();
    let block_units = lift_orthogonal_family(&ctx0, &classes, input.bounds)?;
    report.extend(block_units.report);

    let mut gens: Vec<CendElem> = Vec::new();
    let mut systems = Vec::new();
    let mut generators = Vec::new();
    for (b, (block, eb)) in input.blocks.iter().zip(&block_units.value).enumerate() {
        let ctx_b = ctx0.corner(eb)?;
        let diag = lift_orthogonal_family(&ctx_b, &block.diagonal, input.bounds)?;
        report.extend(diag.report);
        let units = build_matrix_units(&ctx_b, &diag.value, &block.row, &block.column, input.bounds)?;
        report.extend(units.report);
        let system = units.value;
        gens.extend(system.elements().cloned());
        let mut generator = None;
        if block.kind == BlockKind::Cend {
            let class = block
                .generator
                .as_ref()
                .ok_or_else(|| LiftError::precondition(format!("block {} has no generator class", b + 1)))?;
            let e11 = system.get(0, 0);
            let ctx_11 = ctx_b.corner(e11)?;
            let x1 = lift_conformal_generator(&ctx_11, &corner_of(e11, class))?;
            report.extend(x1.report);
            let x1 = x1.value;
            let terms: Vec<CendElem> = (0..system.size)
                .map(|i| system.get(i, 0).prod(&x1, 0).prod(system.get(0, i), 0))
                .collect();
            let x = sum_elems(size, &terms);
            let rel = verify_cend_relations(&system, &x);
            let mut stage = LiftStage::new(format!("Cend relations of block {}", b + 1));
            stage.element("x", &x);
            stage.checks = rel.checks;
            report.finish(stage)?;
            let mut power = x1.clone();
            for _ in 0..block.window {
                for i in 0..system.size {
                    for j in 0..system.size {
                        let g = system.get(i, 0).prod(&power, 0).prod(system.get(0, j), 0);
                        if g.deg_v().is_none_or(|d| d <= input.algebra.bound) {
                            gens.push(g);
                        }
                    }
                }
                power = power.prod(&x1, 0);
            }
            generator = Some(x);
        }
        systems.push(system);
        generators.push(generator);
    }

    let mut stage = LiftStage::new("semisimple part");
    let bound = input.algebra.bound;
    let s = HSpan::new(size, bound, gens)?;
    let r_window = if input.algebra.closed_under_products {
        input.radical.clone()
    } else {
        let kept = input
            .radical
            .generators()
            .iter()
            .filter(|g| g.deg_v().is_none_or(|d| d <= bound))
            .cloned();
        HSpan::new(size, bound, kept)?
    };
    let total = HSpan::sum(size, &[&s, &r_window])?;
    stage.check("S ∩ R = 0", total.rank() == s.rank() + r_window.rank());
    stage.check("S + R = C", total.same_module(&input.algebra.span)?);
    let mut closed = true;
    let s_ctx = LiftContext {
        algebra: SubalgebraPresentation {
            span: s.clone(),
            closed_under_products: input.algebra.closed_under_products,
            bound,
        },
        ideal: HSpan::zero(size, bound),
        powers: vec![HSpan::zero(size, bound)],
        unit: None,
    };
    let basis = s.basis();
    for a in &basis {
        for c in &basis {
            for p in product_table(a, c).expect("sizes agree") {
                closed &= windowed_member(&s_ctx, &s, &p)?.unwrap_or(true);
            }
        }
    }
    stage.check("S is closed under every ⊛_n", closed);
    report.finish(stage)?;

    Ok(SplitResult {
        semisimple: s,
        unit: e,
        blocks: systems,
        generators,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::span::close_subalgebra;

    const B: DegreeBounds = DegreeBounds { d: 2, v: 2 };

    fn triangular(n: usize) -> SplitInput {
        let mut all = Vec::new();
        let mut strict = Vec::new();
        for i in 0..n {
            for j in i..n {
                all.push(CendElem::unit(n, i, j));
                if j > i {
                    strict.push(CendElem::unit(n, i, j));
                }
            }
        }
        SplitInput {
            algebra: close_subalgebra(n, all, 0).unwrap(),
            radical: HSpan::new(n, 0, strict).unwrap(),
            unit_class: None,
            blocks: (0..n)
                .map(|i| BlockSpec::curr(vec![CendElem::unit(n, i, i)], vec![], vec![]))
                .collect(),
            bounds: B,
        }
    }

    #[test]
    fn triangular_splits_into_diagonal() {
        let input = triangular(3);
        let out = split_radical(&input).unwrap();
        let diag = HSpan::new(3, 0, (0..3).map(|i| CendElem::unit(3, i, i))).unwrap();
        assert!(out.semisimple.same_module(&diag).unwrap());
        assert_eq!(out.unit, CendElem::identity(3));
        assert!(out.report.passed());

        let again = SplitInput {
            algebra: SubalgebraPresentation::verified(out.semisimple.clone()).unwrap(),
            radical: HSpan::zero(3, 0),
            unit_class: Some(out.unit.clone()),
            blocks: out
                .blocks
                .iter()
                .map(|s| BlockSpec::curr(vec![s.get(0, 0).clone()], vec![], vec![]))
                .collect(),
            bounds: B,
        };
        let twice = split_radical(&again).unwrap();
        assert!(twice.semisimple.same_module(&out.semisimple).unwrap());
    }

    #[test]
    fn unit_search_finds_identity() {
        let input = triangular(2);
        let found = unit_search(&input.algebra, &input.radical).unwrap();
        assert_eq!(found.unit, Some(CendElem::identity(2)));
        assert_eq!(found.skipped, 0);
    }

    #[test]
    fn unit_search_reports_inconsistency() {
        // strict upper triangular algebra modulo zero has no left unit
        let algebra = close_subalgebra(2, vec![CendElem::unit(2, 0, 1)], 0).unwrap();
        let found = unit_search(&algebra, &HSpan::zero(2, 0)).unwrap();
        assert!(found.unit.is_none());
        assert!(found.inconsistency.is_some());
    }

    #[test]
    fn semisimple_algebra_is_its_own_split() {
        let gens: Vec<CendElem> = MatrixUnitSystem::canonical(2).elements().cloned().collect();
        let input = SplitInput {
            algebra: close_subalgebra(2, gens, 0).unwrap(),
            radical: HSpan::zero(2, 0),
            unit_class: Some(CendElem::identity(2)),
            blocks: vec![BlockSpec::curr(
                vec![CendElem::unit(2, 0, 0), CendElem::unit(2, 1, 1)],
                vec![CendElem::unit(2, 0, 1)],
                vec![CendElem::unit(2, 1, 0)],
            )],
            bounds: B,
        };
        let out = split_radical(&input).unwrap();
        assert!(out.semisimple.same_module(&input.algebra.span).unwrap());
        assert_eq!(out.blocks[0], MatrixUnitSystem::canonical(2));
    }
}
