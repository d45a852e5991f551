//! Concrete algebras with known radicals used by the lifting checks.

use crate::conformal::CendElem;
use crate::counterexample::{cx_embed, cx_module_generators, cx_radical_generators};
use crate::lifting::{BlockSpec, LiftContext, LiftError, SplitInput};
use crate::span::{close_subalgebra, HSpan, SubalgebraPresentation};
use crate::weyl::DegreeBounds;

pub const FIXTURE_BOUNDS: DegreeBounds = DegreeBounds { d: 2, v: 2 };

/// Upper triangular current matrices `C ⊂ Curr_n` with `R` the strictly
/// upper part; `C/R ≅ Curr_1^n`.
pub fn triangular_current(n: usize) -> SplitInput {
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
        algebra: close_subalgebra(n, all, 0).expect("matrix units close"),
        radical: HSpan::new(n, 0, strict).expect("constant generators"),
        unit_class: None,
        blocks: (0..n)
            .map(|i| BlockSpec::curr(vec![CendElem::unit(n, i, i)], vec![], vec![]))
            .collect(),
        bounds: FIXTURE_BOUNDS,
    }
}

pub fn triangular_context(n: usize) -> Result<LiftContext, LiftError> {
    let input = triangular_current(n);
    LiftContext::new(input.algebra, input.radical)
}

/// `E_11 + E_22 + E_12`, idempotent modulo the strictly upper part.
pub fn triangular_near_idempotent() -> CendElem {
    &(&CendElem::unit(3, 0, 0) + &CendElem::unit(3, 1, 1)) + &CendElem::unit(3, 0, 1)
}

/// `E_ij ⊗ 1` and `E_ij ⊗ ε` in `Cend_4 ⊃ Curr_2 ⊗ Q[ε]`, `ε² = 0`.
fn kron_one(i: usize, j: usize) -> CendElem {
    &CendElem::unit(4, 2 * i, 2 * j) + &CendElem::unit(4, 2 * i + 1, 2 * j + 1)
}

fn kron_eps(i: usize, j: usize) -> CendElem {
    CendElem::unit(4, 2 * i, 2 * j + 1)
}

/// `C = Curr_2 ⊗ Q[ε]` with `R = Curr_2 ⊗ ε`, so `C/R ≅ Curr_2`, together
/// with perturbed representatives of the matrix units of `C/R`.
#[derive(Debug, Clone)]
pub struct MatrixUnitFixture {
    pub algebra: SubalgebraPresentation,
    pub radical: HSpan,
    pub diagonal: Vec<CendElem>,
    pub row: Vec<CendElem>,
    pub column: Vec<CendElem>,
    pub bounds: DegreeBounds,
}

impl MatrixUnitFixture {
    pub fn context(&self) -> Result<LiftContext, LiftError> {
        LiftContext::new(self.algebra.clone(), self.radical.clone())?.with_unit(CendElem::identity(4))
    }

    pub fn split_input(&self) -> SplitInput {
        SplitInput {
            algebra: self.algebra.clone(),
            radical: self.radical.clone(),
            unit_class: None,
            blocks: vec![BlockSpec::curr(self.diagonal.clone(), self.row.clone(), self.column.clone())],
            bounds: self.bounds,
        }
    }
}

pub fn current_with_radical() -> MatrixUnitFixture {
    let mut all = Vec::new();
    let mut rad = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            all.push(kron_one(i, j));
            all.push(kron_eps(i, j));
            rad.push(kron_eps(i, j));
        }
    }
    MatrixUnitFixture {
        algebra: close_subalgebra(4, all, 0).expect("matrix units close"),
        radical: HSpan::new(4, 0, rad).expect("constant generators"),
        diagonal: vec![&kron_one(0, 0) + &kron_eps(0, 0), kron_one(1, 1)],
        row: vec![&kron_one(0, 1) + &kron_eps(0, 1)],
        column: vec![kron_one(1, 0)],
        bounds: FIXTURE_BOUNDS,
    }
}

/// `{[[a, b], [0, a]]}` with `a, b ∈ Q[D, v]` of `v`-degree at most `bound`,
/// and `I` the upper right corner.
pub fn cend1_extension(bound: usize) -> Result<LiftContext, LiftError> {
    let entry = |s: String| CendElem::parse(&s).expect("fixture parses");
    let mut gens = Vec::new();
    let mut rad = Vec::new();
    for k in 0..=2 * bound {
        let r = entry(format!("[[0, v^{k}],[0, 0]]"));
        if k <= bound {
            gens.push(entry(format!("[[v^{k}, 0],[0, v^{k}]]")));
            gens.push(r.clone());
        }
        rad.push(r);
    }
    let algebra = SubalgebraPresentation {
        span: HSpan::new(2, bound, gens).expect("bounded generators"),
        closed_under_products: false,
        bound,
    };
    let ideal = HSpan::new(2, 2 * bound, rad).expect("bounded generators");
    LiftContext::new(algebra, ideal)?.with_unit(CendElem::identity(2))
}

/// `v·Id + v²E_12`, a generator class with `N(e, x0) = 3`.
pub fn perturbed_generator() -> CendElem {
    CendElem::parse("[[v, v^2],[0, v]]").expect("fixture parses")
}

/// The algebra `Q[v−D]{a(f, g)}` up to `v`-degree `bound`, with its radical
/// up to `2·bound` and no unit class supplied.
pub fn counterexample_split_input(bound: usize) -> SplitInput {
    let gens = cx_module_generators(bound).iter().map(cx_embed).collect::<Vec<_>>();
    let rad = cx_radical_generators(2 * bound).iter().map(cx_embed).collect::<Vec<_>>();
    SplitInput {
        algebra: SubalgebraPresentation {
            span: HSpan::new(2, bound, gens).expect("bounded generators"),
            closed_under_products: false,
            bound,
        },
        radical: HSpan::new(2, 2 * bound, rad).expect("bounded generators"),
        unit_class: None,
        blocks: Vec::new(),
        bounds: FIXTURE_BOUNDS,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::{lift_idempotent_zero, split_radical, verify_matrix_units};

    #[test]
    fn triangular_nilpotency() {
        let ctx = triangular_context(3).unwrap();
        assert_eq!(ctx.nilpotency(), 3);
        let out = lift_idempotent_zero(&ctx, &triangular_near_idempotent()).unwrap();
        assert_eq!(out.value, &CendElem::unit(3, 0, 0) + &CendElem::unit(3, 1, 1));
    }

    #[test]
    fn radical_fixture_is_square_zero() {
        let fx = current_with_radical();
        let ctx = fx.context().unwrap();
        assert_eq!(ctx.nilpotency(), 2);
        for x in fx.diagonal.iter().chain(&fx.row).chain(&fx.column) {
            assert!(ctx.in_algebra(x).unwrap());
        }
    }

    #[test]
    fn matrix_unit_fixture_splits() {
        let out = split_radical(&current_with_radical().split_input()).unwrap();
        assert!(out.report.passed());
        assert!(verify_matrix_units(&out.blocks[0]).iter().all(|c| c.passed));
        let fx = current_with_radical();
        assert!(fx.radical.contains(&(out.blocks[0].get(0, 1) - &fx.row[0])).unwrap());
    }

    #[test]
    fn counterexample_has_no_unit_class() {
        match split_radical(&counterexample_split_input(4)) {
            Err(LiftError::UnitHypothesis { .. }) => {}
            other => panic!("{:?}", other.map(|r| r.unit)),
        }
    }
}
