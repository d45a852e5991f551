use serde::Serialize;

use super::{orthogonal_pair, LiftContext, LiftError, LiftReport, LiftStage, Lifted, RelationCheck};
use crate::conformal::{is_idempotent, product_table, sum_elems, table_entry, CendElem};
use crate::weyl::{interpolate_conformal, DegreeBounds, OperatorForm, OperatorSequence};

/// Elements `e_ij`, `1 ≤ i, j ≤ N`, with `e_ij ⊛_n e_kl = δ_(n,0) δ_(j,k) e_il`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatrixUnitSystem {
    pub size: usize,
    pub units: Vec<Vec<CendElem>>,
}

impl MatrixUnitSystem {
    pub fn new(units: Vec<Vec<CendElem>>) -> Self {
        assert!(units.iter().all(|row| row.len() == units.len()), "matrix units form a square array");
        MatrixUnitSystem {
            size: units.len(),
            units,
        }
    }

    /// `1⊗E_ij` in `Cend_n`.
    pub fn canonical(n: usize) -> Self {
        MatrixUnitSystem::new((0..n).map(|i| (0..n).map(|j| CendElem::unit(n, i, j)).collect()).collect())
    }

    /// `e_ij` with zero-based indices.
    pub fn get(&self, i: usize, j: usize) -> &CendElem {
        &self.units[i][j]
    }

    pub fn elements(&self) -> impl Iterator<Item = &CendElem> {
        self.units.iter().flatten()
    }
}

/// Checks every product `e_ij ⊛_n e_kl` against `δ_(n,0) δ_(j,k) e_il` for
/// all `n` below the locality.
pub fn verify_matrix_units(system: &MatrixUnitSystem) -> Vec<RelationCheck> {
    let n = system.size;
    let mut out = Vec::with_capacity(n.pow(4));
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let a = system.get(i, j);
                    let b = system.get(k, l);
                    let table = product_table(a, b).expect("sizes agree");
                    let passed = if j == k {
                        table.len() <= 1 && table_entry(&table, 0, a.size()) == *system.get(i, l)
                    } else {
                        table.is_empty()
                    };
                    out.push(RelationCheck {
                        relation: format!(
                            "e{}{}⊛_n e{}{} = δ_(n,0)δ_(j,k)e{}{}",
                            i + 1,
                            j + 1,
                            k + 1,
                            l + 1,
                            i + 1,
                            l + 1
                        ),
                        passed,
                    });
                }
            }
        }
    }
    out
}

/// Outcome of checking the `Cend_N` defining relations for `(e_ij, x)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CendRelationsReport {
    pub passed: bool,
    pub checks: Vec<RelationCheck>,
}

/// Checks `e_ij⊛_0x = x⊛_0e_ij`, `e_ij⊛_1x = e_ij`, `e_ij⊛_n x = 0` for
/// `n ≥ 2`, `x⊛_n e_ij = 0` for `n ≥ 1` and `Σ e_ii⊛_0x = Σ x⊛_0e_ii = x`.
pub fn verify_cend_relations(system: &MatrixUnitSystem, x: &CendElem) -> CendRelationsReport {
    let size = x.size();
    let mut checks = Vec::new();
    let mut push = |relation: String, passed: bool| checks.push(RelationCheck { relation, passed });
    for i in 0..system.size {
        for j in 0..system.size {
            let e = system.get(i, j);
            let (a, b) = (i + 1, j + 1);
            let ex = product_table(e, x).expect("sizes agree");
            let xe = product_table(x, e).expect("sizes agree");
            push(
                format!("e{a}{b}⊛_0x = x⊛_0e{a}{b}"),
                table_entry(&ex, 0, size) == table_entry(&xe, 0, size),
            );
            push(format!("e{a}{b}⊛_1x = e{a}{b}"), table_entry(&ex, 1, size) == *e);
            push(format!("e{a}{b}⊛_n x = 0 for n ≥ 2"), ex.len() <= 2);
            push(format!("x⊛_n e{a}{b} = 0 for n ≥ 1"), xe.len() <= 1);
        }
    }
    let diag: Vec<&CendElem> = (0..system.size).map(|i| system.get(i, i)).collect();
    let left = sum_elems(size, diag.iter().map(|e| e.prod(x, 0)).collect::<Vec<_>>().iter());
    let right = sum_elems(size, diag.iter().map(|e| x.prod(e, 0)).collect::<Vec<_>>().iter());
    push("Σ e_ii⊛_0x = x".to_string(), left == *x);
    push("Σ x⊛_0e_ii = x".to_string(), right == *x);
    CendRelationsReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn geometric_inverse(a: &CendElem, nilpotency: usize) -> CendElem {
    // b = −a + a² − a³ + …, finite because a⊛_0 … ⊛_0 a vanishes
    let mut b = CendElem::zero(a.size());
    let mut power = a.clone();
    let mut sign = true;
    for _ in 0..nilpotency.max(1) {
        if power.is_zero() {
            break;
        }
        b = if sign { &b - &power } else { &b + &power };
        sign = !sign;
        power = power.prod(a, 0);
    }
    b
}

/// Builds matrix units from orthogonal idempotents `e_1, …, e_N` and
/// preimages `v_1j`, `v_i1` (`i, j ≥ 2`) of the off-diagonal units of `C/I`.
///
/// `row[j - 2]` is `v_1j` and `column[i - 2]` is `v_i1`; `bounds` caps the
/// degrees of the interpolated corner elements `h_j`.
pub fn build_matrix_units(
    ctx: &LiftContext,
    diagonal: &[CendElem],
    row: &[CendElem],
    column: &[CendElem],
    bounds: DegreeBounds,
) -> Result<Lifted<MatrixUnitSystem>, LiftError> {
    let n = diagonal.len();
    let size = ctx.size();
    let mut report = LiftReport::default();
    let mut pre = LiftStage::new("hypotheses");
    pre.check("N ≥ 1", n >= 1);
    pre.check("N − 1 preimages v_1j", row.len() + 1 == n.max(1));
    pre.check("N − 1 preimages v_i1", column.len() + 1 == n.max(1));
    for (i, a) in diagonal.iter().enumerate() {
        for (j, b) in diagonal.iter().enumerate() {
            pre.check(
                format!("e{}⊛_n e{} = δ_(n,0)δ_(i,j)e{}", i + 1, j + 1, j + 1),
                orthogonal_pair(a, b, i == j),
            );
        }
    }
    report.require(pre)?;
    let e1 = &diagonal[0];

    let mut stage = LiftStage::new("preimages");
    let mut f_row = Vec::with_capacity(n - 1);
    let mut f_col = Vec::with_capacity(n - 1);
    for j in 1..n {
        let ej = &diagonal[j];
        let v1j = e1.prod(&row[j - 1], 0).prod(ej, 0);
        let vj1 = ej.prod(&column[j - 1], 0).prod(e1, 0);
        stage.check(format!("normalized v1{} ≡ v1{} mod I", j + 1, j + 1), ctx.in_ideal(&(&v1j - &row[j - 1]))?);
        stage.check(format!("normalized v{}1 ≡ v{}1 mod I", j + 1, j + 1), ctx.in_ideal(&(&vj1 - &column[j - 1]))?);
        let a = &v1j.prod(&vj1, 0) - e1;
        stage.check(format!("a{} = v1{}⊛_0v{}1 − e1 ∈ I", j + 1, j + 1, j + 1), ctx.in_ideal(&a)?);
        let b = geometric_inverse(&a, ctx.nilpotency());
        stage.check(format!("a{0} + b{0} + a{0}⊛_0b{0} = 0", j + 1), (&(&a + &b) + &a.prod(&b, 0)).is_zero());
        stage.element(format!("b{}", j + 1), &b);
        f_col.push(&vj1 + &vj1.prod(&b, 0));
        f_row.push(v1j);
    }
    report.require(stage)?;

    let mut stage = LiftStage::new("relations of f");
    stage.check("e1⊛_n e1 = δ_(n,0)e1", is_idempotent(e1));
    for j in 1..n {
        let (f1j, fj1) = (&f_row[j - 1], &f_col[j - 1]);
        let t = j + 1;
        stage.element(format!("f1{t}"), f1j);
        stage.element(format!("f{t}1"), fj1);
        stage.check(format!("e1⊛_0f1{t} = f1{t}"), e1.prod(f1j, 0) == *f1j);
        stage.check(format!("f{t}1⊛_0e1 = f{t}1"), fj1.prod(e1, 0) == *fj1);
        stage.check(format!("f1{t}⊛_0f{t}1 = e1"), f1j.prod(fj1, 0) == *e1);
        stage.check(format!("f{t}1⊛_n e1 = 0 for n ≥ 1"), product_table(fj1, e1).unwrap().len() <= 1);
        stage.check(
            format!("f1{t}⊛_n e{t} = 0 for n ≥ 1"),
            product_table(f1j, &diagonal[j]).unwrap().len() <= 1,
        );
        for i in 1..n {
            let s = i + 1;
            if i != j {
                stage.check(
                    format!("f1{t}⊛_n f{s}1 = 0"),
                    product_table(f1j, &f_col[i - 1]).unwrap().is_empty(),
                );
            }
            stage.check(format!("f1{t}⊛_n f1{s} = 0"), product_table(f1j, &f_row[i - 1]).unwrap().is_empty());
            stage.check(format!("f{t}1⊛_n f{s}1 = 0"), product_table(fj1, &f_col[i - 1]).unwrap().is_empty());
        }
    }
    report.finish(stage)?;

    let mut stage = LiftStage::new("corner elements h_j");
    let mut hs = Vec::with_capacity(n - 1);
    for j in 1..n {
        let (f1j, fj1) = (&f_row[j - 1], &f_col[j - 1]);
        let (col, rowf) = (OperatorForm::of(fj1), OperatorForm::of(f1j));
        let first = &col.at(0) * &rowf.at(0);
        let step = &col.at(1) * &rowf.at(0);
        let mut ops = vec![first];
        let mut cur = step.clone();
        for _ in 0..=bounds.d {
            ops.push(cur.clone());
            cur = &cur * &step;
        }
        let h = interpolate_conformal(&OperatorSequence::new(ops)?, size, bounds)?;
        stage.iterations += 1;
        let ej = &diagonal[j];
        let reduced = ej.prod(&h, 0).prod(ej, 0);
        let t = j + 1;
        stage.check(format!("h{t} lies in the corner of e{t}"), reduced == h);
        stage.check(format!("h{t} − e{t} ∈ I"), ctx.in_ideal(&(&reduced - ej))?);
        stage.element(format!("h{t}"), &reduced);
        hs.push(reduced);
    }
    report.finish(stage)?;

    let mut units = vec![vec![CendElem::zero(size); n]; n];
    units[0][0] = e1.clone();
    for j in 1..n {
        units[0][j] = f_row[j - 1].prod(&hs[j - 1], 0);
        units[j][0] = f_col[j - 1].clone();
    }
    for i in 1..n {
        for j in 1..n {
            units[i][j] = f_col[i - 1].prod(&units[0][j], 0);
        }
    }
    let system = MatrixUnitSystem::new(units);

    let mut stage = LiftStage::new("matrix units");
    for (i, r) in system.units.iter().enumerate() {
        for (j, e) in r.iter().enumerate() {
            stage.element(format!("e{}{}", i + 1, j + 1), e);
        }
    }
    for i in 0..n {
        stage.check(format!("e{0}{0} − e{0} ∈ I", i + 1), ctx.in_ideal(&(system.get(i, i) - &diagonal[i]))?);
    }
    for j in 1..n {
        stage.check(format!("e1{0} − v1{0} ∈ I", j + 1), ctx.in_ideal(&(system.get(0, j) - &row[j - 1]))?);
        stage.check(format!("e{0}1 − v{0}1 ∈ I", j + 1), ctx.in_ideal(&(system.get(j, 0) - &column[j - 1]))?);
    }
    stage.checks.extend(verify_matrix_units(&system));
    report.finish(stage)?;
    Ok(Lifted { value: system, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::span::HSpan;
    use crate::span::SubalgebraPresentation;

    fn el(s: &str) -> CendElem {
        CendElem::parse(s).unwrap()
    }

    #[test]
    fn canonical_units_satisfy_relations() {
        for n in 1..=3 {
            let sys = MatrixUnitSystem::canonical(n);
            assert!(verify_matrix_units(&sys).iter().all(|c| c.passed));
            let x = CendElem::identity(n).mul_scalar(&crate::arith::PolyDV::v());
            assert!(verify_cend_relations(&sys, &x).passed, "n = {n}");
        }
    }

    #[test]
    fn square_generator_breaks_relations() {
        let sys = MatrixUnitSystem::canonical(2);
        let x = el("[[v^2, 0],[0, v^2]]");
        let report = verify_cend_relations(&sys, &x);
        assert!(!report.passed);
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.relation.as_str()).collect();
        assert!(failed.contains(&"e12⊛_n x = 0 for n ≥ 2"));
    }

    #[test]
    fn single_unit_pair() {
        let sys = MatrixUnitSystem::canonical(1);
        assert!(verify_cend_relations(&sys, &el("[[v]]")).passed);
    }

    #[test]
    fn curr2_units_survive_when_radical_vanishes() {
        let gens: Vec<CendElem> = MatrixUnitSystem::canonical(2).elements().cloned().collect();
        let algebra = SubalgebraPresentation::verified(HSpan::new(2, 0, gens).unwrap()).unwrap();
        let ctx = LiftContext::new(algebra, HSpan::zero(2, 0))
            .unwrap()
            .with_unit(CendElem::identity(2))
            .unwrap();
        let diag = [CendElem::unit(2, 0, 0), CendElem::unit(2, 1, 1)];
        let bounds = DegreeBounds { d: 1, v: 1 };
        let out = build_matrix_units(&ctx, &diag, &[CendElem::unit(2, 0, 1)], &[CendElem::unit(2, 1, 0)], bounds).unwrap();
        assert_eq!(out.value, MatrixUnitSystem::canonical(2));
        assert!(out.report.passed());

        let one = build_matrix_units(&ctx, &[CendElem::identity(2)], &[], &[], bounds).unwrap();
        assert_eq!(one.value.units, vec![vec![CendElem::identity(2)]]);
    }
}
