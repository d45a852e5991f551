use super::{LiftContext, LiftError, LiftReport, LiftStage, Lifted};
use crate::arith::Rational;
use crate::conformal::{product_table, CendElem};
use crate::span::HSpan;

/// Locality of `e` and `x` modulo `span`: the least `n` with `e⊛_m x ∈ span`
/// for every `m ≥ n`.
fn locality_mod(ctx: &LiftContext, e: &CendElem, x: &CendElem, span: &HSpan) -> Result<usize, LiftError> {
    let table = product_table(e, x).expect("sizes agree");
    let mut n = table.len();
    while n > 0 && (table[n - 1].is_zero() || ctx.member(span, &table[n - 1])?) {
        n -= 1;
    }
    Ok(n)
}

/// Lifts `x̄` with `x̄⊛_0ē = x̄` and `ē⊛_1x̄ = ē` in `C/I` to `x` with
/// `x⊛_0 e = x` and `e⊛_1 x = e` exactly, working through
/// `C/I^2, C/I^3, …, C`.
pub fn lift_conformal_generator(ctx: &LiftContext, x0: &CendElem) -> Result<Lifted<CendElem>, LiftError> {
    let e = ctx.require_unit()?.clone();
    let mut report = LiftReport::default();
    let mut pre = LiftStage::new("hypotheses mod I");
    pre.check("x0 ∈ C", ctx.in_algebra(x0)?);
    pre.check("x0⊛_0e − x0 ∈ I", ctx.in_ideal(&(&x0.prod(&e, 0) - x0))?);
    pre.check("e⊛_1x0 − e ∈ I", ctx.in_ideal(&(&e.prod(x0, 1) - &e))?);
    report.require(pre)?;

    let mut stage = LiftStage::new("right normalization");
    let mut x = x0.prod(&e, 0);
    stage.element("x", &x);
    stage.check("x⊛_0e = x", x.prod(&e, 0) == x);
    report.finish(stage)?;

    for k in 1..ctx.nilpotency() {
        let modulus = ctx.power(k + 1);
        let mut stage = LiftStage::new(format!("lift modulo I^{}", k + 1));
        let mut loc = locality_mod(ctx, &e, &x, &modulus)?;
        while loc >= 3 {
            let n = Rational::from_integer((loc - 1).into());
            let defect = &x.prod(&x, 1) - &x;
            x = &x - &defect.scale(&n.recip());
            let next = locality_mod(ctx, &e, &x, &modulus)?;
            if next >= loc {
                return Err(LiftError::LocalityStalled { before: loc, after: next });
            }
            loc = next;
            stage.iterations += 1;
        }
        let b = &e.prod(&x, 1) - &e;
        x = &x - &x.prod(&b, 0);
        stage.element("x", &x);
        stage.check("x⊛_0e = x", x.prod(&e, 0) == x);
        stage.check(
            format!("e⊛_1x − e ∈ I^{}", k + 1),
            ctx.in_power(k + 1, &(&e.prod(&x, 1) - &e))?,
        );
        stage.check(
            format!("N(e, x) ≤ 2 modulo I^{}", k + 1),
            locality_mod(ctx, &e, &x, &modulus)? <= 2,
        );
        report.finish(stage)?;
    }

    let mut stage = LiftStage::new("verification");
    stage.element("x", &x);
    stage.check("x⊛_0e = x", x.prod(&e, 0) == x);
    stage.check("e⊛_1x = e", e.prod(&x, 1) == e);
    stage.check("x − x0 ∈ I", ctx.in_ideal(&(&x - x0))?);
    report.finish(stage)?;
    Ok(Lifted { value: x, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{cend1_extension, perturbed_generator};
    use crate::span::SubalgebraPresentation;

    fn el(s: &str) -> CendElem {
        CendElem::parse(s).unwrap()
    }

    fn window(size: usize, gens: Vec<CendElem>, bound: usize) -> SubalgebraPresentation {
        SubalgebraPresentation {
            span: HSpan::new(size, bound, gens).unwrap(),
            closed_under_products: false,
            bound,
        }
    }

    #[test]
    fn semisimple_case_is_unchanged() {
        let gens = (0..=4).map(|k| el(&format!("[[v^{k}]]"))).collect();
        let ctx = LiftContext::new(window(1, gens, 4), HSpan::zero(1, 4))
            .unwrap()
            .with_unit(CendElem::identity(1))
            .unwrap();
        let out = lift_conformal_generator(&ctx, &el("[[v]]")).unwrap();
        assert_eq!(out.value, el("[[v]]"));
        assert!(out.report.passed());
    }

    #[test]
    fn perturbed_generator_drops_locality() {
        let ctx = cend1_extension(4).unwrap();
        assert_eq!(ctx.nilpotency(), 2);
        let x0 = perturbed_generator();
        let e = CendElem::identity(2);
        assert_eq!(locality_mod(&ctx, &e, &x0, &ctx.power(2)).unwrap(), 3);
        let out = lift_conformal_generator(&ctx, &x0).unwrap();
        assert_eq!(out.value, el("[[v, 0],[0, v]]"));
        assert_eq!(out.report.stage("lift modulo I^2").unwrap().iterations, 1);
        assert_eq!(e.prod(&out.value, 1), e);
    }

    #[test]
    fn violated_hypothesis_is_reported() {
        let ctx = cend1_extension(4).unwrap();
        let err = lift_conformal_generator(&ctx, &el("[[v + D, 0],[0, v + D]]")).unwrap_err();
        match err {
            LiftError::Precondition { relation, .. } => assert!(relation.contains("x0⊛_0e"), "{relation}"),
            other => panic!("{other}"),
        }
    }
}
