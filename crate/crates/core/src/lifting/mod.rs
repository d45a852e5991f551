//! Lifting idempotents, conformal generators and matrix units from `C/I` to
//! `C` for a nilpotent ideal `I`, and splitting off the radical.
//!
//! Every operation returns a [`LiftReport`]: the stages it ran, how many
//! iterations each took, and every relation it checked with its outcome.

mod generator;
mod split;
mod units;

use serde::Serialize;

use crate::arith::rat;
use crate::conformal::{is_idempotent, product_table, table_entry, CendElem};
use crate::span::{power_chain, verify_ideal, HSpan, SpanError, SubalgebraPresentation};
use crate::weyl::{interpolate_conformal, DegreeBounds, OperatorForm, OperatorSequence, WeylError};

pub use generator::lift_conformal_generator;
pub use split::{split_radical, unit_search, BlockKind, BlockSpec, SplitInput, SplitResult, UnitSearch};
pub use units::{build_matrix_units, verify_cend_relations, verify_matrix_units, CendRelationsReport, MatrixUnitSystem};

pub const DEFAULT_NILPOTENCY_CAP: usize = 16;

#[derive(Debug, thiserror::Error)]
pub enum LiftError {
    #[error(transparent)]
    Span(#[from] SpanError),
    #[error(transparent)]
    Interpolation(#[from] WeylError),
    #[error("not an ideal: {0}")]
    NotIdeal(String),
    #[error("the operation needs a unit in the context")]
    MissingUnit,
    #[error("precondition failed: {relation}")]
    Precondition { relation: String, report: Box<LiftReport> },
    #[error("no exact idempotent after {cap} iterations")]
    IterationCap { cap: usize },
    #[error("locality did not decrease: {before} -> {after}")]
    LocalityStalled { before: usize, after: usize },
    #[error("verification failed: {relation}")]
    Verification { relation: String, report: Box<LiftReport> },
    #[error("unit hypothesis fails: {reason}")]
    UnitHypothesis { reason: String, report: Box<LiftReport> },
}

impl LiftError {
    /// The transcript carried by the error, if any.
    pub fn report(&self) -> Option<&LiftReport> {
        match self {
            LiftError::Precondition { report, .. }
            | LiftError::Verification { report, .. }
            | LiftError::UnitHypothesis { report, .. } => Some(report),
            _ => None,
        }
    }

    fn precondition(relation: impl Into<String>) -> Self {
        LiftError::Precondition {
            relation: relation.into(),
            report: Box::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub relation: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedElement {
    pub name: String,
    pub value: CendElem,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftStage {
    pub stage: String,
    pub iterations: usize,
    pub elements: Vec<NamedElement>,
    pub checks: Vec<RelationCheck>,
}

impl LiftStage {
    pub fn new(stage: impl Into<String>) -> Self {
        LiftStage {
            stage: stage.into(),
            iterations: 0,
            elements: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn check(&mut self, relation: impl Into<String>, passed: bool) -> bool {
        self.checks.push(RelationCheck {
            relation: relation.into(),
            passed,
        });
        passed
    }

    pub fn element(&mut self, name: impl Into<String>, value: &CendElem) {
        self.elements.push(NamedElement {
            name: name.into(),
            value: value.clone(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&RelationCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LiftReport {
    pub stages: Vec<LiftStage>,
}

impl LiftReport {
    pub fn passed(&self) -> bool {
        self.stages.iter().all(LiftStage::passed)
    }

    pub fn first_failure(&self) -> Option<&RelationCheck> {
        self.stages.iter().find_map(LiftStage::first_failure)
    }

    pub fn iterations(&self) -> usize {
        self.stages.iter().map(|s| s.iterations).sum()
    }

    pub fn stage(&self, name: &str) -> Option<&LiftStage> {
        self.stages.iter().find(|s| s.stage == name)
    }

    pub fn extend(&mut self, other: LiftReport) {
        self.stages.extend(other.stages);
    }

    /// Appends a stage whose checks are postconditions.
    fn finish(&mut self, stage: LiftStage) -> Result<(), LiftError> {
        self.close(stage, false)
    }

    /// Appends a stage whose checks are hypotheses.
    fn require(&mut self, stage: LiftStage) -> Result<(), LiftError> {
        self.close(stage, true)
    }

    fn close(&mut self, stage: LiftStage, pre: bool) -> Result<(), LiftError> {
        let failed = stage.first_failure().map(|c| format!("{}: {}", stage.stage, c.relation));
        self.stages.push(stage);
        match failed {
            None => Ok(()),
            Some(relation) if pre => Err(LiftError::Precondition {
                relation,
                report: Box::new(self.clone()),
            }),
            Some(relation) => Err(LiftError::Verification {
                relation,
                report: Box::new(self.clone()),
            }),
        }
    }
}

/// A lifted value together with the transcript that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lifted<T> {
    pub value: T,
    pub report: LiftReport,
}

/// An algebra, a nilpotent ideal with its power chain, and optionally a unit.
#[derive(Debug, Clone)]
pub struct LiftContext {
    algebra: SubalgebraPresentation,
    ideal: HSpan,
    powers: Vec<HSpan>,
    unit: Option<CendElem>,
}

impl LiftContext {
    pub fn new(algebra: SubalgebraPresentation, ideal: HSpan) -> Result<Self, LiftError> {
        Self::with_cap(algebra, ideal, DEFAULT_NILPOTENCY_CAP)
    }

    /// Verifies the ideal and computes `I, I^2, …` up to the first zero power.
    pub fn with_cap(algebra: SubalgebraPresentation, ideal: HSpan, cap: usize) -> Result<Self, LiftError> {
        let check = verify_ideal(&ideal, &algebra)?;
        if let Some(w) = check.witness {
            return Err(LiftError::NotIdeal(format!(
                "{} leaves the ideal for n = {} (x = {}, a = {})",
                w.kind, w.n, w.x, w.a
            )));
        }
        let powers = power_chain(&ideal, cap)?;
        Ok(LiftContext {
            algebra,
            ideal,
            powers,
            unit: None,
        })
    }

    /// Attaches a unit after checking `e⊛_n e = δ_(n,0) e`, `e ∈ C` and
    /// `e⊛_0 x = x` on the algebra basis.
    pub fn with_unit(mut self, e: CendElem) -> Result<Self, LiftError> {
        if !is_idempotent(&e) {
            return Err(LiftError::precondition(format!("unit {e} is not idempotent")));
        }
        if !self.in_algebra(&e)? {
            return Err(LiftError::precondition(format!("unit {e} does not lie in the algebra")));
        }
        if let Some(x) = self.algebra.span.basis().into_iter().find(|x| e.prod(x, 0) != *x) {
            return Err(LiftError::precondition(format!("{e} ⊛_0 {x} differs from {x}")));
        }
        self.unit = Some(e);
        Ok(self)
    }

    pub fn algebra(&self) -> &SubalgebraPresentation {
        &self.algebra
    }

    pub fn ideal(&self) -> &HSpan {
        &self.ideal
    }

    pub fn unit(&self) -> Option<&CendElem> {
        self.unit.as_ref()
    }

    pub fn size(&self) -> usize {
        self.algebra.span.size()
    }

    /// Smallest `ν` with `I^ν = 0`.
    pub fn nilpotency(&self) -> usize {
        self.powers.len()
    }

    /// `I^k` for `k ≥ 1`; zero once `k ≥ ν`.
    pub fn power(&self, k: usize) -> HSpan {
        assert!(k >= 1);
        match self.powers.get(k - 1) {
            Some(p) => p.clone(),
            None => HSpan::zero(self.size(), self.ideal.bound()),
        }
    }

    fn member(&self, span: &HSpan, x: &CendElem) -> Result<bool, LiftError> {
        match span.contains(x) {
            Err(SpanError::BoundExceeded { degree, .. }) if self.algebra.closed_under_products => {
                Ok(span.with_bound(degree)?.contains(x)?)
            }
            other => Ok(other?),
        }
    }

    pub fn in_ideal(&self, x: &CendElem) -> Result<bool, LiftError> {
        self.member(&self.ideal, x)
    }

    pub fn in_power(&self, k: usize, x: &CendElem) -> Result<bool, LiftError> {
        if x.is_zero() {
            return Ok(true);
        }
        self.member(&self.power(k), x)
    }

    pub fn in_algebra(&self, x: &CendElem) -> Result<bool, LiftError> {
        self.member(&self.algebra.span, x)
    }

    fn require_unit(&self) -> Result<&CendElem, LiftError> {
        self.unit.as_ref().ok_or(LiftError::MissingUnit)
    }

    /// The corner `f⊛_0{C⊛_0 f}` with ideal `f⊛_0{I⊛_0 f}` and unit `f`.
    pub fn corner(&self, f: &CendElem) -> Result<LiftContext, LiftError> {
        let project = |span: &HSpan| -> Result<HSpan, LiftError> {
            let gens: Vec<CendElem> = span.basis().iter().map(|c| corner_of(f, c)).collect();
            let bound = gens.iter().filter_map(CendElem::deg_v).max().unwrap_or(0).max(span.bound());
            Ok(HSpan::new(self.size(), bound, gens)?)
        };
        let algebra = SubalgebraPresentation {
            span: project(&self.algebra.span)?,
            closed_under_products: self.algebra.closed_under_products,
            bound: self.algebra.bound,
        };
        let ideal = project(&self.ideal)?;
        LiftContext::with_cap(algebra, ideal, self.powers.len().max(1) + 1)?.with_unit(f.clone())
    }
}

/// `f⊛_0{c⊛_0 f}`.
pub fn corner_of(f: &CendElem, c: &CendElem) -> CendElem {
    f.prod(&c.brace(f, 0), 0)
}

fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// `e_i ⊛_n e_j = δ_(n,0) δ_(i,j) e_j` for every `n`, exactly.
fn orthogonal_pair(a: &CendElem, b: &CendElem, same: bool) -> bool {
    let table = product_table(a, b).expect("sizes agree");
    if same {
        table.len() <= 1 && table_entry(&table, 0, a.size()) == *b
    } else {
        table.is_empty()
    }
}

fn zero_lift(ctx: &LiftContext, e0: &CendElem, stage: &mut LiftStage) -> Result<CendElem, LiftError> {
    let cap = ceil_log2(ctx.nilpotency());
    let mut e = e0.clone();
    let mut iterations = 0;
    loop {
        let sq = e.prod(&e, 0);
        if sq == e {
            break;
        }
        if iterations == cap {
            return Err(LiftError::IterationCap { cap });
        }
        let cube = sq.prod(&e, 0);
        e = &sq.scale(&rat(3)) - &cube.scale(&rat(2));
        iterations += 1;
    }
    stage.iterations += iterations;
    Ok(e)
}

/// Replaces a `⊛_0`-idempotent by a full idempotent through the operator
/// sequence `b(0) = e(0)`, `b(n) = (e(1) e(0))^n`.
fn full_from_zero(e: &CendElem, bounds: DegreeBounds, stage: &mut LiftStage) -> Result<CendElem, LiftError> {
    if is_idempotent(e) {
        return Ok(e.clone());
    }
    let form = OperatorForm::of(e);
    let e0 = form.at(0);
    let step = &form.at(1) * &e0;
    let mut ops = vec![e0];
    let mut cur = step.clone();
    for _ in 0..=bounds.d {
        ops.push(cur.clone());
        cur = &cur * &step;
    }
    let seq = OperatorSequence::new(ops)?;
    let h = interpolate_conformal(&seq, e.size(), bounds)?;
    stage.iterations += 1;
    Ok(h)
}

/// Lifts `ē` with `ē⊛_0ē = ē` in `C/I` to `e` with `e⊛_0 e = e` exactly,
/// iterating `e ← 3e² − 2e³`.
pub fn lift_idempotent_zero(ctx: &LiftContext, e0: &CendElem) -> Result<Lifted<CendElem>, LiftError> {
    let mut report = LiftReport::default();
    let mut pre = LiftStage::new("hypotheses mod I");
    pre.check("e0 ∈ C", ctx.in_algebra(e0)?);
    pre.check("e0⊛_0e0 − e0 ∈ I", ctx.in_ideal(&(&e0.prod(e0, 0) - e0))?);
    report.require(pre)?;

    let mut stage = LiftStage::new("⊛_0 iteration");
    let e = zero_lift(ctx, e0, &mut stage)?;
    stage.element("e", &e);
    stage.check("e⊛_0e = e", e.prod(&e, 0) == e);
    stage.check("e − e0 ∈ I", ctx.in_ideal(&(&e - e0))?);
    stage.check(
        format!("iterations ≤ ⌈log2 {}⌉", ctx.nilpotency()),
        stage.iterations <= ceil_log2(ctx.nilpotency()),
    );
    report.finish(stage)?;
    Ok(Lifted { value: e, report })
}

/// Lifts an idempotent `ē` of `C/I` (all products) to an idempotent of `C`.
///
/// `bounds` caps the degrees of the interpolated element.
pub fn lift_idempotent(ctx: &LiftContext, e0: &CendElem, bounds: DegreeBounds) -> Result<Lifted<CendElem>, LiftError> {
    let mut report = LiftReport::default();
    let mut pre = LiftStage::new("hypotheses mod I");
    pre.check("e0 ∈ C", ctx.in_algebra(e0)?);
    let table = product_table(e0, e0).expect("same element");
    for n in 0..table.len().max(1) {
        let mut defect = table_entry(&table, n, e0.size());
        if n == 0 {
            defect = &defect - e0;
        }
        pre.check(format!("e0⊛_{n}e0 − δ_(n,0)e0 ∈ I"), ctx.in_ideal(&defect)?);
    }
    report.require(pre)?;

    let mut stage = LiftStage::new("⊛_0 iteration");
    let e = zero_lift(ctx, e0, &mut stage)?;
    stage.element("e", &e);
    stage.check("e⊛_0e = e", e.prod(&e, 0) == e);
    report.finish(stage)?;

    let mut stage = LiftStage::new("interpolation");
    let h = full_from_zero(&e, bounds, &mut stage)?;
    stage.element("h", &h);
    stage.check("h⊛_n h = δ_(n,0) h", is_idempotent(&h));
    stage.check("h − e0 ∈ I", ctx.in_ideal(&(&h - e0))?);
    stage.check("h ∈ C", ctx.in_algebra(&h)?);
    report.finish(stage)?;
    Ok(Lifted { value: h, report })
}

/// Lifts pairwise orthogonal idempotents `ē_1, …, ē_N` of `C/I` with
/// `{ē_i⊛_0 ē_0} = ē_i` to pairwise orthogonal idempotents of `C`.
pub fn lift_orthogonal_family(
    ctx: &LiftContext,
    family: &[CendElem],
    bounds: DegreeBounds,
) -> Result<Lifted<Vec<CendElem>>, LiftError> {
    let e0 = ctx.require_unit()?.clone();
    let size = ctx.size();
    let mut report = LiftReport::default();
    let mut pre = LiftStage::new("hypotheses mod I");
    for (i, a) in family.iter().enumerate() {
        pre.check(format!("ē{} ∈ C", i + 1), ctx.in_algebra(a)?);
        for (j, b) in family.iter().enumerate() {
            let table = product_table(a, b).expect("sizes agree");
            for n in 0..table.len().max(1) {
                let mut defect = table_entry(&table, n, size);
                if n == 0 && i == j {
                    defect = &defect - b;
                }
                pre.check(
                    format!("ē{}⊛_{n}ē{} ≡ δ_(n,0)δ_(i,j)ē{} mod I", i + 1, j + 1, j + 1),
                    ctx.in_ideal(&defect)?,
                );
            }
        }
        pre.check(format!("{{ē{}⊛_0e0}} ≡ ē{} mod I", i + 1, i + 1), ctx.in_ideal(&(&a.brace(&e0, 0) - a))?);
    }
    report.require(pre)?;
    if family.is_empty() {
        return Ok(Lifted {
            value: Vec::new(),
            report,
        });
    }

    let mut stage = LiftStage::new("⊛_0 family");
    let mut fs: Vec<CendElem> = Vec::new();
    for a in family {
        let f = fs.iter().fold(e0.clone(), |acc, x| &acc - x);
        let x = corner_of(&f, a);
        let lifted = zero_lift(ctx, &x, &mut stage)?;
        fs.push(lifted.brace(&e0, 0));
    }
    for (i, fi) in fs.iter().enumerate() {
        stage.element(format!("f{}", i + 1), fi);
        for (j, fj) in fs.iter().enumerate() {
            let expect = if i == j { fj.clone() } else { CendElem::zero(size) };
            stage.check(format!("f{}⊛_0f{} = δ_(i,j)f{}", i + 1, j + 1, j + 1), fi.prod(fj, 0) == expect);
        }
        stage.check(format!("{{f{}⊛_0e0}} = f{}", i + 1, i + 1), fi.brace(&e0, 0) == *fi);
        stage.check(format!("f{} − ē{} ∈ I", i + 1, i + 1), ctx.in_ideal(&(fi - &family[i]))?);
    }
    report.finish(stage)?;

    let mut stage = LiftStage::new("corner idempotents");
    let mut es = Vec::with_capacity(fs.len());
    for f in &fs {
        let h = full_from_zero(f, bounds, &mut stage)?;
        es.push(corner_of(f, &h));
    }
    for (i, ei) in es.iter().enumerate() {
        stage.element(format!("e{}", i + 1), ei);
        for (j, ej) in es.iter().enumerate() {
            stage.check(
                format!("e{}⊛_n e{} = δ_(n,0)δ_(i,j)e{}", i + 1, j + 1, j + 1),
                orthogonal_pair(ei, ej, i == j),
            );
        }
        stage.check(format!("e{} − ē{} ∈ I", i + 1, i + 1), ctx.in_ideal(&(ei - &family[i]))?);
        stage.check(format!("e{} ∈ C", i + 1), ctx.in_algebra(ei)?);
    }
    report.finish(stage)?;
    Ok(Lifted { value: es, report })
}
