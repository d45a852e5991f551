use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use cendalg::conformal::{
    brace_from_table, check_conformal_identities, locality_bound, product_table, table_entry, CendElem,
    IdentityReport,
};
use cendalg::counterexample::{
    cx_embed, cx_forced_psi, cx_obstruction, cx_product, cx_radical_membership, cx_radical_products_vanish,
    cx_square_zero, cx_theta, divisible_by_v_minus_d_squared, PsiError,
};
use cendalg::fixtures::{
    cend1_extension, counterexample_split_input, current_with_radical, perturbed_generator, triangular_context,
    triangular_current, triangular_near_idempotent,
};
use cendalg::lifting::{
    build_matrix_units, lift_conformal_generator, lift_idempotent_zero, lift_orthogonal_family, split_radical,
    LiftError, LiftReport, Lifted,
};
use cendalg::sample::Sampler;
use cendalg::span::{HSpan, Membership};
use cendalg::weyl::{cross_check_operator_product, realize as realize_op};

use crate::input::{element, elements, same_size};
use crate::{CliError, CxCheck, LiftTarget, Outcome, SplitFixture};

fn to_json(x: &impl Serialize) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn invalid(e: impl ToString) -> CliError {
    CliError::Invalid(e.to_string())
}

fn pair(a: &str, b: &str) -> Result<(CendElem, CendElem), CliError> {
    let a = element("argument A", a)?;
    let b = element("argument B", b)?;
    same_size(&[a.clone(), b.clone()])?;
    Ok((a, b))
}

pub fn products(brace: bool, n: Option<usize>, a: &str, b: &str) -> Result<Outcome, CliError> {
    let (a, b) = pair(a, b)?;
    let size = a.size();
    let table = product_table(&a, &b).map_err(invalid)?;
    let indices: Vec<usize> = match n {
        Some(n) => vec![n],
        None => (0..table.len()).collect(),
    };
    let entries: Vec<(usize, CendElem)> = indices
        .into_iter()
        .map(|k| {
            let value = if brace { brace_from_table(&table, k, size) } else { table_entry(&table, k, size) };
            (k, value)
        })
        .collect();
    let text = match (n, entries.as_slice()) {
        (Some(_), [(_, value)]) => value.to_string(),
        (_, []) => "all products vanish".to_string(),
        _ => entries.iter().map(|(k, v)| format!("n = {k}: {v}")).collect::<Vec<_>>().join("\n"),
    };
    let json = json!({
        "operation": if brace { "brace" } else { "product" },
        "locality": table.len(),
        "entries": entries.iter().map(|(k, v)| json!({ "n": k, "value": v })).collect::<Vec<_>>(),
    });
    Ok(Outcome { text, json, passed: true })
}

pub fn locality(a: &str, b: &str) -> Result<Outcome, CliError> {
    let (a, b) = pair(a, b)?;
    let n = product_table(&a, &b).map_err(invalid)?.len();
    let bound = locality_bound(&a, &b);
    Ok(Outcome {
        text: format!("N(a, b) = {n} (degree bound {bound})"),
        json: json!({ "locality": n, "bound": bound }),
        passed: n <= bound,
    })
}

fn identity_outcome(triples: &[[CendElem; 3]], seed: Option<u64>) -> Result<Outcome, CliError> {
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut passed = true;
    for (t, [a, b, c]) in triples.iter().enumerate() {
        let report: IdentityReport = check_conformal_identities(a, b, c).map_err(invalid)?;
        let cases: usize = report.checks.iter().map(|c| c.cases).sum();
        let ok = report.passed();
        passed &= ok;
        let verdict = if ok { "all hold" } else { "FAILED" };
        let _ = writeln!(text, "triple {t}: {verdict} ({} identities, {cases} instances)", report.checks.len());
        for check in report.checks.iter().filter(|c| !c.passed) {
            let at = check.witness.as_ref().map(|w| format!(" at n = {}, m = {:?}", w.n, w.m)).unwrap_or_default();
            let _ = writeln!(text, "  {}{at}", check.identity);
        }
        rows.push(json!({ "index": t, "a": a, "b": b, "c": c, "passed": ok, "checks": report.checks }));
    }
    Ok(Outcome {
        text: text.trim_end().to_string(),
        json: json!({ "seed": seed, "passed": passed, "triples": rows }),
        passed,
    })
}

pub fn identities(args: &[String]) -> Result<Outcome, CliError> {
    if args.len() != 3 {
        return Err(CliError::Invalid(format!("identities takes three elements, got {}", args.len())));
    }
    let e = elements("element", args)?;
    identity_outcome(&[[e[0].clone(), e[1].clone(), e[2].clone()]], None)
}

pub fn random_identities(count: usize, seed: u64, size: usize, max_d: usize, max_v: usize) -> Result<Outcome, CliError> {
    if size == 0 {
        return Err(CliError::Invalid("size must be at least 1".into()));
    }
    let mut sampler = Sampler::new(seed);
    let triples: Vec<[CendElem; 3]> =
        (0..count).map(|_| [(); 3].map(|_| sampler.cend(size, max_d, max_v))).collect();
    identity_outcome(&triples, Some(seed))
}

pub fn realize(a: &str, k: usize) -> Result<Outcome, CliError> {
    let a = element("argument A", a)?;
    let op = realize_op(&a, k);
    Ok(Outcome {
        text: op.to_string(),
        json: json!({ "k": k, "operator": op }),
        passed: true,
    })
}

pub fn crosscheck(a: &str, b: &str, n: Option<usize>, m: Option<usize>, up_to: usize) -> Result<Outcome, CliError> {
    let (a, b) = pair(a, b)?;
    let ns: Vec<usize> = n.map_or_else(|| (0..=up_to).collect(), |n| vec![n]);
    let ms: Vec<usize> = m.map_or_else(|| (0..=up_to).collect(), |m| vec![m]);
    let mut cases = Vec::new();
    let mut failures = Vec::new();
    for &n in &ns {
        for &m in &ms {
            let agrees = cross_check_operator_product(&a, &b, n, m).map_err(invalid)?;
            if !agrees {
                failures.push(format!("n = {n}, m = {m}"));
            }
            cases.push(json!({ "n": n, "m": m, "agrees": agrees }));
        }
    }
    let passed = failures.is_empty();
    let mut text = format!("{} of {} (n, m) agree", cases.len() - failures.len(), cases.len());
    for f in &failures {
        let _ = write!(text, "\n  differs at {f}");
    }
    Ok(Outcome { text, json: json!({ "passed": passed, "cases": cases }), passed })
}

pub fn span(gens: &[String], members: &[String], bound: Option<usize>) -> Result<Outcome, CliError> {
    let gens = elements("generator", gens)?;
    let size = gens[0].size();
    let bound = bound.unwrap_or_else(|| gens.iter().filter_map(CendElem::deg_v).max().unwrap_or(0));
    let span = HSpan::new(size, bound, gens).map_err(invalid)?;
    let members = elements("member", members)?;
    same_size(&[vec![CendElem::zero(size)], members.clone()].concat())?;
    let mut text = format!("rank {} (v-degree bound {bound})", span.rank());
    for b in span.basis() {
        let _ = write!(text, "\n  {b}");
    }
    let mut tests = Vec::new();
    for (i, x) in members.iter().enumerate() {
        // v-degree above the bound: not a member
        let m = match x.deg_v() {
            Some(d) if d > bound => Membership { member: false, witness: None },
            _ => span.membership(x).map_err(invalid)?,
        };
        let _ = write!(text, "\nmember {}: {}", i + 1, if m.member { "yes" } else { "no" });
        let mut row = to_json(&m);
        row["element"] = to_json(x);
        tests.push(row);
    }
    let json = json!({
        "size": size,
        "bound": bound,
        "rank": span.rank(),
        "basis": span.basis(),
        "members": tests,
    });
    Ok(Outcome { text, json, passed: true })
}

fn report_text(report: &LiftReport) -> String {
    let mut text = String::new();
    for stage in &report.stages {
        let verdict = match stage.first_failure() {
            None => "ok".to_string(),
            Some(c) => format!("FAILED at {}", c.relation),
        };
        let _ = write!(
            text,
            "\n  {}: {} checks, {} iteration(s), {verdict}",
            stage.stage,
            stage.checks.len(),
            stage.iterations
        );
    }
    text
}

fn lift_outcome<T: Serialize + ToText>(
    target: &str,
    result: Result<Lifted<T>, LiftError>,
) -> Result<Outcome, CliError> {
    match result {
        Ok(lifted) => {
            let passed = lifted.report.passed();
            Ok(Outcome {
                text: format!("{}{}", lifted.value.to_text(), report_text(&lifted.report)),
                json: json!({ "target": target, "passed": passed, "value": lifted.value, "report": lifted.report }),
                passed,
            })
        }
        Err(e) => Ok(failed_lift(target, &e)),
    }
}

fn failed_lift(target: &str, e: &LiftError) -> Outcome {
    let report = e.report().cloned().unwrap_or_default();
    Outcome {
        text: format!("{target} failed: {e}{}", report_text(&report)),
        json: json!({ "target": target, "passed": false, "error": e.to_string(), "report": report }),
        passed: false,
    }
}

trait ToText {
    fn to_text(&self) -> String;
}

impl ToText for CendElem {
    fn to_text(&self) -> String {
        self.to_string()
    }
}

impl ToText for Vec<CendElem> {
    fn to_text(&self) -> String {
        self.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
    }
}

impl ToText for cendalg::lifting::MatrixUnitSystem {
    fn to_text(&self) -> String {
        let mut lines = Vec::new();
        for (i, row) in self.units.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                lines.push(format!("e{}{} = {e}", i + 1, j + 1));
            }
        }
        lines.join("\n")
    }
}

pub fn lift(target: LiftTarget) -> Result<Outcome, CliError> {
    match target {
        LiftTarget::Idempotent { e0, size } => {
            if size == 0 {
                return Err(CliError::Invalid("size must be at least 1".into()));
            }
            let e0 = match e0 {
                Some(src) => element("argument E0", &src)?,
                None if size == 3 => triangular_near_idempotent(),
                None => return Err(CliError::Invalid(format!("no default E0 for size {size}; pass one"))),
            };
            same_size(&[CendElem::zero(size), e0.clone()])?;
            let result = triangular_context(size).and_then(|ctx| lift_idempotent_zero(&ctx, &e0));
            lift_outcome("idempotent", result)
        }
        LiftTarget::Generator { x0, bound } => {
            let x0 = match x0 {
                Some(src) => element("argument X0", &src)?,
                None => perturbed_generator(),
            };
            same_size(&[CendElem::zero(2), x0.clone()])?;
            let result = cend1_extension(bound).and_then(|ctx| lift_conformal_generator(&ctx, &x0));
            lift_outcome("generator", result)
        }
        LiftTarget::Family => {
            let fx = current_with_radical();
            let result = fx.context().and_then(|ctx| lift_orthogonal_family(&ctx, &fx.diagonal, fx.bounds));
            lift_outcome("family", result)
        }
        LiftTarget::MatrixUnits => {
            let fx = current_with_radical();
            let result = fx.context().and_then(|ctx| {
                let diag = lift_orthogonal_family(&ctx, &fx.diagonal, fx.bounds)?;
                let mut units = build_matrix_units(&ctx, &diag.value, &fx.row, &fx.column, fx.bounds)?;
                let mut report = diag.report;
                report.extend(units.report);
                units.report = report;
                Ok(units)
            });
            lift_outcome("matrix-units", result)
        }
    }
}

pub fn split(fixture: SplitFixture, size: usize, bound: usize) -> Result<Outcome, CliError> {
    let (name, input) = match fixture {
        SplitFixture::Triangular if size == 0 => return Err(CliError::Invalid("size must be at least 1".into())),
        SplitFixture::Triangular => ("triangular", triangular_current(size)),
        SplitFixture::CurrentRadical => ("current-radical", current_with_radical().split_input()),
        SplitFixture::Counterexample => ("counterexample", counterexample_split_input(bound)),
    };
    match split_radical(&input) {
        Ok(out) => {
            let passed = out.report.passed();
            let mut text = format!("S has rank {}; unit {}", out.semisimple.rank(), out.unit);
            for (i, block) in out.blocks.iter().enumerate() {
                let _ = write!(text, "\nblock {}:\n{}", i + 1, block.to_text());
            }
            text.push_str(&report_text(&out.report));
            let mut json = to_json(&out);
            json["target"] = json!(name);
            json["passed"] = json!(passed);
            Ok(Outcome { text, json, passed })
        }
        Err(e) => Ok(failed_lift(name, &e)),
    }
}

/// Failures of a sampled counterexample check.
struct Tally {
    check: &'static str,
    seed: u64,
    pairs: usize,
    cases: usize,
    failures: Vec<Value>,
}

impl Tally {
    fn new(check: &'static str, seed: u64, pairs: usize) -> Self {
        Tally { check, seed, pairs, cases: 0, failures: Vec::new() }
    }

    fn record(&mut self, ok: bool, pair: usize, n: Option<usize>, detail: &str) {
        self.cases += 1;
        if !ok {
            self.failures.push(json!({ "pair": pair, "n": n, "detail": detail }));
        }
    }

    fn finish(self) -> Outcome {
        let passed = self.failures.is_empty();
        Outcome {
            text: String::new(),
            json: json!({
                "check": self.check,
                "seed": self.seed,
                "pairs": self.pairs,
                "cases": self.cases,
                "passed": passed,
                "failures": self.failures,
            }),
            passed,
        }
    }
}

fn verify_closure(pairs: usize, seed: u64) -> Outcome {
    let mut sampler = Sampler::new(seed);
    let mut tally = Tally::new("closure", seed, pairs);
    for t in 0..pairs {
        let (x, y) = (sampler.cx_elem(2, 5), sampler.cx_elem(2, 5));
        let table = product_table(&cx_embed(&x), &cx_embed(&y)).expect("both 2x2");
        for n in 0..table.len() + 2 {
            let ok = cx_embed(&cx_product(&x, &y, n)) == table_entry(&table, n, 2);
            tally.record(ok, t, Some(n), "closed formula differs from the matrix product");
        }
    }
    tally.finish()
}

fn verify_radical(pairs: usize, seed: u64) -> Outcome {
    let mut sampler = Sampler::new(seed);
    let mut tally = Tally::new("radical", seed, pairs);
    for t in 0..pairs {
        let x = if t % 2 == 0 { sampler.cx_radical(2, 4) } else { sampler.cx_elem(2, 4) };
        let member = cx_radical_membership(&x);
        tally.record(member == cx_square_zero(&x), t, None, "membership differs from nilpotency");
        tally.record(member == cx_theta(&x).is_zero(), t, None, "membership differs from the kernel of θ");
        if member {
            let y = sampler.cx_radical(2, 4);
            tally.record(cx_radical_products_vanish(&x, &y), t, None, "radical product is nonzero");
        }
    }
    tally.finish()
}

fn verify_theta(pairs: usize, seed: u64) -> Outcome {
    let mut sampler = Sampler::new(seed);
    let mut tally = Tally::new("theta", seed, pairs);
    for t in 0..pairs {
        let (x, y) = (sampler.cx_elem(2, 5), sampler.cx_elem(2, 5));
        let (tx, ty) = (CendElem::from_poly(cx_theta(&x)), CendElem::from_poly(cx_theta(&y)));
        let top = product_table(&tx, &ty).expect("both 1x1").len();
        for n in 0..top + 2 {
            let lhs = cx_theta(&cx_product(&x, &y, n));
            let rhs = tx.prod(&ty, n);
            tally.record(&lhs == rhs.matrix().get(0, 0), t, Some(n), "θ is not multiplicative");
        }
        for z in [&x, &y] {
            let ok = divisible_by_v_minus_d_squared(&cx_theta(z));
            tally.record(ok, t, None, "θ image is not divisible by (v−D)^2");
        }
    }
    tally.finish()
}

fn psi_error(e: PsiError) -> CliError {
    match e {
        PsiError::DegreeBound(_) => CliError::Invalid(e.to_string()),
        PsiError::Feasible(_) => CliError::Failed(e.to_string()),
    }
}

pub fn counterexample(check: CxCheck) -> Result<Outcome, CliError> {
    Ok(match check {
        CxCheck::VerifyClosure { pairs, seed } => verify_closure(pairs, seed),
        CxCheck::VerifyRadical { pairs, seed } => verify_radical(pairs, seed),
        CxCheck::VerifyTheta { pairs, seed } => verify_theta(pairs, seed),
        CxCheck::ForcedPsi { k } => {
            let sol = cx_forced_psi(k).map_err(psi_error)?;
            let passed = sol.matches_forced_form && sol.dimension == k && sol.constant_coefficients;
            Outcome {
                text: String::new(),
                json: json!({ "k": k, "passed": passed, "solution": sol }),
                passed,
            }
        }
        CxCheck::Obstruction { k } => {
            let cert = cx_obstruction(k).map_err(psi_error)?;
            let passed = cert.passed() && cert.replay();
            Outcome { text: String::new(), json: to_json(&cert), passed }
        }
    })
}
