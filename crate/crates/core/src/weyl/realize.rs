use serde::Serialize;

use super::{WeylOp, WeylPoly};
use crate::arith::{binomial, factorial, MatrixDV, Poly, PolyDV, Rational};
use crate::conformal::{product_table, table_entry, CendElem, ConformalError};

/// Default `t`-degree cap of [`TruncatedModule`].
pub const DEFAULT_DEGREE_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeylError {
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("translation invariance fails at index {index}: [b(n), p] != n b(n-1)")]
    InvariantViolation { index: usize },
    #[error("remainder at index {index} is not a polynomial in p")]
    NotPolynomialInP { index: usize },
    #[error("remainder at index {index} exceeds the degree bounds")]
    ExceedsBounds { index: usize },
    #[error("sequence has {found} operators, at least {needed} required")]
    InsufficientLength { needed: usize, found: usize },
    #[error("degree {degree} exceeds the module cap {cap}")]
    DegreeOverflow { cap: usize, degree: usize },
    #[error("invalid fixture: {0}")]
    InvalidFixture(String),
}

/// Coefficients `A_s(p)` of `a = Σ_s (-D)^s/s! ⊗ A_s(v)`, computed once and
/// evaluated at any `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorForm {
    size: usize,
    /// `coeffs[s][i * size + j]`
    coeffs: Vec<Vec<Poly>>,
}

impl OperatorForm {
    pub fn of(a: &CendElem) -> Self {
        let n = a.size();
        let m = a.deg_d().map_or(0, |d| d + 1);
        let coeffs = (0..m)
            .map(|s| {
                let mut c = factorial(s);
                if s % 2 == 1 {
                    c = -c;
                }
                a.matrix()
                    .entries()
                    .iter()
                    .map(|e| e.d_coeff(s).scale(&c))
                    .collect()
            })
            .collect();
        OperatorForm { size: n, coeffs }
    }

    /// `a(k) = Σ_s C(k,s) A_s(p) q^(k-s)`.
    pub fn at(&self, k: usize) -> WeylOp {
        let n = self.size;
        let mut out = WeylOp::zero(n);
        for idx in 0..n * n {
            let mut w = WeylPoly::zero();
            for (s, layer) in self.coeffs.iter().enumerate().take(k + 1) {
                let b = binomial(k, s);
                for (i, c) in layer[idx].coeffs().iter().enumerate() {
                    w.add_term(i, k - s, c * &b);
                }
            }
            out.set(idx / n, idx % n, w);
        }
        out
    }
}

/// The operator `a(k) ∈ M_n(W)`.
pub fn realize(a: &CendElem, k: usize) -> WeylOp {
    OperatorForm::of(a).at(k)
}

/// Checks `a(n) b(m) = Σ_s C(n,s) (a ⊛_(n-s) b)(m+s)`.
pub fn cross_check_operator_product(
    a: &CendElem,
    b: &CendElem,
    n: usize,
    m: usize,
) -> Result<bool, ConformalError> {
    let table = product_table(a, b)?;
    let size = a.size();
    let lhs = &realize(a, n) * &realize(b, m);
    let mut rhs = WeylOp::zero(size);
    for s in 0..=n {
        let prod = table_entry(&table, n - s, size);
        if !prod.is_zero() {
            rhs = &rhs + &realize(&prod, m + s).scale(&binomial(n, s));
        }
    }
    Ok(lhs == rhs)
}

/// Checks `a(n)p - p a(n) = n a(n-1)` for `n ≥ 1`.
pub fn check_translation_invariance(a: &CendElem, n: usize) -> bool {
    assert!(n >= 1, "translation invariance is stated for n >= 1");
    let form = OperatorForm::of(a);
    form.at(n).bracket_p() == form.at(n - 1).scale(&Rational::from_integer(n.into()))
}

/// A finite translation-invariant operator sequence `b(0), …, b(N)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OperatorSequence {
    ops: Vec<WeylOp>,
}

impl OperatorSequence {
    pub fn new(ops: Vec<WeylOp>) -> Result<Self, WeylError> {
        if let Some(first) = ops.first() {
            let n = first.size();
            if let Some(bad) = ops.iter().find(|o| o.size() != n) {
                return Err(WeylError::SizeMismatch {
                    expected: n,
                    found: bad.size(),
                });
            }
        }
        for k in 1..ops.len() {
            let lhs = ops[k].bracket_p();
            let rhs = ops[k - 1].scale(&Rational::from_integer(k.into()));
            if lhs != rhs {
                return Err(WeylError::InvariantViolation { index: k });
            }
        }
        Ok(OperatorSequence { ops })
    }

    /// `a(0), …, a(len - 1)`.
    pub fn of_element(a: &CendElem, len: usize) -> Self {
        let form = OperatorForm::of(a);
        OperatorSequence {
            ops: (0..len).map(|k| form.at(k)).collect(),
        }
    }

    pub fn ops(&self) -> &[WeylOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// Upper bounds on the `D`- and `v`-degree of an interpolated element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DegreeBounds {
    pub d: usize,
    pub v: usize,
}

/// Recovers the conformal element whose realization is `seq`.
///
/// `A_s(p) = b(s) - Σ_(r<s) C(s,r) A_r(p) q^(s-r)` must be free of `q` for
/// every `s`, and vanish beyond `bounds.d`; on success `realize(result, k)`
/// equals `b(k)` for every `k` in the sequence.
pub fn interpolate_conformal(
    seq: &OperatorSequence,
    size: usize,
    bounds: DegreeBounds,
) -> Result<CendElem, WeylError> {
    if seq.len() < bounds.d + 1 {
        return Err(WeylError::InsufficientLength {
            needed: bounds.d + 1,
            found: seq.len(),
        });
    }
    if let Some(op) = seq.ops.first() {
        if op.size() != size {
            return Err(WeylError::SizeMismatch {
                expected: size,
                found: op.size(),
            });
        }
    }
    let mut a_coeffs: Vec<Vec<Poly>> = Vec::new();
    for (s, b) in seq.ops.iter().enumerate() {
        let mut layer = Vec::with_capacity(size * size);
        for idx in 0..size * size {
            let mut rem = b.get(idx / size, idx % size).clone();
            for (r, prev) in a_coeffs.iter().enumerate() {
                let c = binomial(s, r);
                for (i, x) in prev[idx].coeffs().iter().enumerate() {
                    rem.add_term(i, s - r, -(x * &c));
                }
            }
            let f = rem
                .as_p_poly()
                .ok_or(WeylError::NotPolynomialInP { index: s })?;
            if s > bounds.d && !f.is_zero() || f.degree().is_some_and(|d| d > bounds.v) {
                return Err(WeylError::ExceedsBounds { index: s });
            }
            layer.push(f);
        }
        if s <= bounds.d {
            a_coeffs.push(layer);
        }
    }
    let entries = (0..size * size)
        .map(|idx| {
            let d_coeffs = a_coeffs
                .iter()
                .enumerate()
                .map(|(s, layer)| {
                    let mut c = factorial(s).recip();
                    if s % 2 == 1 {
                        c = -c;
                    }
                    layer[idx].scale(&c)
                })
                .collect();
            PolyDV::from_d_coeffs(d_coeffs)
        })
        .collect();
    Ok(CendElem::new(MatrixDV::from_entries(size, entries)))
}

/// `Q[t]^n` truncated at `t`-degree `degree_cap`; `p` multiplies by `t` and
/// `q` differentiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedModule {
    pub size: usize,
    pub degree_cap: usize,
}

impl TruncatedModule {
    pub fn new(size: usize) -> Self {
        TruncatedModule {
            size,
            degree_cap: DEFAULT_DEGREE_CAP,
        }
    }

    pub fn with_cap(size: usize, degree_cap: usize) -> Self {
        TruncatedModule { size, degree_cap }
    }

    /// `f ⊗ e_i`.
    pub fn basis_vector(&self, f: Poly, i: usize) -> Result<ModuleVector, WeylError> {
        let mut comps = vec![Poly::zero(); self.size];
        comps[i] = f;
        self.vector(comps)
    }

    pub fn vector(&self, comps: Vec<Poly>) -> Result<ModuleVector, WeylError> {
        if comps.len() != self.size {
            return Err(WeylError::SizeMismatch {
                expected: self.size,
                found: comps.len(),
            });
        }
        if let Some(degree) = comps.iter().filter_map(Poly::degree).max() {
            if degree > self.degree_cap {
                return Err(WeylError::DegreeOverflow {
                    cap: self.degree_cap,
                    degree,
                });
            }
        }
        Ok(ModuleVector(comps))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleVector(pub Vec<Poly>);

fn act_scalar(w: &WeylPoly, f: &Poly, cap: usize) -> Result<Poly, WeylError> {
    let mut out = Poly::zero();
    for (i, j, c) in w.terms() {
        let g = f.deriv(j);
        if let Some(d) = g.degree() {
            if d + i > cap {
                return Err(WeylError::DegreeOverflow { cap, degree: d + i });
            }
            out += &g.shift_up(i).scale(c);
        }
    }
    Ok(out)
}

/// Applies `w ∈ M_n(W)` to `u`; any term whose degree passes the cap is an
/// error.
pub fn act_on_module(
    module: &TruncatedModule,
    w: &WeylOp,
    u: &ModuleVector,
) -> Result<ModuleVector, WeylError> {
    let n = module.size;
    if w.size() != n || u.0.len() != n {
        return Err(WeylError::SizeMismatch {
            expected: n,
            found: if w.size() != n { w.size() } else { u.0.len() },
        });
    }
    let mut comps = vec![Poly::zero(); n];
    for (i, slot) in comps.iter_mut().enumerate() {
        for (j, f) in u.0.iter().enumerate() {
            *slot += &act_scalar(w.get(i, j), f, module.degree_cap)?;
        }
    }
    Ok(ModuleVector(comps))
}

/// Checks `a(n)(t·u) = t·a(n)u + n a(n-1)u` on the module.
pub fn check_module_translation(
    module: &TruncatedModule,
    a: &CendElem,
    n: usize,
    u: &ModuleVector,
) -> Result<bool, WeylError> {
    let form = OperatorForm::of(a);
    let p = WeylOp::scalar(module.size, &WeylPoly::p());
    let tu = act_on_module(module, &p, u)?;
    let lhs = act_on_module(module, &form.at(n), &tu)?;
    let an_u = act_on_module(module, &form.at(n), u)?;
    let mut rhs = act_on_module(module, &p, &an_u)?;
    if n > 0 {
        let prev = act_on_module(module, &form.at(n - 1), u)?;
        let c = Rational::from_integer(n.into());
        for (r, x) in rhs.0.iter_mut().zip(&prev.0) {
            *r += &x.scale(&c);
        }
    }
    Ok(lhs == rhs)
}

/// Operator algebras whose conformal counterparts are known in closed form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TcFixture {
    /// `M_n(Q[q])`, realized by `Curr_n = M_n(Q[D])`.
    Curr(usize),
    /// `W·Q(p)`, realized by `Cend_1 Q(v - D)`.
    CendQ(Poly),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TcBounds {
    /// Largest `k` at which operators `a(k)` are examined.
    pub k_max: usize,
    /// Largest `D`-degree (plus `v`-degree for `CendQ`) of a generator.
    pub gen_degree: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TcReport {
    pub fixture: String,
    pub generators: usize,
    pub operators_checked: usize,
    pub generators_in_target: bool,
    pub closed: bool,
    pub witness: Option<String>,
}

impl TcReport {
    pub fn passed(&self) -> bool {
        self.generators_in_target && self.closed
    }
}

/// Checks, up to the bounds, that the fixture's conformal generators realize
/// inside the target operator algebra, and that their conformal and operator
/// products stay there.
pub fn tc_fixture_check(fixture: &TcFixture, bounds: TcBounds) -> Result<TcReport, WeylError> {
    let (name, gens, in_target): (String, Vec<CendElem>, Box<dyn Fn(&WeylOp) -> bool>) =
        match fixture {
            TcFixture::Curr(n) => {
                if *n == 0 {
                    return Err(WeylError::InvalidFixture("size must be positive".into()));
                }
                let mut gens = Vec::new();
                for d in 0..=bounds.gen_degree {
                    for i in 0..*n {
                        for j in 0..*n {
                            gens.push(CendElem::unit(*n, i, j).mul_d(d));
                        }
                    }
                }
                (format!("Curr_{n}"), gens, Box::new(WeylOp::is_p_free))
            }
            TcFixture::CendQ(q) => {
                if q.is_zero() {
                    return Err(WeylError::InvalidFixture("Q must be nonzero".into()));
                }
                let shifted = PolyDV::shift_v_minus_d(q);
                let mut gens = Vec::new();
                for total in 0..=bounds.gen_degree {
                    for d in 0..=total {
                        let mono = PolyDV::monomial(d, total - d, Rational::from_integer(1.into()));
                        gens.push(CendElem::from_poly(&mono * &shifted));
                    }
                }
                let q = q.clone();
                (
                    format!("Cend_1,Q with Q = {q}"),
                    gens,
                    Box::new(move |w: &WeylOp| w.entries().iter().all(|e| e.in_right_ideal(&q))),
                )
            }
        };
    let forms: Vec<OperatorForm> = gens.iter().map(OperatorForm::of).collect();
    let mut report = TcReport {
        fixture: name,
        generators: gens.len(),
        operators_checked: 0,
        generators_in_target: true,
        closed: true,
        witness: None,
    };
    let mut ops: Vec<Vec<WeylOp>> = Vec::new();
    for (g, form) in gens.iter().zip(&forms) {
        let seq: Vec<WeylOp> = (0..=bounds.k_max).map(|k| form.at(k)).collect();
        for (k, op) in seq.iter().enumerate() {
            report.operators_checked += 1;
            if !in_target(op) && report.generators_in_target {
                report.generators_in_target = false;
                report.witness = Some(format!("generator {g} realizes outside at k = {k}: {op}"));
            }
        }
        ops.push(seq);
    }
    for (x, ga) in gens.iter().enumerate() {
        for (y, gb) in gens.iter().enumerate() {
            for prod in product_table(ga, gb).expect("fixture generators share a size") {
                let form = OperatorForm::of(&prod);
                for k in 0..=bounds.k_max {
                    report.operators_checked += 1;
                    if !in_target(&form.at(k)) && report.closed {
                        report.closed = false;
                        report.witness = Some(format!("conformal product of {ga} and {gb} leaves at k = {k}"));
                    }
                }
            }
            for n in 0..=bounds.k_max {
                for m in 0..=bounds.k_max {
                    report.operators_checked += 1;
                    let op = &ops[x][n] * &ops[y][m];
                    if !in_target(&op) && report.closed {
                        report.closed = false;
                        report.witness = Some(format!("{ga}({n}) {gb}({m}) leaves the target"));
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn el(s: &str) -> CendElem {
        CendElem::parse(s).unwrap()
    }

    fn w(s: &str) -> WeylOp {
        WeylOp::parse(s).unwrap()
    }

    #[test]
    fn realize_examples() {
        for k in 0..5 {
            assert_eq!(realize(&el("v"), k), WeylOp::scalar(1, &WeylPoly::monomial(1, k, rat(1))));
        }
        assert!(realize(&el("D"), 0).is_zero());
        for k in 1..5 {
            let expected = WeylPoly::monomial(0, k - 1, rat(-(k as i64)));
            assert_eq!(realize(&el("D"), k), WeylOp::scalar(1, &expected));
        }
        assert!(realize(&CendElem::zero(2), 3).is_zero());
    }

    #[test]
    fn d_action_matches_translation() {
        // (Da)(k) = -k a(k-1)
        let a = el("[[v^2 + D, 1],[D*v, v]]");
        for k in 1..5 {
            assert_eq!(realize(&a.d_action(), k), realize(&a, k - 1).scale(&rat(-(k as i64))));
        }
    }

    #[test]
    fn shifted_square_is_right_multiple() {
        let a = el("(v - D)^2");
        for k in 0..5 {
            let expected = &WeylPoly::monomial(0, k, rat(1)) * &WeylPoly::monomial(2, 0, rat(1));
            assert_eq!(realize(&a, k), WeylOp::scalar(1, &expected));
        }
    }

    #[test]
    fn operator_product_examples() {
        assert!(cross_check_operator_product(&el("v"), &el("v"), 1, 1).unwrap());
        let a = el("[[v, D],[1, v^2]]");
        let b = el("[[D*v, 0],[v, D^2]]");
        for n in 0..4 {
            for m in 0..4 {
                assert!(cross_check_operator_product(&a, &b, n, m).unwrap());
            }
        }
        assert!(cross_check_operator_product(&CendElem::zero(2), &b, 2, 1).unwrap());
    }

    #[test]
    fn translation_invariance_holds() {
        let a = el("[[D^2*v + 3, v^3],[D, -v]]");
        for n in 1..6 {
            assert!(check_translation_invariance(&a, n));
        }
    }

    #[test]
    fn interpolation_examples() {
        let seq = OperatorSequence::new(vec![w("p"), w("p*q"), w("p*q^2")]).unwrap();
        let got = interpolate_conformal(&seq, 1, DegreeBounds { d: 2, v: 1 }).unwrap();
        assert_eq!(got, el("v"));

        let zero = OperatorSequence::new(vec![WeylOp::zero(2); 3]).unwrap();
        assert!(interpolate_conformal(&zero, 2, DegreeBounds { d: 1, v: 1 }).unwrap().is_zero());

        let sq = OperatorSequence::of_element(&el("v^2"), 4);
        assert_eq!(interpolate_conformal(&sq, 1, DegreeBounds { d: 2, v: 2 }).unwrap(), el("v^2"));
    }

    #[test]
    fn interpolation_round_trip() {
        let a = el("[[D^2*v - 1/3*v^2, D],[0, v^3 + D*v]]");
        let seq = OperatorSequence::of_element(&a, 5);
        assert_eq!(interpolate_conformal(&seq, 2, DegreeBounds { d: 2, v: 3 }).unwrap(), a);
    }

    #[test]
    fn interpolation_errors() {
        assert_eq!(
            OperatorSequence::new(vec![w("p"), w("q")]).unwrap_err(),
            WeylError::InvariantViolation { index: 1 }
        );
        // translation invariant but not conformal: b(0) = q
        let seq = OperatorSequence::new(vec![w("q")]).unwrap();
        assert_eq!(
            interpolate_conformal(&seq, 1, DegreeBounds { d: 0, v: 3 }).unwrap_err(),
            WeylError::NotPolynomialInP { index: 0 }
        );
        let seq = OperatorSequence::of_element(&el("D^2"), 4);
        assert_eq!(
            interpolate_conformal(&seq, 1, DegreeBounds { d: 1, v: 0 }).unwrap_err(),
            WeylError::ExceedsBounds { index: 2 }
        );
        let short = OperatorSequence::of_element(&el("v"), 1);
        assert!(matches!(
            interpolate_conformal(&short, 1, DegreeBounds { d: 2, v: 1 }),
            Err(WeylError::InsufficientLength { .. })
        ));
    }

    #[test]
    fn module_action_examples() {
        let m = TruncatedModule::new(2);
        let t = m.basis_vector(Poly::x(), 0).unwrap();
        let p = WeylOp::scalar(2, &WeylPoly::p());
        let q = WeylOp::scalar(2, &WeylPoly::q());
        assert_eq!(act_on_module(&m, &p, &t).unwrap(), m.basis_vector(Poly::monomial(2, rat(1)), 0).unwrap());
        let t2 = m.basis_vector(Poly::monomial(2, rat(1)), 0).unwrap();
        assert_eq!(act_on_module(&m, &q, &t2).unwrap(), m.basis_vector(Poly::monomial(1, rat(2)), 0).unwrap());

        let m1 = TruncatedModule::new(1);
        let t = m1.basis_vector(Poly::x(), 0).unwrap();
        assert_eq!(act_on_module(&m1, &realize(&el("v"), 1), &t).unwrap(), t);
    }

    #[test]
    fn module_overflow_is_an_error() {
        let m = TruncatedModule::with_cap(1, 3);
        let u = m.basis_vector(Poly::monomial(3, rat(1)), 0).unwrap();
        let p = WeylOp::scalar(1, &WeylPoly::p());
        assert_eq!(
            act_on_module(&m, &p, &u).unwrap_err(),
            WeylError::DegreeOverflow { cap: 3, degree: 4 }
        );
        assert!(m.basis_vector(Poly::monomial(4, rat(1)), 0).is_err());
    }

    #[test]
    fn module_translation_identity() {
        let m = TruncatedModule::new(2);
        let a = el("[[v^2, D],[D*v, 1]]");
        let u = m.vector(vec![Poly::from_ints(&[1, 2, 3]), Poly::x()]).unwrap();
        for n in 0..4 {
            assert!(check_module_translation(&m, &a, n, &u).unwrap());
        }
    }

    #[test]
    fn fixtures() {
        let bounds = TcBounds { k_max: 3, gen_degree: 1 };
        let curr = tc_fixture_check(&TcFixture::Curr(2), bounds).unwrap();
        assert!(curr.passed(), "{curr:?}");
        assert_eq!(realize(&CendElem::unit(2, 0, 1), 3), {
            let mut e = WeylOp::zero(2);
            e.set(0, 1, WeylPoly::monomial(0, 3, rat(1)));
            e
        });
        let q2 = tc_fixture_check(&TcFixture::CendQ(Poly::monomial(2, rat(1))), bounds).unwrap();
        assert!(q2.passed(), "{q2:?}");
        let q1 = tc_fixture_check(&TcFixture::CendQ(Poly::one()), bounds).unwrap();
        assert!(q1.passed());
        assert!(tc_fixture_check(&TcFixture::CendQ(Poly::zero()), bounds).is_err());
    }

    #[test]
    fn fixture_detects_escape() {
        // v itself does not realize inside W·p^2
        let op = realize(&el("v"), 1);
        assert!(!op.get(0, 0).in_right_ideal(&Poly::monomial(2, rat(1))));
    }
}
