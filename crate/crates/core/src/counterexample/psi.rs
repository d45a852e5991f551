//! The linear map `ψ: Q[v] → Q[v, D]` a splitting subalgebra would induce,
//! and the exact linear systems it has to satisfy.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::linsolve::{SparseSystem, SparseVec};
use crate::arith::{binomial, falling, rational_string, Poly, PolyDV, Rational};
use crate::conformal::CendElem;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PsiError {
    #[error("degree bound must be at least 1, got {0}")]
    DegreeBound(usize),
    #[error("the system for ψ is feasible at degree bound {0}")]
    Feasible(usize),
}

fn ser_q<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(q))
}

fn ser_qmap<S: Serializer>(m: &BTreeMap<String, Rational>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|(k, q)| (k, rational_string(q))))
}

/// `p ⊛_n q` in `Cend_1`.
fn cend1(p: &PolyDV, q: &PolyDV, n: usize) -> PolyDV {
    let out = CendElem::from_poly(p.clone()).prod(&CendElem::from_poly(q.clone()), n);
    out.matrix().get(0, 0).clone()
}

fn v_pow(k: usize) -> Poly {
    Poly::monomial(k, Rational::one())
}

/// `f1 ⊛_n f2` for `f1, f2 ∈ Q[v]`, which is `f1 · f2^(n)`.
fn poly_product(f1: &Poly, f2: &Poly, n: usize) -> Poly {
    f1 * &f2.deriv(n)
}

/// Coefficients of `p` in the basis `(v−D)^k v^i`, keyed by `(k, i)`.
pub fn expand_in_v_minus_d(p: &PolyDV) -> BTreeMap<(usize, usize), Rational> {
    let mut out: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for (d, j, c) in p.terms() {
        for s in 0..=d {
            let mut term = c * binomial(d, s);
            if s % 2 == 1 {
                term = -term;
            }
            let slot = out.entry((s, j + d - s)).or_insert_with(Rational::zero);
            *slot += term;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `(v−D)^k − v^k` for `k = 1..=bound`.
pub fn forced_form(bound: usize) -> Vec<PolyDV> {
    (1..=bound)
        .map(|k| &PolyDV::v_minus_d_pow(k) - &PolyDV::from_v(v_pow(k)))
        .collect()
}

/// Both sides of the relation
/// `ψ(f1 ⊛_n v²f2) = f1 ⊛_n f2 + ψ(f1) ⊛_n v²f2 + f1 ⊛_n v²ψ(f2)`,
/// optionally without the inhomogeneous term `f1 ⊛_n f2`.
pub fn psi_instance(
    psi: &dyn Fn(&Poly) -> PolyDV,
    f1: &Poly,
    f2: &Poly,
    n: usize,
    with_cocycle: bool,
) -> (PolyDV, PolyDV) {
    let v2 = v_pow(2);
    let v2f2 = &v2 * f2;
    let lhs = psi(&poly_product(f1, &v2f2, n));
    let mut rhs = cend1(&psi(f1), &PolyDV::from_v(v2f2), n);
    rhs += &cend1(&PolyDV::from_v(f1.clone()), &psi(f2).mul_v(&v2), n);
    if with_cocycle {
        rhs += &PolyDV::from_v(poly_product(f1, f2, n));
    }
    (lhs, rhs)
}

/// `m ↦ m ⊛_2 v² + 1 ⊛_2 v²m − 2m`; its kernel holds the admissible `ψ(1)`.
fn forced_operator(m: &PolyDV) -> PolyDV {
    let v2 = PolyDV::from_v(v_pow(2));
    let mut out = cend1(m, &v2, 2);
    out += &cend1(&PolyDV::one(), &m.mul_v(&v_pow(2)), 2);
    out -= &m.scale(&Rational::from_integer(2.into()));
    out
}

/// Solutions of `ψ(1 ⊛_2 v²) = 2ψ(1)` with
/// `ψ(1) = Σ_{k ≤ K} a_k(v)(v−D)^k`, `deg a_k ≤ K`.
#[derive(Debug, Clone, Serialize)]
pub struct PsiSolution {
    pub k_bound: usize,
    pub unknowns: usize,
    pub dimension: usize,
    pub basis: Vec<PolyDV>,
    pub forced_form: Vec<PolyDV>,
    pub matches_forced_form: bool,
    /// `2a = (v²a)''` has only constant solutions among `deg a ≤ K`.
    pub constant_coefficients: bool,
}

impl PsiSolution {
    /// The solution with every free parameter `a_k` equal to one.
    pub fn representative(&self) -> PolyDV {
        self.forced_form.iter().fold(PolyDV::zero(), |acc, p| &acc + p)
    }
}

fn dv_rows(p: &PolyDV) -> impl Iterator<Item = ((usize, usize), Rational)> + '_ {
    p.terms().map(|(d, k, c)| ((d, k), c.clone()))
}

/// Kernel of `a ↦ (v²a)'' − 2a` on `deg a ≤ bound`, as polynomials.
pub fn coefficient_kernel(bound: usize) -> Vec<Poly> {
    let mut rows: BTreeMap<usize, SparseVec> = BTreeMap::new();
    for i in 0..=bound {
        let image = &(&v_pow(2) * &v_pow(i)).deriv(2) - &v_pow(i).scale(&Rational::from_integer(2.into()));
        for (deg, c) in image.coeffs().iter().enumerate() {
            if !c.is_zero() {
                rows.entry(deg).or_default().insert(i, c.clone());
            }
        }
    }
    let mut system = SparseSystem::new();
    for (tag, row) in rows.into_values().enumerate() {
        system.add_equation(row, Rational::zero(), tag).expect("homogeneous");
    }
    system
        .null_space(bound + 1)
        .into_iter()
        .map(|x| x.iter().fold(Poly::zero(), |acc, (i, c)| &acc + &Poly::monomial(*i, c.clone())))
        .collect()
}

/// Imposes `ψ(1 ⊛_2 v²) = 2ψ(1)` on the ansatz of degree bound `K` and
/// returns the general solution.
pub fn cx_forced_psi(k_bound: usize) -> Result<PsiSolution, PsiError> {
    if k_bound < 1 {
        return Err(PsiError::DegreeBound(k_bound));
    }
    let width = k_bound + 1;
    let ansatz = |idx: usize| {
        let (k, i) = (idx / width, idx % width);
        PolyDV::v_minus_d_pow(k).mul_v(&v_pow(i))
    };
    let unknowns = width * width;
    let mut rows: BTreeMap<(usize, usize), SparseVec> = BTreeMap::new();
    for idx in 0..unknowns {
        for (key, c) in dv_rows(&forced_operator(&ansatz(idx))) {
            rows.entry(key).or_default().insert(idx, c);
        }
    }
    let mut system = SparseSystem::new();
    for (tag, row) in rows.into_values().enumerate() {
        system.add_equation(row, Rational::zero(), tag).expect("homogeneous");
    }
    let basis: Vec<PolyDV> = system
        .null_space(unknowns)
        .into_iter()
        .map(|x| x.iter().fold(PolyDV::zero(), |acc, (idx, c)| &acc + &ansatz(*idx).scale(c)))
        .collect();
    let forced = forced_form(k_bound);
    let matches_forced_form = basis.len() == k_bound && forced.iter().all(|p| forced_operator(p).is_zero());
    let kernel = coefficient_kernel(k_bound);
    let constant_coefficients = kernel.len() == 1 && kernel[0].degree() == Some(0);
    Ok(PsiSolution {
        k_bound,
        unknowns,
        dimension: basis.len(),
        basis,
        forced_form: forced,
        matches_forced_form,
        constant_coefficients,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PropagationStep {
    pub degree: usize,
    pub value: PolyDV,
    /// `ψ(v^degree) = v^degree ψ(1)`.
    pub matches_formula: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiPropagation {
    pub value: PolyDV,
    pub steps: Vec<PropagationStep>,
}

impl PsiPropagation {
    pub fn passed(&self) -> bool {
        self.steps.iter().all(|s| s.matches_formula)
    }
}

/// `ψ(f)` from `ψ(1)`, building `ψ(v^{m+1}) = ½(ψ(v^m) ⊛_1 v² + v^m ⊛_1 v²ψ(1))`
/// one degree at a time.
pub fn cx_propagate_psi(psi_one: &PolyDV, f: &Poly) -> PsiPropagation {
    let half = Rational::new(1.into(), 2.into());
    let v2 = PolyDV::from_v(v_pow(2));
    let tail = psi_one.mul_v(&v_pow(2));
    let top = f.degree().unwrap_or(0);
    let mut current = psi_one.clone();
    let mut steps = vec![PropagationStep { degree: 0, value: current.clone(), matches_formula: true }];
    for m in 0..top {
        let next = &cend1(&current, &v2, 1) + &cend1(&PolyDV::from_v(v_pow(m)), &tail, 1);
        current = next.scale(&half);
        let expected = psi_one.mul_v(&v_pow(m + 1));
        steps.push(PropagationStep { degree: m + 1, value: current.clone(), matches_formula: current == expected });
    }
    let value = f
        .coeffs()
        .iter()
        .zip(&steps)
        .fold(PolyDV::zero(), |acc, (c, step)| &acc + &step.value.scale(c));
    PsiPropagation { value, steps }
}

/// Unknowns: the coefficient of `D^d v^k`, `d + k ≤ component`, in
/// `ψ(v^t)`, `t ≤ arguments`.
#[derive(Debug, Clone, Copy)]
struct Window {
    arguments: usize,
    component: usize,
}

impl Window {
    fn per_argument(&self) -> usize {
        (self.component + 1) * (self.component + 2) / 2
    }

    fn len(&self) -> usize {
        (self.arguments + 1) * self.per_argument()
    }

    fn monomials(&self) -> impl Iterator<Item = (usize, usize)> {
        let g = self.component;
        (0..=g).flat_map(move |total| (0..=total).map(move |d| (d, total - d)))
    }

    fn index(&self, t: usize, d: usize, k: usize) -> usize {
        let total = d + k;
        t * self.per_argument() + total * (total + 1) / 2 + d
    }

    fn name(&self, idx: usize) -> String {
        let t = idx / self.per_argument();
        let (d, k) = self.monomials().nth(idx % self.per_argument()).expect("in range");
        format!("psi(v^{t})[D^{d} v^{k}]")
    }
}

type Instance = (usize, usize, usize);

#[derive(Debug, Clone)]
struct Row {
    instance: Instance,
    monomial: (usize, usize),
    coeffs: SparseVec,
    rhs: Rational,
}

/// The rows of the relation for `f1 = v^i`, `f2 = v^j`, one per output
/// monomial whose every contribution lies inside the window.
fn instance_rows(w: &Window, (i, j, n): Instance, with_cocycle: bool) -> Vec<Row> {
    let g = w.component as isize;
    let mut coeffs: BTreeMap<(usize, usize), SparseVec> = BTreeMap::new();
    let mut add = |key: (usize, usize), idx: usize, c: Rational| {
        let slot = coeffs.entry(key).or_default().entry(idx).or_insert_with(Rational::zero);
        *slot += c;
    };
    let c_lhs = falling(j + 2, n);
    let lhs_arg = (i + j + 2).checked_sub(n).filter(|_| !c_lhs.is_zero());
    if let Some(t) = lhs_arg {
        for (d, k) in w.monomials() {
            add((d, k), w.index(t, d, k), c_lhs.clone());
        }
    }
    let right = PolyDV::from_v(v_pow(j + 2));
    for (d, k) in w.monomials() {
        let unit = PolyDV::monomial(d, k, Rational::one());
        for (a, b, c) in cend1(&unit, &right, n).terms() {
            add((a, b), w.index(i, d, k), -c.clone());
        }
        let lifted = PolyDV::monomial(d, k + 2, Rational::one());
        for (a, b, c) in cend1(&PolyDV::from_v(v_pow(i)), &lifted, n).terms() {
            add((a, b), w.index(j, d, k), -c.clone());
        }
    }
    let constant: PolyDV = if with_cocycle {
        PolyDV::from_v(poly_product(&v_pow(i), &v_pow(j), n))
    } else {
        PolyDV::zero()
    };
    for (a, b, _) in constant.terms() {
        coeffs.entry((a, b)).or_default();
    }
    let shift_a = (j + 2) as isize - n as isize;
    let shift_b = (i + 2) as isize - n as isize;
    coeffs
        .into_iter()
        .filter_map(|((a, b), mut row)| {
            let delta = (a + b) as isize;
            let exact = (lhs_arg.is_none() || delta <= g) && delta - shift_a <= g && delta - shift_b <= g;
            row.retain(|_, c| !c.is_zero());
            let rhs = constant.coeff(a, b);
            (exact && !(row.is_empty() && rhs.is_zero())).then_some(Row {
                instance: (i, j, n),
                monomial: (a, b),
                coeffs: row,
                rhs,
            })
        })
        .collect()
}

fn window_rows(w: &Window, k_bound: usize, with_cocycle: bool) -> Vec<Row> {
    let mut rows = Vec::new();
    for i in 0..=k_bound {
        for j in 0..=k_bound {
            for n in 0..=j + 2 + w.component {
                rows.extend(instance_rows(w, (i, j, n), with_cocycle));
            }
        }
    }
    rows
}

/// One equation `Σ coefficients · unknowns = rhs` of the certificate.
#[derive(Debug, Clone, Serialize)]
pub struct ObstructionRow {
    /// `(i, j, n)` for `f1 = v^i`, `f2 = v^j`.
    pub instance: Instance,
    /// `(d, k)` of the compared monomial `D^d v^k`.
    pub monomial: (usize, usize),
    #[serde(serialize_with = "ser_qmap")]
    pub coefficients: BTreeMap<String, Rational>,
    #[serde(serialize_with = "ser_q")]
    pub rhs: Rational,
    #[serde(serialize_with = "ser_q")]
    pub multiplier: Rational,
}

/// `ψ(1 ⊛_1 v³)` against the right-hand side for `ψ(f) = fψ(1)`.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessReplay {
    pub instance: Instance,
    pub psi_one: PolyDV,
    pub lhs: PolyDV,
    pub rhs: PolyDV,
    pub discrepancy: PolyDV,
    pub matches: bool,
}

/// The same window without the inhomogeneous term.
#[derive(Debug, Clone, Serialize)]
pub struct ControlReport {
    pub feasible: bool,
    pub rank: usize,
    pub unknowns: usize,
    pub zero_solution: bool,
    /// `ψ(v^t)`, `t ≤ K`, vanish once `ψ(1)` does.
    pub determined_by_psi_one: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObstructionCertificate {
    pub k_bound: usize,
    pub argument_bound: usize,
    pub component_degree: usize,
    pub unknowns: usize,
    pub total_rows: usize,
    /// The rows entering the combination, with their multipliers.
    pub rows: Vec<ObstructionRow>,
    #[serde(serialize_with = "ser_q")]
    pub constant: Rational,
    pub replay_ok: bool,
    pub witness_in_combination: bool,
    pub witness: WitnessReplay,
    pub control: ControlReport,
}

impl ObstructionCertificate {
    /// Re-evaluates `Σ multiplier · row` and checks it reads `0 = constant`.
    pub fn replay(&self) -> bool {
        let mut lhs: BTreeMap<&str, Rational> = BTreeMap::new();
        let mut rhs = Rational::zero();
        for row in &self.rows {
            for (name, c) in &row.coefficients {
                *lhs.entry(name).or_insert_with(Rational::zero) += &row.multiplier * c;
            }
            rhs += &row.multiplier * &row.rhs;
        }
        lhs.values().all(Zero::is_zero) && rhs == self.constant && !rhs.is_zero()
    }

    pub fn passed(&self) -> bool {
        self.replay_ok && self.witness.matches && self.control.feasible && self.control.zero_solution
    }
}

fn witness_replay() -> WitnessReplay {
    let psi_one = forced_form(1).remove(0);
    let psi = |f: &Poly| psi_one.mul_v(f);
    let (lhs, rhs) = psi_instance(&psi, &Poly::one(), &v_pow(1), 1, true);
    let discrepancy = &rhs - &lhs;
    let matches = discrepancy == PolyDV::one() && lhs == psi(&v_pow(2)).scale(&Rational::from_integer(3.into()));
    WitnessReplay { instance: (0, 1, 1), psi_one: psi_one.clone(), lhs, rhs, discrepancy, matches }
}

fn control(w: &Window, k_bound: usize) -> ControlReport {
    let mut system = SparseSystem::new();
    let mut feasible = true;
    for (tag, row) in window_rows(w, k_bound, false).into_iter().enumerate() {
        if system.add_equation(row.coeffs, row.rhs, tag).is_err() {
            feasible = false;
        }
    }
    let rank = system.rank();
    let zero_solution = feasible && system.solve().values().all(Zero::is_zero);
    for (d, k) in w.monomials() {
        let pin: SparseVec = [(w.index(0, d, k), Rational::one())].into_iter().collect();
        let _ = system.add_equation(pin, Rational::zero(), usize::MAX);
    }
    let per = w.per_argument();
    let determined_by_psi_one = system
        .null_space(w.len())
        .iter()
        .all(|x| x.keys().all(|&idx| idx / per > k_bound));
    ControlReport { feasible, rank, unknowns: w.len(), zero_solution, determined_by_psi_one }
}

/// Builds the relation system for `ψ` on arguments `v^t`, `t ≤ 2K + 2`,
/// components of total degree `≤ K`, instances `f1 = v^i`, `f2 = v^j` with
/// `i, j ≤ K`, and returns a combination of rows reading `0 = 1`.
pub fn cx_obstruction(k_bound: usize) -> Result<ObstructionCertificate, PsiError> {
    if k_bound < 1 {
        return Err(PsiError::DegreeBound(k_bound));
    }
    let w = Window { arguments: 2 * k_bound + 2, component: k_bound };
    let rows = window_rows(&w, k_bound, true);
    let mut system = SparseSystem::new();
    let mut found = None;
    for (tag, row) in rows.iter().enumerate() {
        if let Err(inc) = system.add_equation(row.coeffs.clone(), row.rhs.clone(), tag) {
            found = Some(inc);
            break;
        }
    }
    let inc = found.ok_or(PsiError::Feasible(k_bound))?;
    let scale = inc.constant.recip();
    let cert_rows: Vec<ObstructionRow> = inc
        .combination
        .iter()
        .map(|(&tag, m)| {
            let row = &rows[tag];
            ObstructionRow {
                instance: row.instance,
                monomial: row.monomial,
                coefficients: row.coeffs.iter().map(|(idx, c)| (w.name(*idx), c.clone())).collect(),
                rhs: row.rhs.clone(),
                multiplier: m * &scale,
            }
        })
        .collect();
    let witness_in_combination = cert_rows.iter().any(|r| r.instance == (0, 1, 1));
    let mut cert = ObstructionCertificate {
        k_bound,
        argument_bound: w.arguments,
        component_degree: w.component,
        unknowns: w.len(),
        total_rows: rows.len(),
        rows: cert_rows,
        constant: Rational::one(),
        replay_ok: false,
        witness_in_combination,
        witness: witness_replay(),
        control: control(&w, k_bound),
    };
    cert.replay_ok = cert.replay();
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{parse_poly, rat};

    fn dv(s: &str) -> PolyDV {
        parse_poly(s).unwrap()
    }

    #[test]
    fn expansion_in_v_minus_d() {
        let e = expand_in_v_minus_d(&dv("D"));
        assert_eq!(e.get(&(0, 1)), Some(&rat(1)));
        assert_eq!(e.get(&(1, 0)), Some(&rat(-1)));
        let sq = expand_in_v_minus_d(&PolyDV::v_minus_d_pow(2).mul_v(&v_pow(3)));
        assert_eq!(sq.len(), 1);
        assert_eq!(sq.get(&(2, 3)), Some(&rat(1)));
    }

    #[test]
    fn forced_form_dimensions() {
        for k in 1..=3 {
            let sol = cx_forced_psi(k).unwrap();
            assert_eq!(sol.dimension, k);
            assert!(sol.matches_forced_form);
            assert!(sol.constant_coefficients);
        }
        assert_eq!(cx_forced_psi(0).unwrap_err(), PsiError::DegreeBound(0));
    }

    #[test]
    fn propagation_multiplies_by_f() {
        let one = forced_form(2).into_iter().fold(PolyDV::zero(), |a, p| &a + &p);
        let f = Poly::from_ints(&[1, 0, 3, 2]);
        let out = cx_propagate_psi(&one, &f);
        assert!(out.passed());
        assert_eq!(out.value, one.mul_v(&f));
        assert!(cx_propagate_psi(&one, &Poly::zero()).value.is_zero());
    }

    #[test]
    fn witness_discrepancy_is_one() {
        let w = witness_replay();
        assert!(w.matches, "{}", w.discrepancy);
    }

    #[test]
    fn obstruction_small_bounds() {
        for k in 1..=3 {
            let cert = cx_obstruction(k).unwrap();
            assert!(cert.replay_ok);
            assert!(cert.witness_in_combination);
            assert!(cert.control.feasible && cert.control.zero_solution);
            assert!(cert.control.determined_by_psi_one);
        }
    }
}
