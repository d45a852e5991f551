//! `Q[D]`-submodules of `Cend_n` with bounded `v`-degree.
//!
//! An element with `v`-degree at most `B` has coordinates in the free
//! `Q[D]`-module with basis `v^k E_ij`, `k ≤ B`, ordered lexicographically by
//! (matrix position, `k`). Spans are kept in Hermite normal form over the
//! Euclidean domain `Q[D]`: pivots strictly increase, are monic, and every
//! entry above a pivot has smaller degree than the pivot.

mod algebra;

use std::fmt;

use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::arith::{MatrixDV, Poly, PolyDV, Rational};
use crate::conformal::CendElem;

pub use algebra::{
    close_subalgebra, nilpotency_index, pierce_decompose, power_chain, quotient_reduce, verify_ideal,
    IdealCheck, IdealWitness, NilpotencyReport, PierceDecomposition, SubalgebraPresentation,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpanError {
    #[error("v-degree {degree} exceeds the bound {bound}")]
    BoundExceeded { degree: usize, bound: usize },
    #[error("size mismatch: span has size {span}, element has size {element}")]
    SizeMismatch { span: usize, element: usize },
    #[error("product {left} ⊛_{n} {right} escapes the v-degree bound {bound}")]
    Escape {
        left: String,
        right: String,
        n: usize,
        bound: usize,
    },
    #[error("{0} is not idempotent")]
    NotIdempotent(String),
    #[error("{0} does not lie in the algebra")]
    NotMember(String),
    #[error("ideal generator {0} does not lie in the algebra")]
    NotContained(String),
    #[error("no vanishing power up to the cap {cap}")]
    CapExhausted { cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Row {
    pivot: usize,
    coords: Vec<Poly>,
    /// Coefficients over the generators; shorter vectors are zero-padded.
    transform: Vec<Poly>,
}

/// Subtracts `c * y` from `x`, extending `x` if needed.
fn axpy(x: &mut Vec<Poly>, c: &Poly, y: &[Poly]) {
    if c.is_zero() {
        return;
    }
    if x.len() < y.len() {
        x.resize(y.len(), Poly::zero());
    }
    for (a, b) in x.iter_mut().zip(y) {
        if !b.is_zero() {
            *a -= &(c * b);
        }
    }
}

fn scaled(c: &Poly, y: &[Poly]) -> Vec<Poly> {
    y.iter().map(|b| c * b).collect()
}

fn add_vecs(mut x: Vec<Poly>, y: Vec<Poly>) -> Vec<Poly> {
    if x.len() < y.len() {
        x.resize(y.len(), Poly::zero());
    }
    for (a, b) in x.iter_mut().zip(&y) {
        *a += b;
    }
    x
}

/// Result of a membership test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// Coefficients in `Q[D]` over the generators, if a member.
    #[serde(serialize_with = "serialize_d_polys")]
    pub witness: Option<Vec<Poly>>,
}

fn serialize_d_polys<S: Serializer>(w: &Option<Vec<Poly>>, s: S) -> Result<S::Ok, S::Error> {
    match w {
        None => s.serialize_none(),
        Some(v) => s.collect_seq(v.iter().map(|p| p.fmt_in("D"))),
    }
}

/// A `Q[D]`-span of elements of `Cend_n` with an explicit `v`-degree bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HSpan {
    size: usize,
    bound: usize,
    generators: Vec<CendElem>,
    rows: Vec<Row>,
}

impl HSpan {
    pub fn zero(size: usize, bound: usize) -> Self {
        HSpan {
            size,
            bound,
            generators: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn new(size: usize, bound: usize, gens: impl IntoIterator<Item = CendElem>) -> Result<Self, SpanError> {
        let mut span = Self::zero(size, bound);
        for g in gens {
            span.push(g)?;
        }
        Ok(span)
    }

    /// Span whose bound is the largest `v`-degree among `gens`.
    pub fn from_elements(size: usize, gens: Vec<CendElem>) -> Result<Self, SpanError> {
        let bound = gens.iter().filter_map(CendElem::deg_v).max().unwrap_or(0);
        Self::new(size, bound, gens)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn generators(&self) -> &[CendElem] {
        &self.generators
    }

    /// Rank over the fraction field `Q(D)`.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// The Hermite basis as elements.
    pub fn basis(&self) -> Vec<CendElem> {
        self.rows.iter().map(|r| self.from_coords(&r.coords)).collect()
    }

    fn width(&self) -> usize {
        self.size * self.size * (self.bound + 1)
    }

    fn check(&self, x: &CendElem) -> Result<(), SpanError> {
        if x.size() != self.size {
            return Err(SpanError::SizeMismatch {
                span: self.size,
                element: x.size(),
            });
        }
        match x.deg_v() {
            Some(degree) if degree > self.bound => Err(SpanError::BoundExceeded {
                degree,
                bound: self.bound,
            }),
            _ => Ok(()),
        }
    }

    fn to_coords(&self, x: &CendElem) -> Result<Vec<Poly>, SpanError> {
        self.check(x)?;
        let stride = self.bound + 1;
        let mut raw = vec![Vec::new(); self.width()];
        for (pos, e) in x.matrix().entries().iter().enumerate() {
            for (d, k, c) in e.terms() {
                let slot: &mut Vec<_> = &mut raw[pos * stride + k];
                if slot.len() <= d {
                    slot.resize(d + 1, Rational::zero());
                }
                slot[d] = c.clone();
            }
        }
        Ok(raw.into_iter().map(Poly::from_coeffs).collect())
    }

    fn from_coords(&self, coords: &[Poly]) -> CendElem {
        let stride = self.bound + 1;
        let entries = (0..self.size * self.size)
            .map(|pos| {
                let mut e = PolyDV::zero();
                for k in 0..stride {
                    if let Some(c) = coords.get(pos * stride + k) {
                        for (d, x) in c.coeffs().iter().enumerate() {
                            e += &PolyDV::monomial(d, k, x.clone());
                        }
                    }
                }
                e
            })
            .collect();
        CendElem::new(MatrixDV::from_entries(self.size, entries))
    }

    /// Adds a generator; returns whether the span grew.
    pub fn push(&mut self, g: CendElem) -> Result<bool, SpanError> {
        let coords = self.to_coords(&g)?;
        let idx = self.generators.len();
        self.generators.push(g);
        let mut transform = vec![Poly::zero(); idx + 1];
        transform[idx] = Poly::one();
        Ok(self.insert(coords, transform))
    }

    fn insert(&mut self, mut x: Vec<Poly>, mut tx: Vec<Poly>) -> bool {
        let mut changed = false;
        while let Some(lead) = x.iter().position(|c| !c.is_zero()) {
            match self.rows.binary_search_by_key(&lead, |r| r.pivot) {
                Ok(i) => {
                    let p = self.rows[i].coords[lead].clone();
                    let a = x[lead].clone();
                    let (q, r) = a.div_rem(&p);
                    if r.is_zero() {
                        let row = &self.rows[i];
                        axpy(&mut x, &q, &row.coords);
                        axpy(&mut tx, &q, &row.transform);
                        continue;
                    }
                    // unimodular step: [s t; a/g -p/g]
                    changed = true;
                    let (g, s, t) = p.xgcd(&a);
                    let pg = p.div_rem(&g).0;
                    let ag = a.div_rem(&g).0;
                    let row = &self.rows[i];
                    let new_coords = add_vecs(scaled(&s, &row.coords), scaled(&t, &x));
                    let new_tx = add_vecs(scaled(&s, &row.transform), scaled(&t, &tx));
                    let mut next_x = scaled(&ag, &row.coords);
                    axpy(&mut next_x, &pg, &x);
                    let mut next_tx = scaled(&ag, &row.transform);
                    axpy(&mut next_tx, &pg, &tx);
                    self.rows[i] = Row {
                        pivot: lead,
                        coords: new_coords,
                        transform: new_tx,
                    };
                    x = next_x;
                    tx = next_tx;
                }
                Err(i) => {
                    let inv = Poly::constant(x[lead].leading().unwrap().recip());
                    self.rows.insert(
                        i,
                        Row {
                            pivot: lead,
                            coords: scaled(&inv, &x),
                            transform: scaled(&inv, &tx),
                        },
                    );
                    changed = true;
                    break;
                }
            }
        }
        if changed {
            self.hermite_reduce();
        }
        changed
    }

    fn hermite_reduce(&mut self) {
        for i in 0..self.rows.len() {
            let (above, rest) = self.rows.split_at_mut(i);
            let row = &rest[0];
            let p = &row.coords[row.pivot];
            for r in above.iter_mut() {
                let (q, _) = r.coords[row.pivot].div_rem(p);
                if !q.is_zero() {
                    axpy(&mut r.coords, &q, &row.coords);
                    axpy(&mut r.transform, &q, &row.transform);
                }
            }
        }
    }

    /// Reduces coordinates against the Hermite basis; returns the remainder
    /// and the accumulated quotient over generators.
    fn reduce_coords(&self, mut x: Vec<Poly>) -> (Vec<Poly>, Vec<Poly>) {
        let mut witness = Vec::new();
        for row in &self.rows {
            let (q, _) = x[row.pivot].div_rem(&row.coords[row.pivot]);
            if !q.is_zero() {
                axpy(&mut x, &q, &row.coords);
                axpy(&mut witness, &-&q, &row.transform);
            }
        }
        (x, witness)
    }

    pub fn membership(&self, x: &CendElem) -> Result<Membership, SpanError> {
        let (rem, mut witness) = self.reduce_coords(self.to_coords(x)?);
        if rem.iter().all(Poly::is_zero) {
            witness.resize(self.generators.len(), Poly::zero());
            Ok(Membership {
                member: true,
                witness: Some(witness),
            })
        } else {
            Ok(Membership {
                member: false,
                witness: None,
            })
        }
    }

    pub fn contains(&self, x: &CendElem) -> Result<bool, SpanError> {
        Ok(self.membership(x)?.member)
    }

    /// Canonical representative of `x` modulo the span.
    pub fn reduce(&self, x: &CendElem) -> Result<CendElem, SpanError> {
        let (rem, _) = self.reduce_coords(self.to_coords(x)?);
        Ok(self.from_coords(&rem))
    }

    /// Whether every generator of `other` lies in `self`.
    pub fn contains_span(&self, other: &HSpan) -> Result<bool, SpanError> {
        for g in &other.generators {
            if !self.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The same module with a different bound.
    pub fn with_bound(&self, bound: usize) -> Result<HSpan, SpanError> {
        HSpan::new(self.size, bound, self.generators.iter().cloned())
    }

    /// Sum of spans of equal size, with the largest of their bounds.
    pub fn sum(size: usize, spans: &[&HSpan]) -> Result<HSpan, SpanError> {
        let bound = spans.iter().map(|s| s.bound).max().unwrap_or(0);
        HSpan::new(size, bound, spans.iter().flat_map(|s| s.generators.iter().cloned()))
    }

    /// Whether both spans describe the same module.
    pub fn same_module(&self, other: &HSpan) -> Result<bool, SpanError> {
        let bound = self.bound.max(other.bound);
        let a = self.with_bound(bound)?;
        let b = other.with_bound(bound)?;
        Ok(a.rows == b.rows || (a.contains_span(&b)? && b.contains_span(&a)?))
    }
}

impl fmt::Display for HSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let basis: Vec<String> = self.basis().iter().map(ToString::to_string).collect();
        write!(f, "span_Q[D]{{{}}}", basis.join("; "))
    }
}

impl Serialize for HSpan {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("HSpan", 5)?;
        st.serialize_field("size", &self.size)?;
        st.serialize_field("v_degree_bound", &self.bound)?;
        st.serialize_field("rank", &self.rank())?;
        st.serialize_field("generators", &self.generators)?;
        st.serialize_field("basis", &self.basis())?;
        st.end()
    }
}
