//! Incremental sparse Gaussian elimination over `Q` with row provenance.
//!
//! Every stored row remembers the rational combination of input equations
//! it came from, so an inconsistency is reported as an explicit combination
//! of equations that reads `0 = c` with `c ≠ 0`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::Rational;

pub type SparseVec = BTreeMap<usize, Rational>;

/// A linear combination of tagged equations that collapses to `0 = constant`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inconsistency {
    pub combination: SparseVec,
    pub constant: Rational,
}

#[derive(Debug, Clone)]
struct EchelonRow {
    coeffs: SparseVec,
    rhs: Rational,
    combo: SparseVec,
}

/// Equations `Σ coeffs[j] x_j = rhs`, kept in semi-echelon form: each row's
/// pivot is its smallest unknown and has coefficient one.
#[derive(Debug, Clone, Default)]
pub struct SparseSystem {
    rows: BTreeMap<usize, EchelonRow>,
}

fn sub_scaled(x: &mut SparseVec, c: &Rational, y: &SparseVec) {
    for (k, v) in y {
        let slot = x.entry(*k).or_insert_with(Rational::zero);
        *slot -= c * v;
        if slot.is_zero() {
            x.remove(k);
        }
    }
}

impl SparseSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Adds an equation tagged `tag`. Returns whether it was independent of
    /// the previous ones, or the inconsistency it exposes.
    pub fn add_equation(&mut self, mut coeffs: SparseVec, mut rhs: Rational, tag: usize) -> Result<bool, Inconsistency> {
        coeffs.retain(|_, v| !v.is_zero());
        let mut combo = SparseVec::new();
        combo.insert(tag, Rational::one());
        while let Some((&k, c)) = coeffs.iter().next() {
            match self.rows.get(&k) {
                Some(row) => {
                    let c = c.clone();
                    sub_scaled(&mut coeffs, &c, &row.coeffs);
                    rhs -= &c * &row.rhs;
                    sub_scaled(&mut combo, &c, &row.combo);
                }
                None => {
                    let inv = c.recip();
                    for v in coeffs.values_mut() {
                        *v *= &inv;
                    }
                    for v in combo.values_mut() {
                        *v *= &inv;
                    }
                    rhs *= &inv;
                    self.rows.insert(k, EchelonRow { coeffs, rhs, combo });
                    return Ok(true);
                }
            }
        }
        if rhs.is_zero() {
            Ok(false)
        } else {
            Err(Inconsistency {
                combination: combo,
                constant: rhs,
            })
        }
    }

    fn back_substitute(&self, mut x: SparseVec, homogeneous: bool) -> SparseVec {
        for (&p, row) in self.rows.iter().rev() {
            let mut val = if homogeneous { Rational::zero() } else { row.rhs.clone() };
            for (k, c) in row.coeffs.range(p + 1..) {
                if let Some(xk) = x.get(k) {
                    val -= c * xk;
                }
            }
            if val.is_zero() {
                x.remove(&p);
            } else {
                x.insert(p, val);
            }
        }
        x
    }

    /// A particular solution with every free unknown set to zero.
    pub fn solve(&self) -> SparseVec {
        self.back_substitute(SparseVec::new(), false)
    }

    /// A basis of the homogeneous solutions among unknowns `0..unknowns`,
    /// one vector per free unknown in increasing order.
    pub fn null_space(&self, unknowns: usize) -> Vec<SparseVec> {
        (0..unknowns)
            .filter(|j| !self.rows.contains_key(j))
            .map(|j| {
                let mut x = SparseVec::new();
                x.insert(j, Rational::one());
                self.back_substitute(x, true)
            })
            .collect()
    }
}
