//! The conformal algebra `Cend_n`, identified with `M_n(Q[D, v])`.
//!
//! On `D`-free elements the `n`-product is `(1⊗A) ⊛_n (1⊗B) = 1⊗A·∂_v^n(B)`.
//! Everything else follows from sesqui-linearity
//! `Da ⊛_n b = -n a ⊛_{n-1} b` and `a ⊛_n Db = D(a ⊛_n b) + n a ⊛_{n-1} b`,
//! which unrolls to
//!
//! ```text
//! (D^i α) ⊛_n (D^j β) = Σ_t (-1)^i C(j,t) n!/(n-i-t)! D^(j-t) α ∂_v^(n-i-t) β
//! ```

mod identities;
mod kernel;

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{
    binomial, factorial, falling, parse_matrix, MatrixDV, ParseError, Poly, PolyDV, Rational,
};

pub use identities::{
    check_conformal_identities, check_identities_with, CorruptedZeroProduct, GenuineProducts,
    IdentityCheck, IdentityReport, ProductTable, Witness,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConformalError {
    #[error("size mismatch: {left}x{left} against {right}x{right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("element is not an idempotent")]
    NotIdempotent,
}

/// An element of `Cend_n`: an `n x n` matrix over `Q[D, v]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CendElem(MatrixDV);

impl CendElem {
    pub fn new(m: MatrixDV) -> Self {
        CendElem(m)
    }

    pub fn zero(size: usize) -> Self {
        CendElem(MatrixDV::zero(size))
    }

    /// The identity matrix, the canonical unit of `Curr_n ⊂ Cend_n`.
    pub fn identity(size: usize) -> Self {
        CendElem(MatrixDV::identity(size))
    }

    /// `1⊗E_ij`, zero-based.
    pub fn unit(size: usize, i: usize, j: usize) -> Self {
        CendElem(MatrixDV::unit(size, i, j))
    }

    /// `p · Id`.
    pub fn scalar(size: usize, p: &PolyDV) -> Self {
        CendElem(MatrixDV::scalar(size, p))
    }

    /// A 1x1 element.
    pub fn from_poly(p: PolyDV) -> Self {
        CendElem(MatrixDV::from_entries(1, vec![p]))
    }

    pub fn parse(src: &str) -> Result<Self, ParseError> {
        parse_matrix(src).map(CendElem)
    }

    pub fn size(&self) -> usize {
        self.0.size()
    }

    pub fn matrix(&self) -> &MatrixDV {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn deg_d(&self) -> Option<usize> {
        self.0.deg_d()
    }

    pub fn deg_v(&self) -> Option<usize> {
        self.0.deg_v()
    }

    /// `D · a`: every entry multiplied by `D`.
    pub fn d_action(&self) -> Self {
        CendElem(self.0.mul_d(1))
    }

    pub fn mul_d(&self, k: usize) -> Self {
        CendElem(self.0.mul_d(k))
    }

    /// Multiplication of every entry by a scalar polynomial in `D, v`.
    pub fn mul_scalar(&self, p: &PolyDV) -> Self {
        CendElem(self.0.mul_scalar(p))
    }

    /// Left multiplication by a polynomial in `D` only (the `H`-module action).
    pub fn mul_h(&self, h: &Poly) -> Self {
        let p = PolyDV::from_d_coeffs(h.coeffs().iter().map(|c| Poly::constant(c.clone())).collect());
        self.mul_scalar(&p)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        CendElem(self.0.scale(c))
    }

    /// Ordinary matrix product over the commutative ring `Q[D, v]`.
    pub fn matrix_product(&self, other: &Self) -> Self {
        CendElem(&self.0 * &other.0)
    }

    fn check_sizes(&self, other: &Self) -> Result<(), ConformalError> {
        if self.size() != other.size() {
            return Err(ConformalError::SizeMismatch {
                left: self.size(),
                right: other.size(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for CendElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for CendElem {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl Serialize for CendElem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CendElem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CendElem::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl<'a> Add<&'a CendElem> for &'a CendElem {
    type Output = CendElem;
    fn add(self, rhs: &CendElem) -> CendElem {
        CendElem(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a CendElem> for &'a CendElem {
    type Output = CendElem;
    fn sub(self, rhs: &CendElem) -> CendElem {
        CendElem(&self.0 - &rhs.0)
    }
}

impl Neg for &CendElem {
    type Output = CendElem;
    fn neg(self) -> CendElem {
        CendElem(-&self.0)
    }
}

impl Add for CendElem {
    type Output = CendElem;
    fn add(self, rhs: CendElem) -> CendElem {
        &self + &rhs
    }
}

impl Sub for CendElem {
    type Output = CendElem;
    fn sub(self, rhs: CendElem) -> CendElem {
        &self - &rhs
    }
}

impl Neg for CendElem {
    type Output = CendElem;
    fn neg(self) -> CendElem {
        -&self
    }
}

/// Upper bound `N` with `a ⊛_m b = 0` for every `m >= N`:
/// `deg_D(a) + deg_D(b) + deg_v(b) + 1`, or 0 when either side is zero.
pub fn locality_bound(a: &CendElem, b: &CendElem) -> usize {
    match (a.deg_d(), b.deg_d(), b.deg_v()) {
        (Some(da), Some(db), Some(vb)) => da + db + vb + 1,
        _ => 0,
    }
}

fn scalar_bound(a: &PolyDV, b: &PolyDV) -> usize {
    match (a.deg_d(), b.deg_d(), b.deg_v()) {
        (Some(da), Some(db), Some(vb)) => da + db + vb + 1,
        _ => 0,
    }
}

/// Adds all products `a ⊛_n b` of two scalar (1x1) entries into `out[n]`,
/// `n < bound`.
fn scalar_products(a: &PolyDV, b: &PolyDV, bound: usize, out: &mut [PolyDV]) {
    if kernel::scalar_products(a, b, &mut out[..bound]).is_none() {
        scalar_products_rational(a, b, bound, out);
    }
}

fn scalar_products_rational(a: &PolyDV, b: &PolyDV, bound: usize, out: &mut [PolyDV]) {
    for (i, alpha) in a.d_coeffs().iter().enumerate() {
        if alpha.is_zero() {
            continue;
        }
        let sign = if i % 2 == 0 { Rational::one() } else { -Rational::one() };
        for (j, beta) in b.d_coeffs().iter().enumerate() {
            let Some(vb) = beta.degree() else { continue };
            for m in 0..=vb {
                let dbeta = beta.deriv(m);
                let prod = alpha * &dbeta;
                for t in 0..=j {
                    let n = i + t + m;
                    if n >= bound {
                        break;
                    }
                    // (-1)^i C(j,t) n!/m!
                    let c = &sign * binomial(j, t) * falling(n, n - m);
                    let term = PolyDV::from_v(prod.scale(&c)).mul_d(j - t);
                    out[n] += &term;
                }
            }
        }
    }
}

/// The full product table `[a ⊛_0 b, a ⊛_1 b, …]`, trimmed so that its length
/// is the locality `N(a, b)`.
pub fn product_table(a: &CendElem, b: &CendElem) -> Result<Vec<CendElem>, ConformalError> {
    a.check_sizes(b)?;
    let n = a.size();
    let bound = locality_bound(a, b);
    let mut mats: Vec<MatrixDV> = vec![MatrixDV::zero(n); bound];
    let mut scratch = vec![PolyDV::zero(); bound];
    for i in 0..n {
        for j in 0..n {
            let x = a.matrix().get(i, j);
            if x.is_zero() {
                continue;
            }
            for k in 0..n {
                let y = b.matrix().get(j, k);
                let sb = scalar_bound(x, y).min(bound);
                if sb == 0 {
                    continue;
                }
                for s in scratch.iter_mut().take(sb) {
                    *s = PolyDV::zero();
                }
                scalar_products(x, y, sb, &mut scratch[..sb]);
                for (idx, s) in scratch.iter().take(sb).enumerate() {
                    if !s.is_zero() {
                        let cur = mats[idx].get(i, k) + s;
                        mats[idx].set(i, k, cur);
                    }
                }
            }
        }
    }
    let mut table: Vec<CendElem> = mats.into_iter().map(CendElem).collect();
    while table.last().is_some_and(CendElem::is_zero) {
        table.pop();
    }
    Ok(table)
}

/// `a ⊛_n b`.
pub fn nth_product(a: &CendElem, b: &CendElem, n: usize) -> Result<CendElem, ConformalError> {
    a.check_sizes(b)?;
    if n >= locality_bound(a, b) {
        return Ok(CendElem::zero(a.size()));
    }
    let size = a.size();
    let mut out = MatrixDV::zero(size);
    for i in 0..size {
        for j in 0..size {
            let x = a.matrix().get(i, j);
            if x.is_zero() {
                continue;
            }
            for k in 0..size {
                let y = b.matrix().get(j, k);
                let sb = scalar_bound(x, y);
                if n >= sb {
                    continue;
                }
                let mut scratch = vec![PolyDV::zero(); n + 1];
                scalar_products(x, y, n + 1, &mut scratch);
                let cur = out.get(i, k) + &scratch[n];
                out.set(i, k, cur);
            }
        }
    }
    Ok(CendElem(out))
}

/// Reads entry `n` of a product table, zero past its end.
pub fn table_entry(table: &[CendElem], n: usize, size: usize) -> CendElem {
    table.get(n).cloned().unwrap_or_else(|| CendElem::zero(size))
}

/// `{a ⊛_n b} = Σ_s (-1)^(n+s)/s! D^s (a ⊛_(n+s) b)` evaluated from a
/// precomputed product table.
pub fn brace_from_table(table: &[CendElem], n: usize, size: usize) -> CendElem {
    let mut acc = MatrixDV::zero(size);
    for (s, p) in table.iter().enumerate().skip(n).map(|(k, p)| (k - n, p)) {
        if p.is_zero() {
            continue;
        }
        let mut c = Rational::one() / factorial(s);
        if (n + s) % 2 == 1 {
            c = -c;
        }
        acc = &acc + &p.matrix().mul_d(s).scale(&c);
    }
    CendElem(acc)
}

/// The brace product `{a ⊛_n b}`.
pub fn brace_product(a: &CendElem, b: &CendElem, n: usize) -> Result<CendElem, ConformalError> {
    let table = product_table(a, b)?;
    Ok(brace_from_table(&table, n, a.size()))
}

/// Locality `N(a, b) = min{ n : a ⊛_m b = 0 for all m >= n }`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LocalityValue(pub usize);

pub fn locality(a: &CendElem, b: &CendElem) -> Result<LocalityValue, ConformalError> {
    Ok(LocalityValue(product_table(a, b)?.len()))
}

/// `e ⊛_n e = δ_{n,0} e` for every `n`.
pub fn is_idempotent(e: &CendElem) -> bool {
    let table = product_table(e, e).expect("same element");
    match table.len() {
        0 => e.is_zero(),
        1 => table[0] == *e,
        _ => false,
    }
}

/// `e ⊛_0 x = x` for every generator; `e` must be idempotent.
pub fn is_unit_on(e: &CendElem, gens: &[CendElem]) -> Result<bool, ConformalError> {
    if !is_idempotent(e) {
        return Err(ConformalError::NotIdempotent);
    }
    for x in gens {
        if nth_product(e, x, 0)? != *x {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sum of a list of elements of the given size.
pub fn sum_elems<'a>(size: usize, items: impl IntoIterator<Item = &'a CendElem>) -> CendElem {
    items
        .into_iter()
        .fold(CendElem::zero(size), |acc, x| &acc + x)
}

impl CendElem {
    /// `self ⊛_n other`; panics on size mismatch.
    pub fn prod(&self, other: &CendElem, n: usize) -> CendElem {
        nth_product(self, other, n).expect("sizes agree")
    }

    /// `{self ⊛_n other}`; panics on size mismatch.
    pub fn brace(&self, other: &CendElem, n: usize) -> CendElem {
        brace_product(self, other, n).expect("sizes agree")
    }
}
