//! The first Weyl algebra `W = Q<p, q | qp - pq = 1>`, matrices over it, and
//! the realization of `Cend_n` inside `M_n(W)`.

mod realize;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::arith::parse::{Expr, Parser};
use crate::arith::polydv::push_term;
use crate::arith::{binomial, factorial, ParseError, Poly, Rational};

pub use realize::{
    act_on_module, check_module_translation, check_translation_invariance,
    cross_check_operator_product, interpolate_conformal, realize, tc_fixture_check, DegreeBounds,
    ModuleVector, OperatorForm, OperatorSequence, TcBounds, TcFixture, TcReport, TruncatedModule,
    WeylError, DEFAULT_DEGREE_CAP,
};

/// Element of `W` in normal form: a sum of `c * p^i q^j`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct WeylPoly {
    terms: BTreeMap<(usize, usize), Rational>,
}

impl WeylPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn p() -> Self {
        Self::monomial(1, 0, Rational::one())
    }

    pub fn q() -> Self {
        Self::monomial(0, 1, Rational::one())
    }

    /// `c * p^i q^j`.
    pub fn monomial(i: usize, j: usize, c: Rational) -> Self {
        let mut w = Self::zero();
        w.add_term(i, j, c);
        w
    }

    /// A polynomial `f(p)`.
    pub fn from_p(f: &Poly) -> Self {
        let mut w = Self::zero();
        for (i, c) in f.coeffs().iter().enumerate() {
            w.add_term(i, 0, c.clone());
        }
        w
    }

    /// A polynomial `f(q)`.
    pub fn from_q(f: &Poly) -> Self {
        let mut w = Self::zero();
        for (j, c) in f.coeffs().iter().enumerate() {
            w.add_term(0, j, c.clone());
        }
        w
    }

    pub fn add_term(&mut self, i: usize, j: usize, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((i, j)).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    /// Coefficient of `p^i q^j`.
    pub fn coeff(&self, i: usize, j: usize) -> Rational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        self.terms.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn deg_p(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.0).max()
    }

    pub fn deg_q(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.1).max()
    }

    pub fn is_p_free(&self) -> bool {
        self.terms.keys().all(|k| k.0 == 0)
    }

    pub fn is_q_free(&self) -> bool {
        self.terms.keys().all(|k| k.1 == 0)
    }

    /// The polynomial in `p` if no `q` occurs.
    pub fn as_p_poly(&self) -> Option<Poly> {
        if !self.is_q_free() {
            return None;
        }
        let mut coeffs = vec![Rational::zero(); self.deg_p().map_or(0, |d| d + 1)];
        for (i, _, c) in self.terms() {
            coeffs[i] = c.clone();
        }
        Some(Poly::from_coeffs(coeffs))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        WeylPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Anti-normal form: `g_j(p)` with `self = Σ_j q^j g_j(p)`.
    ///
    /// Uses `p^i q^j = Σ_k (-1)^k C(i,k) C(j,k) k! q^(j-k) p^(i-k)`.
    pub fn anti_normal(&self) -> BTreeMap<usize, Poly> {
        let mut out: BTreeMap<usize, Poly> = BTreeMap::new();
        for (i, j, c) in self.terms() {
            for k in 0..=i.min(j) {
                let mut coef = c * binomial(i, k) * binomial(j, k) * factorial(k);
                if k % 2 == 1 {
                    coef = -coef;
                }
                *out.entry(j - k).or_default() += &Poly::monomial(i - k, coef);
            }
        }
        out.retain(|_, g| !g.is_zero());
        out
    }

    /// Whether `self ∈ W·f(p)`.
    pub fn in_right_ideal(&self, f: &Poly) -> bool {
        assert!(!f.is_zero(), "generator of the right factor must be nonzero");
        self.anti_normal()
            .values()
            .all(|g| g.div_rem(f).1.is_zero())
    }

    pub fn parse(src: &str) -> Result<Self, ParseError> {
        let mut p = Parser::new(src, WEYL_VARS);
        let e = p.sum()?;
        p.finish()?;
        Ok(eval_weyl(&e))
    }
}

/// Rewrites a word in `p`, `q` with `qp → pq + 1` until it is in normal
/// form. Letters other than `p` and `q` are rejected.
pub fn weyl_normal_form(words: &[(Rational, &str)]) -> Result<WeylPoly, ParseError> {
    let mut stack: Vec<(Rational, Vec<u8>)> = Vec::new();
    for (c, w) in words {
        if let Some(pos) = w.bytes().position(|b| b != b'p' && b != b'q') {
            return Err(ParseError {
                column: pos + 1,
                message: format!("unexpected letter in word '{w}'"),
            });
        }
        stack.push((c.clone(), w.as_bytes().to_vec()));
    }
    let mut out = WeylPoly::zero();
    while let Some((c, w)) = stack.pop() {
        match w.windows(2).position(|x| x == b"qp") {
            Some(i) => {
                let mut swapped = w.clone();
                swapped.swap(i, i + 1);
                let mut dropped = w[..i].to_vec();
                dropped.extend_from_slice(&w[i + 2..]);
                stack.push((c.clone(), swapped));
                stack.push((c, dropped));
            }
            None => {
                let i = w.iter().filter(|&&b| b == b'p').count();
                out.add_term(i, w.len() - i, c);
            }
        }
    }
    Ok(out)
}

/// Whether every bracketing of `word` rewrites to one normal form: for every
/// subword and every split `u·w` of it, `nf(u)·nf(w) = nf(uw)`.
pub fn check_confluence(word: &str) -> Result<bool, ParseError> {
    let n = word.len();
    let mut nf: BTreeMap<(usize, usize), WeylPoly> = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..=n {
            nf.insert((i, j), weyl_normal_form(&[(Rational::one(), &word[i..j])])?);
        }
    }
    for i in 0..n {
        for j in i + 2..=n {
            for k in i + 1..j {
                if &nf[&(i, k)] * &nf[&(k, j)] != nf[&(i, j)] {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

const WEYL_VARS: &[char] = &['p', 'q'];

fn eval_weyl(e: &Expr) -> WeylPoly {
    match e {
        Expr::Num(c) => WeylPoly::constant(c.clone()),
        Expr::Var('p') => WeylPoly::p(),
        Expr::Var(_) => WeylPoly::q(),
        Expr::Add(a, b) => &eval_weyl(a) + &eval_weyl(b),
        Expr::Sub(a, b) => &eval_weyl(a) - &eval_weyl(b),
        Expr::Mul(a, b) => &eval_weyl(a) * &eval_weyl(b),
        Expr::Neg(a) => -&eval_weyl(a),
        Expr::Pow(a, k) => eval_weyl(a).pow(*k),
    }
}

impl fmt::Display for WeylPoly {
    /// Highest `p`-degree first, then highest `q`-degree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        for (&(i, j), c) in self.terms.iter().rev() {
            push_term(&mut s, c, &[("p", i), ("q", j)]);
        }
        if s.is_empty() {
            s.push('0');
        }
        f.write_str(&s)
    }
}

impl Serialize for WeylPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'a> Add<&'a WeylPoly> for &'a WeylPoly {
    type Output = WeylPoly;
    fn add(self, rhs: &WeylPoly) -> WeylPoly {
        let mut out = self.clone();
        for (i, j, c) in rhs.terms() {
            out.add_term(i, j, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a WeylPoly> for &'a WeylPoly {
    type Output = WeylPoly;
    fn sub(self, rhs: &WeylPoly) -> WeylPoly {
        let mut out = self.clone();
        for (i, j, c) in rhs.terms() {
            out.add_term(i, j, -c.clone());
        }
        out
    }
}

impl Neg for &WeylPoly {
    type Output = WeylPoly;
    fn neg(self) -> WeylPoly {
        WeylPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl<'a> Mul<&'a WeylPoly> for &'a WeylPoly {
    type Output = WeylPoly;
    /// `(p^a q^b)(p^c q^d) = Σ_k C(b,k) C(c,k) k! p^(a+c-k) q^(b+d-k)`.
    fn mul(self, rhs: &WeylPoly) -> WeylPoly {
        let mut out = WeylPoly::zero();
        for (a, b, x) in self.terms() {
            for (c, d, y) in rhs.terms() {
                let xy = x * y;
                for k in 0..=b.min(c) {
                    let coef = &xy * binomial(b, k) * binomial(c, k) * factorial(k);
                    out.add_term(a + c - k, b + d - k, coef);
                }
            }
        }
        out
    }
}

/// Square matrix over `W`, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WeylOp {
    size: usize,
    entries: Vec<WeylPoly>,
}

impl WeylOp {
    pub fn zero(size: usize) -> Self {
        assert!(size > 0, "matrix size must be positive");
        WeylOp {
            size,
            entries: vec![WeylPoly::zero(); size * size],
        }
    }

    pub fn identity(size: usize) -> Self {
        Self::scalar(size, &WeylPoly::one())
    }

    pub fn scalar(size: usize, w: &WeylPoly) -> Self {
        let mut m = Self::zero(size);
        for i in 0..size {
            m.entries[i * size + i] = w.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<WeylPoly>>) -> Self {
        let size = rows.len();
        assert!(size > 0 && rows.iter().all(|r| r.len() == size), "matrix must be square");
        WeylOp {
            size,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn parse(src: &str) -> Result<Self, ParseError> {
        let mut p = Parser::new(src, WEYL_VARS);
        let rows = p.matrix(eval_weyl)?;
        p.finish()?;
        Ok(Self::from_rows(rows))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &WeylPoly {
        &self.entries[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, w: WeylPoly) {
        self.entries[i * self.size + j] = w;
    }

    pub fn entries(&self) -> &[WeylPoly] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(WeylPoly::is_zero)
    }

    pub fn is_p_free(&self) -> bool {
        self.entries.iter().all(WeylPoly::is_p_free)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        WeylOp {
            size: self.size,
            entries: self.entries.iter().map(|w| w.scale(c)).collect(),
        }
    }

    /// Multiplies every entry on the right by `w`.
    pub fn mul_right(&self, w: &WeylPoly) -> Self {
        WeylOp {
            size: self.size,
            entries: self.entries.iter().map(|e| e * w).collect(),
        }
    }

    /// Multiplies every entry on the left by `w`.
    pub fn mul_left(&self, w: &WeylPoly) -> Self {
        WeylOp {
            size: self.size,
            entries: self.entries.iter().map(|e| w * e).collect(),
        }
    }

    /// Commutator `self·p - p·self`.
    pub fn bracket_p(&self) -> Self {
        let p = WeylPoly::p();
        &self.mul_right(&p) - &self.mul_left(&p)
    }
}

impl fmt::Display for WeylOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.size {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("[")?;
            for j in 0..self.size {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl Serialize for WeylOp {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'a> Add<&'a WeylOp> for &'a WeylOp {
    type Output = WeylOp;
    fn add(self, rhs: &WeylOp) -> WeylOp {
        assert_eq!(self.size, rhs.size, "matrix sizes differ");
        WeylOp {
            size: self.size,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a WeylOp> for &'a WeylOp {
    type Output = WeylOp;
    fn sub(self, rhs: &WeylOp) -> WeylOp {
        assert_eq!(self.size, rhs.size, "matrix sizes differ");
        WeylOp {
            size: self.size,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul<&'a WeylOp> for &'a WeylOp {
    type Output = WeylOp;
    fn mul(self, rhs: &WeylOp) -> WeylOp {
        assert_eq!(self.size, rhs.size, "matrix sizes differ");
        let n = self.size;
        let mut out = WeylOp::zero(n);
        for i in 0..n {
            for j in 0..n {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..n {
                    let b = rhs.get(j, k);
                    if b.is_zero() {
                        continue;
                    }
                    let slot = &mut out.entries[i * n + k];
                    *slot = &*slot + &(a * b);
                }
            }
        }
        out
    }
}

impl Neg for &WeylOp {
    type Output = WeylOp;
    fn neg(self) -> WeylOp {
        WeylOp {
            size: self.size,
            entries: self.entries.iter().map(|w| -w).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn w(s: &str) -> WeylPoly {
        WeylPoly::parse(s).unwrap()
    }

    #[test]
    fn rewriting_examples() {
        let one = rat(1);
        assert_eq!(weyl_normal_form(&[(one.clone(), "qp")]).unwrap(), w("p*q + 1"));
        assert_eq!(weyl_normal_form(&[(one.clone(), "qqp")]).unwrap(), w("p*q^2 + 2*q"));
        assert_eq!(weyl_normal_form(&[(one, "pq")]).unwrap().to_string(), "p*q");
        assert!(weyl_normal_form(&[(rat(1), "pxq")]).is_err());
    }

    #[test]
    fn closed_product_matches_rewriting() {
        for word in ["qp", "qqpp", "qpqp", "pqqpq", "qqqppp"] {
            let rewritten = weyl_normal_form(&[(rat(1), word)]).unwrap();
            let multiplied = word
                .chars()
                .map(|c| if c == 'p' { WeylPoly::p() } else { WeylPoly::q() })
                .fold(WeylPoly::one(), |acc, x| &acc * &x);
            assert_eq!(rewritten, multiplied, "{word}");
        }
    }

    #[test]
    fn bracketings_agree() {
        for word in ["", "q", "qqp", "qpqpqq", "ppqqqpqp"] {
            assert!(check_confluence(word).unwrap(), "{word}");
        }
        assert!(check_confluence("qxp").is_err());
    }

    #[test]
    fn defining_relation() {
        let (p, q) = (WeylPoly::p(), WeylPoly::q());
        assert_eq!(&(&q * &p) - &(&p * &q), WeylPoly::one());
    }

    #[test]
    fn anti_normal_round_trip() {
        let x = w("p^2*q^3 - 4*p*q + 7");
        let mut back = WeylPoly::zero();
        for (j, g) in x.anti_normal() {
            back = &back + &(&WeylPoly::monomial(0, j, rat(1)) * &WeylPoly::from_p(&g));
        }
        assert_eq!(back, x);
    }

    #[test]
    fn right_ideal_membership() {
        let p2 = Poly::monomial(2, rat(1));
        assert!(w("q^3*p^2").in_right_ideal(&p2));
        assert!(!w("p^2*q").in_right_ideal(&p2));
        assert!(w("p*q + 1").in_right_ideal(&Poly::x()));
    }

    #[test]
    fn printing_and_matrices() {
        assert_eq!(w("q*p*q").to_string(), "p*q^2 + q");
        assert_eq!(w("0").to_string(), "0");
        let m = WeylOp::parse("[[q, 0],[p, 1]]").unwrap();
        let sq = &m * &m;
        assert_eq!(sq.to_string(), "[[q^2, 0],[p*q + p, 1]]");
    }
}
