use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Signed, Zero};

use super::{binomial, rational_string, Poly, Rational};

/// Commutative polynomial in `D` and `v` over `Q`.
///
/// Stored dense by `D`-degree; each `D`-coefficient is a dense [`Poly`] in `v`.
/// The leading `D`-coefficient is nonzero unless the whole polynomial is zero.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct PolyDV {
    d_coeffs: Vec<Poly>,
}

impl PolyDV {
    pub fn zero() -> Self {
        PolyDV { d_coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_v(Poly::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_v(Poly::constant(c))
    }

    /// Embeds a polynomial in `v` as a `D`-free element.
    pub fn from_v(f: Poly) -> Self {
        Self::from_d_coeffs(vec![f])
    }

    /// `c * D^d * v^k`.
    pub fn monomial(d: usize, k: usize, c: Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut d_coeffs = vec![Poly::zero(); d + 1];
        d_coeffs[d] = Poly::monomial(k, c);
        PolyDV { d_coeffs }
    }

    pub fn d() -> Self {
        Self::monomial(1, 0, Rational::one())
    }

    pub fn v() -> Self {
        Self::monomial(0, 1, Rational::one())
    }

    pub fn from_d_coeffs(mut d_coeffs: Vec<Poly>) -> Self {
        while d_coeffs.last().is_some_and(Poly::is_zero) {
            d_coeffs.pop();
        }
        PolyDV { d_coeffs }
    }

    pub fn d_coeffs(&self) -> &[Poly] {
        &self.d_coeffs
    }

    /// Coefficient of `D^d` as a polynomial in `v`.
    pub fn d_coeff(&self, d: usize) -> Poly {
        self.d_coeffs.get(d).cloned().unwrap_or_default()
    }

    /// Coefficient of `D^d v^k`.
    pub fn coeff(&self, d: usize, k: usize) -> Rational {
        self.d_coeffs
            .get(d)
            .map_or_else(Rational::zero, |p| p.coeff(k))
    }

    pub fn is_zero(&self) -> bool {
        self.d_coeffs.is_empty()
    }

    pub fn deg_d(&self) -> Option<usize> {
        self.d_coeffs.len().checked_sub(1)
    }

    pub fn deg_v(&self) -> Option<usize> {
        self.d_coeffs.iter().filter_map(Poly::degree).max()
    }

    /// Nonzero terms as `(d, k, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        self.d_coeffs.iter().enumerate().flat_map(|(d, p)| {
            p.coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(move |(k, c)| (d, k, c))
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        PolyDV {
            d_coeffs: self.d_coeffs.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// Multiplies by `D^k`.
    pub fn mul_d(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut d_coeffs = vec![Poly::zero(); k];
        d_coeffs.extend(self.d_coeffs.iter().cloned());
        PolyDV { d_coeffs }
    }

    /// Multiplies by a polynomial in `v`.
    pub fn mul_v(&self, f: &Poly) -> Self {
        Self::from_d_coeffs(self.d_coeffs.iter().map(|p| p * f).collect())
    }

    /// `k`-th partial derivative in `v`.
    pub fn deriv_v(&self, k: usize) -> Self {
        Self::from_d_coeffs(self.d_coeffs.iter().map(|p| p.deriv(k)).collect())
    }

    /// Returns `f(v - D)` expanded in canonical form.
    pub fn shift_v_minus_d(f: &Poly) -> Self {
        // f(v - D) = sum_i c_i sum_j binom(i, j) v^(i-j) (-D)^j
        let n = f.coeffs().len();
        let mut d_coeffs = vec![Poly::zero(); n];
        for (i, c) in f.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, slot) in d_coeffs.iter_mut().enumerate().take(i + 1) {
                let mut b = c * binomial(i, j);
                if j % 2 == 1 {
                    b = -b;
                }
                *slot += &Poly::monomial(i - j, b);
            }
        }
        Self::from_d_coeffs(d_coeffs)
    }

    /// `(v - D)^k`.
    pub fn v_minus_d_pow(k: usize) -> Self {
        Self::shift_v_minus_d(&Poly::monomial(k, Rational::one()))
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

/// Appends one term `c * x^a * y^b ...` to a sum being printed.
pub(crate) fn push_term(out: &mut String, c: &Rational, vars: &[(&str, usize)]) {
    let neg = c.is_negative();
    let abs = c.abs();
    if out.is_empty() {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    let factors: Vec<String> = vars
        .iter()
        .filter(|(_, e)| *e > 0)
        .map(|(name, e)| {
            if *e == 1 {
                name.to_string()
            } else {
                format!("{name}^{e}")
            }
        })
        .collect();
    if factors.is_empty() {
        out.push_str(&rational_string(&abs));
    } else {
        if !abs.is_one() {
            out.push_str(&rational_string(&abs));
            out.push('*');
        }
        out.push_str(&factors.join("*"));
    }
}

impl fmt::Display for PolyDV {
    /// Canonical printing: ascending in `D`, descending in `v` within each
    /// `D`-degree, e.g. `v^2 - 2*D*v + D^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        for (d, p) in self.d_coeffs.iter().enumerate() {
            for (k, c) in p.coeffs().iter().enumerate().rev() {
                if !c.is_zero() {
                    push_term(&mut s, c, &[("D", d), ("v", k)]);
                }
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        f.write_str(&s)
    }
}

impl<'a> Add<&'a PolyDV> for &'a PolyDV {
    type Output = PolyDV;
    fn add(self, rhs: &PolyDV) -> PolyDV {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a PolyDV> for &'a PolyDV {
    type Output = PolyDV;
    fn sub(self, rhs: &PolyDV) -> PolyDV {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a> Mul<&'a PolyDV> for &'a PolyDV {
    type Output = PolyDV;
    fn mul(self, rhs: &PolyDV) -> PolyDV {
        if self.is_zero() || rhs.is_zero() {
            return PolyDV::zero();
        }
        let mut d_coeffs = vec![Poly::zero(); self.d_coeffs.len() + rhs.d_coeffs.len() - 1];
        for (i, a) in self.d_coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.d_coeffs.iter().enumerate() {
                d_coeffs[i + j] += &(a * b);
            }
        }
        PolyDV::from_d_coeffs(d_coeffs)
    }
}

impl Neg for &PolyDV {
    type Output = PolyDV;
    fn neg(self) -> PolyDV {
        PolyDV {
            d_coeffs: self.d_coeffs.iter().map(|p| -p).collect(),
        }
    }
}

impl Add for PolyDV {
    type Output = PolyDV;
    fn add(mut self, rhs: PolyDV) -> PolyDV {
        self += &rhs;
        self
    }
}

impl Sub for PolyDV {
    type Output = PolyDV;
    fn sub(mut self, rhs: PolyDV) -> PolyDV {
        self -= &rhs;
        self
    }
}

impl Mul for PolyDV {
    type Output = PolyDV;
    fn mul(self, rhs: PolyDV) -> PolyDV {
        &self * &rhs
    }
}

impl Neg for PolyDV {
    type Output = PolyDV;
    fn neg(self) -> PolyDV {
        -&self
    }
}

impl AddAssign<&PolyDV> for PolyDV {
    fn add_assign(&mut self, rhs: &PolyDV) {
        if self.d_coeffs.len() < rhs.d_coeffs.len() {
            self.d_coeffs.resize(rhs.d_coeffs.len(), Poly::zero());
        }
        for (a, b) in self.d_coeffs.iter_mut().zip(&rhs.d_coeffs) {
            *a += b;
        }
        while self.d_coeffs.last().is_some_and(Poly::is_zero) {
            self.d_coeffs.pop();
        }
    }
}

impl SubAssign<&PolyDV> for PolyDV {
    fn sub_assign(&mut self, rhs: &PolyDV) {
        if self.d_coeffs.len() < rhs.d_coeffs.len() {
            self.d_coeffs.resize(rhs.d_coeffs.len(), Poly::zero());
        }
        for (a, b) in self.d_coeffs.iter_mut().zip(&rhs.d_coeffs) {
            *a -= b;
        }
        while self.d_coeffs.last().is_some_and(Poly::is_zero) {
            self.d_coeffs.pop();
        }
    }
}

impl serde::Serialize for PolyDV {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{parse_poly, rat};

    fn p(s: &str) -> PolyDV {
        parse_poly(s).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(&p("v + D") * &p("v - D"), p("v^2 - D^2"));
        assert!((&p("v + D") * &PolyDV::zero()).is_zero());
    }

    #[test]
    fn square_expansion() {
        // hand expansion, cross-checked by repeated multiplication
        let x = p("v - D");
        let expected = p("v^2 - 2*D*v + D^2");
        assert_eq!(&x * &x, expected);
        assert_eq!(x.pow(2), expected);
        assert_eq!(expected.to_string(), "v^2 - 2*D*v + D^2");
    }

    #[test]
    fn derivatives() {
        assert_eq!(p("v^3").deriv_v(1), p("3*v^2"));
        assert!(p("v^2").deriv_v(3).is_zero());
        assert_eq!(p("D*v^2 + v").deriv_v(1), p("2*D*v + 1"));
    }

    #[test]
    fn shift() {
        assert_eq!(PolyDV::shift_v_minus_d(&Poly::x()), p("v - D"));
        assert_eq!(
            PolyDV::shift_v_minus_d(&Poly::monomial(2, rat(1))),
            p("v^2 - 2*D*v + D^2")
        );
        assert_eq!(PolyDV::shift_v_minus_d(&Poly::one()), PolyDV::one());
    }

    #[test]
    fn printing() {
        assert_eq!(p("-5/2*v + 3").to_string(), "-5/2*v + 3");
        assert_eq!(PolyDV::zero().to_string(), "0");
        assert_eq!(p("-D").to_string(), "-D");
    }
}
