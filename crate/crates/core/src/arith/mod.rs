//! Exact arithmetic over the rationals: univariate polynomials, polynomials
//! in `D` and `v`, and square matrices over them.
//!
//! The ground field is always `Q`. Nothing in this crate uses floating point.

pub(crate) mod fastq;
pub mod linsolve;
mod matrix;
pub(crate) mod parse;
mod poly;
pub(crate) mod polydv;

pub use matrix::MatrixDV;
pub use parse::{parse_matrix, parse_poly, ParseError};
pub use poly::Poly;
pub use polydv::PolyDV;

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Exact rational number with arbitrary-precision numerator and denominator.
pub type Rational = num_rational::BigRational;

/// Univariate polynomial in `v`.
pub type PolyV = Poly;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `n! / (n - k)!`, zero when `k > n`.
pub fn falling(n: usize, k: usize) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let mut acc = BigInt::one();
    for i in (n - k + 1)..=n {
        acc *= i;
    }
    Rational::from_integer(acc)
}

pub fn factorial(n: usize) -> Rational {
    falling(n, n)
}

pub fn binomial(n: usize, k: usize) -> Rational {
    if k > n {
        return Rational::zero();
    }
    falling(n, k) / factorial(k)
}

/// Renders a rational as `num/den` (or just `num` for integers).
pub fn rational_string(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinatorics() {
        assert_eq!(binomial(5, 2), rat(10));
        assert_eq!(binomial(2, 5), rat(0));
        assert_eq!(falling(4, 2), rat(12));
        assert_eq!(factorial(0), rat(1));
        assert_eq!(rational_string(&ratio(-5, 2)), "-5/2");
        assert_eq!(rational_string(&rat(3)), "3");
    }
}
