//! Rational multiplication and addition with a machine-word fast path.
//!
//! When both operands have numerator and denominator in `i64` range the
//! result is computed in `i128` and reduced with a native gcd; otherwise the
//! arbitrary-precision operation runs. Results are always fully reduced.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::Rational;

fn small(q: &Rational) -> Option<(i64, i64)> {
    Some((q.numer().to_i64()?, q.denom().to_i64()?))
}

fn gcd(a: u128, b: u128) -> u128 {
    match (u64::try_from(a), u64::try_from(b)) {
        (Ok(x), Ok(y)) => x.gcd(&y) as u128,
        _ => a.gcd(&b),
    }
}

/// `n/d` with `d > 0`, reduced.
pub fn reduced(n: i128, d: i128) -> Rational {
    if n == 0 {
        return Rational::zero();
    }
    let g = gcd(n.unsigned_abs(), d.unsigned_abs()) as i128;
    if g == 1 {
        return Rational::new_raw(BigInt::from(n), BigInt::from(d));
    }
    Rational::new_raw(BigInt::from(n / g), BigInt::from(d / g))
}

pub fn mul(a: &Rational, b: &Rational) -> Rational {
    match (small(a), small(b)) {
        (Some((an, ad)), Some((bn, bd))) => reduced(an as i128 * bn as i128, ad as i128 * bd as i128),
        _ => a * b,
    }
}

pub fn add_assign(a: &mut Rational, b: &Rational) {
    if b.is_zero() {
        return;
    }
    match (small(a), small(b)) {
        (Some((an, ad)), Some((bn, bd))) => {
            let (an, ad, bn, bd) = (an as i128, ad as i128, bn as i128, bd as i128);
            *a = if ad == bd { reduced(an + bn, ad) } else { reduced(an * bd + bn * ad, ad * bd) };
        }
        _ => *a += b,
    }
}

pub fn sub_assign(a: &mut Rational, b: &Rational) {
    if b.is_zero() {
        return;
    }
    match (small(a), small(b)) {
        (Some((an, ad)), Some((bn, bd))) => {
            let (an, ad, bn, bd) = (an as i128, ad as i128, bn as i128, bd as i128);
            *a = if ad == bd { reduced(an - bn, ad) } else { reduced(an * bd - bn * ad, ad * bd) };
        }
        _ => *a -= b,
    }
}

/// `acc += a·b`.
pub fn add_product(acc: &mut Rational, a: &Rational, b: &Rational) {
    if a.is_zero() || b.is_zero() {
        return;
    }
    add_assign(acc, &mul(a, b));
}
