//! Machine-integer evaluation of the scalar product formula.
//!
//! Both factors are cleared of denominators, the formula is evaluated with
//! checked `i128` arithmetic, and the common denominator is divided back out.
//! `None` means some intermediate left the `i128` range.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{fastq, Poly, PolyDV, Rational};

/// `p = cleared / denominator`, one `v`-coefficient vector per `D`-power.
struct Cleared {
    coeffs: Vec<Vec<i128>>,
    denominator: BigInt,
}

fn clear(p: &PolyDV) -> Option<Cleared> {
    let mut den = BigInt::one();
    for (_, _, c) in p.terms() {
        den = den.lcm(c.denom());
    }
    let coeffs = p
        .d_coeffs()
        .iter()
        .map(|f| {
            f.coeffs()
                .iter()
                .map(|c| (c.numer() * (&den / c.denom())).to_i128())
                .collect::<Option<Vec<i128>>>()
        })
        .collect::<Option<Vec<_>>>()?;
    Some(Cleared { coeffs, denominator: den })
}

fn falling(n: usize, k: usize) -> Option<i128> {
    (0..k).try_fold(1i128, |acc, i| acc.checked_mul((n - i) as i128))
}

fn binomial(n: usize, k: usize) -> i128 {
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i as i128 + 1))
}

/// Adds `a ⊛_n b` into `out[n]` for every `n < out.len()`.
pub(super) fn scalar_products(a: &PolyDV, b: &PolyDV, out: &mut [PolyDV]) -> Option<()> {
    let bound = out.len();
    let (ca, cb) = (clear(a)?, clear(b)?);
    let va = ca.coeffs.iter().map(Vec::len).max().unwrap_or(0);
    let vb = cb.coeffs.iter().map(Vec::len).max().unwrap_or(0);
    let width = (va + vb).max(1);
    let depth = cb.coeffs.len().max(1);
    let mut acc = vec![vec![vec![0i128; width]; depth]; bound];
    let mut shifted: Vec<i128> = Vec::with_capacity(vb);
    for (i, alpha) in ca.coeffs.iter().enumerate() {
        if alpha.iter().all(|c| *c == 0) {
            continue;
        }
        let sign: i128 = if i % 2 == 0 { 1 } else { -1 };
        for (j, beta) in cb.coeffs.iter().enumerate() {
            for m in 0..beta.len() {
                if i + m >= bound {
                    break;
                }
                shifted.clear();
                for (q, c) in beta.iter().enumerate().skip(m) {
                    shifted.push(c.checked_mul(falling(q, m)?)?);
                }
                if shifted.iter().all(|c| *c == 0) {
                    continue;
                }
                for t in 0..=j {
                    let n = i + t + m;
                    if n >= bound {
                        break;
                    }
                    let c = (sign * binomial(j, t)).checked_mul(falling(n, n - m)?)?;
                    let row = &mut acc[n][j - t];
                    for (p, x) in alpha.iter().enumerate() {
                        if *x == 0 {
                            continue;
                        }
                        let cx = c.checked_mul(*x)?;
                        for (q, y) in shifted.iter().enumerate() {
                            let slot = &mut row[p + q];
                            *slot = slot.checked_add(cx.checked_mul(*y)?)?;
                        }
                    }
                }
            }
        }
    }
    let den = &ca.denominator * &cb.denominator;
    let small_den = den.to_i128();
    for (n, block) in acc.into_iter().enumerate() {
        if block.iter().all(|row| row.iter().all(|c| *c == 0)) {
            continue;
        }
        let d_coeffs = block
            .into_iter()
            .map(|row| {
                Poly::from_coeffs(
                    row.into_iter()
                        .map(|c| match (c, small_den) {
                            (0, _) => Rational::zero(),
                            (c, Some(d)) => fastq::reduced(c, d),
                            (c, None) => Rational::new(BigInt::from(c), den.clone()),
                        })
                        .collect(),
                )
            })
            .collect();
        out[n] += &PolyDV::from_d_coeffs(d_coeffs);
    }
    Some(())
}
