//! Seeded random elements for property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{MatrixDV, Poly, PolyDV, Rational};
use crate::conformal::CendElem;
use crate::counterexample::CxElem;

/// Reproducible source of sparse elements with small rational coefficients.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// `±a/b` with `a ≤ 5`, `b ≤ 3`; zero half of the time.
    pub fn coefficient(&mut self) -> Rational {
        if self.rng.gen_bool(0.5) {
            return Rational::from_integer(0.into());
        }
        let num: i64 = self.rng.gen_range(-5..=5);
        let den: i64 = self.rng.gen_range(1..=3);
        Rational::new(num.into(), den.into())
    }

    pub fn poly(&mut self, max_deg: usize) -> Poly {
        Poly::from_coeffs((0..=max_deg).map(|_| self.coefficient()).collect())
    }

    pub fn poly_dv(&mut self, max_d: usize, max_v: usize) -> PolyDV {
        PolyDV::from_d_coeffs((0..=max_d).map(|_| self.poly(max_v)).collect())
    }

    pub fn cend(&mut self, size: usize, max_d: usize, max_v: usize) -> CendElem {
        let entries = (0..size * size).map(|_| self.poly_dv(max_d, max_v)).collect();
        CendElem::new(MatrixDV::from_entries(size, entries))
    }

    /// `Σ_{k ≤ max_k} (v−D)^k a(f_k, g_k)` with `deg f_k, deg g_k ≤ max_deg`.
    pub fn cx_elem(&mut self, max_k: usize, max_deg: usize) -> CxElem {
        let mut x = CxElem::zero();
        for k in 0..=max_k {
            let f = self.poly(max_deg);
            let g = self.poly(max_deg);
            x.add_term(k, f, g);
        }
        x
    }

    /// An element of the radical: every `f_k` is zero.
    pub fn cx_radical(&mut self, max_k: usize, max_deg: usize) -> CxElem {
        let mut x = CxElem::zero();
        for k in 0..=max_k {
            let g = self.poly(max_deg);
            x.add_term(k, Poly::zero(), g);
        }
        x
    }

    /// A word of length `len` in the letters `p`, `q`.
    pub fn weyl_word(&mut self, len: usize) -> String {
        (0..len).map(|_| if self.rng.gen_bool(0.5) { 'p' } else { 'q' }).collect()
    }

    pub fn index(&mut self, upper: usize) -> usize {
        self.rng.gen_range(0..upper)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_elements() {
        let (mut a, mut b) = (Sampler::new(7), Sampler::new(7));
        assert_eq!(a.cend(2, 3, 4), b.cend(2, 3, 4));
        assert_eq!(a.cx_elem(2, 5), b.cx_elem(2, 5));
        assert_eq!(a.weyl_word(9), b.weyl_word(9));
    }

    #[test]
    fn degrees_respect_bounds() {
        let mut s = Sampler::new(1);
        for _ in 0..20 {
            let x = s.cend(2, 3, 4);
            assert!(x.deg_d().is_none_or(|d| d <= 3));
            assert!(x.deg_v().is_none_or(|d| d <= 4));
        }
    }
}
