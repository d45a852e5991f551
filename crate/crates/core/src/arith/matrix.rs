use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{PolyDV, Rational};

/// Dense `n x n` matrix over `Q[D, v]`, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MatrixDV {
    size: usize,
    entries: Vec<PolyDV>,
}

impl MatrixDV {
    pub fn zero(size: usize) -> Self {
        assert!(size > 0, "matrix size must be positive");
        MatrixDV {
            size,
            entries: vec![PolyDV::zero(); size * size],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zero(size);
        for i in 0..size {
            m.entries[i * size + i] = PolyDV::one();
        }
        m
    }

    /// Matrix unit `E_ij` (zero-based indices).
    pub fn unit(size: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zero(size);
        m.entries[i * size + j] = PolyDV::one();
        m
    }

    /// Scalar matrix `p * Id`.
    pub fn scalar(size: usize, p: &PolyDV) -> Self {
        let mut m = Self::zero(size);
        for i in 0..size {
            m.entries[i * size + i] = p.clone();
        }
        m
    }

    pub fn from_entries(size: usize, entries: Vec<PolyDV>) -> Self {
        assert_eq!(entries.len(), size * size, "entry count must be size^2");
        assert!(size > 0, "matrix size must be positive");
        MatrixDV { size, entries }
    }

    pub fn from_rows(rows: Vec<Vec<PolyDV>>) -> Self {
        let size = rows.len();
        assert!(rows.iter().all(|r| r.len() == size), "matrix must be square");
        Self::from_entries(size, rows.into_iter().flatten().collect())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &PolyDV {
        &self.entries[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: PolyDV) {
        self.entries[i * self.size + j] = p;
    }

    pub fn entries(&self) -> &[PolyDV] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(PolyDV::is_zero)
    }

    pub fn deg_d(&self) -> Option<usize> {
        self.entries.iter().filter_map(PolyDV::deg_d).max()
    }

    pub fn deg_v(&self) -> Option<usize> {
        self.entries.iter().filter_map(PolyDV::deg_v).max()
    }

    pub fn map(&self, f: impl Fn(&PolyDV) -> PolyDV) -> Self {
        MatrixDV {
            size: self.size,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|p| p.scale(c))
    }

    /// Left multiplication of every entry by the scalar polynomial `p`.
    pub fn mul_scalar(&self, p: &PolyDV) -> Self {
        self.map(|e| e * p)
    }

    pub fn mul_d(&self, k: usize) -> Self {
        self.map(|p| p.mul_d(k))
    }

    pub fn deriv_v(&self, k: usize) -> Self {
        self.map(|p| p.deriv_v(k))
    }

    /// Combines `self` and `other` entrywise with the given scalar product,
    /// summing over the inner index like a matrix product.
    pub fn combine(&self, other: &Self, mut prod: impl FnMut(&PolyDV, &PolyDV) -> PolyDV) -> Self {
        assert_eq!(self.size, other.size, "matrix sizes differ");
        let n = self.size;
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..n {
                    let b = other.get(j, k);
                    if b.is_zero() {
                        continue;
                    }
                    out.entries[i * n + k] += &prod(a, b);
                }
            }
        }
        out
    }
}

impl fmt::Display for MatrixDV {
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

impl<'a> Add<&'a MatrixDV> for &'a MatrixDV {
    type Output = MatrixDV;
    fn add(self, rhs: &MatrixDV) -> MatrixDV {
        assert_eq!(self.size, rhs.size, "matrix sizes differ");
        MatrixDV {
            size: self.size,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a MatrixDV> for &'a MatrixDV {
    type Output = MatrixDV;
    fn sub(self, rhs: &MatrixDV) -> MatrixDV {
        assert_eq!(self.size, rhs.size, "matrix sizes differ");
        MatrixDV {
            size: self.size,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul<&'a MatrixDV> for &'a MatrixDV {
    type Output = MatrixDV;
    fn mul(self, rhs: &MatrixDV) -> MatrixDV {
        self.combine(rhs, |a, b| a * b)
    }
}

impl Neg for &MatrixDV {
    type Output = MatrixDV;
    fn neg(self) -> MatrixDV {
        self.map(|p| -p)
    }
}
