//! Tensor-product spaces and sums of local operator products.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Mixed-radix product space; site 0 is the most significant digit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorSpace {
    dims: Vec<usize>,
    strides: Vec<usize>,
}

impl TensorSpace {
    pub fn new(dims: Vec<usize>) -> Self {
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        TensorSpace { dims, strides }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dimension(&self) -> usize {
        self.dims.iter().product()
    }

    #[inline]
    pub fn digit(&self, index: usize, site: usize) -> usize {
        (index / self.strides[site]) % self.dims[site]
    }

    #[inline]
    pub fn with_digit(&self, index: usize, site: usize, value: usize) -> usize {
        index - self.digit(index, site) * self.strides[site] + value * self.strides[site]
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.strides)
            .map(|(d, s)| d * s)
            .sum()
    }

    /// Tensor product of per-site vectors.
    pub fn product_state(&self, factors: &[DVector<Complex64>]) -> DVector<Complex64> {
        assert_eq!(factors.len(), self.dims.len());
        DVector::from_fn(self.dimension(), |i, _| {
            factors
                .iter()
                .enumerate()
                .map(|(site, f)| f[self.digit(i, site)])
                .product()
        })
    }
}

#[derive(Clone, Debug)]
pub struct LocalOp {
    pub site: usize,
    pub matrix: DMatrix<Complex64>,
}

/// `coeff · ⊗_k factors[k]`, identity on the remaining sites.
#[derive(Clone, Debug)]
pub struct Term {
    pub coeff: Complex64,
    pub factors: Vec<LocalOp>,
}

impl Term {
    pub fn real(coeff: f64, factors: Vec<LocalOp>) -> Self {
        Term {
            coeff: Complex64::new(coeff, 0.0),
            factors,
        }
    }

    fn act(&self, space: &TensorSpace, column: usize, out: &mut Vec<(usize, Complex64)>) {
        out.clear();
        out.push((column, self.coeff));
        let mut next = Vec::new();
        for f in &self.factors {
            next.clear();
            for &(k, amp) in out.iter() {
                let d = space.digit(k, f.site);
                for r in 0..f.matrix.nrows() {
                    let m = f.matrix[(r, d)];
                    if m != ZERO {
                        next.push((space.with_digit(k, f.site, r), amp * m));
                    }
                }
            }
            std::mem::swap(out, &mut next);
        }
    }
}

pub fn assemble(space: &TensorSpace, terms: &[Term]) -> DMatrix<Complex64> {
    let dim = space.dimension();
    let mut h = DMatrix::zeros(dim, dim);
    let mut buf = Vec::new();
    for term in terms {
        if term.coeff == ZERO {
            continue;
        }
        for col in 0..dim {
            term.act(space, col, &mut buf);
            for &(row, amp) in &buf {
                h[(row, col)] += amp;
            }
        }
    }
    h
}

/// Matrix-free action of a term sum on a vector.
pub fn apply(space: &TensorSpace, terms: &[Term], v: &DVector<Complex64>) -> DVector<Complex64> {
    let mut out = DVector::zeros(v.len());
    let mut buf = Vec::new();
    for term in terms {
        for (col, &x) in v.iter().enumerate() {
            if x == ZERO {
                continue;
            }
            term.act(space, col, &mut buf);
            for &(row, amp) in &buf {
                out[row] += amp * x;
            }
        }
    }
    out
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Truncated annihilation operator on `Fock(dim)`.
pub fn annihilation(dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |r, k| if k == r + 1 { c((k as f64).sqrt()) } else { ZERO })
}

pub fn creation(dim: usize) -> DMatrix<Complex64> {
    annihilation(dim).adjoint()
}

pub fn number(dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |r, k| if r == k { c(r as f64) } else { ZERO })
}

/// `a + a†`.
pub fn quadrature(dim: usize) -> DMatrix<Complex64> {
    annihilation(dim) + creation(dim)
}

/// Spin-½ operators `σ/2` in the `(e, g)` basis, `e` spin-up.
pub fn spin_x() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[ZERO, c(0.5), c(0.5), ZERO])
}

pub fn spin_y() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(
        2,
        2,
        &[ZERO, Complex64::new(0.0, -0.5), Complex64::new(0.0, 0.5), ZERO],
    )
}

pub fn spin_z() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[c(0.5), ZERO, ZERO, c(-0.5)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_algebra() {
        // [s_x, s_y] = i s_z
        let comm = spin_x() * spin_y() - spin_y() * spin_x();
        let diff = comm - spin_z() * Complex64::i();
        assert!(diff.norm() < 1e-15);
    }

    #[test]
    fn ladder_commutator_below_cutoff() {
        let n = 6;
        let comm = annihilation(n) * creation(n) - creation(n) * annihilation(n);
        for k in 0..n - 1 {
            assert!((comm[(k, k)] - c(1.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn assemble_matches_apply() {
        let space = TensorSpace::new(vec![3, 2, 2]);
        let terms = vec![
            Term::real(1.0, vec![LocalOp { site: 0, matrix: number(3) }]),
            Term::real(
                0.7,
                vec![
                    LocalOp { site: 0, matrix: quadrature(3) },
                    LocalOp { site: 2, matrix: spin_x() },
                ],
            ),
        ];
        let h = assemble(&space, &terms);
        let v = DVector::from_fn(12, |i, _| Complex64::new(i as f64, 1.0 - i as f64));
        let hv = apply(&space, &terms, &v);
        assert!((h * v - hv).norm() < 1e-13);
    }

    #[test]
    fn digits_round_trip() {
        let space = TensorSpace::new(vec![4, 2, 3]);
        for i in 0..space.dimension() {
            let digits: Vec<usize> = (0..3).map(|s| space.digit(i, s)).collect();
            assert_eq!(space.index(&digits), i);
        }
        assert_eq!(space.with_digit(space.index(&[2, 1, 0]), 2, 2), space.index(&[2, 1, 2]));
    }
}
