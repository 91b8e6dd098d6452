//! Band-to-tridiagonal reduction, implicit QL and inverse iteration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::banded::SymmetricBandedMatrix;
use crate::error::{Error, Result};

const QL_MAX_ITER: usize = 60;
const INVIT_MIN_ITER: usize = 3;
const INVIT_MAX_ITER: usize = 8;

/// Reduce `a` to tridiagonal form by Givens rotations, one subdiagonal per
/// pass, chasing each bulge off the end of the band.
///
/// Returns `(diagonal, subdiagonal)`; `e[i]` couples `i` and `i + 1`, and
/// `e[n - 1] = 0`.
pub fn tridiagonalize(a: &SymmetricBandedMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.dimension();
    let b = a.half_bandwidth().min(n.saturating_sub(1));
    let mut w = a.widened(a.half_bandwidth() + 1);

    for k in (2..=b).rev() {
        for j in 0..n - k {
            if !rotate(&mut w, j + k - 1, j) {
                continue;
            }
            let mut col = j + k - 1;
            while col + k + 1 < n {
                let row = col + k + 1;
                if !rotate(&mut w, row - 1, col) {
                    break;
                }
                col = row - 1;
            }
        }
    }

    let d = w.diagonal().to_vec();
    let mut e = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        e[i] = w.get(i + 1, i);
    }
    (d, e)
}

/// Rotate rows/columns `(p, p + 1)` so that entry `(p + 1, col)` vanishes.
/// Returns `false` when it is already zero.
fn rotate(w: &mut SymmetricBandedMatrix, p: usize, col: usize) -> bool {
    let q = p + 1;
    let y = w.get(q, col);
    if y == 0.0 {
        return false;
    }
    let x = w.get(p, col);
    let r = x.hypot(y);
    let (c, s) = (x / r, y / r);

    let n = w.dimension();
    let kb = w.half_bandwidth();
    let lo = q.saturating_sub(kb);
    let hi = (p + kb).min(n - 1);
    for i in lo..=hi {
        if i == p || i == q {
            continue;
        }
        let in_p = i.abs_diff(p) <= kb;
        let in_q = i.abs_diff(q) <= kb;
        let aip = if in_p { w.get(i, p) } else { 0.0 };
        let aiq = if in_q { w.get(i, q) } else { 0.0 };
        if aip == 0.0 && aiq == 0.0 {
            continue;
        }
        let (np, nq) = if i == col {
            (r, 0.0)
        } else {
            (c * aip + s * aiq, c * aiq - s * aip)
        };
        if in_p {
            w.set(i, p, np);
        }
        if in_q {
            w.set(i, q, nq);
        }
    }

    let (app, aqq, apq) = (w.get(p, p), w.get(q, q), w.get(p, q));
    let (cc, ss, cs) = (c * c, s * s, c * s);
    w.set(p, p, cc * app + 2.0 * cs * apq + ss * aqq);
    w.set(q, q, ss * app - 2.0 * cs * apq + cc * aqq);
    w.set(p, q, cs * (aqq - app) + (cc - ss) * apq);
    true
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL with
/// Wilkinson shifts. `d` is overwritten with the (unsorted) eigenvalues.
pub fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITER {
                return Err(Error::NoConvergence(l));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// LU factorization of `A − σI` with partial pivoting, kept in band form.
///
/// Row `r` stores columns `r − b ..= r + 2b`.
struct BandLu {
    n: usize,
    b: usize,
    width: usize,
    data: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandLu {
    fn new(n: usize, b: usize) -> Self {
        let width = 3 * b + 1;
        BandLu {
            n,
            b,
            width,
            data: vec![0.0; n * width],
            pivots: vec![0; n],
        }
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> usize {
        r * self.width + c + self.b - r
    }

    fn factor(&mut self, a: &SymmetricBandedMatrix, shift: f64, tiny: f64) {
        let (n, b) = (self.n, self.b);
        self.data.iter_mut().for_each(|v| *v = 0.0);
        for r in 0..n {
            let lo = r.saturating_sub(b);
            let hi = (r + b).min(n - 1);
            for c in lo..=hi {
                let idx = self.at(r, c);
                self.data[idx] = a.get(r, c);
            }
            let idx = self.at(r, r);
            self.data[idx] -= shift;
        }

        for k in 0..n {
            let last_row = (k + b).min(n - 1);
            let last_col = (k + 2 * b).min(n - 1);
            let mut piv = k;
            let mut best = self.data[self.at(k, k)].abs();
            for r in k + 1..=last_row {
                let v = self.data[self.at(r, k)].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            self.pivots[k] = piv;
            if piv != k {
                for c in k..=last_col {
                    let (i, j) = (self.at(k, c), self.at(piv, c));
                    self.data.swap(i, j);
                }
            }
            let dk = self.at(k, k);
            if self.data[dk].abs() < tiny {
                self.data[dk] = tiny;
            }
            let pivot = self.data[dk];
            for r in k + 1..=last_row {
                let ir = self.at(r, k);
                let l = self.data[ir] / pivot;
                self.data[ir] = l;
                if l == 0.0 {
                    continue;
                }
                for c in k + 1..=last_col {
                    let u = self.data[self.at(k, c)];
                    if u != 0.0 {
                        let rc = self.at(r, c);
                        self.data[rc] -= l * u;
                    }
                }
            }
        }
    }

    fn solve(&self, x: &mut [f64]) {
        let (n, b) = (self.n, self.b);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            if xk != 0.0 {
                for r in k + 1..=(k + b).min(n - 1) {
                    x[r] -= self.data[self.at(r, k)] * xk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for c in k + 1..=(k + 2 * b).min(n - 1) {
                s -= self.data[self.at(k, c)] * x[c];
            }
            x[k] = s / self.data[self.at(k, k)];
        }
    }
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

fn orthogonalize(x: &mut [f64], against: &[&[f64]]) {
    for v in against {
        let dot: f64 = x.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
        x.iter_mut().zip(v.iter()).for_each(|(a, b)| *a -= dot * b);
    }
}

/// Eigenvectors for the ascending `eigenvalues` by shifted inverse iteration.
///
/// Vectors whose eigenvalues lie within `2e−2·‖A‖` of an earlier one are
/// kept orthogonal to it by modified Gram–Schmidt. Output is column-major,
/// `eigenvalues.len()` columns of length `n`.
pub fn inverse_iteration(
    a: &SymmetricBandedMatrix,
    eigenvalues: &[f64],
    residual_tol: f64,
) -> Result<Vec<f64>> {
    let n = a.dimension();
    let b = a.half_bandwidth().min(n.saturating_sub(1));
    let norm = a.norm_inf().max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * norm;
    let window = 2e-2 * norm;
    let target = 1e-13 * norm;
    let mut lu = BandLu::new(n, b);
    let mut out = vec![0.0; n * eigenvalues.len()];
    let mut x = vec![0.0; n];
    let mut ax = vec![0.0; n];

    for (i, &lambda) in eigenvalues.iter().enumerate() {
        lu.factor(a, lambda, tiny);
        let (done, rest) = out.split_at_mut(i * n);
        let first = eigenvalues[..i].partition_point(|&m| lambda - m >= window);
        let near: Vec<&[f64]> = (first..i).map(|j| &done[j * n..(j + 1) * n]).collect();

        let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
        x.iter_mut().for_each(|v| *v = rng.gen_range(-1.0..1.0));
        let mut residual = f64::INFINITY;
        for it in 1..=INVIT_MAX_ITER {
            orthogonalize(&mut x, &near);
            normalize(&mut x);
            lu.solve(&mut x);
            orthogonalize(&mut x, &near);
            orthogonalize(&mut x, &near);
            normalize(&mut x);
            a.mul_vec_into(&x, &mut ax);
            residual = ax
                .iter()
                .zip(&x)
                .map(|(h, v)| (h - lambda * v).powi(2))
                .sum::<f64>()
                .sqrt();
            if it >= INVIT_MIN_ITER && residual <= target {
                break;
            }
        }
        if !(residual <= residual_tol * norm) {
            return Err(Error::NoConvergence(i));
        }
        rest[..n].copy_from_slice(&x);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_band(n: usize, b: usize, seed: u64) -> SymmetricBandedMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = SymmetricBandedMatrix::zeros(n, b);
        for c in 0..n {
            for d in 0..=b.min(n - 1 - c) {
                m.set(c + d, c, rng.gen_range(-1.0..1.0));
            }
        }
        m
    }

    #[test]
    fn tridiagonal_reduction_preserves_spectrum() {
        for (n, b) in [(1, 0), (2, 1), (9, 3), (30, 7), (12, 11)] {
            let m = random_band(n, b, n as u64);
            let (mut d, mut e) = tridiagonalize(&m);
            tridiagonal_eigenvalues(&mut d, &mut e).unwrap();
            d.sort_by(f64::total_cmp);
            let mut reference: Vec<f64> =
                nalgebra::SymmetricEigen::new(m.to_dense()).eigenvalues.iter().copied().collect();
            reference.sort_by(f64::total_cmp);
            for (x, y) in d.iter().zip(&reference) {
                assert!((x - y).abs() < 1e-12, "n={n} b={b}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn ql_on_known_tridiagonal() {
        // 1D Laplacian: 2 − 2cos(kπ/(n+1))
        let n = 20;
        let mut d = vec![2.0; n];
        let mut e = vec![-1.0; n];
        tridiagonal_eigenvalues(&mut d, &mut e).unwrap();
        d.sort_by(f64::total_cmp);
        for (k, v) in d.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn band_lu_solves() {
        let m = random_band(25, 4, 3);
        let mut lu = BandLu::new(25, 4);
        lu.factor(&m, 0.3, 1e-300);
        let rhs: Vec<f64> = (0..25).map(|i| (i as f64).sin()).collect();
        let mut x = rhs.clone();
        lu.solve(&mut x);
        let mut shifted = m.clone();
        for i in 0..25 {
            shifted.add(i, i, -0.3);
        }
        let back = shifted.mul_vec(&x);
        for (u, v) in back.iter().zip(&rhs) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn inverse_iteration_on_degenerate_diagonal() {
        let mut m = SymmetricBandedMatrix::zeros(6, 2);
        for (i, v) in [1.0, 2.0, 1.0, 3.0, 1.0, 2.0].iter().enumerate() {
            m.set(i, i, *v);
        }
        let vals = [1.0, 1.0, 1.0, 2.0, 2.0, 3.0];
        let vecs = inverse_iteration(&m, &vals, 1e-10).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let dot: f64 = (0..6).map(|k| vecs[i * 6 + k] * vecs[j * 6 + k]).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-12);
            }
        }
    }
}
