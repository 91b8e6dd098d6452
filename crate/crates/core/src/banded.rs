use nalgebra::DMatrix;

/// Real symmetric band matrix storing only the lower triangle.
///
/// Entry `(i + d, i)` for `0 ≤ d ≤ b` lives at `data[d * n + i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricBandedMatrix {
    n: usize,
    b: usize,
    data: Vec<f64>,
}

impl SymmetricBandedMatrix {
    pub fn zeros(n: usize, half_bandwidth: usize) -> Self {
        SymmetricBandedMatrix {
            n,
            b: half_bandwidth,
            data: vec![0.0; n * (half_bandwidth + 1)],
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.b
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let d = r - c;
        if d > self.b {
            0.0
        } else {
            self.data[d * self.n + c]
        }
    }

    /// Panics if `(i, j)` is outside the band.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let d = r - c;
        assert!(d <= self.b, "({i}, {j}) outside half-bandwidth {}", self.b);
        self.data[d * self.n + c] = value;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let v = self.get(i, j);
        self.set(i, j, v + value);
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.data[..self.n]
    }

    /// Largest `|i − j|` with a nonzero entry.
    pub fn occupied_bandwidth(&self) -> usize {
        (0..=self.b)
            .rev()
            .find(|&d| self.data[d * self.n..(d + 1) * self.n].iter().any(|&v| v != 0.0))
            .unwrap_or(0)
    }

    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        for d in 0..=self.b {
            for c in 0..self.n.saturating_sub(d) {
                if !self.data[d * self.n + c].is_finite() {
                    return Some((c + d, c));
                }
            }
        }
        None
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.b);
                let hi = (i + self.b).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j).abs()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        y.iter_mut().for_each(|v| *v = 0.0);
        let n = self.n;
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.data[i] * x[i];
        }
        for d in 1..=self.b.min(n.saturating_sub(1)) {
            let band = &self.data[d * n..d * n + n - d];
            for (c, &a) in band.iter().enumerate() {
                y[c + d] += a * x[c];
                y[c] += a * x[c + d];
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for d in 0..=self.b {
            for c in 0..self.n.saturating_sub(d) {
                let v = self.data[d * self.n + c];
                m[(c + d, c)] = v;
                m[(c, c + d)] = v;
            }
        }
        m
    }

    /// Copy with a wider band (extra diagonals zero).
    pub(crate) fn widened(&self, half_bandwidth: usize) -> Self {
        assert!(half_bandwidth >= self.b);
        let mut out = SymmetricBandedMatrix::zeros(self.n, half_bandwidth);
        out.data[..self.data.len()].copy_from_slice(&self.data);
        out
    }
}
