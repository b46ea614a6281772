//! Banded direct solvers: LU with partial pivoting for general systems and
//! an LDLᵀ factorization whose pivot signs give matrix inertia.

use crate::{CmcError, Result};

/// General band matrix with `kl` sub- and `ku` super-diagonals. Each row keeps
/// room for the `kl` extra super-diagonals created by row interchanges.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let w = 2 * kl + ku + 1;
        Self { n, kl, ku, data: vec![0.0; n * w] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn width(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.kl + self.ku);
        i * self.width() + (j + self.kl - i)
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && j <= i + self.ku
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            0.0
        }
    }

    /// Adds `v` to entry `(i, j)`. Panics outside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.data[self.idx(i, j)] * x[j]).sum()
            })
            .collect()
    }

    pub fn lu(mut self) -> Result<BandedLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut piv = vec![0usize; n];
        let mut mult = vec![0.0; n * kl.max(1)];
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let right = (k + kl + ku).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.idx(k, k)].abs();
            for i in k + 1..=last {
                let a = self.data[self.idx(i, k)].abs();
                if a > best {
                    best = a;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(CmcError::ConvergenceFailure(format!(
                    "singular banded matrix at column {k}"
                )));
            }
            piv[k] = p;
            if p != k {
                for j in k..=right {
                    let (a, b) = (self.idx(k, j), self.idx(p, j));
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.idx(k, k)];
            let w = self.width();
            let cols = right - k;
            for i in k + 1..=last {
                let ik = self.idx(i, k);
                let m = self.data[ik] / pivot;
                mult[k * kl + (i - k - 1)] = m;
                self.data[ik] = 0.0;
                if m != 0.0 {
                    // Columns k+1..=right are contiguous in both rows.
                    let (head, tail) = self.data.split_at_mut(i * w);
                    let src = &head[k * w + kl + 1..k * w + kl + 1 + cols];
                    let off = k + 1 + kl - i;
                    for (d, s) in tail[off..off + cols].iter_mut().zip(src) {
                        *d -= m * s;
                    }
                }
            }
        }
        Ok(BandedLu { a: self, piv, mult })
    }
}

/// Factorization `P A = L U` of a [`BandedMatrix`].
#[derive(Debug, Clone)]
pub struct BandedLu {
    a: BandedMatrix,
    piv: Vec<usize>,
    mult: Vec<f64>,
}

impl BandedLu {
    pub fn n(&self) -> usize {
        self.a.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, kl, ku) = (self.a.n, self.a.kl, self.a.ku);
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            let xk = x[k];
            if xk != 0.0 {
                for i in k + 1..=(k + kl).min(n - 1) {
                    x[i] -= self.mult[k * kl + (i - k - 1)] * xk;
                }
            }
        }
        let w = self.a.width();
        for k in (0..n).rev() {
            let right = (k + kl + ku).min(n - 1);
            let row = &self.a.data[k * w + kl..k * w + kl + 1 + (right - k)];
            let s: f64 = row[1..].iter().zip(&x[k + 1..=right]).map(|(a, b)| a * b).sum();
            x[k] = (x[k] - s) / row[0];
        }
        x
    }
}

/// Symmetric band matrix stored by its lower band of half-width `kd`.
#[derive(Debug, Clone)]
pub struct SymBandedMatrix {
    n: usize,
    kd: usize,
    data: Vec<f64>,
}

impl SymBandedMatrix {
    pub fn zeros(n: usize, kd: usize) -> Self {
        Self { n, kd, data: vec![0.0; n * (kd + 1)] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kd(&self) -> usize {
        self.kd
    }

    /// Adds `v` to the symmetric pair `(i, j)`, `(j, i)`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        assert!(i - j <= self.kd, "entry ({i}, {j}) outside band");
        self.data[i * (self.kd + 1) + (i - j)] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.kd {
            0.0
        } else {
            self.data[i * (self.kd + 1) + (i - j)]
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let row = &self.data[i * (self.kd + 1)..(i + 1) * (self.kd + 1)];
            y[i] += row[0] * x[i];
            for d in 1..=self.kd.min(i) {
                let j = i - d;
                y[i] += row[d] * x[j];
                y[j] += row[d] * x[i];
            }
        }
        y
    }

    /// General banded copy of `self − shift·I`.
    pub fn shifted_general(&self, shift: f64) -> BandedMatrix {
        let mut m = BandedMatrix::zeros(self.n, self.kd, self.kd);
        for i in 0..self.n {
            for d in 0..=self.kd.min(i) {
                let v = self.data[i * (self.kd + 1) + d];
                let j = i - d;
                if d == 0 {
                    m.add(i, i, v - shift);
                } else if v != 0.0 {
                    m.add(i, j, v);
                    m.add(j, i, v);
                }
            }
        }
        m
    }

    /// Number of eigenvalues strictly below `shift`, from the pivots of
    /// `LDLᵀ = A − shift·I` (Sylvester's law of inertia).
    pub fn count_below(&self, shift: f64) -> usize {
        let (n, kd) = (self.n, self.kd);
        let w = kd + 1;
        // Column storage: col[j*w + d] = a(j + d, j). Right-looking updates
        // are then contiguous axpys.
        let mut col = vec![0.0; n * w];
        for j in 0..n {
            for d in 0..w.min(n - j) {
                col[j * w + d] = self.data[(j + d) * w + d];
            }
            col[j * w] -= shift;
        }
        let tiny = f64::EPSILON * (1.0 + shift.abs());
        let mut negative = 0;
        let mut l = vec![0.0; kd];
        for k in 0..n {
            let mut dk = col[k * w];
            if dk.abs() < tiny {
                dk = -tiny;
            }
            if dk < 0.0 {
                negative += 1;
            }
            let len = kd.min(n - 1 - k);
            for d in 0..len {
                l[d] = col[k * w + d + 1] / dk;
            }
            for a in 0..len {
                let j = k + 1 + a;
                let f = l[a] * dk;
                if f == 0.0 {
                    continue;
                }
                let cj = &mut col[j * w..j * w + (len - a)];
                for (c, lv) in cj.iter_mut().zip(&l[a..len]) {
                    *c -= f * lv;
                }
            }
        }
        negative
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let mut radius = 0.0;
            let a = (i.saturating_sub(self.kd)..(i + self.kd + 1).min(self.n))
                .filter(|&j| j != i)
                .map(|j| self.get(i, j).abs());
            for v in a {
                radius += v;
            }
            let c = self.get(i, i);
            lo = lo.min(c - radius);
            hi = hi.max(c + radius);
        }
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymBandedMatrix {
        let mut a = SymBandedMatrix::zeros(n, 1);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i > 0 {
                a.add(i, i - 1, -1.0);
            }
        }
        a
    }

    #[test]
    fn lu_solves_pivoting_system() {
        // First pivot is zero, forcing an interchange.
        let mut m = BandedMatrix::zeros(4, 1, 1);
        let entries = [
            (0, 0, 0.0),
            (0, 1, 2.0),
            (1, 0, 1.0),
            (1, 1, 1.0),
            (1, 2, 3.0),
            (2, 1, 4.0),
            (2, 2, -1.0),
            (2, 3, 1.0),
            (3, 2, 2.0),
            (3, 3, 5.0),
        ];
        for &(i, j, v) in &entries {
            m.add(i, j, v);
        }
        let x_true = [1.0, -2.0, 0.5, 3.0];
        let b = m.matvec(&x_true);
        let x = m.lu().unwrap().solve(&b);
        for (a, e) in x.iter().zip(x_true) {
            assert!((a - e).abs() < 1e-13, "{a} vs {e}");
        }
    }

    #[test]
    fn inertia_of_laplacian() {
        let n = 20;
        let a = laplacian(n);
        // eigenvalues 2 - 2cos(kπ/(n+1))
        let eig: Vec<f64> = (1..=n)
            .map(|k| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n + 1) as f64).cos())
            .collect();
        for (k, &lam) in eig.iter().enumerate() {
            assert_eq!(a.count_below(lam - 1e-9), k);
            assert_eq!(a.count_below(lam + 1e-9), k + 1);
        }
    }

    #[test]
    fn shifted_general_matches_symmetric_product() {
        let a = laplacian(6);
        let x = [1.0, 2.0, -1.0, 0.0, 3.0, 1.5];
        let g = a.shifted_general(0.5);
        let y1 = g.matvec(&x);
        let y2 = a.matvec(&x);
        for i in 0..6 {
            assert!((y1[i] - (y2[i] - 0.5 * x[i])).abs() < 1e-15);
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let m = BandedMatrix::zeros(3, 1, 1);
        assert!(m.lu().is_err());
    }
}
