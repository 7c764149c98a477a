//! Dense complex matrices sized for covariance work (a few dozen rows at most).
//!
//! Provides exactly the kernels the rate evaluators need: Gram-matrix
//! accumulation, Hermitian Cholesky log-determinants (with one jitter retry),
//! and a cyclic Jacobi eigensolver for PSD checks and singular values.

use crate::error::{Error, Result};
use num_complex::Complex64;

pub const JITTER: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    nrows: usize,
    ncols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CMat {
            nrows,
            ncols,
            data: vec![Complex64::new(0.0, 0.0); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    /// self += s * H H^H for a real scale s.
    ///
    /// The (i,j) and (j,i) entries are built as exact conjugates, so the
    /// result is Hermitian to the bit.
    pub fn add_scaled_gram(&mut self, h: &CMat, s: f64) {
        assert_eq!(self.nrows, h.nrows);
        assert!(self.is_square());
        for i in 0..self.nrows {
            for j in i..self.nrows {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..h.ncols {
                    acc += h[(i, k)] * h[(j, k)].conj();
                }
                acc *= s;
                self[(i, j)] += acc;
                if j != i {
                    self[(j, i)] += acc.conj();
                }
            }
        }
    }

    /// self += s * H^H H (the k x k Gram of an n x k matrix).
    pub fn add_scaled_gram_t(&mut self, h: &CMat, s: f64) {
        assert_eq!(self.nrows, h.ncols);
        assert!(self.is_square());
        for i in 0..self.nrows {
            for j in i..self.nrows {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..h.nrows {
                    acc += h[(k, i)].conj() * h[(k, j)];
                }
                acc *= s;
                self[(i, j)] += acc;
                if j != i {
                    self[(j, i)] += acc.conj();
                }
            }
        }
    }

    /// Copy scaled by a real factor.
    pub fn scaled(&self, s: f64) -> CMat {
        let mut out = self.clone();
        for z in &mut out.data {
            *z *= s;
        }
        out
    }

    /// Concatenate matrices with equal row counts side by side.
    pub fn hconcat(parts: &[&CMat]) -> CMat {
        assert!(!parts.is_empty());
        let nrows = parts[0].nrows;
        assert!(parts.iter().all(|p| p.nrows == nrows));
        let ncols = parts.iter().map(|p| p.ncols).sum();
        let mut out = CMat::zeros(nrows, ncols);
        let mut c0 = 0;
        for p in parts {
            out.set_block(0, c0, p);
            c0 += p.ncols;
        }
        out
    }

    pub fn add_diag(&mut self, s: f64) {
        assert!(self.is_square());
        for i in 0..self.nrows {
            self[(i, i)] += Complex64::new(s, 0.0);
        }
    }

    pub fn add_assign(&mut self, other: &CMat) {
        assert_eq!(self.nrows, other.nrows);
        assert_eq!(self.ncols, other.ncols);
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += *b;
        }
    }

    /// Copy `block` into self with its (0,0) placed at (r0, c0).
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &CMat) {
        assert!(r0 + block.nrows <= self.nrows && c0 + block.ncols <= self.ncols);
        for i in 0..block.nrows {
            for j in 0..block.ncols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.ncols, other.nrows);
        let mut out = CMat::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for j in 0..other.ncols {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..self.ncols {
                    acc += self[(i, k)] * other[(k, j)];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn trace_re(&self) -> f64 {
        (0..self.nrows.min(self.ncols))
            .map(|i| self[(i, i)].re)
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max deviation from Hermitian symmetry, relative to the largest entry.
    pub fn hermitian_defect(&self) -> f64 {
        assert!(self.is_square());
        let scale = self.max_abs().max(1e-300);
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            worst = worst.max(self[(i, i)].im.abs() / scale);
            for j in (i + 1)..self.nrows {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm() / scale;
                worst = worst.max(d);
            }
        }
        worst
    }

    fn check_hermitian(&self, what: &str) -> Result<()> {
        if !self.is_square() {
            return Err(Error::InvalidConfig(format!("{what}: matrix not square")));
        }
        if self.hermitian_defect() > 1e-8 {
            return Err(Error::Numerical(format!("{what}: matrix not Hermitian")));
        }
        Ok(())
    }

    /// In-place lower Cholesky factor of a Hermitian PD matrix.
    fn cholesky(&self) -> Option<Vec<Complex64>> {
        let n = self.nrows;
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut d = self[(j, j)].re;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if !d.is_finite() || d <= 0.0 {
                return None;
            }
            let djj = d.sqrt();
            l[j * n + j] = Complex64::new(djj, 0.0);
            for i in (j + 1)..n {
                let mut acc = self[(i, j)];
                for k in 0..j {
                    acc -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = acc / djj;
            }
        }
        Some(l)
    }

    /// log2 det of a Hermitian positive definite matrix via Cholesky.
    ///
    /// One retry with `JITTER * I` before reporting ill-conditioning.
    pub fn logdet2_pd(&self, what: &str) -> Result<f64> {
        self.check_hermitian(what)?;
        let n = self.nrows;
        if let Some(l) = self.cholesky() {
            return Ok((0..n).map(|j| 2.0 * l[j * n + j].re.log2()).sum());
        }
        let mut jittered = self.clone();
        jittered.add_diag(JITTER);
        match jittered.cholesky() {
            Some(l) => Ok((0..n).map(|j| 2.0 * l[j * n + j].re.log2()).sum()),
            None => Err(Error::Numerical(format!(
                "{what}: Cholesky failed even after {JITTER:e} jitter"
            ))),
        }
    }

    /// Lower Cholesky factor of a Hermitian PD matrix, with one jitter
    /// retry, returned as a full matrix.
    pub fn cholesky_factor(&self, what: &str) -> Result<CMat> {
        self.check_hermitian(what)?;
        let n = self.nrows;
        let l = match self.cholesky() {
            Some(l) => l,
            None => {
                let mut jittered = self.clone();
                jittered.add_diag(JITTER);
                jittered.cholesky().ok_or_else(|| {
                    Error::Numerical(format!(
                        "{what}: Cholesky failed even after {JITTER:e} jitter"
                    ))
                })?
            }
        };
        let mut out = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                out[(i, j)] = l[i * n + j];
            }
        }
        Ok(out)
    }

    /// Solve L X = B for lower-triangular L by forward substitution.
    pub fn forward_solve(&self, b: &CMat) -> CMat {
        assert!(self.is_square() && self.nrows == b.nrows);
        let n = self.nrows;
        let mut x = b.clone();
        for col in 0..b.ncols {
            for i in 0..n {
                let mut acc = x[(i, col)];
                for k in 0..i {
                    acc -= self[(i, k)] * x[(k, col)];
                }
                x[(i, col)] = acc / self[(i, i)];
            }
        }
        x
    }

    /// Eigenvalues of a Hermitian matrix by cyclic Jacobi, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        assert!(self.is_square());
        let n = self.nrows;
        let mut a = self.clone();
        let scale = a.max_abs().max(1e-300);
        for _sweep in 0..60 {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off.max(a[(p, q)].norm());
                }
            }
            if off <= 1e-14 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let z = a[(p, q)];
                    let r = z.norm();
                    if r <= 1e-300 {
                        continue;
                    }
                    let phase = z / r;
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let theta = 0.5 * (2.0 * r).atan2(app - aqq);
                    let c = theta.cos();
                    let s = theta.sin();
                    // Column update: A <- A U with U[p,p]=U[q,q]=c,
                    // U[p,q] = -s*phase, U[q,p] = s*conj(phase).
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * c + akq * (s * phase.conj());
                        a[(k, q)] = akp * (-s * phase) + akq * c;
                    }
                    // Row update: A <- U^H A.
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = apk * c + aqk * (s * phase);
                        a[(q, k)] = apk * (-s * phase.conj()) + aqk * c;
                    }
                }
            }
        }
        let mut evs: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
        evs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        evs
    }

    /// Singular values (ascending) of a general matrix, via eigenvalues of
    /// whichever Gram matrix is smaller.
    pub fn singular_values(&self) -> Vec<f64> {
        let k = self.nrows.min(self.ncols);
        let mut gram = CMat::zeros(k, k);
        if self.ncols <= self.nrows {
            // H^H H
            for i in 0..k {
                for j in 0..k {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for r in 0..self.nrows {
                        acc += self[(r, i)].conj() * self[(r, j)];
                    }
                    gram[(i, j)] = acc;
                }
            }
        } else {
            gram.add_scaled_gram(self, 1.0);
        }
        gram.hermitian_eigenvalues()
            .into_iter()
            .map(|e| e.max(0.0).sqrt())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.ncols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.ncols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logdet_of_identity_is_zero() {
        let i4 = CMat::identity(4);
        assert!(i4.logdet2_pd("test").unwrap().abs() < 1e-12);
    }

    #[test]
    fn logdet_matches_diagonal() {
        let mut m = CMat::identity(3);
        m[(0, 0)] = Complex64::new(4.0, 0.0);
        m[(1, 1)] = Complex64::new(2.0, 0.0);
        let ld = m.logdet2_pd("test").unwrap();
        assert!((ld - 3.0).abs() < 1e-12, "{ld}");
    }

    #[test]
    fn jacobi_finds_known_eigenvalues() {
        // [[2, i],[-i, 2]] has eigenvalues 1 and 3.
        let mut m = CMat::identity(2);
        m[(0, 0)] = Complex64::new(2.0, 0.0);
        m[(1, 1)] = Complex64::new(2.0, 0.0);
        m[(0, 1)] = Complex64::new(0.0, 1.0);
        m[(1, 0)] = Complex64::new(0.0, -1.0);
        let evs = m.hermitian_eigenvalues();
        assert!(
            (evs[0] - 1.0).abs() < 1e-10 && (evs[1] - 3.0).abs() < 1e-10,
            "{evs:?}"
        );
    }

    #[test]
    fn gram_is_hermitian_and_psd() {
        let mut h = CMat::zeros(3, 2);
        h[(0, 0)] = Complex64::new(1.0, 2.0);
        h[(1, 0)] = Complex64::new(-0.5, 0.25);
        h[(2, 1)] = Complex64::new(0.0, -1.5);
        h[(0, 1)] = Complex64::new(2.0, 0.0);
        let mut g = CMat::zeros(3, 3);
        g.add_scaled_gram(&h, 0.7);
        assert_eq!(g.hermitian_defect(), 0.0);
        let evs = g.hermitian_eigenvalues();
        assert!(evs[0] >= -1e-12 * g.trace_re());
    }
}
