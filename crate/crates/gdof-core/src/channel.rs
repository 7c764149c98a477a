//! 3-user partially asymmetric M x N MIMO interference channel.
//!
//! Receiver i hears its own transmitter at power scale rho, the next user
//! (cyclically) at rho^alpha2 and the previous one at rho^alpha1, through
//! independent full-rank N x M complex Gaussian matrices. All rates are in
//! bits (log base 2) and rho^e multiplies covariance (power convention).

use crate::cmat::CMat;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, Rng};
use num_complex::Complex64;

/// Condition-number ceiling that operationalizes "full rank".
pub const COND_LIMIT: f64 = 1e6;
/// Resampling budget per channel matrix.
pub const MAX_RESAMPLE: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Weak,
    Mixed,
    Strong,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Weak => "WEAK",
            Regime::Mixed => "MIXED",
            Regime::Strong => "STRONG",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Antenna counts and cross-link exponents; the coordinate of every
/// computation in this crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub m: usize,
    pub n: usize,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl SystemConfig {
    pub fn new(m: usize, n: usize, alpha1: f64, alpha2: f64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidConfig(
                "antenna counts must be positive".into(),
            ));
        }
        if !(2 * m <= n && n < 3 * m) {
            return Err(Error::InvalidConfig(format!(
                "antenna counts must satisfy 2M <= N < 3M, got M={m}, N={n}"
            )));
        }
        if !alpha1.is_finite() || !alpha2.is_finite() {
            return Err(Error::InvalidConfig("exponents must be finite".into()));
        }
        if !(alpha1 > alpha2 && alpha2 > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "exponents must satisfy alpha1 > alpha2 > 0, got alpha1={alpha1}, alpha2={alpha2}"
            )));
        }
        Ok(SystemConfig {
            m,
            n,
            alpha1,
            alpha2,
        })
    }

    /// Interference regime; exponents exactly on a boundary are rejected
    /// rather than assigned to a side.
    pub fn regime(&self) -> Result<Regime> {
        if self.alpha1 == 1.0 {
            return Err(Error::RegimeBoundary("alpha1 = 1 is excluded".into()));
        }
        if self.alpha2 == 1.0 {
            return Err(Error::RegimeBoundary("alpha2 = 1 is excluded".into()));
        }
        Ok(if self.alpha1 < 1.0 {
            Regime::Weak
        } else if self.alpha2 < 1.0 {
            Regime::Mixed
        } else {
            Regime::Strong
        })
    }

    /// Power exponent of the link from transmitter `tx` to receiver `rx`
    /// (user indices 1..=3). Direct links carry exponent 1; the cyclic
    /// successor of a receiver interferes at alpha2, the predecessor at
    /// alpha1.
    pub fn link_exponent(&self, tx: usize, rx: usize) -> f64 {
        assert!((1..=3).contains(&tx) && (1..=3).contains(&rx));
        match (3 + tx - rx) % 3 {
            0 => 1.0,
            1 => self.alpha2,
            _ => self.alpha1,
        }
    }

    /// Weak interferer (arrives at alpha2) seen by receiver `rx`.
    pub fn weak_interferer(&self, rx: usize) -> usize {
        rx % 3 + 1
    }

    /// Strong interferer (arrives at alpha1) seen by receiver `rx`.
    pub fn strong_interferer(&self, rx: usize) -> usize {
        (rx + 1) % 3 + 1
    }
}

/// Nine N x M channel matrices plus the seed that generated them.
/// Regeneration from `(config, seed)` is bit-identical.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelInstance {
    pub config: SystemConfig,
    pub seed: u64,
    h: Vec<CMat>,
}

impl ChannelInstance {
    /// Channel matrix from transmitter `tx` to receiver `rx` (1-based).
    pub fn h(&self, tx: usize, rx: usize) -> &CMat {
        assert!((1..=3).contains(&tx) && (1..=3).contains(&rx));
        &self.h[(tx - 1) * 3 + (rx - 1)]
    }
}

/// Sample an n x m matrix with i.i.d. unit-variance circularly symmetric
/// complex Gaussian entries.
pub fn sample_gaussian_matrix(rng: &mut Rng, n: usize, m: usize) -> CMat {
    let mut h = CMat::zeros(n, m);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in 0..m {
            let (re, im) = rng.next_gaussian_pair();
            h[(i, j)] = Complex64::new(re * scale, im * scale);
        }
    }
    h
}

/// Sample until the condition number (ratio of extreme singular values)
/// drops below [`COND_LIMIT`]; gives up after [`MAX_RESAMPLE`] attempts.
pub fn sample_well_conditioned(rng: &mut Rng, n: usize, m: usize) -> Result<CMat> {
    for _ in 0..MAX_RESAMPLE {
        let h = sample_gaussian_matrix(rng, n, m);
        let sv = h.singular_values();
        let smin = sv[0];
        let smax = sv[sv.len() - 1];
        if smin > 0.0 && smax / smin < COND_LIMIT {
            return Ok(h);
        }
    }
    Err(Error::Degenerate(format!(
        "no well-conditioned {n}x{m} matrix within {MAX_RESAMPLE} draws"
    )))
}

/// Draw the nine channel matrices. Each (tx, rx) pair gets its own derived
/// substream, so the set is invariant to generation order.
pub fn generate_channel(config: SystemConfig, seed: u64) -> Result<ChannelInstance> {
    let mut h = Vec::with_capacity(9);
    for tx in 1..=3u64 {
        for rx in 1..=3u64 {
            let mut rng = Rng::new(derive_seed(seed, tx, rx));
            h.push(sample_well_conditioned(&mut rng, config.n, config.m)?);
        }
    }
    Ok(ChannelInstance { config, seed, h })
}

/// Covariance at receiver `rx` of the listed transmit layers.
///
/// Each `(tx, power)` layer of linear transmit power `power` arrives with
/// covariance `power * rho^e(tx->rx) * H H^H`. The identity noise term is
/// not included; the caller adds it.
pub fn received_covariance(
    channel: &ChannelInstance,
    rx: usize,
    layers: &[(usize, f64)],
    rho: f64,
) -> Result<CMat> {
    if !(1..=3).contains(&rx) {
        return Err(Error::InvalidConfig(format!(
            "receiver index {rx} out of range"
        )));
    }
    if rho.is_nan() || rho <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "rho must be positive, got {rho}"
        )));
    }
    let mut cov = CMat::zeros(channel.config.n, channel.config.n);
    for &(tx, power) in layers {
        if !(1..=3).contains(&tx) {
            return Err(Error::InvalidConfig(format!(
                "transmitter index {tx} out of range"
            )));
        }
        if power < 0.0 || !power.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "negative layer power {power}"
            )));
        }
        let e = channel.config.link_exponent(tx, rx);
        cov.add_scaled_gram(channel.h(tx, rx), power * rho.powf(e));
    }
    Ok(cov)
}

/// log2 |I + noise^{-1} signal| in bits.
///
/// `noise` must include the identity term and be positive definite. The
/// value is computed as a difference of two Cholesky log-determinants,
/// which is the whitened determinant without forming an explicit inverse.
pub fn logdet_rate(signal: &CMat, noise: &CMat) -> Result<f64> {
    if !signal.is_square() || !noise.is_square() || signal.nrows() != noise.nrows() {
        return Err(Error::InvalidConfig(
            "signal/noise dimension mismatch".into(),
        ));
    }
    if signal.hermitian_defect() > 1e-8 {
        return Err(Error::Numerical("signal not Hermitian".into()));
    }
    for i in 0..signal.nrows() {
        if signal[(i, i)].re < -1e-9 * signal.trace_re().abs().max(1.0) {
            return Err(Error::Numerical("signal has a negative diagonal".into()));
        }
    }
    let ld_noise = noise.logdet2_pd("noise")?;
    let mut total = noise.clone();
    total.add_assign(signal);
    let ld_total = total.logdet2_pd("noise+signal")?;
    Ok((ld_total - ld_noise).max(0.0))
}

/// log2 |I + noise^{-1} A A^H| for a signal given by its factor A (N x k).
///
/// Whitens by the Cholesky factor of the noise, then takes the determinant
/// through the k x k Gram of the whitened factor with columns ordered by
/// descending norm (a column permutation, so the value is unchanged).
/// This keeps every Cholesky pivot's rounding proportional to its own
/// diagonal, so rank collapses land on the weakest column and the value
/// survives dynamic ranges the N x N covariance route cannot.
pub fn logdet_rate_factor(a: &CMat, noise: &CMat) -> Result<f64> {
    if a.nrows() != noise.nrows() || !noise.is_square() {
        return Err(Error::InvalidConfig(
            "factor/noise dimension mismatch".into(),
        ));
    }
    if a.ncols() == 0 {
        return Ok(0.0);
    }
    let l = noise.cholesky_factor("noise")?;
    let w = l.forward_solve(a);
    let mut order: Vec<usize> = (0..w.ncols()).collect();
    let norm2 = |c: usize| (0..w.nrows()).map(|r| w[(r, c)].norm_sqr()).sum::<f64>();
    order.sort_by(|&x, &y| norm2(y).partial_cmp(&norm2(x)).unwrap());
    let mut g = CMat::identity(w.ncols());
    for (i, &ci) in order.iter().enumerate() {
        for (j, &cj) in order.iter().enumerate().skip(i) {
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for r in 0..w.nrows() {
                acc += w[(r, ci)].conj() * w[(r, cj)];
            }
            g[(i, j)] += acc;
            if j != i {
                g[(j, i)] += acc.conj();
            }
        }
    }
    Ok(g.logdet2_pd("whitened signal gram")?.max(0.0))
}
