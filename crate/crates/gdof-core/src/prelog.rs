//! High-SNR prelog of log-det sums of scaled Gram matrices, plus the
//! numerical slope estimator used as the oracle for every GDOF check.
//!
//! For N x r full-rank matrices and exponents a >= b >= c >= 0, the high-SNR
//! expansion of log2 |I + rho^a H1 H1^H + rho^b H2 H2^H + rho^c H3 H3^H| has
//! slope r*a + min(r, (N-r)^+)*b + min(r, (N-2r)^+)*c in log2 rho.

use crate::channel::sample_well_conditioned;
use crate::cmat::CMat;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, Rng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrelogSpec {
    pub r: usize,
    pub n: usize,
    /// Ordered exponents, nonincreasing.
    pub exps: [f64; 3],
}

impl PrelogSpec {
    pub fn new(r: usize, n: usize, exps: [f64; 3]) -> Result<Self> {
        if r == 0 || n == 0 {
            return Err(Error::InvalidConfig("r and N must be positive".into()));
        }
        if r > n {
            return Err(Error::InvalidConfig(format!(
                "rank r={r} exceeds row count N={n}"
            )));
        }
        if !(exps[0] >= exps[1] && exps[1] >= exps[2]) {
            return Err(Error::InvalidConfig(format!(
                "exponents must be sorted nonincreasing, got {exps:?}"
            )));
        }
        if exps[2] < 0.0 || exps.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidConfig(
                "exponents must be finite and nonnegative".into(),
            ));
        }
        Ok(PrelogSpec { r, n, exps })
    }
}

/// Predicted slope in log2 rho.
pub fn predicted_prelog(spec: &PrelogSpec) -> f64 {
    let r = spec.r as f64;
    let n = spec.n;
    let free1 = spec.r.min(n.saturating_sub(spec.r)) as f64;
    let free2 = spec.r.min(n.saturating_sub(2 * spec.r)) as f64;
    r * spec.exps[0] + free1 * spec.exps[1] + free2 * spec.exps[2]
}

/// log2 |I + sum_i rho^{e_i} H_i H_i^H| for the three configured exponents.
pub fn numeric_logdet(spec: &PrelogSpec, hs: [&CMat; 3], rho: f64) -> Result<f64> {
    if rho.is_nan() || rho <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "rho must be positive, got {rho}"
        )));
    }
    let mut total = CMat::identity(spec.n);
    for (h, &e) in hs.iter().zip(spec.exps.iter()) {
        if h.nrows() != spec.n || h.ncols() != spec.r {
            return Err(Error::InvalidConfig(
                "matrix shape does not match spec".into(),
            ));
        }
        total.add_scaled_gram(h, rho.powf(e));
    }
    total.logdet2_pd("prelog sum")
}

/// Least-squares slope of `f(rho)` against log2 rho.
///
/// Needs at least two points spanning two decades or more.
pub fn estimate_slope<F>(mut f: F, rho_points: &[f64]) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if rho_points.len() < 2 {
        return Err(Error::InvalidConfig("need at least two rho points".into()));
    }
    let lo = rho_points.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = rho_points.iter().cloned().fold(0.0f64, f64::max);
    if lo.is_nan() || lo <= 0.0 || hi / lo < 100.0 * (1.0 - 1e-9) {
        return Err(Error::InvalidConfig(format!(
            "rho points must span at least two decades, got [{lo:e}, {hi:e}]"
        )));
    }
    let xs: Vec<f64> = rho_points.iter().map(|r| r.log2()).collect();
    let mut ys = Vec::with_capacity(xs.len());
    for &rho in rho_points {
        ys.push(f(rho)?);
    }
    let xbar = xs.iter().sum::<f64>() / xs.len() as f64;
    let ybar = ys.iter().sum::<f64>() / ys.len() as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        num += (x - xbar) * (y - ybar);
        den += (x - xbar) * (x - xbar);
    }
    Ok(num / den)
}

/// Draw the three N x r matrices for a spec from a seed, with the same
/// conditioning rejection as channel generation.
pub fn sample_spec_matrices(spec: &PrelogSpec, seed: u64) -> Result<[CMat; 3]> {
    let mut out = Vec::with_capacity(3);
    for i in 0..3u64 {
        let mut rng = Rng::new(derive_seed(seed, 0x9d, i));
        out.push(sample_well_conditioned(&mut rng, spec.n, spec.r)?);
    }
    Ok(out.try_into().unwrap())
}

/// Two-point/least-squares slope of the numeric log-det for a spec.
pub fn measured_prelog(spec: &PrelogSpec, seed: u64, rho_points: &[f64]) -> Result<f64> {
    let hs = sample_spec_matrices(spec, seed)?;
    estimate_slope(
        |rho| numeric_logdet(spec, [&hs[0], &hs[1], &hs[2]], rho),
        rho_points,
    )
}
