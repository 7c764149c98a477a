//! Closed-form per-user GDOF of the 3-user partially asymmetric channel.
//!
//! Three regimes, each a min over a handful of linear terms in the cross
//! exponents; some min-terms are themselves a max over branches. Faces are
//! numbered 1-12 in order of appearance across the three regimes, so a face
//! map of the exponent plane can be drawn straight from `GdofResult`.

use crate::channel::{Regime, SystemConfig};
use crate::error::{Error, Result};

/// Ties closer than this collapse to the lowest index, keeping face
/// attribution deterministic.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GdofResult {
    pub value: f64,
    pub regime: Regime,
    /// Which min-term (and max-branch within it) attains the value.
    pub active_term: String,
    /// Global face number, 1-6 weak, 7-10 mixed, 11-12 strong.
    pub face_id: u8,
    /// Set when a piecewise evaluation landed on a case boundary and fell
    /// back to the min-of-max form.
    pub boundary_fallback: bool,
}

fn mf(m: usize) -> f64 {
    m as f64
}

fn nf(n: usize) -> f64 {
    n as f64
}

/// Face expressions, indexed by the global face id.
pub fn eval_face(config: &SystemConfig, face_id: u8) -> Result<f64> {
    let (m, n) = (mf(config.m), nf(config.n));
    let (a1, a2) = (config.alpha1, config.alpha2);
    Ok(match face_id {
        1 => m + (n - 3.0 * m) * a2,
        2 => m + (n - 3.0 * m) * a1 + (3.0 * m - n) * a2,
        3 => (3.0 * m - n) * a1 + n - 2.0 * m,
        4 => m + 0.5 * (n - 3.0 * m) * a2,
        5 => 0.5 * (n - m) + 0.5 * (3.0 * m - n) * a2,
        6 => m + (n - 3.0 * m) * a2 / 3.0,
        7 => m,
        8 => (2.0 * m + m * a1 + (n - 3.0 * m) * a2) / 3.0,
        9 => (m + m * a1 + (n - 3.0 * m) * a2) / 2.0,
        10 => (m + (n - 2.0 * m) * a1 + (3.0 * m - n) * a2) / 2.0,
        11 => m,
        12 => (n - 2.0 * m + m * a1 + m * a2) / 3.0,
        _ => {
            return Err(Error::InvalidConfig(format!(
                "face id {face_id} out of range"
            )))
        }
    })
}

/// Index of the largest value; ties within [`TIE_TOL`] go to the lowest index.
fn arg_extreme(values: &[f64], want_max: bool) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        let better = if want_max {
            v > values[best] + TIE_TOL
        } else {
            v < values[best] - TIE_TOL
        };
        if better {
            best = i;
        }
    }
    best
}

fn require_regime(config: &SystemConfig, want: Regime) -> Result<()> {
    let got = config.regime()?;
    if got != want {
        return Err(Error::InvalidConfig(format!(
            "operation requires the {} regime, exponents ({}, {}) are {}",
            want, config.alpha1, config.alpha2, got
        )));
    }
    Ok(())
}

/// Min-of-max form for alpha1 < 1: three terms, the first with three
/// branches and the second with two.
pub fn gdof_weak(config: &SystemConfig) -> Result<GdofResult> {
    require_regime(config, Regime::Weak)?;
    let f: Vec<f64> = (1..=6).map(|i| eval_face(config, i).unwrap()).collect();
    let b1 = arg_extreme(&f[0..3], true);
    let b2 = arg_extreme(&f[3..5], true);
    let terms = [f[b1], f[3 + b2], f[5]];
    let t = arg_extreme(&terms, false);
    let (face_id, label) = match t {
        0 => (1 + b1 as u8, format!("T1.{}", b1 + 1)),
        1 => (4 + b2 as u8, format!("T2.{}", b2 + 1)),
        _ => (6, "T3".to_string()),
    };
    Ok(GdofResult {
        value: terms[t],
        regime: Regime::Weak,
        active_term: label,
        face_id,
        boundary_fallback: false,
    })
}

/// Piecewise form for alpha1 < 1: four interior cases with disjoint strict
/// conditions. Boundary points (no case applies) fall back to the
/// min-of-max form with `boundary_fallback` set.
pub fn gdof_piecewise_weak(config: &SystemConfig) -> Result<GdofResult> {
    require_regime(config, Regime::Weak)?;
    let (a1, a2) = (config.alpha1, config.alpha2);
    let case = if a1 + a2 < 1.0 && 2.0 * a2 < a1 {
        Some(1)
    } else if 2.0 * a1 - a2 < 1.0 && 2.0 * a2 > a1 && a2 < 0.5 {
        Some(2)
    } else if a1 + a2 > 1.0 && 2.0 * a1 - a2 > 1.0 && a2 < 0.5 {
        Some(3)
    } else if a1 + a2 > 1.0 && a2 > 0.5 {
        Some(4)
    } else {
        None
    };
    let Some(case) = case else {
        let mut r = gdof_weak(config)?;
        r.boundary_fallback = true;
        return Ok(r);
    };
    // Each case is a min over (at most two) face expressions.
    let faces: &[u8] = match case {
        1 => &[1],
        2 => &[2, 4],
        3 => &[3, 4],
        _ => &[5, 6],
    };
    let vals: Vec<f64> = faces
        .iter()
        .map(|&f| eval_face(config, f).unwrap())
        .collect();
    let k = arg_extreme(&vals, false);
    Ok(GdofResult {
        value: vals[k],
        regime: Regime::Weak,
        active_term: format!("case{}/face{}", case, faces[k]),
        face_id: faces[k],
        boundary_fallback: false,
    })
}

/// alpha2 < 1 < alpha1.
pub fn gdof_mixed(config: &SystemConfig) -> Result<GdofResult> {
    require_regime(config, Regime::Mixed)?;
    let f: Vec<f64> = (7..=10).map(|i| eval_face(config, i).unwrap()).collect();
    let b3 = arg_extreme(&f[2..4], true);
    let terms = [f[0], f[1], f[2 + b3]];
    let t = arg_extreme(&terms, false);
    let (face_id, label) = match t {
        0 => (7, "T1 (interference-free)".to_string()),
        1 => (8, "T2".to_string()),
        _ => (9 + b3 as u8, format!("T3.{}", b3 + 1)),
    };
    Ok(GdofResult {
        value: terms[t],
        regime: Regime::Mixed,
        active_term: label,
        face_id,
        boundary_fallback: false,
    })
}

/// alpha2 > 1.
pub fn gdof_strong(config: &SystemConfig) -> Result<GdofResult> {
    require_regime(config, Regime::Strong)?;
    let f11 = eval_face(config, 11).unwrap();
    let f12 = eval_face(config, 12).unwrap();
    let t = arg_extreme(&[f11, f12], false);
    Ok(GdofResult {
        value: if t == 0 { f11 } else { f12 },
        regime: Regime::Strong,
        active_term: if t == 0 {
            "T1 (interference-free)".into()
        } else {
            "T2".into()
        },
        face_id: if t == 0 { 11 } else { 12 },
        boundary_fallback: false,
    })
}

/// Regime dispatcher. Boundary exponents (alpha = 1) are rejected with a
/// distinct error.
pub fn gdof(config: &SystemConfig) -> Result<GdofResult> {
    match config.regime()? {
        Regime::Weak => gdof_weak(config),
        Regime::Mixed => gdof_mixed(config),
        Regime::Strong => gdof_strong(config),
    }
}
