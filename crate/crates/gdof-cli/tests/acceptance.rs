//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them).
//!
//! Slope criteria are evaluated at the median over a small fixed set of
//! channel seeds: the asymptotic statements hold for generic channels, and
//! the median estimates the generic value without being hostage to one
//! unlucky draw.

use gdof_core::achievable::achievable_sym_rate;
use gdof_core::closed_form::{gdof, gdof_piecewise_weak, gdof_strong, gdof_weak};
use gdof_core::det::{
    brute_force_mi, build_shift_channel, check_assumptions, det_sym_capacity, uniform_mi,
    uniform_pmf, weak_error_bounds, VarId,
};
use gdof_core::outer::{evaluate_recipe, min_outer_proxy, recipe_catalog};
use gdof_core::prelog::{estimate_slope, measured_prelog, predicted_prelog, PrelogSpec};
use gdof_core::rng::Rng;
use gdof_core::{generate_channel, SystemConfig};
use std::time::{Duration, Instant};

const SEEDS: [u64; 5] = [0, 1, 2, 3, 4];
const SAMPLE_POINTS: [(f64, f64, f64); 6] = [
    (0.5, 0.2, 0.8),
    (0.6, 0.45, 0.775),
    (0.9, 0.7, 0.76667),
    (1.2, 0.8, 0.8),
    (1.5, 0.5, 1.0),
    (1.4, 1.1, 0.83333),
];

fn report(id: u32, name: &str, ok: bool, detail: &str) {
    println!(
        "criterion {id} ({name}): {} — {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v[v.len() / 2]
}

fn within_runtime(start: Instant, limit: Duration) -> bool {
    start.elapsed() <= limit
}

#[test]
fn criterion_1_lemma_agreement() {
    let start = Instant::now();
    let mut rng = Rng::new(0x1e44a);
    let mut worst: f64 = 0.0;
    for draw in 0..20u64 {
        let n = 2 + (rng.next_u64() % 7) as usize; // 2..=8
        let r = 1 + (rng.next_u64() % 3.min(n as u64)) as usize;
        let mut exps = [
            rng.next_f64() * 1.5,
            rng.next_f64() * 1.5,
            rng.next_f64() * 1.5,
        ];
        exps.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let spec = PrelogSpec::new(r, n, exps).unwrap();
        let predicted = predicted_prelog(&spec);
        let measured = median(
            SEEDS
                .iter()
                .map(|&s| measured_prelog(&spec, 100 * (1 + draw) + s, &[1e8, 1e10]).unwrap())
                .collect(),
        );
        worst = worst.max((predicted - measured).abs());
    }
    let ok = worst <= 0.05 && within_runtime(start, Duration::from_secs(10));
    report(
        1,
        "high-SNR log-det slope agreement",
        ok,
        &format!(
            "max |median measured - predicted| = {worst:.4} over 20 draws, {:?}",
            start.elapsed()
        ),
    );
}

#[test]
fn criterion_2_formula_equivalence() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut checked = 0u32;
    let mut findings: Vec<(f64, f64)> = Vec::new();
    for i in 1..100 {
        for j in 1..i {
            let a1 = i as f64 * 0.01;
            let a2 = j as f64 * 0.01;
            let cfg = SystemConfig::new(1, 2, a1, a2).unwrap();
            let p = gdof_piecewise_weak(&cfg).unwrap();
            if p.boundary_fallback {
                // Distinguish genuine case boundaries from uncovered
                // interior points; the latter get reported, not patched.
                let on_boundary = (a1 + a2 - 1.0).abs() < 1e-9
                    || (2.0 * a2 - a1).abs() < 1e-9
                    || (2.0 * a1 - a2 - 1.0).abs() < 1e-9
                    || (a2 - 0.5).abs() < 1e-9;
                if !on_boundary {
                    findings.push((a1, a2));
                }
                continue;
            }
            let w = gdof_weak(&cfg).unwrap();
            worst = worst.max((p.value - w.value).abs());
            checked += 1;
        }
    }
    for &(a1, a2) in &findings {
        println!("  finding: interior point ({a1}, {a2}) matched by no piecewise case");
    }
    let ok = worst <= 1e-12 && checked > 4000 && within_runtime(start, Duration::from_secs(5));
    report(
        2,
        "min-of-max equals piecewise form",
        ok,
        &format!(
            "max |diff| = {worst:.2e} over {checked} interior points, {} uncovered, {:?}",
            findings.len(),
            start.elapsed()
        ),
    );
}

#[test]
fn criterion_3_symmetric_recovery() {
    let mut worst: f64 = 0.0;
    for alpha in [1.1, 1.5, 2.0, 2.5] {
        for (m, n) in [(1usize, 2usize), (2, 4), (2, 5)] {
            let cfg = SystemConfig::new(m, n, alpha, alpha - 1e-9).unwrap();
            let got = gdof_strong(&cfg).unwrap().value;
            let want = (m as f64).min((n as f64 - 2.0 * m as f64 + 2.0 * m as f64 * alpha) / 3.0);
            worst = worst.max((got - want).abs());
        }
    }
    report(
        3,
        "symmetric-exponent limit recovery",
        worst <= 1e-6,
        &format!("max |gdof_strong(a, a-1e-9) - min(M, (N-2M+2Ma)/3)| = {worst:.2e}"),
    );
}

#[test]
fn criterion_4_achievability_tightness() {
    let start = Instant::now();
    let mut detail = String::new();
    let mut ok = true;
    for (a1, a2, target) in SAMPLE_POINTS {
        let cfg = SystemConfig::new(1, 2, a1, a2).unwrap();
        let closed = gdof(&cfg).unwrap().value;
        ok &= (closed - target).abs() <= 1e-5;
        let slopes: Vec<f64> = SEEDS
            .iter()
            .map(|&seed| {
                let ch = generate_channel(cfg, seed).unwrap();
                estimate_slope(|rho| achievable_sym_rate(&ch, rho), &[1e6, 1e9]).unwrap()
            })
            .collect();
        let med = median(slopes);
        let dev = (med - closed).abs();
        ok &= dev <= 0.03;
        detail.push_str(&format!("({a1},{a2}): {dev:.4} "));
    }
    ok &= within_runtime(start, Duration::from_secs(30));
    report(
        4,
        "layered-scheme slope matches closed form",
        ok,
        &format!(
            "median |slope - gdof| per point: {detail}{:?}",
            start.elapsed()
        ),
    );
}

#[test]
fn criterion_5_converse_tightness() {
    let start = Instant::now();
    let mut detail = String::new();
    let mut ok = true;
    for (a1, a2, _) in SAMPLE_POINTS {
        let cfg = SystemConfig::new(1, 2, a1, a2).unwrap();
        let closed = gdof(&cfg).unwrap().value;
        let catalog = recipe_catalog(&cfg).unwrap();
        let mut min_slopes = Vec::new();
        let mut m2o_unique = true;
        for &seed in &SEEDS {
            let ch = generate_channel(cfg, seed).unwrap();
            let slopes: Vec<(f64, bool)> = catalog
                .iter()
                .map(|r| {
                    let s =
                        estimate_slope(|rho| evaluate_recipe(&ch, rho, r), &[1e8, 1e10]).unwrap();
                    (s, r.is_many_to_one())
                })
                .collect();
            let (min_s, min_is_m2o) = slopes
                .iter()
                .cloned()
                .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
                .unwrap();
            // Unique: every non-many-to-one recipe sits a margin above.
            let unique = min_is_m2o
                && slopes
                    .iter()
                    .filter(|(_, m)| !*m)
                    .all(|(s, _)| *s > min_s + 0.01);
            m2o_unique &= unique;
            min_slopes.push(min_s / 3.0);
        }
        let med = median(min_slopes);
        let dev = (med - closed).abs();
        ok &= dev <= 0.03;
        if (a1, a2) == (0.9, 0.7) {
            ok &= m2o_unique;
            detail.push_str(&format!("({a1},{a2}): {dev:.4} m2o-unique={m2o_unique} "));
        } else {
            detail.push_str(&format!("({a1},{a2}): {dev:.4} "));
        }
    }
    report(
        5,
        "outer-bound slope matches closed form",
        ok,
        &format!(
            "median |min-recipe-slope/3 - gdof| per point: {detail}{:?}",
            start.elapsed()
        ),
    );
}

#[test]
fn criterion_6_constant_gap() {
    let start = Instant::now();
    let mut detail = String::new();
    let mut ok = true;
    let span = 1e8f64.log2() - 1e4f64.log2();
    for (a1, a2, _) in SAMPLE_POINTS {
        let cfg = SystemConfig::new(1, 2, a1, a2).unwrap();
        let gap_slopes: Vec<f64> = SEEDS
            .iter()
            .map(|&seed| {
                let ch = generate_channel(cfg, seed).unwrap();
                let gap_at = |rho: f64| {
                    let ach = achievable_sym_rate(&ch, rho).unwrap();
                    let (outer, _) = min_outer_proxy(&ch, rho).unwrap();
                    outer / 3.0 - ach
                };
                (gap_at(1e8) - gap_at(1e4)).abs() / span
            })
            .collect();
        let med = median(gap_slopes);
        ok &= med < 0.05;
        detail.push_str(&format!("({a1},{a2}): {med:.4} "));
    }
    report(
        6,
        "achievable-to-outer gap has bounded slope",
        ok,
        &format!(
            "median |gap slope| per point: {detail}{:?}",
            start.elapsed()
        ),
    );
}

#[test]
fn criterion_7_orthogonal_floor() {
    // Full grid: the closed form never drops below the orthogonal 2/3.
    let step = 0.05;
    let floor = 2.0 / 3.0;
    let mut rows = 0u32;
    let mut grid_min = f64::INFINITY;
    for i in 1..=40 {
        for j in 1..i {
            let a1 = i as f64 * step;
            let a2 = j as f64 * step;
            if (a1 - 1.0).abs() < 1e-12 || (a2 - 1.0).abs() < 1e-12 {
                continue;
            }
            let cfg = SystemConfig::new(1, 2, a1, a2).unwrap();
            let v = gdof(&cfg).unwrap().value;
            grid_min = grid_min.min(v);
            rows += 1;
            assert!(v >= floor - 1e-9, "({a1},{a2}) -> {v}");
        }
    }
    // Local refinement near the two intersection points where the floor is
    // approached: (2/3, 1/3) and (1, 1).
    let mut approach = Vec::new();
    for (c1, c2) in [(2.0 / 3.0, 1.0 / 3.0), (1.0, 1.0)] {
        let mut local_min = f64::INFINITY;
        let mut arg = (0.0, 0.0);
        for i in -40i32..=40 {
            for j in -40i32..=40 {
                let a1 = c1 + i as f64 * 1e-3;
                let a2 = c2 + j as f64 * 1e-3;
                let Ok(cfg) = SystemConfig::new(1, 2, a1, a2) else {
                    continue;
                };
                let Ok(r) = gdof(&cfg) else { continue };
                if r.value < local_min {
                    local_min = r.value;
                    arg = (a1, a2);
                }
            }
        }
        approach.push((c1, c2, local_min, arg));
    }
    let ok = rows == 741
        && grid_min >= floor - 1e-9
        && approach.iter().all(|&(_, _, v, _)| v <= floor + 0.01);
    let detail = format!(
        "grid rows {rows}, min {grid_min:.4}; refined minima {:?}",
        approach
            .iter()
            .map(|&(c1, c2, v, arg)| format!("near ({c1:.3},{c2:.3}): {v:.4} at {arg:?}"))
            .collect::<Vec<_>>()
    );
    report(7, "orthogonal 2/3 floor over the plane", ok, &detail);
}

#[test]
fn criterion_8_deterministic_oracle() {
    let start = Instant::now();
    let mut ok = true;
    let mut detail = String::new();

    let weak = build_shift_channel(&SystemConfig::new(1, 2, 0.5, 0.2).unwrap(), 10, 0).unwrap();
    ok &= check_assumptions(&weak).all_pass();
    let cap = det_sym_capacity(&weak).unwrap();
    ok &= (cap.value - 8.0).abs() <= 1.0;
    detail.push_str(&format!("weak C={} (target 8.0) ", cap.value));

    let strong = build_shift_channel(&SystemConfig::new(1, 2, 1.4, 1.1).unwrap(), 10, 0).unwrap();
    ok &= check_assumptions(&strong).all_pass();
    let cap = det_sym_capacity(&strong).unwrap();
    ok &= (cap.value - 8.333).abs() <= 1.0;
    detail.push_str(&format!("strong C={:.3} (target 8.333) ", cap.value));

    // Rank evaluator against exhaustive enumeration at a small size.
    let small = build_shift_channel(&SystemConfig::new(1, 2, 0.5, 0.25).unwrap(), 4, 5).unwrap();
    let pmfs = [uniform_pmf(4), uniform_pmf(4), uniform_pmf(4)];
    let y = [VarId::Y(1)];
    let mut worst: f64 = 0.0;
    for term in weak_error_bounds() {
        let exact = uniform_mi(&small, &term.targets, &y, &term.given);
        let brute = brute_force_mi(&small, &pmfs, &term.targets, &y, &term.given).unwrap();
        worst = worst.max((exact - brute).abs());
    }
    ok &= worst <= 1e-9;
    detail.push_str(&format!("rank-vs-enumeration max diff {worst:.2e} "));

    ok &= within_runtime(start, Duration::from_secs(60));
    report(
        8,
        "deterministic-model oracle",
        ok,
        &format!("{detail}{:?}", start.elapsed()),
    );
}

#[test]
fn criterion_9_reproducibility() {
    let bin = env!("CARGO_BIN_EXE_gdof");
    let dir = std::env::temp_dir();
    let mut ok = true;
    let mut detail = String::new();
    for (tag, args) in [
        (
            "sweep",
            vec![
                "sweep",
                "--m",
                "1",
                "--n",
                "2",
                "--step",
                "0.1",
                "--max",
                "2.0",
                "--seed",
                "7",
                "--reproducible",
            ],
        ),
        (
            "sweep-verify",
            vec![
                "sweep",
                "--m",
                "1",
                "--n",
                "2",
                "--step",
                "0.4",
                "--max",
                "2.0",
                "--seed",
                "7",
                "--verify",
                "--reproducible",
            ],
        ),
    ] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let path = dir.join(format!("gdof-acceptance-{tag}-{run}.csv"));
            let status = std::process::Command::new(bin)
                .args(&args)
                .arg("--out")
                .arg(&path)
                .status()
                .expect("run CLI");
            assert!(status.success());
            outputs.push(std::fs::read(&path).expect("read CSV"));
            let _ = std::fs::remove_file(&path);
        }
        let same = outputs[0] == outputs[1];
        ok &= same;
        detail.push_str(&format!(
            "{tag}: {} bytes, identical={same} ",
            outputs[0].len()
        ));
    }
    report(9, "byte-identical reproducible CSV", ok, &detail);
}
