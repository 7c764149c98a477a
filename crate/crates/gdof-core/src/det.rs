//! Finite-alphabet deterministic interference channel over GF(2).
//!
//! Each user transmits a message of `msg_levels` rows of M bits; a link of
//! exponent e shows the top floor(e*L) rows of that message, so the weaker
//! image of each transmitter is a prefix (degraded version) of the stronger
//! one. At a receiver, the rows arriving at the same height collide: they
//! are mixed by a random N x (arrivals) GF(2) block, one block per height,
//! the same blocks at every receiver. Heights where 3M bits meet N < 3M
//! output bits lose dimensions exactly as the Gaussian channel does at high
//! SNR, which is what makes the model's symmetric capacity track L times
//! the GDOF.
//!
//! With uniform inputs every entropy is a GF(2) rank, so capacities and
//! structural assumptions evaluate exactly; a joint-pmf enumerator
//! cross-checks the rank evaluator on small instances and exposes
//! non-uniform inputs.

use crate::channel::{Regime, SystemConfig};
use crate::error::{Error, Result};
use crate::gf2::Gf2Matrix;
use crate::rng::{derive_seed, Rng};
use std::collections::HashMap;

const MAX_BLOCK_RESAMPLE: usize = 100;
/// Joint input state-space cap for exhaustive enumeration.
pub const BRUTE_FORCE_BIT_CAP: usize = 24;

/// Signal roles at a receiver, ordered by the fixed column layout of the
/// per-height mixing blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Own = 0,
    WeakInt = 1,
    StrongInt = 2,
}

const ROLES: [Role; 3] = [Role::Own, Role::WeakInt, Role::StrongInt];

/// A linear image available somewhere in the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarId {
    /// Full message of a user.
    X(usize),
    /// Image of transmitter `tx` as seen at receiver `rx`.
    V { tx: usize, rx: usize },
    /// Output of receiver `rx`.
    Y(usize),
}

#[derive(Debug, Clone)]
struct HeightBlock {
    present: [bool; 3],
    /// N x (present roles * M), column groups in `ROLES` order.
    mat: Gf2Matrix,
}

/// Deterministic channel instance: truncation depths plus the per-height
/// mixing blocks and the assembled receiver maps.
#[derive(Debug, Clone)]
pub struct DetChannel {
    pub config: SystemConfig,
    pub levels: usize,
    pub seed: u64,
    pub regime: Regime,
    /// Rows per user message: the deepest image any link shows.
    pub msg_levels: usize,
    /// Visible rows by role: [direct link, weak cross, strong cross].
    pub visible_levels: [usize; 3],
    blocks: Vec<HeightBlock>,
    y_maps: Vec<Gf2Matrix>,
}

fn floor_levels(e: f64, l: usize) -> usize {
    (e * l as f64 + 1e-9).floor() as usize
}

impl DetChannel {
    pub fn msg_bits(&self) -> usize {
        self.msg_levels * self.config.m
    }

    pub fn heights(&self) -> usize {
        self.msg_levels
    }

    /// Visible rows of the image `tx -> rx`.
    fn image_levels(&self, tx: usize, rx: usize) -> usize {
        let e = self.config.link_exponent(tx, rx);
        floor_levels(e, self.levels).min(self.msg_levels)
    }

    /// Bit width of a variable.
    pub fn var_bits(&self, var: VarId) -> usize {
        match var {
            VarId::X(_) => self.msg_bits(),
            VarId::V { tx, rx } => self.image_levels(tx, rx) * self.config.m,
            VarId::Y(_) => self.config.n * self.heights(),
        }
    }

    /// Linear map of a variable over the 3 * msg_bits global input bits.
    pub fn var_map(&self, var: VarId) -> Gf2Matrix {
        let mb = self.msg_bits();
        let total = 3 * mb;
        match var {
            VarId::X(u) => {
                assert!((1..=3).contains(&u));
                let mut m = Gf2Matrix::zeros(mb, total);
                for r in 0..mb {
                    m.set(r, (u - 1) * mb + r, true);
                }
                m
            }
            VarId::V { tx, rx } => {
                assert!((1..=3).contains(&tx) && (1..=3).contains(&rx));
                let rows = self.image_levels(tx, rx) * self.config.m;
                let mut m = Gf2Matrix::zeros(rows, total);
                for r in 0..rows {
                    m.set(r, (tx - 1) * mb + r, true);
                }
                m
            }
            VarId::Y(rx) => self.y_maps[rx - 1].clone(),
        }
    }

    fn stack(&self, vars: &[VarId]) -> Gf2Matrix {
        if vars.is_empty() {
            return Gf2Matrix::zeros(0, 3 * self.msg_bits());
        }
        let maps: Vec<Gf2Matrix> = vars.iter().map(|&v| self.var_map(v)).collect();
        Gf2Matrix::vstack(&maps.iter().collect::<Vec<_>>())
    }
}

fn role_user(rx: usize, role: Role) -> usize {
    match role {
        Role::Own => rx,
        Role::WeakInt => rx % 3 + 1,
        Role::StrongInt => (rx + 1) % 3 + 1,
    }
}

/// Check that every nonempty subset of role column groups in a block has
/// full generic rank min(cols, N).
fn block_in_general_position(mat: &Gf2Matrix, present: &[bool; 3], m: usize, n: usize) -> bool {
    let mut offsets = [usize::MAX; 3];
    let mut off = 0;
    for r in 0..3 {
        if present[r] {
            offsets[r] = off;
            off += m;
        }
    }
    for mask in 1u8..8 {
        let mut cols = Vec::new();
        let mut ok = true;
        for r in 0..3 {
            if mask >> r & 1 == 1 {
                if !present[r] {
                    ok = false;
                    break;
                }
                cols.extend((0..m).map(|j| offsets[r] + j));
            }
        }
        if !ok {
            continue;
        }
        let sub = mat.select_columns(&cols);
        if sub.rank() != cols.len().min(n) {
            return false;
        }
    }
    true
}

fn assemble_y_maps(
    config: &SystemConfig,
    msg_levels: usize,
    visible: &[usize; 3],
    blocks: &[HeightBlock],
) -> Vec<Gf2Matrix> {
    let (m, n) = (config.m, config.n);
    let mb = msg_levels * m;
    let heights = msg_levels;
    let mut maps = Vec::with_capacity(3);
    for rx in 1..=3 {
        let mut y = Gf2Matrix::zeros(n * heights, 3 * mb);
        for (hi, block) in blocks.iter().enumerate() {
            let h = hi + 1;
            let row0 = hi * n;
            let mut col_group = 0;
            for role in ROLES {
                if !block.present[role as usize] {
                    continue;
                }
                let user = role_user(rx, role);
                let lev = visible[role as usize];
                // Source row arriving at height h (1-based from the top).
                let src_row = lev - h;
                for out in 0..n {
                    for j in 0..m {
                        if block.mat.get(out, col_group * m + j) {
                            y.set(row0 + out, (user - 1) * mb + src_row * m + j, true);
                        }
                    }
                }
                col_group += 1;
            }
        }
        maps.push(y);
    }
    maps
}

/// Build a random shift-channel instance: truncation images by link
/// exponent, per-height uniform mixing blocks resampled until every block
/// is in general position, and the interference-resolvability rank
/// condition verified at each receiver.
pub fn build_shift_channel(config: &SystemConfig, levels: usize, seed: u64) -> Result<DetChannel> {
    let regime = config.regime()?;
    if levels < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 levels, got {levels}"
        )));
    }
    for (name, e) in [("alpha1", config.alpha1), ("alpha2", config.alpha2)] {
        if floor_levels(e, levels) < 1 {
            return Err(Error::InvalidConfig(format!(
                "floor({name} * L) = 0: no bits survive the {name} link at L = {levels}"
            )));
        }
    }
    let (m, n) = (config.m, config.n);
    let msg_levels = levels.max(floor_levels(config.alpha1, levels));
    let visible = [
        levels.min(msg_levels),
        floor_levels(config.alpha2, levels).min(msg_levels),
        floor_levels(config.alpha1, levels).min(msg_levels),
    ];

    let mut blocks = Vec::with_capacity(msg_levels);
    for h in 1..=msg_levels {
        let present = [visible[0] >= h, visible[1] >= h, visible[2] >= h];
        let cols = present.iter().filter(|&&p| p).count() * m;
        let mut rng = Rng::new(derive_seed(seed, 0xb10c, h as u64));
        let mut accepted = None;
        for _ in 0..MAX_BLOCK_RESAMPLE {
            let mut mat = Gf2Matrix::zeros(n, cols);
            for r in 0..n {
                for c in 0..cols {
                    mat.set(r, c, rng.next_bit());
                }
            }
            if block_in_general_position(&mat, &present, m, n) {
                accepted = Some(mat);
                break;
            }
        }
        let Some(mat) = accepted else {
            return Err(Error::Degenerate(format!(
                "no general-position mixing block at height {h} within {MAX_BLOCK_RESAMPLE} draws"
            )));
        };
        blocks.push(HeightBlock { present, mat });
    }

    let y_maps = assemble_y_maps(config, msg_levels, &visible, &blocks);
    let model = DetChannel {
        config: *config,
        levels,
        seed,
        regime,
        msg_levels,
        visible_levels: visible,
        blocks,
        y_maps,
    };
    for rx in 1..=3 {
        let (rank, want) = model.interference_rank(rx);
        if rank != want {
            return Err(Error::Degenerate(format!(
                "interference not resolvable at receiver {rx}: rank {rank} < {want}"
            )));
        }
    }
    Ok(model)
}

impl DetChannel {
    /// Rank of the map from both interference images into Y_rx, against the
    /// total interference bits visible there.
    fn interference_rank(&self, rx: usize) -> (usize, usize) {
        let m = self.config.m;
        let mb = self.msg_bits();
        let weak = self.config.weak_interferer(rx);
        let strong = self.config.strong_interferer(rx);
        let mut cols = Vec::new();
        for &(u, lev) in &[
            (weak, self.image_levels(weak, rx)),
            (strong, self.image_levels(strong, rx)),
        ] {
            cols.extend((0..lev * m).map(|b| (u - 1) * mb + b));
        }
        let want = cols.len();
        (self.y_maps[rx - 1].select_columns(&cols).rank(), want)
    }
}

/// Exact entropy in bits of a collection of linear images under uniform
/// independent inputs: the GF(2) rank of the stacked map.
pub fn uniform_entropy(model: &DetChannel, vars: &[VarId]) -> f64 {
    model.stack(vars).rank() as f64
}

/// I(A; B | C) for uniform inputs, by rank differences.
pub fn uniform_mi(model: &DetChannel, a: &[VarId], b: &[VarId], c: &[VarId]) -> f64 {
    let mut ac = a.to_vec();
    ac.extend_from_slice(c);
    let mut bc = b.to_vec();
    bc.extend_from_slice(c);
    let mut abc = a.to_vec();
    abc.extend_from_slice(b);
    abc.extend_from_slice(c);
    uniform_entropy(model, &ac) + uniform_entropy(model, &bc)
        - uniform_entropy(model, &abc)
        - uniform_entropy(model, c)
}

#[derive(Debug, Clone)]
pub struct AssumptionCheck {
    pub label: String,
    pub rx: usize,
    pub got: f64,
    pub want: f64,
}

impl AssumptionCheck {
    pub fn pass(&self) -> bool {
        self.got == self.want
    }
}

#[derive(Debug, Clone, Default)]
pub struct AssumptionReport {
    pub checks: Vec<AssumptionCheck>,
}

impl AssumptionReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass())
    }
}

/// Verify the model's structural assumptions as exact rank identities:
/// interference resolvability given the intended message, and the
/// side-information invariance of single-image rates.
pub fn check_assumptions(model: &DetChannel) -> AssumptionReport {
    let mut report = AssumptionReport::default();
    let mf = model.config.m as f64;
    let mut push = |label: &str, rx: usize, got: f64, want: f64| {
        report.checks.push(AssumptionCheck {
            label: label.into(),
            rx,
            got,
            want,
        });
    };

    for rx in 1..=3usize {
        let own = VarId::X(rx);
        let w = model.config.weak_interferer(rx);
        let s = model.config.strong_interferer(rx);
        let vw = VarId::V { tx: w, rx };
        let vs = VarId::V { tx: s, rx };
        let lw = model.image_levels(w, rx) as f64 * mf;
        let ls = model.image_levels(s, rx) as f64 * mf;
        let y = VarId::Y(rx);

        // H(Y|X_own) = H(weak image) + H(strong image).
        let hy_given_own = uniform_entropy(model, &[y, own]) - uniform_entropy(model, &[own]);
        push("interference-resolvable", rx, hy_given_own, lw + ls);

        match model.regime {
            Regime::Weak => {
                // Own strong image rate unchanged by gifting one interferer
                // once the other is already gifted.
                let v_own_s = VarId::V {
                    tx: rx,
                    rx: rx % 3 + 1,
                }; // own image on the alpha1 link
                let v_own_w = VarId::V {
                    tx: rx,
                    rx: (rx + 1) % 3 + 1,
                }; // own image on the alpha2 link
                let other_w = VarId::V {
                    tx: s,
                    rx: rx % 3 + 1,
                }; // strong interferer's weak image
                push(
                    "own-image-rate-invariance",
                    rx,
                    uniform_mi(model, &[v_own_s], &[y], &[vw, vs, other_w]),
                    ls,
                );
                push(
                    "own-image-rate-invariance-conditioned",
                    rx,
                    uniform_mi(model, &[v_own_s], &[y], &[v_own_w, vw, vs, other_w]),
                    ls - lw,
                );
                push(
                    "cross-image-rate-invariance-weak",
                    rx,
                    uniform_mi(model, &[vw], &[y], &[own, vs, other_w]),
                    lw,
                );
                push(
                    "cross-image-rate-invariance-strong",
                    rx,
                    uniform_mi(model, &[vs], &[y], &[own, vw]),
                    ls,
                );
                push(
                    "cross-image-rate-invariance-strong-conditioned",
                    rx,
                    uniform_mi(model, &[vs], &[y], &[own, vw, other_w]),
                    ls - lw,
                );
            }
            Regime::Mixed | Regime::Strong => {
                let v_own = VarId::V { tx: rx, rx }; // own image on the direct link
                let v_own_w = VarId::V {
                    tx: rx,
                    rx: (rx + 1) % 3 + 1,
                }; // own weak cross image
                let other_w = VarId::V {
                    tx: s,
                    rx: rx % 3 + 1,
                }; // strong interferer's weak image
                let xs = VarId::X(s);
                let lo = model.image_levels(rx, rx) as f64 * mf;

                // H(Y|own direct image) = H(weak image) + H(full strong message).
                let hy_given_vo =
                    uniform_entropy(model, &[y, v_own]) - uniform_entropy(model, &[v_own]);
                push(
                    "interference-resolvable-given-direct-image",
                    rx,
                    hy_given_vo,
                    lw + ls,
                );
                push(
                    "full-message-rate-invariance",
                    rx,
                    uniform_mi(model, &[xs], &[y], &[v_own, v_own_w, vw]),
                    ls,
                );
                push(
                    "full-message-rate-invariance-conditioned",
                    rx,
                    uniform_mi(model, &[xs], &[y], &[v_own, v_own_w, vw, other_w]),
                    ls - lw,
                );
                push(
                    "cross-image-rate-invariance-weak",
                    rx,
                    uniform_mi(model, &[vw], &[y], &[v_own, v_own_w, xs]),
                    lw,
                );
                let _ = lo;
            }
        }
    }
    report
}

#[derive(Debug, Clone)]
pub struct DetCapacity {
    pub value: f64,
    pub terms: Vec<(String, f64)>,
    pub active: usize,
}

/// Symmetric capacity of the model for uniform inputs (no time sharing):
/// the minimum over the regime's mutual-information terms, each exact.
pub fn det_sym_capacity(model: &DetChannel) -> Result<DetCapacity> {
    let report = check_assumptions(model);
    if !report.all_pass() {
        let failed: Vec<String> = report
            .checks
            .iter()
            .filter(|c| !c.pass())
            .map(|c| format!("{}@rx{}", c.label, c.rx))
            .collect();
        return Err(Error::Degenerate(format!(
            "capacity formula preconditions failed: {}",
            failed.join(", ")
        )));
    }
    let y = VarId::Y(1);
    let x1 = VarId::X(1);
    let mi = |a: &[VarId], c: &[VarId]| uniform_mi(model, a, &[y], c);
    let terms: Vec<(String, f64)> = match model.regime {
        Regime::Weak => {
            let v12 = VarId::V { tx: 1, rx: 2 };
            let v13 = VarId::V { tx: 1, rx: 3 };
            let v21 = VarId::V { tx: 2, rx: 1 };
            let v31 = VarId::V { tx: 3, rx: 1 };
            let v32 = VarId::V { tx: 3, rx: 2 };
            let private = mi(&[x1], &[v12, v21, v31]);
            vec![
                ("T1".into(), mi(&[v31, v21], &[v12, v32]) + private),
                (
                    "T2".into(),
                    (mi(&[v21], &[v12, v31]) + mi(&[v12, v21, v31], &[v13, v32])) / 2.0 + private,
                ),
                (
                    "T3".into(),
                    (mi(&[v21, v31], &[v12]) + mi(&[v12], &[v13, v21, v31])) / 2.0 + private,
                ),
                ("T4".into(), mi(&[v12, v21, v31], &[v32]) / 2.0 + private),
                ("T5".into(), mi(&[v12, v21, v31], &[v13]) / 2.0 + private),
                (
                    "T6".into(),
                    (mi(&[v12, v21, v31], &[]) + mi(&[v12], &[v13, v21, v31])) / 3.0 + private,
                ),
            ]
        }
        Regime::Mixed => {
            let v11 = VarId::V { tx: 1, rx: 1 };
            let v13 = VarId::V { tx: 1, rx: 3 };
            let v21 = VarId::V { tx: 2, rx: 1 };
            let v32 = VarId::V { tx: 3, rx: 2 };
            let x3 = VarId::X(3);
            vec![
                ("T1".into(), mi(&[v11, v21], &[v13, x3])),
                (
                    "T2".into(),
                    (mi(&[v21], &[v11, x3]) + mi(&[v11, v21, x3], &[v13, v32])) / 2.0,
                ),
                ("T3".into(), mi(&[v11, v21, x3], &[v32]) / 2.0),
                ("T4".into(), mi(&[v11, v21, x3], &[v13]) / 2.0),
                (
                    "T5".into(),
                    (mi(&[v11, v21, x3], &[]) + mi(&[v11], &[v13, v21, x3])) / 3.0,
                ),
            ]
        }
        Regime::Strong => {
            let v11 = VarId::V { tx: 1, rx: 1 };
            let v21 = VarId::V { tx: 2, rx: 1 };
            let x3 = VarId::X(3);
            vec![
                ("T1".into(), mi(&[v11], &[v21, x3])),
                ("T2".into(), mi(&[v11, v21, x3], &[]) / 3.0),
            ]
        }
    };
    let mut active = 0;
    for (i, t) in terms.iter().enumerate() {
        if t.1 < terms[active].1 - 1e-12 {
            active = i;
        }
    }
    Ok(DetCapacity {
        value: terms[active].1,
        terms,
        active,
    })
}

/// One error-event bound of the weak-regime layered scheme at receiver 1.
#[derive(Debug, Clone)]
pub struct BoundTerm {
    pub label: String,
    pub weights: [u32; 3],
    pub targets: Vec<VarId>,
    pub given: Vec<VarId>,
    /// Member of the reduced nine-bound list.
    pub kept: bool,
}

/// The full 18-entry error-event catalog of the weak regime at receiver 1,
/// with the reduced bounds marked. Layer classes: c1 weights count coarse
/// common layers, c2 finer common layers, p the private remainder.
pub fn weak_error_bounds() -> Vec<BoundTerm> {
    let v12 = VarId::V { tx: 1, rx: 2 };
    let v13 = VarId::V { tx: 1, rx: 3 };
    let v21 = VarId::V { tx: 2, rx: 1 };
    let v31 = VarId::V { tx: 3, rx: 1 };
    let v32 = VarId::V { tx: 3, rx: 2 };
    let x1 = VarId::X(1);
    let t =
        |label: &str, w: [u32; 3], targets: Vec<VarId>, given: Vec<VarId>, kept: bool| BoundTerm {
            label: label.into(),
            weights: w,
            targets,
            given,
            kept,
        };
    vec![
        t("Rp", [0, 0, 1], vec![x1], vec![v12, v21, v31], true),
        t("Rc2:own", [0, 1, 0], vec![v12], vec![v13, v21, v31], true),
        t("Rc1:weak", [1, 0, 0], vec![v21], vec![v12, v31], true),
        t(
            "Rc2:strong",
            [0, 1, 0],
            vec![v31],
            vec![v12, v21, v32],
            false,
        ),
        t("Rc1+Rc2:own", [1, 1, 0], vec![v12], vec![v21, v31], false),
        t(
            "Rc1+Rc2:strong",
            [1, 1, 0],
            vec![v31],
            vec![v12, v21],
            false,
        ),
        t(
            "Rc1+Rc2:own+weak",
            [1, 1, 0],
            vec![v12, v21],
            vec![v13, v31],
            false,
        ),
        t(
            "Rc1+Rc2:cross",
            [1, 1, 0],
            vec![v31, v21],
            vec![v12, v32],
            true,
        ),
        t(
            "Rc1+Rc2:own+strong",
            [1, 1, 0],
            vec![v12, v31],
            vec![v13, v21, v32],
            false,
        ),
        t(
            "2Rc1+Rc2:own+weak",
            [2, 1, 0],
            vec![v12, v21],
            vec![v31],
            false,
        ),
        t(
            "Rc1+2Rc2:own+strong",
            [1, 2, 0],
            vec![v12, v31],
            vec![v21, v32],
            false,
        ),
        t(
            "Rc1+2Rc2:all",
            [1, 2, 0],
            vec![v12, v21, v31],
            vec![v13, v32],
            true,
        ),
        t(
            "Rc1+2Rc2:own+strong-b",
            [1, 2, 0],
            vec![v12, v31],
            vec![v13, v21],
            false,
        ),
        t("2Rc1+Rc2:cross", [2, 1, 0], vec![v21, v31], vec![v12], true),
        t(
            "2Rc1+2Rc2:own+strong",
            [2, 2, 0],
            vec![v12, v31],
            vec![v21],
            false,
        ),
        t(
            "2Rc1+2Rc2:all-weakgift",
            [2, 2, 0],
            vec![v12, v21, v31],
            vec![v32],
            true,
        ),
        t(
            "2Rc1+2Rc2:all-owngift",
            [2, 2, 0],
            vec![v12, v21, v31],
            vec![v13],
            true,
        ),
        t(
            "3Rc1+2Rc2:all",
            [3, 2, 0],
            vec![v12, v21, v31],
            vec![],
            true,
        ),
    ]
}

/// Uniform pmf over `bits`-bit messages.
pub fn uniform_pmf(bits: usize) -> Vec<f64> {
    vec![1.0 / (1u64 << bits) as f64; 1 << bits]
}

fn plugin_entropy(dist: &HashMap<u64, f64>) -> f64 {
    let mut h = 0.0;
    for &p in dist.values() {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h
}

/// Entropy of a variable set by exhaustive enumeration of the joint input
/// distribution. Arbitrary product pmfs over each user's message.
pub fn brute_force_entropy(
    model: &DetChannel,
    pmfs: &[Vec<f64>; 3],
    vars: &[VarId],
) -> Result<f64> {
    let mb = model.msg_bits();
    if 3 * mb > BRUTE_FORCE_BIT_CAP {
        return Err(Error::TooLarge(format!(
            "joint input space has {} bits, cap is {BRUTE_FORCE_BIT_CAP}",
            3 * mb
        )));
    }
    for pmf in pmfs {
        if pmf.len() != 1 << mb {
            return Err(Error::InvalidConfig("pmf length must be 2^msg_bits".into()));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > 1e-9 || pmf.iter().any(|&p| p < 0.0) {
            return Err(Error::InvalidConfig(
                "pmf must be a probability vector".into(),
            ));
        }
    }
    let maps: Vec<Gf2Matrix> = vars.iter().map(|&v| model.var_map(v)).collect();
    let widths: Vec<usize> = maps.iter().map(|m| m.rows()).collect();
    if widths.iter().sum::<usize>() > 64 {
        return Err(Error::TooLarge(
            "packed variable value exceeds 64 bits".into(),
        ));
    }
    let mut dist: HashMap<u64, f64> = HashMap::new();
    for x1 in 0..(1u64 << mb) {
        let p1 = pmfs[0][x1 as usize];
        if p1 == 0.0 {
            continue;
        }
        for x2 in 0..(1u64 << mb) {
            let p2 = p1 * pmfs[1][x2 as usize];
            if p2 == 0.0 {
                continue;
            }
            for x3 in 0..(1u64 << mb) {
                let p = p2 * pmfs[2][x3 as usize];
                if p == 0.0 {
                    continue;
                }
                let input = [x1 | x2 << mb | x3 << (2 * mb)];
                let mut key = 0u64;
                let mut shift = 0;
                for (map, w) in maps.iter().zip(&widths) {
                    key |= map.apply(&input) << shift;
                    shift += w;
                }
                *dist.entry(key).or_insert(0.0) += p;
            }
        }
    }
    Ok(plugin_entropy(&dist))
}

/// I(A; B | C) by exhaustive enumeration.
pub fn brute_force_mi(
    model: &DetChannel,
    pmfs: &[Vec<f64>; 3],
    a: &[VarId],
    b: &[VarId],
    c: &[VarId],
) -> Result<f64> {
    let mut ac = a.to_vec();
    ac.extend_from_slice(c);
    let mut bc = b.to_vec();
    bc.extend_from_slice(c);
    let mut abc = a.to_vec();
    abc.extend_from_slice(b);
    abc.extend_from_slice(c);
    Ok(
        brute_force_entropy(model, pmfs, &ac)? + brute_force_entropy(model, pmfs, &bc)?
            - brute_force_entropy(model, pmfs, &abc)?
            - brute_force_entropy(model, pmfs, c)?,
    )
}

/// Evaluate the listed terms by exhaustive enumeration (for validating the
/// rank evaluator and exploring non-uniform inputs).
pub fn brute_force_terms(
    model: &DetChannel,
    pmfs: &[Vec<f64>; 3],
    terms: &[BoundTerm],
) -> Result<Vec<(String, f64)>> {
    let y = [VarId::Y(1)];
    terms
        .iter()
        .map(|t| {
            Ok((
                t.label.clone(),
                brute_force_mi(model, pmfs, &t.targets, &y, &t.given)?,
            ))
        })
        .collect()
}

/// Portable dense dump of the model: header plus the 0/1 rows of each
/// receiver map.
pub fn dump_listing(model: &DetChannel) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "levels={} m={} n={} alpha1={} alpha2={} seed={} regime={} msg_levels={} heights={}\n",
        model.levels,
        model.config.m,
        model.config.n,
        model.config.alpha1,
        model.config.alpha2,
        model.seed,
        model.regime,
        model.msg_levels,
        model.heights()
    ));
    out.push_str(&format!(
        "visible_levels own={} weak={} strong={}\n",
        model.visible_levels[0], model.visible_levels[1], model.visible_levels[2]
    ));
    for (hi, block) in model.blocks.iter().enumerate() {
        out.push_str(&format!(
            "height {} roles own={} weak={} strong={} block {}x{}\n",
            hi + 1,
            block.present[0] as u8,
            block.present[1] as u8,
            block.present[2] as u8,
            block.mat.rows(),
            block.mat.cols()
        ));
        for r in 0..block.mat.rows() {
            let row: String = (0..block.mat.cols())
                .map(|c| if block.mat.get(r, c) { '1' } else { '0' })
                .collect();
            out.push_str(&row);
            out.push('\n');
        }
    }
    for rx in 1..=3 {
        let map = &model.y_maps[rx - 1];
        out.push_str(&format!(
            "receiver {rx} map {}x{}\n",
            map.rows(),
            map.cols()
        ));
        for r in 0..map.rows() {
            let row: String = (0..map.cols())
                .map(|c| if map.get(r, c) { '1' } else { '0' })
                .collect();
            out.push_str(&row);
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(a1: f64, a2: f64) -> SystemConfig {
        SystemConfig::new(1, 2, a1, a2).unwrap()
    }

    fn weak_model() -> DetChannel {
        build_shift_channel(&cfg(0.5, 0.2), 10, 42).unwrap()
    }

    #[test]
    fn build_dimensions_match_contract() {
        let m = weak_model();
        assert_eq!(m.msg_bits(), 10);
        assert_eq!(m.image_levels(1, 2), 5); // strong cross image
        assert_eq!(m.image_levels(2, 1), 2); // weak cross image
        let (rank, want) = m.interference_rank(1);
        assert_eq!((rank, want), (7, 7));
        assert_eq!(m.var_map(VarId::Y(1)).rows(), 20);
    }

    #[test]
    fn low_level_count_rejected() {
        assert!(matches!(
            build_shift_channel(&cfg(0.5, 0.2), 1, 0),
            Err(Error::InvalidConfig(_))
        ));
        // floor(0.2 * 4) = 0: the weak link shows nothing.
        assert!(matches!(
            build_shift_channel(&cfg(0.5, 0.2), 4, 0),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn dense_interference_still_constructible() {
        // 9 + 8 = 17 visible interference bits against 20 output bits.
        let m = build_shift_channel(&cfg(0.9, 0.8), 10, 1).unwrap();
        let (rank, want) = m.interference_rank(1);
        assert_eq!((rank, want), (17, 17));
    }

    #[test]
    fn zeroing_second_slot_breaks_resolvability() {
        // Wiring interference only into the first M output rows per height
        // forces collisions the rank condition must catch.
        let mut m = weak_model();
        for block in &mut m.blocks {
            let mut col = 0;
            for role in ROLES {
                if !block.present[role as usize] {
                    continue;
                }
                if role != Role::Own {
                    for out in m.config.m..m.config.n {
                        block.mat.set(out, col, false);
                    }
                }
                col += m.config.m;
            }
        }
        m.y_maps = assemble_y_maps(&m.config, m.msg_levels, &m.visible_levels, &m.blocks);
        let (rank, want) = m.interference_rank(1);
        assert!(rank < want, "rank {rank} should drop below {want}");
        assert!(!check_assumptions(&m).all_pass());
    }

    #[test]
    fn entropies_are_image_sizes() {
        let m = weak_model();
        assert_eq!(uniform_entropy(&m, &[VarId::V { tx: 1, rx: 2 }]), 5.0);
        assert_eq!(uniform_entropy(&m, &[VarId::V { tx: 1, rx: 3 }]), 2.0);
        assert_eq!(uniform_entropy(&m, &[VarId::X(1)]), 10.0);
        // Degradedness: the weaker image is a prefix of the stronger one.
        assert_eq!(
            uniform_entropy(&m, &[VarId::V { tx: 1, rx: 2 }, VarId::V { tx: 1, rx: 3 }]),
            5.0
        );
    }

    #[test]
    fn conditional_entropy_identities() {
        let m = weak_model();
        let y = VarId::Y(1);
        let x1 = VarId::X(1);
        // H(Y1|X1) = H(V21) + H(V31) = 2 + 5.
        let h = uniform_entropy(&m, &[y, x1]) - uniform_entropy(&m, &[x1]);
        assert_eq!(h, 7.0);
        // I(X1; Y1 | all commons) = private bits = 10 - 5.
        let v = uniform_mi(
            &m,
            &[x1],
            &[y],
            &[
                VarId::V { tx: 1, rx: 2 },
                VarId::V { tx: 2, rx: 1 },
                VarId::V { tx: 3, rx: 1 },
            ],
        );
        assert_eq!(v, 5.0);
    }

    #[test]
    fn assumptions_pass_on_generic_seeds() {
        let mut pass = 0;
        for seed in 0..100 {
            let m = build_shift_channel(&cfg(0.5, 0.2), 10, seed).unwrap();
            if check_assumptions(&m).all_pass() {
                pass += 1;
            }
        }
        assert!(pass >= 99, "{pass}/100");
    }

    #[test]
    fn weak_capacity_tracks_scaled_gdof() {
        let m = weak_model();
        let cap = det_sym_capacity(&m).unwrap();
        assert!((cap.value - 8.0).abs() <= 1.0, "{}", cap.value);
    }

    #[test]
    fn strong_capacity_tracks_scaled_gdof() {
        let m = build_shift_channel(&cfg(1.4, 1.1), 10, 3).unwrap();
        assert_eq!(m.msg_levels, 14);
        let cap = det_sym_capacity(&m).unwrap();
        assert!((cap.value - 8.3333).abs() <= 1.0, "{}", cap.value);
    }

    #[test]
    fn mixed_capacity_tracks_scaled_gdof() {
        let m = build_shift_channel(&cfg(1.2, 0.8), 10, 3).unwrap();
        let cap = det_sym_capacity(&m).unwrap();
        assert!((cap.value - 8.0).abs() <= 1.0, "{}", cap.value);
    }

    #[test]
    fn scaling_law() {
        for l in [5, 10, 20] {
            let m = build_shift_channel(&cfg(0.5, 0.2), l, 9).unwrap();
            let cap = det_sym_capacity(&m).unwrap();
            assert!(
                (cap.value / l as f64 - 0.8).abs() <= 2.0 / l as f64,
                "L={l}: {}",
                cap.value
            );
        }
    }

    #[test]
    fn brute_force_agrees_with_ranks_at_small_size() {
        let m = build_shift_channel(&cfg(0.5, 0.25), 4, 5).unwrap();
        let pmfs = [uniform_pmf(4), uniform_pmf(4), uniform_pmf(4)];
        let y = [VarId::Y(1)];
        for term in weak_error_bounds() {
            let exact = uniform_mi(&m, &term.targets, &y, &term.given);
            let brute = brute_force_mi(&m, &pmfs, &term.targets, &y, &term.given).unwrap();
            assert!(
                (exact - brute).abs() < 1e-9,
                "{}: {exact} vs {brute}",
                term.label
            );
        }
    }

    #[test]
    fn point_mass_inputs_carry_no_information() {
        let m = build_shift_channel(&cfg(0.5, 0.25), 4, 5).unwrap();
        let mut point = vec![0.0; 16];
        point[11] = 1.0;
        let pmfs = [point.clone(), point.clone(), point];
        let v = brute_force_mi(&m, &pmfs, &[VarId::X(1)], &[VarId::Y(1)], &[]).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn reduced_bounds_attain_class_minima() {
        let m = build_shift_channel(&cfg(0.5, 0.25), 4, 5).unwrap();
        let y = [VarId::Y(1)];
        let bounds = weak_error_bounds();
        let values: Vec<f64> = bounds
            .iter()
            .map(|t| uniform_mi(&m, &t.targets, &y, &t.given))
            .collect();
        let mut classes: HashMap<[u32; 3], (f64, f64)> = HashMap::new();
        for (t, &v) in bounds.iter().zip(&values) {
            let e = classes
                .entry(t.weights)
                .or_insert((f64::INFINITY, f64::INFINITY));
            e.0 = e.0.min(v);
            if t.kept {
                e.1 = e.1.min(v);
            }
        }
        for (w, (class_min, kept_min)) in classes {
            assert!(
                (class_min - kept_min).abs() < 1e-9,
                "weights {w:?}: class min {class_min}, kept min {kept_min}"
            );
        }
    }

    #[test]
    fn state_space_cap_enforced() {
        let m = weak_model(); // 30 input bits > 24
        let pmfs = [uniform_pmf(10), uniform_pmf(10), uniform_pmf(10)];
        assert!(matches!(
            brute_force_entropy(&m, &pmfs, &[VarId::Y(1)]),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn capacity_requires_assumptions() {
        let mut m = weak_model();
        for block in &mut m.blocks {
            let cols = block.mat.cols();
            for c in 0..cols {
                block.mat.set(1, c, false);
            }
        }
        m.y_maps = assemble_y_maps(&m.config, m.msg_levels, &m.visible_levels, &m.blocks);
        assert!(det_sym_capacity(&m).is_err());
    }

    #[test]
    fn dump_contains_header_and_rows() {
        let m = weak_model();
        let dump = dump_listing(&m);
        assert!(dump.starts_with("levels=10 m=1 n=2"));
        assert!(dump.contains("receiver 1 map 20x30"));
        assert!(dump.contains("height 1 roles own=1 weak=1 strong=1 block 2x3"));
        // 3 receiver maps of 20 rows plus 10 height blocks of 2 rows.
        assert_eq!(
            dump.lines()
                .filter(|l| l.chars().all(|c| c == '0' || c == '1'))
                .count(),
            80
        );
    }

    #[test]
    fn rebuild_from_seed_is_identical() {
        let a = weak_model();
        let b = weak_model();
        assert_eq!(dump_listing(&a), dump_listing(&b));
    }
}
