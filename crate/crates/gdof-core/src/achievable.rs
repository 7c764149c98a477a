//! Finite-SNR symmetric rate of the layered rate-splitting scheme.
//!
//! Every transmitter splits its message into up to three superposed Gaussian
//! layers: c1 (decodable at both cross receivers), c2 (decodable only at the
//! receiver reached through the strong cross link) and a private remainder p.
//! The weak regime uses all three, the mixed regime two, the strong regime a
//! single layer. Receiver 1 jointly decodes every layer it can see above the
//! noise floor, then peels its private layer; each nonempty error subset of
//! the joint-decode set yields one log-det rate bound, and the symmetric
//! rate is the exact optimum of the resulting small linear program.

use crate::channel::{
    logdet_rate_factor, received_covariance, ChannelInstance, Regime, SystemConfig,
};
use crate::cmat::CMat;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerClass {
    C1,
    C2,
    P,
}

impl LayerClass {
    pub fn index(&self) -> usize {
        match self {
            LayerClass::C1 => 0,
            LayerClass::C2 => 1,
            LayerClass::P => 2,
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            LayerClass::C1 => "c1",
            LayerClass::C2 => "c2",
            LayerClass::P => "p",
        }
    }
}

/// Regime-specific layering plan: transmit powers, what receiver 1 jointly
/// decodes, what it treats as noise, and the successive private stage.
#[derive(Debug, Clone)]
pub struct LayerPlan {
    pub regime: Regime,
    alpha1: f64,
    alpha2: f64,
}

impl LayerPlan {
    /// Transmit power of a layer class as a function of rho. The per-user
    /// powers sum to 1 at every rho.
    pub fn tx_power(&self, class: LayerClass, rho: f64) -> f64 {
        let pa1 = rho.powf(-self.alpha1);
        let pa2 = rho.powf(-self.alpha2);
        match (self.regime, class) {
            (Regime::Weak, LayerClass::C1) => 1.0 - pa2,
            (Regime::Weak, LayerClass::C2) => pa2 - pa1,
            (Regime::Weak, LayerClass::P) => pa1,
            (Regime::Mixed, LayerClass::C1) => 1.0 - pa2,
            (Regime::Mixed, LayerClass::C2) => pa2,
            (Regime::Strong, LayerClass::C1) => 1.0,
            _ => 0.0,
        }
    }

    /// Layer classes actually transmitted in this regime.
    pub fn active_classes(&self) -> Vec<LayerClass> {
        match self.regime {
            Regime::Weak => vec![LayerClass::C1, LayerClass::C2, LayerClass::P],
            Regime::Mixed => vec![LayerClass::C1, LayerClass::C2],
            Regime::Strong => vec![LayerClass::C1],
        }
    }

    /// Message layers jointly decoded at receiver 1 (tx, class).
    pub fn decode_set(&self) -> Vec<(usize, LayerClass)> {
        match self.regime {
            Regime::Weak | Regime::Mixed => vec![
                (1, LayerClass::C1),
                (1, LayerClass::C2),
                (2, LayerClass::C1),
                (3, LayerClass::C1),
                (3, LayerClass::C2),
            ],
            Regime::Strong => {
                vec![
                    (1, LayerClass::C1),
                    (2, LayerClass::C1),
                    (3, LayerClass::C1),
                ]
            }
        }
    }

    /// Layers that arrive at or below the noise floor at receiver 1 and are
    /// treated as noise throughout.
    pub fn noise_layers(&self) -> Vec<(usize, LayerClass)> {
        match self.regime {
            Regime::Weak => vec![(2, LayerClass::C2), (2, LayerClass::P), (3, LayerClass::P)],
            Regime::Mixed => vec![(2, LayerClass::C2)],
            Regime::Strong => vec![],
        }
    }

    /// Own layer decoded successively after the commons, if any.
    pub fn private_layer(&self) -> Option<(usize, LayerClass)> {
        match self.regime {
            Regime::Weak => Some((1, LayerClass::P)),
            _ => None,
        }
    }

    /// Power arriving at receiver 1 from layer (tx, class), in linear scale.
    pub fn arrival_power(
        &self,
        config: &SystemConfig,
        tx: usize,
        class: LayerClass,
        rho: f64,
    ) -> f64 {
        self.tx_power(class, rho) * rho.powf(config.link_exponent(tx, 1))
    }
}

/// Regime-dispatching constructor for the layer plan.
pub fn decode_catalog(config: &SystemConfig) -> Result<LayerPlan> {
    Ok(LayerPlan {
        regime: config.regime()?,
        alpha1: config.alpha1,
        alpha2: config.alpha2,
    })
}

/// One log-det constraint: weights count how many unknown layers of each
/// class the error event contains.
#[derive(Debug, Clone, PartialEq)]
pub struct RateBound {
    pub label: String,
    pub weights: [u32; 3],
    pub value: f64,
}

/// Optimal rate split; satisfies every generated bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub rc1: f64,
    pub rc2: f64,
    pub rp: f64,
}

impl RatePoint {
    pub fn total(&self) -> f64 {
        self.rc1 + self.rc2 + self.rp
    }

    pub fn rate(&self, class: LayerClass) -> f64 {
        [self.rc1, self.rc2, self.rp][class.index()]
    }
}

/// All error-event bounds at receiver 1: one per nonempty subset of the
/// joint-decode set, plus the successive private-stage bound in the weak
/// regime.
pub fn generate_bounds(channel: &ChannelInstance, rho: f64) -> Result<Vec<RateBound>> {
    if rho.is_nan() || rho <= 1.0 {
        return Err(Error::InvalidConfig(format!(
            "rho must exceed 1, got {rho}"
        )));
    }
    let config = &channel.config;
    let plan = decode_catalog(config)?;

    // Amplitude factor of a layer's arrival: sqrt(power * rho^e) H.
    let factor = |tx: usize, class: LayerClass| -> CMat {
        let p = plan.tx_power(class, rho) * rho.powf(config.link_exponent(tx, 1));
        channel.h(tx, 1).scaled(p.sqrt())
    };

    // Noise common to every commons-stage bound: identity, the noise-floor
    // layers, and the not-yet-decoded private layer.
    let mut noise_floor = CMat::identity(config.n);
    for &(tx, class) in &plan.noise_layers() {
        noise_floor.add_assign(&received_covariance(
            channel,
            1,
            &[(tx, plan.tx_power(class, rho))],
            rho,
        )?);
    }
    let mut commons_noise = noise_floor.clone();
    if let Some((tx, class)) = plan.private_layer() {
        commons_noise.add_scaled_gram(&factor(tx, class), 1.0);
    }

    let decode = plan.decode_set();

    let mut bounds = Vec::with_capacity((1 << decode.len()) + 1);
    for mask in 1u32..(1 << decode.len() as u32) {
        let mut weights = [0u32; 3];
        let mut names = Vec::new();
        // Layers of one transmitter share a channel matrix, so a subset's
        // signal factor carries one column group per transmitter with the
        // member powers combined.
        let mut tx_power = [0.0f64; 3];
        for (i, &(tx, class)) in decode.iter().enumerate() {
            if mask >> i & 1 == 1 {
                tx_power[tx - 1] += plan.tx_power(class, rho);
                weights[class.index()] += 1;
                names.push(format!("{tx}{}", class.tag()));
            }
        }
        let members: Vec<CMat> = (1..=3)
            .filter(|&tx| tx_power[tx - 1] > 0.0)
            .map(|tx| {
                let p = tx_power[tx - 1] * rho.powf(config.link_exponent(tx, 1));
                channel.h(tx, 1).scaled(p.sqrt())
            })
            .collect();
        let signal = CMat::hconcat(&members.iter().collect::<Vec<_>>());
        bounds.push(RateBound {
            label: format!("{{{}}}", names.join(",")),
            weights,
            value: logdet_rate_factor(&signal, &commons_noise)?,
        });
    }
    if let Some((tx, class)) = plan.private_layer() {
        bounds.push(RateBound {
            label: format!("{{{}{}}}", tx, class.tag()),
            weights: [0, 0, 1],
            value: logdet_rate_factor(&factor(tx, class), &noise_floor)?,
        });
    }
    Ok(bounds)
}

/// Solve a dense d x d system by Gaussian elimination with partial pivoting.
/// Returns None when the system is rank deficient.
fn solve_small(a: &mut [f64], b: &mut [f64], d: usize) -> Option<Vec<f64>> {
    let scale = a.iter().fold(0.0f64, |m, &v| m.max(v.abs())).max(1.0);
    for col in 0..d {
        let mut piv = col;
        for r in (col + 1)..d {
            if a[r * d + col].abs() > a[piv * d + col].abs() {
                piv = r;
            }
        }
        if a[piv * d + col].abs() < 1e-12 * scale {
            return None;
        }
        if piv != col {
            for k in 0..d {
                a.swap(col * d + k, piv * d + k);
            }
            b.swap(col, piv);
        }
        for r in 0..d {
            if r == col {
                continue;
            }
            let f = a[r * d + col] / a[col * d + col];
            if f != 0.0 {
                for k in col..d {
                    a[r * d + k] -= f * a[col * d + k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..d).map(|i| b[i] / a[i * d + i]).collect())
}

const FEAS_SLACK: f64 = 1e-9;

/// Maximize Rc1 + Rc2 + Rp subject to every bound and nonnegativity, by
/// exact vertex enumeration of the (at most 3-variable) polytope.
///
/// Ties in the objective break toward the lexicographically largest
/// (Rc1, Rc2, Rp). Classes the plan does not transmit are fixed at zero.
pub fn max_symmetric_rate(bounds: &[RateBound], plan: &LayerPlan) -> Result<RatePoint> {
    if bounds.is_empty() {
        return Err(Error::InvalidConfig("no rate bounds supplied".into()));
    }
    let active: Vec<usize> = plan.active_classes().iter().map(|c| c.index()).collect();
    let d = active.len();
    for &cls in &active {
        if !bounds.iter().any(|b| b.weights[cls] > 0) {
            return Err(Error::Unbounded(format!(
                "no bound constrains rate class {}; catalog incomplete",
                [LayerClass::C1, LayerClass::C2, LayerClass::P][cls].tag()
            )));
        }
    }

    // Constraint rows over the active variables: w . x <= v, plus one axis
    // plane -x_j <= 0 per variable.
    let mut rows: Vec<(Vec<f64>, f64)> = bounds
        .iter()
        .map(|b| {
            (
                active.iter().map(|&c| b.weights[c] as f64).collect(),
                b.value,
            )
        })
        .collect();
    for j in 0..d {
        let mut w = vec![0.0; d];
        w[j] = -1.0;
        rows.push((w, 0.0));
    }

    let feasible = |x: &[f64]| {
        rows.iter().all(|(w, v)| {
            let lhs: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum();
            lhs <= v + FEAS_SLACK
        })
    };

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |x: Vec<f64>| {
        if !feasible(&x) {
            return;
        }
        let obj: f64 = x.iter().sum();
        match &best {
            Some((bobj, bx)) => {
                let better =
                    obj > bobj + FEAS_SLACK || (obj >= bobj - FEAS_SLACK && lex_greater(&x, bx));
                if better {
                    best = Some((obj, x));
                }
            }
            None => best = Some((obj, x)),
        }
    };

    let nrows = rows.len();
    let mut idx = vec![0usize; d];
    enumerate_combinations(nrows, d, &mut idx, 0, 0, &mut |chosen: &[usize]| {
        let mut a = vec![0.0; d * d];
        let mut b = vec![0.0; d];
        for (r, &ci) in chosen.iter().enumerate() {
            for k in 0..d {
                a[r * d + k] = rows[ci].0[k];
            }
            b[r] = rows[ci].1;
        }
        if let Some(x) = solve_small(&mut a, &mut b, d) {
            consider(x);
        }
    });

    let (_, x) = best.ok_or_else(|| Error::Numerical("no feasible vertex found".into()))?;
    let mut point = [0.0; 3];
    for (j, &cls) in active.iter().enumerate() {
        point[cls] = x[j].max(0.0);
    }
    Ok(RatePoint {
        rc1: point[0],
        rc2: point[1],
        rp: point[2],
    })
}

fn lex_greater(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        if *x > *y + 1e-12 {
            return true;
        }
        if *x < *y - 1e-12 {
            return false;
        }
    }
    false
}

fn enumerate_combinations(
    n: usize,
    k: usize,
    idx: &mut Vec<usize>,
    depth: usize,
    start: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if depth == k {
        f(idx);
        return;
    }
    for i in start..n {
        idx[depth] = i;
        enumerate_combinations(n, k, idx, depth + 1, i + 1, f);
    }
}

/// End-to-end symmetric rate at one SNR point: generate the bound catalog,
/// solve the program, return Rc1 + Rc2 + Rp.
pub fn achievable_sym_rate(channel: &ChannelInstance, rho: f64) -> Result<f64> {
    let plan = decode_catalog(&channel.config)?;
    let bounds = generate_bounds(channel, rho)?;
    Ok(max_symmetric_rate(&bounds, &plan)?.total())
}

/// Detailed variant for reporting: the optimal split plus the bound catalog.
pub fn achievable_details(
    channel: &ChannelInstance,
    rho: f64,
) -> Result<(RatePoint, Vec<RateBound>)> {
    let plan = decode_catalog(&channel.config)?;
    let bounds = generate_bounds(channel, rho)?;
    let point = max_symmetric_rate(&bounds, &plan)?;
    Ok((point, bounds))
}
