//! DEEC-family election mathematics.
//!
//! Network-lifetime estimators, the rotating election threshold and the
//! per-protocol cluster-head probabilities. Everything here is a pure
//! function of its arguments.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;


use crate::error::{Error, Result};
use crate::model::{FieldGeometry, NodeClass, NodeState, RadioParams, Round};

/// Lower bound applied to the a-priori average energy once the estimate
/// reaches zero.
pub const AVG_ENERGY_FLOOR: f64 = 1e-6;

/// Upper bound on a per-round cluster-head probability. The threshold rule
/// needs `p < 1`.
pub const P_MAX: f64 = 0.99;

/// Expected CH-to-BS distance factor for a base station at the field center.
const BS_DISTANCE_FACTOR: f64 = 0.765;

/// Three-class heterogeneous population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeterogeneityParams {
    /// Fraction of nodes that are advanced or super.
    pub m: f64,
    /// Fraction of those that are super.
    pub m0: f64,
    /// Advanced nodes start with `e0 * (1 + a)`.
    pub a: f64,
    /// Super nodes start with `e0 * (1 + b)`.
    pub b: f64,
    /// Initial energy of a normal node, J.
    pub e0: f64,
}

impl Default for HeterogeneityParams {
    fn default() -> Self {
        Self {
            m: 0.8,
            m0: 0.6,
            a: 2.0,
            b: 3.5,
            e0: 0.5,
        }
    }
}

impl HeterogeneityParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.m) {
            return Err(Error::validation("heterogeneity.m", format!("must lie in [0, 1], got {}", self.m)));
        }
        if !(0.0..=1.0).contains(&self.m0) {
            return Err(Error::validation("heterogeneity.m0", format!("must lie in [0, 1], got {}", self.m0)));
        }
        if !(self.a >= 0.0 && self.a.is_finite()) {
            return Err(Error::validation("heterogeneity.a", format!("must be >= 0, got {}", self.a)));
        }
        if !(self.b >= self.a && self.b.is_finite()) {
            return Err(Error::validation("heterogeneity.b", format!("must be >= a, got {}", self.b)));
        }
        if !(self.e0 > 0.0 && self.e0.is_finite()) {
            return Err(Error::validation("heterogeneity.e0_j", format!("must be > 0, got {}", self.e0)));
        }
        Ok(())
    }

    /// `1 + m (a + m0 b)`: total energy relative to an all-normal network.
    pub fn energy_factor(&self) -> f64 {
        1.0 + self.m * (self.a + self.m0 * self.b)
    }

    pub fn total_energy(&self, n: usize) -> f64 {
        let base = n as f64 * self.e0;
        base + base * self.m * (self.a + self.m0 * self.b)
    }

    pub fn initial_energy(&self, class: NodeClass) -> f64 {
        match class {
            NodeClass::Normal => self.e0,
            NodeClass::Advanced => self.e0 * (1.0 + self.a),
            NodeClass::Super => self.e0 * (1.0 + self.b),
        }
    }

    /// Node counts per class as `[normal, advanced, super]`. Normal and super
    /// quotas are rounded to the nearest integer; advanced takes the rest.
    pub fn class_counts(&self, n: usize) -> [usize; 3] {
        let nf = n as f64;
        let normal = ((nf * (1.0 - self.m)).round() as usize).min(n);
        let sup = ((nf * self.m * self.m0).round() as usize).min(n - normal);
        [normal, n - normal - sup, sup]
    }
}

/// Which member of the DEEC family elects cluster heads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProtocolKind {
    Deec,
    Ddeec,
    Edeec,
    Eddeec,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 4] = [
        ProtocolKind::Deec,
        ProtocolKind::Ddeec,
        ProtocolKind::Edeec,
        ProtocolKind::Eddeec,
    ];

    /// Display label, e.g. `EDDEEC`.
    pub fn label(self) -> &'static str {
        match self {
            ProtocolKind::Deec => "DEEC",
            ProtocolKind::Ddeec => "DDEEC",
            ProtocolKind::Edeec => "EDEEC",
            ProtocolKind::Eddeec => "EDDEEC",
        }
    }

    /// Lower-case identifier used in file names and flags.
    pub fn key(self) -> &'static str {
        match self {
            ProtocolKind::Deec => "deec",
            ProtocolKind::Ddeec => "ddeec",
            ProtocolKind::Edeec => "edeec",
            ProtocolKind::Eddeec => "eddeec",
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "deec" => Ok(ProtocolKind::Deec),
            "ddeec" => Ok(ProtocolKind::Ddeec),
            "edeec" => Ok(ProtocolKind::Edeec),
            "eddeec" => Ok(ProtocolKind::Eddeec),
            other => Err(Error::validation(
                "protocol.kinds",
                format!("unknown protocol `{other}` (expected deec, ddeec, edeec or eddeec)"),
            )),
        }
    }
}

/// Source of the network average energy used in the probability denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AvgEnergyMode {
    /// Linear a-priori estimate from the lifetime estimator.
    #[default]
    Estimated,
    /// Actual mean residual energy over all N nodes (diagnostic).
    True,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolConfig {
    pub kind: ProtocolKind,
    /// Desired fraction of cluster heads per round.
    pub p_opt: f64,
    /// EDDEEC absolute-threshold fraction of `e0`.
    pub z: f64,
    /// Scale of the EDDEEC sub-threshold branch. `None` uses `1 / (1 + b)`,
    /// i.e. every node below the threshold gets the normal-node weight.
    pub c: Option<f64>,
    /// DDEEC comparator threshold fraction of `e0`.
    pub ddeec_z: f64,
    pub avg_energy_mode: AvgEnergyMode,
}

impl ProtocolConfig {
    pub fn new(kind: ProtocolKind) -> Self {
        Self {
            kind,
            p_opt: 0.1,
            z: 0.7,
            c: None,
            ddeec_z: 0.7,
            avg_energy_mode: AvgEnergyMode::Estimated,
        }
    }

    pub fn with_kind(self, kind: ProtocolKind) -> Self {
        Self { kind, ..self }
    }

    /// Effective EDDEEC sub-threshold scale `c`.
    pub fn sub_threshold_scale(&self, het: &HeterogeneityParams) -> f64 {
        self.c.unwrap_or(1.0 / (1.0 + het.b))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_opt > 0.0 && self.p_opt < 1.0) {
            return Err(Error::validation("protocol.p_opt", format!("must lie in (0, 1), got {}", self.p_opt)));
        }
        if !(0.0..1.0).contains(&self.z) {
            return Err(Error::validation("protocol.z", format!("must lie in [0, 1), got {}", self.z)));
        }
        if !(0.0..1.0).contains(&self.ddeec_z) {
            return Err(Error::validation(
                "protocol.ddeec_z",
                format!("must lie in [0, 1), got {}", self.ddeec_z),
            ));
        }
        if let Some(c) = self.c {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::validation("protocol.c", format!("must be > 0, got {c}")));
            }
        }
        Ok(())
    }
}

/// A-priori energy budget of the whole network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyEstimate {
    pub n: usize,
    /// Total initial energy, J.
    pub e_total: f64,
    /// Estimated energy spent by the network per round, J.
    pub e_round: f64,
    /// Estimated lifetime in rounds, `e_total / e_round`.
    pub r_lifetime: f64,
}

impl EnergyEstimate {
    /// Builds the estimate using `k = max(1, round(k_opt))` clusters.
    pub fn new(n: usize, e_total: f64, geometry: &FieldGeometry, radio: &RadioParams) -> Self {
        let (_, d_to_bs) = expected_distances(geometry.side_m, 1);
        let k_opt = optimal_cluster_count(n, geometry.side_m, radio, d_to_bs);
        let k = (k_opt.round() as u32).max(1);
        let e_round = energy_per_round(n, k, geometry, radio);
        Self {
            n,
            e_total,
            e_round,
            r_lifetime: e_total / e_round,
        }
    }

    pub fn avg_energy_at(&self, round: Round) -> f64 {
        estimate_average_energy(round, self.n, self.e_total, self.r_lifetime)
    }
}

/// Linear a-priori average node energy at round `r`, floored at
/// [`AVG_ENERGY_FLOOR`].
pub fn estimate_average_energy(r: Round, n: usize, e_total: f64, r_lifetime: f64) -> f64 {
    assert!(n > 0, "estimate_average_energy: n must be > 0");
    assert!(r_lifetime > 0.0, "estimate_average_energy: lifetime must be > 0");
    let avg = e_total / n as f64 * (1.0 - f64::from(r) / r_lifetime);
    avg.max(AVG_ENERGY_FLOOR)
}

/// Expected member-to-CH and CH-to-BS distances `(d_to_ch, d_to_bs)` for
/// `k` clusters in a square field of side `side_m`.
pub fn expected_distances(side_m: f64, k: u32) -> (f64, f64) {
    assert!(side_m > 0.0 && k >= 1);
    let d_to_ch = side_m / (2.0 * PI * f64::from(k)).sqrt();
    let d_to_bs = BS_DISTANCE_FACTOR * side_m / 2.0;
    (d_to_ch, d_to_bs)
}

/// Estimated network-wide energy dissipated in one round with `k` clusters.
pub fn energy_per_round(n: usize, k: u32, geometry: &FieldGeometry, radio: &RadioParams) -> f64 {
    assert!(n > 0 && k >= 1);
    let (d_to_ch, d_to_bs) = expected_distances(geometry.side_m, k);
    let n = n as f64;
    let bits = f64::from(radio.message_bits);
    bits * (2.0 * n * radio.e_elec
        + n * radio.e_da
        + f64::from(k) * radio.eps_mp * d_to_bs.powi(4)
        + n * radio.eps_fs * d_to_ch * d_to_ch)
}

/// Optimal number of clusters as a real number (not rounded).
pub fn optimal_cluster_count(n: usize, side_m: f64, radio: &RadioParams, d_to_bs: f64) -> f64 {
    assert!(n > 0 && d_to_bs > 0.0);
    (n as f64).sqrt() / (2.0 * PI).sqrt() * (radio.eps_fs / radio.eps_mp).sqrt() * side_m
        / (d_to_bs * d_to_bs)
}

/// Residual energy below which EDDEEC treats all classes alike.
pub fn absolute_threshold(z: f64, e0: f64) -> f64 {
    assert!((0.0..1.0).contains(&z), "absolute_threshold: z must lie in [0, 1)");
    assert!(e0 > 0.0);
    z * e0
}

/// Class weight multiplying `p_opt * E / ((1 + m(a + m0 b)) avg)`.
fn class_weight(class: NodeClass, energy: f64, het: &HeterogeneityParams, cfg: &ProtocolConfig) -> f64 {
    let advanced = 1.0 + het.a;
    let sup = 1.0 + het.b;
    match cfg.kind {
        ProtocolKind::Edeec => match class {
            NodeClass::Normal => 1.0,
            NodeClass::Advanced => advanced,
            NodeClass::Super => sup,
        },
        ProtocolKind::Eddeec => {
            if energy > absolute_threshold(cfg.z, het.e0) {
                match class {
                    NodeClass::Normal => 1.0,
                    NodeClass::Advanced => advanced,
                    NodeClass::Super => sup,
                }
            } else {
                cfg.sub_threshold_scale(het) * sup
            }
        }
        // Two-level DEEC: super nodes get the advanced weight.
        ProtocolKind::Deec => match class {
            NodeClass::Normal => 1.0,
            NodeClass::Advanced | NodeClass::Super => advanced,
        },
        // Two-level DDEEC: super nodes are advanced; below the threshold
        // normal and advanced share the advanced weight.
        ProtocolKind::Ddeec => {
            if energy > absolute_threshold(cfg.ddeec_z, het.e0) {
                match class {
                    NodeClass::Normal => 1.0,
                    NodeClass::Advanced | NodeClass::Super => advanced,
                }
            } else {
                advanced
            }
        }
    }
}

/// Probability that `node` volunteers as cluster head this round, clamped
/// to `(0, P_MAX]`.
pub fn ch_probability(
    node: &NodeState,
    avg_energy: f64,
    het: &HeterogeneityParams,
    cfg: &ProtocolConfig,
) -> Result<f64> {
    if !node.is_alive() {
        return Err(Error::Election(format!("node {} is dead", node.id)));
    }
    if avg_energy.is_nan() || avg_energy <= 0.0 {
        return Err(Error::Election(format!("average energy must be > 0, got {avg_energy}")));
    }
    let energy = node.residual_energy();
    let weight = class_weight(node.class(), energy, het, cfg);
    let p = cfg.p_opt * weight * energy / (het.energy_factor() * avg_energy);
    Ok(p.clamp(f64::MIN_POSITIVE, P_MAX))
}

/// Integer epoch length `round(1/p)` of the rotation, at least 1.
pub fn epoch_length(p: f64) -> Round {
    ((1.0 / p).round() as Round).max(1)
}

/// Election threshold for a node volunteering with probability `p` at round
/// `r`. Lies in `[p, 1]` and equals `p` at epoch starts.
pub fn election_threshold(p: f64, r: Round) -> f64 {
    assert!(p > 0.0 && p < 1.0, "election_threshold: p must lie in (0, 1), got {p}");
    let phase = f64::from(r % epoch_length(p));
    (p / (1.0 - p * phase)).min(1.0)
}
