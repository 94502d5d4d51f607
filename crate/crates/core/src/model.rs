//! Physical model shared by every protocol: node state, field geometry and
//! the first-order radio energy costs.

use std::fmt;
use std::str::FromStr;


use crate::error::{Error, Result};

/// Round index. Round 0 is the first simulated round.
pub type Round = u32;

/// A position in the field, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Euclidean distance between two points.
pub fn distance(p: Point, q: Point) -> f64 {
    (p.x - q.x).hypot(p.y - q.y)
}

/// Heterogeneity class of a node, fixed at deployment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeClass {
    Normal,
    Advanced,
    Super,
}

impl NodeClass {
    pub const ALL: [NodeClass; 3] = [NodeClass::Normal, NodeClass::Advanced, NodeClass::Super];

    pub fn as_str(self) -> &'static str {
        match self {
            NodeClass::Normal => "normal",
            NodeClass::Advanced => "advanced",
            NodeClass::Super => "super",
        }
    }
}

impl fmt::Display for NodeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One sensor node.
///
/// `residual_energy` only ever decreases (through [`NodeState::deduct`]) and
/// the node is alive exactly while it is strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeState {
    pub id: usize,
    pub position: Point,
    class: NodeClass,
    initial_energy: f64,
    residual_energy: f64,
    alive: bool,
    /// First round at which the node may again be elected cluster head.
    pub ineligible_until: Round,
}

impl NodeState {
    pub fn new(id: usize, position: Point, class: NodeClass, initial_energy: f64) -> Self {
        assert!(initial_energy >= 0.0, "initial energy must be non-negative");
        Self {
            id,
            position,
            class,
            initial_energy,
            residual_energy: initial_energy,
            alive: initial_energy > 0.0,
            ineligible_until: 0,
        }
    }

    pub fn class(&self) -> NodeClass {
        self.class
    }

    pub fn initial_energy(&self) -> f64 {
        self.initial_energy
    }

    pub fn residual_energy(&self) -> f64 {
        self.residual_energy
    }

    pub fn is_alive(&self) -> bool {
        self.alive
    }

    pub fn is_eligible(&self, round: Round) -> bool {
        self.alive && round >= self.ineligible_until
    }

    /// Charges `cost` joules. A cost larger than the remaining energy still
    /// completes; the residual is clamped to zero and the node dies.
    ///
    /// Returns the overdraft, i.e. the part of `cost` that the clamp absorbed.
    pub fn deduct(&mut self, cost: f64) -> f64 {
        assert!(cost >= 0.0, "energy cost must be non-negative, got {cost}");
        let remaining = self.residual_energy - cost;
        if remaining <= 0.0 {
            self.residual_energy = 0.0;
            self.alive = false;
            -remaining
        } else {
            self.residual_energy = remaining;
            0.0
        }
    }
}

/// Named radio constant sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadioProfile {
    /// Constants exactly as printed in the parameter table, including
    /// `eps_fs = 10 nJ/bit/m^2`.
    Table1Verbatim,
    /// Same constants with the free-space amplifier in pJ
    /// (`eps_fs = 10 pJ/bit/m^2`), as used throughout the LEACH lineage.
    LeachStandard,
}

impl RadioProfile {
    pub fn as_str(self) -> &'static str {
        match self {
            RadioProfile::Table1Verbatim => "table1-verbatim",
            RadioProfile::LeachStandard => "leach-standard",
        }
    }

    pub fn params(self) -> RadioParams {
        match self {
            RadioProfile::Table1Verbatim => RadioParams::table1_verbatim(),
            RadioProfile::LeachStandard => RadioParams::leach_standard(),
        }
    }
}

impl FromStr for RadioProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1-verbatim" => Ok(RadioProfile::Table1Verbatim),
            "leach-standard" => Ok(RadioProfile::LeachStandard),
            other => Err(Error::validation(
                "radio.profile",
                format!("unknown profile `{other}` (expected table1-verbatim or leach-standard)"),
            )),
        }
    }
}

impl fmt::Display for RadioProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// First-order radio energy constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    /// Electronics energy, J/bit.
    pub e_elec: f64,
    /// Free-space amplifier, J/bit/m^2.
    pub eps_fs: f64,
    /// Multipath amplifier, J/bit/m^4.
    pub eps_mp: f64,
    /// Data aggregation, J/bit/signal.
    pub e_da: f64,
    /// Free-space / multipath crossover distance, m. Configured, never derived
    /// from the amplifier ratio.
    pub d0: f64,
    /// Packet length L, bits.
    pub message_bits: u32,
}

impl RadioParams {
    pub fn table1_verbatim() -> Self {
        Self {
            e_elec: 50e-9,
            eps_fs: 10e-9,
            eps_mp: 0.0013e-12,
            e_da: 5e-9,
            d0: 70.0,
            message_bits: 4000,
        }
    }

    pub fn leach_standard() -> Self {
        Self {
            eps_fs: 10e-12,
            ..Self::table1_verbatim()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("radio.e_elec", self.e_elec),
            ("radio.eps_fs", self.eps_fs),
            ("radio.eps_mp", self.eps_mp),
            ("radio.e_da", self.e_da),
            ("radio.d0", self.d0),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::validation(name, format!("must be finite and > 0, got {value}")));
            }
        }
        if self.message_bits == 0 {
            return Err(Error::validation("radio.message_bits", "must be > 0"));
        }
        Ok(())
    }
}

impl Default for RadioParams {
    fn default() -> Self {
        Self::table1_verbatim()
    }
}

/// Square deployment field with a base station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldGeometry {
    /// Side length M of the square field, m.
    pub side_m: f64,
    pub bs_position: Point,
}

impl FieldGeometry {
    /// Square field with the base station at its center.
    pub fn square(side_m: f64) -> Self {
        Self {
            side_m,
            bs_position: Point::new(side_m / 2.0, side_m / 2.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.side_m.is_finite() && self.side_m > 0.0) {
            return Err(Error::validation("network.field_side_m", "must be finite and > 0"));
        }
        if !(self.bs_position.x.is_finite() && self.bs_position.y.is_finite()) {
            return Err(Error::validation("network.bs_position", "must be finite"));
        }
        Ok(())
    }
}

/// Energy to transmit `bits` over `d` meters: free-space `d^2` law below
/// `d0`, multipath `d^4` law at or above it.
pub fn tx_energy(bits: u32, d: f64, radio: &RadioParams) -> f64 {
    assert!(bits > 0, "tx_energy: bits must be > 0");
    assert!(d >= 0.0, "tx_energy: distance must be >= 0, got {d}");
    let bits = f64::from(bits);
    let amp = if d < radio.d0 {
        radio.eps_fs * d * d
    } else {
        radio.eps_mp * d.powi(4)
    };
    bits * radio.e_elec + bits * amp
}

/// Energy to receive `bits`.
pub fn rx_energy(bits: u32, radio: &RadioParams) -> f64 {
    assert!(bits > 0, "rx_energy: bits must be > 0");
    f64::from(bits) * radio.e_elec
}

/// Energy for a cluster head to fuse `signals` packets of `bits` each. A
/// cluster head always aggregates at least its own signal.
pub fn aggregation_energy(bits: u32, signals: u32, radio: &RadioParams) -> f64 {
    assert!(bits > 0, "aggregation_energy: bits must be > 0");
    assert!(signals >= 1, "aggregation_energy: a cluster head aggregates at least one signal");
    f64::from(bits) * radio.e_da * f64::from(signals)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_eq(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs())
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(Point::new(0.0, 0.0), Point::new(0.0, 0.0)), 0.0);
        assert_eq!(distance(Point::new(0.0, 0.0), Point::new(3.0, 4.0)), 5.0);
        assert_eq!(distance(Point::new(50.0, 50.0), Point::new(50.0, 120.0)), 70.0);
    }

    #[test]
    fn tx_energy_examples() {
        let radio = RadioParams::table1_verbatim();
        assert!(rel_eq(tx_energy(4000, 0.0, &radio), 2.0e-4, 1e-12));
        // 4000 * (50e-9 + 10e-9 * 900) = 4000 * 9.05e-6
        assert!(rel_eq(tx_energy(4000, 30.0, &radio), 0.0362, 1e-12));
        // 4000 * (50e-9 + 1.3e-15 * 1e8) = 4000 * 1.8e-7
        assert!(rel_eq(tx_energy(4000, 100.0, &radio), 7.2e-4, 1e-12));
    }

    #[test]
    fn tx_energy_branch_rule_at_d0() {
        // With the printed constants the two branches do not meet at d0;
        // d0 itself belongs to the multipath branch.
        let radio = RadioParams::table1_verbatim();
        let at = tx_energy(4000, radio.d0, &radio);
        let expected = 4000.0 * radio.e_elec + 4000.0 * radio.eps_mp * 70f64.powi(4);
        assert!(rel_eq(at, expected, 1e-12));
        let below = tx_energy(4000, radio.d0 - 1e-9, &radio);
        assert!(below > at * 10.0);
    }

    #[test]
    fn rx_and_aggregation_examples() {
        let radio = RadioParams::table1_verbatim();
        assert!(rel_eq(rx_energy(4000, &radio), 2.0e-4, 1e-12));
        assert_eq!(rx_energy(1, &radio), radio.e_elec);
        assert!(rel_eq(rx_energy(8000, &radio), 2.0 * rx_energy(4000, &radio), 1e-15));
        assert!(rel_eq(aggregation_energy(4000, 1, &radio), 2.0e-5, 1e-12));
        assert!(rel_eq(
            aggregation_energy(4000, 10, &radio),
            10.0 * aggregation_energy(4000, 1, &radio),
            1e-15
        ));
    }

    #[test]
    #[should_panic]
    fn aggregation_needs_a_signal() {
        aggregation_energy(4000, 0, &RadioParams::default());
    }

    #[test]
    #[should_panic]
    fn rx_rejects_zero_bits() {
        rx_energy(0, &RadioParams::default());
    }

    #[test]
    fn deduct_examples() {
        let mut node = NodeState::new(0, Point::new(0.0, 0.0), NodeClass::Normal, 0.5);
        assert_eq!(node.deduct(0.1), 0.0);
        assert!((node.residual_energy() - 0.4).abs() < 1e-15);
        assert!(node.is_alive());

        let mut node = NodeState::new(1, Point::new(0.0, 0.0), NodeClass::Normal, 0.05);
        assert_eq!(node.deduct(0.05), 0.0);
        assert_eq!(node.residual_energy(), 0.0);
        assert!(!node.is_alive());

        let mut node = NodeState::new(2, Point::new(0.0, 0.0), NodeClass::Normal, 0.01);
        let overdraft = node.deduct(0.5);
        assert_eq!(node.residual_energy(), 0.0);
        assert!(!node.is_alive());
        assert!((overdraft - 0.49).abs() < 1e-15);
    }

    #[test]
    fn profiles_differ_only_in_free_space_amp() {
        let a = RadioParams::table1_verbatim();
        let b = RadioParams::leach_standard();
        assert_eq!(a.eps_fs, 1000.0 * b.eps_fs);
        assert_eq!(RadioParams { eps_fs: a.eps_fs, ..b }, a);
        assert_eq!("leach-standard".parse::<RadioProfile>().unwrap(), RadioProfile::LeachStandard);
        assert!("bogus".parse::<RadioProfile>().is_err());
    }

    #[test]
    fn radio_validation_names_field() {
        let radio = RadioParams {
            eps_mp: 0.0,
            ..RadioParams::default()
        };
        let err = radio.validate().unwrap_err();
        assert!(err.to_string().contains("radio.eps_mp"));
    }
}
