//! Round loop: threshold election, nearest-CH clustering and one data
//! delivery per round, with per-node energy accounting.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metrics::{summarize, RoundRecord, SimResult};
use crate::model::{
    aggregation_energy, distance, rx_energy, tx_energy, FieldGeometry, NodeClass, NodeState, Point,
    RadioParams, Round,
};
use crate::protocols::{
    ch_probability, election_threshold, epoch_length, AvgEnergyMode, EnergyEstimate,
    HeterogeneityParams, ProtocolConfig, ProtocolKind, AVG_ENERGY_FLOOR,
};

pub const DEFAULT_MAX_ROUNDS: Round = 10_000;

/// Everything needed to reproduce one simulation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    pub n: usize,
    pub geometry: FieldGeometry,
    pub radio: RadioParams,
    pub het: HeterogeneityParams,
    pub protocol: ProtocolConfig,
    pub seed: u64,
    pub max_rounds: Round,
}

impl NetworkConfig {
    /// The three-class scenario: 100 nodes in a 100 m square with the base
    /// station at the center.
    pub fn three_level(kind: ProtocolKind, radio: RadioParams, seed: u64) -> Self {
        Self {
            n: 100,
            geometry: FieldGeometry::square(100.0),
            radio,
            het: HeterogeneityParams::default(),
            protocol: ProtocolConfig::new(kind),
            seed,
            max_rounds: DEFAULT_MAX_ROUNDS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::validation("network.nodes", "must be >= 1"));
        }
        if self.max_rounds == 0 {
            return Err(Error::validation("network.max_rounds", "must be >= 1"));
        }
        self.geometry.validate()?;
        self.radio.validate()?;
        self.het.validate()?;
        self.protocol.validate()
    }
}

/// Where a non-CH node sends its packet this round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Link {
    ClusterHead(usize),
    DirectToBs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutcome {
    pub round: Round,
    pub ch_ids: Vec<usize>,
    /// Alive non-CH node id -> destination.
    pub assignment: BTreeMap<usize, Link>,
    pub packets_to_bs: u64,
    pub packets_to_ch: u64,
    pub alive_after: usize,
    pub total_residual_after: f64,
    /// Sum of every tx/rx/aggregation cost charged this round, J.
    pub charged_j: f64,
    /// Part of `charged_j` absorbed by clamping dying nodes at zero, J.
    pub overdraft_j: f64,
}

/// State of one simulation run.
#[derive(Debug, Clone)]
pub struct Network {
    config: NetworkConfig,
    nodes: Vec<NodeState>,
    estimate: EnergyEstimate,
    rng: ChaCha8Rng,
    round: Round,
}

impl Network {
    /// Places nodes uniformly at random, then assigns classes by a shuffled
    /// quota. Both draws come from the run's single PRNG stream.
    pub fn initialize(config: NetworkConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let side = config.geometry.side_m;
        let positions: Vec<Point> = (0..config.n)
            .map(|_| {
                let x = rng.random::<f64>() * side;
                let y = rng.random::<f64>() * side;
                Point::new(x, y)
            })
            .collect();

        let [normal, advanced, sup] = config.het.class_counts(config.n);
        let mut classes = Vec::with_capacity(config.n);
        classes.extend(std::iter::repeat_n(NodeClass::Normal, normal));
        classes.extend(std::iter::repeat_n(NodeClass::Advanced, advanced));
        classes.extend(std::iter::repeat_n(NodeClass::Super, sup));
        classes.shuffle(&mut rng);

        let nodes: Vec<NodeState> = positions
            .into_iter()
            .zip(classes)
            .enumerate()
            .map(|(id, (pos, class))| NodeState::new(id, pos, class, config.het.initial_energy(class)))
            .collect();

        // The estimator uses the nominal budget N e0 (1 + m(a + m0 b)), the
        // same normalization as the probability denominator. It differs from
        // the deployed sum of class energies (214 J vs 166 J for 20/32/48).
        let e_total = config.het.total_energy(config.n);
        let estimate = EnergyEstimate::new(config.n, e_total, &config.geometry, &config.radio);
        Ok(Self {
            config,
            nodes,
            estimate,
            rng,
            round: 0,
        })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    pub fn nodes_mut(&mut self) -> &mut [NodeState] {
        &mut self.nodes
    }

    pub fn estimate(&self) -> &EnergyEstimate {
        &self.estimate
    }

    /// Next round to be simulated.
    pub fn round(&self) -> Round {
        self.round
    }

    pub fn alive_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_alive()).count()
    }

    pub fn total_residual(&self) -> f64 {
        self.nodes.iter().map(NodeState::residual_energy).sum()
    }

    /// Average node energy fed to the probability denominator at round `r`.
    pub fn average_energy(&self, r: Round) -> f64 {
        match self.config.protocol.avg_energy_mode {
            AvgEnergyMode::Estimated => self.estimate.avg_energy_at(r),
            AvgEnergyMode::True => (self.total_residual() / self.config.n as f64).max(AVG_ENERGY_FLOOR),
        }
    }

    /// Runs the threshold election for round `r` with the configured
    /// protocol's probabilities.
    pub fn elect_cluster_heads(&mut self, r: Round) -> Result<Vec<usize>> {
        let avg = self.average_energy(r);
        let het = self.config.het;
        let protocol = self.config.protocol;
        self.elect_with(r, |node| ch_probability(node, avg, &het, &protocol))
    }

    /// Threshold election with a caller-supplied probability per node.
    ///
    /// Alive, eligible nodes draw in ascending id order; an elected node
    /// sits out the next `round(1/p)` rounds.
    pub fn elect_with<F>(&mut self, r: Round, mut probability: F) -> Result<Vec<usize>>
    where
        F: FnMut(&NodeState) -> Result<f64>,
    {
        let mut elected = Vec::new();
        for node in self.nodes.iter_mut() {
            if !node.is_eligible(r) {
                continue;
            }
            let p = probability(node)?;
            let u: f64 = self.rng.random();
            if u < election_threshold(p, r) {
                node.ineligible_until = r.saturating_add(epoch_length(p));
                elected.push(node.id);
            }
        }
        Ok(elected)
    }

    /// Assigns every alive non-CH node to its nearest cluster head (lower id
    /// wins ties), or straight to the base station when there is none.
    pub fn form_clusters(&self, ch_ids: &[usize]) -> BTreeMap<usize, Link> {
        let mut heads: Vec<usize> = ch_ids.to_vec();
        heads.sort_unstable();
        let mut assignment = BTreeMap::new();
        for node in self.nodes.iter().filter(|n| n.is_alive()) {
            if heads.binary_search(&node.id).is_ok() {
                continue;
            }
            let mut best: Option<(f64, usize)> = None;
            for &ch in &heads {
                let d = distance(node.position, self.nodes[ch].position);
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, ch));
                }
            }
            let link = best.map_or(Link::DirectToBs, |(_, ch)| Link::ClusterHead(ch));
            assignment.insert(node.id, link);
        }
        assignment
    }

    /// Data delivery for round `r`: members send to their CH, each CH
    /// receives, aggregates (members + its own signal) and forwards one
    /// packet to the base station. Each node's charges for the round are
    /// applied together, so a node that runs dry still finishes the round.
    pub fn steady_state(&mut self, r: Round, ch_ids: &[usize], assignment: &BTreeMap<usize, Link>) -> RoundOutcome {
        let radio = self.config.radio;
        let bits = radio.message_bits;
        let bs = self.config.geometry.bs_position;
        let mut cost = vec![0.0_f64; self.nodes.len()];
        let mut members = vec![0_u32; self.nodes.len()];
        let mut packets_to_bs = 0_u64;
        let mut packets_to_ch = 0_u64;

        for (&id, link) in assignment {
            let pos = self.nodes[id].position;
            match *link {
                Link::ClusterHead(ch) => {
                    cost[id] += tx_energy(bits, distance(pos, self.nodes[ch].position), &radio);
                    members[ch] += 1;
                    packets_to_ch += 1;
                }
                Link::DirectToBs => {
                    cost[id] += tx_energy(bits, distance(pos, bs), &radio);
                    packets_to_bs += 1;
                }
            }
        }
        for &ch in ch_ids {
            let count = members[ch];
            cost[ch] += f64::from(count) * rx_energy(bits, &radio)
                + aggregation_energy(bits, count + 1, &radio)
                + tx_energy(bits, distance(self.nodes[ch].position, bs), &radio);
            packets_to_bs += 1;
        }

        let mut charged_j = 0.0;
        let mut overdraft_j = 0.0;
        for (node, &c) in self.nodes.iter_mut().zip(&cost) {
            if c > 0.0 {
                charged_j += c;
                overdraft_j += node.deduct(c);
            }
        }

        let mut ch_sorted = ch_ids.to_vec();
        ch_sorted.sort_unstable();
        RoundOutcome {
            round: r,
            ch_ids: ch_sorted,
            assignment: assignment.clone(),
            packets_to_bs,
            packets_to_ch,
            alive_after: self.alive_count(),
            total_residual_after: self.total_residual(),
            charged_j,
            overdraft_j,
        }
    }

    /// Simulates the next round.
    pub fn step(&mut self) -> Result<RoundOutcome> {
        let r = self.round;
        let ch_ids = self.elect_cluster_heads(r)?;
        let assignment = self.form_clusters(&ch_ids);
        let outcome = self.steady_state(r, &ch_ids, &assignment);
        self.round += 1;
        Ok(outcome)
    }

    pub fn is_finished(&self) -> bool {
        self.round >= self.config.max_rounds || self.alive_count() == 0
    }
}

/// Simulates until every node is dead or `max_rounds` is reached.
pub fn run(config: NetworkConfig) -> Result<SimResult> {
    let mut network = Network::initialize(config)?;
    let mut series = Vec::new();
    let mut packets_bs = 0_u64;
    let mut packets_ch = 0_u64;
    while !network.is_finished() {
        let outcome = network.step()?;
        packets_bs += outcome.packets_to_bs;
        packets_ch += outcome.packets_to_ch;
        series.push(RoundRecord {
            round: outcome.round,
            alive: outcome.alive_after,
            packets_bs,
            packets_ch,
            residual_j: outcome.total_residual_after,
            ch_count: outcome.ch_ids.len(),
        });
    }
    let summary = summarize(config.n, &series);
    Ok(SimResult {
        protocol: config.protocol.kind,
        seed: config.seed,
        n: config.n,
        series,
        summary,
    })
}
