//! Acceptance suite for the three-level reproduction scenario.
//!
//! Runs every acceptance criterion against `configs/paper-sec3.cfg`, prints
//! one PASS/FAIL line per criterion and exits non-zero if any fails.
//! Thresholds are fixed here and nowhere else.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eddeec::experiment::{render_artifacts, run_matrix};
use eddeec::metrics::{summarize_batch, BatchSummary};
use eddeec::model::{RadioProfile, Round};
use eddeec::protocols::{absolute_threshold, ch_probability, election_threshold, expected_distances};
use eddeec::{load_spec, ExperimentSpec, Network, NodeClass, NodeState, Point, ProtocolConfig, ProtocolKind, SimResult};

/// Mean first-dead advantage of EDDEEC over DEEC.
const STABILITY_MARGIN: f64 = 0.30;
/// EDEEC and EDDEEC lifetimes must agree within this fraction.
const LIFETIME_AGREEMENT: f64 = 0.05;
/// EDEEC and EDDEEC lifetime advantage over DEEC.
const LIFETIME_MARGIN: f64 = 0.30;
/// Allowed relative deviation of mean lifetimes from the reported values.
const LIFETIME_MAGNITUDE: f64 = 0.50;
const LEDGER_REL_TOL: f64 = 1e-9;
const THRESHOLD_TOL: f64 = 1e-12;
const EPOCH_RATE_TOL: f64 = 0.10;
const RUNTIME_BUDGET: Duration = Duration::from_secs(120);
const MIN_SEEDS: usize = 20;
const SAMPLES: usize = 1000;

/// Reported last-death rounds for DEEC, DDEEC, EDEEC, EDDEEC.
const REPORTED_ALL_DEAD: [(ProtocolKind, f64); 4] = [
    (ProtocolKind::Deec, 5536.0),
    (ProtocolKind::Ddeec, 5673.0),
    (ProtocolKind::Edeec, 8638.0),
    (ProtocolKind::Eddeec, 8638.0),
];

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn spec_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/paper-sec3.cfg")
}

fn batch(batches: &[BatchSummary], kind: ProtocolKind) -> &BatchSummary {
    batches.iter().find(|b| b.protocol == kind).expect("protocol in batch")
}

fn ordering(spec: &ExperimentSpec, batches: &[BatchSummary], elapsed: Duration) -> Outcome {
    let fd = |k| batch(batches, k).first_dead.mean;
    let censored: usize = batches.iter().map(|b| b.first_dead.censored).sum();
    let (deec, ddeec, edeec, eddeec) = (
        fd(ProtocolKind::Deec),
        fd(ProtocolKind::Ddeec),
        fd(ProtocolKind::Edeec),
        fd(ProtocolKind::Eddeec),
    );
    let ordered = eddeec > edeec && edeec > ddeec && ddeec > deec;
    let margin = eddeec >= (1.0 + STABILITY_MARGIN) * deec;
    let seeds_ok = spec.seeds.len() >= MIN_SEEDS && censored == 0;
    let fast = elapsed < RUNTIME_BUDGET;
    Outcome {
        id: 1,
        name: "first-dead ordering EDDEEC > EDEEC > DDEEC > DEEC, EDDEEC >= 1.3 x DEEC",
        pass: ordered && margin && seeds_ok && fast,
        detail: format!(
            "mean first-dead over {} seeds: EDDEEC {eddeec:.1}, EDEEC {edeec:.1}, DDEEC {ddeec:.1}, DEEC {deec:.1}; \
             ordered={ordered}, EDDEEC/DEEC={:.3} (need >= {:.2}), matrix time {:.1?} (budget {:?})",
            spec.seeds.len(),
            eddeec / deec,
            1.0 + STABILITY_MARGIN,
            elapsed,
            RUNTIME_BUDGET
        ),
    }
}

fn lifetime(batches: &[BatchSummary]) -> Outcome {
    let ad = |k| batch(batches, k).all_dead.mean;
    let censored: usize = batches.iter().map(|b| b.all_dead.censored).sum();
    let (deec, edeec, eddeec) = (ad(ProtocolKind::Deec), ad(ProtocolKind::Edeec), ad(ProtocolKind::Eddeec));
    let agree = (edeec - eddeec).abs() <= LIFETIME_AGREEMENT * edeec.max(eddeec);
    let margin = edeec >= (1.0 + LIFETIME_MARGIN) * deec && eddeec >= (1.0 + LIFETIME_MARGIN) * deec;
    let magnitudes: Vec<String> = REPORTED_ALL_DEAD
        .iter()
        .map(|&(k, reported)| format!("{} {:.0}/{reported:.0}", k.label(), ad(k)))
        .collect();
    let in_range = REPORTED_ALL_DEAD
        .iter()
        .all(|&(k, reported)| (ad(k) - reported).abs() <= LIFETIME_MAGNITUDE * reported);
    Outcome {
        id: 2,
        name: "all-dead: EDEEC ~ EDDEEC within 5%, both >= 1.3 x DEEC",
        pass: agree && margin && censored == 0,
        detail: format!(
            "mean all-dead EDEEC {edeec:.1}, EDDEEC {eddeec:.1}, DEEC {deec:.1}; agree={agree}, \
             EDEEC/DEEC={:.3}, EDDEEC/DEEC={:.3} (need >= {:.2}); simulated/reported [{}] within +-50%: {in_range}",
            edeec / deec,
            eddeec / deec,
            1.0 + LIFETIME_MARGIN,
            magnitudes.join(", ")
        ),
    }
}

fn packets(batches: &[BatchSummary]) -> Outcome {
    let pk = |k| batch(batches, k).total_packets.mean;
    let (deec, edeec, eddeec) = (pk(ProtocolKind::Deec), pk(ProtocolKind::Edeec), pk(ProtocolKind::Eddeec));
    Outcome {
        id: 3,
        name: "packets to BS at network death: EDDEEC >= EDEEC >= DEEC",
        pass: eddeec >= edeec && edeec >= deec,
        detail: format!("seed-mean packets EDDEEC {eddeec:.1}, EDEEC {edeec:.1}, DEEC {deec:.1}"),
    }
}

fn random_node(rng: &mut ChaCha8Rng, energy: f64) -> NodeState {
    let class = NodeClass::ALL[rng.random_range(0..3)];
    NodeState::new(0, Point::new(0.0, 0.0), class, energy)
}

fn reduction_identity(spec: &ExperimentSpec) -> Outcome {
    let het = spec.network.het;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let eddeec = ProtocolConfig {
        z: 0.0,
        ..spec.network.protocol.with_kind(ProtocolKind::Eddeec)
    };
    let edeec = eddeec.with_kind(ProtocolKind::Edeec);
    let mut mismatches = 0;
    for _ in 0..SAMPLES {
        let energy = rng.random_range(1e-6..het.initial_energy(NodeClass::Super));
        let node = random_node(&mut rng, energy);
        let avg = rng.random_range(1e-6..3.0);
        let a = ch_probability(&node, avg, &het, &eddeec).unwrap();
        let b = ch_probability(&node, avg, &het, &edeec).unwrap();
        if a.to_bits() != b.to_bits() {
            mismatches += 1;
        }
    }
    Outcome {
        id: 4,
        name: "EDDEEC with z = 0 equals EDEEC exactly",
        pass: mismatches == 0,
        detail: format!("{mismatches} of {SAMPLES} random (node, energy, avg) samples differ (tolerance 0)"),
    }
}

fn sub_threshold_equality(spec: &ExperimentSpec) -> Outcome {
    let het = spec.network.het;
    let cfg = spec.network.protocol.with_kind(ProtocolKind::Eddeec);
    let t_abs = absolute_threshold(cfg.z, het.e0);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mismatches = 0;
    for _ in 0..SAMPLES {
        let e = rng.random_range(1e-9..=t_abs);
        let avg = rng.random_range(1e-3..3.0);
        let values: Vec<u64> = NodeClass::ALL
            .iter()
            .map(|&class| {
                let node = NodeState::new(0, Point::new(0.0, 0.0), class, e);
                ch_probability(&node, avg, &het, &cfg).unwrap().to_bits()
            })
            .collect();
        if values.iter().any(|&v| v != values[0]) {
            mismatches += 1;
        }
    }
    Outcome {
        id: 5,
        name: "EDDEEC sub-threshold probability is class-independent",
        pass: mismatches == 0 && t_abs == 0.35,
        detail: format!("T_absolute = {t_abs} J; {mismatches} of {SAMPLES} energies give class-dependent values"),
    }
}

fn ledger_closure(spec: &ExperimentSpec) -> Outcome {
    let seed = spec.seeds.seeds()[0];
    let cfg = spec.run_config(&spec.network.protocol.with_kind(ProtocolKind::Eddeec), seed);
    let mut net = Network::initialize(cfg).unwrap();
    let mut worst: f64 = 0.0;
    let mut rounds = 0;
    while !net.is_finished() {
        let before = net.total_residual();
        let out = net.step().unwrap();
        let decrease = before - out.total_residual_after;
        let err = (out.charged_j - (decrease + out.overdraft_j)).abs() / out.charged_j;
        worst = worst.max(err);
        rounds += 1;
    }
    Outcome {
        id: 6,
        name: "energy ledger closes every round",
        pass: worst <= LEDGER_REL_TOL && net.alive_count() == 0,
        detail: format!("{rounds} rounds, worst relative error {worst:.3e} (tolerance {LEDGER_REL_TOL:.0e})"),
    }
}

fn determinism(spec: &ExperimentSpec, results: &[SimResult]) -> Outcome {
    let again = run_matrix(spec).unwrap();
    let a = render_artifacts(spec, results).unwrap();
    let b = render_artifacts(spec, &again).unwrap();
    let files: Vec<&str> = a
        .iter()
        .filter(|f| f.name.ends_with(".csv") || f.name.ends_with(".svg"))
        .map(|f| f.name.as_str())
        .collect();
    let identical = a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| x == y);
    Outcome {
        id: 7,
        name: "repeated executions give byte-identical CSV and SVG artifacts",
        pass: identical && files.iter().filter(|f| f.ends_with(".svg")).count() == 2,
        detail: format!("compared {} files: {}", files.len(), files.join(", ")),
    }
}

fn closed_forms(spec: &ExperimentSpec) -> Outcome {
    let t_abs = absolute_threshold(0.7, 0.5);
    let (_, d_bs) = expected_distances(100.0, 1);
    let e_total = spec.network.het.total_energy(spec.network.n);
    let last_epoch_round: Round = 9;
    let threshold = election_threshold(0.1, last_epoch_round);
    let pass = t_abs == 0.35 && d_bs == 38.25 && e_total == 214.0 && (threshold - 1.0).abs() <= THRESHOLD_TOL;
    Outcome {
        id: 8,
        name: "closed forms: T_abs, d_toBS, E_total, epoch-end threshold",
        pass,
        detail: format!(
            "T_abs(0.7, 0.5) = {t_abs}, d_toBS(100) = {d_bs}, E_total = {e_total}, T(0.1, r=9) = {threshold}"
        ),
    }
}

fn epoch_rotation(spec: &ExperimentSpec) -> Outcome {
    let cfg = spec.run_config(&spec.network.protocol, spec.seeds.seeds()[0]);
    let mut net = Network::initialize(cfg).unwrap();
    let rounds: Round = 1000;
    let mut elections = 0usize;
    for r in 0..rounds {
        elections += net.elect_with(r, |_| Ok(0.1)).unwrap().len();
    }
    let node_rounds = rounds as usize * net.nodes().len();
    let per_node_period = node_rounds as f64 / elections as f64;
    Outcome {
        id: 9,
        name: "static p = 0.1 elects each node once per 10 rounds",
        pass: (per_node_period - 10.0).abs() <= EPOCH_RATE_TOL * 10.0,
        detail: format!("{elections} elections over {node_rounds} node-rounds: one per {per_node_period:.3} rounds"),
    }
}

fn main() {
    let spec = load_spec(&spec_path()).expect("bundled experiment file");
    println!(
        "acceptance: {} ({} profile, {} seeds, protocols {})",
        spec_path().display(),
        spec.profile,
        spec.seeds.len(),
        spec.protocols.iter().map(|p| p.kind.label()).collect::<Vec<_>>().join("/")
    );
    assert_eq!(spec.profile, RadioProfile::LeachStandard);

    let start = Instant::now();
    let results = run_matrix(&spec).expect("matrix run");
    let elapsed = start.elapsed();
    let batches = summarize_batch(&results);

    let outcomes = [
        ordering(&spec, &batches, elapsed),
        lifetime(&batches),
        packets(&batches),
        reduction_identity(&spec),
        sub_threshold_equality(&spec),
        ledger_closure(&spec),
        determinism(&spec, &results),
        closed_forms(&spec),
        epoch_rotation(&spec),
    ];

    let mut failed = 0;
    for o in &outcomes {
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("[{status}] AC{} {}\n        {}", o.id, o.name, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
