//! Round-based simulator for energy-aware cluster-head election in
//! heterogeneous wireless sensor networks.
//!
//! Four members of the DEEC family are implemented: DEEC, DDEEC, EDEEC and
//! EDDEEC. A run places nodes of three energy classes (normal, advanced,
//! super) in a square field, elects cluster heads each round with a
//! rotating probabilistic threshold, forms nearest-head clusters and
//! charges every transmission against the first-order radio model until
//! the whole network is dead.
//!
//! ```
//! use eddeec::{engine, NetworkConfig, ProtocolKind, RadioParams};
//!
//! let mut cfg = NetworkConfig::three_level(ProtocolKind::Eddeec, RadioParams::leach_standard(), 7);
//! cfg.max_rounds = 50;
//! let result = engine::run(cfg).unwrap();
//! assert_eq!(result.series.len(), 50);
//! ```

pub mod config;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod model;
pub mod plot;
pub mod protocols;

pub use config::{load_spec, parse_spec, EmitFlags, ExperimentSpec, Overrides, SeedSpec};
pub use engine::{run, Link, Network, NetworkConfig, RoundOutcome};
pub use error::{Error, Result};
pub use metrics::{BatchSummary, RoundRecord, SimResult, Summary};
pub use model::{FieldGeometry, NodeClass, NodeState, Point, RadioParams, RadioProfile, Round};
pub use protocols::{AvgEnergyMode, HeterogeneityParams, ProtocolConfig, ProtocolKind};
