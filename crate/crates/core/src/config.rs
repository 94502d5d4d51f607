//! Experiment description files.
//!
//! Experiments are TOML documents with `[network]`, `[radio]`,
//! `[heterogeneity]`, `[protocol]`, `[seeds]` and `[output]` sections.
//! Every key except the seeds has a default; unknown keys are rejected.
//! See `configs/paper-sec3.cfg` for an annotated example.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::engine::{NetworkConfig, DEFAULT_MAX_ROUNDS};
use crate::error::{Error, Result};
use crate::experiment::derive_seed;
use crate::model::{FieldGeometry, Point, RadioParams, RadioProfile};
use crate::protocols::{AvgEnergyMode, HeterogeneityParams, ProtocolConfig, ProtocolKind};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    network: Option<RawNetwork>,
    radio: Option<RawRadio>,
    heterogeneity: Option<RawHeterogeneity>,
    protocol: Option<RawProtocol>,
    seeds: Option<RawSeeds>,
    output: Option<RawOutput>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    nodes: Option<usize>,
    field_side_m: Option<f64>,
    bs_position: Option<[f64; 2]>,
    max_rounds: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRadio {
    profile: Option<String>,
    e_elec: Option<f64>,
    eps_fs: Option<f64>,
    eps_mp: Option<f64>,
    e_da: Option<f64>,
    d0_m: Option<f64>,
    message_bits: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHeterogeneity {
    m: Option<f64>,
    m0: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    e0_j: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProtocol {
    kinds: Option<Vec<String>>,
    p_opt: Option<f64>,
    z: Option<f64>,
    c: Option<f64>,
    ddeec_z: Option<f64>,
    avg_energy: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeeds {
    base: Option<u64>,
    count: Option<usize>,
    list: Option<Vec<u64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    emit: Option<Vec<String>>,
}

/// Explicit radio constants that override the selected profile.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RadioOverrides {
    pub e_elec: Option<f64>,
    pub eps_fs: Option<f64>,
    pub eps_mp: Option<f64>,
    pub e_da: Option<f64>,
    pub d0: Option<f64>,
    pub message_bits: Option<u32>,
}

impl RadioOverrides {
    pub fn apply(&self, base: RadioParams) -> RadioParams {
        RadioParams {
            e_elec: self.e_elec.unwrap_or(base.e_elec),
            eps_fs: self.eps_fs.unwrap_or(base.eps_fs),
            eps_mp: self.eps_mp.unwrap_or(base.eps_mp),
            e_da: self.e_da.unwrap_or(base.e_da),
            d0: self.d0.unwrap_or(base.d0),
            message_bits: self.message_bits.unwrap_or(base.message_bits),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedSpec {
    List(Vec<u64>),
    /// Replication `i` uses `derive_seed(base, i)`.
    Derived { base: u64, count: usize },
}

impl SeedSpec {
    pub fn seeds(&self) -> Vec<u64> {
        match self {
            SeedSpec::List(list) => list.clone(),
            SeedSpec::Derived { base, count } => (0..*count as u64).map(|i| derive_seed(*base, i)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SeedSpec::List(list) => list.len(),
            SeedSpec::Derived { count, .. } => *count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmitFlags {
    pub csv: bool,
    pub svg: bool,
    pub summary: bool,
}

impl Default for EmitFlags {
    fn default() -> Self {
        Self {
            csv: true,
            svg: true,
            summary: true,
        }
    }
}

impl EmitFlags {
    pub fn parse<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        let mut flags = Self {
            csv: false,
            svg: false,
            summary: false,
        };
        for item in items {
            match item.as_ref().trim() {
                "csv" => flags.csv = true,
                "svg" => flags.svg = true,
                "summary" => flags.summary = true,
                other => {
                    return Err(Error::validation(
                        "output.emit",
                        format!("unknown artifact `{other}` (expected csv, svg or summary)"),
                    ))
                }
            }
        }
        Ok(flags)
    }
}

/// A protocol x seed experiment matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    /// Template for every run; `protocol` and `seed` are replaced per run.
    pub network: NetworkConfig,
    pub profile: RadioProfile,
    pub radio_overrides: RadioOverrides,
    pub protocols: Vec<ProtocolConfig>,
    pub seeds: SeedSpec,
    pub output_dir: PathBuf,
    pub emit: EmitFlags,
}

/// Command-line overrides applied on top of a spec file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output_dir: Option<PathBuf>,
    pub seed_count: Option<usize>,
    pub protocols: Option<Vec<ProtocolKind>>,
    pub profile: Option<RadioProfile>,
    pub emit: Option<EmitFlags>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.protocols.is_empty() {
            return Err(Error::validation("protocol.kinds", "at least one protocol is required"));
        }
        if self.seeds.is_empty() {
            return Err(Error::validation("seeds", "at least one seed is required"));
        }
        self.network.validate()?;
        for p in &self.protocols {
            p.validate()?;
        }
        Ok(())
    }

    /// Configuration of the run for `protocol` and `seed`.
    pub fn run_config(&self, protocol: &ProtocolConfig, seed: u64) -> NetworkConfig {
        NetworkConfig {
            protocol: *protocol,
            seed,
            ..self.network
        }
    }

    pub fn apply_overrides(&mut self, overrides: &Overrides) -> Result<()> {
        if let Some(dir) = &overrides.output_dir {
            self.output_dir = dir.clone();
        }
        if let Some(count) = overrides.seed_count {
            match &mut self.seeds {
                SeedSpec::Derived { count: c, .. } => *c = count,
                SeedSpec::List(_) => {
                    return Err(Error::validation(
                        "seeds",
                        "--seed-count needs `seeds.base`, not an explicit `seeds.list`",
                    ))
                }
            }
        }
        if let Some(kinds) = &overrides.protocols {
            let template = self
                .protocols
                .first()
                .copied()
                .unwrap_or_else(|| ProtocolConfig::new(ProtocolKind::Eddeec));
            self.protocols = kinds.iter().map(|&k| template.with_kind(k)).collect();
        }
        if let Some(profile) = overrides.profile {
            self.profile = profile;
            self.network.radio = self.radio_overrides.apply(profile.params());
        }
        if let Some(emit) = overrides.emit {
            self.emit = emit;
        }
        self.validate()
    }
}

fn parse_list<T>(items: &[String]) -> Result<Vec<T>>
where
    T: std::str::FromStr<Err = Error>,
{
    items.iter().map(|s| s.parse()).collect()
}

/// Parses an experiment from TOML text. `origin` is used in error messages.
pub fn parse_spec(text: &str, origin: &Path) -> Result<ExperimentSpec> {
    let raw: RawSpec = toml::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_path_buf(),
        message: e.to_string().trim_end().to_string(),
    })?;

    let net = raw.network.unwrap_or_default();
    let radio = raw.radio.unwrap_or_default();
    let het = raw.heterogeneity.unwrap_or_default();
    let proto = raw.protocol.unwrap_or_default();
    let output = raw.output.unwrap_or_default();

    let side = net.field_side_m.unwrap_or(100.0);
    let mut geometry = FieldGeometry::square(side);
    if let Some([x, y]) = net.bs_position {
        geometry.bs_position = Point::new(x, y);
    }

    let profile = match radio.profile.as_deref() {
        Some(p) => p.parse()?,
        None => RadioProfile::Table1Verbatim,
    };
    let radio_overrides = RadioOverrides {
        e_elec: radio.e_elec,
        eps_fs: radio.eps_fs,
        eps_mp: radio.eps_mp,
        e_da: radio.e_da,
        d0: radio.d0_m,
        message_bits: radio.message_bits,
    };

    let defaults = HeterogeneityParams::default();
    let het = HeterogeneityParams {
        m: het.m.unwrap_or(defaults.m),
        m0: het.m0.unwrap_or(defaults.m0),
        a: het.a.unwrap_or(defaults.a),
        b: het.b.unwrap_or(defaults.b),
        e0: het.e0_j.unwrap_or(defaults.e0),
    };

    let avg_energy_mode = match proto.avg_energy.as_deref() {
        None | Some("estimated") => AvgEnergyMode::Estimated,
        Some("true") => AvgEnergyMode::True,
        Some(other) => {
            return Err(Error::validation(
                "protocol.avg_energy",
                format!("unknown mode `{other}` (expected estimated or true)"),
            ))
        }
    };
    let base = ProtocolConfig::new(ProtocolKind::Eddeec);
    let template = ProtocolConfig {
        p_opt: proto.p_opt.unwrap_or(base.p_opt),
        z: proto.z.unwrap_or(base.z),
        c: proto.c.or(base.c),
        ddeec_z: proto.ddeec_z.unwrap_or(base.ddeec_z),
        avg_energy_mode,
        ..base
    };
    let kinds: Vec<ProtocolKind> = match &proto.kinds {
        Some(list) => parse_list(list)?,
        None => ProtocolKind::ALL.to_vec(),
    };
    let protocols = kinds.into_iter().map(|k| template.with_kind(k)).collect();

    let seeds = match raw.seeds {
        None => return Err(Error::validation("seeds", "section is required (give `base` + `count` or `list`)")),
        Some(RawSeeds { list: Some(list), base: None, count: None }) => SeedSpec::List(list),
        Some(RawSeeds { list: None, base: Some(base), count }) => SeedSpec::Derived {
            base,
            count: count.unwrap_or(1),
        },
        Some(RawSeeds { list: Some(_), .. }) => {
            return Err(Error::validation("seeds", "`list` cannot be combined with `base`/`count`"))
        }
        Some(RawSeeds { base: None, .. }) => {
            return Err(Error::validation("seeds.base", "required unless `seeds.list` is given"))
        }
    };

    let emit = match &output.emit {
        Some(items) => EmitFlags::parse(items)?,
        None => EmitFlags::default(),
    };

    let spec = ExperimentSpec {
        network: NetworkConfig {
            n: net.nodes.unwrap_or(100),
            geometry,
            radio: radio_overrides.apply(profile.params()),
            het,
            protocol: template,
            seed: 0,
            max_rounds: net.max_rounds.unwrap_or(DEFAULT_MAX_ROUNDS),
        },
        profile,
        radio_overrides,
        protocols,
        seeds,
        output_dir: output.dir.unwrap_or_else(|| PathBuf::from("out")),
        emit,
    };
    spec.validate()?;
    Ok(spec)
}

pub fn load_spec(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io("reading experiment file", path, e))?;
    parse_spec(&text, path)
}
