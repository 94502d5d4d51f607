//! Lifetime metrics, cross-seed aggregation and CSV serialization.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::model::Round;
use crate::protocols::ProtocolKind;

pub const SERIES_HEADER: &str = "protocol,seed,round,alive,packets_bs,packets_ch,residual_j,ch_count";

/// Per-round observables. Packet counts are cumulative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord {
    pub round: Round,
    pub alive: usize,
    pub packets_bs: u64,
    pub packets_ch: u64,
    pub residual_j: f64,
    pub ch_count: usize,
}

/// Stability period, half-life and lifetime of one run, plus delivered
/// packets. `None` means the event did not happen within the simulated
/// rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Summary {
    pub first_dead: Option<Round>,
    pub half_dead: Option<Round>,
    pub all_dead: Option<Round>,
    pub total_packets_bs: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub protocol: ProtocolKind,
    pub seed: u64,
    pub n: usize,
    pub series: Vec<RoundRecord>,
    pub summary: Summary,
}

pub fn summarize(n: usize, series: &[RoundRecord]) -> Summary {
    let first = |pred: &dyn Fn(&RoundRecord) -> bool| series.iter().find(|r| pred(r)).map(|r| r.round);
    Summary {
        first_dead: first(&|r| r.alive < n),
        half_dead: first(&|r| 2 * r.alive <= n),
        all_dead: first(&|r| r.alive == 0),
        total_packets_bs: series.last().map_or(0, |r| r.packets_bs),
    }
}

/// Mean, extremes and population standard deviation of one metric across
/// seeds. Runs where the event was not reached are counted in `censored`
/// and left out of the statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub count: usize,
    pub censored: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub stddev: f64,
}

impl Stats {
    pub fn from_samples(samples: impl IntoIterator<Item = Option<f64>>) -> Self {
        let mut values = Vec::new();
        let mut censored = 0;
        for s in samples {
            match s {
                Some(v) => values.push(v),
                None => censored += 1,
            }
        }
        if values.is_empty() {
            return Self {
                count: 0,
                censored,
                mean: f64::NAN,
                min: f64::NAN,
                max: f64::NAN,
                stddev: f64::NAN,
            };
        }
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / count as f64;
        Self {
            count,
            censored,
            mean,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            stddev: var.sqrt(),
        }
    }
}

/// Per-protocol aggregates over seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchSummary {
    pub protocol: ProtocolKind,
    pub seeds: usize,
    pub first_dead: Stats,
    pub half_dead: Stats,
    pub all_dead: Stats,
    pub total_packets: Stats,
}

impl BatchSummary {
    /// Aggregates every result belonging to `protocol`.
    pub fn from_results(protocol: ProtocolKind, results: &[SimResult]) -> Self {
        let runs: Vec<&Summary> = results
            .iter()
            .filter(|r| r.protocol == protocol)
            .map(|r| &r.summary)
            .collect();
        let round = |f: fn(&Summary) -> Option<Round>| Stats::from_samples(runs.iter().map(|s| f(s).map(f64::from)));
        Self {
            protocol,
            seeds: runs.len(),
            first_dead: round(|s| s.first_dead),
            half_dead: round(|s| s.half_dead),
            all_dead: round(|s| s.all_dead),
            total_packets: Stats::from_samples(runs.iter().map(|s| Some(s.total_packets_bs as f64))),
        }
    }
}

/// Batch summaries for every protocol present, ordered by mean first-dead
/// round, longest stability period first.
pub fn summarize_batch(results: &[SimResult]) -> Vec<BatchSummary> {
    let mut protocols: Vec<ProtocolKind> = results.iter().map(|r| r.protocol).collect();
    protocols.sort();
    protocols.dedup();
    let mut out: Vec<BatchSummary> = protocols
        .into_iter()
        .map(|p| BatchSummary::from_results(p, results))
        .collect();
    out.sort_by(|a, b| {
        let key = |s: &BatchSummary| if s.first_dead.count == 0 { f64::INFINITY } else { s.first_dead.mean };
        key(b).total_cmp(&key(a)).then(a.protocol.cmp(&b.protocol))
    });
    out
}

/// Formats `x` in plain decimal notation with at most nine significant
/// digits, trailing zeros trimmed.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x == 0.0 { "0".into() } else { x.to_string() };
    }
    // Round to nine significant digits first; the exponent can shift
    // (9.9999999996 -> 10.0000000).
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let rounded: f64 = format!("{mantissa}e{exp}").parse().expect("float");
    let decimals = (8 - exp).max(0) as usize;
    let mut s = format!("{rounded:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// Renders the per-round series of `results`, sorted by (seed, round).
/// Every result must carry the same protocol.
pub fn render_series_csv(results: &[SimResult]) -> Result<String> {
    if let Some(first) = results.first() {
        if let Some(other) = results.iter().find(|r| r.protocol != first.protocol) {
            return Err(Error::validation(
                "results",
                format!("series CSV mixes protocols {} and {}", first.protocol, other.protocol),
            ));
        }
    }
    let mut ordered: Vec<&SimResult> = results.iter().collect();
    ordered.sort_by_key(|r| r.seed);
    let mut out = String::new();
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for result in ordered {
        for rec in &result.series {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                result.protocol.key(),
                result.seed,
                rec.round,
                rec.alive,
                rec.packets_bs,
                rec.packets_ch,
                format_sig9(rec.residual_j),
                rec.ch_count
            );
        }
    }
    Ok(out)
}

pub fn emit_series_csv<W: Write>(results: &[SimResult], mut dest: W) -> Result<()> {
    let csv = render_series_csv(results)?;
    dest.write_all(csv.as_bytes())
        .and_then(|_| dest.flush())
        .map_err(|e| Error::io("writing series CSV", "<writer>", e))
}

/// One parsed row of a series CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub protocol: ProtocolKind,
    pub seed: u64,
    pub record: RoundRecord,
}

pub fn parse_series_csv(text: &str) -> Result<Vec<SeriesRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == SERIES_HEADER => {}
        Some((_, header)) => {
            return Err(Error::Series {
                line: 1,
                reason: format!("unexpected header `{header}`"),
            })
        }
        None => return Err(Error::Series { line: 1, reason: "empty input".into() }),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let bad = |reason: String| Error::Series { line: line_no, reason };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(bad(format!("expected 8 fields, got {}", fields.len())));
        }
        fn num<T: std::str::FromStr>(s: &str, name: &str) -> std::result::Result<T, String> {
            s.parse().map_err(|_| format!("bad {name} `{s}`"))
        }
        let protocol: ProtocolKind = fields[0].parse().map_err(|e: Error| bad(e.to_string()))?;
        rows.push(SeriesRow {
            protocol,
            seed: num(fields[1], "seed").map_err(bad)?,
            record: RoundRecord {
                round: num(fields[2], "round").map_err(bad)?,
                alive: num(fields[3], "alive").map_err(bad)?,
                packets_bs: num(fields[4], "packets_bs").map_err(bad)?,
                packets_ch: num(fields[5], "packets_ch").map_err(bad)?,
                residual_j: num(fields[6], "residual_j").map_err(bad)?,
                ch_count: num(fields[7], "ch_count").map_err(bad)?,
            },
        });
    }
    Ok(rows)
}

fn fmt_round(stats: &Stats) -> String {
    if stats.count == 0 {
        "not-reached".into()
    } else {
        format!("{:.1}", stats.mean)
    }
}

/// Fixed-width summary table, one row per protocol.
pub fn render_summary_text(batches: &[BatchSummary]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<8} {:>5} {:>12} {:>12} {:>12} {:>14} {:>10}",
        "protocol", "seeds", "first_dead", "half_dead", "all_dead", "packets_bs", "censored"
    );
    for b in batches {
        let censored = b.first_dead.censored.max(b.half_dead.censored).max(b.all_dead.censored);
        let _ = writeln!(
            out,
            "{:<8} {:>5} {:>12} {:>12} {:>12} {:>14.1} {:>10}",
            b.protocol.label(),
            b.seeds,
            fmt_round(&b.first_dead),
            fmt_round(&b.half_dead),
            fmt_round(&b.all_dead),
            b.total_packets.mean,
            censored
        );
    }
    out
}

pub const SUMMARY_HEADER: &str = "protocol,seeds,metric,count,censored,mean,min,max,stddev";

/// Long-format summary CSV: one row per (protocol, metric).
pub fn render_summary_csv(batches: &[BatchSummary]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for b in batches {
        for (metric, s) in [
            ("first_dead", &b.first_dead),
            ("half_dead", &b.half_dead),
            ("all_dead", &b.all_dead),
            ("total_packets_bs", &b.total_packets),
        ] {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                b.protocol.key(),
                b.seeds,
                metric,
                s.count,
                s.censored,
                format_sig9(s.mean),
                format_sig9(s.min),
                format_sig9(s.max),
                format_sig9(s.stddev)
            );
        }
    }
    out
}

/// Writes `text` to `path`, attaching the path to any error.
pub fn write_file(path: &std::path::Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e: io::Error| Error::io("writing artifact", path, e))
}
