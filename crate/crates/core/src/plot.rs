//! Static SVG line charts of seed-mean series, one polyline per protocol.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::metrics::SimResult;
use crate::protocols::ProtocolKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    AliveVsRound,
    PacketsVsRound,
}

impl PlotKind {
    pub fn file_name(self) -> &'static str {
        match self {
            PlotKind::AliveVsRound => "alive_vs_round.svg",
            PlotKind::PacketsVsRound => "packets_vs_round.svg",
        }
    }

    fn title(self) -> &'static str {
        match self {
            PlotKind::AliveVsRound => "Alive nodes during network lifetime",
            PlotKind::PacketsVsRound => "Packets sent to the base station",
        }
    }

    fn y_label(self) -> &'static str {
        match self {
            PlotKind::AliveVsRound => "alive nodes",
            PlotKind::PacketsVsRound => "packets to BS (cumulative)",
        }
    }
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

fn color(kind: ProtocolKind) -> &'static str {
    match kind {
        ProtocolKind::Deec => "#1f77b4",
        ProtocolKind::Ddeec => "#ff7f0e",
        ProtocolKind::Edeec => "#2ca02c",
        ProtocolKind::Eddeec => "#d62728",
    }
}

/// Seed-mean curve for one protocol. Runs that ended early are extended
/// with their final state (no alive nodes, constant packet total).
pub fn mean_curve(results: &[&SimResult], kind: PlotKind) -> Vec<f64> {
    let len = results.iter().map(|r| r.series.len()).max().unwrap_or(0);
    let mut sums = vec![0.0; len];
    for result in results {
        let value = |i: usize| {
            let rec = &result.series[i.min(result.series.len() - 1)];
            match kind {
                PlotKind::AliveVsRound => rec.alive as f64,
                PlotKind::PacketsVsRound => rec.packets_bs as f64,
            }
        };
        if result.series.is_empty() {
            continue;
        }
        for (i, sum) in sums.iter_mut().enumerate() {
            *sum += value(i);
        }
    }
    let count = results.len().max(1) as f64;
    sums.into_iter().map(|s| s / count).collect()
}

/// "Nice" upper bound for an axis: 1, 2 or 5 times a power of ten.
fn nice_ceiling(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let pow = 10f64.powf(x.log10().floor());
    for step in [1.0, 2.0, 5.0, 10.0] {
        if step * pow >= x {
            return step * pow;
        }
    }
    10.0 * pow
}

/// Renders one chart with a polyline per protocol found in `results`.
pub fn render_plot_svg(results: &[SimResult], kind: PlotKind) -> Result<String> {
    let mut protocols: Vec<ProtocolKind> = results.iter().map(|r| r.protocol).collect();
    protocols.sort();
    protocols.dedup();
    if protocols.is_empty() {
        return Err(Error::validation("results", "a plot needs at least one series"));
    }

    let curves: Vec<(ProtocolKind, Vec<f64>)> = protocols
        .iter()
        .map(|&p| {
            let runs: Vec<&SimResult> = results.iter().filter(|r| r.protocol == p).collect();
            (p, mean_curve(&runs, kind))
        })
        .collect();

    let x_max = nice_ceiling(curves.iter().map(|(_, c)| c.len()).max().unwrap_or(1).saturating_sub(1) as f64);
    let y_peak = curves
        .iter()
        .flat_map(|(_, c)| c.iter().copied())
        .fold(0.0_f64, f64::max);
    let y_max = nice_ceiling(y_peak);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + x / x_max * plot_w;
    let sy = |y: f64| TOP + plot_h - y / y_max * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>
<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w / 2.0,
        kind.title()
    );

    // Axes and ticks.
    let _ = writeln!(
        svg,
        r#"<g class="axes" stroke="black" stroke-width="1">
<line x1="{LEFT}" y1="{:.1}" x2="{:.1}" y2="{:.1}"/>
<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.1}"/>
</g>"#,
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h,
        TOP + plot_h
    );
    let _ = writeln!(svg, r#"<g class="ticks">"#);
    for i in 0..=5 {
        let t = f64::from(i) / 5.0;
        let xv = t * x_max;
        let yv = t * y_max;
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{b:.1}" x2="{x:.2}" y2="{b2:.1}" stroke="black"/><text x="{x:.2}" y="{ty:.1}" text-anchor="middle">{xv}</text>"#,
            x = sx(xv),
            b = TOP + plot_h,
            b2 = TOP + plot_h + 5.0,
            ty = TOP + plot_h + 20.0,
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{l:.1}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{tx:.1}" y="{ty:.2}" text-anchor="end">{yv}</text>"#,
            l = LEFT - 5.0,
            y = sy(yv),
            tx = LEFT - 8.0,
            ty = sy(yv) + 4.0,
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(
        svg,
        r#"<text class="x-label" x="{:.1}" y="{:.1}" text-anchor="middle">rounds</text>
<text class="y-label" x="20" y="{:.1}" text-anchor="middle" transform="rotate(-90 20 {:.1})">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        kind.y_label()
    );

    for (protocol, curve) in &curves {
        let mut points = String::with_capacity(curve.len() * 16);
        for (i, &y) in curve.iter().enumerate() {
            if i > 0 {
                points.push(' ');
            }
            let _ = write!(points, "{:.2},{:.2}", sx(i as f64), sy(y));
        }
        let _ = writeln!(
            svg,
            r#"<polyline class="series" data-protocol="{}" fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            protocol.label(),
            color(*protocol),
            points
        );
    }

    let _ = writeln!(svg, r#"<g class="legend">"#);
    for (i, (protocol, _)) in curves.iter().enumerate() {
        let y = TOP + 10.0 + 20.0 * i as f64;
        let x = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{}" stroke-width="3"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            x + 25.0,
            color(*protocol),
            x + 32.0,
            y + 4.0,
            protocol.label()
        );
    }
    let _ = writeln!(svg, "</g>\n</svg>");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nice_ceilings() {
        assert_eq!(nice_ceiling(0.0), 1.0);
        assert_eq!(nice_ceiling(100.0), 100.0);
        assert_eq!(nice_ceiling(101.0), 200.0);
        assert_eq!(nice_ceiling(8638.0), 10000.0);
        assert_eq!(nice_ceiling(3.2), 5.0);
    }
}
