//! Summary statistics and heatmap grids computed from rally logs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::court::{CourtSpec, ShotDirection, Side};
use crate::vec::Vec2;
use crate::Real;

use super::{EndReason, RallyEvent, RallyLog};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub points: u64,
    /// Responses after the serve, by count.
    pub rally_lengths: BTreeMap<u32, u64>,
    pub endings: BTreeMap<String, u64>,
    pub wins: BTreeMap<String, u64>,
    /// Groundstroke decisions hit from a wing band.
    pub cross_court: u64,
    pub down_the_line: u64,
    pub middle: u64,
    /// `cross_court / (cross_court + down_the_line)`.
    pub cross_court_fraction: Option<Real>,
    /// Mean distance of baseline recovery targets behind the baseline, m.
    pub mean_recovery_depth: Option<Real>,
    pub recoveries: u64,
}

fn reason_label(r: EndReason) -> &'static str {
    match r {
        EndReason::Error => "error",
        EndReason::Unreachable => "unreachable",
        EndReason::Truncated => "truncated",
    }
}

pub fn summarize(logs: &[RallyLog], court: &CourtSpec) -> Summary {
    let mut s = Summary::default();
    let mut depth_sum = 0.0;
    for log in logs {
        s.points += 1;
        if let Some((winner, reason, responses)) = log.end() {
            *s.rally_lengths.entry(responses).or_default() += 1;
            *s.endings
                .entry(reason_label(reason).to_string())
                .or_default() += 1;
            if let Some(w) = winner {
                *s.wins.entry(w.to_string()).or_default() += 1;
            }
        }
        for rec in log.shot_cycles() {
            match rec.direction {
                Some(ShotDirection::CrossCourt) => s.cross_court += 1,
                Some(ShotDirection::DownTheLine) => s.down_the_line += 1,
                Some(ShotDirection::Middle) => s.middle += 1,
                _ => {}
            }
            if let Some(d) = rec.decision.filter(|d| !d.approach_net) {
                depth_sum += d.recovery.y.abs() - court.half_length();
                s.recoveries += 1;
            }
        }
    }
    let wings = s.cross_court + s.down_the_line;
    s.cross_court_fraction = (wings > 0).then(|| s.cross_court as Real / wings as Real);
    s.mean_recovery_depth = (s.recoveries > 0).then(|| depth_sum / s.recoveries as Real);
    s
}

impl Summary {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("metric\tvalue\n");
        let opt = |v: Option<Real>| v.map_or("NA".to_string(), |v| format!("{v:.4}"));
        let _ = writeln!(out, "points\t{}", self.points);
        for (k, v) in &self.endings {
            let _ = writeln!(out, "ending.{k}\t{v}");
        }
        for (k, v) in &self.wins {
            let _ = writeln!(out, "wins.{k}\t{v}");
        }
        let _ = writeln!(out, "cross_court\t{}", self.cross_court);
        let _ = writeln!(out, "down_the_line\t{}", self.down_the_line);
        let _ = writeln!(out, "middle\t{}", self.middle);
        let _ = writeln!(
            out,
            "cross_court_fraction\t{}",
            opt(self.cross_court_fraction)
        );
        let _ = writeln!(
            out,
            "mean_recovery_depth_m\t{}",
            opt(self.mean_recovery_depth)
        );
        for (k, v) in &self.rally_lengths {
            let _ = writeln!(out, "rally_length.{k}\t{v}");
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeatmapKind {
    Placement,
    Recovery,
}

/// Count grid over the court in the player's own frame (player on the near
/// half). Points outside the grid count in the nearest edge cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Heatmap {
    pub player: String,
    pub kind: HeatmapKind,
    pub conditioning: String,
    pub bandwidth: Option<Real>,
    pub x0: Real,
    pub y0: Real,
    pub cell: Real,
    pub nx: usize,
    pub ny: usize,
    /// Row-major, `counts[iy * nx + ix]`.
    pub counts: Vec<u64>,
}

impl Heatmap {
    pub fn new(player: &str, kind: HeatmapKind, court: &CourtSpec, cell: Real) -> Self {
        let half_x = (court.doubles_width / 2.0 + 2.0).ceil();
        let half_y = (court.half_length() + 5.0).ceil();
        let nx = (2.0 * half_x / cell).ceil() as usize;
        let ny = (2.0 * half_y / cell).ceil() as usize;
        Self {
            player: player.to_string(),
            kind,
            conditioning: "all".to_string(),
            bandwidth: None,
            x0: -half_x,
            y0: -half_y,
            cell,
            nx,
            ny,
            counts: vec![0; nx * ny],
        }
    }

    fn cell_index(&self, p: Vec2) -> usize {
        let ix = ((p.x - self.x0) / self.cell)
            .floor()
            .clamp(0.0, (self.nx - 1) as Real) as usize;
        let iy = ((p.y - self.y0) / self.cell)
            .floor()
            .clamp(0.0, (self.ny - 1) as Real) as usize;
        iy * self.nx + ix
    }

    pub fn add(&mut self, p: Vec2) {
        let i = self.cell_index(p);
        self.counts[i] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Header line, then one tab-separated row per `y` cell.
    pub fn to_tsv(&self) -> String {
        let bw = self.bandwidth.map_or("NA".to_string(), |b| b.to_string());
        let mut out = format!(
            "# player={} kind={} conditioning={} bandwidth={} x0={} y0={} cell={} nx={} ny={} total={}\n",
            self.player,
            match self.kind {
                HeatmapKind::Placement => "placement",
                HeatmapKind::Recovery => "recovery",
            },
            self.conditioning,
            bw,
            self.x0,
            self.y0,
            self.cell,
            self.nx,
            self.ny,
            self.total()
        );
        for row in self.counts.chunks(self.nx) {
            let line: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            out.push_str(&line.join("\t"));
            out.push('\n');
        }
        out
    }
}

/// Placement and recovery grids for every player that hit a shot.
pub fn heatmaps(logs: &[RallyLog], court: &CourtSpec, cell: Real) -> Vec<Heatmap> {
    let mut maps: BTreeMap<(String, u8), Heatmap> = BTreeMap::new();
    for log in logs {
        let mut sides: BTreeMap<&str, Side> = BTreeMap::new();
        for e in &log.events {
            match e {
                RallyEvent::PointStart {
                    server, returner, ..
                } => {
                    sides.insert(server, Side::Near);
                    sides.insert(returner, Side::Far);
                }
                RallyEvent::ShotCycle(rec) => {
                    let (Some(d), Some(side)) = (rec.decision, sides.get(rec.player.as_str()))
                    else {
                        continue;
                    };
                    let local = |p: Vec2| if *side == Side::Far { p.half_turn() } else { p };
                    for (k, kind, p) in [
                        (0u8, HeatmapKind::Placement, d.placement),
                        (1, HeatmapKind::Recovery, d.recovery),
                    ] {
                        maps.entry((rec.player.clone(), k))
                            .or_insert_with(|| Heatmap::new(&rec.player, kind, court, cell))
                            .add(local(p));
                    }
                }
                _ => {}
            }
        }
    }
    maps.into_values().collect()
}
