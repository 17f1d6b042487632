//! Rally log records, written one JSON object per line.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::behavior::{BehaviorDecision, CellKey, Level, PointStateDescriptor};
use crate::court::{ServiceCourt, ShotDirection};
use crate::physics::LaunchState;
use crate::search::{ClipCostBreakdown, OutcomeFilter};
use crate::shot::{ShotOutcome, ShotType};
use crate::vec::{Vec2, Vec3};
use crate::{Error, Real};

/// Why a point ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    /// The hitter's ball went out or into the net.
    Error,
    /// The responder could not reach the ball.
    Unreachable,
    /// Stopped after the configured number of responses.
    Truncated,
}

/// Player inputs applied at that player's next shot cycle. Positions are in
/// court coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlOverride {
    pub player: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub placement: Option<Vec2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recovery: Option<Vec2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shot_type: Option<ShotType>,
}

/// Distribution levels the decision was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionLevels {
    pub shot: Level,
    pub velocity: Level,
    pub placement: Level,
    pub recovery: Level,
}

/// Outgoing flight of a shot, in court coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlightSummary {
    pub launch: LaunchState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounce: Option<Vec2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounce_time: Option<Real>,
    pub clears_net: bool,
    pub in_court: bool,
    pub bounce_error: Real,
    pub speed_error: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotCycleRecord {
    /// 1 for the return of serve.
    pub shot_index: u32,
    pub player: String,
    /// Clock time of the opponent's contact, where this cycle starts.
    pub start_time: Real,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contact_time: Option<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub descriptor: Option<PointStateDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell: Option<CellKey>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<DecisionLevels>,
    /// Decision as sampled, in court coordinates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampled: Option<BehaviorDecision>,
    /// Decision after applying the override.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision: Option<BehaviorDecision>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<ControlOverride>,
    pub filter: OutcomeFilter,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clip_id: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<ClipCostBreakdown>,
    /// Contact correction in court coordinates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_c2d: Option<Vec2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_error: Option<Real>,
    /// Ball position at contact.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball: Option<Vec3>,
    /// Corrected racket position at contact.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub racket: Option<Vec2>,
    /// Corrected player position at contact.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hitter_position: Option<Vec2>,
    /// Direction class of a groundstroke decision.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<ShotDirection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flight: Option<FlightSummary>,
    pub outcome: ShotOutcome,
    /// Opponent's recovery phase, now ending at this contact.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finalized_recovery: Option<RecoveryFinal>,
    /// Fallbacks taken on the way, for diagnosis.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryFinal {
    pub player: String,
    pub clip_id: u64,
    /// Clock time the recovery phase now ends.
    pub end_time: Real,
    /// Recovery correction applied, in court coordinates.
    pub e_r: Vec2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum RallyEvent {
    PointStart {
        point_index: u64,
        seed: u64,
        server: String,
        returner: String,
        service_court: ServiceCourt,
    },
    Serve {
        player: String,
        clip_id: u64,
        contact_time: Real,
        contact: Vec3,
        flight: FlightSummary,
        /// False when the clip had no stored launch and the serve was aimed.
        stored_launch: bool,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        notes: Vec<String>,
    },
    ShotCycle(Box<ShotCycleRecord>),
    PointEnd {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        winner: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        loser: Option<String>,
        reason: EndReason,
        /// Shot cycles after the serve.
        responses: u32,
        clock: Real,
    },
}

/// Events of one point in order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RallyLog {
    pub events: Vec<RallyEvent>,
}

impl RallyLog {
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<(), Error> {
        for e in &self.events {
            serde_json::to_writer(&mut out, e)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }

    /// Read logs back, splitting into points at each `point_start`.
    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<RallyLog>, Error> {
        let mut logs: Vec<RallyLog> = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let e: RallyEvent = serde_json::from_str(&line).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            if matches!(e, RallyEvent::PointStart { .. }) || logs.is_empty() {
                logs.push(RallyLog::default());
            }
            logs.last_mut().expect("pushed above").events.push(e);
        }
        Ok(logs)
    }

    pub fn shot_cycles(&self) -> impl Iterator<Item = &ShotCycleRecord> {
        self.events.iter().filter_map(|e| match e {
            RallyEvent::ShotCycle(r) => Some(r.as_ref()),
            _ => None,
        })
    }

    pub fn end(&self) -> Option<(Option<&str>, EndReason, u32)> {
        self.events.iter().rev().find_map(|e| match e {
            RallyEvent::PointEnd {
                winner,
                reason,
                responses,
                ..
            } => Some((winner.as_deref(), *reason, *responses)),
            _ => None,
        })
    }
}
