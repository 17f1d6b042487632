//! Shot-cycle clip database: schema, validation, file format and statistics.
//!
//! Every clip covers one player's shot cycle, from the opponent's contact
//! (time 0) to the end of the player's recovery (`t_r`). In memory all clips
//! are expressed in the frame where their player stands on the near half;
//! clips recorded on the far half are rotated half a turn at load and rotated
//! back when saved.

mod generate;
mod io;
mod pose;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::court::{region_of, shot_direction, CourtSpec, Frame, ShotDirection, Side};
use crate::physics::{simulate_trajectory, BallTrajectory, FlightParams, LaunchState, StopRule};
use crate::shot::{Handedness, ShotOutcome, ShotType};
use crate::vec::{Vec2, Vec3};
use crate::{Error, Real};

pub use generate::{generate_synthetic_db, ArchetypeSpec, GeneratorSettings, ShotSpeed};
pub use io::{load_db, read_db, save_db, write_db, FORMAT_NAME, FORMAT_VERSION};
pub use pose::{pose_at_phase, ready_pose, PoseBank};

pub const POSE_JOINTS: usize = 14;

/// Keypoints in a player-local frame: origin between the hips, `+y` up,
/// `+x` toward the player's right, scaled to unit torso length.
pub type Pose = [Vec2<Real>; POSE_JOINTS];

/// Trace sampling interval used by the generator and the reference data.
pub const TRACE_DT: Real = 0.04;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayerInfo {
    pub id: String,
    #[serde(default)]
    pub handedness: Handedness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShotCycleClip {
    pub id: u64,
    pub player_id: String,
    pub opponent_id: String,
    /// Point the clip was cut from; consecutive shots of a point link the
    /// incoming ball of one clip to the outgoing ball of the previous one.
    pub point_id: u64,
    /// 0 for the serve.
    pub shot_index: u32,
    /// Half of the court the player occupied in the source.
    pub side: Side,
    /// Contact time (length of the reaction phase).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_c: Option<Real>,
    /// End of the recovery phase (length of the clip).
    pub t_r: Real,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shot_type: Option<ShotType>,
    pub outcome: ShotOutcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_c: Option<Vec3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_b: Option<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_b: Option<Vec2>,
    /// Fitted outgoing flight, launch time in clip time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub launch: Option<LaunchState>,
    /// Sampling interval shared by the three traces.
    pub dt: Real,
    pub player_trace: Vec<Vec2>,
    pub opponent_trace: Vec<Vec2>,
    pub pose_trace: Vec<Pose>,
}

fn sample_linear(points: &[Vec2], dt: Real, t: Real) -> Vec2 {
    if points.is_empty() {
        return Vec2::zero();
    }
    let last = points.len() - 1;
    let u = (t / dt).max(0.0);
    let i = u.floor() as usize;
    if i >= last {
        return points[last];
    }
    points[i].lerp(points[i + 1], u - i as Real)
}

/// Number of trace samples needed to cover `[0, t_r]` at `dt`.
pub fn trace_len(t_r: Real, dt: Real) -> usize {
    (t_r / dt - 1e-9).ceil().max(0.0) as usize + 1
}

impl ShotCycleClip {
    pub fn has_contact(&self) -> bool {
        self.outcome.has_contact()
    }

    pub fn player_at(&self, t: Real) -> Vec2 {
        sample_linear(&self.player_trace, self.dt, t)
    }

    pub fn opponent_at(&self, t: Real) -> Vec2 {
        sample_linear(&self.opponent_trace, self.dt, t)
    }

    pub fn pose_at(&self, t: Real) -> Pose {
        let n = self.pose_trace.len();
        if n == 0 {
            return ready_pose();
        }
        let i = ((t / self.dt).round().max(0.0) as usize).min(n - 1);
        self.pose_trace[i]
    }

    /// Root velocity at the clip start by forward differencing.
    pub fn start_velocity(&self) -> Vec2 {
        match self.player_trace.as_slice() {
            [a, b, ..] => (*b - *a).scale(1.0 / self.dt),
            _ => Vec2::zero(),
        }
    }

    /// Player position at the end of the recovery phase.
    pub fn recovery_position(&self) -> Vec2 {
        self.player_at(self.t_r)
    }

    /// Average ground speed of the shot from contact to bounce.
    pub fn v_b(&self) -> Option<Real> {
        let (t_c, x_c, t_b, x_b) = (self.t_c?, self.x_c?, self.t_b?, self.x_b?);
        let dt = t_b - t_c;
        (dt > 0.0).then(|| (x_b - x_c.xy()).norm() / dt)
    }

    /// Direction class of a groundstroke with a placement, judged from the
    /// player's position at contact.
    pub fn direction(&self, court: &CourtSpec) -> Option<ShotDirection> {
        if !self.shot_type?.is_groundstroke() {
            return None;
        }
        let hitter = region_of(self.player_at(self.t_c?), court);
        Some(shot_direction(hitter, self.x_b?, court))
    }

    /// The same clip seen from the other half of the court.
    pub fn half_turn(&self) -> Self {
        let turn = |v: &[Vec2]| v.iter().map(|p| p.half_turn()).collect::<Vec<_>>();
        Self {
            side: self.side.opposite(),
            x_c: self.x_c.map(|p| p.half_turn()),
            x_b: self.x_b.map(|p| p.half_turn()),
            launch: self.launch.map(|l| l.half_turn()),
            player_trace: turn(&self.player_trace),
            opponent_trace: turn(&self.opponent_trace),
            ..self.clone()
        }
    }

    fn in_frame(&self, frame: Frame) -> Self {
        if frame.flipped {
            Self {
                side: self.side,
                ..self.half_turn()
            }
        } else {
            self.clone()
        }
    }

    /// Check the clip invariants. Positions are expected in the frame where
    /// the player is on `self.side`.
    pub fn validate(&self, court: &CourtSpec) -> Result<(), String> {
        let finite = |v: Real| v.is_finite();
        if !(self.dt > 0.0 && finite(self.dt)) {
            return Err(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_r > 0.0 && finite(self.t_r)) {
            return Err(format!("t_r must be positive, got {}", self.t_r));
        }
        if self.player_id == self.opponent_id {
            return Err("player and opponent are the same".into());
        }
        let contact = self.has_contact();
        let annotated = [
            self.t_c.is_some(),
            self.x_c.is_some(),
            self.shot_type.is_some(),
        ];
        if contact && annotated.iter().any(|a| !a) {
            return Err("contact clip is missing t_c, x_c or shot_type".into());
        }
        if !contact
            && (annotated.iter().any(|a| *a)
                || self.t_b.is_some()
                || self.x_b.is_some()
                || self.launch.is_some())
        {
            return Err("no_contact clip carries contact annotations".into());
        }
        if let Some(t_c) = self.t_c {
            if !(t_c > 0.0 && t_c < self.t_r) {
                return Err(format!(
                    "need 0 < t_c < t_r, got t_c = {t_c}, t_r = {}",
                    self.t_r
                ));
            }
        }
        if let Some(x_c) = self.x_c {
            if !x_c.is_finite() || x_c.z < 0.0 {
                return Err("contact position must be finite with z >= 0".into());
            }
        }
        if self.t_b.is_some() != self.x_b.is_some() {
            return Err("t_b and x_b must be given together".into());
        }
        if let (Some(t_b), Some(t_c)) = (self.t_b, self.t_c) {
            if !(t_b > t_c) {
                return Err(format!("bounce at {t_b} does not follow contact at {t_c}"));
            }
        }
        if matches!(self.outcome, ShotOutcome::InPlay | ShotOutcome::Winner) {
            let Some(x_b) = self.x_b else {
                return Err("in-court shot without a placement".into());
            };
            if !court.in_half(x_b, self.side.opposite()) {
                return Err("placement of an in-court shot is not in the opponent's court".into());
            }
        }
        if let Some(l) = &self.launch {
            let ok =
                l.origin.is_finite() && l.v_h.is_finite() && l.v_z.is_finite() && l.v_spin >= 0.0;
            if !ok {
                return Err("launch state is not finite".into());
            }
        }
        let n = trace_len(self.t_r, self.dt);
        for (name, len) in [
            ("player_trace", self.player_trace.len()),
            ("opponent_trace", self.opponent_trace.len()),
            ("pose_trace", self.pose_trace.len()),
        ] {
            if len != n {
                return Err(format!(
                    "{name} has {len} samples, expected {n} covering [0, t_r] at dt"
                ));
            }
        }
        if !self
            .player_trace
            .iter()
            .chain(&self.opponent_trace)
            .all(|p| p.is_finite())
        {
            return Err("trace position is not finite".into());
        }
        if !self.pose_trace.iter().flatten().all(|p| p.is_finite()) {
            return Err("pose keypoint is not finite".into());
        }
        Ok(())
    }
}

/// Ball arriving at a clip's player, in that clip's frame and time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncomingBall {
    /// Opponent's contact position.
    pub start: Vec3,
    /// Where the incoming ball bounced (or would have, for volleys).
    pub bounce: Option<Vec2>,
    /// Opponent's fitted launch, re-timed to start at 0.
    pub launch: Option<LaunchState>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClipDatabase {
    pub court: CourtSpec,
    pub flight: FlightParams,
    players: Vec<PlayerInfo>,
    clips: Vec<ShotCycleClip>,
    by_id: HashMap<u64, usize>,
    by_player: BTreeMap<String, Vec<usize>>,
    by_shot_type: [Vec<usize>; 7],
    by_outcome: [Vec<usize>; 4],
    prev: Vec<Option<usize>>,
}

fn outcome_index(o: ShotOutcome) -> usize {
    match o {
        ShotOutcome::InPlay => 0,
        ShotOutcome::Winner => 1,
        ShotOutcome::Error => 2,
        ShotOutcome::NoContact => 3,
    }
}

impl ClipDatabase {
    /// Build a database from clips in their source frames, validating every
    /// clip and normalizing far-side clips to the near half.
    pub fn new(
        court: CourtSpec,
        flight: FlightParams,
        players: Vec<PlayerInfo>,
        clips: Vec<ShotCycleClip>,
    ) -> Result<Self, Error> {
        court.validate()?;
        flight.validate()?;
        let mut seen = HashMap::new();
        for p in &players {
            if seen.insert(p.id.clone(), ()).is_some() {
                return Err(Error::InvalidInput(format!(
                    "player `{}` listed twice",
                    p.id
                )));
            }
        }
        let known = |id: &str| players.iter().any(|p| p.id == id);
        let mut failures: Vec<(u64, String)> = Vec::new();
        let mut ids = HashMap::new();
        let mut normalized = Vec::with_capacity(clips.len());
        for clip in clips {
            let mut problem = clip.validate(&court).err();
            if problem.is_none() && !(known(&clip.player_id) && known(&clip.opponent_id)) {
                problem = Some("player or opponent missing from the header".into());
            }
            if problem.is_none() && ids.insert(clip.id, ()).is_some() {
                problem = Some("duplicate clip id".into());
            }
            if let Some(msg) = problem {
                failures.push((clip.id, msg));
            }
            normalized.push(clip.in_frame(Frame::for_side(clip.side)));
        }
        if let Some((clip_id, message)) = failures.first().cloned() {
            return Err(Error::Validation {
                clip_id,
                message,
                count: failures.len(),
            });
        }
        Ok(Self::index(court, flight, players, normalized))
    }

    pub fn empty(court: CourtSpec, flight: FlightParams) -> Self {
        Self::index(court, flight, Vec::new(), Vec::new())
    }

    fn index(
        court: CourtSpec,
        flight: FlightParams,
        players: Vec<PlayerInfo>,
        clips: Vec<ShotCycleClip>,
    ) -> Self {
        let mut by_id = HashMap::new();
        let mut by_player: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let mut by_shot_type: [Vec<usize>; 7] = Default::default();
        let mut by_outcome: [Vec<usize>; 4] = Default::default();
        let mut slot = HashMap::new();
        for (i, c) in clips.iter().enumerate() {
            by_id.insert(c.id, i);
            by_player.entry(c.player_id.clone()).or_default().push(i);
            if let Some(t) = c.shot_type {
                by_shot_type[t.index()].push(i);
            }
            by_outcome[outcome_index(c.outcome)].push(i);
            slot.insert((c.point_id, c.shot_index), i);
        }
        let prev = clips
            .iter()
            .map(|c| {
                let j = *slot.get(&(c.point_id, c.shot_index.checked_sub(1)?))?;
                let p = &clips[j];
                (p.player_id == c.opponent_id && p.has_contact()).then_some(j)
            })
            .collect();
        Self {
            court,
            flight,
            players,
            clips,
            by_id,
            by_player,
            by_shot_type,
            by_outcome,
            prev,
        }
    }

    pub fn len(&self) -> usize {
        self.clips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clips.is_empty()
    }

    /// Clips in the near-half frame, in file order.
    pub fn clips(&self) -> &[ShotCycleClip] {
        &self.clips
    }

    pub fn clip(&self, index: usize) -> &ShotCycleClip {
        &self.clips[index]
    }

    pub fn index_of(&self, id: u64) -> Option<usize> {
        self.by_id.get(&id).copied()
    }

    pub fn players(&self) -> &[PlayerInfo] {
        &self.players
    }

    pub fn player(&self, id: &str) -> Option<&PlayerInfo> {
        self.players.iter().find(|p| p.id == id)
    }

    pub fn handedness(&self, id: &str) -> Handedness {
        self.player(id).map(|p| p.handedness).unwrap_or_default()
    }

    pub fn by_player(&self, id: &str) -> &[usize] {
        self.by_player.get(id).map_or(&[], Vec::as_slice)
    }

    pub fn by_shot_type(&self, t: ShotType) -> &[usize] {
        &self.by_shot_type[t.index()]
    }

    pub fn by_outcome(&self, o: ShotOutcome) -> &[usize] {
        &self.by_outcome[outcome_index(o)]
    }

    /// Index of the opponent's clip whose shot this clip responds to.
    pub fn previous(&self, index: usize) -> Option<usize> {
        self.prev[index]
    }

    /// Incoming ball of clip `index`, expressed in that clip's frame.
    pub fn incoming(&self, index: usize) -> Option<IncomingBall> {
        let p = &self.clips[self.prev[index]?];
        Some(IncomingBall {
            start: p.x_c?.half_turn(),
            bounce: p.x_b.map(|b| b.half_turn()),
            launch: p.launch.map(|l| LaunchState {
                time: 0.0,
                ..l.half_turn()
            }),
        })
    }

    /// Re-simulated incoming flight of clip `index`, when the previous clip
    /// carries its launch.
    pub fn incoming_trajectory(&self, index: usize, max_time: Real) -> Option<BallTrajectory> {
        let launch = self.incoming(index)?.launch?;
        simulate_trajectory(&launch, &self.flight, &self.court, StopRule::open(max_time)).ok()
    }

    /// Clips converted back to the frames they were recorded in.
    pub fn source_clips(&self) -> impl Iterator<Item = ShotCycleClip> + '_ {
        self.clips
            .iter()
            .map(|c| c.in_frame(Frame::for_side(c.side)))
    }

    pub fn stats(&self) -> DatabaseStats {
        let mut rows: Vec<PlayerStats> = Vec::new();
        let mut ids: Vec<&str> = self.players.iter().map(|p| p.id.as_str()).collect();
        for id in self.by_player.keys() {
            if !ids.contains(&id.as_str()) {
                ids.push(id);
            }
        }
        for id in ids {
            let mut row = PlayerStats {
                player_id: id.to_string(),
                ..Default::default()
            };
            for &i in self.by_player(id) {
                let c = &self.clips[i];
                match c.shot_type {
                    Some(t) => row.by_shot_type[t.index()] += 1,
                    None => row.no_contact += 1,
                }
                row.total += 1;
                row.duration_s += c.t_r;
            }
            rows.push(row);
        }
        DatabaseStats { rows }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PlayerStats {
    pub player_id: String,
    pub by_shot_type: [usize; 7],
    pub no_contact: usize,
    pub total: usize,
    pub duration_s: Real,
}

/// Clip counts per shot type and total duration for each player.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DatabaseStats {
    pub rows: Vec<PlayerStats>,
}

impl DatabaseStats {
    /// Tab-separated table: one row per player, one column per shot type,
    /// then no-contact clips, total clips and duration in minutes.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("player");
        for t in ShotType::ALL {
            out.push('\t');
            out.push_str(t.label());
        }
        out.push_str("\tNC\tTotal\tDur (min)\n");
        for r in &self.rows {
            out.push_str(&r.player_id);
            for n in r.by_shot_type {
                out.push_str(&format!("\t{n}"));
            }
            out.push_str(&format!(
                "\t{}\t{}\t{:.1}\n",
                r.no_contact,
                r.total,
                r.duration_s / 60.0
            ));
        }
        out
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn still_clip(id: u64, t_r: Real) -> ShotCycleClip {
        let n = trace_len(t_r, TRACE_DT);
        ShotCycleClip {
            id,
            player_id: "a".into(),
            opponent_id: "b".into(),
            point_id: id,
            shot_index: 1,
            side: Side::Near,
            t_c: Some(0.8),
            t_r,
            shot_type: Some(ShotType::ForehandTopspin),
            outcome: ShotOutcome::InPlay,
            x_c: Some(Vec3::new(0.5, 11.5, 1.0)),
            t_b: Some(1.7),
            x_b: Some(Vec2::new(1.0, -9.0)),
            launch: None,
            dt: TRACE_DT,
            player_trace: vec![Vec2::new(1.3, 11.5); n],
            opponent_trace: vec![Vec2::new(0.0, -12.0); n],
            pose_trace: vec![ready_pose(); n],
        }
    }

    pub(crate) fn two_players() -> Vec<PlayerInfo> {
        vec![
            PlayerInfo {
                id: "a".into(),
                handedness: Handedness::Right,
            },
            PlayerInfo {
                id: "b".into(),
                handedness: Handedness::Left,
            },
        ]
    }

    fn db(clips: Vec<ShotCycleClip>) -> Result<ClipDatabase, Error> {
        ClipDatabase::new(
            CourtSpec::default(),
            FlightParams::default(),
            two_players(),
            clips,
        )
    }

    #[test]
    fn empty_database_is_fine() {
        let d = db(vec![]).unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn contact_after_recovery_end_is_rejected() {
        let mut c = still_clip(7, 2.0);
        c.t_c = Some(2.0);
        match db(vec![still_clip(1, 2.0), c]) {
            Err(Error::Validation { clip_id, count, .. }) => {
                assert_eq!(clip_id, 7);
                assert_eq!(count, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn no_contact_must_not_carry_contact() {
        let mut c = still_clip(3, 2.0);
        c.outcome = ShotOutcome::NoContact;
        assert!(c.validate(&CourtSpec::default()).is_err());
        c.t_c = None;
        c.x_c = None;
        c.shot_type = None;
        c.t_b = None;
        c.x_b = None;
        assert!(c.validate(&CourtSpec::default()).is_ok());
    }

    #[test]
    fn trace_length_checked() {
        let mut c = still_clip(3, 2.0);
        c.player_trace.pop();
        assert!(c
            .validate(&CourtSpec::default())
            .unwrap_err()
            .contains("player_trace"));
    }

    #[test]
    fn in_play_placement_must_be_across_the_net() {
        let mut c = still_clip(3, 2.0);
        c.x_b = Some(Vec2::new(1.0, 5.0));
        assert!(c.validate(&CourtSpec::default()).is_err());
    }

    #[test]
    fn far_clips_are_normalized_and_restored() {
        let far = still_clip(9, 2.0).half_turn();
        assert_eq!(far.side, Side::Far);
        let d = db(vec![far.clone()]).unwrap();
        assert_eq!(d.clip(0).x_c, Some(Vec3::new(0.5, 11.5, 1.0)));
        assert_eq!(d.source_clips().next().unwrap(), far);
    }

    #[test]
    fn previous_clip_links_by_point() {
        let mut serve = still_clip(1, 2.0);
        serve.player_id = "b".into();
        serve.opponent_id = "a".into();
        serve.shot_index = 0;
        serve.point_id = 5;
        let mut ret = still_clip(2, 2.0);
        ret.point_id = 5;
        let d = db(vec![serve, ret]).unwrap();
        assert_eq!(d.previous(1), Some(0));
        assert_eq!(d.previous(0), None);
        let inc = d.incoming(1).unwrap();
        assert_eq!(inc.start, Vec3::new(-0.5, -11.5, 1.0));
        assert_eq!(inc.bounce, Some(Vec2::new(-1.0, 9.0)));
    }

    #[test]
    fn stats_table_counts() {
        let mut nc = still_clip(2, 1.0);
        nc.outcome = ShotOutcome::NoContact;
        nc.t_c = None;
        nc.x_c = None;
        nc.shot_type = None;
        nc.t_b = None;
        nc.x_b = None;
        let d = db(vec![still_clip(1, 2.0), nc]).unwrap();
        let s = d.stats();
        assert_eq!(s.rows[0].by_shot_type[ShotType::ForehandTopspin.index()], 1);
        assert_eq!(s.rows[0].no_contact, 1);
        assert_eq!(s.rows[0].total, 2);
        let tsv = s.to_tsv();
        assert!(tsv.starts_with("player\tS\tFH-T"));
        assert!(tsv.contains("a\t0\t1\t0\t0\t0\t0\t0\t1\t2\t0.1"));
    }

    #[test]
    fn trace_sampling_interpolates_and_clamps() {
        let mut c = still_clip(1, 0.08);
        c.player_trace = vec![
            Vec2::new(0.0, 10.0),
            Vec2::new(1.0, 10.0),
            Vec2::new(3.0, 10.0),
        ];
        assert_eq!(c.player_at(0.02), Vec2::new(0.5, 10.0));
        assert_eq!(c.player_at(1.0), Vec2::new(3.0, 10.0));
        assert_eq!(c.player_at(-1.0), Vec2::new(0.0, 10.0));
        assert!((c.start_velocity().x - 25.0).abs() < 1e-12);
    }
}
