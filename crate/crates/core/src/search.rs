//! Cost-based clip search with translational contact and recovery corrections.
//!
//! Everything here works in the frame where the searching player stands on
//! the near half, the frame clips are stored in.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::behavior::BehaviorDecision;
use crate::clipdb::{ClipDatabase, Pose, ShotCycleClip};
use crate::physics::BallTrajectory;
use crate::shot::{ShotOutcome, ShotType};
use crate::vec::{cosine, Vec2, Vec3};
use crate::{Error, Real};

/// Displacements shorter than this make ratio and angle terms vanish.
const DEGENERATE: Real = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeFilter {
    /// Only clips whose shot keeps the point going.
    MustContinue,
    /// Only clips where the player never reaches the ball.
    MustEndNoContact,
    /// Any clip with a contact, point-ending or not.
    ContactAny,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostWeights {
    pub pose: Real,
    pub velo: Real,
    pub contact: Real,
    pub react_velo: Real,
    pub react_dir: Real,
    pub recover_velo: Real,
    pub recover_dir: Real,
    pub shot_velo: Real,
    pub shot_place: Real,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self {
            pose: 1.0,
            velo: 1.0,
            contact: 0.5,
            react_velo: 5.0,
            react_dir: 5.0,
            recover_velo: 3.0,
            recover_dir: 10.0,
            shot_velo: 1.0,
            shot_place: 0.5,
        }
    }
}

impl CostWeights {
    pub fn validate(&self) -> Result<(), Error> {
        let all = [
            self.pose,
            self.velo,
            self.contact,
            self.react_velo,
            self.react_dir,
            self.recover_velo,
            self.recover_dir,
            self.shot_velo,
            self.shot_place,
        ];
        if all.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::Config(
                "weights must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// Largest contact correction a clip may take, m.
    pub max_react_correction: Real,
    /// Recovery corrections are clamped to this length, m.
    pub max_recover_correction: Real,
    /// Largest unweighted reaction cost (ratio plus angle terms) of a
    /// feasible clip.
    pub max_react_cost: Real,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            max_react_correction: 2.0,
            max_recover_correction: 1.5,
            max_react_cost: 4.0,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<(), Error> {
        let all = [
            self.max_react_correction,
            self.max_recover_correction,
            self.max_react_cost,
        ];
        if all.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Config("thresholds must be positive".into()));
        }
        Ok(())
    }
}

/// Situation and goals for one shot-cycle search.
#[derive(Debug, Clone, Copy)]
pub struct SearchQuery<'a> {
    /// Goals; without them only the motion terms are scored.
    pub behavior: Option<BehaviorDecision>,
    pub incoming: &'a BallTrajectory,
    /// Time on the incoming trajectory's clock at which the clip starts.
    pub start_time: Real,
    pub start_pos: Vec2,
    pub start_pose: Pose,
    pub start_velocity: Vec2,
    pub filter: OutcomeFilter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct ClipCostBreakdown {
    pub c_pose: Real,
    pub c_velo: Real,
    pub c_contact: Real,
    pub c_react_velo: Real,
    pub c_react_dir: Real,
    pub c_recover_velo: Real,
    pub c_recover_dir: Real,
    pub c_shot_type: Real,
    pub c_shot_velo: Real,
    pub c_shot_place: Real,
    pub total: Real,
}

impl ClipCostBreakdown {
    fn weigh(&mut self, w: &CostWeights) {
        self.total = if self.c_shot_type.is_infinite() {
            Real::INFINITY
        } else {
            w.pose * self.c_pose
                + w.velo * self.c_velo
                + w.contact * self.c_contact
                + w.react_velo * self.c_react_velo
                + w.react_dir * self.c_react_dir
                + w.recover_velo * self.c_recover_velo
                + w.recover_dir * self.c_recover_dir
                + w.shot_velo * self.c_shot_velo
                + w.shot_place * self.c_shot_place
        };
    }

    fn infeasible() -> Self {
        Self {
            total: Real::INFINITY,
            ..Default::default()
        }
    }
}

/// Translations that fit a clip to the current situation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionPlan {
    /// Moves the clip's start onto the player's current position.
    pub offset: Vec2,
    /// Ball minus racket at contact, in the court plane.
    pub e_c2d: Vec2,
    /// Height mismatch at contact, which translation cannot fix.
    pub z_error: Real,
    /// Residual to the recovery goal, before clamping.
    pub e_r: Vec2,
    /// Recovery correction actually applied.
    pub e_r_applied: Vec2,
    pub t_c: Option<Real>,
    /// When the recovery phase ends, in clip time.
    pub recovery_end: Real,
    /// Ball position at contact.
    pub ball: Option<Vec3>,
}

/// Smoothstep ease-in/ease-out weight.
pub fn ease(u: Real) -> Real {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

/// Ratio and angle terms between the clip's own displacement and the
/// corrected one.
pub fn displacement_terms(db: Vec2, cor: Vec2) -> (Real, Real) {
    let (a, b) = (db.norm(), cor.norm());
    if a < DEGENERATE || b < DEGENERATE {
        return (0.0, 0.0);
    }
    let r = b / a;
    let dir = 1.0 - cosine(db, cor, DEGENERATE).unwrap_or(1.0);
    (r.max(1.0 / r) - 1.0, dir.max(0.0))
}

fn clamp_len(v: Vec2, max: Real) -> Vec2 {
    v.clamp_norm(max)
}

/// Per-clip quantities the cost model needs, computed once per database.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Features {
    id: u64,
    outcome: ShotOutcome,
    shot: Option<ShotType>,
    t_c: Option<Real>,
    t_r: Real,
    p0: Vec2,
    /// Player position at contact (or at the end for no-contact clips).
    pc: Vec2,
    pr: Vec2,
    v0: Vec2,
    x_c: Option<Vec3>,
    x_b: Option<Vec2>,
    v_b: Option<Real>,
}

impl Features {
    fn of(c: &ShotCycleClip) -> Self {
        Self {
            id: c.id,
            outcome: c.outcome,
            shot: c.shot_type,
            t_c: c.t_c,
            t_r: c.t_r,
            p0: c.player_at(0.0),
            pc: c.player_at(c.t_c.unwrap_or(c.t_r)),
            pr: c.player_at(c.t_r),
            v0: c.start_velocity(),
            x_c: c.x_c,
            x_b: c.x_b,
            v_b: c.v_b(),
        }
    }
}

fn pose_distance(a: &Pose, b: &Pose) -> Real {
    a.iter().zip(b).map(|(p, q)| (*p - *q).norm()).sum::<Real>() / a.len() as Real
}

/// Everything [`clip_cost`] computes: the breakdown, the corrections and
/// whether the clip can be used at all.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub cost: ClipCostBreakdown,
    pub plan: CorrectionPlan,
    pub feasible: bool,
}

fn evaluate(
    f: &Features,
    pose0: &Pose,
    q: &SearchQuery,
    w: &CostWeights,
    th: &Thresholds,
) -> Evaluation {
    let mut cost = ClipCostBreakdown {
        c_pose: pose_distance(pose0, &q.start_pose),
        c_velo: (f.v0 - q.start_velocity).norm(),
        ..Default::default()
    };
    let offset = q.start_pos - f.p0;
    let mut plan = CorrectionPlan {
        offset,
        e_c2d: Vec2::zero(),
        z_error: 0.0,
        e_r: Vec2::zero(),
        e_r_applied: Vec2::zero(),
        t_c: f.t_c,
        recovery_end: f.t_r,
        ball: None,
    };
    let (Some(t_c), Some(x_c)) = (f.t_c, f.x_c) else {
        cost.weigh(w);
        return Evaluation {
            cost,
            plan,
            feasible: true,
        };
    };
    let Some(ball) = q
        .incoming
        .position_at(q.start_time + t_c)
        .filter(|b| b.y > 0.0)
    else {
        return Evaluation {
            cost: ClipCostBreakdown::infeasible(),
            plan,
            feasible: false,
        };
    };
    // Racket at contact after translating the clip to the start position.
    let racket = x_c.xy() + offset;
    let e_c2d = ball.xy() - racket;
    plan.e_c2d = e_c2d;
    plan.z_error = (ball.z - x_c.z).abs();
    plan.ball = Some(ball);
    cost.c_contact = plan.z_error;
    let react_db = f.pc - f.p0;
    (cost.c_react_velo, cost.c_react_dir) = displacement_terms(react_db, react_db + e_c2d);

    if let Some(b) = q.behavior {
        if f.shot != Some(b.shot_type) {
            cost.c_shot_type = Real::INFINITY;
        }
        let at_contact = f.pc + offset + e_c2d;
        let e_r = b.recovery - (at_contact + (f.pr - f.pc));
        plan.e_r = e_r;
        plan.e_r_applied = clamp_len(e_r, th.max_recover_correction);
        let rec_db = f.pr - f.pc;
        (cost.c_recover_velo, cost.c_recover_dir) = displacement_terms(rec_db, rec_db + e_r);
        if let Some(v_b) = f.v_b {
            cost.c_shot_velo = (v_b - b.shot_velocity).abs();
        }
        if let Some(x_b) = f.x_b {
            let moved = x_b + (ball.xy() - x_c.xy());
            cost.c_shot_place = (moved - b.placement).norm();
        }
    }
    cost.weigh(w);
    let feasible = e_c2d.norm() <= th.max_react_correction
        && cost.c_react_velo + cost.c_react_dir <= th.max_react_cost
        && cost.total.is_finite();
    Evaluation {
        cost,
        plan,
        feasible,
    }
}

/// Cost of one clip against a query, straight from the clip.
pub fn clip_cost(
    clip: &ShotCycleClip,
    q: &SearchQuery,
    w: &CostWeights,
    th: &Thresholds,
) -> Evaluation {
    evaluate(&Features::of(clip), &clip.pose_at(0.0), q, w, th)
}

/// Contact correction alone: `(e_c2d, z_error, ball)`.
pub fn contact_correction(
    clip: &ShotCycleClip,
    start_pos: Vec2,
    incoming: &BallTrajectory,
    start_time: Real,
) -> Result<(Vec2, Real, Vec3), Error> {
    let (t_c, x_c) = match (clip.t_c, clip.x_c) {
        (Some(t), Some(x)) => (t, x),
        _ => {
            return Err(Error::InvalidInput(format!(
                "clip {} has no contact",
                clip.id
            )))
        }
    };
    let ball = incoming
        .position_at(start_time + t_c)
        .ok_or(Error::BallEndedEarly {
            time: start_time + t_c,
        })?;
    let racket = start_pos + (x_c.xy() - clip.player_at(0.0));
    Ok((ball.xy() - racket, (ball.z - x_c.z).abs(), ball))
}

/// Residual to the recovery goal when the recovery phase ends at
/// `recovery_end` (clip time).
pub fn recovery_correction(
    clip: &ShotCycleClip,
    start_pos: Vec2,
    e_c2d: Vec2,
    target: Vec2,
    recovery_end: Real,
) -> Vec2 {
    let t_c = clip.t_c.unwrap_or(0.0);
    let at_contact = start_pos + (clip.player_at(t_c) - clip.player_at(0.0)) + e_c2d;
    let x_r = at_contact + (clip.player_at(recovery_end) - clip.player_at(t_c));
    target - x_r
}

/// Corrected player position at clip time `t`.
pub fn corrected_position(clip: &ShotCycleClip, plan: &CorrectionPlan, t: Real) -> Vec2 {
    let base = clip.player_at(t) + plan.offset;
    let Some(t_c) = plan.t_c else {
        return base;
    };
    if t <= t_c {
        return base + plan.e_c2d.scale(ease(t / t_c));
    }
    let span = plan.recovery_end - t_c;
    let w = if span > 0.0 {
        ease((t - t_c) / span)
    } else {
        1.0
    };
    base + plan.e_c2d + plan.e_r_applied.scale(w)
}

/// Corrected trace sampled at the clip's interval over `[0, recovery_end]`.
pub fn apply_corrections(clip: &ShotCycleClip, plan: &CorrectionPlan) -> Vec<(Real, Vec2)> {
    let n = crate::clipdb::trace_len(plan.recovery_end, clip.dt);
    (0..n)
        .map(|k| {
            let t = (k as Real * clip.dt).min(plan.recovery_end);
            (t, corrected_position(clip, plan, t))
        })
        .collect()
}

/// Racket position in the court plane at contact after correction.
pub fn corrected_racket(clip: &ShotCycleClip, plan: &CorrectionPlan) -> Option<Vec2> {
    let t_c = plan.t_c?;
    Some(corrected_position(clip, plan, t_c) + (clip.x_c?.xy() - clip.player_at(t_c)))
}

/// Recompute the recovery residual once the phase's real end is known.
pub fn finalize_recovery(
    clip: &ShotCycleClip,
    plan: &mut CorrectionPlan,
    target: Vec2,
    recovery_end: Real,
    th: &Thresholds,
) {
    let start = clip.player_at(0.0) + plan.offset;
    plan.recovery_end = recovery_end;
    plan.e_r = recovery_correction(clip, start, plan.e_c2d, target, recovery_end);
    plan.e_r_applied = clamp_len(plan.e_r, th.max_recover_correction);
}

#[derive(Debug, Clone, PartialEq)]
pub struct Found {
    /// Index into the database.
    pub index: usize,
    pub clip_id: u64,
    pub cost: ClipCostBreakdown,
    pub plan: CorrectionPlan,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    Found(Found),
    /// No candidate is within the reaction limits.
    Unreachable {
        candidates: usize,
    },
}

#[derive(Debug, Clone, Default)]
struct PlayerLists {
    in_play: [Vec<u32>; 7],
    contact: [Vec<u32>; 7],
    no_contact: Vec<u32>,
}

/// Per-database lookup tables for search.
#[derive(Debug, Clone)]
pub struct SearchIndex {
    features: Vec<Features>,
    poses: Vec<Pose>,
    players: HashMap<String, PlayerLists>,
}

impl SearchIndex {
    pub fn new(db: &ClipDatabase) -> Self {
        let mut players: HashMap<String, PlayerLists> = HashMap::new();
        for (i, c) in db.clips().iter().enumerate() {
            let lists = players.entry(c.player_id.clone()).or_default();
            match c.shot_type {
                Some(ShotType::Serve) => {}
                Some(t) => {
                    lists.contact[t.index()].push(i as u32);
                    if c.outcome == ShotOutcome::InPlay {
                        lists.in_play[t.index()].push(i as u32);
                    }
                }
                None => lists.no_contact.push(i as u32),
            }
        }
        Self {
            features: db.clips().iter().map(Features::of).collect(),
            poses: db.clips().iter().map(|c| c.pose_at(0.0)).collect(),
            players,
        }
    }

    /// Rally clips of `player` passing the query's outcome filter and, when
    /// goals are given, of the desired shot type.
    pub fn candidates(&self, player: &str, q: &SearchQuery) -> Vec<u32> {
        let Some(l) = self.players.get(player) else {
            return Vec::new();
        };
        let pick = |lists: &[Vec<u32>; 7]| -> Vec<u32> {
            match q.behavior {
                Some(b) => lists[b.shot_type.index()].clone(),
                None => {
                    let mut all: Vec<u32> = lists.iter().flatten().copied().collect();
                    all.sort_unstable();
                    all
                }
            }
        };
        match q.filter {
            OutcomeFilter::MustContinue => pick(&l.in_play),
            OutcomeFilter::ContactAny => pick(&l.contact),
            OutcomeFilter::MustEndNoContact => l.no_contact.clone(),
        }
    }

    pub fn evaluate(
        &self,
        index: usize,
        q: &SearchQuery,
        w: &CostWeights,
        th: &Thresholds,
    ) -> Evaluation {
        evaluate(&self.features[index], &self.poses[index], q, w, th)
    }

    /// Lowest-cost feasible candidate, ties to the lowest clip id.
    pub fn search(
        &self,
        player: &str,
        q: &SearchQuery,
        w: &CostWeights,
        th: &Thresholds,
    ) -> Result<SearchOutcome, Error> {
        let cands = self.candidates(player, q);
        if cands.is_empty() {
            return Err(Error::EmptyCandidateSet);
        }
        let mut best: Option<(Real, u64, usize, Evaluation)> = None;
        for &i in &cands {
            let i = i as usize;
            let e = self.evaluate(i, q, w, th);
            if !e.feasible {
                continue;
            }
            let id = self.features[i].id;
            let better = match &best {
                None => true,
                Some((t, bid, _, _)) => e.cost.total < *t || (e.cost.total == *t && id < *bid),
            };
            if better {
                best = Some((e.cost.total, id, i, e));
            }
        }
        Ok(match best {
            Some((_, clip_id, index, e)) => SearchOutcome::Found(Found {
                index,
                clip_id,
                cost: e.cost,
                plan: e.plan,
            }),
            None => SearchOutcome::Unreachable {
                candidates: cands.len(),
            },
        })
    }

    /// Shot types with at least one feasible candidate under the query's
    /// filter, ignoring the query's goals.
    pub fn feasible_shot_types(
        &self,
        player: &str,
        q: &SearchQuery,
        w: &CostWeights,
        th: &Thresholds,
    ) -> [bool; 7] {
        let open = SearchQuery {
            behavior: None,
            ..*q
        };
        let mut out = [false; 7];
        for i in self.candidates(player, &open) {
            let f = &self.features[i as usize];
            if let Some(t) = f.shot {
                if !out[t.index()] && self.evaluate(i as usize, &open, w, th).feasible {
                    out[t.index()] = true;
                }
            }
        }
        out
    }
}
