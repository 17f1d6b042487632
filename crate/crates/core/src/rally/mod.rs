//! Point synthesis: serve, then alternating shot cycles until a ruling.
//!
//! The state lives in court coordinates with the server on the near half.
//! Each shot cycle is worked out in the responding player's own frame, where
//! clips and behavior models live, and converted back for the log.

mod log;
pub mod stats;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::behavior::{
    build_descriptor, fit_models, BehaviorDecision, ConditionalModel, ModelConfig, OpponentFilter,
};
use crate::clipdb::{ready_pose, ClipDatabase, Pose, ShotCycleClip};
use crate::court::{region_of, shot_direction, CourtSpec, ServiceCourt, Side};
use crate::physics::{
    aim_at_bounce, simulate_trajectory, AimSpec, ContactPoint, LaunchState, SpinTable, StopRule,
};
use crate::search::{
    corrected_position, corrected_racket, finalize_recovery, CorrectionPlan, CostWeights, Found,
    OutcomeFilter, SearchIndex, SearchOutcome, SearchQuery, Thresholds,
};
use crate::shot::{ShotOutcome, ShotType};
use crate::vec::{Vec2, Vec3};
use crate::{BallTrajectory, Error, Real};

pub use log::{
    ControlOverride, DecisionLevels, EndReason, FlightSummary, RallyEvent, RallyLog, RecoveryFinal,
    ShotCycleRecord,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RallySettings {
    /// Responses after the serve before the point is stopped as a draw.
    pub max_shots: u32,
    /// Longest flight simulated for a serve replayed from its stored launch.
    pub max_flight_time: Real,
    /// Ball sample spacing in snapshots, s.
    pub snapshot_dt: Real,
}

impl Default for RallySettings {
    fn default() -> Self {
        Self {
            max_shots: 100,
            max_flight_time: 6.0,
            snapshot_dt: 0.02,
        }
    }
}

impl RallySettings {
    pub fn validate(&self) -> Result<(), Error> {
        if self.max_shots == 0 || !(self.max_flight_time > 0.0) || !(self.snapshot_dt > 0.0) {
            return Err(Error::Config(
                "rally: max_shots, max_flight_time and snapshot_dt must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Everything besides the data that shapes a simulated point.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EngineParams {
    pub weights: CostWeights,
    pub thresholds: Thresholds,
    pub aim: AimSpec,
    pub spin: SpinTable,
    pub rally: RallySettings,
}

impl EngineParams {
    pub fn validate(&self) -> Result<(), Error> {
        self.weights.validate()?;
        self.thresholds.validate()?;
        self.spin.validate()?;
        self.rally.validate()
    }
}

/// A clip database with its search index and one behavior model per player.
#[derive(Debug, Clone)]
pub struct Engine {
    db: ClipDatabase,
    index: SearchIndex,
    models: BTreeMap<String, ConditionalModel>,
    params: EngineParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Serving,
    InRally,
    Ended,
}

#[derive(Debug, Clone, PartialEq)]
struct ActiveClip {
    index: usize,
    start_time: Real,
    /// In the player's frame.
    plan: CorrectionPlan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlayerState {
    pub id: String,
    pub side: Side,
    /// Where the player is heading after the current shot.
    pub recovery_target: Vec2,
    active: Option<ActiveClip>,
    idle: Vec2,
    pending: Option<ControlOverride>,
}

impl PlayerState {
    fn local2(&self, p: Vec2) -> Vec2 {
        if self.side == Side::Far {
            p.half_turn()
        } else {
            p
        }
    }

    fn local3(&self, p: Vec3) -> Vec3 {
        if self.side == Side::Far {
            p.half_turn()
        } else {
            p
        }
    }

    fn local_ball(&self, b: &BallTrajectory) -> BallTrajectory {
        if self.side == Side::Far {
            b.half_turn()
        } else {
            b.clone()
        }
    }

    pub fn pending_override(&self) -> Option<&ControlOverride> {
        self.pending.as_ref()
    }

    pub fn active_clip(&self) -> Option<(usize, Real)> {
        self.active.as_ref().map(|a| (a.index, a.start_time))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub winner: Option<String>,
    pub reason: EndReason,
}

/// One point in progress.
#[derive(Debug, Clone)]
pub struct RallyState {
    pub point_index: u64,
    pub seed: u64,
    pub phase: Phase,
    pub players: [PlayerState; 2],
    /// Slot of the player who hit the ball in flight.
    pub hitter: usize,
    /// Responses so far; the return of serve is 1.
    pub shot_index: u32,
    /// Ball in flight, on the rally clock.
    pub ball: BallTrajectory,
    pub result: Option<PointResult>,
    pub last_decision: Option<BehaviorDecision>,
    pub log: RallyLog,
    rngs: [ChaCha8Rng; 2],
}

impl RallyState {
    /// Time of the last contact.
    pub fn clock(&self) -> Real {
        self.ball.launch.time
    }

    pub fn responder(&self) -> usize {
        1 - self.hitter
    }

    pub fn slot_of(&self, player: &str) -> Option<usize> {
        self.players.iter().position(|p| p.id == player)
    }

    /// Queue inputs for the player's next shot cycle, replacing any pending
    /// ones.
    pub fn queue_override(&mut self, ov: ControlOverride) -> Result<(), Error> {
        let slot = self
            .slot_of(&ov.player)
            .ok_or_else(|| Error::UnknownPlayer(ov.player.clone()))?;
        self.players[slot].pending = Some(ov);
        Ok(())
    }

    pub fn is_ended(&self) -> bool {
        self.phase == Phase::Ended
    }
}

/// What a client needs to draw the current moment of a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub point_index: u64,
    pub phase: Phase,
    pub shot_index: u32,
    pub clock: Real,
    pub hitter: String,
    pub players: Vec<PlayerSnapshot>,
    /// Active flight as `(t, position)` samples.
    pub ball: Vec<(Real, Vec3)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub last_decision: Option<BehaviorDecision>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<PointResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerSnapshot {
    pub id: String,
    pub side: Side,
    pub position: Vec2,
    pub velocity: Vec2,
    pub recovery_target: Vec2,
}

fn flight_summary(
    traj: &BallTrajectory,
    bounce_error: Real,
    speed_error: Real,
    in_court: bool,
) -> FlightSummary {
    FlightSummary {
        launch: traj.launch,
        bounce: traj.bounce.map(|b| b.pos),
        bounce_time: traj.bounce.map(|b| b.time),
        clears_net: traj
            .net
            .is_some_and(|n| n.before_bounce && n.clearance > 0.0),
        in_court,
        bounce_error,
        speed_error,
    }
}

fn turn_traj(side: Side, t: BallTrajectory) -> BallTrajectory {
    if side == Side::Far {
        t.half_turn()
    } else {
        t
    }
}

fn world_decision(side: Side, b: &BehaviorDecision) -> BehaviorDecision {
    if side == Side::Far {
        BehaviorDecision {
            placement: b.placement.half_turn(),
            recovery: b.recovery.half_turn(),
            ..*b
        }
    } else {
        *b
    }
}

struct Context {
    start_pos: Vec2,
    start_pose: Pose,
    start_velocity: Vec2,
}

impl Engine {
    pub fn new(
        db: ClipDatabase,
        models: Vec<ConditionalModel>,
        params: EngineParams,
    ) -> Result<Self, Error> {
        params.validate()?;
        let index = SearchIndex::new(&db);
        let models = models
            .into_iter()
            .map(|m| (m.player_id().to_string(), m))
            .collect();
        Ok(Self {
            db,
            index,
            models,
            params,
        })
    }

    /// Fit a model against any opponent for every player in the database.
    pub fn fit(db: ClipDatabase, cfg: &ModelConfig, params: EngineParams) -> Result<Self, Error> {
        let ids: Vec<String> = db.players().iter().map(|p| p.id.clone()).collect();
        let models = ids
            .iter()
            .map(|id| fit_models(&db, id, &OpponentFilter::Any, cfg))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(db, models, params)
    }

    pub fn db(&self) -> &ClipDatabase {
        &self.db
    }

    pub fn court(&self) -> &CourtSpec {
        &self.db.court
    }

    pub fn params(&self) -> &EngineParams {
        &self.params
    }

    pub fn model(&self, player: &str) -> Option<&ConditionalModel> {
        self.models.get(player)
    }

    pub fn index(&self) -> &SearchIndex {
        &self.index
    }

    fn clip(&self, i: usize) -> &ShotCycleClip {
        self.db.clip(i)
    }

    fn position_at(&self, p: &PlayerState, t: Real) -> Vec2 {
        match &p.active {
            Some(a) => {
                let local =
                    corrected_position(self.clip(a.index), &a.plan, (t - a.start_time).max(0.0));
                p.local2(local)
            }
            None => p.idle,
        }
    }

    fn pose_at(&self, p: &PlayerState, t: Real) -> Pose {
        match &p.active {
            Some(a) => self
                .clip(a.index)
                .pose_at((t - a.start_time).min(a.plan.recovery_end)),
            None => ready_pose(),
        }
    }

    fn velocity_at(&self, p: &PlayerState, t: Real) -> Vec2 {
        let dt = crate::clipdb::TRACE_DT;
        let Some(a) = &p.active else {
            return Vec2::zero();
        };
        let t0 = (t - dt).max(a.start_time);
        if t - t0 <= 0.0 {
            return Vec2::zero();
        }
        (self.position_at(p, t) - self.position_at(p, t0)).scale(1.0 / (t - t0))
    }

    /// Serve from the near half and return the state waiting on the return.
    pub fn start_point(
        &self,
        server: &str,
        returner: &str,
        seed: u64,
        point_index: u64,
    ) -> Result<RallyState, Error> {
        for id in [server, returner] {
            if self.db.player(id).is_none() {
                return Err(Error::UnknownPlayer(id.to_string()));
            }
        }
        let court = self.db.court;
        let service = ServiceCourt::for_point(point_index);
        let serves: Vec<usize> = self
            .db
            .by_player(server)
            .iter()
            .copied()
            .filter(|&i| {
                self.clip(i).shot_type == Some(ShotType::Serve) && self.clip(i).t_c.is_some()
            })
            .collect();
        if serves.is_empty() {
            return Err(Error::NoServeClips(server.to_string()));
        }
        let in_box: Vec<usize> = serves
            .iter()
            .copied()
            .filter(|&i| {
                self.clip(i)
                    .x_b
                    .is_some_and(|b| court.in_service_box(b, Side::Far, service))
            })
            .collect();
        let mut notes = Vec::new();
        let pool = if in_box.is_empty() {
            notes.push(format!(
                "no serve clip lands in the {service:?} box; sampling all serves"
            ));
            &serves
        } else {
            &in_box
        };
        let mut rngs = [0u64, 1].map(|slot| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            r.set_stream(point_index * 2 + slot);
            r
        });
        let chosen = pool[rngs[0].random_range(0..pool.len())];
        let clip = self.clip(chosen);
        let t_c = clip.t_c.expect("filtered to contact clips");
        let x_c = clip
            .x_c
            .ok_or_else(|| Error::InvalidInput(format!("serve clip {} has no contact", clip.id)))?;

        let (ball, stored, bounce_error, speed_error) = match clip.launch {
            Some(l) => {
                let launch = LaunchState { time: t_c, ..l };
                let traj = simulate_trajectory(
                    &launch,
                    &self.db.flight,
                    &court,
                    StopRule::open(self.params.rally.max_flight_time),
                )?;
                (traj, true, 0.0, 0.0)
            }
            None => {
                let target = clip.x_b.ok_or_else(|| {
                    Error::InvalidInput(format!("serve clip {} has no bounce", clip.id))
                })?;
                let speed = clip.v_b().unwrap_or(30.0);
                let r = aim_at_bounce(
                    &ContactPoint {
                        time: t_c,
                        pos: x_c,
                    },
                    target,
                    speed,
                    self.params.spin.get(ShotType::Serve),
                    &self.db.flight,
                    &court,
                    &self.params.aim,
                )?;
                (r.trajectory, false, r.bounce_error, r.speed_error)
            }
        };
        let lands_in = ball
            .bounce
            .is_some_and(|b| court.in_service_box(b.pos, Side::Far, service));
        let plan = CorrectionPlan {
            offset: Vec2::zero(),
            e_c2d: Vec2::zero(),
            z_error: 0.0,
            e_r: Vec2::zero(),
            e_r_applied: Vec2::zero(),
            t_c: Some(t_c),
            recovery_end: clip.t_r,
            ball: Some(x_c),
        };
        let players = [
            PlayerState {
                id: server.to_string(),
                side: Side::Near,
                recovery_target: clip.recovery_position(),
                active: Some(ActiveClip {
                    index: chosen,
                    start_time: 0.0,
                    plan,
                }),
                idle: clip.player_at(0.0),
                pending: None,
            },
            PlayerState {
                id: returner.to_string(),
                side: Side::Far,
                recovery_target: clip.opponent_at(t_c),
                active: None,
                idle: clip.opponent_at(t_c),
                pending: None,
            },
        ];
        let mut log = RallyLog::default();
        log.events.push(RallyEvent::PointStart {
            point_index,
            seed,
            server: server.to_string(),
            returner: returner.to_string(),
            service_court: service,
        });
        log.events.push(RallyEvent::Serve {
            player: server.to_string(),
            clip_id: clip.id,
            contact_time: t_c,
            contact: ball.launch.origin,
            flight: flight_summary(&ball, bounce_error, speed_error, lands_in),
            stored_launch: stored,
            notes,
        });
        let mut state = RallyState {
            point_index,
            seed,
            phase: Phase::Serving,
            players,
            hitter: 0,
            shot_index: 0,
            ball,
            result: None,
            last_decision: None,
            log,
            rngs,
        };
        if !lands_in {
            self.end(&mut state, Some(1), EndReason::Error);
        }
        Ok(state)
    }

    fn end(&self, state: &mut RallyState, winner: Option<usize>, reason: EndReason) {
        state.phase = Phase::Ended;
        let winner_id = winner.map(|w| state.players[w].id.clone());
        let loser_id = winner.map(|w| state.players[1 - w].id.clone());
        state.result = Some(PointResult {
            winner: winner_id.clone(),
            reason,
        });
        state.log.events.push(RallyEvent::PointEnd {
            winner: winner_id,
            loser: loser_id,
            reason,
            responses: state.shot_index,
            clock: state.clock(),
        });
    }

    /// Run one shot cycle for the responding player. Returns the number of
    /// events appended to the log.
    pub fn step(&self, state: &mut RallyState) -> Result<usize, Error> {
        if state.phase == Phase::Ended {
            return Err(Error::RallyEnded);
        }
        let before = state.log.events.len();
        state.phase = Phase::InRally;
        let r = state.responder();
        let h = state.hitter;
        let court = self.db.court;
        let t0 = state.clock();
        let me = &state.players[r];
        let player_id = me.id.clone();
        let model = self
            .models
            .get(&player_id)
            .ok_or_else(|| Error::UnknownPlayer(player_id.clone()))?;
        let ball = me.local_ball(&state.ball);
        let ctx = Context {
            start_pos: me.local2(self.position_at(me, t0)),
            start_pose: self.pose_at(me, t0),
            start_velocity: me.local2(self.velocity_at(me, t0)),
        };
        let opponent_recovery = me.local2(state.players[h].recovery_target);
        let control = state.players[r].pending.take();
        state.shot_index += 1;
        let mut rec = ShotCycleRecord {
            shot_index: state.shot_index,
            player: player_id.clone(),
            start_time: t0,
            contact_time: None,
            descriptor: None,
            cell: None,
            levels: None,
            sampled: None,
            decision: None,
            control: control.clone(),
            filter: OutcomeFilter::ContactAny,
            clip_id: None,
            cost: None,
            e_c2d: None,
            z_error: None,
            ball: None,
            racket: None,
            hitter_position: None,
            direction: None,
            flight: None,
            outcome: ShotOutcome::NoContact,
            finalized_recovery: None,
            notes: Vec::new(),
        };
        let query = |behavior: Option<BehaviorDecision>, filter| SearchQuery {
            behavior,
            incoming: &ball,
            start_time: t0,
            start_pos: ctx.start_pos,
            start_pose: ctx.start_pose,
            start_velocity: ctx.start_velocity,
            filter,
        };
        let (w, th) = (&self.params.weights, &self.params.thresholds);

        // The responder's reachability is ruled on before anything else.
        let reachable = self.index.feasible_shot_types(
            &player_id,
            &query(None, OutcomeFilter::ContactAny),
            w,
            th,
        );
        let descriptor = if reachable.iter().any(|&b| b) {
            match build_descriptor(
                &ball,
                t0,
                ctx.start_pos,
                opponent_recovery,
                &court,
                &model.config().descriptor.bins,
            ) {
                Ok((d, _)) => Some(d),
                Err(e) => {
                    rec.notes.push(format!("no contact estimate: {e}"));
                    None
                }
            }
        } else {
            None
        };
        let Some(descriptor) = descriptor else {
            self.unreachable(state, rec, &query(None, OutcomeFilter::MustEndNoContact));
            return Ok(state.log.events.len() - before);
        };

        let continuing = self.index.feasible_shot_types(
            &player_id,
            &query(None, OutcomeFilter::MustContinue),
            w,
            th,
        );
        let allowed = if continuing.iter().any(|&b| b) {
            continuing
        } else {
            reachable
        };
        let key = model.key(&descriptor);
        rec.descriptor = Some(descriptor);
        rec.cell = Some(key);
        let rng = &mut state.rngs[r];
        let sel = model.sample_shot_selection(key, allowed, rng)?;
        let recovery = model.recovery_target(key, sel.placement, &court, rng)?;
        rec.levels = Some(DecisionLevels {
            shot: sel.shot_level,
            velocity: sel.velocity_level,
            placement: sel.placement_level,
            recovery: recovery.level,
        });
        let sampled = BehaviorDecision {
            shot_type: sel.shot_type,
            shot_velocity: sel.velocity,
            placement: sel.placement,
            recovery: recovery.target,
            approach_net: recovery.approach_net,
        };
        let mut decision = sampled;
        let me = &state.players[r];
        if let Some(ov) = &control {
            if let Some(p) = ov.placement {
                decision.placement = me.local2(p);
            }
            if let Some(p) = ov.recovery {
                decision.recovery = me.local2(p);
            }
            if let Some(t) = ov.shot_type {
                decision.shot_type = t;
            }
        }
        rec.sampled = Some(world_decision(me.side, &sampled));
        rec.decision = Some(world_decision(me.side, &decision));
        state.last_decision = rec.decision;

        let placement_in = court.in_half(decision.placement, Side::Far);
        let filter = if placement_in {
            OutcomeFilter::MustContinue
        } else {
            OutcomeFilter::ContactAny
        };
        let found = match self.find_clip(&player_id, decision, allowed, &query, filter, &mut rec) {
            Some((f, t)) => {
                decision.shot_type = t;
                state.last_decision = rec.decision;
                f
            }
            None => {
                rec.notes.push("no clip realizes the decision".into());
                self.unreachable(state, rec, &query(None, OutcomeFilter::MustEndNoContact));
                return Ok(state.log.events.len() - before);
            }
        };
        let clip = self.clip(found.index);
        let plan = found.plan;
        let t_c = plan.t_c.expect("contact clips only");
        let contact_time = t0 + t_c;
        let ball_c = plan.ball.expect("contact clips have a ball position");
        let me = &state.players[r];
        let racket = corrected_racket(clip, &plan).expect("contact clip");
        let at_contact = corrected_position(clip, &plan, t_c);
        rec.clip_id = Some(found.clip_id);
        rec.cost = Some(found.cost);
        rec.contact_time = Some(contact_time);
        rec.e_c2d = Some(me.local2(plan.e_c2d));
        rec.z_error = Some(plan.z_error);
        rec.ball = Some(me.local3(ball_c));
        rec.racket = Some(me.local2(racket));
        rec.hitter_position = Some(me.local2(at_contact));
        if decision.shot_type.is_groundstroke() {
            rec.direction = Some(shot_direction(
                region_of(at_contact, &court),
                decision.placement,
                &court,
            ));
        }

        let aimed = aim_at_bounce(
            &ContactPoint {
                time: contact_time,
                pos: ball_c,
            },
            decision.placement,
            decision.shot_velocity,
            self.params.spin.get(decision.shot_type),
            &self.db.flight,
            &court,
            &self.params.aim,
        );
        let (outgoing, in_play) = match aimed {
            Ok(a) => {
                let lands_in = a
                    .trajectory
                    .bounce
                    .is_some_and(|b| court.in_half(b.pos, Side::Far));
                let ok = placement_in && a.clears_net && lands_in;
                rec.flight = Some(flight_summary(
                    &turn_traj(me.side, a.trajectory.clone()),
                    a.bounce_error,
                    a.speed_error,
                    lands_in,
                ));
                (Some(a.trajectory), ok)
            }
            Err(e) => {
                rec.notes.push(format!("outgoing flight not found: {e}"));
                (None, false)
            }
        };
        rec.outcome = if in_play {
            ShotOutcome::InPlay
        } else {
            ShotOutcome::Error
        };

        // The opponent's recovery now ends at this contact.
        let opp = &mut state.players[h];
        if let Some(a) = opp.active.as_mut() {
            let oclip = self.db.clip(a.index);
            let target = opp.recovery_target;
            let target_local = if opp.side == Side::Far {
                target.half_turn()
            } else {
                target
            };
            finalize_recovery(
                oclip,
                &mut a.plan,
                target_local,
                contact_time - a.start_time,
                th,
            );
            let e_r = if opp.side == Side::Far {
                a.plan.e_r_applied.half_turn()
            } else {
                a.plan.e_r_applied
            };
            rec.finalized_recovery = Some(RecoveryFinal {
                player: opp.id.clone(),
                clip_id: oclip.id,
                end_time: contact_time,
                e_r,
            });
        }

        let me = &mut state.players[r];
        me.recovery_target = me.local2(decision.recovery);
        me.active = Some(ActiveClip {
            index: found.index,
            start_time: t0,
            plan,
        });
        let side = me.side;
        if let Some(out) = outgoing {
            state.ball = turn_traj(side, out);
        } else {
            // Keep the clock moving: a stub flight that starts at the contact.
            state.ball = stub_flight(contact_time, me.local3(ball_c));
        }
        state.hitter = r;
        state.log.events.push(RallyEvent::ShotCycle(Box::new(rec)));
        if !in_play {
            self.end(state, Some(h), EndReason::Error);
        } else if state.shot_index >= self.params.rally.max_shots {
            self.end(state, None, EndReason::Truncated);
        }
        Ok(state.log.events.len() - before)
    }

    /// Best clip for `decision`, substituting an allowed shot type when no
    /// clip of the decided type fits. Updates the decision's shot type.
    fn find_clip<'q>(
        &self,
        player: &str,
        mut decision: BehaviorDecision,
        allowed: [bool; 7],
        query: &impl Fn(Option<BehaviorDecision>, OutcomeFilter) -> SearchQuery<'q>,
        filter: OutcomeFilter,
        rec: &mut ShotCycleRecord,
    ) -> Option<(Found, ShotType)> {
        let (w, th) = (&self.params.weights, &self.params.thresholds);
        let mut tries: Vec<(ShotType, OutcomeFilter)> = vec![(decision.shot_type, filter)];
        if filter == OutcomeFilter::MustContinue {
            tries.push((decision.shot_type, OutcomeFilter::ContactAny));
        }
        for t in ShotType::ALL {
            if allowed[t.index()] && t != decision.shot_type {
                tries.push((t, filter));
                if filter == OutcomeFilter::MustContinue {
                    tries.push((t, OutcomeFilter::ContactAny));
                }
            }
        }
        for (i, (t, f)) in tries.into_iter().enumerate() {
            decision.shot_type = t;
            if let Ok(SearchOutcome::Found(found)) =
                self.index.search(player, &query(Some(decision), f), w, th)
            {
                if i > 0 {
                    rec.notes
                        .push(format!("searched as {} with {:?}", t.label(), f));
                }
                rec.filter = f;
                if let Some(d) = rec.decision.as_mut() {
                    d.shot_type = t;
                }
                return Some((found, t));
            }
        }
        None
    }

    fn unreachable(&self, state: &mut RallyState, mut rec: ShotCycleRecord, q: &SearchQuery) {
        let r = state.responder();
        let player = state.players[r].id.clone();
        rec.filter = OutcomeFilter::MustEndNoContact;
        if let Ok(SearchOutcome::Found(f)) =
            self.index
                .search(&player, q, &self.params.weights, &self.params.thresholds)
        {
            rec.clip_id = Some(f.clip_id);
            rec.cost = Some(f.cost);
            let p = &mut state.players[r];
            p.active = Some(ActiveClip {
                index: f.index,
                start_time: q.start_time,
                plan: f.plan,
            });
        }
        rec.outcome = ShotOutcome::NoContact;
        state.log.events.push(RallyEvent::ShotCycle(Box::new(rec)));
        let h = state.hitter;
        self.end(state, Some(h), EndReason::Unreachable);
    }

    /// Serve and step until the point ends.
    pub fn run_rally(
        &self,
        server: &str,
        returner: &str,
        seed: u64,
        point_index: u64,
    ) -> Result<RallyLog, Error> {
        let mut state = self.start_point(server, returner, seed, point_index)?;
        while !state.is_ended() {
            self.step(&mut state)?;
        }
        Ok(state.log)
    }

    /// `n_points` points between `pair`, serving alternately. Points run on
    /// worker threads and come back in point order.
    pub fn run_batch(
        &self,
        pair: [&str; 2],
        n_points: u64,
        seed: u64,
    ) -> Result<Vec<RallyLog>, Error> {
        let workers = std::thread::available_parallelism()
            .map_or(1, |n| n.get())
            .min(n_points.max(1) as usize);
        let run = |i: u64| {
            let s = (i % 2) as usize;
            self.run_rally(pair[s], pair[1 - s], seed, i)
        };
        if workers <= 1 {
            return (0..n_points).map(run).collect();
        }
        let mut out: Vec<Option<Result<RallyLog, Error>>> = (0..n_points).map(|_| None).collect();
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|k| {
                    let run = &run;
                    scope.spawn(move || {
                        (k as u64..n_points)
                            .step_by(workers)
                            .map(|i| (i, run(i)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                for (i, r) in h.join().expect("rally worker panicked") {
                    out[i as usize] = Some(r);
                }
            }
        });
        out.into_iter()
            .map(|r| r.expect("every point ran"))
            .collect()
    }

    pub fn snapshot(&self, state: &RallyState) -> Snapshot {
        let t = state.clock();
        Snapshot {
            point_index: state.point_index,
            phase: state.phase,
            shot_index: state.shot_index,
            clock: t,
            hitter: state.players[state.hitter].id.clone(),
            players: state
                .players
                .iter()
                .map(|p| PlayerSnapshot {
                    id: p.id.clone(),
                    side: p.side,
                    position: self.position_at(p, t),
                    velocity: self.velocity_at(p, t),
                    recovery_target: p.recovery_target,
                })
                .collect(),
            ball: state.ball.resample(self.params.rally.snapshot_dt),
            last_decision: state.last_decision,
            result: state.result.clone(),
        }
    }
}

fn stub_flight(time: Real, pos: Vec3) -> BallTrajectory {
    use crate::physics::{BallSample, EndReason as FlightEnd, SpinKind};
    BallTrajectory {
        launch: LaunchState {
            time,
            origin: pos,
            heading: Vec2::new(0.0, 1.0),
            v_h: 0.0,
            v_z: 0.0,
            v_spin: 0.0,
            spin: SpinKind::Topspin,
        },
        samples: vec![BallSample {
            t: time,
            pos,
            v_h: 0.0,
            v_z: 0.0,
        }],
        bounce: None,
        net: None,
        end_time: time,
        end_pos: pos,
        end_reason: FlightEnd::MaxTime,
    }
}
