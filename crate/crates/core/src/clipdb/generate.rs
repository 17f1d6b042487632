//! Synthetic clip databases from scripted rallies between player archetypes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::pose::{pose_at_phase, PoseBank};
use super::{trace_len, ClipDatabase, PlayerInfo, Pose, ShotCycleClip, TRACE_DT};
use crate::court::{region_of, CourtSpec, Lateral, ServiceCourt, Side};
use crate::physics::{
    aim_at_bounce, intercept, AimSpec, BallTrajectory, ContactHeuristic, ContactPoint,
    FlightParams, LaunchState, SpinTable,
};
use crate::shot::{Handedness, ShotOutcome, ShotType};
use crate::vec::{Vec2, Vec3};
use crate::{Error, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShotSpeed {
    /// Mean contact-to-bounce ground speed, m/s.
    pub mean: Real,
    pub std: Real,
}

/// Scripted-policy parameters for one synthetic player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArchetypeSpec {
    pub player_id: String,
    pub handedness: Handedness,
    /// Probability that a groundstroke hit from a wing goes cross court.
    pub cross_court_bias: Real,
    /// Probability that it goes down the line; the rest goes to the middle.
    pub down_line_bias: Real,
    /// Probability of recovering toward the net after a shot.
    pub net_approach_rate: Real,
    /// Recovery depth behind the baseline, m.
    pub baseline_depth_mean: Real,
    pub baseline_depth_std: Real,
    /// Indexed like [`ShotType::ALL`].
    pub shot_speed: [ShotSpeed; 7],
    pub error_rate: Real,
    /// Fraction of groundstrokes hit with underspin when not stretched.
    pub underspin_rate: Real,
    /// Fastest the player moves to reach a ball, m/s.
    pub max_speed: Real,
}

impl Default for ArchetypeSpec {
    fn default() -> Self {
        let s = |mean, std| ShotSpeed { mean, std };
        Self {
            player_id: "player".into(),
            handedness: Handedness::Right,
            cross_court_bias: 0.55,
            down_line_bias: 0.25,
            net_approach_rate: 0.08,
            baseline_depth_mean: 1.0,
            baseline_depth_std: 0.4,
            shot_speed: [
                s(32.0, 3.0),
                s(24.0, 3.0),
                s(17.0, 2.0),
                s(22.0, 3.0),
                s(16.0, 2.0),
                s(17.0, 3.0),
                s(16.0, 3.0),
            ],
            error_rate: 0.08,
            underspin_rate: 0.2,
            max_speed: 5.5,
        }
    }
}

impl ArchetypeSpec {
    pub fn named(id: &str) -> Self {
        Self {
            player_id: id.into(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: String| {
            Err(Error::Config(format!(
                "archetype `{}`: {m}",
                self.player_id
            )))
        };
        for (name, p) in [
            ("cross_court_bias", self.cross_court_bias),
            ("down_line_bias", self.down_line_bias),
            ("net_approach_rate", self.net_approach_rate),
            ("error_rate", self.error_rate),
            ("underspin_rate", self.underspin_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must be in [0, 1], got {p}"));
            }
        }
        if self.cross_court_bias + self.down_line_bias > 1.0 + 1e-12 {
            return bad("cross_court_bias + down_line_bias exceeds 1".into());
        }
        if !(self.baseline_depth_std >= 0.0)
            || self
                .shot_speed
                .iter()
                .any(|s| !(s.std >= 0.0 && s.mean > 0.0))
        {
            return bad("standard deviations must be >= 0 and means positive".into());
        }
        if !(self.max_speed > 0.0) {
            return bad("max_speed must be positive".into());
        }
        Ok(())
    }
}

/// Physical settings shared by the generator and the engine.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GeneratorSettings {
    pub court: CourtSpec,
    pub flight: FlightParams,
    pub aim: AimSpec,
    pub spin: SpinTable,
    pub contact: ContactHeuristic,
    /// Shots after which the scripted hitter is forced to miss.
    pub max_shots: u32,
}

impl GeneratorSettings {
    pub fn standard() -> Self {
        Self {
            max_shots: 30,
            ..Self::default()
        }
    }
}

/// Half-width of the window around contact during which the player's root
/// is planted.
const PLANT: Real = 0.06;
/// Clip length after a point-ending shot.
const TAIL: Real = 1.5;

fn round4(v: Real) -> Real {
    (v * 1e4).round() / 1e4
}

fn round_vec(p: Vec2) -> Vec2 {
    Vec2::new(round4(p.x), round4(p.y))
}

fn smooth(u: Real) -> Real {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

/// Piecewise ease-in/ease-out path through timed keyframes.
#[derive(Debug, Clone, Default)]
struct Path {
    keys: Vec<(Real, Vec2)>,
}

impl Path {
    fn push(&mut self, t: Real, p: Vec2) {
        if let Some(&(last, _)) = self.keys.last() {
            debug_assert!(t >= last);
        }
        self.keys.push((t, p));
    }

    fn last(&self) -> Vec2 {
        self.keys.last().map_or(Vec2::zero(), |k| k.1)
    }

    fn at(&self, t: Real) -> Vec2 {
        let i = self.keys.partition_point(|k| k.0 <= t);
        if i == 0 {
            return self.keys.first().map_or(Vec2::zero(), |k| k.1);
        }
        if i >= self.keys.len() {
            return self.last();
        }
        let (t0, a) = self.keys[i - 1];
        let (t1, b) = self.keys[i];
        if t1 <= t0 {
            return b;
        }
        a.lerp(b, smooth((t - t0) / (t1 - t0)))
    }
}

struct Actor<'a> {
    arch: &'a ArchetypeSpec,
    side: Side,
    path: Path,
    recovery: Vec2,
}

struct Shot {
    hitter: usize,
    /// Global time of the clip start (the opponent's contact).
    start: Real,
    t_c: Real,
    t_r: Real,
    shot_type: ShotType,
    outcome: ShotOutcome,
    x_c: Vec3,
    launch: Option<LaunchState>,
    bounce: Option<(Real, Vec2)>,
}

struct Miss {
    player: usize,
    start: Real,
}

struct Ctx<'a> {
    settings: &'a GeneratorSettings,
    rng: ChaCha8Rng,
}

impl<'a> Ctx<'a> {
    fn normal(&mut self, mean: Real, std: Real) -> Real {
        if std <= 0.0 {
            return mean;
        }
        Normal::new(mean, std)
            .map(|n| n.sample(&mut self.rng))
            .unwrap_or(mean)
    }

    fn uniform(&mut self, lo: Real, hi: Real) -> Real {
        lo + (hi - lo) * self.rng.random::<Real>()
    }

    fn chance(&mut self, p: Real) -> bool {
        self.rng.random::<Real>() < p
    }

    fn court(&self) -> &CourtSpec {
        &self.settings.court
    }

    fn aim(
        &self,
        x_c: Vec3,
        target: Vec2,
        speed: Real,
        shot: ShotType,
    ) -> Result<BallTrajectory, Error> {
        let s = self.settings;
        let contact = ContactPoint {
            time: 0.0,
            pos: x_c,
        };
        let r = aim_at_bounce(
            &contact,
            target,
            speed,
            s.spin.get(shot),
            &s.flight,
            &s.court,
            &s.aim,
        )?;
        if r.clears_net {
            Ok(r.trajectory)
        } else {
            Err(Error::Generation("shot does not clear the net".into()))
        }
    }

    fn speed(&mut self, arch: &ArchetypeSpec, shot: ShotType) -> Real {
        let s = arch.shot_speed[shot.index()];
        self.normal(s.mean, s.std).clamp(8.0, 55.0)
    }

    /// Recovery goal after a shot placed at `x_b` (or aimed at it).
    fn recovery(&mut self, actor: &Actor, placement: Vec2) -> Vec2 {
        let sign = actor.side.y_sign::<Real>();
        let half = self.court().half_length();
        if self.chance(actor.arch.net_approach_rate) {
            let x = 0.3 * placement.x + self.normal(0.0, 0.3);
            Vec2::new(x, sign * self.uniform(2.5, 4.5))
        } else {
            let x = 0.2 * placement.x + self.normal(0.0, 0.35);
            let depth = self
                .normal(
                    actor.arch.baseline_depth_mean,
                    actor.arch.baseline_depth_std,
                )
                .clamp(-0.5, 4.0);
            Vec2::new(x, sign * (half + depth))
        }
    }

    /// Target bounce point for a groundstroke or volley hit by `hitter` from
    /// `lateral`, with an optional miss.
    fn placement(&mut self, hitter: &Actor, lateral: Lateral, volley: bool, miss: bool) -> Vec2 {
        let court = *self.court();
        let receiver = hitter.side.opposite();
        let band = court.band_width();
        let arch = hitter.arch;
        let to = match lateral {
            Lateral::Center => match self.rng.random_range(0..3) {
                0 => Lateral::Deuce,
                1 => Lateral::Center,
                _ => Lateral::Ad,
            },
            wing => {
                let u: Real = self.rng.random();
                if u < arch.cross_court_bias {
                    wing
                } else if u < arch.cross_court_bias + arch.down_line_bias {
                    if wing == Lateral::Deuce {
                        Lateral::Ad
                    } else {
                        Lateral::Deuce
                    }
                } else {
                    Lateral::Center
                }
            }
        };
        let (center, spread) = match to {
            Lateral::Deuce => (-band, 0.9),
            Lateral::Center => (0.0, 0.5),
            Lateral::Ad => (band, 0.9),
        };
        let mut local_x = center + self.uniform(-spread, spread);
        let half = court.half_length();
        let mut depth = if volley {
            self.uniform(4.5, 10.5)
        } else {
            self.uniform(half - 3.8, half - 0.6)
        };
        if miss {
            if to != Lateral::Center && self.chance(0.5) {
                local_x = local_x.signum() * (court.half_singles() + self.uniform(0.2, 1.2));
            } else {
                depth = half + self.uniform(0.3, 1.8);
            }
        }
        Vec2::new(
            receiver.to_local_x(local_x),
            receiver.y_sign::<Real>() * depth,
        )
    }
}

/// Where a player standing at `p0` meets the ball: `(time, ball, volley)`.
fn find_contact(traj: &BallTrajectory, p0: Vec2, front: bool) -> Option<(Real, Vec3, bool)> {
    let bounce_t = traj.bounce.map(|b| b.time);
    if let Ok((t, pos)) = intercept(traj, p0.y) {
        let before = bounce_t.is_none_or(|tb| t < tb);
        if !before || front {
            return Some((t, pos, before));
        }
    }
    // Let it bounce and take it on the way down.
    let tb = bounce_t?;
    let after: Vec<_> = traj.samples.iter().filter(|s| s.t > tb).collect();
    let apex = after
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.pos.z.total_cmp(&b.1.pos.z))?
        .0;
    let pick = after[apex..]
        .iter()
        .find(|s| s.pos.z <= 1.0)
        .unwrap_or(&after[apex]);
    Some((pick.t, pick.pos, false))
}

fn stroke(local_dx: Real, hand: Handedness, volley: bool, underspin: bool) -> ShotType {
    // Racket side is local -x for right-handers.
    let forehand = match hand {
        Handedness::Right => local_dx <= 0.3,
        Handedness::Left => local_dx >= -0.3,
    };
    match (forehand, volley, underspin) {
        (true, true, _) => ShotType::ForehandVolley,
        (false, true, _) => ShotType::BackhandVolley,
        (true, false, false) => ShotType::ForehandTopspin,
        (true, false, true) => ShotType::ForehandUnderspin,
        (false, false, false) => ShotType::BackhandTopspin,
        (false, false, true) => ShotType::BackhandUnderspin,
    }
}

/// Play one scripted point with `players[0]` serving from the near half.
fn play_point(
    ctx: &mut Ctx,
    players: [&ArchetypeSpec; 2],
    service: ServiceCourt,
) -> Result<(Vec<Shot>, Option<Miss>, [Path; 2]), Error> {
    let court = *ctx.court();
    let half = court.half_length();
    let heur = ctx.settings.contact;
    let mut actors = [
        Actor {
            arch: players[0],
            side: Side::Near,
            path: Path::default(),
            recovery: Vec2::zero(),
        },
        Actor {
            arch: players[1],
            side: Side::Far,
            path: Path::default(),
            recovery: Vec2::zero(),
        },
    ];
    // Near deuce is x < 0; the far deuce box is x > 0.
    let lat = if service == ServiceCourt::Deuce {
        1.0
    } else {
        -1.0
    };
    let server_pos = Vec2::new(-lat * ctx.uniform(0.3, 1.2), half + 0.15);
    let returner_depth = ctx.normal(1.0, 0.3).clamp(0.0, 2.5);
    let returner_pos = Vec2::new(lat * ctx.uniform(2.6, 3.4), -(half + returner_depth));
    let t_serve = ctx.uniform(0.9, 1.1);
    let x_c = Vec3::new(server_pos.x, server_pos.y - 0.45, ctx.normal(2.75, 0.05));
    let mut serve_traj = None;
    for _ in 0..12 {
        let target = Vec2::new(lat * ctx.uniform(0.3, 3.8), -ctx.uniform(4.3, 6.1));
        let speed = ctx.speed(players[0], ShotType::Serve);
        if let Ok(tr) = ctx.aim(x_c, target, speed, ShotType::Serve) {
            let ok = tr
                .bounce
                .is_some_and(|b| court.in_service_box(b.pos, Side::Far, service));
            if ok {
                serve_traj = Some(tr);
                break;
            }
        }
    }
    let mut traj = serve_traj.ok_or_else(|| Error::Generation("could not place a serve".into()))?;
    let serve_spot = Vec2::new(server_pos.x, server_pos.y - 0.35);
    actors[0].path.push(0.0, server_pos);
    actors[0].path.push(t_serve - PLANT, serve_spot);
    actors[0].path.push(t_serve + PLANT, serve_spot);
    actors[1].path.push(0.0, returner_pos);
    actors[1].path.push(t_serve, returner_pos);
    let serve_bounce = traj.bounce.map(|b| b.pos).unwrap_or_default();
    actors[0].recovery = ctx.recovery(&actors[0], serve_bounce);

    let mut shots = vec![Shot {
        hitter: 0,
        start: 0.0,
        t_c: t_serve,
        t_r: 0.0,
        shot_type: ShotType::Serve,
        outcome: ShotOutcome::InPlay,
        x_c,
        launch: Some(LaunchState {
            time: t_serve,
            ..traj.launch
        }),
        bounce: traj.bounce.map(|b| (t_serve + b.time, b.pos)),
    }];
    let mut t_hit = t_serve;
    let (mut h, mut r) = (0usize, 1usize);
    loop {
        let p0 = actors[r].path.last();
        let front = p0.y.abs() < court.depth_boundary();
        let arch = actors[r].arch;
        let hand = arch.handedness;
        let side = actors[r].side;
        let contact = find_contact(&traj, p0, front).and_then(|(t, ball, volley)| {
            let local_dx = side.to_local_x(ball.x - p0.x);
            let stretched = (ball.xy() - p0).norm() / t.max(1e-3) > 0.6 * arch.max_speed;
            let underspin_p = if stretched {
                (2.0 * arch.underspin_rate).min(1.0)
            } else {
                arch.underspin_rate
            };
            let under = !volley && ctx.chance(underspin_p);
            let shot = stroke(local_dx, hand, volley, under);
            let dx = heur.lateral_offset(side, shot, hand);
            let p_c = round_vec(Vec2::new(ball.x - dx, ball.y));
            let needed = (p_c - p0).norm() / (t - PLANT).max(1e-3);
            (t > 2.0 * PLANT && needed <= arch.max_speed).then_some((t, ball, shot, p_c))
        });
        let last = shots.len() - 1;
        let Some((t_rel, ball, shot, p_c)) = contact else {
            // Winner: the receiver gives chase and stops.
            shots[last].outcome = ShotOutcome::Winner;
            shots[last].t_r = shots[last].t_c + TAIL;
            let rec = actors[h].recovery;
            actors[h].path.push(t_hit + TAIL - 0.1, rec);
            let aim = intercept(&traj, p0.y)
                .map(|(_, b)| b.xy())
                .or_else(|_| traj.bounce.map(|b| b.pos).ok_or(()));
            let chase = aim
                .map(|b| p0 + (b - p0).clamp_norm(arch.max_speed * 0.7))
                .unwrap_or(p0);
            actors[r].path.push(t_hit + 1.0, chase);
            return Ok((
                shots,
                Some(Miss {
                    player: r,
                    start: t_hit,
                }),
                actors.map(|a| a.path),
            ));
        };
        let t_abs = t_hit + t_rel;
        let rec = actors[h].recovery;
        actors[h].path.push(t_abs, rec);
        actors[r].path.push(t_abs - PLANT, p_c);
        actors[r].path.push(t_abs + PLANT, p_c);
        shots[last].t_r = shots[last].t_c + t_rel;

        let forced = shots.len() as u32 >= ctx.settings.max_shots.max(2);
        let miss = forced || ctx.chance(arch.error_rate);
        let lateral = region_of(p_c, &court).lateral;
        let speed0 = ctx.speed(arch, shot);
        let mut outgoing = None;
        for attempt in 0..6 {
            let target = ctx.placement(&actors[r], lateral, shot.is_volley(), miss);
            let speed = if attempt == 0 {
                speed0
            } else {
                ctx.speed(arch, shot)
            };
            if let Ok(tr) = ctx.aim(ball, target, speed, shot) {
                let landed = tr.bounce.map(|b| b.pos);
                let in_court = landed.is_some_and(|b| court.in_half(b, side.opposite()));
                if in_court == miss {
                    continue;
                }
                outgoing = Some((tr, target));
                break;
            }
        }
        let net_error = outgoing.is_none();
        let aimed = outgoing.as_ref().map(|(_, t)| *t);
        let recovery_hint = aimed.unwrap_or(Vec2::new(0.0, -side.y_sign::<Real>() * half));
        actors[r].recovery = ctx.recovery(&actors[r], recovery_hint);
        let (launch, bounce) = match &outgoing {
            Some((tr, _)) => (
                Some(LaunchState {
                    time: t_rel,
                    ..tr.launch
                }),
                tr.bounce.map(|b| (t_rel + b.time, b.pos)),
            ),
            None => (None, None),
        };
        let ends = miss || net_error;
        shots.push(Shot {
            hitter: r,
            start: t_hit,
            t_c: t_rel,
            t_r: if ends { t_rel + TAIL } else { 0.0 },
            shot_type: shot,
            outcome: if ends {
                ShotOutcome::Error
            } else {
                ShotOutcome::InPlay
            },
            x_c: ball,
            launch,
            bounce,
        });
        if ends {
            let rec = actors[r].recovery;
            actors[r].path.push(t_abs + TAIL - 0.1, rec);
            return Ok((shots, None, actors.map(|a| a.path)));
        }
        traj = outgoing.map(|(tr, _)| tr).expect("checked above");
        t_hit = t_abs;
        std::mem::swap(&mut h, &mut r);
    }
}

struct Naming<'a> {
    ids: [&'a str; 2],
    hands: [Handedness; 2],
}

fn sample_traces(path: &Path, other: &Path, start: Real, t_r: Real) -> (Vec<Vec2>, Vec<Vec2>) {
    let n = trace_len(t_r, TRACE_DT);
    let at = |p: &Path, k: usize| round_vec(p.at(start + k as Real * TRACE_DT));
    (
        (0..n).map(|k| at(path, k)).collect(),
        (0..n).map(|k| at(other, k)).collect(),
    )
}

fn pose_trace(
    bank: &PoseBank,
    shot: Option<ShotType>,
    hand: Handedness,
    t_c: Option<Real>,
    t_r: Real,
    jitter: &[Vec2; 14],
) -> Vec<Pose> {
    let n = trace_len(t_r, TRACE_DT);
    (0..n)
        .map(|k| {
            let p = pose_at_phase(bank, shot, hand, k as Real * TRACE_DT, t_c, t_r);
            std::array::from_fn(|j| round_vec(p[j] + jitter[j]))
        })
        .collect()
}

/// Simulate `n_points` scripted points between every pair of archetypes in
/// turn and cut them into shot-cycle clips. Servers alternate within a pair,
/// service courts alternate by point, and every other point is mirrored to
/// the opposite ends so both halves appear in the data.
pub fn generate_synthetic_db(
    archetypes: &[ArchetypeSpec],
    n_points: u32,
    seed: u64,
    settings: &GeneratorSettings,
) -> Result<ClipDatabase, Error> {
    if archetypes.len() < 2 {
        return Err(Error::InvalidInput("need at least two archetypes".into()));
    }
    if n_points == 0 {
        return Err(Error::InvalidInput("need at least one point".into()));
    }
    for a in archetypes {
        a.validate()?;
    }
    let mut pairs = Vec::new();
    for i in 0..archetypes.len() {
        for j in i + 1..archetypes.len() {
            pairs.push((i, j));
        }
    }
    let bank = PoseBank::default();
    let mut clips = Vec::new();
    let mut next_id = 1u64;
    for point in 0..n_points as u64 {
        let (a, b) = pairs[(point % pairs.len() as u64) as usize];
        let round = point / pairs.len() as u64;
        let (s, r) = if round.is_multiple_of(2) {
            (a, b)
        } else {
            (b, a)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(point);
        let mut ctx = Ctx { settings, rng };
        // Each server sees deuce and ad in turn.
        let service = ServiceCourt::for_point(round / 2);
        let mut played = None;
        for _ in 0..4 {
            match play_point(&mut ctx, [&archetypes[s], &archetypes[r]], service) {
                Ok(p) => {
                    played = Some(p);
                    break;
                }
                Err(Error::Generation(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        let (shots, miss, paths) = played.ok_or_else(|| {
            Error::Generation(format!("point {point}: serve placement failed repeatedly"))
        })?;
        let names = Naming {
            ids: [&archetypes[s].player_id, &archetypes[r].player_id],
            hands: [archetypes[s].handedness, archetypes[r].handedness],
        };
        let mirrored = point % 2 == 1;
        let mut point_clips = Vec::new();
        for (index, shot) in shots.iter().enumerate() {
            let p = shot.hitter;
            let (player_trace, opponent_trace) =
                sample_traces(&paths[p], &paths[1 - p], shot.start, shot.t_r);
            let jitter: [Vec2; 14] =
                std::array::from_fn(|_| Vec2::new(ctx.normal(0.0, 0.02), ctx.normal(0.0, 0.02)));
            point_clips.push(ShotCycleClip {
                id: next_id,
                player_id: names.ids[p].to_string(),
                opponent_id: names.ids[1 - p].to_string(),
                point_id: point,
                shot_index: index as u32,
                side: if p == 0 { Side::Near } else { Side::Far },
                t_c: Some(shot.t_c),
                t_r: shot.t_r,
                shot_type: Some(shot.shot_type),
                outcome: shot.outcome,
                x_c: Some(shot.x_c),
                t_b: shot.bounce.map(|b| b.0),
                x_b: shot.bounce.map(|b| b.1),
                launch: shot.launch,
                dt: TRACE_DT,
                player_trace,
                opponent_trace,
                pose_trace: pose_trace(
                    &bank,
                    Some(shot.shot_type),
                    names.hands[p],
                    Some(shot.t_c),
                    shot.t_r,
                    &jitter,
                ),
            });
            next_id += 1;
        }
        if let Some(m) = miss {
            let p = m.player;
            let (player_trace, opponent_trace) =
                sample_traces(&paths[p], &paths[1 - p], m.start, TAIL);
            let jitter = [Vec2::zero(); 14];
            point_clips.push(ShotCycleClip {
                id: next_id,
                player_id: names.ids[p].to_string(),
                opponent_id: names.ids[1 - p].to_string(),
                point_id: point,
                shot_index: shots.len() as u32,
                side: if p == 0 { Side::Near } else { Side::Far },
                t_c: None,
                t_r: TAIL,
                shot_type: None,
                outcome: ShotOutcome::NoContact,
                x_c: None,
                t_b: None,
                x_b: None,
                launch: None,
                dt: TRACE_DT,
                player_trace,
                opponent_trace,
                pose_trace: pose_trace(&bank, None, names.hands[p], None, TAIL, &jitter),
            });
            next_id += 1;
        }
        if mirrored {
            for c in &mut point_clips {
                *c = c.half_turn();
            }
        }
        clips.extend(point_clips);
    }
    let players = archetypes
        .iter()
        .map(|a| PlayerInfo {
            id: a.player_id.clone(),
            handedness: a.handedness,
        })
        .collect();
    ClipDatabase::new(settings.court, settings.flight, players, clips)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::court::ShotDirection;

    fn small(seed: u64, cc: Real) -> ClipDatabase {
        let mut a = ArchetypeSpec::named("a");
        a.cross_court_bias = cc;
        a.down_line_bias = 1.0 - cc;
        let mut b = ArchetypeSpec::named("b");
        b.handedness = Handedness::Left;
        generate_synthetic_db(&[a, b], 6, seed, &GeneratorSettings::standard()).unwrap()
    }

    #[test]
    fn same_seed_same_database() {
        assert_eq!(small(3, 0.5), small(3, 0.5));
        assert_ne!(small(3, 0.5).clips(), small(4, 0.5).clips());
    }

    #[test]
    fn both_halves_and_serves_present() {
        let db = small(1, 0.5);
        assert!(db.clips().iter().any(|c| c.side == Side::Near));
        assert!(db.clips().iter().any(|c| c.side == Side::Far));
        assert_eq!(db.by_shot_type(ShotType::Serve).len(), 6);
        // Every point ends exactly once.
        let ends = db
            .clips()
            .iter()
            .filter(|c| c.outcome != ShotOutcome::InPlay && c.has_contact())
            .count();
        assert_eq!(ends, 6);
    }

    #[test]
    fn incoming_flight_reaches_contact() {
        let db = small(2, 0.5);
        let mut checked = 0;
        for i in 0..db.len() {
            let c = db.clip(i);
            let (Some(t_c), Some(x_c)) = (c.t_c, c.x_c) else {
                continue;
            };
            let Some(traj) = db.incoming_trajectory(i, 6.0) else {
                continue;
            };
            let p = traj.position_at(t_c).unwrap();
            assert!(p.distance(x_c) < 1e-9, "clip {}: {p:?} vs {x_c:?}", c.id);
            checked += 1;
        }
        assert!(checked > 10);
    }

    #[test]
    fn full_bias_is_all_cross_court() {
        let db = small(5, 1.0);
        for &i in db.by_player("a") {
            let d = db.clip(i).direction(&db.court);
            assert!(
                matches!(
                    d,
                    None | Some(ShotDirection::CrossCourt | ShotDirection::FromCenter)
                ),
                "{d:?}"
            );
        }
    }

    #[test]
    fn bad_archetypes_rejected() {
        let mut a = ArchetypeSpec::named("a");
        a.cross_court_bias = 0.8;
        a.down_line_bias = 0.5;
        let b = ArchetypeSpec::named("b");
        let s = GeneratorSettings::standard();
        assert!(generate_synthetic_db(&[a, b.clone()], 2, 0, &s).is_err());
        assert!(generate_synthetic_db(&[b], 2, 0, &s).is_err());
    }

    #[test]
    fn path_eases_between_keys() {
        let mut p = Path::default();
        p.push(0.0, Vec2::new(0.0, 0.0));
        p.push(1.0, Vec2::new(2.0, 0.0));
        assert_eq!(p.at(-1.0), Vec2::new(0.0, 0.0));
        assert_eq!(p.at(0.5), Vec2::new(1.0, 0.0));
        assert_eq!(p.at(3.0), Vec2::new(2.0, 0.0));
    }
}
