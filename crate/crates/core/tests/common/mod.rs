//! Fixtures and test-side oracles shared by the integration tests.
#![allow(dead_code)]

use rallyforge_core::clipdb::{
    generate_synthetic_db, ArchetypeSpec, ClipDatabase, GeneratorSettings, ShotCycleClip,
};
use rallyforge_core::physics::{BallTrajectory, FlightParams, LaunchState, SpinKind};
use rallyforge_core::search::{CostWeights, OutcomeFilter, SearchQuery, Thresholds};
use rallyforge_core::{ShotOutcome, ShotType, Vec2, Vec3};

pub fn pair(cross: f64, down_line: f64) -> [ArchetypeSpec; 2] {
    ["a", "b"].map(|id| ArchetypeSpec {
        cross_court_bias: cross,
        down_line_bias: down_line,
        ..ArchetypeSpec::named(id)
    })
}

pub fn standard_db(points: u32, seed: u64) -> ClipDatabase {
    generate_synthetic_db(
        &pair(0.55, 0.25),
        points,
        seed,
        &GeneratorSettings::standard(),
    )
    .unwrap()
}

/// Source-frame clips of `db` repeated with fresh ids until there are at
/// least `n`.
pub fn inflate(db: &ClipDatabase, n: usize) -> ClipDatabase {
    let src: Vec<ShotCycleClip> = db.source_clips().collect();
    let stride = src.iter().map(|c| c.id).max().unwrap() + 1;
    let points = src.iter().map(|c| c.point_id).max().unwrap() + 1;
    let mut out = Vec::with_capacity(n + src.len());
    let mut round = 0;
    while out.len() < n {
        for c in &src {
            out.push(ShotCycleClip {
                id: c.id + round * stride,
                point_id: c.point_id + round * points,
                ..c.clone()
            });
        }
        round += 1;
    }
    ClipDatabase::new(db.court, db.flight, db.players().to_vec(), out).unwrap()
}

/// First `n` clips of `db`, keeping the point links that survive.
pub fn truncate(db: &ClipDatabase, n: usize) -> ClipDatabase {
    let clips: Vec<ShotCycleClip> = db.source_clips().take(n).collect();
    ClipDatabase::new(db.court, db.flight, db.players().to_vec(), clips).unwrap()
}

// ---------------------------------------------------------------------------
// Ball flight

/// Drag- and spin-free position `t` seconds after launch.
pub fn parabola(l: &LaunchState, g: f64, t: f64) -> Vec3 {
    let s = l.v_h * t;
    Vec3::new(
        l.origin.x + l.heading.x * s,
        l.origin.y + l.heading.y * s,
        l.origin.z + l.v_z * t - 0.5 * g * t * t,
    )
}

/// Airborne flight integrated in 3D with classical RK4 at step `h`,
/// written directly from the force model: drag opposes velocity, lift is
/// perpendicular to it in the vertical plane with coefficient
/// `v_spin / (2 v_spin + |v|)`, downward in the direction of travel for
/// topspin. Returns positions at every `every`-th step.
pub fn fine_flight(
    l: &LaunchState,
    p: &FlightParams,
    h: f64,
    steps: usize,
    every: usize,
) -> Vec<Vec3> {
    let sign = match l.spin {
        SpinKind::Topspin => -1.0,
        SpinKind::Underspin => 1.0,
    };
    let acc = |v: [f64; 3]| -> [f64; 3] {
        let speed = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let vh = (v[0] * v[0] + v[1] * v[1]).sqrt();
        let cl = if l.v_spin > 0.0 {
            sign * l.v_spin / (2.0 * l.v_spin + speed)
        } else {
            0.0
        };
        // Unit horizontal heading; lift direction is (−v_z ĥ, v_h) rotated into 3D.
        let (hx, hy) = if vh > 0.0 {
            (v[0] / vh, v[1] / vh)
        } else {
            (0.0, 0.0)
        };
        let lift = [-v[2] * hx, -v[2] * hy, vh];
        let k = p.k * speed;
        [
            -k * p.drag_coeff * v[0] + k * cl * lift[0],
            -k * p.drag_coeff * v[1] + k * cl * lift[1],
            -k * p.drag_coeff * v[2] + k * cl * lift[2] - p.gravity,
        ]
    };
    let mut x = [l.origin.x, l.origin.y, l.origin.z];
    let mut v = [l.heading.x * l.v_h, l.heading.y * l.v_h, l.v_z];
    let add =
        |a: [f64; 3], b: [f64; 3], s: f64| [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]];
    let mut out = vec![Vec3::new(x[0], x[1], x[2])];
    for n in 1..=steps {
        let k1v = acc(v);
        let k1x = v;
        let k2v = acc(add(v, k1v, h / 2.0));
        let k2x = add(v, k1v, h / 2.0);
        let k3v = acc(add(v, k2v, h / 2.0));
        let k3x = add(v, k2v, h / 2.0);
        let k4v = acc(add(v, k3v, h));
        let k4x = add(v, k3v, h);
        for i in 0..3 {
            x[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
            v[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
        }
        if n % every == 0 {
            out.push(Vec3::new(x[0], x[1], x[2]));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Clip cost

fn lerp_trace(trace: &[Vec2], dt: f64, t: f64) -> Vec2 {
    let u = (t / dt).max(0.0);
    let i = u.floor() as usize;
    if i + 1 >= trace.len() {
        return *trace.last().unwrap();
    }
    let f = u - i as f64;
    Vec2::new(
        trace[i].x + (trace[i + 1].x - trace[i].x) * f,
        trace[i].y + (trace[i + 1].y - trace[i].y) * f,
    )
}

fn ball_at(traj: &BallTrajectory, t: f64) -> Option<Vec3> {
    let s = &traj.samples;
    if s.is_empty() || t < s[0].t || t > s[s.len() - 1].t {
        return None;
    }
    let j = s.iter().position(|x| x.t > t).unwrap_or(s.len() - 1).max(1);
    let (a, b) = (&s[j - 1], &s[j]);
    let f = if b.t > a.t {
        ((t - a.t) / (b.t - a.t)).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Some(Vec3::new(
        a.pos.x + (b.pos.x - a.pos.x) * f,
        a.pos.y + (b.pos.y - a.pos.y) * f,
        a.pos.z + (b.pos.z - a.pos.z) * f,
    ))
}

fn len(v: Vec2) -> f64 {
    (v.x * v.x + v.y * v.y).sqrt()
}

/// Ratio and angle terms; both vanish below 1 cm.
fn terms(db: Vec2, cor: Vec2) -> (f64, f64) {
    let (a, b) = (len(db), len(cor));
    if a < 0.01 || b < 0.01 {
        return (0.0, 0.0);
    }
    let r = b / a;
    let cos = (db.x * cor.x + db.y * cor.y) / (a * b);
    (r.max(1.0 / r) - 1.0, (1.0 - cos).max(0.0))
}

#[derive(Debug, Clone, Copy)]
pub struct OracleCost {
    pub total: f64,
    pub feasible: bool,
    pub e_c2d: Vec2,
}

/// Weighted clip cost recomputed from the clip's raw traces.
pub fn oracle_cost(
    c: &ShotCycleClip,
    q: &SearchQuery,
    w: &CostWeights,
    th: &Thresholds,
) -> OracleCost {
    let pose0 = c.pose_trace[0];
    let pose = pose0
        .iter()
        .zip(&q.start_pose)
        .map(|(a, b)| len(*a - *b))
        .sum::<f64>()
        / pose0.len() as f64;
    let tr = &c.player_trace;
    let v0 = if tr.len() > 1 {
        (tr[1] - tr[0]).scale(1.0 / c.dt)
    } else {
        Vec2::zero()
    };
    let velo = len(v0 - q.start_velocity);
    let offset = q.start_pos - tr[0];
    let base = w.pose * pose + w.velo * velo;
    let (Some(t_c), Some(x_c)) = (c.t_c, c.x_c) else {
        return OracleCost {
            total: base,
            feasible: true,
            e_c2d: Vec2::zero(),
        };
    };
    let Some(ball) = ball_at(q.incoming, q.start_time + t_c).filter(|b| b.y > 0.0) else {
        return OracleCost {
            total: f64::INFINITY,
            feasible: false,
            e_c2d: Vec2::zero(),
        };
    };
    let e_c2d = ball.xy() - (x_c.xy() + offset);
    let contact = (ball.z - x_c.z).abs();
    let p_c = lerp_trace(tr, c.dt, t_c);
    let p_r = lerp_trace(tr, c.dt, c.t_r);
    let react_db = p_c - tr[0];
    let (rv, rd) = terms(react_db, react_db + e_c2d);
    let mut total = base + w.contact * contact + w.react_velo * rv + w.react_dir * rd;
    if let Some(b) = q.behavior {
        if c.shot_type != Some(b.shot_type) {
            return OracleCost {
                total: f64::INFINITY,
                feasible: false,
                e_c2d,
            };
        }
        let x_r = p_c + offset + e_c2d + (p_r - p_c);
        let e_r = b.recovery - x_r;
        let (cv, cd) = terms(p_r - p_c, p_r - p_c + e_r);
        total += w.recover_velo * cv + w.recover_dir * cd;
        if let (Some(t_b), Some(x_b)) = (c.t_b, c.x_b) {
            let v_b = len(x_b - x_c.xy()) / (t_b - t_c);
            total += w.shot_velo * (v_b - b.shot_velocity).abs();
            total += w.shot_place * len(x_b + offset + e_c2d - b.placement);
        }
    }
    let feasible =
        len(e_c2d) <= th.max_react_correction && rv + rd <= th.max_react_cost && total.is_finite();
    OracleCost {
        total,
        feasible,
        e_c2d,
    }
}

/// Exhaustive argmin over every clip of `player` admitted by the query,
/// ties to the lowest id.
pub fn brute_force(
    db: &ClipDatabase,
    player: &str,
    q: &SearchQuery,
    w: &CostWeights,
    th: &Thresholds,
) -> Option<(u64, f64)> {
    let mut best: Option<(u64, f64)> = None;
    for c in db.clips() {
        if c.player_id != player || c.shot_type == Some(ShotType::Serve) {
            continue;
        }
        let admitted = match q.filter {
            OutcomeFilter::MustContinue => c.outcome == ShotOutcome::InPlay,
            OutcomeFilter::ContactAny => c.outcome.has_contact(),
            OutcomeFilter::MustEndNoContact => c.outcome == ShotOutcome::NoContact,
        };
        if !admitted || q.behavior.is_some_and(|b| c.shot_type != Some(b.shot_type)) {
            continue;
        }
        let e = oracle_cost(c, q, w, th);
        if !e.feasible {
            continue;
        }
        if best.is_none_or(|(id, t)| e.total < t || (e.total == t && c.id < id)) {
            best = Some((c.id, e.total));
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Queries

use rallyforge_core::behavior::BehaviorDecision;
use rallyforge_core::clipdb::Pose;
use rand::Rng;

/// Owned parts of a [`SearchQuery`].
#[derive(Debug, Clone)]
pub struct QueryCase {
    pub player: String,
    pub incoming: BallTrajectory,
    pub start_pos: Vec2,
    pub start_pose: Pose,
    pub start_velocity: Vec2,
    pub behavior: Option<BehaviorDecision>,
    pub filter: OutcomeFilter,
}

impl QueryCase {
    pub fn query(&self) -> SearchQuery<'_> {
        SearchQuery {
            behavior: self.behavior,
            incoming: &self.incoming,
            start_time: 0.0,
            start_pos: self.start_pos,
            start_pose: self.start_pose,
            start_velocity: self.start_velocity,
            filter: self.filter,
        }
    }
}

/// Indices of rally clips with a linked incoming ball.
pub fn linked(db: &ClipDatabase) -> Vec<usize> {
    (0..db.len())
        .filter(|&i| {
            let c = db.clip(i);
            c.has_contact()
                && c.shot_type != Some(ShotType::Serve)
                && db.incoming(i).and_then(|b| b.launch).is_some()
        })
        .collect()
}

/// A clip's own situation, perturbed, with random goals.
pub fn random_query(db: &ClipDatabase, linked: &[usize], rng: &mut impl Rng) -> QueryCase {
    let i = linked[rng.random_range(0..linked.len())];
    let c = db.clip(i);
    let other = db.clip(linked[rng.random_range(0..linked.len())]);
    let jitter = |rng: &mut dyn rand::RngCore, r: f64| {
        Vec2::new(rng.random_range(-r..r), rng.random_range(-r..r))
    };
    let shot_type = if rng.random_bool(0.7) {
        c.shot_type.unwrap()
    } else {
        ShotType::ALL[rng.random_range(1..7)]
    };
    let behavior = rng.random_bool(0.85).then(|| BehaviorDecision {
        shot_type,
        shot_velocity: rng.random_range(10.0..35.0),
        placement: Vec2::new(rng.random_range(-4.0..4.0), rng.random_range(-11.5..-2.0)),
        recovery: Vec2::new(rng.random_range(-2.5..2.5), rng.random_range(11.0..13.5)),
        approach_net: false,
    });
    QueryCase {
        player: c.player_id.clone(),
        incoming: db.incoming_trajectory(i, 6.0).unwrap(),
        start_pos: c.player_at(0.0) + jitter(rng, 0.8),
        start_pose: other.pose_at(0.0),
        start_velocity: c.start_velocity() + jitter(rng, 1.0),
        behavior,
        filter: if rng.random_bool(0.5) {
            OutcomeFilter::MustContinue
        } else {
            OutcomeFilter::ContactAny
        },
    }
}

/// The situation a clip was recorded in, with its own shot as the goal.
pub fn self_query(db: &ClipDatabase, i: usize) -> Option<QueryCase> {
    let c = db.clip(i);
    Some(QueryCase {
        player: c.player_id.clone(),
        incoming: db.incoming_trajectory(i, 6.0)?,
        start_pos: c.player_at(0.0),
        start_pose: c.pose_at(0.0),
        start_velocity: c.start_velocity(),
        behavior: Some(BehaviorDecision {
            shot_type: c.shot_type?,
            shot_velocity: c.v_b()?,
            placement: c.x_b?,
            recovery: c.recovery_position(),
            approach_net: false,
        }),
        filter: OutcomeFilter::ContactAny,
    })
}

// ---------------------------------------------------------------------------
// Rallies

use rallyforge_core::court::{region_of, shot_direction, CourtSpec, ShotDirection};
use rallyforge_core::rally::{EndReason, RallyEvent, RallyLog};

/// Check one point's log: a serve by the server, then shot cycles
/// alternating from the returner, each contact with racket on ball, and a
/// single terminal event consistent with the last cycle.
pub fn check_point(log: &RallyLog, max_shots: u32) -> Result<(), String> {
    let ev = &log.events;
    let Some(RallyEvent::PointStart {
        server, returner, ..
    }) = ev.first()
    else {
        return Err("does not open with point_start".into());
    };
    let Some(RallyEvent::PointEnd {
        reason,
        responses,
        winner,
        ..
    }) = ev.last()
    else {
        return Err("does not close with point_end".into());
    };
    let ends = ev
        .iter()
        .filter(|e| matches!(e, RallyEvent::PointEnd { .. }))
        .count();
    if ends != 1 {
        return Err(format!("{ends} point_end events"));
    }
    let mut expect = returner;
    let mut cycles = 0u32;
    let mut last_clock = f64::NEG_INFINITY;
    for e in &ev[1..ev.len() - 1] {
        match e {
            RallyEvent::Serve {
                player,
                contact_time,
                ..
            } => {
                if player != server || cycles != 0 {
                    return Err("serve out of place".into());
                }
                last_clock = *contact_time;
            }
            RallyEvent::ShotCycle(r) => {
                cycles += 1;
                if &r.player != expect {
                    return Err(format!(
                        "cycle {} played by {}, expected {expect}",
                        r.shot_index, r.player
                    ));
                }
                if r.shot_index != cycles {
                    return Err(format!("shot index {} at cycle {cycles}", r.shot_index));
                }
                if r.start_time < last_clock - 1e-12 {
                    return Err("clock went backwards".into());
                }
                if let (Some(racket), Some(ball)) = (r.racket, r.ball) {
                    let gap = (racket - ball.xy()).norm();
                    if gap > 1e-9 {
                        return Err(format!(
                            "cycle {}: racket misses ball by {gap}",
                            r.shot_index
                        ));
                    }
                } else if r.outcome.has_contact() {
                    return Err(format!(
                        "cycle {} has a contact without racket and ball",
                        r.shot_index
                    ));
                }
                if let Some(t) = r.contact_time {
                    last_clock = t;
                }
                expect = if expect == returner { server } else { returner };
            }
            _ => return Err("nested point_start or point_end".into()),
        }
    }
    if *responses != cycles {
        return Err(format!(
            "point_end counts {responses} responses, log has {cycles}"
        ));
    }
    match reason {
        EndReason::Truncated => {
            if cycles < max_shots || winner.is_some() {
                return Err("truncated early or with a winner".into());
            }
        }
        EndReason::Error | EndReason::Unreachable => {
            if winner.is_none() {
                return Err("decided point without a winner".into());
            }
        }
    }
    Ok(())
}

/// Cross-court and down-the-line groundstroke decisions, counted from the
/// raw decisions and hitter positions.
pub fn count_directions(logs: &[RallyLog], court: &CourtSpec) -> (u64, u64) {
    let (mut cc, mut dtl) = (0, 0);
    for r in logs.iter().flat_map(|l| l.shot_cycles()) {
        let (Some(d), Some(p)) = (r.decision, r.hitter_position) else {
            continue;
        };
        if !d.shot_type.is_groundstroke() {
            continue;
        }
        match shot_direction(region_of(p, court), d.placement, court) {
            ShotDirection::CrossCourt => cc += 1,
            ShotDirection::DownTheLine => dtl += 1,
            _ => {}
        }
    }
    (cc, dtl)
}
