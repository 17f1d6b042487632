//! Planar ball flight with quadratic drag and Magnus lift, plus the bounce.
//!
//! The ball moves in the vertical plane spanned by a horizontal `heading` and
//! the z axis. Within that plane the state is `(s, z, v_h, v_z)` where `s` is
//! the horizontal distance travelled from the launch point.

use serde::{Deserialize, Serialize};

use crate::court::{CourtSpec, Side};
use crate::scalar::Scalar;
use crate::vec::{Vec2, Vec3};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinKind {
    Topspin,
    Underspin,
}

/// Aerodynamic and bounce constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", deny_unknown_fields, default)]
pub struct FlightParams<S = f64> {
    /// `rho * pi * R^2 / (2 m)`, 1/m.
    pub k: S,
    pub drag_coeff: S,
    pub gravity: S,
    /// Vertical coefficient of restitution.
    pub restitution: S,
    /// Fraction of horizontal speed kept through a bounce.
    pub horizontal_retention: S,
    /// Post-bounce spin = `spin_retention * |spin| + spin_from_speed * |v_h|`.
    pub spin_retention: S,
    pub spin_from_speed: S,
    /// Integration step, seconds.
    pub dt: S,
    /// Longest flight simulated, seconds.
    pub max_time: S,
}

impl<S: Scalar> FlightParams<S> {
    /// `k` from air density (kg/m^3), ball radius (m) and mass (kg).
    pub fn k_from_ball(rho: S, radius: S, mass: S) -> S {
        rho * S::PI() * radius * radius / (S::two() * mass)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let pos = |name: &str, v: S| {
            if v.is_finite() && v > S::zero() {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "flight.{name} must be positive, got {v}"
                )))
            }
        };
        pos("k", self.k)?;
        pos("gravity", self.gravity)?;
        pos("dt", self.dt)?;
        pos("max_time", self.max_time)?;
        if !(self.drag_coeff >= S::zero()) {
            return Err(Error::Config("flight.drag_coeff must be >= 0".into()));
        }
        for (name, v) in [
            ("restitution", self.restitution),
            ("horizontal_retention", self.horizontal_retention),
        ] {
            if !(v > S::zero() && v <= S::one()) {
                return Err(Error::Config(format!(
                    "flight.{name} must be in (0, 1], got {v}"
                )));
            }
        }
        if !(self.spin_retention >= S::zero() && self.spin_from_speed >= S::zero()) {
            return Err(Error::Config(
                "flight spin transfer coefficients must be >= 0".into(),
            ));
        }
        if self.dt > S::lit(0.005) {
            return Err(Error::Config("flight.dt must not exceed 5 ms".into()));
        }
        Ok(())
    }
}

impl<S: Scalar> Default for FlightParams<S> {
    fn default() -> Self {
        Self {
            k: Self::k_from_ball(S::lit(1.21), S::lit(0.033), S::lit(0.057)),
            drag_coeff: S::lit(0.55),
            gravity: S::lit(9.81),
            restitution: S::lit(0.75),
            horizontal_retention: S::lit(0.8),
            spin_retention: S::lit(0.6),
            spin_from_speed: S::lit(0.2),
            dt: S::lit(0.001),
            max_time: S::lit(4.0),
        }
    }
}

/// Planar flight state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct FlightState<S = f64> {
    pub s: S,
    pub z: S,
    pub v_h: S,
    pub v_z: S,
    /// Surface speed of the spinning ball, held constant in flight.
    pub v_spin: S,
    pub spin: SpinKind,
}

/// Signed lift coefficient: `1 / (2 + v / v_spin)`, negative for topspin.
#[inline]
pub fn lift_coeff<S: Scalar>(speed: S, v_spin: S, spin: SpinKind) -> S {
    if v_spin <= S::zero() {
        return S::zero();
    }
    let c = v_spin / (S::two() * v_spin + speed);
    match spin {
        SpinKind::Topspin => -c,
        SpinKind::Underspin => c,
    }
}

#[inline]
fn accel<S: Scalar>(v_h: S, v_z: S, st: &FlightState<S>, p: &FlightParams<S>) -> (S, S) {
    let v = (v_h * v_h + v_z * v_z).sqrt();
    let cl = lift_coeff(v, st.v_spin, st.spin);
    let kv = p.k * v;
    (
        -kv * (p.drag_coeff * v_h + cl * v_z),
        kv * (cl * v_h - p.drag_coeff * v_z) - p.gravity,
    )
}

/// Advance one classical Runge-Kutta step of length `dt`.
pub fn step_flight<S: Scalar>(st: &FlightState<S>, dt: S, p: &FlightParams<S>) -> FlightState<S> {
    let half = dt * S::half();
    let (a1h, a1z) = accel(st.v_h, st.v_z, st, p);
    let (v2h, v2z) = (st.v_h + half * a1h, st.v_z + half * a1z);
    let (a2h, a2z) = accel(v2h, v2z, st, p);
    let (v3h, v3z) = (st.v_h + half * a2h, st.v_z + half * a2z);
    let (a3h, a3z) = accel(v3h, v3z, st, p);
    let (v4h, v4z) = (st.v_h + dt * a3h, st.v_z + dt * a3z);
    let (a4h, a4z) = accel(v4h, v4z, st, p);
    let sixth = dt / S::lit(6.0);
    let two = S::two();
    FlightState {
        s: st.s + sixth * (st.v_h + two * v2h + two * v3h + v4h),
        z: st.z + sixth * (st.v_z + two * v2z + two * v3z + v4z),
        v_h: st.v_h + sixth * (a1h + two * a2h + two * a3h + a4h),
        v_z: st.v_z + sixth * (a1z + two * a2z + two * a3z + a4z),
        v_spin: st.v_spin,
        spin: st.spin,
    }
}

/// Launch conditions at a contact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct LaunchState<S = f64> {
    /// Contact time, seconds.
    pub time: S,
    pub origin: Vec3<S>,
    /// Unit horizontal direction of travel.
    pub heading: Vec2<S>,
    pub v_h: S,
    pub v_z: S,
    pub v_spin: S,
    pub spin: SpinKind,
}

impl<S: Scalar> LaunchState<S> {
    /// Launch aimed from `origin` toward the ground point `toward`.
    pub fn toward(
        time: S,
        origin: Vec3<S>,
        toward: Vec2<S>,
        v_h: S,
        v_z: S,
        v_spin: S,
        spin: SpinKind,
    ) -> Self {
        let d = toward - origin.xy();
        let n = d.norm();
        let heading = if n > S::zero() {
            d.scale(S::one() / n)
        } else {
            Vec2::new(S::zero(), -S::one())
        };
        Self {
            time,
            origin,
            heading,
            v_h,
            v_z,
            v_spin,
            spin,
        }
    }

    fn initial_state(&self) -> FlightState<S> {
        FlightState {
            s: S::zero(),
            z: self.origin.z,
            v_h: self.v_h,
            v_z: self.v_z,
            v_spin: self.v_spin,
            spin: self.spin,
        }
    }

    /// 3D position for in-plane coordinates.
    pub fn position(&self, s: S, z: S) -> Vec3<S> {
        Vec3::new(
            self.origin.x + self.heading.x * s,
            self.origin.y + self.heading.y * s,
            z,
        )
    }

    /// Horizontal distance at which the path crosses the plane `y = plane_y`,
    /// strictly after the launch point.
    pub fn s_at_plane(&self, plane_y: S) -> Option<S> {
        if self.heading.y == S::zero() {
            return None;
        }
        let s = (plane_y - self.origin.y) / self.heading.y;
        (s > S::zero()).then_some(s)
    }

    /// Same launch seen from the other half of the court.
    pub fn half_turn(&self) -> Self {
        Self {
            origin: self.origin.half_turn(),
            heading: self.heading.half_turn(),
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct BallSample<S = f64> {
    pub t: S,
    pub pos: Vec3<S>,
    pub v_h: S,
    pub v_z: S,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct BounceEvent<S = f64> {
    pub time: S,
    pub pos: Vec2<S>,
    pub v_z_in: S,
    pub v_z_out: S,
    pub v_h_in: S,
    pub v_h_out: S,
    pub v_spin_out: S,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct NetCrossing<S = f64> {
    pub time: S,
    pub x: S,
    pub height: S,
    /// Height above the net tape; negative means the ball hit the net.
    pub clearance: S,
    pub before_bounce: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    /// Reached the end plane.
    Plane,
    SecondBounce,
    MaxTime,
}

/// A simulated flight from one contact onward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct BallTrajectory<S = f64> {
    pub launch: LaunchState<S>,
    pub samples: Vec<BallSample<S>>,
    /// First bounce. For flights that end at a volley plane this is where the
    /// ball would have bounced had it not been played.
    pub bounce: Option<BounceEvent<S>>,
    pub net: Option<NetCrossing<S>>,
    pub end_time: S,
    pub end_pos: Vec3<S>,
    pub end_reason: EndReason,
}

/// Where a simulation stops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule<S = f64> {
    /// Flight duration limit, seconds after launch.
    pub max_time: S,
    /// Stop when crossing `y = plane_y`.
    pub plane_y: Option<S>,
    /// Only a crossing after the first bounce ends the flight.
    pub plane_after_bounce: bool,
    /// After ending at the plane before any bounce, keep integrating (without
    /// recording samples) to find the would-be bounce.
    pub locate_bounce: bool,
}

impl<S: Scalar> StopRule<S> {
    /// Run until the second bounce or `max_time`.
    pub fn open(max_time: S) -> Self {
        Self {
            max_time,
            plane_y: None,
            plane_after_bounce: false,
            locate_bounce: false,
        }
    }

    /// Run until crossing `y = plane_y` after the bounce (groundstroke) or
    /// before it (volley).
    pub fn to_plane(max_time: S, plane_y: S, volley: bool) -> Self {
        Self {
            max_time,
            plane_y: Some(plane_y),
            plane_after_bounce: !volley,
            locate_bounce: volley,
        }
    }
}

/// Early termination criteria used while probing fit candidates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ProbeLimits<S> {
    /// Absolute time after which the probe is abandoned.
    pub abort_after: S,
    pub require_net_clear: bool,
    /// First bounce must land inside the singles court on this half.
    pub bounce_in: Option<Side>,
    /// Any bounce before the end plane invalidates the probe.
    pub forbid_bounce: bool,
    /// Stop at the first bounce and report it as the end.
    pub end_at_bounce: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Outcome {
    Done,
    Invalid,
    /// First bounce landed past the receiver's court along the heading.
    Overshoot,
    NeverLands,
}

pub(crate) struct Run<S: Scalar> {
    pub samples: Vec<BallSample<S>>,
    pub bounce: Option<BounceEvent<S>>,
    pub net: Option<NetCrossing<S>>,
    pub end: Option<(S, Vec3<S>, EndReason)>,
    pub outcome: Outcome,
}

struct Integrator<'a, S: Scalar> {
    launch: &'a LaunchState<S>,
    p: &'a FlightParams<S>,
    court: &'a CourtSpec<S>,
    stop: StopRule<S>,
    limits: Option<ProbeLimits<S>>,
    s_net: Option<S>,
    s_plane: Option<S>,
    record: bool,
    run: Run<S>,
}

enum Flow {
    Continue,
    Stop,
}

impl<'a, S: Scalar> Integrator<'a, S> {
    fn sample(&mut self, t: S, st: &FlightState<S>) {
        if self.record && self.run.end.is_none() {
            self.run.samples.push(BallSample {
                t,
                pos: self.launch.position(st.s, st.z),
                v_h: st.v_h,
                v_z: st.v_z,
            });
        }
    }

    fn invalid(&mut self) -> Flow {
        self.run.outcome = Outcome::Invalid;
        Flow::Stop
    }

    /// Handle net and end-plane crossings inside a bounce-free segment.
    fn crossings(&mut self, a: &FlightState<S>, ta: S, b: &FlightState<S>, tb: S) -> Flow {
        let ds = b.s - a.s;
        if ds <= S::zero() {
            return Flow::Continue;
        }
        let bounced = self.run.bounce.is_some();
        if let (Some(sn), None) = (self.s_net, self.run.net) {
            if sn > a.s && sn <= b.s {
                let f = (sn - a.s) / ds;
                let z = a.z + (b.z - a.z) * f;
                let pos = self.launch.position(sn, z);
                let clearance = z - self.court.net_height_at(pos.x);
                self.run.net = Some(NetCrossing {
                    time: ta + (tb - ta) * f,
                    x: pos.x,
                    height: z,
                    clearance,
                    before_bounce: !bounced,
                });
                if let Some(l) = self.limits {
                    if l.require_net_clear && (clearance <= S::zero() || bounced) {
                        return self.invalid();
                    }
                }
            }
        }
        if let Some(sp) = self.s_plane {
            if self.run.end.is_none()
                && sp > a.s
                && sp <= b.s
                && (bounced || !self.stop.plane_after_bounce)
            {
                let f = (sp - a.s) / ds;
                let t = ta + (tb - ta) * f;
                let z = a.z + (b.z - a.z) * f;
                let pos = self.launch.position(sp, z);
                if self.record {
                    self.run.samples.push(BallSample {
                        t,
                        pos,
                        v_h: a.v_h + (b.v_h - a.v_h) * f,
                        v_z: a.v_z + (b.v_z - a.v_z) * f,
                    });
                }
                self.run.end = Some((t, pos, EndReason::Plane));
                if self.stop.locate_bounce && !bounced {
                    return Flow::Continue;
                }
                return Flow::Stop;
            }
        }
        Flow::Continue
    }

    /// Fraction of `h` at which the flight from `pre` touches the ground.
    fn ground_fraction(
        &self,
        pre: &FlightState<S>,
        post: &FlightState<S>,
        h: S,
    ) -> (S, FlightState<S>) {
        let tol = S::lit(1e-11);
        let (mut lo, mut z_lo) = (S::zero(), pre.z);
        let (mut hi, mut z_hi) = (S::one(), post.z);
        let mut best = (S::one(), *post);
        for _ in 0..6 {
            let denom = z_lo - z_hi;
            let mut f = if denom > S::zero() {
                lo + (hi - lo) * z_lo / denom
            } else {
                (lo + hi) * S::half()
            };
            if !(f > lo && f < hi) {
                f = (lo + hi) * S::half();
            }
            let st = step_flight(pre, f * h, self.p);
            best = (f, st);
            if st.z.abs() <= tol {
                break;
            }
            if st.z > S::zero() {
                lo = f;
                z_lo = st.z;
            } else {
                hi = f;
                z_hi = st.z;
            }
        }
        best
    }

    fn bounce(&mut self, at: &FlightState<S>, t: S) -> Result<FlightState<S>, Flow> {
        let pos = self.launch.position(at.s, S::zero()).xy();
        let p = self.p;
        let v_z_out = -p.restitution * at.v_z;
        let v_h_out = p.horizontal_retention * at.v_h;
        let v_spin_out = p.spin_retention * at.v_spin.abs() + p.spin_from_speed * at.v_h.abs();
        self.run.bounce = Some(BounceEvent {
            time: t,
            pos,
            v_z_in: at.v_z,
            v_z_out,
            v_h_in: at.v_h,
            v_h_out,
            v_spin_out,
        });
        if let Some(l) = self.limits {
            let crossed = self.s_net.is_some_and(|sn| at.s > sn);
            if l.forbid_bounce && self.run.end.is_none() {
                self.run.outcome = Outcome::Invalid;
                return Err(Flow::Stop);
            }
            if let Some(side) = l.bounce_in {
                if !crossed {
                    self.run.outcome = Outcome::Invalid;
                    return Err(Flow::Stop);
                }
                if !self.court.in_half(pos, side) {
                    self.run.outcome = Outcome::Overshoot;
                    return Err(Flow::Stop);
                }
            }
            if l.end_at_bounce {
                self.run.end = Some((t, pos.with_z(S::zero()), EndReason::Plane));
                return Err(Flow::Stop);
            }
        }
        if self.run.end.is_some() {
            // Ended at a volley plane; the would-be bounce is all we needed.
            return Err(Flow::Stop);
        }
        Ok(FlightState {
            s: at.s,
            z: S::zero(),
            v_h: v_h_out,
            v_z: v_z_out,
            v_spin: v_spin_out,
            spin: SpinKind::Topspin,
        })
    }

    /// Integrate `h` seconds from `pre` at time `t`, resolving events.
    fn segment(&mut self, pre: FlightState<S>, t: S, h: S, depth: u8) -> (Flow, FlightState<S>) {
        let post = step_flight(&pre, h, self.p);
        if post.z < S::zero() {
            let (f, mut at) = if pre.z <= S::zero() {
                (S::zero(), pre)
            } else {
                self.ground_fraction(&pre, &post, h)
            };
            at.z = S::zero();
            let tb = t + f * h;
            if let Flow::Stop = self.crossings(&pre, t, &at, tb) {
                return (Flow::Stop, at);
            }
            if self.run.bounce.is_some() || depth > 0 {
                if self.run.end.is_none() {
                    self.sample(tb, &at);
                    self.run.end = Some((
                        tb,
                        self.launch.position(at.s, S::zero()),
                        EndReason::SecondBounce,
                    ));
                    if self.stop.plane_y.is_some() && self.limits.is_some() {
                        self.run.outcome = Outcome::Invalid;
                    }
                }
                return (Flow::Stop, at);
            }
            match self.bounce(&at, tb) {
                Ok(after) => {
                    self.sample(tb, &after);
                    let rest = h - f * h;
                    if rest > S::zero() {
                        return self.segment(after, tb, rest, depth + 1);
                    }
                    (Flow::Continue, after)
                }
                Err(flow) => (flow, at),
            }
        } else {
            let tn = t + h;
            if let Flow::Stop = self.crossings(&pre, t, &post, tn) {
                return (Flow::Stop, post);
            }
            self.sample(tn, &post);
            (Flow::Continue, post)
        }
    }

    fn run(mut self) -> Run<S> {
        let dt = self.p.dt;
        let t0 = self.launch.time;
        let t_max = t0 + self.stop.max_time;
        let mut st = self.launch.initial_state();
        self.sample(t0, &st);
        let mut n: u64 = 0;
        loop {
            let t = t0 + S::from_u64(n).unwrap() * dt;
            if t >= t_max - dt * S::lit(1e-6) {
                break;
            }
            if let Some(l) = self.limits {
                if t > l.abort_after {
                    self.run.outcome = Outcome::Invalid;
                    return self.run;
                }
            }
            // Segment ends on the global time grid even after a bounce.
            let h = (t0 + S::from_u64(n + 1).unwrap() * dt).min(t_max) - t;
            let (flow, next) = self.segment(st, t, h, 0);
            st = next;
            n += 1;
            if let Flow::Stop = flow {
                return self.run;
            }
        }
        if self.run.end.is_none() {
            if self.run.bounce.is_none() {
                self.run.outcome = Outcome::NeverLands;
            } else if self.limits.is_some() && self.stop.plane_y.is_some() {
                self.run.outcome = Outcome::Invalid;
            }
            let t = t0 + self.stop.max_time;
            self.run.end = Some((t, self.launch.position(st.s, st.z), EndReason::MaxTime));
        } else if self.run.bounce.is_none() && self.stop.locate_bounce {
            // Ended at a volley plane but the ball never came down in time.
            self.run.outcome = Outcome::Done;
        }
        self.run
    }
}

pub(crate) fn integrate<S: Scalar>(
    launch: &LaunchState<S>,
    params: &FlightParams<S>,
    court: &CourtSpec<S>,
    stop: StopRule<S>,
    limits: Option<ProbeLimits<S>>,
    record: bool,
) -> Run<S> {
    let s_net = launch.s_at_plane(S::zero());
    let s_plane = stop.plane_y.and_then(|y| launch.s_at_plane(y));
    let it = Integrator {
        launch,
        p: params,
        court,
        stop,
        limits,
        s_net,
        s_plane,
        record,
        run: Run {
            samples: Vec::new(),
            bounce: None,
            net: None,
            end: None,
            outcome: Outcome::Done,
        },
    };
    it.run()
}

/// Integrate a launch forward until the stop rule fires.
pub fn simulate_trajectory<S: Scalar>(
    launch: &LaunchState<S>,
    params: &FlightParams<S>,
    court: &CourtSpec<S>,
    stop: StopRule<S>,
) -> Result<BallTrajectory<S>, Error> {
    if !(launch.origin.z > S::zero()) {
        return Err(Error::InvalidInput(format!(
            "launch height must be positive, got {}",
            launch.origin.z
        )));
    }
    let run = integrate(launch, params, court, stop, None, true);
    if run.outcome == Outcome::NeverLands {
        return Err(Error::NeverLands {
            max_time: stop.max_time.to_f64_lossy(),
        });
    }
    let (end_time, end_pos, end_reason) = run.end.expect("integration always sets an end");
    Ok(BallTrajectory {
        launch: *launch,
        samples: run.samples,
        bounce: run.bounce,
        net: run.net,
        end_time,
        end_pos,
        end_reason,
    })
}

impl<S: Scalar> BallTrajectory<S> {
    pub fn start_time(&self) -> S {
        self.launch.time
    }

    /// Ball position at absolute time `t`, linear between samples.
    pub fn position_at(&self, t: S) -> Option<Vec3<S>> {
        let first = self.samples.first()?;
        let last = self.samples.last()?;
        if t < first.t || t > last.t {
            return None;
        }
        let i = self.samples.partition_point(|s| s.t <= t);
        if i == 0 {
            return Some(first.pos);
        }
        if i >= self.samples.len() {
            return Some(last.pos);
        }
        let (a, b) = (&self.samples[i - 1], &self.samples[i]);
        let span = b.t - a.t;
        if span <= S::zero() {
            return Some(b.pos);
        }
        Some(a.pos.lerp(b.pos, (t - a.t) / span))
    }

    /// Apex height over the recorded samples.
    pub fn apex(&self) -> S {
        self.samples
            .iter()
            .map(|s| s.pos.z)
            .fold(S::neg_infinity(), S::max)
    }

    /// Average ground speed from contact to bounce.
    pub fn ground_speed_to_bounce(&self) -> Option<S> {
        let b = self.bounce?;
        let dt = b.time - self.launch.time;
        (dt > S::zero()).then(|| (b.pos - self.launch.origin.xy()).norm() / dt)
    }

    /// Same flight seen from the other half of the court.
    pub fn half_turn(&self) -> Self {
        Self {
            launch: self.launch.half_turn(),
            samples: self
                .samples
                .iter()
                .map(|s| BallSample {
                    pos: s.pos.half_turn(),
                    ..*s
                })
                .collect(),
            bounce: self.bounce.map(|b| BounceEvent {
                pos: b.pos.half_turn(),
                ..b
            }),
            net: self.net.map(|n| NetCrossing { x: -n.x, ..n }),
            end_time: self.end_time,
            end_pos: self.end_pos.half_turn(),
            end_reason: self.end_reason,
        }
    }

    /// Resample positions at a fixed interval (for display clients).
    pub fn resample(&self, interval: S) -> Vec<(S, Vec3<S>)> {
        let mut out = Vec::new();
        let (Some(first), Some(last)) = (self.samples.first(), self.samples.last()) else {
            return out;
        };
        let mut t = first.t;
        while t < last.t {
            if let Some(p) = self.position_at(t) {
                out.push((t, p));
            }
            t = t + interval;
        }
        out.push((last.t, last.pos));
        out
    }
}

/// First crossing of the plane `y = plane_y` strictly after the flight starts.
pub fn intercept<S: Scalar>(traj: &BallTrajectory<S>, plane_y: S) -> Result<(S, Vec3<S>), Error> {
    let start_side = traj.samples.first().map(|s| s.pos.y - plane_y);
    let Some(mut prev_d) = start_side else {
        return Err(Error::NoIntersection);
    };
    for w in traj.samples.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let db = b.pos.y - plane_y;
        let crosses = if prev_d == S::zero() {
            false
        } else {
            (prev_d < S::zero() && db >= S::zero()) || (prev_d > S::zero() && db <= S::zero())
        };
        if crosses {
            let da = a.pos.y - plane_y;
            let f = da / (da - db);
            return Ok((a.t + (b.t - a.t) * f, a.pos.lerp(b.pos, f)));
        }
        if db != S::zero() {
            prev_d = db;
        }
    }
    Err(Error::NoIntersection)
}
