//! Launch-velocity search: recover a flight between two contacts, or aim a
//! shot at a bounce point with a given ground speed.

use serde::{Deserialize, Serialize};

use super::flight::{
    integrate, simulate_trajectory, BallTrajectory, FlightParams, LaunchState, Outcome,
    ProbeLimits, SpinKind, StopRule,
};
use crate::court::{CourtSpec, Side};
use crate::scalar::Scalar;
use crate::vec::{Vec2, Vec3};
use crate::Error;

/// Evenly spaced values `min..=max` with `steps` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", deny_unknown_fields)]
pub struct Axis<S = f64> {
    pub min: S,
    pub max: S,
    pub steps: u32,
}

impl<S: Scalar> Axis<S> {
    pub fn new(min: S, max: S, steps: u32) -> Self {
        Self { min, max, steps }
    }

    pub fn spacing(&self) -> S {
        if self.steps <= 1 {
            S::zero()
        } else {
            (self.max - self.min) / S::from_u32(self.steps - 1).unwrap()
        }
    }

    pub fn value(&self, i: u32) -> S {
        self.min + self.spacing() * S::from_u32(i).unwrap()
    }

    pub fn values(&self) -> impl Iterator<Item = S> + '_ {
        (0..self.steps).map(move |i| self.value(i))
    }

    /// Axis with `2n - 1` points containing every point of this one.
    pub fn refined(&self) -> Self {
        Self {
            steps: self.steps.max(1) * 2 - 1,
            ..*self
        }
    }
}

/// Grid and objective for fitting a flight between two contacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", deny_unknown_fields, default)]
pub struct GridSpec<S = f64> {
    pub v_h: Axis<S>,
    pub v_z: Axis<S>,
    pub spins: Vec<S>,
    pub spin_kinds: Vec<SpinKind>,
    /// Residual weight on end position error, 1/m.
    pub w_pos: S,
    /// Residual weight on end time error, 1/s.
    pub w_time: S,
    /// Best residual above this is rejected.
    pub tolerance: S,
    /// Integration step while scanning the grid; the winner is re-simulated
    /// at the flight step.
    pub search_dt: S,
    /// Pattern-search halvings around the grid winner (0 disables).
    pub refine_halvings: u32,
}

impl<S: Scalar> Default for GridSpec<S> {
    fn default() -> Self {
        Self {
            v_h: Axis::new(S::lit(5.0), S::lit(60.0), 56),
            v_z: Axis::new(S::lit(-10.0), S::lit(15.0), 26),
            spins: [0.0, 2.0, 5.0, 10.0, 20.0]
                .into_iter()
                .map(S::lit)
                .collect(),
            spin_kinds: vec![SpinKind::Topspin, SpinKind::Underspin],
            w_pos: S::one(),
            w_time: S::lit(10.0),
            tolerance: S::lit(0.5),
            search_dt: S::lit(0.02),
            refine_halvings: 6,
        }
    }
}

impl<S: Scalar> GridSpec<S> {
    pub fn validate(&self) -> Result<(), Error> {
        for (name, a) in [("v_h", &self.v_h), ("v_z", &self.v_z)] {
            if a.steps == 0 || !(a.max >= a.min) {
                return Err(Error::Config(format!(
                    "grid.{name}: need steps >= 1 and max >= min"
                )));
            }
        }
        if self.spins.is_empty() || self.spins.iter().any(|s| !(*s >= S::zero())) {
            return Err(Error::Config(
                "grid.spins must be non-empty and >= 0".into(),
            ));
        }
        if self.spin_kinds.is_empty() {
            return Err(Error::Config("grid.spin_kinds must be non-empty".into()));
        }
        if !(self.w_pos >= S::zero() && self.w_time >= S::zero() && self.tolerance > S::zero()) {
            return Err(Error::Config(
                "grid weights must be >= 0 and tolerance > 0".into(),
            ));
        }
        if !(self.search_dt > S::zero() && self.search_dt <= S::lit(0.02)) {
            return Err(Error::Config("grid.search_dt must be in (0, 20 ms]".into()));
        }
        Ok(())
    }

    /// Same grid with every axis refined (nested).
    pub fn refined(&self) -> Self {
        Self {
            v_h: self.v_h.refined(),
            v_z: self.v_z.refined(),
            ..self.clone()
        }
    }

    /// `(v_spin, kind)` pairs in scan order, skipping duplicate zero-spin entries.
    fn spin_configs(&self) -> Vec<(S, SpinKind)> {
        let mut out = Vec::new();
        for &kind in &self.spin_kinds {
            for &v in &self.spins {
                if v == S::zero() && out.iter().any(|&(w, _)| w == S::zero()) {
                    continue;
                }
                out.push((v, kind));
            }
        }
        out
    }
}

/// A ball contact in space and time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct ContactPoint<S = f64> {
    pub time: S,
    pub pos: Vec3<S>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct FitResult<S = f64> {
    pub trajectory: BallTrajectory<S>,
    pub residual: S,
    /// Residual of the best raw grid point, before local refinement.
    pub grid_residual: S,
    pub evaluations: u64,
}

#[derive(Debug, Clone, Copy)]
struct Candidate<S> {
    v_h: S,
    v_z: S,
    v_spin: S,
    kind: SpinKind,
}

struct Search<'a, S: Scalar> {
    origin: ContactPoint<S>,
    toward: Vec2<S>,
    params: FlightParams<S>,
    court: &'a CourtSpec<S>,
    max_time: S,
    stop: StopRule<S>,
    limits: ProbeLimits<S>,
    target_pos: Vec3<S>,
    target_time: S,
    w_pos: S,
    w_time: S,
    evaluations: u64,
}

impl<'a, S: Scalar> Search<'a, S> {
    fn launch(&self, c: &Candidate<S>) -> LaunchState<S> {
        LaunchState::toward(
            self.origin.time,
            self.origin.pos,
            self.toward,
            c.v_h,
            c.v_z,
            c.v_spin,
            c.kind,
        )
    }

    /// Residual of a candidate, or the reason it was dropped: it violates the
    /// constraints or cannot beat `bound`.
    fn eval(&mut self, c: &Candidate<S>, bound: S) -> Result<S, Outcome> {
        self.evaluations += 1;
        let mut limits = self.limits;
        if self.w_time > S::zero() {
            limits.abort_after = self.target_time + bound / self.w_time;
        }
        let run = integrate(
            &self.launch(c),
            &self.params,
            self.court,
            self.stop,
            Some(limits),
            false,
        );
        if run.outcome != Outcome::Done {
            return Err(run.outcome);
        }
        let (t, pos, _) = run.end.ok_or(Outcome::Invalid)?;
        let r = self.w_pos * (pos - self.target_pos).norm()
            + self.w_time * (t - self.target_time).abs();
        if r < bound {
            Ok(r)
        } else {
            Err(Outcome::Invalid)
        }
    }

    /// Scan the grid in index order (spin, v_z, v_h); ties keep the lowest
    /// index. Within a row of increasing `v_h`, once a launch bounces past
    /// the receiver's court the faster ones do too, so the row ends there.
    fn scan(&mut self, grid: &GridSpec<S>, bound: S) -> Option<(Candidate<S>, S)> {
        let mut best: Option<(Candidate<S>, S)> = None;
        for (v_spin, kind) in grid.spin_configs() {
            for v_z in grid.v_z.values() {
                for v_h in grid.v_h.values() {
                    let c = Candidate {
                        v_h,
                        v_z,
                        v_spin,
                        kind,
                    };
                    let cur = best.map_or(bound, |(_, r)| r);
                    match self.eval(&c, cur) {
                        Ok(r) => best = Some((c, r)),
                        Err(Outcome::Overshoot) => break,
                        Err(_) => {}
                    }
                }
            }
        }
        best
    }

    /// Compass search over `(v_h, v_z, v_spin)` with a fixed spin kind.
    fn refine(
        &mut self,
        start: (Candidate<S>, S),
        steps: [S; 3],
        halvings: u32,
    ) -> (Candidate<S>, S) {
        let (mut best, mut r_best) = start;
        let mut step = steps.map(|s| s * S::half());
        for _ in 0..halvings {
            let mut improved = true;
            while improved {
                improved = false;
                for axis in 0..3 {
                    if step[axis] <= S::zero() {
                        continue;
                    }
                    for sign in [S::one(), -S::one()] {
                        let mut c = best;
                        match axis {
                            0 => c.v_h = c.v_h + sign * step[0],
                            1 => c.v_z = c.v_z + sign * step[1],
                            _ => c.v_spin = (c.v_spin + sign * step[2]).max(S::zero()),
                        }
                        if c.v_h <= S::zero() {
                            continue;
                        }
                        if let Ok(r) = self.eval(&c, r_best) {
                            best = c;
                            r_best = r;
                            improved = true;
                        }
                    }
                }
            }
            step = step.map(|s| s * S::half());
        }
        (best, r_best)
    }
}

impl<'a, S: Scalar> Search<'a, S> {
    /// End-plane height and time errors of a candidate under `params`.
    fn misfit(&mut self, c: &Candidate<S>, params: &FlightParams<S>) -> Option<[S; 2]> {
        self.evaluations += 1;
        let run = integrate(
            &self.launch(c),
            params,
            self.court,
            self.stop,
            Some(self.limits),
            false,
        );
        if run.outcome != Outcome::Done {
            return None;
        }
        let (t, pos, _) = run.end?;
        Some([pos.z - self.target_pos.z, t - self.target_time])
    }

    fn weigh(&self, m: [S; 2]) -> S {
        self.w_pos * m[0].abs() + self.w_time * m[1].abs()
    }

    /// Newton iterations on `(v_h, v_z)` driving the end-plane height and
    /// time errors to zero. Only improving steps are taken.
    fn polish(
        &mut self,
        start: Candidate<S>,
        params: &FlightParams<S>,
        iterations: u32,
    ) -> Candidate<S> {
        let Some(mut m) = self.misfit(&start, params) else {
            return start;
        };
        let mut best = start;
        let mut r_best = self.weigh(m);
        let h = S::lit(1e-4);
        for _ in 0..iterations {
            if r_best < S::lit(1e-7) {
                break;
            }
            let mut dh = best;
            dh.v_h = dh.v_h + h;
            let mut dz = best;
            dz.v_z = dz.v_z + h;
            let (Some(mh), Some(mz)) = (self.misfit(&dh, params), self.misfit(&dz, params)) else {
                break;
            };
            let j = [
                [(mh[0] - m[0]) / h, (mz[0] - m[0]) / h],
                [(mh[1] - m[1]) / h, (mz[1] - m[1]) / h],
            ];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if !(det.abs() > S::lit(1e-12)) {
                break;
            }
            let step_h = -(j[1][1] * m[0] - j[0][1] * m[1]) / det;
            let step_z = -(-j[1][0] * m[0] + j[0][0] * m[1]) / det;
            let mut alpha = S::one();
            let mut moved = false;
            for _ in 0..6 {
                let mut c = best;
                c.v_h = c.v_h + alpha * step_h;
                c.v_z = c.v_z + alpha * step_z;
                if c.v_h > S::zero() {
                    if let Some(mc) = self.misfit(&c, params) {
                        let r = self.weigh(mc);
                        if r < r_best {
                            best = c;
                            r_best = r;
                            m = mc;
                            moved = true;
                            break;
                        }
                    }
                }
                alpha = alpha * S::half();
            }
            if !moved {
                break;
            }
        }
        best
    }
}

fn spin_step<S: Scalar>(spins: &[S]) -> S {
    let mut sorted: Vec<S> = spins.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| *d > S::zero())
        .fold(S::zero(), S::max)
}

/// Recover the flight between consecutive contacts `a` and `b`.
///
/// Candidates must clear the net and, unless `volley`, bounce inside the
/// receiver's half before reaching the plane of `b`. The flight ends where it
/// crosses the plane of `b` (after the bounce for groundstrokes, before it for
/// volleys). The returned trajectory carries the first bounce; for volleys it
/// is where the ball would have bounced.
pub fn fit_trajectory<S: Scalar>(
    a: &ContactPoint<S>,
    b: &ContactPoint<S>,
    params: &FlightParams<S>,
    court: &CourtSpec<S>,
    grid: &GridSpec<S>,
    volley: bool,
) -> Result<FitResult<S>, Error> {
    if !(a.time < b.time) {
        return Err(Error::InvalidInput("contact times must increase".into()));
    }
    if Side::of(a.pos.y) == Side::of(b.pos.y) || a.pos.y == S::zero() || b.pos.y == S::zero() {
        return Err(Error::InvalidInput(
            "contacts must be on opposite sides of the net".into(),
        ));
    }
    let receiver = Side::of(b.pos.y);
    let span = b.time - a.time;
    let max_time = span + grid.tolerance / grid.w_time.max(S::lit(1e-9)) + S::lit(0.1);
    let stop = StopRule {
        max_time,
        plane_y: Some(b.pos.y),
        plane_after_bounce: !volley,
        locate_bounce: false,
    };
    let limits = ProbeLimits {
        abort_after: S::infinity(),
        require_net_clear: true,
        bounce_in: if volley { None } else { Some(receiver) },
        forbid_bounce: volley,
        end_at_bounce: false,
    };
    let mut search_params = *params;
    search_params.dt = grid.search_dt;
    let mut search = Search {
        origin: *a,
        toward: b.pos.xy(),
        params: search_params,
        court,
        max_time,
        stop,
        limits,
        target_pos: b.pos,
        target_time: b.time,
        w_pos: grid.w_pos,
        w_time: grid.w_time,
        evaluations: 0,
    };
    let bound = grid.tolerance * S::lit(4.0) + S::one();
    let Some(grid_best) = search.scan(grid, bound) else {
        return Err(Error::NoFeasibleTrajectory {
            best_residual: None,
        });
    };
    let steps = [
        grid.v_h.spacing(),
        grid.v_z.spacing(),
        spin_step(&grid.spins),
    ];
    let (best, _) = if grid.refine_halvings > 0 {
        search.refine(grid_best, steps, grid.refine_halvings)
    } else {
        grid_best
    };

    // Polish and re-simulate the winner at the flight step.
    search.stop.locate_bounce = false;
    let best = search.polish(best, params, 8);
    let launch = search.launch(&best);
    let final_stop = StopRule {
        max_time: search.max_time,
        plane_y: Some(b.pos.y),
        plane_after_bounce: !volley,
        locate_bounce: volley,
    };
    let trajectory = simulate_trajectory(&launch, params, court, final_stop)?;
    let residual = grid.w_pos * (trajectory.end_pos - b.pos).norm()
        + grid.w_time * (trajectory.end_time - b.time).abs();
    if residual > grid.tolerance {
        return Err(Error::NoFeasibleTrajectory {
            best_residual: Some(residual.to_f64_lossy()),
        });
    }
    Ok(FitResult {
        trajectory,
        residual,
        grid_residual: grid_best.1,
        evaluations: search.evaluations,
    })
}

/// Settings for aiming a shot at a bounce point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", deny_unknown_fields, default)]
pub struct AimSpec<S = f64> {
    /// Range of launch vertical speeds considered, m/s.
    pub v_z_min: S,
    pub v_z_max: S,
    /// Largest horizontal launch speed considered, m/s.
    pub v_h_max: S,
    /// Bounce position tolerance, m.
    pub pos_tolerance: S,
    /// Relative ground-speed tolerance.
    pub speed_tolerance: S,
    /// Minimum height above the net tape for a launch to count as clearing.
    pub net_margin: S,
    pub search_dt: S,
    /// Flight continues after the bounce until the second bounce or this
    /// many seconds after contact.
    pub max_time: S,
}

impl<S: Scalar> Default for AimSpec<S> {
    fn default() -> Self {
        Self {
            v_z_min: S::lit(-10.0),
            v_z_max: S::lit(15.0),
            v_h_max: S::lit(70.0),
            pos_tolerance: S::lit(0.2),
            speed_tolerance: S::lit(0.05),
            net_margin: S::lit(0.05),
            search_dt: S::lit(0.005),
            max_time: S::lit(4.0),
        }
    }
}

impl<S: Scalar> AimSpec<S> {
    pub fn validate(&self) -> Result<(), Error> {
        let positive = [
            self.v_h_max,
            self.pos_tolerance,
            self.speed_tolerance,
            self.search_dt,
            self.max_time,
        ];
        if !(self.v_z_max > self.v_z_min)
            || positive.iter().any(|v| !(*v > S::zero()))
            || !(self.net_margin >= S::zero())
        {
            return Err(Error::Config(
                "aim: need v_z_max > v_z_min, positive limits and net_margin >= 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct AimResult<S = f64> {
    /// Open-ended flight from the contact to the second bounce or time limit.
    pub trajectory: BallTrajectory<S>,
    pub bounce_error: S,
    /// Relative error of the contact-to-bounce ground speed.
    pub speed_error: S,
    pub clears_net: bool,
    pub within_tolerance: bool,
}

#[derive(Debug, Clone, Copy)]
struct Landing<S> {
    v_h: S,
    s: S,
    time: S,
    clearance: S,
}

struct Aim<'a, S: Scalar> {
    contact: ContactPoint<S>,
    target: Vec2<S>,
    distance: S,
    spin: (S, SpinKind),
    params: FlightParams<S>,
    court: &'a CourtSpec<S>,
    spec: &'a AimSpec<S>,
    evaluations: u32,
}

impl<'a, S: Scalar> Aim<'a, S> {
    fn launch(&self, v_h: S, v_z: S) -> LaunchState<S> {
        LaunchState::toward(
            self.contact.time,
            self.contact.pos,
            self.target,
            v_h,
            v_z,
            self.spin.0,
            self.spin.1,
        )
    }

    fn land(&mut self, v_h: S, v_z: S) -> Option<Landing<S>> {
        self.evaluations += 1;
        let launch = self.launch(v_h, v_z);
        let limits = ProbeLimits {
            abort_after: S::infinity(),
            require_net_clear: false,
            bounce_in: None,
            forbid_bounce: false,
            end_at_bounce: true,
        };
        let run = integrate(
            &launch,
            &self.params,
            self.court,
            StopRule::open(self.spec.max_time),
            Some(limits),
            false,
        );
        let b = run.bounce?;
        let s = (b.pos - self.contact.pos.xy()).norm();
        let clearance = match run.net {
            Some(n) if n.before_bounce => n.clearance,
            _ => -S::infinity(),
        };
        Some(Landing {
            v_h,
            s,
            time: b.time,
            clearance,
        })
    }

    /// Horizontal speed that lands exactly `distance` away for this `v_z`.
    fn solve_range(&mut self, v_z: S, guess: S) -> Option<Landing<S>> {
        let tol = S::lit(1e-5);
        let v_max = self.spec.v_h_max;
        let mut lo = (S::lit(0.05), self.land(S::lit(0.05), v_z)?);
        if lo.1.s >= self.distance {
            return None;
        }
        let mut hi_v = guess.max(S::lit(0.1)).min(v_max);
        let mut hi = loop {
            let l = self.land(hi_v, v_z)?;
            if l.s >= self.distance {
                break (hi_v, l);
            }
            lo = (hi_v, l);
            if hi_v >= v_max {
                return None;
            }
            hi_v = (hi_v * S::lit(1.5)).min(v_max);
        };
        // Illinois false position on s(v_h) - distance.
        let mut side = 0i8;
        let (mut f_lo, mut f_hi) = (lo.1.s - self.distance, hi.1.s - self.distance);
        for _ in 0..60 {
            let v = (lo.0 * f_hi - hi.0 * f_lo) / (f_hi - f_lo);
            let v = if v > lo.0 && v < hi.0 {
                v
            } else {
                (lo.0 + hi.0) * S::half()
            };
            let l = self.land(v, v_z)?;
            let f = l.s - self.distance;
            if f.abs() < tol || (hi.0 - lo.0) < S::lit(1e-9) {
                return Some(l);
            }
            if f < S::zero() {
                lo = (v, l);
                f_lo = f;
                if side == -1 {
                    f_hi = f_hi * S::half();
                }
                side = -1;
            } else {
                hi = (v, l);
                f_hi = f;
                if side == 1 {
                    f_lo = f_lo * S::half();
                }
                side = 1;
            }
        }
        Some(if f_lo.abs() < f_hi.abs() { lo.1 } else { hi.1 })
    }

    /// Bisection on `v_z` for the root of `g`, where `g` is increasing and
    /// `g(lo) < 0 <= g(hi)`.
    fn bisect_vz<F>(&mut self, mut lo: S, mut hi: S, mut g: F) -> Option<(S, Landing<S>)>
    where
        F: FnMut(&Landing<S>) -> S,
    {
        let mut best = None;
        let mut guess = self.distance;
        for _ in 0..40 {
            let mid = (lo + hi) * S::half();
            match self.solve_range(mid, guess) {
                Some(l) => {
                    guess = l.v_h;
                    if g(&l) < S::zero() {
                        lo = mid;
                    } else {
                        hi = mid;
                        best = Some((mid, l));
                    }
                }
                None => hi = mid,
            }
            if hi - lo < S::lit(1e-4) {
                break;
            }
        }
        best
    }
}

/// Find a launch from `contact` whose first bounce lands at `target` with
/// average contact-to-bounce ground speed near `ground_speed`, using the given
/// spin. The bounce position is matched exactly (to solver tolerance); the
/// flight time is then matched as closely as the launch envelope allows. If the
/// matching launch would hit the net, the flattest launch that clears it is
/// used instead; if none clears it, the ball goes into the net and
/// `clears_net` is false.
pub fn aim_at_bounce<S: Scalar>(
    contact: &ContactPoint<S>,
    target: Vec2<S>,
    ground_speed: S,
    spin: (S, SpinKind),
    params: &FlightParams<S>,
    court: &CourtSpec<S>,
    spec: &AimSpec<S>,
) -> Result<AimResult<S>, Error> {
    if !(ground_speed > S::zero()) {
        return Err(Error::InvalidInput("ground speed must be positive".into()));
    }
    if !(contact.pos.z > S::zero()) {
        return Err(Error::InvalidInput(
            "contact height must be positive".into(),
        ));
    }
    let distance = (target - contact.pos.xy()).norm();
    if !(distance > S::lit(0.01)) {
        return Err(Error::InvalidInput(
            "target too close to the contact".into(),
        ));
    }
    let target_time = contact.time + distance / ground_speed;
    let mut search_params = *params;
    search_params.dt = spec.search_dt;
    let mut aim = Aim {
        contact: *contact,
        target,
        distance,
        spin,
        params: search_params,
        court,
        spec,
        evaluations: 0,
    };

    let crosses_net = Side::of(contact.pos.y) != Side::of(target.y);
    // Flight time grows with launch angle along the iso-range curve.
    let timed = aim.bisect_vz(spec.v_z_min, spec.v_z_max, |l| l.time - target_time);
    let mut chosen = match timed {
        Some(found) => Some(found),
        // Even the steepest launch is too fast: take the loftiest one.
        None => aim
            .solve_range(spec.v_z_max, distance)
            .map(|l| (spec.v_z_max, l)),
    };
    if chosen.is_none() {
        // Even the flattest launch is too slow.
        chosen = aim
            .solve_range(spec.v_z_min, distance)
            .map(|l| (spec.v_z_min, l));
    }
    let Some((mut v_z, mut landing)) = chosen else {
        return Err(Error::NoFeasibleTrajectory {
            best_residual: None,
        });
    };
    if crosses_net && landing.clearance < spec.net_margin {
        let margin = spec.net_margin;
        if let Some((vz, l)) = aim.bisect_vz(v_z, spec.v_z_max, |l| l.clearance - margin) {
            v_z = vz;
            landing = l;
        }
    }
    let launch = aim.launch(landing.v_h, v_z);
    let trajectory = simulate_trajectory(&launch, params, court, StopRule::open(spec.max_time))?;
    let bounce_error = trajectory
        .bounce
        .map_or(S::infinity(), |b| (b.pos - target).norm());
    let speed = trajectory.ground_speed_to_bounce().unwrap_or(S::zero());
    let speed_error = ((speed - ground_speed) / ground_speed).abs();
    let clears_net = if crosses_net {
        trajectory
            .net
            .is_some_and(|n| n.before_bounce && n.clearance > S::zero())
    } else {
        false
    };
    let within_tolerance =
        bounce_error <= spec.pos_tolerance && speed_error <= spec.speed_tolerance;
    Ok(AimResult {
        trajectory,
        bounce_error,
        speed_error,
        clears_net,
        within_tolerance,
    })
}
