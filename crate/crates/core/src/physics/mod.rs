//! Ball flight, bounce, trajectory fitting and contact estimation.

mod contact;
mod fit;
mod flight;

pub use contact::{estimate_contact_point, ContactHeuristic, SpinTable};
pub use fit::{
    aim_at_bounce, fit_trajectory, AimResult, AimSpec, Axis, ContactPoint, FitResult, GridSpec,
};
pub use flight::{
    intercept, lift_coeff, simulate_trajectory, step_flight, BallSample, BallTrajectory,
    BounceEvent, EndReason, FlightParams, FlightState, LaunchState, NetCrossing, SpinKind,
    StopRule,
};
