//! Data-driven tennis rally simulation.
//!
//! A point is synthesized one shot cycle at a time: the responding player's
//! behavior model decides shot type, speed, placement and recovery goal from a
//! discretized point state, a cost-based search picks the database clip that
//! best realizes those goals, and the outgoing ball is re-simulated from the
//! corrected contact point.
//!
//! The numeric layers ([`court`], [`physics`], [`kde`]) are generic over the
//! scalar type; everything above them works in `f64`.

pub mod behavior;
pub mod clipdb;
pub mod config;
pub mod court;
mod error;
pub mod kde;
pub mod physics;
pub mod rally;
pub mod scalar;
pub mod search;
pub mod shot;
pub mod vec;

pub use error::Error;
pub use scalar::Scalar;
pub use shot::{Handedness, ShotOutcome, ShotType};
pub use vec::{Vec2, Vec3};

/// Scalar used by the database, behavior, search and rally layers.
pub type Real = f64;

pub type CourtSpecF32 = court::CourtSpec<f32>;
pub type FlightParamsF32 = physics::FlightParams<f32>;
pub type TrajectoryF32 = physics::BallTrajectory<f32>;
pub type BallTrajectory = physics::BallTrajectory<Real>;
pub type CourtPosition = Vec2<Real>;
