//! Player behavior: the discretized point-state descriptor, conditional
//! shot-selection and recovery models, and the marginalization ladder.

mod model;

use serde::{Deserialize, Serialize};

use crate::clipdb::ClipDatabase;
use crate::court::{region_of, velocity_bin, BinConfig, CourtRegion, CourtSpec, Depth, Lateral};
use crate::physics::{intercept, BallTrajectory};
use crate::vec::{Vec2, Vec3};
use crate::{Error, Real};

pub use model::{
    fit_models, Bandwidths, BehaviorDecision, Categorical, ConditionalModel, Draw1, Draw2,
    KdeConfig, Kind, Level, Lookup, ModelConfig, ModelData, ModelFile, OpponentFilter,
    RecoveryDecision, Sample, ShotSelection, MODEL_FORMAT, MODEL_VERSION,
};

/// How finely a position feature is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    /// Lateral band and depth: 6 values.
    #[default]
    Full,
    /// Lateral band only: 3 values.
    Lateral,
    /// Depth only: 2 values.
    Depth,
    /// Feature dropped: 1 value.
    Ignore,
}

impl Granularity {
    pub fn values(self) -> u8 {
        match self {
            Granularity::Full => 6,
            Granularity::Lateral => 3,
            Granularity::Depth => 2,
            Granularity::Ignore => 1,
        }
    }

    /// Code of a region within its own half; the half itself is implied by
    /// the feature.
    pub fn code(self, r: CourtRegion) -> u8 {
        let lat = match r.lateral {
            Lateral::Deuce => 0,
            Lateral::Center => 1,
            Lateral::Ad => 2,
        };
        let depth = match r.depth {
            Depth::Front => 0,
            Depth::Back => 1,
        };
        match self {
            Granularity::Full => lat * 2 + depth,
            Granularity::Lateral => lat,
            Granularity::Depth => depth,
            Granularity::Ignore => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct DescriptorConfig {
    pub player: Granularity,
    pub opponent: Granularity,
    pub ball_start: Granularity,
    pub ball_bounce: Granularity,
    pub bins: BinConfig,
}

impl DescriptorConfig {
    pub fn validate(&self) -> Result<(), Error> {
        self.bins.validate()
    }

    /// Number of distinct cells.
    pub fn cell_count(&self) -> u32 {
        [
            self.player,
            self.opponent,
            self.ball_start,
            self.ball_bounce,
        ]
        .iter()
        .map(|g| g.values() as u32)
        .product::<u32>()
            * self.bins.n_bins as u32
    }
}

/// The five features describing the situation when a shot cycle starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointStateDescriptor {
    /// Player position at contact.
    pub player_region: CourtRegion,
    /// Opponent position at the player's contact.
    pub opponent_region: CourtRegion,
    /// Where the incoming ball was struck.
    pub ball_start_region: CourtRegion,
    /// Where the incoming ball bounces (or would have).
    pub ball_bounce_region: CourtRegion,
    pub velocity_bin: u8,
}

/// Features that may be relaxed, least important first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    Velocity,
    BallBounce,
    BallStart,
    Opponent,
}

impl Feature {
    pub const LADDER: [Feature; 4] = [
        Feature::Velocity,
        Feature::BallBounce,
        Feature::BallStart,
        Feature::Opponent,
    ];

    fn slot(self) -> usize {
        match self {
            Feature::Opponent => 1,
            Feature::BallStart => 2,
            Feature::BallBounce => 3,
            Feature::Velocity => 4,
        }
    }
}

/// Marker for a relaxed feature in a [`CellKey`].
pub const ANY: u8 = u8::MAX;

/// Encoded descriptor: player, opponent, ball start, ball bounce, velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellKey(pub [u8; 5]);

impl CellKey {
    pub fn relaxed(mut self, r: Relaxation) -> Self {
        for f in r.features() {
            self.0[f.slot()] = ANY;
        }
        self
    }

    /// Injective id in `0..cell_count` for a key with no relaxed features.
    pub fn id(&self, cfg: &DescriptorConfig) -> u32 {
        let radix =
            [cfg.player, cfg.opponent, cfg.ball_start, cfg.ball_bounce].map(|g| g.values() as u32);
        let mut id = 0;
        for (i, r) in radix.iter().enumerate() {
            id = id * r + self.0[i] as u32;
        }
        id * cfg.bins.n_bins as u32 + self.0[4] as u32
    }
}

/// A set of relaxed features, bit `i` standing for `Feature::LADDER[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Relaxation(pub u8);

impl Relaxation {
    pub const NONE: Relaxation = Relaxation(0);

    pub fn k(self) -> u32 {
        self.0.count_ones()
    }

    pub fn features(self) -> impl Iterator<Item = Feature> {
        Feature::LADDER
            .into_iter()
            .enumerate()
            .filter(move |(i, _)| self.0 & (1 << i) != 0)
            .map(|(_, f)| f)
    }

    /// All 16 relaxations in search order: by size, then lexicographically
    /// by importance rank so less important features go first.
    pub fn ladder() -> [Relaxation; 16] {
        let mut masks: Vec<u8> = (0..16).collect();
        let ranks = |m: u8| (0..4).filter(|i| m & (1 << i) != 0).collect::<Vec<u8>>();
        masks.sort_by(|a, b| {
            a.count_ones()
                .cmp(&b.count_ones())
                .then_with(|| ranks(*a).cmp(&ranks(*b)))
        });
        std::array::from_fn(|i| Relaxation(masks[i]))
    }
}

impl PointStateDescriptor {
    pub fn key(&self, cfg: &DescriptorConfig) -> CellKey {
        CellKey([
            cfg.player.code(self.player_region),
            cfg.opponent.code(self.opponent_region),
            cfg.ball_start.code(self.ball_start_region),
            cfg.ball_bounce.code(self.ball_bounce_region),
            self.velocity_bin.min(cfg.bins.n_bins - 1),
        ])
    }

    /// Descriptor of a database clip from its known positions at contact.
    /// Clips without a linked incoming ball fall back to the opponent's
    /// position at the clip start and the contact point.
    pub fn of_clip(db: &ClipDatabase, index: usize, bins: &BinConfig) -> Option<Self> {
        let c = db.clip(index);
        let t_c = c.t_c?;
        let court = &db.court;
        let at_contact = c.player_at(t_c);
        let incoming = db.incoming(index);
        let start = incoming.map_or(c.opponent_at(0.0), |b| b.start.xy());
        let bounce = incoming.and_then(|b| b.bounce).unwrap_or(c.x_c?.xy());
        let reach = (at_contact - c.player_at(0.0)).norm() / t_c;
        Some(Self {
            player_region: region_of(at_contact, court),
            opponent_region: region_of(c.opponent_at(t_c), court),
            ball_start_region: region_of(start, court),
            ball_bounce_region: region_of(bounce, court),
            velocity_bin: velocity_bin(reach, bins),
        })
    }
}

/// Estimated contact for a player waiting on the incoming ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactEstimate {
    pub time: Real,
    pub pos: Vec3,
    /// Speed needed to get from the current position to the contact.
    pub reach_velocity: Real,
}

/// Contact estimate where the ball crosses the player's current `y`, or at
/// the post-bounce apex when it never gets there.
pub fn estimate_contact(
    traj: &BallTrajectory,
    now: Real,
    player: Vec2,
) -> Result<ContactEstimate, Error> {
    let (time, pos) = match intercept(traj, player.y) {
        Ok(hit) => hit,
        Err(_) => {
            let tb = traj.bounce.map(|b| b.time).ok_or(Error::NoIntersection)?;
            let s = traj
                .samples
                .iter()
                .filter(|s| s.t > tb)
                .max_by(|a, b| a.pos.z.total_cmp(&b.pos.z))
                .ok_or(Error::NoIntersection)?;
            (s.t, s.pos)
        }
    };
    let dt = time - now;
    if !(dt > 0.0) {
        return Err(Error::BallEndedEarly { time });
    }
    Ok(ContactEstimate {
        time,
        pos,
        reach_velocity: (pos.xy() - player).norm() / dt,
    })
}

/// Descriptor for a player about to respond to `traj`, in that player's
/// frame. The opponent's region comes from their current recovery target.
pub fn build_descriptor(
    traj: &BallTrajectory,
    now: Real,
    player: Vec2,
    opponent_recovery: Vec2,
    court: &CourtSpec,
    bins: &BinConfig,
) -> Result<(PointStateDescriptor, ContactEstimate), Error> {
    let est = estimate_contact(traj, now, player)?;
    let bounce = traj.bounce.map_or(est.pos.xy(), |b| b.pos);
    let d = PointStateDescriptor {
        player_region: region_of(est.pos.xy(), court),
        opponent_region: region_of(opponent_recovery, court),
        ball_start_region: region_of(traj.launch.origin.xy(), court),
        ball_bounce_region: region_of(bounce, court),
        velocity_bin: velocity_bin(est.reach_velocity, bins),
    };
    Ok((d, est))
}
