//! Conditional shot-selection and recovery models fitted from a player's clips.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{CellKey, DescriptorConfig, Granularity, PointStateDescriptor, Relaxation};
use crate::clipdb::ClipDatabase;
use crate::court::{region_of, CourtSpec};
use crate::kde::{self, select_bandwidth, Kde1, Kde2};
use crate::shot::{Handedness, ShotType};
use crate::vec::Vec2;
use crate::{Error, Real};

pub const MODEL_FORMAT: &str = "rallyforge-model";
pub const MODEL_VERSION: u32 = 1;

pub type Draw1 = kde::Draw<Real>;
pub type Draw2 = kde::Draw<Vec2>;

/// Which opponents' clips a model is fitted from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OpponentFilter {
    #[default]
    Any,
    Only(String),
    Handedness(Handedness),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KdeConfig {
    /// Candidate bandwidths for placement and recovery densities, m.
    pub position_bandwidths: Vec<Real>,
    /// Candidate bandwidths for shot speed densities, m/s.
    pub speed_bandwidths: Vec<Real>,
    /// Draws below this fraction of the peak density are rejected.
    pub reject_fraction: Real,
    pub max_attempts: u32,
}

impl Default for KdeConfig {
    fn default() -> Self {
        Self {
            position_bandwidths: vec![0.25, 0.5, 0.75, 1.0, 1.5],
            speed_bandwidths: vec![0.5, 1.0, 2.0, 4.0],
            reject_fraction: 0.1,
            max_attempts: 64,
        }
    }
}

impl KdeConfig {
    pub fn validate(&self) -> Result<(), Error> {
        let ok = |v: &[Real]| !v.is_empty() && v.iter().all(|h| *h > 0.0 && h.is_finite());
        if !ok(&self.position_bandwidths) || !ok(&self.speed_bandwidths) {
            return Err(Error::Config(
                "kde: bandwidth candidates must be non-empty and positive".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.reject_fraction) || self.max_attempts == 0 {
            return Err(Error::Config(
                "kde: reject_fraction must be in [0, 1) and max_attempts >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub descriptor: DescriptorConfig,
    pub kde: KdeConfig,
}

impl ModelConfig {
    pub fn validate(&self) -> Result<(), Error> {
        self.descriptor.validate()?;
        self.kde.validate()
    }
}

/// One database clip's contribution to a model, in the player's frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub clip_id: u64,
    pub key: CellKey,
    pub shot_type: ShotType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_b: Option<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_b: Option<Vec2>,
    /// Region code of the placement, when there is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub placement: Option<u8>,
    pub recovery: Vec2,
    /// Recovered to a front region (approached the net).
    pub front: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bandwidths {
    pub velocity: Real,
    pub placement: Real,
    pub recovery: Real,
}

/// Which distribution a lookup is for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Shot types, restricted to the allowed ones (indexed like `ShotType::ALL`).
    ShotType([bool; 7]),
    Velocity(ShotType),
    Placement(ShotType),
    /// Recovery given the placement region code.
    Recovery(u8),
}

impl Kind {
    pub const ANY_SHOT: Kind = Kind::ShotType([true; 7]);

    fn accepts(&self, s: &Sample) -> bool {
        match *self {
            Kind::ShotType(allowed) => allowed[s.shot_type.index()],
            Kind::Velocity(t) => s.shot_type == t && s.v_b.is_some(),
            Kind::Placement(t) => s.shot_type == t && s.x_b.is_some(),
            Kind::Recovery(code) => s.placement == Some(code),
        }
    }
}

/// Where a lookup found its support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    /// A cell with the given features relaxed (mask over `Feature::LADDER`).
    Cell(Relaxation),
    /// Every sample of the player, after the ladder came up empty.
    Pooled,
}

impl Level {
    /// Number of relaxed features, `None` when pooled.
    pub fn k(&self) -> Option<u32> {
        match self {
            Level::Cell(r) => Some(r.k()),
            Level::Pooled => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lookup {
    pub level: Level,
    /// Indices into [`ConditionalModel::samples`].
    pub support: Vec<u32>,
}

/// Shot-type counts of a support set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Categorical {
    pub counts: [u64; 7],
}

impl Categorical {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn probability_exact(&self, t: ShotType) -> Ratio<u64> {
        Ratio::new(self.counts[t.index()], self.total().max(1))
    }

    pub fn probability(&self, t: ShotType) -> Real {
        self.counts[t.index()] as Real / self.total().max(1) as Real
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<ShotType> {
        let total = self.total();
        if total == 0 {
            return None;
        }
        let mut u = rng.random_range(0..total);
        for t in ShotType::ALL {
            let n = self.counts[t.index()];
            if u < n {
                return Some(t);
            }
            u -= n;
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShotSelection {
    pub shot_type: ShotType,
    pub velocity: Real,
    pub placement: Vec2,
    pub shot_level: Level,
    pub velocity_level: Level,
    pub placement_level: Level,
    /// Draws used for velocity and placement; a fallback to the mode is
    /// reported as `max_attempts` with `fell_back`.
    pub velocity_attempts: u32,
    pub placement_attempts: u32,
    pub fell_back: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryDecision {
    pub approach_net: bool,
    pub target: Vec2,
    /// Fraction of matching clips that recovered to the front, as `num/den`.
    pub front_count: u64,
    pub total: u64,
    pub level: Level,
}

/// The decision tuple that drives clip search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BehaviorDecision {
    pub shot_type: ShotType,
    /// Ground speed from contact to bounce, m/s.
    pub shot_velocity: Real,
    pub placement: Vec2,
    pub recovery: Vec2,
    pub approach_net: bool,
}

/// Serializable part of a fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelData {
    pub player_id: String,
    pub opponent_filter: OpponentFilter,
    pub config: ModelConfig,
    pub bandwidths: Bandwidths,
    pub samples: Vec<Sample>,
}

/// Several players' models in one file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub models: Vec<ModelData>,
}

impl ModelFile {
    pub fn new(models: &[ConditionalModel]) -> Self {
        Self {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            models: models.iter().map(|m| m.data.clone()).collect(),
        }
    }

    pub fn into_models(self) -> Result<Vec<ConditionalModel>, Error> {
        if self.format != MODEL_FORMAT || self.version != MODEL_VERSION {
            return Err(Error::Parse {
                line: 1,
                message: format!(
                    "expected {MODEL_FORMAT} v{MODEL_VERSION}, got {} v{}",
                    self.format, self.version
                ),
            });
        }
        self.models
            .into_iter()
            .map(ConditionalModel::from_data)
            .collect()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), Error> {
        serde_json::to_writer(BufWriter::new(File::create(path)?), self)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, Error> {
        serde_json::from_reader(BufReader::new(File::open(path)?)).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }
}

/// Fitted behavior of one player.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalModel {
    data: ModelData,
    shot_cells: Vec<HashMap<CellKey, Vec<u32>>>,
    recovery_cells: Vec<HashMap<(CellKey, u8), Vec<u32>>>,
}

fn placement_code(x_b: Vec2, court: &CourtSpec) -> u8 {
    Granularity::Full.code(region_of(x_b, court))
}

/// Fit a player's models from their non-serve contact clips.
pub fn fit_models(
    db: &ClipDatabase,
    player_id: &str,
    filter: &OpponentFilter,
    config: &ModelConfig,
) -> Result<ConditionalModel, Error> {
    config.validate()?;
    let court = &db.court;
    let depth = court.depth_boundary();
    let mut samples = Vec::new();
    for &i in db.by_player(player_id) {
        let c = db.clip(i);
        let keep = match filter {
            OpponentFilter::Any => true,
            OpponentFilter::Only(id) => &c.opponent_id == id,
            OpponentFilter::Handedness(h) => db.handedness(&c.opponent_id) == *h,
        };
        let Some(shot_type) = c.shot_type else {
            continue;
        };
        if !keep || shot_type == ShotType::Serve {
            continue;
        }
        let Some(d) = PointStateDescriptor::of_clip(db, i, &config.descriptor.bins) else {
            continue;
        };
        let recovery = c.recovery_position();
        samples.push(Sample {
            clip_id: c.id,
            key: d.key(&config.descriptor),
            shot_type,
            v_b: c.v_b(),
            x_b: c.x_b,
            placement: c.x_b.map(|x| placement_code(x, court)),
            recovery,
            front: recovery.y.abs() < depth,
        });
    }
    if samples.is_empty() {
        return Err(Error::InsufficientData(format!(
            "player `{player_id}` has no rally clips under the filter"
        )));
    }

    let mut speeds: BTreeMap<(CellKey, usize), Vec<Real>> = BTreeMap::new();
    let mut places: BTreeMap<(CellKey, usize), Vec<Vec2>> = BTreeMap::new();
    let mut recs: BTreeMap<(CellKey, u8, bool), Vec<Vec2>> = BTreeMap::new();
    for s in &samples {
        let t = s.shot_type.index();
        if let Some(v) = s.v_b {
            speeds.entry((s.key, t)).or_default().push(v);
        }
        if let Some(x) = s.x_b {
            places.entry((s.key, t)).or_default().push(x);
        }
        if let Some(p) = s.placement {
            recs.entry((s.key, p, s.front))
                .or_default()
                .push(s.recovery);
        }
    }
    let speed_groups: Vec<&[Real]> = speeds.values().map(Vec::as_slice).collect();
    let place_groups: Vec<&[Vec2]> = places.values().map(Vec::as_slice).collect();
    let rec_groups: Vec<&[Vec2]> = recs.values().map(Vec::as_slice).collect();
    let bandwidths = Bandwidths {
        velocity: select_bandwidth(&speed_groups, &config.kde.speed_bandwidths)?,
        placement: select_bandwidth(&place_groups, &config.kde.position_bandwidths)?,
        recovery: select_bandwidth(&rec_groups, &config.kde.position_bandwidths)?,
    };
    ConditionalModel::from_data(ModelData {
        player_id: player_id.to_string(),
        opponent_filter: filter.clone(),
        config: config.clone(),
        bandwidths,
        samples,
    })
}

impl ConditionalModel {
    pub fn from_data(data: ModelData) -> Result<Self, Error> {
        data.config.validate()?;
        let mut shot_cells = vec![HashMap::new(); 16];
        let mut recovery_cells = vec![HashMap::new(); 16];
        for (i, s) in data.samples.iter().enumerate() {
            for r in Relaxation::ladder() {
                let key = s.key.relaxed(r);
                shot_cells[r.0 as usize]
                    .entry(key)
                    .or_insert_with(Vec::new)
                    .push(i as u32);
                if let Some(p) = s.placement {
                    recovery_cells[r.0 as usize]
                        .entry((key, p))
                        .or_insert_with(Vec::new)
                        .push(i as u32);
                }
            }
        }
        Ok(Self {
            data,
            shot_cells,
            recovery_cells,
        })
    }

    pub fn data(&self) -> &ModelData {
        &self.data
    }

    pub fn player_id(&self) -> &str {
        &self.data.player_id
    }

    pub fn config(&self) -> &ModelConfig {
        &self.data.config
    }

    pub fn bandwidths(&self) -> Bandwidths {
        self.data.bandwidths
    }

    pub fn samples(&self) -> &[Sample] {
        &self.data.samples
    }

    pub fn key(&self, d: &PointStateDescriptor) -> CellKey {
        d.key(&self.data.config.descriptor)
    }

    fn cell(&self, kind: Kind, key: CellKey, r: Relaxation) -> Vec<u32> {
        let list = match kind {
            Kind::Recovery(code) => self.recovery_cells[r.0 as usize].get(&(key.relaxed(r), code)),
            _ => self.shot_cells[r.0 as usize].get(&key.relaxed(r)),
        };
        list.map_or_else(Vec::new, |l| {
            l.iter()
                .copied()
                .filter(|&i| kind.accepts(&self.data.samples[i as usize]))
                .collect()
        })
    }

    /// First cell on the relaxation ladder with support for `kind`.
    pub fn marginalized_lookup(&self, kind: Kind, key: CellKey) -> Result<Lookup, Error> {
        for r in Relaxation::ladder() {
            let support = self.cell(kind, key, r);
            if !support.is_empty() {
                return Ok(Lookup {
                    level: Level::Cell(r),
                    support,
                });
            }
        }
        Err(Error::NoData)
    }

    /// Like [`Self::marginalized_lookup`], but pools every sample of the
    /// player when the whole ladder is empty.
    pub fn lookup_or_pool(&self, kind: Kind, key: CellKey) -> Result<Lookup, Error> {
        match self.marginalized_lookup(kind, key) {
            Err(Error::NoData) => {
                let support: Vec<u32> = (0..self.data.samples.len() as u32)
                    .filter(|&i| kind.accepts(&self.data.samples[i as usize]))
                    .collect();
                if support.is_empty() {
                    return Err(Error::NoData);
                }
                Ok(Lookup {
                    level: Level::Pooled,
                    support,
                })
            }
            other => other,
        }
    }

    pub fn categorical(&self, support: &[u32]) -> Categorical {
        let mut counts = [0u64; 7];
        for &i in support {
            counts[self.data.samples[i as usize].shot_type.index()] += 1;
        }
        Categorical { counts }
    }

    pub fn velocity_density(&self, support: &[u32]) -> Result<Kde1, Error> {
        let pts = support
            .iter()
            .filter_map(|&i| self.data.samples[i as usize].v_b)
            .collect();
        Kde1::new(pts, self.data.bandwidths.velocity)
    }

    pub fn placement_density(&self, support: &[u32]) -> Result<Kde2, Error> {
        let pts = support
            .iter()
            .filter_map(|&i| self.data.samples[i as usize].x_b)
            .collect();
        Kde2::new(pts, self.data.bandwidths.placement)
    }

    pub fn recovery_density(&self, support: &[u32], front: bool) -> Result<Kde2, Error> {
        let pts = support
            .iter()
            .map(|&i| &self.data.samples[i as usize])
            .filter(|s| s.front == front)
            .map(|s| s.recovery)
            .collect();
        Kde2::new(pts, self.data.bandwidths.recovery)
    }

    /// Sample shot type, speed and placement for cell `key`. Only shot types
    /// flagged in `allowed` are considered.
    pub fn sample_shot_selection<R: Rng + ?Sized>(
        &self,
        key: CellKey,
        allowed: [bool; 7],
        rng: &mut R,
    ) -> Result<ShotSelection, Error> {
        let kde = &self.data.config.kde;
        let shots = self.lookup_or_pool(Kind::ShotType(allowed), key)?;
        let shot_type = self
            .categorical(&shots.support)
            .draw(rng)
            .ok_or(Error::NoData)?;
        let vl = self.lookup_or_pool(Kind::Velocity(shot_type), key)?;
        let v = self.velocity_density(&vl.support)?.sample_above(
            rng,
            kde.reject_fraction,
            kde.max_attempts,
        );
        let pl = self.lookup_or_pool(Kind::Placement(shot_type), key)?;
        let p = self.placement_density(&pl.support)?.sample_above(
            rng,
            kde.reject_fraction,
            kde.max_attempts,
        );
        Ok(ShotSelection {
            shot_type,
            velocity: v.value.max(0.5),
            placement: p.value,
            shot_level: shots.level,
            velocity_level: vl.level,
            placement_level: pl.level,
            velocity_attempts: v.attempts,
            placement_attempts: p.attempts,
            fell_back: v.fell_back || p.fell_back,
        })
    }

    /// Decide whether to approach the net and where to recover after a shot
    /// placed at `placement`.
    pub fn recovery_target<R: Rng + ?Sized>(
        &self,
        key: CellKey,
        placement: Vec2,
        court: &CourtSpec,
        rng: &mut R,
    ) -> Result<RecoveryDecision, Error> {
        let code = placement_code(placement, court);
        let look = match self.lookup_or_pool(Kind::Recovery(code), key) {
            Ok(l) => l,
            // No clip ever placed a ball there: pool over every placement.
            Err(Error::NoData) => Lookup {
                level: Level::Pooled,
                support: (0..self.data.samples.len() as u32).collect(),
            },
            Err(e) => return Err(e),
        };
        let total = look.support.len() as u64;
        let front_count = look
            .support
            .iter()
            .filter(|&&i| self.data.samples[i as usize].front)
            .count() as u64;
        let approach_net = rng.random_range(0..total) < front_count;
        let target = self.recovery_density(&look.support, approach_net)?.mode();
        Ok(RecoveryDecision {
            approach_net,
            target,
            front_count,
            total,
            level: look.level,
        })
    }

    /// Summary of every populated exact cell, in key order.
    pub fn cells(&self) -> Vec<(CellKey, Categorical)> {
        let mut out: Vec<_> = self.shot_cells[0]
            .iter()
            .map(|(k, v)| (*k, self.categorical(v)))
            .collect();
        out.sort_by_key(|(k, _)| *k);
        out
    }
}
