//! Engine configuration file (TOML). Every section and key is optional;
//! unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::behavior::{DescriptorConfig, Granularity, KdeConfig, ModelConfig};
use crate::clipdb::GeneratorSettings;
use crate::court::{BinConfig, CourtSpec};
use crate::physics::{AimSpec, ContactHeuristic, FlightParams, GridSpec, SpinTable};
use crate::rally::{EngineParams, RallySettings};
use crate::search::{CostWeights, Thresholds};
use crate::Error;

/// Environment variable naming a config file when none is given explicitly.
pub const CONFIG_ENV: &str = "RALLYFORGE_CONFIG";

/// How finely each region feature of the descriptor is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct DescriptorSection {
    pub player: Granularity,
    pub opponent: Granularity,
    pub ball_start: Granularity,
    pub ball_bounce: Granularity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeneratorSection {
    /// Shots after which a scripted rally is forced to end.
    pub max_shots: u32,
}

impl Default for GeneratorSection {
    fn default() -> Self {
        Self {
            max_shots: GeneratorSettings::standard().max_shots,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct EngineConfig {
    pub court: CourtSpec,
    pub flight: FlightParams,
    pub bins: BinConfig,
    pub descriptor: DescriptorSection,
    pub kde: KdeConfig,
    pub weights: CostWeights,
    pub thresholds: Thresholds,
    pub grid: GridSpec,
    pub aim: AimSpec,
    pub spin: SpinTable,
    pub contact: ContactHeuristic,
    pub rally: RallySettings,
    pub generator: GeneratorSection,
}

impl EngineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, Error> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, Error> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Load `explicit`, else the file named by the environment variable,
    /// else the defaults. Returns the path actually read.
    pub fn resolve(explicit: Option<&Path>) -> Result<(Self, Option<PathBuf>), Error> {
        let path = match explicit {
            Some(p) => Some(p.to_path_buf()),
            None => std::env::var_os(CONFIG_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from),
        };
        match path {
            Some(p) => Ok((Self::load(&p)?, Some(p))),
            None => Ok((Self::default(), None)),
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.court.validate()?;
        self.flight.validate()?;
        self.bins.validate()?;
        self.kde.validate()?;
        self.weights.validate()?;
        self.thresholds.validate()?;
        self.grid.validate()?;
        self.aim.validate()?;
        self.spin.validate()?;
        self.contact.validate()?;
        self.rally.validate()?;
        if self.generator.max_shots < 2 {
            return Err(Error::Config(
                "generator.max_shots must be at least 2".into(),
            ));
        }
        Ok(())
    }

    pub fn model_config(&self) -> ModelConfig {
        let d = self.descriptor;
        ModelConfig {
            descriptor: DescriptorConfig {
                player: d.player,
                opponent: d.opponent,
                ball_start: d.ball_start,
                ball_bounce: d.ball_bounce,
                bins: self.bins,
            },
            kde: self.kde.clone(),
        }
    }

    pub fn engine_params(&self) -> EngineParams {
        EngineParams {
            weights: self.weights,
            thresholds: self.thresholds,
            aim: self.aim.clone(),
            spin: self.spin,
            rally: self.rally,
        }
    }

    pub fn generator_settings(&self) -> GeneratorSettings {
        GeneratorSettings {
            court: self.court,
            flight: self.flight,
            aim: self.aim.clone(),
            spin: self.spin,
            contact: self.contact,
            max_shots: self.generator.max_shots,
        }
    }
}
