//! Shot vocabulary shared by the physics, database and behavior layers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShotType {
    Serve,
    ForehandTopspin,
    ForehandUnderspin,
    BackhandTopspin,
    BackhandUnderspin,
    ForehandVolley,
    BackhandVolley,
}

impl ShotType {
    pub const ALL: [ShotType; 7] = [
        ShotType::Serve,
        ShotType::ForehandTopspin,
        ShotType::ForehandUnderspin,
        ShotType::BackhandTopspin,
        ShotType::BackhandUnderspin,
        ShotType::ForehandVolley,
        ShotType::BackhandVolley,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Short label used in tables ("S", "FH-T", ...).
    pub fn label(self) -> &'static str {
        match self {
            ShotType::Serve => "S",
            ShotType::ForehandTopspin => "FH-T",
            ShotType::ForehandUnderspin => "FH-U",
            ShotType::BackhandTopspin => "BH-T",
            ShotType::BackhandUnderspin => "BH-U",
            ShotType::ForehandVolley => "FH-V",
            ShotType::BackhandVolley => "BH-V",
        }
    }

    pub fn is_forehand(self) -> bool {
        matches!(
            self,
            ShotType::ForehandTopspin | ShotType::ForehandUnderspin | ShotType::ForehandVolley
        )
    }

    pub fn is_volley(self) -> bool {
        matches!(self, ShotType::ForehandVolley | ShotType::BackhandVolley)
    }

    pub fn is_groundstroke(self) -> bool {
        !self.is_volley() && self != ShotType::Serve
    }
}

impl fmt::Display for ShotType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ShotType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ShotType::ALL
            .into_iter()
            .find(|t| t.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown shot type `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShotOutcome {
    InPlay,
    Winner,
    Error,
    NoContact,
}

impl ShotOutcome {
    pub fn has_contact(self) -> bool {
        self != ShotOutcome::NoContact
    }

    pub fn ends_point(self) -> bool {
        self != ShotOutcome::InPlay
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Handedness {
    Left,
    #[default]
    Right,
}
