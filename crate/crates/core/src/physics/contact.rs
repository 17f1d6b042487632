//! Racket contact point heuristic.

use serde::{Deserialize, Serialize};

use crate::court::Side;
use crate::physics::SpinKind;
use crate::scalar::Scalar;
use crate::shot::{Handedness, ShotType};
use crate::vec::{Vec2, Vec3};

/// Lateral reach and contact heights by stroke family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", deny_unknown_fields, default)]
pub struct ContactHeuristic<S = f64> {
    pub reach: S,
    pub serve_height: S,
    pub groundstroke_height: S,
    pub volley_height: S,
}

impl<S: Scalar> Default for ContactHeuristic<S> {
    fn default() -> Self {
        Self {
            reach: S::lit(0.8),
            serve_height: S::lit(2.8),
            groundstroke_height: S::lit(1.0),
            volley_height: S::lit(1.3),
        }
    }
}

impl<S: Scalar> ContactHeuristic<S> {
    pub fn validate(&self) -> Result<(), crate::Error> {
        let all = [
            self.reach,
            self.serve_height,
            self.groundstroke_height,
            self.volley_height,
        ];
        if all.iter().any(|v| !(*v > S::zero())) {
            return Err(crate::Error::Config(
                "contact: reach and heights must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn height(&self, shot: ShotType) -> S {
        if shot == ShotType::Serve {
            self.serve_height
        } else if shot.is_volley() {
            self.volley_height
        } else {
            self.groundstroke_height
        }
    }

    /// Lateral court-space offset from the player's root to the racket.
    /// Forehands and serves are struck on the racket-hand side, backhands on
    /// the other.
    pub fn lateral_offset(&self, side: Side, shot: ShotType, hand: Handedness) -> S {
        // A right-handed player's racket side is their right, which is
        // local -x for either half.
        let racket_right = hand == Handedness::Right;
        let on_right = if shot.is_forehand() || shot == ShotType::Serve {
            racket_right
        } else {
            !racket_right
        };
        let local = if on_right { -self.reach } else { self.reach };
        side.to_local_x(local)
    }
}

/// Spin imparted by each shot type: surface speed (m/s) and direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", deny_unknown_fields, default)]
pub struct SpinTable<S = f64> {
    pub serve: (S, SpinKind),
    pub forehand_topspin: (S, SpinKind),
    pub forehand_underspin: (S, SpinKind),
    pub backhand_topspin: (S, SpinKind),
    pub backhand_underspin: (S, SpinKind),
    pub forehand_volley: (S, SpinKind),
    pub backhand_volley: (S, SpinKind),
}

impl<S: Scalar> Default for SpinTable<S> {
    fn default() -> Self {
        let top = |v: f64| (S::lit(v), SpinKind::Topspin);
        let under = |v: f64| (S::lit(v), SpinKind::Underspin);
        Self {
            serve: top(4.0),
            forehand_topspin: top(8.0),
            forehand_underspin: under(5.0),
            backhand_topspin: top(6.0),
            backhand_underspin: under(5.0),
            forehand_volley: under(2.0),
            backhand_volley: under(2.0),
        }
    }
}

impl<S: Scalar> SpinTable<S> {
    pub fn get(&self, shot: ShotType) -> (S, SpinKind) {
        match shot {
            ShotType::Serve => self.serve,
            ShotType::ForehandTopspin => self.forehand_topspin,
            ShotType::ForehandUnderspin => self.forehand_underspin,
            ShotType::BackhandTopspin => self.backhand_topspin,
            ShotType::BackhandUnderspin => self.backhand_underspin,
            ShotType::ForehandVolley => self.forehand_volley,
            ShotType::BackhandVolley => self.backhand_volley,
        }
    }

    pub fn validate(&self) -> Result<(), crate::Error> {
        for shot in ShotType::ALL {
            let (v, _) = self.get(shot);
            if !(v >= S::zero() && v.is_finite()) {
                return Err(crate::Error::Config(format!(
                    "spin for {shot} must be >= 0"
                )));
            }
        }
        Ok(())
    }
}

/// Estimated 3D ball position at contact for a player standing at `player_pos`.
pub fn estimate_contact_point<S: Scalar>(
    player_pos: Vec2<S>,
    shot: ShotType,
    hand: Handedness,
    heuristic: &ContactHeuristic<S>,
) -> Vec3<S> {
    let side = Side::of(player_pos.y);
    let dx = heuristic.lateral_offset(side, shot, hand);
    Vec3::new(player_pos.x + dx, player_pos.y, heuristic.height(shot))
}
