//! Court coordinate frame, dimensions, net model and region partitioning.
//!
//! Origin at the center of the net. `y > 0` is the near half, `y < 0` the far
//! half. `x` is lateral, positive toward the ad side of the near player. A
//! player's deuce side is the right half from their own perspective, so for
//! the near player deuce is `x < 0` and for the far player deuce is `x > 0`.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::vec::{Vec2, Vec3};
use crate::Error;

/// Net posts stand this far outside the doubles sidelines.
const NET_POST_OUTSIDE_DOUBLES: f64 = 0.914;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", deny_unknown_fields, default)]
pub struct CourtSpec<S = f64> {
    /// Baseline to baseline.
    pub length: S,
    pub singles_width: S,
    pub doubles_width: S,
    /// Distance of each service line from the net.
    pub service_line_dist: S,
    pub net_height_center: S,
    pub net_height_post: S,
}

impl<S: Scalar> Default for CourtSpec<S> {
    fn default() -> Self {
        Self {
            length: S::lit(23.77),
            singles_width: S::lit(8.23),
            doubles_width: S::lit(10.97),
            service_line_dist: S::lit(6.40),
            net_height_center: S::lit(0.914),
            net_height_post: S::lit(1.07),
        }
    }
}

impl<S: Scalar> CourtSpec<S> {
    pub fn validate(&self) -> Result<(), Error> {
        let dims = [
            ("length", self.length),
            ("singles_width", self.singles_width),
            ("doubles_width", self.doubles_width),
            ("service_line_dist", self.service_line_dist),
            ("net_height_center", self.net_height_center),
            ("net_height_post", self.net_height_post),
        ];
        for (name, v) in dims {
            if !(v.is_finite() && v > S::zero()) {
                return Err(Error::Config(format!(
                    "court.{name} must be positive, got {v}"
                )));
            }
        }
        if self.singles_width >= self.doubles_width {
            return Err(Error::Config(
                "court.singles_width must be below doubles_width".into(),
            ));
        }
        if self.service_line_dist >= self.half_length() {
            return Err(Error::Config(
                "court.service_line_dist must be below length/2".into(),
            ));
        }
        Ok(())
    }

    /// Distance from the net to either baseline.
    pub fn half_length(&self) -> S {
        self.length * S::half()
    }

    pub fn half_singles(&self) -> S {
        self.singles_width * S::half()
    }

    /// Width of one lateral band (deuce, center or ad).
    pub fn band_width(&self) -> S {
        self.singles_width / S::lit(3.0)
    }

    /// Distance from the net of the front/back boundary: halfway between the
    /// service line and the baseline.
    pub fn depth_boundary(&self) -> S {
        (self.service_line_dist + self.half_length()) * S::half()
    }

    /// Net height at lateral position `x`, linear between center and posts.
    pub fn net_height_at(&self, x: S) -> S {
        let post_x = self.doubles_width * S::half() + S::lit(NET_POST_OUTSIDE_DOUBLES);
        let t = (x.abs() / post_x).min(S::one());
        self.net_height_center + (self.net_height_post - self.net_height_center) * t
    }

    /// Inside the singles court (lines are in).
    pub fn in_singles(&self, p: Vec2<S>) -> bool {
        p.x.abs() <= self.half_singles() && p.y.abs() <= self.half_length()
    }

    /// Inside the singles court on the given half.
    pub fn in_half(&self, p: Vec2<S>, side: Side) -> bool {
        self.in_singles(p) && Side::of(p.y) == side && p.y != S::zero()
    }

    /// Inside the service box of `side` that receives serves to `court`
    /// (deuce/ad from the receiving player's perspective).
    pub fn in_service_box(&self, p: Vec2<S>, side: Side, court: ServiceCourt) -> bool {
        if Side::of(p.y) != side || p.y == S::zero() || p.y.abs() > self.service_line_dist {
            return false;
        }
        if p.x.abs() > self.half_singles() {
            return false;
        }
        let local_x = side.to_local_x(p.x);
        match court {
            ServiceCourt::Deuce => local_x <= S::zero(),
            ServiceCourt::Ad => local_x >= S::zero(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Near,
    Far,
}

impl Side {
    pub fn of<S: Scalar>(y: S) -> Side {
        if y >= S::zero() {
            Side::Near
        } else {
            Side::Far
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Near => Side::Far,
            Side::Far => Side::Near,
        }
    }

    /// Lateral coordinate as seen by a player standing on this side, with
    /// negative values toward their deuce (right-hand) side.
    pub fn to_local_x<S: Scalar>(self, x: S) -> S {
        match self {
            Side::Near => x,
            Side::Far => -x,
        }
    }

    /// Sign of `y` on this half.
    pub fn y_sign<S: Scalar>(self) -> S {
        match self {
            Side::Near => S::one(),
            Side::Far => -S::one(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lateral {
    Deuce,
    Center,
    Ad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Depth {
    Front,
    Back,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ServiceCourt {
    Deuce,
    Ad,
}

impl ServiceCourt {
    /// Serves alternate deuce, ad, deuce, ... by point index.
    pub fn for_point(index: u64) -> Self {
        if index.is_multiple_of(2) {
            ServiceCourt::Deuce
        } else {
            ServiceCourt::Ad
        }
    }
}

/// One of the 12 court regions (6 per side).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CourtRegion {
    pub side: Side,
    pub lateral: Lateral,
    pub depth: Depth,
}

impl CourtRegion {
    pub const COUNT: usize = 12;

    /// Dense index in `0..12`.
    pub fn index(&self) -> usize {
        let side = match self.side {
            Side::Near => 0,
            Side::Far => 1,
        };
        let lat = match self.lateral {
            Lateral::Deuce => 0,
            Lateral::Center => 1,
            Lateral::Ad => 2,
        };
        let depth = match self.depth {
            Depth::Front => 0,
            Depth::Back => 1,
        };
        side * 6 + lat * 2 + depth
    }

    pub fn from_index(i: usize) -> Option<Self> {
        if i >= Self::COUNT {
            return None;
        }
        let side = if i / 6 == 0 { Side::Near } else { Side::Far };
        let lateral = match (i % 6) / 2 {
            0 => Lateral::Deuce,
            1 => Lateral::Center,
            _ => Lateral::Ad,
        };
        let depth = if i.is_multiple_of(2) {
            Depth::Front
        } else {
            Depth::Back
        };
        Some(Self {
            side,
            lateral,
            depth,
        })
    }

    pub fn all() -> impl Iterator<Item = CourtRegion> {
        (0..Self::COUNT).filter_map(Self::from_index)
    }
}

/// Region containing `p`. Lateral bands are measured from the perspective of
/// the player on `p`'s half; positions outside the sidelines clamp to the
/// nearest band.
pub fn region_of<S: Scalar>(p: Vec2<S>, spec: &CourtSpec<S>) -> CourtRegion {
    let side = Side::of(p.y);
    let local_x = side.to_local_x(p.x);
    let band = spec.band_width();
    let lateral = if local_x < -band * S::half() {
        Lateral::Deuce
    } else if local_x > band * S::half() {
        Lateral::Ad
    } else {
        Lateral::Center
    };
    let depth = if p.y.abs() < spec.depth_boundary() {
        Depth::Front
    } else {
        Depth::Back
    };
    CourtRegion {
        side,
        lateral,
        depth,
    }
}

/// Uniform speed bins over `[0, v_max)` with an open-ended top bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", deny_unknown_fields, default)]
pub struct BinConfig<S = f64> {
    pub v_max: S,
    pub n_bins: u8,
}

impl<S: Scalar> Default for BinConfig<S> {
    fn default() -> Self {
        Self {
            v_max: S::lit(8.0),
            n_bins: 5,
        }
    }
}

impl<S: Scalar> BinConfig<S> {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.v_max > S::zero()) || self.n_bins == 0 {
            return Err(Error::Config(
                "bins: v_max must be positive and n_bins >= 1".into(),
            ));
        }
        Ok(())
    }
}

pub fn velocity_bin<S: Scalar>(speed: S, cfg: &BinConfig<S>) -> u8 {
    let top = cfg.n_bins - 1;
    if !(speed > S::zero()) {
        return 0;
    }
    let width = cfg.v_max / S::from_u8(cfg.n_bins).unwrap();
    let b = (speed / width).floor();
    match b.to_u8() {
        Some(b) if b < top => b,
        _ => top,
    }
}

/// Rigid transform between a player's own frame and the canonical near-side
/// frame. Far-side positions are rotated half a turn about the net center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub flipped: bool,
}

impl Frame {
    pub const IDENTITY: Frame = Frame { flipped: false };

    /// Frame that maps a player on `side` onto the near side.
    pub fn for_side(side: Side) -> Self {
        Frame {
            flipped: side == Side::Far,
        }
    }

    pub fn p2<S: Scalar>(&self, p: Vec2<S>) -> Vec2<S> {
        if self.flipped {
            p.half_turn()
        } else {
            p
        }
    }

    pub fn p3<S: Scalar>(&self, p: Vec3<S>) -> Vec3<S> {
        if self.flipped {
            p.half_turn()
        } else {
            p
        }
    }
}

/// Direction class of a groundstroke.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShotDirection {
    CrossCourt,
    DownTheLine,
    Middle,
    /// Hit from the center band, where cross court is not defined.
    FromCenter,
}

/// Classify a shot from the hitter's region and the placement. A shot from
/// the deuce band to the opponent's deuce band (diagonal) is cross court.
pub fn shot_direction<S: Scalar>(
    hitter: CourtRegion,
    placement: Vec2<S>,
    spec: &CourtSpec<S>,
) -> ShotDirection {
    if hitter.lateral == Lateral::Center {
        return ShotDirection::FromCenter;
    }
    let target = region_of(placement, spec);
    match (hitter.lateral, target.lateral) {
        (_, Lateral::Center) => ShotDirection::Middle,
        (a, b) if a == b => ShotDirection::CrossCourt,
        _ => ShotDirection::DownTheLine,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> CourtSpec<f64> {
        CourtSpec::default()
    }

    #[test]
    fn center_back_near() {
        let r = region_of(Vec2::new(0.0, 11.0), &spec());
        assert_eq!(
            r,
            CourtRegion {
                side: Side::Near,
                lateral: Lateral::Center,
                depth: Depth::Back
            }
        );
    }

    #[test]
    fn near_left_front_is_deuce() {
        let r = region_of(Vec2::new(-4.0, 2.0), &spec());
        assert_eq!(r.side, Side::Near);
        assert_eq!(r.lateral, Lateral::Deuce);
        assert_eq!(r.depth, Depth::Front);
    }

    #[test]
    fn depth_boundary_value() {
        assert!((spec().depth_boundary() - 9.1425).abs() < 1e-9);
        let s = spec();
        assert_eq!(region_of(Vec2::new(0.0, 9.14), &s).depth, Depth::Front);
        assert_eq!(region_of(Vec2::new(0.0, 9.15), &s).depth, Depth::Back);
    }

    #[test]
    fn far_side_lateral_is_mirrored() {
        let s = spec();
        // Far player's right hand is +x.
        assert_eq!(region_of(Vec2::new(3.0, -11.0), &s).lateral, Lateral::Deuce);
        assert_eq!(region_of(Vec2::new(-3.0, -11.0), &s).lateral, Lateral::Ad);
    }

    #[test]
    fn wide_positions_clamp() {
        let s = spec();
        assert_eq!(region_of(Vec2::new(-20.0, 5.0), &s).lateral, Lateral::Deuce);
        assert_eq!(region_of(Vec2::new(20.0, 5.0), &s).lateral, Lateral::Ad);
    }

    #[test]
    fn lateral_bands_equal_width() {
        let s = spec();
        let step = 1e-3;
        let mut widths = [0.0f64; 3];
        let mut x = -s.half_singles() + step / 2.0;
        while x < s.half_singles() {
            let i = match region_of(Vec2::new(x, 5.0), &s).lateral {
                Lateral::Deuce => 0,
                Lateral::Center => 1,
                Lateral::Ad => 2,
            };
            widths[i] += step;
            x += step;
        }
        for w in widths {
            assert!((w - s.band_width()).abs() < 2.0 * step, "{widths:?}");
        }
        // Depth cells are unequal: front spans [0, 9.1425), back the rest.
        let front = s.depth_boundary();
        let back = s.half_length() - front;
        assert!(front > back);
    }

    #[test]
    fn region_index_roundtrip() {
        for i in 0..12 {
            assert_eq!(CourtRegion::from_index(i).unwrap().index(), i);
        }
        assert!(CourtRegion::from_index(12).is_none());
    }

    #[test]
    fn velocity_bins() {
        let c = BinConfig::<f64>::default();
        assert_eq!(velocity_bin(0.0, &c), 0);
        assert_eq!(velocity_bin(3.3, &c), 2);
        assert_eq!(velocity_bin(8.0, &c), 4);
        assert_eq!(velocity_bin(100.0, &c), 4);
        assert_eq!(velocity_bin(f64::INFINITY, &c), 4);
        assert_eq!(velocity_bin(1.599, &c), 0);
        assert_eq!(velocity_bin(1.6, &c), 1);
    }

    #[test]
    fn net_height_profile() {
        let s = spec();
        assert!((s.net_height_at(0.0) - 0.914).abs() < 1e-12);
        assert!((s.net_height_at(100.0) - 1.07).abs() < 1e-12);
        assert!(s.net_height_at(3.0) > 0.914 && s.net_height_at(3.0) < 1.07);
    }

    #[test]
    fn service_boxes() {
        let s = spec();
        // Far receiver's deuce box is x > 0.
        assert!(s.in_service_box(Vec2::new(2.0, -5.0), Side::Far, ServiceCourt::Deuce));
        assert!(!s.in_service_box(Vec2::new(-2.0, -5.0), Side::Far, ServiceCourt::Deuce));
        assert!(s.in_service_box(Vec2::new(-2.0, 5.0), Side::Near, ServiceCourt::Deuce));
        assert!(!s.in_service_box(Vec2::new(2.0, -7.0), Side::Far, ServiceCourt::Deuce));
    }

    #[test]
    fn cross_court_classification() {
        let s = spec();
        let hitter = region_of(Vec2::new(-3.0, 11.0), &s);
        assert_eq!(
            shot_direction(hitter, Vec2::new(3.0, -10.0), &s),
            ShotDirection::CrossCourt
        );
        assert_eq!(
            shot_direction(hitter, Vec2::new(-3.0, -10.0), &s),
            ShotDirection::DownTheLine
        );
        assert_eq!(
            shot_direction(hitter, Vec2::new(0.1, -10.0), &s),
            ShotDirection::Middle
        );
        let center = region_of(Vec2::new(0.2, 11.0), &s);
        assert_eq!(
            shot_direction(center, Vec2::new(3.0, -10.0), &s),
            ShotDirection::FromCenter
        );
    }

    #[test]
    fn frame_maps_far_to_near() {
        let f = Frame::for_side(Side::Far);
        let p = Vec2::new(3.0, -10.0);
        let q = f.p2(p);
        assert_eq!(q, Vec2::new(-3.0, 10.0));
        let s = spec();
        // Deuce/ad labels survive the half turn.
        assert_eq!(region_of(p, &s).lateral, region_of(q, &s).lateral);
    }

    #[test]
    fn invalid_spec_rejected() {
        let mut s = spec();
        s.singles_width = 12.0;
        assert!(s.validate().is_err());
        let mut s = spec();
        s.service_line_dist = 13.0;
        assert!(s.validate().is_err());
        let mut s = spec();
        s.length = -1.0;
        assert!(s.validate().is_err());
        assert!(spec().validate().is_ok());
    }
}
