//! Canonical keyframe poses per shot type used to synthesize pose traces.
//!
//! Joint order: head, neck, right shoulder, elbow, wrist, left shoulder,
//! elbow, wrist, right hip, knee, ankle, left hip, knee, ankle.

use super::{Pose, POSE_JOINTS};
use crate::shot::{Handedness, ShotType};
use crate::vec::Vec2;
use crate::Real;

type Raw = [(Real, Real); POSE_JOINTS];

const READY: Raw = [
    (0.0, 1.35),
    (0.0, 1.0),
    (0.35, 0.95),
    (0.45, 0.6),
    (0.25, 0.35),
    (-0.35, 0.95),
    (-0.45, 0.6),
    (-0.25, 0.35),
    (0.2, 0.0),
    (0.35, -0.7),
    (0.4, -1.45),
    (-0.2, 0.0),
    (-0.35, -0.7),
    (-0.4, -1.45),
];

fn with_arms(base: Raw, right: [(Real, Real); 2], left: [(Real, Real); 2]) -> Raw {
    let mut p = base;
    p[3] = right[0];
    p[4] = right[1];
    p[6] = left[0];
    p[7] = left[1];
    p
}

fn crouch(mut p: Raw, depth: Real) -> Raw {
    for j in &mut p[..9] {
        j.1 -= depth;
    }
    p[11].1 -= depth;
    p[9].0 += depth;
    p[12].0 -= depth;
    p
}

fn pose(raw: Raw) -> Pose {
    raw.map(|(x, y)| Vec2::new(x, y))
}

/// Prepare, contact and follow-through keyframes for one shot type.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseBank {
    frames: [[Pose; 3]; 7],
    reach: Pose,
}

impl Default for PoseBank {
    fn default() -> Self {
        let ground = crouch(READY, 0.1);
        let frames = ShotType::ALL.map(|shot| {
            let raw: [Raw; 3] = match shot {
                ShotType::Serve => [
                    with_arms(
                        READY,
                        [(0.55, 1.35), (0.45, 1.75)],
                        [(-0.2, 1.5), (-0.1, 2.0)],
                    ),
                    with_arms(
                        READY,
                        [(0.3, 1.55), (0.2, 2.1)],
                        [(-0.35, 0.8), (-0.2, 0.5)],
                    ),
                    with_arms(
                        crouch(READY, 0.15),
                        [(0.0, 0.6), (-0.35, 0.2)],
                        [(-0.45, 0.6), (-0.3, 0.3)],
                    ),
                ],
                ShotType::ForehandTopspin | ShotType::ForehandUnderspin => {
                    let high = if shot == ShotType::ForehandUnderspin {
                        0.25
                    } else {
                        0.0
                    };
                    [
                        with_arms(
                            ground,
                            [(0.75, 0.7 + high), (1.05, 0.55 + high)],
                            [(-0.1, 0.7), (0.2, 0.6)],
                        ),
                        with_arms(
                            ground,
                            [(0.55, 0.65), (0.75, 0.4)],
                            [(-0.5, 0.6), (-0.6, 0.4)],
                        ),
                        with_arms(
                            ground,
                            [(-0.1, 1.0 - high), (-0.45, 1.15 - high)],
                            [(-0.45, 0.55), (-0.3, 0.3)],
                        ),
                    ]
                }
                ShotType::BackhandTopspin | ShotType::BackhandUnderspin => {
                    let high = if shot == ShotType::BackhandUnderspin {
                        0.25
                    } else {
                        0.0
                    };
                    [
                        with_arms(
                            ground,
                            [(-0.25, 0.7 + high), (-0.7, 0.6 + high)],
                            [(-0.5, 0.55), (-0.75, 0.5)],
                        ),
                        with_arms(
                            ground,
                            [(-0.3, 0.6), (-0.6, 0.4)],
                            [(-0.55, 0.55), (-0.65, 0.4)],
                        ),
                        with_arms(
                            ground,
                            [(0.6, 1.0 - high), (0.9, 1.2 - high)],
                            [(0.2, 0.9), (0.5, 1.1)],
                        ),
                    ]
                }
                ShotType::ForehandVolley => [
                    with_arms(
                        ground,
                        [(0.6, 0.85), (0.75, 1.0)],
                        [(-0.3, 0.7), (0.0, 0.75)],
                    ),
                    with_arms(
                        ground,
                        [(0.5, 0.8), (0.55, 0.95)],
                        [(-0.45, 0.65), (-0.4, 0.5)],
                    ),
                    with_arms(
                        ground,
                        [(0.4, 0.7), (0.3, 0.7)],
                        [(-0.45, 0.6), (-0.3, 0.4)],
                    ),
                ],
                ShotType::BackhandVolley => [
                    with_arms(
                        ground,
                        [(-0.2, 0.85), (-0.5, 1.0)],
                        [(-0.45, 0.7), (-0.55, 0.85)],
                    ),
                    with_arms(
                        ground,
                        [(-0.25, 0.8), (-0.55, 0.9)],
                        [(-0.5, 0.65), (-0.45, 0.5)],
                    ),
                    with_arms(
                        ground,
                        [(0.1, 0.75), (-0.1, 0.7)],
                        [(-0.45, 0.6), (-0.3, 0.4)],
                    ),
                ],
            };
            raw.map(pose)
        });
        let reach = with_arms(
            crouch(READY, 0.25),
            [(0.8, 0.8), (1.2, 0.7)],
            [(-0.6, 0.7), (-0.9, 0.6)],
        );
        Self {
            frames,
            reach: pose(reach),
        }
    }
}

impl PoseBank {
    pub fn keyframes(&self, shot: ShotType) -> &[Pose; 3] {
        &self.frames[shot.index()]
    }
}

pub fn ready_pose() -> Pose {
    pose(READY)
}

fn smooth(u: Real) -> Real {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

fn blend(a: &Pose, b: &Pose, u: Real) -> Pose {
    let w = smooth(u);
    if w >= 1.0 {
        return *b;
    }
    std::array::from_fn(|j| a[j].lerp(b[j], w))
}

/// Mirror a right-handed pose into a left-handed one.
fn mirror(p: &Pose) -> Pose {
    let swap = [0, 1, 5, 6, 7, 2, 3, 4, 11, 12, 13, 8, 9, 10];
    std::array::from_fn(|j| {
        let q = p[swap[j]];
        Vec2::new(-q.x, q.y)
    })
}

/// Pose at clip time `t` for a shot cycle with contact at `t_c`, or a reach
/// toward the ball ending at `t_end` when there is no contact.
pub fn pose_at_phase(
    bank: &PoseBank,
    shot: Option<ShotType>,
    hand: Handedness,
    t: Real,
    t_c: Option<Real>,
    t_end: Real,
) -> Pose {
    let ready = ready_pose();
    let p = match (shot, t_c) {
        (Some(shot), Some(t_c)) => {
            let [prep, hit, follow] = bank.keyframes(shot);
            let lead = if shot == ShotType::Serve { 0.8 } else { 0.5 };
            if t <= t_c - lead {
                ready
            } else if t <= t_c - 0.15 {
                blend(&ready, prep, (t - (t_c - lead)) / (lead - 0.15))
            } else if t <= t_c {
                blend(prep, hit, (t - (t_c - 0.15)) / 0.15)
            } else if t <= t_c + 0.3 {
                blend(hit, follow, (t - t_c) / 0.3)
            } else {
                blend(follow, &ready, (t - t_c - 0.3) / 0.5)
            }
        }
        _ => blend(&ready, &bank.reach, (t - (t_end - 0.8)) / 0.6),
    };
    match hand {
        Handedness::Right => p,
        Handedness::Left => mirror(&p),
    }
}
