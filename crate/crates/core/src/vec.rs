//! Small fixed-size vectors in court space.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// A point or displacement on the ground plane (meters).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[S; 2]", into = "[S; 2]")]
#[serde(bound = "S: Scalar")]
pub struct Vec2<S = f64> {
    pub x: S,
    pub y: S,
}

/// A point or displacement in 3D court space; `z` is height above the court.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[S; 3]", into = "[S; 3]")]
#[serde(bound = "S: Scalar")]
pub struct Vec3<S = f64> {
    pub x: S,
    pub y: S,
    pub z: S,
}

impl<S: Scalar> From<[S; 2]> for Vec2<S> {
    fn from(a: [S; 2]) -> Self {
        Self { x: a[0], y: a[1] }
    }
}

impl<S: Scalar> From<Vec2<S>> for [S; 2] {
    fn from(v: Vec2<S>) -> Self {
        [v.x, v.y]
    }
}

impl<S: Scalar> From<[S; 3]> for Vec3<S> {
    fn from(a: [S; 3]) -> Self {
        Self {
            x: a[0],
            y: a[1],
            z: a[2],
        }
    }
}

impl<S: Scalar> From<Vec3<S>> for [S; 3] {
    fn from(v: Vec3<S>) -> Self {
        [v.x, v.y, v.z]
    }
}

impl<S: Scalar> Vec2<S> {
    pub fn new(x: S, y: S) -> Self {
        Self { x, y }
    }

    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero())
    }

    pub fn dot(self, o: Self) -> S {
        self.x * o.x + self.y * o.y
    }

    pub fn norm_sq(self) -> S {
        self.dot(self)
    }

    pub fn norm(self) -> S {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Self) -> S {
        (self - o).norm()
    }

    pub fn scale(self, s: S) -> Self {
        Self::new(self.x * s, self.y * s)
    }

    pub fn lerp(self, o: Self, t: S) -> Self {
        self + (o - self).scale(t)
    }

    pub fn with_z(self, z: S) -> Vec3<S> {
        Vec3::new(self.x, self.y, z)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Point reflection through the court center (swaps the two halves).
    pub fn half_turn(self) -> Self {
        Self::new(-self.x, -self.y)
    }

    /// Clamp to length at most `max_len`.
    pub fn clamp_norm(self, max_len: S) -> Self {
        let n = self.norm();
        if n > max_len && n > S::zero() {
            self.scale(max_len / n)
        } else {
            self
        }
    }
}

impl<S: Scalar> Vec3<S> {
    pub fn new(x: S, y: S, z: S) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero(), S::zero())
    }

    pub fn xy(self) -> Vec2<S> {
        Vec2::new(self.x, self.y)
    }

    pub fn norm(self) -> S {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(self, o: Self) -> S {
        (self - o).norm()
    }

    pub fn scale(self, s: S) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn lerp(self, o: Self, t: S) -> Self {
        self + (o - self).scale(t)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn half_turn(self) -> Self {
        Self::new(-self.x, -self.y, self.z)
    }
}

macro_rules! impl_ops {
    ($t:ident, $($f:ident),+) => {
        impl<S: Scalar> Add for $t<S> {
            type Output = Self;
            fn add(self, o: Self) -> Self {
                Self { $($f: self.$f + o.$f),+ }
            }
        }
        impl<S: Scalar> Sub for $t<S> {
            type Output = Self;
            fn sub(self, o: Self) -> Self {
                Self { $($f: self.$f - o.$f),+ }
            }
        }
        impl<S: Scalar> Neg for $t<S> {
            type Output = Self;
            fn neg(self) -> Self {
                Self { $($f: -self.$f),+ }
            }
        }
        impl<S: Scalar> Mul<S> for $t<S> {
            type Output = Self;
            fn mul(self, s: S) -> Self {
                Self { $($f: self.$f * s),+ }
            }
        }
        impl<S: Scalar> AddAssign for $t<S> {
            fn add_assign(&mut self, o: Self) {
                $(self.$f = self.$f + o.$f;)+
            }
        }
        impl<S: Scalar> SubAssign for $t<S> {
            fn sub_assign(&mut self, o: Self) {
                $(self.$f = self.$f - o.$f;)+
            }
        }
    };
}

impl_ops!(Vec2, x, y);
impl_ops!(Vec3, x, y, z);

/// Cosine of the angle between two vectors; `None` if either is shorter than `eps`.
pub fn cosine<S: Scalar>(a: Vec2<S>, b: Vec2<S>, eps: S) -> Option<S> {
    let (na, nb) = (a.norm(), b.norm());
    if na < eps || nb < eps {
        return None;
    }
    let c = a.dot(b) / (na * nb);
    Some(c.max(-S::one()).min(S::one()))
}
