//! Isotropic Gaussian kernel density estimates in one and two dimensions.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::vec::Vec2;
use crate::Error;

/// A point type a kernel can be centred on.
pub trait KernelPoint<S: Scalar>: Copy {
    const DIM: i32;
    fn dist_sq(&self, other: &Self) -> S;
    /// `self` displaced by `h` times standard normal noise.
    fn jitter<R: Rng + ?Sized>(&self, h: S, rng: &mut R) -> Self;
}

fn normal<S: Scalar, R: Rng + ?Sized>(rng: &mut R) -> S {
    let z: f64 = rng.sample(StandardNormal);
    S::lit(z)
}

impl<S: Scalar> KernelPoint<S> for S {
    const DIM: i32 = 1;

    fn dist_sq(&self, other: &Self) -> S {
        let d = *self - *other;
        d * d
    }

    fn jitter<R: Rng + ?Sized>(&self, h: S, rng: &mut R) -> Self {
        *self + h * normal::<S, R>(rng)
    }
}

impl<S: Scalar> KernelPoint<S> for Vec2<S> {
    const DIM: i32 = 2;

    fn dist_sq(&self, other: &Self) -> S {
        (*self - *other).norm_sq()
    }

    fn jitter<R: Rng + ?Sized>(&self, h: S, rng: &mut R) -> Self {
        let dx = normal::<S, R>(rng);
        let dy = normal::<S, R>(rng);
        Vec2::new(self.x + h * dx, self.y + h * dy)
    }
}

/// Gaussian kernel density over a set of support points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "P: Serialize, S: Scalar",
    deserialize = "P: Deserialize<'de>, S: Scalar"
))]
pub struct Kde<P, S = f64> {
    points: Vec<P>,
    bandwidth: S,
}

pub type Kde1<S = f64> = Kde<S, S>;
pub type Kde2<S = f64> = Kde<Vec2<S>, S>;

/// Outcome of [`Kde::sample_above`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Draw<P> {
    pub value: P,
    /// Candidates drawn, including the accepted one.
    pub attempts: u32,
    /// True when every candidate was rejected and the mode was returned.
    pub fell_back: bool,
}

impl<P: KernelPoint<S>, S: Scalar> Kde<P, S> {
    pub fn new(points: Vec<P>, bandwidth: S) -> Result<Self, Error> {
        if points.is_empty() {
            return Err(Error::InsufficientData(
                "kernel density needs at least one point".into(),
            ));
        }
        if !(bandwidth > S::zero() && bandwidth.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "bandwidth must be positive, got {bandwidth}"
            )));
        }
        Ok(Self { points, bandwidth })
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn bandwidth(&self) -> S {
        self.bandwidth
    }

    fn norm(&self) -> S {
        let h = self.bandwidth;
        (S::two() * S::PI() * h * h).powi(P::DIM).sqrt()
    }

    fn kernel_sum(&self, x: &P) -> S {
        let inv = -S::one() / (S::two() * self.bandwidth * self.bandwidth);
        self.points.iter().map(|p| (p.dist_sq(x) * inv).exp()).sum()
    }

    pub fn density(&self, x: &P) -> S {
        let n = S::from_usize(self.points.len()).unwrap();
        self.kernel_sum(x) / (n * self.norm())
    }

    /// Largest density over the support points, with the first such point.
    pub fn peak(&self) -> (P, S) {
        let mut best = (self.points[0], self.density(&self.points[0]));
        for p in &self.points[1..] {
            let d = self.density(p);
            if d > best.1 {
                best = (*p, d);
            }
        }
        best
    }

    /// Support point of highest density.
    pub fn mode(&self) -> P {
        self.peak().0
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> P {
        let i = rng.random_range(0..self.points.len());
        self.points[i].jitter(self.bandwidth, rng)
    }

    /// Draw until a candidate's density is at least `floor_fraction` of the
    /// peak, giving up after `max_attempts` and returning the mode.
    pub fn sample_above<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        floor_fraction: S,
        max_attempts: u32,
    ) -> Draw<P> {
        let (mode, peak) = self.peak();
        let floor = peak * floor_fraction;
        for attempt in 1..=max_attempts {
            let x = self.sample(rng);
            if self.density(&x) >= floor {
                return Draw {
                    value: x,
                    attempts: attempt,
                    fell_back: false,
                };
            }
        }
        Draw {
            value: mode,
            attempts: max_attempts,
            fell_back: true,
        }
    }

    /// Leave-one-out log-likelihood of the support points, or `None` with
    /// fewer than two points. Uses log-sum-exp so far-apart points do not
    /// underflow to `-inf`.
    pub fn loo_log_likelihood(points: &[P], bandwidth: S) -> Option<S> {
        let n = points.len();
        if n < 2 {
            return None;
        }
        let h2 = bandwidth * bandwidth;
        let log_norm = (S::two() * S::PI() * h2).ln() * S::from_i32(P::DIM).unwrap() * S::half()
            + S::from_usize(n - 1).unwrap().ln();
        let mut total = S::zero();
        let mut exps = Vec::with_capacity(n - 1);
        for (i, x) in points.iter().enumerate() {
            exps.clear();
            exps.extend(
                points
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, p)| -p.dist_sq(x) / (S::two() * h2)),
            );
            let m = exps.iter().copied().fold(S::neg_infinity(), S::max);
            let lse = m + exps.iter().map(|e| (*e - m).exp()).sum::<S>().ln();
            total = total + lse - log_norm;
        }
        Some(total)
    }
}

/// Bandwidth maximizing the leave-one-out log-likelihood pooled over
/// `groups`, each group being the support of one density. Groups with a
/// single point carry no information and are skipped. Ties go to the earlier
/// candidate; with nothing to score, the middle candidate is returned.
pub fn select_bandwidth<P: KernelPoint<S>, S: Scalar>(
    groups: &[&[P]],
    candidates: &[S],
) -> Result<S, Error> {
    if candidates.is_empty() || candidates.iter().any(|h| !(*h > S::zero())) {
        return Err(Error::Config(
            "bandwidth candidates must be non-empty and positive".into(),
        ));
    }
    let mut best: Option<(S, S)> = None;
    for &h in candidates {
        let mut total = S::zero();
        let mut scored = false;
        for g in groups {
            if let Some(ll) = Kde::<P, S>::loo_log_likelihood(g, h) {
                total = total + ll;
                scored = true;
            }
        }
        if scored && best.is_none_or(|(_, b)| total > b) {
            best = Some((h, total));
        }
    }
    Ok(best.map_or(candidates[candidates.len() / 2], |(h, _)| h))
}
