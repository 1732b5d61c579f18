//! Finite-difference differentiation of positional tracks.
//!
//! Interior frames use central differences; the ends replicate the nearest
//! computable value so every derivative series keeps the source frame count.
//! Differentiation requires a fixed frame rate.

use crate::error::{Error, Result};
use crate::math::Vec3;
use crate::num::Real;
use crate::timed::TimedSeries;

/// A differentiated track tagged with its derivative order
/// (1 = m/s, 2 = m/s², 3 = m/s³).
#[derive(Clone, Debug)]
pub struct DerivativeTrack<T> {
    pub series: TimedSeries<T>,
    pub order: u8,
}

impl<T: Real> DerivativeTrack<T> {
    pub fn units(&self) -> &'static str {
        match self.order {
            1 => "m/s",
            2 => "m/s^2",
            _ => "m/s^3",
        }
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    pub fn vec3(&self, frame: usize) -> Result<Vec3<T>> {
        let f = self.series.frame(frame)?;
        if f.len() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: f.len(),
            });
        }
        Ok(Vec3::new(f[0], f[1], f[2]))
    }
}

/// Position of one node within a positions series (dims = 3·nodes).
pub fn node_position<T: Real>(positions: &TimedSeries<T>, node: usize, frame: usize) -> Result<Vec3<T>> {
    let count = positions.dims() / 3;
    if !positions.dims().is_multiple_of(3) || node >= count {
        return Err(Error::NodeOutOfRange {
            index: node,
            count,
        });
    }
    let f = positions.frame(frame)?;
    Ok(Vec3::new(f[3 * node], f[3 * node + 1], f[3 * node + 2]))
}

fn gather_node<T: Real>(positions: &TimedSeries<T>, node: usize) -> Result<Vec<Vec3<T>>> {
    (0..positions.len())
        .map(|i| node_position(positions, node, i))
        .collect()
}

fn require_fixed_rate<T: Real>(series: &TimedSeries<T>, min_frames: usize) -> Result<T> {
    if series.len() < min_frames {
        return Err(Error::TooFewFrames {
            needed: min_frames,
            got: series.len(),
        });
    }
    series.frame_rate().ok_or(Error::NotFixedRate)
}

fn output_series<T: Real>(source: &TimedSeries<T>, dims: usize, frames: &[Vec<T>]) -> TimedSeries<T> {
    let rate = source.frame_rate().expect("checked fixed rate");
    let start = source.time_of_index(0).expect("non-empty");
    let mut out = TimedSeries::offline_fixed_rate(dims, rate, start).expect("valid rate");
    for f in frames {
        out.push_frame(f, None).expect("dims match");
    }
    out
}

/// First derivative: central differences inside, one-sided at the ends.
pub fn velocity<T: Real>(positions: &TimedSeries<T>, node: usize) -> Result<DerivativeTrack<T>> {
    let rate = require_fixed_rate(positions, 3)?;
    let xs = gather_node(positions, node)?;
    let n = xs.len();
    let dt = T::one() / rate;
    let dt2 = dt + dt;
    let mut frames = Vec::with_capacity(n);
    for i in 0..n {
        let v = if i == 0 {
            (xs[1] - xs[0]).scale(T::one() / dt)
        } else if i == n - 1 {
            (xs[n - 1] - xs[n - 2]).scale(T::one() / dt)
        } else {
            (xs[i + 1] - xs[i - 1]).scale(T::one() / dt2)
        };
        frames.push(vec![v.x, v.y, v.z]);
    }
    Ok(DerivativeTrack {
        series: output_series(positions, 3, &frames),
        order: 1,
    })
}

/// Second derivative: three-point stencil inside, nearest interior value
/// replicated at the ends.
pub fn acceleration<T: Real>(positions: &TimedSeries<T>, node: usize) -> Result<DerivativeTrack<T>> {
    let rate = require_fixed_rate(positions, 3)?;
    let xs = gather_node(positions, node)?;
    let n = xs.len();
    let dt = T::one() / rate;
    let dt_sq = dt * dt;
    let two = T::of(2.0);
    let mut interior = Vec::with_capacity(n);
    for i in 1..n - 1 {
        let a = (xs[i + 1] - xs[i].scale(two) + xs[i - 1]).scale(T::one() / dt_sq);
        interior.push(a);
    }
    let mut frames = Vec::with_capacity(n);
    frames.push(vec![interior[0].x, interior[0].y, interior[0].z]);
    for a in &interior {
        frames.push(vec![a.x, a.y, a.z]);
    }
    let last = interior[interior.len() - 1];
    frames.push(vec![last.x, last.y, last.z]);
    Ok(DerivativeTrack {
        series: output_series(positions, 3, &frames),
        order: 2,
    })
}

/// Third derivative per coordinate:
/// `(x[i+2] - 2 x[i+1] + 2 x[i-1] - x[i-2]) / (2 dt³)` for i in [2, n-3];
/// the first and last two frames replicate the nearest computed value.
/// Exact (up to rounding) for cubic trajectories.
pub fn jerk_vector<T: Real>(positions: &TimedSeries<T>, node: usize) -> Result<DerivativeTrack<T>> {
    let rate = require_fixed_rate(positions, 5)?;
    let xs = gather_node(positions, node)?;
    let n = xs.len();
    let dt = T::one() / rate;
    let dt_cu = dt * dt * dt;
    let denom = dt_cu + dt_cu;
    let two = T::of(2.0);
    let mut interior = Vec::with_capacity(n);
    for i in 2..n - 2 {
        let j = (xs[i + 2] - xs[i + 1].scale(two) + xs[i - 1].scale(two) - xs[i - 2])
            .scale(T::one() / denom);
        interior.push(j);
    }
    let first = interior[0];
    let last = interior[interior.len() - 1];
    let mut frames = Vec::with_capacity(n);
    frames.push(vec![first.x, first.y, first.z]);
    frames.push(vec![first.x, first.y, first.z]);
    for j in &interior {
        frames.push(vec![j.x, j.y, j.z]);
    }
    frames.push(vec![last.x, last.y, last.z]);
    frames.push(vec![last.x, last.y, last.z]);
    Ok(DerivativeTrack {
        series: output_series(positions, 3, &frames),
        order: 3,
    })
}

/// Euclidean norm of a 3D derivative track, frame by frame.
pub fn jerk_magnitude<T: Real>(jerk: &DerivativeTrack<T>) -> Result<DerivativeTrack<T>> {
    if jerk.series.dims() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: jerk.series.dims(),
        });
    }
    let mut frames = Vec::with_capacity(jerk.len());
    for i in 0..jerk.len() {
        frames.push(vec![jerk.vec3(i)?.norm()]);
    }
    Ok(DerivativeTrack {
        series: output_series(&jerk.series, 1, &frames),
        order: jerk.order,
    })
}
