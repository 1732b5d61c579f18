//! Laban effort and space features: kinetic energy, weight/time/space/flow
//! effort over trailing windows, covered distance and covered area.
//!
//! Windows trail the current frame (streaming causality); warm-up frames use
//! the partial window available so far. Undefined space-effort samples
//! (net displacement below epsilon) are NaN.

use crate::error::{Error, Result};
use crate::features::JointWeights;
use crate::geometry::{convex_hull, point_in_convex_polygon, polygon_area, project_point, GroundPoint};
use crate::kinematics::{node_position, DerivativeTrack};
use crate::math::Axis;
use crate::num::Real;
use crate::timed::TimedSeries;

/// Analysis window measured in seconds; converted to at least one frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffortWindow {
    pub seconds: f64,
}

impl EffortWindow {
    pub fn new(seconds: f64) -> Result<Self> {
        if seconds.is_nan() || seconds <= 0.0 {
            return Err(Error::Config(format!("window must be positive, got {seconds}")));
        }
        Ok(EffortWindow { seconds })
    }

    pub fn frames<T: Real>(&self, frame_rate: T) -> usize {
        ((self.seconds * frame_rate.as_f64()).round() as usize).max(1)
    }
}

/// Per-joint series plus the weighted whole-body aggregate.
#[derive(Clone, Debug)]
pub struct BodyFeature<T> {
    pub per_joint: Vec<TimedSeries<T>>,
    pub whole_body: TimedSeries<T>,
}

fn scalar_like<T: Real>(template: &TimedSeries<T>) -> TimedSeries<T> {
    let rate = template.frame_rate().expect("fixed rate checked upstream");
    let start = if template.is_empty() {
        T::zero()
    } else {
        template.time_of_index(0).expect("non-empty")
    };
    TimedSeries::offline_fixed_rate(1, rate, start).expect("valid rate")
}

fn check_tracks<T: Real>(tracks: &[DerivativeTrack<T>], weights: &JointWeights<T>) -> Result<usize> {
    weights.require_len(tracks.len())?;
    let first = tracks.first().ok_or(Error::WeightCount {
        expected: 1,
        got: 0,
    })?;
    for t in tracks {
        if t.len() != first.len() {
            return Err(Error::FrameCountMismatch {
                a: first.len(),
                b: t.len(),
            });
        }
    }
    Ok(first.len())
}

/// Kinetic energy per joint (squared velocity magnitude) and the weighted
/// whole-body sum.
pub fn kinetic_energy<T: Real>(
    velocities: &[DerivativeTrack<T>],
    weights: &JointWeights<T>,
) -> Result<BodyFeature<T>> {
    let frames = check_tracks(velocities, weights)?;
    let mut per_joint: Vec<TimedSeries<T>> = velocities
        .iter()
        .map(|v| scalar_like(&v.series))
        .collect();
    let mut whole = scalar_like(&velocities[0].series);
    for i in 0..frames {
        let mut total = T::zero();
        for (k, v) in velocities.iter().enumerate() {
            let e = v.vec3(i)?.norm_sq();
            per_joint[k].push_frame(&[e], None)?;
            total += weights.get(k) * e;
        }
        whole.push_frame(&[total], None)?;
    }
    Ok(BodyFeature {
        per_joint,
        whole_body: whole,
    })
}

fn window_start(frame: usize, window_frames: usize) -> usize {
    (frame + 1).saturating_sub(window_frames)
}

/// Sliding maximum of an energy series over the trailing window.
pub fn weight_effort<T: Real>(
    energy: &TimedSeries<T>,
    window_frames: usize,
) -> Result<TimedSeries<T>> {
    if window_frames == 0 {
        return Err(Error::BadEffortWindow { needed: 1 });
    }
    if energy.dims() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: energy.dims(),
        });
    }
    energy.frame_rate().ok_or(Error::NotFixedRate)?;
    let mut out = scalar_like(energy);
    for i in 0..energy.len() {
        let mut max = T::neg_infinity();
        for j in window_start(i, window_frames)..=i {
            max = max.max(energy.value(0, j)?);
        }
        out.push_frame(&[max], None)?;
    }
    Ok(out)
}

/// Windowed mean of acceleration magnitude per joint, aggregated with the
/// joint weights.
pub fn time_effort<T: Real>(
    accelerations: &[DerivativeTrack<T>],
    weights: &JointWeights<T>,
    window_frames: usize,
) -> Result<BodyFeature<T>> {
    if window_frames == 0 {
        return Err(Error::BadEffortWindow { needed: 1 });
    }
    let frames = check_tracks(accelerations, weights)?;
    let magnitudes: Vec<Vec<T>> = accelerations
        .iter()
        .map(|a| (0..frames).map(|i| a.vec3(i).map(|v| v.norm())).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let mut per_joint: Vec<TimedSeries<T>> = accelerations
        .iter()
        .map(|a| scalar_like(&a.series))
        .collect();
    let mut whole = scalar_like(&accelerations[0].series);
    for i in 0..frames {
        let s = window_start(i, window_frames);
        let count = T::of_usize(i - s + 1);
        let mut total = T::zero();
        for (k, mags) in magnitudes.iter().enumerate() {
            let mut sum = T::zero();
            for m in &mags[s..=i] {
                sum += *m;
            }
            let mean = sum / count;
            per_joint[k].push_frame(&[mean], None)?;
            total += weights.get(k) * mean;
        }
        whole.push_frame(&[total], None)?;
    }
    Ok(BodyFeature {
        per_joint,
        whole_body: whole,
    })
}

/// Path length over the window divided by net displacement, per joint
/// (directness; 1 for straight motion). NaN when the net displacement falls
/// below `displacement_epsilon`; the aggregate is NaN whenever any
/// contributing joint is.
pub fn space_effort<T: Real>(
    positions: &TimedSeries<T>,
    joints: &[usize],
    weights: &JointWeights<T>,
    window_frames: usize,
    displacement_epsilon: T,
) -> Result<BodyFeature<T>> {
    if window_frames < 2 {
        return Err(Error::BadEffortWindow { needed: 2 });
    }
    weights.require_len(joints.len())?;
    positions.frame_rate().ok_or(Error::NotFixedRate)?;
    let frames = positions.len();
    let mut per_joint: Vec<TimedSeries<T>> =
        joints.iter().map(|_| scalar_like(positions)).collect();
    let mut whole = scalar_like(positions);
    for i in 0..frames {
        let s = window_start(i, window_frames);
        let mut total = T::zero();
        for (k, &node) in joints.iter().enumerate() {
            let value = if i == s {
                T::nan()
            } else {
                let mut path = T::zero();
                for j in s + 1..=i {
                    path += (node_position(positions, node, j)?
                        - node_position(positions, node, j - 1)?)
                    .norm();
                }
                let net = (node_position(positions, node, i)?
                    - node_position(positions, node, s)?)
                .norm();
                if net < displacement_epsilon {
                    T::nan()
                } else {
                    path / net
                }
            };
            per_joint[k].push_frame(&[value], None)?;
            total += weights.get(k) * value;
        }
        whole.push_frame(&[total], None)?;
    }
    Ok(BodyFeature {
        per_joint,
        whole_body: whole,
    })
}

/// Windowed mean of jerk magnitude per joint, aggregated with the joint
/// weights (movement-flow continuity).
pub fn flow_effort<T: Real>(
    jerk_magnitudes: &[DerivativeTrack<T>],
    weights: &JointWeights<T>,
    window_frames: usize,
) -> Result<BodyFeature<T>> {
    if window_frames == 0 {
        return Err(Error::BadEffortWindow { needed: 1 });
    }
    let frames = check_tracks(jerk_magnitudes, weights)?;
    for t in jerk_magnitudes {
        if t.series.dims() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: t.series.dims(),
            });
        }
    }
    let mut per_joint: Vec<TimedSeries<T>> = jerk_magnitudes
        .iter()
        .map(|j| scalar_like(&j.series))
        .collect();
    let mut whole = scalar_like(&jerk_magnitudes[0].series);
    for i in 0..frames {
        let s = window_start(i, window_frames);
        let count = T::of_usize(i - s + 1);
        let mut total = T::zero();
        for (k, track) in jerk_magnitudes.iter().enumerate() {
            let mut sum = T::zero();
            for j in s..=i {
                sum += track.series.value(0, j)?;
            }
            let mean = sum / count;
            per_joint[k].push_frame(&[mean], None)?;
            total += weights.get(k) * mean;
        }
        whole.push_frame(&[total], None)?;
    }
    Ok(BodyFeature {
        per_joint,
        whole_body: whole,
    })
}

/// Cumulative ground-plane path length of one node; 0 at the first frame.
pub fn covered_distance<T: Real>(
    positions: &TimedSeries<T>,
    node: usize,
    up: Axis,
) -> Result<TimedSeries<T>> {
    if positions.is_empty() {
        return Err(Error::EmptySeries);
    }
    let mut out = scalar_like(positions);
    let mut total = T::zero();
    let mut prev: Option<GroundPoint<T>> = None;
    for i in 0..positions.len() {
        let p = project_point(node_position(positions, node, i)?, up);
        if let Some(q) = prev {
            total += p.distance(q);
        }
        prev = Some(p);
        out.push_frame(&[total], None)?;
    }
    Ok(out)
}

/// Incrementally maintained convex hull of a growing point trace.
#[derive(Clone, Debug, Default)]
pub struct TraceHull<T> {
    hull: Vec<GroundPoint<T>>,
}

impl<T: Real> TraceHull<T> {
    pub fn new() -> Self {
        TraceHull { hull: Vec::new() }
    }

    /// Add a point; returns the current hull area. Interior points can never
    /// become hull vertices, so the hull of (old hull + new point) equals
    /// the hull of all points seen.
    pub fn push(&mut self, p: GroundPoint<T>) -> T {
        if !point_in_convex_polygon(p, &self.hull) {
            let mut pts = self.hull.clone();
            pts.push(p);
            self.hull = convex_hull(&pts);
        }
        polygon_area(&self.hull)
    }

    pub fn hull(&self) -> &[GroundPoint<T>] {
        &self.hull
    }
}

/// Ground area covered by one node's trace: convex-hull area of all
/// projections up to each frame.
pub fn covered_area<T: Real>(
    positions: &TimedSeries<T>,
    node: usize,
    up: Axis,
) -> Result<TimedSeries<T>> {
    if positions.is_empty() {
        return Err(Error::EmptySeries);
    }
    let mut out = scalar_like(positions);
    let mut trace = TraceHull::new();
    for i in 0..positions.len() {
        let area = trace.push(project_point(node_position(positions, node, i)?, up));
        out.push_frame(&[area], None)?;
    }
    Ok(out)
}
