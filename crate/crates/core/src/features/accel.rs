//! Accelerometer-style indices over a small set of tracked joints:
//! Weighted Energy Index (WEI), Fluidity Index (FI) and Impulsivity
//! Index (II).
//!
//! The rig is sensor-agnostic: it consumes per-joint velocity tracks,
//! whether differentiated from positions or integrated from hardware.

use crate::error::{Error, Result};
use crate::kinematics::DerivativeTrack;
use crate::num::Real;
use crate::timed::TimedSeries;

#[derive(Clone, Copy, Debug)]
pub struct AccelParams<T> {
    /// Point mass per joint.
    pub mass: T,
    /// WEI limiting threshold in [0, 1].
    pub wei_threshold: T,
    /// Frames between the WEI samples compared by the impulsivity ratio.
    pub impulse_lag: usize,
    /// Floor for the squared-jerk denominator of FI.
    pub fi_epsilon: T,
    /// Past-WEI below this makes II undefined.
    pub wei_epsilon: T,
}

impl<T: Real> AccelParams<T> {
    /// Defaults with the impulse lag spanning 0.5 s at the given rate.
    pub fn for_rate(frame_rate: T) -> Self {
        AccelParams {
            mass: T::one(),
            wei_threshold: T::of(0.5),
            impulse_lag: ((frame_rate.as_f64() * 0.5).round() as usize).max(1),
            fi_epsilon: T::of(1e-9),
            wei_epsilon: T::of(1e-9),
        }
    }
}

/// Velocity tracks for N joints plus index parameters. Jerk (the second
/// derivative of velocity) is precomputed when at least 5 frames are
/// available.
#[derive(Clone, Debug)]
pub struct AccelRig<T> {
    velocities: Vec<DerivativeTrack<T>>,
    jerks: Option<Vec<TimedSeries<T>>>,
    params: AccelParams<T>,
    frames: usize,
}

impl<T: Real> AccelRig<T> {
    pub fn new(velocities: Vec<DerivativeTrack<T>>, params: AccelParams<T>) -> Result<Self> {
        if velocities.len() < 2 {
            return Err(Error::Config(format!(
                "rig needs at least 2 joints, got {}",
                velocities.len()
            )));
        }
        if params.wei_threshold < T::zero() || params.wei_threshold > T::one() {
            return Err(Error::Config(format!(
                "wei threshold {} outside [0, 1]",
                params.wei_threshold
            )));
        }
        if params.impulse_lag == 0 {
            return Err(Error::Config("impulse lag must be at least 1".into()));
        }
        let frames = velocities[0].len();
        for v in &velocities {
            if v.series.dims() != 3 {
                return Err(Error::DimensionMismatch {
                    expected: 3,
                    got: v.series.dims(),
                });
            }
            if v.len() != frames {
                return Err(Error::FrameCountMismatch {
                    a: frames,
                    b: v.len(),
                });
            }
        }
        let jerks = if frames >= 5 {
            Some(
                velocities
                    .iter()
                    .map(|v| second_difference(&v.series))
                    .collect::<Result<_>>()?,
            )
        } else {
            None
        };
        Ok(AccelRig {
            velocities,
            jerks,
            params,
            frames,
        })
    }

    pub fn joint_count(&self) -> usize {
        self.velocities.len()
    }

    pub fn frame_count(&self) -> usize {
        self.frames
    }

    pub fn params(&self) -> &AccelParams<T> {
        &self.params
    }

    fn check_frame(&self, frame: usize) -> Result<()> {
        if frame >= self.frames {
            return Err(Error::IndexOutOfRange {
                index: frame,
                len: self.frames,
            });
        }
        Ok(())
    }

    /// Kinetic energy of one joint: half the mass times squared speed.
    pub fn joint_energy(&self, joint: usize, frame: usize) -> Result<T> {
        self.check_frame(frame)?;
        let v = self
            .velocities
            .get(joint)
            .ok_or(Error::NodeOutOfRange {
                index: joint,
                count: self.velocities.len(),
            })?
            .vec3(frame)?;
        Ok(T::of(0.5) * self.params.mass * v.norm_sq())
    }

    /// Weighted Energy Index: the maximal joint energy plus the threshold-
    /// limited contributions of the remaining joints. All joints at rest
    /// give 0.
    pub fn wei(&self, frame: usize) -> Result<T> {
        self.check_frame(frame)?;
        let n = self.joint_count();
        let energies: Vec<T> = (0..n)
            .map(|j| self.joint_energy(j, frame))
            .collect::<Result<_>>()?;
        let mut max = energies[0];
        let mut argmax = 0usize;
        for (j, e) in energies.iter().enumerate().skip(1) {
            if *e > max {
                max = *e;
                argmax = j;
            }
        }
        if max == T::zero() {
            return Ok(T::zero());
        }
        let share = (T::one() - self.params.wei_threshold) / T::of_usize(n - 1);
        let mut contributions = T::zero();
        for (j, e) in energies.iter().enumerate() {
            if j != argmax {
                contributions += (*e / max) * share;
            }
        }
        Ok(max + contributions)
    }

    /// Squared jerk magnitude, floored at `fi_epsilon`.
    fn jerk_sq(&self, joint: usize, frame: usize) -> Result<T> {
        let jerks = self.jerks.as_ref().ok_or(Error::TooFewFrames {
            needed: 5,
            got: self.frames,
        })?;
        let f = jerks[joint].frame(frame)?;
        let sq = f[0] * f[0] + f[1] * f[1] + f[2] * f[2];
        Ok(sq.max(self.params.fi_epsilon))
    }

    /// Fluidity Index: reciprocal of the squared jerk-component sum.
    pub fn fluidity(&self, joint: usize, frame: usize) -> Result<T> {
        self.check_frame(frame)?;
        if joint >= self.joint_count() {
            return Err(Error::NodeOutOfRange {
                index: joint,
                count: self.joint_count(),
            });
        }
        Ok(T::one() / self.jerk_sq(joint, frame)?)
    }

    /// Impulsivity Index: `(1/FI) * WEI(f) / WEI(f - lag)`; `None` when the
    /// past WEI is below epsilon.
    pub fn impulsivity(&self, joint: usize, frame: usize) -> Result<Option<T>> {
        self.check_frame(frame)?;
        let lag = self.params.impulse_lag;
        if frame < lag {
            return Err(Error::FrameBeforeLag { frame, lag });
        }
        let past = self.wei(frame - lag)?;
        if past < self.params.wei_epsilon {
            return Ok(None);
        }
        let jerk_sq = self.jerk_sq(joint, frame)?;
        Ok(Some(jerk_sq * self.wei(frame)? / past))
    }

    /// Mean FI over all joints (aggregate extension).
    pub fn fluidity_mean(&self, frame: usize) -> Result<T> {
        let n = self.joint_count();
        let mut sum = T::zero();
        for j in 0..n {
            sum += self.fluidity(j, frame)?;
        }
        Ok(sum / T::of_usize(n))
    }

    /// Mean II over all joints; `None` when undefined.
    pub fn impulsivity_mean(&self, frame: usize) -> Result<Option<T>> {
        let n = self.joint_count();
        let mut sum = T::zero();
        for j in 0..n {
            match self.impulsivity(j, frame)? {
                Some(v) => sum += v,
                None => return Ok(None),
            }
        }
        Ok(Some(sum / T::of_usize(n)))
    }
}

/// Three-point second difference of a 3D series (da/dt of a velocity track).
fn second_difference<T: Real>(series: &TimedSeries<T>) -> Result<TimedSeries<T>> {
    let rate = series.frame_rate().ok_or(Error::NotFixedRate)?;
    let n = series.len();
    let dt = T::one() / rate;
    let dt_sq = dt * dt;
    let two = T::of(2.0);
    let start = series.time_of_index(0)?;
    let mut out = TimedSeries::offline_fixed_rate(3, rate, start)?;
    let get = |i: usize| -> Result<[T; 3]> {
        let f = series.frame(i)?;
        Ok([f[0], f[1], f[2]])
    };
    let mut frames: Vec<[T; 3]> = Vec::with_capacity(n);
    for i in 1..n - 1 {
        let (prev, cur, next) = (get(i - 1)?, get(i)?, get(i + 1)?);
        frames.push([
            (next[0] - two * cur[0] + prev[0]) / dt_sq,
            (next[1] - two * cur[1] + prev[1]) / dt_sq,
            (next[2] - two * cur[2] + prev[2]) / dt_sq,
        ]);
    }
    out.push_frame(&frames[0], None)?;
    for f in &frames {
        out.push_frame(f, None)?;
    }
    out.push_frame(&frames[frames.len() - 1], None)?;
    Ok(out)
}
