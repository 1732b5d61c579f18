//! Motion-capture feature extraction engine: timed containers, skeletal
//! kinematics, expressive motion features (balance, periodicity,
//! ergonomics, Laban effort and space, smoothness, accelerometer indices)
//! and template-based gesture detection.
//!
//! All numeric code is generic over the scalar type via [`Real`]; the
//! aliases below pin the common `f64` and `f32` instantiations.

pub mod error;
pub mod extract;
pub mod features;
pub mod geometry;
pub mod io;
pub mod kinematics;
pub mod math;
pub mod num;
pub mod recognition;
pub mod skeleton;
pub mod timed;

pub use error::{Error, Result};
pub use num::Real;

/// Default-precision (f64) instantiations.
pub type TimedSeries64 = timed::TimedSeries<f64>;
pub type PoseTrack64 = skeleton::PoseTrack<f64>;
pub type SkeletonTopology64 = skeleton::SkeletonTopology<f64>;
pub type FeatureSeries64 = features::FeatureSeries<f64>;
pub type MotionTemplate64 = recognition::MotionTemplate<f64>;
pub type Label64 = io::lab::Label<f64>;

/// Single-precision instantiations.
pub type TimedSeries32 = timed::TimedSeries<f32>;
pub type PoseTrack32 = skeleton::PoseTrack<f32>;
pub type SkeletonTopology32 = skeleton::SkeletonTopology<f32>;
pub type FeatureSeries32 = features::FeatureSeries<f32>;
pub type MotionTemplate32 = recognition::MotionTemplate<f32>;
pub type Label32 = io::lab::Label<f32>;
