//! Feature extractors. Every extractor consumes timed containers and
//! produces [`FeatureSeries`] values ready for CSV or OSC export.
//!
//! Undefined samples (singular denominators, airborne balance) are encoded
//! as NaN inside the series; exporters render or skip them explicitly.

pub mod accel;
pub mod balance;
pub mod effort;
pub mod ergonomics;
pub mod periodicity;

use crate::error::{Error, Result};
use crate::num::Real;
use crate::timed::TimedSeries;

/// A named scalar-or-vector time series produced by an extractor.
#[derive(Clone, Debug)]
pub struct FeatureSeries<T> {
    pub name: String,
    pub series: TimedSeries<T>,
}

impl<T: Real> FeatureSeries<T> {
    pub fn new(name: impl Into<String>, series: TimedSeries<T>) -> Self {
        FeatureSeries {
            name: name.into(),
            series,
        }
    }
}

/// Per-joint aggregation weights, summing to 1 within 1e-6.
#[derive(Clone, Debug)]
pub struct JointWeights<T>(Vec<T>);

impl<T: Real> JointWeights<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::WeightCount {
                expected: 1,
                got: 0,
            });
        }
        let sum = weights.iter().fold(T::zero(), |acc, w| acc + *w);
        if (sum - T::one()).abs() > T::of(1e-6) {
            return Err(Error::BadWeights { sum: sum.as_f64() });
        }
        Ok(JointWeights(weights))
    }

    pub fn uniform(count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::WeightCount {
                expected: 1,
                got: 0,
            });
        }
        let w = T::one() / T::of_usize(count);
        JointWeights::new(vec![w; count])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, joint: usize) -> T {
        self.0[joint]
    }

    pub fn iter(&self) -> impl Iterator<Item = T> + '_ {
        self.0.iter().copied()
    }

    pub fn require_len(&self, expected: usize) -> Result<()> {
        if self.0.len() != expected {
            return Err(Error::WeightCount {
                expected,
                got: self.0.len(),
            });
        }
        Ok(())
    }
}
