//! Timed containers: a dims×frames value matrix plus a time model, usable
//! offline (growable, whole recording) or as a ring (streaming, fixed
//! capacity). All time queries answer identically in both modes, so feature
//! code never needs to know where its frames came from.
//!
//! Concurrency contract: offline series are immutable once filled and freely
//! shareable. A ring series has exactly one writer (`&mut` enforces this);
//! readers work on `&self` and always observe whole frames. Whole series may
//! move across threads.

use crate::error::{Error, Result};
use crate::num::Real;

/// How indices map to seconds.
#[derive(Clone, Debug, PartialEq)]
pub enum TimeModel<T> {
    /// `time(i) = start + i / frame_rate`
    FixedRate { frame_rate: T, start: T },
    /// Explicit strictly increasing per-frame stamps.
    Stamped { timestamps: Vec<T> },
}

#[derive(Clone, Debug, PartialEq)]
enum TimeBase<T> {
    FixedRate {
        frame_rate: T,
        start: T,
        /// Frames evicted from the front (ring mode); logical index 0 maps
        /// to absolute frame `dropped`.
        dropped: u64,
    },
    /// Stamps stored in the same layout as the value columns.
    Stamped { timestamps: Vec<T> },
}

#[derive(Clone, Debug, PartialEq)]
enum Mode {
    Offline,
    Ring {
        capacity: usize,
        /// Next slot to write.
        cursor: usize,
        filled: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimedSeries<T> {
    dims: usize,
    values: Vec<T>,
    time: TimeBase<T>,
    mode: Mode,
}

impl<T: Real> TimedSeries<T> {
    pub fn offline_fixed_rate(dims: usize, frame_rate: T, start: T) -> Result<Self> {
        check_rate(frame_rate)?;
        Ok(TimedSeries {
            dims,
            values: Vec::new(),
            time: TimeBase::FixedRate {
                frame_rate,
                start,
                dropped: 0,
            },
            mode: Mode::Offline,
        })
    }

    pub fn offline_stamped(dims: usize) -> Self {
        TimedSeries {
            dims,
            values: Vec::new(),
            time: TimeBase::Stamped {
                timestamps: Vec::new(),
            },
            mode: Mode::Offline,
        }
    }

    pub fn ring_fixed_rate(dims: usize, capacity: usize, frame_rate: T, start: T) -> Result<Self> {
        check_rate(frame_rate)?;
        if capacity == 0 {
            return Err(Error::BadCapacity);
        }
        Ok(TimedSeries {
            dims,
            values: vec![T::zero(); dims * capacity],
            time: TimeBase::FixedRate {
                frame_rate,
                start,
                dropped: 0,
            },
            mode: Mode::Ring {
                capacity,
                cursor: 0,
                filled: 0,
            },
        })
    }

    pub fn ring_stamped(dims: usize, capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::BadCapacity);
        }
        Ok(TimedSeries {
            dims,
            values: vec![T::zero(); dims * capacity],
            time: TimeBase::Stamped {
                timestamps: vec![T::zero(); capacity],
            },
            mode: Mode::Ring {
                capacity,
                cursor: 0,
                filled: 0,
            },
        })
    }

    /// Offline fixed-rate series from flat frame-major values.
    pub fn from_columns(dims: usize, frame_rate: T, start: T, values: Vec<T>) -> Result<Self> {
        check_rate(frame_rate)?;
        if dims == 0 || !values.len().is_multiple_of(dims) {
            return Err(Error::DimensionMismatch {
                expected: dims,
                got: values.len(),
            });
        }
        Ok(TimedSeries {
            dims,
            values,
            time: TimeBase::FixedRate {
                frame_rate,
                start,
                dropped: 0,
            },
            mode: Mode::Offline,
        })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Logical (chronological) frame count.
    pub fn len(&self) -> usize {
        match self.mode {
            Mode::Offline => self.values.len().checked_div(self.dims).unwrap_or(0),
            Mode::Ring { filled, .. } => filled,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_ring(&self) -> bool {
        matches!(self.mode, Mode::Ring { .. })
    }

    pub fn frame_rate(&self) -> Option<T> {
        match &self.time {
            TimeBase::FixedRate { frame_rate, .. } => Some(*frame_rate),
            TimeBase::Stamped { .. } => None,
        }
    }

    /// The public time model, with ring bookkeeping folded in.
    pub fn time_model(&self) -> TimeModel<T> {
        match &self.time {
            TimeBase::FixedRate {
                frame_rate,
                start,
                dropped,
            } => TimeModel::FixedRate {
                frame_rate: *frame_rate,
                start: *start + T::from_u64(*dropped).expect("dropped count fits") / *frame_rate,
            },
            TimeBase::Stamped { .. } => TimeModel::Stamped {
                timestamps: (0..self.len())
                    .map(|i| self.time_of_index(i).expect("index in range"))
                    .collect(),
            },
        }
    }

    pub fn same_time_base(&self, other: &TimedSeries<T>) -> bool {
        self.len() == other.len() && self.time_model() == other.time_model()
    }

    /// Physical slot of chronological index `i`.
    fn slot(&self, i: usize) -> usize {
        match self.mode {
            Mode::Offline => i,
            Mode::Ring {
                capacity,
                cursor,
                filled,
            } => (cursor + capacity - filled + i) % capacity,
        }
    }

    pub fn frame(&self, i: usize) -> Result<&[T]> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            });
        }
        let s = self.slot(i);
        Ok(&self.values[s * self.dims..(s + 1) * self.dims])
    }

    pub fn value(&self, dim: usize, i: usize) -> Result<T> {
        if dim >= self.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims,
                got: dim,
            });
        }
        Ok(self.frame(i)?[dim])
    }

    /// One dimension across all frames, chronological.
    pub fn channel(&self, dim: usize) -> Result<Vec<T>> {
        if dim >= self.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims,
                got: dim,
            });
        }
        (0..self.len()).map(|i| self.value(dim, i)).collect()
    }

    fn last_timestamp(&self) -> Option<T> {
        let n = self.len();
        if n == 0 {
            return None;
        }
        match &self.time {
            TimeBase::FixedRate { .. } => None,
            TimeBase::Stamped { timestamps } => Some(timestamps[self.slot(n - 1)]),
        }
    }

    /// Append a frame. Ring mode at capacity evicts the oldest frame;
    /// offline mode grows. Stamped series require `t`, strictly increasing.
    pub fn push_frame(&mut self, column: &[T], t: Option<T>) -> Result<()> {
        if column.len() != self.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims,
                got: column.len(),
            });
        }
        let stamp = match &self.time {
            TimeBase::FixedRate { .. } => None,
            TimeBase::Stamped { .. } => {
                let t = t.ok_or(Error::MissingTimestamp)?;
                if let Some(last) = self.last_timestamp() {
                    if t <= last {
                        return Err(Error::NonMonotoneTimestamp {
                            prev: last.as_f64(),
                            next: t.as_f64(),
                        });
                    }
                }
                Some(t)
            }
        };

        match &mut self.mode {
            Mode::Offline => {
                self.values.extend_from_slice(column);
                if let (TimeBase::Stamped { timestamps }, Some(t)) = (&mut self.time, stamp) {
                    timestamps.push(t);
                }
            }
            Mode::Ring {
                capacity,
                cursor,
                filled,
            } => {
                let c = *cursor;
                self.values[c * self.dims..(c + 1) * self.dims].copy_from_slice(column);
                match (&mut self.time, stamp) {
                    (TimeBase::Stamped { timestamps }, Some(t)) => timestamps[c] = t,
                    (TimeBase::FixedRate { dropped, .. }, _) if *filled == *capacity => {
                        *dropped += 1;
                    }
                    _ => {}
                }
                *cursor = (c + 1) % *capacity;
                if *filled < *capacity {
                    *filled += 1;
                }
            }
        }
        Ok(())
    }

    pub fn time_of_index(&self, i: usize) -> Result<T> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            });
        }
        Ok(match &self.time {
            TimeBase::FixedRate {
                frame_rate,
                start,
                dropped,
            } => {
                let abs = T::from_u64(*dropped).expect("dropped count fits") + T::of_usize(i);
                *start + abs / *frame_rate
            }
            TimeBase::Stamped { timestamps } => timestamps[self.slot(i)],
        })
    }

    /// Index of the frame whose time is nearest to `t`; exact midpoints
    /// resolve to the earlier frame.
    pub fn index_at_time(&self, t: T) -> Result<usize> {
        let n = self.len();
        if n == 0 {
            return Err(Error::EmptySeries);
        }
        // Lowest index whose time is >= t.
        let mut lo = 0usize;
        let mut hi = n;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.time_of_index(mid)? < t {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        if lo == 0 {
            return Ok(0);
        }
        if lo == n {
            return Ok(n - 1);
        }
        let before = self.time_of_index(lo - 1)?;
        let after = self.time_of_index(lo)?;
        if after - t < t - before {
            Ok(lo)
        } else {
            Ok(lo - 1)
        }
    }

    /// Offline sub-series holding exactly the frames with time in [t0, t1].
    pub fn window(&self, t0: T, t1: T) -> Result<TimedSeries<T>> {
        if t0 > t1 {
            return Err(Error::InvalidWindow {
                t0: t0.as_f64(),
                t1: t1.as_f64(),
            });
        }
        let n = self.len();
        let mut lo = 0usize;
        while lo < n && self.time_of_index(lo)? < t0 {
            lo += 1;
        }
        let mut hi = lo;
        while hi < n && self.time_of_index(hi)? <= t1 {
            hi += 1;
        }
        self.materialize(lo, hi)
    }

    /// Offline series with identical logical contents and times.
    pub fn to_offline(&self) -> TimedSeries<T> {
        self.materialize(0, self.len())
            .expect("full range is valid")
    }

    fn materialize(&self, lo: usize, hi: usize) -> Result<TimedSeries<T>> {
        let mut values = Vec::with_capacity((hi - lo) * self.dims);
        for i in lo..hi {
            values.extend_from_slice(self.frame(i)?);
        }
        let time = match &self.time {
            // Keep the absolute frame offset rather than folding it into
            // `start`, so copied series answer time queries bit-identically.
            TimeBase::FixedRate {
                frame_rate,
                start,
                dropped,
            } => TimeBase::FixedRate {
                frame_rate: *frame_rate,
                start: *start,
                dropped: *dropped + lo as u64,
            },
            TimeBase::Stamped { .. } => TimeBase::Stamped {
                timestamps: (lo..hi)
                    .map(|i| self.time_of_index(i))
                    .collect::<Result<_>>()?,
            },
        };
        Ok(TimedSeries {
            dims: self.dims,
            values,
            time,
            mode: Mode::Offline,
        })
    }
}

fn check_rate<T: Real>(frame_rate: T) -> Result<()> {
    if frame_rate <= T::zero() || !frame_rate.is_finite() {
        return Err(Error::BadFrameRate(frame_rate.as_f64()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(v: f64) -> [f64; 1] {
        [v]
    }

    #[test]
    fn ring_eviction_keeps_newest() {
        let mut s = TimedSeries::ring_fixed_rate(1, 4, 100.0, 0.0).unwrap();
        for v in 1..=6 {
            s.push_frame(&col(v as f64), None).unwrap();
        }
        let got: Vec<f64> = (0..s.len()).map(|i| s.value(0, i).unwrap()).collect();
        assert_eq!(got, vec![3.0, 4.0, 5.0, 6.0]);
    }

    #[test]
    fn offline_append() {
        let mut s = TimedSeries::offline_fixed_rate(1, 100.0, 0.0).unwrap();
        assert_eq!(s.len(), 0);
        s.push_frame(&col(7.0), None).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.value(0, 0).unwrap(), 7.0);
    }

    #[test]
    fn stamped_rejects_non_monotone() {
        let mut s = TimedSeries::offline_stamped(1);
        s.push_frame(&col(1.0), Some(1.0)).unwrap();
        let err = s.push_frame(&col(2.0), Some(0.9)).unwrap_err();
        assert!(matches!(err, Error::NonMonotoneTimestamp { .. }));
        let err = s.push_frame(&col(2.0), None).unwrap_err();
        assert!(matches!(err, Error::MissingTimestamp));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let mut s = TimedSeries::offline_fixed_rate(2, 100.0, 0.0).unwrap();
        let err = s.push_frame(&col(1.0), None).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn fixed_rate_times() {
        let mut s = TimedSeries::offline_fixed_rate(1, 100.0, 0.0).unwrap();
        for i in 0..30 {
            s.push_frame(&col(i as f64), None).unwrap();
        }
        assert_eq!(s.time_of_index(27).unwrap(), 0.27);
        assert!(matches!(
            s.time_of_index(30),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn stamped_lookup() {
        let mut s = TimedSeries::offline_stamped(1);
        for (v, t) in [(1.0, 0.0), (2.0, 0.1), (3.0, 0.25)] {
            s.push_frame(&col(v), Some(t)).unwrap();
        }
        assert_eq!(s.time_of_index(2).unwrap(), 0.25);
        // t=0.2 is nearer to 0.25 than to 0.1.
        assert_eq!(s.index_at_time(0.2).unwrap(), 2);
    }

    #[test]
    fn midpoint_tie_resolves_earlier() {
        let mut s = TimedSeries::offline_stamped(1);
        for (v, t) in [(1.0, 0.0), (2.0, 1.0)] {
            s.push_frame(&col(v), Some(t)).unwrap();
        }
        assert_eq!(s.index_at_time(0.5).unwrap(), 0);
        let empty = TimedSeries::<f64>::offline_stamped(1);
        assert!(matches!(empty.index_at_time(0.5), Err(Error::EmptySeries)));

        // Same rule under a fixed rate: t = 0.25 sits exactly between
        // frames 0 and 1 at 2 Hz.
        let mut fixed = TimedSeries::offline_fixed_rate(1, 2.0, 0.0).unwrap();
        fixed.push_frame(&col(1.0), None).unwrap();
        fixed.push_frame(&col(2.0), None).unwrap();
        assert_eq!(fixed.index_at_time(0.25).unwrap(), 0);
        assert_eq!(fixed.index_at_time(0.26).unwrap(), 1);
    }

    #[test]
    fn window_inclusive_bounds() {
        let mut s = TimedSeries::offline_fixed_rate(1, 100.0, 0.0).unwrap();
        for i in 0..100 {
            s.push_frame(&col(i as f64), None).unwrap();
        }
        let w = s.window(0.10, 0.20).unwrap();
        assert_eq!(w.len(), 11);
        assert_eq!(w.value(0, 0).unwrap(), 10.0);
        assert_eq!(w.value(0, 10).unwrap(), 20.0);
        assert_eq!(w.time_of_index(0).unwrap(), 0.10);

        let outside = s.window(5.0, 6.0).unwrap();
        assert_eq!(outside.len(), 0);

        assert!(matches!(
            s.window(1.0, 0.5),
            Err(Error::InvalidWindow { .. })
        ));
    }

    #[test]
    fn empty_ring_to_offline() {
        let s = TimedSeries::<f64>::ring_stamped(2, 4).unwrap();
        let o = s.to_offline();
        assert_eq!(o.len(), 0);
        assert!(!o.is_ring());
    }

    #[test]
    fn ring_times_shift_with_eviction() {
        let mut s = TimedSeries::ring_fixed_rate(1, 3, 10.0, 0.0).unwrap();
        for i in 0..5 {
            s.push_frame(&col(i as f64), None).unwrap();
        }
        // Oldest logical frame is absolute frame 2 at t = 0.2.
        assert_eq!(s.time_of_index(0).unwrap(), 0.2);
        let o = s.to_offline();
        assert_eq!(o.time_of_index(0).unwrap(), 0.2);
        assert_eq!(o.value(0, 0).unwrap(), 2.0);
    }
}
