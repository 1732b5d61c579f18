//! Rhythm and periodicity: short-time autocorrelation, power spectral
//! density, and peak-based period estimation.
//!
//! A scalar signal of length L is split into windows of N frames hopped by
//! H. Autocorrelation is computed per window as the inverse DFT of the
//! squared DFT magnitude over 2N points (zero-padded, so it equals the
//! direct lag sum); only lags 0..=N are kept. The PSD uses an N-point DFT
//! and keeps bins 0..=N/2.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::num::Real;
use crate::timed::TimedSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowFn {
    Rectangular,
    /// Raised cosine; the default weighting window.
    Hann,
}

impl WindowFn {
    fn weight<T: Real>(self, n: usize, len: usize) -> T {
        match self {
            WindowFn::Rectangular => T::one(),
            WindowFn::Hann => {
                let phase = T::of(2.0) * T::of(std::f64::consts::PI) * T::of_usize(n)
                    / T::of_usize(len - 1);
                T::of(0.5) * (T::one() - phase.cos())
            }
        }
    }
}

/// Short-time analysis parameters: window length N, hop H, weighting window
/// and optional per-window mean removal (on by default; node positions have
/// non-zero long-term averages).
#[derive(Clone, Copy, Debug)]
pub struct AnalysisGrid {
    pub window_len: usize,
    pub hop: usize,
    pub window_fn: WindowFn,
    pub remove_mean: bool,
}

impl AnalysisGrid {
    pub fn new(window_len: usize, hop: usize) -> Result<Self> {
        if window_len < 2 {
            return Err(Error::InvalidGrid(format!(
                "window length {window_len} must be at least 2"
            )));
        }
        if hop == 0 {
            return Err(Error::InvalidGrid("hop must be at least 1".into()));
        }
        Ok(AnalysisGrid {
            window_len,
            hop,
            window_fn: WindowFn::Hann,
            remove_mean: true,
        })
    }

    pub fn with_window_fn(mut self, f: WindowFn) -> Self {
        self.window_fn = f;
        self
    }

    pub fn with_remove_mean(mut self, on: bool) -> Self {
        self.remove_mean = on;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumKind {
    Autocorrelation,
    PowerSpectralDensity,
}

/// Column-per-window analysis array: N+1 autocorrelation lags or N/2+1
/// PSD bins per column, one column per hop.
#[derive(Clone, Debug)]
pub struct Correlogram<T> {
    kind: SpectrumKind,
    rows: usize,
    cols: usize,
    /// Column-major storage.
    values: Vec<T>,
    frame_rate: T,
    window_len: usize,
    hop: usize,
}

impl<T: Real> Correlogram<T> {
    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn frame_rate(&self) -> T {
        self.frame_rate
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn column(&self, h: usize) -> &[T] {
        &self.values[h * self.rows..(h + 1) * self.rows]
    }

    pub fn value(&self, row: usize, col: usize) -> T {
        self.values[col * self.rows + row]
    }

    /// Column scaled to a [0, 1]-comparable range: autocorrelation divides
    /// by lag 0, PSD by total power. Columns with no energy come back zero.
    pub fn normalized_column(&self, h: usize) -> Vec<T> {
        let col = self.column(h);
        let denom = match self.kind {
            SpectrumKind::Autocorrelation => col[0],
            SpectrumKind::PowerSpectralDensity => col.iter().fold(T::zero(), |a, v| a + *v),
        };
        if denom <= T::zero() {
            return vec![T::zero(); col.len()];
        }
        col.iter().map(|v| *v / denom).collect()
    }
}

fn windowed_frames<T: Real>(
    signal: &TimedSeries<T>,
    grid: &AnalysisGrid,
) -> Result<(Vec<Vec<T>>, T)> {
    if signal.dims() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: signal.dims(),
        });
    }
    let rate = signal.frame_rate().ok_or(Error::NotFixedRate)?;
    let len = signal.len();
    let n = grid.window_len;
    if len < n {
        return Err(Error::TooFewFrames {
            needed: n,
            got: len,
        });
    }
    let cols = (len - n) / grid.hop + 1;
    let mut frames = Vec::with_capacity(cols);
    for h in 0..cols {
        let offset = h * grid.hop;
        let mut frame: Vec<T> = (0..n)
            .map(|i| signal.value(0, offset + i))
            .collect::<Result<_>>()?;
        if grid.remove_mean {
            let mean = frame.iter().fold(T::zero(), |a, v| a + *v) / T::of_usize(n);
            for v in frame.iter_mut() {
                *v -= mean;
            }
        }
        for (i, v) in frame.iter_mut().enumerate() {
            *v *= grid.window_fn.weight(i, n);
        }
        frames.push(frame);
    }
    Ok((frames, rate))
}

/// Short-time autocorrelation array: one column per window, lags 0..=N.
pub fn windowed_autocorrelation<T: Real>(
    signal: &TimedSeries<T>,
    grid: &AnalysisGrid,
) -> Result<Correlogram<T>> {
    let (frames, rate) = windowed_frames(signal, grid)?;
    let n = grid.window_len;
    let padded = 2 * n;
    let rows = n + 1;
    let mut planner = FftPlanner::<T>::new();
    let forward = planner.plan_fft_forward(padded);
    let inverse = planner.plan_fft_inverse(padded);
    let mut values = Vec::with_capacity(rows * frames.len());
    let mut buf = vec![Complex::new(T::zero(), T::zero()); padded];
    for frame in &frames {
        for (slot, v) in buf.iter_mut().zip(frame.iter()) {
            *slot = Complex::new(*v, T::zero());
        }
        for slot in buf.iter_mut().skip(frame.len()) {
            *slot = Complex::new(T::zero(), T::zero());
        }
        forward.process(&mut buf);
        for slot in buf.iter_mut() {
            *slot = Complex::new(slot.norm_sqr(), T::zero());
        }
        inverse.process(&mut buf);
        let scale = T::one() / T::of_usize(padded);
        values.extend(buf[..rows].iter().map(|c| c.re * scale));
    }
    Ok(Correlogram {
        kind: SpectrumKind::Autocorrelation,
        rows,
        cols: frames.len(),
        values,
        frame_rate: rate,
        window_len: n,
        hop: grid.hop,
    })
}

/// Short-time power spectral density: one column per window, bins 0..=N/2.
pub fn windowed_psd<T: Real>(
    signal: &TimedSeries<T>,
    grid: &AnalysisGrid,
) -> Result<Correlogram<T>> {
    let (frames, rate) = windowed_frames(signal, grid)?;
    let n = grid.window_len;
    let rows = n / 2 + 1;
    let mut planner = FftPlanner::<T>::new();
    let forward = planner.plan_fft_forward(n);
    let mut values = Vec::with_capacity(rows * frames.len());
    let mut buf = vec![Complex::new(T::zero(), T::zero()); n];
    for frame in &frames {
        for (slot, v) in buf.iter_mut().zip(frame.iter()) {
            *slot = Complex::new(*v, T::zero());
        }
        forward.process(&mut buf);
        values.extend(buf[..rows].iter().map(|c| c.norm_sqr()));
    }
    Ok(Correlogram {
        kind: SpectrumKind::PowerSpectralDensity,
        rows,
        cols: frames.len(),
        values,
        frame_rate: rate,
        window_len: n,
        hop: grid.hop,
    })
}

/// Peak qualification: a value strictly larger than its 2K direct neighbors
/// and above `threshold` after column normalization.
#[derive(Clone, Copy, Debug)]
pub struct PeakPicker<T> {
    pub lag_min: usize,
    pub lag_max: usize,
    pub neighbors: usize,
    pub threshold: T,
}

impl<T: Real> PeakPicker<T> {
    /// Search range covering periods of 0.2 s to 5 s, clamped to the rows
    /// available in `array`.
    pub fn human_motion(array: &Correlogram<T>, neighbors: usize, threshold: T) -> Result<Self> {
        let rate = array.frame_rate().as_f64();
        let (lo, hi) = match array.kind() {
            SpectrumKind::Autocorrelation => (
                (0.2 * rate).round() as usize,
                (5.0 * rate).round() as usize,
            ),
            // Period N/(bin*rate) in [0.2, 5] s.
            SpectrumKind::PowerSpectralDensity => {
                let n = array.window_len() as f64;
                ((n / (5.0 * rate)).ceil() as usize, (n / (0.2 * rate)).floor() as usize)
            }
        };
        let picker = PeakPicker {
            lag_min: lo.max(neighbors).max(1),
            lag_max: hi.min(array.rows().saturating_sub(neighbors + 1)),
            neighbors,
            threshold,
        };
        picker.validate(array.rows())?;
        Ok(picker)
    }

    fn validate(&self, rows: usize) -> Result<()> {
        let ok = self.lag_min >= self.neighbors
            && self.lag_min <= self.lag_max
            && self.lag_max + self.neighbors < rows
            && self.lag_min >= 1;
        if !ok {
            return Err(Error::InvalidLagRange {
                lag_min: self.lag_min,
                lag_max: self.lag_max,
                rows,
                neighbors: self.neighbors,
            });
        }
        Ok(())
    }
}

/// Per-column period estimate in seconds; `None` when no qualifying peak.
/// Among qualifying peaks the largest value wins; ties take the smaller lag.
pub fn period_from_peak<T: Real>(
    array: &Correlogram<T>,
    picker: &PeakPicker<T>,
) -> Result<Vec<Option<T>>> {
    picker.validate(array.rows())?;
    let mut periods = Vec::with_capacity(array.cols());
    for h in 0..array.cols() {
        let col = array.normalized_column(h);
        let mut best: Option<(T, usize)> = None;
        for m in picker.lag_min..=picker.lag_max {
            let v = col[m];
            if v <= picker.threshold {
                continue;
            }
            let is_peak = (1..=picker.neighbors)
                .all(|k| v > col[m - k] && v > col[m + k]);
            if !is_peak {
                continue;
            }
            if best.is_none_or(|(bv, _)| v > bv) {
                best = Some((v, m));
            }
        }
        periods.push(best.map(|(_, m)| match array.kind() {
            SpectrumKind::Autocorrelation => T::of_usize(m) / array.frame_rate(),
            SpectrumKind::PowerSpectralDensity => {
                T::of_usize(array.window_len()) / (T::of_usize(m) * array.frame_rate())
            }
        }));
    }
    Ok(periods)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signal(rate: f64, n: usize, f: impl Fn(f64) -> f64) -> TimedSeries<f64> {
        let mut s = TimedSeries::offline_fixed_rate(1, rate, 0.0).unwrap();
        for i in 0..n {
            s.push_frame(&[f(i as f64 / rate)], None).unwrap();
        }
        s
    }

    #[test]
    fn constant_signal_zeroes_after_mean_removal() {
        let s = signal(100.0, 300, |_| 4.2);
        let grid = AnalysisGrid::new(64, 16).unwrap();
        let r = windowed_autocorrelation(&s, &grid).unwrap();
        assert_eq!(r.cols(), (300 - 64) / 16 + 1);
        assert_eq!(r.rows(), 65);
        for h in 0..r.cols() {
            for v in r.column(h) {
                assert!(v.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn lag_zero_dominates() {
        let s = signal(100.0, 256, |t| (2.0 * std::f64::consts::PI * 3.0 * t).sin() + 0.3);
        let grid = AnalysisGrid::new(128, 32).unwrap();
        let r = windowed_autocorrelation(&s, &grid).unwrap();
        for h in 0..r.cols() {
            let col = r.column(h);
            for v in &col[1..] {
                assert!(col[0] >= v.abs() - 1e-12);
            }
        }
    }

    #[test]
    fn psd_nonnegative_and_peaks_at_bin() {
        let n = 128;
        // Bin-aligned frequency: k cycles per window.
        let k = 8;
        let rate = 100.0;
        let freq = k as f64 * rate / n as f64;
        let s = signal(rate, 256, |t| (2.0 * std::f64::consts::PI * freq * t).sin());
        let grid = AnalysisGrid::new(n, 64)
            .unwrap()
            .with_window_fn(WindowFn::Rectangular)
            .with_remove_mean(false);
        let p = windowed_psd(&s, &grid).unwrap();
        assert_eq!(p.rows(), n / 2 + 1);
        for h in 0..p.cols() {
            let col = p.column(h);
            let max_bin = (0..col.len()).max_by(|a, b| col[*a].partial_cmp(&col[*b]).unwrap());
            assert_eq!(max_bin, Some(k));
            for v in col {
                assert!(*v >= 0.0);
            }
        }
    }

    #[test]
    fn zero_signal_zero_psd() {
        let s = signal(100.0, 200, |_| 0.0);
        let grid = AnalysisGrid::new(64, 32).unwrap();
        let p = windowed_psd(&s, &grid).unwrap();
        assert!(p.column(0).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn no_peak_on_flat_signal() {
        let s = signal(100.0, 400, |_| 1.0);
        let grid = AnalysisGrid::new(256, 64).unwrap();
        let r = windowed_autocorrelation(&s, &grid).unwrap();
        let picker = PeakPicker::human_motion(&r, 2, 0.3).unwrap();
        let periods = period_from_peak(&r, &picker).unwrap();
        assert!(periods.iter().all(Option::is_none));
    }

    #[test]
    fn two_hz_sine_period() {
        let s = signal(100.0, 600, |t| (2.0 * std::f64::consts::PI * 2.0 * t).sin());
        let grid = AnalysisGrid::new(256, 64).unwrap();
        let r = windowed_autocorrelation(&s, &grid).unwrap();
        let picker = PeakPicker::human_motion(&r, 2, 0.2).unwrap();
        let periods = period_from_peak(&r, &picker).unwrap();
        for (h, p) in periods.iter().enumerate() {
            let p = p.expect("periodic signal has a peak");
            assert!((p - 0.5).abs() <= 0.01 + 1e-12, "period {p}");
            // For a clean sine the qualifying peak is the exhaustive
            // argmax over the same lag range.
            let col = r.normalized_column(h);
            let argmax = (picker.lag_min..=picker.lag_max)
                .max_by(|a, b| col[*a].partial_cmp(&col[*b]).unwrap())
                .unwrap();
            assert_eq!(p, argmax as f64 / 100.0, "column {h}");
        }
    }

    #[test]
    fn short_signal_rejected() {
        let s = signal(100.0, 10, |t| t);
        let grid = AnalysisGrid::new(64, 16).unwrap();
        assert!(matches!(
            windowed_autocorrelation(&s, &grid),
            Err(Error::TooFewFrames { .. })
        ));
    }

    #[test]
    fn invalid_lag_range_rejected() {
        let s = signal(100.0, 300, |t| t.sin());
        let grid = AnalysisGrid::new(64, 16).unwrap();
        let r = windowed_autocorrelation(&s, &grid).unwrap();
        let picker = PeakPicker {
            lag_min: 1,
            lag_max: 64,
            neighbors: 2,
            threshold: 0.1,
        };
        assert!(matches!(
            period_from_peak(&r, &picker),
            Err(Error::InvalidLagRange { .. })
        ));
    }
}
