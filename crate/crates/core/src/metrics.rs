//! Reward-curve post-processing: trailing smoothing, interval means and
//! averaging across runs.

use alloc::vec::Vec;
use core::ops::Range;

/// Smoothing window used for reward curves.
pub const DEFAULT_SMOOTH_WINDOW: usize = 100;
/// Episode interval for the interval-mean table.
pub const DEFAULT_INTERVAL: usize = 2500;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("window must be at least 1")]
    ZeroWindow,
    #[error("interval must be at least 1")]
    ZeroInterval,
    #[error("run {run} has length {len}, expected {expected}")]
    LengthMismatch { run: usize, len: usize, expected: usize },
    #[error("no runs to aggregate")]
    NoRuns,
}

/// Trailing mean: element `i` averages `series[i+1-window ..= i]`, using a
/// shorter window for the first `window - 1` elements.
pub fn smooth(series: &[f64], window: usize) -> Result<Vec<f64>, MetricsError> {
    if window == 0 {
        return Err(MetricsError::ZeroWindow);
    }
    // Each mean is summed from scratch; a running sum drifts.
    Ok((0..series.len())
        .map(|i| {
            let chunk = &series[(i + 1).saturating_sub(window)..=i];
            chunk.iter().sum::<f64>() / chunk.len() as f64
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalMean {
    /// Episode indices covered, half open.
    pub range: Range<usize>,
    pub mean: f64,
}

/// Means over consecutive disjoint chunks of `interval` elements. The last
/// chunk may be shorter and is averaged over its own length.
pub fn interval_average(series: &[f64], interval: usize) -> Result<Vec<IntervalMean>, MetricsError> {
    if interval == 0 {
        return Err(MetricsError::ZeroInterval);
    }
    Ok(series
        .chunks(interval)
        .enumerate()
        .map(|(k, chunk)| IntervalMean {
            range: k * interval..k * interval + chunk.len(),
            mean: chunk.iter().sum::<f64>() / chunk.len() as f64,
        })
        .collect())
}

/// Element-wise mean of equally long series.
pub fn aggregate_runs<S: AsRef<[f64]>>(runs: &[S]) -> Result<Vec<f64>, MetricsError> {
    let first = runs.first().ok_or(MetricsError::NoRuns)?.as_ref();
    let expected = first.len();
    for (run, s) in runs.iter().enumerate() {
        let len = s.as_ref().len();
        if len != expected {
            return Err(MetricsError::LengthMismatch { run, len, expected });
        }
    }
    let n = runs.len() as f64;
    Ok((0..expected).map(|i| runs.iter().map(|s| s.as_ref()[i]).sum::<f64>() / n).collect())
}
