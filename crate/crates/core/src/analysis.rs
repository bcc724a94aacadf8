//! Collapse and revival detection on sampled time series.
//!
//! Events are the peaks of the smoothed `S(P)` series. A peak is a revival
//! when the inversion envelope at that time exceeds the envelope's median over
//! the whole run, and a collapse otherwise.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};

/// A sampled series of `(t, value)` pairs, sorted by `t`.
pub type Sample = (f64, f64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Collapse,
    Revival,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Collapse => "collapse",
            Self::Revival => "revival",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub t: f64,
    /// Smoothed `S(P)` at the peak.
    pub sp_value: f64,
    pub kind: EventKind,
}

/// Closed interval `[start, end]` of sample times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventReport {
    pub events: Vec<Event>,
    pub onsets: Vec<Interval>,
}

impl EventReport {
    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    pub fn times(&self, kind: EventKind) -> Vec<f64> {
        self.events.iter().filter(|e| e.kind == kind).map(|e| e.t).collect()
    }
}

/// Tunables for [`detect_events`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    /// Peak threshold as a fraction of the series maximum.
    pub min_height_fraction: f64,
    /// Minimum spacing between accepted peaks; the smoothing window is a fifth of it.
    pub min_separation: f64,
    /// Half-width of the sliding-maximum inversion envelope.
    pub envelope_half_window: f64,
    /// `S(P)` at or below this counts as zero for onset intervals.
    pub zero_threshold: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            min_height_fraction: 0.1,
            min_separation: 20.0,
            envelope_half_window: 10.0,
            zero_threshold: 0.01,
        }
    }
}

/// Sliding-window maximum of `|value|` over `[t - half_window, t + half_window]`.
pub fn envelope(series: &[Sample], half_window: f64) -> Result<Vec<Sample>> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let mut out = Vec::with_capacity(series.len());
    let mut window: VecDeque<usize> = VecDeque::new();
    let mut next = 0;
    for &(t, _) in series {
        while next < series.len() && series[next].0 <= t + half_window {
            let v = series[next].1.abs();
            while window.back().is_some_and(|&j| series[j].1.abs() <= v) {
                window.pop_back();
            }
            window.push_back(next);
            next += 1;
        }
        while window.front().is_some_and(|&j| series[j].0 < t - half_window) {
            window.pop_front();
        }
        let top = window.front().expect("window holds the current sample");
        out.push((t, series[*top].1.abs()));
    }
    Ok(out)
}

/// Centered moving average over `|t_j - t_i| <= width / 2`, truncated at the ends.
///
/// Window edges carry a relative slack of 1e-9 so that rounding in the sample
/// times does not make windows on a uniform grid lopsided.
pub fn moving_average(series: &[Sample], width: f64) -> Vec<Sample> {
    let span = series.last().map_or(0.0, |s| s.0.abs()).max(1.0);
    let half = 0.5 * width + 1e-9 * span;
    let mut prefix = Vec::with_capacity(series.len() + 1);
    prefix.push(0.0);
    for &(_, v) in series {
        prefix.push(prefix.last().unwrap() + v);
    }
    let (mut lo, mut hi) = (0, 0);
    series
        .iter()
        .map(|&(t, _)| {
            while series[lo].0 < t - half {
                lo += 1;
            }
            while hi < series.len() && series[hi].0 <= t + half {
                hi += 1;
            }
            (t, (prefix[hi] - prefix[lo]) / (hi - lo) as f64)
        })
        .collect()
}

/// Interior local maxima of the smoothed series at or above `min_height`,
/// thinned greedily (highest first) so that kept peaks are at least
/// `min_separation` apart. Values are those of the smoothed series.
///
/// Maxima closer to either end than half the smoothing width, including an
/// endpoint higher than its neighbour, have a truncated averaging window.
/// They take part in the thinning as blockers but are never reported.
pub fn find_peaks(series: &[Sample], min_height: f64, min_separation: f64) -> Vec<Sample> {
    if series.len() < 3 {
        return Vec::new();
    }
    let width = min_separation / 5.0;
    let n = series.len();
    let (first, last) = (series[0].0, series[n - 1].0);
    let inside = |t: f64| t - first >= 0.5 * width && last - t >= 0.5 * width;
    let smooth = moving_average(series, width);

    let mut candidates: Vec<(Sample, bool)> = smooth
        .windows(3)
        .filter(|w| w[1].1 > w[0].1 && w[1].1 >= w[2].1 && w[1].1 >= min_height)
        .map(|w| (w[1], inside(w[1].0)))
        .collect();
    for (edge, next) in [(0, 1), (n - 1, n - 2)] {
        if smooth[edge].1 > smooth[next].1 && smooth[edge].1 >= min_height {
            candidates.push((smooth[edge], false));
        }
    }
    candidates.sort_by(|a, b| b.0 .1.total_cmp(&a.0 .1).then(a.0 .0.total_cmp(&b.0 .0)));

    let mut kept: Vec<(Sample, bool)> = Vec::new();
    for c in candidates {
        if kept.iter().all(|k| (k.0 .0 - c.0 .0).abs() >= min_separation) {
            kept.push(c);
        }
    }
    let mut peaks: Vec<Sample> = kept.into_iter().filter(|k| k.1).map(|k| k.0).collect();
    peaks.sort_by(|a, b| a.0.total_cmp(&b.0));
    peaks
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn nearest_index(series: &[Sample], t: f64) -> usize {
    let i = series.partition_point(|s| s.0 < t);
    if i == 0 {
        0
    } else if i == series.len() {
        series.len() - 1
    } else if (series[i].0 - t).abs() < (t - series[i - 1].0).abs() {
        i
    } else {
        i - 1
    }
}

/// Labels each `S(P)` peak by comparing the inversion envelope at its time
/// against the envelope's global median.
pub fn classify_events(sp_peaks: &[Sample], inv_series: &[Sample], half_window: f64) -> Result<Vec<Event>> {
    let env = envelope(inv_series, half_window)?;
    let mut levels: Vec<f64> = env.iter().map(|s| s.1).collect();
    let threshold = median(&mut levels);
    Ok(sp_peaks
        .iter()
        .map(|&(t, sp_value)| {
            let level = env[nearest_index(&env, t)].1;
            let kind = if level > threshold {
                EventKind::Revival
            } else {
                EventKind::Collapse
            };
            Event { t, sp_value, kind }
        })
        .collect())
}

/// Maximal runs of consecutive samples with `value <= zero_threshold`.
pub fn find_onsets(series: &[Sample], zero_threshold: f64) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut open: Option<Interval> = None;
    for &(t, v) in series {
        if v <= zero_threshold {
            match open.as_mut() {
                Some(iv) => iv.end = t,
                None => open = Some(Interval { start: t, end: t }),
            }
        } else if let Some(iv) = open.take() {
            out.push(iv);
        }
    }
    out.extend(open);
    out
}

/// Full pipeline: peaks of `sp`, labelled against `inv`, plus `S(P) = 0` onsets.
pub fn detect_events(sp: &[Sample], inv: &[Sample], cfg: &DetectorConfig) -> Result<EventReport> {
    if sp.is_empty() {
        return Err(Error::EmptySeries);
    }
    let max = sp.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let min_height = cfg.min_height_fraction * max.max(0.0);
    let peaks = find_peaks(sp, min_height, cfg.min_separation);
    Ok(EventReport {
        events: classify_events(&peaks, inv, cfg.envelope_half_window)?,
        onsets: find_onsets(sp, cfg.zero_threshold),
    })
}
