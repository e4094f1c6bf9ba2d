//! Wave and period detection on piecewise-linear trajectories.
//!
//! A wave of a species is an interval on which it sits at 0, rises
//! monotonically to exactly 1, and falls monotonically back to 0. On a
//! nonnegative piecewise-linear trajectory both the zeros and the peak value
//! 1 are always attained at segment endpoints (a linear piece is monotone,
//! so it cannot dip to zero or peak strictly inside), which is why detection
//! works on point indices and is exact on executor trajectories. The same
//! detectors run on sampled ODE data with a tolerance band for the `= 0` and
//! `= 1` tests and the same slack on monotonicity.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::Trajectory;
use crate::net::Species;
use crate::ode::SampledTrajectory;

/// A maximal wave interval: point indices where the species is 0 at `start`
/// and `end` and exactly 1 at `peak`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wave {
    pub species: Species,
    pub start: usize,
    pub peak: usize,
    pub end: usize,
}

trait Series {
    fn len(&self) -> usize;
    fn is_zero(&self, i: usize) -> bool;
    fn is_one(&self, i: usize) -> bool;
    /// Step `i -> i+1` is acceptable inside a rising stretch.
    fn step_up_ok(&self, i: usize) -> bool;
    /// Step `i -> i+1` is acceptable inside a falling stretch.
    fn step_down_ok(&self, i: usize) -> bool;
}

struct ExactSeries {
    values: Vec<BigRational>,
}

impl Series for ExactSeries {
    fn len(&self) -> usize {
        self.values.len()
    }

    fn is_zero(&self, i: usize) -> bool {
        self.values[i].is_zero()
    }

    fn is_one(&self, i: usize) -> bool {
        self.values[i].is_one()
    }

    fn step_up_ok(&self, i: usize) -> bool {
        self.values[i] <= self.values[i + 1]
    }

    fn step_down_ok(&self, i: usize) -> bool {
        self.values[i] >= self.values[i + 1]
    }
}

struct FloatSeries {
    values: Vec<f64>,
    eps: f64,
}

impl Series for FloatSeries {
    fn len(&self) -> usize {
        self.values.len()
    }

    fn is_zero(&self, i: usize) -> bool {
        self.values[i].abs() <= self.eps
    }

    fn is_one(&self, i: usize) -> bool {
        (self.values[i] - 1.0).abs() <= self.eps
    }

    fn step_up_ok(&self, i: usize) -> bool {
        self.values[i + 1] >= self.values[i] - self.eps
    }

    fn step_down_ok(&self, i: usize) -> bool {
        self.values[i + 1] <= self.values[i] + self.eps
    }
}

/// All maximal `(start, peak, end)` wave intervals of one series.
fn wave_intervals<S: Series>(s: &S) -> Vec<(usize, usize, usize)> {
    let len = s.len();
    let mut out = Vec::new();
    let mut from = 0;
    while let Some(peak) = (from..len).find(|&j| s.is_one(j)) {
        // Maximal monotone stretches through the peak.
        let mut lo = peak;
        while lo > 0 && s.step_up_ok(lo - 1) {
            lo -= 1;
        }
        let mut hi = peak;
        while hi + 1 < len && s.step_down_ok(hi) {
            hi += 1;
        }
        let start = (lo..peak).find(|&j| s.is_zero(j));
        let end = (peak + 1..=hi).rev().find(|&j| s.is_zero(j));
        match (start, end) {
            (Some(start), Some(end)) => {
                out.push((start, peak, end));
                from = end;
            }
            _ => from = peak + 1,
        }
    }
    out
}

/// Greatest number of consecutive periods of oscillation of the ordered
/// family, scanning from the start of the trajectory. A period is one wave
/// per family member, in order, each wave interval beginning where the
/// previous one ended and containing no other family member.
fn period_count<S: Series>(family: &[S]) -> usize {
    let Some(len) = family.first().map(Series::len) else {
        return 0;
    };
    let mut count = 0;
    let mut t = 0;
    'scan: loop {
        let mut pos = t;
        for (which, series) in family.iter().enumerate() {
            if pos >= len || !series.is_zero(pos) {
                break 'scan;
            }
            let mut j = pos;
            while !series.is_one(j) {
                if j + 1 >= len || !series.step_up_ok(j) {
                    break 'scan;
                }
                j += 1;
            }
            while !series.is_zero(j) {
                if j + 1 >= len || !series.step_down_ok(j) {
                    break 'scan;
                }
                j += 1;
            }
            let end = j;
            for (other, series) in family.iter().enumerate() {
                if other != which && !(pos..=end).all(|i| series.is_zero(i)) {
                    break 'scan;
                }
            }
            pos = end;
        }
        if pos == t {
            break;
        }
        count += 1;
        t = pos;
    }
    count
}

fn exact_series(t: &Trajectory, species: &Species) -> ExactSeries {
    ExactSeries {
        values: t.series(species),
    }
}

fn float_series(t: &SampledTrajectory, species: &Species, eps: f64) -> FloatSeries {
    FloatSeries {
        values: t.series(species).unwrap_or_else(|| vec![0.0; t.len()]),
        eps,
    }
}

/// All maximal waves of the watched species on an exact trajectory, grouped
/// per species in the given order.
pub fn find_waves(t: &Trajectory, watched: &[Species]) -> Vec<Wave> {
    watched
        .iter()
        .flat_map(|species| {
            wave_intervals(&exact_series(t, species))
                .into_iter()
                .map(move |(start, peak, end)| Wave {
                    species: species.clone(),
                    start,
                    peak,
                    end,
                })
        })
        .collect()
}

/// Wave detection on sampled data: `= 0` and `= 1` hold within `eps`, and
/// monotone stretches may backtrack by at most `eps` per step.
pub fn find_waves_sampled(t: &SampledTrajectory, watched: &[Species], eps: f64) -> Vec<Wave> {
    watched
        .iter()
        .flat_map(|species| {
            wave_intervals(&float_series(t, species, eps))
                .into_iter()
                .map(move |(start, peak, end)| Wave {
                    species: species.clone(),
                    start,
                    peak,
                    end,
                })
        })
        .collect()
}

/// Greatest `p` such that a prefix of the trajectory decomposes into `p`
/// consecutive periods of oscillation of the ordered species.
pub fn count_periods(t: &Trajectory, ordered: &[Species]) -> usize {
    let family: Vec<ExactSeries> = ordered.iter().map(|s| exact_series(t, s)).collect();
    period_count(&family)
}

/// [`count_periods`] on sampled data, with tolerance `eps`.
pub fn count_periods_sampled(t: &SampledTrajectory, ordered: &[Species], eps: f64) -> usize {
    let family: Vec<FloatSeries> = ordered.iter().map(|s| float_series(t, s, eps)).collect();
    period_count(&family)
}
