//! Grid sweeps for inf/sup estimation of pointwise multipliers.
//!
//! A sweep samples a function on a half-open grid, takes the extreme values,
//! then re-samples once on a finer local grid around each extremum. Grid
//! minima over-estimate a true infimum and grid maxima under-estimate a true
//! supremum, so certificates built from sweeps stay on the safe side up to
//! the local refinement resolution.

use rayon::prelude::*;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Extremum {
    pub value: f64,
    pub location: f64,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct SweepOutcome {
    pub inf: Extremum,
    pub sup: Extremum,
}

/// Log-spaced half-open grid: x_i = exp(log_lo + i * log_step), i < points.
pub(crate) struct LogGrid {
    log_lo: f64,
    log_step: f64,
    pub points: usize,
}

impl LogGrid {
    pub fn span(lo: f64, hi: f64, points: usize) -> LogGrid {
        debug_assert!(lo > 0.0 && hi > lo && points >= 2);
        let log_lo = lo.ln();
        LogGrid {
            log_lo,
            log_step: (hi.ln() - log_lo) / points as f64,
            points,
        }
    }

    pub fn at(&self, i: usize) -> f64 {
        (self.log_lo + i as f64 * self.log_step).exp()
    }
}

/// Uniform half-open grid: x_i = lo + i * step, i < points.
pub(crate) struct UniformGrid {
    lo: f64,
    step: f64,
    pub points: usize,
}

impl UniformGrid {
    pub fn span(lo: f64, hi: f64, points: usize) -> UniformGrid {
        debug_assert!(hi > lo && points >= 2);
        UniformGrid {
            lo,
            step: (hi - lo) / points as f64,
            points,
        }
    }

    pub fn at(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.step
    }
}

fn scan(values: &[f64], locate: impl Fn(usize) -> f64) -> (SweepOutcome, usize, usize) {
    let mut imin = 0;
    let mut imax = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[imin] {
            imin = i;
        }
        if v > values[imax] {
            imax = i;
        }
    }
    let outcome = SweepOutcome {
        inf: Extremum {
            value: values[imin],
            location: locate(imin),
        },
        sup: Extremum {
            value: values[imax],
            location: locate(imax),
        },
    };
    (outcome, imin, imax)
}

/// One refinement pass: inclusive resampling between the neighbours of the
/// coarse extremum. `log_domain` selects geometric versus linear spacing.
fn refine<F>(f: &F, lo: f64, hi: f64, points: usize, log_domain: bool) -> (Extremum, Extremum)
where
    F: Fn(f64) -> f64 + Sync,
{
    let n = points.max(3);
    let sample = |i: usize| {
        let t = i as f64 / (n - 1) as f64;
        if log_domain {
            (lo.ln() * (1.0 - t) + hi.ln() * t).exp()
        } else {
            lo * (1.0 - t) + hi * t
        }
    };
    let mut min = Extremum {
        value: f64::INFINITY,
        location: lo,
    };
    let mut max = Extremum {
        value: f64::NEG_INFINITY,
        location: lo,
    };
    for i in 0..n {
        let x = sample(i);
        let v = f(x);
        if v < min.value {
            min = Extremum { value: v, location: x };
        }
        if v > max.value {
            max = Extremum { value: v, location: x };
        }
    }
    (min, max)
}

fn sweep_impl<F, G>(f: &F, at: G, points: usize, refine_points: usize, log_domain: bool) -> SweepOutcome
where
    F: Fn(f64) -> f64 + Sync,
    G: Fn(usize) -> f64 + Sync,
{
    let values: Vec<f64> = (0..points).into_par_iter().map(|i| f(at(i))).collect();
    let (mut outcome, imin, imax) = scan(&values, &at);
    if refine_points > 0 {
        for (idx, is_min) in [(imin, true), (imax, false)] {
            let lo = at(idx.saturating_sub(1));
            let hi = at((idx + 1).min(points - 1));
            if hi <= lo {
                continue;
            }
            let (rmin, rmax) = refine(f, lo, hi, refine_points, log_domain);
            if is_min && rmin.value < outcome.inf.value {
                outcome.inf = rmin;
            }
            if !is_min && rmax.value > outcome.sup.value {
                outcome.sup = rmax;
            }
        }
    }
    outcome
}

pub(crate) fn sweep_log<F>(f: &F, grid: &LogGrid, refine_points: usize) -> SweepOutcome
where
    F: Fn(f64) -> f64 + Sync,
{
    sweep_impl(f, |i| grid.at(i), grid.points, refine_points, true)
}

pub(crate) fn sweep_uniform<F>(f: &F, grid: &UniformGrid, refine_points: usize) -> SweepOutcome
where
    F: Fn(f64) -> f64 + Sync,
{
    sweep_impl(f, |i| grid.at(i), grid.points, refine_points, false)
}
