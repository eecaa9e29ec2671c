//! Weaving certificates: bounds that hold for every family assignment.
//!
//! N systems sharing the lattice structure are woven when every pattern
//! j ↦ ℓ_j yields a frame with bounds independent of the pattern. Because
//! the multiplier of a pattern is a sum of per-scale terms, taking the
//! pointwise minimum (maximum) over the family choice inside each term
//! gives a lower (upper) envelope for all patterns at once. The envelopes
//! are a^N-periodic in log γ, so one block sweep certifies every pattern.

use crate::error::{FrameError, Result};
use crate::frame_core::{
    frame_bounds_with, truncation_level_with, BoundsCertificate, GridInfo, SweepSettings,
    SystemParams, WeavingPattern, DEFAULT_TAIL_REL,
};
use crate::generators::WaveletGenerator;
use crate::rng::SplitMix64;
use crate::sweep::{sweep_log, LogGrid};

/// One of the N woven families: the constant pattern ℓ_j = ell.
#[derive(Clone, Debug)]
pub struct PacketFamily {
    params: SystemParams,
    ell: u32,
}

pub fn packet_family(params: SystemParams, ell: u32) -> Result<PacketFamily> {
    if ell >= params.weaving_order() {
        return Err(FrameError::invalid(
            "ell",
            format!(
                "family index {ell} out of range for weaving order {}",
                params.weaving_order()
            ),
        ));
    }
    Ok(PacketFamily { params, ell })
}

impl PacketFamily {
    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn scale(&self, j: i64) -> f64 {
        self.params.scale(j, self.ell)
    }

    pub fn as_pattern(&self) -> WeavingPattern {
        WeavingPattern::constant(self.ell)
    }

    pub fn bounds(
        &self,
        gen: &WaveletGenerator,
        settings: &SweepSettings,
    ) -> Result<BoundsCertificate> {
        frame_bounds_with(gen, &self.params, &self.as_pattern(), settings)
    }
}

/// Pattern-independent bounds with a witness for the weakest lower bound.
#[derive(Clone, Debug)]
pub struct WeaveCertificate {
    pub l_weave: f64,
    pub u_weave: f64,
    pub grid: GridInfo,
    pub tail_bound: f64,
    /// Per-scale family choices minimizing the multiplier at `arg_inf`;
    /// its own frame bounds sit within tail + grid error of `l_weave`.
    pub witness_min: WeavingPattern,
    pub arg_inf: f64,
    pub arg_sup: f64,
    /// False when `l_weave` cannot be separated from the truncation tail.
    pub is_woven_certified: bool,
}

pub fn weave_certificate(
    gen: &WaveletGenerator,
    params: &SystemParams,
    grid_points: usize,
) -> Result<WeaveCertificate> {
    weave_certificate_with(gen, params, &SweepSettings::with_grid(grid_points))
}

pub fn weave_certificate_with(
    gen: &WaveletGenerator,
    params: &SystemParams,
    settings: &SweepSettings,
) -> Result<WeaveCertificate> {
    params.require_painless(gen)?;
    if settings.points_per_period < 16 {
        return Err(FrameError::invalid(
            "grid_points",
            "need at least 16 points per period",
        ));
    }
    let n = params.weaving_order();
    let block = params.block_ratio();
    let plan = truncation_level_with(gen, params, (1.0, block), settings.tail_rel)?;
    // Per-scale maxima are dominated by the ℓ = 0 envelope bound, so the
    // single-pattern tail bound covers both envelope sweeps.
    let js: Vec<i64> = (plan.j_min_eff..=plan.j_max_eff).collect();

    let term = |g: f64, j: i64, ell: u32| {
        let v = gen.eval_freq(g / params.scale(j, ell));
        v * v
    };
    let min_sum = |g: f64| {
        let mut s = 0.0;
        for &j in &js {
            let mut mn = f64::INFINITY;
            for ell in 0..n {
                mn = mn.min(term(g, j, ell));
            }
            s += mn;
        }
        s / params.translation_step()
    };
    let max_sum = |g: f64| {
        let mut s = 0.0;
        for &j in &js {
            let mut mx = 0.0f64;
            for ell in 0..n {
                mx = mx.max(term(g, j, ell));
            }
            s += mx;
        }
        s / params.translation_step()
    };

    let grid = LogGrid::span(1.0, block, settings.points_per_period);
    let lo = sweep_log(&min_sum, &grid, settings.refine_points);
    let hi = sweep_log(&max_sum, &grid, settings.refine_points);

    let witness_choices: Vec<u32> = js
        .iter()
        .map(|&j| {
            let mut best = 0u32;
            let mut best_v = f64::INFINITY;
            for ell in 0..n {
                let v = term(lo.inf.location, j, ell);
                if v < best_v {
                    best_v = v;
                    best = ell;
                }
            }
            best
        })
        .collect();
    let witness_min = WeavingPattern::windowed(plan.j_min_eff, witness_choices);

    let l_weave = lo.inf.value;
    Ok(WeaveCertificate {
        l_weave,
        u_weave: hi.sup.value,
        grid: GridInfo {
            lo: 1.0,
            hi: block,
            points: settings.points_per_period,
            log_spaced: true,
        },
        tail_bound: plan.tail_bound,
        witness_min,
        arg_inf: lo.inf.location,
        arg_sup: hi.sup.location,
        is_woven_certified: l_weave > plan.tail_bound,
    })
}

/// Plot-ready samples (γ, min-sum, max-sum) of the two weave envelopes on
/// the log grid over one period [1, a^N), exactly `points` rows.
pub fn weave_envelope_curve(
    gen: &WaveletGenerator,
    params: &SystemParams,
    points: usize,
) -> Result<Vec<(f64, f64, f64)>> {
    params.require_painless(gen)?;
    if points < 2 {
        return Err(FrameError::invalid("points", "need at least two samples"));
    }
    let n = params.weaving_order();
    let block = params.block_ratio();
    let plan = truncation_level_with(gen, params, (1.0, block), DEFAULT_TAIL_REL)?;
    let js: Vec<i64> = (plan.j_min_eff..=plan.j_max_eff).collect();
    let grid = LogGrid::span(1.0, block, points);
    let inv_b = params.translation_step().recip();
    Ok((0..points)
        .map(|i| {
            let g = grid.at(i);
            let mut lo = 0.0;
            let mut hi = 0.0;
            for &j in &js {
                let mut mn = f64::INFINITY;
                let mut mx = 0.0f64;
                for ell in 0..n {
                    let v = gen.eval_freq(g / params.scale(j, ell));
                    let v2 = v * v;
                    mn = mn.min(v2);
                    mx = mx.max(v2);
                }
                lo += mn;
                hi += mx;
            }
            (g, lo * inv_b, hi * inv_b)
        })
        .collect())
}

/// Frame bounds of one pattern, decorated with the weave certificate so the
/// containment L ≤ A ≤ B ≤ U is visible in a single report.
pub fn woven_bounds(
    gen: &WaveletGenerator,
    params: &SystemParams,
    pattern: &WeavingPattern,
    settings: &SweepSettings,
) -> Result<BoundsCertificate> {
    let mut cert = frame_bounds_with(gen, params, pattern, settings)?;
    let weave = weave_certificate_with(gen, params, settings)?;
    cert.l_weave = Some(weave.l_weave);
    cert.u_weave = Some(weave.u_weave);
    Ok(cert)
}

/// One scanned pattern with its certificate.
#[derive(Clone, Debug)]
pub struct ScannedPattern {
    pub pattern: WeavingPattern,
    pub bounds: BoundsCertificate,
}

/// Random patterns on the window [start, start + len), zero extension
/// outside. Choices are drawn in ascending j order, so the stream of a
/// given seed pins down every pattern exactly.
pub fn sample_patterns(
    gen: &WaveletGenerator,
    params: &SystemParams,
    count: usize,
    seed: u64,
    window: (i64, usize),
    settings: &SweepSettings,
) -> Result<Vec<ScannedPattern>> {
    let (start, len) = window;
    if len == 0 {
        return Err(FrameError::invalid("window", "window length must be positive"));
    }
    let n = params.weaving_order();
    let mut rng = SplitMix64::new(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let choices: Vec<u32> = (0..len).map(|_| rng.below(n as u64) as u32).collect();
        let pattern = WeavingPattern::windowed(start, choices);
        let bounds = frame_bounds_with(gen, params, &pattern, settings)?;
        out.push(ScannedPattern { pattern, bounds });
    }
    Ok(out)
}

pub const ENUMERATION_BUDGET: u64 = 1_000_000;

/// Every pattern on the window, in counter order: the choice at the window
/// start is the fastest-changing digit. N^len must stay within the budget.
pub fn enumerate_patterns(
    gen: &WaveletGenerator,
    params: &SystemParams,
    window: (i64, usize),
    settings: &SweepSettings,
) -> Result<Vec<ScannedPattern>> {
    let (start, len) = window;
    if len == 0 {
        return Err(FrameError::invalid("window", "window length must be positive"));
    }
    let n = params.weaving_order() as u128;
    let required = n
        .checked_pow(len as u32)
        .ok_or(FrameError::BudgetExceeded {
            required: u128::MAX,
            budget: ENUMERATION_BUDGET,
        })?;
    if required > ENUMERATION_BUDGET as u128 {
        return Err(FrameError::BudgetExceeded {
            required,
            budget: ENUMERATION_BUDGET,
        });
    }
    let n = params.weaving_order();
    let mut digits = vec![0u32; len];
    let mut out = Vec::with_capacity(required as usize);
    loop {
        let pattern = WeavingPattern::windowed(start, digits.clone());
        let bounds = frame_bounds_with(gen, params, &pattern, settings)?;
        out.push(ScannedPattern { pattern, bounds });
        // Increment the little-endian counter.
        let mut i = 0;
        while i < len {
            digits[i] += 1;
            if digits[i] < n {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == len {
            return Ok(out);
        }
    }
}

/// Index of the scanned pattern with the smallest lower bound, first on ties.
pub fn weakest_lower(scans: &[ScannedPattern]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, s) in scans.iter().enumerate() {
        match best {
            None => best = Some(i),
            Some(b) if s.bounds.a_num < scans[b].bounds.a_num => best = Some(i),
            _ => {}
        }
    }
    best
}

/// Index of the scanned pattern with the largest upper bound, first on ties.
pub fn largest_upper(scans: &[ScannedPattern]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, s) in scans.iter().enumerate() {
        match best {
            None => best = Some(i),
            Some(b) if s.bounds.b_num > scans[b].bounds.b_num => best = Some(i),
            _ => {}
        }
    }
    best
}
