//! Frame bounds for dilation-translation systems in the painless regime.
//!
//! A system is built from a wavelet generator ψ, a dilation base a > 1, a
//! translation step b > 0 and a weaving order N ≥ 1. For each integer j a
//! family choice ℓ_j in {0, …, N-1} picks the scale λ_j = a^(N·j + ℓ_j).
//! When b does not exceed 1/|supp ψ̂| the frame operator acts as pointwise
//! multiplication by m(γ) = (1/b) Σ_j |ψ̂(γ / λ_j)|², so the optimal frame
//! bounds are the essential infimum and supremum of m.
//! This module certifies those bounds numerically on log-spaced grids with a
//! controlled truncation tail, and independently through closed-form
//! envelope bounds.

use crate::error::{FrameError, Result};
use crate::generators::WaveletGenerator;
use crate::sweep::{sweep_log, LogGrid};

/// Grid density, refinement size and truncation target used by the sweeps.
#[derive(Clone, Copy, Debug)]
pub struct SweepSettings {
    /// Log-spaced samples per multiplicative period [x, a^N x).
    pub points_per_period: usize,
    /// Inclusive samples of the single refinement pass around each extremum.
    pub refine_points: usize,
    /// Truncation tail target, relative to a uniform lower bound of the
    /// multiplier derived from the envelope.
    pub tail_rel: f64,
}

pub const DEFAULT_GRID_POINTS: usize = 4096;
pub const DEFAULT_REFINE_POINTS: usize = 256;
pub const DEFAULT_TAIL_REL: f64 = 1e-12;

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            points_per_period: DEFAULT_GRID_POINTS,
            refine_points: DEFAULT_REFINE_POINTS,
            tail_rel: DEFAULT_TAIL_REL,
        }
    }
}

impl SweepSettings {
    pub fn with_grid(points_per_period: usize) -> Self {
        SweepSettings {
            points_per_period,
            ..Default::default()
        }
    }
}

/// Dilation base, translation step and weaving order of one system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    a: f64,
    b: f64,
    n: u32,
}

impl SystemParams {
    pub fn new(a: f64, b: f64, n: u32) -> Result<Self> {
        if !(a.is_finite() && a > 1.0) {
            return Err(FrameError::invalid(
                "a",
                format!("dilation base must exceed 1, got {a}"),
            ));
        }
        if !(b.is_finite() && b > 0.0) {
            return Err(FrameError::invalid(
                "b",
                format!("translation step must be positive, got {b}"),
            ));
        }
        if n == 0 {
            return Err(FrameError::invalid("n", "weaving order must be at least 1"));
        }
        Ok(SystemParams { a, b, n })
    }

    pub fn dilation(&self) -> f64 {
        self.a
    }

    pub fn translation_step(&self) -> f64 {
        self.b
    }

    pub fn weaving_order(&self) -> u32 {
        self.n
    }

    /// Multiplicative period a^N of one full weaving block.
    pub fn block_ratio(&self) -> f64 {
        self.a.powi(self.n as i32)
    }

    /// Scale λ = a^(N·j + ℓ).
    pub fn scale(&self, j: i64, ell: u32) -> f64 {
        self.a.powi((self.n as i64 * j + ell as i64) as i32)
    }

    /// Largest translation step admitted by the painless condition.
    pub fn painless_limit(gen: &WaveletGenerator) -> f64 {
        1.0 / gen.support_width()
    }

    pub fn is_painless_for(&self, gen: &WaveletGenerator) -> bool {
        self.b <= Self::painless_limit(gen)
    }

    pub(crate) fn require_painless(&self, gen: &WaveletGenerator) -> Result<()> {
        let limit = Self::painless_limit(gen);
        if self.b > limit {
            return Err(FrameError::PainlessViolated { b: self.b, limit });
        }
        Ok(())
    }
}

/// Largest translation step for which the frame operator of systems built on
/// `gen` is a pointwise multiplier (b ≤ 1/|supp ψ̂|).
pub fn admissible_b(gen: &WaveletGenerator) -> f64 {
    SystemParams::painless_limit(gen)
}

/// Behaviour of a weaving pattern outside its stored window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extension {
    /// Family 0 everywhere outside the window.
    ConstantZero,
    /// The window repeats with period equal to its length.
    Periodic,
}

/// Assignment j ↦ ℓ_j of one family index per scale block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeavingPattern {
    start: i64,
    choices: Vec<u32>,
    extension: Extension,
}

impl WeavingPattern {
    /// ℓ_j = ell for every j.
    pub fn constant(ell: u32) -> Self {
        WeavingPattern {
            start: 0,
            choices: vec![ell],
            extension: Extension::Periodic,
        }
    }

    /// Explicit choices on [start, start + len), family 0 outside.
    pub fn windowed(start: i64, choices: Vec<u32>) -> Self {
        WeavingPattern {
            start,
            choices,
            extension: Extension::ConstantZero,
        }
    }

    /// The window repeats over all of ℤ; it must be non-empty.
    pub fn periodic(start: i64, choices: Vec<u32>) -> Result<Self> {
        if choices.is_empty() {
            return Err(FrameError::invalid(
                "choices",
                "periodic pattern needs a non-empty window",
            ));
        }
        Ok(WeavingPattern {
            start,
            choices,
            extension: Extension::Periodic,
        })
    }

    pub fn ell_at(&self, j: i64) -> u32 {
        let len = self.choices.len() as i64;
        if len == 0 {
            return 0;
        }
        let offset = j - self.start;
        if (0..len).contains(&offset) {
            self.choices[offset as usize]
        } else {
            match self.extension {
                Extension::ConstantZero => 0,
                Extension::Periodic => self.choices[offset.rem_euclid(len) as usize],
            }
        }
    }

    /// Inclusive window bounds, None when the window is empty.
    pub fn window(&self) -> Option<(i64, i64)> {
        if self.choices.is_empty() {
            None
        } else {
            Some((self.start, self.start + self.choices.len() as i64 - 1))
        }
    }

    pub fn choices(&self) -> &[u32] {
        &self.choices
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    /// Period of j ↦ ℓ_j when the assignment is periodic over all of ℤ.
    /// A windowed pattern with an empty window degenerates to constant 0.
    pub fn period(&self) -> Option<usize> {
        match self.extension {
            Extension::Periodic => Some(self.choices.len()),
            Extension::ConstantZero => {
                if self.choices.is_empty() || self.choices.iter().all(|&l| l == 0) {
                    Some(1)
                } else {
                    None
                }
            }
        }
    }

    pub(crate) fn validate_for(&self, n: u32) -> Result<()> {
        if let Some(&bad) = self.choices.iter().find(|&&l| l >= n) {
            return Err(FrameError::invalid(
                "pattern",
                format!("family index {bad} out of range for weaving order {n}"),
            ));
        }
        Ok(())
    }
}

/// Effective scale-index window for a γ range, with a bound on the discarded
/// upper tail. Indices below `j_min_eff` contribute exactly zero on the
/// range; the contribution of indices above `j_max_eff` is at most
/// `tail_bound` for every admissible pattern.
#[derive(Clone, Copy, Debug)]
pub struct TruncationPlan {
    pub j_min_eff: i64,
    pub j_max_eff: i64,
    pub tail_bound: f64,
}

const MAX_EFFECTIVE_TERMS: i64 = 2_000_000;

/// Uniform lower bound for the multiplier of any admissible pattern, derived
/// from the envelope: one scale always lands with γ/λ in [u·a^(1-2N), u].
fn multiplier_floor(gen: &WaveletGenerator, params: &SystemParams) -> f64 {
    let env = gen.envelope();
    let ratio = env.u_radius * params.a.powi(1 - 2 * params.n as i32);
    env.c_lower * env.c_lower * ratio.powf(2.0 * env.beta) / params.b
}

/// Compute the effective j window for sweeping γ in `gamma_range` (positive
/// values). The plan is valid for every pattern because λ_j is bracketed by
/// a^(N·j) and a^(N·j + N - 1) regardless of the family choices.
pub fn truncation_level(
    gen: &WaveletGenerator,
    params: &SystemParams,
    gamma_range: (f64, f64),
) -> Result<TruncationPlan> {
    truncation_level_with(gen, params, gamma_range, DEFAULT_TAIL_REL)
}

pub fn truncation_level_with(
    gen: &WaveletGenerator,
    params: &SystemParams,
    gamma_range: (f64, f64),
    tail_rel: f64,
) -> Result<TruncationPlan> {
    let (lo, hi) = gamma_range;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi >= lo) {
        return Err(FrameError::invalid(
            "gamma_range",
            format!("need 0 < lo <= hi < inf, got [{lo}, {hi}]"),
        ));
    }
    let a = params.a;
    let nf = params.n as f64;
    let support_hi = gen.support().hi;

    // Below j_min_eff even the largest family scale keeps γ/λ beyond the
    // support, so dropped low terms are identically zero.
    let j_min_eff = (((lo / support_hi).ln() / a.ln() - (nf - 1.0)) / nf).floor() as i64 - 1;

    let (j_max_eff, tail_bound) = if gen.support_min_abs() > 0.0 {
        // Support bounded away from 0: high terms vanish exactly once
        // γ/λ drops below the inner support edge.
        let j = ((hi / gen.support_min_abs()).ln() / (nf * a.ln())).ceil() as i64 + 1;
        (j, 0.0)
    } else {
        if !gen.envelope_ok() {
            return Err(FrameError::EnvelopeInvalid(
                "support reaches 0 and the envelope claim failed; the upper \
                 scale tail cannot be bounded"
                    .into(),
            ));
        }
        let env = gen.envelope();
        let q = a.powf(-2.0 * env.alpha * nf);
        let target = tail_rel * multiplier_floor(gen, params);
        // From j_env on, γ/λ_j stays inside the envelope region for the
        // whole range; each further step shrinks the geometric tail by q.
        let j_env = ((hi / env.u_radius).ln() / (nf * a.ln())).ceil() as i64;
        let tail_at = |j: i64| {
            let lead = env.d_upper * env.d_upper * hi.powf(2.0 * env.alpha) / params.b;
            lead * a.powf(-2.0 * env.alpha * nf * (j + 1) as f64) / (1.0 - q)
        };
        let mut j = j_env;
        while tail_at(j) > target && j - j_env < 4_000 {
            j += 1;
        }
        (j, tail_at(j))
    };

    if j_max_eff - j_min_eff > MAX_EFFECTIVE_TERMS {
        return Err(FrameError::invalid(
            "gamma_range",
            format!(
                "effective scale window [{j_min_eff}, {j_max_eff}] is too large; \
                 the dilation base is too close to 1 for this range"
            ),
        ));
    }
    Ok(TruncationPlan {
        j_min_eff,
        j_max_eff,
        tail_bound,
    })
}

/// Pointwise multiplier evaluator over a fixed effective scale window.
pub(crate) enum MultiplierEval<'a> {
    /// Power-law profiles reduce to γ^(2α) times a suffix sum of λ^(-2α)
    /// over the scales that keep γ inside the support.
    PowerLaw {
        lambdas: Vec<f64>,
        suffix: Vec<f64>,
        cutoff: f64,
        two_alpha: f64,
        inv_b: f64,
    },
    Generic {
        gen: &'a WaveletGenerator,
        lambdas: Vec<f64>,
        inv_b: f64,
    },
}

impl<'a> MultiplierEval<'a> {
    pub(crate) fn build(
        gen: &'a WaveletGenerator,
        params: &SystemParams,
        pattern: &WeavingPattern,
        plan: &TruncationPlan,
    ) -> Self {
        let lambdas: Vec<f64> = (plan.j_min_eff..=plan.j_max_eff)
            .map(|j| params.scale(j, pattern.ell_at(j)))
            .collect();
        let inv_b = 1.0 / params.b;
        match gen.power_law_shape() {
            Some((alpha, cutoff)) => {
                let two_alpha = 2.0 * alpha;
                let mut suffix = vec![0.0; lambdas.len() + 1];
                for i in (0..lambdas.len()).rev() {
                    suffix[i] = suffix[i + 1] + lambdas[i].powf(-two_alpha);
                }
                MultiplierEval::PowerLaw {
                    lambdas,
                    suffix,
                    cutoff,
                    two_alpha,
                    inv_b,
                }
            }
            None => MultiplierEval::Generic {
                gen,
                lambdas,
                inv_b,
            },
        }
    }

    /// m(γ) for γ > 0, truncated to the plan window.
    pub(crate) fn eval(&self, gamma: f64) -> f64 {
        match self {
            MultiplierEval::PowerLaw {
                lambdas,
                suffix,
                cutoff,
                two_alpha,
                inv_b,
            } => {
                let idx = lambdas.partition_point(|&l| l * cutoff < gamma);
                inv_b * gamma.powf(*two_alpha) * suffix[idx]
            }
            MultiplierEval::Generic {
                gen,
                lambdas,
                inv_b,
            } => {
                let mut sum = 0.0;
                for &l in lambdas {
                    let v = gen.eval_freq(gamma / l);
                    sum += v * v;
                }
                inv_b * sum
            }
        }
    }
}

/// Truncated multiplier value m(γ) of the woven system given by `pattern`.
pub fn multiplier(
    gen: &WaveletGenerator,
    params: &SystemParams,
    pattern: &WeavingPattern,
    gamma: f64,
) -> Result<f64> {
    pattern.validate_for(params.n)?;
    if !gamma.is_finite() {
        return Err(FrameError::invalid("gamma", format!("got {gamma}")));
    }
    if gamma == 0.0 {
        if gen.eval_freq(0.0) != 0.0 {
            return Err(FrameError::EnvelopeInvalid(
                "profile does not vanish at 0; the multiplier diverges there".into(),
            ));
        }
        return Ok(0.0);
    }
    let g = gamma.abs(); // profiles are even
    let plan = truncation_level(gen, params, (g, g))?;
    let eval = MultiplierEval::build(gen, params, pattern, &plan);
    Ok(eval.eval(g))
}

/// Multiplier of an explicit finite scale list, with no lattice structure
/// assumed and therefore no truncation or periodicity to exploit.
pub fn multiplier_for_scales(gen: &WaveletGenerator, b: f64, scales: &[f64], gamma: f64) -> f64 {
    let mut sum = 0.0;
    for &l in scales {
        let v = gen.eval_freq(gamma / l);
        sum += v * v;
    }
    sum / b
}

/// Σ_{0<|k|≤k_max} Σ_{j in window} |ψ̂(γ/λ_j) · ψ̂(γ/λ_j + k/b)|.
///
/// In the painless regime every product vanishes for almost every γ because
/// the two supports cannot overlap once |k|/b reaches the support width; the
/// sum is the quantity whose vanishing makes the multiplier description of
/// the frame operator exact.
pub fn cross_term_sum(
    gen: &WaveletGenerator,
    params: &SystemParams,
    pattern: &WeavingPattern,
    gamma: f64,
    k_max: usize,
) -> f64 {
    let Some((j_lo, j_hi)) = pattern.window() else {
        return 0.0;
    };
    let mut sum = 0.0;
    for j in j_lo..=j_hi {
        let lambda = params.scale(j, pattern.ell_at(j));
        let x = gamma / lambda;
        let base = gen.eval_freq(x);
        if base == 0.0 {
            continue;
        }
        for k in 1..=k_max as i64 {
            let shift = k as f64 / params.b;
            sum += (base * gen.eval_freq(x + shift)).abs();
            sum += (base * gen.eval_freq(x - shift)).abs();
        }
    }
    sum
}

/// Closed-form bounds and the integer constants they are built from.
#[derive(Clone, Copy, Debug)]
pub struct AnalyticBounds {
    pub lower: f64,
    pub upper: f64,
    pub j_const: i64,
    pub k_const: i64,
}

/// Envelope-based frame bounds, valid for every admissible pattern.
///
/// J is the largest integer with [a^(N(J-1)), a^(NJ)] inside the envelope
/// region, K the smallest positive integer pushing that block (shifted by K
/// periods) clear of the support. Closed intervals are used for the
/// disjointness test, which can only make K larger and the upper bound
/// safer.
pub fn analytic_bounds(gen: &WaveletGenerator, params: &SystemParams) -> Result<AnalyticBounds> {
    params.require_painless(gen)?;
    if !gen.envelope_ok() {
        return Err(FrameError::EnvelopeInvalid(
            "analytic bounds need a validated envelope".into(),
        ));
    }
    let env = gen.envelope();
    let a = params.a;
    let nf = params.n as f64;
    let u = env.u_radius;
    if !(u.is_finite() && u > 0.0) {
        return Err(FrameError::invalid("u_radius", "degenerate envelope region"));
    }

    // Largest J with a^(N·J) ≤ u, then fix up the float log at boundaries.
    let mut j = (u.ln() / (nf * a.ln())).floor() as i64;
    while a.powf(nf * (j + 1) as f64) <= u {
        j += 1;
    }
    while a.powf(nf * j as f64) > u {
        j -= 1;
    }

    // Smallest positive K with a^(N(J-1+K)) strictly beyond the support.
    let support_hi = gen.support().hi;
    let mut k = 1i64;
    while a.powf(nf * (j - 1 + k) as f64) <= support_hi {
        k += 1;
        if k > 10_000 {
            return Err(FrameError::invalid(
                "k_const",
                "no block separation found; support and envelope region are inconsistent",
            ));
        }
    }

    let inv_b = 1.0 / params.b;
    let c2 = env.c_lower * env.c_lower;
    let d2 = env.d_upper * env.d_upper;
    let lower = inv_b * c2 * a.powf(-2.0 * env.beta * nf)
        / a.powf(2.0 * env.beta * (nf - 1.0 - nf * j as f64));
    let geo = d2 * a.powf(2.0 * env.alpha * nf * j as f64)
        / (1.0 - a.powf(-2.0 * env.alpha * nf));
    let upper = inv_b * (geo + k as f64 * gen.sup_norm() * gen.sup_norm());
    Ok(AnalyticBounds {
        lower,
        upper,
        j_const: j,
        k_const: k,
    })
}

/// γ grid on which a certificate was computed.
#[derive(Clone, Copy, Debug)]
pub struct GridInfo {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub log_spaced: bool,
}

/// Numeric frame-bound certificate, optionally decorated with analytic and
/// weaving bounds for the same system.
#[derive(Clone, Debug)]
pub struct BoundsCertificate {
    pub a_num: f64,
    pub b_num: f64,
    pub a_analytic: Option<f64>,
    pub b_analytic: Option<f64>,
    pub j_const: Option<i64>,
    pub k_const: Option<i64>,
    pub l_weave: Option<f64>,
    pub u_weave: Option<f64>,
    pub grid: GridInfo,
    pub tail_bound: f64,
    pub arg_inf: f64,
    pub arg_sup: f64,
    /// False when the numeric lower bound is indistinguishable from the
    /// truncation tail, i.e. the system could fail to be a frame.
    pub certified: bool,
    /// True when only part of the axis was swept (windowed Gabor patterns).
    pub partial_window: bool,
}

/// Numeric frame bounds of the woven system given by `pattern`.
pub fn frame_bounds(
    gen: &WaveletGenerator,
    params: &SystemParams,
    pattern: &WeavingPattern,
    grid_points: usize,
) -> Result<BoundsCertificate> {
    frame_bounds_with(
        gen,
        params,
        pattern,
        &SweepSettings::with_grid(grid_points),
    )
}

pub fn frame_bounds_with(
    gen: &WaveletGenerator,
    params: &SystemParams,
    pattern: &WeavingPattern,
    settings: &SweepSettings,
) -> Result<BoundsCertificate> {
    pattern.validate_for(params.n)?;
    params.require_painless(gen)?;
    if settings.points_per_period < 16 {
        return Err(FrameError::invalid(
            "grid_points",
            "need at least 16 points per period",
        ));
    }

    let mut cert = match pattern.period() {
        Some(p) => periodic_bounds(gen, params, pattern, p, settings)?,
        None => windowed_bounds(gen, params, pattern, settings)?,
    };

    if gen.envelope_ok() {
        let analytic = analytic_bounds(gen, params)?;
        cert.a_analytic = Some(analytic.lower);
        cert.b_analytic = Some(analytic.upper);
        cert.j_const = Some(analytic.j_const);
        cert.k_const = Some(analytic.k_const);
    }
    cert.certified = cert.a_num > cert.tail_bound;
    Ok(cert)
}

/// The multiplier of a pattern with period p satisfies m(a^(N·p) γ) = m(γ),
/// so one multiplicative block starting at γ = 1 determines the bounds.
fn periodic_bounds(
    gen: &WaveletGenerator,
    params: &SystemParams,
    pattern: &WeavingPattern,
    p: usize,
    settings: &SweepSettings,
) -> Result<BoundsCertificate> {
    let hi = params.block_ratio().powi(p as i32);
    let plan = truncation_level_with(gen, params, (1.0, hi), settings.tail_rel)?;
    let eval = MultiplierEval::build(gen, params, pattern, &plan);
    let points = settings
        .points_per_period
        .checked_mul(p)
        .filter(|&n| n <= 10_000_000)
        .ok_or_else(|| FrameError::invalid("grid_points", "sweep grid too large"))?;
    let grid = LogGrid::span(1.0, hi, points);
    let out = sweep_log(&|g| eval.eval(g), &grid, settings.refine_points);
    Ok(BoundsCertificate {
        a_num: out.inf.value,
        b_num: out.sup.value,
        a_analytic: None,
        b_analytic: None,
        j_const: None,
        k_const: None,
        l_weave: None,
        u_weave: None,
        grid: GridInfo {
            lo: 1.0,
            hi,
            points,
            log_spaced: true,
        },
        tail_bound: plan.tail_bound,
        arg_inf: out.inf.location,
        arg_sup: out.sup.location,
        certified: false,
        partial_window: false,
    })
}

/// Windowed patterns with zero extension are not periodic: the multiplier
/// agrees exactly with the constant-0 system far above the window and
/// approaches it from below with a computable defect far beneath it. The
/// bounds combine a sweep of the window-influenced range with the periodic
/// constant-0 certificate, the defect folded into the tail.
fn windowed_bounds(
    gen: &WaveletGenerator,
    params: &SystemParams,
    pattern: &WeavingPattern,
    settings: &SweepSettings,
) -> Result<BoundsCertificate> {
    let (j_lo, j_hi) = pattern
        .window()
        .expect("non-periodic pattern has a non-empty window");
    let base = periodic_bounds(gen, params, &WeavingPattern::constant(0), 1, settings)?;

    let a = params.a;
    let nf = params.n as f64;
    let block = params.block_ratio();
    let gamma_top = gen.support().hi * a.powf(nf * (j_hi + 2) as f64);

    // Pick the sweep floor so that below it the window's own terms are
    // either exactly zero or bounded by `defect`.
    let anchor = a.powf(nf * j_lo as f64);
    let (gamma_bot, defect) = if gen.support_min_abs() > 0.0 {
        (gen.support_min_abs() * anchor / block, 0.0)
    } else {
        let env = gen.envelope();
        let q = a.powf(-2.0 * env.alpha * nf);
        let target = settings.tail_rel * multiplier_floor(gen, params);
        let ratio = (target * params.b * (1.0 - q) / (env.d_upper * env.d_upper))
            .powf(1.0 / (2.0 * env.alpha))
            .min(env.u_radius / block);
        let bot = anchor * ratio;
        let defect =
            env.d_upper * env.d_upper * ratio.powf(2.0 * env.alpha) / (params.b * (1.0 - q));
        (bot, defect)
    };

    let plan = truncation_level_with(gen, params, (gamma_bot, gamma_top), settings.tail_rel)?;
    let eval = MultiplierEval::build(gen, params, pattern, &plan);
    let periods = ((gamma_top / gamma_bot).ln() / block.ln()).ceil().max(1.0) as usize;
    let points = settings
        .points_per_period
        .checked_mul(periods)
        .filter(|&n| n <= 10_000_000)
        .ok_or_else(|| FrameError::invalid("grid_points", "sweep grid too large"))?;
    let grid = LogGrid::span(gamma_bot, gamma_top, points);
    let out = sweep_log(&|g| eval.eval(g), &grid, settings.refine_points);

    let base_floor = base.a_num - defect;
    let (a_num, arg_inf) = if out.inf.value <= base_floor {
        (out.inf.value, out.inf.location)
    } else {
        (base_floor, base.arg_inf)
    };
    let (b_num, arg_sup) = if out.sup.value >= base.b_num {
        (out.sup.value, out.sup.location)
    } else {
        (base.b_num, base.arg_sup)
    };
    Ok(BoundsCertificate {
        a_num,
        b_num,
        a_analytic: None,
        b_analytic: None,
        j_const: None,
        k_const: None,
        l_weave: None,
        u_weave: None,
        grid: GridInfo {
            lo: gamma_bot,
            hi: gamma_top,
            points,
            log_spaced: true,
        },
        tail_bound: plan.tail_bound.max(base.tail_bound) + defect,
        arg_inf,
        arg_sup,
        certified: false,
        partial_window: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn powerlaw() -> WaveletGenerator {
        WaveletGenerator::power_law(0.5, 1.0).unwrap()
    }

    fn params(a: f64, b: f64, n: u32) -> SystemParams {
        SystemParams::new(a, b, n).unwrap()
    }

    #[test]
    fn admissible_step_is_reciprocal_support_width() {
        assert_eq!(admissible_b(&powerlaw()), 0.5);
        let wide = WaveletGenerator::power_law(1.0, 2.0).unwrap();
        assert_eq!(admissible_b(&wide), 0.25);
        let narrow = WaveletGenerator::even_bands(
            vec![crate::generators::Band {
                lo: 0.0,
                hi: 0.5,
                value: 1.0,
            }],
            crate::generators::Envelope {
                c_lower: 1.0,
                d_upper: 1.0,
                alpha: 1.0,
                beta: 1.0,
                u_radius: 0.5,
            },
        )
        .unwrap();
        assert_eq!(admissible_b(&narrow), 1.0);
    }

    #[test]
    fn params_validation() {
        assert!(SystemParams::new(1.0, 0.5, 1).is_err());
        assert!(SystemParams::new(2.0, 0.0, 1).is_err());
        assert!(SystemParams::new(2.0, 0.5, 0).is_err());
        assert!(SystemParams::new(f64::INFINITY, 0.5, 1).is_err());
        let p = params(2.0, 0.5, 2);
        assert_eq!(p.block_ratio(), 4.0);
        assert_eq!(p.scale(1, 1), 8.0);
        assert_eq!(p.scale(-1, 0), 0.25);
    }

    #[test]
    fn pattern_indexing_and_extensions() {
        let c = WeavingPattern::constant(3);
        assert_eq!(c.ell_at(-7), 3);
        assert_eq!(c.ell_at(11), 3);
        assert_eq!(c.period(), Some(1));

        let w = WeavingPattern::windowed(-1, vec![2, 0, 1]);
        assert_eq!(w.ell_at(-2), 0, "zero extension to the left");
        assert_eq!(w.ell_at(-1), 2);
        assert_eq!(w.ell_at(1), 1);
        assert_eq!(w.ell_at(2), 0, "zero extension to the right");
        assert_eq!(w.period(), None);
        assert_eq!(w.window(), Some((-1, 1)));

        let p = WeavingPattern::periodic(0, vec![0, 1]).unwrap();
        assert_eq!(p.ell_at(-1), 1);
        assert_eq!(p.ell_at(4), 0);
        assert_eq!(p.period(), Some(2));
        assert!(WeavingPattern::periodic(0, vec![]).is_err());

        let empty = WeavingPattern::windowed(5, vec![]);
        assert_eq!(empty.period(), Some(1), "empty window is the constant-0 pattern");
        assert_eq!(empty.ell_at(5), 0);

        let bad = WeavingPattern::constant(2);
        assert!(bad.validate_for(2).is_err());
        assert!(bad.validate_for(3).is_ok());
    }

    #[test]
    fn multiplier_matches_hand_values() {
        // Base system a = 2, b = 1/2, N = 1: m(γ) = 4t with
        // t = |γ|·2^(-ceil(log2|γ|)) in (1/2, 1].
        let gen = powerlaw();
        let p = params(2.0, 0.5, 1);
        let c0 = WeavingPattern::constant(0);
        let m = multiplier(&gen, &p, &c0, 0.75).unwrap();
        assert!((m - 3.0).abs() < 1e-12, "m(0.75) = {m}");
        let m1 = multiplier(&gen, &p, &c0, 1.0).unwrap();
        assert!((m1 - 4.0).abs() < 1e-12);
        assert_eq!(multiplier(&gen, &p, &c0, 0.0).unwrap(), 0.0);
        let even = multiplier(&gen, &p, &c0, -0.75).unwrap();
        assert_eq!(even, m);

        // N = 2 block lattice: m(γ) = (8/3)t with t in (1/4, 1].
        let p2 = params(2.0, 0.5, 2);
        let m2 = multiplier(&gen, &p2, &c0, 1.0).unwrap();
        assert!((m2 - 8.0 / 3.0).abs() < 1e-12, "m2(1) = {m2}");
    }

    #[test]
    fn multiplier_is_block_periodic() {
        let gen = powerlaw();
        let p = params(2.0, 0.5, 2);
        let pat = WeavingPattern::periodic(0, vec![0, 1, 1]).unwrap();
        let block = p.block_ratio().powi(3);
        for &g in &[0.37, 1.1, 2.9, 3.99] {
            let m = multiplier(&gen, &p, &pat, g).unwrap();
            let shifted = multiplier(&gen, &p, &pat, g * block).unwrap();
            assert!(
                (m - shifted).abs() <= 1e-12 * m.max(1.0),
                "period broken at {g}: {m} vs {shifted}"
            );
        }
    }

    #[test]
    fn fast_and_generic_paths_agree() {
        let gen = powerlaw();
        let p = params(2.0, 0.5, 2);
        let pat = WeavingPattern::windowed(-3, vec![1, 0, 1, 1, 0]);
        for &g in &[0.013, 0.4, 1.0, 5.7, 31.0, 250.0] {
            let plan = truncation_level(&gen, &p, (g, g)).unwrap();
            let fast = MultiplierEval::build(&gen, &p, &pat, &plan);
            let scales: Vec<f64> = (plan.j_min_eff..=plan.j_max_eff)
                .map(|j| p.scale(j, pat.ell_at(j)))
                .collect();
            let slow = multiplier_for_scales(&gen, p.translation_step(), &scales, g);
            let f = fast.eval(g);
            assert!(
                (f - slow).abs() <= 1e-12 * slow.max(1e-300),
                "mismatch at {g}: {f} vs {slow}"
            );
        }
    }

    #[test]
    fn truncation_discards_only_negligible_mass() {
        let gen = powerlaw();
        let p = params(2.0, 0.5, 1);
        let plan = truncation_level(&gen, &p, (1.0, 2.0)).unwrap();
        assert!(plan.tail_bound > 0.0);
        assert!(plan.tail_bound < 1e-11, "tail {}", plan.tail_bound);
        // Terms below the window are exactly zero at γ in the range.
        let lam = p.scale(plan.j_min_eff - 1, 0);
        assert_eq!(gen.eval_freq(1.0 / lam), 0.0);

        // Widening the high end by 10 shrinks the reported tail by the
        // geometric factor a^(-2αN·10) = 2^(-10).
        let env = gen.envelope();
        let q = p.dilation().powf(-2.0 * env.alpha * 1.0);
        let t0 = plan.tail_bound;
        let widened = env.d_upper * env.d_upper * 2.0f64.powf(2.0 * env.alpha) / p.translation_step()
            * p.dilation()
                .powf(-2.0 * env.alpha * (plan.j_max_eff + 11) as f64)
            / (1.0 - q);
        assert!((widened / t0 - 2.0f64.powi(-10)).abs() < 1e-12);
    }

    #[test]
    fn truncation_rejects_degenerate_ranges() {
        let gen = powerlaw();
        let p = params(2.0, 0.5, 1);
        assert!(truncation_level(&gen, &p, (0.0, 0.0)).is_err());
        assert!(truncation_level(&gen, &p, (-1.0, 1.0)).is_err());
        assert!(truncation_level(&gen, &p, (2.0, 1.0)).is_err());
    }

    #[test]
    fn truncation_without_envelope_needs_separated_support() {
        // Band profile away from 0: exact truncation, no envelope needed.
        let bands = WaveletGenerator::even_bands(
            vec![crate::generators::Band {
                lo: 0.5,
                hi: 1.0,
                value: 1.0,
            }],
            crate::generators::Envelope {
                c_lower: 1.0,
                d_upper: 1.0,
                alpha: 0.5,
                beta: 0.5,
                u_radius: 1.0,
            },
        )
        .unwrap();
        let p = params(2.0, 0.5, 1);
        let plan = truncation_level(&bands, &p, (1.0, 2.0)).unwrap();
        assert_eq!(plan.tail_bound, 0.0);
        let above = bands.eval_freq(1.0 / p.scale(plan.j_max_eff + 1, 0));
        assert_eq!(above, 0.0);
    }

    #[test]
    fn cross_terms_vanish_in_the_painless_regime() {
        let gen = powerlaw();
        let p = params(2.0, 0.5, 1);
        let pat = WeavingPattern::windowed(-10, vec![0; 21]);
        assert_eq!(cross_term_sum(&gen, &p, &pat, 0.7, 10), 0.0);
        assert_eq!(cross_term_sum(&gen, &p, &pat, -3.11, 10), 0.0);
        // At γ equal to a scale the supports touch at a single point; this
        // is the measure-zero exception to the vanishing.
        assert!(cross_term_sum(&gen, &p, &pat, 1.0, 10) > 0.0);
    }

    #[test]
    fn cross_terms_appear_past_the_painless_limit() {
        let gen = powerlaw();
        let p = params(2.0, 1.5, 2);
        let pat = WeavingPattern::windowed(-10, vec![0; 21]);
        let s = cross_term_sum(&gen, &p, &pat, 0.5, 10);
        assert!(s > 0.0, "expected overlap at b = 1.5, got {s}");
    }

    #[test]
    fn analytic_bounds_match_hand_computation() {
        let gen = powerlaw();
        // N = 2: J = 0 ([1/4, 1] inside the region), K = 2 (the closed
        // block [1, 4] still touches the support at 1).
        let p2 = params(2.0, 0.5, 2);
        let ab = analytic_bounds(&gen, &p2).unwrap();
        assert_eq!(ab.j_const, 0);
        assert_eq!(ab.k_const, 2);
        assert!((ab.lower - 0.25).abs() < 1e-12, "lower {}", ab.lower);
        assert!((ab.upper - 20.0 / 3.0).abs() < 1e-12, "upper {}", ab.upper);

        let p1 = params(2.0, 0.5, 1);
        let ab1 = analytic_bounds(&gen, &p1).unwrap();
        assert_eq!(ab1.j_const, 0);
        assert_eq!(ab1.k_const, 2);
        assert!((ab1.lower - 1.0).abs() < 1e-12);
        assert!((ab1.upper - 8.0).abs() < 1e-12);
    }

    #[test]
    fn analytic_bounds_require_painless_and_envelope() {
        let gen = powerlaw();
        let loose = params(2.0, 0.75, 1);
        assert!(matches!(
            analytic_bounds(&gen, &loose),
            Err(FrameError::PainlessViolated { .. })
        ));
        let claimed = gen
            .clone()
            .with_envelope(crate::generators::Envelope {
                c_lower: 2.0,
                d_upper: 1.0,
                alpha: 0.5,
                beta: 0.5,
                u_radius: 1.0,
            })
            .unwrap();
        assert!(matches!(
            analytic_bounds(&claimed, &params(2.0, 0.5, 1)),
            Err(FrameError::EnvelopeInvalid(_))
        ));
    }

    #[test]
    fn base_bounds_hit_the_closed_form() {
        let gen = powerlaw();
        let cert = frame_bounds(&gen, &params(2.0, 0.5, 1), &WeavingPattern::constant(0), 4096)
            .unwrap();
        assert!((cert.a_num - 2.0).abs() < 1e-3, "A = {}", cert.a_num);
        assert!((cert.b_num - 4.0).abs() < 1e-3, "B = {}", cert.b_num);
        assert!(cert.certified);
        assert!(cert.tail_bound < 1e-11 * cert.a_num.max(1.0));
        assert_eq!(cert.j_const, Some(0));
        // The numeric window sits inside the analytic envelope bounds.
        assert!(cert.a_analytic.unwrap() <= cert.a_num + 1e-9);
        assert!(cert.b_num <= cert.b_analytic.unwrap() + 1e-9);
    }

    #[test]
    fn block_lattice_bounds_hit_the_closed_form() {
        let gen = powerlaw();
        let cert = frame_bounds(&gen, &params(2.0, 0.5, 2), &WeavingPattern::constant(0), 4096)
            .unwrap();
        assert!((cert.a_num - 2.0 / 3.0).abs() < 1e-3, "A = {}", cert.a_num);
        assert!((cert.b_num - 8.0 / 3.0).abs() < 1e-3, "B = {}", cert.b_num);
    }

    #[test]
    fn same_lattice_two_descriptions_same_certificate() {
        // a = 4 with N = 1 and a = 2 with N = 2 (family 0) generate the same
        // scales, so the certificates must coincide.
        let gen = powerlaw();
        let one = frame_bounds(&gen, &params(4.0, 0.5, 1), &WeavingPattern::constant(0), 2048)
            .unwrap();
        let two = frame_bounds(&gen, &params(2.0, 0.5, 2), &WeavingPattern::constant(0), 2048)
            .unwrap();
        assert_eq!(one.a_num, two.a_num);
        assert_eq!(one.b_num, two.b_num);
    }

    #[test]
    fn constant_family_shift_does_not_move_bounds() {
        // The family-c system is a unitary dilation image of family 0.
        let gen = powerlaw();
        let p = params(2.0, 0.5, 2);
        let c0 = frame_bounds(&gen, &p, &WeavingPattern::constant(0), 4096).unwrap();
        let c1 = frame_bounds(&gen, &p, &WeavingPattern::constant(1), 4096).unwrap();
        assert!((c0.a_num - c1.a_num).abs() < 1e-6);
        assert!((c0.b_num - c1.b_num).abs() < 1e-6);
    }

    #[test]
    fn windowed_pattern_bounds_cover_the_asymptotic_regime() {
        let gen = powerlaw();
        let p = params(2.0, 0.5, 2);
        // Pattern differs from constant 0 only on a window; far away the
        // system is the base one, so bounds cannot beat the base bounds.
        let pat = WeavingPattern::windowed(-2, vec![1, 1, 1, 1, 1]);
        let cert = frame_bounds(&gen, &p, &pat, 1024).unwrap();
        let base = frame_bounds(&gen, &p, &WeavingPattern::constant(0), 1024).unwrap();
        assert!(cert.a_num <= base.a_num + 1e-9);
        assert!(cert.b_num >= base.b_num - 1e-9);
        assert!(cert.certified);
    }

    #[test]
    fn gapped_band_system_is_not_certified() {
        // Bands on [1/2, 1) with the N = 2 lattice leave spectral gaps, so
        // the infimum is genuinely zero: reported, not thrown.
        let bands = WaveletGenerator::even_bands(
            vec![crate::generators::Band {
                lo: 0.5,
                hi: 1.0,
                value: 1.0,
            }],
            crate::generators::Envelope {
                c_lower: 1.0,
                d_upper: 1.0,
                alpha: 0.5,
                beta: 0.5,
                u_radius: 1.0,
            },
        )
        .unwrap();
        let cert = frame_bounds(&bands, &params(2.0, 0.5, 2), &WeavingPattern::constant(0), 512)
            .unwrap();
        assert_eq!(cert.a_num, 0.0);
        assert!(!cert.certified);
        assert!(cert.a_analytic.is_none());
    }

    #[test]
    fn shannon_style_band_tiling_is_tight() {
        // [1/2, 1) bands on the N = 1 dyadic lattice tile the positive axis
        // exactly once: m ≡ 1/b.
        let bands = WaveletGenerator::even_bands(
            vec![crate::generators::Band {
                lo: 0.5,
                hi: 1.0,
                value: 1.0,
            }],
            crate::generators::Envelope {
                c_lower: 1.0,
                d_upper: 1.0,
                alpha: 0.5,
                beta: 0.5,
                u_radius: 1.0,
            },
        )
        .unwrap();
        let cert = frame_bounds(&bands, &params(2.0, 0.5, 1), &WeavingPattern::constant(0), 512)
            .unwrap();
        assert_eq!(cert.a_num, 2.0);
        assert_eq!(cert.b_num, 2.0);
        assert!(cert.certified);
        assert_eq!(cert.tail_bound, 0.0);
    }

    #[test]
    fn painless_violation_is_rejected() {
        let gen = powerlaw();
        let err = frame_bounds(
            &gen,
            &params(2.0, 0.51, 1),
            &WeavingPattern::constant(0),
            256,
        );
        assert!(matches!(err, Err(FrameError::PainlessViolated { .. })));
    }
}
