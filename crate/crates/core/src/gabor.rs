//! Time-side analogue of the dilation machinery for regular Gabor systems.
//!
//! The window g sits at translate nodes γ_n = n·N·a + ℓ_n·a and carries all
//! modulations e^(2πimbx). With b ≤ 1/|supp g| the frame operator is
//! multiplication by m(x) = (1/b) Σ_n |g(x - γ_n)|², a finite sum at every
//! x, so bounds are exact sweeps with zero truncation tail. Weaving over
//! the N translate families reuses the pointwise min/max envelope exchange
//! from the dilation case.

use crate::error::{FrameError, Result};
use crate::frame_core::{
    BoundsCertificate, Extension, GridInfo, SweepSettings, WeavingPattern,
};
use crate::generators::GaborGenerator;
use crate::sweep::{sweep_uniform, UniformGrid};
use crate::weaving::WeaveCertificate;

/// Gabor system with one family choice per translate block.
///
/// Nodes γ_n = n·N·a + ℓ_n·a are strictly increasing in n because the
/// family offset never reaches the block length N·a. A periodic pattern
/// places a node in every block; a windowed pattern truncates the system
/// to the window's blocks, leaving gaps elsewhere.
#[derive(Clone, Debug)]
pub struct GaborSystem {
    gen: GaborGenerator,
    a: f64,
    b: f64,
    n: u32,
    pattern: WeavingPattern,
}

impl GaborSystem {
    pub fn new(
        gen: GaborGenerator,
        a: f64,
        b: f64,
        n: u32,
        pattern: WeavingPattern,
    ) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(FrameError::invalid(
                "a",
                format!("translation step must be positive, got {a}"),
            ));
        }
        if !(b.is_finite() && b > 0.0) {
            return Err(FrameError::invalid(
                "b",
                format!("modulation step must be positive, got {b}"),
            ));
        }
        if n == 0 {
            return Err(FrameError::invalid("n", "weaving order must be at least 1"));
        }
        pattern.validate_for(n)?;
        Ok(GaborSystem {
            gen,
            a,
            b,
            n,
            pattern,
        })
    }

    pub fn generator(&self) -> &GaborGenerator {
        &self.gen
    }

    pub fn translation_step(&self) -> f64 {
        self.a
    }

    pub fn modulation_step(&self) -> f64 {
        self.b
    }

    pub fn weaving_order(&self) -> u32 {
        self.n
    }

    pub fn pattern(&self) -> &WeavingPattern {
        &self.pattern
    }

    /// Length N·a of one translate block.
    pub fn block_length(&self) -> f64 {
        self.n as f64 * self.a
    }

    /// Node position of translate index n under the pattern.
    pub fn node(&self, idx: i64) -> f64 {
        idx as f64 * self.block_length() + self.pattern.ell_at(idx) as f64 * self.a
    }

    /// True when the index contributes a translate at all: windowed
    /// patterns keep only the window's blocks.
    fn index_active(&self, idx: i64) -> bool {
        match self.pattern.extension() {
            Extension::Periodic => true,
            Extension::ConstantZero => match self.pattern.window() {
                Some((lo, hi)) => (lo..=hi).contains(&idx),
                None => true, // empty window degenerates to the base system
            },
        }
    }

    pub fn is_painless(&self) -> bool {
        self.b <= 1.0 / self.gen.support_width()
    }

    fn require_painless(&self) -> Result<()> {
        let limit = 1.0 / self.gen.support_width();
        if self.b > limit {
            return Err(FrameError::PainlessViolated { b: self.b, limit });
        }
        Ok(())
    }

    /// Candidate index range whose node could reach x for any family.
    fn index_span(&self, x: f64) -> (i64, i64) {
        let block = self.block_length();
        let reach = self.gen.support_width() + (self.n - 1) as f64 * self.a;
        let lo = ((x - reach) / block).floor() as i64 - 1;
        let hi = (x / block).floor() as i64 + 1;
        (lo, hi)
    }

    fn tile_sum(&self, x: f64) -> f64 {
        let (lo, hi) = self.index_span(x);
        let mut sum = 0.0;
        for idx in lo..=hi {
            if !self.index_active(idx) {
                continue;
            }
            let v = self.gen.eval_time(x - self.node(idx));
            sum += v * v;
        }
        sum
    }
}

/// (1/b) Σ_n |g(x - γ_n)|². Finitely many nodes reach any x, so the value
/// is exact.
pub fn time_multiplier(system: &GaborSystem, x: f64) -> Result<f64> {
    system.require_painless()?;
    if !x.is_finite() {
        return Err(FrameError::invalid("x", format!("got {x}")));
    }
    Ok(system.tile_sum(x) / system.b)
}

/// Density admissibility of a woven Gabor layout: ab ≤ 1 is necessary for
/// any single family, abN ≤ 1 for N families sharing the modulations.
#[derive(Clone, Debug)]
pub struct DensityGate {
    pub admissible: bool,
    pub product_ab: f64,
    pub product_abn: f64,
    pub message: String,
}

pub fn density_gate(a: f64, b: f64, n: u32) -> Result<DensityGate> {
    if !(a.is_finite() && a > 0.0 && b.is_finite() && b > 0.0) {
        return Err(FrameError::invalid(
            "a, b",
            format!("steps must be positive, got a = {a}, b = {b}"),
        ));
    }
    if n == 0 {
        return Err(FrameError::invalid("n", "weaving order must be at least 1"));
    }
    let product_ab = a * b;
    let product_abn = a * b * n as f64;
    let (admissible, message) = if product_ab > 1.0 {
        (
            false,
            format!("ab = {product_ab:.3} > 1: no frame at this density"),
        )
    } else if product_abn > 1.0 {
        (
            false,
            format!(
                "ab = {product_ab:.3} is admissible but abN = {product_abn:.3} > 1: \
                 {n} woven families cannot all be frames"
            ),
        )
    } else {
        (
            true,
            format!("abN = {product_abn:.3} within the density limit 1"),
        )
    };
    Ok(DensityGate {
        admissible,
        product_ab,
        product_abn,
        message,
    })
}

/// Frame bounds of one Gabor system. Periodic patterns are swept exactly
/// over one period; windowed (truncated) patterns are certified only on the
/// interior span their blocks fully govern, and the certificate is flagged
/// partial.
pub fn gabor_frame_bounds(system: &GaborSystem, grid_points: usize) -> Result<BoundsCertificate> {
    gabor_frame_bounds_with(system, &SweepSettings::with_grid(grid_points))
}

pub fn gabor_frame_bounds_with(
    system: &GaborSystem,
    settings: &SweepSettings,
) -> Result<BoundsCertificate> {
    system.require_painless()?;
    if settings.points_per_period < 16 {
        return Err(FrameError::invalid(
            "grid_points",
            "need at least 16 points per period",
        ));
    }
    let block = system.block_length();
    // Truncation, not the choice values, decides the sweep shape: an
    // all-zero window is still a finite section here.
    let truncated = match system.pattern.extension() {
        Extension::ConstantZero => system.pattern.window(),
        Extension::Periodic => None,
    };
    let (x_lo, x_hi, blocks, partial) = match truncated {
        None => {
            let p = system.pattern.period().unwrap_or(1);
            (0.0, p as f64 * block, p, false)
        }
        Some((w_lo, w_hi)) => {
            // Interior span: x beyond the reach of any index below the
            // window (whatever its family) and before the first index above.
            let lo = (w_lo - 1) as f64 * block
                + (system.n - 1) as f64 * system.a
                + system.gen.support_width();
            let hi = (w_hi + 1) as f64 * block;
            if lo >= hi {
                return Err(FrameError::invalid(
                    "pattern",
                    "window too short: truncated system has no interior span",
                ));
            }
            let blocks = ((hi - lo) / block).ceil() as usize;
            (lo, hi, blocks, true)
        }
    };
    let points = settings
        .points_per_period
        .checked_mul(blocks.max(1))
        .filter(|&n| n <= 10_000_000)
        .ok_or_else(|| FrameError::invalid("grid_points", "sweep grid too large"))?;
    let grid = UniformGrid::span(x_lo, x_hi, points);
    let f = |x: f64| system.tile_sum(x) / system.b;
    let out = sweep_uniform(&f, &grid, settings.refine_points);
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
            lo: x_lo,
            hi: x_hi,
            points,
            log_spaced: false,
        },
        tail_bound: 0.0,
        arg_inf: out.inf.location,
        arg_sup: out.sup.location,
        certified: out.inf.value > 0.0,
        partial_window: partial,
    })
}

/// Pattern-independent Gabor bounds: sweep Σ_n min_ℓ and Σ_n max_ℓ of
/// |g(x - nNa - ℓa)|² over one block [0, Na). L > 0 certifies that every
/// weave of the N translate families is a frame with bounds in [L, U].
pub fn gabor_weave_certificate(
    gen: &GaborGenerator,
    a: f64,
    b: f64,
    n: u32,
    grid_points: usize,
) -> Result<WeaveCertificate> {
    let base = GaborSystem::new(gen.clone(), a, b, n, WeavingPattern::constant(0))?;
    base.require_painless()?;
    if grid_points < 16 {
        return Err(FrameError::invalid(
            "grid_points",
            "need at least 16 points per period",
        ));
    }
    let block = base.block_length();
    let env_sum = |x: f64, pick_min: bool| {
        let (lo, hi) = base.index_span(x);
        let mut sum = 0.0;
        for idx in lo..=hi {
            let mut best = if pick_min { f64::INFINITY } else { 0.0 };
            for ell in 0..n {
                let v = gen.eval_time(x - (idx as f64 * block + ell as f64 * a));
                let v2 = v * v;
                best = if pick_min { best.min(v2) } else { best.max(v2) };
            }
            sum += best;
        }
        sum / b
    };
    let grid = UniformGrid::span(0.0, block, grid_points);
    let lo = sweep_uniform(&|x| env_sum(x, true), &grid, DEFAULT_WEAVE_REFINE);
    let hi = sweep_uniform(&|x| env_sum(x, false), &grid, DEFAULT_WEAVE_REFINE);

    // Witness: the pointwise-minimizing family per index at the arg-inf,
    // padded so the truncated section still covers that point.
    let x_star = lo.inf.location;
    let (i_lo, i_hi) = base.index_span(x_star);
    let pad = ((gen.support_width() + (n - 1) as f64 * a) / block).ceil() as i64 + 1;
    let choices: Vec<u32> = (i_lo - pad..=i_hi + pad)
        .map(|idx| {
            let mut best = 0u32;
            let mut best_v = f64::INFINITY;
            for ell in 0..n {
                let v = gen.eval_time(x_star - (idx as f64 * block + ell as f64 * a));
                if v * v < best_v {
                    best_v = v * v;
                    best = ell;
                }
            }
            best
        })
        .collect();
    let witness_min = WeavingPattern::windowed(i_lo - pad, choices);

    Ok(WeaveCertificate {
        l_weave: lo.inf.value,
        u_weave: hi.sup.value,
        grid: GridInfo {
            lo: 0.0,
            hi: block,
            points: grid_points,
            log_spaced: false,
        },
        tail_bound: 0.0,
        witness_min,
        arg_inf: lo.inf.location,
        arg_sup: hi.sup.location,
        is_woven_certified: lo.inf.value > 0.0,
    })
}

const DEFAULT_WEAVE_REFINE: usize = 256;

/// Floor checks behind the woven lower bound.
///
/// `base_ok` tests |g| ≥ ε on [0, N·a), the hypothesis sufficient for the
/// unwoven system. `strong_ok` tests the longer interval [0, (2N-1)·a)
/// needed so that adjacent blocks choosing extreme opposite families still
/// overlap. Both intervals are sampled half-open, matching the tile
/// convention that ignores single points.
#[derive(Clone, Debug)]
pub struct CoverReport {
    pub floor_eps: f64,
    pub base_interval_hi: f64,
    pub strong_interval_hi: f64,
    pub base_ok: bool,
    pub strong_ok: bool,
    pub grid_points: usize,
}

pub const COVER_CHECK_POINTS: usize = 10_000;

pub fn verify_cover(gen: &GaborGenerator, a: f64, n: u32) -> Result<CoverReport> {
    if !(a.is_finite() && a > 0.0) {
        return Err(FrameError::invalid(
            "a",
            format!("translation step must be positive, got {a}"),
        ));
    }
    if n == 0 {
        return Err(FrameError::invalid("n", "weaving order must be at least 1"));
    }
    let eps = gen.floor_eps();
    let holds_on = |hi: f64| {
        (0..COVER_CHECK_POINTS).all(|i| {
            let x = hi * i as f64 / COVER_CHECK_POINTS as f64;
            gen.eval_time(x).abs() >= eps
        })
    };
    let base_hi = n as f64 * a;
    let strong_hi = (2 * n - 1) as f64 * a;
    Ok(CoverReport {
        floor_eps: eps,
        base_interval_hi: base_hi,
        strong_interval_hi: strong_hi,
        base_ok: holds_on(base_hi),
        strong_ok: holds_on(strong_hi),
        grid_points: COVER_CHECK_POINTS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn indicator3_system(n: u32, pattern: WeavingPattern) -> GaborSystem {
        let gen = GaborGenerator::indicator(3.0).unwrap();
        GaborSystem::new(gen, 1.0, 1.0 / 3.0, n, pattern).unwrap()
    }

    #[test]
    fn tile_counts_decide_the_multiplier() {
        let sys = indicator3_system(2, WeavingPattern::constant(0));
        // Tiles [2n, 2n+3): x = 0.5 sits in two of them, x = 1.5 in one.
        assert_eq!(time_multiplier(&sys, 0.5).unwrap(), 6.0);
        assert_eq!(time_multiplier(&sys, 1.5).unwrap(), 3.0);

        // Truncated window: far x is outside every surviving tile.
        let cut = indicator3_system(2, WeavingPattern::windowed(0, vec![0, 1]));
        assert_eq!(time_multiplier(&cut, 100.0).unwrap(), 0.0);
        assert_eq!(time_multiplier(&cut, -1.0).unwrap(), 0.0);
        assert_eq!(time_multiplier(&cut, 0.5).unwrap(), 3.0);
    }

    #[test]
    fn multiplier_is_block_periodic_for_constant_patterns() {
        let sys = indicator3_system(2, WeavingPattern::constant(1));
        for &x in &[0.0, 0.3, 1.7, 4.9] {
            let m = time_multiplier(&sys, x).unwrap();
            let shifted = time_multiplier(&sys, x + sys.block_length()).unwrap();
            assert_eq!(m, shifted);
        }
    }

    #[test]
    fn painless_violation_is_rejected() {
        let gen = GaborGenerator::indicator(3.0).unwrap();
        let sys = GaborSystem::new(gen, 1.0, 0.4, 2, WeavingPattern::constant(0)).unwrap();
        assert!(!sys.is_painless());
        assert!(matches!(
            time_multiplier(&sys, 0.5),
            Err(FrameError::PainlessViolated { .. })
        ));
        assert!(gabor_frame_bounds(&sys, 256).is_err());
    }

    #[test]
    fn base_bounds_are_exact_on_the_grid() {
        let sys = indicator3_system(2, WeavingPattern::constant(0));
        let cert = gabor_frame_bounds(&sys, 4096).unwrap();
        assert_eq!(cert.a_num, 3.0);
        assert_eq!(cert.b_num, 6.0);
        assert!(cert.certified);
        assert_eq!(cert.tail_bound, 0.0);
        assert!(!cert.partial_window);
    }

    #[test]
    fn undersampled_translates_leave_gaps() {
        // Length-3 tiles on a step-4 lattice miss [4n+3, 4n+4).
        let sys = indicator3_system(4, WeavingPattern::constant(0));
        let cert = gabor_frame_bounds(&sys, 4096).unwrap();
        assert_eq!(cert.a_num, 0.0);
        assert!(!cert.certified);

        let gate = density_gate(1.0, 1.0 / 3.0, 4).unwrap();
        assert!(!gate.admissible);
        assert!(gate.message.contains("1.333"), "message: {}", gate.message);
    }

    #[test]
    fn density_gate_orders_its_checks() {
        let ok = density_gate(1.0, 1.0 / 3.0, 2).unwrap();
        assert!(ok.admissible);
        assert!((ok.product_abn - 2.0 / 3.0).abs() < 1e-15);

        let boundary = density_gate(1.0, 1.0, 1).unwrap();
        assert!(boundary.admissible, "ab = 1 is the admissible boundary");

        let too_dense = density_gate(2.0, 0.75, 1).unwrap();
        assert!(!too_dense.admissible);
        assert!(too_dense.message.starts_with("ab = 1.500"));

        let weave_only = density_gate(1.0, 0.6, 2).unwrap();
        assert!(!weave_only.admissible);
        assert!(weave_only.message.contains("abN = 1.200"));

        assert!(density_gate(-1.0, 0.5, 2).is_err());
        assert!(density_gate(1.0, 0.5, 0).is_err());
    }

    #[test]
    fn weave_certificate_is_exact_for_the_indicator() {
        let gen = GaborGenerator::indicator(3.0).unwrap();
        let cert = gabor_weave_certificate(&gen, 1.0, 1.0 / 3.0, 2, 4096).unwrap();
        // Min tiles [2n+1, 2n+3) tile the line once, max tiles [2n, 2n+4)
        // cover it twice.
        assert_eq!(cert.l_weave, 3.0);
        assert_eq!(cert.u_weave, 6.0);
        assert!(cert.is_woven_certified);

        // The witness section reproduces the certified minimum at its arg.
        let sys = indicator3_system(2, cert.witness_min.clone());
        let at_witness = time_multiplier(&sys, cert.arg_inf).unwrap();
        assert!((at_witness - cert.l_weave).abs() < 1e-12);
    }

    #[test]
    fn single_family_certificate_equals_base_bounds() {
        let gen = GaborGenerator::indicator(3.0).unwrap();
        let cert = gabor_weave_certificate(&gen, 1.0, 1.0 / 3.0, 1, 2048).unwrap();
        let sys = GaborSystem::new(gen, 1.0, 1.0 / 3.0, 1, WeavingPattern::constant(0)).unwrap();
        let base = gabor_frame_bounds(&sys, 2048).unwrap();
        assert_eq!(cert.l_weave, base.a_num);
        assert_eq!(cert.u_weave, base.b_num);
    }

    #[test]
    fn alternating_pattern_stays_inside_the_certificate() {
        let pat = WeavingPattern::periodic(0, vec![0, 1]).unwrap();
        let sys = indicator3_system(2, pat);
        let cert = gabor_frame_bounds(&sys, 2048).unwrap();
        assert!(cert.a_num >= 3.0 - 1e-12);
        assert!(cert.b_num <= 6.0 + 1e-12);
        assert!(cert.certified);
    }

    #[test]
    fn sampled_patterns_stay_inside_the_certificate() {
        let gen = GaborGenerator::indicator(3.0).unwrap();
        let weave = gabor_weave_certificate(&gen, 1.0, 1.0 / 3.0, 2, 1024).unwrap();
        for seed in 0..100u64 {
            let mut rng = SplitMix64::new(seed);
            let choices: Vec<u32> = (0..4).map(|_| rng.below(2) as u32).collect();
            let pat = WeavingPattern::periodic(0, choices.clone()).unwrap();
            let cert = gabor_frame_bounds(&indicator3_system(2, pat), 256).unwrap();
            assert!(
                cert.a_num >= weave.l_weave - 1e-12 && cert.b_num <= weave.u_weave + 1e-12,
                "seed {seed} pattern {choices:?} gave ({}, {})",
                cert.a_num,
                cert.b_num
            );
        }
    }

    #[test]
    fn truncated_sections_certify_their_interior() {
        let sys = indicator3_system(2, WeavingPattern::windowed(0, vec![0; 5]));
        let cert = gabor_frame_bounds(&sys, 1024).unwrap();
        assert!(cert.partial_window);
        // Interior span for window [0, 4]: [2, 10).
        assert_eq!(cert.grid.lo, 2.0);
        assert_eq!(cert.grid.hi, 10.0);
        assert_eq!(cert.a_num, 3.0);
        assert_eq!(cert.b_num, 6.0);

        let too_short = indicator3_system(2, WeavingPattern::windowed(0, vec![1]));
        assert!(matches!(
            gabor_frame_bounds(&too_short, 256),
            Err(FrameError::InvalidArgument { .. })
        ));
    }

    #[test]
    fn tile_counting_law_for_indicators() {
        // b·m(x) counts tiles: always ⌊L/(Na)⌋ or ⌈L/(Na)⌉.
        for &(len, n) in &[(3.0f64, 2u32), (5.0, 2), (3.0, 1), (7.0, 3)] {
            let gen = GaborGenerator::indicator(len).unwrap();
            let b = 1.0 / len;
            let sys = GaborSystem::new(gen, 1.0, b, n, WeavingPattern::constant(0)).unwrap();
            let na = n as f64;
            let lo = (len / na).floor();
            let hi = (len / na).ceil();
            for i in 0..500 {
                let x = i as f64 * (2.0 * na) / 500.0;
                let count = b * time_multiplier(&sys, x).unwrap();
                let snapped = count.round();
                assert!((count - snapped).abs() < 1e-9);
                assert!(
                    snapped == lo || snapped == hi,
                    "len {len} N {n}: count {count} at x = {x}"
                );
            }
        }
    }

    #[test]
    fn cover_checks_distinguish_window_lengths() {
        let a = 1.0;
        let long = verify_cover(&GaborGenerator::indicator(3.0).unwrap(), a, 2).unwrap();
        assert!(long.base_ok && long.strong_ok);
        assert_eq!(long.base_interval_hi, 2.0);
        assert_eq!(long.strong_interval_hi, 3.0);

        let mid = verify_cover(&GaborGenerator::indicator(2.0).unwrap(), a, 2).unwrap();
        assert!(mid.base_ok, "length 2 covers [0, 2)");
        assert!(!mid.strong_ok, "length 2 cannot cover [0, 3)");

        let short = verify_cover(&GaborGenerator::indicator(1.0).unwrap(), a, 2).unwrap();
        assert!(!short.base_ok && !short.strong_ok);

        assert!(verify_cover(&GaborGenerator::indicator(1.0).unwrap(), 0.0, 2).is_err());
    }

    #[test]
    fn systems_reject_bad_parameters() {
        let gen = GaborGenerator::indicator(3.0).unwrap();
        assert!(GaborSystem::new(gen.clone(), 0.0, 0.5, 1, WeavingPattern::constant(0)).is_err());
        assert!(GaborSystem::new(gen.clone(), 1.0, -0.5, 1, WeavingPattern::constant(0)).is_err());
        assert!(GaborSystem::new(gen.clone(), 1.0, 0.5, 0, WeavingPattern::constant(0)).is_err());
        assert!(GaborSystem::new(gen, 1.0, 0.5, 2, WeavingPattern::constant(2)).is_err());
    }
}
