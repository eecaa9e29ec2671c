//! Discretized analysis, synthesis, and reconstruction on the frequency side.
//!
//! Signals live as sampled spectra on uniform grids. Analysis integrates f̂
//! against atom spectra by trapezoid quadrature; reconstruction exploits the
//! painless regime, where the frame operator acts as pointwise multiplication
//! by m(γ) and inversion is division. A Gram-matrix oracle and the classical
//! frame iteration provide inversion paths that do not rely on the diagonal
//! shortcut, which makes them useful as independent cross-checks.

use crate::error::{FrameError, Result};
use crate::frame_core::{
    frame_bounds_with, truncation_level, BoundsCertificate, MultiplierEval, SweepSettings,
    SystemParams, TruncationPlan, WeavingPattern,
};
use crate::generators::WaveletGenerator;
use crate::rng::SplitMix64;
use num_complex::Complex64;
use rayon::prelude::*;
use std::fmt::Write as _;

/// Iteration cap for the Gram eigenvalue estimates.
const GRAM_MAX_ITER: usize = 50_000;
/// Largest atom count the Gram oracle accepts.
pub const GRAM_MAX_ATOMS: usize = 4096;
/// Default frequency grid resolution for signal experiments.
pub const DEFAULT_SIGNAL_POINTS: usize = 1 << 14;

/// Complex samples of f̂ on a uniform frequency grid with inclusive
/// endpoints: point i sits at gamma_lo + i·step.
#[derive(Clone, Debug)]
pub struct FreqSignal {
    gamma_lo: f64,
    step: f64,
    values: Vec<Complex64>,
}

impl FreqSignal {
    pub fn new(gamma_lo: f64, step: f64, values: Vec<Complex64>) -> Result<Self> {
        if !(gamma_lo.is_finite() && step.is_finite() && step > 0.0) {
            return Err(FrameError::invalid(
                "step",
                format!("need a finite grid with positive step, got lo {gamma_lo}, step {step}"),
            ));
        }
        if values.len() < 2 {
            return Err(FrameError::invalid("values", "need at least two samples"));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(FrameError::invalid("values", "non-finite sample"));
        }
        Ok(FreqSignal {
            gamma_lo,
            step,
            values,
        })
    }

    /// Zero signal on `points` samples spanning [gamma_lo, gamma_hi].
    pub fn zeros(gamma_lo: f64, gamma_hi: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(FrameError::invalid("points", "need at least two samples"));
        }
        if !(gamma_hi.is_finite() && gamma_lo.is_finite() && gamma_hi > gamma_lo) {
            return Err(FrameError::invalid(
                "gamma_range",
                format!("need lo < hi, got [{gamma_lo}, {gamma_hi}]"),
            ));
        }
        let step = (gamma_hi - gamma_lo) / (points - 1) as f64;
        Self::new(gamma_lo, step, vec![Complex64::ZERO; points])
    }

    pub fn gamma_lo(&self) -> f64 {
        self.gamma_lo
    }

    pub fn gamma_hi(&self) -> f64 {
        self.gamma_lo + self.step * (self.values.len() - 1) as f64
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn gamma(&self, i: usize) -> f64 {
        self.gamma_lo + self.step * i as f64
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Trapezoid weight of sample i (endpoints count half).
    fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.values.len() {
            0.5
        } else {
            1.0
        }
    }

    /// ∫ |f̂|² by trapezoid rule.
    pub fn energy(&self) -> f64 {
        let sum: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| self.weight(i) * v.norm_sqr())
            .sum();
        sum * self.step
    }

    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }

    pub fn grid_matches(&self, other: &FreqSignal) -> bool {
        self.values.len() == other.values.len()
            && (self.gamma_lo - other.gamma_lo).abs() <= 1e-9 * self.step
            && (self.step - other.step).abs() <= 1e-12 * self.step
    }

    fn require_same_grid(&self, other: &FreqSignal) -> Result<()> {
        if self.grid_matches(other) {
            Ok(())
        } else {
            Err(FrameError::GridMismatch(format!(
                "[{}, {}] x {} vs [{}, {}] x {}",
                self.gamma_lo(),
                self.gamma_hi(),
                self.len(),
                other.gamma_lo(),
                other.gamma_hi(),
                other.len()
            )))
        }
    }

    /// Pointwise difference on a shared grid.
    pub fn sub(&self, other: &FreqSignal) -> Result<FreqSignal> {
        self.require_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| x - y)
            .collect();
        FreqSignal::new(self.gamma_lo, self.step, values)
    }

    /// ⟨self, other⟩ = ∫ self · conj(other) by trapezoid rule.
    pub fn inner(&self, other: &FreqSignal) -> Result<Complex64> {
        self.require_same_grid(other)?;
        let mut sum = Complex64::ZERO;
        for (i, (x, y)) in self.values.iter().zip(&other.values).enumerate() {
            sum += x * y.conj() * self.weight(i);
        }
        Ok(sum * self.step)
    }

    /// CSV rows "gamma,re,im" with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 32);
        out.push_str("gamma,re,im\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{:.17e},{:.17e},{:.17e}", self.gamma(i), v.re, v.im);
        }
        out
    }

    /// Parse the to_csv format; the header line is optional.
    pub fn from_csv(text: &str) -> Result<FreqSignal> {
        let mut gammas = Vec::new();
        let mut values = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || (line == 1 && trimmed.starts_with("gamma")) {
                continue;
            }
            let mut fields = trimmed.split(',');
            let mut next = |name: &str| -> Result<f64> {
                fields
                    .next()
                    .ok_or_else(|| FrameError::Parse {
                        line,
                        reason: format!("missing {name} field"),
                    })?
                    .trim()
                    .parse()
                    .map_err(|_| FrameError::Parse {
                        line,
                        reason: format!("cannot read {name} as a real number"),
                    })
            };
            let g = next("gamma")?;
            let re = next("re")?;
            let im = next("im")?;
            gammas.push(g);
            values.push(Complex64::new(re, im));
        }
        if gammas.len() < 2 {
            return Err(FrameError::Parse {
                line: 0,
                reason: "need at least two samples".into(),
            });
        }
        let lo = gammas[0];
        let step = (gammas[gammas.len() - 1] - lo) / (gammas.len() - 1) as f64;
        if step <= 0.0 {
            return Err(FrameError::Parse {
                line: 1,
                reason: "grid is not increasing".into(),
            });
        }
        for (i, &g) in gammas.iter().enumerate() {
            if (g - (lo + step * i as f64)).abs() > 1e-9 * step.max(1.0) {
                return Err(FrameError::Parse {
                    line: i + 2,
                    reason: "grid is not uniform".into(),
                });
            }
        }
        FreqSignal::new(lo, step, values)
    }
}

/// C∞ bump supported on |u| < 1, scaled to peak value 1.
fn smooth_bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    }
}

/// Random band-limited test signal: complex-normal coefficients on smooth
/// bumps placed strictly inside `band`. The waveform depends only on the
/// seed, not on the grid, so resampling at another resolution gives the
/// same underlying function.
pub fn random_bandlimited_signal(
    gamma_lo: f64,
    gamma_hi: f64,
    points: usize,
    band: (f64, f64),
    bumps: usize,
    seed: u64,
) -> Result<FreqSignal> {
    let (blo, bhi) = band;
    if !(blo.is_finite() && bhi.is_finite() && blo < bhi) {
        return Err(FrameError::invalid(
            "band",
            format!("need lo < hi, got [{blo}, {bhi}]"),
        ));
    }
    if blo < gamma_lo || bhi > gamma_hi {
        return Err(FrameError::invalid("band", "band must lie inside the grid"));
    }
    if bumps == 0 {
        return Err(FrameError::invalid("bumps", "need at least one bump"));
    }
    let mut rng = SplitMix64::new(seed);
    let width_cap = (bhi - blo) / 2.0;
    let mut shapes = Vec::with_capacity(bumps);
    for _ in 0..bumps {
        let width = width_cap * (0.2 + 0.6 * rng.next_f64());
        let center = blo + width + (bhi - blo - 2.0 * width) * rng.next_f64();
        let coeff = Complex64::new(rng.standard_normal(), rng.standard_normal());
        shapes.push((center, width, coeff));
    }
    let mut signal = FreqSignal::zeros(gamma_lo, gamma_hi, points)?;
    for i in 0..points {
        let g = signal.gamma(i);
        let mut v = Complex64::ZERO;
        for &(c, w, coeff) in &shapes {
            v += coeff * smooth_bump((g - c) / w);
        }
        signal.values[i] = v;
    }
    Ok(signal)
}

/// Coefficients c_{j,k} = ⟨f, D_{λ_j} T_{kb} ψ⟩ over a rectangle of indices.
#[derive(Clone, Debug)]
pub struct CoefficientTable {
    j_lo: i64,
    k_lo: i64,
    entries: Vec<Vec<Complex64>>,
    truncation_warnings: Vec<String>,
}

impl CoefficientTable {
    pub fn j_range(&self) -> (i64, i64) {
        (self.j_lo, self.j_lo + self.entries.len() as i64 - 1)
    }

    pub fn k_range(&self) -> (i64, i64) {
        let cols = self.entries.first().map_or(0, Vec::len);
        (self.k_lo, self.k_lo + cols as i64 - 1)
    }

    pub fn coeff(&self, j: i64, k: i64) -> Option<Complex64> {
        let row = usize::try_from(j - self.j_lo).ok()?;
        let col = usize::try_from(k - self.k_lo).ok()?;
        self.entries.get(row)?.get(col).copied()
    }

    pub fn rows(&self) -> &[Vec<Complex64>] {
        &self.entries
    }

    /// Σ |c_{j,k}|² over the whole table.
    pub fn energy(&self) -> f64 {
        self.entries
            .iter()
            .flat_map(|row| row.iter())
            .map(Complex64::norm_sqr)
            .sum()
    }

    pub fn warnings(&self) -> &[String] {
        &self.truncation_warnings
    }
}

/// Spectrum of the atom D_λ T_{kb} ψ at scale λ = λ_j(ℓ), sampled on the
/// grid of `template`: λ^{-1/2} ψ̂(γ/λ) e^{-2πi k b γ/λ}.
pub fn atom_spectrum(
    gen: &WaveletGenerator,
    params: &SystemParams,
    ell: u32,
    j: i64,
    k: i64,
    template: &FreqSignal,
) -> Result<FreqSignal> {
    if ell >= params.weaving_order() {
        return Err(FrameError::invalid(
            "ell",
            format!("family {ell} of {}", params.weaving_order()),
        ));
    }
    let lambda = params.scale(j, ell);
    let scale = lambda.sqrt().recip();
    let phase = -2.0 * std::f64::consts::PI * k as f64 * params.translation_step() / lambda;
    let values = (0..template.len())
        .map(|i| {
            let g = template.gamma(i);
            let w = gen.eval_freq(g / lambda);
            if w == 0.0 {
                Complex64::ZERO
            } else {
                Complex64::from_polar(scale * w, phase * g)
            }
        })
        .collect();
    FreqSignal::new(template.gamma_lo, template.step, values)
}

/// Trapezoid analysis of f̂ against the woven system's atom spectra.
///
/// Each scale j uses the family chosen by `pattern`. Atoms whose spectrum
/// reaches beyond the grid produce a recorded warning: the quadrature then
/// sees only the part of the atom inside the grid, which is exact when f̂
/// genuinely vanishes outside but a truncation otherwise.
pub fn analysis(
    gen: &WaveletGenerator,
    params: &SystemParams,
    pattern: &WeavingPattern,
    f: &FreqSignal,
    j_range: (i64, i64),
    k_range: (i64, i64),
) -> Result<CoefficientTable> {
    params.require_painless(gen)?;
    pattern.validate_for(params.weaving_order())?;
    let (j_lo, j_hi) = j_range;
    let (k_lo, k_hi) = k_range;
    if j_lo > j_hi || k_lo > k_hi {
        return Err(FrameError::invalid(
            "ranges",
            format!("empty index rectangle [{j_lo},{j_hi}] x [{k_lo},{k_hi}]"),
        ));
    }
    let support = gen.support();
    let b = params.translation_step();
    let mut warnings = Vec::new();
    let mut entries = Vec::with_capacity((j_hi - j_lo + 1) as usize);
    for j in j_lo..=j_hi {
        let lambda = params.scale(j, pattern.ell_at(j));
        // ψ̂ is even, so the atom spectrum occupies ±λ·[support].
        let reach = lambda * support.hi;
        if reach > f.gamma_hi() + 1e-9 * f.step || -reach < f.gamma_lo() - 1e-9 * f.step {
            warnings.push(format!(
                "scale j={j} (lambda={lambda:.6e}): atom spectrum spans [{:-.6e}, {:.6e}], \
                 beyond the grid [{:.6e}, {:.6e}]",
                reach,
                reach,
                f.gamma_lo(),
                f.gamma_hi()
            ));
        }
        // Non-vanishing quadrature nodes for this scale, with weights and
        // the normalized frequency folded in.
        let amp = f.step / lambda.sqrt();
        let nodes: Vec<(f64, Complex64)> = (0..f.len())
            .filter_map(|i| {
                let g = f.gamma(i);
                let w = gen.eval_freq(g / lambda);
                let v = f.values[i];
                if w == 0.0 || v == Complex64::ZERO {
                    None
                } else {
                    Some((g / lambda, v * (w * f.weight(i) * amp)))
                }
            })
            .collect();
        let row: Vec<Complex64> = (k_lo..=k_hi)
            .into_par_iter()
            .map(|k| {
                let freq = 2.0 * std::f64::consts::PI * k as f64 * b;
                let mut sum = Complex64::ZERO;
                for &(u, g) in &nodes {
                    sum += g * Complex64::from_polar(1.0, freq * u);
                }
                sum
            })
            .collect();
        entries.push(row);
    }
    Ok(CoefficientTable {
        j_lo,
        k_lo,
        entries,
        truncation_warnings: warnings,
    })
}

/// Multiplier samples over the nonzero support of f, or the reason the
/// system cannot be inverted there.
fn multiplier_on_support(
    gen: &WaveletGenerator,
    params: &SystemParams,
    pattern: &WeavingPattern,
    f: &FreqSignal,
) -> Result<(Vec<f64>, TruncationPlan)> {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for (i, v) in f.values.iter().enumerate() {
        if *v != Complex64::ZERO {
            let g = f.gamma(i).abs();
            if g > 0.0 {
                lo = lo.min(g);
                hi = hi.max(g);
            } else {
                // The multiplier vanishes at γ = 0 for every admissible
                // generator, so a nonzero sample there cannot be inverted.
                return Err(FrameError::NotInvertible {
                    gamma: 0.0,
                    value: 0.0,
                });
            }
        }
    }
    if hi == 0.0 {
        return Err(FrameError::invalid("f", "signal is identically zero"));
    }
    let plan = truncation_level(gen, params, (lo, hi))?;
    let eval = MultiplierEval::build(gen, params, pattern, &plan);
    let m: Vec<f64> = f
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if *v == Complex64::ZERO {
                0.0
            } else {
                eval.eval(f.gamma(i).abs())
            }
        })
        .collect();
    for (i, &mi) in m.iter().enumerate() {
        if f.values[i] != Complex64::ZERO && mi <= plan.tail_bound {
            return Err(FrameError::NotInvertible {
                gamma: f.gamma(i),
                value: mi,
            });
        }
    }
    Ok((m, plan))
}

/// Apply S then S⁻¹ through the painless multiplier and report the round
/// trip: S acts as pointwise multiplication by m(γ) on the frequency side.
pub fn reconstruct_painless(
    gen: &WaveletGenerator,
    params: &SystemParams,
    pattern: &WeavingPattern,
    f: &FreqSignal,
) -> Result<(FreqSignal, f64)> {
    params.require_painless(gen)?;
    pattern.validate_for(params.weaving_order())?;
    let (m, _) = multiplier_on_support(gen, params, pattern, f)?;
    let values: Vec<Complex64> = f
        .values
        .iter()
        .zip(&m)
        .map(|(v, &mi)| {
            if *v == Complex64::ZERO {
                Complex64::ZERO
            } else {
                v * mi / mi
            }
        })
        .collect();
    let back = FreqSignal::new(f.gamma_lo, f.step, values)?;
    let rel = back.sub(f)?.norm() / f.norm();
    Ok((back, rel))
}

/// Round-trip errors for a batch of signals, computed concurrently with
/// the output kept in input order.
pub fn roundtrip_batch(
    gen: &WaveletGenerator,
    params: &SystemParams,
    pattern: &WeavingPattern,
    signals: &[FreqSignal],
) -> Result<Vec<f64>> {
    signals
        .par_iter()
        .map(|f| reconstruct_painless(gen, params, pattern, f).map(|(_, e)| e))
        .collect()
}

/// Outcome of replacing erased scales by a fallback family.
#[derive(Clone, Debug)]
pub struct ErasureReport {
    /// The mixed pattern actually used for reconstruction.
    pub pattern: WeavingPattern,
    /// Certified bounds of the mixed system.
    pub certificate: BoundsCertificate,
    /// Round-trip error of f under the mixed multiplier.
    pub rel_error: f64,
}

/// Erase the family-0 atoms at the given scales and reconstruct with the
/// fallback family instead. Scales not listed keep family 0.
pub fn erasure_experiment(
    gen: &WaveletGenerator,
    params: &SystemParams,
    f: &FreqSignal,
    erased: &[i64],
    fallback: &WeavingPattern,
) -> Result<ErasureReport> {
    fallback.validate_for(params.weaving_order())?;
    let pattern = if erased.is_empty() {
        WeavingPattern::constant(0)
    } else {
        for &j in erased {
            if fallback.ell_at(j) == 0 {
                return Err(FrameError::invalid(
                    "fallback",
                    format!("scale j={j} is erased but the fallback keeps family 0 there"),
                ));
            }
        }
        let lo = *erased.iter().min().expect("non-empty");
        let hi = *erased.iter().max().expect("non-empty");
        let mut choices = vec![0u32; (hi - lo + 1) as usize];
        for &j in erased {
            choices[(j - lo) as usize] = fallback.ell_at(j);
        }
        WeavingPattern::windowed(lo, choices)
    };
    let certificate = frame_bounds_with(gen, params, &pattern, &SweepSettings::default())?;
    let (_, rel_error) = reconstruct_painless(gen, params, &pattern, f)?;
    Ok(ErasureReport {
        pattern,
        certificate,
        rel_error,
    })
}

/// Extreme eigenvalue estimates of a Gram matrix.
#[derive(Clone, Copy, Debug)]
pub struct GramEstimates {
    pub lambda_min: f64,
    pub lambda_max: f64,
}

/// Largest eigenvalue of a Hermitian PSD matrix by power iteration with a
/// deterministic start.
///
/// Stops when the residual ‖Gv - λv‖ certifies an exact eigenpair, or when
/// the Rayleigh value has stagnated for several steps: the Rayleigh error
/// is of the order residual²/gap, so a stalled residual on a clustered
/// spectrum still means the eigenvalue estimate itself is converged.
fn power_iterate(g: &[Vec<Complex64>], tol: f64, seed: u64) -> Result<f64> {
    let n = g.len();
    let mut rng = SplitMix64::new(seed);
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.standard_normal(), rng.standard_normal()))
        .collect();
    let norm = |x: &[Complex64]| x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let nv = norm(&v);
    for c in v.iter_mut() {
        *c /= nv;
    }
    let mut last = f64::INFINITY;
    let mut stagnant = 0;
    let mut res = f64::INFINITY;
    for _ in 1..=GRAM_MAX_ITER {
        let w: Vec<Complex64> = g
            .par_iter()
            .map(|row| row.iter().zip(&v).map(|(a, x)| a * x).sum())
            .collect();
        // Rayleigh quotient is real for Hermitian G and unit v.
        let lambda: f64 = w.iter().zip(&v).map(|(wi, vi)| (wi * vi.conj()).re).sum();
        let scale = lambda.abs().max(1.0);
        res = 0.0;
        for (wi, vi) in w.iter().zip(&v) {
            res += (wi - vi * lambda).norm_sqr();
        }
        res = res.sqrt();
        if res <= tol * scale {
            return Ok(lambda);
        }
        stagnant = if (lambda - last).abs() <= 0.01 * tol * scale {
            stagnant + 1
        } else {
            0
        };
        if stagnant >= 3 {
            return Ok(lambda);
        }
        let nw = norm(&w);
        if nw == 0.0 {
            // v is annihilated: 0 is an exact eigenvalue.
            return Ok(0.0);
        }
        v = w.into_iter().map(|c| c / nw).collect();
        last = lambda;
    }
    Err(FrameError::NoConvergence {
        iterations: GRAM_MAX_ITER,
        residual: res,
    })
}

/// Extreme eigenvalues of the Gram matrix ⟨a_i, a_j⟩ of up to 4096 atom
/// spectra on a shared grid, to tolerance 1e-8.
///
/// λ_max comes from power iteration; λ_min from power iteration on the
/// shifted matrix λ_max·I - G, which stays well-defined even when the Gram
/// matrix is exactly singular (duplicate atoms).
pub fn gram_oracle(atom_spectra: &[FreqSignal]) -> Result<GramEstimates> {
    let n = atom_spectra.len();
    if n == 0 {
        return Err(FrameError::invalid("atom_spectra", "no atoms given"));
    }
    if n > GRAM_MAX_ATOMS {
        return Err(FrameError::invalid(
            "atom_spectra",
            format!("{n} atoms exceed the cap {GRAM_MAX_ATOMS}"),
        ));
    }
    for a in &atom_spectra[1..] {
        atom_spectra[0].require_same_grid(a)?;
    }
    let mut g = vec![vec![Complex64::ZERO; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v = atom_spectra[i].inner(&atom_spectra[j])?;
            g[i][j] = v;
            g[j][i] = v.conj();
        }
    }
    let tol = 1e-8;
    let lambda_max = power_iterate(&g, tol, 0)?;
    let mut shifted = g;
    for (i, row) in shifted.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = -*x;
            if i == j {
                *x += lambda_max;
            }
        }
    }
    let mu = power_iterate(&shifted, tol, 1)?;
    Ok(GramEstimates {
        lambda_min: (lambda_max - mu).max(0.0),
        lambda_max,
    })
}

/// Result of the frame algorithm.
#[derive(Clone, Debug)]
pub struct IterationResult {
    pub signal: FreqSignal,
    pub iterations: usize,
    /// Relative residual after each update.
    pub residuals: Vec<f64>,
}

/// Classical frame algorithm: h ← h + 2/(A+B)·(f - S h), contraction
/// factor (B-A)/(B+A) per step. `apply_s` must be a pure function of its
/// argument.
pub fn frame_iteration<F>(
    apply_s: F,
    f: &FreqSignal,
    lower: f64,
    upper: f64,
    tol: f64,
    max_iter: usize,
) -> Result<IterationResult>
where
    F: Fn(&FreqSignal) -> FreqSignal,
{
    if !(lower.is_finite() && upper.is_finite() && lower > 0.0 && lower <= upper) {
        return Err(FrameError::invalid(
            "bounds",
            format!("need 0 < A <= B finite, got A={lower}, B={upper}"),
        ));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(FrameError::invalid("tol", format!("got {tol}")));
    }
    if max_iter == 0 {
        return Err(FrameError::invalid("max_iter", "need at least one step"));
    }
    let fnorm = f.norm();
    let mut h = FreqSignal::new(f.gamma_lo, f.step, vec![Complex64::ZERO; f.len()])?;
    if fnorm == 0.0 {
        return Ok(IterationResult {
            signal: h,
            iterations: 0,
            residuals: Vec::new(),
        });
    }
    let relax = 2.0 / (lower + upper);
    let mut r = f.clone(); // residual f - S·0
    let mut residuals = Vec::new();
    for it in 1..=max_iter {
        for (hv, rv) in h.values.iter_mut().zip(&r.values) {
            *hv += relax * rv;
        }
        let sh = apply_s(&h);
        f.require_same_grid(&sh)?;
        r = f.sub(&sh)?;
        let rel = r.norm() / fnorm;
        residuals.push(rel);
        if rel <= tol {
            return Ok(IterationResult {
                signal: h,
                iterations: it,
                residuals,
            });
        }
    }
    Err(FrameError::NoConvergence {
        iterations: max_iter,
        residual: residuals.last().copied().unwrap_or(f64::INFINITY),
    })
}
