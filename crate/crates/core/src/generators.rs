//! Generator windows for the wavelet and Gabor systems.
//!
//! A wavelet generator is described directly on the frequency side by a
//! closed-form profile with compact support; a Gabor generator is described
//! on the time side. All profiles here are real valued and evaluate to
//! exactly zero outside their support, which is what makes the overlap
//! bookkeeping in the bound computations exact rather than approximate.

use crate::error::{FrameError, Result};

/// Closed interval [lo, hi].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Two-sided power bracket `C|γ|^β ≤ |ψ̂(γ)| ≤ D|γ|^α` claimed to hold for
/// all γ in [-u_radius, u_radius] \ {0}.
#[derive(Clone, Copy, Debug)]
pub struct Envelope {
    pub c_lower: f64,
    pub d_upper: f64,
    pub alpha: f64,
    pub beta: f64,
    pub u_radius: f64,
}

impl Envelope {
    fn validate(&self) -> Result<()> {
        let all = [
            ("c_lower", self.c_lower),
            ("d_upper", self.d_upper),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("u_radius", self.u_radius),
        ];
        for (name, v) in all {
            if !(v.is_finite() && v > 0.0) {
                return Err(FrameError::invalid(
                    "envelope",
                    format!("{name} must be finite and positive, got {v}"),
                ));
            }
        }
        Ok(())
    }
}

/// One frequency band on the positive axis, half-open [lo, hi), mirrored
/// evenly onto the negative axis.
#[derive(Clone, Copy, Debug)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
    pub value: f64,
}

#[derive(Clone, Debug)]
enum FreqProfile {
    /// |γ|^alpha on [-cutoff, cutoff], zero outside.
    PowerLaw { alpha: f64, cutoff: f64 },
    /// Piecewise-constant even profile; bands sorted and disjoint.
    EvenBands { bands: Vec<Band> },
}

/// Frequency-side wavelet generator.
#[derive(Clone, Debug)]
pub struct WaveletGenerator {
    profile: FreqProfile,
    support: Interval,
    support_min_abs: f64,
    sup_norm: f64,
    envelope: Envelope,
    envelope_report: EnvelopeReport,
}

/// Default grid size for the construction-time envelope check.
pub const ENVELOPE_CHECK_POINTS: usize = 10_000;

impl WaveletGenerator {
    /// `ψ̂(γ) = |γ|^alpha` on [-cutoff, cutoff]. The envelope holds with
    /// C = D = 1 and both exponents equal to alpha on the whole support.
    pub fn power_law(alpha: f64, cutoff: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(FrameError::invalid(
                "alpha",
                format!("power-law exponent must be positive, got {alpha}"),
            ));
        }
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(FrameError::invalid(
                "cutoff",
                format!("support cutoff must be positive, got {cutoff}"),
            ));
        }
        let envelope = Envelope {
            c_lower: 1.0,
            d_upper: 1.0,
            alpha,
            beta: alpha,
            u_radius: cutoff,
        };
        Self::assemble(FreqProfile::PowerLaw { alpha, cutoff }, envelope)
    }

    /// Even piecewise-constant profile with a caller-claimed envelope. The
    /// claim is checked on a grid at construction; a failing claim still
    /// produces a usable generator, but operations that rely on the envelope
    /// will refuse it.
    pub fn even_bands(mut bands: Vec<Band>, envelope: Envelope) -> Result<Self> {
        if bands.is_empty() {
            return Err(FrameError::invalid("bands", "at least one band required"));
        }
        bands.sort_by(|p, q| p.lo.total_cmp(&q.lo));
        for (i, b) in bands.iter().enumerate() {
            if !(b.lo.is_finite() && b.hi.is_finite() && b.value.is_finite()) {
                return Err(FrameError::invalid("bands", "band entries must be finite"));
            }
            if b.lo < 0.0 || b.lo >= b.hi {
                return Err(FrameError::invalid(
                    "bands",
                    format!("band [{}, {}) must satisfy 0 <= lo < hi", b.lo, b.hi),
                ));
            }
            if b.value == 0.0 {
                return Err(FrameError::invalid("bands", "band value must be nonzero"));
            }
            if i > 0 && bands[i - 1].hi > b.lo {
                return Err(FrameError::invalid("bands", "bands must not overlap"));
            }
        }
        Self::assemble(FreqProfile::EvenBands { bands }, envelope)
    }

    /// Replace the envelope claim and re-run the construction-time check.
    pub fn with_envelope(self, envelope: Envelope) -> Result<Self> {
        Self::assemble(self.profile, envelope)
    }

    fn assemble(profile: FreqProfile, envelope: Envelope) -> Result<Self> {
        envelope.validate()?;
        let (support, support_min_abs, sup_norm) = match &profile {
            FreqProfile::PowerLaw { alpha, cutoff } => (
                Interval {
                    lo: -cutoff,
                    hi: *cutoff,
                },
                0.0,
                cutoff.powf(*alpha),
            ),
            FreqProfile::EvenBands { bands } => {
                let hi = bands.last().unwrap().hi;
                let min_abs = bands.first().unwrap().lo;
                let sup = bands.iter().map(|b| b.value.abs()).fold(0.0, f64::max);
                (Interval { lo: -hi, hi }, min_abs, sup)
            }
        };
        let mut gen = WaveletGenerator {
            profile,
            support,
            support_min_abs,
            sup_norm,
            envelope,
            envelope_report: EnvelopeReport::empty(),
        };
        gen.envelope_report = gen.validate_envelope(ENVELOPE_CHECK_POINTS);
        Ok(gen)
    }

    /// Profile value at γ; exactly zero outside the support.
    pub fn eval_freq(&self, gamma: f64) -> f64 {
        match &self.profile {
            FreqProfile::PowerLaw { alpha, cutoff } => {
                let g = gamma.abs();
                if g <= *cutoff {
                    g.powf(*alpha)
                } else {
                    0.0
                }
            }
            FreqProfile::EvenBands { bands } => {
                let g = gamma.abs();
                for b in bands {
                    if g < b.lo {
                        return 0.0;
                    }
                    if g < b.hi {
                        return b.value;
                    }
                }
                0.0
            }
        }
    }

    /// Smallest closed interval containing the support.
    pub fn support(&self) -> Interval {
        self.support
    }

    pub fn support_width(&self) -> f64 {
        self.support.width()
    }

    /// Distance from the support to the origin: zero when the profile is
    /// active arbitrarily close to γ = 0.
    pub fn support_min_abs(&self) -> f64 {
        self.support_min_abs
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn envelope(&self) -> &Envelope {
        &self.envelope
    }

    /// All profiles in this crate are even in γ.
    pub fn is_even(&self) -> bool {
        true
    }

    /// (alpha, cutoff) when the profile is the pure power law, which admits
    /// a closed-form multiplier evaluation.
    pub(crate) fn power_law_shape(&self) -> Option<(f64, f64)> {
        match &self.profile {
            FreqProfile::PowerLaw { alpha, cutoff } => Some((*alpha, *cutoff)),
            FreqProfile::EvenBands { .. } => None,
        }
    }

    /// Result of the construction-time envelope check.
    pub fn envelope_ok(&self) -> bool {
        self.envelope_report.passed()
    }

    pub fn envelope_report(&self) -> &EnvelopeReport {
        &self.envelope_report
    }

    /// Check the claimed envelope on a symmetric midpoint grid over
    /// [-u_radius, u_radius]. Midpoints never land on γ = 0, which is outside
    /// the claim. Failures are reported, not raised.
    pub fn validate_envelope(&self, grid_points: usize) -> EnvelopeReport {
        let n = grid_points.max(2);
        let u = self.envelope.u_radius;
        let mut report = EnvelopeReport {
            grid_points: n,
            upper_ok: true,
            lower_ok: true,
            worst_upper: None,
            worst_lower: None,
        };
        for i in 0..n {
            let gamma = u * (2 * i as i64 + 1 - n as i64) as f64 / n as f64;
            if gamma == 0.0 {
                continue;
            }
            let value = self.eval_freq(gamma).abs();
            let upper = self.envelope.d_upper * gamma.abs().powf(self.envelope.alpha);
            let lower = self.envelope.c_lower * gamma.abs().powf(self.envelope.beta);
            if value > upper {
                report.upper_ok = false;
                report.record_upper(gamma, value, upper);
            }
            if value < lower {
                report.lower_ok = false;
                report.record_lower(gamma, value, lower);
            }
        }
        report
    }
}

/// Worst offending grid point of one envelope inequality.
#[derive(Clone, Copy, Debug)]
pub struct EnvelopeViolation {
    pub gamma: f64,
    pub profile_value: f64,
    pub bound_value: f64,
}

#[derive(Clone, Debug)]
pub struct EnvelopeReport {
    pub grid_points: usize,
    pub upper_ok: bool,
    pub lower_ok: bool,
    pub worst_upper: Option<EnvelopeViolation>,
    pub worst_lower: Option<EnvelopeViolation>,
}

impl EnvelopeReport {
    fn empty() -> Self {
        EnvelopeReport {
            grid_points: 0,
            upper_ok: true,
            lower_ok: true,
            worst_upper: None,
            worst_lower: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.upper_ok && self.lower_ok
    }

    fn record_upper(&mut self, gamma: f64, value: f64, bound: f64) {
        let margin = value - bound;
        let worse = match self.worst_upper {
            None => true,
            Some(w) => margin > w.profile_value - w.bound_value,
        };
        if worse {
            self.worst_upper = Some(EnvelopeViolation {
                gamma,
                profile_value: value,
                bound_value: bound,
            });
        }
    }

    fn record_lower(&mut self, gamma: f64, value: f64, bound: f64) {
        let margin = bound - value;
        let worse = match self.worst_lower {
            None => true,
            Some(w) => margin > w.bound_value - w.profile_value,
        };
        if worse {
            self.worst_lower = Some(EnvelopeViolation {
                gamma,
                profile_value: value,
                bound_value: bound,
            });
        }
    }
}

/// Time-side Gabor generator. Indicator windows use the half-open interval
/// [0, length) so that lattice tilings count every point exactly once.
#[derive(Clone, Debug)]
pub struct GaborGenerator {
    length: f64,
    floor_eps: f64,
}

impl GaborGenerator {
    /// g = 1 on [0, length), 0 elsewhere.
    pub fn indicator(length: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(FrameError::invalid(
                "length",
                format!("indicator length must be positive, got {length}"),
            ));
        }
        Ok(GaborGenerator {
            length,
            floor_eps: 1.0,
        })
    }

    pub fn eval_time(&self, x: f64) -> f64 {
        if (0.0..self.length).contains(&x) {
            1.0
        } else {
            0.0
        }
    }

    pub fn support(&self) -> Interval {
        Interval {
            lo: 0.0,
            hi: self.length,
        }
    }

    pub fn support_width(&self) -> f64 {
        self.length
    }

    /// Guaranteed lower bound for |g| on the cover interval.
    pub fn floor_eps(&self) -> f64 {
        self.floor_eps
    }

    /// Half-open interval [0, length) on which |g| ≥ floor_eps.
    pub fn cover_interval(&self) -> Interval {
        Interval {
            lo: 0.0,
            hi: self.length,
        }
    }
}
