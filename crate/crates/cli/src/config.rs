//! TOML run configuration and its conversion into domain objects.

use anyhow::{anyhow, bail, Context, Result};
use frameweave::frame_core::{SweepSettings, SystemParams, WeavingPattern};
use frameweave::generators::{Band, Envelope, GaborGenerator, WaveletGenerator};
use frameweave::packets::FinitePacket;
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub generator: Option<GeneratorSpec>,
    pub system: Option<SystemSpec>,
    #[serde(default)]
    pub pattern: Option<PatternSpec>,
    #[serde(default)]
    pub numeric: NumericSpec,
    #[serde(default)]
    pub packet: Option<PacketSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeneratorSpec {
    /// |γ|^alpha on |γ| <= cutoff, frequency side.
    Powerlaw { alpha: f64, cutoff: f64 },
    /// Even piecewise-constant profile; bands are [lo, hi, value] rows on
    /// the positive axis, with an explicit envelope claim.
    EvenBands {
        bands: Vec<[f64; 3]>,
        envelope: EnvelopeSpec,
    },
    /// Time-side box window of the given length.
    Indicator { length: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeSpec {
    pub c_lower: f64,
    pub d_upper: f64,
    pub alpha: f64,
    pub beta: f64,
    pub u_radius: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub a: f64,
    pub b: f64,
    pub n: u32,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PatternSpec {
    Constant {
        ell: u32,
    },
    Periodic {
        #[serde(default)]
        start: i64,
        choices: Vec<u32>,
    },
    /// Finite window of choices; everything outside uses family 0.
    Windowed {
        #[serde(default)]
        start: i64,
        choices: Vec<u32>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericSpec {
    /// Sweep resolution (points per period).
    pub grid: usize,
    pub seed: u64,
    /// Batch size: sampled patterns, random signals, random packets.
    pub count: usize,
    /// Cross-term summation range.
    pub k_max: i64,
    pub window_start: i64,
    pub window_len: usize,
    /// Scale indices whose family-0 atoms are dropped in `erasure`.
    pub erased: Vec<i64>,
    /// Frequency band [lo, hi] for random test signals.
    pub signal_band: Option<[f64; 2]>,
    pub signal_points: usize,
    pub bumps: usize,
    /// Dimensions for the counterexample growth table.
    pub m_values: Vec<u64>,
    /// Rayleigh trials (fusion bounds) and mapped-packet trials.
    pub trials: usize,
}

impl Default for NumericSpec {
    fn default() -> Self {
        NumericSpec {
            grid: 4096,
            seed: 0,
            count: 100,
            k_max: 50,
            window_start: 0,
            window_len: 10,
            erased: Vec::new(),
            signal_band: None,
            signal_points: 4096,
            bumps: 3,
            m_values: vec![2, 4, 8, 16, 64],
            trials: 100,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    /// Plain-text matrix file: one vector per line, blank line between
    /// subspaces; resolved relative to the config file.
    pub file: String,
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub report: Option<String>,
    pub curve: Option<String>,
}

/// Everything a command needs: the parsed file plus CLI overrides.
#[derive(Debug)]
pub struct RunConfig {
    pub file: FileConfig,
    pub seed: u64,
    pub grid: usize,
    pub out_dir: PathBuf,
    config_dir: PathBuf,
}

impl RunConfig {
    pub fn load(
        config_path: &Path,
        out_dir: Option<PathBuf>,
        seed: Option<u64>,
        grid: Option<usize>,
    ) -> Result<RunConfig> {
        let text = std::fs::read_to_string(config_path)
            .with_context(|| format!("cannot read config {}", config_path.display()))?;
        let file: FileConfig = toml::from_str(&text)
            .with_context(|| format!("malformed config {}", config_path.display()))?;
        let seed = seed.unwrap_or(file.numeric.seed);
        let grid = grid.unwrap_or(file.numeric.grid);
        if grid == 0 {
            bail!("numeric.grid must be positive");
        }
        if file.numeric.signal_points < 2 {
            bail!("numeric.signal_points must be at least 2");
        }
        Ok(RunConfig {
            file,
            seed,
            grid,
            out_dir: out_dir.unwrap_or_else(|| PathBuf::from(".")),
            config_dir: config_path
                .parent()
                .map(Path::to_path_buf)
                .unwrap_or_else(|| PathBuf::from(".")),
        })
    }

    pub fn sweep_settings(&self) -> SweepSettings {
        SweepSettings::with_grid(self.grid)
    }

    pub fn wavelet_generator(&self) -> Result<WaveletGenerator> {
        match self
            .file
            .generator
            .as_ref()
            .ok_or_else(|| anyhow!("[generator] section required"))?
        {
            GeneratorSpec::Powerlaw { alpha, cutoff } => {
                Ok(WaveletGenerator::power_law(*alpha, *cutoff)?)
            }
            GeneratorSpec::EvenBands { bands, envelope } => {
                let bands = bands
                    .iter()
                    .map(|&[lo, hi, value]| Band { lo, hi, value })
                    .collect();
                Ok(WaveletGenerator::even_bands(
                    bands,
                    Envelope {
                        c_lower: envelope.c_lower,
                        d_upper: envelope.d_upper,
                        alpha: envelope.alpha,
                        beta: envelope.beta,
                        u_radius: envelope.u_radius,
                    },
                )?)
            }
            GeneratorSpec::Indicator { .. } => {
                bail!("generator.kind = \"indicator\" is time-side; use a gabor-* command")
            }
        }
    }

    pub fn gabor_generator(&self) -> Result<GaborGenerator> {
        match self
            .file
            .generator
            .as_ref()
            .ok_or_else(|| anyhow!("[generator] section required"))?
        {
            GeneratorSpec::Indicator { length } => Ok(GaborGenerator::indicator(*length)?),
            _ => bail!("gabor commands need generator.kind = \"indicator\""),
        }
    }

    pub fn system(&self) -> Result<SystemParams> {
        let spec = self
            .file
            .system
            .as_ref()
            .ok_or_else(|| anyhow!("[system] section required"))?;
        Ok(SystemParams::new(spec.a, spec.b, spec.n)?)
    }

    pub fn system_raw(&self) -> Result<(f64, f64, u32)> {
        let spec = self
            .file
            .system
            .as_ref()
            .ok_or_else(|| anyhow!("[system] section required"))?;
        Ok((spec.a, spec.b, spec.n))
    }

    /// The configured pattern, or the all-zero family when absent.
    pub fn pattern(&self) -> Result<WeavingPattern> {
        Ok(match &self.file.pattern {
            None => WeavingPattern::constant(0),
            Some(PatternSpec::Constant { ell }) => WeavingPattern::constant(*ell),
            Some(PatternSpec::Periodic { start, choices }) => {
                WeavingPattern::periodic(*start, choices.clone())?
            }
            Some(PatternSpec::Windowed { start, choices }) => {
                WeavingPattern::windowed(*start, choices.clone())
            }
        })
    }

    pub fn signal_band(&self) -> Result<(f64, f64)> {
        let [lo, hi] = self
            .file
            .numeric
            .signal_band
            .ok_or_else(|| anyhow!("numeric.signal_band = [lo, hi] required"))?;
        if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi) {
            bail!("numeric.signal_band must satisfy 0 < lo < hi");
        }
        Ok((lo, hi))
    }

    pub fn packet(&self) -> Result<FinitePacket> {
        let spec = self
            .file
            .packet
            .as_ref()
            .ok_or_else(|| anyhow!("[packet] section required"))?;
        let path = self.config_dir.join(&spec.file);
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("cannot read packet file {}", path.display()))?;
        let packet = FinitePacket::from_text(&text)
            .with_context(|| format!("packet file {}", path.display()))?;
        match &spec.weights {
            Some(w) => Ok(packet.with_weights(w.clone())?),
            None => Ok(packet),
        }
    }

    pub fn report_path(&self, command: &str) -> PathBuf {
        let name = self
            .file
            .output
            .report
            .clone()
            .unwrap_or_else(|| format!("{command}-report.json"));
        self.out_dir.join(name)
    }

    pub fn curve_path(&self) -> Option<PathBuf> {
        self.file
            .output
            .curve
            .as_ref()
            .map(|name| self.out_dir.join(name))
    }
}
