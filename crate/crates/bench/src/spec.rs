//! Experiment specifications and the grid points they expand to.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;
use toric_ca::automaton::VelocitySchedule;
use toric_ca::ideal::IdealConfig;
use toric_ca::DecoderConfig;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("no lattice sizes given")]
    NoSizes,
    #[error("no error rates given")]
    NoRates,
    #[error("lattice size {0} is below 3")]
    SizeTooSmall(usize),
    #[error("error rate {0} is outside [0, 1]")]
    RateOutOfRange(f64),
    #[error("samples must be at least 1")]
    ZeroSamples,
    #[error("eta must lie in (0, 1/2], got {0}")]
    InvalidEta(f64),
    #[error("field velocity must be at least 1")]
    ZeroVelocity,
    #[error("abort multiplier must be positive and finite, got {0}")]
    InvalidAbortMultiplier(f64),
    #[error("alpha must be finite, got {0}")]
    InvalidAlpha(f64),
    #[error("a threshold scan needs at least {0} values of {1}")]
    GridTooSmall(usize, &'static str),
    #[error("cannot parse {0:?}: {1}")]
    Parse(String, String),
    #[error("unknown decoder {0:?}, expected one of ca2d, ca2dstar, ca3d, ideal, rep1d")]
    UnknownDecoder(String),
    #[error("{0} does not apply to decoder {1}")]
    NotApplicable(&'static str, DecoderKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    Ca2d,
    Ca2dStar,
    Ca3d,
    Ideal,
    Rep1d,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 5] = [
        DecoderKind::Ca2d,
        DecoderKind::Ca2dStar,
        DecoderKind::Ca3d,
        DecoderKind::Ideal,
        DecoderKind::Rep1d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::Ca2d => "ca2d",
            DecoderKind::Ca2dStar => "ca2dstar",
            DecoderKind::Ca3d => "ca3d",
            DecoderKind::Ideal => "ideal",
            DecoderKind::Rep1d => "rep1d",
        }
    }

    /// Stable word mixed into per-trial seeds.
    pub fn id(self) -> u64 {
        match self {
            DecoderKind::Ca2d => 1,
            DecoderKind::Ca2dStar => 2,
            DecoderKind::Ca3d => 3,
            DecoderKind::Ideal => 4,
            DecoderKind::Rep1d => 5,
        }
    }

    /// Abort after `multiplier * L` sequences by default.
    pub fn default_abort_multiplier(self) -> f64 {
        match self {
            DecoderKind::Ca3d => 1.0,
            _ => 10.0,
        }
    }

    pub fn is_automaton(self) -> bool {
        matches!(
            self,
            DecoderKind::Ca2d | DecoderKind::Ca2dStar | DecoderKind::Ca3d
        )
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DecoderKind {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DecoderKind::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| SpecError::UnknownDecoder(s.to_string()))
    }
}

/// Parses `a:b:step` (inclusive) or a comma separated list. Range values
/// are rounded to 10 decimals so `0.04:0.09:0.005` hits `0.09` exactly.
pub fn parse_reals(s: &str) -> Result<Vec<f64>, SpecError> {
    let err = |m: &str| SpecError::Parse(s.to_string(), m.to_string());
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| err(&e.to_string()));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => s
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(num)
            .collect(),
        3 => {
            let (a, b, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            if !(step > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
                return Err(err(
                    "expected start:stop:step with step > 0 and stop >= start",
                ));
            }
            let n = ((b - a) / step + 1e-9).floor() as usize + 1;
            if n > 1_000_000 {
                return Err(err("range has too many points"));
            }
            Ok((0..n).map(|i| round10(a + i as f64 * step)).collect())
        }
        _ => Err(err("expected start:stop:step or a comma separated list")),
    }
}

/// Integer version of [`parse_reals`].
pub fn parse_sizes(s: &str) -> Result<Vec<usize>, SpecError> {
    let err = |m: &str| SpecError::Parse(s.to_string(), m.to_string());
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| err(&e.to_string()));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => s
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(num)
            .collect(),
        3 => {
            let (a, b, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            if step == 0 || b < a {
                return Err(err(
                    "expected start:stop:step with step > 0 and stop >= start",
                ));
            }
            Ok((a..=b).step_by(step).collect())
        }
        _ => Err(err("expected start:stop:step or a comma separated list")),
    }
}

fn round10(x: f64) -> f64 {
    (x * 1e10).round() / 1e10
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub decoder: DecoderKind,
    pub sizes: Vec<usize>,
    pub rates: Vec<f64>,
    /// Field velocity of the constant-velocity 2D automaton.
    pub velocity: u32,
    pub eta: f64,
    pub alpha: f64,
    pub samples: usize,
    pub seed: u64,
    /// Abort after `round(abort_multiplier * L)` sequences. `None` uses the
    /// decoder default (`L` for ca3d, `10 L` otherwise).
    pub abort_multiplier: Option<f64>,
}

impl ExperimentSpec {
    pub const DEFAULT_VELOCITY: u32 = 10;

    pub fn new(
        decoder: DecoderKind,
        sizes: Vec<usize>,
        rates: Vec<f64>,
        samples: usize,
        seed: u64,
    ) -> Self {
        Self {
            decoder,
            sizes,
            rates,
            velocity: Self::DEFAULT_VELOCITY,
            eta: 0.5,
            alpha: 1.0,
            samples,
            seed,
            abort_multiplier: None,
        }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if self.sizes.is_empty() {
            return Err(SpecError::NoSizes);
        }
        if self.rates.is_empty() {
            return Err(SpecError::NoRates);
        }
        if let Some(&l) = self.sizes.iter().find(|&&l| l < 3) {
            return Err(SpecError::SizeTooSmall(l));
        }
        if let Some(&p) = self.rates.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(SpecError::RateOutOfRange(p));
        }
        if self.samples == 0 {
            return Err(SpecError::ZeroSamples);
        }
        if !(self.eta > 0.0 && self.eta <= 0.5) {
            return Err(SpecError::InvalidEta(self.eta));
        }
        if self.velocity == 0 {
            return Err(SpecError::ZeroVelocity);
        }
        if !self.alpha.is_finite() {
            return Err(SpecError::InvalidAlpha(self.alpha));
        }
        if let Some(m) = self.abort_multiplier {
            if !(m > 0.0 && m.is_finite()) {
                return Err(SpecError::InvalidAbortMultiplier(m));
            }
        }
        Ok(())
    }

    pub fn validate_scan(&self) -> Result<(), SpecError> {
        self.validate()?;
        if self.sizes.len() < 2 {
            return Err(SpecError::GridTooSmall(2, "L"));
        }
        if self.rates.len() < 3 {
            return Err(SpecError::GridTooSmall(3, "p"));
        }
        Ok(())
    }

    pub fn point(&self, size: usize, rate: f64) -> Point {
        let mult = self
            .abort_multiplier
            .unwrap_or(self.decoder.default_abort_multiplier());
        Point {
            decoder: self.decoder,
            size,
            rate,
            velocity: self.velocity,
            eta: self.eta,
            alpha: self.alpha,
            samples: self.samples,
            seed: self.seed,
            abort_sequences: ((mult * size as f64).round() as usize).max(1),
        }
    }

    /// Grid points, sizes outermost.
    pub fn points(&self) -> Vec<Point> {
        self.sizes
            .iter()
            .flat_map(|&l| self.rates.iter().map(move |&p| self.point(l, p)))
            .collect()
    }
}

/// One `(decoder, L, p)` cell of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub decoder: DecoderKind,
    pub size: usize,
    pub rate: f64,
    pub velocity: u32,
    pub eta: f64,
    pub alpha: f64,
    pub samples: usize,
    pub seed: u64,
    pub abort_sequences: usize,
}

impl Point {
    pub fn schedule(&self) -> Option<VelocitySchedule> {
        match self.decoder {
            DecoderKind::Ca2d => Some(VelocitySchedule::Constant(self.velocity)),
            DecoderKind::Ca2dStar => Some(VelocitySchedule::TWO_D_STAR),
            DecoderKind::Ca3d => Some(VelocitySchedule::THREE_D),
            DecoderKind::Ideal | DecoderKind::Rep1d => None,
        }
    }

    /// The `c` column: the constant velocity, the 2D* formula, or empty for
    /// the potential decoders.
    pub fn velocity_label(&self) -> String {
        self.schedule()
            .map(|s| s.describe(self.size))
            .unwrap_or_default()
    }

    pub fn decoder_config(&self) -> Option<DecoderConfig> {
        let schedule = self.schedule()?;
        Some(DecoderConfig {
            eta: self.eta,
            schedule,
            aux_dim: if self.decoder == DecoderKind::Ca3d {
                3
            } else {
                2
            },
            abort_sequences: self.abort_sequences,
            hop_probability: 0.5,
        })
    }

    pub fn ideal_config(&self) -> IdealConfig {
        IdealConfig {
            abort_sequences: self.abort_sequences,
            ..IdealConfig::new(self.alpha, self.size)
        }
    }
}
