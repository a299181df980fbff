//! Monte Carlo drivers.
//!
//! Every trial draws its noise and decoder randomness from a seed derived
//! from `(master, decoder, L, p, index)`, so results do not depend on how
//! rayon splits the work. Results are collected in index order and reduced
//! with exact integer sums.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use toric_ca::automaton::{DecodeOutcome, DecodeStatus, Decoder};
use toric_ca::ideal::{ideal_decode, repetition_decode, IdealConfig, RepetitionCodeState};
use toric_ca::seed::{derive_seed, stream_rng, Stream};
use toric_ca::toric::sample_iid_noise;
use toric_ca::ErrorConfig;

use crate::spec::{DecoderKind, ExperimentSpec, Point, SpecError};
use crate::stats::{self, LineFit};

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BenchRecord {
    pub decoder: DecoderKind,
    #[serde(rename = "L")]
    pub size: usize,
    pub p: f64,
    pub c: String,
    /// Only for the automaton decoders.
    pub eta: Option<f64>,
    /// Only for the potential decoders.
    pub alpha: Option<f64>,
    pub samples: u64,
    pub failures: u64,
    pub aborts: u64,
    pub fail_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Over successful runs; NaN when there were none.
    pub mean_sequences: f64,
    pub stddev_sequences: f64,
    pub seed: u64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialResult {
    pub status: DecodeStatus,
    pub sequences: usize,
}

impl From<DecodeOutcome> for TrialResult {
    fn from(o: DecodeOutcome) -> Self {
        Self {
            status: o.status,
            sequences: o.sequences_used,
        }
    }
}

pub fn trial_seed(point: &Point, index: u64) -> u64 {
    derive_seed(
        point.seed,
        &[
            point.decoder.id(),
            point.size as u64,
            point.rate.to_bits(),
            index,
        ],
    )
}

/// The toric-code error of trial `index`, as the runner would sample it.
pub fn trial_error(point: &Point, index: u64) -> ErrorConfig {
    let mut rng = stream_rng(trial_seed(point, index), Stream::Noise);
    sample_iid_noise(point.size, point.rate, &mut rng).expect("validated rate")
}

/// Per-worker decoder state.
enum Engine {
    Automaton(Box<Decoder<f64>>),
    Ideal(IdealConfig),
    Repetition(IdealConfig),
}

impl Engine {
    fn new(point: &Point) -> Self {
        match point.decoder {
            DecoderKind::Ideal => Engine::Ideal(point.ideal_config()),
            DecoderKind::Rep1d => Engine::Repetition(point.ideal_config()),
            _ => {
                let cfg = point.decoder_config().expect("automaton decoder");
                Engine::Automaton(Box::new(
                    Decoder::new(point.size, cfg).expect("validated config"),
                ))
            }
        }
    }

    fn run(&mut self, point: &Point, index: u64) -> TrialResult {
        let seed = trial_seed(point, index);
        let mut noise = stream_rng(seed, Stream::Noise);
        let mut rng = stream_rng(seed, Stream::Decoder);
        let outcome = match self {
            Engine::Repetition(cfg) => {
                let state = RepetitionCodeState::sample(point.size, point.rate, &mut noise);
                repetition_decode(&state.expect("validated rate"), cfg, &mut rng).map(|r| r.0)
            }
            Engine::Ideal(cfg) => {
                let e =
                    sample_iid_noise(point.size, point.rate, &mut noise).expect("validated rate");
                ideal_decode(&e, cfg, &mut rng).map(|r| r.0)
            }
            Engine::Automaton(decoder) => {
                let e =
                    sample_iid_noise(point.size, point.rate, &mut noise).expect("validated rate");
                decoder.run(&e, &mut rng).map(|r| r.0)
            }
        };
        outcome.expect("trial failed on a validated point").into()
    }
}

/// Runs every trial of `point` on the current rayon pool, in index order.
pub fn run_trials(point: &Point) -> Vec<TrialResult> {
    (0..point.samples as u64)
        .into_par_iter()
        .map_init(|| Engine::new(point), |engine, i| engine.run(point, i))
        .collect()
}

/// Reduces trial results to a record. Only integer sums are formed, so the
/// result is independent of the order of `trials`.
pub fn aggregate(point: &Point, trials: &[TrialResult], wall_time_s: f64) -> BenchRecord {
    let samples = trials.len() as u64;
    let aborts = trials
        .iter()
        .filter(|t| t.status == DecodeStatus::Abort)
        .count() as u64;
    let failures = trials
        .iter()
        .filter(|t| t.status != DecodeStatus::Success)
        .count() as u64;
    let fail_rate = if samples == 0 {
        0.0
    } else {
        failures as f64 / samples as f64
    };
    let (ci_low, ci_high) = stats::wilson(failures, samples, stats::Z95);
    let (mean_sequences, stddev_sequences) = stats::integer_moments(
        trials
            .iter()
            .filter(|t| t.status == DecodeStatus::Success)
            .map(|t| t.sequences as u64),
    );
    let automaton = point.decoder.is_automaton();
    BenchRecord {
        decoder: point.decoder,
        size: point.size,
        p: point.rate,
        c: point.velocity_label(),
        eta: automaton.then_some(point.eta),
        alpha: (!automaton).then_some(point.alpha),
        samples,
        failures,
        aborts,
        fail_rate,
        ci_low,
        ci_high,
        mean_sequences,
        stddev_sequences,
        seed: point.seed,
        wall_time_s,
    }
}

pub fn estimate_failure_rate(point: &Point) -> BenchRecord {
    let start = Instant::now();
    let trials = run_trials(point);
    let rec = aggregate(point, &trials, start.elapsed().as_secs_f64());
    log::info!(
        "{} L={} p={} c={}: {}/{} failed",
        rec.decoder,
        rec.size,
        rec.p,
        rec.c,
        rec.failures,
        rec.samples
    );
    rec
}

/// Estimates every point; points run concurrently and come back in order.
pub fn run_points(points: &[Point]) -> Vec<BenchRecord> {
    points.par_iter().map(estimate_failure_rate).collect()
}

pub fn bench(spec: &ExperimentSpec) -> Result<Vec<BenchRecord>, SpecError> {
    spec.validate()?;
    Ok(run_points(&spec.points()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairCrossing {
    pub small: usize,
    pub large: usize,
    pub crossing: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdScan {
    pub records: Vec<BenchRecord>,
    pub pairs: Vec<PairCrossing>,
    /// Median of the pairwise crossings; `None` means none in range.
    pub crossing: Option<f64>,
}

impl ThresholdScan {
    pub fn crossing_label(&self) -> String {
        match self.crossing {
            Some(p) => format!("{p:.6}"),
            None => "none in range".to_string(),
        }
    }
}

/// Points where `large` rises above `small`, by linear interpolation of the
/// difference between neighboring rates. `rates` must be ascending.
pub fn upward_crossings(rates: &[f64], small: &[f64], large: &[f64]) -> Vec<f64> {
    let d: Vec<f64> = large.iter().zip(small).map(|(b, a)| b - a).collect();
    (1..rates.len())
        .filter(|&i| d[i - 1] < 0.0 && d[i] > 0.0)
        .map(|i| rates[i - 1] + (rates[i] - rates[i - 1]) * (-d[i - 1]) / (d[i] - d[i - 1]))
        .collect()
}

/// Crossing estimate from a fail-rate table `rates_by_size[k][j]` for size
/// `sizes[k]` at rate `rates[j]`: the median over size pairs of each pair's
/// median upward crossing.
pub fn estimate_crossing(
    sizes: &[usize],
    rates: &[f64],
    rates_by_size: &[Vec<f64>],
) -> (Vec<PairCrossing>, Option<f64>) {
    let mut order: Vec<usize> = (0..rates.len()).collect();
    order.sort_by(|&a, &b| rates[a].total_cmp(&rates[b]));
    let sorted_rates: Vec<f64> = order.iter().map(|&j| rates[j]).collect();
    let sorted = |k: usize| -> Vec<f64> { order.iter().map(|&j| rates_by_size[k][j]).collect() };
    let mut pairs = Vec::new();
    for a in 0..sizes.len() {
        for b in a + 1..sizes.len() {
            let (s, t) = if sizes[a] <= sizes[b] { (a, b) } else { (b, a) };
            let xs = upward_crossings(&sorted_rates, &sorted(s), &sorted(t));
            pairs.push(PairCrossing {
                small: sizes[s],
                large: sizes[t],
                crossing: stats::median(&xs),
            });
        }
    }
    let found: Vec<f64> = pairs.iter().filter_map(|p| p.crossing).collect();
    let crossing = stats::median(&found);
    (pairs, crossing)
}

pub fn threshold_scan(spec: &ExperimentSpec) -> Result<ThresholdScan, SpecError> {
    spec.validate_scan()?;
    let records = run_points(&spec.points());
    let table: Vec<Vec<f64>> = spec
        .sizes
        .iter()
        .enumerate()
        .map(|(k, _)| {
            let row = &records[k * spec.rates.len()..(k + 1) * spec.rates.len()];
            row.iter().map(|r| r.fail_rate).collect()
        })
        .collect();
    let (pairs, crossing) = estimate_crossing(&spec.sizes, &spec.rates, &table);
    Ok(ThresholdScan {
        records,
        pairs,
        crossing,
    })
}

/// Constant-velocity 2D fail rates over `(L, c)`, sizes outermost.
pub fn velocity_sweep(
    spec: &ExperimentSpec,
    velocities: &[u32],
) -> Result<Vec<BenchRecord>, SpecError> {
    spec.validate()?;
    if spec.decoder != DecoderKind::Ca2d {
        return Err(SpecError::NotApplicable("velocity-sweep", spec.decoder));
    }
    if velocities.is_empty() || velocities.contains(&0) {
        return Err(SpecError::ZeroVelocity);
    }
    let mut points = Vec::new();
    for &l in &spec.sizes {
        for &c in velocities {
            for &p in &spec.rates {
                points.push(Point {
                    velocity: c,
                    ..spec.point(l, p)
                });
            }
        }
    }
    Ok(run_points(&points))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuntimeProfile {
    pub records: Vec<BenchRecord>,
    /// `mean_sequences = a + b ln L` per rate, over sizes with successes.
    pub fits: Vec<(f64, Option<LineFit>)>,
}

pub fn runtime_profile(spec: &ExperimentSpec) -> Result<RuntimeProfile, SpecError> {
    spec.validate()?;
    if !matches!(spec.decoder, DecoderKind::Ca2dStar | DecoderKind::Ca3d) {
        return Err(SpecError::NotApplicable("runtime", spec.decoder));
    }
    let records = run_points(&spec.points());
    let fits = spec
        .rates
        .iter()
        .map(|&p| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = records
                .iter()
                .filter(|r| r.p == p && r.mean_sequences.is_finite())
                .map(|r| ((r.size as f64).ln(), r.mean_sequences))
                .unzip();
            (p, stats::fit_line(&xs, &ys))
        })
        .collect();
    Ok(RuntimeProfile { records, fits })
}
