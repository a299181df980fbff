//! Randomised invariant checks run by the `selftest` subcommand.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use toric_ca::automaton::anyon_update;
use toric_ca::seed::{derive_seed, stream_rng, Stream};
use toric_ca::toric::{sample_iid_noise, Orientation};
use toric_ca::{ChargeField, Direction, ErrorConfig, ScalarField, SpectralModel};

use crate::output::{to_bytes, Format};
use crate::runner::run_points;
use crate::spec::{DecoderKind, ExperimentSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub cases: usize,
    pub violations: usize,
    /// First violation, if any.
    pub detail: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

struct Tally {
    check: Check,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            check: Check {
                name,
                cases: 0,
                violations: 0,
                detail: String::new(),
            },
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.check.cases += 1;
        if !ok {
            if self.check.violations == 0 {
                self.check.detail = detail();
            }
            self.check.violations += 1;
        }
    }
}

fn rng_for(seed: u64, check: u64) -> ChaCha8Rng {
    stream_rng(derive_seed(seed, &[check]), Stream::Noise)
}

fn random_cells<R: Rng>(rng: &mut R, cells: usize, max: usize) -> Vec<usize> {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| rng.gen_range(0..cells)).collect()
}

pub fn syndrome_linearity(seed: u64, cases: usize) -> Check {
    let mut rng = rng_for(seed, 1);
    let mut tally = Tally::new("syndrome linearity");
    for _ in 0..cases {
        let l = rng.gen_range(3..10);
        let p = rng.gen_range(0.0..1.0);
        let e1 = sample_iid_noise(l, p, &mut rng).expect("p in range");
        let e2 = sample_iid_noise(l, p, &mut rng).expect("p in range");
        let lhs = e1.xor(&e2).expect("same size").syndrome();
        let rhs = e1.syndrome().xor(&e2.syndrome());
        tally.record(lhs == rhs, || format!("L={l} p={p}"));
    }
    tally.check
}

pub fn even_parity(seed: u64, cases: usize) -> Check {
    let mut rng = rng_for(seed, 2);
    let mut tally = Tally::new("even anyon parity");
    for _ in 0..cases {
        let l = rng.gen_range(3..12);
        let p = rng.gen_range(0.0..1.0);
        let count = sample_iid_noise(l, p, &mut rng)
            .expect("p in range")
            .syndrome()
            .count();
        tally.record(count % 2 == 0, || format!("L={l} p={p} anyons={count}"));
    }
    tally.check
}

pub fn stabilizer_invariance(seed: u64, cases: usize) -> Check {
    let mut rng = rng_for(seed, 3);
    let mut tally = Tally::new("stabilizer invariance of logical_failure");
    for _ in 0..cases {
        let l = rng.gen_range(3..10);
        let (row, column) = (rng.gen_bool(0.5), rng.gen_bool(0.5));
        let mut e = ErrorConfig::empty(l);
        if row {
            let y = rng.gen_range(0..l);
            (0..l).for_each(|x| e.toggle_link(x + l * y, Direction::PlusX));
        }
        if column {
            let x = rng.gen_range(0..l);
            (0..l).for_each(|y| e.toggle_link(x + l * y, Direction::PlusY));
        }
        for c in random_cells(&mut rng, l * l, 2 * l) {
            e.apply_stabilizer(c);
        }
        let before = e.logical_failure();
        for c in random_cells(&mut rng, l * l, 2 * l) {
            e.apply_stabilizer(c);
        }
        let after = e.logical_failure();
        let ok = matches!((&before, &after), (Ok(a), Ok(b)) if *a == *b && *a == (row || column));
        tally.record(ok, || {
            format!("L={l} row={row} column={column} {before:?} -> {after:?}")
        });
    }
    tally.check
}

pub fn field_growth(seed: u64, cases: usize) -> Check {
    let mut rng = rng_for(seed, 4);
    let mut tally = Tally::new("field total grows by Q per update");
    for _ in 0..cases {
        let l = rng.gen_range(3..10);
        let d = rng.gen_range(2..=3);
        let eta = rng.gen_range(0.01..=0.5);
        let q = ChargeField::from_cells(l, &random_cells(&mut rng, l * l, 12)).anyons();
        let mut phi = ScalarField::zeros(l, d).expect("valid lattice");
        for t in 1..=8 {
            phi.update(&q, eta);
            let expect = (t * q.len()) as f64;
            let got = phi.sum();
            tally.record((got - expect).abs() <= 1e-9 * expect.max(1.0), || {
                format!("L={l} D={d} eta={eta} t={t}: sum={got} expected {expect}")
            });
        }
    }
    tally.check
}

pub fn argmax_shift_invariance(seed: u64, cases: usize) -> Check {
    let mut rng = rng_for(seed, 5);
    let mut tally = Tally::new("additive-constant argmax invariance");
    for _ in 0..cases {
        let l = rng.gen_range(3..9);
        let mut e = ErrorConfig::empty(l);
        for c in random_cells(&mut rng, l * l, 8) {
            e.toggle(
                if rng.gen_bool(0.5) {
                    Orientation::Horizontal
                } else {
                    Orientation::Vertical
                },
                c,
            );
        }
        let q = e.syndrome();
        // dyadic values and an integer shift keep the comparison exact
        let base: Vec<f64> = (0..l * l)
            .map(|_| rng.gen_range(-64i32..64) as f64 / 8.0)
            .collect();
        let k = rng.gen_range(-4096i32..4096) as f64;
        let phi = ScalarField::from_values(l, 2, base.clone()).expect("sized");
        let mut shifted = ScalarField::from_values(l, 2, base).expect("sized");
        shifted.shift(k);
        let s: u64 = rng.gen();
        let a =
            anyon_update(&phi, &e, &q, 0.5, &mut stream_rng(s, Stream::Decoder)).expect("sized");
        let b = anyon_update(&shifted, &e, &q, 0.5, &mut stream_rng(s, Stream::Decoder))
            .expect("sized");
        tally.record(a == b, || format!("L={l} k={k}"));
    }
    tally.check
}

pub fn stationary_superposition(seed: u64, cases: usize) -> Check {
    let mut rng = rng_for(seed, 6);
    let mut tally = Tally::new("superposition of stationary fields");
    for _ in 0..cases {
        let l = rng.gen_range(3..9);
        let d = rng.gen_range(2..=3);
        let eta = [0.25, 0.5][rng.gen_range(0..2)];
        let model = SpectralModel::new(l, d, eta).expect("valid model");
        let qa = ChargeField::from_cells(l, &random_cells(&mut rng, l * l, 6));
        let mut qb = ChargeField::from_cells(l, &random_cells(&mut rng, l * l, 6));
        for c in qa.anyons() {
            if qb.get(c) {
                qb.toggle(c);
            }
        }
        let fa = model.stationary_field(&qa).expect("sized");
        let fb = model.stationary_field(&qb).expect("sized");
        let fab = model.stationary_field(&qa.xor(&qb)).expect("sized");
        let worst = (0..model.cells())
            .map(|i| (fab.values()[i] - fa.values()[i] - fb.values()[i]).abs())
            .fold(0.0, f64::max);
        tally.record(worst <= 1e-10, || {
            format!("L={l} D={d} eta={eta}: max deviation {worst}")
        });
    }
    tally.check
}

/// Runs a small grid on pools of 1, 2 and 4 threads and compares the
/// emitted bytes.
pub fn rerun_identity(seed: u64) -> Check {
    let mut tally = Tally::new("byte-identical reruns under varying --jobs");
    let specs = [
        ExperimentSpec::new(DecoderKind::Ca2d, vec![6, 8], vec![0.05, 0.1], 48, seed),
        ExperimentSpec::new(DecoderKind::Ca3d, vec![6], vec![0.08], 24, seed),
        ExperimentSpec::new(DecoderKind::Ideal, vec![6], vec![0.08], 24, seed),
        ExperimentSpec::new(DecoderKind::Rep1d, vec![16], vec![0.2], 48, seed),
    ];
    for spec in &specs {
        let outputs: Vec<(usize, Vec<u8>, Vec<u8>)> = [1, 2, 4]
            .into_iter()
            .map(|jobs| {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(jobs)
                    .build()
                    .expect("thread pool");
                let mut records = pool.install(|| run_points(&spec.points()));
                records.iter_mut().for_each(|r| r.wall_time_s = 0.0);
                (
                    jobs,
                    to_bytes(&records, Format::Csv),
                    to_bytes(&records, Format::Json),
                )
            })
            .collect();
        for (jobs, csv, json) in &outputs[1..] {
            let ok = *csv == outputs[0].1 && *json == outputs[0].2;
            tally.record(ok, || {
                format!(
                    "{} differs between --jobs 1 and --jobs {jobs}",
                    spec.decoder
                )
            });
        }
    }
    tally.check
}

pub fn run_selftest(seed: u64, cases: usize) -> Vec<Check> {
    vec![
        syndrome_linearity(seed, cases),
        even_parity(seed, cases),
        stabilizer_invariance(seed, cases),
        field_growth(seed, cases),
        argmax_shift_invariance(seed, cases),
        stationary_superposition(seed, cases),
        rerun_identity(seed),
    ]
}
