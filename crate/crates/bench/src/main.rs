use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use toric_ca::SpectralModel;
use toric_ca_bench::output::{write_records, Format};
use toric_ca_bench::profile::{self, ProfileTable};
use toric_ca_bench::runner::{self, trial_error, BenchRecord};
use toric_ca_bench::selftest::run_selftest;
use toric_ca_bench::spec::{parse_reals, parse_sizes, DecoderKind, ExperimentSpec, SpecError};

#[derive(Parser)]
#[command(
    name = "toric-ca",
    version,
    about = "Field decoders for the 2D toric code: Monte Carlo benchmarks"
)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Failure rates over an (L, p) grid.
    Bench(GridArgs),
    /// Failure rates over an (L, p) grid plus the estimated crossing.
    Threshold {
        #[command(flatten)]
        grid: GridArgs,
        /// Also write the crossing summary as JSON.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Constant-velocity 2D failure rates over (L, c); --c takes a list.
    VelocitySweep(GridArgs),
    /// Mean sequences to success against L, with an a + b ln L fit.
    Runtime(GridArgs),
    /// Stationary-field and bound tables.
    FieldProfile(ProfileArgs),
    /// Randomised invariant suite.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
}

#[derive(Args)]
struct GridArgs {
    /// ca2d, ca2dstar, ca3d, ideal or rep1d.
    #[arg(long)]
    decoder: Option<DecoderKind>,
    /// Lattice sizes: a list `8,12,16` or a range `8:16:4`.
    #[arg(long = "L")]
    sizes: String,
    /// Error rates: a list or an inclusive range `0.04:0.09:0.005`.
    #[arg(long)]
    p: String,
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Field velocity for ca2d (a list for velocity-sweep).
    #[arg(long)]
    c: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    eta: f64,
    /// Potential exponent for ideal and rep1d.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    alpha: f64,
    /// Abort after this many multiples of L sequences.
    #[arg(long)]
    abort_mult: Option<f64>,
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Output file; stdout when absent or `-`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write wall_time_s as 0 so reruns are byte-identical.
    #[arg(long)]
    omit_timing: bool,
    /// Print the first N sampled errors of each point to stderr.
    #[arg(long, default_value_t = 0)]
    dump_errors: usize,
}

#[derive(Args)]
struct ProfileArgs {
    /// kernel, equilibration or self-interaction.
    #[arg(long, default_value = "kernel")]
    table: ProfileTable,
    #[arg(long = "L", default_value_t = 16)]
    size: usize,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 0.5)]
    eta: f64,
    /// Updates for the equilibration table.
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    /// Row spacing for the equilibration table.
    #[arg(long, default_value_t = 10)]
    every: usize,
    /// Tolerances for the self-interaction table.
    #[arg(long, default_value = "0.1,0.05")]
    eps: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl GridArgs {
    fn spec(&self, default_decoder: DecoderKind) -> Result<ExperimentSpec, SpecError> {
        let decoder = self.decoder.unwrap_or(default_decoder);
        let mut spec = ExperimentSpec::new(
            decoder,
            parse_sizes(&self.sizes)?,
            parse_reals(&self.p)?,
            self.samples,
            self.seed,
        );
        spec.eta = self.eta;
        spec.alpha = self.alpha;
        spec.abort_multiplier = self.abort_mult;
        if let Some(c) = &self.c {
            spec.velocity = c
                .trim()
                .parse()
                .map_err(|e: std::num::ParseIntError| SpecError::Parse(c.clone(), e.to_string()))?;
        }
        spec.validate()?;
        Ok(spec)
    }

    fn velocities(&self) -> Result<Vec<u32>, SpecError> {
        let c = self.c.as_deref().unwrap_or("1,5,10,15,50,200");
        let v = parse_sizes(c)?;
        v.into_iter()
            .map(|x| u32::try_from(x).map_err(|e| SpecError::Parse(c.to_string(), e.to_string())))
            .collect()
    }

    fn dump(&self, spec: &ExperimentSpec) {
        if self.dump_errors == 0 || spec.decoder == DecoderKind::Rep1d {
            return;
        }
        for point in spec.points() {
            for i in 0..self.dump_errors.min(point.samples) as u64 {
                eprintln!(
                    "# {} L={} p={} sample {i}",
                    point.decoder, point.size, point.rate
                );
                eprint!("{}", trial_error(&point, i).ascii());
            }
        }
    }

    fn emit(&self, mut records: Vec<BenchRecord>) -> anyhow::Result<()> {
        if self.omit_timing {
            records.iter_mut().for_each(|r| r.wall_time_s = 0.0);
        }
        with_output(self.out.as_ref(), |w| {
            write_records(w, &records, self.format)
        })
    }
}

fn with_output(
    path: Option<&PathBuf>,
    f: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> anyhow::Result<()> {
    match path.filter(|p| p.as_os_str() != "-") {
        Some(p) => {
            let file = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()?;
    }
    match cli.command {
        Command::Bench(args) => {
            let spec = args.spec(DecoderKind::Ca3d)?;
            args.dump(&spec);
            args.emit(runner::bench(&spec)?)?;
        }
        Command::Threshold { grid, summary } => {
            let spec = grid.spec(DecoderKind::Ca3d)?;
            spec.validate_scan()?;
            grid.dump(&spec);
            let scan = runner::threshold_scan(&spec)?;
            for pair in &scan.pairs {
                let c = pair
                    .crossing
                    .map_or("none in range".to_string(), |p| format!("{p:.6}"));
                eprintln!("crossing L={} vs L={}: {c}", pair.small, pair.large);
            }
            eprintln!("crossing: {}", scan.crossing_label());
            if let Some(path) = &summary {
                let json = serde_json::json!({
                    "decoder": spec.decoder,
                    "crossing": scan.crossing,
                    "crossing_label": scan.crossing_label(),
                    "pairs": scan.pairs,
                });
                std::fs::write(path, format!("{json}\n"))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            grid.emit(scan.records)?;
        }
        Command::VelocitySweep(args) => {
            let spec = args.spec_for_sweep()?;
            args.emit(runner::velocity_sweep(&spec, &args.velocities()?)?)?;
        }
        Command::Runtime(args) => {
            let spec = args.spec(DecoderKind::Ca3d)?;
            let profile = runner::runtime_profile(&spec)?;
            for (p, fit) in &profile.fits {
                match fit {
                    Some(f) => eprintln!(
                        "p={p}: mean_sequences = {:.4} + {:.4} ln L (R^2 = {:.4})",
                        f.intercept, f.slope, f.r_squared
                    ),
                    None => eprintln!("p={p}: not enough sizes to fit"),
                }
            }
            args.emit(profile.records)?;
        }
        Command::FieldProfile(args) => {
            let model = SpectralModel::new(args.size, args.dim, args.eta).map_err(|e| {
                SpecError::Parse(
                    format!("L={} dim={} eta={}", args.size, args.dim, args.eta),
                    e.to_string(),
                )
            })?;
            let table = match args.table {
                ProfileTable::Kernel => profile::kernel_table(&model)?,
                ProfileTable::Equilibration => {
                    profile::equilibration_table(&model, args.steps, args.every)?
                }
                ProfileTable::SelfInteraction => {
                    profile::self_interaction_table(&model, &parse_reals(&args.eps)?)?
                }
            };
            with_output(args.out.as_ref(), |w| table.write_csv(w))?;
        }
        Command::Selftest { seed, cases } => {
            let checks = run_selftest(seed, cases);
            let mut ok = true;
            for c in &checks {
                let verdict = if c.passed() { "PASS" } else { "FAIL" };
                println!(
                    "{verdict} {} ({} cases, {} violations) {}",
                    c.name, c.cases, c.violations, c.detail
                );
                ok &= c.passed();
            }
            if !ok {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

impl GridArgs {
    fn spec_for_sweep(&self) -> Result<ExperimentSpec, SpecError> {
        let decoder = self.decoder.unwrap_or(DecoderKind::Ca2d);
        let mut spec = ExperimentSpec::new(
            decoder,
            parse_sizes(&self.sizes)?,
            parse_reals(&self.p)?,
            self.samples,
            self.seed,
        );
        spec.eta = self.eta;
        spec.abort_multiplier = self.abort_mult;
        spec.validate()?;
        Ok(spec)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<SpecError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
