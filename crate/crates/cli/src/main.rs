use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lacunary::equidistribution::{
    monte_carlo_bernstein, psi_series, weyl_means, BernsteinDistribution, CirclePoint, Exclusion,
    DEFAULT_EXCLUSION_DENOMINATOR, DEFAULT_EXCLUSION_RADIUS, DEFAULT_GRID_CAP,
};
use lacunary::integer_sets::{
    classify_growth, generate_geometric, generate_irregular, generate_polynomial, generate_powers,
    generate_primes, generate_range, generate_sumset, FitRange, DEFAULT_GROWTH_MARGIN,
};
use lacunary::partitions::{decompose, verify_block_growth, DEFAULT_GROSS_RATIO};
use lacunary::random_selection::{
    blockwise_schedule, monte_carlo_dependence, select, DensitySchedule,
};
use lacunary::relations::is_s_independent;
use lacunary::{IntegerSet, Partition, Rational, Scalar};
use lacunary_cli::config::{BudgetSpec, ExperimentConfig, PartitionSpec};
use lacunary_cli::pipeline::{budgets, independence_csv, psi_csv, run};
use lacunary_cli::record::persist;
use lacunary_cli::{exit, exit_code, read_set, UsageError};
use num_bigint::BigInt;
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "lacunary",
    version,
    about = "Random lacunary subsets of polynomial sequences: s-independence and Weyl equidistribution"
)]
struct Cli {
    /// Seed for every random draw (overrides the config seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for records.
    #[arg(long, global = true, env = "LACUNARY_OUT")]
    out: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a finite integer set.
    Generate(GenerateArgs),
    /// Cut a set into annular blocks.
    Partition {
        #[arg(long)]
        set: PathBuf,
        #[command(flatten)]
        partition: PartitionArgs,
        /// Include block elements in the output.
        #[arg(long)]
        inline: bool,
        /// First block checked for |E_k| ≥ |I_k|^ε.
        #[arg(long, default_value_t = 1)]
        tail_start: usize,
    },
    /// Draw a random subset with Bernoulli selectors.
    Select {
        #[arg(long)]
        set: PathBuf,
        #[command(flatten)]
        schedule: ScheduleArgs,
        /// Compare selector words against exact rational densities.
        #[arg(long)]
        exact: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Check s-independence; exits 4 when a relation is found.
    Independence {
        #[arg(long)]
        set: PathBuf,
        #[arg(long, default_value_t = 2)]
        s: u32,
    },
    /// Successive means f_k(t) at chosen points.
    Weyl {
        #[arg(long)]
        set: PathBuf,
        /// Number of leading elements (default: all).
        #[arg(long)]
        k: Option<usize>,
        /// `a/q`, `sqrt:m` or a decimal number of turns; repeatable.
        #[arg(long = "point", required = true)]
        points: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_EXCLUSION_DENOMINATOR)]
        exclusion_q: u64,
        #[arg(long, default_value_t = DEFAULT_EXCLUSION_RADIUS)]
        radius: f64,
    },
    /// ψ(k) for one selection.
    Psi {
        #[arg(long)]
        set: PathBuf,
        #[command(flatten)]
        schedule: ScheduleArgs,
        /// Prefix lengths; repeatable.
        #[arg(long = "k", required = true)]
        ks: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_GRID_CAP)]
        grid_cap: u64,
        #[arg(long)]
        csv: bool,
    },
    /// Monte Carlo validation of the probability bounds.
    #[command(subcommand)]
    Montecarlo(MonteCarlo),
    /// Run an experiment pipeline and persist its record.
    Pipeline {
        /// Built-in config used when --config is absent.
        #[arg(long, value_enum, default_value_t = Preset::MainDyadic)]
        preset: Preset,
        /// Override the number of seeds.
        #[arg(long)]
        trials: Option<u64>,
        /// Print the effective config and exit.
        #[arg(long)]
        print_config: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    MainDyadic,
    MainGross,
    BlockIndependence,
}

#[derive(Subcommand)]
enum MonteCarlo {
    /// Frequency of s-dependence for uniform selections of expected size ℓ.
    Dependence {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        ell: u64,
        #[arg(long, default_value_t = 2)]
        s: u32,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
    },
    /// Tail frequencies of sums of bounded centered variables.
    Bernstein {
        #[arg(long)]
        n: u64,
        /// `rademacher`, `selector:δ` or `scaled:c`.
        #[arg(long, default_value = "rademacher")]
        dist: String,
        /// Deviations; comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
}

#[derive(Args)]
struct GenerateArgs {
    /// Primes up to --limit.
    #[arg(long)]
    primes: bool,
    #[arg(long)]
    limit: Option<u64>,
    /// k^d for k ≤ --k-max.
    #[arg(long)]
    powers: Option<u32>,
    /// Comma-separated coefficients, constant term first; k ≤ --k-max.
    #[arg(long)]
    polynomial: Option<String>,
    /// base^k for k ≤ --k-max.
    #[arg(long)]
    geometric: Option<u64>,
    #[arg(long)]
    k_max: Option<u64>,
    /// Integers in [--lo, --hi].
    #[arg(long)]
    range: bool,
    #[arg(long, allow_hyphen_values = true)]
    lo: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    hi: Option<i64>,
    /// Nested-gap sequence with this many levels.
    #[arg(long)]
    irregular: Option<u32>,
    /// Sums of --j distinct elements of this set.
    #[arg(long)]
    sumset: Option<PathBuf>,
    #[arg(long)]
    j: Option<usize>,
    /// Report growth instead of writing the set.
    #[arg(long)]
    growth: bool,
    #[arg(long, value_enum, default_value_t = SetFormat::Json)]
    format: SetFormat,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SetFormat {
    Json,
    Text,
}

#[derive(Args)]
struct PartitionArgs {
    /// Dyadic cut points 2^k for k ≤ K.
    #[arg(long, value_name = "K")]
    dyadic: Option<u32>,
    /// Gross cut points 2^{k!} for k ≤ K.
    #[arg(long, value_name = "K")]
    gross: Option<u32>,
    /// Exponents e_k with p_k = 2^{e_k} for a gross partition.
    #[arg(long, value_delimiter = ',')]
    exponents: Option<Vec<u64>>,
    #[arg(long, default_value_t = DEFAULT_GROSS_RATIO)]
    ratio: f64,
    /// Explicit cut points p_0 < p_1 < …
    #[arg(long, value_delimiter = ',')]
    cuts: Option<Vec<String>>,
}

impl PartitionArgs {
    fn spec(&self) -> Result<Option<PartitionSpec>> {
        let given = [self.dyadic.is_some(), self.gross.is_some(), self.cuts.is_some()];
        if given.iter().filter(|g| **g).count() > 1 {
            return Err(UsageError("choose one of --dyadic, --gross, --cuts".into()).into());
        }
        Ok(if let Some(k_max) = self.dyadic {
            Some(PartitionSpec::Dyadic { k_max })
        } else if let Some(k_max) = self.gross {
            Some(PartitionSpec::Gross {
                k_max,
                exponents: self.exponents.clone(),
                ratio_threshold: self.ratio,
            })
        } else {
            self.cuts.as_ref().map(|c| PartitionSpec::Custom { cut_points: c.clone() })
        })
    }

    fn build(&self) -> Result<Partition> {
        self.spec()?
            .ok_or_else(|| UsageError("a partition is required (--dyadic, --gross or --cuts)".into()))?
            .build()
    }
}

#[derive(Args)]
struct ScheduleArgs {
    /// Constant density δ for every element.
    #[arg(long)]
    density: Option<f64>,
    #[command(flatten)]
    partition: PartitionArgs,
    /// Per-block budget: `linear`, `factorial`, `full` or a constant.
    #[arg(long)]
    budget: Option<String>,
    /// Lower budgets above |E_k| to |E_k|.
    #[arg(long)]
    cap: bool,
}

impl ScheduleArgs {
    fn budget_spec(&self) -> Result<BudgetSpec> {
        let b = self.budget.as_deref().unwrap_or("linear");
        Ok(match b {
            "linear" => BudgetSpec::Linear,
            "factorial" => BudgetSpec::Factorial,
            "full" => BudgetSpec::Full,
            other => BudgetSpec::Constant {
                ell: other
                    .parse()
                    .map_err(|_| UsageError(format!("unknown budget {other:?}")))?,
            },
        })
    }

    fn build<T: Scalar>(&self, set: &IntegerSet) -> Result<DensitySchedule<T>> {
        if let Some(d) = self.density {
            if self.partition.spec()?.is_some() || self.budget.is_some() {
                return Err(UsageError("--density excludes partition and budget flags".into()).into());
            }
            let delta = T::from_f64(d).ok_or_else(|| UsageError(format!("bad density {d}")))?;
            return Ok(DensitySchedule::uniform(set, delta)?);
        }
        let partition = self.partition.build()?;
        let decomposition = decompose(set, &partition);
        let config = ExperimentConfig {
            budget: self.budget_spec()?,
            cap_budgets: self.cap,
            ..ExperimentConfig::block_independence()
        };
        Ok(blockwise_schedule(&decomposition, &budgets(&config, &decomposition)?)?)
    }
}

fn emit(value: &impl Serialize, output: Option<&Path>) -> Result<()> {
    let json = serde_json::to_string_pretty(value)?;
    match output {
        Some(p) => lacunary_cli::record::write_new(p, &format!("{json}\n")),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn generate(args: &GenerateArgs) -> Result<i32> {
    let need_k = || args.k_max.ok_or_else(|| UsageError("--k-max is required".into()));
    let mut chosen = Vec::new();
    if args.primes {
        chosen.push("primes");
    }
    for (flag, on) in [
        ("powers", args.powers.is_some()),
        ("polynomial", args.polynomial.is_some()),
        ("geometric", args.geometric.is_some()),
        ("range", args.range),
        ("irregular", args.irregular.is_some()),
        ("sumset", args.sumset.is_some()),
    ] {
        if on {
            chosen.push(flag);
        }
    }
    if chosen.len() != 1 {
        return Err(UsageError("choose exactly one sequence".into()).into());
    }
    let set = match chosen[0] {
        "primes" => generate_primes(args.limit.ok_or_else(|| UsageError("--limit is required".into()))?),
        "powers" => generate_powers(args.powers.unwrap_or(1), need_k()?)?,
        "polynomial" => {
            let coeffs = args
                .polynomial
                .as_deref()
                .unwrap_or_default()
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<BigInt>()
                        .map_err(|_| UsageError(format!("bad coefficient {c:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let g = generate_polynomial(&coeffs, need_k()?)?;
            if g.collapsed > 0 {
                eprintln!("{} duplicate values collapsed", g.collapsed);
            }
            g.set
        }
        "geometric" => {
            let k = u32::try_from(need_k()?).map_err(|_| UsageError("--k-max too large".into()))?;
            generate_geometric(args.geometric.unwrap_or(2), k)?
        }
        "range" => {
            let (Some(lo), Some(hi)) = (args.lo, args.hi) else {
                return Err(UsageError("--range needs --lo and --hi".into()).into());
            };
            generate_range(lo, hi)
        }
        "irregular" => generate_irregular(args.irregular.unwrap_or(1))?,
        _ => {
            let base = read_set(args.sumset.as_deref().unwrap_or(Path::new("")))?;
            generate_sumset(&base, args.j.ok_or_else(|| UsageError("--j is required".into()))?)?
        }
    };
    if args.growth {
        emit(&classify_growth(&set, &FitRange::tail(&set), DEFAULT_GROWTH_MARGIN)?, args.output.as_deref())?;
        return Ok(exit::SUCCESS);
    }
    match args.format {
        SetFormat::Json => emit(&set, args.output.as_deref())?,
        SetFormat::Text => match &args.output {
            Some(p) => lacunary_cli::record::write_new(p, &set.to_text())?,
            None => print!("{}", set.to_text()),
        },
    }
    Ok(exit::SUCCESS)
}

fn pipeline(cli: &Cli, preset: Preset, trials: Option<u64>, print_config: bool) -> Result<i32> {
    let mut config = match &cli.config {
        Some(p) => ExperimentConfig::load(p).map_err(|e| UsageError(format!("{e:#}")))?,
        None => match preset {
            Preset::MainDyadic => ExperimentConfig::main_theorem_dyadic(),
            Preset::MainGross => ExperimentConfig::main_theorem_gross(),
            Preset::BlockIndependence => ExperimentConfig::block_independence(),
        },
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(t) = trials {
        config.trials = t;
    }
    if print_config {
        println!("{}", config.to_json());
        return Ok(exit::SUCCESS);
    }
    let record = run(&config)?;
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let name = serde_json::to_value(config.pipeline)?
        .as_str()
        .unwrap_or("pipeline")
        .to_string();
    let mut extras = Vec::new();
    if let Some(csv) = independence_csv(&record) {
        extras.push(("independence.csv", csv));
    }
    if let Some(csv) = psi_csv(&record) {
        extras.push(("psi.csv", csv));
    }
    let written = persist(&out, &name, &record, &extras)?;
    print!("{}", record.summary());
    println!("record: {}", written.record.display());
    println!("config: {}", written.config.display());
    Ok(if record.verdict.holds { exit::SUCCESS } else { exit::FALSIFIED })
}

fn parse_distribution(s: &str) -> Result<BernsteinDistribution> {
    let bad = || UsageError(format!("unknown distribution {s:?}"));
    Ok(match s.split_once(':') {
        None if s == "rademacher" => BernsteinDistribution::Rademacher,
        Some(("selector", d)) => BernsteinDistribution::CenteredSelector {
            delta: d.parse().map_err(|_| bad())?,
        },
        Some(("scaled", c)) => BernsteinDistribution::ScaledRademacher {
            scale: c.parse().map_err(|_| bad())?,
        },
        _ => return Err(bad().into()),
    })
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Generate(args) => generate(args),
        Command::Partition {
            set,
            partition,
            inline,
            tail_start,
        } => {
            let set = read_set(set)?;
            let d = decompose(&set, &partition.build()?);
            emit(
                &serde_json::json!({
                    "decomposition": d.summary(*inline),
                    "growth": verify_block_growth(&d, *tail_start),
                }),
                None,
            )?;
            Ok(exit::SUCCESS)
        }
        Command::Select {
            set,
            schedule,
            exact,
            output,
        } => {
            let set = read_set(set)?;
            let trial = if *exact {
                select(&set, &schedule.build::<Rational>(&set)?, seed)?
            } else {
                select(&set, &schedule.build::<f64>(&set)?, seed)?
            };
            emit(&trial.selected, output.as_deref())?;
            eprintln!(
                "selected {} of {} (seed {seed}, mask {})",
                trial.selected.len(),
                set.len(),
                trial.bitmap_hex()
            );
            Ok(exit::SUCCESS)
        }
        Command::Independence { set, s } => {
            let report = is_s_independent(&read_set(set)?, *s)?;
            emit(&report, None)?;
            Ok(if report.independent { exit::SUCCESS } else { exit::FALSIFIED })
        }
        Command::Weyl {
            set,
            k,
            points,
            exclusion_q,
            radius,
        } => {
            let set = read_set(set)?;
            let points = points
                .iter()
                .map(|p| p.parse::<CirclePoint>().map_err(|e| UsageError(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            let exclusion = Exclusion {
                max_denominator: *exclusion_q,
                radius_constant: *radius,
            };
            emit(&weyl_means(&set, k.unwrap_or(set.len()), &points, Some(exclusion))?, None)?;
            Ok(exit::SUCCESS)
        }
        Command::Psi {
            set,
            schedule,
            ks,
            grid_cap,
            csv,
        } => {
            let set = read_set(set)?;
            let schedule = schedule.build::<f64>(&set)?;
            let trial = select(&set, &schedule, seed)?;
            let series = psi_series(&set, &trial, &schedule, ks, *grid_cap)?;
            if *csv {
                print!("{}", series.to_csv());
            } else {
                emit(&series, None)?;
            }
            Ok(exit::SUCCESS)
        }
        Command::Montecarlo(MonteCarlo::Dependence { set, ell, s, trials }) => {
            let est = monte_carlo_dependence(&read_set(set)?, *ell, *s, *trials, seed)?;
            emit(&est, None)?;
            Ok(if est.within_bound(3.0) { exit::SUCCESS } else { exit::FALSIFIED })
        }
        Command::Montecarlo(MonteCarlo::Bernstein { n, dist, a, trials }) => {
            let report = monte_carlo_bernstein(*n, parse_distribution(dist)?, a, *trials, seed)?;
            emit(&report, None)?;
            Ok(if report.rows.iter().all(|r| r.within_bound()) { exit::SUCCESS } else { exit::FALSIFIED })
        }
        Command::Pipeline {
            preset,
            trials,
            print_config,
        } => pipeline(cli, *preset, *trials, *print_config),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(exit::FAILURE as u8);
        }
    }
    match dispatch(&cli).context("lacunary") {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
