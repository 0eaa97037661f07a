use clap::{Args, Parser, Subcommand, ValueEnum};
use mixassoc::simgen::{
    default_lambda_grid, power_grid, run_power_study, EtaShape, Method, PowerOptions, PowerScenario, WellbeingScenario,
};
use mixassoc_cli::analysis::{assoc_report, fit_report, moderation_report, plot_data, write_curve, write_points};
use mixassoc_cli::simulate::{write_power_dataset, write_power_rows, write_wellbeing};
use mixassoc_cli::{load_dataset, AnalysisConfig, CliError, LoadedData, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "mixassoc", version, about = "Partial and marginal association between mixed-type outcomes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit each outcome's regression model on the covariates.
    Fit(AnalysisArgs),
    /// Marginal and partial association with bootstrap inference.
    Assoc(AnalysisArgs),
    /// Percentage change from marginal to partial association.
    Moderation {
        #[command(flatten)]
        args: AnalysisArgs,
        /// Second cohort (same columns) to compare moderation against.
        #[arg(long)]
        cohort2: Option<PathBuf>,
    },
    /// Transformed residual pairs and their LOWESS curve.
    Plotdata {
        #[command(flatten)]
        args: AnalysisArgs,
        /// Outcome pair as `first,second`; defaults to the first configured pair.
        #[arg(long, value_delimiter = ',')]
        pair: Option<Vec<String>>,
        /// CSV of transformed residual pairs.
        #[arg(long)]
        points: PathBuf,
        /// CSV of the LOWESS curve.
        #[arg(long)]
        curve: PathBuf,
        /// LOWESS span as a fraction of the points.
        #[arg(long)]
        frac: Option<f64>,
        /// LOWESS robustness iterations.
        #[arg(long)]
        iters: Option<usize>,
    },
    /// Generate a synthetic dataset.
    Simulate(SimulateArgs),
    /// Run a size/power study and write the rejection-rate table.
    Power(PowerArgs),
}

#[derive(Args)]
struct AnalysisArgs {
    /// JSON analysis configuration.
    #[arg(long)]
    config: PathBuf,
    /// Data file, overriding the one named in the config.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Surrogate draws per residual.
    #[arg(long)]
    m: Option<usize>,
    /// Bootstrap replicates.
    #[arg(long)]
    b: Option<usize>,
    /// One minus the confidence level.
    #[arg(long)]
    alpha: Option<f64>,
    /// Equivalence margin for the composite p-value.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scenario {
    Wellbeing,
    Power,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    scenario: Scenario,
    #[arg(long)]
    seed: u64,
    /// JSON file with scenario parameters; missing fields keep their defaults.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Well-being effects of anxiety levels 2..=5.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    beta_a: Option<Vec<f64>>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, value_enum)]
    shape: Option<Shape>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Linear,
    Quadratic,
    Exponential,
}

impl From<Shape> for EtaShape {
    fn from(s: Shape) -> Self {
        match s {
            Shape::Linear => EtaShape::LinearEta,
            Shape::Quadratic => EtaShape::QuadraticEta,
            Shape::Exponential => EtaShape::ExponentialEta,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Proposed,
    Lrt,
}

#[derive(Args)]
struct PowerArgs {
    #[arg(long)]
    seed: u64,
    /// JSON file with base scenario parameters.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',')]
    shapes: Option<Vec<Shape>>,
    /// Association strengths; 0 gives the null.
    #[arg(long, value_delimiter = ',')]
    lambdas: Option<Vec<f64>>,
    #[arg(long)]
    n: Option<usize>,
    /// Datasets per grid cell.
    #[arg(long)]
    reps: Option<usize>,
    /// Bootstrap replicates of the proposed test.
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Rejection threshold for p-values.
    #[arg(long)]
    level: Option<f64>,
    #[arg(long, value_enum, value_delimiter = ',')]
    methods: Option<Vec<MethodArg>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Data(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let mut w = output(path)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Data(e.to_string()))?;
    writeln!(w, "{text}")
        .and_then(|_| w.flush())
        .map_err(|e| CliError::Data(format!("write failed: {e}")))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn prepare(args: &AnalysisArgs) -> Result<(AnalysisConfig, LoadedData)> {
    let mut cfg = AnalysisConfig::load(&args.config)?;
    if let Some(d) = &args.data {
        cfg.data = Some(d.clone());
    }
    if let Some(m) = args.m {
        cfg.m = m;
    }
    if let Some(b) = args.b {
        cfg.b = b;
    }
    if let Some(a) = args.alpha {
        cfg.alpha = a;
    }
    if args.delta.is_some() {
        cfg.delta = args.delta;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    let path = cfg
        .data
        .clone()
        .ok_or_else(|| CliError::Config("no data file given (config `data` or --data)".into()))?;
    let data = load_dataset(&path, &cfg)?;
    Ok((cfg, data))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit(args) => {
            let (_, data) = prepare(&args)?;
            write_json(&fit_report(&data)?, args.out.as_deref())
        }
        Command::Assoc(args) => {
            let (cfg, data) = prepare(&args)?;
            write_json(&assoc_report(&cfg, &data)?, args.out.as_deref())
        }
        Command::Moderation { args, cohort2 } => {
            let (cfg, data) = prepare(&args)?;
            let other = cohort2.map(|p| load_dataset(&p, &cfg)).transpose()?;
            write_json(&moderation_report(&cfg, &data, other.as_ref())?, args.out.as_deref())
        }
        Command::Plotdata {
            args,
            pair,
            points,
            curve,
            frac,
            iters,
        } => {
            let (mut cfg, data) = prepare(&args)?;
            if let Some(f) = frac {
                cfg.plot.frac = f;
            }
            if let Some(i) = iters {
                cfg.plot.iters = i;
            }
            cfg.validate()?;
            let (i, j) = match pair {
                Some(p) if p.len() == 2 => (cfg.outcome_index(&p[0])?, cfg.outcome_index(&p[1])?),
                Some(_) => return Err(CliError::Config("--pair takes two outcome columns".into())),
                None => *cfg
                    .pairs()?
                    .first()
                    .ok_or_else(|| CliError::Config("plotdata needs two outcomes".into()))?,
            };
            if i == j {
                return Err(CliError::Config("plotdata needs two distinct outcomes".into()));
            }
            let pd = plot_data(
                &data.pair(i, j)?,
                &data.outcomes[i].spec,
                &data.outcomes[j].spec,
                cfg.seed,
                &cfg.plot,
            )?;
            write_points(&pd, output(Some(&points))?)?;
            write_curve(&pd, &cfg.plot, output(Some(&curve))?)
        }
        Command::Simulate(a) => match a.scenario {
            Scenario::Wellbeing => {
                let mut sc: WellbeingScenario = match &a.params {
                    Some(p) => read_json(p)?,
                    None => WellbeingScenario::default(),
                };
                if let Some(n) = a.n {
                    sc.n = n;
                }
                if let Some(b) = &a.beta_a {
                    sc.beta_a = b
                        .as_slice()
                        .try_into()
                        .map_err(|_| CliError::Config("--beta-a takes four values".into()))?;
                }
                write_wellbeing(&sc, a.seed, output(a.out.as_deref())?)
            }
            Scenario::Power => {
                let mut sc: PowerScenario = match &a.params {
                    Some(p) => read_json(p)?,
                    None => PowerScenario::default(),
                };
                if let Some(n) = a.n {
                    sc.n = n;
                }
                if let Some(l) = a.lambda {
                    sc.lambda = l;
                }
                if let Some(s) = a.shape {
                    sc.shape = s.into();
                }
                write_power_dataset(&sc, a.seed, output(a.out.as_deref())?)
            }
        },
        Command::Power(a) => {
            let mut base: PowerScenario = match &a.params {
                Some(p) => read_json(p)?,
                None => PowerScenario::default(),
            };
            if let Some(n) = a.n {
                base.n = n;
            }
            if let Some(r) = a.reps {
                base.reps = r;
            }
            let mut opts = PowerOptions::default();
            if let Some(b) = a.b {
                opts.b = b;
            }
            if let Some(m) = a.m {
                opts.m = m;
            }
            if let Some(l) = a.level {
                opts.level = l;
            }
            if let Some(ms) = &a.methods {
                opts.methods = ms
                    .iter()
                    .map(|m| match m {
                        MethodArg::Proposed => Method::Proposed,
                        MethodArg::Lrt => Method::Lrt,
                    })
                    .collect();
            }
            let shapes: Vec<EtaShape> = match &a.shapes {
                Some(s) => s.iter().map(|&s| s.into()).collect(),
                None => vec![EtaShape::LinearEta, EtaShape::QuadraticEta, EtaShape::ExponentialEta],
            };
            let lambdas = a.lambdas.clone().unwrap_or_else(default_lambda_grid);
            let grid = power_grid(&base, &shapes, &lambdas, a.seed);
            let rows = run_power_study(&grid, &opts)?;
            write_power_rows(&rows, output(a.out.as_deref())?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
