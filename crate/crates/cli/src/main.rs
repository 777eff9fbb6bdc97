//! `meanscope`: classify representation functions of operator means, scan
//! parameter regions, evaluate Hansen criteria, search for Ando-Hiai
//! counterexamples and rerun the scripted reproductions.

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use meanscope::classify::{check, GridSpec, Property, ScanFamily};
use meanscope::config::{Family, FunctionSpec, HansenParams, OutputFormat, RunConfig, ScanParams};
use meanscope::hansen::{evaluate, theorem_counterexample, Criterion, HansenDensity, Method};
use meanscope::matmean::ando_hiai_search;
use meanscope::reproduce::{self, Experiment};
use meanscope::classify::region_scan;

#[derive(Parser)]
#[command(name = "meanscope", version, about = "Numerical toolkit for Kubo-Ando operator means")]
struct Cli {
    /// JSON run configuration; command-line flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Report format
    #[arg(long, global = true)]
    format: Option<OutputFormat>,

    /// Write the report here instead of standard output
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test a function for GCV, GCC, PMI, PMD, PMI_r, PMI_inf or Loewner positivity
    Classify(ClassifyArgs),
    /// Rerun a scripted experiment and report every intermediate check
    Reproduce {
        /// theorem_gcv_pmi, section5_separation, region_uab or region_stolarsky
        name: Experiment,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Evaluate a Hansen density or one of its integral criteria
    Hansen(HansenArgs),
    /// Search for matrices with AσB >= I but A^pσB^p not >= I
    Fuzz(FuzzArgs),
    /// Compare a property with its analytic region over a parameter grid
    Scan(ScanArgs),
}

#[derive(Args, Default)]
struct FunctionArgs {
    /// power, binomial, uab, stolarsky, section5, hansen, theorem, geodesic, arithmetic, harmonic
    #[arg(long)]
    family: Option<Family>,
    /// Exponent of the power and Stolarsky families
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Exponent of the binomial family
    #[arg(long, allow_hyphen_values = true)]
    bp: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    /// Geodesic atom weights
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    /// Geodesic atom exponents
    #[arg(long, value_delimiter = ',')]
    exponents: Option<Vec<f64>>,
    /// Density file of the hansen family
    #[arg(long)]
    density: Option<PathBuf>,
    /// Use the adjoint 1/f(1/t)
    #[arg(long)]
    adjoint: bool,
    /// Use the inverse of t^shift f(t)
    #[arg(long)]
    inverse_shift: Option<f64>,
}

impl FunctionArgs {
    /// The spec given on the command line, else the configured one.
    fn resolve(&self, config: &RunConfig) -> anyhow::Result<FunctionSpec> {
        let Some(family) = self.family else {
            return config.function.clone().context("no function given (use --family or a config file)");
        };
        let density = match &self.density {
            Some(path) => Some(read_density(path)?),
            None => None,
        };
        Ok(FunctionSpec {
            family,
            alpha: self.alpha,
            p: self.bp,
            a: self.a,
            b: self.b,
            weights: self.weights.clone(),
            exponents: self.exponents.clone(),
            density,
            adjoint: self.adjoint,
            inverse_shift: self.inverse_shift,
        })
    }
}

#[derive(Args, Default)]
struct GridArgs {
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    n_points: Option<usize>,
    /// Exponents r of the power tests
    #[arg(long, value_delimiter = ',')]
    r_values: Option<Vec<f64>>,
    /// Allowed violation of each criterion statistic
    #[arg(long)]
    slack: Option<f64>,
}

impl GridArgs {
    fn apply(&self, config: &mut RunConfig) {
        let grid: &mut GridSpec = &mut config.grid;
        if let Some(v) = self.t_min {
            grid.t_min = v;
        }
        if let Some(v) = self.t_max {
            grid.t_max = v;
        }
        if let Some(v) = self.n_points {
            grid.n_points = v;
        }
        if let Some(v) = &self.r_values {
            grid.r_values = v.clone();
        }
        if let Some(v) = self.slack {
            config.tolerances.criterion_slack = v;
        }
    }
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    function: FunctionArgs,
    /// Comma-separated properties: gcv, gcc, pmi, pmd, pmi_r, pmi_inf, om
    #[arg(long, value_delimiter = ',')]
    props: Option<Vec<String>>,
    /// Exponent for pmi_r
    #[arg(long)]
    r: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args)]
struct HansenArgs {
    /// Density file (JSON list of {from, to, value} pieces)
    #[arg(long, conflicts_with = "theorem")]
    density: Option<PathBuf>,
    /// Use the built-in separating density
    #[arg(long)]
    theorem: bool,
    /// eval, pmi or gcv
    #[arg(long, default_value = "eval")]
    criterion: CriterionArg,
    /// Evaluation points; the grid is used when absent
    #[arg(long, value_delimiter = ',')]
    t: Option<Vec<f64>>,
    /// Exponents for the pmi criterion
    #[arg(long, value_delimiter = ',')]
    r: Option<Vec<f64>>,
    /// Evaluate by quadrature instead of the closed form
    #[arg(long)]
    quadrature: bool,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum CriterionArg {
    Eval,
    Pmi,
    Gcv,
}

#[derive(Args)]
struct FuzzArgs {
    #[command(flatten)]
    function: FunctionArgs,
    /// Power p > 1 in the implication
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, env = "MEANSCOPE_SEED")]
    seed: Option<u64>,
}

#[derive(Args)]
struct ScanArgs {
    /// uab, stolarsky or binomial
    #[arg(long)]
    family: ScanFamilyArg,
    /// gcv, gcc, pmi or pmd
    #[arg(long, default_value = "gcv")]
    property: Property,
    #[arg(long, default_value_t = 0.25)]
    step: f64,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ScanFamilyArg {
    Uab,
    Stolarsky,
    Binomial,
}

fn read_density(path: &Path) -> anyhow::Result<HansenDensity> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    HansenDensity::from_json(&text).with_context(|| format!("malformed density {}", path.display()))
}

fn load_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            RunConfig::from_json(&text).with_context(|| format!("malformed config {}", path.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(format) = cli.format {
        config.format = format;
    }
    if cli.output.is_some() {
        config.output = cli.output.clone();
    }
    Ok(config)
}

/// Parses the `--props` list; a bare `pmi_r` takes its exponent from `--r`.
fn parse_properties(names: &[String], r: Option<f64>) -> anyhow::Result<Vec<Property>> {
    names
        .iter()
        .map(|name| {
            if name.trim().eq_ignore_ascii_case("pmi_r") {
                let r = r.context("pmi_r needs --r")?;
                Ok(format!("pmi_r({r})").parse::<Property>()?)
            } else {
                Ok(name.parse::<Property>()?)
            }
        })
        .collect()
}

/// What a finished command wants to report and how it should exit.
struct Outcome {
    body: String,
    /// Exit code 1: a property was violated, a witness found or a check failed.
    negative: bool,
}

fn run_classify(args: &ClassifyArgs, mut config: RunConfig) -> anyhow::Result<Outcome> {
    config.function = Some(args.function.resolve(&config)?);
    if let Some(names) = &args.props {
        config.properties = parse_properties(names, args.r)?;
    }
    if config.properties.is_empty() {
        bail!("no properties given (use --props)");
    }
    args.grid.apply(&mut config);
    config.validate()?;
    let f = config.function.as_ref().expect("resolved").build()?;
    let reports = config
        .properties
        .iter()
        .map(|&p| check(p, &f, &config.grid, &config.tolerances))
        .collect::<Result<Vec<_>, _>>()?;
    let negative = reports.iter().any(|r| !r.holds());
    Ok(Outcome { body: render::classify(&config, &reports)?, negative })
}

fn run_reproduce(name: Experiment, grid: &GridArgs, mut config: RunConfig) -> anyhow::Result<Outcome> {
    config.experiment = Some(name);
    grid.apply(&mut config);
    config.validate()?;
    let result = reproduce::run(name, &config.grid, &config.tolerances)?;
    Ok(Outcome { negative: !result.passed, body: render::reproduction(&config, &result)? })
}

fn run_hansen(args: &HansenArgs, mut config: RunConfig) -> anyhow::Result<Outcome> {
    let density = match (&args.density, args.theorem) {
        (Some(path), _) => read_density(path)?,
        (None, true) => theorem_counterexample(),
        (None, false) => match &config.hansen {
            Some(h) => h.density.clone(),
            None => bail!("no density given (use --density FILE or --theorem)"),
        },
    };
    let criterion = match args.criterion {
        CriterionArg::Eval => Criterion::Eval,
        CriterionArg::Pmi => Criterion::Pmi,
        CriterionArg::Gcv => Criterion::Gcv,
    };
    let method = if args.quadrature { Method::Quadrature } else { Method::ClosedForm };
    args.grid.apply(&mut config);
    config.hansen = Some(HansenParams {
        density,
        criterion,
        t_values: args.t.clone(),
        r_values: args.r.clone().unwrap_or_default(),
        method,
    });
    config.validate()?;
    let params = config.hansen.as_ref().expect("set above");
    let ts: Vec<f64> = match &params.t_values {
        Some(ts) => ts.clone(),
        None => config.grid.log_points().into_iter().map(f64::exp).collect(),
    };
    let rs: Vec<Option<f64>> = match criterion {
        Criterion::Pmi => params.r_values.iter().map(|&r| Some(r)).collect(),
        _ => vec![None],
    };
    let mut rows = Vec::with_capacity(ts.len() * rs.len());
    for &r in &rs {
        for &t in &ts {
            rows.push(evaluate(&params.density, criterion, t, r, method)?);
        }
    }
    Ok(Outcome { body: render::hansen(&config, &rows)?, negative: false })
}

fn run_fuzz(args: &FuzzArgs, mut config: RunConfig) -> anyhow::Result<Outcome> {
    config.function = Some(args.function.resolve(&config)?);
    if let Some(p) = args.p {
        config.search.p = p;
    }
    if let Some(t) = args.trials {
        config.search.trials = t;
    }
    if let Some(d) = args.dim {
        config.search.dim = d;
    }
    if let Some(s) = args.seed {
        config.search.seed = s;
    }
    config.validate()?;
    let f = config.function.as_ref().expect("resolved").build()?;
    let report = ando_hiai_search(&f, &config.search)?;
    Ok(Outcome { negative: report.found(), body: render::fuzz(&config, &report)? })
}

fn run_scan(args: &ScanArgs, mut config: RunConfig) -> anyhow::Result<Outcome> {
    let family = match args.family {
        ScanFamilyArg::Uab => ScanFamily::Uab,
        ScanFamilyArg::Stolarsky => ScanFamily::Stolarsky,
        ScanFamilyArg::Binomial => ScanFamily::Binomial,
    };
    args.grid.apply(&mut config);
    config.scan = Some(ScanParams { family, property: args.property, step: args.step });
    config.validate()?;
    let points = family.grid(args.step)?;
    let scan = region_scan(family, &points, args.property, &config.grid, &config.tolerances)?;
    Ok(Outcome { negative: !scan.interior_mismatches().is_empty(), body: render::scan(&config, &scan)? })
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let config = load_config(cli)?;
    match &cli.command {
        Command::Classify(args) => run_classify(args, config),
        Command::Reproduce { name, grid } => run_reproduce(*name, grid, config),
        Command::Hansen(args) => run_hansen(args, config),
        Command::Fuzz(args) => run_fuzz(args, config),
        Command::Scan(args) => run_scan(args, config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.output {
        Some(path) => fs::write(path, &outcome.body).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{}", outcome.body);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    ExitCode::from(if outcome.negative { 1 } else { 0 })
}
