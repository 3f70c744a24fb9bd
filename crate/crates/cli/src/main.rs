//! `quadbench`: run integrations, sweeps, diagnostics and heat-equation
//! experiments from the command line.
//!
//! Exit codes: 0 on success, 2 when an integration raised a warning, 64 on a
//! usage error, 1 on any other failure.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use quadbench::diagnostics::{self, noise_floor, recommend_regime};
use quadbench::heat::{self, bias_profile, FourierSeries, HeatConfig};
use quadbench::report::{fmt_seconds, fmt_value, fmt_warnings, Format, SweepSpec, SweepTarget};
use quadbench::training::TrainingData;
use quadbench::{
    integrate, integrate_contour, FinanceParams, IntegrandVariant, PrecisionContext, Quartic, QuarticParams,
    RuleId, Tolerances,
};

const EXIT_WARNING: u8 = 2;
const EXIT_USAGE: u8 = 64;
const DIGITS_ENV: &str = "QUADBENCH_DIGITS";

#[derive(Parser, Debug)]
#[command(name = "quadbench", version, about = "Precision-aware adaptive quadrature benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one integration and print value, fevals, time and warnings.
    Integrate(IntegrateArgs),
    /// Run every rule x variant x parameter combination and render a table.
    Sweep(SweepArgs),
    /// Compare clean and corrupted Fourier solutions of the heat equation.
    Heat(HeatArgs),
    /// Grid check of double against high-precision evaluation of the quartic.
    Diagnose(DiagnoseArgs),
    /// Write initial, boundary and interior collocation CSVs.
    EmitTrainingData(TrainingArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    Quartic,
    Finance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Regime {
    Double,
    Hiprec,
    Exact,
}

impl Regime {
    fn label(self) -> &'static str {
        match self {
            Regime::Double => "double",
            Regime::Hiprec => "hiprec",
            Regime::Exact => "exact",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RuleName {
    Gk15,
    Simpson,
    Lobatto,
    Trapz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Md,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Md => Format::Markdown,
            OutputFormat::Json => Format::Json,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Significant decimal digits for high precision (default 32, or $QUADBENCH_DIGITS).
    #[arg(long)]
    digits: Option<u32>,
    #[arg(long, default_value_t = 1e-12)]
    abstol: f64,
    #[arg(long, default_value_t = 1e-8)]
    reltol: f64,
}

impl Common {
    fn digits(&self) -> Result<u32> {
        resolve_digits(self.digits)
    }

    fn tolerances(&self) -> Result<Tolerances, Usage> {
        Tolerances::new(self.abstol, self.reltol).map_err(|e| Usage(e.to_string()))
    }
}

#[derive(Args, Debug)]
struct IntegrateArgs {
    #[arg(long, value_enum, default_value = "quartic")]
    integrand: Family,
    #[arg(long, value_enum, default_value = "double")]
    variant: Regime,
    #[arg(long, value_enum, default_value = "gk15")]
    rule: RuleName,
    /// Trapezoid step.
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    #[arg(long, default_value_t = 1000.0)]
    delta: f64,
    #[arg(long, default_value_t = 0.001)]
    sigma: f64,
    /// Upper limit of the finance contour integral.
    #[arg(long, default_value_t = 100.0)]
    length: f64,
    /// Integrate the quartic times the n-th basis function (Fourier coefficient).
    #[arg(long)]
    coefficient: Option<u32>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum, default_value = "quartic")]
    integrand: Family,
    #[arg(long = "variant", value_enum, value_delimiter = ',', default_value = "double,hiprec,exact")]
    variants: Vec<Regime>,
    #[arg(long = "rule", value_enum, value_delimiter = ',', default_value = "gk15,simpson,lobatto,trapz")]
    rules: Vec<RuleName>,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    /// Quartic parameter values.
    #[arg(long = "delta", value_delimiter = ',', default_value = "1000,10000,100000,250000")]
    deltas: Vec<f64>,
    /// Finance volatility values.
    #[arg(long = "sigma", value_delimiter = ',', default_value = "0.001,0.0001,0.00001")]
    sigmas: Vec<f64>,
    #[arg(long, default_value_t = 100.0)]
    length: f64,
    #[arg(long)]
    coefficient: Option<u32>,
    #[arg(long, value_enum, default_value = "md")]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct HeatArgs {
    #[arg(long, default_value_t = heat::DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value_t = 50)]
    modes: u32,
    #[arg(long, default_value_t = 100000.0)]
    delta: f64,
    /// Regime of the corrupted run; the clean run is always high precision.
    #[arg(long, value_enum, default_value = "double")]
    variant: Regime,
    #[arg(long, value_enum, default_value = "gk15")]
    rule: RuleName,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    /// Output directory.
    #[arg(long, default_value = "heat-out")]
    out: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct DiagnoseArgs {
    #[arg(long, default_value_t = 100000.0)]
    delta: f64,
    #[arg(long, default_value_t = diagnostics::DEFAULT_GRID_SIZE)]
    grid_size: usize,
    #[arg(long, default_value_t = diagnostics::DEFAULT_THRESHOLD)]
    threshold: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    digits: Option<u32>,
}

#[derive(Args, Debug)]
struct TrainingArgs {
    #[arg(long, value_enum, default_value = "exact")]
    variant: Regime,
    #[arg(long, default_value_t = 100000.0)]
    delta: f64,
    #[arg(long, default_value_t = heat::DEFAULT_ALPHA)]
    alpha: f64,
    /// Output directory.
    #[arg(long, default_value = "training-data")]
    out: PathBuf,
    #[arg(long)]
    digits: Option<u32>,
}

/// An invalid invocation, reported with exit code 64.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Usage(msg.into()).into())
}

fn rule_id(name: RuleName, step: f64) -> Result<RuleId> {
    Ok(match name {
        RuleName::Gk15 => RuleId::Gk15,
        RuleName::Simpson => RuleId::AdaptiveSimpson,
        RuleName::Lobatto => RuleId::AdaptiveLobatto,
        RuleName::Trapz => RuleId::trapezoid(step).map_err(|e| Usage(e.to_string()))?,
    })
}

fn variant(family: Family, regime: Regime) -> Result<IntegrandVariant> {
    let family = match family {
        Family::Quartic => "quartic",
        Family::Finance => "finance",
    };
    IntegrandVariant::from_labels(family, regime.label()).map_err(|e| Usage(e).into())
}

fn quartic_params(delta: f64) -> Result<QuarticParams> {
    QuarticParams::new(delta).map_err(|e| Usage(e.to_string()).into())
}

fn finance_params(sigma: f64) -> Result<FinanceParams> {
    let p = FinanceParams::reference(sigma);
    p.validate().map_err(|e| Usage(e.to_string()))?;
    Ok(p)
}

/// `--digits`, else `$QUADBENCH_DIGITS`, else 32; validated as a high-precision context.
fn resolve_digits(explicit: Option<u32>) -> Result<u32> {
    let digits = match (explicit, std::env::var(DIGITS_ENV)) {
        (Some(d), _) => d,
        (None, Ok(s)) => match s.trim().parse() {
            Ok(d) => d,
            Err(_) => return usage(format!("{DIGITS_ENV}={s:?} is not a digit count")),
        },
        (None, Err(_)) => 32,
    };
    PrecisionContext::high_precision(digits).map_err(|e| Usage(e.to_string()))?;
    Ok(digits)
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn cmd_integrate(args: IntegrateArgs) -> Result<u8> {
    let tol = args.common.tolerances()?;
    let digits = args.common.digits()?;
    let rule = rule_id(args.rule, args.step)?;
    let v = variant(args.integrand, args.variant)?;
    if args.integrand == Family::Finance && args.coefficient.is_some() {
        return usage("--coefficient applies to the quartic only");
    }
    if args.length <= 0.0 || !args.length.is_finite() {
        return usage(format!("--length must be positive, got {}", args.length));
    }
    let mut out = open_out(&args.out)?;

    let (value_line, result) = match args.integrand {
        Family::Quartic => {
            let mut q = Quartic::new(v, quartic_params(args.delta)?, digits)?;
            if let Some(n) = args.coefficient {
                if n == 0 {
                    return usage("--coefficient starts at 1");
                }
                q = q.weighted(n);
            }
            let r = integrate(rule, &q, -1.0, 1.0, tol).map_err(|e| Usage(e.to_string()))?;
            (fmt_value(r.value), serde_json::to_value(&r)?)
        }
        Family::Finance => {
            let p = finance_params(args.sigma)?;
            let ctx = v.context(digits)?;
            let r = integrate_contour(&p, args.length, rule, &ctx, tol).map_err(|e| Usage(e.to_string()))?;
            let line = format!(
                "{} (complex {} {} {}i)",
                fmt_value(r.real_part()),
                fmt_value(r.value().re),
                if r.value().im < 0.0 { "-" } else { "+" },
                fmt_value(r.value().im.abs())
            );
            (line, serde_json::to_value(&r.result)?)
        }
    };
    let fevals = result["fevals"].as_u64().unwrap_or(0);
    let elapsed = result["elapsed"].as_f64().unwrap_or(0.0);
    let error_estimate = result["error_estimate"].as_f64().unwrap_or(f64::NAN);
    let warnings: quadbench::Warnings = serde_json::from_value(result["warnings"].clone())?;

    match args.format {
        Some(OutputFormat::Json) => {
            serde_json::to_writer_pretty(&mut out, &result)?;
            writeln!(out)?;
        }
        _ => {
            writeln!(out, "integrand  {v}")?;
            writeln!(out, "rule       {rule}")?;
            writeln!(out, "value      {value_line}")?;
            writeln!(out, "error est  {error_estimate:.3e}")?;
            writeln!(out, "fevals     {fevals}")?;
            writeln!(out, "elapsed    {} s", fmt_seconds(elapsed))?;
            let w = fmt_warnings(&warnings);
            writeln!(out, "warnings   {}", if w.is_empty() { "none" } else { &w })?;
        }
    }
    out.flush()?;
    for w in &warnings {
        eprintln!("Warning: {}", w.message(error_estimate));
    }
    Ok(if warnings.is_empty() { 0 } else { EXIT_WARNING })
}

fn cmd_sweep(args: SweepArgs) -> Result<u8> {
    let tol = args.common.tolerances()?;
    let digits = args.common.digits()?;
    if args.rules.is_empty() || args.variants.is_empty() {
        return usage("sweep needs at least one rule and one variant");
    }
    let rules = args
        .rules
        .iter()
        .map(|&r| rule_id(r, args.step))
        .collect::<Result<Vec<_>>>()?;
    let variants = args
        .variants
        .iter()
        .map(|&r| variant(args.integrand, r))
        .collect::<Result<Vec<_>>>()?;
    let (target, params) = match (args.integrand, args.coefficient) {
        (Family::Quartic, None) => (SweepTarget::Quartic, args.deltas.clone()),
        (Family::Quartic, Some(n)) if n >= 1 => (SweepTarget::Coefficient { n }, args.deltas.clone()),
        (Family::Quartic, Some(_)) => return usage("--coefficient starts at 1"),
        (Family::Finance, None) => (SweepTarget::Finance { length: args.length }, args.sigmas.clone()),
        (Family::Finance, Some(_)) => return usage("--coefficient applies to the quartic only"),
    };
    for &p in &params {
        match args.integrand {
            Family::Quartic => drop(quartic_params(p)?),
            Family::Finance => drop(finance_params(p)?),
        }
    }
    let spec = SweepSpec {
        target,
        rules,
        variants,
        params,
        digits,
        tol,
    };
    spec.validate().map_err(|e| Usage(e.to_string()))?;
    let report = spec.run()?;
    let mut out = open_out(&args.out)?;
    out.write_all(report.render(args.format.into())?.as_bytes())?;
    out.flush()?;
    Ok(0)
}

fn write_file(path: &Path, write: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?);
    write(&mut w)?;
    w.flush()?;
    Ok(())
}

fn cmd_heat(args: HeatArgs) -> Result<u8> {
    let tol = args.common.tolerances()?;
    let digits = args.common.digits()?;
    let rule = rule_id(args.rule, args.step)?;
    let corrupted_variant = variant(Family::Quartic, args.variant)?;
    let q = quartic_params(args.delta)?;
    let config = |variant, rule| -> Result<HeatConfig> {
        let mut cfg = HeatConfig::new(args.alpha, args.modes, rule, variant, q).map_err(|e| Usage(e.to_string()))?;
        cfg.digits = digits;
        cfg.tol = tol;
        Ok(cfg)
    };
    let clean_cfg = config(IntegrandVariant::QuarticHighPrec, RuleId::Gk15)?;
    let corrupted_cfg = config(corrupted_variant, rule)?;

    let clean = FourierSeries::compute(&clean_cfg)?;
    let corrupted = FourierSeries::compute(&corrupted_cfg)?;
    let t = heat::default_t_grid();
    let x = heat::default_x_grid();
    let clean_grid = clean.grid(&t, &x)?;
    let corrupted_grid = corrupted.grid(&t, &x)?;
    let profile = bias_profile(&clean_grid, &corrupted_grid)?;

    fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    write_file(&args.out.join("clean.csv"), |w| Ok(clean_grid.write_csv(w)?))?;
    write_file(&args.out.join("corrupted.csv"), |w| Ok(corrupted_grid.write_csv(w)?))?;
    write_file(&args.out.join("bias.csv"), |w| Ok(heat::write_bias_csv(&profile, w)?))?;
    write_file(&args.out.join("coefficients_clean.json"), |w| Ok(clean.write_coefficients_json(w)?))?;
    write_file(&args.out.join("coefficients_corrupted.json"), |w| {
        Ok(corrupted.write_coefficients_json(w)?)
    })?;

    let first = profile.first().map(|p| p.1).unwrap_or(0.0);
    let last = profile.last().map(|p| p.1).unwrap_or(0.0);
    println!("modes      {}", args.modes);
    println!("alpha      {}", args.alpha);
    println!("bias t=0   {}", fmt_value(first));
    println!("bias t=1   {}", fmt_value(last));
    println!("written    {}", args.out.display());
    for (label, series) in [("clean", &clean), ("corrupted", &corrupted)] {
        let warned = series.warnings();
        if !warned.is_empty() {
            eprintln!("{label} coefficients raised: {}", fmt_warnings(&warned));
        }
    }
    Ok(0)
}

fn cmd_diagnose(args: DiagnoseArgs) -> Result<u8> {
    let digits = resolve_digits(args.digits)?;
    let q = quartic_params(args.delta)?;
    if args.grid_size < 16 {
        return usage(format!("--grid-size must be at least 16, got {}", args.grid_size));
    }
    if args.threshold.is_nan() || args.threshold <= 0.0 {
        return usage(format!("--threshold must be positive, got {}", args.threshold));
    }
    let double = Quartic::new(IntegrandVariant::QuarticDouble, q, digits)?;
    let hiprec = Quartic::new(IntegrandVariant::QuarticHighPrec, q, digits)?;
    let report = noise_floor(&double, &hiprec, -1.0, 1.0, args.grid_size, args.threshold)?;
    let mut out = open_out(&args.out)?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    out.flush()?;
    eprintln!("recommended regime: {}", recommend_regime(&report));
    Ok(0)
}

fn cmd_emit_training_data(args: TrainingArgs) -> Result<u8> {
    let digits = resolve_digits(args.digits)?;
    let v = variant(Family::Quartic, args.variant)?;
    let q = quartic_params(args.delta)?;
    if !(args.alpha > 0.0 && args.alpha.is_finite()) {
        return usage(format!("--alpha must be positive, got {}", args.alpha));
    }
    let data = TrainingData::generate(v, &q, digits, args.alpha)?;
    for p in data.write_dir(&args.out)? {
        println!("{}", p.display());
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Integrate(a) => cmd_integrate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Heat(a) => cmd_heat(a),
        Command::Diagnose(a) => cmd_diagnose(a),
        Command::EmitTrainingData(a) => cmd_emit_training_data(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) if e.downcast_ref::<Usage>().is_some() => {
            eprintln!("usage error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
