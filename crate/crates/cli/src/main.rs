use std::collections::BTreeSet;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use cds_aoa::aoa::{hyperbola_plot_data, CheckOptions, Condition, PairSelection};
use cds_aoa::curve::{CdsCurve, DiscountCurve, QuoteKind, RecoverySpec, Tenor};
use cds_aoa::irs::{forward_curve, IrsForwardCurve};
use cds_aoa::scanner::synth::{generate, SynthConfig};
use cds_aoa::scanner::{
    aggregate_monthly, ingest_csv, monthly_csv, read_discount_file, read_irs_file, render_report, scan,
    write_quotes_csv, IngestOptions, ReportFormat, ScanConfig,
};
use cds_aoa::strategy::{replay, replay_csv, ReplayOptions};
use cds_aoa::survival::bootstrap_hazards;

/// Scan CDS term structures for static-arbitrage anomalies.
#[derive(Parser)]
#[command(name = "cds-aoa", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every curve in a quote file and report violating pairs.
    Scan(ScanArgs),
    /// Write a synthetic quote file with planted violations.
    Generate(GenerateArgs),
    /// Bootstrap piecewise-constant hazards for one curve.
    Bootstrap(BootstrapArgs),
    /// Revalue a paired trade along a curve history.
    Replay(ReplayArgs),
    /// Forward bonds and rates implied by a swap-rate curve.
    Irs(IrsArgs),
    /// Hyperbola diagnostic data for one curve.
    Plot(PlotArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Quote CSV.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "mid")]
    quote_kind: QuoteKind,
}

impl InputArgs {
    fn load(&self) -> Result<Vec<CdsCurve>> {
        let ingested = ingest_csv(&self.input, IngestOptions { quote_kind: self.quote_kind })?;
        for w in &ingested.warnings {
            eprintln!("warning: {w}");
        }
        for r in &ingested.rejections {
            eprintln!("rejected line {}: {}", r.line, r.message);
        }
        Ok(ingested.curves)
    }

    /// The curve for `entity`, on `date` when several dates are present.
    fn select(&self, entity: &str, date: Option<&str>) -> Result<CdsCurve> {
        let mut matches: Vec<_> = self
            .load()?
            .into_iter()
            .filter(|c| c.entity().entity_id == entity)
            .filter(|c| date.map_or(true, |d| c.as_of().to_string() == d))
            .collect();
        match matches.len() {
            0 => bail!("no curve for entity {entity}{}", date.map(|d| format!(" on {d}")).unwrap_or_default()),
            1 => Ok(matches.remove(0)),
            n => bail!("{n} curves for entity {entity}; pass --date"),
        }
    }
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    input: InputArgs,
    /// `all` or comma-separated `T1:T2` pairs in years.
    #[arg(long, default_value = "0.5:1,1:2,2:5,5:10")]
    pairs: String,
    #[arg(long, default_value = "thm1")]
    condition: Condition,
    /// Discount curve CSV (`t_years,discount_factor`).
    #[arg(long)]
    discount: Option<PathBuf>,
    /// Swap-rate curve CSV (`T_years,rate_decimal`).
    #[arg(long)]
    irs: Option<PathBuf>,
    /// Valuation start of the swap curve in years.
    #[arg(long, default_value_t = 0.0)]
    t0: f64,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// Entity ids left out of MAR statistics.
    #[arg(long, value_delimiter = ',')]
    exclude: Vec<String>,
    /// Report path; stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: ReportFormat,
    /// Directory for the monthly series and per-anomaly hyperbola data.
    #[arg(long)]
    plot_data: Option<PathBuf>,
    /// Exit with status 1 when any anomaly is found.
    #[arg(long)]
    fail_on_anomaly: bool,
    #[arg(long, default_value_t = 4)]
    freq: u32,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    output: PathBuf,
    /// Ground-truth counts as JSON.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    curves: usize,
    #[arg(long, default_value_t = 37)]
    violations: usize,
    #[arg(long, default_value_t = 120)]
    entities: usize,
    #[arg(long, default_value_t = 20_080_915)]
    seed: u64,
}

#[derive(Args)]
struct BootstrapArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    entity: String,
    /// Quote date (YYYY-MM-DD).
    #[arg(long)]
    date: Option<String>,
    /// Discount curve CSV; zero rates when omitted.
    #[arg(long)]
    discount: Option<PathBuf>,
    #[arg(long, default_value_t = 0.4)]
    recovery: f64,
    #[arg(long, default_value_t = 4)]
    freq: u32,
}

#[derive(Args)]
struct ReplayArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    entity: String,
    /// Tenor sold protection on, e.g. `5y`.
    #[arg(long)]
    short: Tenor,
    /// Tenor bought protection on, e.g. `10y`.
    #[arg(long)]
    long: Tenor,
    #[arg(long, default_value_t = 10_000_000.0)]
    notional: f64,
    #[arg(long, default_value_t = 0.4)]
    recovery: f64,
    #[arg(long)]
    discount: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    freq: u32,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct IrsArgs {
    /// Swap-rate curve CSV (`T_years,rate_decimal`).
    #[arg(long, conflicts_with = "discount", required_unless_present = "discount")]
    irs: Option<PathBuf>,
    /// Derive swap rates from a discount curve instead.
    #[arg(long)]
    discount: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    t0: f64,
    /// Output grid spacing in years.
    #[arg(long, default_value_t = 0.25)]
    step: f64,
    /// Horizon when deriving from a discount curve.
    #[arg(long, default_value_t = 10.0)]
    horizon: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    entity: String,
    #[arg(long)]
    date: Option<String>,
    #[arg(long, default_value = "5y")]
    anchor: Tenor,
    #[arg(long)]
    log_log: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn discount_or_zero(path: Option<&Path>) -> Result<DiscountCurve> {
    Ok(match path {
        Some(p) => read_discount_file(p)?,
        None => DiscountCurve::flat(0.0, 40.0)?,
    })
}

fn run_scan(args: ScanArgs) -> Result<ExitCode> {
    let pairs = if args.pairs.trim().eq_ignore_ascii_case("all") {
        PairSelection::AllOrdered
    } else {
        PairSelection::parse(&args.pairs)?
    };
    let cfg = ScanConfig {
        condition: args.condition,
        check: CheckOptions { pairs, epsilon: args.epsilon },
        discount: args.discount.as_deref().map(read_discount_file).transpose()?,
        irs: args.irs.as_deref().map(|p| read_irs_file(p, args.t0)).transpose()?,
        freq: args.freq,
        mar_exclude: args.exclude,
    };
    let curves = args.input.load()?;
    let report = scan(&curves, &cfg)?;
    for e in &report.curve_errors {
        eprintln!("curve {} {}: {}", e.entity_id, e.as_of, e.message);
    }
    emit(args.report.as_deref(), &render_report(&report, args.format)?)?;

    if let Some(dir) = &args.plot_data {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        fs::write(dir.join("monthly.csv"), monthly_csv(&aggregate_monthly(&report)))?;
        let mut seen = BTreeSet::new();
        for r in &report.records {
            if !seen.insert((r.as_of, r.entity.entity_id.clone(), r.tenor_short)) {
                continue;
            }
            let Some(curve) = curves
                .iter()
                .find(|c| c.as_of() == r.as_of && c.entity().entity_id == r.entity.entity_id)
            else {
                continue;
            };
            let plot = hyperbola_plot_data(curve, r.tenor_short, false)?;
            let name = format!("hyperbola_{}_{}_{}.csv", r.entity.entity_id, r.as_of, r.tenor_short);
            fs::write(dir.join(name), plot.to_csv())?;
        }
    }

    eprintln!(
        "scanned {} curves: {} anomalies ({})",
        report.curves_scanned, report.total_anomalies, report.condition
    );
    Ok(if args.fail_on_anomaly && report.total_anomalies > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn run_generate(args: GenerateArgs) -> Result<()> {
    let cfg = SynthConfig {
        curves: args.curves,
        violations: args.violations,
        entities: args.entities,
        seed: args.seed,
        ..SynthConfig::default()
    };
    let (curves, manifest) = generate(&cfg)?;
    let file = fs::File::create(&args.output).with_context(|| format!("creating {}", args.output.display()))?;
    write_quotes_csv(&curves, std::io::BufWriter::new(file))?;
    if let Some(p) = &args.manifest {
        fs::write(p, serde_json::to_string_pretty(&manifest)? + "\n")?;
    }
    Ok(())
}

fn run_bootstrap(args: BootstrapArgs) -> Result<()> {
    let curve = args.input.select(&args.entity, args.date.as_deref())?;
    let d = discount_or_zero(args.discount.as_deref())?;
    let s = bootstrap_hazards(&curve, &d, &RecoverySpec::from_recovery(args.recovery)?, args.freq)?;
    let mut out = String::from("t_end,hazard,negative\n");
    for (t, h) in s.segments() {
        out.push_str(&format!("{t:.6},{h:.8},{}\n", u8::from(h < 0.0)));
    }
    if s.is_pathological() {
        eprintln!("warning: negative hazard segments imply negative default probabilities");
    }
    emit(None, &out)
}

fn run_replay(args: ReplayArgs) -> Result<()> {
    let path: Vec<_> = args
        .input
        .load()?
        .into_iter()
        .filter(|c| c.entity().entity_id == args.entity)
        .collect();
    if path.is_empty() {
        bail!("no curves for entity {}", args.entity);
    }
    let opts = ReplayOptions {
        notional: args.notional,
        recovery: RecoverySpec::from_recovery(args.recovery)?,
        freq: args.freq,
        discount: discount_or_zero(args.discount.as_deref())?,
    };
    let rows = replay(&path, args.short, args.long, &opts)?;
    emit(args.output.as_deref(), &replay_csv(&rows))
}

fn run_irs(args: IrsArgs) -> Result<()> {
    let irs = match (&args.irs, &args.discount) {
        (Some(p), _) => read_irs_file(p, args.t0)?,
        (None, Some(p)) => IrsForwardCurve::from_discount(&read_discount_file(p)?, args.t0, args.horizon)?,
        (None, None) => bail!("pass --irs or --discount"),
    };
    if irs.extrapolated_start() {
        eprintln!("warning: swap rate at t0 extrapolated from the first two samples");
    }
    let mut out = String::from("T,swap_rate,forward_bond,forward_rate\n");
    for p in forward_curve(&irs, args.step)? {
        out.push_str(&format!("{:.6},{:.8},{:.8},{:.8}\n", p.t, p.rate, p.forward_bond, p.forward_rate));
    }
    emit(args.output.as_deref(), &out)
}

fn run_plot(args: PlotArgs) -> Result<()> {
    let curve = args.input.select(&args.entity, args.date.as_deref())?;
    let plot = hyperbola_plot_data(&curve, args.anchor, args.log_log)?;
    emit(args.output.as_deref(), &plot.to_csv())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Scan(a) => return run_scan(a),
        Command::Generate(a) => run_generate(a)?,
        Command::Bootstrap(a) => run_bootstrap(a)?,
        Command::Replay(a) => run_replay(a)?,
        Command::Irs(a) => run_irs(a)?,
        Command::Plot(a) => run_plot(a)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
