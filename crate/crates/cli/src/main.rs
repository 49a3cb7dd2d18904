use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use altu_core::bench::config::apply_overrides;
use altu_core::bench::{
    adiabatic_record, alternating_record, build_family, build_schedule, population_report, resolve_grid, run_sweep,
    table_report, top_k, write_records, ModelSpec, RunRecord, SweepOutcome, SweepSpec, TABLE1_CONFIG,
};
use altu_core::verify::{agp_properties, dicke_sector_property};
use altu_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const TOP_ROWS: usize = 20;

#[derive(Parser, Debug)]
#[command(name = "altu", version, about = "Alternating-unitary transport sweeps and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep the two-level spin flip.
    TwoLevel(SweepArgs),
    /// Sweep quantum annealing of the p-spin model.
    Pspin(SweepArgs),
    /// Check the gauge-potential constructions and print one line per property.
    AgpVerify(OptionalConfigArgs),
    /// Run the p = 3, N = 100 sweep and print the twenty best alternating points.
    Table1(OptionalConfigArgs),
    /// Re-run one grid point with per-slice eigenstate populations.
    Populations(PopulationArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Standard,
    Reduced,
}

#[derive(Args, Debug)]
struct RunFlags {
    /// Override a config key, e.g. `--set grid.k=0,3` (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Worker threads for the sweep.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Evaluate H and grad H at slice midpoints instead of left endpoints.
    #[arg(long)]
    midpoint: bool,
}

impl RunFlags {
    fn all_overrides(&self) -> Vec<String> {
        let mut all = self.overrides.clone();
        if let Some(v) = self.variant {
            let name = match v {
                VariantArg::Standard => "standard",
                VariantArg::Reduced => "reduced",
            };
            all.push(format!("run.variant=\"{name}\""));
        }
        if self.midpoint {
            all.push("run.evaluation=\"midpoint\"".into());
        }
        all
    }
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[command(flatten)]
    flags: RunFlags,
}

#[derive(Args, Debug)]
struct OptionalConfigArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    flags: RunFlags,
}

#[derive(Args, Debug)]
struct PopulationArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Grid point as `j,k,L`.
    #[arg(long, value_name = "J,K,L")]
    point: String,
    #[command(flatten)]
    flags: RunFlags,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_)
            | Error::Io(_)
            | Error::Parse { .. }
            | Error::InvalidParameter(_)
            | Error::EmptyGrid(_)
            | Error::OddSliceCount(_) => Failure::Config(e.to_string()),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn load_spec(path: Option<&Path>, default: &str, overrides: &[String]) -> Result<(SweepSpec, String), Failure> {
    let text = match path {
        Some(p) => {
            fs::read_to_string(p).map_err(|e| Failure::Config(format!("cannot read config {}: {e}", p.display())))?
        }
        None => default.to_string(),
    };
    let table = apply_overrides(&text, overrides)?;
    let effective = toml::to_string(&table).map_err(|e| Failure::Config(e.to_string()))?;
    Ok((SweepSpec::from_table(table)?, effective))
}

fn write_outputs(spec: &SweepSpec, effective: &str, out: &Path, records: &[RunRecord]) -> Result<(), Failure> {
    fs::create_dir_all(out)?;
    write_records(
        records,
        &out.join(&spec.output.records),
        Some(&out.join(&spec.output.populations)),
    )?;
    fs::write(out.join(&spec.output.report), table_report(&top_k(records, TOP_ROWS)))?;
    fs::write(out.join("config.toml"), effective)?;
    Ok(())
}

fn report_failures(outcome: &SweepOutcome) -> Result<(), Failure> {
    for f in &outcome.failures {
        log::error!(
            "{} j={} k={} L={} T={}: {}",
            f.method,
            f.j,
            f.k,
            f.slices,
            f.time,
            f.message
        );
    }
    if outcome.failures.iter().any(|f| f.non_convergence) {
        return Err(Failure::Numerical(format!(
            "{} point(s) failed to converge",
            outcome.failures.iter().filter(|f| f.non_convergence).count()
        )));
    }
    if let Some(f) = outcome.failures.first() {
        return Err(Failure::Numerical(f.message.clone()));
    }
    Ok(())
}

fn sweep(args: &SweepArgs, expect_two_level: bool) -> Result<(), Failure> {
    let (spec, effective) = load_spec(Some(&args.config), "", &args.flags.all_overrides())?;
    if matches!(spec.model, ModelSpec::TwoLevel { .. }) != expect_two_level {
        let want = if expect_two_level { "two-level" } else { "pspin" };
        return Err(Failure::Config(format!(
            "config model kind does not match subcommand `{want}`"
        )));
    }
    let outcome = run_sweep(&spec, args.flags.workers)?;
    write_outputs(&spec, &effective, &args.out, &outcome.records)?;
    println!(
        "{} records written to {}",
        outcome.records.len(),
        args.out.join(&spec.output.records).display()
    );
    report_failures(&outcome)
}

fn table1(args: &OptionalConfigArgs) -> Result<(), Failure> {
    let (spec, effective) = load_spec(args.config.as_deref(), TABLE1_CONFIG, &args.flags.all_overrides())?;
    let outcome = run_sweep(&spec, args.flags.workers)?;
    print!("{}", table_report(&top_k(&outcome.records, TOP_ROWS)));
    if let Some(out) = &args.out {
        write_outputs(&spec, &effective, out, &outcome.records)?;
    }
    report_failures(&outcome)
}

const VERIFY_DEFAULT: &str = r#"[model]
kind = "two-level"
hx0 = 0.2
hz0 = 1.0

[grid]
j = [0]
k = [0]
L = [1]
"#;

fn agp_verify(args: &OptionalConfigArgs) -> Result<(), Failure> {
    let (spec, _) = load_spec(args.config.as_deref(), VERIFY_DEFAULT, &args.flags.all_overrides())?;
    let family = build_family(&spec.model)?;
    let lambda = build_schedule(&spec.model, 1)?.at(0.3);
    let mut outcomes = agp_properties(&family, &lambda)?;
    outcomes.push(dicke_sector_property(10));
    let mut failed = 0;
    for o in &outcomes {
        println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
        failed += usize::from(!o.passed);
    }
    if failed > 0 {
        return Err(Failure::Numerical(format!("{failed} propert(ies) failed")));
    }
    Ok(())
}

fn parse_point(text: &str) -> Result<(i64, i64, usize), Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || Failure::Config(format!("--point expects j,k,L, got `{text}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    Ok((
        parts[0].parse().map_err(|_| bad())?,
        parts[1].parse().map_err(|_| bad())?,
        parts[2].parse().map_err(|_| bad())?,
    ))
}

fn populations(args: &PopulationArgs) -> Result<(), Failure> {
    let (j, k, l) = parse_point(&args.point)?;
    let (spec, effective) = load_spec(Some(&args.config), "", &args.flags.all_overrides())?;
    let point = resolve_grid(&spec)?
        .into_iter()
        .find(|p| p.j == j && p.k == k && p.slices == l)
        .ok_or_else(|| Failure::Config(format!("point j={j}, k={k}, L={l} is not on the configured grid")))?;
    let family = build_family(&spec.model)?;
    let (alternating, _) = alternating_record(&spec, &family, &point, true)?;
    let (adiabatic, _) = adiabatic_record(&spec, &family, alternating.time, l, true)?;
    println!(
        "alternating j={j} k={k} L={l} T_eff={:.2} F_GS={:.4}",
        alternating.time, alternating.fidelity
    );
    print!("{}", population_report(&alternating)?);
    println!("adiabatic T={:.2} F_GS={:.4}", adiabatic.time, adiabatic.fidelity);
    print!("{}", population_report(&adiabatic)?);
    write_outputs(&spec, &effective, &args.out, &[alternating, adiabatic])?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_CONFIG),
            };
        }
    };
    let result = match &cli.command {
        Command::TwoLevel(a) => sweep(a, true),
        Command::Pspin(a) => sweep(a, false),
        Command::AgpVerify(a) => agp_verify(a),
        Command::Table1(a) => table1(a),
        Command::Populations(a) => populations(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
