use std::f64::consts::PI;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;
use spincorr::format::write_sweep_csv;
use spincorr::scattering::DEFAULT_V_REL;
use spincorr::verify::{run_suite, Suite, SuiteReport};
use spincorr::*;

const MANIFEST: &str = "experiment.json";

#[derive(Parser)]
#[command(name = "spincorr", version, about = "Spin correlation tensor and tensor-norm entanglement measure")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entanglement of the Coulomb scattering state over a (theta, omega, phi) grid, as CSV.
    Sweep {
        /// Smallest scattering angle in radians.
        #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
        theta_min: f64,
        /// Largest scattering angle in radians.
        #[arg(long, default_value_t = PI - 0.01, allow_negative_numbers = true)]
        theta_max: f64,
        /// Number of equally spaced angles, endpoints included.
        #[arg(long, default_value_t = 181)]
        theta_steps: usize,
        /// Comma-separated spin-rotation angles Omega in radians.
        #[arg(long, value_delimiter = ',', default_value = "0.7853981633974483", allow_negative_numbers = true)]
        omega: Vec<f64>,
        /// Comma-separated azimuths phi in radians.
        #[arg(long, value_delimiter = ',', default_value = "0", allow_negative_numbers = true)]
        phi: Vec<f64>,
        /// Relative velocity in atomic units.
        #[arg(long, default_value_t = DEFAULT_V_REL)]
        v_rel: f64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Correlation tensor, polarizations and E of a Bell state, as JSON.
    Bell {
        #[arg(long, value_enum)]
        kind: BellArg,
    },
    /// Correlation tensor, polarizations and E of a user-supplied state, as JSON.
    StateInfo {
        /// Coefficients as {"c_pp":[re,im],"c_pm":[re,im],"c_mp":[re,im],"c_mm":[re,im]}.
        #[arg(long)]
        state: String,
    },
    /// Simulate spin-projection data for all nine axis pairs and estimate E.
    MeasureSim {
        /// Coefficient JSON, scattering JSON {"theta","omega","phi","v_rel"}, or a Bell state name.
        #[arg(long)]
        state: String,
        /// Samples per axis pair.
        #[arg(long)]
        samples: usize,
        /// Sampling seed.
        #[arg(long)]
        seed: u64,
        /// Bootstrap seed.
        #[arg(long, default_value_t = 0)]
        boot_seed: u64,
        /// Bootstrap replicates for the standard error of E.
        #[arg(long, default_value_t = spincorr::measurement::DEFAULT_BOOTSTRAP_REPLICATES)]
        bootstrap: usize,
        /// Directory receiving table_<i><j>.csv and experiment.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate T, P1, P2 and E from table_<i><j>.csv files.
    Estimate {
        /// Directory holding the nine tables.
        #[arg(long = "in")]
        input: PathBuf,
        /// Bootstrap seed.
        #[arg(long, default_value_t = 0)]
        boot_seed: u64,
        /// Bootstrap replicates for the standard error of E.
        #[arg(long, default_value_t = spincorr::measurement::DEFAULT_BOOTSTRAP_REPLICATES)]
        bootstrap: usize,
    },
    /// Run the randomized validity checks of the measure.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        /// Trials per suite; each suite's default when omitted.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BellArg {
    Singlet,
    TripletA,
    TripletB,
    TripletC,
}

impl From<BellArg> for BellKind {
    fn from(b: BellArg) -> Self {
        match b {
            BellArg::Singlet => BellKind::Singlet,
            BellArg::TripletA => BellKind::TripletA,
            BellArg::TripletB => BellKind::TripletB,
            BellArg::TripletC => BellKind::TripletC,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Lu,
    Povm,
    QOrth,
    DContract,
    SigmaEig,
    All,
}

impl SuiteArg {
    fn suites(self) -> Vec<Suite> {
        match self {
            SuiteArg::Lu => vec![Suite::Lu],
            SuiteArg::Povm => vec![Suite::Povm],
            SuiteArg::QOrth => vec![Suite::QOrth],
            SuiteArg::DContract => vec![Suite::DContract],
            SuiteArg::SigmaEig => vec![Suite::SigmaEig],
            SuiteArg::All => Suite::ALL.to_vec(),
        }
    }
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Usage(_) => 2,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn domain(e: impl std::fmt::Display) -> Failure {
    Failure::Domain(e.to_string())
}

type CmdResult = std::result::Result<(), Failure>;

#[derive(Serialize)]
struct StateReport {
    state: TwoElectronState,
    #[serde(rename = "T")]
    t: CorrelationTensor,
    #[serde(rename = "P1")]
    p1: Polarization,
    #[serde(rename = "P2")]
    p2: Polarization,
    #[serde(rename = "E")]
    e: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    seed: u64,
    samples: usize,
    boot_seed: u64,
    bootstrap: usize,
    state: TwoElectronState,
    report: &'a EstimationReport,
}

fn print_json<T: Serialize>(value: &T) -> CmdResult {
    let text = serde_json::to_string_pretty(value).map_err(domain)?;
    println!("{text}");
    Ok(())
}

fn state_report(state: TwoElectronState) -> std::result::Result<StateReport, Failure> {
    Ok(StateReport {
        state,
        t: correlation_tensor_closed(&state),
        p1: polarization(&state, Particle::First),
        p2: polarization(&state, Particle::Second),
        e: entanglement_measure(&state).map_err(domain)?.value(),
    })
}

/// Coefficient JSON is a usage error only when it fails to parse; a
/// well-formed but null vector is a domain error.
fn coefficient_state(v: Value) -> std::result::Result<TwoElectronState, Failure> {
    let raw: SpinCoefficients = serde_json::from_value(v.clone()).map_err(|e| usage(format!("bad state JSON: {e}")))?;
    normalize(&raw).map_err(domain)?;
    serde_json::from_value(v).map_err(domain)
}

fn parse_state(text: &str) -> std::result::Result<TwoElectronState, Failure> {
    if let Ok(kind) = text.trim().parse::<BellKind>() {
        return Ok(bell_state(kind));
    }
    let v: Value = serde_json::from_str(text).map_err(|e| usage(format!("state is neither a Bell name nor JSON: {e}")))?;
    if v.get("theta").is_some() {
        let p: ScatteringParams = serde_json::from_value(v).map_err(|e| usage(format!("bad scattering JSON: {e}")))?;
        p.validate().map_err(domain)?;
        return scattering_state(&p).map_err(domain);
    }
    coefficient_state(v)
}

fn cmd_sweep(
    theta_min: f64,
    theta_max: f64,
    theta_steps: usize,
    omega: Vec<f64>,
    phi: Vec<f64>,
    v_rel: f64,
    out: Option<&Path>,
) -> CmdResult {
    let grid = SweepGrid::linspace(theta_min, theta_max, theta_steps, omega, phi, v_rel).map_err(usage)?;
    let rows = sweep(&grid).map_err(usage)?;
    match out {
        Some(path) => {
            let file = io::BufWriter::new(fs::File::create(path).map_err(domain)?);
            write_sweep_csv(file, &rows).map_err(domain)
        }
        None => write_sweep_csv(io::stdout().lock(), &rows).map_err(domain),
    }
}

fn cmd_measure_sim(text: &str, samples: usize, seed: u64, boot: Bootstrap, out: &Path) -> CmdResult {
    if samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    let state = parse_state(text)?;
    let data = simulate_data(&state.density_matrix(), samples, seed).map_err(domain)?;
    let report = estimate(&data, &boot).map_err(domain)?;
    fs::create_dir_all(out).map_err(domain)?;
    write_tables(out, &data).map_err(domain)?;
    let manifest = Manifest { seed, samples, boot_seed: boot.seed, bootstrap: boot.replicates, state, report: &report };
    let text = serde_json::to_string_pretty(&manifest).map_err(domain)?;
    fs::write(out.join(MANIFEST), text + "\n").map_err(domain)?;
    print_json(&report)
}

fn cmd_estimate(input: &Path, boot: Bootstrap) -> CmdResult {
    let data = read_tables(input).map_err(domain)?;
    print_json(&estimate(&data, &boot).map_err(domain)?)
}

fn print_suite(out: &mut impl Write, report: &SuiteReport) -> io::Result<()> {
    for line in &report.details {
        writeln!(out, "{line}")?;
    }
    for c in &report.checks {
        writeln!(
            out,
            "{:<10} {:<28} {:>6} {:>12.3e} {:>9.0e} {:>5}  {}",
            report.suite.name(),
            c.name,
            report.trials,
            c.max_deviation,
            c.tolerance,
            c.violations,
            if c.passed() { "PASS" } else { "FAIL" },
        )?;
    }
    Ok(())
}

fn cmd_verify(suite: SuiteArg, trials: Option<u64>, seed: u64) -> CmdResult {
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "{:<10} {:<28} {:>6} {:>12} {:>9} {:>5}  result",
        "suite", "check", "trials", "max_dev", "tol", "viol"
    )
    .map_err(domain)?;
    let mut all_passed = true;
    for s in suite.suites() {
        let n = trials.map_or(s.default_trials(), |t| t as usize);
        let report = run_suite(s, n, seed).map_err(domain)?;
        print_suite(&mut out, &report).map_err(domain)?;
        all_passed &= report.passed();
    }
    if all_passed {
        Ok(())
    } else {
        Err(Failure::Domain("one or more verification checks failed".into()))
    }
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Sweep { theta_min, theta_max, theta_steps, omega, phi, v_rel, out } => {
            cmd_sweep(theta_min, theta_max, theta_steps, omega, phi, v_rel, out.as_deref())
        }
        Command::Bell { kind } => print_json(&state_report(bell_state(kind.into()))?),
        Command::StateInfo { state } => {
            let v: Value = serde_json::from_str(&state).map_err(|e| usage(format!("bad state JSON: {e}")))?;
            print_json(&state_report(coefficient_state(v)?)?)
        }
        Command::MeasureSim { state, samples, seed, boot_seed, bootstrap, out } => {
            cmd_measure_sim(&state, samples, seed, Bootstrap { replicates: bootstrap, seed: boot_seed }, &out)
        }
        Command::Estimate { input, boot_seed, bootstrap } => {
            cmd_estimate(&input, Bootstrap { replicates: bootstrap, seed: boot_seed })
        }
        Command::Verify { suite, trials, seed } => cmd_verify(suite, trials, seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Usage(msg) | Failure::Domain(msg)) = &f;
            eprintln!("spincorr: {msg}");
            ExitCode::from(f.code())
        }
    }
}
