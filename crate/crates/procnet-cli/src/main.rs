//! `procnet` — evaluate, optimize, sweep, and simulate processing-network
//! configurations, emitting CSV.
//!
//! Data goes to `--out` (or stdout); diagnostics and the run report go to
//! stderr. Exit codes: 0 success, 2 config/usage error, 3 solver failure,
//! 4 simulation infeasibility.

mod report;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use procnet::analytic::{steady_state_error_variance, tau_upper_bound};
use procnet::figures;
use procnet::model::{parse_config, CommDelay, NetworkConfig, PreprocessingModel, ScalarSystem};
use procnet::optimize::{joint_optimize, optimal_sensor_count, optimal_tau, Optimum};
use procnet::simulate::{delay_steps, monte_carlo_variance, SimPlan};
use procnet::Error;

use report::RunReport;

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_SIMULATION: u8 = 4;

#[derive(Parser)]
#[command(name = "procnet", version, about = "Processing-network estimation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the steady-state variance at one or more preprocessing delays.
    Eval(EvalArgs),
    /// Solve for the optimal preprocessing delay per sensor count.
    Optimize(OptimizeArgs),
    /// Sweep a model parameter and report the optimal delay against it.
    Sweep(SweepArgs),
    /// Tabulate the variance against the active sensor count.
    Network(NetworkArgs),
    /// Validate the closed forms with a seeded Monte Carlo run.
    Simulate(SimulateArgs),
    /// Emit the bundled reference figure datasets.
    Reproduce(ReproduceArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// Path to the network config file.
    config: PathBuf,
    /// Preprocessing delays, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    tau: Vec<f64>,
    /// Active sensors (defaults to the whole network).
    #[arg(long)]
    sensors: Option<u32>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeArgs {
    config: PathBuf,
    /// Sensor counts ("1,4,10"), "all", or "joint" for the joint optimum.
    #[arg(long, default_value = "all")]
    sensors: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    config: PathBuf,
    /// Which parameter to sweep: s (= sigma2_w/b), a2, gamma, or c.
    #[arg(long)]
    param: String,
    /// Sweep range "lo:hi:n" with n >= 2.
    #[arg(long)]
    range: String,
    /// Log-spaced grid instead of linear.
    #[arg(long)]
    log: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NetworkArgs {
    config: PathBuf,
    /// Preprocessing delays, comma separated; one S-table block per value.
    #[arg(long, value_delimiter = ',', required = true)]
    tau: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    config: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    tau: Vec<f64>,
    #[arg(long)]
    sensors: Option<u32>,
    /// Discretization step h.
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    /// Simulated time span per trial.
    #[arg(long)]
    horizon: f64,
    #[arg(long, default_value_t = 64)]
    trials: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Figure number: 2, 3, 4, 5 or 6.
    #[arg(long)]
    figure: u8,
    /// Directory for the emitted CSV files.
    #[arg(long)]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let result = match cli.command {
        Command::Eval(args) => cmd_eval(args, started),
        Command::Optimize(args) => cmd_optimize(args, started),
        Command::Sweep(args) => cmd_sweep(args, started),
        Command::Network(args) => cmd_network(args, started),
        Command::Simulate(args) => cmd_simulate(args, started),
        Command::Reproduce(args) => cmd_reproduce(args, started),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("procnet: {}", failure.message);
            ExitCode::from(failure.exit_code)
        }
    }
}

struct Failure {
    exit_code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Self { exit_code: EXIT_CONFIG, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let exit_code = match err {
            Error::BracketFailure { .. } | Error::RootScanFailure { .. } => EXIT_SOLVER,
            Error::HorizonTooShort { .. } | Error::InvalidPlan { .. } => EXIT_SIMULATION,
            _ => EXIT_CONFIG,
        };
        Self { exit_code, message: err.to_string() }
    }
}

fn load_config(path: &Path) -> Result<NetworkConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
    let config = parse_config(&text).map_err(|e| Failure::config(e.to_string()))?;
    config.validate().map_err(|report| Failure::config(report.to_string()))?;
    Ok(config)
}

/// Significant digits for CSV floats; full round-trip precision by default,
/// overridable through PROCNET_PRECISION.
fn precision() -> usize {
    std::env::var("PROCNET_PRECISION")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .map(|p| p.clamp(1, 17))
        .unwrap_or(17)
}

fn fmt(x: f64) -> String {
    format!("{:.*e}", precision() - 1, x)
}

fn write_output(out: &Option<PathBuf>, data: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, data)
            .map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(data.as_bytes())
            .map_err(|e| Failure::config(format!("cannot write stdout: {e}"))),
    }
}

fn out_name(out: &Option<PathBuf>) -> String {
    out.as_ref().map_or_else(|| "<stdout>".to_string(), |p| p.display().to_string())
}

fn cmd_eval(args: EvalArgs, started: Instant) -> Result<(), Failure> {
    let config = load_config(&args.config)?;
    let sensors = args.sensors.unwrap_or(config.sensors);
    if args.tau.is_empty() {
        return Err(Failure::config("at least one --tau value is required"));
    }

    let mut csv = String::from("tau,tau_tot,f,q,total\n");
    for &tau in &args.tau {
        let v = steady_state_error_variance(&config, tau, sensors)?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            fmt(tau),
            fmt(v.delays.tau_tot),
            fmt(v.estimation_part),
            fmt(v.noise_part),
            fmt(v.total)
        );
    }
    write_output(&args.out, &csv)?;
    RunReport::new("eval", &config)
        .output(out_name(&args.out), args.tau.len())
        .finish(started);
    Ok(())
}

fn optimum_row(s: u32, opt: &Optimum) -> String {
    format!(
        "{s},{},{},{},{},{}",
        fmt(opt.tau_opt),
        fmt(opt.value),
        opt.method,
        fmt(opt.bracket.0),
        fmt(opt.bracket.1)
    )
}

fn cmd_optimize(args: OptimizeArgs, started: Instant) -> Result<(), Failure> {
    let config = load_config(&args.config)?;
    let joint_mode = args.sensors == "joint";
    let counts: Vec<u32> = if joint_mode || args.sensors == "all" {
        (1..=config.sensors).collect()
    } else {
        args.sensors
            .split(',')
            .map(|tok| tok.trim().parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|_| {
                Failure::config(format!(
                    "--sensors must be a comma-separated list of counts, \"all\", or \"joint\"; got '{}'",
                    args.sensors
                ))
            })?
    };

    let header = if joint_mode {
        "S,tau_opt,P,method,bracket_lo,bracket_hi,winner\n"
    } else {
        "S,tau_opt,P,method,bracket_lo,bracket_hi\n"
    };
    let mut csv = String::from(header);
    let mut rows = 0usize;

    // On solver failure the rows computed so far are still written out.
    let outcome: Result<(), Failure> = (|| {
        if joint_mode {
            let joint = joint_optimize(&config)?;
            for (i, opt) in joint.per_count.iter().enumerate() {
                let _ = writeln!(csv, "{},0", optimum_row(i as u32 + 1, opt));
                rows += 1;
            }
            let _ = writeln!(csv, "{},1", optimum_row(joint.sensors_used, &joint.optimum));
            rows += 1;
        } else {
            for &s in &counts {
                let opt = optimal_tau(&config, s)?;
                let _ = writeln!(csv, "{}", optimum_row(s, &opt));
                rows += 1;
            }
        }
        Ok(())
    })();

    write_output(&args.out, &csv)?;
    RunReport::new("optimize", &config).output(out_name(&args.out), rows).finish(started);
    outcome
}

struct SweepPoint {
    param: f64,
    config: NetworkConfig,
}

fn sweep_points(
    config: &NetworkConfig,
    param: &str,
    range: &str,
    log: bool,
) -> Result<Vec<SweepPoint>, Failure> {
    let parts: Vec<&str> = range.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(Failure::config(format!("--range must be lo:hi:n, got '{range}'")));
    };
    let lo: f64 = lo.parse().map_err(|_| Failure::config("range lo is not a number"))?;
    let hi: f64 = hi.parse().map_err(|_| Failure::config("range hi is not a number"))?;
    let n: usize = n.parse().map_err(|_| Failure::config("range n is not an integer"))?;
    if n < 2 {
        return Err(Failure::config("range needs n >= 2"));
    }
    if !(lo > 0.0 && hi > lo) {
        return Err(Failure::config("range needs 0 < lo < hi"));
    }

    let grid = (0..n).map(|i| {
        let t = i as f64 / (n - 1) as f64;
        if log { (lo.ln() + (hi.ln() - lo.ln()) * t).exp() } else { lo + (hi - lo) * t }
    });

    grid.map(|value| {
        let mut cfg = *config;
        match param {
            // s = sigma2_w / b is swept by moving sigma2_w at fixed b.
            "s" => cfg.system.sigma2_w = value * cfg.preprocessing.b(),
            // a enters the optimum only through a^2; keep the configured sign.
            "a2" => {
                let sign = if cfg.system.a < 0.0 { -1.0 } else { 1.0 };
                cfg.system.a = sign * value.sqrt();
            }
            "gamma" => match cfg.preprocessing {
                PreprocessingModel::InversePower { b, .. } => {
                    cfg.preprocessing = PreprocessingModel::InversePower { b, gamma: value }
                }
                PreprocessingModel::Exponential { b, .. } => {
                    cfg.preprocessing = PreprocessingModel::Exponential { b, gamma: value }
                }
                PreprocessingModel::InverseLinear { .. } => {
                    return Err(Failure::config(
                        "--param gamma needs an inverse_power or exponential preprocessing model",
                    ))
                }
            },
            "c" => match cfg.delays.comm {
                CommDelay::Compressing { .. } => {
                    cfg.delays.comm = CommDelay::Compressing { c: value }
                }
                _ => {
                    return Err(Failure::config(
                        "--param c needs a compressing communication delay in the config",
                    ))
                }
            },
            other => {
                return Err(Failure::config(format!(
                    "--param must be one of s, a2, gamma, c; got '{other}'"
                )))
            }
        }
        Ok(SweepPoint { param: value, config: cfg })
    })
    .collect()
}

fn cmd_sweep(args: SweepArgs, started: Instant) -> Result<(), Failure> {
    let config = load_config(&args.config)?;
    let points = sweep_points(&config, &args.param, &args.range, args.log)?;

    let mut csv = String::from("param,tau_opt,tau_upper_bound,P_opt\n");
    let mut rows = 0usize;
    let outcome: Result<(), Failure> = (|| {
        for point in &points {
            let opt = optimal_tau(&point.config, point.config.sensors)?;
            let sys = &point.config.system;
            let bound = tau_upper_bound(sys.a, sys.sigma2_w / point.config.preprocessing.b());
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                fmt(point.param),
                fmt(opt.tau_opt),
                fmt(bound),
                fmt(opt.value)
            );
            rows += 1;
        }
        Ok(())
    })();

    write_output(&args.out, &csv)?;
    RunReport::new("sweep", &config).output(out_name(&args.out), rows).finish(started);
    outcome
}

fn network_block(csv: &mut String, config: &NetworkConfig, tau: f64) -> Result<usize, Failure> {
    let result = optimal_sensor_count(config, tau)?;
    for &(s, p) in &result.table {
        let flag = u8::from(s == result.s_opt);
        let _ = writeln!(csv, "{},{s},{},{flag}", fmt(tau), fmt(p));
    }
    Ok(result.table.len())
}

fn cmd_network(args: NetworkArgs, started: Instant) -> Result<(), Failure> {
    let config = load_config(&args.config)?;
    if args.tau.is_empty() {
        return Err(Failure::config("at least one --tau value is required"));
    }
    let mut csv = String::from("tau,S,P,is_s_opt\n");
    let mut rows = 0usize;
    for &tau in &args.tau {
        rows += network_block(&mut csv, &config, tau)?;
    }
    write_output(&args.out, &csv)?;
    RunReport::new("network", &config).output(out_name(&args.out), rows).finish(started);
    Ok(())
}

fn cmd_simulate(args: SimulateArgs, started: Instant) -> Result<(), Failure> {
    let config = load_config(&args.config)?;
    let sensors = args.sensors.unwrap_or(config.sensors);
    let plan = SimPlan::new(args.step, args.horizon, args.trials, args.seed);

    let mut csv = String::from("tau,S,empirical,stderr,analytic,z_score\n");
    let mut report = RunReport::new("simulate", &config);
    for &tau in &args.tau {
        let r = monte_carlo_variance(&config, tau, sensors, &plan)?;
        let breakdown = steady_state_error_variance(&config, tau, sensors)?.delays;
        let (steps, residual) = delay_steps(breakdown.tau_tot, plan.step);
        report.note(format!(
            "tau={tau}: delay {steps} steps, rounding residual {residual:.3e}, {} samples",
            r.samples
        ));
        let _ = writeln!(
            csv,
            "{},{sensors},{},{},{},{}",
            fmt(tau),
            fmt(r.empirical_variance),
            fmt(r.stderr),
            fmt(r.analytic_variance),
            fmt(r.z_score)
        );
    }
    write_output(&args.out, &csv)?;
    report.output(out_name(&args.out), args.tau.len()).finish(started);
    Ok(())
}

fn cmd_reproduce(args: ReproduceArgs, started: Instant) -> Result<(), Failure> {
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| Failure::config(format!("cannot create {}: {e}", args.out_dir.display())))?;
    let dir = &args.out_dir;
    let mut manifest = String::from("figure,key,value\n");
    let mut report = RunReport::for_reproduce(args.figure);

    match args.figure {
        2 => reproduce_fig2(dir, &mut manifest, &mut report)?,
        3 => reproduce_fig3(dir, &mut manifest, &mut report)?,
        4 => reproduce_fig4(dir, &mut manifest, &mut report)?,
        5 => reproduce_fig5(dir, &mut manifest, &mut report)?,
        6 => reproduce_fig6(dir, &mut manifest, &mut report)?,
        other => return Err(Failure::config(format!("no figure {other}; pick one of 2..=6"))),
    }

    let manifest_path = dir.join("manifest.csv");
    fs::write(&manifest_path, &manifest)
        .map_err(|e| Failure::config(format!("cannot write manifest: {e}")))?;
    report
        .output(manifest_path.display().to_string(), manifest.lines().count() - 1)
        .finish(started);
    Ok(())
}

fn manifest_config(manifest: &mut String, figure: u8, cfg: &NetworkConfig) {
    let sys = cfg.system;
    let _ = writeln!(manifest, "{figure},a,{:?}", sys.a);
    let _ = writeln!(manifest, "{figure},sigma2_w,{:?}", sys.sigma2_w);
    let _ = writeln!(manifest, "{figure},b,{:?}", cfg.preprocessing.b());
}

fn reproduce_fig2(dir: &Path, manifest: &mut String, report: &mut RunReport) -> Result<(), Failure> {
    let fig = figures::variance_decomposition();
    manifest_config(manifest, 2, &fig.config);
    let _ = writeln!(manifest, "2,tau_range,{:?}..{:?}", fig.tau_range.0, fig.tau_range.1);
    let _ = writeln!(manifest, "2,points,{}", fig.points);

    let mut csv = String::from("tau,f,q,total\n");
    for tau in linspace(fig.tau_range, fig.points) {
        let v = steady_state_error_variance(&fig.config, tau, 1)?;
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt(tau),
            fmt(v.estimation_part),
            fmt(v.noise_part),
            fmt(v.total)
        );
    }
    emit(dir, "fig2_decomposition.csv", &csv, fig.points, report)
}

fn reproduce_fig3(dir: &Path, manifest: &mut String, report: &mut RunReport) -> Result<(), Failure> {
    let fig = figures::delay_vs_noise_sweep();
    let _ = writeln!(manifest, "3,a,{:?}", fig.a);
    let _ = writeln!(manifest, "3,s_range,{:?}..{:?} (log)", fig.s_range.0, fig.s_range.1);
    let _ = writeln!(manifest, "3,points,{}", fig.points);

    let mut csv = String::from("s,tau_opt,tau_upper_bound,P_opt\n");
    for s in logspace(fig.s_range, fig.points) {
        let cfg = NetworkConfig::single_sensor(
            ScalarSystem::new(fig.a, s),
            PreprocessingModel::InverseLinear { b: 1.0 },
        );
        let opt = optimal_tau(&cfg, 1)?;
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt(s),
            fmt(opt.tau_opt),
            fmt(tau_upper_bound(fig.a, s)),
            fmt(opt.value)
        );
    }
    emit(dir, "fig3_tau_opt_vs_s.csv", &csv, fig.points, report)
}

fn reproduce_fig4(dir: &Path, manifest: &mut String, report: &mut RunReport) -> Result<(), Failure> {
    for panel in figures::delay_model_panels() {
        let name = if panel.base.system.a > 0.0 { "fig4_unstable.csv" } else { "fig4_stable.csv" };
        manifest_config(manifest, 4, &panel.base);
        let _ = writeln!(manifest, "4,tau_c,{:?}", panel.tau_c);
        let _ = writeln!(manifest, "4,c,{:?}", panel.c);
        let _ = writeln!(
            manifest,
            "4,tau_range,{:?}..{:?} (log)",
            panel.tau_range.0, panel.tau_range.1
        );

        let curves: [(&str, NetworkConfig); 3] = [
            ("no_comm", panel.without_comm()),
            ("constant_comm", panel.with_constant_comm()),
            ("compressing_comm", panel.with_compressing_comm()),
        ];
        let mut csv = String::from("curve,tau,P\n");
        let mut rows = 0usize;
        for (label, cfg) in curves {
            for tau in logspace(panel.tau_range, panel.points) {
                let v = steady_state_error_variance(&cfg, tau, 1)?;
                let _ = writeln!(csv, "{label},{},{}", fmt(tau), fmt(v.total));
                rows += 1;
            }
        }
        emit(dir, name, &csv, rows, report)?;
    }
    Ok(())
}

fn reproduce_fig5(dir: &Path, manifest: &mut String, report: &mut RunReport) -> Result<(), Failure> {
    let fig = figures::sensor_count_curves();
    manifest_config(manifest, 5, &fig.config);
    let _ = writeln!(manifest, "5,tau,{:?}", fig.tau);
    let _ = writeln!(manifest, "5,tau_c,0.1");
    let _ = writeln!(manifest, "5,tau_f,0.02");
    let _ = writeln!(manifest, "5,sensors,{}", fig.config.sensors);

    let with = optimal_sensor_count(&fig.config, fig.tau)?;
    let without = optimal_sensor_count(&fig.without_fusion(), fig.tau)?;

    let mut csv = String::from("fusion,tau,S,P,is_s_opt\n");
    let mut rows = 0usize;
    for (label, table) in [("with", &with), ("without", &without)] {
        for &(s, p) in &table.table {
            let flag = u8::from(s == table.s_opt);
            let _ = writeln!(csv, "{label},{},{s},{},{flag}", fmt(fig.tau), fmt(p));
            rows += 1;
        }
    }
    emit(dir, "fig5_sensor_count.csv", &csv, rows, report)?;

    // Cost of designing as if fusion were free, under both normalizations.
    let p_with_at_opt = with.value;
    let p_without_at_opt = without.table[(with.s_opt - 1) as usize].1;
    let n = fig.config.sensors as usize;
    let (p_with_at_n, p_without_at_n) = (with.table[n - 1].1, without.table[n - 1].1);
    let _ = writeln!(manifest, "5,s_opt,{}", with.s_opt);
    let _ = writeln!(
        manifest,
        "5,drop_at_s_opt_vs_with,{:?}",
        (p_with_at_opt - p_without_at_opt) / p_with_at_opt
    );
    let _ = writeln!(
        manifest,
        "5,drop_at_s_opt_vs_without,{:?}",
        (p_with_at_opt - p_without_at_opt) / p_without_at_opt
    );
    let _ = writeln!(
        manifest,
        "5,drop_at_n_vs_with,{:?}",
        (p_with_at_n - p_without_at_n) / p_with_at_n
    );
    let _ = writeln!(
        manifest,
        "5,drop_at_n_vs_without,{:?}",
        (p_with_at_n - p_without_at_n) / p_without_at_n
    );
    Ok(())
}

fn reproduce_fig6(dir: &Path, manifest: &mut String, report: &mut RunReport) -> Result<(), Failure> {
    let fig = figures::sensor_count_by_tau();
    manifest_config(manifest, 6, &fig.config);
    let _ = writeln!(manifest, "6,tau_c,0.1");
    let _ = writeln!(manifest, "6,tau_f,0.02");
    let _ = writeln!(manifest, "6,sensors,{}", fig.config.sensors);
    let _ = writeln!(manifest, "6,taus,{:?}", fig.taus);

    let mut csv = String::from("tau,S,P,is_s_opt\n");
    let mut rows = 0usize;
    for &tau in &fig.taus {
        rows += network_block(&mut csv, &fig.config, tau)?;
    }
    emit(dir, "fig6_sensor_count_by_tau.csv", &csv, rows, report)
}

fn emit(
    dir: &Path,
    name: &str,
    csv: &str,
    rows: usize,
    report: &mut RunReport,
) -> Result<(), Failure> {
    let path = dir.join(name);
    fs::write(&path, csv)
        .map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display())))?;
    report.output(path.display().to_string(), rows);
    Ok(())
}

fn linspace((lo, hi): (f64, f64), n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn logspace((lo, hi): (f64, f64), n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
}
