//! `zetalab`: evaluate S_n, count zeros, check the convolution identities,
//! build resonators and run hunts and pipelines.
//!
//! Exit codes: 0 ok, 1 i/o, 2 invalid configuration, 3 numeric failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use zetalab::arith::KernelParams;
use zetalab::convolution::{lemma22_eval, prop24_eval};
use zetalab::experiment::{emit_outputs, replay, run_experiment, ExperimentConfig, ExperimentKind, ExperimentReport};
use zetalab::iterates::{delta_constant, s_value, sn_value, IterateOrder, Route};
use zetalab::resonator::{build_resonator, gaussian_moment, one_sided_moment, MomentRequest, MomentWeight, Resonator};
use zetalab::zeta::{count_zeros, rvm_main, CriticalStripPoint, PrecisionPolicy};
use zetalab::{Error, Result};

const WORKERS_VAR: &str = "ZETALAB_WORKERS";

#[derive(Parser)]
#[command(name = "zetalab", version, about = "Numerical laboratory for S(sigma, t) and its iterates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// S, S_n and the constant delta_{n, sigma} at a point.
    Sn {
        #[command(subcommand)]
        op: SnOp,
    },
    /// Zeros of zeta on the critical line.
    Zeros {
        #[command(subcommand)]
        op: ZerosOp,
    },
    /// Two-sided checks of the convolution identities.
    Conv {
        #[command(subcommand)]
        op: ConvOp,
    },
    /// Resonator construction and moments.
    Res {
        #[command(subcommand)]
        op: ResOp,
    },
    /// Extreme-value hunts for sign * Delta S_n.
    Hunt {
        #[command(subcommand)]
        op: RunOp,
    },
    /// The resonated-moment chain.
    Pipeline {
        #[command(subcommand)]
        op: RunOp,
    },
}

#[derive(Subcommand)]
enum SnOp {
    Eval(SnEval),
}

#[derive(Subcommand)]
enum ZerosOp {
    Count(ZerosCount),
}

#[derive(Subcommand)]
enum ConvOp {
    Lemma22(Lemma22Args),
    Prop24(Prop24Args),
}

#[derive(Subcommand)]
enum ResOp {
    Build(ResBuild),
    Moment(ResMoment),
}

#[derive(Subcommand)]
enum RunOp {
    Run(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Rep,
    Rec,
}

#[derive(Args)]
struct Precision {
    /// Absolute error target for zeta evaluations.
    #[arg(long, default_value_t = 1e-9)]
    target: f64,
}

impl Precision {
    fn policy(&self) -> PrecisionPolicy {
        PrecisionPolicy::with_target(self.target)
    }
}

#[derive(Args)]
struct SnEval {
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    #[arg(long)]
    t: f64,
    #[arg(long, value_enum, default_value_t = RouteArg::Rep)]
    route: RouteArg,
    #[command(flatten)]
    precision: Precision,
}

#[derive(Args)]
struct ZerosCount {
    #[arg(long)]
    t: f64,
    /// Print the ordinates as well.
    #[arg(long)]
    list: bool,
    #[command(flatten)]
    precision: Precision,
}

#[derive(Args)]
struct Lemma22Args {
    #[arg(long, default_value_t = 0.75)]
    sigma: f64,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    h: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long = "H", default_value_t = 0.0, allow_negative_numbers = true)]
    h_shift: f64,
    #[arg(long = "T", default_value_t = 1e4)]
    big_t: f64,
    #[command(flatten)]
    precision: Precision,
}

#[derive(Args)]
struct Prop24Args {
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    h: f64,
    #[arg(long, default_value_t = 0.125)]
    gamma: f64,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    delta: i8,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    delta_prime: i8,
    #[arg(long = "T", default_value_t = 1e4)]
    big_t: f64,
    #[command(flatten)]
    precision: Precision,
}

/// Every key of the experiment file, as optional overrides.
#[derive(Args, Default)]
struct ConfigArgs {
    /// TOML experiment file; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long = "T")]
    big_t: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sign: Option<i8>,
    #[arg(long)]
    c_floor: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    chunk: Option<usize>,
    #[arg(long)]
    refine_top: Option<usize>,
    #[arg(long)]
    refine_factor: Option<usize>,
    #[arg(long)]
    target: Option<f64>,
    #[arg(long)]
    guard_digits: Option<u32>,
    /// Window override as a comma-separated prime list.
    #[arg(long, value_delimiter = ',')]
    primes: Option<Vec<u64>>,
    /// Window override as two values: lower upper.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    interval: Option<Vec<f64>>,
    #[arg(long)]
    support_cap: Option<usize>,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::from_toml(
                &fs::read_to_string(p).map_err(|e| Error::InvalidConfig(format!("{}: {e}", p.display())))?,
            )?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($field:expr, $value:expr) => {
                if let Some(v) = $value {
                    $field = v;
                }
            };
        }
        set!(c.run.n, self.n);
        set!(c.run.sigma, self.sigma);
        set!(c.run.big_t, self.big_t);
        set!(c.run.beta, self.beta);
        set!(c.run.sign, self.sign);
        set!(c.run.c_floor, self.c_floor);
        set!(c.grid.chunk, self.chunk);
        set!(c.grid.refine_top, self.refine_top);
        set!(c.grid.refine_factor, self.refine_factor);
        set!(c.precision.target, self.target);
        set!(c.precision.guard_digits, self.guard_digits);
        set!(c.resonator.support_cap, self.support_cap);
        if self.h.is_some() {
            c.run.h = self.h;
        }
        if self.step.is_some() {
            c.grid.step = self.step;
        }
        if let Some(p) = &self.primes {
            c.resonator.primes = Some(p.clone());
            c.resonator.interval = None;
        }
        if let Some(i) = &self.interval {
            c.resonator.interval = Some([i[0], i[1]]);
            c.resonator.primes = None;
        }
        Ok(c)
    }
}

#[derive(Args)]
struct ResBuild {
    #[command(flatten)]
    config: ConfigArgs,
    /// Write the resonator_v1 record here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ResMoment {
    #[command(flatten)]
    config: ConfigArgs,
    /// A saved resonator_v1 record; otherwise one is built from the config.
    #[arg(long)]
    resonator: Option<PathBuf>,
    /// Dirichlet weights as n=c pairs over prime powers; G = 1 when absent.
    #[arg(long, value_delimiter = ',')]
    coeff: Vec<String>,
    /// Also report the one-sided integral of m^{-it} |R|^2 Phi(t/T) for this m.
    #[arg(long)]
    one_sided: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Directory for rows.csv and report.json.
    #[arg(long, default_value = "zetalab-out")]
    out: PathBuf,
    /// Re-run the configuration stored in a report.json.
    #[arg(long, conflicts_with = "config")]
    replay: Option<PathBuf>,
}

fn print(v: &serde_json::Value) {
    use std::io::Write;
    // a closed pipe (e.g. `| head`) is not an error
    let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(v).expect("json values serialize"));
}

fn to_json<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn sn_eval(a: &SnEval) -> Result<()> {
    let policy = a.precision.policy();
    let p = CriticalStripPoint::new(a.sigma, a.t)?;
    let route = match a.route {
        RouteArg::Rep => Route::Representation,
        RouteArg::Rec => Route::Recursive,
    };
    let s = s_value(p, &policy)?;
    let mut out = json!({ "sigma": a.sigma, "t": a.t, "S": s });
    if a.n > 0 {
        let n = IterateOrder::new(a.n)?;
        out["Sn"] = to_json(&sn_value(n, p, route, &policy)?);
        out["delta"] = to_json(&delta_constant(n, a.sigma, &policy)?);
    }
    print(&out);
    Ok(())
}

fn zeros_count(a: &ZerosCount) -> Result<()> {
    let z = count_zeros(a.t, &a.precision.policy())?;
    let mut out = json!({
        "t": a.t,
        "count": z.count_below(a.t),
        "main": rvm_main(a.t),
        "S": z.s_on_line(a.t),
        "certificate": to_json(&z.method),
    });
    if a.list {
        out["ordinates"] = to_json(&z.ordinates);
    }
    print(&out);
    Ok(())
}

fn lemma22(a: &Lemma22Args) -> Result<()> {
    let r = lemma22_eval(a.sigma, a.t, a.h, a.alpha, a.h_shift, a.big_t, &a.precision.policy())?;
    let mut out = to_json(&r);
    out["within_budget"] = json!(r.within_budget());
    print(&out);
    Ok(())
}

fn prop24(a: &Prop24Args) -> Result<()> {
    let kp = KernelParams::new(a.gamma, a.delta, a.delta_prime, a.big_t)?;
    let r = prop24_eval(IterateOrder::new(a.n)?, a.sigma, a.t, a.h, &kp, a.big_t, &a.precision.policy())?;
    let mut out = to_json(&r);
    out["within_budget"] = json!(r.within_budget());
    print(&out);
    Ok(())
}

fn res_build(a: &ResBuild) -> Result<()> {
    let res = build_resonator(&a.config.load()?.resonator_spec()?)?;
    let text = res.to_json()?;
    match &a.out {
        Some(p) => fs::write(p, text + "\n")?,
        None => {
            use std::io::Write;
            let _ = writeln!(std::io::stdout().lock(), "{text}");
        }
    }
    Ok(())
}

fn parse_coeff(s: &str) -> Result<(u64, f64)> {
    let bad = || Error::InvalidConfig(format!("coefficient {s:?} is not of the form n=c"));
    let (n, c) = s.split_once('=').ok_or_else(bad)?;
    Ok((n.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?))
}

fn res_moment(a: &ResMoment) -> Result<()> {
    let cfg = a.config.load()?;
    let res = match &a.resonator {
        Some(p) => Resonator::from_json(&fs::read_to_string(p)?)?,
        None => build_resonator(&cfg.resonator_spec()?)?,
    };
    let weight = if a.coeff.is_empty() {
        MomentWeight::Unit
    } else {
        MomentWeight::Dirichlet {
            coefficients: a.coeff.iter().map(|s| parse_coeff(s)).collect::<Result<_>>()?,
            tail_bound: 0.0,
        }
    };
    let req = MomentRequest { big_t: res.spec.big_t, sigma: res.spec.sigma, weight };
    let m = gaussian_moment(&res, &req)?;
    let mut out = json!({
        "request": to_json(&req),
        "moment": to_json(&m),
        "support_size": res.support.len(),
        "sum_f2": res.provenance.sum_f2,
        "ratio_to_T_sum_f2": m.value / (res.spec.big_t * res.provenance.sum_f2),
    });
    if let Some(k) = a.one_sided {
        out["one_sided"] = to_json(&one_sided_moment(&res, (k as f64).ln(), res.spec.big_t));
    }
    print(&out);
    Ok(())
}

fn run(kind: ExperimentKind, a: &RunArgs) -> Result<()> {
    let (report, rows) = match &a.replay {
        Some(p) => replay(&ExperimentReport::from_json(&fs::read_to_string(p)?)?)?,
        None => run_experiment(kind, &a.config.load()?)?,
    };
    let paths = emit_outputs(&a.out, &report, &rows)?;
    let mut out = json!({ "csv": paths.csv, "report": paths.report, "rows": rows.len() });
    if let Some(h) = &report.hunt {
        out["best_t"] = json!(h.best_t);
        out["best_value"] = json!(h.best_value);
        out["ratio"] = json!(h.ratio);
        out["by_sign"] = to_json(&h.by_sign);
        out["mean_value"] = to_json(&h.mean_value);
        out["wall_time_s"] = json!(h.wall_time_s);
    }
    if let Some(p) = &report.pipeline {
        out["main_term"] = json!(p.main_term);
        out["lower_bound"] = json!(p.lower_bound);
        out["main_dominates"] = json!(p.main_dominates);
    }
    print(&out);
    Ok(())
}

fn configure_workers() -> Result<()> {
    let Ok(v) = std::env::var(WORKERS_VAR) else { return Ok(()) };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidConfig(format!("{WORKERS_VAR} = {v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        e if e.is_config() => 2,
        Error::Io(_) => 1,
        _ => 3,
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    configure_workers()?;
    match &cli.command {
        Command::Sn { op: SnOp::Eval(a) } => sn_eval(a),
        Command::Zeros { op: ZerosOp::Count(a) } => zeros_count(a),
        Command::Conv { op: ConvOp::Lemma22(a) } => lemma22(a),
        Command::Conv { op: ConvOp::Prop24(a) } => prop24(a),
        Command::Res { op: ResOp::Build(a) } => res_build(a),
        Command::Res { op: ResOp::Moment(a) } => res_moment(a),
        Command::Hunt { op: RunOp::Run(a) } => run(ExperimentKind::Hunt, a),
        Command::Pipeline { op: RunOp::Run(a) } => run(ExperimentKind::Pipeline, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("zetalab: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
