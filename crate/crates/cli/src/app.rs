//! Command-line definitions and dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand};
use colheat::dynamics::{InitialCondition, RatePair};
use colheat::spin::format_half;
use colheat::thermo::{critical_temperature_approx, critical_temperature_numeric};
use colheat::SpinEnsemble;
use rayon::prelude::*;

use crate::args::{parse_config, parse_init, parse_spin, Grid, WeightsArg};
use crate::dynamics::{run_dynamics, DynMode, DynamicsSpec};
use crate::error::{CliError, CliResult};
use crate::figures::{run_figure, Figure};
use crate::si::{si_report, Preset, SiContext};
use crate::sweep::{run_sweep, EngineSettings, Quantity, SweepSpec};
use crate::table::{Format, Table};

pub const VERSION: &str = concat!("colheat ", env!("CARGO_PKG_VERSION"));

fn spin_value(s: &str) -> CliResult<u32> {
    parse_spin(s)
}

fn init_value(s: &str) -> CliResult<InitialCondition> {
    parse_init(s)
}

#[derive(Debug, Parser)]
#[command(
    name = "colheat",
    version,
    about = "Collective heat capacity of spin ensembles: sweeps, figure data and unit conversion",
    args_override_self = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one quantity for collective and independent coupling over a grid.
    Sweep(SweepArgs),
    /// Crossover temperature and precision gains in kelvin for a given splitting.
    SiReport(SiArgs),
    /// Relaxation trajectory of the level populations.
    Dynamics(DynamicsArgs),
    /// Data columns of one figure of the paper.
    Figure(FigureArgs),
    /// Approximate and numeric crossover temperatures.
    Tcr(TcrArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps, 0 for one per core.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// TOML file of `key = value` flag values; command-line flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    /// Number of spins.
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    /// Spin of each member, e.g. 1/2, 3/2, 1.
    #[arg(long, default_value = "1/2", value_parser = spin_value)]
    pub spin: u32,
    /// Sector weights: symmetric, thermal=<b0> or file=<path>.
    #[arg(long, default_value = "symmetric", value_parser = WeightsArg::from_str_value)]
    pub weights: WeightsArg,
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    #[arg(long, default_value_t = 1.0)]
    pub lambda_h: f64,
    /// Fixed cold compression; overrides --delta-eta.
    #[arg(long)]
    pub lambda_c: Option<f64>,
    /// Distance below Carnot efficiency.
    #[arg(long, default_value_t = 0.01)]
    pub delta_eta: f64,
    /// b_c - b_h [default: 0.1].
    #[arg(long, conflicts_with_all = ["bh", "bc"])]
    pub delta_b: Option<f64>,
    /// Hot bath b; with --bc sets b_c - b_h, the grid still sets θ_h.
    #[arg(long, requires = "bc")]
    pub bh: Option<f64>,
    #[arg(long, requires = "bh")]
    pub bc: Option<f64>,
    /// Cycle time of the independent engine in units of 1/G.
    #[arg(long, default_value_t = 1.0)]
    pub tau_ind: f64,
}

#[derive(Debug, Args)]
pub struct DynamicsExtras {
    #[arg(long, value_enum, default_value = "rate")]
    pub mode: DynMode,
    /// Bath b = ħω/k_B T.
    #[arg(long, default_value_t = 2.0)]
    pub b: f64,
    /// Downward rate G(ω).
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    /// Ladder populations at t = 0: ground, top, uniform or thermal=<b0>.
    #[arg(long, default_value = "ground", value_parser = init_value)]
    pub init: InitialCondition,
    /// Total-variation threshold defining the relaxation time.
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    /// Add one column per (J, m) population.
    #[arg(long)]
    pub populations: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    /// lo:hi:points:log|lin over kT/ħω, kT_h/(ħω λ_h), n (tcr) or t·G (dynamics).
    #[arg(long, default_value = "0.01:100:200:log", value_parser = Grid::from_str_value)]
    pub grid: Grid,
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Repeated measurements in the precision bound.
    #[arg(long, default_value_t = 1)]
    pub nu: u64,
    #[command(flatten)]
    pub dynamics: DynamicsExtras,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    /// Output times lo:hi:points:log|lin in units of 1/G.
    #[arg(long, default_value = "0:10:101:lin", value_parser = Grid::from_str_value)]
    pub grid: Grid,
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[command(flatten)]
    pub dynamics: DynamicsExtras,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub preset: Figure,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SiArgs {
    /// Physical system supplying ħω and the default ensemble.
    #[arg(long, value_enum, default_value = "nv")]
    pub context: Preset,
    /// Level splitting in joule, replacing the context value.
    #[arg(long)]
    pub hbar_omega: Option<f64>,
    /// Number of spins [default: 10].
    #[arg(long)]
    pub n: Option<u32>,
    /// Spin of each member [default: 1/2 for nv, 7/2 for cesium].
    #[arg(long, value_parser = spin_value)]
    pub spin: Option<u32>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TcrArgs {
    #[arg(long, value_delimiter = ',', default_value = "2,5,10,100")]
    pub n_values: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "1/2,3/2,7/2,9/2", value_parser = spin_value)]
    pub spins: Vec<u32>,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl WeightsArg {
    fn from_str_value(s: &str) -> CliResult<Self> {
        s.parse()
    }
}

impl Grid {
    fn from_str_value(s: &str) -> CliResult<Self> {
        s.parse()
    }
}

impl EngineArgs {
    fn settings(&self) -> CliResult<EngineSettings> {
        let delta_b = match (self.bh, self.bc, self.delta_b) {
            (Some(bh), Some(bc), _) => {
                if !(bc > bh) {
                    return Err(CliError::usage(format!(
                        "the cold bath needs bc > bh, got bh={bh}, bc={bc}"
                    )));
                }
                bc - bh
            }
            (_, _, Some(d)) => d,
            _ => EngineSettings::default().delta_b,
        };
        if !(delta_b > 0.0 && delta_b.is_finite()) {
            return Err(CliError::usage(format!(
                "delta-b must be positive, got {delta_b}"
            )));
        }
        if !(self.delta_eta.is_finite() && self.delta_eta >= 0.0) {
            return Err(CliError::usage(format!(
                "delta-eta must be non-negative, got {}",
                self.delta_eta
            )));
        }
        Ok(EngineSettings {
            lambda_h: self.lambda_h,
            lambda_c: self.lambda_c,
            delta_b,
            delta_eta: self.delta_eta,
            tau_ind: self.tau_ind,
        })
    }
}

fn dynamics_spec(
    ensemble: &EnsembleArgs,
    extras: &DynamicsExtras,
    times: Vec<f64>,
) -> CliResult<DynamicsSpec> {
    let e = SpinEnsemble::new(ensemble.n, ensemble.spin)?;
    Ok(DynamicsSpec {
        mode: extras.mode,
        weights: ensemble.weights.resolve(&e)?,
        weights_label: ensemble.weights.to_string(),
        init: extras.init,
        rates: RatePair::thermal(extras.g, extras.b)?,
        times,
        epsilon: extras.epsilon,
        populations: extras.populations,
    })
}

fn tcr_table(args: &TcrArgs) -> CliResult<Table> {
    let cases: Vec<(u32, u32)> = args
        .n_values
        .iter()
        .flat_map(|&n| args.spins.iter().map(move |&s| (n, s)))
        .collect();
    let rows = cases
        .par_iter()
        .map(|&(n, two_s)| -> CliResult<Vec<f64>> {
            let e = SpinEnsemble::new(n, two_s)?;
            let approx = critical_temperature_approx(&e);
            let numeric = critical_temperature_numeric(&e)?;
            Ok(vec![
                f64::from(n),
                f64::from(two_s) / 2.0,
                approx,
                numeric,
                (numeric - approx).abs() / numeric,
            ])
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut t = Table::new([
        "n",
        "s",
        "Tcr_approx_kT_over_hw",
        "Tcr_numeric_kT_over_hw",
        "rel_gap",
    ]);
    t.rows = rows;
    t.meta(
        "spins",
        args.spins
            .iter()
            .map(|&s| format_half(s))
            .collect::<Vec<_>>(),
    );
    Ok(t)
}

fn output_of(command: &Command) -> &OutputArgs {
    match command {
        Command::Sweep(a) => &a.output,
        Command::SiReport(a) => &a.output,
        Command::Dynamics(a) => &a.output,
        Command::Figure(a) => &a.output,
        Command::Tcr(a) => &a.output,
    }
}

fn render_table(mut t: Table, format: Format) -> String {
    t.meta("version", VERSION);
    t.render(format)
}

/// Runs a parsed command and returns the rendered output.
pub fn run(cli: &Cli) -> CliResult<String> {
    let out = output_of(&cli.command);
    let format = out.format;
    let body = || -> CliResult<String> {
        Ok(match &cli.command {
            Command::Sweep(a) => {
                let e = SpinEnsemble::new(a.ensemble.n, a.ensemble.spin)?;
                let dynamics = (a.quantity == Quantity::Dynamics)
                    .then(|| dynamics_spec(&a.ensemble, &a.dynamics, Vec::new()))
                    .transpose()?;
                let spec = SweepSpec {
                    quantity: a.quantity,
                    weights: a.ensemble.weights.resolve(&e)?,
                    weights_label: a.ensemble.weights.to_string(),
                    grid: a.grid,
                    engine: a.engine.settings()?,
                    nu: a.nu,
                    dynamics,
                };
                render_table(run_sweep(&spec)?, format)
            }
            Command::Dynamics(a) => {
                let spec = dynamics_spec(&a.ensemble, &a.dynamics, a.grid.values())?;
                let mut t = run_dynamics(&spec)?;
                t.meta("grid", a.grid.to_string());
                render_table(t, format)
            }
            Command::Figure(a) => render_table(run_figure(a.preset)?, format),
            Command::Tcr(a) => render_table(tcr_table(a)?, format),
            Command::SiReport(a) => {
                let mut ctx = a.context.context();
                if let Some(h) = a.hbar_omega {
                    ctx = SiContext::new(h, Some("custom".into()))?;
                }
                let (n0, s0) = a.context.ensemble();
                let e = SpinEnsemble::new(a.n.unwrap_or(n0), a.spin.unwrap_or(s0))?;
                si_report(&ctx, &e)?.render(format)
            }
        })
    };
    if out.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(out.threads)
            .build()
            .map_err(|e| CliError::usage(format!("thread pool: {e}")))?;
        pool.install(body)
    } else {
        body()
    }
}

fn config_path(argv: &[OsString]) -> Option<PathBuf> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Splices the entries of a `--config` file in front of the subcommand's
/// own flags so that explicit flags take precedence.
pub fn expand_config(argv: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let Some(sub_name) = argv.get(1).map(|s| s.to_string_lossy().into_owned()) else {
        return Ok(argv);
    };
    let root = Cli::command();
    let Some(sub) = root.find_subcommand(&sub_name) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut spliced = Vec::new();
    for (key, value) in parse_config(&text)? {
        if key == "config" {
            return Err(CliError::usage(
                "a config file cannot name another config file",
            ));
        }
        let find = |cmd: &clap::Command| {
            cmd.get_arguments()
                .find(|a| a.get_long() == Some(key.as_str()))
                .cloned()
        };
        match find(sub) {
            Some(arg) if arg.get_action().takes_values() => {
                spliced.push(OsString::from(format!("--{key}={value}")))
            }
            Some(_) => match value.as_str() {
                "true" => spliced.push(OsString::from(format!("--{key}"))),
                "false" => {}
                v => {
                    return Err(CliError::usage(format!(
                        "config: {key} takes true or false, got {v:?}"
                    )))
                }
            },
            None if root.get_subcommands().any(|c| find(c).is_some()) => {}
            None => return Err(CliError::usage(format!("config: unknown key {key:?}"))),
        }
    }
    let mut out = argv;
    out.splice(2..2, spliced);
    Ok(out)
}

fn write_output(text: &str, out: Option<&PathBuf>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

/// Full program: config expansion, parsing, dispatch and output. Returns
/// the process exit code.
pub fn main_with_args(argv: impl IntoIterator<Item = OsString>) -> i32 {
    let argv = match expand_config(argv.into_iter().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("colheat: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli).and_then(|text| write_output(&text, output_of(&cli.command).out.as_ref())) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("colheat: {e}");
            e.exit_code()
        }
    }
}
