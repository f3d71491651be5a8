//! Command-line front end: flag parsing, config-file merging and the run loop.

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use hybrid_ww::output::OutputWriter;
use hybrid_ww::reference::{benchmark_reference, load_reference, save_reference, ReferenceSettings, ReferenceSolution};
use hybrid_ww::{CombKind, Mode, RunConfig, Simulation};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FilterArg {
    None,
    Ma,
    Fourier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CombArg {
    Weight,
    Particle,
}

/// Time-dependent slab Monte Carlo with hybrid low-order weight windows.
///
/// Values come from the built-in benchmark, then the config file, then flags.
#[derive(Debug, Parser)]
#[command(name = "hybrid-ww", version)]
pub struct Args {
    /// TOML file with RunConfig fields; missing fields keep benchmark values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Variance-reduction mode [default: hww]: analog, lww, hww, hww_ma or hww_fourier.
    #[arg(long)]
    pub mode: Option<Mode>,
    /// Histories per time step [default: 10000].
    #[arg(long)]
    pub histories: Option<usize>,
    /// Master seed [default: 1].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Window width ratio ρ [default: 1.25].
    #[arg(long)]
    pub rho: Option<f64>,
    /// Smallest window center relative to the maximum [default: 1e-3].
    #[arg(long = "eps-min")]
    pub eps_min: Option<f64>,
    /// Window updates per step [default: 3].
    #[arg(long = "u-ww")]
    pub u_ww: Option<usize>,
    /// Comma-separated update fractions [default: 0.25,0.5,0.75].
    #[arg(long, value_delimiter = ',')]
    pub fractions: Option<Vec<f64>>,
    /// Time-discretization parameter θ in [1/2, 1] [default: 0.5].
    #[arg(long)]
    pub theta: Option<f64>,
    /// Filter on the low-order inputs of a hybrid mode; selects hww, hww_ma or hww_fourier.
    #[arg(long, value_enum)]
    pub filter: Option<FilterArg>,
    /// Moving-average base k [default: 3].
    #[arg(long = "ma-k")]
    pub ma_k: Option<usize>,
    /// Fourier low-pass cutoff [default: 30].
    #[arg(long = "fourier-cutoff")]
    pub fourier_cutoff: Option<usize>,
    /// Population the census bank is combed to [default: 10000].
    #[arg(long = "target-pop")]
    pub target_pop: Option<usize>,
    /// Statistical batches [default: 20].
    #[arg(long)]
    pub batches: Option<usize>,
    /// Census population control: `weight` (teeth on cumulative weight) or `particle` (teeth on particle index) [default: weight].
    #[arg(long, value_enum)]
    pub comb: Option<CombArg>,
    /// Reference flux: a CSV path, or `auto` to compute it (and save it in the output directory).
    #[arg(long)]
    pub reference: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Also write closures_<n>.csv with raw and filtered closures.
    #[arg(long)]
    pub closures: bool,
    /// Validate the configuration, print the resolved plan and exit.
    #[arg(long = "dry-run")]
    pub dry_run: bool,
}

fn merge(base: &mut toml::Value, over: toml::Value) {
    match (base, over) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_table() && v.is_table() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

/// Reads a config file over the benchmark defaults.
pub fn load_config_file(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse_config_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn parse_config_str(text: &str) -> Result<RunConfig, String> {
    let over: toml::Value = toml::from_str(text).map_err(|e| e.to_string())?;
    let mut base = toml::Value::try_from(RunConfig::benchmark()).map_err(|e| e.to_string())?;
    merge(&mut base, over);
    base.try_into().map_err(|e: toml::de::Error| e.to_string())
}

/// Resolves the config from defaults, the optional file and the flags.
pub fn resolve_config(args: &Args) -> Result<RunConfig, CliError> {
    let mut c = match &args.config {
        Some(p) => load_config_file(p)?,
        None => RunConfig::benchmark(),
    };
    if let Some(m) = args.mode {
        c.mode = m;
    }
    if let Some(f) = args.filter {
        if f != FilterArg::None && !c.mode.is_hybrid() {
            return Err(CliError::Config(format!("--filter requires a hybrid mode, got {}", c.mode)));
        }
        if c.mode.is_hybrid() {
            c.mode = match f {
                FilterArg::None => Mode::Hww,
                FilterArg::Ma => Mode::HwwMa,
                FilterArg::Fourier => Mode::HwwFourier,
            };
        }
    }
    if let Some(h) = args.histories {
        c.histories_per_step = h;
    }
    if let Some(s) = args.seed {
        c.seed = s;
    }
    if let Some(r) = args.rho {
        c.rho = r;
    }
    if let Some(e) = args.eps_min {
        c.eps_min = e;
    }
    if let Some(u) = args.u_ww {
        c.u_ww = u;
        if args.fractions.is_none() {
            c.update_fractions = (1..=u).map(|p| p as f64 / (u + 1) as f64).collect();
        }
    }
    if let Some(f) = &args.fractions {
        c.update_fractions = f.clone();
        if args.u_ww.is_none() {
            c.u_ww = f.len();
        }
    }
    if let Some(t) = args.theta {
        c.theta = t;
    }
    if let Some(k) = args.ma_k {
        c.ma_base = Some(k);
    }
    if let Some(k) = args.fourier_cutoff {
        c.fourier_cutoff = Some(k);
    }
    if let Some(t) = args.target_pop {
        c.target_population = t;
    }
    if let Some(b) = args.batches {
        c.batches = b;
    }
    if let Some(k) = args.comb {
        c.comb = match k {
            CombArg::Weight => CombKind::Weight,
            CombArg::Particle => CombKind::Particle,
        };
    }
    c.validate().map_err(|v| CliError::Config(v.join("; ")))?;
    Ok(c)
}

/// Human-readable summary of what a run would do.
pub fn plan(c: &RunConfig, args: &Args) -> String {
    let mut s = String::new();
    s += &format!("mode             {}\n", c.mode);
    s += &format!("filter           {:?}\n", c.filter_spec());
    s += &format!("mesh             [{}, {}] with {} cells\n", c.mesh.x_min, c.mesh.x_max, c.mesh.cells);
    s += &format!("time             t0 = {}, dt = {}, {} steps\n", c.time.t0, c.time.dt, c.time.steps);
    s += &format!("histories/step   {} in {} batches\n", c.histories_per_step, c.batches);
    s += &format!("comb             {:?} to {}\n", c.comb, c.target_population);
    s += &format!("theta            {}\n", c.theta);
    if c.mode.is_hybrid() || c.mode == Mode::Lww {
        s += &format!("windows          rho = {}, eps_min = {}\n", c.rho, c.eps_min);
    }
    if c.mode.is_hybrid() {
        let sched: Vec<String> = c
            .update_fractions
            .iter()
            .map(|f| ((f * c.histories_per_step as f64).ceil() as usize).to_string())
            .collect();
        s += &format!("updates          {} at histories {}\n", c.u_ww, sched.join(", "));
    }
    s += &format!("seed             {}\n", c.seed);
    s += &format!("reference        {}\n", args.reference.as_deref().unwrap_or("none"));
    s += &format!("output           {}\n", args.out.display());
    s
}

fn obtain_reference(spec: &str, c: &RunConfig, out: &Path) -> Result<ReferenceSolution, CliError> {
    if spec == "auto" {
        log::info!("computing the reference solution");
        let r = benchmark_reference(c, &ReferenceSettings::default()).map_err(|e| CliError::Runtime(e.to_string()))?;
        std::fs::create_dir_all(out).map_err(|e| CliError::Runtime(e.to_string()))?;
        save_reference(&out.join("reference.csv"), &r).map_err(|e| CliError::Runtime(e.to_string()))?;
        Ok(r)
    } else {
        load_reference(Path::new(spec), c.mesh.cells, c.time.steps).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Runs one CLI invocation.
pub fn execute(args: Args) -> Result<(), CliError> {
    let c = resolve_config(&args)?;
    if args.dry_run {
        print!("{}", plan(&c, &args));
        return Ok(());
    }
    let reference = match &args.reference {
        Some(spec) => Some(obtain_reference(spec, &c, &args.out)?),
        None => None,
    };
    let sim = Simulation::new(c).map_err(|e| CliError::Config(e.to_string()))?;
    let outcome = (|| {
        let mut out = OutputWriter::create(&args.out, args.closures)?;
        let rec = sim.run_with(reference.as_ref(), |s| out.write_step(s, &sim.mesh))?;
        out.finish(&rec)
    })();
    if let Err(e) = outcome {
        let _ = OutputWriter::mark_incomplete(&args.out, &e.to_string());
        return Err(CliError::Runtime(e.to_string()));
    }
    Ok(())
}
