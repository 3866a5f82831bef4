use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use translab::besov::{besov_norm, girardi_weis_report, mikhlin_norm, FrequencySearch, MultiplierSymbol};
use translab::scalar::cplx;
use translab::{GridFunction64, GridSpec64, Measure64, StripFunction64};
use translab_harness::builtins::{FunctionSpec, GroupSpec};
use translab_harness::calibration::{Calibration, CalibrationKey};
use translab_harness::config::parse_exponent;
use translab_harness::experiments::{calculus_bound_rows, pv_rows, transfer_rows};
use translab_harness::report::{aligned, num, summary_table, write_rows};
use translab_harness::suite::{calibrations, freeze_calibrations, run_suite, suite_configs, DEFAULT_CONFIG};
use translab_harness::{ConfigFile, ExperimentConfig, HarnessError, ReportRow};

#[derive(Parser)]
#[command(name = "translab", version, about = "Functional calculus experiments for C0-group generators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
struct Common {
    /// Configuration file (`key = value` lines, `[section]` headers).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid refinement level.
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u32).range(0..=1))]
    refine: u32,
    /// Also print an aligned table to standard output.
    #[arg(long)]
    summary: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Bounded,
    Unbounded,
}

#[derive(Subcommand)]
enum Command {
    /// Fourier transform of the configured measure on a frequency grid.
    Fourier {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10.0)]
        xi_max: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Discrete Besov norm of the configured function.
    BesovNorm {
        #[command(flatten)]
        common: Common,
    },
    /// Mikhlin-type norm of the Fourier transform of the configured measure.
    MikhlinNorm {
        #[command(flatten)]
        common: Common,
    },
    /// Blockwise dilation-optimised bound for the configured measure's multiplier.
    GwBound {
        #[command(flatten)]
        common: Common,
    },
    /// K-functional profile of a state of the configured group.
    Kfunctional {
        #[command(flatten)]
        common: Common,
    },
    /// Transference ratios for one group and measure.
    TransferCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Mode::Bounded)]
        mode: Mode,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        probes: Option<usize>,
        /// Calibration file; created with a fresh constant if missing.
        #[arg(long)]
        calibration: Option<PathBuf>,
    },
    /// `‖f(A)x‖_{θ,q}` against the strip norm of `f`.
    CalculusBound {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        calibration: Option<PathBuf>,
    },
    /// Principal-value partial integrals and their contraction.
    PvCheck {
        #[command(flatten)]
        common: Common,
    },
    /// Every acceptance experiment; exits nonzero if any row fails.
    ///
    /// Runs the default and the refined grid unless `--refine 1` is given.
    Suite {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        calibration: Option<PathBuf>,
    },
}

enum Output {
    Rows(Vec<ReportRow>),
    Table { header: Vec<&'static str>, rows: Vec<Vec<String>>, failed: bool },
}

impl Output {
    fn floats(header: &[&'static str], rows: Vec<Vec<f64>>) -> Self {
        Self::Table { header: header.to_vec(), rows: rows.into_iter().map(|r| r.into_iter().map(num).collect()).collect(), failed: false }
    }

    fn write_csv<W: Write>(&self, w: W) -> Result<(), HarnessError> {
        match self {
            Self::Rows(rows) => write_rows(w, rows),
            Self::Table { header, rows, .. } => {
                let mut out = csv::Writer::from_writer(w);
                out.write_record(header)?;
                for r in rows {
                    out.write_record(r)?;
                }
                out.flush()?;
                Ok(())
            }
        }
    }

    fn summary(&self) -> String {
        match self {
            Self::Rows(rows) => summary_table(rows),
            Self::Table { header, rows, .. } => aligned(header, rows),
        }
    }

    fn failed(&self) -> bool {
        match self {
            Self::Rows(rows) => rows.iter().any(|r| !r.pass),
            Self::Table { failed, .. } => *failed,
        }
    }
}

/// The section named `name` merged over the root keys, or the root alone.
fn command_config(common: &Common, name: &str) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let file = ConfigFile::load(path)?;
            let sec = match file.section(name) {
                Some(s) => translab_harness::suite::with_root_defaults(&file, s),
                None => file.root().clone(),
            };
            ExperimentConfig::for_command(&sec, name)?
        }
        None => ExperimentConfig::new(name),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    cfg.refine = common.refine;
    Ok(cfg)
}

fn grid(cfg: &ExperimentConfig, half_length: f64, samples: usize) -> Result<GridSpec64, HarnessError> {
    let g = cfg.grid_or(half_length, samples);
    Ok(GridSpec64::scalar(g.half_length, g.samples)?.refine(cfg.refine))
}

fn measure(cfg: &ExperimentConfig) -> Result<Measure64, HarnessError> {
    Ok(match &cfg.measure {
        Some(m) => m.build()?,
        None => Measure64::gaussian(1.0, 8.0, 1.0 / 64.0)?,
    })
}

fn strip_function(cfg: &ExperimentConfig) -> Result<StripFunction64, HarnessError> {
    Ok(cfg.function.clone().unwrap_or(FunctionSpec::Gauss).strip()?)
}

fn fourier(cfg: &ExperimentConfig, xi_max: f64, points: usize) -> Result<Output, HarnessError> {
    let mu = measure(cfg)?;
    let points = points.max(2);
    let mut rows = Vec::with_capacity(points);
    for i in 0..points {
        let xi = -xi_max + 2.0 * xi_max * i as f64 / (points - 1) as f64;
        let v = mu.fourier(cplx(xi, 0.0))?;
        rows.push(vec![xi, v.re, v.im, v.norm()]);
    }
    Ok(Output::floats(&["xi", "re", "im", "abs"], rows))
}

fn besov(cfg: &ExperimentConfig) -> Result<Output, HarnessError> {
    let spec = grid(cfg, 16.0, 256)?;
    let f = strip_function(cfg)?;
    let u = GridFunction64::from_scalar_fn(spec, |t| f.eval(cplx(t, 0.0)))?;
    let r = cfg.param("r", cfg.theta);
    let norm = besov_norm(&u, r, cfg.p, cfg.q);
    Ok(Output::Table {
        header: vec!["function", "r", "p", "q", "norm"],
        rows: vec![vec![f.name().to_owned(), num(r), label(cfg.p), label(cfg.q), num(norm)]],
        failed: false,
    })
}

fn label(p: translab::Exponent64) -> String {
    match p {
        translab::Exponent::Infinity => "inf".into(),
        translab::Exponent::Finite(v) => format!("{v}"),
    }
}

fn search(cfg: &ExperimentConfig) -> FrequencySearch<f64> {
    let base = FrequencySearch::default();
    FrequencySearch { max: cfg.param("xi_max", base.max), linear: base.linear << cfg.refine, log: base.log << cfg.refine }
}

fn mikhlin(cfg: &ExperimentConfig) -> Result<Output, HarnessError> {
    let mu = measure(cfg)?;
    let n = mikhlin_norm(&MultiplierSymbol::from_measure(&mu), &search(cfg))?;
    let sup = MultiplierSymbol::from_measure(&mu);
    let s = search(cfg);
    let peak = (0..s.linear).map(|i| -s.max + 2.0 * s.max * i as f64 / (s.linear - 1) as f64).map(|x| sup.value(x).norm()).fold(0.0, f64::max);
    Ok(Output::floats(&["mikhlin_norm", "sup_abs"], vec![vec![n, peak]]))
}

fn gw(cfg: &ExperimentConfig) -> Result<Output, HarnessError> {
    let mu = measure(cfg)?;
    let spec = grid(cfg, 16.0, 512)?;
    let r = girardi_weis_report(&MultiplierSymbol::from_measure(&mu), &spec);
    let rows = r.blocks.iter().map(|(k, log_a, v)| vec![*k as f64, *log_a, *v, r.bound]).collect();
    Ok(Output::floats(&["k", "log2_a", "block_norm", "bound"], rows))
}

fn kfunctional(cfg: &ExperimentConfig) -> Result<Output, HarnessError> {
    let spec = grid(cfg, 16.0, 256)?;
    let g = cfg.group.clone().unwrap_or(GroupSpec::Shift).build(spec, cfg.p)?;
    let x = match (&cfg.function, g.grid()) {
        (Some(spec_f), Some(s)) => {
            let f = spec_f.strip()?;
            GridFunction64::from_scalar_fn(*s, |t| f.eval(cplx(t, 0.0)))?.values().to_vec()
        }
        _ => g.random_state(&mut translab_harness::random::rng(cfg.seed, 2000)),
    };
    let couple = g.couple();
    let z = g.couple_coords(&x);
    let (nx, ny) = (couple.norm_x(&z), couple.norm_y(&z));
    let count = cfg.param("points", 41.0) as usize;
    let (lo, hi) = (cfg.param("t_min", 1e-4).log10(), cfg.param("t_max", 1e4).log10());
    let mut rows = Vec::with_capacity(count);
    for i in 0..count {
        let t = 10f64.powf(lo + (hi - lo) * i as f64 / (count.max(2) - 1) as f64);
        rows.push(vec![t, couple.k_functional(&z, t)?, nx.min(t * ny)]);
    }
    Ok(Output::floats(&["t", "K", "upper_bound_min_form"], rows))
}

fn transfer_key(cfg: &ExperimentConfig, mode: Mode) -> CalibrationKey {
    let g = cfg.grid_or(8.0, 128);
    CalibrationKey {
        experiment: "transfer-check".into(),
        theta: cfg.theta,
        q: label(cfg.q),
        p: label(cfg.p),
        grid: format!("{mode:?}/{}x{}", g.half_length, g.samples << cfg.refine).to_lowercase(),
    }
}

/// The stored constant, or twice the largest ratio over random calibration measures.
fn transfer_constant(cfg: &ExperimentConfig, mode: Mode, path: Option<&Path>) -> Result<f64, HarnessError> {
    let key = transfer_key(cfg, mode);
    let mut stored = match path {
        Some(p) if p.exists() => Calibration::load(p)?,
        _ => Calibration::default(),
    };
    if let Some(c) = stored.get(&key)? {
        return Ok(c);
    }
    let unbounded = matches!(mode, Mode::Unbounded);
    let mut worst = 0.0f64;
    for i in 0..cfg.param("calibration_measures", 5.0) as u64 {
        let mut c = cfg.clone();
        c.measure = None;
        c.seed = cfg.seed.wrapping_add(10_000 + i);
        worst = worst.max(transfer_rows(&c, unbounded, 1.0)?.1);
    }
    let c_cal = 2.0 * worst;
    if let Some(p) = path {
        stored.insert(key, c_cal);
        stored.save(p)?;
    }
    Ok(c_cal)
}

fn transfer(cfg: &ExperimentConfig, mode: Mode, calibration: Option<&Path>) -> Result<Output, HarnessError> {
    let c_cal = transfer_constant(cfg, mode, calibration)?;
    let (rows, _) = transfer_rows(cfg, matches!(mode, Mode::Unbounded), c_cal)?;
    let table = rows.iter().enumerate().map(|(i, r)| vec![i.to_string(), num(r.lhs), num(r.rhs), num(r.ratio)]).collect();
    let failed = rows.iter().any(|r| !r.pass);
    if failed {
        eprintln!("transfer-check: a probe exceeds C_cal·M² with C_cal = {c_cal:e}");
    }
    Ok(Output::Table { header: vec!["probe_id", "lhs", "rhs", "ratio"], rows: table, failed })
}

fn suite(common: &Common, calibration: Option<&Path>) -> Result<Output, HarnessError> {
    let file = match &common.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::parse(DEFAULT_CONFIG)?,
    };
    let base = suite_configs(&file)?;
    let levels: &[u32] = if common.refine == 0 { &[0, 1] } else { &[1] };
    let mut cfgs = Vec::new();
    for &level in levels {
        for c in &base {
            let mut c = c.clone();
            if let Some(s) = common.seed {
                c.seed = s;
            }
            c.refine = level;
            if calibration.is_some() {
                c.calibration = calibration.map(Path::to_path_buf);
            }
            cfgs.push(c);
        }
    }
    let summary = run_suite(&cfgs)?;
    if let Some(p) = calibration {
        freeze_calibrations(p, &calibrations(&cfgs, &summary))?;
    }
    Ok(Output::Rows(summary.rows))
}

fn run(command: Command) -> Result<(Output, Common), HarnessError> {
    Ok(match command {
        Command::Fourier { common, xi_max, points } => (fourier(&command_config(&common, "fourier")?, xi_max, points)?, common),
        Command::BesovNorm { common } => (besov(&command_config(&common, "besov-norm")?)?, common),
        Command::MikhlinNorm { common } => (mikhlin(&command_config(&common, "mikhlin-norm")?)?, common),
        Command::GwBound { common } => (gw(&command_config(&common, "gw-bound")?)?, common),
        Command::Kfunctional { common } => (kfunctional(&command_config(&common, "kfunctional")?)?, common),
        Command::TransferCheck { common, mode, theta, q, p, probes, calibration } => {
            let mut cfg = command_config(&common, "transfer-check")?;
            if let Some(t) = theta {
                if !(t > 0.0 && t < 1.0) {
                    return Err(HarnessError::from(format!("--theta {t} is outside (0, 1)")));
                }
                cfg.theta = t;
            }
            if let Some(q) = q {
                cfg.q = parse_exponent(&q)?;
            }
            if let Some(p) = p {
                cfg.p = parse_exponent(&p)?;
                if matches!(cfg.p, translab::Exponent::Infinity) {
                    return Err(HarnessError::from("--p must be finite".to_owned()));
                }
            }
            if probes.is_some() {
                cfg.probes = probes;
            }
            if calibration.is_some() {
                cfg.calibration = calibration;
            }
            let path = cfg.calibration.clone();
            (transfer(&cfg, mode, path.as_deref())?, common)
        }
        Command::CalculusBound { common, calibration } => {
            let mut cfg = command_config(&common, "calculus-bound")?;
            if calibration.is_some() {
                cfg.calibration = calibration;
            }
            (Output::Rows(calculus_bound_rows(&cfg)?), common)
        }
        Command::PvCheck { common } => (Output::Rows(pv_rows(&command_config(&common, "pv-check")?)?), common),
        Command::Suite { common, calibration } => (suite(&common, calibration.as_deref())?, common),
    })
}

fn emit(out: &Output, common: &Common) -> Result<(), HarnessError> {
    match &common.out {
        Some(path) => out.write_csv(File::create(path)?)?,
        None => out.write_csv(io::stdout().lock())?,
    }
    if common.summary {
        print!("{}", out.summary());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli.command).and_then(|(out, common)| emit(&out, &common).map(|()| out));
    match result {
        Ok(out) if out.failed() => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("translab: {e}");
            ExitCode::from(2)
        }
    }
}
