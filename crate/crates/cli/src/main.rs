use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use reeb_core::config::RunConfig;
use reeb_core::contact::ContactField;
use reeb_core::flow::export::{write_csv, write_jsonl};
use reeb_core::flow::{
    classify_orbit, hyperplane_sweep, integrate, rotation_number, scan_periodic, ClassifyConfig, Direction,
    Dopri5Options, ScanConfig, SweepConfig,
};
use reeb_core::point::{torus_distance, Point};
use reeb_core::sampling::BoxRegion;
use reeb_core::verify::{run_audit, AuditConfig};

/// Command-line laboratory for a contact form with an invariant torus, trapped
/// Reeb orbits, and no periodic orbits.
#[derive(Parser, Debug)]
#[command(name = "reeb", version)]
struct Cli {
    /// JSON run configuration; flags below override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for parallel subcommands.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of planar pairs (dimension 2n+1).
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Torus tube radius.
    #[arg(long, global = true)]
    tube: Option<f64>,
    /// Write output here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct PointArg {
    /// Cartesian point x1,y1,...,xn,yn,z.
    #[arg(short = 'p', long = "start", visible_alias = "point", allow_hyphen_values = true, conflicts_with = "polar")]
    start: Option<String>,
    /// Polar point r1,th1,...,rn,thn,z.
    #[arg(long, allow_hyphen_values = true)]
    polar: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Profile, Hamiltonian, Reeb, dz(X), gradient and reduction audits.
    Verify {
        /// Reduced sample counts.
        #[arg(long)]
        quick: bool,
    },
    /// Print H, X, dz(X) and the Reeb residuals at a point.
    Field {
        #[command(flatten)]
        at: PointArg,
    },
    /// Integrate an orbit and print the trajectory.
    Orbit {
        #[command(flatten)]
        at: PointArg,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        backward: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Classify the orbit through a point.
    Classify {
        #[command(flatten)]
        at: PointArg,
        #[arg(long, default_value_t = 500.0)]
        horizon: f64,
    },
    /// Rotation number of the linear flow on the torus.
    Rotation {
        #[arg(long)]
        revs: u64,
        /// Start on the torus; defaults to (1,0,...,1,0,0).
        #[command(flatten)]
        at: PointArg,
    },
    /// Search a box for returning orbits.
    ScanPeriodic {
        /// Half-width of the scanned cube.
        #[arg(long = "box")]
        half_width: Option<f64>,
        #[arg(long, default_value_t = 200.0)]
        horizon: f64,
        /// Grid points per axis.
        #[arg(long, default_value_t = 4)]
        grid: usize,
        /// Extra low-discrepancy starts near the torus.
        #[arg(long, default_value_t = 1000)]
        focus: usize,
        #[arg(long, default_value_t = 1e-4)]
        return_tol: f64,
        #[arg(long, default_value_t = 0.5)]
        t_min: f64,
    },
    /// Times to reach z > 0 from the hyperplane z = -z0.
    SweepHyperplane {
        #[arg(long, default_value_t = 3.0)]
        z0: f64,
        #[arg(long, default_value_t = 1.0)]
        rho_min: f64,
        #[arg(long, default_value_t = 3.0)]
        rho_max: f64,
        #[arg(long, default_value_t = 21)]
        steps: usize,
        #[arg(long, default_value_t = 1000.0)]
        horizon: f64,
    },
    /// Whitespace columns t, z, r_j, distance to the torus.
    Plotdata {
        #[command(flatten)]
        at: PointArg,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        backward: bool,
    },
}

/// Bad flags, config or paths: exit status 2.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| s.parse::<f64>().map_err(|_| usage(format!("not a number: {s:?} in {text:?}"))))
        .collect()
}

fn parse_point(at: &PointArg, n: usize, default: Option<Point>) -> Result<Point> {
    let dim = 2 * n + 1;
    let coords = match (&at.start, &at.polar) {
        (Some(s), _) => parse_list(s)?,
        (None, Some(s)) => {
            let v = parse_list(s)?;
            if v.len() != dim {
                return Err(usage(format!("polar point needs {dim} values, got {}", v.len())));
            }
            let radii: Vec<f64> = (0..n).map(|j| v[2 * j]).collect();
            let angles: Vec<f64> = (0..n).map(|j| v[2 * j + 1]).collect();
            Point::from_polar(&radii, &angles, v[dim - 1]).into_vec()
        }
        (None, None) => match default {
            Some(p) => return Ok(p),
            None => return Err(usage("a point is required (-p/--start or --polar)")),
        },
    };
    if coords.len() != dim {
        return Err(usage(format!("point needs {dim} values, got {}", coords.len())));
    }
    if coords.iter().any(|v| !v.is_finite()) {
        return Err(usage("point coordinates must be finite"));
    }
    Ok(Point::new(coords))
}

fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(|e| usage(e.to_string()))?,
        None => RunConfig::default(),
    };
    if let Some(v) = cli.tol {
        cfg.tol = v;
    }
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = cli.n {
        cfg.n = v;
    }
    if let Some(v) = cli.tube {
        cfg.tube = v;
    }
    if let Some(v) = cli.jobs {
        cfg.jobs = Some(v);
    }
    if let Some(p) = &cli.output {
        cfg.output = Some(p.display().to_string());
    }
    if let Command::ScanPeriodic { half_width: Some(w), .. } = cli.command {
        cfg.box_half_width = w;
    }
    if let Command::Verify { quick: true } = cli.command {
        cfg.audit = quick_audit();
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn quick_audit() -> AuditConfig {
    AuditConfig {
        h_samples: 2000,
        reeb_samples: 5000,
        starts: 200,
        fd_points: 200,
        reduction_pairs: 6,
        reduction_t_span: 20.0,
        ..AuditConfig::default()
    }
}

fn opts(cfg: &RunConfig) -> Dopri5Options {
    Dopri5Options {
        tol: cfg.tol,
        h_max: cfg.h_max,
        ..Dopri5Options::default()
    }
}

fn open_output(cfg: &RunConfig) -> Result<Box<dyn Write>> {
    Ok(match &cfg.output {
        Some(path) => {
            let f = File::create(path).map_err(|e| usage(format!("cannot write {path}: {e}")))?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_json(cfg: &RunConfig, key: &str, value: Value) -> Result<()> {
    let mut out = open_output(cfg)?;
    let mut doc = serde_json::Map::new();
    doc.insert("config".into(), cfg.to_value());
    doc.insert(key.into(), value);
    serde_json::to_writer_pretty(&mut out, &Value::Object(doc))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Returns whether the run counts as passed (only `verify` can fail).
fn execute(cli: &Cli, cfg: &RunConfig) -> Result<bool> {
    let stack = cfg.hamiltonian().map_err(|e| usage(e.to_string()))?;
    let n = cfg.n;
    match &cli.command {
        Command::Verify { .. } => {
            let report = run_audit(&stack, &cfg.audit, cfg.seed)?;
            emit_json(cfg, "report", serde_json::to_value(&report)?)?;
            eprintln!("verify: {}", if report.passed { "passed" } else { "FAILED" });
            Ok(report.passed)
        }
        Command::Field { at } => {
            let p = parse_point(at, n, None)?;
            let sample = ContactField::new(stack).x_field(&p);
            emit_json(cfg, "field", serde_json::to_value(&sample)?)?;
            Ok(true)
        }
        Command::Orbit { at, t, backward, format } => {
            let p = parse_point(at, n, None)?;
            let traj = integrate(&ContactField::new(stack), p.as_slice(), check_span(*t)?, direction(*backward), &opts(cfg))?;
            let mut out = open_output(cfg)?;
            let header = cfg.to_value();
            match format {
                Format::Csv => write_csv(&traj, Some(&header), &mut out)?,
                Format::Jsonl => write_jsonl(&traj, Some(&header), &mut out)?,
            }
            out.flush()?;
            Ok(true)
        }
        Command::Classify { at, horizon } => {
            let p = parse_point(at, n, None)?;
            if !(*horizon > 0.0) {
                return Err(usage("horizon must be positive"));
            }
            let k = stack.constants();
            let ccfg = ClassifyConfig {
                horizon: *horizon,
                eps_t: cfg.tube,
                opts: opts(cfg),
                ..ClassifyConfig::new(n, k.r_star(), k.z_full)
            };
            let verdict = classify_orbit(&ContactField::new(stack.clone()), p.as_slice(), &ccfg)?;
            emit_json(cfg, "verdict", serde_json::to_value(&verdict)?)?;
            Ok(true)
        }
        Command::Rotation { revs, at } => {
            if n < 2 {
                return Err(usage("rotation needs n >= 2"));
            }
            let default = Point::from_polar(&vec![1.0; n], &vec![0.0; n], 0.0);
            let p = parse_point(at, n, Some(default))?;
            let est = rotation_number(&ContactField::new(stack.clone()), p.as_slice(), *revs, cfg.tube, &opts(cfg))?;
            emit_json(
                cfg,
                "rotation",
                json!({ "estimate": est, "s": stack.constants().s, "error": (est.rho - stack.constants().s).abs() }),
            )?;
            Ok(true)
        }
        Command::ScanPeriodic {
            horizon,
            grid,
            focus,
            return_tol,
            t_min,
            ..
        } => {
            if *grid == 0 || !(*horizon > 0.0) || !(*return_tol > 0.0) {
                return Err(usage("grid, horizon and return-tol must be positive"));
            }
            let scfg = ScanConfig {
                region: BoxRegion::cube(2 * n + 1, cfg.box_half_width),
                per_axis: *grid,
                horizon: *horizon,
                return_tol: *return_tol,
                t_min: *t_min,
                tube: cfg.tube,
                focus_starts: *focus,
                seed: cfg.seed,
                opts: opts(cfg),
                ..ScanConfig::new(n)
            };
            let report = scan_periodic(&ContactField::new(stack), &scfg);
            emit_json(cfg, "scan", json!({ "passed": report.passed(), "report": report }))?;
            Ok(true)
        }
        Command::SweepHyperplane {
            z0,
            rho_min,
            rho_max,
            steps,
            horizon,
        } => {
            if !(*rho_min >= 0.0 && rho_max >= rho_min) || *steps == 0 || !(*horizon > 0.0) {
                return Err(usage("need 0 <= rho-min <= rho-max, steps >= 1, horizon > 0"));
            }
            if *z0 <= stack.constants().z_full {
                return Err(usage(format!("z0 must exceed z_full = {}", stack.constants().z_full)));
            }
            let mut scfg = SweepConfig::linear(*z0, *rho_min, *rho_max, *steps, *horizon);
            scfg.opts = opts(cfg);
            let report = hyperplane_sweep(&ContactField::new(stack), &scfg);
            emit_json(cfg, "sweep", serde_json::to_value(&report)?)?;
            Ok(true)
        }
        Command::Plotdata { at, t, backward } => {
            let p = parse_point(at, n, None)?;
            let traj = integrate(&ContactField::new(stack), p.as_slice(), check_span(*t)?, direction(*backward), &opts(cfg))?;
            let mut out = open_output(cfg)?;
            writeln!(out, "{}", cfg.header_line())?;
            let radii: Vec<String> = (1..=n).map(|j| format!("r{j}")).collect();
            writeln!(out, "# t z {} dist_T", radii.join(" "))?;
            for (i, s) in traj.samples.iter().enumerate() {
                write!(out, "{} {}", s.t, s.state[2 * n])?;
                for r in traj.radii(i) {
                    write!(out, " {r}")?;
                }
                writeln!(out, " {}", torus_distance(&s.state))?;
            }
            out.flush()?;
            Ok(true)
        }
    }
}

fn check_span(t: f64) -> Result<f64> {
    if t.is_finite() && t >= 0.0 {
        Ok(t)
    } else {
        Err(usage(format!("--t must be finite and >= 0, got {t}")))
    }
}

fn direction(backward: bool) -> Direction {
    if backward {
        Direction::Backward
    } else {
        Direction::Forward
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let cfg = resolve_config(cli)?;
    match cfg.jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .context("building worker pool")?;
            pool.install(|| execute(cli, &cfg))
        }
        None => execute(cli, &cfg),
    }
}

fn one_line(text: &str) -> String {
    text.lines().map(str::trim).filter(|l| !l.is_empty()).collect::<Vec<_>>().join("; ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("{}", first.trim());
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", one_line(&format!("{e:#}")));
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
