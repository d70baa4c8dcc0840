//! Command-line front end: parameter checks, constants, ratio experiments,
//! many-body reports, and the verification suite, with per-run output
//! directories.

use clap::{Args, Parser, Subcommand};
use cslab::constants::{constants_table, hardy_constant, table_to_csv, ConstError};
use cslab::inequality::{
    counterexample_scan, estimate_best_constant, gn_ratio, hardy_remainder_report, Family,
    IneqError,
};
use cslab::manybody::{
    fdl_reconstruct, hlt_report, hoffman_ostenhof_report, lieb_oxford_report, one_body_density,
    WavefunctionN,
};
use cslab::params::{check_gn_admissible, parse_rat, rat, rat_i, ParamSet};
use cslab::profiles::{load_grid, RadialShape, TrialFunction};
use cslab::quad::QuadratureSpec;
use cslab::suite::{suite_summary, SuiteDepth};
use serde::Serialize;
use serde_json::json;
use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

const VERSION: &str = env!("CARGO_PKG_VERSION");
const OUTPUT_ROOT_ENV: &str = "CSLAB_OUTPUT_ROOT";

/// Exit codes: 0 pass, 2 domain/admissibility rejection, 1 operational error.
#[derive(Parser)]
#[command(name = "cslab", version, about = "Interpolation-inequality laboratory")]
struct Cli {
    /// Flat key = value config file ([section] headers prefix the keys).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output root for run directories (default: $CSLAB_OUTPUT_ROOT or ./runs).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ParamArgs {
    #[arg(long)]
    d: u32,
    /// Rational or decimal string, e.g. 1/2.
    #[arg(long)]
    s: String,
    #[arg(long)]
    p: String,
    #[arg(long)]
    q: String,
    #[arg(long)]
    alpha: String,
    #[arg(long)]
    gamma: String,
}

/// Parameter flags that may be replaced wholesale by a preset.
#[derive(Args, Clone)]
struct OptParamArgs {
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
}

impl OptParamArgs {
    fn require(&self) -> Option<ParamArgs> {
        Some(ParamArgs {
            d: self.d?,
            s: self.s.clone()?,
            p: self.p.clone()?,
            q: self.q.clone()?,
            alpha: self.alpha.clone()?,
            gamma: self.gamma.clone()?,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Admissibility check for a parameter set (exit 2 if inadmissible).
    CheckParams(ParamArgs),
    /// Inverse-power constant for (d, s, p).
    HardyConst {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        s: String,
        #[arg(long)]
        p: String,
    },
    /// Export the constants reference table as CSV.
    ConstantsTable,
    /// Empirical ratio of one trial function under a parameter set.
    Evaluate {
        #[command(flatten)]
        params: ParamArgs,
        /// Trial function: JSON descriptor file, or inline JSON.
        #[arg(long)]
        trial: String,
    },
    /// Lower-bound search for the best constant over a trial family.
    EstimateConstant {
        #[command(flatten)]
        params: ParamArgs,
        /// Family: "dilations" or "mixture".
        #[arg(long, default_value = "dilations")]
        family: String,
        /// Mixture component count.
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 400)]
        budget: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Bump-train growth scan (accepts inadmissible parameters).
    Counterexample {
        /// Preset name ("inadmissible-d3") or omit to pass parameters.
        #[arg(long)]
        preset: Option<String>,
        #[command(flatten)]
        params: OptParamArgs,
        /// Comma-separated bump counts.
        #[arg(long, default_value = "2,4,8,16,32")]
        m: String,
    },
    /// Hardy-subtracted remainder report for a radial trial function.
    HardyRemainder {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        s: String,
        #[arg(long)]
        p: String,
        /// Radial shape as inline JSON or a file path.
        #[arg(long)]
        trial: String,
    },
    /// Small-N many-body reports.
    Manybody {
        #[command(subcommand)]
        op: ManybodyOp,
    },
    /// Run the verification battery (exit 0 iff every criterion passes).
    Verify {
        #[arg(long, default_value = "quick")]
        suite: String,
    },
}

#[derive(Args, Clone)]
struct StateArgs {
    /// Preset name ("product-bump-d1") or omit to load a grid state.
    #[arg(long)]
    preset: Option<String>,
    /// Binary grid file holding an N-particle state (axis count = N).
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    n_particles: usize,
    #[arg(long, default_value = "2")]
    p: String,
}

#[derive(Subcommand)]
enum ManybodyOp {
    /// One-body density of the state.
    Density {
        #[command(flatten)]
        state: StateArgs,
    },
    /// Density seminorm vs slot-summed seminorm comparison.
    HoffmanOstenhof {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        s: String,
    },
    /// Exchange lower bound report.
    LiebOxford {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        gamma: String,
    },
    /// Many-body Hardy energy report.
    Hlt {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        s: String,
    },
    /// Reconstruct the inverse-power kernel from the ball-overlap formula.
    Fdl {
        #[arg(long, value_delimiter = ',')]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        y: Vec<f64>,
        #[arg(long)]
        gamma: f64,
    },
}

// ---------------------------------------------------------------------------
// Run persistence
// ---------------------------------------------------------------------------

struct Run {
    dir: PathBuf,
    config: BTreeMap<String, String>,
    argv: Vec<String>,
    started: Instant,
    csv_files: Vec<String>,
}

impl Run {
    fn start(out: &Option<PathBuf>, config_path: &Option<PathBuf>) -> Result<Self, String> {
        let config = match config_path {
            Some(p) => parse_config(p)?,
            None => BTreeMap::new(),
        };
        let argv: Vec<String> = std::env::args().collect();
        let root = out.clone().unwrap_or_else(|| {
            std::env::var(OUTPUT_ROOT_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|_| PathBuf::from("runs"))
        });
        let stamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let mut h = DefaultHasher::new();
        argv.hash(&mut h);
        for (k, v) in &config {
            k.hash(&mut h);
            v.hash(&mut h);
        }
        let dir = root.join(format!("{stamp}-{:08x}", h.finish() as u32));
        std::fs::create_dir_all(&dir).map_err(|e| format!("cannot create {dir:?}: {e}"))?;
        Ok(Run {
            dir,
            config,
            argv,
            started: Instant::now(),
            csv_files: Vec::new(),
        })
    }

    fn quad_spec(&self) -> QuadratureSpec {
        let mut spec = QuadratureSpec::default();
        if let Some(v) = self.config.get("quad.radial_nodes") {
            if let Ok(n) = v.parse() {
                spec.radial_nodes = n;
            }
        }
        if let Some(v) = self.config.get("quad.mc_samples") {
            if let Ok(n) = v.parse() {
                spec.mc_samples = n;
            }
        }
        if let Some(v) = self.config.get("quad.seed") {
            if let Ok(n) = v.parse() {
                spec.seed = n;
            }
        }
        spec
    }

    fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), String> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| e.to_string())?;
        w.write_record(header).map_err(|e| e.to_string())?;
        for row in rows {
            w.write_record(row).map_err(|e| e.to_string())?;
        }
        w.flush().map_err(|e| e.to_string())?;
        self.csv_files.push(name.to_string());
        Ok(())
    }

    fn finish<T: Serialize>(mut self, output: &T) -> Result<(), String> {
        let record = json!({
            "tool_version": VERSION,
            "run_dir": self.dir.to_string_lossy(),
            "argv": self.argv,
            "config": self.config,
            "csv_files": self.csv_files,
            "wall_seconds": self.started.elapsed().as_secs_f64(),
            "output": output,
        });
        let text = serde_json::to_string_pretty(&record).map_err(|e| e.to_string())?;
        std::fs::write(self.dir.join("report.json"), &text).map_err(|e| e.to_string())?;
        println!("{text}");
        self.csv_files.clear();
        Ok(())
    }
}

fn parse_config(path: &PathBuf) -> Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("config {path:?}: {e}"))?;
    let mut map = BTreeMap::new();
    let mut section = String::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            section = line[1..line.len() - 1].trim().to_string();
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line without '=': {line}"))?;
        let key = if section.is_empty() {
            k.trim().to_string()
        } else {
            format!("{section}.{}", k.trim())
        };
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

// ---------------------------------------------------------------------------
// Command handlers
// ---------------------------------------------------------------------------

/// Domain rejections exit 2; everything else operational (exit 1).
enum CmdError {
    Domain(String),
    Op(String),
}

impl From<String> for CmdError {
    fn from(s: String) -> Self {
        CmdError::Op(s)
    }
}

impl From<IneqError> for CmdError {
    fn from(e: IneqError) -> Self {
        match e {
            IneqError::Inadmissible | IneqError::DomainMismatch(_) => CmdError::Domain(e.to_string()),
            other => CmdError::Op(other.to_string()),
        }
    }
}

impl From<ConstError> for CmdError {
    fn from(e: ConstError) -> Self {
        CmdError::Domain(e.to_string())
    }
}

fn build_params(a: &ParamArgs) -> Result<ParamSet, CmdError> {
    let parse = |name: &str, v: &str| {
        parse_rat(v).map_err(|e| CmdError::Op(format!("--{name} {v}: {e}")))
    };
    ParamSet::from_scaling(
        a.d,
        parse("s", &a.s)?,
        parse("p", &a.p)?,
        parse("q", &a.q)?,
        parse("alpha", &a.alpha)?,
        parse("gamma", &a.gamma)?,
    )
    .map_err(|e| CmdError::Domain(e.to_string()))
}

fn parse_trial(text: &str) -> Result<TrialFunction, CmdError> {
    let body = if std::path::Path::new(text).exists() {
        std::fs::read_to_string(text).map_err(|e| CmdError::Op(e.to_string()))?
    } else {
        text.to_string()
    };
    serde_json::from_str(&body).map_err(|e| CmdError::Op(format!("trial descriptor: {e}")))
}

fn parse_shape(text: &str) -> Result<RadialShape, CmdError> {
    let body = if std::path::Path::new(text).exists() {
        std::fs::read_to_string(text).map_err(|e| CmdError::Op(e.to_string()))?
    } else {
        text.to_string()
    };
    serde_json::from_str(&body).map_err(|e| CmdError::Op(format!("shape descriptor: {e}")))
}

fn parse_f64(name: &str, v: &str) -> Result<f64, CmdError> {
    parse_rat(v)
        .map(|r| cslab::params::rat_f64(&r))
        .map_err(|e| CmdError::Op(format!("--{name} {v}: {e}")))
}

fn build_state(a: &StateArgs, spec: &QuadratureSpec) -> Result<WavefunctionN, CmdError> {
    let p = parse_f64("p", &a.p)?;
    match (&a.preset, &a.grid) {
        (Some(name), _) if name == "product-bump-d1" => WavefunctionN::product(
            RadialShape::AnnulusBump { r0: 0.5, r1: 2.0 },
            1,
            a.n_particles,
            p,
            spec,
        )
        .map_err(|e| CmdError::Domain(e.to_string())),
        (Some(name), _) => Err(CmdError::Op(format!("unknown preset {name}"))),
        (None, Some(path)) => {
            let grid = load_grid(path).map_err(|e| CmdError::Op(e.to_string()))?;
            WavefunctionN::from_grid(grid, p).map_err(|e| CmdError::Domain(e.to_string()))
        }
        (None, None) => Err(CmdError::Op("need --preset or --grid".into())),
    }
}

fn run_command(cli: &Cli) -> Result<ExitCode, CmdError> {
    let mut run = Run::start(&cli.out, &cli.config).map_err(CmdError::Op)?;
    let spec = run.quad_spec();
    match &cli.command {
        Command::CheckParams(args) => {
            let ps = build_params(args)?;
            let report = check_gn_admissible(&ps);
            let admissible = report.admissible;
            run.finish(&report)?;
            Ok(if admissible {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::HardyConst { d, s, p } => {
            let h = hardy_constant(*d, parse_f64("s", s)?, parse_f64("p", p)?)?;
            run.finish(&h)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ConstantsTable => {
            let rows = constants_table();
            let csv_text = table_to_csv(&rows);
            std::fs::write(run.dir.join("constants.csv"), &csv_text)
                .map_err(|e| CmdError::Op(e.to_string()))?;
            run.csv_files.push("constants.csv".into());
            run.finish(&rows)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Evaluate { params, trial } => {
            let ps = build_params(params)?;
            let g = parse_trial(trial)?;
            let report = gn_ratio(&g, &ps, &spec)?;
            run.finish(&report)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::EstimateConstant {
            params,
            family,
            k,
            budget,
            seed,
        } => {
            let ps = build_params(params)?;
            let fam = match family.as_str() {
                "dilations" => Family::Dilations {
                    base: RadialShape::Gaussian { sigma: 1.0 },
                    lo: -4.0,
                    hi: 4.0,
                },
                "mixture" => Family::Mixture {
                    k: *k,
                    amp: (0.05, 2.0),
                    center: (0.0, 4.0),
                    width: (0.1, 2.0),
                },
                other => return Err(CmdError::Op(format!("unknown family {other}"))),
            };
            let mut search_spec = spec;
            if let Some(s) = seed {
                search_spec.seed = *s;
            }
            let result = estimate_best_constant(&ps, &fam, *budget, &search_spec)?;
            let rows: Vec<Vec<String>> = result
                .trace
                .iter()
                .map(|e| {
                    vec![
                        e.index.to_string(),
                        format!("{:.12e}", e.ratio),
                        e.theta.iter().map(|t| format!("{t:.6}")).collect::<Vec<_>>().join(";"),
                    ]
                })
                .collect();
            run.write_csv("trace.csv", &["index", "ratio", "theta"], &rows)?;
            run.finish(&result)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Counterexample { preset, params, m } => {
            let ps = match (preset.as_deref(), params) {
                (Some("inadmissible-d3"), _) => ParamSet::from_scaling(
                    3,
                    rat_i(1),
                    rat_i(2),
                    rat_i(2),
                    rat_i(2),
                    rat(27, 10),
                )
                .map_err(|e| CmdError::Op(e.to_string()))?,
                (Some(other), _) => return Err(CmdError::Op(format!("unknown preset {other}"))),
                (None, opt) => match opt.require() {
                    Some(a) => build_params(&a)?,
                    None => return Err(CmdError::Op("need --preset or all parameter flags".into())),
                },
            };
            let m_list: Vec<usize> = m
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| CmdError::Op(format!("bad m value {t}"))))
                .collect::<Result<_, _>>()?;
            let scan = counterexample_scan(&ps, &m_list, &spec)?;
            let rows: Vec<Vec<String>> = scan
                .m_values
                .iter()
                .zip(scan.ratios.iter().zip(&scan.ratio_gamma))
                .map(|(m, (r, rg))| vec![m.to_string(), format!("{r:.12e}"), format!("{rg:.12e}")])
                .collect();
            run.write_csv("scan.csv", &["m", "ratio", "ratio_gamma"], &rows)?;
            run.finish(&scan)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::HardyRemainder { d, s, p, trial } => {
            let shape = parse_shape(trial)?;
            let report =
                hardy_remainder_report(&shape, *d, parse_f64("s", s)?, parse_f64("p", p)?, &spec)?;
            run.finish(&report)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Manybody { op } => {
            match op {
                ManybodyOp::Density { state } => {
                    let psi = build_state(state, &spec)?;
                    let rho = one_body_density(&psi, &spec).map_err(|e| CmdError::Op(e.to_string()))?;
                    let rows: Vec<Vec<String>> = rho
                        .grid
                        .values
                        .iter()
                        .enumerate()
                        .map(|(i, v)| {
                            let x = rho.grid.origin[0] + (i as f64 + 0.5) * rho.grid.h;
                            vec![format!("{x:.8}"), format!("{v:.12e}")]
                        })
                        .collect();
                    run.write_csv("density.csv", &["x", "rho"], &rows)?;
                    run.finish(&rho)?;
                }
                ManybodyOp::HoffmanOstenhof { state, s } => {
                    let psi = build_state(state, &spec)?;
                    let p = parse_f64("p", &state.p)?;
                    let rep = hoffman_ostenhof_report(&psi, parse_f64("s", s)?, p, 0.0, 0.0, &spec)
                        .map_err(|e| CmdError::Op(e.to_string()))?;
                    run.finish(&rep)?;
                }
                ManybodyOp::LiebOxford { state, gamma } => {
                    let psi = build_state(state, &spec)?;
                    let rep = lieb_oxford_report(&psi, parse_f64("gamma", gamma)?, &spec)
                        .map_err(|e| CmdError::Domain(e.to_string()))?;
                    run.finish(&rep)?;
                }
                ManybodyOp::Hlt { state, s } => {
                    let psi = build_state(state, &spec)?;
                    let p = parse_f64("p", &state.p)?;
                    let rep = hlt_report(&psi, parse_f64("s", s)?, p, &spec)
                        .map_err(|e| CmdError::Op(e.to_string()))?;
                    run.finish(&rep)?;
                }
                ManybodyOp::Fdl { x, y, gamma } => {
                    if x.len() != y.len() || x.is_empty() || x.len() > 3 {
                        return Err(CmdError::Op("x and y must share a dimension in 1..=3".into()));
                    }
                    let rep = fdl_reconstruct(x, y, x.len() as u32, *gamma)
                        .map_err(|e| CmdError::Domain(e.to_string()))?;
                    run.finish(&rep)?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite } => {
            let depth = match suite.as_str() {
                "quick" => SuiteDepth::Quick,
                "full" => SuiteDepth::Full,
                other => return Err(CmdError::Op(format!("unknown suite {other}"))),
            };
            let (results, summary) = suite_summary(depth);
            let mut all = results;
            all.push(summary);
            for r in &all {
                eprintln!(
                    "[{}] criterion {:2}: {} ({:.1}s) - {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.id,
                    r.name,
                    r.seconds,
                    r.detail
                );
            }
            let rows: Vec<Vec<String>> = all
                .iter()
                .map(|r| {
                    vec![
                        r.id.to_string(),
                        r.name.to_string(),
                        r.passed.to_string(),
                        format!("{:.2}", r.seconds),
                    ]
                })
                .collect();
            run.write_csv("criteria.csv", &["id", "name", "passed", "seconds"], &rows)?;
            let all_passed = all.iter().all(|r| r.passed);
            run.finish(&all)?;
            Ok(if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_command(&cli) {
        Ok(code) => code,
        Err(CmdError::Domain(msg)) => {
            eprintln!("rejected: {msg}");
            ExitCode::from(2)
        }
        Err(CmdError::Op(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
