use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use genus2::config::CONFIG_ENV;
use genus2::export::{fmt17, to_json_string, write_csv_table};
use genus2::lagr::{intersect_heegaard, SolverOptions};
use genus2::pillow::{self, corner_seed, flow_alpha, StepControl};
use genus2::{cover, sample, suite, Error, RunConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "genus2",
    version,
    about = "Character variety numerics for the genus-two surface"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Seed for the random generator.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Flat key=value config file (default: $GENUS2_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV and JSON files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override a tolerance or setting, e.g. --tol margin_min=1e-5.
    #[arg(long = "tol", value_name = "KEY=VAL", global = true)]
    tol: Vec<String>,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a verification suite: quat, repvar, pillow, cover, lagr, cp3 or all.
    Verify { suite: String },
    /// Integrate flow lines of k from the zero level to the boundary.
    Flow {
        #[arg(long, default_value_t = 10)]
        lines: usize,
        /// Start the first four lines at the corner-directed seeds.
        #[arg(long)]
        corners: bool,
    },
    /// Fiber of the branched cover over a unit vector of R^6.
    Fiber {
        #[arg(num_args = 6, allow_hyphen_values = true, required = true)]
        v: Vec<f64>,
    },
    /// Intersect the two Heegaard Lagrangians.
    Intersect {
        #[arg(long, default_value_t = 0.05, allow_hyphen_values = true)]
        eps: f64,
        /// Seed grid per axis.
        #[arg(long, default_value_t = 16)]
        grid: usize,
    },
    /// Sample a locus: level-set-kappa, psi-image, abelian-locus, cp3-level.
    Sample {
        target: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        level: f64,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
    /// Critical points of k on [-1,1]^3.
    CriticalPoints {
        #[arg(long, default_value_t = 12)]
        grid_n: usize,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Parse(_) | Error::Precondition(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn load_config(c: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::default();
    let path = c
        .config
        .clone()
        .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    if let Some(p) = path {
        cfg.apply_file(&p)?;
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(o) = &c.out {
        cfg.output_dir = o.clone();
    }
    for t in &c.tol {
        cfg.apply_pair(t)?;
    }
    Ok(cfg)
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<(), Failure> {
    println!("{}", to_json_string(v)?);
    Ok(())
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let cfg = load_config(&cli.common)?;
    let json = cli.common.json;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match cli.cmd {
        Cmd::Verify { suite: name } => {
            let report = suite::run(&name, &cfg)?;
            if json {
                print_json(&report)?;
            } else {
                print!("{}", report.render());
            }
            Ok(report.passed())
        }
        Cmd::Flow { lines, corners } => {
            if lines == 0 {
                return Err(Failure::Usage("--lines must be at least 1".into()));
            }
            let ctrl = StepControl {
                r_corner: cfg.tolerances.r_corner,
                tau_flow: cfg.tolerances.tau_flow,
                ..StepControl::default()
            };
            let dir = cfg.output_dir.join("flow");
            let mut rows = Vec::new();
            let mut corner_hits = 0;
            let mut ok = true;
            for n in 0..lines {
                let p0 = if corners && n < 4 {
                    corner_seed(n)
                } else {
                    pillow::random_level_zero_point(&mut rng)?
                };
                let line = flow_alpha(p0, 1.0, &ctrl)?;
                let path = dir.join(format!("line_{n:04}.csv"));
                let file = std::fs::File::create(&path)
                    .or_else(|_| {
                        std::fs::create_dir_all(&dir)?;
                        std::fs::File::create(&path)
                    })
                    .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
                line.write_csv(std::io::BufWriter::new(file))?;
                let defect = line.level_defect();
                ok &= defect < cfg.tolerances.tau_flow;
                if line.terminal_flag == pillow::TerminalFlag::Corner {
                    corner_hits += 1;
                }
                rows.push(vec![
                    n.to_string(),
                    fmt17(p0.x),
                    fmt17(p0.y),
                    fmt17(p0.z),
                    line.terminal_flag.as_str().to_string(),
                    line.exit_gradient.map(fmt17).unwrap_or_default(),
                    fmt17(defect),
                    line.samples.len().to_string(),
                ]);
            }
            let header = [
                "line",
                "x0",
                "y0",
                "z0",
                "terminal_flag",
                "exit_gradient",
                "level_defect",
                "samples",
            ];
            write_csv_table(&dir.join("summary.csv"), &header, &rows)?;
            println!(
                "{lines} flow lines, {corner_hits} corner hits, {} boundary exits; written to {}",
                rows.iter().filter(|r| r[4] == "Boundary").count(),
                dir.display()
            );
            Ok(ok)
        }
        Cmd::Fiber { mut v } => {
            let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(len > 0.0) {
                return Err(Failure::Usage("v must be nonzero".into()));
            }
            if (len - 1.0).abs() > 1e-6 {
                eprintln!("warning: |v| = {len}, renormalizing");
            }
            v.iter_mut().for_each(|x| *x /= len);
            let report = cover::fiber_report(&v)?;
            print_json(&report)?;
            Ok(report.single_orbit)
        }
        Cmd::Intersect { eps, grid } => {
            let opts = SolverOptions {
                grid: [grid; 3],
                margin_min: cfg.tolerances.margin_min,
                newton_tol: cfg.tolerances.newton_tol,
                ..SolverOptions::default()
            };
            let r = intersect_heegaard(eps, &opts)?;
            let dir = &cfg.output_dir;
            r.write_json(&dir.join("intersect.json"))?;
            r.write_csv(&dir.join("intersect.csv"))?;
            if json {
                print_json(&r)?;
            } else {
                println!(
                    "eps {eps}: {} intersection points, {} circle components ({} seeds, {} converged, {} unclassified)",
                    r.isolated_points.len(),
                    r.circle_components.len(),
                    r.seeds,
                    r.converged,
                    r.unclassified
                );
                for p in &r.isolated_points {
                    println!(
                        "  t={:.10} alpha={:.10} beta={:.10} residual={:.2e} margin={:.4e}",
                        p.t, p.alpha, p.beta, p.residual, p.margin
                    );
                }
                for c in &r.circle_components {
                    println!(
                        "  circle {}: {} samples, closure error {:.2e}, smallest singular value {:.2e}",
                        c.id,
                        c.samples.len(),
                        c.closure_error,
                        c.singular_values[0]
                    );
                }
            }
            Ok(true)
        }
        Cmd::Sample {
            target,
            level,
            count,
        } => {
            let table = sample::sample_table(&mut rng, &target, level, count)?;
            let path = cfg.output_dir.join(format!("sample-{target}.csv"));
            let header: Vec<&str> = table.header.iter().map(String::as_str).collect();
            write_csv_table(&path, &header, &table.rows)?;
            println!(
                "{} samples of {target} written to {}",
                table.rows.len(),
                path.display()
            );
            Ok(true)
        }
        Cmd::CriticalPoints { grid_n } => {
            let pts = pillow::find_critical_points(grid_n, cfg.tolerances.newton_tol)?;
            if json {
                let rows: Vec<_> = pts
                    .iter()
                    .map(|p| {
                        (
                            p.to_array(),
                            pillow::morse_index(*p),
                            pillow::k_grad(*p).norm(),
                        )
                    })
                    .collect();
                print_json(&rows)?;
            } else {
                println!("{} critical points", pts.len());
                for p in &pts {
                    println!(
                        "  ({:+.12}, {:+.12}, {:+.12})  k={:+.3}  index={}  |grad k|={:.2e}",
                        p.x,
                        p.y,
                        p.z,
                        pillow::k_eval(*p),
                        pillow::morse_index(*p),
                        pillow::k_grad(*p).norm()
                    );
                }
            }
            Ok(pts.len() == 5)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
