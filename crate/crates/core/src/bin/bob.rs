use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bouncing_billiard::analysis::{self, SearchLoop};
use bouncing_billiard::dynamics;
use bouncing_billiard::io::{self, fmt_f64, ScenarioConfig, SvgStyle};
use bouncing_billiard::segment_theory;
use bouncing_billiard::verify::{self, Hooks, Level};

/// Bouncing outer billiards: orbits, sweeps, fixed points, rotation numbers and figures.
#[derive(Parser)]
#[command(name = "bob", version)]
struct Cli {
    /// Worker threads for parallel work (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate the orbits of a scenario and write CSV, SVG and a JSON summary.
    Orbit(RunArgs),
    /// Run a parameter sweep and write one row per grid cell.
    Sweep {
        /// Sweep file (JSON): a base scenario, a task and the grid axes.
        #[arg(long)]
        config: PathBuf,
        /// CSV destination (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search circles around the scenario's shape for fixed points.
    FixedPoints {
        /// Scenario file; only its shape is used.
        #[arg(long)]
        config: PathBuf,
        /// Loop radii around the shape's centroid.
        #[arg(long, num_args = 1.., default_values_t = [2.0])]
        radius: Vec<f64>,
        #[arg(long, default_value_t = analysis::DEFAULT_LOOP_SAMPLES)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rotation numbers of the invariant ellipses of the segment at one height.
    Rotation {
        #[arg(long)]
        height: f64,
        /// Number of semi-axis values in (0, 1).
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Also build the orbit with this rotation number.
        #[arg(long)]
        target: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification battery.
    Verify {
        /// Reduced budgets.
        #[arg(long)]
        quick: bool,
    },
    /// Render a scenario as an SVG figure.
    Plot {
        #[command(flatten)]
        run: RunArgs,
        /// Plot bounce points instead of orbit points.
        #[arg(long)]
        bounces: bool,
        #[arg(long, default_value_t = 1.0)]
        dot_radius: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the scenario's step count.
    #[arg(long)]
    steps: Option<usize>,
    /// CSV destination; with several initial conditions an index is appended to the name.
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG destination.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Keep iterating after a degenerate bounce by nudging the direction.
    #[arg(long)]
    restart: bool,
}

enum Failure {
    Usage(String),
    Verification,
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::ConfigError> for Failure {
    fn from(e: io::ConfigError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<bouncing_billiard::Error> for Failure {
    fn from(e: bouncing_billiard::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_scenario(args: &RunArgs) -> Result<ScenarioConfig, Failure> {
    let mut cfg = io::parse_scenario(&read(&args.config)?)?;
    if let Some(steps) = args.steps {
        cfg.steps = steps;
    }
    cfg.restart_on_degenerate |= args.restart;
    Ok(cfg)
}

fn indexed(path: &Path, i: usize, n: usize) -> PathBuf {
    if n == 1 {
        return path.to_path_buf();
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("orbit");
    let name = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}-{i}.{ext}"),
        None => format!("{stem}-{i}"),
    };
    path.with_file_name(name)
}

fn run_orbit(args: &RunArgs) -> Result<(), Failure> {
    let cfg = load_scenario(args)?;
    let run = io::run_scenario(&cfg)?;
    let csv = args.out.clone().or(cfg.output.csv.as_ref().map(PathBuf::from));
    if let Some(path) = csv {
        for (i, rec) in run.records.iter().enumerate() {
            write(&indexed(&path, i, run.records.len()), &io::export_orbit_csv(rec))?;
        }
    }
    if let Some(path) = args.svg.clone().or(cfg.output.svg.as_ref().map(PathBuf::from)) {
        write(&path, &io::render_svg(&run.shape, &run.records, &SvgStyle::default()))?;
    }
    let report = run.report_json();
    match &cfg.output.report {
        Some(path) => write(Path::new(path), &report)?,
        None => println!("{report}"),
    }
    Ok(())
}

fn run_plot(args: &RunArgs, bounces: bool, dot_radius: f64) -> Result<(), Failure> {
    let cfg = load_scenario(args)?;
    let run = io::run_scenario(&cfg)?;
    let style = SvgStyle {
        dot_radius,
        plot_bounces: bounces,
        ..SvgStyle::default()
    };
    let svg = io::render_svg(&run.shape, &run.records, &style);
    let path = args.svg.clone().or(cfg.output.svg.as_ref().map(PathBuf::from));
    emit(path.as_deref(), &svg)
}

fn run_fixed_points(config: &Path, radii: &[f64], samples: usize, out: Option<&Path>) -> Result<(), Failure> {
    let cfg = io::parse_scenario(&read(config)?)?;
    let shape = cfg.shape()?;
    let mut text = String::from("radius,x,y,angle,residual\n");
    for &r in radii {
        for z in analysis::find_fixed_points(&shape, &SearchLoop::around(&shape, r), samples) {
            let residual = dynamics::apply(&shape, &z).map(|o| o.distance(&z)).unwrap_or(f64::INFINITY);
            text.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_f64(r),
                fmt_f64(z.p.x),
                fmt_f64(z.p.y),
                fmt_f64(z.v.radians()),
                fmt_f64(residual)
            ));
        }
    }
    emit(out, &text)
}

fn run_rotation(h: f64, samples: usize, target: Option<f64>, out: Option<&Path>) -> Result<(), Failure> {
    if h.is_nan() || h <= 0.0 || h.is_infinite() {
        return Err(Failure::Usage(format!("height must be positive, got {h}")));
    }
    let mut text = String::from("a,b,phi,phi_prime\n");
    for i in 0..samples.max(1) {
        let a = (i as f64 + 0.5) / samples.max(1) as f64;
        let b = segment_theory::b_of(a, h);
        let r = segment_theory::rotation_number(a, b);
        text.push_str(&format!("{},{},{},{}\n", fmt_f64(a), fmt_f64(b), fmt_f64(r.phi), fmt_f64(r.phi_prime)));
    }
    emit(out, &text)?;
    let (lo, hi) = segment_theory::rotation_range(h);
    eprintln!("rotation numbers at h={h} fill ({lo}, {hi})");
    if let Some(t) = target {
        match segment_theory::build_periodic_orbit(h, t) {
            Some(s) => eprintln!("orbit with rotation {t}: x={} h={} theta={}", s.x, s.h, s.theta),
            None => eprintln!("rotation {t} is not realised at h={h}"),
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    match &cli.command {
        Command::Orbit(args) => run_orbit(args),
        Command::Plot { run, bounces, dot_radius } => run_plot(run, *bounces, *dot_radius),
        Command::Sweep { config, out } => {
            let cfg = io::parse_sweep(&read(config)?)?;
            let report = io::run_sweep(&cfg, cli.threads)?;
            emit(out.as_deref(), &report.to_csv())
        }
        Command::FixedPoints { config, radius, samples, out } => {
            run_fixed_points(config, radius, *samples, out.as_deref())
        }
        Command::Rotation { height, samples, target, out } => {
            run_rotation(*height, *samples, *target, out.as_deref())
        }
        Command::Verify { quick } => {
            let level = if *quick { Level::Quick } else { Level::Full };
            let hooks = Hooks::default();
            let mut all = true;
            for id in 1..=verify::CLAIM_COUNT {
                let claim = verify::run_claim(id, level, &hooks);
                println!("{}", claim.line());
                all &= claim.passed;
            }
            if all {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification) => ExitCode::from(2),
    }
}
