//! Command line for the layer-tracking solver.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical or IO failure.
//! Diagnostics go to standard error; data goes to files or standard output.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use layertrack::export::{self, ExportMode};
use layertrack::harness::{epsilon_sweep, render_table, SweepConfig, TableFormat};
use layertrack_core::characteristic;
use layertrack_core::problem::{self, ProblemSpec};
use layertrack_core::solver::{self, SolverContext};

#[derive(Parser)]
#[command(name = "layertrack", version, about = "Layer-tracking fitted-mesh solver for convection-diffusion problems with a discontinuous initial condition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem instance and export the solution as CSV
    Solve(SolveArgs),
    /// Run the two-mesh convergence sweep and render the table
    Converge(ConvergeArgs),
    /// Dump samples of the layer path d(t) as CSV
    Characteristic(CharacteristicArgs),
    /// Dump the fitted space mesh as CSV
    Mesh(MeshArgs),
    /// Sample the problem coefficients and report the method's constants
    Validate(ValidateArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Built-in example id (1 or 2)
    #[arg(long)]
    example: u32,
    /// Diffusion parameter; accepts `2^-k` or a decimal
    #[arg(long)]
    eps: String,
    /// Space cells (multiple of 8)
    #[arg(long = "N")]
    n: usize,
    /// Time steps
    #[arg(long = "M")]
    m: usize,
    /// Output file (standard output when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Export the reconstructed original unknown instead of grid values
    #[arg(long)]
    physical: bool,
}

#[derive(Args)]
struct ConvergeArgs {
    /// Built-in example id (1 or 2)
    #[arg(long)]
    example: u32,
    /// Comma-separated ladder of space cell counts
    #[arg(long = "N", value_delimiter = ',', default_value = "32,64,128,256")]
    n: Vec<usize>,
    /// Diffusion exponents: `a:b` (inclusive) or a comma list of k in 2^-k
    #[arg(long = "eps-powers", default_value = "0:26")]
    eps_powers: String,
    /// Keep M equal to N across the ladder (the default rule)
    #[arg(long = "M-equals-N")]
    m_equals_n: bool,
    /// Output file (standard output when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Table layout
    #[arg(long, value_parser = ["csv", "text"], default_value = "csv")]
    format: String,
    /// Worker threads (default: LAYERTRACK_THREADS or all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Reserved: run without the layer-tracking coordinate change
    #[arg(long = "no-transform")]
    no_transform: bool,
}

#[derive(Args)]
struct CharacteristicArgs {
    /// Built-in example id (1 or 2)
    #[arg(long)]
    example: u32,
    /// Number of sample intervals
    #[arg(long, default_value_t = 512)]
    samples: usize,
    /// Output file (standard output when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MeshArgs {
    /// Built-in example id (1 or 2)
    #[arg(long)]
    example: u32,
    /// Diffusion parameter; accepts `2^-k` or a decimal
    #[arg(long)]
    eps: String,
    /// Space cells (multiple of 8)
    #[arg(long = "N")]
    n: usize,
    /// Output file (standard output when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Built-in example id (1 or 2)
    #[arg(long)]
    example: u32,
    /// Sample grid density per axis
    #[arg(long = "grid-density", default_value_t = 101)]
    grid_density: usize,
}

enum AppError {
    Usage(String),
    Run(String),
}

impl From<layertrack_core::Error> for AppError {
    fn from(e: layertrack_core::Error) -> Self {
        AppError::Run(e.to_string())
    }
}

impl From<io::Error> for AppError {
    fn from(e: io::Error) -> Self {
        AppError::Run(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Solve(args) => {
            let p = lookup_example(args.example)?;
            let eps = parse_eps(&args.eps)?;
            check_cells(args.n)?;
            if args.m == 0 {
                return Err(AppError::Usage("M must be at least 1".into()));
            }
            let sol = solver::solve(&p, eps, args.n, args.m)?;
            let mode = if args.physical { ExportMode::Physical } else { ExportMode::Transformed };
            with_output(&args.out, |out| export::write_solution(&sol, mode, out))?;
            Ok(())
        }
        Command::Converge(args) => {
            if args.no_transform {
                return Err(AppError::Usage(
                    "--no-transform is reserved; the untransformed scheme is not implemented"
                        .into(),
                ));
            }
            let p = lookup_example(args.example)?;
            for &n in &args.n {
                check_cells(n)?;
            }
            if !args.n.windows(2).all(|w| w[0] < w[1]) {
                return Err(AppError::Usage("N ladder must be strictly ascending".into()));
            }
            let powers = parse_eps_powers(&args.eps_powers)?;
            let cfg = SweepConfig::new(args.n.clone(), powers);
            let format =
                if args.format == "csv" { TableFormat::Csv } else { TableFormat::Aligned };
            let pool = thread_pool(args.threads)?;
            let started = Instant::now();
            let report = pool.install(|| epsilon_sweep(&p, &cfg));
            eprintln!(
                "swept {} cells in {:.1}s",
                report.eps_powers.len() * report.n_list.len(),
                started.elapsed().as_secs_f64()
            );
            for failure in &report.failures {
                eprintln!(
                    "cell eps=2^-{} N={} failed: {}",
                    failure.eps_power, failure.n, failure.message
                );
            }
            let rendered = render_table(&report, format);
            with_output(&args.out, |out| out.write_all(rendered.as_bytes()))?;
            Ok(())
        }
        Command::Characteristic(args) => {
            let p = lookup_example(args.example)?;
            if args.samples == 0 {
                return Err(AppError::Usage("samples must be at least 1".into()));
            }
            let curve = characteristic::integrate(&p, characteristic::DEFAULT_TOLERANCE)?;
            with_output(&args.out, |out| export::write_characteristic(&curve, args.samples, out))?;
            Ok(())
        }
        Command::Mesh(args) => {
            let p = lookup_example(args.example)?;
            let eps = parse_eps(&args.eps)?;
            check_cells(args.n)?;
            let ctx = SolverContext::prepare(&p, eps, args.n, 1)?;
            with_output(&args.out, |out| export::write_mesh(ctx.space(), out))?;
            Ok(())
        }
        Command::Validate(args) => {
            let p = lookup_example(args.example)?;
            if args.grid_density < 2 {
                return Err(AppError::Usage("grid density must be at least 2".into()));
            }
            let report = problem::validate(&p, args.grid_density)?;
            let curve = characteristic::integrate(&p, characteristic::DEFAULT_TOLERANCE)?;
            let horizon = characteristic::horizon_diagnostics(&curve, &p);
            println!("example:            {}", p.name());
            println!("alpha:              {:.6e}", report.alpha);
            println!("min convection:     {:.6e}", report.min_convection);
            println!("min reaction:       {:.6e}", report.min_reaction);
            println!("jump:               {:.6e}", report.jump);
            println!("derivative jump:    {:.3e}", report.derivative_jump);
            println!("a_s(d,0):           {:.3e}", report.convection_slope_at_jump);
            println!("b_s(d,0):           {:.3e}", report.reaction_slope_at_jump);
            println!("layer end d(T):     {:.6}", curve.end_position());
            println!("delta:              {:.6}", horizon.delta);
            println!("kappa bound:        {:.6}", horizon.kappa_bound);
            println!(
                "time restriction:   {:.4} ({})",
                horizon.time_restriction_lhs,
                if horizon.time_restriction_ok { "satisfied" } else { "violated; reported only" }
            );
            if report.warnings.is_empty() {
                println!("warnings:           none");
            } else {
                for w in &report.warnings {
                    println!("warning:            {w}");
                }
            }
            Ok(())
        }
    }
}

fn lookup_example(id: u32) -> Result<ProblemSpec, AppError> {
    problem::from_id(id)
        .ok_or_else(|| AppError::Usage(format!("unknown example id {id}; available: 1, 2")))
}

fn check_cells(n: usize) -> Result<(), AppError> {
    if n < 8 || n % 8 != 0 {
        return Err(AppError::Usage("N must be divisible by 8".into()));
    }
    Ok(())
}

fn parse_eps(text: &str) -> Result<f64, AppError> {
    let eps = if let Some((base, exponent)) = text.split_once('^') {
        if base.trim() != "2" {
            return Err(AppError::Usage(format!("eps powers use base 2, got `{text}`")));
        }
        let k: i32 = exponent
            .trim()
            .parse()
            .map_err(|_| AppError::Usage(format!("cannot parse eps exponent in `{text}`")))?;
        2f64.powi(k)
    } else {
        text.trim()
            .parse::<f64>()
            .map_err(|_| AppError::Usage(format!("cannot parse eps `{text}`")))?
    };
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(AppError::Usage("eps must be positive and finite".into()));
    }
    Ok(eps)
}

fn parse_eps_powers(text: &str) -> Result<Vec<i32>, AppError> {
    let bad = |t: &str| AppError::Usage(format!("cannot parse eps powers `{t}`"));
    if let Some((lo, hi)) = text.split_once(':') {
        let lo: i32 = lo.trim().parse().map_err(|_| bad(text))?;
        let hi: i32 = hi.trim().parse().map_err(|_| bad(text))?;
        if hi < lo {
            return Err(bad(text));
        }
        Ok((lo..=hi).collect())
    } else {
        text.split(',')
            .map(|part| part.trim().parse().map_err(|_| bad(text)))
            .collect()
    }
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, AppError> {
    let count = threads
        .or_else(|| std::env::var("LAYERTRACK_THREADS").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(count)
        .build()
        .map_err(|e| AppError::Run(e.to_string()))
}

fn with_output<F>(path: &Option<PathBuf>, write: F) -> Result<(), AppError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match path {
        Some(path) => {
            let mut out = BufWriter::new(File::create(path)?);
            write(&mut out)?;
            out.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut out = BufWriter::new(stdout.lock());
            write(&mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}
