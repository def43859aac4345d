//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 solver non-convergence,
//! 3 invariant violation (support escape, energy drift, failed theorem
//! check).

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::driver::campaign::{report, summary_csv, verify_theorem_campaign, write_atomic, Verdict};
use crate::driver::config::{parse_config, parse_configs, ExperimentConfig};
use crate::driver::moving::{hopf_conflict_check, moving_polarization, trace_csv, MovingOutcome};
use crate::error::{Error, Result};
use crate::nodal::NodalDecomposition;
use crate::rearrange::{read_field_on, write_field};
use crate::solver::{first_eigenpair, second_eigenpair, solve_least_energy_nodal};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "nodal-lab", version, about = "Nodal solutions of the Dirichlet p-Laplacian and exact lattice polarization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one configuration and analyse its nodal set.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// First or second eigenpair of the p-Laplacian.
    Eigen {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "second")]
        which: Which,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Moving polarization and the Hopf check on a stored field.
    Polarize {
        #[arg(long)]
        field: PathBuf,
        /// Configuration supplying the domain, h, the source and the schedule.
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a campaign and write summary.csv.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate summary tables.
    Report {
        #[arg(long = "input", required = true)]
        inputs: Vec<PathBuf>,
        /// Append a bar chart of d/h.
        #[arg(long)]
        chart: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Which {
    First,
    Second,
}

/// Maps an error to its exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SupportEscape { .. } | Error::Invariant(_) => EXIT_INVARIANT,
        Error::Solver(_) => EXIT_NOT_CONVERGED,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn cli_main<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn out_dir(flag: Option<PathBuf>, cfg: Option<&ExperimentConfig<f64>>) -> Result<PathBuf> {
    let dir = flag.or_else(|| cfg.and_then(|c| c.output.clone())).unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Solve { config, out } => solve(&config, out),
        Command::Eigen { config, which, out } => eigen(&config, which, out),
        Command::Polarize { field, domain, out } => polarize(&field, &domain, out),
        Command::Verify { config, out } => {
            let configs: Vec<ExperimentConfig<f64>> = parse_configs(&read(&config)?)?;
            let dir = out_dir(out, None)?;
            let rows = verify_theorem_campaign(&configs, Some(&dir))?;
            print!("{}", summary_csv(&rows));
            let any = |v: Verdict| rows.iter().any(|r| r.verdict == v);
            Ok(if any(Verdict::Fail) {
                EXIT_INVARIANT
            } else if any(Verdict::Skip) {
                EXIT_NOT_CONVERGED
            } else {
                EXIT_OK
            })
        }
        Command::Report { inputs, chart, out } => {
            let tables = inputs.iter().map(|p| read(p)).collect::<Result<Vec<_>>>()?;
            let text = report(&tables, chart)?;
            match out {
                Some(path) => write_atomic(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(EXIT_OK)
        }
    }
}

fn solve(config: &Path, out: Option<PathBuf>) -> Result<i32> {
    let cfg: ExperimentConfig<f64> = parse_config(&read(config)?)?;
    let dir = out_dir(out, Some(&cfg))?;
    let grid = cfg.grid()?;
    let (u, converged) = match cfg.nonlinearity()? {
        Some(nl) => {
            let s = solve_least_energy_nodal(grid, &nl, &cfg.solver)?;
            write_atomic(&dir.join("trace.csv"), &s.trace_csv())?;
            println!(
                "energy {} residual {} iterations {} restarts {} converged {}",
                s.energy, s.residual, s.iterations, s.restarts, s.converged
            );
            (s.u, s.converged)
        }
        None => {
            let r = second_eigenpair(grid, cfg.p, &cfg.solver)?;
            println!("lambda2 {} residual {} iterations {} converged {}", r.lambda, r.residual, r.iterations, r.converged);
            (r.u, r.converged)
        }
    };
    write_atomic(&dir.join("field.fld"), &write_field(&u)?)?;
    match NodalDecomposition::new(&u, cfg.tau) {
        Ok(dec) => {
            write_atomic(&dir.join("nodal.csv"), &dec.report_csv())?;
            write_atomic(&dir.join("crossings.csv"), &dec.crossings_csv())?;
            println!("d {} d/h {} domains {}", dec.d, dec.d / dec.h, dec.domains.count);
        }
        Err(Error::NotSignChanging) => println!("solution is not sign-changing"),
        Err(e) => return Err(e),
    }
    Ok(if converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

fn eigen(config: &Path, which: Which, out: Option<PathBuf>) -> Result<i32> {
    let cfg: ExperimentConfig<f64> = parse_config(&read(config)?)?;
    let dir = out_dir(out, Some(&cfg))?;
    let grid = cfg.grid()?;
    let r = match which {
        Which::First => first_eigenpair(grid, cfg.p, &cfg.solver)?,
        Which::Second => second_eigenpair(grid, cfg.p, &cfg.solver)?,
    };
    write_atomic(&dir.join("eigen.fld"), &write_field(&r.u)?)?;
    println!(
        "lambda {} residual {} iterations {} converged {}",
        r.lambda, r.residual, r.iterations, r.converged
    );
    Ok(if r.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

fn polarize(field: &Path, domain: &Path, out: Option<PathBuf>) -> Result<i32> {
    let cfg: ExperimentConfig<f64> = parse_config(&read(domain)?)?;
    let dir = out_dir(out, Some(&cfg))?;
    let u = read_field_on(cfg.grid()?, &read(field)?)?;
    let nl = cfg.nonlinearity()?;
    match moving_polarization(&u, cfg.p, nl.as_ref(), &cfg.schedule, cfg.tau)? {
        MovingOutcome::AlreadyExhibited { d } => {
            println!("theorem already exhibited: d = {d} <= h; hopf check not applicable");
        }
        MovingOutcome::Slid(run) => {
            write_atomic(&dir.join("trace.csv"), &trace_csv(&run.trace))?;
            write_atomic(&dir.join("polarized.fld"), &write_field(&run.field)?)?;
            let report = hopf_conflict_check(&run)?;
            write_atomic(&dir.join("hopf.txt"), &report.to_text())?;
            println!(
                "d1 {} final offset {} steps {} flipped {}",
                run.contact.d1,
                run.final_offset,
                run.trace.len(),
                run.flipped
            );
            print!("{}", report.to_text());
        }
    }
    Ok(EXIT_OK)
}
