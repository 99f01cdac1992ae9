use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use finsler_gbc::report::{self, Command};
use finsler_gbc::scenario::{builtin_scenario, builtin_scenarios, parse_eps, Scenario};

/// Numerical Gauss–Bonnet–Chern workbench for complex Finsler metrics.
///
/// Exit status: 0 when every check is within tolerance, 2 on a tolerance failure,
/// 1 on an input or evaluation error.
#[derive(Parser, Debug)]
#[command(name = "finsler-gbc", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Homogeneity identities, pseudoconvexity and Cartan norm at seeded samples.
    CheckMetric(Opts),
    /// Indicatrix volume along a base-coordinate sweep.
    Volume(Opts),
    /// Structure-equation residuals at seeded points.
    Structure(Opts),
    /// Per-zero boundary integrals and their ε-extrapolation.
    Degree(Opts),
    /// Both sides of the Gauss–Bonnet–Chern identity.
    Gbc(Opts),
    /// Riemann-surface Euler characteristic.
    Corollary(Opts),
    /// check-metric, structure, volume and gbc together.
    Suite(Opts),
    /// List the builtin scenarios, or print one as a scenario file.
    Scenarios { name: Option<String> },
}

#[derive(Args, Debug)]
struct Opts {
    /// Scenario file, or the name of a builtin scenario.
    #[arg(long)]
    scenario: String,
    /// Output directory for report.json and tables.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the radial (or per-coordinate) node count.
    #[arg(long)]
    mesh: Option<usize>,
    /// Override the ε schedule, e.g. `0.2,0.1,0.05`.
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn load(o: &Opts) -> finsler_gbc::Result<Scenario> {
    let path = PathBuf::from(&o.scenario);
    let mut s = if path.exists() { Scenario::load(&path)? } else { builtin_scenario(&o.scenario)? };
    if let Some(m) = o.mesh {
        s.mesh.radial = m;
    }
    if let Some(e) = &o.eps {
        s.eps = parse_eps(e)?;
    }
    if let Some(seed) = o.seed {
        s.seed = seed;
    }
    s.validate()?;
    Ok(s)
}

fn execute(command: Command, o: &Opts) -> finsler_gbc::Result<bool> {
    if let Some(t) = o.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| finsler_gbc::Error::InvalidArgument(e.to_string()))?;
    }
    let s = load(o)?;
    let t0 = Instant::now();
    let outcome = report::run(command, &s)?;
    let files = report::write_artifacts(&o.out, &s, &outcome)?;
    let secs = t0.elapsed().as_secs_f64();
    std::fs::write(o.out.join("runtime.txt"), format!("{} {} {secs:.3} s\n", command.name(), s.name))?;
    println!("{}", report::summary(command, &s, &outcome));
    for f in files {
        println!("  wrote {}", f.display());
    }
    println!("  runtime {secs:.2} s");
    Ok(outcome.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, opts) = match cli.command {
        Cmd::CheckMetric(o) => (Command::CheckMetric, o),
        Cmd::Volume(o) => (Command::Volume, o),
        Cmd::Structure(o) => (Command::Structure, o),
        Cmd::Degree(o) => (Command::Degree, o),
        Cmd::Gbc(o) => (Command::Gbc, o),
        Cmd::Corollary(o) => (Command::Corollary, o),
        Cmd::Suite(o) => (Command::Suite, o),
        Cmd::Scenarios { name } => {
            match name {
                None => builtin_scenarios().iter().for_each(|s| println!("{}", s.name)),
                Some(n) => match builtin_scenario(&n) {
                    Ok(s) => print!("{}", s.to_text()),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(1);
                    }
                },
            }
            return ExitCode::SUCCESS;
        }
    };
    match execute(command, &opts) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
