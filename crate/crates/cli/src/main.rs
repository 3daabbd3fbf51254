use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use quadcurl::assembly::Penalty;
use quadcurl::mesh::Domain;
use quadcurl::verify::{battery_passed, run_suite, standard_battery, to_csv, Role, Suite, SuiteOptions};
use quadcurl_cli::{emit_plot, parse_domain, read_study_csv, run_study, write_study_csv, MeshKind, StudyConfig, Sweep};

#[derive(Parser)]
#[command(name = "quadcurl", version, about = "hp-IPDG quad-curl eigenvalue studies and property checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an h- or p-sweep and write the study CSV.
    Study(StudyArgs),
    /// Run the property battery; exits 1 if any check fails.
    Verify(VerifyArgs),
    /// Turn a study CSV into an SVG error plot.
    Plot(PlotArgs),
}

#[derive(Args)]
struct StudyArgs {
    /// square (the unit square), centered-square, lshape or cube.
    #[arg(long, default_value = "square", value_parser = parse_domain)]
    domain: Domain,
    /// tri, quad, tet or hanging.
    #[arg(long, default_value = "tri")]
    mesh: MeshKind,
    /// Polynomial degree (the first degree of a p-sweep).
    #[arg(long, default_value_t = 2)]
    p: usize,
    /// Last degree; turns the study into a p-sweep on the first level.
    #[arg(long)]
    p_max: Option<usize>,
    /// Cells per side of each mesh, comma separated.
    #[arg(long, value_delimiter = ',')]
    levels: Vec<usize>,
    #[arg(long)]
    eta1: Option<f64>,
    #[arg(long)]
    eta2: Option<f64>,
    #[arg(long, default_value_t = 5)]
    num_eigs: usize,
    /// Shift; the eigenvalues nearest to it are computed.
    #[arg(long, default_value_t = 0.0)]
    target: f64,
    /// Skip meshes with more DG unknowns than this.
    #[arg(long)]
    dof_budget: Option<usize>,
    /// Target DG unknowns for `--mesh hanging`.
    #[arg(long)]
    hanging_dofs: Option<usize>,
    /// CSV output; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG plot here.
    #[arg(long)]
    plot: Option<PathBuf>,
    #[arg(long, default_value_t = 17)]
    seed: u64,
    /// Sweep points solved concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: Suite,
    #[arg(long)]
    eta1: Option<f64>,
    #[arg(long)]
    eta2: Option<f64>,
    #[arg(long, default_value_t = 17)]
    seed: u64,
    /// Random samples for the sampled checks.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// CSV output; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Study CSV.
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn default_levels(domain: Domain, mesh: MeshKind) -> Vec<usize> {
    match (domain, mesh) {
        (Domain::Cube, _) => vec![1],
        (Domain::LShape, MeshKind::Hanging) => vec![8],
        (_, MeshKind::Hanging) => vec![12],
        (Domain::LShape, _) => vec![16, 32, 64],
        (_, MeshKind::Quad) => vec![10, 20, 40],
        _ => vec![8, 16, 32],
    }
}

fn write_output(path: Option<&Path>, text: &str) -> quadcurl::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn study(args: StudyArgs) -> quadcurl::Result<ExitCode> {
    let levels = if args.levels.is_empty() { default_levels(args.domain, args.mesh) } else { args.levels };
    let sweep = match args.p_max {
        Some(p_max) => Sweep::P { divisions: levels[0], degrees: (args.p..=p_max).collect() },
        None => Sweep::H { p: args.p, divisions: levels },
    };
    let mut cfg = StudyConfig::new(args.domain, args.mesh, sweep);
    let d = Penalty::default_for(args.domain.dim());
    cfg.penalty = Penalty { eta1: args.eta1.unwrap_or(d.eta1), eta2: args.eta2.unwrap_or(d.eta2) };
    cfg.k = args.num_eigs;
    cfg.target = args.target;
    cfg.dof_budget = args.dof_budget;
    cfg.seed = args.seed;
    cfg.jobs = args.jobs;
    if let Some(n) = args.hanging_dofs {
        cfg.hanging_target = n;
    }
    let rows = run_study(&cfg)?;
    write_output(args.out.as_deref(), &write_study_csv(&rows))?;
    if let Some(svg) = args.plot {
        std::fs::write(svg, emit_plot(&rows))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> quadcurl::Result<ExitCode> {
    let opts = SuiteOptions { eta1: args.eta1, eta2: args.eta2, seed: args.seed, samples: args.samples, ..Default::default() };
    let reports = run_suite(args.suite, &standard_battery()?, &opts);
    write_output(args.out.as_deref(), &to_csv(&reports))?;
    for r in reports.iter().filter(|r| r.role == Role::Control && !r.pass) {
        eprintln!("note: control {} on {} did not detect the violation it was built for", r.check, r.mesh);
    }
    if battery_passed(&reports) {
        Ok(ExitCode::SUCCESS)
    } else {
        for r in reports.iter().filter(|r| r.is_failure()) {
            eprintln!("FAIL {} on {} p={}: {:e} (threshold {:e})", r.check, r.mesh, r.p, r.observed, r.threshold);
        }
        Ok(ExitCode::from(1))
    }
}

fn plot(args: PlotArgs) -> quadcurl::Result<ExitCode> {
    let text = std::fs::read_to_string(&args.input)?;
    let rows = read_study_csv(&text)?;
    std::fs::write(&args.out, emit_plot(&rows))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Study(a) => study(a),
        Command::Verify(a) => verify(a),
        Command::Plot(a) => plot(a),
    };
    match result {
        Ok(code) => code,
        Err(e @ (quadcurl::Error::InvalidArgument(_) | quadcurl::Error::Parse { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
