//! Command-line front end: each subcommand reads a JSON job description,
//! runs the corresponding computation, prints a short report, and optionally
//! writes CSV/SVG/JSON artifacts. Exit codes: 0 pass, 1 fail, 2 inconclusive,
//! 3 configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use volterra_lab::config::{
    self, CaseConfig, DecomposeJob, GridConfig, NormsJob, ResolventJob, SolveJob, SuiteJob,
};
use volterra_lab::error::Error;
use volterra_lab::forcing::ForcingFunction;
use volterra_lab::grid::Grid;
use volterra_lab::harness::{
    run_case, run_suite, shipped_suite, write_case_artifacts, CaseSpec, CaseVerdict,
};
use volterra_lab::norms::{condition_a_report, Membership};
use volterra_lab::report::{write_csv, write_json, write_svg_chart, SvgSeries};
use volterra_lab::resolvent::{solve_resolvent, L1Verdict};
use volterra_lab::solver::solve_bundle;
use volterra_lab::Result;

#[derive(Parser)]
#[command(
    name = "volterra-lab",
    version,
    about = "Resolvents, L^p diagnostics, and an interval-average equivalence harness \
             for scalar linear convolution Volterra integrodifferential equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a kernel's differential resolvent and classify its integrability
    Resolvent(ResolventArgs),
    /// Solve the forced equation along three independent routes
    Solve(SolveArgs),
    /// Split a forcing into f1 (unit-window integrals) and the remainder pair f2, f3
    Decompose(DecomposeArgs),
    /// Sweep truncated L^p functionals of the interval averages over window lengths
    Norms(NormsArgs),
    /// Run one equivalence case end to end and judge it
    TheoremCheck(CaseArgs),
    /// Run a suite of cases (the shipped suite when no config is given)
    Suite(SuiteArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Directory for CSV/SVG/JSON artifacts
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the grid step h
    #[arg(long)]
    h: Option<f64>,
    /// Override the horizon T
    #[arg(long = "T")]
    t_end: Option<f64>,
}

#[derive(Args)]
struct ResolventArgs {
    /// JSON job description: { "measure": ..., "grid": ... }
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SolveArgs {
    /// JSON job description: { "measure": ..., "forcing": ..., "xi": ..., "grid": ... }
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct DecomposeArgs {
    /// JSON job description: { "forcing": ..., "grid": ... }
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct NormsArgs {
    /// JSON job description: { "forcing": ..., "p": ..., "grid": ... }
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
    /// Override the exponent p
    #[arg(long)]
    p: Option<f64>,
}

#[derive(Args)]
struct CaseArgs {
    /// JSON case description (same schema as one suite entry)
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
    /// Override the exponent p
    #[arg(long)]
    p: Option<f64>,
}

#[derive(Args)]
struct SuiteArgs {
    /// JSON suite description: { "cases": [...] }; omit to run the shipped suite
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
    /// Override the exponent p of every case
    #[arg(long)]
    p: Option<f64>,
}

fn main() -> ExitCode {
    // Clap's own exit conventions collide with this tool's (2 = inconclusive),
    // so argument errors are mapped to the config-error code by hand.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version output are not errors.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(3);
        }
    };

    let outcome = match cli.command {
        Command::Resolvent(args) => cmd_resolvent(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Decompose(args) => cmd_decompose(args),
        Command::Norms(args) => cmd_norms(args),
        Command::TheoremCheck(args) => cmd_theorem_check(args),
        Command::Suite(args) => cmd_suite(args),
    };

    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Evaluation(_) => 1,
                _ => 3,
            };
            ExitCode::from(code)
        }
    }
}

fn apply_grid_overrides(grid: &mut GridConfig, common: &CommonArgs) {
    if let Some(h) = common.h {
        grid.h = h;
    }
    if let Some(t) = common.t_end {
        grid.t_end = t;
    }
}

fn warn_if_unresolved(forcing: &ForcingFunction, grid: Grid) {
    if let Some(msg) = config::resolvability_warning(forcing, grid) {
        eprintln!("warning: {msg}");
    }
}

fn cmd_resolvent(args: ResolventArgs) -> Result<u8> {
    let mut job: ResolventJob = config::load(&args.config)?;
    apply_grid_overrides(&mut job.grid, &args.common);
    let measure = job.measure.build()?;
    let grid = job.grid.build()?;
    let res = solve_resolvent(&measure, grid)?;

    println!(
        "resolvent on [0, {}] at h = {}: ∫|r| ≈ {:.6}, verdict {}",
        grid.horizon(),
        grid.h(),
        res.l1_truncated,
        res.l1_verdict
    );
    if let Some(rate) = res.l1_tail_rate {
        println!("tail envelope decay rate ≈ {rate:.4}");
    }

    if let Some(dir) = &args.common.out {
        let t: Vec<f64> = grid.nodes().collect();
        write_csv(
            &dir.join("resolvent.csv"),
            &["t", "r", "r_prime"],
            &[&t, res.r.values(), res.r_prime.values()],
        )?;
        write_svg_chart(
            &dir.join("resolvent.svg"),
            "resolvent and derivative",
            &t,
            &[
                SvgSeries { label: "r", values: res.r.values() },
                SvgSeries { label: "r_prime", values: res.r_prime.values() },
            ],
        )?;
        #[derive(serde::Serialize)]
        struct Summary {
            h: f64,
            horizon: f64,
            l1_truncated: f64,
            l1_tail_rate: Option<f64>,
            l1_verdict: L1Verdict,
        }
        write_json(
            &dir.join("summary.json"),
            &Summary {
                h: grid.h(),
                horizon: grid.horizon(),
                l1_truncated: res.l1_truncated,
                l1_tail_rate: res.l1_tail_rate,
                l1_verdict: res.l1_verdict,
            },
        )?;
    }

    Ok(match res.l1_verdict {
        L1Verdict::Integrable => 0,
        L1Verdict::SuspectNonintegrable => 1,
        L1Verdict::Inconclusive => 2,
    })
}

fn cmd_solve(args: SolveArgs) -> Result<u8> {
    let mut job: SolveJob = config::load(&args.config)?;
    apply_grid_overrides(&mut job.grid, &args.common);
    let cfg = job.build()?;
    let grid = cfg.grid;
    warn_if_unresolved(&cfg.forcing, grid);

    let res = solve_resolvent(&cfg.measure, grid)?;
    let dec = cfg.forcing.decompose(grid)?;
    let bundle = solve_bundle(&cfg, &res, &dec)?;
    println!(
        "solved on [0, {}] at h = {} with ξ = {}: sup|x_direct − x_voc| = {:.3e}, sup|x_voc − x_key2| = {:.3e}",
        grid.horizon(),
        grid.h(),
        cfg.xi,
        bundle.agreement_direct_voc,
        bundle.agreement_voc_key2
    );

    if let Some(dir) = &args.common.out {
        let t: Vec<f64> = grid.nodes().collect();
        write_csv(
            &dir.join("solve.csv"),
            &["t", "x_direct", "x_voc", "x_key2"],
            &[
                &t,
                bundle.x_direct.values(),
                bundle.x_voc.values(),
                bundle.x_key2.values(),
            ],
        )?;
        write_svg_chart(
            &dir.join("solve.svg"),
            "three solution routes",
            &t,
            &[
                SvgSeries { label: "x_direct", values: bundle.x_direct.values() },
                SvgSeries { label: "x_voc", values: bundle.x_voc.values() },
                SvgSeries { label: "x_key2", values: bundle.x_key2.values() },
            ],
        )?;
        #[derive(serde::Serialize)]
        struct Summary {
            h: f64,
            horizon: f64,
            xi: f64,
            agreement_direct_voc: f64,
            agreement_voc_key2: f64,
        }
        write_json(
            &dir.join("summary.json"),
            &Summary {
                h: grid.h(),
                horizon: grid.horizon(),
                xi: cfg.xi,
                agreement_direct_voc: bundle.agreement_direct_voc,
                agreement_voc_key2: bundle.agreement_voc_key2,
            },
        )?;
    }
    Ok(0)
}

fn cmd_decompose(args: DecomposeArgs) -> Result<u8> {
    let mut job: DecomposeJob = config::load(&args.config)?;
    apply_grid_overrides(&mut job.grid, &args.common);
    let forcing = job.forcing.build()?;
    let grid = job.grid.build()?;
    warn_if_unresolved(&forcing, grid);

    let dec = forcing.decompose(grid)?;
    println!(
        "decomposed on [0, {}] at h = {}: identity residual over t ≥ 1 is {:.3e}",
        grid.horizon(),
        grid.h(),
        dec.key1_residual
    );

    if let Some(dir) = &args.common.out {
        let t: Vec<f64> = grid.nodes().collect();
        write_csv(
            &dir.join("decompose.csv"),
            &["t", "f", "f1", "f2", "f3"],
            &[
                &t,
                dec.f.values(),
                dec.f1.values(),
                dec.f2.values(),
                dec.f3.values(),
            ],
        )?;
        write_svg_chart(
            &dir.join("decompose.svg"),
            "forcing decomposition",
            &t,
            &[
                SvgSeries { label: "f", values: dec.f.values() },
                SvgSeries { label: "f1", values: dec.f1.values() },
                SvgSeries { label: "f3", values: dec.f3.values() },
            ],
        )?;
        #[derive(serde::Serialize)]
        struct Summary {
            h: f64,
            horizon: f64,
            key1_residual: f64,
        }
        write_json(
            &dir.join("summary.json"),
            &Summary { h: grid.h(), horizon: grid.horizon(), key1_residual: dec.key1_residual },
        )?;
    }
    Ok(0)
}

fn cmd_norms(args: NormsArgs) -> Result<u8> {
    let mut job: NormsJob = config::load(&args.config)?;
    apply_grid_overrides(&mut job.grid, &args.common);
    if let Some(p) = args.p {
        job.p = p;
    }
    let forcing = job.forcing.build()?;
    let grid = job.grid.build()?;
    let theta_grid = job.theta_grid();
    let thresholds = job.thresholds();
    warn_if_unresolved(&forcing, grid);

    let report = condition_a_report(&forcing, job.p, grid, &theta_grid, &thresholds)?;
    println!(
        "window averages on [0, {}] at h = {}, p = {}:",
        grid.horizon(),
        grid.h(),
        job.p
    );
    println!("{:>8}  {:>14}  {:>14}  {:>10}", "theta", "phi_halfT", "phi_T", "ratio");
    for (i, &theta) in report.theta_grid.iter().enumerate() {
        println!(
            "{:>8.4}  {:>14.6e}  {:>14.6e}  {:>10.4}",
            theta, report.phi_half[i], report.phi[i], report.half_horizon_ratio[i]
        );
    }
    println!(
        "sup_phi = {:.6e}, classification: {}",
        report.sup_phi, report.classification
    );

    if let Some(dir) = &args.common.out {
        write_csv(
            &dir.join("norms.csv"),
            &["theta", "phi_halfT", "phi_T", "ratio"],
            &[
                &report.theta_grid,
                &report.phi_half,
                &report.phi,
                &report.half_horizon_ratio,
            ],
        )?;
        write_json(&dir.join("summary.json"), &report)?;
    }

    Ok(match report.classification {
        Membership::Finite | Membership::Infinite => 0,
        Membership::Inconclusive => 2,
    })
}

fn cmd_theorem_check(args: CaseArgs) -> Result<u8> {
    let mut case: CaseConfig = config::load(&args.config)?;
    apply_grid_overrides(&mut case.grid, &args.common);
    if let Some(p) = args.p {
        case.p = p;
    }
    let spec = CaseSpec::from_config(&case)?;
    warn_if_unresolved(&spec.forcing, spec.grid);

    let output = run_case(&spec)?;
    print_case_line(&output.result.name, &output.result);
    for note in &output.result.notes {
        println!("  note: {note}");
    }
    if let Some(dir) = &args.common.out {
        write_case_artifacts(dir, &output)?;
    }
    Ok(verdict_exit(output.result.verdict))
}

fn cmd_suite(args: SuiteArgs) -> Result<u8> {
    let mut specs = match &args.config {
        Some(path) => {
            let job: SuiteJob = config::load(path)?;
            job.cases
                .iter()
                .map(CaseSpec::from_config)
                .collect::<Result<Vec<_>>>()?
        }
        None => shipped_suite(),
    };
    for spec in &mut specs {
        if let Some(h) = args.common.h {
            spec.grid = Grid::new(h, spec.grid.horizon())?;
        }
        if let Some(t) = args.common.t_end {
            spec.grid = Grid::new(spec.grid.h(), t)?;
        }
        if let Some(p) = args.p {
            spec.p = p;
        }
        warn_if_unresolved(&spec.forcing, spec.grid);
    }

    let summary = run_suite(&specs, args.common.out.as_deref())?;
    println!(
        "{:<40} {:>12} {:>12} {:>14}",
        "case", "side A", "side B", "verdict"
    );
    for r in &summary.results {
        print_case_line(&r.name, r);
    }
    println!(
        "suite: {} pass, {} fail, {} inconclusive ({} expected) out of {}",
        summary.n_pass,
        summary.n_fail,
        summary.n_expected_inconclusive + summary.n_unexpected_inconclusive,
        summary.n_expected_inconclusive,
        summary.n_cases
    );
    Ok(summary.exit_code() as u8)
}

fn print_case_line(name: &str, r: &volterra_lab::harness::CaseResult) {
    let side_a = r
        .observed_a
        .map_or_else(|| "—".to_string(), |m| m.to_string());
    let side_b = match r.observed_b_case {
        Some(m) => m.to_string(),
        None if r.observed_b.is_empty() => "—".to_string(),
        None => "conflict".to_string(),
    };
    println!("{:<40} {:>12} {:>12} {:>14}", name, side_a, side_b, r.verdict.to_string());
}

fn verdict_exit(verdict: CaseVerdict) -> u8 {
    match verdict {
        CaseVerdict::Pass => 0,
        CaseVerdict::Fail => 1,
        CaseVerdict::Inconclusive => 2,
    }
}
