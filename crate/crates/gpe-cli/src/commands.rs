//! The solve, compare-init and convergence-study commands.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use gpe::field::{self, Field};
use gpe::gradient::gradient_descent;
use gpe::init::initial_state;
use gpe::newton::{cascadic_solve, newton_solve};
use gpe::observables::second_order_probe;
use gpe::problem::{DiscreteProblem, StateVector};
use gpe::report::SolveReport;
use gpe::{BoundaryKind, Domain, Error, Flavor, Grid, InitKind, Result};

use crate::config::{Method, RunConfig};

/// Everything a command needs besides the configuration.
pub struct CommandContext {
    pub out: PathBuf,
    pub trace: bool,
}

fn build_real(cfg: &RunConfig) -> impl Fn(&Grid) -> Result<DiscreteProblem<f64>> + '_ {
    move |g: &Grid| match cfg.flavor {
        Flavor::FiniteDifference => {
            DiscreteProblem::finite_difference(g.clone(), cfg.potential.clone(), cfg.beta)
        }
        Flavor::SineSpectral => {
            DiscreteProblem::sine_spectral(g.clone(), cfg.potential.clone(), cfg.beta)
        }
        Flavor::FourierSpectral => unreachable!("fp dispatches to the complex path"),
    }
}

fn build_complex(cfg: &RunConfig) -> impl Fn(&Grid) -> Result<DiscreteProblem<Complex64>> + '_ {
    move |g: &Grid| {
        DiscreteProblem::fourier_spectral(g.clone(), cfg.potential.clone(), cfg.beta, cfg.omega)
    }
}

/// Runs the configured solver; for cascadic solves the configured grid is
/// the coarsest level.
fn run_solver<T: Field>(
    cfg: &RunConfig,
    init: &InitKind,
    build: &dyn Fn(&Grid) -> Result<DiscreteProblem<T>>,
) -> Result<(StateVector<T>, SolveReport, DiscreteProblem<T>)> {
    let coarse = cfg.grid()?;
    let p0 = build(&coarse)?;
    let x0 = initial_state(init, &p0)?;
    match cfg.method {
        Method::Gradient => {
            let (x, rep) = gradient_descent(&p0, &x0, &cfg.grad)?;
            Ok((x, rep, p0))
        }
        Method::Newton => {
            let (x, rep) = newton_solve(&p0, &x0, &cfg.newton)?;
            Ok((x, rep, p0))
        }
        Method::Cascadic => {
            let (x, rep) = cascadic_solve(build, coarse.clone(), cfg.levels, &x0, &cfg.newton)?;
            let mut finest = coarse;
            for _ in 1..cfg.levels {
                finest = finest.refine();
            }
            Ok((x, rep, build(&finest)?))
        }
    }
}

fn result_lines<T: Field>(
    cfg: &RunConfig,
    p: &DiscreteProblem<T>,
    x: &StateVector<T>,
    rep: &SolveReport,
) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    let axes = ["x", "y", "z"];
    out.push(("result.energy".into(), fmt_res(rep.energy)));
    out.push((
        "result.chemical_potential".into(),
        fmt_res(rep.chemical_potential),
    ));
    for (a, &r) in rep.rms.iter().enumerate() {
        out.push((format!("result.rms.{}", axes[a]), fmt_res(r)));
    }
    out.push(("result.max_density".into(), fmt_res(rep.max_density)));
    out.push(("result.residual_norm".into(), fmt_res(rep.residual_norm)));
    out.push(("result.theta".into(), fmt_res(rep.theta)));
    out.push(("result.iterations".into(), rep.iterations.to_string()));
    out.push(("result.nfe".into(), rep.nfe.to_string()));
    out.push(("result.converged".into(), rep.converged.to_string()));
    out.push((
        "result.rejected_steps".into(),
        rep.rejected_steps.to_string(),
    ));
    for (l, lr) in rep.levels.iter().enumerate() {
        out.push((format!("result.level.{l}.energy"), fmt_res(lr.energy)));
        out.push((
            format!("result.level.{l}.iterations"),
            lr.iterations.to_string(),
        ));
        out.push((
            format!("result.level.{l}.converged"),
            lr.converged.to_string(),
        ));
    }
    if cfg.probe_directions > 0 {
        let probe = second_order_probe(p, x, cfg.probe_directions, cfg.seed)?;
        out.push(("result.probe.theta".into(), fmt_res(probe.theta)));
        out.push((
            "result.probe.min_curvature".into(),
            fmt_res(probe.min_curvature),
        ));
        out.push((
            "result.probe.directions".into(),
            probe.directions.to_string(),
        ));
        out.push(("result.probe.seed".into(), probe.seed.to_string()));
    }
    Ok(out)
}

fn fmt_res(v: f64) -> String {
    format!("{v:.12e}")
}

fn write_report(
    path: &Path,
    cfg: &RunConfig,
    results: &[(String, String)],
) -> Result<()> {
    let mut text = String::from("# gpe report: effective configuration and results\n");
    for (k, v) in cfg.echo() {
        let _ = writeln!(text, "{k} = {v}");
    }
    for (k, v) in results {
        let _ = writeln!(text, "{k} = {v}");
    }
    fs::write(path, text)?;
    Ok(())
}

fn write_trace(path: &Path, rep: &SolveReport) -> Result<()> {
    let mut text = String::from("level,iteration,energy,residual,step,ratio,accepted\n");
    for r in &rep.trace {
        let ratio = r.ratio.map_or_else(|| "nan".into(), fmt_res);
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{}",
            r.level,
            r.iteration,
            fmt_res(r.energy),
            fmt_res(r.residual),
            fmt_res(r.step),
            ratio,
            r.accepted
        );
    }
    fs::write(path, text)?;
    Ok(())
}

/// `solve` / `refine`: one ground- or excited-state computation with a
/// report, a binary state file and an optional iteration trace.
pub fn solve(cfg: &RunConfig, ctx: &CommandContext) -> Result<bool> {
    fs::create_dir_all(&ctx.out)?;
    let (results, report) = match cfg.flavor {
        Flavor::FourierSpectral => {
            let build = build_complex(cfg);
            let (x, rep, p) = run_solver(cfg, &cfg.init, &build)?;
            gpe::io::write_state(&ctx.out.join("state.grid"), p.grid(), x.as_slice())?;
            (result_lines(cfg, &p, &x, &rep)?, rep)
        }
        _ => {
            let build = build_real(cfg);
            let (x, rep, p) = run_solver(cfg, &cfg.init, &build)?;
            gpe::io::write_state(&ctx.out.join("state.grid"), p.grid(), x.as_slice())?;
            (result_lines(cfg, &p, &x, &rep)?, rep)
        }
    };
    write_report(&ctx.out.join("report.txt"), cfg, &results)?;
    if ctx.trace {
        write_trace(&ctx.out.join("trace.txt"), &report)?;
    }
    println!(
        "energy = {:.10}, mu = {:.10}, iterations = {}, nfe = {}, converged = {}, wall = {:.3}s",
        report.energy,
        report.chemical_potential,
        report.iterations,
        report.nfe,
        report.converged,
        report.wall_seconds
    );
    Ok(report.converged)
}

/// `compare-init`: solve the same rotating problem from several initial
/// states and flag the lowest energy reached.
pub fn compare_init(cfg: &RunConfig, ctx: &CommandContext) -> Result<bool> {
    if cfg.flavor != Flavor::FourierSpectral {
        return Err(Error::Config(
            "compare-init expects a rotating problem (problem.flavor = fp)".into(),
        ));
    }
    if cfg.compare_kinds.is_empty() {
        return Err(Error::Config(
            "compare-init needs compare.kinds = <list of init tags>".into(),
        ));
    }
    fs::create_dir_all(&ctx.out)?;
    let build = build_complex(cfg);
    let mut rows: Vec<(String, SolveReport)> = Vec::new();
    for kind in &cfg.compare_kinds {
        let (_, rep, _) = run_solver(cfg, kind, &build)?;
        println!(
            "init {}: energy = {:.10}, iterations = {}, converged = {}",
            kind.tag(),
            rep.energy,
            rep.iterations,
            rep.converged
        );
        rows.push((kind.tag().to_string(), rep));
    }
    let best = rows
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.energy.total_cmp(&b.1 .1.energy))
        .map(|(i, _)| i)
        .expect("non-empty rows");
    let mut text = String::from("kind,energy,chemical_potential,iterations,nfe,converged,best\n");
    for (i, (tag, rep)) in rows.iter().enumerate() {
        let _ = writeln!(
            text,
            "{tag},{},{},{},{},{},{}",
            fmt_res(rep.energy),
            fmt_res(rep.chemical_potential),
            rep.iterations,
            rep.nfe,
            rep.converged,
            u8::from(i == best)
        );
    }
    fs::write(ctx.out.join("compare.csv"), text)?;
    Ok(rows.iter().all(|(_, rep)| rep.converged))
}

/// `convergence-study`: errors of a flavor on a nested mesh family
/// against a sine-pseudospectral reference on the finest mesh.
pub fn convergence_study(cfg: &RunConfig, ctx: &CommandContext) -> Result<bool> {
    if cfg.flavor == Flavor::FourierSpectral {
        return Err(Error::Config(
            "convergence-study covers the Dirichlet flavors (fd | sp)".into(),
        ));
    }
    if cfg.study_meshes.is_empty() {
        return Err(Error::Config(
            "convergence-study needs study.meshes = <interval counts>".into(),
        ));
    }
    let reference = cfg.study_reference.ok_or_else(|| {
        Error::Config("convergence-study needs study.reference = <interval count>".into())
    })?;
    for w in cfg.study_meshes.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Config(
                "study.meshes must be strictly increasing".into(),
            ));
        }
    }
    if let Some(bad) = cfg
        .study_meshes
        .iter()
        .find(|&&m| reference % m != 0 || m > reference)
    {
        return Err(Error::Config(format!(
            "mesh {bad} is not nested in the reference mesh {reference}"
        )));
    }
    fs::create_dir_all(&ctx.out)?;

    let dim = cfg.dim();
    let domain = Domain::new(&cfg.bounds, BoundaryKind::Dirichlet)?;
    // tight tolerances drive these solves to the floating-point floor of
    // the energy; stopping there is exactly what a reference run wants
    let mut grad = cfg.grad.clone();
    grad.fail_on_search_exhaustion = false;
    let solve_real = |flavor: Flavor, n: usize| -> Result<(Vec<f64>, SolveReport, Grid)> {
        let grid = Grid::build(domain.clone(), &vec![n; dim])?;
        let p = match flavor {
            Flavor::FiniteDifference => {
                DiscreteProblem::finite_difference(grid.clone(), cfg.potential.clone(), cfg.beta)?
            }
            _ => DiscreteProblem::sine_spectral(grid.clone(), cfg.potential.clone(), cfg.beta)?,
        };
        let x0 = initial_state(&cfg.init, &p)?;
        let (x, rep) = gradient_descent(&p, &x0, &grad)?;
        Ok((p.from_unified(&x), rep, grid))
    };

    let (phi_ref, ref_rep, _) = solve_real(Flavor::SineSpectral, reference)?;
    // a run that stopped at the arithmetic floor is a valid study point;
    // only an exhausted iteration budget counts as nonconvergence here
    let ok = |rep: &SolveReport| rep.stop != gpe::StopReason::IterationCap;
    let mut all_converged = ok(&ref_rep);
    let mut text =
        String::from("mesh,h,state_error,energy_error,mu_error,energy_order\n");
    let mut prev_energy_error: Option<f64> = None;
    for &m in &cfg.study_meshes {
        let (phi_m, rep, grid) = solve_real(cfg.flavor, m)?;
        all_converged &= ok(&rep);
        let state_error = shared_node_error(&phi_ref, reference, &phi_m, m, dim);
        let energy_error = (rep.energy - ref_rep.energy).abs();
        let mu_error = (rep.chemical_potential - ref_rep.chemical_potential).abs();
        let order = prev_energy_error
            .map(|p| (p / energy_error).log2())
            .unwrap_or(f64::NAN);
        prev_energy_error = Some(energy_error);
        let _ = writeln!(
            text,
            "{m},{},{},{},{},{}",
            fmt_res(grid.spacing(0)),
            fmt_res(state_error),
            fmt_res(energy_error),
            fmt_res(mu_error),
            fmt_res(order)
        );
        println!(
            "mesh {m}: |E - E_ref| = {energy_error:.3e}, max|phi - phi_ref| = {state_error:.3e}"
        );
    }
    fs::write(ctx.out.join("convergence.csv"), text)?;
    Ok(all_converged)
}

/// Max pointwise difference at shared nodes after sign alignment; the
/// coarse Dirichlet mesh embeds into the reference mesh node-for-node.
fn shared_node_error(
    phi_ref: &[f64],
    n_ref: usize,
    phi_m: &[f64],
    n_m: usize,
    dim: usize,
) -> f64 {
    let q = n_ref / n_m;
    let m_coarse = n_m - 1;
    let m_ref = n_ref - 1;
    let coarse_total: usize = (0..dim).map(|_| m_coarse).product();
    // gather the reference values at shared nodes
    let mut shared = vec![0.0; coarse_total];
    for flat in 0..coarse_total {
        let mut rem = flat;
        let mut ref_flat = 0;
        for _ in 0..dim {
            let j = rem % m_coarse + 1; // 1-based interior index
            rem /= m_coarse;
            ref_flat = ref_flat * m_ref + (j * q - 1);
        }
        // decode produced indices last-dimension-first; mirror in phi_m
        shared[flat] = phi_ref[ref_flat];
    }
    // the same flat decoding applies to the coarse array
    let mut coarse = vec![0.0; coarse_total];
    for flat in 0..coarse_total {
        let mut rem = flat;
        let mut c_flat = 0;
        for _ in 0..dim {
            let j = rem % m_coarse;
            rem /= m_coarse;
            c_flat = c_flat * m_coarse + j;
        }
        coarse[flat] = phi_m[c_flat];
    }
    // sign alignment: the minimizer is unique only up to a global sign
    let s: f64 = field::re_dot(&shared, &coarse);
    let sign = if s < 0.0 { -1.0 } else { 1.0 };
    shared
        .iter()
        .zip(&coarse)
        .map(|(&r, &c)| (r - sign * c).abs())
        .fold(0.0, f64::max)
}
