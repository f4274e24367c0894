//! One function per subcommand: load inputs, run the study, write artifacts.

use std::path::Path;

use planewave::{bloch, blowup, eigen, fourier, linear, nonlinear, Execution};
use serde::Serialize;

use crate::config::*;
use crate::error::CliError;
use crate::output::ArtifactWriter;

pub struct Context<'a> {
    /// Directory that relative paths inside the config resolve against.
    pub base: &'a Path,
    pub exec: Execution,
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct LinsolveSummary {
    N: usize,
    residual_l2: f64,
    alpha_lower_bound: f64,
    solution_l2: f64,
    solution_h1: f64,
}

pub fn linsolve(cfg: &LinsolveConfig, ctx: &Context, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let v = cfg.potential.to_1d(ctx.base)?;
    let f = cfg.source.to_1d(ctx.base)?;
    let r = linear::solve_linear(&v, &f, cfg.N)?;
    out.write_json(
        "linsolve.json",
        &LinsolveSummary {
            N: cfg.N,
            residual_l2: r.residual_l2,
            alpha_lower_bound: r.alpha_lower_bound,
            solution_l2: r.solution.l2_norm(),
            solution_h1: r.solution.h1_norm(),
        },
    )?;
    out.write("solution.json", &(r.solution.to_json() + "\n"))?;
    if let (Some(n_ref), false) = (cfg.N_ref, cfg.N_list.is_empty()) {
        let t = linear::linear_convergence(&v, &f, &cfg.N_list, n_ref, ctx.exec)?;
        out.write("linsolve_convergence.csv", &t.to_csv())?;
    }
    if let Some(tail) = &cfg.tail {
        let t = linear::tail_bound_check(&v, &f, cfg.N, tail.N_split, tail.A)?;
        out.write_json("tail_bound.json", &t)?;
    }
    Ok(())
}

pub fn eig_convergence(cfg: &EigConvergenceConfig, ctx: &Context, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let v = cfg.potential.to_1d(ctx.base)?;
    let opts = eigen::ConvergenceOptions {
        cluster_gap: cfg.cluster_gap,
        cluster_mode: cfg.cluster_mode,
        precision: cfg.precision,
        execution: ctx.exec,
    };
    let t = eigen::convergence_study(&v, &cfg.N_list, cfg.N_ref, cfg.j, cfg.A_claim, opts)?;
    out.write("eig_convergence.csv", &t.to_csv())?;
    out.write("eig_convergence.json", &(t.sidecar_json() + "\n"))
}

pub fn gp_solve(cfg: &GpSolveConfig, ctx: &Context, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let solve = |eps: f64| -> Result<(nonlinear::GpSolveResult, Option<fourier::AnalyticityEstimate>), CliError> {
        let r = nonlinear::solve_gp(eps, cfg.mu, cfg.N, cfg.tol)?;
        let est = nonlinear::estimate_b_eps(&r, cfg.noise_floor).ok();
        Ok((r, est))
    };
    let (r, est) = solve(cfg.epsilon)?;
    out.write_json("gp_report.json", &nonlinear::GpReport::new(&r, est.as_ref()))?;
    out.write("gp_solution.json", &(r.solution.to_json() + "\n"))?;
    out.write("gp_decay.csv", &r.solution.decay_csv())?;
    let history: Vec<Vec<f64>> = r
        .residual_history
        .iter()
        .enumerate()
        .map(|(i, &x)| vec![i as f64, x])
        .collect();
    out.write(
        "gp_newton.csv",
        &planewave::format::csv(&["iteration", "residual_l2"], &history),
    )?;
    if !cfg.epsilon_scan.is_empty() {
        let rows = ctx
            .exec
            .try_map(&cfg.epsilon_scan, |&eps| -> Result<Vec<f64>, CliError> {
                let (r, est) = solve(eps)?;
                Ok(vec![
                    eps,
                    est.map_or(f64::NAN, |e| e.half_width),
                    r.u_prime_at_zero,
                    r.newton_iters as f64,
                    r.residual_l2,
                ])
            })?;
        out.write(
            "gp_scan.csv",
            &planewave::format::csv(
                &["epsilon", "B_eps", "u_prime_at_zero", "newton_iters", "residual_l2"],
                &rows,
            ),
        )?;
    }
    Ok(())
}

pub fn strip_estimate(cfg: &StripEstimateConfig, ctx: &Context, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let u = cfg.potential.to_1d(ctx.base)?;
    let est = fourier::strip_estimate_with(
        &u,
        fourier::StripFitOptions {
            noise_floor: cfg.noise_floor,
            stride: cfg.stride,
        },
    )?;
    out.write_json("strip_estimate.json", &est)?;
    out.write("decay.csv", &u.decay_csv())
}

pub fn blowup(cfg: &BlowupCliConfig, _ctx: &Context, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let (report, traj) = blowup::blowup_study(&cfg.core())?;
    out.write_json("blowup_report.json", &report)?;
    out.write("trajectory.csv", &traj.to_csv(Some((cfg.eta, report.y_eta))))?;
    if cfg.boundary_samples > 0 {
        out.write(
            "x_mu_boundary.csv",
            &blowup::x_mu_boundary_csv(cfg.mu, report.Y_eps_eta, cfg.boundary_samples),
        )?;
    }
    Ok(())
}

pub fn bands(cfg: &BandsConfig, ctx: &Context, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let v = cfg.potential.to_lattice_with_base(ctx.base)?;
    let d = v.lattice.dim();
    require(
        cfg.k_path.iter().all(|k| k.len() == d),
        "k_path points match the lattice dimension",
    )?;
    let path = bloch::k_path(&cfg.k_path, cfg.per_segment);
    let bs = bloch::band_structure(&v, &path, cfg.N, cfg.n_bands, ctx.exec)?;
    out.write("bands.csv", &bs.to_csv())
}

pub fn bz_convergence(cfg: &BzConvergenceConfig, ctx: &Context, out: &mut ArtifactWriter) -> Result<(), CliError> {
    let v = cfg.potential.to_lattice_with_base(ctx.base)?;
    let ks = match (&cfg.k_samples, &cfg.mp_grid) {
        (Some(k), _) => k.clone(),
        (None, Some(q)) => bloch::monkhorst_pack(&v.lattice, q)?,
        (None, None) => unreachable!("validated"),
    };
    let t = bloch::bz_convergence(&v, &ks, &cfg.N_list, cfg.N_ref, cfg.band, cfg.A_claim, ctx.exec)?;
    out.write("bz_convergence.csv", &t.to_csv())?;
    out.write("bz_convergence.json", &(t.sidecar_json() + "\n"))
}
