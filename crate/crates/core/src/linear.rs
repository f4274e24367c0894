//! Galerkin solution of the source problem `−Δu + Vu = f` and the
//! low/high-frequency tail bounds behind its strip regularity.

use num_complex::Complex64;
use serde::Serialize;

use crate::eigen::{assemble_hn, check_real_potential};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::format;
use crate::fourier::{self, project, FourierSeries1D};
use crate::linalg;

/// Slack on the sampled condition `V ≥ 1`, absorbing rounding in the grid
/// evaluation of exactly constant potentials.
const POSITIVITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearSolveResult {
    #[serde(skip)]
    pub solution: FourierSeries1D,
    /// `‖Π_N(−Δu_N + V u_N − f)‖_{L²}`.
    pub residual_l2: f64,
    /// Lowest eigenvalue of `H_N`, standing in for the coercivity constant.
    pub alpha_lower_bound: f64,
}

/// Checks `V ≥ 1` on `4N+1` equispaced points.
fn check_potential_bound(v: &FourierSeries1D, n: usize) -> Result<()> {
    let m = 4 * n.max(v.cutoff()) + 1;
    let (j, min) = v
        .to_grid(m)
        .iter()
        .map(|z| z.re)
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("grid is nonempty");
    if min < 1.0 - POSITIVITY_SLACK {
        return Err(Error::PreconditionViolated(format!(
            "V must be at least 1, but V(2π·{j}/{m}) = {min}"
        )));
    }
    Ok(())
}

/// Solves the `(2N+1)`-dimensional Galerkin system `H_N û = Π_N f̂` by
/// Cholesky factorization.
pub fn solve_linear(v: &FourierSeries1D, f: &FourierSeries1D, n: usize) -> Result<LinearSolveResult> {
    check_real_potential(v)?;
    check_potential_bound(v, n)?;
    let h = assemble_hn(v, n);
    let rhs = f.resize(n);
    let x = linalg::solve_hpd(h.entries(), rhs.coeffs())?;
    let hx = linalg::matvec(h.entries(), &x);
    let residual_l2 = hx
        .iter()
        .zip(rhs.coeffs())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let alpha_lower_bound = linalg::eigh(h.entries()).values[0];
    Ok(LinearSolveResult {
        solution: FourierSeries1D::new(n, x).expect("dimension matches"),
        residual_l2,
        alpha_lower_bound,
    })
}

/// Both sides of the split-tail estimates
/// `‖u₁‖_A ≤ ‖u‖_{L²} √(w_A(N))` and
/// `‖u₂‖_A ≤ (‖f₂‖_A + ‖V₂₁u₁‖_A)/(N² − ‖V‖)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct TailBoundReport {
    pub N_split: usize,
    pub N_solve: usize,
    pub a: f64,
    pub u1_norm_A: f64,
    pub u2_norm_A: f64,
    pub u1_bound: f64,
    pub u2_bound: f64,
    pub v_opnorm: f64,
    pub u1_holds: bool,
    pub u2_holds: bool,
}

impl TailBoundReport {
    pub fn holds(&self) -> bool {
        self.u1_holds && self.u2_holds
    }
}

/// High-frequency part `(I − Π_N) u`.
fn high_part(u: &FourierSeries1D, n: usize) -> FourierSeries1D {
    let n = n as i64;
    FourierSeries1D::from_fn(u.cutoff(), |k| {
        if k.abs() > n {
            u.coeff(k)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Solves at `N_solve`, splits the solution at `N_split` and evaluates both
/// tail estimates with the sup-norm surrogate for `‖V‖_{𝓛(𝓗_A)}`.
#[allow(non_snake_case)]
pub fn tail_bound_check(
    v: &FourierSeries1D,
    f: &FourierSeries1D,
    N_solve: usize,
    N_split: usize,
    a: f64,
) -> Result<TailBoundReport> {
    let v_opnorm = fourier::op_norm_bound(v, a, fourier::default_sup_grid(v.cutoff()))?;
    if ((N_split * N_split) as f64) <= v_opnorm {
        let needed = v_opnorm.sqrt().floor() as usize + 1;
        return Err(Error::PreconditionViolated(format!(
            "Neumann series needs N_split² > ‖V‖ = {v_opnorm}; N_split = {N_split} is too small, use N_split ≥ {needed}"
        )));
    }
    if N_split >= N_solve {
        return Err(Error::invalid(format!(
            "N_split = {N_split} must be below N_solve = {N_solve}"
        )));
    }
    let u = solve_linear(v, f, N_solve)?.solution;
    let u1 = project(&u, N_split);
    let u2 = high_part(&u, N_split);
    let f2 = high_part(&f.resize(N_solve), N_split);
    let vu1 = fourier::multiply(v, &u1, N_solve);
    let v21u1 = high_part(&vu1, N_split);

    let u1_norm_A = fourier::norm_a(&u1, a)?;
    let u2_norm_A = fourier::norm_a(&u2, a)?;
    let u1_bound = u.l2_norm() * fourier::weight(a, N_split as i64)?.sqrt();
    let u2_bound = (fourier::norm_a(&f2, a)? + fourier::norm_a(&v21u1, a)?) / ((N_split * N_split) as f64 - v_opnorm);
    Ok(TailBoundReport {
        N_split,
        N_solve,
        a,
        u1_norm_A,
        u2_norm_A,
        u1_bound,
        u2_bound,
        v_opnorm,
        u1_holds: u1_norm_A <= u1_bound,
        u2_holds: u2_norm_A <= u2_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearConvergenceRow {
    pub n: usize,
    pub residual_l2: f64,
    pub err_vs_ref_l2: f64,
    pub err_vs_ref_h1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearConvergenceTable {
    pub n_ref: usize,
    pub rows: Vec<LinearConvergenceRow>,
}

impl LinearConvergenceTable {
    pub fn to_csv(&self) -> String {
        let rows: Vec<Vec<f64>> = self
            .rows
            .iter()
            .map(|r| vec![r.n as f64, r.residual_l2, r.err_vs_ref_l2, r.err_vs_ref_h1])
            .collect();
        format::csv(&["N", "residual_l2", "err_vs_ref_l2", "err_vs_ref_h1"], &rows)
    }
}

/// Galerkin solutions at each `N` compared against the solution at `n_ref`.
pub fn linear_convergence(
    v: &FourierSeries1D,
    f: &FourierSeries1D,
    n_list: &[usize],
    n_ref: usize,
    exec: Execution,
) -> Result<LinearConvergenceTable> {
    if n_list.iter().any(|&n| n > n_ref) {
        return Err(Error::invalid("every N must be at most N_ref"));
    }
    let reference = solve_linear(v, f, n_ref)?.solution;
    let rows = exec.try_map(n_list, |&n| -> Result<LinearConvergenceRow> {
        let r = solve_linear(v, f, n)?;
        let diff = &r.solution.resize(n_ref) - &reference;
        Ok(LinearConvergenceRow {
            n,
            residual_l2: r.residual_l2,
            err_vs_ref_l2: diff.l2_norm(),
            err_vs_ref_h1: diff.h1_norm(),
        })
    })?;
    Ok(LinearConvergenceTable { n_ref, rows })
}
