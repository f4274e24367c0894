//! The cubic problem `−εΔu + u + u³ = μ sin x`: its closed-form `ε = 0`
//! limit with explicit branch conventions, a Newton–Galerkin solver for
//! `ε > 0`, and strip-width estimation of the solution.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{self, AnalyticityEstimate, FourierSeries1D, StripFitOptions, INV_SQRT_2PI};
use crate::linalg::{self, CMatrix};
use crate::potential;

/// Distance to a branch point below which Cardano values are flagged.
pub const BRANCH_POINT_TOL: f64 = 1e-8;

/// Default Newton iteration cap.
pub const MAX_NEWTON_ITERS: usize = 50;

/// `R = −(4 + 27 (μ sin z)²)`.
pub fn discriminant(mu: f64, z: Complex64) -> Complex64 {
    let f = z.sin() * mu;
    -(f * f * 27.0 + 4.0)
}

/// `B₀ = arcsinh(μ⁻¹ √(4/27))`: the branch points of the `ε = 0` solution
/// nearest the real axis are `±iB₀`.
pub fn branch_half_width(mu: f64) -> f64 {
    ((4.0f64 / 27.0).sqrt() / mu).asinh()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum SqrtCut {
    /// Principal square root.
    #[default]
    NegativeReal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum CbrtCut {
    /// Principal cube root for `Re w ≥ 0`, `−∛(−w)` for `Re w < 0`.
    #[default]
    ImaginaryAxis,
}

/// Branch conventions of the Cardano formula. Both cuts are fixed; the type
/// exists so that every evaluation names the conventions it uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CardanoBranchConfig {
    pub sqrt_cut: SqrtCut,
    pub cbrt_cut: CbrtCut,
}

impl CardanoBranchConfig {
    pub fn sqrt(&self, w: Complex64) -> Complex64 {
        match self.sqrt_cut {
            SqrtCut::NegativeReal => w.sqrt(),
        }
    }

    /// Real on ℝ and analytic off `iℝ`.
    pub fn cbrt(&self, w: Complex64) -> Complex64 {
        match self.cbrt_cut {
            CbrtCut::ImaginaryAxis => {
                if w.re >= 0.0 {
                    w.cbrt()
                } else {
                    -(-w).cbrt()
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CardanoValue {
    pub value: Complex64,
    /// Within [`BRANCH_POINT_TOL`] of a zero of `R`.
    pub near_branch_point: bool,
    /// A root argument lies exactly on its cut, where the formula is not
    /// continuous and need not solve the cubic.
    pub on_branch_cut: bool,
}

/// `u₀ = ∛(½(f + √(−R/27))) + ∛(½(f − √(−R/27)))` with `f = μ sin z`.
pub fn cardano_u0(mu: f64, z: Complex64, branches: CardanoBranchConfig) -> CardanoValue {
    let f = z.sin() * mu;
    let arg = -discriminant(mu, z) / 27.0;
    let s = branches.sqrt(arg);
    let w1 = (f + s) * 0.5;
    let w2 = (f - s) * 0.5;
    let value = branches.cbrt(w1) + branches.cbrt(w2);
    let on_cbrt_cut = |w: Complex64| w.re == 0.0 && w.im != 0.0;
    let on_branch_cut = (arg.im == 0.0 && arg.re < 0.0) || on_cbrt_cut(w1) || on_cbrt_cut(w2);
    CardanoValue {
        value,
        near_branch_point: near_branch_point(mu, z),
        on_branch_cut,
    }
}

/// Zeros of `R` are `mπ ± iB₀`.
fn near_branch_point(mu: f64, z: Complex64) -> bool {
    if mu == 0.0 {
        return false;
    }
    let b0 = branch_half_width(mu.abs());
    let m = (z.re / std::f64::consts::PI).round();
    let dx = z.re - m * std::f64::consts::PI;
    [b0, -b0]
        .iter()
        .any(|&y| Complex64::new(dx, z.im - y).norm() < BRANCH_POINT_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpOptions {
    pub max_iters: usize,
    /// Retry by ε-continuation when Newton from the Cardano guess fails.
    pub continuation: bool,
}

impl Default for GpOptions {
    fn default() -> Self {
        Self {
            max_iters: MAX_NEWTON_ITERS,
            continuation: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GpSolveResult {
    pub epsilon: f64,
    pub mu: f64,
    #[serde(skip)]
    pub solution: FourierSeries1D,
    pub newton_iters: usize,
    pub residual_l2: f64,
    /// `u'_ε(0)`, real for the real odd solution.
    pub u_prime_at_zero: f64,
    /// Residual norms, starting with the initial guess.
    pub residual_history: Vec<f64>,
    pub used_continuation: bool,
}

impl GpSolveResult {
    /// `max r_{n+1}/r_n²` over the last three Newton steps, or `None` with
    /// fewer than three steps.
    pub fn quadratic_constant(&self) -> Option<f64> {
        let h = &self.residual_history;
        if h.len() < 4 {
            return None;
        }
        h[h.len() - 4..]
            .windows(2)
            .map(|w| if w[0] == 0.0 { 0.0 } else { w[1] / (w[0] * w[0]) })
            .reduce(f64::max)
    }
}

/// `Π_N(−εΔu + u + u³ − f)` and the factor `u²` at cutoff `2N`.
fn gp_residual(eps: f64, u: &FourierSeries1D, f: &FourierSeries1D) -> (FourierSeries1D, FourierSeries1D) {
    let n = u.cutoff();
    let u2 = fourier::multiply(u, u, 2 * n);
    let u3 = fourier::multiply(&u2, u, n);
    let r = FourierSeries1D::from_fn(n, |k| {
        u.coeff(k) * (eps * (k * k) as f64 + 1.0) + u3.coeff(k) - f.coeff(k)
    });
    (r, u2)
}

/// `(εk² + 1) δ_{kk'} + 3 (2π)^{-1/2} (u²)^_{k−k'}`.
fn gp_jacobian(eps: f64, u2: &FourierSeries1D, n: usize) -> CMatrix {
    let nn = n as i64;
    let dim = 2 * n + 1;
    CMatrix::from_fn(dim, dim, |i, j| {
        let k = i as i64 - nn;
        let kp = j as i64 - nn;
        let mut e = u2.coeff(k - kp) * (3.0 * INV_SQRT_2PI);
        if i == j {
            e += eps * (k * k) as f64 + 1.0;
        }
        e
    })
}

struct NewtonOutcome {
    u: FourierSeries1D,
    history: Vec<f64>,
    converged: bool,
}

fn newton(eps: f64, f: &FourierSeries1D, mut u: FourierSeries1D, tol: f64, max_iters: usize) -> NewtonOutcome {
    let n = u.cutoff();
    let mut history = Vec::new();
    for _ in 0..=max_iters {
        let (r, u2) = gp_residual(eps, &u, f);
        let rn = r.l2_norm();
        history.push(rn);
        if rn <= tol {
            return NewtonOutcome {
                u,
                history,
                converged: true,
            };
        }
        if !rn.is_finite() || history.len() > max_iters {
            break;
        }
        let jac = gp_jacobian(eps, &u2, n);
        let Ok(step) = linalg::solve_general(&jac, r.coeffs()) else {
            break;
        };
        let step = FourierSeries1D::new(n, step).expect("dimension matches");
        u = &u - &step;
    }
    NewtonOutcome {
        u,
        history,
        converged: false,
    }
}

/// `Π_N u₀` of the Cardano solution, from samples on `8N` real points.
pub fn cardano_guess(mu: f64, n: usize) -> FourierSeries1D {
    let m = 8 * n.max(1);
    let br = CardanoBranchConfig::default();
    let samples: Vec<Complex64> = (0..m)
        .map(|j| {
            let x = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            Complex64::new(cardano_u0(mu, Complex64::new(x, 0.0), br).value.re, 0.0)
        })
        .collect();
    FourierSeries1D::from_grid_samples(&samples, n).expect("enough samples")
}

/// Solves `Π_N(−εΔu + u + u³ − μ sin) = 0` by Newton's method from the
/// projected Cardano solution.
pub fn solve_gp(epsilon: f64, mu: f64, n: usize, tol: f64) -> Result<GpSolveResult> {
    solve_gp_with(epsilon, mu, n, tol, GpOptions::default())
}

pub fn solve_gp_with(epsilon: f64, mu: f64, n: usize, tol: f64, opts: GpOptions) -> Result<GpSolveResult> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    if !mu.is_finite() {
        return Err(Error::invalid("mu must be finite"));
    }
    if n < 16 {
        return Err(Error::invalid(format!("N must be at least 16, got {n}")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let f = potential::sine(mu).resize(n);
    let direct = newton(epsilon, &f, cardano_guess(mu, n), tol, opts.max_iters);
    let (out, used_continuation) = if direct.converged || !opts.continuation {
        (direct, false)
    } else {
        match continuation(epsilon, mu, &f, n, tol, opts.max_iters) {
            Some(o) => (o, true),
            None => (direct, false),
        }
    };
    if !out.converged {
        return Err(Error::NonConvergence {
            iterations: out.history.len().saturating_sub(1),
            history: out.history,
        });
    }
    let residual_l2 = *out.history.last().expect("nonempty");
    Ok(GpSolveResult {
        epsilon,
        mu,
        newton_iters: out.history.len() - 1,
        residual_l2,
        u_prime_at_zero: out.u.derivative_at(0.0).re,
        solution: out.u,
        residual_history: out.history,
        used_continuation,
    })
}

/// Halves ε from 1 down to the target, warm-starting each solve.
fn continuation(eps: f64, mu: f64, f: &FourierSeries1D, n: usize, tol: f64, max_iters: usize) -> Option<NewtonOutcome> {
    let mut schedule = Vec::new();
    let mut e = 1.0;
    while e > eps {
        schedule.push(e);
        e *= 0.5;
    }
    schedule.push(eps);
    let mut u = cardano_guess(mu, n);
    let mut last = None;
    for e in schedule {
        let o = newton(e, f, u, tol, max_iters);
        if !o.converged {
            return None;
        }
        u = o.u.clone();
        last = Some(o);
    }
    last
}

/// Strip half-width of a converged solution. Only odd wavenumbers of the
/// odd solution are nonzero, so the fit uses stride 2.
pub fn estimate_b_eps(result: &GpSolveResult, noise_floor: f64) -> Result<AnalyticityEstimate> {
    fourier::strip_estimate_with(
        &result.solution,
        StripFitOptions {
            noise_floor,
            stride: Some(2),
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct GpReport {
    pub epsilon: f64,
    pub mu: f64,
    pub N: usize,
    pub residual: f64,
    pub u_prime_at_zero: f64,
    pub B_eps_estimate: Option<f64>,
    pub newton_iters: usize,
}

impl GpReport {
    pub fn new(result: &GpSolveResult, estimate: Option<&AnalyticityEstimate>) -> Self {
        Self {
            epsilon: result.epsilon,
            mu: result.mu,
            N: result.solution.cutoff(),
            residual: result.residual_l2,
            u_prime_at_zero: result.u_prime_at_zero,
            B_eps_estimate: estimate.map(|e| e.half_width),
            newton_iters: result.newton_iters,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn discriminant_values() {
        assert_eq!(discriminant(3.0, c(0.0, 0.0)), c(-4.0, 0.0));
        let b0 = branch_half_width(10.0);
        assert!(discriminant(10.0, c(0.0, b0)).norm() < 1e-12);
        for j in 0..50 {
            let r = discriminant(2.0, c(0.13 * j as f64, 0.0));
            assert!(r.re < 0.0 && r.im == 0.0);
        }
    }

    #[test]
    fn branch_widths() {
        assert!((branch_half_width(10.0) - 0.0385).abs() < 5e-4);
        let expected = (2.0 * (4.0f64 / 27.0).sqrt()).asinh();
        assert_eq!(branch_half_width(0.5), expected);
    }

    #[test]
    fn cube_root_branch() {
        let br = CardanoBranchConfig::default();
        assert!((br.cbrt(c(-8.0, 0.0)) - c(-2.0, 0.0)).norm() < 1e-15);
        assert!((br.cbrt(c(27.0, 0.0)) - c(3.0, 0.0)).norm() < 1e-14);
        let w = c(-1.0, 0.5);
        let r = br.cbrt(w);
        assert!((r * r * r - w).norm() < 1e-14);
    }

    #[test]
    fn cardano_on_real_axis() {
        let br = CardanoBranchConfig::default();
        assert_eq!(cardano_u0(10.0, c(0.0, 0.0), br).value, c(0.0, 0.0));
        for mu in [0.5, 10.0] {
            for j in 0..256 {
                let x = 2.0 * std::f64::consts::PI * j as f64 / 256.0;
                let u = cardano_u0(mu, c(x, 0.0), br);
                assert!(u.value.im.abs() < 1e-14);
                assert!((u.value.powi(3) + u.value - mu * x.sin()).norm() < 1e-10);
                assert!(!u.on_branch_cut && !u.near_branch_point);
            }
        }
    }

    #[test]
    fn cardano_branch_point_limit() {
        let br = CardanoBranchConfig::default();
        let b0 = branch_half_width(10.0);
        let below = cardano_u0(10.0, c(0.0, b0 * (1.0 - 1e-10)), br);
        assert!(below.near_branch_point);
        assert!((below.value - c(0.0, 1.0 / 3f64.sqrt())).norm() < 1e-4);
        let f = c(0.0, b0).sin() * 10.0;
        assert!((f - c(0.0, (4.0f64 / 27.0).sqrt())).norm() < 1e-12);
        let above = cardano_u0(10.0, c(0.0, 2.0 * b0), br);
        assert!(above.on_branch_cut);
    }

    #[test]
    fn zero_forcing() {
        let r = solve_gp(0.3, 0.0, 16, 1e-12).unwrap();
        assert!(r.newton_iters <= 1);
        assert_eq!(r.solution.l2_norm(), 0.0);
    }

    #[test]
    fn gp_solution_structure() {
        let r = solve_gp(0.1, 0.5, 32, 1e-11).unwrap();
        assert!(r.residual_l2 <= 1e-11);
        let (odd, re) = r.solution.odd_real_defect();
        assert!(odd < 1e-12 && re < 1e-12);
        assert!(r.u_prime_at_zero > 0.0);
        assert!(!r.used_continuation);
    }

    #[test]
    fn gp_argument_checks() {
        assert!(solve_gp(0.0, 0.5, 32, 1e-11).is_err());
        assert!(solve_gp(0.1, 0.5, 8, 1e-11).is_err());
    }

    #[test]
    fn nonconvergence_carries_history() {
        let opts = GpOptions {
            max_iters: 1,
            continuation: false,
        };
        match solve_gp_with(0.1, 0.5, 32, 1e-14, opts) {
            Err(Error::NonConvergence { history, .. }) => assert_eq!(history.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn planted_odd_decay() {
        let u = FourierSeries1D::from_fn(40, |k| {
            if k % 2 == 0 {
                c(0.0, 0.0)
            } else {
                c(0.0, -(k.signum() as f64) * (-0.5 * k.abs() as f64).exp())
            }
        });
        let fake = GpSolveResult {
            epsilon: 1.0,
            mu: 1.0,
            solution: u,
            newton_iters: 0,
            residual_l2: 0.0,
            u_prime_at_zero: 0.0,
            residual_history: vec![0.0],
            used_continuation: false,
        };
        let e = estimate_b_eps(&fake, 1e-13).unwrap();
        assert!((e.half_width - 0.5).abs() < 1e-6);
        assert_eq!(e.stride, 2);
    }
}
