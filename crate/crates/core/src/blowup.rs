//! The nonlinear problem restricted to the imaginary axis: with
//! `u_ε(iy) = iψ(y)`, the function `ψ` solves
//! `εψ'' = μ sinh y − ψ + ψ³`, `ψ(0) = 0`, `ψ'(0) = u'_ε(0)`,
//! and explodes at a finite `Y_ε`. Comparison with the explicit solution
//! `ξ_{ε,η}` of `εφ'' = −φ + φ³` bounds `Y_ε` from above.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format;
use crate::nonlinear::{self, branch_half_width};
use crate::ode::{self, DenseStep, Dopri5Options, StopReason};

/// Default `|ψ|` at which the solution is declared exploded.
pub const DEFAULT_BLOWUP_THRESHOLD: f64 = 1e8;

/// Bracket width for the blow-up time.
pub const BLOWUP_BRACKET: f64 = 1e-8;

/// Tolerance for level crossings on the dense output.
pub const CROSSING_TOL: f64 = 1e-12;

/// Number of points sampled by [`verify_lower_bound`].
pub const LOWER_BOUND_SAMPLES: usize = 2000;

/// Samples per step when scanning dense output for sign changes.
const SCAN_POINTS: usize = 8;

type PlantedFn = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

#[derive(Clone)]
enum Interpolant {
    Dense(Vec<DenseStep<2>>),
    Planted(PlantedFn),
}

impl std::fmt::Debug for Interpolant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Interpolant::Dense(s) => write!(f, "Dense({} steps)", s.len()),
            Interpolant::Planted(_) => write!(f, "Planted"),
        }
    }
}

/// `(ψ, ψ')` on `[y_start, y_end]` with continuous output.
#[derive(Debug, Clone)]
pub struct OdeTrajectory {
    pub epsilon: f64,
    pub mu: f64,
    pub initial_slope: f64,
    /// Step end points of the integrator.
    pub nodes: Vec<f64>,
    pub psi: Vec<f64>,
    pub psi_prime: Vec<f64>,
    /// `Y_ε` when the threshold was reached.
    pub blowup_time: Option<f64>,
    pub blowup_threshold: f64,
    interp: Interpolant,
}

impl OdeTrajectory {
    pub fn y_start(&self) -> f64 {
        self.nodes[0]
    }

    pub fn y_end(&self) -> f64 {
        *self.nodes.last().expect("nonempty")
    }

    /// `(ψ(y), ψ'(y))`, clamped to the trajectory interval.
    pub fn eval(&self, y: f64) -> (f64, f64) {
        let y = y.clamp(self.y_start(), self.y_end());
        match &self.interp {
            Interpolant::Dense(steps) => {
                if steps.is_empty() {
                    return (self.psi[0], self.psi_prime[0]);
                }
                let i = steps.partition_point(|s| s.t1() < y).min(steps.len() - 1);
                let v = steps[i].eval(y);
                (v[0], v[1])
            }
            Interpolant::Planted(f) => f(y),
        }
    }

    /// A trajectory given by a closed form on `[y_start, y_end]`, e.g. to
    /// exercise the checks on functions with known properties.
    pub fn planted(
        y_start: f64,
        y_end: f64,
        blowup_time: Option<f64>,
        f: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static,
    ) -> Self {
        let m = 256;
        let nodes: Vec<f64> = (0..=m)
            .map(|i| y_start + (y_end - y_start) * i as f64 / m as f64)
            .collect();
        let (psi, psi_prime) = nodes.iter().map(|&y| f(y)).unzip();
        Self {
            epsilon: f64::NAN,
            mu: f64::NAN,
            initial_slope: f(y_start).1,
            nodes,
            psi,
            psi_prime,
            blowup_time,
            blowup_threshold: f64::INFINITY,
            interp: Interpolant::Planted(Arc::new(f)),
        }
    }

    /// CSV with columns `y, psi, psi_prime, xi`; `xi` is `nan` outside
    /// `[y_η, Y_{ε,η})` or when no comparison data is given.
    pub fn to_csv(&self, comparison: Option<(f64, f64)>) -> String {
        let rows: Vec<Vec<f64>> = self
            .nodes
            .iter()
            .zip(self.psi.iter().zip(&self.psi_prime))
            .map(|(&y, (&p, &dp))| {
                let xi = comparison
                    .filter(|&(_, y_eta)| y >= y_eta)
                    .and_then(|(eta, y_eta)| xi_closed_form(self.epsilon, eta, y_eta, y).ok())
                    .unwrap_or(f64::NAN);
                vec![y, p, dp, xi]
            })
            .collect();
        format::csv(&["y", "psi", "psi_prime", "xi"], &rows)
    }
}

fn check_rtol(rtol: f64) -> Result<()> {
    if !(rtol >= 1e-13) || !rtol.is_finite() {
        return Err(Error::invalid(format!("rtol must be at least 1e-13, got {rtol}")));
    }
    Ok(())
}

fn dopri_options(rtol: f64) -> Dopri5Options {
    Dopri5Options {
        rtol,
        atol: rtol,
        stop_tol: BLOWUP_BRACKET * 1e-4,
        ..Default::default()
    }
}

/// Integrates `εψ'' = μ sinh y − ψ + ψ³` from `y_start` with the given
/// state, up to `y_max` or until `|ψ| ≥ threshold`.
pub fn integrate_from(
    epsilon: f64,
    mu: f64,
    y_start: f64,
    state: [f64; 2],
    y_max: f64,
    threshold: f64,
    rtol: f64,
) -> Result<OdeTrajectory> {
    if !(epsilon > 0.0) {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(threshold > 0.0) {
        return Err(Error::invalid("threshold must be positive"));
    }
    check_rtol(rtol)?;
    let rhs = move |y: f64, x: &[f64; 2]| [x[1], (mu * y.sinh() - x[0] + x[0] * x[0] * x[0]) / epsilon];
    let sol = ode::integrate(rhs, y_start, state, y_max, &dopri_options(rtol), |_, x| {
        x[0].abs() >= threshold
    })?;
    let mut nodes = vec![y_start];
    let mut psi = vec![state[0]];
    let mut psi_prime = vec![state[1]];
    for s in &sol.steps {
        let t = s.t1().min(sol.t_end);
        let v = s.eval(t);
        nodes.push(t);
        psi.push(v[0]);
        psi_prime.push(v[1]);
    }
    let blowup_time = (sol.stop == StopReason::Predicate).then_some(sol.t_end);
    Ok(OdeTrajectory {
        epsilon,
        mu,
        initial_slope: state[1],
        nodes,
        psi,
        psi_prime,
        blowup_time,
        blowup_threshold: threshold,
        interp: Interpolant::Dense(sol.steps),
    })
}

/// `ψ` on `y ≥ 0` with `ψ(0) = 0`, `ψ'(0) = initial_slope`.
pub fn integrate_psi(
    epsilon: f64,
    mu: f64,
    initial_slope: f64,
    y_max: f64,
    threshold: f64,
    rtol: f64,
) -> Result<OdeTrajectory> {
    if !(mu >= 0.0) {
        return Err(Error::invalid("mu must be nonnegative"));
    }
    integrate_from(epsilon, mu, 0.0, [0.0, initial_slope], y_max, threshold, rtol)
}

/// Refines a sign change of `g` on `[a, b]` by bisection.
fn bisect(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut ga = g(a);
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm > 0.0) == (ga > 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// First `y ≥ from` where `ψ(y) = level`.
pub fn first_crossing(traj: &OdeTrajectory, from: f64, level: f64) -> Result<f64> {
    let end = traj.blowup_time.unwrap_or(traj.y_end()).min(traj.y_end());
    let g = |y: f64| traj.eval(y).0 - level;
    let start = from.max(traj.y_start());
    let mut knots: Vec<f64> = vec![start];
    knots.extend(traj.nodes.iter().copied().filter(|&y| y > start && y <= end));
    if *knots.last().expect("nonempty") < end {
        knots.push(end);
    }
    if g(knots[0]) == 0.0 {
        return Ok(knots[0]);
    }
    for w in knots.windows(2) {
        let mut a = w[0];
        for i in 1..=SCAN_POINTS {
            let b = w[0] + (w[1] - w[0]) * i as f64 / SCAN_POINTS as f64;
            let (ga, gb) = (g(a), g(b));
            if gb == 0.0 {
                return Ok(b);
            }
            if (ga < 0.0) != (gb < 0.0) {
                return Ok(bisect(g, a, b, CROSSING_TOL));
            }
            a = b;
        }
    }
    Err(Error::NoCrossing { level })
}

/// First crossings `y₀` of level 1 and `y_η` of level `1 + η`, both at or
/// after `B₀`.
pub fn locate_crossings(traj: &OdeTrajectory, b0: f64, eta: f64) -> Result<(f64, f64)> {
    if !(eta >= 0.0) {
        return Err(Error::invalid("eta must be nonnegative"));
    }
    let y0 = first_crossing(traj, b0, 1.0)?;
    let y_eta = if eta == 0.0 {
        y0
    } else {
        first_crossing(traj, b0, 1.0 + eta)?
    };
    Ok((y0, y_eta))
}

/// `Y_{ε,η} = y_η + √(ε/2) log(1 + 2/η)`.
pub fn y_eps_eta(epsilon: f64, eta: f64, y_eta: f64) -> f64 {
    y_eta + (epsilon / 2.0).sqrt() * (1.0 + 2.0 / eta).ln()
}

/// `ξ_{ε,η}(y) = (a + e^s)/(a − e^s)` with `a = 1 + 2/η`,
/// `s = (y − y_η)/√(ε/2)`: the solution of `ξ' = (ξ² − 1)/√(2ε)` with
/// `ξ(y_η) = 1 + η`, exploding at `Y_{ε,η}`.
pub fn xi_closed_form(epsilon: f64, eta: f64, y_eta: f64, y: f64) -> Result<f64> {
    if !(epsilon > 0.0) || !(eta > 0.0) {
        return Err(Error::invalid("epsilon and eta must be positive"));
    }
    let big_y = y_eps_eta(epsilon, eta, y_eta);
    if y >= big_y {
        return Err(Error::Domain(format!(
            "ξ is finite only below Y = {big_y}, got y = {y}"
        )));
    }
    let a = 1.0 + 2.0 / eta;
    let e = ((y - y_eta) / (epsilon / 2.0).sqrt()).exp();
    Ok((a + e) / (a - e))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundReport {
    pub verified: bool,
    pub pointwise_holds: bool,
    pub y_eps_le_y_eps_eta: bool,
    pub samples: usize,
    /// `min (ψ − ξ)/(1 + |ξ|)` over the samples.
    pub min_scaled_margin: f64,
    pub worst_y: f64,
    pub y_eps_eta: f64,
}

/// Checks `ψ ≥ ξ_{ε,η}` on `[y_η, min(Y_ε, Y_{ε,η}) − 10⁻⁶]` with slack
/// `10⁻⁸(1 + |ξ|)`, and `Y_ε ≤ Y_{ε,η}`. A trajectory without detected
/// blow-up is checked up to its end and fails the second test.
pub fn verify_lower_bound(traj: &OdeTrajectory, epsilon: f64, eta: f64, y_eta: f64) -> Result<LowerBoundReport> {
    let big = y_eps_eta(epsilon, eta, y_eta);
    let end = traj.blowup_time.unwrap_or(traj.y_end()).min(big) - 1e-6;
    let n = LOWER_BOUND_SAMPLES;
    let mut min_margin = f64::INFINITY;
    let mut worst_y = y_eta;
    let mut pointwise = true;
    for i in 0..n {
        let y = y_eta + (end - y_eta) * i as f64 / (n - 1) as f64;
        let xi = xi_closed_form(epsilon, eta, y_eta, y)?;
        let (p, _) = traj.eval(y);
        let margin = (p - xi) / (1.0 + xi.abs());
        if margin < min_margin {
            min_margin = margin;
            worst_y = y;
        }
        if p < xi - 1e-8 * (1.0 + xi.abs()) {
            pointwise = false;
        }
    }
    let ordered = matches!(traj.blowup_time, Some(t) if t <= big);
    Ok(LowerBoundReport {
        verified: pointwise && ordered,
        pointwise_holds: pointwise,
        y_eps_le_y_eps_eta: ordered,
        samples: n,
        min_scaled_margin: min_margin,
        worst_y,
        y_eps_eta: big,
    })
}

/// `E = ε/2 φ'² − φ⁴/4 + φ²/2`, conserved by `εφ'' = −φ + φ³`.
pub fn comparison_energy(epsilon: f64, phi: f64, dphi: f64) -> f64 {
    0.5 * epsilon * dphi * dphi - 0.25 * phi.powi(4) + 0.5 * phi * phi
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub initial_energy: f64,
    /// `max |E(y) − E(y_start)| / (1 + ε/2 φ'² + φ⁴/4 + φ²/2)` over the
    /// nodes and interior points of every step.
    pub max_scaled_drift: f64,
    pub conserved: bool,
}

/// Allowed scaled energy drift.
pub const ENERGY_DRIFT_TOL: f64 = 1e-7;

/// Energy drift along a trajectory of the unforced comparison dynamics.
pub fn energy_identity_check(epsilon: f64, traj: &OdeTrajectory) -> EnergyReport {
    let (p0, d0) = traj.eval(traj.y_start());
    let e0 = comparison_energy(epsilon, p0, d0);
    let mut drift = 0.0f64;
    let end = traj.blowup_time.unwrap_or(traj.y_end());
    for w in traj.nodes.windows(2) {
        for i in 0..4 {
            let y = (w[0] + (w[1] - w[0]) * i as f64 / 4.0).min(end);
            let (p, d) = traj.eval(y);
            let scale = 1.0 + 0.5 * epsilon * d * d + 0.25 * p.powi(4) + 0.5 * p * p;
            drift = drift.max((comparison_energy(epsilon, p, d) - e0).abs() / scale);
        }
    }
    EnergyReport {
        initial_energy: e0,
        max_scaled_drift: drift,
        conserved: drift <= ENERGY_DRIFT_TOL,
    }
}

/// Threshold used for the complex-axis check.
pub const REALNESS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexAxisReport {
    /// `max |Re φ| / (1 + |Im φ|)`.
    pub max_scaled_real_part: f64,
    pub consistent: bool,
    pub y_end: f64,
    pub blowup_time: Option<f64>,
    /// `max |Im φ − ψ| / (1 + |ψ|)` against the real-variable integration.
    pub max_imag_vs_psi: f64,
}

/// Integrates `εφ'' + φ + φ³ = iμ sinh y` for complex `φ` with
/// `φ(0) = φ0_real`, `φ'(0) = i·initial_slope`, and measures how far `φ`
/// leaves the imaginary axis. With `φ0_real = 0` the real part must vanish.
pub fn complex_axis_consistency_with(
    epsilon: f64,
    mu: f64,
    initial_slope: f64,
    y_max: f64,
    phi0_real: f64,
    rtol: f64,
) -> Result<ComplexAxisReport> {
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    check_rtol(rtol)?;
    let threshold = DEFAULT_BLOWUP_THRESHOLD;
    // state: (Re φ, Im φ, Re φ', Im φ')
    let rhs = move |y: f64, x: &[f64; 4]| {
        let (p, q) = (x[0], x[1]);
        let cube_re = p * p * p - 3.0 * p * q * q;
        let cube_im = 3.0 * p * p * q - q * q * q;
        [
            x[2],
            x[3],
            (-p - cube_re) / epsilon,
            (mu * y.sinh() - q - cube_im) / epsilon,
        ]
    };
    let sol = ode::integrate(
        rhs,
        0.0,
        [phi0_real, 0.0, 0.0, initial_slope],
        y_max,
        &dopri_options(rtol),
        |_, x| x[0].hypot(x[1]) >= threshold,
    )?;
    let psi = integrate_psi(epsilon, mu, initial_slope, y_max, threshold, rtol)?;
    let mut max_re = 0.0f64;
    let mut max_dev = 0.0f64;
    for s in &sol.steps {
        for i in 0..=4 {
            let y = (s.t0 + s.h * i as f64 / 4.0).min(sol.t_end);
            let v = s.eval(y);
            max_re = max_re.max(v[0].abs() / (1.0 + v[1].abs()));
            if y < psi.blowup_time.unwrap_or(psi.y_end()) - 1e-3 {
                let (p, _) = psi.eval(y);
                max_dev = max_dev.max((v[1] - p).abs() / (1.0 + p.abs()));
            }
        }
    }
    Ok(ComplexAxisReport {
        max_scaled_real_part: max_re,
        consistent: max_re <= REALNESS_TOL,
        y_end: sol.t_end,
        blowup_time: (sol.stop == StopReason::Predicate).then_some(sol.t_end),
        max_imag_vs_psi: max_dev,
    })
}

pub fn complex_axis_consistency(epsilon: f64, mu: f64, initial_slope: f64, y_max: f64) -> Result<ComplexAxisReport> {
    complex_axis_consistency_with(epsilon, mu, initial_slope, y_max, 0.0, 1e-12)
}

/// Inputs of the full imaginary-axis study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlowupConfig {
    pub epsilon: f64,
    pub mu: f64,
    pub eta: f64,
    /// Cutoff of the spectral solve providing `ψ'(0)`.
    pub n: usize,
    pub gp_tol: f64,
    pub rtol: f64,
    pub threshold: f64,
    pub y_max: f64,
}

impl Default for BlowupConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            mu: 0.5,
            eta: 0.5,
            n: 128,
            gp_tol: 1e-12,
            rtol: 1e-12,
            threshold: DEFAULT_BLOWUP_THRESHOLD,
            y_max: 20.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct BlowupReport {
    pub epsilon: f64,
    pub mu: f64,
    pub eta: f64,
    pub initial_slope: f64,
    pub B0: f64,
    pub y0: f64,
    pub y_eta: f64,
    pub Y_eps: f64,
    pub Y_eps_eta: f64,
    pub lower_bound_verified: bool,
    pub lower_bound: LowerBoundReport,
    pub psi_at_B0: f64,
    pub psi_prime_at_B0: f64,
    pub psi_prime_at_y_eta: f64,
    /// `C(η) = ε/2 ψ'(y_η)² − (1+η)⁴/4 + (1+η)²/2`.
    pub C_eta: f64,
    pub C_eta_at_least_quarter: bool,
    /// `ψ'' ≥ 0` sampled on `[B₀, Y_ε)`.
    pub convex_after_B0: bool,
    /// `B₀ < y₀ < y_η < Y_ε ≤ Y_{ε,η}`.
    pub chain_holds: bool,
}

/// Runs the spectral solve, the imaginary-axis integration, the crossing
/// search and the comparison checks.
pub fn blowup_study(cfg: &BlowupConfig) -> Result<(BlowupReport, OdeTrajectory)> {
    if !(cfg.eta > 0.0) {
        return Err(Error::invalid("eta must be positive"));
    }
    let gp = nonlinear::solve_gp(cfg.epsilon, cfg.mu, cfg.n, cfg.gp_tol)?;
    let slope = gp.u_prime_at_zero;
    let traj = integrate_psi(cfg.epsilon, cfg.mu, slope, cfg.y_max, cfg.threshold, cfg.rtol)?;
    let report = analyze_trajectory(&traj, cfg.eta)?;
    Ok((report, traj))
}

/// The comparison analysis of a computed `ψ` trajectory.
pub fn analyze_trajectory(traj: &OdeTrajectory, eta: f64) -> Result<BlowupReport> {
    let (eps, mu) = (traj.epsilon, traj.mu);
    let b0 = branch_half_width(mu);
    let big_y = traj.blowup_time.ok_or(Error::NoCrossing {
        level: traj.blowup_threshold,
    })?;
    let (y0, y_eta) = locate_crossings(traj, b0, eta)?;
    let lb = verify_lower_bound(traj, eps, eta, y_eta)?;
    let (p_b0, dp_b0) = traj.eval(b0);
    let (p_eta, dp_eta) = traj.eval(y_eta);
    let c_eta = comparison_energy(eps, p_eta, dp_eta);
    let convex = (0..1000).all(|i| {
        let y = b0 + (big_y - b0) * i as f64 / 1000.0;
        let p = traj.eval(y).0;
        mu * y.sinh() - p + p * p * p >= 0.0
    });
    let big_y_eta = y_eps_eta(eps, eta, y_eta);
    Ok(BlowupReport {
        epsilon: eps,
        mu,
        eta,
        initial_slope: traj.initial_slope,
        B0: b0,
        y0,
        y_eta,
        Y_eps: big_y,
        Y_eps_eta: big_y_eta,
        lower_bound_verified: lb.verified,
        lower_bound: lb,
        psi_at_B0: p_b0,
        psi_prime_at_B0: dp_b0,
        psi_prime_at_y_eta: dp_eta,
        C_eta: c_eta,
        C_eta_at_least_quarter: c_eta >= 0.25,
        convex_after_B0: convex,
        chain_holds: b0 < y0 && y0 < y_eta && y_eta < big_y && big_y <= big_y_eta,
    })
}

/// Real roots `υ` of `μ sinh y − υ + υ³ = 0`: the boundary of the region
/// where `ψ'' ≥ 0`.
pub fn x_mu_boundary(mu: f64, y: f64) -> Vec<f64> {
    let c = mu * y.sinh();
    // t³ − t + c = 0
    let disc = 4.0 - 27.0 * c * c;
    if disc > 0.0 {
        let r = 2.0 / 3f64.sqrt();
        let phi = ((3.0 * c / 2.0) * -3f64.sqrt()).clamp(-1.0, 1.0).acos() / 3.0;
        let mut v: Vec<f64> = (0..3)
            .map(|k| r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
            .collect();
        v.sort_by(f64::total_cmp);
        v
    } else {
        let s = (c * c / 4.0 - 1.0 / 27.0).max(0.0).sqrt();
        vec![(-c / 2.0 + s).cbrt() + (-c / 2.0 - s).cbrt()]
    }
}

/// CSV `y, upsilon` with one row per boundary branch point at each `y`.
pub fn x_mu_boundary_csv(mu: f64, y_max: f64, samples: usize) -> String {
    let mut rows = Vec::new();
    for i in 0..=samples {
        let y = y_max * i as f64 / samples.max(1) as f64;
        for v in x_mu_boundary(mu, y) {
            rows.push(vec![y, v]);
        }
    }
    format::csv(&["y", "upsilon"], &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_solution() {
        let t = integrate_psi(0.1, 0.0, 0.0, 3.0, 1e8, 1e-10).unwrap();
        assert!(t.blowup_time.is_none());
        assert!(t.psi.iter().all(|&p| p == 0.0));
        assert_eq!(t.y_end(), 3.0);
    }

    #[test]
    fn rtol_floor() {
        assert!(integrate_psi(0.1, 0.5, 0.4, 3.0, 1e8, 1e-14).is_err());
    }

    #[test]
    fn planted_crossings() {
        let t = OdeTrajectory::planted(0.0, 3.0, None, |y| (y.sinh(), y.cosh()));
        let (y0, ye) = locate_crossings(&t, 0.0, 0.5).unwrap();
        assert!((y0 - 1f64.asinh()).abs() < 1e-10);
        assert!((ye - 1.5f64.asinh()).abs() < 1e-10);
        let (a, b) = locate_crossings(&t, 0.0, 0.0).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            locate_crossings(&t, 0.0, 100.0),
            Err(Error::NoCrossing { .. })
        ));
    }

    #[test]
    fn xi_formula() {
        assert!((xi_closed_form(0.1, 0.5, 1.0, 1.0).unwrap() - 1.5).abs() < 1e-15);
        let gap = y_eps_eta(0.1, 0.5, 1.0) - 1.0;
        assert!((gap - 0.05f64.sqrt() * 5f64.ln()).abs() < 1e-15);
        assert!((gap - 0.359_881_257_776_800_2).abs() < 1e-15);
        assert!(matches!(
            xi_closed_form(0.1, 0.5, 1.0, 1.0 + gap),
            Err(Error::Domain(_))
        ));
        let h = 1e-5;
        for y in [1.0, 1.1, 1.2, 1.3] {
            let d = (xi_closed_form(0.1, 0.5, 1.0, y + h).unwrap() - xi_closed_form(0.1, 0.5, 1.0, y - h).unwrap())
                / (2.0 * h);
            let x = xi_closed_form(0.1, 0.5, 1.0, y).unwrap();
            assert!((d - (x * x - 1.0) / 0.2f64.sqrt()).abs() < 1e-6 * (1.0 + d.abs()));
        }
    }

    fn planted_xi(shift: f64) -> OdeTrajectory {
        let (eps, eta, y_eta) = (0.1, 0.5, 1.0);
        let big = y_eps_eta(eps, eta, y_eta);
        OdeTrajectory::planted(y_eta, big - 1e-7, Some(big), move |y| {
            let x = xi_closed_form(eps, eta, y_eta, y).unwrap();
            (x + shift, (x * x - 1.0) / (2.0 * eps).sqrt())
        })
    }

    #[test]
    fn lower_bound_on_planted() {
        let r = verify_lower_bound(&planted_xi(0.0), 0.1, 0.5, 1.0).unwrap();
        assert!(r.verified && r.min_scaled_margin.abs() < 1e-12);
        let r = verify_lower_bound(&planted_xi(-0.1), 0.1, 0.5, 1.0).unwrap();
        assert!(!r.verified && !r.pointwise_holds);
    }

    #[test]
    fn energy_equilibria() {
        for (phi, e) in [(0.0, 0.0), (1.0, 0.25)] {
            let t = integrate_from(0.1, 0.0, 0.0, [phi, 0.0], 2.0, 1e8, 1e-12).unwrap();
            let r = energy_identity_check(0.1, &t);
            assert_eq!(r.initial_energy, e);
            assert_eq!(r.max_scaled_drift, 0.0);
        }
    }

    #[test]
    fn energy_generic() {
        let t = integrate_from(0.1, 0.0, 1.0, [1.5, 2.0], 5.0, 1e8, 1e-12).unwrap();
        assert!(t.blowup_time.is_some());
        let r = energy_identity_check(0.1, &t);
        assert!(r.conserved, "{r:?}");
    }

    #[test]
    fn complex_axis_decoupling() {
        let r = complex_axis_consistency(0.1, 0.0, 0.0, 2.0).unwrap();
        assert_eq!(r.max_scaled_real_part, 0.0);
        let r = complex_axis_consistency(0.1, 0.5, 0.434, 5.0).unwrap();
        assert!(r.consistent && r.blowup_time.is_some());
        assert!(r.max_imag_vs_psi < 1e-9, "{r:?}");
        let bad = complex_axis_consistency_with(0.1, 0.5, 0.434, 5.0, 1e-3, 1e-12).unwrap();
        assert!(!bad.consistent);
    }

    #[test]
    fn boundary_roots() {
        for y in [0.0, 0.1, 0.3, 1.0, 2.0] {
            let c = 0.5 * f64::sinh(y);
            for v in x_mu_boundary(0.5, y) {
                assert!((c - v + v * v * v).abs() < 1e-12, "{y} {v}");
            }
        }
        assert_eq!(x_mu_boundary(0.5, 0.0).len(), 3);
        assert_eq!(x_mu_boundary(0.5, 2.0).len(), 1);
        assert!(x_mu_boundary_csv(0.5, 1.0, 4).starts_with("y,upsilon\n0,"));
    }
}
