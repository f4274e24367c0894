//! Dormand–Prince 5(4) integration with continuous output and a stopping
//! predicate located by bisection inside the final step.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5Options {
    pub rtol: f64,
    pub atol: f64,
    /// Steps below this size abort the integration.
    pub h_min: f64,
    pub max_steps: usize,
    /// Width of the bracket on the stopping point.
    pub stop_tol: f64,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            h_min: 1e-14,
            max_steps: 1_000_000,
            stop_tol: 1e-12,
        }
    }
}

/// One accepted step with its quartic continuous extension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseStep<const D: usize> {
    pub t0: f64,
    pub h: f64,
    rcont: [[f64; D]; 5],
}

impl<const D: usize> DenseStep<D> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// State at `t ∈ [t0, t0 + h]`.
    pub fn eval(&self, t: f64) -> [f64; D] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let r = &self.rcont;
        std::array::from_fn(|i| r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i]))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Integrated up to the requested end point.
    EndReached,
    /// The stopping predicate became true.
    Predicate,
}

#[derive(Debug, Clone)]
pub struct OdeSolution<const D: usize> {
    pub steps: Vec<DenseStep<D>>,
    pub t_start: f64,
    /// End of the solution; the located stopping point when stopped.
    pub t_end: f64,
    pub state_end: [f64; D],
    pub stop: StopReason,
    pub rejected_steps: usize,
}

impl<const D: usize> OdeSolution<D> {
    /// Dense output at `t`, clamped to the solution interval.
    pub fn eval(&self, t: f64) -> [f64; D] {
        if self.steps.is_empty() {
            return self.state_end;
        }
        let t = t.clamp(self.t_start, self.t_end);
        let i = self.steps.partition_point(|s| s.t1() < t).min(self.steps.len() - 1);
        self.steps[i].eval(t)
    }
}

fn axpy<const D: usize>(x: &[f64; D], h: f64, terms: &[(f64, &[f64; D])]) -> [f64; D] {
    std::array::from_fn(|i| x[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

fn err_norm<const D: usize>(e: &[f64; D], x0: &[f64; D], x1: &[f64; D], o: &Dopri5Options) -> f64 {
    let s: f64 = (0..D)
        .map(|i| {
            let sc = o.atol + o.rtol * x0[i].abs().max(x1[i].abs());
            (e[i] / sc).powi(2)
        })
        .sum();
    (s / D as f64).sqrt()
}

fn initial_step<const D: usize, F>(f: &F, t: f64, x: &[f64; D], k1: &[f64; D], o: &Dopri5Options) -> f64
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    let sc = |i: usize| o.atol + o.rtol * x[i].abs();
    let rms = |v: &dyn Fn(usize) -> f64| ((0..D).map(|i| v(i).powi(2)).sum::<f64>() / D as f64).sqrt();
    let d0 = rms(&|i| x[i] / sc(i));
    let d1 = rms(&|i| k1[i] / sc(i));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let x1 = axpy(x, h0, &[(1.0, k1)]);
    let k2 = f(t + h0, &x1);
    let d2 = rms(&|i| (k2[i] - k1[i]) / sc(i)) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

/// Integrates `x' = f(t, x)` from `t0` to `t_max`, stopping early at the
/// first point where `stop(t, x)` holds. The predicate is assumed to switch
/// from false to true at most once inside a step.
pub fn integrate<const D: usize, F, S>(
    f: F,
    t0: f64,
    x0: [f64; D],
    t_max: f64,
    opts: &Dopri5Options,
    stop: S,
) -> Result<OdeSolution<D>>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
    S: Fn(f64, &[f64; D]) -> bool,
{
    if !(opts.rtol > 0.0) || !(opts.atol >= 0.0) {
        return Err(Error::invalid("tolerances must be positive"));
    }
    if !(t_max >= t0) {
        return Err(Error::invalid("integration interval must be forward"));
    }
    let mut out = OdeSolution {
        steps: Vec::new(),
        t_start: t0,
        t_end: t0,
        state_end: x0,
        stop: StopReason::EndReached,
        rejected_steps: 0,
    };
    if stop(t0, &x0) {
        out.stop = StopReason::Predicate;
        return Ok(out);
    }
    if t_max == t0 {
        return Ok(out);
    }
    let mut t = t0;
    let mut x = x0;
    let mut k1 = f(t, &x);
    let mut h = initial_step(&f, t, &x, &k1, opts).min(t_max - t0);
    let mut fac_old: f64 = 1e-4;
    for _ in 0..opts.max_steps {
        if h < opts.h_min {
            return Err(Error::Stiffness {
                y: t,
                step: h,
                state_norm: x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            });
        }
        let last = t + h >= t_max;
        if last {
            h = t_max - t;
        }
        let k2 = f(t + C2 * h, &axpy(&x, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(&x, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(&x, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &axpy(&x, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &axpy(&x, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let x1 = axpy(&x, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + h, &x1);
        let e: [f64; D] =
            std::array::from_fn(|i| h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]));
        let err = err_norm(&e, &x, &x1, opts);
        if !err.is_finite() {
            h *= 0.2;
            out.rejected_steps += 1;
            continue;
        }
        // PI step-size control as in Hairer's DOPRI5.
        let fac11 = err.powf(0.2 - 0.04 * 0.75);
        let mut fac = fac11 / fac_old.powf(0.04) / 0.9;
        fac = fac.clamp(0.1, 5.0);
        let h_new = h / fac;
        if err > 1.0 {
            h /= (fac11 / 0.9).min(5.0);
            out.rejected_steps += 1;
            continue;
        }
        fac_old = err.max(1e-4);
        let ydiff: [f64; D] = std::array::from_fn(|i| x1[i] - x[i]);
        let bspl: [f64; D] = std::array::from_fn(|i| h * k1[i] - ydiff[i]);
        let step = DenseStep {
            t0: t,
            h,
            rcont: [
                x,
                ydiff,
                bspl,
                std::array::from_fn(|i| ydiff[i] - h * k7[i] - bspl[i]),
                std::array::from_fn(|i| {
                    h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
                }),
            ],
        };
        out.steps.push(step);
        if stop(t + h, &x1) {
            let (ts, xs) = locate_stop(&step, &stop, opts.stop_tol);
            out.t_end = ts;
            out.state_end = xs;
            out.stop = StopReason::Predicate;
            return Ok(out);
        }
        t += h;
        x = x1;
        k1 = k7;
        if last {
            out.t_end = t_max;
            out.state_end = x;
            return Ok(out);
        }
        h = h_new;
    }
    Err(Error::SolverFailure(format!(
        "step limit {} reached at t = {t}",
        opts.max_steps
    )))
}

/// Smallest `t` in the step (to `tol`) at which the predicate holds; the
/// upper end of the final bracket is returned.
fn locate_stop<const D: usize, S>(step: &DenseStep<D>, stop: &S, tol: f64) -> (f64, [f64; D])
where
    S: Fn(f64, &[f64; D]) -> bool,
{
    let mut lo = step.t0;
    let mut hi = step.t1();
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if stop(mid, &step.eval(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (hi, step.eval(hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let o = Dopri5Options {
            rtol: 1e-12,
            atol: 1e-14,
            ..Default::default()
        };
        let s = integrate(|_, x: &[f64; 1]| [-x[0]], 0.0, [1.0], 3.0, &o, |_, _| false).unwrap();
        assert_eq!(s.stop, StopReason::EndReached);
        assert!((s.state_end[0] - (-3.0f64).exp()).abs() < 1e-12);
        for t in [0.1, 0.77, 1.5, 2.99] {
            assert!((s.eval(t)[0] - (-t).exp()).abs() < 1e-11, "{t}");
        }
    }

    #[test]
    fn harmonic_oscillator_dense_output() {
        let o = Dopri5Options {
            rtol: 1e-11,
            atol: 1e-13,
            ..Default::default()
        };
        let s = integrate(|_, x: &[f64; 2]| [x[1], -x[0]], 0.0, [0.0, 1.0], 10.0, &o, |_, _| false).unwrap();
        for j in 0..200 {
            let t = 0.05 * j as f64;
            let v = s.eval(t);
            assert!((v[0] - t.sin()).abs() < 1e-9 && (v[1] - t.cos()).abs() < 1e-9);
        }
    }

    #[test]
    fn blowup_located() {
        // x' = x², x(0) = 1 explodes at t = 1
        let o = Dopri5Options {
            rtol: 1e-12,
            atol: 1e-12,
            ..Default::default()
        };
        let s = integrate(
            |_, x: &[f64; 1]| [x[0] * x[0]],
            0.0,
            [1.0],
            2.0,
            &o,
            |_, x| x[0].abs() >= 1e8,
        )
        .unwrap();
        assert_eq!(s.stop, StopReason::Predicate);
        assert!((s.t_end - (1.0 - 1e-8)).abs() < 1e-9, "{}", s.t_end);
    }

    #[test]
    fn step_underflow_is_reported() {
        let o = Dopri5Options {
            h_min: 1e-3,
            ..Default::default()
        };
        let r = integrate(|_, x: &[f64; 1]| [x[0] * x[0]], 0.0, [1.0], 2.0, &o, |_, _| false);
        assert!(matches!(r, Err(Error::Stiffness { .. })));
    }
}
