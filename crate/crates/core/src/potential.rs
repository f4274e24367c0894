//! Builtin analytic potentials and source terms in coefficient form.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{FourierSeries1D, SQRT_2PI};

/// `V ≡ value`.
pub fn constant(value: f64) -> FourierSeries1D {
    FourierSeries1D::mode(0, Complex64::new(value * SQRT_2PI, 0.0))
}

/// `offset + amplitude · cos(frequency · x)`.
pub fn cosine(offset: f64, amplitude: f64, frequency: u32) -> FourierSeries1D {
    let m = frequency as i64;
    let mut v = FourierSeries1D::zeros(frequency as usize);
    let half = Complex64::new(0.5 * amplitude * SQRT_2PI, 0.0);
    if m == 0 {
        v.set(0, Complex64::new((offset + amplitude) * SQRT_2PI, 0.0));
        return v;
    }
    v.set(0, Complex64::new(offset * SQRT_2PI, 0.0));
    v.set(m, half);
    v.set(-m, half);
    v
}

/// The Mathieu potential `2q cos(2x)`.
pub fn mathieu(q: f64) -> FourierSeries1D {
    cosine(0.0, 2.0 * q, 2)
}

/// `μ sin x`, so that `û_{±1} = ∓ i μ √(π/2)`.
pub fn sine(mu: f64) -> FourierSeries1D {
    let a = mu * (std::f64::consts::PI / 2.0).sqrt();
    let mut v = FourierSeries1D::zeros(1);
    v.set(1, Complex64::new(0.0, -a));
    v.set(-1, Complex64::new(0.0, a));
    v
}

/// `offset + μ/(c − cos x)` for `c > 1`, truncated at `cutoff`.
///
/// Its coefficients are `√(2π) μ (c²−1)^{-1/2} r^{|k|}` with
/// `r = c − √(c²−1)`, so the strip half-width is `arccosh c`.
pub fn poisson_kernel(c: f64, mu: f64, offset: f64, cutoff: usize) -> Result<FourierSeries1D> {
    if !(c > 1.0) {
        return Err(Error::invalid(format!("poisson kernel needs c > 1, got {c}")));
    }
    let s = (c * c - 1.0).sqrt();
    let r = c - s;
    let amp = SQRT_2PI * mu / s;
    let mut v = FourierSeries1D::from_fn(cutoff, |k| Complex64::new(amp * r.powi(k.abs() as i32), 0.0));
    v.set(0, v.coeff(0) + Complex64::new(offset * SQRT_2PI, 0.0));
    Ok(v)
}

/// Strip half-width `arccosh c` of [`poisson_kernel`].
pub fn poisson_kernel_half_width(c: f64) -> f64 {
    c.acosh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::eval_complex;

    #[test]
    fn poisson_kernel_pointwise() {
        let v = poisson_kernel(2.0, 1.0, 2.0, 120).unwrap();
        for &x in &[0.0, 0.4, 1.7, 3.1] {
            let exact = 2.0 + 1.0 / (2.0 - f64::cos(x));
            let got = eval_complex(&v, Complex64::new(x, 0.0));
            assert!((got.re - exact).abs() < 1e-13 && got.im.abs() < 1e-14);
        }
        assert!((poisson_kernel_half_width(2.0) - 1.316_957_896_924_816_6).abs() < 1e-14);
        assert!(poisson_kernel(1.0, 1.0, 0.0, 4).is_err());
    }

    #[test]
    fn cosine_and_mathieu() {
        let v = mathieu(1.0);
        let x = 0.37;
        let got = eval_complex(&v, Complex64::new(x, 0.0)).re;
        assert!((got - 2.0 * (2.0 * x).cos()).abs() < 1e-14);
        let w = cosine(2.0, 1.0, 1);
        let got = eval_complex(&w, Complex64::new(x, 0.0)).re;
        assert!((got - (2.0 + x.cos())).abs() < 1e-14);
        let k = constant(-3.0);
        assert!((eval_complex(&k, Complex64::new(1.0, 2.0)) - Complex64::new(-3.0, 0.0)).norm() < 1e-14);
    }
}
