//! Truncated Fourier series of 2π-periodic functions.
//!
//! Coefficients follow the unitary convention
//! `û_k = (2π)^{-1/2} ∫₀^{2π} u(x) e^{-ikx} dx`, so that
//! `u(z) = (2π)^{-1/2} Σ_k û_k e^{ikz}` and `‖u‖²_{L²} = Σ_k |û_k|²`.
//! Grid transforms carry the compensating `√(2π)/M` factor.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit;

/// `(2π)^{-1/2}`.
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
/// `(2π)^{1/2}`.
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_2;

/// Default noise floor for [`strip_estimate`].
pub const DEFAULT_NOISE_FLOOR: f64 = 1e-13;

const MIN_NONZERO_COEFFS: usize = 8;
const MIN_FIT_POINTS: usize = 4;

/// Coefficients `û_k` for `k = −N..=N` of a 2π-periodic function.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries1D {
    cutoff: usize,
    coeffs: Vec<Complex64>,
}

impl FourierSeries1D {
    /// Builds a series from coefficients ordered `k = −N..=N`.
    pub fn new(cutoff: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * cutoff + 1 {
            return Err(Error::invalid(format!(
                "cutoff {cutoff} needs {} coefficients, got {}",
                2 * cutoff + 1,
                coeffs.len()
            )));
        }
        Ok(Self { cutoff, coeffs })
    }

    pub fn zeros(cutoff: usize) -> Self {
        Self {
            cutoff,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * cutoff + 1],
        }
    }

    pub fn from_fn(cutoff: usize, f: impl Fn(i64) -> Complex64) -> Self {
        let n = cutoff as i64;
        Self {
            cutoff,
            coeffs: (-n..=n).map(f).collect(),
        }
    }

    /// `amplitude · e_k`, the normalized mode `e^{ikx}/√(2π)` scaled.
    pub fn mode(k: i64, amplitude: Complex64) -> Self {
        let mut s = Self::zeros(k.unsigned_abs() as usize);
        s.set(k, amplitude);
        s
    }

    /// Projects samples `u(2πj/M)`, `j = 0..M`, onto modes `|k| ≤ cutoff`
    /// with the rectangle rule. Exact for trigonometric polynomials of
    /// degree below `M − cutoff`.
    pub fn from_grid_samples(values: &[Complex64], cutoff: usize) -> Result<Self> {
        let m = values.len();
        if m < 2 * cutoff + 1 {
            return Err(Error::invalid(format!("{m} samples cannot resolve cutoff {cutoff}")));
        }
        let roots = roots_of_unity(m, -1.0);
        let scale = SQRT_2PI / m as f64;
        Ok(Self::from_fn(cutoff, |k| {
            let step = k.rem_euclid(m as i64) as usize;
            let mut acc = Complex64::new(0.0, 0.0);
            let mut idx = 0usize;
            for v in values {
                acc += v * roots[idx];
                idx += step;
                if idx >= m {
                    idx -= m;
                }
            }
            acc * scale
        }))
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `û_k`, zero for `|k| > N`.
    pub fn coeff(&self, k: i64) -> Complex64 {
        match self.index(k) {
            Some(i) => self.coeffs[i],
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Sets `û_k`; panics if `|k|` exceeds the cutoff.
    pub fn set(&mut self, k: i64, value: Complex64) {
        let i = self.index(k).expect("wavenumber outside cutoff");
        self.coeffs[i] = value;
    }

    fn index(&self, k: i64) -> Option<usize> {
        let n = self.cutoff as i64;
        (-n..=n).contains(&k).then(|| (k + n) as usize)
    }

    /// Iterates `(k, û_k)` in ascending `k`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n = self.cutoff as i64;
        self.coeffs.iter().enumerate().map(move |(i, &c)| (i as i64 - n, c))
    }

    /// Pads with zeros or truncates to exactly `cutoff`.
    pub fn resize(&self, cutoff: usize) -> Self {
        Self::from_fn(cutoff, |k| self.coeff(k))
    }

    /// True when `û_{−k} = conj(û_k)` to `tol` (the function is real on ℝ).
    pub fn is_real_valued(&self, tol: f64) -> bool {
        (0..=self.cutoff as i64).all(|k| (self.coeff(-k) - self.coeff(k).conj()).norm() <= tol)
    }

    /// Largest `|û_k + û_{−k}|` and `|Re û_k|`: zero for a real odd function.
    pub fn odd_real_defect(&self) -> (f64, f64) {
        let mut odd = 0.0f64;
        let mut imag = 0.0f64;
        for (k, c) in self.iter() {
            odd = odd.max((c + self.coeff(-k)).norm());
            imag = imag.max(c.re.abs());
        }
        (odd, imag)
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(Σ (1+k²)^s |û_k|²)^{1/2}`.
    pub fn hs_norm(&self, s: f64) -> f64 {
        self.iter()
            .map(|(k, c)| (1.0 + (k * k) as f64).powf(s) * c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn h1_norm(&self) -> f64 {
        self.hs_norm(1.0)
    }

    /// `Σ conj(û_k) v̂_k`.
    pub fn l2_inner(&self, other: &Self) -> Complex64 {
        let n = self.cutoff.min(other.cutoff) as i64;
        (-n..=n).map(|k| self.coeff(k).conj() * other.coeff(k)).sum()
    }

    /// `Σ (1+k²) conj(û_k) v̂_k`.
    pub fn h1_inner(&self, other: &Self) -> Complex64 {
        let n = self.cutoff.min(other.cutoff) as i64;
        (-n..=n)
            .map(|k| (1.0 + (k * k) as f64) * self.coeff(k).conj() * other.coeff(k))
            .sum()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            cutoff: self.cutoff,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Values at `x_j = 2πj/M`, `j = 0..M`.
    pub fn to_grid(&self, m: usize) -> Vec<Complex64> {
        let roots = roots_of_unity(m, 1.0);
        (0..m)
            .map(|j| {
                let acc: Complex64 = self
                    .iter()
                    .map(|(k, c)| c * roots[((k * j as i64).rem_euclid(m as i64)) as usize])
                    .sum();
                acc * INV_SQRT_2PI
            })
            .collect()
    }

    /// Exact derivative of the truncated series at a real point.
    pub fn derivative_at(&self, x: f64) -> Complex64 {
        self.iter()
            .map(|(k, c)| Complex64::new(0.0, k as f64) * c * Complex64::from_polar(1.0, k as f64 * x))
            .sum::<Complex64>()
            * INV_SQRT_2PI
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SeriesJson::from(self)).expect("series serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SeriesJson = serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        raw.try_into()
    }

    /// `(k, |û_k|)` rows for decay plots.
    pub fn decay_csv(&self) -> String {
        let rows: Vec<Vec<f64>> = self.iter().map(|(k, c)| vec![k as f64, c.norm()]).collect();
        crate::format::csv(&["k", "abs_coeff"], &rows)
    }
}

/// On-disk form: `{"cutoff": N, "re": [...], "im": [...]}` ordered `k = −N..=N`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesJson {
    cutoff: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl From<&FourierSeries1D> for SeriesJson {
    fn from(s: &FourierSeries1D) -> Self {
        SeriesJson {
            cutoff: s.cutoff,
            re: s.coeffs.iter().map(|c| c.re).collect(),
            im: s.coeffs.iter().map(|c| c.im).collect(),
        }
    }
}

impl TryFrom<SeriesJson> for FourierSeries1D {
    type Error = Error;
    fn try_from(raw: SeriesJson) -> Result<Self> {
        if raw.re.len() != raw.im.len() {
            return Err(Error::Serialization("re/im length mismatch".into()));
        }
        let coeffs = raw
            .re
            .iter()
            .zip(&raw.im)
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        FourierSeries1D::new(raw.cutoff, coeffs)
    }
}

impl Serialize for FourierSeries1D {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for FourierSeries1D {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SeriesJson::deserialize(d)?;
        raw.try_into().map_err(serde::de::Error::custom)
    }
}

impl Add for &FourierSeries1D {
    type Output = FourierSeries1D;
    fn add(self, rhs: Self) -> FourierSeries1D {
        let n = self.cutoff.max(rhs.cutoff);
        FourierSeries1D::from_fn(n, |k| self.coeff(k) + rhs.coeff(k))
    }
}

impl Sub for &FourierSeries1D {
    type Output = FourierSeries1D;
    fn sub(self, rhs: Self) -> FourierSeries1D {
        let n = self.cutoff.max(rhs.cutoff);
        FourierSeries1D::from_fn(n, |k| self.coeff(k) - rhs.coeff(k))
    }
}

impl Mul<f64> for &FourierSeries1D {
    type Output = FourierSeries1D;
    fn mul(self, rhs: f64) -> FourierSeries1D {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

fn roots_of_unity(m: usize, sign: f64) -> Vec<Complex64> {
    (0..m)
        .map(|j| Complex64::from_polar(1.0, sign * 2.0 * PI * j as f64 / m as f64))
        .collect()
}

/// Strip half-width parameter `A > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct StripNormParams(f64);

impl StripNormParams {
    pub fn new(a: f64) -> Result<Self> {
        if a > 0.0 && a.is_finite() {
            Ok(Self(a))
        } else {
            Err(Error::invalid(format!("strip half-width must be positive, got {a}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// `w_A(k) = cosh(2Ak)`.
pub fn weight(a: f64, k: i64) -> Result<f64> {
    weight_real(a, k as f64)
}

/// `w_A(t) = cosh(2At)` at a real argument.
pub fn weight_real(a: f64, t: f64) -> Result<f64> {
    let a = StripNormParams::new(a)?.get();
    Ok((2.0 * a * t).cosh())
}

/// `‖u‖_A = (Σ_k cosh(2Ak) |û_k|²)^{1/2}`; `+∞` when the sum overflows.
pub fn norm_a(u: &FourierSeries1D, a: f64) -> Result<f64> {
    let a = StripNormParams::new(a)?.get();
    let mut sum = 0.0;
    for (k, c) in u.iter() {
        let m = c.norm();
        if m == 0.0 {
            continue;
        }
        // cosh(2Ak)|c|² evaluated in log space so that a large weight
        // against a tiny coefficient does not overflow prematurely.
        let lm = 2.0 * m.ln();
        let t = 2.0 * a * k.abs() as f64;
        sum += 0.5 * ((t + lm).exp() + (-t + lm).exp());
    }
    Ok(sum.sqrt())
}

/// `Π_M u`: drops coefficients with `|k| > M`. The cutoff of the result is
/// `min(M, cutoff(u))`, so projecting onto a larger space returns `u`.
pub fn project(u: &FourierSeries1D, m: usize) -> FourierSeries1D {
    u.resize(m.min(u.cutoff))
}

/// `Π_{M_out}(uv)` computed by exact linear convolution of coefficients.
pub fn multiply(u: &FourierSeries1D, v: &FourierSeries1D, m_out: usize) -> FourierSeries1D {
    let nu = u.cutoff as i64;
    let nv = v.cutoff as i64;
    FourierSeries1D::from_fn(m_out, |k| {
        // a + b = k with |a| ≤ nu, |b| ≤ nv
        let lo = (-nu).max(k - nv);
        let hi = nu.min(k + nv);
        let mut acc = Complex64::new(0.0, 0.0);
        for a in lo..=hi {
            acc += u.coeff(a) * v.coeff(k - a);
        }
        acc * INV_SQRT_2PI
    })
}

/// `u(z) = (2π)^{-1/2} Σ_k û_k e^{ikz}` at a complex point.
pub fn eval_complex(u: &FourierSeries1D, z: Complex64) -> Complex64 {
    let iz = Complex64::new(-z.im, z.re);
    u.iter()
        .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
        .map(|(k, c)| c * (iz * k as f64).exp())
        .sum::<Complex64>()
        * INV_SQRT_2PI
}

/// Default sampling density for [`op_norm_bound`].
pub fn default_sup_grid(cutoff: usize) -> usize {
    8 * cutoff + 1
}

/// `√2 · max_± sup_x |V(x ± iA)|` sampled on `n_grid` points: the upper
/// bound for the multiplication-operator norm of `V` on `𝓗_A`.
pub fn op_norm_bound(v: &FourierSeries1D, a: f64, n_grid: usize) -> Result<f64> {
    StripNormParams::new(a)?;
    if n_grid == 0 {
        return Err(Error::invalid("n_grid must be positive"));
    }
    let mut sup = 0.0f64;
    for j in 0..n_grid {
        let x = 2.0 * PI * j as f64 / n_grid as f64;
        for y in [a, -a] {
            sup = sup.max(eval_complex(v, Complex64::new(x, y)).norm());
        }
    }
    Ok(std::f64::consts::SQRT_2 * sup)
}

/// Fitted decay `|û_k| ≈ C |k|^p e^{−A|k|}` of a coefficient tail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticityEstimate {
    /// Estimated strip half-width `A`.
    pub half_width: f64,
    /// The constant `C`.
    pub prefactor: f64,
    /// The algebraic exponent `p`.
    pub algebraic_exponent: f64,
    /// Smallest and largest `|k|` used in the fit.
    pub fit_window: (i64, i64),
    /// RMS misfit of `log|û_k|`.
    pub residual: f64,
    /// Spacing of the nonzero coefficients.
    pub stride: usize,
    pub fit_points: usize,
    /// `(k, log(|û_k|/|û_{k+s}|)/s)` along the usable run.
    pub ratio_diagnostic: Vec<(i64, f64)>,
}

/// Options for [`strip_estimate_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripFitOptions {
    pub noise_floor: f64,
    /// Force the coefficient stride instead of detecting it.
    pub stride: Option<usize>,
}

impl Default for StripFitOptions {
    fn default() -> Self {
        Self {
            noise_floor: DEFAULT_NOISE_FLOOR,
            stride: None,
        }
    }
}

/// Estimates the analyticity half-width from the decay of `|û_k|`.
pub fn strip_estimate(u: &FourierSeries1D, noise_floor: f64) -> Result<AnalyticityEstimate> {
    strip_estimate_with(
        u,
        StripFitOptions {
            noise_floor,
            stride: None,
        },
    )
}

/// Fits `log|û_k| = log C − A|k| + p log|k|` over the run of coefficients
/// above the noise floor, skipping the leading quarter of that run.
///
/// The `log|k|` column absorbs algebraic prefactors (poles, branch points)
/// that would otherwise bias `A` on short windows.
pub fn strip_estimate_with(u: &FourierSeries1D, opts: StripFitOptions) -> Result<AnalyticityEstimate> {
    let floor = opts.noise_floor;
    if !(floor > 0.0) {
        return Err(Error::invalid("noise floor must be positive"));
    }
    let found = u.coeffs.iter().filter(|c| c.norm() > floor).count();
    if found < MIN_NONZERO_COEFFS {
        return Err(Error::InsufficientData {
            needed: MIN_NONZERO_COEFFS,
            found,
        });
    }
    let n = u.cutoff as i64;
    let mag = |k: i64| u.coeff(k).norm().max(u.coeff(-k).norm());
    let usable: Vec<i64> = (1..=n).filter(|&k| mag(k) > floor).collect();
    let stride = match opts.stride {
        Some(0) => return Err(Error::invalid("stride must be positive")),
        Some(s) => s,
        None => detect_stride(&usable),
    };
    let Some(&start) = usable.first() else {
        return Err(Error::InsufficientData {
            needed: MIN_NONZERO_COEFFS,
            found,
        });
    };
    let run: Vec<i64> = (0..)
        .map(|i| start + i * stride as i64)
        .take_while(|&k| k <= n && mag(k) > floor)
        .collect();
    let skip = run.len() / 4;
    let points = &run[skip..];
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            needed: MIN_FIT_POINTS,
            found: points.len(),
        });
    }
    let rows: Vec<Vec<f64>> = points.iter().map(|&k| vec![1.0, k as f64, (k as f64).ln()]).collect();
    let ys: Vec<f64> = points.iter().map(|&k| mag(k).ln()).collect();
    let ls = fit::least_squares(&rows, &ys).ok_or_else(|| Error::FitFailed("degenerate decay fit".into()))?;
    let half_width = -ls.coefficients[1];
    if !(half_width > 0.0) {
        return Err(Error::FitFailed(format!(
            "coefficients do not decay (slope {})",
            ls.coefficients[1]
        )));
    }
    let s = stride as f64;
    let ratio_diagnostic = run
        .windows(2)
        .map(|w| (w[0], (mag(w[0]) / mag(w[1])).ln() / s))
        .collect();
    Ok(AnalyticityEstimate {
        half_width,
        prefactor: ls.coefficients[0].exp(),
        algebraic_exponent: ls.coefficients[2],
        fit_window: (points[0], *points.last().unwrap()),
        residual: ls.rms_residual,
        stride,
        fit_points: points.len(),
        ratio_diagnostic,
    })
}

fn detect_stride(ks: &[i64]) -> usize {
    let g = ks.windows(2).fold(0i64, |g, w| gcd(g, w[1] - w[0]));
    g.max(1) as usize
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}
