//! Dense Hermitian linear algebra on top of nalgebra, plus mixed-precision
//! refinement of isolated eigenpairs in double-double arithmetic.

use nalgebra::{DMatrix, DVector};
use num_complex::{Complex, Complex64};
use twofloat::TwoFloat;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
/// Complex number with double-double components.
pub type ComplexDd = Complex<TwoFloat>;

/// Largest entrywise defect `|M_ij − conj(M_ji)|`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut d = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            d = d.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    d
}

/// Ascending eigenvalues and matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        self.vectors.column(j).iter().copied().collect()
    }
}

/// Full eigendecomposition of a Hermitian matrix. Matrices with vanishing
/// imaginary part go through the real symmetric solver.
pub fn eigh(m: &CMatrix) -> HermitianEigen {
    let n = m.nrows();
    let real = m.iter().all(|z| z.im == 0.0);
    let (values, vectors): (Vec<f64>, CMatrix) = if real {
        let re = DMatrix::from_fn(n, n, |i, j| m[(i, j)].re);
        let e = re.symmetric_eigen();
        (
            e.eigenvalues.iter().copied().collect(),
            e.eigenvectors.map(|x| Complex64::new(x, 0.0)),
        )
    } else {
        let e = m.clone().symmetric_eigen();
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    HermitianEigen {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: CMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]),
    }
}

/// Index range of the cluster containing `j`: neighbours are chained while
/// consecutive eigenvalues are within `gap`.
pub fn cluster_around(values: &[f64], j: usize, gap: f64) -> std::ops::Range<usize> {
    let mut lo = j;
    while lo > 0 && values[lo] - values[lo - 1] <= gap {
        lo -= 1;
    }
    let mut hi = j + 1;
    while hi < values.len() && values[hi] - values[hi - 1] <= gap {
        hi += 1;
    }
    lo..hi
}

/// Solves `M x = b` for Hermitian positive definite `M`.
pub fn solve_hpd(m: &CMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let not_pd = || Error::SolverFailure("matrix is not positive definite".into());
    let chol = m.clone().cholesky().ok_or_else(not_pd)?;
    // The complex square root never fails, so definiteness is read off the factor.
    if chol
        .l_dirty()
        .diagonal()
        .iter()
        .any(|d| !(d.re > 0.0) || d.im.abs() > 1e-12 * d.re)
    {
        return Err(not_pd());
    }
    Ok(chol.solve(&DVector::from_column_slice(b)).iter().copied().collect())
}

/// Solves `M x = b` by partial-pivot LU.
pub fn solve_general(m: &CMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    m.clone()
        .lu()
        .solve(&DVector::from_column_slice(b))
        .map(|x| x.iter().copied().collect())
        .ok_or_else(|| Error::SolverFailure("singular system".into()))
}

pub fn matvec(m: &CMatrix, x: &[Complex64]) -> Vec<Complex64> {
    (m * DVector::from_column_slice(x)).iter().copied().collect()
}

/// An eigenpair refined beyond double precision.
#[derive(Debug, Clone)]
pub struct RefinedEigenpair {
    pub value: TwoFloat,
    /// Unit-norm eigenvector in double-double.
    pub vector: Vec<ComplexDd>,
    /// `‖H x − θ x‖₂` at the returned iterate.
    pub residual: f64,
    pub iterations: usize,
}

impl RefinedEigenpair {
    pub fn value_f64(&self) -> f64 {
        self.value.hi() + self.value.lo()
    }
}

fn dd(x: f64) -> TwoFloat {
    TwoFloat::from(x)
}

fn to_f64(x: TwoFloat) -> f64 {
    x.hi() + x.lo()
}

/// `1/b` to double-double accuracy. The crate's own division is only
/// accurate to about one double ulp, so one Newton step is applied.
pub fn recip_dd(b: TwoFloat) -> TwoFloat {
    let y0 = TwoFloat::from(1.0 / b.hi());
    y0 + y0 * (TwoFloat::from(1.0) - b * y0)
}

fn cdd(z: Complex64) -> ComplexDd {
    Complex::new(dd(z.re), dd(z.im))
}

/// `a · x` with `a` in double and `x` in double-double.
fn mul_mixed(a: Complex64, x: ComplexDd) -> ComplexDd {
    if a.im == 0.0 {
        Complex::new(x.re * a.re, x.im * a.re)
    } else {
        Complex::new(x.re * a.re - x.im * a.im, x.im * a.re + x.re * a.im)
    }
}

fn norm_sqr_dd(x: &[ComplexDd]) -> TwoFloat {
    x.iter().fold(dd(0.0), |acc, z| acc + z.re * z.re + z.im * z.im)
}

fn matvec_dd(m: &CMatrix, x: &[ComplexDd]) -> Vec<ComplexDd> {
    let n = m.nrows();
    let mut y = vec![Complex::new(dd(0.0), dd(0.0)); n];
    for (j, xj) in x.iter().enumerate() {
        if xj.re == dd(0.0) && xj.im == dd(0.0) {
            continue;
        }
        for (i, yi) in y.iter_mut().enumerate() {
            let a = m[(i, j)];
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            let t = mul_mixed(a, *xj);
            yi.re += t.re;
            yi.im += t.im;
        }
    }
    y
}

/// Refines eigenpair `j` of `h` by Newton-type correction: residuals are
/// formed in double-double, corrections are solved with the double
/// eigendecomposition `eig` restricted to the complement of `j`'s cluster.
///
/// Each sweep contracts the error by roughly `ε‖H‖/gap`, so a handful of
/// sweeps reach double-double accuracy for isolated eigenvalues.
pub fn refine_eigenpair(h: &CMatrix, eig: &HermitianEigen, j: usize, cluster_gap: f64) -> RefinedEigenpair {
    let n = h.nrows();
    let cluster = cluster_around(&eig.values, j, cluster_gap);
    let mut x: Vec<ComplexDd> = eig.vectors.column(j).iter().map(|&z| cdd(z)).collect();
    let mut best: Option<RefinedEigenpair> = None;
    let mut prev = f64::INFINITY;
    for it in 0..8 {
        let inv = recip_dd(norm_sqr_dd(&x).sqrt());
        for z in x.iter_mut() {
            z.re *= inv;
            z.im *= inv;
        }
        let y = matvec_dd(h, &x);
        let theta = x
            .iter()
            .zip(&y)
            .fold(dd(0.0), |acc, (a, b)| acc + a.re * b.re + a.im * b.im);
        let r: Vec<ComplexDd> = y
            .iter()
            .zip(&x)
            .map(|(yi, xi)| Complex::new(yi.re - xi.re * theta, yi.im - xi.im * theta))
            .collect();
        let rn = to_f64(norm_sqr_dd(&r)).sqrt();
        let improved = best.as_ref().is_none_or(|b| rn < b.residual);
        if improved {
            best = Some(RefinedEigenpair {
                value: theta,
                vector: x.clone(),
                residual: rn,
                iterations: it,
            });
        }
        if rn == 0.0 || (it >= 2 && rn > 0.5 * prev) {
            break;
        }
        prev = rn;
        let theta64 = to_f64(theta);
        let r64 = DVector::from_iterator(n, r.iter().map(|z| Complex64::new(to_f64(z.re), to_f64(z.im))));
        let mut coef = eig.vectors.ad_mul(&r64);
        for i in 0..n {
            if cluster.contains(&i) {
                coef[i] = Complex64::new(0.0, 0.0);
            } else {
                coef[i] /= eig.values[i] - theta64;
            }
        }
        let d = &eig.vectors * coef;
        for (xi, di) in x.iter_mut().zip(d.iter()) {
            xi.re -= di.re;
            xi.im -= di.im;
        }
    }
    best.expect("at least one sweep")
}
