//! The planewave Galerkin eigenproblem for `H = −Δ + V` and convergence
//! studies against a high-cutoff reference.

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fit;
use crate::format;
use crate::fourier::{self, FourierSeries1D, INV_SQRT_2PI};
use crate::linalg::{self, CMatrix, ComplexDd, HermitianEigen};

/// Relative tolerance for the real-valuedness check on `V`.
const REAL_TOL: f64 = 1e-12;

/// Default gap below which neighbouring eigenvalues form one cluster.
pub const DEFAULT_CLUSTER_GAP: f64 = 1e-8;

/// Error rows at or below this level are excluded from rate fits when
/// eigenpairs are computed in plain double precision.
pub const DOUBLE_ERROR_FLOOR: f64 = 1e-12;

/// Floor for refined (double-double) eigenpairs. The residual of a refined
/// pair sits near `1e-31 ‖H‖`, so at `N_ref = 256` eigenvalue differences
/// are trustworthy well below this level.
pub const REFINED_ERROR_FLOOR: f64 = 1e-26;

/// `H_N` with rows and columns indexed by `k = −N..=N`.
#[derive(Debug, Clone)]
pub struct GalerkinMatrix {
    cutoff: usize,
    entries: CMatrix,
}

impl GalerkinMatrix {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        2 * self.cutoff + 1
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// Entry `(k, k')`.
    pub fn get(&self, k: i64, kp: i64) -> Complex64 {
        let n = self.cutoff as i64;
        self.entries[((k + n) as usize, (kp + n) as usize)]
    }

    pub fn hermitian_defect(&self) -> f64 {
        linalg::hermitian_defect(&self.entries)
    }
}

/// Assembles `[H_N]_{kk'} = k² δ_{kk'} + (2π)^{-1/2} V̂_{k−k'}`.
///
/// Coefficients of `V` beyond its cutoff count as zero. The matrix is
/// Hermitian exactly when `V` is real-valued.
pub fn assemble_hn(v: &FourierSeries1D, n: usize) -> GalerkinMatrix {
    let nn = n as i64;
    let dim = 2 * n + 1;
    let entries = CMatrix::from_fn(dim, dim, |i, j| {
        let k = i as i64 - nn;
        let kp = j as i64 - nn;
        let mut e = v.coeff(k - kp) * INV_SQRT_2PI;
        if i == j {
            e = Complex64::new((k * k) as f64 + e.re, 0.0);
        }
        e
    });
    GalerkinMatrix { cutoff: n, entries }
}

pub(crate) fn check_real_potential(v: &FourierSeries1D) -> Result<()> {
    let scale = v.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    if !v.is_real_valued(REAL_TOL * scale.max(1.0)) {
        return Err(Error::invalid("potential must be real-valued"));
    }
    Ok(())
}

/// Lowest eigenpairs of `H_N`.
#[derive(Debug, Clone, Serialize)]
pub struct EigenResult {
    pub cutoff: usize,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// L²-normalized; the phase makes the largest coefficient real positive.
    #[serde(skip)]
    pub eigenvectors: Vec<FourierSeries1D>,
    /// `‖H_N û_j − λ_j û_j‖₂`.
    pub residuals: Vec<f64>,
}

fn fix_phase(v: &mut [Complex64]) {
    let Some(big) = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())) else {
        return;
    };
    if big.norm() == 0.0 {
        return;
    }
    let ph = big.conj() / big.norm();
    for z in v.iter_mut() {
        *z *= ph;
    }
}

fn result_from(h: &GalerkinMatrix, eig: &HermitianEigen, j_max: usize) -> EigenResult {
    let mut eigenvectors = Vec::with_capacity(j_max);
    let mut residuals = Vec::with_capacity(j_max);
    for j in 0..j_max {
        let mut v = eig.vector(j);
        fix_phase(&mut v);
        let hv = linalg::matvec(&h.entries, &v);
        let r = hv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b * eig.values[j]).norm_sqr())
            .sum::<f64>()
            .sqrt();
        residuals.push(r);
        eigenvectors.push(FourierSeries1D::new(h.cutoff, v).expect("dimension matches"));
    }
    EigenResult {
        cutoff: h.cutoff,
        eigenvalues: eig.values[..j_max].to_vec(),
        eigenvectors,
        residuals,
    }
}

/// The `j_max` lowest eigenpairs of `H_N`.
pub fn solve_eig(v: &FourierSeries1D, n: usize, j_max: usize) -> Result<EigenResult> {
    check_real_potential(v)?;
    let dim = 2 * n + 1;
    if j_max > dim {
        return Err(Error::invalid(format!("j_max = {j_max} exceeds dimension {dim}")));
    }
    let h = assemble_hn(v, n);
    let eig = linalg::eigh(&h.entries);
    Ok(result_from(&h, &eig, j_max))
}

/// An eigenvalue carried as an unevaluated sum `value + correction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefinedEigenvalue {
    pub value: f64,
    pub correction: f64,
    /// `‖H_N x − θ x‖₂` of the refined pair.
    pub residual: f64,
}

impl RefinedEigenvalue {
    /// `self − other`, accurate below the double rounding level of either value.
    pub fn minus(&self, other: &Self) -> f64 {
        to_f64(TwoFloat::new_add(self.value, self.correction) - TwoFloat::new_add(other.value, other.correction))
    }
}

/// The `j`-th eigenvalue (1-based) of `H_N` refined to double-double.
/// Only isolated eigenvalues can be refined.
pub fn refined_eigenvalue(v: &FourierSeries1D, n: usize, j: usize, cluster_gap: f64) -> Result<RefinedEigenvalue> {
    check_real_potential(v)?;
    if j == 0 || j > 2 * n + 1 {
        return Err(Error::invalid(format!(
            "eigenvalue index {j} outside 1..={}",
            2 * n + 1
        )));
    }
    let h = assemble_hn(v, n);
    let eig = linalg::eigh(&h.entries);
    let cluster = linalg::cluster_around(&eig.values, j - 1, cluster_gap);
    if cluster.len() > 1 {
        return Err(Error::Degeneracy {
            index: j,
            cluster_size: cluster.len(),
        });
    }
    let r = linalg::refine_eigenpair(&h.entries, &eig, j - 1, cluster_gap);
    Ok(RefinedEigenvalue {
        value: r.value.hi(),
        correction: r.value.lo(),
        residual: r.residual,
    })
}

fn zero_dd() -> ComplexDd {
    Complex::new(TwoFloat::from(0.0), TwoFloat::from(0.0))
}

fn to_f64(x: TwoFloat) -> f64 {
    x.hi() + x.lo()
}

/// A coefficient vector on `k = −N..=N` in double-double.
#[derive(Debug, Clone)]
struct DdVector {
    cutoff: usize,
    coeffs: Vec<ComplexDd>,
}

impl DdVector {
    fn from_series(u: &FourierSeries1D) -> Self {
        Self {
            cutoff: u.cutoff(),
            coeffs: u
                .coeffs()
                .iter()
                .map(|z| Complex::new(TwoFloat::from(z.re), TwoFloat::from(z.im)))
                .collect(),
        }
    }

    fn coeff(&self, k: i64) -> ComplexDd {
        let n = self.cutoff as i64;
        if k.abs() > n {
            zero_dd()
        } else {
            self.coeffs[(k + n) as usize]
        }
    }
}

/// `⟨a, b⟩_{H¹} = Σ (1+k²) conj(a_k) b_k`.
fn h1_inner_dd(a: &DdVector, b: &DdVector) -> ComplexDd {
    let n = a.cutoff.min(b.cutoff) as i64;
    let mut acc = zero_dd();
    for k in -n..=n {
        let w = (1 + k * k) as f64;
        let x = a.coeff(k);
        let y = b.coeff(k);
        acc.re += (x.re * y.re + x.im * y.im) * w;
        acc.im += (x.re * y.im - x.im * y.re) * w;
    }
    acc
}

/// `u − Σ_i q_i ⟨q_i, u⟩` on the union of the cutoffs.
fn subtract_projection(u: &DdVector, qs: &[DdVector]) -> DdVector {
    let n = qs.iter().map(|q| q.cutoff).fold(u.cutoff, usize::max);
    let nn = n as i64;
    let mut r: Vec<ComplexDd> = (-nn..=nn).map(|k| u.coeff(k)).collect();
    for q in qs {
        let c = h1_inner_dd(q, u);
        for k in -(q.cutoff as i64)..=(q.cutoff as i64) {
            let qk = q.coeff(k);
            let t = &mut r[(k + nn) as usize];
            t.re -= qk.re * c.re - qk.im * c.im;
            t.im -= qk.re * c.im + qk.im * c.re;
        }
    }
    DdVector { cutoff: n, coeffs: r }
}

fn h1_norm_dd(u: &DdVector) -> TwoFloat {
    h1_inner_dd(u, u).re.sqrt()
}

/// H¹-orthonormal basis of `span(basis)` by modified Gram–Schmidt with
/// reorthogonalization. Numerically dependent vectors are dropped.
fn h1_orthonormalize(basis: &[DdVector]) -> Vec<DdVector> {
    let mut out: Vec<DdVector> = Vec::with_capacity(basis.len());
    for b in basis {
        let before = to_f64(h1_norm_dd(b));
        let mut v = subtract_projection(b, &out);
        v = subtract_projection(&v, &out);
        let nrm = h1_norm_dd(&v);
        if before == 0.0 || to_f64(nrm) <= 1e-14 * before {
            continue;
        }
        let inv = linalg::recip_dd(nrm);
        for z in v.coeffs.iter_mut() {
            z.re *= inv;
            z.im *= inv;
        }
        out.push(v);
    }
    out
}

fn h1_distance_dd(u: &DdVector, basis: &[DdVector]) -> Result<f64> {
    if basis.is_empty() {
        return Err(Error::invalid("basis must be nonempty"));
    }
    let q = h1_orthonormalize(basis);
    Ok(to_f64(h1_norm_dd(&subtract_projection(u, &q))))
}

/// `‖u − P u‖_{H¹}` with `P` the H¹-orthogonal projector onto `span(basis)`.
///
/// Arithmetic is carried in double-double so distances well below the
/// double rounding level of `‖u‖_{H¹}` are resolved.
pub fn h1_distance(u: &FourierSeries1D, basis: &[FourierSeries1D]) -> Result<f64> {
    let b: Vec<DdVector> = basis.iter().map(DdVector::from_series).collect();
    h1_distance_dd(&DdVector::from_series(u), &b)
}

/// Arithmetic used for eigenpairs in a convergence study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Double,
    /// Double eigendecomposition followed by double-double refinement of
    /// isolated eigenpairs. Clustered eigenpairs stay in double.
    Refined,
}

#[derive(Debug, Clone, Copy)]
pub struct ConvergenceOptions {
    pub cluster_gap: f64,
    /// Measure distances to the full near-degenerate cluster at `N_ref`
    /// instead of failing on a degeneracy.
    pub cluster_mode: bool,
    pub precision: Precision,
    pub execution: Execution,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self {
            cluster_gap: DEFAULT_CLUSTER_GAP,
            cluster_mode: false,
            precision: Precision::Double,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    /// `λ_{j,N} − λ_{j,ref}`.
    pub lambda_err: f64,
    /// `d_{H¹}(u_{j,N}, 𝓔_{j,ref})`.
    pub h1_dist: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub j: usize,
    pub n_ref: usize,
    pub a_claim: f64,
    pub precision: Precision,
    /// Dimension of the reference eigenspace used for distances.
    pub cluster_size: usize,
    /// Rows at or below this level are excluded from the fits.
    pub error_floor: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Slope of `ln(λ error)` against `N`; `None` with fewer than two usable rows.
    pub fitted_rate_eigenvalue: Option<f64>,
    pub fitted_rate_eigenvector: Option<f64>,
}

#[derive(Serialize)]
struct Sidecar {
    j: usize,
    #[serde(rename = "N_ref")]
    n_ref: usize,
    #[serde(rename = "A_claim")]
    a_claim: f64,
    fitted_rate_eigenvalue: Option<f64>,
    fitted_rate_eigenvector: Option<f64>,
    precision: Precision,
    error_floor: f64,
    cluster_size: usize,
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let rows: Vec<Vec<f64>> = self
            .rows
            .iter()
            .map(|r| vec![r.n as f64, r.lambda_err, r.h1_dist])
            .collect();
        format::csv(&["N", "lambda_err", "h1_dist"], &rows)
    }

    pub fn sidecar_json(&self) -> String {
        serde_json::to_string_pretty(&Sidecar {
            j: self.j,
            n_ref: self.n_ref,
            a_claim: self.a_claim,
            fitted_rate_eigenvalue: self.fitted_rate_eigenvalue,
            fitted_rate_eigenvector: self.fitted_rate_eigenvector,
            precision: self.precision,
            error_floor: self.error_floor,
            cluster_size: self.cluster_size,
        })
        .expect("plain data serializes")
    }

    /// Eigenvalue errors are nonnegative and nonincreasing in `N`, allowing
    /// the floor as slack.
    pub fn is_monotone(&self) -> bool {
        let f = self.error_floor;
        self.rows.iter().all(|r| r.lambda_err >= -f)
            && self.rows.windows(2).all(|w| w[1].lambda_err <= w[0].lambda_err + f)
    }

    /// Whether the fitted rates certify `A_claim` (eigenvalue rate ≤ −2A and
    /// eigenvector rate ≤ −A) within the relative `slack`.
    pub fn certifies(&self, slack: f64) -> bool {
        let a = self.a_claim;
        matches!(self.fitted_rate_eigenvalue, Some(r) if r <= -2.0 * a * (1.0 - slack))
            && matches!(self.fitted_rate_eigenvector, Some(r) if r <= -a * (1.0 - slack))
    }

    /// Least-squares slope of `ln λerr` against `ln d_{H¹}` over rows where
    /// both are above the floor and the row is not the smallest `N`.
    pub fn error_relation_slope(&self) -> Option<f64> {
        let (x, y): (Vec<f64>, Vec<f64>) = self
            .fit_rows()
            .filter(|r| r.lambda_err > self.error_floor && r.h1_dist > self.error_floor)
            .map(|r| (r.h1_dist.ln(), r.lambda_err.ln()))
            .unzip();
        fit::line(&x, &y).map(|(_, b, _)| b)
    }

    fn fit_rows(&self) -> impl Iterator<Item = &ConvergenceRow> {
        self.rows.iter().skip(1)
    }

    fn fit_rate(&self, select: impl Fn(&ConvergenceRow) -> f64) -> Option<f64> {
        let (x, y): (Vec<f64>, Vec<f64>) = self
            .fit_rows()
            .filter(|r| select(r) > self.error_floor)
            .map(|r| (r.n as f64, select(r).ln()))
            .unzip();
        fit::line(&x, &y).map(|(_, b, _)| b)
    }
}

/// An eigenpair in double-double, or promoted from double.
struct Pair {
    value: TwoFloat,
    vector: DdVector,
}

fn pair_at(h: &GalerkinMatrix, eig: &HermitianEigen, idx: usize, refine: bool, gap: f64) -> Pair {
    if refine {
        let r = linalg::refine_eigenpair(&h.entries, eig, idx, gap);
        Pair {
            value: r.value,
            vector: DdVector {
                cutoff: h.cutoff,
                coeffs: r.vector,
            },
        }
    } else {
        let v = FourierSeries1D::new(h.cutoff, eig.vector(idx)).expect("dimension matches");
        Pair {
            value: TwoFloat::from(eig.values[idx]),
            vector: DdVector::from_series(&v),
        }
    }
}

/// Errors of the `j`-th eigenpair (1-based) at each `N` in `n_list` against
/// the reference at `n_ref`, with fitted exponential rates.
pub fn convergence_study(
    v: &FourierSeries1D,
    n_list: &[usize],
    n_ref: usize,
    j: usize,
    a_claim: f64,
    opts: ConvergenceOptions,
) -> Result<ConvergenceTable> {
    check_real_potential(v)?;
    fourier::StripNormParams::new(a_claim)?;
    if j == 0 {
        return Err(Error::invalid("eigenvalue index j is 1-based"));
    }
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("N_list must be nonempty and strictly ascending"));
    }
    let n_max = *n_list.last().expect("nonempty");
    if n_ref < 2 * n_max {
        return Err(Error::invalid(format!(
            "N_ref = {n_ref} must be at least 2·max(N_list) = {}",
            2 * n_max
        )));
    }
    if 2 * n_list[0] + 1 < j {
        return Err(Error::invalid(format!(
            "cutoff {} too small for eigenvalue {j}",
            n_list[0]
        )));
    }

    let idx = j - 1;
    let gap = opts.cluster_gap;
    let h_ref = assemble_hn(v, n_ref);
    let eig_ref = linalg::eigh(&h_ref.entries);
    let cluster = linalg::cluster_around(&eig_ref.values, idx, gap);
    if cluster.len() > 1 && !opts.cluster_mode {
        return Err(Error::Degeneracy {
            index: j,
            cluster_size: cluster.len(),
        });
    }
    let refine = opts.precision == Precision::Refined && cluster.len() == 1;
    let reference = pair_at(&h_ref, &eig_ref, idx, refine, gap);
    let space: Vec<DdVector> = if cluster.len() == 1 {
        vec![reference.vector.clone()]
    } else {
        cluster
            .clone()
            .map(|i| pair_at(&h_ref, &eig_ref, i, false, gap).vector)
            .collect()
    };
    let space = h1_orthonormalize(&space);

    let rows = opts.execution.try_map(n_list, |&n| -> Result<ConvergenceRow> {
        let h = assemble_hn(v, n);
        let eig = linalg::eigh(&h.entries);
        let p = pair_at(&h, &eig, idx, refine, gap);
        let lambda_err = to_f64(p.value - reference.value);
        let h1_dist = to_f64(h1_norm_dd(&subtract_projection(&p.vector, &space)));
        Ok(ConvergenceRow { n, lambda_err, h1_dist })
    })?;

    let mut table = ConvergenceTable {
        j,
        n_ref,
        a_claim,
        precision: if refine { Precision::Refined } else { Precision::Double },
        cluster_size: cluster.len(),
        error_floor: if refine {
            REFINED_ERROR_FLOOR
        } else {
            DOUBLE_ERROR_FLOOR
        },
        rows,
        fitted_rate_eigenvalue: None,
        fitted_rate_eigenvector: None,
    };
    table.fitted_rate_eigenvalue = table.fit_rate(|r| r.lambda_err);
    table.fitted_rate_eigenvector = table.fit_rate(|r| r.h1_dist);
    Ok(table)
}

/// Both sides of the strip bound for an eigenvector,
/// `‖u‖_A ≤ (1 + ‖V‖) √(w_A(√(‖V‖ + λ + 1)))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigvecStripReport {
    pub j: usize,
    pub cutoff: usize,
    pub a: f64,
    pub eigenvalue: f64,
    pub norm_a: f64,
    /// Sup-norm surrogate for `‖V‖_{𝓛(𝓗_A)}`.
    pub v_opnorm: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn eigvec_strip_check(v: &FourierSeries1D, n: usize, j: usize, a: f64) -> Result<EigvecStripReport> {
    if j == 0 {
        return Err(Error::invalid("eigenvalue index j is 1-based"));
    }
    let res = solve_eig(v, n, j)?;
    let u = &res.eigenvectors[j - 1];
    let lambda = res.eigenvalues[j - 1];
    let norm_a = fourier::norm_a(u, a)?;
    let v_opnorm = fourier::op_norm_bound(v, a, fourier::default_sup_grid(v.cutoff().max(n)))?;
    let t = (v_opnorm + lambda + 1.0).max(0.0).sqrt();
    let bound = (1.0 + v_opnorm) * fourier::weight_real(a, t)?.sqrt();
    Ok(EigvecStripReport {
        j,
        cutoff: n,
        a,
        eigenvalue: lambda,
        norm_a,
        v_opnorm,
        bound,
        holds: norm_a <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn free_matrix_is_diagonal() {
        let h = assemble_hn(&FourierSeries1D::zeros(0), 2);
        for (i, d) in [4.0, 1.0, 0.0, 1.0, 4.0].iter().enumerate() {
            for jj in 0..5 {
                let want = if i == jj { *d } else { 0.0 };
                assert_eq!(h.entries()[(i, jj)], c(want, 0.0));
            }
        }
    }

    #[test]
    fn constant_shifts_diagonal() {
        let h = assemble_hn(&potential::constant(3.0), 2);
        assert!((h.get(0, 0).re - 3.0).abs() < 1e-15);
        assert!((h.get(-2, -2).re - 7.0).abs() < 1e-15);
        assert_eq!(h.get(1, 0), c(0.0, 0.0));
    }

    #[test]
    fn mathieu_matrix_is_pentadiagonal() {
        let h = assemble_hn(&potential::mathieu(1.0), 6);
        assert_eq!(h.hermitian_defect(), 0.0);
        for k in -6i64..=6 {
            for kp in -6i64..=6 {
                let e = h.get(k, kp);
                match (k - kp).abs() {
                    0 => assert_eq!(e, c((k * k) as f64, 0.0)),
                    2 => assert!((e - c(1.0, 0.0)).norm() < 1e-15),
                    _ => assert_eq!(e, c(0.0, 0.0)),
                }
            }
        }
    }

    #[test]
    fn free_spectrum() {
        let r = solve_eig(&FourierSeries1D::zeros(0), 4, 9).unwrap();
        let want = [0.0, 1.0, 1.0, 4.0, 4.0, 9.0, 9.0, 16.0, 16.0];
        for (a, b) in r.eigenvalues.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        for u in &r.eigenvectors {
            assert!((u.l2_norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn j_max_checked() {
        assert!(matches!(
            solve_eig(&FourierSeries1D::zeros(0), 2, 6),
            Err(Error::InvalidParameter(_))
        ));
        let complex_v = FourierSeries1D::mode(1, c(1.0, 0.0));
        assert!(solve_eig(&complex_v, 2, 1).is_err());
    }

    #[test]
    fn mathieu_lowest() {
        let r = solve_eig(&potential::mathieu(1.0), 64, 3).unwrap();
        assert!((r.eigenvalues[0] + 0.455_139).abs() < 1e-6);
        assert!(r.residuals.iter().all(|&x| x < 1e-10));
    }

    #[test]
    fn mathieu_self_refinement() {
        let v = potential::mathieu(1.0);
        let a = refined_eigenvalue(&v, 64, 1, DEFAULT_CLUSTER_GAP).unwrap();
        let b = refined_eigenvalue(&v, 128, 1, DEFAULT_CLUSTER_GAP).unwrap();
        assert!(a.minus(&b).abs() < 1e-25);
        assert!(refined_eigenvalue(&FourierSeries1D::zeros(0), 4, 2, DEFAULT_CLUSTER_GAP).is_err());
    }

    #[test]
    fn h1_distance_examples() {
        let e1 = FourierSeries1D::mode(1, c(1.0, 0.0));
        let e2 = FourierSeries1D::mode(2, c(1.0, 0.0));
        assert!((h1_distance(&e2, std::slice::from_ref(&e1)).unwrap() - 5f64.sqrt()).abs() < 1e-14);
        let mix = &(&e1 * 2.0) + &e2;
        assert!(h1_distance(&mix, &[e1.clone(), e2.clone()]).unwrap() < 1e-12);
        // a rotated basis of the same span
        let b1 = &e1 + &e2;
        let b2 = &e1 - &e2;
        let d = h1_distance(&mix, &[b1, b2]).unwrap();
        assert!(d < 1e-12);
        assert!(h1_distance(&e1, &[]).is_err());
    }

    #[test]
    fn free_study_has_zero_errors() {
        let opts = ConvergenceOptions {
            cluster_mode: true,
            ..Default::default()
        };
        let t = convergence_study(&FourierSeries1D::zeros(0), &[2, 3, 4], 8, 2, 1.0, opts).unwrap();
        assert_eq!(t.cluster_size, 2);
        for r in &t.rows {
            assert!(r.lambda_err.abs() < 1e-12 && r.h1_dist < 1e-12);
        }
        assert!(t.fitted_rate_eigenvalue.is_none());
        assert!(t.is_monotone());
        let err = convergence_study(
            &FourierSeries1D::zeros(0),
            &[2, 3],
            8,
            2,
            1.0,
            ConvergenceOptions::default(),
        );
        assert!(matches!(err, Err(Error::Degeneracy { cluster_size: 2, .. })));
    }

    #[test]
    fn study_preconditions() {
        let v = potential::mathieu(1.0);
        let o = ConvergenceOptions::default();
        assert!(convergence_study(&v, &[4, 8], 12, 1, 1.0, o).is_err());
        assert!(convergence_study(&v, &[8, 4], 16, 1, 1.0, o).is_err());
        assert!(convergence_study(&v, &[4, 8], 16, 0, 1.0, o).is_err());
    }

    #[test]
    fn finite_strip_rates() {
        let v = potential::poisson_kernel(2.0, 1.0, 0.0, 64).unwrap();
        let t = convergence_study(&v, &[2, 3, 4, 5, 6], 24, 1, 1.0, ConvergenceOptions::default()).unwrap();
        assert!(t.is_monotone());
        assert!(t.certifies(0.1), "{t:?}");
    }

    #[test]
    fn csv_and_sidecar() {
        let v = potential::mathieu(1.0);
        let t = convergence_study(&v, &[2, 4], 8, 1, 1.0, ConvergenceOptions::default()).unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("N,lambda_err,h1_dist\n2,"));
        let js: serde_json::Value = serde_json::from_str(&t.sidecar_json()).unwrap();
        assert_eq!(js["N_ref"], 8);
        assert_eq!(js["j"], 1);
    }

    #[test]
    fn strip_check_free_and_finite() {
        let r = eigvec_strip_check(&FourierSeries1D::zeros(0), 4, 2, 0.5).unwrap();
        assert!((r.norm_a - fourier::weight(0.5, 1).unwrap().sqrt()).abs() < 1e-12);
        assert!(r.holds);
        let v = potential::poisson_kernel(2.0, 1.0, 0.0, 64).unwrap();
        let r = eigvec_strip_check(&v, 32, 1, 0.8).unwrap();
        assert!(r.holds, "{r:?}");
    }
}
