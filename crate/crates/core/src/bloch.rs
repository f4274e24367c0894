//! Bravais lattices in `d ≤ 3`, planewave bases of Bloch fibers
//! `H_k = (−i∇ + k)² + V`, band structures and Brillouin-zone convergence.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fit;
use crate::format;
use crate::fourier::FourierSeries1D;
use crate::linalg::{self, CMatrix};

/// Wavevectors with `|G + k| ≤ N(1 + BASIS_TOL)` are kept, so that lattice
/// points exactly on the sphere do not depend on rounding.
pub const BASIS_TOL: f64 = 1e-12;

/// Integer coordinates, padded with zeros beyond the dimension.
pub type Coords = [i64; 3];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lattice {
    /// Columns are the basis vectors `a_1..a_d`.
    #[serde(serialize_with = "ser_matrix")]
    basis: DMatrix<f64>,
}

fn ser_matrix<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.ncols()))?;
    for c in m.column_iter() {
        seq.serialize_element(&c.iter().copied().collect::<Vec<f64>>())?;
    }
    seq.end()
}

impl Lattice {
    /// A lattice from `d` linearly independent vectors of length `d`.
    pub fn new(vectors: &[Vec<f64>]) -> Result<Self> {
        let d = vectors.len();
        if !(1..=3).contains(&d) {
            return Err(Error::invalid(format!("dimension must be 1, 2 or 3, got {d}")));
        }
        if vectors.iter().any(|v| v.len() != d || v.iter().any(|x| !x.is_finite())) {
            return Err(Error::invalid(format!(
                "expected {d} finite components per basis vector"
            )));
        }
        let basis = DMatrix::from_fn(d, d, |i, j| vectors[j][i]);
        let scale: f64 = vectors
            .iter()
            .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
            .product();
        if basis.determinant().abs() <= 1e-12 * scale {
            return Err(Error::invalid("basis vectors are linearly dependent"));
        }
        Ok(Self { basis })
    }

    /// `L · ê_i` for `i < d`.
    pub fn cubic(d: usize, l: f64) -> Result<Self> {
        let v: Vec<Vec<f64>> = (0..d)
            .map(|i| (0..d).map(|j| if i == j { l } else { 0.0 }).collect())
            .collect();
        Self::new(&v)
    }

    /// `2πℤ`, the lattice of 2π-periodic functions on the line.
    pub fn periodic_1d() -> Self {
        Self::new(&[vec![2.0 * PI]]).expect("valid")
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.basis.column(i).iter().copied().collect()
    }

    pub fn unit_cell_volume(&self) -> f64 {
        self.basis.determinant().abs()
    }

    /// Basis `b_n` with `a_m · b_n = 2π δ_{mn}`.
    pub fn reciprocal(&self) -> Lattice {
        let inv = self.basis.clone().try_inverse().expect("nonsingular basis");
        Lattice {
            basis: inv.transpose() * (2.0 * PI),
        }
    }

    /// `Σ n_i a_i`.
    pub fn point(&self, n: &Coords) -> DVector<f64> {
        let d = self.dim();
        self.basis.clone() * DVector::from_iterator(d, n[..d].iter().map(|&x| x as f64))
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn check_k(lattice: &Lattice, k: &[f64]) -> Result<()> {
    if k.len() != lattice.dim() {
        return Err(Error::invalid(format!(
            "k has {} components, lattice dimension is {}",
            k.len(),
            lattice.dim()
        )));
    }
    Ok(())
}

/// `w_{A,𝕃}(G) = Σ_n cosh(2A (2π)⁻¹ G·a_n)`.
pub fn weight_multid(a: f64, lattice: &Lattice, g: &[f64]) -> Result<f64> {
    check_k(lattice, g)?;
    crate::fourier::StripNormParams::new(a)?;
    Ok((0..lattice.dim())
        .map(|n| {
            let proj: f64 = lattice.basis.column(n).iter().zip(g).map(|(x, y)| x * y).sum();
            (2.0 * a * proj / (2.0 * PI)).cosh()
        })
        .sum())
}

/// `{G ∈ 𝕃* : |G + k| ≤ N}` in lexicographic order of integer coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanewaveBasis {
    /// The real-space lattice `𝕃`.
    pub lattice: Lattice,
    pub k_point: Vec<f64>,
    pub cutoff: f64,
    /// Coordinates of each `G` in the reciprocal basis.
    pub wavevectors: Vec<Coords>,
}

impl PlanewaveBasis {
    pub fn dim(&self) -> usize {
        self.wavevectors.len()
    }

    /// Cartesian `G` of entry `i`.
    pub fn g(&self, i: usize) -> Vec<f64> {
        self.lattice
            .reciprocal()
            .point(&self.wavevectors[i])
            .iter()
            .copied()
            .collect()
    }

    /// The same set in another order: entry `i` of the result is entry
    /// `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.dim()];
        if perm.len() != self.dim()
            || perm
                .iter()
                .any(|&p| p >= seen.len() || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::invalid("not a permutation of the basis"));
        }
        Ok(Self {
            wavevectors: perm.iter().map(|&p| self.wavevectors[p]).collect(),
            ..self.clone()
        })
    }
}

/// Enumerates the planewave basis by scanning the bounding box
/// `|n_i| ≤ |a_i| (N + |k|)/2π` of integer coordinates.
pub fn basis_set(lattice: &Lattice, k: &[f64], n: f64) -> Result<PlanewaveBasis> {
    check_k(lattice, k)?;
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::invalid(format!("cutoff must be positive, got {n}")));
    }
    let d = lattice.dim();
    let reach = n + norm(k);
    let bounds: Vec<i64> = (0..d)
        .map(|i| (norm(&lattice.vector(i)) * reach / (2.0 * PI)).floor() as i64 + 1)
        .collect();
    let recip = lattice.reciprocal();
    let limit = n * (1.0 + BASIS_TOL);
    let mut out = Vec::new();
    let mut c: Coords = [0; 3];
    scan_box(&bounds, 0, &mut c, &mut |c| {
        let g = recip.point(c);
        let len = g.iter().zip(k).map(|(x, y)| (x + y).powi(2)).sum::<f64>().sqrt();
        if len <= limit {
            out.push(*c);
        }
    });
    Ok(PlanewaveBasis {
        lattice: lattice.clone(),
        k_point: k.to_vec(),
        cutoff: n,
        wavevectors: out,
    })
}

/// Visits every integer tuple in the box in lexicographic order.
fn scan_box(bounds: &[i64], axis: usize, c: &mut Coords, f: &mut impl FnMut(&Coords)) {
    if axis == bounds.len() {
        f(c);
        return;
    }
    for v in -bounds[axis]..=bounds[axis] {
        c[axis] = v;
        scan_box(bounds, axis + 1, c, f);
    }
    c[axis] = 0;
}

/// Coefficients `V̂_G` of an `𝕃`-periodic function, keyed by the
/// coordinates of `G` in the reciprocal basis. Absent keys are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeriesD {
    pub lattice: Lattice,
    pub coeffs: BTreeMap<Coords, Complex64>,
}

impl FourierSeriesD {
    pub fn new(lattice: Lattice) -> Self {
        Self {
            lattice,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn coeff(&self, g: &Coords) -> Complex64 {
        self.coeffs.get(g).copied().unwrap_or_default()
    }

    /// A 1D series on `2πℤ`, whose reciprocal lattice is `ℤ`.
    pub fn from_1d(u: &FourierSeries1D) -> Self {
        let mut s = Self::new(Lattice::periodic_1d());
        for (k, c) in u.iter() {
            if c != Complex64::new(0.0, 0.0) {
                s.coeffs.insert([k, 0, 0], c);
            }
        }
        s
    }

    pub fn is_real_valued(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|(g, c)| {
            let m = [-g[0], -g[1], -g[2]];
            (self.coeff(&m) - c.conj()).norm() <= tol
        })
    }

    /// `V(x) = |Ω|^{-1/2} Σ_G V̂_G e^{iG·x}`.
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let recip = self.lattice.reciprocal();
        let s: Complex64 = self
            .coeffs
            .iter()
            .map(|(g, c)| {
                let gx: f64 = recip.point(g).iter().zip(x).map(|(a, b)| a * b).sum();
                c * Complex64::from_polar(1.0, gx)
            })
            .sum();
        s / self.lattice.unit_cell_volume().sqrt()
    }
}

/// `[H_k]_{GG'} = |G+k|² δ_{GG'} + |Ω|^{-1/2} V̂_{G−G'}` on the basis.
pub fn assemble_bloch(v: &FourierSeriesD, basis: &PlanewaveBasis) -> CMatrix {
    let scale = 1.0 / basis.lattice.unit_cell_volume().sqrt();
    let dim = basis.dim();
    let recip = basis.lattice.reciprocal();
    let kin: Vec<f64> = basis
        .wavevectors
        .iter()
        .map(|c| {
            recip
                .point(c)
                .iter()
                .zip(&basis.k_point)
                .map(|(g, k)| (g + k).powi(2))
                .sum()
        })
        .collect();
    CMatrix::from_fn(dim, dim, |i, j| {
        let a = &basis.wavevectors[i];
        let b = &basis.wavevectors[j];
        let mut e = v.coeff(&[a[0] - b[0], a[1] - b[1], a[2] - b[2]]) * scale;
        if i == j {
            e = Complex64::new(kin[i] + e.re, 0.0);
        }
        e
    })
}

fn check_real(v: &FourierSeriesD) -> Result<()> {
    let scale = v.coeffs.values().map(|c| c.norm()).fold(1.0, f64::max);
    if !v.is_real_valued(1e-12 * scale) {
        return Err(Error::invalid("potential must be real-valued"));
    }
    Ok(())
}

/// Lowest `n_bands` eigenvalues of `H_k` on the basis of cutoff `N`.
pub fn bloch_eigenvalues(v: &FourierSeriesD, k: &[f64], n: f64, n_bands: usize) -> Result<Vec<f64>> {
    let basis = basis_set(&v.lattice, k, n)?;
    if basis.dim() < n_bands {
        return Err(Error::invalid(format!(
            "basis at k = {k:?} has {} planewaves, fewer than {n_bands} bands",
            basis.dim()
        )));
    }
    let h = assemble_bloch(v, &basis);
    Ok(linalg::eigh(&h).values[..n_bands].to_vec())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandStructure {
    pub k_path: Vec<Vec<f64>>,
    /// Cumulative path length.
    pub path_parameter: Vec<f64>,
    /// `bands[i][n]` is `λ_{n+1}` at `k_path[i]`.
    pub bands: Vec<Vec<f64>>,
    pub cutoff: f64,
}

impl BandStructure {
    pub fn to_csv(&self) -> String {
        let d = self.k_path.first().map_or(0, |k| k.len());
        let nb = self.bands.first().map_or(0, |b| b.len());
        let mut header: Vec<String> = vec!["path_parameter".into()];
        header.extend((1..=d).map(|i| format!("k{i}")));
        header.extend((1..=nb).map(|i| format!("lambda_{i}")));
        let h: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows: Vec<Vec<f64>> = (0..self.k_path.len())
            .map(|i| {
                let mut r = vec![self.path_parameter[i]];
                r.extend(&self.k_path[i]);
                r.extend(&self.bands[i]);
                r
            })
            .collect();
        format::csv(&h, &rows)
    }
}

pub fn band_structure(
    v: &FourierSeriesD,
    k_path: &[Vec<f64>],
    n: f64,
    n_bands: usize,
    exec: Execution,
) -> Result<BandStructure> {
    check_real(v)?;
    let bands = exec.try_map(k_path, |k| bloch_eigenvalues(v, k, n, n_bands))?;
    let mut path_parameter = Vec::with_capacity(k_path.len());
    let mut s = 0.0;
    for (i, k) in k_path.iter().enumerate() {
        if i > 0 {
            s += norm(&k.iter().zip(&k_path[i - 1]).map(|(a, b)| a - b).collect::<Vec<_>>());
        }
        path_parameter.push(s);
    }
    Ok(BandStructure {
        k_path: k_path.to_vec(),
        path_parameter,
        bands,
        cutoff: n,
    })
}

/// Straight segments through `corners` with `per_segment` steps each.
pub fn k_path(corners: &[Vec<f64>], per_segment: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for w in corners.windows(2) {
        for s in 0..per_segment.max(1) {
            let t = s as f64 / per_segment.max(1) as f64;
            out.push(w[0].iter().zip(&w[1]).map(|(a, b)| a + t * (b - a)).collect());
        }
    }
    if let Some(last) = corners.last() {
        out.push(last.clone());
    }
    out
}

/// Monkhorst–Pack grid `Σ_i (2r_i − q_i − 1)/(2q_i) b_i`, each point
/// translated into the Voronoi cell of `𝕃*` around the origin.
pub fn monkhorst_pack(lattice: &Lattice, sizes: &[usize]) -> Result<Vec<Vec<f64>>> {
    let d = lattice.dim();
    if sizes.len() != d || sizes.contains(&0) {
        return Err(Error::invalid(format!("need {d} positive grid sizes")));
    }
    let recip = lattice.reciprocal();
    let mut out = Vec::new();
    let bounds: Vec<i64> = sizes.iter().map(|&q| q as i64).collect();
    let mut idx = vec![1i64; d];
    loop {
        let frac: Vec<f64> = (0..d)
            .map(|i| (2 * idx[i] - bounds[i] - 1) as f64 / (2 * bounds[i]) as f64)
            .collect();
        let k: Vec<f64> = (0..d)
            .map(|row| (0..d).map(|n| recip.basis[(row, n)] * frac[n]).sum())
            .collect();
        out.push(to_voronoi(&recip, &k));
        let mut axis = d;
        loop {
            if axis == 0 {
                return Ok(out);
            }
            axis -= 1;
            if idx[axis] < bounds[axis] {
                idx[axis] += 1;
                break;
            }
            idx[axis] = 1;
        }
    }
}

/// `k − G*` with `G*` the reciprocal vector nearest `k` (first in
/// lexicographic order on ties).
pub fn to_voronoi(recip: &Lattice, k: &[f64]) -> Vec<f64> {
    let d = recip.dim();
    let inv = recip.basis.clone().try_inverse().expect("nonsingular");
    let frac = inv * DVector::from_column_slice(k);
    let base: Vec<i64> = frac.iter().map(|x| x.round() as i64).collect();
    let mut best = k.to_vec();
    let mut best_len = f64::INFINITY;
    let mut c: Coords = [0; 3];
    scan_box(&vec![2; d], 0, &mut c, &mut |off| {
        let mut n: Coords = [0; 3];
        for i in 0..d {
            n[i] = base[i] + off[i];
        }
        let g = recip.point(&n);
        let cand: Vec<f64> = k.iter().zip(g.iter()).map(|(a, b)| a - b).collect();
        let l = norm(&cand);
        if l < best_len - 1e-12 {
            best_len = l;
            best = cand;
        }
    });
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BzConvergenceRow {
    pub n: f64,
    /// `max_k (λ_{n,k,N} − λ_{n,k,N_ref})`.
    pub max_err: f64,
    pub per_k: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BzConvergenceTable {
    pub band: usize,
    pub n_ref: f64,
    pub a_claim: f64,
    pub k_samples: Vec<Vec<f64>>,
    pub rows: Vec<BzConvergenceRow>,
    pub error_floor: f64,
    pub fitted_rate: Option<f64>,
}

impl BzConvergenceTable {
    /// Nonnegative errors, nonincreasing in `N` at every `k` and in the max,
    /// up to the floor.
    pub fn is_monotone(&self) -> bool {
        let f = self.error_floor;
        let nonneg = self.rows.iter().all(|r| r.per_k.iter().all(|&e| e >= -f));
        let per_k = self
            .rows
            .windows(2)
            .all(|w| w[1].per_k.iter().zip(&w[0].per_k).all(|(b, a)| *b <= a + f) && w[1].max_err <= w[0].max_err + f);
        nonneg && per_k
    }

    pub fn certifies(&self, slack: f64) -> bool {
        matches!(self.fitted_rate, Some(r) if r <= -2.0 * self.a_claim * (1.0 - slack))
    }

    pub fn to_csv(&self) -> String {
        let rows: Vec<Vec<f64>> = self.rows.iter().map(|r| vec![r.n, r.max_err]).collect();
        format::csv(&["N", "max_lambda_err"], &rows)
    }

    pub fn sidecar_json(&self) -> String {
        let doc = serde_json::json!({
            "n": self.band,
            "N_ref": self.n_ref,
            "A_claim": self.a_claim,
            "fitted_rate_eigenvalue": self.fitted_rate,
            "error_floor": self.error_floor,
            "k_samples": self.k_samples,
        });
        serde_json::to_string_pretty(&doc).expect("plain data serializes")
    }
}

/// Maximum over `k_samples` of the band-`n` eigenvalue error (1-based)
/// against `N_ref`, with the rate fitted over rows above `1e-12`
/// excluding the smallest `N`.
pub fn bz_convergence(
    v: &FourierSeriesD,
    k_samples: &[Vec<f64>],
    n_list: &[f64],
    n_ref: f64,
    band: usize,
    a_claim: f64,
    exec: Execution,
) -> Result<BzConvergenceTable> {
    check_real(v)?;
    crate::fourier::StripNormParams::new(a_claim)?;
    if band == 0 {
        return Err(Error::invalid("band index is 1-based"));
    }
    if k_samples.is_empty() || n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("need k samples and a strictly ascending N list"));
    }
    let n_max = *n_list.last().expect("nonempty");
    if n_ref < 2.0 * n_max {
        return Err(Error::invalid(format!(
            "N_ref = {n_ref} must be at least 2·max(N_list) = {}",
            2.0 * n_max
        )));
    }
    let refs = exec.try_map(k_samples, |k| bloch_eigenvalues(v, k, n_ref, band).map(|e| e[band - 1]))?;
    let jobs: Vec<(usize, f64)> = n_list.iter().enumerate().map(|(i, &n)| (i, n)).collect();
    let rows = exec.try_map(&jobs, |&(_, n)| -> Result<BzConvergenceRow> {
        let mut per_k = Vec::with_capacity(k_samples.len());
        for (k, r) in k_samples.iter().zip(&refs) {
            per_k.push(bloch_eigenvalues(v, k, n, band)?[band - 1] - r);
        }
        let max_err = per_k.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(BzConvergenceRow { n, max_err, per_k })
    })?;
    let floor = crate::eigen::DOUBLE_ERROR_FLOOR;
    let (x, y): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .skip(1)
        .filter(|r| r.max_err > floor)
        .map(|r| (r.n, r.max_err.ln()))
        .unzip();
    Ok(BzConvergenceTable {
        band,
        n_ref,
        a_claim,
        k_samples: k_samples.to_vec(),
        rows,
        error_floor: floor,
        fitted_rate: fit::line(&x, &y).map(|(_, b, _)| b),
    })
}

/// Periodized Gaussians `Σ_j a_j Σ_R exp(−|x − x_j − R|²/(2σ_j²))` with
/// coefficients
/// `V̂_G = |Ω|^{-1/2} Σ_j a_j (2πσ_j²)^{d/2} e^{−σ_j²|G|²/2} e^{−iG·x_j}`,
/// kept for `|G| ≤ cutoff`.
pub fn gaussian_potential(
    lattice: &Lattice,
    centers: &[Vec<f64>],
    widths: &[f64],
    amplitudes: &[f64],
    cutoff: f64,
) -> Result<FourierSeriesD> {
    let d = lattice.dim();
    if centers.len() != widths.len() || centers.len() != amplitudes.len() {
        return Err(Error::invalid("centers, widths and amplitudes must have equal length"));
    }
    if widths.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::invalid("widths must be positive"));
    }
    for c in centers {
        check_k(lattice, c)?;
    }
    let basis = basis_set(lattice, &vec![0.0; d], cutoff)?;
    let recip = lattice.reciprocal();
    let vol = lattice.unit_cell_volume();
    let mut out = FourierSeriesD::new(lattice.clone());
    for c in &basis.wavevectors {
        let g = recip.point(c);
        let g2 = g.norm_squared();
        let mut acc = Complex64::new(0.0, 0.0);
        for ((x0, &s), &a) in centers.iter().zip(widths).zip(amplitudes) {
            let gx: f64 = g.iter().zip(x0).map(|(p, q)| p * q).sum();
            acc += Complex64::from_polar(
                a * (2.0 * PI * s * s).powf(d as f64 / 2.0) * (-0.5 * s * s * g2).exp(),
                -gx,
            );
        }
        out.coeffs.insert(*c, acc / vol.sqrt());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen;
    use crate::potential;

    #[test]
    fn cubic_reciprocal() {
        let l = Lattice::cubic(3, 2.0).unwrap();
        let r = l.reciprocal();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { PI } else { 0.0 };
                assert!((r.vector(i)[j] - want).abs() < 1e-14);
            }
        }
        let back = r.reciprocal();
        assert!((back.basis - l.basis).abs().max() < 1e-12);
    }

    #[test]
    fn oblique_biorthogonality() {
        let l = Lattice::new(&[vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]]).unwrap();
        let r = l.reciprocal();
        for m in 0..2 {
            for n in 0..2 {
                let dot: f64 = l.vector(m).iter().zip(r.vector(n)).map(|(a, b)| a * b).sum();
                let want = if m == n { 2.0 * PI } else { 0.0 };
                assert!((dot - want).abs() < 1e-12);
            }
        }
        assert!((l.unit_cell_volume() - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!(Lattice::new(&[vec![1.0, 1.0], vec![2.0, 2.0]]).is_err());
    }

    #[test]
    fn weights() {
        let c = Lattice::cubic(3, 1.0).unwrap();
        assert_eq!(weight_multid(0.4, &c, &[0.0, 0.0, 0.0]).unwrap(), 3.0);
        let g = c.reciprocal().point(&[3, 0, 0]);
        let w = weight_multid(0.4, &c, g.as_slice()).unwrap();
        assert!((w - (2.0 + (2.0 * 0.4 * 3.0f64).cosh())).abs() < 1e-12);
        let one = Lattice::periodic_1d();
        for k in -4..=4 {
            let w = weight_multid(0.7, &one, &[k as f64]).unwrap();
            assert!((w - crate::fourier::weight(0.7, k).unwrap()).abs() < 1e-12 * w);
        }
    }

    #[test]
    fn basis_examples() {
        let one = Lattice::periodic_1d();
        let b = basis_set(&one, &[0.0], 2.5).unwrap();
        let ks: Vec<i64> = b.wavevectors.iter().map(|c| c[0]).collect();
        assert_eq!(ks, vec![-2, -1, 0, 1, 2]);
        let b = basis_set(&one, &[0.5], 2.0).unwrap();
        let ks: Vec<i64> = b.wavevectors.iter().map(|c| c[0]).collect();
        assert_eq!(ks, vec![-2, -1, 0, 1]);
    }

    #[test]
    fn basis_matches_brute_force() {
        let c = Lattice::cubic(3, 2.0 * PI).unwrap();
        let b = basis_set(&c, &[0.0; 3], 3.0).unwrap();
        let mut count = 0;
        for i in -4i64..=4 {
            for j in -4i64..=4 {
                for k in -4i64..=4 {
                    if ((i * i + j * j + k * k) as f64).sqrt() <= 3.0 {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(b.dim(), count);
        assert!(b.wavevectors.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn one_dimensional_reduction() {
        let v1 = potential::poisson_kernel(2.0, 1.0, 2.0, 40).unwrap();
        let v = FourierSeriesD::from_1d(&v1);
        let basis = basis_set(&v.lattice, &[0.0], 10.0).unwrap();
        let h = assemble_bloch(&v, &basis);
        let h1 = eigen::assemble_hn(&v1, 10);
        assert!((h - h1.entries()).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn free_bands_1d() {
        let v = FourierSeriesD::new(Lattice::periodic_1d());
        let path = k_path(&[vec![0.0], vec![0.5]], 5);
        let bs = band_structure(&v, &path, 6.0, 4, Execution::Sequential).unwrap();
        for (k, b) in path.iter().zip(&bs.bands) {
            let mut want: Vec<f64> = (-8i64..=8).map(|m| (m as f64 + k[0]).powi(2)).collect();
            want.sort_by(f64::total_cmp);
            for n in 0..4 {
                assert!((b[n] - want[n]).abs() < 1e-12);
            }
        }
        assert!(bs
            .to_csv()
            .starts_with("path_parameter,k1,lambda_1,lambda_2,lambda_3,lambda_4\n0,0,0,1,1,4\n"));
    }

    #[test]
    fn too_small_basis() {
        let v = FourierSeriesD::new(Lattice::periodic_1d());
        let err = band_structure(&v, &[vec![0.0]], 0.5, 3, Execution::Sequential).unwrap_err();
        assert!(err.to_string().contains("k = [0.0]"), "{err}");
    }

    #[test]
    fn gaussian_image_sum() {
        let l = Lattice::new(&[vec![3.0, 0.0], vec![1.0, 2.5]]).unwrap();
        let sigma = 0.3;
        let x0 = vec![0.4, 0.2];
        let v = gaussian_potential(&l, std::slice::from_ref(&x0), &[sigma], &[1.5], 40.0).unwrap();
        assert!(v.is_real_valued(1e-14));
        for x in [[0.0, 0.0], [0.5, 0.1], [1.7, 1.9], [2.9, 0.3]] {
            let mut direct = 0.0;
            for i in -1i64..=1 {
                for j in -1i64..=1 {
                    let r = l.point(&[i, j, 0]);
                    let d2 = (x[0] - x0[0] - r[0]).powi(2) + (x[1] - x0[1] - r[1]).powi(2);
                    direct += 1.5 * (-d2 / (2.0 * sigma * sigma)).exp();
                }
            }
            let series = v.eval(&x);
            assert!((series.re - direct).abs() < 1e-10 && series.im.abs() < 1e-10, "{x:?}");
        }
    }

    #[test]
    fn gaussian_at_origin_and_half_shift() {
        let l = Lattice::cubic(2, 2.0 * PI).unwrap();
        let v = gaussian_potential(&l, &[vec![0.0, 0.0]], &[0.5], &[1.0], 6.0).unwrap();
        for (g, c) in &v.coeffs {
            assert!(c.im.abs() < 1e-16 && c.re > 0.0, "{g:?}");
        }
        let v0 = v.coeff(&[0, 0, 0]).re;
        assert!(v.coeff(&[1, 0, 0]).re < v0 && v.coeff(&[2, 0, 0]).re < v.coeff(&[1, 0, 0]).re);
        let v2 = gaussian_potential(&l, &[vec![0.0, 0.0], vec![PI, 0.0]], &[0.5, 0.5], &[1.0, 1.0], 6.0).unwrap();
        for (g, c) in &v2.coeffs {
            if g[0] % 2 != 0 {
                assert!(c.norm() < 1e-15, "{g:?}");
            }
        }
    }

    #[test]
    fn monkhorst_pack_in_zone() {
        let l = Lattice::new(&[vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]]).unwrap();
        let ks = monkhorst_pack(&l, &[4, 4]).unwrap();
        assert_eq!(ks.len(), 16);
        let r = l.reciprocal();
        for k in &ks {
            let kn = norm(k);
            for c in [[1, 0, 0], [0, 1, 0], [1, -1, 0], [-1, 1, 0], [-1, 0, 0], [0, -1, 0]] {
                let g = r.point(&c);
                let d: Vec<f64> = k.iter().zip(g.iter()).map(|(a, b)| a - b).collect();
                assert!(kn <= norm(&d) + 1e-12);
            }
        }
        let one = monkhorst_pack(&Lattice::periodic_1d(), &[4]).unwrap();
        assert_eq!(one, vec![vec![-0.375], vec![-0.125], vec![0.125], vec![0.375]]);
    }

    #[test]
    fn bz_free_is_exact() {
        let v = FourierSeriesD::new(Lattice::periodic_1d());
        let t = bz_convergence(
            &v,
            &[vec![0.0], vec![0.25]],
            &[2.0, 3.0],
            6.0,
            1,
            1.0,
            Execution::Sequential,
        )
        .unwrap();
        assert!(t.rows.iter().all(|r| r.max_err.abs() < 1e-14));
        assert!(t.fitted_rate.is_none());
    }
}
