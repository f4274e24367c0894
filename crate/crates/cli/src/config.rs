//! JSON experiment configurations, one document per run.

use std::path::{Path, PathBuf};

use planewave::bloch::{self, FourierSeriesD, Lattice};
use planewave::eigen::Precision;
use planewave::{potential, FourierSeries1D};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A periodic function given by name and parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialSpec {
    Constant {
        value: f64,
    },
    /// `offset + amplitude·cos(frequency·x)`.
    Cosine {
        offset: f64,
        amplitude: f64,
        #[serde(default = "one")]
        frequency: u32,
    },
    /// `offset + mu/(c − cos x)`.
    PoissonKernel {
        c: f64,
        #[serde(default = "one_f")]
        mu: f64,
        #[serde(default)]
        offset: f64,
        #[serde(default = "default_cutoff")]
        cutoff: usize,
    },
    /// `2q cos 2x`.
    Mathieu {
        q: f64,
    },
    /// `mu sin x`.
    Sine {
        mu: f64,
    },
    /// Periodized Gaussians on a lattice, `2πℤ` when omitted.
    GaussianSum {
        #[serde(default)]
        lattice: Option<Vec<Vec<f64>>>,
        centers: Vec<Vec<f64>>,
        widths: Vec<f64>,
        amplitudes: Vec<f64>,
        cutoff: f64,
    },
    /// Coefficients in the `{"cutoff", "re", "im"}` format.
    File {
        path: PathBuf,
    },
}

fn one() -> u32 {
    1
}

fn one_f() -> f64 {
    1.0
}

fn default_cutoff() -> usize {
    64
}

impl PotentialSpec {
    /// The 1D series. Relative file paths resolve against `base`.
    pub fn to_1d(&self, base: &Path) -> Result<FourierSeries1D, CliError> {
        Ok(match self {
            PotentialSpec::Constant { value } => potential::constant(*value),
            PotentialSpec::Cosine {
                offset,
                amplitude,
                frequency,
            } => potential::cosine(*offset, *amplitude, *frequency),
            PotentialSpec::PoissonKernel { c, mu, offset, cutoff } => {
                potential::poisson_kernel(*c, *mu, *offset, *cutoff)?
            }
            PotentialSpec::Mathieu { q } => potential::mathieu(*q),
            PotentialSpec::Sine { mu } => potential::sine(*mu),
            PotentialSpec::GaussianSum { lattice: Some(l), .. }
                if l.len() != 1 || l[0] != [2.0 * std::f64::consts::PI] =>
            {
                return Err(CliError::config(
                    "a 1D experiment needs a gaussian-sum on the default lattice",
                ));
            }
            PotentialSpec::GaussianSum { .. } => {
                let d = self.to_lattice()?;
                let cutoff = d.coeffs.keys().map(|g| g[0].unsigned_abs()).max().unwrap_or(0) as usize;
                FourierSeries1D::from_fn(cutoff, |k| d.coeff(&[k, 0, 0]))
            }
            PotentialSpec::File { path } => {
                let p = if path.is_absolute() {
                    path.clone()
                } else {
                    base.join(path)
                };
                let text = std::fs::read_to_string(&p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                FourierSeries1D::from_json(&text).map_err(|e| CliError::config(format!("{}: {e}", p.display())))?
            }
        })
    }

    /// The lattice-periodic series.
    pub fn to_lattice_with_base(&self, base: &Path) -> Result<FourierSeriesD, CliError> {
        match self {
            PotentialSpec::GaussianSum { .. } => self.to_lattice(),
            _ => Ok(FourierSeriesD::from_1d(&self.to_1d(base)?)),
        }
    }

    fn to_lattice(&self) -> Result<FourierSeriesD, CliError> {
        let PotentialSpec::GaussianSum {
            lattice,
            centers,
            widths,
            amplitudes,
            cutoff,
        } = self
        else {
            unreachable!("only gaussian sums carry a lattice");
        };
        let l = match lattice {
            Some(v) => Lattice::new(v)?,
            None => Lattice::periodic_1d(),
        };
        Ok(bloch::gaussian_potential(&l, centers, widths, amplitudes, *cutoff)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct TailConfig {
    pub N_split: usize,
    pub A: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct LinsolveConfig {
    #[serde(default)]
    pub experiment: Option<String>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    pub potential: PotentialSpec,
    pub source: PotentialSpec,
    pub N: usize,
    #[serde(default)]
    pub N_list: Vec<usize>,
    #[serde(default)]
    pub N_ref: Option<usize>,
    #[serde(default)]
    pub tail: Option<TailConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct EigConvergenceConfig {
    #[serde(default)]
    pub experiment: Option<String>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    pub potential: PotentialSpec,
    pub N_list: Vec<usize>,
    pub N_ref: usize,
    #[serde(default = "one_usize")]
    pub j: usize,
    pub A_claim: f64,
    #[serde(default)]
    pub precision: Precision,
    #[serde(default)]
    pub cluster_mode: bool,
    #[serde(default = "default_gap")]
    pub cluster_gap: f64,
}

fn one_usize() -> usize {
    1
}

fn default_gap() -> f64 {
    planewave::eigen::DEFAULT_CLUSTER_GAP
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct GpSolveConfig {
    #[serde(default)]
    pub experiment: Option<String>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    pub epsilon: f64,
    pub mu: f64,
    pub N: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_noise")]
    pub noise_floor: f64,
    /// Additional `ε` values reported in `gp_scan.csv`.
    #[serde(default)]
    pub epsilon_scan: Vec<f64>,
}

fn default_tol() -> f64 {
    1e-12
}

fn default_noise() -> f64 {
    1e-13
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StripEstimateConfig {
    #[serde(default)]
    pub experiment: Option<String>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    pub potential: PotentialSpec,
    #[serde(default = "default_noise")]
    pub noise_floor: f64,
    #[serde(default)]
    pub stride: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct BlowupCliConfig {
    #[serde(default)]
    pub experiment: Option<String>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    pub epsilon: f64,
    pub mu: f64,
    pub eta: f64,
    #[serde(default = "default_blowup_n")]
    pub N: usize,
    #[serde(default = "default_tol")]
    pub gp_tol: f64,
    #[serde(default = "default_tol")]
    pub rtol: f64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_y_max")]
    pub y_max: f64,
    /// Rows of `x_mu_boundary.csv`; `0` skips the file.
    #[serde(default = "default_boundary_samples")]
    pub boundary_samples: usize,
}

fn default_blowup_n() -> usize {
    128
}

fn default_threshold() -> f64 {
    planewave::blowup::DEFAULT_BLOWUP_THRESHOLD
}

fn default_y_max() -> f64 {
    20.0
}

fn default_boundary_samples() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct BandsConfig {
    #[serde(default)]
    pub experiment: Option<String>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    pub potential: PotentialSpec,
    /// Corners of the path in Cartesian coordinates.
    pub k_path: Vec<Vec<f64>>,
    #[serde(default = "default_per_segment")]
    pub per_segment: usize,
    pub N: f64,
    pub n_bands: usize,
}

fn default_per_segment() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct BzConvergenceConfig {
    #[serde(default)]
    pub experiment: Option<String>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    pub potential: PotentialSpec,
    /// Explicit samples; a Monkhorst–Pack grid of `mp_grid` otherwise.
    #[serde(default)]
    pub k_samples: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub mp_grid: Option<Vec<usize>>,
    pub N_list: Vec<f64>,
    pub N_ref: f64,
    #[serde(default = "one_usize")]
    pub band: usize,
    pub A_claim: f64,
}

/// Parses a config, reporting the line and column of the first problem.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config {
        message: e.to_string(),
        line: Some(e.line()),
        column: Some(e.column()),
    })
}

pub fn check_experiment(declared: &Option<String>, subcommand: &str) -> Result<(), CliError> {
    match declared {
        Some(name) if name != subcommand => Err(CliError::config(format!(
            "config is for experiment '{name}', not '{subcommand}'"
        ))),
        _ => Ok(()),
    }
}

pub fn require(cond: bool, what: &str) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::config(format!("out of range: {what}")))
    }
}

impl LinsolveConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        require(self.N >= 1, "N ≥ 1")?;
        if let Some(r) = self.N_ref {
            require(self.N_list.iter().all(|&n| n >= 1 && n <= r), "1 ≤ N_list ≤ N_ref")?;
        } else {
            require(self.N_list.is_empty(), "N_list needs N_ref")?;
        }
        if let Some(t) = &self.tail {
            require(t.A > 0.0, "tail.A > 0")?;
            require(t.N_split >= 1 && t.N_split < self.N, "1 ≤ tail.N_split < N")?;
        }
        Ok(())
    }
}

impl EigConvergenceConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        require(!self.N_list.is_empty(), "N_list nonempty")?;
        require(self.N_list.windows(2).all(|w| w[0] < w[1]), "N_list strictly ascending")?;
        require(self.N_list.iter().all(|&n| n < self.N_ref), "N_list < N_ref")?;
        require(self.j >= 1, "j ≥ 1")?;
        require(self.A_claim > 0.0, "A_claim > 0")?;
        require(self.cluster_gap > 0.0, "cluster_gap > 0")
    }
}

impl GpSolveConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        require(self.epsilon > 0.0 && self.epsilon.is_finite(), "epsilon > 0")?;
        require(
            self.epsilon_scan.iter().all(|&e| e > 0.0 && e.is_finite()),
            "epsilon_scan > 0",
        )?;
        require(self.mu > 0.0 && self.mu.is_finite(), "mu > 0")?;
        require(self.N >= 16, "N ≥ 16")?;
        require(self.tol > 0.0, "tol > 0")?;
        require(self.noise_floor > 0.0, "noise_floor > 0")
    }
}

impl StripEstimateConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        require(self.noise_floor > 0.0, "noise_floor > 0")?;
        require(self.stride.is_none_or(|s| s >= 1), "stride ≥ 1")
    }
}

impl BlowupCliConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        require(self.epsilon > 0.0 && self.epsilon.is_finite(), "epsilon > 0")?;
        require(self.mu > 0.0 && self.mu.is_finite(), "mu > 0")?;
        require(self.eta > 0.0 && self.eta.is_finite(), "eta > 0")?;
        require(self.N >= 16, "N ≥ 16")?;
        require(self.gp_tol > 0.0, "gp_tol > 0")?;
        require(self.rtol >= 1e-13 && self.rtol < 1.0, "1e-13 ≤ rtol < 1")?;
        require(self.threshold > 1.0, "threshold > 1")?;
        require(self.y_max > 0.0, "y_max > 0")
    }

    pub fn core(&self) -> planewave::blowup::BlowupConfig {
        planewave::blowup::BlowupConfig {
            epsilon: self.epsilon,
            mu: self.mu,
            eta: self.eta,
            n: self.N,
            gp_tol: self.gp_tol,
            rtol: self.rtol,
            threshold: self.threshold,
            y_max: self.y_max,
        }
    }
}

impl BandsConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        require(!self.k_path.is_empty(), "k_path nonempty")?;
        require(self.per_segment >= 1, "per_segment ≥ 1")?;
        require(self.N > 0.0, "N > 0")?;
        require(self.n_bands >= 1, "n_bands ≥ 1")
    }
}

impl BzConvergenceConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        require(
            self.k_samples.is_some() != self.mp_grid.is_some(),
            "exactly one of k_samples, mp_grid",
        )?;
        require(!self.N_list.is_empty(), "N_list nonempty")?;
        require(self.N_list.windows(2).all(|w| w[0] < w[1]), "N_list strictly ascending")?;
        require(self.N_list.iter().all(|&n| n > 0.0), "N_list > 0")?;
        require(self.band >= 1, "band ≥ 1")?;
        require(self.A_claim > 0.0, "A_claim > 0")
    }
}
