//! Experiment configuration: one TOML file drives every suite.

use crate::error::{MaxlabError, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

fn d_seed() -> u64 {
    7
}
fn d_grid_n() -> usize {
    256
}
fn d_refine_factor() -> usize {
    2
}
fn d_stride() -> usize {
    4
}
fn d_n_r() -> usize {
    256
}
fn d_n_theta() -> usize {
    1024
}
fn d_j_max() -> u32 {
    12
}
fn d_k_min() -> i32 {
    -6
}
fn d_k_max() -> i32 {
    3
}
fn d_y_samples() -> usize {
    50
}
fn d_alphas() -> Vec<f64> {
    vec![1.0, 1.5]
}
fn d_ps() -> Vec<f64> {
    vec![1.5, 2.0]
}
fn d_lambdas() -> Vec<f64> {
    vec![0.5, 1.0, 2.0, 4.0]
}
fn d_curvature_radii() -> Vec<f64> {
    vec![0.4, 0.2, 0.1]
}
fn d_cube_deltas() -> Vec<f64> {
    vec![0.125, 0.0625, 0.03125, 0.015625, 0.0078125]
}
fn d_cube_s() -> Vec<f64> {
    vec![1.0, 2.0, 3.0]
}
fn d_cube_ps() -> Vec<f64> {
    vec![1.5, 2.0, 4.0]
}
fn d_cube_grid_n() -> usize {
    2048
}
fn d_cube_stride() -> usize {
    32
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute tolerance on closed-form spherical averages.
    #[serde(default = "Tolerances::d_b1_abs")]
    pub b1_abs: f64,
    /// Conic residuals are allowed this many grid cells.
    #[serde(default = "Tolerances::d_conic_h_factor")]
    pub conic_h_factor: f64,
    /// Tangent orthogonality and bisection tolerance in degrees.
    #[serde(default = "Tolerances::d_angle_deg")]
    pub angle_deg: f64,
    /// Allowed relative drift of realized constants under h -> h/2.
    #[serde(default = "Tolerances::d_refine_rel")]
    pub refine_rel: f64,
    /// Allowed deviation of the fitted dilation slope from alpha - 1.
    #[serde(default = "Tolerances::d_slope_tol")]
    pub slope_tol: f64,
    /// Allowed relative spread of scale-invariant estimates.
    #[serde(default = "Tolerances::d_lambda_invariance")]
    pub lambda_invariance: f64,
    /// Required growth factor per delta halving in the cube blow-up.
    #[serde(default = "Tolerances::d_blowup_gamma")]
    pub blowup_gamma: f64,
}

impl Tolerances {
    fn d_b1_abs() -> f64 {
        1e-3
    }
    fn d_conic_h_factor() -> f64 {
        2.0
    }
    fn d_angle_deg() -> f64 {
        1.0
    }
    fn d_refine_rel() -> f64 {
        0.2
    }
    fn d_slope_tol() -> f64 {
        0.15
    }
    fn d_lambda_invariance() -> f64 {
        0.1
    }
    fn d_blowup_gamma() -> f64 {
        1.1
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            b1_abs: Self::d_b1_abs(),
            conic_h_factor: Self::d_conic_h_factor(),
            angle_deg: Self::d_angle_deg(),
            refine_rel: Self::d_refine_rel(),
            slope_tol: Self::d_slope_tol(),
            lambda_invariance: Self::d_lambda_invariance(),
            blowup_gamma: Self::d_blowup_gamma(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "d_seed")]
    pub seed: u64,
    /// Base grid resolution per axis.
    #[serde(default = "d_grid_n")]
    pub grid_n: usize,
    /// Refinement multiplier for stability checks.
    #[serde(default = "d_refine_factor")]
    pub refine_factor: usize,
    /// Subsampling stride for full-field maps (maximal / averaging fields).
    #[serde(default = "d_stride")]
    pub stride: usize,
    /// Radius discretization of the maximal-function sup.
    #[serde(default = "d_n_r")]
    pub n_r: usize,
    /// Sphere quadrature nodes for field sweeps.
    #[serde(default = "d_n_theta")]
    pub n_theta: usize,
    #[serde(default = "d_j_max")]
    pub j_max: u32,
    #[serde(default = "d_k_min")]
    pub k_min: i32,
    #[serde(default = "d_k_max")]
    pub k_max: i32,
    /// Probe points per domain in sweeps.
    #[serde(default = "d_y_samples")]
    pub y_samples: usize,
    #[serde(default = "d_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "d_ps")]
    pub ps: Vec<f64>,
    /// Dilation factors for the scaling-law fit.
    #[serde(default = "d_lambdas")]
    pub lambdas: Vec<f64>,
    /// Inner radii of the annulus family probing the curvature law.
    #[serde(default = "d_curvature_radii")]
    pub curvature_radii: Vec<f64>,
    #[serde(default = "d_cube_deltas")]
    pub cube_deltas: Vec<f64>,
    #[serde(default = "d_cube_s")]
    pub cube_s: Vec<f64>,
    #[serde(default = "d_cube_ps")]
    pub cube_ps: Vec<f64>,
    /// Dedicated fine grid for the cube counterexample (the box heights
    /// delta^s must stay resolvable).
    #[serde(default = "d_cube_grid_n")]
    pub cube_grid_n: usize,
    #[serde(default = "d_cube_stride")]
    pub cube_stride: usize,
    #[serde(default)]
    pub tol: Tolerances,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty config populates defaults")
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig =
            toml::from_str(&text).map_err(|e| MaxlabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_n < 32 {
            return Err(MaxlabError::Config("grid_n must be at least 32".into()));
        }
        if self.stride == 0 || self.refine_factor < 2 {
            return Err(MaxlabError::Config(
                "stride must be positive and refine_factor at least 2".into(),
            ));
        }
        for &p in &self.ps {
            if p <= 1.0 {
                return Err(MaxlabError::Config(format!(
                    "norm-ratio experiments need p > 1, got {p}"
                )));
            }
        }
        if self.k_min >= self.k_max {
            return Err(MaxlabError::Config("empty shell window".into()));
        }
        Ok(())
    }
}
