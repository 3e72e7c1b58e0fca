//! Independent recomputation of the steady state from the linearized
//! Langevin dynamics: a direct Lyapunov solve and a frequency-domain
//! quadrature.

mod drift;
mod lyapunov;
mod spectral;

pub use drift::{
    diffusion_matrix, drift_matrix, drift_matrix_with, index, DiffusionMatrix, DriftConvention,
    DriftMatrix,
};
pub use lyapunov::{solve_lyapunov, LyapunovSolution, LYAPUNOV_RESIDUAL_TOL};
pub use spectral::{
    integrate_adaptive, spectral_cm_element, spectral_cm_element_with_tol, CmElement, SPECTRAL_TOL,
};

use serde::Serialize;

use crate::error::Result;
use crate::model::{ClosedFormBlocks, SystemParams};

/// Cavity-major steady state `(m1, o1, m2, o2)` with the default drift.
pub fn steady_state(p: &SystemParams) -> Result<LyapunovSolution> {
    steady_state_with(p, DriftConvention::BeamSplitter)
}

pub fn steady_state_with(p: &SystemParams, convention: DriftConvention) -> Result<LyapunovSolution> {
    solve_lyapunov(&drift_matrix_with(p, convention), &diffusion_matrix(p))
}

/// Max-abs deviation of the oracle's mechanical and optical blocks from the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CmComparison {
    pub v1: f64,
    pub v13: f64,
    pub v2: f64,
    pub v57: f64,
    /// Largest entry that should vanish in either 4×4 block.
    pub structure: f64,
    pub max: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Compares the two 4×4 subsystem blocks of a cavity-major solution against
/// the closed forms, entry by entry (including the `±` pattern and zeros).
pub fn compare_cm(closed: &ClosedFormBlocks, oracle: &LyapunovSolution, tol: f64) -> CmComparison {
    use index::*;
    let v = oracle.cm.matrix();
    let mut dev = [0.0f64; 4];
    let mut structure = 0.0f64;
    let blocks = [
        ([XM1, YM1, XM2, YM2], closed.v1, closed.v13, 0usize),
        ([XO1, YO1, XO2, YO2], closed.v2, closed.v57, 2usize),
    ];
    for (idx, diag, corr, slot) in blocks {
        for i in 0..4 {
            for j in 0..4 {
                let actual = v[(idx[i], idx[j])];
                let same_quadrature = i % 2 == j % 2;
                if i == j {
                    dev[slot] = dev[slot].max((actual - diag).abs());
                } else if same_quadrature && i / 2 != j / 2 {
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    dev[slot + 1] = dev[slot + 1].max((actual - sign * corr).abs());
                } else {
                    structure = structure.max(actual.abs());
                }
            }
        }
    }
    let max = dev.iter().copied().fold(structure, f64::max);
    CmComparison {
        v1: dev[0],
        v13: dev[1],
        v2: dev[2],
        v57: dev[3],
        structure,
        max,
        tol,
        passed: max < tol,
    }
}
