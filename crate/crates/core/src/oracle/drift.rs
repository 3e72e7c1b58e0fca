use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::SystemParams;

/// Quadrature indices in cavity-major order `(m1, o1, m2, o2)`.
pub mod index {
    pub const XM1: usize = 0;
    pub const YM1: usize = 1;
    pub const XO1: usize = 2;
    pub const YO1: usize = 3;
    pub const XM2: usize = 4;
    pub const YM2: usize = 5;
    pub const XO2: usize = 6;
    pub const YO2: usize = 7;
}

/// Which form of the per-cavity coupling block to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum DriftConvention {
    /// `[[−γ/2, G], [−G, −κ/2]]`, consistent with the rotating-frame Langevin equations.
    #[default]
    BeamSplitter,
    /// `[[−γ/2, G], [−κ/2, −G]]`; kept only as a negative control.
    FlippedCoupling,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftMatrix(DMatrix<f64>);

impl DriftMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix("drift must be square and finite".into()));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// Largest real part of the spectrum.
    pub fn spectral_abscissa(&self) -> f64 {
        self.0
            .complex_eigenvalues()
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_stable(&self) -> bool {
        self.spectral_abscissa() < 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionMatrix(DMatrix<f64>);

impl DiffusionMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix("diffusion must be square and finite".into()));
        }
        if (&m - m.transpose()).amax() > 1e-12 * m.amax().max(1.0) {
            return Err(Error::InvalidMatrix("diffusion must be symmetric".into()));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.0
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn drift_matrix(p: &SystemParams) -> DriftMatrix {
    drift_matrix_with(p, DriftConvention::BeamSplitter)
}

/// Linearized rotating-wave drift, 8×8, `κ = 1`, `γ = γ/κ`.
///
/// Per cavity and per quadrature `q ∈ {X, Y}`:
/// `q̇_m = −(γ/2) q_m + G q_o`, `q̇_o = −(κ/2) q_o − G q_m`.
pub fn drift_matrix_with(p: &SystemParams, convention: DriftConvention) -> DriftMatrix {
    let gamma = p.damping_ratio();
    let kappa = 1.0;
    let g = p.coupling();
    let mut a = DMatrix::zeros(8, 8);
    for cavity in 0..2 {
        let m = 4 * cavity;
        let o = m + 2;
        for q in 0..2 {
            a[(m + q, m + q)] = -gamma / 2.0;
            a[(m + q, o + q)] = g;
            match convention {
                DriftConvention::BeamSplitter => {
                    a[(o + q, m + q)] = -g;
                    a[(o + q, o + q)] = -kappa / 2.0;
                }
                DriftConvention::FlippedCoupling => {
                    a[(o + q, m + q)] = -kappa / 2.0;
                    a[(o + q, o + q)] = -g;
                }
            }
        }
    }
    DriftMatrix(a)
}

/// Symmetrized white-noise correlations of the mechanical baths and the
/// two-mode squeezed inputs, `κ = 1`, `γ = γ/κ`.
///
/// Mechanical: `(γ/2)(2n_th + 1)` on each quadrature. Optical:
/// `(κ/2)(2N + 1)` on each quadrature and `±κM` between the two cavities
/// (`+` for X, `−` for Y), with `N = sinh² r`, `M = sinh r cosh r`.
pub fn diffusion_matrix(p: &SystemParams) -> DiffusionMatrix {
    use index::*;
    let gamma = p.damping_ratio();
    let kappa = 1.0;
    let mech = gamma / 2.0 * (2.0 * p.nth() + 1.0);
    let opt = kappa / 2.0 * (2.0 * p.squeezed_photons() + 1.0);
    let cross = kappa * p.squeezed_correlation();
    let mut d = DMatrix::zeros(8, 8);
    for i in [XM1, YM1, XM2, YM2] {
        d[(i, i)] = mech;
    }
    for i in [XO1, YO1, XO2, YO2] {
        d[(i, i)] = opt;
    }
    d[(XO1, XO2)] = cross;
    d[(XO2, XO1)] = cross;
    d[(YO1, YO2)] = -cross;
    d[(YO2, YO1)] = -cross;
    DiffusionMatrix(d)
}
