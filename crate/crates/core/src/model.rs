//! Steady state of two identical optomechanical cavities driven on the red
//! sideband and fed by the two halves of a two-mode squeezed vacuum.
//!
//! Rates are measured in units of the cavity decay `κ`, so only the ratio
//! `γ/κ` enters. The full covariance matrix uses the block layout
//! `(X_m1, Y_m1, X_m2, Y_m2, X_o1, Y_o1, X_o2, Y_o2)`, i.e. modes ordered
//! `(m1, m2, o1, o2)`; the dynamics oracle works cavity by cavity,
//! `(m1, o1, m2, o2)`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{GeneralCM, SymmetricTwoModeCM};
use crate::oracle;

/// Reduced Planck constant in J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Mode permutation between the cavity-major order `(m1, o1, m2, o2)` and the
/// block layout `(m1, m2, o1, o2)`. It is an involution, so it maps both ways.
pub const BLOCK_LAYOUT_PERMUTATION: [usize; 4] = [0, 2, 1, 3];

/// Dimensionless configuration: cooperativity `C`, squeezing `r`, thermal
/// phonon number `n_th` and damping ratio `γ/κ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemParams {
    coop: f64,
    squeeze: f64,
    nth: f64,
    damping_ratio: f64,
}

fn check_nonnegative(name: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::param(name, format!("must be finite, got {v}")));
    }
    if v < 0.0 {
        return Err(Error::param(name, format!("must be >= 0, got {v}")));
    }
    Ok(())
}

impl SystemParams {
    pub fn new(coop: f64, squeeze: f64, nth: f64, damping_ratio: f64) -> Result<Self> {
        check_nonnegative("coop", coop)?;
        check_nonnegative("squeeze", squeeze)?;
        check_nonnegative("nth", nth)?;
        if !damping_ratio.is_finite() || damping_ratio <= 0.0 {
            return Err(Error::param(
                "damping_ratio",
                format!("must be finite and > 0, got {damping_ratio}"),
            ));
        }
        Ok(Self {
            coop,
            squeeze,
            nth,
            damping_ratio,
        })
    }

    pub fn coop(&self) -> f64 {
        self.coop
    }

    pub fn squeeze(&self) -> f64 {
        self.squeeze
    }

    pub fn nth(&self) -> f64 {
        self.nth
    }

    pub fn damping_ratio(&self) -> f64 {
        self.damping_ratio
    }

    pub fn with_coop(self, coop: f64) -> Result<Self> {
        Self::new(coop, self.squeeze, self.nth, self.damping_ratio)
    }

    pub fn with_squeeze(self, squeeze: f64) -> Result<Self> {
        Self::new(self.coop, squeeze, self.nth, self.damping_ratio)
    }

    pub fn with_nth(self, nth: f64) -> Result<Self> {
        Self::new(self.coop, self.squeeze, nth, self.damping_ratio)
    }

    /// Photon number of each squeezed input, `sinh² r`.
    pub fn squeezed_photons(&self) -> f64 {
        self.squeeze.sinh().powi(2)
    }

    /// Input cross-correlation `sinh r cosh r`.
    pub fn squeezed_correlation(&self) -> f64 {
        self.squeeze.sinh() * self.squeeze.cosh()
    }

    /// Effective optomechanical coupling `G = √(C γ κ)/2` with `κ = 1`.
    pub fn coupling(&self) -> f64 {
        (self.coop * self.damping_ratio).sqrt() / 2.0
    }
}

/// Independent entries of the mechanical (`v1`, `v13`) and optical (`v2`, `v57`) blocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormBlocks {
    pub v1: f64,
    pub v13: f64,
    pub v2: f64,
    pub v57: f64,
}

impl ClosedFormBlocks {
    pub fn vacuum() -> Self {
        Self {
            v1: 0.5,
            v13: 0.0,
            v2: 0.5,
            v57: 0.0,
        }
    }
}

/// Mechanical-optical correlations `⟨X_m1 X_o1⟩` (`v15`) and `⟨X_m1 X_o2⟩` (`v17`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossBlocks {
    pub v15: f64,
    pub v17: f64,
}

/// Steady-state block entries for explicit rates `κ`, `γ`.
///
/// ```text
/// V1  = [κ C cosh 2r + (1 + 2n)(κ + γ + γC)] / [2(κ + γ)(1 + C)]
/// V13 = κ C sinh 2r / [2(κ + γ)(1 + C)]
/// V2  = [(κ + γ + κC) cosh 2r + (1 + 2n) γ C] / [2(κ + γ)(1 + C)]
/// V57 = (κ + γ + κC) sinh 2r / [2(κ + γ)(1 + C)]
/// ```
pub fn blocks_for_rates(coop: f64, squeeze: f64, nth: f64, kappa: f64, gamma: f64) -> ClosedFormBlocks {
    let den = 2.0 * (kappa + gamma) * (1.0 + coop);
    let ch = (2.0 * squeeze).cosh();
    let sh = (2.0 * squeeze).sinh();
    let thermal = 1.0 + 2.0 * nth;
    let optical_weight = kappa + gamma + kappa * coop;
    ClosedFormBlocks {
        v1: (kappa * coop * ch + thermal * (kappa + gamma + gamma * coop)) / den,
        v13: kappa * coop * sh / den,
        v2: (optical_weight * ch + thermal * gamma * coop) / den,
        v57: optical_weight * sh / den,
    }
}

pub fn closed_form_blocks(p: &SystemParams) -> ClosedFormBlocks {
    blocks_for_rates(p.coop, p.squeeze, p.nth, 1.0, p.damping_ratio)
}

/// Two-mode state of the two mirrors.
pub fn mechanical_subsystem(b: &ClosedFormBlocks) -> Result<SymmetricTwoModeCM> {
    SymmetricTwoModeCM::new(b.v1, b.v13)
}

/// Two-mode state of the two intracavity fields.
pub fn optical_subsystem(b: &ClosedFormBlocks) -> Result<SymmetricTwoModeCM> {
    SymmetricTwoModeCM::new(b.v2, b.v57)
}

/// Mechanical-optical cross correlations, from the Lyapunov steady state.
pub fn cross_blocks(p: &SystemParams) -> Result<CrossBlocks> {
    let layout = to_block_layout(&oracle::steady_state(p)?.cm)?;
    Ok(CrossBlocks {
        v15: layout.get(0, 4),
        v17: layout.get(0, 6),
    })
}

/// Full 8×8 covariance matrix in block layout.
///
/// The diagonal blocks come from [`closed_form_blocks`], the off-diagonal
/// blocks from the Lyapunov oracle. Sign pattern (each 4×4 block):
///
/// ```text
/// [ a  0  b  0 ]
/// [ 0  a  0 -b ]
/// [ b  0  a  0 ]
/// [ 0 -b  0  a ]
/// ```
pub fn full_cm(p: &SystemParams) -> Result<GeneralCM> {
    let b = closed_form_blocks(p);
    let c = cross_blocks(p)?;
    let pattern = |a: f64, b: f64| {
        DMatrix::from_row_slice(
            4,
            4,
            &[a, 0.0, b, 0.0, 0.0, a, 0.0, -b, b, 0.0, a, 0.0, 0.0, -b, 0.0, a],
        )
    };
    let mut m = DMatrix::zeros(8, 8);
    m.view_mut((0, 0), (4, 4)).copy_from(&pattern(b.v1, b.v13));
    m.view_mut((4, 4), (4, 4)).copy_from(&pattern(b.v2, b.v57));
    let cross = pattern(c.v15, c.v17);
    m.view_mut((0, 4), (4, 4)).copy_from(&cross);
    m.view_mut((4, 0), (4, 4)).copy_from(&cross);
    GeneralCM::new(m)
}

/// Reorders a cavity-major `(m1, o1, m2, o2)` matrix into block layout.
pub fn to_block_layout(cm: &GeneralCM) -> Result<GeneralCM> {
    cm.reorder_modes(&BLOCK_LAYOUT_PERMUTATION)
}

/// Reorders a block-layout `(m1, m2, o1, o2)` matrix into cavity-major order.
pub fn to_cavity_major(cm: &GeneralCM) -> Result<GeneralCM> {
    cm.reorder_modes(&BLOCK_LAYOUT_PERMUTATION)
}

/// Physical parameters of one cavity, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RawCavityParams {
    /// Mirror mass (kg).
    pub mass: f64,
    /// Cavity length (m).
    pub length: f64,
    /// Cavity resonance (rad/s).
    pub omega_a: f64,
    /// Mechanical frequency (rad/s).
    pub omega_m: f64,
    /// Laser frequency (rad/s).
    pub omega_l: f64,
    /// Pump power (W).
    pub power: f64,
    /// Cavity decay rate (rad/s).
    pub kappa: f64,
    /// Mechanical damping rate (rad/s).
    pub gamma: f64,
}

impl RawCavityParams {
    fn validate(&self) -> Result<()> {
        let positive = [
            ("mass", self.mass),
            ("length", self.length),
            ("omega_a", self.omega_a),
            ("omega_m", self.omega_m),
            ("omega_l", self.omega_l),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
        ];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.power.is_finite() || self.power < 0.0 {
            return Err(Error::Domain(format!("power must be >= 0, got {}", self.power)));
        }
        Ok(())
    }

    /// Mechanical quality factor `ω_M/γ`.
    pub fn quality_factor(&self) -> f64 {
        self.omega_m / self.gamma
    }

    /// Markovian-bath check, `ω_M/γ ≥ min_quality`.
    pub fn is_markovian(&self, min_quality: f64) -> bool {
        self.quality_factor() >= min_quality
    }

    /// Single-photon coupling `g = (ω_a/L) √(ħ/(μ ω_M))`.
    pub fn single_photon_coupling(&self) -> f64 {
        self.omega_a / self.length * (HBAR / (self.mass * self.omega_m)).sqrt()
    }

    /// Intracavity amplitude `|ā| = ε/√(κ²/4 + ω_M²)` at red-sideband detuning,
    /// with drive strength `ε = √(2κP/(ħ ω_L))`.
    pub fn intracavity_amplitude(&self) -> f64 {
        let drive = (2.0 * self.kappa * self.power / (HBAR * self.omega_l)).sqrt();
        drive / ((self.kappa / 2.0).powi(2) + self.omega_m.powi(2)).sqrt()
    }

    /// Effective coupling `G = g |ā|`.
    pub fn effective_coupling(&self) -> f64 {
        self.single_photon_coupling() * self.intracavity_amplitude()
    }
}

/// `C = 4G²/(γκ)`.
pub fn cooperativity(coupling: f64, gamma: f64, kappa: f64) -> Result<f64> {
    if !(gamma > 0.0 && kappa > 0.0 && gamma.is_finite() && kappa.is_finite()) {
        return Err(Error::Domain(format!(
            "rates must be positive, got gamma={gamma}, kappa={kappa}"
        )));
    }
    if !coupling.is_finite() {
        return Err(Error::Domain(format!("coupling must be finite, got {coupling}")));
    }
    Ok(4.0 * coupling * coupling / (gamma * kappa))
}

/// Cooperativity from the raw cavity parameters.
pub fn cooperativity_from_raw(raw: &RawCavityParams) -> Result<f64> {
    raw.validate()?;
    cooperativity(raw.effective_coupling(), raw.gamma, raw.kappa)
}
