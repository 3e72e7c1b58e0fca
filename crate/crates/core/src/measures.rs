//! Quantum coherence, entanglement of formation and Gaussian discord of
//! symmetric two-mode Gaussian states. All values in nats.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{f_entropy, pt_min_symplectic_eig, symplectic_eigs_symmetric, SymmetricTwoModeCM, VACUUM};

/// Magnitude of negative rounding noise that is clamped to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SubsystemKind {
    Mechanical,
    Optical,
}

impl SubsystemKind {
    pub const ALL: [SubsystemKind; 2] = [SubsystemKind::Mechanical, SubsystemKind::Optical];

    pub fn short_name(self) -> &'static str {
        match self {
            SubsystemKind::Mechanical => "mech",
            SubsystemKind::Optical => "opt",
        }
    }
}

impl fmt::Display for SubsystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for SubsystemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mech" | "mechanical" => Ok(SubsystemKind::Mechanical),
            "opt" | "optical" => Ok(SubsystemKind::Optical),
            other => Err(Error::param("subsystem", format!("unknown subsystem `{other}`"))),
        }
    }
}

/// Which closed form to use for the entanglement of formation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum EofFormula {
    /// `f((θ² + 1/4) / (2θ))`: continuous at `θ = 1/2` and equal to the
    /// reduced entropy on pure states.
    #[default]
    Standard,
    /// `f((θ² + 1/4) / (2θ²))`; jumps to `f(1)` at the threshold. Negative control only.
    SquaredDenominator,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureTriple {
    pub eof: f64,
    pub gqd: f64,
    pub qc: f64,
}

impl MeasureTriple {
    pub const ZERO: MeasureTriple = MeasureTriple {
        eof: 0.0,
        gqd: 0.0,
        qc: 0.0,
    };
}

fn clamp_noise(name: &str, v: f64) -> Result<f64> {
    if !v.is_finite() {
        return Err(Error::Domain(format!("{name} is not finite")));
    }
    if v < 0.0 {
        if v >= -NEGATIVE_CLAMP {
            return Ok(0.0);
        }
        return Err(Error::Domain(format!("{name} = {v:e} is negative")));
    }
    Ok(v)
}

/// Relative-entropy coherence `2 f(s) − f(η₊) − f(η₋)`.
pub fn quantum_coherence(cm: &SymmetricTwoModeCM) -> Result<f64> {
    let eta = symplectic_eigs_symmetric(cm);
    let qc = 2.0 * f_entropy(cm.s())? - f_entropy(eta.eta_plus)? - f_entropy(eta.eta_minus)?;
    clamp_noise("coherence", qc)
}

pub fn eof(cm: &SymmetricTwoModeCM) -> Result<f64> {
    eof_with(cm, EofFormula::Standard)
}

/// Entanglement of formation; zero unless the partially transposed matrix
/// has `θ̃₋ < 1/2`.
pub fn eof_with(cm: &SymmetricTwoModeCM, formula: EofFormula) -> Result<f64> {
    let theta = pt_min_symplectic_eig(cm);
    if theta >= VACUUM {
        return Ok(0.0);
    }
    let numerator = theta * theta + 0.25;
    let arg = match formula {
        EofFormula::Standard => numerator / (2.0 * theta),
        EofFormula::SquaredDenominator => numerator / (2.0 * theta * theta),
    };
    clamp_noise("entanglement of formation", f_entropy(arg)?)
}

/// Gaussian discord with the measured mode's entropy `f(s)` as first term:
/// `f(s) − f(η₊) − f(η₋) + f(Φ)`, `Φ = (s + 2(s² − k²)) / (1 + 2s)`.
///
/// Uses the `det K ≤ 0` branch of the Gaussian-measurement optimization,
/// which always applies here since `det K = −k²`.
pub fn gqd(cm: &SymmetricTwoModeCM) -> Result<f64> {
    let s = cm.s();
    let eta = symplectic_eigs_symmetric(cm);
    // s² − k² = η₊η₋ for this family
    let phi = (s + 2.0 * eta.eta_plus * eta.eta_minus) / (1.0 + 2.0 * s);
    let d = f_entropy(s)? - f_entropy(eta.eta_plus)? - f_entropy(eta.eta_minus)? + f_entropy(phi.max(VACUUM))?;
    clamp_noise("discord", d)
}

pub fn measure_triple(cm: &SymmetricTwoModeCM) -> Result<MeasureTriple> {
    measure_triple_with(cm, EofFormula::Standard)
}

pub fn measure_triple_with(cm: &SymmetricTwoModeCM, formula: EofFormula) -> Result<MeasureTriple> {
    Ok(MeasureTriple {
        eof: eof_with(cm, formula)?,
        gqd: gqd(cm)?,
        qc: quantum_coherence(cm)?,
    })
}
