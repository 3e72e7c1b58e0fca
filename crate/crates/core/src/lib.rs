//! Quantum coherence, entanglement of formation and Gaussian discord in the
//! steady state of a double-cavity optomechanical system driven by two-mode
//! squeezed light.
//!
//! - [`gaussian`]: symplectic spectra and the entropy function.
//! - [`model`]: closed-form steady-state blocks and subsystem states.
//! - [`measures`]: the three correlation measures.
//! - [`oracle`]: independent Lyapunov and frequency-domain steady states.
//! - [`sweep`], [`verify`]: figure sweeps, CSV output and the self-check suite.

pub mod error;
pub mod gaussian;
pub mod measures;
pub mod model;
pub mod oracle;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use gaussian::{GeneralCM, SymmetricTwoModeCM, SymplecticSpectrum};
pub use measures::{MeasureTriple, SubsystemKind};
pub use model::{ClosedFormBlocks, SystemParams};
