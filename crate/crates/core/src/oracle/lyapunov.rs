use nalgebra::{DMatrix, DVector};

use super::drift::{DiffusionMatrix, DriftMatrix};
use crate::error::{Error, Result};
use crate::gaussian::GeneralCM;

/// Largest accepted max-abs residual of `A V + V Aᵀ + D`.
pub const LYAPUNOV_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovSolution {
    pub cm: GeneralCM,
    /// `max |A V + V Aᵀ + D|`.
    pub residual: f64,
}

fn residual_matrix(a: &DMatrix<f64>, v: &DMatrix<f64>, d: &DMatrix<f64>) -> DMatrix<f64> {
    a * v + v * a.transpose() + d
}

/// Solves `A V + V Aᵀ + D = 0` for symmetric `V`.
///
/// The equation is vectorized over the `n(n+1)/2` upper-triangular unknowns
/// and solved by dense LU, followed by one step of iterative refinement.
pub fn solve_lyapunov(a: &DriftMatrix, d: &DiffusionMatrix) -> Result<LyapunovSolution> {
    let (a, d) = (a.matrix(), d.matrix());
    let n = a.nrows();
    if d.shape() != (n, n) {
        return Err(Error::InvalidMatrix(format!(
            "drift is {n}×{n} but diffusion is {:?}",
            d.shape()
        )));
    }
    let abscissa = a
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if abscissa.is_nan() || abscissa >= 0.0 {
        return Err(Error::Singular(format!(
            "drift is not stable (spectral abscissa {abscissa:e})"
        )));
    }

    let unknowns = n * (n + 1) / 2;
    let slot = |i: usize, j: usize| {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * n - i * (i + 1) / 2 + j
    };
    let mut system = DMatrix::zeros(unknowns, unknowns);
    for i in 0..n {
        for j in i..n {
            let row = slot(i, j);
            for l in 0..n {
                // (A V)_ij = Σ_l A_il V_lj ; (V Aᵀ)_ij = Σ_l V_il A_jl
                system[(row, slot(l, j))] += a[(i, l)];
                system[(row, slot(i, l))] += a[(j, l)];
            }
        }
    }
    let lu = system.lu();
    let unpack = |x: &DVector<f64>| DMatrix::from_fn(n, n, |i, j| x[slot(i, j)]);
    let pack = |m: &DMatrix<f64>| {
        let mut rhs = DVector::zeros(unknowns);
        for i in 0..n {
            for j in i..n {
                rhs[slot(i, j)] = m[(i, j)];
            }
        }
        rhs
    };

    let x = lu
        .solve(&pack(&(-d)))
        .ok_or_else(|| Error::Singular("vectorized Lyapunov system is singular".into()))?;
    let mut v = unpack(&x);
    let r = residual_matrix(a, &v, d);
    if let Some(dx) = lu.solve(&pack(&(-r))) {
        v += unpack(&dx);
    }
    let residual = residual_matrix(a, &v, d).amax();
    if residual > LYAPUNOV_RESIDUAL_TOL {
        return Err(Error::Convergence(format!(
            "Lyapunov residual {residual:e} exceeds {LYAPUNOV_RESIDUAL_TOL:e}"
        )));
    }
    let cm = GeneralCM::new(v)?;
    Ok(LyapunovSolution { cm, residual })
}
