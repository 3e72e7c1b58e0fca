//! Symplectic algebra and entropy primitives for Gaussian states.
//!
//! Convention: ħ = 1 and quadratures `X = (a† + a)/√2`, `Y = (a − a†)/(i√2)`,
//! so the vacuum covariance matrix is `I/2` and every symplectic eigenvalue of
//! a physical state is at least `1/2`. Matrices use the per-mode ordering
//! `(X₁, Y₁, X₂, Y₂, …)`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};

/// Symplectic eigenvalue of the vacuum.
pub const VACUUM: f64 = 0.5;

/// Width of the band below `1/2` that `f_entropy` snaps to `1/2`.
pub const ENTROPY_CLAMP: f64 = 1e-12;

/// Default tolerance for physicality checks.
pub const PHYSICALITY_TOL: f64 = 1e-12;

/// Tolerance on the symmetry of a [`GeneralCM`], relative to its largest entry.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Residual bound for the numeric symplectic eigensolve.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-10;

/// Von Neumann entropy (in nats) of a thermal mode with symplectic eigenvalue `x`:
///
/// `f(x) = (x + ½) ln(x + ½) − (x − ½) ln(x − ½)`
///
/// `f(½) = 0` (the `0·ln 0` limit). Inputs within [`ENTROPY_CLAMP`] below
/// `½` are treated as `½`; anything smaller is a domain error.
pub fn f_entropy(x: f64) -> Result<f64> {
    if !x.is_finite() || x < VACUUM - ENTROPY_CLAMP {
        return Err(Error::Domain(format!(
            "entropy function requires x >= 1/2, got {x}"
        )));
    }
    if x <= VACUUM {
        return Ok(0.0);
    }
    let hi = x + 0.5;
    let lo = x - 0.5;
    Ok(hi * hi.ln() - lo * lo.ln())
}

/// Covariance matrix of a symmetric two-mode squeezed thermal state,
///
/// ```text
///     [ s  0  k  0 ]
///     [ 0  s  0 -k ]
///     [ k  0  s  0 ]
///     [ 0 -k  0  s ]
/// ```
///
/// Physicality (`s² − k² ≥ 1/4`) is checked at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetricTwoModeCM {
    s: f64,
    k: f64,
}

impl SymmetricTwoModeCM {
    pub fn new(s: f64, k: f64) -> Result<Self> {
        Self::with_tolerance(s, k, PHYSICALITY_TOL)
    }

    /// Like [`new`](Self::new), with the physicality tolerance scaled by `max(1, s²)`
    /// so that large-variance states built from rounded inputs are not rejected.
    pub fn with_tolerance(s: f64, k: f64, tol: f64) -> Result<Self> {
        if !s.is_finite() || !k.is_finite() {
            return Err(Error::Unphysical(format!("non-finite entries s={s}, k={k}")));
        }
        if s <= 0.0 {
            return Err(Error::Unphysical(format!("variance s={s} must be positive")));
        }
        if k.abs() >= s {
            return Err(Error::Unphysical(format!("|k|={} must be below s={s}", k.abs())));
        }
        let det = (s - k.abs()) * (s + k.abs());
        if det < 0.25 - tol * s.powi(2).max(1.0) {
            return Err(Error::Unphysical(format!(
                "s²-k² = {det} is below 1/4 (smallest symplectic eigenvalue {})",
                det.sqrt()
            )));
        }
        Ok(Self { s, k })
    }

    pub fn vacuum() -> Self {
        Self { s: VACUUM, k: 0.0 }
    }

    /// Product of two identical thermal modes with mean occupation `nth`.
    pub fn thermal(nth: f64) -> Result<Self> {
        if !nth.is_finite() || nth < 0.0 {
            return Err(Error::param("nth", format!("must be finite and >= 0, got {nth}")));
        }
        Self::new(nth + 0.5, 0.0)
    }

    /// Pure two-mode squeezed vacuum with squeezing `r`.
    pub fn two_mode_squeezed_vacuum(r: f64) -> Result<Self> {
        Self::new((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// `s² − k²`, evaluated as `(s − |k|)(s + |k|)`.
    pub fn det_difference(&self) -> f64 {
        (self.s - self.k.abs()) * (self.s + self.k.abs())
    }

    /// Determinant of the full 4×4 matrix, `(s² − k²)²`.
    pub fn det(&self) -> f64 {
        self.det_difference().powi(2)
    }

    pub fn to_general(&self) -> GeneralCM {
        GeneralCM {
            n_modes: 2,
            matrix: symmetric_two_mode_matrix(self.s, self.k),
        }
    }
}

fn symmetric_two_mode_matrix(s: f64, k: f64) -> DMatrix<f64> {
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        s,   0.0, k,   0.0,
        0.0, s,   0.0, -k,
        k,   0.0, s,   0.0,
        0.0, -k,  0.0, s,
    ]);
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymplecticSpectrum {
    pub eta_plus: f64,
    pub eta_minus: f64,
}

impl SymplecticSpectrum {
    pub fn is_physical(&self, tol: f64) -> bool {
        self.eta_minus >= VACUUM - tol
    }
}

/// Symplectic spectrum of a symmetric two-mode state from its invariants:
///
/// `η± = √((Δ ± √(Δ² − 4 det V)) / 2)` with `Δ = det S₁ + det S₂ + 2 det K`.
///
/// For this family `Δ² = 4 det V` and the spectrum is degenerate at `√(s² − k²)`.
/// `s² − k²` within `PHYSICALITY_TOL·max(1, s²)` of `1/4` is taken as exactly
/// `1/4`: the entries carry rounding of order `ε·s`, and `f` has unbounded
/// slope at `1/2`.
pub fn symplectic_eigs_symmetric(cm: &SymmetricTwoModeCM) -> SymplecticSpectrum {
    let mut d = cm.det_difference();
    if (d - 0.25).abs() <= PHYSICALITY_TOL * cm.s.powi(2).max(1.0) {
        d = 0.25;
    }
    let delta = 2.0 * d;
    let disc = (delta * delta - 4.0 * d * d).max(0.0).sqrt();
    let eta_plus = ((delta + disc) / 2.0).sqrt().max(VACUUM);
    let eta_minus = ((delta - disc) / 2.0).max(0.0).sqrt().max(VACUUM);
    SymplecticSpectrum { eta_plus, eta_minus }
}

/// Smallest symplectic eigenvalue of the partially transposed matrix.
///
/// With `Δ̃ = det S₁ + det S₂ − 2 det K = 2(s² + k²)` the general expression
/// `√((Δ̃ − √(Δ̃² − 4 det V)) / 2)` collapses to `s − |k|`, which is what is
/// evaluated here to avoid the cancellation in the nested square roots.
pub fn pt_min_symplectic_eig(cm: &SymmetricTwoModeCM) -> f64 {
    cm.s - cm.k.abs()
}

/// Dense covariance matrix of an `n`-mode Gaussian state in `(X₁, Y₁, …, Xₙ, Yₙ)` ordering.
///
/// Construction checks symmetry and positive definiteness. Physicality in the
/// uncertainty-principle sense is a separate question, see [`validate_physical`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralCM {
    n_modes: usize,
    matrix: DMatrix<f64>,
}

impl GeneralCM {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols || rows == 0 || rows % 2 != 0 {
            return Err(Error::InvalidMatrix(format!(
                "covariance matrix must be 2n×2n, got {rows}×{cols}"
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        let scale = matrix.amax().max(1.0);
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::InvalidMatrix(format!(
                "matrix is not symmetric (max |V - Vᵀ| = {asym:e})"
            )));
        }
        let sym = (&matrix + matrix.transpose()) * 0.5;
        if sym.clone().cholesky().is_none() {
            return Err(Error::InvalidMatrix("matrix is not positive definite".into()));
        }
        Ok(Self {
            n_modes: rows / 2,
            matrix: sym,
        })
    }

    /// `I/2` on `n_modes` modes.
    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            n_modes,
            matrix: DMatrix::identity(2 * n_modes, 2 * n_modes) * VACUUM,
        }
    }

    /// Embeds a symmetric two-mode `(s, k)` pair without the physicality check.
    pub fn symmetric_two_mode(s: f64, k: f64) -> Result<Self> {
        Self::new(symmetric_two_mode_matrix(s, k))
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    pub fn det(&self) -> f64 {
        self.matrix.determinant()
    }

    /// Reduced state of the listed modes, in the listed order.
    pub fn submatrix(&self, modes: &[usize]) -> Result<Self> {
        if modes.is_empty() || modes.iter().any(|&m| m >= self.n_modes) {
            return Err(Error::InvalidMatrix(format!(
                "mode list {modes:?} out of range for {} modes",
                self.n_modes
            )));
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let matrix = DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.matrix[(idx[i], idx[j])]);
        Ok(Self {
            n_modes: modes.len(),
            matrix,
        })
    }

    /// Permutes modes: mode `i` of the result is mode `order[i]` of `self`.
    pub fn reorder_modes(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n_modes];
        if order.len() != self.n_modes {
            return Err(Error::InvalidMatrix(format!(
                "permutation has {} entries for {} modes",
                order.len(),
                self.n_modes
            )));
        }
        for &m in order {
            if m >= self.n_modes || std::mem::replace(&mut seen[m], true) {
                return Err(Error::InvalidMatrix(format!("{order:?} is not a permutation")));
            }
        }
        self.submatrix(order)
    }

    /// Partial transposition of `mode` (sign flip of its `Y` quadrature).
    pub fn partial_transpose(&self, mode: usize) -> Result<Self> {
        if mode >= self.n_modes {
            return Err(Error::InvalidMatrix(format!("mode {mode} out of range")));
        }
        let y = 2 * mode + 1;
        let mut m = self.matrix.clone();
        for i in 0..m.nrows() {
            if i != y {
                m[(i, y)] = -m[(i, y)];
                m[(y, i)] = -m[(y, i)];
            }
        }
        Ok(Self {
            n_modes: self.n_modes,
            matrix: m,
        })
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.matrix
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }
}

impl Serialize for GeneralCM {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

/// Standard symplectic form `⊕ [[0, 1], [−1, 0]]` on `n_modes` modes.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for m in 0..n_modes {
        omega[(2 * m, 2 * m + 1)] = 1.0;
        omega[(2 * m + 1, 2 * m)] = -1.0;
    }
    omega
}

/// Symplectic eigenvalues of an arbitrary covariance matrix, sorted descending.
///
/// Computes `√V Ω √V`, which is antisymmetric with eigenvalues `±iηⱼ`, and
/// diagonalizes the symmetric positive matrix `(√V Ω √V)ᵀ(√V Ω √V)` whose
/// eigenvalues are the `ηⱼ²`, each twice. Adjacent sorted eigenvalues are
/// paired and averaged.
pub fn symplectic_eigs_numeric(cm: &GeneralCM) -> Result<Vec<f64>> {
    let n = cm.n_modes;
    let eig = SymmetricEigen::new(cm.matrix.clone());
    if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
        return Err(Error::InvalidMatrix("matrix is not positive definite".into()));
    }
    let q = &eig.eigenvectors;
    let sqrt_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let sqrt_v = q * sqrt_diag * q.transpose();

    let m = &sqrt_v * symplectic_form(n) * &sqrt_v;
    let gram = m.transpose() * &m;
    let gram = (&gram + gram.transpose()) * 0.5;
    let scale = gram.amax().max(1.0);

    let sq = SymmetricEigen::new(gram.clone());
    let residual = (0..2 * n)
        .map(|i| {
            let v = sq.eigenvectors.column(i);
            (&gram * v - v * sq.eigenvalues[i]).amax()
        })
        .fold(0.0, f64::max);
    if residual > EIGEN_RESIDUAL_TOL * scale {
        return Err(Error::Convergence(format!(
            "symplectic eigensolve residual {residual:e} exceeds {EIGEN_RESIDUAL_TOL:e}"
        )));
    }

    let mut squares: Vec<f64> = sq.eigenvalues.iter().copied().collect();
    squares.sort_by(|a, b| b.total_cmp(a));
    Ok(squares
        .chunks(2)
        .map(|pair| (0.5 * (pair[0] + pair[1])).max(0.0).sqrt())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Physicality {
    pub physical: bool,
    /// Smallest symplectic eigenvalue, `NaN` when the eigensolve failed.
    pub min_symplectic_eigenvalue: f64,
    pub diagnostic: Option<String>,
}

/// Checks the uncertainty principle `V + iΩ/2 ≥ 0` through the smallest symplectic eigenvalue.
pub fn validate_physical(cm: &GeneralCM, tol: f64) -> Physicality {
    match symplectic_eigs_numeric(cm) {
        Ok(eigs) => {
            let min = eigs.last().copied().unwrap_or(f64::NAN);
            let physical = min >= VACUUM - tol;
            let diagnostic = (!physical).then(|| {
                format!("smallest symplectic eigenvalue {min} is below 1/2 - {tol:e}")
            });
            Physicality {
                physical,
                min_symplectic_eigenvalue: min,
                diagnostic,
            }
        }
        Err(e) => Physicality {
            physical: false,
            min_symplectic_eigenvalue: f64::NAN,
            diagnostic: Some(e.to_string()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// |spec(iΩV)| through the general (non-symmetric) eigensolver.
    fn abs_spectrum_i_omega_v(v: &DMatrix<f64>) -> Vec<f64> {
        let n = v.nrows() / 2;
        let ov = symplectic_form(n) * v;
        let mut abs: Vec<f64> = ov.complex_eigenvalues().iter().map(|z| z.norm()).collect();
        abs.sort_by(|a, b| b.total_cmp(a));
        abs.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
    }

    #[test]
    fn entropy_values() {
        assert_eq!(f_entropy(0.5).unwrap(), 0.0);
        assert_eq!(f_entropy(0.5 - 5e-13).unwrap(), 0.0);
        // 1.5 ln 1.5 - 0.5 ln 0.5
        let expected = 1.5 * 1.5f64.ln() - 0.5 * 0.5f64.ln();
        assert!((f_entropy(1.0).unwrap() - expected).abs() < 1e-15);
        assert!((f_entropy(1.0).unwrap() - 0.954771).abs() < 1e-6);
        assert!(f_entropy(2.0).unwrap() > f_entropy(1.0).unwrap());
    }

    #[test]
    fn entropy_rejects_below_vacuum() {
        assert!(matches!(f_entropy(0.49), Err(Error::Domain(_))));
        assert!(matches!(f_entropy(0.5 - 1e-11), Err(Error::Domain(_))));
        assert!(f_entropy(f64::NAN).is_err());
    }

    #[test]
    fn entropy_convex_and_increasing() {
        let h = 1e-3;
        let mut x = 0.51;
        while x < 20.0 {
            let (a, b, c) = (
                f_entropy(x - h).unwrap(),
                f_entropy(x).unwrap(),
                f_entropy(x + h).unwrap(),
            );
            assert!(c > b && b > a, "not increasing at {x}");
            // f is concave: f'' = ln(...)' < 0
            assert!(a + c - 2.0 * b < 0.0, "second difference sign at {x}");
            x += 0.037;
        }
    }

    #[test]
    fn symmetric_cm_constructor_checks() {
        assert!(SymmetricTwoModeCM::new(1.0, 0.99).is_err());
        assert!(SymmetricTwoModeCM::new(-1.0, 0.0).is_err());
        assert!(SymmetricTwoModeCM::new(0.4, 0.0).is_err());
        assert!(SymmetricTwoModeCM::new(1.0, 1.0).is_err());
        assert!(SymmetricTwoModeCM::new(1.0, 0.6).is_ok());
        for r in [0.1, 1.0, 2.0, 3.0] {
            assert!(SymmetricTwoModeCM::two_mode_squeezed_vacuum(r).is_ok(), "r={r}");
        }
    }

    #[test]
    fn closed_form_spectrum() {
        let vac = symplectic_eigs_symmetric(&SymmetricTwoModeCM::vacuum());
        assert_eq!((vac.eta_plus, vac.eta_minus), (0.5, 0.5));

        let sp = symplectic_eigs_symmetric(&SymmetricTwoModeCM::new(1.0, 0.6).unwrap());
        assert!((sp.eta_plus - 0.8).abs() < 1e-14 && (sp.eta_minus - 0.8).abs() < 1e-14);
        let oracle = abs_spectrum_i_omega_v(&GeneralCM::symmetric_two_mode(1.0, 0.6).unwrap().matrix);
        assert!((oracle[0] - 0.8).abs() < 1e-12 && (oracle[1] - 0.8).abs() < 1e-12);

        for r in [0.3, 1.0, 1.5, 2.5] {
            let sp = symplectic_eigs_symmetric(&SymmetricTwoModeCM::two_mode_squeezed_vacuum(r).unwrap());
            assert!((sp.eta_plus - 0.5).abs() < 1e-12, "r={r}: {sp:?}");
            assert!((sp.eta_minus - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn partial_transpose_eigenvalue() {
        assert_eq!(pt_min_symplectic_eig(&SymmetricTwoModeCM::vacuum()), 0.5);
        let cm = SymmetricTwoModeCM::new(1.0, 0.6).unwrap();
        assert!((pt_min_symplectic_eig(&cm) - 0.4).abs() < 1e-15);
        // oracle: spectrum of the partially transposed matrix
        let pt = cm.to_general().partial_transpose(1).unwrap();
        let spec = abs_spectrum_i_omega_v(pt.matrix());
        assert!((spec[1] - 0.4).abs() < 1e-12, "{spec:?}");

        for r in [0.5, 1.0, 1.5] {
            let cm = SymmetricTwoModeCM::two_mode_squeezed_vacuum(r).unwrap();
            let expected = (-2.0 * r).exp() / 2.0;
            assert!((pt_min_symplectic_eig(&cm) - expected).abs() < 1e-12);
            let spec = symplectic_eigs_numeric(&cm.to_general().partial_transpose(1).unwrap()).unwrap();
            assert!((spec[1] - expected).abs() < 1e-10, "r={r}: {spec:?}");
        }
    }

    #[test]
    fn numeric_spectrum_examples() {
        for n in 1..=4 {
            let eigs = symplectic_eigs_numeric(&GeneralCM::vacuum(n)).unwrap();
            assert_eq!(eigs.len(), n);
            assert!(eigs.iter().all(|e| (e - 0.5).abs() < 1e-14));
        }
        let embedded = SymmetricTwoModeCM::new(1.0, 0.6).unwrap().to_general();
        let eigs = symplectic_eigs_numeric(&embedded).unwrap();
        assert!((eigs[0] - 0.8).abs() < 1e-12 && (eigs[1] - 0.8).abs() < 1e-12);

        let thermal = GeneralCM::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            0.7, 0.7, 0.9, 0.9,
        ])))
        .unwrap();
        let eigs = symplectic_eigs_numeric(&thermal).unwrap();
        assert!((eigs[0] - 0.9).abs() < 1e-14 && (eigs[1] - 0.7).abs() < 1e-14);
    }

    #[test]
    fn numeric_spectrum_matches_general_eigensolver_on_random_matrix() {
        // symplectically non-trivial 3-mode matrix
        let a = DMatrix::from_fn(6, 6, |i, j| ((i * 7 + j * 3) % 5) as f64 * 0.1 - 0.2);
        let v = &a * a.transpose() + DMatrix::identity(6, 6) * 0.8;
        let cm = GeneralCM::new(v.clone()).unwrap();
        let ours = symplectic_eigs_numeric(&cm).unwrap();
        let oracle = abs_spectrum_i_omega_v(&v);
        for (x, y) in ours.iter().zip(&oracle) {
            assert!((x - y).abs() < 1e-10, "{ours:?} vs {oracle:?}");
        }
    }

    #[test]
    fn physicality_validation() {
        let vac = validate_physical(&GeneralCM::vacuum(2), PHYSICALITY_TOL);
        assert!(vac.physical);
        assert!((vac.min_symplectic_eigenvalue - 0.5).abs() < 1e-14);

        let bad = validate_physical(&GeneralCM::symmetric_two_mode(1.0, 0.99).unwrap(), PHYSICALITY_TOL);
        assert!(!bad.physical);
        assert!((bad.min_symplectic_eigenvalue - (1.0f64 - 0.9801).sqrt()).abs() < 1e-10);
        assert!(bad.diagnostic.is_some());

        let ok = validate_physical(&GeneralCM::symmetric_two_mode(1.0, 0.6).unwrap(), PHYSICALITY_TOL);
        assert!(ok.physical);
        assert!((ok.min_symplectic_eigenvalue - 0.8).abs() < 1e-12);
    }

    #[test]
    fn general_cm_rejects_bad_input() {
        assert!(GeneralCM::new(DMatrix::identity(3, 3)).is_err());
        assert!(GeneralCM::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0])).is_err());
        assert!(GeneralCM::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0])).is_err());
        assert!(GeneralCM::new(DMatrix::from_element(2, 2, f64::NAN)).is_err());
    }

    #[test]
    fn mode_reordering_and_submatrix() {
        let m = DMatrix::from_fn(6, 6, |i, j| if i == j { 2.0 + i as f64 } else { 0.01 * (i + j) as f64 });
        let cm = GeneralCM::new(m).unwrap();
        let re = cm.reorder_modes(&[2, 0, 1]).unwrap();
        assert_eq!(re.get(0, 0), cm.get(4, 4));
        assert_eq!(re.get(1, 3), cm.get(5, 1));
        assert!(cm.reorder_modes(&[0, 0, 1]).is_err());
        let sub = cm.submatrix(&[1]).unwrap();
        assert_eq!(sub.n_modes(), 1);
        assert_eq!(sub.get(1, 1), cm.get(3, 3));
    }
}
