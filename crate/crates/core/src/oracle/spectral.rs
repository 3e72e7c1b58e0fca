//! Frequency-domain route to the steady-state covariance matrix.
//!
//! Each cavity's `X` quadratures obey `u̇ = A u + noise` with
//! `A = [[−γ/2, G], [−G, −κ/2]]`. In Fourier space `u(ω) = T(ω) noise(ω)`
//! with
//!
//! ```text
//! T(ω) = (−iω − A)⁻¹ = [[κ/2 − iω, G], [−G, γ/2 − iω]] / ξ(ω),
//! ξ(ω) = (γ/2 − iω)(κ/2 − iω) + G²,
//! ```
//!
//! and a stationary element is `(1/2π) ∫ Re[T(ω) D T(ω)†]ᵢⱼ dω` over the real
//! line, `D` being the white-noise diffusion of the inputs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use nalgebra::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::SystemParams;

/// Default absolute tolerance of the quadrature.
pub const SPECTRAL_TOL: f64 = 1e-8;

const MAX_INTERVALS: usize = 20_000;

/// Selects one independent entry of the 8×8 steady-state matrix (block layout names).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CmElement {
    /// `⟨X_m1²⟩`
    V1,
    /// `⟨X_m1 X_m2⟩`
    V13,
    /// `⟨X_o1²⟩`
    V2,
    /// `⟨X_o1 X_o2⟩`
    V57,
    /// `⟨X_m1 X_o1⟩`
    V15,
    /// `⟨X_m1 X_o2⟩`
    V17,
}

impl CmElement {
    pub const ALL: [CmElement; 6] = [
        CmElement::V1,
        CmElement::V13,
        CmElement::V2,
        CmElement::V57,
        CmElement::V15,
        CmElement::V17,
    ];
}

struct Spectrum {
    gamma: f64,
    kappa: f64,
    g: f64,
    mech_noise: f64,
    opt_noise: f64,
    cross_noise: f64,
}

impl Spectrum {
    fn new(p: &SystemParams) -> Self {
        let gamma = p.damping_ratio();
        let kappa = 1.0;
        Self {
            gamma,
            kappa,
            g: p.coupling(),
            mech_noise: gamma / 2.0 * (2.0 * p.nth() + 1.0),
            opt_noise: kappa / 2.0 * (2.0 * p.squeezed_photons() + 1.0),
            cross_noise: kappa * p.squeezed_correlation(),
        }
    }

    /// `Re[T D T†]ᵢⱼ` at frequency `omega`.
    fn density(&self, which: CmElement, omega: f64) -> f64 {
        let iw = Complex::new(0.0, omega);
        let xi = (self.gamma / 2.0 - iw) * (self.kappa / 2.0 - iw) + self.g * self.g;
        let t_mm = (self.kappa / 2.0 - iw) / xi;
        let t_mo = Complex::new(self.g, 0.0) / xi;
        let t_om = Complex::new(-self.g, 0.0) / xi;
        let t_oo = (self.gamma / 2.0 - iw) / xi;
        match which {
            CmElement::V1 => t_mm.norm_sqr() * self.mech_noise + t_mo.norm_sqr() * self.opt_noise,
            CmElement::V13 => t_mo.norm_sqr() * self.cross_noise,
            CmElement::V2 => t_om.norm_sqr() * self.mech_noise + t_oo.norm_sqr() * self.opt_noise,
            CmElement::V57 => t_oo.norm_sqr() * self.cross_noise,
            CmElement::V15 => {
                (t_mm * t_om.conj()).re * self.mech_noise + (t_mo * t_oo.conj()).re * self.opt_noise
            }
            CmElement::V17 => (t_mo * t_oo.conj()).re * self.cross_noise,
        }
    }
}

pub fn spectral_cm_element(p: &SystemParams, which: CmElement) -> Result<f64> {
    spectral_cm_element_with_tol(p, which, SPECTRAL_TOL)
}

/// Evaluates one covariance entry by adaptive quadrature over all frequencies.
///
/// The integrand is even in `ω`, so the half line is integrated and doubled.
/// `ω = s·t/(1 − t)` maps `[0, ∞)` onto `[0, 1)` with `s` the geometric mean
/// of the two bare decay rates.
pub fn spectral_cm_element_with_tol(p: &SystemParams, which: CmElement, tol: f64) -> Result<f64> {
    let spec = Spectrum::new(p);
    let scale = (spec.gamma * spec.kappa).sqrt() / 2.0;
    let integrand = |t: f64| {
        let one_minus = 1.0 - t;
        let omega = scale * t / one_minus;
        let jacobian = scale / (one_minus * one_minus);
        spec.density(which, omega) * jacobian
    };
    // (1/2π)·2∫₀^∞ = (1/π)∫₀^∞
    let half_line = integrate_adaptive(integrand, 0.0, 1.0, tol * PI)?;
    Ok(half_line / PI)
}

// Gauss-Kronrod 7/15 nodes on [-1, 1], non-negative half.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Interval {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Interval {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    Interval {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Globally adaptive Gauss-Kronrod quadrature to absolute tolerance `tol`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let mut heap = BinaryHeap::new();
    let first = gauss_kronrod(&f, a, b);
    let mut total = first.value;
    let mut error = first.error;
    heap.push(first);
    while error > tol {
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::Convergence(format!(
                "quadrature error estimate {error:e} above {tol:e} after {MAX_INTERVALS} intervals"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let left = gauss_kronrod(&f, worst.a, mid);
        let right = gauss_kronrod(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        if !total.is_finite() {
            return Err(Error::Convergence("quadrature produced a non-finite value".into()));
        }
        heap.push(left);
        heap.push(right);
    }
    // re-sum to shed the drift of the running updates
    Ok(heap.iter().map(|i| i.value).sum())
}
