//! Self-check suite: oracle equivalence, measure properties and the
//! qualitative features of the figure sweeps.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::gaussian::{
    f_entropy, symplectic_eigs_numeric, symplectic_eigs_symmetric, validate_physical, SymmetricTwoModeCM,
};
use crate::measures::{eof_with, measure_triple_with, EofFormula, MeasureTriple, SubsystemKind};
use crate::model::{closed_form_blocks, mechanical_subsystem, optical_subsystem, SystemParams};
use crate::oracle::{compare_cm, spectral_cm_element, steady_state_with, CmElement, DriftConvention};
use crate::sweep::{evaluate_point, run_sweep_with, Preset, SweepRow};

/// `qc ≥ max(eof, gqd) − DOMINANCE_SLACK`.
pub const DOMINANCE_SLACK: f64 = 1e-9;
/// Expected separability thresholds in `n_th` at `C = 34`, `γ/κ = 0.05`, `r = 1.5`.
pub const MECH_THRESHOLD: f64 = 5.87;
pub const OPT_THRESHOLD: f64 = 9.80;
pub const THRESHOLD_TOL: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOptions {
    /// Oracle-equivalence tolerance (max-abs).
    pub tol: f64,
    /// Agreement required between spectral quadrature and closed forms.
    pub spectral_tol: f64,
    pub grid_points: usize,
    pub spectral_points: usize,
    pub seed: u64,
    pub eof_formula: EofFormula,
    pub drift: DriftConvention,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            spectral_tol: 1e-6,
            grid_points: 200,
            spectral_points: 20,
            seed: 0x5e_ed0f_c0de,
            eof_formula: EofFormula::Standard,
            drift: DriftConvention::BeamSplitter,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub options: VerifyOptions,
    pub checks: Vec<CheckResult>,
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(
            f,
            "{} checks, {} failed: {}",
            self.checks.len(),
            failed,
            if self.passed { "OK" } else { "FAILED" }
        )
    }
}

fn check(name: &'static str, outcome: Result<(bool, String)>) -> CheckResult {
    match outcome {
        Ok((passed, detail)) => CheckResult { name, passed, detail },
        Err(e) => CheckResult {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

pub fn verify(opts: &VerifyOptions) -> VerifyReport {
    let checks = vec![
        check("oracle_equivalence", oracle_equivalence(opts)),
        check("hand_anchor", hand_anchor(opts)),
        check("pure_state_identities", pure_state_identities(opts)),
        check("incoherent_limits", incoherent_limits(opts)),
        check("measure_properties", measure_properties(opts)),
        check("separability_thresholds", separability_thresholds(opts)),
        check("freezing", freezing(opts)),
        check("fig3_directionality", fig3_directionality(opts)),
        check("dominance", dominance(opts)),
        check("eof_continuity", eof_continuity(opts)),
        check("spectral_oracle", spectral_oracle(opts)),
    ];
    VerifyReport {
        passed: checks.iter().all(|c| c.passed),
        options: opts.clone(),
        checks,
    }
}

/// Uniform draws over the documented sampling box:
/// `C ∈ [0, 100]`, `r ∈ [0, 3]`, `n_th ∈ [0, 50]`, `γ/κ ∈ [0.01, 1]`.
pub fn random_params(rng: &mut impl Rng, count: usize) -> Vec<SystemParams> {
    (0..count)
        .map(|_| {
            SystemParams::new(
                rng.random_range(0.0..=100.0),
                rng.random_range(0.0..=3.0),
                rng.random_range(0.0..=50.0),
                rng.random_range(0.01..=1.0),
            )
            .expect("sampling box is valid")
        })
        .collect()
}

fn oracle_equivalence(opts: &VerifyOptions) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut worst_residual = 0.0f64;
    for p in random_params(&mut rng, opts.grid_points) {
        let sol = steady_state_with(&p, opts.drift)?;
        let cmp = compare_cm(&closed_form_blocks(&p), &sol, opts.tol);
        worst = worst.max(cmp.max);
        worst_residual = worst_residual.max(sol.residual);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let passed = worst < opts.tol && worst_residual < 1e-10 && elapsed < 10.0;
    Ok((
        passed,
        format!(
            "{} points, max block deviation {worst:.3e} (tol {:.0e}), max residual {worst_residual:.3e}, {elapsed:.2}s",
            opts.grid_points, opts.tol
        ),
    ))
}

fn hand_anchor(opts: &VerifyOptions) -> Result<(bool, String)> {
    let p = SystemParams::new(1.0, 0.0, 1.0, 1.0)?;
    let b = closed_form_blocks(&p);
    let sol = steady_state_with(&p, opts.drift)?;
    let v = sol.cm.matrix();
    let v1 = v[(crate::oracle::index::XM1, crate::oracle::index::XM1)];
    let v2 = v[(crate::oracle::index::XO1, crate::oracle::index::XO1)];
    let passed = (b.v1 - 1.25).abs() < 1e-12
        && (b.v2 - 0.75).abs() < 1e-12
        && (v1 - 1.25).abs() < 1e-12
        && (v2 - 0.75).abs() < 1e-12;
    Ok((passed, format!("closed form V1={}, V2={}; oracle V1={v1}, V2={v2}", b.v1, b.v2)))
}

fn pure_state_identities(opts: &VerifyOptions) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for r in [0.5, 1.0, 1.5] {
        let p = SystemParams::new(0.0, r, 0.0, FIG_DAMPING)?;
        let (_, opt) = evaluate_point(&p, opts.eof_formula)?;
        let reduced = f_entropy((2.0 * r).cosh() / 2.0)?;
        worst = worst
            .max((opt.eof - reduced).abs())
            .max((opt.gqd - reduced).abs())
            .max((opt.qc - 2.0 * opt.eof).abs());
    }
    let p = SystemParams::new(0.0, 1.5, 0.0, FIG_DAMPING)?;
    let (_, opt) = evaluate_point(&p, opts.eof_formula)?;
    let passed = worst < 1e-12 && (opt.eof - 2.6145).abs() < 5e-5;
    Ok((passed, format!("max deviation {worst:.3e}; r=1.5 common value {:.6}", opt.eof)))
}

const FIG_DAMPING: f64 = 0.05;

fn incoherent_limits(opts: &VerifyOptions) -> Result<(bool, String)> {
    let mut nonzero = 0usize;
    let mut total = 0usize;
    for r in [0.0, 0.5, 1.5, 3.0] {
        for n in [0.0, 1.0, 7.5, 50.0] {
            let p = SystemParams::new(0.0, r, n, FIG_DAMPING)?;
            let (mech, _) = evaluate_point(&p, opts.eof_formula)?;
            total += 1;
            if mech != MeasureTriple::ZERO {
                nonzero += 1;
            }
        }
    }
    Ok((nonzero == 0, format!("{total} points at C=0, {nonzero} with nonzero mechanical measures")))
}

fn measure_properties(opts: &VerifyOptions) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xa5a5);
    let mut failures = Vec::new();
    let mut spectrum_dev = 0.0f64;
    for _ in 0..opts.grid_points {
        let s: f64 = rng.random_range(0.5..=20.0);
        let kmax = (s * s - 0.25).max(0.0).sqrt();
        let k = rng.random_range(-1.0..=1.0) * kmax * (1.0 - 1e-9);
        let cm = SymmetricTwoModeCM::new(s, k)?;
        let m = measure_triple_with(&cm, opts.eof_formula)?;
        if m.eof < 0.0 || m.gqd < 0.0 || m.qc < 0.0 {
            failures.push(format!("negative measure at s={s}, k={k}"));
        }
        if (m.eof > 0.0) != (s - k.abs() < 0.5) {
            failures.push(format!("EoF support mismatch at s={s}, k={k}"));
        }
        let numeric = symplectic_eigs_numeric(&cm.to_general())?;
        let closed = symplectic_eigs_symmetric(&cm);
        spectrum_dev = spectrum_dev
            .max((numeric[0] - closed.eta_plus).abs())
            .max((numeric[1] - closed.eta_minus).abs());
    }
    if spectrum_dev > 1e-10 {
        failures.push(format!("closed-form and numeric spectra differ by {spectrum_dev:e}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5a5a);
    for p in crate::verify::random_params(&mut rng, opts.grid_points / 4) {
        let b = closed_form_blocks(&p);
        for cm in [mechanical_subsystem(&b)?, optical_subsystem(&b)?] {
            let phys = validate_physical(&cm.to_general(), 1e-12);
            if !phys.physical {
                failures.push(format!("unphysical subsystem at {p:?}"));
            }
        }
    }
    for s in [0.5, 1.0, 3.0, 12.0] {
        if measure_triple_with(&SymmetricTwoModeCM::new(s, 0.0)?, opts.eof_formula)? != MeasureTriple::ZERO {
            failures.push(format!("product state s={s} carries correlations"));
        }
    }
    let passed = failures.is_empty();
    let detail = if passed {
        format!(
            "{} random states: non-negative, EoF support exact, spectra agree to {spectrum_dev:.1e}",
            opts.grid_points
        )
    } else {
        failures.join("; ")
    };
    Ok((passed, detail))
}

/// Smallest `n_th` at which the subsystem's EoF vanishes, by bisection.
pub fn separability_threshold(base: &SystemParams, kind: SubsystemKind, formula: EofFormula) -> Result<f64> {
    let entangled = |n: f64| -> Result<bool> {
        let (mech, opt) = evaluate_point(&base.with_nth(n)?, formula)?;
        Ok(match kind {
            SubsystemKind::Mechanical => mech.eof > 0.0,
            SubsystemKind::Optical => opt.eof > 0.0,
        })
    };
    let (mut lo, mut hi) = (0.0, 1000.0);
    if !entangled(lo)? {
        return Ok(0.0);
    }
    if entangled(hi)? {
        return Ok(f64::INFINITY);
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if entangled(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

fn separability_thresholds(opts: &VerifyOptions) -> Result<(bool, String)> {
    let base = SystemParams::new(34.0, 1.5, 0.0, FIG_DAMPING)?;
    let mech = separability_threshold(&base, SubsystemKind::Mechanical, opts.eof_formula)?;
    let opt = separability_threshold(&base, SubsystemKind::Optical, opts.eof_formula)?;
    let passed = (mech - MECH_THRESHOLD).abs() <= THRESHOLD_TOL
        && (opt - OPT_THRESHOLD).abs() <= THRESHOLD_TOL
        && mech < opt;
    Ok((passed, format!("mechanical n_th*={mech:.4}, optical n_th*={opt:.4}")))
}

fn nonincreasing(values: impl Iterator<Item = f64>) -> bool {
    let v: Vec<f64> = values.collect();
    v.windows(2).all(|w| w[1] <= w[0])
}

fn nondecreasing(values: impl Iterator<Item = f64>) -> bool {
    let v: Vec<f64> = values.collect();
    v.windows(2).all(|w| w[1] >= w[0])
}

fn column(rows: &[SweepRow], idx: usize) -> impl Iterator<Item = f64> + '_ {
    rows.iter().map(move |r| r.values()[idx])
}

fn freezing(opts: &VerifyOptions) -> Result<(bool, String)> {
    let mut notes = Vec::new();
    let mut passed = true;
    for preset in [Preset::Fig2a, Preset::Fig2b] {
        let rows = run_sweep_with(&preset.spec(), opts.eof_formula)?;
        let last = rows.last().expect("sweep has rows");
        let monotone = (0..6).all(|i| nonincreasing(column(&rows, i)));
        let persist = last.gqd_mech > 0.0 && last.qc_mech > 0.0 && last.gqd_opt > 0.0 && last.qc_opt > 0.0;
        let eof_gone = last.eof_mech == 0.0 && last.eof_opt == 0.0;
        passed &= monotone && persist && eof_gone;
        notes.push(format!(
            "r={}: monotone={monotone}, at n_th=30 gqd/qc mech={:.4}/{:.4} opt={:.4}/{:.4}, eof zero={eof_gone}",
            preset.spec().fixed().squeeze(),
            last.gqd_mech,
            last.qc_mech,
            last.gqd_opt,
            last.qc_opt
        ));
    }
    Ok((passed, notes.join("; ")))
}

fn fig3_directionality(opts: &VerifyOptions) -> Result<(bool, String)> {
    let mut notes = Vec::new();
    let mut passed = true;
    for preset in [Preset::Fig3a, Preset::Fig3b] {
        let rows = run_sweep_with(&preset.spec(), opts.eof_formula)?;
        let mech_up = (0..3).all(|i| nondecreasing(column(&rows, i)));
        let opt_down = (3..6).all(|i| nonincreasing(column(&rows, i)));
        let no_coupling_no_eof = rows[0].eof_mech == 0.0;
        passed &= mech_up && opt_down && no_coupling_no_eof;
        notes.push(format!(
            "n_th={}: mech nondecreasing={mech_up}, opt nonincreasing={opt_down}, EoF_mech(C=0)={}",
            preset.spec().fixed().nth(),
            rows[0].eof_mech
        ));
    }
    Ok((passed, notes.join("; ")))
}

fn dominance(opts: &VerifyOptions) -> Result<(bool, String)> {
    let mut rows = Vec::new();
    for preset in [Preset::Fig2a, Preset::Fig2b, Preset::Fig3a, Preset::Fig3b] {
        rows.extend(run_sweep_with(&preset.spec(), opts.eof_formula)?);
    }
    let mut margin = f64::INFINITY;
    for row in &rows {
        for kind in SubsystemKind::ALL {
            let m = row.triple(kind);
            margin = margin.min(m.qc - m.eof.max(m.gqd));
        }
    }
    Ok((
        margin >= -DOMINANCE_SLACK,
        format!("{} rows, min qc - max(eof, gqd) = {margin:.3e}", rows.len()),
    ))
}

/// Largest `|EoF|` over states whose `θ̃₋` lies within `1e-8` of `1/2`.
pub fn max_eof_near_threshold(formula: EofFormula) -> Result<f64> {
    let mut worst = 0.0f64;
    for s in [0.6, 1.0, 2.5, 10.0] {
        for offset in [-1e-8, -5e-9, -1e-9, 0.0, 1e-9, 5e-9, 1e-8] {
            // θ̃₋ = s − k = 1/2 + offset
            let cm = SymmetricTwoModeCM::new(s, s - 0.5 - offset)?;
            worst = worst.max(eof_with(&cm, formula)?.abs());
        }
    }
    Ok(worst)
}

fn eof_continuity(opts: &VerifyOptions) -> Result<(bool, String)> {
    let ours = max_eof_near_threshold(opts.eof_formula)?;
    let control = max_eof_near_threshold(EofFormula::SquaredDenominator)?;
    let passed = ours < 1e-6 && control >= 1e-6;
    Ok((
        passed,
        format!("max |EoF| near threshold {ours:.3e}; squared-denominator control {control:.4}"),
    ))
}

fn spectral_oracle(opts: &VerifyOptions) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x0f0f);
    let mut worst = 0.0f64;
    for p in random_params(&mut rng, opts.spectral_points) {
        let b = closed_form_blocks(&p);
        for (which, expected) in [
            (CmElement::V1, b.v1),
            (CmElement::V13, b.v13),
            (CmElement::V2, b.v2),
            (CmElement::V57, b.v57),
        ] {
            worst = worst.max((spectral_cm_element(&p, which)? - expected).abs());
        }
    }
    Ok((
        worst < opts.spectral_tol,
        format!("{} points, max deviation {worst:.3e} (tol {:.0e})", opts.spectral_points, opts.spectral_tol),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_passes() {
        let report = verify(&VerifyOptions::default());
        assert!(report.passed, "{report}");
        assert_eq!(report.checks.len(), 11);
    }

    #[test]
    fn squared_denominator_is_detected() {
        let opts = VerifyOptions {
            eof_formula: EofFormula::SquaredDenominator,
            ..Default::default()
        };
        let report = verify(&opts);
        assert!(!report.passed);
        let pure = report.checks.iter().find(|c| c.name == "pure_state_identities").unwrap();
        assert!(!pure.passed);
    }

    #[test]
    fn flipped_drift_is_detected() {
        let opts = VerifyOptions {
            drift: DriftConvention::FlippedCoupling,
            ..Default::default()
        };
        let report = verify(&opts);
        let eq = report.checks.iter().find(|c| c.name == "oracle_equivalence").unwrap();
        assert!(!eq.passed, "{}", eq.detail);
    }
}
