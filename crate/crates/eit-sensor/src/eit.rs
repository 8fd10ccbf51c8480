//! Closed-form steady-state optical response of the cascade three-level
//! system and derived spectral quantities.
//!
//! `steady_state_coherence` evaluates the weak-probe closed form
//!
//! ρ_ge = iΩ_p(γ_r + i2(Δ_p+Δ_c)) / [(γ_e + i2Δ_p)(γ_r + i2(Δ_p+Δ_c)) + Ω_c²]
//!
//! literally, with every quantity a /2π value in MHz. The companion
//! `steady_state_coherence_exact` solves the full master equation (see
//! [`crate::lindblad`]); [`CoherenceModel`] selects between them wherever a
//! line shape is consumed.

use num_complex::Complex64;

use crate::atom::{AtomSystem, CoherenceModel, OpticalMedium, SpectrumGrid};
use crate::error::{Error, Result};
use crate::numerics::{central_diff, linspace, DERIV_STEP_MHZ};

/// Magnitude below which the closed-form denominator counts as degenerate.
const DENOM_GUARD: f64 = 1e-30;

/// Which spectral observable a scan or slope refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// Im ρ_ge, proportional to probe absorption.
    Absorption,
    /// Beer–Lambert transmittance η = η₀·e^(−β·Im ρ_ge).
    Transmittance,
}

/// Weak-probe steady-state coherence ρ_ge at coupling detuning `delta_c`.
pub fn steady_state_coherence(sys: &AtomSystem, delta_c: f64) -> Result<Complex64> {
    let two_photon = Complex64::new(sys.gamma_r, 2.0 * (sys.delta_p + delta_c));
    let probe = Complex64::new(sys.gamma_e, 2.0 * sys.delta_p);
    let den = probe * two_photon + sys.omega_c * sys.omega_c;
    if den.norm() < DENOM_GUARD {
        return Err(Error::DegenerateParameters(den.norm()));
    }
    Ok(Complex64::I * sys.omega_p * two_photon / den)
}

/// Full-master-equation steady-state coherence ρ_ge (probe saturation
/// included).
pub fn steady_state_coherence_exact(sys: &AtomSystem, delta_c: f64) -> Result<Complex64> {
    crate::lindblad::steady_state_rho_ge(sys, delta_c)
}

/// ρ_ge through the selected model.
pub fn coherence(sys: &AtomSystem, model: CoherenceModel, delta_c: f64) -> Result<Complex64> {
    match model {
        CoherenceModel::ClosedForm => steady_state_coherence(sys, delta_c),
        CoherenceModel::SteadyState => steady_state_coherence_exact(sys, delta_c),
    }
}

/// Probe absorption signal Im ρ_ge (the ρ(Δ_c, E) of the readout formulas,
/// at zero field), weak-probe closed form.
pub fn absorption(sys: &AtomSystem, delta_c: f64) -> Result<f64> {
    Ok(steady_state_coherence(sys, delta_c)?.im)
}

/// Probe absorption through the selected model.
pub fn absorption_with(sys: &AtomSystem, model: CoherenceModel, delta_c: f64) -> Result<f64> {
    Ok(coherence(sys, model, delta_c)?.im)
}

/// Beer–Lambert transmittance η = η₀·e^(−β·Im ρ_ge), weak-probe closed form.
pub fn transmittance(sys: &AtomSystem, med: &OpticalMedium, delta_c: f64) -> Result<f64> {
    transmittance_with(sys, med, CoherenceModel::ClosedForm, delta_c)
}

/// Transmittance through the selected model.
pub fn transmittance_with(
    sys: &AtomSystem,
    med: &OpticalMedium,
    model: CoherenceModel,
    delta_c: f64,
) -> Result<f64> {
    Ok(med.eta0 * (-med.beta * absorption_with(sys, model, delta_c)?).exp())
}

fn observable_fn<'a>(
    sys: &'a AtomSystem,
    med: &OpticalMedium,
    model: CoherenceModel,
    observable: Observable,
) -> impl Fn(f64) -> Result<f64> + 'a {
    let med = *med;
    move |dc| match observable {
        Observable::Absorption => absorption_with(sys, model, dc),
        Observable::Transmittance => transmittance_with(sys, &med, model, dc),
    }
}

/// Uniform scan of the chosen observable over `range = (lo, hi)`.
pub fn scan_spectrum(
    sys: &AtomSystem,
    med: &OpticalMedium,
    model: CoherenceModel,
    range: (f64, f64),
    n_points: usize,
    observable: Observable,
) -> Result<SpectrumGrid> {
    let (lo, hi) = range;
    if n_points < 2 {
        return Err(Error::InvalidRange(format!(
            "scan needs at least 2 points, got {n_points}"
        )));
    }
    if !(hi > lo) {
        return Err(Error::InvalidRange(format!(
            "degenerate scan range [{lo}, {hi}]"
        )));
    }
    let f = observable_fn(sys, med, model, observable);
    let axis = linspace(lo, hi, n_points);
    let values = axis.iter().map(|&dc| f(dc)).collect::<Result<Vec<_>>>()?;
    SpectrumGrid::new(axis, values)
}

/// Derivative of the chosen observable with respect to Δ_c, by central
/// difference with step [`DERIV_STEP_MHZ`].
pub fn spectral_slope(
    sys: &AtomSystem,
    med: &OpticalMedium,
    model: CoherenceModel,
    delta_c: f64,
    observable: Observable,
) -> Result<f64> {
    central_diff(
        observable_fn(sys, med, model, observable),
        delta_c,
        DERIV_STEP_MHZ,
    )
}

/// Full width at half maximum of the grid's dominant peak, in MHz.
///
/// The baseline is the mean of the two boundary values and the half-maximum
/// crossings are located by linear interpolation between grid points. Scans
/// should extend at least five linewidths beyond the peak so the baseline is
/// representative.
pub fn fwhm(grid: &SpectrumGrid) -> Result<f64> {
    let xs = grid.delta_c();
    let ys = grid.values();
    let n = ys.len();
    let baseline = 0.5 * (ys[0] + ys[n - 1]);
    let k = crate::numerics::argmax(ys);
    let peak = ys[k];
    if !(peak > baseline) {
        return Err(Error::NotAPeak(
            "grid maximum does not rise above the boundary baseline".into(),
        ));
    }
    let half = baseline + 0.5 * (peak - baseline);

    let mut i = k;
    while i > 0 && ys[i] > half {
        i -= 1;
    }
    if ys[i] > half {
        return Err(Error::NotAPeak(
            "no half-maximum crossing left of the peak".into(),
        ));
    }
    let left = xs[i] + (half - ys[i]) * (xs[i + 1] - xs[i]) / (ys[i + 1] - ys[i]);

    let mut j = k;
    while j < n - 1 && ys[j] > half {
        j += 1;
    }
    if ys[j] > half {
        return Err(Error::NotAPeak(
            "no half-maximum crossing right of the peak".into(),
        ));
    }
    let right = xs[j - 1] + (half - ys[j - 1]) * (xs[j] - xs[j - 1]) / (ys[j] - ys[j - 1]);

    Ok(right - left)
}

/// Field amplitude from a measured Autler–Townes peak separation:
/// E_s = Δf/(√2·μ_s), with `mu_s` in MHz/(V/cm) so the result is in V/cm.
pub fn ats_field_amplitude(delta_f: f64, mu_s: f64) -> Result<f64> {
    if !(delta_f >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "peak separation must be >= 0, got {delta_f}"
        )));
    }
    if !(mu_s > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "dipole moment must be > 0, got {mu_s}"
        )));
    }
    Ok(delta_f / (std::f64::consts::SQRT_2 * mu_s))
}

/// Calibration scan for `calibrate_beta`: ±20 MHz (or six times the target
/// width, whichever is larger) at 10 kHz-equivalent resolution.
fn calibration_scan(
    sys: &AtomSystem,
    model: CoherenceModel,
    target_fwhm: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let half = (6.0 * target_fwhm).max(20.0);
    let n = 4001;
    let axis = linspace(-half, half, n);
    let rho = axis
        .iter()
        .map(|&dc| absorption_with(sys, model, dc))
        .collect::<Result<Vec<_>>>()?;
    Ok((axis, rho))
}

fn fwhm_for_beta(axis: &[f64], rho: &[f64], beta: f64) -> Result<f64> {
    let eta: Vec<f64> = rho.iter().map(|r| (-beta * r).exp()).collect();
    fwhm(&SpectrumGrid::new(axis.to_vec(), eta)?)
}

/// Bisect for the optical-depth prefactor β whose transmittance scan has the
/// requested FWHM. The returned β reproduces `target_fwhm` within 0.5%.
pub fn calibrate_beta(sys: &AtomSystem, model: CoherenceModel, target_fwhm: f64) -> Result<f64> {
    if !(target_fwhm > 0.0) || !target_fwhm.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "target FWHM must be > 0, got {target_fwhm}"
        )));
    }
    let (axis, rho) = calibration_scan(sys, model, target_fwhm)?;

    // FWHM(beta) decreases monotonically: exponentiation narrows the window.
    let mut lo = 1e-9;
    if fwhm_for_beta(&axis, &rho, lo)? < target_fwhm {
        return Err(Error::BracketExhausted(format!(
            "target {target_fwhm} MHz exceeds the zero-depth limit width"
        )));
    }
    let mut hi = 1.0;
    while fwhm_for_beta(&axis, &rho, hi)? > target_fwhm {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::BracketExhausted(format!(
                "no beta below 1e12 reaches FWHM {target_fwhm} MHz"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if fwhm_for_beta(&axis, &rho, mid)? > target_fwhm {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) < 1e-10 * hi {
            break;
        }
    }
    let beta = 0.5 * (lo + hi);
    let achieved = fwhm_for_beta(&axis, &rho, beta)?;
    if (achieved - target_fwhm).abs() > 5e-3 * target_fwhm {
        return Err(Error::BracketExhausted(format!(
            "bisection stalled at FWHM {achieved} MHz for target {target_fwhm} MHz"
        )));
    }
    Ok(beta)
}
