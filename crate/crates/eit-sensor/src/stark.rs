//! Quadratic Stark transduction between electric field and EIT resonance
//! shift, and the rigidly shifted spectrum model.
//!
//! The shifted spectrum is modeled as an exact rigid translation of the
//! zero-field line shape, ρ(Δ_c, E) = ρ₀(Δ_c − ΔS(E)); coupling the field
//! into the detunings directly is out of scope. Fields are V/cm here to
//! match the polarizability units; the readout layer converts V/m once at
//! configuration time.
//!
//! The quadratic shift model is taken as valid by assumption across the
//! full field range: level crossings eventually bend the real Stark map
//! away from the parabola, but no cutoff is imposed here.

use crate::atom::{AtomSystem, CoherenceModel};
use crate::eit::absorption_with;
use crate::error::{Error, Result};

/// Rydberg sensing state: quadratic polarizability and a descriptive label.
#[derive(Debug, Clone, PartialEq)]
pub struct StarkState {
    /// Polarizability α in MHz/(V/cm)², > 0.
    pub alpha: f64,
    /// Descriptive state name.
    pub label: String,
}

impl StarkState {
    pub fn new(alpha: f64, label: impl Into<String>) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "polarizability must be > 0, got {alpha}"
            )));
        }
        Ok(Self {
            alpha,
            label: label.into(),
        })
    }

    /// The Rb 35S1/2 sensing state, α = 4.32 MHz/(V/cm)².
    pub fn rb35s() -> Self {
        Self {
            alpha: 4.32,
            label: "Rb 35S1/2".into(),
        }
    }
}

impl Default for StarkState {
    fn default() -> Self {
        Self::rb35s()
    }
}

/// Quadratic Stark shift ΔS = ½·α·E², in MHz for `e_field` in V/cm.
pub fn stark_shift(state: &StarkState, e_field: f64) -> f64 {
    0.5 * state.alpha * e_field * e_field
}

/// Inverse mapping E = √(2ΔS/α) in V/cm; rejects negative shifts.
pub fn field_from_shift(state: &StarkState, shift: f64) -> Result<f64> {
    if shift < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Stark shift must be >= 0, got {shift}"
        )));
    }
    Ok((2.0 * shift / state.alpha).sqrt())
}

/// Field-perturbed absorption ρ(Δ_c, E) = ρ₀(Δ_c − ΔS(E)).
pub fn shifted_absorption(
    sys: &AtomSystem,
    model: CoherenceModel,
    state: &StarkState,
    delta_c: f64,
    e_field: f64,
) -> Result<f64> {
    absorption_with(sys, model, delta_c - stark_shift(state, e_field))
}

/// Field whose Stark shift equals one linewidth: the classic resolution
/// threshold of peak-shift readout, √(2·FWHM/α) in V/cm.
pub fn peak_shift_threshold(state: &StarkState, fwhm: f64) -> Result<f64> {
    if fwhm < 0.0 || !fwhm.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "FWHM must be >= 0, got {fwhm}"
        )));
    }
    Ok((2.0 * fwhm / state.alpha).sqrt())
}
