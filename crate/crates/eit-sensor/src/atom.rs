//! Domain types for the cascade three-level system and the optical medium.
//!
//! Unit convention used throughout the crate: every rate, Rabi frequency, and
//! detuning is stored as its ω/2π value in MHz (the numbers printed in figure
//! captions, e.g. γ_e = 6.066). The steady-state formulas are evaluated
//! literally in these units; no hidden 2π factors are introduced.
//!
//! Sign convention: absorption is quantified by the optical depth
//! OD = β·Im ρ_ge with β > 0, and the transmittance is η = η₀·e^(−OD).
//! The dimensionless prefactor β collects 2Nk_p·l·μ_ge²/(ε₀ħΩ_p); its sign is
//! defined so that positive Im ρ_ge attenuates the probe, which yields
//! absorption dips and an EIT transparency peak.

use crate::error::{Error, Result};

/// Rabi frequencies, detunings, and relaxation rates of the cascade
/// three-level system, all as /2π values in MHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomSystem {
    /// Probe Rabi frequency Ω_p/2π (MHz), > 0.
    pub omega_p: f64,
    /// Coupling Rabi frequency Ω_c/2π (MHz), ≥ 0.
    pub omega_c: f64,
    /// Probe detuning Δ_p (MHz).
    pub delta_p: f64,
    /// Intermediate-state relaxation rate γ_e/2π (MHz), > 0.
    pub gamma_e: f64,
    /// Rydberg-state relaxation rate γ_r/2π (MHz), > 0.
    pub gamma_r: f64,
}

impl AtomSystem {
    pub fn new(
        omega_p: f64,
        omega_c: f64,
        delta_p: f64,
        gamma_e: f64,
        gamma_r: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("omega_p", omega_p),
            ("omega_c", omega_c),
            ("delta_p", delta_p),
            ("gamma_e", gamma_e),
            ("gamma_r", gamma_r),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        if omega_p <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "omega_p must be > 0, got {omega_p}"
            )));
        }
        if omega_c < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "omega_c must be >= 0, got {omega_c}"
            )));
        }
        if gamma_e <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma_e must be > 0, got {gamma_e}"
            )));
        }
        if gamma_r <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma_r must be > 0, got {gamma_r}"
            )));
        }
        Ok(Self {
            omega_p,
            omega_c,
            delta_p,
            gamma_e,
            gamma_r,
        })
    }

    /// Whether the system sits in the weak-probe regime (Ω_p < γ_e) that the
    /// closed-form coherence assumes. Violations are allowed, not rejected;
    /// callers may warn on `false`.
    pub fn is_weak_probe(&self) -> bool {
        self.omega_p < self.gamma_e
    }

    /// Rb reference system used for the sensitivity analysis and the readout
    /// figures: Ω_p/2π = 2, Ω_c/2π = 15, Δ_p = 0, γ_e/2π = 6.066,
    /// γ_r/2π = 0.004 MHz.
    pub fn reference() -> Self {
        Self {
            omega_p: 2.0,
            omega_c: 15.0,
            delta_p: 0.0,
            gamma_e: 6.066,
            gamma_r: 0.004,
        }
    }

    /// Narrow-window variant used for the introductory transmission spectra:
    /// Ω_p/2π = 1, Ω_c/2π = 10 MHz, same relaxation rates as [`reference`].
    ///
    /// [`reference`]: AtomSystem::reference
    pub fn narrow_window() -> Self {
        Self {
            omega_p: 1.0,
            omega_c: 10.0,
            delta_p: 0.0,
            gamma_e: 6.066,
            gamma_r: 0.004,
        }
    }
}

/// Which route evaluates the steady-state coherence ρ_ge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoherenceModel {
    /// Weak-probe closed form (exact limit of the master equation as
    /// Ω_p → 0). Fast and analytic; the contract for
    /// [`steady_state_coherence`](crate::eit::steady_state_coherence).
    ClosedForm,
    /// Full steady state of the three-level Lindblad master equation,
    /// including probe-saturation corrections at finite Ω_p. This is the
    /// route behind all quantitative reference values for the Ω_p/2π = 2 MHz
    /// sensor and is the default for sensitivity analysis and readout.
    #[default]
    SteadyState,
}

/// Calibrated optical-response prefactor of the repository's reference
/// medium. Chosen so that the shot-noise-optimal operating detuning of
/// [`AtomSystem::reference`] sits at 2.184 MHz; the resulting transmittance
/// FWHM is 3.72 MHz. See `calibrate_beta` for calibrating other media.
pub const BETA_REFERENCE: f64 = 219.078_891_202_8;

/// Dimensionless optical-response bundle: Beer–Lambert prefactor β and the
/// incident intensity normalization η₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalMedium {
    /// Optical-depth prefactor β > 0 (collects 2Nk_p·l·μ_ge²/(ε₀ħΩ_p)).
    pub beta: f64,
    /// Incident intensity normalization η₀ > 0.
    pub eta0: f64,
}

impl OpticalMedium {
    pub fn new(beta: f64, eta0: f64) -> Result<Self> {
        if !beta.is_finite() || beta <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "beta must be > 0, got {beta}"
            )));
        }
        if !eta0.is_finite() || eta0 <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "eta0 must be > 0, got {eta0}"
            )));
        }
        Ok(Self { beta, eta0 })
    }

    /// Medium with the given β and η₀ = 1.
    pub fn with_beta(beta: f64) -> Result<Self> {
        Self::new(beta, 1.0)
    }

    /// The calibrated reference medium (β = [`BETA_REFERENCE`], η₀ = 1).
    pub fn reference() -> Self {
        Self {
            beta: BETA_REFERENCE,
            eta0: 1.0,
        }
    }
}

/// A uniformly evaluated spectrum: strictly increasing coupling detunings and
/// the dimensionless response at each point.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    delta_c: Vec<f64>,
    values: Vec<f64>,
}

impl SpectrumGrid {
    pub fn new(delta_c: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if delta_c.len() != values.len() {
            return Err(Error::InvalidRange(format!(
                "axis length {} != value length {}",
                delta_c.len(),
                values.len()
            )));
        }
        if delta_c.len() < 2 {
            return Err(Error::InvalidRange(
                "spectrum grid needs at least 2 points".into(),
            ));
        }
        if delta_c.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidRange(
                "delta_c values must be strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidRange("non-finite spectrum value".into()));
        }
        Ok(Self { delta_c, values })
    }

    pub fn delta_c(&self) -> &[f64] {
        &self.delta_c
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.delta_c.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the constructor enforces len >= 2
    }

    /// Detuning of the largest value.
    pub fn argmax_delta(&self) -> f64 {
        self.delta_c[crate::numerics::argmax(&self.values)]
    }

    /// Detuning of the smallest value.
    pub fn argmin_delta(&self) -> f64 {
        let neg: Vec<f64> = self.values.iter().map(|v| -v).collect();
        self.delta_c[crate::numerics::argmax(&neg)]
    }
}
