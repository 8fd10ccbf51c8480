//! DC-biased two-point differential measurement: DC retrieval, biased
//! FI/CRLB, AC synthesis with noise and harmonics, demodulation, and the AC
//! Fisher information.
//!
//! The forward model always evaluates the exact rigidly shifted line shape;
//! the linearized formulas appear only inside the retrieval steps, so
//! retrieval errors measure the linearization honestly.
//!
//! Demodulation normalization note: the biased differential signal carries
//! the fundamental as −2·α·ρ₀′(δ)·E₀·A·cos(2πf_ac·t+φ). Its two-sided
//! Fourier coefficients at ±f_ac each have magnitude α·|ρ₀′(δ)|·E₀·A, which
//! is the quantity the amplitude-retrieval rule divides by α·|ρ₀′(δ)|·E₀.
//! This crate's spectra are single-sided (a cosine of amplitude a reads a at
//! its bin, i.e. twice the two-sided coefficient), so the retrieval divides
//! the single-sided magnitude by 2·α·|ρ₀′(δ)|·E₀. The two conventions agree
//! bin for bin.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::atom::{AtomSystem, CoherenceModel, OpticalMedium};
use crate::eit::absorption_with;
use crate::error::{Error, Result};
use crate::estimation::PhotonBudget;
use crate::numerics::{central_diff, DERIV_STEP_MHZ};
use crate::sigproc::{dft, Spectrum, TimeSeries};
use crate::stark::StarkState;

/// Conversion from MHz/(V/cm)² to MHz/(V/m)².
const ALPHA_VCM_TO_VM: f64 = 1e-4;

/// Operating configuration of the two-point differential sensor.
///
/// Fields at this layer are V/m; the polarizability is converted from the
/// Stark layer's MHz/(V/cm)² exactly once, here.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorConfig {
    /// Operating detuning δ (MHz), > 0.
    pub delta: f64,
    /// DC bias E₀ (V/m); may be zero only for unbiased diagnostics.
    pub e_bias: f64,
    pub state: StarkState,
    pub budget: PhotonBudget,
    pub med: OpticalMedium,
    pub sys: AtomSystem,
    pub model: CoherenceModel,
}

impl SensorConfig {
    pub fn new(
        sys: AtomSystem,
        med: OpticalMedium,
        state: StarkState,
        budget: PhotonBudget,
        model: CoherenceModel,
        delta: f64,
        e_bias: f64,
    ) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "operating detuning must be > 0, got {delta}"
            )));
        }
        if !e_bias.is_finite() {
            return Err(Error::InvalidParameter("bias must be finite".into()));
        }
        Ok(Self {
            delta,
            e_bias,
            state,
            budget,
            med,
            sys,
            model,
        })
    }

    /// Reference sensor: reference atom/medium/budget, Rb 35S1/2, exact
    /// line-shape model, δ = 2.184 MHz, E₀ = 1 V/m.
    pub fn reference() -> Self {
        Self {
            delta: 2.184,
            e_bias: 1.0,
            state: StarkState::rb35s(),
            budget: PhotonBudget::reference(),
            med: OpticalMedium::reference(),
            sys: AtomSystem::reference(),
            model: CoherenceModel::SteadyState,
        }
    }

    /// Polarizability in MHz/(V/m)².
    pub fn alpha_v_per_m(&self) -> f64 {
        self.state.alpha * ALPHA_VCM_TO_VM
    }

    /// Stark shift in MHz for a field in V/m.
    pub fn stark_shift_v_per_m(&self, e_v_per_m: f64) -> f64 {
        0.5 * self.alpha_v_per_m() * e_v_per_m * e_v_per_m
    }

    /// Zero-field absorption line shape ρ₀(Δ_c).
    pub fn rho0(&self, delta_c: f64) -> Result<f64> {
        absorption_with(&self.sys, self.model, delta_c)
    }

    /// ρ₀′(δ) by central difference.
    pub fn rho0_slope(&self) -> Result<f64> {
        central_diff(|dc| self.rho0(dc), self.delta, DERIV_STEP_MHZ)
    }

    fn nonzero_slope(&self) -> Result<f64> {
        let slope = self.rho0_slope()?;
        if slope.abs() < 1e-300 {
            return Err(Error::Configuration(
                "zero line-shape slope at the operating detuning".into(),
            ));
        }
        Ok(slope)
    }

    fn nonzero_bias(&self) -> Result<f64> {
        if self.e_bias == 0.0 {
            return Err(Error::Configuration(
                "linearized readout requires a nonzero DC bias".into(),
            ));
        }
        Ok(self.e_bias)
    }
}

/// Exact two-point differential signal ρ_AB = ρ(+δ, E) − ρ(−δ, E) for a
/// total field `e_field` in V/m. Vanishes at E = 0 and is even in E.
pub fn two_point_signal(cfg: &SensorConfig, e_field: f64) -> Result<f64> {
    let ds = cfg.stark_shift_v_per_m(e_field);
    Ok(cfg.rho0(cfg.delta - ds)? - cfg.rho0(-cfg.delta - ds)?)
}

/// Unbiased DC retrieval E = √(|ρ_AB|/(α·|ρ₀′(δ)|)) in V/m.
pub fn dc_retrieve_unbiased(cfg: &SensorConfig, measured_rho_ab: f64) -> Result<f64> {
    let slope = cfg.nonzero_slope()?;
    Ok((measured_rho_ab.abs() / (cfg.alpha_v_per_m() * slope.abs())).sqrt())
}

/// Result of a bias-reversal retrieval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasedDcRetrieval {
    /// Bias-reversal differential ρ_AB(E₊) − ρ_AB(E₋).
    pub rho_ab_delta: f64,
    /// Retrieved field magnitude in V/m.
    pub e_hat: f64,
}

/// Simulates the two bias polarities at total fields ±E₀+E, forms the
/// bias-reversal differential, and retrieves
/// Ê = |ρ_AB(E_Δ)|/(4·α·|ρ₀′(δ)|·|E₀|).
pub fn dc_retrieve_biased(cfg: &SensorConfig, e_field_true: f64) -> Result<BiasedDcRetrieval> {
    let e0 = cfg.nonzero_bias()?;
    let slope = cfg.nonzero_slope()?;
    let plus = two_point_signal(cfg, e0 + e_field_true)?;
    let minus = two_point_signal(cfg, -e0 + e_field_true)?;
    let rho_ab_delta = plus - minus;
    let e_hat = rho_ab_delta.abs() / (4.0 * cfg.alpha_v_per_m() * slope.abs() * e0.abs());
    Ok(BiasedDcRetrieval {
        rho_ab_delta,
        e_hat,
    })
}

/// Fisher information for the DC field under bias reversal:
/// F(E) = 4·n̄₀·η₀·e^(−β·ρ₀(δ))·(β·α·E₀)²·ρ₀′(δ)², in (V/m)⁻².
pub fn fi_dc_biased(cfg: &SensorConfig) -> Result<f64> {
    fi_dc_biased_at(cfg, cfg.delta)
}

/// Same information evaluated at an arbitrary operating detuning (used for
/// detuning scans; vanishes at the line center by symmetry).
pub fn fi_dc_biased_at(cfg: &SensorConfig, operating_detuning: f64) -> Result<f64> {
    let rho = cfg.rho0(operating_detuning)?;
    let slope = central_diff(|dc| cfg.rho0(dc), operating_detuning, DERIV_STEP_MHZ)?;
    let eta = cfg.med.eta0 * (-cfg.med.beta * rho).exp();
    let factor = cfg.med.beta * cfg.alpha_v_per_m() * cfg.e_bias * slope;
    Ok(4.0 * cfg.budget.n0 * eta * factor * factor)
}

/// CRLB-limited minimum detectable field δE_min = 1/√F(E), in V/m/√Hz.
pub fn min_detectable_field(cfg: &SensorConfig) -> Result<f64> {
    min_detectable_field_at(cfg, cfg.delta)
}

/// δE_min at an arbitrary operating detuning; errors where F vanishes.
pub fn min_detectable_field_at(cfg: &SensorConfig, operating_detuning: f64) -> Result<f64> {
    let fi = fi_dc_biased_at(cfg, operating_detuning)?;
    if !(fi > 0.0) {
        return Err(Error::UnresolvableParameter(fi));
    }
    Ok(1.0 / fi.sqrt())
}

/// One harmonic of the synthesized field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    /// Harmonic order k ≥ 2 (frequency k·f_ac).
    pub order: u32,
    /// Amplitude A_k in V/m.
    pub amplitude: f64,
    /// Phase φ_k in radians.
    pub phase: f64,
}

/// Slow background perturbation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drift {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

/// AC field description: fundamental, harmonics, and a slow drift line.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSpec {
    /// Fundamental amplitude A (V/m), ≥ 0.
    pub a: f64,
    /// Fundamental frequency f_ac (Hz), > 0.
    pub f_ac: f64,
    /// Fundamental phase φ (rad).
    pub phi: f64,
    pub harmonics: Vec<Harmonic>,
    pub drift: Option<Drift>,
}

impl FieldSpec {
    pub fn new(a: f64, f_ac: f64, phi: f64) -> Result<Self> {
        if !(f_ac > 0.0) || !f_ac.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "AC frequency must be > 0, got {f_ac}"
            )));
        }
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "AC amplitude must be >= 0, got {a}"
            )));
        }
        Ok(Self {
            a,
            f_ac,
            phi,
            harmonics: Vec::new(),
            drift: None,
        })
    }

    /// The contaminated 50 Hz grid scenario: A = 0.1, A₂ = 0.03, A₃ = 0.015,
    /// drift 0.02 V/m at 2 Hz, all phases zero.
    pub fn grid_scenario() -> Self {
        Self {
            a: 0.1,
            f_ac: 50.0,
            phi: 0.0,
            harmonics: vec![
                Harmonic {
                    order: 2,
                    amplitude: 0.03,
                    phase: 0.0,
                },
                Harmonic {
                    order: 3,
                    amplitude: 0.015,
                    phase: 0.0,
                },
            ],
            drift: Some(Drift {
                amplitude: 0.02,
                frequency: 2.0,
                phase: 0.0,
            }),
        }
    }

    /// Field value at time `t`, excluding the DC bias.
    pub fn value_at(&self, t: f64) -> f64 {
        let tau = std::f64::consts::TAU;
        let mut e = self.a * (tau * self.f_ac * t + self.phi).cos();
        for h in &self.harmonics {
            e += h.amplitude * (tau * h.order as f64 * self.f_ac * t + h.phase).cos();
        }
        if let Some(d) = self.drift {
            e += d.amplitude * (tau * d.frequency * t + d.phase).cos();
        }
        e
    }
}

/// Measurement-chain noise model: common-mode multiplicative intensity
/// fluctuation ε_I(t) = m_I·sin(2πf_I·t+φ_I) + σ_I·ξ_I(t) applied to both
/// channels, plus independent additive Gaussian noise per channel whose RMS
/// is `additive_rms_frac` of the ideal differential amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub m_i: f64,
    pub f_i: f64,
    pub phi_i: f64,
    pub sigma_i: f64,
    pub additive_rms_frac: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(
        m_i: f64,
        f_i: f64,
        phi_i: f64,
        sigma_i: f64,
        additive_rms_frac: f64,
        seed: u64,
    ) -> Result<Self> {
        for (name, v) in [
            ("m_i", m_i),
            ("f_i", f_i),
            ("sigma_i", sigma_i),
            ("additive_rms_frac", additive_rms_frac),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be >= 0, got {v}"
                )));
            }
        }
        Ok(Self {
            m_i,
            f_i,
            phi_i,
            sigma_i,
            additive_rms_frac,
            seed,
        })
    }

    /// The noise levels of the grid scenario: m_I = 0.02 at 2 Hz,
    /// σ_I = 0.003, additive RMS 40% of the ideal amplitude.
    pub fn grid_scenario(seed: u64) -> Self {
        Self {
            m_i: 0.02,
            f_i: 2.0,
            phi_i: 0.0,
            sigma_i: 0.003,
            additive_rms_frac: 0.40,
            seed,
        }
    }
}

/// Samples E_tot(t) = E₀ + A·cos(2πf_ac·t+φ) + Σ_k A_k·cos(2πk·f_ac·t+φ_k)
/// + A_d·cos(2πf_d·t+φ_d) uniformly over `duration`.
pub fn synthesize_field(
    spec: &FieldSpec,
    duration: f64,
    sample_rate: f64,
    e_bias: f64,
) -> Result<TimeSeries> {
    if !(duration > 0.0) || !(sample_rate > 0.0) || duration * sample_rate < 2.0 {
        return Err(Error::InvalidRange(format!(
            "need at least 2 samples, got duration {duration} s at {sample_rate} Hz"
        )));
    }
    let n = (duration * sample_rate).round() as usize;
    let dt = 1.0 / sample_rate;
    let samples = (0..n)
        .map(|i| e_bias + spec.value_at(i as f64 * dt))
        .collect();
    TimeSeries::new(sample_rate, 0.0, samples)
}

/// The two channel readouts and their difference.
#[derive(Debug, Clone, PartialEq)]
pub struct SensedChannels {
    pub rho_a: TimeSeries,
    pub rho_b: TimeSeries,
    pub rho_ab: TimeSeries,
}

/// Quasi-static sensing of a field time series: each sample evaluates the
/// steady-state absorption at ±δ under the instantaneous Stark shift
/// (adiabatic following of the slow field). With a `noise` model, the
/// common-mode ε_I(t) multiplies both channels identically and independent
/// additive Gaussian noise lands on each channel; identical seeds give
/// bit-identical series.
pub fn sense_timeseries(
    cfg: &SensorConfig,
    field: &TimeSeries,
    noise: Option<&NoiseSpec>,
) -> Result<SensedChannels> {
    let n = field.len();
    if n < 2 {
        return Err(Error::InvalidRange("field series too short".into()));
    }
    let mut rho_a = Vec::with_capacity(n);
    let mut rho_b = Vec::with_capacity(n);
    for &e in &field.samples {
        let ds = cfg.stark_shift_v_per_m(e);
        rho_a.push(cfg.rho0(cfg.delta - ds)?);
        rho_b.push(cfg.rho0(-cfg.delta - ds)?);
    }

    if let Some(ns) = noise {
        // ideal differential amplitude sets the additive-noise scale
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let d = rho_a[i] - rho_b[i];
            lo = lo.min(d);
            hi = hi.max(d);
        }
        let ideal_amplitude = 0.5 * (hi - lo);
        let sigma_add = ns.additive_rms_frac * ideal_amplitude;

        let mut rng = ChaCha8Rng::seed_from_u64(ns.seed);
        let gauss = Normal::new(0.0, 1.0).expect("unit normal");
        let tau = std::f64::consts::TAU;
        for (i, t) in field.times().enumerate() {
            let xi: f64 = gauss.sample(&mut rng);
            let eps = ns.m_i * (tau * ns.f_i * t + ns.phi_i).sin() + ns.sigma_i * xi;
            let na: f64 = gauss.sample(&mut rng);
            let nb: f64 = gauss.sample(&mut rng);
            rho_a[i] = (1.0 + eps) * rho_a[i] + sigma_add * na;
            rho_b[i] = (1.0 + eps) * rho_b[i] + sigma_add * nb;
        }
    }

    let rho_ab: Vec<f64> = rho_a.iter().zip(&rho_b).map(|(a, b)| a - b).collect();
    Ok(SensedChannels {
        rho_a: TimeSeries::new(field.sample_rate, field.t0, rho_a)?,
        rho_b: TimeSeries::new(field.sample_rate, field.t0, rho_b)?,
        rho_ab: TimeSeries::new(field.sample_rate, field.t0, rho_ab)?,
    })
}

/// Demodulation result: retrieved amplitude and the inspected spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Demodulation {
    pub amplitude: f64,
    pub spectrum: Spectrum,
}

/// Extracts the AC amplitude from the fundamental line of the differential
/// signal: Â = |ρ_AB(f_ac)| / (2·α·|ρ₀′(δ)|·|E₀|) under the single-sided
/// normalization (see the module docs for the factor-2 reconciliation).
pub fn demodulate(rho_ab: &TimeSeries, f_ac: f64, cfg: &SensorConfig) -> Result<Demodulation> {
    let e0 = cfg.nonzero_bias()?;
    let slope = cfg.nonzero_slope()?;
    if !(f_ac > 0.0) || f_ac > 0.5 * rho_ab.sample_rate {
        return Err(Error::InvalidRange(format!(
            "demodulation frequency {f_ac} Hz outside (0, Nyquist {}]",
            0.5 * rho_ab.sample_rate
        )));
    }
    if rho_ab.duration() * f_ac < 2.0 {
        return Err(Error::InvalidRange(format!(
            "need at least 2 periods of {f_ac} Hz, have {:.3} s",
            rho_ab.duration()
        )));
    }
    let spectrum = dft(rho_ab)?;
    let magnitude = spectrum.magnitude_at(f_ac)?;
    let amplitude = magnitude / (2.0 * cfg.alpha_v_per_m() * slope.abs() * e0.abs());
    Ok(Demodulation {
        amplitude,
        spectrum,
    })
}

/// Closed-form AC-amplitude Fisher information accumulated over `duration`:
/// F(A) = n_total·η₀·e^(−β·ρ₀(δ))·(β·α·E₀·ρ₀′(δ))² with n_total = n̄₀·T,
/// in (V/m)⁻².
pub fn fi_ac(cfg: &SensorConfig, f_ac: f64, duration: f64) -> Result<f64> {
    if !(f_ac > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "AC frequency must be > 0, got {f_ac}"
        )));
    }
    if !(duration > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "duration must be > 0, got {duration}"
        )));
    }
    let rho = cfg.rho0(cfg.delta)?;
    let slope = cfg.rho0_slope()?;
    let eta = cfg.med.eta0 * (-cfg.med.beta * rho).exp();
    let factor = cfg.med.beta * cfg.alpha_v_per_m() * cfg.e_bias * slope;
    Ok(cfg.budget.n0 * duration * eta * factor * factor)
}

/// Numeric time integral of the instantaneous AC information,
/// ∫₀ᵀ 2·n̄₀·η₀·e^(−β·ρ₀(δ))·(β·α·E₀·ρ₀′(δ)·cos(2πf_ac·t))² dt, by midpoint
/// rule with `n_samples` slices. Over integer numbers of periods this equals
/// the closed form.
pub fn fi_ac_numeric(
    cfg: &SensorConfig,
    f_ac: f64,
    duration: f64,
    n_samples: usize,
) -> Result<f64> {
    if n_samples < 2 {
        return Err(Error::InvalidRange(format!(
            "need at least 2 integration samples, got {n_samples}"
        )));
    }
    let rho = cfg.rho0(cfg.delta)?;
    let slope = cfg.rho0_slope()?;
    let eta = cfg.med.eta0 * (-cfg.med.beta * rho).exp();
    let factor = cfg.med.beta * cfg.alpha_v_per_m() * cfg.e_bias * slope;
    let dt = duration / n_samples as f64;
    let tau = std::f64::consts::TAU;
    let mut acc = 0.0;
    for i in 0..n_samples {
        let t = (i as f64 + 0.5) * dt;
        let c = (tau * f_ac * t).cos();
        acc += 2.0 * cfg.budget.n0 * eta * factor * factor * c * c * dt;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigproc::peak_pick;

    fn cfg() -> SensorConfig {
        SensorConfig::reference()
    }

    #[test]
    fn two_point_signal_baseline_cancellation() {
        let c = cfg();
        assert_eq!(two_point_signal(&c, 0.0).unwrap(), 0.0);
        // even in E (quadratic Stark)
        for e in [0.3, 2.0] {
            assert_eq!(
                two_point_signal(&c, e).unwrap(),
                two_point_signal(&c, -e).unwrap()
            );
        }
    }

    #[test]
    fn two_point_signal_quadratic_dominance() {
        let c = cfg();
        let r1 = two_point_signal(&c, 1e-3).unwrap();
        let r2 = two_point_signal(&c, 2e-3).unwrap();
        assert!((r2 / r1 - 4.0).abs() < 1e-4, "ratio {}", r2 / r1);
    }

    #[test]
    fn unbiased_retrieval_round_trip() {
        let c = cfg();
        assert_eq!(dc_retrieve_unbiased(&c, 0.0).unwrap(), 0.0);
        // monotone in |rho_ab|
        let lo = dc_retrieve_unbiased(&c, 1e-8).unwrap();
        let hi = dc_retrieve_unbiased(&c, 1e-6).unwrap();
        assert!(hi > lo);
        // small-shift regime: E = 0.05 V/cm = 5 V/m round-trips to 1e-3
        let e = 5.0;
        let sig = two_point_signal(&c, e).unwrap();
        let back = dc_retrieve_unbiased(&c, sig).unwrap();
        assert!((back - e).abs() / e < 1e-3, "retrieved {back}");
        // the linearization breaks down at 5 V/cm = 500 V/m (shift >> delta)
        let big = 500.0;
        let back_big = dc_retrieve_unbiased(&c, two_point_signal(&c, big).unwrap()).unwrap();
        assert!((back_big - big).abs() / big > 0.01);
    }

    #[test]
    fn biased_retrieval_examples() {
        let c = cfg();
        let at_zero = dc_retrieve_biased(&c, 0.0).unwrap();
        assert!(at_zero.rho_ab_delta.abs() < 1e-18);
        assert!(at_zero.e_hat.abs() < 1e-7);
        // sign flip leaves the magnitude estimate unchanged; the signal is odd
        let plus = dc_retrieve_biased(&c, 0.1).unwrap();
        let minus = dc_retrieve_biased(&c, -0.1).unwrap();
        assert!((plus.e_hat - minus.e_hat).abs() <= 1e-9 * plus.e_hat);
        assert!((plus.rho_ab_delta + minus.rho_ab_delta).abs() <= 1e-9 * plus.rho_ab_delta.abs());
    }

    #[test]
    fn biased_retrieval_relative_error_gate() {
        // spot checks across the operating range; the full 50-point grid runs
        // in the acceptance suite
        let c = cfg();
        for e in [1e-5, 1e-3, 0.1, 1.0] {
            let got = dc_retrieve_biased(&c, e).unwrap().e_hat;
            assert!(
                (got - e).abs() / e <= 1e-6,
                "E={e}: rel {}",
                (got - e).abs() / e
            );
        }
    }

    #[test]
    fn flat_line_shape_is_rejected() {
        // with the coupling off the absorption is constant in detuning, so
        // the two-point slope vanishes and retrieval has no scale
        let mut c = cfg();
        c.sys = AtomSystem::new(2.0, 0.0, 0.0, 6.066, 0.004).unwrap();
        c.model = CoherenceModel::ClosedForm;
        assert!(matches!(
            dc_retrieve_unbiased(&c, 1e-9),
            Err(Error::Configuration(_))
        ));
        assert!(matches!(
            dc_retrieve_biased(&c, 0.1),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn biased_retrieval_rejects_zero_bias() {
        let mut c = cfg();
        c.e_bias = 0.0;
        assert!(matches!(
            dc_retrieve_biased(&c, 0.1),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn fi_dc_scalings() {
        let c = cfg();
        let f1 = fi_dc_biased(&c).unwrap();
        let mut c2 = cfg();
        c2.e_bias = 2.0;
        let f2 = fi_dc_biased(&c2).unwrap();
        assert!((f2 - 4.0 * f1).abs() <= 1e-10 * f2);
        // zero bias carries no first-order information
        let mut c0 = cfg();
        c0.e_bias = 0.0;
        assert_eq!(fi_dc_biased(&c0).unwrap(), 0.0);
    }

    #[test]
    fn fi_dc_factor_four_against_chain_rule() {
        // single-point, single-bias information from the generic Poisson
        // form with theta = E via dS/dE = alpha*E0, then x4
        let c = cfg();
        let alpha = c.alpha_v_per_m();
        let single = crate::estimation::poisson_fisher(
            |e| {
                let ds = 0.5 * alpha * e * e;
                Ok(c.budget.n0 * c.med.eta0 * (-c.med.beta * c.rho0(c.delta - ds).unwrap()).exp())
            },
            c.e_bias,
            1e-6,
        )
        .unwrap();
        let total = fi_dc_biased(&c).unwrap();
        assert!(
            (total - 4.0 * single).abs() <= 2e-4 * total,
            "total {total} vs 4x single {}",
            4.0 * single
        );
    }

    #[test]
    fn min_detectable_field_behavior() {
        let c = cfg();
        let de = min_detectable_field(&c).unwrap();
        assert!((de - 1e-4).abs() < 0.5e-4, "dE_min = {de}");
        // halving the budget costs sqrt(2)
        let mut c2 = cfg();
        c2.budget = PhotonBudget::new(c.budget.n0 / 2.0).unwrap();
        let de2 = min_detectable_field(&c2).unwrap();
        assert!((de2 / de - std::f64::consts::SQRT_2).abs() < 1e-9);
        // line center is unresolvable
        assert!(matches!(
            min_detectable_field_at(&c, 0.0),
            Err(Error::UnresolvableParameter(_))
        ));
    }

    #[test]
    fn synthesize_field_examples() {
        // all amplitudes zero: constant bias
        let mut spec = FieldSpec::new(0.0, 50.0, 0.0).unwrap();
        let s = synthesize_field(&spec, 1.0, 1000.0, 2.5).unwrap();
        assert!(s.samples.iter().all(|&x| x == 2.5));
        // pure fundamental: peak-to-peak = 2A
        spec.a = 0.1;
        let s = synthesize_field(&spec, 10.0, 1000.0, 0.0).unwrap();
        let max = s.samples.iter().cloned().fold(f64::MIN, f64::max);
        let min = s.samples.iter().cloned().fold(f64::MAX, f64::min);
        assert!((max - min - 0.2).abs() < 1e-6);
        // degenerate sampling rejected
        assert!(synthesize_field(&spec, 1e-3, 100.0, 0.0).is_err());
    }

    #[test]
    fn common_mode_rejection_is_exact() {
        // zero field, pure common-mode noise: the differential cancels to
        // the bit
        let c = cfg();
        let field = TimeSeries::new(1000.0, 0.0, vec![0.0; 2000]).unwrap();
        let noise = NoiseSpec::new(0.05, 2.0, 0.3, 0.01, 0.0, 99).unwrap();
        let sensed = sense_timeseries(&c, &field, Some(&noise)).unwrap();
        assert!(sensed.rho_ab.samples.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn zero_field_zero_noise_differential_is_zero() {
        let c = cfg();
        let field = TimeSeries::new(100.0, 0.0, vec![0.0; 16]).unwrap();
        let sensed = sense_timeseries(&c, &field, None).unwrap();
        assert!(sensed.rho_ab.samples.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn seeded_noise_is_bit_identical() {
        let c = cfg();
        let spec = FieldSpec::grid_scenario();
        let field = synthesize_field(&spec, 2.0, 1000.0, c.e_bias).unwrap();
        let noise = NoiseSpec::grid_scenario(1234);
        let a = sense_timeseries(&c, &field, Some(&noise)).unwrap();
        let b = sense_timeseries(&c, &field, Some(&noise)).unwrap();
        assert_eq!(a.rho_ab, b.rho_ab);
        let other = NoiseSpec::grid_scenario(1235);
        let d = sense_timeseries(&c, &field, Some(&other)).unwrap();
        assert_ne!(a.rho_ab, d.rho_ab);
    }

    #[test]
    fn noiseless_demodulation_recovers_amplitude() {
        let c = cfg();
        let spec = FieldSpec::new(0.1, 50.0, 0.0).unwrap();
        let field = synthesize_field(&spec, 10.0, 1000.0, c.e_bias).unwrap();
        let sensed = sense_timeseries(&c, &field, None).unwrap();
        let demod = demodulate(&sensed.rho_ab, 50.0, &c).unwrap();
        assert!(
            (demod.amplitude - 0.1).abs() / 0.1 < 5e-3,
            "A_hat = {}",
            demod.amplitude
        );
    }

    #[test]
    fn demodulation_is_linear_in_amplitude() {
        let c = cfg();
        for a in [0.01, 0.1, 0.3] {
            let spec = FieldSpec::new(a, 50.0, 0.0).unwrap();
            let field = synthesize_field(&spec, 10.0, 1000.0, c.e_bias).unwrap();
            let sensed = sense_timeseries(&c, &field, None).unwrap();
            let demod = demodulate(&sensed.rho_ab, 50.0, &c).unwrap();
            assert!(
                (demod.amplitude / a - 1.0).abs() < 5e-3,
                "A={a}: slope {}",
                demod.amplitude / a
            );
        }
    }

    #[test]
    fn unbiased_spectrum_has_no_fundamental() {
        // without bias the response is quadratic: DC and 2f_ac only
        let mut c = cfg();
        c.e_bias = 0.0;
        let spec = FieldSpec::new(0.1, 50.0, 0.0).unwrap();
        let field = synthesize_field(&spec, 10.0, 1000.0, 0.0).unwrap();
        let sensed = sense_timeseries(&c, &field, None).unwrap();
        let sp = dft(&sensed.rho_ab).unwrap();
        let at_fac = sp.magnitude_at(50.0).unwrap();
        let at_2fac = sp.magnitude_at(100.0).unwrap();
        assert!(at_2fac > 1e3 * at_fac, "f: {at_fac}, 2f: {at_2fac}");
        // ... and demodulate refuses the zero-bias configuration
        assert!(demodulate(&sensed.rho_ab, 50.0, &c).is_err());
    }

    #[test]
    fn demodulate_validates_frequency_and_length() {
        let c = cfg();
        let spec = FieldSpec::new(0.1, 50.0, 0.0).unwrap();
        let field = synthesize_field(&spec, 10.0, 1000.0, c.e_bias).unwrap();
        let sensed = sense_timeseries(&c, &field, None).unwrap();
        assert!(demodulate(&sensed.rho_ab, 600.0, &c).is_err()); // beyond Nyquist
        let short = TimeSeries::new(1000.0, 0.0, sensed.rho_ab.samples[..30].to_vec()).unwrap();
        assert!(demodulate(&short, 50.0, &c).is_err()); // under two periods
    }

    #[test]
    fn grid_scenario_spectrum_structure() {
        // biased differential under the full noise model: dominant 50 Hz,
        // secondary 100 Hz, identifiable 2 Hz
        let c = cfg();
        let field = synthesize_field(&FieldSpec::grid_scenario(), 10.0, 1000.0, c.e_bias).unwrap();
        let noise = NoiseSpec::grid_scenario(20260807);
        let sensed = sense_timeseries(&c, &field, Some(&noise)).unwrap();
        let demod = demodulate(&sensed.rho_ab, 50.0, &c).unwrap();
        let peaks = peak_pick(&demod.spectrum, 1.0, 500.0, 8).unwrap();
        assert!(
            (peaks[0].0 - 50.0).abs() < 0.2,
            "top peak at {}",
            peaks[0].0
        );
        assert!((demod.amplitude - 0.1).abs() / 0.1 < 0.1);
    }

    #[test]
    fn fi_ac_relations() {
        let c = cfg();
        // numeric integral over integer periods matches the closed form
        let closed = fi_ac(&c, 50.0, 1.0).unwrap();
        let numeric = fi_ac_numeric(&c, 50.0, 1.0, 20_000).unwrap();
        assert!(
            (numeric - closed).abs() <= 1e-6 * closed,
            "closed {closed} numeric {numeric}"
        );
        // doubling the window doubles the information
        let double = fi_ac(&c, 50.0, 2.0).unwrap();
        assert!((double - 2.0 * closed).abs() <= 1e-12 * double);
        // relation to the DC form: 4·F_ac(T) = F_dc·(n_total/n0)
        let t = 3.0;
        let f_ac_t = fi_ac(&c, 50.0, t).unwrap();
        let f_dc = fi_dc_biased(&c).unwrap();
        let lhs = 4.0 * f_ac_t;
        let rhs = f_dc * t;
        assert!((lhs - rhs).abs() <= 1e-10 * lhs, "{lhs} vs {rhs}");
    }
}
