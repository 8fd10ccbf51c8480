//! Shared config-to-domain assembly for the commands.

use eit_sensor::atom::{AtomSystem, CoherenceModel, OpticalMedium};
use eit_sensor::eit::calibrate_beta;
use eit_sensor::estimation::PhotonBudget;
use eit_sensor::readout::SensorConfig;
use eit_sensor::stark::StarkState;

use crate::config::Config;
use crate::CliError;

/// The [atom] section; defaults to the reference sensor system.
pub fn load_atom(cfg: &mut Config) -> Result<AtomSystem, CliError> {
    let reference = AtomSystem::reference();
    let sys = AtomSystem::new(
        cfg.f64_or("atom", "omega_p_mhz", reference.omega_p)?,
        cfg.f64_or("atom", "omega_c_mhz", reference.omega_c)?,
        cfg.f64_or("atom", "delta_p_mhz", reference.delta_p)?,
        cfg.f64_or("atom", "gamma_e_mhz", reference.gamma_e)?,
        cfg.f64_or("atom", "gamma_r_mhz", reference.gamma_r)?,
    )?;
    if !sys.is_weak_probe() {
        eprintln!(
            "warning: omega_p = {} MHz is not below gamma_e = {} MHz; \
             the closed-form route assumes a weak probe",
            sys.omega_p, sys.gamma_e
        );
    }
    Ok(sys)
}

/// The [model] section.
pub fn load_model(cfg: &mut Config) -> Result<CoherenceModel, CliError> {
    match cfg.str_or("model", "coherence", "steady_state").as_str() {
        "steady_state" => Ok(CoherenceModel::SteadyState),
        "closed_form" => Ok(CoherenceModel::ClosedForm),
        other => Err(CliError::Config(format!(
            "model.coherence must be steady_state or closed_form, got `{other}`"
        ))),
    }
}

/// The [medium] section: an explicit beta, a calibration target, or the
/// calibrated reference default.
pub fn load_medium(
    cfg: &mut Config,
    sys: &AtomSystem,
    model: CoherenceModel,
) -> Result<OpticalMedium, CliError> {
    let eta0 = cfg.f64_or("medium", "eta0", 1.0)?;
    let beta = cfg.get_f64("medium", "beta")?;
    let target = cfg.get_f64("medium", "calibrate_to_fwhm_mhz")?;
    let beta = match (beta, target) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "medium.beta and medium.calibrate_to_fwhm_mhz are mutually exclusive".into(),
            ))
        }
        (Some(b), None) => b,
        (None, Some(t)) => calibrate_beta(sys, model, t)?,
        (None, None) => eit_sensor::BETA_REFERENCE,
    };
    Ok(OpticalMedium::new(beta, eta0)?)
}

/// The [stark] section; defaults to the Rb 35S1/2 state.
pub fn load_stark(cfg: &mut Config) -> Result<StarkState, CliError> {
    let alpha = cfg.f64_or("stark", "alpha_mhz_per_vcm2", 4.32)?;
    let label = cfg.str_or("stark", "label", "Rb 35S1/2");
    Ok(StarkState::new(alpha, label)?)
}

/// The [sensor] section plus everything a `SensorConfig` needs.
pub fn load_sensor(cfg: &mut Config) -> Result<SensorConfig, CliError> {
    let sys = load_atom(cfg)?;
    let model = load_model(cfg)?;
    let med = load_medium(cfg, &sys, model)?;
    let state = load_stark(cfg)?;
    let budget = PhotonBudget::new(cfg.f64_or("sensor", "n0", 4.7e14)?)?;
    let delta = cfg.f64_or("sensor", "delta_mhz", 2.184)?;
    let e_bias = cfg.f64_or("sensor", "e_bias_v_per_m", 1.0)?;
    Ok(SensorConfig::new(
        sys, med, state, budget, model, delta, e_bias,
    )?)
}
