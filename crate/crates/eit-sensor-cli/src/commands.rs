//! The five batch commands: spectrum, fisher, dc, ac, cavity.

use eit_sensor::cavity::{cavity_scan, enhancement_report, CavityConfig};
use eit_sensor::eit::{scan_spectrum, spectral_slope, Observable};
use eit_sensor::estimation::{
    crlb, fi_stark_shift, fisher_map, optimal_operating_point, tradeoff_sweep, PhotonBudget,
};
use eit_sensor::numerics::{golden_max, linspace};
use eit_sensor::readout::{
    dc_retrieve_biased, demodulate, min_detectable_field_at, sense_timeseries, synthesize_field,
    Drift, FieldSpec, Harmonic, NoiseSpec,
};
use eit_sensor::sigproc::{dft, peak_pick, write_spectrum_csv, write_timeseries_csv};
use eit_sensor::stark::{shifted_absorption, stark_shift};

use crate::config::Config;
use crate::output::{create, write_csv, write_json, Json};
use crate::scenario;
use crate::CliError;

pub struct Flags {
    pub out_dir: std::path::PathBuf,
    pub seed: Option<u64>,
    pub points: Option<usize>,
}

/// `spectrum`: EIT spectra versus coupling detuning for a list of applied DC
/// fields, in long CSV format (delta_c_mhz, e_v_per_cm, value).
pub fn cmd_spectrum(mut cfg: Config, flags: &Flags) -> Result<(), CliError> {
    let sys = scenario::load_atom(&mut cfg)?;
    let model = scenario::load_model(&mut cfg)?;
    let med = scenario::load_medium(&mut cfg, &sys, model)?;
    let state = scenario::load_stark(&mut cfg)?;

    let lo = cfg.f64_or("scan", "min_mhz", -20.0)?;
    let hi = cfg.f64_or("scan", "max_mhz", 20.0)?;
    let n = flags
        .points
        .unwrap_or(cfg.usize_or("scan", "points", 4001)?);
    let observable = match cfg.str_or("scan", "observable", "absorption").as_str() {
        "absorption" => Observable::Absorption,
        "transmittance" => Observable::Transmittance,
        other => {
            return Err(CliError::Config(format!(
                "scan.observable must be absorption or transmittance, got `{other}`"
            )))
        }
    };
    let fields = cfg
        .get_f64_list("spectrum", "fields_v_per_cm")?
        .unwrap_or_else(|| vec![0.0]);
    cfg.finish().map_err(CliError::Config)?;
    if n < 2 || !(hi > lo) {
        return Err(CliError::Config(format!(
            "scan needs at least 2 points over a nondegenerate range, got {n} over [{lo}, {hi}]"
        )));
    }

    let axis = linspace(lo, hi, n);
    let mut rows = Vec::with_capacity(axis.len() * fields.len());
    for &e_vcm in &fields {
        for &dc in &axis {
            let value = match observable {
                Observable::Absorption => shifted_absorption(&sys, model, &state, dc, e_vcm)?,
                Observable::Transmittance => {
                    let a = shifted_absorption(&sys, model, &state, dc, e_vcm)?;
                    med.eta0 * (-med.beta * a).exp()
                }
            };
            rows.push(vec![dc, e_vcm, value]);
        }
        println!(
            "field {e_vcm} V/cm: Stark shift {} MHz",
            stark_shift(&state, e_vcm)
        );
    }
    write_csv(
        &flags.out_dir.join("spectrum.csv"),
        &["delta_c_mhz", "e_v_per_cm", "value"],
        &rows,
    )?;
    Ok(())
}

/// `fisher`: FI map over (Δ_c, Ω_c), the slice at the configured Ω_c, the
/// sensitivity–range trade-off, the CRLB slice, and a machine-readable
/// summary.
pub fn cmd_fisher(mut cfg: Config, flags: &Flags) -> Result<(), CliError> {
    let sys = scenario::load_atom(&mut cfg)?;
    let model = scenario::load_model(&mut cfg)?;
    let med = scenario::load_medium(&mut cfg, &sys, model)?;
    let budget = PhotonBudget::new(cfg.f64_or("fisher", "n0", 4.7e14)?)?;

    let dc_lo = cfg.f64_or("fisher", "delta_c_min_mhz", -20.0)?;
    let dc_hi = cfg.f64_or("fisher", "delta_c_max_mhz", 20.0)?;
    let dc_n = flags
        .points
        .unwrap_or(cfg.usize_or("fisher", "delta_c_points", 801)?);
    let oc_lo = cfg.f64_or("fisher", "omega_c_min_mhz", 10.0)?;
    let oc_hi = cfg.f64_or("fisher", "omega_c_max_mhz", 25.0)?;
    let oc_n = cfg.usize_or("fisher", "omega_c_points", 7)?;
    let tolerance = cfg.f64_or("fisher", "tolerance", 0.05)?;
    let search_lo = cfg.f64_or("fisher", "search_min_mhz", 0.1)?;
    let search_hi = cfg.f64_or("fisher", "search_max_mhz", 10.0)?;
    cfg.finish().map_err(CliError::Config)?;
    if dc_n < 2 || oc_n < 1 {
        return Err(CliError::Config(format!(
            "fisher axes need delta_c_points >= 2 and omega_c_points >= 1, got {dc_n} and {oc_n}"
        )));
    }

    let dc_axis = linspace(dc_lo, dc_hi, dc_n);
    let oc_axis = linspace(oc_lo, oc_hi, oc_n);
    let map = fisher_map(&sys, &med, model, &budget, &dc_axis, &oc_axis)?;
    let mut rows = Vec::with_capacity(dc_n * oc_n);
    for (i, &oc) in map.omega_c_axis.iter().enumerate() {
        for (j, &dc) in map.delta_c_axis.iter().enumerate() {
            rows.push(vec![oc, dc, map.fi[i][j]]);
        }
    }
    write_csv(
        &flags.out_dir.join("fi_map.csv"),
        &["omega_c_mhz", "delta_c_mhz", "fi_per_mhz2"],
        &rows,
    )?;

    // slice at the configured coupling strength
    let mut slice_rows = Vec::with_capacity(dc_n);
    for &dc in &dc_axis {
        slice_rows.push(vec![
            dc,
            fi_stark_shift(&sys, &med, model, &budget, dc)?,
            spectral_slope(&sys, &med, model, dc, Observable::Absorption)?,
        ]);
    }
    write_csv(
        &flags.out_dir.join("fi_slice.csv"),
        &["delta_c_mhz", "fi_per_mhz2", "absorption_slope_per_mhz"],
        &slice_rows,
    )?;

    // CRLB slice: sqrt bound per detuning; unresolvable points emit inf
    let mut crlb_rows = Vec::with_capacity(dc_n);
    for &dc in &dc_axis {
        let fi = fi_stark_shift(&sys, &med, model, &budget, dc)?;
        let dds_mhz = match crlb(fi) {
            Ok(b) => b.sqrt(),
            Err(_) => f64::INFINITY,
        };
        crlb_rows.push(vec![dc, dds_mhz, dds_mhz * 1e6]);
    }
    write_csv(
        &flags.out_dir.join("crlb_slice.csv"),
        &["delta_c_mhz", "dds_mhz_sqrthz", "dds_hz_sqrthz"],
        &crlb_rows,
    )?;

    let sweep = tradeoff_sweep(&sys, &med, model, &budget, &oc_axis, tolerance)?;
    write_csv(
        &flags.out_dir.join("tradeoff.csv"),
        &[
            "omega_c_mhz",
            "delta_opt_mhz",
            "f_max_per_mhz2",
            "r_delta_s_mhz",
        ],
        &sweep
            .iter()
            .map(|r| vec![r.omega_c, r.delta_opt, r.f_max, r.r_delta_s])
            .collect::<Vec<_>>(),
    )?;
    println!("  omega_c_mhz  delta_opt_mhz     f_max_per_mhz2  r_delta_s_mhz");
    for r in &sweep {
        println!(
            "  {:>11.3}  {:>13.4}  {:>17.6e}  {:>13.4}",
            r.omega_c, r.delta_opt, r.f_max, r.r_delta_s
        );
    }

    let op = optimal_operating_point(&sys, &med, model, &budget, (search_lo, search_hi))?;
    let min_dds_mhz = crlb(op.fi_at_delta)?.sqrt();
    let (slope_max_delta, _) = golden_max(
        |dc| Ok(spectral_slope(&sys, &med, model, dc, Observable::Absorption)?.abs()),
        search_lo,
        search_hi.max(15.0),
        1e-5,
    )?;
    write_json(
        &flags.out_dir.join("summary.json"),
        Json::Object(vec![
            ("delta_opt_mhz".into(), Json::Num(op.delta)),
            ("fi_max_per_mhz2".into(), Json::Num(op.fi_at_delta)),
            ("min_dds_mhz_sqrthz".into(), Json::Num(min_dds_mhz)),
            ("min_dds_hz_sqrthz".into(), Json::Num(min_dds_mhz * 1e6)),
            ("max_slope_delta_mhz".into(), Json::Num(slope_max_delta)),
        ]),
    )?;
    println!(
        "operating point ±{:.4} MHz, FI {:.4e} /MHz², min sensitivity {:.4e} Hz/sqrt(Hz), \
         max-slope detuning ±{:.4} MHz",
        op.delta,
        op.fi_at_delta,
        min_dds_mhz * 1e6,
        slope_max_delta
    );
    Ok(())
}

/// `dc`: biased retrieval across a log-spaced field grid, and the
/// minimum-detectable-field scan over operating detuning.
pub fn cmd_dc(mut cfg: Config, flags: &Flags) -> Result<(), CliError> {
    let sensor = scenario::load_sensor(&mut cfg)?;
    let e_lo = cfg.f64_or("dc", "e_min_v_per_m", 1e-5)?;
    let e_hi = cfg.f64_or("dc", "e_max_v_per_m", 1.0)?;
    let n = flags.points.unwrap_or(cfg.usize_or("dc", "points", 50)?);
    let scan_lo = cfg.f64_or("dc", "scan_min_mhz", -8.0)?;
    let scan_hi = cfg.f64_or("dc", "scan_max_mhz", 8.0)?;
    let scan_n = cfg.usize_or("dc", "scan_points", 401)?;
    cfg.finish().map_err(CliError::Config)?;
    if sensor.e_bias == 0.0 {
        return Err(CliError::Config(
            "dc retrieval requires a nonzero sensor.e_bias_v_per_m".into(),
        ));
    }
    if n < 2 || !(e_hi > e_lo) || !(e_lo > 0.0) {
        return Err(CliError::Config(format!(
            "dc grid needs at least 2 points over a positive range, got {n} over [{e_lo}, {e_hi}]"
        )));
    }

    let mut rows = Vec::with_capacity(n);
    let mut worst = 0.0f64;
    for k in 0..n {
        let frac = k as f64 / (n as f64 - 1.0);
        let e = 10f64.powf(e_lo.log10() + frac * (e_hi.log10() - e_lo.log10()));
        let retrieved = dc_retrieve_biased(&sensor, e)?;
        let rel = (retrieved.e_hat - e).abs() / e;
        worst = worst.max(rel);
        rows.push(vec![e, retrieved.e_hat, rel]);
    }
    write_csv(
        &flags.out_dir.join("dc_retrieval.csv"),
        &["e_true_v_per_m", "e_hat_v_per_m", "rel_error"],
        &rows,
    )?;
    println!("retrieval worst relative error {worst:.3e} over [{e_lo:.1e}, {e_hi:.1e}] V/m");

    let mut scan_rows = Vec::with_capacity(scan_n);
    let mut best = f64::INFINITY;
    for &dc in &linspace(scan_lo, scan_hi, scan_n) {
        let de = min_detectable_field_at(&sensor, dc).unwrap_or(f64::INFINITY);
        if de < best {
            best = de;
        }
        scan_rows.push(vec![dc, de]);
    }
    write_csv(
        &flags.out_dir.join("de_min.csv"),
        &["delta_c_mhz", "de_min_v_per_m_sqrthz"],
        &scan_rows,
    )?;
    println!("minimum detectable field {best:.4e} V/m/sqrt(Hz) across the detuning scan");
    Ok(())
}

fn load_field_spec(cfg: &mut Config) -> Result<FieldSpec, CliError> {
    let mut spec = FieldSpec::new(
        cfg.f64_or("field", "amplitude_v_per_m", 0.1)?,
        cfg.f64_or("field", "frequency_hz", 50.0)?,
        cfg.f64_or("field", "phase_rad", 0.0)?,
    )?;
    for order in 2..=8u32 {
        let key = format!("harmonic_{order}_amplitude_v_per_m");
        if let Some(amplitude) = cfg.get_f64("field", &key)? {
            let phase = cfg.f64_or("field", &format!("harmonic_{order}_phase_rad"), 0.0)?;
            spec.harmonics.push(Harmonic {
                order,
                amplitude,
                phase,
            });
        }
    }
    if let Some(amplitude) = cfg.get_f64("field", "drift_amplitude_v_per_m")? {
        spec.drift = Some(Drift {
            amplitude,
            frequency: cfg.f64_or("field", "drift_frequency_hz", 2.0)?,
            phase: cfg.f64_or("field", "drift_phase_rad", 0.0)?,
        });
    }
    Ok(spec)
}

/// `ac`: unbiased single-point and biased differential time series with
/// their spectra, plus retrieved amplitude and top peaks.
pub fn cmd_ac(mut cfg: Config, flags: &Flags) -> Result<(), CliError> {
    let sensor = scenario::load_sensor(&mut cfg)?;
    let field_spec = load_field_spec(&mut cfg)?;
    let seed = flags
        .seed
        .or(cfg.get_u64("noise", "seed")?)
        .ok_or_else(|| CliError::Config("ac needs noise.seed (or --seed)".into()))?;
    let noise = NoiseSpec::new(
        cfg.f64_or("noise", "m_i", 0.02)?,
        cfg.f64_or("noise", "f_i_hz", 2.0)?,
        cfg.f64_or("noise", "phi_i_rad", 0.0)?,
        cfg.f64_or("noise", "sigma_i", 0.003)?,
        cfg.f64_or("noise", "additive_rms_frac", 0.40)?,
        seed,
    )?;
    let duration = cfg.f64_or("sampling", "duration_s", 10.0)?;
    let rate = cfg.f64_or("sampling", "sample_rate_hz", 1000.0)?;
    let n_peaks = flags.points.unwrap_or(5);
    cfg.finish().map_err(CliError::Config)?;
    if sensor.e_bias == 0.0 {
        return Err(CliError::Config(
            "ac readout requires a nonzero sensor.e_bias_v_per_m".into(),
        ));
    }

    // biased differential branch
    let field = synthesize_field(&field_spec, duration, rate, sensor.e_bias)?;
    let sensed = sense_timeseries(&sensor, &field, Some(&noise))?;
    let demod = demodulate(&sensed.rho_ab, field_spec.f_ac, &sensor)?;

    // unbiased single-point branch under identical noise
    let mut unbiased = sensor.clone();
    unbiased.e_bias = 0.0;
    let field0 = synthesize_field(&field_spec, duration, rate, 0.0)?;
    let sensed0 = sense_timeseries(&unbiased, &field0, Some(&noise))?;
    let spectrum0 = dft(&sensed0.rho_a)?;

    let mut w = create(&flags.out_dir.join("biased_timeseries.csv"))?;
    write_timeseries_csv(&mut w, &sensed.rho_ab)?;
    let mut w = create(&flags.out_dir.join("biased_spectrum.csv"))?;
    write_spectrum_csv(&mut w, &demod.spectrum)?;
    let mut w = create(&flags.out_dir.join("unbiased_timeseries.csv"))?;
    write_timeseries_csv(&mut w, &sensed0.rho_a)?;
    let mut w = create(&flags.out_dir.join("unbiased_spectrum.csv"))?;
    write_spectrum_csv(&mut w, &spectrum0)?;

    let nyquist = 0.5 * rate;
    let peaks = peak_pick(&demod.spectrum, 1.0, nyquist - 1.0, n_peaks)?;
    let peak_json: Vec<Json> = peaks
        .iter()
        .map(|&(f, m)| {
            Json::Object(vec![
                ("f_hz".into(), Json::Num(f)),
                ("magnitude".into(), Json::Num(m)),
            ])
        })
        .collect();
    write_json(
        &flags.out_dir.join("ac_summary.json"),
        Json::Object(vec![
            ("amplitude_hat_v_per_m".into(), Json::Num(demod.amplitude)),
            ("f_ac_hz".into(), Json::Num(field_spec.f_ac)),
            ("seed".into(), Json::Str(seed.to_string())),
            ("top_peaks".into(), Json::Array(peak_json)),
        ]),
    )?;
    println!(
        "retrieved amplitude {:.4e} V/m at {} Hz; top peak {:.1} Hz",
        demod.amplitude, field_spec.f_ac, peaks[0].0
    );
    Ok(())
}

/// `cavity`: free-space and cavity transmission scans plus the enhancement
/// factors.
pub fn cmd_cavity(mut cfg: Config, flags: &Flags) -> Result<(), CliError> {
    let sys = scenario::load_atom(&mut cfg)?;
    let model = scenario::load_model(&mut cfg)?;
    let med = scenario::load_medium(&mut cfg, &sys, model)?;
    let state = scenario::load_stark(&mut cfg)?;
    let cavity = CavityConfig::new(
        cfg.f64_or("cavity", "reflectivity", 0.9)?,
        cfg.f64_or("cavity", "cavity_length_m", 0.5)?,
        cfg.f64_or("cavity", "cell_length_m", 0.05)?,
        cfg.f64_or("cavity", "probe_cavity_detuning_mhz", 0.0)?,
    )?;
    let budget = PhotonBudget::new(cfg.f64_or("comparison", "n0", 4.7e14)?)?;
    let e_bias = cfg.f64_or("comparison", "e_bias_v_per_m", 1.0)?;
    let free_n = flags
        .points
        .unwrap_or(cfg.usize_or("comparison", "free_scan_points", 4001)?);
    let cavity_n = cfg.usize_or("comparison", "cavity_scan_points", 20_001)?;
    let cav_lo = cfg.f64_or("comparison", "cavity_scan_min_mhz", -2.0)?;
    let cav_hi = cfg.f64_or("comparison", "cavity_scan_max_mhz", 2.0)?;
    cfg.finish().map_err(CliError::Config)?;

    let free = scan_spectrum(
        &sys,
        &med,
        model,
        (-20.0, 20.0),
        free_n,
        Observable::Transmittance,
    )?;
    write_csv(
        &flags.out_dir.join("free_scan.csv"),
        &["delta_c_mhz", "transmission"],
        &free
            .delta_c()
            .iter()
            .zip(free.values())
            .map(|(&dc, &v)| vec![dc, v])
            .collect::<Vec<_>>(),
    )?;
    let cavity_grid = cavity_scan(&cavity, &sys, &med, model, (cav_lo, cav_hi), cavity_n)?;
    write_csv(
        &flags.out_dir.join("cavity_scan.csv"),
        &["delta_c_mhz", "transmission"],
        &cavity_grid
            .delta_c()
            .iter()
            .zip(cavity_grid.values())
            .map(|(&dc, &v)| vec![dc, v])
            .collect::<Vec<_>>(),
    )?;

    let report = enhancement_report(&cavity, &sys, &med, model, &budget, &state, e_bias)?;
    write_json(
        &flags.out_dir.join("enhancement.json"),
        Json::Object(vec![
            ("sensing_state".into(), Json::Str(state.label.clone())),
            (
                "inverse_linewidth_factor".into(),
                Json::Num(report.inverse_linewidth_factor),
            ),
            ("slope_factor".into(), Json::Num(report.slope_factor)),
            ("fi_factor".into(), Json::Num(report.fi_factor)),
            (
                "sensitivity_factor".into(),
                Json::Num(report.sensitivity_factor),
            ),
            ("free_fwhm_mhz".into(), Json::Num(report.free.fwhm)),
            ("cavity_fwhm_mhz".into(), Json::Num(report.cavity.fwhm)),
            (
                "free_max_slope_per_mhz".into(),
                Json::Num(report.free.max_slope),
            ),
            (
                "cavity_max_slope_per_mhz".into(),
                Json::Num(report.cavity.max_slope),
            ),
            (
                "free_peak_fi_per_v2m2".into(),
                Json::Num(report.free.peak_fi),
            ),
            (
                "cavity_peak_fi_per_v2m2".into(),
                Json::Num(report.cavity.peak_fi),
            ),
        ]),
    )?;
    println!(
        "enhancement factors: inverse linewidth {:.1}, slope {:.1}, FI {:.1}, sensitivity {:.1}",
        report.inverse_linewidth_factor,
        report.slope_factor,
        report.fi_factor,
        report.sensitivity_factor
    );
    Ok(())
}
