//! Acceptance gates for the sensing toolkit, one test per criterion.
//!
//! Every test prints a single `criterion NN (<label>): PASS|FAIL` line with
//! the measured numbers before asserting, so a full run documents each gate:
//!
//! ```text
//! cargo test -p eit-sensor --test acceptance -- --nocapture
//! ```

use eit_sensor::atom::{AtomSystem, CoherenceModel, OpticalMedium};
use eit_sensor::cavity::{cavity_transmission, enhancement_report, CavityConfig};
use eit_sensor::eit::{spectral_slope, transmittance_with, Observable};
use eit_sensor::estimation::{
    crlb, fi_stark_shift, mc_estimator_validation, optimal_operating_point, tradeoff_sweep,
    PhotonBudget,
};
use eit_sensor::numerics::{golden_max, golden_min, linspace};
use eit_sensor::readout::{
    dc_retrieve_biased, demodulate, fi_ac, fi_ac_numeric, min_detectable_field_at,
    sense_timeseries, synthesize_field, FieldSpec, NoiseSpec, SensorConfig,
};
use eit_sensor::sigproc::{dft, peak_pick};
use eit_sensor::stark::{peak_shift_threshold, stark_shift, StarkState};

const MODEL: CoherenceModel = CoherenceModel::SteadyState;

fn reference() -> (AtomSystem, OpticalMedium, PhotonBudget) {
    (
        AtomSystem::reference(),
        OpticalMedium::reference(),
        PhotonBudget::reference(),
    )
}

fn report(criterion: &str, label: &str, pass: bool, details: &str) {
    println!(
        "criterion {criterion} ({label}): {} — {details}",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn criterion_01_operating_points() {
    let (sys, med, budget) = reference();

    let op = optimal_operating_point(&sys, &med, MODEL, &budget, (0.1, 10.0)).unwrap();
    let fi_mirror = fi_stark_shift(&sys, &med, MODEL, &budget, -op.delta).unwrap();
    let fi_ok = (op.delta - 2.184).abs() <= 0.005
        && (fi_mirror - op.fi_at_delta).abs() <= 1e-9 * op.fi_at_delta;

    let slope_mag =
        |dc: f64| Ok(spectral_slope(&sys, &med, MODEL, dc, Observable::Absorption)?.abs());
    let (slope_max_delta, _) = golden_max(slope_mag, 5.0, 15.0, 1e-5).unwrap();
    let mirror = slope_mag(-slope_max_delta).unwrap();
    let here = slope_mag(slope_max_delta).unwrap();
    let slope_ok = (slope_max_delta - 9.880).abs() <= 0.01 && (mirror - here).abs() <= 1e-9 * here;

    let pass = fi_ok && slope_ok;
    report(
        "01",
        "operating points",
        pass,
        &format!(
            "FI optimum ±{:.4} MHz (target ±2.184 ± 0.005), max-slope ±{:.4} MHz (target ±9.880 ± 0.01)",
            op.delta, slope_max_delta
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_02_stark_shift_sensitivity_bound() {
    let (sys, med, budget) = reference();
    // minimum of sqrt(CRLB) over the near-resonant window, via grid + refine
    let axis = linspace(-5.0, 5.0, 2001);
    let bound_at = |dc: f64| -> eit_sensor::Result<f64> {
        Ok(crlb(fi_stark_shift(&sys, &med, MODEL, &budget, dc)?)?.sqrt())
    };
    let mut k_best = 0;
    let mut v_best = f64::INFINITY;
    for (k, &dc) in axis.iter().enumerate() {
        // the exact line center carries zero information and is skipped,
        // like any point where the bound diverges
        let Ok(v) = bound_at(dc) else { continue };
        if v < v_best {
            v_best = v;
            k_best = k;
        }
    }
    let (_, refined) = golden_min(bound_at, axis[k_best - 1], axis[k_best + 1], 1e-6).unwrap();
    let min_mhz_sqrthz = refined.min(v_best);
    let min_hz_sqrthz = min_mhz_sqrthz * 1e6;

    // 8.65e-2 is the quoted minimum in Hz/sqrt(Hz); 20% slack absorbs the
    // calibration freedom in beta
    let pass = (min_hz_sqrthz - 8.65e-2).abs() <= 0.20 * 8.65e-2;
    report(
        "02",
        "Stark-shift sensitivity bound",
        pass,
        &format!(
            "min sqrt(CRLB) over [-5, 5] MHz = {min_hz_sqrthz:.4e} Hz/sqrt(Hz) \
             = {min_mhz_sqrthz:.4e} MHz/sqrt(Hz) (target 8.65e-2 Hz/sqrt(Hz) ± 20%)"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_03_tradeoff_monotonicity() {
    let (sys, med, budget) = reference();
    let omega_axis = [10.0, 12.5, 15.0, 17.5, 20.0, 22.5, 25.0];
    let rows = tradeoff_sweep(&sys, &med, MODEL, &budget, &omega_axis, 0.05).unwrap();
    let fi_monotone = rows.windows(2).all(|p| p[1].f_max < p[0].f_max);
    let range_monotone = rows.windows(2).all(|p| p[1].r_delta_s > p[0].r_delta_s);
    let pass = fi_monotone && range_monotone;
    let summary: Vec<String> = rows
        .iter()
        .map(|r| format!("Ωc={}: F={:.3e}, R={:.3}", r.omega_c, r.f_max, r.r_delta_s))
        .collect();
    report(
        "03",
        "sensitivity–range trade-off",
        pass,
        &format!(
            "F_max strictly decreasing: {fi_monotone}, R_ΔS strictly increasing: {range_monotone} [{}]",
            summary.join("; ")
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_04_stark_arithmetic() {
    let state = StarkState::rb35s();
    // 1 V/m = 0.01 V/cm -> 216 Hz = 2.16e-4 MHz, exact up to rounding
    let shift_mhz = stark_shift(&state, 0.01);
    let shift_ok = (shift_mhz - 2.16e-4).abs() <= 1e-18;
    let threshold = peak_shift_threshold(&state, 4.0).unwrap();
    let threshold_ok = (threshold - 1.3608).abs() <= 1e-3 * 1.3608;
    let pass = shift_ok && threshold_ok;
    report(
        "04",
        "Stark arithmetic",
        pass,
        &format!(
            "ΔS(1 V/m) = {:.6} Hz (target 216), threshold(4.0 MHz) = {threshold:.5} V/cm \
             (target 1.3608 ± 0.1%)",
            shift_mhz * 1e6
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_05_dc_retrieval() {
    let cfg = SensorConfig::reference();
    let mut worst = 0.0f64;
    let mut worst_e = 0.0f64;
    for k in 0..50 {
        // 50-point log grid over [1e-5, 1] V/m
        let e = 10f64.powf(-5.0 + 5.0 * k as f64 / 49.0);
        let retrieved = dc_retrieve_biased(&cfg, e).unwrap().e_hat;
        let rel = (retrieved - e).abs() / e;
        if rel > worst {
            worst = rel;
            worst_e = e;
        }
    }
    let pass = worst <= 1e-6;
    report(
        "05",
        "DC retrieval",
        pass,
        &format!("worst relative error {worst:.3e} at E = {worst_e:.3e} V/m (gate 1e-6)"),
    );
    assert!(pass);
}

#[test]
fn criterion_06_dc_sensitivity() {
    let cfg = SensorConfig::reference();
    let bound_at = |dc: f64| min_detectable_field_at(&cfg, dc);
    let (at, min_de) = golden_min(bound_at, 0.5, 8.0, 1e-5).unwrap();
    let location_ok = (at - 2.184).abs() <= 0.005;
    let value_ok = (0.5e-4..=2.0e-4).contains(&min_de);
    let pass = location_ok && value_ok;
    report(
        "06",
        "DC sensitivity",
        pass,
        &format!(
            "min δE_min = {min_de:.4e} V/m/sqrt(Hz) at ±{at:.4} MHz \
             (target ≈1e-4 within factor 2, at ±2.184)"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_07_ac_discrimination() {
    let cfg = SensorConfig::reference();
    let seed = 20260807;
    let field = synthesize_field(&FieldSpec::grid_scenario(), 10.0, 1000.0, cfg.e_bias).unwrap();
    let noise = NoiseSpec::grid_scenario(seed);
    let sensed = sense_timeseries(&cfg, &field, Some(&noise)).unwrap();
    let demod = demodulate(&sensed.rho_ab, 50.0, &cfg).unwrap();
    let spec = &demod.spectrum;

    let band: Vec<f64> = spec
        .freqs
        .iter()
        .zip(&spec.magnitudes)
        .filter(|(f, _)| **f >= 1.0)
        .map(|(_, m)| *m)
        .collect();
    let floor = median(&band);
    let top = peak_pick(spec, 1.0, 500.0, 1).unwrap()[0];
    let top_ok = (top.0 - 50.0).abs() <= 0.2 && top.1 >= 3.0 * floor;
    let harmonic_ok = spec.magnitude_at(100.0).unwrap() >= 3.0 * floor;
    let drift_ok = spec.magnitude_at(2.0).unwrap() >= 3.0 * floor;

    // unbiased single-point channel under the same conditions
    let mut unbiased = cfg.clone();
    unbiased.e_bias = 0.0;
    let field0 = synthesize_field(&FieldSpec::grid_scenario(), 10.0, 1000.0, 0.0).unwrap();
    let sensed0 = sense_timeseries(&unbiased, &field0, Some(&noise)).unwrap();
    let spec0 = dft(&sensed0.rho_a).unwrap();
    let band0: Vec<f64> = spec0
        .freqs
        .iter()
        .zip(&spec0.magnitudes)
        .filter(|(f, _)| **f >= 1.0)
        .map(|(_, m)| *m)
        .collect();
    let floor0 = median(&band0);
    let unbiased_50 = spec0.magnitude_at(50.0).unwrap();
    let unbiased_ok = unbiased_50 < 3.0 * floor0;

    let pass = top_ok && harmonic_ok && drift_ok && unbiased_ok;
    report(
        "07",
        "AC discrimination",
        pass,
        &format!(
            "biased: top peak {:.1} Hz at {:.1}x floor, 100 Hz at {:.1}x, 2 Hz at {:.1}x; \
             unbiased 50 Hz at {:.2}x floor (must stay < 3)",
            top.0,
            top.1 / floor,
            spec.magnitude_at(100.0).unwrap() / floor,
            spec.magnitude_at(2.0).unwrap() / floor,
            unbiased_50 / floor0
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_08_ac_fi_identity() {
    let cfg = SensorConfig::reference();
    // one second = 50 whole periods of 50 Hz
    let closed = fi_ac(&cfg, 50.0, 1.0).unwrap();
    let numeric = fi_ac_numeric(&cfg, 50.0, 1.0, 20_000).unwrap();
    let rel = (numeric - closed).abs() / closed;
    let pass = rel <= 1e-6;
    report(
        "08",
        "AC FI identity",
        pass,
        &format!("closed {closed:.6e}, numeric {numeric:.6e}, relative {rel:.3e} (gate 1e-6)"),
    );
    assert!(pass);
}

#[test]
fn criterion_09_cavity_enhancement() {
    let (sys, med, budget) = reference();
    let cavity = CavityConfig::reference();
    let rep = enhancement_report(
        &cavity,
        &sys,
        &med,
        MODEL,
        &budget,
        &StarkState::rb35s(),
        1.0,
    )
    .unwrap();

    let within = |got: f64, target: f64, tol: f64| (got - target).abs() <= tol * target;
    let f_lw = within(rep.inverse_linewidth_factor, 40.3, 0.15);
    let f_sl = within(rep.slope_factor, 30.1, 0.15);
    let f_fi = within(rep.fi_factor, 782.1, 0.15);
    let f_se = within(rep.sensitivity_factor, 27.9, 0.15);
    let f_width = within(rep.cavity.fwhm, 0.094, 0.10);
    let f_floor = rep.fi_factor > 100.0;
    let pass = f_lw && f_sl && f_fi && f_se && f_width && f_floor;
    report(
        "09",
        "cavity enhancement",
        pass,
        &format!(
            "factors (inverse linewidth, slope, FI, sensitivity) = \
             ({:.1}, {:.1}, {:.1}, {:.1}) vs targets (40.3, 30.1, 782.1, 27.9) ± 15%; \
             cavity FWHM {:.4} MHz vs 0.094 ± 10%; FI ratio > 100: {f_floor}. \
             Note: the resolved feature of this transmission model is ~1.47x narrower than \
             the reference values, which are mutually consistent with the same model only \
             after ~0.04 MHz grid smoothing; the factor targets inherit that broadening.",
            rep.inverse_linewidth_factor,
            rep.slope_factor,
            rep.fi_factor,
            rep.sensitivity_factor,
            rep.cavity.fwhm
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_10_estimator_level_validation() {
    let (sys, med, _) = reference();
    let budget = PhotonBudget::new(1e6).unwrap();
    let v = mc_estimator_validation(&sys, &med, MODEL, &budget, 2.184, 0.05, 10_000, 13).unwrap();
    let ratio = v.sample_variance / v.crlb;
    let pass = (1.0..=1.3).contains(&ratio);
    report(
        "10",
        "estimator-level validation",
        pass,
        &format!(
            "sample variance {:.4e}, CRLB {:.4e}, ratio {ratio:.4} (gate [1.0, 1.3], seed 13)",
            v.sample_variance, v.crlb
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_11_cavity_free_space_identity() {
    let (sys, med, _) = reference();
    let open = CavityConfig::new(0.0, 0.5, 0.05, 0.0).unwrap();
    let mut worst = 0.0f64;
    for model in [CoherenceModel::ClosedForm, CoherenceModel::SteadyState] {
        for &dc in &linspace(-20.0, 20.0, 4001) {
            let s = cavity_transmission(&open, &sys, &med, model, dc).unwrap();
            let eta = transmittance_with(&sys, &med, model, dc).unwrap();
            let rel = (s - eta).abs() / eta.abs().max(1e-300);
            worst = worst.max(rel);
        }
    }
    let pass = worst <= 1e-10;
    report(
        "11",
        "cavity free-space identity",
        pass,
        &format!("worst relative deviation at R = 0: {worst:.3e} (gate 1e-10)"),
    );
    assert!(pass);
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite magnitudes"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
