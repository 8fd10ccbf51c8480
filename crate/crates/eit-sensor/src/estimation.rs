//! Fisher information and Cramér–Rao machinery for Poisson photon-counting
//! readout of the EIT spectrum, optimal operating-point search, and the
//! sensitivity–range trade-off.
//!
//! The estimated parameter is the Stark shift ΔS; under the rigid-translation
//! model ∂/∂ΔS = −∂/∂Δ_c at zero field, which sidesteps the quadratic
//! weak-field degeneracy of estimating E directly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::atom::{AtomSystem, CoherenceModel, OpticalMedium};
use crate::eit::{absorption_with, transmittance_with};
use crate::error::{Error, Result};
use crate::numerics::{central_diff, golden_max, golden_min, linspace, DERIV_STEP_MHZ};

/// Mean incident photon number per 1 Hz-bandwidth window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonBudget {
    pub n0: f64,
}

impl PhotonBudget {
    pub fn new(n0: f64) -> Result<Self> {
        if !(n0 > 0.0) || !n0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "photon budget must be > 0, got {n0}"
            )));
        }
        Ok(Self { n0 })
    }

    /// The budget quoted for the sensitivity analysis, n̄₀ = 4.7e14.
    pub fn reference() -> Self {
        Self { n0: 4.7e14 }
    }
}

/// Fisher information over the (Δ_c, Ω_c) plane; `fi[i][j]` pairs
/// `omega_c_axis[i]` with `delta_c_axis[j]`, in MHz⁻² per 1 Hz window.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherMap {
    pub delta_c_axis: Vec<f64>,
    pub omega_c_axis: Vec<f64>,
    pub fi: Vec<Vec<f64>>,
}

/// An FI-optimal operating detuning and the information attained there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    /// Detuning magnitude δ in MHz, > 0.
    pub delta: f64,
    /// FI(δ) in MHz⁻².
    pub fi_at_delta: f64,
}

/// Result of the Monte-Carlo estimator validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McValidation {
    pub sample_variance: f64,
    pub crlb: f64,
    pub mean_estimate: f64,
    pub n_trials: usize,
}

/// Outcome of the usable-range scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UsableRange {
    /// Largest Stark shift R_ΔS (MHz) for which the differential response
    /// stays within the nonlinearity tolerance at every smaller scanned
    /// shift.
    pub r_delta_s: f64,
    /// True when the tolerance was already exceeded at the first scan step.
    pub degenerate: bool,
}

/// Poisson-counting Fisher information F(θ) = (1/n̄)(dn̄/dθ)², with the
/// derivative by central difference of `mean_fn` at `theta` with `step`.
pub fn poisson_fisher<F>(mean_fn: F, theta: f64, step: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "derivative step must be > 0, got {step}"
        )));
    }
    let mean = mean_fn(theta)?;
    if !(mean > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Poisson mean must be > 0, got {mean}"
        )));
    }
    let dmean = central_diff(&mean_fn, theta, step)?;
    Ok(dmean * dmean / mean)
}

/// Fisher information for θ = ΔS from a single transmission measurement at
/// operating detuning `delta_c`, at zero field:
/// F(ΔS) = n̄₀·η·(∂ln η/∂ΔS)².
pub fn fi_stark_shift(
    sys: &AtomSystem,
    med: &OpticalMedium,
    model: CoherenceModel,
    budget: &PhotonBudget,
    delta_c: f64,
) -> Result<f64> {
    let eta = transmittance_with(sys, med, model, delta_c)?;
    // d/dDS = -d/dDc under rigid translation; squared, the sign drops
    let deta = central_diff(
        |dc| transmittance_with(sys, med, model, dc),
        delta_c,
        DERIV_STEP_MHZ,
    )?;
    Ok(budget.n0 * deta * deta / eta)
}

/// Cramér–Rao bound 1/F for a positive Fisher information.
pub fn crlb(fi_value: f64) -> Result<f64> {
    if !(fi_value > 0.0) {
        return Err(Error::UnresolvableParameter(fi_value));
    }
    Ok(1.0 / fi_value)
}

/// `fi_stark_shift` evaluated over a (Δ_c, Ω_c) grid. Rows are independent;
/// the output layout is fixed regardless of evaluation order.
pub fn fisher_map(
    sys_template: &AtomSystem,
    med: &OpticalMedium,
    model: CoherenceModel,
    budget: &PhotonBudget,
    delta_c_axis: &[f64],
    omega_c_axis: &[f64],
) -> Result<FisherMap> {
    for (name, axis) in [("delta_c", delta_c_axis), ("omega_c", omega_c_axis)] {
        if axis.is_empty() {
            return Err(Error::InvalidRange(format!("empty {name} axis")));
        }
        if axis.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidRange(format!(
                "{name} axis must be strictly increasing"
            )));
        }
    }
    let mut fi = Vec::with_capacity(omega_c_axis.len());
    for &oc in omega_c_axis {
        let sys = AtomSystem::new(
            sys_template.omega_p,
            oc,
            sys_template.delta_p,
            sys_template.gamma_e,
            sys_template.gamma_r,
        )?;
        let row = delta_c_axis
            .iter()
            .map(|&dc| fi_stark_shift(&sys, med, model, budget, dc))
            .collect::<Result<Vec<_>>>()?;
        fi.push(row);
    }
    Ok(FisherMap {
        delta_c_axis: delta_c_axis.to_vec(),
        omega_c_axis: omega_c_axis.to_vec(),
        fi,
    })
}

/// Golden-section refinement of the coarse-grid argmax of `fi_stark_shift`
/// over positive detunings in `search_range`; resolution 1e-4 MHz. The
/// mirror point −δ attains the same information by parity.
pub fn optimal_operating_point(
    sys: &AtomSystem,
    med: &OpticalMedium,
    model: CoherenceModel,
    budget: &PhotonBudget,
    search_range: (f64, f64),
) -> Result<OperatingPoint> {
    let (lo, hi) = search_range;
    if !(lo > 0.0) || !(hi > lo) {
        return Err(Error::InvalidRange(format!(
            "operating-point search needs 0 < lo < hi, got [{lo}, {hi}]"
        )));
    }
    let coarse = linspace(lo, hi, 2001);
    let values = coarse
        .iter()
        .map(|&dc| fi_stark_shift(sys, med, model, budget, dc))
        .collect::<Result<Vec<_>>>()?;
    let k = crate::numerics::argmax(&values);
    if !(values[k] > 0.0) {
        return Err(Error::UnresolvableParameter(values[k]));
    }
    let bracket_lo = if k == 0 { coarse[0] } else { coarse[k - 1] };
    let bracket_hi = if k + 1 == coarse.len() {
        coarse[k]
    } else {
        coarse[k + 1]
    };
    let (delta, fi_at_delta) = golden_max(
        |dc| fi_stark_shift(sys, med, model, budget, dc),
        bracket_lo,
        bracket_hi,
        1e-4,
    )?;
    Ok(OperatingPoint { delta, fi_at_delta })
}

/// Usable-range scan over an arbitrary zero-field line shape `line`.
///
/// ρ_AB(ΔS; δ) = line(δ−ΔS) − line(−δ−ΔS) is compared against its
/// linearization −2ΔS·line′(δ); the scan walks ΔS upward from `step` in
/// increments of `step` up to `cap` and returns the last shift before the
/// relative nonlinearity first exceeds `tolerance`.
pub fn usable_range_of<F>(
    line: F,
    delta: f64,
    tolerance: f64,
    step: f64,
    cap: f64,
) -> Result<UsableRange>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "operating detuning must be > 0, got {delta}"
        )));
    }
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must lie in (0, 1), got {tolerance}"
        )));
    }
    if !(step > 0.0) || !(cap >= step) {
        return Err(Error::InvalidRange(format!(
            "scan step {step} and cap {cap} are inconsistent"
        )));
    }
    let slope = central_diff(&line, delta, DERIV_STEP_MHZ)?;
    if slope.abs() < 1e-300 {
        return Err(Error::Configuration(
            "zero line-shape slope at the operating detuning".into(),
        ));
    }
    let mut last_ok = 0.0;
    let mut k = 1u64;
    loop {
        let ds = step * k as f64;
        if ds > cap {
            break;
        }
        let exact = line(delta - ds)? - line(-delta - ds)?;
        let lin = -2.0 * ds * slope;
        if (exact - lin).abs() > tolerance * lin.abs() {
            break;
        }
        last_ok = ds;
        k += 1;
    }
    Ok(UsableRange {
        r_delta_s: last_ok,
        degenerate: last_ok == 0.0,
    })
}

/// Usable Stark-shift range of the EIT absorption line at operating detuning
/// `delta`, scanned at 1e-3 MHz resolution up to 2δ.
pub fn usable_range(
    sys: &AtomSystem,
    model: CoherenceModel,
    delta: f64,
    tolerance: f64,
) -> Result<UsableRange> {
    usable_range_of(
        |dc| absorption_with(sys, model, dc),
        delta,
        tolerance,
        1e-3,
        2.0 * delta,
    )
}

/// One row of the sensitivity–range trade-off table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffRow {
    pub omega_c: f64,
    pub delta_opt: f64,
    pub f_max: f64,
    pub r_delta_s: f64,
}

/// Per coupling strength: locate the FI-optimal detuning, then evaluate the
/// usable Stark-shift range there (ε₀ tolerance).
pub fn tradeoff_sweep(
    sys_template: &AtomSystem,
    med: &OpticalMedium,
    model: CoherenceModel,
    budget: &PhotonBudget,
    omega_c_axis: &[f64],
    tolerance: f64,
) -> Result<Vec<TradeoffRow>> {
    if omega_c_axis.is_empty() {
        return Err(Error::InvalidRange("empty omega_c axis".into()));
    }
    let mut rows = Vec::with_capacity(omega_c_axis.len());
    for &oc in omega_c_axis {
        let sys = AtomSystem::new(
            sys_template.omega_p,
            oc,
            sys_template.delta_p,
            sys_template.gamma_e,
            sys_template.gamma_r,
        )?;
        let op = optimal_operating_point(&sys, med, model, budget, (0.01, oc.max(1.0)))?;
        let range = usable_range(&sys, model, op.delta, tolerance)?;
        rows.push(TradeoffRow {
            omega_c: oc,
            delta_opt: op.delta,
            f_max: op.fi_at_delta,
            r_delta_s: range.r_delta_s,
        });
    }
    Ok(rows)
}

/// Monte-Carlo validation of the CRLB pipeline: draws Poisson counts at the
/// two operating points ±δ with means n̄₀·η(±δ−ΔS_true), forms the
/// maximum-likelihood estimate of ΔS per trial by 1-D likelihood
/// maximization, and returns the sample variance alongside the CRLB at the
/// true shift. Bit-reproducible for a fixed `seed`.
#[allow(clippy::too_many_arguments)]
pub fn mc_estimator_validation(
    sys: &AtomSystem,
    med: &OpticalMedium,
    model: CoherenceModel,
    budget: &PhotonBudget,
    delta: f64,
    true_shift: f64,
    n_trials: usize,
    seed: u64,
) -> Result<McValidation> {
    if n_trials < 1000 {
        return Err(Error::InvalidParameter(format!(
            "need at least 1000 trials, got {n_trials}"
        )));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "operating detuning must be > 0, got {delta}"
        )));
    }
    let mean_a = |ds: f64| Ok(budget.n0 * transmittance_with(sys, med, model, delta - ds)?);
    let mean_b = |ds: f64| Ok(budget.n0 * transmittance_with(sys, med, model, -delta - ds)?);

    // CRLB at the true shift from both counting channels
    let fi_total = poisson_fisher(mean_a, true_shift, DERIV_STEP_MHZ)?
        + poisson_fisher(mean_b, true_shift, DERIV_STEP_MHZ)?;
    let bound = crlb(fi_total)?;

    // search window: generous multiple of the expected standard deviation
    let sigma = bound.sqrt();
    let half_window = (200.0 * sigma).min(0.5 * delta);
    let lo = true_shift - half_window;
    let hi = true_shift + half_window;
    let grid = linspace(lo, hi, 201);
    let mu_a: Vec<f64> = grid.iter().map(|&ds| mean_a(ds)).collect::<Result<_>>()?;
    let mu_b: Vec<f64> = grid.iter().map(|&ds| mean_b(ds)).collect::<Result<_>>()?;
    if mu_a.iter().chain(&mu_b).any(|&m| !(m > 0.0)) {
        return Err(Error::Configuration(
            "non-positive photon mean inside the likelihood window".into(),
        ));
    }
    let ln_a: Vec<f64> = mu_a.iter().map(|m| m.ln()).collect();
    let ln_b: Vec<f64> = mu_b.iter().map(|m| m.ln()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pois_a = Poisson::new(mean_a(true_shift)?).expect("positive mean");
    let pois_b = Poisson::new(mean_b(true_shift)?).expect("positive mean");

    let nll = |ds: f64, na: f64, nb: f64| -> Result<f64> {
        let ma = mean_a(ds)?;
        let mb = mean_b(ds)?;
        Ok(ma - na * ma.ln() + mb - nb * mb.ln())
    };

    let mut estimates = Vec::with_capacity(n_trials);
    for _ in 0..n_trials {
        let na = pois_a.sample(&mut rng);
        let nb = pois_b.sample(&mut rng);
        // coarse scan on the precomputed grid, then golden refinement
        let mut best = 0usize;
        let mut best_val = f64::INFINITY;
        for i in 0..grid.len() {
            let v = mu_a[i] - na * ln_a[i] + mu_b[i] - nb * ln_b[i];
            if v < best_val {
                best_val = v;
                best = i;
            }
        }
        if best == 0 || best + 1 == grid.len() {
            return Err(Error::Likelihood(format!(
                "maximum-likelihood search hit the window edge at ΔS = {}",
                grid[best]
            )));
        }
        let (est, _) = golden_min(|ds| nll(ds, na, nb), grid[best - 1], grid[best + 1], 1e-7)?;
        estimates.push(est);
    }

    let n = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let sample_variance = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(McValidation {
        sample_variance,
        crlb: bound,
        mean_estimate: mean,
        n_trials,
    })
}
