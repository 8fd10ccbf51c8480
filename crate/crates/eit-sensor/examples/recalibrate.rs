//! Recomputes the pinned reference optical depth: the beta that places the
//! FI-optimal operating detuning of the reference system at 2.184 MHz,
//! alongside the linewidth-targeted calibration for comparison.

use eit_sensor::atom::{AtomSystem, CoherenceModel, OpticalMedium};
use eit_sensor::eit::{calibrate_beta, fwhm, scan_spectrum, Observable};
use eit_sensor::estimation::{optimal_operating_point, PhotonBudget};

fn delta_opt(beta: f64) -> f64 {
    let sys = AtomSystem::reference();
    let med = OpticalMedium::with_beta(beta).unwrap();
    let budget = PhotonBudget::reference();
    optimal_operating_point(&sys, &med, CoherenceModel::SteadyState, &budget, (0.5, 8.0))
        .unwrap()
        .delta
}

fn main() {
    let (mut lo, mut hi) = (200.0, 240.0);
    // delta_opt decreases with beta
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if delta_opt(mid) > 2.184 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let beta = 0.5 * (lo + hi);
    println!("beta* = {beta:.13}");
    println!("delta_opt(beta*) = {:.6}", delta_opt(beta));

    let sys = AtomSystem::reference();
    let med = OpticalMedium::with_beta(beta).unwrap();
    let grid = scan_spectrum(
        &sys,
        &med,
        CoherenceModel::SteadyState,
        (-20.0, 20.0),
        4001,
        Observable::Transmittance,
    )
    .unwrap();
    println!("fwhm(beta*) = {:.6}", fwhm(&grid).unwrap());
    let b37 = calibrate_beta(&sys, CoherenceModel::SteadyState, 3.7).unwrap();
    println!(
        "calibrate_beta(3.7) = {b37:.8} -> delta_opt = {:.6}",
        delta_opt(b37)
    );
}
