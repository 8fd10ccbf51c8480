//! Small deterministic numerical helpers shared across the crate.

use crate::error::{Error, Result};

/// Central-difference step used for every spectral derivative in the crate,
/// in MHz. Small against the narrowest feature handled (the ~0.06 MHz cavity
/// line) while far above double-precision noise.
pub const DERIV_STEP_MHZ: f64 = 1e-4;

/// Central finite difference of `f` at `x` with step `h`.
pub fn central_diff<F>(f: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
///
/// Returns `(x_max, f_max)` once the bracket has shrunk below `tol`.
pub fn golden_max<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(b > a) || !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidRange(format!(
            "golden-section bracket [{a}, {b}] with tolerance {tol}"
        )));
    }
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > tol {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

/// Golden-section search for the minimum of `f` on `[a, b]`.
pub fn golden_min<F>(f: F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let (x, fx) = golden_max(|x| f(x).map(|v| -v), a, b, tol)?;
    Ok((x, -fx))
}

/// Uniform grid of `n` points spanning `[lo, hi]` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n as f64 - 1.0);
    (0..n).map(|i| lo + step * i as f64).collect()
}

/// Index of the largest element. Ties resolve to the first occurrence.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_vertex() {
        let (x, fx) = golden_max(|x| Ok(1.0 - (x - 0.3).powi(2)), -2.0, 2.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-8);
        assert!((fx - 1.0).abs() < 1e-12);
    }

    #[test]
    fn golden_rejects_bad_bracket() {
        assert!(golden_max(Ok, 1.0, 0.0, 1e-6).is_err());
    }

    #[test]
    fn linspace_endpoints_exact() {
        let g = linspace(-20.0, 20.0, 4001);
        assert_eq!(g.len(), 4001);
        assert_eq!(g[0], -20.0);
        assert!((g[4000] - 20.0).abs() < 1e-12);
    }
}
