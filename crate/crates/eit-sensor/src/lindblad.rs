//! Steady state of the cascade three-level Lindblad master equation.
//!
//! The probe-absorption and dispersion line shapes used for the quantitative
//! sensitivity analysis come from here: the weak-probe closed form neglects
//! probe saturation, which at Ω_p/2π = 2 MHz already moves the maximum-slope
//! detuning by almost 1 MHz and reshapes the dispersive response.
//!
//! The master equation is
//!
//! dρ/dt = −i[H, ρ] + Σ_k ( C_k ρ C_k† − ½{C_k†C_k, ρ} )
//!
//! with H in /2π-MHz units,
//!
//! H = ½ [[0, Ω_p, 0], [Ω_p, −2Δ_p, Ω_c], [0, Ω_c, −2(Δ_p+Δ_c)]],
//!
//! and cascade collapse channels C_1 = √γ_e |g⟩⟨e|, C_2 = √γ_r |e⟩⟨r|.
//! With these channels the coherence decay rates are γ_e/2 and γ_r/2, and the
//! Ω_p → 0 limit of ρ_ge reproduces the closed form exactly, which fixes the
//! interpretation of the caption rates as population decay rates.
//!
//! The steady state solves the 9×9 linear system L·vec(ρ) = 0 with the ρ_gg
//! row replaced by the trace constraint; a dense partial-pivot LU is plenty
//! at this size and keeps the crate free of linear-algebra dependencies.

use num_complex::Complex64;

use crate::atom::AtomSystem;
use crate::error::{Error, Result};

const N: usize = 3;
const N2: usize = 9;

#[inline]
fn idx(i: usize, j: usize) -> usize {
    // column-stacked vec(rho): element (i, j) of the density matrix
    i + N * j
}

/// Steady-state ρ_ge of the full master equation at coupling detuning
/// `delta_c` (MHz).
pub fn steady_state_rho_ge(sys: &AtomSystem, delta_c: f64) -> Result<Complex64> {
    let h = hamiltonian(sys, delta_c);
    let mut l = [[Complex64::ZERO; N2]; N2];

    // -i(H rho - rho H)
    for i in 0..N {
        for j in 0..N {
            let row = idx(i, j);
            for k in 0..N {
                l[row][idx(k, j)] -= Complex64::I * h[i][k];
                l[row][idx(i, k)] += Complex64::I * h[k][j];
            }
        }
    }

    // dissipators for C1 = sqrt(ge)|g><e|, C2 = sqrt(gr)|e><r|
    // C rho C^T: rate * rho[from,from] feeding (to,to); anticommutator is
    // diagonal in the number operator |from><from|.
    for (rate, to, from) in [(sys.gamma_e, 0usize, 1usize), (sys.gamma_r, 1, 2)] {
        let r = Complex64::new(rate, 0.0);
        l[idx(to, to)][idx(from, from)] += r;
        for k in 0..N {
            l[idx(from, k)][idx(from, k)] -= 0.5 * r;
            l[idx(k, from)][idx(k, from)] -= 0.5 * r;
        }
    }

    // trace constraint replaces the rho_gg row
    let row = idx(0, 0);
    l[row] = [Complex64::ZERO; N2];
    for d in 0..N {
        l[row][idx(d, d)] = Complex64::ONE;
    }
    let mut rhs = [Complex64::ZERO; N2];
    rhs[row] = Complex64::ONE;

    let v = lu_solve(&mut l, &mut rhs)?;
    Ok(v[idx(0, 1)])
}

fn hamiltonian(sys: &AtomSystem, delta_c: f64) -> [[Complex64; N]; N] {
    let c = |x: f64| Complex64::new(x, 0.0);
    [
        [c(0.0), c(0.5 * sys.omega_p), c(0.0)],
        [c(0.5 * sys.omega_p), c(-sys.delta_p), c(0.5 * sys.omega_c)],
        [c(0.0), c(0.5 * sys.omega_c), c(-(sys.delta_p + delta_c))],
    ]
}

/// In-place partial-pivot LU solve of the 9×9 system.
#[allow(clippy::needless_range_loop)]
fn lu_solve(a: &mut [[Complex64; N2]; N2], b: &mut [Complex64; N2]) -> Result<[Complex64; N2]> {
    for col in 0..N2 {
        let mut pivot = col;
        let mut best = a[col][col].norm_sqr();
        for r in col + 1..N2 {
            let m = a[r][col].norm_sqr();
            if m > best {
                best = m;
                pivot = r;
            }
        }
        if best < 1e-300 {
            return Err(Error::DegenerateParameters(best));
        }
        if pivot != col {
            a.swap(pivot, col);
            b.swap(pivot, col);
        }
        let inv = Complex64::ONE / a[col][col];
        for r in col + 1..N2 {
            let factor = a[r][col] * inv;
            if factor == Complex64::ZERO {
                continue;
            }
            a[r][col] = Complex64::ZERO;
            for c in col + 1..N2 {
                let sub = factor * a[col][c];
                a[r][c] -= sub;
            }
            let sub = factor * b[col];
            b[r] -= sub;
        }
    }
    let mut x = [Complex64::ZERO; N2];
    for row in (0..N2).rev() {
        let mut acc = b[row];
        for c in row + 1..N2 {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}
