//! Minimal deterministic spectral toolkit: discrete Fourier transform,
//! single-sided spectrum, peak picking.
//!
//! The transform is radix-2 for power-of-two lengths and falls back to a
//! direct evaluation with an exact precomputed twiddle table otherwise, so
//! results are bit-reproducible without any FFT dependency.
//!
//! Normalization (shared with the readout demodulator): the single-sided
//! amplitude spectrum reports |X(f)| = (2/N)·|Σ x·e^(−i2πfn/N)| for
//! 0 < f < Nyquist, and (1/N)·|Σ…| at DC and Nyquist, so a pure cosine of
//! amplitude a reads a at its bin.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniformly sampled real signal.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    /// Sample rate in Hz, > 0.
    pub sample_rate: f64,
    /// Time of the first sample, in seconds.
    pub t0: f64,
    /// Samples, all finite.
    pub samples: Vec<f64>,
}

impl TimeSeries {
    pub fn new(sample_rate: f64, t0: f64, samples: Vec<f64>) -> Result<Self> {
        if !(sample_rate > 0.0) || !sample_rate.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sample rate must be > 0, got {sample_rate}"
            )));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidParameter("non-finite sample".into()));
        }
        Ok(Self {
            sample_rate,
            t0,
            samples,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Duration covered by the samples, N/rate, in seconds.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    /// Sample instants.
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        let dt = 1.0 / self.sample_rate;
        (0..self.samples.len()).map(move |i| self.t0 + i as f64 * dt)
    }
}

/// Single-sided spectrum: frequencies from 0 to Nyquist with magnitudes in
/// the input units and raw phases in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub freqs: Vec<f64>,
    pub magnitudes: Vec<f64>,
    pub phases: Vec<f64>,
}

impl Spectrum {
    /// Frequency spacing between bins, sample_rate/N exactly.
    pub fn bin_spacing(&self) -> f64 {
        self.freqs[1] - self.freqs[0]
    }

    /// Magnitude of the bin nearest to `f`.
    pub fn magnitude_at(&self, f: f64) -> Result<f64> {
        let k = self.nearest_bin(f)?;
        Ok(self.magnitudes[k])
    }

    pub fn nearest_bin(&self, f: f64) -> Result<usize> {
        let nyquist = *self.freqs.last().expect("spectrum is never empty");
        if !(0.0..=nyquist).contains(&f) {
            return Err(Error::InvalidRange(format!(
                "frequency {f} Hz outside [0, {nyquist}] Hz"
            )));
        }
        Ok((f / self.bin_spacing()).round() as usize)
    }
}

/// Window applied before the transform. Rectangular everywhere by default;
/// the Hann option exists for exploratory use and stays off in every shipped
/// pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    #[default]
    Rectangular,
    Hann,
}

/// Single-sided amplitude spectrum of `series`.
pub fn dft(series: &TimeSeries) -> Result<Spectrum> {
    dft_windowed(series, Window::Rectangular)
}

/// Single-sided amplitude spectrum with an explicit window choice.
pub fn dft_windowed(series: &TimeSeries, window: Window) -> Result<Spectrum> {
    let n = series.samples.len();
    if n < 2 {
        return Err(Error::InvalidRange(format!(
            "transform needs at least 2 samples, got {n}"
        )));
    }
    let data: Vec<f64> = match window {
        Window::Rectangular => series.samples.clone(),
        Window::Hann => {
            let scale = std::f64::consts::TAU / n as f64;
            series
                .samples
                .iter()
                .enumerate()
                .map(|(i, &x)| x * 0.5 * (1.0 - (scale * i as f64).cos()))
                .collect()
        }
    };

    let bins = full_transform(&data);

    let n_half = n / 2; // Nyquist index for even n, last strictly-below bin for odd n
    let mut freqs = Vec::with_capacity(n_half + 1);
    let mut magnitudes = Vec::with_capacity(n_half + 1);
    let mut phases = Vec::with_capacity(n_half + 1);
    let df = series.sample_rate / n as f64;
    for (k, bin) in bins.iter().enumerate().take(n_half + 1) {
        let single_sided_edge = k == 0 || (n.is_multiple_of(2) && k == n_half);
        let scale = if single_sided_edge {
            1.0 / n as f64
        } else {
            2.0 / n as f64
        };
        freqs.push(k as f64 * df);
        magnitudes.push(scale * bin.norm());
        // real input makes the DC and Nyquist bins real; report their phase
        // as exactly 0 or pi instead of the sign noise of a vanishing
        // imaginary part
        let phase = if single_sided_edge {
            if bin.re >= 0.0 {
                0.0
            } else {
                std::f64::consts::PI
            }
        } else {
            bin.im.atan2(bin.re)
        };
        phases.push(phase);
    }
    Ok(Spectrum {
        freqs,
        magnitudes,
        phases,
    })
}

fn full_transform(data: &[f64]) -> Vec<Complex64> {
    let n = data.len();
    if n.is_power_of_two() {
        let mut buf: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        radix2(&mut buf);
        buf
    } else {
        direct(data)
    }
}

/// Iterative in-place radix-2 transform (forward, e^(−i2πkn/N) kernel).
fn radix2(buf: &mut [Complex64]) {
    let n = buf.len();
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let ang = -std::f64::consts::TAU / len as f64;
        let wl = Complex64::from_polar(1.0, ang);
        for start in (0..n).step_by(len) {
            let mut w = Complex64::ONE;
            for k in 0..len / 2 {
                let u = buf[start + k];
                let v = buf[start + k + len / 2] * w;
                buf[start + k] = u + v;
                buf[start + k + len / 2] = u - v;
                w *= wl;
            }
        }
        len <<= 1;
    }
}

/// Direct transform with an exact twiddle table; O(N²) multiply-adds but no
/// trigonometric drift.
fn direct(data: &[f64]) -> Vec<Complex64> {
    let n = data.len();
    let table: Vec<Complex64> = (0..n)
        .map(|m| Complex64::from_polar(1.0, -std::f64::consts::TAU * m as f64 / n as f64))
        .collect();
    (0..n)
        .map(|k| {
            let mut acc = Complex64::ZERO;
            let mut idx = 0usize;
            for &x in data {
                acc += x * table[idx];
                idx += k;
                if idx >= n {
                    idx -= n;
                }
            }
            acc
        })
        .collect()
}

/// The `n_peaks` largest local maxima of the magnitude spectrum within
/// `[f_min, f_max]`, refined by 3-point parabolic interpolation and sorted by
/// magnitude, descending. Returns fewer than `n_peaks` entries when the band
/// holds fewer maxima.
pub fn peak_pick(
    spec: &Spectrum,
    f_min: f64,
    f_max: f64,
    n_peaks: usize,
) -> Result<Vec<(f64, f64)>> {
    let nyquist = *spec.freqs.last().expect("spectrum is never empty");
    if !(f_min < f_max) || f_min < 0.0 || f_max > nyquist {
        return Err(Error::InvalidRange(format!(
            "band [{f_min}, {f_max}] Hz outside spectrum range [0, {nyquist}] Hz"
        )));
    }
    let m = &spec.magnitudes;
    let df = spec.bin_spacing();
    let mut found: Vec<(f64, f64)> = Vec::new();
    for i in 1..m.len() - 1 {
        let f = spec.freqs[i];
        if f < f_min || f > f_max {
            continue;
        }
        if m[i] > m[i - 1] && m[i] >= m[i + 1] {
            let alpha = m[i - 1];
            let beta = m[i];
            let gamma = m[i + 1];
            let denom = alpha - 2.0 * beta + gamma;
            let (df_frac, mag) = if denom.abs() < 1e-300 {
                (0.0, beta)
            } else {
                let p = 0.5 * (alpha - gamma) / denom;
                (p, beta - 0.25 * (alpha - gamma) * p)
            };
            found.push((f + df_frac * df, mag));
        }
    }
    if found.is_empty() {
        return Err(Error::NotAPeak(format!(
            "no local maximum in [{f_min}, {f_max}] Hz"
        )));
    }
    found.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite magnitudes"));
    found.truncate(n_peaks);
    Ok(found)
}

/// Write a time series as CSV: header `t_s,value`, one row per sample, full
/// double precision.
pub fn write_timeseries_csv<W: std::io::Write>(
    w: &mut W,
    series: &TimeSeries,
) -> std::io::Result<()> {
    writeln!(w, "t_s,value")?;
    for (t, x) in series.times().zip(&series.samples) {
        writeln!(w, "{t:.16e},{x:.16e}")?;
    }
    Ok(())
}

/// Write a spectrum as CSV: header `f_hz,magnitude,phase_rad`.
pub fn write_spectrum_csv<W: std::io::Write>(w: &mut W, spec: &Spectrum) -> std::io::Result<()> {
    writeln!(w, "f_hz,magnitude,phase_rad")?;
    for i in 0..spec.freqs.len() {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e}",
            spec.freqs[i], spec.magnitudes[i], spec.phases[i]
        )?;
    }
    Ok(())
}
