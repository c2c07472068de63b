//! Discrete approximations of the continuous Fourier transform
//! `F f(τ) = ∫ f(x) e^{-2πiτx} dx` on centered grids.
//!
//! Samples live at `x_k = (k - n/2)·dx` and spectra at `τ_m = (m - n/2)·dτ`
//! with `dτ = 1/(n·dx)`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Reusable forward/inverse plan for one even length.
#[derive(Clone)]
pub struct CenteredFft {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for CenteredFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CenteredFft").field("n", &self.n).finish()
    }
}

#[inline]
fn alternate(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl CenteredFft {
    /// Plans transforms of length `n`; `n` must be even.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2 && n % 2 == 0, "centered transforms need an even length");
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In place: samples with spacing `dx` become spectrum samples with spacing `1/(n dx)`.
    pub fn forward(&self, data: &mut [Complex64], dx: f64) {
        self.run(data, dx, &self.forward);
    }

    /// In place: spectrum samples with spacing `dtau` become space samples.
    pub fn inverse(&self, data: &mut [Complex64], dtau: f64) {
        self.run(data, dtau, &self.inverse);
    }

    fn run(&self, data: &mut [Complex64], step: f64, plan: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.len(), self.n);
        // e^{∓2πi(k-n/2)(m-n/2)/n} = (-1)^{k+m+n/2} e^{∓2πikm/n}
        for (k, z) in data.iter_mut().enumerate() {
            *z *= alternate(k);
        }
        plan.process(data);
        let c = step * alternate(self.n / 2);
        for (m, z) in data.iter_mut().enumerate() {
            *z *= c * alternate(m);
        }
    }
}

/// Centered transforms of row-major `nx × ny` arrays (x varies fastest).
#[derive(Clone, Debug)]
pub struct CenteredFft2 {
    nx: usize,
    ny: usize,
    rows: CenteredFft,
    cols: CenteredFft,
}

impl CenteredFft2 {
    pub fn new(nx: usize, ny: usize) -> Self {
        Self {
            nx,
            ny,
            rows: CenteredFft::new(nx),
            cols: CenteredFft::new(ny),
        }
    }

    /// Image samples (square pixels of side `dx`) to spectrum samples.
    pub fn forward(&self, data: &mut [Complex64], dx: f64) {
        self.apply(data, dx, true);
    }

    /// Spectrum samples back to image samples with pixel side `dx`.
    pub fn inverse(&self, data: &mut [Complex64], dx: f64) {
        self.apply(data, dx, false);
    }

    fn apply(&self, data: &mut [Complex64], dx: f64, forward: bool) {
        assert_eq!(data.len(), self.nx * self.ny);
        let (row_step, col_step) = if forward {
            (dx, dx)
        } else {
            (1.0 / (self.nx as f64 * dx), 1.0 / (self.ny as f64 * dx))
        };
        for row in data.chunks_mut(self.nx) {
            if forward {
                self.rows.forward(row, row_step);
            } else {
                self.rows.inverse(row, row_step);
            }
        }
        let mut col = vec![Complex64::new(0.0, 0.0); self.ny];
        for ix in 0..self.nx {
            for iy in 0..self.ny {
                col[iy] = data[iy * self.nx + ix];
            }
            if forward {
                self.cols.forward(&mut col, col_step);
            } else {
                self.cols.inverse(&mut col, col_step);
            }
            for iy in 0..self.ny {
                data[iy * self.nx + ix] = col[iy];
            }
        }
    }
}

/// Band-limited upsampling of a periodic sequence by an integer factor.
///
/// The output has `n·factor` samples; sample `factor·k` equals input `k`.
pub fn upsample_periodic(values: &[Complex64], factor: usize) -> Vec<Complex64> {
    let n = values.len();
    if factor <= 1 || n == 0 {
        return values.to_vec();
    }
    let mut planner = FftPlanner::new();
    let mut spec = values.to_vec();
    planner.plan_fft_forward(n).process(&mut spec);
    let big = n * factor;
    let mut padded = vec![Complex64::new(0.0, 0.0); big];
    let half = n / 2;
    if n % 2 == 0 {
        padded[..half].copy_from_slice(&spec[..half]);
        padded[big - half + 1..].copy_from_slice(&spec[half + 1..n]);
        // split the Nyquist bin symmetrically
        padded[half] = spec[half] * 0.5;
        padded[big - half] = spec[half] * 0.5;
    } else {
        padded[..=half].copy_from_slice(&spec[..=half]);
        padded[big - half..].copy_from_slice(&spec[half + 1..n]);
    }
    planner.plan_fft_inverse(big).process(&mut padded);
    let scale = 1.0 / n as f64;
    for z in padded.iter_mut() {
        *z *= scale;
    }
    for (k, v) in values.iter().enumerate() {
        padded[k * factor] = *v;
    }
    padded
}

/// Centered frequency coordinate of bin `m` for a length-`n` grid with spacing `dx`.
#[inline]
pub fn frequency(m: usize, n: usize, dx: f64) -> f64 {
    (m as f64 - (n / 2) as f64) / (n as f64 * dx)
}
