//! Interpolation on uniform grids.
//!
//! Band-limited data is first refined by FFT zero padding and then read off
//! with the Keys cubic kernel; at refinement factor 8 the kernel error is
//! below 1e-4 for content up to a quarter of the original Nyquist rate.

use num_complex::Complex64;

use crate::fourier::upsample_periodic;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Keys cubic convolution weights (a = -1/2) for fractional offset `t ∈ [0,1)`,
/// applied to samples at offsets -1, 0, 1, 2.
#[inline]
pub fn keys_weights(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        -0.5 * t3 + t2 - 0.5 * t,
        1.5 * t3 - 2.5 * t2 + 1.0,
        -1.5 * t3 + 2.0 * t2 + 0.5 * t,
        0.5 * t3 - 0.5 * t2,
    ]
}

/// Cubic interpolation at fractional index `pos`; samples outside `values` are 0.
#[inline]
pub fn cubic_at(values: &[Complex64], pos: f64) -> Complex64 {
    let n = values.len() as isize;
    let base = pos.floor();
    let i = base as isize;
    if i < -2 || i > n {
        return ZERO;
    }
    let w = keys_weights(pos - base);
    let mut acc = ZERO;
    for (k, wk) in w.iter().enumerate() {
        let j = i - 1 + k as isize;
        if j >= 0 && j < n {
            acc += values[j as usize] * *wk;
        }
    }
    acc
}

/// Linear interpolation at fractional index `pos`; samples outside are 0.
#[inline]
pub fn linear_at(values: &[Complex64], pos: f64) -> Complex64 {
    let n = values.len() as isize;
    let base = pos.floor();
    let i = base as isize;
    let t = pos - base;
    let get = |j: isize| if j >= 0 && j < n { values[j as usize] } else { ZERO };
    get(i) * (1.0 - t) + get(i + 1) * t
}

/// A band-limited sequence on the uniform grid `origin + k·step`, refined for
/// cubic evaluation at arbitrary positions.
#[derive(Clone, Debug)]
pub struct Refined1d {
    origin: f64,
    fine_step: f64,
    fine: Vec<Complex64>,
}

impl Refined1d {
    pub fn new(values: &[Complex64], origin: f64, step: f64, factor: usize) -> Self {
        let factor = factor.max(1);
        Self {
            origin,
            fine_step: step / factor as f64,
            fine: upsample_periodic(values, factor),
        }
    }

    /// Wraps already-fine samples without refinement.
    pub fn from_fine(fine: Vec<Complex64>, origin: f64, fine_step: f64) -> Self {
        Self { origin, fine_step, fine }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> Complex64 {
        cubic_at(&self.fine, (x - self.origin) / self.fine_step)
    }

    /// Position of `x` in fine-sample units.
    #[inline]
    pub fn position(&self, x: f64) -> f64 {
        (x - self.origin) / self.fine_step
    }

    pub fn fine(&self) -> &[Complex64] {
        &self.fine
    }

    pub fn fine_step(&self) -> f64 {
        self.fine_step
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }
}

/// Band-limited 2D array on a uniform grid, refined along both axes and
/// evaluated with the separable Keys kernel. Samples outside the grid are 0.
#[derive(Clone, Debug)]
pub struct Refined2d {
    origin: [f64; 2],
    fine_step: [f64; 2],
    n0: usize,
    n1: usize,
    // row-major, axis 1 fastest
    fine: Vec<Complex64>,
}

impl Refined2d {
    /// `values[i0 * n1 + i1]` sits at `(origin[0] + i0 step[0], origin[1] + i1 step[1])`.
    pub fn new(
        values: &[Complex64],
        n0: usize,
        n1: usize,
        origin: [f64; 2],
        step: [f64; 2],
        factor: [usize; 2],
    ) -> Self {
        assert_eq!(values.len(), n0 * n1);
        let f0 = factor[0].max(1);
        let f1 = factor[1].max(1);
        let m1 = n1 * f1;
        let mut along1 = Vec::with_capacity(n0 * m1);
        for row in values.chunks(n1) {
            along1.extend(upsample_periodic(row, f1));
        }
        let m0 = n0 * f0;
        let mut fine = vec![ZERO; m0 * m1];
        let mut col = vec![ZERO; n0];
        for j in 0..m1 {
            for i in 0..n0 {
                col[i] = along1[i * m1 + j];
            }
            let up = upsample_periodic(&col, f0);
            for (i, z) in up.into_iter().enumerate() {
                fine[i * m1 + j] = z;
            }
        }
        // keep the original samples bit-exact at coarse positions
        for i in 0..n0 {
            for k in 0..n1 {
                fine[i * f0 * m1 + k * f1] = values[i * n1 + k];
            }
        }
        Self {
            origin,
            fine_step: [step[0] / f0 as f64, step[1] / f1 as f64],
            n0: m0,
            n1: m1,
            fine,
        }
    }

    pub fn eval(&self, x0: f64, x1: f64) -> Complex64 {
        let p0 = (x0 - self.origin[0]) / self.fine_step[0];
        let p1 = (x1 - self.origin[1]) / self.fine_step[1];
        let b0 = p0.floor();
        let b1 = p1.floor();
        let i0 = b0 as isize;
        let i1 = b1 as isize;
        if i0 < -2 || i0 > self.n0 as isize || i1 < -2 || i1 > self.n1 as isize {
            return ZERO;
        }
        let t0 = p0 - b0;
        let t1 = p1 - b1;
        // exact grid hits return the stored sample
        if t0 == 0.0 && t1 == 0.0 {
            return if i0 >= 0 && i1 >= 0 && (i0 as usize) < self.n0 && (i1 as usize) < self.n1 {
                self.fine[i0 as usize * self.n1 + i1 as usize]
            } else {
                ZERO
            };
        }
        let w0 = keys_weights(t0);
        let w1 = keys_weights(t1);
        let mut acc = ZERO;
        for (a, wa) in w0.iter().enumerate() {
            let r = i0 - 1 + a as isize;
            if r < 0 || r >= self.n0 as isize {
                continue;
            }
            let row = &self.fine[r as usize * self.n1..(r as usize + 1) * self.n1];
            let mut inner = ZERO;
            for (b, wb) in w1.iter().enumerate() {
                let c = i1 - 1 + b as isize;
                if c >= 0 && c < self.n1 as isize {
                    inner += row[c as usize] * *wb;
                }
            }
            acc += inner * *wa;
        }
        acc
    }
}
