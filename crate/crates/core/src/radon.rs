//! Affine and polar Radon transforms of 2D images, the Riesz multiplier in
//! the offset variable, and Fourier-slice validators.
//!
//! The affine chart parametrizes lines by slope `v` and offset `t`:
//! `ℛf(v,t) = ∫ f(t - v·y, y) dy`, the integral over `{x : n(v)·x = t}`
//! with `n(v) = (1, v)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::fourier::{upsample_periodic, CenteredFft};
use crate::image::{Image2D, ImageGrid};
use crate::interp::{cubic_at, keys_weights, linear_at};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Slopes `v_i = -Vmax + i·dv` (endpoints included) and offsets `t_j = (j - n_t/2)·dt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SinogramGrid {
    pub n_v: usize,
    pub vmax: f64,
    pub n_t: usize,
    pub dt: f64,
}

pub const DEFAULT_VMAX: f64 = 3.0;
pub const DEFAULT_NV: usize = 257;

impl SinogramGrid {
    pub fn new(n_v: usize, vmax: f64, n_t: usize, dt: f64) -> Result<Self> {
        if n_v < 2 {
            return domain(format!("need at least two slopes, got {n_v}"));
        }
        if !(vmax > 0.0 && vmax.is_finite()) {
            return domain(format!("Vmax must be positive, got {vmax}"));
        }
        if n_t < 8 || !n_t.is_power_of_two() {
            return Err(Error::Size(format!("n_t must be a power of two ≥ 8, got {n_t}")));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return domain(format!("offset spacing must be positive, got {dt}"));
        }
        Ok(Self { n_v, vmax, n_t, dt })
    }

    /// Defaults for an image: offsets cover `|t| ≤ 1.1·R·(1 + Vmax)` with
    /// `n_t` the next power of two `≥ 2·nx`.
    pub fn for_image(grid: &ImageGrid, vmax: f64, n_v: usize) -> Result<Self> {
        let half = 1.1 * grid.half_width() * (1.0 + vmax);
        let n_t = (2 * grid.nx.max(grid.ny)).next_power_of_two().max(8);
        Self::new(n_v, vmax, n_t, 2.0 * half / n_t as f64)
    }

    /// Same coverage with `n_t` offsets.
    pub fn with_offsets(&self, n_t: usize) -> Result<Self> {
        let half = self.t_half_range();
        Self::new(self.n_v, self.vmax, n_t, 2.0 * half / n_t as f64)
    }

    pub fn dv(&self) -> f64 {
        2.0 * self.vmax / (self.n_v - 1) as f64
    }

    #[inline]
    pub fn v(&self, i: usize) -> f64 {
        -self.vmax + i as f64 * self.dv()
    }

    #[inline]
    pub fn t(&self, j: usize) -> f64 {
        (j as f64 - (self.n_t / 2) as f64) * self.dt
    }

    /// `n_t·dt/2`.
    pub fn t_half_range(&self) -> f64 {
        0.5 * self.n_t as f64 * self.dt
    }

    /// Spacing of the dual grid in the offset variable.
    pub fn dtau(&self) -> f64 {
        1.0 / (self.n_t as f64 * self.dt)
    }

    /// Trapezoid weight of slope column `i`.
    #[inline]
    pub fn v_weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.n_v {
            0.5 * self.dv()
        } else {
            self.dv()
        }
    }

    pub fn len(&self) -> usize {
        self.n_v * self.n_t
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Sample `i` of a sequence of length `n`, extended linearly past both ends.
fn ghost(i: isize, n: isize, at: &impl Fn(usize) -> Complex64) -> Complex64 {
    if i < 0 {
        let (a, b) = (at(0), at(1.min(n - 1) as usize));
        a + (a - b) * (-i) as f64
    } else if i >= n {
        let (a, b) = (at((n - 1) as usize), at((n - 2).max(0) as usize));
        a + (a - b) * (i - n + 1) as f64
    } else {
        at(i as usize)
    }
}

/// Processing stage of sinogram values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    /// Plain line integrals `ℛf`.
    Raw,
    /// `Qf`: the `|τ|^{1/2}` multiplier has been applied along `t`.
    RieszApplied,
}

/// Samples over the `(v, t)` grid, column-major (`t` fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct Sinogram {
    grid: SinogramGrid,
    values: Vec<Complex64>,
    stage: Stage,
}

impl Sinogram {
    pub fn new(grid: SinogramGrid, values: Vec<Complex64>, stage: Stage) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape { expected: grid.len(), got: values.len() });
        }
        Ok(Self { grid, values, stage })
    }

    pub fn zeros(grid: SinogramGrid, stage: Stage) -> Self {
        Self { grid, values: vec![ZERO; grid.len()], stage }
    }

    pub fn from_fn(grid: SinogramGrid, stage: Stage, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.n_v {
            for j in 0..grid.n_t {
                values.push(f(grid.v(i), grid.t(j)));
            }
        }
        Self { grid, values, stage }
    }

    pub fn grid(&self) -> &SinogramGrid {
        &self.grid
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn column(&self, i: usize) -> &[Complex64] {
        &self.values[i * self.grid.n_t..(i + 1) * self.grid.n_t]
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.n_t + j]
    }

    /// `(∫∫ |·|² dv dt)^{1/2}`, trapezoid in `v`.
    pub fn norm(&self) -> f64 {
        (0..self.grid.n_v)
            .map(|i| self.grid.v_weight(i) * self.column(i).iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .mul_add(self.grid.dt, 0.0)
            .sqrt()
    }

    /// `∫∫ self · conj(other) dv dt`.
    pub fn inner(&self, other: &Sinogram) -> Complex64 {
        (0..self.grid.n_v)
            .map(|i| {
                self.column(i).iter().zip(other.column(i)).map(|(a, b)| a * b.conj()).sum::<Complex64>()
                    * self.grid.v_weight(i)
            })
            .sum::<Complex64>()
            * self.grid.dt
    }

    /// `‖self - reference‖ / ‖reference‖` with the same quadrature as [`Sinogram::norm`].
    pub fn relative_error(&self, reference: &Sinogram) -> f64 {
        let diff = Sinogram {
            grid: self.grid,
            values: self.values.iter().zip(&reference.values).map(|(a, b)| a - b).collect(),
            stage: self.stage,
        };
        let den = reference.norm();
        if den == 0.0 {
            diff.norm()
        } else {
            diff.norm() / den
        }
    }

    pub fn scaled(&self, c: Complex64) -> Sinogram {
        Sinogram { grid: self.grid, values: self.values.iter().map(|z| z * c).collect(), stage: self.stage }
    }

    /// Cubic interpolation in both variables; zero outside the grid.
    pub fn eval(&self, v: f64, t: f64) -> Complex64 {
        let g = &self.grid;
        let pv = (v + g.vmax) / g.dv();
        let pt = t / g.dt + (g.n_t / 2) as f64;
        let base = pv.floor();
        let i0 = base as isize;
        if i0 < -2 || i0 > g.n_v as isize {
            return ZERO;
        }
        let pt_ok = |i: usize| cubic_at(self.column(i), pt);
        let n = g.n_v as isize;
        if pv < -1e-9 || pv > (n - 1) as f64 + 1e-9 {
            return ZERO;
        }
        let w = keys_weights(pv - base);
        let mut acc = ZERO;
        for (k, wk) in w.iter().enumerate() {
            if *wk == 0.0 {
                continue;
            }
            acc += ghost(i0 - 1 + k as isize, n, &pt_ok) * *wk;
        }
        acc
    }

    /// Translates column `v` by `shift(v)` in `t` (band-limited, via the FFT).
    pub fn shift_columns(&self, shift: impl Fn(f64) -> f64 + Sync) -> Sinogram {
        let g = self.grid;
        let fft = CenteredFft::new(g.n_t);
        let dtau = g.dtau();
        let values: Vec<Complex64> = (0..g.n_v)
            .into_par_iter()
            .flat_map_iter(|i| {
                let mut col = self.column(i).to_vec();
                fft.forward(&mut col, g.dt);
                let d = shift(g.v(i));
                for (m, z) in col.iter_mut().enumerate() {
                    let tau = (m as f64 - (g.n_t / 2) as f64) * dtau;
                    *z *= Complex64::from_polar(1.0, -2.0 * PI * tau * d);
                }
                fft.inverse(&mut col, dtau);
                col
            })
            .collect();
        Sinogram { grid: g, values, stage: self.stage }
    }

    /// `v,t,re,im` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("v,t,re,im\n");
        for i in 0..self.grid.n_v {
            for j in 0..self.grid.n_t {
                let z = self.at(i, j);
                out.push_str(&format!("{},{},{},{}\n", self.grid.v(i), self.grid.t(j), z.re, z.im));
            }
        }
        out
    }
}

/// Row interpolation used along each line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKernel {
    Linear,
    Cubic,
}

/// Discretization of the line integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadonOptions {
    /// Band-limited refinement of every image row before interpolation.
    pub oversample: usize,
    pub kernel: RowKernel,
}

impl Default for RadonOptions {
    fn default() -> Self {
        Self { oversample: 8, kernel: RowKernel::Cubic }
    }
}

impl RadonOptions {
    /// Plain linear interpolation of the raw rows.
    pub fn linear() -> Self {
        Self { oversample: 1, kernel: RowKernel::Linear }
    }
}

pub(crate) fn check_coverage(img: &ImageGrid, grid: &SinogramGrid) -> Result<()> {
    let rx = 0.5 * img.nx as f64 * img.dx;
    let ry = 0.5 * img.ny as f64 * img.dx;
    let need = rx + grid.vmax * ry;
    let have = grid.t_half_range() - grid.dt;
    if have < need {
        return Err(Error::Coverage(format!(
            "offset grid reaches |t| ≤ {have:.4} but lines with |v| ≤ {} cross the image up to |t| = {need:.4}",
            grid.vmax
        )));
    }
    Ok(())
}

/// `ℛf(v,t) ≈ dx·Σ_k f(t - v·y_k, y_k)` with rows refined and interpolated per `opts`.
pub fn affine_radon_with(img: &Image2D, grid: &SinogramGrid, opts: RadonOptions) -> Result<Sinogram> {
    let ig = *img.grid();
    check_coverage(&ig, grid)?;
    let p = opts.oversample.max(1);
    let rows: Vec<Vec<Complex64>> = img.values().par_chunks(ig.nx).map(|r| upsample_periodic(r, p)).collect();
    let fine = ig.dx / p as f64;
    let x0 = ig.x(0);
    let step = grid.dt / fine;
    let values: Vec<Complex64> = (0..grid.n_v)
        .into_par_iter()
        .flat_map_iter(|i| {
            let v = grid.v(i);
            let mut col = vec![ZERO; grid.n_t];
            for (iy, row) in rows.iter().enumerate() {
                if row.iter().all(|z| *z == ZERO) {
                    continue;
                }
                let start = (grid.t(0) - v * ig.y(iy) - x0) / fine;
                let last = (row.len() + 2) as f64;
                // samples outside [-2, len + 2) vanish
                let j_lo = ((-2.0 - start) / step).ceil().max(0.0) as usize;
                let j_hi = (((last - start) / step).floor() as isize + 1).clamp(0, grid.n_t as isize) as usize;
                for (j, c) in col.iter_mut().enumerate().take(j_hi).skip(j_lo) {
                    let pos = start + j as f64 * step;
                    *c += match opts.kernel {
                        RowKernel::Cubic => cubic_at(row, pos),
                        RowKernel::Linear => linear_at(row, pos),
                    };
                }
            }
            for z in col.iter_mut() {
                *z *= ig.dx;
            }
            col
        })
        .collect();
    Sinogram::new(*grid, values, Stage::Raw)
}

pub fn affine_radon(img: &Image2D, grid: &SinogramGrid) -> Result<Sinogram> {
    affine_radon_with(img, grid, RadonOptions::default())
}

/// Multiplies every column by `|τ|^{1/2}` in the offset frequency; the DC bin is zeroed.
pub fn apply_riesz(sino: &Sinogram) -> Result<Sinogram> {
    if sino.stage != Stage::Raw {
        return Err(Error::Stage("the Riesz multiplier has already been applied".into()));
    }
    let g = sino.grid;
    let fft = CenteredFft::new(g.n_t);
    let dtau = g.dtau();
    let values: Vec<Complex64> = (0..g.n_v)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut col = sino.column(i).to_vec();
            fft.forward(&mut col, g.dt);
            for (m, z) in col.iter_mut().enumerate() {
                let tau = (m as f64 - (g.n_t / 2) as f64) * dtau;
                *z *= tau.abs().sqrt();
            }
            fft.inverse(&mut col, dtau);
            col
        })
        .collect();
    Sinogram::new(g, values, Stage::RieszApplied)
}

/// Output of [`unitary_q`].
#[derive(Clone, Debug)]
pub struct QTransform {
    pub sinogram: Sinogram,
    /// Share of spectral energy with `|ξ₁|` below two frequency bins.
    pub near_horizontal_energy: f64,
    pub warning: Option<String>,
}

/// Share of near-horizontal energy above which unitarity is flagged as degraded.
pub const NEAR_HORIZONTAL_LIMIT: f64 = 0.10;

pub fn near_horizontal_energy(img: &Image2D) -> f64 {
    let g = img.grid();
    let spec = img.spectrum();
    let (mut near, mut total) = (0.0, 0.0);
    for my in 0..g.ny {
        for mx in 0..g.nx {
            let e = spec[my * g.nx + mx].norm_sqr();
            total += e;
            if (mx as isize - (g.nx / 2) as isize).abs() < 2 {
                near += e;
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        near / total
    }
}

/// `Qf = ℐ ℛf`.
pub fn unitary_q(img: &Image2D, grid: &SinogramGrid) -> Result<QTransform> {
    let share = near_horizontal_energy(img);
    let sinogram = apply_riesz(&affine_radon(img, grid)?)?;
    let warning = (share >= NEAR_HORIZONTAL_LIMIT)
        .then(|| format!("near-horizontal energy {:.1}%; unitarity degraded", 100.0 * share));
    Ok(QTransform { sinogram, near_horizontal_energy: share, warning })
}

/// Options for [`fourier_slice_residual`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliceOptions {
    /// Zero-padding factor of the 2D spectrum used for bilinear interpolation.
    pub padding: usize,
    /// Columns whose reference energy is below this share of the strongest
    /// column are compared against that floor instead of their own norm.
    pub energy_floor: f64,
}

impl Default for SliceOptions {
    fn default() -> Self {
        Self { padding: 8, energy_floor: 1e-2 }
    }
}

/// Per-column comparison between `ℱ_t` of each sinogram column and the slice
/// `ℱf(τ, τv)` (times `|τ|^{1/2}` for Riesz-applied sinograms).
#[derive(Clone, Debug)]
pub struct SliceReport {
    pub per_column: Vec<f64>,
    pub max: f64,
}

pub fn fourier_slice_report(img: &Image2D, sino: &Sinogram, opts: SliceOptions) -> SliceReport {
    let g = sino.grid;
    let (big, spec) = img.padded_spectrum(opts.padding.max(1));
    let dxi1 = 1.0 / (big.nx as f64 * big.dx);
    let dxi2 = 1.0 / (big.ny as f64 * big.dx);
    let bilinear = |xi1: f64, xi2: f64| -> Complex64 {
        let px = xi1 / dxi1 + (big.nx / 2) as f64;
        let py = xi2 / dxi2 + (big.ny / 2) as f64;
        if px < 0.0 || py < 0.0 || px > (big.nx - 1) as f64 || py > (big.ny - 1) as f64 {
            return ZERO;
        }
        let (bx, by) = (px.floor(), py.floor());
        let (ix, iy) = (bx as usize, by as usize);
        let (tx, ty) = (px - bx, py - by);
        let get = |x: usize, y: usize| spec[y.min(big.ny - 1) * big.nx + x.min(big.nx - 1)];
        get(ix, iy) * (1.0 - tx) * (1.0 - ty)
            + get(ix + 1, iy) * tx * (1.0 - ty)
            + get(ix, iy + 1) * (1.0 - tx) * ty
            + get(ix + 1, iy + 1) * tx * ty
    };
    let fft = CenteredFft::new(g.n_t);
    let dtau = g.dtau();
    let riesz = sino.stage == Stage::RieszApplied;
    let cols: Vec<(f64, f64)> = (0..g.n_v)
        .into_par_iter()
        .map(|i| {
            let v = g.v(i);
            let mut col = sino.column(i).to_vec();
            fft.forward(&mut col, g.dt);
            let (mut diff, mut refe) = (0.0, 0.0);
            for (m, z) in col.iter().enumerate() {
                let tau = (m as f64 - (g.n_t / 2) as f64) * dtau;
                let mut r = bilinear(tau, tau * v);
                if riesz {
                    r *= tau.abs().sqrt();
                }
                diff += (z - r).norm_sqr();
                refe += r.norm_sqr();
            }
            (diff.sqrt(), refe.sqrt())
        })
        .collect();
    let strongest = cols.iter().map(|c| c.1).fold(0.0, f64::max);
    let per_column: Vec<f64> = cols
        .iter()
        .map(|(d, r)| {
            let den = r.max(opts.energy_floor * strongest);
            if den == 0.0 {
                *d
            } else {
                d / den
            }
        })
        .collect();
    let max = per_column.iter().cloned().fold(0.0, f64::max);
    SliceReport { per_column, max }
}

/// Worst relative column residual of the Fourier slice theorem.
pub fn fourier_slice_residual(img: &Image2D, sino: &Sinogram) -> f64 {
    fourier_slice_report(img, sino, SliceOptions::default()).max
}

/// Uniform angles `θ_k = θ_0 + k·dθ` and offsets `t_j = (j - n_t/2)·dt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarGrid {
    pub n_theta: usize,
    pub theta0: f64,
    pub dtheta: f64,
    pub n_t: usize,
    pub dt: f64,
}

impl PolarGrid {
    /// `n_theta` angles covering `[0, π)` without repeating `π`.
    pub fn full(n_theta: usize, n_t: usize, dt: f64) -> Self {
        Self { n_theta, theta0: 0.0, dtheta: PI / n_theta as f64, n_t, dt }
    }

    pub fn theta(&self, k: usize) -> f64 {
        self.theta0 + k as f64 * self.dtheta
    }

    pub fn t(&self, j: usize) -> f64 {
        (j as f64 - (self.n_t / 2) as f64) * self.dt
    }

    fn is_full_turn(&self) -> bool {
        self.theta0.abs() < 1e-12 && (self.n_theta as f64 * self.dtheta - PI).abs() < 1e-9
    }
}

/// `ℛ^pol f(θ, t)`: integrals over `{x : η(θ)·x = t}`, `η(θ) = (cos θ, sin θ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarSinogram {
    grid: PolarGrid,
    values: Vec<Complex64>,
}

impl PolarSinogram {
    pub fn new(grid: PolarGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_theta * grid.n_t {
            return Err(Error::Shape { expected: grid.n_theta * grid.n_t, got: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: PolarGrid, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(grid.n_theta * grid.n_t);
        for k in 0..grid.n_theta {
            for j in 0..grid.n_t {
                values.push(f(grid.theta(k), grid.t(j)));
            }
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn row(&self, k: usize) -> &[Complex64] {
        &self.values[k * self.grid.n_t..(k + 1) * self.grid.n_t]
    }

    /// Cubic interpolation; on a full `[0, π)` grid angles wrap with
    /// `ℛ^pol(θ + π, t) = ℛ^pol(θ, -t)`.
    pub fn eval(&self, theta: f64, t: f64) -> Result<Complex64> {
        let g = &self.grid;
        let full = g.is_full_turn();
        let (theta, t) = if full {
            let turns = (theta / PI).floor();
            let sign = if (turns as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            (theta - turns * PI, sign * t)
        } else {
            // ℛ^pol(θ + kπ, t) = ℛ^pol(θ, (-1)^k t)
            let last = g.theta(g.n_theta - 1);
            (-3..=3)
                .map(|k| (theta + k as f64 * PI, if k % 2 == 0 { t } else { -t }))
                .find(|(th, _)| *th >= g.theta0 - 1e-12 && *th <= last + 1e-12)
                .ok_or_else(|| {
                    Error::Coverage(format!(
                        "angle {theta:.6} outside the sampled range [{:.6}, {last:.6}]",
                        g.theta0
                    ))
                })?
        };
        let pos = (theta - g.theta0) / g.dtheta;
        let base = pos.floor();
        let w = keys_weights(pos - base);
        let n = g.n_theta as isize;
        let pt = |tt: f64| tt / g.dt + (g.n_t / 2) as f64;
        let mut acc = ZERO;
        for (k, wk) in w.iter().enumerate() {
            if *wk == 0.0 {
                continue;
            }
            let idx = base as isize - 1 + k as isize;
            acc += if full {
                // wrap across θ = 0 / π with t ↦ -t
                let (j, tt) = if idx < 0 {
                    (idx + n, -t)
                } else if idx >= n {
                    (idx - n, -t)
                } else {
                    (idx, t)
                };
                cubic_at(self.row(j as usize), pt(tt))
            } else {
                ghost(idx, n, &|j| cubic_at(self.row(j), pt(t)))
            } * *wk;
        }
        Ok(acc)
    }

    /// Full Radon transform at a non-unit normal: `ℛf(n, t) = |n|⁻¹ ℛ^pol f(θ(n), t/|n|)`.
    pub fn full_radon(&self, normal: [f64; 2], t: f64) -> Result<Complex64> {
        let r = normal[0].hypot(normal[1]);
        if r == 0.0 {
            return domain("normal vector must be nonzero");
        }
        let theta = normal[1].atan2(normal[0]);
        let theta = if theta < 0.0 { theta + 2.0 * PI } else { theta };
        Ok(self.eval(theta, t / r)? / r)
    }
}

/// `ℛ^aff f(v,t) = (1+v²)^{-1/2} ℛ^pol f(θ(v), t/√(1+v²))`, `θ(v) = arctan v`
/// (taken in `[0, π)` through the symmetry of the polar transform).
pub fn affine_from_polar(p: &PolarSinogram, grid: &SinogramGrid) -> Result<Sinogram> {
    let mut values = Vec::with_capacity(grid.len());
    for i in 0..grid.n_v {
        let v = grid.v(i);
        // ℛ(n(v), t) with n(v) = √(1+v²)·η(arctan v)
        for j in 0..grid.n_t {
            values.push(p.full_radon([1.0, v], grid.t(j))?);
        }
    }
    Sinogram::new(*grid, values, Stage::Raw)
}

/// Inverse chart change: `ℛ^pol f(θ,t) = √(1+v²) ℛ^aff f(v, ±t√(1+v²))` with
/// `v = tan θ`, the sign negative for `θ > π/2`.
pub fn polar_from_affine(sino: &Sinogram, grid: &PolarGrid) -> Result<PolarSinogram> {
    let g = sino.grid;
    let mut values = Vec::with_capacity(grid.n_theta * grid.n_t);
    for k in 0..grid.n_theta {
        let theta = grid.theta(k).rem_euclid(PI);
        let (reduced, sign) = if theta <= PI / 2.0 { (theta, 1.0) } else { (theta - PI, -1.0) };
        if (reduced.abs() - PI / 2.0).abs() < 1e-12 {
            return Err(Error::Coverage("θ = π/2 has no affine slope".into()));
        }
        let v = reduced.tan();
        if v.abs() > g.vmax + 1e-12 {
            return Err(Error::Coverage(format!(
                "θ = {theta:.6} maps to slope {v:.4} beyond Vmax = {}",
                g.vmax
            )));
        }
        let r = (1.0 + v * v).sqrt();
        for j in 0..grid.n_t {
            values.push(sino.eval(v, sign * grid.t(j) * r) * r);
        }
    }
    PolarSinogram::new(*grid, values)
}
