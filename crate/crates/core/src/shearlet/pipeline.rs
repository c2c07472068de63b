use num_complex::Complex64;
use rayon::prelude::*;

use super::{CoefficientSlice, CoefficientVolume, Lattice, MotherShearlet};
use crate::error::{Error, Result};
use crate::fourier::CenteredFft;
use crate::image::{Field2D, Image2D, ImageGrid};
use crate::interp::{cubic_at, Refined2d};
use crate::phantom::ShearletAction;
use crate::radon::{check_coverage, unitary_q, Sinogram, SinogramGrid, Stage};
use crate::signal::{Spectrum, Wavelet1D};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Power of `|a|` in front of the raw-sinogram formula in dimension `d`:
/// `(λ_D + 1 - d)/2` with `λ_D = (d-1)(γ-1)`, i.e. `(d-1)(γ-2)/2`.
pub fn pipeline_exponent(d: usize, gamma: f64) -> f64 {
    (d as f64 - 1.0) * (gamma - 2.0) / 2.0
}

/// Power of `|a|` in front of the formula on a Riesz-applied sinogram: `(d-1)(γ-1)/2`.
pub fn riesz_pipeline_exponent(d: usize, gamma: f64) -> f64 {
    (d as f64 - 1.0) * (gamma - 1.0) / 2.0
}

/// Refinement of the per-column wavelet transforms before they are read at
/// `t = b₁ + v·b₂`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineOptions {
    pub upsample: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { upsample: 8 }
    }
}

/// `Φ_a(u) = conj(φ₂(-u/|a|^{1-γ}))`, the slope filter applied across columns.
#[derive(Clone, Debug)]
pub struct ScaleFilter {
    pub a: f64,
    /// `|a|^{1-γ}`.
    pub width: f64,
    phi2: Spectrum,
}

pub fn scale_filter(m: &MotherShearlet, a: f64) -> Result<ScaleFilter> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::Domain(format!("scale must be finite and nonzero, got {a}")));
    }
    Ok(ScaleFilter { a, width: m.slope_scale(a), phi2: m.psi2().clone() })
}

impl ScaleFilter {
    pub fn eval(&self, u: f64) -> Complex64 {
        self.phi2.eval(-u / self.width).conj()
    }

    /// Half-width of the support in `u`.
    pub fn radius(&self) -> f64 {
        self.phi2.radius().unwrap_or(f64::INFINITY) * self.width
    }
}

/// `𝒮_ψf` from the raw affine sinogram `ℛf`:
/// `|a|^{(γ-2)/2} ∫ W_{χ₁}(ℛf(v,·))(b₁ + v b₂, a) Φ_a(s - v) dv`.
pub fn pipeline_transform(sino: &Sinogram, m: &MotherShearlet, lattice: &Lattice) -> Result<CoefficientVolume> {
    pipeline_transform_with(sino, m, lattice, PipelineOptions::default())
}

pub fn pipeline_transform_with(
    sino: &Sinogram,
    m: &MotherShearlet,
    lattice: &Lattice,
    opts: PipelineOptions,
) -> Result<CoefficientVolume> {
    if sino.stage() != Stage::Raw {
        return Err(Error::Stage("pipeline_transform expects a raw sinogram; use riesz_pipeline_transform".into()));
    }
    radon_domain(sino, m.chi1(), pipeline_exponent(2, m.gamma()), m, lattice, opts)
}

/// `𝒮_ψf` from `Qf = ℐℛf`:
/// `|a|^{(γ-1)/2} ∫ W_{φ₁}(Qf(v,·))(b₁ + v b₂, a) Φ_a(s - v) dv`.
pub fn riesz_pipeline_transform(sino: &Sinogram, m: &MotherShearlet, lattice: &Lattice) -> Result<CoefficientVolume> {
    if sino.stage() != Stage::RieszApplied {
        return Err(Error::Stage("riesz_pipeline_transform expects a Riesz-applied sinogram".into()));
    }
    radon_domain(sino, m.phi1(), riesz_pipeline_exponent(2, m.gamma()), m, lattice, PipelineOptions::default())
}

fn radon_domain(
    sino: &Sinogram,
    w: &Wavelet1D,
    exponent: f64,
    m: &MotherShearlet,
    lattice: &Lattice,
    opts: PipelineOptions,
) -> Result<CoefficientVolume> {
    let sg = *sino.grid();
    let ig = lattice.grid;
    check_coverage(&ig, &sg)?;
    for lv in &lattice.levels {
        let smax = lv.shears.iter().fold(0.0f64, |x, s| x.max(s.abs()));
        let need = smax + m.phi2_radius() * m.slope_scale(lv.a);
        if need > sg.vmax + 1e-12 {
            return Err(Error::Coverage(format!(
                "scale a = {}: shears up to {smax} need slopes |v| ≤ {need:.4}, sinogram has Vmax = {}",
                lv.a, sg.vmax
            )));
        }
    }
    let p = opts.upsample.max(1);
    let n_fine = sg.n_t * p;
    let fft = CenteredFft::new(sg.n_t);
    let fft_fine = CenteredFft::new(n_fine);
    let dtau = sg.dtau();
    let fine_dt = sg.dt / p as f64;
    let t0 = -((n_fine / 2) as f64) * fine_dt;
    let spectra: Vec<Vec<Complex64>> = (0..sg.n_v)
        .into_par_iter()
        .map(|i| {
            let mut col = sino.column(i).to_vec();
            fft.forward(&mut col, sg.dt);
            col
        })
        .collect();
    let points = lattice.points();
    let mut slices = Vec::with_capacity(points.len());
    let mut cursor = 0;
    for lv in &lattice.levels {
        let a = lv.a;
        let filter = scale_filter(m, a)?;
        let pref = a.abs().powf(exponent);
        // coefficient of column i for shear k; columns outside the filter support are skipped
        let coeffs: Vec<Vec<(usize, Complex64)>> = lv
            .shears
            .iter()
            .map(|&s| {
                (0..sg.n_v)
                    .filter_map(|i| {
                        let c = filter.eval(s - sg.v(i)) * (sg.v_weight(i) * pref);
                        (c != ZERO).then_some((i, c))
                    })
                    .collect()
            })
            .collect();
        let mut used = vec![false; sg.n_v];
        for list in &coeffs {
            for (i, _) in list {
                used[*i] = true;
            }
        }
        let sa = a.abs().sqrt();
        let fine: Vec<Option<Vec<Complex64>>> = (0..sg.n_v)
            .into_par_iter()
            .map(|i| {
                if !used[i] {
                    return None;
                }
                let mut buf = vec![ZERO; n_fine];
                let off = (n_fine - sg.n_t) / 2;
                for (mm, z) in spectra[i].iter().enumerate() {
                    let tau = (mm as f64 - (sg.n_t / 2) as f64) * dtau;
                    buf[off + mm] = z * w.eval(a * tau).conj() * sa;
                }
                fft_fine.inverse(&mut buf, dtau);
                Some(buf)
            })
            .collect();
        let rows: Vec<Vec<Vec<Complex64>>> = (0..ig.ny)
            .into_par_iter()
            .map(|iy| {
                let y = ig.y(iy);
                let mut out = vec![vec![ZERO; ig.nx]; lv.shears.len()];
                let mut h = vec![ZERO; ig.nx];
                let mut cache: Vec<Option<Vec<Complex64>>> = vec![None; sg.n_v];
                for (k, list) in coeffs.iter().enumerate() {
                    for &(i, c) in list {
                        let hv = cache[i].get_or_insert_with(|| {
                            let g = fine[i].as_ref().expect("column marked as used");
                            let v = sg.v(i);
                            (0..ig.nx).map(|ix| cubic_at(g, (ig.x(ix) + v * y - t0) / fine_dt)).collect()
                        });
                        h.copy_from_slice(hv);
                        for (o, z) in out[k].iter_mut().zip(&h) {
                            *o += z * c;
                        }
                    }
                }
                out
            })
            .collect();
        for (k, &s) in lv.shears.iter().enumerate() {
            let mut values = Vec::with_capacity(ig.len());
            for row in &rows {
                values.extend_from_slice(&row[k]);
            }
            let (ps, pa, weight) = points[cursor];
            debug_assert!(ps == s && pa == a);
            cursor += 1;
            slices.push(CoefficientSlice { s, a, weight, values });
        }
    }
    Ok(CoefficientVolume::new(lattice.clone(), slices))
}

/// Outcome of [`intertwine_residual`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntertwineReport {
    /// `‖Q S f - (V⊗W) Qf‖ / ‖Q S f‖`.
    pub residual: f64,
    /// Share of `‖Q S f‖²` whose right-hand side falls outside the sinogram grid.
    pub coverage_loss: f64,
}

/// Energy share above which a missing right-hand side is a coverage error.
pub const INTERTWINE_COVERAGE_LIMIT: f64 = 1e-4;

/// Precomputed `Qf` for checking `Q S_{b,s,a} = (V_{s,a} ⊗ W_{n(v)·b, a}) Q`
/// at many group elements.
pub struct Intertwiner<'a> {
    field: &'a dyn Field2D,
    image: ImageGrid,
    grid: SinogramGrid,
    gamma: f64,
    qf: Refined2d,
}

impl<'a> Intertwiner<'a> {
    pub fn new(field: &'a dyn Field2D, image: ImageGrid, grid: SinogramGrid, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::Domain(format!("γ must lie in (0, 1), got {gamma}")));
        }
        let q = unitary_q(&Image2D::sample(image, field), &grid)?.sinogram;
        let qf = Refined2d::new(q.values(), grid.n_v, grid.n_t, [-grid.vmax, grid.t(0)], [grid.dv(), grid.dt], [8, 4]);
        Ok(Self { field, image, grid, gamma, qf })
    }

    /// Residual against `|a|^{(γ-1)/2}·|a|^{-1/2}·Qf((v-s)/|a|^{1-γ}, (t - b₁ - v b₂)/a)`.
    pub fn residual(&self, b: [f64; 2], s: f64, a: f64) -> Result<IntertwineReport> {
        self.residual_with(b, s, a, (self.gamma - 2.0) / 2.0)
    }

    /// Same comparison with the right-hand side scaled by `|a|^{exponent}`
    /// instead of `|a|^{(γ-2)/2}`.
    pub fn residual_with(&self, b: [f64; 2], s: f64, a: f64, exponent: f64) -> Result<IntertwineReport> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::Domain(format!("scale must be finite and nonzero, got {a}")));
        }
        let g = &self.grid;
        let moved = ShearletAction { field: self.field, b, s, a, gamma: self.gamma };
        let lhs = unitary_q(&Image2D::sample(self.image, &moved), g)?.sinogram;
        let width = a.abs().powf(1.0 - self.gamma);
        let pref = a.abs().powf(exponent);
        let t_lo = g.t(0);
        let t_hi = g.t(g.n_t - 1);
        let parts: Vec<(f64, f64, f64)> = (0..g.n_v)
            .into_par_iter()
            .map(|i| {
                let v = g.v(i);
                let vw = g.v_weight(i);
                let vp = (v - s) / width;
                let v_in = vp.abs() <= g.vmax + 1e-12;
                let (mut num, mut den, mut lost) = (0.0, 0.0, 0.0);
                for (j, l) in lhs.column(i).iter().enumerate() {
                    let tp = (g.t(j) - b[0] - v * b[1]) / a;
                    let inside = v_in && tp >= t_lo && tp <= t_hi;
                    let r = if inside { self.qf.eval(vp, tp) * pref } else { ZERO };
                    if !inside {
                        lost += vw * l.norm_sqr();
                    }
                    num += vw * (l - r).norm_sqr();
                    den += vw * l.norm_sqr();
                }
                (num, den, lost)
            })
            .collect();
        let (num, den, lost) = parts.iter().fold((0.0, 0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1, x.2 + y.2));
        if den == 0.0 {
            return Ok(IntertwineReport { residual: num.sqrt(), coverage_loss: 0.0 });
        }
        let coverage_loss = lost / den;
        if coverage_loss > INTERTWINE_COVERAGE_LIMIT {
            return Err(Error::Coverage(format!(
                "(s, a) = ({s}, {a}) maps {:.2e} of the energy outside the sinogram grid",
                coverage_loss
            )));
        }
        Ok(IntertwineReport { residual: (num / den).sqrt(), coverage_loss })
    }
}

/// One-off intertwining check; see [`Intertwiner`] for repeated use.
pub fn intertwine_residual(
    field: &dyn Field2D,
    image: ImageGrid,
    grid: SinogramGrid,
    gamma: f64,
    b: [f64; 2],
    s: f64,
    a: f64,
) -> Result<IntertwineReport> {
    Intertwiner::new(field, image, grid, gamma)?.residual(b, s, a)
}
