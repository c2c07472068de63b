//! Continuous shearlet transform of the standard 2D group `𝕊^γ`.
//!
//! Atoms are `S_{b,s,a}ψ(x) = |a|^{-(1+γ)/2} ψ(h_{s,a}⁻¹(x - b))` with
//! `h_{s,a} = a·[[1, -s|a|^{γ-1}], [0, |a|^{γ-1}]]`, and the mother is the
//! tensor `Fψ(ξ₁, ξ₂) = Fψ₁(ξ₁)·Fψ₂(ξ₂/ξ₁)`.

mod lattice;
mod mother;
mod pipeline;

pub use lattice::{CoefficientSlice, CoefficientVolume, Lattice, ShearLevel};
pub use mother::{make_mother, MotherShearlet};
pub use pipeline::{
    Intertwiner, INTERTWINE_COVERAGE_LIMIT,
    intertwine_residual, pipeline_exponent, pipeline_transform, pipeline_transform_with, riesz_pipeline_exponent,
    riesz_pipeline_transform, scale_filter, IntertwineReport, PipelineOptions, ScaleFilter,
};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::CenteredFft2;
use crate::image::{Image2D, ImageGrid};

/// Spectrum of `S_{0,s,a}ψ` on the image's dual grid, after checking that it
/// fits inside the Nyquist box.
pub fn atom_spectrum(m: &MotherShearlet, grid: &ImageGrid, s: f64, a: f64) -> Result<Vec<Complex64>> {
    m.check_alias(grid, s, a)?;
    let mut out = Vec::with_capacity(grid.len());
    for my in 0..grid.ny {
        let xi2 = grid.xi2(my);
        for mx in 0..grid.nx {
            out.push(m.atom_spectrum(s, a, grid.xi1(mx), xi2));
        }
    }
    Ok(out)
}

/// `S_{b,s,a}ψ` sampled on `grid` through its spectrum.
pub fn shear_atom(m: &MotherShearlet, grid: &ImageGrid, b: [f64; 2], s: f64, a: f64) -> Result<Image2D> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::Domain(format!("scale must be finite and nonzero, got {a}")));
    }
    let mut spec = atom_spectrum(m, grid, s, a)?;
    for my in 0..grid.ny {
        let xi2 = grid.xi2(my);
        for mx in 0..grid.nx {
            let phase = -2.0 * std::f64::consts::PI * (b[0] * grid.xi1(mx) + b[1] * xi2);
            spec[my * grid.nx + mx] *= Complex64::from_polar(1.0, phase);
        }
    }
    Image2D::from_spectrum(*grid, spec)
}

/// Zero padding of the translation grid before the frequency-domain
/// correlation, so that atoms near the border do not wrap around.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirectOptions {
    pub padding: usize,
}

impl Default for DirectOptions {
    fn default() -> Self {
        Self { padding: 2 }
    }
}

/// `𝒮_ψf(b,s,a) = ⟨f, S_{b,s,a}ψ⟩` for every `b` on the translation grid and
/// every `(s,a)` of the lattice, one inverse FFT per slice on the padded grid.
///
/// The translation grid is `lattice.grid`; it is usually the image grid, or
/// a larger grid at the same spacing on which the image is zero-padded.
pub fn direct_transform(img: &Image2D, m: &MotherShearlet, lattice: &Lattice) -> Result<CoefficientVolume> {
    direct_transform_with(img, m, lattice, DirectOptions::default())
}

pub fn direct_transform_with(
    img: &Image2D,
    m: &MotherShearlet,
    lattice: &Lattice,
    opts: DirectOptions,
) -> Result<CoefficientVolume> {
    let grid = lattice.grid;
    let padded = img.padded_to(grid)?.padded(opts.padding);
    let big = *padded.grid();
    let spec = padded.spectrum();
    let fft = CenteredFft2::new(big.nx, big.ny);
    let slices: Result<Vec<CoefficientSlice>> = lattice
        .points()
        .into_par_iter()
        .map(|(s, a, weight)| {
            let atom = atom_spectrum(m, &big, s, a)?;
            let mut v: Vec<Complex64> = spec.iter().zip(&atom).map(|(f, p)| f * p.conj()).collect();
            fft.inverse(&mut v, big.dx);
            let values = Image2D::new(big, v)?.cropped(grid)?.into_values();
            Ok(CoefficientSlice { s, a, weight, values })
        })
        .collect();
    Ok(CoefficientVolume::new(lattice.clone(), slices?))
}

/// Partial sums formed in parallel by [`reconstruct_with`].
const RECONSTRUCT_PARTIALS: usize = 8;

/// `f ≈ C_ψ⁻¹ Σ 𝒮_ψf(b,s,a) S_{b,s,a}ψ · Δb Δs Δa/|a|³`, summed per slice in
/// the frequency domain on the padded grid and cropped back to the lattice's
/// translation grid.
pub fn reconstruct(vol: &CoefficientVolume, m: &MotherShearlet) -> Result<Image2D> {
    reconstruct_with(vol, m, DirectOptions::default())
}

pub fn reconstruct_with(vol: &CoefficientVolume, m: &MotherShearlet, opts: DirectOptions) -> Result<Image2D> {
    let grid = vol.lattice().grid;
    if !(m.c_psi() > 0.0) {
        return Err(Error::Admissibility("reconstruction needs a positive admissibility constant".into()));
    }
    let p = opts.padding.max(1);
    let big = ImageGrid { nx: grid.nx * p, ny: grid.ny * p, dx: grid.dx };
    let fft = CenteredFft2::new(big.nx, big.ny);
    let dx2 = grid.dx * grid.dx;
    // a fixed number of ordered partial sums keeps the result independent of
    // the thread count
    let chunk = vol.slices().len().div_ceil(RECONSTRUCT_PARTIALS).max(1);
    let partials = vol
        .slices()
        .par_chunks(chunk)
        .map(|slices| -> Result<Vec<Complex64>> {
            let mut acc = vec![Complex64::new(0.0, 0.0); big.len()];
            for sl in slices {
                let atom = atom_spectrum(m, &big, sl.s, sl.a)?;
                let mut c = Image2D::new(grid, sl.values.clone())?.padded(p).into_values();
                fft.forward(&mut c, grid.dx);
                // the forward transform already carries Δb = dx²
                let w = sl.weight / dx2;
                for ((z, x), q) in acc.iter_mut().zip(&c).zip(&atom) {
                    *z += x * q * w;
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut acc = vec![Complex64::new(0.0, 0.0); big.len()];
    for part in partials {
        for (a, b) in acc.iter_mut().zip(part) {
            *a += b;
        }
    }
    let inv = 1.0 / m.c_psi();
    for z in acc.iter_mut() {
        *z *= inv;
    }
    Image2D::from_spectrum(big, acc)?.cropped(grid)
}
