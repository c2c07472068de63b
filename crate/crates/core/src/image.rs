//! Sampled 2D fields on centered square-pixel grids.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::fourier::CenteredFft2;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `nx × ny` samples at `((ix - nx/2)·dx, (iy - ny/2)·dx)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImageGrid {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
}

impl ImageGrid {
    pub fn new(nx: usize, ny: usize, dx: f64) -> Result<Self> {
        for n in [nx, ny] {
            if n < 2 || !n.is_power_of_two() {
                return Err(Error::Size(format!("image sides must be powers of two ≥ 2, got {nx}×{ny}")));
            }
        }
        if !(dx > 0.0 && dx.is_finite()) {
            return domain(format!("pixel size must be positive, got {dx}"));
        }
        Ok(Self { nx, ny, dx })
    }

    pub fn square(n: usize, dx: f64) -> Result<Self> {
        Self::new(n, n, dx)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn x(&self, ix: usize) -> f64 {
        (ix as f64 - (self.nx / 2) as f64) * self.dx
    }

    #[inline]
    pub fn y(&self, iy: usize) -> f64 {
        (iy as f64 - (self.ny / 2) as f64) * self.dx
    }

    /// Frequency of spectral column `mx`.
    #[inline]
    pub fn xi1(&self, mx: usize) -> f64 {
        (mx as f64 - (self.nx / 2) as f64) / (self.nx as f64 * self.dx)
    }

    #[inline]
    pub fn xi2(&self, my: usize) -> f64 {
        (my as f64 - (self.ny / 2) as f64) / (self.ny as f64 * self.dx)
    }

    /// `1/(2 dx)`.
    pub fn nyquist(&self) -> f64 {
        0.5 / self.dx
    }

    /// Half of the larger side length.
    pub fn half_width(&self) -> f64 {
        0.5 * self.nx.max(self.ny) as f64 * self.dx
    }
}

/// A complex field on the plane that can be evaluated anywhere.
pub trait Field2D: Sync {
    fn value(&self, x: f64, y: f64) -> Complex64;

    /// Closed-form Fourier transform, when known.
    fn spectrum(&self, _xi1: f64, _xi2: f64) -> Option<Complex64> {
        None
    }
}

/// Samples of a field on an [`ImageGrid`], stored row-major (x fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct Image2D {
    grid: ImageGrid,
    values: Vec<Complex64>,
    band_limit: Option<f64>,
}

impl Image2D {
    pub fn new(grid: ImageGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape { expected: grid.len(), got: values.len() });
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return domain("image samples must be finite");
        }
        Ok(Self { grid, values, band_limit: None })
    }

    pub fn zeros(grid: ImageGrid) -> Self {
        Self { grid, values: vec![ZERO; grid.len()], band_limit: None }
    }

    pub fn from_real(grid: ImageGrid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|v| Complex64::new(*v, 0.0)).collect())
    }

    /// Samples `field` at every grid point.
    pub fn sample(grid: ImageGrid, field: &dyn Field2D) -> Self {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|k| field.value(grid.x(k % grid.nx), grid.y(k / grid.nx)))
            .collect();
        Self { grid, values, band_limit: None }
    }

    /// Declares that all spectral energy lies within `fraction · Nyquist`.
    pub fn with_band_limit(mut self, fraction: f64) -> Self {
        self.band_limit = Some(fraction);
        self
    }

    pub fn grid(&self) -> &ImageGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn band_limit(&self) -> Option<f64> {
        self.band_limit
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[iy * self.grid.nx + ix]
    }

    /// `‖f‖_{L²}` by the rectangle rule.
    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt() * self.grid.dx
    }

    /// `⟨f, g⟩ = ∫ f conj(g)`.
    pub fn inner(&self, other: &Image2D) -> Complex64 {
        let dx2 = self.grid.dx * self.grid.dx;
        self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum::<Complex64>() * dx2
    }

    /// `‖self - reference‖ / ‖reference‖`.
    pub fn relative_error(&self, reference: &Image2D) -> f64 {
        let num: f64 = self.values.iter().zip(&reference.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = reference.values.iter().map(|z| z.norm_sqr()).sum();
        if den == 0.0 {
            num.sqrt()
        } else {
            (num / den).sqrt()
        }
    }

    pub fn scaled(&self, c: Complex64) -> Image2D {
        Image2D { grid: self.grid, values: self.values.iter().map(|z| z * c).collect(), band_limit: self.band_limit }
    }

    pub fn added(&self, other: &Image2D) -> Image2D {
        Image2D {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            band_limit: None,
        }
    }

    /// Centered continuous-FT approximation on the dual grid.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut v = self.values.clone();
        CenteredFft2::new(self.grid.nx, self.grid.ny).forward(&mut v, self.grid.dx);
        v
    }

    /// Inverse of [`Image2D::spectrum`].
    pub fn from_spectrum(grid: ImageGrid, mut spectrum: Vec<Complex64>) -> Result<Self> {
        if spectrum.len() != grid.len() {
            return Err(Error::Shape { expected: grid.len(), got: spectrum.len() });
        }
        CenteredFft2::new(grid.nx, grid.ny).inverse(&mut spectrum, grid.dx);
        Ok(Self { grid, values: spectrum, band_limit: None })
    }

    /// Zero-padded spectrum on a grid `factor` times finer in frequency.
    pub fn padded_spectrum(&self, factor: usize) -> (ImageGrid, Vec<Complex64>) {
        let big = self.padded(factor);
        (big.grid, big.spectrum())
    }

    /// Centered in a zero image `factor` times larger along each axis.
    pub fn padded(&self, factor: usize) -> Image2D {
        let g = self.grid;
        let big = ImageGrid { nx: g.nx * factor.max(1), ny: g.ny * factor.max(1), dx: g.dx };
        self.padded_to(big).expect("grid grows by an integer factor")
    }

    /// Centered in a zero image on `grid`, which must contain this one.
    pub fn padded_to(&self, grid: ImageGrid) -> Result<Image2D> {
        let g = self.grid;
        if grid.nx < g.nx || grid.ny < g.ny || grid.dx != g.dx {
            return Err(Error::Domain("padding target must contain the image at the same spacing".into()));
        }
        let mut v = vec![ZERO; grid.len()];
        let ox = (grid.nx - g.nx) / 2;
        let oy = (grid.ny - g.ny) / 2;
        for iy in 0..g.ny {
            let src = &self.values[iy * g.nx..(iy + 1) * g.nx];
            v[(iy + oy) * grid.nx + ox..(iy + oy) * grid.nx + ox + g.nx].copy_from_slice(src);
        }
        Ok(Image2D { grid, values: v, band_limit: self.band_limit })
    }

    /// Central `grid.nx × grid.ny` window; inverse of [`Image2D::padded`].
    pub fn cropped(&self, grid: ImageGrid) -> Result<Image2D> {
        let g = self.grid;
        if grid.nx > g.nx || grid.ny > g.ny || grid.dx != g.dx {
            return Err(Error::Domain("crop window must fit inside the image at the same spacing".into()));
        }
        let ox = (g.nx - grid.nx) / 2;
        let oy = (g.ny - grid.ny) / 2;
        let mut v = Vec::with_capacity(grid.len());
        for iy in 0..grid.ny {
            v.extend_from_slice(&self.values[(iy + oy) * g.nx + ox..(iy + oy) * g.nx + ox + grid.nx]);
        }
        Ok(Image2D { grid, values: v, band_limit: None })
    }

    /// Fraction of spectral energy outside the disc of radius `fraction · Nyquist`.
    pub fn energy_outside(&self, fraction: f64) -> f64 {
        let spec = self.spectrum();
        let r = fraction * self.grid.nyquist();
        let (mut out, mut total) = (0.0, 0.0);
        for my in 0..self.grid.ny {
            for mx in 0..self.grid.nx {
                let e = spec[my * self.grid.nx + mx].norm_sqr();
                total += e;
                if self.grid.xi1(mx).hypot(self.grid.xi2(my)) > r {
                    out += e;
                }
            }
        }
        if total == 0.0 {
            0.0
        } else {
            out / total
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Gauss;
    impl Field2D for Gauss {
        fn value(&self, x: f64, y: f64) -> Complex64 {
            Complex64::new((-std::f64::consts::PI * (x * x + y * y)).exp(), 0.0)
        }
    }

    #[test]
    fn gaussian_norm_and_spectrum() {
        let g = ImageGrid::square(64, 1.0 / 8.0).unwrap();
        let img = Image2D::sample(g, &Gauss);
        // ‖e^{-π|x|²}‖² = 1/2
        assert!((img.norm() - 0.5f64.sqrt()).abs() < 1e-12);
        let s = img.spectrum();
        for (my, mx) in [(32, 32), (33, 30), (40, 35)] {
            let (a, b) = (g.xi1(mx), g.xi2(my));
            let expect = (-std::f64::consts::PI * (a * a + b * b)).exp();
            assert!((s[my * 64 + mx].re - expect).abs() < 1e-12);
        }
        let back = Image2D::from_spectrum(g, s).unwrap();
        assert!(back.relative_error(&img) < 1e-13);
    }

    #[test]
    fn grid_validation() {
        assert!(ImageGrid::new(6, 8, 1.0).is_err());
        assert!(ImageGrid::new(8, 8, 0.0).is_err());
        assert!(Image2D::new(ImageGrid::square(4, 1.0).unwrap(), vec![ZERO; 3]).is_err());
    }

    #[test]
    fn padded_spectrum_interleaves_original() {
        let g = ImageGrid::square(16, 0.25).unwrap();
        let img = Image2D::sample(g, &Gauss);
        let s = img.spectrum();
        let (big, p) = img.padded_spectrum(4);
        // bin m of the coarse grid is bin 4(m - n/2) + 4n/2 of the fine grid
        for (my, mx) in [(8, 8), (5, 11)] {
            let fy = 4 * my;
            let fx = 4 * mx;
            assert!((p[fy * big.nx + fx] - s[my * 16 + mx]).norm() < 1e-12);
        }
    }
}
