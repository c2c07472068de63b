//! Test fields with closed-form values and spectra.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Result};
use crate::image::{Field2D, Image2D, ImageGrid};

/// Isotropic Gaussian `e^{-π|x|²/σ²}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gaussian {
    pub sigma: f64,
}

impl Default for Gaussian {
    fn default() -> Self {
        Self { sigma: 1.0 }
    }
}

impl Gaussian {
    /// `ℛf(v,t) = σ (1+v²)^{-1/2} e^{-πt²/(σ²(1+v²))}`.
    pub fn radon(&self, v: f64, t: f64) -> f64 {
        let s = 1.0 + v * v;
        self.sigma / s.sqrt() * (-PI * t * t / (self.sigma * self.sigma * s)).exp()
    }
}

impl Field2D for Gaussian {
    fn value(&self, x: f64, y: f64) -> Complex64 {
        Complex64::new((-PI * (x * x + y * y) / (self.sigma * self.sigma)).exp(), 0.0)
    }

    fn spectrum(&self, xi1: f64, xi2: f64) -> Option<Complex64> {
        let s2 = self.sigma * self.sigma;
        Some(Complex64::new(s2 * (-PI * s2 * (xi1 * xi1 + xi2 * xi2)).exp(), 0.0))
    }
}

/// One real Gabor atom `A e^{-π|x-c|²/w²} cos(2π k·(x-c) + φ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaborAtom {
    pub amplitude: f64,
    pub center: [f64; 2],
    pub frequency: [f64; 2],
    pub phase: f64,
    pub width: f64,
}

impl GaborAtom {
    fn value(&self, x: f64, y: f64) -> f64 {
        let (dx, dy) = (x - self.center[0], y - self.center[1]);
        let env = (-PI * (dx * dx + dy * dy) / (self.width * self.width)).exp();
        self.amplitude * env * (2.0 * PI * (self.frequency[0] * dx + self.frequency[1] * dy) + self.phase).cos()
    }

    fn spectrum(&self, xi1: f64, xi2: f64) -> Complex64 {
        let w2 = self.width * self.width;
        let g = |a: f64, b: f64| w2 * (-PI * w2 * (a * a + b * b)).exp();
        let [k1, k2] = self.frequency;
        let lobes = Complex64::from_polar(g(xi1 - k1, xi2 - k2), self.phase)
            + Complex64::from_polar(g(xi1 + k1, xi2 + k2), -self.phase);
        0.5 * self.amplitude * lobes * Complex64::from_polar(1.0, -2.0 * PI * (xi1 * self.center[0] + xi2 * self.center[1]))
    }
}

/// Generator settings for [`ConeNoise`], relative to the image side `L = n·dx`
/// and the Nyquist frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeNoiseParams {
    pub atoms: usize,
    /// Envelope width `w` as a fraction of `L`.
    pub width: f64,
    /// Atom centers are uniform in the disc of this radius (fraction of `L`).
    pub center_radius: f64,
    /// Distance kept between frequency centers and the band edges, in units
    /// of `σ = 1/(2√π w)`, the spectral standard deviation of the envelope energy.
    pub margin_sigmas: f64,
    /// Upper bound of that distance as a fraction of Nyquist.
    pub max_margin: f64,
}

impl Default for ConeNoiseParams {
    fn default() -> Self {
        Self { atoms: 12, width: 0.2, center_radius: 1.0 / 16.0, margin_sigmas: 1.5, max_margin: 0.04 }
    }
}

/// Seeded sum of real Gabor atoms whose frequency centers lie in the cone
/// `|ξ₂| ≤ |ξ₁|` and the band `0.1·Nyq ≤ |ξ₁| ≤ 0.25·Nyq`, kept a margin
/// `m = min(margin_sigmas·σ, max_margin·Nyq)` inside the band and `√2·m`
/// inside the cone. Amplitudes are uniform in `[1/2, 1]`, phases and the
/// sign of `ξ₁` uniform.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeNoise {
    pub atoms: Vec<GaborAtom>,
    /// Radius (fraction of Nyquist) beyond which the energy share is below `1e-10`.
    pub band_limit: f64,
}

impl ConeNoise {
    pub fn generate(grid: &ImageGrid, seed: u64) -> Result<Self> {
        Self::generate_with(grid, seed, ConeNoiseParams::default())
    }

    pub fn generate_with(grid: &ImageGrid, seed: u64, params: ConeNoiseParams) -> Result<Self> {
        if params.atoms == 0 || !(params.width > 0.0) {
            return domain("cone noise needs at least one atom and a positive width");
        }
        let side = grid.nx.min(grid.ny) as f64 * grid.dx;
        let width = params.width * side;
        let sigma = 1.0 / (2.0 * PI.sqrt() * width);
        let nyq = grid.nyquist();
        let margin = (params.margin_sigmas * sigma).min(params.max_margin * nyq);
        let (lo, hi) = (0.1 * nyq + margin, 0.25 * nyq - margin);
        if lo >= hi {
            return domain("cone-noise margin leaves an empty band");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let radius = params.center_radius * side;
        let mut atoms = Vec::with_capacity(params.atoms);
        let mut reach = 0.0_f64;
        for _ in 0..params.atoms {
            let r = radius * rng.random::<f64>().sqrt();
            let ang = rng.random_range(0.0..2.0 * PI);
            let k1 = rng.random_range(lo..hi);
            let slope_room = (k1 - 2f64.sqrt() * margin).max(0.0);
            let k2 = rng.random_range(-slope_room..=slope_room);
            let k1 = if rng.random_bool(0.5) { k1 } else { -k1 };
            reach = reach.max(k1.hypot(k2));
            atoms.push(GaborAtom {
                amplitude: rng.random_range(0.5..1.0),
                center: [r * ang.cos(), r * ang.sin()],
                frequency: [k1, k2],
                phase: rng.random_range(0.0..2.0 * PI),
                width,
            });
        }
        // energy density falls as e^{-δ²/(2σ²)}; 7σ leaves < 1e-10
        let band_limit = ((reach + 7.0 * sigma) / nyq).min(1.0);
        Ok(Self { atoms, band_limit })
    }

    pub fn image(&self, grid: ImageGrid) -> Image2D {
        Image2D::sample(grid, self).with_band_limit(self.band_limit)
    }
}

impl Field2D for ConeNoise {
    fn value(&self, x: f64, y: f64) -> Complex64 {
        Complex64::new(self.atoms.iter().map(|a| a.value(x, y)).sum(), 0.0)
    }

    fn spectrum(&self, xi1: f64, xi2: f64) -> Option<Complex64> {
        Some(self.atoms.iter().map(|a| a.spectrum(xi1, xi2)).sum())
    }
}

/// Field scaled by a complex constant and summed with another.
pub struct Combination<'a> {
    pub terms: Vec<(Complex64, &'a dyn Field2D)>,
}

impl Field2D for Combination<'_> {
    fn value(&self, x: f64, y: f64) -> Complex64 {
        self.terms.iter().map(|(c, f)| c * f.value(x, y)).sum()
    }

    fn spectrum(&self, xi1: f64, xi2: f64) -> Option<Complex64> {
        self.terms.iter().map(|(c, f)| f.spectrum(xi1, xi2).map(|s| c * s)).sum()
    }
}

/// `S_{b,s,a} f(x) = |a|^{-(1+γ)/2} f(h_{s,a}⁻¹(x - b))` for the standard 2D
/// group, `h_{s,a} = a·[[1, -s|a|^{γ-1}], [0, |a|^{γ-1}]]`.
pub struct ShearletAction<'a> {
    pub field: &'a dyn Field2D,
    pub b: [f64; 2],
    pub s: f64,
    pub a: f64,
    pub gamma: f64,
}

impl ShearletAction<'_> {
    fn lambda(&self) -> f64 {
        self.a.abs().powf(self.gamma - 1.0)
    }
}

impl Field2D for ShearletAction<'_> {
    fn value(&self, x: f64, y: f64) -> Complex64 {
        let (y1, y2) = (x - self.b[0], y - self.b[1]);
        let lam = self.lambda();
        let u1 = (y1 + self.s * y2) / self.a;
        let u2 = y2 / (self.a * lam);
        self.field.value(u1, u2) * self.a.abs().powf(-0.5 * (1.0 + self.gamma))
    }

    fn spectrum(&self, xi1: f64, xi2: f64) -> Option<Complex64> {
        let lam = self.lambda();
        let inner = self.field.spectrum(self.a * xi1, self.a * lam * (xi2 - self.s * xi1))?;
        let phase = Complex64::from_polar(1.0, -2.0 * PI * (self.b[0] * xi1 + self.b[1] * xi2));
        Some(inner * phase * self.a.abs().powf(0.5 * (1.0 + self.gamma)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cone_noise_is_deterministic_and_in_the_cone() {
        let g = ImageGrid::square(256, 1.0 / 64.0).unwrap();
        let a = ConeNoise::generate(&g, 7).unwrap();
        assert_eq!(a, ConeNoise::generate(&g, 7).unwrap());
        assert_ne!(a, ConeNoise::generate(&g, 8).unwrap());
        let nyq = g.nyquist();
        for atom in &a.atoms {
            let [k1, k2] = atom.frequency;
            assert!(k1.abs() >= 0.1 * nyq && k1.abs() <= 0.25 * nyq);
            assert!(k2.abs() <= k1.abs());
        }
        let img = a.image(g);
        assert!(img.energy_outside(a.band_limit) < 1e-10);
    }

    #[test]
    fn sampled_spectrum_matches_closed_form() {
        let g = ImageGrid::square(128, 1.0 / 64.0).unwrap();
        let f = ConeNoise::generate(&g, 3).unwrap();
        let img = Image2D::sample(g, &f);
        let spec = img.spectrum();
        let mut worst = 0.0_f64;
        let mut peak = 0.0_f64;
        for my in 0..g.ny {
            for mx in 0..g.nx {
                let exact = f.spectrum(g.xi1(mx), g.xi2(my)).unwrap();
                worst = worst.max((spec[my * g.nx + mx] - exact).norm());
                peak = peak.max(exact.norm());
            }
        }
        assert!(worst / peak < 1e-8, "{}", worst / peak);
    }

    #[test]
    fn shearlet_action_is_unitary_and_spectrally_consistent() {
        let g = ImageGrid::square(256, 1.0 / 32.0).unwrap();
        let base = Gaussian { sigma: 0.6 };
        let moved = ShearletAction { field: &base, b: [0.5, -0.25], s: 0.5, a: -0.5, gamma: 0.5 };
        let (i0, i1) = (Image2D::sample(g, &base), Image2D::sample(g, &moved));
        assert!((i0.norm() - i1.norm()).abs() < 1e-10);
        let spec = i1.spectrum();
        for (my, mx) in [(128, 130), (120, 140), (131, 117)] {
            let exact = moved.spectrum(g.xi1(mx), g.xi2(my)).unwrap();
            assert!((spec[my * g.nx + mx] - exact).norm() < 1e-10);
        }
    }
}
