use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::groups::DilationFamily;
use crate::image::ImageGrid;
use crate::signal::{chi_from_psi1, QuadratureGrid, Spectrum, Wavelet1D};

/// Tensor mother shearlet `Fψ(ξ) = Fψ₁(ξ₁)·Fψ₂(ξ₂/ξ₁)` with its derived
/// wavelets `Fφ₁ = |τ|^{1/2}Fψ₁`, `Fχ₁ = |τ|Fψ₁` and `φ₂ = Fψ₂`.
#[derive(Clone, Debug)]
pub struct MotherShearlet {
    psi1_id: String,
    psi2_id: String,
    psi1: Wavelet1D,
    psi2: Spectrum,
    phi1: Wavelet1D,
    chi1: Wavelet1D,
    gamma: f64,
    psi2_norm2: f64,
    c_psi: f64,
    family: Arc<DilationFamily>,
}

/// Builds and validates a mother shearlet.
///
/// `psi1` is a [`Spectrum`] preset admissible in the Calderón sense with
/// finite first and second moments; `psi2` must have bounded support.
pub fn make_mother(psi1: &str, psi2: &str, gamma: f64) -> Result<MotherShearlet> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!("γ must lie in (0, 1), got {gamma}")));
    }
    let w1 = Wavelet1D::preset(psi1)?;
    let chi1 = chi_from_psi1(&w1)?;
    let phi1 = w1.riesz(0.5)?;
    if !phi1.is_admissible() {
        return Err(Error::Admissibility(format!("φ₁ from '{psi1}' is not admissible")));
    }
    let s2 = Spectrum::parse(psi2)?;
    let r2 = s2
        .radius()
        .ok_or_else(|| Error::Coverage(format!("ψ₂ '{psi2}' has unbounded slope support")))?;
    // trapezoid over the support of Fψ₂
    let grid = QuadratureGrid { n: 1 << 14, step: 2.0 * r2 / (1 << 13) as f64 };
    let psi2_norm2 = grid.integrate(|u| s2.eval(u).norm_sqr()) + grid.step * s2.eval(0.0).norm_sqr();
    if !(psi2_norm2 > 0.0) {
        return Err(Error::Admissibility(format!("ψ₂ '{psi2}' vanishes")));
    }
    let c_psi = w1.admissibility().calderon * psi2_norm2;
    Ok(MotherShearlet {
        psi1_id: psi1.to_string(),
        psi2_id: psi2.to_string(),
        psi1: w1,
        psi2: s2,
        phi1,
        chi1,
        gamma,
        psi2_norm2,
        c_psi,
        family: Arc::new(DilationFamily::standard(2, gamma)?),
    })
}

impl MotherShearlet {
    pub fn psi1_id(&self) -> &str {
        &self.psi1_id
    }

    pub fn psi2_id(&self) -> &str {
        &self.psi2_id
    }

    /// `"<psi1>|<psi2>"`.
    pub fn id(&self) -> String {
        format!("{}|{}", self.psi1_id, self.psi2_id)
    }

    pub fn psi1(&self) -> &Wavelet1D {
        &self.psi1
    }

    pub fn phi1(&self) -> &Wavelet1D {
        &self.phi1
    }

    pub fn chi1(&self) -> &Wavelet1D {
        &self.chi1
    }

    pub fn psi2(&self) -> &Spectrum {
        &self.psi2
    }

    /// `φ₂(u) = Fψ₂(u)`.
    pub fn phi2(&self, u: f64) -> Complex64 {
        self.psi2.eval(u)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn family(&self) -> &Arc<DilationFamily> {
        &self.family
    }

    /// `‖Fψ₂‖²`.
    pub fn psi2_norm2(&self) -> f64 {
        self.psi2_norm2
    }

    /// `C_ψ = ∫ |Fψ(ξ)|²/|ξ₁|² dξ = ∫ |Fψ₁|²/|τ| dτ · ‖Fψ₂‖²`.
    pub fn c_psi(&self) -> f64 {
        self.c_psi
    }

    /// `‖ψ‖² = ∫ |τ| |Fψ₁(τ)|² dτ · ‖Fψ₂‖²`.
    pub fn norm2(&self) -> f64 {
        self.psi1.admissibility().moment * self.psi2_norm2
    }

    /// Radius of the slope support of `φ₂`.
    pub fn phi2_radius(&self) -> f64 {
        self.psi2.radius().unwrap_or(f64::INFINITY)
    }

    /// `|a|^{1-γ}`: the slope dilation at scale `a`.
    pub fn slope_scale(&self, a: f64) -> f64 {
        a.abs().powf(1.0 - self.gamma)
    }

    pub fn spectrum(&self, xi1: f64, xi2: f64) -> Complex64 {
        if xi1 == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let p1 = self.psi1.eval(xi1);
        if p1 == Complex64::new(0.0, 0.0) {
            return p1;
        }
        p1 * self.psi2.eval(xi2 / xi1)
    }

    /// `F(S_{0,s,a}ψ)(ξ) = |det h|^{1/2} Fψ(ᵗh ξ) = |a|^{(1+γ)/2} Fψ₁(aξ₁) Fψ₂(|a|^{γ-1}(ξ₂/ξ₁ - s))`.
    pub fn atom_spectrum(&self, s: f64, a: f64, xi1: f64, xi2: f64) -> Complex64 {
        if xi1 == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let p1 = self.psi1.eval(a * xi1);
        if p1 == Complex64::new(0.0, 0.0) {
            return p1;
        }
        let lam = a.abs().powf(self.gamma - 1.0);
        p1 * self.psi2.eval(lam * (xi2 / xi1 - s)) * a.abs().powf(0.5 * (1.0 + self.gamma))
    }

    /// Rejects `(s, a)` whose atom spectrum leaves the Nyquist box of `grid`.
    pub fn check_alias(&self, grid: &ImageGrid, s: f64, a: f64) -> Result<()> {
        let r1 = self.psi1.spectrum().radius().unwrap_or(f64::INFINITY);
        let xi1 = r1 / a.abs();
        let xi2 = xi1 * (s.abs() + self.phi2_radius() * self.slope_scale(a));
        let nyq = grid.nyquist();
        if xi1 > nyq || xi2 > nyq {
            return Err(Error::Aliasing { s, a });
        }
        Ok(())
    }
}
