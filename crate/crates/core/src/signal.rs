//! One-dimensional signals, wavelet spectra and the continuous wavelet transform.

use std::f64::consts::{LN_2, PI};
use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::fourier::CenteredFft;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Which side of the Fourier transform the samples live on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Space,
    Frequency,
}

/// Samples on the centered grid `(k - n/2)·step`.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal1D {
    step: f64,
    domain: Domain,
    values: Vec<Complex64>,
}

fn check_len(n: usize) -> Result<()> {
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::Size(format!("signal length must be a power of two ≥ 8, got {n}")));
    }
    Ok(())
}

impl Signal1D {
    /// Space-domain signal with spacing `dx`.
    pub fn new(dx: f64, values: Vec<Complex64>) -> Result<Self> {
        Self::with_domain(dx, values, Domain::Space)
    }

    pub fn with_domain(step: f64, values: Vec<Complex64>, domain: Domain) -> Result<Self> {
        check_len(values.len())?;
        if !(step > 0.0 && step.is_finite()) {
            return self::domain(format!("grid spacing must be positive, got {step}"));
        }
        Ok(Self { step, domain, values })
    }

    pub fn from_fn(n: usize, dx: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = (0..n).map(|k| f((k as f64 - (n / 2) as f64) * dx)).collect();
        Self::new(dx, values)
    }

    /// Space-domain signal whose spectrum on the dual grid is `spec`.
    pub fn from_spectrum(n: usize, dx: f64, spec: impl Fn(f64) -> Complex64) -> Result<Self> {
        let dtau = 1.0 / (n as f64 * dx);
        let values = (0..n).map(|m| spec((m as f64 - (n / 2) as f64) * dtau)).collect();
        Self::with_domain(dtau, values, Domain::Frequency)?.inverse_spectrum()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn coord(&self, k: usize) -> f64 {
        (k as f64 - (self.len() / 2) as f64) * self.step
    }

    /// `‖·‖_{L²}` by the rectangle rule.
    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.step).sqrt()
    }

    /// Spacing of the dual grid.
    pub fn dual_step(&self) -> f64 {
        1.0 / (self.len() as f64 * self.step)
    }

    /// Space → frequency with the `e^{-2πiτx}` convention.
    pub fn forward_spectrum(&self) -> Result<Signal1D> {
        if self.domain != Domain::Space {
            return domain("forward_spectrum expects a space-domain signal");
        }
        let mut v = self.values.clone();
        CenteredFft::new(self.len()).forward(&mut v, self.step);
        Signal1D::with_domain(self.dual_step(), v, Domain::Frequency)
    }

    /// Frequency → space.
    pub fn inverse_spectrum(&self) -> Result<Signal1D> {
        if self.domain != Domain::Frequency {
            return domain("inverse_spectrum expects a frequency-domain signal");
        }
        let mut v = self.values.clone();
        CenteredFft::new(self.len()).inverse(&mut v, self.step);
        Signal1D::with_domain(self.dual_step(), v, Domain::Space)
    }

    fn map_spectrum(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Result<Signal1D> {
        let spec = self.forward_spectrum()?;
        let values = spec
            .values
            .iter()
            .enumerate()
            .map(|(m, z)| f(spec.coord(m), *z))
            .collect();
        Signal1D::with_domain(spec.step, values, Domain::Frequency)?.inverse_spectrum()
    }

    /// Spectral derivative `f'` (multiplier `2πiτ`).
    pub fn derivative(&self) -> Result<Signal1D> {
        self.map_spectrum(|tau, z| z * Complex64::new(0.0, 2.0 * PI * tau))
    }

    /// Hilbert transform (multiplier `-i·sgn τ`).
    pub fn hilbert(&self) -> Result<Signal1D> {
        self.map_spectrum(|tau, z| z * Complex64::new(0.0, -tau.signum()) * if tau == 0.0 { 0.0 } else { 1.0 })
    }

    /// Translation by a multiple of the grid spacing (periodic).
    pub fn shift_samples(&self, k: isize) -> Signal1D {
        let n = self.len() as isize;
        let values = (0..n).map(|j| self.values[(j - k).rem_euclid(n) as usize]).collect();
        Signal1D { step: self.step, domain: self.domain, values }
    }
}

/// `|τ|^e` applied to a frequency-domain signal; the `τ = 0` bin becomes 0.
pub fn riesz_halfpower(spec: &Signal1D, exponent: f64) -> Result<Signal1D> {
    if spec.domain != Domain::Frequency {
        return domain("riesz_halfpower expects a frequency-domain signal");
    }
    if !(exponent >= 0.0) {
        return domain(format!("riesz exponent must be ≥ 0, got {exponent}"));
    }
    let values = spec
        .values
        .iter()
        .enumerate()
        .map(|(m, z)| riesz_factor(spec.coord(m), exponent) * z)
        .collect();
    Signal1D::with_domain(spec.step, values, Domain::Frequency)
}

#[inline]
fn riesz_factor(tau: f64, exponent: f64) -> f64 {
    if tau == 0.0 {
        0.0
    } else {
        tau.abs().powf(exponent)
    }
}

/// Smooth step: 0 for `x ≤ 0`, 1 for `x ≥ 1`, `C^∞`, with `ν(x) + ν(1-x) = 1`.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let h = |t: f64| (-1.0 / (t * t)).exp();
    let a = h(x);
    a / (a + h(1.0 - x))
}

fn meyer_window(tau: f64) -> f64 {
    let t = tau.abs();
    if !(0.5..=2.0).contains(&t) {
        return 0.0;
    }
    let rho = t.log2();
    if rho <= 0.0 {
        (0.5 * PI * smooth_step(rho + 1.0)).sin()
    } else {
        (0.5 * PI * smooth_step(rho)).cos()
    }
}

/// Normalizes the Meyer window to unit `L²` norm.
fn meyer_scale() -> f64 {
    static SCALE: OnceLock<f64> = OnceLock::new();
    *SCALE.get_or_init(|| {
        // trapezoid in ρ = log2 τ; smooth, vanishing ends
        let n = 1 << 16;
        let h = 2.0 / n as f64;
        let mut acc = 0.0;
        for k in 1..n {
            let rho = -1.0 + k as f64 * h;
            let t = rho.exp2();
            acc += meyer_window(t).powi(2) * t * LN_2;
        }
        1.0 / (2.0 * acc * h).sqrt()
    })
}

/// Analytic or sampled description of a 1D spectrum `F ψ(τ)`.
#[derive(Clone, Debug)]
pub enum Spectrum {
    Zero,
    /// Real, even, `C^∞`, supported in `1/2 ≤ |τ| ≤ 2`, unit `L²` norm; its
    /// squares form a dyadic partition of unity up to the normalization.
    MeyerAnnulus,
    /// `cos(π/2·ν(|u|))` on `|u| ≤ 1`: unit norm, and integer shifts of its
    /// square sum to 1.
    MeyerBump,
    /// `1_{[lo,hi]}(τ)` with value 1/2 at the endpoints.
    Indicator { lo: f64, hi: f64 },
    /// `1_{lo ≤ |τ| ≤ hi}` with value 1/2 at the endpoints.
    IndicatorAnnulus { lo: f64, hi: f64 },
    /// `e^{-πτ²}` (not admissible: carries mass at τ = 0).
    Gaussian,
    /// Linearly interpolated samples on `origin + k·step`, zero outside.
    Sampled { origin: f64, step: f64, values: Arc<Vec<Complex64>> },
    /// `|τ|^exponent · base(τ)`, zero at τ = 0.
    Power { base: Box<Spectrum>, exponent: f64 },
}

fn edge_indicator(t: f64, lo: f64, hi: f64) -> f64 {
    if t == lo || t == hi {
        0.5
    } else if t > lo && t < hi {
        1.0
    } else {
        0.0
    }
}

impl Spectrum {
    pub fn eval(&self, tau: f64) -> Complex64 {
        match self {
            Spectrum::Zero => ZERO,
            Spectrum::MeyerAnnulus => Complex64::new(meyer_scale() * meyer_window(tau), 0.0),
            Spectrum::MeyerBump => {
                let u = tau.abs();
                if u >= 1.0 {
                    ZERO
                } else {
                    Complex64::new((0.5 * PI * smooth_step(u)).cos(), 0.0)
                }
            }
            Spectrum::Indicator { lo, hi } => Complex64::new(edge_indicator(tau, *lo, *hi), 0.0),
            Spectrum::IndicatorAnnulus { lo, hi } => Complex64::new(edge_indicator(tau.abs(), *lo, *hi), 0.0),
            Spectrum::Gaussian => Complex64::new((-PI * tau * tau).exp(), 0.0),
            Spectrum::Sampled { origin, step, values } => crate::interp::linear_at(values, (tau - origin) / step),
            Spectrum::Power { base, exponent } => base.eval(tau) * riesz_factor(tau, *exponent),
        }
    }

    /// Closed interval of `τ` outside which the spectrum vanishes, if bounded.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            Spectrum::Zero => Some((0.0, 0.0)),
            Spectrum::MeyerAnnulus => Some((-2.0, 2.0)),
            Spectrum::MeyerBump => Some((-1.0, 1.0)),
            Spectrum::Indicator { lo, hi } => Some((*lo, *hi)),
            Spectrum::IndicatorAnnulus { hi, .. } => Some((-hi, *hi)),
            Spectrum::Gaussian => None,
            Spectrum::Sampled { origin, step, values } => {
                let first = values.iter().position(|z| *z != ZERO)?;
                let last = values.iter().rposition(|z| *z != ZERO)?;
                Some((origin + (first as f64 - 1.0) * step, origin + (last as f64 + 1.0) * step))
            }
            Spectrum::Power { base, .. } => base.support(),
        }
    }

    /// Largest `|τ|` where the spectrum may be nonzero.
    pub fn radius(&self) -> Option<f64> {
        self.support().map(|(lo, hi)| lo.abs().max(hi.abs()))
    }

    /// Parses `meyer-annulus`, `meyer-bump`, `gaussian`, `zero`,
    /// `indicator:[t0,t1]` and `indicator-annulus:[t0,t1]`.
    pub fn parse(id: &str) -> Result<Spectrum> {
        let id = id.trim();
        let interval = |rest: &str| -> Result<(f64, f64)> {
            let body = rest.trim().trim_start_matches('[').trim_end_matches(']');
            let (a, b) = body
                .split_once(',')
                .ok_or_else(|| Error::Domain(format!("expected [t0,t1] in '{id}'")))?;
            let a: f64 = a.trim().parse().map_err(|_| Error::Domain(format!("bad bound in '{id}'")))?;
            let b: f64 = b.trim().parse().map_err(|_| Error::Domain(format!("bad bound in '{id}'")))?;
            if !(a < b) {
                return Err(Error::Domain(format!("empty interval in '{id}'")));
            }
            Ok((a, b))
        };
        match id.split_once(':') {
            Some(("indicator", rest)) => {
                let (lo, hi) = interval(rest)?;
                Ok(Spectrum::Indicator { lo, hi })
            }
            Some(("indicator-annulus", rest)) => {
                let (lo, hi) = interval(rest)?;
                if lo < 0.0 {
                    return domain("annulus bounds must be non-negative");
                }
                Ok(Spectrum::IndicatorAnnulus { lo, hi })
            }
            None => match id {
                "meyer-annulus" => Ok(Spectrum::MeyerAnnulus),
                "meyer-bump" => Ok(Spectrum::MeyerBump),
                "gaussian" => Ok(Spectrum::Gaussian),
                "zero" => Ok(Spectrum::Zero),
                _ => domain(format!("unknown spectrum preset '{id}'")),
            },
            _ => domain(format!("unknown spectrum preset '{id}'")),
        }
    }
}

/// Uniform symmetric frequency grid `τ_m = (m - n/2)·step` used for quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureGrid {
    pub n: usize,
    pub step: f64,
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self { n: 1 << 15, step: 1.0 / 1024.0 }
    }
}

impl QuadratureGrid {
    pub fn coord(&self, m: usize) -> f64 {
        (m as f64 - (self.n / 2) as f64) * self.step
    }

    /// Same range, `factor` times finer.
    pub fn refined(&self, factor: usize) -> Self {
        Self { n: self.n * factor, step: self.step / factor as f64 }
    }

    /// Trapezoid rule of `f` over the grid, skipping `τ = 0`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for m in 0..self.n {
            if m == self.n / 2 {
                continue;
            }
            let w = if m == 0 { 0.5 } else { 1.0 };
            acc += w * f(self.coord(m));
        }
        // the grid is missing its right endpoint; add it with weight 1/2
        acc += 0.5 * f(-self.coord(0));
        acc * self.step
    }
}

/// Quadrature results behind the admissibility decision.
#[derive(Clone, Debug, PartialEq)]
pub struct Admissibility {
    /// `∫ |Fψ|²/|τ| dτ`.
    pub calderon: f64,
    /// `∫ |τ| |Fψ|² dτ` (the d = 2 moment condition).
    pub moment: f64,
    /// `∫ τ² |Fψ|² dτ`.
    pub second_moment: f64,
    /// Largest `|Fψ|²` within two bins of `τ = 0`, relative to the peak.
    pub dc_leak: f64,
    /// Largest `|Fψ|²` in the outer 5% of the grid, relative to the peak.
    pub edge_leak: f64,
    pub admissible: bool,
    pub reason: Option<String>,
}

/// Relative spectral energy considered negligible by the admissibility checks.
pub const LEAK_TOLERANCE: f64 = 1e-10;

pub fn admissibility(spectrum: &Spectrum, grid: &QuadratureGrid) -> Admissibility {
    let e = |t: f64| spectrum.eval(t).norm_sqr();
    let calderon = grid.integrate(|t| e(t) / t.abs());
    let moment = grid.integrate(|t| t.abs() * e(t));
    let second_moment = grid.integrate(|t| t * t * e(t));
    let peak = (0..grid.n).map(|m| e(grid.coord(m))).fold(0.0, f64::max);
    let rel = |x: f64| if peak > 0.0 { x / peak } else { 0.0 };
    let dc_leak = rel([-2.0, -1.0, 1.0, 2.0].iter().map(|k| e(k * grid.step)).fold(0.0, f64::max));
    let outer = (0.95 * grid.coord(0)).abs();
    let edge_leak = rel(
        (0..grid.n)
            .map(|m| grid.coord(m))
            .filter(|t| t.abs() >= outer)
            .map(e)
            .fold(0.0, f64::max),
    );
    let reason = if peak == 0.0 {
        Some("spectrum vanishes identically".to_string())
    } else if dc_leak > LEAK_TOLERANCE {
        Some(format!("spectral mass at τ = 0 (relative energy {dc_leak:.3e} next to the origin)"))
    } else if edge_leak > LEAK_TOLERANCE {
        Some(format!("spectrum not resolved by the quadrature grid (relative energy {edge_leak:.3e} at the edge)"))
    } else if !(calderon > 0.0 && calderon.is_finite()) {
        Some("Calderón integral is not finite and positive".to_string())
    } else {
        None
    };
    Admissibility {
        calderon,
        moment,
        second_moment,
        dc_leak,
        edge_leak,
        admissible: reason.is_none(),
        reason,
    }
}

/// A one-dimensional wavelet described by its spectrum.
#[derive(Clone, Debug)]
pub struct Wavelet1D {
    id: String,
    spectrum: Spectrum,
    grid: QuadratureGrid,
    report: Admissibility,
}

impl Wavelet1D {
    pub fn new(id: &str, spectrum: Spectrum) -> Self {
        Self::with_grid(id, spectrum, QuadratureGrid::default())
    }

    pub fn with_grid(id: &str, spectrum: Spectrum, grid: QuadratureGrid) -> Self {
        let report = admissibility(&spectrum, &grid);
        Self { id: id.to_string(), spectrum, grid, report }
    }

    pub fn preset(id: &str) -> Result<Self> {
        Ok(Self::new(id, Spectrum::parse(id)?))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn eval(&self, tau: f64) -> Complex64 {
        self.spectrum.eval(tau)
    }

    pub fn admissibility(&self) -> &Admissibility {
        &self.report
    }

    pub fn is_admissible(&self) -> bool {
        self.report.admissible
    }

    /// Spectrum samples on the quadrature grid.
    pub fn samples(&self) -> Vec<Complex64> {
        (0..self.grid.n).map(|m| self.eval(self.grid.coord(m))).collect()
    }

    /// Wavelet with spectrum `|τ|^e Fψ(τ)`.
    pub fn riesz(&self, exponent: f64) -> Result<Wavelet1D> {
        if !(exponent >= 0.0) {
            return domain(format!("riesz exponent must be ≥ 0, got {exponent}"));
        }
        let spectrum = match &self.spectrum {
            Spectrum::Power { base, exponent: e0 } => Spectrum::Power { base: base.clone(), exponent: e0 + exponent },
            other => Spectrum::Power { base: Box::new(other.clone()), exponent },
        };
        Ok(Wavelet1D::with_grid(&format!("riesz({},{exponent})", self.id), spectrum, self.grid))
    }

    /// `(τ, re, im)` rows of the spectrum on the quadrature grid.
    pub fn spectrum_csv(&self) -> String {
        let mut out = String::from("tau,re,im\n");
        for m in 0..self.grid.n {
            let t = self.grid.coord(m);
            let z = self.eval(t);
            out.push_str(&format!("{t},{},{}\n", z.re, z.im));
        }
        out
    }
}

/// Calderón constant `∫ |Fψ(τ)|²/|τ| dτ` on the wavelet's quadrature grid.
pub fn calderon_constant(w: &Wavelet1D) -> f64 {
    w.report.calderon
}

/// `χ₁` with `Fχ₁(τ) = |τ| Fψ₁(τ)`, after checking that `ψ₁` is admissible and
/// that its first and second spectral moments are finite on the grid.
pub fn chi_from_psi1(psi1: &Wavelet1D) -> Result<Wavelet1D> {
    if let Some(reason) = &psi1.report.reason {
        return Err(Error::Admissibility(format!("ψ₁ '{}': {reason}", psi1.id)));
    }
    if !(psi1.report.moment.is_finite() && psi1.report.second_moment.is_finite()) {
        return Err(Error::Admissibility(format!("ψ₁ '{}': spectral moments diverge", psi1.id)));
    }
    let chi = psi1.riesz(1.0)?;
    if !chi.is_admissible() {
        return Err(Error::Admissibility(format!(
            "χ₁ from '{}': {}",
            psi1.id,
            chi.report.reason.clone().unwrap_or_default()
        )));
    }
    Ok(chi)
}

/// Max deviation between `F(Hψ₁')` and `2π Fχ₁`, relative to the peak of
/// `2π|Fχ₁|`, with `ψ₁` sampled in space on `n` points of spacing `dx`.
pub fn hilbert_derivative_residual(psi1: &Wavelet1D, n: usize, dx: f64) -> Result<f64> {
    let chi = chi_from_psi1(psi1)?;
    let sig = Signal1D::from_spectrum(n, dx, |t| psi1.eval(t))?;
    let lhs = sig.derivative()?.hilbert()?.forward_spectrum()?;
    let mut peak = 0.0_f64;
    let mut worst = 0.0_f64;
    for (m, z) in lhs.values().iter().enumerate() {
        let r = 2.0 * PI * chi.eval(lhs.coord(m));
        peak = peak.max(r.norm());
        worst = worst.max((z - r).norm());
    }
    Ok(if peak > 0.0 { worst / peak } else { worst })
}

fn check_scales(a_grid: &[f64]) -> Result<()> {
    if let Some(a) = a_grid.iter().find(|a| **a == 0.0 || !a.is_finite()) {
        return domain(format!("wavelet scale must be finite and nonzero, got {a}"));
    }
    Ok(())
}

/// Product `|a|^{1/2} Ff(τ) conj(Fψ(aτ))` on the signal's dual grid.
fn correlation_spectrum(spec: &Signal1D, w: &Wavelet1D, a: f64) -> Vec<Complex64> {
    let sa = a.abs().sqrt();
    spec.values()
        .iter()
        .enumerate()
        .map(|(m, z)| z * w.eval(a * spec.coord(m)).conj() * sa)
        .collect()
}

/// `⟨f, W_{b,a}ψ⟩` for every sample position `b`, one FFT.
pub fn cwt_all_shifts(sig: &Signal1D, w: &Wavelet1D, a: f64) -> Result<Vec<Complex64>> {
    check_scales(&[a])?;
    let spec = sig.forward_spectrum()?;
    let mut prod = correlation_spectrum(&spec, w, a);
    CenteredFft::new(sig.len()).inverse(&mut prod, spec.step());
    Ok(prod)
}

/// Matrix of `⟨f, W_{b_i,a_j}ψ⟩` with `W_{b,a}ψ(x) = |a|^{-1/2} ψ((x-b)/a)`.
///
/// Translations on the sample grid are read from one inverse FFT per scale;
/// other translations use the direct spectral sum.
pub fn cwt(sig: &Signal1D, w: &Wavelet1D, b_grid: &[f64], a_grid: &[f64]) -> Result<DMatrix<Complex64>> {
    check_scales(a_grid)?;
    let spec = sig.forward_spectrum()?;
    let n = sig.len();
    let fft = CenteredFft::new(n);
    let mut out = DMatrix::from_element(b_grid.len(), a_grid.len(), ZERO);
    for (j, &a) in a_grid.iter().enumerate() {
        let prod = correlation_spectrum(&spec, w, a);
        let mut on_grid = prod.clone();
        fft.inverse(&mut on_grid, spec.step());
        for (i, &b) in b_grid.iter().enumerate() {
            let pos = b / sig.step() + (n / 2) as f64;
            let k = pos.round();
            out[(i, j)] = if (pos - k).abs() < 1e-9 && k >= 0.0 && (k as usize) < n {
                on_grid[k as usize]
            } else {
                prod.iter()
                    .enumerate()
                    .map(|(m, z)| z * Complex64::from_polar(1.0, 2.0 * PI * spec.coord(m) * b))
                    .sum::<Complex64>()
                    * spec.step()
            };
        }
    }
    Ok(out)
}
