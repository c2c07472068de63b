use std::f64::consts::LN_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::groups::{haar_density, DilationFamily};
use crate::image::ImageGrid;

/// One scale of the lattice and its shears.
#[derive(Clone, Debug, PartialEq)]
pub struct ShearLevel {
    pub j: u32,
    pub a: f64,
    /// `Δa = |a| ln 2` for dyadic scales.
    pub da: f64,
    /// `Δs = |a|^{1-γ}/2`.
    pub ds: f64,
    pub shears: Vec<f64>,
}

/// Discrete sampling of `𝕊^γ`: translations on the image grid, dyadic scales
/// `a = ±2^{-j}` for `j = 0..=J`, shears `s = k·|a|^{1-γ}/2` with `|s| ≤ s_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    pub grid: ImageGrid,
    pub gamma: f64,
    pub levels: Vec<ShearLevel>,
}

impl Lattice {
    pub fn dyadic(grid: ImageGrid, gamma: f64, j_max: u32, s_max: f64, both_signs: bool) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::Domain(format!("γ must lie in (0, 1), got {gamma}")));
        }
        if !(s_max >= 0.0) {
            return Err(Error::Domain(format!("shear range must be nonnegative, got {s_max}")));
        }
        let mut levels = Vec::new();
        for j in 0..=j_max {
            let mag = 0.5f64.powi(j as i32);
            let ds = 0.5 * mag.powf(1.0 - gamma);
            let k = (s_max / ds + 1e-9).floor() as i64;
            let shears: Vec<f64> = (-k..=k).map(|i| i as f64 * ds).collect();
            let signs: &[f64] = if both_signs { &[1.0, -1.0] } else { &[1.0] };
            for &sg in signs {
                levels.push(ShearLevel { j, a: sg * mag, da: mag * LN_2, ds, shears: shears.clone() });
            }
        }
        Ok(Self { grid, gamma, levels })
    }

    /// `(s, a, Δb·Δs·Δa·|a|^{-(d+1)})` for every slice, scales outermost.
    pub fn points(&self) -> Vec<(f64, f64, f64)> {
        let fam = DilationFamily::standard(2, self.gamma).expect("γ checked on construction");
        let db = self.grid.dx * self.grid.dx;
        let mut out = Vec::new();
        for lv in &self.levels {
            let (_, g) = haar_density(&fam, lv.a).expect("nonzero scale");
            for &s in &lv.shears {
                out.push((s, lv.a, db * lv.ds * lv.da * g));
            }
        }
        out
    }

    pub fn slice_count(&self) -> usize {
        self.levels.iter().map(|l| l.shears.len()).sum()
    }

    pub fn max_shear(&self) -> f64 {
        self.levels.iter().flat_map(|l| l.shears.iter()).fold(0.0, |m, s| m.max(s.abs()))
    }
}

/// Coefficients of one `(s, a)` on the translation grid, row-major in `b`.
#[derive(Clone, Debug)]
pub struct CoefficientSlice {
    pub s: f64,
    pub a: f64,
    /// Full cell weight `Δb·Δs·Δa/|a|³`.
    pub weight: f64,
    pub values: Vec<Complex64>,
}

/// Sampled `𝒮_ψf(b, s, a)` over a lattice.
#[derive(Clone, Debug)]
pub struct CoefficientVolume {
    lattice: Lattice,
    slices: Vec<CoefficientSlice>,
}

impl CoefficientVolume {
    pub fn new(lattice: Lattice, slices: Vec<CoefficientSlice>) -> Self {
        Self { lattice, slices }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn slices(&self) -> &[CoefficientSlice] {
        &self.slices
    }

    pub fn slice(&self, s: f64, a: f64) -> Option<&CoefficientSlice> {
        self.slices.iter().find(|sl| (sl.s - s).abs() < 1e-12 && sl.a == a)
    }

    /// `Σ |𝒮_ψf|² · weight`.
    pub fn energy(&self) -> f64 {
        self.slices.iter().map(|sl| sl.weight * sl.values.iter().map(|z| z.norm_sqr()).sum::<f64>()).sum()
    }

    /// `(Σ|x - y|² w / Σ|y|² w)^{1/2}` against a reference on the same lattice.
    pub fn relative_error(&self, reference: &CoefficientVolume) -> Result<f64> {
        if self.slices.len() != reference.slices.len() {
            return Err(Error::Shape { expected: reference.slices.len(), got: self.slices.len() });
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for (x, y) in self.slices.iter().zip(&reference.slices) {
            if x.values.len() != y.values.len() {
                return Err(Error::Shape { expected: y.values.len(), got: x.values.len() });
            }
            for (p, q) in x.values.iter().zip(&y.values) {
                num += y.weight * (p - q).norm_sqr();
                den += y.weight * q.norm_sqr();
            }
        }
        Ok(if den > 0.0 { (num / den).sqrt() } else { num.sqrt() })
    }

    /// Per-slice relative error `‖x - y‖/‖y‖`, maximum over slices with energy
    /// above `floor` times the largest slice energy.
    pub fn max_slice_error(&self, reference: &CoefficientVolume, floor: f64) -> Result<f64> {
        self.relative_error(reference)?;
        let energies: Vec<f64> =
            reference.slices.iter().map(|s| s.values.iter().map(|z| z.norm_sqr()).sum::<f64>()).collect();
        let top = energies.iter().cloned().fold(0.0, f64::max);
        let mut worst: f64 = 0.0;
        for ((x, y), e) in self.slices.iter().zip(&reference.slices).zip(&energies) {
            if *e <= floor * top || *e == 0.0 {
                continue;
            }
            let d: f64 = x.values.iter().zip(&y.values).map(|(p, q)| (p - q).norm_sqr()).sum();
            worst = worst.max((d / e).sqrt());
        }
        Ok(worst)
    }

    /// `{"s": .., "a": .., "weight": ..}` per slice.
    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({
            "nx": self.lattice.grid.nx,
            "ny": self.lattice.grid.ny,
            "dx": self.lattice.grid.dx,
            "gamma": self.lattice.gamma,
            "slices": self.slices.iter().map(|s| serde_json::json!({"s": s.s, "a": s.a, "weight": s.weight})).collect::<Vec<_>>(),
        })
    }
}
