//! Binary codecs: RSIM1 images, RSSG1 sinograms, RSVC1 coefficient volumes
//! (with a JSON sidecar) and binary PGM ingest.
//!
//! All integers are `u32` and all reals `f64`, little-endian.

use std::f64::consts::LN_2;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{Image2D, ImageGrid};
use crate::radon::{Sinogram, SinogramGrid, Stage};
use crate::shearlet::{CoefficientSlice, CoefficientVolume, Lattice, MotherShearlet, ShearLevel};

pub const RSIM_MAGIC: &[u8; 5] = b"RSIM1";
pub const RSSG_MAGIC: &[u8; 5] = b"RSSG1";
pub const RSVC_MAGIC: &[u8; 5] = b"RSVC1";

/// RSSG1 stage byte: bit 0 set once the Riesz multiplier has been applied.
const STAGE_RIESZ: u8 = 0x01;
/// RSSG1 stage byte: values are interleaved `(re, im)` pairs instead of reals.
const STAGE_COMPLEX: u8 = 0x80;

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::Parse {
                offset: self.bytes.len(),
                message: format!("truncated {what}: need {n} bytes at offset {}", self.pos),
            });
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn magic(&mut self, magic: &[u8; 5]) -> Result<()> {
        let got = self.take(5, "magic")?;
        if got != magic {
            return Err(Error::Parse {
                offset: 0,
                message: format!("bad magic {:?}, expected {:?}", String::from_utf8_lossy(got), std::str::from_utf8(magic).unwrap()),
            });
        }
        Ok(())
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u32(&mut self, what: &str) -> Result<usize> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes(b.try_into().unwrap()) as usize)
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        let b = self.take(8, what)?;
        Ok(f64::from_le_bytes(b.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize, what: &str) -> Result<Vec<f64>> {
        let need = n.checked_mul(8).ok_or_else(|| self.invalid(format!("{what} length overflows")))?;
        let b = self.take(need, what)?;
        Ok(b.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }

    fn end(&self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(self.invalid(format!("{} trailing bytes", self.bytes.len() - self.pos)));
        }
        Ok(())
    }

    fn invalid(&self, message: String) -> Error {
        Error::Parse { offset: self.pos, message }
    }
}

fn put_u32(out: &mut Vec<u8>, v: usize) -> Result<()> {
    let v = u32::try_from(v).map_err(|_| Error::Size(format!("{v} does not fit in u32")))?;
    out.extend_from_slice(&v.to_le_bytes());
    Ok(())
}

fn put_f64(out: &mut Vec<u8>, v: f64) {
    out.extend_from_slice(&v.to_le_bytes());
}

/// RSIM1: magic, `nx`, `ny`, `dx`, then `nx·ny` real samples row-major.
/// Only the real part of the image is stored.
pub fn encode_rsim(img: &Image2D) -> Result<Vec<u8>> {
    let g = img.grid();
    let mut out = Vec::with_capacity(25 + 8 * g.len());
    out.extend_from_slice(RSIM_MAGIC);
    put_u32(&mut out, g.nx)?;
    put_u32(&mut out, g.ny)?;
    put_f64(&mut out, g.dx);
    for z in img.values() {
        put_f64(&mut out, z.re);
    }
    Ok(out)
}

pub fn decode_rsim(bytes: &[u8]) -> Result<Image2D> {
    let mut r = Reader::new(bytes);
    r.magic(RSIM_MAGIC)?;
    let nx = r.u32("nx")?;
    let ny = r.u32("ny")?;
    let dx = r.f64("dx")?;
    let at = r.pos;
    let grid = ImageGrid::new(nx, ny, dx).map_err(|e| Error::Parse { offset: at, message: e.to_string() })?;
    let values = r.f64s(nx * ny, "samples")?;
    r.end()?;
    Image2D::from_real(grid, &values)
}

/// Binary PGM (`P5`, maxval 255) mapped to `[0, 1]`, zero-padded to the next
/// powers of two with the original centered. Row `r` of the file becomes
/// image row `iy = r + offset`.
pub fn decode_pgm(bytes: &[u8], dx: f64) -> Result<Image2D> {
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        // skip whitespace and comments
        while pos < bytes.len() {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else if bytes[pos].is_ascii_whitespace() {
                pos += 1;
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Parse { offset: pos, message: "truncated PGM header".into() });
        }
        fields.push((start, String::from_utf8_lossy(&bytes[start..pos]).into_owned()));
    }
    if fields[0].1 != "P5" {
        return Err(Error::Parse { offset: 0, message: format!("bad magic {:?}, expected \"P5\"", fields[0].1) });
    }
    let number = |k: usize| -> Result<usize> {
        let (off, text) = &fields[k];
        text.parse::<usize>()
            .map_err(|_| Error::Parse { offset: *off, message: format!("expected an integer, got {text:?}") })
    };
    let (w, h, maxval) = (number(1)?, number(2)?, number(3)?);
    if maxval != 255 {
        return Err(Error::UnsupportedFormat(format!("PGM maxval {maxval}; only 255 is supported")));
    }
    if w == 0 || h == 0 {
        return Err(Error::Parse { offset: fields[1].0, message: "empty PGM".into() });
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let need = w * h;
    if bytes.len() < pos + need {
        return Err(Error::Parse {
            offset: bytes.len(),
            message: format!("truncated raster: need {need} bytes from offset {pos}"),
        });
    }
    let raster = &bytes[pos..pos + need];
    let grid = ImageGrid::new(w.next_power_of_two().max(2), h.next_power_of_two().max(2), dx)?;
    let (ox, oy) = ((grid.nx - w) / 2, (grid.ny - h) / 2);
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    for r in 0..h {
        for c in 0..w {
            values[(r + oy) * grid.nx + c + ox] = Complex64::new(raster[r * w + c] as f64 / 255.0, 0.0);
        }
    }
    Image2D::new(grid, values)
}

/// Image file formats accepted by [`ingest_image`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageFormat {
    Pgm,
    F64Raw,
}

impl FromStr for ImageFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pgm" => Ok(Self::Pgm),
            "f64raw" | "rsim" => Ok(Self::F64Raw),
            other => Err(Error::UnsupportedFormat(format!("image format {other:?}; use pgm or f64raw"))),
        }
    }
}

/// Reads an image; `dx` is used for PGM, which carries no spacing.
pub fn ingest_image(path: &Path, format: ImageFormat, dx: f64) -> Result<Image2D> {
    let bytes = fs::read(path)?;
    match format {
        ImageFormat::Pgm => decode_pgm(&bytes, dx),
        ImageFormat::F64Raw => decode_rsim(&bytes),
    }
}

/// RSSG1: magic, `n_v`, `n_t`, `Vmax`, `t` half-range, stage byte, then
/// column-major values (`t` fastest), real or interleaved complex.
pub fn encode_rssg(sino: &Sinogram) -> Result<Vec<u8>> {
    let g = sino.grid();
    let complex = sino.values().iter().any(|z| z.im != 0.0);
    let mut out = Vec::with_capacity(30 + 16 * g.len());
    out.extend_from_slice(RSSG_MAGIC);
    put_u32(&mut out, g.n_v)?;
    put_u32(&mut out, g.n_t)?;
    put_f64(&mut out, g.vmax);
    put_f64(&mut out, g.t_half_range());
    let mut stage = if sino.stage() == Stage::RieszApplied { STAGE_RIESZ } else { 0 };
    if complex {
        stage |= STAGE_COMPLEX;
    }
    out.push(stage);
    for z in sino.values() {
        put_f64(&mut out, z.re);
        if complex {
            put_f64(&mut out, z.im);
        }
    }
    Ok(out)
}

pub fn decode_rssg(bytes: &[u8]) -> Result<Sinogram> {
    let mut r = Reader::new(bytes);
    r.magic(RSSG_MAGIC)?;
    let n_v = r.u32("n_v")?;
    let n_t = r.u32("n_t")?;
    let vmax = r.f64("Vmax")?;
    let half = r.f64("t range")?;
    let at = r.pos;
    let stage_byte = r.u8("stage")?;
    if stage_byte & !(STAGE_RIESZ | STAGE_COMPLEX) != 0 {
        return Err(Error::Parse { offset: at, message: format!("unknown stage byte {stage_byte:#04x}") });
    }
    let grid = SinogramGrid::new(n_v, vmax, n_t, 2.0 * half / n_t.max(1) as f64)
        .map_err(|e| Error::Parse { offset: 5, message: e.to_string() })?;
    let stage = if stage_byte & STAGE_RIESZ != 0 { Stage::RieszApplied } else { Stage::Raw };
    let values = if stage_byte & STAGE_COMPLEX != 0 {
        r.f64s(2 * grid.len(), "samples")?.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect()
    } else {
        r.f64s(grid.len(), "samples")?.into_iter().map(|x| Complex64::new(x, 0.0)).collect()
    };
    r.end()?;
    Sinogram::new(grid, values, stage)
}

/// JSON sidecar written next to an RSVC1 file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeSidecar {
    pub format: String,
    pub mother: String,
    pub gamma: f64,
    pub c_psi: f64,
    pub dx: f64,
    pub levels: Vec<LevelInfo>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelInfo {
    pub j: u32,
    pub a: f64,
    pub da: f64,
    pub ds: f64,
    pub shears: Vec<f64>,
    pub weights: Vec<f64>,
}

impl VolumeSidecar {
    pub fn new(vol: &CoefficientVolume, m: &MotherShearlet) -> Self {
        let lat = vol.lattice();
        let mut slices = vol.slices().iter();
        let levels = lat
            .levels
            .iter()
            .map(|lv| LevelInfo {
                j: lv.j,
                a: lv.a,
                da: lv.da,
                ds: lv.ds,
                shears: lv.shears.clone(),
                weights: lv.shears.iter().map(|_| slices.next().map_or(f64::NAN, |s| s.weight)).collect(),
            })
            .collect();
        Self {
            format: "RSVC1".into(),
            mother: m.id(),
            gamma: lat.gamma,
            c_psi: m.c_psi(),
            dx: lat.grid.dx,
            levels,
        }
    }
}

/// Path of the sidecar belonging to an RSVC1 file: same stem, `.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// RSVC1: magic, `nb_x`, `nb_y`, `n_s`, `n_a`; then the grids `b_x`
/// (`nb_x`), `b_y` (`nb_y`), `a` (`n_a`) and `s` (`n_a × n_s`, one row per
/// scale, NaN past that scale's shear count); then interleaved complex
/// values ordered `(a, s, b_y, b_x)` with NaN in the padded shear slots.
pub fn encode_rsvc(vol: &CoefficientVolume) -> Result<Vec<u8>> {
    let lat = vol.lattice();
    let g = lat.grid;
    let n_a = lat.levels.len();
    let n_s = lat.levels.iter().map(|l| l.shears.len()).max().unwrap_or(0);
    let mut out = Vec::with_capacity(21 + 16 * n_a * n_s * g.len());
    out.extend_from_slice(RSVC_MAGIC);
    for v in [g.nx, g.ny, n_s, n_a] {
        put_u32(&mut out, v)?;
    }
    for ix in 0..g.nx {
        put_f64(&mut out, g.x(ix));
    }
    for iy in 0..g.ny {
        put_f64(&mut out, g.y(iy));
    }
    for lv in &lat.levels {
        put_f64(&mut out, lv.a);
    }
    for lv in &lat.levels {
        for k in 0..n_s {
            put_f64(&mut out, lv.shears.get(k).copied().unwrap_or(f64::NAN));
        }
    }
    let mut slices = vol.slices().iter();
    for lv in &lat.levels {
        for k in 0..n_s {
            if k < lv.shears.len() {
                let sl = slices.next().ok_or(Error::Shape { expected: lat.slice_count(), got: vol.slices().len() })?;
                for z in &sl.values {
                    put_f64(&mut out, z.re);
                    put_f64(&mut out, z.im);
                }
            } else {
                for _ in 0..2 * g.len() {
                    put_f64(&mut out, f64::NAN);
                }
            }
        }
    }
    Ok(out)
}

/// Inverse of [`encode_rsvc`]; spacing, `γ` and weights come from the sidecar.
pub fn decode_rsvc(bytes: &[u8], sidecar: &VolumeSidecar) -> Result<CoefficientVolume> {
    let mut r = Reader::new(bytes);
    r.magic(RSVC_MAGIC)?;
    let nx = r.u32("nb_x")?;
    let ny = r.u32("nb_y")?;
    let n_s = r.u32("n_s")?;
    let n_a = r.u32("n_a")?;
    let grid = ImageGrid::new(nx, ny, sidecar.dx).map_err(|e| Error::Parse { offset: 5, message: e.to_string() })?;
    r.f64s(nx, "b_x grid")?;
    r.f64s(ny, "b_y grid")?;
    let a_grid = r.f64s(n_a, "a grid")?;
    let s_grid = r.f64s(n_a * n_s, "s grid")?;
    if sidecar.levels.len() != n_a {
        return Err(Error::Shape { expected: n_a, got: sidecar.levels.len() });
    }
    let mut levels = Vec::with_capacity(n_a);
    let mut slices = Vec::new();
    for (ia, info) in sidecar.levels.iter().enumerate() {
        let a = a_grid[ia];
        let shears: Vec<f64> = s_grid[ia * n_s..(ia + 1) * n_s].iter().copied().filter(|s| !s.is_nan()).collect();
        if shears.len() != info.weights.len() {
            return Err(Error::Shape { expected: shears.len(), got: info.weights.len() });
        }
        for k in 0..n_s {
            let raw = r.f64s(2 * grid.len(), "coefficients")?;
            if k < shears.len() {
                let values = raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
                slices.push(CoefficientSlice { s: shears[k], a, weight: info.weights[k], values });
            }
        }
        let da = if info.da.is_finite() { info.da } else { a.abs() * LN_2 };
        levels.push(ShearLevel { j: info.j, a, da, ds: info.ds, shears });
    }
    r.end()?;
    let lattice = Lattice { grid, gamma: sidecar.gamma, levels };
    Ok(CoefficientVolume::new(lattice, slices))
}

/// Writes `vol` to `path` and its sidecar next to it.
pub fn save_volume(path: &Path, vol: &CoefficientVolume, m: &MotherShearlet) -> Result<()> {
    fs::write(path, encode_rsvc(vol)?)?;
    let side = serde_json::to_string_pretty(&VolumeSidecar::new(vol, m))
        .map_err(|e| Error::Domain(format!("sidecar serialization failed: {e}")))?;
    fs::write(sidecar_path(path), side)?;
    Ok(())
}

pub fn load_volume(path: &Path) -> Result<(CoefficientVolume, VolumeSidecar)> {
    let bytes = fs::read(path)?;
    let text = fs::read_to_string(sidecar_path(path))?;
    let side: VolumeSidecar = serde_json::from_str(&text).map_err(|e| Error::Parse {
        offset: 0,
        message: format!("sidecar {}: {e}", sidecar_path(path).display()),
    })?;
    Ok((decode_rsvc(&bytes, &side)?, side))
}
