use std::fs;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shearadon::image::{Image2D, ImageGrid};
use shearadon::io::*;
use shearadon::radon::{Sinogram, SinogramGrid, Stage};
use shearadon::shearlet::{make_mother, CoefficientSlice, CoefficientVolume, Lattice};
use shearadon::{Complex64, Error};

fn random_image(nx: usize, ny: usize, dx: f64, seed: u64) -> Image2D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<f64> = (0..nx * ny).map(|_| rng.random_range(-1.0..1.0)).collect();
    Image2D::from_real(ImageGrid::new(nx, ny, dx).unwrap(), &v).unwrap()
}

fn pgm(w: usize, h: usize, raster: &[u8]) -> Vec<u8> {
    let mut bytes = format!("P5\n# test\n{w} {h}\n255\n").into_bytes();
    bytes.extend_from_slice(raster);
    bytes
}

#[test]
fn rsim_roundtrip_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("img.rsim");
    let img = random_image(32, 16, 1.0 / 64.0, 3);
    let bytes = encode_rsim(&img).unwrap();
    assert_eq!(&bytes[..5], b"RSIM1");
    assert_eq!(bytes.len(), 5 + 4 + 4 + 8 + 8 * 32 * 16);
    fs::write(&path, &bytes).unwrap();
    let back = ingest_image(&path, "f64raw".parse().unwrap(), 0.0).unwrap();
    assert_eq!(back.grid(), img.grid());
    for (a, b) in back.values().iter().zip(img.values()) {
        assert_eq!(a.re.to_bits(), b.re.to_bits());
    }
    assert_eq!(encode_rsim(&back).unwrap(), bytes);
}

#[test]
fn two_by_two_pgm() {
    let img = decode_pgm(&pgm(2, 2, &[0, 51, 255, 102]), 0.25).unwrap();
    assert_eq!(*img.grid(), ImageGrid::square(2, 0.25).unwrap());
    let re: Vec<f64> = img.values().iter().map(|z| z.re).collect();
    assert_eq!(re, vec![0.0, 0.2, 1.0, 0.4]);
}

#[test]
fn odd_sized_pgm_is_centered_in_a_power_of_two() {
    let (w, h) = (300, 200);
    let raster: Vec<u8> = (0..w * h).map(|k| ((k * 7 + k / w) % 256) as u8).collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("img.pgm");
    fs::write(&path, pgm(w, h, &raster)).unwrap();
    let img = ingest_image(&path, ImageFormat::Pgm, 1.0 / 128.0).unwrap();
    let g = *img.grid();
    assert_eq!((g.nx, g.ny), (512, 256));
    let (ox, oy) = ((512 - w) / 2, (256 - h) / 2);
    assert_eq!(img.at(ox, oy).re, raster[0] as f64 / 255.0);
    assert_eq!(img.at(ox + w - 1, oy + h - 1).re, raster[w * h - 1] as f64 / 255.0);
    assert_eq!(img.at(ox - 1, oy).re, 0.0);
    assert_eq!(img.at(ox, oy + h).re, 0.0);
    let file_energy: f64 = raster.iter().map(|b| (*b as f64 / 255.0).powi(2)).sum();
    let img_energy: f64 = img.values().iter().map(|z| z.norm_sqr()).sum();
    assert!((file_energy - img_energy).abs() < 1e-9 * file_energy);
}

#[test]
fn unknown_format_names_are_rejected() {
    assert!(matches!("png".parse::<ImageFormat>(), Err(Error::UnsupportedFormat(_))));
    assert_eq!("rsim".parse::<ImageFormat>().unwrap(), ImageFormat::F64Raw);
}

#[test]
fn rssg_roundtrip_real_and_complex() {
    let grid = SinogramGrid::new(9, 2.0, 16, 0.125).unwrap();
    let real = Sinogram::from_fn(grid, Stage::Raw, |v, t| Complex64::new(v * t + 0.5, 0.0));
    let bytes = encode_rssg(&real).unwrap();
    assert_eq!(bytes[29], 0x00);
    assert_eq!(bytes.len(), 30 + 8 * grid.len());
    let back = decode_rssg(&bytes).unwrap();
    assert_eq!(back.stage(), Stage::Raw);
    assert_eq!(back.values(), real.values());
    assert_eq!(back.grid().t_half_range(), grid.t_half_range());

    let cplx = Sinogram::from_fn(grid, Stage::RieszApplied, |v, t| Complex64::new(v, -t));
    let bytes = encode_rssg(&cplx).unwrap();
    assert_eq!(bytes[29], 0x81);
    let back = decode_rssg(&bytes).unwrap();
    assert_eq!(back.stage(), Stage::RieszApplied);
    assert_eq!(back.values(), cplx.values());
}

#[test]
fn rssg_rejects_unknown_stage_bits() {
    let grid = SinogramGrid::new(3, 1.0, 8, 0.25).unwrap();
    let mut bytes = encode_rssg(&Sinogram::zeros(grid, Stage::Raw)).unwrap();
    bytes[29] = 0x04;
    assert!(matches!(decode_rssg(&bytes), Err(Error::Parse { offset: 29, .. })));
}

#[test]
fn rsvc_save_and_load_roundtrip() {
    let m = make_mother("meyer-annulus", "meyer-bump", 0.5).unwrap();
    let grid = ImageGrid::square(8, 1.0 / 16.0).unwrap();
    let lattice = Lattice::dyadic(grid, 0.5, 2, 1.5, true).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let slices = lattice
        .points()
        .into_iter()
        .map(|(s, a, weight)| CoefficientSlice {
            s,
            a,
            weight,
            values: (0..grid.len()).map(|_| Complex64::new(rng.random(), rng.random())).collect(),
        })
        .collect();
    let vol = CoefficientVolume::new(lattice, slices);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("coeffs.rsvc");
    save_volume(&path, &vol, &m).unwrap();
    assert!(sidecar_path(&path).exists());
    let (back, side) = load_volume(&path).unwrap();
    assert_eq!(side.format, "RSVC1");
    assert_eq!(side.mother, m.id());
    assert_eq!(side.c_psi, m.c_psi());
    assert_eq!(back.lattice().grid, vol.lattice().grid);
    assert_eq!(back.slices().len(), vol.slices().len());
    for (p, q) in back.slices().iter().zip(vol.slices()) {
        assert_eq!((p.s, p.a, p.weight), (q.s, q.a, q.weight));
        assert_eq!(p.values, q.values);
    }
    assert_eq!(back.relative_error(&vol).unwrap(), 0.0);

    // padded shear slots are NaN on disk
    let bytes = fs::read(&path).unwrap();
    let n_s = vol.lattice().levels.iter().map(|l| l.shears.len()).max().unwrap();
    let first_level = vol.lattice().levels[0].shears.len();
    assert!(first_level < n_s);
    let s_grid_start = 5 + 16 + 8 * (8 + 8 + vol.lattice().levels.len());
    let pad = s_grid_start + 8 * first_level;
    assert!(f64::from_le_bytes(bytes[pad..pad + 8].try_into().unwrap()).is_nan());
}

#[test]
fn bad_magic_and_truncation_report_offsets() {
    let img = random_image(4, 4, 0.5, 1);
    let mut bytes = encode_rsim(&img).unwrap();
    match decode_rsim(&bytes[..40]) {
        Err(Error::Parse { offset, .. }) => assert_eq!(offset, 40),
        other => panic!("{other:?}"),
    }
    bytes[0] = b'X';
    assert!(matches!(decode_rsim(&bytes), Err(Error::Parse { offset: 0, .. })));
    assert!(matches!(decode_rssg(b"RSIM1"), Err(Error::Parse { offset: 0, .. })));
    match decode_rssg(b"RSSG1\x03\0\0") {
        Err(Error::Parse { offset, .. }) => assert_eq!(offset, 8),
        other => panic!("{other:?}"),
    }
    let mut extra = encode_rsim(&img).unwrap();
    extra.push(0);
    assert!(matches!(decode_rsim(&extra), Err(Error::Parse { .. })));
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = ingest_image(&dir.path().join("none.pgm"), ImageFormat::Pgm, 1.0).unwrap_err();
    assert!(matches!(err, Error::Io(_)));
    let err = load_volume(&dir.path().join("none.rsvc")).unwrap_err();
    assert!(matches!(err, Error::Io(_)));
}
