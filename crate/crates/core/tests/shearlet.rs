use std::f64::consts::LN_2;
use std::sync::Arc;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shearadon::groups::{build_element, compose, inverse, DilationFamily};
use shearadon::image::{Image2D, ImageGrid};
use shearadon::phantom::{ConeNoise, ConeNoiseParams, ShearletAction};
use shearadon::radon::{affine_radon, apply_riesz, Sinogram, SinogramGrid, Stage, DEFAULT_NV, DEFAULT_VMAX};
use shearadon::shearlet::*;
use shearadon::{Complex64, Error};

fn mother() -> MotherShearlet {
    make_mother("meyer-annulus", "meyer-bump", 0.5).unwrap()
}

fn grid(n: usize) -> ImageGrid {
    ImageGrid::square(n, 1.0 / 64.0).unwrap()
}

fn default_lattice(g: ImageGrid) -> Lattice {
    Lattice::dyadic(g, 0.5, 3, 1.5, true).unwrap()
}

#[test]
fn indicator_mother_constant_is_two_ln_two() {
    let m = make_mother("indicator-annulus:[1,2]", "meyer-bump", 0.5).unwrap();
    assert!((m.c_psi() - 2.0 * LN_2).abs() < 1e-3, "{}", m.c_psi());
}

#[test]
fn prefactor_exponents() {
    assert_eq!(pipeline_exponent(2, 0.5), -0.75);
    assert_eq!(riesz_pipeline_exponent(2, 0.5), -0.25);
    for d in 2..6 {
        for gamma in [0.25, 1.0 / 3.0, 0.5, 0.8] {
            let fam = DilationFamily::standard(d, gamma).unwrap();
            let general = (fam.lambda_sum() + 1.0 - d as f64) / 2.0;
            assert!((pipeline_exponent(d, gamma) - general).abs() < 1e-15);
            // the Riesz path carries ℐ's |a|^{(d-1)/2} on top
            assert!((riesz_pipeline_exponent(d, gamma) - general - (d as f64 - 1.0) / 2.0).abs() < 1e-15);
        }
    }
}

#[test]
fn scale_filter_examples() {
    let m = mother();
    let f1 = scale_filter(&m, 1.0).unwrap();
    let f4 = scale_filter(&m, 0.25).unwrap();
    for v in [-0.9, -0.3, 0.0, 0.2, 0.45, 0.7] {
        assert!((f1.eval(v) - m.phi2(-v).conj()).norm() < 1e-15);
        assert!((f4.eval(v) - m.phi2(2.0 * v)).norm() < 1e-15);
    }
    assert!((f4.radius() - 0.5).abs() < 1e-15);
    assert!(matches!(scale_filter(&m, 0.0), Err(Error::Domain(_))));
}

#[test]
fn atoms_preserve_the_norm() {
    // coarse atoms need a wide box for the Riemann sum of |F atom|² to converge
    let m = mother();
    let fine = ImageGrid::square(1024, 1.0 / 64.0).unwrap();
    let coarse = ImageGrid::square(1024, 1.0 / 16.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let expect = m.norm2().sqrt();
    for _ in 0..20 {
        let j = rng.random_range(0..4);
        let a = 0.5f64.powi(j) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let s = rng.random_range(-1.0..1.0);
        let b = [rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)];
        let g = if j < 2 { coarse } else { fine };
        let atom = shear_atom(&m, &g, b, s, a).unwrap();
        assert!((atom.norm() - expect).abs() < 1e-6 * expect, "s={s} a={a}: {} vs {expect}", atom.norm());
    }
}

#[test]
fn atom_support_is_dilated_by_the_transpose() {
    let m = mother();
    let g = grid(256);
    let (s, a) = (0.0, 0.25);
    let spec = shear_atom(&m, &g, [0.0, 0.0], s, a).unwrap().spectrum();
    let mut seen = 0;
    for my in 0..g.ny {
        for mx in 0..g.nx {
            let (x1, x2) = (g.xi1(mx), g.xi2(my));
            let inside = (0.5..=2.0).contains(&(a * x1).abs()) && (x2 / x1 - s).abs() <= a.abs().sqrt();
            if spec[my * g.nx + mx].norm() > 1e-9 {
                seen += 1;
                assert!(inside, "energy at ({x1}, {x2})");
            }
        }
    }
    assert!(seen > 100);
}

#[test]
fn reproducing_peak() {
    let m = mother();
    let g = grid(512);
    let lat = default_lattice(g);
    let (b0, s0, a0) = ([8.0 * g.dx, -4.0 * g.dx], 0.5303300858899106, 0.125);
    let f = shear_atom(&m, &g, b0, s0, a0).unwrap();
    let vol = direct_transform(&f, &m, &lat).unwrap();
    let peak = vol.slice(s0, a0).unwrap().values[(g.ny / 2 - 4) * g.nx + g.nx / 2 + 8];
    assert!((peak - m.norm2()).norm() < 1e-4 * m.norm2(), "{peak} vs {}", m.norm2());
    let max = vol.slices().iter().flat_map(|s| s.values.iter()).fold(0.0f64, |x, z| x.max(z.norm()));
    assert!((max - peak.norm()).abs() < 1e-12);
}

#[test]
fn transforms_are_linear() {
    let m = mother();
    let g = grid(128);
    let lat = default_lattice(g);
    let f = ConeNoise::generate(&g, 1).unwrap().image(g);
    let h = ConeNoise::generate(&g, 2).unwrap().image(g);
    let (c1, c2) = (Complex64::new(0.7, -0.2), Complex64::new(-1.3, 0.4));
    let mix = f.scaled(c1).added(&h.scaled(c2));
    let check = |vf: &CoefficientVolume, vh: &CoefficientVolume, vm: &CoefficientVolume| {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for ((x, y), z) in vf.slices().iter().zip(vh.slices()).zip(vm.slices()) {
            for k in 0..z.values.len() {
                worst = worst.max((x.values[k] * c1 + y.values[k] * c2 - z.values[k]).norm());
                scale = scale.max(z.values[k].norm());
            }
        }
        assert!(worst <= 1e-12 * scale.max(1.0), "{worst}");
    };
    let d = |i: &Image2D| direct_transform(i, &m, &lat).unwrap();
    check(&d(&f), &d(&h), &d(&mix));
    let sg = SinogramGrid::for_image(&g, DEFAULT_VMAX, DEFAULT_NV).unwrap();
    let p = |i: &Image2D| pipeline_transform(&affine_radon(i, &sg).unwrap(), &m, &lat).unwrap();
    check(&p(&f), &p(&h), &p(&mix));
}

#[test]
fn covariance_under_grid_compatible_elements() {
    // whole-pixel translations at every scale; a shear that maps even rows onto
    // the grid at the compact scales, with enough padding that no atom wraps
    let m = mother();
    let g = grid(256);
    let field = ConeNoise::generate_with(&g, 4, ConeNoiseParams { width: 0.1, ..Default::default() }).unwrap();
    let fam = Arc::new(DilationFamily::standard(2, 0.5).unwrap());
    let mut compact = default_lattice(g);
    compact.levels.retain(|l| l.j >= 2);
    let cases = [
        ([6.0 * g.dx, -10.0 * g.dx], 0.0, default_lattice(g), DirectOptions::default()),
        ([0.0, 0.0], 0.5, compact, DirectOptions { padding: 4 }),
    ];
    for (b0, s0, lat, opts) in cases {
        let base = direct_transform_with(&Image2D::sample(g, &field), &m, &lat, opts).unwrap();
        let top = base.slices().iter().flat_map(|s| s.values.iter()).fold(0.0f64, |x, z| x.max(z.norm()));
        let moved = ShearletAction { field: &field, b: b0, s: s0, a: 1.0, gamma: 0.5 };
        let vol = direct_transform_with(&Image2D::sample(g, &moved), &m, &lat, opts).unwrap();
        let g0inv = inverse(&build_element(&fam, DVector::from_element(1, s0), 1.0).unwrap());
        let mut compared = 0;
        for sl in vol.slices() {
            let h = build_element(&fam, DVector::from_element(1, sl.s), sl.a).unwrap();
            let prod = compose(&g0inv, &h).unwrap();
            let Some(target) = base.slice(prod.shear()[0], prod.scale()) else { continue };
            for iy in (g.ny / 4..3 * g.ny / 4).step_by(2) {
                for ix in g.nx / 4..3 * g.nx / 4 {
                    let (bx, by) = (g.x(ix) - b0[0], g.y(iy) - b0[1]);
                    // h₀⁻¹(b - b₀) for the unit-scale shear h₀ = [[1, -s₀], [0, 1]]
                    let (px, py) = (bx + s0 * by, by);
                    let jx = (px / g.dx + (g.nx / 2) as f64).round() as usize;
                    let jy = (py / g.dx + (g.ny / 2) as f64).round() as usize;
                    let diff = (sl.values[iy * g.nx + ix] - target.values[jy * g.nx + jx]).norm();
                    assert!(diff <= 1e-6 * top, "s0={s0} s={} a={} diff {diff} top {top}", sl.s, sl.a);
                }
            }
            compared += 1;
        }
        assert!(compared >= 20, "{compared}");
    }
}

#[test]
fn energy_ratio_on_the_default_lattice() {
    let m = mother();
    let g = grid(256);
    let img = ConeNoise::generate(&g, 11).unwrap().image(g);
    let vol = direct_transform(&img, &m, &default_lattice(g)).unwrap();
    let ratio = vol.energy() / (m.c_psi() * img.norm().powi(2));
    assert!((0.9..=1.1).contains(&ratio), "{ratio}");
}

#[test]
fn pipeline_preconditions() {
    let m = mother();
    let g = grid(128);
    let lat = default_lattice(g);
    let sg = SinogramGrid::for_image(&g, DEFAULT_VMAX, DEFAULT_NV).unwrap();
    let zero = Sinogram::zeros(sg, Stage::Raw);
    let vol = pipeline_transform(&zero, &m, &lat).unwrap();
    assert!(vol.slices().iter().all(|s| s.values.iter().all(|z| *z == Complex64::new(0.0, 0.0))));
    assert!(matches!(pipeline_transform(&Sinogram::zeros(sg, Stage::RieszApplied), &m, &lat), Err(Error::Stage(_))));
    assert!(matches!(riesz_pipeline_transform(&zero, &m, &lat), Err(Error::Stage(_))));
    let narrow = SinogramGrid::for_image(&g, 2.0, 129).unwrap();
    match pipeline_transform(&Sinogram::zeros(narrow, Stage::Raw), &m, &lat) {
        Err(Error::Coverage(msg)) => assert!(msg.contains("a = 1"), "{msg}"),
        other => panic!("expected a coverage error, got {other:?}"),
    }
}

#[test]
fn direct_pipeline_and_riesz_paths_agree() {
    let m = mother();
    let g = grid(256);
    let lat = default_lattice(g);
    let img = ConeNoise::generate(&g, 11).unwrap().image(g);
    let direct = direct_transform(&img, &m, &lat).unwrap();
    let sino = affine_radon(&img, &SinogramGrid::for_image(&g, DEFAULT_VMAX, DEFAULT_NV).unwrap()).unwrap();
    let pipe = pipeline_transform(&sino, &m, &lat).unwrap();
    let riesz = riesz_pipeline_transform(&apply_riesz(&sino).unwrap(), &m, &lat).unwrap();
    let e1 = pipe.relative_error(&direct).unwrap();
    let e2 = riesz.relative_error(&direct).unwrap();
    let e3 = riesz.relative_error(&pipe).unwrap();
    assert!(e1 <= 1e-2 && e2 <= 1e-2 && e3 <= 1e-2, "{e1} {e2} {e3}");
}

#[test]
fn reconstruction_from_both_paths() {
    let m = mother();
    let g = grid(128);
    // translations extend past the image so that atoms overlapping it are kept
    let bg = grid(256);
    let lat = default_lattice(bg);
    let img = ConeNoise::generate(&g, 11).unwrap().image(g);
    let direct = direct_transform(&img, &m, &lat).unwrap();
    let e1 = reconstruct(&direct, &m).unwrap().cropped(g).unwrap().relative_error(&img);
    assert!(e1 <= 5e-2, "{e1}");
    let sino = affine_radon(&img, &SinogramGrid::for_image(&bg, DEFAULT_VMAX, DEFAULT_NV).unwrap()).unwrap();
    let pipe = pipeline_transform(&sino, &m, &lat).unwrap();
    let e2 = reconstruct(&pipe, &m).unwrap().cropped(g).unwrap().relative_error(&img);
    assert!(e2 <= 7e-2, "{e2}");
}

#[test]
fn zero_volume_reconstructs_zero() {
    let m = mother();
    let g = grid(64);
    let lat = Lattice::dyadic(g, 0.5, 2, 1.5, true).unwrap();
    let vol = direct_transform(&Image2D::zeros(g), &m, &lat).unwrap();
    assert_eq!(reconstruct(&vol, &m).unwrap().norm(), 0.0);
}

fn intertwiner_setup() -> (ConeNoise, ImageGrid, SinogramGrid) {
    let g = grid(256);
    let field = ConeNoise::generate_with(&g, 11, ConeNoiseParams { width: 0.1, ..Default::default() }).unwrap();
    let sg = SinogramGrid::for_image(&g, DEFAULT_VMAX, DEFAULT_NV).unwrap().with_offsets(1024).unwrap();
    (field, g, sg)
}

#[test]
fn intertwining_holds_on_the_cone_phantom() {
    let (field, g, sg) = intertwiner_setup();
    let it = Intertwiner::new(&field, g, sg, 0.5).unwrap();
    assert!(it.residual([0.0, 0.0], 0.0, 1.0).unwrap().residual < 1e-12);
    for (b, s, a) in [([0.0, 0.0], 0.0, 2.0), ([0.0, 0.0], 0.5, 1.0), ([0.1, 0.2], 0.5, 0.5), ([-0.2, 0.1], -0.75, -2.0)] {
        let r = it.residual(b, s, a).unwrap();
        assert!(r.residual <= 2e-2, "{b:?} {s} {a}: {r:?}");
    }
}

#[test]
fn dilation_prefactor_is_half_the_codimension_gap() {
    // d = 2: λ_D = γ - 1, and Q S_{0,0,a} f = |a|^{-(1-λ_D)/2}·(dilated Qf)
    let (field, g, sg) = intertwiner_setup();
    let it = Intertwiner::new(&field, g, sg, 0.5).unwrap();
    let lambda_d = 0.5 - 1.0;
    let right = it.residual_with([0.0, 0.0], 0.0, 0.5, -(1.0 - lambda_d) / 2.0).unwrap();
    let tripled = it.residual_with([0.0, 0.0], 0.0, 0.5, -3.0 * (1.0 - lambda_d) / 2.0).unwrap();
    assert!(right.residual <= 2e-2, "{right:?}");
    assert!(tripled.residual > 0.5, "{tripled:?}");
}

#[test]
fn intertwining_reports_coverage_loss() {
    let (_, g, sg) = intertwiner_setup();
    let wide = ConeNoise::generate_with(&g, 11, ConeNoiseParams { width: 0.06, ..Default::default() }).unwrap();
    let it = Intertwiner::new(&wide, g, sg, 0.5).unwrap();
    assert!(matches!(it.residual([0.0, 0.0], 0.0, 0.5), Err(Error::Coverage(_))));
}
