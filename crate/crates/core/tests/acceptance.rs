//! Acceptance suite: one pass/fail line per criterion, nonzero exit on any failure.

use std::f64::consts::LN_2;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shearadon::groups::{heisenberg_exp, verify_family, DilationFamily};
use shearadon::image::{Field2D, Image2D, ImageGrid};
use shearadon::phantom::{Combination, ConeNoise, ConeNoiseParams, Gaussian};
use shearadon::radon::{
    affine_radon, apply_riesz, fourier_slice_residual, unitary_q, SinogramGrid, DEFAULT_NV, DEFAULT_VMAX,
};
use shearadon::shearlet::{
    direct_transform, make_mother, pipeline_transform, reconstruct, riesz_pipeline_transform, Intertwiner, Lattice,
};
use shearadon::signal::{calderon_constant, hilbert_derivative_residual, Wavelet1D};
use shearadon::{Complex64, Result};

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn cone_grid(n: usize) -> ImageGrid {
    ImageGrid::square(n, 1.0 / 64.0).expect("valid grid")
}

fn default_mother() -> Result<shearadon::shearlet::MotherShearlet> {
    make_mother("meyer-annulus", "meyer-bump", 0.5)
}

fn c1() -> Result<Outcome> {
    let families = [
        DilationFamily::standard(2, 1.0 / 3.0)?,
        DilationFamily::standard(2, 0.5)?,
        DilationFamily::standard(3, 1.0 / 3.0)?,
        DilationFamily::standard(3, 0.5)?,
        DilationFamily::toeplitz(4, 0.5)?,
        DilationFamily::toeplitz(5, 0.5)?,
        DilationFamily::heisenberg(0.5),
    ];
    let mut worst = 0.0_f64;
    let mut all = true;
    for (k, fam) in families.iter().enumerate() {
        let rep = verify_family(fam, 100, 1000 + k as u64)?;
        all &= rep.pass;
        worst = rep.metrics().iter().fold(worst, |w, (_, v)| w.max(*v));
    }
    let heis = Arc::new(DilationFamily::heisenberg(0.5));
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut exp_err = 0.0_f64;
    for _ in 0..50 {
        let (q, p, t) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let (m, g) = heisenberg_exp(&heis, q, p, t)?;
        let gm = g.matrix();
        for i in 0..4 {
            for j in 0..4 {
                exp_err = exp_err.max((m[(i, j)] - gm[(i, j)]).abs());
            }
        }
    }
    check(
        all && worst <= 1e-10 && exp_err <= 1e-12,
        format!("max axiom residual {worst:.2e} (tol 1e-10), exp mismatch {exp_err:.2e}"),
    )
}

fn c2() -> Result<Outcome> {
    let gg = ImageGrid::square(512, 1.0 / 32.0)?;
    let gimg = Image2D::sample(gg, &Gaussian::default());
    let gs = affine_radon(&gimg, &SinogramGrid::for_image(&gg, DEFAULT_VMAX, DEFAULT_NV)?)?;
    let r_gauss = fourier_slice_residual(&gimg, &gs);
    let cg = cone_grid(256);
    let cimg = ConeNoise::generate(&cg, 11)?.image(cg);
    let cs = affine_radon(&cimg, &SinogramGrid::for_image(&cg, DEFAULT_VMAX, DEFAULT_NV)?)?;
    let r_cone = fourier_slice_residual(&cimg, &cs);
    check(
        r_gauss <= 1e-3 && r_cone <= 1e-2,
        format!("gaussian 512² {r_gauss:.2e} (tol 1e-3), cone 256² {r_cone:.2e} (tol 1e-2)"),
    )
}

fn c3() -> Result<Outcome> {
    let g = cone_grid(256);
    let sg = SinogramGrid::for_image(&g, DEFAULT_VMAX, DEFAULT_NV)?;
    let f = ConeNoise::generate(&g, 21)?;
    let h = ConeNoise::generate(&g, 22)?;
    let fimg = f.image(g);
    let mix = Combination { terms: vec![(Complex64::new(0.5, 0.0), &f as &dyn Field2D), (Complex64::new(1.0, 0.0), &h)] };
    let gimg = Image2D::sample(g, &mix);
    let qf = unitary_q(&fimg, &sg)?;
    let qg = unitary_q(&gimg, &sg)?;
    let ratio = qf.sinogram.norm() / fimg.norm();
    let lhs = fimg.inner(&gimg);
    let polar = (qf.sinogram.inner(&qg.sinogram) - lhs).norm() / lhs.norm();
    check(
        (ratio - 1.0).abs() <= 2e-2 && polar <= 2e-2,
        format!("parseval ratio {ratio:.4} (tol 2e-2), polarization {polar:.2e} (tol 2e-2)"),
    )
}

fn c4() -> Result<Outcome> {
    let g = cone_grid(256);
    let field = ConeNoise::generate_with(&g, 11, ConeNoiseParams { width: 0.1, ..Default::default() })?;
    let sg = SinogramGrid::for_image(&g, DEFAULT_VMAX, DEFAULT_NV)?.with_offsets(1024)?;
    let it = Intertwiner::new(&field, g, sg, 0.5)?;
    let triples = [
        ([0.15, -0.1], 0.0, 1.0),
        ([0.0, 0.0], 0.5, 1.0),
        ([0.0, 0.0], -1.0, 1.0),
        ([0.0, 0.0], 0.0, 2.0),
        ([0.0, 0.0], 0.0, -2.0),
        ([0.0, 0.0], 0.0, 0.5),
        ([0.0, 0.0], 0.0, -0.5),
        ([0.1, 0.2], 0.5, 0.5),
        ([-0.2, 0.1], -0.75, -2.0),
        ([0.05, -0.15], 1.0, 2.0),
    ];
    let mut worst = 0.0_f64;
    for (b, s, a) in triples {
        worst = worst.max(it.residual(b, s, a)?.residual);
    }
    check(worst <= 2e-2, format!("worst of {} triples {worst:.2e} (tol 2e-2)", triples.len()))
}

fn c5() -> Result<Outcome> {
    let m = default_mother()?;
    let g = cone_grid(256);
    let lat = Lattice::dyadic(g, 0.5, 3, 1.5, true)?;
    let img = ConeNoise::generate(&g, 11)?.image(g);
    let direct = direct_transform(&img, &m, &lat)?;
    let sino = affine_radon(&img, &SinogramGrid::for_image(&g, DEFAULT_VMAX, DEFAULT_NV)?)?;
    let pipe = pipeline_transform(&sino, &m, &lat)?;
    let riesz = riesz_pipeline_transform(&apply_riesz(&sino)?, &m, &lat)?;
    let e_dp = pipe.relative_error(&direct)?;
    let e_dr = riesz.relative_error(&direct)?;
    let e_pr = riesz.relative_error(&pipe)?;
    check(
        e_dp <= 1e-2 && e_dr <= 1e-2 && e_pr <= 1e-2,
        format!("direct/pipeline {e_dp:.2e}, direct/riesz {e_dr:.2e}, pipeline/riesz {e_pr:.2e} (tol 1e-2)"),
    )
}

fn c6() -> Result<Outcome> {
    let ind = make_mother("indicator-annulus:[1,2]", "meyer-bump", 0.5)?;
    let e_ind = (ind.c_psi() - 2.0 * LN_2).abs();
    let m = default_mother()?;
    let fine = m.psi1().grid().refined(2);
    let psi1 = Wavelet1D::with_grid(m.psi1_id(), m.psi1().spectrum().clone(), fine);
    let psi2_norm2 = fine.integrate(|u| m.psi2().eval(u).norm_sqr());
    let refined = calderon_constant(&psi1) * psi2_norm2;
    let drift = (refined - m.c_psi()).abs();
    check(
        e_ind <= 1e-3 && m.c_psi().is_finite() && m.c_psi() > 0.0 && drift <= 1e-3,
        format!(
            "indicator |C-2ln2| {e_ind:.2e} (tol 1e-3), meyer C {:.6} drift under 2× refinement {drift:.2e} (tol 1e-3)",
            m.c_psi()
        ),
    )
}

fn c7() -> Result<Outcome> {
    let m = default_mother()?;
    let g = cone_grid(128);
    let bg = cone_grid(256);
    let lat = Lattice::dyadic(bg, 0.5, 3, 1.5, true)?;
    let img = ConeNoise::generate(&g, 11)?.image(g);
    let direct = direct_transform(&img, &m, &lat)?;
    let e_direct = reconstruct(&direct, &m)?.cropped(g)?.relative_error(&img);
    let sino = affine_radon(&img, &SinogramGrid::for_image(&bg, DEFAULT_VMAX, DEFAULT_NV)?)?;
    let pipe = pipeline_transform(&sino, &m, &lat)?;
    let e_pipe = reconstruct(&pipe, &m)?.cropped(g)?.relative_error(&img);
    check(
        e_direct <= 5e-2 && e_pipe <= 7e-2,
        format!("from direct {e_direct:.2e} (tol 5e-2), from sinogram {e_pipe:.2e} (tol 7e-2)"),
    )
}

fn c8() -> Result<Outcome> {
    let psi1 = Wavelet1D::preset("meyer-annulus")?;
    let r = hilbert_derivative_residual(&psi1, 4096, 1.0 / 16.0)?;
    check(r <= 1e-10, format!("spectral residual {r:.2e} (tol 1e-10)"))
}

type Criterion = (&'static str, fn() -> Result<Outcome>, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("group axioms", c1, Duration::from_secs(1)),
        ("fourier slice", c2, Duration::from_secs(10)),
        ("unitarity of Q", c3, Duration::from_secs(10)),
        ("intertwining", c4, Duration::from_secs(60)),
        ("direct vs pipeline", c5, Duration::from_secs(120)),
        ("admissibility", c6, Duration::from_secs(1)),
        ("reconstruction", c7, Duration::from_secs(120)),
        ("chi identity", c8, Duration::from_secs(1)),
    ];
    let mut failures = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(o) => (o.pass && took <= *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {}: {} [{name}] {detail}; {:.2}s (budget {}s)",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
