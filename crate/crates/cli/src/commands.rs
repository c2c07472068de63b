//! One function per subcommand; each returns the rows of its report.

use std::fs;
use std::io::Read;
use std::path::Path;

use shearadon::groups::{verify_family, DilationFamily};
use shearadon::image::{Image2D, ImageGrid};
use shearadon::io::{
    decode_rssg, encode_rsim, encode_rssg, ingest_image, load_volume, save_volume, ImageFormat, RSSG_MAGIC,
    RSVC_MAGIC,
};
use shearadon::phantom::{ConeNoise, Gaussian};
use shearadon::radon::{
    affine_radon, apply_riesz, fourier_slice_report, unitary_q, Sinogram, SinogramGrid, SliceOptions, Stage,
};
use shearadon::shearlet::{
    direct_transform, make_mother, pipeline_transform, reconstruct, riesz_pipeline_transform, CoefficientVolume,
    Lattice, MotherShearlet,
};
use shearadon::signal::{calderon_constant, hilbert_derivative_residual};
use shearadon::Error;

use crate::args::{Cli, Command, Job, Method, Phantom};
use crate::report::{number, Report};
use crate::{CliError, InModule};

const CONE_DX: f64 = 1.0 / 64.0;
const GAUSS_DX: f64 = 1.0 / 32.0;
/// Spatial grid for the Hilbert-derivative check of ψ₁.
const CHI_SAMPLES: usize = 4096;
const CHI_DX: f64 = 1.0 / 16.0;

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let job = cli.job();
    if let Some(n) = job.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure {n} threads: {e}")))?;
    }
    match &cli.command {
        Command::GroupCheck(j) => group_check(j),
        Command::Radon(j) => radon(j),
        Command::SliceCheck(j) => slice_check(j),
        Command::Shear(j) => shear(j),
        Command::Compare(j) => compare(j),
        Command::Reconstruct(j) => reconstruct_cmd(j),
        Command::Admissibility(j) => admissibility(j),
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// First five bytes of a file, if it has that many.
fn magic(path: &Path) -> Result<Option<[u8; 5]>, CliError> {
    let io = |source| CliError::Io { path: path.display().to_string(), source };
    let mut head = [0u8; 5];
    let mut file = fs::File::open(path).map_err(io)?;
    let mut got = 0;
    while got < 5 {
        match file.read(&mut head[got..]).map_err(io)? {
            0 => return Ok(None),
            n => got += n,
        }
    }
    Ok(Some(head))
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// `psi1|psi2`; ψ₂ defaults to the Meyer bump.
fn mother(id: &str, gamma: f64) -> Result<MotherShearlet, CliError> {
    let (psi1, psi2) = id.split_once('|').unwrap_or((id, "meyer-bump"));
    make_mother(psi1.trim(), psi2.trim(), gamma).in_module("shearlet")
}

fn image(job: &Job) -> Result<Image2D, CliError> {
    if let Some(path) = &job.input {
        let format = match &job.format {
            Some(f) => f.parse().in_module("io")?,
            None if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")) => ImageFormat::Pgm,
            None => ImageFormat::F64Raw,
        };
        return ingest_image(path, format, job.dx.unwrap_or(CONE_DX)).in_module("io");
    }
    match job.phantom {
        Phantom::Gauss => {
            let g = ImageGrid::square(job.size, job.dx.unwrap_or(GAUSS_DX)).in_module("image")?;
            Ok(Image2D::sample(g, &Gaussian::default()))
        }
        Phantom::ConeNoise => {
            let g = ImageGrid::square(job.size, job.dx.unwrap_or(CONE_DX)).in_module("image")?;
            Ok(ConeNoise::generate(&g, job.seed).in_module("phantom")?.image(g))
        }
    }
}

/// Translation grid of the lattice: the image grid enlarged by `lattice_pad`.
fn lattice_for(job: &Job, g: &ImageGrid) -> Result<Lattice, CliError> {
    if job.lattice_pad == 0 {
        return Err(CliError::Usage("--lattice-pad must be at least 1".into()));
    }
    let grid = ImageGrid::new(g.nx * job.lattice_pad, g.ny * job.lattice_pad, g.dx).in_module("image")?;
    Lattice::dyadic(grid, job.gamma, job.levels, job.smax, true).in_module("shearlet")
}

fn sinogram_grid(job: &Job, g: &ImageGrid) -> Result<SinogramGrid, CliError> {
    SinogramGrid::for_image(g, job.vmax, job.nv).in_module("radon")
}

fn group_check(job: &Job) -> Result<Report, CliError> {
    let fam = DilationFamily::parse(&job.family).in_module("groups")?;
    let rep = verify_family(&fam, job.samples, job.seed).in_module("groups")?;
    let mut report = Report::default();
    for (metric, value) in rep.metrics() {
        report.check(metric, value, job.tol_axiom);
    }
    report.info("samples", rep.samples as f64);
    Ok(report)
}

fn radon(job: &Job) -> Result<Report, CliError> {
    let img = image(job)?;
    let sg = sinogram_grid(job, img.grid())?;
    let sino = affine_radon(&img, &sg).in_module("radon")?;
    let slice = fourier_slice_report(&img, &sino, SliceOptions::default());
    if let Some(out) = &job.out {
        if is_csv(out) {
            write(out, sino.to_csv().as_bytes())?;
        } else {
            write(out, &encode_rssg(&sino).in_module("io")?)?;
        }
    }
    let mut report = Report::default();
    report.check("fourier_slice_residual", slice.max, job.tol_slice);
    report.info("n_v", sg.n_v as f64);
    report.info("n_t", sg.n_t as f64);
    Ok(report)
}

fn slice_check(job: &Job) -> Result<Report, CliError> {
    let img = image(job)?;
    let sg = sinogram_grid(job, img.grid())?;
    let sino = affine_radon(&img, &sg).in_module("radon")?;
    let raw = fourier_slice_report(&img, &sino, SliceOptions::default());
    let q = unitary_q(&img, &sg).in_module("radon")?;
    if let Some(w) = &q.warning {
        eprintln!("warning: radon: {w}");
    }
    let riesz = fourier_slice_report(&img, &q.sinogram, SliceOptions::default());
    let norm = img.norm();
    let ratio = if norm > 0.0 { q.sinogram.norm() / norm } else { 1.0 };
    if let Some(out) = &job.out {
        let mut csv = String::from("v,raw_residual,riesz_residual\n");
        for i in 0..sg.n_v {
            csv.push_str(&format!("{},{},{}\n", sg.v(i), number(raw.per_column[i]), number(riesz.per_column[i])));
        }
        write(out, csv.as_bytes())?;
    }
    let mut report = Report::default();
    report.check("fourier_slice_residual", raw.max, job.tol_slice);
    report.check("riesz_slice_residual", riesz.max, job.tol_slice);
    report.check("parseval_deviation", (ratio - 1.0).abs(), job.tol_parseval);
    report.info("near_horizontal_energy", q.near_horizontal_energy);
    Ok(report)
}

fn transform(
    method: Method,
    img: &Image2D,
    m: &MotherShearlet,
    lat: &Lattice,
    sino: impl FnOnce() -> Result<Sinogram, CliError>,
) -> Result<CoefficientVolume, CliError> {
    match method {
        Method::Direct => direct_transform(img, m, lat).in_module("shearlet"),
        Method::Radon => pipeline_transform(&sino()?, m, lat).in_module("shearlet"),
        Method::Riesz => {
            let s = apply_riesz(&sino()?).in_module("radon")?;
            riesz_pipeline_transform(&s, m, lat).in_module("shearlet")
        }
        Method::Both | Method::All => Err(CliError::Usage("expected a single method".into())),
    }
}

fn shear(job: &Job) -> Result<Report, CliError> {
    let method = job.method.unwrap_or(Method::Direct);
    if matches!(method, Method::Both | Method::All) {
        return Err(CliError::Usage("shear takes --method direct, radon or riesz".into()));
    }
    let m = mother(&job.mother, job.gamma)?;
    let mut report = Report::default();
    let from_sinogram = match &job.input {
        Some(p) => magic(p)?.is_some_and(|h| &h == RSSG_MAGIC),
        None => false,
    };
    let vol = if from_sinogram {
        if method == Method::Direct {
            return Err(CliError::Usage("a sinogram input needs --method radon or riesz".into()));
        }
        let path = job.input.as_deref().expect("checked above");
        let bytes = fs::read(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        let sino = decode_rssg(&bytes).in_module("io")?;
        let g = ImageGrid::square(job.size, job.dx.unwrap_or(CONE_DX)).in_module("image")?;
        let lat = lattice_for(job, &g)?;
        match (method, sino.stage()) {
            (Method::Radon, _) => pipeline_transform(&sino, &m, &lat).in_module("shearlet")?,
            (_, Stage::RieszApplied) => riesz_pipeline_transform(&sino, &m, &lat).in_module("shearlet")?,
            _ => riesz_pipeline_transform(&apply_riesz(&sino).in_module("radon")?, &m, &lat).in_module("shearlet")?,
        }
    } else {
        let img = image(job)?;
        let lat = lattice_for(job, img.grid())?;
        let sg = sinogram_grid(job, &lat.grid)?;
        let vol = transform(method, &img, &m, &lat, || affine_radon(&img, &sg).in_module("radon"))?;
        let norm2 = img.norm().powi(2);
        let deviation = if norm2 > 0.0 { (vol.energy() / (m.c_psi() * norm2) - 1.0).abs() } else { 0.0 };
        report.check("energy_deviation", deviation, job.tol_energy);
        vol
    };
    if let Some(out) = &job.out {
        save_volume(out, &vol, &m).in_module("io")?;
    }
    report.info("slices", vol.slices().len() as f64);
    report.info("energy", vol.energy());
    Ok(report)
}

fn compare(job: &Job) -> Result<Report, CliError> {
    let method = job.method.unwrap_or(Method::Both);
    if !matches!(method, Method::Both | Method::All) {
        return Err(CliError::Usage("compare takes --method both or all".into()));
    }
    let m = mother(&job.mother, job.gamma)?;
    let img = image(job)?;
    let lat = lattice_for(job, img.grid())?;
    let sino = affine_radon(&img, &sinogram_grid(job, &lat.grid)?).in_module("radon")?;
    let direct = direct_transform(&img, &m, &lat).in_module("shearlet")?;
    let pipe = pipeline_transform(&sino, &m, &lat).in_module("shearlet")?;
    let mut report = Report::default();
    report.check("direct_vs_radon", pipe.relative_error(&direct).in_module("shearlet")?, job.tol_compare);
    if method == Method::All {
        let riesz = riesz_pipeline_transform(&apply_riesz(&sino).in_module("radon")?, &m, &lat).in_module("shearlet")?;
        report.check("direct_vs_riesz", riesz.relative_error(&direct).in_module("shearlet")?, job.tol_compare);
        report.check("radon_vs_riesz", riesz.relative_error(&pipe).in_module("shearlet")?, job.tol_compare);
    }
    if let Some(out) = &job.out {
        let mut csv = String::from("s,a,relative_difference\n");
        for (d, p) in direct.slices().iter().zip(pipe.slices()) {
            let num: f64 = d.values.iter().zip(&p.values).map(|(x, y)| (x - y).norm_sqr()).sum();
            let den: f64 = d.values.iter().map(|x| x.norm_sqr()).sum();
            let rel = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };
            csv.push_str(&format!("{},{},{}\n", d.s, d.a, number(rel)));
        }
        write(out, csv.as_bytes())?;
    }
    report.info("slices", direct.slices().len() as f64);
    Ok(report)
}

fn reconstruct_cmd(job: &Job) -> Result<Report, CliError> {
    let mut report = Report::default();
    let from_volume = match &job.input {
        Some(p) => magic(p)?.is_some_and(|h| &h == RSVC_MAGIC),
        None => false,
    };
    if from_volume {
        let (vol, side) = load_volume(job.input.as_deref().expect("checked above")).in_module("io")?;
        let m = mother(&side.mother, side.gamma)?;
        let img = reconstruct(&vol, &m).in_module("shearlet")?;
        if let Some(out) = &job.out {
            write(out, &encode_rsim(&img).in_module("io")?)?;
        }
        report.info("norm", img.norm());
        return Ok(report);
    }
    let method = job.method.unwrap_or(Method::Direct);
    let methods: &[Method] = match method {
        Method::Both => &[Method::Direct, Method::Radon],
        Method::All => &[Method::Direct, Method::Radon, Method::Riesz],
        _ => std::slice::from_ref(&method),
    };
    let m = mother(&job.mother, job.gamma)?;
    let img = image(job)?;
    let lat = lattice_for(job, img.grid())?;
    let sg = sinogram_grid(job, &lat.grid)?;
    let sino = if methods.iter().any(|m| *m != Method::Direct) {
        Some(affine_radon(&img, &sg).in_module("radon")?)
    } else {
        None
    };
    let mut first = None;
    for &method in methods {
        let vol = transform(method, &img, &m, &lat, || Ok(sino.clone().expect("computed for Radon methods")))?;
        let rec = reconstruct(&vol, &m).in_module("shearlet")?.cropped(*img.grid()).in_module("image")?;
        let err = rec.relative_error(&img);
        match method {
            Method::Direct => report.check("reconstruction_error_direct", err, job.tol_recon),
            Method::Radon => report.check("reconstruction_error_radon", err, job.tol_recon_radon),
            _ => report.check("reconstruction_error_riesz", err, job.tol_recon_radon),
        }
        first.get_or_insert(rec);
    }
    if let (Some(out), Some(rec)) = (&job.out, &first) {
        write(out, &encode_rsim(rec).in_module("io")?)?;
    }
    Ok(report)
}

fn admissibility(job: &Job) -> Result<Report, CliError> {
    let mut report = Report::default();
    let m = match mother(&job.mother, job.gamma) {
        Ok(m) => m,
        Err(CliError::Library { source: Error::Admissibility(msg), .. }) => {
            eprintln!("shearlet: {msg}");
            report.verdict("admissible", 0.0, false);
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let c = m.c_psi();
    report.verdict("admissible", 1.0, true);
    report.info("calderon_psi1", calderon_constant(m.psi1()));
    report.info("psi2_norm2", m.psi2_norm2());
    report.verdict("c_psi", c, c.is_finite() && c > 0.0);
    report.verdict("phi1_admissible", f64::from(u8::from(m.phi1().is_admissible())), m.phi1().is_admissible());
    let chi = hilbert_derivative_residual(m.psi1(), CHI_SAMPLES, CHI_DX).in_module("signal")?;
    report.check("chi_identity_residual", chi, job.tol_chi);
    if let Some(out) = &job.out {
        write(out, m.psi1().spectrum_csv().as_bytes())?;
    }
    Ok(report)
}
