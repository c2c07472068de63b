use std::f64::consts::PI;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use shearadon::radon::affine_radon;
use shearadon::shearlet::{direct_transform, pipeline_transform};
use shearadon::signal::{cwt, Signal1D, Wavelet1D};
use shearadon::Complex64;
use shearadon_bench::{cone_image, default_lattice, default_mother, default_sinogram_grid};

fn radon(c: &mut Criterion) {
    let mut group = c.benchmark_group("affine_radon");
    group.sample_size(10);
    for n in [64, 128] {
        let img = cone_image(n);
        let sg = default_sinogram_grid(img.grid());
        group.bench_with_input(BenchmarkId::from_parameter(n), &img, |b, img| b.iter(|| affine_radon(img, &sg).unwrap()));
    }
    group.finish();
}

fn wavelet(c: &mut Criterion) {
    let w = Wavelet1D::preset("meyer-annulus").unwrap();
    let sig = Signal1D::from_fn(4096, 1.0 / 16.0, |x| Complex64::new((-PI * x * x).exp() * (4.0 * x).cos(), 0.0)).unwrap();
    let b_grid: Vec<f64> = (-64..64).map(|k| k as f64 / 16.0).collect();
    let a_grid = [0.25, 0.5, 1.0, 2.0];
    c.bench_function("cwt_4096x4", |b| b.iter(|| cwt(&sig, &w, &b_grid, &a_grid).unwrap()));
}

fn shearlet(c: &mut Criterion) {
    let m = default_mother();
    let img = cone_image(128);
    let lat = default_lattice(*img.grid());
    let sino = affine_radon(&img, &default_sinogram_grid(img.grid())).unwrap();
    let mut group = c.benchmark_group("shearlet_128");
    group.sample_size(10);
    group.bench_function("direct", |b| b.iter(|| direct_transform(&img, &m, &lat).unwrap()));
    group.bench_function("pipeline", |b| b.iter(|| pipeline_transform(&sino, &m, &lat).unwrap()));
    group.finish();
}

criterion_group!(benches, radon, wavelet, shearlet);
criterion_main!(benches);
