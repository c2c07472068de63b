//! Shared inputs for the benchmarks.

use shearadon::image::{Image2D, ImageGrid};
use shearadon::phantom::ConeNoise;
use shearadon::radon::{SinogramGrid, DEFAULT_NV, DEFAULT_VMAX};
use shearadon::shearlet::{make_mother, Lattice, MotherShearlet};

/// Cone phantom on an `n × n` grid with `dx = 1/64`.
pub fn cone_image(n: usize) -> Image2D {
    let g = ImageGrid::square(n, 1.0 / 64.0).expect("power-of-two side");
    ConeNoise::generate(&g, 11).expect("default parameters").image(g)
}

pub fn default_mother() -> MotherShearlet {
    make_mother("meyer-annulus", "meyer-bump", 0.5).expect("default mother is admissible")
}

/// `J = 3`, `|s| ≤ 1.5`, both scale signs.
pub fn default_lattice(grid: ImageGrid) -> Lattice {
    Lattice::dyadic(grid, 0.5, 3, 1.5, true).expect("valid lattice")
}

pub fn default_sinogram_grid(grid: &ImageGrid) -> SinogramGrid {
    SinogramGrid::for_image(grid, DEFAULT_VMAX, DEFAULT_NV).expect("valid sinogram grid")
}
