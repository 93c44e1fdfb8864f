//! The two reference geometries: a 10 µm gap between a hot
//! `n = 1.5 + 0.3i` half-space at 400 K and a cold `n = 2.5 + 0.5i`
//! half-space at 300 K, filled either with vacuum or with a lossy
//! `n = 1.1 + 0.1i` medium.

use num_complex::Complex64;

use crate::materials::{HalfSpace, Layer, LayerStack, Material};

pub const GAP_THICKNESS: f64 = 10e-6;
pub const T_HOT: f64 = 400.0;
pub const T_COLD: f64 = 300.0;

pub fn hot_medium() -> Material {
    Material::constant(Complex64::new(1.5, 0.3)).expect("passive index")
}

pub fn cold_medium() -> Material {
    Material::constant(Complex64::new(2.5, 0.5)).expect("passive index")
}

pub fn cavity_medium() -> Material {
    Material::constant(Complex64::new(1.1, 0.1)).expect("passive index")
}

fn cavity(fill: Material, fill_temperature: f64) -> LayerStack {
    LayerStack::new(
        HalfSpace::new(hot_medium(), T_HOT),
        vec![Layer::new(fill, GAP_THICKNESS, fill_temperature)],
        HalfSpace::new(cold_medium(), T_COLD),
    )
    .expect("reference geometry is valid")
}

/// Vacuum gap. The gap temperature is irrelevant (no sources) and set to
/// the mean of the reservoirs.
pub fn vacuum_cavity() -> LayerStack {
    cavity(Material::VACUUM, 0.5 * (T_HOT + T_COLD))
}

/// Lossy gap with a uniform initial temperature halfway between the
/// reservoirs; the self-consistent solver replaces it.
pub fn lossy_cavity() -> LayerStack {
    cavity(cavity_medium(), 0.5 * (T_HOT + T_COLD))
}
