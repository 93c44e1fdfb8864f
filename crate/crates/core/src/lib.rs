//! Local photon number, effective field temperature and radiative energy
//! balance of thermal electromagnetic fields in one-dimensional layered
//! media.
//!
//! Fields are driven by thermal noise currents in lossy regions. Everything
//! is expressed through the layered Helmholtz Green's function
//! ([`greens`]); observables ([`observables`]) integrate it over source
//! positions ([`quadrature`]); [`selfconsistent`] finds the radiative
//! steady-state temperature of lossy interior layers.
//!
//! Internal units are SI. Photon energies in eV appear only through
//! [`constants::omega_from_ev`] and [`SpectralGrid`].

pub mod constants;
pub mod error;
pub mod greens;
pub mod materials;
pub mod observables;
pub mod presets;
pub mod quadrature;
pub mod selfconsistent;

pub use constants::PhysicalConstants;
pub use error::{Error, Result};
pub use greens::{green_homogeneous, green_layered, scaled_greens, GreenComponents, LayeredGreen, ScaledGreens};
pub use materials::{HalfSpace, Layer, LayerStack, Material, SpectralGrid, TemperatureProfile};
pub use quadrature::QuadratureSpec;
