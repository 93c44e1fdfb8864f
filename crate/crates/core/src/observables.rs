//! Local observables of the thermal field: electric LDOS, photon number,
//! effective temperature, spectral Poynting vector and net emission rate.
//!
//! All quantities are per unit angular frequency and per quantization area
//! `S` (taken from the stack's [`PhysicalConstants`]). Source integrals run
//! through [`crate::quadrature`] with the observation point and every
//! temperature step as breakpoints.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::greens::LayeredGreen;
use crate::materials::{LayerStack, SpectralGrid};
use crate::quadrature::{Estimate, QuadratureSpec, SourceDomain};

/// LDOS floor below which the photon number is undefined, as a fraction of
/// the homogeneous-vacuum LDOS.
pub const LDOS_FLOOR_FRACTION: f64 = 1e-12;

/// Exponent `ħω / k_B T` above which [`bose_einstein`] switches to the
/// Boltzmann tail.
const BOLTZMANN_CUTOFF: f64 = 700.0;

/// Bose–Einstein occupation `1 / (e^{ħω/k_BT} − 1)`.
///
/// Returns `0` for `T ≤ 0` (the zero-temperature limit).
pub fn bose_einstein(temperature: f64, omega: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let x = crate::constants::HBAR * omega / (crate::constants::K_B * temperature);
    if x > BOLTZMANN_CUTOFF {
        (-x).exp()
    } else {
        1.0 / x.exp_m1()
    }
}

/// Temperature whose Bose–Einstein occupation at `omega` is `n_exp`.
pub fn effective_temperature(n_exp: f64, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::NonPositiveFrequency(omega));
    }
    if !(n_exp > 0.0) {
        return Err(Error::NonPositiveOccupation(n_exp));
    }
    Ok(crate::constants::HBAR * omega / (crate::constants::K_B * (1.0 / n_exp).ln_1p()))
}

/// Evaluates observables of one stack at one frequency, sharing the Green's
/// function and source breakpoints between calls.
#[derive(Debug, Clone)]
pub struct SpectralEvaluator<'a> {
    stack: &'a LayerStack,
    green: LayeredGreen,
    omega: f64,
    spec: QuadratureSpec,
    temperature_breaks: Vec<f64>,
}

impl<'a> SpectralEvaluator<'a> {
    pub fn new(stack: &'a LayerStack, omega: f64, spec: &QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            stack,
            green: LayeredGreen::new(stack, omega)?,
            omega,
            spec: *spec,
            temperature_breaks: stack.temperature_breakpoints(),
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn green(&self) -> &LayeredGreen {
        &self.green
    }

    fn constants(&self) -> &PhysicalConstants {
        self.stack.constants()
    }

    /// Electric LDOS `2ω Im G(x, x) / (π c² S)`.
    pub fn ldos(&self, x: f64) -> f64 {
        let k = self.constants();
        2.0 * self.omega / (PI * k.c * k.c * k.area) * self.green.eval(x, x).total.im
    }

    fn source_integral<F: Fn(f64) -> f64>(&self, x: f64, kernel: F) -> Result<Estimate> {
        let mut breaks = self.temperature_breaks.clone();
        breaks.push(x);
        let domain = SourceDomain::new(self.stack, self.omega, &breaks, &self.spec)?;
        domain.integrate(kernel, &self.spec)
    }

    fn occupation(&self, xp: f64) -> f64 {
        bose_einstein(self.stack.temperature_at(xp), self.omega)
    }

    /// Photon number at `x` given the LDOS there.
    fn photon_number_with_ldos(&self, x: f64, rho: f64) -> Result<f64> {
        let k = self.constants();
        let floor = LDOS_FLOOR_FRACTION * k.vacuum_ldos();
        if !(rho >= floor) {
            return Err(Error::DegenerateLdos { x, ldos: rho, floor });
        }
        let prefactor = k.eps0 * self.omega * k.mu0 * k.mu0 / (2.0 * PI * PI * k.hbar * rho);
        let est = self.source_integral(x, |xp| {
            prefactor * self.green.j0_squared_at(xp) * self.green.eval(x, xp).total.norm_sqr() * self.occupation(xp)
        })?;
        Ok(est.value)
    }

    /// Effective photon number `⟨n̂(x, ω)⟩`.
    pub fn photon_number(&self, x: f64) -> Result<f64> {
        self.photon_number_with_ldos(x, self.ldos(x))
    }

    /// Effective field temperature in K.
    pub fn temperature(&self, x: f64) -> Result<f64> {
        effective_temperature(self.photon_number(x)?, self.omega)
    }

    /// Spectral Poynting vector; positive values flow towards `+x`.
    pub fn poynting(&self, x: f64) -> Result<f64> {
        let k = self.constants();
        // Work with a kernel of order one; the scale is restored afterwards.
        let scale = k.hbar * self.omega / k.area;
        let est = self.source_integral(x, |xp| {
            let s = self.green.scaled(x, xp);
            (s.g_e.conj() * s.g_h).re * self.occupation(xp) / (2.0 * PI * PI * scale)
        })?;
        Ok(est.value * scale)
    }

    /// Net emission rate `ħω² Im[n²] ρ (η − n̂)`; exactly zero where the
    /// medium is lossless.
    pub fn net_emission(&self, x: f64) -> Result<f64> {
        let region = self.stack.region_at(x);
        let n_material = self.stack.region_material(region).index(self.omega);
        if (n_material * n_material).im <= 0.0 {
            return Ok(0.0);
        }
        let n = self.green.index(region);
        let rho = self.ldos(x);
        let n_hat = self.photon_number_with_ldos(x, rho)?;
        let eta = self.occupation(x);
        Ok(self.constants().hbar * self.omega * self.omega * (n * n).im * rho * (eta - n_hat))
    }

    pub fn evaluate(&self, observable: Observable, x: f64) -> Result<f64> {
        match observable {
            Observable::Ldos => Ok(self.ldos(x) / self.constants().ldos_unit()),
            Observable::PhotonNumber => self.photon_number(x),
            Observable::Temperature => self.temperature(x),
            Observable::Poynting => self.poynting(x),
            Observable::NetEmission => self.net_emission(x),
        }
    }
}

/// Electric LDOS in SI units (`s / m³` per quantization area).
pub fn ldos(stack: &LayerStack, x: f64, omega: f64) -> Result<f64> {
    Ok(SpectralEvaluator::new(stack, omega, &QuadratureSpec::default())?.ldos(x))
}

pub fn photon_number(stack: &LayerStack, x: f64, omega: f64, spec: &QuadratureSpec) -> Result<f64> {
    SpectralEvaluator::new(stack, omega, spec)?.photon_number(x)
}

pub fn field_temperature(stack: &LayerStack, x: f64, omega: f64, spec: &QuadratureSpec) -> Result<f64> {
    SpectralEvaluator::new(stack, omega, spec)?.temperature(x)
}

pub fn poynting_spectral(stack: &LayerStack, x: f64, omega: f64, spec: &QuadratureSpec) -> Result<f64> {
    SpectralEvaluator::new(stack, omega, spec)?.poynting(x)
}

pub fn net_emission(stack: &LayerStack, x: f64, omega: f64, spec: &QuadratureSpec) -> Result<f64> {
    SpectralEvaluator::new(stack, omega, spec)?.net_emission(x)
}

/// Observables that can be mapped over a [`SpectralGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Observable {
    Ldos,
    PhotonNumber,
    Temperature,
    Poynting,
    NetEmission,
}

impl Observable {
    pub const ALL: [Observable; 5] = [
        Observable::Ldos,
        Observable::PhotonNumber,
        Observable::Temperature,
        Observable::Poynting,
        Observable::NetEmission,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::Ldos => "ldos",
            Observable::PhotonNumber => "photon_number",
            Observable::Temperature => "temperature",
            Observable::Poynting => "poynting",
            Observable::NetEmission => "net_emission",
        }
    }

    /// Units of the values stored in a [`FieldMap`].
    pub fn units(self) -> &'static str {
        match self {
            Observable::Ldos => "2/(pi*c*S)",
            Observable::PhotonNumber => "1",
            Observable::Temperature => "K",
            Observable::Poynting => "W/(m^2*rad/s)",
            Observable::NetEmission => "W/(m^3*rad/s)",
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Observable::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::invalid("observable", format!("unknown observable `{s}`")))
    }
}

/// An observable sampled on a grid. `values` is position-major:
/// `values[i_x * n_energies + i_energy]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMap {
    pub grid: SpectralGrid,
    pub observable: Observable,
    pub values: Vec<f64>,
}

impl FieldMap {
    pub fn name(&self) -> &'static str {
        self.observable.name()
    }

    pub fn units(&self) -> &'static str {
        self.observable.units()
    }

    pub fn value(&self, i_x: usize, i_energy: usize) -> f64 {
        self.values[i_x * self.grid.energies_ev().len() + i_energy]
    }

    /// Values across positions at one energy.
    pub fn spatial_profile(&self, i_energy: usize) -> Vec<f64> {
        (0..self.grid.positions().len()).map(|i| self.value(i, i_energy)).collect()
    }

    /// Values across energies at one position.
    pub fn spectrum(&self, i_x: usize) -> Vec<f64> {
        let n = self.grid.energies_ev().len();
        self.values[i_x * n..(i_x + 1) * n].to_vec()
    }
}

/// Evaluates `observable` at every grid point, in parallel. Failures are
/// collected; the first in grid order is reported with the total count.
pub fn field_map(stack: &LayerStack, grid: &SpectralGrid, observable: Observable, spec: &QuadratureSpec) -> Result<FieldMap> {
    let omegas = grid.omegas();
    let evaluators = omegas
        .par_iter()
        .map(|&w| SpectralEvaluator::new(stack, w, spec))
        .collect::<Result<Vec<_>>>()?;
    let positions = grid.positions();
    let n_e = omegas.len();
    let results: Vec<Result<f64>> = (0..positions.len() * n_e)
        .into_par_iter()
        .map(|i| evaluators[i % n_e].evaluate(observable, positions[i / n_e]))
        .collect();
    let mut values = Vec::with_capacity(results.len());
    let mut first = None;
    let mut count = 0;
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => values.push(v),
            Err(e) => {
                count += 1;
                if first.is_none() {
                    first = Some((positions[i / n_e], omegas[i % n_e], e));
                }
                values.push(f64::NAN);
            }
        }
    }
    if let Some((x, omega, source)) = first {
        return Err(Error::FieldMap {
            count,
            x,
            omega,
            source: Box::new(source),
        });
    }
    Ok(FieldMap {
        grid: grid.clone(),
        observable,
        values,
    })
}

/// Indices of strict interior local maxima of a sampled curve.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])
        .collect()
}

/// Vertex of the parabola through three equally spaced samples around a
/// maximum at `xs[i]`.
fn refine_peak(xs: &[f64], ys: &[f64], i: usize) -> f64 {
    let (y0, y1, y2) = (ys[i - 1], ys[i], ys[i + 1]);
    let denom = y0 - 2.0 * y1 + y2;
    if denom == 0.0 {
        return xs[i];
    }
    let h = 0.5 * (xs[i + 1] - xs[i - 1]);
    xs[i] + 0.5 * h * (y0 - y2) / denom
}

/// Peak positions of a sampled curve, refined by parabolic interpolation.
pub fn peak_locations(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    local_maxima(ys).into_iter().map(|i| refine_peak(xs, ys, i)).collect()
}

/// LDOS contrast `max − min` over `positions` at each energy, in units of
/// `2/(πcS)`. Standing-wave resonances of a cavity maximize it.
pub fn ldos_contrast(stack: &LayerStack, positions: &[f64], energies_ev: &[f64]) -> Result<Vec<f64>> {
    let grid = SpectralGrid::new(positions.to_vec(), energies_ev.to_vec())?;
    let map = field_map(stack, &grid, Observable::Ldos, &QuadratureSpec::default())?;
    Ok((0..energies_ev.len())
        .map(|j| {
            let p = map.spatial_profile(j);
            let max = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = p.iter().copied().fold(f64::INFINITY, f64::min);
            max - min
        })
        .collect())
}

/// Resonance energies (eV) of the region `[x_lo, x_hi]`: peaks of the LDOS
/// contrast across the region, scanned at `n_energies` energies in
/// `[e_lo, e_hi]` with `n_positions` sample points.
pub fn resonance_energies(
    stack: &LayerStack,
    (x_lo, x_hi): (f64, f64),
    (e_lo, e_hi): (f64, f64),
    n_positions: usize,
    n_energies: usize,
) -> Result<Vec<f64>> {
    if !(x_hi > x_lo) || n_positions < 3 {
        return Err(Error::invalid("resonance region", "need x_hi > x_lo and at least 3 positions"));
    }
    let positions = crate::materials::linspace((x_lo, x_hi), n_positions);
    let energies = crate::materials::linspace((e_lo, e_hi), n_energies);
    let contrast = ldos_contrast(stack, &positions, &energies)?;
    Ok(peak_locations(&energies, &contrast))
}

/// Number of interior LDOS maxima across `[x_lo, x_hi]` at one energy.
pub fn interior_peak_count(stack: &LayerStack, (x_lo, x_hi): (f64, f64), energy_ev: f64, n_positions: usize) -> Result<usize> {
    let green = LayeredGreen::new(stack, crate::constants::omega_from_ev(energy_ev))?;
    let profile: Vec<f64> = crate::materials::linspace((x_lo, x_hi), n_positions)
        .into_iter()
        .map(|x| green.eval(x, x).total.im)
        .collect();
    Ok(local_maxima(&profile).len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{omega_from_ev, C, HBAR, K_B};
    use crate::materials::{HalfSpace, Layer, Material};
    use crate::presets;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn medium(re: f64, im: f64) -> Material {
        Material::constant(Complex64::new(re, im)).unwrap()
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn bose_einstein_closed_forms() {
        let t = 300.0;
        let w_ln2 = K_B * t * 2f64.ln() / HBAR;
        assert!((bose_einstein(t, w_ln2) - 1.0).abs() < 1e-12);
        let w1 = K_B * t / HBAR;
        assert!((bose_einstein(t, w1) - 1.0 / (std::f64::consts::E - 1.0)).abs() < 1e-12);
        assert!((bose_einstein(t, w1) - 0.581_977).abs() < 1e-6);
        for x in [5.0, 10.0, 40.0, 699.0, 700.5] {
            let n = bose_einstein(t, x * w1);
            assert!(n.is_finite());
            assert!((n / (-x).exp() - 1.0).abs() < 0.01, "x = {x}");
        }
        let n = bose_einstein(t, 900.0 * w1);
        assert!(n.is_finite() && n >= 0.0);
        assert_eq!(bose_einstein(0.0, w1), 0.0);
    }

    #[test]
    fn effective_temperature_closed_forms() {
        let w = omega_from_ev(0.1);
        let t = effective_temperature(1.0, w).unwrap();
        assert!((t - HBAR * w / (K_B * 2f64.ln())).abs() / t < 1e-14);
        assert!(effective_temperature(0.0, w).is_err());
        assert!(effective_temperature(-1.0, w).is_err());
        assert!(effective_temperature(1.0, 0.0).is_err());
        let small: Vec<f64> = [1e-3, 1e-6, 1e-12, 1e-30]
            .iter()
            .map(|n| effective_temperature(*n, w).unwrap())
            .collect();
        assert!(small.windows(2).all(|p| p[1] < p[0]));
    }

    proptest! {
        #[test]
        fn temperature_roundtrip(t in 1.0f64..5000.0, e in 0.001f64..1.0) {
            let w = omega_from_ev(e);
            let n = bose_einstein(t, w);
            prop_assume!(n > 1e-300);
            let back = effective_temperature(n, w).unwrap();
            prop_assert!((back - t).abs() / t < 1e-12);
        }

        #[test]
        fn temperature_is_increasing(a in 1e-6f64..1e3, b in 1e-6f64..1e3, e in 0.001f64..1.0) {
            prop_assume!(a < b * (1.0 - 1e-12));
            let w = omega_from_ev(e);
            prop_assert!(effective_temperature(a, w).unwrap() < effective_temperature(b, w).unwrap());
        }

        #[test]
        fn ldos_is_nonnegative(
            indices in proptest::collection::vec((1.0f64..3.0, 0.0f64..0.6, 0.2e-6f64..8e-6), 0..4),
            left in (1.0f64..3.0, 0.0f64..0.6),
            right in (1.0f64..3.0, 0.0f64..0.6),
            x in -20e-6f64..40e-6,
            e in 0.01f64..0.5,
        ) {
            let layers = indices.iter().map(|&(re, im, d)| Layer::new(medium(re, im), d, 300.0)).collect();
            let stack = LayerStack::new(
                HalfSpace::new(medium(left.0, left.1), 300.0),
                layers,
                HalfSpace::new(medium(right.0, right.1), 300.0),
            ).unwrap();
            prop_assert!(ldos(&stack, x, omega_from_ev(e)).unwrap() >= 0.0);
        }
    }

    #[test]
    fn analytic_ldos() {
        let vac = LayerStack::homogeneous(Material::VACUUM, 300.0).unwrap();
        let k = PhysicalConstants::default();
        for e in [0.01, 0.1, 0.7] {
            let rho = ldos(&vac, 1.3e-6, omega_from_ev(e)).unwrap();
            assert!((rho / k.ldos_unit() - 0.5).abs() < 1e-10);
            assert!((rho - k.vacuum_ldos()).abs() / k.vacuum_ldos() < 1e-10);
        }
        let glass = LayerStack::homogeneous(medium(1.7, 0.0), 300.0).unwrap();
        let rho = ldos(&glass, 0.0, omega_from_ev(0.1)).unwrap();
        assert!((rho / k.ldos_unit() - 1.0 / (2.0 * 1.7)).abs() < 1e-6);
    }

    #[test]
    fn homogeneous_photon_number_is_bose_einstein() {
        let w = omega_from_ev(0.08);
        for (re, im) in [(1.0, 0.0), (1.4, 0.0), (1.5, 0.3), (2.5, 0.5)] {
            let stack = LayerStack::homogeneous(medium(re, im), 350.0).unwrap();
            let n = photon_number(&stack, 2e-6, w, &spec()).unwrap();
            assert!((n - bose_einstein(350.0, w)).abs() / n < 1e-5, "{re}+{im}i: {n}");
        }
    }

    #[test]
    fn equilibrium_uniformity() {
        let stack = presets::vacuum_cavity().at_equilibrium(300.0).unwrap();
        let s = spec();
        for e in [0.03, 0.118, 0.2] {
            let w = omega_from_ev(e);
            let ev = SpectralEvaluator::new(&stack, w, &s).unwrap();
            let eta = bose_einstein(300.0, w);
            for x in [-8e-6, -0.5e-6, 3e-6, 9.9e-6, 15e-6] {
                let n = ev.photon_number(x).unwrap();
                assert!((n - eta).abs() / eta < 10.0 * s.rel_tol, "{e} {x}: {n} vs {eta}");
                assert!((ev.temperature(x).unwrap() - 300.0).abs() < 0.01);
            }
        }
    }

    #[test]
    fn gap_poynting_is_positive_and_constant() {
        let stack = presets::vacuum_cavity();
        let s = spec().with_rel_tol(1e-9);
        for e in [0.02, 0.056, 0.09, 0.118, 0.18, 0.3] {
            let ev = SpectralEvaluator::new(&stack, omega_from_ev(e), &s).unwrap();
            let values: Vec<f64> = [0.5e-6, 3e-6, 5e-6, 9.5e-6].iter().map(|x| ev.poynting(*x).unwrap()).collect();
            assert!(values[0] > 0.0);
            for v in &values {
                assert!((v - values[0]).abs() / values[0] < 1e-6, "{e}: {values:?}");
            }
            assert_eq!(ev.net_emission(5e-6).unwrap(), 0.0);
        }
    }

    #[test]
    fn energy_conservation_in_lossy_media() {
        let stack = presets::vacuum_cavity();
        let w = omega_from_ev(0.118);
        let s = spec().with_rel_tol(1e-11);
        let ev = SpectralEvaluator::new(&stack, w, &s).unwrap();
        let lambda = 2.0 * PI * C / w;
        for (x, n_re) in [(-1.3e-6, 1.5), (-4e-6, 1.5), (12e-6, 2.5), (16e-6, 2.5)] {
            let h = lambda / n_re / 1000.0;
            let s_at = |d: f64| ev.poynting(x + d * h).unwrap();
            let ds = (-s_at(2.0) + 8.0 * s_at(1.0) - 8.0 * s_at(-1.0) + s_at(-2.0)) / (12.0 * h);
            let q = ev.net_emission(x).unwrap();
            assert!((ds - q).abs() / q.abs() < 1e-2, "{x}: dS/dx = {ds}, Q = {q}");
        }
    }

    #[test]
    fn deep_saturation() {
        let stack = presets::vacuum_cavity();
        let w = omega_from_ev(0.118);
        let ev = SpectralEvaluator::new(&stack, w, &spec()).unwrap();
        // e^{−2ω Im(n) d / c} = 1e-7
        let depth = |im: f64| 7.0 * 10f64.ln() * C / (2.0 * w * im);
        let t_left = ev.temperature(-depth(0.3)).unwrap();
        let t_right = ev.temperature(10e-6 + depth(0.5)).unwrap();
        assert!((t_left - 400.0).abs() < 1.0, "{t_left}");
        assert!((t_right - 300.0).abs() < 1.0, "{t_right}");
    }

    #[test]
    fn degenerate_ldos_is_reported() {
        // A perfect mirror-like high index contrast still has positive LDOS;
        // a vanishing LDOS is forced by a tiny quantization area scaling.
        let stack = presets::vacuum_cavity();
        let ev = SpectralEvaluator::new(&stack, omega_from_ev(0.1), &spec()).unwrap();
        assert!(matches!(
            ev.photon_number_with_ldos(1e-6, 0.0),
            Err(Error::DegenerateLdos { .. })
        ));
    }

    #[test]
    fn field_map_matches_scalar_calls() {
        let stack = presets::vacuum_cavity();
        let grid = SpectralGrid::new(vec![4e-6], vec![0.118]).unwrap();
        let w = grid.omegas()[0];
        let s = spec();
        let t = field_map(&stack, &grid, Observable::Temperature, &s).unwrap();
        assert_eq!(t.values[0], field_temperature(&stack, 4e-6, w, &s).unwrap());
        let p = field_map(&stack, &grid, Observable::Poynting, &s).unwrap();
        assert_eq!(p.values[0], poynting_spectral(&stack, 4e-6, w, &s).unwrap());
        let l = field_map(&stack, &grid, Observable::Ldos, &s).unwrap();
        assert_eq!(l.values[0], ldos(&stack, 4e-6, w).unwrap() / stack.constants().ldos_unit());
    }

    #[test]
    fn field_map_is_order_independent() {
        let stack = presets::lossy_cavity();
        let grid = SpectralGrid::new(vec![-2e-6, 1e-6, 6e-6, 12e-6], vec![0.05, 0.11, 0.17]).unwrap();
        let s = spec();
        let map = field_map(&stack, &grid, Observable::NetEmission, &s).unwrap();
        // Sequential evaluation in reverse order.
        for (j, w) in grid.omegas().into_iter().enumerate().rev() {
            let ev = SpectralEvaluator::new(&stack, w, &s).unwrap();
            for (i, x) in grid.positions().iter().enumerate().rev() {
                assert_eq!(map.value(i, j).to_bits(), ev.net_emission(*x).unwrap().to_bits());
            }
        }
    }

    #[test]
    fn observable_names_roundtrip() {
        for o in Observable::ALL {
            assert_eq!(o.name().parse::<Observable>().unwrap(), o);
        }
        assert!("flux".parse::<Observable>().is_err());
    }

    #[test]
    fn peak_helpers() {
        let xs: Vec<f64> = (0..101).map(|i| i as f64 * 0.01).collect();
        let ys: Vec<f64> = xs.iter().map(|x| -(x - 0.423).powi(2)).collect();
        let p = peak_locations(&xs, &ys);
        assert_eq!(p.len(), 1);
        assert!((p[0] - 0.423).abs() < 1e-12);
        assert!(local_maxima(&[1.0, 2.0]).is_empty());
    }
}
