//! Materials, layered geometry and reservoir temperatures.
//!
//! A [`LayerStack`] is a semi-infinite left half-space, a list of finite
//! interior layers and a semi-infinite right half-space. Regions are indexed
//! left to right: `0` is the left half-space, `1..=N` the interior layers and
//! `N + 1` the right half-space. The first interface sits at `x = 0`.

use num_complex::Complex64;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

/// Complex refractive index, constant or tabulated against angular frequency.
#[derive(Debug, Clone, PartialEq)]
pub enum Dispersion {
    Constant(Complex64),
    /// `(omega, n)` samples sorted by strictly increasing omega. Linear
    /// interpolation in between, clamped outside the table.
    Tabulated(Vec<(f64, Complex64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    dispersion: Dispersion,
}

fn check_passive(n: Complex64, field: &str) -> Result<()> {
    if !(n.re.is_finite() && n.im.is_finite()) {
        return Err(Error::invalid(field, "refractive index must be finite"));
    }
    if n.re <= 0.0 {
        return Err(Error::invalid(field, format!("Re(n) must be > 0, got {}", n.re)));
    }
    if n.im < 0.0 {
        return Err(Error::invalid(
            field,
            format!("Im(n) must be >= 0 (passive media only), got {}", n.im),
        ));
    }
    Ok(())
}

impl Material {
    pub const VACUUM: Material = Material {
        dispersion: Dispersion::Constant(Complex64::new(1.0, 0.0)),
    };

    pub fn constant(n: Complex64) -> Result<Self> {
        check_passive(n, "refractive index")?;
        Ok(Self {
            dispersion: Dispersion::Constant(n),
        })
    }

    pub fn tabulated(mut samples: Vec<(f64, Complex64)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("dispersion table", "must not be empty"));
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in samples.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::invalid(
                    "dispersion table",
                    "angular frequencies must be distinct",
                ));
            }
        }
        for (omega, n) in &samples {
            if !(*omega > 0.0) {
                return Err(Error::invalid("dispersion table", "omega must be > 0"));
            }
            check_passive(*n, "dispersion table")?;
        }
        Ok(Self {
            dispersion: Dispersion::Tabulated(samples),
        })
    }

    pub fn dispersion(&self) -> &Dispersion {
        &self.dispersion
    }

    /// Refractive index at angular frequency `omega`.
    pub fn index(&self, omega: f64) -> Complex64 {
        match &self.dispersion {
            Dispersion::Constant(n) => *n,
            Dispersion::Tabulated(table) => {
                let i = table.partition_point(|(w, _)| *w <= omega);
                if i == 0 {
                    table[0].1
                } else if i == table.len() {
                    table[table.len() - 1].1
                } else {
                    let (w0, n0) = table[i - 1];
                    let (w1, n1) = table[i];
                    let t = (omega - w0) / (w1 - w0);
                    n0 + (n1 - n0) * t
                }
            }
        }
    }

    /// Relative permittivity `ε = n²`; the relative permeability is 1.
    pub fn permittivity(&self, omega: f64) -> Complex64 {
        let n = self.index(omega);
        n * n
    }
}

/// Temperature distribution inside a finite layer.
#[derive(Debug, Clone, PartialEq)]
pub enum TemperatureProfile {
    Uniform(f64),
    /// Equal-width cells spanning the layer, left to right.
    Cells(Vec<f64>),
}

impl TemperatureProfile {
    fn validate(&self, field: &str) -> Result<()> {
        let check = |t: f64| -> Result<()> {
            if t.is_finite() && t > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(field, format!("temperature must be > 0 K, got {t}")))
            }
        };
        match self {
            TemperatureProfile::Uniform(t) => check(*t),
            TemperatureProfile::Cells(ts) => {
                if ts.is_empty() {
                    return Err(Error::invalid(field, "cell temperature table is empty"));
                }
                ts.iter().try_for_each(|t| check(*t))
            }
        }
    }

    /// Smallest and largest cell temperature.
    pub fn extremes(&self) -> (f64, f64) {
        match self {
            TemperatureProfile::Uniform(t) => (*t, *t),
            TemperatureProfile::Cells(ts) => ts
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(*t), hi.max(*t))),
        }
    }
}

/// A semi-infinite medium acting as a thermal reservoir.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    pub material: Material,
    pub temperature: f64,
}

impl HalfSpace {
    pub fn new(material: Material, temperature: f64) -> Self {
        Self {
            material,
            temperature,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub material: Material,
    /// Thickness (m).
    pub thickness: f64,
    pub temperature: TemperatureProfile,
}

impl Layer {
    pub fn new(material: Material, thickness: f64, temperature: f64) -> Self {
        Self {
            material,
            thickness,
            temperature: TemperatureProfile::Uniform(temperature),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    left: HalfSpace,
    layers: Vec<Layer>,
    right: HalfSpace,
    interfaces: Vec<f64>,
    constants: PhysicalConstants,
}

impl LayerStack {
    pub fn new(left: HalfSpace, layers: Vec<Layer>, right: HalfSpace) -> Result<Self> {
        TemperatureProfile::Uniform(left.temperature).validate("left.temperature")?;
        TemperatureProfile::Uniform(right.temperature).validate("right.temperature")?;
        let mut interfaces = Vec::with_capacity(layers.len() + 1);
        interfaces.push(0.0);
        let mut x = 0.0;
        for (i, layer) in layers.iter().enumerate() {
            if !(layer.thickness.is_finite() && layer.thickness > 0.0) {
                return Err(Error::invalid(
                    format!("layers[{i}].thickness"),
                    format!("must be > 0, got {}", layer.thickness),
                ));
            }
            layer
                .temperature
                .validate(&format!("layers[{i}].temperature"))?;
            x += layer.thickness;
            interfaces.push(x);
        }
        Ok(Self {
            left,
            layers,
            right,
            interfaces,
            constants: PhysicalConstants::default(),
        })
    }

    /// A single homogeneous medium at one temperature. There is still a
    /// (transparent) interface at `x = 0`.
    pub fn homogeneous(material: Material, temperature: f64) -> Result<Self> {
        Self::new(
            HalfSpace::new(material.clone(), temperature),
            Vec::new(),
            HalfSpace::new(material, temperature),
        )
    }

    pub fn with_constants(mut self, constants: PhysicalConstants) -> Result<Self> {
        if !constants.is_consistent() {
            return Err(Error::invalid(
                "constants",
                "must be positive with c^2 eps0 mu0 = 1",
            ));
        }
        self.constants = constants;
        Ok(self)
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    pub fn left(&self) -> &HalfSpace {
        &self.left
    }

    pub fn right(&self) -> &HalfSpace {
        &self.right
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Interface positions `x₀ = 0 < x₁ < …` (m).
    pub fn interfaces(&self) -> &[f64] {
        &self.interfaces
    }

    /// Number of regions, including both half-spaces.
    pub fn region_count(&self) -> usize {
        self.layers.len() + 2
    }

    /// Region containing `x`; a point on an interface belongs to the region
    /// on its right.
    pub fn region_at(&self, x: f64) -> usize {
        self.interfaces.partition_point(|xi| *xi <= x)
    }

    /// `(lo, hi)` of a region, infinite for the half-spaces.
    pub fn region_bounds(&self, region: usize) -> (f64, f64) {
        let n = self.interfaces.len();
        let lo = if region == 0 {
            f64::NEG_INFINITY
        } else {
            self.interfaces[region - 1]
        };
        let hi = if region >= n {
            f64::INFINITY
        } else {
            self.interfaces[region]
        };
        (lo, hi)
    }

    pub fn is_half_space(&self, region: usize) -> bool {
        region == 0 || region == self.region_count() - 1
    }

    pub fn region_material(&self, region: usize) -> &Material {
        if region == 0 {
            &self.left.material
        } else if region <= self.layers.len() {
            &self.layers[region - 1].material
        } else {
            &self.right.material
        }
    }

    /// Refractive index at position `x`.
    pub fn n_at(&self, x: f64, omega: f64) -> Complex64 {
        self.region_material(self.region_at(x)).index(omega)
    }

    /// Reservoir temperature at position `x` (K).
    pub fn temperature_at(&self, x: f64) -> f64 {
        let region = self.region_at(x);
        if region == 0 {
            return self.left.temperature;
        }
        if region > self.layers.len() {
            return self.right.temperature;
        }
        let layer = &self.layers[region - 1];
        match &layer.temperature {
            TemperatureProfile::Uniform(t) => *t,
            TemperatureProfile::Cells(ts) => {
                let lo = self.interfaces[region - 1];
                let frac = (x - lo) / layer.thickness;
                let cell = ((frac * ts.len() as f64).floor() as usize).min(ts.len() - 1);
                ts[cell]
            }
        }
    }

    /// Positions where the reservoir temperature may jump inside a layer
    /// (cell boundaries of tabulated profiles), excluding the interfaces.
    pub fn temperature_breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            if let TemperatureProfile::Cells(ts) = &layer.temperature {
                let lo = self.interfaces[i];
                let width = layer.thickness / ts.len() as f64;
                out.extend((1..ts.len()).map(|c| lo + c as f64 * width));
            }
        }
        out
    }

    /// Smallest and largest reservoir temperature anywhere in the stack.
    pub fn temperature_range(&self) -> (f64, f64) {
        let mut lo = self.left.temperature.min(self.right.temperature);
        let mut hi = self.left.temperature.max(self.right.temperature);
        for layer in &self.layers {
            let (a, b) = layer.temperature.extremes();
            lo = lo.min(a);
            hi = hi.max(b);
        }
        (lo, hi)
    }

    /// Copy of the stack with the temperature profile of interior layer
    /// `layer` (0-based) replaced.
    pub fn with_layer_temperature(&self, layer: usize, profile: TemperatureProfile) -> Result<Self> {
        if layer >= self.layers.len() {
            return Err(Error::invalid(
                "layer",
                format!("index {layer} out of range ({} layers)", self.layers.len()),
            ));
        }
        profile.validate(&format!("layers[{layer}].temperature"))?;
        let mut out = self.clone();
        out.layers[layer].temperature = profile;
        Ok(out)
    }

    /// Copy of the stack with every region at temperature `t`.
    pub fn at_equilibrium(&self, t: f64) -> Result<Self> {
        TemperatureProfile::Uniform(t).validate("temperature")?;
        let mut out = self.clone();
        out.left.temperature = t;
        out.right.temperature = t;
        for layer in &mut out.layers {
            layer.temperature = TemperatureProfile::Uniform(t);
        }
        Ok(out)
    }
}

/// Noise-current scaling factor squared, `4π ħ ω² ε₀ Im[n²] / S`.
pub fn j0_squared_for_index(n: Complex64, omega: f64, constants: &PhysicalConstants) -> f64 {
    let im_eps = (n * n).im;
    if im_eps == 0.0 {
        return 0.0;
    }
    4.0 * std::f64::consts::PI * constants.hbar * omega * omega * constants.eps0 * im_eps
        / constants.area
}

/// [`j0_squared_for_index`] at position `x` of `stack`.
pub fn j0_squared(stack: &LayerStack, x: f64, omega: f64) -> f64 {
    j0_squared_for_index(stack.n_at(x, omega), omega, stack.constants())
}

/// Evaluation lattice: positions (m) × photon energies (eV).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid {
    positions: Vec<f64>,
    energies_ev: Vec<f64>,
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

impl SpectralGrid {
    pub fn new(positions: Vec<f64>, energies_ev: Vec<f64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::invalid("grid.positions", "must not be empty"));
        }
        if energies_ev.is_empty() {
            return Err(Error::invalid("grid.energies", "must not be empty"));
        }
        if positions.iter().any(|x| !x.is_finite()) || !strictly_increasing(&positions) {
            return Err(Error::invalid("grid.positions", "must be finite and strictly increasing"));
        }
        if !strictly_increasing(&energies_ev) {
            return Err(Error::invalid("grid.energies", "must be strictly increasing"));
        }
        if energies_ev.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::invalid("grid.energies", "photon energies must be > 0"));
        }
        Ok(Self {
            positions,
            energies_ev,
        })
    }

    /// `count` evenly spaced points on `[lo, hi]` in each axis (inclusive).
    pub fn linspace(
        x_range: (f64, f64),
        x_count: usize,
        e_range: (f64, f64),
        e_count: usize,
    ) -> Result<Self> {
        Self::new(linspace(x_range, x_count), linspace(e_range, e_count))
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn energies_ev(&self) -> &[f64] {
        &self.energies_ev
    }

    pub fn omegas(&self) -> Vec<f64> {
        self.energies_ev
            .iter()
            .map(|e| crate::constants::omega_from_ev(*e))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.positions.len() * self.energies_ev.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `count` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace((lo, hi): (f64, f64), count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}
