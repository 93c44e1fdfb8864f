//! Versioned TOML configuration.
//!
//! Every table rejects unknown keys. Lengths are in micrometres, photon
//! energies in eV and temperatures in K; conversion to SI happens in
//! [`SimulationConfig::stack`] and friends.

use num_complex::Complex64;
use qfed1d_core::constants::{omega_from_ev, PhysicalConstants};
use qfed1d_core::observables::Observable;
use qfed1d_core::selfconsistent::{Balance, SolverSpec};
use qfed1d_core::{HalfSpace, Layer, LayerStack, Material, QuadratureSpec, SpectralGrid};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub schema_version: u32,
    /// Quantization area `S` in m².
    #[serde(default = "default_area")]
    pub area_m2: f64,
    pub left: HalfSpaceConfig,
    #[serde(default)]
    pub layers: Vec<LayerConfig>,
    pub right: HalfSpaceConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_area() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfSpaceConfig {
    pub n_re: f64,
    pub n_im: f64,
    pub temperature_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerConfig {
    pub n_re: f64,
    pub n_im: f64,
    pub thickness_um: f64,
    pub temperature_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min_um: f64,
    pub x_max_um: f64,
    pub x_count: usize,
    pub energy_min_ev: f64,
    pub energy_max_ev: f64,
    pub energy_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_floor: f64,
    pub tail_truncation_eps: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self {
            rel_tol: q.rel_tol,
            abs_floor: q.abs_floor,
            tail_truncation_eps: q.tail_truncation_eps,
            max_subdivisions: q.max_subdivisions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub n_cells: usize,
    pub q_tol: f64,
    pub t_tol: f64,
    pub max_outer_iterations: usize,
    pub underrelaxation: f64,
    pub energy_band_ev: [f64; 2],
    pub spectral_rel_tol: f64,
    /// `integrated` or `spectral`.
    pub balance: String,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let s = SolverSpec::default();
        Self {
            n_cells: s.n_cells,
            q_tol: s.q_tol,
            t_tol: s.t_tol,
            max_outer_iterations: s.max_outer_iterations,
            underrelaxation: s.underrelaxation,
            energy_band_ev: [1e-3, 1.0],
            spectral_rel_tol: s.spectral_rel_tol,
            balance: s.balance.name().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: String,
    /// Observables written by the `all` and `solve-cavity` commands.
    pub observables: Vec<String>,
    /// Region scanned for resonances; defaults to the span of the interior
    /// layers.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resonance_region_um: Option<[f64; 2]>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: "out".to_string(),
            observables: ["ldos", "temperature", "poynting", "net_emission"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            resonance_region_um: None,
        }
    }
}

const UM: f64 = 1e-6;

fn check(cond: bool, field: &str, reason: impl Into<String>) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Validation {
            field: field.to_string(),
            reason: reason.into(),
        })
    }
}

fn check_medium(field: &str, n_re: f64, n_im: f64, t: f64) -> Result<(), CliError> {
    check(n_re.is_finite() && n_re > 0.0, &format!("{field}.n_re"), format!("must be > 0, got {n_re}"))?;
    check(n_im.is_finite() && n_im >= 0.0, &format!("{field}.n_im"), format!("must be >= 0, got {n_im}"))?;
    check(t.is_finite() && t > 0.0, &format!("{field}.temperature_k"), format!("must be > 0 K, got {t}"))
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<SimulationConfig, CliError> {
    let config: SimulationConfig = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

/// Canonical TOML form; `parse_config(&serialize_config(c))` returns `c`.
pub fn serialize_config(config: &SimulationConfig) -> String {
    toml::to_string(config).expect("configuration is always representable as TOML")
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        check(
            self.schema_version == SCHEMA_VERSION,
            "schema_version",
            format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
        )?;
        check(self.area_m2.is_finite() && self.area_m2 > 0.0, "area_m2", "must be > 0")?;
        check_medium("left", self.left.n_re, self.left.n_im, self.left.temperature_k)?;
        check_medium("right", self.right.n_re, self.right.n_im, self.right.temperature_k)?;
        for (i, l) in self.layers.iter().enumerate() {
            let field = format!("layers[{i}]");
            check_medium(&field, l.n_re, l.n_im, l.temperature_k)?;
            check(
                l.thickness_um.is_finite() && l.thickness_um > 0.0,
                &format!("{field}.thickness_um"),
                format!("must be > 0, got {}", l.thickness_um),
            )?;
        }
        let g = &self.grid;
        check(g.x_count >= 1, "grid.x_count", "grid is empty")?;
        check(g.energy_count >= 1, "grid.energy_count", "grid is empty")?;
        check(
            g.x_min_um.is_finite() && g.x_max_um.is_finite() && (g.x_max_um > g.x_min_um || g.x_count == 1),
            "grid.x_max_um",
            "must exceed grid.x_min_um",
        )?;
        check(g.energy_min_ev > 0.0, "grid.energy_min_ev", "must be > 0")?;
        check(
            g.energy_max_ev.is_finite() && (g.energy_max_ev > g.energy_min_ev || g.energy_count == 1),
            "grid.energy_max_ev",
            "must exceed grid.energy_min_ev",
        )?;
        self.quadrature().validate().map_err(|e| CliError::validation("quadrature", e))?;
        check(
            self.solver.balance.parse::<Balance>().is_ok(),
            "solver.balance",
            format!("expected `integrated` or `spectral`, got `{}`", self.solver.balance),
        )?;
        self.solver().validate().map_err(|e| CliError::validation("solver", e))?;
        for (i, name) in self.output.observables.iter().enumerate() {
            check(
                name.parse::<Observable>().is_ok(),
                &format!("output.observables[{i}]"),
                format!("unknown observable `{name}`"),
            )?;
        }
        if let Some([lo, hi]) = self.output.resonance_region_um {
            check(hi > lo, "output.resonance_region_um", "upper bound must exceed lower bound")?;
        }
        self.stack().map(|_| ())
    }

    pub fn stack(&self) -> Result<LayerStack, CliError> {
        let material = |field: &str, re: f64, im: f64| {
            Material::constant(Complex64::new(re, im)).map_err(|e| CliError::validation(field, e))
        };
        let left = HalfSpace::new(material("left", self.left.n_re, self.left.n_im)?, self.left.temperature_k);
        let right = HalfSpace::new(material("right", self.right.n_re, self.right.n_im)?, self.right.temperature_k);
        let layers = self
            .layers
            .iter()
            .enumerate()
            .map(|(i, l)| {
                Ok(Layer::new(
                    material(&format!("layers[{i}]"), l.n_re, l.n_im)?,
                    l.thickness_um * UM,
                    l.temperature_k,
                ))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        LayerStack::new(left, layers, right)
            .and_then(|s| s.with_constants(PhysicalConstants::with_area(self.area_m2)))
            .map_err(|e| CliError::validation("stack", e))
    }

    pub fn grid(&self) -> Result<SpectralGrid, CliError> {
        let g = &self.grid;
        SpectralGrid::linspace(
            (g.x_min_um * UM, g.x_max_um * UM),
            g.x_count,
            (g.energy_min_ev, g.energy_max_ev),
            g.energy_count,
        )
        .map_err(|e| CliError::validation("grid", e))
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        let q = &self.quadrature;
        QuadratureSpec {
            rel_tol: q.rel_tol,
            abs_floor: q.abs_floor,
            tail_truncation_eps: q.tail_truncation_eps,
            max_subdivisions: q.max_subdivisions,
        }
    }

    pub fn solver(&self) -> SolverSpec {
        let s = &self.solver;
        SolverSpec {
            n_cells: s.n_cells,
            q_tol: s.q_tol,
            t_tol: s.t_tol,
            max_outer_iterations: s.max_outer_iterations,
            underrelaxation: s.underrelaxation,
            omega_band: (omega_from_ev(s.energy_band_ev[0]), omega_from_ev(s.energy_band_ev[1])),
            spectral_rel_tol: s.spectral_rel_tol,
            balance: s.balance.parse().unwrap_or_default(),
            quadrature: self.quadrature(),
        }
    }

    pub fn observables(&self) -> Vec<Observable> {
        self.output.observables.iter().filter_map(|s| s.parse().ok()).collect()
    }

    /// Resonance scan region in metres.
    pub fn resonance_region(&self) -> Option<(f64, f64)> {
        if let Some([lo, hi]) = self.output.resonance_region_um {
            return Some((lo * UM, hi * UM));
        }
        if self.layers.is_empty() {
            return None;
        }
        let total: f64 = self.layers.iter().map(|l| l.thickness_um).sum();
        Some((0.0, total * UM))
    }
}
