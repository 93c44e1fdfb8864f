//! Radiative steady state of lossy interior layers.
//!
//! Each lossy interior layer is split into equal cells of uniform
//! temperature. At a fixed frequency the photon number at a cell centre is
//! linear in the source occupations,
//!
//! ```text
//! n̂_c(ω) = F_c(ω) + Σ_s W_cs(ω) η(T_s, ω)
//! ```
//!
//! where `F_c` collects the fixed-temperature regions (half-spaces and any
//! layer not being solved) and `W_cs` is the normalized `|G_A|²` weight of
//! cell `s`. The weights are computed once on a frozen frequency rule;
//! the outer fixed-point iteration then only re-weights Bose–Einstein
//! factors.
//!
//! Two balance conditions are offered. [`Balance::Integrated`] requires the
//! frequency-integrated net emission of every cell to vanish and yields one
//! temperature per cell. [`Balance::Spectral`] requires the net emission to
//! vanish at every frequency; the cell occupations then follow from one
//! linear solve per frequency and define a frequency-dependent effective
//! source temperature.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::constants::{omega_from_ev, PhysicalConstants};
use crate::error::{Error, Result};
use crate::greens::LayeredGreen;
use crate::materials::{LayerStack, TemperatureProfile};
use crate::observables::{bose_einstein, effective_temperature, SpectralEvaluator};
use crate::quadrature::{integrate_spectrum, spectrum_rule, FrozenRule, QuadratureSpec, SourceDomain};

/// Which energy-balance condition defines the steady state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Balance {
    /// `∫ Q dω = 0` in every cell.
    #[default]
    Integrated,
    /// `Q(ω) = 0` in every cell at every frequency.
    Spectral,
}

impl Balance {
    pub fn name(self) -> &'static str {
        match self {
            Balance::Integrated => "integrated",
            Balance::Spectral => "spectral",
        }
    }
}

impl std::str::FromStr for Balance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "integrated" => Ok(Balance::Integrated),
            "spectral" => Ok(Balance::Spectral),
            _ => Err(Error::invalid("solver.balance", format!("expected `integrated` or `spectral`, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSpec {
    /// Cells per solved layer.
    pub n_cells: usize,
    /// Residual tolerance on `|∫ Q dω|`, in W/m³ per quantization area.
    pub q_tol: f64,
    /// Temperature update tolerance in K.
    pub t_tol: f64,
    pub max_outer_iterations: usize,
    pub underrelaxation: f64,
    /// Angular-frequency band of the power balance, rad/s.
    pub omega_band: (f64, f64),
    /// Relative tolerance used to adapt the frozen frequency rule.
    pub spectral_rel_tol: f64,
    pub balance: Balance,
    /// Source-integral tolerances.
    pub quadrature: QuadratureSpec,
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            n_cells: 50,
            q_tol: 1e-7,
            t_tol: 1e-4,
            max_outer_iterations: 200,
            underrelaxation: 0.7,
            omega_band: (omega_from_ev(1e-3), omega_from_ev(1.0)),
            spectral_rel_tol: 1e-8,
            balance: Balance::Integrated,
            quadrature: QuadratureSpec::default(),
        }
    }
}

impl SolverSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_cells < 1 {
            return Err(Error::invalid("solver.n_cells", "must be >= 1"));
        }
        for (name, v) in [("solver.q_tol", self.q_tol), ("solver.t_tol", self.t_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        if self.max_outer_iterations < 1 {
            return Err(Error::invalid("solver.max_outer_iterations", "must be >= 1"));
        }
        if !(self.underrelaxation > 0.0 && self.underrelaxation <= 1.0) {
            return Err(Error::invalid("solver.underrelaxation", "must lie in (0, 1]"));
        }
        let (lo, hi) = self.omega_band;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::invalid("solver.omega_band", "need 0 < lo < hi"));
        }
        if !(self.spectral_rel_tol > 0.0 && self.spectral_rel_tol < 1.0) {
            return Err(Error::invalid("solver.spectral_rel_tol", "must lie in (0, 1)"));
        }
        self.quadrature.validate()
    }
}

/// Uniform-temperature cells of the solved layers.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGrid {
    /// Layer index (into `stack.layers()`) of each solved layer.
    pub layers: Vec<usize>,
    pub n_cells: usize,
    /// Cell edges per solved layer, `n_cells + 1` each.
    pub edges: Vec<Vec<f64>>,
}

impl CellGrid {
    /// Cells over every interior layer that is lossy at the centre of the
    /// band.
    pub fn new(stack: &LayerStack, spec: &SolverSpec) -> Result<Self> {
        let omega_mid = 0.5 * (spec.omega_band.0 + spec.omega_band.1);
        let layers: Vec<usize> = stack
            .layers()
            .iter()
            .enumerate()
            .filter(|(_, l)| {
                let n = l.material.index(omega_mid);
                (n * n).im > 0.0
            })
            .map(|(i, _)| i)
            .collect();
        if layers.is_empty() {
            return Err(Error::NoLossyLayer);
        }
        let edges = layers
            .iter()
            .map(|&i| {
                let (lo, hi) = stack.region_bounds(i + 1);
                crate::materials::linspace((lo, hi), spec.n_cells + 1)
            })
            .collect();
        Ok(Self {
            layers,
            n_cells: spec.n_cells,
            edges,
        })
    }

    pub fn len(&self) -> usize {
        self.layers.len() * self.n_cells
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(lo, hi)` of cell `c` in the flattened cell order.
    pub fn bounds(&self, c: usize) -> (f64, f64) {
        let e = &self.edges[c / self.n_cells];
        let j = c % self.n_cells;
        (e[j], e[j + 1])
    }

    pub fn center(&self, c: usize) -> f64 {
        let (lo, hi) = self.bounds(c);
        0.5 * (lo + hi)
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.len()).map(|c| self.center(c)).collect()
    }

    fn all_edges(&self) -> Vec<f64> {
        self.edges.iter().flatten().copied().collect()
    }

    /// `stack` with the solved layers set to the cell temperatures.
    pub fn apply(&self, stack: &LayerStack, temperatures: &[f64]) -> Result<LayerStack> {
        let mut out = stack.clone();
        for (k, &layer) in self.layers.iter().enumerate() {
            let cells = temperatures[k * self.n_cells..(k + 1) * self.n_cells].to_vec();
            out = out.with_layer_temperature(layer, TemperatureProfile::Cells(cells))?;
        }
        Ok(out)
    }

    /// Temperature range of the fixed (not solved) lossy sources.
    fn reservoir_range(&self, stack: &LayerStack) -> (f64, f64) {
        let mut lo = stack.left().temperature.min(stack.right().temperature);
        let mut hi = stack.left().temperature.max(stack.right().temperature);
        for (i, layer) in stack.layers().iter().enumerate() {
            if self.layers.contains(&i) {
                continue;
            }
            let (a, b) = layer.temperature.extremes();
            lo = lo.min(a);
            hi = hi.max(b);
        }
        (lo, hi)
    }
}

/// Linear map from source occupations to cell photon numbers at one
/// frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pub omega: f64,
    /// `ħω² Im[n²] ρ` at each cell centre: net emission per unit `η − n̂`.
    pub emission: Vec<f64>,
    /// Photon-number contribution of the fixed-temperature sources.
    pub fixed: Vec<f64>,
    /// Row-major `W_cs`.
    pub weights: Vec<f64>,
    /// Row sums including the fixed sources at unit occupation.
    pub row_sums: Vec<f64>,
}

impl Coupling {
    pub fn new(stack: &LayerStack, cells: &CellGrid, omega: f64, spec: &QuadratureSpec) -> Result<Self> {
        let green = LayeredGreen::new(stack, omega)?;
        let k: &PhysicalConstants = stack.constants();
        let n = cells.len();
        let edges = cells.all_edges();
        let solved: Vec<usize> = cells.layers.iter().map(|l| l + 1).collect();
        let fixed_regions: Vec<(f64, f64)> = (0..stack.region_count())
            .filter(|r| !solved.contains(r))
            .map(|r| stack.region_bounds(r))
            .collect();
        let eval = SpectralEvaluator::new(stack, omega, spec)?;
        let rows: Vec<Result<(f64, f64, Vec<f64>, f64)>> = (0..n)
            .into_par_iter()
            .map(|c| {
                let x = cells.center(c);
                let rho = eval.ldos(x);
                let floor = crate::observables::LDOS_FLOOR_FRACTION * k.vacuum_ldos();
                if !(rho >= floor) {
                    return Err(Error::DegenerateLdos { x, ldos: rho, floor });
                }
                let nc = green.index_at(x);
                let emission = k.hbar * omega * omega * (nc * nc).im * rho;
                let prefactor = k.eps0 * omega * k.mu0 * k.mu0 / (2.0 * std::f64::consts::PI.powi(2) * k.hbar * rho);
                let kernel = |xp: f64| prefactor * green.j0_squared_at(xp) * green.eval(x, xp).total.norm_sqr();
                let mut breaks = edges.clone();
                breaks.push(x);
                let domain = SourceDomain::new(stack, omega, &breaks, spec)?;
                let mut fixed = 0.0;
                let mut fixed_unit = 0.0;
                for &(lo, hi) in &fixed_regions {
                    // Fixed regions may carry their own temperature profile.
                    let occupied = domain.integrate_between(|xp| kernel(xp) * bose_einstein(stack.temperature_at(xp), omega), lo, hi, spec)?;
                    let unit = domain.integrate_between(kernel, lo, hi, spec)?;
                    fixed += occupied.value;
                    fixed_unit += unit.value;
                }
                let mut row = Vec::with_capacity(n);
                for s in 0..n {
                    let (lo, hi) = cells.bounds(s);
                    row.push(domain.integrate_between(kernel, lo, hi, spec)?.value);
                }
                let sum = fixed_unit + row.iter().sum::<f64>();
                Ok((emission, fixed, row, sum))
            })
            .collect();
        let mut out = Coupling {
            omega,
            emission: Vec::with_capacity(n),
            fixed: Vec::with_capacity(n),
            weights: Vec::with_capacity(n * n),
            row_sums: Vec::with_capacity(n),
        };
        for r in rows {
            let (e, f, w, s) = r?;
            out.emission.push(e);
            out.fixed.push(f);
            out.weights.extend(w);
            out.row_sums.push(s);
        }
        Ok(out)
    }

    fn n(&self) -> usize {
        self.emission.len()
    }

    /// Cell photon numbers for cell occupations `eta`.
    pub fn photon_numbers(&self, eta: &[f64]) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|c| self.fixed[c] + self.weights[c * n..(c + 1) * n].iter().zip(eta).map(|(w, e)| w * e).sum::<f64>())
            .collect()
    }

    /// Cell occupations with zero net emission at this frequency:
    /// `(I − W) η = F`.
    pub fn balanced_occupations(&self) -> Result<Vec<f64>> {
        let n = self.n();
        let a = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - self.weights[i * n + j]);
        let b = DVector::from_column_slice(&self.fixed);
        let x = a.lu().solve(&b).ok_or(Error::SingularSystem { omega: self.omega })?;
        Ok(x.iter().copied().collect())
    }
}

/// Couplings on the nodes of a frozen frequency rule.
#[derive(Debug, Clone)]
pub struct SpectralCouplings {
    pub cells: CellGrid,
    pub rule: FrozenRule,
    pub couplings: Vec<Coupling>,
}

impl SpectralCouplings {
    /// Adapts a frequency rule to the emission spectrum of the middle cell
    /// at the hottest reservoir temperature and evaluates couplings on its
    /// nodes.
    pub fn new(stack: &LayerStack, spec: &SolverSpec) -> Result<Self> {
        spec.validate()?;
        let cells = CellGrid::new(stack, spec)?;
        let (_, t_hi) = cells.reservoir_range(stack);
        let x_mid = cells.center(cells.len() / 2);
        let vacuum = stack.constants().vacuum_ldos();
        let (w_lo, w_hi) = spec.omega_band;
        let proxy = |w: f64| {
            let Ok(ev) = SpectralEvaluator::new(stack, w, &spec.quadrature) else {
                return f64::NAN;
            };
            let n = stack.n_at(x_mid, w);
            let r = w / w_hi;
            r * r * (n * n).im * ev.ldos(x_mid) / vacuum * bose_einstein(t_hi, w)
        };
        let rule_spec = QuadratureSpec {
            rel_tol: spec.spectral_rel_tol,
            ..spec.quadrature
        };
        let (_, rule) = spectrum_rule(proxy, w_lo, w_hi, &rule_spec)?;
        let couplings = rule
            .nodes
            .par_iter()
            .map(|&w| Coupling::new(stack, &cells, w, &spec.quadrature))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { cells, rule, couplings })
    }

    /// Frequency-integrated net emission of every cell for cell
    /// temperatures `t`.
    pub fn residuals(&self, t: &[f64]) -> Vec<f64> {
        let n = self.cells.len();
        let mut out = vec![0.0; n];
        for (cp, wt) in self.couplings.iter().zip(&self.rule.weights) {
            let eta: Vec<f64> = t.iter().map(|&ti| bose_einstein(ti, cp.omega)).collect();
            let n_hat = cp.photon_numbers(&eta);
            for c in 0..n {
                out[c] += wt * cp.emission[c] * (eta[c] - n_hat[c]);
            }
        }
        out
    }
}

/// Steady-state cell temperatures under the integrated balance.
#[derive(Debug, Clone, PartialEq)]
pub struct CavitySolution {
    pub cell_centers: Vec<f64>,
    pub temperatures: Vec<f64>,
    /// `∫ Q dω` per cell at the returned temperatures, W/m³ per area.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub cells: CellGrid,
    /// The input stack with the solved layers at the returned temperatures.
    pub stack: LayerStack,
}

/// `∫ Q(x_c, ω) dω` over the band for cell `cell_index`, with fresh
/// adaptive quadrature in both frequency and source position.
pub fn cell_power_residual(stack: &LayerStack, cell_index: usize, spec: &SolverSpec) -> Result<f64> {
    spec.validate()?;
    let cells = CellGrid::new(stack, spec)?;
    if cell_index >= cells.len() {
        return Err(Error::invalid("cell_index", format!("{cell_index} out of range (have {} cells)", cells.len())));
    }
    let x = cells.center(cell_index);
    let failure = std::sync::Mutex::new(None);
    let f = |w: f64| match SpectralEvaluator::new(stack, w, &spec.quadrature).and_then(|ev| ev.net_emission(x)) {
        Ok(q) => q,
        Err(e) => {
            failure.lock().expect("poisoned").get_or_insert(e);
            0.0
        }
    };
    let est = integrate_spectrum(f, spec.omega_band.0, spec.omega_band.1, &spec.quadrature)?;
    if let Some(e) = failure.into_inner().expect("poisoned") {
        return Err(e);
    }
    Ok(est.value)
}

const BISECTION_STEPS: usize = 200;

/// Root of the increasing function `r` on `[lo, hi]`.
fn bisect<F: Fn(f64) -> f64>(r: F, cell: usize, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if hi - lo <= 0.0 {
        return Ok(lo);
    }
    let (r_lo, r_hi) = (r(lo), r(hi));
    if r_lo > 0.0 || r_hi < 0.0 {
        return Err(Error::BracketFailure {
            cell,
            t_lo: lo,
            t_hi: hi,
            r_lo,
            r_hi,
        });
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..BISECTION_STEPS {
        if b - a <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        if r(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Solves for the cell temperatures whose frequency-integrated net
/// emission vanishes.
///
/// The outer loop holds the field (the photon numbers) fixed, solves each
/// cell's scalar balance by bisection between the coldest and hottest
/// reservoir temperatures, and under-relaxes the update. It stops when the
/// largest update is below `t_tol` and every residual is below `q_tol`;
/// otherwise `converged` is false after `max_outer_iterations`.
pub fn solve_cavity_temperatures(stack: &LayerStack, spec: &SolverSpec) -> Result<CavitySolution> {
    let sc = SpectralCouplings::new(stack, spec)?;
    solve_with_couplings(stack, spec, &sc)
}

pub fn solve_with_couplings(stack: &LayerStack, spec: &SolverSpec, sc: &SpectralCouplings) -> Result<CavitySolution> {
    let cells = &sc.cells;
    let n = cells.len();
    let (t_lo, t_hi) = cells.reservoir_range(stack);
    let mut t: Vec<f64> = cells.centers().iter().map(|&x| stack.temperature_at(x).clamp(t_lo, t_hi)).collect();
    let mut iterations = 0;
    let mut converged = false;
    let mut residuals = sc.residuals(&t);
    while iterations < spec.max_outer_iterations {
        iterations += 1;
        // Field at the current profile.
        let fields: Vec<(Vec<f64>, Vec<f64>)> = sc
            .couplings
            .iter()
            .map(|cp| {
                let eta: Vec<f64> = t.iter().map(|&ti| bose_einstein(ti, cp.omega)).collect();
                let n_hat = cp.photon_numbers(&eta);
                (eta, n_hat)
            })
            .collect();
        let targets = (0..n)
            .into_par_iter()
            .map(|c| {
                let r = |tc: f64| -> f64 {
                    sc.couplings
                        .iter()
                        .zip(&sc.rule.weights)
                        .zip(&fields)
                        .map(|((cp, wt), (_, n_hat))| wt * cp.emission[c] * (bose_einstein(tc, cp.omega) - n_hat[c]))
                        .sum()
                };
                bisect(r, c, t_lo, t_hi, 1e-3 * spec.t_tol)
            })
            .collect::<Result<Vec<f64>>>()?;
        let max_step = t.iter().zip(&targets).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if max_step < spec.t_tol && residuals.iter().all(|r| r.abs() < spec.q_tol) {
            converged = true;
            break;
        }
        for (ti, target) in t.iter_mut().zip(&targets) {
            *ti += spec.underrelaxation * (target - *ti);
        }
        residuals = sc.residuals(&t);
    }
    Ok(CavitySolution {
        cell_centers: cells.centers(),
        stack: cells.apply(stack, &t)?,
        temperatures: t,
        residuals,
        iterations,
        converged,
        cells: cells.clone(),
    })
}

/// Cell occupations and effective temperatures with zero net emission at
/// one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBalance {
    pub omega: f64,
    pub cell_centers: Vec<f64>,
    pub occupations: Vec<f64>,
    pub temperatures: Vec<f64>,
    pub cells: CellGrid,
    /// The input stack with the solved layers at `temperatures`. Valid for
    /// observables at `omega` only.
    pub stack: LayerStack,
}

/// Per-frequency balance at `omega`.
pub fn spectral_balance(stack: &LayerStack, omega: f64, spec: &SolverSpec) -> Result<SpectralBalance> {
    spec.validate()?;
    let cells = CellGrid::new(stack, spec)?;
    let cp = Coupling::new(stack, &cells, omega, &spec.quadrature)?;
    let occupations = cp.balanced_occupations()?;
    let temperatures = occupations
        .iter()
        .map(|&n| effective_temperature(n, omega))
        .collect::<Result<Vec<f64>>>()?;
    Ok(SpectralBalance {
        omega,
        cell_centers: cells.centers(),
        stack: cells.apply(stack, &temperatures)?,
        occupations,
        temperatures,
        cells,
    })
}
