//! Command dispatch.

use std::path::{Path, PathBuf};

use qfed1d_core::observables::{field_map, resonance_energies, FieldMap, Observable};
use qfed1d_core::selfconsistent::{solve_cavity_temperatures, spectral_balance, Balance, CavitySolution};
use qfed1d_core::{LayerStack, QuadratureSpec, SpectralGrid};

use crate::config::SimulationConfig;
use crate::error::CliError;
use crate::output::{cell_table, field_table, resonance_table, write_file};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Ldos,
    Temperature,
    Poynting,
    NetEmission,
    SolveCavity,
    All,
}

pub const CELLS_FILE: &str = "cells.dsv";
pub const RESONANCES_FILE: &str = "resonances.dsv";

/// Spatial samples and energy resolution of the resonance scan.
const RESONANCE_POSITIONS: usize = 201;
const RESONANCE_STEP_EV: f64 = 1e-3;

pub fn observable_file(observable: Observable) -> String {
    format!("{}.dsv", observable.name())
}

/// Files written by a run, in order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub solution: Option<CavitySolution>,
}

struct Writer<'a> {
    dir: &'a Path,
    summary: RunSummary,
}

impl Writer<'_> {
    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        write_file(self.dir, name, contents)?;
        self.summary.files.push(self.dir.join(name));
        Ok(())
    }

    fn field(&mut self, map: &FieldMap) -> Result<(), CliError> {
        self.write(&observable_file(map.observable), &field_table(map))
    }
}

/// Detected resonance energies (eV) of the configured region.
pub fn detect_resonances(config: &SimulationConfig) -> Result<Vec<f64>, CliError> {
    let Some(region) = config.resonance_region() else {
        return Ok(Vec::new());
    };
    let (lo, hi) = (config.grid.energy_min_ev, config.grid.energy_max_ev);
    if !(hi > lo) {
        return Ok(Vec::new());
    }
    let count = ((hi - lo) / RESONANCE_STEP_EV).ceil() as usize + 1;
    Ok(resonance_energies(&config.stack()?, region, (lo, hi), RESONANCE_POSITIONS, count.max(3))?)
}

/// Stacks whose solved layers carry the per-frequency balanced
/// temperatures, one per grid energy.
fn balanced_stacks(stack: &LayerStack, grid: &SpectralGrid, config: &SimulationConfig) -> Result<Vec<LayerStack>, CliError> {
    let solver = config.solver();
    grid.omegas()
        .into_iter()
        .map(|w| Ok(spectral_balance(stack, w, &solver)?.stack))
        .collect()
}

/// Observables where each energy column uses its own balanced stack.
fn columnwise_field_map(
    stacks: &[LayerStack],
    grid: &SpectralGrid,
    observable: Observable,
    quadrature: &QuadratureSpec,
) -> Result<FieldMap, CliError> {
    let positions = grid.positions().to_vec();
    let mut columns = Vec::with_capacity(stacks.len());
    for (stack, &e) in stacks.iter().zip(grid.energies_ev()) {
        let column_grid = SpectralGrid::new(positions.clone(), vec![e])?;
        columns.push(field_map(stack, &column_grid, observable, quadrature)?.values);
    }
    let values = (0..positions.len())
        .flat_map(|i| columns.iter().map(move |c| c[i]))
        .collect();
    Ok(FieldMap {
        grid: grid.clone(),
        observable,
        values,
    })
}

pub fn run(config: &SimulationConfig, command: Command, out_dir: &Path) -> Result<RunSummary, CliError> {
    std::fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let stack = config.stack()?;
    let grid = config.grid()?;
    let quadrature = config.quadrature();
    let mut w = Writer {
        dir: out_dir,
        summary: RunSummary::default(),
    };
    let single = |o: Observable| -> Result<FieldMap, CliError> { Ok(field_map(&stack, &grid, o, &quadrature)?) };
    match command {
        Command::Ldos => {
            w.field(&single(Observable::Ldos)?)?;
            w.write(RESONANCES_FILE, &resonance_table(&detect_resonances(config)?))?;
        }
        Command::Temperature => w.field(&single(Observable::Temperature)?)?,
        Command::Poynting => w.field(&single(Observable::Poynting)?)?,
        Command::NetEmission => w.field(&single(Observable::NetEmission)?)?,
        Command::All => {
            for o in config.observables() {
                w.field(&single(o)?)?;
            }
            w.write(RESONANCES_FILE, &resonance_table(&detect_resonances(config)?))?;
        }
        Command::SolveCavity => {
            let solver = config.solver();
            let solution = solve_cavity_temperatures(&stack, &solver)?;
            w.write(CELLS_FILE, &cell_table(&solution))?;
            if !solution.converged {
                return Err(CliError::NotConverged {
                    iterations: solution.iterations,
                    max_residual: solution.residuals.iter().fold(0.0, |m, r| m.max(r.abs())),
                });
            }
            let balanced = match solver.balance {
                Balance::Integrated => None,
                Balance::Spectral => Some(balanced_stacks(&stack, &grid, config)?),
            };
            for o in config.observables() {
                let map = match &balanced {
                    None => field_map(&solution.stack, &grid, o, &quadrature)?,
                    Some(stacks) => columnwise_field_map(stacks, &grid, o, &quadrature)?,
                };
                w.field(&map)?;
            }
            w.write(RESONANCES_FILE, &resonance_table(&detect_resonances(config)?))?;
            w.summary.solution = Some(solution);
        }
    }
    Ok(w.summary)
}
