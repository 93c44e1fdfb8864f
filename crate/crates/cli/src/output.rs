//! Delimiter-separated output files.

use std::fmt::Write as _;
use std::path::Path;

use qfed1d_core::observables::FieldMap;
use qfed1d_core::selfconsistent::CavitySolution;

use crate::error::CliError;

pub const FIELD_HEADER: &str = "x_um, energy_eV, value, units";
pub const CELL_HEADER: &str = "cell_x_um, T_K, residual";
pub const RESONANCE_HEADER: &str = "energy_eV";

/// C `%.10e` formatting: ten fractional digits and an exponent with sign
/// and at least two digits.
pub fn format_e10(v: f64) -> String {
    if v.is_nan() {
        return "nan".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let s = format!("{v:.10e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

pub fn field_table(map: &FieldMap) -> String {
    let mut out = String::new();
    out.push_str(FIELD_HEADER);
    out.push('\n');
    let units = map.units();
    for (i, x) in map.grid.positions().iter().enumerate() {
        for (j, e) in map.grid.energies_ev().iter().enumerate() {
            let _ = writeln!(
                out,
                "{}, {}, {}, {units}",
                format_e10(x * 1e6),
                format_e10(*e),
                format_e10(map.value(i, j))
            );
        }
    }
    out
}

pub fn cell_table(solution: &CavitySolution) -> String {
    let mut out = String::new();
    out.push_str(CELL_HEADER);
    out.push('\n');
    for ((x, t), r) in solution.cell_centers.iter().zip(&solution.temperatures).zip(&solution.residuals) {
        let _ = writeln!(out, "{}, {}, {}", format_e10(x * 1e6), format_e10(*t), format_e10(*r));
    }
    out
}

pub fn resonance_table(energies_ev: &[f64]) -> String {
    let mut out = String::new();
    out.push_str(RESONANCE_HEADER);
    out.push('\n');
    for e in energies_ev {
        let _ = writeln!(out, "{}", format_e10(*e));
    }
    out
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}
