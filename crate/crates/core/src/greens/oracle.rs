//! Finite-difference reference solution of the layered Helmholtz problem,
//! used to cross-check [`super::LayeredGreen`].
//!
//! The ODE is discretized with the three-point flux stencil on a grid that
//! has a node on every interface, on the source and on the observation
//! point. Both truncation ends use the exact outgoing condition of the
//! discrete homogeneous equation, so the truncated grid reflects nothing.
//! Two grids (spacing `h` and `h/2`) are combined by Richardson
//! extrapolation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::materials::LayerStack;

/// Coarse-grid spacing in units of the shortest wavelength in the stack.
pub const POINTS_PER_WAVELENGTH: f64 = 200.0;

/// Nodal solution on one grid.
#[derive(Debug, Clone)]
pub struct OracleField {
    pub nodes: Vec<f64>,
    pub values: Vec<Complex64>,
    pub source_node: usize,
}

impl OracleField {
    /// Linear interpolation between nodes.
    pub fn value_at(&self, x: f64) -> Complex64 {
        let i = self.nodes.partition_point(|n| *n <= x);
        if i == 0 {
            return self.values[0];
        }
        if i == self.nodes.len() {
            return self.values[i - 1];
        }
        let (x0, x1) = (self.nodes[i - 1], self.nodes[i]);
        let t = (x - x0) / (x1 - x0);
        self.values[i - 1] * (1.0 - t) + self.values[i] * t
    }

    /// One-sided derivatives `(G′(x′⁻), G′(x′⁺))` at the source node.
    pub fn source_slopes(&self) -> (Complex64, Complex64) {
        let s = self.source_node;
        let left = (self.values[s] - self.values[s - 1]) / (self.nodes[s] - self.nodes[s - 1]);
        let right = (self.values[s + 1] - self.values[s]) / (self.nodes[s + 1] - self.nodes[s]);
        (left, right)
    }
}

/// Root of `β + 1/β = 2 − (kh)²` with `|β| < 1`: the per-node factor of a
/// discrete wave decaying away from the grid.
fn outgoing_factor(k: Complex64, h: f64) -> Complex64 {
    let s = 2.0 - k * k * h * h;
    let disc = (s * s - 4.0).sqrt();
    let b1 = 0.5 * (s + disc);
    let b2 = 0.5 * (s - disc);
    if b1.norm() < b2.norm() {
        b1
    } else {
        b2
    }
}

fn wavenumber(stack: &LayerStack, x_left: f64, x_right: f64, omega: f64) -> Complex64 {
    // Medium of the open segment (x_left, x_right).
    let mid = 0.5 * (x_left + x_right);
    omega * stack.n_at(mid, omega) / stack.constants().c
}

/// Solves for `G(·, ω, x′)` on a grid `refinement` times finer than the
/// coarse spacing. `probes` are extra positions forced onto the grid.
pub fn solve(
    stack: &LayerStack,
    omega: f64,
    xprime: f64,
    probes: &[f64],
    refinement: usize,
) -> Result<OracleField> {
    if !(omega > 0.0) {
        return Err(Error::NonPositiveFrequency(omega));
    }
    let c = stack.constants().c;
    let n_left = stack.left().material.index(omega);
    let n_right = stack.right().material.index(omega);
    if n_left.im <= 0.0 || n_right.im <= 0.0 {
        return Err(Error::OracleUnbounded(
            "both half-spaces need Im(n) > 0 for an outgoing closure".into(),
        ));
    }
    let max_re = (0..stack.region_count())
        .map(|r| stack.region_material(r).index(omega).re)
        .fold(0.0, f64::max);
    let lambda_min = 2.0 * std::f64::consts::PI * c / (omega * max_re);
    let h_max = lambda_min / POINTS_PER_WAVELENGTH / refinement.max(1) as f64;

    let mut marks: Vec<f64> = stack.interfaces().to_vec();
    marks.push(xprime);
    marks.extend_from_slice(probes);
    let lo = marks.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = marks.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lambda_vac = 2.0 * std::f64::consts::PI * c / omega;
    marks.push(lo - lambda_vac / n_left.re);
    marks.push(hi + lambda_vac / n_right.re);
    marks.sort_by(f64::total_cmp);
    marks.dedup();

    let mut nodes = vec![marks[0]];
    for w in marks.windows(2) {
        let m = ((w[1] - w[0]) / h_max).ceil().max(1.0) as usize;
        for j in 1..=m {
            nodes.push(if j == m {
                w[1]
            } else {
                w[0] + (w[1] - w[0]) * j as f64 / m as f64
            });
        }
    }
    let n = nodes.len();
    let source_node = nodes
        .iter()
        .position(|x| *x == xprime)
        .expect("source is a grid node");

    // Rows scaled by (h₋ + h₊)/2: sub·G[i−1] + diag·G[i] + sup·G[i+1] = rhs.
    let mut sub = vec![Complex64::new(0.0, 0.0); n];
    let mut diag = vec![Complex64::new(0.0, 0.0); n];
    let mut sup = vec![Complex64::new(0.0, 0.0); n];
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let (hm, km) = if i == 0 {
            let h = nodes[1] - nodes[0];
            (h, omega * n_left / c)
        } else {
            (nodes[i] - nodes[i - 1], wavenumber(stack, nodes[i - 1], nodes[i], omega))
        };
        let (hp, kp) = if i == n - 1 {
            let h = nodes[n - 1] - nodes[n - 2];
            (h, omega * n_right / c)
        } else {
            (nodes[i + 1] - nodes[i], wavenumber(stack, nodes[i], nodes[i + 1], omega))
        };
        let half = 0.5 * (hm + hp);
        let k2 = (hm * km * km + hp * kp * kp) / (hm + hp);
        let cm = 1.0 / hm;
        let cp = 1.0 / hp;
        diag[i] = Complex64::from(-(cm + cp)) + k2 * half;
        if i == 0 {
            diag[i] += cm * outgoing_factor(km, hm);
        } else {
            sub[i] = Complex64::from(cm);
        }
        if i == n - 1 {
            diag[i] += cp * outgoing_factor(kp, hp);
        } else {
            sup[i] = Complex64::from(cp);
        }
        if i == source_node {
            rhs[i] = Complex64::from(-1.0);
        }
    }
    let values = thomas(&sub, &diag, &sup, &rhs)?;
    Ok(OracleField {
        nodes,
        values,
        source_node,
    })
}

fn thomas(
    sub: &[Complex64],
    diag: &[Complex64],
    sup: &[Complex64],
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = diag.len();
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    let mut denom = diag[0];
    if denom.norm() == 0.0 {
        return Err(Error::OracleUnbounded("singular finite-difference system".into()));
    }
    c[0] = sup[0] / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - sub[i] * c[i - 1];
        if denom.norm() == 0.0 {
            return Err(Error::OracleUnbounded("singular finite-difference system".into()));
        }
        c[i] = sup[i] / denom;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    Ok(x)
}

/// `G(x, ω, x′)` from Richardson-extrapolated finite differences.
pub fn green_oracle(stack: &LayerStack, omega: f64, x: f64, xprime: f64) -> Result<Complex64> {
    let coarse = solve(stack, omega, xprime, &[x], 1)?.value_at(x);
    let fine = solve(stack, omega, xprime, &[x], 2)?.value_at(x);
    Ok((4.0 * fine - coarse) / 3.0)
}
