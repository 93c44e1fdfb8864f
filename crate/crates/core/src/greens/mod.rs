//! Green's function of the 1D Helmholtz equation
//! `(∂²/∂x² + ω² n(x)² / c²) G = −δ(x − x′)` in a layered stack.
//!
//! In every region the field is a sum of `e^{+ik(x − x_r)}` and
//! `e^{−ik(x − x_r)}` waves, where the phase origin `x_r` is the left
//! interface of a finite layer or the bounding interface of a half-space.
//! Two homogeneous solutions are swept across the stack: `u_L`, outgoing
//! into the left half-space, and `u_R`, outgoing into the right one. With the
//! Wronskian `W = u_L u_R′ − u_L′ u_R` the Green's function is
//!
//! ```text
//! G(x, x′) = −u_L(min(x, x′)) · u_R(max(x, x′)) / W
//! ```
//!
//! which is continuous with a continuous derivative at every interface, has
//! the unit derivative jump at the source and radiates outward.

pub mod oracle;

use num_complex::Complex64;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::materials::{j0_squared_for_index, LayerStack};

/// Minimum imaginary index given to lossless half-spaces so that outgoing
/// waves are well defined.
pub const DEFAULT_LOSS_REGULARIZATION: f64 = 1e-9;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `G` at an observation point together with its right-going (`e^{+ikx}`)
/// and left-going (`e^{−ikx}`) parts in the observation region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenComponents {
    pub total: Complex64,
    pub rightgoing: Complex64,
    pub leftgoing: Complex64,
}

impl GreenComponents {
    fn from_parts(rightgoing: Complex64, leftgoing: Complex64) -> Self {
        Self {
            total: rightgoing + leftgoing,
            rightgoing,
            leftgoing,
        }
    }

    /// `G_R − G_L`, which equals `∂G/∂x / (ik)` in the observation region.
    pub fn directional_difference(&self) -> Complex64 {
        self.rightgoing - self.leftgoing
    }

    fn average(a: Self, b: Self) -> Self {
        Self::from_parts(
            0.5 * (a.rightgoing + b.rightgoing),
            0.5 * (a.leftgoing + b.leftgoing),
        )
    }
}

/// Vector-potential, electric, magnetic-induction and magnetic-field kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledGreens {
    pub g_a: Complex64,
    pub g_e: Complex64,
    pub g_b: Complex64,
    pub g_h: Complex64,
}

fn check_omega(omega: f64) -> Result<()> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveFrequency(omega))
    }
}

/// Closed-form Green's function of a homogeneous medium,
/// `G = i e^{ik|x − x′|} / (2k)` with `k = ω n / c`.
///
/// The wave travels right for `x > x′` and left for `x < x′`; exactly at the
/// source it is split evenly between both directions.
pub fn green_homogeneous(n: Complex64, omega: f64, x: f64, xprime: f64) -> Result<GreenComponents> {
    check_omega(omega)?;
    if n.re <= 0.0 || n.im < 0.0 {
        return Err(Error::invalid("refractive index", "must satisfy Re(n) > 0, Im(n) >= 0"));
    }
    let k = omega * n / crate::constants::C;
    let g = I * (I * k * (x - xprime).abs()).exp() / (2.0 * k);
    Ok(if x > xprime {
        GreenComponents::from_parts(g, Complex64::new(0.0, 0.0))
    } else if x < xprime {
        GreenComponents::from_parts(Complex64::new(0.0, 0.0), g)
    } else {
        GreenComponents::from_parts(0.5 * g, 0.5 * g)
    })
}

/// Plane-wave coefficients `(a, b)` of `a e^{ikξ} + b e^{−ikξ}`.
type Amplitudes = (Complex64, Complex64);

#[derive(Debug, Clone)]
struct RegionWaves {
    index: Complex64,
    k: Complex64,
    origin: f64,
    outgoing_left: Amplitudes,
    outgoing_right: Amplitudes,
    wronskian: Complex64,
}

impl RegionWaves {
    fn phases(&self, x: f64) -> (Complex64, Complex64) {
        let ikx = I * self.k * (x - self.origin);
        (ikx.exp(), (-ikx).exp())
    }
}

/// Green's function of a stack at one angular frequency. Construction is
/// `O(layers)`; each evaluation is a region lookup plus a few exponentials.
#[derive(Debug, Clone)]
pub struct LayeredGreen {
    omega: f64,
    interfaces: Vec<f64>,
    regions: Vec<RegionWaves>,
    constants: PhysicalConstants,
}

impl LayeredGreen {
    pub fn new(stack: &LayerStack, omega: f64) -> Result<Self> {
        Self::with_regularization(stack, omega, DEFAULT_LOSS_REGULARIZATION)
    }

    /// As [`LayeredGreen::new`] with an explicit minimum `Im(n)` for the two
    /// half-spaces.
    pub fn with_regularization(stack: &LayerStack, omega: f64, loss_floor: f64) -> Result<Self> {
        check_omega(omega)?;
        let c = stack.constants().c;
        let count = stack.region_count();
        let interfaces = stack.interfaces().to_vec();
        let mut indices = Vec::with_capacity(count);
        for r in 0..count {
            let mut n = stack.region_material(r).index(omega);
            if stack.is_half_space(r) && n.im < loss_floor {
                n.im = loss_floor;
            }
            indices.push(n);
        }
        let ks: Vec<Complex64> = indices.iter().map(|n| omega * n / c).collect();
        let origin = |r: usize| -> f64 {
            if r == 0 {
                interfaces[0]
            } else {
                interfaces[r - 1]
            }
        };
        // Thickness of finite region r (1..count-1).
        let width = |r: usize| interfaces[r] - interfaces[r - 1];
        let split = |psi: Complex64, dpsi: Complex64, k: Complex64| -> Amplitudes {
            let q = dpsi / (I * k);
            (0.5 * (psi + q), 0.5 * (psi - q))
        };

        // u_L: pure e^{-ikξ} in the left half-space, swept rightward.
        let mut outgoing_left = vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); count];
        outgoing_left[0] = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        let (mut psi, mut dpsi) = (Complex64::new(1.0, 0.0), -I * ks[0]);
        for r in 1..count {
            let (a, b) = split(psi, dpsi, ks[r]);
            outgoing_left[r] = (a, b);
            if r < count - 1 {
                let e = (I * ks[r] * width(r)).exp();
                let einv = (-I * ks[r] * width(r)).exp();
                psi = a * e + b * einv;
                dpsi = I * ks[r] * (a * e - b * einv);
            }
        }

        // u_R: pure e^{+ikξ} in the right half-space, swept leftward.
        let mut outgoing_right = vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); count];
        outgoing_right[count - 1] = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        let (mut psi, mut dpsi) = (Complex64::new(1.0, 0.0), I * ks[count - 1]);
        for r in (0..count - 1).rev() {
            let (a0, b0) = split(psi, dpsi, ks[r]);
            if r == 0 {
                outgoing_right[0] = (a0, b0);
            } else {
                // (a0, b0) are referenced to the right edge; shift to the left.
                let d = width(r);
                let a = a0 * (-I * ks[r] * d).exp();
                let b = b0 * (I * ks[r] * d).exp();
                outgoing_right[r] = (a, b);
                psi = a + b;
                dpsi = I * ks[r] * (a - b);
            }
        }

        let mut regions = Vec::with_capacity(count);
        for r in 0..count {
            let (al, bl) = outgoing_left[r];
            let (ar, br) = outgoing_right[r];
            let wronskian = 2.0 * I * ks[r] * (ar * bl - al * br);
            if !(wronskian.norm() > 0.0 && wronskian.is_finite()) {
                return Err(Error::SingularSystem { omega });
            }
            regions.push(RegionWaves {
                index: indices[r],
                k: ks[r],
                origin: origin(r),
                outgoing_left: outgoing_left[r],
                outgoing_right: outgoing_right[r],
                wronskian,
            });
        }
        Ok(Self {
            omega,
            interfaces,
            regions,
            constants: *stack.constants(),
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    pub fn region_at(&self, x: f64) -> usize {
        self.interfaces.partition_point(|xi| *xi <= x)
    }

    /// Refractive index used by the solver in a region (half-spaces carry
    /// the loss regularization).
    pub fn index(&self, region: usize) -> Complex64 {
        self.regions[region].index
    }

    pub fn index_at(&self, x: f64) -> Complex64 {
        self.index(self.region_at(x))
    }

    /// `j₀²` at `x`, using the solver's (regularized) index.
    pub fn j0_squared_at(&self, x: f64) -> f64 {
        j0_squared_for_index(self.index_at(x), self.omega, &self.constants)
    }

    fn outgoing_left_at(&self, x: f64) -> (Complex64, Complex64) {
        let rw = &self.regions[self.region_at(x)];
        let (ep, em) = rw.phases(x);
        (rw.outgoing_left.0 * ep, rw.outgoing_left.1 * em)
    }

    fn outgoing_right_at(&self, x: f64) -> (Complex64, Complex64) {
        let rw = &self.regions[self.region_at(x)];
        let (ep, em) = rw.phases(x);
        (rw.outgoing_right.0 * ep, rw.outgoing_right.1 * em)
    }

    /// `G(x, ω, x′)` with its directional decomposition at `x`.
    pub fn eval(&self, x: f64, xprime: f64) -> GreenComponents {
        let w = self.regions[self.region_at(xprime)].wronskian;
        let source_left = || {
            // Observation to the right of the source: u_R(x) u_L(x′).
            let (ul_r, ul_l) = self.outgoing_left_at(xprime);
            let scale = -(ul_r + ul_l) / w;
            let (r, l) = self.outgoing_right_at(x);
            GreenComponents::from_parts(r * scale, l * scale)
        };
        let source_right = || {
            let (ur_r, ur_l) = self.outgoing_right_at(xprime);
            let scale = -(ur_r + ur_l) / w;
            let (r, l) = self.outgoing_left_at(x);
            GreenComponents::from_parts(r * scale, l * scale)
        };
        if x > xprime {
            source_left()
        } else if x < xprime {
            source_right()
        } else {
            GreenComponents::average(source_left(), source_right())
        }
    }

    /// Scaled kernels at observation `x` for a source at `x′`.
    pub fn scaled(&self, x: f64, xprime: f64) -> ScaledGreens {
        let k = &self.constants;
        let g = self.eval(x, xprime);
        let j0 = self.j0_squared_at(xprime).sqrt();
        let n_obs = self.index_at(x);
        let g_a = k.mu0 * j0 * g.total;
        let g_e = I * k.mu0 * self.omega * j0 * g.total;
        let g_b = I * k.mu0 * self.omega * n_obs / k.c * j0 * g.directional_difference();
        ScaledGreens {
            g_a,
            g_e,
            g_b,
            g_h: g_b / k.mu0,
        }
    }
}

/// `G(x, ω, x′)` of `stack`, see [`LayeredGreen`].
pub fn green_layered(stack: &LayerStack, omega: f64, x: f64, xprime: f64) -> Result<GreenComponents> {
    Ok(LayeredGreen::new(stack, omega)?.eval(x, xprime))
}

pub fn scaled_greens(stack: &LayerStack, omega: f64, x: f64, xprime: f64) -> Result<ScaledGreens> {
    Ok(LayeredGreen::new(stack, omega)?.scaled(x, xprime))
}
