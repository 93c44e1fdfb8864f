//! Adaptive Gauss–Kronrod integration over source positions and over
//! frequency.
//!
//! Source integrals are split at every interface and at caller supplied
//! breakpoints. Finite pieces start from panels no wider than a quarter of
//! the local wavelength. Semi-infinite tails are mapped through
//! `u = e^{−κ·depth}` with `κ = 2 ω Im(n) / c`, so a kernel decaying like
//! the tail's attenuation becomes constant in `u`; the tail is truncated at
//! `u = tail_truncation_eps`. All pieces share one global error budget and
//! the worst panel is bisected until the summed error estimate is below
//! `max(abs_floor, rel_tol · ∫|f|)`.
//!
//! Kernels may be called from several threads at once when the caller
//! parallelizes over points; they must be pure.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::greens::DEFAULT_LOSS_REGULARIZATION;
use crate::materials::LayerStack;

/// Tolerances and limits of the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    /// Absolute tolerance floor, in the units of the (scaled) integral.
    pub abs_floor: f64,
    pub tail_truncation_eps: f64,
    /// Maximum number of panel bisections.
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_floor: 1e-15,
            tail_truncation_eps: 1e-10,
            max_subdivisions: 4000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rel_tol", self.rel_tol),
            ("abs_floor", self.abs_floor),
            ("tail_truncation_eps", self.tail_truncation_eps),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::invalid(
                    format!("quadrature.{name}"),
                    format!("must lie in (0, 1), got {v}"),
                ));
            }
        }
        if self.max_subdivisions < 1 {
            return Err(Error::invalid("quadrature.max_subdivisions", "must be >= 1"));
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Estimated absolute error, including the truncated tail mass.
    pub abs_error: f64,
    /// `∫|f|` estimate, the scale used for the relative tolerance.
    pub magnitude: f64,
    pub evaluations: usize,
    pub subdivisions: usize,
}

// 21-point Kronrod extension of the 10-point Gauss rule, QUADPACK QK21.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_718_582,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
// Gauss weights for XGK[1], XGK[3], …, XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Nodes and weights of the 21-point rule on `[a, b]`.
fn kronrod_nodes(a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (0..21).map(move |j| {
        if j < 10 {
            (center - half * XGK[j], half * WGK[j])
        } else if j == 10 {
            (center, half * WGK[10])
        } else {
            (center + half * XGK[20 - j], half * WGK[20 - j])
        }
    })
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    piece: usize,
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    magnitude: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, piece: usize, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut abs_sum = kronrod.abs();
    let mut fv = [(0.0, 0.0); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = (f1, f2);
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv[j].0 - mean).abs() + (fv[j].1 - mean).abs());
    }
    let h = half.abs();
    let res_abs = abs_sum * h;
    let res_asc = asc * h;
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Panel {
        piece,
        a,
        b,
        value: kronrod * half,
        error: err,
        magnitude: res_abs,
    }
}

/// Globally adaptive integration of `f(piece, t)` over a set of initial
/// panels `(piece, a, b)`. Returns the estimate and the final panel set.
fn adaptive<F>(f: F, initial: &[(usize, f64, f64)], spec: &QuadratureSpec) -> Result<(Estimate, Vec<Panel>)>
where
    F: Fn(usize, f64) -> f64,
{
    let mut heap = BinaryHeap::with_capacity(initial.len() + spec.max_subdivisions);
    let mut evaluations = 0;
    for &(piece, a, b) in initial {
        if b > a {
            heap.push(gauss_kronrod(&|t| f(piece, t), piece, a, b));
            evaluations += 21;
        }
    }
    let totals = |heap: &BinaryHeap<Panel>| {
        heap.iter().fold((0.0, 0.0, 0.0), |(v, e, m), p| {
            (v + p.value, e + p.error, m + p.magnitude)
        })
    };
    let mut subdivisions = 0;
    let (mut value, mut error, mut magnitude) = totals(&heap);
    loop {
        let tolerance = spec.abs_floor.max(spec.rel_tol * magnitude);
        if error <= tolerance || heap.is_empty() {
            break;
        }
        let worst = *heap.peek().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        let splittable = mid > worst.a && mid < worst.b;
        if subdivisions >= spec.max_subdivisions || !splittable {
            return Err(Error::NotConverged {
                value,
                abs_error: error,
                tolerance,
                subdivisions,
            });
        }
        heap.pop();
        let left = gauss_kronrod(&|t| f(worst.piece, t), worst.piece, worst.a, mid);
        let right = gauss_kronrod(&|t| f(worst.piece, t), worst.piece, mid, worst.b);
        evaluations += 42;
        subdivisions += 1;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        magnitude += left.magnitude + right.magnitude - worst.magnitude;
        heap.push(left);
        heap.push(right);
        if subdivisions % 64 == 0 {
            // Refresh running sums against accumulated cancellation.
            (value, error, magnitude) = totals(&heap);
        }
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| (p.piece, p.a).partial_cmp(&(q.piece, q.a)).unwrap_or(Ordering::Equal));
    // Sum in a fixed order so results do not depend on heap layout.
    let (value, error, magnitude) = panels.iter().fold((0.0, 0.0, 0.0), |(v, e, m), p| {
        (v + p.value, e + p.error, m + p.magnitude)
    });
    Ok((
        Estimate {
            value,
            abs_error: error,
            magnitude,
            evaluations,
            subdivisions,
        },
        panels,
    ))
}

/// Splits `[lo, hi]` at `breaks` and into panels no wider than `max_width`.
fn panelize(lo: f64, hi: f64, breaks: &[f64], max_width: f64, piece: usize, out: &mut Vec<(usize, f64, f64)>) {
    let mut marks = vec![lo];
    marks.extend(breaks.iter().copied().filter(|b| *b > lo && *b < hi));
    marks.push(hi);
    marks.sort_by(f64::total_cmp);
    marks.dedup();
    for w in marks.windows(2) {
        let m = ((w[1] - w[0]) / max_width).ceil().max(1.0) as usize;
        for j in 0..m {
            let a = w[0] + (w[1] - w[0]) * j as f64 / m as f64;
            let b = if j + 1 == m {
                w[1]
            } else {
                w[0] + (w[1] - w[0]) * (j + 1) as f64 / m as f64
            };
            out.push((piece, a, b));
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Piece {
    Plain,
    /// `x′ = edge − ln(1/u) / κ`, `u ∈ [eps, 1]`.
    LeftTail { edge: f64, kappa: f64 },
    /// `x′ = edge + ln(1/u) / κ`.
    RightTail { edge: f64, kappa: f64 },
}

const TAIL_DECADES_PER_PANEL: f64 = 1.0;

/// Integration domain over source positions of a stack at one frequency.
#[derive(Debug, Clone)]
pub struct SourceDomain {
    pieces: Vec<Piece>,
    panels: Vec<(usize, f64, f64)>,
    tail_pieces: Vec<usize>,
}

impl SourceDomain {
    /// Builds the domain of lossy regions of `stack` (half-spaces with the
    /// default loss regularization), split at `breaks`.
    pub fn new(stack: &LayerStack, omega: f64, breaks: &[f64], spec: &QuadratureSpec) -> Result<Self> {
        Self::with_regularization(stack, omega, breaks, spec, DEFAULT_LOSS_REGULARIZATION)
    }

    pub fn with_regularization(
        stack: &LayerStack,
        omega: f64,
        breaks: &[f64],
        spec: &QuadratureSpec,
        loss_floor: f64,
    ) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::NonPositiveFrequency(omega));
        }
        spec.validate()?;
        let c = stack.constants().c;
        let lambda = 2.0 * std::f64::consts::PI * c / omega;
        let mut pieces = vec![Piece::Plain];
        let mut panels = Vec::new();
        let mut tail_pieces = Vec::new();
        let last = stack.region_count() - 1;
        let u_lo = spec.tail_truncation_eps;
        let mut push_tail = |pieces: &mut Vec<Piece>, panels: &mut Vec<(usize, f64, f64)>, piece: Piece| {
            let id = pieces.len();
            pieces.push(piece);
            tail_pieces.push(id);
            let decades = (1.0 / u_lo).log10();
            let m = (decades / TAIL_DECADES_PER_PANEL).ceil().max(1.0) as usize;
            for j in 0..m {
                let a = u_lo * 10f64.powf(decades * j as f64 / m as f64);
                let b = if j + 1 == m {
                    1.0
                } else {
                    u_lo * 10f64.powf(decades * (j + 1) as f64 / m as f64)
                };
                panels.push((id, a, b));
            }
        };
        for region in 0..=last {
            let mut n = stack.region_material(region).index(omega);
            if stack.is_half_space(region) && n.im < loss_floor {
                n.im = loss_floor;
            }
            if (n * n).im <= 0.0 {
                continue;
            }
            let width = lambda / (4.0 * n.re);
            let kappa = 2.0 * omega * n.im / c;
            let (lo, hi) = stack.region_bounds(region);
            if region == 0 {
                let inner: Vec<f64> = breaks.iter().copied().filter(|b| *b < hi).collect();
                let edge = inner.iter().copied().fold(hi, f64::min);
                panelize(edge, hi, &inner, width, 0, &mut panels);
                push_tail(&mut pieces, &mut panels, Piece::LeftTail { edge, kappa });
            } else if region == last {
                let inner: Vec<f64> = breaks.iter().copied().filter(|b| *b > lo).collect();
                let edge = inner.iter().copied().fold(lo, f64::max);
                panelize(lo, edge, &inner, width, 0, &mut panels);
                push_tail(&mut pieces, &mut panels, Piece::RightTail { edge, kappa });
            } else {
                panelize(lo, hi, breaks, width, 0, &mut panels);
            }
        }
        Ok(Self {
            pieces,
            panels,
            tail_pieces,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    /// Integrates `kernel` over the domain.
    pub fn integrate<F: Fn(f64) -> f64>(&self, kernel: F, spec: &QuadratureSpec) -> Result<Estimate> {
        self.integrate_panels(kernel, &self.panels, spec)
    }

    /// Integrates `kernel` over the part of the domain inside `[lo, hi]`.
    /// Both ends must be breakpoints, interfaces or infinite.
    pub fn integrate_between<F: Fn(f64) -> f64>(&self, kernel: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<Estimate> {
        let panels: Vec<_> = self
            .panels
            .iter()
            .copied()
            .filter(|&(piece, a, b)| match self.pieces[piece] {
                Piece::Plain => a >= lo && b <= hi,
                Piece::LeftTail { edge, .. } => lo == f64::NEG_INFINITY && edge <= hi,
                Piece::RightTail { edge, .. } => hi == f64::INFINITY && edge >= lo,
            })
            .collect();
        self.integrate_panels(kernel, &panels, spec)
    }

    fn integrate_panels<F: Fn(f64) -> f64>(&self, kernel: F, initial: &[(usize, f64, f64)], spec: &QuadratureSpec) -> Result<Estimate> {
        if initial.is_empty() {
            return Ok(Estimate {
                value: 0.0,
                abs_error: 0.0,
                magnitude: 0.0,
                evaluations: 0,
                subdivisions: 0,
            });
        }
        let pieces = &self.pieces;
        let f = |piece: usize, t: f64| -> f64 {
            match pieces[piece] {
                Piece::Plain => kernel(t),
                Piece::LeftTail { edge, kappa } => kernel(edge + t.ln() / kappa) / (kappa * t),
                Piece::RightTail { edge, kappa } => kernel(edge - t.ln() / kappa) / (kappa * t),
            }
        };
        let (mut est, panels) = adaptive(f, initial, spec)?;
        // Mass beyond the truncation point, assuming the tail keeps decaying
        // at its attenuation rate: eps times the tail's integral.
        let tail_mass: f64 = panels
            .iter()
            .filter(|p| self.tail_pieces.contains(&p.piece))
            .map(|p| p.magnitude)
            .sum();
        est.abs_error += spec.tail_truncation_eps * tail_mass;
        Ok(est)
    }
}

/// `∫_{−∞}^{∞} kernel(x′) dx′` over the lossy regions of `stack`.
///
/// `kernel` must vanish where `Im[n²] = 0` and decay at least like
/// `e^{−2ω Im(n) |x′| / c}` into the half-spaces.
pub fn integrate_sources<F: Fn(f64) -> f64>(
    stack: &LayerStack,
    omega: f64,
    kernel: F,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    integrate_sources_with_breaks(stack, omega, kernel, &[], spec)
}

/// As [`integrate_sources`], also splitting at `breaks` (kinks of the
/// kernel such as the observation point).
pub fn integrate_sources_with_breaks<F: Fn(f64) -> f64>(
    stack: &LayerStack,
    omega: f64,
    kernel: F,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    SourceDomain::new(stack, omega, breaks, spec)?.integrate(kernel, spec)
}

/// Number of equal panels a frequency interval starts from.
pub const SPECTRUM_INITIAL_PANELS: usize = 16;

/// A frozen composite rule: the nodes and weights of a converged adaptive
/// panel set, reusable for integrands with the same features.
#[derive(Debug, Clone, PartialEq)]
pub struct FrozenRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl FrozenRule {
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }

    /// Applies the rule to integrand values already sampled at `nodes`.
    pub fn apply_values(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn spectrum_panels(omega_lo: f64, omega_hi: f64) -> Result<Vec<(usize, f64, f64)>> {
    if !(omega_lo > 0.0) {
        return Err(Error::NonPositiveFrequency(omega_lo));
    }
    if !(omega_hi > omega_lo) {
        return Err(Error::invalid("omega_hi", "must exceed omega_lo"));
    }
    let mut panels = Vec::new();
    panelize(
        omega_lo,
        omega_hi,
        &[],
        (omega_hi - omega_lo) / SPECTRUM_INITIAL_PANELS as f64,
        0,
        &mut panels,
    );
    Ok(panels)
}

/// `∫_{ω_lo}^{ω_hi} f(ω) dω`.
pub fn integrate_spectrum<F: Fn(f64) -> f64>(
    f: F,
    omega_lo: f64,
    omega_hi: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    spec.validate()?;
    let panels = spectrum_panels(omega_lo, omega_hi)?;
    adaptive(|_, w| f(w), &panels, spec).map(|(est, _)| est)
}

/// Adapts to `f` like [`integrate_spectrum`] and returns the converged
/// panel set as a [`FrozenRule`].
pub fn spectrum_rule<F: Fn(f64) -> f64>(
    f: F,
    omega_lo: f64,
    omega_hi: f64,
    spec: &QuadratureSpec,
) -> Result<(Estimate, FrozenRule)> {
    spec.validate()?;
    let panels = spectrum_panels(omega_lo, omega_hi)?;
    let (est, panels) = adaptive(|_, w| f(w), &panels, spec)?;
    let mut nodes = Vec::with_capacity(21 * panels.len());
    let mut weights = Vec::with_capacity(21 * panels.len());
    for p in &panels {
        for (x, w) in kronrod_nodes(p.a, p.b) {
            nodes.push(x);
            weights.push(w);
        }
    }
    Ok((est, FrozenRule { nodes, weights }))
}
