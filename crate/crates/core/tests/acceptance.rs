//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qfed1d_core::constants::{omega_from_ev, C};
use qfed1d_core::greens::oracle::green_oracle;
use qfed1d_core::materials::linspace;
use qfed1d_core::observables::{
    bose_einstein, field_map, interior_peak_count, peak_locations, resonance_energies, Observable, SpectralEvaluator,
};
use qfed1d_core::selfconsistent::{solve_cavity_temperatures, spectral_balance, Balance, SolverSpec};
use qfed1d_core::{presets, HalfSpace, Layer, LayerStack, LayeredGreen, Material, QuadratureSpec, SpectralGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Report {
    failures: usize,
}

impl Report {
    fn record(&mut self, name: &str, pass: bool, detail: String, elapsed: Duration) {
        if !pass {
            self.failures += 1;
        }
        println!(
            "{} {name}: {detail} [{:.1} s]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn equilibrium_suite(report: &mut Report) {
    let ((pass, detail), elapsed) = timed(|| {
        let hot = presets::vacuum_cavity();
        let eq = hot.at_equilibrium(300.0).unwrap();
        let grid = SpectralGrid::linspace((-10e-6, 20e-6), 60, (0.01, 0.25), 40).unwrap();
        let spec = QuadratureSpec::default().with_rel_tol(1e-10);
        let t = field_map(&eq, &grid, Observable::Temperature, &spec).unwrap();
        let s_eq = field_map(&eq, &grid, Observable::Poynting, &spec).unwrap();
        let q_eq = field_map(&eq, &grid, Observable::NetEmission, &spec).unwrap();
        let q_neq = field_map(&hot, &grid, Observable::NetEmission, &spec).unwrap();
        let n_e = grid.energies_ev().len();
        let mut worst_t: f64 = 0.0;
        let mut worst_s: f64 = 0.0;
        let mut worst_q: f64 = 0.0;
        for j in 0..n_e {
            let w = grid.omegas()[j];
            let gap = SpectralEvaluator::new(&hot, w, &spec).unwrap().poynting(5e-6).unwrap();
            let eps_s = 1e-6 * gap.abs();
            let eps_q = 1e-6 * max_abs(&q_neq.spatial_profile(j));
            for i in 0..grid.positions().len() {
                worst_t = worst_t.max((t.value(i, j) - 300.0).abs());
                worst_s = worst_s.max(s_eq.value(i, j).abs() / eps_s);
                worst_q = worst_q.max(q_eq.value(i, j).abs() / eps_q);
            }
        }
        (
            worst_t < 0.01 && worst_s < 1.0 && worst_q < 1.0,
            format!(
                "60x40 grid, max |T - 300 K| = {worst_t:.2e} K (< 0.01), max |S|/eps_S = {worst_s:.2e} (< 1), max |Q|/eps_Q = {worst_q:.2e} (< 1)"
            ),
        )
    });
    let pass = pass && elapsed < Duration::from_secs(120);
    report.record("equilibrium suite", pass, detail, elapsed);
}

fn resonances(report: &mut Report, name: &str, stack: &LayerStack, expected: [f64; 3]) {
    let ((pass, detail), elapsed) = timed(|| {
        let found = resonance_energies(stack, (0.0, 10e-6), (0.01, 0.25), 201, 241).unwrap();
        let mut pass = true;
        let mut parts = Vec::new();
        for (k, e) in expected.iter().enumerate() {
            let nearest = found
                .iter()
                .copied()
                .min_by(|a, b| (a - e).abs().total_cmp(&(b - e).abs()))
                .unwrap_or(f64::NAN);
            let count = interior_peak_count(stack, (0.0, 10e-6), nearest, 401).unwrap();
            let ok = (nearest - e).abs() <= 0.002 && count == k + 1;
            pass &= ok;
            parts.push(format!("{e:.3} eV -> {nearest:.4} eV with {count} peak(s)"));
        }
        // The mid-gap LDOS alone, for reference.
        let energies = linspace((0.01, 0.25), 241);
        let mid: Vec<f64> = energies
            .iter()
            .map(|e| LayeredGreen::new(stack, omega_from_ev(*e)).unwrap().eval(5e-6, 5e-6).total.im * omega_from_ev(*e))
            .collect();
        let mid_peaks: Vec<String> = peak_locations(&energies, &mid).iter().map(|e| format!("{e:.4}")).collect();
        (
            pass,
            format!("{}; mid-gap LDOS peaks at [{}] eV", parts.join(", "), mid_peaks.join(", ")),
        )
    });
    report.record(name, pass, detail, elapsed);
}

fn random_stack(rng: &mut ChaCha8Rng) -> LayerStack {
    fn medium(rng: &mut ChaCha8Rng) -> Material {
        Material::constant(Complex64::new(rng.gen_range(1.0..3.0), rng.gen_range(0.05..0.6))).unwrap()
    }
    let left = HalfSpace::new(medium(rng), 300.0);
    let right = HalfSpace::new(medium(rng), 300.0);
    let interior: usize = rng.gen_range(0..=3);
    let layers = (0..interior)
        .map(|_| {
            let mat = medium(rng);
            Layer::new(mat, rng.gen_range(0.5e-6..8e-6), 300.0)
        })
        .collect();
    LayerStack::new(left, layers, right).unwrap()
}

fn oracle_equivalence(report: &mut Report) {
    let ((pass, detail), elapsed) = timed(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
        let samples = 120;
        let results: Vec<f64> = (0..samples)
            .map(|_| {
                let stack = random_stack(&mut rng);
                let end = *stack.interfaces().last().unwrap();
                let omega = omega_from_ev(rng.gen_range(0.02..0.3));
                let x = rng.gen_range(-3e-6..end + 3e-6);
                let xp = rng.gen_range(-3e-6..end + 3e-6);
                let exact = LayeredGreen::new(&stack, omega).unwrap().eval(x, xp).total;
                let fd = green_oracle(&stack, omega, x, xp).unwrap();
                (exact - fd).norm() / exact.norm()
            })
            .collect();
        let worst = results.iter().copied().fold(0.0, f64::max);
        (
            worst < 1e-3,
            format!("{samples} random stacks and samples, max relative error {worst:.2e} (< 1e-3)"),
        )
    });
    let pass = pass && elapsed < Duration::from_secs(300);
    report.record("green's function oracle equivalence", pass, detail, elapsed);
}

fn analytic_ldos(report: &mut Report) {
    let ((pass, detail), elapsed) = timed(|| {
        let vac = LayerStack::homogeneous(Material::VACUUM, 300.0).unwrap();
        let unit = vac.constants().ldos_unit();
        let mut worst_vac: f64 = 0.0;
        for e in [0.01, 0.1, 0.25, 1.0] {
            let w = omega_from_ev(e);
            let rho = SpectralEvaluator::new(&vac, w, &QuadratureSpec::default()).unwrap().ldos(2e-6) / unit;
            worst_vac = worst_vac.max((rho - 0.5).abs() / 0.5);
        }
        let mut worst_n: f64 = 0.0;
        let mut worst_halving: f64 = 0.0;
        for n in [1.3, 2.0, 3.5] {
            let stack = LayerStack::homogeneous(Material::constant(Complex64::new(n, 0.0)).unwrap(), 300.0).unwrap();
            let w = omega_from_ev(0.12);
            let g = LayeredGreen::with_regularization(&stack, w, 1e-9).unwrap().eval(1e-6, 1e-6).total.im;
            let g_half = LayeredGreen::with_regularization(&stack, w, 5e-10).unwrap().eval(1e-6, 1e-6).total.im;
            let rho = 2.0 * w / (PI * C * C) * g / unit;
            let expected = 1.0 / (2.0 * n);
            worst_n = worst_n.max((rho - expected).abs() / expected);
            worst_halving = worst_halving.max((g - g_half).abs() / g.abs());
        }
        (
            worst_vac < 1e-10 && worst_n < 1e-6 && worst_halving < 1e-6,
            format!(
                "vacuum rel. error {worst_vac:.1e} (< 1e-10), real-index rel. error {worst_n:.1e} (< 1e-6), regularization-halving change {worst_halving:.1e}"
            ),
        )
    });
    report.record("analytic LDOS", pass, detail, elapsed);
}

fn energy_conservation(report: &mut Report) {
    let ((pass, detail), elapsed) = timed(|| {
        let stack = presets::vacuum_cavity();
        let w = omega_from_ev(0.118);
        let spec = QuadratureSpec::default().with_rel_tol(1e-11);
        let ev = SpectralEvaluator::new(&stack, w, &spec).unwrap();
        let lambda = 2.0 * PI * C / w;
        let mut worst: f64 = 0.0;
        let media = [(-1.0, 1.5, 0.3, 0.0), (1.0, 2.5, 0.5, 10e-6)];
        for (dir, n_re, n_im, edge) in media {
            let decay = C / (2.0 * w * n_im);
            let h = lambda / n_re / 1000.0;
            for depth in linspace((0.05 * decay, 2.5 * decay), 20) {
                let x = edge + dir * depth;
                let s = |d: f64| ev.poynting(x + d * h).unwrap();
                let ds = (-s(2.0) + 8.0 * s(1.0) - 8.0 * s(-1.0) + s(-2.0)) / (12.0 * h);
                let q = ev.net_emission(x).unwrap();
                worst = worst.max((ds - q).abs() / q.abs());
            }
        }
        (
            worst < 1e-2,
            format!("40 points at 0.118 eV, max |dS/dx - Q|/|Q| = {worst:.2e} (< 1e-2)"),
        )
    });
    report.record("energy conservation", pass, detail, elapsed);
}

fn saturation(report: &mut Report) {
    let ((pass, detail), elapsed) = timed(|| {
        let stack = presets::vacuum_cavity();
        let spec = QuadratureSpec::default().with_rel_tol(1e-10);
        let mut worst_t: f64 = 0.0;
        let mut worst_decay: f64 = 0.0;
        for e in [0.056, 0.118, 0.18] {
            let w = omega_from_ev(e);
            let ev = SpectralEvaluator::new(&stack, w, &spec).unwrap();
            for (dir, n_im, edge, t_res) in [(-1.0, 0.3, 0.0, 400.0), (1.0, 0.5, 10e-6, 300.0)] {
                // Attenuation e^{-2 w Im(n) d / c} = 1e-7 < 1e-6.
                let depth = 7.0 * 10f64.ln() * C / (2.0 * w * n_im);
                let x = edge + dir * depth;
                let x_iface = edge + dir * 1e-9;
                worst_t = worst_t.max((ev.temperature(x).unwrap() - t_res).abs());
                let s = ev.poynting(x).unwrap().abs() / ev.poynting(x_iface).unwrap().abs();
                let q = ev.net_emission(x).unwrap().abs() / ev.net_emission(x_iface).unwrap().abs();
                worst_decay = worst_decay.max(s).max(q);
            }
        }
        (
            worst_t < 1.0 && worst_decay < 1e-4,
            format!("max |T - T_reservoir| = {worst_t:.2e} K (< 1), max S, Q relative to interface = {worst_decay:.2e} (< 1e-4)"),
        )
    });
    report.record("saturation", pass, detail, elapsed);
}

fn gap_poynting(report: &mut Report) {
    let ((pass, detail), elapsed) = timed(|| {
        let stack = presets::vacuum_cavity();
        let spec = QuadratureSpec::default();
        let energies = linspace((0.01, 0.25), 241);
        let positions = linspace((0.25e-6, 9.75e-6), 11);
        let mut spectrum = Vec::new();
        let mut worst_spread: f64 = 0.0;
        let mut all_positive = true;
        for e in &energies {
            let ev = SpectralEvaluator::new(&stack, omega_from_ev(*e), &spec).unwrap();
            let v: Vec<f64> = positions.iter().map(|x| ev.poynting(*x).unwrap()).collect();
            let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = v.iter().copied().fold(f64::INFINITY, f64::min);
            all_positive &= min > 0.0;
            worst_spread = worst_spread.max((max - min) / (0.5 * (max + min)));
            spectrum.push(v[5]);
        }
        let peaks = peak_locations(&energies, &spectrum);
        // Flux per unit occupation difference, i.e. with the Bose factors
        // divided out, for reference.
        let transfer: Vec<f64> = energies
            .iter()
            .zip(&spectrum)
            .map(|(e, s)| {
                let w = omega_from_ev(*e);
                s / (bose_einstein(400.0, w) - bose_einstein(300.0, w))
            })
            .collect();
        let transfer_peaks: Vec<String> = peak_locations(&energies, &transfer)
            .iter()
            .map(|e| format!("{e:.4}"))
            .collect();
        let mut matched = true;
        let mut parts = Vec::new();
        for r in [0.056, 0.118, 0.180] {
            let nearest = peaks
                .iter()
                .copied()
                .min_by(|a, b| (a - r).abs().total_cmp(&(b - r).abs()))
                .unwrap_or(f64::NAN);
            matched &= (nearest - r).abs() <= 0.005;
            parts.push(format!("{r:.3} -> {nearest:.4}"));
        }
        (
            all_positive && worst_spread < spec.rel_tol && matched,
            format!(
                "positive: {all_positive}, max relative spread across gap {worst_spread:.1e} (< {:.0e}), spectral maxima vs resonances (+-0.005) {} eV; maxima of S/(eta_1 - eta_2) at [{}] eV",
                spec.rel_tol,
                parts.join(", "),
                transfer_peaks.join(", ")
            ),
        )
    });
    report.record("gap poynting sign and constancy", pass, detail, elapsed);
}

fn cavity_poynting_spread(stack: &LayerStack, energy: f64) -> f64 {
    let ev = SpectralEvaluator::new(stack, omega_from_ev(energy), &QuadratureSpec::default()).unwrap();
    let v: Vec<f64> = linspace((0.05e-6, 9.95e-6), 41).iter().map(|x| ev.poynting(*x).unwrap()).collect();
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    (max - min) / mean.abs()
}

fn self_consistent(report: &mut Report) {
    let stack = presets::lossy_cavity();
    let spec = SolverSpec::default();
    let (sol, elapsed) = timed(|| solve_cavity_temperatures(&stack, &spec).unwrap());
    let max_res = max_abs(&sol.residuals);
    let t_min = sol.temperatures.iter().copied().fold(f64::INFINITY, f64::min);
    let t_max = sol.temperatures.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    report.record(
        "self-consistent cavity: convergence and residuals",
        sol.converged && max_res < spec.q_tol && elapsed < Duration::from_secs(900),
        format!(
            "{} cells, converged = {} after {} iterations, max |residual| = {max_res:.2e} (< q_tol = {:.0e})",
            sol.temperatures.len(),
            sol.converged,
            sol.iterations,
            spec.q_tol
        ),
        elapsed,
    );
    report.record(
        "self-consistent cavity: temperature bounds",
        t_min > 300.0 && t_max < 400.0,
        format!("cell temperatures span [{t_min:.3}, {t_max:.3}] K, inside (300, 400)"),
        Duration::ZERO,
    );

    let fine_spec = SolverSpec { n_cells: 2 * spec.n_cells, ..spec };
    let (fine, elapsed) = timed(|| solve_cavity_temperatures(&stack, &fine_spec).unwrap());
    // Compare each coarse cell with the mean of the two fine cells inside it.
    let shift = sol
        .temperatures
        .iter()
        .enumerate()
        .map(|(i, t)| (t - 0.5 * (fine.temperatures[2 * i] + fine.temperatures[2 * i + 1])).abs())
        .fold(0.0, f64::max);
    report.record(
        "self-consistent cavity: grid refinement",
        fine.converged && shift < 0.5,
        format!("doubling to {} cells moves temperatures by at most {shift:.3} K (< 0.5)", fine.temperatures.len()),
        elapsed,
    );

    let ((pass, detail), elapsed) = timed(|| {
        let balance_spec = SolverSpec {
            balance: Balance::Spectral,
            ..spec
        };
        let mut pass = true;
        let mut parts = Vec::new();
        for e in [0.052, 0.108, 0.165] {
            let bal = spectral_balance(&stack, omega_from_ev(e), &balance_spec).unwrap();
            let spread = cavity_poynting_spread(&bal.stack, e);
            let bounded = bal.temperatures.iter().all(|t| *t > 300.0 && *t < 400.0);
            pass &= spread < 1e-2 && bounded;
            let integrated = cavity_poynting_spread(&sol.stack, e);
            parts.push(format!("{e:.3} eV: {spread:.1e} (integrated-balance profile: {integrated:.1e})"));
        }
        (pass, format!("spread/mean inside cavity under per-frequency balance (< 1e-2): {}", parts.join("; ")))
    });
    report.record("self-consistent cavity: poynting constancy", pass, detail, elapsed);
}

fn main() {
    let mut report = Report { failures: 0 };
    analytic_ldos(&mut report);
    resonances(&mut report, "resonances, vacuum cavity", &presets::vacuum_cavity(), [0.056, 0.118, 0.180]);
    resonances(&mut report, "resonances, lossy cavity", &presets::lossy_cavity(), [0.052, 0.108, 0.165]);
    oracle_equivalence(&mut report);
    equilibrium_suite(&mut report);
    energy_conservation(&mut report);
    saturation(&mut report);
    gap_poynting(&mut report);
    self_consistent(&mut report);
    if report.failures > 0 {
        println!("{} criterion/criteria failed", report.failures);
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
