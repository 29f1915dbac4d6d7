//! Self-check suite: the single-excitation reduction, closed forms and channel
//! formulas against their independent counterparts.

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::channel::{
    averaged_fidelity, bloch_average_oracle, kraus_apply, receiver_state, shared_pair_state,
    wootters_concurrence, QubitState,
};
use crate::closed_form::{
    line_amplitude, line_bessel_entanglement, ring_amplitude, BesselSeriesParams, LineSpec, RingSpec,
};
use crate::graph::SpinGraph;
use crate::oracle::{
    entangled_pair_transmission, evolve_and_trace_with, sector_mixing, single_flip_block, FullStateVector,
    FullSystem,
};
use crate::sector::{
    build_sector_hamiltonian, diagonalize, transition_amplitude, transition_amplitude_expm,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Largest graph handed to the brute-force oracle.
    pub max_n: usize,
    /// Conjugates the reduced amplitude before use; the suite must then fail.
    pub inject_fault: bool,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { max_n: 8, inject_fault: false, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Worst deviation seen, or the error message.
    pub detail: String,
}

type Check = fn(&VerifyOptions, &mut ChaCha8Rng) -> Result<f64, String>;

fn within(worst: f64, tol: f64) -> Result<f64, String> {
    if worst <= tol {
        Ok(worst)
    } else {
        Err(format!("deviation {worst:.3e} exceeds {tol:.0e}"))
    }
}

fn graphs(max_n: usize) -> Vec<SpinGraph> {
    let mut out = Vec::new();
    for n in 2..=max_n.min(8) {
        out.push(SpinGraph::line(n, 1.0, 0.1).expect("line"));
        if n >= 3 {
            out.push(SpinGraph::ring(n, 1.0, 0.0).expect("ring"));
        }
    }
    if max_n >= 6 {
        out.push(SpinGraph::benzene());
    }
    out
}

fn max_entry(m: Matrix2<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn sector_block(opts: &VerifyOptions, _: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for g in graphs(opts.max_n) {
        let full = crate::oracle::full_hamiltonian(&g).map_err(|e| e.to_string())?;
        worst = worst.max(sector_mixing(&full));
        let block = single_flip_block(&full, g.n_sites());
        worst = worst.max((block - build_sector_hamiltonian(&g).matrix()).amax());
    }
    within(worst, 1e-12)
}

fn receiver_states(opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for g in graphs(opts.max_n) {
        let system = FullSystem::new(&g).map_err(|e| e.to_string())?;
        let spec = diagonalize(&build_sector_hamiltonian(&g));
        for _ in 0..5 {
            let n = g.n_sites();
            let (s, r) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
            let input = QubitState::new(rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI));
            let t = rng.gen_range(0.0..20.0);
            let brute = evolve_and_trace_with(&system, &g, input, s, r, t).map_err(|e| e.to_string())?;
            let mut f = transition_amplitude(&spec, s, r, t).map_err(|e| e.to_string())?.value;
            if opts.inject_fault {
                f = f.conj();
            }
            let reduced = receiver_state(input, f).map_err(|e| e.to_string())?;
            worst = worst.max(max_entry(brute.rho - reduced.rho));
        }
    }
    within(worst, 1e-10)
}

fn kraus_consistency(_: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let input = QubitState::new(rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI));
        let f_abs: f64 = rng.gen_range(0.0..1.0);
        let a = kraus_apply(&input.density(), f_abs).map_err(|e| e.to_string())?;
        let b = receiver_state(input, Complex64::new(f_abs, 0.0)).map_err(|e| e.to_string())?.rho;
        worst = worst.max(max_entry(a - b)).max((a.trace().re - 1.0).abs());
    }
    within(worst, 1e-13)
}

fn concurrence(opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let f_abs: f64 = rng.gen_range(0.0..1.0);
        let rho = shared_pair_state(f_abs).map_err(|e| e.to_string())?;
        worst = worst.max((wootters_concurrence(&rho) - f_abs).abs());
    }
    let n = opts.max_n.clamp(2, 6);
    let g = SpinGraph::line(n, 1.0, 0.0).map_err(|e| e.to_string())?;
    let spec = diagonalize(&build_sector_hamiltonian(&g));
    for &t in &[0.7, 3.1, 9.0] {
        let rho = entangled_pair_transmission(&g, 1, n, t).map_err(|e| e.to_string())?;
        let f = transition_amplitude(&spec, 1, n, t).map_err(|e| e.to_string())?.abs();
        worst = worst.max((wootters_concurrence(&rho) - f).abs());
    }
    within(worst, 1e-10)
}

fn transforms(_: &VerifyOptions, _: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for n in [2usize, 5, 12, 33, 64] {
        let line = LineSpec::new(n, 1.0, 0.2);
        let spec = diagonalize(&build_sector_hamiltonian(&line.graph().map_err(|e| e.to_string())?));
        for &t in &[0.5, 7.0, 60.0] {
            let a = line_amplitude(&line, t).map_err(|e| e.to_string())?.value;
            let b = transition_amplitude(&spec, 1, n, t).map_err(|e| e.to_string())?.value;
            worst = worst.max((a - b).norm());
        }
    }
    for ring in [RingSpec::uniform(2, 1.0, 0.0), RingSpec::uniform(9, 1.0, 0.3), RingSpec::benzene()] {
        let spec = diagonalize(&build_sector_hamiltonian(&ring.graph().map_err(|e| e.to_string())?));
        for &t in &[0.5, 7.0, 60.0] {
            let a = ring_amplitude(&ring, t).map_err(|e| e.to_string())?.value;
            let b = transition_amplitude(&spec, ring.s, ring.r, t).map_err(|e| e.to_string())?.value;
            worst = worst.max((a - b).norm());
        }
    }
    for n in [10usize, 50] {
        for &beta in &[0.5 * n as f64, n as f64, n as f64 + 2.0 * (n as f64).cbrt()] {
            let series = line_bessel_entanglement(&BesselSeriesParams::new(n, beta)).map_err(|e| e.to_string())?;
            let exact = line_amplitude(&LineSpec::new(n, 1.0, 0.0), beta / 2.0).map_err(|e| e.to_string())?.abs();
            worst = worst.max((series - exact).abs());
        }
    }
    within(worst, 1e-10)
}

fn expm_path(opts: &VerifyOptions, _: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for g in graphs(opts.max_n) {
        let h = build_sector_hamiltonian(&g);
        let spec = diagonalize(&h);
        let n = g.n_sites();
        for &t in &[0.3, 5.0] {
            let a = transition_amplitude(&spec, 1, n, t).map_err(|e| e.to_string())?.value;
            let b = transition_amplitude_expm(&h, 1, n, t).map_err(|e| e.to_string())?.value;
            worst = worst.max((a - b).norm());
        }
    }
    within(worst, 1e-10)
}

fn bloch_average(_: &VerifyOptions, rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let f = Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(-PI..PI));
        let quad = bloch_average_oracle(f).map_err(|e| e.to_string())?;
        let formula = averaged_fidelity(f.norm(), f.arg()).map_err(|e| e.to_string())?;
        worst = worst.max((quad - formula).abs());
    }
    within(worst, 1e-6)
}

fn leakage(opts: &VerifyOptions, _: &mut ChaCha8Rng) -> Result<f64, String> {
    let n = opts.max_n.clamp(2, 8);
    let g = SpinGraph::line(n, 1.0, 0.1).map_err(|e| e.to_string())?;
    let system = FullSystem::new(&g).map_err(|e| e.to_string())?;
    let start = FullStateVector::basis(n, 1);
    let e0 = system.energy(&start);
    let mut worst: f64 = 0.0;
    for &t in &[1.0, 10.0, 100.0] {
        let psi = system.evolve(&start, t);
        worst = worst.max(psi.weight_outside_single_flip()).max((system.energy(&psi) - e0).abs() * 1e-2);
    }
    within(worst, 1e-12)
}

fn field_covariance(_: &VerifyOptions, _: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for n in [3usize, 8, 21] {
        for &t in &[0.9, 13.0, 250.0] {
            let a = line_amplitude(&LineSpec::new(n, 1.0, 0.0), t).map_err(|e| e.to_string())?;
            let b = line_amplitude(&LineSpec::new(n, 1.0, 0.37), t).map_err(|e| e.to_string())?;
            let phase = Complex64::from_polar(1.0, -2.0 * 0.37 * t);
            worst = worst.max((a.abs() - b.abs()).abs()).max((a.value * phase - b.value).norm() * 1e-2);
        }
    }
    within(worst, 1e-12)
}

const CHECKS: &[(&str, Check)] = &[
    ("sector-block", sector_block),
    ("receiver-state", receiver_states),
    ("kraus-consistency", kraus_consistency),
    ("concurrence", concurrence),
    ("transform-identities", transforms),
    ("expm-path", expm_path),
    ("bloch-average", bloch_average),
    ("sector-leakage", leakage),
    ("field-covariance", field_covariance),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|(name, _)| *name).collect()
}

/// Runs every check in a fixed order with a seeded generator.
pub fn run_suite(opts: &VerifyOptions) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    CHECKS
        .iter()
        .map(|(name, check)| match check(opts, &mut rng) {
            Ok(worst) => CheckOutcome { name, passed: true, detail: format!("max deviation {worst:.3e}") },
            Err(msg) => CheckOutcome { name, passed: false, detail: msg },
        })
        .collect()
}
