//! Brute-force reference: the full `2^N`-dimensional Hamiltonian, exact
//! evolution and partial traces, used to check the single-excitation
//! reduction and the channel formulas on small graphs.
//!
//! Site `j` maps to bit `j - 1` of the basis index; a set bit means the spin
//! is in `|1⟩`. `σ_z` is `+1` on `|0⟩` and `-1` on `|1⟩`.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::channel::{QubitState, ReceiverOutput};
use crate::error::{Error, Result};
use crate::graph::SpinGraph;

pub const MAX_SITES: usize = 12;

fn guard(graph: &SpinGraph) -> Result<usize> {
    let n = graph.n_sites();
    if n > MAX_SITES {
        return Err(Error::TooLarge { n_sites: n, limit: MAX_SITES });
    }
    Ok(n)
}

fn bit(site: usize) -> usize {
    1 << (site - 1)
}

fn z(state: usize, site: usize) -> f64 {
    if state & bit(site) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `H = -Σ J_ij σ^i·σ^j - Σ B_i σ_z^i` on the full Hilbert space. Real
/// symmetric in the computational basis.
pub fn full_hamiltonian(graph: &SpinGraph) -> Result<DMatrix<f64>> {
    let n = guard(graph)?;
    let dim = 1usize << n;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for x in 0..dim {
        let mut diag = 0.0;
        for (k, &b) in graph.fields().iter().enumerate() {
            diag -= b * z(x, k + 1);
        }
        for c in graph.couplings() {
            diag -= c.strength * z(x, c.i) * z(x, c.j);
            // σxσx + σyσy swaps antiparallel neighbours with amplitude 2
            if z(x, c.i) != z(x, c.j) {
                let y = x ^ bit(c.i) ^ bit(c.j);
                h[(y, x)] -= 2.0 * c.strength;
            }
        }
        h[(x, x)] = diag;
    }
    Ok(h)
}

/// Largest matrix element connecting different total-`σ_z` sectors; zero
/// exactly when `[H, Σσ_z] = 0`.
pub fn sector_mixing(h: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for y in 0..h.nrows() {
        for x in 0..h.ncols() {
            if (x as u32).count_ones() != (y as u32).count_ones() {
                worst = worst.max(h[(y, x)].abs());
            }
        }
    }
    worst
}

/// Single-flip block of the full Hamiltonian with the all-`|0⟩` energy
/// subtracted from its diagonal.
pub fn single_flip_block(h: &DMatrix<f64>, n_sites: usize) -> DMatrix<f64> {
    let e0 = h[(0, 0)];
    DMatrix::from_fn(n_sites, n_sites, |a, b| {
        let v = h[(bit(a + 1), bit(b + 1))];
        if a == b {
            v - e0
        } else {
            v
        }
    })
}

/// Complex amplitudes over all `2^N` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct FullStateVector {
    pub n_sites: usize,
    pub amplitudes: DVector<Complex64>,
}

impl FullStateVector {
    pub fn basis(n_sites: usize, index: usize) -> Self {
        let mut amplitudes = DVector::zeros(1 << n_sites);
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { n_sites, amplitudes }
    }

    /// `cos(θ/2)|0…0⟩ + e^{iφ} sin(θ/2)|s⟩`.
    pub fn with_input_at(n_sites: usize, input: QubitState, s: usize) -> Self {
        let v = input.amplitudes();
        let mut amplitudes = DVector::zeros(1 << n_sites);
        amplitudes[0] = v[0];
        amplitudes[bit(s)] = v[1];
        Self { n_sites, amplitudes }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Probability outside the single-excitation sector.
    pub fn weight_outside_single_flip(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(x, _)| x.count_ones() != 1)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Reduced density matrix of one site, basis `|0⟩, |1⟩`.
    pub fn reduced_site(&self, site: usize) -> Matrix2<Complex64> {
        let mask = bit(site);
        let mut rho = Matrix2::zeros();
        for x in 0..self.amplitudes.len() {
            if x & mask != 0 {
                continue;
            }
            let a0 = self.amplitudes[x];
            let a1 = self.amplitudes[x | mask];
            rho[(0, 0)] += a0 * a0.conj();
            rho[(0, 1)] += a0 * a1.conj();
            rho[(1, 0)] += a1 * a0.conj();
            rho[(1, 1)] += a1 * a1.conj();
        }
        rho
    }
}

/// Full Hamiltonian with its eigen-decomposition, ready to evolve states.
#[derive(Debug, Clone)]
pub struct FullSystem {
    pub n_sites: usize,
    pub hamiltonian: DMatrix<f64>,
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl FullSystem {
    pub fn new(graph: &SpinGraph) -> Result<Self> {
        let hamiltonian = full_hamiltonian(graph)?;
        let eig = SymmetricEigen::new(hamiltonian.clone());
        Ok(Self {
            n_sites: graph.n_sites(),
            hamiltonian,
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn evolve(&self, state: &FullStateVector, t: f64) -> FullStateVector {
        let v = self.vectors.map(|x| Complex64::new(x, 0.0));
        let mut coeffs = v.transpose() * &state.amplitudes;
        for (c, &e) in coeffs.iter_mut().zip(self.energies.iter()) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        FullStateVector { n_sites: state.n_sites, amplitudes: v * coeffs }
    }

    pub fn energy(&self, state: &FullStateVector) -> f64 {
        let h = self.hamiltonian.map(|x| Complex64::new(x, 0.0));
        (state.amplitudes.adjoint() * h * &state.amplitudes)[(0, 0)].re
    }
}

fn check_sites(graph: &SpinGraph, sites: &[usize]) -> Result<()> {
    sites.iter().try_for_each(|&s| graph.check_site(s))
}

/// Receiver state at site `r` after placing `input` on site `s` and evolving
/// the whole graph for time `t`.
pub fn evolve_and_trace(graph: &SpinGraph, input: QubitState, s: usize, r: usize, t: f64) -> Result<ReceiverOutput> {
    let system = FullSystem::new(graph)?;
    evolve_and_trace_with(&system, graph, input, s, r, t)
}

/// As [`evolve_and_trace`], reusing an already diagonalised system.
pub fn evolve_and_trace_with(
    system: &FullSystem,
    graph: &SpinGraph,
    input: QubitState,
    s: usize,
    r: usize,
    t: f64,
) -> Result<ReceiverOutput> {
    check_sites(graph, &[s, r])?;
    crate::sector::check_time(t)?;
    let psi0 = FullStateVector::with_input_at(graph.n_sites(), input, s);
    let rho = system.evolve(&psi0, t).reduced_site(r);
    let cos_half = (input.theta / 2.0).cos();
    let p = cos_half * cos_half + rho[(1, 1)].re;
    let psi_out = (cos_half.abs() > 1e-12 && p > 1e-15).then(|| {
        let u = nalgebra::Vector2::new(Complex64::new(cos_half, 0.0), rho[(1, 0)] / cos_half);
        u / Complex64::new(p.sqrt(), 0.0)
    });
    Ok(ReceiverOutput { rho, p, psi_out })
}

/// Two-qubit state of (untouched partner, receiver `r`) after the sender half
/// of `(|01⟩ + |10⟩)/√2` is placed on site `s` and the graph evolves for `t`.
/// Basis order `|00⟩, |01⟩, |10⟩, |11⟩`, partner first.
pub fn entangled_pair_transmission(graph: &SpinGraph, s: usize, r: usize, t: f64) -> Result<Matrix4<Complex64>> {
    let system = FullSystem::new(graph)?;
    check_sites(graph, &[s, r])?;
    crate::sector::check_time(t)?;
    let n = graph.n_sites();
    // partner |0⟩ pairs with an excitation on s, partner |1⟩ with the vacuum
    let branch = [
        system.evolve(&FullStateVector::basis(n, bit(s)), t),
        system.evolve(&FullStateVector::basis(n, 0), t),
    ];
    let mask = bit(r);
    let mut rho = Matrix4::<Complex64>::zeros();
    for x in 0..(1usize << n) {
        if x & mask != 0 {
            continue;
        }
        let mut amp = [Complex64::new(0.0, 0.0); 4];
        for a in 0..2 {
            amp[2 * a] = branch[a].amplitudes[x];
            amp[2 * a + 1] = branch[a].amplitudes[x | mask];
        }
        for i in 0..4 {
            for j in 0..4 {
                rho[(i, j)] += amp[i] * amp[j].conj() * 0.5;
            }
        }
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{receiver_state, wootters_concurrence};
    use crate::sector::{build_sector_hamiltonian, diagonalize, transition_amplitude};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn two_site_spectrum() {
        let h = full_hamiltonian(&SpinGraph::line(2, 1.0, 0.0).unwrap()).unwrap();
        let mut e: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        // J_12 = 1/2: triplet at -1/2, singlet at 3/2
        for (got, want) in e.iter().zip([-0.5, -0.5, -0.5, 1.5]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        let block = single_flip_block(&h, 2);
        assert_eq!(block, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn single_spin_zeeman_gap() {
        let mut g = SpinGraph::new(1).unwrap();
        g.set_field(1, 0.4).unwrap();
        let h = full_hamiltonian(&g).unwrap();
        assert_abs_diff_eq!(h[(1, 1)] - h[(0, 0)], 0.8, epsilon = 1e-15);
    }

    #[test]
    fn ring_and_line_differ_by_closing_bond() {
        let line = full_hamiltonian(&SpinGraph::line(3, 1.0, 0.0).unwrap()).unwrap();
        let ring = full_hamiltonian(&SpinGraph::ring(3, 1.0, 0.0).unwrap()).unwrap();
        let mut closing = SpinGraph::new(3).unwrap();
        closing.add_coupling(1, 3, 0.5).unwrap();
        let bond = full_hamiltonian(&closing).unwrap();
        assert!((ring - line - bond).amax() < 1e-15);
    }

    #[test]
    fn commutes_with_total_sz() {
        let h = full_hamiltonian(&SpinGraph::benzene()).unwrap();
        assert_eq!(sector_mixing(&h), 0.0);
        assert!((&h - h.transpose()).amax() < 1e-15);
    }

    #[test]
    fn block_matches_sector_matrix() {
        let mut g = SpinGraph::benzene();
        g.set_field(2, 0.3).unwrap();
        let h = full_hamiltonian(&g).unwrap();
        let block = single_flip_block(&h, 6);
        let sector = build_sector_hamiltonian(&g);
        assert!((block - sector.matrix()).amax() < 1e-12);
    }

    #[test]
    fn perfect_swap_on_two_sites() {
        let g = SpinGraph::line(2, 1.0, 0.0).unwrap();
        let out = evolve_and_trace(&g, QubitState::new(PI, 0.0), 1, 2, PI / 2.0).unwrap();
        assert_abs_diff_eq!(out.rho[(1, 1)].re, 1.0, epsilon = 1e-10);
        assert!(out.rho[(0, 0)].norm() < 1e-10);
    }

    #[test]
    fn identity_at_time_zero() {
        let g = SpinGraph::line(3, 1.0, 0.2).unwrap();
        let input = QubitState::new(1.2, 0.4);
        let out = evolve_and_trace(&g, input, 2, 2, 0.0).unwrap();
        assert!((out.rho - input.density()).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn matches_sector_reduction() {
        let g = SpinGraph::line(5, 1.0, 0.15).unwrap();
        let system = FullSystem::new(&g).unwrap();
        let spec = diagonalize(&build_sector_hamiltonian(&g));
        for (theta, phi, t, s, r) in [(0.3, 1.0, 2.0, 1, 5), (2.9, 4.0, 7.5, 2, 4), (1.6, 0.0, 0.0, 3, 3)] {
            let input = QubitState::new(theta, phi);
            let brute = evolve_and_trace_with(&system, &g, input, s, r, t).unwrap();
            let f = transition_amplitude(&spec, s, r, t).unwrap().value;
            let reduced = receiver_state(input, f).unwrap();
            assert!((brute.rho - reduced.rho).iter().all(|z| z.norm() < 1e-10));
            assert_abs_diff_eq!(brute.p, reduced.p, epsilon = 1e-10);
        }
    }

    #[test]
    fn shared_pair_at_perfect_point() {
        let g = SpinGraph::line(2, 1.0, 0.0).unwrap();
        let rho = entangled_pair_transmission(&g, 1, 2, PI / 2.0).unwrap();
        assert_abs_diff_eq!(wootters_concurrence(&rho), 1.0, epsilon = 1e-10);
        let rho0 = entangled_pair_transmission(&g, 1, 2, 0.0).unwrap();
        assert!(wootters_concurrence(&rho0) < 1e-10);
    }

    #[test]
    fn leakage_energy_and_ground() {
        let g = SpinGraph::line(6, 1.0, 0.1).unwrap();
        let system = FullSystem::new(&g).unwrap();
        let start = FullStateVector::basis(6, bit(2));
        let e0 = system.energy(&start);
        for &t in &[0.5, 3.0, 40.0] {
            let psi = system.evolve(&start, t);
            assert!(psi.weight_outside_single_flip() < 1e-12);
            assert_abs_diff_eq!(psi.norm(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(system.energy(&psi), e0, epsilon = 1e-10);
            let ground = system.evolve(&FullStateVector::basis(6, 0), t);
            assert_abs_diff_eq!(ground.amplitudes[0].norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn size_guard() {
        let g = SpinGraph::line(MAX_SITES + 1, 1.0, 0.0).unwrap();
        assert!(matches!(full_hamiltonian(&g), Err(Error::TooLarge { .. })));
    }
}
