//! Single-excitation sector of a spin graph.
//!
//! Total `σ_z` commutes with the Heisenberg Hamiltonian, so a state with one
//! flipped spin only ever moves among the `N` states `|j⟩` (spin `j` flipped,
//! all others in `|0⟩`). Restricted to that block, with the all-`|0⟩` energy
//! subtracted, the Hamiltonian is a real symmetric `N × N` matrix:
//!
//! ```text
//! H[j][j] = 2 B_j + 2 Σ_k J_jk
//! H[j][k] = -2 J_jk              (j, k coupled)
//! ```

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SpinGraph;

/// Dense sector Hamiltonian over the basis `|1⟩ … |N⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationBasisMatrix(DMatrix<f64>);

impl ExcitationBasisMatrix {
    /// Wraps a matrix, checking it is square and symmetric.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Domain("sector matrix must be square and non-empty".into()));
        }
        let scale = m.amax().max(1.0);
        for i in 0..m.nrows() {
            for j in 0..i {
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::Domain(format!("sector matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }
}

pub fn build_sector_hamiltonian(graph: &SpinGraph) -> ExcitationBasisMatrix {
    let n = graph.n_sites();
    let mut h = DMatrix::<f64>::zeros(n, n);
    for (k, &b) in graph.fields().iter().enumerate() {
        h[(k, k)] = 2.0 * b;
    }
    for c in graph.couplings() {
        let (a, b) = (c.i - 1, c.j - 1);
        h[(a, a)] += 2.0 * c.strength;
        h[(b, b)] += 2.0 * c.strength;
        h[(a, b)] -= 2.0 * c.strength;
        h[(b, a)] -= 2.0 * c.strength;
    }
    ExcitationBasisMatrix(h)
}

/// Eigen-decomposition of a sector Hamiltonian.
///
/// Energies ascend; column `m` of `modes` holds `⟨j|m̃⟩` with its first
/// non-negligible component positive.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    energies: Vec<f64>,
    modes: DMatrix<f64>,
}

pub fn diagonalize(h: &ExcitationBasisMatrix) -> SpectralDecomposition {
    let n = h.dim();
    let eig = SymmetricEigen::new(h.0.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut modes = DMatrix::<f64>::zeros(n, n);
    let mut energies = Vec::with_capacity(n);
    for (col, &src) in order.iter().enumerate() {
        energies.push(eig.eigenvalues[src]);
        let v = eig.eigenvectors.column(src);
        let sign = v
            .iter()
            .find(|x| x.abs() > 1e-10)
            .map_or(1.0, |x| x.signum());
        modes.set_column(col, &(v * sign));
    }
    SpectralDecomposition { energies, modes }
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn modes(&self) -> &DMatrix<f64> {
        &self.modes
    }

    /// `modes · diag(energies) · modesᵀ`
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.energies));
        &self.modes * d * self.modes.transpose()
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.dim() {
            return Err(Error::SiteOutOfRange { site, n_sites: self.dim() });
        }
        Ok(())
    }

    /// Mode expansion of `f_{r,s}`: weights `⟨r|m̃⟩⟨m̃|s⟩` paired with `E_m`.
    pub fn kernel(&self, s: usize, r: usize) -> Result<AmplitudeKernel> {
        self.check_site(s)?;
        self.check_site(r)?;
        let weights = (0..self.dim())
            .map(|m| self.modes[(r - 1, m)] * self.modes[(s - 1, m)])
            .collect();
        Ok(AmplitudeKernel::new(weights, self.energies.clone()))
    }
}

/// `f_{r,s}(t) = ⟨r| e^{-iHt} |s⟩`, with `ħ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionAmplitude {
    pub value: Complex64,
    pub t: f64,
    pub s: usize,
    pub r: usize,
}

impl TransitionAmplitude {
    pub fn abs(&self) -> f64 {
        self.value.norm()
    }

    /// `γ = arg f`, in `(-π, π]`.
    pub fn phase(&self) -> f64 {
        self.value.arg()
    }
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidTime { what: "time", value: t });
    }
    Ok(())
}

pub fn transition_amplitude(
    spec: &SpectralDecomposition,
    s: usize,
    r: usize,
    t: f64,
) -> Result<TransitionAmplitude> {
    check_time(t)?;
    let value = spec.kernel(s, r)?.eval(t);
    Ok(TransitionAmplitude { value, t, s, r })
}

/// A transition amplitude written as a finite sum of phases,
/// `f(t) = Σ_m w_m e^{-i E_m t}` with real weights.
///
/// Line, ring and general-graph amplitudes all reduce to this form, which
/// is what the readout-time search evaluates on its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeKernel {
    weights: Vec<f64>,
    energies: Vec<f64>,
}

impl AmplitudeKernel {
    pub fn new(weights: Vec<f64>, energies: Vec<f64>) -> Self {
        assert_eq!(weights.len(), energies.len(), "one weight per energy");
        Self { weights, energies }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let (mut re, mut im) = (0.0, 0.0);
        for (&w, &e) in self.weights.iter().zip(&self.energies) {
            let (sin, cos) = (e * t).sin_cos();
            re += w * cos;
            im -= w * sin;
        }
        Complex64::new(re, im)
    }

    /// Spread of the energies carrying non-zero weight. `|f|` cannot vary
    /// faster than this.
    pub fn bandwidth(&self) -> f64 {
        let active = self
            .weights
            .iter()
            .zip(&self.energies)
            .filter(|(w, _)| w.abs() > 1e-14)
            .map(|(_, &e)| e);
        let (lo, hi) = active.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
            (lo.min(e), hi.max(e))
        });
        if hi >= lo {
            hi - lo
        } else {
            0.0
        }
    }
}

/// `e^{-iHt}` by scaling and squaring of a truncated Taylor series.
///
/// Kept independent of [`diagonalize`] as a cross-check of the spectral path.
pub fn propagator_expm(h: &ExcitationBasisMatrix, t: f64) -> DMatrix<Complex64> {
    let n = h.dim();
    let a: DMatrix<Complex64> = h.0.map(|x| Complex64::new(0.0, -x * t));
    let norm = a.iter().map(|z| z.norm()).fold(0.0, f64::max) * n as f64;
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = a / Complex64::new(2f64.powi(squarings as i32), 0.0);

    let mut result = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        result += &term;
        if term.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

pub fn transition_amplitude_expm(
    h: &ExcitationBasisMatrix,
    s: usize,
    r: usize,
    t: f64,
) -> Result<TransitionAmplitude> {
    check_time(t)?;
    for site in [s, r] {
        if site == 0 || site > h.dim() {
            return Err(Error::SiteOutOfRange { site, n_sites: h.dim() });
        }
    }
    let u = propagator_expm(h, t);
    Ok(TransitionAmplitude { value: u[(r - 1, s - 1)], t, s, r })
}
