//! Closed-form amplitudes for the uniform open chain and for rings, their
//! Bessel-series representation, and the large-N readout prescription.
//!
//! Open chain of `N` sites, couplings `J/2`, field `B`:
//!
//! ```text
//! |m̃⟩ = a_m Σ_j cos(π (m-1)(2j-1) / 2N) |j⟩,   a_1 = 1/√N, a_m = √(2/N)
//! E_m = 2B + 2J (1 - cos(π (m-1) / N))
//! f_{r,s}(t) = IDCT_s(v),  v_m = a_m cos(π (m-1)(2r-1) / 2N) e^{-i E_m t}
//! ```
//!
//! Ring of `L = 2N` sites: plane waves `|m̃⟩ = L^{-1/2} Σ_j e^{i k_m j} |j⟩`,
//! `k_m = 2π (m-1) / L`, and `f_{r,s}(t) = IDFT_{r-s}(e^{-i E_m t})`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_j_table, derivative_from_table};
use crate::error::{Error, Result};
use crate::graph::SpinGraph;
use crate::sector::{check_time, AmplitudeKernel, TransitionAmplitude};

/// Coefficient of `N^{1/3}` in the large-N readout time.
pub const READOUT_SHIFT: f64 = 0.8089;
/// Prefactor of `N^{-1/3}` in the large-N entanglement.
pub const ENTANGLEMENT_PREFACTOR: f64 = 1.3499;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSpec {
    pub n: usize,
    pub j: f64,
    pub b: f64,
    pub s: usize,
    pub r: usize,
}

impl LineSpec {
    /// End-to-end transfer, `s = 1`, `r = N`.
    pub fn new(n: usize, j: f64, b: f64) -> Self {
        Self { n, j, b, s: 1, r: n }
    }

    pub fn with_sites(mut self, s: usize, r: usize) -> Self {
        self.s = s;
        self.r = r;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptyGraph);
        }
        if !(self.j > 0.0 && self.j.is_finite()) {
            return Err(Error::NonPositiveCoupling { i: 1, j: 2, value: self.j });
        }
        if !(self.b >= 0.0 && self.b.is_finite()) {
            return Err(Error::InvalidField { site: 1, value: self.b });
        }
        for site in [self.s, self.r] {
            if site == 0 || site > self.n {
                return Err(Error::SiteOutOfRange { site, n_sites: self.n });
            }
        }
        Ok(())
    }

    pub fn graph(&self) -> Result<SpinGraph> {
        SpinGraph::line(self.n, self.j, self.b)
    }

    fn angle(&self, m: usize) -> f64 {
        PI * m as f64 / self.n as f64
    }

    fn norm(&self, m: usize) -> f64 {
        if m == 0 {
            (1.0 / self.n as f64).sqrt()
        } else {
            (2.0 / self.n as f64).sqrt()
        }
    }

    /// `E_m` for `m = 1..=N` (index 0 holds `E_1`).
    pub fn energies(&self) -> Vec<f64> {
        (0..self.n)
            .map(|m| 2.0 * self.b + 2.0 * self.j * (1.0 - self.angle(m).cos()))
            .collect()
    }

    /// `⟨j|m̃⟩` for 1-based `site` and 0-based mode index `m`.
    pub fn mode(&self, m: usize, site: usize) -> f64 {
        self.norm(m) * (self.angle(m) * (2 * site - 1) as f64 / 2.0).cos()
    }

    pub fn kernel(&self) -> Result<AmplitudeKernel> {
        self.validate()?;
        let weights = (0..self.n).map(|m| self.mode(m, self.r) * self.mode(m, self.s)).collect();
        Ok(AmplitudeKernel::new(weights, self.energies()))
    }
}

/// Element `s` (1-based) of the inverse DCT:
/// `Σ_m a_m v_m cos(π (m-1)(2s-1) / 2N)`.
pub fn idct_element(v: &[Complex64], s: usize) -> Complex64 {
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(m, &vm)| {
            let a = if m == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
            vm * (a * (PI * m as f64 * (2 * s - 1) as f64 / (2.0 * n)).cos())
        })
        .sum()
}

/// Element `d` of the inverse DFT: `(1/L) Σ_m u_m e^{2πi d (m-1) / L}`.
pub fn idft_element(u: &[Complex64], d: i64) -> Complex64 {
    let l = u.len() as f64;
    let sum: Complex64 = u
        .iter()
        .enumerate()
        .map(|(m, &um)| um * Complex64::from_polar(1.0, 2.0 * PI * d as f64 * m as f64 / l))
        .sum();
    sum / l
}

pub fn line_amplitude(spec: &LineSpec, t: f64) -> Result<TransitionAmplitude> {
    spec.validate()?;
    check_time(t)?;
    let v: Vec<Complex64> = spec
        .energies()
        .iter()
        .enumerate()
        .map(|(m, &e)| Complex64::from_polar(spec.norm(m), -e * t) * (spec.angle(m) * (2 * spec.r - 1) as f64 / 2.0).cos())
        .collect();
    Ok(TransitionAmplitude { value: idct_element(&v, spec.s), t, s: spec.s, r: spec.r })
}

/// Ring of `2 · half_size` sites whose exchange constant depends on the
/// separation along the ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingSpec {
    pub half_size: usize,
    /// `couplings[d - 1]` is the `J_ij` of every pair at ring distance `d`.
    pub couplings: Vec<f64>,
    pub b: f64,
    pub s: usize,
    pub r: usize,
}

impl RingSpec {
    /// Nearest-neighbour ring with couplings `J/2`, diametric endpoints.
    pub fn uniform(half_size: usize, j: f64, b: f64) -> Self {
        Self { half_size, couplings: vec![j / 2.0], b, s: 1, r: half_size + 1 }
    }

    pub fn benzene() -> Self {
        Self {
            half_size: 3,
            couplings: crate::graph::benzene_couplings().to_vec(),
            b: 0.0,
            s: 1,
            r: 4,
        }
    }

    pub fn with_sites(mut self, s: usize, r: usize) -> Self {
        self.s = s;
        self.r = r;
        self
    }

    pub fn n_sites(&self) -> usize {
        2 * self.half_size
    }

    pub fn validate(&self) -> Result<()> {
        if self.half_size < 2 {
            return Err(Error::Domain(format!(
                "ring needs at least 4 sites, got {}",
                self.n_sites()
            )));
        }
        if self.couplings.is_empty() || self.couplings.len() > self.half_size {
            return Err(Error::Domain(format!(
                "between 1 and {} coupling distances allowed, got {}",
                self.half_size,
                self.couplings.len()
            )));
        }
        for (d, &c) in self.couplings.iter().enumerate() {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::NonPositiveCoupling { i: 1, j: d + 2, value: c });
            }
        }
        if !(self.b >= 0.0 && self.b.is_finite()) {
            return Err(Error::InvalidField { site: 1, value: self.b });
        }
        for site in [self.s, self.r] {
            if site == 0 || site > self.n_sites() {
                return Err(Error::SiteOutOfRange { site, n_sites: self.n_sites() });
            }
        }
        Ok(())
    }

    pub fn graph(&self) -> Result<SpinGraph> {
        SpinGraph::ring_with_distance_couplings(self.n_sites(), &self.couplings, self.b)
    }

    pub fn kernel(&self) -> Result<AmplitudeKernel> {
        let energies = ring_dispersion(self)?;
        let l = self.n_sites() as f64;
        let d = self.r as f64 - self.s as f64;
        let weights = (0..self.n_sites())
            .map(|m| (2.0 * PI * m as f64 * d / l).cos() / l)
            .collect();
        Ok(AmplitudeKernel::new(weights, energies))
    }
}

/// Ring magnon band `E_m`, `m = 1..=2N`, obtained by applying the circulant
/// sector Hamiltonian to each plane wave.
pub fn ring_dispersion(spec: &RingSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let l = spec.n_sites();
    // First row of the circulant sector matrix.
    let mut row = vec![0.0; l];
    row[0] = 2.0 * spec.b;
    for (d0, &c) in spec.couplings.iter().enumerate() {
        let d = d0 + 1;
        let neighbours: &[usize] = if 2 * d == l { &[d] } else { &[d, l - d] };
        for &off in neighbours {
            row[0] += 2.0 * c;
            row[off] -= 2.0 * c;
        }
    }
    Ok((0..l)
        .map(|m| {
            let k = 2.0 * PI * m as f64 / l as f64;
            row.iter().enumerate().map(|(j, &h)| h * (k * j as f64).cos()).sum()
        })
        .collect())
}

pub fn ring_amplitude(spec: &RingSpec, t: f64) -> Result<TransitionAmplitude> {
    check_time(t)?;
    let u: Vec<Complex64> = ring_dispersion(spec)?
        .iter()
        .map(|&e| Complex64::from_polar(1.0, -e * t))
        .collect();
    let d = spec.r as i64 - spec.s as i64;
    Ok(TransitionAmplitude { value: idft_element(&u, d), t, s: spec.s, r: spec.r })
}

/// Inputs to the Bessel-series evaluation of the end-to-end amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselSeriesParams {
    /// Chain length (or ring half-size).
    pub n: usize,
    /// `β₀ = 2 J t₀`.
    pub beta0: f64,
    /// Number of series terms; `None` applies the default cut.
    pub terms: Option<usize>,
}

impl BesselSeriesParams {
    pub fn new(n: usize, beta0: f64) -> Self {
        Self { n, beta0, terms: None }
    }

    pub fn at_time(n: usize, j: f64, t: f64) -> Self {
        Self::new(n, 2.0 * j * t)
    }

    fn order(&self, k: usize) -> usize {
        (2 * k + 1) * self.n
    }

    fn term_count(&self) -> usize {
        if let Some(k) = self.terms {
            return k.max(1);
        }
        let cut = self.beta0 + 50.0 * self.beta0.cbrt();
        let mut k = 1;
        while (self.order(k) as f64) <= cut {
            k += 1;
        }
        k
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptyGraph);
        }
        if !(self.beta0 >= 0.0 && self.beta0.is_finite()) {
            return Err(Error::InvalidTime { what: "beta0", value: self.beta0 });
        }
        Ok(())
    }
}

const DROPPED_TERM_BOUND: f64 = 1e-15;

/// Sum over the odd multiples `M_k = (2k+1) N` of the order,
/// `Σ_k (-1)^{Nk} (J_{M_k}(β₀) + i·with_derivative·J'_{M_k}(β₀))`,
/// with the truncation guard applied to the first dropped term.
fn odd_multiple_series(params: &BesselSeriesParams, with_derivative: bool) -> Result<Complex64> {
    params.validate()?;
    let terms = params.term_count();
    let dropped = params.order(terms);
    let table = bessel_j_table(dropped + 1, params.beta0)?;
    let d = if with_derivative { 1.0 } else { 0.0 };
    let term = |k: usize| {
        let m = params.order(k);
        let sign = if (params.n * k).is_multiple_of(2) { 1.0 } else { -1.0 };
        Complex64::new(table[m], d * derivative_from_table(&table, m)) * sign
    };
    let tail = term(terms).norm();
    if tail > DROPPED_TERM_BOUND {
        return Err(Error::Truncation(tail));
    }
    Ok((0..terms).map(term).sum())
}

/// `|f_{N,1}|` of the uniform open chain at `β₀ = 2Jt`, from the
/// Jacobi–Anger expansion of the IDCT form:
///
/// ```text
/// |f| = 2 | Σ_{k≥0} (-1)^{Nk} (J_{(2k+1)N}(β₀) + i J'_{(2k+1)N}(β₀)) |
/// ```
pub fn line_bessel_entanglement(params: &BesselSeriesParams) -> Result<f64> {
    Ok((2.0 * odd_multiple_series(params, true)?.norm()).min(1.0))
}

/// Diametric amplitude `|f_{N+1,1}|` of the nearest-neighbour ring of `2N`
/// sites: `2 | Σ_{k≥0} (-1)^{Nk} J_{(2k+1)N}(β₀) |`.
pub fn ring_bessel_entanglement(params: &BesselSeriesParams) -> Result<f64> {
    Ok((2.0 * odd_multiple_series(params, false)?.norm()).min(1.0))
}

/// Readout time at the first maximum of `J_N(2Jt)` for large `N`,
/// `(N + 0.8089 N^{1/3}) / 2J`.
pub fn asymptotic_readout_time(n: u64, j: f64) -> f64 {
    let n = n as f64;
    (n + READOUT_SHIFT * n.cbrt()) / (2.0 * j)
}

/// Large-N end-to-end entanglement `1.3499 N^{-1/3}` at the asymptotic
/// readout time. Only meaningful for long chains; exceeds 1 below N ≈ 3.
pub fn asymptotic_entanglement(n: u64) -> f64 {
    ENTANGLEMENT_PREFACTOR / (n as f64).cbrt()
}
