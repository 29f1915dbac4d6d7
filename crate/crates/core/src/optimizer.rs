//! Readout-time search: maximise `|f(t)|` over `t ∈ [0, T_max]`.
//!
//! A uniform grid is scanned first. With bandwidth `W` (spread of the energies
//! in the kernel), `|f|²` has second derivative at most `W²`, so the true
//! maximum exceeds the best grid value by at most `W² h² / 8`. Every grid
//! point within that margin of the grid maximum is refined by golden-section
//! search, which makes the reported maximum independent of where the grid
//! happens to fall.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::averaged_fidelity;
use crate::closed_form::{LineSpec, RingSpec};
use crate::error::{Error, Result};
use crate::sector::AmplitudeKernel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub t_max: f64,
    pub coarse_step: f64,
    pub refine_tol: f64,
    /// Decimals used when deciding which maxima tie.
    pub round_decimals: u32,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self::for_coupling(1.0)
    }
}

impl SearchConfig {
    /// `T_max = 4000/J`, grid step `0.05/J`.
    pub fn for_coupling(j: f64) -> Self {
        Self { t_max: 4000.0 / j, coarse_step: 0.05 / j, refine_tol: 1e-6 / j, round_decimals: 3 }
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    /// Checks the grid resolves the fastest oscillation of `|f|`:
    /// `coarse_step ≤ π / (2 W)`.
    pub fn validate(&self, bandwidth: f64) -> Result<()> {
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::Search(format!("t_max must be positive, got {}", self.t_max)));
        }
        if !(self.coarse_step > 0.0 && self.coarse_step.is_finite()) {
            return Err(Error::Search(format!("coarse step must be positive, got {}", self.coarse_step)));
        }
        if self.refine_tol.is_nan() || self.refine_tol <= 0.0 {
            return Err(Error::Search("refine tolerance must be positive".into()));
        }
        if bandwidth > 0.0 && self.coarse_step > PI / (2.0 * bandwidth) {
            return Err(Error::Search(format!(
                "coarse step {} exceeds π/(2W) = {} for bandwidth {bandwidth}",
                self.coarse_step,
                PI / (2.0 * bandwidth)
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakSearch {
    /// Largest `|f|` found anywhere in the window.
    pub global: Peak,
    /// Earliest refined maximum whose rounded value equals the rounded global one.
    pub reported: Peak,
    /// Largest `|f|` on the coarse grid.
    pub grid_max: f64,
    pub refined: usize,
}

fn round_to(v: f64, decimals: u32) -> f64 {
    let s = 10f64.powi(decimals as i32);
    (v * s).round() / s
}

fn golden_max(kernel: &AmplitudeKernel, mut a: f64, mut b: f64, tol: f64) -> Peak {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let g = |t: f64| kernel.eval(t).norm_sqr();
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while b - a > tol {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
        }
    }
    let t = 0.5 * (a + b);
    Peak { t, value: g(t).sqrt() }
}

/// Maximises `|f|` for an arbitrary kernel over `[0, cfg.t_max]`.
pub fn maximize_amplitude(kernel: &AmplitudeKernel, cfg: &SearchConfig) -> Result<PeakSearch> {
    let w = kernel.bandwidth();
    cfg.validate(w)?;
    let h = cfg.coarse_step;
    let steps = (cfg.t_max / h).ceil() as usize;
    let grid: Vec<f64> = (0..=steps).map(|i| (i as f64 * h).min(cfg.t_max)).collect();
    let sq: Vec<f64> = grid.iter().map(|&t| kernel.eval(t).norm_sqr()).collect();

    let grid_max_sq = sq.iter().copied().fold(0.0, f64::max);
    let grid_max = grid_max_sq.sqrt();
    let tie_slack = 10f64.powi(-(cfg.round_decimals as i32));
    let margin = w * w * h * h / 8.0 + 1e-12;
    let threshold = (grid_max - tie_slack).max(0.0).powi(2) - margin;

    let mut peaks: Vec<Peak> = Vec::new();
    for (i, (&t, &g)) in grid.iter().zip(&sq).enumerate() {
        if g < threshold {
            continue;
        }
        let lo = if i == 0 { 0.0 } else { grid[i - 1] };
        let hi = grid.get(i + 1).copied().unwrap_or(cfg.t_max);
        let mut best = Peak { t, value: g.sqrt() };
        if hi > lo {
            let p = golden_max(kernel, lo, hi, cfg.refine_tol);
            if p.value > best.value {
                best = p;
            }
        }
        peaks.push(best);
    }
    let refined = peaks.len();

    let global = peaks
        .iter()
        .copied()
        .fold(Peak { t: 0.0, value: f64::NEG_INFINITY }, |acc, p| if p.value > acc.value { p } else { acc });
    let target = round_to(global.value, cfg.round_decimals);
    let reported = peaks
        .iter()
        .copied()
        .filter(|p| round_to(p.value, cfg.round_decimals) == target)
        .min_by(|a, b| a.t.total_cmp(&b.t))
        .unwrap_or(global);

    Ok(PeakSearch { global, reported, grid_max, refined })
}

/// One row of the per-length optimum table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n: usize,
    pub t0: f64,
    pub f_max: f64,
    /// Averaged fidelity with the phase compensated.
    pub fidelity: f64,
    pub concurrence: f64,
    /// `log₁₀(2 J t0)`.
    pub alpha: f64,
}

impl SweepRecord {
    fn from_peak(n: usize, j: f64, peak: Peak) -> Result<Self> {
        let f_max = peak.value.min(1.0);
        Ok(Self {
            n,
            t0: peak.t,
            f_max,
            fidelity: averaged_fidelity(f_max, 0.0)?,
            concurrence: f_max,
            alpha: (2.0 * j * peak.t).log10(),
        })
    }
}

/// Record plus the underlying search, for callers that need the unrounded
/// global maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub record: SweepRecord,
    pub search: PeakSearch,
}

pub fn optimize_kernel(n: usize, j: f64, kernel: &AmplitudeKernel, cfg: &SearchConfig) -> Result<Optimum> {
    let search = maximize_amplitude(kernel, cfg)?;
    let record = SweepRecord::from_peak(n, j, search.reported)?;
    Ok(Optimum { record, search })
}

pub fn find_optimum(line: &LineSpec, cfg: &SearchConfig) -> Result<SweepRecord> {
    Ok(optimize_line(line, cfg)?.record)
}

pub fn optimize_line(line: &LineSpec, cfg: &SearchConfig) -> Result<Optimum> {
    optimize_kernel(line.n, line.j, &line.kernel()?, cfg)
}

/// Ring optimum; `alpha` uses `J = 2 J_{i,i+1}`.
pub fn optimize_ring(ring: &RingSpec, cfg: &SearchConfig) -> Result<Optimum> {
    let kernel = ring.kernel()?;
    optimize_kernel(ring.half_size, 2.0 * ring.couplings[0], &kernel, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub records: Vec<SweepRecord>,
}

impl SweepTable {
    pub fn get(&self, n: usize) -> Option<&SweepRecord> {
        self.records.iter().find(|r| r.n == n)
    }
}

/// End-to-end optimum for every chain length in `lengths`. Rows are computed
/// in parallel and returned in ascending `N`.
pub fn sweep(lengths: RangeInclusive<usize>, j: f64, b: f64, cfg: &SearchConfig) -> Result<SweepTable> {
    let ns: Vec<usize> = lengths.collect();
    let records = ns
        .par_iter()
        .map(|&n| find_optimum(&LineSpec::new(n, j, b), cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_site_chain_earliest_peak() {
        let rec = find_optimum(&LineSpec::new(2, 1.0, 0.0), &SearchConfig::default()).unwrap();
        assert_abs_diff_eq!(rec.f_max, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(rec.t0, PI / 2.0, epsilon = 1e-5);
        assert_abs_diff_eq!(rec.alpha, PI.log10(), epsilon = 1e-5);
    }

    #[test]
    fn refined_beats_grid() {
        let kernel = LineSpec::new(11, 1.0, 0.0).kernel().unwrap();
        let cfg = SearchConfig::default().with_t_max(300.0);
        let s = maximize_amplitude(&kernel, &cfg).unwrap();
        assert!(s.global.value >= s.grid_max - 1e-12);
        assert!(s.refined >= 1);
        assert!(s.reported.t <= s.global.t);
        assert!(s.reported.value <= s.global.value);
    }

    #[test]
    fn record_is_consistent() {
        let rec = find_optimum(&LineSpec::new(6, 1.0, 0.2), &SearchConfig::default().with_t_max(200.0)).unwrap();
        assert_eq!(rec.fidelity, averaged_fidelity(rec.f_max, 0.0).unwrap());
        assert_eq!(rec.concurrence, rec.f_max);
        assert!(rec.t0 >= 0.0 && rec.t0 <= 200.0);
    }

    #[test]
    fn guard_rejects_coarse_grid() {
        let kernel = LineSpec::new(10, 1.0, 0.0).kernel().unwrap();
        let cfg = SearchConfig { coarse_step: 1.0, ..SearchConfig::default() };
        assert!(matches!(maximize_amplitude(&kernel, &cfg), Err(Error::Search(_))));
        let cfg = SearchConfig { t_max: -1.0, ..SearchConfig::default() };
        assert!(maximize_amplitude(&kernel, &cfg).is_err());
    }

    #[test]
    fn sweep_rows_ordered() {
        let table = sweep(2..=6, 1.0, 0.0, &SearchConfig::default().with_t_max(100.0)).unwrap();
        let ns: Vec<usize> = table.records.iter().map(|r| r.n).collect();
        assert_eq!(ns, vec![2, 3, 4, 5, 6]);
        assert!(table.get(4).is_some() && table.get(9).is_none());
    }

    #[test]
    fn stationary_kernel() {
        // single-site chain never loses the excitation
        let rec = find_optimum(&LineSpec::new(1, 1.0, 0.5), &SearchConfig::default().with_t_max(10.0)).unwrap();
        assert_abs_diff_eq!(rec.f_max, 1.0, epsilon = 1e-12);
        assert_eq!(rec.t0, 0.0);
    }
}
