use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde_json::json;
use spinlink::closed_form::{asymptotic_entanglement, asymptotic_readout_time};
use spinlink::optimizer::{optimize_kernel, optimize_line, optimize_ring, Optimum};
use spinlink::{
    averaged_fidelity, build_sector_hamiltonian, diagonalize, line_bessel_entanglement, ring_bessel_entanglement,
    AmplitudeKernel, BesselSeriesParams, LineSpec, RingSpec, SearchConfig, SpinGraph,
};

use crate::table::{Panel, PanelKind, Style, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Line,
    Ring,
    Benzene,
    Graph,
}

impl Preset {
    fn name(self) -> &'static str {
        match self {
            Preset::Line => "line",
            Preset::Ring => "ring",
            Preset::Benzene => "benzene",
            Preset::Graph => "graph",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// Geometry; each subcommand has its own default
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Lengths: `A..B`, `A`, or a comma list (`1000,1e12`). Rings use the half size
    #[arg(long)]
    pub n: Option<String>,
    /// Coupling scale J
    #[arg(long, default_value_t = 1.0)]
    pub j: f64,
    /// Uniform field B
    #[arg(long, default_value_t = 0.0)]
    pub b: f64,
    /// End of the time window
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Time step (search grid, or trace spacing for `evolve`)
    #[arg(long)]
    pub step: Option<f64>,
    /// Sender and receiver sites, 1-based: `s,r`
    #[arg(long, value_parser = parse_sites)]
    pub sites: Option<(usize, usize)>,
    /// Output file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Edge-list file for `--preset graph`
    #[arg(long)]
    pub graph: Option<PathBuf>,
}

fn parse_sites(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `s,r`, got `{s}`"))?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("bad site `{x}`: {e}"));
    Ok((p(a)?, p(b)?))
}

fn parse_count(s: &str) -> Result<u64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s.parse().with_context(|| format!("bad length `{s}`"))?;
    ensure!(v >= 0.0 && v.fract() == 0.0 && v < 1.8e19, "length `{s}` is not a non-negative integer");
    Ok(v as u64)
}

/// `A..B` (inclusive), `A`, or comma-separated mixtures of both.
pub fn parse_lengths(s: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let (a, b) = (parse_count(a)?, parse_count(b.trim_start_matches('='))?);
            ensure!(a <= b, "empty range `{part}`");
            ensure!(b - a <= 100_000, "range `{part}` too long");
            out.extend(a..=b);
        } else {
            out.push(parse_count(part)?);
        }
    }
    ensure!(!out.is_empty(), "no lengths in `{s}`");
    Ok(out)
}

impl Opts {
    fn preset_or(&self, default: Preset) -> Preset {
        self.preset.unwrap_or(default)
    }

    fn lengths(&self, default: &str) -> Result<Vec<usize>> {
        parse_lengths(self.n.as_deref().unwrap_or(default))?
            .into_iter()
            .map(|n| usize::try_from(n).context("length does not fit in memory"))
            .collect()
    }

    fn check_scalars(&self) -> Result<()> {
        ensure!(self.j > 0.0 && self.j.is_finite(), "--j must be positive, got {}", self.j);
        ensure!(self.b >= 0.0 && self.b.is_finite(), "--b must be non-negative, got {}", self.b);
        Ok(())
    }

    fn search(&self, preset: Preset) -> SearchConfig {
        let mut cfg = SearchConfig::for_coupling(self.j);
        if preset == Preset::Benzene {
            cfg.t_max = 500.0;
        }
        if let Some(t) = self.tmax {
            cfg.t_max = t;
        }
        if let Some(h) = self.step {
            cfg.coarse_step = h;
        }
        cfg
    }

    fn load_graph(&self) -> Result<SpinGraph> {
        let path = self.graph.as_ref().context("--preset graph needs --graph FILE")?;
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(SpinGraph::from_edge_list(&text)?)
    }

    fn parameters(&self, cfg: Option<&SearchConfig>) -> Vec<(&'static str, serde_json::Value)> {
        let mut p = vec![("j", json!(self.j)), ("b", json!(self.b))];
        if let Some(c) = cfg {
            p.push(("t_max", json!(c.t_max)));
            p.push(("step", json!(c.coarse_step)));
        }
        if let Some((s, r)) = self.sites {
            p.push(("sites", json!([s, r])));
        }
        p
    }
}

fn line_spec(o: &Opts, n: usize) -> LineSpec {
    let (s, r) = o.sites.unwrap_or((1, n));
    LineSpec::new(n, o.j, o.b).with_sites(s, r)
}

fn ring_spec(o: &Opts, half: usize) -> RingSpec {
    let (s, r) = o.sites.unwrap_or((1, half + 1));
    RingSpec::uniform(half, o.j, o.b).with_sites(s, r)
}

fn benzene_spec(o: &Opts) -> RingSpec {
    let mut spec = RingSpec::benzene();
    spec.b = o.b;
    let (s, r) = o.sites.unwrap_or((spec.s, spec.r));
    spec.with_sites(s, r)
}

fn graph_kernel(o: &Opts, g: &SpinGraph) -> Result<AmplitudeKernel> {
    let (s, r) = o.sites.unwrap_or((1, g.n_sites()));
    Ok(diagonalize(&build_sector_hamiltonian(g)).kernel(s, r)?)
}

const SWEEP_COLUMNS: [(&str, Style); 6] = [
    ("N", Style::Int),
    ("t0", Style::Sig6),
    ("f_max", Style::Fixed3),
    ("F", Style::Fixed3),
    ("E", Style::Fixed3),
    ("alpha", Style::Sig6),
];

fn sweep_row(opt: &Optimum) -> Vec<Option<f64>> {
    let r = &opt.record;
    vec![Some(r.n as f64), Some(r.t0), Some(r.f_max), Some(r.fidelity), Some(r.concurrence), Some(r.alpha)]
}

fn optimise(o: &Opts, preset: Preset, ns: &[usize], cfg: &SearchConfig) -> Result<Vec<Optimum>> {
    match preset {
        Preset::Line => ns.par_iter().map(|&n| Ok(optimize_line(&line_spec(o, n), cfg)?)).collect(),
        Preset::Ring => ns.par_iter().map(|&n| Ok(optimize_ring(&ring_spec(o, n), cfg)?)).collect(),
        Preset::Benzene => Ok(vec![optimize_ring(&benzene_spec(o), cfg)?]),
        Preset::Graph => {
            let g = o.load_graph()?;
            Ok(vec![optimize_kernel(g.n_sites(), o.j, &graph_kernel(o, &g)?, cfg)?])
        }
    }
}

pub fn sweep(o: &Opts) -> Result<Table> {
    o.check_scalars()?;
    let preset = o.preset_or(Preset::Line);
    let ns = o.lengths(if preset == Preset::Ring { "2..12" } else { "2..80" })?;
    let cfg = o.search(preset);
    let optima = optimise(o, preset, &ns, &cfg)?;

    let below: Vec<String> = optima
        .iter()
        .filter(|p| p.record.fidelity <= 2.0 / 3.0)
        .map(|p| p.record.n.to_string())
        .collect();
    if below.is_empty() {
        eprintln!("all {} rows have F > 2/3", optima.len());
    } else {
        eprintln!("F <= 2/3 for N = {}", below.join(","));
    }

    Ok(Table {
        command: "sweep",
        preset: preset.name().into(),
        parameters: o.parameters(Some(&cfg)),
        columns: SWEEP_COLUMNS.to_vec(),
        rows: optima.iter().map(sweep_row).collect(),
        panels: vec![
            Panel { kind: PanelKind::Bars, x: "N", y: "F", reference: Some(2.0 / 3.0) },
            Panel { kind: PanelKind::Line, x: "N", y: "alpha", reference: None },
        ],
    })
}

pub fn ring(o: &Opts) -> Result<Table> {
    o.check_scalars()?;
    let preset = o.preset_or(Preset::Ring);
    let cfg = o.search(preset);
    let rows = match preset {
        Preset::Ring => {
            let ns = o.lengths("3..12")?;
            ns.par_iter()
                .map(|&n| -> Result<Vec<Option<f64>>> {
                    let ring = optimize_ring(&ring_spec(o, n), &cfg)?;
                    let line = optimize_line(&LineSpec::new(n, o.j, o.b), &cfg)?;
                    let diff = (ring.search.global.value - line.search.global.value).abs();
                    let mut row = sweep_row(&ring);
                    row.extend([Some(line.record.f_max), Some(diff)]);
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()?
        }
        Preset::Benzene => {
            let mut row = sweep_row(&optimize_ring(&benzene_spec(o), &cfg)?);
            row.extend([None, None]);
            vec![row]
        }
        other => bail!("ring takes --preset ring or benzene, not {}", other.name()),
    };
    let mut columns = SWEEP_COLUMNS.to_vec();
    columns.extend([("line_f_max", Style::Fixed3), ("max_E_diff", Style::Sig6)]);
    Ok(Table {
        command: "ring",
        preset: preset.name().into(),
        parameters: o.parameters(Some(&cfg)),
        columns,
        rows,
        panels: vec![Panel { kind: PanelKind::Bars, x: "N", y: "F", reference: Some(2.0 / 3.0) }],
    })
}

/// Rows in an `evolve` trace above which the command refuses to run.
const MAX_TRACE_ROWS: f64 = 5e6;

pub fn evolve(o: &Opts) -> Result<Table> {
    o.check_scalars()?;
    let preset = o.preset_or(Preset::Line);
    let lengths = o.lengths("2")?;
    ensure!(lengths.len() == 1 || preset == Preset::Benzene || preset == Preset::Graph, "evolve takes a single --n");
    let n = lengths[0];
    let kernel = match preset {
        Preset::Line => line_spec(o, n).kernel()?,
        Preset::Ring => ring_spec(o, n).kernel()?,
        Preset::Benzene => benzene_spec(o).kernel()?,
        Preset::Graph => graph_kernel(o, &o.load_graph()?)?,
    };
    let t_max = o.tmax.unwrap_or(if preset == Preset::Benzene { 500.0 } else { 20.0 / o.j });
    let step = o.step.unwrap_or(0.05 / o.j);
    ensure!(t_max >= 0.0 && t_max.is_finite(), "--tmax must be non-negative, got {t_max}");
    ensure!(step > 0.0 && step.is_finite(), "--step must be positive, got {step}");
    let count = (t_max / step * (1.0 + 1e-12)).floor();
    ensure!(count < MAX_TRACE_ROWS, "trace of {count} rows is too long; raise --step");

    let rows = (0..=count as usize)
        .map(|i| {
            let t = i as f64 * step;
            let f = kernel.eval(t);
            let a = f.norm().min(1.0);
            Ok(vec![Some(t), Some(f.re), Some(f.im), Some(a), Some(averaged_fidelity(a, 0.0)?), Some(a)])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut parameters = o.parameters(None);
    parameters.extend([("n", json!(n)), ("t_max", json!(t_max)), ("step", json!(step))]);
    Ok(Table {
        command: "evolve",
        preset: preset.name().into(),
        parameters,
        columns: vec![
            ("t", Style::Sig6),
            ("re_f", Style::Sig6),
            ("im_f", Style::Sig6),
            ("abs_f", Style::Sig6),
            ("F", Style::Sig6),
            ("E", Style::Sig6),
        ],
        rows,
        panels: vec![Panel { kind: PanelKind::Line, x: "t", y: "abs_f", reference: None }],
    })
}

/// Longest chain for which the exact column is evaluated.
pub const EXACT_LIMIT: u64 = 2000;

pub fn asymptotic(o: &Opts) -> Result<Table> {
    o.check_scalars()?;
    let preset = o.preset_or(Preset::Line);
    ensure!(matches!(preset, Preset::Line | Preset::Ring), "asymptotic takes --preset line or ring");
    let ns = parse_lengths(o.n.as_deref().unwrap_or("100,200,500,1000,2000,1e12"))?;
    let mut rows = Vec::with_capacity(ns.len());
    for &n in &ns {
        ensure!(n >= 1, "lengths start at 1");
        let t0 = asymptotic_readout_time(n, o.j);
        let exact = if n <= EXACT_LIMIT {
            let params = BesselSeriesParams::at_time(n as usize, o.j, t0);
            Some(match preset {
                Preset::Ring => ring_bessel_entanglement(&params)?,
                _ => line_bessel_entanglement(&params)?,
            })
        } else {
            eprintln!("N={n}: exact column skipped, Bessel orders beyond N={EXACT_LIMIT} are not evaluated");
            None
        };
        rows.push(vec![Some(n as f64), Some(t0), Some(asymptotic_entanglement(n)), exact]);
    }
    Ok(Table {
        command: "asymptotic",
        preset: preset.name().into(),
        parameters: o.parameters(None),
        columns: vec![
            ("N", Style::Int),
            ("t0_formula", Style::Sig6),
            ("E_formula", Style::Sig6),
            ("E_exact_if_feasible", Style::Sig6),
        ],
        rows,
        panels: vec![
            Panel { kind: PanelKind::Line, x: "N", y: "E_formula", reference: None },
            Panel { kind: PanelKind::Line, x: "N", y: "E_exact_if_feasible", reference: None },
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_lists() {
        assert_eq!(parse_lengths("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_lengths("2..=3").unwrap(), vec![2, 3]);
        assert_eq!(parse_lengths("1000,1e12").unwrap(), vec![1000, 1_000_000_000_000]);
        assert_eq!(parse_lengths("7, 9..10").unwrap(), vec![7, 9, 10]);
        assert!(parse_lengths("5..2").is_err());
        assert!(parse_lengths("2.5").is_err());
        assert!(parse_lengths("").is_err());
    }

    #[test]
    fn sites_flag() {
        assert_eq!(parse_sites("1,4").unwrap(), (1, 4));
        assert!(parse_sites("1").is_err());
    }
}
