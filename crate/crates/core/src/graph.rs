//! Ferromagnetic Heisenberg spin graphs.
//!
//! A graph holds `N` spins labelled `1..=N`, a set of unordered interacting
//! pairs with strictly positive exchange constants `J_ij`, and a static
//! non-negative field `B_i` on every site. The Hamiltonian is
//!
//! ```text
//! H = - Σ_<i,j> J_ij σ^i · σ^j - Σ_i B_i σ_z^i
//! ```
//!
//! Site labels are 1-based everywhere in the public API.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape tag used to dispatch to closed-form evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Line,
    Ring,
    General,
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::Line => f.write_str("line"),
            Topology::Ring => f.write_str("ring"),
            Topology::General => f.write_str("general"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    /// Smaller site label of the pair.
    pub i: usize,
    /// Larger site label of the pair.
    pub j: usize,
    pub strength: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinGraph {
    n_sites: usize,
    couplings: BTreeMap<(usize, usize), f64>,
    fields: Vec<f64>,
    topology: Topology,
}

/// Per-distance exchange constants of the benzene ring preset.
pub fn benzene_couplings() -> [f64; 3] {
    [0.25, 1.0 / (12.0 * 3f64.sqrt()), 1.0 / 32.0]
}

impl SpinGraph {
    /// Graph with `n_sites` spins, no couplings and zero field.
    pub fn new(n_sites: usize) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::EmptyGraph);
        }
        Ok(Self {
            n_sites,
            couplings: BTreeMap::new(),
            fields: vec![0.0; n_sites],
            topology: Topology::General,
        })
    }

    /// Open chain with nearest-neighbour couplings `J/2` and uniform field `B`.
    pub fn line(n_sites: usize, j: f64, b: f64) -> Result<Self> {
        let mut g = Self::new(n_sites)?;
        for i in 1..n_sites {
            g.add_coupling(i, i + 1, j / 2.0)?;
        }
        g.set_uniform_field(b)?;
        g.topology = Topology::Line;
        Ok(g)
    }

    /// Closed ring of `n_sites >= 3` spins with couplings `J/2` between
    /// neighbours and uniform field `B`.
    pub fn ring(n_sites: usize, j: f64, b: f64) -> Result<Self> {
        Self::ring_with_distance_couplings(n_sites, &[j / 2.0], b)
    }

    /// Ring whose exchange constant depends only on the separation along the
    /// ring: `by_distance[d - 1]` couples every pair at distance `d`.
    ///
    /// Each unordered pair is stored once, so on an even ring the diametric
    /// pairs `(i, i + n/2)` carry a single coupling.
    pub fn ring_with_distance_couplings(n_sites: usize, by_distance: &[f64], b: f64) -> Result<Self> {
        if n_sites < 3 {
            return Err(Error::Domain(format!("a ring needs at least 3 sites, got {n_sites}")));
        }
        if by_distance.len() > n_sites / 2 {
            return Err(Error::Domain(format!(
                "{} coupling distances requested on a ring of {n_sites} sites",
                by_distance.len()
            )));
        }
        let mut g = Self::new(n_sites)?;
        for (d0, &strength) in by_distance.iter().enumerate() {
            let d = d0 + 1;
            for i in 1..=n_sites {
                let j = (i - 1 + d) % n_sites + 1;
                if g.coupling(i, j).is_none() {
                    g.add_coupling(i, j, strength)?;
                }
            }
        }
        g.set_uniform_field(b)?;
        g.topology = Topology::Ring;
        Ok(g)
    }

    /// Six-site benzene ring with distance-1, -2 and -3 couplings.
    pub fn benzene() -> Self {
        Self::ring_with_distance_couplings(6, &benzene_couplings(), 0.0)
            .expect("benzene preset is valid")
    }

    /// Adds the unordered pair `{i, j}`.
    pub fn add_coupling(&mut self, i: usize, j: usize, strength: f64) -> Result<()> {
        self.check_site(i)?;
        self.check_site(j)?;
        if i == j {
            return Err(Error::SelfPair(i));
        }
        if !(strength > 0.0 && strength.is_finite()) {
            return Err(Error::NonPositiveCoupling { i, j, value: strength });
        }
        let key = (i.min(j), i.max(j));
        if self.couplings.contains_key(&key) {
            return Err(Error::DuplicatePair(key.0, key.1));
        }
        self.couplings.insert(key, strength);
        self.topology = Topology::General;
        Ok(())
    }

    pub fn set_field(&mut self, site: usize, b: f64) -> Result<()> {
        self.check_site(site)?;
        if !(b >= 0.0 && b.is_finite()) {
            return Err(Error::InvalidField { site, value: b });
        }
        self.fields[site - 1] = b;
        Ok(())
    }

    pub fn set_uniform_field(&mut self, b: f64) -> Result<()> {
        for site in 1..=self.n_sites {
            self.set_field(site, b)?;
        }
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    /// Field on each site, index 0 holding site 1.
    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn coupling(&self, i: usize, j: usize) -> Option<f64> {
        self.couplings.get(&(i.min(j), i.max(j))).copied()
    }

    /// Couplings in ascending `(i, j)` order with `i < j`.
    pub fn couplings(&self) -> impl Iterator<Item = Coupling> + '_ {
        self.couplings.iter().map(|(&(i, j), &strength)| Coupling { i, j, strength })
    }

    pub fn n_couplings(&self) -> usize {
        self.couplings.len()
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.n_sites {
            return Err(Error::SiteOutOfRange { site, n_sites: self.n_sites });
        }
        Ok(())
    }

    /// Parses the plain-text edge-list format.
    ///
    /// ```text
    /// # comment
    /// sites 5          # optional, otherwise the largest label seen
    /// 1 2 0.5          # coupling between sites 1 and 2
    /// field 3 0.1      # static field on site 3
    /// ```
    pub fn from_edge_list(text: &str) -> Result<Self> {
        enum Entry {
            Pair(usize, usize, f64),
            Field(usize, f64),
        }
        let mut declared = None;
        let mut entries = Vec::new();
        let mut largest = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let parse_err = |msg: String| Error::Parse { line, msg };
            let toks: Vec<&str> = content.split_whitespace().collect();
            let site = |s: &str| -> Result<usize> {
                s.parse::<usize>().map_err(|_| parse_err(format!("bad site label `{s}`")))
            };
            let number = |s: &str| -> Result<f64> {
                s.parse::<f64>().map_err(|_| parse_err(format!("bad number `{s}`")))
            };
            match toks.as_slice() {
                ["sites", n] => declared = Some(site(n)?),
                ["field", i, b] => {
                    let i = site(i)?;
                    largest = largest.max(i);
                    entries.push((line, Entry::Field(i, number(b)?)));
                }
                [i, j, v] => {
                    let (i, j) = (site(i)?, site(j)?);
                    largest = largest.max(i).max(j);
                    entries.push((line, Entry::Pair(i, j, number(v)?)));
                }
                _ => return Err(parse_err(format!("unrecognised line `{content}`"))),
            }
        }
        let n_sites = declared.unwrap_or(largest);
        let mut g = Self::new(n_sites)?;
        for (line, entry) in entries {
            let res = match entry {
                Entry::Pair(i, j, v) => g.add_coupling(i, j, v),
                Entry::Field(i, b) => g.set_field(i, b),
            };
            res.map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        }
        Ok(g)
    }

    /// Inverse of [`SpinGraph::from_edge_list`].
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("sites {}\n", self.n_sites);
        for c in self.couplings() {
            out.push_str(&format!("{} {} {}\n", c.i, c.j, c.strength));
        }
        for (k, &b) in self.fields.iter().enumerate() {
            if b != 0.0 {
                out.push_str(&format!("field {} {}\n", k + 1, b));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_preset_pairs() {
        let g = SpinGraph::line(4, 1.0, 0.2).unwrap();
        let pairs: Vec<_> = g.couplings().map(|c| (c.i, c.j, c.strength)).collect();
        assert_eq!(pairs, vec![(1, 2, 0.5), (2, 3, 0.5), (3, 4, 0.5)]);
        assert_eq!(g.fields(), &[0.2; 4]);
        assert_eq!(g.topology(), Topology::Line);
    }

    #[test]
    fn ring_wraps_around() {
        let g = SpinGraph::ring(4, 1.0, 0.0).unwrap();
        assert_eq!(g.n_couplings(), 4);
        assert_eq!(g.coupling(4, 1), Some(0.5));
        assert_eq!(g.topology(), Topology::Ring);
    }

    #[test]
    fn benzene_diametric_pairs_stored_once() {
        let g = SpinGraph::benzene();
        // 6 nearest, 6 next-nearest, 3 diametric
        assert_eq!(g.n_couplings(), 15);
        assert_eq!(g.coupling(1, 4), Some(1.0 / 32.0));
        assert_eq!(g.coupling(5, 2), Some(1.0 / 32.0));
    }

    #[test]
    fn rejects_bad_couplings() {
        let mut g = SpinGraph::new(3).unwrap();
        assert!(matches!(g.add_coupling(1, 1, 1.0), Err(Error::SelfPair(1))));
        assert!(matches!(g.add_coupling(1, 4, 1.0), Err(Error::SiteOutOfRange { .. })));
        assert!(matches!(g.add_coupling(1, 2, 0.0), Err(Error::NonPositiveCoupling { .. })));
        assert!(matches!(g.add_coupling(1, 2, -1.0), Err(Error::NonPositiveCoupling { .. })));
        g.add_coupling(2, 1, 1.0).unwrap();
        assert!(matches!(g.add_coupling(1, 2, 1.0), Err(Error::DuplicatePair(1, 2))));
        assert!(matches!(g.set_field(2, -0.5), Err(Error::InvalidField { .. })));
        assert!(SpinGraph::new(0).is_err());
        assert!(SpinGraph::ring(2, 1.0, 0.0).is_err());
    }

    #[test]
    fn edge_list_parsing() {
        let text = "# triangle\n1 2 0.5\n2 3 0.25 # trailing\n\nfield 3 0.1\n";
        let g = SpinGraph::from_edge_list(text).unwrap();
        assert_eq!(g.n_sites(), 3);
        assert_eq!(g.coupling(3, 2), Some(0.25));
        assert_eq!(g.fields(), &[0.0, 0.0, 0.1]);

        let g = SpinGraph::from_edge_list("sites 5\n1 2 1\n").unwrap();
        assert_eq!(g.n_sites(), 5);

        let err = SpinGraph::from_edge_list("1 2 1\n2 1 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(SpinGraph::from_edge_list("1 two 1\n").is_err());
        assert!(SpinGraph::from_edge_list("1 2\n").is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let mut g = SpinGraph::benzene();
        g.set_field(2, 0.3).unwrap();
        let back = SpinGraph::from_edge_list(&g.to_edge_list()).unwrap();
        assert_eq!(back.n_sites(), 6);
        assert_eq!(back.couplings().collect::<Vec<_>>(), g.couplings().collect::<Vec<_>>());
        assert_eq!(back.fields(), g.fields());
    }
}
