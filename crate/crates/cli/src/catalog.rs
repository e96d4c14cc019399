//! The five bundled experiments.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExperimentId {
    E1,
    E2,
    E3,
    E4,
    E5,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 5] =
        [ExperimentId::E1, ExperimentId::E2, ExperimentId::E3, ExperimentId::E4, ExperimentId::E5];

    pub fn entry(self) -> &'static CatalogEntry {
        &CATALOG[self as usize]
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{}", *self as usize + 1)
    }
}

impl FromStr for ExperimentId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown experiment {s:?}; expected one of E1..E5"))
    }
}

impl Serialize for ExperimentId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A config shipped with the binary.
#[derive(Debug, Clone, Copy)]
pub struct BundledConfig {
    pub name: &'static str,
    pub text: &'static str,
}

#[derive(Debug)]
pub struct CatalogEntry {
    pub id: ExperimentId,
    pub title: &'static str,
    /// The statement the experiment checks.
    pub anchor: &'static str,
    pub description: &'static str,
    /// Wall time of a release build on one core.
    pub runtime: &'static str,
    pub configs: &'static [BundledConfig],
}

macro_rules! bundled {
    ($name:literal) => {
        BundledConfig { name: $name, text: include_str!(concat!("../configs/", $name, ".toml")) }
    };
}

pub static CATALOG: [CatalogEntry; 5] = [
    CatalogEntry {
        id: ExperimentId::E1,
        title: "simple random walk on F2 against closed forms",
        anchor: "dimension formula on trees: dim ν = h/l",
        description: "escape rate, entropy limit and both dimension estimators against l = 1/2, h = (1/2) log 3, dim = log 3",
        runtime: "~1 s",
        configs: &[bundled!("e1_tree_srw")],
    },
    CatalogEntry {
        id: ExperimentId::E2,
        title: "dimension bound on non-uniform walks",
        anchor: "dimension bound: dim ν ≤ h / (l log a)",
        description: "certified entropy bound, escape rate and dimension estimates on a biased tree walk and a half-plane walk",
        runtime: "~15 s",
        configs: &[bundled!("e2_tree_biased"), bundled!("e2_halfplane")],
    },
    CatalogEntry {
        id: ExperimentId::E3,
        title: "bounded entropy, diverging escape rate",
        anchor: "entropy of μ_k bounded in k while l(μ_k) → ∞, so h/l → 0",
        description: "μ_k sweep over k = 0..32: entropy ceiling, affine escape growth, ratio decay, convexity bracket, open-set mass",
        runtime: "~2 s",
        configs: &[bundled!("e3_mu_k")],
    },
    CatalogEntry {
        id: ExperimentId::E4,
        title: "escape rate as a Busemann integral",
        anchor: "l = Σ μ(g) ∫ β_ξ(o, g⁻¹o) dν(ξ), exact on CAT(−1) spaces",
        description: "Monte Carlo escape rate against the Busemann integral over harmonic-measure samples, on both backends",
        runtime: "< 1 s",
        configs: &[bundled!("e4_busemann_tree"), bundled!("e4_busemann_halfplane")],
    },
    CatalogEntry {
        id: ExperimentId::E5,
        title: "dimension collapse of ν_k",
        anchor: "dim ν_k is eventually smaller than any ε > 0 (singularity of the limit)",
        description: "dimension of ν̂_k across the k grid, mass near the orbit of γ^±, and multiplicity of the boundary covers",
        runtime: "~16 s",
        configs: &[bundled!("e5_collapse")],
    },
];

/// Every bundled config, in catalog order.
pub fn bundled_configs() -> impl Iterator<Item = &'static BundledConfig> {
    CATALOG.iter().flat_map(|e| e.configs.iter())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;

    #[test]
    fn ids_round_trip() {
        for id in ExperimentId::ALL {
            assert_eq!(id.to_string().parse::<ExperimentId>().unwrap(), id);
            assert_eq!(id.entry().id, id);
        }
        assert!("E6".parse::<ExperimentId>().is_err());
    }

    #[test]
    fn bundled_configs_validate_and_match_their_entry() {
        for entry in &CATALOG {
            for b in entry.configs {
                let cfg = Config::parse(b.name, b.name, b.text).unwrap_or_else(|e| panic!("{e}"));
                assert_eq!(cfg.experiment, entry.id, "{}", b.name);
            }
        }
    }
}
