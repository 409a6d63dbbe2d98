use std::path::Path;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use trace_conjunction_core::bbm::{Fit, DEFAULT_S_GRID};
use trace_conjunction_core::fields::FieldSpec;
use trace_conjunction_core::quad::QuadSpec;
use trace_conjunction_core::theorems::TheoremId;
use trace_conjunction_core::Params;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Lists of `N`, `s` and `p`; the grid is their Cartesian product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    pub s: Vec<f64>,
    pub p: Vec<f64>,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            n: vec![2, 3],
            s: vec![0.3, 0.5, 0.7],
            p: vec![1.5, 2.0, 3.0],
        }
    }
}

impl Grid {
    pub fn oracle_default() -> Self {
        Grid {
            n: vec![2, 3, 4],
            s: vec![0.3, 0.5, 0.7],
            p: vec![1.0, 2.0, 3.0],
        }
    }

    /// Grid points in `N`-major order; every point must satisfy the base invariants.
    pub fn points(&self) -> trace_conjunction_core::Result<Vec<Params>> {
        if self.n.is_empty() || self.s.is_empty() || self.p.is_empty() {
            return Err(trace_conjunction_core::Error::Parameter(
                "grid lists N, s and p must be non-empty".into(),
            ));
        }
        let mut out = Vec::with_capacity(self.n.len() * self.s.len() * self.p.len());
        for &n in &self.n {
            for &s in &self.s {
                for &p in &self.p {
                    out.push(Params::new(n, s, p)?);
                }
            }
        }
        Ok(out)
    }
}

/// `"all"` or an explicit list of theorem ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ids {
    Keyword(String),
    List(Vec<TheoremId>),
}

impl Default for Ids {
    fn default() -> Self {
        Ids::Keyword("all".into())
    }
}

impl Ids {
    /// The ids to run and whether they were requested explicitly.
    pub fn resolve(&self) -> anyhow::Result<(Vec<TheoremId>, bool)> {
        match self {
            Ids::Keyword(k) if k.eq_ignore_ascii_case("all") => {
                Ok((TheoremId::ALL.to_vec(), false))
            }
            Ids::Keyword(k) => Ok((vec![k.parse::<TheoremId>()?], true)),
            Ids::List(ids) if ids.is_empty() => bail!("verify.ids is an empty list"),
            Ids::List(ids) => Ok((ids.clone(), true)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub ids: Ids,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsConfig {
    /// Overrides the top-level grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BbmConfig {
    #[serde(rename = "N")]
    pub n: usize,
    pub p: Vec<f64>,
    pub s_grid: Vec<f64>,
    pub fit: Fit,
    pub rel_tol: f64,
    /// Interior fields; defaults to the first two corpus fields.
    pub fields: Vec<FieldSpec>,
    /// Also run the whole-space limit for a bump on `R^1`.
    pub classical: bool,
    pub classical_rel_tol: f64,
    /// Also check the boundary Gagliardo chain along the grid.
    pub liminf: bool,
}

impl Default for BbmConfig {
    fn default() -> Self {
        BbmConfig {
            n: 2,
            p: vec![2.0],
            s_grid: DEFAULT_S_GRID.to_vec(),
            fit: Fit::Linear,
            rel_tol: 0.10,
            fields: FieldSpec::default_corpus()[..2].to_vec(),
            classical: true,
            classical_rel_tol: 0.05,
            liminf: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DivergeConfig {
    #[serde(rename = "N")]
    pub n: usize,
    pub s: Vec<f64>,
    pub p: Vec<f64>,
    /// Offsets `c` of the wrong boundary datum `tr u + c·window`; `0` checks stability.
    pub offsets: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub slope_rel_tol: f64,
}

impl Default for DivergeConfig {
    fn default() -> Self {
        DivergeConfig {
            n: 2,
            s: vec![0.5, 0.7],
            p: vec![2.0],
            offsets: vec![1.0],
            epsilons: vec![0.1, 0.05, 0.025, 0.0125],
            slope_rel_tol: 0.10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub grid: Grid,
    pub rel_tol: f64,
    /// Seeds per calibration case; `0` skips calibration.
    pub calibration_seeds: u64,
    pub calibration_samples: usize,
    /// Minimum fraction of seeds that must agree.
    pub calibration_min_agree: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            grid: Grid::oracle_default(),
            rel_tol: 1e-8,
            calibration_seeds: 100,
            calibration_samples: 100_000,
            calibration_min_agree: 0.95,
        }
    }
}

fn default_quad() -> QuadSpec {
    QuadSpec::with_total_samples(1_000_000, 16, 0x5EED)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub quad: QuadSpec,
    pub grid: Grid,
    pub fields: Vec<FieldSpec>,
    pub verify: VerifyConfig,
    pub constants: ConstantsConfig,
    pub bbm: BbmConfig,
    pub diverge: DivergeConfig,
    pub oracle: OracleConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            quad: default_quad(),
            grid: Grid::default(),
            fields: FieldSpec::default_corpus(),
            verify: VerifyConfig::default(),
            constants: ConstantsConfig::default(),
            bbm: BbmConfig::default(),
            diverge: DivergeConfig::default(),
            oracle: OracleConfig::default(),
            out: None,
            format: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg: RunConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.quad.total_samples(), 1_000_000);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(
            r#"{"grid": {"N": [2], "s": [0.5], "p": [2], "q": 1}}"#
        )
        .is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"verbose": true}"#).is_err());
    }

    #[test]
    fn ids_accept_keyword_or_list() {
        let cfg: RunConfig =
            serde_json::from_str(r#"{"verify": {"ids": ["FRACTIONAL_CONJ"]}}"#).unwrap();
        assert_eq!(
            cfg.verify.ids.resolve().unwrap(),
            (vec![TheoremId::FractionalConj], true)
        );
        let cfg: RunConfig = serde_json::from_str(r#"{"verify": {"ids": "all"}}"#).unwrap();
        assert_eq!(cfg.verify.ids.resolve().unwrap().0.len(), 9);
        let cfg: RunConfig = serde_json::from_str(r#"{"verify": {"ids": "some"}}"#).unwrap();
        assert!(cfg.verify.ids.resolve().is_err());
    }

    #[test]
    fn grid_points_are_validated() {
        let grid = Grid {
            n: vec![2],
            s: vec![1.5],
            p: vec![2.0],
        };
        assert!(grid.points().is_err());
        assert_eq!(Grid::default().points().unwrap().len(), 18);
    }
}
