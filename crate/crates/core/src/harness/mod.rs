//! Experiment drivers, fits of the multi-cut constant term, run manifests
//! and the acceptance checks.

pub mod commands;
pub mod criteria;
pub mod fit;
pub mod manifest;
pub mod table;

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::error::{ArcError, Result};
use crate::gas_mc::DEFAULT_SEED;
use crate::symbol::{parse_rational, ArcConfig, Family};

pub use commands::{execute, Command, ScalingRule};
pub use criteria::{run_criterion, CriterionReport, CRITERIA};
pub use fit::{fit_o1, O1FitResult, Snap};
pub use manifest::{replay, write_run, RunManifest};
pub use table::{Cell, Table};

pub const DEFAULT_PRECISION_BITS: u32 = 256;
pub const N_MAX_GUARD: usize = 200;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOptions {
    pub precision_bits: u32,
    pub seed: u64,
    pub format: Format,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            precision_bits: DEFAULT_PRECISION_BITS,
            seed: DEFAULT_SEED,
            format: Format::Csv,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputFile {
    /// Stem plus extension, e.g. `residuals.csv`.
    pub name: String,
    pub body: String,
}

#[derive(Clone, Debug, Default)]
pub struct CommandReport {
    pub files: Vec<OutputFile>,
    pub checks: Vec<Check>,
    pub summary: serde_json::Value,
}

impl CommandReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Symmetric family selector shared by the commands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    OneCut,
    Odd { r: u32 },
    Even { s: u32 },
}

impl FamilySpec {
    /// `N` arcs: one-cut for `N = 1`, odd for odd `N`, even otherwise.
    pub fn with_intervals(n: u32) -> Result<FamilySpec> {
        match n {
            0 => Err(ArcError::InvalidParameter("need at least one arc".into())),
            1 => Ok(FamilySpec::OneCut),
            n if n % 2 == 1 => Ok(FamilySpec::Odd { r: (n - 1) / 2 }),
            n => Ok(FamilySpec::Even { s: n / 2 }),
        }
    }

    pub fn intervals(&self) -> u32 {
        match self {
            FamilySpec::OneCut => 1,
            FamilySpec::Odd { r } => 2 * r + 1,
            FamilySpec::Even { s } => 2 * s,
        }
    }

    pub fn config(&self, eps: &Rational) -> Result<ArcConfig> {
        match *self {
            FamilySpec::OneCut | FamilySpec::Odd { r: 0 } => ArcConfig::one_cut(eps.clone()),
            FamilySpec::Odd { r } => ArcConfig::odd_symmetric(r, eps.clone()),
            FamilySpec::Even { s } => ArcConfig::even_symmetric(s, eps.clone()),
        }
    }

    pub fn family(&self, eps: &Rational) -> Family {
        match *self {
            FamilySpec::OneCut | FamilySpec::Odd { r: 0 } => Family::OneCut { eps: eps.clone() },
            FamilySpec::Odd { r } => Family::OddSymmetric { r, eps: eps.clone() },
            FamilySpec::Even { s } => Family::EvenSymmetric { s, eps: eps.clone() },
        }
    }

    pub fn label(&self) -> String {
        match self {
            FamilySpec::OneCut => "one_cut".into(),
            FamilySpec::Odd { r } => format!("odd_r{r}"),
            FamilySpec::Even { s } => format!("even_s{s}"),
        }
    }
}

impl std::str::FromStr for FamilySpec {
    type Err = ArcError;

    /// Accepts the labels `one_cut`, `odd_r2`, `even_s1` and the short forms `odd2`, `even1`.
    fn from_str(s: &str) -> Result<FamilySpec> {
        let t = s.trim().to_ascii_lowercase().replace('-', "_");
        let bad = || ArcError::InvalidParameter(format!("unknown family {s:?}; use one_cut, odd_rK or even_sK"));
        if t == "one_cut" {
            return Ok(FamilySpec::OneCut);
        }
        let num = |rest: &str, tag: char| -> Result<u32> {
            rest.strip_prefix(tag).unwrap_or(rest).parse().map_err(|_| bad())
        };
        if let Some(rest) = t.strip_prefix("odd_").or_else(|| t.strip_prefix("odd")) {
            return Ok(FamilySpec::Odd { r: num(rest, 'r')? });
        }
        if let Some(rest) = t.strip_prefix("even_").or_else(|| t.strip_prefix("even")) {
            let s = num(rest, 's')?;
            if s == 0 {
                return Err(bad());
            }
            return Ok(FamilySpec::Even { s });
        }
        Err(bad())
    }
}

pub fn parse_eps_list(items: &[String]) -> Result<Vec<Rational>> {
    items.iter().map(|s| parse_rational(s)).collect()
}

/// `0.1, 0.15, ..., 0.9`.
pub fn default_eps_grid() -> Vec<String> {
    (0..17).map(|k| Rational::from((10 + 5 * k, 100)).to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_labels_round_trip() {
        for f in [FamilySpec::OneCut, FamilySpec::Odd { r: 2 }, FamilySpec::Even { s: 3 }] {
            assert_eq!(f.label().parse::<FamilySpec>().unwrap(), f);
        }
        assert_eq!("odd1".parse::<FamilySpec>().unwrap(), FamilySpec::Odd { r: 1 });
        assert_eq!("one-cut".parse::<FamilySpec>().unwrap(), FamilySpec::OneCut);
        assert!("even0".parse::<FamilySpec>().is_err());
        assert!("ring".parse::<FamilySpec>().is_err());
        assert_eq!(FamilySpec::with_intervals(5).unwrap(), FamilySpec::Odd { r: 2 });
    }

    #[test]
    fn grid_shape() {
        let g = default_eps_grid();
        assert_eq!(g.len(), 17);
        assert_eq!(g[0], "1/10");
        assert_eq!(g[16], "9/10");
    }
}
