use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::model::{ClauseScaling, Model};
use crate::error::{Error, Result};
use crate::solver::Heuristic;
use crate::spine::{SpineMethod, EXACT_SPINE_MAX_VARS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SweepKind {
    #[default]
    Sat,
    Spine,
    Tree,
}

impl std::str::FromStr for SweepKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sat" => Ok(SweepKind::Sat),
            "spine" => Ok(SweepKind::Spine),
            "tree" => Ok(SweepKind::Tree),
            _ => Err(format!("unknown sweep `{}` (sat|spine|tree)", s)),
        }
    }
}

impl std::fmt::Display for SweepKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepKind::Sat => "sat",
            SweepKind::Spine => "spine",
            SweepKind::Tree => "tree",
        })
    }
}

/// Which trials enter the order-parameter aggregates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TrialFilter {
    #[default]
    All,
    Unsat,
}

impl std::str::FromStr for TrialFilter {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "all" => Ok(TrialFilter::All),
            "unsat" => Ok(TrialFilter::Unsat),
            _ => Err(format!("unknown trial filter `{}` (all|unsat)", s)),
        }
    }
}

impl std::fmt::Display for TrialFilter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TrialFilter::All => "all",
            TrialFilter::Unsat => "unsat",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub model: Model,
    pub kind: SweepKind,
    pub ns: Vec<usize>,
    /// Strictly increasing.
    pub densities: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// DPLL branch-node limit per trial.
    pub budget: Option<u64>,
    pub spine_mode: SpineMethod,
    pub spine_trials: TrialFilter,
    pub scaling: ClauseScaling,
    /// Heuristic of the tree-size sweep.
    pub heuristic: Heuristic,
    /// Sweep coarse models with a warning instead of refusing them.
    pub allow_coarse: bool,
    pub out: Option<PathBuf>,
}

impl SweepConfig {
    pub fn new(model: Model, kind: SweepKind, ns: Vec<usize>, densities: Vec<f64>, trials: usize, seed: u64) -> Self {
        SweepConfig {
            model,
            kind,
            ns,
            densities,
            trials,
            seed,
            budget: None,
            spine_mode: SpineMethod::MusLowerBound,
            spine_trials: TrialFilter::All,
            scaling: ClauseScaling::Auto,
            heuristic: Heuristic::LowestIndex,
            allow_coarse: true,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.ns.is_empty() || self.densities.is_empty() {
            return Err(Error::Config("empty n or density grid".into()));
        }
        if let Some(&n) = self.ns.iter().find(|&&n| n < self.model.min_vars()) {
            return Err(Error::Config(format!(
                "n = {} is below the model arity {}",
                n,
                self.model.min_vars()
            )));
        }
        if self.densities.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::Config("densities must be finite and non-negative".into()));
        }
        if self.densities.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("densities must be strictly increasing".into()));
        }
        match self.kind {
            SweepKind::Tree if self.budget.is_none() => {
                Err(Error::Config("tree-size sweeps need a budget".into()))
            }
            SweepKind::Spine if self.spine_mode == SpineMethod::ExactDefinition => {
                if self.model.distribution()?.is_none() {
                    return Err(Error::Config(format!(
                        "exact spine needs a single-arity model, got `{}`",
                        self.model
                    )));
                }
                match self.ns.iter().find(|&&n| n > EXACT_SPINE_MAX_VARS) {
                    Some(&n) => Err(Error::TooLarge {
                        what: "exact spine sweep",
                        size: n,
                        cap: EXACT_SPINE_MAX_VARS,
                        hint: "use spine_mode = \"mus\"",
                    }),
                    None => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }

    /// Parses a TOML config. Relative paths resolve against `base`.
    ///
    /// ```text
    /// model = "ksat k=3"          # or "2p p=0.6", "kxor k=3", "dist FILE"
    /// sweep = "sat"               # sat | spine | tree
    /// n = [50, 100]
    /// density = [1.0, 2.0, 3.0]   # or { from = 0.5, to = 5.0, step = 0.25 }
    /// trials = 200
    /// seed = 1
    /// budget = 1000000            # optional; required for tree
    /// spine_mode = "mus"          # mus | exact
    /// spine_trials = "all"        # all | unsat
    /// scaling = "auto"            # auto | linear | sqrt
    /// heuristic = "lowest"        # lowest | maxocc | lookahead
    /// allow_coarse = true
    /// out = "sweep.csv"           # optional
    /// ```
    pub fn parse(text: &str, base: Option<&Path>) -> Result<SweepConfig> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let model = Model::parse(&raw.model, base)?;
        let densities = match raw.density {
            DensityGrid::List(v) => v,
            DensityGrid::Range { from, to, step } => density_range(from, to, step)?,
        };
        let mut cfg = SweepConfig::new(model, word(raw.sweep)?.unwrap_or_default(), raw.n, densities, raw.trials, raw.seed);
        cfg.budget = raw.budget;
        cfg.spine_mode = word(raw.spine_mode)?.unwrap_or(SpineMethod::MusLowerBound);
        cfg.spine_trials = word(raw.spine_trials)?.unwrap_or_default();
        cfg.scaling = word(raw.scaling)?.unwrap_or_default();
        cfg.heuristic = word(raw.heuristic)?.unwrap_or_default();
        cfg.allow_coarse = raw.allow_coarse.unwrap_or(true);
        cfg.out = raw.out.map(|p| match base {
            Some(b) if p.is_relative() => b.join(p),
            _ => p,
        });
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<SweepConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {}", path.display(), e)))?;
        SweepConfig::parse(&text, path.parent())
    }

    /// Normalized `key = value` echo of every parameter.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        let list = |xs: Vec<String>| xs.join(", ");
        writeln!(out, "model = {:?}", self.model.label()).unwrap();
        writeln!(out, "sweep = {:?}", self.kind.to_string()).unwrap();
        writeln!(out, "n = [{}]", list(self.ns.iter().map(|n| n.to_string()).collect())).unwrap();
        writeln!(out, "density = [{}]", list(self.densities.iter().map(|c| format!("{:?}", c)).collect())).unwrap();
        writeln!(out, "trials = {}", self.trials).unwrap();
        writeln!(out, "seed = {}", self.seed).unwrap();
        if let Some(b) = self.budget {
            writeln!(out, "budget = {}", b).unwrap();
        }
        writeln!(out, "spine_mode = {:?}", self.spine_mode.to_string()).unwrap();
        writeln!(out, "spine_trials = {:?}", self.spine_trials.to_string()).unwrap();
        writeln!(out, "scaling = {:?}", self.scaling.to_string()).unwrap();
        writeln!(out, "heuristic = {:?}", heuristic_name(self.heuristic)).unwrap();
        writeln!(out, "allow_coarse = {}", self.allow_coarse).unwrap();
        out
    }
}

fn word<T: std::str::FromStr<Err = String>>(v: Option<String>) -> Result<Option<T>> {
    v.map(|s| s.parse().map_err(Error::Config)).transpose()
}

fn heuristic_name(h: Heuristic) -> &'static str {
    match h {
        Heuristic::LowestIndex => "lowest",
        Heuristic::MaxOccurrence => "maxocc",
        Heuristic::Lookahead => "lookahead",
    }
}

/// `from, from + step, …` up to `to` inclusive, each point computed as
/// `from + i·step` and rounded to 12 significant digits.
pub fn density_range(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !from.is_finite() || !to.is_finite() || to < from {
        return Err(Error::Config(format!("bad density range {}..{} step {}", from, to, step)));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(Error::Config(format!("density range has {} points", count)));
    }
    Ok((0..count)
        .map(|i| {
            let c = from + i as f64 * step;
            format!("{:.11e}", c).parse().expect("float")
        })
        .collect())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: String,
    sweep: Option<String>,
    n: Vec<usize>,
    density: DensityGrid,
    trials: usize,
    seed: u64,
    budget: Option<u64>,
    spine_mode: Option<String>,
    spine_trials: Option<String>,
    scaling: Option<String>,
    heuristic: Option<String>,
    allow_coarse: Option<bool>,
    out: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DensityGrid {
    List(Vec<f64>),
    Range { from: f64, to: f64, step: f64 },
}
