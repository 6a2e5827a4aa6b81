use std::fmt;
use std::path::{Path, PathBuf};

use crate::constraint::{
    classify_templates, clause_templates, parity_template, ConstraintDistribution,
    ConstraintTemplate, ThresholdClass,
};
use crate::error::{Error, Result};
use crate::format::parse_distribution;
use crate::instance::{gen_2p_sat, gen_kxorsat, gen_molloy, Instance};

/// A named random model.
#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    KSat { k: usize },
    TwoPlusP { p: f64 },
    KXor { k: usize },
    Dist { path: PathBuf, dist: ConstraintDistribution },
}

/// How a density `c` becomes a constraint count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ClauseScaling {
    /// `√n` for models with a unit implicate, linear otherwise.
    #[default]
    Auto,
    /// `m = round(c·n)`.
    Linear,
    /// `m = round(c·√n)`.
    Sqrt,
}

impl fmt::Display for ClauseScaling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClauseScaling::Auto => "auto",
            ClauseScaling::Linear => "linear",
            ClauseScaling::Sqrt => "sqrt",
        })
    }
}

impl std::str::FromStr for ClauseScaling {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "auto" => Ok(ClauseScaling::Auto),
            "linear" => Ok(ClauseScaling::Linear),
            "sqrt" => Ok(ClauseScaling::Sqrt),
            _ => Err(format!("unknown clause scaling `{}` (auto|linear|sqrt)", s)),
        }
    }
}

impl ClauseScaling {
    /// Rounded half up; never negative.
    pub fn constraint_count(self, density: f64, n: usize) -> usize {
        let base = match self {
            ClauseScaling::Sqrt => (n as f64).sqrt(),
            _ => n as f64,
        };
        (density * base + 0.5).floor().max(0.0) as usize
    }
}

fn parse_param<T: std::str::FromStr>(tok: Option<&str>, key: &str, spec: &str) -> Result<T> {
    let bad = || Error::Config(format!("model `{}`: expected `{}=<value>`", spec, key));
    let tok = tok.ok_or_else(bad)?;
    let value = tok.strip_prefix(key).and_then(|r| r.strip_prefix('=')).ok_or_else(bad)?;
    value.parse().map_err(|_| bad())
}

impl Model {
    /// `ksat k=3`, `2p p=0.6`, `kxor k=3` or `dist <path>`; relative paths
    /// resolve against `base`.
    pub fn parse(spec: &str, base: Option<&Path>) -> Result<Model> {
        let mut toks = spec.split_whitespace();
        let model = match toks.next() {
            Some("ksat") => Model::KSat {
                k: parse_param(toks.next(), "k", spec)?,
            },
            Some("2p") => Model::TwoPlusP {
                p: parse_param(toks.next(), "p", spec)?,
            },
            Some("kxor") => Model::KXor {
                k: parse_param(toks.next(), "k", spec)?,
            },
            Some("dist") => {
                let raw = toks
                    .next()
                    .ok_or_else(|| Error::Config(format!("model `{}`: missing path", spec)))?;
                let path = match base {
                    Some(b) if Path::new(raw).is_relative() => b.join(raw),
                    _ => PathBuf::from(raw),
                };
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Config(format!("{}: {}", path.display(), e)))?;
                Model::Dist {
                    dist: parse_distribution(&text)?,
                    path: PathBuf::from(raw),
                }
            }
            _ => {
                return Err(Error::Config(format!(
                    "unknown model `{}` (ksat k=K | 2p p=P | kxor k=K | dist PATH)",
                    spec
                )))
            }
        };
        if toks.next().is_some() {
            return Err(Error::Config(format!("model `{}`: trailing tokens", spec)));
        }
        model.check()?;
        Ok(model)
    }

    fn check(&self) -> Result<()> {
        match *self {
            Model::KSat { k } | Model::KXor { k } if k == 0 || k > crate::constraint::MAX_ARITY => {
                Err(Error::Config(format!("arity {} out of range 1..=8", k)))
            }
            Model::TwoPlusP { p } if !(0.0..=1.0).contains(&p) => {
                Err(Error::Config(format!("p = {} outside [0, 1]", p)))
            }
            _ => Ok(()),
        }
    }

    pub fn from_distribution(path: impl Into<PathBuf>, dist: ConstraintDistribution) -> Model {
        Model::Dist {
            path: path.into(),
            dist,
        }
    }

    pub fn label(&self) -> String {
        self.to_string()
    }

    /// Support of the model; (2+p)-SAT mixes arities 3 and 2.
    pub fn templates(&self) -> Result<Vec<ConstraintTemplate>> {
        Ok(match self {
            Model::KSat { k } => clause_templates(*k)?,
            Model::TwoPlusP { p } => {
                let mut ts = Vec::new();
                if *p > 0.0 {
                    ts.extend(clause_templates(3)?);
                }
                if *p < 1.0 {
                    ts.extend(clause_templates(2)?);
                }
                ts
            }
            Model::KXor { k } => vec![parity_template(*k, false), parity_template(*k, true)],
            Model::Dist { dist, .. } => dist.templates().to_vec(),
        })
    }

    /// Single-arity distribution, when the model has one.
    pub fn distribution(&self) -> Result<Option<ConstraintDistribution>> {
        Ok(match self {
            Model::TwoPlusP { .. } => None,
            Model::Dist { dist, .. } => Some(dist.clone()),
            _ => Some(ConstraintDistribution::uniform(self.templates()?)?),
        })
    }

    pub fn classify(&self) -> Result<ThresholdClass> {
        classify_templates(&self.templates()?)
    }

    pub fn is_xor(&self) -> bool {
        matches!(self, Model::KXor { .. })
    }

    pub fn min_vars(&self) -> usize {
        match self {
            Model::KSat { k } | Model::KXor { k } => *k,
            Model::TwoPlusP { .. } => 3,
            Model::Dist { dist, .. } => dist.arity(),
        }
    }

    /// `Linear` or `Sqrt`.
    pub fn resolve_scaling(&self, scaling: ClauseScaling) -> Result<ClauseScaling> {
        Ok(match scaling {
            ClauseScaling::Auto => match self.classify()? {
                ThresholdClass::CoarseUnitImplicate { .. } => ClauseScaling::Sqrt,
                _ => ClauseScaling::Linear,
            },
            s => s,
        })
    }

    /// One instance; `scaling` must already be resolved.
    pub fn generate(&self, n: usize, density: f64, scaling: ClauseScaling, seed: u64) -> Result<Instance> {
        let m = scaling.constraint_count(density, n);
        let mut inst = match self {
            Model::KSat { k } => gen_molloy(&ConstraintDistribution::uniform(clause_templates(*k)?)?, n, m, seed)?,
            // gen_2p_sat rounds c·n itself; feed it the density that yields m
            Model::TwoPlusP { p } => gen_2p_sat(*p, m as f64 / n as f64, n, seed)?,
            Model::KXor { k } => gen_kxorsat(*k, n, m, seed)?,
            Model::Dist { dist, .. } => gen_molloy(dist, n, m, seed)?,
        };
        inst.set_meta("generator", self.label());
        inst.set_meta("density", format!("{}", density));
        Ok(inst)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::KSat { k } => write!(f, "ksat k={}", k),
            Model::TwoPlusP { p } => write!(f, "2p p={}", p),
            Model::KXor { k } => write!(f, "kxor k={}", k),
            Model::Dist { path, .. } => write!(f, "dist {}", path.display()),
        }
    }
}
