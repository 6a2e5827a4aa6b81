use std::io::Write;

use rayon::prelude::*;

use super::config::{SweepConfig, SweepKind, TrialFilter};
use super::model::{ClauseScaling, Model};
use crate::constraint::{ConstraintDistribution, ThresholdClass};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rng::mix;
use crate::solver::{gauss_solve_xor_counted, Dpll, Heuristic, Status};
use crate::spine::{spine, spine_mus, SpineMethod};

/// Seed of trial `trial` at grid point `(n, density_index)`.
pub fn trial_seed(master: u64, n: usize, density_index: usize, trial: usize) -> u64 {
    mix(&[master, n as u64, density_index as u64, trial as u64])
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trial {
    pub seed: u64,
    pub status: Status,
    /// Spine or MUS-variable fraction.
    pub spine: Option<f64>,
    pub tree_size: Option<u64>,
    /// Gaussian-elimination bit operations (XOR models).
    pub gauss_ops: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub model: String,
    pub n: usize,
    pub density: f64,
    pub trials: usize,
    pub sat_count: usize,
    pub sat_prob: f64,
    pub spine_mode: Option<SpineMethod>,
    pub spine_mean: Option<f64>,
    pub spine_median: Option<f64>,
    pub tree_median: Option<f64>,
    pub budget_exceeded: usize,
    pub seed: u64,
    /// Median Gaussian-elimination bit operations on unsatisfiable trials.
    pub gauss_median: Option<f64>,
    /// More than half of the trials exhausted the budget.
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub warnings: Vec<String>,
}

/// Median; the mean of the middle pair for even lengths.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let h = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[h] } else { (v[h - 1] + v[h]) / 2.0 })
}

pub fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Refuses trivially satisfiable models; coarse ones pass with a warning
/// unless `allow_coarse` is off.
pub fn precheck(model: &Model, allow_coarse: bool) -> Result<Option<String>> {
    let class = model.classify()?;
    match class {
        ThresholdClass::TriviallySatisfiable => Err(Error::Config(format!(
            "model `{}` is trivially satisfiable (a constant assignment satisfies every template); \
             nothing to sweep",
            model
        ))),
        c if c.is_coarse() && !allow_coarse => Err(Error::Config(format!(
            "model `{}` has a coarse threshold ({}); set allow_coarse to sweep it anyway",
            model, c
        ))),
        c if c.is_coarse() => Ok(Some(format!("model `{}` has a coarse threshold ({})", model, c))),
        _ => Ok(None),
    }
}

fn status_of(model: &Model, inst: &Instance, budget: Option<u64>) -> Result<(Status, Option<u64>)> {
    if model.is_xor() {
        let run = gauss_solve_xor_counted(inst)?;
        return Ok((run.result.status, Some(run.bit_ops)));
    }
    let r = Dpll::new(&inst.to_cnf())
        .heuristic(Heuristic::Lookahead)
        .budget(budget)
        .run()
        .result;
    Ok((r.status, None))
}

struct Plan<'a> {
    cfg: &'a SweepConfig,
    kind: SweepKind,
    scaling: ClauseScaling,
    dist: Option<ConstraintDistribution>,
}

impl Plan<'_> {
    fn trial(&self, n: usize, di: usize, t: usize) -> Result<Trial> {
        let cfg = self.cfg;
        let seed = trial_seed(cfg.seed, n, di, t);
        let inst = cfg.model.generate(n, cfg.densities[di], self.scaling, seed)?;
        let mut trial = Trial {
            seed,
            status: Status::BudgetExceeded,
            spine: None,
            tree_size: None,
            gauss_ops: None,
        };
        match self.kind {
            SweepKind::Sat => trial.status = status_of(&cfg.model, &inst, cfg.budget)?.0,
            SweepKind::Spine => {
                trial.status = status_of(&cfg.model, &inst, cfg.budget)?.0;
                trial.spine = match (cfg.spine_mode, trial.status) {
                    (SpineMethod::ExactDefinition, _) => {
                        Some(spine(&inst, self.dist.as_ref().expect("validated"))?.fraction)
                    }
                    (SpineMethod::MusLowerBound, Status::Unsat) => Some(spine_mus(&inst)?.fraction),
                    (SpineMethod::MusLowerBound, Status::Sat) => Some(0.0),
                    (SpineMethod::MusLowerBound, Status::BudgetExceeded) => None,
                };
            }
            SweepKind::Tree => {
                let r = Dpll::new(&inst.to_cnf())
                    .heuristic(cfg.heuristic)
                    .budget(cfg.budget)
                    .run()
                    .result;
                trial.tree_size = Some(r.tree_size);
                trial.status = r.status;
                if cfg.model.is_xor() {
                    let g = gauss_solve_xor_counted(&inst)?;
                    trial.gauss_ops = Some(g.bit_ops);
                    trial.status = match (g.result.status, r.status) {
                        (s, Status::BudgetExceeded) if s == Status::Unsat => Status::BudgetExceeded,
                        (s, _) => s,
                    };
                }
            }
        }
        Ok(trial)
    }

    fn row(&self, n: usize, di: usize, trials: &[Trial]) -> SweepRow {
        let cfg = self.cfg;
        let total = trials.len();
        let sat_count = trials.iter().filter(|t| t.status == Status::Sat).count();
        let budget_exceeded = trials.iter().filter(|t| t.status == Status::BudgetExceeded).count();
        let spines: Vec<f64> = trials
            .iter()
            .filter(|t| cfg.spine_trials == TrialFilter::All || t.status == Status::Unsat)
            .filter_map(|t| t.spine)
            .collect();
        // budget-exceeded runs enter censored at the budget
        let hard: Vec<&Trial> = trials.iter().filter(|t| t.status != Status::Sat).collect();
        let trees: Vec<f64> = hard.iter().filter_map(|t| t.tree_size.map(|x| x as f64)).collect();
        let gauss: Vec<f64> = hard.iter().filter_map(|t| t.gauss_ops.map(|x| x as f64)).collect();
        let spine_mode = (self.kind == SweepKind::Spine).then_some(cfg.spine_mode);
        SweepRow {
            model: cfg.model.label(),
            n,
            density: cfg.densities[di],
            trials: total,
            sat_count,
            sat_prob: sat_count as f64 / total as f64,
            spine_mode,
            spine_mean: mean(&spines),
            spine_median: median(&spines),
            tree_median: median(&trees),
            budget_exceeded,
            seed: cfg.seed,
            gauss_median: median(&gauss),
            flagged: 2 * budget_exceeded > total,
        }
    }
}

/// Runs the sweep named by `cfg.kind`. Trials run in parallel; rows come
/// back in grid order (`n` outer, density inner).
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let mut warnings: Vec<String> = precheck(&cfg.model, cfg.allow_coarse)?.into_iter().collect();
    let scaling = cfg.model.resolve_scaling(cfg.scaling)?;
    if scaling == ClauseScaling::Sqrt && cfg.scaling == ClauseScaling::Auto {
        warnings.push("unit-implicate model: constraint counts scale as c·√n".into());
    }
    let plan = Plan {
        cfg,
        kind: cfg.kind,
        scaling,
        dist: cfg.model.distribution()?,
    };
    let mut rows = Vec::with_capacity(cfg.ns.len() * cfg.densities.len());
    for &n in &cfg.ns {
        for di in 0..cfg.densities.len() {
            let trials = (0..cfg.trials)
                .into_par_iter()
                .map(|t| plan.trial(n, di, t))
                .collect::<Result<Vec<_>>>()?;
            let row = plan.row(n, di, &trials);
            if row.flagged {
                warnings.push(format!(
                    "n={} density={}: {} of {} trials exceeded the budget",
                    n, row.density, row.budget_exceeded, row.trials
                ));
            }
            rows.push(row);
        }
    }
    Ok(SweepOutput { rows, warnings })
}

/// Single trial of a sweep, for re-execution.
pub fn rerun_trial(cfg: &SweepConfig, n: usize, density_index: usize, trial: usize) -> Result<Trial> {
    cfg.validate()?;
    let plan = Plan {
        cfg,
        kind: cfg.kind,
        scaling: cfg.model.resolve_scaling(cfg.scaling)?,
        dist: cfg.model.distribution()?,
    };
    plan.trial(n, density_index, trial)
}

fn with_kind(cfg: &SweepConfig, kind: SweepKind) -> SweepConfig {
    SweepConfig { kind, ..cfg.clone() }
}

/// Satisfiability probability per grid point.
pub fn sweep_sat_probability(cfg: &SweepConfig) -> Result<SweepOutput> {
    run_sweep(&with_kind(cfg, SweepKind::Sat))
}

/// Spine fraction (exact) or MUS-variable fraction (lower bound; 0 for
/// satisfiable trials) per grid point.
pub fn sweep_spine_fraction(cfg: &SweepConfig) -> Result<SweepOutput> {
    run_sweep(&with_kind(cfg, SweepKind::Spine))
}

/// Median DPLL tree size over unsatisfiable trials; XOR models also report
/// Gaussian-elimination bit operations.
pub fn sweep_tree_size(cfg: &SweepConfig) -> Result<SweepOutput> {
    run_sweep(&with_kind(cfg, SweepKind::Tree))
}

/// Order parameter on the first `count` unsatisfiable trials at one point,
/// in trial order. Fails after `max_attempts` trials.
pub fn unsat_order_parameter(
    model: &Model,
    n: usize,
    density: f64,
    count: usize,
    seed: u64,
    mode: SpineMethod,
    max_attempts: usize,
) -> Result<Vec<f64>> {
    let scaling = model.resolve_scaling(ClauseScaling::Auto)?;
    let dist = model.distribution()?;
    let mut out = Vec::with_capacity(count);
    let mut t = 0;
    while out.len() < count {
        if t == max_attempts {
            return Err(Error::BudgetExceeded("too few unsatisfiable trials"));
        }
        let chunk: Vec<usize> = (t..(t + 64).min(max_attempts)).collect();
        t += chunk.len();
        let fractions = chunk
            .into_par_iter()
            .map(|i| -> Result<Option<f64>> {
                let inst = model.generate(n, density, scaling, trial_seed(seed, n, 0, i))?;
                if status_of(model, &inst, None)?.0 != Status::Unsat {
                    return Ok(None);
                }
                Ok(Some(match mode {
                    SpineMethod::MusLowerBound => spine_mus(&inst)?.fraction,
                    SpineMethod::ExactDefinition => {
                        let d = dist.as_ref().ok_or(Error::Config("exact spine needs a single-arity model".into()))?;
                        spine(&inst, d)?.fraction
                    }
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        out.extend(fractions.into_iter().flatten());
    }
    out.truncate(count);
    Ok(out)
}

/// Adjacent densities at fixed `n` whose satisfiability probability rises
/// by more than three pooled binomial standard deviations.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityViolation {
    pub n: usize,
    pub densities: (f64, f64),
    pub sat_probs: (f64, f64),
}

pub fn check_monotone(rows: &[SweepRow]) -> Vec<MonotonicityViolation> {
    let mut out = Vec::new();
    for w in rows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.n != b.n || a.model != b.model || b.density <= a.density {
            continue;
        }
        let pooled = (a.sat_count + b.sat_count) as f64 / (a.trials + b.trials) as f64;
        let sigma = (pooled * (1.0 - pooled) * (1.0 / a.trials as f64 + 1.0 / b.trials as f64)).sqrt();
        if b.sat_prob - a.sat_prob > 3.0 * sigma && b.sat_prob > a.sat_prob {
            out.push(MonotonicityViolation {
                n: a.n,
                densities: (a.density, b.density),
                sat_probs: (a.sat_prob, b.sat_prob),
            });
        }
    }
    out
}

/// Rows with median spine fraction at least `delta` but satisfiability
/// probability above `max_sat_prob`.
pub fn check_spine_implies_unsat(rows: &[SweepRow], delta: f64, max_sat_prob: f64) -> Vec<usize> {
    rows.iter()
        .enumerate()
        .filter(|(_, r)| r.spine_median.map_or(false, |m| m >= delta) && r.sat_prob > max_sat_prob)
        .map(|(i, _)| i)
        .collect()
}

pub const CSV_COLUMNS: [&str; 12] = [
    "model",
    "n",
    "density",
    "trials",
    "sat_count",
    "sat_prob",
    "spine_mode",
    "spine_mean",
    "spine_median",
    "tree_median",
    "budget_exceeded",
    "seed",
];

/// C `%.{digits}g`.
pub fn format_g(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let p = digits.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -4 || exp >= p as i32 {
        format!("{}e{}{:02}", trim(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        trim(&format!("{:.*}", (p as i32 - 1 - exp) as usize, x))
    }
}

fn opt_g(x: Option<f64>) -> String {
    x.map(|v| format_g(v, 6)).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Config(format!("csv: {}", e));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for r in rows {
        w.write_record([
            r.model.clone(),
            r.n.to_string(),
            format_g(r.density, 6),
            r.trials.to_string(),
            r.sat_count.to_string(),
            format_g(r.sat_prob, 6),
            r.spine_mode.map(|m| m.to_string()).unwrap_or_default(),
            opt_g(r.spine_mean),
            opt_g(r.spine_median),
            opt_g(r.tree_median),
            r.budget_exceeded.to_string(),
            r.seed.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Config(format!("csv: {}", e)))?;
    Ok(())
}

pub fn csv_string(rows: &[SweepRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("in-memory write");
    String::from_utf8(buf).expect("utf-8")
}
