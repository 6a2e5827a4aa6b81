use rayon::prelude::*;

use super::model::{ClauseScaling, Model};
use super::sweep::precheck;
use crate::constraint::ThresholdClass;
use crate::error::{Error, Result};
use crate::rng::mix;
use crate::solver::{gauss_solve_xor, Dpll, Heuristic, Status};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BisectionOptions {
    pub trials: usize,
    pub seed: u64,
    pub z: f64,
    pub scaling: ClauseScaling,
    pub budget: Option<u64>,
    /// Initial bracket; by default `[0, 1]`, doubling the upper end while
    /// the probability there is not significantly below target.
    pub bracket: Option<(f64, f64)>,
    pub max_density: f64,
    /// Fresh-seed repeats of a probe that contradicts monotonicity.
    pub max_retries: u32,
}

impl Default for BisectionOptions {
    fn default() -> Self {
        BisectionOptions {
            trials: 200,
            seed: 0,
            z: Z95,
            scaling: ClauseScaling::Auto,
            budget: None,
            bracket: None,
            max_density: 64.0,
            max_retries: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Probe {
    pub density: f64,
    pub sat_count: usize,
    pub trials: usize,
    pub interval: (f64, f64),
    pub retry: u32,
}

impl Probe {
    pub fn sat_prob(&self) -> f64 {
        self.sat_count as f64 / self.trials as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdEstimate {
    pub density: f64,
    /// Final bracket.
    pub bracket: (f64, f64),
    pub scaling: ClauseScaling,
    pub probes: Vec<Probe>,
}

struct Prober<'a> {
    model: &'a Model,
    n: usize,
    scaling: ClauseScaling,
    opts: &'a BisectionOptions,
    probes: Vec<Probe>,
}

impl Prober<'_> {
    /// Trials at one density share seeds across calls (common random numbers).
    fn probe(&mut self, density: f64, retry: u32) -> Result<Probe> {
        let o = self.opts;
        let sats = (0..o.trials)
            .into_par_iter()
            .map(|t| -> Result<Status> {
                let seed = mix(&[o.seed, self.n as u64, density.to_bits(), retry as u64, t as u64]);
                let inst = self.model.generate(self.n, density, self.scaling, seed)?;
                Ok(if self.model.is_xor() {
                    gauss_solve_xor(&inst)?.status
                } else {
                    Dpll::new(&inst.to_cnf())
                        .heuristic(Heuristic::Lookahead)
                        .budget(o.budget)
                        .run()
                        .result
                        .status
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if sats.contains(&Status::BudgetExceeded) {
            return Err(Error::Threshold(format!(
                "solver budget exhausted at density {} (n = {})",
                density, self.n
            )));
        }
        let sat_count = sats.iter().filter(|&&s| s == Status::Sat).count();
        let p = Probe {
            density,
            sat_count,
            trials: o.trials,
            interval: wilson_interval(sat_count, o.trials, o.z),
            retry,
        };
        self.probes.push(p.clone());
        Ok(p)
    }

    fn diagnostics(&self) -> String {
        self.probes
            .iter()
            .map(|p| format!("c={} p={:.3} retry={}", p.density, p.sat_prob(), p.retry))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Far enough outside the bracket ends to contradict monotonicity.
fn contradicts(mid: &Probe, lo: &Probe, hi: &Probe) -> bool {
    let sd = |a: &Probe, b: &Probe| {
        let pooled = (a.sat_count + b.sat_count) as f64 / (a.trials + b.trials) as f64;
        (pooled * (1.0 - pooled) * (1.0 / a.trials as f64 + 1.0 / b.trials as f64)).sqrt()
    };
    mid.sat_prob() - lo.sat_prob() > 3.0 * sd(mid, lo) || hi.sat_prob() - mid.sat_prob() > 3.0 * sd(mid, hi)
}

/// Density at which the satisfiability probability crosses `target`.
///
/// Bisects while the Wilson interval at the midpoint excludes `target`;
/// stops at the first midpoint whose interval contains it, or when the
/// bracket is narrower than `tolerance`, and returns that midpoint.
pub fn estimate_threshold_location(
    model: &Model,
    n: usize,
    target: f64,
    tolerance: f64,
    opts: &BisectionOptions,
) -> Result<ThresholdEstimate> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::Threshold(format!("target probability {} outside (0, 1)", target)));
    }
    if !(tolerance > 0.0) || opts.trials == 0 {
        return Err(Error::Threshold("tolerance and trials must be positive".into()));
    }
    precheck(model, true)?;
    let class = model.classify()?;
    if opts.scaling == ClauseScaling::Linear && matches!(class, ThresholdClass::CoarseUnitImplicate { .. }) {
        return Err(Error::Threshold(format!(
            "model `{}` has a unit implicate ({}): at linear densities the probability collapses \
             within O(1/√n); use sqrt clause scaling for a window sweep",
            model, class
        )));
    }
    let scaling = model.resolve_scaling(opts.scaling)?;
    let mut pr = Prober {
        model,
        n,
        scaling,
        opts,
        probes: Vec::new(),
    };

    let (lo_c, mut hi_c) = opts.bracket.unwrap_or((0.0, 1.0));
    if !(lo_c >= 0.0 && hi_c > lo_c) {
        return Err(Error::Threshold(format!("bad bracket ({}, {})", lo_c, hi_c)));
    }
    let mut lo = pr.probe(lo_c, 0)?;
    if lo.interval.0 <= target {
        return Err(Error::Threshold(format!(
            "unbracketed: probability at density {} is not above {} ({})",
            lo_c,
            target,
            pr.diagnostics()
        )));
    }
    let mut hi = pr.probe(hi_c, 0)?;
    while hi.interval.1 >= target {
        if opts.bracket.is_some() || hi_c * 2.0 > opts.max_density {
            return Err(Error::Threshold(format!(
                "unbracketed: probability stays at or above {} up to density {} ({})",
                target,
                hi_c,
                pr.diagnostics()
            )));
        }
        lo = hi;
        hi_c *= 2.0;
        hi = pr.probe(hi_c, 0)?;
    }

    loop {
        let mid_c = (lo.density + hi.density) / 2.0;
        if hi.density - lo.density < tolerance {
            return Ok(ThresholdEstimate {
                density: mid_c,
                bracket: (lo.density, hi.density),
                scaling,
                probes: pr.probes,
            });
        }
        let mut mid = pr.probe(mid_c, 0)?;
        let mut retry = 0;
        while contradicts(&mid, &lo, &hi) {
            retry += 1;
            if retry > opts.max_retries {
                return Err(Error::Threshold(format!(
                    "non-monotone probabilities around density {} after {} retries ({})",
                    mid_c,
                    opts.max_retries,
                    pr.diagnostics()
                )));
            }
            mid = pr.probe(mid_c, retry)?;
        }
        if mid.interval.0 <= target && target <= mid.interval.1 {
            return Ok(ThresholdEstimate {
                density: mid_c,
                bracket: (lo.density, hi.density),
                scaling,
                probes: pr.probes,
            });
        }
        if mid.interval.0 > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindowEstimate {
    /// `(c_ε − c_{1−ε}) / c_{1/2}`, non-negative up to noise.
    pub width: f64,
    /// Densities where the probability is `1 − ε`, `1/2` and `ε`.
    pub c_high_prob: f64,
    pub c_half: f64,
    pub c_low_prob: f64,
}

/// Normalized transition window. `epsilon = 1/2` gives width 0.
pub fn estimate_window_width(
    model: &Model,
    n: usize,
    epsilon: f64,
    tolerance: f64,
    opts: &BisectionOptions,
) -> Result<WindowEstimate> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::Threshold(format!("epsilon {} outside (0, 1/2)", epsilon)));
    }
    let at = |q: f64| estimate_threshold_location(model, n, q, tolerance, opts).map(|e| e.density);
    let c_half = at(0.5)?;
    let (c_high_prob, c_low_prob) = if epsilon == 0.5 {
        (c_half, c_half)
    } else {
        (at(1.0 - epsilon)?, at(epsilon)?)
    };
    Ok(WindowEstimate {
        width: (c_low_prob - c_high_prob) / c_half,
        c_high_prob,
        c_half,
        c_low_prob,
    })
}
