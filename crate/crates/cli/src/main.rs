//! Command-line front end. Records go to stdout as single `key=value`
//! lines; diagnostics go to stderr.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use num_rational::Rational64;

use satphase::constraint::{classify_threshold, implicates_up_to, ConstraintDistribution};
use satphase::format::{parse_distribution, parse_instance, serialize_instance};
use satphase::harness::{
    estimate_threshold_location, estimate_window_width, format_g, run_sweep, write_csv,
    BisectionOptions, ClauseScaling, Model, SweepConfig,
};
use satphase::hypergraph::{
    c_star_lower_bound, c_star_witness, cs_sparsity_params, deficiency, is_xy_sparse,
    max_deficiency, private_variable_ordering, Hypergraph, Sparsity, SUBSET_MAX_CONSTRAINTS,
};
use satphase::instance::{AppliedConstraint, Instance};
use satphase::solver::{
    brute_force_solve, gauss_solve_xor, Dpll, Heuristic, Method, SolveResult,
};
use satphase::spine::{extract_mus, spine, spine_mus, SpineCertificate, SpineMethod};

#[derive(Parser)]
#[command(name = "satphase", version, about = "Random generalized satisfiability: models, solvers, spines, sweeps")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw a random instance.
    Generate {
        /// `ksat k=3`, `2p p=0.6`, `kxor k=3` or `dist <path>`.
        #[arg(long)]
        model: String,
        #[arg(long)]
        n: usize,
        /// Constraint count; overrides --density.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        #[arg(long, default_value = "linear")]
        scaling: ClauseScaling,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide satisfiability of an instance.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "dpll")]
        method: Method,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, default_value = "lowest")]
        heuristic: Heuristic,
    },
    /// Spine fraction, exact or by the MUS lower bound.
    Spine {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "exact")]
        mode: SpineMethod,
        /// Model distribution; defaults to the instance's templates, uniform.
        #[arg(long)]
        dist: Option<PathBuf>,
        /// Writes each certificate as an instance block.
        #[arg(long)]
        emit_certs: Option<PathBuf>,
    },
    /// Deletion-based minimally unsatisfiable core.
    Mus {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Hypergraph quantities of an instance.
    Analyze {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        cstar: bool,
        /// `r=<p/q>`.
        #[arg(long)]
        deficiency: Option<String>,
        /// `x=<x>,y=<y>`.
        #[arg(long)]
        sparse: Option<String>,
        /// `k=<k>,c=<c>,y=<y>`.
        #[arg(long)]
        cs_bound: Option<String>,
        #[arg(long)]
        private_order: bool,
    },
    /// Monte Carlo sweep to CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `out` of the config; `-` for stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sharp/coarse classification of a distribution file.
    Classify {
        #[arg(long)]
        dist: PathBuf,
    },
    /// Export an instance as DIMACS CNF.
    Dimacs {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Threshold location by bisection, or the window width with --epsilon.
    Threshold {
        #[arg(long)]
        model: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        target: f64,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 0.02)]
        tolerance: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "auto")]
        scaling: ClauseScaling,
    },
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) if p != Path::new("-") => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        _ => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn solve(inst: &Instance, method: Method, budget: Option<u64>, heuristic: Heuristic) -> Result<SolveResult> {
    Ok(match method {
        Method::Dpll => Dpll::new(&inst.to_cnf()).heuristic(heuristic).budget(budget).run().result,
        Method::Gauss => gauss_solve_xor(inst)?,
        Method::Brute => brute_force_solve(&inst.to_cnf())?,
    })
}

fn ratio(r: Rational64) -> String {
    format!("{}/{} ({})", r.numer(), r.denom(), format_g(*r.numer() as f64 / *r.denom() as f64, 6))
}

/// `a=1,b=2` into pairs, in order, checking the key set.
fn params<'a>(spec: &'a str, keys: &[&str]) -> Result<Vec<&'a str>> {
    let mut out = Vec::new();
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != keys.len() {
        bail!("expected {}", keys.iter().map(|k| format!("{}=<v>", k)).collect::<Vec<_>>().join(","));
    }
    for (part, key) in parts.iter().zip(keys) {
        let value = part
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix('='))
            .ok_or_else(|| anyhow!("expected `{}=<value>`, got `{}`", key, part))?;
        out.push(value);
    }
    Ok(out)
}

fn parse_rational(s: &str) -> Result<Rational64> {
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let (p, q): (i64, i64) = (p.trim().parse()?, q.trim().parse()?);
    if q == 0 {
        bail!("zero denominator in `{}`", s);
    }
    Ok(Rational64::new(p, q))
}

/// `Ξ` followed by the offending constraint, whose template is appended.
fn certificate_instance(inst: &Instance, cert: &SpineCertificate) -> Instance {
    let mut sub = inst.subset(&cert.xi);
    sub.templates.push(cert.template.clone());
    sub.constraints.push(AppliedConstraint {
        template: sub.templates.len() - 1,
        vars: cert.vars.clone(),
    });
    sub.meta.clear();
    sub.set_meta("spine_var", (cert.var + 1).to_string());
    sub.set_meta("xi", cert.xi.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(","));
    sub
}

fn vars_list(vars: &[usize]) -> String {
    if vars.is_empty() {
        return "-".into();
    }
    vars.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(",")
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Generate {
            model,
            n,
            m,
            density,
            scaling,
            seed,
            out,
        } => {
            let model = Model::parse(&model, None)?;
            let scaling = model.resolve_scaling(scaling)?;
            let inst = match m {
                // a density that rounds to exactly m under linear scaling
                Some(m) => model.generate(n, m as f64 / n as f64, ClauseScaling::Linear, seed)?,
                None => model.generate(n, density, scaling, seed)?,
            };
            emit(out.as_deref(), &serialize_instance(&inst))
        }
        Cmd::Solve {
            input,
            method,
            budget,
            heuristic,
        } => {
            let inst = read_instance(&input)?;
            println!("{}", solve(&inst, method, budget, heuristic)?.record());
            Ok(())
        }
        Cmd::Spine {
            input,
            mode,
            dist,
            emit_certs,
        } => {
            let inst = read_instance(&input)?;
            let report = match mode {
                SpineMethod::MusLowerBound => spine_mus(&inst)?,
                SpineMethod::ExactDefinition => {
                    let d = match dist {
                        Some(p) => parse_distribution(&fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?)?,
                        None => ConstraintDistribution::uniform(inst.templates.clone())?,
                    };
                    spine(&inst, &d)?
                }
            };
            println!(
                "mode={} n={} size={} fraction={} certificates={} variables={}",
                report.method,
                inst.n,
                report.variables.len(),
                format_g(report.fraction, 6),
                report.certificates.len(),
                vars_list(&report.variables)
            );
            if let Some(path) = emit_certs {
                let text: Vec<String> = report
                    .certificates
                    .iter()
                    .map(|c| serialize_instance(&certificate_instance(&inst, c)))
                    .collect();
                fs::write(&path, text.join("\n")).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(())
        }
        Cmd::Mus { input } => {
            let inst = read_instance(&input)?;
            let mus = extract_mus(&inst)?;
            println!(
                "core_size={} core_vars={} fraction={} constraints={} variables={}",
                mus.sizes.0,
                mus.sizes.1,
                format_g(mus.sizes.1 as f64 / inst.n.max(1) as f64, 6),
                vars_list(&mus.core),
                vars_list(&mus.core_vars)
            );
            Ok(())
        }
        Cmd::Analyze {
            input,
            cstar,
            deficiency: def,
            sparse,
            cs_bound,
            private_order,
        } => {
            let needs_instance = cstar || def.is_some() || sparse.is_some() || private_order;
            let inst = match (&input, needs_instance) {
                (Some(p), _) => Some(read_instance(p)?),
                (None, true) => bail!("--in is required for instance analyses"),
                (None, false) => None,
            };
            if let Some(inst) = &inst {
                if cstar {
                    if inst.len() <= SUBSET_MAX_CONSTRAINTS {
                        let (r, arg) = c_star_witness(inst)?;
                        println!("cstar={} subformula={}", ratio(r), vars_list(&arg));
                    } else {
                        let lb = c_star_lower_bound(inst)?;
                        println!("cstar_lower={} vertices={}", ratio(lb.ratio), vars_list(&lb.vertices));
                    }
                }
                if let Some(spec) = &def {
                    let r = parse_rational(params(spec, &["r"])?[0])?;
                    print!("deficiency={}", ratio(deficiency(inst, r)));
                    if inst.len() <= SUBSET_MAX_CONSTRAINTS {
                        print!(" max_deficiency={}", ratio(max_deficiency(inst, r)?));
                    }
                    println!();
                }
                if let Some(spec) = &sparse {
                    let v = params(spec, &["x", "y"])?;
                    let (x, y): (f64, f64) = (v[0].parse()?, v[1].parse()?);
                    match is_xy_sparse(&Hypergraph::from_instance(inst), x, y) {
                        Sparsity::Sparse => println!("sparse=yes"),
                        Sparsity::NotSparse(w) => println!("sparse=no witness={}", vars_list(&w)),
                        Sparsity::Unknown => println!("sparse=unknown"),
                    }
                }
                if private_order {
                    match private_variable_ordering(inst) {
                        Ok(order) => println!("private_order=yes order={}", vars_list(&order)),
                        Err(stuck) => println!("private_order=no stuck={}", vars_list(&stuck)),
                    }
                }
            }
            if let Some(spec) = &cs_bound {
                let v = params(spec, &["k", "c", "y"])?;
                let p = cs_sparsity_params(v[0].parse()?, v[1].parse()?, v[2].parse()?)?;
                println!(
                    "k={} c={} y={} epsilon={:.12e} x={:.12e} ln_x={:.12e}",
                    p.k, p.c, p.y, p.epsilon, p.x, p.ln_x
                );
            }
            Ok(())
        }
        Cmd::Sweep { config, out } => {
            let cfg = SweepConfig::from_file(&config)?;
            let result = run_sweep(&cfg)?;
            for w in &result.warnings {
                eprintln!("warning: {}", w);
            }
            for r in result.rows.iter().filter(|r| r.gauss_median.is_some()) {
                eprintln!(
                    "n={} density={} gauss_bit_ops_median={}",
                    r.n,
                    format_g(r.density, 6),
                    format_g(r.gauss_median.unwrap_or(f64::NAN), 6)
                );
            }
            match out.or(cfg.out.clone()) {
                Some(p) if p != Path::new("-") => {
                    let f = fs::File::create(&p).with_context(|| format!("creating {}", p.display()))?;
                    write_csv(&result.rows, f)?;
                }
                _ => write_csv(&result.rows, std::io::stdout().lock())?,
            }
            Ok(())
        }
        Cmd::Classify { dist } => {
            let text = fs::read_to_string(&dist).with_context(|| format!("reading {}", dist.display()))?;
            let d = parse_distribution(&text)?;
            let class = classify_threshold(&d)?;
            let witnesses: Vec<String> = class.witness_clauses().iter().map(|c| c.to_string()).collect();
            println!(
                "class={} detail=\"{}\" witness={}",
                class.kind(),
                class,
                if witnesses.is_empty() { "-".into() } else { witnesses.join(";") }
            );
            for (i, t) in d.templates().iter().enumerate() {
                let short: Vec<String> = implicates_up_to(t, 2, true).iter().map(|c| c.to_string()).collect();
                println!("template={} implicates_le2={}", i, if short.is_empty() { "-".into() } else { short.join(";") });
            }
            Ok(())
        }
        Cmd::Dimacs { input, out } => {
            let inst = read_instance(&input)?;
            emit(out.as_deref(), &inst.to_cnf().to_dimacs())
        }
        Cmd::Threshold {
            model,
            n,
            target,
            epsilon,
            tolerance,
            trials,
            seed,
            scaling,
        } => {
            let model = Model::parse(&model, None)?;
            let opts = BisectionOptions {
                trials,
                seed,
                scaling,
                ..Default::default()
            };
            match epsilon {
                Some(eps) => {
                    let w = estimate_window_width(&model, n, eps, tolerance, &opts)?;
                    println!(
                        "width={} c_high_prob={} c_half={} c_low_prob={}",
                        format_g(w.width, 6),
                        format_g(w.c_high_prob, 6),
                        format_g(w.c_half, 6),
                        format_g(w.c_low_prob, 6)
                    );
                }
                None => {
                    let e = estimate_threshold_location(&model, n, target, tolerance, &opts)?;
                    println!(
                        "density={} bracket={},{} probes={} scaling={}",
                        format_g(e.density, 6),
                        format_g(e.bracket.0, 6),
                        format_g(e.bracket.1, 6),
                        e.probes.len(),
                        e.scaling
                    );
                }
            }
            Ok(())
        }
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {:#}", e);
        std::process::exit(1);
    }
}
