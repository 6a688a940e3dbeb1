//! Subcommand implementations. Each returns the artifact text and whether
//! every check it ran passed.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Result};
use srrw_core::elephant::{cycle_distribution, decay_grid, lambda_bounds_check, lambda_table};
use srrw_core::estimators::{mc_ball_curve, mc_histogram, mc_point_mass_curve, Estimate, Route};
use srrw_core::evolving::{evolving_trace, iso_profile_table, kernel_seq_from_forest, ElementSet, ProfileStatus, SearchScope, DEFAULT_SET_CAP};
use srrw_core::forest::{assign_and_assemble, grow};
use srrw_core::oracle::{exact_distribution_rational, exact_distribution_with, rational_to_f64, Enumeration, OracleOptions, DEFAULT_CAP};
use srrw_core::rng::derive_key;
use srrw_core::StreamRng;

use crate::args::{Cli, Command, EvosetCommand, ExactArgs, PolyArgs, PolyCommand, ProfileArgs, SimulateArgs, TraceArgs, VerifyArgs, WalkArgs};
use crate::config::{field_error, parse_group, parse_step_law, pick, require, resolve_walk, FileConfig, Resolved, WalkParams};
use crate::output::{emit, Table, VERSION};
use crate::suites;

pub const THREADS_ENV: &str = "SRRW_THREADS";

/// Runs one invocation and writes its artifact. Returns `Ok(false)` when a
/// check inside the run failed.
pub fn run(cli: Cli) -> Result<bool> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let threads = match pick(cli.threads, file.threads) {
        Some(t) => Some(t),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse().map_err(|e| field_error("threads", &v, e))?),
            Err(_) => None,
        },
    };
    let out = cli.out.clone().or_else(|| file.out.as_ref().map(PathBuf::from));
    let (text, ok) = with_threads(threads, || dispatch(&cli.command, &file))??;
    emit(out.as_deref(), &text)?;
    Ok(ok)
}

/// Runs `f` inside a pool of `threads` workers, or the default pool size.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == Some(0) {
        bail!("invalid value for field `threads`: must be positive");
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.unwrap_or(0)).build()?;
    Ok(pool.install(f))
}

pub fn dispatch(command: &Command, file: &FileConfig) -> Result<(String, bool)> {
    match command {
        Command::Simulate(a) => Ok((simulate(a, file)?.1, true)),
        Command::Exact(a) => Ok((exact(a, file)?, true)),
        Command::Poly { command } => match command {
            PolyCommand::Lambda(a) => poly_lambda(a, file),
            PolyCommand::Decay(a) => poly_decay(a, file),
            PolyCommand::Cycle(a) => Ok((poly_cycle(a, file)?, true)),
        },
        Command::Evoset { command } => match command {
            EvosetCommand::Trace(a) => Ok((evoset_trace(a, file)?, true)),
            EvosetCommand::Profile(a) => Ok((evoset_profile(a, file)?, true)),
        },
        Command::Verify(a) => verify(a, file),
    }
}

fn walk_params<'a>(a: &'a WalkArgs, f: &'a FileConfig) -> WalkParams<'a> {
    WalkParams {
        group: pick(a.group.as_deref(), f.group.as_deref()),
        alpha: pick(a.alpha, f.alpha),
        mu: pick(a.mu.as_deref(), f.mu.as_deref()),
        transform: pick(a.transform.as_deref(), f.transform.as_deref()),
    }
}

fn horizons(flag: &[usize], file: &FileConfig) -> Result<Vec<usize>> {
    let ns = if flag.is_empty() { file.n.clone().map(|n| n.into_vec()) } else { Some(flag.to_vec()) };
    let ns = require(ns, "n")?;
    if ns.is_empty() || ns[0] == 0 || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(field_error("n", &format!("{ns:?}"), "horizons must be positive and strictly increasing"));
    }
    Ok(ns)
}

fn estimate_row(n: usize, e: &Estimate) -> Vec<String> {
    vec![n.to_string(), e.mean.to_string(), e.stderr.to_string(), e.ci95.0.to_string(), e.ci95.1.to_string(), e.trials.to_string()]
}

/// Columns `n,estimate,stderr,lo,hi,trials`.
pub fn simulate(a: &SimulateArgs, f: &FileConfig) -> Result<(Vec<Estimate>, String)> {
    let mut r = Resolved::default();
    r.set("command", "simulate");
    let config = resolve_walk(walk_params(&a.walk, f), &mut r)?;
    let ns = horizons(&a.n, f)?;
    let trials = pick(a.trials, f.trials).unwrap_or(100_000);
    let seed = pick(a.seed, f.seed).unwrap_or(1);
    let route_text = pick(a.route.as_deref(), f.route.as_deref()).unwrap_or("direct");
    let route = match route_text {
        "direct" => Route::Direct,
        "forest" => Route::Forest,
        other => return Err(field_error("route", other, "expected direct or forest")),
    };
    r.set("n", format!("{ns:?}"));
    r.set("trials", trials);
    r.set("seed", seed);
    r.set("route", route_text);
    let estimates = match pick(a.ball_r, f.ball_r) {
        Some(radius) => {
            if route == Route::Forest {
                return Err(field_error("route", route_text, "ball probabilities use the direct route"));
            }
            r.set("ball_r", radius);
            mc_ball_curve(&config, &ns, radius, trials, seed)?
        }
        None => {
            let target = match pick(a.target.as_deref(), f.target.as_deref()) {
                Some(t) => config.group.parse_element(t).map_err(|e| field_error("target", t, e))?,
                None => config.group.identity(),
            };
            r.set("target", config.group.format_element(&target));
            match route {
                Route::Direct => mc_point_mass_curve(&config, &ns, &target, trials, seed)?,
                Route::Forest => {
                    let key = target.canonical_key();
                    ns.iter()
                        .enumerate()
                        .map(|(i, &n)| {
                            let h = mc_histogram(&config, n, trials, derive_key(seed, i as u64), Route::Forest, 1.0)?;
                            Ok(Estimate::proportion(h.counts.get(&key).copied().unwrap_or(0), trials))
                        })
                        .collect::<Result<_>>()?
                }
            }
        }
    };
    let mut table = Table::new(&["n", "estimate", "stderr", "lo", "hi", "trials"]);
    for (n, e) in ns.iter().zip(&estimates) {
        table.push(estimate_row(*n, e));
    }
    let text = table.to_csv(&r)?;
    Ok((estimates, text))
}

/// Columns `key,probability`, plus `rational` with `--rational`.
pub fn exact(a: &ExactArgs, f: &FileConfig) -> Result<String> {
    let mut r = Resolved::default();
    r.set("command", "exact");
    let config = resolve_walk(walk_params(&a.walk, f), &mut r)?;
    let n = require(pick(a.n, f.n.clone().and_then(|n| n.into_vec().first().copied())), "n")?;
    let cap = pick(a.cap, f.cap).unwrap_or(DEFAULT_CAP);
    let rational = a.rational || f.rational.unwrap_or(false);
    let enum_text = pick(a.enumeration.as_deref(), f.enumeration.as_deref()).unwrap_or("auto");
    let enumeration = match enum_text {
        "auto" => Enumeration::Auto,
        "tree" => Enumeration::Tree,
        "counts" => Enumeration::Counts,
        other => return Err(field_error("enumeration", other, "expected auto, tree or counts")),
    };
    r.set("n", n);
    r.set("cap", cap);
    r.set("rational", rational);
    r.set("enumeration", enum_text);
    let table = if rational {
        let mut t = Table::new(&["key", "probability", "rational"]);
        let law = exact_distribution_rational(&config, n)?;
        let floats = rational_to_f64(&law);
        for (k, q) in &law {
            t.push(vec![k.to_string(), floats[k].to_string(), q.to_string()]);
        }
        t
    } else {
        let d = exact_distribution_with(&config, n, &OracleOptions { cap, enumeration })?;
        let mut t = Table::new(&["key", "probability"]);
        for (k, p) in &d.mass {
            t.push(vec![k.to_string(), p.to_string()]);
        }
        t
    };
    table.to_csv(&r)
}

fn poly_resolved(command: &str, a: &PolyArgs, f: &FileConfig) -> Result<(Resolved, f64)> {
    let mut r = Resolved::default();
    r.set("command", command);
    let alpha = require(pick(a.alpha, f.alpha), "alpha")?;
    r.set("alpha", alpha);
    Ok((r, alpha))
}

/// Columns `n,k,lambda,lower,upper,pass`.
pub fn poly_lambda(a: &PolyArgs, f: &FileConfig) -> Result<(String, bool)> {
    let (mut r, alpha) = poly_resolved("poly lambda", a, f)?;
    let nmax = require(pick(a.nmax, f.nmax), "nmax")?;
    r.set("nmax", nmax);
    let table = lambda_table(alpha, nmax).map_err(|e| field_error("alpha/nmax", &format!("{alpha}/{nmax}"), e))?;
    let mut t = Table::new(&["n", "k", "lambda", "lower", "upper", "pass"]);
    let mut ok = true;
    for n in 1..=nmax {
        for k in 0..=n / 2 {
            let rep = lambda_bounds_check(&table, n, k)?;
            ok &= rep.pass;
            t.push(vec![n.to_string(), k.to_string(), rep.lambda.to_string(), rep.lower.to_string(), rep.upper.to_string(), rep.pass.to_string()]);
        }
    }
    Ok((t.to_csv(&r)?, ok))
}

pub fn default_decay_points() -> Vec<f64> {
    (1..=9).flat_map(|i| [-(i as f64) / 10.0, i as f64 / 10.0]).collect()
}

/// Columns `n,x,value,bound,pass`.
pub fn poly_decay(a: &PolyArgs, f: &FileConfig) -> Result<(String, bool)> {
    let (mut r, alpha) = poly_resolved("poly decay", a, f)?;
    let nmax = require(pick(a.nmax, f.nmax), "nmax")?;
    let xs = if a.x.is_empty() { f.x.clone().map(|x| x.into_vec()).unwrap_or_else(default_decay_points) } else { a.x.clone() };
    r.set("nmax", nmax);
    r.set("x", format!("{xs:?}"));
    let grid = decay_grid(alpha, nmax, &xs).map_err(|e| field_error("alpha/x", &format!("{alpha}/{xs:?}"), e))?;
    let mut t = Table::new(&["n", "x", "value", "bound", "pass"]);
    for d in &grid {
        t.push(vec![d.n.to_string(), d.x.to_string(), d.value.to_string(), d.bound.to_string(), d.pass.to_string()]);
    }
    Ok((t.to_csv(&r)?, grid.iter().all(|d| d.pass)))
}

/// Columns `m,probability` for `P(S_n = m)` on `Z_L`.
pub fn poly_cycle(a: &PolyArgs, f: &FileConfig) -> Result<String> {
    let (mut r, alpha) = poly_resolved("poly cycle", a, f)?;
    let l = require(pick(a.l, f.l), "l")?;
    let n = require(pick(a.n, f.n.clone().and_then(|n| n.into_vec().first().copied())), "n")?;
    r.set("l", l);
    r.set("n", n);
    let law = cycle_distribution(alpha, l, n).map_err(|e| field_error("l", &l.to_string(), e))?;
    let mut t = Table::new(&["m", "probability"]);
    for (m, p) in law.iter().enumerate() {
        t.push(vec![m.to_string(), p.to_string()]);
    }
    t.to_csv(&r)
}

/// Columns `j,size`.
pub fn evoset_trace(a: &TraceArgs, f: &FileConfig) -> Result<String> {
    let mut r = Resolved::default();
    r.set("command", "evoset trace");
    let config = resolve_walk(walk_params(&a.walk, f), &mut r)?;
    let n = require(pick(a.n, f.n.clone().and_then(|n| n.into_vec().first().copied())), "n")?;
    let seed = pick(a.seed, f.seed).unwrap_or(1);
    let doob = a.doob || f.doob.unwrap_or(false);
    let start = match pick(a.start.as_deref(), f.start.as_deref()) {
        Some(t) => config.group.parse_element(t).map_err(|e| field_error("start", t, e))?,
        None => config.group.identity(),
    };
    r.set("n", n);
    r.set("seed", seed);
    r.set("doob", doob);
    r.set("start", config.group.format_element(&start));
    let mu = config.mu.as_discrete().ok_or_else(|| field_error("mu", &r.get("mu").unwrap_or("").to_string(), "evolving sets need a discrete step law"))?;
    let forest = grow(n, config.alpha, derive_key(seed, 0))?;
    let walk = assign_and_assemble(&forest, &config, derive_key(seed, 1))?;
    let seq = kernel_seq_from_forest(&forest, &walk.steps, &config.group, mu)?;
    let mut rng = StreamRng::new(derive_key(seed, 2));
    let trace = evolving_trace(&seq, &ElementSet::from([start]), 0, n, doob, &mut rng)?;
    let mut t = Table::new(&["j", "size"]);
    for (j, size) in trace {
        t.push(vec![j.to_string(), size.to_string()]);
    }
    t.to_csv(&r)
}

fn parse_scope(text: &str) -> Result<SearchScope> {
    match text.split_once(':') {
        None if text == "exhaustive" => Ok(SearchScope::Exhaustive),
        None if text == "connected" => Ok(SearchScope::Connected { cap: DEFAULT_SET_CAP }),
        Some(("connected", cap)) => Ok(SearchScope::Connected { cap: cap.trim().parse().map_err(|e| field_error("scope", text, e))? }),
        _ => Err(field_error("scope", text, "expected exhaustive or connected[:cap]")),
    }
}

/// Columns `r,phi,psi,status`.
pub fn evoset_profile(a: &ProfileArgs, f: &FileConfig) -> Result<String> {
    let mut r = Resolved::default();
    r.set("command", "evoset profile");
    let group_text = require(pick(a.group.as_deref(), f.group.as_deref()), "group")?;
    let mu_text = pick(a.mu.as_deref(), f.mu.as_deref()).unwrap_or("lazy");
    let group = parse_group(group_text)?;
    let mu = parse_step_law(&group, mu_text)?;
    let law = mu.as_discrete().ok_or_else(|| field_error("mu", mu_text, "profiles need a discrete step law"))?;
    let rmax = require(pick(a.rmax, f.rmax), "rmax")?;
    let default_scope = if group.order().is_some() { "exhaustive" } else { "connected" };
    let scope_text = pick(a.scope.as_deref(), f.scope.as_deref()).unwrap_or(default_scope);
    let scope = parse_scope(scope_text)?;
    r.set("group", &group);
    r.set("mu", mu_text);
    r.set("rmax", rmax);
    r.set("scope", scope_text);
    let rows = iso_profile_table(&group, law, rmax, scope)?;
    let mut t = Table::new(&["r", "phi", "psi", "status"]);
    for row in rows {
        let status = match row.status {
            ProfileStatus::Complete => "complete",
            ProfileStatus::Restricted => "restricted",
        };
        t.push(vec![row.r.to_string(), row.phi.to_string(), row.psi.to_string(), status.to_string()]);
    }
    t.to_csv(&r)
}

/// JSON object with provenance fields and one entry per check.
pub fn verify(a: &VerifyArgs, f: &FileConfig) -> Result<(String, bool)> {
    let seed = pick(a.seed, f.seed).unwrap_or(suites::DEFAULT_SEED);
    let mut r = Resolved::default();
    r.set("command", "verify");
    r.set("suite", &a.suite);
    r.set("seed", seed);
    let reports = suites::run_named(&a.suite, seed)?;
    let pass = reports.iter().all(|s| s.pass());
    let results: Vec<_> = reports.iter().flat_map(|s| s.rows.iter()).collect();
    let doc = serde_json::json!({
        "version": VERSION,
        "config_hash": r.hash(),
        "seed": seed,
        "suite": a.suite,
        "pass": pass,
        "results": results,
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    Ok((text, pass))
}

pub fn unknown_suite(name: &str) -> anyhow::Error {
    anyhow!("unknown suite {name:?}; expected one of: {}, all", suites::SUITES.iter().map(|s| s.name).collect::<Vec<_>>().join(", "))
}
