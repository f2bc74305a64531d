//! Executes scenario checks and assembles the report.
//!
//! Rows are computed in parallel but collected in a fixed order: scenarios in
//! file order, then checks in the order requested, then functions (or pairs,
//! or levels) by index. Every row is computed independently of the others, so
//! the report is the same for any worker count.

use std::time::Instant;

use rayon::prelude::*;
use sha2::{Digest, Sha256};
use tsverify_core::{
    cebysev_from_analyses, classical_cebysev_check, classical_ostrowski_check, continuous_convergence_study,
    discrete_instance_check, ostrowski_from_analysis, Analysis, Box3, ConvergenceTarget, Function1, Function3, Margin,
    Octant,
};

use crate::config::{CampaignConfig, Check, FunctionSource, ScenarioConfig};
use crate::generate::generate_functions;
use crate::report::{Provenance, Row, Summary, VerificationReport};

/// Accepted band for the refinement ratio of successive differences.
pub const RATE_BAND: (f64, f64) = (1.6, 2.4);

pub const SUBSTITUTION_NOTES: [&str; 5] = [
    "octant identities are generated from the telescoping expansion over each octant, not transcribed",
    "functional A uses f(x,b2,b3) and f(b1,b2,z) for its two boundary slices",
    "the Ostrowski left side is the absolute value of the integral of f - A(f) over [sigma(base), b)",
    "the discrete instance applies the general bound on unit integer scales with sigma(t) = t + 1",
    "generated functions use ChaCha8Rng::seed_from_u64 from rand_chacha",
];

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Overrides every scenario's `tol_abs`.
    pub tol_abs: Option<f64>,
    /// Restricts the run to these checks.
    pub only: Option<Vec<Check>>,
    /// Overrides every scenario's `max_level`.
    pub max_level: Option<u32>,
}

pub fn run_campaign(cfg: &CampaignConfig) -> VerificationReport {
    run_campaign_with(cfg, &RunOptions::default())
}

pub fn run_campaign_with(cfg: &CampaignConfig, opts: &RunOptions) -> VerificationReport {
    let work = || -> Vec<Row> { cfg.scenarios.iter().flat_map(|s| run_scenario(s, opts)).collect() };
    let rows = match opts.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(work),
        None => work(),
    };
    let canonical = serde_json::to_vec(cfg).expect("config serializes");
    VerificationReport {
        summary: Summary::of(&rows),
        rows,
        provenance: Provenance {
            config_hash: hex::encode(Sha256::digest(&canonical)),
            seed: cfg.seeds(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            substitution_notes: SUBSTITUTION_NOTES.iter().map(|s| s.to_string()).collect(),
        },
    }
}

struct Ctx<'a> {
    name: &'a str,
    domain: &'a Box3,
    functions: &'a [Function3],
    analyses: &'a [tsverify_core::Result<Analysis<'a>>],
    tol_abs: Option<f64>,
    tol_rel: f64,
    max_level: u32,
}

impl Ctx<'_> {
    fn id(i: usize) -> String {
        format!("f{i}")
    }

    fn pair_id(i: usize, j: usize) -> String {
        format!("f{i}:f{j}")
    }

    fn margin(&self, m: Margin) -> Margin {
        self.tol_abs.map_or(m, |t| m.retol(t))
    }

    fn row(&self, check: &str, id: String, lhs: f64, rhs: f64, residual: f64, passed: bool) -> Row {
        Row {
            scenario: self.name.to_string(),
            check: check.to_string(),
            function_id: id,
            lhs,
            rhs,
            margin: rhs - lhs,
            residual_max: residual,
            passed,
            runtime_ms: 0.0,
            error: None,
        }
    }

    fn analysis(&self, i: usize) -> Result<&Analysis<'_>, String> {
        self.analyses[i].as_ref().map_err(|e| e.to_string())
    }
}

fn timed(f: impl FnOnce() -> Row) -> Row {
    let t = Instant::now();
    let mut row = f();
    row.runtime_ms = (t.elapsed().as_secs_f64() * 1e6).round() / 1e3;
    row
}

fn dedup(checks: &[Check], only: Option<&[Check]>) -> Vec<Check> {
    let mut out = Vec::new();
    for &c in checks {
        if !out.contains(&c) && only.is_none_or(|o| o.contains(&c)) {
            out.push(c);
        }
    }
    out
}

fn scenario_error(name: &str, e: impl ToString) -> Vec<Row> {
    vec![Row::errored(name, "scenario", "-", e)]
}

fn run_scenario(s: &ScenarioConfig, opts: &RunOptions) -> Vec<Row> {
    let checks = dedup(&s.checks, opts.only.as_deref());
    if checks.is_empty() {
        return Vec::new();
    }
    let domain = match s.domain() {
        Ok(d) => d,
        Err(e) => return scenario_error(&s.name, e),
    };
    let functions = match &s.functions {
        FunctionSource::Literals(v) => v.clone(),
        FunctionSource::Generator(g) => match generate_functions(g) {
            Ok(v) => v,
            Err(e) => return scenario_error(&s.name, e),
        },
    };
    let needs_analysis = checks.iter().any(|c| {
        matches!(
            c,
            Check::Identities | Check::AveragedIdentity | Check::Ostrowski | Check::Cebysev
        )
    });
    let analyses: Vec<_> = if needs_analysis {
        functions.par_iter().map(|f| Analysis::new(f, &domain)).collect()
    } else {
        Vec::new()
    };
    let ctx = Ctx {
        name: &s.name,
        domain: &domain,
        functions: &functions,
        analyses: &analyses,
        tol_abs: opts.tol_abs.or(s.tolerances.tol_abs),
        tol_rel: s.tolerances.tol_rel,
        max_level: opts.max_level.unwrap_or(s.max_level),
    };
    let n = functions.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let mut rows = Vec::new();
    for check in checks {
        match check {
            Check::Identities => rows.extend(per_function(n, |i| identities_row(&ctx, i))),
            Check::AveragedIdentity => rows.extend(per_function(n, |i| averaged_row(&ctx, i))),
            Check::Ostrowski => rows.extend(per_function(n, |i| ostrowski_row(&ctx, i))),
            Check::Cebysev => rows.extend(
                pairs
                    .par_iter()
                    .map(|&(i, j)| timed(|| cebysev_row(&ctx, i, j)))
                    .collect::<Vec<_>>(),
            ),
            Check::Classical => {
                let closed: Vec<usize> = (0..n).filter(|&i| functions[i].is_closed_form()).collect();
                rows.extend(
                    closed
                        .par_iter()
                        .map(|&i| timed(|| classical_ostrowski_row(&ctx, i)))
                        .collect::<Vec<_>>(),
                );
                let closed_pairs: Vec<_> = pairs
                    .iter()
                    .copied()
                    .filter(|&(i, j)| functions[i].is_closed_form() && functions[j].is_closed_form())
                    .collect();
                rows.extend(
                    closed_pairs
                        .par_iter()
                        .map(|&(i, j)| timed(|| classical_cebysev_row(&ctx, i, j)))
                        .collect::<Vec<_>>(),
                );
            }
            Check::Convergence => {
                let per: Vec<Vec<Row>> = (0..n).into_par_iter().map(|i| convergence_rows(&ctx, i)).collect();
                rows.extend(per.into_iter().flatten());
            }
            Check::Discrete => rows.extend(per_function(n, |i| discrete_row(&ctx, i))),
        }
    }
    rows
}

fn per_function(n: usize, f: impl Fn(usize) -> Row + Sync + Send) -> Vec<Row> {
    (0..n).into_par_iter().map(|i| timed(|| f(i))).collect()
}

fn residual_row(ctx: &Ctx, check: &str, i: usize, worst: Result<f64, String>) -> Row {
    match worst {
        Ok(w) => ctx.row(check, Ctx::id(i), w, ctx.tol_rel, w, w <= ctx.tol_rel),
        Err(e) => Row::errored(ctx.name, check, &Ctx::id(i), e),
    }
}

/// Largest `|f(p) - rhs| / (1 + |f(p)|)` over the octants and admissible points.
fn identities_row(ctx: &Ctx, i: usize) -> Row {
    let worst = ctx.analysis(i).and_then(|an| {
        let mut worst = 0.0f64;
        for p in an.admissible_points() {
            let scale = 1.0 + an.value(p).abs();
            for o in Octant::ALL {
                let r = an.identity_residual(o, p).map_err(|e| e.to_string())?;
                worst = worst.max(r / scale);
                if r.is_nan() {
                    return Ok(f64::NAN);
                }
            }
        }
        Ok(worst)
    });
    residual_row(ctx, "identities", i, worst)
}

fn averaged_row(ctx: &Ctx, i: usize) -> Row {
    let worst = ctx.analysis(i).and_then(|an| {
        let mut worst = 0.0f64;
        for p in an.admissible_points() {
            let r = an.averaged_identity_residual(p).map_err(|e| e.to_string())?;
            if r.is_nan() {
                return Ok(f64::NAN);
            }
            worst = worst.max(r / (1.0 + an.value(p).abs()));
        }
        Ok(worst)
    });
    residual_row(ctx, "averaged_identity", i, worst)
}

fn ostrowski_row(ctx: &Ctx, i: usize) -> Row {
    let an = match ctx.analysis(i) {
        Ok(an) => an,
        Err(e) => return Row::errored(ctx.name, "ostrowski", &Ctx::id(i), e),
    };
    let r = ostrowski_from_analysis(an);
    let m = ctx.margin(r.margin);
    // how far the chain lhs <= rhs_tight <= rhs_integral <= rhs is broken
    let chain = [
        m.lhs - r.rhs_tight,
        r.rhs_tight - r.rhs_integral,
        r.rhs_integral - m.rhs,
    ]
    .into_iter()
    .fold(0.0f64, f64::max);
    let passed = m.passed && r.chain_holds(m.tol_abs);
    ctx.row("ostrowski", Ctx::id(i), m.lhs, m.rhs, chain, passed)
}

fn cebysev_row(ctx: &Ctx, i: usize, j: usize) -> Row {
    let id = Ctx::pair_id(i, j);
    let (af, ag) = match (ctx.analysis(i), ctx.analysis(j)) {
        (Ok(af), Ok(ag)) => (af, ag),
        (Err(e), _) | (_, Err(e)) => return Row::errored(ctx.name, "cebysev", &id, e),
    };
    let r = cebysev_from_analyses(af, ag);
    let m = ctx.margin(r.margin);
    let res = r.product_identity_residual;
    ctx.row("cebysev", id, m.lhs, m.rhs, res, m.passed && res <= ctx.tol_rel)
}

/// The x-section through `(a2, a3)` on `[a1, b1]`.
fn section(ctx: &Ctx, i: usize) -> Option<Function1> {
    let lo = ctx.domain.lo();
    Function1::restrict_x(&ctx.functions[i], lo[1], lo[2])
}

fn classical_ostrowski_row(ctx: &Ctx, i: usize) -> Row {
    let (a, b) = (ctx.domain.lo()[0], ctx.domain.hi()[0]);
    let x = ctx.domain.base()[0];
    let f = section(ctx, i).expect("closed form");
    match classical_ostrowski_check(&f, x, a, b, f.deriv_sup(a, b)) {
        Ok(m) => {
            let m = ctx.margin(m);
            ctx.row("classical_ostrowski", Ctx::id(i), m.lhs, m.rhs, 0.0, m.passed)
        }
        Err(e) => Row::errored(ctx.name, "classical_ostrowski", &Ctx::id(i), e),
    }
}

fn classical_cebysev_row(ctx: &Ctx, i: usize, j: usize) -> Row {
    let (a, b) = (ctx.domain.lo()[0], ctx.domain.hi()[0]);
    let (f, g) = (
        section(ctx, i).expect("closed form"),
        section(ctx, j).expect("closed form"),
    );
    match classical_cebysev_check(&f, &g, a, b, f.deriv_sup(a, b), g.deriv_sup(a, b)) {
        Ok(m) => {
            let m = ctx.margin(m);
            ctx.row("classical_cebysev", Ctx::pair_id(i, j), m.lhs, m.rhs, 0.0, m.passed)
        }
        Err(e) => Row::errored(ctx.name, "classical_cebysev", &Ctx::pair_id(i, j), e),
    }
}

/// One row per refinement level, then a `convergence_rate` row whose left
/// side is the largest distance of a measured rate from 2.
fn convergence_rows(ctx: &Ctx, i: usize) -> Vec<Row> {
    let t = Instant::now();
    let rec = match continuous_convergence_study(
        ConvergenceTarget::Ostrowski(&ctx.functions[i]),
        ctx.domain,
        ctx.max_level,
    ) {
        Ok(rec) => rec,
        Err(e) => return vec![Row::errored(ctx.name, "convergence", &Ctx::id(i), e)],
    };
    let per_row = (t.elapsed().as_secs_f64() * 1e6 / (rec.levels.len() + 1) as f64).round() / 1e3;
    let mut rows: Vec<Row> = rec
        .levels
        .iter()
        .zip(&rec.margins)
        .map(|(level, m)| {
            let m = ctx.margin(*m);
            ctx.row("convergence", format!("f{i}@L{level}"), m.lhs, m.rhs, 0.0, m.passed)
        })
        .collect();
    let (lo, hi) = RATE_BAND;
    let half_width = 0.5 * (hi - lo);
    let deviation = rec
        .rates
        .iter()
        .flatten()
        .map(|r| (r - 0.5 * (lo + hi)).abs())
        .fold(0.0f64, f64::max);
    rows.push(ctx.row(
        "convergence_rate",
        Ctx::id(i),
        deviation,
        half_width,
        0.0,
        deviation <= half_width,
    ));
    for r in &mut rows {
        r.runtime_ms = per_row;
    }
    rows
}

fn discrete_row(ctx: &Ctx, i: usize) -> Row {
    match discrete_instance_check(&ctx.functions[i], ctx.domain) {
        Ok(r) => {
            let m = ctx.margin(r.margin);
            ctx.row("discrete", Ctx::id(i), m.lhs, m.rhs, 0.0, m.passed)
        }
        Err(e) => Row::errored(ctx.name, "discrete", &Ctx::id(i), e),
    }
}
