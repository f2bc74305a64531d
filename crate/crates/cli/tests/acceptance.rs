//! Acceptance criteria, one line each. Exits nonzero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsverify_cli::{
    generate_functions, run_campaign_with, CampaignConfig, Check, FunctionSource, GeneratorSpec, Row, RunOptions,
    ScenarioConfig, Tolerances,
};
use tsverify_core::{
    classical_cebysev_check, classical_ostrowski_check, continuous_convergence_study, mixed_partial,
    mixed_partial_in_order, triple_delta_integral, Box3, ConvergenceTarget, Function1, Function3, TimeScale,
    TrigProduct,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn random_scale(rng: &mut ChaCha8Rng) -> TimeScale {
    match rng.random_range(0..3) {
        0 => {
            let n = rng.random_range(3..=12);
            let mut ks = std::collections::BTreeSet::new();
            while ks.len() < n {
                ks.insert(rng.random_range(-40i32..=60));
            }
            TimeScale::finite(ks.into_iter().map(|k| k as f64 * 0.05).collect::<Vec<_>>()).unwrap()
        }
        1 => {
            let start = rng.random_range(-16i32..=8) as f64 * 0.125;
            let step = rng.random_range(0.1..=0.5);
            let n = rng.random_range(3..=12);
            let ts = TimeScale::uniform(start, start + step * (n - 1) as f64, step).unwrap();
            assert_eq!(ts.len(), n);
            ts
        }
        _ => TimeScale::geometric(
            rng.random_range(0.2..=1.0),
            rng.random_range(1.05..=1.3),
            rng.random_range(3..=10),
        )
        .unwrap(),
    }
}

/// A random sub-box of three random scales with a random base point.
fn random_box_spec(rng: &mut ChaCha8Rng) -> ([TimeScale; 3], [f64; 3], [f64; 3], [f64; 3]) {
    let scales = [(); 3].map(|_| random_scale(rng));
    let mut lo = [0.0; 3];
    let mut hi = [0.0; 3];
    let mut base = [0.0; 3];
    for a in 0..3 {
        let pts = scales[a].points();
        let trim = usize::from(pts.len() >= 4);
        let i0 = rng.random_range(0..=trim);
        let i1 = pts.len() - 1 - rng.random_range(0..=trim);
        lo[a] = pts[i0];
        hi[a] = pts[i1];
        base[a] = pts[rng.random_range(i0..i1)];
    }
    (scales, lo, hi, base)
}

fn campaign_scenarios(count: usize, generator: impl Fn(usize) -> GeneratorSpec, checks: &[Check]) -> CampaignConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    CampaignConfig {
        scenarios: (0..count)
            .map(|k| {
                let (scales, lo, hi, base) = random_box_spec(&mut rng);
                ScenarioConfig {
                    name: format!("triple{k:02}"),
                    scales,
                    lo,
                    hi,
                    base: Some(base),
                    functions: FunctionSource::Generator(generator(k)),
                    checks: checks.to_vec(),
                    tolerances: Tolerances::default(),
                    max_level: 0,
                }
            })
            .collect(),
    }
}

fn rows_of<'a>(rows: &'a [Row], check: &'static str) -> impl Iterator<Item = &'a Row> + 'a {
    rows.iter().filter(move |r| r.check == check)
}

fn criteria_1_to_3() -> [Outcome; 3] {
    let cfg = campaign_scenarios(
        50,
        |_| GeneratorSpec::new("poly", 1000, 42),
        &[Check::Identities, Check::AveragedIdentity, Check::Ostrowski],
    );
    let t = Instant::now();
    let report = run_campaign_with(
        &cfg,
        &RunOptions {
            workers: Some(1),
            ..RunOptions::default()
        },
    );
    let secs = t.elapsed().as_secs_f64();
    let rows = &report.rows;
    let summarize = |check: &'static str| {
        let sel: Vec<&Row> = rows_of(rows, check).collect();
        let worst = sel.iter().map(|r| r.residual_max).fold(0.0f64, f64::max);
        let errors = sel.iter().filter(|r| r.error.is_some()).count();
        (sel, worst, errors)
    };
    let (id_rows, id_worst, id_err) = summarize("identities");
    let (av_rows, av_worst, av_err) = summarize("averaged_identity");
    let (os_rows, chain_worst, os_err) = summarize("ostrowski");
    let worst_margin = os_rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let os_ok = os_err == 0 && os_rows.iter().all(|r| r.margin >= -1e-9 && r.passed);
    let timed_ok = secs < 120.0;
    [
        outcome(
            id_rows.len() == 50_000 && id_err == 0 && id_worst <= 1e-9 && timed_ok,
            format!(
                "{} instances, worst residual {id_worst:.2e}, {secs:.1}s single worker for the campaign",
                id_rows.len()
            ),
        ),
        outcome(
            av_rows.len() == 50_000 && av_err == 0 && av_worst <= 1e-9,
            format!("{} instances, worst residual {av_worst:.2e}", av_rows.len()),
        ),
        outcome(
            os_rows.len() == 50_000 && os_ok,
            format!(
                "{} instances, worst margin {worst_margin:.3e}, worst chain excess {chain_worst:.2e}",
                os_rows.len()
            ),
        ),
    ]
}

fn criterion_4() -> Outcome {
    let cfg = campaign_scenarios(
        50,
        |k| GeneratorSpec::new("poly", 40, 1000 + k as u64),
        &[Check::Cebysev],
    );
    let report = run_campaign_with(&cfg, &RunOptions::default());
    let rows: Vec<&Row> = rows_of(&report.rows, "cebysev").collect();
    let selfs = rows
        .iter()
        .filter(|r| {
            let (a, b) = r.function_id.split_once(':').unwrap();
            a == b
        })
        .count();
    let worst_margin = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let worst_res = rows.iter().map(|r| r.residual_max).fold(0.0f64, f64::max);
    let ok = rows.len() == 50 * 820
        && selfs == 50 * 40
        && rows.iter().all(|r| r.error.is_none() && r.margin >= -1e-9)
        && worst_res <= 1e-10;
    outcome(
        ok,
        format!(
            "{} pairs ({selfs} self-pairs), worst margin {worst_margin:.3e}, worst product residual {worst_res:.2e}",
            rows.len()
        ),
    )
}

fn criterion_5() -> Outcome {
    let u = Function1::identity();
    let o = classical_ostrowski_check(&u, 0.0, 0.0, 1.0, 1.0).unwrap();
    let c = classical_cebysev_check(&u, &u, 0.0, 1.0, 1.0, 1.0).unwrap();
    let ok = o.margin.abs() <= 1e-9
        && c.margin.abs() <= 1e-9
        && (o.lhs - 0.5).abs() <= 1e-12
        && (o.rhs - 0.5).abs() <= 1e-12
        && (c.lhs - 1.0 / 12.0).abs() <= 1e-12
        && (c.rhs - 1.0 / 12.0).abs() <= 1e-12;
    outcome(
        ok,
        format!(
            "ostrowski lhs {} rhs {} margin {:.1e}; cebysev lhs {} rhs {} margin {:.1e}",
            o.lhs, o.rhs, o.margin, c.lhs, c.rhs, c.margin
        ),
    )
}

fn criterion_6() -> Outcome {
    let ts = TimeScale::uniform(0.0, 1.0, 0.25).unwrap();
    let domain = Box3::spanning([ts.clone(), ts.clone(), ts], None).unwrap();
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    let xyz = Function3::poly(&[(1.0, [1, 1, 1])]);
    let trig = Function3::TrigProd(TrigProduct::sin_cos_exp());
    for (name, f) in [("xyz", &xyz), ("sin(x)cos(y)e^z", &trig)] {
        let rec = continuous_convergence_study(ConvergenceTarget::Ostrowski(f), &domain, 4).unwrap();
        let rates: Vec<f64> = rec.rates.iter().map(|r| r.unwrap_or(f64::NAN)).collect();
        let in_band = rates.iter().all(|r| (1.6..=2.4).contains(r));
        let margins = rec.margins.iter().all(|m| m.margin >= 0.0);
        ok &= in_band && margins;
        let shown: Vec<String> = rates.iter().map(|r| format!("{r:.2}")).collect();
        parts.push(format!(
            "{name}: rates [{}] {}, margins {}",
            shown.join(", "),
            if in_band { "in band" } else { "outside [1.6, 2.4]" },
            if margins { "nonnegative" } else { "negative" }
        ));
    }
    let secs = t.elapsed().as_secs_f64();
    ok &= secs < 30.0;
    outcome(ok, format!("{}; {secs:.2}s", parts.join("; ")))
}

fn sigma(points: &[f64], t: f64) -> f64 {
    points.iter().copied().find(|&u| u > t).unwrap_or(t)
}

/// Differences along `axes`, the last axis applied outermost.
fn nested(f: &dyn Fn([f64; 3]) -> f64, scales: &[Vec<f64>; 3], p: [f64; 3], axes: &[usize]) -> f64 {
    match axes.split_last() {
        None => f(p),
        Some((&a, rest)) => {
            let mut q = p;
            q[a] = sigma(&scales[a], p[a]);
            (nested(f, scales, q, rest) - nested(f, scales, p, rest)) / (q[a] - p[a])
        }
    }
}

fn criterion_7() -> Outcome {
    const ORDERS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let functions = generate_functions(&GeneratorSpec::new("poly", 100, 77)).unwrap();
    let trig = generate_functions(&GeneratorSpec::new("trigprod", 100, 78)).unwrap();
    let (mut worst_int, mut worst_mixed) = (0.0f64, 0.0f64);
    for k in 0..200 {
        let (scales, lo, hi, base) = random_box_spec(&mut rng);
        let domain = Box3::new(scales.clone(), lo, hi, Some(base)).unwrap();
        let f = if k % 2 == 0 { &functions[k / 2] } else { &trig[k / 2] };
        let eval = |p: [f64; 3]| f.eval(p).unwrap();
        let pts = [0, 1, 2].map(|a| scales[a].points().to_vec());

        // integral over a random sub-rectangle
        let pick = |a: usize, rng: &mut ChaCha8Rng| {
            let inside: Vec<f64> = pts[a].iter().copied().filter(|&u| u >= lo[a] && u <= hi[a]).collect();
            let i = rng.random_range(0..inside.len() - 1);
            let j = rng.random_range(i + 1..inside.len());
            (inside[i], inside[j])
        };
        let bounds = [0, 1, 2].map(|a| pick(a, &mut rng));
        let (ilo, ihi) = (bounds.map(|b| b.0), bounds.map(|b| b.1));
        let (mut flat, mut magnitude) = (0.0, 0.0);
        for &x in pts[0].iter().filter(|&&u| u >= ilo[0] && u < ihi[0]) {
            for &y in pts[1].iter().filter(|&&u| u >= ilo[1] && u < ihi[1]) {
                for &z in pts[2].iter().filter(|&&u| u >= ilo[2] && u < ihi[2]) {
                    let w = (sigma(&pts[0], x) - x) * (sigma(&pts[1], y) - y) * (sigma(&pts[2], z) - z);
                    flat += eval([x, y, z]) * w;
                    magnitude += (eval([x, y, z]) * w).abs();
                }
            }
        }
        let got = triple_delta_integral(&domain, ilo, ihi, |q| eval(domain.point(q))).unwrap();
        if magnitude > 0.0 {
            worst_int = worst_int.max((got - flat).abs() / magnitude);
        }

        let values = f.sample(&domain).unwrap();
        let reference = mixed_partial(&values, &domain).unwrap();
        for order in ORDERS {
            let field = mixed_partial_in_order(&values, &domain, order).unwrap();
            for q in Box3::indices([0; 3], field.values.dims()) {
                let expect = nested(&eval, &pts, domain.point(q), &order);
                for got in [field.get(q), reference.get(q)] {
                    worst_mixed = worst_mixed.max((got - expect).abs() / (1.0 + expect.abs()));
                }
            }
        }
    }
    outcome(
        worst_int <= 1e-12 && worst_mixed <= 1e-10,
        format!("200 instances, integral rel. error {worst_int:.2e}, mixed partial rel. error {worst_mixed:.2e} over 6 orders"),
    )
}

const DETERMINISM_CONFIG: &str = r#"{
  "scenarios": [
    {
      "name": "mixed",
      "scales": [
        {"kind": "finite", "points": [-1.0, -0.35, 0.2, 0.6, 1.4, 2.0]},
        {"kind": "geometric", "start": 0.4, "ratio": 1.25, "count": 7},
        {"kind": "uniform", "start": 0.0, "stop": 1.5, "step": 0.25}
      ],
      "lo": [-1.0, 0.4, 0.0],
      "hi": [2.0, 0.9765625, 1.5],
      "base": [-0.35, 0.5, 0.25],
      "functions": {"family": "poly", "count": 30, "seed": 11},
      "checks": ["identities", "averaged_identity", "ostrowski", "cebysev", "classical"]
    },
    {
      "name": "integers",
      "scales": [
        {"kind": "finite", "points": [1, 2, 3, 4]},
        {"kind": "finite", "points": [1, 2, 3]},
        {"kind": "finite", "points": [1, 2, 3, 4, 5]}
      ],
      "lo": [1, 1, 1],
      "hi": [4, 3, 5],
      "functions": {"family": "trigprod", "count": 12, "seed": 12},
      "checks": ["discrete", "ostrowski", "cebysev"]
    },
    {
      "name": "refinement",
      "scales": [
        {"kind": "uniform", "start": 0.0, "stop": 1.0, "step": 0.25},
        {"kind": "uniform", "start": 0.0, "stop": 1.0, "step": 0.25},
        {"kind": "uniform", "start": 0.0, "stop": 1.0, "step": 0.25}
      ],
      "lo": [0, 0, 0],
      "hi": [1, 1, 1],
      "functions": {"family": "trigprod", "count": 4, "seed": 13},
      "checks": ["convergence"],
      "max_level": 3
    }
  ]
}
"#;

fn without_timing(dir: &Path) -> (String, String) {
    let json = std::fs::read_to_string(dir.join("report.json")).unwrap();
    let json: String = json
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"runtime_ms\""))
        .collect::<Vec<_>>()
        .join("\n");
    let csv = std::fs::read_to_string(dir.join("report.csv")).unwrap();
    let csv: String = csv
        .lines()
        .map(|l| {
            // runtime_ms is the ninth of ten columns and never quoted
            let mut cols: Vec<&str> = l.rsplitn(3, ',').collect();
            cols.remove(1);
            cols.reverse();
            cols.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n");
    (json, csv)
}

fn criterion_8() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("scenario.json");
    std::fs::write(&cfg, DETERMINISM_CONFIG).unwrap();
    let mut results = Vec::new();
    for workers in [1, 8] {
        let out = tmp.path().join(format!("w{workers}"));
        let status = Command::new(env!("CARGO_BIN_EXE_tsverify"))
            .env_remove("TSVERIFY_SEED")
            .args([
                "run",
                cfg.to_str().unwrap(),
                "--workers",
                &workers.to_string(),
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        results.push((status.status.code(), without_timing(&out)));
    }
    let (a, b) = (&results[0], &results[1]);
    let rows = a.1 .1.lines().count() - 1;
    let ok = a.0 == b.0 && a.0 != Some(2) && a.1 == b.1;
    outcome(
        ok,
        format!(
            "{rows} rows, exit codes {:?} and {:?}, json {} csv {}",
            a.0,
            b.0,
            if a.1 .0 == b.1 .0 { "identical" } else { "differ" },
            if a.1 .1 == b.1 .1 { "identical" } else { "differ" }
        ),
    )
}

fn main() {
    // cargo passes harness flags such as --nocapture or a filter; a filter
    // that names no criterion runs nothing
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    if filter.as_deref().is_some_and(|f| !"acceptance criterion".contains(f)) {
        return;
    }
    let names = [
        "octant identities",
        "averaged identity",
        "ostrowski bound and chain",
        "cebysev bound and product identity",
        "classical sharpness",
        "continuous convergence rate",
        "oracle equivalence",
        "worker-count determinism",
    ];
    let mut outcomes: Vec<Outcome> = criteria_1_to_3().into_iter().collect();
    outcomes.push(criterion_4());
    outcomes.push(criterion_5());
    outcomes.push(criterion_6());
    outcomes.push(criterion_7());
    outcomes.push(criterion_8());
    let mut failed = 0;
    for (i, (name, o)) in names.iter().zip(&outcomes).enumerate() {
        println!(
            "criterion {} {name}: {} ({})",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.passed);
    }
    println!(
        "acceptance: {} of {} criteria passed",
        outcomes.len() - failed,
        outcomes.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
