//! Regression fixtures: small scenarios whose expected rows come from the
//! brute-force oracle (or closed forms, for the classical witnesses) rather
//! than from the campaign code they are compared against.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tsverify_core::oracle::BruteForce;
use tsverify_core::{Function3, TimeScale, TrigProduct};

use crate::campaign::run_campaign;
use crate::config::{CampaignConfig, Check, FunctionSource, ScenarioConfig, Tolerances};

pub const FIXTURE_TOLERANCE: f64 = 1e-12;

pub fn default_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedRow {
    pub check: String,
    pub function_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

impl ExpectedRow {
    fn new(check: &str, function_id: String, lhs: f64, rhs: f64) -> Self {
        ExpectedRow {
            check: check.into(),
            function_id,
            lhs,
            rhs,
            margin: rhs - lhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub config: ScenarioConfig,
    pub expected: Vec<ExpectedRow>,
}

fn scenario(
    name: &str,
    scales: [TimeScale; 3],
    lo: [f64; 3],
    hi: [f64; 3],
    base: Option<[f64; 3]>,
    functions: Vec<Function3>,
    checks: Vec<Check>,
) -> ScenarioConfig {
    ScenarioConfig {
        name: name.into(),
        scales,
        lo,
        hi,
        base,
        functions: FunctionSource::Literals(functions),
        checks,
        tolerances: Tolerances::default(),
        max_level: 0,
    }
}

fn cube(ts: TimeScale) -> [TimeScale; 3] {
    [ts.clone(), ts.clone(), ts]
}

fn xyz() -> Function3 {
    Function3::poly(&[(1.0, [1, 1, 1])])
}

fn configs() -> Vec<ScenarioConfig> {
    let sum = Function3::poly(&[(1.0, [1, 0, 0]), (1.0, [0, 1, 0]), (1.0, [0, 0, 1])]);
    vec![
        scenario(
            "unit_z_xyz",
            cube(TimeScale::integers(0, 2).expect("scale")),
            [0.0; 3],
            [2.0; 3],
            None,
            vec![xyz(), sum, Function3::constant(2.0)],
            vec![Check::Ostrowski, Check::Cebysev],
        ),
        scenario(
            "discrete_xyz",
            cube(TimeScale::integers(1, 3).expect("scale")),
            [1.0; 3],
            [3.0; 3],
            None,
            vec![xyz(), Function3::constant(1.0)],
            vec![Check::Discrete],
        ),
        {
            let scales = [
                TimeScale::finite(vec![-1.0, -0.4, 0.1, 0.9, 1.3]).expect("scale"),
                TimeScale::geometric(0.3, 1.7, 5).expect("scale"),
                TimeScale::uniform(0.0, 2.0, 0.5).expect("scale"),
            ];
            let lo = [0, 1, 2].map(|a| scales[a].min());
            let hi = [0, 1, 2].map(|a| scales[a].max());
            let base = [0, 1, 2].map(|a| scales[a].points()[1]);
            scenario(
                "mixed_scales",
                scales,
                lo,
                hi,
                Some(base),
                vec![
                    Function3::TrigProd(TrigProduct::sin_cos_exp()),
                    Function3::poly(&[(1.5, [2, 1, 1]), (-0.5, [0, 2, 1]), (0.25, [1, 0, 0])]),
                ],
                vec![Check::Ostrowski, Check::Cebysev],
            )
        },
        scenario(
            "classical_witnesses",
            cube(TimeScale::uniform(0.0, 1.0, 0.25).expect("scale")),
            [0.0; 3],
            [1.0; 3],
            None,
            vec![
                Function3::poly(&[(1.0, [1, 0, 0])]),
                Function3::poly(&[(1.0, [2, 0, 0])]),
            ],
            vec![Check::Classical],
        ),
    ]
}

type Closed = Box<dyn Fn(f64, f64, f64) -> f64>;

fn expected_rows(cfg: &ScenarioConfig) -> Vec<ExpectedRow> {
    let FunctionSource::Literals(functions) = &cfg.functions else {
        unreachable!("fixtures use literal functions")
    };
    let domain = cfg.domain().expect("fixture box");
    let closures: Vec<Closed> = functions
        .iter()
        .map(|f| {
            let f = f.clone();
            Box::new(move |x, y, z| f.eval([x, y, z]).expect("closed form")) as Closed
        })
        .collect();
    let oracles: Vec<BruteForce> = closures.iter().map(|c| BruteForce::new(c.as_ref(), &domain)).collect();
    let n = functions.len();
    let mut rows = Vec::new();
    for check in &cfg.checks {
        match check {
            Check::Ostrowski | Check::Discrete => {
                for (i, o) in oracles.iter().enumerate() {
                    let (lhs, rhs) = o.ostrowski();
                    rows.push(ExpectedRow::new(check.name(), format!("f{i}"), lhs, rhs));
                }
            }
            Check::Cebysev => {
                for i in 0..n {
                    for j in i..n {
                        let (lhs, rhs) = oracles[i].cebysev(&oracles[j]);
                        rows.push(ExpectedRow::new("cebysev", format!("f{i}:f{j}"), lhs, rhs));
                    }
                }
            }
            Check::Classical => {
                // u and u^2 on [0, 1] at x = 0, integrated by hand
                rows.push(ExpectedRow::new("classical_ostrowski", "f0".into(), 0.5, 0.5));
                rows.push(ExpectedRow::new("classical_ostrowski", "f1".into(), 1.0 / 3.0, 1.0));
                rows.push(ExpectedRow::new(
                    "classical_cebysev",
                    "f0:f0".into(),
                    1.0 / 12.0,
                    1.0 / 12.0,
                ));
                rows.push(ExpectedRow::new(
                    "classical_cebysev",
                    "f0:f1".into(),
                    1.0 / 12.0,
                    1.0 / 6.0,
                ));
                rows.push(ExpectedRow::new(
                    "classical_cebysev",
                    "f1:f1".into(),
                    4.0 / 45.0,
                    1.0 / 3.0,
                ));
            }
            other => unreachable!("no fixture for {}", other.name()),
        }
    }
    rows
}

/// Fixtures recomputed from the oracle.
pub fn build() -> Vec<Fixture> {
    configs()
        .into_iter()
        .map(|config| Fixture {
            name: config.name.clone(),
            expected: expected_rows(&config),
            config,
        })
        .collect()
}

fn path_for(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("{name}.json"))
}

pub fn write_all(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    build()
        .into_iter()
        .map(|fx| {
            let path = path_for(dir, &fx.name);
            let mut text = serde_json::to_string_pretty(&fx).expect("fixture serializes");
            text.push('\n');
            std::fs::write(&path, text)?;
            Ok(path)
        })
        .collect()
}

pub fn load(dir: &Path, name: &str) -> Result<Fixture, String> {
    let path = path_for(dir, name);
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= FIXTURE_TOLERANCE * (1.0 + b.abs())
}

/// Runs the fixture scenario and lists every disagreement with its stored rows.
pub fn compare(fx: &Fixture) -> Vec<String> {
    let report = run_campaign(&CampaignConfig {
        scenarios: vec![fx.config.clone()],
    });
    let mut problems = Vec::new();
    if report.rows.len() != fx.expected.len() {
        problems.push(format!(
            "{}: {} rows, expected {}",
            fx.name,
            report.rows.len(),
            fx.expected.len()
        ));
    }
    for e in &fx.expected {
        let Some(row) = report
            .rows
            .iter()
            .find(|r| r.check == e.check && r.function_id == e.function_id)
        else {
            problems.push(format!("{}: missing row {} {}", fx.name, e.check, e.function_id));
            continue;
        };
        for (what, got, want) in [
            ("lhs", row.lhs, e.lhs),
            ("rhs", row.rhs, e.rhs),
            ("margin", row.margin, e.margin),
        ] {
            if !close(got, want) {
                problems.push(format!(
                    "{}: {} {} {what} = {got:e}, fixture {want:e}",
                    fx.name, e.check, e.function_id
                ));
            }
        }
    }
    problems
}

/// Compares every stored fixture in `dir` against a fresh run.
pub fn verify_all(dir: &Path) -> Vec<String> {
    let mut problems = Vec::new();
    for fx in build() {
        match load(dir, &fx.name) {
            Ok(stored) => problems.extend(compare(&stored)),
            Err(e) => problems.push(e),
        }
    }
    problems
}

/// Names of the fixtures this build knows about.
pub fn names() -> Vec<String> {
    configs().into_iter().map(|c| c.name).collect()
}
