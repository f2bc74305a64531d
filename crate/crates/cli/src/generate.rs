//! Seeded function families.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded through
//! `SeedableRng::seed_from_u64`, drawing with `rand` 0.9 uniform ranges.
//! Stored fixtures and reports depend on this exact stream, so the algorithm
//! and the draw order below only change with a major version.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tsverify_core::{AxisFactor, Error, FactorKind, Function3, Monomial, Polynomial, Result, TrigProduct};

/// Most terms in one generated polynomial.
pub const MAX_TERMS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Poly,
    TrigProd,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poly" => Ok(Family::Poly),
            "trigprod" => Ok(Family::TrigProd),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

fn default_range() -> [f64; 2] {
    [-2.0, 2.0]
}

fn default_degree() -> u32 {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub family: String,
    pub count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Polynomial coefficients and product amplitudes are drawn from here.
    #[serde(default = "default_range")]
    pub coefficient_range: [f64; 2],
    /// Largest total degree of a generated polynomial.
    #[serde(default = "default_degree")]
    pub max_degree: u32,
}

impl GeneratorSpec {
    pub fn new(family: &str, count: usize, seed: u64) -> Self {
        GeneratorSpec {
            family: family.to_string(),
            count,
            seed: Some(seed),
            coefficient_range: default_range(),
            max_degree: default_degree(),
        }
    }
}

/// Deterministic list of functions for `spec`.
pub fn generate_functions(spec: &GeneratorSpec) -> Result<Vec<Function3>> {
    let family: Family = spec.family.parse()?;
    let seed = spec
        .seed
        .ok_or_else(|| Error::InvalidFunction("generator needs a seed".into()))?;
    let [lo, hi] = spec.coefficient_range;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::InvalidFunction(
            "coefficient_range must be finite with lo <= hi".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..spec.count)
        .map(|_| match family {
            Family::Poly => random_polynomial(&mut rng, lo, hi, spec.max_degree.min(4)),
            Family::TrigProd => random_product(&mut rng, lo, hi),
        })
        .collect())
}

fn random_polynomial(rng: &mut ChaCha8Rng, lo: f64, hi: f64, max_degree: u32) -> Function3 {
    let n = rng.random_range(1..=MAX_TERMS);
    let mut terms = BTreeMap::new();
    for _ in 0..n {
        let d = rng.random_range(0..=max_degree);
        let i = rng.random_range(0..=d);
        let j = rng.random_range(0..=d - i);
        let coeff = rng.random_range(lo..=hi);
        // a repeated monomial keeps its first coefficient so every
        // coefficient stays inside the range
        terms.entry([i, j, d - i - j]).or_insert(coeff);
    }
    Function3::Poly(Polynomial::new(
        terms.into_iter().map(|(exps, coeff)| Monomial { exps, coeff }),
    ))
}

fn random_product(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Function3 {
    let amplitude = rng.random_range(lo..=hi);
    let factors = [(); 3].map(|_| {
        let kind = [FactorKind::Sin, FactorKind::Cos, FactorKind::Exp][rng.random_range(0..3)];
        let freq = rng.random_range(0.5..=2.0);
        let phase = rng.random_range(0.0..PI);
        AxisFactor::new(kind, freq, phase)
    });
    Function3::TrigProd(TrigProduct { amplitude, factors })
}
