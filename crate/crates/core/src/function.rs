//! Real-valued functions on a box: closed-form families and tabulated values.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::{Box3, GridIndex};
use crate::error::{Error, Result};

/// `x^n` by repeated multiplication. `powi` may be evaluated differently
/// depending on optimization level, which would make fixtures build-dependent.
pub fn ipow(x: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, _| acc * x)
}

/// Dense values on a rectangular index grid, row-major with `z` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid3 {
    dims: [usize; 3],
    values: Vec<f64>,
}

impl Grid3 {
    pub fn new(dims: [usize; 3], values: Vec<f64>) -> Result<Self> {
        let expected = dims.iter().product();
        if values.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                got: values.len(),
            });
        }
        Ok(Grid3 { dims, values })
    }

    pub fn from_fn(dims: [usize; 3], mut f: impl FnMut(GridIndex) -> f64) -> Self {
        let values = Box3::indices([0; 3], dims).map(&mut f).collect();
        Grid3 { dims, values }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn flat(&self, idx: GridIndex) -> usize {
        (idx[0] * self.dims[1] + idx[1]) * self.dims[2] + idx[2]
    }

    #[inline]
    pub fn get(&self, idx: GridIndex) -> f64 {
        self.values[self.flat(idx)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Grid3 {
        Grid3 {
            dims: self.dims,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &Grid3, beta: f64) -> Grid3 {
        assert_eq!(self.dims, other.dims, "grid shapes differ");
        Grid3 {
            dims: self.dims,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        }
    }

    pub fn first_non_finite(&self) -> Option<GridIndex> {
        let pos = self.values.iter().position(|v| !v.is_finite())?;
        let k = pos % self.dims[2];
        let j = (pos / self.dims[2]) % self.dims[1];
        let i = pos / (self.dims[1] * self.dims[2]);
        Some([i, j, k])
    }
}

/// A monomial `coeff * x^i y^j z^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub exps: [u32; 3],
    pub coeff: f64,
}

/// A polynomial in `x, y, z`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn new(terms: impl IntoIterator<Item = Monomial>) -> Self {
        // merge equal exponents so the term list is canonical
        let mut merged: BTreeMap<[u32; 3], f64> = BTreeMap::new();
        for t in terms {
            *merged.entry(t.exps).or_insert(0.0) += t.coeff;
        }
        Polynomial {
            terms: merged
                .into_iter()
                .map(|(exps, coeff)| Monomial { exps, coeff })
                .collect(),
        }
    }

    pub fn monomial(coeff: f64, exps: [u32; 3]) -> Self {
        Self::new([Monomial { exps, coeff }])
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.exps.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, p: [f64; 3]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff * ipow(p[0], t.exps[0]) * ipow(p[1], t.exps[1]) * ipow(p[2], t.exps[2]))
            .sum()
    }

    /// Parses a monomial key such as `"xyz"`, `"x^2y"`, `"x*z^3"` or `"1"`.
    pub fn parse_key(key: &str) -> Result<[u32; 3]> {
        let bad = || Error::InvalidFunction(format!("bad monomial key `{key}`"));
        let mut exps = [0u32; 3];
        let mut chars = key.chars().filter(|c| !c.is_whitespace() && *c != '*').peekable();
        if key.trim() == "1" || key.trim().is_empty() {
            return Ok(exps);
        }
        while let Some(c) = chars.next() {
            let axis = match c {
                'x' => 0,
                'y' => 1,
                'z' => 2,
                _ => return Err(bad()),
            };
            let mut e = 1;
            if chars.peek() == Some(&'^') {
                chars.next();
                let mut digits = String::new();
                while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    digits.push(*d);
                    chars.next();
                }
                e = digits.parse().map_err(|_| bad())?;
            }
            exps[axis] += e;
        }
        Ok(exps)
    }

    pub fn key(exps: [u32; 3]) -> String {
        let mut s = String::new();
        for (axis, name) in ['x', 'y', 'z'].iter().enumerate() {
            match exps[axis] {
                0 => {}
                1 => s.push(*name),
                e => s.push_str(&format!("{name}^{e}")),
            }
        }
        if s.is_empty() {
            s.push('1');
        }
        s
    }

    /// Coefficients of the one-variable restriction `u -> p(u, y, z)`.
    pub fn restrict_x(&self, y: f64, z: f64) -> Vec<f64> {
        let deg = self.terms.iter().map(|t| t.exps[0]).max().unwrap_or(0) as usize;
        let mut coeffs = vec![0.0; deg + 1];
        for t in &self.terms {
            coeffs[t.exps[0] as usize] += t.coeff * ipow(y, t.exps[1]) * ipow(z, t.exps[2]);
        }
        coeffs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorKind {
    Sin,
    Cos,
    Exp,
}

/// One axis factor of a separable product: `sin(w u + phi)`, `cos(w u + phi)` or `exp(w u + phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisFactor {
    #[serde(rename = "fn")]
    pub kind: FactorKind,
    #[serde(default = "one")]
    pub freq: f64,
    #[serde(default)]
    pub phase: f64,
}

fn one() -> f64 {
    1.0
}

impl AxisFactor {
    pub fn new(kind: FactorKind, freq: f64, phase: f64) -> Self {
        AxisFactor { kind, freq, phase }
    }

    pub fn eval(&self, u: f64) -> f64 {
        let arg = self.freq * u + self.phase;
        match self.kind {
            FactorKind::Sin => arg.sin(),
            FactorKind::Cos => arg.cos(),
            FactorKind::Exp => arg.exp(),
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        let arg = self.freq * u + self.phase;
        match self.kind {
            FactorKind::Sin => self.freq * arg.cos(),
            FactorKind::Cos => -self.freq * arg.sin(),
            FactorKind::Exp => self.freq * arg.exp(),
        }
    }
}

/// `amplitude * g1(x) * g2(y) * g3(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigProduct {
    pub amplitude: f64,
    pub factors: [AxisFactor; 3],
}

impl TrigProduct {
    pub fn eval(&self, p: [f64; 3]) -> f64 {
        self.amplitude * self.factors[0].eval(p[0]) * self.factors[1].eval(p[1]) * self.factors[2].eval(p[2])
    }

    /// `sin(x) cos(y) e^z`.
    pub fn sin_cos_exp() -> Self {
        TrigProduct {
            amplitude: 1.0,
            factors: [
                AxisFactor::new(FactorKind::Sin, 1.0, 0.0),
                AxisFactor::new(FactorKind::Cos, 1.0, 0.0),
                AxisFactor::new(FactorKind::Exp, 1.0, 0.0),
            ],
        }
    }
}

/// A function on a box, given by a closed form or by its grid values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FunctionLiteral", into = "FunctionLiteral")]
pub enum Function3 {
    Poly(Polynomial),
    TrigProd(TrigProduct),
    /// Values over the box grid, row-major with `z` fastest.
    Tabulated(Vec<f64>),
}

/// Scenario-file form of [`Function3`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum FunctionLiteral {
    Poly {
        coeffs: BTreeMap<String, f64>,
    },
    Trigprod {
        #[serde(default = "one")]
        amplitude: f64,
        params: [AxisFactor; 3],
    },
    /// `null` cells stand for missing (NaN) values.
    Tabulated {
        values: Vec<Option<f64>>,
    },
}

impl TryFrom<FunctionLiteral> for Function3 {
    type Error = Error;

    fn try_from(lit: FunctionLiteral) -> Result<Self> {
        Ok(match lit {
            FunctionLiteral::Poly { coeffs } => {
                let terms = coeffs
                    .iter()
                    .map(|(k, &c)| Polynomial::parse_key(k).map(|exps| Monomial { exps, coeff: c }))
                    .collect::<Result<Vec<_>>>()?;
                Function3::Poly(Polynomial::new(terms))
            }
            FunctionLiteral::Trigprod { amplitude, params } => Function3::TrigProd(TrigProduct {
                amplitude,
                factors: params,
            }),
            FunctionLiteral::Tabulated { values } => {
                Function3::Tabulated(values.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect())
            }
        })
    }
}

impl From<Function3> for FunctionLiteral {
    fn from(f: Function3) -> Self {
        match f {
            Function3::Poly(p) => FunctionLiteral::Poly {
                coeffs: p.terms.iter().map(|t| (Polynomial::key(t.exps), t.coeff)).collect(),
            },
            Function3::TrigProd(t) => FunctionLiteral::Trigprod {
                amplitude: t.amplitude,
                params: t.factors,
            },
            Function3::Tabulated(v) => FunctionLiteral::Tabulated {
                values: v.into_iter().map(|x| x.is_finite().then_some(x)).collect(),
            },
        }
    }
}

impl Function3 {
    pub fn constant(c: f64) -> Self {
        Function3::Poly(Polynomial::monomial(c, [0, 0, 0]))
    }

    pub fn poly(terms: &[(f64, [u32; 3])]) -> Self {
        Function3::Poly(Polynomial::new(
            terms.iter().map(|&(coeff, exps)| Monomial { exps, coeff }),
        ))
    }

    /// Closed-form value; `None` for tabulated functions.
    pub fn eval(&self, p: [f64; 3]) -> Option<f64> {
        match self {
            Function3::Poly(poly) => Some(poly.eval(p)),
            Function3::TrigProd(t) => Some(t.eval(p)),
            Function3::Tabulated(_) => None,
        }
    }

    pub fn is_closed_form(&self) -> bool {
        !matches!(self, Function3::Tabulated(_))
    }

    /// Samples onto the box grid, rejecting non-finite values.
    pub fn sample(&self, grid: &Box3) -> Result<Grid3> {
        let dims = grid.dims();
        let g = match self {
            Function3::Tabulated(values) => Grid3::new(dims, values.clone())?,
            closed => Grid3::from_fn(dims, |idx| closed.eval(grid.point(idx)).expect("closed form")),
        };
        match g.first_non_finite() {
            Some(index) => Err(Error::NonFinite { index }),
            None => Ok(g),
        }
    }

    /// Tabulates a closed form on a box grid.
    pub fn tabulate(&self, grid: &Box3) -> Result<Function3> {
        Ok(Function3::Tabulated(self.sample(grid)?.values.clone()))
    }

    /// `c * f`, for closed forms scales the coefficients.
    pub fn scaled(&self, c: f64) -> Function3 {
        match self {
            Function3::Poly(p) => Function3::Poly(Polynomial::new(p.terms.iter().map(|t| Monomial {
                exps: t.exps,
                coeff: c * t.coeff,
            }))),
            Function3::TrigProd(t) => Function3::TrigProd(TrigProduct {
                amplitude: c * t.amplitude,
                factors: t.factors,
            }),
            Function3::Tabulated(v) => Function3::Tabulated(v.iter().map(|x| c * x).collect()),
        }
    }
}

impl fmt::Display for Function3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Function3::Poly(p) => {
                let parts: Vec<String> = p
                    .terms
                    .iter()
                    .map(|t| format!("{}*{}", t.coeff, Polynomial::key(t.exps)))
                    .collect();
                write!(
                    f,
                    "{}",
                    if parts.is_empty() {
                        "0".into()
                    } else {
                        parts.join(" + ")
                    }
                )
            }
            Function3::TrigProd(t) => write!(f, "{}*g(x)g(y)g(z)", t.amplitude),
            Function3::Tabulated(v) => write!(f, "tabulated[{}]", v.len()),
        }
    }
}
