//! Finitely represented bounded time scales.
//!
//! Every scale is materialized as a strictly increasing list of points, so
//! every point except the maximum is right-scattered and all delta operations
//! reduce to exact finite differences and sums.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used to snap a real number onto a scale point.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Literal form of a time scale, as it appears in scenario files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ScaleSpec {
    Finite { points: Vec<f64> },
    Uniform { start: f64, stop: f64, step: f64 },
    Geometric { start: f64, ratio: f64, count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleKind {
    FiniteSet,
    UniformGrid,
    GeometricGrid,
}

impl ScaleKind {
    pub fn name(self) -> &'static str {
        match self {
            ScaleKind::FiniteSet => "finite",
            ScaleKind::UniformGrid => "uniform",
            ScaleKind::GeometricGrid => "geometric",
        }
    }
}

/// A nonempty, bounded, finite time scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScaleSpec", into = "ScaleSpec")]
pub struct TimeScale {
    spec: ScaleSpec,
    points: Vec<f64>,
    tol: f64,
}

impl TryFrom<ScaleSpec> for TimeScale {
    type Error = Error;

    fn try_from(spec: ScaleSpec) -> Result<Self> {
        TimeScale::from_spec(spec)
    }
}

impl From<TimeScale> for ScaleSpec {
    fn from(ts: TimeScale) -> Self {
        ts.spec
    }
}

impl TimeScale {
    pub fn from_spec(spec: ScaleSpec) -> Result<Self> {
        let points = match &spec {
            ScaleSpec::Finite { points } => {
                let mut pts = points.clone();
                if pts.iter().any(|p| !p.is_finite()) {
                    return Err(Error::InvalidScale("finite scale has a non-finite point".into()));
                }
                pts.sort_by(f64::total_cmp);
                pts
            }
            ScaleSpec::Uniform { start, stop, step } => uniform_points(*start, *stop, *step)?,
            ScaleSpec::Geometric { start, ratio, count } => {
                if !(start.is_finite() && *start > 0.0) {
                    return Err(Error::InvalidScale("geometric start must be > 0".into()));
                }
                if !(ratio.is_finite() && *ratio > 1.0) {
                    return Err(Error::InvalidScale("geometric ratio must be > 1".into()));
                }
                (0..*count)
                    .map(|i| start * crate::function::ipow(*ratio, i as u32))
                    .collect()
            }
        };
        if points.is_empty() {
            return Err(Error::InvalidScale("time scale has no points".into()));
        }
        if let Some(w) = points.windows(2).find(|w| w[1] - w[0] <= DEFAULT_TOLERANCE) {
            return Err(Error::InvalidScale(format!(
                "points {} and {} coincide within tolerance",
                w[0], w[1]
            )));
        }
        Ok(TimeScale {
            spec,
            points,
            tol: DEFAULT_TOLERANCE,
        })
    }

    pub fn finite(points: impl Into<Vec<f64>>) -> Result<Self> {
        Self::from_spec(ScaleSpec::Finite { points: points.into() })
    }

    pub fn uniform(start: f64, stop: f64, step: f64) -> Result<Self> {
        Self::from_spec(ScaleSpec::Uniform { start, stop, step })
    }

    pub fn geometric(start: f64, ratio: f64, count: usize) -> Result<Self> {
        Self::from_spec(ScaleSpec::Geometric { start, ratio, count })
    }

    /// The unit-step integer scale `{first, first + 1, ..., last}`.
    pub fn integers(first: i64, last: i64) -> Result<Self> {
        Self::finite((first..=last).map(|v| v as f64).collect::<Vec<_>>())
    }

    /// Replaces the membership tolerance (absolute).
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn kind(&self) -> ScaleKind {
        match self.spec {
            ScaleSpec::Finite { .. } => ScaleKind::FiniteSet,
            ScaleSpec::Uniform { .. } => ScaleKind::UniformGrid,
            ScaleSpec::Geometric { .. } => ScaleKind::GeometricGrid,
        }
    }

    pub fn spec(&self) -> &ScaleSpec {
        &self.spec
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.points[0]
    }

    pub fn max(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Index of the scale point within tolerance of `t`.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let i = self.points.partition_point(|&p| p < t - self.tol);
        match self.points.get(i) {
            Some(&p) if (p - t).abs() <= self.tol => Ok(i),
            _ => Err(Error::NotInScale { value: t }),
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        self.index_of(t).is_ok()
    }

    /// Forward jump. The maximum is its own successor.
    pub fn sigma(&self, t: f64) -> Result<f64> {
        let i = self.index_of(t)?;
        Ok(self.points[self.sigma_index(i)])
    }

    /// Backward jump. The minimum is its own predecessor.
    pub fn rho(&self, t: f64) -> Result<f64> {
        let i = self.index_of(t)?;
        Ok(self.points[i.saturating_sub(1)])
    }

    /// `sigma(t) - t`.
    pub fn graininess(&self, t: f64) -> Result<f64> {
        let i = self.index_of(t)?;
        Ok(self.graininess_at(i))
    }

    pub fn sigma_index(&self, i: usize) -> usize {
        (i + 1).min(self.points.len() - 1)
    }

    pub fn graininess_at(&self, i: usize) -> f64 {
        self.points[self.sigma_index(i)] - self.points[i]
    }

    /// Points `u` with `a <= u < b`, in increasing order.
    pub fn points_in(&self, a: f64, b: f64) -> Result<&[f64]> {
        let (i, j) = self.index_range(a, b)?;
        Ok(&self.points[i..j])
    }

    /// Index range `[i, j)` of the points of `[a, b)`.
    pub fn index_range(&self, a: f64, b: f64) -> Result<(usize, usize)> {
        let i = self.index_of(a)?;
        let j = self.index_of(b)?;
        if i > j {
            return Err(Error::ReversedInterval { a, b });
        }
        Ok((i, j))
    }

    /// Uniform grid with the same endpoints and step `h / 2^level`.
    pub fn refine(&self, level: u32) -> Result<TimeScale> {
        match self.spec {
            ScaleSpec::Uniform { start, stop, step } => {
                if level == 0 {
                    return Ok(self.clone());
                }
                let fine = step / (1u64 << level) as f64;
                Ok(TimeScale::uniform(start, stop, fine)?.with_tolerance(self.tol))
            }
            _ => Err(Error::UnsupportedKind {
                kind: self.kind().name(),
            }),
        }
    }

    /// Step of a uniform grid.
    pub fn step(&self) -> Option<f64> {
        match self.spec {
            ScaleSpec::Uniform { step, .. } => Some(step),
            _ => None,
        }
    }
}

fn uniform_points(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(Error::InvalidScale("uniform parameters must be finite".into()));
    }
    if step <= 0.0 {
        return Err(Error::InvalidScale("uniform step must be > 0".into()));
    }
    if stop < start {
        return Err(Error::InvalidScale("uniform stop lies below start".into()));
    }
    let n = (stop - start) / step;
    let intervals = n.round();
    if (n - intervals).abs() > 1e-9 * n.max(1.0) {
        return Err(Error::InvalidScale(format!(
            "step {step} does not divide [{start}, {stop}]"
        )));
    }
    let count = intervals as usize + 1;
    Ok((0..count)
        .map(|i| if i + 1 == count { stop } else { start + i as f64 * step })
        .collect())
}
