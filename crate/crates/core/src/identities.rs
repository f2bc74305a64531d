//! Octant representation identities and the averaged functionals `A` and `B`.
//!
//! For a grid point `p = (x, y, z)` with `sigma_i(base) <= p_i <= b_i`, each
//! axis is split at `p_i` into a low part `[sigma_i(base), p_i)` and a high
//! part `[p_i, b_i)`. Choosing one part per axis gives eight octants. On each
//! octant, telescoping the triple delta integral of the mixed partial gives
//!
//! ```text
//! f(p) = sum over nonempty S of {x,y,z} of (-1)^(|S|+1) f(p with S moved to its endpoint)
//!        + (-1)^(#high axes) * integral over the octant of f^{Δ3Δ2Δ1}
//! ```
//!
//! where the endpoint of a low axis is `sigma_i(base)` and of a high axis is
//! `b_i`. All eight identities are generated from this one expansion.

use crate::calculus::{mixed_partial, triple_sum_local, MixedPartialField, PrefixIntegrator};
use crate::domain::{Box3, GridIndex};
use crate::error::{Error, Result};
use crate::function::{Function3, Grid3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Integrate from `sigma_i(base)` up to the coordinate.
    Low,
    /// Integrate from the coordinate up to `b_i`.
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Octant(pub [Side; 3]);

use Side::{High, Low};

impl Octant {
    /// All octants, ordered by how many axes are high.
    pub const ALL: [Octant; 8] = [
        Octant([Low, Low, Low]),
        Octant([Low, Low, High]),
        Octant([Low, High, Low]),
        Octant([High, Low, Low]),
        Octant([Low, High, High]),
        Octant([High, High, Low]),
        Octant([High, Low, High]),
        Octant([High, High, High]),
    ];

    /// Position in [`Octant::ALL`].
    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&o| o == self).expect("octant listed")
    }

    /// Short name such as `"LHL"`, axes in x, y, z order.
    pub fn label(self) -> String {
        self.0.iter().map(|s| if *s == Side::Low { 'L' } else { 'H' }).collect()
    }

    pub fn high_count(self) -> usize {
        self.0.iter().filter(|&&s| s == High).count()
    }

    /// Sign of the triple integral in the octant's identity.
    pub fn integral_sign(self) -> f64 {
        if self.high_count().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Endpoint local index per axis: `sigma_i(base)` for low, `b_i` for high.
    pub fn endpoints(self, domain: &Box3) -> GridIndex {
        let c = domain.corner();
        let u = domain.upper();
        [0, 1, 2].map(|a| match self.0[a] {
            Low => c[a],
            High => u[a],
        })
    }

    /// Local index range `[lo, hi)` of the octant sub-box around `p`.
    pub fn sub_box(self, domain: &Box3, p: GridIndex) -> (GridIndex, GridIndex) {
        let c = domain.corner();
        let u = domain.upper();
        let mut lo = [0; 3];
        let mut hi = [0; 3];
        for a in 0..3 {
            (lo[a], hi[a]) = match self.0[a] {
                Low => (c[a], p[a]),
                High => (p[a], u[a]),
            };
        }
        (lo, hi)
    }

    pub fn corner_combination(self) -> CornerCombination {
        CornerCombination::for_octant(self)
    }
}

/// One signed boundary evaluation: the axes flagged `true` are moved to the
/// octant endpoint, the others stay at `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CornerTerm {
    pub positive: bool,
    pub moved: [bool; 3],
}

/// The seven boundary terms and the integral sign of one octant identity.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerCombination {
    pub octant: Octant,
    pub terms: Vec<CornerTerm>,
    pub integral_sign: f64,
}

impl CornerCombination {
    pub fn for_octant(octant: Octant) -> Self {
        let terms = (1u8..8)
            .map(|mask| {
                let moved = [mask & 1 != 0, mask & 2 != 0, mask & 4 != 0];
                let size = moved.iter().filter(|&&m| m).count();
                CornerTerm {
                    positive: size % 2 == 1,
                    moved,
                }
            })
            .collect();
        CornerCombination {
            octant,
            terms,
            integral_sign: octant.integral_sign(),
        }
    }

    /// Sum of the signed boundary evaluations at `p`.
    pub fn evaluate(&self, f: &Grid3, domain: &Box3, p: GridIndex) -> f64 {
        let e = self.octant.endpoints(domain);
        let mut pos = 0.0;
        let mut neg = 0.0;
        for t in &self.terms {
            let q = [0, 1, 2].map(|a| if t.moved[a] { e[a] } else { p[a] });
            if t.positive {
                pos += f.get(q);
            } else {
                neg += f.get(q);
            }
        }
        pos - neg
    }
}

fn check_range(domain: &Box3, p: GridIndex, err: fn(usize, [f64; 3]) -> Error) -> Result<()> {
    let c = domain.corner();
    let u = domain.upper();
    for a in 0..3 {
        if p[a] < c[a] || p[a] > u[a] {
            return Err(err(a, domain.point(p)));
        }
    }
    Ok(())
}

fn octant_err(axis: usize, point: [f64; 3]) -> Error {
    Error::OutOfOctantRange { axis, point }
}

fn range_err(axis: usize, point: [f64; 3]) -> Error {
    Error::OutOfRange { axis, point }
}

/// Right-hand side of an octant identity at `p`, with the octant integral
/// computed as an iterated delta integral. Equals `f(p)`.
pub fn octant_identity_rhs(f: &Function3, octant: Octant, p: [f64; 3], domain: &Box3) -> Result<f64> {
    let values = f.sample(domain)?;
    let mixed = mixed_partial(&values, domain)?;
    let idx = domain.locate(p).map_err(|_| octant_err(0, p))?;
    check_range(domain, idx, octant_err)?;
    let (lo, hi) = octant.sub_box(domain, idx);
    let integral = triple_sum_local(domain, lo, hi, |q| mixed.get(q));
    let comb = octant.corner_combination();
    Ok(comb.evaluate(&values, domain, idx) + comb.integral_sign * integral)
}

/// `|f(p) - octant_identity_rhs(f, octant, p)|`.
pub fn identity_residual(f: &Function3, octant: Octant, p: [f64; 3], domain: &Box3) -> Result<f64> {
    let rhs = octant_identity_rhs(f, octant, p, domain)?;
    let idx = domain.locate(p)?;
    Ok((f.sample(domain)?.get(idx) - rhs).abs())
}

/// Signs of the eight octant integrals in `B`, in [`Octant::ALL`] order.
pub const B_SIGNS: [f64; 8] = [1.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, -1.0];

/// A sampled function together with its mixed partial and a prefix-sum
/// integrator, for evaluating identities at many points.
#[derive(Debug, Clone)]
pub struct Analysis<'a> {
    domain: &'a Box3,
    values: Grid3,
    mixed: MixedPartialField,
    integrator: PrefixIntegrator,
}

impl<'a> Analysis<'a> {
    pub fn new(f: &Function3, domain: &'a Box3) -> Result<Self> {
        Self::from_values(f.sample(domain)?, domain)
    }

    pub fn from_values(values: Grid3, domain: &'a Box3) -> Result<Self> {
        let mixed = mixed_partial(&values, domain)?;
        let integrator = PrefixIntegrator::new(&mixed.values, domain);
        Ok(Analysis {
            domain,
            values,
            mixed,
            integrator,
        })
    }

    pub fn domain(&self) -> &Box3 {
        self.domain
    }

    pub fn values(&self) -> &Grid3 {
        &self.values
    }

    pub fn mixed(&self) -> &MixedPartialField {
        &self.mixed
    }

    pub fn value(&self, p: GridIndex) -> f64 {
        self.values.get(p)
    }

    /// Integral of the mixed partial over an octant around `p`.
    pub fn octant_integral(&self, octant: Octant, p: GridIndex) -> f64 {
        let (lo, hi) = octant.sub_box(self.domain, p);
        self.integrator.integral(lo, hi)
    }

    pub fn octant_identity_rhs(&self, octant: Octant, p: GridIndex) -> Result<f64> {
        check_range(self.domain, p, octant_err)?;
        let comb = octant.corner_combination();
        Ok(comb.evaluate(&self.values, self.domain, p) + comb.integral_sign * self.octant_integral(octant, p))
    }

    pub fn identity_residual(&self, octant: Octant, p: GridIndex) -> Result<f64> {
        Ok((self.value(p) - self.octant_identity_rhs(octant, p)?).abs())
    }

    /// The averaged corner-and-face combination `A(f)` at `p`.
    pub fn functional_a(&self, p: GridIndex) -> Result<f64> {
        check_range(self.domain, p, range_err)?;
        let [x, y, z] = p;
        let c = self.domain.corner();
        let b = self.domain.upper();
        let f = |i, j, k| self.values.get([i, j, k]);
        let (c1, c2, c3) = (c[0], c[1], c[2]);
        let (b1, b2, b3) = (b[0], b[1], b[2]);

        let corners = f(c1, c2, c3)
            + f(b1, b2, b3)
            + f(c1, c2, b3)
            + f(c1, b2, c3)
            + f(b1, c2, c3)
            + f(c1, b2, b3)
            + f(b1, b2, c3)
            + f(b1, c2, b3);
        let x_edges = f(x, c2, c3) + f(x, b2, b3) + f(x, b2, c3) + f(x, c2, b3);
        let y_edges = f(c1, y, c3) + f(b1, y, b3) + f(c1, y, b3) + f(b1, y, c3);
        let z_edges = f(c1, c2, z) + f(b1, b2, z) + f(b1, c2, z) + f(c1, b2, z);
        let x_faces = f(c1, y, z) + f(b1, y, z);
        let y_faces = f(x, c2, z) + f(x, b2, z);
        let z_faces = f(x, y, c3) + f(x, y, b3);

        Ok(corners / 8.0 - (x_edges + y_edges + z_edges) / 4.0 + (x_faces + y_faces + z_faces) / 2.0)
    }

    /// Signed sum `B` of the eight octant integrals of the mixed partial at `p`.
    pub fn functional_b(&self, p: GridIndex) -> Result<f64> {
        check_range(self.domain, p, range_err)?;
        Ok(Octant::ALL
            .iter()
            .zip(B_SIGNS)
            .map(|(&o, s)| s * self.octant_integral(o, p))
            .sum())
    }

    /// `|f(p) - A(f)(p) - B(p) / 8|`.
    pub fn averaged_identity_residual(&self, p: GridIndex) -> Result<f64> {
        Ok((self.value(p) - self.functional_a(p)? - self.functional_b(p)? / 8.0).abs())
    }

    /// Local indices of `[sigma(base), b]`, where every identity applies.
    pub fn admissible_points(&self) -> impl Iterator<Item = GridIndex> {
        let u = self.domain.upper();
        Box3::indices(self.domain.corner(), [u[0] + 1, u[1] + 1, u[2] + 1])
    }
}

/// `A(f)` at a point given in coordinates.
pub fn functional_a(f: &Function3, p: [f64; 3], domain: &Box3) -> Result<f64> {
    let an = Analysis::new(f, domain)?;
    an.functional_a(domain.locate(p)?)
}

/// `B(f)` at a point given in coordinates, octant integrals iterated directly.
pub fn functional_b(f: &Function3, p: [f64; 3], domain: &Box3) -> Result<f64> {
    let values = f.sample(domain)?;
    let mixed = mixed_partial(&values, domain)?;
    let idx = domain.locate(p)?;
    check_range(domain, idx, range_err)?;
    Ok(Octant::ALL
        .iter()
        .zip(B_SIGNS)
        .map(|(&o, s)| {
            let (lo, hi) = o.sub_box(domain, idx);
            s * triple_sum_local(domain, lo, hi, |q| mixed.get(q))
        })
        .sum())
}

pub fn averaged_identity_residual(f: &Function3, p: [f64; 3], domain: &Box3) -> Result<f64> {
    let an = Analysis::new(f, domain)?;
    an.averaged_identity_residual(domain.locate(p)?)
}
