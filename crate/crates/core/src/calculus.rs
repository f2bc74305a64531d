//! Delta derivatives and delta integrals on a box.
//!
//! On a materialized scale every point below the maximum is right-scattered,
//! so the delta derivative is the forward difference quotient
//! `(f(sigma(u)) - f(u)) / mu(u)` and the delta integral over `[a, b)` is
//! `sum f(u) mu(u)`. Sums use pairwise summation in ascending index order,
//! which keeps results bit-reproducible.

use crate::domain::{Box3, GridIndex};
use crate::error::{Error, Result};
use crate::function::Grid3;
use crate::timescale::TimeScale;

const PAIRWISE_BLOCK: usize = 8;

/// Pairwise (cascade) summation in fixed order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= PAIRWISE_BLOCK {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        s
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

/// Partial delta derivative along `axis` at local grid index `p`.
pub fn partial_delta(f: &Grid3, domain: &Box3, axis: usize, p: GridIndex) -> Result<f64> {
    if p[axis] + 1 >= domain.dims()[axis] {
        return Err(Error::AtScaleMax {
            axis,
            value: domain.coord(axis, p[axis]),
        });
    }
    let mut q = p;
    q[axis] += 1;
    Ok((f.get(q) - f.get(p)) / domain.mu(axis, p[axis]))
}

/// Forward difference quotients of a grid along one axis. The grid's first
/// index on every axis is taken to be local index 0 of `domain`.
pub fn difference_along(f: &Grid3, domain: &Box3, axis: usize) -> Grid3 {
    let mut dims = f.dims();
    dims[axis] -= 1;
    Grid3::from_fn(dims, |p| {
        let mut q = p;
        q[axis] += 1;
        (f.get(q) - f.get(p)) / domain.mu(axis, p[axis])
    })
}

/// Values of the mixed third partial on `[a1,b1) x [a2,b2) x [a3,b3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedPartialField {
    pub values: Grid3,
    pub sup_norm: f64,
}

impl MixedPartialField {
    fn from_values(values: Grid3) -> Self {
        let sup_norm = values.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        MixedPartialField { values, sup_norm }
    }

    pub fn get(&self, idx: GridIndex) -> f64 {
        self.values.get(idx)
    }
}

fn check_domain(domain: &Box3) -> Result<()> {
    match domain.dims().iter().position(|&n| n < 2) {
        Some(axis) => Err(Error::DomainTooSmall { axis }),
        None => Ok(()),
    }
}

/// Mixed partial `f^{Δ3Δ2Δ1}`: differences along x, then y, then z.
pub fn mixed_partial(f: &Grid3, domain: &Box3) -> Result<MixedPartialField> {
    mixed_partial_in_order(f, domain, [0, 1, 2])
}

/// Mixed partial with an explicit differencing order (a permutation of 0, 1, 2).
pub fn mixed_partial_in_order(f: &Grid3, domain: &Box3, order: [usize; 3]) -> Result<MixedPartialField> {
    check_domain(domain)?;
    let mut sorted = order;
    sorted.sort();
    assert_eq!(sorted, [0, 1, 2], "order must be a permutation of the axes");
    let mut g = f.clone();
    for axis in order {
        g = difference_along(&g, domain, axis);
    }
    Ok(MixedPartialField::from_values(g))
}

/// `sup |f^{Δ3Δ2Δ1}|` over the box.
pub fn sup_norm_mixed(f: &Grid3, domain: &Box3) -> Result<f64> {
    Ok(mixed_partial(f, domain)?.sup_norm)
}

/// Cauchy delta integral of `h` over `[a, b)`.
pub fn delta_integral_1d(h: impl Fn(f64) -> f64, ts: &TimeScale, a: f64, b: f64) -> Result<f64> {
    let (i, j) = ts.index_range(a, b)?;
    let terms: Vec<f64> = (i..j).map(|k| h(ts.points()[k]) * ts.graininess_at(k)).collect();
    Ok(pairwise_sum(&terms))
}

/// Iterated delta integral over `[lo, hi)` given in coordinates. `h` receives
/// local box indices. The innermost integral runs along z.
pub fn triple_delta_integral(domain: &Box3, lo: [f64; 3], hi: [f64; 3], h: impl Fn(GridIndex) -> f64) -> Result<f64> {
    let mut l = [0; 3];
    let mut u = [0; 3];
    for axis in 0..3 {
        let (i, j) = domain.scale(axis).index_range(lo[axis], hi[axis])?;
        let off = domain.offset()[axis];
        if i < off || j > off + domain.dims()[axis] - 1 {
            return Err(Error::OutOfRange {
                axis,
                point: if i < off { lo } else { hi },
            });
        }
        l[axis] = i - off;
        u[axis] = j - off;
    }
    Ok(triple_sum_local(domain, l, u, h))
}

/// `sum h(p) mu1 mu2 mu3` over local indices `[lo, hi)`, iterated z, y, x.
pub fn triple_sum_local(domain: &Box3, lo: GridIndex, hi: GridIndex, h: impl Fn(GridIndex) -> f64) -> f64 {
    let mut xs = Vec::with_capacity(hi[0].saturating_sub(lo[0]));
    let mut ys = Vec::with_capacity(hi[1].saturating_sub(lo[1]));
    let mut zs = Vec::with_capacity(hi[2].saturating_sub(lo[2]));
    for i in lo[0]..hi[0] {
        ys.clear();
        for j in lo[1]..hi[1] {
            zs.clear();
            zs.extend((lo[2]..hi[2]).map(|k| h([i, j, k]) * domain.mu(2, k)));
            ys.push(pairwise_sum(&zs) * domain.mu(1, j));
        }
        xs.push(pairwise_sum(&ys) * domain.mu(0, i));
    }
    pairwise_sum(&xs)
}

/// Constant-time delta integrals of a field over sub-boxes, via a 3-D
/// prefix-sum table of `w(p) mu1 mu2 mu3`.
#[derive(Debug, Clone)]
pub struct PrefixIntegrator {
    // dims = field dims + 1 on each axis; entry [i,j,k] sums [0,i)x[0,j)x[0,k)
    table: Grid3,
}

impl PrefixIntegrator {
    pub fn new(field: &Grid3, domain: &Box3) -> Self {
        let [n1, n2, n3] = field.dims();
        let dims = [n1 + 1, n2 + 1, n3 + 1];
        let mut t = vec![0.0; dims.iter().product()];
        let at = |i: usize, j: usize, k: usize| (i * dims[1] + j) * dims[2] + k;
        for i in 0..n1 {
            for j in 0..n2 {
                for k in 0..n3 {
                    let w = field.get([i, j, k]) * domain.mu(0, i) * domain.mu(1, j) * domain.mu(2, k);
                    t[at(i + 1, j + 1, k + 1)] = w;
                }
            }
        }
        for i in 1..=n1 {
            for j in 1..=n2 {
                for k in 1..=n3 {
                    t[at(i, j, k)] += t[at(i, j, k - 1)];
                }
            }
        }
        for i in 1..=n1 {
            for j in 1..=n2 {
                for k in 1..=n3 {
                    t[at(i, j, k)] += t[at(i, j - 1, k)];
                }
            }
        }
        for i in 1..=n1 {
            for j in 1..=n2 {
                for k in 1..=n3 {
                    t[at(i, j, k)] += t[at(i - 1, j, k)];
                }
            }
        }
        PrefixIntegrator {
            table: Grid3::new(dims, t).expect("table shape"),
        }
    }

    /// Integral over local indices `[lo, hi)`; `lo <= hi` componentwise.
    #[inline]
    pub fn integral(&self, lo: GridIndex, hi: GridIndex) -> f64 {
        let p = |i, j, k| self.table.get([i, j, k]);
        let [a, b, c] = lo;
        let [x, y, z] = hi;
        // group the inclusion-exclusion as differences along z first
        let dz = |i, j| p(i, j, z) - p(i, j, c);
        (dz(x, y) - dz(x, b)) - (dz(a, y) - dz(a, b))
    }
}
