//! Brute-force reference computations, written directly from the definitions
//! and sharing no code with the calculus and identity modules beyond the
//! scale point lists. Used to generate regression fixtures and in tests.

use crate::domain::Box3;

/// Forward jump by linear scan.
pub fn sigma(points: &[f64], t: f64) -> f64 {
    let next = points.iter().copied().filter(|&u| u > t).fold(f64::INFINITY, f64::min);
    // the maximum maps to itself
    if next.is_finite() {
        next
    } else {
        t
    }
}

/// Points of `[a, b)` by linear scan.
pub fn interval(points: &[f64], a: f64, b: f64) -> Vec<f64> {
    points.iter().copied().filter(|&u| u >= a && u < b).collect()
}

/// Mixed third delta derivative of a closed form at `(x, y, z)` by the
/// eight-term difference formula.
pub fn mixed(f: &dyn Fn(f64, f64, f64) -> f64, scales: [&[f64]; 3], p: [f64; 3]) -> f64 {
    let s = [0, 1, 2].map(|a| sigma(scales[a], p[a]));
    let mut acc = 0.0;
    for mask in 0u8..8 {
        let q = [0, 1, 2].map(|a| if mask >> a & 1 == 1 { s[a] } else { p[a] });
        // prod_i (E_i - 1): the term moving k axes has sign (-1)^(3 - k)
        let sign = if mask.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
        acc += sign * f(q[0], q[1], q[2]);
    }
    acc / ((s[0] - p[0]) * (s[1] - p[1]) * (s[2] - p[2]))
}

/// Flat triple sum of `h * mu1 mu2 mu3` over `[lo, hi)`, no reordering tricks.
pub fn triple_sum(scales: [&[f64]; 3], lo: [f64; 3], hi: [f64; 3], h: &dyn Fn(f64, f64, f64) -> f64) -> f64 {
    let mut acc = 0.0;
    for &x in &interval(scales[0], lo[0], hi[0]) {
        for &y in &interval(scales[1], lo[1], hi[1]) {
            for &z in &interval(scales[2], lo[2], hi[2]) {
                let w = (sigma(scales[0], x) - x) * (sigma(scales[1], y) - y) * (sigma(scales[2], z) - z);
                acc += h(x, y, z) * w;
            }
        }
    }
    acc
}

/// Reference evaluator for one box.
pub struct BruteForce<'a> {
    pub f: &'a dyn Fn(f64, f64, f64) -> f64,
    pub scales: [Vec<f64>; 3],
    /// `sigma_i(base_i)`.
    pub corner: [f64; 3],
    pub lower: [f64; 3],
    pub upper: [f64; 3],
}

impl<'a> BruteForce<'a> {
    pub fn new(f: &'a dyn Fn(f64, f64, f64) -> f64, domain: &Box3) -> Self {
        let scales = [0, 1, 2].map(|a| domain.scale(a).points().to_vec());
        let corner = [0, 1, 2].map(|a| sigma(&scales[a], domain.base()[a]));
        BruteForce {
            f,
            scales,
            corner,
            lower: domain.lo(),
            upper: domain.hi(),
        }
    }

    fn refs(&self) -> [&[f64]; 3] {
        [&self.scales[0], &self.scales[1], &self.scales[2]]
    }

    fn mixed_at(&self, x: f64, y: f64, z: f64) -> f64 {
        mixed(self.f, self.refs(), [x, y, z])
    }

    /// Octant corner combinations averaged over all eight octants.
    pub fn functional_a(&self, p: [f64; 3]) -> f64 {
        let mut total = 0.0;
        for oct in 0u8..8 {
            let e = [0, 1, 2].map(|a| {
                if oct >> a & 1 == 1 {
                    self.upper[a]
                } else {
                    self.corner[a]
                }
            });
            for mask in 1u8..8 {
                let q = [0, 1, 2].map(|a| if mask >> a & 1 == 1 { e[a] } else { p[a] });
                let sign = if mask.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
                total += sign * (self.f)(q[0], q[1], q[2]);
            }
        }
        total / 8.0
    }

    /// Signed octant integrals of the mixed partial summed with sign `(-1)^#high`.
    pub fn functional_b(&self, p: [f64; 3]) -> f64 {
        let mut total = 0.0;
        for oct in 0u8..8 {
            let mut lo = [0.0; 3];
            let mut hi = [0.0; 3];
            for a in 0..3 {
                if oct >> a & 1 == 1 {
                    (lo[a], hi[a]) = (p[a], self.upper[a]);
                } else {
                    (lo[a], hi[a]) = (self.corner[a], p[a]);
                }
            }
            let sign = if oct.count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            total += sign * triple_sum(self.refs(), lo, hi, &|x, y, z| self.mixed_at(x, y, z));
        }
        total
    }

    /// `(lhs, rhs)` of the Ostrowski type check with the sup-norm bound.
    pub fn ostrowski(&self) -> (f64, f64) {
        let lhs = triple_sum(self.refs(), self.corner, self.upper, &|x, y, z| {
            (self.f)(x, y, z) - self.functional_a([x, y, z])
        })
        .abs();
        let v = self.volume();
        (lhs, v * v * self.sup_mixed() / 8.0)
    }

    fn volume(&self) -> f64 {
        (0..3).map(|a| self.upper[a] - self.corner[a]).product()
    }

    /// Largest `|mixed partial|` over grid points of `[lo, hi)`.
    pub fn sup_mixed(&self) -> f64 {
        let mut sup = 0.0f64;
        for &x in &interval(&self.scales[0], self.lower[0], self.upper[0]) {
            for &y in &interval(&self.scales[1], self.lower[1], self.upper[1]) {
                for &z in &interval(&self.scales[2], self.lower[2], self.upper[2]) {
                    sup = sup.max(self.mixed_at(x, y, z).abs());
                }
            }
        }
        sup
    }

    /// `(lhs, rhs)` of the Cebysev type check against `other` on the same box.
    pub fn cebysev(&self, other: &BruteForce) -> (f64, f64) {
        let (f, g) = (self.f, other.f);
        let lhs = triple_sum(self.refs(), self.corner, self.upper, &|x, y, z| {
            let p = [x, y, z];
            f(x, y, z) * g(x, y, z) - 0.5 * (f(x, y, z) * other.functional_a(p) + g(x, y, z) * self.functional_a(p))
        })
        .abs();
        let (sf, sg) = (self.sup_mixed(), other.sup_mixed());
        let weight = triple_sum(self.refs(), self.corner, self.upper, &|x, y, z| {
            g(x, y, z).abs() * sf + f(x, y, z).abs() * sg
        });
        (lhs, self.volume() * weight / 16.0)
    }
}
