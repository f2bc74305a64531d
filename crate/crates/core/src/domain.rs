//! The product domain `[a1,b1] x [a2,b2] x [a3,b3]` with its base point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timescale::TimeScale;

/// Index of a box grid point, local to the box: `[0, 0, 0]` is `(a1, a2, a3)`.
pub type GridIndex = [usize; 3];

/// A box over three time scales together with the base point `(s, t, tau)`.
///
/// Axes are numbered 0, 1, 2 for `x`, `y`, `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BoxSpec", into = "BoxSpec")]
pub struct Box3 {
    scales: [TimeScale; 3],
    lo: [f64; 3],
    hi: [f64; 3],
    base: [f64; 3],
    lo_idx: [usize; 3],
    dims: [usize; 3],
    corner: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub scales: [TimeScale; 3],
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<[f64; 3]>,
}

impl TryFrom<BoxSpec> for Box3 {
    type Error = Error;
    fn try_from(s: BoxSpec) -> Result<Self> {
        Box3::new(s.scales, s.lo, s.hi, s.base)
    }
}

impl From<Box3> for BoxSpec {
    fn from(b: Box3) -> Self {
        BoxSpec {
            scales: b.scales,
            lo: b.lo,
            hi: b.hi,
            base: Some(b.base),
        }
    }
}

impl Box3 {
    /// Builds a box; `base` defaults to the lower corner `(a1, a2, a3)`.
    pub fn new(scales: [TimeScale; 3], lo: [f64; 3], hi: [f64; 3], base: Option<[f64; 3]>) -> Result<Self> {
        let base = base.unwrap_or(lo);
        let mut lo_idx = [0; 3];
        let mut dims = [0; 3];
        let mut corner = [0; 3];
        for axis in 0..3 {
            let ts = &scales[axis];
            let member = |v: f64, what: &str| {
                ts.index_of(v)
                    .map_err(|_| Error::InvalidBox(format!("{what}[{axis}] = {v} is not a point of its scale")))
            };
            let l = member(lo[axis], "lo")?;
            let h = member(hi[axis], "hi")?;
            let s = member(base[axis], "base")?;
            if l >= h {
                return Err(Error::InvalidBox(format!(
                    "axis {axis}: need a < b, got [{}, {}]",
                    lo[axis], hi[axis]
                )));
            }
            let c = ts.sigma_index(s);
            if c < l || c > h {
                return Err(Error::InvalidBox(format!(
                    "axis {axis}: sigma(base) = {} lies outside [{}, {}]",
                    ts.points()[c],
                    lo[axis],
                    hi[axis]
                )));
            }
            lo_idx[axis] = l;
            dims[axis] = h - l + 1;
            corner[axis] = c - l;
        }
        Ok(Box3 {
            scales,
            lo,
            hi,
            base,
            lo_idx,
            dims,
            corner,
        })
    }

    /// The box covering each scale from its minimum to its maximum.
    pub fn spanning(scales: [TimeScale; 3], base: Option<[f64; 3]>) -> Result<Self> {
        let lo = [scales[0].min(), scales[1].min(), scales[2].min()];
        let hi = [scales[0].max(), scales[1].max(), scales[2].max()];
        Self::new(scales, lo, hi, base)
    }

    pub fn scales(&self) -> &[TimeScale; 3] {
        &self.scales
    }

    pub fn scale(&self, axis: usize) -> &TimeScale {
        &self.scales[axis]
    }

    pub fn lo(&self) -> [f64; 3] {
        self.lo
    }

    pub fn hi(&self) -> [f64; 3] {
        self.hi
    }

    pub fn base(&self) -> [f64; 3] {
        self.base
    }

    /// Number of grid points per axis in `[a_i, b_i]`.
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Global scale index of local index 0 on each axis.
    pub fn offset(&self) -> [usize; 3] {
        self.lo_idx
    }

    /// Local index of `sigma_i(base_i)`.
    pub fn corner(&self) -> GridIndex {
        self.corner
    }

    /// Local index of `b_i`.
    pub fn upper(&self) -> GridIndex {
        [self.dims[0] - 1, self.dims[1] - 1, self.dims[2] - 1]
    }

    /// `(sigma1(s), sigma2(t), sigma3(tau))`.
    pub fn corner_point(&self) -> [f64; 3] {
        [0, 1, 2].map(|a| self.coord(a, self.corner[a]))
    }

    pub fn coord(&self, axis: usize, local: usize) -> f64 {
        self.scales[axis].points()[self.lo_idx[axis] + local]
    }

    pub fn point(&self, idx: GridIndex) -> [f64; 3] {
        [0, 1, 2].map(|a| self.coord(a, idx[a]))
    }

    /// Graininess at a local index.
    pub fn mu(&self, axis: usize, local: usize) -> f64 {
        self.scales[axis].graininess_at(self.lo_idx[axis] + local)
    }

    /// Local grid index of a point given in coordinates.
    pub fn locate(&self, p: [f64; 3]) -> Result<GridIndex> {
        let mut idx = [0; 3];
        for axis in 0..3 {
            let g = self.scales[axis].index_of(p[axis])?;
            if g < self.lo_idx[axis] || g >= self.lo_idx[axis] + self.dims[axis] {
                return Err(Error::OutOfRange { axis, point: p });
            }
            idx[axis] = g - self.lo_idx[axis];
        }
        Ok(idx)
    }

    /// `prod_i (b_i - sigma_i(base_i))`.
    pub fn corner_volume(&self) -> f64 {
        let c = self.corner_point();
        (0..3).map(|a| self.hi[a] - c[a]).product()
    }

    pub fn flat(&self, idx: GridIndex) -> usize {
        (idx[0] * self.dims[1] + idx[1]) * self.dims[2] + idx[2]
    }

    /// Iterates the local indices of `[lo, hi)` in row-major order.
    pub fn indices(lo: GridIndex, hi: GridIndex) -> impl Iterator<Item = GridIndex> {
        (lo[0]..hi[0]).flat_map(move |i| (lo[1]..hi[1]).flat_map(move |j| (lo[2]..hi[2]).map(move |k| [i, j, k])))
    }

    /// Same box with every scale refined; base and endpoints are kept.
    pub fn refine(&self, level: u32) -> Result<Box3> {
        let scales = [
            self.scales[0].refine(level)?,
            self.scales[1].refine(level)?,
            self.scales[2].refine(level)?,
        ];
        Box3::new(scales, self.lo, self.hi, Some(self.base))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: i64) -> TimeScale {
        TimeScale::integers(0, n).unwrap()
    }

    #[test]
    fn base_defaults_to_lower_corner() {
        let b = Box3::new([z(2), z(2), z(2)], [0.0; 3], [2.0; 3], None).unwrap();
        assert_eq!(b.base(), [0.0; 3]);
        assert_eq!(b.corner(), [1, 1, 1]);
        assert_eq!(b.corner_point(), [1.0; 3]);
        assert_eq!(b.corner_volume(), 1.0);
        assert_eq!(b.dims(), [3, 3, 3]);
    }

    #[test]
    fn endpoints_must_be_members_and_ordered() {
        assert!(Box3::new([z(2), z(2), z(2)], [0.5, 0.0, 0.0], [2.0; 3], None).is_err());
        assert!(Box3::new([z(2), z(2), z(2)], [0.0; 3], [0.0, 2.0, 2.0], None).is_err());
        assert!(Box3::new([z(2), z(2), z(2)], [1.0; 3], [0.0; 3], None).is_err());
    }

    #[test]
    fn sigma_of_base_must_land_in_box() {
        // base below a: sigma(base) = a is fine
        let b = Box3::new([z(4), z(4), z(4)], [1.0; 3], [3.0; 3], Some([0.0; 3])).unwrap();
        assert_eq!(b.corner(), [0, 0, 0]);
        // base at b with b < max: sigma(b) = b + 1 leaves the box
        assert!(Box3::new([z(4), z(4), z(4)], [1.0; 3], [3.0; 3], Some([3.0; 3])).is_err());
    }

    #[test]
    fn base_at_upper_corner_is_degenerate_but_allowed() {
        let b = Box3::new([z(2), z(2), z(2)], [0.0; 3], [2.0; 3], Some([2.0; 3])).unwrap();
        assert_eq!(b.corner(), b.upper());
        assert_eq!(b.corner_volume(), 0.0);
    }

    #[test]
    fn locate_and_coords_agree() {
        let b = Box3::new([z(5), z(5), z(5)], [1.0, 2.0, 0.0], [4.0, 5.0, 3.0], None).unwrap();
        let idx = b.locate([2.0, 5.0, 1.0]).unwrap();
        assert_eq!(idx, [1, 3, 1]);
        assert_eq!(b.point(idx), [2.0, 5.0, 1.0]);
        assert!(matches!(
            b.locate([0.0, 2.0, 0.0]),
            Err(Error::OutOfRange { axis: 0, .. })
        ));
    }
}
