use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest vertex count a box may have. Vertex indices are stored as `u32`
/// inside the search queues.
pub const MAX_VERTICES: usize = u32::MAX as usize - 1;

/// Largest supported dimension.
pub const MAX_DIM: usize = 8;

/// A finite box `[lo, hi]` of `Z^d` together with the lattice point treated as
/// the coordinate origin of experiments run on it.
///
/// Coordinates are absolute lattice coordinates everywhere in the crate; the
/// origin is only a designated point, not a shift.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxSpec {
    lo: Vec<i64>,
    hi: Vec<i64>,
    origin: Vec<i64>,
}

impl BoxSpec {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>, origin: Vec<i64>) -> Result<Self> {
        let d = lo.len();
        if !(2..=MAX_DIM).contains(&d) {
            return Err(Error::domain(format!(
                "dimension must be between 2 and {MAX_DIM}, got {d}"
            )));
        }
        if hi.len() != d || origin.len() != d {
            return Err(Error::domain(
                "lo, hi and origin must have the same dimension",
            ));
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(Error::domain(format!(
                "empty box: lo {lo:?} exceeds hi {hi:?}"
            )));
        }
        let bx = BoxSpec { lo, hi, origin };
        if !bx.contains(&bx.origin) {
            return Err(Error::domain(format!(
                "origin {:?} lies outside the box",
                bx.origin
            )));
        }
        bx.vertex_count_checked()?;
        Ok(bx)
    }

    /// The cube `[0, side-1]^d` with origin at `0`.
    pub fn cube(d: usize, side: i64) -> Result<Self> {
        if side < 1 {
            return Err(Error::domain("cube side must be positive"));
        }
        BoxSpec::new(vec![0; d], vec![side - 1; d], vec![0; d])
    }

    /// Smallest box containing every point, grown by `margin` on all sides.
    /// The first point becomes the origin.
    pub fn covering(points: &[Vec<i64>], margin: i64) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::domain("covering box needs at least one point"))?;
        let d = first.len();
        if points.iter().any(|p| p.len() != d) {
            return Err(Error::domain("points of mixed dimension"));
        }
        let margin = margin.max(0);
        let mut lo = first.clone();
        let mut hi = first.clone();
        for p in points {
            for k in 0..d {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        for k in 0..d {
            lo[k] -= margin;
            hi[k] += margin;
        }
        BoxSpec::new(lo, hi, first.clone())
    }

    /// The same box with every face pushed out by `by` layers.
    pub fn grown(&self, by: i64) -> Result<Self> {
        BoxSpec::new(
            self.lo.iter().map(|l| l - by).collect(),
            self.hi.iter().map(|h| h + by).collect(),
            self.origin.clone(),
        )
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn origin(&self) -> &[i64] {
        &self.origin
    }

    /// Number of vertices along `axis`.
    pub fn side(&self, axis: usize) -> usize {
        (self.hi[axis] - self.lo[axis] + 1) as usize
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (l, h))| l <= x && x <= h)
    }

    /// True when `p` lies on the outermost layer of the box.
    pub fn on_boundary(&self, p: &[i64]) -> bool {
        self.contains(p)
            && p.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .any(|(x, (l, h))| x == l || x == h)
    }

    pub fn vertex_count(&self) -> usize {
        // validated at construction
        self.vertex_count_checked().unwrap_or(usize::MAX)
    }

    /// Number of nearest-neighbour edges with both endpoints in the box.
    pub fn edge_count(&self) -> usize {
        let v = self.vertex_count();
        (0..self.dim())
            .map(|k| v / self.side(k) * (self.side(k) - 1))
            .sum()
    }

    fn vertex_count_checked(&self) -> Result<usize> {
        let mut count: usize = 1;
        for k in 0..self.dim() {
            let side = usize::try_from(self.hi[k] as i128 - self.lo[k] as i128 + 1)
                .map_err(|_| Error::capacity("box side does not fit the index range"))?;
            count = count
                .checked_mul(side)
                .filter(|&c| c <= MAX_VERTICES)
                .ok_or_else(|| {
                    Error::capacity(format!(
                        "box {:?}..{:?} has more than {MAX_VERTICES} vertices",
                        self.lo, self.hi
                    ))
                })?;
        }
        Ok(count)
    }
}

/// A nearest-neighbour edge, named by its lower endpoint (vertex index in the
/// box) and the axis along which it points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeRef {
    pub base: usize,
    pub axis: usize,
}

/// Row-major indexing of a box: the last axis varies fastest.
///
/// Edges along axis `k` are stored compactly: the slot of the edge whose lower
/// endpoint is `v` is `edge_offset[k] + v - (v / block[k]) * stride[k]`, which
/// skips the missing edges on the upper face of the axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    lo: Vec<i64>,
    lens: Vec<usize>,
    strides: Vec<usize>,
    blocks: Vec<usize>,
    edge_offsets: Vec<usize>,
    vertices: usize,
    edges: usize,
}

impl Grid {
    pub fn new(bx: &BoxSpec) -> Self {
        let d = bx.dim();
        let lens: Vec<usize> = (0..d).map(|k| bx.side(k)).collect();
        let mut strides = vec![1usize; d];
        for k in (0..d - 1).rev() {
            strides[k] = strides[k + 1] * lens[k + 1];
        }
        let blocks: Vec<usize> = (0..d).map(|k| strides[k] * lens[k]).collect();
        let vertices = blocks[0];
        let mut edge_offsets = Vec::with_capacity(d);
        let mut edges = 0;
        for k in 0..d {
            edge_offsets.push(edges);
            edges += vertices / lens[k] * (lens[k] - 1);
        }
        Grid {
            lo: bx.lo().to_vec(),
            lens,
            strides,
            blocks,
            edge_offsets,
            vertices,
            edges,
        }
    }

    pub fn dim(&self) -> usize {
        self.lens.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    /// Number of edge slots, which equals the number of in-box edges.
    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn len(&self, axis: usize) -> usize {
        self.lens[axis]
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub fn index(&self, p: &[i64]) -> Option<usize> {
        if p.len() != self.dim() {
            return None;
        }
        let mut idx = 0usize;
        for k in 0..self.dim() {
            let off = p[k] - self.lo[k];
            if off < 0 || off as usize >= self.lens[k] {
                return None;
            }
            idx += off as usize * self.strides[k];
        }
        Some(idx)
    }

    /// Offset of vertex `v` along `axis`, i.e. `coordinate - lo`.
    #[inline]
    pub fn offset(&self, v: usize, axis: usize) -> usize {
        (v % self.blocks[axis]) / self.strides[axis]
    }

    pub fn point(&self, v: usize) -> Vec<i64> {
        (0..self.dim())
            .map(|k| self.lo[k] + self.offset(v, k) as i64)
            .collect()
    }

    pub fn write_point(&self, v: usize, out: &mut [i64]) {
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = self.lo[k] + self.offset(v, k) as i64;
        }
    }

    /// Calls `f` on every vertex of the outermost layer, in increasing order.
    pub fn for_each_boundary(&self, mut f: impl FnMut(usize)) {
        let d = self.dim();
        let row_len = self.lens[d - 1];
        let rows = self.vertices / row_len;
        for row in 0..rows {
            let start = row * row_len;
            let full = (0..d - 1).any(|k| {
                let c = self.offset(start, k);
                c == 0 || c + 1 == self.lens[k]
            });
            if full || row_len <= 2 {
                (start..start + row_len).for_each(&mut f);
            } else {
                f(start);
                f(start + row_len - 1);
            }
        }
    }

    pub fn on_boundary(&self, v: usize) -> bool {
        (0..self.dim()).any(|k| {
            let c = self.offset(v, k);
            c == 0 || c + 1 == self.lens[k]
        })
    }

    /// Slot of an in-box edge, or `None` if its far endpoint leaves the box.
    pub fn edge_slot(&self, e: EdgeRef) -> Option<usize> {
        if e.axis >= self.dim() || e.base >= self.vertices {
            return None;
        }
        let k = e.axis;
        let q = e.base / self.blocks[k];
        let r = e.base - q * self.blocks[k];
        if r / self.strides[k] + 1 >= self.lens[k] {
            return None;
        }
        Some(self.edge_offsets[k] + e.base - q * self.strides[k])
    }

    /// Inverse of [`Grid::edge_slot`].
    pub fn edge_at(&self, slot: usize) -> EdgeRef {
        let axis = self.edge_offsets.partition_point(|&o| o <= slot) - 1;
        let local = slot - self.edge_offsets[axis];
        let sub_block = self.strides[axis] * (self.lens[axis] - 1);
        let q = local / sub_block;
        let r = local - q * sub_block;
        EdgeRef {
            base: q * self.blocks[axis] + r,
            axis,
        }
    }

    /// The edge joining two adjacent vertices.
    pub fn edge_between(&self, u: usize, v: usize) -> Option<EdgeRef> {
        let (lo, hi) = if u < v { (u, v) } else { (v, u) };
        let delta = hi - lo;
        let axis = (0..self.dim()).find(|&k| self.strides[k] == delta)?;
        let e = EdgeRef { base: lo, axis };
        self.edge_slot(e).map(|_| e)
    }

    /// Calls `f(neighbour, edge_slot)` for every in-box neighbour of `v`, in
    /// the order axis 0 negative, axis 0 positive, axis 1 negative, ...
    #[inline]
    pub fn for_each_neighbor(&self, v: usize, mut f: impl FnMut(usize, usize)) {
        let d = self.lens.len();
        let mut coords = [0usize; MAX_DIM];
        // vertex counts fit in u32, and 32-bit division is much cheaper
        let mut rest = v as u32;
        for k in (1..d).rev() {
            let len = self.lens[k] as u32;
            coords[k] = (rest % len) as usize;
            rest /= len;
        }
        coords[0] = rest as usize;
        // q = v / block[k], the row-major index over the axes before k
        let mut q = 0usize;
        for k in 0..d {
            let stride = self.strides[k];
            let slot = self.edge_offsets[k] + v - q * stride;
            let c = coords[k];
            if c > 0 {
                f(v - stride, slot - stride);
            }
            if c + 1 < self.lens[k] {
                f(v + stride, slot);
            }
            q = q * self.lens[k] + c;
        }
    }

    /// Slot of the first edge along `axis` whose lower endpoint lies in the
    /// row of vertices `row * len(last) .. (row + 1) * len(last)`. Consecutive
    /// vertices of the row have consecutive slots.
    pub(crate) fn row_edge_start(&self, row: usize, axis: usize) -> usize {
        let v = row * self.lens[self.dim() - 1];
        let q = v / self.blocks[axis];
        self.edge_offsets[axis] + v - q * self.strides[axis]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_boxes() {
        assert!(BoxSpec::new(vec![0], vec![3], vec![0]).is_err());
        assert!(BoxSpec::new(vec![0, 0], vec![3, -1], vec![0, 0]).is_err());
        assert!(BoxSpec::new(vec![0, 0], vec![3, 3], vec![4, 0]).is_err());
        let huge = BoxSpec::new(vec![0, 0], vec![1 << 20, 1 << 20], vec![0, 0]);
        assert!(matches!(huge, Err(Error::Capacity(_))));
    }

    #[test]
    fn index_roundtrip() {
        let bx = BoxSpec::new(vec![-2, 1, 0], vec![1, 3, 4], vec![0, 1, 0]).unwrap();
        let g = Grid::new(&bx);
        assert_eq!(g.vertex_count(), 4 * 3 * 5);
        for v in 0..g.vertex_count() {
            let p = g.point(v);
            assert!(bx.contains(&p));
            assert_eq!(g.index(&p), Some(v));
        }
        assert_eq!(g.index(&[2, 1, 0]), None);
    }

    #[test]
    fn edge_slots_are_a_bijection() {
        let bx = BoxSpec::new(vec![0, 0, 0], vec![2, 3, 1], vec![0, 0, 0]).unwrap();
        let g = Grid::new(&bx);
        assert_eq!(g.edge_count(), bx.edge_count());
        let mut seen = vec![false; g.edge_count()];
        for v in 0..g.vertex_count() {
            for axis in 0..3 {
                let e = EdgeRef { base: v, axis };
                let far = {
                    let mut p = g.point(v);
                    p[axis] += 1;
                    p
                };
                match g.edge_slot(e) {
                    Some(s) => {
                        assert!(bx.contains(&far));
                        assert!(!seen[s]);
                        seen[s] = true;
                        assert_eq!(g.edge_at(s), e);
                    }
                    None => assert!(!bx.contains(&far)),
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn neighbours_match_coordinates() {
        let bx = BoxSpec::cube(2, 4).unwrap();
        let g = Grid::new(&bx);
        let v = g.index(&[0, 2]).unwrap();
        let mut got = Vec::new();
        g.for_each_neighbor(v, |u, slot| got.push((g.point(u), g.edge_at(slot))));
        let pts: Vec<_> = got.iter().map(|(p, _)| p.clone()).collect();
        assert_eq!(pts, vec![vec![1, 2], vec![0, 1], vec![0, 3]]);
        for (p, e) in got {
            let u = g.index(&p).unwrap();
            assert_eq!(g.edge_between(u, v), Some(e));
        }
    }

    #[test]
    fn boundary_enumeration_matches_predicate() {
        for bx in [
            BoxSpec::cube(2, 1).unwrap(),
            BoxSpec::cube(2, 5).unwrap(),
            BoxSpec::new(vec![0, 0, 0], vec![3, 1, 4], vec![0, 0, 0]).unwrap(),
        ] {
            let g = Grid::new(&bx);
            let mut got = Vec::new();
            g.for_each_boundary(|v| got.push(v));
            let want: Vec<_> = (0..g.vertex_count())
                .filter(|&v| g.on_boundary(v))
                .collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn covering_box_grows_bounding_box() {
        let bx = BoxSpec::covering(&[vec![0, 0], vec![5, -3]], 2).unwrap();
        assert_eq!(bx.lo(), &[-2, -5]);
        assert_eq!(bx.hi(), &[7, 2]);
        assert_eq!(bx.origin(), &[0, 0]);
        assert!(bx.on_boundary(&[7, 0]));
        assert!(!bx.on_boundary(&[0, 0]));
    }
}
