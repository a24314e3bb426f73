use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{distance_field, DistField};
use crate::error::{Error, Result};
use crate::lattice::{BoxSpec, Config, EdgeRef, Grid};

/// Largest box on which [`brute_force_union`] will enumerate paths.
pub const BRUTE_FORCE_MAX_VERTICES: usize = 25;

/// How membership in a [`GeodesicSet`] was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    /// `T_f(w) + T_b(w) = T(src, dst)`. A superset of the union of
    /// self-avoiding optimal paths: zero-weight appendages reachable and
    /// returnable at no cost are included.
    DistanceSum,
    /// Exhaustive enumeration of self-avoiding optimal paths.
    BruteForce,
}

/// Vertices and edges lying on optimal paths between two vertices.
#[derive(Clone, Debug)]
pub struct GeodesicSet {
    bx: BoxSpec,
    grid: Grid,
    src: Vec<i64>,
    dst: Vec<i64>,
    optimum: u64,
    vertices: BitVec<u64, Lsb0>,
    edges: BitVec<u64, Lsb0>,
    criterion: Criterion,
}

impl GeodesicSet {
    /// Distance-sum membership from a forward field (source `src`) and a
    /// backward field (source `dst`) computed on `cfg`.
    pub fn from_fields(cfg: &Config, forward: &DistField, backward: &DistField) -> Result<Self> {
        if forward.box_spec() != cfg.box_spec() || backward.box_spec() != cfg.box_spec() {
            return Err(Error::domain("fields were not computed on this config"));
        }
        let (&[s], &[t]) = (forward.source_indices(), backward.source_indices()) else {
            return Err(Error::domain("geodesic sets need single-vertex endpoints"));
        };
        let grid = cfg.grid();
        let optimum = forward.value(t) as u64;
        let f = forward.values();
        let b = backward.values();
        let mut vertices = bitvec![u64, Lsb0; 0; grid.vertex_count()];
        let mut edges = bitvec![u64, Lsb0; 0; grid.edge_count()];
        for v in 0..grid.vertex_count() {
            let fv = f[v] as u64;
            let bv = b[v] as u64;
            if fv + bv == optimum {
                vertices.set(v, true);
            }
            grid.for_each_neighbor(v, |u, slot| {
                if u < v {
                    return;
                }
                let w = cfg.slot_weight(slot) as u64;
                let best = (fv + w + b[u] as u64).min(f[u] as u64 + w + bv);
                if best == optimum {
                    edges.set(slot, true);
                }
            });
        }
        Ok(GeodesicSet {
            bx: cfg.box_spec().clone(),
            grid: grid.clone(),
            src: grid.point(s),
            dst: grid.point(t),
            optimum,
            vertices,
            edges,
            criterion: Criterion::DistanceSum,
        })
    }

    pub fn box_spec(&self) -> &BoxSpec {
        &self.bx
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn source(&self) -> &[i64] {
        &self.src
    }

    pub fn target(&self) -> &[i64] {
        &self.dst
    }

    /// `T(src, dst)`.
    pub fn optimum(&self) -> u64 {
        self.optimum
    }

    pub fn criterion(&self) -> Criterion {
        self.criterion
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.count_ones()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.count_ones()
    }

    pub fn contains_index(&self, v: usize) -> bool {
        self.vertices[v]
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        self.grid.index(p).is_some_and(|v| self.vertices[v])
    }

    /// Membership of the edge from `p` to `p + e_axis`.
    pub fn contains_edge(&self, p: &[i64], axis: usize) -> bool {
        self.grid
            .index(p)
            .and_then(|base| self.grid.edge_slot(EdgeRef { base, axis }))
            .is_some_and(|slot| self.edges[slot])
    }

    pub fn member_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.vertices.iter_ones()
    }

    pub fn member_points(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        self.vertices.iter_ones().map(|v| self.grid.point(v))
    }

    /// Member edges as `(lower endpoint, axis)`.
    pub fn member_edges(&self) -> impl Iterator<Item = (Vec<i64>, usize)> + '_ {
        self.edges.iter_ones().map(|slot| {
            let e = self.grid.edge_at(slot);
            (self.grid.point(e.base), e.axis)
        })
    }

    pub fn vertices_subset_of(&self, other: &GeodesicSet) -> bool {
        self.member_points().all(|p| other.contains(&p))
    }

    pub fn edges_subset_of(&self, other: &GeodesicSet) -> bool {
        self.member_edges()
            .all(|(p, axis)| other.contains_edge(&p, axis))
    }

    /// Members whose first coordinate lies in `[lo, hi]`. Edges are kept when
    /// both endpoints are kept.
    pub fn restrict_to_slab(&self, lo: i64, hi: i64) -> GeodesicSet {
        let x0 = self.bx.lo()[0];
        let in_slab = |v: usize| {
            let x = x0 + self.grid.offset(v, 0) as i64;
            lo <= x && x <= hi
        };
        let mut out = self.clone();
        for v in self.vertices.iter_ones() {
            if !in_slab(v) {
                out.vertices.set(v, false);
            }
        }
        for slot in self.edges.iter_ones() {
            let e = self.grid.edge_at(slot);
            let far = e.base + self.grid.stride(e.axis);
            if !(in_slab(e.base) && in_slab(far)) {
                out.edges.set(slot, false);
            }
        }
        out
    }

    /// Number of members on the hyperplane `x_1 = i`.
    pub fn plane_count(&self, i: i64) -> usize {
        let off = i - self.bx.lo()[0];
        if off < 0 || off as usize >= self.grid.len(0) {
            return 0;
        }
        let stride = self.grid.stride(0);
        let start = off as usize * stride;
        self.vertices[start..start + stride].count_ones()
    }

    /// Members lying on the hyperplane `x_1 = i`, in index order.
    pub fn plane_members(&self, i: i64) -> Vec<usize> {
        let off = i - self.bx.lo()[0];
        if off < 0 || off as usize >= self.grid.len(0) {
            return Vec::new();
        }
        let stride = self.grid.stride(0);
        let start = off as usize * stride;
        (start..start + stride)
            .filter(|&v| self.vertices[v])
            .collect()
    }
}

/// Union of all optimal paths between `src` and `dst` under the distance-sum
/// criterion.
pub fn geodesic_union(cfg: &Config, src: &[i64], dst: &[i64]) -> Result<GeodesicSet> {
    let f = distance_field(cfg, &[src.to_vec()])?;
    let b = distance_field(cfg, &[dst.to_vec()])?;
    GeodesicSet::from_fields(cfg, &f, &b)
}

/// Exact union of the vertices and edges of every self-avoiding optimal path,
/// by depth-first enumeration pruned with the backward field.
pub fn brute_force_union(cfg: &Config, src: &[i64], dst: &[i64]) -> Result<GeodesicSet> {
    let grid = cfg.grid();
    if grid.vertex_count() > BRUTE_FORCE_MAX_VERTICES {
        return Err(Error::capacity(format!(
            "path enumeration is limited to {BRUTE_FORCE_MAX_VERTICES} vertices, box has {}",
            grid.vertex_count()
        )));
    }
    let f = distance_field(cfg, &[src.to_vec()])?;
    let b = distance_field(cfg, &[dst.to_vec()])?;
    let s = f.source_indices()[0];
    let t = b.source_indices()[0];
    let optimum = f.value(t) as u64;

    let mut search = Enumeration {
        cfg,
        backward: &b,
        target: t,
        optimum,
        on_path: vec![false; grid.vertex_count()],
        path_vertices: vec![s],
        path_edges: Vec::new(),
        vertices: bitvec![u64, Lsb0; 0; grid.vertex_count()],
        edges: bitvec![u64, Lsb0; 0; grid.edge_count()],
    };
    search.on_path[s] = true;
    search.extend(s, 0);

    Ok(GeodesicSet {
        bx: cfg.box_spec().clone(),
        grid: grid.clone(),
        src: src.to_vec(),
        dst: dst.to_vec(),
        optimum,
        vertices: search.vertices,
        edges: search.edges,
        criterion: Criterion::BruteForce,
    })
}

struct Enumeration<'a> {
    cfg: &'a Config,
    backward: &'a DistField,
    target: usize,
    optimum: u64,
    on_path: Vec<bool>,
    path_vertices: Vec<usize>,
    path_edges: Vec<usize>,
    vertices: BitVec<u64, Lsb0>,
    edges: BitVec<u64, Lsb0>,
}

impl Enumeration<'_> {
    fn extend(&mut self, v: usize, cost: u64) {
        if v == self.target {
            if cost == self.optimum {
                for &u in &self.path_vertices {
                    self.vertices.set(u, true);
                }
                for &e in &self.path_edges {
                    self.edges.set(e, true);
                }
            }
            return;
        }
        let mut next = Vec::with_capacity(2 * self.cfg.grid().dim());
        self.cfg
            .grid()
            .for_each_neighbor(v, |u, slot| next.push((u, slot)));
        for (u, slot) in next {
            if self.on_path[u] {
                continue;
            }
            let c = cost + self.cfg.slot_weight(slot) as u64;
            if c + self.backward.value(u) as u64 > self.optimum {
                continue;
            }
            self.on_path[u] = true;
            self.path_vertices.push(u);
            self.path_edges.push(slot);
            self.extend(u, c);
            self.path_edges.pop();
            self.path_vertices.pop();
            self.on_path[u] = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::WeightLaw;

    fn ones(side: i64) -> Config {
        Config::from_fn(
            &BoxSpec::cube(2, side).unwrap(),
            WeightLaw::constant(1),
            |_, _| 1,
        )
        .unwrap()
    }

    #[test]
    fn staircase_square_is_fully_covered() {
        let cfg = ones(3);
        let u = geodesic_union(&cfg, &[0, 0], &[2, 2]).unwrap();
        assert_eq!(u.vertex_count(), 9);
        assert_eq!(u.optimum(), 4);
        let bf = brute_force_union(&cfg, &[0, 0], &[2, 2]).unwrap();
        assert_eq!(bf.vertex_count(), 9);
        assert_eq!(bf.edge_count(), u.edge_count());
        assert!(u.vertices_subset_of(&bf) && bf.vertices_subset_of(&u));
    }

    #[test]
    fn axis_target_gives_straight_segment() {
        let bx = BoxSpec::new(vec![0, -3], vec![6, 3], vec![0, 0]).unwrap();
        let cfg = Config::from_fn(&bx, WeightLaw::constant(1), |_, _| 1).unwrap();
        let u = geodesic_union(&cfg, &[0, 0], &[6, 0]).unwrap();
        assert_eq!(u.vertex_count(), 7);
        assert!(u.member_points().all(|p| p[1] == 0));
        assert_eq!(u.edge_count(), 6);
    }

    #[test]
    fn pendant_is_in_criterion_set_only() {
        let cfg = super::super::oracle::pendant_fixture();
        let u = geodesic_union(&cfg, &[0, 1], &[2, 1]).unwrap();
        let bf = brute_force_union(&cfg, &[0, 1], &[2, 1]).unwrap();
        assert_eq!(u.optimum(), 0);
        assert!(u.contains(&[1, 2]));
        assert!(!bf.contains(&[1, 2]));
        assert!(bf.vertices_subset_of(&u) && bf.edges_subset_of(&u));
        assert_eq!(bf.vertex_count(), 3);
        assert!(u.vertex_count() > bf.vertex_count());
    }

    #[test]
    fn single_cheap_staircase_is_the_whole_union() {
        // cheap edges: (0,0)->(1,0)->(1,1)->(2,1)->(2,2)
        let bx = BoxSpec::cube(2, 3).unwrap();
        let cheap = [([0, 0], 0), ([1, 0], 1), ([1, 1], 0), ([2, 1], 1)];
        let cfg = Config::from_fn(&bx, WeightLaw::new(1, 3, 0.5).unwrap(), |p, axis| {
            if cheap.iter().any(|(q, a)| q == p && *a == axis) {
                1
            } else {
                3
            }
        })
        .unwrap();
        let bf = brute_force_union(&cfg, &[0, 0], &[2, 2]).unwrap();
        let members: Vec<_> = bf.member_points().collect();
        assert_eq!(
            members,
            vec![vec![0, 0], vec![1, 0], vec![1, 1], vec![2, 1], vec![2, 2]]
        );
        assert_eq!(bf.edge_count(), 4);
        let u = geodesic_union(&cfg, &[0, 0], &[2, 2]).unwrap();
        assert_eq!(u.vertex_count(), 5);
    }

    #[test]
    fn brute_force_refuses_large_boxes() {
        let cfg = ones(6);
        assert!(matches!(
            brute_force_union(&cfg, &[0, 0], &[1, 1]),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn slab_restriction() {
        let bx = BoxSpec::new(vec![0, -2], vec![8, 2], vec![0, 0]).unwrap();
        let cfg = Config::from_fn(&bx, WeightLaw::constant(1), |_, _| 1).unwrap();
        let u = geodesic_union(&cfg, &[0, 0], &[8, 0]).unwrap();
        let s = u.restrict_to_slab(2, 4);
        assert_eq!(s.vertex_count(), 3);
        assert_eq!(s.edge_count(), 2);
        assert_eq!(u.plane_members(3).len(), 1);
    }
}
