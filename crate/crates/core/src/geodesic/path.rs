use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::lattice::{Config, EdgeRef};

/// Tie rule used to pick one optimal path.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieRule {
    /// Fewest hops among optimal paths; remaining ties go to the lowest axis,
    /// negative direction first.
    #[default]
    MinHops,
}

/// A self-avoiding path: `vertices[i]` and `vertices[i + 1]` are joined by
/// `edges[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub vertices: Vec<Vec<i64>>,
    pub edges: Vec<EdgeRef>,
    pub time: u64,
}

impl Path {
    pub fn hops(&self) -> usize {
        self.edges.len()
    }
}

/// An optimal path from `src` to `dst`, minimal in (passage time, hops).
pub fn extract_path(cfg: &Config, src: &[i64], dst: &[i64], rule: TieRule) -> Result<Path> {
    let TieRule::MinHops = rule;
    let grid = cfg.grid();
    let s = grid
        .index(src)
        .ok_or_else(|| Error::domain(format!("source {src:?} lies outside the box")))?;
    let t = grid
        .index(dst)
        .ok_or_else(|| Error::domain(format!("target {dst:?} lies outside the box")))?;

    // lexicographic (time, hops) distances to dst
    let n = grid.vertex_count();
    let mut best = vec![(u64::MAX, u32::MAX); n];
    let mut heap = BinaryHeap::new();
    best[t] = (0, 0);
    heap.push(Reverse((0u64, 0u32, t)));
    while let Some(Reverse((time, hops, v))) = heap.pop() {
        if (time, hops) != best[v] {
            continue;
        }
        grid.for_each_neighbor(v, |u, slot| {
            let cand = (time + cfg.slot_weight(slot) as u64, hops + 1);
            if cand < best[u] {
                best[u] = cand;
                heap.push(Reverse((cand.0, cand.1, u)));
            }
        });
    }

    let mut vertices = vec![src.to_vec()];
    let mut edges = Vec::new();
    let mut v = s;
    while v != t {
        let (time, hops) = best[v];
        let mut step = None;
        grid.for_each_neighbor(v, |u, slot| {
            if step.is_none() {
                let (tu, hu) = best[u];
                if tu + cfg.slot_weight(slot) as u64 == time && hu + 1 == hops {
                    step = Some((u, slot));
                }
            }
        });
        let (u, slot) = step.expect("a tight neighbour exists on every optimal path");
        edges.push(grid.edge_at(slot));
        vertices.push(grid.point(u));
        v = u;
    }
    Ok(Path {
        vertices,
        edges,
        time: best[s].0,
    })
}
