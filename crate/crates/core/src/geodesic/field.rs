use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::lattice::{BoxSpec, Config, Grid};

/// Exact passage times from a source set to every vertex of a box.
#[derive(Clone, Debug)]
pub struct DistField {
    bx: BoxSpec,
    grid: Grid,
    halo: bool,
    limit: Option<u32>,
    sources: Vec<usize>,
    dist: Vec<u32>,
}

impl DistField {
    pub fn box_spec(&self) -> &BoxSpec {
        &self.bx
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Whether the field was computed on a halo config.
    pub fn is_halo(&self) -> bool {
        self.halo
    }

    /// Search radius of a bounded field. Vertices farther than the limit hold
    /// `u32::MAX`.
    pub fn limit(&self) -> Option<u32> {
        self.limit
    }

    pub fn source_indices(&self) -> &[usize] {
        &self.sources
    }

    pub fn sources(&self) -> Vec<Vec<i64>> {
        self.sources.iter().map(|&s| self.grid.point(s)).collect()
    }

    pub fn values(&self) -> &[u32] {
        &self.dist
    }

    #[inline]
    pub fn value(&self, v: usize) -> u32 {
        self.dist[v]
    }

    /// Passage time to `p`, or `None` if `p` is outside the box.
    pub fn at(&self, p: &[i64]) -> Option<u32> {
        self.grid.index(p).map(|v| self.dist[v])
    }

    /// Minimum over the hyperplane `x_1 = i`.
    pub fn plane_min(&self, i: i64) -> Option<u32> {
        let off = i - self.bx.lo()[0];
        if off < 0 || off as usize >= self.grid.len(0) {
            return None;
        }
        let stride = self.grid.stride(0);
        let start = off as usize * stride;
        self.dist[start..start + stride].iter().copied().min()
    }

    /// Minimum over the outermost layer of the box.
    pub fn boundary_min(&self) -> u32 {
        let mut best = u32::MAX;
        self.grid
            .for_each_boundary(|v| best = best.min(self.dist[v]));
        best
    }

    pub(crate) fn same_grid(&self, other: &DistField) -> bool {
        self.bx == other.bx
    }
}

/// Passage-time field from `sources` on `cfg`.
///
/// Weights in `{0, 1}` use a double-ended-queue breadth search, other laws a
/// monotone bucket queue keyed by tentative distance.
pub fn distance_field(cfg: &Config, sources: &[Vec<i64>]) -> Result<DistField> {
    Ok(field_from_indices(cfg, source_indices(cfg, sources)?, None))
}

/// Like [`distance_field`], but stops once every vertex within passage time
/// `limit` is settled. Farther vertices hold `u32::MAX`.
pub fn bounded_field(cfg: &Config, sources: &[Vec<i64>], limit: u32) -> Result<DistField> {
    Ok(field_from_indices(
        cfg,
        source_indices(cfg, sources)?,
        Some(limit),
    ))
}

fn source_indices(cfg: &Config, sources: &[Vec<i64>]) -> Result<Vec<usize>> {
    if sources.is_empty() {
        return Err(Error::domain("source set is empty"));
    }
    let idx = sources
        .iter()
        .map(|s| {
            cfg.grid()
                .index(s)
                .ok_or_else(|| Error::domain(format!("source {s:?} lies outside the box")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(idx)
}

/// Field of paths that end on their first visit to the half-space
/// `x_1 >= i`: those vertices are settled but never expanded. Values with
/// `x_1 <= i` are exact passage times for such paths; beyond the plane they
/// are not meaningful.
pub fn stopped_field(cfg: &Config, sources: &[Vec<i64>], i: i64) -> Result<DistField> {
    let bx = cfg.box_spec();
    let off = (i - bx.lo()[0]).clamp(0, cfg.grid().len(0) as i64) as usize;
    let absorb_from = off * cfg.grid().stride(0);
    Ok(search(
        cfg,
        source_indices(cfg, sources)?,
        None,
        absorb_from,
    ))
}

pub(crate) fn field_from_indices(
    cfg: &Config,
    sources: Vec<usize>,
    limit: Option<u32>,
) -> DistField {
    search(cfg, sources, limit, usize::MAX)
}

fn search(
    cfg: &Config,
    mut sources: Vec<usize>,
    limit: Option<u32>,
    absorb_from: usize,
) -> DistField {
    sources.sort_unstable();
    sources.dedup();
    let bound = limit.unwrap_or(u32::MAX - 1);
    let mut dist = if cfg.law().max_weight() <= 1 {
        zero_one_search(cfg, &sources, bound, absorb_from)
    } else {
        bucket_search(cfg, &sources, bound, absorb_from)
    };
    if limit.is_some() {
        for d in dist.iter_mut().filter(|d| **d > bound) {
            *d = u32::MAX;
        }
    }
    DistField {
        bx: cfg.box_spec().clone(),
        grid: cfg.grid().clone(),
        halo: cfg.is_halo(),
        limit,
        sources,
        dist,
    }
}

// Vertices with index `>= absorb_from` are settled but not expanded.
fn zero_one_search(cfg: &Config, sources: &[usize], limit: u32, absorb_from: usize) -> Vec<u32> {
    let grid = cfg.grid();
    let n = grid.vertex_count();
    let mut dist = vec![u32::MAX; n];
    let mut done = vec![false; n];
    let mut queue: VecDeque<u32> = VecDeque::with_capacity(1024);
    for &s in sources {
        dist[s] = 0;
        queue.push_back(s as u32);
    }
    while let Some(v) = queue.pop_front() {
        let v = v as usize;
        if done[v] {
            continue;
        }
        let dv = dist[v];
        if dv > limit {
            break;
        }
        done[v] = true;
        if v >= absorb_from {
            continue;
        }
        grid.for_each_neighbor(v, |u, slot| {
            let w = cfg.slot_weight(slot);
            let nd = dv + w;
            if nd < dist[u] {
                dist[u] = nd;
                if w == 0 {
                    queue.push_front(u as u32);
                } else {
                    queue.push_back(u as u32);
                }
            }
        });
    }
    dist
}

/// Dial's algorithm with `max_weight + 1` circular buckets.
fn bucket_search(cfg: &Config, sources: &[usize], limit: u32, absorb_from: usize) -> Vec<u32> {
    let grid = cfg.grid();
    let n = grid.vertex_count();
    let width = cfg.law().max_weight() as usize + 1;
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); width];
    let mut dist = vec![u32::MAX; n];
    let mut queued = 0usize;
    for &s in sources {
        dist[s] = 0;
        buckets[0].push(s as u32);
        queued += 1;
    }
    let mut current: u32 = 0;
    while queued > 0 && current <= limit {
        let b = current as usize % width;
        while let Some(v) = buckets[b].pop() {
            queued -= 1;
            let v = v as usize;
            if dist[v] != current || v >= absorb_from {
                continue;
            }
            grid.for_each_neighbor(v, |u, slot| {
                let nd = current + cfg.slot_weight(slot);
                if nd < dist[u] {
                    dist[u] = nd;
                    buckets[nd as usize % width].push(u as u32);
                    queued += 1;
                }
            });
        }
        current += 1;
    }
    dist
}

/// `T(u, v)` on the box.
pub fn point_time(cfg: &Config, u: &[i64], v: &[i64]) -> Result<u32> {
    if !cfg.box_spec().contains(v) {
        return Err(Error::domain(format!("target {v:?} lies outside the box")));
    }
    let f = distance_field(cfg, &[u.to_vec()])?;
    Ok(f.at(v).expect("target checked in box"))
}

/// Point-to-plane time from `src` to the hyperplane `x_1 = i` within the box.
pub fn plane_time(cfg: &Config, src: &[i64], i: i64) -> Result<u32> {
    let bx = cfg.box_spec();
    if i < bx.lo()[0] || i > bx.hi()[0] {
        return Err(Error::domain(format!(
            "hyperplane x_1 = {i} misses the box"
        )));
    }
    let f = distance_field(cfg, &[src.to_vec()])?;
    Ok(f.plane_min(i).expect("plane checked in box"))
}

/// Certifies that no optimal path between the source of `forward` and the
/// source of `backward` reaches the outermost layer of the fields' box.
///
/// Returns true iff `min_w T_f(w) + T_b(w) > T(src, dst)` over that layer.
/// On a plain box this flags optimal paths that touch the boundary. On a halo
/// config the outermost layer is the halo itself, and a true result proves
/// that no optimal path of the infinite lattice leaves the inner box, so the
/// inner-box passage time and geodesic union equal the infinite-lattice ones.
pub fn truncation_check(forward: &DistField, backward: &DistField) -> bool {
    if !forward.same_grid(backward) {
        return false;
    }
    let optimum = backward
        .source_indices()
        .iter()
        .map(|&s| forward.value(s) as u64)
        .min()
        .unwrap_or(u64::MAX);
    let mut ok = true;
    forward.grid().for_each_boundary(|v| {
        ok &= forward.value(v) as u64 + backward.value(v) as u64 > optimum;
    });
    ok
}

/// [`truncation_check`] for the pair `(source of forward, dst)` without a full
/// backward field: only outermost-layer vertices `w` with
/// `T_f(w) <= T(src, dst)` can violate the bound, so the backward search is
/// cut off at `T(src, dst) - min_w T_f(w)`.
pub fn certify_target(cfg: &Config, forward: &DistField, dst: &[i64]) -> Result<bool> {
    if forward.box_spec() != cfg.box_spec() || forward.limit().is_some() {
        return Err(Error::domain(
            "forward field must be a full field on this config",
        ));
    }
    let optimum = forward
        .at(dst)
        .ok_or_else(|| Error::domain(format!("target {dst:?} lies outside the box")))?;
    let nearest = forward.boundary_min();
    if nearest > optimum {
        return Ok(true);
    }
    let backward = bounded_field(cfg, &[dst.to_vec()], optimum - nearest)?;
    Ok(truncation_check(forward, &backward))
}
