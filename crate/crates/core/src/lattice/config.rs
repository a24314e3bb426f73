use bitvec::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use super::grid::{BoxSpec, EdgeRef, Grid};
use crate::error::{Error, Result};

/// Two-valued edge-weight law: `a` with probability `p`, otherwise `b`.
///
/// `(0, 1, p)` is the Bernoulli law with `F(0) = p`. Laws with `a >= 1` put an
/// atom of mass `p` at the infimum of the support. `a == b` gives a constant
/// law, used for deterministic checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightLaw {
    pub a: u32,
    pub b: u32,
    pub p: f64,
}

impl WeightLaw {
    pub fn new(a: u32, b: u32, p: f64) -> Result<Self> {
        let law = WeightLaw { a, b, p };
        law.validate()?;
        Ok(law)
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        WeightLaw::new(0, 1, p)
    }

    /// Every edge has weight `w`.
    pub fn constant(w: u32) -> Self {
        WeightLaw { a: w, b: w, p: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::domain(format!("p = {} is not in [0, 1]", self.p)));
        }
        if self.b < self.a {
            return Err(Error::domain(format!(
                "high value b = {} is below low value a = {}",
                self.b, self.a
            )));
        }
        Ok(())
    }

    pub fn is_bernoulli(&self) -> bool {
        self.a == 0 && self.b == 1
    }

    /// Smallest weight the law can produce.
    pub fn min_weight(&self) -> u32 {
        if self.p > 0.0 {
            self.a
        } else {
            self.b
        }
    }

    pub fn max_weight(&self) -> u32 {
        if self.p < 1.0 {
            self.b
        } else {
            self.a
        }
    }

    /// A 32-bit uniform `u` yields the low value iff `u < threshold`.
    fn threshold(&self) -> u64 {
        ((self.p * 4_294_967_296.0).round() as u64).min(1 << 32)
    }
}

/// One sampled assignment of weights to every edge of a box.
///
/// Weights are stored as one bit per edge (`1` = low value `a`). A halo
/// config, produced by [`Config::with_halo`], extends a sampled box by one
/// layer whose edges all carry the law's minimum weight.
#[derive(Clone, Debug)]
pub struct Config {
    bx: BoxSpec,
    grid: Grid,
    law: WeightLaw,
    seed: u64,
    replica: u64,
    low: BitVec<u64, Lsb0>,
    halo: bool,
}

/// Samples a configuration. Edge slot `e` consumes word `e` of the ChaCha8
/// stream `replica` under key `seed`, so any edge can be regenerated on its
/// own and the result does not depend on iteration order or thread count.
pub fn sample_config(bx: &BoxSpec, law: WeightLaw, seed: u64, replica: u64) -> Result<Config> {
    law.validate()?;
    let grid = Grid::new(bx);
    let threshold = law.threshold();
    let mut rng = stream(seed, replica);
    let edges = grid.edge_count();
    let mut words = Vec::with_capacity(edges.div_ceil(64));
    let mut bytes = [0u8; 256];
    let mut remaining = edges;
    while remaining > 0 {
        let take = remaining.min(64);
        rng.fill_bytes(&mut bytes[..4 * take]);
        let mut word = 0u64;
        for (i, chunk) in bytes[..4 * take].chunks_exact(4).enumerate() {
            let u = u32::from_le_bytes(chunk.try_into().expect("4-byte chunk")) as u64;
            word |= ((u < threshold) as u64) << i;
        }
        words.push(word);
        remaining -= take;
    }
    let mut low = BitVec::from_vec(words);
    low.truncate(edges);
    Ok(Config {
        bx: bx.clone(),
        grid,
        law,
        seed,
        replica,
        low,
        halo: false,
    })
}

/// The uniform word that decides edge slot `slot` of `(seed, replica)`.
pub fn edge_uniform(seed: u64, replica: u64, slot: usize) -> u32 {
    let mut rng = stream(seed, replica);
    rng.set_word_pos(slot as u128);
    rng.next_u32()
}

fn stream(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// Weight of an in-box edge.
pub fn edge_weight(cfg: &Config, e: EdgeRef) -> Result<u32> {
    cfg.weight(e)
}

impl Config {
    /// Builds a fixture config from explicit weights. `weight(point, axis)` is
    /// called for the edge from `point` to `point + e_axis` and must return
    /// `law.a` or `law.b`.
    pub fn from_fn(
        bx: &BoxSpec,
        law: WeightLaw,
        mut weight: impl FnMut(&[i64], usize) -> u32,
    ) -> Result<Config> {
        law.validate()?;
        let grid = Grid::new(bx);
        let mut low = BitVec::with_capacity(grid.edge_count());
        for slot in 0..grid.edge_count() {
            let e = grid.edge_at(slot);
            let w = weight(&grid.point(e.base), e.axis);
            if w != law.a && w != law.b {
                return Err(Error::domain(format!(
                    "fixture weight {w} is neither {} nor {}",
                    law.a, law.b
                )));
            }
            low.push(w == law.a);
        }
        Ok(Config {
            bx: bx.clone(),
            grid,
            law,
            seed: 0,
            replica: 0,
            low,
            halo: false,
        })
    }

    pub fn box_spec(&self) -> &BoxSpec {
        &self.bx
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn law(&self) -> WeightLaw {
        self.law
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn replica(&self) -> u64 {
        self.replica
    }

    pub fn is_halo(&self) -> bool {
        self.halo
    }

    #[inline]
    pub fn slot_weight(&self, slot: usize) -> u32 {
        let words = self.low.as_raw_slice();
        if (words[slot >> 6] >> (slot & 63)) & 1 == 1 {
            self.law.a
        } else {
            self.law.b
        }
    }

    pub fn weight(&self, e: EdgeRef) -> Result<u32> {
        let slot = self
            .grid
            .edge_slot(e)
            .ok_or_else(|| Error::domain(format!("edge {e:?} leaves the box")))?;
        Ok(self.slot_weight(slot))
    }

    /// Weight of the edge joining two adjacent lattice points.
    pub fn weight_between(&self, p: &[i64], q: &[i64]) -> Result<u32> {
        let (u, v) = match (self.grid.index(p), self.grid.index(q)) {
            (Some(u), Some(v)) => (u, v),
            _ => {
                return Err(Error::domain(format!(
                    "{p:?} or {q:?} lies outside the box"
                )))
            }
        };
        let e = self
            .grid
            .edge_between(u, v)
            .ok_or_else(|| Error::domain(format!("{p:?} and {q:?} are not adjacent")))?;
        self.weight(e)
    }

    /// Number of edges carrying the low value `a`.
    pub fn low_count(&self) -> usize {
        self.low.count_ones()
    }

    /// Bytes used by the packed weight array.
    pub fn weight_storage_bytes(&self) -> usize {
        std::mem::size_of_val(self.low.as_raw_slice())
    }

    /// The config on the box grown by one layer, where every edge touching the
    /// new layer has the law's minimum weight. Any path of `Z^d` that leaves
    /// the box projects onto a walk through that layer that is no more
    /// expensive, so passage times here lower-bound those of the full lattice.
    pub fn with_halo(&self) -> Result<Config> {
        let outer_box = self.bx.grown(1)?;
        let outer = Grid::new(&outer_box);
        let fill = self.law.min_weight() == self.law.a;
        let mut low = bitvec![u64, Lsb0; fill as usize; outer.edge_count()];
        let d = self.grid.dim();
        let row_len = self.grid.len(d - 1);
        let rows = self.grid.vertex_count() / row_len;
        let mut p = vec![0i64; d];
        for row in 0..rows {
            self.grid.write_point(row * row_len, &mut p);
            let outer_row =
                outer.index(&p).expect("inner vertex lies in the grown box") / (row_len + 2);
            for axis in 0..d {
                let count = if axis == d - 1 {
                    row_len - 1
                } else if self.grid.offset(row * row_len, axis) + 1 < self.grid.len(axis) {
                    row_len
                } else {
                    0
                };
                if count == 0 {
                    continue;
                }
                let src = self.grid.row_edge_start(row, axis);
                let dst = outer.row_edge_start(outer_row, axis) + 1;
                low[dst..dst + count].copy_from_bitslice(&self.low[src..src + count]);
            }
        }
        Ok(Config {
            bx: outer_box,
            grid: outer,
            law: self.law,
            seed: self.seed,
            replica: self.replica,
            low,
            halo: true,
        })
    }
}
