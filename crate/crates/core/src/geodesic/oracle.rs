//! Textbook reference implementations used to cross-check the search code.
//!
//! Nothing here shares the neighbour enumeration or queue logic of the fast
//! paths: vertices are enumerated by coordinates and weights are read one edge
//! at a time through [`Config::weight_between`].

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use super::field::distance_field;
use super::union::{brute_force_union, geodesic_union};
use crate::error::Result;
use crate::lattice::{sample_config, BoxSpec, Config, WeightLaw};
use crate::replica::derive_seed;

/// Dijkstra with a linear scan for the minimum, `O(V^2)`. Returns distances
/// in row-major order of the box (last axis fastest).
pub fn quadratic_scan_distances(cfg: &Config, source: &[i64]) -> Result<Vec<u64>> {
    let bx = cfg.box_spec();
    let d = bx.dim();
    let sides: Vec<i64> = (0..d).map(|k| bx.hi()[k] - bx.lo()[k] + 1).collect();
    let n: usize = sides.iter().product::<i64>() as usize;

    let to_point = |mut idx: usize| {
        let mut p = vec![0i64; d];
        for k in (0..d).rev() {
            let s = sides[k] as usize;
            p[k] = bx.lo()[k] + (idx % s) as i64;
            idx /= s;
        }
        p
    };
    let to_index = |p: &[i64]| {
        p.iter().enumerate().fold(0usize, |acc, (k, &x)| {
            acc * sides[k] as usize + (x - bx.lo()[k]) as usize
        })
    };

    let mut dist = vec![u64::MAX; n];
    let mut done = vec![false; n];
    if !bx.contains(source) {
        return Err(crate::Error::Domain(format!(
            "source {source:?} outside box"
        )));
    }
    dist[to_index(source)] = 0;
    for _ in 0..n {
        let mut v = usize::MAX;
        for u in 0..n {
            if !done[u] && dist[u] != u64::MAX && (v == usize::MAX || dist[u] < dist[v]) {
                v = u;
            }
        }
        if v == usize::MAX {
            break;
        }
        done[v] = true;
        let p = to_point(v);
        for k in 0..d {
            for step in [-1i64, 1] {
                let mut q = p.clone();
                q[k] += step;
                if !bx.contains(&q) {
                    continue;
                }
                let w = cfg.weight_between(&p, &q)? as u64;
                let u = to_index(&q);
                if dist[v] + w < dist[u] {
                    dist[u] = dist[v] + w;
                }
            }
        }
    }
    Ok(dist)
}

/// Straight zero path (0,1)-(1,1)-(2,1) with a zero pendant edge
/// (1,1)-(1,2) on the 3x3 box; every other edge has weight 1. The pendant
/// vertex (1,2) satisfies the distance-sum criterion between (0,1) and (2,1)
/// but lies on no self-avoiding optimal path.
pub fn pendant_fixture() -> Config {
    let bx = BoxSpec::cube(2, 3).expect("valid box");
    Config::from_fn(
        &bx,
        WeightLaw::bernoulli(0.5).expect("valid law"),
        |p, axis| match (p, axis) {
            ([0, 1], 0) | ([1, 1], 0) | ([1, 1], 1) => 0,
            _ => 1,
        },
    )
    .expect("fixture weights match the law")
}

/// Laws cycled through by the batteries: `(0, 1, p)` and `(1, 2, p)` for
/// `p` in `{0.1, 0.25, 0.5, 0.9}`.
pub fn battery_laws() -> Vec<WeightLaw> {
    let mut laws = Vec::new();
    for (a, b) in [(0, 1), (1, 2)] {
        for p in [0.1, 0.25, 0.5, 0.9] {
            laws.push(WeightLaw { a, b, p });
        }
    }
    laws
}

fn random_point(rng: &mut ChaCha8Rng, side: i64) -> Vec<i64> {
    (0..2)
        .map(|_| (rng.next_u64() % side as u64) as i64)
        .collect()
}

/// Outcome of comparing the fast fields with [`quadratic_scan_distances`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleBattery {
    pub configs: u64,
    /// Configurations on which some vertex disagreed.
    pub mismatches: u64,
}

/// Compares [`distance_field`] with the quadratic scan from a random source
/// on `configs` random `side x side` boxes.
pub fn oracle_battery(seed: u64, configs: u64, side: i64) -> Result<OracleBattery> {
    let laws = battery_laws();
    let bx = BoxSpec::cube(2, side)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "oracle/sources"));
    let mut mismatches = 0;
    for r in 0..configs {
        let law = laws[(r % laws.len() as u64) as usize];
        let cfg = sample_config(&bx, law, seed, r)?;
        let src = random_point(&mut rng, side);
        let fast = distance_field(&cfg, std::slice::from_ref(&src))?;
        let slow = quadratic_scan_distances(&cfg, &src)?;
        if fast
            .values()
            .iter()
            .zip(&slow)
            .any(|(&f, &s)| f as u64 != s)
        {
            mismatches += 1;
        }
    }
    Ok(OracleBattery {
        configs,
        mismatches,
    })
}

/// Outcome of checking that the enumerated union lies inside the
/// distance-sum union.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupersetBattery {
    /// Random configurations, not counting the fixture.
    pub configs: u64,
    /// Pairs where an enumerated vertex or edge was missing.
    pub violations: u64,
    /// Pairs where the containment was strict.
    pub strict: u64,
    /// Strict containment on [`pendant_fixture`].
    pub fixture_strict: bool,
}

/// Checks `brute_force_union ⊆ geodesic_union` on `configs` random 4x4
/// boxes between random distinct endpoints, then on the pendant fixture.
pub fn superset_battery(seed: u64, configs: u64) -> Result<SupersetBattery> {
    let laws = battery_laws();
    let bx = BoxSpec::cube(2, 4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "superset/endpoints"));
    let mut violations = 0;
    let mut strict = 0;
    for r in 0..configs {
        let law = laws[(r % laws.len() as u64) as usize];
        let cfg = sample_config(&bx, law, seed, r)?;
        let src = random_point(&mut rng, 4);
        let mut dst = random_point(&mut rng, 4);
        while dst == src {
            dst = random_point(&mut rng, 4);
        }
        let fast = geodesic_union(&cfg, &src, &dst)?;
        let exact = brute_force_union(&cfg, &src, &dst)?;
        if !(exact.vertices_subset_of(&fast) && exact.edges_subset_of(&fast)) {
            violations += 1;
        } else if fast.vertex_count() > exact.vertex_count()
            || fast.edge_count() > exact.edge_count()
        {
            strict += 1;
        }
    }
    let cfg = pendant_fixture();
    let fast = geodesic_union(&cfg, &[0, 1], &[2, 1])?;
    let exact = brute_force_union(&cfg, &[0, 1], &[2, 1])?;
    let contained = exact.vertices_subset_of(&fast) && exact.edges_subset_of(&fast);
    if !contained {
        violations += 1;
    }
    Ok(SupersetBattery {
        configs,
        violations,
        strict,
        fixture_strict: contained && fast.vertex_count() > exact.vertex_count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{BoxSpec, WeightLaw};

    #[test]
    fn oracle_on_unit_weights() {
        let bx = BoxSpec::new(vec![-1, 0], vec![2, 2], vec![0, 0]).unwrap();
        let cfg = Config::from_fn(&bx, WeightLaw::constant(1), |_, _| 1).unwrap();
        let d = quadratic_scan_distances(&cfg, &[0, 1]).unwrap();
        // row-major: x in -1..=2 outer, y in 0..=2 inner
        assert_eq!(d, vec![2, 1, 2, 1, 0, 1, 2, 1, 2, 3, 2, 3]);
    }

    #[test]
    fn small_batteries_pass() {
        let o = oracle_battery(3, 16, 6).unwrap();
        assert_eq!((o.configs, o.mismatches), (16, 0));
        let s = superset_battery(3, 16).unwrap();
        assert_eq!(s.violations, 0);
        assert!(s.fixture_strict);
    }
}
