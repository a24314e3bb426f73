use fpp_core::geodesic::oracle::quadratic_scan_distances;
use fpp_core::geodesic::{
    brute_force_union, distance_field, extract_path, geodesic_union, plane_time, point_time,
    TieRule,
};
use fpp_core::lattice::{sample_config, BoxSpec, Config, WeightLaw};
use fpp_core::regime::oriented_path_scan;
use fpp_core::shape::shape_ball;
use fpp_core::slab::{exits, slab_union, SlabSpec};
use proptest::prelude::*;

fn law_strategy() -> impl Strategy<Value = WeightLaw> {
    (
        prop_oneof![Just((0u32, 1u32)), Just((1, 2)), Just((1, 5))],
        0.0f64..=1.0,
    )
        .prop_map(|((a, b), p)| WeightLaw { a, b, p })
}

fn square_config() -> impl Strategy<Value = Config> {
    (law_strategy(), 2i64..9, 2i64..9, any::<u64>(), 0u64..1000).prop_map(|(law, w, h, seed, r)| {
        let bx = BoxSpec::new(vec![0, 0], vec![w, h], vec![0, 0]).unwrap();
        sample_config(&bx, law, seed, r).unwrap()
    })
}

fn point_in(cfg: &Config) -> impl Strategy<Value = Vec<i64>> {
    let hi = cfg.box_spec().hi().to_vec();
    hi.into_iter().map(|h| 0..=h).collect::<Vec<_>>()
}

fn config_and_points(k: usize) -> impl Strategy<Value = (Config, Vec<Vec<i64>>)> {
    square_config().prop_flat_map(move |cfg| {
        let pts = proptest::collection::vec(point_in(&cfg), k);
        (Just(cfg), pts)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn triangle_inequality_and_symmetry((cfg, p) in config_and_points(3)) {
        let t = |a: &[i64], b: &[i64]| point_time(&cfg, a, b).unwrap();
        prop_assert!(t(&p[0], &p[2]) <= t(&p[0], &p[1]) + t(&p[1], &p[2]));
        prop_assert_eq!(t(&p[0], &p[1]), t(&p[1], &p[0]));
    }

    #[test]
    fn more_low_edges_never_slow_anything(
        (a, b) in prop_oneof![Just((0u32, 1u32)), Just((1, 2))],
        p in 0.0f64..1.0, dp in 0.0f64..0.5, seed in any::<u64>(),
    ) {
        let bx = BoxSpec::new(vec![-4, -4], vec![6, 5], vec![0, 0]).unwrap();
        let lo = sample_config(&bx, WeightLaw { a, b, p }, seed, 0).unwrap();
        let hi = sample_config(&bx, WeightLaw { a, b, p: (p + dp).min(1.0) }, seed, 0).unwrap();
        let f = distance_field(&lo, &[vec![0, 0]]).unwrap();
        let g = distance_field(&hi, &[vec![0, 0]]).unwrap();
        prop_assert!(g.values().iter().zip(f.values()).all(|(g, f)| g <= f));
    }

    #[test]
    fn fields_match_the_quadratic_scan((cfg, p) in config_and_points(1)) {
        let fast = distance_field(&cfg, &p).unwrap();
        let slow = quadratic_scan_distances(&cfg, &p[0]).unwrap();
        prop_assert!(fast.values().iter().zip(&slow).all(|(&f, &s)| f as u64 == s));
    }

    #[test]
    fn fields_match_the_quadratic_scan_in_3d(law in law_strategy(), seed in any::<u64>()) {
        let bx = BoxSpec::new(vec![-2, -1, -2], vec![2, 3, 1], vec![0, 0, 0]).unwrap();
        let cfg = sample_config(&bx, law, seed, 1).unwrap();
        let fast = distance_field(&cfg, &[vec![1, 0, -1]]).unwrap();
        let slow = quadratic_scan_distances(&cfg, &[1, 0, -1]).unwrap();
        prop_assert!(fast.values().iter().zip(&slow).all(|(&f, &s)| f as u64 == s));
    }

    #[test]
    fn enumerated_union_is_inside_the_criterion_set(
        law in law_strategy(), seed in any::<u64>(),
        s in (0i64..4, 0i64..4), t in (0i64..4, 0i64..4),
    ) {
        let cfg = sample_config(&BoxSpec::cube(2, 4).unwrap(), law, seed, 0).unwrap();
        let (s, t) = (vec![s.0, s.1], vec![t.0, t.1]);
        let fast = geodesic_union(&cfg, &s, &t).unwrap();
        let exact = brute_force_union(&cfg, &s, &t).unwrap();
        prop_assert!(exact.vertices_subset_of(&fast));
        prop_assert!(exact.edges_subset_of(&fast));
        prop_assert_eq!(exact.optimum(), fast.optimum());
    }

    #[test]
    fn extracted_path_lies_in_the_union((cfg, p) in config_and_points(2)) {
        let path = extract_path(&cfg, &p[0], &p[1], TieRule::MinHops).unwrap();
        let u = geodesic_union(&cfg, &p[0], &p[1]).unwrap();
        prop_assert_eq!(path.time, u.optimum());
        for v in &path.vertices {
            prop_assert!(u.contains(v));
        }
    }

    #[test]
    fn plane_time_is_at_most_point_time(cfg in square_config()) {
        let n = cfg.box_spec().hi()[0];
        let b = plane_time(&cfg, &[0, 0], n).unwrap();
        for y in 0..=cfg.box_spec().hi()[1] {
            prop_assert!(b <= point_time(&cfg, &[0, 0], &[n, y]).unwrap());
        }
    }

    #[test]
    fn every_plane_between_the_ends_is_crossed((cfg, p) in config_and_points(1)) {
        let n = cfg.box_spec().hi()[0];
        let src = vec![0, p[0][1]];
        let dst = vec![n, cfg.box_spec().hi()[1] - p[0][1]];
        let r = exits(&cfg, &src, &dst, SlabSpec::new(0, n).unwrap()).unwrap();
        prop_assert!(r.counts.iter().all(|&(_, c)| c >= 1));
        let u = geodesic_union(&cfg, &src, &dst).unwrap();
        for e in &r.exits {
            prop_assert!(u.contains(e));
            prop_assert_eq!(e[0], r.plane);
        }
    }

    #[test]
    fn slab_union_grows_with_kappa(cfg in square_config(), k1 in 0.01f64..0.49, k2 in 0.01f64..0.49) {
        let (k1, k2) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
        let n = cfg.box_spec().hi()[0];
        // A thin slab may contain no lattice plane at all.
        let small = slab_union(&cfg, &[0, 0], &[n, 1], k1);
        prop_assume!(small.is_ok());
        let small = small.unwrap();
        let large = slab_union(&cfg, &[0, 0], &[n, 1], k2).unwrap();
        prop_assert!(small.vertices_subset_of(&large));
    }

    #[test]
    fn shape_balls_are_nested(cfg in square_config(), t1 in 0u64..12, dt in 0u64..6) {
        let a = shape_ball(&cfg, t1).unwrap();
        let b = shape_ball(&cfg, t1 + dt).unwrap();
        prop_assert!(a.is_subset_of(&b));
    }

    #[test]
    fn one_two_times_are_between_l1_and_twice_l1(p in 0.0f64..=1.0, seed in any::<u64>()) {
        let bx = BoxSpec::new(vec![-6, -6], vec![6, 6], vec![0, 0]).unwrap();
        let cfg = sample_config(&bx, WeightLaw { a: 1, b: 2, p }, seed, 0).unwrap();
        let f = distance_field(&cfg, &[vec![0, 0]]).unwrap();
        for v in 0..cfg.grid().vertex_count() {
            let l1: u32 = cfg.grid().point(v).iter().map(|c| c.unsigned_abs() as u32).sum();
            prop_assert!(l1 <= f.value(v) && f.value(v) <= 2 * l1);
        }
    }

    /// An up-right path of weight-1 edges from the origin to `(k, k)` makes
    /// `T(0, (k, k)) = 2k`, and the oriented scan sees it.
    #[test]
    fn oriented_paths_are_optimal(p in 0.5f64..=1.0, seed in any::<u64>()) {
        let k = 6;
        let bx = BoxSpec::new(vec![-4, -4], vec![k + 2, k + 2], vec![0, 0]).unwrap();
        let cfg = sample_config(&bx, WeightLaw { a: 1, b: 2, p }, seed, 0).unwrap();
        let w = |x: i64, y: i64, dx: i64, dy: i64| cfg.weight_between(&[x, y], &[x + dx, y + dy]).unwrap();
        let mut reach = vec![vec![false; k as usize + 1]; k as usize + 1];
        for x in 0..=k {
            for y in 0..=k {
                reach[x as usize][y as usize] = (x == 0 && y == 0)
                    || (x > 0 && reach[x as usize - 1][y as usize] && w(x - 1, y, 1, 0) == 1)
                    || (y > 0 && reach[x as usize][y as usize - 1] && w(x, y - 1, 0, 1) == 1);
            }
        }
        if reach[k as usize][k as usize] {
            prop_assert_eq!(point_time(&cfg, &[0, 0], &[k, k]).unwrap(), 2 * k as u32);
            prop_assert!(oriented_path_scan(&cfg, 2 * k).unwrap());
        }
    }
}
