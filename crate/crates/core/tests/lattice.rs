use fpp_core::lattice::{edge_uniform, sample_config, BoxSpec, WeightLaw};

#[test]
fn identical_inputs_give_identical_weights() {
    let bx = BoxSpec::new(vec![-7, -3, 0], vec![5, 4, 6], vec![0, 0, 0]).unwrap();
    let law = WeightLaw::new(1, 2, 0.8).unwrap();
    let a = sample_config(&bx, law, 99, 3).unwrap();
    let b = sample_config(&bx, law, 99, 3).unwrap();
    let slots = a.grid().edge_count();
    assert!((0..slots).all(|s| a.slot_weight(s) == b.slot_weight(s)));
    let c = sample_config(&bx, law, 99, 4).unwrap();
    assert!((0..slots).any(|s| a.slot_weight(s) != c.slot_weight(s)));
}

/// Correlation between the low-edge counts of two disjoint edge sets over
/// 1000 replicas stays within `4 / sqrt(1000)` of zero.
#[test]
fn disjoint_edge_sets_are_uncorrelated() {
    const REPLICAS: u64 = 1000;
    let bx = BoxSpec::cube(2, 16).unwrap();
    let law = WeightLaw::bernoulli(0.3).unwrap();
    let half = {
        let cfg = sample_config(&bx, law, 0, 0).unwrap();
        cfg.grid().edge_count() / 2
    };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for r in 0..REPLICAS {
        let cfg = sample_config(&bx, law, 2024, r).unwrap();
        let low = |range: std::ops::Range<usize>| {
            range.filter(|&s| cfg.slot_weight(s) == 0).count() as f64
        };
        xs.push(low(0..half));
        ys.push(low(half..2 * half));
    }
    let n = REPLICAS as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r = cov / (vx * vy).sqrt();
    assert!(r.abs() < 4.0 / n.sqrt(), "r = {r}");
}

#[test]
fn neighbouring_slots_are_uncorrelated() {
    const REPLICAS: u64 = 1000;
    let us: Vec<(f64, f64)> = (0..REPLICAS)
        .map(|r| (edge_uniform(5, r, 10) as f64, edge_uniform(5, r, 11) as f64))
        .collect();
    let n = REPLICAS as f64;
    let mx = us.iter().map(|u| u.0).sum::<f64>() / n;
    let my = us.iter().map(|u| u.1).sum::<f64>() / n;
    let cov: f64 = us.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let vx: f64 = us.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let vy: f64 = us.iter().map(|(_, y)| (y - my).powi(2)).sum();
    assert!((cov / (vx * vy).sqrt()).abs() < 4.0 / n.sqrt());
}

#[test]
fn weights_take_one_bit_per_edge() {
    let bx = BoxSpec::cube(3, 40).unwrap();
    let cfg = sample_config(&bx, WeightLaw::bernoulli(0.5).unwrap(), 1, 0).unwrap();
    let edges = cfg.grid().edge_count();
    assert!(cfg.weight_storage_bytes() <= edges / 8 + 16);
}
