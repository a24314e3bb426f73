use fpp_core::lattice::WeightLaw;
use fpp_core::replica::{derive_seed, run_replicas};
use fpp_core::shape::{
    bounds_check, estimate_mu, Chord, DefectEstimate, DefectTask, Direction, MarginPolicy, MuTask,
};
use fpp_core::stats::Summary;

fn dir(c: &[i64]) -> Direction {
    Direction::new(c.to_vec()).unwrap()
}

fn outcomes(task: &DefectTask, replicas: u64) -> Vec<Option<[u32; 3]>> {
    run_replicas(task, 0..replicas, 1).unwrap()
}

/// Sharing one configuration across the three chord times cancels most of
/// the noise in the defect.
#[test]
fn common_random_numbers_shrink_defect_variance() {
    let law = WeightLaw::bernoulli(0.3).unwrap();
    let chord = Chord::new(vec![3, 2], vec![2, 3]);
    let (n, replicas) = (12, 120);
    let task = |label: &str| DefectTask::new(law, chord.clone(), n, derive_seed(17, label));
    let paired = outcomes(&task("shared"), replicas);
    let (a, b, c) = (
        outcomes(&task("end1"), replicas),
        outcomes(&task("end2"), replicas),
        outcomes(&task("mid"), replicas),
    );
    let defect = |t: [u32; 3]| (t[0] as f64 + t[1] as f64 - 2.0 * t[2] as f64) / (2.0 * n as f64);
    // Replicas that failed certification on any stream are left out of both.
    let mut shared = Vec::new();
    let mut split = Vec::new();
    for r in 0..replicas as usize {
        if let (Some(p), Some(a), Some(b), Some(c)) = (paired[r], a[r], b[r], c[r]) {
            shared.push(defect(p));
            split.push(defect([a[0], b[1], c[2]]));
        }
    }
    assert!(shared.len() > 100);
    let (shared, split) = (Summary::of(&shared).unwrap(), Summary::of(&split).unwrap());
    assert!(shared.sd < split.sd, "{} vs {}", shared.sd, split.sd);
}

#[test]
fn defect_estimate_matches_its_outcomes() {
    let law = WeightLaw::new(1, 2, 0.5).unwrap();
    let task = DefectTask::new(law, Chord::new(vec![2, 0], vec![0, 2]), 4, 3);
    let est = task.estimate(30, 1).unwrap();
    let raw = outcomes(&task, 30);
    assert_eq!(est, DefectEstimate::from_outcomes(&task, &raw).unwrap());
    let failed = raw.iter().filter(|o| o.is_none()).count();
    assert_eq!(est.truncation_failures, failed as u64);
}

/// With the box held fixed, raising `p` only turns heavy edges light, so every
/// replica's time can only drop.
#[test]
fn coupled_mu_estimates_fall_with_p() {
    let margin = MarginPolicy {
        factor: 0.6,
        extra: 8,
    };
    let mut last: Option<Vec<Option<u32>>> = None;
    for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let mut task = MuTask::new(WeightLaw::bernoulli(p).unwrap(), dir(&[2, 1]), 10, 99);
        task.margin = margin;
        let times = run_replicas(&task, 0..40, 1).unwrap();
        if let Some(prev) = &last {
            let pairs: Vec<_> = times
                .iter()
                .zip(prev)
                .filter_map(|(a, b)| a.zip(*b))
                .collect();
            assert!(pairs.len() >= 30);
            assert!(pairs.iter().all(|(now, before)| now <= before));
        }
        last = Some(times);
    }
}

#[test]
fn estimates_do_not_depend_on_thread_count() {
    let law = WeightLaw::bernoulli(0.4).unwrap();
    let task = MuTask::new(law, dir(&[1, 1]), 12, 5);
    assert_eq!(task.estimate(24, 1).unwrap(), task.estimate(24, 3).unwrap());
    let task = DefectTask::new(law, Chord::new(vec![2, 1], vec![1, 2]), 6, 5);
    assert_eq!(task.estimate(24, 1).unwrap(), task.estimate(24, 2).unwrap());
}

#[test]
fn small_profile_respects_norm_bounds() {
    let law = WeightLaw::new(1, 2, 0.5).unwrap();
    let profile: Vec<_> = [[1, 0], [1, 1], [2, 1]]
        .iter()
        .map(|c| estimate_mu(law, &dir(c), 16, 40, 8).unwrap())
        .collect();
    let report = bounds_check(&profile).unwrap();
    assert!(report.holds(), "{report:?}");
    assert_eq!(report.rows.len(), 3);
}
