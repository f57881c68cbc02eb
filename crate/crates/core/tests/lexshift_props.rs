use landfall_core::lexshift::{
    cluster_profiles, kendall_tau, tfidf_z, tfidf_z_with, zscore3, TermCounts,
};
use landfall_core::Cluster;
use proptest::prelude::*;

/// Tau-b by direct pair enumeration.
fn tau_b_pairs(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len();
    let (mut conc, mut disc, mut ties_a, mut ties_b) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let da = a[i].partial_cmp(&a[j]).unwrap();
            let db = b[i].partial_cmp(&b[j]).unwrap();
            use std::cmp::Ordering::Equal;
            match (da, db) {
                (Equal, Equal) => {
                    ties_a += 1;
                    ties_b += 1;
                }
                (Equal, _) => ties_a += 1,
                (_, Equal) => ties_b += 1,
                (x, y) if x == y => conc += 1,
                _ => disc += 1,
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as i64;
    let denom = ((n0 - ties_a) as f64 * (n0 - ties_b) as f64).sqrt();
    (denom > 0.0).then(|| (conc - disc) as f64 / denom)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn tau_matches_pair_count_on_all_permutations() {
    let mut checked = 0;
    for n in 2..=6 {
        let identity: Vec<f64> = (0..n).map(|i| i as f64).collect();
        for p in permutations(n) {
            let b: Vec<f64> = p.iter().map(|&i| i as f64).collect();
            let got = kendall_tau(&identity, &b).unwrap();
            assert_eq!(Some(got), tau_b_pairs(&identity, &b), "{p:?}");
            checked += 1;
        }
    }
    assert_eq!(checked, 2 + 6 + 24 + 120 + 720);
}

#[test]
fn tau_matches_pair_count_with_ties() {
    // Every pair of rankings over four items drawn from three levels.
    let levels: Vec<Vec<f64>> = (0..81)
        .map(|code: usize| {
            (0..4)
                .map(|k| ((code / 3usize.pow(k)) % 3) as f64)
                .collect()
        })
        .collect();
    for a in &levels {
        for b in &levels {
            match tau_b_pairs(a, b) {
                Some(expected) => assert_eq!(kendall_tau(a, b).unwrap(), expected, "{a:?} {b:?}"),
                None => assert!(kendall_tau(a, b).is_err()),
            }
        }
    }
}

#[test]
fn tau_rejects_short_input() {
    assert!(kendall_tau(&[1.0], &[2.0]).is_err());
    assert!(kendall_tau(&[], &[]).is_err());
}

fn profile_counts() -> impl Strategy<Value = TermCounts> {
    prop::collection::btree_map("[a-z]{3,8}", prop::array::uniform3(0u64..50), 2..40).prop_map(
        |m| {
            let mut c = TermCounts::default();
            for (term, v) in m {
                for (total, x) in c.totals.iter_mut().zip(v) {
                    *total += x;
                }
                c.counts.insert(term, v);
            }
            c
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn tau_bounded_and_symmetric(
        a in prop::collection::vec(-5i32..5, 2..40),
        b_seed in prop::collection::vec(-5i32..5, 40),
    ) {
        let a: Vec<f64> = a.into_iter().map(f64::from).collect();
        let b: Vec<f64> = b_seed[..a.len()].iter().copied().map(f64::from).collect();
        match (kendall_tau(&a, &b), tau_b_pairs(&a, &b)) {
            (Ok(t), Some(expected)) => {
                prop_assert!((-1.0..=1.0).contains(&t));
                prop_assert_eq!(t, expected);
                prop_assert_eq!(t, kendall_tau(&b, &a).unwrap());
                let neg: Vec<f64> = b.iter().map(|v| -v).collect();
                prop_assert!((kendall_tau(&a, &neg).unwrap() + t).abs() < 1e-15);
            }
            (Err(_), None) => {}
            (got, expected) => prop_assert!(false, "{got:?} vs {expected:?}"),
        }
    }

    #[test]
    fn tau_self_is_one_without_ties(mut a in prop::collection::vec(-1e6f64..1e6, 2..60)) {
        a.sort_by(f64::total_cmp);
        a.dedup();
        prop_assume!(a.len() >= 2);
        prop_assert_eq!(kendall_tau(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn z_vectors_on_circle(v in prop::array::uniform3(-1e3f64..1e3)) {
        if let Some(z) = zscore3(v) {
            prop_assert!(z.iter().sum::<f64>().abs() < 1e-9);
            prop_assert!((z.iter().map(|x| x * x).sum::<f64>() - 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn profiles_satisfy_geometry(counts in profile_counts()) {
        prop_assume!(counts.totals.iter().all(|&t| t > 0));
        for p in tfidf_z(&counts).unwrap() {
            if p.is_dropped() {
                continue;
            }
            prop_assert!(p.z.iter().sum::<f64>().abs() < 1e-9, "{:?}", p.z);
            prop_assert!((p.z.iter().map(|x| x * x).sum::<f64>() - 3.0).abs() < 1e-9, "{:?}", p.z);
        }
    }

    #[test]
    fn z_invariant_to_idf(counts in profile_counts(), scale in 0.1f64..10.0, shift in 0.0f64..3.0) {
        prop_assume!(counts.totals.iter().all(|&t| t > 0));
        let base = tfidf_z(&counts).unwrap();
        let other = tfidf_z_with(&counts, |df| scale * (1.0 + shift + df as f64)).unwrap();
        prop_assert_eq!(base.len(), other.len());
        for (x, y) in base.iter().zip(&other) {
            prop_assert_eq!(x.is_dropped(), y.is_dropped());
            for k in 0..3 {
                prop_assert!((x.z[k] - y.z[k]).abs() < 1e-9, "{}: {:?} vs {:?}", x.term, x.z, y.z);
            }
        }
    }

    #[test]
    fn clustering_labels_by_during_component(counts in profile_counts(), seed in any::<u64>()) {
        prop_assume!(counts.totals.iter().all(|&t| t > 0));
        let mut profiles = tfidf_z(&counts).unwrap();
        prop_assume!(profiles.iter().filter(|p| !p.is_dropped()).count() >= 2);
        let mut again = profiles.clone();
        let result = cluster_profiles(&mut profiles, seed).unwrap();
        cluster_profiles(&mut again, seed).unwrap();
        prop_assert_eq!(&profiles, &again);
        let concave = result.centroid(Cluster::Concave).unwrap();
        let convex = result.centroid(Cluster::Convex).unwrap();
        prop_assert!(concave[1] >= convex[1]);
        for p in &profiles {
            prop_assert_eq!(p.is_dropped(), p.cluster == Some(Cluster::Dropped));
            prop_assert!(p.cluster.is_some());
        }
    }
}
