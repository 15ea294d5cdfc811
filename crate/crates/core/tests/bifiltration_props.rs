mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparse_multicover::bifiltration::{
    friends, read_bifiltration, Bifiltration, BuildOptions,
};
use sparse_multicover::geometry::{Norm, PointSet, Probe};
use sparse_multicover::oracle::{
    brute_chains, brute_elements, compare, in_sparse_cover, in_sparse_cover_exhaustive,
};
use sparse_multicover::sparseballs::RadiusVariant;

fn build(sys: &common::System, opts: &BuildOptions) -> Bifiltration<f64> {
    let (ps, net, sys) = sys;
    Bifiltration::from_system(ps, net, sys, opts, true).unwrap()
}

#[test]
fn golden_line_instance() {
    let b = build(&common::line(), &BuildOptions::default());
    let golden = include_str!("data/line4.sb");
    assert_eq!(b.to_text(), golden);
    let back = read_bifiltration(golden.as_bytes()).unwrap();
    assert_eq!(back.elements, b.elements);
    assert_eq!(back.chains, b.chains);
    assert_eq!(back.meta, b.meta);
}

#[test]
fn line_instance_matches_oracle() {
    let s = common::line();
    let b = build(&s, &BuildOptions::default());
    let oe = brute_elements(&s.2, &s.1, &s.0).unwrap();
    let oc = brute_chains(&oe, Some(2));
    let rep = compare((&b.elements, &b.chains), (&oe, &oc), 1e-9);
    assert!(rep.passed(), "{:?}", rep.mismatches);
    assert_eq!(rep.elements_compared, 15);
}

#[test]
fn two_point_friends_rule() {
    for (d, eps) in [(1.0, 1.0), (3.0, 0.5), (10.0, 0.25)] {
        let (ps, net, sys) = common::system(vec![vec![0.0], vec![d]], Norm::L2, eps);
        let expect = d <= 2.0 * (1.0 + 3.0 * eps) * sys.slow(1);
        assert_eq!(friends(&net, &sys, &ps, 1) == vec![0], expect);
        assert!(friends(&net, &sys, &ps, 0).is_empty());
    }
}

#[test]
fn minimal_output_for_one_point() {
    let s = common::system(vec![vec![4.0, 2.0]], Norm::L2, 0.5);
    let b = build(&s, &BuildOptions { max_dim: Some(0), ..Default::default() });
    assert_eq!(
        b.to_text(),
        "# sparse-bifiltration v1\n# epsilon=0.5 metric=l2 radius=quadratic n=1 seed=0\n\
         element 0 vertices=0 rstar=0 rend=inf stair=0:1\nsimplex dim=0 chain=0 grades=0:1\n"
    );
}

#[test]
fn structural_invariants_on_random_instances() {
    for seed in 0..6 {
        let s = common::system(common::with_outliers(11, seed), Norm::L2, 1.0);
        let (ps, net, sys) = &s;
        let b = build(&s, &BuildOptions::default());
        assert!(b.invalid_grade_lists().is_empty());
        let by_set: std::collections::HashMap<&[usize], f64> =
            b.elements.iter().map(|e| (e.vertices.as_slice(), e.r_star)).collect();
        for e in &b.elements {
            let min = *e.vertices.iter().max_by_key(|&&v| net.rank(v)).unwrap();
            let fr = friends(net, sys, ps, min);
            for &v in &e.vertices {
                assert!(v == min || fr.contains(&v));
                assert!(ps.dist(v, min) <= 2.0 * sys.dis(min));
            }
            // Facets meet no later than the element.
            for i in 0..e.vertices.len() {
                if e.vertices.len() == 1 {
                    break;
                }
                let mut f = e.vertices.clone();
                f.remove(i);
                assert!(by_set[f.as_slice()] <= e.r_star + 1e-9);
            }
            let end = e.r_end.min(1e6);
            assert_eq!(e.value_at(end), e.value_at(end * 2.0 + 1.0));
            assert_eq!(e.value_at(end), e.staircase.final_value());
        }
    }
}

#[test]
fn chain_queries_match_definition() {
    let s = common::system(common::uniform(9, 2, 21), Norm::L2, 1.0);
    let b = build(&s, &BuildOptions::default());
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rmax = b.elements.iter().map(|e| e.r_star).fold(0.0, f64::max) * 3.0;
    for c in b.chains.iter().step_by(7) {
        for _ in 0..100 {
            let r = rng.gen_range(0.0..rmax);
            let k = rng.gen_range(1..=12);
            let direct = c.elements.iter().map(|&i| b.elements[i].value_at(r)).min().unwrap() >= k;
            assert_eq!(c.contains(r, k), direct);
        }
    }
}

#[test]
fn serial_and_parallel_builds_agree() {
    let s = common::system(common::uniform(10, 2, 77), Norm::L2, 1.0);
    let opts = BuildOptions { seed: 4, ..Default::default() };
    let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| build(&s, &opts));
    let parallel = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(|| build(&s, &opts));
    assert_eq!(serial.to_text(), parallel.to_text());
}

#[test]
fn linf_and_matrix_modes_match_oracle() {
    for seed in 0..4 {
        let s = common::system(common::uniform(8, 2, 100 + seed), Norm::LInf, 1.0);
        let b = build(&s, &BuildOptions::default());
        let oe = brute_elements(&s.2, &s.1, &s.0).unwrap();
        let rep = compare((&b.elements, &b.chains), (&oe, &brute_chains(&oe, Some(2))), 1e-6);
        assert!(rep.passed(), "linf seed {seed}: {:?}", &rep.mismatches[..rep.mismatches.len().min(3)]);

        let pts = common::uniform(8, 3, 200 + seed);
        let dm: Vec<Vec<f64>> = pts
            .iter()
            .map(|a| pts.iter().map(|b| a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()).collect())
            .collect();
        let ps = PointSet::from_matrix(dm).unwrap();
        let net = sparse_multicover::greedy::PersistentNet::gonzalez(&ps, 0).with_covering_sequences(0.5).unwrap();
        let sys = sparse_multicover::sparseballs::SparseBallSystem::new(&net, 0.5, RadiusVariant::PiecewiseLinearU).unwrap();
        let b = Bifiltration::from_system(&ps, &net, &sys, &BuildOptions::default(), true).unwrap();
        let oe = brute_elements(&sys, &net, &ps).unwrap();
        let rep = compare((&b.elements, &b.chains), (&oe, &brute_chains(&oe, Some(2))), 1e-9);
        assert!(rep.passed(), "matrix seed {seed}: {:?}", &rep.mismatches[..rep.mismatches.len().min(3)]);
    }
}

#[test]
fn friends_cap_refuses() {
    let s = common::system(common::uniform(40, 2, 1), Norm::L2, 1.0);
    let err = Bifiltration::from_system(&s.0, &s.1, &s.2, &BuildOptions { max_friends: 3, ..Default::default() }, true);
    assert!(matches!(err, Err(sparse_multicover::Error::FriendsCapExceeded { cap: 3, .. })));
}

#[test]
fn sparse_cover_needs_no_subset_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..5 {
        let (ps, net, sys) = common::system(common::uniform(9, 2, seed), Norm::L2, rng.gen_range(0.2..=1.0));
        for _ in 0..200 {
            let p = [rng.gen_range(-0.2..1.2), rng.gen_range(-0.2..1.2)];
            let r = rng.gen_range(0.0..1.5);
            let k = rng.gen_range(1..=10);
            assert_eq!(
                in_sparse_cover(&sys, &net, &ps, Probe::Coords(&p), r, k).unwrap(),
                in_sparse_cover_exhaustive(&sys, &net, &ps, Probe::Coords(&p), r, k).unwrap()
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn files_round_trip(seed in any::<u64>(), n in 1usize..7, eps in 0.25f64..=1.0, max_dim in 0usize..4) {
        let s = common::system(common::uniform(n, 2, seed), Norm::L2, eps);
        let b = build(&s, &BuildOptions { seed, max_dim: Some(max_dim), ..Default::default() });
        let text = b.to_text();
        let back = read_bifiltration(text.as_bytes()).unwrap();
        prop_assert_eq!(&back.elements, &b.elements);
        prop_assert_eq!(&back.chains, &b.chains);
        prop_assert_eq!(back.to_text(), text);
    }

    #[test]
    fn sparse_cover_is_monotone(seed in any::<u64>(), r in 0.0f64..1.0, dr in 0.0f64..1.0, k in 1usize..6, dk in 0usize..3,
        px in -0.2f64..1.2, py in -0.2f64..1.2) {
        let (ps, net, sys) = common::system(common::uniform(25, 2, seed), Norm::L2, 0.5);
        let p = [px, py];
        if in_sparse_cover(&sys, &net, &ps, Probe::Coords(&p), r, k + dk).unwrap() {
            prop_assert!(in_sparse_cover(&sys, &net, &ps, Probe::Coords(&p), r + dr, k).unwrap());
        }
    }
}
