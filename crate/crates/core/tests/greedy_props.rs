mod common;

use proptest::prelude::*;
use sparse_multicover::geometry::{Norm, PointSet};
use sparse_multicover::greedy::PersistentNet;

fn points(max_n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 2), 1..max_n)
}

fn distinct(rows: Vec<Vec<f64>>) -> Option<PointSet<f64>> {
    PointSet::from_rows_dedup(rows, Norm::L2).ok().map(|(ps, _)| ps)
}

fn brute_greedy(ps: &PointSet<f64>, first: usize) -> Vec<usize> {
    let mut order = vec![first];
    while order.len() < ps.len() {
        let mut best = (usize::MAX, -1.0);
        for x in 0..ps.len() {
            if order.contains(&x) {
                continue;
            }
            let d = order.iter().map(|&y| ps.dist(x, y)).fold(f64::INFINITY, f64::min);
            if d > best.1 {
                best = (x, d);
            }
        }
        order.push(best.0);
    }
    order
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gonzalez_matches_brute_force(rows in points(30), first in 0usize..30) {
        let Some(ps) = distinct(rows) else { return Ok(()) };
        let first = first % ps.len();
        let net = PersistentNet::gonzalez(&ps, first);
        let brute = brute_greedy(&ps, first);
        prop_assert_eq!(net.order(), brute.as_slice());
        let radii: Vec<f64> = net.order().iter().map(|&x| net.ins(x)).collect();
        prop_assert!(radii.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn nets_pack_and_cover(rows in points(30), r in 0.01f64..20.0) {
        let Some(ps) = distinct(rows) else { return Ok(()) };
        let net = PersistentNet::gonzalez(&ps, 0);
        let s = net.net_at(r);
        for (i, &a) in s.iter().enumerate() {
            for &b in &s[i + 1..] {
                prop_assert!(ps.dist(a, b) >= r);
            }
        }
        for x in 0..ps.len() {
            let d = s.iter().map(|&y| ps.dist(x, y)).fold(f64::INFINITY, f64::min);
            prop_assert!(d <= r);
        }
    }

    #[test]
    fn leaders_are_nearest_in_prefix(rows in points(25), prefix in 1usize..25) {
        let Some(ps) = distinct(rows) else { return Ok(()) };
        let net = PersistentNet::gonzalez(&ps, 0);
        let prefix = prefix.min(ps.len());
        for x in 0..ps.len() {
            let l = net.leader_at(x, prefix);
            let best = net.order()[..prefix].iter().map(|&y| ps.dist(x, y)).fold(f64::INFINITY, f64::min);
            prop_assert_eq!(ps.dist(x, l), best);
        }
    }

    #[test]
    fn covering_sequences_grow_geometrically(rows in points(30), eps in 0.05f64..=1.0) {
        let Some(ps) = distinct(rows) else { return Ok(()) };
        let (_, net, sys) = common::system(
            (0..ps.len()).map(|i| ps.coords(i).unwrap().to_vec()).collect(), Norm::L2, eps);
        for x in 0..ps.len() {
            let seq = net.covering_seq(x);
            prop_assert_eq!(seq[0], x);
            prop_assert_eq!(*seq.last().unwrap(), net.order()[0]);
            for w in seq.windows(2) {
                prop_assert!(sys.slow(w[1]) >= (1.0 + 3.0 * eps) * sys.slow(w[0]));
            }
        }
    }

    #[test]
    fn covering_map_moves_forward(rows in points(25), eps in 0.1f64..=1.0, mut rs in prop::collection::vec(0.0f64..200.0, 2..12)) {
        let Some(ps) = distinct(rows) else { return Ok(()) };
        let (_, net, sys) = common::system(
            (0..ps.len()).map(|i| ps.coords(i).unwrap().to_vec()).collect(), Norm::L2, eps);
        rs.sort_by(f64::total_cmp);
        let mut prev_pos = vec![0usize; ps.len()];
        let mut prev_w = vec![0usize; ps.len()];
        for &r in &rs {
            let map = sys.covering_map_at(&net, r);
            let w = sys.covering_weights_at(&net, r);
            prop_assert_eq!(w.iter().sum::<usize>(), ps.len());
            for x in 0..ps.len() {
                let pos = net.covering_seq(x).iter().position(|&y| y == map[x]).unwrap();
                prop_assert!(pos >= prev_pos[x]);
                prev_pos[x] = pos;
                if r <= sys.dis(x) {
                    prop_assert!(w[x] >= prev_w[x]);
                }
                prev_w[x] = w[x];
            }
        }
    }

    #[test]
    fn disappearing_balls_are_covered(rows in points(25), eps in 0.1f64..=1.0) {
        let Some(ps) = distinct(rows) else { return Ok(()) };
        let (ps, net, sys) = common::system(
            (0..ps.len()).map(|i| ps.coords(i).unwrap().to_vec()).collect(), Norm::L2, eps);
        for x in 0..ps.len() {
            let gamma = sys.dis(x);
            if !gamma.is_finite() {
                continue;
            }
            let y = net.covering_seq(x)[1];
            prop_assert!(sys.slow(y) >= gamma);
            let lhs = ps.dist(x, y) + sys.radius(x, gamma).unwrap();
            let rhs = sys.radius(y, gamma).unwrap();
            prop_assert_eq!(rhs, gamma);
            prop_assert!(lhs <= rhs * (1.0 + 1e-12), "{} > {}", lhs, rhs);
        }
    }
}

#[test]
fn disappearance_witness_exists_exhaustively() {
    for seed in 0..10 {
        let (ps, _, sys) = common::system(common::uniform(12, 2, seed), Norm::L2, 0.5);
        for x in 0..ps.len() {
            let gamma = sys.dis(x);
            if !gamma.is_finite() {
                continue;
            }
            let rho = sys.radius(x, gamma).unwrap();
            let ok = (0..ps.len()).any(|y| {
                sys.slow(y) >= gamma && ps.dist(x, y) + rho <= sys.radius(y, gamma).unwrap() * (1.0 + 1e-12)
            });
            assert!(ok, "no witness for point {x} at scale {gamma}");
        }
    }
}
