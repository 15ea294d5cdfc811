#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparse_multicover::geometry::{Norm, PointSet};
use sparse_multicover::greedy::PersistentNet;
use sparse_multicover::sparseballs::{RadiusVariant, SparseBallSystem};

pub type System = (PointSet<f64>, PersistentNet<f64>, SparseBallSystem<f64>);

pub fn uniform(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (0..d).map(|_| rng.gen::<f64>()).collect()).collect()
}

/// Unit-square points with 10% outliers spread over a 10x larger box.
pub fn with_outliers(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outliers = n / 10;
    (0..n)
        .map(|i| {
            let s = if i < n - outliers { 1.0 } else { 10.0 };
            vec![rng.gen_range(-0.5..0.5) * s, rng.gen_range(-0.5..0.5) * s]
        })
        .collect()
}

pub fn system(rows: Vec<Vec<f64>>, norm: Norm, eps: f64) -> System {
    let ps = PointSet::from_rows(rows, norm).unwrap();
    let net = PersistentNet::gonzalez(&ps, 0).with_covering_sequences(eps).unwrap();
    let variant = match norm {
        Norm::L2 => RadiusVariant::Quadratic,
        Norm::LInf => RadiusVariant::PiecewiseLinearU,
    };
    let sys = SparseBallSystem::new(&net, eps, variant).unwrap();
    (ps, net, sys)
}

pub fn line() -> System {
    system(vec![vec![0.0], vec![1.0], vec![3.0], vec![7.0]], Norm::L2, 1.0)
}
