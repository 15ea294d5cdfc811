//! Greedy permutations (persistent nets), sequences of leaders and
//! covering sequences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::PointSet;
use crate::sparseballs::{check_eps, slowing_time};
use crate::{Real, Result};

/// Seeded-random choice of the first point of a greedy order.
pub fn seeded_first(n: usize, seed: u64) -> usize {
    assert!(n > 0, "no points to choose from");
    ChaCha8Rng::seed_from_u64(seed).gen_range(0..n)
}

/// A greedy permutation of a point set together with insertion radii and,
/// once [`PersistentNet::with_covering_sequences`] has run, the covering
/// sequence of every point.
#[derive(Debug, Clone)]
pub struct PersistentNet<T> {
    order: Vec<usize>,
    rank: Vec<usize>,
    /// Indexed by point.
    ins: Vec<T>,
    /// Per point: the leaders it had during the construction, in order of
    /// appearance. Starts at `order[0]`, ends at the point itself. Ranks of
    /// successive leaders are strictly increasing.
    leaders: Vec<Vec<usize>>,
    covering: Option<Covering<T>>,
}

#[derive(Debug, Clone)]
struct Covering<T> {
    eps: T,
    seqs: Vec<Vec<usize>>,
}

impl<T: Real> PersistentNet<T> {
    /// Gonzalez's farthest-point algorithm in O(n²). Ties for the farthest
    /// point go to the smallest point index; ties for the nearest leader go
    /// to the leader of smallest rank.
    pub fn gonzalez(ps: &PointSet<T>, first: usize) -> Self {
        let n = ps.len();
        assert!(first < n, "first point {first} out of range for n = {n}");
        let mut order = Vec::with_capacity(n);
        let mut rank = vec![usize::MAX; n];
        let mut ins = vec![T::infinity(); n];
        let mut leaders: Vec<Vec<usize>> = vec![vec![first]; n];
        let mut to_set: Vec<T> = (0..n).map(|x| ps.dist(x, first)).collect();

        order.push(first);
        rank[first] = 0;
        for phase in 1..n {
            let mut best = usize::MAX;
            let mut best_d = T::neg_infinity();
            for x in 0..n {
                if rank[x] == usize::MAX && to_set[x] > best_d {
                    best = x;
                    best_d = to_set[x];
                }
            }
            rank[best] = phase;
            ins[best] = best_d;
            order.push(best);
            for x in 0..n {
                let d = ps.dist(x, best);
                if d < to_set[x] || x == best {
                    to_set[x] = d;
                    leaders[x].push(best);
                }
            }
        }
        PersistentNet {
            order,
            rank,
            ins,
            leaders,
            covering: None,
        }
    }

    /// Computes covering sequences for error parameter `eps`.
    ///
    /// For each point `x` the sequence starts at `x`; from `x_{i-1}` the next
    /// entry is the nearest neighbor of `x` among the points `y` with
    /// `slow(y) >= (1+3eps) slow(x_{i-1})`. That set is a prefix of the greedy
    /// order, so the nearest neighbor is read off `x`'s sequence of leaders.
    pub fn with_covering_sequences(mut self, eps: T) -> Result<Self> {
        check_eps(eps)?;
        let growth = T::one() + T::lit(3.0) * eps;
        let slow_by_rank: Vec<T> = self.order.iter().map(|&x| slowing_time(self.ins[x], eps)).collect();
        let seqs = (0..self.len())
            .map(|x| {
                let mut seq = vec![x];
                let mut cur = x;
                while slowing_time(self.ins[cur], eps).is_finite() {
                    let gamma = growth * slowing_time(self.ins[cur], eps);
                    let prefix = slow_by_rank.partition_point(|&s| s >= gamma);
                    cur = self.leader_at(x, prefix);
                    seq.push(cur);
                }
                seq
            })
            .collect();
        self.covering = Some(Covering { eps, seqs });
        Ok(self)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.order.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Greedy order: `order()[0]` is the first point.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    #[inline]
    pub fn rank(&self, x: usize) -> usize {
        self.rank[x]
    }

    /// Insertion radius of `x`; `+inf` for the first point.
    #[inline]
    pub fn ins(&self, x: usize) -> T {
        self.ins[x]
    }

    pub fn insertion_radii(&self) -> &[T] {
        &self.ins
    }

    /// Sequence of leaders of `x`.
    pub fn leaders(&self, x: usize) -> &[usize] {
        &self.leaders[x]
    }

    /// Leader of `x` (its nearest neighbor) among the first `prefix` points
    /// of the greedy order. `prefix` must be at least 1.
    pub fn leader_at(&self, x: usize, prefix: usize) -> usize {
        assert!(prefix >= 1);
        let seq = &self.leaders[x];
        let k = seq.partition_point(|&l| self.rank[l] < prefix);
        seq[k - 1]
    }

    /// Error parameter the covering sequences were built for.
    pub fn eps(&self) -> Option<T> {
        self.covering.as_ref().map(|c| c.eps)
    }

    /// Covering sequence of `x`. Panics if covering sequences were not
    /// computed.
    pub fn covering_seq(&self, x: usize) -> &[usize] {
        &self
            .covering
            .as_ref()
            .expect("covering sequences not computed; call with_covering_sequences")
            .seqs[x]
    }

    /// The net at scale `r`: `{x : r <= ins(x)}`, in greedy order.
    pub fn net_at(&self, r: T) -> Vec<usize> {
        let k = self.order.partition_point(|&x| r <= self.ins[x]);
        self.order[..k].to_vec()
    }
}
