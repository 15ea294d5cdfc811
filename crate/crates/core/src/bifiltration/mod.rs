//! Poset elements, order-complex chains and their multicritical grades.
//!
//! An element is a set `tau` of points whose sparse balls share a point at
//! some scale in `[r_star, r_end]`, `r_end = min dis`. Its value at scale `r`
//! is the total covering weight of `tau`, frozen once the window closes. A
//! chain `sigma_0 ⊂ … ⊂ sigma_m` of elements is present at `(r, k)` iff
//! every member has value at least `k`; its grades are the corners of the
//! pointwise minimum of the member staircases.

mod format;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::{MetricKind, PointSet};
use crate::greedy::PersistentNet;
use crate::lpsolver::{first_intersection_scale, pairwise_first_intersection, subset_seed};
use crate::sparseballs::{CoveringWeights, RadiusVariant, SparseBallSystem, WeightStaircase};
use crate::{Error, Real, Result};

pub use format::{read_bifiltration, write_bifiltration, FORMAT_HEADER};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    /// Seed for the LP solver's randomized constraint order.
    pub seed: u64,
    /// Largest chain dimension; `None` enumerates all chains.
    pub max_dim: Option<usize>,
    /// Refuse points with more intersecting friends than this.
    pub max_friends: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            seed: 0,
            max_dim: Some(2),
            max_friends: 30,
        }
    }
}

/// Minimal critical grade `(r, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grade<T> {
    pub r: T,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosetElement<T> {
    pub id: usize,
    /// Sorted point indices.
    pub vertices: Vec<usize>,
    pub r_star: T,
    pub r_end: T,
    /// Value on `[r_star, inf)`; constant after `r_end`.
    pub staircase: WeightStaircase<T>,
}

impl<T: Real> PosetElement<T> {
    /// Value at scale `r` (0 before `r_star`).
    pub fn value_at(&self, r: T) -> usize {
        self.staircase.value_at(r)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainSimplex<T> {
    /// Element ids, strictly nested, smallest first.
    pub elements: Vec<usize>,
    /// Sorted by `r` increasing; `k` increases along the list.
    pub grades: Vec<Grade<T>>,
}

impl<T: Real> ChainSimplex<T> {
    pub fn dim(&self) -> usize {
        self.elements.len() - 1
    }

    /// Whether the chain is present at `(r, k)`.
    pub fn contains(&self, r: T, k: usize) -> bool {
        let i = self.grades.partition_point(|g| g.r <= r);
        i > 0 && self.grades[i - 1].k >= k
    }

    /// Grades form an antichain that encodes an upward-closed set: scales
    /// strictly increase, orders strictly increase, all orders positive.
    pub fn grades_are_antichain(&self) -> bool {
        !self.grades.is_empty()
            && self.grades[0].k >= 1
            && self.grades.iter().all(|g| g.r.is_finite() && g.r >= T::zero())
            && self.grades.windows(2).all(|w| w[0].r < w[1].r && w[0].k < w[1].k)
    }
}

/// Header data of a build.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Meta {
    pub eps: f64,
    pub metric: MetricKind,
    pub radius: RadiusVariant,
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bifiltration<T> {
    pub meta: Meta,
    /// Canonical order: by size, then lexicographically; `elements[i].id == i`.
    pub elements: Vec<PosetElement<T>>,
    /// Canonical order: by dimension, then lexicographically by element ids.
    pub chains: Vec<ChainSimplex<T>>,
    /// Largest number of pairwise-intersecting friends of any point.
    pub max_friends: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeReport {
    pub n: usize,
    pub elements: usize,
    pub chains_by_dim: Vec<usize>,
    pub chains: usize,
    pub max_grades: usize,
    pub mean_grades: f64,
    pub max_friends: usize,
}

impl std::fmt::Display for SizeReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:<16}{}", "points", self.n)?;
        writeln!(f, "{:<16}{}", "elements", self.elements)?;
        for (d, c) in self.chains_by_dim.iter().enumerate() {
            writeln!(f, "{:<16}{}", format!("chains dim {d}"), c)?;
        }
        writeln!(f, "{:<16}{}", "chains", self.chains)?;
        writeln!(f, "{:<16}{}", "grades max", self.max_grades)?;
        writeln!(f, "{:<16}{:.3}", "grades mean", self.mean_grades)?;
        write!(f, "{:<16}{}", "friends max", self.max_friends)
    }
}

/// Points that can share an element with `x` as its minimum: those that
/// precede `x` in the greedy order and lie within `2 dis(x)` of it.
pub fn friends<T: Real>(
    net: &PersistentNet<T>,
    sys: &SparseBallSystem<T>,
    ps: &PointSet<T>,
    x: usize,
) -> Vec<usize> {
    let reach = T::lit(2.0) * sys.dis(x);
    let mut out: Vec<usize> = net.order()[..net.rank(x)]
        .iter()
        .copied()
        .filter(|&y| ps.dist(x, y) <= reach)
        .collect();
    out.sort_unstable();
    out
}

fn check_mode<T: Real>(sys: &SparseBallSystem<T>, ps: &PointSet<T>) -> Result<()> {
    if ps.metric_kind() == MetricKind::L2 && sys.variant() != RadiusVariant::Quadratic {
        return Err(Error::Config(
            "l2 coordinates require the quadratic radius (the linearU radius is supported \
             in linf and matrix modes)"
                .into(),
        ));
    }
    if ps.metric_kind() != MetricKind::L2 && sys.variant() != RadiusVariant::PiecewiseLinearU {
        return Err(Error::Config(format!(
            "the quadratic radius requires l2 coordinates, got metric {}",
            ps.metric_kind()
        )));
    }
    Ok(())
}

/// First scale at which the sparse balls of `tau` share a point, `None` if
/// that never happens within the window. `tau` must be sorted.
pub fn element_scale<T: Real>(
    sys: &SparseBallSystem<T>,
    ps: &PointSet<T>,
    tau: &[usize],
    seed: u64,
) -> Result<Option<T>> {
    if tau.len() == 1 {
        return Ok(Some(T::zero()));
    }
    let r_end = tau.iter().map(|&a| sys.dis(a)).fold(T::infinity(), T::min);
    if ps.metric_kind() == MetricKind::L2 {
        return first_intersection_scale(sys, ps, tau, subset_seed(seed, tau));
    }
    let mut r = T::zero();
    for (i, &a) in tau.iter().enumerate() {
        for &b in &tau[i + 1..] {
            match pairwise_first_intersection(sys, ps, a, b) {
                Some(s) => r = r.max(s),
                None => return Ok(None),
            }
        }
    }
    Ok((r <= r_end).then_some(r))
}

/// Value staircase of an element: total covering weight on the window
/// `[r_star, r_end]`, constant afterwards.
pub fn element_staircase<T: Real>(
    weights: &CoveringWeights<T>,
    tau: &[usize],
    r_star: T,
    r_end: T,
) -> WeightStaircase<T> {
    let initial = tau.iter().map(|&x| weights.weight_at(x, r_star)).sum();
    let mut events: Vec<T> = tau
        .iter()
        .flat_map(|&x| weights.events(x).iter().copied())
        .filter(|&g| g > r_star && g < r_end)
        .collect();
    events.sort_by(|a, b| a.partial_cmp(b).expect("finite event scales"));
    WeightStaircase::from_events(r_star, initial, &events)
}

struct RawElement<T> {
    vertices: Vec<usize>,
    r_star: T,
}

/// Friends of `x` whose sparse ball can meet that of `x`.
fn candidates<T: Real>(
    sys: &SparseBallSystem<T>,
    ps: &PointSet<T>,
    net: &PersistentNet<T>,
    x: usize,
) -> Vec<usize> {
    friends(net, sys, ps, x)
        .into_iter()
        .filter(|&y| pairwise_first_intersection(sys, ps, x, y).is_some())
        .collect()
}

/// All elements with minimum point `x`, by depth-first extension of valid
/// sets. Validity is closed under taking subsets, so only valid sets need
/// extending; candidates that cannot meet each other pairwise are pruned
/// up front.
fn elements_with_min<T: Real>(
    sys: &SparseBallSystem<T>,
    ps: &PointSet<T>,
    x: usize,
    cands: &[usize],
    seed: u64,
) -> Result<Vec<RawElement<T>>> {
    let m = cands.len();
    let mut compatible = vec![false; m * m];
    for i in 0..m {
        for j in i + 1..m {
            let ok = pairwise_first_intersection(sys, ps, cands[i], cands[j]).is_some();
            compatible[i * m + j] = ok;
            compatible[j * m + i] = ok;
        }
    }

    let mut out = vec![RawElement {
        vertices: vec![x],
        r_star: T::zero(),
    }];
    // Chosen candidate positions; the set is these plus x.
    let mut chosen: Vec<usize> = Vec::new();
    extend(sys, ps, seed, x, cands, &compatible, &mut chosen, 0, &mut out)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn extend<T: Real>(
    sys: &SparseBallSystem<T>,
    ps: &PointSet<T>,
    seed: u64,
    x: usize,
    cands: &[usize],
    compatible: &[bool],
    chosen: &mut Vec<usize>,
    start: usize,
    out: &mut Vec<RawElement<T>>,
) -> Result<()> {
    let m = cands.len();
    for j in start..m {
        if !chosen.iter().all(|&i| compatible[i * m + j]) {
            continue;
        }
        chosen.push(j);
        let mut tau: Vec<usize> = chosen.iter().map(|&i| cands[i]).collect();
        tau.push(x);
        tau.sort_unstable();
        if let Some(r_star) = element_scale(sys, ps, &tau, seed)? {
            out.push(RawElement {
                vertices: tau,
                r_star,
            });
            extend(sys, ps, seed, x, cands, compatible, chosen, j + 1, out)?;
        }
        chosen.pop();
    }
    Ok(())
}

/// Canonical key order: size first, then lexicographic.
fn canonical_cmp(a: &[usize], b: &[usize]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Builds all poset elements. Work is split over minimum points and the
/// result is in canonical order, independent of the thread count.
pub fn build_elements<T: Real>(
    net: &PersistentNet<T>,
    sys: &SparseBallSystem<T>,
    ps: &PointSet<T>,
    opts: &BuildOptions,
) -> Result<(Vec<PosetElement<T>>, usize)> {
    check_mode(sys, ps)?;
    // The cap is checked for every point before any enumeration starts.
    let cands: Vec<Vec<usize>> = (0..ps.len())
        .into_par_iter()
        .map(|x| candidates(sys, ps, net, x))
        .collect();
    let max_friends = cands.iter().map(Vec::len).max().unwrap_or(0);
    if let Some(x) = (0..ps.len()).find(|&x| cands[x].len() > opts.max_friends) {
        return Err(Error::FriendsCapExceeded {
            point: x,
            count: cands[x].len(),
            cap: opts.max_friends,
        });
    }
    let per_point: Vec<Vec<RawElement<T>>> = (0..ps.len())
        .into_par_iter()
        .map(|x| elements_with_min(sys, ps, x, &cands[x], opts.seed))
        .collect::<Result<_>>()?;
    let mut raw: Vec<RawElement<T>> = per_point.into_iter().flatten().collect();
    raw.sort_by(|a, b| canonical_cmp(&a.vertices, &b.vertices));

    // Drop sets with a missing facet so the poset stays closed under
    // subsets even where boundary cases were decided differently by
    // round-off. Facets are smaller, so one pass in canonical order works.
    let mut present: HashMap<Vec<usize>, ()> = HashMap::with_capacity(raw.len());
    let mut kept = Vec::with_capacity(raw.len());
    for e in raw {
        let closed = e.vertices.len() == 1
            || (0..e.vertices.len()).all(|i| {
                let mut facet = e.vertices.clone();
                facet.remove(i);
                present.contains_key(&facet)
            });
        if closed {
            present.insert(e.vertices.clone(), ());
            kept.push(e);
        } else {
            log::warn!("dropping element {:?}: a facet was rejected", e.vertices);
        }
    }

    let weights = sys.covering_weights(net);
    let elements = kept
        .into_par_iter()
        .enumerate()
        .map(|(id, e)| {
            let r_end = e.vertices.iter().map(|&a| sys.dis(a)).fold(T::infinity(), T::min);
            let staircase = element_staircase(&weights, &e.vertices, e.r_star, r_end);
            PosetElement {
                id,
                vertices: e.vertices,
                r_star: e.r_star,
                r_end,
                staircase,
            }
        })
        .collect();
    Ok((elements, max_friends))
}

/// Grades of the chain with the given element ids: corners of the pointwise
/// minimum of the member staircases, starting at the top's `r_star`.
pub fn chain_grades<T: Real>(elements: &[PosetElement<T>], chain: &[usize]) -> Vec<Grade<T>> {
    let members: Vec<&PosetElement<T>> = chain.iter().map(|&i| &elements[i]).collect();
    let start = members.iter().map(|e| e.r_star).fold(T::zero(), T::max);
    let mut scales: Vec<T> = members
        .iter()
        .flat_map(|e| e.staircase.breakpoints().iter().map(|b| b.0))
        .filter(|&r| r > start)
        .collect();
    scales.push(start);
    scales.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    scales.dedup();
    let stair = WeightStaircase::from_breakpoints(scales.into_iter().map(|r| {
        let v = members.iter().map(|e| e.value_at(r)).min().unwrap_or(0);
        (r, v)
    }));
    stair
        .breakpoints()
        .iter()
        .filter(|b| b.1 > 0)
        .map(|&(r, k)| Grade { r, k })
        .collect()
}

/// All strictly nested chains with at most `max_dim + 1` members.
pub fn build_chains<T: Real>(
    elements: &[PosetElement<T>],
    max_dim: Option<usize>,
) -> Vec<ChainSimplex<T>> {
    let max_len = max_dim.map_or(usize::MAX, |d| d + 1);
    let index: HashMap<&[usize], usize> =
        elements.iter().map(|e| (e.vertices.as_slice(), e.id)).collect();
    let mut chains: Vec<ChainSimplex<T>> = elements
        .par_iter()
        .flat_map_iter(|top| {
            let mut found: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![top.id];
            descend(elements, &index, &mut stack, max_len, &mut found);
            found.into_iter().map(|mut ids| {
                ids.reverse();
                let grades = chain_grades(elements, &ids);
                ChainSimplex {
                    elements: ids,
                    grades,
                }
            })
        })
        .collect();
    chains.sort_by(|a, b| {
        a.elements
            .len()
            .cmp(&b.elements.len())
            .then_with(|| a.elements.cmp(&b.elements))
    });
    chains
}

/// Records the chain on `stack` (top first) and every extension of it by a
/// proper sub-element of its last member.
fn descend<T: Real>(
    elements: &[PosetElement<T>],
    index: &HashMap<&[usize], usize>,
    stack: &mut Vec<usize>,
    max_len: usize,
    found: &mut Vec<Vec<usize>>,
) {
    found.push(stack.clone());
    if stack.len() >= max_len {
        return;
    }
    let last = &elements[*stack.last().expect("non-empty chain")].vertices;
    let s = last.len();
    if s < 2 {
        return;
    }
    let full: u64 = (1u64 << s) - 1;
    let mut sub = Vec::with_capacity(s);
    for mask in 1..full {
        sub.clear();
        sub.extend((0..s).filter(|&i| mask >> i & 1 == 1).map(|i| last[i]));
        if let Some(&id) = index.get(sub.as_slice()) {
            stack.push(id);
            descend(elements, index, stack, max_len, found);
            stack.pop();
        }
    }
}

pub fn size_report<T: Real>(
    n: usize,
    elements: &[PosetElement<T>],
    chains: &[ChainSimplex<T>],
    max_friends: usize,
) -> SizeReport {
    let mut chains_by_dim = Vec::new();
    for c in chains {
        let d = c.dim();
        if chains_by_dim.len() <= d {
            chains_by_dim.resize(d + 1, 0);
        }
        chains_by_dim[d] += 1;
    }
    let total_grades: usize = chains.iter().map(|c| c.grades.len()).sum();
    SizeReport {
        n,
        elements: elements.len(),
        chains_by_dim,
        chains: chains.len(),
        max_grades: chains.iter().map(|c| c.grades.len()).max().unwrap_or(0),
        mean_grades: if chains.is_empty() {
            0.0
        } else {
            total_grades as f64 / chains.len() as f64
        },
        max_friends,
    }
}

impl<T: Real> Bifiltration<T> {
    /// Runs the full pipeline from a point set: greedy permutation from
    /// point 0, covering sequences, sparse balls, elements and (unless
    /// `chains` is false) chains.
    pub fn build(
        ps: &PointSet<T>,
        eps: T,
        variant: RadiusVariant,
        opts: &BuildOptions,
        chains: bool,
    ) -> Result<Self> {
        if ps.is_empty() {
            return Err(Error::Config("empty point set".into()));
        }
        let net = PersistentNet::gonzalez(ps, 0).with_covering_sequences(eps)?;
        let sys = SparseBallSystem::new(&net, eps, variant)?;
        Self::from_system(ps, &net, &sys, opts, chains)
    }

    pub fn from_system(
        ps: &PointSet<T>,
        net: &PersistentNet<T>,
        sys: &SparseBallSystem<T>,
        opts: &BuildOptions,
        chains: bool,
    ) -> Result<Self> {
        let (elements, max_friends) = build_elements(net, sys, ps, opts)?;
        let chains = if chains {
            build_chains(&elements, opts.max_dim)
        } else {
            Vec::new()
        };
        Ok(Bifiltration {
            meta: Meta {
                eps: sys.eps().as_f64(),
                metric: ps.metric_kind(),
                radius: sys.variant(),
                n: ps.len(),
                seed: opts.seed,
            },
            elements,
            chains,
            max_friends,
        })
    }

    pub fn size_report(&self) -> SizeReport {
        size_report(self.meta.n, &self.elements, &self.chains, self.max_friends)
    }

    /// Chains whose grade list is not a valid antichain.
    pub fn invalid_grade_lists(&self) -> Vec<usize> {
        (0..self.chains.len())
            .filter(|&i| !self.chains[i].grades_are_antichain())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Norm;

    fn line() -> PointSet<f64> {
        PointSet::from_rows(vec![vec![0.0], vec![1.0], vec![3.0], vec![7.0]], Norm::L2).unwrap()
    }

    fn build(ps: &PointSet<f64>, eps: f64) -> Bifiltration<f64> {
        Bifiltration::build(ps, eps, RadiusVariant::Quadratic, &BuildOptions::default(), true).unwrap()
    }

    #[test]
    fn single_point() {
        let ps = PointSet::from_rows(vec![vec![1.0, 1.0]], Norm::L2).unwrap();
        let b = build(&ps, 1.0);
        assert_eq!(b.elements.len(), 1);
        assert_eq!(b.elements[0].r_star, 0.0);
        assert!(b.elements[0].r_end.is_infinite());
        assert_eq!(b.elements[0].staircase.breakpoints(), &[(0.0, 1)]);
        assert_eq!(b.chains.len(), 1);
        assert_eq!(b.chains[0].grades, vec![Grade { r: 0.0, k: 1 }]);
        let rep = b.size_report();
        assert_eq!((rep.elements, rep.chains, rep.max_grades), (1, 1, 1));
    }

    #[test]
    fn two_points_meet_at_midpoint() {
        let ps = PointSet::from_rows(vec![vec![0.0, 0.0], vec![3.0, 4.0]], Norm::L2).unwrap();
        // ins(1) = 5, slow(1) = 10 > 5.
        let b = build(&ps, 1.0);
        let pair = b.elements.iter().find(|e| e.vertices == [0, 1]).unwrap();
        assert!((pair.r_star - 2.5).abs() < 1e-12);
        assert_eq!(pair.r_end, 40.0);
    }

    #[test]
    fn friends_of_first_point_are_empty() {
        let ps = line();
        let net = PersistentNet::gonzalez(&ps, 0).with_covering_sequences(1.0).unwrap();
        let sys = SparseBallSystem::new(&net, 1.0, RadiusVariant::Quadratic).unwrap();
        assert!(friends(&net, &sys, &ps, 0).is_empty());
        // Point 1 (coordinate 1): dis = 8, reach 16 covers everything before it.
        assert_eq!(friends(&net, &sys, &ps, 1), vec![0, 2, 3]);
    }

    #[test]
    fn line_elements_are_closed_and_local() {
        let ps = line();
        let b = build(&ps, 1.0);
        for e in &b.elements {
            assert!(e.r_star <= e.r_end);
            let bp = e.staircase.breakpoints();
            assert_eq!(bp[0].0, e.r_star);
            assert!(bp.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
        }
        assert!(b.invalid_grade_lists().is_empty());
    }

    #[test]
    fn chain_grades_take_pointwise_minimum() {
        let mk = |id, vertices: Vec<usize>, r_star: f64, bps: Vec<(f64, usize)>| PosetElement {
            id,
            vertices,
            r_star,
            r_end: f64::INFINITY,
            staircase: WeightStaircase::from_breakpoints(bps),
        };
        let elements = vec![
            mk(0, vec![0], 0.0, vec![(0.0, 1), (5.0, 3)]),
            mk(1, vec![0, 1], 1.0, vec![(1.0, 2), (2.0, 4)]),
        ];
        let g = chain_grades(&elements, &[0, 1]);
        assert_eq!(g, vec![Grade { r: 1.0, k: 1 }, Grade { r: 5.0, k: 3 }]);
    }

    #[test]
    fn chain_membership_query() {
        let c = ChainSimplex {
            elements: vec![0],
            grades: vec![Grade { r: 1.0, k: 1 }, Grade { r: 3.0, k: 4 }],
        };
        assert!(!c.contains(0.5, 1));
        assert!(c.contains(1.0, 1));
        assert!(!c.contains(2.0, 2));
        assert!(c.contains(3.5, 4));
        assert!(!c.contains(100.0, 5));
        assert!(c.grades_are_antichain());
    }

    #[test]
    fn rejects_mismatched_variant() {
        let ps = line();
        let err = Bifiltration::build(&ps, 1.0, RadiusVariant::PiecewiseLinearU, &BuildOptions::default(), true);
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn linf_mode_uses_pairwise_scales() {
        let ps = PointSet::from_rows(vec![vec![0.0, 0.0], vec![2.0, 1.0], vec![1.0, 2.0]], Norm::LInf).unwrap();
        let b = Bifiltration::build(&ps, 1.0, RadiusVariant::PiecewiseLinearU, &BuildOptions::default(), true).unwrap();
        let tri = b.elements.iter().find(|e| e.vertices.len() == 3).unwrap();
        // All pairwise l∞ distances are 2; none are slowed at r = 1.
        assert_eq!(tri.r_star, 1.0);
    }
}
