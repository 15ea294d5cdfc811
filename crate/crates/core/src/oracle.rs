//! Brute-force references for small inputs and the interleaving verifier.
//!
//! Nothing here calls the LP solver or the element builder. First
//! intersection scales are found by direct minimization of
//! `max_x t_x(|z - x|)` over `z`, where `t_x(d)` is the first scale at which
//! the sparse ball of `x` reaches radius `d`; the minimization is a nested
//! golden-section search, valid because the objective is quasiconvex.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bifiltration::{ChainSimplex, Grade, PosetElement};
use crate::geometry::{MetricKind, PointSet, Probe};
use crate::greedy::PersistentNet;
use crate::lpsolver::Constraint;
use crate::sparseballs::{RadiusVariant, SparseBallSystem, WeightStaircase};
use crate::{Error, Result};

/// Largest input accepted by [`brute_elements`].
pub const BRUTE_LIMIT: usize = 14;

/// Whether at least `k` data points lie within `r` of `p`.
pub fn in_cover(ps: &PointSet<f64>, p: Probe<'_, f64>, r: f64, k: usize) -> Result<bool> {
    let mut count = 0;
    for x in 0..ps.len() {
        if ps.dist_to(x, p)? <= r {
            count += 1;
            if count >= k {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Whether `p` is in the sparse `k`-cover at scale `r`: the sparse balls
/// containing `p` carry total covering weight at least `k`.
pub fn in_sparse_cover(
    sys: &SparseBallSystem<f64>,
    net: &PersistentNet<f64>,
    ps: &PointSet<f64>,
    p: Probe<'_, f64>,
    r: f64,
    k: usize,
) -> Result<bool> {
    let w = sys.covering_weights_at(net, r);
    Ok(sparse_weight(sys, ps, &w, p, r)? >= k)
}

fn sparse_weight(
    sys: &SparseBallSystem<f64>,
    ps: &PointSet<f64>,
    weights: &[usize],
    p: Probe<'_, f64>,
    r: f64,
) -> Result<usize> {
    let mut total = 0;
    for (x, &w) in weights.iter().enumerate() {
        if w > 0 && sys.in_sparse_ball(ps, x, p, r)? {
            total += w;
        }
    }
    Ok(total)
}

/// [`in_sparse_cover`] by enumerating every subset `S` of points and
/// testing `p ∈ ⋂ SB(x, r)` with `Σ c_r(x) >= k`. Exponential in `n`.
pub fn in_sparse_cover_exhaustive(
    sys: &SparseBallSystem<f64>,
    net: &PersistentNet<f64>,
    ps: &PointSet<f64>,
    p: Probe<'_, f64>,
    r: f64,
    k: usize,
) -> Result<bool> {
    let n = ps.len();
    if n > 20 {
        return Err(Error::OracleLimit { n, limit: 20 });
    }
    let w = sys.covering_weights_at(net, r);
    let inside: Vec<bool> = (0..n)
        .map(|x| sys.in_sparse_ball(ps, x, p, r))
        .collect::<std::result::Result<_, _>>()?;
    for mask in 1u32..(1 << n) {
        let members = (0..n).filter(|&x| mask >> x & 1 == 1);
        let mut ok = true;
        let mut total = 0;
        for x in members {
            ok &= inside[x];
            total += w[x];
        }
        if ok && total >= k {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Debug, Clone, Copy)]
pub struct InterleavingOptions {
    pub probes: usize,
    pub scales: usize,
    pub max_k: usize,
    pub seed: u64,
}

impl Default for InterleavingOptions {
    fn default() -> Self {
        InterleavingOptions {
            probes: 200,
            scales: 20,
            max_k: 5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InterleavingWitness {
    pub probe: Vec<f64>,
    pub r: f64,
    pub k: usize,
    /// 1: `Cov(r,k) ⊄ SCov((1+3eps) r, k)`; 2: `SCov(r,k) ⊄ Cov(delta r, k)`.
    pub inclusion: u8,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct InterleavingReport {
    pub eps: f64,
    pub delta: f64,
    pub probes: usize,
    pub scales: Vec<f64>,
    pub checks: usize,
    pub violations: Vec<InterleavingWitness>,
}

/// Samples `(p, r, k)` and checks `Cov(r,k) ⊂ SCov((1+3eps)r,k)` and
/// `SCov(r,k) ⊂ Cov(delta r,k)`, `delta = (1+2eps)/(1+eps)`.
///
/// Probes are uniform in the data bounding box inflated by the largest
/// tested scale, plus every data point and every pairwise midpoint. Scales
/// are log-uniform between half the smallest and twice the largest
/// pairwise distance.
pub fn check_interleaving(
    sys: &SparseBallSystem<f64>,
    net: &PersistentNet<f64>,
    ps: &PointSet<f64>,
    opts: &InterleavingOptions,
) -> Result<InterleavingReport> {
    let (lo, hi) = ps.bounding_box().ok_or(Error::Geometry(
        crate::geometry::GeometryError::NoCoordinates,
    ))?;
    let n = ps.len();
    let eps = sys.eps();
    let grow = 1.0 + 3.0 * eps;
    let delta = (1.0 + 2.0 * eps) / (1.0 + eps);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let (mut dmin, mut dmax) = (f64::INFINITY, 0.0f64);
    for i in 0..n {
        for j in i + 1..n {
            let d = ps.dist(i, j);
            dmin = dmin.min(d);
            dmax = dmax.max(d);
        }
    }
    if n < 2 {
        dmin = 1.0;
        dmax = 1.0;
    }
    let (llo, lhi) = ((dmin / 2.0).ln(), (2.0 * dmax).ln());
    let scales: Vec<f64> = (0..opts.scales)
        .map(|_| rng.gen_range(llo..=lhi).exp())
        .collect();
    let pad = scales.iter().fold(0.0f64, |a, &b| a.max(b)) * grow;

    let mut probes: Vec<Vec<f64>> = (0..opts.probes)
        .map(|_| {
            lo.iter()
                .zip(&hi)
                .map(|(&a, &b)| rng.gen_range(a - pad..=b + pad))
                .collect()
        })
        .collect();
    for i in 0..n {
        let pi = ps.coords(i).expect("coordinates");
        probes.push(pi.to_vec());
        for j in i + 1..n {
            let pj = ps.coords(j).expect("coordinates");
            probes.push(pi.iter().zip(pj).map(|(a, b)| 0.5 * (a + b)).collect());
        }
    }

    let mut report = InterleavingReport {
        eps,
        delta,
        probes: probes.len(),
        scales: scales.clone(),
        ..Default::default()
    };
    for &r in &scales {
        let w_r = sys.covering_weights_at(net, r);
        let w_grown = sys.covering_weights_at(net, grow * r);
        for p in &probes {
            let probe = Probe::Coords(p);
            let mut dists: Vec<f64> = (0..n)
                .map(|x| ps.dist_to(x, probe))
                .collect::<std::result::Result<_, _>>()?;
            dists.sort_by(f64::total_cmp);
            let cover = |s: f64| dists.partition_point(|&d| d <= s);
            let sparse_grown = sparse_weight(sys, ps, &w_grown, probe, grow * r)?;
            let sparse = sparse_weight(sys, ps, &w_r, probe, r)?;
            let (cov_r, cov_delta) = (cover(r), cover(delta * r));
            for k in 1..=opts.max_k {
                report.checks += 2;
                if cov_r >= k && sparse_grown < k {
                    report.violations.push(InterleavingWitness {
                        probe: p.clone(),
                        r,
                        k,
                        inclusion: 1,
                    });
                }
                if sparse >= k && cov_delta < k {
                    report.violations.push(InterleavingWitness {
                        probe: p.clone(),
                        r,
                        k,
                        inclusion: 2,
                    });
                }
            }
        }
    }
    Ok(report)
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
fn golden_min(mut lo: f64, mut hi: f64, f: &mut dyn FnMut(f64) -> f64) -> (f64, f64) {
    let tol = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    let mut a = hi - GOLDEN * (hi - lo);
    let mut b = lo + GOLDEN * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - GOLDEN * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + GOLDEN * (hi - lo);
            fb = f(b);
        }
    }
    let mut best = (a, fa);
    for x in [lo, hi, b] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Minimizes a quasiconvex `f` over a box by golden section on the first
/// coordinate of the inner minimum over the remaining ones.
pub fn nested_golden_min(lo: &[f64], hi: &[f64], f: &dyn Fn(&[f64]) -> f64) -> (Vec<f64>, f64) {
    let mut prefix = Vec::with_capacity(lo.len());
    let (v, z) = nested_rec(lo, hi, &mut prefix, f);
    (z, v)
}

fn nested_rec(lo: &[f64], hi: &[f64], prefix: &mut Vec<f64>, f: &dyn Fn(&[f64]) -> f64) -> (f64, Vec<f64>) {
    let i = prefix.len();
    if i == lo.len() {
        return (f(prefix), prefix.clone());
    }
    let mut best = (f64::INFINITY, Vec::new());
    golden_min(lo[i], hi[i], &mut |t| {
        prefix.push(t);
        let (v, z) = nested_rec(lo, hi, prefix, f);
        prefix.pop();
        if v < best.0 {
            best = (v, z);
        }
        v
    });
    best
}

/// Problem (M) by direct minimization of `max_i reach(z, h_i)` over the
/// bounding box of the constraint points.
pub fn golden_solve_m(constraints: &[Constraint<f64>]) -> (Vec<f64>, f64) {
    let d = constraints[0].p.len();
    let lo: Vec<f64> = (0..d)
        .map(|t| constraints.iter().map(|c| c.p[t]).fold(f64::INFINITY, f64::min))
        .collect();
    let hi: Vec<f64> = (0..d)
        .map(|t| constraints.iter().map(|c| c.p[t]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let f = |z: &[f64]| {
        constraints
            .iter()
            .map(|c| {
                let d2: f64 = z.iter().zip(&c.p).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2 - c.beta) / c.alpha
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };
    nested_golden_min(&lo, &hi, &f)
}

/// Minimum enclosing ball `(center, squared radius)` by trying the
/// circumball of every subset of at most `d + 1` points.
pub fn brute_miniball(points: &[Vec<f64>]) -> (Vec<f64>, f64) {
    let n = points.len();
    let d = points[0].len();
    let scale = points
        .iter()
        .flat_map(|p| p.iter())
        .fold(1.0f64, |a, &b| a.max(b.abs()));
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut stack: Vec<usize> = Vec::new();
    subsets_upto(n, d + 1, &mut stack, 0, &mut |sub| {
        let Some((z, s)) = circumball(points, sub) else {
            return;
        };
        if best.as_ref().is_some_and(|b| b.1 <= s) {
            return;
        }
        let slack = 1e-12 * scale * scale;
        let encloses = points.iter().all(|p| {
            let d2: f64 = p.iter().zip(&z).map(|(a, b)| (a - b) * (a - b)).sum();
            d2 <= s + slack
        });
        if encloses {
            best = Some((z, s));
        }
    });
    best.expect("the diameter pair always encloses or a larger subset does")
}

fn subsets_upto(n: usize, max: usize, stack: &mut Vec<usize>, start: usize, f: &mut dyn FnMut(&[usize])) {
    if !stack.is_empty() {
        f(stack);
    }
    if stack.len() == max {
        return;
    }
    for i in start..n {
        stack.push(i);
        subsets_upto(n, max, stack, i + 1, f);
        stack.pop();
    }
}

/// Center in the affine hull of the chosen points equidistant from all of
/// them; `None` if they are affinely dependent.
fn circumball(points: &[Vec<f64>], sub: &[usize]) -> Option<(Vec<f64>, f64)> {
    let p0 = &points[sub[0]];
    let m = sub.len() - 1;
    // z = p0 + Σ μ_j (p_j - p0); |z - p_j|^2 = |z - p0|^2 gives
    // Σ_k 2 (v_j·v_k) μ_k = v_j·v_j.
    let v: Vec<Vec<f64>> = sub[1..]
        .iter()
        .map(|&j| points[j].iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut a: Vec<Vec<f64>> = (0..m)
        .map(|j| {
            let mut row: Vec<f64> = (0..m).map(|k| 2.0 * dot(&v[j], &v[k])).collect();
            row.push(dot(&v[j], &v[j]));
            row
        })
        .collect();
    // Gaussian elimination with partial pivoting.
    let norm = a.iter().flat_map(|r| r[..m].iter()).fold(0.0f64, |s, x| s.max(x.abs()));
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-10 * norm {
            return None;
        }
        a.swap(col, piv);
        for row in col + 1..m {
            let f = a[row][col] / a[col][col];
            for k in col..=m {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    let mut mu = vec![0.0; m];
    for row in (0..m).rev() {
        let s: f64 = (row + 1..m).map(|k| a[row][k] * mu[k]).sum();
        mu[row] = (a[row][m] - s) / a[row][row];
    }
    let z: Vec<f64> = (0..p0.len())
        .map(|t| p0[t] + (0..m).map(|j| mu[j] * v[j][t]).sum::<f64>())
        .collect();
    let s = z.iter().zip(p0).map(|(a, b)| (a - b) * (a - b)).sum();
    Some((z, s))
}

/// First scale at which the sparse ball of `x` has radius `d`, extended
/// past the disappearance time with unit slope so the objective stays
/// strictly increasing.
fn entry_time(sys: &SparseBallSystem<f64>, x: usize, d: f64) -> f64 {
    let slow = sys.slow(x);
    if d <= slow {
        return d;
    }
    let eps = sys.eps();
    let dis = sys.dis(x);
    let t = match sys.variant() {
        RadiusVariant::Quadratic => {
            let k = 1.0 / (3.0 * (1.0 + eps) * (1.0 + eps));
            ((d * d - (1.0 - k) * slow * slow) / k).sqrt()
        }
        RadiusVariant::PiecewiseLinearU => {
            let denom = 3.0 * (1.0 + eps);
            (d - (2.0 + 3.0 * eps) / denom * slow) * denom
        }
    };
    if t <= dis {
        return t;
    }
    let top = sys.radius(x, dis).expect("alive at dis");
    dis + (d - top)
}

/// Smallest `r` at which the sparse balls of `tau` share a point, ignoring
/// disappearance.
fn oracle_scale(sys: &SparseBallSystem<f64>, ps: &PointSet<f64>, tau: &[usize]) -> f64 {
    if tau.len() == 1 {
        return 0.0;
    }
    if ps.metric_kind() == MetricKind::Matrix {
        // Pairwise criterion; each pair by bisection on the radius sum.
        let mut r = 0.0f64;
        for (i, &a) in tau.iter().enumerate() {
            for &b in &tau[i + 1..] {
                r = r.max(pair_scale_bisect(sys, ps.dist(a, b), a, b));
            }
        }
        return r;
    }
    let pts: Vec<&[f64]> = tau.iter().map(|&x| ps.coords(x).expect("coordinates")).collect();
    let d = pts[0].len();
    let lo: Vec<f64> = (0..d).map(|t| pts.iter().map(|p| p[t]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..d).map(|t| pts.iter().map(|p| p[t]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let linf = ps.metric_kind() == MetricKind::LInf;
    let f = |z: &[f64]| {
        tau.iter()
            .zip(&pts)
            .map(|(&x, p)| {
                let dist = if linf {
                    z.iter().zip(p.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
                } else {
                    z.iter().zip(p.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
                };
                entry_time(sys, x, dist)
            })
            .fold(0.0, f64::max)
    };
    nested_golden_min(&lo, &hi, &f).1
}

fn pair_scale_bisect(sys: &SparseBallSystem<f64>, dist: f64, a: usize, b: usize) -> f64 {
    let sum = |r: f64| entry_radius(sys, a, r) + entry_radius(sys, b, r);
    let (mut lo, mut hi) = (0.0, dist);
    while sum(hi) < dist {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sum(mid) >= dist {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Radius with the same unit-slope extension as [`entry_time`].
fn entry_radius(sys: &SparseBallSystem<f64>, x: usize, r: f64) -> f64 {
    let dis = sys.dis(x);
    match sys.radius(x, r) {
        Some(rho) => rho,
        None => sys.radius(x, dis).expect("alive at dis") + (r - dis),
    }
}

/// Every subset of the points whose sparse balls meet within their
/// window, with staircases evaluated on the event grid. Canonical order.
pub fn brute_elements(
    sys: &SparseBallSystem<f64>,
    net: &PersistentNet<f64>,
    ps: &PointSet<f64>,
) -> Result<Vec<PosetElement<f64>>> {
    let n = ps.len();
    if n > BRUTE_LIMIT {
        return Err(Error::OracleLimit { n, limit: BRUTE_LIMIT });
    }
    let mut masks: Vec<u32> = (1u32..(1 << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), (0..n).filter(|&i| m >> i & 1 == 1).collect::<Vec<_>>()));

    let mut grid: Vec<f64> = (0..n).map(|x| sys.dis(x)).filter(|d| d.is_finite()).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let weight_cache: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut weight_cache = weight_cache;
    let mut weights_at = |r: f64| -> Vec<usize> {
        weight_cache
            .entry(r.to_bits())
            .or_insert_with(|| sys.covering_weights_at(net, r))
            .clone()
    };

    let mut found: HashMap<u32, f64> = HashMap::new();
    let mut out = Vec::new();
    for m in masks {
        let tau: Vec<usize> = (0..n).filter(|&i| m >> i & 1 == 1).collect();
        // Subsets of an element are elements, so a missing facet rules `tau` out.
        if tau.len() > 1 && !(0..n).filter(|&i| m >> i & 1 == 1).all(|i| found.contains_key(&(m & !(1 << i)))) {
            continue;
        }
        let r_end = tau.iter().map(|&x| sys.dis(x)).fold(f64::INFINITY, f64::min);
        let r_star = oracle_scale(sys, ps, &tau);
        if r_star > r_end {
            continue;
        }
        found.insert(m, r_star);

        const DELTA: f64 = 1e-7;
        let value = |w: &[usize]| tau.iter().map(|&x| w[x]).sum::<usize>();
        let eval = |r: f64, weights_at: &mut dyn FnMut(f64) -> Vec<usize>| {
            if r + DELTA >= r_end {
                value(&weights_at(r_end))
            } else {
                value(&weights_at(r + DELTA))
            }
        };
        let mut bps = vec![(r_star, eval(r_star, &mut weights_at))];
        for &g in grid.iter().filter(|&&g| g > r_star && g < r_end) {
            bps.push((g, eval(g, &mut weights_at)));
        }
        out.push(PosetElement {
            id: out.len(),
            vertices: tau,
            r_star,
            r_end,
            staircase: WeightStaircase::from_breakpoints(bps),
        });
    }
    Ok(out)
}

/// Chains of length at most `max_dim + 1` among `elements` by pairwise
/// containment tests, with grades read off the breakpoint grid of the
/// members. Canonical order.
pub fn brute_chains(elements: &[PosetElement<f64>], max_dim: Option<usize>) -> Vec<ChainSimplex<f64>> {
    let max_len = max_dim.map_or(usize::MAX, |d| d + 1);
    let e = elements.len();
    let subset = |a: &[usize], b: &[usize]| a.len() < b.len() && a.iter().all(|v| b.binary_search(v).is_ok());
    let mut below: Vec<Vec<usize>> = vec![Vec::new(); e];
    for (j, bj) in elements.iter().enumerate() {
        for (i, ai) in elements.iter().enumerate() {
            if subset(&ai.vertices, &bj.vertices) {
                below[j].push(i);
            }
        }
    }
    let mut chains = Vec::new();
    let mut stack = Vec::new();
    for top in 0..e {
        stack.push(top);
        chains_rec(&below, &mut stack, max_len, &mut |ids: &[usize]| {
            let mut ids = ids.to_vec();
            ids.reverse();
            let grades = grades_on_grid(elements, &ids);
            chains.push(ChainSimplex { elements: ids, grades });
        });
        stack.pop();
    }
    chains.sort_by(|a, b| a.elements.len().cmp(&b.elements.len()).then(a.elements.cmp(&b.elements)));
    chains
}

fn chains_rec(below: &[Vec<usize>], stack: &mut Vec<usize>, max_len: usize, f: &mut dyn FnMut(&[usize])) {
    f(stack);
    if stack.len() == max_len {
        return;
    }
    let last = *stack.last().expect("non-empty");
    for &i in &below[last] {
        stack.push(i);
        chains_rec(below, stack, max_len, f);
        stack.pop();
    }
}

/// Scans the breakpoints of all members: the pointwise minimum can only
/// change there.
fn grades_on_grid(elements: &[PosetElement<f64>], ids: &[usize]) -> Vec<Grade<f64>> {
    let mut grid: Vec<f64> = ids
        .iter()
        .flat_map(|&i| elements[i].staircase.breakpoints().iter().map(|b| b.0))
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut grades: Vec<Grade<f64>> = Vec::new();
    for r in grid {
        let v = ids.iter().map(|&i| elements[i].value_at(r)).min().unwrap_or(0);
        if v > grades.last().map_or(0, |g| g.k) {
            grades.push(Grade { r, k: v });
        }
    }
    grades
}

/// Differences between a built poset/chain set and a reference one.
#[derive(Debug, Clone, Default, Serialize)]
pub struct EquivalenceReport {
    pub elements_compared: usize,
    pub chains_compared: usize,
    pub max_rstar_error: f64,
    pub mismatches: Vec<String>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares elements (same vertex sets, `r_star` within `rstar_tol`,
/// identical staircase values with breakpoint scales within `rstar_tol`)
/// and chains (same id sequences, identical grade orders, grade scales
/// within `rstar_tol`).
pub fn compare(
    built: (&[PosetElement<f64>], &[ChainSimplex<f64>]),
    reference: (&[PosetElement<f64>], &[ChainSimplex<f64>]),
    rstar_tol: f64,
) -> EquivalenceReport {
    let mut rep = EquivalenceReport::default();
    let (be, bc) = built;
    let (re, rc) = reference;
    let close = |a: f64, b: f64| a == b || (a - b).abs() <= rstar_tol;
    let bmap: HashMap<&[usize], &PosetElement<f64>> = be.iter().map(|e| (e.vertices.as_slice(), e)).collect();
    let rmap: HashMap<&[usize], &PosetElement<f64>> = re.iter().map(|e| (e.vertices.as_slice(), e)).collect();
    for e in re {
        match bmap.get(e.vertices.as_slice()) {
            None => rep.mismatches.push(format!("missing element {:?}", e.vertices)),
            Some(b) => {
                rep.elements_compared += 1;
                let err = (b.r_star - e.r_star).abs();
                rep.max_rstar_error = rep.max_rstar_error.max(err);
                if !close(b.r_star, e.r_star) {
                    rep.mismatches.push(format!(
                        "element {:?}: rstar {} vs reference {}",
                        e.vertices, b.r_star, e.r_star
                    ));
                }
                let bv: Vec<usize> = b.staircase.breakpoints().iter().map(|p| p.1).collect();
                let rv: Vec<usize> = e.staircase.breakpoints().iter().map(|p| p.1).collect();
                let scales_ok = b
                    .staircase
                    .breakpoints()
                    .iter()
                    .zip(e.staircase.breakpoints())
                    .all(|(x, y)| close(x.0, y.0));
                if bv != rv || !scales_ok {
                    rep.mismatches.push(format!(
                        "element {:?}: staircase {:?} vs reference {:?}",
                        e.vertices,
                        b.staircase.breakpoints(),
                        e.staircase.breakpoints()
                    ));
                }
            }
        }
    }
    for e in be {
        if !rmap.contains_key(e.vertices.as_slice()) {
            rep.mismatches.push(format!("extra element {:?}", e.vertices));
        }
    }

    // Reference ids are translated to built ids through the vertex sets.
    let to_built: Vec<Option<usize>> = re
        .iter()
        .map(|e| bmap.get(e.vertices.as_slice()).map(|b| b.id))
        .collect();
    let bchains: HashMap<&[usize], &ChainSimplex<f64>> = bc.iter().map(|c| (c.elements.as_slice(), c)).collect();
    let mut seen = 0;
    let mut ids = Vec::new();
    for c in rc {
        ids.clear();
        ids.extend(c.elements.iter().map(|&i| to_built[i]));
        let found = if ids.iter().all(Option::is_some) {
            let key: Vec<usize> = ids.iter().map(|i| i.expect("checked")).collect();
            bchains.get(key.as_slice()).copied()
        } else {
            None
        };
        let vertex_sets = || -> Vec<&[usize]> { c.elements.iter().map(|&i| re[i].vertices.as_slice()).collect() };
        match found {
            None => rep.mismatches.push(format!("missing chain {:?}", vertex_sets())),
            Some(b) => {
                seen += 1;
                let orders_eq = b.grades.len() == c.grades.len()
                    && b.grades.iter().zip(&c.grades).all(|(x, y)| x.k == y.k && close(x.r, y.r));
                if !orders_eq {
                    rep.mismatches.push(format!(
                        "chain {:?}: grades {:?} vs reference {:?}",
                        vertex_sets(),
                        b.grades,
                        c.grades
                    ));
                }
            }
        }
    }
    if bc.len() != seen {
        rep.mismatches.push(format!("{} extra chains", bc.len() - seen));
    }
    rep.chains_compared = seen;
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Norm;

    fn system(rows: Vec<Vec<f64>>, eps: f64) -> (PointSet<f64>, PersistentNet<f64>, SparseBallSystem<f64>) {
        let ps = PointSet::from_rows(rows, Norm::L2).unwrap();
        let net = PersistentNet::gonzalez(&ps, 0).with_covering_sequences(eps).unwrap();
        let sys = SparseBallSystem::new(&net, eps, RadiusVariant::Quadratic).unwrap();
        (ps, net, sys)
    }

    #[test]
    fn cover_basics() {
        let (ps, net, sys) = system(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![5.0, 5.0]], 1.0);
        assert!(in_cover(&ps, Probe::Index(0), 0.0, 1).unwrap());
        assert!(!in_cover(&ps, Probe::Coords(&[0.0, 0.0]), 100.0, 4).unwrap());
        assert!(in_sparse_cover(&sys, &net, &ps, Probe::Index(1), 0.5, 1).unwrap());
        // Far past every finite disappearance only point 0 remains.
        assert!(!in_sparse_cover(&sys, &net, &ps, Probe::Coords(&[1e6, 0.0]), 1e3, 1).unwrap());
    }

    #[test]
    fn golden_search_finds_minimum() {
        let f = |z: &[f64]| (z[0] - 0.3).abs().max((z[1] + 0.7).powi(2));
        let (z, v) = nested_golden_min(&[-1.0, -1.0], &[1.0, 1.0], &f);
        assert!((z[0] - 0.3).abs() < 1e-9 && (z[1] + 0.7).abs() < 1e-5);
        assert!(v < 1e-9);
    }

    #[test]
    fn miniball_references() {
        let tri = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]];
        assert!((brute_miniball(&tri).1 - 1.0 / 3.0).abs() < 1e-12);
        let line: Vec<Vec<f64>> = [0.0, 0.5, 3.0, -1.0].iter().map(|&x| vec![x, 0.0]).collect();
        assert!((brute_miniball(&line).1 - 4.0).abs() < 1e-12);
        let (_, s) = golden_solve_m(&tri.iter().map(|p| Constraint::point(p.clone())).collect::<Vec<_>>());
        assert!((s - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn single_point_element() {
        let (ps, net, sys) = system(vec![vec![0.0, 0.0]], 1.0);
        let els = brute_elements(&sys, &net, &ps).unwrap();
        assert_eq!(els.len(), 1);
        assert_eq!(els[0].staircase.breakpoints(), &[(0.0, 1)]);
    }

    #[test]
    fn entry_time_inverts_radius() {
        let (_, _, sys) = system(vec![vec![0.0], vec![1.0], vec![3.0], vec![7.0]], 0.5);
        for x in 1..4 {
            for i in 1..50 {
                let r = sys.dis(x) * i as f64 / 50.0;
                let rho = sys.radius(x, r).unwrap();
                assert!((entry_time(&sys, x, rho) - r).abs() < 1e-9 * (1.0 + r));
            }
        }
    }

    #[test]
    fn too_large_for_brute_force() {
        let rows: Vec<Vec<f64>> = (0..15).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let (ps, net, sys) = system(rows, 1.0);
        assert!(matches!(brute_elements(&sys, &net, &ps), Err(Error::OracleLimit { .. })));
    }
}
