//! LP-type solver for problem (M):
//!
//! ```text
//! minimize s  subject to  |p_i - z|^2 <= alpha_i s + beta_i,  i = 1..m
//! ```
//!
//! With all `alpha = 1, beta = 0` this is the smallest enclosing ball of the
//! `p_i` (radius `sqrt(s)`). With two constraints per point it encodes the
//! first scale at which a set of quadratic-radius sparse balls intersect.
//!
//! The driver keeps a basis (at most `d + 1` constraints whose center is
//! tangent to all of them and lies in the convex hull of their points) and
//! replaces it whenever a constraint is violated. Basis computation tries
//! every subset of the old basis plus the violator, smallest first.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{MetricKind, PointSet};
use crate::sparseballs::{RadiusVariant, SparseBallSystem};
use crate::{Error, Real, Result};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("no constraints")]
    Empty,
    #[error("constraint {index} is invalid: {reason}")]
    InvalidConstraint { index: usize, reason: String },
    #[error("constraints {0} and {1} share the same point")]
    DuplicatePoints(usize, usize),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

type LpResult<T> = std::result::Result<T, LpError>;

/// `|p - z|^2 <= alpha s + beta` with `alpha > 0`, `beta >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<T> {
    pub p: Vec<T>,
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> Constraint<T> {
    pub fn new(p: Vec<T>, alpha: T, beta: T) -> Self {
        Constraint { p, alpha, beta }
    }

    /// Constraint of the plain miniball problem.
    pub fn point(p: Vec<T>) -> Self {
        Constraint::new(p, T::one(), T::zero())
    }

    fn validate(&self, index: usize, dim: usize) -> LpResult<()> {
        let bad = |reason: &str| {
            Err(LpError::InvalidConstraint {
                index,
                reason: reason.to_owned(),
            })
        };
        if self.p.len() != dim {
            return bad("dimension mismatch");
        }
        if !self.p.iter().all(|v| v.is_finite()) {
            return bad("non-finite coordinate");
        }
        if !(self.alpha > T::zero()) || !self.alpha.is_finite() {
            return bad("alpha must be positive and finite");
        }
        if !(self.beta >= T::zero()) || !self.beta.is_finite() {
            return bad("beta must be non-negative and finite");
        }
        Ok(())
    }
}

/// `(|p - z|^2 - beta) / alpha`: the value of `s` that `z` forces.
#[inline]
pub fn reach<T: Real>(z: &[T], c: &Constraint<T>) -> T {
    (sq_dist(z, &c.p) - c.beta) / c.alpha
}

#[inline]
fn sq_dist<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .fold(T::zero(), |s, v| s + v)
}

#[inline]
fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).fold(T::zero(), |s, v| s + v)
}

/// Tangent point of a candidate basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Center<T> {
    pub center: Vec<T>,
    pub value: T,
    /// Barycentric coordinates of the center w.r.t. the member points.
    pub lambda: Vec<T>,
}

/// Solves the tangency system of `members`: the point `z` in the affine hull
/// of the member points with `|p_i - z|^2 = alpha_i s + beta_i` for all
/// members. Returns `None` when the members cannot form a basis (affinely
/// dependent points, no real solution, or center outside the convex hull).
pub fn center_of_basis<T: Real>(members: &[&Constraint<T>]) -> LpResult<Option<Center<T>>> {
    let k = members.len();
    let first = *members.first().ok_or(LpError::Empty)?;
    let dim = first.p.len();
    for (i, a) in members.iter().enumerate() {
        for (j, b) in members.iter().enumerate().skip(i + 1) {
            if a.p == b.p {
                return Err(LpError::DuplicatePoints(i, j));
            }
        }
    }
    if k > dim + 1 {
        return Ok(None);
    }
    if k == 1 {
        return Ok(Some(Center {
            center: first.p.clone(),
            value: -first.beta / first.alpha,
            lambda: vec![T::one()],
        }));
    }

    let two = T::lit(2.0);
    let m = k - 1;
    let q: Vec<Vec<T>> = members[1..]
        .iter()
        .map(|h| h.p.iter().zip(&first.p).map(|(&a, &b)| a - b).collect())
        .collect();
    let mut gram = vec![T::zero(); m * m];
    for i in 0..m {
        for j in i..m {
            let g = two * dot(&q[i], &q[j]);
            gram[i * m + j] = g;
            gram[j * m + i] = g;
        }
    }
    let Some(inv) = invert(&gram, m) else {
        return Ok(None);
    };
    let e: Vec<T> = (0..m)
        .map(|i| dot(&q[i], &q[i]) + first.beta - members[i + 1].beta)
        .collect();
    let d: Vec<T> = (0..m).map(|i| first.alpha - members[i + 1].alpha).collect();
    // lambda(s) = a + b s, c(s) = z - p_1 = u + v s.
    let a = mat_vec(&inv, &e, m);
    let b = mat_vec(&inv, &d, m);
    let combine = |w: &[T]| -> Vec<T> {
        (0..dim)
            .map(|t| (0..m).fold(T::zero(), |acc, j| acc + w[j] * q[j][t]))
            .collect()
    };
    let u = combine(&a);
    let v = combine(&b);

    // c^T c = alpha_1 s + beta_1.
    let qa = dot(&v, &v);
    let qb = two * dot(&u, &v) - first.alpha;
    let qc = dot(&u, &u) - first.beta;
    let roots = quadratic_roots(qa, qb, qc);

    let tol = T::solver_tol();
    let mut best: Option<Center<T>> = None;
    for s in roots.into_iter().flatten() {
        if !s.is_finite() {
            continue;
        }
        let mut lambda = Vec::with_capacity(k);
        let tail: Vec<T> = (0..m).map(|j| a[j] + b[j] * s).collect();
        let sum = tail.iter().fold(T::zero(), |acc, &l| acc + l);
        lambda.push(T::one() - sum);
        lambda.extend(tail);
        if lambda.iter().any(|&l| l < -tol) {
            continue;
        }
        let floor_ok = members
            .iter()
            .all(|h| h.alpha * s + h.beta >= -tol * T::one().max(s.abs()));
        if !floor_ok {
            continue;
        }
        if best.as_ref().is_some_and(|c| c.value <= s) {
            continue;
        }
        let center = first
            .p
            .iter()
            .zip(u.iter().zip(&v))
            .map(|(&p, (&ui, &vi))| p + ui + vi * s)
            .collect();
        best = Some(Center {
            center,
            value: s,
            lambda,
        });
    }
    Ok(best)
}

/// Real roots of `a s^2 + b s + c`, numerically stable. A slightly
/// negative discriminant (relative round-off) is treated as zero.
fn quadratic_roots<T: Real>(a: T, b: T, c: T) -> [Option<T>; 2] {
    if a == T::zero() {
        if b == T::zero() {
            return [None, None];
        }
        return [Some(-c / b), None];
    }
    let mut disc = b * b - T::lit(4.0) * a * c;
    if disc < T::zero() {
        let scale = (b * b).max((T::lit(4.0) * a * c).abs());
        if disc < -T::round_off() * scale {
            return [None, None];
        }
        disc = T::zero();
    }
    let sq = disc.sqrt();
    let qq = if b >= T::zero() {
        -(b + sq) / T::lit(2.0)
    } else {
        (sq - b) / T::lit(2.0)
    };
    if qq == T::zero() {
        return [Some(T::zero()), None];
    }
    [Some(qq / a), Some(c / qq)]
}

fn mat_vec<T: Real>(m: &[T], v: &[T], n: usize) -> Vec<T> {
    (0..n)
        .map(|i| (0..n).fold(T::zero(), |acc, j| acc + m[i * n + j] * v[j]))
        .collect()
}

/// Gauss-Jordan inverse with partial pivoting. `None` if singular or if the
/// 1-norm condition number exceeds [`Real::max_condition`].
fn invert<T: Real>(m: &[T], n: usize) -> Option<Vec<T>> {
    let norm1 = |a: &[T]| {
        (0..n)
            .map(|j| (0..n).fold(T::zero(), |acc, i| acc + a[i * n + j].abs()))
            .fold(T::zero(), T::max)
    };
    let mut a = m.to_vec();
    let mut inv = vec![T::zero(); n * n];
    for i in 0..n {
        inv[i * n + i] = T::one();
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| {
            a[x * n + col]
                .abs()
                .partial_cmp(&a[y * n + col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        let pv = a[piv * n + col];
        if pv == T::zero() || !pv.is_finite() {
            return None;
        }
        if piv != col {
            for j in 0..n {
                a.swap(piv * n + j, col * n + j);
                inv.swap(piv * n + j, col * n + j);
            }
        }
        for j in 0..n {
            a[col * n + j] = a[col * n + j] / pv;
            inv[col * n + j] = inv[col * n + j] / pv;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = a[row * n + col];
            if f == T::zero() {
                continue;
            }
            for j in 0..n {
                a[row * n + j] = a[row * n + j] - f * a[col * n + j];
                inv[row * n + j] = inv[row * n + j] - f * inv[col * n + j];
            }
        }
    }
    let cond = norm1(m) * norm1(&inv);
    if !cond.is_finite() || cond > T::max_condition() {
        return None;
    }
    Some(inv)
}

/// A basis: constraint indices (into the problem's constraint list) with
/// their common tangent center.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis<T> {
    pub members: Vec<usize>,
    pub center: Vec<T>,
    pub value: T,
    pub lambda: Vec<T>,
}

impl<T: Real> Basis<T> {
    fn singleton(constraints: &[Constraint<T>], h: usize) -> Self {
        let c = &constraints[h];
        Basis {
            members: vec![h],
            center: c.p.clone(),
            value: -c.beta / c.alpha,
            lambda: vec![T::one()],
        }
    }
}

#[inline]
fn violation_tol<T: Real>(value: T) -> T {
    T::solver_tol() * T::one().max(value.abs())
}

/// Whether adding `h` raises the value of `basis`.
pub fn violation_test<T: Real>(h: &Constraint<T>, basis: &Basis<T>) -> bool {
    reach(&basis.center, h) > basis.value + violation_tol(basis.value)
}

/// A basis of `basis ∪ {h}` where `h` violates `basis`. Subsets containing
/// `h` are tried by increasing size, lexicographically by constraint index
/// within a size; subsets with repeated points are skipped since a basis
/// never has two constraints on the same point.
pub fn basis_computation<T: Real>(
    constraints: &[Constraint<T>],
    h: usize,
    basis: &Basis<T>,
) -> LpResult<Basis<T>> {
    let mut pool: Vec<usize> = basis.members.iter().copied().filter(|&g| g != h).collect();
    pool.sort_unstable();
    let dim = constraints[h].p.len();
    let max_extra = pool.len().min(dim);
    let mut all: Vec<usize> = pool.clone();
    all.push(h);

    let mut picked: Vec<usize> = Vec::with_capacity(max_extra + 1);
    for extra in 0..=max_extra {
        let mut found = None;
        for_each_combination(pool.len(), extra, &mut |combo| {
            picked.clear();
            picked.extend(combo.iter().map(|&i| pool[i]));
            picked.push(h);
            picked.sort_unstable();
            let members: Vec<&Constraint<T>> = picked.iter().map(|&i| &constraints[i]).collect();
            let Ok(Some(c)) = center_of_basis(&members) else {
                return false;
            };
            let tol = violation_tol(c.value);
            if all.iter().all(|&g| reach(&c.center, &constraints[g]) <= c.value + tol) {
                found = Some(Basis {
                    members: picked.clone(),
                    center: c.center,
                    value: c.value,
                    lambda: c.lambda,
                });
                return true;
            }
            false
        });
        if let Some(b) = found {
            return Ok(b);
        }
    }
    Err(LpError::NumericalFailure(format!(
        "no subset of {} constraints is a basis of the enlarged set",
        all.len()
    )))
}

/// Calls `f` on each `k`-subset of `0..n` in lexicographic order until it
/// returns `true`.
fn for_each_combination(n: usize, k: usize, f: &mut impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if f(&idx) {
            return;
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Optimum of problem (M).
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    pub center: Vec<T>,
    pub value: T,
    pub basis: Basis<T>,
}

/// Solves problem (M). Constraints are visited in a seeded random order;
/// a violated constraint triggers a basis computation and moves to the
/// front of the order. Passes repeat until one finds no violation.
pub fn solve_m<T: Real>(constraints: &[Constraint<T>], seed: u64) -> LpResult<Solution<T>> {
    let first = constraints.first().ok_or(LpError::Empty)?;
    let dim = first.p.len();
    for (i, c) in constraints.iter().enumerate() {
        c.validate(i, dim)?;
    }
    let m = constraints.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut basis = Basis::singleton(constraints, order[0]);
    let max_changes = 64 * m * (dim + 2) + 1024;
    let mut changes = 0;
    loop {
        let mut changed = false;
        for i in 0..m {
            let h = order[i];
            if basis.members.contains(&h) || !violation_test(&constraints[h], &basis) {
                continue;
            }
            basis = basis_computation(constraints, h, &basis)?;
            order[..=i].rotate_right(1);
            changed = true;
            changes += 1;
            if changes > max_changes {
                return Err(LpError::NumericalFailure(format!(
                    "no convergence after {changes} basis changes"
                )));
            }
        }
        if !changed {
            break;
        }
    }
    Ok(Solution {
        center: basis.center.clone(),
        value: basis.value,
        basis,
    })
}

/// Seed for the solve of a specific vertex set. Independent of the order in
/// which sets are visited, so parallel and serial builds agree.
pub(crate) fn subset_seed(seed: u64, vertices: &[usize]) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for &v in vertices {
        h ^= v as u64;
        h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h ^= h >> 31;
    }
    h
}

/// The two constraints per point encoding quadratic-radius sparse balls:
/// `|a - z|^2 <= r^2` and `|a - z|^2 <= K r^2 + (1-K) slow(a)^2` with
/// `s = r^2`. The second is dropped for infinite slowing time.
pub fn sparse_ball_constraints<T: Real>(
    sys: &SparseBallSystem<T>,
    ps: &PointSet<T>,
    set: &[usize],
) -> Result<Vec<Constraint<T>>> {
    if ps.metric_kind() != MetricKind::L2 || sys.variant() != RadiusVariant::Quadratic {
        return Err(Error::Config(
            "LP first-intersection requires l2 coordinates and the quadratic radius".into(),
        ));
    }
    let k = sys.k_eps();
    let mut out = Vec::with_capacity(2 * set.len());
    for &a in set {
        let p = ps.coords(a).expect("l2 point sets have coordinates").to_vec();
        let slow = sys.slow(a);
        if slow.is_finite() {
            out.push(Constraint::new(p.clone(), k, (T::one() - k) * slow * slow));
        }
        out.push(Constraint::point(p));
    }
    Ok(out)
}

/// First scale at which the sparse balls of `set` share a point, or `None`
/// if one of them disappears first.
pub fn first_intersection_scale<T: Real>(
    sys: &SparseBallSystem<T>,
    ps: &PointSet<T>,
    set: &[usize],
    seed: u64,
) -> Result<Option<T>> {
    if set.is_empty() {
        return Err(LpError::Empty.into());
    }
    let constraints = sparse_ball_constraints(sys, ps, set)?;
    let sol = solve_m(&constraints, seed)?;
    let r = sol.value.max(T::zero()).sqrt();
    let end = set.iter().map(|&a| sys.dis(a)).fold(T::infinity(), T::min);
    Ok((r <= end).then_some(r))
}

/// Smallest `r` with `radius(x, r) + radius(y, r) >= dist(x, y)`, in closed
/// form over the cells cut by the two slowing times; `None` if no such `r`
/// is at most `min(dis(x), dis(y))`.
pub fn pairwise_first_intersection<T: Real>(
    sys: &SparseBallSystem<T>,
    ps: &PointSet<T>,
    x: usize,
    y: usize,
) -> Option<T> {
    let dist = ps.dist(x, y);
    pairwise_at_distance(sys, x, y, dist)
}

pub(crate) fn pairwise_at_distance<T: Real>(
    sys: &SparseBallSystem<T>,
    x: usize,
    y: usize,
    dist: T,
) -> Option<T> {
    let zero = T::zero();
    let two = T::lit(2.0);
    // `lo` slows first.
    let (lo, hi) = if sys.slow(x) <= sys.slow(y) { (x, y) } else { (y, x) };
    let end = sys.dis(x).min(sys.dis(y));
    let sum = |r: T| -> T {
        sys.radius(x, r).unwrap_or(zero) + sys.radius(y, r).unwrap_or(zero)
    };
    if sum(end) < dist {
        return None;
    }
    let s1 = sys.slow(lo).min(end);
    let s2 = sys.slow(hi).min(end);
    let r = if two * s1 >= dist {
        dist / two
    } else if sum(s2) >= dist {
        // Only `lo` is slowed: rho_lo(r) + r = dist.
        match sys.variant() {
            RadiusVariant::Quadratic => {
                let k = sys.k_eps();
                let c = (T::one() - k) * sys.slow(lo) * sys.slow(lo);
                let root = (k * dist * dist + (T::one() - k) * c).sqrt();
                (dist * dist - c) / (dist + root)
            }
            RadiusVariant::PiecewiseLinearU => {
                let (a, b) = sys.upper_coeffs(lo);
                (dist - b) / (T::one() + a)
            }
        }
        .max(s1)
        .min(s2)
    } else {
        // Both slowed.
        match sys.variant() {
            RadiusVariant::Quadratic => {
                let k = sys.k_eps();
                let c1 = (T::one() - k) * sys.slow(lo) * sys.slow(lo);
                let c2 = (T::one() - k) * sys.slow(hi) * sys.slow(hi);
                let b = (dist * dist + c2 - c1) / (two * dist);
                ((b * b - c2) / k).max(zero).sqrt()
            }
            RadiusVariant::PiecewiseLinearU => {
                let (a, b1) = sys.upper_coeffs(lo);
                let (_, b2) = sys.upper_coeffs(hi);
                (dist - b1 - b2) / (two * a)
            }
        }
        .max(s2)
        .min(end)
    };
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(p: &[f64], alpha: f64, beta: f64) -> Constraint<f64> {
        Constraint::new(p.to_vec(), alpha, beta)
    }

    #[test]
    fn reach_values() {
        assert_eq!(reach(&[1.0, 2.0], &c(&[1.0, 2.0], 1.0, 0.0)), 0.0);
        assert_eq!(reach(&[1.0, 2.0], &c(&[1.0, 2.0], 2.0, 2.0)), -1.0);
        assert_eq!(reach(&[0.0, 0.0], &c(&[3.0, 0.0], 1.0, 4.0)), 5.0);
    }

    #[test]
    fn centers_of_small_bases() {
        let h = c(&[1.0, 2.0], 1.0, 0.0);
        let one = center_of_basis(&[&h]).unwrap().unwrap();
        assert_eq!((one.center, one.value), (vec![1.0, 2.0], 0.0));

        let a = c(&[0.0, 0.0], 1.0, 0.0);
        let b = c(&[2.0, 0.0], 1.0, 0.0);
        let two = center_of_basis(&[&a, &b]).unwrap().unwrap();
        assert!((two.center[0] - 1.0).abs() < 1e-15 && two.center[1].abs() < 1e-15);
        assert!((two.value - 1.0).abs() < 1e-15);

        let t = c(&[0.5, 3f64.sqrt() / 2.0], 1.0, 0.0);
        let tri = center_of_basis(&[&a, &c(&[1.0, 0.0], 1.0, 0.0), &t]).unwrap().unwrap();
        assert!((tri.value - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn center_rejects_duplicates_and_dependent_points() {
        let a = c(&[0.0, 0.0], 1.0, 0.0);
        let a2 = c(&[0.0, 0.0], 2.0, 1.0);
        assert_eq!(center_of_basis(&[&a, &a2]), Err(LpError::DuplicatePoints(0, 1)));
        let b = c(&[1.0, 0.0], 1.0, 0.0);
        let m = c(&[2.0, 0.0], 1.0, 0.0);
        assert_eq!(center_of_basis(&[&a, &b, &m]).unwrap(), None);
        // Obtuse triangle: circumcenter is outside the hull.
        let o = c(&[1.0, 0.1], 1.0, 0.0);
        assert_eq!(center_of_basis(&[&a, &m, &o]).unwrap(), None);
    }

    #[test]
    fn violation_of_triangle_basis() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]];
        let hs: Vec<Constraint<f64>> = pts.iter().map(|p| Constraint::point(p.to_vec())).collect();
        let sol = solve_m(&hs, 1).unwrap();
        assert!((sol.value - 1.0 / 3.0).abs() < 1e-12);
        for h in &hs {
            assert!(!violation_test(h, &sol.basis));
        }
        let far = c(&[10.0, 0.0], 1.0, 0.0);
        // reach = |(10,0) - (0.5, 0.2887)|^2 = 90.25 + 1/12.
        assert!((reach(&sol.center, &far) - (90.25 + 1.0 / 12.0)).abs() < 1e-9);
        assert!(violation_test(&far, &sol.basis));
        let inside = c(&sol.center, 1.0, 5.0);
        assert!(!violation_test(&inside, &sol.basis));
    }

    #[test]
    fn basis_computation_two_points() {
        let hs = vec![c(&[0.0, 0.0], 1.0, 0.0), c(&[2.0, 0.0], 1.0, 0.0)];
        let g = Basis::singleton(&hs, 0);
        assert!(violation_test(&hs[1], &g));
        let b = basis_computation(&hs, 1, &g).unwrap();
        assert_eq!(b.members, vec![0, 1]);
        assert!((b.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn solve_singleton_and_collinear() {
        let sol = solve_m(&[c(&[3.0, -1.0], 1.0, 0.0)], 0).unwrap();
        assert_eq!((sol.center, sol.value), (vec![3.0, -1.0], 0.0));
        let hs: Vec<_> = [0.0, 0.3, 1.7, 4.0, 2.2]
            .iter()
            .map(|&x| c(&[x, 2.0 * x], 1.0, 0.0))
            .collect();
        let sol = solve_m(&hs, 7).unwrap();
        // Spread along the line is 4 * sqrt(5).
        assert!((sol.value - 5.0 * 4.0).abs() < 1e-9);
    }

    #[test]
    fn solve_rejects_bad_input() {
        assert_eq!(solve_m::<f64>(&[], 0), Err(LpError::Empty));
        assert!(matches!(
            solve_m(&[c(&[0.0], 0.0, 0.0)], 0),
            Err(LpError::InvalidConstraint { .. })
        ));
        assert!(matches!(
            solve_m(&[c(&[0.0], 1.0, -1.0)], 0),
            Err(LpError::InvalidConstraint { .. })
        ));
        assert!(matches!(
            solve_m(&[c(&[0.0], 1.0, 0.0), c(&[0.0, 1.0], 1.0, 0.0)], 0),
            Err(LpError::InvalidConstraint { .. })
        ));
    }

    #[test]
    fn weighted_constraints() {
        // Two points at distance 2, one with a large beta: the center moves
        // toward the other point.
        let hs = vec![c(&[0.0, 0.0], 1.0, 0.0), c(&[2.0, 0.0], 1.0, 3.0)];
        let sol = solve_m(&hs, 0).unwrap();
        // z = (t, 0): t^2 = (2-t)^2 - 3  ->  t = 1/4, s = 1/16.
        assert!((sol.center[0] - 0.25).abs() < 1e-12);
        assert!((sol.value - 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, &mut |c| {
            seen.push(c.to_vec());
            false
        });
        assert_eq!(
            seen,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        let mut count = 0;
        for_each_combination(3, 0, &mut |c| {
            assert!(c.is_empty());
            count += 1;
            false
        });
        assert_eq!(count, 1);
    }

    #[test]
    fn single_precision_solve() {
        let hs: Vec<Constraint<f32>> = [[0.0f32, 0.0], [2.0, 0.0], [1.0, 0.5]]
            .iter()
            .map(|p| Constraint::point(p.to_vec()))
            .collect();
        let sol = solve_m(&hs, 3).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-5);
    }
}
