//! Sparse balls: radius functions, slowing and disappearance times, the
//! covering map and covering-weight staircases.
//!
//! A sparse ball around `x` has radius `r` up to its slowing time
//! `slow(x) = (1+eps)/eps * ins(x)`, then grows slowly (between the envelopes
//! `L_x` and `U_x`) until it disappears after `dis(x) = (1+3eps) slow(x)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{GeometryError, PointSet, Probe};
use crate::greedy::PersistentNet;
use crate::{Error, Real, Result};

pub(crate) fn check_eps<T: Real>(eps: T) -> Result<()> {
    if eps > T::zero() && eps <= T::one() {
        Ok(())
    } else {
        Err(Error::Config("epsilon must be in (0,1]".into()))
    }
}

/// `(1+eps)/eps * ins`; infinite for the first point of the greedy order.
#[inline]
pub fn slowing_time<T: Real>(ins: T, eps: T) -> T {
    (T::one() + eps) / eps * ins
}

#[inline]
pub fn disappearance_time<T: Real>(slow: T, eps: T) -> T {
    (T::one() + T::lit(3.0) * eps) * slow
}

/// Radius function used between the slowing and disappearance times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RadiusVariant {
    /// `sqrt(K r^2 + (1-K) slow^2)` with `K = 1/(3(1+eps)^2)`; its square is
    /// linear in `r^2`, which makes first intersections an instance of (M).
    Quadratic,
    /// The upper envelope `U_x(r)` itself; piecewise linear.
    PiecewiseLinearU,
}

impl fmt::Display for RadiusVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RadiusVariant::Quadratic => "quadratic",
            RadiusVariant::PiecewiseLinearU => "linearU",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SparseBallSystem<T> {
    eps: T,
    variant: RadiusVariant,
    slow: Vec<T>,
    dis: Vec<T>,
    k_eps: T,
}

impl<T: Real> SparseBallSystem<T> {
    pub fn new(net: &PersistentNet<T>, eps: T, variant: RadiusVariant) -> Result<Self> {
        check_eps(eps)?;
        let slow: Vec<T> = net.insertion_radii().iter().map(|&i| slowing_time(i, eps)).collect();
        let dis = slow.iter().map(|&s| disappearance_time(s, eps)).collect();
        let one = T::one();
        let k_eps = one / (T::lit(3.0) * (one + eps) * (one + eps));
        Ok(SparseBallSystem {
            eps,
            variant,
            slow,
            dis,
            k_eps,
        })
    }

    #[inline]
    pub fn eps(&self) -> T {
        self.eps
    }

    #[inline]
    pub fn variant(&self) -> RadiusVariant {
        self.variant
    }

    pub fn len(&self) -> usize {
        self.slow.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slow.is_empty()
    }

    #[inline]
    pub fn slow(&self, x: usize) -> T {
        self.slow[x]
    }

    #[inline]
    pub fn dis(&self, x: usize) -> T {
        self.dis[x]
    }

    /// `K = 1/(3(1+eps)^2)` of the quadratic radius.
    #[inline]
    pub fn k_eps(&self) -> T {
        self.k_eps
    }

    /// Slope and intercept of `U_x(r) = a r + b`.
    #[inline]
    pub(crate) fn upper_coeffs(&self, x: usize) -> (T, T) {
        let three = T::lit(3.0);
        let denom = three * (T::one() + self.eps);
        (T::one() / denom, (T::lit(2.0) + three * self.eps) / denom * self.slow[x])
    }

    pub fn lower_envelope(&self, x: usize, r: T) -> T {
        let e = self.eps;
        r / (T::one() + T::lit(3.0) * e) + e / (T::one() + e) * self.slow[x]
    }

    pub fn upper_envelope(&self, x: usize, r: T) -> T {
        let (a, b) = self.upper_coeffs(x);
        a * r + b
    }

    /// Radius of the sparse ball of `x` at scale `r`, `None` once it has
    /// disappeared (`r > dis(x)`).
    #[inline]
    pub fn radius(&self, x: usize, r: T) -> Option<T> {
        if r > self.dis[x] {
            return None;
        }
        let s = self.slow[x];
        if r <= s {
            return Some(r);
        }
        Some(match self.variant {
            RadiusVariant::Quadratic => {
                let k = self.k_eps;
                (k * r * r + (T::one() - k) * s * s).sqrt()
            }
            RadiusVariant::PiecewiseLinearU => self.upper_envelope(x, r),
        })
    }

    /// Whether `p` lies in the (closed) sparse ball of `x` at scale `r`.
    pub fn in_sparse_ball(
        &self,
        ps: &PointSet<T>,
        x: usize,
        p: Probe<'_, T>,
        r: T,
    ) -> std::result::Result<bool, GeometryError> {
        let d = ps.dist_to(x, p)?;
        Ok(self.radius(x, r).is_some_and(|rho| d <= rho))
    }

    /// `C_r`: each point goes to the first entry of its covering sequence
    /// whose sparse ball is non-empty at scale `r`.
    pub fn covering_map_at(&self, net: &PersistentNet<T>, r: T) -> Vec<usize> {
        (0..self.len())
            .map(|x| {
                *net.covering_seq(x)
                    .iter()
                    .find(|&&y| r <= self.dis[y])
                    .expect("covering sequence ends at the point with infinite slowing time")
            })
            .collect()
    }

    /// Covering weights `c_r(x) = |C_r^{-1}(x)|` for all points.
    pub fn covering_weights_at(&self, net: &PersistentNet<T>, r: T) -> Vec<usize> {
        let mut w = vec![0; self.len()];
        for y in self.covering_map_at(net, r) {
            w[y] += 1;
        }
        w
    }

    /// Switch events of every point's covering weight.
    pub fn covering_weights(&self, net: &PersistentNet<T>) -> CoveringWeights<T> {
        let mut events: Vec<Vec<T>> = vec![Vec::new(); self.len()];
        for y in 0..self.len() {
            for pair in net.covering_seq(y).windows(2) {
                events[pair[1]].push(self.dis[pair[0]]);
            }
        }
        for e in &mut events {
            e.sort_by(|a, b| a.partial_cmp(b).expect("finite event scales"));
        }
        CoveringWeights { events }
    }

    /// Step function `r -> c_r(x)` on `[0, dis(x)]`.
    pub fn weight_staircase(&self, net: &PersistentNet<T>, x: usize) -> WeightStaircase<T> {
        let mut events = Vec::new();
        for y in 0..self.len() {
            let seq = net.covering_seq(y);
            if let Some(i) = seq.iter().position(|&s| s == x) {
                if i > 0 {
                    events.push(self.dis[seq[i - 1]]);
                }
            }
        }
        events.sort_by(|a, b| a.partial_cmp(b).expect("finite event scales"));
        WeightStaircase::from_events(T::zero(), 1, &events)
    }

    /// Checks the three covering-map properties at scale `r`: the image is
    /// the set of alive balls, it is `eps/((1+eps)(1+3eps)) r`-packed, and
    /// `|x - C_r(x)| <= eps/(1+eps) min(r, slow(C_r(x)))`.
    ///
    /// Comparisons allow a relative slack of a few ulps.
    pub fn check_covering_lemma(
        &self,
        net: &PersistentNet<T>,
        ps: &PointSet<T>,
        r: T,
    ) -> CoveringLemmaReport {
        let e = self.eps;
        let one = T::one();
        let three = T::lit(3.0);
        let slack = |a: T, b: T| T::round_off() * a.abs().max(b.abs());
        let map = self.covering_map_at(net, r);
        let mut report = CoveringLemmaReport {
            scale: r.as_f64(),
            ..Default::default()
        };

        let mut in_image = vec![false; self.len()];
        for &y in &map {
            in_image[y] = true;
        }
        for x in 0..self.len() {
            let alive = r <= self.dis[x];
            if alive != in_image[x] {
                report.image.push(LemmaWitness {
                    points: vec![x],
                    lhs: if in_image[x] { 1.0 } else { 0.0 },
                    rhs: if alive { 1.0 } else { 0.0 },
                });
            }
        }

        let packing = e / ((one + e) * (one + three * e)) * r;
        let image: Vec<usize> = (0..self.len()).filter(|&x| in_image[x]).collect();
        for (i, &a) in image.iter().enumerate() {
            for &b in &image[i + 1..] {
                let d = ps.dist(a, b);
                if d + slack(d, packing) < packing {
                    report.packing.push(LemmaWitness {
                        points: vec![a, b],
                        lhs: d.as_f64(),
                        rhs: packing.as_f64(),
                    });
                }
            }
        }

        for (x, &y) in map.iter().enumerate() {
            let d = ps.dist(x, y);
            let bound = e / (one + e) * r.min(self.slow[y]);
            if d > bound + slack(d, bound) {
                report.distance.push(LemmaWitness {
                    points: vec![x, y],
                    lhs: d.as_f64(),
                    rhs: bound.as_f64(),
                });
            }
        }
        report
    }
}

/// Per-point covering-weight switch scales: `events[x]` lists (sorted, with
/// multiplicity) the scales `dis(z)` after which some point moves onto `x`.
#[derive(Debug, Clone)]
pub struct CoveringWeights<T> {
    events: Vec<Vec<T>>,
}

impl<T: Real> CoveringWeights<T> {
    pub fn events(&self, x: usize) -> &[T] {
        &self.events[x]
    }

    /// `c_r(x)` for `r <= dis(x)`, taking switch scales as reached.
    pub fn weight_at(&self, x: usize, r: T) -> usize {
        1 + self.events[x].partition_point(|&g| g <= r)
    }

    pub fn staircase(&self, x: usize) -> WeightStaircase<T> {
        WeightStaircase::from_events(T::zero(), 1, &self.events[x])
    }
}

/// Non-decreasing integer step function given by its change points. The
/// value on `[r_i, r_{i+1})` is `value_i`; below the first breakpoint it
/// is 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightStaircase<T> {
    breakpoints: Vec<(T, usize)>,
}

impl<T: Real> WeightStaircase<T> {
    /// Staircase starting at `(start, initial)` and incrementing by one at
    /// each (sorted) event scale; equal scales are merged.
    pub fn from_events(start: T, initial: usize, events: &[T]) -> Self {
        let mut breakpoints = vec![(start, initial)];
        let mut value = initial;
        for &g in events {
            value += 1;
            match breakpoints.last_mut() {
                Some(last) if last.0 == g => last.1 = value,
                _ => breakpoints.push((g, value)),
            }
        }
        WeightStaircase { breakpoints }
    }

    /// Builds from raw breakpoints, merging equal scales (larger value wins)
    /// and dropping points that do not increase the value.
    pub fn from_breakpoints(points: impl IntoIterator<Item = (T, usize)>) -> Self {
        let mut breakpoints: Vec<(T, usize)> = Vec::new();
        for (r, v) in points {
            match breakpoints.last_mut() {
                Some(last) if last.0 == r => last.1 = last.1.max(v),
                Some(last) if last.1 >= v => {}
                _ => breakpoints.push((r, v)),
            }
        }
        // A merge can leave an earlier point dominated.
        breakpoints.dedup_by(|b, a| b.1 <= a.1);
        WeightStaircase { breakpoints }
    }

    pub fn breakpoints(&self) -> &[(T, usize)] {
        &self.breakpoints
    }

    pub fn start(&self) -> T {
        self.breakpoints[0].0
    }

    /// Value of the last breakpoint at or below `r`, 0 before the first.
    pub fn value_at(&self, r: T) -> usize {
        let k = self.breakpoints.partition_point(|&(b, _)| b <= r);
        if k == 0 {
            0
        } else {
            self.breakpoints[k - 1].1
        }
    }

    pub fn final_value(&self) -> usize {
        self.breakpoints.last().map_or(0, |b| b.1)
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct LemmaWitness {
    pub points: Vec<usize>,
    pub lhs: f64,
    pub rhs: f64,
}

/// Violations of the covering-map properties at one scale.
#[derive(Debug, Clone, Default, Serialize)]
pub struct CoveringLemmaReport {
    pub scale: f64,
    pub image: Vec<LemmaWitness>,
    pub packing: Vec<LemmaWitness>,
    pub distance: Vec<LemmaWitness>,
}

impl CoveringLemmaReport {
    pub fn passed(&self) -> bool {
        self.image.is_empty() && self.packing.is_empty() && self.distance.is_empty()
    }

    pub fn violations(&self) -> usize {
        self.image.len() + self.packing.len() + self.distance.len()
    }
}
