//! Input geometry: point clouds under l2 or l∞, or an explicit finite metric.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Real;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("input is empty")]
    Empty,
    #[error("line {line}: expected {expected} columns, found {found}")]
    Ragged {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: cannot parse {field:?} as a number")]
    Parse { line: usize, field: String },
    #[error("line {line}: non-finite value {value}")]
    NonFinite { line: usize, value: f64 },
    #[error("points {0} and {1} are duplicates")]
    DuplicatePoint(usize, usize),
    #[error("distance matrix is not square: {rows} rows, row {row} has {cols} columns")]
    NotSquare { rows: usize, row: usize, cols: usize },
    #[error("distance matrix is asymmetric at ({i}, {j}): {dij} vs {dji}")]
    Asymmetry { i: usize, j: usize, dij: f64, dji: f64 },
    #[error("negative distance {value} at ({i}, {j})")]
    Negative { i: usize, j: usize, value: f64 },
    #[error("nonzero diagonal entry {value} at ({i}, {i})")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("distinct points {i} and {j} are at distance zero")]
    ZeroDistance { i: usize, j: usize },
    #[error("triangle inequality fails: d({i},{k}) = {dik} > d({i},{j}) + d({j},{k}) = {sum}")]
    Triangle {
        i: usize,
        j: usize,
        k: usize,
        dik: f64,
        sum: f64,
    },
    #[error("expected a point of dimension {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("metric-mode point sets have no coordinates")]
    NoCoordinates,
}

type GResult<T> = std::result::Result<T, GeometryError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Norm {
    L2,
    LInf,
}

/// Which distance a point set carries. Printed in output headers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MetricKind {
    L2,
    LInf,
    Matrix,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::L2 => "l2",
            MetricKind::LInf => "linf",
            MetricKind::Matrix => "matrix",
        })
    }
}

/// Field delimiter of a coordinate table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableFormat {
    Csv,
    Whitespace,
    /// Per line: comma-separated if the line contains a comma, else whitespace.
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    pub format: TableFormat,
    /// Skip the first non-empty line.
    pub header: bool,
    /// Drop exact duplicate points (keeping the first) instead of failing.
    pub dedup: bool,
}

#[derive(Debug, Clone)]
enum Repr<T> {
    Euclidean {
        dim: usize,
        coords: Vec<T>,
        norm: Norm,
    },
    Matrix {
        dist: Vec<T>,
    },
}

/// A finite point set with a distance. Immutable once built.
#[derive(Debug, Clone)]
pub struct PointSet<T> {
    repr: Repr<T>,
    n: usize,
}

/// Query point for ball-membership tests.
#[derive(Debug, Clone, Copy)]
pub enum Probe<'a, T> {
    Coords(&'a [T]),
    Index(usize),
}

impl<T: Real> PointSet<T> {
    /// Builds a Euclidean point set, rejecting duplicates.
    pub fn from_rows(rows: Vec<Vec<T>>, norm: Norm) -> GResult<Self> {
        let (ps, _) = Self::build_rows(rows, norm, false)?;
        Ok(ps)
    }

    /// Builds a Euclidean point set, dropping exact duplicates. Returns the
    /// dropped `(kept, dropped)` input row pairs.
    pub fn from_rows_dedup(rows: Vec<Vec<T>>, norm: Norm) -> GResult<(Self, Vec<(usize, usize)>)> {
        Self::build_rows(rows, norm, true)
    }

    fn build_rows(
        rows: Vec<Vec<T>>,
        norm: Norm,
        dedup: bool,
    ) -> GResult<(Self, Vec<(usize, usize)>)> {
        let dim = rows.first().ok_or(GeometryError::Empty)?.len();
        if dim == 0 {
            return Err(GeometryError::Empty);
        }
        let mut seen: HashMap<Vec<u64>, usize> = HashMap::with_capacity(rows.len());
        let mut coords = Vec::with_capacity(rows.len() * dim);
        let mut dropped = Vec::new();
        let mut n = 0;
        for (line, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(GeometryError::Ragged {
                    line: line + 1,
                    expected: dim,
                    found: row.len(),
                });
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(GeometryError::NonFinite {
                    line: line + 1,
                    value: v.as_f64(),
                });
            }
            // +0.0 and -0.0 are the same point.
            let key: Vec<u64> = row.iter().map(|v| (v.as_f64() + 0.0).to_bits()).collect();
            if let Some(&first) = seen.get(&key) {
                if dedup {
                    dropped.push((first, line));
                    continue;
                }
                return Err(GeometryError::DuplicatePoint(first, line));
            }
            seen.insert(key, line);
            coords.extend(row);
            n += 1;
        }
        Ok((
            PointSet {
                repr: Repr::Euclidean { dim, coords, norm },
                n,
            },
            dropped,
        ))
    }

    /// Builds a metric-mode point set from a square distance matrix,
    /// validating symmetry, positivity and the triangle inequality.
    pub fn from_matrix(rows: Vec<Vec<T>>) -> GResult<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(GeometryError::Empty);
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(GeometryError::NotSquare {
                    rows: n,
                    row,
                    cols: r.len(),
                });
            }
            if let Some(v) = r.iter().find(|v| !v.is_finite()) {
                return Err(GeometryError::NonFinite {
                    line: row + 1,
                    value: v.as_f64(),
                });
            }
        }
        let tol = T::lit(1e-9);
        for i in 0..n {
            if rows[i][i] != T::zero() {
                return Err(GeometryError::NonzeroDiagonal {
                    i,
                    value: rows[i][i].as_f64(),
                });
            }
            for j in 0..n {
                let (dij, dji) = (rows[i][j], rows[j][i]);
                if dij < T::zero() {
                    return Err(GeometryError::Negative {
                        i,
                        j,
                        value: dij.as_f64(),
                    });
                }
                if (dij - dji).abs() > tol {
                    return Err(GeometryError::Asymmetry {
                        i,
                        j,
                        dij: dij.as_f64(),
                        dji: dji.as_f64(),
                    });
                }
                if i != j && dij == T::zero() {
                    return Err(GeometryError::ZeroDistance { i, j });
                }
            }
        }
        // Symmetrize so dist(i,j) == dist(j,i) bit-exactly.
        let mut dist = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = if i <= j { rows[i][j] } else { rows[j][i] };
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let dik = dist[i * n + k];
                    let sum = dist[i * n + j] + dist[j * n + k];
                    if dik - sum > tol * sum.max(T::one()) {
                        return Err(GeometryError::Triangle {
                            i,
                            j,
                            k,
                            dik: dik.as_f64(),
                            sum: sum.as_f64(),
                        });
                    }
                }
            }
        }
        Ok(PointSet {
            repr: Repr::Matrix { dist },
            n,
        })
    }

    pub fn load_points(path: impl AsRef<Path>, norm: Norm, opts: LoadOptions) -> GResult<Self> {
        let rows = read_table(path.as_ref(), opts.format, opts.header)?;
        let rows = to_scalar_rows(rows);
        if opts.dedup {
            let (ps, dropped) = Self::from_rows_dedup(rows, norm)?;
            for (kept, dup) in dropped {
                log::warn!("dropping row {dup}: duplicate of row {kept}");
            }
            Ok(ps)
        } else {
            Self::from_rows(rows, norm)
        }
    }

    pub fn load_distance_matrix(path: impl AsRef<Path>) -> GResult<Self> {
        let rows = read_table(path.as_ref(), TableFormat::Auto, false)?;
        Self::from_matrix(to_scalar_rows(rows))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Ambient dimension, `None` in metric mode.
    pub fn dim(&self) -> Option<usize> {
        match &self.repr {
            Repr::Euclidean { dim, .. } => Some(*dim),
            Repr::Matrix { .. } => None,
        }
    }

    pub fn metric_kind(&self) -> MetricKind {
        match &self.repr {
            Repr::Euclidean { norm: Norm::L2, .. } => MetricKind::L2,
            Repr::Euclidean {
                norm: Norm::LInf, ..
            } => MetricKind::LInf,
            Repr::Matrix { .. } => MetricKind::Matrix,
        }
    }

    /// Coordinates of point `i`, `None` in metric mode.
    #[inline]
    pub fn coords(&self, i: usize) -> Option<&[T]> {
        match &self.repr {
            Repr::Euclidean { dim, coords, .. } => Some(&coords[i * dim..(i + 1) * dim]),
            Repr::Matrix { .. } => None,
        }
    }

    /// Distance between points `i` and `j`. Panics on out-of-range indices.
    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> T {
        match &self.repr {
            Repr::Euclidean { dim, coords, norm } => {
                if i == j {
                    return T::zero();
                }
                // Order the operands so the result is symmetric bit-for-bit.
                let (a, b) = if i < j { (i, j) } else { (j, i) };
                norm_dist(
                    *norm,
                    &coords[a * dim..(a + 1) * dim],
                    &coords[b * dim..(b + 1) * dim],
                )
            }
            Repr::Matrix { dist } => dist[i * self.n + j],
        }
    }

    /// Distance from point `i` to a probe.
    pub fn dist_to(&self, i: usize, probe: Probe<'_, T>) -> GResult<T> {
        match probe {
            Probe::Index(j) => Ok(self.dist(i, j)),
            Probe::Coords(p) => match &self.repr {
                Repr::Euclidean { dim, coords, norm } => {
                    if p.len() != *dim {
                        return Err(GeometryError::DimensionMismatch {
                            expected: *dim,
                            found: p.len(),
                        });
                    }
                    Ok(norm_dist(*norm, &coords[i * dim..(i + 1) * dim], p))
                }
                Repr::Matrix { .. } => Err(GeometryError::NoCoordinates),
            },
        }
    }

    /// The sub-point-set on `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let n = indices.len();
        let repr = match &self.repr {
            Repr::Euclidean { dim, coords, norm } => Repr::Euclidean {
                dim: *dim,
                coords: indices
                    .iter()
                    .flat_map(|&i| coords[i * dim..(i + 1) * dim].iter().copied())
                    .collect(),
                norm: *norm,
            },
            Repr::Matrix { dist } => Repr::Matrix {
                dist: indices
                    .iter()
                    .flat_map(|&i| indices.iter().map(move |&j| dist[i * self.n + j]))
                    .collect(),
            },
        };
        PointSet { repr, n }
    }

    /// Same coordinates under a different norm. No-op in metric mode.
    pub fn with_norm(mut self, new_norm: Norm) -> Self {
        if let Repr::Euclidean { norm, .. } = &mut self.repr {
            *norm = new_norm;
        }
        self
    }

    /// Axis-aligned bounding box, `None` in metric mode.
    pub fn bounding_box(&self) -> Option<(Vec<T>, Vec<T>)> {
        let dim = self.dim()?;
        let mut lo = vec![T::infinity(); dim];
        let mut hi = vec![T::neg_infinity(); dim];
        for i in 0..self.n {
            for (k, &c) in self.coords(i)?.iter().enumerate() {
                lo[k] = lo[k].min(c);
                hi[k] = hi[k].max(c);
            }
        }
        Some((lo, hi))
    }
}

#[inline]
pub(crate) fn norm_dist<T: Real>(norm: Norm, a: &[T], b: &[T]) -> T {
    match norm {
        Norm::L2 => a
            .iter()
            .zip(b)
            .map(|(&x, &y)| (x - y) * (x - y))
            .fold(T::zero(), |s, v| s + v)
            .sqrt(),
        Norm::LInf => a
            .iter()
            .zip(b)
            .map(|(&x, &y)| (x - y).abs())
            .fold(T::zero(), T::max),
    }
}

fn to_scalar_rows<T: Real>(rows: Vec<Vec<f64>>) -> Vec<Vec<T>> {
    rows.into_iter()
        .map(|r| r.into_iter().map(|v| T::from_f64(v).unwrap_or(T::nan())).collect())
        .collect()
}

fn read_table(path: &Path, format: TableFormat, header: bool) -> GResult<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path).map_err(|source| GeometryError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_table(&text, format, header)
}

/// Parses a numeric table. Blank lines and `#` comments are skipped.
pub fn parse_table(text: &str, format: TableFormat, header: bool) -> GResult<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    let mut skipped_header = !header;
    let mut width = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !skipped_header {
            skipped_header = true;
            continue;
        }
        let comma = match format {
            TableFormat::Csv => true,
            TableFormat::Whitespace => false,
            TableFormat::Auto => line.contains(','),
        };
        let fields: Vec<&str> = if comma {
            line.split(',').map(str::trim).collect()
        } else {
            line.split_whitespace().collect()
        };
        let mut row = Vec::with_capacity(fields.len());
        for f in fields {
            let v: f64 = f.parse().map_err(|_| GeometryError::Parse {
                line: idx + 1,
                field: f.to_owned(),
            })?;
            if !v.is_finite() {
                return Err(GeometryError::NonFinite {
                    line: idx + 1,
                    value: v,
                });
            }
            row.push(v);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(GeometryError::Ragged {
                    line: idx + 1,
                    expected: w,
                    found: row.len(),
                })
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(GeometryError::Empty);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_points(text: &str) -> GResult<PointSet<f64>> {
        let rows = parse_table(text, TableFormat::Auto, false)?;
        PointSet::from_rows(rows, Norm::L2)
    }

    #[test]
    fn parses_csv_and_columns() {
        let ps = parse_points("0,0\n1,0\n0,1").unwrap();
        assert_eq!(ps.len(), 3);
        assert_eq!(ps.dim(), Some(2));
        let ps = parse_points("1\n5\n9").unwrap();
        assert_eq!((ps.len(), ps.dim()), (3, Some(1)));
        let ps = parse_points("1 2\n3\t4\n").unwrap();
        assert_eq!(ps.coords(1), Some(&[3.0, 4.0][..]));
    }

    #[test]
    fn header_is_skipped() {
        let rows = parse_table("x,y\n0,0\n1,1\n", TableFormat::Csv, true).unwrap();
        assert_eq!(rows.len(), 2);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(
            parse_points("0,0\n0,0"),
            Err(GeometryError::DuplicatePoint(0, 1))
        ));
        assert!(matches!(parse_points("0,0\n1"), Err(GeometryError::Ragged { .. })));
        assert!(matches!(parse_points("0,a"), Err(GeometryError::Parse { .. })));
        assert!(matches!(parse_points(""), Err(GeometryError::Empty)));
        assert!(matches!(parse_points("# only\n\n"), Err(GeometryError::Empty)));
        assert!(matches!(parse_points("0,inf"), Err(GeometryError::NonFinite { .. })));
    }

    #[test]
    fn signed_zero_is_a_duplicate() {
        assert!(matches!(
            parse_points("0,0\n-0,0"),
            Err(GeometryError::DuplicatePoint(0, 1))
        ));
    }

    #[test]
    fn dedup_drops_repeats() {
        let rows = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 0.0]];
        let (ps, dropped) = PointSet::from_rows_dedup(rows, Norm::L2).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(dropped, vec![(0, 2)]);
    }

    #[test]
    fn norms() {
        let ps = PointSet::from_rows(vec![vec![0.0, 0.0], vec![3.0, 4.0]], Norm::L2).unwrap();
        assert_eq!(ps.dist(0, 1), 5.0);
        assert_eq!(ps.dist(1, 1), 0.0);
        let ps = ps.with_norm(Norm::LInf);
        assert_eq!(ps.dist(0, 1), 4.0);
        assert_eq!(ps.dist_to(0, Probe::Coords(&[3.0, 4.0])).unwrap(), 4.0);
        assert!(matches!(
            ps.dist_to(0, Probe::Coords(&[1.0])),
            Err(GeometryError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn distance_matrix_validation() {
        let path = vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ];
        let ps = PointSet::from_matrix(path).unwrap();
        assert_eq!(ps.len(), 3);
        assert_eq!(ps.dist(0, 2), 2.0);
        assert_eq!(ps.metric_kind(), MetricKind::Matrix);

        let asym = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        assert!(matches!(
            PointSet::from_matrix(asym),
            Err(GeometryError::Asymmetry { .. })
        ));
        let tri = vec![
            vec![0.0, 1.0, 10.0],
            vec![1.0, 0.0, 1.0],
            vec![10.0, 1.0, 0.0],
        ];
        assert!(matches!(
            PointSet::from_matrix(tri),
            Err(GeometryError::Triangle { .. })
        ));
        let zero = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        assert!(matches!(
            PointSet::from_matrix(zero),
            Err(GeometryError::ZeroDistance { .. })
        ));
        let neg = vec![vec![0.0, -1.0], vec![-1.0, 0.0]];
        assert!(matches!(
            PointSet::from_matrix(neg),
            Err(GeometryError::Negative { .. })
        ));
        let ragged = vec![vec![0.0, 1.0], vec![1.0]];
        assert!(matches!(
            PointSet::from_matrix(ragged),
            Err(GeometryError::NotSquare { .. })
        ));
    }

    #[test]
    fn subset_keeps_distances() {
        let ps = parse_points("0\n1\n3\n7").unwrap();
        let sub = ps.subset(&[3, 1]);
        assert_eq!(sub.dist(0, 1), 6.0);
        let m = PointSet::from_matrix(vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(m.subset(&[2, 0]).dist(0, 1), 2.0);
    }
}
