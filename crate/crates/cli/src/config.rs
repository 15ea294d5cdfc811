use std::path::PathBuf;

use clap::{Args, ValueEnum};
use sparse_multicover::geometry::LoadOptions;
use sparse_multicover::{BuildOptions, MetricKind, Norm, PointSet, RadiusVariant, TableFormat};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// Coordinate table, one point per line.
    Points,
    /// Square distance matrix.
    Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    L2,
    Linf,
    Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RadiusArg {
    Quadratic,
    #[value(name = "linearU", alias = "linearu")]
    LinearU,
}

/// Input and construction parameters shared by `build`, `verify` and `stats`.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Input file.
    #[arg(short, long)]
    pub input: PathBuf,

    #[arg(long, value_enum, default_value_t = Kind::Points)]
    pub kind: Kind,

    /// Distance; defaults to l2 for points and matrix for matrices.
    #[arg(long, value_enum)]
    pub metric: Option<MetricArg>,

    /// Approximation parameter in (0,1].
    #[arg(short, long, allow_negative_numbers = true)]
    pub epsilon: f64,

    /// Radius function; defaults to quadratic for l2, linearU otherwise.
    #[arg(long, value_enum)]
    pub radius: Option<RadiusArg>,

    /// Largest chain dimension; -1 for no limit.
    #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
    pub max_dim: i64,

    /// Seeds the first greedy point and the LP solver; without it the
    /// greedy order starts at point 0.
    #[arg(long, env = "SPARSE_MC_SEED")]
    pub seed: Option<u64>,

    /// Refuse inputs where a point has more intersecting friends.
    #[arg(long, default_value_t = 30)]
    pub max_friends: usize,

    /// Drop exact duplicate points instead of failing.
    #[arg(long)]
    pub dedup: bool,

    /// Skip the first line of the input.
    #[arg(long)]
    pub header: bool,
}

#[derive(Debug, Clone)]
pub struct BuildConfig {
    pub input: PathBuf,
    pub kind: Kind,
    pub metric: MetricKind,
    pub eps: f64,
    pub radius: RadiusVariant,
    pub max_dim: Option<usize>,
    pub seed: Option<u64>,
    pub max_friends: usize,
    pub dedup: bool,
    pub header: bool,
}

fn conflict(msg: impl std::fmt::Display) -> Failure {
    Failure::new(1, "config", msg)
}

impl BuildConfig {
    pub fn from_args(a: &InputArgs) -> Result<Self, Failure> {
        if !(a.epsilon > 0.0 && a.epsilon <= 1.0) {
            return Err(conflict("epsilon must be in (0,1]"));
        }
        let metric = match (a.kind, a.metric) {
            (Kind::Matrix, None | Some(MetricArg::Matrix)) => MetricKind::Matrix,
            (Kind::Matrix, Some(_)) => return Err(conflict("matrix input requires --metric matrix")),
            (Kind::Points, Some(MetricArg::Matrix)) => {
                return Err(conflict("--metric matrix requires --kind matrix"))
            }
            (Kind::Points, None | Some(MetricArg::L2)) => MetricKind::L2,
            (Kind::Points, Some(MetricArg::Linf)) => MetricKind::LInf,
        };
        let radius = match (metric, a.radius) {
            (MetricKind::L2, None | Some(RadiusArg::Quadratic)) => RadiusVariant::Quadratic,
            (MetricKind::L2, Some(RadiusArg::LinearU)) => {
                return Err(conflict("the linearU radius requires the linf or matrix metric"))
            }
            (_, None | Some(RadiusArg::LinearU)) => RadiusVariant::PiecewiseLinearU,
            (m, Some(RadiusArg::Quadratic)) => {
                return Err(conflict(format!("the quadratic radius requires the l2 metric, not {m}")))
            }
        };
        let max_dim = match a.max_dim {
            -1 => {
                log::warn!("unbounded chain dimension; the output can be very large");
                None
            }
            d if d >= 0 => Some(d as usize),
            d => return Err(conflict(format!("--max-dim must be -1 or nonnegative, got {d}"))),
        };
        if a.kind == Kind::Matrix && (a.dedup || a.header) {
            log::warn!("--dedup and --header are ignored for distance matrices");
        }
        Ok(BuildConfig {
            input: a.input.clone(),
            kind: a.kind,
            metric,
            eps: a.epsilon,
            radius,
            max_dim,
            seed: a.seed,
            max_friends: a.max_friends,
            dedup: a.dedup,
            header: a.header,
        })
    }

    pub fn build_options(&self) -> BuildOptions {
        BuildOptions {
            seed: self.seed.unwrap_or(0),
            max_dim: self.max_dim,
            max_friends: self.max_friends,
        }
    }

    pub fn load(&self) -> Result<PointSet, Failure> {
        let loaded = match self.kind {
            Kind::Points => {
                let norm = if self.metric == MetricKind::LInf { Norm::LInf } else { Norm::L2 };
                let opts = LoadOptions {
                    format: TableFormat::Auto,
                    header: self.header,
                    dedup: self.dedup,
                };
                PointSet::load_points(&self.input, norm, opts)
            }
            Kind::Matrix => PointSet::load_distance_matrix(&self.input),
        };
        let ps = loaded.map_err(|e| Failure::new(2, "input", e))?;
        log::info!("loaded {} points from {}", ps.len(), self.input.display());
        Ok(ps)
    }
}
