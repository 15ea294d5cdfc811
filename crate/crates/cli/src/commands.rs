use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;
use sparse_multicover::geometry::parse_table;
use sparse_multicover::greedy::seeded_first;
use sparse_multicover::lpsolver::solve_m;
use sparse_multicover::oracle::{self, InterleavingOptions};
use sparse_multicover::sparseballs::CoveringLemmaReport;
use sparse_multicover::{
    Bifiltration, Constraint, MetricKind, PersistentNet, PointSet, SparseBallSystem, TableFormat,
    WeightStaircase,
};

use crate::config::{BuildConfig, InputArgs};
use crate::Failure;

/// Largest input for which `verify` runs the brute-force equivalence suite.
pub const ORACLE_MAX_N: usize = 12;

/// Relative tolerance of the equivalence suite on scales.
const RSTAR_TOL: f64 = 1e-6;

/// Witnesses printed per suite.
const SHOWN: usize = 10;

struct Pipeline {
    net: PersistentNet,
    sys: SparseBallSystem,
}

fn prepare(cfg: &BuildConfig, ps: &PointSet) -> Result<Pipeline, Failure> {
    if ps.is_empty() {
        return Err(Failure::new(2, "input", "no points"));
    }
    let first = cfg.seed.map_or(0, |s| seeded_first(ps.len(), s));
    log::debug!("greedy order starts at point {first}");
    let net = PersistentNet::gonzalez(ps, first)
        .with_covering_sequences(cfg.eps)
        .map_err(|e| Failure::from_error("greedy", e))?;
    let sys = SparseBallSystem::new(&net, cfg.eps, cfg.radius)
        .map_err(|e| Failure::from_error("sparseballs", e))?;
    Ok(Pipeline { net, sys })
}

fn construct(cfg: &BuildConfig, ps: &PointSet, p: &Pipeline, chains: bool) -> Result<Bifiltration, Failure> {
    let start = Instant::now();
    let b = Bifiltration::from_system(ps, &p.net, &p.sys, &cfg.build_options(), chains)
        .map_err(|e| Failure::from_error("bifiltration", e))?;
    log::info!(
        "built {} elements and {} chains in {:.2?}",
        b.elements.len(),
        b.chains.len(),
        start.elapsed()
    );
    Ok(b)
}

fn out_err(e: io::Error) -> Failure {
    Failure::new(2, "output", e)
}

pub fn build(args: &InputArgs, output: Option<PathBuf>, poset_only: bool) -> Result<(), Failure> {
    let cfg = BuildConfig::from_args(args)?;
    let output = output.unwrap_or_else(|| cfg.input.with_extension("sb"));
    if output == cfg.input {
        return Err(Failure::new(1, "config", "output path equals the input path"));
    }
    let ps = cfg.load()?;
    let p = prepare(&cfg, &ps)?;
    let b = construct(&cfg, &ps, &p, !poset_only)?;
    b.write_file(&output).map_err(|e| Failure::from_error("output", e))?;
    log::info!("wrote {}", output.display());
    println!("{}", b.size_report());
    Ok(())
}

pub struct VerifyOptions {
    pub probes: usize,
    pub scales: usize,
    pub max_k: usize,
    pub report: Option<PathBuf>,
    pub corrupt_staircase: bool,
}

/// Every finite slowing and disappearance time, and the midpoints between
/// consecutive ones.
fn lemma_scales(ps: &PointSet, sys: &SparseBallSystem) -> Vec<f64> {
    let mut times: Vec<f64> = (0..ps.len())
        .flat_map(|x| [sys.slow(x), sys.dis(x)])
        .filter(|t| t.is_finite())
        .collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mids: Vec<f64> = times.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    times.extend(mids);
    times.sort_by(f64::total_cmp);
    times
}

fn corrupt(b: &mut Bifiltration) {
    let Some(e) = b.elements.first_mut() else { return };
    let mut points = e.staircase.breakpoints().to_vec();
    if let Some(last) = points.last_mut() {
        last.1 += 1;
    }
    e.staircase = WeightStaircase::from_breakpoints(points);
    log::warn!("corrupted the staircase of element 0");
}

pub fn verify(args: &InputArgs, opts: &VerifyOptions) -> Result<(), Failure> {
    let cfg = BuildConfig::from_args(args)?;
    let ps = cfg.load()?;
    let p = prepare(&cfg, &ps)?;
    let n = ps.len();
    let mut violations = 0;
    let mut witnesses: Vec<String> = Vec::new();

    let interleaving = if cfg.metric == MetricKind::Matrix {
        println!("interleaving: skipped (no coordinates in matrix mode)");
        None
    } else {
        let io = InterleavingOptions {
            probes: opts.probes,
            scales: opts.scales,
            max_k: opts.max_k,
            seed: cfg.seed.unwrap_or(0),
        };
        let start = Instant::now();
        let rep = oracle::check_interleaving(&p.sys, &p.net, &ps, &io)
            .map_err(|e| Failure::from_error("interleaving", e))?;
        log::info!("interleaving check took {:.2?}", start.elapsed());
        println!("interleaving: {} checks, {} violations", rep.checks, rep.violations.len());
        violations += rep.violations.len();
        witnesses.extend(rep.violations.iter().take(SHOWN).map(|w| {
            format!("interleaving inclusion {} at probe {:?}, r = {}, k = {}", w.inclusion, w.probe, w.r, w.k)
        }));
        Some(rep)
    };

    let scales = lemma_scales(&ps, &p.sys);
    let failed: Vec<CoveringLemmaReport> = scales
        .iter()
        .map(|&r| p.sys.check_covering_lemma(&p.net, &ps, r))
        .filter(|rep| !rep.passed())
        .collect();
    let lemma_violations: usize = failed.iter().map(CoveringLemmaReport::violations).sum();
    println!("covering lemma: {} scales, {} violations", scales.len(), lemma_violations);
    violations += lemma_violations;
    witnesses.extend(failed.iter().take(SHOWN).map(|rep| {
        format!(
            "covering lemma at r = {}: {} image, {} packing, {} distance violations",
            rep.scale,
            rep.image.len(),
            rep.packing.len(),
            rep.distance.len()
        )
    }));

    let equivalence = if n > ORACLE_MAX_N {
        println!("oracle equivalence: skipped (n = {n} > {ORACLE_MAX_N})");
        if opts.corrupt_staircase {
            log::warn!("--corrupt-staircase has no effect without the equivalence suite");
        }
        None
    } else {
        let mut b = construct(&cfg, &ps, &p, true)?;
        if opts.corrupt_staircase {
            corrupt(&mut b);
        }
        let be = oracle::brute_elements(&p.sys, &p.net, &ps).map_err(|e| Failure::from_error("oracle", e))?;
        let bc = oracle::brute_chains(&be, cfg.max_dim);
        let mut rep = oracle::compare((&b.elements, &b.chains), (&be, &bc), RSTAR_TOL);
        for i in b.invalid_grade_lists() {
            rep.mismatches.push(format!("chain {i}: grades are not an antichain"));
        }
        println!(
            "oracle equivalence: {} elements, {} chains, {} mismatches",
            rep.elements_compared,
            rep.chains_compared,
            rep.mismatches.len()
        );
        violations += rep.mismatches.len();
        witnesses.extend(rep.mismatches.iter().take(SHOWN).map(|m| format!("equivalence: {m}")));
        Some(rep)
    };

    if let Some(path) = &opts.report {
        let summary = json!({
            "passed": violations == 0,
            "n": n,
            "epsilon": cfg.eps,
            "metric": cfg.metric.to_string(),
            "radius": cfg.radius.to_string(),
            "violations": violations,
            "tolerances": { "rstar": RSTAR_TOL },
            "interleaving": interleaving,
            "covering_lemma": {
                "scales": scales.len(),
                "violations": lemma_violations,
                "failed": failed,
            },
            "equivalence": equivalence,
        });
        let text = serde_json::to_string_pretty(&summary).map_err(|e| Failure::new(2, "output", e))?;
        fs::write(path, text + "\n").map_err(out_err)?;
    }

    if violations > 0 {
        for w in &witnesses {
            eprintln!("violation: {w}");
        }
        return Err(Failure::new(4, "verify", format!("{violations} violations")));
    }
    Ok(())
}

pub fn stats(args: &InputArgs, scaling: Option<&[usize]>, times: Option<&Path>) -> Result<(), Failure> {
    let cfg = BuildConfig::from_args(args)?;
    let ps = cfg.load()?;
    let sizes = scaling.map_or_else(|| vec![ps.len()], <[usize]>::to_vec);
    if let Some(&bad) = sizes.iter().find(|&&m| m == 0 || m > ps.len()) {
        return Err(Failure::new(
            1,
            "config",
            format!("scaling size {bad} outside 1..={}", ps.len()),
        ));
    }

    if let Some(path) = times {
        let p = prepare(&cfg, &ps)?;
        let mut csv = String::from("point,rank,ins,slow,dis\n");
        for x in 0..ps.len() {
            csv += &format!("{x},{},{},{},{}\n", p.net.rank(x), p.net.ins(x), p.sys.slow(x), p.sys.dis(x));
        }
        fs::write(path, csv).map_err(out_err)?;
    }

    let stdout = io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "n,elements,chains,chains_per_point,grades_max,grades_mean,friends_max").map_err(out_err)?;
    for m in sizes {
        let prefix = ps.subset(&(0..m).collect::<Vec<_>>());
        let p = prepare(&cfg, &prefix)?;
        let r = construct(&cfg, &prefix, &p, true)?.size_report();
        writeln!(
            out,
            "{},{},{},{:.6},{},{:.6},{}",
            r.n,
            r.elements,
            r.chains,
            r.chains as f64 / r.n as f64,
            r.max_grades,
            r.mean_grades,
            r.max_friends
        )
        .map_err(out_err)?;
        out.flush().map_err(out_err)?;
    }
    Ok(())
}

pub fn miniball(input: &Path, header: bool, seed: u64) -> Result<(), Failure> {
    let text = fs::read_to_string(input).map_err(|e| Failure::new(2, "input", format!("{}: {e}", input.display())))?;
    let rows = parse_table(&text, TableFormat::Auto, header).map_err(|e| Failure::new(2, "input", e))?;
    let width = rows.first().map_or(0, Vec::len);
    if width < 3 {
        return Err(Failure::new(2, "input", "expected columns p1,..,pd,alpha,beta with d >= 1"));
    }
    let constraints: Vec<Constraint> = rows
        .into_iter()
        .map(|mut row| {
            let beta = row.pop().expect("checked width");
            let alpha = row.pop().expect("checked width");
            Constraint::new(row, alpha, beta)
        })
        .collect();
    let sol = solve_m(&constraints, seed).map_err(|e| Failure::from_error("lpsolver", e.into()))?;
    let join = |v: &[String]| v.join(",");
    println!("center={}", join(&sol.center.iter().map(f64::to_string).collect::<Vec<_>>()));
    println!("value={}", sol.value);
    println!("basis={}", join(&sol.basis.members.iter().map(usize::to_string).collect::<Vec<_>>()));
    Ok(())
}
