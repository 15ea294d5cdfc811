//! Text format `sparse-bifiltration v1`.
//!
//! ```text
//! # sparse-bifiltration v1
//! # epsilon=<decimal> metric=<l2|linf|matrix> radius=<quadratic|linearU> n=<int> seed=<int>
//! element <id> vertices=<i1,i2,...> rstar=<decimal> rend=<decimal|inf> stair=<r1:k1;r2:k2;...>
//! simplex dim=<m> chain=<id0<id1<...<idm> grades=<r1:k1;r2:k2;...>
//! ```
//!
//! Decimals use 17 significant digits in C `%.17g` style, so doubles
//! round-trip exactly.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use super::{Bifiltration, ChainSimplex, Grade, Meta, PosetElement};
use crate::geometry::MetricKind;
use crate::sparseballs::{RadiusVariant, WeightStaircase};
use crate::{Error, Real, Result};

pub const FORMAT_HEADER: &str = "# sparse-bifiltration v1";

/// `%.17g`.
pub(crate) fn fmt_g17(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let m = trim_zeros(mantissa.to_owned());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}

fn fmt_stair<T: Real>(points: impl Iterator<Item = (T, usize)>) -> String {
    let mut out = String::new();
    for (i, (r, k)) in points.enumerate() {
        if i > 0 {
            out.push(';');
        }
        let _ = write!(out, "{}:{}", fmt_g17(r.as_f64()), k);
    }
    out
}

fn join<I: IntoIterator<Item = usize>>(items: I, sep: char) -> String {
    let mut out = String::new();
    for (i, v) in items.into_iter().enumerate() {
        if i > 0 {
            out.push(sep);
        }
        let _ = write!(out, "{v}");
    }
    out
}

/// Writes `b` in canonical order. Elements come first, then simplices
/// (empty for poset-only builds).
pub fn write_bifiltration<T: Real, W: Write>(b: &Bifiltration<T>, mut w: W) -> std::io::Result<()> {
    let m = &b.meta;
    writeln!(w, "{FORMAT_HEADER}")?;
    writeln!(
        w,
        "# epsilon={} metric={} radius={} n={} seed={}",
        fmt_g17(m.eps),
        m.metric,
        m.radius,
        m.n,
        m.seed
    )?;
    for e in &b.elements {
        writeln!(
            w,
            "element {} vertices={} rstar={} rend={} stair={}",
            e.id,
            join(e.vertices.iter().copied(), ','),
            fmt_g17(e.r_star.as_f64()),
            fmt_g17(e.r_end.as_f64()),
            fmt_stair(e.staircase.breakpoints().iter().copied())
        )?;
    }
    for c in &b.chains {
        writeln!(
            w,
            "simplex dim={} chain={} grades={}",
            c.dim(),
            join(c.elements.iter().copied(), '<'),
            fmt_stair(c.grades.iter().map(|g| (g.r, g.k)))
        )?;
    }
    w.flush()
}

impl<T: Real> Bifiltration<T> {
    /// Writes the file through a buffered writer.
    pub fn write_file(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        write_bifiltration(self, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        write_bifiltration(self, &mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 output")
    }
}

fn format_err(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        line,
        message: message.into(),
    }
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    match s {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s
            .parse()
            .map_err(|_| format_err(line, format!("bad decimal {s:?}"))),
    }
}

fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.parse()
        .map_err(|_| format_err(line, format!("bad integer {s:?}")))
}

fn parse_stair(s: &str, line: usize) -> Result<Vec<(f64, usize)>> {
    s.split(';')
        .map(|pair| {
            let (r, k) = pair
                .split_once(':')
                .ok_or_else(|| format_err(line, format!("bad breakpoint {pair:?}")))?;
            Ok((parse_f64(r, line)?, parse_usize(k, line)?))
        })
        .collect()
}

/// Splits `key=value` fields, checking the expected keys in order.
fn fields<'a>(rest: &'a str, keys: &[&str], line: usize) -> Result<Vec<&'a str>> {
    let parts: Vec<&str> = rest.split_whitespace().collect();
    if parts.len() != keys.len() {
        return Err(format_err(line, format!("expected fields {keys:?}")));
    }
    parts
        .iter()
        .zip(keys)
        .map(|(p, k)| {
            p.strip_prefix(k)
                .and_then(|v| v.strip_prefix('='))
                .ok_or_else(|| format_err(line, format!("expected field {k:?}, got {p:?}")))
        })
        .collect()
}

/// Parses a file written by [`write_bifiltration`].
pub fn read_bifiltration<R: BufRead>(r: R) -> Result<Bifiltration<f64>> {
    let mut lines = r.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((i, Ok(l))) => Ok((i, l)),
            Some((i, Err(e))) => Err(format_err(i, e.to_string())),
            None => Err(format_err(0, format!("missing {what}"))),
        }
    };
    let (_, first) = next("header")?;
    if first != FORMAT_HEADER {
        return Err(format_err(1, "not a sparse-bifiltration v1 file"));
    }
    let (ln, meta_line) = next("metadata")?;
    let meta_rest = meta_line
        .strip_prefix("# ")
        .ok_or_else(|| format_err(ln, "metadata line must start with '# '"))?;
    let f = fields(meta_rest, &["epsilon", "metric", "radius", "n", "seed"], ln)?;
    let meta = Meta {
        eps: parse_f64(f[0], ln)?,
        metric: match f[1] {
            "l2" => MetricKind::L2,
            "linf" => MetricKind::LInf,
            "matrix" => MetricKind::Matrix,
            m => return Err(format_err(ln, format!("unknown metric {m:?}"))),
        },
        radius: match f[2] {
            "quadratic" => RadiusVariant::Quadratic,
            "linearU" => RadiusVariant::PiecewiseLinearU,
            v => return Err(format_err(ln, format!("unknown radius {v:?}"))),
        },
        n: parse_usize(f[3], ln)?,
        seed: f[4]
            .parse()
            .map_err(|_| format_err(ln, format!("bad seed {:?}", f[4])))?,
    };

    let mut elements = Vec::new();
    let mut chains = Vec::new();
    loop {
        let (ln, line) = match next("") {
            Ok(v) => v,
            Err(Error::Format { line: 0, .. }) => break,
            Err(e) => return Err(e),
        };
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("element ") {
            let (id, rest) = rest
                .split_once(' ')
                .ok_or_else(|| format_err(ln, "truncated element line"))?;
            let id = parse_usize(id, ln)?;
            if id != elements.len() {
                return Err(format_err(ln, format!("element id {id} out of sequence")));
            }
            let f = fields(rest, &["vertices", "rstar", "rend", "stair"], ln)?;
            let vertices = f[0]
                .split(',')
                .map(|v| parse_usize(v, ln))
                .collect::<Result<Vec<_>>>()?;
            elements.push(PosetElement {
                id,
                vertices,
                r_star: parse_f64(f[1], ln)?,
                r_end: parse_f64(f[2], ln)?,
                staircase: WeightStaircase::from_breakpoints(parse_stair(f[3], ln)?),
            });
        } else if let Some(rest) = line.strip_prefix("simplex ") {
            let f = fields(rest, &["dim", "chain", "grades"], ln)?;
            let dim = parse_usize(f[0], ln)?;
            let ids = f[1]
                .split('<')
                .map(|v| parse_usize(v, ln))
                .collect::<Result<Vec<_>>>()?;
            if ids.len() != dim + 1 {
                return Err(format_err(ln, "chain length does not match dim"));
            }
            if let Some(&bad) = ids.iter().find(|&&i| i >= elements.len()) {
                return Err(format_err(ln, format!("unknown element {bad}")));
            }
            let grades = parse_stair(f[2], ln)?
                .into_iter()
                .map(|(r, k)| Grade { r, k })
                .collect();
            chains.push(ChainSimplex {
                elements: ids,
                grades,
            });
        } else if !line.starts_with('#') {
            return Err(format_err(ln, format!("unrecognized line {line:?}")));
        }
    }
    Ok(Bifiltration {
        meta,
        elements,
        chains,
        max_friends: 0,
    })
}
