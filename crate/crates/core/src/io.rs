//! Text serialization of assembled matrices.
//!
//! CSV: a `# helmbem-matrix` header line carrying the assembly parameters,
//! then one `i,j,re,im` row per entry in row-major order, with 17
//! significant digits so that reading back is exact. JSON: the serde form
//! of [`OperatorMatrix`].

use std::fmt::Write as _;

use crate::assembly::{Method, Operator, OperatorMatrix};
use crate::error::{Error, Result};
use crate::specfun::HankelKind;
use crate::Complex;

const MAGIC: &str = "# helmbem-matrix";

pub fn to_csv(m: &OperatorMatrix) -> String {
    let mut out = String::with_capacity(64 * m.entries.len() + 128);
    let _ = writeln!(
        out,
        "{MAGIC} op={} method={} k={:?} kind={} nq={} n={}",
        m.op,
        m.method,
        m.k,
        m.kind.index(),
        m.nq,
        m.n
    );
    for i in 0..m.n {
        for j in 0..m.n {
            let z = m.get(i, j);
            let _ = writeln!(out, "{i},{j},{:.16e},{:.16e}", z.re, z.im);
        }
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn from_csv(text: &str) -> Result<OperatorMatrix> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let rest = header
        .strip_prefix(MAGIC)
        .ok_or_else(|| parse_err(1, "missing matrix header"))?;
    let mut op = None;
    let mut method = None;
    let mut k = None;
    let mut kind = None;
    let mut nq = None;
    let mut n = None;
    for field in rest.split_whitespace() {
        let (key, val) = field
            .split_once('=')
            .ok_or_else(|| parse_err(1, format!("malformed header field {field:?}")))?;
        let bad = |e: &dyn std::fmt::Display| parse_err(1, format!("{key}: {e}"));
        match key {
            "op" => op = Some(val.parse::<Operator>().map_err(|e| bad(&e))?),
            "method" => method = Some(val.parse::<Method>().map_err(|e| bad(&e))?),
            "k" => k = Some(val.parse::<f64>().map_err(|e| bad(&e))?),
            "kind" => {
                let i = val.parse::<u8>().map_err(|e| bad(&e))?;
                kind = Some(HankelKind::from_index(i).map_err(|e| bad(&e))?);
            }
            "nq" => nq = Some(val.parse::<usize>().map_err(|e| bad(&e))?),
            "n" => n = Some(val.parse::<usize>().map_err(|e| bad(&e))?),
            _ => return Err(parse_err(1, format!("unknown header field {key:?}"))),
        }
    }
    let missing = |name: &str| parse_err(1, format!("header lacks {name}"));
    let n = n.ok_or_else(|| missing("n"))?;
    let mut entries = vec![Complex::new(0.0, 0.0); n * n];
    let mut seen = vec![false; n * n];
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 {
            return Err(parse_err(lineno, format!("expected 4 fields, got {}", parts.len())));
        }
        let idx = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|e| parse_err(lineno, format!("index {s:?}: {e}")))
        };
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| parse_err(lineno, format!("value {s:?}: {e}")))
        };
        let (i, j) = (idx(parts[0])?, idx(parts[1])?);
        if i >= n || j >= n {
            return Err(parse_err(lineno, format!("entry ({i}, {j}) outside {n} x {n}")));
        }
        if seen[i * n + j] {
            return Err(parse_err(lineno, format!("duplicate entry ({i}, {j})")));
        }
        seen[i * n + j] = true;
        entries[i * n + j] = Complex::new(num(parts[2])?, num(parts[3])?);
    }
    if let Some(p) = seen.iter().position(|s| !s) {
        return Err(parse_err(0, format!("missing entry ({}, {})", p / n, p % n)));
    }
    Ok(OperatorMatrix {
        op: op.ok_or_else(|| missing("op"))?,
        method: method.ok_or_else(|| missing("method"))?,
        k: k.ok_or_else(|| missing("k"))?,
        kind: kind.ok_or_else(|| missing("kind"))?,
        nq: nq.ok_or_else(|| missing("nq"))?,
        n,
        entries,
    })
}

pub fn to_json(m: &OperatorMatrix) -> Result<String> {
    serde_json::to_string_pretty(m).map_err(|e| Error::Format(e.to_string()))
}

pub fn from_json(text: &str) -> Result<OperatorMatrix> {
    let m: OperatorMatrix = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    if m.entries.len() != m.n * m.n {
        return Err(Error::Format(format!(
            "{} entries for a {} x {} matrix",
            m.entries.len(),
            m.n,
            m.n
        )));
    }
    Ok(m)
}
