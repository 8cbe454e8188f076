//! Text formats: coin specs, state snapshots, distributions, compiled
//! programs and schedules, lattice snapshots, protocol traces and SVG charts.
//!
//! Complex numbers are written as `[re, im]` pairs and matrices as row-major
//! arrays of rows. All indices are 1-based, except lattice site coordinates
//! which start at 0.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coin::{CoinError, CoinFamily, CoinSpec};
use crate::csd::{CsdProgram, FactorKind, PulseSchedule, Rotation, Stage};
use crate::lattice::{LatticeState, PairProtocolTrace};
use crate::linalg::{CMatrix, C2, C64};
use crate::state::{NodeDistribution, StateSpace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("JSON error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown coin family {0:?}")]
    UnknownCoin(String),
    #[error("override key {0:?} is not a node index")]
    BadNodeKey(String),
    #[error("malformed matrix: {0}")]
    BadMatrix(String),
    #[error("{0}")]
    Coin(#[from] CoinError),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

type Pair = [f64; 2];

fn pair(c: C64) -> Pair {
    [c.re, c.im]
}

fn complex(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

fn matrix_rows(m: &CMatrix) -> Vec<Vec<Pair>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| pair(m[(r, c)])).collect())
        .collect()
}

fn matrix_from_rows(rows: &[Vec<Pair>]) -> Result<CMatrix, FormatError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(FormatError::BadMatrix(format!(
            "expected a non-empty square matrix, got {} rows",
            n
        )));
    }
    Ok(CMatrix::from_fn(n, n, |r, c| complex(rows[r][c])))
}

fn c2_rows(u: &C2) -> [[Pair; 2]; 2] {
    [
        [pair(u[(0, 0)]), pair(u[(0, 1)])],
        [pair(u[(1, 0)]), pair(u[(1, 1)])],
    ]
}

fn c2_from_rows(r: &[[Pair; 2]; 2]) -> C2 {
    C2::new(
        complex(r[0][0]),
        complex(r[0][1]),
        complex(r[1][0]),
        complex(r[1][1]),
    )
}

// ---------------------------------------------------------------- coin spec

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoinSpecFile {
    #[serde(default = "default_family")]
    default: String,
    #[serde(default)]
    overrides: BTreeMap<String, String>,
    #[serde(default)]
    custom: BTreeMap<String, Vec<Vec<Pair>>>,
}

fn default_family() -> String {
    "grover".into()
}

/// Parses `{"default": name, "overrides": {"3": name}, "custom": {name: matrix}}`.
/// A name is `hadamard`, `grover`, `dft` or a key of `custom`.
pub fn parse_coin_spec(text: &str) -> Result<CoinSpec, FormatError> {
    let file: CoinSpecFile = serde_json::from_str(text)?;
    let mut custom = BTreeMap::new();
    for (name, rows) in &file.custom {
        custom.insert(name.as_str(), CoinFamily::custom(matrix_from_rows(rows)?)?);
    }
    let resolve = |name: &str| -> Result<CoinFamily, FormatError> {
        if let Some(c) = custom.get(name) {
            return Ok(c.clone());
        }
        CoinFamily::from_name(name).ok_or_else(|| FormatError::UnknownCoin(name.to_string()))
    };
    let mut spec = CoinSpec::uniform(resolve(&file.default)?);
    for (key, name) in &file.overrides {
        let node: usize = key
            .parse()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| FormatError::BadNodeKey(key.clone()))?;
        spec.overrides.insert(node, resolve(name)?);
    }
    Ok(spec)
}

// ------------------------------------------------------------------ states

#[derive(Debug, Serialize, Deserialize)]
struct StateFile {
    n: usize,
    amplitudes: Vec<Vec<Pair>>,
}

pub fn state_to_json(s: &StateSpace) -> String {
    let file = StateFile {
        n: s.dim(),
        amplitudes: matrix_rows(s.matrix()),
    };
    serde_json::to_string_pretty(&file).expect("state serializes")
}

pub fn state_from_json(text: &str) -> Result<StateSpace, FormatError> {
    let file: StateFile = serde_json::from_str(text)?;
    let m = matrix_from_rows(&file.amplitudes)?;
    if m.nrows() != file.n {
        return Err(FormatError::BadMatrix(format!(
            "declared n = {} but amplitudes are {}x{}",
            file.n,
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(StateSpace::from_matrix(m).expect("validated square"))
}

/// `j,k,re,im` for every state, row-major.
pub fn state_to_csv(s: &StateSpace) -> String {
    let mut out = String::from("j,k,re,im\n");
    let n = s.dim();
    for j in 1..=n {
        for k in 1..=n {
            let a = s.amp(j, k);
            writeln!(out, "{j},{k},{:e},{:e}", a.re, a.im).unwrap();
        }
    }
    out
}

/// `step,node,probability` for every recorded step.
pub fn distributions_to_csv(d: &[NodeDistribution]) -> String {
    let mut out = String::from("step,node,probability\n");
    for (step, dist) in d.iter().enumerate() {
        for (node, p) in dist.probs.iter().enumerate() {
            writeln!(out, "{step},{},{p:e}", node + 1).unwrap();
        }
    }
    out
}

// ------------------------------------------------------ programs, schedules

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum FactorFile {
    General2 {
        d: usize,
        blocks: Vec<[[Pair; 2]; 2]>,
    },
    CosineSine {
        d: usize,
        angles: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
struct ProgramFile {
    n: usize,
    factors: Vec<FactorFile>,
}

pub fn program_to_json(p: &CsdProgram) -> String {
    let factors = p
        .factors
        .iter()
        .map(|f| match &f.kind {
            FactorKind::General2 { blocks } => FactorFile::General2 {
                d: f.d,
                blocks: blocks.iter().map(c2_rows).collect(),
            },
            FactorKind::CosineSine { angles } => FactorFile::CosineSine {
                d: f.d,
                angles: angles.clone(),
            },
        })
        .collect();
    serde_json::to_string_pretty(&ProgramFile { n: p.n, factors }).expect("program serializes")
}

#[derive(Debug, Serialize, Deserialize)]
struct RotationFile {
    p: usize,
    q: usize,
    u: [[Pair; 2]; 2],
}

#[derive(Debug, Serialize, Deserialize)]
struct StageFile {
    interval: usize,
    rotations: Vec<RotationFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ScheduleFile {
    n: usize,
    stages: Vec<StageFile>,
}

pub fn schedule_to_json(s: &PulseSchedule) -> String {
    let file = ScheduleFile {
        n: s.n,
        stages: s
            .stages
            .iter()
            .map(|st| StageFile {
                interval: st.interval,
                rotations: st
                    .rotations
                    .iter()
                    .map(|r| RotationFile {
                        p: r.p,
                        q: r.q,
                        u: c2_rows(&r.u),
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("schedule serializes")
}

/// Reads a schedule back for replay; structure is checked with
/// [`PulseSchedule::validate`] by the caller when needed.
pub fn schedule_from_json(text: &str) -> Result<PulseSchedule, FormatError> {
    let file: ScheduleFile = serde_json::from_str(text)?;
    Ok(PulseSchedule {
        n: file.n,
        stages: file
            .stages
            .into_iter()
            .map(|st| Stage {
                interval: st.interval,
                rotations: st
                    .rotations
                    .into_iter()
                    .map(|r| Rotation {
                        p: r.p,
                        q: r.q,
                        u: c2_from_rows(&r.u),
                    })
                    .collect(),
            })
            .collect(),
    })
}

// ----------------------------------------------------------------- lattice

/// `x,y,spin,re,im` for every site and level.
pub fn lattice_to_csv(ls: &LatticeState) -> String {
    let mut out = String::from("x,y,spin,re,im\n");
    for (x, y, a) in ls.iter_sites() {
        for (spin, v) in a.iter().enumerate() {
            writeln!(out, "{x},{y},{spin},{:e},{:e}", v.re, v.im).unwrap();
        }
    }
    out
}

#[derive(Debug, Serialize)]
struct SiteEntry {
    x: usize,
    y: usize,
    spin: usize,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize)]
struct TraceStep {
    step: usize,
    sites: Vec<SiteEntry>,
}

#[derive(Debug, Serialize)]
struct TraceFile {
    theta: f64,
    steps: Vec<TraceStep>,
}

/// The five protocol snapshots, listing only populated site levels.
pub fn trace_to_json(t: &PairProtocolTrace) -> String {
    let steps = t
        .steps
        .iter()
        .enumerate()
        .map(|(i, ls)| TraceStep {
            step: i + 1,
            sites: ls
                .iter_sites()
                .flat_map(|(x, y, a)| {
                    a.into_iter().enumerate().filter_map(move |(spin, v)| {
                        (v.norm() > 0.0).then_some(SiteEntry {
                            x,
                            y,
                            spin,
                            re: v.re,
                            im: v.im,
                        })
                    })
                })
                .collect(),
        })
        .collect();
    serde_json::to_string_pretty(&TraceFile {
        theta: t.theta,
        steps,
    })
    .expect("trace serializes")
}

// --------------------------------------------------------------------- svg

/// Static bar chart of a node distribution.
pub fn distribution_svg(d: &NodeDistribution, title: &str) -> String {
    let (w, h, margin) = (640.0, 360.0, 40.0);
    let n = d.probs.len().max(1);
    let plot_w = w - 2.0 * margin;
    let plot_h = h - 2.0 * margin;
    let slot = plot_w / n as f64;
    let max = d.probs.iter().copied().fold(0.0, f64::max).max(1e-12);
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        w / 2.0,
        margin / 2.0 + 5.0,
        escape(title)
    )
    .unwrap();
    for (i, p) in d.probs.iter().enumerate() {
        let bh = plot_h * p / max;
        let x = margin + i as f64 * slot + slot * 0.1;
        let y = margin + plot_h - bh;
        writeln!(
            out,
            r##"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{bh:.2}" fill="#4477aa"><title>node {}: {p:.6}</title></rect>"##,
            slot * 0.8,
            i + 1
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{:.2}" y="{}" font-family="sans-serif" font-size="10" text-anchor="middle">{}</text>"#,
            x + slot * 0.4,
            h - margin + 14.0,
            i + 1
        )
        .unwrap();
    }
    writeln!(
        out,
        r#"<line x1="{margin}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        h - margin,
        w - margin,
        h - margin
    )
    .unwrap();
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
