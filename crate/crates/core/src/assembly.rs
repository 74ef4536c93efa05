//! Galerkin matrices of the four boundary operators on a closed polygon.
//!
//! Entry `(i, j)` sums the segment-pair integrals of every segment touching
//! node `i` against every segment touching node `j`. Assembly is sequential
//! and visits pairs in a fixed order, so repeated runs are bit-identical.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{basis_curl, classify_pair, dot, norm, sub, Mesh, NodeAt, SegmentGeom, SegmentPairClass};
use crate::kernels::KernelContext;
use crate::quadrature::{gl_rule, DEFAULT_ORDER};
use crate::singular::{
    double_adjacent, double_coincident, hyper_direct_adjacent, hyper_direct_coincident,
    hyper_variational_adjacent, hyper_variational_coincident, single_adjacent, single_coincident,
    AdjacentPair, BasisPair,
};
use crate::specfun::HankelKind;
use crate::Complex;

/// Default grading levels of the refined tensor rule at a shared vertex.
pub const DEFAULT_LEVELS: usize = 8;

const ZERO: Complex = Complex::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Operator {
    /// Single layer, kernel `g`.
    S,
    /// Double layer, kernel `dg/dn'`.
    D,
    /// Adjoint double layer, kernel `dg/dn`.
    Dadj,
    /// Hypersingular, kernel `d2g/dn dn'`.
    N,
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operator::S => "S",
            Operator::D => "D",
            Operator::Dadj => "Dadj",
            Operator::N => "N",
        })
    }
}

impl FromStr for Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" => Ok(Operator::S),
            "D" => Ok(Operator::D),
            "Dadj" => Ok(Operator::Dadj),
            "N" => Ok(Operator::N),
            _ => Err(Error::Argument(format!("unknown operator {s:?}, expected S, D, Dadj or N"))),
        }
    }
}

/// Treatment of the hypersingular operator; the other operators take
/// [`Method::NotApplicable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    Direct,
    Variational,
    NotApplicable,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Direct => "direct",
            Method::Variational => "variational",
            Method::NotApplicable => "none",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Method::Direct),
            "variational" => Ok(Method::Variational),
            "none" => Ok(Method::NotApplicable),
            _ => Err(Error::Argument(format!("unknown method {s:?}, expected direct or variational"))),
        }
    }
}

/// Quadrature settings: Gauss points per direction and grading levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssemblyOptions {
    pub nq: usize,
    pub levels: usize,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        AssemblyOptions {
            nq: DEFAULT_ORDER,
            levels: DEFAULT_LEVELS,
        }
    }
}

/// Dense complex matrix with the parameters it was assembled with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorMatrix {
    pub op: Operator,
    pub method: Method,
    pub k: f64,
    pub kind: HankelKind,
    pub nq: usize,
    pub n: usize,
    /// Row-major entries.
    pub entries: Vec<Complex>,
}

impl OperatorMatrix {
    pub fn get(&self, i: usize, j: usize) -> Complex {
        self.entries[i * self.n + j]
    }

    fn add(&mut self, i: usize, j: usize, v: Complex) {
        self.entries[i * self.n + j] += v;
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest `|a_ij - b_ij|`; errors if the sizes differ.
    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> Result<f64> {
        self.max_diff_by(other, |d| d.norm())
    }

    /// Largest difference of the imaginary parts.
    pub fn max_imag_diff(&self, other: &OperatorMatrix) -> Result<f64> {
        self.max_diff_by(other, |d| d.im.abs())
    }

    fn max_diff_by(&self, other: &OperatorMatrix, f: impl Fn(Complex) -> f64) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::Argument(format!("matrix sizes differ: {} vs {}", self.n, other.n)));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| f(a - b))
            .fold(0.0, f64::max))
    }

    pub fn transpose(&self) -> OperatorMatrix {
        let mut t = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                t.entries[j * self.n + i] = self.get(i, j);
            }
        }
        t
    }
}

fn check_method(op: Operator, method: Method) -> Result<()> {
    match (op, method) {
        (Operator::N, Method::NotApplicable) => Err(Error::Argument(
            "the hypersingular operator needs method direct or variational".into(),
        )),
        (Operator::N, _) | (_, Method::NotApplicable) => Ok(()),
        (op, m) => Err(Error::Argument(format!("method {m} only applies to N, not {op}"))),
    }
}

type Block = [[Complex; 2]; 2];

/// Assembles the `N x N` Galerkin matrix of `op` on `mesh`.
pub fn assemble(
    mesh: &Mesh,
    op: Operator,
    method: Method,
    ctx: &KernelContext,
    opts: AssemblyOptions,
) -> Result<OperatorMatrix> {
    check_method(op, method)?;
    gl_rule(opts.nq)?;
    let ctx = ctx.with_scale(mesh.diameter())?;
    let n = mesh.node_count();
    let ns = mesh.segment_count();
    let mut out = OperatorMatrix {
        op,
        method,
        k: ctx.k(),
        kind: ctx.kind(),
        nq: opts.nq,
        n,
        entries: vec![ZERO; n * n],
    };
    let symmetric = matches!(op, Operator::S | Operator::N);
    for m in 0..ns {
        let first = if symmetric { m } else { 0 };
        for s in first..ns {
            let block = pair_block(mesh, op, method, &ctx, opts, m, s)?;
            for a in NodeAt::BOTH {
                for b in NodeAt::BOTH {
                    let v = block[a.index()][b.index()];
                    let (i, j) = (mesh.node_of(m, a), mesh.node_of(s, b));
                    out.add(i, j, v);
                    if symmetric && s != m {
                        out.add(j, i, v);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Integrals of segment pair `(m, n)` for the four basis combinations,
/// indexed by the end of `S_m` and the end of `S_n`.
fn pair_block(
    mesh: &Mesh,
    op: Operator,
    method: Method,
    ctx: &KernelContext,
    opts: AssemblyOptions,
    m: usize,
    n: usize,
) -> Result<Block> {
    let mut block = [[ZERO; 2]; 2];
    match classify_pair(mesh, m, n) {
        SegmentPairClass::Coincident => {
            let l = mesh.segment(m).length;
            let entry: Box<dyn Fn(NodeAt, NodeAt) -> Complex> = match (op, method) {
                (Operator::S, _) => {
                    let c = single_coincident(ctx, l, opts.nq)?;
                    Box::new(move |a, b| c.entry(a, b))
                }
                (Operator::D | Operator::Dadj, _) => Box::new(|_, _| double_coincident()),
                (Operator::N, Method::Variational) => {
                    let (u11, u12) = hyper_variational_coincident(ctx, l, opts.nq)?;
                    Box::new(move |a, b| if a == b { u11 } else { u12 })
                }
                (Operator::N, _) => {
                    let c = hyper_direct_coincident(ctx, l, opts.nq)?;
                    Box::new(move |a, b| c.entry(a, b))
                }
            };
            for a in NodeAt::BOTH {
                for b in NodeAt::BOTH {
                    block[a.index()][b.index()] = entry(a, b);
                }
            }
        }
        SegmentPairClass::AdjacentSharedVertex { .. } => {
            let pair = AdjacentPair::from_mesh(mesh, m, n)?;
            for basis in BasisPair::all() {
                let v = match (op, method) {
                    (Operator::S, _) => single_adjacent(ctx, &pair, basis, opts.nq, opts.levels)?,
                    (Operator::D, _) => double_adjacent(ctx, &pair, basis, opts.nq, false)?,
                    (Operator::Dadj, _) => double_adjacent(ctx, &pair, basis, opts.nq, true)?,
                    (Operator::N, Method::Variational) => {
                        hyper_variational_adjacent(ctx, &pair, basis, opts.nq, opts.levels)?
                    }
                    (Operator::N, _) => hyper_direct_adjacent(ctx, &pair, basis, opts.nq)?.total(),
                };
                block[basis.m.index()][basis.n.index()] = v;
            }
        }
        SegmentPairClass::Disjoint => {
            block = disjoint_block(op, method, ctx, &mesh.segment(m), &mesh.segment(n), opts.nq)?;
        }
    }
    Ok(block)
}

/// Tensor Gauss rule over two well-separated segments, all four basis
/// combinations from one set of kernel evaluations.
fn disjoint_block(
    op: Operator,
    method: Method,
    ctx: &KernelContext,
    sm: &SegmentGeom,
    sn: &SegmentGeom,
    nq: usize,
) -> Result<Block> {
    let rule = gl_rule(nq)?;
    let jac = sm.length * sn.length;
    let nn = dot(sm.normal, sn.normal);
    let k2nn = ctx.k() * ctx.k() * nn;
    let curl = |seg: &SegmentGeom| [basis_curl(seg, NodeAt::A), basis_curl(seg, NodeAt::B)];
    let (cm, cn) = (curl(sm), curl(sn));
    let mut block = [[ZERO; 2]; 2];
    for (u, wu) in rule.mapped(0.0, 1.0) {
        let r = sm.point(u);
        let pm = [1.0 - u, u];
        for (v, wv) in rule.mapped(0.0, 1.0) {
            let rv = sub(r, sn.point(v));
            let d = norm(rv);
            let pn = [1.0 - v, v];
            let w = wu * wv * jac;
            let kern = match (op, method) {
                (Operator::S, _) | (Operator::N, Method::Variational) => ctx.g(d),
                (Operator::D, _) => ctx.dg_dnp_of(d, dot(rv, sn.normal)),
                (Operator::Dadj, _) => -ctx.dg_dnp_of(d, dot(rv, sm.normal)),
                (Operator::N, _) => ctx.d2g_of(d, nn, dot(rv, sm.normal), dot(rv, sn.normal)),
            };
            if !(kern.re.is_finite() && kern.im.is_finite()) {
                return Err(Error::NonFinite { node: 0, x: vec![u, v] });
            }
            for a in 0..2 {
                for b in 0..2 {
                    let factor = if op == Operator::N && method == Method::Variational {
                        k2nn * pm[a] * pn[b] - cm[a] * cn[b]
                    } else {
                        pm[a] * pn[b]
                    };
                    block[a][b] += kern * (w * factor);
                }
            }
        }
    }
    Ok(block)
}

/// One entry of the direct and variational hypersingular matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntryComparison {
    pub i: usize,
    pub j: usize,
    pub direct: Complex,
    pub variational: Complex,
}

impl EntryComparison {
    pub fn abs_diff(&self) -> f64 {
        (self.direct - self.variational).norm()
    }
}

/// Direct against variational hypersingular matrices on one mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodComparison {
    pub k: f64,
    /// Node 0 against itself, its first and its second neighbour.
    pub entries: Vec<EntryComparison>,
    pub max_abs_diff: f64,
    pub max_imag_diff: f64,
}

pub fn compare_methods(mesh: &Mesh, ctx: &KernelContext, opts: AssemblyOptions) -> Result<MethodComparison> {
    let direct = assemble(mesh, Operator::N, Method::Direct, ctx, opts)?;
    let var = assemble(mesh, Operator::N, Method::Variational, ctx, opts)?;
    let entries = (0..3.min(mesh.node_count()))
        .map(|j| EntryComparison {
            i: 0,
            j,
            direct: direct.get(0, j),
            variational: var.get(0, j),
        })
        .collect();
    Ok(MethodComparison {
        k: ctx.k(),
        entries,
        max_abs_diff: direct.max_abs_diff(&var)?,
        max_imag_diff: direct.max_imag_diff(&var)?,
    })
}
