//! Brute-force reference values for segment-pair integrals.
//!
//! Nested adaptive Gauss–Legendre integration in arc length, with a
//! neighbourhood of size `eps` cut out around the singularity and the
//! `eps -> 0` limit taken by a least-squares fit over several `eps`.
//! Hypersingular integrals over one segment are taken as Hadamard finite
//! parts in the inner variable. Logarithmically divergent cases are
//! returned with the same `log(eps)` term removed as in [`crate::singular`].
//!
//! This is deliberately independent of the closed forms and the polar
//! transform; it is slow and meant for tests.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{basis_curl, dot, norm, Mesh, NodeAt, Point, SegmentGeom};
use crate::kernels::{d2g_sing_of, KernelContext};
use crate::quadrature::{gl_rule, QuadRule};
use crate::singular::BasisPair;
use crate::Complex;

const ZERO: Complex = Complex::new(0.0, 0.0);

/// Kernel integrated by the oracle, always against `p_i^m(r) p_j^n(r')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OracleKernel {
    Single,
    Double,
    AdjointDouble,
    Hypersingular,
    /// The `k`-independent `1/R^2` part of the hypersingular kernel.
    HypersingularStatic,
    /// `g (k^2 (n . n') p p' - curl p curl p')`.
    Variational,
}

impl OracleKernel {
    fn hypersingular(self) -> bool {
        matches!(self, OracleKernel::Hypersingular | OracleKernel::HypersingularStatic)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub value: Complex,
    pub est_error: f64,
    /// Cut-off sizes used in the extrapolation; empty when the integral
    /// needed no cut-off.
    pub epsilons_used: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Cut-off sizes relative to the shorter segment.
    pub eps_factors: Vec<f64>,
    /// Absolute tolerance per accepted panel, relative to `l_m l_n` for the
    /// single and double layer kernels.
    pub tol: f64,
    pub max_depth: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            eps_factors: vec![1e-4, 5e-5, 2.5e-5, 1.25e-5, 6.25e-6, 3.125e-6],
            tol: 1e-12,
            max_depth: 60,
        }
    }
}

impl OracleConfig {
    pub fn with_eps_factors(mut self, eps: Vec<f64>) -> Self {
        self.eps_factors = eps;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.eps_factors.len() < 3 {
            return Err(Error::Argument("need at least three eps levels".into()));
        }
        if self.eps_factors.iter().any(|e| !(*e > 0.0 && *e < 0.1)) {
            return Err(Error::Argument(format!("eps factors must lie in (0, 0.1): {:?}", self.eps_factors)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Argument(format!("tolerance must be > 0, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Adaptive Gauss–Legendre: an interval is accepted when the rule on it
/// and the rule on its two halves agree to `tol`.
struct Adaptive {
    rule: &'static QuadRule,
    tol: f64,
    max_depth: usize,
}

impl Adaptive {
    fn panel<F>(&self, f: &mut F, a: f64, b: f64) -> Result<Complex>
    where
        F: FnMut(f64) -> Result<Complex>,
    {
        let mut s = ZERO;
        for (x, w) in self.rule.mapped(a, b) {
            let v = f(x)?;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite { node: 0, x: vec![x] });
            }
            s += w * v;
        }
        Ok(s)
    }

    fn recurse<F>(&self, f: &mut F, a: f64, b: f64, whole: Complex, depth: usize, err: &mut f64) -> Result<Complex>
    where
        F: FnMut(f64) -> Result<Complex>,
    {
        let m = 0.5 * (a + b);
        let left = self.panel(f, a, m)?;
        let right = self.panel(f, m, b)?;
        let diff = (left + right - whole).norm();
        if diff <= self.tol || depth >= self.max_depth || m <= a || m >= b {
            *err += diff;
            return Ok(left + right);
        }
        Ok(self.recurse(f, a, m, left, depth + 1, err)? + self.recurse(f, m, b, right, depth + 1, err)?)
    }

    /// Integral over `[a, b]` with extra breakpoints, and an error estimate.
    fn integrate<F>(&self, mut f: F, a: f64, b: f64, breaks: &[f64]) -> Result<(Complex, f64)>
    where
        F: FnMut(f64) -> Result<Complex>,
    {
        let mut pts = vec![a];
        pts.extend(breaks.iter().copied().filter(|x| *x > a && *x < b));
        pts.push(b);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let mut total = ZERO;
        let mut err = 0.0;
        for w in pts.windows(2) {
            let whole = self.panel(&mut f, w[0], w[1])?;
            total += self.recurse(&mut f, w[0], w[1], whole, 0, &mut err)?;
        }
        Ok((total, err))
    }
}

/// One segment parametrized by arc length `x` from `origin`.
struct Side {
    origin: Point,
    dir: Point,
    len: f64,
    normal: Point,
    /// Basis restriction is one at the origin.
    one_at_origin: bool,
    curl: f64,
}

impl Side {
    fn new(seg: &SegmentGeom, origin_end: NodeAt, basis: NodeAt) -> Side {
        let e = seg.edge_from(origin_end);
        Side {
            origin: seg.end(origin_end),
            dir: [e[0] / seg.length, e[1] / seg.length],
            len: seg.length,
            normal: seg.normal,
            one_at_origin: origin_end == basis,
            curl: basis_curl(seg, basis),
        }
    }

    fn p(&self, x: f64) -> f64 {
        if self.one_at_origin {
            1.0 - x / self.len
        } else {
            x / self.len
        }
    }

    fn slope(&self) -> f64 {
        if self.one_at_origin {
            -1.0 / self.len
        } else {
            1.0 / self.len
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Relation {
    Coincident,
    Adjacent,
    Disjoint,
}

struct PairProblem<'a> {
    ctx: &'a KernelContext,
    kernel: OracleKernel,
    m: Side,
    n: Side,
    rel: Relation,
    delta: Point,
    nn: f64,
    /// Both basis functions are one at the same point of the pair.
    log_divergent: bool,
}

impl PairProblem<'_> {
    fn separation(&self, x: f64, y: f64) -> Point {
        match self.rel {
            Relation::Coincident => {
                let s = x - y;
                [s * self.m.dir[0], s * self.m.dir[1]]
            }
            _ => [
                self.delta[0] + x * self.m.dir[0] - y * self.n.dir[0],
                self.delta[1] + x * self.m.dir[1] - y * self.n.dir[1],
            ],
        }
    }

    fn integrand(&self, x: f64, y: f64) -> Complex {
        let r = self.separation(x, y);
        let d = norm(r);
        let pp = self.m.p(x) * self.n.p(y);
        let ctx = self.ctx;
        match self.kernel {
            OracleKernel::Single => ctx.g(d) * pp,
            OracleKernel::Double => ctx.dg_dnp_of(d, dot(r, self.n.normal)) * pp,
            OracleKernel::AdjointDouble => -ctx.dg_dnp_of(d, dot(r, self.m.normal)) * pp,
            OracleKernel::Hypersingular => {
                ctx.d2g_of(d, self.nn, dot(r, self.m.normal), dot(r, self.n.normal)) * pp
            }
            OracleKernel::HypersingularStatic => {
                d2g_sing_of(ctx.kind(), d, self.nn, dot(r, self.m.normal), dot(r, self.n.normal)) * pp
            }
            OracleKernel::Variational => {
                let k2 = ctx.k() * ctx.k();
                ctx.g(d) * (k2 * self.nn * pp - self.m.curl * self.n.curl)
            }
        }
    }

    /// Points of `S_n` where the inner integrand varies fastest.
    fn inner_breaks(&self, x: f64) -> [f64; 2] {
        let rx = [
            self.delta[0] + x * self.m.dir[0],
            self.delta[1] + x * self.m.dir[1],
        ];
        let foot = dot(rx, self.n.dir).clamp(0.0, self.n.len);
        [foot, norm(rx).min(self.n.len)]
    }

    /// Inner finite-part integral for one segment against itself.
    fn coincident_hyper_inner(&self, inner: &Adaptive, x: f64) -> Result<Complex> {
        let l = self.m.len;
        let (a, b) = (x, l - x);
        let px = self.m.p(x);
        let c0 = px * self.n.p(x);
        let c1 = px * self.n.slope();
        let static_part = self.ctx.kind().sign() / (2.0 * PI) * (c0 * (-1.0 / a - 1.0 / b) + c1 * (b / a).ln());
        let mut total = Complex::new(static_part, 0.0);
        if self.kernel == OracleKernel::Hypersingular {
            let ctx = self.ctx;
            let (reg, _) = inner.integrate(
                |y| Ok(ctx.d2g_reg_of((x - y).abs(), 1.0, 0.0, 0.0) * (px * self.n.p(y))),
                0.0,
                l,
                &[x],
            )?;
            total += reg;
        }
        Ok(total)
    }

    fn integrators(&self, cfg: &OracleConfig) -> Result<(Adaptive, Adaptive)> {
        let rule = gl_rule(12)?;
        // single and double layer integrals scale like length squared, the
        // hypersingular ones are dimensionless
        let magnitude = match self.kernel {
            OracleKernel::Single | OracleKernel::Double | OracleKernel::AdjointDouble => {
                self.m.len * self.n.len
            }
            _ => 1.0,
        };
        let outer = Adaptive {
            rule,
            tol: cfg.tol * magnitude,
            max_depth: cfg.max_depth,
        };
        let inner = Adaptive {
            rule,
            tol: 0.1 * cfg.tol * magnitude / self.m.len,
            max_depth: cfg.max_depth,
        };
        Ok((outer, inner))
    }

    /// Outer integrand when only the outer variable is cut off.
    fn outer_integrand(&self, inner: &Adaptive, x: f64) -> Result<Complex> {
        if self.rel == Relation::Coincident {
            return self.coincident_hyper_inner(inner, x);
        }
        let br = self.inner_breaks(x);
        Ok(inner.integrate(|y| Ok(self.integrand(x, y)), 0.0, self.n.len, &br)?.0)
    }

    /// Integral without any cut-off.
    fn plain_value(&self, cfg: &OracleConfig) -> Result<(Complex, f64)> {
        let (outer, inner) = self.integrators(cfg)?;
        outer.integrate(|x| self.outer_integrand(&inner, x), 0.0, self.m.len, &[])
    }

    /// Cut-off integrals for each `eps` (in the given order) and the summed
    /// quadrature error estimate.
    fn cutoff_values(&self, cfg: &OracleConfig, eps: &[f64]) -> Result<(Vec<Complex>, f64)> {
        let (outer, inner) = self.integrators(cfg)?;
        let (lm, ln) = (self.m.len, self.n.len);
        if self.rel == Relation::Coincident && !self.kernel.hypersingular() {
            // the cut-off band sits in the inner integral
            let mut out = Vec::with_capacity(eps.len());
            let mut err = 0.0;
            for &e in eps {
                let (v, de) = outer.integrate(
                    |x| {
                        let mut s = ZERO;
                        if x - e > 0.0 {
                            s += inner.integrate(|y| Ok(self.integrand(x, y)), 0.0, x - e, &[])?.0;
                        }
                        if x + e < ln {
                            s += inner.integrate(|y| Ok(self.integrand(x, y)), x + e, ln, &[])?.0;
                        }
                        Ok(s)
                    },
                    0.0,
                    lm,
                    &[e, lm - e],
                )?;
                out.push(v);
                err += de;
            }
            return Ok((out, err));
        }
        // the cut-off only trims the outer range, so integrate the largest
        // range once and add the slivers between consecutive cut-offs
        let both_ends = self.rel == Relation::Coincident;
        let mut order: Vec<usize> = (0..eps.len()).collect();
        order.sort_by(|&a, &b| eps[b].total_cmp(&eps[a]));
        let f = |x: f64| self.outer_integrand(&inner, x);
        let emax = eps[order[0]];
        let hi = if both_ends { lm - emax } else { lm };
        let (mut acc, mut err) = outer.integrate(f, emax, hi, &[])?;
        let mut out = vec![ZERO; eps.len()];
        out[order[0]] = acc;
        let mut prev = emax;
        for &i in &order[1..] {
            let e = eps[i];
            let (v, de) = outer.integrate(f, e, prev, &[])?;
            acc += v;
            err += de;
            if both_ends {
                let (v, de) = outer.integrate(f, lm - prev, lm - e, &[])?;
                acc += v;
                err += de;
            }
            out[i] = acc;
            prev = e;
        }
        Ok((out, err))
    }

    fn needs_cutoff(&self) -> bool {
        match self.rel {
            Relation::Coincident => true,
            Relation::Adjacent => self.kernel.hypersingular(),
            Relation::Disjoint => false,
        }
    }

    /// `log(eps)` coefficient of the divergent cut-off integral.
    fn log_coefficient(&self) -> f64 {
        if !self.kernel.hypersingular() || !self.log_divergent {
            return 0.0;
        }
        let s = self.ctx.kind().sign() / (2.0 * PI);
        match self.rel {
            Relation::Coincident => s,
            Relation::Adjacent => -s,
            Relation::Disjoint => 0.0,
        }
    }
}

fn setup<'a>(
    ctx: &'a KernelContext,
    sm: &SegmentGeom,
    sn: &SegmentGeom,
    basis: BasisPair,
    kernel: OracleKernel,
) -> Result<PairProblem<'a>> {
    let coincident = sm.a == sn.a && sm.b == sn.b;
    if !coincident && sm.a == sn.b && sm.b == sn.a {
        return Err(Error::Argument("segments overlap with opposite orientation".into()));
    }
    let shared = [NodeAt::A, NodeAt::B]
        .into_iter()
        .flat_map(|i| [NodeAt::A, NodeAt::B].into_iter().map(move |j| (i, j)))
        .find(|&(i, j)| sm.end(i) == sn.end(j));
    let (rel, om, on) = if coincident {
        // origin at A for both; the basis at B is one at the far end
        (Relation::Coincident, NodeAt::A, NodeAt::A)
    } else if let Some((i, j)) = shared {
        (Relation::Adjacent, i, j)
    } else {
        (Relation::Disjoint, NodeAt::A, NodeAt::A)
    };
    let m = Side::new(sm, om, basis.m);
    let n = Side::new(sn, on, basis.n);
    let delta = [m.origin[0] - n.origin[0], m.origin[1] - n.origin[1]];
    let nn = dot(m.normal, n.normal);
    let log_divergent = match rel {
        Relation::Coincident => basis.m == basis.n,
        _ => m.one_at_origin && n.one_at_origin,
    };
    Ok(PairProblem {
        ctx,
        kernel,
        m,
        n,
        rel,
        delta,
        nn,
        log_divergent,
    })
}

/// Reference value of `int_{S_m} int_{S_n} K p_i^m p_j^n` for any two
/// segments, with the basis restrictions given by `basis`.
///
/// For the hypersingular kernels the coincident pair with both basis
/// functions at the same end, and the adjacent pair with both at the shared
/// vertex, diverge like `log(eps)`; that term is removed so the result
/// matches the regularized closed forms.
pub fn pair_integral(
    ctx: &KernelContext,
    sm: &SegmentGeom,
    sn: &SegmentGeom,
    basis: BasisPair,
    kernel: OracleKernel,
    cfg: &OracleConfig,
) -> Result<OracleResult> {
    cfg.validate()?;
    let prob = setup(ctx, sm, sn, basis, kernel)?;
    if !prob.needs_cutoff() {
        let (value, est_error) = prob.plain_value(cfg)?;
        return Ok(OracleResult {
            value,
            est_error,
            epsilons_used: Vec::new(),
        });
    }
    let scale = sm.length.min(sn.length);
    let eps: Vec<f64> = cfg.eps_factors.iter().map(|f| f * scale).collect();
    let c = prob.log_coefficient();
    let (raw, quad_err) = prob.cutoff_values(cfg, &eps)?;
    let vals: Vec<Complex> = raw.iter().zip(&eps).map(|(v, e)| v - c * e.ln()).collect();
    let (value, fit_err) = extrapolate(&eps, &vals, scale)?;
    Ok(OracleResult {
        value,
        est_error: fit_err + quad_err,
        epsilons_used: eps,
    })
}

/// Fits `a + b e + c e log e + d e^2 + f e^2 log e` (fewer terms if there are
/// fewer samples) and returns `a`, with the change in `a` from a three-term
/// fit to the three smallest `e` as the error estimate.
fn extrapolate(eps: &[f64], vals: &[Complex], scale: f64) -> Result<(Complex, f64)> {
    let full = lsq_constant(eps, vals, scale, 5)?;
    let mut idx: Vec<usize> = (0..eps.len()).collect();
    idx.sort_by(|&a, &b| eps[a].total_cmp(&eps[b]));
    let small: Vec<usize> = idx.into_iter().take(3).collect();
    let e3: Vec<f64> = small.iter().map(|&i| eps[i]).collect();
    let v3: Vec<Complex> = small.iter().map(|&i| vals[i]).collect();
    let reduced = lsq_constant(&e3, &v3, scale, 3)?;
    Ok((full, (full - reduced).norm()))
}

fn lsq_constant(eps: &[f64], vals: &[Complex], scale: f64, terms: usize) -> Result<Complex> {
    let terms = terms.min(eps.len());
    let cols: Vec<Vec<f64>> = (0..terms)
        .map(|j| {
            eps.iter()
                .map(|&e| {
                    let t = e / scale;
                    match j {
                        0 => 1.0,
                        1 => t,
                        2 => t * t.ln(),
                        3 => t * t,
                        _ => t * t * t.ln(),
                    }
                })
                .collect()
        })
        .collect();
    let coef = least_squares(&cols, vals)?;
    Ok(coef[0])
}

/// Least squares by modified Gram–Schmidt on the columns.
fn least_squares(cols: &[Vec<f64>], rhs: &[Complex]) -> Result<Vec<Complex>> {
    let n = cols.len();
    let mut q = cols.to_vec();
    let mut r = vec![vec![0.0; n]; n];
    for j in 0..n {
        for i in 0..j {
            let d: f64 = q[i].iter().zip(&q[j]).map(|(a, b)| a * b).sum();
            r[i][j] = d;
            let qi = q[i].clone();
            for (x, y) in q[j].iter_mut().zip(&qi) {
                *x -= d * y;
            }
        }
        let nrm = q[j].iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(nrm > 1e-300) {
            return Err(Error::Argument("singular extrapolation system".into()));
        }
        r[j][j] = nrm;
        for x in &mut q[j] {
            *x /= nrm;
        }
    }
    let mut b: Vec<Complex> = (0..n)
        .map(|j| q[j].iter().zip(rhs).map(|(a, v)| *v * *a).sum())
        .collect();
    for j in (0..n).rev() {
        for i in (j + 1)..n {
            let t = b[i] * r[j][i];
            b[j] -= t;
        }
        b[j] /= r[j][j];
    }
    Ok(b)
}

/// Reference matrix assembled from [`pair_integral`] over every segment
/// pair and basis combination, with the largest per-pair error estimate.
pub fn oracle_matrix(
    mesh: &Mesh,
    kernel: OracleKernel,
    ctx: &KernelContext,
    cfg: &OracleConfig,
) -> Result<(Vec<Vec<Complex>>, f64)> {
    let ns = mesh.segment_count();
    let mut a = vec![vec![ZERO; mesh.node_count()]; mesh.node_count()];
    let mut worst: f64 = 0.0;
    for m in 0..ns {
        let sm = mesh.segment(m);
        for n in 0..ns {
            let sn = mesh.segment(n);
            for basis in BasisPair::all() {
                let res = pair_integral(ctx, &sm, &sn, basis, kernel, cfg)?;
                worst = worst.max(res.est_error);
                a[mesh.node_of(m, basis.m)][mesh.node_of(n, basis.n)] += res.value;
            }
        }
    }
    Ok((a, worst))
}
