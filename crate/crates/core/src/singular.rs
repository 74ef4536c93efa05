//! Singular and nearly singular segment-pair integrals.
//!
//! Coincident pairs use closed forms in terms of Hankel and Struve functions
//! plus the two regular integrals `Gamma0` and `Gamma2`. Adjacent pairs are
//! integrated in vertex-local coordinates `t, t'` in `[0, 1]` measured from
//! the shared vertex, either with a tensor rule graded toward the vertex or
//! with the polar (Duffy) transform whose Jacobian cancels the `1/R`
//! singularity.
//!
//! The logarithmic divergences of the coincident and adjacent hypersingular
//! integrals cancel in every assembled matrix entry; both are returned here
//! with the divergent term already removed.

use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    add_scaled, angle_between, basis_curl, classify_pair, dot, norm, Mesh, NodeAt, Point,
    SegmentGeom, SegmentPairClass,
};
use crate::kernels::{d2g_sing_of, KernelContext};
use crate::quadrature::{
    gl_rule, graded_breakpoints, integrate_2d, integrate_2d_refined, QuadRule,
};
use crate::specfun::{
    gamma0, gamma2, hankel, hankel_reg, j1, struve_h0, struve_h1, y1, HankelKind, EULER_GAMMA,
};
use crate::Complex;

/// `|sin(theta)|` below which an adjacent pair is treated as collinear.
pub const COLLINEAR_SIN: f64 = 1e-10;

/// Radial grading levels of the polar transform.
pub const POLAR_LEVELS: usize = 4;

const I: Complex = Complex::new(0.0, 1.0);

/// Single-layer integrals over one segment against itself.
///
/// `i11` pairs the two basis restrictions that are one at the same end,
/// `i12` the two that are one at opposite ends; `i22 = i11`, `i21 = i12`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoincidentSingleLayer {
    pub i11: Complex,
    pub i12: Complex,
}

impl CoincidentSingleLayer {
    pub fn i22(&self) -> Complex {
        self.i11
    }

    pub fn i21(&self) -> Complex {
        self.i12
    }

    /// Entry for basis restrictions at ends `a` (observation) and `b` (source).
    pub fn entry(&self, a: NodeAt, b: NodeAt) -> Complex {
        if a == b {
            self.i11
        } else {
            self.i12
        }
    }
}

/// Hypersingular integrals over one segment against itself, with the
/// divergent `∓(1/2pi) log(eps)` term removed from `u11_reg`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypersingularCoincident {
    pub u11_reg: Complex,
    pub u12: Complex,
}

impl HypersingularCoincident {
    pub fn entry(&self, a: NodeAt, b: NodeAt) -> Complex {
        if a == b {
            self.u11_reg
        } else {
            self.u12
        }
    }
}

/// Hypersingular integral over two adjacent segments, split into a part
/// integrated numerically and a closed-form part whose `±(1/2pi) log(eps)`
/// divergence has been removed. `sing_reg` is zero unless both basis
/// restrictions are one at the shared vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypersingularAdjacent {
    pub reg: Complex,
    pub sing_reg: Complex,
}

impl HypersingularAdjacent {
    pub fn total(&self) -> Complex {
        self.reg + self.sing_reg
    }
}

/// Basis restrictions of a segment pair: the end of `S_m` carrying the
/// observation basis function and the end of `S_n` carrying the source one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisPair {
    pub m: NodeAt,
    pub n: NodeAt,
}

impl BasisPair {
    pub fn new(m: NodeAt, n: NodeAt) -> Self {
        BasisPair { m, n }
    }

    pub fn all() -> [BasisPair; 4] {
        [
            BasisPair::new(NodeAt::A, NodeAt::A),
            BasisPair::new(NodeAt::A, NodeAt::B),
            BasisPair::new(NodeAt::B, NodeAt::A),
            BasisPair::new(NodeAt::B, NodeAt::B),
        ]
    }
}

/// Two segments meeting at one vertex, described from that vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdjacentPair {
    pub vertex: Point,
    /// Vector from the vertex to the far end of `S_m`.
    pub em: Point,
    /// Vector from the vertex to the far end of `S_n`.
    pub en: Point,
    pub normal_m: Point,
    pub normal_n: Point,
    /// End of `S_m` sitting at the vertex.
    pub m_end: NodeAt,
    /// End of `S_n` sitting at the vertex.
    pub n_end: NodeAt,
    pub l_m: f64,
    pub l_n: f64,
    /// Interior angle at the vertex.
    pub theta: f64,
}

impl AdjacentPair {
    pub fn from_segments(sm: &SegmentGeom, m_end: NodeAt, sn: &SegmentGeom, n_end: NodeAt) -> Result<Self> {
        let vertex = sm.end(m_end);
        if vertex != sn.end(n_end) {
            return Err(Error::Argument(format!(
                "segments do not meet: {vertex:?} vs {:?}",
                sn.end(n_end)
            )));
        }
        let em = sm.edge_from(m_end);
        let en = sn.edge_from(n_end);
        let theta = if m_end == NodeAt::A {
            angle_between(em, en)
        } else {
            angle_between(en, em)
        };
        Ok(AdjacentPair {
            vertex,
            em,
            en,
            normal_m: sm.normal,
            normal_n: sn.normal,
            m_end,
            n_end,
            l_m: sm.length,
            l_n: sn.length,
            theta,
        })
    }

    /// Adjacent segments `(m, n)` of a mesh.
    pub fn from_mesh(mesh: &Mesh, m: usize, n: usize) -> Result<Self> {
        match classify_pair(mesh, m, n) {
            SegmentPairClass::AdjacentSharedVertex { m_end, n_end } => {
                AdjacentPair::from_segments(&mesh.segment(m), m_end, &mesh.segment(n), n_end)
            }
            other => Err(Error::Argument(format!(
                "segments {m} and {n} are not adjacent ({other:?})"
            ))),
        }
    }

    /// Reference configuration: the vertex at the origin, `S_m` leaving it
    /// along the positive x axis and `S_n` arriving from direction `theta`.
    pub fn canonical(l_m: f64, l_n: f64, theta: f64) -> Result<Self> {
        if !(l_m > 0.0 && l_n > 0.0 && l_m.is_finite() && l_n.is_finite()) {
            return Err(Error::Argument(format!("lengths must be > 0, got {l_m}, {l_n}")));
        }
        if !(theta > 0.0 && theta < 2.0 * PI) {
            return Err(Error::Argument(format!("angle must lie in (0, 2pi), got {theta}")));
        }
        let sm = SegmentGeom::new([0.0, 0.0], [l_m, 0.0])?;
        let sn = SegmentGeom::new([l_n * theta.cos(), l_n * theta.sin()], [0.0, 0.0])?;
        let mut p = AdjacentPair::from_segments(&sm, NodeAt::A, &sn, NodeAt::B)?;
        p.theta = theta;
        Ok(p)
    }

    /// The same pair seen from `S_n`.
    pub fn swapped(&self) -> AdjacentPair {
        AdjacentPair {
            vertex: self.vertex,
            em: self.en,
            en: self.em,
            normal_m: self.normal_n,
            normal_n: self.normal_m,
            m_end: self.n_end,
            n_end: self.m_end,
            l_m: self.l_n,
            l_n: self.l_m,
            theta: self.theta,
        }
    }

    pub fn is_collinear(&self) -> bool {
        self.theta.sin().abs() < COLLINEAR_SIN
    }

    /// True if both basis restrictions equal one at the shared vertex.
    pub fn both_at_vertex(&self, basis: BasisPair) -> bool {
        basis.m == self.m_end && basis.n == self.n_end
    }

    /// Basis values at vertex-local coordinates `t` (on `S_m`) and `t'`.
    #[inline]
    fn basis_values(&self, basis: BasisPair, t: f64, tp: f64) -> (f64, f64) {
        let pm = if basis.m == self.m_end { 1.0 - t } else { t };
        let pn = if basis.n == self.n_end { 1.0 - tp } else { tp };
        (pm, pn)
    }

    /// Separation `R = r(t) - r'(t')`, formed from the edge vectors so that
    /// it keeps full relative accuracy near the vertex.
    #[inline]
    fn separation(&self, t: f64, tp: f64) -> Point {
        add_scaled([self.em[0] * t, self.em[1] * t], -tp, self.en)
    }

    fn curls(&self, basis: BasisPair) -> (f64, f64) {
        // basis_curl depends only on the segment length and orientation
        let sm = seg_from(self.vertex, self.em, self.m_end);
        let sn = seg_from(self.vertex, self.en, self.n_end);
        (basis_curl(&sm, basis.m), basis_curl(&sn, basis.n))
    }
}

fn seg_from(vertex: Point, e: Point, vertex_end: NodeAt) -> SegmentGeom {
    let far = add_scaled(vertex, 1.0, e);
    match vertex_end {
        NodeAt::A => SegmentGeom::new(vertex, far),
        NodeAt::B => SegmentGeom::new(far, vertex),
    }
    .expect("adjacent pair segments are non-degenerate")
}

fn check_kl(k: f64, l: f64) -> Result<f64> {
    let s = k * l;
    if !(s > 0.0 && s.is_finite() && l > 0.0) {
        return Err(Error::Argument(format!("need k*l > 0 and finite, got k = {k}, l = {l}")));
    }
    Ok(s)
}

/// Coincident single-layer integrals over a segment of length `l`.
///
/// The `±2/(pi k^4 l^2)` term and the pole of `H2(kl)` cancel exactly; they
/// are combined analytically into the regularized `H~2`.
pub fn single_coincident(ctx: &KernelContext, l: f64, nq: usize) -> Result<CoincidentSingleLayer> {
    let k = ctx.k();
    let kind = ctx.kind();
    let s = check_kl(k, l)?;
    let k2 = k * k;
    let h0 = hankel(kind, 0, s)?;
    let h1 = hankel(kind, 1, s)?;
    let h2r = hankel_reg(kind, 2, s)?;
    let g0 = gamma0(kind, s, nq)?;
    let g2 = gamma2(kind, s, nq)?;
    let struve = h1 * struve_h0(s) - h0 * struve_h1(s);
    let i11 = I * (PI / (8.0 * k2)) * struve - I * (0.5 / k2) * h2r
        + I * (0.25 / k2) * g0
        + I * (0.5 / (k2 * s * s)) * g2;
    let i12 = -i11 + I * (0.25 / k2) * g0;
    Ok(CoincidentSingleLayer { i11, i12 })
}

/// Double-layer and adjoint double-layer integrals over coincident segments
/// vanish because `R` is orthogonal to the common normal.
pub fn double_coincident() -> Complex {
    Complex::new(0.0, 0.0)
}

/// Coincident hypersingular integrals (direct method) for a segment of
/// length `l`. The poles of `H1(kl)/(kl)` are folded into `H~1` analytically.
pub fn hyper_direct_coincident(ctx: &KernelContext, l: f64, nq: usize) -> Result<HypersingularCoincident> {
    let k = ctx.k();
    let kind = ctx.kind();
    let s = check_kl(k, l)?;
    let sl = single_coincident(ctx, l, nq)?;
    let h0 = hankel(kind, 0, s)?;
    let h1r = hankel_reg(kind, 1, s)?;
    let k2 = k * k;
    let half_over_s = I * (0.5 / s);
    let u11_reg = k2 * sl.i11 + half_over_s * h1r - I * 0.25
        + kind.sign() / (2.0 * PI) * (EULER_GAMMA + (0.5 * k).ln());
    let u12 = k2 * sl.i12 + I * 0.25 * h0 - half_over_s * h1r;
    Ok(HypersingularCoincident { u11_reg, u12 })
}

/// Coincident hypersingular integrals in the variational form, returned as
/// `(u11, u12)`.
pub fn hyper_variational_coincident(ctx: &KernelContext, l: f64, nq: usize) -> Result<(Complex, Complex)> {
    let k = ctx.k();
    let s = check_kl(k, l)?;
    let sl = single_coincident(ctx, l, nq)?;
    let g0 = gamma0(ctx.kind(), s, nq)?;
    let k2 = k * k;
    let corr = I * (0.5 / (k2 * l * l)) * g0;
    Ok((k2 * sl.i11 - corr, k2 * sl.i12 + corr))
}

/// Closed form of the static singular part of the adjacent hypersingular
/// integral with both basis functions one at the vertex, divergent
/// `±(1/2pi) log(eps)` removed. Independent of `k`, symmetric in `l_m, l_n`.
pub fn hyper_adjacent_sing_reg(
    kind: HankelKind,
    l_m: f64,
    l_n: f64,
    theta: f64,
) -> Result<Complex> {
    if !(l_m > 0.0 && l_n > 0.0 && l_m.is_finite() && l_n.is_finite() && theta.is_finite()) {
        return Err(Error::Argument(format!(
            "invalid adjacent geometry l_m = {l_m}, l_n = {l_n}, theta = {theta}"
        )));
    }
    let (s, c) = theta.sin_cos();
    let mn = l_m * l_n;
    let (m2, n2) = (l_m * l_m, l_n * l_n);
    let arc = if s.abs() < COLLINEAR_SIN {
        0.0
    } else {
        s / (2.0 * mn)
            * (m2 * (l_n * s).atan2(l_m - l_n * c) + n2 * (l_m * s).atan2(l_n - l_m * c))
    };
    let d2 = m2 + n2 - 2.0 * mn * c;
    // cos(theta) (l_m^2 + l_n^2 - 2 l_m l_n sec(theta)) with sec multiplied through
    let bracket = (c * (m2 + n2) - 2.0 * mn) * d2.ln() - c * (m2 * m2.ln() + n2 * n2.ln());
    let v = 0.5 + arc - mn.ln() - bracket / (4.0 * mn);
    Ok(Complex::new(-kind.sign() * v / (2.0 * PI), 0.0))
}

/// Integrates `f(t, t')` over `[0, 1]^2` with the polar transform centred
/// at `(0, 0)`: `t = rho`, `t' = rho tan(phi)` on `phi` in `[0, pi/4]` and
/// the mirror image on the other half. The radial variable is graded
/// toward the vertex. The rule is exactly symmetric under `t <-> t'`.
pub(crate) fn polar_vertex<F>(rule: &QuadRule, levels: usize, mut f: F) -> Result<Complex>
where
    F: FnMut(f64, f64) -> Complex,
{
    let radial = graded_breakpoints(0.0, 1.0, levels);
    let mut lower = Complex::new(0.0, 0.0);
    let mut upper = Complex::new(0.0, 0.0);
    let mut node = 0;
    for (phi, wphi) in rule.mapped(0.0, FRAC_PI_4) {
        let tan = phi.tan();
        let sec2 = 1.0 + tan * tan;
        for win in radial.windows(2) {
            for (rho, wrho) in rule.mapped(win[0], win[1]) {
                let w = wphi * wrho * rho * sec2;
                let u = rho * tan;
                let a = f(rho, u);
                let b = f(u, rho);
                if !(a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite()) {
                    return Err(Error::NonFinite {
                        node,
                        x: vec![rho, u],
                    });
                }
                lower += w * a;
                upper += w * b;
                node += 1;
            }
        }
    }
    Ok(lower + upper)
}

/// Single-layer integral over adjacent segments. Products that are one at
/// the vertex carry the logarithmic singularity and use a tensor rule graded
/// toward it with `levels` levels; the others use the plain tensor rule.
pub fn single_adjacent(
    ctx: &KernelContext,
    pair: &AdjacentPair,
    basis: BasisPair,
    nq: usize,
    levels: usize,
) -> Result<Complex> {
    let rule = gl_rule(nq)?;
    let jac = pair.l_m * pair.l_n;
    let f = |t: f64, tp: f64| {
        let (pm, pn) = pair.basis_values(basis, t, tp);
        ctx.g(norm(pair.separation(t, tp))) * (pm * pn * jac)
    };
    if pair.both_at_vertex(basis) {
        integrate_2d_refined(rule, f, levels)
    } else {
        integrate_2d(rule, f)
    }
}

/// Double-layer (`adjoint = false`) or adjoint double-layer integral over
/// adjacent segments, by the polar transform for every basis combination.
pub fn double_adjacent(
    ctx: &KernelContext,
    pair: &AdjacentPair,
    basis: BasisPair,
    nq: usize,
    adjoint: bool,
) -> Result<Complex> {
    if pair.is_collinear() {
        return Ok(Complex::new(0.0, 0.0));
    }
    let rule = gl_rule(nq)?;
    let jac = pair.l_m * pair.l_n;
    let (normal, sign) = if adjoint {
        (pair.normal_m, -1.0)
    } else {
        (pair.normal_n, 1.0)
    };
    polar_vertex(rule, POLAR_LEVELS, |t, tp| {
        let (pm, pn) = pair.basis_values(basis, t, tp);
        let r = pair.separation(t, tp);
        ctx.dg_dnp_of(norm(r), dot(r, normal)) * (sign * pm * pn * jac)
    })
}

/// Adjacent double-layer integral with both basis functions one at the
/// vertex, for the reference configuration of lengths `l_m`, `l_n` and
/// interior angle `theta`, evaluated from the explicit transformed
/// integrand `f_D`. Collinear pairs return exactly zero.
pub fn double_adjacent_singular(
    ctx: &KernelContext,
    l_m: f64,
    l_n: f64,
    theta: f64,
    nq: usize,
) -> Result<Complex> {
    transformed_double(ctx, l_m, l_n, theta, nq, false)
}

/// Adjoint counterpart of [`double_adjacent_singular`]: the same transform
/// with `l_m <-> l_n` and `cos(phi) <-> sin(phi)` in the integrand.
pub fn adjoint_double_adjacent_singular(
    ctx: &KernelContext,
    l_m: f64,
    l_n: f64,
    theta: f64,
    nq: usize,
) -> Result<Complex> {
    transformed_double(ctx, l_m, l_n, theta, nq, true)
}

fn transformed_double(
    ctx: &KernelContext,
    l_m: f64,
    l_n: f64,
    theta: f64,
    nq: usize,
    adjoint: bool,
) -> Result<Complex> {
    AdjacentPair::canonical(l_m, l_n, theta)?;
    let (s, c) = theta.sin_cos();
    if s.abs() < COLLINEAR_SIN {
        return Ok(Complex::new(0.0, 0.0));
    }
    let rule = gl_rule(nq)?;
    let pre = if adjoint {
        -I * (ctx.k() * l_m * l_n * l_n * s / 4.0)
    } else {
        -I * (ctx.k() * l_m * l_m * l_n * s / 4.0)
    };
    // f_D(rho, phi) written with rho cos(phi) = t and rho sin(phi) = t'
    let f = |t: f64, tp: f64| {
        let rr = (l_m * l_m * t * t + l_n * l_n * tp * tp - 2.0 * l_m * l_n * c * t * tp).sqrt();
        let h1 = ctx.kind().combine(j1(ctx.k() * rr), y1(ctx.k() * rr));
        let lever = if adjoint { tp } else { t };
        h1 / rr * (lever * (1.0 - t) * (1.0 - tp))
    };
    // polar_vertex supplies the rho d(rho) d(phi) Jacobian; f_D carries
    // rho^2 cos(phi) = rho * t, so one power of rho is already in `lever`
    Ok(pre * polar_vertex(rule, POLAR_LEVELS, f)?)
}

/// Direct-method hypersingular integral over adjacent segments.
///
/// With both basis functions one at the vertex the kernel is split into a
/// regular part (integrated by the polar transform) and the static singular
/// part (closed form, divergence removed). Other combinations integrate the
/// full kernel by the polar transform.
pub fn hyper_direct_adjacent(
    ctx: &KernelContext,
    pair: &AdjacentPair,
    basis: BasisPair,
    nq: usize,
) -> Result<HypersingularAdjacent> {
    let rule = gl_rule(nq)?;
    let jac = pair.l_m * pair.l_n;
    let nn = dot(pair.normal_m, pair.normal_n);
    let kern = |regular: bool| {
        move |t: f64, tp: f64| {
            let (pm, pn) = pair.basis_values(basis, t, tp);
            let r = pair.separation(t, tp);
            let d = norm(r);
            let (rn, rnp) = (dot(r, pair.normal_m), dot(r, pair.normal_n));
            let k = if regular {
                ctx.d2g_reg_of(d, nn, rn, rnp)
            } else {
                ctx.d2g_of(d, nn, rn, rnp)
            };
            k * (pm * pn * jac)
        }
    };
    if pair.both_at_vertex(basis) {
        let reg = polar_vertex(rule, POLAR_LEVELS, kern(true))?;
        let sing_reg = hyper_adjacent_sing_reg(ctx.kind(), pair.l_m, pair.l_n, pair.theta)?;
        Ok(HypersingularAdjacent { reg, sing_reg })
    } else {
        let reg = polar_vertex(rule, POLAR_LEVELS, kern(false))?;
        Ok(HypersingularAdjacent {
            reg,
            sing_reg: Complex::new(0.0, 0.0),
        })
    }
}

/// Static singular kernel over adjacent segments by the polar transform.
/// Finite only for basis combinations that vanish at the vertex.
pub fn hyper_static_adjacent(
    pair: &AdjacentPair,
    basis: BasisPair,
    kind: HankelKind,
    nq: usize,
) -> Result<Complex> {
    if pair.both_at_vertex(basis) {
        return Err(Error::Argument(
            "static kernel diverges when both basis functions are one at the vertex".into(),
        ));
    }
    let rule = gl_rule(nq)?;
    let jac = pair.l_m * pair.l_n;
    let nn = dot(pair.normal_m, pair.normal_n);
    polar_vertex(rule, POLAR_LEVELS, |t, tp| {
        let (pm, pn) = pair.basis_values(basis, t, tp);
        let r = pair.separation(t, tp);
        d2g_sing_of(kind, norm(r), nn, dot(r, pair.normal_m), dot(r, pair.normal_n)) * (pm * pn * jac)
    })
}

/// Variational hypersingular integral over adjacent segments: the single
/// layer kernel against `k^2 (n . n') p p' - curl p curl p'`. The curl
/// product is a nonzero constant, so every combination has the logarithmic
/// vertex singularity and uses the graded tensor rule.
pub fn hyper_variational_adjacent(
    ctx: &KernelContext,
    pair: &AdjacentPair,
    basis: BasisPair,
    nq: usize,
    levels: usize,
) -> Result<Complex> {
    let rule = gl_rule(nq)?;
    let jac = pair.l_m * pair.l_n;
    let k2nn = ctx.k() * ctx.k() * dot(pair.normal_m, pair.normal_n);
    let (cm, cn) = pair.curls(basis);
    integrate_2d_refined(
        rule,
        |t, tp| {
            let (pm, pn) = pair.basis_values(basis, t, tp);
            ctx.g(norm(pair.separation(t, tp))) * ((k2nn * pm * pn - cm * cn) * jac)
        },
        levels,
    )
}
