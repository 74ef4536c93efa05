//! Pointwise 2D Helmholtz kernel `g = (i/4) H0(kR)` and its normal
//! derivatives, with `R = r - r'`.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::geometry::{dot, norm, sub, Point};
use crate::specfun::{j0, j1, j2, y0, y1, y1_reg, y2, y2_reg, HankelKind};
use crate::Complex;

/// Points closer than `COINCIDENCE_TOL * scale` are treated as coincident.
pub const COINCIDENCE_TOL: f64 = 1e-14;

/// Wavenumber, Hankel kind and the length scale used by the
/// coincident-point guard.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelContext {
    k: f64,
    kind: HankelKind,
    scale: f64,
}

impl KernelContext {
    pub fn new(k: f64, kind: HankelKind) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Argument(format!("wavenumber must be finite and > 0, got {k}")));
        }
        Ok(KernelContext { k, kind, scale: 1.0 })
    }

    /// Sets the length scale of the coincident-point guard, typically the
    /// mesh diameter.
    pub fn with_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Argument(format!("scale must be finite and > 0, got {scale}")));
        }
        self.scale = scale;
        Ok(self)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn kind(&self) -> HankelKind {
        self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn separation(&self, func: &'static str, r: Point, rp: Point) -> Result<(Point, f64)> {
        let rv = sub(r, rp);
        let d = norm(rv);
        if !d.is_finite() {
            return Err(domain(func, "non-finite point coordinates"));
        }
        if d < COINCIDENCE_TOL * self.scale {
            return Err(domain(func, format!("coincident points {r:?} and {rp:?}")));
        }
        Ok((rv, d))
    }

    #[inline]
    fn h0(&self, x: f64) -> Complex {
        self.kind.combine(j0(x), y0(x))
    }

    #[inline]
    fn h1(&self, x: f64) -> Complex {
        self.kind.combine(j1(x), y1(x))
    }

    #[inline]
    fn h2(&self, x: f64) -> Complex {
        self.kind.combine(j2(x), y2(x))
    }

    /// `g` as a function of the separation vector.
    #[inline]
    pub(crate) fn g(&self, d: f64) -> Complex {
        Complex::new(0.0, 0.25) * self.h0(self.k * d)
    }

    /// `dg/dn'` with `rn_p = R . n'`.
    #[inline]
    pub(crate) fn dg_dnp_of(&self, d: f64, rn_p: f64) -> Complex {
        Complex::new(0.0, 0.25 * self.k * rn_p / d) * self.h1(self.k * d)
    }

    /// Full second normal derivative for separation `d`, `nn = n . n'`,
    /// `rn = R . n`, `rn_p = R . n'`.
    #[inline]
    pub(crate) fn d2g_of(&self, d: f64, nn: f64, rn: f64, rn_p: f64) -> Complex {
        let x = self.k * d;
        let pre = Complex::new(0.0, 0.25 * self.k / (d * d));
        pre * (self.h1(x) * (d * nn) - self.h2(x) * (self.k * rn * rn_p))
    }

    /// Regular part of the second normal derivative, with the poles of `H1`
    /// and `H2` removed.
    #[inline]
    pub(crate) fn d2g_reg_of(&self, d: f64, nn: f64, rn: f64, rn_p: f64) -> Complex {
        let x = self.k * d;
        let h1 = self.kind.combine(j1(x), y1_reg(x));
        let h2 = self.kind.combine(j2(x), y2_reg(x));
        Complex::new(0.0, 0.25 * self.k * self.k) * (h1 * (nn / x) - h2 * (rn * rn_p / (d * d)))
    }
}

/// Static (`k`-independent) singular part `±(1/2pi)[n.n'/R^2 - 2 (R.n)(R.n')/R^4]`.
#[inline]
pub(crate) fn d2g_sing_of(kind: HankelKind, d: f64, nn: f64, rn: f64, rn_p: f64) -> Complex {
    let d2 = d * d;
    Complex::new(kind.sign() / (2.0 * PI) * (nn / d2 - 2.0 * rn * rn_p / (d2 * d2)), 0.0)
}

/// `g(r, r') = (i/4) H0(k |r - r'|)`.
pub fn green(ctx: &KernelContext, r: Point, rp: Point) -> Result<Complex> {
    let (_, d) = ctx.separation("green", r, rp)?;
    Ok(ctx.g(d))
}

/// `dg/dn' = (ik/4R) H1(kR) (R . n')`, normal taken at the source `rp`.
pub fn dg_dnp(ctx: &KernelContext, r: Point, rp: Point, np: Point) -> Result<Complex> {
    let (rv, d) = ctx.separation("dg_dnp", r, rp)?;
    Ok(ctx.dg_dnp_of(d, dot(rv, np)))
}

/// `dg/dn = -(ik/4R) H1(kR) (R . n)`, normal taken at the observation point `r`.
pub fn dg_dn(ctx: &KernelContext, r: Point, rp: Point, n: Point) -> Result<Complex> {
    let (rv, d) = ctx.separation("dg_dn", r, rp)?;
    Ok(-ctx.dg_dnp_of(d, dot(rv, n)))
}

/// `d2g/dn dn' = (ik/4R^2)[R H1(kR)(n . n') - k H2(kR)(R . n)(R . n')]`.
pub fn d2g_dndnp(ctx: &KernelContext, r: Point, rp: Point, n: Point, np: Point) -> Result<Complex> {
    let (rv, d) = ctx.separation("d2g_dndnp", r, rp)?;
    Ok(ctx.d2g_of(d, dot(n, np), dot(rv, n), dot(rv, np)))
}

/// Regular part `(ik^2/4)[H~1(kR)/(kR) (n . n') - H~2(kR)(R . n)(R . n')/R^2]`
/// of [`d2g_dndnp`]; it has only a logarithmic singularity at `R = 0`.
pub fn d2g_dndnp_regular(
    ctx: &KernelContext,
    r: Point,
    rp: Point,
    n: Point,
    np: Point,
) -> Result<Complex> {
    let (rv, d) = ctx.separation("d2g_dndnp_regular", r, rp)?;
    Ok(ctx.d2g_reg_of(d, dot(n, np), dot(rv, n), dot(rv, np)))
}

/// Singular part of [`d2g_dndnp`]; the two parts add up to the full kernel.
pub fn d2g_dndnp_singular(
    ctx: &KernelContext,
    r: Point,
    rp: Point,
    n: Point,
    np: Point,
) -> Result<Complex> {
    let (rv, d) = ctx.separation("d2g_dndnp_singular", r, rp)?;
    Ok(d2g_sing_of(ctx.kind, d, dot(n, np), dot(rv, n), dot(rv, np)))
}
