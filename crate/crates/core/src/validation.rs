//! Measurements behind the self-test and the acceptance suite.
//!
//! Each function returns measured errors; callers decide the tolerances.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::assembly::{assemble, compare_methods, AssemblyOptions, Method, Operator};
use crate::error::Result;
use crate::geometry::{Mesh, NodeAt, SegmentGeom};
use crate::io;
use crate::kernels::KernelContext;
use crate::oracle::{pair_integral, OracleConfig, OracleKernel};
use crate::singular::{
    adjoint_double_adjacent_singular, double_adjacent_singular, double_coincident,
    hyper_adjacent_sing_reg, hyper_direct_coincident, hyper_variational_coincident,
    single_coincident, BasisPair,
};
use crate::specfun::{bessel, cal_i0, cal_i1, gamma0, gamma2, hankel, hankel_reg, Family, HankelKind};
use crate::Complex;

/// `kl` values of the coincident checks.
pub const KL_GRID: [f64; 6] = [0.05, 0.5, 1.0, 2.26, 5.0, 20.0];

/// Segment lengths of the adjacent checks.
pub const ADJACENT_LENGTHS: [f64; 2] = [1.0, 2.26];

/// Interior angles of the adjacent checks.
pub const ADJACENT_ANGLES: [f64; 4] = [PI / 3.0, FRAC_PI_2, 2.0 * PI / 3.0, PI - 0.1];

/// Wavenumbers of the direct/variational comparison.
pub const COMPARE_K: [f64; 3] = [0.1, 1.0, 10.0];

const KINDS: [HankelKind; 2] = [HankelKind::First, HankelKind::Second];

/// Regular hexagon with every edge of length 2.26.
pub fn hexagon() -> Mesh {
    Mesh::regular_polygon(6, 2.26).expect("valid hexagon")
}

/// Unit square, the hexagon and an irregular convex octagon.
pub fn test_meshes() -> Vec<(&'static str, Mesh)> {
    let angles = [0.0, 0.7, 1.5, 2.2, 3.0, 3.9, 4.6, 5.5f64];
    let octagon = Mesh::new(angles.iter().map(|a| [1.5 * a.cos(), a.sin()]).collect()).expect("valid octagon");
    vec![
        (
            "square",
            Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).expect("valid square"),
        ),
        ("hexagon", hexagon()),
        ("octagon", octagon),
    ]
}

/// Largest `|N_direct - N_variational|` and largest difference of the
/// imaginary parts over the given wavenumbers.
pub fn method_agreement(mesh: &Mesh, ks: &[f64], kind: HankelKind, opts: AssemblyOptions) -> Result<(f64, f64)> {
    let mut worst = (0.0f64, 0.0f64);
    for &k in ks {
        let c = compare_methods(mesh, &KernelContext::new(k, kind)?, opts)?;
        worst.0 = worst.0.max(c.max_abs_diff);
        worst.1 = worst.1.max(c.max_imag_diff);
    }
    Ok(worst)
}

/// Unit-length tilted segment, and `k = kl`.
fn unit_segment() -> SegmentGeom {
    SegmentGeom::new([0.3, -0.2], [0.9, 0.6]).expect("valid segment")
}

const SAME: BasisPair = BasisPair { m: NodeAt::A, n: NodeAt::A };
const OPPOSITE: BasisPair = BasisPair { m: NodeAt::A, n: NodeAt::B };

fn oracle_value(
    ctx: &KernelContext,
    sm: &SegmentGeom,
    sn: &SegmentGeom,
    basis: BasisPair,
    kernel: OracleKernel,
    cfg: &OracleConfig,
) -> Result<Complex> {
    Ok(pair_integral(ctx, sm, sn, basis, kernel, cfg)?.value)
}

/// Largest error of `I11`, `I12` against the oracle over `kl`, both kinds.
pub fn coincident_single_error(kls: &[f64], cfg: &OracleConfig) -> Result<f64> {
    let s = unit_segment();
    let mut worst: f64 = 0.0;
    for kind in KINDS {
        for &kl in kls {
            let c = KernelContext::new(kl, kind)?;
            let cf = single_coincident(&c, 1.0, 20)?;
            worst = worst.max((cf.i11 - oracle_value(&c, &s, &s, SAME, OracleKernel::Single, cfg)?).norm());
            worst = worst.max((cf.i12 - oracle_value(&c, &s, &s, OPPOSITE, OracleKernel::Single, cfg)?).norm());
        }
    }
    Ok(worst)
}

/// Largest errors of the direct (regularized) and variational coincident
/// hypersingular integrals against the oracle.
pub fn coincident_hyper_error(kls: &[f64], cfg: &OracleConfig) -> Result<(f64, f64)> {
    let s = unit_segment();
    let (mut direct, mut var): (f64, f64) = (0.0, 0.0);
    for kind in KINDS {
        for &kl in kls {
            let c = KernelContext::new(kl, kind)?;
            let d = hyper_direct_coincident(&c, 1.0, 20)?;
            direct = direct.max((d.u11_reg - oracle_value(&c, &s, &s, SAME, OracleKernel::Hypersingular, cfg)?).norm());
            direct = direct.max((d.u12 - oracle_value(&c, &s, &s, OPPOSITE, OracleKernel::Hypersingular, cfg)?).norm());
            let (v11, v12) = hyper_variational_coincident(&c, 1.0, 20)?;
            var = var.max((v11 - oracle_value(&c, &s, &s, SAME, OracleKernel::Variational, cfg)?).norm());
            var = var.max((v12 - oracle_value(&c, &s, &s, OPPOSITE, OracleKernel::Variational, cfg)?).norm());
        }
    }
    Ok((direct, var))
}

/// The two segments of the reference adjacent configuration.
fn corner(lm: f64, ln: f64, theta: f64) -> Result<(SegmentGeom, SegmentGeom)> {
    Ok((
        SegmentGeom::new([0.0, 0.0], [lm, 0.0])?,
        SegmentGeom::new([ln * theta.cos(), ln * theta.sin()], [0.0, 0.0])?,
    ))
}

fn adjacent_grid() -> impl Iterator<Item = (f64, f64, f64)> {
    ADJACENT_LENGTHS.into_iter().flat_map(|lm| {
        ADJACENT_LENGTHS
            .into_iter()
            .flat_map(move |ln| ADJACENT_ANGLES.into_iter().map(move |th| (lm, ln, th)))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdjacentStaticReport {
    pub oracle_error: f64,
    pub swap_error: f64,
    /// Jump across `theta = pi/2` over a `2e-12` interval.
    pub continuity_jump: f64,
}

pub fn adjacent_static_report(cfg: &OracleConfig) -> Result<AdjacentStaticReport> {
    let mut r = AdjacentStaticReport {
        oracle_error: 0.0,
        swap_error: 0.0,
        continuity_jump: 0.0,
    };
    for kind in KINDS {
        let c = KernelContext::new(1.0, kind)?;
        for (lm, ln, th) in adjacent_grid() {
            let cf = hyper_adjacent_sing_reg(kind, lm, ln, th)?;
            let (sm, sn) = corner(lm, ln, th)?;
            let o = oracle_value(&c, &sm, &sn, OPPOSITE, OracleKernel::HypersingularStatic, cfg)?;
            r.oracle_error = r.oracle_error.max((cf - o).norm());
            let sw = hyper_adjacent_sing_reg(kind, ln, lm, th)?;
            r.swap_error = r.swap_error.max((cf - sw).norm());
            let lo = hyper_adjacent_sing_reg(kind, lm, ln, FRAC_PI_2 - 1e-12)?;
            let hi = hyper_adjacent_sing_reg(kind, lm, ln, FRAC_PI_2 + 1e-12)?;
            r.continuity_jump = r.continuity_jump.max((hi - lo).norm());
        }
    }
    Ok(r)
}

/// Largest error of the transformed double and adjoint double layer
/// integrals against the oracle, and largest change from 20 to 40 points.
pub fn transformed_double_report(k: f64, cfg: &OracleConfig) -> Result<(f64, f64)> {
    let (mut err, mut conv): (f64, f64) = (0.0, 0.0);
    for kind in KINDS {
        let c = KernelContext::new(k, kind)?;
        for (lm, ln, th) in adjacent_grid() {
            let (sm, sn) = corner(lm, ln, th)?;
            let d20 = double_adjacent_singular(&c, lm, ln, th, 20)?;
            let d40 = double_adjacent_singular(&c, lm, ln, th, 40)?;
            err = err.max((d20 - oracle_value(&c, &sm, &sn, OPPOSITE, OracleKernel::Double, cfg)?).norm());
            conv = conv.max((d20 - d40).norm());
            let a20 = adjoint_double_adjacent_singular(&c, lm, ln, th, 20)?;
            let a40 = adjoint_double_adjacent_singular(&c, lm, ln, th, 40)?;
            err = err.max((a20 - oracle_value(&c, &sm, &sn, OPPOSITE, OracleKernel::AdjointDouble, cfg)?).norm());
            conv = conv.max((a20 - a40).norm());
        }
    }
    Ok((err, conv))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    /// Largest `|value|` of a coincident double-layer block.
    pub coincident_double: f64,
    /// `|I11 - I22| + |I12 - I21|`.
    pub coincident_symmetry: f64,
    /// Largest relative `|u11 + u12 - k^2 (I11 + I12)|`.
    pub variational_sum: f64,
    /// Largest relative asymmetry of S and N over the test meshes.
    pub operator_symmetry: f64,
    /// Largest relative `|Dadj - D^T|` over the test meshes.
    pub adjointness: f64,
}

pub fn identity_report(opts: AssemblyOptions) -> Result<IdentityReport> {
    let mut r = IdentityReport {
        coincident_double: double_coincident().norm(),
        coincident_symmetry: 0.0,
        variational_sum: 0.0,
        operator_symmetry: 0.0,
        adjointness: 0.0,
    };
    for kind in KINDS {
        for kl in KL_GRID {
            let c = KernelContext::new(kl, kind)?;
            let s = single_coincident(&c, 1.0, opts.nq)?;
            r.coincident_symmetry = r
                .coincident_symmetry
                .max((s.i11 - s.i22()).norm() + (s.i12 - s.i21()).norm());
            let (u11, u12) = hyper_variational_coincident(&c, 1.0, opts.nq)?;
            let rhs = (s.i11 + s.i12) * (kl * kl);
            r.variational_sum = r.variational_sum.max((u11 + u12 - rhs).norm() / rhs.norm().max(1.0));
        }
    }
    for (_, mesh) in test_meshes() {
        for k in COMPARE_K {
            let c = KernelContext::new(k, HankelKind::First)?;
            for (op, m) in [
                (Operator::S, Method::NotApplicable),
                (Operator::N, Method::Direct),
                (Operator::N, Method::Variational),
            ] {
                let a = assemble(&mesh, op, m, &c, opts)?;
                r.operator_symmetry = r.operator_symmetry.max(a.max_abs_diff(&a.transpose())? / a.max_abs());
            }
            let d = assemble(&mesh, Operator::D, Method::NotApplicable, &c, opts)?;
            let da = assemble(&mesh, Operator::Dadj, Method::NotApplicable, &c, opts)?;
            r.adjointness = r.adjointness.max(da.max_abs_diff(&d.transpose())? / d.max_abs());
        }
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecfunReport {
    /// Largest `|calI0|`, `|calI1|` at `sigma = 1e-12`.
    pub small_sigma: f64,
    /// Largest relative residual of `H0 + H2 = (2/z) H1` on `[0.01, 100]`.
    pub hankel_recurrence: f64,
    /// Largest `|H_{-1} + H_1 - 2/pi|` of the Struve functions on `[0.01, 100]`.
    pub struve_recurrence: f64,
    /// Largest mismatch between second-kind values and conjugated
    /// first-kind values.
    pub conjugation: f64,
}

pub fn specfun_report() -> Result<SpecfunReport> {
    let mut r = SpecfunReport {
        small_sigma: 0.0,
        hankel_recurrence: 0.0,
        struve_recurrence: 0.0,
        conjugation: 0.0,
    };
    for kind in KINDS {
        r.small_sigma = r.small_sigma.max(cal_i0(kind, 1e-12)?.norm()).max(cal_i1(kind, 1e-12)?.norm());
    }
    let samples = 400;
    for i in 0..=samples {
        let z = 0.01 * 1e4f64.powf(i as f64 / samples as f64);
        for kind in KINDS {
            let (h0, h1, h2) = (hankel(kind, 0, z)?, hankel(kind, 1, z)?, hankel(kind, 2, z)?);
            r.hankel_recurrence = r.hankel_recurrence.max((h0 + h2 - h1 * (2.0 / z)).norm() / (h1 * (2.0 / z)).norm());
        }
        let s = bessel(Family::Struve, -1, z)? + bessel(Family::Struve, 1, z)?;
        r.struve_recurrence = r.struve_recurrence.max((s - FRAC_2_PI).abs());
        let (a, b) = (HankelKind::First, HankelKind::Second);
        let mut conj = 0.0f64;
        for n in 0..=2 {
            conj = conj.max((hankel(a, n, z)?.conj() - hankel(b, n, z)?).norm());
        }
        for n in 1..=2 {
            conj = conj.max((hankel_reg(a, n, z)?.conj() - hankel_reg(b, n, z)?).norm());
        }
        conj = conj.max((cal_i0(a, z)?.conj() - cal_i0(b, z)?).norm());
        conj = conj.max((cal_i1(a, z)?.conj() - cal_i1(b, z)?).norm());
        let s = z.min(30.0);
        conj = conj.max((gamma0(a, s, 20)?.conj() - gamma0(b, s, 20)?).norm());
        conj = conj.max((gamma2(a, s, 20)?.conj() - gamma2(b, s, 20)?).norm());
        r.conjugation = r.conjugation.max(conj);
    }
    Ok(r)
}

/// Largest relative deviation of `A(s mesh, k/s)` from `s^power A(mesh, k)`.
pub fn scaling_error(mesh: &Mesh, op: Operator, method: Method, k: f64, s: f64, power: i32, opts: AssemblyOptions) -> Result<f64> {
    let a = assemble(mesh, op, method, &KernelContext::new(k, HankelKind::First)?, opts)?;
    let b = assemble(&mesh.scaled(s)?, op, method, &KernelContext::new(k / s, HankelKind::First)?, opts)?;
    let f = s.powi(power);
    let worst = a
        .entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| (y - x * f).norm())
        .fold(0.0, f64::max);
    Ok(worst / (a.max_abs() * f))
}

/// True if two assemblies of every operator serialize identically.
pub fn deterministic(mesh: &Mesh, k: f64, opts: AssemblyOptions) -> Result<bool> {
    let c = KernelContext::new(k, HankelKind::First)?;
    for (op, m) in [
        (Operator::S, Method::NotApplicable),
        (Operator::D, Method::NotApplicable),
        (Operator::Dadj, Method::NotApplicable),
        (Operator::N, Method::Direct),
        (Operator::N, Method::Variational),
    ] {
        let a = io::to_csv(&assemble(mesh, op, m, &c, opts)?);
        let b = io::to_csv(&assemble(mesh, op, m, &c, opts)?);
        if a != b {
            return Ok(false);
        }
    }
    Ok(true)
}
