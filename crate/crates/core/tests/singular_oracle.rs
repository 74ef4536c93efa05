//! Closed forms and specialised quadratures against the brute-force oracle.

use helmbem_core::geometry::{NodeAt, SegmentGeom};
use helmbem_core::kernels::KernelContext;
use helmbem_core::oracle::{pair_integral, OracleConfig, OracleKernel};
use helmbem_core::singular::{
    double_adjacent, double_adjacent_singular, hyper_adjacent_sing_reg, hyper_direct_adjacent,
    hyper_direct_coincident, hyper_static_adjacent, hyper_variational_adjacent,
    hyper_variational_coincident, single_adjacent, single_coincident, AdjacentPair, BasisPair,
};
use helmbem_core::specfun::HankelKind;
use helmbem_core::Complex;
use std::f64::consts::PI;

const AA: BasisPair = BasisPair { m: NodeAt::A, n: NodeAt::A };
const AB: BasisPair = BasisPair { m: NodeAt::A, n: NodeAt::B };

fn ctx(k: f64, kind: HankelKind) -> KernelContext {
    KernelContext::new(k, kind).unwrap()
}

/// A tilted segment of length `l` away from the origin.
fn segment(l: f64) -> SegmentGeom {
    SegmentGeom::new([0.3, -0.2], [0.3 + 0.6 * l, -0.2 + 0.8 * l]).unwrap()
}

/// The reference adjacent configuration as two segments.
fn corner(lm: f64, ln: f64, theta: f64) -> (SegmentGeom, SegmentGeom) {
    (
        SegmentGeom::new([0.0, 0.0], [lm, 0.0]).unwrap(),
        SegmentGeom::new([ln * theta.cos(), ln * theta.sin()], [0.0, 0.0]).unwrap(),
    )
}

fn oracle(c: &KernelContext, sm: &SegmentGeom, sn: &SegmentGeom, b: BasisPair, k: OracleKernel) -> Complex {
    pair_integral(c, sm, sn, b, k, &OracleConfig::default()).unwrap().value
}

#[test]
fn coincident_single_layer() {
    for kind in [HankelKind::First, HankelKind::Second] {
        for l in [0.05, 2.26, 20.0] {
            let c = ctx(1.0, kind);
            let s = segment(l);
            let cf = single_coincident(&c, l, 20).unwrap();
            assert!((cf.i11 - oracle(&c, &s, &s, AA, OracleKernel::Single)).norm() <= 1e-8, "kl={l}");
            assert!((cf.i12 - oracle(&c, &s, &s, AB, OracleKernel::Single)).norm() <= 1e-8, "kl={l}");
        }
    }
}

#[test]
fn coincident_hypersingular() {
    let c = ctx(1.0, HankelKind::First);
    let s = segment(1.3);
    let d = hyper_direct_coincident(&c, 1.3, 20).unwrap();
    let bb = BasisPair::new(NodeAt::B, NodeAt::B);
    assert!((d.u11_reg - oracle(&c, &s, &s, AA, OracleKernel::Hypersingular)).norm() <= 1e-8);
    assert!((d.u11_reg - oracle(&c, &s, &s, bb, OracleKernel::Hypersingular)).norm() <= 1e-8);
    assert!((d.u12 - oracle(&c, &s, &s, AB, OracleKernel::Hypersingular)).norm() <= 1e-8);
    let (v11, v12) = hyper_variational_coincident(&c, 1.3, 20).unwrap();
    assert!((v11 - oracle(&c, &s, &s, AA, OracleKernel::Variational)).norm() <= 1e-8);
    assert!((v12 - oracle(&c, &s, &s, AB, OracleKernel::Variational)).norm() <= 1e-8);
}

#[test]
fn adjacent_static_closed_form() {
    let c = ctx(1.0, HankelKind::First);
    for (lm, ln, th) in [(1.0, 2.26, PI / 3.0), (2.26, 1.0, 2.0 * PI / 3.0), (1.0, 1.0, 4.5)] {
        let (sm, sn) = corner(lm, ln, th);
        let cf = hyper_adjacent_sing_reg(HankelKind::First, lm, ln, th).unwrap();
        let o = oracle(&c, &sm, &sn, AB, OracleKernel::HypersingularStatic);
        assert!((cf - o).norm() <= 1e-9, "{lm} {ln} {th}: {cf} vs {o}");
        // combinations vanishing at the vertex are finite and need no closed form
        let p = AdjacentPair::canonical(lm, ln, th).unwrap();
        let bb = BasisPair::new(NodeAt::B, NodeAt::B);
        let q = hyper_static_adjacent(&p, bb, HankelKind::First, 20).unwrap();
        let o = oracle(&c, &sm, &sn, bb, OracleKernel::HypersingularStatic);
        assert!((q - o).norm() <= 1e-9);
    }
}

#[test]
fn adjacent_pairs_all_kernels() {
    for kind in [HankelKind::First, HankelKind::Second] {
        for k in [0.3, 6.0] {
            let c = ctx(k, kind);
            let (lm, ln, th) = (1.2, 0.7, 2.0);
            let (sm, sn) = corner(lm, ln, th);
            let p = AdjacentPair::canonical(lm, ln, th).unwrap();
            for b in BasisPair::all() {
                let s = single_adjacent(&c, &p, b, 20, 8).unwrap();
                assert!((s - oracle(&c, &sm, &sn, b, OracleKernel::Single)).norm() <= 1e-7, "S {b:?}");
                let d = double_adjacent(&c, &p, b, 20, false).unwrap();
                assert!((d - oracle(&c, &sm, &sn, b, OracleKernel::Double)).norm() <= 1e-10, "D {b:?}");
                let d = double_adjacent(&c, &p, b, 20, true).unwrap();
                assert!((d - oracle(&c, &sm, &sn, b, OracleKernel::AdjointDouble)).norm() <= 1e-10);
                let h = hyper_direct_adjacent(&c, &p, b, 20).unwrap().total();
                assert!((h - oracle(&c, &sm, &sn, b, OracleKernel::Hypersingular)).norm() <= 1e-9);
                let v = hyper_variational_adjacent(&c, &p, b, 20, 8).unwrap();
                assert!((v - oracle(&c, &sm, &sn, b, OracleKernel::Variational)).norm() <= 1e-9);
            }
        }
    }
}

#[test]
fn transformed_double_layer_converges() {
    let c = ctx(2.0, HankelKind::First);
    for th in [PI / 3.0, PI / 2.0, PI - 0.1] {
        let a = double_adjacent_singular(&c, 1.0, 2.26, th, 20).unwrap();
        let b = double_adjacent_singular(&c, 1.0, 2.26, th, 40).unwrap();
        assert!((a - b).norm() <= 1e-9);
        let (sm, sn) = corner(1.0, 2.26, th);
        assert!((a - oracle(&c, &sm, &sn, AB, OracleKernel::Double)).norm() <= 1e-9);
    }
}

#[test]
fn oracle_is_stable_under_smaller_cutoff() {
    let c = ctx(1.0, HankelKind::First);
    let s = segment(1.0);
    let base = OracleConfig::default();
    let a = pair_integral(&c, &s, &s, AA, OracleKernel::Single, &base).unwrap();
    assert!(a.epsilons_used.len() >= 3);
    let mut finer = base.eps_factors.clone();
    finer.push(finer.last().unwrap() / 2.0);
    let b = pair_integral(&c, &s, &s, AA, OracleKernel::Single, &base.clone().with_eps_factors(finer)).unwrap();
    assert!((a.value - b.value).norm() <= 3.0 * a.est_error.max(1e-14), "{:e} vs {:e}", (a.value - b.value).norm(), a.est_error);
}
