//! Kernel derivatives against central finite differences of `g`.

use helmbem_core::kernels::{d2g_dndnp, dg_dn, dg_dnp, green, KernelContext};
use helmbem_core::specfun::HankelKind;
use helmbem_core::Complex;
use proptest::prelude::*;

const H: f64 = 1e-5;

fn shift(p: [f64; 2], d: [f64; 2], s: f64) -> [f64; 2] {
    [p[0] + s * d[0], p[1] + s * d[1]]
}

fn unit(a: f64) -> [f64; 2] {
    [a.cos(), a.sin()]
}

fn fd_dnp(c: &KernelContext, r: [f64; 2], rp: [f64; 2], np: [f64; 2]) -> Complex {
    (green(c, r, shift(rp, np, H)).unwrap() - green(c, r, shift(rp, np, -H)).unwrap()) / (2.0 * H)
}

#[test]
fn first_derivatives_match_finite_differences() {
    for kind in [HankelKind::First, HankelKind::Second] {
        for k in [0.5, 2.0, 9.0] {
            let c = KernelContext::new(k, kind).unwrap();
            let (r, rp) = ([0.4, 1.1], [-0.3, 0.2]);
            let (n, np) = (unit(0.3), unit(2.1));
            let exact = dg_dnp(&c, r, rp, np).unwrap();
            let fd = fd_dnp(&c, r, rp, np);
            assert!((exact - fd).norm() <= 1e-7 * exact.norm().max(1.0), "dg/dn' k={k}");
            let exact = dg_dn(&c, r, rp, n).unwrap();
            let fd = (green(&c, shift(r, n, H), rp).unwrap() - green(&c, shift(r, n, -H), rp).unwrap()) / (2.0 * H);
            assert!((exact - fd).norm() <= 1e-7 * exact.norm().max(1.0), "dg/dn k={k}");
        }
    }
}

#[test]
fn second_derivative_matches_finite_differences() {
    for kind in [HankelKind::First, HankelKind::Second] {
        for k in [0.5, 2.0, 9.0] {
            let c = KernelContext::new(k, kind).unwrap();
            let (r, rp) = ([0.4, 1.1], [-0.3, 0.2]);
            let (n, np) = (unit(0.3), unit(2.1));
            let exact = d2g_dndnp(&c, r, rp, n, np).unwrap();
            let fd = (dg_dnp(&c, shift(r, n, H), rp, np).unwrap() - dg_dnp(&c, shift(r, n, -H), rp, np).unwrap())
                / (2.0 * H);
            assert!((exact - fd).norm() <= 1e-7 * exact.norm().max(1.0), "k={k}: {exact} vs {fd}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn adjoint_and_swap_symmetry(
        x in -3.0f64..3.0, y in -3.0f64..3.0, a in 0.0f64..6.3, b in 0.0f64..6.3, k in 0.05f64..20.0,
    ) {
        let c = KernelContext::new(k, HankelKind::First).unwrap();
        let (r, rp) = ([x, y], [0.1, -0.2]);
        prop_assume!((x - 0.1).hypot(y + 0.2) > 1e-3);
        let (n, np) = (unit(a), unit(b));
        prop_assert_eq!(green(&c, r, rp).unwrap(), green(&c, rp, r).unwrap());
        // dg/dn at r equals dg/dn' with the roles of the points exchanged
        let lhs = dg_dn(&c, r, rp, n).unwrap();
        let rhs = dg_dnp(&c, rp, r, n).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-14 * lhs.norm().max(1e-300));
        let lhs = d2g_dndnp(&c, r, rp, n, np).unwrap();
        let rhs = d2g_dndnp(&c, rp, r, np, n).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-13 * lhs.norm().max(1e-300));
    }
}
