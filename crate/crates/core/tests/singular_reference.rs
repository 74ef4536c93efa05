//! Coincident closed forms against 20-digit values of the double integrals,
//! reduced to one dimension in the separation `s = |x - y|` and evaluated
//! by tanh-sinh quadrature (mpmath), frozen here.

use helmbem_core::kernels::KernelContext;
use helmbem_core::singular::{hyper_variational_coincident, single_coincident};
use helmbem_core::specfun::HankelKind;
use helmbem_core::Complex;

type Row = (f64, f64, [(f64, f64); 4]);

/// `(k, l, [I11, I12, u11, u12])` for Hankel functions of the first kind.
const REFERENCE: [Row; 4] = [
    (1.0, 1.0, [
        (0.072223858629569115, 0.06079605656882104),
        (0.050895223289109816, 0.05912389951738564),
        (-0.17401430520778875, -0.17904385560359232),
        (0.29713338712646768, 0.298963811689799),
    ]),
    (2.0, 2.26, [
        (0.050726909325367941, 0.19306898246641433),
        (-0.019146089903503824, 0.1097389464407011),
        (0.19054143030724194, 0.65370441725420949),
        (-0.064218152619785474, 0.55752729837425222),
    ]),
    (0.5, 0.1, [
        (0.0019342602329142273, 0.00062495659925666688),
        (0.0017351960491986411, 0.00062491320054771787),
        (-0.73340769136434513, -0.24981772081106278),
        (0.73432505543487334, 0.25013018826101388),
    ]),
    (7.0, 1.5, [
        (0.0035148774958193978, 0.035769610793466147),
        (-0.00049717353678147596, 0.019015566336188847),
        (0.16954659377600567, 1.7040129936534812),
        (-0.021679099783147503, 0.98046068569961351),
    ]),
];

#[test]
fn coincident_values_match_reference() {
    for (k, l, want) in REFERENCE {
        let c = KernelContext::new(k, HankelKind::First).unwrap();
        let s = single_coincident(&c, l, 20).unwrap();
        let (u11, u12) = hyper_variational_coincident(&c, l, 20).unwrap();
        let got = [s.i11, s.i12, u11, u12];
        let tols = [1e-13, 1e-13, 1e-10, 1e-10];
        for ((g, w), tol) in got.iter().zip(want).zip(tols) {
            let w = Complex::new(w.0, w.1);
            assert!((g - w).norm() <= tol * w.norm().max(1.0), "k={k} l={l}: {g} vs {w}");
        }
    }
}
