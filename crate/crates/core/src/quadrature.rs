//! Gauss–Legendre rules and the 1D/2D integration drivers built on them.
//!
//! Every driver evaluates the integrand strictly inside the integration
//! interval, so integrable endpoint singularities (logarithms at a shared
//! vertex, for example) are never sampled.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::Complex;

/// Largest supported rule order.
pub const MAX_ORDER: usize = 128;

/// Default number of Gauss points per direction.
pub const DEFAULT_ORDER: usize = 20;

/// Ratio between consecutive panels of a geometrically graded mesh.
///
/// Each refinement level shrinks the panel touching the singular endpoint by
/// this factor, so the innermost panel has width `GRADING_RATIO^levels`
/// relative to the interval.
pub const GRADING_RATIO: f64 = 0.15;

/// Gauss–Legendre nodes and weights on the reference interval `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadRule {
    /// Computes the `n`-point rule by Newton iteration on the Legendre
    /// polynomial, starting from the Chebyshev-like guesses
    /// `cos(pi (i + 3/4) / (n + 1/2))`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_ORDER {
            return Err(Error::Argument(format!(
                "Gauss-Legendre order must be in 1..={MAX_ORDER}, got {n}"
            )));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // Guesses run from the right end; store ascending and mirror.
            nodes[n - 1 - i] = x;
            nodes[i] = -x;
            weights[n - 1 - i] = w;
            weights[i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to `[a, b]`, weights including the Jacobian.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let (p, pm1) = if n == 1 { (x, 1.0) } else { (p1, p0) };
    let d = n as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, d)
}

static RULES: [OnceLock<QuadRule>; MAX_ORDER + 1] = [const { OnceLock::new() }; MAX_ORDER + 1];

/// Returns the cached `n`-point Gauss–Legendre rule.
///
/// Rules are built on first use and never modified afterwards, so the
/// returned reference can be shared freely between threads.
pub fn gl_rule(n: usize) -> Result<&'static QuadRule> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::Argument(format!(
            "Gauss-Legendre order must be in 1..={MAX_ORDER}, got {n}"
        )));
    }
    Ok(RULES[n].get_or_init(|| QuadRule::new(n).expect("order checked above")))
}

fn check(node: usize, x: &[f64], v: Complex) -> Result<Complex> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite {
            node,
            x: x.to_vec(),
        })
    }
}

/// Integrates `f` over `[a, b]` with the affine image of `rule`.
pub fn integrate_1d<F>(rule: &QuadRule, a: f64, b: f64, mut f: F) -> Result<Complex>
where
    F: FnMut(f64) -> Complex,
{
    if !(a <= b) {
        return Err(Error::Argument(format!("interval [{a}, {b}] is reversed")));
    }
    let mut sum = Complex::new(0.0, 0.0);
    for (i, (x, w)) in rule.mapped(a, b).enumerate() {
        sum += w * check(i, &[x], f(x))?;
    }
    Ok(sum)
}

/// Breakpoints `a = x_0 < x_1 < ... < x_{levels+1} = b` of a geometric mesh
/// clustering toward `a`.
pub fn graded_breakpoints(a: f64, b: f64, levels: usize) -> Vec<f64> {
    let mut pts = Vec::with_capacity(levels + 2);
    pts.push(a);
    for j in (1..=levels).rev() {
        pts.push(a + (b - a) * GRADING_RATIO.powi(j as i32));
    }
    pts.push(b);
    pts
}

/// Composite rule on a geometric mesh graded toward the endpoint `a`.
///
/// `levels = 0` reproduces [`integrate_1d`]. Each extra level splits the
/// panel touching `a` at `GRADING_RATIO` of its width, so an integrable
/// singularity at `a` (logarithmic or algebraic) converges geometrically in
/// the number of levels.
pub fn integrate_1d_refined<F>(
    rule: &QuadRule,
    a: f64,
    b: f64,
    mut f: F,
    levels: usize,
) -> Result<Complex>
where
    F: FnMut(f64) -> Complex,
{
    if !(a <= b) {
        return Err(Error::Argument(format!("interval [{a}, {b}] is reversed")));
    }
    let pts = graded_breakpoints(a, b, levels);
    let mut sum = Complex::new(0.0, 0.0);
    let mut node = 0;
    for win in pts.windows(2) {
        for (x, w) in rule.mapped(win[0], win[1]) {
            sum += w * check(node, &[x], f(x))?;
            node += 1;
        }
    }
    Ok(sum)
}

/// Tensor-product rule on the unit square `[0, 1]^2`.
pub fn integrate_2d<F>(rule: &QuadRule, mut f: F) -> Result<Complex>
where
    F: FnMut(f64, f64) -> Complex,
{
    let mut sum = Complex::new(0.0, 0.0);
    let mut node = 0;
    for (u, wu) in rule.mapped(0.0, 1.0) {
        for (v, wv) in rule.mapped(0.0, 1.0) {
            sum += wu * wv * check(node, &[u, v], f(u, v))?;
            node += 1;
        }
    }
    Ok(sum)
}

/// Tensor product of two graded rules on `[0, 1]^2`, both clustering
/// toward the origin.
pub fn integrate_2d_refined<F>(rule: &QuadRule, mut f: F, levels: usize) -> Result<Complex>
where
    F: FnMut(f64, f64) -> Complex,
{
    let pts = graded_breakpoints(0.0, 1.0, levels);
    let mut sum = Complex::new(0.0, 0.0);
    let mut node = 0;
    for pu in pts.windows(2) {
        for (u, wu) in rule.mapped(pu[0], pu[1]) {
            for pv in pts.windows(2) {
                for (v, wv) in rule.mapped(pv[0], pv[1]) {
                    sum += wu * wv * check(node, &[u, v], f(u, v))?;
                    node += 1;
                }
            }
        }
    }
    Ok(sum)
}

/// Real-valued composite rule: `panels` equal panels on `[a, b]`, the first
/// one additionally graded toward `a` with `levels` levels.
pub(crate) fn composite_real<F>(
    rule: &QuadRule,
    a: f64,
    b: f64,
    panels: usize,
    levels: usize,
    mut f: F,
) -> f64
where
    F: FnMut(f64) -> f64,
{
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let lo = a + h * p as f64;
        let hi = if p + 1 == panels { b } else { lo + h };
        let pts = if p == 0 {
            graded_breakpoints(lo, hi, levels)
        } else {
            vec![lo, hi]
        };
        for win in pts.windows(2) {
            for (x, w) in rule.mapped(win[0], win[1]) {
                sum += w * f(x);
            }
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn midpoint_and_two_point_rules() {
        let r1 = QuadRule::new(1).unwrap();
        assert_eq!(r1.nodes(), &[0.0]);
        assert_eq!(r1.weights(), &[2.0]);

        let r2 = QuadRule::new(2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(r2.nodes()[0], -s, epsilon = 1e-15);
        assert_abs_diff_eq!(r2.nodes()[1], s, epsilon = 1e-15);
        assert_abs_diff_eq!(r2.weights()[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r2.weights()[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn order_out_of_range() {
        assert!(QuadRule::new(0).is_err());
        assert!(QuadRule::new(MAX_ORDER + 1).is_err());
        assert!(gl_rule(0).is_err());
        assert!(gl_rule(MAX_ORDER).is_ok());
    }

    #[test]
    fn nodes_sorted_and_symmetric() {
        for n in [1, 2, 3, 7, 20, 33, 64, 128] {
            let r = gl_rule(n).unwrap();
            let x = r.nodes();
            let w = r.weights();
            assert!(x.windows(2).all(|p| p[0] < p[1]), "n = {n}");
            for i in 0..n {
                assert_eq!(x[i], -x[n - 1 - i]);
                assert_eq!(w[i], w[n - 1 - i]);
                assert!(w[i] > 0.0);
                assert!(x[i] > -1.0 && x[i] < 1.0);
            }
            let total: f64 = w.iter().sum();
            assert_abs_diff_eq!(total, 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn polynomial_exactness() {
        for n in [1, 2, 5, 20, 40, 128] {
            let r = gl_rule(n).unwrap();
            for k in 0..2 * n {
                let q: f64 = r
                    .nodes()
                    .iter()
                    .zip(r.weights())
                    .map(|(x, w)| w * x.powi(k as i32))
                    .sum();
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert_abs_diff_eq!(q, exact, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn degree_38_monomial_with_twenty_points() {
        let r = gl_rule(20).unwrap();
        let v = integrate_1d(r, -1.0, 1.0, |x| Complex::new(x.powi(38), 0.0)).unwrap();
        assert_abs_diff_eq!(v.re, 2.0 / 39.0, epsilon = 1e-15);
    }

    #[test]
    fn simple_1d_integrals() {
        let r = gl_rule(20).unwrap();
        let one = integrate_1d(r, 0.0, 1.0, |_| Complex::new(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(one.re, 1.0, epsilon = 1e-15);
        let s = integrate_1d(r, 0.0, PI, |x| Complex::new(x.sin(), 0.0)).unwrap();
        assert_abs_diff_eq!(s.re, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn log_endpoint_needs_refinement() {
        let r = gl_rule(20).unwrap();
        let log = |x: f64| Complex::new(x.ln(), 0.0);
        let plain = integrate_1d(r, 0.0, 1.0, log).unwrap();
        let err = (plain.re + 1.0).abs();
        assert!(err > 1e-4 && err < 1e-2, "plain error {err}");
        let refined = integrate_1d_refined(r, 0.0, 1.0, log, 10).unwrap();
        assert_abs_diff_eq!(refined.re, -1.0, epsilon = 1e-9);
    }

    #[test]
    fn zero_levels_matches_plain_rule() {
        let r = gl_rule(20).unwrap();
        let f = |x: f64| Complex::new(x.cos(), x * x);
        let a = integrate_1d(r, 0.3, 2.0, f).unwrap();
        let b = integrate_1d_refined(r, 0.3, 2.0, f, 0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn refinement_error_decreases_monotonically() {
        let r = gl_rule(20).unwrap();
        let mut last = f64::INFINITY;
        for levels in 0..12 {
            let v = integrate_1d_refined(r, 0.0, 1.0, |x| Complex::new(x.ln(), 0.0), levels)
                .unwrap();
            let err = (v.re + 1.0).abs();
            assert!(err < last, "levels {levels}: {err} !< {last}");
            last = err;
        }
    }

    #[test]
    fn non_finite_value_is_reported() {
        let r = gl_rule(4).unwrap();
        let e = integrate_1d(r, 0.0, 1.0, |x| {
            if x > 0.5 {
                Complex::new(f64::NAN, 0.0)
            } else {
                Complex::new(1.0, 0.0)
            }
        })
        .unwrap_err();
        assert!(matches!(e, Error::NonFinite { node: 2, .. }), "{e:?}");
    }

    #[test]
    fn unit_square_integrals() {
        let r = gl_rule(20).unwrap();
        let one = integrate_2d(r, |_, _| Complex::new(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(one.re, 1.0, epsilon = 1e-14);
        let uv = integrate_2d(r, |u, v| Complex::new(u * v, 0.0)).unwrap();
        assert_abs_diff_eq!(uv.re, 0.25, epsilon = 1e-15);
        let graded = integrate_2d_refined(r, |u, v| Complex::new(u * v, 0.0), 6).unwrap();
        assert_abs_diff_eq!(graded.re, 0.25, epsilon = 1e-14);
    }

    #[test]
    fn smooth_2d_integrand_against_closed_form() {
        // int_0^1 int_0^1 exp(-(u^2 + v^2)) = (sqrt(pi)/2 erf(1))^2
        let erf1 = 0.842_700_792_949_714_9_f64;
        let exact = (PI.sqrt() / 2.0 * erf1).powi(2);
        let r = gl_rule(20).unwrap();
        let v = integrate_2d(r, |u, v| Complex::new((-(u * u + v * v)).exp(), 0.0)).unwrap();
        assert_abs_diff_eq!(v.re, exact, epsilon = 1e-14);
    }
}
