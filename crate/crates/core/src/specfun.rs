//! Real-argument Bessel, Hankel and Struve functions, and the integrated
//! Hankel primitives used by the coincident-segment formulas.
//!
//! `J0, J1, Y0, Y1` come from `libm`. Order two follows from the three-term
//! recurrence (with an ascending series for `J2` at small argument, where the
//! recurrence cancels). Struve functions are evaluated from their Poisson
//! integral with a composite Gauss–Legendre rule, which is accurate to a few
//! ulps over the whole range used here.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::{composite_real, gl_rule};
use crate::Complex;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this argument `calI0` switches to its two-term expansion.
pub const SMALL_SIGMA: f64 = 1e-8;

/// Which Hankel function family is used throughout.
///
/// `First` selects `H^(1) = J + iY` and the upper sign of every `±`/`∓`
/// expression, `Second` selects `H^(2) = J - iY` and the lower sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum HankelKind {
    #[default]
    First,
    Second,
}

impl HankelKind {
    /// `+1` for the first kind, `-1` for the second.
    pub fn sign(self) -> f64 {
        match self {
            HankelKind::First => 1.0,
            HankelKind::Second => -1.0,
        }
    }

    /// Numeric label used on the command line and in file headers.
    pub fn index(self) -> u8 {
        match self {
            HankelKind::First => 1,
            HankelKind::Second => 2,
        }
    }

    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(HankelKind::First),
            2 => Ok(HankelKind::Second),
            _ => Err(Error::Argument(format!("Hankel kind must be 1 or 2, got {i}"))),
        }
    }

    /// Combines real and imaginary parts as `re + sign * i * im`.
    #[inline]
    pub(crate) fn combine(self, re: f64, im: f64) -> Complex {
        Complex::new(re, self.sign() * im)
    }
}

/// Real special-function families supported by [`bessel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    J,
    Y,
    Struve,
}

/// Evaluates `J_n`, `Y_n` or the Struve function `H_n` for `n` in `-1..=2`.
///
/// `Y` and the Struve function of order `-1` are singular or undefined at the
/// origin; they are evaluated as written and the caller guards `x = 0`.
pub fn bessel(family: Family, order: i32, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain("bessel", format!("non-finite argument {x}")));
    }
    match (family, order) {
        (Family::J, 0) => Ok(j0(x)),
        (Family::J, 1) => Ok(j1(x)),
        (Family::J, 2) => Ok(j2(x)),
        (Family::J, -1) => Ok(-j1(x)),
        (Family::Y, 0) => Ok(y0(x)),
        (Family::Y, 1) => Ok(y1(x)),
        (Family::Y, 2) => Ok(y2(x)),
        (Family::Y, -1) => Ok(-y1(x)),
        (Family::Struve, 0) => Ok(struve_h0(x)),
        (Family::Struve, 1) => Ok(struve_h1(x)),
        (Family::Struve, -1) => Ok(struve_hm1(x)),
        _ => Err(Error::Argument(format!(
            "order {order} not supported for {family:?}"
        ))),
    }
}

#[inline]
pub fn j0(x: f64) -> f64 {
    libm::j0(x)
}

#[inline]
pub fn j1(x: f64) -> f64 {
    libm::j1(x)
}

#[inline]
pub fn y0(x: f64) -> f64 {
    libm::y0(x)
}

#[inline]
pub fn y1(x: f64) -> f64 {
    libm::y1(x)
}

pub fn j2(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 4.0 {
        // sum_k (-1)^k (x/2)^(2k+2) / (k! (k+2)!)
        let q = 0.25 * x * x;
        let mut term = q / 2.0;
        let mut sum = term;
        for k in 1..40 {
            term *= -q / (k as f64 * (k + 2) as f64);
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        2.0 * j1(x) / x - j0(x)
    }
}

pub fn y2(x: f64) -> f64 {
    2.0 * y1(x) / x - y0(x)
}

/// Digamma at positive integers: `psi(n) = -gamma + sum_{j<n} 1/j`.
fn psi_int(n: usize) -> f64 {
    (1..n).map(|j| 1.0 / j as f64).sum::<f64>() - EULER_GAMMA
}

const REG_SERIES_LIMIT: f64 = 2.0;

/// `Y1(x) + 2/(pi x)`, free of the pole at the origin.
pub fn y1_reg(x: f64) -> f64 {
    if x >= REG_SERIES_LIMIT {
        return y1(x) + FRAC_2_PI / x;
    }
    let h = 0.5 * x;
    let q = h * h;
    // sum_k (-1)^k (psi(k+1) + psi(k+2)) h^(2k+1) / (k! (k+1)!)
    let mut pow = h;
    let mut sum = 0.0;
    for k in 0..40usize {
        let t = (psi_int(k + 1) + psi_int(k + 2)) * pow;
        sum += t;
        if t.abs() < 1e-18 * sum.abs().max(1e-300) && k > 2 {
            break;
        }
        pow *= -q / ((k + 1) as f64 * (k + 2) as f64);
    }
    FRAC_2_PI * j1(x) * h.ln() - sum / PI
}

/// `Y2(x) + 4/(pi x^2)`, free of the double pole at the origin.
pub fn y2_reg(x: f64) -> f64 {
    if x >= REG_SERIES_LIMIT {
        return y2(x) + 4.0 / (PI * x * x);
    }
    let h = 0.5 * x;
    let q = h * h;
    // sum_k (-1)^k (psi(k+1) + psi(k+3)) h^(2k+2) / (k! (k+2)!)
    let mut pow = q / 2.0;
    let mut sum = 0.0;
    for k in 0..40usize {
        let t = (psi_int(k + 1) + psi_int(k + 3)) * pow;
        sum += t;
        if t.abs() < 1e-18 * sum.abs().max(1e-300) && k > 2 {
            break;
        }
        pow *= -q / ((k + 1) as f64 * (k + 3) as f64);
    }
    FRAC_2_PI * j2(x) * h.ln() - 1.0 / PI - sum / PI
}

const STRUVE_NODES: usize = 24;

/// Number of panels covering `[0, pi/2]` for oscillation frequency `x`.
fn struve_panels(x: f64) -> usize {
    1 + (x.abs() / 6.0) as usize
}

/// `int_0^{pi/2} g(theta) dtheta` by composite Gauss–Legendre.
fn poisson_integral(x: f64, g: impl FnMut(f64) -> f64) -> f64 {
    let rule = gl_rule(STRUVE_NODES).expect("valid order");
    composite_real(rule, 0.0, FRAC_PI_2, struve_panels(x), 0, g)
}

/// Struve function `H0(x) = (2/pi) int_0^{pi/2} sin(x cos t) dt`.
pub fn struve_h0(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    FRAC_2_PI * poisson_integral(x, |t| (x * t.cos()).sin())
}

/// Struve function `H1`.
///
/// Uses `(2x/pi) int sin(x cos t) sin^2 t dt` for small arguments and
/// `(2/pi) (1 - int cos(x cos t) cos t dt)` otherwise; the first form
/// suffers cancellation for large `x`, the second for small `x`.
pub fn struve_h1(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x.abs() < 4.0 {
        FRAC_2_PI
            * x
            * poisson_integral(x, |t| {
                let s = t.sin();
                (x * t.cos()).sin() * s * s
            })
    } else {
        FRAC_2_PI * (1.0 - poisson_integral(x, |t| (x * t.cos()).cos() * t.cos()))
    }
}

/// Struve function of order `-1`, from `H_{-1} + H_1 = 2/pi`.
pub fn struve_hm1(x: f64) -> f64 {
    FRAC_2_PI - struve_h1(x)
}

fn positive(func: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(domain(func, format!("argument must be finite and > 0, got {x}")))
    }
}

fn non_negative(func: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(domain(func, format!("argument must be finite and >= 0, got {x}")))
    }
}

/// Hankel function `H_n^(1,2)(x)` for `n` in `0..=2`, `x > 0`.
pub fn hankel(kind: HankelKind, order: u32, x: f64) -> Result<Complex> {
    positive("hankel", x)?;
    Ok(match order {
        0 => kind.combine(j0(x), y0(x)),
        1 => kind.combine(j1(x), y1(x)),
        2 => kind.combine(j2(x), y2(x)),
        _ => return Err(Error::Argument(format!("Hankel order {order} not supported"))),
    })
}

/// Hankel functions with their small-argument poles removed:
/// `H1 ± 2i/(pi x)` and `H2 ± 4i/(pi x^2)`.
pub fn hankel_reg(kind: HankelKind, order: u32, x: f64) -> Result<Complex> {
    positive("hankel_reg", x)?;
    Ok(match order {
        1 => kind.combine(j1(x), y1_reg(x)),
        2 => kind.combine(j2(x), y2_reg(x)),
        _ => {
            return Err(Error::Argument(format!(
                "regularized Hankel order {order} not supported"
            )))
        }
    })
}

/// `int_0^sigma H0(x) dx`, in closed form through Struve functions.
pub fn cal_i0(kind: HankelKind, sigma: f64) -> Result<Complex> {
    non_negative("cal_i0", sigma)?;
    Ok(cal_i0_unchecked(kind, sigma))
}

pub(crate) fn cal_i0_unchecked(kind: HankelKind, sigma: f64) -> Complex {
    if sigma == 0.0 {
        return Complex::new(0.0, 0.0);
    }
    if sigma < SMALL_SIGMA {
        // int_0^s [1 ± (2i/pi)(ln(x/2) + gamma)] dx
        let im = FRAC_2_PI * sigma * ((0.5 * sigma).ln() + EULER_GAMMA - 1.0);
        return kind.combine(sigma, im);
    }
    let sh0 = struve_h0(sigma);
    let shm1 = struve_hm1(sigma);
    let re = j0(sigma) * shm1 + j1(sigma) * sh0;
    let im = y0(sigma) * shm1 + y1(sigma) * sh0;
    kind.combine(FRAC_PI_2 * sigma * re, FRAC_PI_2 * sigma * im)
}

/// `int_0^sigma H0(x) x dx = sigma H1(sigma) ± 2i/pi`.
///
/// Evaluated as `sigma * (H1 ± 2i/(pi sigma))` so the constant cancels
/// analytically rather than numerically.
pub fn cal_i1(kind: HankelKind, sigma: f64) -> Result<Complex> {
    non_negative("cal_i1", sigma)?;
    if sigma == 0.0 {
        return Ok(Complex::new(0.0, 0.0));
    }
    Ok(kind.combine(sigma * j1(sigma), sigma * y1_reg(sigma)))
}

/// Panel layout shared by [`gamma0`] and [`gamma2`]: unit-free panels of
/// width at most 2, the first graded toward the `x log x` behaviour at 0.
const GAMMA_PANEL: f64 = 2.0;
const GAMMA_LEVELS: usize = 4;

fn gamma_integral(kind: HankelKind, sigma: f64, nq: usize, weight: impl Fn(f64) -> f64) -> Result<Complex> {
    non_negative("gamma", sigma)?;
    if nq < 2 {
        return Err(Error::Argument(format!("nq must be >= 2, got {nq}")));
    }
    if sigma == 0.0 {
        return Ok(Complex::new(0.0, 0.0));
    }
    let rule = gl_rule(nq)?;
    let panels = (sigma / GAMMA_PANEL).ceil().max(1.0) as usize;
    // Real and imaginary parts of the first-kind integrand; the kind only
    // flips the sign of the imaginary part.
    let first = HankelKind::First;
    let re = composite_real(rule, 0.0, sigma, panels, GAMMA_LEVELS, |x| {
        weight(x) * cal_i0_unchecked(first, x).re
    });
    let im = composite_real(rule, 0.0, sigma, panels, GAMMA_LEVELS, |x| {
        weight(x) * cal_i0_unchecked(first, x).im
    });
    Ok(kind.combine(re, im))
}

/// `Gamma0(sigma) = int_0^sigma calI0(x) dx`, by composite Gauss–Legendre
/// with `nq` points per panel.
pub fn gamma0(kind: HankelKind, sigma: f64, nq: usize) -> Result<Complex> {
    gamma_integral(kind, sigma, nq, |_| 1.0)
}

/// `Gamma2(sigma) = int_0^sigma calI0(x) x (x - sigma) dx`.
pub fn gamma2(kind: HankelKind, sigma: f64, nq: usize) -> Result<Complex> {
    gamma_integral(kind, sigma, nq, |x| x * (x - sigma))
}
