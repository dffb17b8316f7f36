//! Bessel functions of the first and second kind and Hankel functions of the
//! first kind for integer order and real positive argument.
//!
//! `J_n` comes from Miller's backward recurrence normalised with
//! `J_0 + 2 * sum J_2k = 1`. `Y_0` and `Y_1` come from the ascending series
//! for `x <= 2` and from Steed's continued fraction for `H_0'/H_0` above
//! that; higher orders of `Y` use the (stable) forward recurrence.

use num_complex::Complex64;
use std::f64::consts::{FRAC_2_PI, PI};

use crate::error::SpecfunError;

/// Largest supported order magnitude.
pub const MAX_ORDER: u32 = 60;
/// Largest supported argument.
pub const MAX_ARG: f64 = 200.0;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_CUTOFF: f64 = 2.0;
const RESCALE_ABOVE: f64 = 1e200;

/// Integer Bessel order. Negative orders are handled through
/// `C_{-n} = (-1)^n C_n` for `C` in `{J, Y, H}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BesselOrder(pub i32);

impl BesselOrder {
    pub fn magnitude(self) -> u32 {
        self.0.unsigned_abs()
    }

    /// Sign picked up when reflecting a negative order onto `|n|`.
    pub fn reflection_sign(self) -> f64 {
        if self.0 < 0 && self.0 % 2 != 0 {
            -1.0
        } else {
            1.0
        }
    }

    fn checked(self) -> Result<Self, SpecfunError> {
        if self.magnitude() > MAX_ORDER {
            return Err(SpecfunError::OrderOutOfRange(self.0));
        }
        Ok(self)
    }
}

impl From<i32> for BesselOrder {
    fn from(n: i32) -> Self {
        BesselOrder(n)
    }
}

fn check_arg(x: f64, allow_zero: bool) -> Result<(), SpecfunError> {
    if !x.is_finite() {
        return Err(SpecfunError::NonFinite(x));
    }
    if x < 0.0 || (x == 0.0 && !allow_zero) {
        return Err(SpecfunError::NonPositive(x));
    }
    if x > MAX_ARG {
        return Err(SpecfunError::ArgumentOutOfRange(x));
    }
    Ok(())
}

/// `J_n(x)`.
pub fn bessel_j(n: impl Into<BesselOrder>, x: f64) -> Result<f64, SpecfunError> {
    let n = n.into().checked()?;
    check_arg(x, true)?;
    let m = n.magnitude() as usize;
    Ok(n.reflection_sign() * j_table(m, x)[m])
}

/// `Y_n(x)`, singular at the origin.
pub fn bessel_y(n: impl Into<BesselOrder>, x: f64) -> Result<f64, SpecfunError> {
    let n = n.into().checked()?;
    check_arg(x, false)?;
    let m = n.magnitude() as usize;
    let j = j_table(m.max(1), x);
    Ok(n.reflection_sign() * y_table(m, x, j[0], j[1])[m])
}

/// `H_n^{(1)}(x) = J_n(x) + i Y_n(x)`.
pub fn hankel1(n: impl Into<BesselOrder>, x: f64) -> Result<Complex64, SpecfunError> {
    let n = n.into().checked()?;
    check_arg(x, false)?;
    let m = n.magnitude() as usize;
    Ok(hankel1_table(m, x)[m] * n.reflection_sign())
}

/// `H_n^{(1)'}(x) = H_{n-1}^{(1)}(x) - (n/x) H_n^{(1)}(x)`.
pub fn hankel1_derivative(n: impl Into<BesselOrder>, x: f64) -> Result<Complex64, SpecfunError> {
    let n = n.into().checked()?;
    check_arg(x, false)?;
    let m = n.magnitude() as usize;
    let h = hankel1_table(m + 1, x);
    Ok(derivative_from_table(&h, m, x) * n.reflection_sign())
}

/// `H_0^{(1)}(x), ..., H_{n_max}^{(1)}(x)` in one pass.
pub fn hankel1_orders(n_max: u32, x: f64) -> Result<Vec<Complex64>, SpecfunError> {
    BesselOrder(n_max as i32).checked()?;
    check_arg(x, false)?;
    Ok(hankel1_table(n_max as usize, x))
}

/// `H_n^{(1)'}(x) / H_n^{(1)}(x)` for `n = 0..=n_max`. The ratio is even in `n`.
pub fn hankel1_log_derivatives(n_max: u32, x: f64) -> Result<Vec<Complex64>, SpecfunError> {
    BesselOrder(n_max as i32).checked()?;
    check_arg(x, false)?;
    let h = hankel1_table(n_max as usize + 1, x);
    Ok((0..=n_max as usize)
        .map(|n| derivative_from_table(&h, n, x) / h[n])
        .collect())
}

/// Fast path for the 2-D fundamental solution: `H_0^{(1)}(x)` only.
pub(crate) fn hankel1_zero(x: f64) -> Complex64 {
    let (j0, j1) = j01(x);
    let (y0, _) = y01(x, j0, j1);
    Complex64::new(j0, y0)
}

/// `(H_0^{(1)}(x), H_1^{(1)}(x))`.
pub(crate) fn hankel1_zero_one(x: f64) -> (Complex64, Complex64) {
    let (j0, j1) = j01(x);
    let (y0, y1) = y01(x, j0, j1);
    (Complex64::new(j0, y0), Complex64::new(j1, y1))
}

fn derivative_from_table(h: &[Complex64], n: usize, x: f64) -> Complex64 {
    if n == 0 {
        -h[1]
    } else {
        h[n - 1] - h[n] * (n as f64 / x)
    }
}

fn hankel1_table(n_max: usize, x: f64) -> Vec<Complex64> {
    let j = j_table(n_max.max(1), x);
    let y = y_table(n_max, x, j[0], j[1]);
    (0..=n_max).map(|n| Complex64::new(j[n], y[n])).collect()
}

fn miller_start(n_max: usize, x: f64) -> usize {
    let base = (n_max as f64).max(x);
    let start = (base + 25.0 + 12.0 * x.cbrt()).ceil() as usize;
    start + start % 2
}

/// `J_0(x), ..., J_{n_max}(x)` by backward recurrence.
fn j_table(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let start = miller_start(n_max, x);
    let two_over_x = 2.0 / x;
    let mut above = 0.0_f64;
    let mut current = 1e-300_f64;
    let mut norm = 0.0_f64;
    for k in (1..=start).rev() {
        let below = k as f64 * two_over_x * current - above;
        above = current;
        current = below;
        let idx = k - 1;
        if idx <= n_max {
            out[idx] = current;
        }
        if idx % 2 == 0 && idx > 0 {
            norm += 2.0 * current;
        }
        if current.abs() > RESCALE_ABOVE {
            let s = 1.0 / RESCALE_ABOVE;
            current *= s;
            above *= s;
            norm *= s;
            for v in out.iter_mut().skip(idx) {
                *v *= s;
            }
        }
    }
    norm += current;
    for v in &mut out {
        *v /= norm;
    }
    out
}

fn j01(x: f64) -> (f64, f64) {
    let t = j_table(1, x);
    (t[0], t[1])
}

fn y_table(n_max: usize, x: f64, j0: f64, j1: f64) -> Vec<f64> {
    let (y0, y1) = y01(x, j0, j1);
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(y0);
    if n_max >= 1 {
        out.push(y1);
    }
    for k in 1..n_max {
        let next = 2.0 * k as f64 / x * out[k] - out[k - 1];
        out.push(next);
    }
    out
}

fn y01(x: f64, j0: f64, j1: f64) -> (f64, f64) {
    if x <= SERIES_CUTOFF {
        y01_series(x, j0, j1)
    } else {
        y01_steed(x, j0, j1)
    }
}

/// Ascending series for `Y_0` and `Y_1`.
fn y01_series(x: f64, j0: f64, j1: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let log_term = (0.5 * x).ln();

    // Y_0 = (2/pi)(ln(x/2) + gamma) J_0 + (2/pi) sum_{k>=1} (-1)^{k+1} H_k q^k / (k!)^2
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut tail0 = 0.0;
    // Y_1 tail: sum_{k>=0} (psi(k+1) + psi(k+2)) (-q)^k / (k! (k+1)!)
    let mut term1 = 1.0;
    let mut tail1 = -2.0 * EULER_GAMMA + 1.0;
    for k in 1..60 {
        let kf = k as f64;
        harmonic += 1.0 / kf;
        term *= q / (kf * kf);
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        tail0 += sign * harmonic * term;

        term1 *= -q / (kf * (kf + 1.0));
        let psi_sum = -2.0 * EULER_GAMMA + 2.0 * harmonic + 1.0 / (kf + 1.0);
        tail1 += psi_sum * term1;
        if term.abs() < 1e-18 * tail0.abs().max(1e-300) && term1.abs() < 1e-18 {
            break;
        }
    }
    let y0 = FRAC_2_PI * ((log_term + EULER_GAMMA) * j0 + tail0);
    let y1 = -FRAC_2_PI / x + FRAC_2_PI * log_term * j1 - x / (2.0 * PI) * tail1;
    (y0, y1)
}

/// Steed's method: `p + iq = H_0'/H_0` by continued fraction, then
/// `Y_0, Y_1` from the already accurate `J_0, J_1`.
fn y01_steed(x: f64, j0: f64, j1: f64) -> (f64, f64) {
    const TINY: f64 = 1e-300;
    let i = Complex64::new(0.0, 1.0);
    // K = a_1/T with T = b_1 + a_2/(b_2 + ...), a_k = (k - 1/2)^2, b_k = 2(x + ik);
    // T by modified Lentz.
    let b1 = Complex64::new(2.0 * x, 2.0);
    let mut t = b1;
    let mut c = b1;
    let mut d = Complex64::new(0.0, 0.0);
    for k in 2..10_000 {
        let kf = k as f64;
        let a = (kf - 0.5) * (kf - 0.5);
        let b = Complex64::new(2.0 * x, 2.0 * kf);
        d = b + d * a;
        if d.norm() < TINY {
            d = Complex64::new(TINY, 0.0);
        }
        c = b + a / c;
        if c.norm() < TINY {
            c = Complex64::new(TINY, 0.0);
        }
        d = d.inv();
        let delta = c * d;
        t *= delta;
        if (delta - 1.0).norm() < 1e-17 {
            break;
        }
    }
    let f = 0.25 / t;
    let pq = Complex64::new(-0.5 / x, 1.0) + i / x * f;
    let (p, q) = (pq.re, pq.im);
    let y0 = (p * j0 + j1) / q;
    let y1 = -(q * j0 + p * y0);
    (y0, y1)
}
