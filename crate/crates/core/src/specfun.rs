//! Bessel functions `J_n`, `Y_n` and the Hankel function `H_n^(1)` for real
//! positive arguments and non-negative integer orders.
//!
//! `J_n` comes from Miller's backward recurrence. Below [`ASYMPTOTIC_THRESHOLD`]
//! the recurrence is normalized with `J_0 + 2 sum J_2k = 1` and the same pass
//! accumulates the Neumann series for `Y_0` and `Y_1`. Above it, the four
//! low-order values come from the Hankel asymptotic expansion and the
//! recurrence is scaled to match. Higher `Y_n` use the (stable) forward
//! recurrence.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.5772156649015329;

pub const MAX_ORDER: u32 = 10_000;
pub const MIN_ARG: f64 = 1e-12;
pub const MAX_ARG: f64 = 1e4;

/// Arguments at or above this use the asymptotic expansion for orders 0 and 1.
/// At x = 25 the smallest term of the expansion is below 1e-20.
pub const ASYMPTOTIC_THRESHOLD: f64 = 25.0;

const RESCALE_AT: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

fn check_arg(x: f64) -> Result<()> {
    if !(MIN_ARG..=MAX_ARG).contains(&x) {
        return Err(Error::Domain(format!(
            "Bessel argument {x} outside [{MIN_ARG:e}, {MAX_ARG:e}]"
        )));
    }
    Ok(())
}

fn check_order(n: u32) -> Result<()> {
    if n > MAX_ORDER {
        return Err(Error::Domain(format!(
            "Bessel order {n} exceeds {MAX_ORDER}"
        )));
    }
    Ok(())
}

/// `J_n(x)`.
pub fn bessel_j(n: u32, x: f64) -> Result<f64> {
    check_order(n)?;
    check_arg(x)?;
    Ok(bessel_table(n as usize, x)?.j[n as usize])
}

/// `Y_n(x)`. Fails with [`Error::Overflow`] when the value leaves the `f64` range.
pub fn bessel_y(n: u32, x: f64) -> Result<f64> {
    check_order(n)?;
    check_arg(x)?;
    let y = bessel_table(n as usize, x)?.y[n as usize];
    if !y.is_finite() {
        return Err(Error::Overflow(format!("Y_{n}({x}) exceeds the f64 range")));
    }
    Ok(y)
}

/// `H_n^(1)(x) = J_n(x) + i Y_n(x)`.
pub fn hankel1(n: u32, x: f64) -> Result<Complex64> {
    check_order(n)?;
    check_arg(x)?;
    let table = bessel_table(n as usize, x)?;
    let (j, y) = (table.j[n as usize], table.y[n as usize]);
    if !y.is_finite() {
        return Err(Error::Overflow(format!("Y_{n}({x}) exceeds the f64 range")));
    }
    Ok(Complex64::new(j, y))
}

/// `J_k(x)` and `Y_k(x)` for every `k` in `0..=nmax`.
///
/// Entries of `y` past the point where the forward recurrence overflows are
/// infinite; callers that only need ratios like `J_k / H_k` can treat those
/// as zero contributions.
#[derive(Debug, Clone)]
pub struct BesselTable {
    pub x: f64,
    pub j: Vec<f64>,
    pub y: Vec<f64>,
}

impl BesselTable {
    pub fn hankel1(&self, n: usize) -> Complex64 {
        Complex64::new(self.j[n], self.y[n])
    }
}

/// Computes the full table of orders `0..=nmax` in one recurrence pass.
/// Orders above [`MAX_ORDER`] are allowed here because the disk series may
/// need a few more terms than that at the top of the argument range.
pub fn bessel_table(nmax: usize, x: f64) -> Result<BesselTable> {
    check_arg(x)?;
    let (mut j, low) = jn_backward(nmax.max(1), x);
    j.truncate(nmax + 1);

    let mut y = Vec::with_capacity(nmax + 1);
    y.push(low.y0);
    if nmax >= 1 {
        y.push(low.y1);
    }
    let (mut prev, mut cur) = (low.y0, low.y1);
    for m in 1..nmax {
        let next = if cur.is_finite() {
            (2.0 * m as f64 / x) * cur - prev
        } else {
            cur
        };
        y.push(next);
        prev = cur;
        cur = next;
    }
    Ok(BesselTable { x, j, y })
}

/// The four values every boundary-integral kernel needs.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LowOrder {
    pub j0: f64,
    pub j1: f64,
    pub y0: f64,
    pub y1: f64,
}

/// `J_0, J_1, Y_0, Y_1` at `x > 0` without range checks.
pub(crate) fn low_orders(x: f64) -> LowOrder {
    if x >= ASYMPTOTIC_THRESHOLD {
        asymptotic_low_orders(x)
    } else {
        jn_backward(1, x).1
    }
}

/// `J_0(x) - 1` without cancellation for small `x`.
pub(crate) fn j0_minus_one(x: f64) -> f64 {
    if x >= 1.0 {
        return low_orders(x).j0 - 1.0;
    }
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 0.0;
    for m in 1..40 {
        term *= q / (m * m) as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Miller backward recurrence for `J_0..=J_nmax`. Returns the sequence and
/// the low-order values (including `Y_0`, `Y_1`).
fn jn_backward(nmax: usize, x: f64) -> (Vec<f64>, LowOrder) {
    let m0 = (nmax as f64).max(x.ceil());
    let mut top = (m0 + 16.0 + (50.0 * m0).sqrt()).ceil() as usize;
    top += top % 2;

    let mut f = vec![0.0; nmax + 1];
    // norm = f_0 + 2 sum f_2k; s0 = sum_{k>=1} (-1)^k f_2k / k;
    // s1 = sum_{k>=2} (-1)^k (2k-1)/(k(k-1)) f_{2k-1}
    let mut norm = 0.0;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let accumulate = |i: usize, v: f64, norm: &mut f64, s0: &mut f64, s1: &mut f64| {
        if i == 0 {
            *norm += v;
        } else if i.is_multiple_of(2) {
            *norm += 2.0 * v;
            let k = i / 2;
            let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
            *s0 += sign * v / k as f64;
        } else {
            let k = i.div_ceil(2);
            if k >= 2 {
                let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
                let kf = k as f64;
                *s1 += sign * (2.0 * kf - 1.0) / (kf * (kf - 1.0)) * v;
            }
        }
    };

    let mut next = 0.0; // f_{m+1}
    let mut cur = 1.0; // f_m
    accumulate(top, cur, &mut norm, &mut s0, &mut s1);
    for m in (1..=top).rev() {
        let prev = (2.0 * m as f64 / x) * cur - next;
        next = cur;
        cur = prev;
        let i = m - 1;
        if i <= nmax {
            f[i] = cur;
        }
        accumulate(i, cur, &mut norm, &mut s0, &mut s1);
        if cur.abs() > RESCALE_AT {
            cur *= RESCALE_BY;
            next *= RESCALE_BY;
            norm *= RESCALE_BY;
            s0 *= RESCALE_BY;
            s1 *= RESCALE_BY;
            if i <= nmax {
                for v in &mut f[i..] {
                    *v *= RESCALE_BY;
                }
            }
        }
    }

    if x >= ASYMPTOTIC_THRESHOLD {
        let low = asymptotic_low_orders(x);
        let scale = if f[0].abs() >= f[1].abs() {
            low.j0 / f[0]
        } else {
            low.j1 / f[1]
        };
        for v in &mut f {
            *v *= scale;
        }
        f[0] = low.j0;
        f[1] = low.j1;
        return (f, low);
    }

    let scale = 1.0 / norm;
    for v in &mut f {
        *v *= scale;
    }
    let (j0, j1) = (f[0], f[1]);
    let log_term = (0.5 * x).ln() + EULER_GAMMA;
    let y0 = (2.0 / PI) * (log_term * j0 - 2.0 * s0 * scale);
    let y1 = (2.0 / PI) * ((log_term - 1.0) * j1 - j0 / x + s1 * scale);
    (f, LowOrder { j0, j1, y0, y1 })
}

/// Hankel asymptotic expansion of orders 0 and 1.
fn asymptotic_low_orders(x: f64) -> LowOrder {
    let (p0, q0) = asymptotic_pq(0.0, x);
    let (p1, q1) = asymptotic_pq(4.0, x);
    let (s, c) = x.sin_cos();
    // chi_0 = x - pi/4, chi_1 = x - 3pi/4, expanded so that x is never shifted.
    let (cos0, sin0) = ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2);
    let (cos1, sin1) = ((s - c) * FRAC_1_SQRT_2, -(s + c) * FRAC_1_SQRT_2);
    let amp = (2.0 / (PI * x)).sqrt();
    LowOrder {
        j0: amp * (p0 * cos0 - q0 * sin0),
        y0: amp * (p0 * sin0 + q0 * cos0),
        j1: amp * (p1 * cos1 - q1 * sin1),
        y1: amp * (p1 * sin1 + q1 * cos1),
    }
}

fn asymptotic_pq(mu: f64, x: f64) -> (f64, f64) {
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0_f64;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        // signs: P = t0 - t2 + t4 ..., Q = t1 - t3 + t5 ...
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if term.abs() < 1e-18 {
            break;
        }
    }
    (p, q)
}
