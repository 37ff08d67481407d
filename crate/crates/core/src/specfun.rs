//! Bessel functions of the first kind, integer order.
//!
//! Two evaluation paths are used:
//!
//! * `x < 1`: the ascending power series. Every term is smaller than the
//!   previous one and the signs alternate, so there is no cancellation.
//! * `x >= 1`: Miller's downward recurrence started well above
//!   `max(n, x)` and normalized with `J0(x) + 2 * sum_k J_2k(x) = 1`.
//!
//! Downward recurrence is stable for `J` at every order, which matters for
//! the high orders reached when finite plane-wave sums alias into the
//! Fourier-Bessel basis.

use crate::error::{Error, Result};

/// Highest supported order.
pub const MAX_ORDER: u32 = 512;

/// Largest accepted argument. Accuracy is only guaranteed up to 500; the
/// recurrence cost grows linearly with the argument.
pub const MAX_ARGUMENT: f64 = 1.0e5;

const SERIES_LIMIT: f64 = 1.0;
const RESCALE_ABOVE: f64 = 1.0e250;
const RESCALE_BY: f64 = 1.0e-250;

/// Integer Bessel order in `0..=MAX_ORDER`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BesselOrder(u32);

impl BesselOrder {
    pub fn new(n: u32) -> Result<Self> {
        if n > MAX_ORDER {
            return Err(Error::Range(format!(
                "Bessel order {n} exceeds supported maximum {MAX_ORDER}"
            )));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for BesselOrder {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        Self::new(n)
    }
}

fn check_argument(x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!(
            "Bessel argument must be finite and non-negative, got {x}"
        )));
    }
    if x > MAX_ARGUMENT {
        return Err(Error::Domain(format!(
            "Bessel argument {x} exceeds supported maximum {MAX_ARGUMENT}"
        )));
    }
    Ok(())
}

/// `J_n(x)` for a single order.
pub fn bessel_j(n: BesselOrder, x: f64) -> Result<f64> {
    check_argument(x)?;
    let n = n.get() as usize;
    if x == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    if x < SERIES_LIMIT {
        return Ok(series(n, x));
    }
    Ok(miller(n, x)[n])
}

/// `[J_0(x), J_1(x), ..., J_{n_max}(x)]`.
pub fn bessel_j_sequence(n_max: BesselOrder, x: f64) -> Result<Vec<f64>> {
    check_argument(x)?;
    let n_max = n_max.get() as usize;
    if x == 0.0 {
        let mut out = vec![0.0; n_max + 1];
        out[0] = 1.0;
        return Ok(out);
    }
    if x < SERIES_LIMIT {
        return Ok((0..=n_max).map(|n| series(n, x)).collect());
    }
    Ok(miller(n_max, x))
}

/// Infallible sequence evaluation for callers that have already validated
/// their arguments (finite, non-negative, within range).
pub(crate) fn sequence_unchecked(n_max: usize, x: f64) -> Vec<f64> {
    debug_assert!(x.is_finite() && x >= 0.0 && n_max <= MAX_ORDER as usize);
    if x == 0.0 {
        let mut out = vec![0.0; n_max + 1];
        out[0] = 1.0;
        out
    } else if x < SERIES_LIMIT {
        (0..=n_max).map(|n| series(n, x)).collect()
    } else {
        miller(n_max, x)
    }
}

// Ascending series, only used for 0 < x < 1.
fn series(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut lead = 1.0;
    for k in 1..=n {
        lead *= half / k as f64;
        if lead == 0.0 {
            return 0.0;
        }
    }
    let q = -half * half;
    let mut term = lead;
    let mut sum = lead;
    for k in 1.. {
        term *= q / (k as f64 * (n + k) as f64);
        sum += term;
        if term.abs() <= f64::EPSILON * 1e-3 * sum.abs() {
            break;
        }
    }
    sum
}

fn start_order(n_max: usize, x: f64) -> usize {
    let m = n_max.max(x.ceil() as usize);
    let start = m + 20 + (40.0 * (m as f64 + 1.0)).sqrt() as usize;
    start + (start & 1)
}

fn miller(n_max: usize, x: f64) -> Vec<f64> {
    let start = start_order(n_max, x);
    let mut out = vec![0.0; n_max + 1];
    let two_over_x = 2.0 / x;

    // j_hi = J_{k+1}, j = J_k (unnormalized)
    let mut j_hi = 0.0_f64;
    let mut j = 1.0e-30_f64;
    let mut norm = 0.0_f64;
    for k in (1..=start).rev() {
        if k <= n_max {
            out[k] = j;
        }
        if k % 2 == 0 {
            norm += 2.0 * j;
        }
        let j_lo = k as f64 * two_over_x * j - j_hi;
        j_hi = j;
        j = j_lo;
        if j.abs() > RESCALE_ABOVE {
            j *= RESCALE_BY;
            j_hi *= RESCALE_BY;
            norm *= RESCALE_BY;
            for v in out.iter_mut().skip(k) {
                *v *= RESCALE_BY;
            }
        }
    }
    out[0] = j;
    norm += j;
    for v in &mut out {
        *v /= norm;
    }
    out
}
