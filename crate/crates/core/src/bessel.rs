//! Integer-order Bessel functions of the first kind by Miller's backward
//! recurrence.
//!
//! The recurrence `J_{k-1}(x) = (2k/x) J_k(x) - J_{k+1}(x)` is stable when run
//! downwards from an order well past both `n` and `x`. The unnormalised
//! sequence is fixed up with `J_0 + 2 Σ_k J_{2k} = 1`.

use crate::error::{Error, Result};

/// Largest order or argument accepted.
pub const MAX_ORDER: usize = 50_000;

const RESCALE_ABOVE: f64 = 1e250;

/// `J_0(x), J_1(x), …, J_{n_max}(x)` for `x >= 0`.
pub fn bessel_j_table(n_max: usize, x: f64) -> Result<Vec<f64>> {
    if !(x >= 0.0 && x.is_finite()) || x > MAX_ORDER as f64 || n_max > MAX_ORDER {
        return Err(Error::BesselRange { order: n_max, arg: x });
    }
    let mut out = vec![0.0; n_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return Ok(out);
    }

    // Start far enough past the turning point that the seed error has decayed
    // below double precision by the time the recurrence reaches max(n, x).
    let reach = (n_max as f64).max(x);
    let mut start = (reach + 30.0 + 12.0 * reach.cbrt()).ceil() as usize;
    start += start % 2;

    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-300; // J_k
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let prev = (2.0 * k as f64 / x) * cur - next;
        next = cur;
        cur = prev;
        // cur now holds J_{k-1}
        if k - 1 <= n_max {
            out[k - 1] = cur;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > RESCALE_ABOVE {
            let s = 1.0 / RESCALE_ABOVE;
            cur *= s;
            next *= s;
            norm *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    norm += cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    Ok(out)
}

pub fn bessel_j(n: usize, x: f64) -> Result<f64> {
    Ok(bessel_j_table(n, x)?[n])
}

/// `J'_n(x) = (J_{n-1}(x) - J_{n+1}(x)) / 2`, with `J'_0 = -J_1`.
pub fn bessel_j_prime(n: usize, x: f64) -> Result<f64> {
    let t = bessel_j_table(n + 1, x)?;
    Ok(derivative_from_table(&t, n))
}

pub(crate) fn derivative_from_table(table: &[f64], n: usize) -> f64 {
    if n == 0 {
        -table[1]
    } else {
        0.5 * (table[n - 1] - table[n + 1])
    }
}
