//! Bessel functions of the first kind for integer order.
//!
//! Values come from Miller's backward recurrence normalised by
//! `J_0 + 2 Σ J_{2k} = 1`. That stays accurate to a few ulps times `sqrt(x)`
//! for every order and argument the disk model needs (orders and arguments
//! up to a few hundred), where a power series would cancel catastrophically
//! and the Hankel expansion is invalid once the order is comparable to `x`.

/// Below this argument the ascending series converges in a handful of terms.
const SERIES_LIMIT: f64 = 1e-3;

/// `J_0(x) ..= J_nmax(x)` for `x >= 0`.
pub fn bessel_j_all(nmax: usize, x: f64) -> Vec<f64> {
    assert!(x >= 0.0 && x.is_finite(), "bessel argument must be finite and nonnegative");
    if x < SERIES_LIMIT {
        return (0..=nmax).map(|n| bessel_j_series(n, x)).collect();
    }
    let top = nmax.max(x.ceil() as usize);
    let mut start = top + 30 + (10.0 * (top as f64).sqrt()) as usize;
    start += start % 2;

    let mut out = vec![0.0; nmax + 1];
    let two_over_x = 2.0 / x;
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-30; // J_k
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let prev = k as f64 * two_over_x * cur - next;
        next = cur;
        cur = prev;
        // `cur` now holds the unnormalised J_{k-1}.
        let order = k - 1;
        if order <= nmax {
            out[order] = cur;
        }
        if order % 2 == 0 && order > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    norm += cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

/// `J_n(x)` for `x >= 0`.
pub fn bessel_j(n: usize, x: f64) -> f64 {
    if x < SERIES_LIMIT {
        return bessel_j_series(n, x);
    }
    bessel_j_all(n, x)[n]
}

/// Ascending power series, used for tiny arguments.
pub fn bessel_j_series(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let q = -half * half;
    let mut sum = term;
    for k in 1..200 {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Positive zeros of `J_n` not exceeding `upper`, ascending.
///
/// Brackets come from a scan with step 0.25 (consecutive zeros of `J_n` are
/// more than π apart for `n >= 1` and close to π for `n = 0`), each root is
/// then bisected until the bracket is below `1e-13`.
pub fn bessel_j_zeros(n: usize, upper: f64) -> Vec<f64> {
    const STEP: f64 = 0.25;
    let mut zeros = Vec::new();
    // j_{n,1} > n for every order.
    let mut lo = (n as f64).max(0.5);
    if lo > upper {
        return zeros;
    }
    let mut f_lo = bessel_j(n, lo);
    while lo < upper {
        let hi = lo + STEP;
        let f_hi = bessel_j(n, hi);
        if f_lo == 0.0 {
            if lo <= upper {
                zeros.push(lo);
            }
        } else if f_lo * f_hi < 0.0 {
            let root = bisect(n, lo, hi, f_lo);
            if root <= upper {
                zeros.push(root);
            }
        }
        lo = hi;
        f_lo = f_hi;
    }
    zeros
}

fn bisect(n: usize, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = bessel_j(n, mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_lo * f_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    0.5 * (lo + hi)
}
