//! Bessel functions of the first kind of real order, derivatives and zeros.
//!
//! Small arguments (`x^2/4 <= nu + 1`) use the power series, where every term
//! is smaller than the previous one. Everything else goes through Miller's
//! backward recurrence normalised by the Neumann sum
//! `(x/2)^v = sum_k (v + 2k) Gamma(v + k) / k! J_{v+2k}(x)`.

use crate::{Error, Result};

/// Largest order with the documented accuracy.
pub const MAX_ORDER: f64 = 200.0;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let s = (std::f64::consts::PI * x).sin();
        return (std::f64::consts::PI / s).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// `Gamma(x)` for `x > 0`.
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

fn series(nu: f64, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = (nu * h.ln() - ln_gamma(nu + 1.0)).exp();
    if term == 0.0 {
        return 0.0;
    }
    let q = h * h;
    let mut sum = term;
    for k in 1..500 {
        let kf = k as f64;
        term *= -q / (kf * (kf + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `J_{nu0 + i}(x)` for `i = 0..=n_hi`, with `0 <= nu0 < 1` and `x > 0`.
fn miller(nu0: f64, n_hi: usize, x: f64) -> Vec<f64> {
    let top = (n_hi as f64).max(x);
    let mut m = (top + 30.0 + 12.0 * top.cbrt()).ceil() as usize;
    if m % 2 == 1 {
        m += 1;
    }
    let mut out = vec![0.0; n_hi + 1];
    // Neumann-sum coefficients c_k = (nu0 + 2k) Gamma(nu0 + k) / k!, built
    // upward and consumed downward.
    let half = m / 2;
    let mut coef = vec![0.0; half + 1];
    coef[0] = gamma(nu0 + 1.0);
    let mut g = coef[0];
    for k in 1..=half {
        if k > 1 {
            let kf = (k - 1) as f64;
            g *= (nu0 + kf) / (kf + 1.0);
        }
        coef[k] = (nu0 + 2.0 * k as f64) * g;
    }
    let mut jp = 0.0; // order k + 1
    let mut jk = 1e-300; // order k
    let mut sum = 0.0;
    let mut k = m;
    loop {
        if k <= n_hi {
            out[k] = jk;
        }
        if k % 2 == 0 {
            sum += coef[k / 2] * jk;
        }
        if k == 0 {
            break;
        }
        let jm = 2.0 * (nu0 + k as f64) / x * jk - jp;
        jp = jk;
        jk = jm;
        k -= 1;
        if jk.abs() > 1e250 {
            let s = 1e-250;
            jk *= s;
            jp *= s;
            sum *= s;
            for v in out.iter_mut().skip(k) {
                *v *= s;
            }
        }
    }
    let scale = (nu0 * (0.5 * x).ln()).exp() / sum;
    for v in &mut out {
        *v *= scale;
    }
    out
}

fn use_series(nu: f64, x: f64) -> bool {
    0.25 * x * x <= nu + 1.0
}

/// `(J_nu(x), J_{nu+1}(x))`.
pub fn bessel_j_pair(nu: f64, x: f64) -> (f64, f64) {
    debug_assert!(nu >= 0.0 && x >= 0.0);
    if x == 0.0 {
        return (if nu == 0.0 { 1.0 } else { 0.0 }, 0.0);
    }
    if use_series(nu, x) {
        return (series(nu, x), series(nu + 1.0, x));
    }
    let n = nu.floor();
    let v = miller(nu - n, n as usize + 1, x);
    (v[n as usize], v[n as usize + 1])
}

/// `J_nu(x)` for `nu >= 0`, `x >= 0`.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    if x > 0.0 && !use_series(nu, x) {
        let n = nu.floor();
        return miller(nu - n, n as usize, x)[n as usize];
    }
    bessel_j_pair(nu, x).0
}

/// `J_nu(x)` together with a flag set when the order is outside the supported
/// range or the value underflowed to zero away from the origin.
pub fn bessel_j_flagged(nu: f64, x: f64) -> (f64, bool) {
    let v = bessel_j(nu, x);
    let flagged = nu > MAX_ORDER || (x > 0.0 && v.abs() < 1e-300);
    (v, flagged)
}

/// `J'_nu(x)`, from `J'_nu = (nu/x) J_nu - J_{nu+1}`.
pub fn bessel_j_prime(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 {
            0.0
        } else if nu == 1.0 {
            0.5
        } else if nu < 1.0 {
            f64::INFINITY
        } else {
            0.0
        };
    }
    let (j, j1) = bessel_j_pair(nu, x);
    nu / x * j - j1
}

fn mcmahon(nu: f64, k: usize) -> f64 {
    let b = (k as f64 + 0.5 * nu - 0.25) * std::f64::consts::PI;
    let mu = 4.0 * nu * nu;
    let e = 8.0 * b;
    b - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e * e * e)
}

fn refine(nu: f64, mut a: f64, mut b: f64, mut fa: f64, seed: f64) -> f64 {
    let mut x = if seed > a && seed < b { seed } else { 0.5 * (a + b) };
    for _ in 0..200 {
        let (j, j1) = bessel_j_pair(nu, x);
        if j == 0.0 {
            return x;
        }
        if (j < 0.0) == (fa < 0.0) {
            a = x;
            fa = j;
        } else {
            b = x;
        }
        if b - a <= 4.0 * f64::EPSILON * b {
            break;
        }
        let d = nu / x * j - j1;
        let step = x - j / d;
        x = if d != 0.0 && step > a && step < b {
            step
        } else {
            0.5 * (a + b)
        };
    }
    x
}

fn scan_zeros(nu: f64, count: usize, step: f64) -> Option<Vec<f64>> {
    let mut zeros = Vec::with_capacity(count);
    let mut a = if nu == 0.0 { 0.0 } else { nu };
    let mut fa = bessel_j(nu, a);
    let limit = nu + (count as f64 + 2.0) * 4.0 + 50.0;
    while zeros.len() < count {
        let b = a + step;
        if b > limit {
            return None;
        }
        let fb = bessel_j(nu, b);
        if fb == 0.0 {
            zeros.push(b);
            a = b + 1e-9;
            fa = bessel_j(nu, a);
            continue;
        }
        if (fa < 0.0) != (fb < 0.0) {
            let seed = mcmahon(nu, zeros.len() + 1);
            zeros.push(refine(nu, a, b, fa, seed));
        }
        a = b;
        fa = fb;
    }
    Some(zeros)
}

/// The first `count` positive zeros of `J_nu`, ascending.
///
/// Zeros are bracketed by a sign-change scan starting at `nu` (no zero lies
/// below it) and polished by safeguarded Newton from the McMahon seed, so the
/// index of each zero is exact.
pub fn bessel_zeros(nu: f64, count: usize) -> Result<Vec<f64>> {
    if !(0.0..=MAX_ORDER).contains(&nu) || !nu.is_finite() {
        return Err(Error::OutOfRange(format!("Bessel order {nu}")));
    }
    scan_zeros(nu, count, 0.5)
        .or_else(|| scan_zeros(nu, count, 0.125))
        .ok_or(Error::Bracket { nu, k: count })
}

/// The `k`-th positive zero of `J_nu` (`k >= 1`).
pub fn bessel_zero(nu: f64, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::OutOfRange("zero index starts at 1".into()));
    }
    Ok(bessel_zeros(nu, k)?[k - 1])
}
