//! Fourier (q-expansion) engine: `constant + scale · Σ σ_{k-1}(n) qⁿ`.
//!
//! Terms are formed in log space so that `c_k` (tiny for large `k`) and
//! `σ_{k-1}(n)` (huge for large `k`) never overflow separately.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Result of a truncated q-series evaluation.
#[derive(Clone, Copy, Debug)]
pub(crate) struct QSum {
    pub value: Complex64,
    pub derivative: Complex64,
    pub abs_err: f64,
    pub deriv_abs_err: f64,
}

/// `ln Σ_{d | n} d^{-(k-1)}`, so that `ln σ_{k-1}(n) = (k-1) ln n + this`.
fn ln_divisor_ratio(n: u64, k: u32) -> f64 {
    let e = -((k as i32) - 1);
    let mut s = 0.0;
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            s += (d as f64).powi(e);
            let other = n / d;
            if other != d {
                s += (other as f64).powi(e);
            }
        }
        d += 1;
    }
    s.ln()
}

/// Sums `constant + e^{ln_scale}·phase · Σ_{n≥1} σ_{k-1}(n) qⁿ` at `tau`.
///
/// Stops once the geometric tail bound (with `σ_{k-1}(m) ≤ m^{k-1}(1 + ln m)`)
/// falls below `target / 2` for both the value and the derivative. Returns
/// `None` if that does not happen within `max_terms`.
pub(crate) fn q_sum(
    k: u32,
    tau: Complex64,
    constant: Complex64,
    ln_scale: f64,
    phase: Complex64,
    target: f64,
    max_terms: usize,
) -> Option<QSum> {
    let ln_q = -2.0 * PI * tau.im;
    let kf = k as f64;
    let mut value = Complex64::new(0.0, 0.0);
    let mut deriv = Complex64::new(0.0, 0.0);
    let mut abs_sum = constant.norm();
    let mut abs_dsum = 0.0;
    let peak = (kf / -ln_q).ceil() as usize + 1;
    let half = 0.5 * target;
    let mut n = 1usize;
    loop {
        if n > max_terms {
            return None;
        }
        let nf = n as f64;
        let ln_mag = ln_scale + (kf - 1.0) * nf.ln() + ln_divisor_ratio(n as u64, k) + nf * ln_q;
        let mag = ln_mag.exp();
        let arg = (2.0 * PI * tau.re * nf).rem_euclid(2.0 * PI);
        let term = phase * Complex64::from_polar(mag, arg);
        value += term;
        let dterm = Complex64::new(0.0, 2.0 * PI * nf) * term;
        deriv += dterm;
        abs_sum += mag;
        abs_dsum += 2.0 * PI * nf * mag;

        if n >= peak {
            let m = nf + 1.0;
            let ratio = ((m + 1.0) / m).powf(kf + 1.0) * ln_q.exp();
            if ratio < 1.0 {
                let ln_b = ln_scale + (kf - 1.0) * m.ln() + (1.0 + m.ln()).ln() + m * ln_q;
                let tail = ln_b.exp() / (1.0 - ratio);
                let dtail = 2.0 * PI * m * tail / (1.0 - ratio);
                if tail <= half && dtail <= half {
                    let rounding = 8.0 * f64::EPSILON * abs_sum;
                    let drounding = 8.0 * f64::EPSILON * abs_dsum;
                    return Some(QSum {
                        value: value + constant,
                        derivative: deriv,
                        abs_err: tail + rounding,
                        deriv_abs_err: dtail + drounding,
                    });
                }
            }
        }
        n += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisor_ratio_matches_direct_sigma() {
        // σ_3(12) = 1 + 8 + 27 + 64 + 216 + 1728 = 2044
        let ln_sigma = 3.0 * 12f64.ln() + ln_divisor_ratio(12, 4);
        assert!((ln_sigma.exp() - 2044.0).abs() < 1e-9);
        // σ_0(36) = 9
        assert!((ln_divisor_ratio(36, 1).exp() - 9.0).abs() < 1e-12);
    }

    #[test]
    fn delta_free_identity_e4_squared_is_e8() {
        let tau = Complex64::new(0.13, 0.91);
        let e = |k: u32| {
            let (l, p) = super::super::special::ck_log_polar(k).unwrap();
            q_sum(k, tau, Complex64::new(1.0, 0.0), l, p, 1e-14, 10_000)
                .unwrap()
                .value
        };
        assert!((e(4) * e(4) - e(8)).norm() < 1e-12);
    }
}
