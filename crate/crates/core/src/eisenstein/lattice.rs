//! Truncated coprime lattice sums for slashed Eisenstein series.
//!
//! With `H = {(m, n) coprime : m > 0, or m = 0 and n = 1}` every slashed
//! series is
//!
//! ```text
//! E_k|γ(τ) = Σ_{μ ∈ H} s_γ(μ) (mτ + n)^{-k}
//! ```
//!
//! where `s_γ(μ) = +1` if `dm > cn`, `(-1)^k` if `dm < cn`, and for the single
//! pair `μ = ±(c, d)` the sign making the term equal `(cτ+d)^{-k}`.

use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use num_integer::Integer;

/// Coprime points of `H` sorted by `m² + n²`.
struct HalfLattice {
    max_norm: u64,
    points: Arc<Vec<(i32, i32, u64)>>,
}

static HALF_LATTICE: OnceLock<Mutex<HalfLattice>> = OnceLock::new();

fn build(max_norm: u64) -> Vec<(i32, i32, u64)> {
    let r = (max_norm as f64).sqrt().floor() as i64 + 1;
    let mut pts = Vec::with_capacity((max_norm as f64 * 1.0) as usize + 8);
    pts.push((0, 1, 1));
    for m in 1..=r {
        let m2 = (m * m) as u64;
        if m2 > max_norm {
            break;
        }
        let nmax = ((max_norm - m2) as f64).sqrt().floor() as i64 + 1;
        for n in -nmax..=nmax {
            let norm = m2 + (n * n) as u64;
            if norm <= max_norm && m.gcd(&n) == 1 {
                pts.push((m as i32, n as i32, norm));
            }
        }
    }
    pts.sort_by_key(|&(m, n, norm)| (norm, m, n));
    pts
}

/// All points of `H` with `m² + n² ≤ max_norm`, in order of increasing norm.
pub(crate) fn half_lattice(max_norm: u64) -> (Arc<Vec<(i32, i32, u64)>>, usize) {
    let cell = HALF_LATTICE.get_or_init(|| {
        Mutex::new(HalfLattice {
            max_norm: 0,
            points: Arc::new(Vec::new()),
        })
    });
    let mut guard = cell.lock().expect("lattice cache poisoned");
    if guard.max_norm < max_norm {
        // grow geometrically so repeated small increases do not rebuild
        let target = max_norm.max(guard.max_norm.saturating_mul(2)).max(1024);
        guard.points = Arc::new(build(target));
        guard.max_norm = target;
    }
    let pts = Arc::clone(&guard.points);
    drop(guard);
    let len = pts.partition_point(|&(_, _, norm)| norm <= max_norm);
    (pts, len)
}

/// Lattice sum output: value, derivative and the accumulated `Σ|terms|`
/// used for the rounding estimate.
#[derive(Clone, Copy, Debug)]
pub(crate) struct LatticeSum {
    pub value: Complex64,
    pub derivative: Complex64,
    pub abs_sum: f64,
}

/// `Σ_{μ ∈ H, |μ|² ≤ max_norm} s_γ(μ) μ^{-k}` and its `τ`-derivative, where only
/// `(c, d)` of `γ` matter.
pub(crate) fn slashed_sum(k: u32, c: i128, d: i128, tau: Complex64, max_norm: u64) -> LatticeSum {
    let (pts, len) = half_lattice(max_norm);
    let odd = k % 2 == 1;
    let kf = k as f64;
    let mut value = Complex64::new(0.0, 0.0);
    let mut deriv = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for &(m, n, _) in &pts[..len] {
        let (mi, ni) = (m as i128, n as i128);
        let cross = d * mi - c * ni;
        let negative = if cross > 0 {
            false
        } else if cross < 0 {
            odd
        } else {
            // μ = ±(c, d)
            odd && !(mi == c && ni == d)
        };
        let mu = Complex64::new(m as f64 * tau.re + n as f64, m as f64 * tau.im);
        let inv = mu.inv();
        let p = inv.powu(k);
        let dp = p * inv * (-kf * m as f64);
        abs_sum += p.norm();
        if negative {
            value -= p;
            deriv -= dp;
        } else {
            value += p;
            deriv += dp;
        }
    }
    LatticeSum {
        value,
        derivative: deriv,
        abs_sum,
    }
}

/// Smallest eigenvalue of the form `|mτ + n|²`, so `|mτ+n|² ≥ κ(m² + n²)`.
pub(crate) fn kappa(tau: Complex64) -> f64 {
    let r2 = tau.norm_sqr();
    0.5 * ((r2 + 1.0) - ((r2 - 1.0).powi(2) + 4.0 * tau.re * tau.re).sqrt())
}

/// Bound on the omitted tail `Σ_{m²+n² > M} |mτ+n|^{-k}` over a half lattice.
///
/// For `k ≥ 4` this is the integral comparison of `Σ 2N^{1/2}(κN)^{-k/2}`.
/// At `k = 3` that bound diverges; an area-density estimate
/// `(3/π)·∫ (κx)^{-3/2} dx` is used instead (not certified).
pub(crate) fn tail_estimate(k: u32, max_norm: f64, kappa: f64) -> f64 {
    let kf = k as f64;
    if k >= 4 {
        4.0 * kappa.powf(-kf / 2.0) * max_norm.powf((3.0 - kf) / 2.0) / (kf - 3.0)
    } else {
        (3.0 / std::f64::consts::PI) * kappa.powf(-1.5) * 2.0 * max_norm.powf(-0.5)
    }
}

/// Smallest norm cut-off with `tail_estimate ≤ target`, clamped to `[10, cap]`.
pub(crate) fn choose_norm(k: u32, target: f64, kappa: f64, cap: f64) -> f64 {
    let kf = k as f64;
    let m = if k >= 4 {
        let c = 4.0 * kappa.powf(-kf / 2.0) / (kf - 3.0);
        (c / target).powf(2.0 / (kf - 3.0))
    } else {
        let c = (3.0 / std::f64::consts::PI) * kappa.powf(-1.5) * 2.0;
        (c / target).powi(2)
    };
    if m.is_finite() {
        m.ceil().clamp(10.0, cap)
    } else {
        cap
    }
}
