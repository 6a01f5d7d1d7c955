//! Bernoulli numbers, zeta values and the normalising constants `c_k`.

use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

static BERNOULLI: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();

/// `B_n` with the convention `B₁ = -1/2`.
pub fn bernoulli(n: usize) -> BigRational {
    let cache = BERNOULLI.get_or_init(|| Mutex::new(vec![BigRational::one()]));
    let mut table = cache.lock().expect("bernoulli cache poisoned");
    while table.len() <= n {
        // Σ_{j=0}^{m} C(m+1, j) B_j = 0
        let m = table.len();
        let mut binom = BigInt::one();
        let mut acc = BigRational::zero();
        for (j, b) in table.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * b;
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        // binom is now C(m+1, m) = m+1
        table.push(-acc / BigRational::from_integer(binom));
    }
    table[n].clone()
}

pub fn bernoulli_f64(n: usize) -> f64 {
    bernoulli(n).to_f64().unwrap_or(f64::NAN)
}

/// `ln n!`.
pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// `ζ(k)` for integer `k ≥ 2`.
///
/// Even `k` use `ζ(k) = (B_k/2k)(-2πi)^k/(k-1)!`; odd `k` use Euler–Maclaurin
/// summation with cutoff 16 and eight correction terms.
pub fn zeta_value(k: u32) -> f64 {
    assert!(k >= 2, "zeta_value needs k >= 2");
    if k % 2 == 0 {
        let b = bernoulli_f64(k as usize).abs();
        let ln = b.ln() - (2.0 * k as f64).ln() + k as f64 * (2.0 * PI).ln()
            - ln_factorial(k - 1);
        return ln.exp();
    }
    if k > 60 {
        // terms beyond 3^{-k} are below one ulp of 1
        return 1.0 + 2f64.powi(-(k as i32)) + 3f64.powi(-(k as i32));
    }
    let s = k as f64;
    let n = 16.0f64;
    let mut sum: f64 = (1..16).rev().map(|i| (i as f64).powf(-s)).sum();
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // Σ B_{2j}/(2j)! · s(s+1)…(s+2j-2) · N^{-s-2j+1}
    let mut rising = s;
    let mut fact = 2.0;
    for j in 1..=8usize {
        let b = bernoulli_f64(2 * j);
        sum += b / fact * rising * n.powf(-s - 2.0 * j as f64 + 1.0);
        rising *= (s + 2.0 * j as f64 - 1.0) * (s + 2.0 * j as f64);
        fact *= ((2 * j + 1) * (2 * j + 2)) as f64;
    }
    sum
}

/// `c_k = (-2πi)^k / (ζ(k)(k-1)!)` as `(ln|c_k|, c_k/|c_k|)`. `None` for `k = 1`,
/// where the convention `c₁ = 0` makes `E₁ ≡ 1`.
pub fn ck_log_polar(k: u32) -> Option<(f64, Complex64)> {
    if k < 2 {
        return None;
    }
    let ln_mag = k as f64 * (2.0 * PI).ln() - zeta_value(k).ln() - ln_factorial(k - 1);
    Some((ln_mag, minus_i_pow(k)))
}

/// `(-i)^k`.
pub fn minus_i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// `i^k`.
pub fn i_pow(k: u32) -> Complex64 {
    minus_i_pow(k).conj()
}

/// `c_k` as a complex number (zero for `k = 1`).
pub fn ck(k: u32) -> Complex64 {
    ck_log_polar(k).map_or(Complex64::new(0.0, 0.0), |(l, p)| p * l.exp())
}
