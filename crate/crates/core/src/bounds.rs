//! Closed-form inequalities, sign patterns and count formulas for odd weight
//! Eisenstein series.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use thiserror::Error;

use crate::eisenstein::{self, EvalError, EvalParams, SeriesKind};
use crate::moebius::{ExtRational, HalfPlanePoint, UniModularMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("weight {k} outside the range of validity ({need})")]
    Weight { k: u32, need: &'static str },
    #[error("angle {0} outside [π/3, 2π/3]")]
    Angle(f64),
    #[error("index {ell} outside [1, {max}]")]
    Index { ell: u32, max: u32 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    Theorem,
    Conjecture,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Theorem => "THEOREM",
            Provenance::Conjecture => "CONJECTURE",
        })
    }
}

/// Column of the count table a cusp falls into, with the special cusps
/// singled out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LambdaClass {
    /// `|λ| ≤ 1/2`
    Small,
    /// `1/2 < |λ| ≤ 1`
    Middle,
    /// `|λ| > 1`
    Large,
    Zero,
    PlusMinusOne,
    Infinity,
}

impl LambdaClass {
    pub fn of(lambda: &ExtRational) -> Self {
        if lambda.is_infinite() {
            LambdaClass::Infinity
        } else if lambda.is_one_of(&[0]) {
            LambdaClass::Zero
        } else if lambda.is_one_of(&[1, -1]) {
            LambdaClass::PlusMinusOne
        } else {
            Self::column(lambda)
        }
    }

    /// The plain table column, ignoring the special cusps.
    pub fn column(lambda: &ExtRational) -> Self {
        use std::cmp::Ordering::*;
        if lambda.is_infinite() {
            return LambdaClass::Large;
        }
        match (lambda.abs_cmp(1, 2), lambda.abs_cmp(1, 1)) {
            (Less | Equal, _) => LambdaClass::Small,
            (_, Less | Equal) => LambdaClass::Middle,
            _ => LambdaClass::Large,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpectedCount {
    pub kind: SeriesKind,
    pub k: u32,
    pub class: LambdaClass,
    pub value: Rational64,
    pub provenance: Provenance,
}

fn floor12(k: u32) -> i64 {
    (k / 12) as i64
}

fn ceil12(k: u32) -> i64 {
    k.div_ceil(12) as i64
}

/// Count for odd `k` read from the table row `k mod 12` and the column.
fn table_value(k: u32, column: LambdaClass) -> i64 {
    let (f, c) = (floor12(k), ceil12(k));
    let col = match column {
        LambdaClass::Small => 0,
        LambdaClass::Middle => 1,
        _ => 2,
    };
    let row: [i64; 3] = match k % 12 {
        1 => [f, f, f],
        3 => [c, f, f],
        5 => [c, c, f],
        7 => [f, f, c],
        9 => [f, c, c],
        11 => [c, c, c],
        _ => unreachable!("odd k"),
    };
    row[col]
}

/// Nearest integer to `k/12`, half-integers rounded up.
pub fn round_k_over_12(k: u32) -> i64 {
    ((k as i64) * 2 + 12).div_euclid(24)
}

/// `N_∞(𝔾_k)`: `⌈k/6⌉` for `k ≡ 3, 5, 11 (mod 12)`, `⌊k/6⌋` otherwise.
pub fn gg_infinity_count(k: u32) -> i64 {
    match k % 12 {
        3 | 5 | 11 => k.div_ceil(6) as i64,
        _ => (k / 6) as i64,
    }
}

/// Conjectured `N_λ(𝔾_k)` at `λ = ±1`.
fn gg_plus_minus_one(k: u32) -> Rational64 {
    let k64 = k as i64;
    match k % 12 {
        1 | 3 => floor12(k).into(),
        5 => Rational64::new(k64 + 1, 12),
        7 => Rational64::new(k64 - 1, 12),
        _ => ceil12(k).into(),
    }
}

/// The expected weighted number of zeros of `kind` of weight `k` in `γF̄`,
/// `λ(γ) = lambda`.
pub fn expected_count(
    kind: SeriesKind,
    k: u32,
    lambda: &ExtRational,
) -> Result<ExpectedCount, BoundsError> {
    let class = LambdaClass::of(lambda);
    let make = |value: Rational64, provenance| ExpectedCount { kind, k, class, value, provenance };
    if k % 2 == 0 {
        if k < 4 {
            return Err(BoundsError::Weight { k, need: "even k ≥ 4" });
        }
        return Ok(make(Rational64::new(k as i64, 12), Provenance::Theorem));
    }
    let int = |v: i64| Rational64::from_integer(v);
    match kind {
        SeriesKind::E | SeriesKind::G => {
            if k < 3 {
                return Err(BoundsError::Weight { k, need: "odd k ≥ 3" });
            }
            Ok(make(int(table_value(k, LambdaClass::column(lambda))), Provenance::Theorem))
        }
        SeriesKind::GG => {
            if k < 3 {
                return Err(BoundsError::Weight { k, need: "odd k ≥ 3" });
            }
            Ok(match class {
                LambdaClass::Infinity => make(int(gg_infinity_count(k)), Provenance::Theorem),
                LambdaClass::Zero => make(int(0), Provenance::Conjecture),
                LambdaClass::PlusMinusOne => make(gg_plus_minus_one(k), Provenance::Conjecture),
                col => make(int(table_value(k, col)), Provenance::Theorem),
            })
        }
    }
}

fn odd_above(k: u32, min: u32, need: &'static str) -> Result<(), BoundsError> {
    if k < min {
        Err(BoundsError::Weight { k, need })
    } else {
        Ok(())
    }
}

fn check_angle(theta: f64) -> Result<(), BoundsError> {
    if (PI / 3.0 - 1e-12..=2.0 * PI / 3.0 + 1e-12).contains(&theta) {
        Ok(())
    } else {
        Err(BoundsError::Angle(theta))
    }
}

/// `|R̂_k(θ)| ≤ 4(5/2)^{-k/2} + (20√2/(k-3))(9/2)^{(3-k)/2}` for `k > 3`.
pub fn rsd_bound(k: u32) -> Result<f64, BoundsError> {
    odd_above(k, 4, "k > 3")?;
    let kf = k as f64;
    Ok(4.0 * 2.5f64.powf(-kf / 2.0) + 20.0 * 2f64.sqrt() / (kf - 3.0) * 4.5f64.powf((3.0 - kf) / 2.0))
}

/// Primitive character mod 3.
pub fn chi3(k: u32) -> i32 {
    match k % 3 {
        1 => 1,
        2 => -1,
        _ => 0,
    }
}

/// Leading value `1 - χ(k)·i√3` of `E_k(ρ)` for odd `k`.
pub fn rho_leading(k: u32) -> Complex64 {
    Complex64::new(1.0, -(chi3(k) as f64) * 3f64.sqrt())
}

/// Bound on `|E_k(ρ) - (1 - χ(k)i√3)|`.
pub fn rho_bound(k: u32) -> Result<f64, BoundsError> {
    Ok(3f64.powf(-(k as f64) / 2.0) + rsd_bound(k)?)
}

/// Upper bound for `I_k(e^{iθ})`, `k ≥ 9`.
pub fn ik_bound(k: u32, theta: f64) -> Result<f64, BoundsError> {
    odd_above(k, 9, "k ≥ 9")?;
    check_angle(theta)?;
    let kf = k as f64;
    let base = 4.0 * 10f64.sqrt() * 5f64.powf(-kf / 2.0);
    let extra = if theta <= PI / 2.0 {
        2.0 * 3f64.powf(-kf / 2.0)
    } else {
        2.0 * 5f64.powf(-kf / 2.0)
    };
    Ok(base + extra)
}

/// `|R_{k,λ}(τ)| ≤ 6√5/(5/2)^{k/2}` on `F̄`, `k ≥ 11`.
pub fn slashed_remainder_bound(k: u32) -> Result<f64, BoundsError> {
    odd_above(k, 11, "k ≥ 11")?;
    Ok(6.0 * 5f64.sqrt() / 2.5f64.powf(k as f64 / 2.0))
}

/// `1 - r^{-k} - 3^{-k/2} - r^{-k/2} - 6√5(5/2)^{-k/2}`, a lower bound for
/// `|Re E_k(re^{iθ})|` on `θ ∈ (π/3, 2π/3)`.
pub fn re_nonvanishing_margin(k: u32, r: f64) -> Result<f64, BoundsError> {
    let kf = k as f64;
    Ok(1.0 - r.powf(-kf) - 3f64.powf(-kf / 2.0) - r.powf(-kf / 2.0) - slashed_remainder_bound(k)?)
}

/// `z_ℓ = 1/2 + (i/2)cot(πℓ/k)` for `1 ≤ ℓ ≤ ⌊k/6⌋`.
pub fn z_ell(k: u32, ell: u32) -> Result<HalfPlanePoint, BoundsError> {
    let max = k / 6;
    if ell < 1 || ell > max {
        return Err(BoundsError::Index { ell, max });
    }
    let t = 0.5 / (PI * ell as f64 / k as f64).tan();
    Ok(HalfPlanePoint::Finite(Complex64::new(0.5, t)))
}

/// `(-1)^ℓ`.
pub fn expected_sign(ell: u32) -> i32 {
    if ell % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `H_k(θ) = i^{k+1}·Im Ê_k(θ)` for odd `k`.
pub fn hk_eval(k: u32, theta: f64, params: &EvalParams) -> Result<f64, BoundsError> {
    if k % 2 == 0 {
        return Err(BoundsError::Weight { k, need: "odd k" });
    }
    check_angle(theta)?;
    let v = eisenstein::hat_eval(SeriesKind::E, k, &UniModularMatrix::identity(), theta, params)?;
    let sign = if ((k + 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * v.value.im)
}

/// Closed-form lower bound on `H_k''(θ)`.
pub fn convexity_margin(k: u32, theta: f64) -> Result<f64, BoundsError> {
    check_angle(theta)?;
    let kf = k as f64;
    let tail = kf * (kf + 1.0) / 2.0 * 4.0 * 10f64.sqrt() / 5f64.powf(kf / 2.0);
    let m = if theta <= PI / 2.0 {
        // the main term k(4 + 4k cos²(θ/2)) / (2^{k+4} sin^{k+2}(θ/2)) at θ = π/2
        kf * (2.0 * kf + 4.0) / 2f64.powf(kf / 2.0 + 3.0) - kf / 2.0 * (49.0 * kf + 8.0) / 3f64.powf(kf + 2.0)
    } else {
        0.25 * kf * (kf + 4.0) / 3f64.powf(kf / 2.0 + 1.0) - kf / 2.0 * (25.0 * kf + 8.0) / 5f64.powf(kf + 2.0)
    };
    Ok(m - tail)
}

/// Upper bound `3^{-k/2} + (4√10 + 2)·5^{-k/2}` on `H_k(2π/3)`.
pub fn hk_endpoint_bound(k: u32) -> f64 {
    let kf = k as f64;
    3f64.powf(-kf / 2.0) + (4.0 * 10f64.sqrt() + 2.0) * 5f64.powf(-kf / 2.0)
}

fn delta(b: bool) -> u32 {
    b as u32
}

/// Maximal zero counts of `sin(kθ/2) ± h(θ)` on `[π/3, 2π/3]` for convex
/// positive `h` with `h(2π/3) < √3/2`.
pub fn sine_plus_convex_caps(k: u32) -> (u32, u32) {
    let plus = 2 * ((k + 5) / 12) + delta(k % 6 == 5);
    let minus = 2 * (k / 12) + 2 - delta(k % 6 == 1);
    (plus, minus)
}

/// Numbers of maximal intervals where `sin(kθ/2)` is non-negative and
/// non-positive on `[π/3, 2π/3]`.
pub fn interval_counts(k: u32) -> (u32, u32) {
    (k / 12 + 1, (k + 5) / 12 + delta(k % 6 == 5))
}

fn arg_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Checks `‖arg z − arg z₀‖ < 2r/|z₀|` when `|z − z₀| < r`; vacuously true
/// outside the ball.
pub fn angle_bounds(z: Complex64, z0: Complex64, r: f64) -> bool {
    if (z - z0).norm() >= r {
        return true;
    }
    arg_dist(z.arg(), z0.arg()) < 2.0 * r / z0.norm()
}

/// Checks `‖arg z‖ < B/A` when `Re z > A` and `|Im z| < B`.
pub fn angle_bound_box(z: Complex64, a: f64, b: f64) -> bool {
    if !(z.re > a && z.im.abs() < b) {
        return true;
    }
    arg_dist(z.arg(), 0.0) < b / a
}
