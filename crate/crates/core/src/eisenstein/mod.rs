//! Evaluation engines for `E_k`, `G_k = ζ(k)E_k` and the divisor-sum series
//! `𝔾_k = -B_k/2k + Σ σ_{k-1}(n) qⁿ`, unslashed and slashed by `γ ∈ SL₂(ℤ)`.
//!
//! Two independent routes are available: the q-expansion (fast for
//! `Im τ ≳ 0.6`) and the coprime lattice sum, which is evaluated on points of
//! (a neighbourhood of) `F̄`. Every result carries an absolute error budget.

mod lattice;
mod qseries;
pub mod special;

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::moebius::{self, HalfPlanePoint, MoebiusError, UniModularMatrix};
pub use special::{bernoulli, zeta_value};

/// Which series to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    /// `E_k`, constant term 1.
    E,
    /// `G_k = ζ(k)·E_k`.
    G,
    /// `𝔾_k`.
    GG,
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeriesKind::E => "E",
            SeriesKind::G => "G",
            SeriesKind::GG => "GG",
        })
    }
}

impl std::str::FromStr for SeriesKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "E" | "e" => Ok(SeriesKind::E),
            "G" | "g" => Ok(SeriesKind::G),
            "GG" | "gg" | "𝔾" => Ok(SeriesKind::GG),
            _ => Err(format!("unknown series kind {s:?} (expected E, G or GG)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    QExpansion,
    Lattice,
    /// q-expansion when `Im τ ≥ 0.6`, lattice otherwise.
    Auto,
}

/// Imaginary part above which [`EvalMode::Auto`] uses the q-expansion.
pub const AUTO_Q_THRESHOLD: f64 = 0.6;

#[derive(Clone, Debug)]
pub struct EvalParams {
    /// Hard cap on the number of Fourier terms.
    pub q_terms: usize,
    /// Fixed norm cut-off `M` (include `m² + n² ≤ M`); `None` chooses the
    /// smallest `M` whose tail bound meets `target_abs_err`.
    pub lattice_radius: Option<f64>,
    /// Upper limit for an automatically chosen `M`.
    pub radius_cap: f64,
    pub target_abs_err: f64,
    pub mode: EvalMode,
    /// Fail with [`EvalError::AccuracyUnreachable`] when the error budget
    /// exceeds the target. Counting turns this off and works with the budget.
    pub require_target: bool,
}

impl Default for EvalParams {
    fn default() -> Self {
        Self {
            q_terms: 100_000,
            lattice_radius: None,
            radius_cap: 1e6,
            target_abs_err: 1e-10,
            mode: EvalMode::Auto,
            require_target: true,
        }
    }
}

impl EvalParams {
    pub fn with_target(mut self, target: f64) -> Self {
        self.target_abs_err = target;
        self
    }

    pub fn with_mode(mut self, mode: EvalMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn lenient(mut self) -> Self {
        self.require_target = false;
        self
    }
}

/// A value with its absolute error budget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub abs_err: f64,
}

impl Evaluation {
    fn scaled(self, s: Complex64) -> Self {
        Evaluation {
            value: self.value * s,
            abs_err: self.abs_err * s.norm(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("weight {k} is not supported for series {kind}")]
    InvalidWeight { kind: SeriesKind, k: u32 },
    #[error("q-expansion does not reach the target within {terms} terms at Im τ = {im}")]
    NonConvergent { im: f64, terms: usize },
    #[error("error budget {achieved:e} exceeds requested accuracy {target:e}")]
    AccuracyUnreachable { achieved: f64, target: f64 },
    #[error("weight 2 needs Eisenstein summation, which the lattice engine does not implement")]
    WeightTwoLattice,
    #[error("angle {0} outside [π/3, 2π/3]")]
    AngleOutOfRange(f64),
    #[error("matrix entries too large for lattice evaluation")]
    MatrixTooLarge,
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
}

fn check_weight(kind: SeriesKind, k: u32) -> Result<(), EvalError> {
    let ok = match kind {
        SeriesKind::E => k >= 1,
        SeriesKind::G => k >= 2,
        SeriesKind::GG => k >= 1,
    };
    if ok {
        Ok(())
    } else {
        Err(EvalError::InvalidWeight { kind, k })
    }
}

/// Constant term `-B_k/2k` of `𝔾_k`.
pub fn gg_constant(k: u32) -> f64 {
    -special::bernoulli_f64(k as usize) / (2.0 * k as f64)
}

/// `K_k` with `𝔾_k = K_k·(E_k - 1)` for odd `k ≥ 3`, i.e. `1/c_k`.
pub fn gg_over_e_minus_one(k: u32) -> Complex64 {
    let (l, p) = special::ck_log_polar(k).expect("k >= 2");
    p.inv() * (-l).exp()
}

/// Value at `i∞`: the constant term of the q-expansion.
fn constant_term(kind: SeriesKind, k: u32) -> f64 {
    match kind {
        SeriesKind::E => 1.0,
        SeriesKind::G => special::zeta_value(k),
        SeriesKind::GG => gg_constant(k),
    }
}

fn finite_point(tau: &HalfPlanePoint) -> Result<Option<Complex64>, EvalError> {
    match tau {
        HalfPlanePoint::Finite(z) if z.im > 0.0 => Ok(Some(*z)),
        HalfPlanePoint::Finite(z) => Err(MoebiusError::NotInUpperHalfPlane(z.im).into()),
        HalfPlanePoint::Cusp(c) if c.is_infinite() => Ok(None),
        HalfPlanePoint::Cusp(_) => Err(MoebiusError::NotFinite.into()),
    }
}

fn enforce(eval: Evaluation, params: &EvalParams) -> Result<Evaluation, EvalError> {
    if params.require_target && !(eval.abs_err <= params.target_abs_err) {
        return Err(EvalError::AccuracyUnreachable {
            achieved: eval.abs_err,
            target: params.target_abs_err,
        });
    }
    Ok(eval)
}

/// q-expansion value and derivative of `kind` at `tau`.
fn q_engine(
    kind: SeriesKind,
    k: u32,
    tau: Complex64,
    params: &EvalParams,
) -> Result<(Evaluation, Evaluation), EvalError> {
    let zero = Complex64::new(0.0, 0.0);
    let (constant, ln_scale, phase) = match kind {
        SeriesKind::E => match special::ck_log_polar(k) {
            Some((l, p)) => (Complex64::new(1.0, 0.0), l, p),
            None => {
                // E₁ ≡ 1
                let one = Evaluation { value: Complex64::new(1.0, 0.0), abs_err: 0.0 };
                return Ok((one, Evaluation { value: zero, abs_err: 0.0 }));
            }
        },
        SeriesKind::G => {
            let (l, p) = special::ck_log_polar(k).ok_or(EvalError::InvalidWeight { kind, k })?;
            let z = special::zeta_value(k);
            (Complex64::new(z, 0.0), l + z.ln(), p)
        }
        SeriesKind::GG => (Complex64::new(gg_constant(k), 0.0), 0.0, Complex64::new(1.0, 0.0)),
    };
    let s = qseries::q_sum(k, tau, constant, ln_scale, phase, params.target_abs_err, params.q_terms)
        .ok_or(EvalError::NonConvergent { im: tau.im, terms: params.q_terms })?;
    Ok((
        Evaluation { value: s.value, abs_err: s.abs_err },
        Evaluation { value: s.derivative, abs_err: s.deriv_abs_err },
    ))
}

fn use_q(mode: EvalMode, tau: Complex64) -> bool {
    match mode {
        EvalMode::QExpansion => true,
        EvalMode::Lattice => false,
        EvalMode::Auto => tau.im >= AUTO_Q_THRESHOLD,
    }
}

/// Evaluates the unslashed series; `i∞` returns the constant term.
pub fn eval_series(
    kind: SeriesKind,
    k: u32,
    tau: &HalfPlanePoint,
    params: &EvalParams,
) -> Result<Evaluation, EvalError> {
    check_weight(kind, k)?;
    let Some(z) = finite_point(tau)? else {
        return Ok(Evaluation { value: Complex64::new(constant_term(kind, k), 0.0), abs_err: 0.0 });
    };
    if use_q(params.mode, z) || k < 3 {
        let (v, _) = q_engine(kind, k, z, params)?;
        return enforce(v, params);
    }
    eval_lattice(kind, k, tau, params)
}

/// `(c, d)` of `γ` as `i128`, for exact sign tests in the lattice sum.
fn cd_i128(gamma: &UniModularMatrix) -> Result<(i128, i128), EvalError> {
    let c = gamma.c().to_i64().ok_or(EvalError::MatrixTooLarge)?;
    let d = gamma.d().to_i64().ok_or(EvalError::MatrixTooLarge)?;
    if c.unsigned_abs() > 1 << 40 || d.unsigned_abs() > 1 << 40 {
        return Err(EvalError::MatrixTooLarge);
    }
    Ok((c as i128, d as i128))
}

/// Raw slashed lattice sum of `E_k|γ` at a point near `F̄`, with derivative.
fn lattice_slashed_e(
    k: u32,
    gamma: &UniModularMatrix,
    tau: Complex64,
    params: &EvalParams,
) -> Result<(Evaluation, Evaluation), EvalError> {
    let (c, d) = cd_i128(gamma)?;
    let kap = lattice::kappa(tau);
    let max_norm = params
        .lattice_radius
        .unwrap_or_else(|| lattice::choose_norm(k, params.target_abs_err, kap, params.radius_cap));
    let sum = lattice::slashed_sum(k, c, d, tau, max_norm.floor() as u64);
    let tail = lattice::tail_estimate(k, max_norm.floor(), kap);
    // derivative tail: one extra power of |μ| and a factor k·m ≤ k·√N
    let dtail = k as f64 * lattice::tail_estimate(k, max_norm.floor(), kap) * kap.powf(-0.5);
    let rounding = 8.0 * f64::EPSILON * sum.abs_sum;
    Ok((
        Evaluation { value: sum.value, abs_err: tail + rounding },
        Evaluation { value: sum.derivative, abs_err: dtail + k as f64 * rounding },
    ))
}

/// Coprime lattice evaluation; the point is first reduced into `F̄` and the
/// sum is taken there for the slashed series.
pub fn eval_lattice(
    kind: SeriesKind,
    k: u32,
    tau: &HalfPlanePoint,
    params: &EvalParams,
) -> Result<Evaluation, EvalError> {
    check_weight(kind, k)?;
    if k == 2 {
        return Err(EvalError::WeightTwoLattice);
    }
    if k < 3 {
        return Err(EvalError::InvalidWeight { kind, k });
    }
    let Some(z) = finite_point(tau)? else {
        return Ok(Evaluation { value: Complex64::new(constant_term(kind, k), 0.0), abs_err: 0.0 });
    };
    let (reduced, g) = moebius::reduce_to_fundamental(&HalfPlanePoint::Finite(z))?;
    let zr = reduced.as_complex().expect("finite");
    // τ = γ τ' with γ = g⁻¹, and E(γτ') = (cτ'+d)^k · E|γ(τ')
    let gamma = g.inverse();
    let (e_slash, _) = lattice_slashed_e(k, &gamma, zr, &params.clone().with_target(params.target_abs_err))?;
    let j = gamma.automorphy(zr).powu(k);
    let e = e_slash.scaled(j);
    enforce(e_to_kind(kind, k, e)?, params)
}

/// Converts an evaluation of `E_k` into the requested kind.
fn e_to_kind(kind: SeriesKind, k: u32, e: Evaluation) -> Result<Evaluation, EvalError> {
    Ok(match kind {
        SeriesKind::E => e,
        SeriesKind::G => e.scaled(Complex64::new(special::zeta_value(k), 0.0)),
        SeriesKind::GG if k % 2 == 1 => {
            let shifted = Evaluation { value: e.value - 1.0, abs_err: e.abs_err };
            shifted.scaled(gg_over_e_minus_one(k))
        }
        SeriesKind::GG => e.scaled(Complex64::new(gg_constant(k), 0.0)),
    })
}

/// A slashed series `f|γ(τ) = (cτ+d)^{-k} f(γτ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlashedSeries {
    pub kind: SeriesKind,
    pub k: u32,
    pub gamma: UniModularMatrix,
}

impl SlashedSeries {
    pub fn new(kind: SeriesKind, k: u32, gamma: UniModularMatrix) -> Self {
        Self { kind, k, gamma }
    }

    pub fn eval(&self, tau: Complex64, params: &EvalParams) -> Result<Evaluation, EvalError> {
        eval_slashed(self.kind, self.k, &self.gamma, &HalfPlanePoint::Finite(tau), params)
    }

    /// Value and derivative of a fixed nonzero multiple of `f|γ`, scaled to be
    /// of unit size on `F̄`: `E_k|γ` for kind `E`, and `E_k|γ - (cτ+d)^{-k}` (a
    /// multiple of `𝔾_k|γ`) for kind `GG` at odd weight. The multiple does not
    /// depend on `τ`, so zeros and arguments variations are those of `f|γ`.
    pub fn normalized(
        &self,
        tau: Complex64,
        params: &EvalParams,
    ) -> Result<(Evaluation, Evaluation), EvalError> {
        let (kind, k) = (self.kind, self.k);
        check_weight(kind, k)?;
        if k < 3 && !(self.gamma.is_identity()) {
            return Err(EvalError::InvalidWeight { kind, k });
        }
        let q_route = (self.gamma.is_identity() || (k % 2 == 0 && kind == SeriesKind::E))
            && (use_q(params.mode, tau) || k < 3);
        if q_route {
            return match kind {
                SeriesKind::GG if k % 2 == 1 && k >= 3 => {
                    // c_k·𝔾_k = E_k - 1 without the cancellation of forming E_k - 1;
                    // the target is taken relative to the leading term q
                    let q_abs = (-2.0 * PI * tau.im).exp().min(1.0);
                    let rel = params.clone().with_target(params.target_abs_err * q_abs);
                    let (v, dv) = q_engine(SeriesKind::GG, k, tau, &rel)?;
                    let ck = special::ck(k);
                    Ok((v.scaled(ck), dv.scaled(ck)))
                }
                SeriesKind::GG => q_engine(SeriesKind::GG, k, tau, params),
                _ => q_engine(SeriesKind::E, k, tau, params),
            };
        }
        let (e, de) = lattice_slashed_e(k, &self.gamma, tau, params)?;
        match kind {
            SeriesKind::GG if k % 2 == 1 => {
                let j = self.gamma.automorphy(tau);
                let jk = j.powu(k).inv();
                let [_, _, c, _] = self.gamma.to_f64();
                let djk = jk / j * (-(k as f64) * c);
                Ok((
                    Evaluation { value: e.value - jk, abs_err: e.abs_err },
                    Evaluation { value: de.value - djk, abs_err: de.abs_err },
                ))
            }
            _ => Ok((e, de)),
        }
    }

    /// The multiplier turning [`Self::normalized`] into the true `f|γ`.
    pub fn normalization(&self) -> Complex64 {
        match self.kind {
            SeriesKind::E => Complex64::new(1.0, 0.0),
            SeriesKind::G => Complex64::new(special::zeta_value(self.k), 0.0),
            SeriesKind::GG if self.k % 2 == 1 && self.k >= 3 => gg_over_e_minus_one(self.k),
            SeriesKind::GG => Complex64::new(1.0, 0.0),
        }
    }
}

/// Evaluates `f|γ(τ)`. The identity gives the unslashed value; other `γ` use
/// the signed coprime lattice sum at `τ` (which should lie near `F̄`). For
/// `γ ≠ 1` the accuracy target applies to the unit-size normalized series.
pub fn eval_slashed(
    kind: SeriesKind,
    k: u32,
    gamma: &UniModularMatrix,
    tau: &HalfPlanePoint,
    params: &EvalParams,
) -> Result<Evaluation, EvalError> {
    check_weight(kind, k)?;
    if gamma.is_identity() {
        return eval_series(kind, k, tau, params);
    }
    let Some(z) = finite_point(tau)? else {
        // f|γ(τ) → ±1 (E) as Im τ → ∞; 𝔾 loses its (cτ+d) term
        let s = SlashedSeries::new(kind, k, gamma.clone());
        let far = Complex64::new(0.0, 1e6);
        let (v, _) = s.normalized(far, params)?;
        return Ok(enforce(v, params)?.scaled(s.normalization()));
    };
    if k < 3 {
        return Err(EvalError::InvalidWeight { kind, k });
    }
    let s = SlashedSeries::new(kind, k, gamma.clone());
    let (v, _) = s.normalized(z, params)?;
    Ok(enforce(v, params)?.scaled(s.normalization()))
}

/// `Ê(θ) = e^{ikθ/2}·f|γ(e^{iθ})`, with the half power taken from `θ` itself.
pub fn hat_eval(
    kind: SeriesKind,
    k: u32,
    gamma: &UniModularMatrix,
    theta: f64,
    params: &EvalParams,
) -> Result<Evaluation, EvalError> {
    let (lo, hi) = (PI / 3.0, 2.0 * PI / 3.0);
    if !(theta >= lo - 1e-12 && theta <= hi + 1e-12) {
        return Err(EvalError::AngleOutOfRange(theta));
    }
    let tau = HalfPlanePoint::Finite(Complex64::from_polar(1.0, theta));
    let v = eval_slashed(kind, k, gamma, &tau, params)?;
    Ok(v.scaled(Complex64::from_polar(1.0, k as f64 * theta / 2.0)))
}

/// `d/dτ f|γ(τ)`, term by term.
pub fn derivative(
    kind: SeriesKind,
    k: u32,
    gamma: &UniModularMatrix,
    tau: &HalfPlanePoint,
    params: &EvalParams,
) -> Result<Evaluation, EvalError> {
    check_weight(kind, k)?;
    let Some(z) = finite_point(tau)? else {
        return Ok(Evaluation { value: Complex64::new(0.0, 0.0), abs_err: 0.0 });
    };
    if gamma.is_identity() && !use_q(params.mode, z) && k >= 3 {
        // chain rule through the reduction: f(τ) = (cτ'+d)^k·f|γ(τ'), τ' = gτ
        let (reduced, g) = moebius::reduce_to_fundamental(&HalfPlanePoint::Finite(z))?;
        let zr = reduced.as_complex().expect("finite");
        let gamma_inv = g.inverse();
        let s = SlashedSeries::new(kind, k, gamma_inv.clone());
        let (v, dv) = s.normalized(zr, &params.clone().lenient())?;
        let j = gamma_inv.automorphy(zr);
        let [_, _, c, _] = gamma_inv.to_f64();
        let kf = k as f64;
        let jk = j.powu(k);
        // d/dτ' [(cτ'+d)^k F(τ')] for F the normalized function; the GG shift
        // term (cτ'+d)^{-k} turns into the constant -1 after multiplication.
        let dprime = jk * (dv.value + v.value * (kf * c) / j);
        let [_, _, gc, gd] = g.to_f64();
        let dtau_prime = Complex64::new(gc * z.re + gd, gc * z.im).powu(2).inv();
        let val = dprime * dtau_prime * s.normalization();
        let err = (dv.abs_err + v.abs_err * kf * c.abs() / j.norm())
            * jk.norm()
            * dtau_prime.norm()
            * s.normalization().norm();
        return enforce(Evaluation { value: val, abs_err: err }, params);
    }
    if !gamma.is_identity() && k < 3 {
        return Err(EvalError::InvalidWeight { kind, k });
    }
    let s = SlashedSeries::new(kind, k, gamma.clone());
    let (_, dv) = s.normalized(z, params)?;
    enforce(dv.scaled(s.normalization()), params)
}

/// Certified bound on the omitted coprime lattice tail `m² + n² > M` for
/// `τ ∈ F̄`: `2^{k/2+2} M^{(3-k)/2} / (k - 3)`.
pub fn tail_bound(k: u32, m: f64) -> Result<f64, EvalError> {
    if k < 9 || m < 5.0 {
        return Err(EvalError::InvalidWeight { kind: SeriesKind::E, k });
    }
    Ok(lattice::tail_estimate(k, m, 0.5))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::gamma_for_lambda;
    use crate::ExtRational;

    fn p() -> EvalParams {
        EvalParams::default()
    }

    fn pt(re: f64, im: f64) -> HalfPlanePoint {
        HalfPlanePoint::finite(re, im).unwrap()
    }

    #[test]
    fn constant_terms_at_cusp() {
        let inf = HalfPlanePoint::i_infinity();
        assert_eq!(eval_series(SeriesKind::E, 23, &inf, &p()).unwrap().value.re, 1.0);
        assert_eq!(eval_series(SeriesKind::GG, 23, &inf, &p()).unwrap().value.re, 0.0);
        assert_eq!(eval_series(SeriesKind::GG, 1, &inf, &p()).unwrap().value.re, 0.25);
    }

    #[test]
    fn e4_vanishes_at_rho() {
        let rho = HalfPlanePoint::Finite(moebius::rho());
        let v = eval_series(SeriesKind::E, 4, &rho, &p()).unwrap();
        assert!(v.value.norm() < 1e-10, "{:?}", v);
    }

    #[test]
    fn lattice_matches_q_expansion() {
        let params = p().with_target(1e-11);
        let tau = pt(0.0, 2.0);
        let q = eval_series(SeriesKind::E, 7, &tau, &params).unwrap();
        let l = eval_lattice(SeriesKind::E, 7, &tau, &params.clone().lenient()).unwrap();
        assert!((q.value - l.value).norm() <= q.abs_err + l.abs_err, "{q:?} {l:?}");
    }

    #[test]
    fn g_is_zeta_times_e() {
        let tau = pt(0.0, 1.0);
        let params = p().with_target(1e-9);
        let g = eval_lattice(SeriesKind::G, 5, &tau, &params.clone().lenient()).unwrap();
        let e = eval_lattice(SeriesKind::E, 5, &tau, &params.clone().lenient()).unwrap();
        assert!((g.value - e.value * zeta_value(5)).norm() < 1e-12);
    }

    #[test]
    fn leading_four_terms_at_i() {
        let i = Complex64::new(0.0, 1.0);
        let lead = 1.0 + i.powi(-23) + (i + 1.0).powi(-23) + (i - 1.0).powi(-23);
        let v = eval_series(SeriesKind::E, 23, &pt(0.0, 1.0), &p()).unwrap();
        assert!((v.value - lead).norm() <= crate::bounds::rsd_bound(23).unwrap());
    }

    #[test]
    fn slash_by_identity_is_unslashed() {
        let tau = pt(0.2, 1.3);
        let id = UniModularMatrix::identity();
        for kind in [SeriesKind::E, SeriesKind::GG] {
            let a = eval_slashed(kind, 11, &id, &tau, &p()).unwrap();
            let b = eval_series(kind, 11, &tau, &p()).unwrap();
            assert!((a.value - b.value).norm() <= 2e-10 * (1.0 + b.value.norm()));
        }
    }

    #[test]
    fn slashed_tends_to_unit_modulus_at_cusp() {
        let g = gamma_for_lambda(&ExtRational::from_ratio(2, 5));
        let v = eval_slashed(SeriesKind::E, 9, &g, &pt(0.0, 10.0), &p()).unwrap();
        assert!((v.value.norm() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn slashed_agrees_with_slash_definition() {
        // E|γ(τ) = (cτ+d)^{-k} E(γτ), with γ·i in the q-expansion range
        let g = UniModularMatrix::new(1, 0, 1, 1).unwrap();
        let tau = Complex64::new(0.0, 1.0);
        let img = moebius::moebius_f64(&g, tau);
        assert!(img.im >= 0.5);
        let params = p().with_target(1e-12).with_mode(EvalMode::QExpansion).lenient();
        let direct = eval_series(SeriesKind::E, 23, &HalfPlanePoint::Finite(img), &params).unwrap();
        let j = g.automorphy(tau).powi(-23);
        let expect = direct.value * j;
        let got = eval_slashed(SeriesKind::E, 23, &g, &HalfPlanePoint::Finite(tau), &p()).unwrap();
        let budget = direct.abs_err * j.norm() + got.abs_err;
        assert!((got.value - expect).norm() <= budget, "{got:?} vs {expect}");
    }

    #[test]
    fn even_hat_is_real_at_i() {
        for k in [4u32, 6, 12, 24] {
            let v = hat_eval(SeriesKind::E, k, &UniModularMatrix::identity(), PI / 2.0, &p()).unwrap();
            assert!(v.value.im.abs() < 1e-10, "k={k}: {v:?}");
        }
        let v = hat_eval(SeriesKind::E, 23, &UniModularMatrix::identity(), PI / 2.0, &p()).unwrap();
        assert!(v.value.im.abs() > 1e-4);
    }

    #[test]
    fn hat_rejects_out_of_range_angle() {
        assert!(matches!(
            hat_eval(SeriesKind::E, 5, &UniModularMatrix::identity(), 0.2, &p()),
            Err(EvalError::AngleOutOfRange(_))
        ));
    }

    #[test]
    fn derivative_of_constant_series() {
        let v = derivative(SeriesKind::E, 1, &UniModularMatrix::identity(), &pt(0.1, 1.0), &p()).unwrap();
        assert_eq!(v.value, Complex64::new(0.0, 0.0));
        let far = derivative(SeriesKind::GG, 23, &UniModularMatrix::identity(), &HalfPlanePoint::i_infinity(), &p())
            .unwrap();
        assert_eq!(far.value.norm(), 0.0);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let z = Complex64::new(0.25, 1.1);
        let id = UniModularMatrix::identity();
        let params = p().with_target(1e-13).lenient();
        let f = |w: Complex64| eval_series(SeriesKind::E, 23, &HalfPlanePoint::Finite(w), &params).unwrap().value;
        let h = 1e-6;
        let fd = (f(z + h) - f(z - h)) / (2.0 * h);
        let d = derivative(SeriesKind::E, 23, &id, &HalfPlanePoint::Finite(z), &params).unwrap().value;
        assert!((d - fd).norm() <= 1e-4 * d.norm(), "{d} vs {fd}");
    }

    #[test]
    fn lattice_rejects_weight_two() {
        assert_eq!(
            eval_lattice(SeriesKind::E, 2, &pt(0.0, 1.0), &p()),
            Err(EvalError::WeightTwoLattice)
        );
    }

    #[test]
    fn tail_bound_power_law() {
        let a = tail_bound(11, 100.0).unwrap();
        let b = tail_bound(11, 400.0).unwrap();
        assert!((b / a - 4f64.powf(-4.0)).abs() < 1e-15);
        assert!(tail_bound(7, 100.0).is_err());
        let closed = 6.0 * 5f64.sqrt() / 2.5f64.powf(11.5);
        assert!(tail_bound(23, 5.0).unwrap() <= closed);
    }
}
