//! Locating individual zeros of `E_k|γ` and `𝔾_k|γ` in `F̄` and mapping them
//! into the translate `γF̄`.
//!
//! Seeds come from the four leading lattice terms, are refined by Newton on
//! the full series, and are checked against the expected weighted count. The
//! zeros of `𝔾_k` on the verticals are found by real bisection instead.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use num_rational::Rational64;
use thiserror::Error;

use crate::bounds::{self, BoundsError};
use crate::eisenstein::{EvalError, EvalMode, EvalParams, Evaluation, SeriesKind, SlashedSeries};
use crate::moebius::{self, ExtRational, HalfPlanePoint, UniModularMatrix};
use crate::winding::{self, CountOptions, WindingError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZeroError {
    #[error("Newton iteration did not converge from {0}")]
    NonConvergence(Complex64),
    #[error("Newton iteration left the upper half-plane from {0}")]
    EscapedDomain(Complex64),
    #[error("found weighted count {found} for {kind}_{k} at λ = {lambda}, expected {expected}")]
    CountMismatch {
        kind: SeriesKind,
        k: u32,
        lambda: ExtRational,
        found: Rational64,
        expected: Rational64,
    },
    #[error(transparent)]
    Winding(#[from] WindingError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocatedZero {
    /// Location in `γF̄` (a cusp for the zero at `i∞`).
    pub point: HalfPlanePoint,
    /// The same zero pulled back to `F̄`.
    pub reduced: HalfPlanePoint,
    /// `|f|γ|` at the reduced point, for the unit-size normalization of `f|γ`.
    pub residual: f64,
    pub lambda: ExtRational,
    pub multiplicity: u32,
    pub is_cusp: bool,
}

/// Standard Newton iteration `z ← z − f/f′`, stopping once the step is below
/// `tol` (relative to `max(1, |z|)`).
pub fn newton_refine<F, D>(f: F, df: D, z0: Complex64, tol: f64, max_iter: usize) -> Result<LocatedZero, ZeroError>
where
    F: Fn(Complex64) -> Complex64,
    D: Fn(Complex64) -> Complex64,
{
    let mut z = z0;
    for _ in 0..max_iter {
        let d = df(z);
        if d.norm() == 0.0 || !d.norm().is_finite() {
            return Err(ZeroError::NonConvergence(z0));
        }
        let step = f(z) / d;
        z -= step;
        if !(z.im > 0.0) || !z.re.is_finite() {
            return Err(ZeroError::EscapedDomain(z0));
        }
        if step.norm() <= tol * z.norm().max(1.0) {
            return Ok(LocatedZero {
                point: HalfPlanePoint::Finite(z),
                reduced: HalfPlanePoint::Finite(z),
                residual: f(z).norm(),
                lambda: ExtRational::Infinity,
                multiplicity: 1,
                is_cusp: false,
            });
        }
    }
    Err(ZeroError::NonConvergence(z0))
}

/// Membership in `F̄` with tolerance `tol`.
fn in_closure(z: Complex64, tol: f64) -> bool {
    moebius::in_fundamental_domain(z, tol)
}

fn leading_params() -> EvalParams {
    EvalParams {
        mode: EvalMode::Lattice,
        lattice_radius: Some(2.0),
        ..EvalParams::default()
    }
    .lenient()
}

fn push_distinct(list: &mut Vec<Complex64>, z: Complex64, tol: f64) {
    if list.iter().all(|w| (w - z).norm() > tol) {
        list.push(z);
    }
}

/// Starting points for zeros of `f|γ` in `F̄`.
///
/// For kind `E` (and `𝔾_k` at finite `λ`) these are the zeros in `F̄` of the
/// four leading lattice terms, reached by Newton from the angles where
/// `τ^{-k}` is `±1`. For `𝔾_k` at `λ = ∞` they are the points `1/2 + it`
/// between consecutive sign-lattice points `z_ℓ`.
pub fn seed_zeros(kind: SeriesKind, k: u32, lambda: &ExtRational) -> Result<Vec<HalfPlanePoint>, ZeroError> {
    let gamma = moebius::gamma_for_lambda(lambda);
    if kind == SeriesKind::GG && gamma.is_identity() {
        return Ok(vertical_brackets(k)?
            .into_iter()
            .map(|(a, b)| HalfPlanePoint::Finite(Complex64::new(0.5, 0.5 * (a + b))))
            .collect());
    }
    let series = SlashedSeries::new(kind, k, gamma);
    let params = leading_params();
    let lead = |z: Complex64| series.normalized(z, &params).map(|(v, _)| v.value).unwrap_or(Complex64::new(f64::NAN, 0.0));
    let dlead = |z: Complex64| series.normalized(z, &params).map(|(_, d)| d.value).unwrap_or(Complex64::new(f64::NAN, 0.0));
    let mut seeds = Vec::new();
    let kf = k as f64;
    for j in 0..(2 * k) {
        let theta = j as f64 * PI / kf;
        if !(PI / 3.0 - 0.2..=2.0 * PI / 3.0 + 0.2).contains(&theta) {
            continue;
        }
        for r in [1.0 + 0.2 / kf, 1.0 + 1.0 / kf] {
            if let Ok(z) = newton_refine(lead, dlead, Complex64::from_polar(r, theta), 1e-13, 60) {
                let w = z.reduced.as_complex().expect("finite");
                if in_closure(w, 1e-9) && w.im < 4.0 {
                    push_distinct(&mut seeds, w, 1e-6);
                }
            }
        }
    }
    seeds.sort_by(|a, b| a.re.total_cmp(&b.re));
    Ok(seeds.into_iter().map(HalfPlanePoint::Finite).collect())
}

/// Brackets `(t_lo, t_hi)` of sign changes of `𝔾_k(1/2 + it)` from `√3/2` up.
fn vertical_brackets(k: u32) -> Result<Vec<(f64, f64)>, ZeroError> {
    let t_max = (0.5 / (PI / k as f64).tan() + 1.0).max(2.0);
    Ok(winding::vertical_brackets(k, t_max)?)
}

fn bisect_vertical(k: u32, mut a: f64, mut b: f64) -> Result<f64, ZeroError> {
    let sa = winding::gg_on_vertical(k, a)?.value.re.signum();
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let v = winding::gg_on_vertical(k, m)?.value.re;
        if v == 0.0 {
            return Ok(m);
        }
        if v.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

fn located(gamma: &UniModularMatrix, lambda: &ExtRational, w: Complex64, residual: f64, m: u32) -> LocatedZero {
    LocatedZero {
        point: HalfPlanePoint::Finite(moebius::moebius_f64(gamma, w)),
        reduced: HalfPlanePoint::Finite(w),
        residual,
        lambda: lambda.clone(),
        multiplicity: m,
        is_cusp: false,
    }
}

/// Zeros of `f|γ` in a box found by recursive argument-principle subdivision,
/// each refined by Newton on `f`.
fn box_search<F, G>(f: &F, fd: &G, lo: Complex64, hi: Complex64, opts: &CountOptions, out: &mut Vec<Complex64>) -> Result<(), ZeroError>
where
    F: Fn(Complex64) -> Result<Evaluation, EvalError>,
    G: Fn(Complex64) -> Result<(Evaluation, Evaluation), EvalError>,
{
    let corners = [lo, Complex64::new(hi.re, lo.im), hi, Complex64::new(lo.re, hi.im)];
    let mut total = 0.0;
    for i in 0..4 {
        let c = moebius::Curve::Line { from: corners[i], to: corners[(i + 1) % 4] };
        total += winding::voa_segment(f, &c, opts)?;
    }
    let n = total.round() as i64;
    if n <= 0 {
        return Ok(());
    }
    let size = (hi - lo).re.max((hi - lo).im);
    if n == 1 && size < 0.02 || size < 1e-4 {
        let z0 = 0.5 * (lo + hi);
        let z = winding::newton(fd, z0, 1.0, 1e-15, 60)?;
        push_distinct(out, z, 1e-9);
        return Ok(());
    }
    // split the longer side, nudged off-centre to avoid symmetric zeros
    let (w, h) = ((hi - lo).re, (hi - lo).im);
    if w >= h {
        let m = lo.re + w * 0.5013;
        box_search(f, fd, lo, Complex64::new(m, hi.im), opts, out)?;
        box_search(f, fd, Complex64::new(m, lo.im), hi, opts, out)
    } else {
        let m = lo.im + h * 0.5013;
        box_search(f, fd, lo, Complex64::new(hi.re, m), opts, out)?;
        box_search(f, fd, Complex64::new(lo.re, m), hi, opts, out)
    }
}

/// Zeros of `kind` of weight `k` in `γF̄`, `λ(γ) = lambda`.
///
/// The weighted total (boundary weights, plus the cusp) must equal the
/// expected count, or failing that the winding count, otherwise
/// [`ZeroError::CountMismatch`] is returned. For
/// `𝔾_k` at `λ = ∞` only the zeros on `Re τ = 1/2` are listed; their
/// translates on `Re τ = -1/2` complete the weight.
pub fn locate_zeros(
    kind: SeriesKind,
    k: u32,
    lambda: &ExtRational,
    opts: &CountOptions,
) -> Result<Vec<LocatedZero>, ZeroError> {
    let expected = bounds::expected_count(kind, k, lambda)?.value;
    let gamma = moebius::gamma_for_lambda(lambda);
    let mut out = Vec::new();

    if kind == SeriesKind::GG && gamma.is_identity() {
        for (a, b) in vertical_brackets(k)? {
            let t = bisect_vertical(k, a, b)?;
            let w = Complex64::new(0.5, t);
            let series = SlashedSeries::new(kind, k, gamma.clone());
            let (v, _) = series.normalized(w, &opts.eval)?;
            out.push(located(&gamma, lambda, w, v.value.norm(), 1));
        }
        out.push(LocatedZero {
            point: HalfPlanePoint::i_infinity(),
            reduced: HalfPlanePoint::i_infinity(),
            residual: 0.0,
            lambda: lambda.clone(),
            multiplicity: 1,
            is_cusp: true,
        });
        let found = Rational64::from_integer(out.len() as i64);
        if found != expected {
            return Err(ZeroError::CountMismatch { kind, k, lambda: lambda.clone(), found, expected });
        }
        return Ok(out);
    }

    let series = SlashedSeries::new(kind, k, gamma.clone());
    let params = opts.eval.clone();
    let fd = |z: Complex64| series.normalized(z, &params);
    let f = |z: Complex64| fd(z).map(|(v, _)| v);
    // refined zero, multiplicity and positional uncertainty
    let finish = |z0: Complex64| -> Option<Zero> {
        let fv = |z| fd(z).map(|(v, _)| v.value).unwrap_or(Complex64::new(f64::NAN, 0.0));
        let dv = |z| fd(z).map(|(_, d)| d.value).unwrap_or(Complex64::new(f64::NAN, 0.0));
        let z1 = newton_refine(fv, dv, z0, 1e-12, 50).ok()?.point.as_complex()?;
        let (z, m, r) = winding::isolate(&f, &fd, z1, opts).ok()?;
        let (z, tol) = if m == 1 { winding::polish_simple(&series, z, r, opts) } else { (z, 1e-6) };
        Some(Zero { z, m: m as u32, tol })
    };

    let mut zeros: Vec<Zero> = Vec::new();
    let add = |zeros: &mut Vec<Zero>, c: Zero| {
        if in_closure(c.z, c.tol) && zeros.iter().all(|w| (w.z - c.z).norm() > 1e-8) {
            zeros.push(c);
        }
    };
    for s in seed_zeros(kind, k, lambda)? {
        if let Some(c) = finish(s.as_complex().expect("finite")) {
            add(&mut zeros, c);
        }
    }
    let mut expected = expected;
    if total(&zeros) != expected {
        // the table can be off by one in the cells next to its class edges
        if let Ok(c) = winding::count_zeros(kind, k, lambda, opts) {
            expected = c.value;
        }
    }
    if total(&zeros) != expected {
        let mut found = Vec::new();
        let top = opts.top_height.min(4.0);
        box_search(&f, &fd, Complex64::new(-0.5 - 3e-3, 0.75), Complex64::new(0.5 + 2e-3, top), opts, &mut found)?;
        zeros.clear();
        for z in found {
            if let Some(c) = finish(z) {
                add(&mut zeros, c);
            }
        }
    }
    let found = total(&zeros);
    if found != expected {
        return Err(ZeroError::CountMismatch { kind, k, lambda: lambda.clone(), found, expected });
    }
    zeros.sort_by(|a, b| a.z.re.total_cmp(&b.z.re));
    let fine = opts.eval.clone().with_target(1e-15).lenient();
    for c in zeros {
        let res = series.normalized(c.z, &fine)?.0.value.norm();
        out.push(located(&gamma, lambda, c.z, res, c.m));
    }
    Ok(out)
}

struct Zero {
    z: Complex64,
    m: u32,
    tol: f64,
}

/// Weighted total of zeros in `F̄`; boundary membership uses each zero's own
/// positional uncertainty.
fn total(zs: &[Zero]) -> Rational64 {
    zs.iter().fold(Rational64::from_integer(0), |acc, c| {
        let w = moebius::boundary_weight(&HalfPlanePoint::Finite(c.z), c.tol).unwrap_or(Rational64::from_integer(0));
        acc + w * Rational64::from_integer(c.m as i64)
    })
}

/// One row of a zero dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct FigureRow {
    pub kind: SeriesKind,
    pub k: u32,
    pub zero: LocatedZero,
    /// Horizontal translate `n` for `n + γF̄`.
    pub shift: i64,
}

impl FigureRow {
    pub fn domain_tag(&self) -> String {
        if self.shift == 0 {
            format!("gF_{}", self.zero.lambda)
        } else {
            format!("gF_{}{:+}", self.zero.lambda, self.shift)
        }
    }

    /// Location including the horizontal shift; `None` for a cusp.
    pub fn location(&self) -> Option<Complex64> {
        self.zero.point.as_complex().map(|z| z + self.shift as f64)
    }
}

pub const CSV_HEADER: &str = "kind,k,lambda,re,im,residual,is_cusp,domain_tag";

/// Zeros over the translates `n + γF̄` for every `λ` in `lambdas` and every
/// shift `n` in `shifts`.
pub fn figure_dataset(
    kind: SeriesKind,
    k: u32,
    lambdas: &[ExtRational],
    shifts: &[i64],
    opts: &CountOptions,
) -> Result<Vec<FigureRow>, ZeroError> {
    let mut rows = Vec::new();
    for l in lambdas {
        let zs = locate_zeros(kind, k, l, opts)?;
        for &n in shifts {
            rows.extend(zs.iter().map(|z| FigureRow { kind, k, zero: z.clone(), shift: n }));
        }
    }
    Ok(rows)
}

/// CSV text with [`CSV_HEADER`]; cusp rows leave `re`, `im` empty.
pub fn to_csv(rows: &[FigureRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let (re, im) = match r.location() {
            Some(z) => (format!("{:.16e}", z.re), format!("{:.16e}", z.im)),
            None => (String::new(), "inf".to_string()),
        };
        let _ = writeln!(
            s,
            "{},{},{},{},{},{:.3e},{},{}",
            r.kind,
            r.k,
            r.zero.lambda,
            re,
            im,
            r.zero.residual,
            r.zero.is_cusp,
            r.domain_tag()
        );
    }
    s
}
