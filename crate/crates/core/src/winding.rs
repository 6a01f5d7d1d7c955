//! Argument-principle counting of zeros in translates `γF̄`.
//!
//! The contour is `∂F̄` truncated at height `T`, traversed positively:
//! top edge, `L` downwards, the arc `C`, then `R` upwards. Zeros found on the
//! contour are cut out by small circular detours through the interior and
//! re-added with the weight given by the swept angle (`1/2` on an edge, `1/6`
//! at `ρ` and `ρ + 1`).

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::eisenstein::{self, EvalError, EvalMode, EvalParams, Evaluation, SeriesKind, SlashedSeries};
use crate::moebius::{self, BoundarySegment, Curve, ExtRational, HalfPlanePoint, UniModularMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WindingError {
    #[error("|f| = {modulus:e} at {point} is indistinguishable from a zero on the contour")]
    NearZeroOnContour { point: Complex64, modulus: f64 },
    #[error("phase refinement exceeded depth {depth} near {point}")]
    RefinementCapExceeded { point: Complex64, depth: u32 },
    #[error("raw count {raw} is {dist} away from the nearest multiple of 1/6")]
    UnreliableSnap { raw: f64, dist: f64 },
    #[error("could not isolate the contour zero near {0}")]
    IndentFailed(Complex64),
    #[error("{0}")]
    InvalidInput(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Debug)]
pub struct CountOptions {
    /// Height `T` of the truncating top edge.
    pub top_height: f64,
    /// Largest accepted distance to the nearest multiple of `1/6`.
    pub snap_tol: f64,
    /// Relative dip below neighbouring samples treated as a contour zero.
    pub zero_guard: f64,
    pub max_depth: u32,
    pub initial_samples: usize,
    pub indent_radius: f64,
    /// Cut out and re-weight zeros met on the contour instead of failing.
    pub indent: bool,
    pub eval: EvalParams,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self {
            top_height: 8.0,
            snap_tol: 0.05,
            zero_guard: 1e-6,
            max_depth: 40,
            initial_samples: 64,
            indent_radius: 1e-3,
            indent: true,
            eval: EvalParams {
                target_abs_err: 1e-12,
                radius_cap: 2e5,
                ..EvalParams::default()
            }
            .lenient(),
        }
    }
}

/// Unwrapped argument of `f` sampled along a curve.
#[derive(Clone, Debug, Default)]
pub struct PhaseTrace {
    pub params: Vec<f64>,
    pub phases: Vec<f64>,
}

impl PhaseTrace {
    /// `(φₙ − φ₀)/2π`.
    pub fn variation(&self) -> f64 {
        match (self.phases.first(), self.phases.last()) {
            (Some(a), Some(b)) => (b - a) / TAU,
            _ => 0.0,
        }
    }

    /// Every adjacent step is below `π/2`.
    pub fn is_valid(&self) -> bool {
        self.phases.windows(2).all(|w| (w[1] - w[0]).abs() < PI / 2.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMethod {
    Voa,
    Shortcut,
    SignChange,
}

impl std::fmt::Display for CountMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CountMethod::Voa => "voa",
            CountMethod::Shortcut => "shortcut",
            CountMethod::SignChange => "sign_change",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedCount {
    pub value: Rational64,
    pub raw: f64,
    pub snap_dist: f64,
    pub method: CountMethod,
    /// Zeros met on the contour and re-added with their boundary weight.
    pub boundary_zeros: Vec<Complex64>,
}

/// Snaps to the nearest multiple of `1/6`.
pub fn snap(raw: f64, tol: f64, method: CountMethod) -> Result<WeightedCount, WindingError> {
    if !raw.is_finite() {
        return Err(WindingError::UnreliableSnap { raw, dist: f64::INFINITY });
    }
    let sixths = (raw * 6.0).round();
    let dist = (raw - sixths / 6.0).abs();
    if dist >= tol {
        return Err(WindingError::UnreliableSnap { raw, dist });
    }
    Ok(WeightedCount {
        value: Rational64::new(sixths as i64, 6),
        raw,
        snap_dist: dist,
        method,
        boundary_zeros: Vec::new(),
    })
}

struct Sample {
    s: f64,
    value: Complex64,
}

fn sample<F>(f: &F, curve: &Curve, s: f64) -> Result<(Sample, f64), WindingError>
where
    F: Fn(Complex64) -> Result<Evaluation, EvalError>,
{
    let z = curve.point(s);
    let e = f(z)?;
    let m = e.value.norm();
    if !(m > 4.0 * e.abs_err) {
        return Err(WindingError::NearZeroOnContour { point: z, modulus: m });
    }
    Ok((Sample { s, value: e.value }, m))
}

/// Variation of the argument of `f` along `curve`, as a phase trace.
///
/// Intervals are bisected until every phase step is below `π/2`. A sample
/// whose modulus is within the error budget, or smaller than `zero_guard`
/// times an adjacent sample, is reported as a zero on the contour.
pub fn voa_trace<F>(f: &F, curve: &Curve, opts: &CountOptions) -> Result<PhaseTrace, WindingError>
where
    F: Fn(Complex64) -> Result<Evaluation, EvalError>,
{
    let n = opts.initial_samples.max(2);
    let mut coarse = Vec::with_capacity(n + 1);
    let mut mods = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let (smp, m) = sample(f, curve, i as f64 / n as f64)?;
        coarse.push(smp);
        mods.push(m);
    }
    for i in 0..=n {
        let nb = [i.checked_sub(1), Some(i + 1)]
            .into_iter()
            .flatten()
            .filter_map(|j| mods.get(j))
            .fold(0.0f64, |a, &b| a.max(b));
        if mods[i] < opts.zero_guard * nb {
            return Err(WindingError::NearZeroOnContour { point: curve.point(coarse[i].s), modulus: mods[i] });
        }
    }

    let mut trace = PhaseTrace::default();
    let mut phase = coarse[0].value.arg();
    trace.params.push(0.0);
    trace.phases.push(phase);
    let mut stack: Vec<(Sample, u32)> = Vec::new();
    let mut left = coarse.remove(0);
    for right in coarse {
        stack.push((right, 0));
        while let Some((r, depth)) = stack.pop() {
            let step = (r.value / left.value).arg();
            if step.abs() < PI / 2.0 {
                phase += step;
                trace.params.push(r.s);
                trace.phases.push(phase);
                left = r;
                continue;
            }
            let mid = 0.5 * (left.s + r.s);
            if depth >= opts.max_depth {
                return Err(WindingError::RefinementCapExceeded { point: curve.point(mid), depth });
            }
            let (m, mm) = sample(f, curve, mid)?;
            if mm < opts.zero_guard * left.value.norm().max(r.value.norm()) {
                return Err(WindingError::NearZeroOnContour { point: curve.point(mid), modulus: mm });
            }
            stack.push((r, depth + 1));
            stack.push((m, depth + 1));
        }
    }
    Ok(trace)
}

/// `VOA_S(f) = (arg f(end) − arg f(start))/2π` along `curve`.
pub fn voa_segment<F>(f: &F, curve: &Curve, opts: &CountOptions) -> Result<f64, WindingError>
where
    F: Fn(Complex64) -> Result<Evaluation, EvalError>,
{
    Ok(voa_trace(f, curve, opts)?.variation())
}

fn check_kind(kind: SeriesKind, k: u32) -> Result<(), WindingError> {
    let ok = match kind {
        SeriesKind::E => k >= 3,
        SeriesKind::GG => k >= 3 && k % 2 == 1,
        SeriesKind::G => false,
    };
    if ok {
        Ok(())
    } else {
        Err(WindingError::InvalidInput(format!("counting is not defined for {kind} with k = {k}")))
    }
}

/// Order of vanishing `ν_α` of `E_k` or `𝔾_k` at the cusp `α`.
///
/// At `α = ∞` this is the index of the first nonzero Fourier coefficient; at
/// finite `α` the slashed series is evaluated at height `T = 8`.
pub fn cusp_order(kind: SeriesKind, k: u32, alpha: &ExtRational) -> Result<u32, WindingError> {
    check_kind(kind, k)?;
    if alpha.is_infinite() {
        let constant = match kind {
            SeriesKind::GG => eisenstein::gg_constant(k),
            _ => 1.0,
        };
        return Ok(if constant == 0.0 { 1 } else { 0 });
    }
    let gamma = cusp_matrix(alpha);
    let s = SlashedSeries::new(kind, k, gamma);
    let params = EvalParams::default().lenient();
    let (v, _) = s.normalized(Complex64::new(0.0, 8.0), &params)?;
    Ok(if v.value.norm() > 1e-3 { 0 } else { 1 })
}

/// A matrix `γ` with `γ(i∞) = α`.
fn cusp_matrix(alpha: &ExtRational) -> UniModularMatrix {
    // γ_λ sends λ to ∞, so its inverse sends ∞ to λ
    moebius::gamma_for_lambda(alpha).inverse()
}

struct Indent {
    center: Complex64,
    radius: f64,
    multiplicity: i64,
    weight: f64,
    on_contour: bool,
    inside: bool,
}

fn base_loop(top: f64) -> Vec<Curve> {
    [BoundarySegment::Top(top), BoundarySegment::L, BoundarySegment::C, BoundarySegment::R]
        .into_iter()
        .map(|b| b.curve(top))
        .collect()
}

/// Parameters `s ∈ [0, 1]` where `|curve(s) − c| = r`.
fn circle_crossings(curve: &Curve, c: Complex64, r: f64) -> Vec<f64> {
    let mut out = Vec::new();
    match *curve {
        Curve::Line { from, to } => {
            let u = to - from;
            let w = from - c;
            let a = u.norm_sqr();
            let b = 2.0 * (w.re * u.re + w.im * u.im);
            let cc = w.norm_sqr() - r * r;
            let disc = b * b - 4.0 * a * cc;
            if disc >= 0.0 && a > 0.0 {
                let sq = disc.sqrt();
                for s in [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)] {
                    if (0.0..=1.0).contains(&s) {
                        out.push(s);
                    }
                }
            }
        }
        Curve::Arc { center, radius, from, to } => {
            let d = (c - center).norm();
            if d > 0.0 {
                let cosd = (radius * radius + d * d - r * r) / (2.0 * radius * d);
                if cosd.abs() <= 1.0 {
                    let beta = (c - center).arg();
                    let delta = cosd.acos();
                    for phi in [beta - delta, beta + delta] {
                        for n in -2..=2 {
                            let s = (phi + TAU * n as f64 - from) / (to - from);
                            if (0.0..=1.0).contains(&s) {
                                out.push(s);
                            }
                        }
                    }
                }
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

fn loop_point(pieces: &[Curve], g: f64) -> Complex64 {
    let i = (g.floor() as usize).min(pieces.len() - 1);
    pieces[i].point(g - i as f64)
}

/// Pieces of the loop between global parameters `ga < gb`.
fn loop_range(pieces: &[Curve], ga: f64, gb: f64, out: &mut Vec<Curve>) {
    let mut g = ga;
    while g < gb - 1e-15 {
        let i = (g.floor() as usize).min(pieces.len() - 1);
        let end = gb.min(i as f64 + 1.0);
        let (s0, s1) = (g - i as f64, end - i as f64);
        if s1 > s0 {
            out.push(pieces[i].sub(s0, s1));
        }
        g = i as f64 + 1.0;
    }
}

/// Cuts each indent disk out of the loop, detouring clockwise through the
/// interior. Returns the new loop and the swept angle of each detour.
fn indented_loop(top: f64, indents: &[Indent]) -> Result<Vec<Curve>, WindingError> {
    let pieces = base_loop(top);
    let mut cuts = Vec::new();
    for ind in indents {
        let mut gs: Vec<f64> = Vec::new();
        for (i, p) in pieces.iter().enumerate() {
            for s in circle_crossings(p, ind.center, ind.radius) {
                let g = i as f64 + s;
                if gs.iter().all(|h| (h - g).abs() > 1e-12) {
                    gs.push(g);
                }
            }
        }
        gs.sort_by(f64::total_cmp);
        if gs.len() != 2 {
            return Err(WindingError::IndentFailed(ind.center));
        }
        cuts.push((gs[0], gs[1], ind.center, ind.radius));
    }
    cuts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if cuts.windows(2).any(|w| w[1].0 <= w[0].1) {
        return Err(WindingError::IndentFailed(cuts[0].2));
    }
    let mut out = Vec::new();
    let mut g = 0.0;
    for &(g1, g2, c, r) in &cuts {
        loop_range(&pieces, g, g1, &mut out);
        let (p1, p2) = (loop_point(&pieces, g1), loop_point(&pieces, g2));
        let a1 = (p1 - c).arg();
        let sweep = (a1 - (p2 - c).arg()).rem_euclid(TAU);
        out.push(Curve::Arc { center: c, radius: r, from: a1, to: a1 - sweep });
        g = g2;
    }
    loop_range(&pieces, g, pieces.len() as f64, &mut out);
    Ok(out)
}

fn dist_to_loop(z: Complex64, top: f64) -> f64 {
    let h = 0.75f64.sqrt();
    let seg = |a: Complex64, b: Complex64| {
        let u = b - a;
        let t = (((z - a) * u.conj()).re / u.norm_sqr()).clamp(0.0, 1.0);
        (a + u * t - z).norm()
    };
    let arc = {
        let th = z.arg().clamp(PI / 3.0, 2.0 * PI / 3.0);
        (Complex64::from_polar(1.0, th) - z).norm()
    };
    let l = seg(Complex64::new(-0.5, top), Complex64::new(-0.5, h));
    let r = seg(Complex64::new(0.5, h), Complex64::new(0.5, top));
    let t = seg(Complex64::new(0.5, top), Complex64::new(-0.5, top));
    l.min(r).min(t).min(arc)
}

fn inside_truncated(z: Complex64, top: f64) -> bool {
    z.re.abs() < 0.5 && z.norm() > 1.0 && z.im < top
}

/// Newton refinement of a zero of `f` from `z0` using the analytic derivative;
/// `m` is the multiplicity used in the step `z − m f/f′`.
pub(crate) fn newton<F>(fd: &F, z0: Complex64, m: f64, tol: f64, max_iter: usize) -> Result<Complex64, WindingError>
where
    F: Fn(Complex64) -> Result<(Evaluation, Evaluation), EvalError>,
{
    let mut z = z0;
    for _ in 0..max_iter {
        let (v, d) = fd(z)?;
        if v.value == Complex64::new(0.0, 0.0) {
            return Ok(z);
        }
        if d.value.norm() == 0.0 {
            return Err(WindingError::IndentFailed(z));
        }
        let step = v.value / d.value * m;
        z -= step;
        if !(z.im > 0.0) {
            return Err(WindingError::IndentFailed(z0));
        }
        if step.norm() <= tol * z.norm().max(1.0) {
            return Ok(z);
        }
    }
    Ok(z)
}

/// Zero of `f` near `p`, with its multiplicity from the winding number on a
/// circle of radius `r`.
pub(crate) fn isolate<F, G>(f: &F, fd: &G, p: Complex64, opts: &CountOptions) -> Result<(Complex64, i64, f64), WindingError>
where
    F: Fn(Complex64) -> Result<Evaluation, EvalError>,
    G: Fn(Complex64) -> Result<(Evaluation, Evaluation), EvalError>,
{
    let z1 = newton(fd, p, 1.0, 1e-15, 60)?;
    // f is only resolved to its error budget, so the flagged point may sit
    // as far from the zero as the budget allows
    let (v, d) = fd(z1)?;
    let r = (8.0 * v.abs_err / d.value.norm()).clamp(opts.indent_radius, 0.05);
    if (z1 - p).norm() > r {
        return Err(WindingError::IndentFailed(p));
    }
    let circle = Curve::Arc { center: z1, radius: r, from: 0.0, to: TAU };
    let w = voa_segment(f, &circle, opts)?;
    let m = w.round();
    if m < 1.0 || (w - m).abs() > 0.1 {
        return Err(WindingError::IndentFailed(p));
    }
    let z = if m > 1.0 { newton(fd, z1, m, 1e-15, 60)? } else { z1 };
    Ok((z, m as i64, r))
}

/// A simple zero re-polished with whichever engine, q-series or lattice,
/// leaves the smaller radius within which its position is uncertain.
pub(crate) fn polish_simple(series: &SlashedSeries, z: Complex64, r: f64, opts: &CountOptions) -> (Complex64, f64) {
    let mut best = (z, 1e-12);
    for mode in [None, Some(EvalMode::Lattice)] {
        let mut fine = opts.eval.clone().with_target(1e-15).lenient();
        if let Some(m) = mode {
            fine = fine.with_mode(m);
        }
        let fd = |z: Complex64| series.normalized(z, &fine);
        let polished = newton(&fd, z, 1.0, 1e-17, 8).and_then(|w| {
            let (v, d) = fd(w)?;
            Ok((w, 4.0 * v.abs_err / d.value.norm() + 1e-15))
        });
        if let Ok((w, tol)) = polished {
            if (w - z).norm() < r && tol < best.1 {
                best = (w, tol);
            }
        }
    }
    best
}

/// Weighted number of zeros `N_λ` of `kind` of weight `k` in `γF̄`.
///
/// Sums the variation of the argument of `f|γ` around the truncated
/// boundary of `F̄`, adds the order at the cusp `γ(i∞)` and snaps to the
/// nearest multiple of `1/6`.
pub fn count_zeros(
    kind: SeriesKind,
    k: u32,
    lambda: &ExtRational,
    opts: &CountOptions,
) -> Result<WeightedCount, WindingError> {
    check_kind(kind, k)?;
    let gamma = moebius::gamma_for_lambda(lambda);
    let mut top = opts.top_height;
    if kind == SeriesKind::GG && gamma.is_identity() {
        // zeros on the verticals reach up to just below t₁ = cot(π/k)/2
        top = top.max(0.5 / (PI / k as f64).tan() + 1.0);
    }
    let cusp = cusp_order(kind, k, &gamma.cusp())?;
    let series = SlashedSeries::new(kind, k, gamma);
    let params = opts.eval.clone();
    let fd = |z: Complex64| series.normalized(z, &params);
    let f = |z: Complex64| fd(z).map(|(v, _)| v);
    let mut indents: Vec<Indent> = Vec::new();
    'outer: for _ in 0..64 {
        let pieces = indented_loop(top, &indents)?;
        let mut total = 0.0;
        for piece in &pieces {
            match voa_segment(&f, piece, opts) {
                Ok(v) => total += v,
                Err(
                    WindingError::NearZeroOnContour { point, .. }
                    | WindingError::RefinementCapExceeded { point, .. },
                ) if opts.indent => {
                    let (z, m, r) = isolate(&f, &fd, point, opts)?;
                    let (z, tol) = if m == 1 { polish_simple(&series, z, r, opts) } else { (z, 1e-6) };
                    if indents.iter().any(|d| (d.center - z).norm() < d.radius + r) {
                        return Err(WindingError::IndentFailed(z));
                    }
                    let d = dist_to_loop(z, top);
                    // the geometric weight, not the detour angle: the disk may also hold a corner
                    let weight = moebius::boundary_weight(&HalfPlanePoint::Finite(z), tol)
                        .map(|w| w.to_f64().unwrap_or(0.0))
                        .unwrap_or(0.0);
                    indents.push(Indent {
                        weight,
                        center: z,
                        radius: r,
                        multiplicity: m,
                        on_contour: d <= tol,
                        inside: inside_truncated(z, top),
                    });
                    continue 'outer;
                }
                Err(e) => return Err(e),
            }
        }
        let mut boundary = Vec::new();
        for ind in &indents {
            let w = if ind.on_contour {
                boundary.push(ind.center);
                ind.weight
            } else if ind.inside {
                1.0
            } else {
                0.0
            };
            total += w * ind.multiplicity as f64;
        }
        let mut out = snap(total + cusp as f64, opts.snap_tol, CountMethod::Voa)?;
        out.boundary_zeros = boundary;
        return Ok(out);
    }
    Err(WindingError::IndentFailed(Complex64::new(0.0, top)))
}

/// `N_∞(f) = k/12 + VOA_C(f̂)` for periodic `f` without zeros on `C`, with
/// `f̂(θ) = e^{ikθ/2} f(e^{iθ})`.
pub fn count_shortcut(kind: SeriesKind, k: u32, opts: &CountOptions) -> Result<WeightedCount, WindingError> {
    check_kind(kind, k)?;
    let series = SlashedSeries::new(kind, k, UniModularMatrix::identity());
    let kf = k as f64;
    // on |τ| = 1 the lattice sum resolves E_k - 1 far below the q-series floor;
    // the relative guard is off since for 3 | k a zero of 𝔾_k sits just above
    // each corner, off C but within 1e-11 of it
    let mut opts = opts.clone();
    let target = opts.eval.target_abs_err.min(1e-15);
    opts.eval = opts.eval.with_mode(EvalMode::Lattice).with_target(target);
    opts.zero_guard = 0.0;
    let params = opts.eval.clone();
    let hat = |z: Complex64| {
        series.normalized(z, &params).map(|(v, _)| Evaluation {
            value: v.value * Complex64::from_polar(1.0, kf * z.arg() / 2.0),
            abs_err: v.abs_err,
        })
    };
    let arc = BoundarySegment::C.curve(opts.top_height);
    let v = voa_segment(&hat, &arc, &opts)?;
    snap(kf / 12.0 + v, opts.snap_tol, CountMethod::Shortcut)
}

/// Real value `𝔾_k(1/2 + it)` with an error budget relative to `e^{-2πt}`.
pub fn gg_on_vertical(k: u32, t: f64) -> Result<Evaluation, WindingError> {
    let params = EvalParams::default()
        .with_target(1e-14 * (-2.0 * PI * t).exp().min(1.0))
        .with_mode(eisenstein::EvalMode::QExpansion)
        .lenient();
    let z = crate::moebius::HalfPlanePoint::Finite(Complex64::new(0.5, t));
    Ok(eisenstein::eval_series(SeriesKind::GG, k, &z, &params)?)
}

/// Number of sign changes of `t ↦ 𝔾_k(1/2 + it)` on `[√3/2, t_max)`.
pub fn vertical_sign_changes(k: u32, t_max: f64) -> Result<usize, WindingError> {
    Ok(vertical_brackets(k, t_max)?.len())
}

/// Intervals `(t₁, t₂)` of `[√3/2, t_max]` on whose ends `𝔾_k(1/2 + it)`
/// has opposite, resolved signs.
pub(crate) fn vertical_brackets(k: u32, t_max: f64) -> Result<Vec<(f64, f64)>, WindingError> {
    if k < 3 || k % 2 == 0 {
        return Err(WindingError::InvalidInput(format!("k = {k} must be odd and at least 3")));
    }
    let t0 = 0.75f64.sqrt();
    let mut grid: Vec<f64> = Vec::new();
    let steps = ((t_max - t0) / 0.005).ceil().max(1.0) as usize;
    // from the corner itself: for 3 | k a zero sits within 1e-5 above it
    for i in 0..steps {
        grid.push(t0 + (t_max - t0) * i as f64 / steps as f64);
    }
    for ell in 1..=k / 6 {
        let t = 0.5 / (PI * ell as f64 / k as f64).tan();
        if t > t0 && t < t_max {
            grid.push(t);
        }
    }
    grid.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    for t in grid {
        let e = gg_on_vertical(k, t)?;
        let v = e.value.re;
        if v.abs() <= e.abs_err {
            continue;
        }
        let sgn = v.signum();
        if let Some((tp, sp)) = last {
            if sp != sgn {
                out.push((tp, t));
            }
        }
        last = Some((t, sgn));
    }
    Ok(out)
}

/// Count of `𝔾_k` in `F̄` from the vertical sign changes: each change is a
/// zero on `R` paired with its translate on `L` (weight `1/2` each), plus the
/// simple zero at the cusp.
pub fn count_by_sign_changes(k: u32) -> Result<WeightedCount, WindingError> {
    let t_max = 0.5 / (PI / k as f64).tan() + 1.0;
    let n = vertical_sign_changes(k, t_max.max(2.0))?;
    let nu = cusp_order(SeriesKind::GG, k, &ExtRational::Infinity)?;
    let raw = 2.0 * 0.5 * n as f64 + nu as f64;
    snap(raw, 0.05, CountMethod::SignChange)
}

impl WeightedCount {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> CountOptions {
        CountOptions::default()
    }

    fn konst(z: Complex64) -> Result<Evaluation, EvalError> {
        let _ = z;
        Ok(Evaluation { value: Complex64::new(3.0, 4.0), abs_err: 0.0 })
    }

    #[test]
    fn constant_has_no_variation() {
        let c = BoundarySegment::C.curve(8.0);
        assert_eq!(voa_segment(&konst, &c, &opts()).unwrap(), 0.0);
    }

    #[test]
    fn identity_along_arc_is_one_sixth() {
        let id = |z: Complex64| Ok(Evaluation { value: z, abs_err: 0.0 });
        let arc = Curve::Arc { center: Complex64::new(0.0, 0.0), radius: 1.0, from: PI / 3.0, to: 2.0 * PI / 3.0 };
        let v = voa_segment(&id, &arc, &opts()).unwrap();
        assert!((v - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn trace_steps_are_below_quarter_turn() {
        let f = |z: Complex64| Ok(Evaluation { value: (z * 40.0).exp(), abs_err: 0.0 });
        let line = Curve::Line { from: Complex64::new(0.0, 1.0), to: Complex64::new(0.0, 3.0) };
        let t = voa_trace(&f, &line, &opts()).unwrap();
        assert!(t.is_valid());
        assert!((t.variation() - 80.0 / TAU).abs() < 1e-12);
    }

    #[test]
    fn zero_on_segment_is_reported() {
        let f = |z: Complex64| Ok(Evaluation { value: z - Complex64::new(0.0, 2.0), abs_err: 1e-15 });
        let line = Curve::Line { from: Complex64::new(0.0, 1.0), to: Complex64::new(0.0, 3.0) };
        match voa_segment(&f, &line, &opts()) {
            Err(WindingError::NearZeroOnContour { point, .. }) => assert!((point.im - 2.0).abs() < 1e-6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn crossings_of_line_and_arc() {
        let line = Curve::Line { from: Complex64::new(0.0, 0.0), to: Complex64::new(2.0, 0.0) };
        let s = circle_crossings(&line, Complex64::new(1.0, 0.0), 0.5);
        assert_eq!(s.len(), 2);
        assert!((s[0] - 0.25).abs() < 1e-15 && (s[1] - 0.75).abs() < 1e-15);
        let c = BoundarySegment::C.curve(8.0);
        let s = circle_crossings(&c, Complex64::new(0.0, 1.0), 1e-3);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn indent_sweeps_give_boundary_weights() {
        let sweep = |center| {
            let ind = Indent { center, radius: 1e-3, multiplicity: 1, weight: 0.0, on_contour: true, inside: false };
            let pieces = indented_loop(8.0, &[ind]).unwrap();
            let arc = pieces.iter().find_map(|p| match p {
                Curve::Arc { radius, from, to, .. } if *radius == 1e-3 => Some(from - to),
                _ => None,
            });
            arc.unwrap() / TAU
        };
        assert!((sweep(Complex64::new(0.0, 1.0)) - 0.5).abs() < 1e-3);
        assert!((sweep(moebius::rho()) - 1.0 / 6.0).abs() < 1e-3);
        assert!((sweep(moebius::rho() + 1.0) - 1.0 / 6.0).abs() < 1e-3);
    }

    #[test]
    fn cusp_orders() {
        for k in [3u32, 11, 23] {
            assert_eq!(cusp_order(SeriesKind::GG, k, &ExtRational::Infinity).unwrap(), 1);
            assert_eq!(cusp_order(SeriesKind::E, k, &ExtRational::Infinity).unwrap(), 0);
        }
        assert_eq!(cusp_order(SeriesKind::GG, 23, &ExtRational::integer(0)).unwrap(), 0);
        assert_eq!(cusp_order(SeriesKind::E, 11, &ExtRational::from_ratio(2, 5)).unwrap(), 0);
    }

    #[test]
    fn periodic_left_and_right_cancel() {
        let s = SlashedSeries::new(SeriesKind::E, 23, UniModularMatrix::identity());
        let p = opts().eval;
        let f = |z: Complex64| s.normalized(z, &p).map(|(v, _)| v);
        let l = voa_segment(&f, &BoundarySegment::L.curve(8.0), &opts()).unwrap();
        let r = voa_segment(&f, &BoundarySegment::R.curve(8.0), &opts()).unwrap();
        assert!((l + r).abs() < 1e-6);
    }

    #[test]
    fn count_examples() {
        let c = |kind, k, l: ExtRational| count_zeros(kind, k, &l, &opts()).unwrap().value;
        assert_eq!(c(SeriesKind::E, 23, ExtRational::Infinity), 2.into());
        assert_eq!(c(SeriesKind::E, 15, ExtRational::integer(0)), 2.into());
        assert_eq!(c(SeriesKind::GG, 23, ExtRational::Infinity), 4.into());
        assert_eq!(c(SeriesKind::E, 4, ExtRational::from_ratio(7, 3)), Rational64::new(1, 3));
    }

    #[test]
    fn shortcut_matches_contour() {
        for k in [5u32, 11, 17, 23] {
            let a = count_shortcut(SeriesKind::E, k, &opts()).unwrap();
            let b = count_zeros(SeriesKind::E, k, &ExtRational::Infinity, &opts()).unwrap();
            assert!((a.raw - b.raw).abs() < 1e-4, "k={k}: {} vs {}", a.raw, b.raw);
        }
    }

    #[test]
    fn shortcut_next_to_corner_zeros() {
        for (k, n) in [(15u32, 3), (27, 5), (51, 9)] {
            assert_eq!(count_shortcut(SeriesKind::GG, k, &opts()).unwrap().value, Rational64::from(n));
        }
    }

    #[test]
    fn vertical_sign_change_examples() {
        assert_eq!(vertical_sign_changes(23, 5.0).unwrap(), 3);
        assert_eq!(vertical_sign_changes(25, 5.0).unwrap(), 3);
        assert_eq!(vertical_sign_changes(3, 2.0).unwrap(), 0);
    }

    #[test]
    fn snapping() {
        assert_eq!(snap(0.49, 0.05, CountMethod::Voa).unwrap().value, Rational64::new(1, 2));
        assert!(snap(0.25, 0.05, CountMethod::Voa).is_err());
    }
}
