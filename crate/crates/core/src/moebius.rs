//! `SL₂(ℤ)` arithmetic, cusps and the geometry of the standard fundamental
//! domain `F̄ = {|τ| ≥ 1, |Re τ| ≤ 1/2} ∪ {i∞}`.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Default absolute tolerance for deciding membership of `∂F̄`.
pub const BOUNDARY_SNAP_TOL: f64 = 1e-9;

const REDUCTION_ITER_CAP: usize = 10_000;

/// The elliptic point `ρ = -1/2 + i√3/2`.
pub fn rho() -> Complex64 {
    Complex64::new(-0.5, 0.75f64.sqrt())
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MoebiusError {
    #[error("determinant of [[{a},{b}],[{c},{d}]] is {det}, expected 1")]
    NotUnimodular {
        a: BigInt,
        b: BigInt,
        c: BigInt,
        d: BigInt,
        det: BigInt,
    },
    #[error("imaginary part must be positive, got {0}")]
    NotInUpperHalfPlane(f64),
    #[error("reduction did not terminate after {0} steps")]
    IterationCap(usize),
    #[error("point {0} lies outside the closed fundamental domain")]
    OutsideFundamentalDomain(Complex64),
    #[error("operation needs a finite point")]
    NotFinite,
    #[error("cannot parse extended rational from {0:?}")]
    Parse(String),
}

/// An element of `ℙ¹(ℚ) = ℚ ∪ {∞}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtRational {
    Finite(BigRational),
    Infinity,
}

impl ExtRational {
    pub fn from_ratio(p: i64, q: i64) -> Self {
        if q == 0 {
            ExtRational::Infinity
        } else {
            ExtRational::Finite(BigRational::new(p.into(), q.into()))
        }
    }

    pub fn integer(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRational::Infinity)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtRational::Finite(r) => r.to_f64().unwrap_or(f64::NAN),
            ExtRational::Infinity => f64::INFINITY,
        }
    }

    /// `-λ`; infinity is its own negative in `ℙ¹(ℚ)`.
    pub fn neg(&self) -> Self {
        match self {
            ExtRational::Finite(r) => ExtRational::Finite(-r.clone()),
            ExtRational::Infinity => ExtRational::Infinity,
        }
    }

    pub fn abs(&self) -> Self {
        match self {
            ExtRational::Finite(r) => ExtRational::Finite(r.abs()),
            ExtRational::Infinity => ExtRational::Infinity,
        }
    }

    /// Compares `|self|` with the rational `p/q`; infinity is larger than everything.
    pub fn abs_cmp(&self, p: i64, q: i64) -> std::cmp::Ordering {
        match self {
            ExtRational::Infinity => std::cmp::Ordering::Greater,
            ExtRational::Finite(r) => r.abs().cmp(&BigRational::new(p.into(), q.into())),
        }
    }

    pub fn is_one_of(&self, ints: &[i64]) -> bool {
        match self {
            ExtRational::Infinity => false,
            ExtRational::Finite(r) => ints
                .iter()
                .any(|&n| *r == BigRational::from_integer(n.into())),
        }
    }

    /// Parses a decimal literal into the rational with denominator at most
    /// `max_den` closest to it (continued fraction convergents).
    pub fn from_decimal(x: f64, max_den: i64) -> Self {
        let sign = if x < 0.0 { -1 } else { 1 };
        let mut y = x.abs();
        let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
        for _ in 0..64 {
            let a = y.floor();
            let ai = a as i64;
            let p2 = ai.saturating_mul(p1).saturating_add(p0);
            let q2 = ai.saturating_mul(q1).saturating_add(q0);
            if q2 > max_den {
                break;
            }
            (p0, q0, p1, q1) = (p1, q1, p2, q2);
            let frac = y - a;
            if frac < 1e-12 {
                break;
            }
            y = 1.0 / frac;
        }
        Self::from_ratio(sign * p1, q1)
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Infinity => write!(f, "inf"),
            ExtRational::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            ExtRational::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl FromStr for ExtRational {
    type Err = MoebiusError;

    /// Accepts `inf`, `∞`, `p/q`, integers and decimals.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let err = || MoebiusError::Parse(s.to_string());
        match t {
            "inf" | "Inf" | "infinity" | "∞" | "-inf" | "+inf" => return Ok(ExtRational::Infinity),
            _ => {}
        }
        if let Some((p, q)) = t.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| err())?;
            let q: BigInt = q.trim().parse().map_err(|_| err())?;
            if q.is_zero() {
                return Ok(ExtRational::Infinity);
            }
            return Ok(ExtRational::Finite(BigRational::new(p, q)));
        }
        if let Ok(n) = t.parse::<BigInt>() {
            return Ok(ExtRational::Finite(BigRational::from_integer(n)));
        }
        let x: f64 = t.parse().map_err(|_| err())?;
        if !x.is_finite() {
            return Err(err());
        }
        Ok(ExtRational::from_decimal(x, 1_000_000))
    }
}

/// `γ = (a b; c d)` with `ad - bc = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniModularMatrix {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl UniModularMatrix {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Result<Self, MoebiusError> {
        let (a, b, c, d) = (a.into(), b.into(), c.into(), d.into());
        let det = &a * &d - &b * &c;
        if !det.is_one() {
            return Err(MoebiusError::NotUnimodular { a, b, c, d, det });
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity() -> Self {
        Self::raw(1, 0, 0, 1)
    }

    /// `S = (0 -1; 1 0)`.
    pub fn s() -> Self {
        Self::raw(0, -1, 1, 0)
    }

    /// `Tⁿ = (1 n; 0 1)`.
    pub fn t_pow(n: i64) -> Self {
        Self::raw(1, n, 0, 1)
    }

    fn raw(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        }
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d.clone(),
            b: -self.b.clone(),
            c: -self.c.clone(),
            d: self.a.clone(),
        }
    }

    /// Entries as `f64`, in the order `a, b, c, d`.
    pub fn to_f64(&self) -> [f64; 4] {
        [&self.a, &self.b, &self.c, &self.d].map(|x| x.to_f64().unwrap_or(f64::NAN))
    }

    /// `λ(γ) = -d/c = γ⁻¹(∞)`.
    pub fn lambda(&self) -> ExtRational {
        lambda_of(self)
    }

    /// The cusp `γ(i∞) = a/c`.
    pub fn cusp(&self) -> ExtRational {
        if self.c.is_zero() {
            ExtRational::Infinity
        } else {
            ExtRational::Finite(BigRational::new(self.a.clone(), self.c.clone()))
        }
    }

    /// `cτ + d`.
    pub fn automorphy(&self, tau: Complex64) -> Complex64 {
        let [_, _, c, d] = self.to_f64();
        Complex64::new(c * tau.re + d, c * tau.im)
    }
}

impl Mul for &UniModularMatrix {
    type Output = UniModularMatrix;

    fn mul(self, o: &UniModularMatrix) -> UniModularMatrix {
        UniModularMatrix {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }
}

impl fmt::Display for UniModularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

/// A point of `𝕳 ∪ ℙ¹(ℚ)`.
#[derive(Clone, Debug, PartialEq)]
pub enum HalfPlanePoint {
    Finite(Complex64),
    Cusp(ExtRational),
}

impl HalfPlanePoint {
    pub fn finite(re: f64, im: f64) -> Result<Self, MoebiusError> {
        if !(im > 0.0) || !re.is_finite() || !im.is_finite() {
            return Err(MoebiusError::NotInUpperHalfPlane(im));
        }
        Ok(HalfPlanePoint::Finite(Complex64::new(re, im)))
    }

    pub fn i_infinity() -> Self {
        HalfPlanePoint::Cusp(ExtRational::Infinity)
    }

    pub fn as_complex(&self) -> Option<Complex64> {
        match self {
            HalfPlanePoint::Finite(z) => Some(*z),
            HalfPlanePoint::Cusp(_) => None,
        }
    }

    pub fn is_i_infinity(&self) -> bool {
        matches!(self, HalfPlanePoint::Cusp(ExtRational::Infinity))
    }
}

/// Extended Euclid on `BigInt`: returns `(g, x, y)` with `px + qy = g`.
fn ext_gcd(p: &BigInt, q: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = p.extended_gcd(q);
    (e.gcd, e.x, e.y)
}

/// The canonical matrix with `λ(γ) = λ`: `c = q > 0`, `d = -p` and `a` reduced
/// into `[0, q)`. The identity for `λ = ∞`.
pub fn gamma_for_lambda(lambda: &ExtRational) -> UniModularMatrix {
    match lambda {
        ExtRational::Infinity => UniModularMatrix::identity(),
        ExtRational::Finite(r) => {
            let p = r.numer().clone();
            let q = r.denom().clone();
            // want a·(-p) - b·q = 1, i.e. a·p + b·q = -1
            let (_, x, _) = ext_gcd(&p, &q);
            let a = (-x).mod_floor(&q);
            let b = (-BigInt::one() - &a * &p) / &q;
            UniModularMatrix {
                a,
                b,
                c: q,
                d: -p,
            }
        }
    }
}

pub fn lambda_of(gamma: &UniModularMatrix) -> ExtRational {
    if gamma.c.is_zero() {
        ExtRational::Infinity
    } else {
        ExtRational::Finite(BigRational::new(-gamma.d.clone(), gamma.c.clone()))
    }
}

pub fn apply_moebius(gamma: &UniModularMatrix, tau: &HalfPlanePoint) -> HalfPlanePoint {
    match tau {
        HalfPlanePoint::Finite(z) => HalfPlanePoint::Finite(moebius_f64(gamma, *z)),
        HalfPlanePoint::Cusp(x) => HalfPlanePoint::Cusp(moebius_cusp(gamma, x)),
    }
}

/// `(aτ+b)/(cτ+d)` with the imaginary part taken from `Im τ / |cτ+d|²`.
pub fn moebius_f64(gamma: &UniModularMatrix, z: Complex64) -> Complex64 {
    let [a, b, c, d] = gamma.to_f64();
    let num = Complex64::new(a * z.re + b, a * z.im);
    let den = Complex64::new(c * z.re + d, c * z.im);
    let w = num / den;
    Complex64::new(w.re, z.im / den.norm_sqr())
}

fn moebius_cusp(gamma: &UniModularMatrix, x: &ExtRational) -> ExtRational {
    let (num, den) = match x {
        ExtRational::Infinity => (gamma.a.clone(), gamma.c.clone()),
        ExtRational::Finite(r) => {
            let (p, q) = (r.numer(), r.denom());
            (&gamma.a * p + &gamma.b * q, &gamma.c * p + &gamma.d * q)
        }
    };
    if den.is_zero() {
        ExtRational::Infinity
    } else {
        ExtRational::Finite(BigRational::new(num, den))
    }
}

/// Maps a finite point into `F̄`. Returns `(τ', γ)` with `τ' = γτ`.
///
/// Points on `Re τ = 1/2` are moved to `Re τ = -1/2`, and points on the unit
/// circle with `Re τ > 0` are reflected by `S`.
pub fn reduce_to_fundamental(
    tau: &HalfPlanePoint,
) -> Result<(HalfPlanePoint, UniModularMatrix), MoebiusError> {
    let mut z = tau.as_complex().ok_or(MoebiusError::NotFinite)?;
    if !(z.im > 0.0) {
        return Err(MoebiusError::NotInUpperHalfPlane(z.im));
    }
    const EPS: f64 = 1e-14;
    let mut gamma = UniModularMatrix::identity();
    for _ in 0..REDUCTION_ITER_CAP {
        // Re z lands in [-1/2, 1/2)
        let n = (z.re + 0.5).floor() as i64;
        if n != 0 {
            z.re -= n as f64;
            gamma = &UniModularMatrix::t_pow(-n) * &gamma;
        }
        let r2 = z.norm_sqr();
        if r2 < 1.0 - EPS || (r2 <= 1.0 + EPS && z.re > EPS) {
            let w = -1.0 / z;
            z = Complex64::new(w.re, z.im / r2);
            gamma = &UniModularMatrix::s() * &gamma;
            continue;
        }
        return Ok((HalfPlanePoint::Finite(z), gamma));
    }
    Err(MoebiusError::IterationCap(REDUCTION_ITER_CAP))
}

pub fn in_fundamental_domain(z: Complex64, tol: f64) -> bool {
    z.im > 0.0 && z.norm() >= 1.0 - tol && z.re.abs() <= 0.5 + tol
}

/// Weight `w(τ)` of a point of `F̄`: `1/6` at `ρ, ρ+1`, `1/2` elsewhere on the
/// boundary, `1` in the interior and at `i∞`.
pub fn boundary_weight(tau: &HalfPlanePoint, tol: f64) -> Result<Rational64, MoebiusError> {
    let z = match tau {
        HalfPlanePoint::Cusp(ExtRational::Infinity) => return Ok(Rational64::one()),
        HalfPlanePoint::Cusp(_) => return Err(MoebiusError::NotFinite),
        HalfPlanePoint::Finite(z) => *z,
    };
    if !in_fundamental_domain(z, tol) {
        return Err(MoebiusError::OutsideFundamentalDomain(z));
    }
    let r = rho();
    if (z - r).norm() <= tol || (z - r - 1.0).norm() <= tol {
        return Ok(Rational64::new(1, 6));
    }
    if (z.norm() - 1.0).abs() <= tol || (z.re.abs() - 0.5).abs() <= tol {
        return Ok(Rational64::new(1, 2));
    }
    Ok(Rational64::one())
}

/// The three pieces of `∂F̄` plus the truncating top edge, positively oriented.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundarySegment {
    /// `Re τ = -1/2`, traversed downwards from height `T` to `ρ`.
    L,
    /// Unit circle arc from `ρ` to `ρ + 1`.
    C,
    /// `Re τ = 1/2`, traversed upwards from `ρ + 1` to height `T`.
    R,
    /// Horizontal edge at height `T` from `1/2 + iT` to `-1/2 + iT`.
    Top(f64),
}

impl BoundarySegment {
    /// The segment as a parametrised curve; `top` truncates `L` and `R`.
    pub fn curve(self, top: f64) -> Curve {
        let h = 0.75f64.sqrt();
        match self {
            BoundarySegment::L => Curve::Line {
                from: Complex64::new(-0.5, top),
                to: Complex64::new(-0.5, h),
            },
            BoundarySegment::C => Curve::Arc {
                center: Complex64::new(0.0, 0.0),
                radius: 1.0,
                from: 2.0 * std::f64::consts::FRAC_PI_3,
                to: std::f64::consts::FRAC_PI_3,
            },
            BoundarySegment::R => Curve::Line {
                from: Complex64::new(0.5, h),
                to: Complex64::new(0.5, top),
            },
            BoundarySegment::Top(t) => Curve::Line {
                from: Complex64::new(0.5, t),
                to: Complex64::new(-0.5, t),
            },
        }
    }
}

/// A line segment or circular arc, parametrised by `s ∈ [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Curve {
    Line {
        from: Complex64,
        to: Complex64,
    },
    /// Angles in radians; the arc runs from `from` to `to` (either direction).
    Arc {
        center: Complex64,
        radius: f64,
        from: f64,
        to: f64,
    },
}

impl Curve {
    pub fn point(&self, s: f64) -> Complex64 {
        match *self {
            Curve::Line { from, to } => from + (to - from) * s,
            Curve::Arc {
                center,
                radius,
                from,
                to,
            } => center + Complex64::from_polar(radius, from + (to - from) * s),
        }
    }

    pub fn start(&self) -> Complex64 {
        self.point(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.point(1.0)
    }

    /// Restriction to the parameter window `[s0, s1]`, reparametrised to `[0, 1]`.
    pub fn sub(&self, s0: f64, s1: f64) -> Curve {
        match *self {
            Curve::Line { .. } => Curve::Line {
                from: self.point(s0),
                to: self.point(s1),
            },
            Curve::Arc {
                center,
                radius,
                from,
                to,
            } => Curve::Arc {
                center,
                radius,
                from: from + (to - from) * s0,
                to: from + (to - from) * s1,
            },
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Curve::Line { from, to } => (to - from).norm(),
            Curve::Arc {
                radius, from, to, ..
            } => radius * (to - from).abs(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: i64, b: i64, c: i64, d: i64) -> UniModularMatrix {
        UniModularMatrix::new(a, b, c, d).unwrap()
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_for_lambda(&ExtRational::from_ratio(2, 5)), m(2, -1, 5, -2));
        assert_eq!(gamma_for_lambda(&ExtRational::integer(0)), m(0, -1, 1, 0));
        assert_eq!(gamma_for_lambda(&ExtRational::from_ratio(-1, 2)), m(1, 0, 2, 1));
        assert!(gamma_for_lambda(&ExtRational::Infinity).is_identity());
    }

    #[test]
    fn lambda_round_trip() {
        for (p, q) in [(2, 5), (-7, 3), (1, 1), (-1, 1), (0, 1), (13, 4)] {
            let l = ExtRational::from_ratio(p, q);
            assert_eq!(lambda_of(&gamma_for_lambda(&l)), l);
        }
    }

    #[test]
    fn determinant_checked() {
        assert!(UniModularMatrix::new(1, 1, 1, 1).is_err());
        assert!(UniModularMatrix::new(2, 1, 1, 1).is_ok());
    }

    #[test]
    fn inverse_and_product() {
        let g = m(2, -1, 5, -2);
        assert!((&g * &g.inverse()).is_identity());
        let z = Complex64::new(0.1, 1.3);
        let w = moebius_f64(&(&g * &UniModularMatrix::s()), z);
        let w2 = moebius_f64(&g, moebius_f64(&UniModularMatrix::s(), z));
        assert!((w - w2).norm() < 1e-14);
    }

    #[test]
    fn cusp_images() {
        let g = m(2, -1, 5, -2);
        assert_eq!(g.cusp(), ExtRational::from_ratio(2, 5));
        let back = apply_moebius(&g.inverse(), &HalfPlanePoint::Cusp(g.cusp()));
        assert!(back.is_i_infinity());
    }

    #[test]
    fn reduction_examples() {
        let (w, g) = reduce_to_fundamental(&HalfPlanePoint::Finite(Complex64::new(3.3, 0.1))).unwrap();
        let w = w.as_complex().unwrap();
        assert!(in_fundamental_domain(w, 1e-12));
        let z = moebius_f64(&g, Complex64::new(3.3, 0.1));
        assert!((z - w).norm() < 1e-10);
        let (r, _) = reduce_to_fundamental(&HalfPlanePoint::Finite(rho() + 1.0)).unwrap();
        assert!((r.as_complex().unwrap() - rho()).norm() < 1e-12);
        assert!(reduce_to_fundamental(&HalfPlanePoint::i_infinity()).is_err());
    }

    #[test]
    fn weights() {
        let w = |z: Complex64| boundary_weight(&HalfPlanePoint::Finite(z), 1e-9).unwrap();
        assert_eq!(w(rho()), Rational64::new(1, 6));
        assert_eq!(w(rho() + 1.0), Rational64::new(1, 6));
        assert_eq!(w(Complex64::new(0.0, 1.0)), Rational64::new(1, 2));
        assert_eq!(w(Complex64::new(0.5, 2.0)), Rational64::new(1, 2));
        assert_eq!(w(Complex64::new(0.1, 2.0)), Rational64::one());
        assert_eq!(boundary_weight(&HalfPlanePoint::i_infinity(), 1e-9).unwrap(), Rational64::one());
        assert!(boundary_weight(&HalfPlanePoint::Finite(Complex64::new(0.0, 0.5)), 1e-9).is_err());
    }

    #[test]
    fn parse_and_display() {
        let l: ExtRational = "-7/3".parse().unwrap();
        assert_eq!(l, ExtRational::from_ratio(-7, 3));
        assert_eq!(l.to_string(), "-7/3");
        let inf: ExtRational = "inf".parse().unwrap();
        assert!(inf.is_infinite());
        assert!("1/0x".parse::<ExtRational>().is_err());
        assert_eq!(ExtRational::from_decimal(0.4, 100), ExtRational::from_ratio(2, 5));
    }

    #[test]
    fn boundary_curve_closes() {
        let top = 8.0;
        let segs = [BoundarySegment::Top(top), BoundarySegment::L, BoundarySegment::C, BoundarySegment::R];
        for i in 0..4 {
            let a = segs[i].curve(top).end();
            let b = segs[(i + 1) % 4].curve(top).start();
            assert!((a - b).norm() < 1e-14);
        }
        let c = BoundarySegment::C.curve(top);
        assert!((c.length() - PI_THIRD).abs() < 1e-14);
    }

    const PI_THIRD: f64 = std::f64::consts::PI / 3.0;
}
