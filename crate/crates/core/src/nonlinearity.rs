//! Source terms `f`, their primitives `F` and derivatives, and checks of the
//! structural assumptions a superlinear source must satisfy.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{signed_pow, Real};

/// A scalar source term `s ↦ f(s)` with primitive `F(s) = ∫₀ˢ f`.
pub trait SourceTerm<T: Real> {
    fn f(&self, s: T) -> T;
    fn primitive(&self, s: T) -> T;
    /// `f′(s)`; `+∞` where the derivative blows up.
    fn f_prime(&self, s: T) -> T;
}

/// The two closed-form families the solvers accept.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Nonlinearity<T> {
    /// `f(s) = C|s|^{q−2}s`.
    Power { p: T, q: T, c: T },
    /// `f(s) = λ|s|^{p−2}s`.
    Resonant { p: T, lambda: T },
}

impl<T: Real> Nonlinearity<T> {
    pub fn power(p: T, q: T, c: T) -> Result<Self> {
        check_p(p)?;
        if !(q > T::one() && q.is_finite()) {
            return Err(Error::InvalidNonlinearity(format!("q must exceed 1, got {q}")));
        }
        if !(c > T::zero() && c.is_finite()) {
            return Err(Error::InvalidNonlinearity(format!("C must be positive, got {c}")));
        }
        Ok(Self::Power { p, q, c })
    }

    pub fn resonant(p: T, lambda: T) -> Result<Self> {
        check_p(p)?;
        if !(lambda > T::zero() && lambda.is_finite()) {
            return Err(Error::InvalidNonlinearity(format!("lambda must be positive, got {lambda}")));
        }
        Ok(Self::Resonant { p, lambda })
    }

    pub fn p(&self) -> T {
        match *self {
            Self::Power { p, .. } | Self::Resonant { p, .. } => p,
        }
    }

    /// Growth exponent of `f`: `q` for powers, `p` for the resonant family.
    pub fn exponent(&self) -> T {
        match *self {
            Self::Power { q, .. } => q,
            Self::Resonant { p, .. } => p,
        }
    }

    /// Coefficient of `|s|^{exponent−2}s`.
    pub fn coefficient(&self) -> T {
        match *self {
            Self::Power { c, .. } => c,
            Self::Resonant { lambda, .. } => lambda,
        }
    }

    pub fn is_resonant(&self) -> bool {
        matches!(self, Self::Resonant { .. })
    }
}

fn check_p<T: Real>(p: T) -> Result<()> {
    if !(p > T::one() && p.is_finite()) {
        return Err(Error::InvalidNonlinearity(format!("p must exceed 1, got {p}")));
    }
    Ok(())
}

impl<T: Real> SourceTerm<T> for Nonlinearity<T> {
    fn f(&self, s: T) -> T {
        self.coefficient() * signed_pow(s, self.exponent())
    }

    fn primitive(&self, s: T) -> T {
        let r = self.exponent();
        self.coefficient() * s.abs().powf(r) / r
    }

    fn f_prime(&self, s: T) -> T {
        let r = self.exponent();
        let two = T::lit(2.0);
        if s == T::zero() {
            return if r > two {
                T::zero()
            } else if r == two {
                self.coefficient()
            } else {
                T::infinity()
            };
        }
        self.coefficient() * (r - T::one()) * s.abs().powf(r - two)
    }
}

impl<T: Real> fmt::Display for Nonlinearity<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Power { p, q, c } => write!(f, "power(p={p}, q={q}, C={c})"),
            Self::Resonant { p, lambda } => write!(f, "resonant(p={p}, lambda={lambda})"),
        }
    }
}

/// `(f(s), F(s), f′(s))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation<T> {
    pub f: T,
    pub primitive: T,
    pub f_prime: T,
}

pub fn evaluate<T: Real, S: SourceTerm<T> + ?Sized>(nl: &S, s: T) -> Evaluation<T> {
    Evaluation { f: nl.f(s), primitive: nl.primitive(s), f_prime: nl.f_prime(s) }
}

/// The sign-flipped source `g(s) = −f(−s)`, with `G(s) = F(−s)`.
#[derive(Clone, Copy, Debug)]
pub struct SignFlipped<S>(pub S);

impl<T: Real, S: SourceTerm<T>> SourceTerm<T> for SignFlipped<S> {
    fn f(&self, s: T) -> T {
        -self.0.f(-s)
    }

    fn primitive(&self, s: T) -> T {
        self.0.primitive(-s)
    }

    fn f_prime(&self, s: T) -> T {
        self.0.f_prime(-s)
    }
}

/// Piecewise-linear source through user-supplied samples `(sₖ, f(sₖ))`.
///
/// Accepted by the validator for reporting only. Outside the sampled range
/// the end segments are extended linearly.
#[derive(Clone, Debug)]
pub struct Tabulated<T> {
    s: Vec<T>,
    f: Vec<T>,
}

impl<T: Real> Tabulated<T> {
    pub fn new(mut points: Vec<(T, T)>) -> Result<Self> {
        if points.len() < 2 || points.iter().any(|(s, f)| !s.is_finite() || !f.is_finite()) {
            return Err(Error::InvalidNonlinearity("table needs at least two finite points".into()));
        }
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite abscissae"));
        if points.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidNonlinearity("duplicate abscissa in table".into()));
        }
        let (s, f): (Vec<T>, Vec<T>) = points.into_iter().unzip();
        Ok(Self { s, f })
    }

    fn segment(&self, x: T) -> usize {
        let n = self.s.len();
        match self.s.iter().position(|&sk| sk > x) {
            Some(0) => 0,
            Some(k) => k - 1,
            None => n - 2,
        }
        .min(n - 2)
    }

    fn interp(&self, x: T) -> T {
        let k = self.segment(x);
        let t = (x - self.s[k]) / (self.s[k + 1] - self.s[k]);
        self.f[k] + t * (self.f[k + 1] - self.f[k])
    }

    /// Exact integral of the interpolant over `[0, x]`, by trapezoids between
    /// the breakpoints that lie in the interval.
    fn integrate_from_zero(&self, x: T) -> T {
        let (lo, hi, sign) = if x >= T::zero() { (T::zero(), x, T::one()) } else { (x, T::zero(), -T::one()) };
        let mut knots = vec![lo];
        knots.extend(self.s.iter().copied().filter(|&sk| sk > lo && sk < hi));
        knots.push(hi);
        let half = T::lit(0.5);
        let total = knots
            .windows(2)
            .fold(T::zero(), |acc, w| acc + (w[1] - w[0]) * (self.interp(w[0]) + self.interp(w[1])) * half);
        sign * total
    }
}

impl<T: Real> SourceTerm<T> for Tabulated<T> {
    fn f(&self, s: T) -> T {
        self.interp(s)
    }

    fn primitive(&self, s: T) -> T {
        self.integrate_from_zero(s)
    }

    fn f_prime(&self, s: T) -> T {
        let k = self.segment(s);
        (self.f[k + 1] - self.f[k]) / (self.s[k + 1] - self.s[k])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Check {
    Pass,
    Fail(String),
    NotApplicable(String),
}

impl Check {
    pub fn passed(&self) -> bool {
        matches!(self, Check::Pass)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::Pass => write!(f, "pass"),
            Check::Fail(why) => write!(f, "FAIL: {why}"),
            Check::NotApplicable(why) => write!(f, "n/a: {why}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssumptionReport {
    /// Subcritical growth `q < p*`.
    pub subcritical: Check,
    /// `p* = +∞` in the plane for `p ≥ 2`, which makes the growth check vacuous.
    pub critical_exponent_infinite: bool,
    /// `f′(s) > (p−1)f(s)/s > 0` on the samples.
    pub monotonicity: Check,
    /// `limsup_{s→0} f(s)/(|s|^{p−2}s) < λ₁`.
    pub small_s_limit: Check,
    /// `0 < θF(s) ≤ sf(s)` for `|s| > s₀`, with `θ > p`.
    pub superquadratic: Check,
    pub theta: Option<f64>,
}

impl AssumptionReport {
    pub fn all_pass(&self) -> bool {
        self.subcritical.passed()
            && self.monotonicity.passed()
            && self.small_s_limit.passed()
            && self.superquadratic.passed()
    }
}

/// Sampling used by [`validate_assumptions`].
#[derive(Clone, Debug)]
pub struct Sampling<T> {
    /// Nonzero sample points.
    pub samples: Vec<T>,
    /// Estimate of `λ₁(Ω)` for the small-`s` condition.
    pub lambda1: T,
    /// Threshold `s₀` of the superquadraticity condition.
    pub s0: T,
}

impl<T: Real> Sampling<T> {
    /// Symmetric log-spaced samples `±10^k`, `k ∈ [−4, 3]`.
    pub fn standard(lambda1: T) -> Self {
        let samples = (0..=56)
            .map(|i| T::lit(10f64.powf(-4.0 + i as f64 / 8.0)))
            .flat_map(|s| [s, -s])
            .collect();
        Self { samples, lambda1, s0: T::lit(1e-4) }
    }
}

/// Checks the superlinear assumptions for one of the closed-form families.
/// The resonant family is governed by its own theory and reports
/// "not applicable" for the superlinear conditions.
pub fn validate_assumptions<T: Real>(nl: &Nonlinearity<T>, sampling: &Sampling<T>) -> Result<AssumptionReport> {
    let p = nl.p();
    let pstar_inf = p >= T::lit(2.0);
    if nl.is_resonant() {
        let na = || Check::NotApplicable("resonant source".into());
        return Ok(AssumptionReport {
            subcritical: na(),
            critical_exponent_infinite: pstar_inf,
            monotonicity: na(),
            small_s_limit: na(),
            superquadratic: na(),
            theta: None,
        });
    }
    let q = nl.exponent();
    let subcritical = if q <= p {
        Check::Fail(format!("q = {q} must exceed p = {p}"))
    } else if pstar_inf {
        Check::Pass
    } else {
        let pstar = T::lit(2.0) * p / (T::lit(2.0) - p);
        if q < pstar {
            Check::Pass
        } else {
            Check::Fail(format!("q = {q} is not below p* = {pstar}"))
        }
    };
    let mut report = validate_source(nl, p, Some(q), sampling)?;
    report.subcritical = subcritical;
    report.critical_exponent_infinite = pstar_inf;
    Ok(report)
}

/// Checks the sampled conditions for an arbitrary source. `theta` defaults
/// to the smallest ratio `sf(s)/F(s)` over samples beyond `s₀`.
pub fn validate_source<T: Real, S: SourceTerm<T> + ?Sized>(
    source: &S,
    p: T,
    theta: Option<T>,
    sampling: &Sampling<T>,
) -> Result<AssumptionReport> {
    check_p(p)?;
    if sampling.samples.iter().any(|&s| s == T::zero() || !s.is_finite()) {
        return Err(Error::Precondition("samples must be finite and nonzero".into()));
    }
    let monotonicity = sampling
        .samples
        .iter()
        .find_map(|&s| {
            let ratio = (p - T::one()) * source.f(s) / s;
            (!(source.f_prime(s) > ratio && ratio > T::zero()))
                .then(|| Check::Fail(format!("f'(s) > (p-1)f(s)/s > 0 violated at s = {s}")))
        })
        .unwrap_or(Check::Pass);

    let mut small: Vec<T> = sampling.samples.clone();
    small.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).expect("finite"));
    let limsup = small
        .iter()
        .take(4)
        .map(|&s| source.f(s) / signed_pow(s, p))
        .fold(T::neg_infinity(), T::max);
    let small_s_limit = if limsup < sampling.lambda1 {
        Check::Pass
    } else {
        Check::Fail(format!("f(s)/(|s|^(p-2)s) -> {limsup} is not below lambda1 = {}", sampling.lambda1))
    };

    let beyond: Vec<T> = sampling.samples.iter().copied().filter(|s| s.abs() > sampling.s0).collect();
    let theta = theta.unwrap_or_else(|| {
        beyond
            .iter()
            .map(|&s| s * source.f(s) / source.primitive(s))
            .fold(T::infinity(), T::min)
    });
    let slack = T::one() + T::lit(1e-12);
    let superquadratic = if !(theta > p) {
        Check::Fail(format!("theta = {theta} must exceed p = {p}"))
    } else {
        beyond
            .iter()
            .find_map(|&s| {
                let lhs = theta * source.primitive(s);
                let rhs = s * source.f(s);
                (!(lhs > T::zero() && lhs <= rhs * slack))
                    .then(|| Check::Fail(format!("0 < theta F(s) <= s f(s) violated at s = {s}")))
            })
            .unwrap_or(Check::Pass)
    };
    Ok(AssumptionReport {
        subcritical: Check::NotApplicable("growth bound needs a closed form".into()),
        critical_exponent_infinite: p >= T::lit(2.0),
        monotonicity,
        small_s_limit,
        superquadratic,
        theta: theta.to_f64(),
    })
}
