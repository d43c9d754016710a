//! Baffled-piston acoustics for generalized-Zernike velocity profiles.
//!
//! Series values are computed with the piston radius set to one, so they
//! depend on ka only; the named quantities apply the physical prefactors.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expand::connection_coeffs;
use crate::quadrature::{integrate, integrate_complex, wynn_epsilon};
use crate::specfun::{bessel_j_pos, poch, rgamma, spherical_h2, spherical_j};
use crate::transforms::{hankel_radial, sign_pow};
use crate::zernike::{radial_unchecked, ModeIndex};

/// Default number of series terms.
pub const DEFAULT_TERMS: usize = 100;

/// Largest ka for which the named quantities use the power series.
pub const SERIES_KA_MAX: f64 = 5.0;

/// Term ratio above which a series result is flagged as unconverged.
pub const TAIL_WARNING: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcousticSetup {
    /// Wavenumber (1/m).
    pub k: f64,
    /// Piston radius (m).
    pub a: f64,
    /// Density of the medium (kg/m³).
    pub rho0: f64,
    /// Speed of sound (m/s).
    pub c: f64,
}

impl AcousticSetup {
    pub fn new(k: f64, a: f64, rho0: f64, c: f64) -> Result<Self> {
        let s = AcousticSetup { k, a, rho0, c };
        s.validate()?;
        Ok(s)
    }

    /// Unit density, sound speed and radius at the given ka.
    pub fn normalized(ka: f64) -> Result<Self> {
        AcousticSetup::new(ka, 1.0, 1.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("k", self.k), ("a", self.a), ("rho0", self.rho0), ("c", self.c)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "acoustic setup requires {name} > 0 (got {v})"
                )));
            }
        }
        Ok(())
    }

    pub fn ka(&self) -> f64 {
        self.k * self.a
    }
}

/// Parameters of the King-type integral
/// i ∫_0^∞ J_{m+β}(u) J_{n+γ+1}(u) u^{-(β+γ)} (u² - (ka)²)^{-1/2} du.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KingSpec {
    pub m: u32,
    pub beta: f64,
    pub n: u32,
    pub gamma: f64,
}

impl KingSpec {
    pub fn new(m: u32, beta: f64, n: u32, gamma: f64) -> Result<Self> {
        let s = KingSpec { m, beta, n, gamma };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < self.m || (self.n - self.m) % 2 != 0 {
            return Err(Error::Precondition(format!(
                "King integral needs n - m even and nonnegative (n = {}, m = {})",
                self.n, self.m
            )));
        }
        if !(self.beta >= 0.0) || !(self.gamma > -1.0) {
            return Err(Error::Precondition(format!(
                "King integral needs beta >= 0 and gamma > -1 (beta = {}, gamma = {})",
                self.beta, self.gamma
            )));
        }
        Ok(())
    }

    pub fn epsilon(&self) -> f64 {
        0.5 * (self.beta + self.gamma)
    }

    pub fn delta(&self) -> f64 {
        0.5 * (self.beta - self.gamma)
    }

    pub fn p(&self) -> u32 {
        (self.n - self.m) / 2
    }

    pub fn q(&self) -> u32 {
        (self.n + self.m) / 2
    }

    /// Spec of the edge-pressure integral for the profile R_{2j}^{0,α}.
    pub fn edge_pressure(j: u32, alpha: f64) -> Self {
        KingSpec {
            m: 0,
            beta: 0.0,
            n: 2 * j,
            gamma: alpha,
        }
    }

    /// Spec of the reaction-force integral for the profile R_{2j}^{0,α}.
    pub fn reaction_force(j: u32, alpha: f64) -> Self {
        KingSpec {
            m: 0,
            beta: 1.0,
            n: 2 * j,
            gamma: alpha,
        }
    }

    /// Spec of the power cross term between R_{2j1}^{0,α} and R_{2j2}^{0,α}, j1 <= j2.
    pub fn radiated_power(j1: u32, j2: u32, alpha: f64) -> Self {
        KingSpec {
            m: 2 * j1,
            beta: alpha + 1.0,
            n: 2 * j2,
            gamma: alpha,
        }
    }
}

/// Partial sum of the King power series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KingSum {
    pub value: Complex64,
    /// Sum of the even-l terms (the real, sub-cutoff branch).
    pub even: Complex64,
    /// Sum of the odd-l terms (the imaginary, super-cutoff branch).
    pub odd: Complex64,
    /// |last term| / |first nonzero term|.
    pub tail_estimate: f64,
    pub terms: usize,
}

impl KingSum {
    pub fn converged(&self) -> bool {
        self.tail_estimate <= TAIL_WARNING
    }
}

fn king_term(spec: &KingSpec, ka: f64, l: usize) -> Complex64 {
    let eps = spec.epsilon();
    let delta = spec.delta();
    let p = spec.p() as f64;
    let q = spec.q() as f64;
    let h = 0.5 * l as f64;
    let zero_q = poch(-h + 1.0, q);
    let zero_p = poch(-h + 1.0 - spec.beta, p);
    if zero_q == 0.0 || zero_p == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let mag = poch(h + 0.5, eps) / poch(h + eps, delta)
        * zero_q
        * zero_p
        * rgamma(h + p + spec.gamma + 1.0)
        * rgamma(h + q + 2.0 * eps + 1.0)
        * ka.powi(l as i32);
    // (-i)^l
    let phase = match l % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    };
    phase * mag
}

/// Power series in ka of the King-type integral, radius normalized to one.
pub fn king_series(spec: &KingSpec, ka: f64, terms: usize) -> Result<KingSum> {
    spec.validate()?;
    if !(ka > 0.0 && ka.is_finite()) {
        return Err(Error::InvalidParameter(format!("ka = {ka} must be positive")));
    }
    if terms == 0 {
        return Err(Error::InvalidParameter("series needs at least one term".into()));
    }
    let pre = -sign_pow(spec.p() as i64) / (2.0 * ka);
    let mut even = Complex64::new(0.0, 0.0);
    let mut odd = Complex64::new(0.0, 0.0);
    let mut first = 0.0;
    let mut last = 0.0;
    for l in 1..=terms {
        let t = king_term(spec, ka, l) * pre;
        if first == 0.0 {
            first = t.norm();
        }
        if l % 2 == 0 {
            even += t;
        } else {
            odd += t;
        }
        if l + 1 >= terms {
            last = f64::max(last, t.norm());
        }
    }
    let tail_estimate = if first > 0.0 { last / first } else { 0.0 };
    Ok(KingSum {
        value: even + odd,
        even,
        odd,
        tail_estimate,
        terms,
    })
}

/// Hankel asymptotic factors P_ν(x), Q_ν(x).
fn hankel_pq(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..40 {
        let kf = k as f64;
        a *= (mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
        if a.abs() > prev || a.abs() < 1e-18 {
            break;
        }
        prev = a.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            q += sign * a;
        }
    }
    (p, q)
}

/// Non-oscillatory part of the large-argument expansion of J_μ(x) J_ν(x).
fn bessel_product_mean(mu: f64, nu: f64, x: f64) -> f64 {
    let (pm, qm) = hankel_pq(mu, x);
    let (pn, qn) = hankel_pq(nu, x);
    let d = 0.5 * PI * (nu - mu);
    ((pm * pn + qm * qn) * d.cos() + (pm * qn - qm * pn) * d.sin()) / (PI * x)
}

/// Quadrature settings for [`king_oracle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KingOracleSpec {
    /// Absolute tolerance per integration piece.
    pub tol: f64,
    /// Oscillation panels summed before extrapolation.
    pub panels: usize,
}

impl Default for KingOracleSpec {
    fn default() -> Self {
        KingOracleSpec {
            tol: 1e-13,
            panels: 40,
        }
    }
}

/// Branch values of the King-type integral from direct quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KingOracle {
    /// Real integral over 0 <= u <= ka.
    pub below: f64,
    /// Real integral over u >= ka (enters multiplied by i).
    pub above: f64,
    pub error: f64,
}

impl KingOracle {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.below, self.above)
    }
}

/// Quadrature of the King-type integral (radius one) split at the cutoff u = ka.
pub fn king_oracle(spec: &KingSpec, ka: f64, qs: &KingOracleSpec) -> Result<KingOracle> {
    spec.validate()?;
    if !(ka > 0.0 && ka.is_finite()) {
        return Err(Error::InvalidParameter(format!("ka = {ka} must be positive")));
    }
    let mu = spec.m as f64 + spec.beta;
    let nu = spec.n as f64 + spec.gamma + 1.0;
    let two_eps = 2.0 * spec.epsilon();
    let k = ka;
    let jj = |u: f64| bessel_j_pos(mu, u) * bessel_j_pos(nu, u);
    let limit = 4000;

    // u = k sin t removes the inverse square root at the cutoff.
    let below = integrate(
        |t| {
            let u = k * t.sin();
            if u == 0.0 {
                return 0.0;
            }
            jj(u) * u.powf(-two_eps)
        },
        0.0,
        0.5 * PI,
        qs.tol,
        0.0,
        limit,
    )?;

    let u0 = (2.0 * k).max(40.0).max(mu.max(nu).powi(2) + 20.0);
    // u = k cosh s on [k, u0].
    let s0 = (u0 / k).acosh();
    let mid = integrate(
        |s| {
            let u = k * s.cosh();
            jj(u) * u.powf(-two_eps)
        },
        0.0,
        s0,
        qs.tol,
        0.0,
        limit,
    )?;

    let weight = |u: f64| u.powf(-two_eps) / ((u - k) * (u + k)).sqrt();
    // Mean part on [u0, ∞) with u = u0 / s².
    let mean = integrate(
        |s| {
            let u = u0 / (s * s);
            bessel_product_mean(mu, nu, u) * weight(u) * 2.0 * u0 / (s * s * s)
        },
        0.0,
        1.0,
        qs.tol,
        0.0,
        limit,
    )?;
    // Oscillatory remainder, period π in u; half-period panels alternate in
    // sign so the partial sums extrapolate well.
    let mut partial = Vec::with_capacity(qs.panels);
    let mut acc = 0.0;
    let mut osc_err = 0.0;
    for j in 0..qs.panels {
        let lo = u0 + 0.5 * PI * j as f64;
        let piece = integrate_complex(
            |u| Complex64::new((jj(u) - bessel_product_mean(mu, nu, u)) * weight(u), 0.0),
            lo,
            lo + 0.5 * PI,
            qs.tol * 1e-2,
            0.0,
            limit,
        )?;
        acc += piece.value.re;
        osc_err += piece.error;
        partial.push(Complex64::new(acc, 0.0));
    }
    let (osc, wynn_err) = wynn_epsilon(&partial);
    Ok(KingOracle {
        below: below.value,
        above: mid.value + mean.value + osc.re,
        error: below.error + mid.error + mean.error + osc_err + wynn_err,
    })
}

/// Hankel transform of the profile R_{2j}^{0,α}(σ/a) at radial frequency u.
pub fn profile_hankel(j: u32, alpha: f64, setup: &AcousticSetup, u: f64) -> Result<f64> {
    setup.validate()?;
    if !(u >= 0.0) {
        return Err(Error::InvalidParameter(format!("u = {u} must be nonnegative")));
    }
    let mode = ModeIndex::new(2 * j, 0, alpha)?;
    let a = setup.a;
    Ok(a * a * hankel_radial(mode, a * u / (2.0 * PI))?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    EdgePressure,
    ReactionForce,
    RadiatedPower,
}

impl Quantity {
    pub fn name(&self) -> &'static str {
        match self {
            Quantity::EdgePressure => "edge_pressure",
            Quantity::ReactionForce => "reaction_force",
            Quantity::RadiatedPower => "radiated_power",
        }
    }
}

/// A named acoustic quantity with its series diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcousticReport {
    pub quantity: Quantity,
    pub ka: f64,
    pub value: Complex64,
    /// Term ratio of the series, or the quadrature error estimate when the
    /// oracle path was used.
    pub tail_estimate: f64,
    /// Series terms used; zero when the value came from quadrature.
    pub terms: usize,
}

#[derive(Serialize)]
struct ComplexJson {
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct ReportJson {
    quantity: &'static str,
    ka: f64,
    value: ComplexJson,
    tail_estimate: f64,
    #[serde(rename = "L")]
    terms: usize,
}

impl AcousticReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ReportJson {
            quantity: self.quantity.name(),
            ka: self.ka,
            value: ComplexJson {
                re: self.value.re,
                im: self.value.im,
            },
            tail_estimate: self.tail_estimate,
            terms: self.terms,
        })
        .expect("report serializes")
    }
}

/// Normalized King value: series for ka <= SERIES_KA_MAX, quadrature beyond.
fn king_value(spec: &KingSpec, ka: f64, terms: usize) -> Result<(Complex64, f64, usize)> {
    if ka <= SERIES_KA_MAX {
        let s = king_series(spec, ka, terms)?;
        Ok((s.value, s.tail_estimate, terms))
    } else {
        let o = king_oracle(spec, ka, &KingOracleSpec::default())?;
        Ok((o.value(), o.error, 0))
    }
}

fn profile_constant(j: u32, alpha: f64) -> f64 {
    sign_pow(j as i64) * 2f64.powf(alpha) * poch(j as f64 + 1.0, alpha)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > -1.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must exceed -1")));
    }
    Ok(())
}

/// Pressure at the rim (w = a, z = 0) for the velocity profile R_{2j}^{0,α}(σ/a).
pub fn edge_pressure(j: u32, alpha: f64, setup: &AcousticSetup, terms: usize) -> Result<AcousticReport> {
    setup.validate()?;
    check_alpha(alpha)?;
    let ka = setup.ka();
    let (v, tail, used) = king_value(&KingSpec::edge_pressure(j, alpha), ka, terms)?;
    Ok(AcousticReport {
        quantity: Quantity::EdgePressure,
        ka,
        value: v * (setup.rho0 * setup.c * ka * profile_constant(j, alpha)),
        tail_estimate: tail,
        terms: used,
    })
}

/// Reaction force ∫_S p dS for the velocity profile R_{2j}^{0,α}(σ/a).
pub fn reaction_force(j: u32, alpha: f64, setup: &AcousticSetup, terms: usize) -> Result<AcousticReport> {
    setup.validate()?;
    check_alpha(alpha)?;
    let ka = setup.ka();
    let (v, tail, used) = king_value(&KingSpec::reaction_force(j, alpha), ka, terms)?;
    let a = setup.a;
    Ok(AcousticReport {
        quantity: Quantity::ReactionForce,
        ka,
        value: v * (2.0 * PI * setup.rho0 * setup.c * a * a * ka * profile_constant(j, alpha)),
        tail_estimate: tail,
        terms: used,
    })
}

/// Power ∫_S p v* dS with p driven by R_{2j1}^{0,α} and v = R_{2j2}^{0,α}
/// (the integral is symmetric in j1, j2).
pub fn radiated_power(
    j1: u32,
    j2: u32,
    alpha: f64,
    setup: &AcousticSetup,
    terms: usize,
) -> Result<AcousticReport> {
    setup.validate()?;
    check_alpha(alpha)?;
    let (lo, hi) = if j1 <= j2 { (j1, j2) } else { (j2, j1) };
    let ka = setup.ka();
    let (v, tail, used) = king_value(&KingSpec::radiated_power(lo, hi, alpha), ka, terms)?;
    let a = setup.a;
    let c = profile_constant(lo, alpha) * profile_constant(hi, alpha);
    Ok(AcousticReport {
        quantity: Quantity::RadiatedPower,
        ka,
        value: v * (2.0 * PI * setup.rho0 * setup.c * a * a * ka * c),
        tail_estimate: tail,
        terms: used,
    })
}

fn check_z(z: f64) -> Result<()> {
    if !(z >= 0.0 && z.is_finite()) {
        return Err(Error::InvalidParameter(format!("z = {z} must be nonnegative")));
    }
    Ok(())
}

/// On-axis pressure at height z for the classical profile R_{2l}^0(σ/a).
pub fn onaxis_pressure(l: u32, setup: &AcousticSetup, z: f64) -> Result<Complex64> {
    setup.validate()?;
    check_z(z)?;
    let a = setup.a;
    let k = setup.k;
    let root = z.hypot(a);
    let r_minus = 0.5 * (root - z);
    let r_plus = 0.5 * (root + z);
    let ka = setup.ka();
    let jl = spherical_j(l as usize, k * r_minus)?;
    let hl = spherical_h2(l as usize, k * r_plus)?;
    Ok(hl * (0.5 * setup.rho0 * setup.c * ka * ka * sign_pow(l as i64) * jl))
}

/// On-axis pressure for the profile R_{2j}^{0,α}(σ/a), summed over its
/// classical expansion with `extra` terms beyond the first.
pub fn onaxis_pressure_generalized(
    j: u32,
    alpha: f64,
    setup: &AcousticSetup,
    z: f64,
    extra: u32,
) -> Result<Complex64> {
    ModeIndex::new(2 * j, 0, alpha)?;
    let coeffs = connection_coeffs(0, j, alpha, j + extra);
    let mut total = Complex64::new(0.0, 0.0);
    for (l, c) in coeffs.into_iter().enumerate() {
        if c != 0.0 {
            total += c * onaxis_pressure(l as u32, setup, z)?;
        }
    }
    Ok(total)
}

/// Rayleigh-integral quadrature of the on-axis pressure for R_{2j}^{0,α}(σ/a).
///
/// With R = √(z² + σ²) as the integration variable the integrand is
/// e^{-ikR} R_{2j}^{0,α}(√(R² - z²)/a), smooth apart from the rim factor.
pub fn onaxis_rayleigh(j: u32, alpha: f64, setup: &AcousticSetup, z: f64, tol: f64) -> Result<Complex64> {
    setup.validate()?;
    check_z(z)?;
    ModeIndex::new(2 * j, 0, alpha)?;
    let a = setup.a;
    let k = setup.k;
    let top = z.hypot(a);
    let res = integrate_complex(
        |r| {
            let sigma = ((r - z) * (r + z)).max(0.0).sqrt();
            let v = radial_unchecked(2 * j, 0, alpha, (sigma / a).min(1.0));
            Complex64::from_polar(v, -k * r)
        },
        z,
        top,
        tol,
        0.0,
        4000,
    )?;
    Ok(res.value * Complex64::new(0.0, setup.rho0 * setup.c * k))
}
