//! Generalized Zernike circle functions
//! Z_n^{m,α}(ρ, θ) = (1-ρ²)^α ρ^|m| P_p^{(α,|m|)}(2ρ²-1) e^{imθ} on the unit disk.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_jacobi;
use crate::specfun::{binom_shifted, gegenbauer_c, jacobi_unchecked, poch};

/// Mode triple (n, m, α) with n - |m| even and nonnegative, α > -1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeIndex {
    pub n: u32,
    pub m: i32,
    pub alpha: f64,
}

impl ModeIndex {
    pub fn new(n: u32, m: i32, alpha: f64) -> Result<Self> {
        let mode = ModeIndex { n, m, alpha };
        mode.validate()?;
        Ok(mode)
    }

    pub fn validate(&self) -> Result<()> {
        let reason = if self.m.unsigned_abs() > self.n {
            Some("|m| exceeds n")
        } else if (self.n - self.m.unsigned_abs()) % 2 != 0 {
            Some("n - |m| must be even")
        } else if !(self.alpha > -1.0) || !self.alpha.is_finite() {
            Some("alpha must be finite and exceed -1")
        } else {
            None
        };
        match reason {
            Some(reason) => Err(Error::InvalidMode {
                n: self.n as i64,
                m: self.m as i64,
                alpha: self.alpha,
                reason,
            }),
            None => Ok(()),
        }
    }

    pub fn abs_m(&self) -> u32 {
        self.m.unsigned_abs()
    }

    /// p = (n - |m|) / 2
    pub fn p(&self) -> u32 {
        (self.n - self.abs_m()) / 2
    }

    /// q = (n + |m|) / 2
    pub fn q(&self) -> u32 {
        (self.n + self.abs_m()) / 2
    }
}

/// Polar point (ρ, θ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub rho: f64,
    pub theta: f64,
}

impl PolarPoint {
    pub fn new(rho: f64, theta: f64) -> Self {
        PolarPoint { rho, theta }
    }

    pub fn from_cartesian(x: f64, y: f64) -> Self {
        PolarPoint {
            rho: x.hypot(y),
            theta: y.atan2(x),
        }
    }
}

/// Basis tag of a coefficient set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// Z_n^{m,α} with the set's α.
    Generalized,
    /// Classical Zernike polynomials (α = 0).
    Classical,
    /// ρ^|m| (1-ρ²)^{k+α} e^{imθ}, stored at index n = |m| + 2k.
    EdgePower,
}

/// One expansion coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficient {
    pub n: u32,
    pub m: i32,
    pub value: Complex64,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    n: u32,
    m: i32,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct CoefficientSetJson {
    alpha: f64,
    basis: Basis,
    entries: Vec<EntryJson>,
}

/// A finite expansion over modes sharing one α. Entries are kept sorted by
/// (n, m) and are unique.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoefficientSetJson", into = "CoefficientSetJson")]
pub struct CoefficientSet {
    alpha: f64,
    basis: Basis,
    entries: Vec<Coefficient>,
}

impl TryFrom<CoefficientSetJson> for CoefficientSet {
    type Error = Error;
    fn try_from(j: CoefficientSetJson) -> Result<Self> {
        CoefficientSet::new(
            j.alpha,
            j.basis,
            j.entries
                .into_iter()
                .map(|e| Coefficient {
                    n: e.n,
                    m: e.m,
                    value: Complex64::new(e.re, e.im),
                })
                .collect(),
        )
    }
}

impl From<CoefficientSet> for CoefficientSetJson {
    fn from(c: CoefficientSet) -> Self {
        CoefficientSetJson {
            alpha: c.alpha,
            basis: c.basis,
            entries: c
                .entries
                .iter()
                .map(|e| EntryJson {
                    n: e.n,
                    m: e.m,
                    re: e.value.re,
                    im: e.value.im,
                })
                .collect(),
        }
    }
}

impl CoefficientSet {
    pub fn new(alpha: f64, basis: Basis, mut entries: Vec<Coefficient>) -> Result<Self> {
        if basis == Basis::Classical && alpha != 0.0 {
            return Err(Error::Basis(format!(
                "classical basis requires alpha = 0, got {alpha}"
            )));
        }
        for e in &entries {
            ModeIndex::new(e.n, e.m, alpha)?;
        }
        entries.sort_by_key(|e| (e.n, e.m));
        if let Some(w) = entries.windows(2).find(|w| (w[0].n, w[0].m) == (w[1].n, w[1].m)) {
            return Err(Error::InvalidParameter(format!(
                "duplicate coefficient for (n={}, m={})",
                w[0].n, w[0].m
            )));
        }
        Ok(CoefficientSet {
            alpha,
            basis,
            entries,
        })
    }

    pub fn empty(alpha: f64, basis: Basis) -> Self {
        CoefficientSet {
            alpha,
            basis,
            entries: Vec::new(),
        }
    }

    /// Builds a set from (mode, value) pairs, summing repeated modes.
    pub fn from_modes(alpha: f64, basis: Basis, items: &[(ModeIndex, Complex64)]) -> Result<Self> {
        let mut acc: BTreeMap<(u32, i32), Complex64> = BTreeMap::new();
        for (mode, v) in items {
            if mode.alpha != alpha {
                return Err(Error::InvalidParameter(format!(
                    "mode alpha {} differs from set alpha {alpha}",
                    mode.alpha
                )));
            }
            *acc.entry((mode.n, mode.m)).or_default() += v;
        }
        CoefficientSet::new(
            alpha,
            basis,
            acc.into_iter()
                .map(|((n, m), value)| Coefficient { n, m, value })
                .collect(),
        )
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn entries(&self) -> &[Coefficient] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, n: u32, m: i32) -> Complex64 {
        self.entries
            .binary_search_by_key(&(n, m), |e| (e.n, e.m))
            .map(|i| self.entries[i].value)
            .unwrap_or_default()
    }

    /// Modes of the entries (with the set's α).
    pub fn modes(&self) -> Vec<ModeIndex> {
        self.entries
            .iter()
            .map(|e| ModeIndex {
                n: e.n,
                m: e.m,
                alpha: self.alpha,
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("coefficient set serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Generalized-basis view; classical sets are generalized sets with α = 0.
    pub(crate) fn require_evaluable(&self) -> Result<()> {
        if self.basis == Basis::EdgePower {
            return Err(Error::Basis(
                "edge_power coefficients must be converted to the generalized basis first".into(),
            ));
        }
        Ok(())
    }
}

/// (1 - ρ²)^α computed as ((1-ρ)(1+ρ))^α.
pub(crate) fn edge_factor(rho: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        return 1.0;
    }
    ((1.0 - rho) * (1.0 + rho)).powf(alpha)
}

/// Radial part without validation; ρ must lie in [0, 1).
pub(crate) fn radial_unchecked(n: u32, m_abs: u32, alpha: f64, rho: f64) -> f64 {
    let p = ((n - m_abs) / 2) as usize;
    let x = 2.0 * rho * rho - 1.0;
    edge_factor(rho, alpha) * rho.powi(m_abs as i32) * jacobi_unchecked(p, alpha, m_abs as f64, x)
}

/// Radial part R_n^{|m|,α}(ρ) for 0 <= ρ <= 1.
pub fn radial(mode: ModeIndex, rho: f64) -> Result<f64> {
    mode.validate()?;
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Precondition(format!(
            "radial: rho = {rho} outside [0, 1]"
        )));
    }
    if rho == 1.0 {
        if mode.alpha > 0.0 {
            return Ok(0.0);
        }
        if mode.alpha < 0.0 {
            return Err(Error::Singularity(format!(
                "R_{}^{{{},{}}} is unbounded at rho = 1",
                mode.n,
                mode.abs_m(),
                mode.alpha
            )));
        }
        // P_p^{(0,|m|)}(1) = 1
        return Ok(1.0);
    }
    Ok(radial_unchecked(mode.n, mode.abs_m(), mode.alpha, rho))
}

/// Radial part by the uniform-angle discrete Fourier coefficient of
/// C_n^{α+1}(ρ cos θ); requires n_points > n + |m| and ρ < 1.
pub fn radial_dct(mode: ModeIndex, rho: f64, n_points: usize) -> Result<f64> {
    mode.validate()?;
    let ma = mode.abs_m() as usize;
    if n_points <= mode.n as usize + ma {
        return Err(Error::Precondition(format!(
            "radial_dct: N = {n_points} must exceed n + |m| = {}",
            mode.n as usize + ma
        )));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::Precondition(format!(
            "radial_dct: rho = {rho} outside [0, 1)"
        )));
    }
    let lambda = mode.alpha + 1.0;
    let nf = n_points as f64;
    let mut acc = 0.0;
    for k in 0..n_points {
        let t = 2.0 * PI * k as f64 / nf;
        // Real part of C(ρ cos t) e^{-i t m}.
        let phase = 2.0 * PI * ((k * ma) % n_points) as f64 / nf;
        acc += gegenbauer_c(mode.n as usize, lambda, rho * t.cos()) * phase.cos();
    }
    acc /= nf;
    let b = binom_shifted(mode.alpha, mode.q());
    Ok(edge_factor(rho, mode.alpha) / b * acc)
}

/// Z_n^{m,α}(ρ, θ); exactly zero outside the unit disk.
pub fn eval(mode: ModeIndex, pt: PolarPoint) -> Result<Complex64> {
    if pt.rho > 1.0 {
        mode.validate()?;
        return Ok(Complex64::new(0.0, 0.0));
    }
    let r = radial(mode, pt.rho)?;
    Ok(Complex64::from_polar(r, mode.m as f64 * pt.theta))
}

/// Weighted squared norm π (p+1)_α / ((p+|m|+1)_α (n+α+1)).
pub fn norm_squared(mode: ModeIndex) -> f64 {
    let p = mode.p() as f64;
    let m = mode.abs_m() as f64;
    let a = mode.alpha;
    PI * poch(p + 1.0, a) / (poch(p + m + 1.0, a) * (mode.n as f64 + a + 1.0))
}

/// Σ c_{n,m} Z_n^{m,α}(pt).
pub fn eval_sum(coeffs: &CoefficientSet, pt: PolarPoint) -> Result<Complex64> {
    coeffs.require_evaluable()?;
    let mut s = Complex64::new(0.0, 0.0);
    for mode in coeffs.modes() {
        s += coeffs.get(mode.n, mode.m) * eval(mode, pt)?;
    }
    Ok(s)
}

/// Quadrature parameters for [`project`] and the weighted inner product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionSpec {
    /// Gauss-Jacobi nodes in x = 2ρ² - 1.
    pub n_radial: usize,
    /// Trapezoid nodes in θ.
    pub n_angular: usize,
    /// Exponent e with f ~ (1-ρ²)^e near the rim; defaults to the basis α.
    pub edge_exponent: Option<f64>,
}

impl Default for ProjectionSpec {
    fn default() -> Self {
        ProjectionSpec {
            n_radial: 64,
            n_angular: 256,
            edge_exponent: None,
        }
    }
}

/// Polar samples of a disk function on a Gauss-Jacobi x trapezoid-θ grid.
struct DiskGrid {
    rho: Vec<f64>,
    // Radial weights including ρdρ = dx/4 and the removed edge factor.
    weight: Vec<f64>,
    // f(ρ_i, θ_j) / ((1-x_i)/2)^e, row-major over (i, j).
    values: Vec<Complex64>,
    n_angular: usize,
}

impl DiskGrid {
    fn sample<F>(f: &F, spec: &ProjectionSpec, e: f64) -> Result<Self>
    where
        F: Fn(PolarPoint) -> Complex64 + Sync,
    {
        if spec.n_radial == 0 || spec.n_angular == 0 {
            return Err(Error::InvalidParameter(
                "projection needs at least one node per dimension".into(),
            ));
        }
        let rule = gauss_jacobi(spec.n_radial, e, 0.0).map_err(|err| {
            Error::Quadrature(format!("edge exponent {e} not integrable: {err}"))
        })?;
        let scale = 2f64.powf(-e) / 4.0;
        let rho: Vec<f64> = rule.nodes.iter().map(|x| ((1.0 + x) / 2.0).sqrt()).collect();
        let weight: Vec<f64> = rule.weights.iter().map(|w| w * scale).collect();
        let na = spec.n_angular;
        let values: Vec<Complex64> = rule
            .nodes
            .par_iter()
            .zip(rho.par_iter())
            .flat_map_iter(|(&x, &r)| {
                let inv_edge = ((1.0 - x) / 2.0).powf(-e);
                (0..na).map(move |j| {
                    let th = 2.0 * PI * j as f64 / na as f64;
                    f(PolarPoint::new(r, th)) * inv_edge
                })
            })
            .collect();
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Quadrature(
                "sampled function is not finite at a quadrature node".into(),
            ));
        }
        Ok(DiskGrid {
            rho,
            weight,
            values,
            n_angular: na,
        })
    }

    /// Angular Fourier coefficient (2π/N) Σ_j g(ρ_i, θ_j) e^{-imθ_j} per radial node.
    fn angular(&self, m: i32) -> Vec<Complex64> {
        let na = self.n_angular;
        let twiddle: Vec<Complex64> = (0..na)
            .map(|j| {
                let k = (m as i64 * j as i64).rem_euclid(na as i64);
                Complex64::from_polar(2.0 * PI / na as f64, -2.0 * PI * k as f64 / na as f64)
            })
            .collect();
        (0..self.rho.len())
            .map(|i| {
                self.values[i * na..(i + 1) * na]
                    .iter()
                    .zip(&twiddle)
                    .map(|(v, t)| v * t)
                    .sum()
            })
            .collect()
    }
}

/// Weighted inner product ⟨f, Z⟩ = ∫∫ f conj(Z) (1-ρ²)^{-α} ρ dρ dθ for each mode.
pub fn inner_products<F>(f: F, modes: &[ModeIndex], spec: &ProjectionSpec) -> Result<Vec<Complex64>>
where
    F: Fn(PolarPoint) -> Complex64 + Sync,
{
    let Some(first) = modes.first() else {
        return Ok(Vec::new());
    };
    let alpha = first.alpha;
    for m in modes {
        m.validate()?;
        if m.alpha != alpha {
            return Err(Error::InvalidParameter(
                "all projected modes must share alpha".into(),
            ));
        }
    }
    let e = spec.edge_exponent.unwrap_or(alpha);
    let grid = DiskGrid::sample(&f, spec, e)?;
    let mut by_m: BTreeMap<i32, Vec<Complex64>> = BTreeMap::new();
    let mut out = Vec::with_capacity(modes.len());
    for mode in modes {
        let ang = by_m.entry(mode.m).or_insert_with(|| grid.angular(mode.m));
        let ma = mode.abs_m();
        let p = mode.p() as usize;
        // conj(Z) (1-ρ²)^{-α} = ρ^|m| P_p(2ρ²-1) e^{-imθ}
        let s: Complex64 = grid
            .rho
            .iter()
            .zip(&grid.weight)
            .zip(ang.iter())
            .map(|((&r, &w), &a)| {
                let x = 2.0 * r * r - 1.0;
                a * (w * r.powi(ma as i32) * jacobi_unchecked(p, alpha, ma as f64, x))
            })
            .sum();
        out.push(s);
    }
    Ok(out)
}

/// Orthogonal projection of a disk function onto the given modes.
pub fn project<F>(f: F, modes: &[ModeIndex], spec: &ProjectionSpec) -> Result<CoefficientSet>
where
    F: Fn(PolarPoint) -> Complex64 + Sync,
{
    let Some(first) = modes.first() else {
        return Ok(CoefficientSet::empty(0.0, Basis::Generalized));
    };
    let alpha = first.alpha;
    let ips = inner_products(f, modes, spec)?;
    let items: Vec<(ModeIndex, Complex64)> = modes
        .iter()
        .zip(ips)
        .map(|(m, ip)| (*m, ip / norm_squared(*m)))
        .collect();
    CoefficientSet::from_modes(alpha, Basis::Generalized, &items)
}

/// All valid modes (n, m, α) with n <= n_max, ordered by n then m.
pub fn modes_up_to(n_max: u32, alpha: f64) -> Vec<ModeIndex> {
    let mut v = Vec::new();
    for n in 0..=n_max {
        let mut m = -(n as i32);
        while m <= n as i32 {
            v.push(ModeIndex { n, m, alpha });
            m += 2;
        }
    }
    v
}
