//! Least-squares estimation of expansion coefficients from disk samples,
//! sinograms, near-field pressure planes and through-focus intensities.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::enz::{u_field, FocusPoint};
use crate::error::{Error, Result};
use crate::grid::{fmt_g17, FieldGrid, GridKind, GridSpec};
use crate::quadrature::gauss_legendre;
use crate::specfun::{bessel_j_pos, poch};
use crate::transforms::{hankel_radial, radon, sign_pow, RadonLine};
use crate::zernike::{eval, Basis, CoefficientSet, ModeIndex, PolarPoint};

/// Condition number above which a design matrix is treated as rank deficient.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Ridge parameter λ; the penalty is λ‖c‖².
    pub ridge: f64,
    pub max_condition: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            ridge: 0.0,
            max_condition: MAX_CONDITION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub coefficients: CoefficientSet,
    pub residual_norm: f64,
    pub condition_estimate: f64,
    pub iterations: usize,
}

impl FitReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct Solution {
    x: Vec<Complex64>,
    residual: f64,
    condition: f64,
}

/// Minimizes ‖A x - b‖² + λ‖x‖² by QR of the (augmented) system.
fn least_squares(a: DMatrix<Complex64>, b: DVector<Complex64>, opts: &FitOptions) -> Result<Solution> {
    let (rows, cols) = a.shape();
    if cols == 0 {
        return Ok(Solution {
            x: Vec::new(),
            residual: b.norm(),
            condition: 0.0,
        });
    }
    if rows < cols {
        return Err(Error::InsufficientData(format!(
            "{rows} samples cannot determine {cols} coefficients"
        )));
    }
    if opts.ridge < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "ridge parameter {} must be nonnegative",
            opts.ridge
        )));
    }
    let (aa, bb) = if opts.ridge > 0.0 {
        let mut aa = DMatrix::<Complex64>::zeros(rows + cols, cols);
        aa.view_mut((0, 0), (rows, cols)).copy_from(&a);
        let s = Complex64::new(opts.ridge.sqrt(), 0.0);
        for j in 0..cols {
            aa[(rows + j, j)] = s;
        }
        let mut bb = DVector::<Complex64>::zeros(rows + cols);
        bb.rows_mut(0, rows).copy_from(&b);
        (aa, bb)
    } else {
        (a.clone(), b.clone())
    };
    let sv = aa.clone().svd(false, false).singular_values;
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= opts.max_condition) {
        return Err(Error::RankDeficient { condition });
    }
    let qr = aa.qr();
    let rhs = qr.q().adjoint() * &bb;
    let x = qr
        .r()
        .solve_upper_triangular(&rhs)
        .ok_or(Error::RankDeficient { condition })?;
    let residual = (&a * &x - &b).norm();
    Ok(Solution {
        x: x.iter().copied().collect(),
        residual,
        condition,
    })
}

fn common_alpha(modes: &[ModeIndex]) -> Result<f64> {
    let Some(first) = modes.first() else {
        return Ok(0.0);
    };
    for m in modes {
        m.validate()?;
        if m.alpha != first.alpha {
            return Err(Error::InvalidParameter(format!(
                "all modes must share alpha (found {} and {})",
                first.alpha, m.alpha
            )));
        }
    }
    Ok(first.alpha)
}

fn coefficient_set(modes: &[ModeIndex], alpha: f64, x: &[Complex64]) -> Result<CoefficientSet> {
    let items: Vec<(ModeIndex, Complex64)> = modes.iter().copied().zip(x.iter().copied()).collect();
    CoefficientSet::from_modes(alpha, Basis::Generalized, &items)
}

fn design<P, F>(points: &[P], modes: &[ModeIndex], f: F) -> Result<DMatrix<Complex64>>
where
    P: Sync,
    F: Fn(ModeIndex, &P) -> Result<Complex64> + Sync,
{
    let rows: Vec<Vec<Complex64>> = points
        .par_iter()
        .map(|pt| modes.iter().map(|&m| f(m, pt)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(points.len(), modes.len(), |i, j| rows[i][j]))
}

fn fit_linear<P, F>(
    samples: &[(P, Complex64)],
    modes: &[ModeIndex],
    opts: &FitOptions,
    forward: F,
) -> Result<FitReport>
where
    P: Sync + Clone,
    F: Fn(ModeIndex, &P) -> Result<Complex64> + Sync,
{
    let alpha = common_alpha(modes)?;
    let pts: Vec<P> = samples.iter().map(|s| s.0.clone()).collect();
    let a = design(&pts, modes, forward)?;
    let b = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));
    let sol = least_squares(a, b, opts)?;
    Ok(FitReport {
        coefficients: coefficient_set(modes, alpha, &sol.x)?,
        residual_norm: sol.residual,
        condition_estimate: sol.condition,
        iterations: 1,
    })
}

/// Fits coefficients to function samples on the unit disk.
pub fn fit_disk(
    samples: &[(PolarPoint, Complex64)],
    modes: &[ModeIndex],
    opts: &FitOptions,
) -> Result<FitReport> {
    fit_linear(samples, modes, opts, |m, pt| eval(m, *pt))
}

/// Fits coefficients to Radon-transform samples; lines outside the disk
/// contribute zero rows.
pub fn fit_radon(
    sinogram: &[(RadonLine, Complex64)],
    modes: &[ModeIndex],
    opts: &FitOptions,
) -> Result<FitReport> {
    fit_linear(sinogram, modes, opts, |m, line| radon(m, *line))
}

/// Settings for the through-focus intensity fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityFitOptions {
    pub fit: FitOptions,
    /// Passes that reinstate the quadratic cross term.
    pub max_iter: usize,
    /// Tolerance passed to the field evaluation.
    pub tol: f64,
}

impl Default for IntensityFitOptions {
    fn default() -> Self {
        IntensityFitOptions {
            fit: FitOptions::default(),
            max_iter: 5,
            tol: crate::enz::DEFAULT_TOL,
        }
    }
}

/// Fits small aberration coefficients to through-focus intensity samples.
///
/// The pupil is Z_0^{0,α} with unit weight plus Σ β Z over `modes`. Each
/// pass solves the intensity model linearized in β with the quadratic term
/// |Σ β U|² taken from the previous pass.
pub fn fit_intensity(
    samples: &[(FocusPoint, f64)],
    modes: &[ModeIndex],
    opts: &IntensityFitOptions,
) -> Result<FitReport> {
    let alpha = common_alpha(modes)?;
    let piston = ModeIndex::new(0, 0, alpha)?;
    if modes.contains(&piston) {
        return Err(Error::InvalidParameter(
            "the piston mode is fixed and cannot be fitted".into(),
        ));
    }
    if opts.max_iter == 0 {
        return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
    }
    let unit = |m: ModeIndex| {
        CoefficientSet::from_modes(alpha, Basis::Generalized, &[(m, Complex64::new(1.0, 0.0))])
    };
    let piston_set = unit(piston)?;
    let mode_sets = modes.iter().map(|&m| unit(m)).collect::<Result<Vec<_>>>()?;
    // Fields per sample: piston first, then each mode.
    let fields: Vec<(Complex64, Vec<Complex64>)> = samples
        .par_iter()
        .map(|(pt, _)| {
            let u0 = u_field(&piston_set, *pt, opts.tol)?;
            let us = mode_sets
                .iter()
                .map(|s| u_field(s, *pt, opts.tol))
                .collect::<Result<Vec<_>>>()?;
            Ok((u0, us))
        })
        .collect::<Result<_>>()?;
    let nm = modes.len();
    // Real unknowns (Re β, Im β).
    let mut a = DMatrix::<Complex64>::zeros(samples.len(), 2 * nm);
    for (i, (u0, us)) in fields.iter().enumerate() {
        for (j, u) in us.iter().enumerate() {
            let g = u0.conj() * u * 2.0;
            a[(i, j)] = Complex64::new(g.re, 0.0);
            a[(i, nm + j)] = Complex64::new(-g.im, 0.0);
        }
    }
    let mut beta = vec![Complex64::new(0.0, 0.0); nm];
    let mut report = None;
    for iter in 1..=opts.max_iter {
        let b = DVector::from_iterator(
            samples.len(),
            samples.iter().zip(&fields).map(|((_, intensity), (u0, us))| {
                let ab: Complex64 = us.iter().zip(&beta).map(|(u, c)| u * c).sum();
                Complex64::new(intensity - u0.norm_sqr() - ab.norm_sqr(), 0.0)
            }),
        );
        let sol = least_squares(a.clone(), b, &opts.fit)?;
        let next: Vec<Complex64> = (0..nm)
            .map(|j| Complex64::new(sol.x[j].re, sol.x[nm + j].re))
            .collect();
        let change: f64 = next.iter().zip(&beta).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        beta = next;
        let residual = samples
            .iter()
            .zip(&fields)
            .map(|((_, intensity), (u0, us))| {
                let u: Complex64 = u0 + us.iter().zip(&beta).map(|(u, c)| u * c).sum::<Complex64>();
                (intensity - u.norm_sqr()).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        report = Some((residual, sol.condition, iter));
        if change <= 1e-15 * (1.0 + beta.iter().map(|c| c.norm()).sum::<f64>()) {
            break;
        }
    }
    let (residual, condition, iterations) = report.expect("at least one pass");
    let mut items = vec![(piston, Complex64::new(1.0, 0.0))];
    items.extend(modes.iter().copied().zip(beta));
    Ok(FitReport {
        coefficients: CoefficientSet::from_modes(alpha, Basis::Generalized, &items)?,
        residual_norm: residual,
        condition_estimate: condition,
        iterations,
    })
}

// ---------------------------------------------------------------------------
// Near-field propagation
// ---------------------------------------------------------------------------

/// Square sampling of the measurement plane: `n` points per axis with
/// spacing 2·half_width/n, centered so that index n/2 sits on the axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylGrid {
    pub n: usize,
    pub half_width: f64,
}

impl WeylGrid {
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "grid size {n} must be a power of two >= 8"
            )));
        }
        if !(half_width >= 4.0 && half_width.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid half-width {half_width} must be at least 4 disk radii"
            )));
        }
        Ok(WeylGrid { n, half_width })
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - (self.n / 2) as f64) * self.step()
    }

    pub fn spec(&self) -> GridSpec {
        let h = self.step();
        let lo = self.coord(0);
        let hi = lo + h * (self.n - 1) as f64;
        GridSpec::rectangular((lo, hi, self.n), (lo, hi, self.n)).expect("valid axes")
    }

    /// Recovers the sampling of a rectangular grid laid out like [`WeylGrid::spec`].
    pub fn from_spec(spec: &GridSpec) -> Result<Self> {
        if spec.kind != GridKind::Rectangular {
            return Err(Error::InvalidParameter("near-field grid must be rectangular".into()));
        }
        let n = spec.axis_x.count;
        let g = WeylGrid::new(n, -spec.axis_x.start)?;
        let matches = |ax: &crate::grid::AxisSpec| {
            ax.count == n
                && (ax.start - g.coord(0)).abs() <= 1e-9 * g.half_width
                && (ax.step() - g.step()).abs() <= 1e-9 * g.step()
        };
        if !matches(&spec.axis_x) || !matches(&spec.axis_y) {
            return Err(Error::InvalidParameter(
                "near-field grid must be square and centered with n/2 on the axis".into(),
            ));
        }
        Ok(g)
    }

    /// Largest propagating radial frequency 2π f resolved per axis.
    pub fn nyquist(&self) -> f64 {
        PI / self.step()
    }
}

/// Weyl factor 2πi e^{iζ√(K² - λ²)}/√(K² - λ²) at radial frequency λ = 2π|f|,
/// with √(K² - λ²) = i√(λ² - K²) beyond the cutoff.
pub fn weyl_factor(lambda: f64, ka: f64, zeta: f64) -> Complex64 {
    let i = Complex64::i();
    if lambda <= ka {
        let w = ((ka - lambda) * (ka + lambda)).sqrt();
        2.0 * PI * i * Complex64::from_polar(1.0, zeta * w) / w
    } else {
        let w = ((lambda - ka) * (lambda + ka)).sqrt();
        Complex64::new(2.0 * PI * (-zeta * w).exp() / w, 0.0)
    }
}

/// Fixed rule for the radial propagation integral over λ, shared by all
/// field radii up to `s_max`.
struct RadialRule {
    /// (λ, weight · J_{n+α+1}(λ) λ^{-α} e^{iζw}/w · dλ-Jacobian) per mode degree.
    nodes: Vec<f64>,
    weights: Vec<Complex64>,
}

fn radial_rule(mode: ModeIndex, ka: f64, zeta: f64, s_max: f64) -> Result<RadialRule> {
    let k = ka;
    let a = mode.alpha;
    let nu = mode.n as f64 + a + 1.0;
    let gl = gauss_legendre(12);
    let band = 1.0 + s_max;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut push_panels = |lo: f64, hi: f64, per_unit: f64, map: &dyn Fn(f64) -> (f64, Complex64)| {
        let count = ((hi - lo) * per_unit).ceil().max(1.0) as usize;
        let h = (hi - lo) / count as f64;
        for c in 0..count {
            let r = gl.mapped(lo + h * c as f64, lo + h * (c + 1) as f64);
            for (&t, &w) in r.nodes.iter().zip(&r.weights) {
                let (lambda, g) = map(t);
                nodes.push(lambda);
                weights.push(g * w);
            }
        }
    };
    let profile = |lambda: f64| bessel_j_pos(nu, lambda) * lambda.powf(-a);
    // Propagating band, λ = K sin t: dλ / w = dt.
    let per_t = band * k / 2.0 + 1.0;
    push_panels(0.0, 0.5 * PI, per_t, &|t: f64| {
        let lambda = k * t.sin();
        let v = if lambda == 0.0 { 0.0 } else { profile(lambda) };
        (lambda, Complex64::from_polar(v, zeta * k * t.cos()))
    });
    // Evanescent start, λ = K cosh u: dλ / √(λ² - K²) = du, 1/w = -i/√.
    let u1 = 2f64.acosh();
    let per_u = band * 2.0 * k / 2.0 + 1.0;
    push_panels(0.0, u1, per_u, &|u: f64| {
        let lambda = k * u.cosh();
        let v = profile(lambda) * (-zeta * k * u.sinh()).exp();
        (lambda, Complex64::new(0.0, -v))
    });
    // Remaining evanescent range until e^{-ζ√(λ² - K²)} is negligible.
    let decay = 40.0 / zeta;
    let top = (k * k + decay * decay).sqrt().max(2.0 * k);
    if top - 2.0 * k > 20000.0 {
        return Err(Error::Precondition(format!(
            "standoff zeta = {zeta} too small for the evanescent range"
        )));
    }
    push_panels(2.0 * k, top, band / 2.0 + 0.5, &|lambda: f64| {
        let w = ((lambda - k) * (lambda + k)).sqrt();
        let v = profile(lambda) * (-zeta * w).exp() / w;
        (lambda, Complex64::new(0.0, -v))
    });
    let pre = 2.0 * PI * sign_pow(mode.p() as i64) * 2f64.powf(a) * poch(mode.p() as f64 + 1.0, a);
    for w in &mut weights {
        *w *= Complex64::new(0.0, pre);
    }
    Ok(RadialRule { nodes, weights })
}

impl RadialRule {
    fn apply(&self, m_abs: u32, s: f64) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&l, &w)| w * bessel_j_pos(m_abs as f64, s * l))
            .sum()
    }
}

fn check_plane_params(zeta: f64, ka: f64) -> Result<()> {
    if !(zeta > 0.0 && zeta.is_finite()) {
        return Err(Error::InvalidParameter(format!("zeta = {zeta} must be positive")));
    }
    if !(ka > 0.0 && ka.is_finite()) {
        return Err(Error::InvalidParameter(format!("ka = {ka} must be positive")));
    }
    Ok(())
}

/// Pressure at a single point (ν, μ) in the plane ζ for a velocity expansion.
pub fn weyl_point(v_coeffs: &CoefficientSet, zeta: f64, ka: f64, nu: f64, mu: f64) -> Result<Complex64> {
    v_coeffs.require_evaluable()?;
    check_plane_params(zeta, ka)?;
    let s = nu.hypot(mu);
    let th = mu.atan2(nu);
    let mut total = Complex64::new(0.0, 0.0);
    for (mode, e) in v_coeffs.modes().into_iter().zip(v_coeffs.entries()) {
        let rule = radial_rule(mode, ka, zeta, s)?;
        total += e.value * rule.apply(mode.abs_m(), s) * Complex64::from_polar(1.0, mode.m as f64 * th);
    }
    Ok(total)
}

/// Propagated pressure field with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylField {
    pub grid: FieldGrid,
    pub warnings: Vec<String>,
}

fn mode_plane(mode: ModeIndex, zeta: f64, ka: f64, g: &WeylGrid) -> Result<Vec<Complex64>> {
    let n = g.n;
    let s_max = g.half_width * 2f64.sqrt();
    let rule = radial_rule(mode, ka, zeta, s_max)?;
    let c = (n / 2) as i64;
    // The radial factor depends on (|i - c|, |j - c|) up to order.
    let mut keys: Vec<(u64, u64)> = Vec::new();
    for j in 0..n as i64 {
        for i in 0..n as i64 {
            let (a, b) = ((i - c).unsigned_abs(), (j - c).unsigned_abs());
            keys.push((a.min(b), a.max(b)));
        }
    }
    let mut unique = keys.clone();
    unique.sort_unstable();
    unique.dedup();
    let h = g.step();
    let ma = mode.abs_m();
    let radial: HashMap<(u64, u64), Complex64> = unique
        .par_iter()
        .map(|&(a, b)| {
            let s = h * (a as f64).hypot(b as f64);
            ((a, b), rule.apply(ma, s))
        })
        .collect();
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let (x, y) = (g.coord(i), g.coord(j));
            let key = keys[j * n + i];
            out.push(radial[&key] * Complex64::from_polar(1.0, mode.m as f64 * y.atan2(x)));
        }
    }
    Ok(out)
}

fn spectrum_envelope(v_coeffs: &CoefficientSet, lambda: f64) -> Result<f64> {
    let mut s = 0.0;
    for (mode, e) in v_coeffs.modes().into_iter().zip(v_coeffs.entries()) {
        s += e.value.norm() * hankel_radial(mode, lambda / (2.0 * PI))?.abs();
    }
    Ok(2.0 * PI * s)
}

/// Propagates the disk velocity expansion to the plane ζ on a Weyl grid.
///
/// Each mode's field is the inverse Fourier transform of its analytic
/// spectrum times the Weyl factor, reduced to a radial integral over λ that
/// is evaluated with a fixed panel rule (the λ = K sin t and λ = K cosh u
/// substitutions remove the cutoff singularity).
pub fn weyl_propagate(v_coeffs: &CoefficientSet, zeta: f64, ka: f64, g: &WeylGrid) -> Result<WeylField> {
    v_coeffs.require_evaluable()?;
    check_plane_params(zeta, ka)?;
    let nyq = g.nyquist();
    if nyq <= ka {
        return Err(Error::Precondition(format!(
            "grid Nyquist frequency {nyq} does not cover the propagating band ka = {ka}"
        )));
    }
    let mut values = vec![Complex64::new(0.0, 0.0); g.n * g.n];
    for (mode, e) in v_coeffs.modes().into_iter().zip(v_coeffs.entries()) {
        let plane = mode_plane(mode, zeta, ka, g)?;
        for (v, p) in values.iter_mut().zip(plane) {
            *v += e.value * p;
        }
    }
    // Aliasing check along the frequency axis of the grid.
    let df = 2.0 * PI / (g.n as f64 * g.step());
    let mut peak: f64 = 0.0;
    for k in 0..=g.n / 2 {
        let l = df * k as f64;
        let v = spectrum_envelope(v_coeffs, l)? * weyl_factor(l, ka, zeta).norm();
        if v.is_finite() {
            peak = peak.max(v);
        }
    }
    let edge = spectrum_envelope(v_coeffs, nyq)? * weyl_factor(nyq, ka, zeta).norm();
    let mut warnings = Vec::new();
    if peak > 0.0 && edge > 1e-6 * peak {
        warnings.push(format!(
            "spectrum at the grid Nyquist frequency is {:.3e} of its maximum; refine the grid",
            edge / peak
        ));
    }
    let mut grid = FieldGrid {
        spec: g.spec(),
        metadata: Default::default(),
        values,
    }
    .with_meta("quantity", "nearfield_pressure")
    .with_meta("zeta", fmt_g17(zeta))
    .with_meta("ka", fmt_g17(ka))
    .with_meta("alpha", fmt_g17(v_coeffs.alpha()));
    if !warnings.is_empty() {
        grid = grid.with_meta("warning", warnings.join("; "));
    }
    Ok(WeylField { grid, warnings })
}

/// Pressure measured on a plane at standoff ζ.
#[derive(Debug, Clone, PartialEq)]
pub struct NearFieldPlane {
    pub zeta: f64,
    pub ka: f64,
    pub grid: FieldGrid,
}

fn fft2(values: &mut [Complex64], n: usize, planner: &mut FftPlanner<f64>) {
    let fft = planner.plan_fft_forward(n);
    for row in values.chunks_mut(n) {
        fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        for j in 0..n {
            col[j] = values[j * n + i];
        }
        fft.process(&mut col);
        for j in 0..n {
            values[j * n + i] = col[j];
        }
    }
}

/// Fits the velocity expansion to a near-field pressure plane.
///
/// The data and each forward-propagated mode are taken to the discrete
/// Fourier domain; frequency samples where the Weyl factor is below 1e-8 of
/// its largest sampled value are dropped before the least-squares solve.
pub fn fit_nearfield(plane: &NearFieldPlane, modes: &[ModeIndex], opts: &FitOptions) -> Result<FitReport> {
    check_plane_params(plane.zeta, plane.ka)?;
    let g = WeylGrid::from_spec(&plane.grid.spec)?;
    if g.nyquist() <= plane.ka {
        return Err(Error::Precondition(format!(
            "grid Nyquist frequency {} does not cover the propagating band ka = {}",
            g.nyquist(),
            plane.ka
        )));
    }
    let alpha = common_alpha(modes)?;
    let n = g.n;
    let data_norm = plane.grid.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if modes.is_empty() {
        return Ok(FitReport {
            coefficients: CoefficientSet::empty(alpha, Basis::Generalized),
            residual_norm: data_norm,
            condition_estimate: 0.0,
            iterations: 1,
        });
    }
    let planes: Vec<Vec<Complex64>> = modes
        .iter()
        .map(|&m| mode_plane(m, plane.zeta, plane.ka, &g))
        .collect::<Result<_>>()?;
    let mut planner = FftPlanner::new();
    let mut data_hat = plane.grid.values.clone();
    fft2(&mut data_hat, n, &mut planner);
    let cols_hat: Vec<Vec<Complex64>> = planes
        .iter()
        .map(|p| {
            let mut c = p.clone();
            fft2(&mut c, n, &mut planner);
            c
        })
        .collect();
    // Weyl factor magnitude at each discrete frequency.
    let df = 2.0 * PI / (n as f64 * g.step());
    let freq = |i: usize| {
        let k = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
        df * k
    };
    let weyl: Vec<f64> = (0..n * n)
        .map(|idx| {
            let l = freq(idx % n).hypot(freq(idx / n));
            weyl_factor(l, plane.ka, plane.zeta).norm()
        })
        .collect();
    let wmax = weyl.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
    let keep: Vec<usize> = (0..n * n).filter(|&i| !(weyl[i] < 1e-8 * wmax)).collect();
    let a = DMatrix::from_fn(keep.len(), modes.len(), |r, c| cols_hat[c][keep[r]]);
    let b = DVector::from_iterator(keep.len(), keep.iter().map(|&i| data_hat[i]));
    let sol = least_squares(a, b, opts)?;
    let residual = (0..n * n)
        .map(|i| {
            let model: Complex64 = planes.iter().zip(&sol.x).map(|(p, c)| p[i] * c).sum();
            (plane.grid.values[i] - model).norm_sqr()
        })
        .sum::<f64>()
        .sqrt();
    Ok(FitReport {
        coefficients: coefficient_set(modes, alpha, &sol.x)?,
        residual_norm: residual,
        condition_estimate: sol.condition,
        iterations: 1,
    })
}
