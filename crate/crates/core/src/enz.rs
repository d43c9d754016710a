//! Through-focus point-spread fields of generalized-Zernike pupils.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expand::connection_coeffs;
use crate::grid::{fmt_g17, FieldGrid, GridSpec};
use crate::quadrature::integrate_complex;
use crate::specfun::bessel_j_pos;
use crate::transforms::{hankel_radial, i_pow, oracle_with_defocus, Estimate, OracleSpec};
use crate::zernike::{radial_unchecked, CoefficientSet, ModeIndex};

/// Default absolute tolerance for each V-function integral.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Connection terms examined per mode before giving up.
const MAX_TERMS: u32 = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FocusPoint {
    pub r: f64,
    pub phi: f64,
    /// Defocus, radians of quadratic pupil phase.
    pub f: f64,
}

impl FocusPoint {
    pub fn new(r: f64, phi: f64, f: f64) -> Self {
        FocusPoint { r, phi, f }
    }

    fn validate(&self) -> Result<()> {
        if !(self.r >= 0.0) || !self.phi.is_finite() || !self.f.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "focus point requires r >= 0 and finite phi, f (got {self:?})"
            )));
        }
        Ok(())
    }
}

/// V_n^m(r, f) = ∫_0^1 e^{ifρ²} R_n^m(ρ) J_m(2πρr) ρ dρ for the classical
/// radial polynomial.
///
/// In focus (f = 0) the integral has the closed form of the Hankel profile.
pub fn v_function(m: u32, n: u32, pt: FocusPoint, tol: f64) -> Result<Complex64> {
    pt.validate()?;
    if n < m || (n - m) % 2 != 0 {
        return Err(Error::InvalidMode {
            n: n as i64,
            m: m as i64,
            alpha: 0.0,
            reason: "n - |m| must be even and nonnegative",
        });
    }
    if pt.f == 0.0 {
        let mode = ModeIndex {
            n,
            m: m as i32,
            alpha: 0.0,
        };
        return Ok(Complex64::new(hankel_radial(mode, pt.r)?, 0.0));
    }
    let kr = 2.0 * PI * pt.r;
    let res = integrate_complex(
        |rho| {
            let amp = radial_unchecked(n, m, 0.0, rho) * bessel_j_pos(m as f64, kr * rho) * rho;
            Complex64::from_polar(amp, pt.f * rho * rho)
        },
        0.0,
        1.0,
        tol,
        0.0,
        4000,
    )?;
    Ok(res.value)
}

fn mode_field(mode: ModeIndex, pt: FocusPoint, tol: f64) -> Result<Complex64> {
    let m = mode.abs_m();
    let p = mode.p();
    let coeffs = connection_coeffs(m, p, mode.alpha, p + MAX_TERMS);
    // Past this index the V-functions decay faster than any power.
    let settle = p as f64 + 2.0 * PI * pt.r + pt.f.abs() + 10.0;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut small_run = 0;
    let mut converged = false;
    let mut last_term = f64::INFINITY;
    for (k, &c) in coeffs.iter().enumerate().skip(p as usize) {
        if c == 0.0 {
            // Integer α: the series has terminated.
            if k as u32 > p {
                converged = true;
                break;
            }
            continue;
        }
        let term = c * v_function(m, m + 2 * k as u32, pt, tol)?;
        sum += term;
        last_term = term.norm();
        if k as f64 >= settle {
            if last_term <= tol {
                small_run += 1;
                if small_run >= 3 {
                    converged = true;
                    break;
                }
            } else {
                small_run = 0;
            }
        }
    }
    if !converged && coeffs.last().is_some_and(|&c| c != 0.0) {
        return Err(Error::NonConvergence {
            what: "through-focus connection series",
            estimate: last_term,
        });
    }
    Ok(2.0 * PI * i_pow(m as i64) * Complex64::from_polar(1.0, mode.m as f64 * pt.phi) * sum)
}

/// Through-focus field Σ c U_n^{m,α}(r, φ; f) of a coefficient set.
pub fn u_field(coeffs: &CoefficientSet, pt: FocusPoint, tol: f64) -> Result<Complex64> {
    coeffs.require_evaluable()?;
    pt.validate()?;
    let mut total = Complex64::new(0.0, 0.0);
    for (mode, e) in coeffs.modes().into_iter().zip(coeffs.entries()) {
        total += e.value * mode_field(mode, pt, tol)?;
    }
    Ok(total)
}

/// Direct 2-D quadrature of the pupil integral with the defocus phase.
pub fn u_field_oracle(coeffs: &CoefficientSet, pt: FocusPoint, spec: &OracleSpec) -> Result<Estimate> {
    coeffs.require_evaluable()?;
    pt.validate()?;
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for (mode, e) in coeffs.modes().into_iter().zip(coeffs.entries()) {
        let est = oracle_with_defocus(mode, pt.r, pt.phi, pt.f, spec)?;
        value += e.value * est.value;
        error += e.value.norm() * est.error;
    }
    Ok(Estimate { value, error })
}

/// One field grid per defocus value, with `f` recorded in the metadata.
pub fn psf_stack(
    coeffs: &CoefficientSet,
    spec: &GridSpec,
    defocus: &[f64],
    tol: f64,
) -> Result<Vec<FieldGrid>> {
    coeffs.require_evaluable()?;
    defocus
        .iter()
        .map(|&f| {
            let grid = FieldGrid::try_from_polar_fn(spec.clone(), |r, phi| {
                u_field(coeffs, FocusPoint::new(r, phi, f), tol)
            })?;
            Ok(grid
                .with_meta("quantity", "psf")
                .with_meta("alpha", fmt_g17(coeffs.alpha()))
                .with_meta("f", fmt_g17(f)))
        })
        .collect()
}
