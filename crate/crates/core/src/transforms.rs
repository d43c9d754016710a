//! Fourier, Hankel and Radon transforms of the generalized circle functions,
//! in closed form and by direct quadrature of their defining integrals.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{FieldGrid, GridSpec};
use crate::quadrature::gauss_jacobi;
use crate::specfun::{bessel_j_scaled, gamma_unchecked, gegenbauer_c, jacobi_unchecked, poch};
use crate::zernike::{CoefficientSet, ModeIndex};

/// Spatial-frequency point x + iy = r e^{iφ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierPoint {
    pub r: f64,
    pub phi: f64,
}

impl FourierPoint {
    pub fn new(r: f64, phi: f64) -> Self {
        FourierPoint { r, phi }
    }
}

/// Line at distance τ from the origin with unit normal at angle ψ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadonLine {
    pub tau: f64,
    pub psi: f64,
}

impl RadonLine {
    pub fn new(tau: f64, psi: f64) -> Self {
        RadonLine { tau, psi }
    }
}

/// A quadrature value with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

/// i^k computed exactly.
pub fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// (-1)^k
pub fn sign_pow(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// (-1)^p 2^α (p+1)_α J_{n+α+1}(2πr) / (2πr)^{α+1}
pub fn hankel_radial(mode: ModeIndex, r: f64) -> Result<f64> {
    mode.validate()?;
    if r < 0.0 {
        return Err(Error::Precondition(format!("hankel_radial: r = {r} < 0")));
    }
    let a = mode.alpha;
    let p = mode.p() as f64;
    let nu = mode.n as f64 + a + 1.0;
    Ok(sign_pow(mode.p() as i64) * 2f64.powf(a) * poch(p + 1.0, a) * bessel_j_scaled(nu, 2.0 * PI * r, a)?)
}

/// Fourier transform ∫∫ e^{2πiρr cos(θ-φ)} Z_n^{m,α}(ρ,θ) ρ dρ dθ in closed form.
pub fn fourier(mode: ModeIndex, pt: FourierPoint) -> Result<Complex64> {
    let h = hankel_radial(mode, pt.r)?;
    // 2π i^n (-1)^p = 2π i^{|m|} since i^{2p} = (-1)^p.
    let phase = Complex64::from_polar(1.0, mode.m as f64 * pt.phi);
    Ok(2.0 * PI * h * i_pow(mode.abs_m() as i64) * phase)
}

/// Radon-transform prefactor (p+1)_α 2^{2α+1} Γ(α+1) / (n+1)_{2α+1}.
fn radon_constant(mode: ModeIndex) -> f64 {
    let a = mode.alpha;
    let n = mode.n as f64;
    poch(mode.p() as f64 + 1.0, a) * 2f64.powf(2.0 * a + 1.0) * gamma_unchecked(a + 1.0)
        / poch(n + 1.0, 2.0 * a + 1.0)
}

/// Line integral of Z_n^{m,α} over the chord l(τ, ψ), in closed form.
pub fn radon(mode: ModeIndex, line: RadonLine) -> Result<Complex64> {
    mode.validate()?;
    if !(line.tau >= 0.0) {
        return Err(Error::Precondition(format!(
            "radon: tau = {} must be nonnegative",
            line.tau
        )));
    }
    if line.tau >= 1.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let a = mode.alpha;
    let t = line.tau;
    let v = radon_constant(mode)
        * ((1.0 - t) * (1.0 + t)).powf(a + 0.5)
        * gegenbauer_c(mode.n as usize, a + 1.0, t);
    Ok(Complex64::from_polar(v, mode.m as f64 * line.psi))
}

/// Node counts for the 2-D Fourier oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSpec {
    pub n_radial: usize,
    pub n_angular: usize,
}

impl Default for OracleSpec {
    fn default() -> Self {
        OracleSpec {
            n_radial: 48,
            n_angular: 96,
        }
    }
}

/// Direct quadrature of ∫∫ e^{2πiρr cos(θ-φ)} Z ρ dρ dθ, optionally with an
/// extra defocus phase e^{ifρ²}. Gauss-Jacobi in x = 2ρ²-1 absorbs the rim
/// factor; the angular integral uses the trapezoid rule.
pub(crate) fn disk_fourier_quadrature(
    mode: ModeIndex,
    r: f64,
    phi: f64,
    defocus: f64,
    nr: usize,
    na: usize,
) -> Result<Complex64> {
    mode.validate()?;
    let a = mode.alpha;
    let ma = mode.abs_m();
    let p = mode.p() as usize;
    let rule = gauss_jacobi(nr, a, 0.0)?;
    let scale = 2f64.powf(-a) / 4.0;
    let twopi_r = 2.0 * PI * r;
    let dtheta = 2.0 * PI / na as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let rho = ((1.0 + x) / 2.0).sqrt();
        let radial = rho.powi(ma as i32) * jacobi_unchecked(p, a, ma as f64, x);
        let mut ang = Complex64::new(0.0, 0.0);
        for j in 0..na {
            let th = dtheta * j as f64;
            let arg = twopi_r * rho * (th - phi).cos() + mode.m as f64 * th + defocus * rho * rho;
            ang += Complex64::from_polar(1.0, arg);
        }
        total += ang * (w * scale * radial * dtheta);
    }
    Ok(total)
}

/// Quadrature oracle for [`fourier`]; the error is estimated by refining both
/// node counts.
pub fn fourier_oracle(mode: ModeIndex, pt: FourierPoint, spec: &OracleSpec) -> Result<Estimate> {
    oracle_with_defocus(mode, pt.r, pt.phi, 0.0, spec)
}

pub(crate) fn oracle_with_defocus(
    mode: ModeIndex,
    r: f64,
    phi: f64,
    defocus: f64,
    spec: &OracleSpec,
) -> Result<Estimate> {
    // The angular sum is exact once it resolves the Bessel bandwidth 2πr + |m|.
    let band = (2.0 * PI * r + mode.abs_m() as f64).ceil() as usize;
    let na = spec.n_angular.max(2 * band + 32);
    let nr = spec.n_radial.max(mode.n as usize + (2.0 * PI * r + defocus.abs()) as usize + 24);
    let coarse = disk_fourier_quadrature(mode, r, phi, defocus, nr, na)?;
    let fine = disk_fourier_quadrature(mode, r, phi, defocus, nr + nr / 2, na + na / 2)?;
    Ok(Estimate {
        value: fine,
        error: (fine - coarse).norm(),
    })
}

/// Quadrature of the chord integral ∫ Z(τ n_ψ + t t_ψ) dt over |t| < √(1-τ²).
///
/// With t = L s, L = √(1-τ²), the rim factor becomes L^{2α}(1-s²)^α and is
/// absorbed by a Gauss-Jacobi(α, α) rule; the remaining factor is smooth.
pub fn radon_oracle(mode: ModeIndex, line: RadonLine, n_nodes: usize) -> Result<Estimate> {
    mode.validate()?;
    if line.tau >= 1.0 {
        return Ok(Estimate {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
        });
    }
    let eval_with = |nodes: usize| -> Result<Complex64> {
        let a = mode.alpha;
        let rule = gauss_jacobi(nodes, a, a)?;
        let l = ((1.0 - line.tau) * (1.0 + line.tau)).sqrt();
        let (sp, cp) = line.psi.sin_cos();
        let ma = mode.abs_m();
        let p = mode.p() as usize;
        let mut s = Complex64::new(0.0, 0.0);
        for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
            let t = l * u;
            let x = line.tau * cp - t * sp;
            let y = line.tau * sp + t * cp;
            let rho = x.hypot(y);
            let th = y.atan2(x);
            let v = rho.powi(ma as i32) * jacobi_unchecked(p, a, ma as f64, 2.0 * rho * rho - 1.0);
            s += Complex64::from_polar(w * v, mode.m as f64 * th);
        }
        Ok(s * l.powf(2.0 * a + 1.0))
    };
    let coarse = eval_with(n_nodes)?;
    let fine = eval_with(n_nodes + 8)?;
    Ok(Estimate {
        value: fine,
        error: (fine - coarse).norm(),
    })
}

/// Fourier transform of an expansion sampled on a grid.
pub fn fourier_field(coeffs: &CoefficientSet, spec: GridSpec) -> Result<FieldGrid> {
    coeffs.require_evaluable()?;
    let modes = coeffs.modes();
    let grid = FieldGrid::try_from_polar_fn(spec, |r, phi| {
        let mut s = Complex64::new(0.0, 0.0);
        for (mode, e) in modes.iter().zip(coeffs.entries()) {
            s += e.value * fourier(*mode, FourierPoint::new(r, phi))?;
        }
        Ok(s)
    })?;
    Ok(grid
        .with_meta("quantity", "fourier")
        .with_meta("alpha", crate::grid::fmt_g17(coeffs.alpha())))
}

/// Least-squares slope of log(envelope |F Z|) against log r on [r_lo, r_hi].
///
/// The envelope is the maximum of |F Z| over each unit-length window (one
/// period of the Bessel oscillation in r).
pub fn decay_slope(mode: ModeIndex, r_lo: f64, r_hi: f64) -> Result<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut start = r_lo;
    while start + 1.0 <= r_hi + 1e-12 {
        let mut peak: f64 = 0.0;
        let mut at = start;
        for i in 0..=200 {
            let r = start + i as f64 / 200.0;
            let v = fourier(mode, FourierPoint::new(r, 0.0))?.norm();
            if v > peak {
                peak = v;
                at = r;
            }
        }
        xs.push(at.ln());
        ys.push(peak.ln());
        start += 1.0;
    }
    if xs.len() < 2 {
        return Err(Error::InsufficientData(
            "decay_slope needs a range of at least two periods".into(),
        ));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{gauss_legendre, integrate, wynn_epsilon};
    use crate::specfun::{bessel_j, chebyshev_u, gamma};
    use crate::zernike::{radial, Basis};

    fn mode(n: u32, m: i32, a: f64) -> ModeIndex {
        ModeIndex::new(n, m, a).unwrap()
    }

    #[test]
    fn fourier_examples() {
        let v = fourier(mode(0, 0, 0.0), FourierPoint::new(0.0, 0.3)).unwrap();
        assert!((v - Complex64::new(PI, 0.0)).norm() < 1e-14);
        for a in [-0.5, 0.5, 2.3] {
            let v = fourier(mode(0, 0, a), FourierPoint::new(0.0, 0.0)).unwrap();
            assert!((v.re - PI / (a + 1.0)).abs() < 1e-13, "alpha={a}");
        }
        let v = fourier(mode(2, 0, 0.0), FourierPoint::new(1.0, 0.0)).unwrap();
        let want = 2.0 * PI * -bessel_j(3.0, 2.0 * PI).unwrap() / (2.0 * PI);
        assert!((v.re - want).abs() < 1e-14 && v.im.abs() < 1e-15);
    }

    #[test]
    fn hankel_examples() {
        for a in [-0.5, 0.0, 1.5] {
            let v = hankel_radial(mode(0, 0, a), 0.0).unwrap();
            assert!((v - 1.0 / (2.0 * (a + 1.0))).abs() < 1e-14);
        }
        let v = hankel_radial(mode(2, 0, 0.0), 0.5).unwrap();
        assert!((v + bessel_j(3.0, PI).unwrap() / PI).abs() < 1e-14);
        assert_eq!(hankel_radial(mode(1, 1, 0.0), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn hankel_matches_radial_quadrature() {
        // ∫ R J_|m|(2πρr) ρ dρ on a smooth integrand (α integer).
        let md = mode(4, 2, 1.0);
        let r = 0.8;
        let gl = gauss_legendre(60).mapped(0.0, 1.0);
        let q = gl.apply(|rho| {
            radial(md, rho).unwrap() * bessel_j(2.0, 2.0 * PI * rho * r).unwrap() * rho
        });
        assert!((q - hankel_radial(md, r).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn fourier_matches_oracle() {
        for &(n, m, a, r, phi) in &[
            (0u32, 0i32, 0.0, 0.7, 0.0),
            (3, -1, 0.5, 1.3, 0.4),
            (6, 4, -0.5, 2.1, -1.0),
            (5, 5, 2.3, 0.05, 2.0),
        ] {
            let md = mode(n, m, a);
            let pt = FourierPoint::new(r, phi);
            let o = fourier_oracle(md, pt, &OracleSpec::default()).unwrap();
            let c = fourier(md, pt).unwrap();
            assert!((o.value - c).norm() < 1e-10, "{md:?} {o:?} {c}");
            assert!(o.error < 1e-9);
        }
    }

    #[test]
    fn radon_examples() {
        for t in [0.0, 0.3, 0.99] {
            let v = radon(mode(0, 0, 0.0), RadonLine::new(t, 0.0)).unwrap();
            assert!((v.re - 2.0 * (1.0 - t * t).sqrt()).abs() < 1e-14);
        }
        let v = radon(mode(2, 0, 1.0), RadonLine::new(0.0, 0.0)).unwrap();
        assert!((v.re + 8.0 / 15.0).abs() < 1e-14);
        assert_eq!(
            radon(mode(4, 2, 0.5), RadonLine::new(1.2, 0.0)).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        assert!(radon(mode(0, 0, 0.0), RadonLine::new(-0.1, 0.0)).is_err());
        // (1-ρ²)^{-1/2} integrates to π along every chord.
        let v = radon(mode(0, 0, -0.5), RadonLine::new(0.4, 0.0)).unwrap();
        assert!((v.re - PI).abs() < 1e-14);
    }

    #[test]
    fn radon_classical_reduction() {
        for n in 0..12u32 {
            for m in (-(n as i32)..=n as i32).step_by(2) {
                let (t, psi) = (0.37, 0.9);
                let v = radon(mode(n, m, 0.0), RadonLine::new(t, psi)).unwrap();
                let w = 2.0 / (n as f64 + 1.0) * (1.0 - t * t).sqrt() * chebyshev_u(n as usize, t);
                let want = Complex64::from_polar(w, m as f64 * psi);
                assert!((v - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn radon_matches_chord_oracle() {
        for &(n, m, a, t, psi) in &[
            (2u32, 0i32, 1.0, 0.0, 0.0),
            (5, -3, 0.5, 0.6, 1.1),
            (8, 2, -0.5, 0.2, 4.0),
            (11, 11, 2.3, 0.95, 0.3),
        ] {
            let md = mode(n, m, a);
            let line = RadonLine::new(t, psi);
            let o = radon_oracle(md, line, 24).unwrap();
            let c = radon(md, line).unwrap();
            assert!((o.value - c).norm() < 1e-10, "{md:?} {o:?} {c}");
        }
    }

    #[test]
    fn projection_slice() {
        // ∫ Rad(τ, ψ) e^{2πiτr} dτ over signed τ equals the Fourier transform
        // along the normal direction ψ.
        for &(n, m, a) in &[(0u32, 0i32, 0.0), (3, 1, 0.5), (4, -2, 1.0)] {
            let md = mode(n, m, a);
            let psi = 0.7;
            let rule = gauss_jacobi(60, a + 0.5, a + 0.5).unwrap();
            let k = radon_constant(md);
            for r in [0.3, 1.1] {
                let mut s = Complex64::new(0.0, 0.0);
                for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                    let v = k * gegenbauer_c(n as usize, a + 1.0, t);
                    s += Complex64::from_polar(w * v, m as f64 * psi + 2.0 * PI * t * r);
                }
                let f = fourier(md, FourierPoint::new(r, psi)).unwrap();
                assert!((s - f).norm() < 1e-5, "{md:?} r={r}: {s} vs {f}");
            }
        }
    }

    #[test]
    fn radon_scalar_cases() {
        let k = radon_constant(mode(0, 0, 0.5));
        // 2^{2}Γ(3/2)(1)_{1/2}/(1)_2 = 4·(√π/2)·(√π/2)/2 = π/2
        assert!((k - PI / 2.0).abs() < 1e-14);
        assert!((gamma(1.5).unwrap() - PI.sqrt() / 2.0).abs() < 1e-15);
    }

    /// (-1)^p 2^α (p+1)_α ∫_0^T J_{n+α+1}(t) J_|m|(ρt) t^{-α} dt, with the
    /// tail beyond T optionally accelerated by Wynn's epsilon over half-period panels.
    fn hankel_inversion(md: ModeIndex, rho: f64, t_max: f64, accelerate: bool) -> f64 {
        let a = md.alpha;
        let nu = md.n as f64 + a + 1.0;
        let ma = md.abs_m() as f64;
        let f = |t: f64| {
            if t == 0.0 {
                return 0.0;
            }
            bessel_j(nu, t).unwrap() * bessel_j(ma, rho * t).unwrap() * t.powf(-a)
        };
        let panel = PI / (1.0 + rho);
        let gl = gauss_legendre(20);
        let mut sum = 0.0;
        let mut t = 0.0;
        let mut partial = Vec::new();
        while t < t_max {
            let hi = (t + panel).min(t_max);
            sum += gl.mapped(t, hi).apply(f);
            t = hi;
        }
        if accelerate {
            partial.push(Complex64::new(sum, 0.0));
            for _ in 0..30 {
                sum += gl.mapped(t, t + panel).apply(f);
                t += panel;
                partial.push(Complex64::new(sum, 0.0));
            }
            sum = wynn_epsilon(&partial).0.re;
        }
        let p = md.p() as f64;
        sign_pow(md.p() as i64) * 2f64.powf(a) * poch(p + 1.0, a) * sum
    }

    #[test]
    fn hankel_inversion_recovers_radial() {
        for &(n, m, a) in &[(0u32, 0i32, 0.0), (2, 0, 0.5), (3, 1, 1.0), (4, 2, -0.3)] {
            let md = mode(n, m, a);
            for rho in [0.2, 0.5, 0.8] {
                let got = hankel_inversion(md, rho, 2000.0, true);
                let want = radial(md, rho).unwrap();
                assert!((got - want).abs() < 1e-4, "{md:?} rho={rho}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn fourier_field_examples() {
        let one = Complex64::new(1.0, 0.0);
        let set = CoefficientSet::from_modes(0.0, Basis::Classical, &[(mode(0, 0, 0.0), one)]).unwrap();
        let spec = GridSpec::polar((0.0, 2.0, 9), (0.0, 0.0, 1)).unwrap();
        let g = fourier_field(&set, spec.clone()).unwrap();
        for (k, v) in g.values.iter().enumerate() {
            let (r, _) = spec.coords(k);
            let x = 2.0 * PI * r;
            let want = if r == 0.0 { PI } else { 2.0 * PI * bessel_j(1.0, x).unwrap() / x };
            assert!((v.re - want).abs() < 1e-13);
        }
        let empty = CoefficientSet::empty(0.0, Basis::Generalized);
        let g = fourier_field(&empty, spec).unwrap();
        assert!(g.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn far_field_decay_slope() {
        for a in [0.0, 0.5, 1.0] {
            let s = decay_slope(mode(2, 0, a), 20.0, 200.0).unwrap();
            assert!((s + a + 1.5).abs() < 0.05, "alpha={a}: slope {s}");
        }
    }

    #[test]
    fn adaptive_oracle_agrees_on_hankel() {
        let md = mode(3, 1, 0.5);
        let r = 1.7;
        let q = integrate(
            |rho| radial(md, rho).unwrap() * bessel_j(1.0, 2.0 * PI * rho * r).unwrap() * rho,
            0.0,
            1.0,
            1e-13,
            1e-12,
            500,
        )
        .unwrap();
        assert!((q.value - hankel_radial(md, r).unwrap()).abs() < 1e-10);
    }
}
