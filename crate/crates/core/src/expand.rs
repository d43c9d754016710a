//! Expansion coefficients: scaled radial parts in the classical basis,
//! generalized-to-classical connection, edge-power conversions and ring
//! integrals.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::{hyp2f1, ln_gamma_sign, poch, rgamma};
use crate::transforms::sign_pow;
use crate::zernike::{radial_unchecked, Basis, CoefficientSet, ModeIndex};

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Precondition(format!(
            "scale factor eps = {eps} must lie in [0, 1)"
        )));
    }
    Ok(())
}

/// ∫_0^∞ J_{n+α+1}(t) J_{n2}(εt) t^{-α} dt for n2 ≡ n (mod 2).
fn bessel_pair_integral(n: u32, n2: u32, alpha: f64, eps: f64) -> Result<f64> {
    let two_a = 2f64.powf(alpha);
    if n2 <= n {
        let p2 = ((n - n2) / 2) as f64;
        return Ok(sign_pow(p2 as i64) / (two_a * poch(p2 + 1.0, alpha))
            * radial_unchecked(n, n2, alpha, eps));
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    // p2 = (n - n2)/2 is negative here.
    let p2 = (n as f64 - n2 as f64) / 2.0;
    let n2f = n2 as f64;
    if rgamma(p2 + alpha + 1.0) == 0.0 {
        return Ok(0.0);
    }
    let f = hyp2f1(-p2 - alpha, n2f + p2 + 1.0, n2f + 1.0, eps * eps)?;
    // Gamma(n2 + p2 + 1) / (Gamma(n2 + 1) Gamma(p2 + α + 1)) overflows piecewise.
    let (lg_top, _) = ln_gamma_sign(n2f + p2 + 1.0)?;
    let (lg_bot, _) = ln_gamma_sign(n2f + 1.0)?;
    let (lg_r, sign_r) = ln_gamma_sign(p2 + alpha + 1.0)?;
    let ln_scale = n2f * eps.ln() + lg_top - lg_bot - lg_r;
    Ok(sign_r * ln_scale.exp() / two_a * f)
}

/// Coefficient C_{n n'}(ε) of R_n^{m,α}(ερ) on the classical R_{n'}^m(ρ).
pub fn scaling_coeff(mode: ModeIndex, eps: f64, n_prime: u32) -> Result<f64> {
    mode.validate()?;
    check_eps(eps)?;
    let n = mode.n;
    let m = mode.abs_m();
    if n_prime < m || (n_prime - m) % 2 != 0 {
        return Err(Error::Precondition(format!(
            "n' = {n_prime} must be >= m = {m} with n' - m even"
        )));
    }
    let a = mode.alpha;
    let p = mode.p() as f64;
    if n_prime + 2 <= n {
        let pp = ((n - n_prime) / 2) as f64;
        let ratio = poch(p + 1.0, a) / poch(pp + 1.0, a);
        let r1 = radial_unchecked(n, n_prime, a, eps);
        let r2 = radial_unchecked(n, n_prime + 2, a, eps);
        return Ok(ratio * (r1 - (pp + a) / pp * r2));
    }
    let sign = sign_pow(((n + n_prime) / 2 - m) as i64);
    let i1 = bessel_pair_integral(n, n_prime, a, eps)?;
    let i2 = bessel_pair_integral(n, n_prime + 2, a, eps)?;
    Ok(sign * 2f64.powf(a) * poch(p + 1.0, a) * (i1 + i2))
}

/// Scaling coefficients for n' = |m|, |m|+2, ..., n_max.
pub fn scaling_coeffs(mode: ModeIndex, eps: f64, n_max: u32) -> Result<Vec<(u32, f64)>> {
    mode.validate()?;
    check_eps(eps)?;
    let m = mode.abs_m();
    let mut out = Vec::new();
    let mut np = m;
    while np <= n_max {
        out.push((np, scaling_coeff(mode, eps, np)?));
        np += 2;
    }
    Ok(out)
}

/// Scaling coefficients truncated where |C| falls below `tol` times the
/// largest magnitude seen, for several consecutive terms, or at `n_cap`.
pub fn scaling_coeffs_truncated(
    mode: ModeIndex,
    eps: f64,
    tol: f64,
    n_cap: u32,
) -> Result<Vec<(u32, f64)>> {
    mode.validate()?;
    check_eps(eps)?;
    let mut out: Vec<(u32, f64)> = Vec::new();
    let mut peak: f64 = 0.0;
    let mut small_run = 0;
    let mut np = mode.abs_m();
    while np <= n_cap {
        let c = scaling_coeff(mode, eps, np)?;
        peak = peak.max(c.abs());
        out.push((np, c));
        if np >= mode.n {
            if c.abs() <= tol * peak {
                small_run += 1;
                if small_run >= 3 {
                    break;
                }
            } else {
                small_run = 0;
            }
        }
        np += 2;
    }
    while out.len() > 1 && out.last().is_some_and(|l| l.1.abs() <= tol * peak) {
        out.pop();
    }
    Ok(out)
}

/// Connection coefficients C_k, k = 0..=k_max, of R_{m+2p}^{m,α} in the
/// classical R_{m+2k}^m.
pub fn connection_coeffs(m: u32, p: u32, alpha: f64, k_max: u32) -> Vec<f64> {
    let mf = m as f64;
    let pf = p as f64;
    let head = poch(pf + 1.0, alpha);
    let mut out = vec![0.0; k_max as usize + 1];
    // (-α)_j / j! built incrementally.
    let mut binom = 1.0;
    for k in p..=k_max {
        let j = k - p;
        if j > 0 {
            binom *= (-alpha + (j - 1) as f64) / j as f64;
        }
        let kf = k as f64;
        out[k as usize] = (mf + 2.0 * kf + 1.0) / (mf + kf + pf + alpha + 1.0) * binom * head
            / poch(mf + kf + pf + 1.0, alpha);
    }
    out
}

/// Expansion of Z_n^{m,α} over classical Zernike modes (m + 2k, m), k <= k_max.
pub fn to_classical(mode: ModeIndex, k_max: u32) -> Result<CoefficientSet> {
    mode.validate()?;
    let p = mode.p();
    if k_max < p {
        return Err(Error::Precondition(format!(
            "k_max = {k_max} must be at least p = {p}"
        )));
    }
    let m = mode.abs_m();
    let items: Vec<(ModeIndex, Complex64)> = connection_coeffs(m, p, mode.alpha, k_max)
        .into_iter()
        .enumerate()
        .skip(p as usize)
        .map(|(k, c)| {
            (
                ModeIndex {
                    n: m + 2 * k as u32,
                    m: mode.m,
                    alpha: 0.0,
                },
                Complex64::new(c, 0.0),
            )
        })
        .collect();
    CoefficientSet::from_modes(0.0, Basis::Classical, &items)
}

/// D_{m+2l,k}, l = 0..=k: ρ^m (1-ρ²)^{k+α} e^{imθ} = Σ_l D_l Z_{m+2l}^{m,α}.
pub fn edge_power_to_zernike(m: u32, alpha: f64, k: u32) -> Vec<(u32, f64)> {
    let mf = m as f64;
    let kf = k as f64;
    let lead = poch(alpha + 1.0, kf) / poch(mf + alpha + 1.0, kf);
    (0..=k)
        .map(|l| {
            let lf = l as f64;
            let d = lead * (mf + 2.0 * lf + alpha + 1.0) / (mf + kf + lf + alpha + 1.0)
                * poch(-kf, lf)
                * poch(mf + alpha + 1.0, lf)
                / (poch(alpha + 1.0, lf) * poch(mf + kf + alpha + 1.0, lf));
            (l, d)
        })
        .collect()
}

/// E_{r,m+2p}, r = 0..=p: Z_{m+2p}^{m,α} = Σ_r E_r ρ^m (1-ρ²)^{r+α} e^{imθ}.
pub fn zernike_to_edge_power(mode: ModeIndex) -> Result<Vec<(u32, f64)>> {
    mode.validate()?;
    let a = mode.alpha;
    let m = mode.abs_m() as f64;
    let p = mode.p();
    let pf = p as f64;
    let lead = poch(a + 1.0, pf) / poch(1.0, pf);
    Ok((0..=p)
        .map(|r| {
            let rf = r as f64;
            let e = lead * poch(-pf, rf) * poch(m + pf + a + 1.0, rf)
                / (poch(a + 1.0, rf) * poch(1.0, rf));
            (r, e)
        })
        .collect())
}

/// Ratio D_{2r,p}^{0,α} / E_{r,2p}^{0,α} in closed form.
pub fn conditioning_ratio(alpha: f64, p: u32, r: u32) -> f64 {
    let pf = p as f64;
    let rf = r as f64;
    poch(1.0, pf) / poch(alpha + 1.0, pf) * (2.0 * rf + alpha + 1.0) / (pf + rf + alpha + 1.0)
        * poch(1.0, rf)
        * poch(alpha + 1.0, rf)
        / poch(pf + alpha + 1.0, rf).powi(2)
}

/// Converts an edge-power coefficient set to the generalized basis.
pub fn edge_power_set_to_generalized(set: &CoefficientSet) -> Result<CoefficientSet> {
    if set.basis() != Basis::EdgePower {
        return Err(Error::Basis("expected an edge_power coefficient set".into()));
    }
    let a = set.alpha();
    let mut items = Vec::new();
    for e in set.entries() {
        let m = e.m.unsigned_abs();
        let k = (e.n - m) / 2;
        for (l, d) in edge_power_to_zernike(m, a, k) {
            items.push((
                ModeIndex {
                    n: m + 2 * l,
                    m: e.m,
                    alpha: a,
                },
                e.value * d,
            ));
        }
    }
    CoefficientSet::from_modes(a, Basis::Generalized, &items)
}

/// Converts a generalized (or classical) coefficient set to the edge-power basis.
pub fn generalized_set_to_edge_power(set: &CoefficientSet) -> Result<CoefficientSet> {
    set.require_evaluable()?;
    let a = set.alpha();
    let mut items = Vec::new();
    for (mode, e) in set.modes().into_iter().zip(set.entries()) {
        let m = mode.abs_m();
        for (r, c) in zernike_to_edge_power(mode)? {
            items.push((
                ModeIndex {
                    n: m + 2 * r,
                    m: mode.m,
                    alpha: a,
                },
                e.value * c,
            ));
        }
    }
    CoefficientSet::from_modes(a, Basis::EdgePower, &items)
}

/// Converts a generalized set to the classical basis, truncating each mode's
/// connection series at `k_extra` terms beyond its first nonzero one (exact
/// for nonnegative integer α once k_extra > α).
pub fn generalized_set_to_classical(set: &CoefficientSet, k_extra: u32) -> Result<CoefficientSet> {
    set.require_evaluable()?;
    if set.basis() == Basis::Classical {
        return Ok(set.clone());
    }
    let mut items = Vec::new();
    for (mode, e) in set.modes().into_iter().zip(set.entries()) {
        let cl = to_classical(mode, mode.p() + k_extra)?;
        for c in cl.entries() {
            items.push((
                ModeIndex {
                    n: c.n,
                    m: c.m,
                    alpha: 0.0,
                },
                e.value * c.value,
            ));
        }
    }
    CoefficientSet::from_modes(0.0, Basis::Classical, &items)
}

/// Edge exponent ±1/2 of the ring-integral families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfSign {
    Minus,
    Plus,
}

impl HalfSign {
    pub fn value(self) -> f64 {
        match self {
            HalfSign::Minus => -0.5,
            HalfSign::Plus => 0.5,
        }
    }
}

fn r_half(l: i64, rho: f64) -> f64 {
    if l < 0 {
        return 0.0;
    }
    radial_unchecked(2 * l as u32, 0, 0.5, rho)
}

/// Antiderivative of R_{2l}^{0,±1/2}(ρ) ρ.
pub fn ring_antiderivative(l: u32, sign: HalfSign, rho: f64) -> f64 {
    let li = l as i64;
    let lf = l as f64;
    match sign {
        HalfSign::Minus => -(r_half(li, rho) + r_half(li - 1, rho)) / (4.0 * lf + 1.0),
        HalfSign::Plus => {
            let a = (2.0 * lf + 2.0) / (4.0 * lf + 5.0);
            let b = (4.0 * lf + 3.0) / ((4.0 * lf + 5.0) * (4.0 * lf + 1.0));
            let c = (2.0 * lf + 1.0) / (4.0 * lf + 1.0);
            (a * r_half(li + 1, rho) - b * r_half(li, rho) - c * r_half(li - 1, rho))
                / (4.0 * lf + 3.0)
        }
    }
}

/// ∫_{ρ_lo}^{ρ_hi} R_{2l}^{0,±1/2}(ρ) ρ dρ.
pub fn ring_integral(l: u32, sign: HalfSign, rho_lo: f64, rho_hi: f64) -> Result<f64> {
    if !(0.0 <= rho_lo && rho_lo <= rho_hi && rho_hi <= 1.0) {
        return Err(Error::Precondition(format!(
            "ring interval [{rho_lo}, {rho_hi}] must satisfy 0 <= lo <= hi <= 1"
        )));
    }
    Ok(ring_antiderivative(l, sign, rho_hi) - ring_antiderivative(l, sign, rho_lo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{gauss_jacobi, gauss_legendre, integrate};
    use crate::zernike::{eval, eval_sum, radial, PolarPoint};

    fn mode(n: u32, m: i32, a: f64) -> ModeIndex {
        ModeIndex::new(n, m, a).unwrap()
    }

    fn classical(n: u32, m: u32, rho: f64) -> f64 {
        radial_unchecked(n, m, 0.0, rho)
    }

    #[test]
    fn scaling_example_classical() {
        let eps = 0.63;
        let c = scaling_coeffs(mode(2, 0, 0.0), eps, 8).unwrap();
        assert!((c[0].1 - (eps * eps - 1.0)).abs() < 1e-15);
        assert!((c[1].1 - eps * eps).abs() < 1e-15);
        for &(_, v) in &c[2..] {
            assert!(v.abs() < 1e-15);
        }
    }

    #[test]
    fn scaling_terminates_for_integer_alpha() {
        let c = scaling_coeffs(mode(0, 0, 1.0), 0.5, 12).unwrap();
        for &(np, v) in &c {
            if np >= 4 {
                assert!(v.abs() < 1e-14, "n'={np} c={v}");
            }
        }
        assert!(c[1].1.abs() > 1e-3);
        for (n, m, a) in [(3u32, 1i32, 2.0), (6, 2, 1.0), (4, 0, 0.0)] {
            let md = mode(n, m, a);
            let cut = n + 2 * a as u32 + 2;
            for (np, v) in scaling_coeffs(md, 0.77, cut + 10).unwrap() {
                if np >= cut {
                    assert!(v.abs() < 1e-14, "{md:?} n'={np} c={v}");
                }
            }
        }
    }

    #[test]
    fn scaling_matches_defining_integral() {
        // C = 2(n'+1) ∫ R_n^{m,α}(ερ) R_{n'}^m(ρ) ρ dρ
        let gl = gauss_legendre(80).mapped(0.0, 1.0);
        for (n, m, a, eps) in [(4u32, 2i32, 0.5, 0.6), (3, 1, -0.5, 0.9), (5, 1, 2.3, 0.3)] {
            let md = mode(n, m, a);
            for (np, c) in scaling_coeffs(md, eps, n + 8).unwrap() {
                let q = 2.0 * (np as f64 + 1.0)
                    * gl.apply(|r| radial(md, eps * r).unwrap() * classical(np, m as u32, r) * r);
                assert!((q - c).abs() < 1e-9, "{md:?} n'={np}: {c} vs {q}");
            }
        }
    }

    fn sup_error(md: ModeIndex, eps: f64, coeffs: &[(u32, f64)], rho_max: f64) -> f64 {
        (0..=200)
            .map(|i| rho_max * i as f64 / 200.0)
            .map(|r| {
                let s: f64 = coeffs
                    .iter()
                    .map(|&(np, c)| c * classical(np, md.abs_m(), r))
                    .sum();
                (radial(md, eps * r).unwrap() - s).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn scaling_reconstruction_integer_alpha() {
        for a in [0.0, 1.0, 2.0] {
            for (n, m) in [(0u32, 0i32), (3, 1), (6, 4)] {
                let md = mode(n, m, a);
                let c = scaling_coeffs(md, 0.8, n + 2 * a as u32 + 2).unwrap();
                assert!(sup_error(md, 0.8, &c, 1.0) < 1e-8);
            }
        }
    }

    #[test]
    fn scaling_error_decreases_noninteger_alpha() {
        let md = mode(2, 0, 0.5);
        let mut last = f64::INFINITY;
        for n_max in [4u32, 8, 16, 32] {
            let c = scaling_coeffs(md, 0.8, n_max).unwrap();
            let e = sup_error(md, 0.8, &c, 1.0);
            assert!(e < last, "n_max={n_max}: {e} !< {last}");
            last = e;
        }
    }

    #[test]
    fn scaling_continuity_near_unit_scale() {
        for (n, m, a) in [(2u32, 0i32, 0.5), (3, 1, 1.5), (4, 2, 0.5), (1, 1, -0.5)] {
            let md = mode(n, m, a);
            let c999 = scaling_coeffs_truncated(md, 0.999, 1e-12, 600).unwrap();
            let c99 = scaling_coeffs_truncated(md, 0.99, 1e-12, 600).unwrap();
            let sum = |c: &[(u32, f64)], r: f64| -> f64 {
                c.iter().map(|&(np, v)| v * classical(np, md.abs_m(), r)).sum()
            };
            for r in [0.3, 0.6, 0.9] {
                let s = sum(&c999, r);
                assert!((s - radial(md, 0.999 * r).unwrap()).abs() < 1e-8, "{md:?} rho={r}");
                // The residual against the unscaled profile shrinks as ε -> 1.
                let exact = radial(md, r).unwrap();
                let ratio = (sum(&c99, r) - exact).abs() / (s - exact).abs();
                assert!(ratio > 2.0, "{md:?} rho={r} ratio={ratio}");
            }
        }
    }

    #[test]
    fn scaling_rejects_bad_eps() {
        assert!(scaling_coeffs(mode(2, 0, 0.0), 1.0, 4).is_err());
        assert!(scaling_coeffs(mode(2, 0, 0.0), -0.1, 4).is_err());
    }

    #[test]
    fn connection_examples() {
        let c = to_classical(mode(0, 0, 1.0), 6).unwrap();
        assert!((c.get(0, 0).re - 0.5).abs() < 1e-15);
        assert!((c.get(2, 0).re + 0.5).abs() < 1e-15);
        for k in 2..=6 {
            assert_eq!(c.get(2 * k, 0).re, 0.0);
        }
        let c = to_classical(mode(2, 2, 0.0), 5).unwrap();
        assert!((c.get(2, 2).re - 1.0).abs() < 1e-15);
        assert!(c.entries().iter().skip(1).all(|e| e.value.norm() == 0.0));
        assert!(to_classical(mode(4, 0, 0.5), 1).is_err());
    }

    #[test]
    fn connection_closed_form_radially_symmetric() {
        // C_k = (-1)^k (2k+1)/(k+1) binom(α,k)/binom(k+α+1, α)
        let a = 0.7;
        let c = connection_coeffs(0, 0, a, 10);
        for (k, &ck) in c.iter().enumerate() {
            let kf = k as f64;
            let binom_a_k = poch(a - kf + 1.0, kf) / poch(1.0, kf);
            let binom_big = poch(kf + 2.0, a) / poch(1.0, a);
            let want = sign_pow(k as i64) * (2.0 * kf + 1.0) / (kf + 1.0) * binom_a_k / binom_big;
            assert!((ck - want).abs() < 1e-14);
        }
    }

    #[test]
    fn connection_matches_inner_products() {
        for (n, m, a) in [(2u32, 0u32, 0.5), (5, 1, -0.5), (6, 4, 2.3), (4, 2, 1.0)] {
            let p = (n - m) / 2;
            let c = connection_coeffs(m, p, a, p + 6);
            // 2(m+2k+1) ∫ R_n^{m,α} R_{m+2k}^m ρ dρ with the rim factor in the weight.
            let rule = gauss_jacobi(40, a, 0.0).unwrap();
            for (k, &ck) in c.iter().enumerate() {
                let nk = m + 2 * k as u32;
                let q = rule.apply(|x| {
                    let r = ((1.0 + x) / 2.0).sqrt();
                    r.powi(m as i32)
                        * crate::specfun::jacobi_unchecked(p as usize, a, m as f64, x)
                        * classical(nk, m, r)
                }) * 2f64.powf(-a)
                    / 4.0;
                let want = 2.0 * (nk as f64 + 1.0) * q;
                assert!((ck - want).abs() < 1e-9, "n={n} m={m} a={a} k={k}: {ck} vs {want}");
            }
        }
    }

    #[test]
    fn connection_terminates_for_integer_alpha() {
        for a in [0u32, 1, 2, 3] {
            for (m, p) in [(0u32, 0u32), (1, 2), (3, 1)] {
                let c = connection_coeffs(m, p, a as f64, p + a + 8);
                for (k, v) in c.iter().enumerate() {
                    if k as u32 >= p + a + 1 || (k as u32) < p {
                        assert!(v.abs() < 1e-14);
                    }
                }
                assert!(c[(p + a) as usize].abs() > 1e-6);
            }
        }
    }

    #[test]
    fn connection_reconstruction() {
        let md = mode(4, 2, 2.0);
        let set = to_classical(md, md.p() + 2).unwrap();
        for r in [0.0, 0.2, 0.5, 0.8, 0.99] {
            let pt = PolarPoint::new(r, 0.4);
            let v = eval_sum(&set, pt).unwrap();
            assert!((v - eval(md, pt).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn edge_power_examples() {
        let d = edge_power_to_zernike(0, 0.0, 1);
        assert!((d[0].1 - 0.5).abs() < 1e-15 && (d[1].1 + 0.5).abs() < 1e-15);
        for m in 0..4 {
            let d = edge_power_to_zernike(m, 0.3, 0);
            assert_eq!(d, vec![(0, 1.0)]);
        }
        let e = zernike_to_edge_power(mode(2, 0, 0.0)).unwrap();
        assert_eq!(e, vec![(0, 1.0), (1, -2.0)]);
        assert_eq!(zernike_to_edge_power(mode(3, 3, 1.7)).unwrap(), vec![(0, 1.0)]);
    }

    #[test]
    fn edge_power_reconstruction() {
        let a = 0.5;
        let d = edge_power_to_zernike(0, a, 2);
        for i in 0..=100 {
            let r = i as f64 / 100.0;
            let s: f64 = d.iter().map(|&(l, c)| c * radial(mode(2 * l, 0, a), r).unwrap()).sum();
            assert!((s - (1.0 - r * r).powf(2.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn edge_power_matches_inner_products() {
        // D = (m+2l+α+1)/2^{m+k+α+1} (l+m+1)_α/(l+1)_α ∫(1-x)^{k+α}(1+x)^m P_l^{(α,m)} dx
        for (m, a, k) in [(0u32, 0.5, 3u32), (2, -0.5, 2), (1, 1.7, 4)] {
            let rule = gauss_jacobi(30, k as f64 + a, m as f64).unwrap();
            for (l, d) in edge_power_to_zernike(m, a, k) {
                let mf = m as f64;
                let lf = l as f64;
                let integral = rule.apply(|x| crate::specfun::jacobi_unchecked(l as usize, a, mf, x));
                let want = (mf + 2.0 * lf + a + 1.0) / 2f64.powf(mf + k as f64 + a + 1.0)
                    * poch(lf + mf + 1.0, a)
                    / poch(lf + 1.0, a)
                    * integral;
                assert!((d - want).abs() < 1e-9, "m={m} a={a} k={k} l={l}");
            }
        }
    }

    #[test]
    fn conversions_are_mutually_inverse() {
        for (m, a) in [(0u32, 0.5), (1, -0.5), (3, 2.0)] {
            for p in 0..6u32 {
                let md = mode(m + 2 * p, m as i32, a);
                let e = zernike_to_edge_power(md).unwrap();
                // Σ_r E_r Σ_l D_{l,r} Z_{m+2l} must give Z_{m+2p}.
                let mut acc = vec![0.0; p as usize + 1];
                for &(r, er) in &e {
                    for (l, d) in edge_power_to_zernike(m, a, r) {
                        acc[l as usize] += er * d;
                    }
                }
                for (l, v) in acc.iter().enumerate() {
                    let want = if l as u32 == p { 1.0 } else { 0.0 };
                    let scale = e.iter().map(|x| x.1.abs()).fold(1.0, f64::max);
                    assert!((v - want).abs() < 1e-12 * scale, "m={m} a={a} p={p} l={l}: {v}");
                }
            }
        }
    }

    #[test]
    fn conditioning_ratio_matches_coefficients() {
        let a = 0.5;
        let p = 4;
        let d = edge_power_to_zernike(0, a, p);
        let e = zernike_to_edge_power(mode(2 * p, 0, a)).unwrap();
        let mut last = f64::INFINITY;
        for r in 0..=p {
            let ratio = conditioning_ratio(a, p, r);
            assert!((ratio - d[r as usize].1 / e[r as usize].1).abs() < 1e-14);
            assert!(ratio < last);
            last = ratio;
        }
        assert!(conditioning_ratio(a, p, p) < 1e-3);
    }

    #[test]
    fn set_conversions_round_trip() {
        let one = Complex64::new(1.0, 0.5);
        let set = CoefficientSet::from_modes(
            0.5,
            Basis::Generalized,
            &[(mode(4, 2, 0.5), one), (mode(1, -1, 0.5), one * 2.0)],
        )
        .unwrap();
        let ep = generalized_set_to_edge_power(&set).unwrap();
        assert_eq!(ep.basis(), Basis::EdgePower);
        let back = edge_power_set_to_generalized(&ep).unwrap();
        for md in set.modes() {
            assert!((back.get(md.n, md.m) - set.get(md.n, md.m)).norm() < 1e-12);
        }
        for e in back.entries() {
            if set.get(e.n, e.m).norm() == 0.0 {
                assert!(e.value.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn ring_integral_endpoints() {
        assert!((ring_integral(0, HalfSign::Minus, 0.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((ring_integral(0, HalfSign::Plus, 0.0, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(ring_integral(1, HalfSign::Plus, 0.5, 0.2).is_err());
        assert!(ring_integral(1, HalfSign::Plus, 0.5, 1.2).is_err());
    }

    #[test]
    fn ring_integral_matches_quadrature() {
        let want = integrate(
            |r| radial(mode(4, 0, 0.5), r).unwrap() * r,
            0.3,
            0.8,
            1e-14,
            1e-14,
            200,
        )
        .unwrap()
        .value;
        let got = ring_integral(2, HalfSign::Plus, 0.3, 0.8).unwrap();
        assert!((got - want).abs() < 1e-10);
    }

    #[test]
    fn ring_antiderivatives_differentiate_back() {
        let h = 1e-5;
        for l in 0..6u32 {
            for sign in [HalfSign::Minus, HalfSign::Plus] {
                for i in 1..20 {
                    let r = i as f64 / 20.0;
                    let fd = (ring_antiderivative(l, sign, r + h) - ring_antiderivative(l, sign, r - h))
                        / (2.0 * h);
                    let want = radial(mode(2 * l, 0, sign.value()), r).unwrap() * r;
                    assert!((fd - want).abs() < 1e-6, "l={l} {sign:?} rho={r}: {fd} vs {want}");
                }
            }
        }
    }
}
