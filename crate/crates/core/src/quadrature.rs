//! Quadrature rules and series acceleration used by the oracles and by the
//! numerically defined quantities (V-functions, projections).

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::{jacobi_unchecked, ln_gamma_sign};

/// A quadrature rule: nodes and weights.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Sum of w_i f(x_i).
    pub fn apply<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Maps the rule from [-1, 1] to [a, b] (weights scaled by the Jacobian).
    pub fn mapped(&self, a: f64, b: f64) -> Rule {
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        Rule {
            nodes: self.nodes.iter().map(|x| c + h * x).collect(),
            weights: self.weights.iter().map(|w| w * h).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let (p, pm1) = if n == 1 { (x, 1.0) } else { (p1, p0) };
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            dp = 1.0;
            x = 0.0;
        }
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| nodes[a].total_cmp(&nodes[b]));
    Rule {
        nodes: idx.iter().map(|&i| nodes[i]).collect(),
        weights: idx.iter().map(|&i| weights[i]).collect(),
    }
}

/// n-point Gauss-Jacobi rule on [-1, 1] for the weight (1-x)^a (1+x)^b.
///
/// Nodes come from the Golub-Welsch eigenproblem and are refined by Newton
/// steps on P_n^{(a,b)}; weights use the closed-form Christoffel numbers.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Result<Rule> {
    if a <= -1.0 || b <= -1.0 {
        return Err(Error::InvalidParameter(format!(
            "Gauss-Jacobi exponents a = {a}, b = {b} must exceed -1"
        )));
    }
    if n == 0 {
        return Ok(Rule {
            nodes: vec![],
            weights: vec![],
        });
    }
    let ab = a + b;
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        let diag = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        };
        jm[(k, k)] = diag;
        if k + 1 < n {
            let k1 = kf + 1.0;
            let s1 = 2.0 * k1 + ab;
            // The general formula is 0/0 at k1 = 1 when a + b = -1.
            let off = if k == 0 {
                (4.0 * (1.0 + a) * (1.0 + b) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0))).sqrt()
            } else {
                (4.0 * k1 * (k1 + a) * (k1 + b) * (k1 + ab) / (s1 * s1 * (s1 + 1.0) * (s1 - 1.0)))
                    .sqrt()
            };
            jm[(k, k + 1)] = off;
            jm[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::new(jm);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(|x, y| x.total_cmp(y));

    let nf = n as f64;
    let dcoef = 0.5 * (nf + ab + 1.0);
    for x in nodes.iter_mut() {
        for _ in 0..4 {
            let p = jacobi_unchecked(n, a, b, *x);
            let dp = dcoef * jacobi_unchecked(n - 1, a + 1.0, b + 1.0, *x);
            let dx = p / dp;
            if !dx.is_finite() {
                break;
            }
            let xn = *x - dx;
            if xn <= -1.0 || xn >= 1.0 {
                break;
            }
            *x = xn;
            if dx.abs() < 1e-16 {
                break;
            }
        }
    }

    // w_i = 2^{a+b+1} Gamma(n+a+1) Gamma(n+b+1) / (Gamma(n+a+b+1) n!) / ((1-x^2) P_n'(x)^2)
    let lg = |x: f64| ln_gamma_sign(x).map(|v| v.0);
    let lc = (ab + 1.0) * std::f64::consts::LN_2 + lg(nf + a + 1.0)? + lg(nf + b + 1.0)?
        - lg(nf + ab + 1.0)?
        - lg(nf + 1.0)?;
    let c = lc.exp();
    let weights = nodes
        .iter()
        .map(|&x| {
            let dp = dcoef * jacobi_unchecked(n - 1, a + 1.0, b + 1.0, x);
            c / ((1.0 - x * x) * dp * dp)
        })
        .collect();
    Ok(Rule { nodes, weights })
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral<T> {
    pub value: T,
    pub error: f64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// Adaptive Gauss-Kronrod (7/15) integration of a complex-valued function.
///
/// Stops when the summed error estimate is below max(abs_tol, rel_tol |I|).
pub fn integrate_complex<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Integral<Complex64>> {
    if a == b {
        return Ok(Integral {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
        });
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: Complex64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.norm()) {
            return Ok(Integral {
                value: total,
                error: err,
            });
        }
        if parts.len() >= max_intervals {
            return Err(Error::Tolerance {
                what: "adaptive quadrature",
                requested: abs_tol.max(rel_tol * total.norm()),
                achieved: err,
            });
        }
        let (i, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, _, _) = parts.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            let total: Complex64 = parts.iter().map(|p| p.2).sum();
            return Err(Error::Quadrature(format!(
                "interval [{lo}, {hi}] cannot be subdivided further (partial value {total})"
            )));
        }
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Adaptive Gauss-Kronrod (7/15) integration of a real function.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Integral<f64>> {
    let r = integrate_complex(
        |x| Complex64::new(f(x), 0.0),
        a,
        b,
        abs_tol,
        rel_tol,
        max_intervals,
    )?;
    Ok(Integral {
        value: r.value.re,
        error: r.error,
    })
}

/// Wynn epsilon extrapolation of a sequence of partial sums.
///
/// Returns the accelerated limit and the difference between the last two
/// diagonal estimates as an error indicator.
pub fn wynn_epsilon(sums: &[Complex64]) -> (Complex64, f64) {
    let n = sums.len();
    if n == 0 {
        return (Complex64::new(0.0, 0.0), f64::INFINITY);
    }
    if n < 3 {
        let last = sums[n - 1];
        let err = if n == 2 { (sums[1] - sums[0]).norm() } else { f64::INFINITY };
        return (last, err);
    }
    // e[k] holds column k of the epsilon table, built column by column.
    let mut prev: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut cur: Vec<Complex64> = sums.to_vec();
    let mut estimates: Vec<Complex64> = vec![sums[n - 1]];
    let mut col = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            let base = prev[i + 1];
            if d.norm() == 0.0 {
                // Converged exactly: the sequence is already constant here.
                next.push(Complex64::new(f64::INFINITY, 0.0));
            } else {
                next.push(base + d.inv());
            }
        }
        prev = cur;
        cur = next;
        col += 1;
        if col % 2 == 0 {
            let v = *cur.last().expect("nonempty");
            if v.re.is_finite() && v.im.is_finite() {
                estimates.push(v);
            } else {
                break;
            }
        }
    }
    let k = estimates.len();
    let best = estimates[k - 1];
    let err = if k >= 2 {
        (estimates[k - 1] - estimates[k - 2]).norm()
    } else {
        f64::INFINITY
    };
    (best, err)
}

/// Convenience: Rule for a sub-interval built from a Gauss-Legendre base.
pub fn legendre_on(n: usize, a: f64, b: f64) -> Rule {
    gauss_legendre(n).mapped(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma;

    #[test]
    fn legendre_integrates_polynomials() {
        for n in [1, 2, 5, 20, 64] {
            let r = gauss_legendre(n);
            for d in 0..(2 * n) {
                let got = r.apply(|x| x.powi(d as i32));
                let want = if d % 2 == 0 { 2.0 / (d as f64 + 1.0) } else { 0.0 };
                assert!((got - want).abs() < 1e-13, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn jacobi_moments() {
        for &(a, b) in &[(0.0, 0.0), (-0.5, 0.0), (-0.5, -0.5), (0.3, -0.3), (0.5, 1.5), (2.7, -0.3), (-0.9, 4.0)] {
            for n in [1usize, 3, 10, 40] {
                let r = gauss_jacobi(n, a, b).unwrap();
                // Integral of (1-x)^a (1+x)^b ((1+x)/2)^d
                // = 2^{a+b+1} B(a+1, b+d+1)
                for d in 0..(2 * n).min(30) {
                    let df = d as f64;
                    let got = r.apply(|x| ((1.0 + x) / 2.0).powi(d as i32));
                    let want = 2f64.powf(a + b + 1.0) * gamma(a + 1.0).unwrap()
                        * gamma(b + df + 1.0).unwrap()
                        / gamma(a + b + df + 2.0).unwrap();
                    assert!(
                        (got - want).abs() < 1e-12 * want.abs().max(1.0),
                        "a={a} b={b} n={n} d={d} got={got} want={want}"
                    );
                }
            }
        }
    }

    #[test]
    fn jacobi_rejects_bad_exponent() {
        assert!(gauss_jacobi(4, -1.0, 0.0).is_err());
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let r = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10, 1e-12, 2000).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
        let c = integrate_complex(
            |x| Complex64::new(0.0, x).exp(),
            0.0,
            10.0,
            1e-13,
            1e-13,
            500,
        )
        .unwrap();
        let want = (Complex64::new(0.0, 10.0).exp() - 1.0) / Complex64::new(0.0, 1.0);
        assert!((c.value - want).norm() < 1e-12);
    }

    #[test]
    fn adaptive_reports_failure() {
        let r = integrate(|x| (1.0 / x).sin() / x, 1e-12, 1.0, 1e-14, 1e-14, 20);
        assert!(r.is_err());
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // ln 2 = 1 - 1/2 + 1/3 - ...
        let mut s = Complex64::new(0.0, 0.0);
        let mut sums = Vec::new();
        for k in 1..=20 {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            s += sign / k as f64;
            sums.push(s);
        }
        let (v, err) = wynn_epsilon(&sums);
        assert!((v.re - std::f64::consts::LN_2).abs() < 1e-12, "{v}");
        assert!(err < 1e-9);
    }
}
