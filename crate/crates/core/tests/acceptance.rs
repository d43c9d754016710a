//! Acceptance checks run as a standalone binary; one line per criterion.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use genzernike::anz::{
    king_oracle, king_series, onaxis_pressure, onaxis_rayleigh, AcousticSetup, KingOracleSpec, KingSpec,
};
use genzernike::enz::{u_field, u_field_oracle, FocusPoint};
use genzernike::expand::{
    connection_coeffs, edge_power_to_zernike, ring_antiderivative, ring_integral, scaling_coeffs,
    to_classical, zernike_to_edge_power, HalfSign,
};
use genzernike::inverse::{
    fit_disk, fit_nearfield, fit_radon, weyl_propagate, FitOptions, FitReport, NearFieldPlane, WeylGrid,
};
use genzernike::quadrature::gauss_jacobi;
use genzernike::specfun::{chebyshev_u, jacobi_p};
use genzernike::transforms::{
    decay_slope, fourier, fourier_oracle, radon, radon_oracle, FourierPoint, OracleSpec, RadonLine,
};
use genzernike::zernike::{
    eval, eval_sum, inner_products, norm_squared, radial, radial_dct, Basis, CoefficientSet, ModeIndex,
    PolarPoint, ProjectionSpec,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;

const ALPHAS: [f64; 5] = [-0.5, 0.0, 0.5, 1.0, 2.3];

fn mode(n: u32, m: i32, a: f64) -> ModeIndex {
    ModeIndex::new(n, m, a).unwrap()
}

fn random_mode(rng: &mut ChaCha8Rng, n_max: u32, alphas: &[f64]) -> ModeIndex {
    let n = rng.gen_range(0..=n_max);
    let k = rng.gen_range(0..=n) as i32;
    let m = n as i32 - 2 * k;
    mode(n, m, alphas[rng.gen_range(0..alphas.len())])
}

fn classical(n: u32, m: u32, rho: f64) -> f64 {
    radial(mode(n, m as i32, 0.0), rho).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fourier_closed_form() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let cases: Vec<(ModeIndex, FourierPoint)> = (0..50)
        .map(|_| {
            let md = random_mode(&mut rng, 12, &ALPHAS);
            (md, FourierPoint::new(rng.gen_range(0.0..3.0), rng.gen_range(0.0..2.0 * PI)))
        })
        .collect();
    let errs: Vec<(f64, f64)> = cases
        .par_iter()
        .map(|&(md, pt)| {
            let o = fourier_oracle(md, pt, &OracleSpec::default()).unwrap();
            ((fourier(md, pt).unwrap() - o.value).norm(), o.error)
        })
        .collect();
    let worst = errs.iter().map(|e| e.0).fold(0.0, f64::max);
    let oracle = errs.iter().map(|e| e.1).fold(0.0, f64::max);
    check(
        worst < 1e-7 && oracle < 1e-9,
        format!("max deviation {worst:.2e}, oracle error {oracle:.2e} over 50 cases"),
    )
}

fn radon_closed_form() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst: f64 = 0.0;
    let mut worst_u: f64 = 0.0;
    for _ in 0..50 {
        let md = random_mode(&mut rng, 12, &ALPHAS);
        let line = RadonLine::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..2.0 * PI));
        let v = radon(md, line).unwrap();
        let o = radon_oracle(md, line, 40).unwrap();
        worst = worst.max((v - o.value).norm());
        let md0 = mode(md.n, md.m, 0.0);
        let t = line.tau;
        let u = 2.0 / (md.n as f64 + 1.0) * (1.0 - t * t).sqrt() * chebyshev_u(md.n as usize, t);
        let want = Complex64::from_polar(u, md.m as f64 * line.psi);
        worst_u = worst_u.max((radon(md0, line).unwrap() - want).norm());
    }
    check(
        worst < 1e-6 && worst_u < 1e-12,
        format!("max deviation {worst:.2e}; classical reduction {worst_u:.2e}"),
    )
}

fn orthogonality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let pairs: Vec<(ModeIndex, ModeIndex)> = (0..200)
        .map(|_| {
            let a = random_mode(&mut rng, 12, &ALPHAS);
            let b = if rng.gen_bool(0.3) {
                a
            } else {
                let r = random_mode(&mut rng, 12, &ALPHAS);
                mode(r.n, r.m, a.alpha)
            };
            (a, b)
        })
        .collect();
    let spec = ProjectionSpec::default();
    let worst = pairs
        .par_iter()
        .map(|&(a, b)| {
            let ip = inner_products(|pt| eval(a, pt).unwrap(), &[b], &spec).unwrap()[0];
            let want = if a == b { norm_squared(a) } else { 0.0 };
            (ip - want).norm()
        })
        .reduce(|| 0.0, f64::max);
    check(worst < 1e-8, format!("max deviation {worst:.2e} over 200 pairs"))
}

fn dct_evaluation() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for a in [-0.5, 0.5, 2.0] {
        for n in 0..=30u32 {
            for ma in (n % 2..=n).step_by(2) {
                if n + ma > 30 {
                    continue;
                }
                for sign in [1i32, -1] {
                    if ma == 0 && sign < 0 {
                        continue;
                    }
                    let md = mode(n, sign * ma as i32, a);
                    for i in 1..=9 {
                        let rho = i as f64 / 10.0;
                        let want = radial(md, rho).unwrap();
                        let got = radial_dct(md, rho, (n + ma) as usize + 1).unwrap();
                        worst = worst.max((got - want).abs() / want.abs().max(1.0));
                        count += 1;
                    }
                }
            }
        }
    }
    check(worst < 1e-10, format!("max deviation {worst:.2e} over {count} evaluations"))
}

fn scaling_sup_error(md: ModeIndex, eps: f64, coeffs: &[(u32, f64)]) -> f64 {
    (0..=200)
        .map(|i| i as f64 / 200.0)
        .map(|r| {
            let s: f64 = coeffs.iter().map(|&(np, c)| c * classical(np, md.abs_m(), r)).sum();
            (radial(md, eps * r).unwrap() - s).abs()
        })
        .fold(0.0, f64::max)
}

fn scaling() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut tail: f64 = 0.0;
    for a in [0u32, 1, 2, 3] {
        for (n, m) in [(0u32, 0i32), (2, 0), (3, 1), (5, -3), (6, 4), (8, 2)] {
            for eps in [0.25, 0.6, 0.9] {
                let md = mode(n, m, a as f64);
                let cut = n + 2 * a + 2;
                let c = scaling_coeffs(md, eps, cut + 10).unwrap();
                for &(np, v) in &c {
                    if np >= cut {
                        tail = tail.max(v.abs());
                    }
                }
                let kept: Vec<(u32, f64)> = c.into_iter().filter(|&(np, _)| np < cut).collect();
                worst = worst.max(scaling_sup_error(md, eps, &kept));
            }
        }
    }
    let mut decreasing = true;
    let mut trail = Vec::new();
    for (n, m, a) in [(2u32, 0i32, 0.5), (3, 1, -0.5), (4, 2, 2.3)] {
        let md = mode(n, m, a);
        let mut last = f64::INFINITY;
        for n_max in [n + 4, n + 8, n + 16, n + 32] {
            let e = scaling_sup_error(md, 0.8, &scaling_coeffs(md, 0.8, n_max).unwrap());
            decreasing &= e < last;
            last = e;
        }
        trail.push(format!("{last:.1e}"));
    }
    check(
        worst < 1e-8 && tail < 1e-14 && decreasing,
        format!(
            "integer alpha sup error {worst:.2e}, truncated terms {tail:.2e}; non-integer errors decreasing: {decreasing} (final {})",
            trail.join(", ")
        ),
    )
}

fn connection() -> Outcome {
    let mut worst: f64 = 0.0;
    for (n, m, a) in [(2u32, 0u32, 0.5), (5, 1, -0.5), (6, 4, 2.3), (4, 2, 1.0), (7, 3, 0.3), (0, 0, 1.7)] {
        let p = (n - m) / 2;
        let c = connection_coeffs(m, p, a, p + 8);
        let rule = gauss_jacobi(50, a, 0.0).unwrap();
        for (k, &ck) in c.iter().enumerate() {
            let nk = m + 2 * k as u32;
            let q = rule.apply(|x| {
                let r = ((1.0 + x) / 2.0).sqrt();
                r.powi(m as i32) * jacobi_p(p as usize, a, m as f64, x).unwrap() * classical(nk, m, r)
            }) * 2f64.powf(-a)
                / 4.0;
            worst = worst.max((ck - 2.0 * (nk as f64 + 1.0) * q).abs());
        }
    }
    let c = to_classical(mode(0, 0, 1.0), 4).unwrap();
    let exact = c.get(0, 0) == Complex64::new(0.5, 0.0)
        && c.get(2, 0) == Complex64::new(-0.5, 0.0)
        && (2..=4).all(|k| c.get(2 * k, 0) == Complex64::new(0.0, 0.0));
    check(
        worst < 1e-9 && exact,
        format!("max deviation {worst:.2e}; uniform-profile case exact: {exact}"),
    )
}

fn king_series_vs_quadrature() -> Outcome {
    let mut specs = Vec::new();
    for a in [-0.5, 0.0, 0.5, 1.0] {
        for j in 0..=3u32 {
            specs.push(("edge", KingSpec::edge_pressure(j, a)));
            specs.push(("force", KingSpec::reaction_force(j, a)));
            for j2 in j..=3 {
                specs.push((if j == j2 { "power" } else { "cross" }, KingSpec::radiated_power(j, j2, a)));
            }
        }
    }
    let cases: Vec<(&str, KingSpec, f64)> = specs
        .iter()
        .flat_map(|&(kind, s)| [0.5, 1.0, 2.0].map(|ka| (kind, s, ka)))
        .collect();
    let results: Vec<(f64, f64, bool)> = cases
        .par_iter()
        .map(|&(kind, spec, ka)| {
            let s = king_series(&spec, ka, 100).unwrap();
            let o = king_oracle(&spec, ka, &KingOracleSpec::default()).unwrap();
            let positive = kind != "power" || s.value.re > 0.0;
            ((s.value - o.value()).norm(), o.error, positive)
        })
        .collect();
    let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let oracle = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let positive = results.iter().all(|r| r.2);
    check(
        worst < 1e-6 && positive,
        format!(
            "max deviation {worst:.2e} (oracle error {oracle:.2e}) over {} cases; self power positive: {positive}",
            cases.len()
        ),
    )
}

fn onaxis() -> Outcome {
    let s = AcousticSetup::new(4.0, 1.0, 1.0, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for l in 0..=2 {
        for z in [0.0, 0.3, 1.0, 2.5, 7.0] {
            let p = onaxis_pressure(l, &s, z).unwrap();
            let q = onaxis_rayleigh(l, 0.0, &s, z, 1e-13).unwrap();
            worst = worst.max((p - q).norm());
        }
    }
    check(worst < 1e-6, format!("max deviation {worst:.2e} over 15 points"))
}

fn conversions_and_rings() -> Outcome {
    let mut worst: f64 = 0.0;
    for (m, a) in [(0u32, 0.5), (1, -0.5), (3, 2.0), (2, 1.3)] {
        for p in 0..6u32 {
            let e = zernike_to_edge_power(mode(m + 2 * p, m as i32, a)).unwrap();
            let scale = e.iter().map(|x| x.1.abs()).fold(1.0, f64::max);
            let mut acc = vec![0.0; p as usize + 1];
            for &(r, er) in &e {
                for (l, d) in edge_power_to_zernike(m, a, r) {
                    acc[l as usize] += er * d;
                }
            }
            for (l, v) in acc.iter().enumerate() {
                let want = if l as u32 == p { 1.0 } else { 0.0 };
                worst = worst.max((v - want).abs() / scale);
            }
        }
    }
    let mut deriv: f64 = 0.0;
    let h = 1e-5;
    for sign in [HalfSign::Minus, HalfSign::Plus] {
        for l in 0..6u32 {
            for rho in [0.1, 0.35, 0.6, 0.85] {
                let fd = (ring_antiderivative(l, sign, rho + h) - ring_antiderivative(l, sign, rho - h)) / (2.0 * h);
                let want = radial(mode(2 * l, 0, sign.value()), rho).unwrap() * rho;
                deriv = deriv.max((fd - want).abs());
            }
        }
    }
    let minus = ring_integral(0, HalfSign::Minus, 0.0, 1.0).unwrap();
    let plus = ring_integral(0, HalfSign::Plus, 0.0, 1.0).unwrap();
    let endpoints = minus == 1.0 && plus == 1.0 / 3.0;
    check(
        worst < 1e-12 && deriv < 1e-6 && endpoints,
        format!(
            "round trip {worst:.2e}; derivative {deriv:.2e}; full-disk integrals {minus} and {plus}"
        ),
    )
}

fn far_field_decay() -> Outcome {
    let mut cases = Vec::new();
    for a in [0.0, 0.5, 1.0] {
        for (n, m) in [(0u32, 0i32), (2, 0), (3, 1), (4, -2)] {
            cases.push(mode(n, m, a));
        }
    }
    let slopes: Vec<(ModeIndex, f64)> = cases
        .par_iter()
        .map(|&md| (md, decay_slope(md, 20.0, 200.0).unwrap()))
        .collect();
    let worst = slopes
        .iter()
        .map(|&(md, s)| (s + md.alpha + 1.5).abs())
        .fold(0.0, f64::max);
    check(worst < 0.05, format!("max slope deviation {worst:.3} over {} modes", slopes.len()))
}

fn three_mode_set(a: f64) -> CoefficientSet {
    CoefficientSet::from_modes(
        a,
        Basis::Generalized,
        &[
            (mode(0, 0, a), Complex64::new(1.0, 0.0)),
            (mode(2, 0, a), Complex64::new(-0.5, 0.2)),
            (mode(3, -1, a), Complex64::new(0.25, 0.4)),
        ],
    )
    .unwrap()
}

fn relative_error(report: &FitReport, truth: &CoefficientSet) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (m, e) in truth.modes().iter().zip(truth.entries()) {
        num += (report.coefficients.get(m.n, m.m) - e.value).norm_sqr();
        den += e.value.norm_sqr();
    }
    (num / den).sqrt()
}

/// Adds complex noise with ‖δ‖ = level · ‖data‖.
fn add_noise(data: &mut [Complex64], level: f64, rng: &mut ChaCha8Rng) {
    let norm = data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let noise: Vec<Complex64> = data
        .iter()
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let nn = noise.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    for (d, e) in data.iter_mut().zip(noise) {
        *d += e * (level * norm / nn);
    }
}

fn inverse_round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(111);
    let noise = 0.01;
    let opts = FitOptions::default();
    let mut lines = Vec::new();
    let mut ok = true;

    let set = three_mode_set(0.5);
    let modes = set.modes();
    let pts: Vec<PolarPoint> = (0..120)
        .map(|_| PolarPoint::new(rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI)))
        .collect();
    let clean: Vec<Complex64> = pts.iter().map(|&p| eval_sum(&set, p).unwrap()).collect();
    let mut noisy = clean.clone();
    add_noise(&mut noisy, noise, &mut rng);
    let zip = |v: &[Complex64]| pts.iter().copied().zip(v.iter().copied()).collect::<Vec<_>>();
    let a = fit_disk(&zip(&clean), &modes, &opts).unwrap();
    let b = fit_disk(&zip(&noisy), &modes, &opts).unwrap();
    let (e0, e1) = (relative_error(&a, &set), relative_error(&b, &set));
    ok &= e0 < 1e-6 && e1 <= 10.0 * b.condition_estimate * noise;
    lines.push(format!("disk {e0:.1e}/{e1:.1e} (cond {:.1})", b.condition_estimate));

    let set = three_mode_set(1.0);
    let modes = set.modes();
    let rl: Vec<RadonLine> = (0..300)
        .map(|_| RadonLine::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..2.0 * PI)))
        .collect();
    let clean: Vec<Complex64> = rl
        .iter()
        .map(|&l| modes.iter().zip(set.entries()).map(|(m, e)| e.value * radon(*m, l).unwrap()).sum())
        .collect();
    let mut noisy = clean.clone();
    add_noise(&mut noisy, noise, &mut rng);
    let zip = |v: &[Complex64]| rl.iter().copied().zip(v.iter().copied()).collect::<Vec<_>>();
    let a = fit_radon(&zip(&clean), &modes, &opts).unwrap();
    let b = fit_radon(&zip(&noisy), &modes, &opts).unwrap();
    let (e0, e1) = (relative_error(&a, &set), relative_error(&b, &set));
    ok &= e0 < 1e-6 && e1 <= 10.0 * b.condition_estimate * noise;
    lines.push(format!("radon {e0:.1e}/{e1:.1e} (cond {:.1})", b.condition_estimate));

    let set = three_mode_set(0.5);
    let modes = set.modes();
    let g = WeylGrid::new(32, 4.0).unwrap();
    let (ka, zeta) = (5.0, 0.3);
    let field = weyl_propagate(&set, zeta, ka, &g).unwrap();
    let mut plane = NearFieldPlane { zeta, ka, grid: field.grid };
    let a = fit_nearfield(&plane, &modes, &opts).unwrap();
    add_noise(&mut plane.grid.values, noise, &mut rng);
    let b = fit_nearfield(&plane, &modes, &opts).unwrap();
    let (e0, e1) = (relative_error(&a, &set), relative_error(&b, &set));
    ok &= e0 < 1e-6 && e1 <= 10.0 * b.condition_estimate * noise;
    lines.push(format!("nearfield {e0:.1e}/{e1:.1e} (cond {:.1})", b.condition_estimate));

    check(ok, format!("clean/noisy relative errors: {}", lines.join("; ")))
}

fn enz_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(112);
    let mut worst0: f64 = 0.0;
    for _ in 0..20 {
        let md = random_mode(&mut rng, 8, &ALPHAS);
        let set = CoefficientSet::from_modes(md.alpha, Basis::Generalized, &[(md, Complex64::new(1.0, 0.0))]).unwrap();
        let (r, phi) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0 * PI));
        let u = u_field(&set, FocusPoint::new(r, phi, 0.0), 1e-12).unwrap();
        worst0 = worst0.max((u - fourier(md, FourierPoint::new(r, phi)).unwrap()).norm());
    }
    let mut worst1: f64 = 0.0;
    for (md, r, phi) in [
        (mode(2, 0, 1.0), 0.3, 0.0),
        (mode(3, 1, 0.5), 0.7, 1.1),
        (mode(4, -2, 0.0), 1.2, 2.0),
        (mode(1, 1, -0.5), 0.5, 0.4),
    ] {
        let set = CoefficientSet::from_modes(md.alpha, Basis::Generalized, &[(md, Complex64::new(1.0, 0.0))]).unwrap();
        let pt = FocusPoint::new(r, phi, 0.5);
        let o = u_field_oracle(&set, pt, &OracleSpec::default()).unwrap();
        worst1 = worst1.max((u_field(&set, pt, 1e-12).unwrap() - o.value).norm());
    }
    check(
        worst0 < 1e-8 && worst1 < 1e-6,
        format!("in focus {worst0:.2e}; defocused {worst1:.2e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Option<u64>); 12] = [
        ("fourier closed form vs disk quadrature", fourier_closed_form, Some(60)),
        ("radon closed form vs chord quadrature", radon_closed_form, None),
        ("weighted orthogonality", orthogonality, None),
        ("angular DCT evaluation vs recurrence", dct_evaluation, None),
        ("radial scaling expansion", scaling, None),
        ("connection to classical basis", connection, None),
        ("king series vs split quadrature", king_series_vs_quadrature, Some(120)),
        ("on-axis pressure vs rayleigh integral", onaxis, None),
        ("basis conversions and ring integrals", conversions_and_rings, None),
        ("far-field decay slope", far_field_decay, None),
        ("inverse round trips", inverse_round_trips, None),
        ("through-focus field consistency", enz_consistency, None),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(d), Some(s)) if took > Duration::from_secs(*s) => Err(format!("{d}; exceeded {s} s")),
            (o, _) => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{:02}] {tag} {name}: {detail} ({:.2} s)", i + 1, took.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
