//! Quick oracle comparisons, grouped by library module.

use genzernike::anz::{king_oracle, king_series, onaxis_pressure, onaxis_rayleigh, AcousticSetup, KingOracleSpec, KingSpec};
use genzernike::enz::{u_field, u_field_oracle, FocusPoint};
use genzernike::expand::{connection_coeffs, edge_power_to_zernike, zernike_to_edge_power};
use genzernike::inverse::{fit_disk, fit_nearfield, weyl_propagate, FitOptions, NearFieldPlane, WeylGrid};
use genzernike::transforms::{fourier, fourier_oracle, radon, radon_oracle, FourierPoint, OracleSpec, RadonLine};
use genzernike::zernike::{
    eval, eval_sum, inner_products, norm_squared, radial, radial_dct, Basis, CoefficientSet, ModeIndex,
    PolarPoint, ProjectionSpec,
};
use num_complex::Complex64;

use crate::args::Command;

pub struct Check {
    pub name: &'static str,
    pub deviation: f64,
    pub limit: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.deviation <= self.limit
    }
}

fn mode(n: u32, m: i32, a: f64) -> ModeIndex {
    ModeIndex::new(n, m, a).expect("fixed test mode is valid")
}

fn unit(md: ModeIndex) -> CoefficientSet {
    CoefficientSet::from_modes(md.alpha, Basis::Generalized, &[(md, Complex64::new(1.0, 0.0))])
        .expect("single-mode set is valid")
}

const MODES: [(u32, i32, f64); 4] = [(0, 0, 0.0), (3, 1, 0.5), (4, -2, -0.5), (6, 2, 2.3)];

type Run = genzernike::Result<f64>;

fn orthogonality() -> Run {
    let spec = ProjectionSpec::default();
    let mut worst: f64 = 0.0;
    for &(n, m, a) in &MODES {
        let md = mode(n, m, a);
        let others = [md, mode(n + 2, m, a), mode(n + 1, m + 1, a)];
        let ips = inner_products(|pt| eval(md, pt).unwrap_or_default(), &others, &spec)?;
        worst = worst.max((ips[0] - norm_squared(md)).norm());
        worst = worst.max(ips[1].norm()).max(ips[2].norm());
    }
    Ok(worst)
}

fn dct() -> Run {
    let mut worst: f64 = 0.0;
    for &(n, m, a) in &MODES {
        let md = mode(n, m, a);
        for rho in [0.1, 0.5, 0.9] {
            let d = radial_dct(md, rho, (n + md.abs_m()) as usize + 1)?;
            worst = worst.max((d - radial(md, rho)?).abs());
        }
    }
    Ok(worst)
}

fn fourier_check() -> Run {
    let mut worst: f64 = 0.0;
    for &(n, m, a) in &MODES {
        let md = mode(n, m, a);
        let pt = FourierPoint::new(0.3 + n as f64 * 0.2, 0.7);
        let o = fourier_oracle(md, pt, &OracleSpec::default())?;
        worst = worst.max((fourier(md, pt)? - o.value).norm());
    }
    Ok(worst)
}

fn radon_check() -> Run {
    let mut worst: f64 = 0.0;
    for &(n, m, a) in &MODES {
        let md = mode(n, m, a);
        let line = RadonLine::new(0.1 + 0.15 * n as f64, 1.3);
        worst = worst.max((radon(md, line)? - radon_oracle(md, line, 40)?.value).norm());
    }
    Ok(worst)
}

fn enz_check() -> Run {
    let mut worst: f64 = 0.0;
    for &(n, m, a) in &MODES {
        let set = unit(mode(n, m, a));
        let pt = FocusPoint::new(0.4, 0.2, 0.5);
        let o = u_field_oracle(&set, pt, &OracleSpec::default())?;
        worst = worst.max((u_field(&set, pt, 1e-12)? - o.value).norm());
        let p0 = FocusPoint::new(0.7, 1.0, 0.0);
        worst = worst.max((u_field(&set, p0, 1e-12)? - fourier(mode(n, m, a), FourierPoint::new(0.7, 1.0))?).norm());
    }
    Ok(worst)
}

fn king_check() -> Run {
    let mut worst: f64 = 0.0;
    for (spec, ka) in [
        (KingSpec::edge_pressure(1, 0.5), 1.0),
        (KingSpec::reaction_force(2, 0.0), 2.0),
        (KingSpec::radiated_power(0, 1, -0.5), 1.5),
    ] {
        let s = king_series(&spec, ka, 100)?;
        let o = king_oracle(&spec, ka, &KingOracleSpec::default())?;
        worst = worst.max((s.value - o.value()).norm());
    }
    Ok(worst)
}

fn onaxis_check() -> Run {
    let s = AcousticSetup::new(4.0, 1.0, 1.0, 1.0)?;
    let mut worst: f64 = 0.0;
    for l in 0..=2 {
        for z in [0.0, 0.5, 3.0] {
            worst = worst.max((onaxis_pressure(l, &s, z)? - onaxis_rayleigh(l, 0.0, &s, z, 1e-13)?).norm());
        }
    }
    Ok(worst)
}

fn conversion_check() -> Run {
    let mut worst: f64 = 0.0;
    for (m, a) in [(0u32, 0.5), (2, 1.0), (1, -0.5)] {
        for p in 0..4u32 {
            let e = zernike_to_edge_power(mode(m + 2 * p, m as i32, a))?;
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
    let c = connection_coeffs(0, 0, 1.0, 3);
    worst = worst.max((c[0] - 0.5).abs()).max((c[1] + 0.5).abs());
    Ok(worst)
}

fn three_mode_set(a: f64) -> genzernike::Result<CoefficientSet> {
    CoefficientSet::from_modes(
        a,
        Basis::Generalized,
        &[
            (mode(0, 0, a), Complex64::new(1.0, 0.0)),
            (mode(2, 0, a), Complex64::new(-0.5, 0.2)),
            (mode(1, -1, a), Complex64::new(0.25, 0.4)),
        ],
    )
}

fn coefficient_error(found: &CoefficientSet, truth: &CoefficientSet) -> f64 {
    truth
        .entries()
        .iter()
        .map(|e| (found.get(e.n, e.m) - e.value).norm())
        .fold(0.0, f64::max)
}

fn fit_disk_check() -> Run {
    let set = three_mode_set(0.5)?;
    let samples = (0..60)
        .map(|i| {
            let pt = PolarPoint::new(((i as f64 + 0.5) / 60.0).sqrt(), 2.4 * i as f64);
            Ok((pt, eval_sum(&set, pt)?))
        })
        .collect::<genzernike::Result<Vec<_>>>()?;
    let r = fit_disk(&samples, &set.modes(), &FitOptions::default())?;
    Ok(coefficient_error(&r.coefficients, &set))
}

fn fit_nearfield_check() -> Run {
    let set = three_mode_set(0.0)?;
    let g = WeylGrid::new(16, 4.0)?;
    let field = weyl_propagate(&set, 0.5, 3.0, &g)?;
    let plane = NearFieldPlane {
        zeta: 0.5,
        ka: 3.0,
        grid: field.grid,
    };
    let r = fit_nearfield(&plane, &set.modes(), &FitOptions::default())?;
    Ok(coefficient_error(&r.coefficients, &set))
}

type Entry = (&'static str, fn() -> Run, f64);

fn checks_for(module: &str) -> Vec<Entry> {
    match module {
        "zernike" => vec![("orthogonality", orthogonality, 1e-8), ("dct evaluation", dct, 1e-10)],
        "transforms" => vec![("fourier oracle", fourier_check, 1e-7), ("radon oracle", radon_check, 1e-6)],
        "enz" => vec![("through-focus oracle", enz_check, 1e-6)],
        "anz" => vec![("king oracle", king_check, 1e-6), ("on-axis rayleigh", onaxis_check, 1e-6)],
        "inverse" => vec![("disk fit round trip", fit_disk_check, 1e-6), ("near-field round trip", fit_nearfield_check, 1e-6)],
        "expand" => vec![("basis conversions", conversion_check, 1e-12)],
        _ => Vec::new(),
    }
}

fn module_of(c: &Command) -> &'static str {
    match c {
        Command::Eval(_) | Command::RadialTable(_) => "zernike",
        Command::FourierField(_) | Command::RadonSinogram(_) => "transforms",
        Command::PsfStack(_) => "enz",
        Command::Acoustics(_) => "anz",
        Command::FitDisk(_) | Command::FitRadon(_) | Command::FitNearfield(_) => "inverse",
        Command::ConvertBasis(_) => "expand",
    }
}

/// Runs the checks for the command's module (all modules when none given).
pub fn run(command: Option<&Command>) -> Vec<Check> {
    let modules: Vec<&str> = match command {
        Some(c) => vec![module_of(c)],
        None => vec!["zernike", "transforms", "expand", "enz", "anz", "inverse"],
    };
    modules
        .into_iter()
        .flat_map(checks_for)
        .map(|(name, f, limit)| Check {
            name,
            // A failed evaluation counts as an unbounded deviation.
            deviation: f().unwrap_or(f64::INFINITY),
            limit,
        })
        .collect()
}
