use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use genzernike::anz::{
    edge_pressure, onaxis_pressure, onaxis_pressure_generalized, radiated_power, reaction_force,
    AcousticReport, AcousticSetup, TAIL_WARNING,
};
use genzernike::enz::{psf_stack, DEFAULT_TOL};
use genzernike::expand::{edge_power_set_to_generalized, generalized_set_to_classical, generalized_set_to_edge_power};
use genzernike::grid::{fmt_g17, AxisSpec, FieldGrid, GridKind, GridSpec};
use genzernike::inverse::{fit_disk, fit_nearfield, fit_radon, FitOptions, FitReport, NearFieldPlane};
use genzernike::transforms::{fourier_field, radon, RadonLine};
use genzernike::zernike::{eval, modes_up_to, radial, radial_dct, Basis, CoefficientSet, ModeIndex, PolarPoint};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::args::{
    AcousticsArgs, CoeffArgs, Command, ConvertArgs, EvalArgs, FieldArgs, FitArgs, Format, GridArgs, ModeArgs,
    ModeSelection, NearfieldArgs, PsfArgs, RadialTableArgs, SinogramArgs,
};
use crate::config::Job;
use crate::error::CliError;

/// One output document; `suffix` distinguishes files of a multi-part result.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub suffix: Option<String>,
    pub body: String,
}

impl Artifact {
    fn single(body: String) -> Vec<Artifact> {
        vec![Artifact { suffix: None, body }]
    }
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("missing required parameter --{flag}")))
}

fn mode_from(a: &ModeArgs) -> Result<ModeIndex, CliError> {
    Ok(ModeIndex::new(need(a.n, "n")?, need(a.m, "m")?, a.alpha.unwrap_or(0.0))?)
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn load_coeffs(a: &CoeffArgs) -> Result<CoefficientSet, CliError> {
    match &a.coeffs {
        Some(path) => Ok(CoefficientSet::from_json(&read_text(path)?)?),
        None => {
            let m = mode_from(&a.mode)?;
            Ok(CoefficientSet::from_modes(m.alpha, Basis::Generalized, &[(m, Complex64::new(1.0, 0.0))])?)
        }
    }
}

fn grid_from(a: &GridArgs, extent: f64, size: usize) -> Result<GridSpec, CliError> {
    let e = a.extent.unwrap_or(extent);
    let n = a.size.unwrap_or(size);
    if !(e > 0.0) || n < 2 {
        return Err(CliError::Config("grid needs --extent > 0 and --size >= 2".into()));
    }
    match a.grid.as_deref().unwrap_or("rect") {
        "rect" => Ok(GridSpec::rectangular((-e, e, n), (-e, e, n))?),
        "polar" => Ok(GridSpec::polar((0.0, e, n), (0.0, 2.0 * PI * (n - 1) as f64 / n as f64, n))?),
        other => Err(CliError::Config(format!("unknown grid '{other}' (expected rect or polar)"))),
    }
}

fn complex_json(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("value serializes")
}

fn grid_body(g: &FieldGrid, format: Format) -> String {
    match format {
        Format::Csv => g.to_csv(),
        Format::Json => g.to_json(),
    }
}

fn run_eval(a: &EvalArgs, format: Format) -> Result<Vec<Artifact>, CliError> {
    let mode = mode_from(&a.mode)?;
    let rho = need(a.rho, "rho")?;
    let theta = a.theta.unwrap_or(0.0);
    let v = eval(mode, PolarPoint::new(rho, theta))?;
    let body = match format {
        Format::Csv if v.im == 0.0 => fmt_g17(v.re),
        Format::Csv => format!("{},{}", fmt_g17(v.re), fmt_g17(v.im)),
        Format::Json => pretty(&json!({
            "n": mode.n, "m": mode.m, "alpha": mode.alpha, "rho": rho, "theta": theta,
            "value": complex_json(v),
        })),
    };
    Ok(Artifact::single(body))
}

fn run_radial_table(a: &RadialTableArgs, format: Format) -> Result<Vec<Artifact>, CliError> {
    let mode = mode_from(&a.mode)?;
    let points = a.points.unwrap_or(101);
    if points < 2 {
        return Err(CliError::Config("--points must be at least 2".into()));
    }
    let method = a.method.as_deref().unwrap_or("recurrence");
    let dct = match method {
        "recurrence" => false,
        "dct" => true,
        other => return Err(CliError::Config(format!("unknown method '{other}' (expected recurrence or dct)"))),
    };
    // The rim is included only where the profile is finite there.
    let closed = !dct && mode.alpha >= 0.0;
    let rhos: Vec<f64> = (0..points)
        .map(|i| if closed { i as f64 / (points - 1) as f64 } else { i as f64 / points as f64 })
        .collect();
    let values = rhos
        .iter()
        .map(|&r| {
            if dct {
                radial_dct(mode, r, (mode.n + mode.abs_m()) as usize + 1)
            } else {
                radial(mode, r)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let body = match format {
        Format::Csv => {
            let mut s = String::from("rho,value\n");
            for (r, v) in rhos.iter().zip(&values) {
                s.push_str(&format!("{},{}\n", fmt_g17(*r), fmt_g17(*v)));
            }
            s
        }
        Format::Json => pretty(&json!({
            "n": mode.n, "m": mode.m, "alpha": mode.alpha, "method": method,
            "rho": rhos, "value": values,
        })),
    };
    Ok(Artifact::single(body))
}

fn run_fourier_field(a: &FieldArgs, format: Format) -> Result<Vec<Artifact>, CliError> {
    let set = load_coeffs(&a.coeffs)?;
    let spec = grid_from(&a.grid, 2.0, 65)?;
    Ok(Artifact::single(grid_body(&fourier_field(&set, spec)?, format)))
}

fn run_radon_sinogram(a: &SinogramArgs, format: Format) -> Result<Vec<Artifact>, CliError> {
    let set = load_coeffs(&a.coeffs)?;
    let ntau = a.ntau.unwrap_or(65);
    let npsi = a.npsi.unwrap_or(72);
    if ntau < 2 || npsi < 1 {
        return Err(CliError::Config("sinogram needs --ntau >= 2 and --npsi >= 1".into()));
    }
    let spec = GridSpec {
        kind: GridKind::Polar,
        axis_x: AxisSpec::new("tau", 0.0, 1.0, ntau)?,
        axis_y: AxisSpec::new("psi", 0.0, 2.0 * PI * (npsi - 1) as f64 / npsi as f64, npsi)?,
    };
    let modes = set.modes();
    let grid = FieldGrid::try_from_fn(spec, |tau, psi| {
        let line = RadonLine::new(tau, psi);
        let mut s = Complex64::new(0.0, 0.0);
        for (m, e) in modes.iter().zip(set.entries()) {
            s += e.value * radon(*m, line)?;
        }
        Ok(s)
    })?
    .with_meta("quantity", "radon")
    .with_meta("alpha", fmt_g17(set.alpha()));
    Ok(Artifact::single(grid_body(&grid, format)))
}

fn run_psf_stack(a: &PsfArgs, format: Format, tol: Option<f64>) -> Result<Vec<Artifact>, CliError> {
    let set = load_coeffs(&a.coeffs)?;
    let spec = grid_from(&a.grid, 2.0, 33)?;
    let defocus = a.defocus.clone().unwrap_or_else(|| vec![0.0]);
    if defocus.is_empty() {
        return Err(CliError::Config("--defocus needs at least one value".into()));
    }
    let stack = psf_stack(&set, &spec, &defocus, tol.unwrap_or(DEFAULT_TOL))?;
    Ok(match format {
        Format::Csv => stack
            .iter()
            .enumerate()
            .map(|(i, g)| Artifact {
                suffix: (stack.len() > 1).then(|| format!("f{i}")),
                body: g.to_csv(),
            })
            .collect(),
        Format::Json => {
            let planes: Vec<Value> = stack
                .iter()
                .map(|g| serde_json::from_str(&g.to_json()).expect("grid json parses"))
                .collect();
            Artifact::single(pretty(&Value::Array(planes)))
        }
    })
}

fn setup_from(a: &AcousticsArgs) -> Result<AcousticSetup, CliError> {
    match (a.ka, a.k) {
        (Some(_), Some(_)) => Err(CliError::Config("give either --ka or --k, not both".into())),
        (Some(ka), None) => {
            if a.a.is_some() || a.rho0.is_some() || a.c.is_some() {
                return Err(CliError::Config("--ka implies unit radius, density and sound speed".into()));
            }
            Ok(AcousticSetup::normalized(ka)?)
        }
        (None, Some(k)) => Ok(AcousticSetup::new(k, a.a.unwrap_or(1.0), a.rho0.unwrap_or(1.0), a.c.unwrap_or(1.0))?),
        (None, None) => Err(CliError::Config("missing required parameter --ka (or --k)".into())),
    }
}

fn report_body(r: &AcousticReport, format: Format) -> String {
    match format {
        Format::Json => r.to_json(),
        Format::Csv => format!(
            "quantity,ka,re,im,tail_estimate,L\n{},{},{},{},{},{}\n",
            r.quantity.name(),
            fmt_g17(r.ka),
            fmt_g17(r.value.re),
            fmt_g17(r.value.im),
            fmt_g17(r.tail_estimate),
            r.terms
        ),
    }
}

fn run_acoustics(a: &AcousticsArgs, format: Format, tol: Option<f64>) -> Result<Vec<Artifact>, CliError> {
    let quantity = need(a.quantity.as_deref(), "quantity")?;
    let setup = setup_from(a)?;
    let alpha = a.alpha.unwrap_or(0.0);
    let terms = a.terms.unwrap_or(100);
    let report = match quantity {
        "edge" => edge_pressure(a.j.unwrap_or(0), alpha, &setup, terms)?,
        "force" => reaction_force(a.j.unwrap_or(0), alpha, &setup, terms)?,
        "power" => radiated_power(a.j1.unwrap_or(0), a.j2.unwrap_or(0), alpha, &setup, terms)?,
        "onaxis" => return run_onaxis(a, &setup, format),
        other => {
            return Err(CliError::Config(format!(
                "unknown quantity '{other}' (expected edge, force, power or onaxis)"
            )))
        }
    };
    let limit = tol.unwrap_or(TAIL_WARNING);
    if !(report.tail_estimate <= limit) {
        return Err(CliError::Numerical(format!(
            "{} at ka = {}: tail estimate {:e} exceeds {limit:e}; increase --terms",
            report.quantity.name(),
            report.ka,
            report.tail_estimate
        )));
    }
    Ok(Artifact::single(report_body(&report, format)))
}

fn run_onaxis(a: &AcousticsArgs, setup: &AcousticSetup, format: Format) -> Result<Vec<Artifact>, CliError> {
    let zs = need(a.z.clone(), "z")?;
    let j = a.j.unwrap_or(0);
    let alpha = a.alpha.unwrap_or(0.0);
    let extra = a.terms.unwrap_or(100) as u32;
    let values = zs
        .iter()
        .map(|&z| {
            if alpha == 0.0 {
                onaxis_pressure(j, setup, z)
            } else {
                onaxis_pressure_generalized(j, alpha, setup, z, extra)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let body = match format {
        Format::Csv => {
            let mut s = String::from("z,re,im\n");
            for (z, v) in zs.iter().zip(&values) {
                s.push_str(&format!("{},{},{}\n", fmt_g17(*z), fmt_g17(v.re), fmt_g17(v.im)));
            }
            s
        }
        Format::Json => pretty(&json!({
            "quantity": "onaxis_pressure",
            "ka": setup.ka(),
            "j": j,
            "alpha": alpha,
            "z": zs,
            "value": values.iter().map(|v| complex_json(*v)).collect::<Vec<_>>(),
        })),
    };
    Ok(Artifact::single(body))
}

fn select_modes(s: &ModeSelection) -> Result<Vec<ModeIndex>, CliError> {
    let alpha = s.alpha.unwrap_or(0.0);
    match (&s.modes, s.n_max) {
        (Some(_), Some(_)) => Err(CliError::Config("give either --modes or --n-max, not both".into())),
        (None, Some(n)) => Ok(modes_up_to(n, alpha)),
        (Some(list), None) => list
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| {
                let (n, m) = t
                    .trim()
                    .split_once(':')
                    .ok_or_else(|| CliError::Config(format!("mode '{t}' is not of the form n:m")))?;
                let n = n.trim().parse().map_err(|_| CliError::Config(format!("bad n in mode '{t}'")))?;
                let m = m.trim().parse().map_err(|_| CliError::Config(format!("bad m in mode '{t}'")))?;
                Ok(ModeIndex::new(n, m, alpha)?)
            })
            .collect(),
        (None, None) => Err(CliError::Config("missing required parameter --modes (or --n-max)".into())),
    }
}

fn fit_options(s: &ModeSelection) -> FitOptions {
    FitOptions {
        ridge: s.ridge.unwrap_or(0.0),
        ..Default::default()
    }
}

fn coeffs_csv(set: &CoefficientSet, header: &str) -> String {
    let mut s = String::from(header);
    s.push_str("n,m,re,im\n");
    for e in set.entries() {
        s.push_str(&format!("{},{},{},{}\n", e.n, e.m, fmt_g17(e.value.re), fmt_g17(e.value.im)));
    }
    s
}

fn basis_name(b: Basis) -> &'static str {
    match b {
        Basis::Generalized => "generalized",
        Basis::Classical => "classical",
        Basis::EdgePower => "edge-power",
    }
}

fn fit_body(r: &FitReport, format: Format) -> String {
    match format {
        Format::Json => r.to_json(),
        Format::Csv => coeffs_csv(
            &r.coefficients,
            &format!(
                "# alpha={} basis={} residual_norm={} condition_estimate={} iterations={}\n",
                fmt_g17(r.coefficients.alpha()),
                basis_name(r.coefficients.basis()),
                fmt_g17(r.residual_norm),
                fmt_g17(r.condition_estimate),
                r.iterations
            ),
        ),
    }
}

fn read_samples<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CliError> {
    let text = read_text(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    reader
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

#[derive(Deserialize)]
struct DiskSample {
    rho: f64,
    theta: f64,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Deserialize)]
struct LineSample {
    tau: f64,
    psi: f64,
    re: f64,
    #[serde(default)]
    im: f64,
}

fn run_fit_disk(a: &FitArgs, format: Format) -> Result<Vec<Artifact>, CliError> {
    let rows: Vec<DiskSample> = read_samples(&need(a.samples.clone(), "samples")?)?;
    let samples: Vec<_> = rows
        .iter()
        .map(|s| (PolarPoint::new(s.rho, s.theta), Complex64::new(s.re, s.im)))
        .collect();
    let r = fit_disk(&samples, &select_modes(&a.select)?, &fit_options(&a.select))?;
    Ok(Artifact::single(fit_body(&r, format)))
}

fn run_fit_radon(a: &FitArgs, format: Format) -> Result<Vec<Artifact>, CliError> {
    let rows: Vec<LineSample> = read_samples(&need(a.samples.clone(), "samples")?)?;
    let samples: Vec<_> = rows
        .iter()
        .map(|s| (RadonLine::new(s.tau, s.psi), Complex64::new(s.re, s.im)))
        .collect();
    let r = fit_radon(&samples, &select_modes(&a.select)?, &fit_options(&a.select))?;
    Ok(Artifact::single(fit_body(&r, format)))
}

fn meta_number(g: &FieldGrid, key: &str) -> Result<Option<f64>, CliError> {
    g.metadata
        .get(key)
        .map(|s| s.parse().map_err(|_| CliError::Config(format!("bad {key} '{s}' in plane metadata"))))
        .transpose()
}

fn run_fit_nearfield(a: &NearfieldArgs, format: Format) -> Result<Vec<Artifact>, CliError> {
    let path = need(a.plane.clone(), "plane")?;
    let text = read_text(&path)?;
    let grid = if path.extension().is_some_and(|e| e == "json") {
        FieldGrid::from_json(&text)?
    } else {
        FieldGrid::from_csv(&text)?
    };
    let zeta = need(a.zeta.or(meta_number(&grid, "zeta")?), "zeta")?;
    let ka = need(a.ka.or(meta_number(&grid, "ka")?), "ka")?;
    let plane = NearFieldPlane { zeta, ka, grid };
    let r = fit_nearfield(&plane, &select_modes(&a.select)?, &fit_options(&a.select))?;
    Ok(Artifact::single(fit_body(&r, format)))
}

fn relabel(set: &CoefficientSet, basis: Basis) -> Result<CoefficientSet, CliError> {
    Ok(CoefficientSet::new(set.alpha(), basis, set.entries().to_vec())?)
}

fn run_convert(a: &ConvertArgs, format: Format) -> Result<Vec<Artifact>, CliError> {
    let set = CoefficientSet::from_json(&read_text(&need(a.coeffs.clone(), "coeffs")?)?)?;
    let target = match need(a.to.as_deref(), "to")? {
        "generalized" => Basis::Generalized,
        "classical" => Basis::Classical,
        "edge-power" => Basis::EdgePower,
        other => {
            return Err(CliError::Config(format!(
                "unknown basis '{other}' (expected generalized, classical or edge-power)"
            )))
        }
    };
    let alpha = set.alpha();
    // Exact for nonnegative integer α; a truncation otherwise.
    let k_extra = a.k_extra.unwrap_or(if alpha >= 0.0 && alpha.fract() == 0.0 { alpha as u32 + 1 } else { 40 });
    let generalized = match set.basis() {
        Basis::Generalized => set.clone(),
        Basis::Classical => relabel(&set, Basis::Generalized)?,
        Basis::EdgePower => edge_power_set_to_generalized(&set)?,
    };
    let out = if set.basis() == target {
        set.clone()
    } else {
        match target {
            Basis::Generalized => generalized,
            Basis::Classical => generalized_set_to_classical(&generalized, k_extra)?,
            Basis::EdgePower => generalized_set_to_edge_power(&generalized)?,
        }
    };
    let body = match format {
        Format::Json => out.to_json(),
        Format::Csv => coeffs_csv(
            &out,
            &format!("# alpha={} basis={}\n", fmt_g17(out.alpha()), basis_name(out.basis())),
        ),
    };
    Ok(Artifact::single(body))
}

/// Runs the job's command and returns its output documents.
pub fn execute(job: &Job) -> Result<Vec<Artifact>, CliError> {
    let Some(command) = &job.command else {
        return Err(CliError::Config("no command to run".into()));
    };
    let f = job.format;
    match command {
        Command::Eval(a) => run_eval(a, f),
        Command::RadialTable(a) => run_radial_table(a, f),
        Command::FourierField(a) => run_fourier_field(a, f),
        Command::RadonSinogram(a) => run_radon_sinogram(a, f),
        Command::PsfStack(a) => run_psf_stack(a, f, job.tol),
        Command::Acoustics(a) => run_acoustics(a, f, job.tol),
        Command::FitDisk(a) => run_fit_disk(a, f),
        Command::FitRadon(a) => run_fit_radon(a, f),
        Command::FitNearfield(a) => run_fit_nearfield(a, f),
        Command::ConvertBasis(a) => run_convert(a, f),
    }
}
