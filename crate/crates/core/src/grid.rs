//! Complex fields sampled on rectangular or polar grids, with CSV and JSON I/O.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform axis with `count` points from `start` to `stop` inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn new(name: &str, start: f64, stop: f64, count: usize) -> Result<Self> {
        if count == 0 || !start.is_finite() || !stop.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "axis {name}: need finite bounds and count >= 1"
            )));
        }
        if count > 1 && start == stop {
            return Err(Error::InvalidParameter(format!(
                "axis {name}: zero-length axis with {count} points"
            )));
        }
        Ok(AxisSpec {
            name: name.to_string(),
            start,
            stop,
            count,
        })
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.count == 1 {
            return self.start;
        }
        self.start + (self.stop - self.start) * i as f64 / (self.count - 1) as f64
    }

    pub fn step(&self) -> f64 {
        if self.count <= 1 {
            0.0
        } else {
            (self.stop - self.start) / (self.count - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }

    /// Text form `name:start:stop:count`.
    pub fn to_token(&self) -> String {
        format!(
            "{}:{}:{}:{}",
            self.name,
            fmt_g17(self.start),
            fmt_g17(self.stop),
            self.count
        )
    }

    pub fn parse_token(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!("bad axis spec '{s}'")));
        }
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number '{t}' in axis spec '{s}'")))
        };
        let count = parts[3]
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad count in axis spec '{s}'")))?;
        AxisSpec::new(parts[0], num(parts[1])?, num(parts[2])?, count)
    }
}

/// Grid geometry: the two axes are (x, y) or (r, phi).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Rectangular,
    Polar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub kind: GridKind,
    pub axis_x: AxisSpec,
    pub axis_y: AxisSpec,
}

impl GridSpec {
    pub fn rectangular(x: (f64, f64, usize), y: (f64, f64, usize)) -> Result<Self> {
        Ok(GridSpec {
            kind: GridKind::Rectangular,
            axis_x: AxisSpec::new("x", x.0, x.1, x.2)?,
            axis_y: AxisSpec::new("y", y.0, y.1, y.2)?,
        })
    }

    pub fn polar(r: (f64, f64, usize), phi: (f64, f64, usize)) -> Result<Self> {
        if r.0 < 0.0 || r.1 < 0.0 {
            return Err(Error::InvalidParameter("polar grid radius must be >= 0".into()));
        }
        Ok(GridSpec {
            kind: GridKind::Polar,
            axis_x: AxisSpec::new("r", r.0, r.1, r.2)?,
            axis_y: AxisSpec::new("phi", phi.0, phi.1, phi.2)?,
        })
    }

    pub fn len(&self) -> usize {
        self.axis_x.count * self.axis_y.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid coordinates of sample k (row-major, y outer).
    pub fn coords(&self, k: usize) -> (f64, f64) {
        let nx = self.axis_x.count;
        (self.axis_x.value(k % nx), self.axis_y.value(k / nx))
    }

    /// Polar coordinates (r, φ) of sample k.
    pub fn polar_coords(&self, k: usize) -> (f64, f64) {
        let (a, b) = self.coords(k);
        match self.kind {
            GridKind::Polar => (a, b),
            GridKind::Rectangular => (a.hypot(b), b.atan2(a)),
        }
    }
}

/// Complex samples on a grid plus free-form metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub spec: GridSpec,
    pub metadata: BTreeMap<String, String>,
    /// Row-major, y (second axis) outer.
    pub values: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct SampleJson {
    x: f64,
    y: f64,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct FieldGridJson {
    kind: GridKind,
    axis_x: AxisSpec,
    axis_y: AxisSpec,
    metadata: BTreeMap<String, String>,
    samples: Vec<SampleJson>,
}

impl FieldGrid {
    /// Evaluates `f(x, y)` (grid coordinates) on every sample, in parallel.
    pub fn try_from_fn<F>(spec: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Result<Complex64> + Sync,
    {
        let values = (0..spec.len())
            .into_par_iter()
            .map(|k| {
                let (x, y) = spec.coords(k);
                f(x, y)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FieldGrid {
            spec,
            metadata: BTreeMap::new(),
            values,
        })
    }

    /// Evaluates `f(r, φ)` at the polar coordinates of every sample.
    pub fn try_from_polar_fn<F>(spec: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Result<Complex64> + Sync,
    {
        let values = (0..spec.len())
            .into_par_iter()
            .map(|k| {
                let (r, phi) = spec.polar_coords(k);
                f(r, phi)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FieldGrid {
            spec,
            metadata: BTreeMap::new(),
            values,
        })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        let n = spec.len();
        FieldGrid {
            spec,
            metadata: BTreeMap::new(),
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str("# axis_x=");
        s.push_str(&self.spec.axis_x.to_token());
        s.push_str(" axis_y=");
        s.push_str(&self.spec.axis_y.to_token());
        if self.spec.kind == GridKind::Polar {
            s.push_str(" grid=polar");
        }
        for (k, v) in &self.metadata {
            let _ = write!(s, " {}={}", k, v.replace(char::is_whitespace, "_"));
        }
        s.push('\n');
        for (k, v) in self.values.iter().enumerate() {
            let (x, y) = self.spec.coords(k);
            let _ = writeln!(
                s,
                "{},{},{},{}",
                fmt_g17(x),
                fmt_g17(y),
                fmt_g17(v.re),
                fmt_g17(v.im)
            );
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty field file".into()))?;
        let header = header
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse("field file must start with a '#' header".into()))?;
        let mut axis_x = None;
        let mut axis_y = None;
        let mut kind = GridKind::Rectangular;
        let mut metadata = BTreeMap::new();
        for tok in header.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header token '{tok}'")))?;
            match k {
                "axis_x" => axis_x = Some(AxisSpec::parse_token(v)?),
                "axis_y" => axis_y = Some(AxisSpec::parse_token(v)?),
                "grid" if v == "polar" => kind = GridKind::Polar,
                _ => {
                    metadata.insert(k.to_string(), v.to_string());
                }
            }
        }
        let spec = GridSpec {
            kind,
            axis_x: axis_x.ok_or_else(|| Error::Parse("header lacks axis_x".into()))?,
            axis_y: axis_y.ok_or_else(|| Error::Parse("header lacks axis_y".into()))?,
        };
        let mut samples = Vec::with_capacity(spec.len());
        for line in lines {
            let nums: Vec<f64> = line
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad number '{t}'")))
                })
                .collect::<Result<_>>()?;
            if nums.len() != 4 {
                return Err(Error::Parse(format!("expected x,y,re,im in row '{line}'")));
            }
            samples.push((nums[0], nums[1], Complex64::new(nums[2], nums[3])));
        }
        Self::assemble(spec, metadata, samples)
    }

    fn assemble(
        spec: GridSpec,
        metadata: BTreeMap<String, String>,
        samples: Vec<(f64, f64, Complex64)>,
    ) -> Result<Self> {
        if samples.len() != spec.len() {
            return Err(Error::Parse(format!(
                "grid declares {} samples, file holds {}",
                spec.len(),
                samples.len()
            )));
        }
        let tol_x = 1e-9 * spec.axis_x.step().abs().max(1e-300) + 1e-12;
        let tol_y = 1e-9 * spec.axis_y.step().abs().max(1e-300) + 1e-12;
        for (k, (x, y, _)) in samples.iter().enumerate() {
            let (gx, gy) = spec.coords(k);
            if (x - gx).abs() > tol_x.max(1e-9 * gx.abs()) || (y - gy).abs() > tol_y.max(1e-9 * gy.abs()) {
                return Err(Error::Parse(format!(
                    "sample {k} at ({x}, {y}) does not match grid point ({gx}, {gy})"
                )));
            }
        }
        Ok(FieldGrid {
            spec,
            metadata,
            values: samples.into_iter().map(|s| s.2).collect(),
        })
    }

    pub fn to_json(&self) -> String {
        let j = FieldGridJson {
            kind: self.spec.kind,
            axis_x: self.spec.axis_x.clone(),
            axis_y: self.spec.axis_y.clone(),
            metadata: self.metadata.clone(),
            samples: self
                .values
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    let (x, y) = self.spec.coords(k);
                    SampleJson { x, y, re: v.re, im: v.im }
                })
                .collect(),
        };
        serde_json::to_string_pretty(&j).expect("field grid serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: FieldGridJson = serde_json::from_str(text)?;
        let spec = GridSpec {
            kind: j.kind,
            axis_x: AxisSpec::new(&j.axis_x.name, j.axis_x.start, j.axis_x.stop, j.axis_x.count)?,
            axis_y: AxisSpec::new(&j.axis_y.name, j.axis_y.start, j.axis_y.stop, j.axis_y.count)?,
        };
        let samples = j
            .samples
            .into_iter()
            .map(|s| (s.x, s.y, Complex64::new(s.re, s.im)))
            .collect();
        Self::assemble(spec, j.metadata, samples)
    }
}

/// Formats like C's `%.17g`.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let prec = (16 - exp) as usize;
        trim_zeros(&format!("{:.*}", prec, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
