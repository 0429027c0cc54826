//! Flat `section.key = value` configuration files.
//!
//! Blank lines and `#` comments are ignored. Unknown keys are an error so a
//! typo cannot silently fall back to a default.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use traversal_core::{Barrier, Profile, SampledProfile, Units};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axis {
    Width,
    HeightRatio,
    Frequency,
}

impl FromStr for Axis {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "width" | "d" => Ok(Axis::Width),
            "height_ratio" | "V0/E0" => Ok(Axis::HeightRatio),
            "frequency" | "omega" => Ok(Axis::Frequency),
            _ => bail!("unknown scan axis '{s}' (width, height_ratio, frequency)"),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Width => "width",
            Axis::HeightRatio => "height_ratio",
            Axis::Frequency => "frequency",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Vis,
    Wkb,
    Nelson,
    Asymmetry,
}

impl FromStr for Method {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vis" => Ok(Method::Vis),
            "wkb" => Ok(Method::Wkb),
            "nelson" => Ok(Method::Nelson),
            "asymmetry" => Ok(Method::Asymmetry),
            _ => bail!("unknown method '{s}' (vis, wkb, nelson, asymmetry)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Rectangular,
    Gaussian,
    Eckart,
    Sampled(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarrierConfig {
    pub shape: Shape,
    pub height: f64,
    pub width: f64,
    pub v1: f64,
    pub omega: f64,
}

impl BarrierConfig {
    /// Static profile; for `Sampled` the file is read here.
    pub fn profile(&self) -> Result<Profile> {
        Ok(match &self.shape {
            Shape::Rectangular => Profile::Rectangular { height: self.height, width: self.width },
            Shape::Gaussian => Profile::Gaussian { height: self.height, width: self.width },
            Shape::Eckart => Profile::Eckart { height: self.height, a: self.width },
            Shape::Sampled(path) => Profile::Sampled(
                SampledProfile::from_csv_path(path).with_context(|| format!("reading {}", path.display()))?,
            ),
        })
    }

    pub fn is_rectangular(&self) -> bool {
        self.shape == Shape::Rectangular
    }

    /// Barrier with the configured modulation.
    pub fn spec(&self) -> Result<Barrier> {
        let base = match &self.shape {
            Shape::Rectangular => Barrier::rectangular(self.height, self.width)?,
            _ => Barrier::smooth(self.profile()?),
        };
        Ok(base.with_modulation(self.v1, self.omega)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelsonConfig {
    /// Transmitted paths wanted per point.
    pub paths: usize,
    pub seed: u64,
    pub sde_dt: f64,
    pub dt: f64,
    pub n_x: usize,
    pub stride: usize,
    /// Packet width; `None` means `10/k0`.
    pub sigma: Option<f64>,
    /// Wall-clock budget for all Nelson work in a scan, in seconds.
    pub budget_secs: Option<f64>,
}

impl Default for NelsonConfig {
    fn default() -> Self {
        Self {
            paths: 5000,
            seed: 1,
            sde_dt: 0.01,
            dt: 0.05,
            n_x: 4096,
            stride: 2,
            sigma: None,
            budget_secs: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub axis: Axis,
    pub lo: f64,
    pub hi: f64,
    pub n_points: usize,
    pub methods: Vec<Method>,
}

impl ScanConfig {
    pub fn values(&self) -> Vec<f64> {
        let step = (self.hi - self.lo) / (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| if i + 1 == self.n_points { self.hi } else { self.lo + step * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TbarConfig {
    pub omega_lo: f64,
    pub omega_hi: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabConfig {
    pub units: Units,
    pub energy: f64,
    pub barrier: BarrierConfig,
    /// Sideband truncation; `None` picks it from the Bessel tail.
    pub n_eff: Option<usize>,
    pub scan: Option<ScanConfig>,
    pub nelson: NelsonConfig,
    pub current_samples: usize,
    pub tbar: TbarConfig,
}

impl Default for LabConfig {
    fn default() -> Self {
        Self {
            units: Units::default(),
            energy: 0.5,
            barrier: BarrierConfig {
                shape: Shape::Rectangular,
                height: 1.0,
                width: 2.0,
                v1: 0.01,
                omega: 0.05,
            },
            n_eff: None,
            scan: None,
            nelson: NelsonConfig::default(),
            current_samples: 200,
            tbar: TbarConfig { omega_lo: 0.01, omega_hi: 0.45, n_points: 45 },
        }
    }
}

fn parse_value<T: FromStr>(key: &str, raw: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    raw.parse::<T>().map_err(|e| anyhow!("{key}: cannot parse '{raw}': {e}"))
}

impl LabConfig {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg = Self::parse(&text).with_context(|| format!("in {}", path.display()))?;
        // relative profile paths are taken from the config's directory
        if let Shape::Sampled(p) = &mut cfg.barrier.shape {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key = value", lineno + 1))?;
            let key = key.trim().to_string();
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                bail!("line {}: duplicate key '{key}'", lineno + 1);
            }
        }
        Self::from_entries(entries)
    }

    fn from_entries(mut e: BTreeMap<String, String>) -> Result<Self> {
        let mut cfg = Self::default();
        let mut take = |keys: &[&str]| -> Option<(String, String)> {
            keys.iter().find_map(|k| e.remove(*k).map(|v| (k.to_string(), v)))
        };
        macro_rules! set {
            ($field:expr, $($key:literal),+) => {
                if let Some((k, v)) = take(&[$($key),+]) {
                    $field = parse_value(&k, &v)?;
                }
            };
        }
        set!(cfg.units.mass, "units.mass");
        set!(cfg.units.hbar, "units.hbar");
        set!(cfg.energy, "incident.energy", "incident.E");
        if let Some((_, v)) = take(&["barrier.shape"]) {
            cfg.barrier.shape = match v.as_str() {
                "rectangular" => Shape::Rectangular,
                "gaussian" => Shape::Gaussian,
                "eckart" => Shape::Eckart,
                "sampled" => Shape::Sampled(PathBuf::new()),
                other => bail!("barrier.shape: unknown shape '{other}'"),
            };
        }
        if let Some((_, v)) = take(&["barrier.profile"]) {
            match &mut cfg.barrier.shape {
                Shape::Sampled(p) => *p = PathBuf::from(v),
                _ => bail!("barrier.profile needs barrier.shape = sampled"),
            }
        }
        if cfg.barrier.shape == Shape::Sampled(PathBuf::new()) {
            bail!("barrier.shape = sampled needs barrier.profile");
        }
        set!(cfg.barrier.height, "barrier.height", "barrier.V0");
        set!(cfg.barrier.width, "barrier.width", "barrier.d");
        set!(cfg.barrier.v1, "barrier.v1", "barrier.V1");
        set!(cfg.barrier.omega, "barrier.omega");
        if let Some((k, v)) = take(&["sideband.n_eff"]) {
            cfg.n_eff = Some(parse_value(&k, &v)?);
        }

        set!(cfg.nelson.paths, "nelson.paths");
        set!(cfg.nelson.seed, "nelson.seed");
        set!(cfg.nelson.sde_dt, "nelson.sde_dt");
        set!(cfg.nelson.dt, "nelson.dt");
        set!(cfg.nelson.n_x, "nelson.n_x");
        set!(cfg.nelson.stride, "nelson.stride");
        if let Some((k, v)) = take(&["nelson.sigma"]) {
            cfg.nelson.sigma = Some(parse_value(&k, &v)?);
        }
        if let Some((k, v)) = take(&["nelson.budget_secs"]) {
            cfg.nelson.budget_secs = Some(parse_value(&k, &v)?);
        }
        set!(cfg.current_samples, "current.samples");
        set!(cfg.tbar.omega_lo, "tbar.omega_lo");
        set!(cfg.tbar.omega_hi, "tbar.omega_hi");
        set!(cfg.tbar.n_points, "tbar.n_points");

        let scan_keys = ["scan.axis", "scan.lo", "scan.hi", "scan.n_points", "scan.methods"];
        if scan_keys.iter().any(|k| e.contains_key(*k)) {
            let mut get = |k: &str| e.remove(k).ok_or_else(|| anyhow!("{k} is required for a scan"));
            let axis: Axis = get("scan.axis")?.parse()?;
            let lo = parse_value("scan.lo", &get("scan.lo")?)?;
            let hi = parse_value("scan.hi", &get("scan.hi")?)?;
            let n_points = parse_value("scan.n_points", &get("scan.n_points")?)?;
            let methods = get("scan.methods")?
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::parse)
                .collect::<Result<Vec<Method>>>()?;
            cfg.scan = Some(ScanConfig { axis, lo, hi, n_points, methods });
        }
        if let Some(k) = e.keys().next() {
            bail!("unknown key '{k}'");
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        Units::new(self.units.mass, self.units.hbar)?;
        if !(self.energy > 0.0) {
            bail!("incident.energy must be positive");
        }
        let b = &self.barrier;
        if !(b.height > 0.0 && b.width > 0.0) {
            bail!("barrier.height and barrier.width must be positive");
        }
        if !(b.v1 >= 0.0 && b.omega >= 0.0) {
            bail!("barrier.v1 and barrier.omega must be non-negative");
        }
        let n = &self.nelson;
        if n.paths == 0 || !(n.sde_dt > 0.0) || !(n.dt > 0.0) || n.stride == 0 || n.n_x < 16 {
            bail!("nelson settings must be positive (n_x >= 16)");
        }
        if let Some(s) = &self.scan {
            if !(s.lo < s.hi) {
                bail!("scan.lo must be below scan.hi");
            }
            if s.n_points < 2 {
                bail!("scan.n_points must be at least 2");
            }
            if s.methods.is_empty() {
                bail!("scan.methods is empty");
            }
            let needs_rect = s.methods.iter().any(|m| matches!(m, Method::Vis | Method::Asymmetry));
            if needs_rect && !b.is_rectangular() {
                bail!("vis and asymmetry need a rectangular barrier");
            }
            let needs_drive = needs_rect && s.axis != Axis::Frequency;
            if needs_drive && !(b.v1 > 0.0 && b.omega > 0.0) {
                bail!("vis and asymmetry need barrier.v1 and barrier.omega > 0");
            }
            if s.axis == Axis::HeightRatio && s.lo <= 0.0 {
                bail!("height_ratio scans need a positive range");
            }
        }
        if !(self.tbar.omega_lo > 0.0 && self.tbar.omega_lo < self.tbar.omega_hi && self.tbar.n_points >= 2) {
            bail!("tbar range must satisfy 0 < omega_lo < omega_hi with n_points >= 2");
        }
        if self.current_samples < 2 {
            bail!("current.samples must be at least 2");
        }
        Ok(())
    }

    /// Copy with the scan axis set to `value`.
    pub fn at(&self, axis: Axis, value: f64) -> Self {
        let mut c = self.clone();
        match axis {
            Axis::Width => c.barrier.width = value,
            Axis::HeightRatio => c.barrier.height = value * self.energy,
            Axis::Frequency => c.barrier.omega = value,
        }
        c
    }
}
