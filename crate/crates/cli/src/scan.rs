//! Parameter scans: one row per axis value, every requested method computed
//! independently so a failure in one leaves the others intact.

use std::time::Instant;

use anyhow::{anyhow, Result};
use rayon::prelude::*;
use traversal_core::nelson::{path_seed, PathOptions};
use traversal_core::sideband::{
    default_observation_point, sideband_asymmetry, solve_rectangular, time_averaged_transmission,
    traversal_time_from_visibility, visibility,
};
use traversal_core::wkb::{damping_factor, turning_points, wkb_traversal_time, OPAQUE_DAMPING_LIMIT};
use traversal_core::SolveMethod;

use crate::config::{Axis, LabConfig, Method, ScanConfig};
use crate::nelson_run::{profile_peak, run_nelson};

/// A validated scan: the fixed parameter record plus the swept axis.
#[derive(Debug, Clone)]
pub struct ScanSpec {
    pub fixed: LabConfig,
    pub scan: ScanConfig,
}

impl ScanSpec {
    pub fn from_config(cfg: &LabConfig) -> Result<Self> {
        cfg.validate()?;
        let scan = cfg.scan.clone().ok_or_else(|| anyhow!("config has no scan.* section"))?;
        Ok(Self { fixed: cfg.clone(), scan })
    }

    pub fn axis(&self) -> Axis {
        self.scan.axis
    }

    fn wants(&self, m: Method) -> bool {
        self.scan.methods.contains(&m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub axis_value: f64,
    pub tau_vis: Option<f64>,
    pub tau_wkb: Option<f64>,
    pub tau_nelson: Option<f64>,
    pub tau_nelson_stderr: Option<f64>,
    pub i_vis: Option<f64>,
    pub t_bar: Option<f64>,
    pub asymmetry: Option<f64>,
    pub flags: Vec<String>,
}

impl ScanRow {
    pub fn empty(axis_value: f64) -> Self {
        Self {
            axis_value,
            tau_vis: None,
            tau_wkb: None,
            tau_nelson: None,
            tau_nelson_stderr: None,
            i_vis: None,
            t_bar: None,
            asymmetry: None,
            flags: Vec::new(),
        }
    }

    fn flag(&mut self, f: impl Into<String>) {
        let f = f.into();
        if !self.flags.contains(&f) {
            self.flags.push(f);
        }
    }

    fn error(&mut self, method: &str, err: impl std::fmt::Display) {
        self.flag(format!("{method}_error:{}", sanitize(&err.to_string())));
    }
}

/// Flags live in one CSV field separated by `;`.
fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| if matches!(c, ',' | ';' | '"' | '\n' | '\r') { ' ' } else { c })
        .collect()
}

/// Runs every point of the scan. Points run in parallel, rows come back in
/// axis order, and point `i` draws its Nelson paths from `path_seed(seed, i)`.
pub fn run_scan(spec: &ScanSpec, seed: u64) -> Vec<ScanRow> {
    let start = Instant::now();
    let values = spec.scan.values();
    values
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            let cfg = spec.fixed.at(spec.axis(), v);
            let over_budget = spec
                .fixed
                .nelson
                .budget_secs
                .is_some_and(|b| start.elapsed().as_secs_f64() > b);
            scan_point(spec, &cfg, v, path_seed(seed, i), over_budget)
        })
        .collect()
}

fn scan_point(spec: &ScanSpec, cfg: &LabConfig, value: f64, seed: u64, skip_nelson: bool) -> ScanRow {
    let mut row = ScanRow::empty(value);
    opacity_flags(cfg, &mut row);
    if spec.wants(Method::Vis) || spec.wants(Method::Asymmetry) {
        sideband_columns(spec, cfg, &mut row);
    }
    if spec.wants(Method::Wkb) {
        match cfg.barrier.profile().and_then(|p| Ok(wkb_traversal_time(&p, cfg.energy, &cfg.units)?)) {
            Ok(t) => row.tau_wkb = Some(t),
            Err(e) => row.error("wkb", e),
        }
    }
    if spec.wants(Method::Nelson) {
        if skip_nelson {
            row.flag("nelson_budget_exhausted");
        } else {
            match run_nelson(cfg, seed, &PathOptions::new(cfg.nelson.sde_dt)) {
                Ok(out) => {
                    row.tau_nelson = Some(out.tau.mean);
                    row.tau_nelson_stderr = Some(out.tau.std_error);
                    if out.broad_spectrum {
                        row.flag("broad_spectrum");
                    }
                    if out.ensemble.n_clamped() > 0 {
                        row.flag("nelson_clamped_paths");
                    }
                }
                Err(e) => row.error("nelson", format!("{e:#}")),
            }
        }
    }
    row
}

/// `not_opaque` when the static damping factor exceeds the opacity limit,
/// `above_barrier` when there is no forbidden region at all.
fn opacity_flags(cfg: &LabConfig, row: &mut ScanRow) {
    let Ok(profile) = cfg.barrier.profile() else { return };
    if cfg.energy >= profile_peak(&profile) {
        row.flag("above_barrier");
        return;
    }
    let s0 = turning_points(&profile, cfg.energy)
        .and_then(|(x1, x2)| damping_factor(&profile, cfg.energy, x1, x2, &cfg.units));
    match s0 {
        Ok(s) if s > OPAQUE_DAMPING_LIMIT => row.flag("not_opaque"),
        Ok(_) => {}
        Err(e) => row.error("opacity", e),
    }
}

fn sideband_columns(spec: &ScanSpec, cfg: &LabConfig, row: &mut ScanRow) {
    let b = &cfg.barrier;
    let solved = cfg
        .barrier
        .spec()
        .and_then(|barrier| Ok(solve_rectangular(cfg.energy, &barrier, &cfg.units, cfg.n_eff, SolveMethod::FullMatching)?));
    let (sol, nudged) = match solved {
        Ok(s) => s,
        Err(e) => {
            row.error("sideband", format!("{e:#}"));
            return;
        }
    };
    if nudged {
        row.flag("branch_nudged");
    }
    if !sol.closed_orders().is_empty() {
        row.flag("closed_channels");
    }
    row.t_bar = Some(time_averaged_transmission(&sol));
    if spec.wants(Method::Vis) {
        let tau = visibility(&sol, default_observation_point(&sol)).and_then(|r| {
            let est = traversal_time_from_visibility(r.visibility, b.v1, b.omega, &cfg.units)?;
            Ok((r.visibility, est))
        });
        match tau {
            Ok((i_vis, est)) => {
                row.i_vis = Some(i_vis);
                row.tau_vis = Some(est.tau);
                if est.low_frequency_unreliable {
                    row.flag("low_frequency_unreliable");
                }
            }
            Err(e) => row.error("vis", e),
        }
    }
    if spec.wants(Method::Asymmetry) {
        match sideband_asymmetry(&sol) {
            Ok(a) => row.asymmetry = Some(a),
            Err(e) => row.error("asymmetry", e),
        }
    }
}
