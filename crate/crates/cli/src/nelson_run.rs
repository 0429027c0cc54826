//! One Nelson point: wave packet, grid sized from the packet kinematics,
//! backward transmitted ensemble topped up to the requested size.

use anyhow::{bail, Context, Result};
use traversal_core::nelson::{
    backward_transmitted_paths, path_seed, propagate, region_ii, tau_crossing, tau_nelson, PathOptions, TauNelson,
};
use traversal_core::{Barrier, BarrierKind, Ensemble, Field, Grid, Packet, Profile};

use crate::config::LabConfig;

/// Extra top-up rounds before giving up on reaching the path target.
const MAX_TOP_UPS: u64 = 8;

/// Left edge of the static potential's support. Smooth profiles use the
/// point where `V` falls below `1e-8` of its peak.
pub fn support_left(barrier: &Barrier) -> f64 {
    match &barrier.kind {
        BarrierKind::Rectangular { width, .. } => -width / 2.0,
        BarrierKind::Smooth(p) => {
            let (lo, hi) = p.domain();
            let n = 8192;
            let xs: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
            let peak = xs.iter().map(|x| p.eval(*x)).fold(0.0, f64::max);
            xs.into_iter().find(|x| p.eval(*x) > 1e-8 * peak).unwrap_or(lo)
        }
    }
}

/// Packet and grid for a run at the configured energy.
///
/// The packet starts `6σ` left of the potential. The run lasts long enough
/// for the packet centre to cover twice its distance to the far turning
/// point, and the box holds the spread packet with `8σ(T)` to spare.
pub fn auto_setup(cfg: &LabConfig, barrier: &Barrier) -> Result<(Packet, Grid)> {
    let units = &cfg.units;
    let n = &cfg.nelson;
    let k0 = (units.k2_per_energy() * cfg.energy).sqrt();
    let v0 = units.hbar * k0 / units.mass;
    let sigma = n.sigma.unwrap_or(10.0 / k0);
    let x0 = support_left(barrier).min(region_ii(barrier, cfg.energy)?.0) - 6.0 * sigma;
    let packet = Packet::new(x0, sigma, k0)?;
    let far = region_ii(barrier, cfg.energy)?.1;
    let duration = (2.0 * (far - x0) + 10.0) / v0;
    let spread = units.hbar * duration / (2.0 * units.mass * sigma * sigma);
    let sigma_t = sigma * (1.0 + spread * spread).sqrt();
    let x_t = x0 + v0 * duration;
    let half = x0.abs().max(x_t.abs()) + 8.0 * sigma_t + 10.0;
    let steps = (duration / n.dt).ceil() as usize;
    let n_t = steps.div_ceil(n.stride) * n.stride;
    let grid = Grid::new(-half, half, n.n_x, n.dt, n_t)?.with_stride(n.stride)?;
    Ok((packet, grid))
}

/// The static barrier used for wave-packet runs.
pub fn static_barrier(cfg: &LabConfig) -> Result<Barrier> {
    let b = &cfg.barrier;
    Ok(match &b.shape {
        crate::config::Shape::Rectangular => Barrier::rectangular(b.height, b.width)?,
        _ => Barrier::smooth(b.profile()?),
    })
}

pub fn propagate_for(cfg: &LabConfig) -> Result<Field> {
    let barrier = static_barrier(cfg)?;
    let (packet, grid) = auto_setup(cfg, &barrier)?;
    propagate(&packet, &barrier, &grid, &cfg.units).context("wave-packet propagation")
}

#[derive(Debug, Clone)]
pub struct NelsonOutcome {
    pub tau: TauNelson<f64>,
    /// Last uninterrupted crossing, reported alongside the residence time.
    pub crossing: Option<TauNelson<f64>>,
    pub transmitted_weight: f64,
    pub broad_spectrum: bool,
    pub ensemble: Ensemble,
}

/// Backward transmitted ensemble with at least `target` valid paths.
pub fn transmitted_ensemble(field: &Field, target: usize, seed: u64, opts: &PathOptions<f64>) -> Result<Ensemble> {
    let mut ens = backward_transmitted_paths(field, target + target / 10 + 8, seed, opts)?;
    let mut round = 0;
    loop {
        let valid = ens.valid().count();
        if valid >= target {
            break;
        }
        round += 1;
        if round > MAX_TOP_UPS {
            bail!("only {valid} of {target} transmitted paths stayed valid");
        }
        let missing = target - valid;
        let extra = backward_transmitted_paths(field, missing + missing / 4 + 8, path_seed(seed, usize::MAX - round as usize), opts)?;
        let offset = ens.paths.len();
        ens.paths.extend(extra.paths.into_iter().map(|mut p| {
            p.index += offset;
            p
        }));
    }
    Ok(ens)
}

pub fn run_nelson(cfg: &LabConfig, seed: u64, opts: &PathOptions<f64>) -> Result<NelsonOutcome> {
    run_nelson_on(&propagate_for(cfg)?, cfg.nelson.paths, seed, opts)
}

/// Transmitted ensemble of `target` valid paths on an existing field.
pub fn run_nelson_on(field: &Field, target: usize, seed: u64, opts: &PathOptions<f64>) -> Result<NelsonOutcome> {
    let last = field.n_snapshots() - 1;
    let transmitted_weight = field.probability_right_of(field.region_ii.1, last);
    let ensemble = transmitted_ensemble(field, target, seed, opts)?;
    let tau = tau_nelson(&ensemble)?;
    let crossing = tau_crossing(&ensemble).ok();
    Ok(NelsonOutcome {
        tau,
        crossing,
        transmitted_weight,
        broad_spectrum: field.broad_spectrum,
        ensemble,
    })
}

/// Peak of the static profile, for opacity checks.
pub fn profile_peak(profile: &Profile) -> f64 {
    match profile {
        Profile::Rectangular { height, .. } | Profile::Gaussian { height, .. } => *height,
        Profile::Eckart { height, .. } => *height,
        Profile::Sampled(s) => s.samples().1.iter().copied().fold(f64::MIN, f64::max),
    }
}
