use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::tdse::WaveField;
use crate::error::invalid;
use crate::physics::PhysicalUnits;
use crate::{Error, Result, Scalar};

/// Smallest transmitted-lobe weight accepted for backward sampling.
pub const MIN_TRANSMITTED_WEIGHT: f64 = 1e-6;

/// Integration settings for sample paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathOptions<T> {
    /// Euler–Maruyama step; must evenly divide the snapshot interval.
    pub sde_dt: T,
    /// Keep every `Some(k)`-th position of each trajectory.
    pub record_every: Option<usize>,
}

impl<T: Scalar> PathOptions<T> {
    pub fn new(sde_dt: T) -> Self {
        Self { sde_dt, record_every: None }
    }

    pub fn recording(mut self, every: usize) -> Self {
        self.record_every = Some(every.max(1));
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exclusion {
    LeftGrid,
    Clamped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath<T> {
    pub index: usize,
    pub seed: u64,
    pub transmitted: bool,
    pub dwell_time: T,
    /// Duration of the final uninterrupted passage from `x1` to `x2`.
    pub crossing_time: Option<T>,
    pub initial_x: T,
    pub final_x: T,
    /// Positions at `t = k · sde_dt · record_every`, in forward time order.
    pub trajectory: Option<Vec<T>>,
    pub clamp_events: usize,
    pub excluded: Option<Exclusion>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathEnsemble<T> {
    pub paths: Vec<SamplePath<T>>,
    pub region_ii: (T, T),
    pub sde_dt: T,
    pub master_seed: u64,
    pub record_every: Option<usize>,
}

impl<T: Scalar> PathEnsemble<T> {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn n_exited(&self) -> usize {
        self.count(Exclusion::LeftGrid)
    }

    pub fn n_clamped(&self) -> usize {
        self.count(Exclusion::Clamped)
    }

    fn count(&self, e: Exclusion) -> usize {
        self.paths.iter().filter(|p| p.excluded == Some(e)).count()
    }

    pub fn clamp_events(&self) -> usize {
        self.paths.iter().map(|p| p.clamp_events).sum()
    }

    /// Paths that count toward statistics.
    pub fn valid(&self) -> impl Iterator<Item = &SamplePath<T>> {
        self.paths.iter().filter(|p| p.excluded.is_none())
    }

    pub fn transmitted_fraction(&self) -> T {
        let (n, t) = self.valid().fold((0usize, 0usize), |(n, t), p| (n + 1, t + p.transmitted as usize));
        if n == 0 {
            T::zero()
        } else {
            T::from_usize_lossy(t) / T::from_usize_lossy(n)
        }
    }
}

/// Mean dwell time over transmitted paths with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauNelson<T> {
    pub mean: T,
    pub std_error: T,
    pub n_used: usize,
}

/// Mean and standard error of `values`.
fn mean_and_error<T: Scalar>(values: &[T]) -> Result<TauNelson<T>> {
    if values.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let n = T::from_usize_lossy(values.len());
    let mean = values.iter().fold(T::zero(), |a, d| a + *d) / n;
    let std_error = if values.len() > 1 {
        let ss = values.iter().fold(T::zero(), |a, d| a + (*d - mean) * (*d - mean));
        (ss / (n - T::one())).sqrt() / n.sqrt()
    } else {
        T::zero()
    };
    Ok(TauNelson { mean, std_error, n_used: values.len() })
}

/// Mean of the last-crossing durations over transmitted paths.
pub fn tau_crossing<T: Scalar>(ensemble: &PathEnsemble<T>) -> Result<TauNelson<T>> {
    let t: Vec<T> = ensemble.valid().filter_map(|p| p.crossing_time).collect();
    mean_and_error(&t)
}

/// Mean total residence time in region II over transmitted paths.
pub fn tau_nelson<T: Scalar>(ensemble: &PathEnsemble<T>) -> Result<TauNelson<T>> {
    let dwell: Vec<T> = ensemble.valid().filter(|p| p.transmitted).map(|p| p.dwell_time).collect();
    mean_and_error(&dwell)
}

/// `dt` times the number of positions in `region`, the last position excluded,
/// so trajectories split at a shared point add up exactly.
pub fn dwell_time<T: Scalar>(trajectory: &[T], dt: T, region: (T, T)) -> T {
    let Some((_, head)) = trajectory.split_last() else {
        return T::zero();
    };
    let inside = head.iter().filter(|x| **x >= region.0 && **x <= region.1).count();
    dt * T::from_usize_lossy(inside)
}

/// SplitMix64 step; decorrelates per-path seeds drawn from one master seed.
pub fn path_seed(master: u64, index: usize) -> u64 {
    let mut z = master.wrapping_add((index as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Wiener increment with variance `ħ dt / m`.
pub fn noise_increment<T: Scalar, R: Rng + ?Sized>(rng: &mut R, dt: T, units: &PhysicalUnits<T>) -> T {
    let xi: f64 = rng.sample(StandardNormal);
    T::lit(xi) * (units.hbar * dt / units.mass).sqrt()
}

/// Inverse-CDF sampler of a piecewise-linear density on grid cells.
pub struct DensitySampler<T> {
    x_lo: T,
    h: T,
    nodes: Vec<T>,
    cumulative: Vec<T>,
}

impl<T: Scalar> DensitySampler<T> {
    /// Density restricted to nodes `x_j >= cut` when `cut` is given.
    pub fn new(field: &WaveField<T>, s: usize, cut: Option<T>) -> Self {
        let g = &field.grid;
        let h = g.spacing();
        let nodes: Vec<T> = field
            .snapshot(s)
            .iter()
            .enumerate()
            .map(|(j, c)| match cut {
                Some(c0) if g.x(j) < c0 => T::zero(),
                _ => c.norm_sqr(),
            })
            .collect();
        let mut cumulative = Vec::with_capacity(nodes.len());
        let mut acc = T::zero();
        cumulative.push(acc);
        for w in nodes.windows(2) {
            acc += (w[0] + w[1]) * h / T::lit(2.0);
            cumulative.push(acc);
        }
        Self { x_lo: g.x_lo, h, nodes, cumulative }
    }

    pub fn total(&self) -> T {
        *self.cumulative.last().unwrap_or(&T::zero())
    }

    /// CDF at `x`, normalized to the total weight.
    pub fn cdf(&self, x: T) -> T {
        let pos = (x - self.x_lo) / self.h;
        if pos <= T::zero() {
            return T::zero();
        }
        let last = self.nodes.len() - 1;
        if pos >= T::from_usize_lossy(last) {
            return T::one();
        }
        let j = pos.floor().to_usize().unwrap_or(0).min(last - 1);
        let s = pos - T::from_usize_lossy(j);
        let (a, b) = (self.nodes[j], self.nodes[j + 1]);
        let partial = self.h * (a * s + (b - a) * s * s / T::lit(2.0));
        (self.cumulative[j] + partial) / self.total()
    }

    /// Position whose CDF equals `p` in `[0, 1)`.
    pub fn sample(&self, p: T) -> T {
        let target = p * self.total();
        let j = match self.cumulative.partition_point(|c| *c <= target) {
            0 => 0,
            k => (k - 1).min(self.nodes.len() - 2),
        };
        let (a, b) = (self.nodes[j], self.nodes[j + 1]);
        let rem = (target - self.cumulative[j]) / self.h;
        // solve a s + (b − a) s²/2 = rem on [0, 1]
        let s = if (b - a).abs() <= T::epsilon() * (a + b) {
            if a + b > T::zero() { T::lit(2.0) * rem / (a + b) } else { T::lit(0.5) }
        } else {
            let disc = (a * a + T::lit(2.0) * (b - a) * rem).max(T::zero());
            T::lit(2.0) * rem / (a + disc.sqrt())
        };
        self.x_lo + self.h * (T::from_usize_lossy(j) + s.max(T::zero()).min(T::one()))
    }
}

/// Tracks the last time at or left of `x2` and the last time at or left of
/// `x1` before it, in forward-time indices.
#[derive(Default)]
struct Crossing {
    last_left: Option<usize>,
    enter: Option<usize>,
    exit: Option<usize>,
}

impl Crossing {
    fn see<T: Scalar>(&mut self, k: usize, x: T, region: (T, T), backward: bool) {
        if backward {
            // visiting times in decreasing order
            if self.exit.is_none() {
                if x <= region.1 {
                    self.exit = Some(k);
                    if x <= region.0 {
                        self.enter = Some(k);
                    }
                }
            } else if self.enter.is_none() && x <= region.0 {
                self.enter = Some(k);
            }
        } else {
            if x <= region.0 {
                self.last_left = Some(k);
            }
            if x <= region.1 {
                self.exit = Some(k);
                self.enter = self.last_left;
            }
        }
    }
}

struct Stepper<'a, T> {
    field: &'a WaveField<T>,
    dt: T,
    n_steps: usize,
    x_min: T,
    x_max: T,
    record_every: Option<usize>,
}

impl<'a, T: Scalar> Stepper<'a, T> {
    fn new(field: &'a WaveField<T>, opts: &PathOptions<T>) -> Result<Self> {
        if !(opts.sde_dt > T::zero()) {
            return Err(invalid("sde_dt", "must be positive"));
        }
        let interval = field.grid.snapshot_interval();
        let ratio = (interval / opts.sde_dt).round();
        if ratio < T::one() || ((ratio * opts.sde_dt - interval) / interval).abs() > T::lit(1e-6) {
            return Err(invalid("sde_dt", "must evenly divide the snapshot interval"));
        }
        let per = ratio.to_usize().unwrap_or(1);
        let g = &field.grid;
        let h = g.spacing();
        Ok(Self {
            field,
            dt: interval / ratio,
            n_steps: per * (field.n_snapshots() - 1),
            x_min: g.x_lo + h,
            x_max: g.x_hi - T::lit(2.0) * h,
            record_every: opts.record_every,
        })
    }

    fn time(&self, k: usize) -> T {
        self.dt * T::from_usize_lossy(k)
    }

    /// Runs one path from `x_start`. `backward` integrates from the final
    /// time toward zero with drift `v − u`.
    fn run(&self, index: usize, seed: u64, x_start: T, backward: bool) -> SamplePath<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let units = &self.field.units;
        let region = self.field.region_ii;
        let mut x = x_start;
        let mut dwell_count = 0usize;
        let mut clamp_events = 0usize;
        let mut excluded = None;
        let mut traj = self.record_every.map(|_| Vec::new());
        let inside = |x: T| x >= region.0 && x <= region.1;
        let record = |k: usize, x: T, traj: &mut Option<Vec<T>>| {
            if let (Some(v), Some(every)) = (traj.as_mut(), self.record_every) {
                if k.is_multiple_of(every) {
                    v.push(x);
                }
            }
        };
        record(if backward { self.n_steps } else { 0 }, x, &mut traj);
        let mut crossing = Crossing::default();
        crossing.see(if backward { self.n_steps } else { 0 }, x, region, backward);
        for step in 0..self.n_steps {
            // k is the time index of the current position
            let k = if backward { self.n_steps - step } else { step };
            let vel = match self.field.velocity_at(x, self.time(k)) {
                Ok(v) => v,
                Err(_) => {
                    excluded = Some(Exclusion::LeftGrid);
                    break;
                }
            };
            if vel.clamped {
                clamp_events += 1;
            }
            let dw = noise_increment(&mut rng, self.dt, units);
            let next = if backward {
                x - (vel.v - vel.u) * self.dt + dw
            } else {
                x + (vel.u + vel.v) * self.dt + dw
            };
            // left-point rule on the forward-time reading
            if backward {
                if inside(next) {
                    dwell_count += 1;
                }
            } else if inside(x) {
                dwell_count += 1;
            }
            x = next;
            let k_next = if backward { k - 1 } else { k + 1 };
            record(k_next, x, &mut traj);
            crossing.see(k_next, x, region, backward);
            if !(x > self.x_min && x < self.x_max) {
                excluded = Some(Exclusion::LeftGrid);
                break;
            }
        }
        if excluded.is_none() && clamp_events > 0 {
            excluded = Some(Exclusion::Clamped);
        }
        if backward {
            if let Some(v) = traj.as_mut() {
                v.reverse();
            }
        }
        let (initial_x, final_x) = if backward { (x, x_start) } else { (x_start, x) };
        let transmitted = final_x > region.1;
        let crossing_time = match (transmitted, crossing.enter, crossing.exit) {
            (true, Some(a), Some(b)) if b >= a => Some(self.dt * T::from_usize_lossy(b - a)),
            _ => None,
        };
        SamplePath {
            index,
            seed,
            transmitted,
            dwell_time: self.dt * T::from_usize_lossy(dwell_count),
            crossing_time,
            initial_x,
            final_x,
            trajectory: traj,
            clamp_events,
            excluded,
        }
    }
}

fn start_position<T: Scalar>(sampler: &DensitySampler<T>, seed: u64) -> T {
    // a stream separate from the one driving the noise
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5DEE_CE66_D1CE_4E5B);
    sampler.sample(T::lit(rng.random::<f64>()))
}

/// Paths started from `|ψ(x, 0)|²` and integrated forward with drift `u + v`.
pub fn forward_paths<T: Scalar>(
    field: &WaveField<T>,
    n_paths: usize,
    seed: u64,
    opts: &PathOptions<T>,
) -> Result<PathEnsemble<T>> {
    let stepper = Stepper::new(field, opts)?;
    let sampler = DensitySampler::new(field, 0, None);
    let paths = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let s = path_seed(seed, i);
            stepper.run(i, s, start_position(&sampler, s), false)
        })
        .collect();
    Ok(PathEnsemble {
        paths,
        region_ii: field.region_ii,
        sde_dt: stepper.dt,
        master_seed: seed,
        record_every: opts.record_every,
    })
}

/// Paths whose final positions are drawn from `|ψ(x, T)|²` restricted to
/// `x ≥ cut` (all of it for `None`), integrated backward in time with drift
/// `v − u`. Trajectories are stored in forward time order.
pub fn backward_paths<T: Scalar>(
    field: &WaveField<T>,
    n_paths: usize,
    seed: u64,
    opts: &PathOptions<T>,
    cut: Option<T>,
) -> Result<PathEnsemble<T>> {
    let stepper = Stepper::new(field, opts)?;
    let last = field.n_snapshots() - 1;
    let sampler = DensitySampler::new(field, last, cut);
    let weight = sampler.total();
    if !(weight >= T::lit(MIN_TRANSMITTED_WEIGHT)) {
        return Err(Error::InsufficientTransmission { weight: weight.to_f64_lossy() });
    }
    let paths = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let s = path_seed(seed, i);
            stepper.run(i, s, start_position(&sampler, s), true)
        })
        .collect();
    Ok(PathEnsemble {
        paths,
        region_ii: field.region_ii,
        sde_dt: stepper.dt,
        master_seed: seed,
        record_every: opts.record_every,
    })
}

/// Transmitted sub-ensemble: end points drawn from the final density beyond
/// the barrier, integrated backward in time with drift `v − u`.
pub fn backward_transmitted_paths<T: Scalar>(
    field: &WaveField<T>,
    n_paths: usize,
    seed: u64,
    opts: &PathOptions<T>,
) -> Result<PathEnsemble<T>> {
    backward_paths(field, n_paths, seed, opts, Some(field.region_ii.1))
}
