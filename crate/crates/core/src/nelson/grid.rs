use num_complex::Complex;

use crate::error::invalid;
use crate::physics::{BarrierKind, BarrierSpec, PhysicalUnits};
use crate::wkb::turning_points;
use crate::{Result, Scalar};

/// Uniform spatial grid with Dirichlet ends and a fixed time step.
///
/// Nodes are `x_j = x_lo + j h`, `h = (x_hi − x_lo)/(n_x − 1)`. Snapshots are
/// kept every `stride` steps, so a run stores `n_t / stride + 1` of them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub x_lo: T,
    pub x_hi: T,
    pub n_x: usize,
    pub dt: T,
    pub n_t: usize,
    pub stride: usize,
}

impl<T: Scalar> GridSpec<T> {
    pub fn new(x_lo: T, x_hi: T, n_x: usize, dt: T, n_t: usize) -> Result<Self> {
        if !(x_hi > x_lo) {
            return Err(invalid("grid", "x_hi must exceed x_lo"));
        }
        if n_x < 16 {
            return Err(invalid("n_x", "need at least 16 points"));
        }
        if !(dt > T::zero()) {
            return Err(invalid("dt", "must be positive"));
        }
        if n_t == 0 {
            return Err(invalid("n_t", "must be positive"));
        }
        Ok(Self { x_lo, x_hi, n_x, dt, n_t, stride: 1 })
    }

    pub fn with_stride(mut self, stride: usize) -> Result<Self> {
        if stride == 0 || !self.n_t.is_multiple_of(stride) {
            return Err(invalid("stride", "must be positive and divide n_t"));
        }
        self.stride = stride;
        Ok(self)
    }

    pub fn spacing(&self) -> T {
        (self.x_hi - self.x_lo) / T::from_usize_lossy(self.n_x - 1)
    }

    pub fn x(&self, j: usize) -> T {
        self.x_lo + self.spacing() * T::from_usize_lossy(j)
    }

    pub fn duration(&self) -> T {
        self.dt * T::from_usize_lossy(self.n_t)
    }

    pub fn n_snapshots(&self) -> usize {
        self.n_t / self.stride + 1
    }

    /// Time between stored snapshots.
    pub fn snapshot_interval(&self) -> T {
        self.dt * T::from_usize_lossy(self.stride)
    }

    /// At least 16 nodes per wavelength `2π/k`.
    pub fn resolves(&self, k: T) -> bool {
        self.spacing() * T::lit(16.0) * k.abs() <= T::TAU()
    }
}

/// Gaussian packet `(2πσ²)^(-1/4) exp(−(x−x0)²/4σ² + i k0 x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePacketSpec<T> {
    pub x0: T,
    pub sigma: T,
    pub k0: T,
}

impl<T: Scalar> WavePacketSpec<T> {
    pub fn new(x0: T, sigma: T, k0: T) -> Result<Self> {
        if !(sigma > T::zero()) {
            return Err(invalid("sigma", "must be positive"));
        }
        if !(k0 > T::zero()) {
            return Err(invalid("k0", "must be positive"));
        }
        if !x0.is_finite() {
            return Err(invalid("x0", "must be finite"));
        }
        Ok(Self { x0, sigma, k0 })
    }

    /// `σ = 10/k0` started `6σ` to the left of the barrier's left edge.
    pub fn default_for(left_edge: T, k0: T) -> Result<Self> {
        let sigma = T::lit(10.0) / k0;
        Self::new(left_edge - T::lit(6.0) * sigma, sigma, k0)
    }

    pub fn amplitude(&self, x: T) -> Complex<T> {
        let norm = (T::TAU() * self.sigma * self.sigma).powf(T::lit(-0.25));
        let y = x - self.x0;
        let envelope = norm * (-(y * y) / (T::lit(4.0) * self.sigma * self.sigma)).exp();
        Complex::from_polar(envelope, self.k0 * x)
    }

    /// Mean kinetic energy `ħ²k0²/2m`.
    pub fn energy(&self, units: &PhysicalUnits<T>) -> T {
        self.k0 * self.k0 / units.k2_per_energy()
    }

    /// Energy spread `ħ²k0/(2mσ)` from the momentum width `1/(2σ)`.
    pub fn energy_spread(&self, units: &PhysicalUnits<T>) -> T {
        self.k0 / (units.k2_per_energy() * self.sigma)
    }
}

/// Barrier region used for dwell accounting: the support `[−d/2, d/2]` for a
/// rectangle, the classical turning points at `energy` otherwise.
pub fn region_ii<T: Scalar>(barrier: &BarrierSpec<T>, energy: T) -> Result<(T, T)> {
    match &barrier.kind {
        BarrierKind::Rectangular { width, .. } => {
            let half = *width / T::lit(2.0);
            Ok((-half, half))
        }
        BarrierKind::Smooth(p) => turning_points(p, energy),
    }
}

/// Potential on the grid nodes. Rectangular edges are cell-averaged so the
/// discrete barrier keeps its width when the edges fall between nodes.
pub fn grid_potential<T: Scalar>(barrier: &BarrierSpec<T>, grid: &GridSpec<T>) -> Vec<T> {
    let h = grid.spacing();
    let half_h = h / T::lit(2.0);
    (0..grid.n_x)
        .map(|j| {
            let x = grid.x(j);
            match &barrier.kind {
                BarrierKind::Rectangular { height, width } => {
                    let half = *width / T::lit(2.0);
                    let lo = (x - half_h).max(-half);
                    let hi = (x + half_h).min(half);
                    if hi > lo {
                        *height * (hi - lo) / h
                    } else {
                        T::zero()
                    }
                }
                BarrierKind::Smooth(p) => p.eval(x),
            }
        })
        .collect()
}
