use num_complex::Complex;

use super::tdse::WaveField;
use crate::error::invalid;
use crate::{Result, Scalar};

/// Density floor, relative to the snapshot peak, below which velocities are
/// clamped.
pub const NODE_FLOOR: f64 = 1e-12;
/// Clamp magnitude in units of `ħ k0 / m`.
pub const CLAMP_SPEED: f64 = 50.0;

/// Osmotic `u` and current `v` velocities at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocitySample<T> {
    pub u: T,
    pub v: T,
    /// A node value fell under the density floor or exceeded the clamp.
    pub clamped: bool,
}

impl<T: Scalar> WaveField<T> {
    pub(crate) fn clamp_speed(&self) -> T {
        T::lit(CLAMP_SPEED) * self.units.hbar * self.k0 / self.units.mass
    }

    /// `(ħ/m) ψ'/ψ` at interior node `j` of snapshot `s`.
    fn node_velocity(&self, s: usize, j: usize) -> (Complex<T>, bool) {
        let psi = self.snapshot(s);
        let h = self.grid.spacing();
        let vmax = self.clamp_speed();
        let floor = T::lit(NODE_FLOOR) * self.peak_density[s];
        let c = psi[j];
        let d = (psi[j + 1] - psi[j - 1]) / (T::lit(2.0) * h);
        let raw = d / c * (self.units.hbar / self.units.mass);
        let small = c.norm_sqr() < floor;
        let fix = |a: T| if a.is_nan() { T::zero() } else { a.max(-vmax).min(vmax) };
        let out = Complex::new(fix(raw.re), fix(raw.im));
        let clamped = small || out != raw;
        (out, clamped)
    }

    /// Velocity field at `(x, t)` by bilinear interpolation of node values.
    pub fn velocity_at(&self, x: T, t: T) -> Result<VelocitySample<T>> {
        let g = &self.grid;
        let h = g.spacing();
        let pos = (x - g.x_lo) / h;
        let last_node = g.n_x - 2;
        if !(pos >= T::one() && pos <= T::from_usize_lossy(last_node)) {
            return Err(invalid("x", "outside the grid interior"));
        }
        let tpos = t / g.snapshot_interval();
        let last_snap = self.n_snapshots() - 1;
        if !(tpos >= T::zero() && tpos <= T::from_usize_lossy(last_snap) * (T::one() + T::epsilon() * T::lit(8.0))) {
            return Err(invalid("t", "outside the propagated interval"));
        }
        let j = pos.floor().to_usize().unwrap_or(1).clamp(1, last_node - 1);
        let s = tpos.floor().to_usize().unwrap_or(0).min(last_snap.saturating_sub(1));
        let beta = (pos - T::from_usize_lossy(j)).max(T::zero()).min(T::one());
        let alpha = (tpos - T::from_usize_lossy(s)).max(T::zero()).min(T::one());
        let mut clamped = false;
        let mut at = |s: usize, j: usize| {
            let (w, c) = self.node_velocity(s, j);
            clamped |= c;
            w
        };
        let w0 = at(s, j) * (T::one() - beta) + at(s, j + 1) * beta;
        let w = if last_snap == 0 {
            w0
        } else {
            let w1 = at(s + 1, j) * (T::one() - beta) + at(s + 1, j + 1) * beta;
            w0 * (T::one() - alpha) + w1 * alpha
        };
        Ok(VelocitySample { u: w.re, v: w.im, clamped })
    }
}

/// `u = Re (ħ/m) ∂x ln ψ`, `v = Im (ħ/m) ∂x ln ψ` at `(x, t)`.
pub fn velocities<T: Scalar>(field: &WaveField<T>, x: T, t: T) -> Result<VelocitySample<T>> {
    field.velocity_at(x, t)
}
