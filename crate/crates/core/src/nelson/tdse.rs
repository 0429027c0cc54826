use num_complex::Complex;

use super::grid::{grid_potential, region_ii, GridSpec, WavePacketSpec};
use crate::error::invalid;
use crate::physics::{BarrierSpec, PhysicalUnits};
use crate::{Error, Result, Scalar};

/// Largest tolerated `|norm − 1|` over a run.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;
/// Largest tolerated density next to either Dirichlet end.
pub const EDGE_DENSITY_LIMIT: f64 = 1e-10;

/// Stored snapshots of a propagated packet. Immutable once built.
#[derive(Debug, Clone)]
pub struct WaveField<T> {
    pub grid: GridSpec<T>,
    pub units: PhysicalUnits<T>,
    /// Snapshot-major, `n_snapshots × n_x`.
    pub psi: Vec<Complex<T>>,
    /// `Σ|ψ|² h` per snapshot.
    pub norms: Vec<T>,
    /// Peak density per snapshot, used for the node floor.
    pub peak_density: Vec<T>,
    pub region_ii: (T, T),
    pub k0: T,
    /// Set when the packet's energy spread is not small against `V0 − E`.
    pub broad_spectrum: bool,
}

impl<T: Scalar> WaveField<T> {
    pub fn n_snapshots(&self) -> usize {
        self.norms.len()
    }

    pub fn time(&self, s: usize) -> T {
        self.grid.snapshot_interval() * T::from_usize_lossy(s)
    }

    pub fn snapshot(&self, s: usize) -> &[Complex<T>] {
        let n = self.grid.n_x;
        &self.psi[s * n..(s + 1) * n]
    }

    pub fn density(&self, s: usize) -> Vec<T> {
        self.snapshot(s).iter().map(|c| c.norm_sqr()).collect()
    }

    /// `∫_{x>x_cut} |ψ|² dx` on snapshot `s`.
    pub fn probability_right_of(&self, x_cut: T, s: usize) -> T {
        let h = self.grid.spacing();
        let mut acc = T::zero();
        for (j, c) in self.snapshot(s).iter().enumerate() {
            if self.grid.x(j) > x_cut {
                acc += c.norm_sqr();
            }
        }
        acc * h
    }

    /// `⟨x⟩` on snapshot `s`.
    pub fn mean_position(&self, s: usize) -> T {
        let h = self.grid.spacing();
        let mut acc = T::zero();
        for (j, c) in self.snapshot(s).iter().enumerate() {
            acc += self.grid.x(j) * c.norm_sqr();
        }
        acc * h / self.norms[s]
    }

    pub fn max_norm_drift(&self) -> T {
        self.norms
            .iter()
            .fold(T::zero(), |m, n| m.max((*n - T::one()).abs()))
    }
}

fn discrete_norm<T: Scalar>(psi: &[Complex<T>], h: T) -> T {
    psi.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr()) * h
}

/// Crank–Nicolson factorization of `I + i dt H / 2ħ` on the interior nodes.
struct CrankNicolson<T> {
    diag_rhs: Vec<Complex<T>>,
    off: Complex<T>,
    /// Modified super-diagonal and inverse pivots of the Thomas sweep.
    c_prime: Vec<Complex<T>>,
    inv_pivot: Vec<Complex<T>>,
}

impl<T: Scalar> CrankNicolson<T> {
    fn new(potential: &[T], h: T, dt: T, units: &PhysicalUnits<T>) -> Self {
        let n = potential.len() - 2;
        let kinetic = units.hbar * units.hbar / (units.mass * h * h);
        let i_half = Complex::new(T::zero(), dt / (T::lit(2.0) * units.hbar));
        let off = i_half * Complex::from(-kinetic / T::lit(2.0));
        let diag_lhs: Vec<Complex<T>> = (0..n)
            .map(|j| Complex::from(T::one()) + i_half * Complex::from(kinetic + potential[j + 1]))
            .collect();
        let diag_rhs = (0..n)
            .map(|j| Complex::from(T::one()) - i_half * Complex::from(kinetic + potential[j + 1]))
            .collect();
        let mut c_prime = vec![Complex::from(T::zero()); n];
        let mut inv_pivot = vec![Complex::from(T::zero()); n];
        let mut prev_c = Complex::from(T::zero());
        for j in 0..n {
            let pivot = diag_lhs[j] - off * prev_c;
            inv_pivot[j] = Complex::from(T::one()) / pivot;
            c_prime[j] = off * inv_pivot[j];
            prev_c = c_prime[j];
        }
        Self { diag_rhs, off, c_prime, inv_pivot }
    }

    /// One step in place; `psi[0]` and `psi[n+1]` stay zero.
    fn step(&self, psi: &mut [Complex<T>], scratch: &mut [Complex<T>]) {
        let n = self.diag_rhs.len();
        let minus_off = -self.off;
        for j in 0..n {
            scratch[j] = self.diag_rhs[j] * psi[j + 1] + minus_off * (psi[j] + psi[j + 2]);
        }
        let mut prev = Complex::from(T::zero());
        for (s, inv) in scratch[..n].iter_mut().zip(&self.inv_pivot) {
            prev = (*s - self.off * prev) * *inv;
            *s = prev;
        }
        for j in (0..n.saturating_sub(1)).rev() {
            let next = scratch[j + 1];
            scratch[j] -= self.c_prime[j] * next;
        }
        psi[1..=n].copy_from_slice(&scratch[..n]);
    }
}

/// Propagates `packet` through the static `barrier` on `grid`.
pub fn propagate<T: Scalar>(
    packet: &WavePacketSpec<T>,
    barrier: &BarrierSpec<T>,
    grid: &GridSpec<T>,
    units: &PhysicalUnits<T>,
) -> Result<WaveField<T>> {
    if barrier.modulation_amplitude != T::zero() {
        return Err(invalid("barrier", "wave-packet propagation needs a static barrier"));
    }
    let energy = packet.energy(units);
    let region = region_ii(barrier, energy)?;
    if !(packet.x0 + T::lit(4.0) * packet.sigma < region.0) {
        return Err(invalid("x0", "packet must start at least 4 sigma left of the barrier"));
    }
    let potential = grid_potential(barrier, grid);
    let peak = potential.iter().fold(T::zero(), |m, v| m.max(*v));
    let broad = peak > energy && packet.energy_spread(units) > T::lit(0.2) * (peak - energy);
    evolve(packet, potential, region, broad, grid, units)
}

/// Free propagation, `V = 0`. Region II is left empty at the right edge.
pub fn propagate_free<T: Scalar>(
    packet: &WavePacketSpec<T>,
    grid: &GridSpec<T>,
    units: &PhysicalUnits<T>,
) -> Result<WaveField<T>> {
    let potential = vec![T::zero(); grid.n_x];
    evolve(packet, potential, (grid.x_hi, grid.x_hi), false, grid, units)
}

fn evolve<T: Scalar>(
    packet: &WavePacketSpec<T>,
    potential: Vec<T>,
    region: (T, T),
    broad_spectrum: bool,
    grid: &GridSpec<T>,
    units: &PhysicalUnits<T>,
) -> Result<WaveField<T>> {
    let margin = T::lit(4.0) * packet.sigma;
    if !(packet.x0 - margin > grid.x_lo && packet.x0 + margin < grid.x_hi) {
        return Err(invalid("x0", "packet must sit at least 4 sigma inside the grid"));
    }
    if !grid.resolves(packet.k0) {
        return Err(invalid("n_x", "fewer than 16 nodes per wavelength"));
    }
    let h = grid.spacing();
    let n = grid.n_x;
    let mut psi: Vec<Complex<T>> = (0..n)
        .map(|j| {
            if j == 0 || j == n - 1 {
                Complex::from(T::zero())
            } else {
                packet.amplitude(grid.x(j))
            }
        })
        .collect();
    let scale = discrete_norm(&psi, h).sqrt().recip();
    for c in psi.iter_mut() {
        *c *= scale;
    }

    let cn = CrankNicolson::new(&potential, h, grid.dt, units);
    let mut scratch = vec![Complex::from(T::zero()); n];
    let n_snap = grid.n_snapshots();
    let mut store = Vec::with_capacity(n_snap * n);
    let mut norms = Vec::with_capacity(n_snap);
    let mut peak_density = Vec::with_capacity(n_snap);
    let drift_limit = T::lit(NORM_DRIFT_LIMIT);
    let edge_limit = T::lit(EDGE_DENSITY_LIMIT);

    let mut record = |psi: &[Complex<T>], step: usize| -> Result<()> {
        let norm = discrete_norm(psi, h);
        let drift = (norm - T::one()).abs();
        if drift > drift_limit {
            return Err(Error::Stability { drift: drift.to_f64_lossy() });
        }
        let edge = psi[1].norm_sqr().max(psi[n - 2].norm_sqr());
        if edge > edge_limit {
            return Err(Error::Window { density: edge.to_f64_lossy(), step });
        }
        store.extend_from_slice(psi);
        norms.push(norm);
        peak_density.push(psi.iter().fold(T::zero(), |m, c| m.max(c.norm_sqr())));
        Ok(())
    };
    record(&psi, 0)?;
    for step in 1..=grid.n_t {
        cn.step(&mut psi, &mut scratch);
        if step % grid.stride == 0 {
            record(&psi, step)?;
        }
    }
    Ok(WaveField {
        grid: *grid,
        units: *units,
        psi: store,
        norms,
        peak_density,
        region_ii: region,
        k0: packet.k0,
        broad_spectrum,
    })
}
