//! Units, barrier and incident-wave descriptions, and per-sideband kinematics.

use num_complex::Complex;

use crate::bessel::truncation_order;
use crate::error::invalid;
use crate::profile::PotentialProfile;
use crate::{Error, Result, Scalar};

/// Relative shift callers apply to the incident energy when a sideband lands
/// exactly on the barrier top.
pub const BRANCH_NUDGE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalUnits<T> {
    pub mass: T,
    pub hbar: T,
}

impl<T: Scalar> Default for PhysicalUnits<T> {
    fn default() -> Self {
        Self {
            mass: T::one(),
            hbar: T::one(),
        }
    }
}

impl<T: Scalar> PhysicalUnits<T> {
    pub fn new(mass: T, hbar: T) -> Result<Self> {
        if !(mass > T::zero()) {
            return Err(invalid("mass", "must be positive"));
        }
        if !(hbar > T::zero()) {
            return Err(invalid("hbar", "must be positive"));
        }
        Ok(Self { mass, hbar })
    }

    /// `2m / ħ²`, the factor converting energies to squared wavenumbers.
    pub fn k2_per_energy(&self) -> T {
        T::lit(2.0) * self.mass / (self.hbar * self.hbar)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BarrierKind<T> {
    /// Height `V0` on `[-d/2, d/2]`, zero elsewhere.
    Rectangular { height: T, width: T },
    Smooth(PotentialProfile<T>),
}

/// Static barrier plus a uniform modulation `V1 cos ωt` applied on its support.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierSpec<T> {
    pub kind: BarrierKind<T>,
    pub modulation_amplitude: T,
    pub modulation_frequency: T,
}

impl<T: Scalar> BarrierSpec<T> {
    pub fn rectangular(height: T, width: T) -> Result<Self> {
        if !(height > T::zero()) {
            return Err(invalid("V0", "barrier height must be positive"));
        }
        if !(width > T::zero()) {
            return Err(invalid("d", "barrier width must be positive"));
        }
        Ok(Self {
            kind: BarrierKind::Rectangular { height, width },
            modulation_amplitude: T::zero(),
            modulation_frequency: T::zero(),
        })
    }

    pub fn smooth(profile: PotentialProfile<T>) -> Self {
        Self {
            kind: BarrierKind::Smooth(profile),
            modulation_amplitude: T::zero(),
            modulation_frequency: T::zero(),
        }
    }

    pub fn with_modulation(mut self, amplitude: T, frequency: T) -> Result<Self> {
        if !(amplitude >= T::zero()) {
            return Err(invalid("V1", "modulation amplitude must be non-negative"));
        }
        if amplitude > T::zero() && !(frequency > T::zero()) {
            return Err(invalid("omega", "must be positive when V1 > 0"));
        }
        if frequency < T::zero() {
            return Err(invalid("omega", "must be non-negative"));
        }
        self.modulation_amplitude = amplitude;
        self.modulation_frequency = frequency;
        Ok(self)
    }

    /// `(V0, d)` for rectangular barriers.
    pub fn rect_params(&self) -> Result<(T, T)> {
        match self.kind {
            BarrierKind::Rectangular { height, width } => Ok((height, width)),
            BarrierKind::Smooth(_) => Err(Error::NotRectangular),
        }
    }

    /// Static potential `V0(x)`.
    pub fn potential(&self, x: T) -> T {
        match &self.kind {
            BarrierKind::Rectangular { height, width } => {
                if x.abs() <= *width / T::lit(2.0) {
                    *height
                } else {
                    T::zero()
                }
            }
            BarrierKind::Smooth(p) => p.eval(x),
        }
    }

    /// Bessel argument `V1 / ħω` (zero for a static barrier).
    pub fn modulation_index(&self, units: &PhysicalUnits<T>) -> T {
        if self.modulation_amplitude == T::zero() {
            T::zero()
        } else {
            self.modulation_amplitude / (units.hbar * self.modulation_frequency)
        }
    }

    /// Profile view used by the WKB routines.
    pub fn profile(&self) -> PotentialProfile<T> {
        match &self.kind {
            BarrierKind::Rectangular { height, width } => PotentialProfile::Rectangular {
                height: *height,
                width: *width,
            },
            BarrierKind::Smooth(p) => p.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidentSpec<T> {
    pub energy: T,
    pub k0: T,
}

impl<T: Scalar> IncidentSpec<T> {
    pub fn new(energy: T, units: &PhysicalUnits<T>) -> Result<Self> {
        if !(energy > T::zero()) {
            return Err(invalid("E", "incident energy must be positive"));
        }
        Ok(Self {
            energy,
            k0: (units.k2_per_energy() * energy).sqrt(),
        })
    }
}

/// `E + n ħω`.
pub fn sideband_energy<T: Scalar>(energy: T, n: i32, omega: T, units: &PhysicalUnits<T>) -> T {
    energy + T::from_i32_lossy(n) * units.hbar * omega
}

/// Channel wavenumber; `open` is false for negative energies, in which case
/// `k` is the imaginary continuation and the channel must not be used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumber<T> {
    pub k: Complex<T>,
    pub open: bool,
}

pub fn wavenumber<T: Scalar>(energy: T, units: &PhysicalUnits<T>) -> Result<Wavenumber<T>> {
    if energy == T::zero() {
        return Err(Error::DegenerateChannel);
    }
    let mag = (units.k2_per_energy() * energy.abs()).sqrt();
    Ok(if energy > T::zero() {
        Wavenumber {
            k: Complex::new(mag, T::zero()),
            open: true,
        }
    } else {
        Wavenumber {
            k: Complex::new(T::zero(), mag),
            open: false,
        }
    })
}

/// `κ = sqrt(2m(V0 - E)) / ħ`, continued to `-i sqrt(2m(E - V0)) / ħ` above the
/// barrier so that `e^{-κx}` becomes a right-moving wave.
pub fn decay_constant<T: Scalar>(energy: T, height: T, units: &PhysicalUnits<T>) -> Result<Complex<T>> {
    let gap = height - energy;
    let scale = height.abs().max(energy.abs());
    if gap.abs() <= T::lit(4.0) * T::epsilon() * scale {
        return Err(Error::BranchPoint {
            energy: energy.to_f64_lossy(),
        });
    }
    let mag = (units.k2_per_energy() * gap.abs()).sqrt();
    Ok(if gap > T::zero() {
        Complex::new(mag, T::zero())
    } else {
        Complex::new(T::zero(), -mag)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel<T> {
    pub order: i32,
    pub energy: T,
    pub k: Complex<T>,
    /// Interior decay constant; `None` for smooth barriers or closed channels.
    pub kappa: Option<Complex<T>>,
    pub open: bool,
}

/// Sideband kinematics for orders `-n_eff ..= n_eff`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet<T> {
    pub n_eff: usize,
    pub channels: Vec<Channel<T>>,
}

impl<T: Scalar> ChannelSet<T> {
    /// Builds the channel set; `n_eff = None` picks the adaptive Bessel
    /// truncation for `V1/ħω`.
    pub fn new(
        incident: &IncidentSpec<T>,
        barrier: &BarrierSpec<T>,
        units: &PhysicalUnits<T>,
        n_eff: Option<usize>,
    ) -> Result<Self> {
        let n_eff = n_eff.unwrap_or_else(|| truncation_order(barrier.modulation_index(units)));
        if n_eff > 0 && !(barrier.modulation_frequency > T::zero()) {
            return Err(invalid("omega", "sidebands need a positive modulation frequency"));
        }
        let height = match barrier.kind {
            BarrierKind::Rectangular { height, .. } => Some(height),
            BarrierKind::Smooth(_) => None,
        };
        let n = n_eff as i32;
        let mut channels = Vec::with_capacity(2 * n_eff + 1);
        for order in -n..=n {
            let energy = sideband_energy(incident.energy, order, barrier.modulation_frequency, units);
            if energy <= T::zero() {
                let k = if energy == T::zero() {
                    Complex::new(T::zero(), T::zero())
                } else {
                    wavenumber(energy, units)?.k
                };
                channels.push(Channel {
                    order,
                    energy,
                    k,
                    kappa: None,
                    open: false,
                });
                continue;
            }
            let k = wavenumber(energy, units)?.k;
            let kappa = match height {
                Some(h) => Some(decay_constant(energy, h, units)?),
                None => None,
            };
            channels.push(Channel {
                order,
                energy,
                k,
                kappa,
                open: true,
            });
        }
        Ok(Self { n_eff, channels })
    }

    pub fn open(&self) -> impl Iterator<Item = &Channel<T>> {
        self.channels.iter().filter(|c| c.open)
    }

    pub fn get(&self, order: i32) -> Option<&Channel<T>> {
        self.channels.iter().find(|c| c.order == order)
    }

    pub fn is_open(&self, order: i32) -> bool {
        self.get(order).is_some_and(|c| c.open)
    }

    pub fn k0(&self) -> T {
        self.get(0).map(|c| c.k.re).unwrap_or_else(T::nan)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn units() -> PhysicalUnits<f64> {
        PhysicalUnits::default()
    }

    #[test]
    fn sideband_energy_examples() {
        let u = units();
        assert_eq!(sideband_energy(0.5, 0, 0.1, &u), 0.5);
        assert!((sideband_energy(0.5, 2, 0.1, &u) - 0.7).abs() < 1e-15);
        assert!((sideband_energy(0.5, -1, 0.1, &u) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn wavenumber_examples() {
        let u = units();
        assert_eq!(wavenumber(0.5, &u).unwrap().k.re, 1.0);
        assert_eq!(wavenumber(2.0, &u).unwrap().k.re, 2.0);
        // sqrt(0.9) from mpmath
        assert!((wavenumber(0.45, &u).unwrap().k.re - 0.9486832980505138).abs() < 1e-15);
        assert!(!wavenumber(-0.1, &u).unwrap().open);
        assert_eq!(wavenumber(0.0, &u), Err(Error::DegenerateChannel));
    }

    #[test]
    fn decay_constant_examples() {
        let u = units();
        assert_eq!(decay_constant(0.5, 1.0, &u).unwrap(), Complex::new(1.0, 0.0));
        assert_eq!(decay_constant(0.5, 2.5, &u).unwrap(), Complex::new(2.0, 0.0));
        assert_eq!(decay_constant(1.5, 1.0, &u).unwrap(), Complex::new(0.0, -1.0));
        assert!(matches!(decay_constant(1.0, 1.0, &u), Err(Error::BranchPoint { .. })));
    }

    #[test]
    fn static_channel_set_has_one_open_channel() {
        let u = units();
        let b = BarrierSpec::rectangular(1.0, 2.0).unwrap();
        let inc = IncidentSpec::new(0.5, &u).unwrap();
        let cs = ChannelSet::new(&inc, &b, &u, None).unwrap();
        assert_eq!(cs.open().count(), 1);
        assert_eq!(cs.n_eff, 0);
    }

    #[test]
    fn closed_channels_are_marked() {
        let u = units();
        let b = BarrierSpec::rectangular(1.0, 2.0)
            .unwrap()
            .with_modulation(0.01, 0.2)
            .unwrap();
        let inc = IncidentSpec::new(0.5, &u).unwrap();
        let cs = ChannelSet::new(&inc, &b, &u, Some(4)).unwrap();
        assert!(!cs.is_open(-3));
        assert!(!cs.is_open(-4));
        assert!(cs.is_open(-2));
        // E_{+4} = 1.3 > V0: oscillating interior mode
        assert!(cs.get(4).unwrap().kappa.unwrap().re == 0.0);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(PhysicalUnits::new(0.0, 1.0).is_err());
        assert!(BarrierSpec::rectangular(-1.0, 1.0).is_err());
        assert!(BarrierSpec::rectangular(1.0, 1.0)
            .unwrap()
            .with_modulation(0.1, 0.0)
            .is_err());
        assert!(IncidentSpec::new(0.0, &units()).is_err());
    }
}
