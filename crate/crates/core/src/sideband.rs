//! Floquet-sideband scattering off a rectangular barrier whose height
//! oscillates as `V0 + V1 cos ωt`, the resulting time-dependent transmitted
//! current, its visibility, and the traversal time read off from it.
//!
//! Inside the barrier every Floquet component at energy `E_n` is built from
//! static solutions at `E_m` weighted by `J_{n-m}(V1/ħω)`. Outside the barrier
//! each open channel carries one reflected (`A_n`) and one transmitted (`D_n`)
//! plane wave; the incident wave lives in channel 0 only.

use num_complex::Complex;

use crate::bessel::bessel_j_upto;
use crate::error::invalid;
use crate::linalg::{solve_checked, ComplexMatrix};
use crate::physics::{BarrierSpec, ChannelSet, IncidentSpec, PhysicalUnits, BRANCH_NUDGE};
use crate::{sinhc, Error, Result, Scalar};

/// Below this `|κ| d` the interior basis switches from scaled exponentials to
/// `cosh κx, sinh(κx)/κ`, which stay independent as `κ → 0`.
const HYPERBOLIC_BASIS_BELOW: f64 = 0.5;

/// Samples per modulation period when locating current extrema.
const EXTREMA_SAMPLES: usize = 2048;

/// Above this `ωτ` the low-frequency form `τ ≈ ħ I_vis / 2V1` is unreliable.
pub const LOW_FREQUENCY_LIMIT: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    LeadingOrder,
    FullMatching,
}

/// Amplitudes aligned index-by-index with `channels.channels`; closed
/// channels carry zeros.
#[derive(Debug, Clone)]
pub struct ScatteringSolution<T> {
    pub channels: ChannelSet<T>,
    pub reflection: Vec<Complex<T>>,
    pub transmission: Vec<Complex<T>>,
    /// Interior coefficients of `e^{κ_m x}`; empty for the leading-order method.
    pub interior_b: Vec<Complex<T>>,
    /// Interior coefficients of `e^{-κ_m x}`.
    pub interior_c: Vec<Complex<T>>,
    pub method: SolveMethod,
    /// Reciprocal 1-norm condition number of the matching system.
    pub rcond: Option<T>,
    pub units: PhysicalUnits<T>,
    pub width: T,
    pub modulation_amplitude: T,
    pub modulation_frequency: T,
}

fn zero<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

fn real<T: Scalar>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

fn i_unit<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

impl<T: Scalar> ScatteringSolution<T> {
    fn index(&self, order: i32) -> Option<usize> {
        self.channels.channels.iter().position(|c| c.order == order && c.open)
    }

    pub fn reflection(&self, order: i32) -> Option<Complex<T>> {
        self.index(order).map(|i| self.reflection[i])
    }

    pub fn transmission(&self, order: i32) -> Option<Complex<T>> {
        self.index(order).map(|i| self.transmission[i])
    }

    /// Retained orders dropped from the solve because `E_n ≤ 0`; flux is only
    /// conserved exactly when this is empty.
    pub fn closed_orders(&self) -> Vec<i32> {
        self.channels.channels.iter().filter(|c| !c.open).map(|c| c.order).collect()
    }

    pub fn k0(&self) -> T {
        self.channels.k0()
    }

    /// `Σ_open (k_n/k0)(|A_n|² + |D_n|²)`; unity for an exact solution.
    pub fn flux_sum(&self) -> T {
        let k0 = self.k0();
        self.channels
            .channels
            .iter()
            .enumerate()
            .filter(|(_, c)| c.open)
            .map(|(i, c)| c.k.re / k0 * (self.reflection[i].norm_sqr() + self.transmission[i].norm_sqr()))
            .fold(T::zero(), |a, b| a + b)
    }
}

/// `det(k, κ) = 2(κ² − k²) sinh κd − 4ikκ cosh κd`.
pub fn matching_determinant<T: Scalar>(k: Complex<T>, kappa: Complex<T>, width: T) -> Complex<T> {
    let kd = kappa * width;
    (kappa * kappa - k * k) * kd.sinh() * T::lit(2.0) - i_unit::<T>() * k * kappa * kd.cosh() * T::lit(4.0)
}

/// Static reflection and transmission amplitudes `(A0, D0)`.
pub fn static_coefficients<T: Scalar>(
    energy: T,
    barrier: &BarrierSpec<T>,
    units: &PhysicalUnits<T>,
) -> Result<(Complex<T>, Complex<T>)> {
    let (height, width) = barrier.rect_params()?;
    let inc = IncidentSpec::new(energy, units)?;
    let kappa = crate::physics::decay_constant(energy, height, units)?;
    Ok(static_from_wavenumbers(real(inc.k0), kappa, width))
}

fn static_from_wavenumbers<T: Scalar>(k: Complex<T>, kappa: Complex<T>, width: T) -> (Complex<T>, Complex<T>) {
    let det = matching_determinant(k, kappa, width);
    let phase = (-i_unit::<T>() * k * width).exp();
    let a0 = -(k * k + kappa * kappa) * (kappa * width).sinh() * phase * T::lit(2.0) / det;
    let d0 = -i_unit::<T>() * k * kappa * phase * T::lit(4.0) / det;
    (a0, d0)
}

/// First-order-in-`V1` sideband amplitudes `(A_n, D_n)` for `|n| ≥ 1`.
pub fn leading_order_amplitudes<T: Scalar>(
    order: i32,
    barrier: &BarrierSpec<T>,
    channels: &ChannelSet<T>,
    units: &PhysicalUnits<T>,
) -> Result<(Complex<T>, Complex<T>)> {
    if order == 0 {
        return Err(invalid("n", "order 0 is the static channel; use static_coefficients"));
    }
    let (_, width) = barrier.rect_params()?;
    let ch0 = channels.get(0).filter(|c| c.open).ok_or(Error::ChannelClosed {
        order: 0,
        energy: f64::NAN,
    })?;
    let chn = channels.get(order).ok_or_else(|| invalid("n", "order outside the channel set"))?;
    if !chn.open {
        return Err(Error::ChannelClosed {
            order,
            energy: chn.energy.to_f64_lossy(),
        });
    }
    let (k0, kappa0) = (ch0.k, ch0.kappa.ok_or(Error::NotRectangular)?);
    let (kn, kappan) = (chn.k, chn.kappa.ok_or(Error::NotRectangular)?);
    let (_, d0) = static_from_wavenumbers(k0, kappa0, width);

    let z = barrier.modulation_index(units);
    let m = order.unsigned_abs() as usize;
    let jv = bessel_j_upto(m, z);
    let mut jn = jv[m];
    if order < 0 && m % 2 == 1 {
        jn = -jn;
    }
    let ratio = jn / jv[0];

    let i = i_unit::<T>();
    let two = T::lit(2.0);
    let one = real(T::one());
    let (sh0, ch0d) = ((kappa0 * width).sinh(), (kappa0 * width).cosh());
    let (shn, chnd) = ((kappan * width).sinh(), (kappan * width).cosh());
    let det = matching_determinant(kn, kappan, width);
    let pre = d0 * (i * (k0 - kn) * width / two).exp() * ratio / det;

    let d_brace = (kappan * kappan - kn * k0) * shn - (kappa0 * kappa0 - kn * k0) * (kappan / kappa0) * sh0
        + i * kappan * (kn + k0) * (ch0d - chnd);
    let a_brace = (kappan * kappan + kn * k0) * shn * ch0d
        - (kappa0 * kappa0 + kn * k0) * (kappan / kappa0) * chnd * sh0
        - i * kappan * (k0 - kn) * (one - chnd * ch0d)
        - i * (k0 * kappan * kappan / kappa0 - kn * kappa0) * shn * sh0;
    Ok((pre * a_brace * two, pre * d_brace * two))
}

/// Static solution for channel 0 plus leading-order amplitudes for every
/// other open channel.
pub fn leading_order_solve<T: Scalar>(
    barrier: &BarrierSpec<T>,
    channels: &ChannelSet<T>,
    units: &PhysicalUnits<T>,
) -> Result<ScatteringSolution<T>> {
    let (_, width) = barrier.rect_params()?;
    let mut reflection = vec![zero(); channels.channels.len()];
    let mut transmission = vec![zero(); channels.channels.len()];
    for (idx, ch) in channels.channels.iter().enumerate() {
        if !ch.open {
            continue;
        }
        let (a, d) = if ch.order == 0 {
            static_from_wavenumbers(ch.k, ch.kappa.ok_or(Error::NotRectangular)?, width)
        } else {
            leading_order_amplitudes(ch.order, barrier, channels, units)?
        };
        reflection[idx] = a;
        transmission[idx] = d;
    }
    Ok(ScatteringSolution {
        channels: channels.clone(),
        reflection,
        transmission,
        interior_b: Vec::new(),
        interior_c: Vec::new(),
        method: SolveMethod::LeadingOrder,
        rcond: None,
        units: *units,
        width,
        modulation_amplitude: barrier.modulation_amplitude,
        modulation_frequency: barrier.modulation_frequency,
    })
}

/// Interior basis pair for one mode: values and derivatives at `x = -d/2`
/// and `x = +d/2`, plus the map back to `(B, C)` coefficients.
struct ModeBasis<T> {
    left: [[Complex<T>; 2]; 2],
    right: [[Complex<T>; 2]; 2],
    exponential: bool,
}

impl<T: Scalar> ModeBasis<T> {
    fn new(kappa: Complex<T>, width: T) -> Self {
        let half = width / T::lit(2.0);
        if kappa.norm() * width >= T::lit(HYPERBOLIC_BASIS_BELOW) {
            // e^{κ(x - d/2)}, e^{-κ(x + d/2)}
            let e = (-kappa * width).exp();
            let one = real(T::one());
            Self {
                left: [[e, one], [kappa * e, -kappa]],
                right: [[one, e], [kappa, -kappa * e]],
                exponential: true,
            }
        } else {
            // cosh κx, sinh(κx)/κ
            let c = (kappa * half).cosh();
            let s = sinhc(kappa * half) * half;
            let k2s = kappa * kappa * s;
            Self {
                left: [[c, -s], [-k2s, c]],
                right: [[c, s], [k2s, c]],
                exponential: false,
            }
        }
    }

    fn to_bc(&self, p: Complex<T>, q: Complex<T>, kappa: Complex<T>, width: T) -> (Complex<T>, Complex<T>) {
        let two = T::lit(2.0);
        if self.exponential {
            let s = (-kappa * width / two).exp();
            (p * s, q * s)
        } else {
            ((p + q / kappa) / two, (p - q / kappa) / two)
        }
    }
}

/// Solves the full matching problem: continuity of `Ψ` and `Ψ'` at both
/// barrier edges for every retained open channel.
pub fn full_matching_solve<T: Scalar>(
    barrier: &BarrierSpec<T>,
    channels: &ChannelSet<T>,
    units: &PhysicalUnits<T>,
) -> Result<ScatteringSolution<T>> {
    let (_, width) = barrier.rect_params()?;
    let open: Vec<usize> = channels
        .channels
        .iter()
        .enumerate()
        .filter(|(_, c)| c.open)
        .map(|(i, _)| i)
        .collect();
    let ch0_pos = open
        .iter()
        .position(|&i| channels.channels[i].order == 0)
        .ok_or(Error::ChannelClosed {
            order: 0,
            energy: f64::NAN,
        })?;
    let n_open = open.len();
    let z = barrier.modulation_index(units);
    let jv = bessel_j_upto(2 * channels.n_eff, z);
    let bessel = |l: i32| -> T {
        let m = l.unsigned_abs() as usize;
        if l < 0 && m % 2 == 1 {
            -jv[m]
        } else {
            jv[m]
        }
    };

    let bases: Vec<ModeBasis<T>> = open
        .iter()
        .map(|&i| {
            let kappa = channels.channels[i].kappa.ok_or(Error::NotRectangular)?;
            Ok(ModeBasis::new(kappa, width))
        })
        .collect::<Result<_>>()?;

    let half = width / T::lit(2.0);
    let i = i_unit::<T>();
    let dim = 4 * n_open;
    let mut mat = ComplexMatrix::zeros(dim);
    let mut rhs = vec![zero(); dim];
    for (row_ch, &ci) in open.iter().enumerate() {
        let ch = &channels.channels[ci];
        let r = 4 * row_ch;
        for (col_ch, &cj) in open.iter().enumerate() {
            let jw = bessel(ch.order - channels.channels[cj].order);
            if jw == T::zero() {
                continue;
            }
            let b = &bases[col_ch];
            for q in 0..2 {
                let col = 4 * col_ch + 2 + q;
                mat.add(r, col, b.left[0][q] * jw);
                mat.add(r + 1, col, b.left[1][q] * jw);
                mat.add(r + 2, col, b.right[0][q] * jw);
                mat.add(r + 3, col, b.right[1][q] * jw);
            }
        }
        let ph = (i * ch.k * half).exp();
        mat.set(r, 4 * row_ch, -ph);
        mat.set(r + 1, 4 * row_ch, i * ch.k * ph);
        mat.set(r + 2, 4 * row_ch + 1, -ph);
        mat.set(r + 3, 4 * row_ch + 1, -i * ch.k * ph);
        if ch.order == 0 {
            let inc = (-i * ch.k * half).exp();
            rhs[r] = inc;
            rhs[r + 1] = i * ch.k * inc;
        }
    }
    debug_assert!(ch0_pos < n_open);
    let (x, rcond) = solve_checked(&mat, &rhs)?;

    let len = channels.channels.len();
    let mut reflection = vec![zero(); len];
    let mut transmission = vec![zero(); len];
    let mut interior_b = vec![zero(); len];
    let mut interior_c = vec![zero(); len];
    for (col_ch, &ci) in open.iter().enumerate() {
        reflection[ci] = x[4 * col_ch];
        transmission[ci] = x[4 * col_ch + 1];
        let kappa = channels.channels[ci].kappa.ok_or(Error::NotRectangular)?;
        let (b, c) = bases[col_ch].to_bc(x[4 * col_ch + 2], x[4 * col_ch + 3], kappa, width);
        interior_b[ci] = b;
        interior_c[ci] = c;
    }
    Ok(ScatteringSolution {
        channels: channels.clone(),
        reflection,
        transmission,
        interior_b,
        interior_c,
        method: SolveMethod::FullMatching,
        rcond: Some(rcond),
        units: *units,
        width,
        modulation_amplitude: barrier.modulation_amplitude,
        modulation_frequency: barrier.modulation_frequency,
    })
}

/// Builds the channel set and solves, nudging the incident energy by
/// [`BRANCH_NUDGE`] when a sideband lands on the barrier top. The flag reports
/// whether the nudge was applied.
pub fn solve_rectangular<T: Scalar>(
    energy: T,
    barrier: &BarrierSpec<T>,
    units: &PhysicalUnits<T>,
    n_eff: Option<usize>,
    method: SolveMethod,
) -> Result<(ScatteringSolution<T>, bool)> {
    let attempt = |e: T| -> Result<ScatteringSolution<T>> {
        let inc = IncidentSpec::new(e, units)?;
        let channels = ChannelSet::new(&inc, barrier, units, n_eff)?;
        match method {
            SolveMethod::FullMatching => full_matching_solve(barrier, &channels, units),
            SolveMethod::LeadingOrder => leading_order_solve(barrier, &channels, units),
        }
    };
    match attempt(energy) {
        Err(Error::BranchPoint { .. }) => {
            attempt(energy * (T::one() + T::lit(BRANCH_NUDGE))).map(|s| (s, true))
        }
        other => other.map(|s| (s, false)),
    }
}

/// `T̄ = Σ_open (k_n/k0)|D_n|²`, summed over every retained open channel.
pub fn time_averaged_transmission<T: Scalar>(sol: &ScatteringSolution<T>) -> T {
    let k0 = sol.k0();
    sol.channels
        .channels
        .iter()
        .enumerate()
        .filter(|(_, c)| c.open)
        .map(|(i, c)| c.k.re / k0 * sol.transmission[i].norm_sqr())
        .fold(T::zero(), |a, b| a + b)
}

/// Default detection point `d/2 + 10/k0`.
pub fn default_observation_point<T: Scalar>(sol: &ScatteringSolution<T>) -> T {
    sol.width / T::lit(2.0) + T::lit(10.0) / sol.k0()
}

/// Transmitted current at `x = L` from the interference of channels
/// `n ∈ {-1, 0, +1}`, normalised to the incident current.
pub fn transmitted_current<T: Scalar>(sol: &ScatteringSolution<T>, position: T, time: T) -> Result<T> {
    if position < sol.width / T::lit(2.0) {
        return Err(invalid("L", "observation point must lie beyond the right barrier edge"));
    }
    Ok(current_at(sol, position, time))
}

fn current_at<T: Scalar>(sol: &ScatteringSolution<T>, position: T, time: T) -> T {
    let i = i_unit::<T>();
    let mut flux = zero::<T>();
    let mut amp = zero::<T>();
    for (idx, ch) in sol.channels.channels.iter().enumerate() {
        if !ch.open || ch.order.abs() > 1 {
            continue;
        }
        let theta = ch.k.re * position - ch.energy * time / sol.units.hbar;
        let wave = sol.transmission[idx] * (i * theta).exp();
        flux += wave * ch.k.re;
        amp += wave;
    }
    (flux.conj() * amp).re / sol.k0()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityReading<T> {
    /// `(T_max − T_min)/(T_max + T_min)` from the sampled current.
    pub visibility: T,
    /// `(1/k0)((k0+k_{+1})|D_{+1}/D_0| + (k0+k_{-1})|D_{-1}/D_0|)`.
    pub closed_form: T,
    pub t_max: T,
    pub t_min: T,
    /// `arg(D_{+1}/D_0) + (k_{+1} − k0) L`.
    pub phase: T,
    pub observation_point: T,
}

/// Visibility of the transmitted current at `L` over one modulation period.
pub fn visibility<T: Scalar>(sol: &ScatteringSolution<T>, position: T) -> Result<VisibilityReading<T>> {
    if position < sol.width / T::lit(2.0) {
        return Err(invalid("L", "observation point must lie beyond the right barrier edge"));
    }
    let d0 = sol.transmission(0).ok_or(Error::ChannelClosed {
        order: 0,
        energy: f64::NAN,
    })?;
    let k0 = sol.k0();
    if sol.modulation_amplitude == T::zero() {
        let t = current_at(sol, position, T::zero());
        return Ok(VisibilityReading {
            visibility: T::zero(),
            closed_form: T::zero(),
            t_max: t,
            t_min: t,
            phase: T::zero(),
            observation_point: position,
        });
    }
    let plus = sol.transmission(1);
    let minus = sol.transmission(-1);
    if plus.is_none() && minus.is_none() {
        return Err(Error::ChannelClosed {
            order: 1,
            energy: f64::NAN,
        });
    }
    let k_of = |n: i32| sol.channels.get(n).map(|c| c.k.re).unwrap_or_else(T::zero);
    let mut closed_form = T::zero();
    if let Some(dp) = plus {
        closed_form += (k0 + k_of(1)) * (dp / d0).norm() / k0;
    }
    if let Some(dm) = minus {
        closed_form += (k0 + k_of(-1)) * (dm / d0).norm() / k0;
    }
    let phase = plus
        .map(|dp| (dp / d0).arg() + (k_of(1) - k0) * position)
        .unwrap_or_else(T::zero);

    let period = T::lit(2.0) * T::PI() / sol.modulation_frequency;
    let dt = period / T::from_usize_lossy(EXTREMA_SAMPLES);
    let samples: Vec<T> = (0..EXTREMA_SAMPLES)
        .map(|j| current_at(sol, position, dt * T::from_usize_lossy(j)))
        .collect();
    let t_max = refine_extremum(&samples, true);
    let t_min = refine_extremum(&samples, false);
    let sum = t_max + t_min;
    if sum == T::zero() {
        return Err(Error::Degenerate("T_max + T_min vanishes"));
    }
    Ok(VisibilityReading {
        visibility: (t_max - t_min) / sum,
        closed_form,
        t_max,
        t_min,
        phase,
        observation_point: position,
    })
}

/// Parabolic refinement of the discrete extremum of a periodic sequence.
fn refine_extremum<T: Scalar>(samples: &[T], maximum: bool) -> T {
    let n = samples.len();
    let better = |a: T, b: T| if maximum { a > b } else { a < b };
    let mut best = 0;
    for (j, &v) in samples.iter().enumerate() {
        if better(v, samples[best]) {
            best = j;
        }
    }
    let (ym, y0, yp) = (samples[(best + n - 1) % n], samples[best], samples[(best + 1) % n]);
    let curvature = ym - T::lit(2.0) * y0 + yp;
    if curvature == T::zero() {
        return y0;
    }
    let shift = (ym - yp) / (T::lit(2.0) * curvature);
    y0 - (ym - yp) * shift / T::lit(4.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraversalTimeEstimate<T> {
    /// `(1/ω) asinh(ħω I_vis / 2V1)`.
    pub tau: T,
    /// `ħ I_vis / 2V1`.
    pub tau_low_frequency: T,
    /// Set when `ωτ` exceeds [`LOW_FREQUENCY_LIMIT`].
    pub low_frequency_unreliable: bool,
}

/// Inverts the opaque-barrier visibility law `I_vis = (2V1/ħω) sinh ωτ`.
pub fn traversal_time_from_visibility<T: Scalar>(
    visibility: T,
    amplitude: T,
    omega: T,
    units: &PhysicalUnits<T>,
) -> Result<TraversalTimeEstimate<T>> {
    if amplitude == T::zero() {
        return Err(Error::ZeroModulation);
    }
    if !(visibility >= T::zero()) {
        return Err(invalid("I_vis", "visibility must be non-negative"));
    }
    if !(amplitude > T::zero()) {
        return Err(invalid("V1", "must be positive"));
    }
    if !(omega > T::zero()) {
        return Err(invalid("omega", "must be positive"));
    }
    let two = T::lit(2.0);
    let tau = (units.hbar * omega * visibility / (two * amplitude)).asinh() / omega;
    Ok(TraversalTimeEstimate {
        tau,
        tau_low_frequency: units.hbar * visibility / (two * amplitude),
        low_frequency_unreliable: omega * tau > T::lit(LOW_FREQUENCY_LIMIT),
    })
}

/// `(k_{-1}T_{+1} − k_{+1}T_{-1}) / (k_{-1}T_{+1} + k_{+1}T_{-1})` with
/// `T_{±1} = (k_{±1}/k0)|D_{±1}|²`.
pub fn sideband_asymmetry<T: Scalar>(sol: &ScatteringSolution<T>) -> Result<T> {
    let closed = |order: i32| Error::ChannelClosed {
        order,
        energy: sol
            .channels
            .get(order)
            .map(|c| c.energy.to_f64_lossy())
            .unwrap_or(f64::NAN),
    };
    let dp = sol.transmission(1).ok_or_else(|| closed(1))?;
    let dm = sol.transmission(-1).ok_or_else(|| closed(-1))?;
    let k0 = sol.k0();
    let kp = sol.channels.get(1).map(|c| c.k.re).ok_or_else(|| closed(1))?;
    let km = sol.channels.get(-1).map(|c| c.k.re).ok_or_else(|| closed(-1))?;
    let tp = kp / k0 * dp.norm_sqr();
    let tm = km / k0 * dm.norm_sqr();
    let den = km * tp + kp * tm;
    if den == T::zero() {
        return Err(Error::Degenerate("both sideband intensities vanish"));
    }
    Ok((km * tp - kp * tm) / den)
}
