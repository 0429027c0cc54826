//! WKB traversal time and visibility for smooth single-bump barriers.
//!
//! Integrals between turning points use `x = x1 + (x2 − x1) sin²θ` and the
//! factorization `V − E = (x − x1)(x2 − x) g(x)`, with both linear factors
//! taken from `θ` directly. The integrands in `θ` are then smooth at the
//! ends. Rectangular profiles skip root finding and use the constant-`κ`
//! closed forms.

use crate::bessel::bessel_j_upto;
use crate::error::invalid;
use crate::physics::PhysicalUnits;
use crate::profile::PotentialProfile;
use crate::quadrature::{integrate, QuadratureConfig};
use crate::sideband::{traversal_time_from_visibility, TraversalTimeEstimate};
use crate::{Error, Result, Scalar};

/// Damping factor above which the barrier is not considered opaque.
pub const OPAQUE_DAMPING_LIMIT: f64 = 0.1;
/// Modulation index `V1/ħω` above which first-order sidebands are suspect.
pub const SMALL_MODULATION_LIMIT: f64 = 0.2;

const SCAN_POINTS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WkbWarning {
    /// `S_0 > 0.1`.
    NotOpaque,
    /// `V1/ħω > 0.2`.
    LargeModulation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WkbSolution<T> {
    /// Turning points at the incident energy.
    pub x1: T,
    pub x2: T,
    /// `[S_{-1}, S_0, S_{+1}]`.
    pub damping: [T; 3],
    pub sigma_plus: T,
    pub sigma_minus: T,
    pub tau_wkb: T,
    /// `|2 (J1/J0)(Σ_{-1} − Σ_{+1})|`.
    pub visibility: T,
    /// `(V1/ħω) 2 sinh(ω τ_WKB)`.
    pub visibility_opaque: T,
    pub warnings: Vec<WkbWarning>,
}

/// Edges `x1 < x2` of the single interval where `V(x) > E_n`.
pub fn turning_points<T: Scalar>(profile: &PotentialProfile<T>, energy: T) -> Result<(T, T)> {
    if let PotentialProfile::Rectangular { height, width } = profile {
        if energy >= *height {
            return Err(Error::UnsupportedTopology(
                "energy at or above the barrier top".into(),
            ));
        }
        let half = *width / T::lit(2.0);
        return Ok((-half, half));
    }
    let (lo, hi) = profile.domain();
    let f = |x: T| profile.eval(x) - energy;
    if !(f(lo) < T::zero() && f(hi) < T::zero()) {
        return Err(Error::UnsupportedTopology(
            "potential must lie below the energy at both domain ends".into(),
        ));
    }
    let step = (hi - lo) / T::from_usize_lossy(SCAN_POINTS);
    let mut crossings = Vec::new();
    let mut prev_x = lo;
    let mut prev_f = f(lo);
    for j in 1..=SCAN_POINTS {
        let x = if j == SCAN_POINTS { hi } else { lo + step * T::from_usize_lossy(j) };
        let fx = f(x);
        if (prev_f > T::zero()) != (fx > T::zero()) {
            crossings.push((prev_x, x));
        }
        prev_x = x;
        prev_f = fx;
    }
    match crossings.len() {
        0 => Err(Error::UnsupportedTopology("no classically forbidden region".into())),
        2 => {
            let x1 = refine_root(&f, crossings[0].0, crossings[0].1);
            let x2 = refine_root(&f, crossings[1].0, crossings[1].1);
            Ok((x1, x2))
        }
        n => Err(Error::UnsupportedTopology(format!(
            "{} forbidden intervals; only a single barrier is supported",
            n / 2
        ))),
    }
}

/// Root of `f` in the sign-change bracket `[a, b]` to machine precision:
/// secant steps safeguarded by bisection.
fn refine_root<T: Scalar, F: Fn(T) -> T>(f: &F, mut a: T, mut b: T) -> T {
    let mut fa = f(a);
    let mut fb = f(b);
    let two = T::lit(2.0);
    for iter in 0..400 {
        if fa == T::zero() {
            return a;
        }
        if fb == T::zero() {
            return b;
        }
        let mid = (a + b) / two;
        if mid <= a.min(b) || mid >= a.max(b) {
            break;
        }
        // every third step is a plain bisection so the bracket must shrink
        let x = if iter % 3 == 2 {
            mid
        } else {
            let s = b - fb * (b - a) / (fb - fa);
            if s > a.min(b) && s < a.max(b) { s } else { mid }
        };
        let fx = f(x);
        if (fx > T::zero()) == (fa > T::zero()) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    if fa.abs() <= fb.abs() { a } else { b }
}

/// `∫_0^{π/2} w(θ, s, c, g) dθ` where `s = sin²θ`, `c = cos²θ` and
/// `g = |V − E| / ((x − x1)(x2 − x))`.
fn factored<T: Scalar, W: Fn(T, T, T) -> T>(
    profile: &PotentialProfile<T>,
    energy: T,
    x1: T,
    x2: T,
    weight: W,
    cfg: &QuadratureConfig,
) -> Result<T> {
    let span = x2 - x1;
    let q = integrate(
        |theta: T| {
            let sn = theta.sin();
            let cs = theta.cos();
            let (s, c) = (sn * sn, cs * cs);
            let x = if s <= c { x1 + span * s } else { x2 - span * c };
            let g = (profile.eval(x) - energy).abs() / (span * span * s * c);
            weight(s, c, g)
        },
        T::zero(),
        T::FRAC_PI_2(),
        cfg,
    )?;
    Ok(q.value)
}

/// `∫_{x1}^{x2} κ_n(x) dx`.
pub fn penetration_integral<T: Scalar>(
    profile: &PotentialProfile<T>,
    energy: T,
    x1: T,
    x2: T,
    units: &PhysicalUnits<T>,
    cfg: &QuadratureConfig,
) -> Result<T> {
    if let PotentialProfile::Rectangular { height, .. } = profile {
        return Ok((units.k2_per_energy() * (*height - energy)).sqrt() * (x2 - x1));
    }
    // κ near the turning points carries cancellation noise of order
    // sqrt(k² ε E); tighter absolute tolerances than that cannot be met
    let noise = (units.k2_per_energy() * T::epsilon() * energy.abs()).sqrt() * (x2 - x1).abs();
    let cfg = QuadratureConfig {
        abs_tol: cfg.abs_tol.max(noise.to_f64_lossy()),
        ..*cfg
    };
    let k2 = units.k2_per_energy();
    let span2 = (x2 - x1) * (x2 - x1);
    // κ dx = Δ² · 2 sin²θ cos²θ · sqrt(k² g) dθ
    factored(
        profile,
        energy,
        x1,
        x2,
        |s, c, g| span2 * T::lit(2.0) * s * c * (k2 * g).sqrt(),
        &cfg,
    )
}

/// `S_n = exp(−∫ κ_n dx)` between the turning points for `E_n`.
pub fn damping_factor<T: Scalar>(
    profile: &PotentialProfile<T>,
    energy: T,
    x1: T,
    x2: T,
    units: &PhysicalUnits<T>,
) -> Result<T> {
    if !(x2 >= x1) {
        return Err(invalid("turning points", "x1 must not exceed x2"));
    }
    let integral = penetration_integral(profile, energy, x1, x2, units, &QuadratureConfig::default())?;
    Ok((-integral).exp())
}

/// `(Σ_{+1}, Σ_{-1})` with `Σ_{±1} = ((4 + S0²)/(4 + S_{±1}²)) (S_{±1}/S0)`.
pub fn sigma_factors<T: Scalar>(s0: T, s_plus: T, s_minus: T) -> Result<(T, T)> {
    for (name, s) in [("S0", s0), ("S+1", s_plus), ("S-1", s_minus)] {
        if !(s > T::zero() && s <= T::one()) {
            return Err(invalid("damping", format!("{name} = {s} outside (0, 1]")));
        }
    }
    let four = T::lit(4.0);
    let sigma = |s: T| (four + s0 * s0) / (four + s * s) * (s / s0);
    Ok((sigma(s_plus), sigma(s_minus)))
}

/// `τ_WKB = (m/ħ) ∫ dx / κ_0(x)` with a caller-chosen quadrature tolerance.
pub fn wkb_traversal_time_with<T: Scalar>(
    profile: &PotentialProfile<T>,
    energy: T,
    units: &PhysicalUnits<T>,
    cfg: &QuadratureConfig,
) -> Result<T> {
    let (x1, x2) = turning_points(profile, energy)?;
    if let PotentialProfile::Rectangular { height, width } = profile {
        let kappa = (units.k2_per_energy() * (*height - energy)).sqrt();
        return Ok(units.mass * *width / (units.hbar * kappa));
    }
    let k2 = units.k2_per_energy();
    // dx / κ = 2 dθ / sqrt(k² g)
    let integral = factored(profile, energy, x1, x2, |_, _, g| T::lit(2.0) / (k2 * g).sqrt(), cfg)?;
    Ok(units.mass / units.hbar * integral)
}

pub fn wkb_traversal_time<T: Scalar>(
    profile: &PotentialProfile<T>,
    energy: T,
    units: &PhysicalUnits<T>,
) -> Result<T> {
    wkb_traversal_time_with(profile, energy, units, &QuadratureConfig::default())
}

/// WKB sideband analysis: damping factors for `n = -1, 0, +1`, `Σ_{±1}`,
/// and the visibility in both its `Σ` form and the opaque `sinh` form.
pub fn wkb_visibility<T: Scalar>(
    profile: &PotentialProfile<T>,
    energy: T,
    amplitude: T,
    omega: T,
    units: &PhysicalUnits<T>,
) -> Result<WkbSolution<T>> {
    if !(amplitude >= T::zero()) {
        return Err(invalid("V1", "must be non-negative"));
    }
    if !(omega > T::zero()) {
        return Err(invalid("omega", "must be positive"));
    }
    let quantum = units.hbar * omega;
    if !(energy - quantum > T::zero()) {
        return Err(Error::ChannelClosed {
            order: -1,
            energy: (energy - quantum).to_f64_lossy(),
        });
    }
    let mut damping = [T::zero(); 3];
    let mut turning = (T::zero(), T::zero());
    for (slot, n) in [-1i32, 0, 1].into_iter().enumerate() {
        let e_n = energy + T::from_i32_lossy(n) * quantum;
        let (x1, x2) = turning_points(profile, e_n)?;
        if n == 0 {
            turning = (x1, x2);
        }
        damping[slot] = damping_factor(profile, e_n, x1, x2, units)?;
    }
    let [s_minus, s0, s_plus] = damping;
    if !(s_minus <= s0 && s0 <= s_plus) {
        return Err(Error::Invariant(format!(
            "damping factors out of order: S-1={s_minus:e}, S0={s0:e}, S+1={s_plus:e}"
        )));
    }
    let (sigma_plus, sigma_minus) = sigma_factors(s0, s_plus, s_minus)?;
    let tau_wkb = wkb_traversal_time(profile, energy, units)?;

    let z = amplitude / quantum;
    let j = bessel_j_upto(1, z);
    let visibility = (T::lit(2.0) * j[1] / j[0] * (sigma_minus - sigma_plus)).abs();
    let visibility_opaque = z * T::lit(2.0) * (omega * tau_wkb).sinh();

    let mut warnings = Vec::new();
    if s0 > T::lit(OPAQUE_DAMPING_LIMIT) {
        warnings.push(WkbWarning::NotOpaque);
    }
    if z > T::lit(SMALL_MODULATION_LIMIT) {
        warnings.push(WkbWarning::LargeModulation);
    }
    Ok(WkbSolution {
        x1: turning.0,
        x2: turning.1,
        damping,
        sigma_plus,
        sigma_minus,
        tau_wkb,
        visibility,
        visibility_opaque,
        warnings,
    })
}

/// Traversal time from a measured visibility: low-frequency `ħ I_vis / 2V1`
/// together with the `asinh` inversion.
pub fn wkb_tau_from_visibility<T: Scalar>(
    visibility: T,
    amplitude: T,
    omega: T,
    units: &PhysicalUnits<T>,
) -> Result<TraversalTimeEstimate<T>> {
    traversal_time_from_visibility(visibility, amplitude, omega, units)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn units() -> PhysicalUnits<f64> {
        PhysicalUnits::default()
    }

    #[test]
    fn rectangular_turning_points_are_edges() {
        let p = PotentialProfile::Rectangular { height: 1.0, width: 2.0 };
        assert_eq!(turning_points(&p, 0.5).unwrap(), (-1.0, 1.0));
        assert!(turning_points(&p, 1.0).is_err());
    }

    #[test]
    fn sampled_step_turning_points() {
        // rectangle as dense step samples
        let xs: Vec<f64> = (0..=400).map(|i| -2.0 + i as f64 * 0.01).collect();
        let vs: Vec<f64> = xs.iter().map(|x| if x.abs() <= 1.0 { 1.0 } else { 0.0 }).collect();
        let p = PotentialProfile::Sampled(crate::SampledProfile::new(xs, vs).unwrap());
        let (x1, x2) = turning_points(&p, 0.5).unwrap();
        assert!((x1 + 1.0).abs() < 0.01 && (x2 - 1.0).abs() < 0.01);
    }

    #[test]
    fn double_bump_is_rejected() {
        let xs: Vec<f64> = (0..=200).map(|i| -5.0 + i as f64 * 0.05).collect();
        let vs: Vec<f64> = xs
            .iter()
            .map(|x| (-(x - 2.0) * (x - 2.0)).exp() + (-(x + 2.0) * (x + 2.0)).exp())
            .collect();
        let p = PotentialProfile::Sampled(crate::SampledProfile::new(xs, vs).unwrap());
        assert!(matches!(turning_points(&p, 0.5), Err(Error::UnsupportedTopology(_))));
    }

    #[test]
    fn above_barrier_energy_is_rejected() {
        let g = PotentialProfile::Gaussian { height: 1.0, width: 1.0 };
        assert!(matches!(turning_points(&g, 1.2), Err(Error::UnsupportedTopology(_))));
    }

    #[test]
    fn rectangular_damping_factor() {
        let p = PotentialProfile::Rectangular { height: 1.0, width: 2.0 };
        let s = damping_factor(&p, 0.5, -1.0, 1.0, &units()).unwrap();
        assert!((s - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn damping_tends_to_one_near_barrier_top() {
        let g = PotentialProfile::Gaussian { height: 1.0, width: 1.0 };
        let e = 1.0 - 1e-8;
        let (x1, x2) = turning_points(&g, e).unwrap();
        let s = damping_factor(&g, e, x1, x2, &units()).unwrap();
        assert!(s > 0.9999);
    }

    #[test]
    fn sigma_examples() {
        let (p, m) = sigma_factors(0.3f64, 0.3, 0.3).unwrap();
        assert!((p - 1.0).abs() < 1e-15 && (m - 1.0).abs() < 1e-15);
        let (p, m) = sigma_factors(0.1f64, 0.2, 0.05).unwrap();
        // (4.01/4.04)*2 and (4.01/4.0025)*0.5 in exact rational arithmetic
        assert!((p - 802.0 / 404.0).abs() < 1e-14);
        assert!((m - 200.5 / 400.25).abs() < 1e-14);
        assert!(sigma_factors(0.0, 0.1, 0.1).is_err());
    }

    #[test]
    fn wkb_tau_examples() {
        let u = units();
        let est = wkb_tau_from_visibility(0.04, 0.01, 0.01, &u).unwrap();
        assert!((est.tau_low_frequency - 2.0).abs() < 1e-14);
        assert_eq!(wkb_tau_from_visibility(0.0, 0.01, 0.1, &u).unwrap().tau, 0.0);
        assert!(wkb_tau_from_visibility(0.1, 0.0, 0.1, &u).is_err());
    }

    #[test]
    fn rectangular_traversal_time() {
        let u = units();
        let p = PotentialProfile::Rectangular { height: 1.0, width: 2.0 };
        assert!((wkb_traversal_time(&p, 0.5, &u).unwrap() - 2.0).abs() < 1e-15);
        let p = PotentialProfile::Rectangular { height: 2.5, width: 3.0 };
        assert!((wkb_traversal_time(&p, 0.5, &u).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn zero_modulation_gives_zero_visibility() {
        let p = PotentialProfile::Rectangular { height: 1.0, width: 2.0 };
        let s = wkb_visibility(&p, 0.5, 0.0, 0.1, &units()).unwrap();
        assert_eq!(s.visibility, 0.0);
        assert_eq!(s.visibility_opaque, 0.0);
    }

    #[test]
    fn rectangular_opaque_visibility_example() {
        let p = PotentialProfile::Rectangular { height: 1.0, width: 2.0 };
        let s = wkb_visibility(&p, 0.5, 0.01, 0.4, &units()).unwrap();
        let want = 0.01 / 0.4 * 2.0 * (0.4f64 * 2.0).sinh();
        assert!((s.visibility_opaque - want).abs() < 1e-14);
        assert!(s.warnings.contains(&WkbWarning::NotOpaque));
    }
}
