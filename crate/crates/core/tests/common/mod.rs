#![allow(dead_code)]

use num_complex::Complex64;
use statrs::function::erf::erf;

/// Freely spreading Gaussian with `m = ħ = 1`, started as
/// `(2πσ²)^(-1/4) exp(−(x−x0)²/4σ² + i k0 x)`.
pub struct FreeGaussian {
    pub x0: f64,
    pub sigma: f64,
    pub k0: f64,
}

impl FreeGaussian {
    pub fn psi(&self, x: f64, t: f64) -> Complex64 {
        let i = Complex64::i();
        let a = 1.0 / (4.0 * self.sigma * self.sigma);
        let y = x - self.x0;
        let den = Complex64::new(1.0, 2.0 * a * t);
        let norm = (2.0 * std::f64::consts::PI * self.sigma * self.sigma).powf(-0.25);
        let expo = (-a * y * y + i * self.k0 * y - i * self.k0 * self.k0 * t / 2.0) / den + i * self.k0 * self.x0;
        norm / den.sqrt() * expo.exp()
    }

    /// `ψ'/ψ`, i.e. `u + i v` for unit mass and `ħ`.
    pub fn log_derivative(&self, x: f64, t: f64) -> Complex64 {
        let a = 1.0 / (4.0 * self.sigma * self.sigma);
        let y = x - self.x0;
        (Complex64::new(-2.0 * a * y, self.k0)) / Complex64::new(1.0, 2.0 * a * t)
    }

    pub fn width(&self, t: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        (s2 + t * t / (4.0 * s2)).sqrt()
    }

    pub fn cdf(&self, x: f64, t: f64) -> f64 {
        let z = (x - self.x0 - self.k0 * t) / (self.width(t) * std::f64::consts::SQRT_2);
        0.5 * (1.0 + erf(z))
    }
}

/// Two-sample-free KS distance of `samples` against a continuous CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut worst: f64 = 0.0;
    for (i, x) in samples.iter().enumerate() {
        let f = cdf(*x);
        worst = worst.max((f - i as f64 / n).abs()).max((f - (i + 1) as f64 / n).abs());
    }
    worst
}
