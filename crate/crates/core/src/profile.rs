//! Static potential profiles for the WKB engine.

use std::path::Path;

use crate::error::invalid;
use crate::{Error, Result, Scalar};

/// Monotone cubic (Fritsch–Carlson) interpolant of `(x, V)` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledProfile<T> {
    xs: Vec<T>,
    vs: Vec<T>,
    slopes: Vec<T>,
}

impl<T: Scalar> SampledProfile<T> {
    pub fn new(xs: Vec<T>, vs: Vec<T>) -> Result<Self> {
        if xs.len() != vs.len() {
            return Err(invalid("samples", "x and V columns differ in length"));
        }
        if xs.len() < 3 {
            return Err(invalid("samples", "need at least three samples"));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("samples", "x must be strictly increasing"));
        }
        if vs.iter().any(|v| !v.is_finite()) {
            return Err(invalid("samples", "V must be finite"));
        }
        let n = xs.len();
        let h: Vec<T> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<T> = (0..n - 1).map(|i| (vs[i + 1] - vs[i]) / h[i]).collect();
        let mut slopes = vec![T::zero(); n];
        slopes[0] = delta[0];
        slopes[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] > T::zero() {
                // weighted harmonic mean keeps the interpolant monotone
                let w1 = T::lit(2.0) * h[i] + h[i - 1];
                let w2 = h[i] + T::lit(2.0) * h[i - 1];
                slopes[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        Ok(Self { xs, vs, slopes })
    }

    /// Parses a two-column `x,V` table; a non-numeric first line is a header.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let (a, b) = match (cols.next(), cols.next()) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(Error::Parse(format!("line {}: expected two columns", lineno + 1))),
            };
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(x), Ok(v)) => {
                    xs.push(T::lit(x));
                    vs.push(T::lit(v));
                }
                _ if xs.is_empty() => continue,
                _ => return Err(Error::Parse(format!("line {}: not numeric", lineno + 1))),
            }
        }
        Self::new(xs, vs)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }

    pub fn eval(&self, x: T) -> T {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.vs[0];
        }
        if x >= self.xs[n - 1] {
            return self.vs[n - 1];
        }
        let i = self.xs.partition_point(|&xi| xi <= x) - 1;
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * t3 - three * t2 + T::one();
        let h10 = t3 - two * t2 + t;
        let h01 = three * t2 - two * t3;
        let h11 = t3 - t2;
        h00 * self.vs[i] + h10 * h * self.slopes[i] + h01 * self.vs[i + 1] + h11 * h * self.slopes[i + 1]
    }

    pub fn domain(&self) -> (T, T) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    pub fn samples(&self) -> (&[T], &[T]) {
        (&self.xs, &self.vs)
    }
}

/// A static barrier `V(x)`: closed-form built-ins or interpolated samples.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialProfile<T> {
    /// `height` on `[-width/2, width/2]`.
    Rectangular { height: T, width: T },
    /// `height * exp(-x² / (2 width²))`.
    Gaussian { height: T, width: T },
    /// `height / cosh²(x / a)`.
    Eckart { height: T, a: T },
    Sampled(SampledProfile<T>),
}

impl<T: Scalar> PotentialProfile<T> {
    /// Looks up a named built-in: `rectangular`, `gaussian` or `eckart`.
    pub fn builtin(name: &str, height: T, width: T) -> Result<Self> {
        if !(height > T::zero() && width > T::zero()) {
            return Err(invalid("profile", "height and width must be positive"));
        }
        match name {
            "rectangular" | "rect" => Ok(Self::Rectangular { height, width }),
            "gaussian" => Ok(Self::Gaussian { height, width }),
            "eckart" => Ok(Self::Eckart { height, a: width }),
            other => Err(invalid("profile", format!("unknown built-in `{other}`"))),
        }
    }

    pub fn eval(&self, x: T) -> T {
        match self {
            Self::Rectangular { height, width } => {
                if x.abs() <= *width / T::lit(2.0) {
                    *height
                } else {
                    T::zero()
                }
            }
            Self::Gaussian { height, width } => {
                let u = x / *width;
                *height * (-(u * u) / T::lit(2.0)).exp()
            }
            Self::Eckart { height, a } => {
                let c = (x / *a).cosh();
                *height / (c * c)
            }
            Self::Sampled(s) => s.eval(x),
        }
    }

    pub fn domain(&self) -> (T, T) {
        match self {
            Self::Rectangular { width, .. } => (-*width, *width),
            Self::Gaussian { width, .. } => (T::lit(-12.0) * *width, T::lit(12.0) * *width),
            Self::Eckart { a, .. } => (T::lit(-30.0) * *a, T::lit(30.0) * *a),
            Self::Sampled(s) => s.domain(),
        }
    }

    pub fn is_rectangular(&self) -> bool {
        matches!(self, Self::Rectangular { .. })
    }
}
