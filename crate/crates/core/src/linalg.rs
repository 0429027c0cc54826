//! Small dense complex linear algebra: LU with partial pivoting.

use num_complex::Complex;

use crate::{Error, Result, Scalar};

/// Row-major square complex matrix.
#[derive(Debug, Clone)]
pub struct ComplexMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> ComplexMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex::new(T::zero(), T::zero()); n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        self.data[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex<T>) {
        self.data[r * self.n + c] = v;
    }

    pub fn add(&mut self, r: usize, c: usize, v: Complex<T>) {
        self.data[r * self.n + c] += v;
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> T {
        (0..self.n)
            .map(|c| {
                (0..self.n)
                    .map(|r| self.get(r, c).norm())
                    .fold(T::zero(), |a, b| a + b)
            })
            .fold(T::zero(), T::max)
    }

    pub fn mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.n)
            .map(|r| {
                (0..self.n).fold(Complex::new(T::zero(), T::zero()), |acc, c| {
                    acc + self.get(r, c) * x[c]
                })
            })
            .collect()
    }
}

/// LU factorisation `P A = L U` with unit-diagonal `L`.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: ComplexMatrix<T>,
    perm: Vec<usize>,
    anorm: T,
}

impl<T: Scalar> Lu<T> {
    pub fn factor(a: &ComplexMatrix<T>) -> Result<Self> {
        let n = a.dim();
        let anorm = a.norm1();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (piv, pmax) = (k..n)
                .map(|r| (r, lu.get(r, k).norm()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == T::zero() {
                return Err(Error::SingularSystem { rcond: 0.0 });
            }
            if piv != k {
                for c in 0..n {
                    lu.data.swap(k * n + c, piv * n + c);
                }
                perm.swap(k, piv);
            }
            let d = lu.get(k, k);
            for r in k + 1..n {
                let f = lu.get(r, k) / d;
                lu.set(r, k, f);
                if f.norm() != T::zero() {
                    for c in k + 1..n {
                        let v = lu.get(r, c) - f * lu.get(k, c);
                        lu.set(r, c, v);
                    }
                }
            }
        }
        Ok(Self { lu, perm, anorm })
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.lu.dim();
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            for c in 0..r {
                let v = x[r] - self.lu.get(r, c) * x[c];
                x[r] = v;
            }
        }
        for r in (0..n).rev() {
            for c in r + 1..n {
                let v = x[r] - self.lu.get(r, c) * x[c];
                x[r] = v;
            }
            x[r] /= self.lu.get(r, r);
        }
        x
    }

    /// Exact reciprocal 1-norm condition number from the explicit inverse.
    pub fn rcond(&self) -> T {
        let n = self.lu.dim();
        let zero = Complex::new(T::zero(), T::zero());
        let mut inv_norm = T::zero();
        let mut e = vec![zero; n];
        for c in 0..n {
            e.iter_mut().for_each(|v| *v = zero);
            e[c] = Complex::new(T::one(), T::zero());
            let col = self.solve(&e);
            let s = col.iter().map(|v| v.norm()).fold(T::zero(), |a, b| a + b);
            inv_norm = inv_norm.max(s);
        }
        if inv_norm == T::zero() || self.anorm == T::zero() {
            return T::zero();
        }
        T::one() / (self.anorm * inv_norm)
    }
}

/// Solves `A x = b`, failing when the reciprocal condition drops below
/// `1e3 * epsilon`. Returns the solution and the reciprocal condition.
pub fn solve_checked<T: Scalar>(a: &ComplexMatrix<T>, b: &[Complex<T>]) -> Result<(Vec<Complex<T>>, T)> {
    let lu = Lu::factor(a)?;
    let rcond = lu.rcond();
    if !(rcond >= T::lit(1e3) * T::epsilon()) {
        return Err(Error::SingularSystem {
            rcond: rcond.to_f64_lossy(),
        });
    }
    Ok((lu.solve(b), rcond))
}
