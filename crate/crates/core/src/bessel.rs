//! Integer-order Bessel functions of the first kind.

use crate::Scalar;

/// Largest truncation order the adaptive rule will return.
pub const MAX_TRUNCATION: usize = 64;

/// `J_0(x) ..= J_nmax(x)` by Miller's downward recurrence, normalised with
/// `J_0 + 2 Σ J_2k = 1`.
pub fn bessel_j_upto<T: Scalar>(nmax: usize, x: T) -> Vec<T> {
    let mut out = vec![T::zero(); nmax + 1];
    if x == T::zero() {
        out[0] = T::one();
        return out;
    }
    let ax = x.abs();
    let axf = ax.to_f64_lossy();
    let top = nmax.max(axf.ceil() as usize);
    // start well above both the order and the argument
    let mut start = top + 20 + (40.0 * top.max(1) as f64).sqrt() as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let two = T::lit(2.0);
    let huge = T::lit(1e150f64.min(T::max_value().to_f64_lossy().sqrt()));
    let mut j_next = T::zero();
    let mut j_cur = T::min_positive_value().sqrt();
    let mut norm = T::zero();
    let mut vals = vec![T::zero(); start + 1];
    vals[start] = j_cur;
    for k in (1..=start).rev() {
        let j_prev = two * T::from_usize_lossy(k) / ax * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        vals[k - 1] = j_cur;
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += j_cur;
        }
        if j_cur.abs() > huge {
            let s = T::one() / huge;
            j_cur *= s;
            j_next *= s;
            norm *= s;
            for v in vals[k - 1..].iter_mut() {
                *v *= s;
            }
        }
    }
    norm = two * norm + vals[0];
    for (n, o) in out.iter_mut().enumerate() {
        let mut v = vals[n] / norm;
        if x < T::zero() && n % 2 == 1 {
            v = -v;
        }
        *o = v;
    }
    out
}

/// `J_n(x)` for any integer `n`, using `J_{-n} = (-1)^n J_n`.
pub fn bessel_j<T: Scalar>(n: i32, x: T) -> T {
    let m = n.unsigned_abs() as usize;
    let v = bessel_j_upto(m, x)[m];
    if n < 0 && m % 2 == 1 {
        -v
    } else {
        v
    }
}

/// Smallest `N` with `|J_N(z)| < 1e-12 |J_0(z)|`, capped at [`MAX_TRUNCATION`].
pub fn truncation_order<T: Scalar>(z: T) -> usize {
    if z == T::zero() {
        return 0;
    }
    let vals = bessel_j_upto(MAX_TRUNCATION, z);
    let reference = vals[0].abs().max(vals[1].abs());
    let tol = T::lit(1e-12) * reference;
    (1..=MAX_TRUNCATION)
        .find(|&n| vals[n].abs() < tol && n as f64 > z.abs().to_f64_lossy())
        .unwrap_or(MAX_TRUNCATION)
}
