//! Truncated power series in a local variable t, stored as coefficient vectors.

use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

fn get(a: &[C64], k: usize) -> C64 {
    a.get(k).copied().unwrap_or(ZERO)
}

pub fn add(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
    (0..n).map(|k| get(a, k) + get(b, k)).collect()
}

pub fn scale(a: &[C64], s: C64, n: usize) -> Vec<C64> {
    (0..n).map(|k| get(a, k) * s).collect()
}

pub fn mul(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![ZERO; n];
    for (i, x) in a.iter().enumerate().take(n) {
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// a/b to n terms; b[0] must be nonzero.
pub fn div(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
    let b0 = b[0];
    let mut out = vec![ZERO; n];
    for k in 0..n {
        let mut s = get(a, k);
        for j in 1..=k {
            s -= get(b, j) * out[k - j];
        }
        out[k] = s / b0;
    }
    out
}

pub fn inv(b: &[C64], n: usize) -> Vec<C64> {
    div(&[C64::new(1.0, 0.0)], b, n)
}

/// exp of a series.
pub fn exp(a: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![ZERO; n];
    if n == 0 {
        return out;
    }
    out[0] = get(a, 0).exp();
    for k in 1..n {
        let mut s = ZERO;
        for j in 1..=k {
            s += get(a, j) * (j as f64) * out[k - j];
        }
        out[k] = s / k as f64;
    }
    out
}

pub fn pow(a: &[C64], k: usize, n: usize) -> Vec<C64> {
    let mut out = vec![ZERO; n];
    if n > 0 {
        out[0] = C64::new(1.0, 0.0);
    }
    for _ in 0..k {
        out = mul(&out, a, n);
    }
    out
}

/// Compositional inverse: given a with a[0] = 0 and a[1] ≠ 0, returns b with
/// a(b(s)) = s to n terms.
pub fn revert(a: &[C64], n: usize) -> Vec<C64> {
    let a1 = a[1];
    let mut b = vec![ZERO; n];
    if n < 2 {
        return b;
    }
    b[1] = a1.inv();
    for k in 2..n {
        // coefficient of s^k in a(b(s)) using current b (b[k] still zero)
        let mut comp = vec![ZERO; k + 1];
        let mut bp = vec![ZERO; k + 1];
        bp[0] = C64::new(1.0, 0.0);
        for j in 1..=k {
            bp = mul(&bp, &b[..=k], k + 1);
            comp = add(&comp, &scale(&bp, get(a, j), k + 1), k + 1);
        }
        b[k] = -comp[k] / a1;
    }
    b
}

/// Evaluates Σ a_k t^k.
pub fn eval(a: &[C64], t: C64) -> C64 {
    let mut acc = ZERO;
    for c in a.iter().rev() {
        acc = acc * t + c;
    }
    acc
}
