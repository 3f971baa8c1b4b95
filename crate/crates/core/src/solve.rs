//! Damped Newton on small real systems, 1-D root bracketing, golden section.

#[derive(Clone, Copy, Debug)]
pub struct NewtonOpts {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOpts {
    fn default() -> Self {
        NewtonOpts { tol: 1e-13, max_iter: 80 }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solves a·x = b by Gaussian elimination with partial pivoting.
pub fn lin_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Damped Newton with a central-difference Jacobian. `f` returns None outside
/// its admissible region, which the line search treats as an infinite residual.
pub fn newton<F>(f: F, x0: &[f64], opts: &NewtonOpts) -> Option<Vec<f64>>
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x)?;
    let mut r = norm(&fx);
    for _ in 0..opts.max_iter {
        if r < opts.tol {
            return Some(x);
        }
        let mut jac = vec![vec![0.0; n]; n];
        for j in 0..n {
            let h = 1e-7 * (1.0 + x[j].abs());
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let (fp, fm) = (f(&xp)?, f(&xm)?);
            for i in 0..n {
                jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let dx = lin_solve(jac, fx.iter().map(|v| -v).collect())?;
        let mut t = 1.0;
        let mut improved = false;
        while t > 1e-6 {
            let xn: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + t * d).collect();
            if let Some(fnew) = f(&xn) {
                let rn = norm(&fnew);
                if rn.is_finite() && rn < r {
                    x = xn;
                    fx = fnew;
                    r = rn;
                    improved = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
        if norm(&dx) * t < 1e-15 * (1.0 + norm(&x)) {
            break;
        }
    }
    (r < opts.tol.sqrt() * 1e-2).then_some(x)
}

/// Runs Newton from every seed and returns the distinct converged roots.
pub fn multi_start<F>(f: F, seeds: &[Vec<f64>], opts: &NewtonOpts) -> Vec<Vec<f64>>
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let mut roots: Vec<Vec<f64>> = Vec::new();
    for s in seeds {
        if let Some(x) = newton(&f, s, opts) {
            let dup = roots.iter().any(|r| {
                let d: Vec<f64> = r.iter().zip(&x).map(|(a, b)| a - b).collect();
                norm(&d) < 1e-7 * (1.0 + norm(&x))
            });
            if !dup {
                roots.push(x);
            }
        }
    }
    roots
}

/// Roots of a continuous scalar function on [a, b] located by sign changes on
/// an n-point grid and refined by bisection.
pub fn bracket_roots(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> Vec<f64> {
    let xs: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut out = Vec::new();
    for i in 0..n {
        let (mut lo, mut hi) = (xs[i], xs[i + 1]);
        let (mut flo, fhi) = (fs[i], fs[i + 1]);
        if !flo.is_finite() || !fhi.is_finite() {
            continue;
        }
        if flo == 0.0 {
            out.push(lo);
            continue;
        }
        if flo * fhi > 0.0 {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let fm = f(mid);
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if (fm < 0.0) == (flo < 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 * (1.0 + lo.abs()) {
                break;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out
}

/// Golden-section minimization on [a, b]; returns (argmin, min).
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_2d() {
        // x² + y² = 4, x = y
        let f = |v: &[f64]| Some(vec![v[0] * v[0] + v[1] * v[1] - 4.0, v[0] - v[1]]);
        let x = newton(f, &[1.0, 0.5], &NewtonOpts::default()).unwrap();
        assert!((x[0] - 2f64.sqrt()).abs() < 1e-12 && (x[1] - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn multi_start_finds_both() {
        let f = |v: &[f64]| Some(vec![v[0] * v[0] - 2.0]);
        let r = multi_start(f, &[vec![-3.0], vec![3.0], vec![2.5]], &NewtonOpts::default());
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn brackets_and_golden() {
        let r = bracket_roots(|x| x.cos(), 0.0, 10.0, 50);
        assert_eq!(r.len(), 3);
        assert!((r[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-13);
        let (x, v) = golden_section(|x| (x - 0.3).powi(2) + 1.0, 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7 && (v - 1.0).abs() < 1e-14);
    }
}
