//! Gauss–Legendre nodes and polar product rules on the unit disk.

use crate::C64;
use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to [a, b].
pub fn gl_interval(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    x.iter().zip(&w).map(|(xi, wi)| (a + h * (xi + 1.0), h * wi)).collect()
}

/// Composite rule over consecutive breakpoints.
pub fn gl_panels(n: usize, breaks: &[f64]) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let mut out = Vec::with_capacity(n * breaks.len());
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b <= a {
            continue;
        }
        let h = 0.5 * (b - a);
        for (xi, wi) in x.iter().zip(&w) {
            out.push((a + h * (xi + 1.0), h * wi));
        }
    }
    out
}

/// Point around which a polar patch is laid out.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Center {
    /// Interior point with an optional feature length (0 for none).
    Interior { p: C64, scale: f64 },
    /// Point on the unit circle; the patch is the inward half-plane.
    Boundary(C64),
}

impl Center {
    fn point(&self) -> C64 {
        match *self {
            Center::Interior { p, .. } => p,
            Center::Boundary(z) => z,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RuleOpts {
    pub n_theta: usize,
    pub gl: usize,
    pub boundary_theta_panels: usize,
}

impl Default for RuleOpts {
    fn default() -> Self {
        RuleOpts { n_theta: 256, gl: 10, boundary_theta_panels: 6 }
    }
}

/// Nodes and weights with ∫_D g dx dy ≈ Σ weights[k]·g(nodes[k]).
#[derive(Clone, Debug, Default)]
pub struct DiskRule {
    pub nodes: Vec<C64>,
    pub weights: Vec<f64>,
}

impl DiskRule {
    pub fn integrate(&self, g: impl Fn(C64) -> C64) -> C64 {
        self.nodes.iter().zip(&self.weights).map(|(u, w)| g(*u) * *w).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

const FRACS: [f64; 10] = [0.0, 0.02, 0.05, 0.1, 0.18, 0.3, 0.45, 0.65, 0.85, 1.0];

fn radial_breaks(smax: f64, scale: f64) -> Vec<f64> {
    let tol = 1e-3 * smax.max(1e-300);
    let mut inner: Vec<f64> = FRACS[1..FRACS.len() - 1].iter().map(|f| f * smax).collect();
    if scale > 0.0 {
        inner.extend([0.5, 1.0, 2.0, 3.5, 6.0].iter().map(|m| m * scale));
    }
    inner.retain(|&s| s > tol && s < smax - tol);
    inner.sort_by(|a, c| a.partial_cmp(c).unwrap());
    inner.dedup_by(|a, c| (*a - *c).abs() < tol);
    let mut b = Vec::with_capacity(inner.len() + 2);
    b.push(0.0);
    b.extend(inner);
    b.push(smax);
    b
}

/// Partition-of-unity weight of center `j` at `u`.
fn chi(centers: &[C64], j: usize, u: C64) -> f64 {
    if centers.len() == 1 {
        return 1.0;
    }
    let mut tot = 0.0;
    let mut mine = 0.0;
    for (k, c) in centers.iter().enumerate() {
        let d2 = (u - c).norm_sqr();
        if d2 == 0.0 {
            return if k == j { 1.0 } else { 0.0 };
        }
        let v = 1.0 / (d2 * d2);
        tot += v;
        if k == j {
            mine = v;
        }
    }
    mine / tot
}

/// Product rule on the unit disk built from polar patches around each center,
/// blended by a partition of unity ∝ |u − p|⁻⁴.
pub fn disk_rule(centers: &[Center], opts: &RuleOpts) -> DiskRule {
    let centers: Vec<Center> = if centers.is_empty() {
        vec![Center::Interior { p: C64::new(0.0, 0.0), scale: 0.0 }]
    } else {
        centers.to_vec()
    };
    let pts: Vec<C64> = centers.iter().map(|c| c.point()).collect();
    let mut rule = DiskRule::default();
    for (j, center) in centers.iter().enumerate() {
        match *center {
            Center::Interior { p, scale } => {
                let nth = if p.norm() > 0.7 { 2 * opts.n_theta } else { opts.n_theta };
                let dth = 2.0 * PI / nth as f64;
                for k in 0..nth {
                    let th = (k as f64 + 0.5) * dth;
                    let e = C64::from_polar(1.0, th);
                    let b = (p.conj() * e).re;
                    let smax = -b + (b * b + 1.0 - p.norm_sqr()).max(0.0).sqrt();
                    for (s, ws) in gl_panels(opts.gl, &radial_breaks(smax, scale)) {
                        let u = p + e * s;
                        let w = dth * ws * s * chi(&pts, j, u);
                        if w != 0.0 {
                            rule.nodes.push(u);
                            rule.weights.push(w);
                        }
                    }
                }
            }
            Center::Boundary(z) => {
                let z = z / z.norm();
                let thc = (-z).arg();
                let np = opts.boundary_theta_panels;
                let breaks: Vec<f64> =
                    (0..=np).map(|i| thc - PI / 2.0 + PI * i as f64 / np as f64).collect();
                for (th, wt) in gl_panels(2 * opts.gl, &breaks) {
                    let e = C64::from_polar(1.0, th);
                    let smax = -2.0 * (z.conj() * e).re;
                    if smax <= 0.0 {
                        continue;
                    }
                    for (s, ws) in gl_panels(opts.gl, &radial_breaks(smax, 0.0)) {
                        let u = z + e * s;
                        let w = wt * ws * s * chi(&pts, j, u);
                        if w != 0.0 {
                            rule.nodes.push(u);
                            rule.weights.push(w);
                        }
                    }
                }
            }
        }
    }
    rule
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_exact_for_polynomials() {
        for n in [1, 2, 5, 10, 16] {
            let r = gl_interval(n, 0.0, 2.0);
            for deg in 0..2 * n {
                let v: f64 = r.iter().map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = 2f64.powi(deg as i32 + 1) / (deg as f64 + 1.0);
                assert!((v - exact).abs() < 1e-12 * exact.max(1.0), "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn disk_area_and_moments() {
        let rule = disk_rule(&[], &RuleOpts::default());
        let a = rule.integrate(|_| C64::new(1.0, 0.0));
        assert!((a.re - PI).abs() < 1e-12);
        let m = rule.integrate(|u| C64::new(u.norm_sqr(), 0.0));
        assert!((m.re - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn off_center_singularity() {
        // ∫_D dxdy / |u − p| against a centered reference rule refined heavily
        let p = C64::new(0.3, -0.4);
        let rule = disk_rule(&[Center::Interior { p, scale: 0.0 }], &RuleOpts::default());
        let v = rule.integrate(|u| C64::new(1.0 / (u - p).norm(), 0.0)).re;
        let fine = disk_rule(
            &[Center::Interior { p, scale: 0.0 }],
            &RuleOpts { n_theta: 1024, gl: 20, boundary_theta_panels: 6 },
        );
        let v2 = fine.integrate(|u| C64::new(1.0 / (u - p).norm(), 0.0)).re;
        assert!((v - v2).abs() < 1e-10);
        let a = rule.integrate(|_| C64::new(1.0, 0.0)).re;
        assert!((a - PI).abs() < 1e-11);
    }

    #[test]
    fn scale_break_near_ray_end() {
        // 6·scale lands within the dedup tolerance of smax on some rays
        let p = C64::new(-0.45, 0.0);
        for scale in [0.095, 0.0917, 0.1] {
            let rule = disk_rule(&[Center::Interior { p, scale }], &RuleOpts::default());
            let a = rule.integrate(|_| C64::new(1.0, 0.0)).re;
            assert!((a - PI).abs() < 1e-12, "scale {scale}: {a}");
        }
    }

    #[test]
    fn boundary_cauchy_kernel() {
        // ∫_D dxdy/(ζ − u) = π ζ̄ for |ζ| = 1
        for k in 0..5 {
            let zeta = C64::from_polar(1.0, 0.4 + 1.1 * k as f64);
            let rule = disk_rule(
                &[Center::Interior { p: C64::new(0.0, 0.0), scale: 0.0 }, Center::Boundary(zeta)],
                &RuleOpts::default(),
            );
            let v = rule.integrate(|u| (zeta - u).inv());
            assert!((v - PI * zeta.conj()).norm() < 1e-8, "{v}");
        }
    }
}
