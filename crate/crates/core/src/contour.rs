//! Boundary sampling, contour integrals, Cauchy projections and log-weighted
//! area integrals dA/|w|².
//!
//! Area integrals over a domain are pulled back to the unit disk (u = z for
//! bounded maps, u = 1/z for unbounded ones) and evaluated with polar patches
//! centered at the preimages of 0, ∞ and, when needed, of a boundary point.
//! Where 0 or ∞ lie in the region the density is regularized by Gaussian
//! cut-offs κ₀ = exp(−|ξ|²/σ²), κ∞ = exp(−σ∞²/|ξ|²), compensated by the
//! constants that make the renormalized area of ℂ vanish.

use crate::maps::{RiemannMap, Side};
use crate::quad::{disk_rule, gl_panels, Center, RuleOpts};
use crate::{Error, Result, C64};
use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

const ZERO: C64 = C64::new(0.0, 0.0);
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Samples w_k = φ(e^{it_k}), t_k = 2πk/n, with dw/dt. `orientation` is +1
/// when the samples run positively around the region and −1 otherwise.
#[derive(Clone, Debug)]
pub struct BoundaryCurve {
    pub w: Vec<C64>,
    pub dw: Vec<C64>,
    pub orientation: f64,
}

/// Which side of the curve a projection targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// The region itself (Ω).
    Region,
    /// The complementary region (Ωext).
    Complement,
}

impl BoundaryCurve {
    pub fn new(w: Vec<C64>, dw: Vec<C64>, orientation: f64) -> Self {
        BoundaryCurve { w, dw, orientation }
    }

    pub fn n(&self) -> usize {
        self.w.len()
    }

    pub fn t(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.n() as f64
    }

    pub fn max_speed(&self) -> f64 {
        self.dw.iter().map(|d| d.norm()).fold(0.0, f64::max)
    }

    /// Minimum distance at which Cauchy integrals are still resolved.
    pub fn eps_near(&self) -> f64 {
        5.0 * self.max_speed() / self.n() as f64
    }

    pub fn dist(&self, w: C64) -> f64 {
        self.w.iter().map(|x| (x - w).norm()).fold(f64::INFINITY, f64::min)
    }

    /// ∮_{∂Ω} f dw / (2πi) with ∂Ω positively oriented with respect to Ω.
    pub fn contour_integral(&self, f: impl Fn(C64) -> C64) -> C64 {
        let vals: Vec<C64> = self.w.iter().map(|&w| f(w)).collect();
        self.integrate_samples(&vals)
    }

    /// Same, with the integrand given at the samples.
    pub fn integrate_samples(&self, vals: &[C64]) -> C64 {
        let s: C64 = vals.iter().zip(&self.dw).map(|(v, d)| v * d).sum();
        s * self.orientation / (C64::i() * self.n() as f64)
    }

    /// Winding number of the sampled polygon about w.
    pub fn winding(&self, w: C64) -> i64 {
        let n = self.n();
        let mut a = 0.0;
        for k in 0..n {
            a += ((self.w[(k + 1) % n] - w) / (self.w[k] - w)).arg();
        }
        (a / (2.0 * PI)).round() as i64
    }

    /// True when w lies in the region bounded by the curve (on the side the
    /// orientation refers to).
    pub fn in_region(&self, w: C64) -> bool {
        let inside = self.winding(w) != 0;
        if self.orientation > 0.0 {
            inside
        } else {
            !inside
        }
    }

    /// P_U[g](w) = ∮_{∂U} g(ξ)/(ξ − w) dξ for U the region or its complement,
    /// with g given at the samples. Rejects points closer than `eps_near`.
    pub fn cauchy_projection(&self, g: &[C64], w: C64, target: Target) -> Result<C64> {
        let d = self.dist(w);
        let min = self.eps_near();
        if d < min {
            return Err(Error::NearBoundary { w, dist: d, min });
        }
        let vals: Vec<C64> = g.iter().zip(&self.w).map(|(gv, xi)| gv / (xi - w)).collect();
        let v = self.integrate_samples(&vals);
        Ok(match target {
            Target::Region => v,
            Target::Complement => -v,
        })
    }

    /// CSV with header `t,re,im`; the final row repeats the first.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut s = String::from("t,re,im\n");
        for k in 0..=self.n() {
            let j = k % self.n();
            s.push_str(&format!("{:.12e},{:.15e},{:.15e}\n", self.t(j), self.w[j].re, self.w[j].im));
        }
        write_atomic(path, s.as_bytes())
    }
}

/// Writes through a temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Integration region for log-weighted areas.
#[derive(Clone, Copy, Debug)]
pub enum Region<'a> {
    Domain(&'a RiemannMap),
    /// Domain with the disk |w| < r removed (r below dist(0, ∂Ω)).
    DomainMinusDisk(&'a RiemannMap, f64),
    /// r < |w| < R.
    Annulus(f64, f64),
    /// |w| > r, as a principal value at infinity.
    ExteriorDisk(f64),
}

/// ∫_U dA/|ξ|².
pub fn weighted_area(region: Region) -> Result<f64> {
    match region {
        Region::Annulus(r, big) => Ok(annulus_area(r, big)),
        Region::ExteriorDisk(_) => Err(Error::RangeError("area of an exterior disk diverges".into())),
        Region::Domain(m) => {
            if m.contains_zero() || m.side == Side::Unbounded {
                return Err(Error::RangeError(
                    "weighted area diverges; use a cut-off or the renormalized area".into(),
                ));
            }
            Ok(AreaEngine::new(m, None, &RuleOpts::default())?.weighted(|_| C64::new(1.0, 0.0)).re)
        }
        Region::DomainMinusDisk(m, r) => {
            Ok(AreaEngine::excised(m, r, &RuleOpts::default())?.weighted(|_| C64::new(1.0, 0.0)).re)
        }
    }
}

/// C^U(w) = ∫_U dA(ξ) / (|ξ|² (w − ξ)).
pub fn weighted_cauchy_area(region: Region, w: C64) -> Result<C64> {
    match region {
        Region::Annulus(r, big) => annulus_cauchy(r, big, w),
        Region::ExteriorDisk(r) => exterior_disk_cauchy(r, w),
        Region::Domain(m) => {
            if m.contains_zero() {
                return Err(Error::RangeError("integral diverges at 0; use a cut-off".into()));
            }
            let e = AreaEngine::new(m, None, &RuleOpts::default())?;
            Ok(e.renormalized_cauchy(w))
        }
        Region::DomainMinusDisk(m, r) => {
            let e = AreaEngine::excised(m, r, &RuleOpts::default())?;
            Ok(e.weighted(|xi| (w - xi).inv()))
        }
    }
}

fn annulus_area(r: f64, big: f64) -> f64 {
    // (1/π)∫∫ s ds dθ / s² with the radial part in log s
    let (a, b) = (r.ln(), big.ln());
    let m = ((b - a) / 0.5).ceil().max(1.0) as usize;
    let breaks: Vec<f64> = (0..=m).map(|i| a + (b - a) * i as f64 / m as f64).collect();
    let nth = 16;
    let mut tot = 0.0;
    for (_x, wx) in gl_panels(12, &breaks) {
        for _k in 0..nth {
            tot += wx * (2.0 * PI / nth as f64);
        }
    }
    tot / PI
}

/// Geometric breakpoints on [0, 1], finest (width h) at both ends.
fn graded_unit(h: f64) -> Vec<f64> {
    let mut left = vec![0.0];
    let mut x = h;
    while x < 0.5 {
        left.push(x);
        x *= 3.0;
    }
    let mut b = left.clone();
    b.push(0.5);
    for v in left.iter().rev() {
        b.push(1.0 - v);
    }
    b
}

/// Weighted Cauchy transform over r < |ξ| < R. When r < |w| < R a disk
/// around w is integrated in polar coordinates centered at w and the rest in
/// polar coordinates centered at 0, with the band meeting the disk handled by
/// the substitution s = |w| + ρ sin τ.
pub fn annulus_cauchy(r: f64, big: f64, w: C64) -> Result<C64> {
    if !(r > 0.0 && big > r) {
        return Err(Error::RangeError(format!("annulus radii {r}, {big}")));
    }
    let aw = w.norm();
    let kernel_ring = |s: f64, n: usize| -> C64 {
        // ∫_0^{2π} dθ/(w − s e^{iθ}) by the trapezoid rule
        let mut acc = ZERO;
        for k in 0..n {
            let th = 2.0 * PI * (k as f64 + 0.5) / n as f64;
            acc += (w - C64::from_polar(s, th)).inv();
        }
        acc * (2.0 * PI / n as f64)
    };
    let ring_n = |s: f64| -> usize {
        let d = (aw - s).abs().max(1e-300);
        ((40.0 * s / d).ceil() as usize).clamp(64, 1 << 16)
    };
    let radial = |a: f64, b: f64| -> C64 {
        if b <= a {
            return ZERO;
        }
        let (la, lb) = (a.ln(), b.ln());
        let m = ((lb - la) / 0.25).ceil().max(1.0) as usize;
        let mut breaks: Vec<f64> = (0..=m).map(|i| la + (lb - la) * i as f64 / m as f64).collect();
        // grade toward an endpoint next to |w|
        for end in [la, lb] {
            if (end.exp() - aw).abs() < 0.5 * aw {
                let span = (lb - la).min(0.25);
                for f in [1e-3, 3e-3, 1e-2, 3e-2, 0.1] {
                    breaks.push(if end == la { la + f * span } else { lb - f * span });
                }
            }
        }
        breaks.sort_by(|x, y| x.partial_cmp(y).unwrap());
        breaks.dedup();
        let mut acc = ZERO;
        for (x, wx) in gl_panels(16, &breaks) {
            let s = x.exp();
            // ds/s = dx
            acc += kernel_ring(s, ring_n(s)) * wx;
        }
        acc / PI
    };
    if aw <= r || aw >= big {
        return Ok(radial(r, big));
    }
    let rho = 0.5 * (aw - r).min(big - aw);
    // disk part: −(1/π) ∫∫ e^{−iθ}/|w + s e^{iθ}|² ds dθ
    let mut disk = ZERO;
    let nth = 128;
    for k in 0..nth {
        let th = 2.0 * PI * (k as f64 + 0.5) / nth as f64;
        let e = C64::from_polar(1.0, th);
        for (s, ws) in gl_panels(16, &[0.0, 0.5 * rho, rho]) {
            disk -= e.conj() / (w + e * s).norm_sqr() * ws;
        }
    }
    disk *= 2.0 * PI / nth as f64 / PI;
    // band |s − |w|| < ρ minus the disk
    let argw = w.arg();
    let mut band = ZERO;
    let arc_breaks = graded_unit(1e-4);
    for (tau, wt) in gl_panels(16, &[-PI / 2.0, -PI / 4.0, 0.0, PI / 4.0, PI / 2.0]) {
        let s = aw + rho * tau.sin();
        let ds = rho * tau.cos() * wt;
        let cb = ((s * s + aw * aw - rho * rho) / (2.0 * s * aw)).clamp(-1.0, 1.0);
        let beta = cb.acos();
        let len = 2.0 * PI - 2.0 * beta;
        let mut arc = ZERO;
        for (x, wx) in gl_panels(12, &arc_breaks) {
            let th = argw + beta + len * x;
            arc += (w - C64::from_polar(s, th)).inv() * (wx * len);
        }
        band += arc * (ds / s);
    }
    band /= PI;
    Ok(disk + band + radial(r, aw - rho) + radial(aw + rho, big))
}

/// Principal-value weighted Cauchy transform of |ξ| > r: the outer radius is
/// doubled until successive values agree to 1e−9.
pub fn exterior_disk_cauchy(r: f64, w: C64) -> Result<C64> {
    let mut big = 4.0 * w.norm().max(r);
    let mut prev = annulus_cauchy(r, big, w)?;
    for _ in 0..20 {
        big *= 2.0;
        let v = annulus_cauchy(r, big, w)?;
        if (v - prev).norm() < 1e-9 {
            return Ok(v);
        }
        prev = v;
    }
    Err(Error::NonConvergence("exterior-disk tail".into()))
}

/// Quadrature nodes on a domain: ∫_Ω F dA ≈ Σ wt[k]·F(w[k]).
#[derive(Clone, Debug)]
pub struct AreaEngine {
    pub w: Vec<C64>,
    pub wt: Vec<f64>,
    /// 1 − κ₀ − κ∞ at the nodes.
    pub reg: Vec<f64>,
    pub sigma0: Option<f64>,
    pub sigma_inf: Option<f64>,
}

impl AreaEngine {
    /// Nodes for the whole domain; `boundary` (a point on |z| = 1) adds a
    /// half-disk patch for integrands singular at φ(boundary).
    pub fn new(map: &RiemannMap, boundary: Option<C64>, opts: &RuleOpts) -> Result<Self> {
        let bc = map.boundary(1024);
        let dmin = bc.w.iter().map(|w| w.norm()).fold(f64::INFINITY, f64::min);
        let dmax = bc.w.iter().map(|w| w.norm()).fold(0.0, f64::max);
        let unb = map.side == Side::Unbounded;
        let to_u = |z: C64| if unb { z.inv() } else { z };
        let sigma0 = map.contains_zero().then_some(dmin / 7.0);
        let sigma_inf = unb.then_some(7.0 * dmax);
        let mut centers = Vec::new();
        if let Some(z0) = map.zero() {
            let u0 = to_u(z0);
            let dphi = map.deriv(z0).norm() * if unb { z0.norm_sqr() } else { 1.0 };
            centers.push(Center::Interior { p: u0, scale: sigma0.unwrap() / dphi });
        }
        if unb {
            let c = map.leading_coefficient().norm();
            centers.push(Center::Interior { p: ZERO, scale: c / sigma_inf.unwrap() });
        }
        if let Some(b) = boundary {
            centers.push(Center::Boundary(to_u(b / b.norm())));
        }
        let rule = disk_rule(&centers, opts);
        let mut e = AreaEngine {
            w: Vec::with_capacity(rule.len()),
            wt: Vec::with_capacity(rule.len()),
            reg: Vec::with_capacity(rule.len()),
            sigma0,
            sigma_inf,
        };
        for (u, wu) in rule.nodes.iter().zip(&rule.weights) {
            let z = to_u(*u);
            let (f, d) = map.eval_with_deriv(z);
            let jac = if unb { d.norm_sqr() / u.norm_sqr().powi(2) } else { d.norm_sqr() };
            e.push(f, wu * jac / PI);
        }
        Ok(e)
    }

    fn push(&mut self, f: C64, wt: f64) {
        let a2 = f.norm_sqr();
        let mut reg = 1.0;
        if let Some(s) = self.sigma0 {
            reg -= (-a2 / (s * s)).exp();
        }
        if let Some(s) = self.sigma_inf {
            reg -= (-(s * s) / a2).exp();
        }
        self.w.push(f);
        self.wt.push(wt);
        self.reg.push(reg);
    }

    /// Nodes for Ω ∖ D_r (bounded domains containing 0), with the disk
    /// excised exactly along each ray from the preimage of 0.
    pub fn excised(map: &RiemannMap, r: f64, opts: &RuleOpts) -> Result<Self> {
        let bc = map.boundary(1024);
        let dist = bc.w.iter().map(|w| w.norm()).fold(f64::INFINITY, f64::min);
        if r >= dist {
            return Err(Error::CutoffViolation { r, dist });
        }
        if map.side != Side::Bounded {
            return Err(Error::RangeError("excision is implemented for bounded domains".into()));
        }
        let Some(p) = map.zero() else {
            let mut e = AreaEngine::new(map, None, opts)?;
            e.reg.iter_mut().for_each(|x| *x = 1.0);
            return Ok(e);
        };
        let mut e = AreaEngine { w: vec![], wt: vec![], reg: vec![], sigma0: None, sigma_inf: None };
        let nth = 2 * opts.n_theta;
        let dth = 2.0 * PI / nth as f64;
        for k in 0..nth {
            let th = (k as f64 + 0.5) * dth;
            let dir = C64::from_polar(1.0, th);
            let b = (p.conj() * dir).re;
            let smax = -b + (b * b + 1.0 - p.norm_sqr()).max(0.0).sqrt();
            // first crossing of |φ| = r along the ray
            let g = |s: f64| map.eval(p + dir * s).norm() - r;
            let mut lo = 0.0;
            let mut hi = smax;
            let m = 64;
            for j in 1..=m {
                let s = smax * j as f64 / m as f64;
                if g(s) > 0.0 {
                    hi = s;
                    break;
                }
                lo = s;
            }
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if g(mid) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let sin = 0.5 * (lo + hi);
            let breaks: Vec<f64> =
                [0.0, 0.02, 0.05, 0.1, 0.2, 0.35, 0.55, 0.8, 1.0].iter().map(|f| sin + f * (smax - sin)).collect();
            for (s, ws) in gl_panels(opts.gl, &breaks) {
                let (f, d) = map.eval_with_deriv(p + dir * s);
                e.push(f, dth * ws * s * d.norm_sqr() / PI);
            }
        }
        Ok(e)
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// ∫ F dA.
    pub fn integral(&self, f: impl Fn(C64) -> C64) -> C64 {
        self.w.iter().zip(&self.wt).map(|(w, t)| f(*w) * *t).sum()
    }

    /// ∫ F dA/|w|².
    pub fn weighted(&self, f: impl Fn(C64) -> C64) -> C64 {
        self.w.iter().zip(&self.wt).map(|(w, t)| f(*w) * (*t / w.norm_sqr())).sum()
    }

    /// Renormalized weighted area Â; Â(ℂ) = 0, Â(D_r) = ln r².
    pub fn renormalized_area(&self) -> f64 {
        let mut a: f64 = self.w.iter().zip(&self.wt).zip(&self.reg).map(|((w, t), g)| t * g / w.norm_sqr()).sum();
        if let Some(s) = self.sigma0 {
            a += (s * s).ln() - EULER_GAMMA;
        }
        if let Some(s) = self.sigma_inf {
            a -= (s * s).ln() + EULER_GAMMA;
        }
        a
    }

    /// Renormalized weighted Cauchy transform Ĉ(w); Ĉ_ℂ(w) = ln|w|²/w.
    pub fn renormalized_cauchy(&self, w: C64) -> C64 {
        let mut v: C64 = self
            .w
            .iter()
            .zip(&self.wt)
            .zip(&self.reg)
            .map(|((xi, t), g)| (w - xi).inv() * (t * g / xi.norm_sqr()))
            .sum();
        if let Some(s) = self.sigma0 {
            v += C64::new((s * s).ln() - EULER_GAMMA, 0.0) / w;
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;
    use crate::complexpoly::RationalFn;
    use crate::maps::Inner;

    fn disk(r: f64) -> RiemannMap {
        RiemannMap::new(Side::Bounded, c(r, 0.0), Inner::Z, RationalFn::zero()).unwrap()
    }

    #[test]
    fn contour_of_circle() {
        let m = disk(2.0);
        let b = m.boundary(64);
        let v = b.contour_integral(|w| (w - c(0.5, 0.1)).inv());
        assert!((v - c(1.0, 0.0)).norm() < 1e-13);
        assert!(b.in_region(c(0.3, 0.0)) && !b.in_region(c(3.0, 0.0)));
        let u = RiemannMap::new(Side::Unbounded, c(2.0, 0.0), Inner::Z, RationalFn::zero()).unwrap();
        let bu = u.boundary(64);
        // positively oriented with respect to the exterior: a pole inside gives −1
        let v = bu.contour_integral(|w| (w - c(0.5, 0.1)).inv());
        assert!((v + c(1.0, 0.0)).norm() < 1e-13);
        assert!(bu.in_region(c(3.0, 0.0)));
    }

    #[test]
    fn projections_split_a_function() {
        let m = disk(1.0);
        let b = m.boundary(256);
        // g = 1/(w − 2) + 1/(w − 0.3): inside part is the first, outside the second
        let g: Vec<C64> = b.w.iter().map(|&w| (w - 2.0).inv() + (w - 0.3).inv()).collect();
        let w_in = c(0.1, 0.2);
        let pin = b.cauchy_projection(&g, w_in, Target::Region).unwrap();
        assert!((pin - (w_in - 2.0).inv()).norm() < 1e-12);
        let w_out = c(1.5, -1.0);
        let pout = b.cauchy_projection(&g, w_out, Target::Complement).unwrap();
        assert!((pout - (w_out - 0.3).inv()).norm() < 1e-12);
        assert!(matches!(
            b.cauchy_projection(&g, c(1.0 + 1e-4, 0.0), Target::Region),
            Err(Error::NearBoundary { .. })
        ));
    }

    #[test]
    fn annulus_area_closed_form() {
        let a = weighted_area(Region::Annulus(0.5, 3.0)).unwrap();
        assert!((a - (9.0f64 / 0.25).ln()).abs() < 1e-12);
    }

    #[test]
    fn exterior_disk_cauchy_matches_closed_form() {
        // closed form (ln|w|² − ln r²)/w for |w| > r
        for (r, w) in [(1.0, c(1.5, 0.7)), (0.3, c(-0.2, 2.5)), (2.0, c(2.1, 0.0)), (1.0, c(0.0, 9.5))] {
            let v = exterior_disk_cauchy(r, w).unwrap();
            let exact = (w.norm_sqr().ln() - (r * r).ln()) / w;
            assert!((v - exact).norm() < 1e-9, "{r} {w}: {v} vs {exact}");
        }
        // outside the annulus entirely: |w| < r gives 0
        let v = annulus_cauchy(1.0, 5.0, c(0.5, 0.0)).unwrap();
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn renormalized_disk_quantities() {
        // Â(D_r) = ln r² and Ĉ_{D_r}(w) = ln r²/w outside
        let m = disk(1.7);
        let e = AreaEngine::new(&m, None, &RuleOpts::default()).unwrap();
        assert!((e.renormalized_area() - (1.7f64 * 1.7).ln()).abs() < 1e-10);
        let w = c(2.0, 1.0);
        assert!((e.renormalized_cauchy(w) - (1.7f64 * 1.7).ln() / w).norm() < 1e-10);
        // exterior disk: Â = −ln r², Ĉ(w) = 0 outside... inside the hole w: (ln|w|² − ln r²)/w is for |w|>r,
        // for |w| < r the transform of |ξ| > r vanishes
        let u = RiemannMap::new(Side::Unbounded, c(1.7, 0.0), Inner::Z, RationalFn::zero()).unwrap();
        let eu = AreaEngine::new(&u, None, &RuleOpts::default()).unwrap();
        assert!((eu.renormalized_area() + (1.7f64 * 1.7).ln()).abs() < 1e-10);
        assert!(eu.renormalized_cauchy(c(0.5, 0.3)).norm() < 1e-10);
    }

    #[test]
    fn excision_is_cutoff_independent() {
        // ∫_{D_R∖D_r} dA/|w|² + ln r² = ln R²
        let m = disk(1.3);
        for r in [0.1, 0.5, 1.0] {
            let a = weighted_area(Region::DomainMinusDisk(&m, r)).unwrap();
            assert!((a + (r * r).ln() - (1.69f64).ln()).abs() < 1e-10);
        }
        assert!(matches!(
            weighted_area(Region::DomainMinusDisk(&m, 1.4)),
            Err(Error::CutoffViolation { .. })
        ));
    }

    #[test]
    fn boundary_patch_cauchy() {
        // Ĉ_{D_R}(w) on |w| = R equals ln R²/w
        let m = disk(1.3);
        for k in 0..4 {
            let z = C64::from_polar(1.0, 0.3 + 1.4 * k as f64);
            let e = AreaEngine::new(&m, Some(z), &RuleOpts::default()).unwrap();
            let w = m.eval(z);
            assert!((e.renormalized_cauchy(w) - (1.69f64).ln() / w).norm() < 1e-8);
        }
    }
}
