//! Numerical checks: quadrature identity, coincidence equation, univalence,
//! the λ_max threshold and exterior field grids.

use crate::complexpoly::{Poly, RationalFn};
use crate::contour::{write_atomic, AreaEngine, BoundaryCurve};
use crate::lqd::LQDInstance;
use crate::maps::{Inner, RiemannMap, Side};
use crate::quad::RuleOpts;
use crate::solve::{golden_section, newton, NewtonOpts};
use crate::{Error, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub ms: f64,
}

impl VerificationReport {
    pub fn new(check: &str, residual: f64, tol: f64, start: Instant) -> Self {
        VerificationReport {
            check: check.to_string(),
            residual,
            tol,
            pass: residual <= tol,
            ms: start.elapsed().as_secs_f64() * 1e3,
        }
    }
}

/// Area rule resolution matched to the boundary sample count.
pub fn rule_for(n: usize) -> RuleOpts {
    RuleOpts { n_theta: (n / 2).max(128), gl: 8 + n / 128, ..RuleOpts::default() }
}

// ---------------------------------------------------------------- battery

#[derive(Clone, Debug)]
pub struct TestFunctionBattery {
    pub functions: Vec<RationalFn>,
    pub labels: Vec<String>,
    pub vanish_at_zero: bool,
    pub vanish_at_infinity: bool,
}

fn diameter(bc: &BoundaryCurve) -> f64 {
    let n = bc.n() as f64;
    let cen: C64 = bc.w.iter().sum::<C64>() / n;
    2.0 * bc.w.iter().map(|w| (w - cen).norm()).fold(0.0, f64::max)
}

/// Points of Ωext placed off the boundary along the normal, well separated
/// from each other and from 0. Deterministic.
pub fn exterior_points(map: &RiemannMap, bc: &BoundaryCurve, count: usize) -> Vec<C64> {
    let n = bc.n();
    let diam = diameter(bc);
    let fracs: &[f64] = match map.side {
        Side::Bounded => &[0.5, 0.35, 0.25, 0.15],
        Side::Unbounded => &[0.3, 0.2, 0.12, 0.07],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x51ab);
    let mut out: Vec<C64> = Vec::new();
    for _ in 0..400 {
        if out.len() == count {
            break;
        }
        let k = rng.gen_range(0..n);
        let t = bc.dw[k] / bc.dw[k].norm();
        let dir = match map.side {
            Side::Bounded => -C64::i() * t,
            Side::Unbounded => C64::i() * t,
        };
        for f in fracs {
            let d = f * diam;
            let p = bc.w[k] + dir * d;
            let ok = !bc.in_region(p)
                && bc.dist(p) >= 0.8 * d
                && p.norm() >= 0.1 * diam
                && out.iter().all(|q| (q - p).norm() >= 0.1 * diam);
            if ok {
                out.push(p);
                break;
            }
        }
    }
    out
}

/// Low-order moments and Cauchy-type kernels with poles in Ωext, subject to
/// the vanishing conditions of the domain.
pub fn default_battery(map: &RiemannMap) -> TestFunctionBattery {
    let bc = map.boundary(1024);
    let singular = map.contains_zero();
    let unbounded = map.side == Side::Unbounded;
    let mut fs: Vec<(String, RationalFn)> = Vec::new();
    let w = |k: usize| RationalFn::from_poly(Poly::monomial(ONE, k));
    let kern = |p: C64, k: usize| RationalFn::pole(ONE, p, k);
    match (unbounded, singular) {
        (false, false) => {
            let ps = exterior_points(map, &bc, 4);
            for k in 0..4 {
                fs.push((format!("w^{k}"), w(k)));
            }
            for (j, &p) in ps.iter().enumerate() {
                fs.push((format!("1/(w-p{j})"), kern(p, 1)));
                fs.push((format!("1/(w-p{j})^2"), kern(p, 2)));
            }
            if !bc.in_region(ZERO) && bc.dist(ZERO) > 0.1 * diameter(&bc) {
                fs.push(("1/w".into(), kern(ZERO, 1)));
                fs.push(("1/w^2".into(), kern(ZERO, 2)));
            }
        }
        (false, true) => {
            let ps = exterior_points(map, &bc, 4);
            for k in 1..=4 {
                fs.push((format!("w^{k}"), w(k)));
            }
            for (j, &p) in ps.iter().enumerate() {
                fs.push((format!("w/(w-p{j})"), kern(p, 1).mul_w()));
                fs.push((format!("w/(w-p{j})^2"), kern(p, 2).mul_w()));
            }
        }
        (true, false) => {
            let ps = exterior_points(map, &bc, 3);
            for k in 1..=3 {
                fs.push((format!("w^-{k}"), kern(ZERO, k)));
            }
            for (j, &p) in ps.iter().enumerate() {
                fs.push((format!("1/(w-p{j})"), kern(p, 1)));
                fs.push((format!("1/(w-p{j})^2"), kern(p, 2)));
                fs.push((format!("1/(w(w-p{j}))"), kern(p, 1).mul(&kern(ZERO, 1))));
            }
        }
        (true, true) => {
            let ps = exterior_points(map, &bc, 4);
            for (j, &p) in ps.iter().enumerate() {
                fs.push((format!("w/(w-p{j})^2"), kern(p, 2).mul_w()));
                fs.push((format!("w/(w-p{j})^3"), kern(p, 3).mul_w()));
                fs.push((format!("w^2/(w-p{j})^3"), kern(p, 3).mul_w().mul_w()));
            }
        }
    }
    let (labels, functions) = fs.into_iter().unzip();
    TestFunctionBattery { functions, labels, vanish_at_zero: singular, vanish_at_infinity: unbounded }
}

/// Rejects members with poles on Cl(Ω) or missing a required zero.
pub fn check_battery(b: &TestFunctionBattery, map: &RiemannMap, bc: &BoundaryCurve) -> Result<()> {
    let scale = diameter(bc);
    for (f, name) in b.functions.iter().zip(&b.labels) {
        for (p, _) in f.pole_locations() {
            if bc.in_region(p) || bc.dist(p) < bc.eps_near() {
                return Err(Error::InadmissibleTestFunction(format!("{name}: pole {p} in the closed domain")));
            }
        }
        if map.contains_zero() {
            let v = f.eval(ZERO).map_err(|_| Error::InadmissibleTestFunction(format!("{name}: pole at 0")))?;
            if v.norm() > 1e-12 {
                return Err(Error::InadmissibleTestFunction(format!("{name}: f(0) = {v} but 0 lies in the domain")));
            }
        }
        if map.side == Side::Unbounded {
            match f.at_infinity() {
                Some(v) if v.norm() <= 1e-12 * (1.0 + scale) => {}
                _ => return Err(Error::InadmissibleTestFunction(format!("{name}: must vanish at infinity"))),
            }
        }
    }
    Ok(())
}

/// max_f |∫_Ω f/|w|² dA − ∮ f h dw| / (1 + |∮ f h dw|) for the given h.
pub fn quadrature_residual(map: &RiemannMap, h: &RationalFn, battery: &TestFunctionBattery, n: usize) -> Result<f64> {
    let bc = map.boundary(n);
    check_battery(battery, map, &bc)?;
    let engine = AreaEngine::new(map, None, &rule_for(n))?;
    let hv: Vec<C64> = bc.w.iter().map(|&w| h.eval_unchecked(w)).collect();
    let mut worst: f64 = 0.0;
    for f in &battery.functions {
        let vals: Vec<C64> = bc.w.iter().zip(&hv).map(|(&w, hw)| f.eval_unchecked(w) * hw).collect();
        let contour = bc.integrate_samples(&vals);
        let area = engine.weighted(|w| f.eval_unchecked(w));
        let r = (area - contour).norm() / (1.0 + contour.norm());
        if !r.is_finite() {
            return Err(Error::NonFinite("quadrature residual".into()));
        }
        worst = worst.max(r);
    }
    Ok(worst)
}

pub fn verify_quadrature(
    inst: &LQDInstance,
    battery: &TestFunctionBattery,
    n: usize,
    tol: f64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let r = quadrature_residual(&inst.map, &inst.quad.h, battery, n)?;
    Ok(VerificationReport::new("quadrature", r, tol, start))
}

/// Coincidence residual sup |ln|w|²/w − h − q/w − G| on ∂Ω for a given charge,
/// with G = ln|w|²/w − Ĉ_Ω(w) computed by the area engine.
pub fn coincidence_residual(map: &RiemannMap, h: &RationalFn, q: C64, points: usize, n: usize) -> Result<f64> {
    let opts = rule_for(n);
    let mut worst: f64 = 0.0;
    for j in 0..points {
        let zeta = C64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.25) / points as f64);
        let z = match map.side {
            Side::Bounded => zeta,
            Side::Unbounded => zeta,
        };
        let w = map.eval(z);
        let engine = AreaEngine::new(map, Some(zeta), &opts)?;
        let lg = C64::new(w.norm_sqr().ln(), 0.0) / w;
        let g = lg - engine.renormalized_cauchy(w);
        let r = (lg - h.eval_unchecked(w) - q / w - g).norm();
        worst = worst.max(r);
    }
    Ok(worst)
}

/// sup |e^{wS₀(w)}/w − w̄| / (1 + |w|) over boundary samples.
pub fn lift_residual(map: &RiemannMap, n: usize) -> f64 {
    (0..n)
        .map(|k| {
            let z = C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
            let w = map.eval(z);
            ((map.log_phi_phisharp(z)).exp() / w - w.conj()).norm() / (1.0 + w.norm())
        })
        .fold(0.0, f64::max)
}

/// Coincidence equation and the exponential lift of S₀.
pub fn verify_coincidence(inst: &LQDInstance, n: usize, tol: f64) -> Result<Vec<VerificationReport>> {
    let start = Instant::now();
    let r = coincidence_residual(&inst.map, &inst.quad.h, inst.quad.q, 32, n)?;
    let a = VerificationReport::new("coincidence", r, tol, start);
    let start = Instant::now();
    let l = lift_residual(&inst.map, n);
    let b = VerificationReport::new("schwarz_lift", l, tol, start);
    Ok(vec![a, b])
}

// ------------------------------------------------------------- univalence

#[derive(Clone, Debug, PartialEq)]
pub enum Univalence {
    Univalent,
    /// The boundary touches itself without crossing at φ(e^{is}) = φ(e^{it});
    /// the map is still injective on the open reference domain.
    Touching { s: f64, t: f64 },
    NotUnivalent { witness: Option<(f64, f64)>, reason: String },
}

impl Univalence {
    pub fn is_univalent(&self) -> bool {
        matches!(self, Univalence::Univalent | Univalence::Touching { .. })
    }
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn seg_point_dist(p: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let l2 = d.norm_sqr();
    if l2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / l2).clamp(0.0, 1.0);
    (p - a - d * t).norm()
}

fn circ(s: f64) -> C64 {
    C64::from_polar(1.0, s)
}

enum Refined {
    Crossing(f64, f64),
    Touching(f64, f64),
    Failed,
}

/// Newton on φ(e^{is}) = φ(e^{it}) with s ≠ t.
fn refine_pair(map: &RiemannMap, s0: f64, t0: f64) -> Refined {
    let f = |x: &[f64]| {
        let d = map.eval(circ(x[0])) - map.eval(circ(x[1]));
        Some(vec![d.re, d.im])
    };
    let Some(x) = newton(f, &[s0, t0], &NewtonOpts { tol: 1e-14, max_iter: 120 }) else { return Refined::Failed };
    let gap = (x[0] - x[1]).rem_euclid(2.0 * PI);
    if gap.min(2.0 * PI - gap) < 1e-6 {
        return Refined::Failed;
    }
    let tan = |s: f64| C64::i() * circ(s) * map.deriv(circ(s));
    let (a, b) = (tan(x[0]), tan(x[1]));
    let sin = cross(a, b).abs() / (a.norm() * b.norm());
    if sin > 1e-6 {
        Refined::Crossing(x[0], x[1])
    } else {
        Refined::Touching(x[0], x[1])
    }
}

/// Injectivity of φ on its reference domain: φ' must not vanish there
/// (argument principle on φ'), the boundary image must wind once with
/// positive orientation, and the sampled boundary must not cross itself.
pub fn univalence_check(map: &RiemannMap, n: usize) -> Result<Univalence> {
    let m = (4 * n).max(4096);
    let mut wind = 0.0;
    let mut prev = map.deriv(ONE);
    for k in 1..=m {
        let d = map.deriv(circ(2.0 * PI * k as f64 / m as f64));
        wind += (d / prev).arg();
        prev = d;
    }
    let crit = (wind / (2.0 * PI)).round() as i64;
    if crit != 0 {
        return Ok(Univalence::NotUnivalent {
            witness: None,
            reason: format!("derivative has {} zero(s) in the reference domain", crit.abs()),
        });
    }
    let bc = map.boundary(n);
    let w = &bc.w;
    let zeros = map.contains_zero() as i64;
    let expect = match map.side {
        Side::Bounded => zeros,
        Side::Unbounded => 1 - zeros,
    };
    if bc.dist(ZERO) > bc.eps_near() && bc.winding(ZERO) != expect {
        return Ok(Univalence::NotUnivalent { witness: None, reason: "wrong degree about 0".into() });
    }
    let area: f64 = (0..n).map(|k| cross(w[k], w[(k + 1) % n])).sum();
    if area <= 0.0 {
        return Ok(Univalence::NotUnivalent { witness: None, reason: "boundary is negatively oriented".into() });
    }

    let mean = (0..n).map(|k| (w[(k + 1) % n] - w[k]).norm()).sum::<f64>() / n as f64;
    let delta = 0.05 * mean;
    let bbox: Vec<[f64; 4]> = (0..n)
        .map(|k| {
            let (a, b) = (w[k], w[(k + 1) % n]);
            [a.re.min(b.re) - delta, a.re.max(b.re) + delta, a.im.min(b.im) - delta, a.im.max(b.im) + delta]
        })
        .collect();
    let h = 2.0 * PI / n as f64;
    let mut crossing = None;
    let mut near = (f64::INFINITY, 0usize, 0usize);
    'outer: for i in 0..n {
        let (a, b) = (w[i], w[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (bi, bj) = (&bbox[i], &bbox[j]);
            if bi[1] < bj[0] || bj[1] < bi[0] || bi[3] < bj[2] || bj[3] < bi[2] {
                continue;
            }
            let (c, d) = (w[j], w[(j + 1) % n]);
            let d1 = cross(b - a, c - a);
            let d2 = cross(b - a, d - a);
            let d3 = cross(d - c, a - c);
            let d4 = cross(d - c, b - c);
            if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
                crossing = Some((i, j));
                break 'outer;
            }
            let gap = (j - i).min(n + i - j);
            if gap >= 3 {
                let dist = seg_point_dist(a, c, d)
                    .min(seg_point_dist(b, c, d))
                    .min(seg_point_dist(c, a, b))
                    .min(seg_point_dist(d, a, b));
                if dist < near.0 {
                    near = (dist, i, j);
                }
            }
        }
    }
    if let Some((i, j)) = crossing {
        let (s0, t0) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
        return match refine_pair(map, s0, t0) {
            Refined::Crossing(s, t) => Ok(Univalence::NotUnivalent {
                witness: Some((s, t)),
                reason: "boundary crosses itself".into(),
            }),
            Refined::Touching(s, t) => Ok(Univalence::Touching { s, t }),
            Refined::Failed => Err(Error::Inconclusive(s0, t0)),
        };
    }
    if near.0 < delta {
        let (s0, t0) = ((near.1 as f64 + 0.5) * h, (near.2 as f64 + 0.5) * h);
        return match refine_pair(map, s0, t0) {
            Refined::Crossing(s, t) => Ok(Univalence::NotUnivalent {
                witness: Some((s, t)),
                reason: "boundary crosses itself between samples".into(),
            }),
            Refined::Touching(s, t) => Ok(Univalence::Touching { s, t }),
            Refined::Failed if near.0 < 1e-10 * (1.0 + diameter(&bc)) => Err(Error::Inconclusive(s0, t0)),
            Refined::Failed => Ok(Univalence::Univalent),
        };
    }
    Ok(Univalence::Univalent)
}

/// (π − δ(θ))/sin θ with δ(θ) = Arg((1+ρ²)cos θ − 2ρ cos σ + i(1−ρ²) sin θ),
/// written as atan2(Im, −Re)/sin θ, which is exact near θ = π; the value at
/// θ = π is the one-sided limit.
fn lambda_objective(rho: f64, sigma: f64, th: f64) -> f64 {
    let re = (1.0 + rho * rho) * th.cos() - 2.0 * rho * sigma.cos();
    let s = th.sin();
    if s < 1e-12 {
        return (1.0 - rho * rho) / ((1.0 + rho * rho) + 2.0 * rho * sigma.cos());
    }
    let im = (1.0 - rho * rho) * s;
    im.atan2(-re) / s
}

/// Largest |λ| for which (1/|z₀|) b_{z₀}(z) e^{λz} is univalent on the disk,
/// and the minimizing θ. Depends on z₀ and arg λ only through |z₀| and
/// Arg z₀ + arg λ.
pub fn lambda_max(z0: C64, arg_lambda: f64) -> Result<(f64, f64)> {
    let rho = z0.norm();
    if rho >= 1.0 {
        return Err(Error::RangeError(format!("|z0| must be < 1, got {rho}")));
    }
    let sigma = if rho == 0.0 { 0.0 } else { z0.arg() + arg_lambda };
    let f = |th: f64| lambda_objective(rho, sigma, th);
    let m = 256;
    let (mut best, mut jb) = (f64::INFINITY, 1);
    for j in 1..=m {
        let v = f(PI * j as f64 / m as f64);
        if v < best {
            best = v;
            jb = j;
        }
    }
    let lo = PI * (jb - 1) as f64 / m as f64;
    let hi = (PI * (jb + 1) as f64 / m as f64).min(PI);
    let (th, v) = golden_section(f, lo, hi, 1e-10);
    let (th, v) = if f(PI) <= v { (PI, f(PI)) } else { (th, v) };
    Ok((v, th))
}

/// (1/|z₀|) b_{z₀}(z) e^{λz}, or z e^{λz} when z₀ = 0.
pub fn lambda_family_map(z0: C64, lambda: C64) -> Result<RiemannMap> {
    let e = RationalFn::from_poly(Poly::new(vec![ZERO, lambda]));
    if z0 == ZERO {
        RiemannMap::new(Side::Bounded, ONE, Inner::Z, e)
    } else {
        RiemannMap::new(Side::Bounded, C64::new(1.0 / z0.norm(), 0.0), Inner::Blaschke(z0), e)
    }
}

// ------------------------------------------------------------ field grid

#[derive(Clone, Debug)]
pub struct FieldSample {
    pub w: C64,
    /// Ĉ_Ω(w), the renormalized weighted Cauchy transform.
    pub field: C64,
    /// |Ĉ_Ω(w) − h(w) − q/w|.
    pub abs_diff: f64,
}

#[derive(Clone, Debug, Default)]
pub struct FieldGrid {
    pub samples: Vec<FieldSample>,
    /// Points rejected for lying in Cl(Ω) or too close to ∂Ω.
    pub excluded: Vec<C64>,
}

impl FieldGrid {
    pub fn max_diff(&self) -> f64 {
        self.samples.iter().map(|s| s.abs_diff).fold(0.0, f64::max)
    }

    /// CSV `re,im,dre,dim,abs_diff`; (dre, dim) is the conjugate field.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("re,im,dre,dim,abs_diff\n");
        for p in &self.samples {
            let f = p.field.conj();
            s.push_str(&format!("{:.12e},{:.12e},{:.12e},{:.12e},{:.6e}\n", p.w.re, p.w.im, f.re, f.im, p.abs_diff));
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv().as_bytes())
    }
}

/// Compares the exterior field with h + q/w at the given points.
pub fn field_grid(inst: &LQDInstance, points: &[C64], n: usize) -> Result<FieldGrid> {
    let map = &inst.map;
    let bc = map.boundary(n);
    let opts = rule_for(n);
    let diam = diameter(&bc);
    let far = AreaEngine::new(map, None, &opts)?;
    let mut out = FieldGrid::default();
    for &w in points {
        let d = bc.dist(w);
        if bc.in_region(w) || d < bc.eps_near() {
            out.excluded.push(w);
            continue;
        }
        let field = if d < 0.2 * diam {
            let k = (0..bc.n()).min_by(|&a, &b| (bc.w[a] - w).norm().partial_cmp(&(bc.w[b] - w).norm()).unwrap()).unwrap();
            AreaEngine::new(map, Some(C64::from_polar(1.0, bc.t(k))), &opts)?.renormalized_cauchy(w)
        } else {
            far.renormalized_cauchy(w)
        };
        let abs_diff = (field - inst.quad.eval_with_charge(w)).norm();
        out.samples.push(FieldSample { w, field, abs_diff });
    }
    Ok(out)
}

/// Row-major lattice over the boundary's bounding box (enlarged by 60%),
/// keeping the first `count` points of Ωext at distance ≥ 5% of the diameter.
pub fn exterior_grid(map: &RiemannMap, count: usize) -> Vec<C64> {
    let bc = map.boundary(1024);
    let diam = diameter(&bc);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for w in &bc.w {
        x0 = x0.min(w.re);
        x1 = x1.max(w.re);
        y0 = y0.min(w.im);
        y1 = y1.max(w.im);
    }
    let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
    let (hx, hy) = (0.8 * (x1 - x0), 0.8 * (y1 - y0));
    let mut side = 30;
    loop {
        let mut out = Vec::new();
        for i in 0..side {
            for j in 0..side {
                let w = C64::new(
                    cx - hx + 2.0 * hx * (j as f64 + 0.5) / side as f64,
                    cy - hy + 2.0 * hy * (i as f64 + 0.5) / side as f64,
                );
                if !bc.in_region(w) && bc.dist(w) >= (0.05 * diam).max(bc.eps_near()) {
                    out.push(w);
                    if out.len() == count {
                        return out;
                    }
                }
            }
        }
        side += 10;
        if side > 200 {
            return out;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    #[test]
    fn exponential_threshold() {
        let ok = lambda_family_map(ZERO, c(0.99, 0.0)).unwrap();
        assert_eq!(univalence_check(&ok, 1024).unwrap(), Univalence::Univalent);
        let bad = lambda_family_map(ZERO, c(1.05, 0.0)).unwrap();
        assert!(!univalence_check(&bad, 1024).unwrap().is_univalent());
    }

    #[test]
    fn lambda_max_at_origin() {
        let (v, th) = lambda_max(ZERO, 0.3).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
        assert!((th - PI).abs() < 1e-6);
    }

    #[test]
    fn objective_limit_is_continuous() {
        let (rho, sig) = (0.5, 0.7);
        let a = lambda_objective(rho, sig, PI);
        let b = lambda_objective(rho, sig, PI - 1e-7);
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn lambda_max_brackets() {
        let z0 = c(0.5, 0.0);
        let (v, _) = lambda_max(z0, 0.0).unwrap();
        let at = |f: f64| univalence_check(&lambda_family_map(z0, c(f * v, 0.0)).unwrap(), 2048).unwrap();
        assert!(at(0.99).is_univalent());
        assert!(!at(1.01).is_univalent());
    }

    #[test]
    fn segment_distance() {
        assert!((seg_point_dist(c(0.0, 1.0), c(-1.0, 0.0), c(1.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((seg_point_dist(c(3.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)) - 2.0).abs() < 1e-15);
    }
}
