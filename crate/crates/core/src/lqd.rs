//! Log-weighted quadrature domain instances: family constructors, the direct
//! and inverse problems, charges, the Schwarz function and transforms.

use crate::complexpoly::{rat_principal_parts, Location, PolePart, Poly, RationalFn};
use crate::contour::AreaEngine;
use crate::faber::{faber_rational, inv_faber_rational, FaberContext};
use crate::maps::{blaschke, Inner, RiemannMap, Side};
use crate::quad::RuleOpts;
use crate::solve::{bracket_roots, multi_start, NewtonOpts};
use crate::verify::{univalence_check, Univalence};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const UNIV_N: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    NullDisk,
    ExpImage,
    OneptBoundedNonsingular,
    OneptUnboundedNonsingular,
    OneptBoundedSingular,
    OneptUnboundedSingular,
    Constant,
    MonomialNonsingular,
    MonomialSingularK2,
    TwopointSymmetric,
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::NullDisk => "null_disk",
            FamilyKind::ExpImage => "exp_image",
            FamilyKind::OneptBoundedNonsingular => "onept_bounded_nonsingular",
            FamilyKind::OneptUnboundedNonsingular => "onept_unbounded_nonsingular",
            FamilyKind::OneptBoundedSingular => "onept_bounded_singular",
            FamilyKind::OneptUnboundedSingular => "onept_unbounded_singular",
            FamilyKind::Constant => "constant",
            FamilyKind::MonomialNonsingular => "monomial_nonsingular",
            FamilyKind::MonomialSingularK2 => "monomial_singular_k2",
            FamilyKind::TwopointSymmetric => "twopoint_symmetric",
        }
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Family parameters. Complex values serialize as `[re, im]`.
///
/// `center` is the disk center for `exp_image` (radius `r`). `z0` selects the
/// singular branch of `constant`; `z0` together with `z1` selects the
/// map-first construction of `onept_unbounded_singular`. `exterior` picks the
/// exterior null disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w0: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z0: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z1: Option<C64>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub exterior: bool,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind) -> Self {
        FamilySpec {
            kind,
            alpha: None,
            w0: None,
            c: None,
            q: None,
            k: None,
            r: None,
            center: None,
            z0: None,
            z1: None,
            exterior: false,
        }
    }
}

fn need<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::RangeError(format!("missing parameter `{name}`")))
}

fn positive(v: f64, name: &str) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::RangeError(format!("`{name}` must be positive, got {v}")))
    }
}

fn real(v: C64, name: &str) -> Result<f64> {
    if v.im.abs() <= 1e-12 * (1.0 + v.re.abs()) {
        Ok(v.re)
    } else {
        Err(Error::RangeError(format!("`{name}` must be real, got {v}")))
    }
}

/// A pole of h: finite point or ∞, with its order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub at: Option<C64>,
    pub order: usize,
}

/// Quadrature function h, charge q and the nodes of h.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuadratureData {
    pub h: RationalFn,
    pub q: C64,
    pub nodes: Vec<Node>,
}

impl QuadratureData {
    pub fn new(h: RationalFn, q: C64) -> Self {
        let mut nodes: Vec<Node> = h.pole_locations().into_iter().map(|(p, k)| Node { at: Some(p), order: k }).collect();
        let poly = h.poly_part().trim_rel(1e-14);
        if !poly.is_zero() {
            nodes.push(Node { at: None, order: poly.degree() + 1 });
        }
        QuadratureData { h, q, nodes }
    }

    /// h(w) + q/w.
    pub fn eval_with_charge(&self, w: C64) -> C64 {
        self.h.eval_unchecked(w) + self.q / w
    }
}

/// Side, and whether 0 and ∞ lie in the domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub side: Side,
    pub contains_zero: bool,
    pub contains_infinity: bool,
}

/// Parameters found while solving a family, plus diagnostics.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolvedParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z0: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z1: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_plus: Option<f64>,
    /// Weight of h when it is an output (map-first construction).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<C64>,
    /// ln|c z₀|² − 2α W₂(0) for the singular monomial family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_alt: Option<C64>,
    /// Residual of the z₀–λ relation written with z₀ and with z̄₀; the two
    /// agree when z₀ or λ is real.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation_residual: Option<[f64; 2]>,
    /// Branch index of the logarithm fixing λ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<i32>,
    /// Fit residual of a numerically extracted h.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_residual: Option<f64>,
    pub solutions: usize,
    pub univalent_solutions: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LQDInstance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<FamilySpec>,
    pub origin: String,
    pub map: RiemannMap,
    pub quad: QuadratureData,
    pub solved: SolvedParams,
}

impl LQDInstance {
    pub fn domain(&self) -> DomainSpec {
        DomainSpec {
            side: self.map.side,
            contains_zero: self.map.contains_zero(),
            contains_infinity: self.map.side == Side::Unbounded,
        }
    }

    pub fn singular(&self) -> bool {
        self.map.contains_zero()
    }
}

fn accept(u: &Univalence) -> bool {
    matches!(u, Univalence::Univalent | Univalence::Touching { .. })
}

/// Keeps the first univalent candidate; records how many there were.
fn pick(cands: Vec<(RiemannMap, SolvedParams)>, what: &str) -> Result<(RiemannMap, SolvedParams)> {
    let total = cands.len();
    if total == 0 {
        return Err(Error::NoSolution(what.to_string()));
    }
    let mut good = Vec::new();
    let mut err = None;
    for (m, s) in cands {
        match univalence_check(&m, UNIV_N) {
            Ok(u) if accept(&u) => good.push((m, s)),
            Ok(_) => {}
            Err(e) => err = Some(e),
        }
    }
    let n = good.len();
    match good.into_iter().next() {
        Some((m, mut s)) => {
            s.solutions = total;
            s.univalent_solutions = n;
            Ok((m, s))
        }
        None => Err(err.unwrap_or_else(|| {
            Error::NotUnivalent(format!("{what}: none of {total} solutions is univalent"))
        })),
    }
}

fn single(m: RiemannMap, s: SolvedParams, what: &str) -> Result<(RiemannMap, SolvedParams)> {
    pick(vec![(m, s)], what)
}

fn instance(spec: &FamilySpec, map: RiemannMap, h: RationalFn, q: C64, solved: SolvedParams) -> LQDInstance {
    LQDInstance {
        spec: Some(spec.clone()),
        origin: spec.kind.name().to_string(),
        quad: QuadratureData::new(h, q),
        map,
        solved,
    }
}

fn cx(v: &[f64], i: usize) -> C64 {
    C64::new(v[2 * i], v[2 * i + 1])
}

fn ring_seeds(radii: &[f64], m: usize, phase: f64) -> Vec<C64> {
    let mut out = Vec::new();
    for &r in radii {
        for j in 0..m {
            out.push(C64::from_polar(r, phase + 2.0 * PI * j as f64 / m as f64));
        }
    }
    out
}

/// E(z) = λ/(1 − z z̄₁).
fn exterior_pole(lambda: C64, z1: C64) -> RationalFn {
    RationalFn::pole(-lambda / z1.conj(), z1.conj().inv(), 1)
}

/// λ = (1 − |z₁|²)(ln(w₀/P) + 2πik), where P is the map without its
/// exponential factor evaluated at z₁.
fn branch_lambda(w0: C64, p: C64, z1: C64, k: i32) -> C64 {
    ((w0 / p).ln() + C64::new(0.0, 2.0 * PI * k as f64)) * (1.0 - z1.norm_sqr())
}

pub fn build_family(spec: &FamilySpec) -> Result<LQDInstance> {
    match spec.kind {
        FamilyKind::NullDisk => null_disk(spec),
        FamilyKind::ExpImage => {
            let mut inst = exp_image(spec.center.unwrap_or(ZERO), need(spec.r, "r")?, 2048)?;
            inst.spec = Some(spec.clone());
            Ok(inst)
        }
        FamilyKind::OneptBoundedNonsingular => onept_bounded_nonsingular(spec),
        FamilyKind::OneptUnboundedNonsingular => onept_unbounded_nonsingular(spec),
        FamilyKind::OneptBoundedSingular => onept_bounded_singular(spec),
        FamilyKind::OneptUnboundedSingular => {
            if spec.z0.is_some() && spec.z1.is_some() {
                onept_unbounded_map_first(spec)
            } else {
                onept_unbounded_singular(spec)
            }
        }
        FamilyKind::Constant => constant(spec),
        FamilyKind::MonomialNonsingular => monomial_nonsingular(spec),
        FamilyKind::MonomialSingularK2 => monomial_singular_k2(spec),
        FamilyKind::TwopointSymmetric => twopoint_symmetric(spec),
    }
}

fn null_disk(spec: &FamilySpec) -> Result<LQDInstance> {
    let r = positive(need(spec.r, "r")?, "r")?;
    let (side, q) = if spec.exterior { (Side::Unbounded, ZERO) } else { (Side::Bounded, C64::new((r * r).ln(), 0.0)) };
    let map = RiemannMap::new(side, C64::new(r, 0.0), Inner::Z, RationalFn::zero())?;
    let (map, s) = single(map, SolvedParams::default(), "null disk")?;
    Ok(instance(spec, map, RationalFn::zero(), q, s))
}

fn one_point_h(alpha: C64, w0: C64) -> RationalFn {
    RationalFn::pole(alpha, w0, 1)
}

fn onept_bounded_nonsingular(spec: &FamilySpec) -> Result<LQDInstance> {
    let w0 = need(spec.w0, "w0")?;
    let alpha = need(spec.alpha, "alpha")?;
    let a = real(alpha, "alpha")?;
    if !(a > 0.0 && a <= PI * PI) || w0 == ZERO {
        return Err(Error::RangeError(format!("need 0 < alpha <= pi^2 and w0 != 0, got alpha = {a}, w0 = {w0}")));
    }
    let lambda = w0.conj() / w0.norm() * a.sqrt();
    let e = RationalFn::from_poly(Poly::new(vec![ZERO, lambda]));
    let map = RiemannMap::normalized(Side::Bounded, w0, Inner::One, e)?;
    let s = SolvedParams { lambda: Some(lambda), ..Default::default() };
    let (map, s) = single(map, s, "one-point bounded")?;
    Ok(instance(spec, map, one_point_h(alpha, w0), ZERO, s))
}

fn onept_unbounded_nonsingular(spec: &FamilySpec) -> Result<LQDInstance> {
    let w0 = need(spec.w0, "w0")?;
    let alpha = need(spec.alpha, "alpha")?;
    let c = positive(need(spec.c, "c")?, "c")?;
    if w0 == ZERO {
        return Err(Error::RangeError("w0 must be nonzero".into()));
    }
    let mut cands = Vec::new();
    for k in [0, -1, 1] {
        let f = |x: &[f64]| {
            let z1 = cx(x, 0);
            if z1.norm() <= 1.0 + 1e-9 {
                return None;
            }
            let lam = branch_lambda(w0, c * z1, z1, k);
            let d = 1.0 - z1.norm_sqr();
            let dphi = w0 * (z1.inv() + lam * z1.conj() / (d * d));
            let r = lam * z1.conj() * dphi.conj() - alpha.conj() * w0.conj();
            Some(vec![r.re, r.im])
        };
        let seeds: Vec<Vec<f64>> =
            ring_seeds(&[1.1, 1.5, 2.5, 4.0], 8, w0.arg()).into_iter().map(|z| vec![z.re, z.im]).collect();
        for root in multi_start(f, &seeds, &NewtonOpts::default()) {
            let z1 = cx(&root, 0);
            let lam = branch_lambda(w0, c * z1, z1, k);
            let Ok(map) = RiemannMap::new(Side::Unbounded, C64::new(c, 0.0), Inner::Z, exterior_pole(lam, z1)) else {
                continue;
            };
            if (map.eval(z1) - w0).norm() > 1e-8 * (1.0 + w0.norm()) {
                continue;
            }
            let s = SolvedParams { z1: Some(z1), lambda: Some(lam), branch: Some(k), ..Default::default() };
            cands.push((map, s));
        }
    }
    let (map, s) = pick(dedup_maps(cands), "one-point unbounded")?;
    Ok(instance(spec, map, one_point_h(alpha, w0), ZERO, s))
}

/// Different branches can converge to the same map.
fn dedup_maps(cands: Vec<(RiemannMap, SolvedParams)>) -> Vec<(RiemannMap, SolvedParams)> {
    let mut out: Vec<(RiemannMap, SolvedParams)> = Vec::new();
    for (m, s) in cands {
        let probe = |mm: &RiemannMap| {
            (0..8).map(|j| mm.eval(C64::from_polar(1.0, 0.3 + j as f64 * PI / 4.0))).collect::<Vec<_>>()
        };
        let pm = probe(&m);
        let dup = out.iter().any(|(o, _)| probe(o).iter().zip(&pm).all(|(a, b)| (a - b).norm() < 1e-9 * (1.0 + a.norm())));
        if !dup {
            out.push((m, s));
        }
    }
    out
}

/// φ = (w₀/|z₀|) b_{z₀}(z) e^{λz} with φ(0) = w₀ and φ(z₀) = 0.
fn bounded_singular_map(w0: C64, z0: C64, lambda: C64) -> Result<RiemannMap> {
    let e = RationalFn::from_poly(Poly::new(vec![ZERO, lambda]));
    RiemannMap::new(Side::Bounded, w0 / z0.norm(), Inner::Blaschke(z0), e)
}

fn onept_bounded_singular(spec: &FamilySpec) -> Result<LQDInstance> {
    let w0 = need(spec.w0, "w0")?;
    let alpha = need(spec.alpha, "alpha")?;
    let q = need(spec.q, "q")?;
    if w0 == ZERO {
        return Err(Error::RangeError("w0 must be nonzero".into()));
    }
    let aw = w0.norm_sqr();
    // unknowns z₀ and p = φ'(0) > 0; λ = ᾱ w̄₀ / p
    let charge = |z0: C64, p: f64| {
        C64::new(aw.ln() - z0.norm_sqr().ln(), 0.0) + (alpha * w0 / z0 + alpha.conj() * w0.conj() * z0) / p
    };
    let f = |x: &[f64]| {
        let z0 = C64::new(x[0], x[1]);
        let p = x[2];
        if z0.norm() >= 1.0 - 1e-12 || z0.norm() < 1e-12 || p <= 0.0 {
            return None;
        }
        let rel = p - w0 * (z0.conj() - z0.inv()) - alpha.conj() * aw / p;
        let qr = charge(z0, p) - q;
        Some(vec![rel.re, rel.im, qr.re])
    };
    let mut seeds = Vec::new();
    for z0 in ring_seeds(&[0.15, 0.35, 0.55, 0.75, 0.9], 8, 0.1) {
        let a = w0 * (z0.conj() - z0.inv());
        let disc = (a * a + 4.0 * aw * alpha.conj()).sqrt();
        for p in [(a + disc) * 0.5, (a - disc) * 0.5] {
            if p.norm() > 1e-6 {
                seeds.push(vec![z0.re, z0.im, p.norm()]);
            }
        }
    }
    let mut cands = Vec::new();
    for root in multi_start(f, &seeds, &NewtonOpts::default()) {
        let z0 = C64::new(root[0], root[1]);
        let p = root[2];
        let qc = charge(z0, p);
        if (qc.im - q.im).abs() > 1e-8 * (1.0 + q.norm()) {
            continue;
        }
        let lambda = alpha.conj() * w0.conj() / p;
        let Ok(map) = bounded_singular_map(w0, z0, lambda) else { continue };
        let d = 1.0 - z0.norm_sqr();
        let l2 = lambda.norm_sqr() - alpha.conj();
        let plain = (d * lambda - l2 * z0).norm();
        let conj = (d * lambda - l2 * z0.conj()).norm();
        let s = SolvedParams {
            z0: Some(z0),
            lambda: Some(lambda),
            relation_residual: Some([plain, conj]),
            ..Default::default()
        };
        cands.push((map, s));
    }
    if cands.is_empty() {
        return Err(Error::NoSolution(format!(
            "no bounded singular one-point domain with alpha = {alpha}, w0 = {w0}, q = {q}"
        )));
    }
    let (map, s) = pick(cands, "one-point bounded singular")?;
    let qv = map.log_phi_phisharp(map.zero().unwrap());
    Ok(instance(spec, map, one_point_h(alpha, w0), qv, s))
}

/// φ = c|z₀| z b_{z₀}(z) e^{E(z)}.
fn unbounded_singular_map(c: f64, z0: C64, e: RationalFn) -> Result<RiemannMap> {
    RiemannMap::new(Side::Unbounded, C64::new(c * z0.norm(), 0.0), Inner::ZBlaschke(z0), e)
}

/// φ'(z)/φ(z) for the unbounded singular one-point map.
fn unb_log_deriv(z0: C64, z1: C64, lam: C64, z: C64) -> C64 {
    let d = 1.0 - z * z1.conj();
    z.inv() + (z - z0).inv() - z0.conj() / (z0.conj() * z - 1.0) + lam * z1.conj() / (d * d)
}

fn onept_unbounded_singular(spec: &FamilySpec) -> Result<LQDInstance> {
    let w0 = need(spec.w0, "w0")?;
    let alpha = need(spec.alpha, "alpha")?;
    let c = positive(need(spec.c, "c")?, "c")?;
    let q = need(spec.q, "q")?;
    let bz = |z0: C64, z: C64| blaschke(z0).eval_unchecked(z);
    let mut cands = Vec::new();
    for k in [0, -1, 1] {
        let f = |x: &[f64]| {
            let (z0, z1) = (cx(x, 0), cx(x, 1));
            if z0.norm() <= 1.0 + 1e-9 || z1.norm() <= 1.0 + 1e-9 || (z0 - z1).norm() < 1e-6 {
                return None;
            }
            let lam = branch_lambda(w0, c * z0.norm() * z1 * bz(z0, z1), z1, k);
            let dphi = w0 * unb_log_deriv(z0, z1, lam, z1);
            let rel = lam * z1.conj() * dphi.conj() - alpha.conj() * w0.conj();
            let qv = lam / (1.0 - z0 * z1.conj()) + lam.conj() / (1.0 - z1 / z0) + (c * c * z0.norm_sqr()).ln() - q;
            Some(vec![rel.re, rel.im, qv.re, qv.im])
        };
        let mut seeds = Vec::new();
        for z0 in ring_seeds(&[1.5, 3.0], 4, PI / 4.0) {
            for z1 in ring_seeds(&[1.3, 2.0, 3.5], 4, w0.arg()) {
                seeds.push(vec![z0.re, z0.im, z1.re, z1.im]);
            }
        }
        for root in multi_start(f, &seeds, &NewtonOpts::default()) {
            let (z0, z1) = (cx(&root, 0), cx(&root, 1));
            let lam = branch_lambda(w0, c * z0.norm() * z1 * bz(z0, z1), z1, k);
            let Ok(map) = unbounded_singular_map(c, z0, exterior_pole(lam, z1)) else { continue };
            let s = SolvedParams { z0: Some(z0), z1: Some(z1), lambda: Some(lam), branch: Some(k), ..Default::default() };
            cands.push((map, s));
        }
    }
    let (map, s) = pick(dedup_maps(cands), "one-point unbounded singular")?;
    let qv = map.log_phi_phisharp(map.zero().unwrap());
    Ok(instance(spec, map, one_point_h(alpha, w0), qv, s))
}

/// Builds the map from (w₀, c, z₀, z₁) and reports the induced weight and
/// charge. Among the logarithm branches giving a univalent map, the one whose
/// weight is closest to `alpha` (when given) is used.
fn onept_unbounded_map_first(spec: &FamilySpec) -> Result<LQDInstance> {
    let w0 = need(spec.w0, "w0")?;
    let c = positive(need(spec.c, "c")?, "c")?;
    let z0 = need(spec.z0, "z0")?;
    let z1 = need(spec.z1, "z1")?;
    if z0.norm() <= 1.0 || z1.norm() <= 1.0 {
        return Err(Error::RangeError("z0 and z1 must lie outside the unit disk".into()));
    }
    let p = c * z0.norm() * z1 * blaschke(z0).eval(z1)?;
    let mut good = Vec::new();
    for k in [0, -1, 1] {
        let lam = branch_lambda(w0, p, z1, k);
        let Ok(map) = unbounded_singular_map(c, z0, exterior_pole(lam, z1)) else { continue };
        if !matches!(univalence_check(&map, UNIV_N), Ok(ref u) if accept(u)) {
            continue;
        }
        let dphi = w0 * unb_log_deriv(z0, z1, lam, z1);
        let alpha = lam.conj() * z1 * dphi / w0;
        good.push((map, alpha, lam, k));
    }
    let n = good.len();
    let target = spec.alpha;
    let best = good
        .into_iter()
        .min_by(|a, b| {
            let d = |x: &C64| target.map(|t| (x - t).norm()).unwrap_or(0.0);
            d(&a.1).partial_cmp(&d(&b.1)).unwrap()
        })
        .ok_or_else(|| Error::NotUnivalent("no logarithm branch gives a univalent map".into()))?;
    let (map, alpha, lam, k) = best;
    let qv = map.log_phi_phisharp(z0);
    let s = SolvedParams {
        z0: Some(z0),
        z1: Some(z1),
        lambda: Some(lam),
        alpha: Some(alpha),
        branch: Some(k),
        solutions: 3,
        univalent_solutions: n,
        ..Default::default()
    };
    Ok(instance(spec, map, one_point_h(alpha, w0), qv, s))
}

fn constant(spec: &FamilySpec) -> Result<LQDInstance> {
    let alpha = need(spec.alpha, "alpha")?;
    let c = positive(need(spec.c, "c")?, "c")?;
    if alpha.norm() * c >= 1.0 {
        return Err(Error::RangeError(format!("need |alpha| c < 1, got {}", alpha.norm() * c)));
    }
    let e = RationalFn::pole(alpha.conj() * c, ZERO, 1);
    let h = RationalFn::constant(alpha);
    match spec.z0 {
        None => {
            let map = RiemannMap::new(Side::Unbounded, C64::new(c, 0.0), Inner::Z, e)?;
            let (map, s) = single(map, SolvedParams::default(), "constant")?;
            Ok(instance(spec, map, h, ZERO, s))
        }
        Some(z0) => {
            if z0.norm() <= 1.0 {
                return Err(Error::RangeError("z0 must lie outside the unit disk".into()));
            }
            let map = unbounded_singular_map(c, z0, e)?;
            let s = SolvedParams { z0: Some(z0), ..Default::default() };
            let (map, s) = single(map, s, "constant singular")?;
            let qv = map.log_phi_phisharp(z0);
            Ok(instance(spec, map, h, qv, s))
        }
    }
}

fn monomial_nonsingular(spec: &FamilySpec) -> Result<LQDInstance> {
    let alpha = need(spec.alpha, "alpha")?;
    let c = positive(need(spec.c, "c")?, "c")?;
    let k = need(spec.k, "k")? as usize;
    if k == 0 {
        return Err(Error::RangeError("k must be at least 1".into()));
    }
    let kf = k as f64;
    let cmax = (kf * kf * alpha.norm()).powf(-1.0 / kf);
    if c >= cmax {
        return Err(Error::RangeError(format!("need c < {cmax} for univalence, got {c}")));
    }
    let e = RationalFn::pole(alpha.conj() * kf * c.powi(k as i32), ZERO, k);
    let map = RiemannMap::new(Side::Unbounded, C64::new(c, 0.0), Inner::Z, e)?;
    let (map, s) = single(map, SolvedParams::default(), "monomial")?;
    let h = RationalFn::from_poly(Poly::monomial(alpha * kf, k - 1));
    Ok(instance(spec, map, h, ZERO, s))
}

/// β(z₀) = 2c²(|z₀|² − 1)(4c²αz₀ + z̄₀) / (|z₀|²(16c⁴|α|² − 1)).
fn monomial_beta(alpha: C64, c: f64, z0: C64) -> C64 {
    let c2 = c * c;
    let a2 = z0.norm_sqr();
    2.0 * c2 * (a2 - 1.0) * (4.0 * c2 * alpha * z0 + z0.conj()) / (a2 * (16.0 * c2 * c2 * alpha.norm_sqr() - 1.0))
}

/// E = 2ᾱ(c² z⁻² + β z⁻¹).
fn monomial_exponent(alpha: C64, c: f64, beta: C64) -> RationalFn {
    let a = alpha.conj() * 2.0;
    RationalFn::from_parts(Poly::zero(), vec![PolePart::at(ZERO, vec![a * beta, a * c * c])])
}

/// The charge is ln|K|² + E(z₀) + E^#(z₀); the competing expression
/// ln|c z₀|² − 2αW₂(0) is reported alongside.
fn monomial_singular_k2(spec: &FamilySpec) -> Result<LQDInstance> {
    let alpha = need(spec.alpha, "alpha")?;
    let c = positive(need(spec.c, "c")?, "c")?;
    let q = need(spec.q, "q")?;
    if (16.0 * c.powi(4) * alpha.norm_sqr() - 1.0).abs() < 1e-12 {
        return Err(Error::RangeError("16 c^4 |alpha|^2 = 1".into()));
    }
    let charge = |z0: C64| {
        let b = monomial_beta(alpha, c, z0);
        let e = 2.0 * alpha.conj() * (c * c / (z0 * z0) + b / z0);
        let r = 2.0 * alpha * (c * c * z0 * z0 + b.conj() * z0);
        (c * c * z0.norm_sqr()).ln() + e + r
    };
    let f = |x: &[f64]| {
        let z0 = cx(x, 0);
        if z0.norm() <= 1.0 + 1e-9 {
            return None;
        }
        let r = charge(z0) - q;
        Some(vec![r.re, r.im])
    };
    let seeds: Vec<Vec<f64>> =
        ring_seeds(&[1.05, 1.2, 1.5, 2.0, 3.0, 5.0], 8, 0.1).into_iter().map(|z| vec![z.re, z.im]).collect();
    let mut cands = Vec::new();
    for root in multi_start(f, &seeds, &NewtonOpts::default()) {
        let z0 = cx(&root, 0);
        let beta = monomial_beta(alpha, c, z0);
        let Ok(map) = unbounded_singular_map(c, z0, monomial_exponent(alpha, c, beta)) else { continue };
        let s = SolvedParams { z0: Some(z0), beta: Some(beta), ..Default::default() };
        cands.push((map, s));
    }
    if cands.is_empty() {
        return Err(Error::NoSolution(format!("no singular monomial domain with alpha = {alpha}, c = {c}, q = {q}")));
    }
    let (map, mut s) = pick(cands, "singular monomial")?;
    let z0 = s.z0.unwrap();
    let ctx = FaberContext::new(&map, 3)?;
    let w2 = crate::faber::faber_polynomial(&ctx, 2, crate::faber::Direction::Inverse)?;
    s.q_alt = Some((c * c * z0.norm_sqr()).ln() - 2.0 * alpha * w2.coeff(0));
    let qv = map.log_phi_phisharp(z0);
    let h = RationalFn::from_poly(Poly::monomial(alpha * 2.0, 1));
    Ok(instance(spec, map, h, qv, s))
}

fn twopoint_lambda(q: f64, z: f64) -> f64 {
    (q + (z * z).ln()) / (z * z + 1.0 / (z * z))
}

fn twopoint_symmetric(spec: &FamilySpec) -> Result<LQDInstance> {
    let alpha = real(need(spec.alpha, "alpha")?, "alpha")?;
    let alpha = positive(alpha, "alpha")?;
    let q = real(need(spec.q, "q")?, "q")?;
    let g = |z: f64| {
        let l = twopoint_lambda(q, z);
        l * l + l * (z.powi(4) - 1.0) / (2.0 * z * z) - alpha
    };
    let roots = bracket_roots(g, 1e-3, 1.0 - 1e-9, 4000);
    let mut cands = Vec::new();
    for zp in roots {
        let l = twopoint_lambda(q, zp);
        let z2 = zp * zp;
        let num = Poly::new(vec![C64::new(-l * z2, 0.0), ZERO, C64::new(l, 0.0)]);
        let den = Poly::new(vec![C64::new(-1.0, 0.0), ZERO, C64::new(z2, 0.0)]);
        let Ok(map) = RiemannMap::normalized(Side::Bounded, C64::new(1.0 / zp, 0.0), Inner::Z, RationalFn::new(num, den)?)
        else {
            continue;
        };
        let s = SolvedParams { z_plus: Some(zp), lambda: Some(C64::new(l, 0.0)), ..Default::default() };
        cands.push((map, s));
    }
    let (map, s) = pick(cands, "two-point symmetric")?;
    let h = RationalFn::pole(C64::new(alpha, 0.0), ONE, 1).add(&RationalFn::pole(C64::new(alpha, 0.0), -ONE, 1));
    let qv = map.log_phi_phisharp(ZERO);
    Ok(instance(spec, map, h, qv, s))
}

/// (h̃ − h̃(0))/w with h̃(0) read off the part of h̃ regular at 0.
fn strip_over_w(ht: &RationalFn) -> Result<RationalFn> {
    let (poly, parts, _) = rat_principal_parts(ht)?;
    let (at0, others): (Vec<PolePart>, Vec<PolePart>) =
        parts.into_iter().partition(|p| p.point().map(|x| x.norm() < 1e-12).unwrap_or(false));
    let regular = RationalFn::from_parts(poly, others);
    let locs = regular.pole_locations();
    let v0 = regular.eval(ZERO)?;
    let num = regular.num().sub(&regular.den().scale(v0)).deflate(ZERO);
    let mut h = RationalFn::with_poles(num, regular.den().clone(), &locs);
    for p in at0 {
        let mut coeffs = vec![ZERO];
        coeffs.extend(p.coeffs);
        h = h.add(&RationalFn::from_parts(Poly::zero(), vec![PolePart::at(ZERO, coeffs)]));
    }
    Ok(h)
}

/// Laurent order needed to transform the polynomial part of r.
fn faber_order(map: &RiemannMap) -> usize {
    map.generating().poly_part().degree() + 2
}

/// h and q from the map: h = (Φ(r) − Φ(r)(0))/w, q = ln(φφ^#) at the zero of φ.
pub fn direct_problem(map: &RiemannMap) -> Result<QuadratureData> {
    let ctx = FaberContext::new(map, faber_order(map))?;
    let ht = faber_rational(&ctx, map.generating())?;
    let h = strip_over_w(&ht)?;
    Ok(QuadratureData::new(h, charge_of_map(map)))
}

fn charge_of_map(map: &RiemannMap) -> C64 {
    map.zero().map(|z| map.log_phi_phisharp(z)).unwrap_or(ZERO)
}

/// Generating function r from h: Φ⁻¹(wh + Res∞h) for bounded domains,
/// Φ⁻¹(wh) − Φ⁻¹(wh)(0) for unbounded ones.
pub fn inverse_r(h: &RationalFn, map: &RiemannMap) -> Result<RationalFn> {
    let (_, _, res_inf) = rat_principal_parts(h)?;
    match map.side {
        Side::Bounded => {
            let ctx = FaberContext::new(map, 0)?;
            let g = h.mul_w().add(&RationalFn::constant(res_inf));
            inv_faber_rational(&ctx, &g)
        }
        Side::Unbounded => {
            let order = h.poly_part().degree() + 3;
            let ctx = FaberContext::new(map, order)?;
            let r = inv_faber_rational(&ctx, &h.mul_w())?;
            let r0 = r.eval(ZERO)?;
            Ok(r.sub(&RationalFn::constant(r0)))
        }
    }
}

/// Closed-form charge ln|K|² + E(z₀) + E^#(z₀), 0 for non-singular domains.
pub fn charge_q(inst: &LQDInstance) -> C64 {
    charge_of_map(&inst.map)
}

/// Charge as ∮(S₀ − h) dw over a small circle around 0.
pub fn charge_q_numeric(inst: &LQDInstance, n: usize) -> Result<C64> {
    let Some(z0) = inst.map.zero() else { return Ok(ZERO) };
    let bc = inst.map.boundary(1024);
    let mut rad = 0.25 * bc.w.iter().map(|w| w.norm()).fold(f64::INFINITY, f64::min);
    for (p, _) in inst.quad.h.pole_locations() {
        rad = rad.min(0.5 * p.norm());
    }
    let mut seed = z0;
    let mut acc = ZERO;
    for k in 0..n {
        let e = C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
        let w = e * rad;
        let z = inst.map.inverse_from(w, Some(seed))?;
        seed = z;
        let s0 = inst.map.log_phi_phisharp(z) / w;
        acc += (s0 - inst.quad.h.eval(w)?) * w;
    }
    Ok(acc / n as f64)
}

/// S₀(w) = ln(φφ^#)(ψ(w))/w, the log-Schwarz function; on ∂Ω the lift
/// e^{wS₀(w)}/w equals w̄.
pub fn schwarz_eval(inst: &LQDInstance, w: C64) -> Result<C64> {
    if w.norm() < 1e-300 {
        return Err(Error::PoleProximity { w, pole: ZERO, dist: w.norm() });
    }
    let z = inst.map.inverse(w)?;
    Ok(inst.map.log_phi_phisharp(z) / w)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Transform {
    /// Ω ↦ Ω/a.
    Scale(C64),
    /// Ω ↦ {1/w : w ∈ Ω}.
    Invert,
    /// Ω ↦ {w : w^k ∈ Ω}.
    PowerRoot(u32),
}

pub fn transform(inst: &LQDInstance, op: Transform) -> Result<LQDInstance> {
    let map = &inst.map;
    let (new_map, h, q, name) = match op {
        Transform::Scale(a) => {
            if a == ZERO {
                return Err(Error::RangeError("scale factor must be nonzero".into()));
            }
            let m = RiemannMap::normalized(map.side, map.constant / a, map.inner, map.exponent.clone())?;
            let h = inst.quad.h.scale_arg(a).scale(a);
            let q = if map.contains_zero() { inst.quad.q - a.norm_sqr().ln() } else { ZERO };
            (m, h, q, "scale")
        }
        Transform::Invert => invert(inst)?,
        Transform::PowerRoot(k) => power_root(inst, k as usize)?,
    };
    Ok(LQDInstance {
        spec: None,
        origin: format!("{name}({})", inst.origin),
        quad: QuadratureData::new(h, q),
        map: new_map,
        solved: SolvedParams { solutions: 1, univalent_solutions: 1, ..Default::default() },
    })
}

fn invert(inst: &LQDInstance) -> Result<(RiemannMap, RationalFn, C64, &'static str)> {
    let map = &inst.map;
    let e = &map.exponent;
    let k = map.constant;
    let m = match (map.side, map.inner) {
        (Side::Bounded, Inner::One) => RiemannMap::normalized(Side::Bounded, k.inv(), Inner::One, e.scale(-ONE))?,
        (Side::Bounded, Inner::Z) => {
            let ex = e.at_reciprocal().scale(-ONE);
            RiemannMap::normalized(Side::Unbounded, k.inv(), Inner::Z, ex)?
        }
        (Side::Bounded, Inner::Blaschke(l)) => {
            // φ(m(ζ)) = Kζe^{E(m(ζ))} with m(ζ) = M(ε̄ζ); Φ(z) = 1/φ(m(1/z))
            let eps = l.conj() / l.norm();
            let ex = e.compose_mobius(-l, eps.conj(), -ONE, l.conj() * eps.conj()).scale(-ONE);
            RiemannMap::normalized(Side::Unbounded, k.inv(), Inner::Z, ex)?
        }
        (Side::Unbounded, Inner::Z) => {
            let ex = e.at_reciprocal().scale(-ONE);
            RiemannMap::normalized(Side::Bounded, k.inv(), Inner::Z, ex)?
        }
        (Side::Unbounded, Inner::ZBlaschke(z0)) => {
            // T(z) = (z + ū₀)/(1 + u₀z), u₀ = 1/z₀, sends ∞ to z₀ and −z₀ to ∞
            let u0 = z0.inv();
            let t = |z: C64| (z + u0.conj()) / (1.0 + u0 * z);
            let rat = map.inner.rational();
            let r = |z: C64| (k * rat.eval_unchecked(t(z))).inv();
            let target = Inner::ZBlaschke(-z0).rational();
            let probe = [C64::new(2.3, 0.7), C64::new(-1.7, 2.9)];
            let kk: Vec<C64> = probe.iter().map(|&z| r(z) / target.eval_unchecked(z)).collect();
            if (kk[0] - kk[1]).norm() > 1e-9 * kk[0].norm() {
                return Err(Error::InversionFailure(-z0));
            }
            let ex = e.compose_mobius(ONE, u0.conj(), u0, ONE).scale(-ONE);
            RiemannMap::normalized(Side::Unbounded, kk[0], Inner::ZBlaschke(-z0), ex)?
        }
        _ => return Err(Error::RangeError("unsupported inner factor".into())),
    };
    // −h(1/w)/w²
    let raw = inst.quad.h.at_reciprocal().mul(&RationalFn::pole(-ONE, ZERO, 2));
    let (poly, parts, _) = rat_principal_parts(&raw)?;
    let (at0, others): (Vec<PolePart>, Vec<PolePart>) =
        parts.into_iter().partition(|p| p.point().map(|x| x.norm() < 1e-12).unwrap_or(false));
    let res0 = at0.first().map(|p| p.residue()).unwrap_or(ZERO);
    let mut parts = others;
    let (h, q) = if map.side == Side::Unbounded {
        for p in at0 {
            let mut coeffs = p.coeffs.clone();
            coeffs[0] = ZERO;
            parts.push(PolePart { location: Location::Finite(ZERO), order: coeffs.len(), coeffs });
        }
        let a_ext = -AreaEngine::new(map, None, &RuleOpts::default())?.renormalized_area();
        (RationalFn::from_parts(poly, parts), -inst.quad.q - a_ext + res0)
    } else {
        (RationalFn::from_parts(poly, parts), ZERO)
    };
    Ok((m, h, q, "invert"))
}

fn power_root(inst: &LQDInstance, k: usize) -> Result<(RiemannMap, RationalFn, C64, &'static str)> {
    if k == 0 {
        return Err(Error::RangeError("k must be at least 1".into()));
    }
    let map = &inst.map;
    let kf = k as f64;
    let root = map.constant.powf(1.0 / kf);
    let m = match (map.side, map.inner) {
        (Side::Bounded, Inner::Z) => {
            let ex = map.exponent.compose_power(ONE, k).scale(C64::new(1.0 / kf, 0.0));
            RiemannMap::normalized(Side::Bounded, root, Inner::Z, ex)?
        }
        (Side::Bounded, Inner::Blaschke(l)) => {
            let eps = l.conj() / l.norm();
            let mob = map.exponent.compose_mobius(eps.conj(), -l, l.conj() * eps.conj(), -ONE);
            let ex = mob.compose_power(ONE, k).scale(C64::new(1.0 / kf, 0.0));
            RiemannMap::normalized(Side::Bounded, root, Inner::Z, ex)?
        }
        (Side::Unbounded, Inner::Z) => {
            let ex = map.exponent.compose_power(ONE, k).scale(C64::new(1.0 / kf, 0.0));
            RiemannMap::normalized(Side::Unbounded, root, Inner::Z, ex)?
        }
        _ => {
            return Err(Error::DisconnectedPreimage(format!(
                "the {k}-th root preimage of a domain not containing 0 (bounded) or containing 0 (unbounded) is disconnected"
            )))
        }
    };
    let h = inst
        .quad
        .h
        .compose_power(ONE, k)
        .mul(&RationalFn::from_poly(Poly::monomial(C64::new(1.0 / kf, 0.0), k - 1)));
    Ok((m, h, inst.quad.q / kf, "power_root"))
}

/// The image of D_ρ(a) under exp. h is extracted numerically: the pole and
/// residue of h(ln w)/w with h = ρ²/(ξ − a) come from small-circle contours,
/// and the fit is cross-checked against the exterior Cauchy projection.
pub fn exp_image(a: C64, rho: f64, n: usize) -> Result<LQDInstance> {
    let rho = positive(rho, "radius")?;
    if 2.0 * rho >= 2.0 * PI {
        return Err(Error::NotInjective(2.0 * rho));
    }
    let e = RationalFn::from_poly(Poly::new(vec![ZERO, C64::new(rho, 0.0)]));
    let map = RiemannMap::normalized(Side::Bounded, a.exp(), Inner::One, e)?;
    let center = a.exp();
    let log_branch = |w: C64| {
        let l = (w / center).ln();
        a + l
    };
    let g = |w: C64| rho * rho / (log_branch(w) - a) / w;
    let rad = center.norm() * 0.25 * rho.min(1.0);
    let (mut m0, mut m1) = (ZERO, ZERO);
    for k in 0..n {
        let e = C64::from_polar(1.0, 2.0 * PI * (k as f64 + 0.5) / n as f64);
        let w = center + e * rad;
        let dw = e * rad;
        m0 += g(w) * dw;
        m1 += g(w) * w * dw;
    }
    m0 /= n as f64;
    m1 /= n as f64;
    let pole = m1 / m0;
    let h = RationalFn::pole(m0, pole, 1);
    // compare with P_Ωext[h(ln w)/w] at a few exterior points
    let bc = map.boundary(n);
    let gs: Vec<C64> = bc.w.iter().map(|&w| g(w)).collect();
    let diam = bc.w.iter().map(|w| (w - center).norm()).fold(0.0, f64::max);
    let mut fit: f64 = 0.0;
    for j in 0..6 {
        let w = center + C64::from_polar(2.5 * diam, j as f64 * PI / 3.0 + 0.2);
        let p = bc.cauchy_projection(&gs, w, crate::contour::Target::Complement)?;
        fit = fit.max((p - h.eval(w)?).norm());
    }
    let s = SolvedParams { fit_residual: Some(fit), solutions: 1, univalent_solutions: 1, ..Default::default() };
    let spec = FamilySpec { center: Some(a), r: Some(rho), ..FamilySpec::new(FamilyKind::ExpImage) };
    Ok(instance(&spec, map, h, ZERO, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    fn spec(kind: FamilyKind) -> FamilySpec {
        FamilySpec::new(kind)
    }

    fn assert_direct(inst: &LQDInstance, tol: f64) {
        let d = direct_problem(&inst.map).unwrap();
        assert!(d.h.distance(&inst.quad.h) < tol, "h mismatch: {} vs {}", d.h, inst.quad.h);
        assert!((d.q - inst.quad.q).norm() < tol);
        let r = inverse_r(&inst.quad.h, &inst.map).unwrap();
        assert!(r.distance(inst.map.generating()) < tol, "r mismatch: {} vs {}", r, inst.map.generating());
    }

    #[test]
    fn null_disks() {
        let s = FamilySpec { r: Some(1.5), ..spec(FamilyKind::NullDisk) };
        let i = build_family(&s).unwrap();
        assert!(i.quad.h.is_zero());
        assert!((i.quad.q - c(2.25f64.ln(), 0.0)).norm() < 1e-15);
        let s = FamilySpec { exterior: true, ..s };
        let i = build_family(&s).unwrap();
        assert_eq!(i.quad.q, ZERO);
        assert!(direct_problem(&i.map).unwrap().h.is_zero());
    }

    #[test]
    fn one_point_bounded() {
        let s = FamilySpec { w0: Some(c(0.25, 0.0)), alpha: Some(c(2.0, 0.0)), ..spec(FamilyKind::OneptBoundedNonsingular) };
        let i = build_family(&s).unwrap();
        let b = i.map.boundary(256);
        let worst = b.w.iter().map(|w| ((w / 0.25).ln().norm_sqr() - 2.0).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-8);
        assert_direct(&i, 1e-10);
        let s = FamilySpec { alpha: Some(c(12.0, 0.0)), ..s };
        assert!(matches!(build_family(&s), Err(Error::RangeError(_))));
    }

    #[test]
    fn one_point_unbounded() {
        let s = FamilySpec {
            w0: Some(c(1.9, 0.0)),
            alpha: Some(c(1.5, 0.3)),
            c: Some(1.2),
            ..spec(FamilyKind::OneptUnboundedNonsingular)
        };
        let i = build_family(&s).unwrap();
        assert!((i.map.eval(i.solved.z1.unwrap()) - c(1.9, 0.0)).norm() < 1e-10);
        assert_direct(&i, 1e-8);
    }

    #[test]
    fn one_point_bounded_singular() {
        let s = FamilySpec {
            w0: Some(c(1.0, 0.0)),
            alpha: Some(c(0.7, 0.0)),
            q: Some(c(0.5, 0.0)),
            ..spec(FamilyKind::OneptBoundedSingular)
        };
        let i = build_family(&s).unwrap();
        assert!((i.quad.q - c(0.5, 0.0)).norm() < 1e-9);
        assert_direct(&i, 1e-8);
        let [plain, conj] = i.solved.relation_residual.unwrap();
        assert!(conj < 1e-10 && plain < 1e-10);
    }

    #[test]
    fn one_point_unbounded_singular_map_first() {
        let s = FamilySpec {
            w0: Some(c(2.0, 0.0)),
            c: Some(0.389),
            z0: Some(c(-3.13, 0.0)),
            z1: Some(c(2.28, 0.0)),
            ..spec(FamilyKind::OneptUnboundedSingular)
        };
        let i = build_family(&s).unwrap();
        let a = i.solved.alpha.unwrap();
        assert!((a - c(-0.15, 0.0)).norm() < 5e-3, "alpha = {a}");
        assert_direct(&i, 1e-8);
        // solving forward from the induced data recovers the same map
        let s2 = FamilySpec {
            w0: Some(c(2.0, 0.0)),
            c: Some(0.389),
            alpha: Some(a),
            q: Some(i.quad.q),
            ..spec(FamilyKind::OneptUnboundedSingular)
        };
        let j = build_family(&s2).unwrap();
        assert!((j.solved.z0.unwrap() - c(-3.13, 0.0)).norm() < 1e-7);
    }

    #[test]
    fn constant_and_monomial() {
        let s = FamilySpec { alpha: Some(c(1.0, 0.0)), c: Some(0.5), ..spec(FamilyKind::Constant) };
        let i = build_family(&s).unwrap();
        assert_direct(&i, 1e-10);
        let r = inverse_r(&i.quad.h, &i.map).unwrap();
        assert!(r.distance(&RationalFn::from_poly(Poly::monomial(c(0.5, 0.0), 1))) < 1e-12);
        let s = FamilySpec { z0: Some(c(-2.0, 0.0)), ..s };
        let i = build_family(&s).unwrap();
        assert_direct(&i, 1e-9);
        let s = FamilySpec { alpha: Some(c(0.4, 0.1)), c: Some(0.6), k: Some(3), ..spec(FamilyKind::MonomialNonsingular) };
        let i = build_family(&s).unwrap();
        assert_direct(&i, 1e-9);
    }

    #[test]
    fn monomial_singular() {
        let s = FamilySpec {
            alpha: Some(c(1.0, 0.0)),
            c: Some(0.1),
            q: Some(c(-2.0, 0.0)),
            ..spec(FamilyKind::MonomialSingularK2)
        };
        let i = build_family(&s).unwrap();
        assert!((i.quad.q - c(-2.0, 0.0)).norm() < 1e-9);
        assert_direct(&i, 1e-8);
        assert!(i.solved.q_alt.is_some());
    }

    #[test]
    fn two_point() {
        let s = FamilySpec { alpha: Some(c(0.5, 0.0)), q: Some(ZERO), ..spec(FamilyKind::TwopointSymmetric) };
        let i = build_family(&s).unwrap();
        let zp = i.solved.z_plus.unwrap();
        let l = twopoint_lambda(0.0, zp);
        assert!((l * l + l * (zp.powi(4) - 1.0) / (2.0 * zp * zp) - 0.5).abs() < 1e-10);
        assert!((i.map.eval(c(zp, 0.0)) - ONE).norm() < 1e-12);
        assert!(i.quad.q.norm() < 1e-12);
        assert_direct(&i, 1e-8);
    }

    #[test]
    fn charge_routes_agree() {
        let s = FamilySpec {
            w0: Some(c(1.0, 0.0)),
            alpha: Some(c(0.7, 0.0)),
            q: Some(c(1.2, 0.0)),
            ..spec(FamilyKind::OneptBoundedSingular)
        };
        let i = build_family(&s).unwrap();
        let a = charge_q(&i);
        let b = charge_q_numeric(&i, 256).unwrap();
        assert!((a - b).norm() < 1e-8, "{a} vs {b}");
        let z = C64::from_polar(1.0, 0.7);
        let w = i.map.eval(z);
        let s0 = i.map.log_phi_phisharp(z) / w;
        assert!(((w * s0).exp() / w - w.conj()).norm() < 1e-10);
    }

    #[test]
    fn transforms() {
        let s = FamilySpec { r: Some(2.0), exterior: true, ..spec(FamilyKind::NullDisk) };
        let ext = build_family(&FamilySpec { r: Some(0.5), ..s }).unwrap();
        let inv = transform(&ext, Transform::Invert).unwrap();
        assert_eq!(inv.map.side, Side::Bounded);
        assert!((inv.map.constant - c(2.0, 0.0)).norm() < 1e-12);
        assert!(inv.quad.h.is_zero());
        assert!((inv.quad.q - c(4f64.ln(), 0.0)).norm() < 1e-6);

        let w0 = c(0.6, 0.8);
        let s = FamilySpec { w0: Some(w0), alpha: Some(c(2.0, 0.0)), ..spec(FamilyKind::OneptBoundedNonsingular) };
        let i = build_family(&s).unwrap();
        let sc = transform(&i, Transform::Scale(w0)).unwrap();
        assert!(sc.quad.h.distance(&RationalFn::pole(c(2.0, 0.0), ONE, 1)) < 1e-12);
        assert_direct(&sc, 1e-9);
        let inv = transform(&i, Transform::Invert).unwrap();
        assert_direct(&inv, 1e-9);
        assert!(matches!(transform(&i, Transform::PowerRoot(2)), Err(Error::DisconnectedPreimage(_))));

        let s = FamilySpec { alpha: Some(c(0.5, 0.0)), q: Some(c(0.3, 0.0)), ..spec(FamilyKind::TwopointSymmetric) };
        let i = build_family(&s).unwrap();
        let p = transform(&i, Transform::PowerRoot(2)).unwrap();
        assert_direct(&p, 1e-8);
        assert!((p.quad.q - c(0.15, 0.0)).norm() < 1e-9);
        let inv = transform(&i, Transform::Invert).unwrap();
        assert_direct(&inv, 1e-8);
    }

    #[test]
    fn exp_images() {
        let i = exp_image(c(-1.0, 0.0), 2.0, 2048).unwrap();
        let (p, k) = i.quad.h.pole_locations()[0];
        assert_eq!(k, 1);
        assert!((p - c((-1f64).exp(), 0.0)).norm() < 1e-10);
        let (_, parts, _) = rat_principal_parts(&i.quad.h).unwrap();
        assert!((parts[0].residue() - c(4.0, 0.0)).norm() < 1e-10);
        assert!(i.solved.fit_residual.unwrap() < 1e-10);
        let i = exp_image(ZERO, 0.5, 2048).unwrap();
        assert!((i.quad.h.pole_locations()[0].0 - ONE).norm() < 1e-10);
        assert!(matches!(exp_image(ZERO, 3.5, 2048), Err(Error::NotInjective(_))));
    }
}
