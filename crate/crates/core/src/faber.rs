//! Faber transforms between the reference domain and Ω.
//!
//! Interior (bounded Ω): Φ: A₀(Dext) → A₀(Ωext), Φ(f) = P_Ωext[f∘ψ].
//! Exterior (unbounded Ω): Φ: A(D) → A(Ωext), same formula.
//! Inverses: P_Dext[f∘φ] and P_D[f∘φ] respectively.
//!
//! Rational inputs are transformed exactly from Taylor data: the principal
//! part of (ψ(w) − p)^{−n} at φ(p) has coefficients (n/k)[tⁿ]A(t)^k on
//! (w − φ(p))^{−k}, with A(t) = φ(p + t) − φ(p) (Lagrange inversion).

use crate::complexpoly::{Poly, PolePart, RationalFn};
use crate::contour::Target;
use crate::maps::{RiemannMap, Side};
use crate::{series, Error, Result, C64};
use std::f64::consts::PI;

const ZERO: C64 = C64::new(0.0, 0.0);

/// φ(z) = c z + f₀ + f₁/z + … near ∞.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentData {
    pub c: C64,
    pub f: Vec<C64>,
}

impl LaurentData {
    /// [c, f₀, f₁, …] as a series in u = 1/z for u·φ(1/u).
    pub fn series(&self) -> Vec<C64> {
        let mut v = vec![self.c];
        v.extend_from_slice(&self.f);
        v
    }

    pub fn order(&self) -> usize {
        self.f.len()
    }
}

fn laurent_at_radius(map: &RiemannMap, m: usize, r: f64, n: usize) -> Vec<C64> {
    // a_j = (1/2π) ∫ φ(R e^{it}) (R e^{it})^{−j} dt, j = 1, 0, −1, …, −(m−1)
    let vals: Vec<(C64, C64)> = (0..n)
        .map(|k| {
            let z = C64::from_polar(r, 2.0 * PI * k as f64 / n as f64);
            (z, map.eval(z))
        })
        .collect();
    (0..=m)
        .map(|i| {
            let j = 1 - i as i32;
            vals.iter().map(|(z, f)| f * z.powi(-j)).sum::<C64>() / n as f64
        })
        .collect()
}

/// Laurent coefficients at ∞ by trapezoid contour integrals at |z| = 3,
/// cross-checked at |z| = 2.
pub fn laurent_coeffs(map: &RiemannMap, m: usize) -> Result<LaurentData> {
    if map.side != Side::Unbounded {
        return Err(Error::RangeError("Laurent data at infinity needs an unbounded map".into()));
    }
    let a = laurent_at_radius(map, m, 3.0, 512);
    let b = laurent_at_radius(map, m, 2.0, 512);
    let scale = a.iter().map(|x| x.norm()).fold(1.0, f64::max);
    for (x, y) in a.iter().zip(&b) {
        if (x - y).norm() > 1e-10 * scale {
            return Err(Error::NonConvergence("Laurent coefficients disagree between radii".into()));
        }
    }
    Ok(LaurentData { c: a[0], f: a[1..].to_vec() })
}

/// Laurent coefficients at ∞ from the exact series of K·inner·exp(E).
pub fn laurent_series(map: &RiemannMap, m: usize) -> Result<LaurentData> {
    let p = map.laurent_inf(m + 1)?;
    Ok(LaurentData { c: p[0], f: p[1..].to_vec() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// F_n(w): polynomial part of ψ(w)^n at ∞.
    Forward,
    /// W_n(z): polynomial part of φ(z)^n at ∞.
    Inverse,
}

/// Map together with its Laurent data at ∞ (unbounded maps).
#[derive(Clone, Debug)]
pub struct FaberContext<'a> {
    pub map: &'a RiemannMap,
    pub laurent: Option<LaurentData>,
}

impl<'a> FaberContext<'a> {
    pub fn new(map: &'a RiemannMap, order: usize) -> Result<Self> {
        let laurent = match map.side {
            Side::Unbounded => Some(laurent_series(map, order)?),
            Side::Bounded => None,
        };
        Ok(FaberContext { map, laurent })
    }

    pub fn with_laurent(map: &'a RiemannMap, laurent: LaurentData) -> Self {
        FaberContext { map, laurent: Some(laurent) }
    }

    fn laurent(&self, need: usize) -> Result<&LaurentData> {
        let l = self.laurent.as_ref().ok_or(Error::OutsideTransformDomain)?;
        if l.order() < need {
            return Err(Error::InsufficientLaurentOrder { have: l.order(), need });
        }
        Ok(l)
    }
}

/// Faber polynomial F_n (forward, variable w) or W_n (inverse, variable z).
pub fn faber_polynomial(ctx: &FaberContext, n: usize, dir: Direction) -> Result<Poly> {
    let l = ctx.laurent(n)?;
    let p = l.series();
    let m = n + 1;
    let coeffs = match dir {
        Direction::Inverse => series::pow(&p, n, m),
        Direction::Forward => {
            // v = u/P(u) inverts to u = v·U(v); ψ(w) = w / U(1/w)
            let r = series::div(&[ZERO, C64::new(1.0, 0.0)], &p, m + 1);
            let rev = series::revert(&r, m + 1);
            let u: Vec<C64> = rev[1..].to_vec();
            let inv = series::inv(&u, m);
            series::pow(&inv, n, m)
        }
    };
    // Σ_j [x^j] · var^{n−j}
    let mut out = vec![ZERO; n + 1];
    for j in 0..=n {
        out[n - j] = coeffs[j];
    }
    Ok(Poly::new(out))
}

/// Principal part at q = g(p) of Σ_n a_n (G(·) − p)^{−n}, where G is the local
/// inverse of g and `a_series` = g(p + t) − g(p).
fn transform_part(a_series: &[C64], coeffs: &[C64], q: C64) -> PolePart {
    let kmax = coeffs.len();
    let m = kmax + 1;
    let mut out = vec![ZERO; kmax];
    let mut ak = vec![C64::new(1.0, 0.0)];
    for k in 1..=kmax {
        ak = series::mul(&ak, a_series, m);
        for (idx, a) in coeffs.iter().enumerate() {
            let n = idx + 1;
            if n >= k {
                out[k - 1] += a * (n as f64 / k as f64) * ak[n];
            }
        }
    }
    PolePart::at(q, out)
}

/// Nonconstant polynomial part above round-off; constants project to zero on
/// bounded domains.
fn has_nonconstant(poly: &Poly, parts: &[PolePart]) -> bool {
    let scale = 1.0 + parts.iter().flat_map(|p| p.coeffs.iter()).map(|c| c.norm()).fold(0.0, f64::max)
        + poly.coeffs.first().map(|c| c.norm()).unwrap_or(0.0);
    poly.coeffs.iter().skip(1).any(|c| c.norm() > 1e-12 * scale)
}

fn check_circle(p: C64) -> Result<()> {
    if (p.norm() - 1.0).abs() < 1e-8 {
        return Err(Error::PoleOnCircle(p));
    }
    Ok(())
}

/// Φ(f) for rational f.
pub fn faber_rational(ctx: &FaberContext, f: &RationalFn) -> Result<RationalFn> {
    let map = ctx.map;
    let (poly, parts, _) = crate::complexpoly::rat_principal_parts(f)?;
    let mut out_parts = Vec::new();
    for pp in &parts {
        let p = pp.point().unwrap();
        check_circle(p)?;
        if !map.in_reference(p) {
            return Err(Error::PoleOutsideDomain(p));
        }
        let mut a = map.taylor(p, pp.order + 2);
        let q = a[0];
        a[0] = ZERO;
        out_parts.push(transform_part(&a, &pp.coeffs, q));
    }
    let mut out_poly = Poly::zero();
    match map.side {
        Side::Bounded => {
            if has_nonconstant(&poly, &parts) {
                return Err(Error::OutsideTransformDomain);
            }
        }
        Side::Unbounded => {
            for (n, a) in poly.coeffs.iter().enumerate() {
                if *a == ZERO {
                    continue;
                }
                let fp = faber_polynomial(ctx, n, Direction::Forward)?;
                out_poly = out_poly.add(&fp.scale(*a));
            }
        }
    }
    Ok(RationalFn::from_parts(out_poly, out_parts))
}

/// Φ⁻¹(f) for rational f.
pub fn inv_faber_rational(ctx: &FaberContext, f: &RationalFn) -> Result<RationalFn> {
    let map = ctx.map;
    let (poly, parts, _) = crate::complexpoly::rat_principal_parts(f)?;
    let mut out_parts = Vec::new();
    for pp in &parts {
        let w0 = pp.point().unwrap();
        let z1 = map.inverse(w0).map_err(|_| Error::PoleOutsideDomain(w0))?;
        check_circle(z1)?;
        let mut a = map.taylor(z1, pp.order + 2);
        a[0] = ZERO;
        let b = series::revert(&a, pp.order + 2);
        out_parts.push(transform_part(&b, &pp.coeffs, z1));
    }
    let mut out_poly = Poly::zero();
    match map.side {
        Side::Bounded => {
            if has_nonconstant(&poly, &parts) {
                return Err(Error::OutsideTransformDomain);
            }
        }
        Side::Unbounded => {
            for (n, a) in poly.coeffs.iter().enumerate() {
                if *a == ZERO {
                    continue;
                }
                let wp = faber_polynomial(ctx, n, Direction::Inverse)?;
                out_poly = out_poly.add(&wp.scale(*a));
            }
        }
    }
    Ok(RationalFn::from_parts(out_poly, out_parts))
}

/// Φ(f)(w) by the defining Cauchy projection over the boundary samples; w
/// must lie in Ωext. f is evaluated on the unit circle, where f∘ψ(φ(ζ)) = f(ζ).
pub fn faber_numeric(map: &RiemannMap, f: impl Fn(C64) -> C64, w: C64, n: usize) -> Result<C64> {
    let b = map.boundary(n);
    let g: Vec<C64> = (0..n).map(|k| f(C64::from_polar(1.0, b.t(k)))).collect();
    b.cauchy_projection(&g, w, Target::Complement)
}

/// Φ⁻¹(f)(z) by the defining Cauchy projection over the unit circle; z must
/// lie in the complement of the reference domain.
pub fn inv_faber_numeric(map: &RiemannMap, f: impl Fn(C64) -> C64, z: C64, n: usize) -> Result<C64> {
    let mut acc = ZERO;
    let mut dmin = f64::INFINITY;
    for k in 0..n {
        let zeta = C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
        dmin = dmin.min((zeta - z).norm());
        acc += f(map.eval(zeta)) / (zeta - z) * zeta;
    }
    let min = 5.0 / n as f64;
    if dmin < min {
        return Err(Error::NearBoundary { w: z, dist: dmin, min });
    }
    acc /= n as f64;
    Ok(match map.side {
        Side::Bounded => -acc,
        Side::Unbounded => acc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;
    use crate::maps::Inner;

    fn unbounded_map() -> RiemannMap {
        let e = RationalFn::pole(c(0.2, 0.1), c(0.3, -0.2), 1).add(&RationalFn::pole(c(0.05, 0.0), c(0.0, 0.0), 2));
        RiemannMap::normalized(Side::Unbounded, c(0.8, 0.0), Inner::Z, e).unwrap()
    }

    fn bounded_map() -> RiemannMap {
        let e = RationalFn::pole(c(0.3, 0.2), c(2.0, 0.5), 1);
        RiemannMap::normalized(Side::Bounded, c(1.0, 0.5), Inner::One, e).unwrap()
    }

    #[test]
    fn laurent_routes_agree() {
        let m = unbounded_map();
        let a = laurent_coeffs(&m, 8).unwrap();
        let b = laurent_series(&m, 8).unwrap();
        assert!((a.c - b.c).norm() < 1e-12);
        for (x, y) in a.f.iter().zip(&b.f) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn low_order_polynomials_closed_form() {
        let m = unbounded_map();
        let ctx = FaberContext::new(&m, 6).unwrap();
        let l = ctx.laurent.clone().unwrap();
        let (cc, f0, f1) = (l.c, l.f[0], l.f[1]);
        let f1p = faber_polynomial(&ctx, 1, Direction::Forward).unwrap();
        assert!((f1p.coeff(1) - cc.inv()).norm() < 1e-13 && (f1p.coeff(0) + f0 / cc).norm() < 1e-13);
        let f2p = faber_polynomial(&ctx, 2, Direction::Forward).unwrap();
        let c2 = cc * cc;
        assert!((f2p.coeff(2) - c2.inv()).norm() < 1e-13);
        assert!((f2p.coeff(1) + 2.0 * f0 / c2).norm() < 1e-13);
        assert!((f2p.coeff(0) - (f0 * f0 - 2.0 * cc * f1) / c2).norm() < 1e-13);
        let w2 = faber_polynomial(&ctx, 2, Direction::Inverse).unwrap();
        assert!((w2.coeff(2) - c2).norm() < 1e-13);
        assert!((w2.coeff(1) - 2.0 * cc * f0).norm() < 1e-13);
        assert!((w2.coeff(0) - (f0 * f0 + 2.0 * cc * f1)).norm() < 1e-13);
        assert!(matches!(
            faber_polynomial(&ctx, 9, Direction::Forward),
            Err(Error::InsufficientLaurentOrder { .. })
        ));
    }

    #[test]
    fn residue_formulas() {
        let m = bounded_map();
        let ctx = FaberContext::new(&m, 0).unwrap();
        let z0 = c(0.2, -0.3);
        let t = m.taylor(z0, 4);
        let w0 = t[0];
        let g = faber_rational(&ctx, &RationalFn::pole(c(1.0, 0.0), z0, 1)).unwrap();
        let e = RationalFn::pole(t[1], w0, 1);
        assert!(g.distance(&e) < 1e-12);
        // 1/(z − z0)² ↦ φ''/(w − φ) + φ'²/(w − φ)²  (φ'' = 2 t[2])
        let g2 = faber_rational(&ctx, &RationalFn::pole(c(1.0, 0.0), z0, 2)).unwrap();
        let e2 = RationalFn::pole(t[2] * 2.0, w0, 1).add(&RationalFn::pole(t[1] * t[1], w0, 2));
        assert!(g2.distance(&e2) < 1e-12);
    }

    #[test]
    fn transforms_match_projections() {
        let m = bounded_map();
        let ctx = FaberContext::new(&m, 0).unwrap();
        let f = RationalFn::pole(c(0.7, 0.1), c(0.1, 0.4), 2).add(&RationalFn::pole(c(-0.2, 0.3), c(-0.5, 0.0), 1));
        let g = faber_rational(&ctx, &f).unwrap();
        let w = m.eval(c(1.8, 0.4));
        let num = faber_numeric(&m, |z| f.eval_unchecked(z), w, 512).unwrap();
        assert!((g.eval(w).unwrap() - num).norm() < 1e-10);
        let back = inv_faber_rational(&ctx, &g).unwrap();
        assert!(back.distance(&f) < 1e-10);
        let z = c(1.5, -0.7);
        let numb = inv_faber_numeric(&m, |w| g.eval_unchecked(w), z, 512).unwrap();
        assert!((numb - f.eval(z).unwrap()).norm() < 1e-10);

        let mu = unbounded_map();
        let ctx = FaberContext::new(&mu, 8).unwrap();
        let f = RationalFn::from_parts(
            Poly::new(vec![c(0.1, 0.0), c(0.3, -0.1), c(0.05, 0.02)]),
            vec![PolePart::at(c(1.5, 1.0), vec![c(0.2, 0.0), c(0.1, 0.1)])],
        );
        let g = faber_rational(&ctx, &f).unwrap();
        let w = c(0.05, 0.02);
        let num = faber_numeric(&mu, |z| f.eval_unchecked(z), w, 1024).unwrap();
        assert!((g.eval(w).unwrap() - num).norm() < 1e-10);
        let back = inv_faber_rational(&ctx, &g).unwrap();
        assert!(back.distance(&f) < 1e-10);
    }

    #[test]
    fn domain_errors() {
        let m = bounded_map();
        let ctx = FaberContext::new(&m, 0).unwrap();
        assert!(matches!(
            faber_rational(&ctx, &RationalFn::pole(c(1.0, 0.0), c(1.0, 0.0), 1)),
            Err(Error::PoleOnCircle(_))
        ));
        assert!(matches!(
            faber_rational(&ctx, &RationalFn::identity()),
            Err(Error::OutsideTransformDomain)
        ));
        assert!(matches!(
            faber_rational(&ctx, &RationalFn::pole(c(1.0, 0.0), c(2.0, 0.0), 1)),
            Err(Error::PoleOutsideDomain(_))
        ));
    }
}
