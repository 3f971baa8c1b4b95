//! Riemann maps of the form φ = K · inner(z) · exp(E(z)).
//!
//! Bounded domains use the disk D as reference, unbounded ones the exterior
//! disk. The exponent E is analytic on the closed reference domain and is the
//! reflection r^# of the generating function r.

use crate::complexpoly::RationalFn;
use crate::contour::BoundaryCurve;
use crate::{series, Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Bounded,
    Unbounded,
}

/// Algebraic factor carrying the zero of φ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Inner {
    One,
    Z,
    Blaschke(C64),
    ZBlaschke(C64),
}

/// b_λ(z) = (λ̄/|λ|)(z − λ)/(λ̄z − 1), with b_0(z) = z.
pub fn blaschke(lambda: C64) -> RationalFn {
    if lambda == ZERO {
        return RationalFn::identity();
    }
    let eps = lambda.conj() / lambda.norm();
    RationalFn::from_parts(
        crate::complexpoly::Poly::constant(eps / lambda.conj()),
        vec![crate::complexpoly::PolePart::simple(
            lambda.conj().inv(),
            eps * (lambda.conj().inv() - lambda) / lambda.conj(),
        )],
    )
}

/// Möbius involution M(z) = (z − λ)/(λ̄z − 1) as coefficients (a, b, c, d).
pub fn involution(lambda: C64) -> (C64, C64, C64, C64) {
    (ONE, -lambda, lambda.conj(), -ONE)
}

impl Inner {
    pub fn rational(&self) -> RationalFn {
        match *self {
            Inner::One => RationalFn::constant(ONE),
            Inner::Z => RationalFn::identity(),
            Inner::Blaschke(l) => blaschke(l),
            Inner::ZBlaschke(l) => blaschke(l).mul_w(),
        }
    }

    /// Zero of the factor lying in the reference domain of `side`.
    pub fn zero_in(&self, side: Side) -> Option<C64> {
        match (side, *self) {
            (Side::Bounded, Inner::Z) => Some(ZERO),
            (Side::Bounded, Inner::Blaschke(l)) => Some(l),
            (Side::Unbounded, Inner::ZBlaschke(l)) => Some(l),
            _ => None,
        }
    }

    /// inner(e^{iθ}z) = factor · rotated(z).
    fn rotate(&self, th: f64) -> (C64, Inner) {
        let e = C64::from_polar(1.0, th);
        match *self {
            Inner::One => (ONE, Inner::One),
            Inner::Z => (e, Inner::Z),
            Inner::Blaschke(l) => (ONE, Inner::Blaschke(l * e.conj())),
            Inner::ZBlaschke(l) => (e, Inner::ZBlaschke(l * e.conj())),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MapJson {
    side: Side,
    constant: C64,
    inner: Inner,
    exponent: RationalFn,
}

/// φ(z) = constant · inner(z) · exp(exponent(z)).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "MapJson", into = "MapJson")]
pub struct RiemannMap {
    pub side: Side,
    pub constant: C64,
    pub inner: Inner,
    pub exponent: RationalFn,
    inner_rat: RationalFn,
    inner_d: RationalFn,
    exp_d: RationalFn,
    refl: RationalFn,
}

impl TryFrom<MapJson> for RiemannMap {
    type Error = Error;
    fn try_from(m: MapJson) -> Result<Self> {
        RiemannMap::new(m.side, m.constant, m.inner, m.exponent)
    }
}

impl From<RiemannMap> for MapJson {
    fn from(m: RiemannMap) -> Self {
        MapJson { side: m.side, constant: m.constant, inner: m.inner, exponent: m.exponent }
    }
}

impl RiemannMap {
    /// Checks that the exponent is analytic on the closed reference domain.
    pub fn new(side: Side, constant: C64, inner: Inner, exponent: RationalFn) -> Result<Self> {
        if side == Side::Unbounded && exponent.at_infinity().is_none() {
            return Err(Error::PoleOutsideDomain(C64::new(f64::INFINITY, 0.0)));
        }
        for (p, _) in exponent.pole_locations() {
            let r = p.norm();
            if (r - 1.0).abs() < 1e-8 {
                return Err(Error::PoleOnCircle(p));
            }
            if (side == Side::Bounded) == (r < 1.0) {
                return Err(Error::PoleOutsideDomain(p));
            }
        }
        if let Some(z0) = inner.zero_in(side) {
            if (z0.norm() - 1.0).abs() < 1e-8 {
                return Err(Error::ZeroOnBoundary);
            }
        }
        let inner_rat = inner.rational();
        Ok(RiemannMap {
            side,
            constant,
            inner,
            inner_d: inner_rat.derivative(),
            inner_rat,
            exp_d: exponent.derivative(),
            refl: exponent.reflect(),
            exponent,
        })
    }

    /// Builds the map from an unnormalized exponent: the value of E at 0
    /// (bounded) or ∞ (unbounded) moves into the constant, then the map is
    /// rotated so that φ'(0) > 0 or φ(z)/z → c > 0.
    pub fn normalized(side: Side, constant: C64, inner: Inner, exponent: RationalFn) -> Result<Self> {
        let e0 = match side {
            Side::Bounded => exponent.eval(ZERO)?,
            Side::Unbounded => exponent.at_infinity().ok_or(Error::OutsideTransformDomain)?,
        };
        let exponent = exponent.sub(&RationalFn::constant(e0));
        let m = RiemannMap::new(side, constant * e0.exp(), inner, exponent)?;
        let lead = match side {
            Side::Bounded => m.deriv(ZERO),
            Side::Unbounded => m.leading_coefficient(),
        };
        m.rotate(-lead.arg())
    }

    /// The map z ↦ φ(e^{iθ} z).
    pub fn rotate(&self, th: f64) -> Result<Self> {
        let (f, inner) = self.inner.rotate(th);
        RiemannMap::new(
            self.side,
            self.constant * f,
            inner,
            self.exponent.scale_arg(C64::from_polar(1.0, th)),
        )
    }

    /// r = E^#, the generating function.
    pub fn generating(&self) -> &RationalFn {
        &self.refl
    }

    pub fn zero(&self) -> Option<C64> {
        self.inner.zero_in(self.side)
    }

    pub fn contains_zero(&self) -> bool {
        self.zero().is_some()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.constant * self.inner_rat.eval_unchecked(z) * self.exponent.eval_unchecked(z).exp()
    }

    pub fn deriv(&self, z: C64) -> C64 {
        self.eval_with_deriv(z).1
    }

    pub fn eval_with_deriv(&self, z: C64) -> (C64, C64) {
        let e = self.constant * self.exponent.eval_unchecked(z).exp();
        let b = self.inner_rat.eval_unchecked(z);
        let db = self.inner_d.eval_unchecked(z);
        let de = self.exp_d.eval_unchecked(z);
        (e * b, e * (db + b * de))
    }

    /// ln(φ φ^#)(z) = ln|K|² + E(z) + E^#(z); inner factors satisfy b·b^# = 1.
    pub fn log_phi_phisharp(&self, z: C64) -> C64 {
        C64::new(self.constant.norm_sqr().ln(), 0.0)
            + self.exponent.eval_unchecked(z)
            + self.refl.eval_unchecked(z)
    }

    /// Taylor coefficients of φ(p + t).
    pub fn taylor(&self, p: C64, n: usize) -> Vec<C64> {
        let b = self.inner_rat.taylor(p, n);
        let e = series::exp(&self.exponent.taylor(p, n), n);
        series::scale(&series::mul(&b, &e, n), self.constant, n)
    }

    /// Coefficients P_j with φ(1/u) = (1/u)·Σ_j P_j u^j (unbounded maps):
    /// P = [c, f₀, f₁, …].
    pub fn laurent_inf(&self, n: usize) -> Result<Vec<C64>> {
        if self.side != Side::Unbounded {
            return Err(Error::RangeError("Laurent data at infinity needs an unbounded map".into()));
        }
        let (s, b) = self.inner_rat.laurent_inf(n);
        if s != -1 {
            return Err(Error::RangeError("inner factor must have a simple pole at infinity".into()));
        }
        let (se, e) = self.exponent.laurent_inf(n);
        let mut es = vec![ZERO; n];
        for (j, c) in e.iter().enumerate() {
            let k = j as i64 + se;
            if k >= 0 && (k as usize) < n {
                es[k as usize] = *c;
            }
        }
        let ex = series::exp(&es, n);
        Ok(series::scale(&series::mul(&b, &ex, n), self.constant, n))
    }

    /// lim φ(z)/z for unbounded maps.
    pub fn leading_coefficient(&self) -> C64 {
        self.laurent_inf(1).map(|v| v[0]).unwrap_or(ZERO)
    }

    /// φ(0) for bounded maps, c for unbounded ones.
    pub fn normalization(&self) -> C64 {
        match self.side {
            Side::Bounded => self.eval(ZERO),
            Side::Unbounded => self.leading_coefficient(),
        }
    }

    pub fn in_reference(&self, z: C64) -> bool {
        match self.side {
            Side::Bounded => z.norm() < 1.0,
            Side::Unbounded => z.norm() > 1.0,
        }
    }

    /// Samples z_k = e^{2πik/n} and their images.
    pub fn boundary(&self, n: usize) -> BoundaryCurve {
        let mut w = Vec::with_capacity(n);
        let mut dw = Vec::with_capacity(n);
        for k in 0..n {
            let z = C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
            let (f, d) = self.eval_with_deriv(z);
            w.push(f);
            dw.push(d * z * C64::i());
        }
        let orientation = match self.side {
            Side::Bounded => 1.0,
            Side::Unbounded => -1.0,
        };
        BoundaryCurve::new(w, dw, orientation)
    }

    /// ψ(w) = φ⁻¹(w) by damped Newton from the best point of a polar grid.
    pub fn inverse(&self, w: C64) -> Result<C64> {
        self.inverse_from(w, None)
    }

    pub fn inverse_from(&self, w: C64, seed: Option<C64>) -> Result<C64> {
        let mut seeds: Vec<C64> = seed.into_iter().collect();
        let radii: Vec<f64> = match self.side {
            Side::Bounded => vec![0.0, 0.2, 0.4, 0.6, 0.75, 0.85, 0.92, 0.97],
            Side::Unbounded => vec![1.03, 1.1, 1.25, 1.5, 2.0, 3.0, 5.0, 9.0, 20.0],
        };
        let mut grid: Vec<(f64, C64)> = Vec::new();
        for &r in &radii {
            let m = if r == 0.0 { 1 } else { 32 };
            for k in 0..m {
                let z = C64::from_polar(r, 2.0 * PI * k as f64 / m as f64);
                grid.push(((self.eval(z) - w).norm(), z));
            }
        }
        if self.side == Side::Unbounded {
            let c = self.leading_coefficient();
            let z = w / c;
            if z.norm() > 1.0 {
                grid.push(((self.eval(z) - w).norm(), z));
            }
        }
        grid.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        seeds.extend(grid.iter().take(4).map(|g| g.1));
        for s in seeds {
            if let Some(z) = self.newton_inverse(w, s) {
                return Ok(z);
            }
        }
        Err(Error::InversionFailure(w))
    }

    fn newton_inverse(&self, w: C64, mut z: C64) -> Option<C64> {
        let tol = 1e-14 * (1.0 + w.norm());
        let (f, _) = self.eval_with_deriv(z);
        let mut r = (f - w).norm();
        for _ in 0..50 {
            let (f, d) = self.eval_with_deriv(z);
            if r < tol {
                break;
            }
            let step = (f - w) / d;
            let mut t = 1.0;
            let mut ok = false;
            while t > 1e-8 {
                let zn = z - step * t;
                if self.in_reference(zn) {
                    let rn = (self.eval(zn) - w).norm();
                    if rn < r {
                        z = zn;
                        r = rn;
                        ok = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !ok {
                break;
            }
        }
        (r < 1e-10 * (1.0 + w.norm()) && self.in_reference(z)).then_some(z)
    }
}

/// Numerical factorization of an analytic map on the closed reference domain.
#[derive(Clone, Debug)]
pub struct NumericFactor {
    /// Zero of f in the reference domain, if any.
    pub zero: Option<C64>,
    /// Taylor (bounded) or 1/z-power (unbounded) coefficients of the outer
    /// exponent, normalized to vanish at 0 or ∞.
    pub exponent: Vec<C64>,
    pub constant: C64,
}

/// Recovers zero, constant and outer exponent of f from boundary samples: the
/// zero is counted by the argument principle and located by Newton; the outer
/// part comes from a discrete harmonic conjugate of log|f / inner|.
pub fn outer_factor_numeric(
    f: impl Fn(C64) -> C64,
    df: impl Fn(C64) -> C64,
    side: Side,
    n: usize,
) -> Result<NumericFactor> {
    let zs: Vec<C64> = (0..n).map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)).collect();
    let vals: Vec<C64> = zs.iter().map(|&z| f(z)).collect();
    if vals.iter().any(|v| v.norm() < 1e-12) {
        return Err(Error::ZeroOnBoundary);
    }
    // winding number of f(e^{it}) about 0
    let mut wind = 0.0;
    for k in 0..n {
        wind += (vals[(k + 1) % n] / vals[k]).arg();
    }
    let wind = (wind / (2.0 * PI)).round() as i64;
    let expected_nonsingular = match side {
        Side::Bounded => 0,
        Side::Unbounded => 1,
    };
    let zero = match wind - expected_nonsingular {
        0 => None,
        d if (side == Side::Bounded && d == 1) || (side == Side::Unbounded && d == -1) => {
            let mut z0 = match side {
                Side::Bounded => {
                    // first moment of f'/f over the circle
                    let mut m = ZERO;
                    for &z in &zs {
                        let dz = z * C64::i() * (2.0 * PI / n as f64);
                        m += z * df(z) / f(z) * dz / (2.0 * PI * C64::i());
                    }
                    m
                }
                Side::Unbounded => {
                    let mut best = (f64::INFINITY, ZERO);
                    for r in [1.05, 1.2, 1.5, 2.0, 3.0, 5.0, 8.0] {
                        for k in 0..64 {
                            let z = C64::from_polar(r, 2.0 * PI * k as f64 / 64.0);
                            let v = f(z).norm() / r;
                            if v < best.0 {
                                best = (v, z);
                            }
                        }
                    }
                    best.1
                }
            };
            for _ in 0..50 {
                let step = f(z0) / df(z0);
                z0 -= step;
                if step.norm() < 1e-15 {
                    break;
                }
            }
            Some(z0)
        }
        _ => return Err(Error::NotUnivalent(format!("winding number {wind}"))),
    };
    let inner = match (side, zero) {
        (Side::Bounded, None) => Inner::One,
        (Side::Bounded, Some(z0)) => Inner::Blaschke(z0),
        (Side::Unbounded, None) => Inner::Z,
        (Side::Unbounded, Some(z0)) => Inner::ZBlaschke(z0),
    };
    let b = inner.rational();
    // log|f/inner| on the circle, Fourier analysed
    let lg: Vec<f64> = zs.iter().zip(&vals).map(|(z, v)| (v / b.eval_unchecked(*z)).norm().ln()).collect();
    let m = n / 2;
    let mut coef = vec![ZERO; m];
    for (j, c) in coef.iter_mut().enumerate() {
        let mut s = ZERO;
        for (k, l) in lg.iter().enumerate() {
            s += C64::from_polar(*l, -2.0 * PI * (j * k) as f64 / n as f64);
        }
        *c = s / n as f64;
    }
    // outer exponent E with Re E = log|f/inner| − const on the circle
    let mut exponent = vec![ZERO; m];
    for j in 1..m {
        exponent[j] = match side {
            Side::Bounded => coef[j] * 2.0,
            Side::Unbounded => coef[j].conj() * 2.0,
        };
    }
    // constant from one sample: f = K·inner·exp(E)
    let z = zs[0];
    let e_at = |z: C64| -> C64 {
        let t = match side {
            Side::Bounded => z,
            Side::Unbounded => z.inv(),
        };
        series::eval(&exponent, t)
    };
    let constant = vals[0] / (b.eval_unchecked(z) * e_at(z).exp());
    Ok(NumericFactor { zero, exponent, constant })
}

/// SVG with one closed polyline per curve; the view box is the union bounding
/// box padded by 5%.
pub fn svg_curves(curves: &[Vec<C64>]) -> String {
    let mut lo = C64::new(f64::INFINITY, f64::INFINITY);
    let mut hi = C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for c in curves {
        for w in c {
            lo.re = lo.re.min(w.re);
            lo.im = lo.im.min(w.im);
            hi.re = hi.re.max(w.re);
            hi.im = hi.im.max(w.im);
        }
    }
    if !lo.re.is_finite() {
        lo = C64::new(-1.0, -1.0);
        hi = C64::new(1.0, 1.0);
    }
    let pad = 0.05 * (hi.re - lo.re).max(hi.im - lo.im).max(1e-12);
    let (x0, y0) = (lo.re - pad, -hi.im - pad);
    let (wd, ht) = (hi.re - lo.re + 2.0 * pad, hi.im - lo.im + 2.0 * pad);
    let stroke = 0.004 * wd.max(ht);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{x0:.6} {y0:.6} {wd:.6} {ht:.6}\">\n"
    );
    for c in curves {
        s.push_str(&format!("<polygon fill=\"none\" stroke=\"black\" stroke-width=\"{stroke:.6}\" points=\""));
        for (i, w) in c.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            s.push_str(&format!("{:.6},{:.6}", w.re, -w.im));
        }
        s.push_str("\"/>\n");
    }
    s.push_str("</svg>\n");
    s
}
