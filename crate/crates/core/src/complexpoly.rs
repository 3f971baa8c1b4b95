//! Complex polynomials and rational functions.

use crate::{Error, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::OnceLock;

pub const EPS_POLE: f64 = 1e-10;
pub const EPS_CLUSTER: f64 = 1e-8;
pub const EPS_ROOT: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Polynomial with ascending coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<C64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == ZERO {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![ZERO] }
    }

    pub fn constant(a: C64) -> Self {
        Poly { coeffs: vec![a] }
    }

    pub fn monomial(a: C64, n: usize) -> Self {
        let mut v = vec![ZERO; n + 1];
        v[n] = a;
        Poly::new(v)
    }

    /// (w − a)
    pub fn linear_root(a: C64) -> Self {
        Poly { coeffs: vec![-a, ONE] }
    }

    pub fn from_roots(roots: &[C64]) -> Self {
        let mut p = Poly::constant(ONE);
        for &r in roots {
            p = p.mul(&Poly::linear_root(r));
        }
        p
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    pub fn lead(&self) -> C64 {
        *self.coeffs.last().unwrap()
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn norm1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn eval(&self, w: C64) -> C64 {
        let mut acc = ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * w + c;
        }
        acc
    }

    /// Returns (p(w), p'(w)).
    pub fn eval_with_deriv(&self, w: C64) -> (C64, C64) {
        let mut p = ZERO;
        let mut d = ZERO;
        for c in self.coeffs.iter().rev() {
            d = d * w + p;
            p = p * w + c;
        }
        (p, d)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    pub fn add(&self, o: &Poly) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Poly) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }

    pub fn scale(&self, a: C64) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c * a).collect())
    }

    pub fn mul(&self, o: &Poly) -> Self {
        let mut v = vec![ZERO; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::new(v)
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut p = Poly::constant(ONE);
        for _ in 0..k {
            p = p.mul(self);
        }
        p
    }

    /// Euclidean division: self = q·d + r with deg r < deg d.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree();
        let lead = d.lead();
        if self.degree() < dd || self.is_zero() {
            return (Poly::zero(), self.clone());
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![ZERO; self.degree() - dd + 1];
        for k in (0..q.len()).rev() {
            let t = r[k + dd] / lead;
            q[k] = t;
            for j in 0..=dd {
                r[k + j] -= t * d.coeffs[j];
            }
        }
        r.truncate(dd.max(1));
        (Poly::new(q), Poly::new(r))
    }

    /// Quotient of division by (w − a), remainder discarded.
    pub fn deflate(&self, a: C64) -> Self {
        let n = self.degree();
        if n == 0 {
            return Poly::zero();
        }
        let mut q = vec![ZERO; n];
        let mut acc = ZERO;
        for k in (0..n).rev() {
            acc = acc * a + self.coeffs[k + 1];
            q[k] = acc;
        }
        Poly::new(q)
    }

    /// Coefficients of t ↦ p(a + t).
    pub fn shift(&self, a: C64) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for k in (i..n - 1).rev() {
                let t = c[k + 1] * a;
                c[k] += t;
            }
        }
        Poly::new(c)
    }

    /// Coefficients of u ↦ u^m p(1/u) for m ≥ deg p.
    pub fn reversed(&self, m: usize) -> Self {
        let mut v = vec![ZERO; m + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            if k <= m {
                v[m - k] = *c;
            }
        }
        Poly::new(v)
    }

    pub fn conj(&self) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// Substitutes z ↦ a·z.
    pub fn scale_arg(&self, a: C64) -> Self {
        let mut f = ONE;
        let mut v = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            v.push(c * f);
            f *= a;
        }
        Poly::new(v)
    }

    /// Composition p(g(z)).
    pub fn compose(&self, g: &Poly) -> Self {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(g).add(&Poly::constant(*c));
        }
        acc
    }

    /// Drops leading coefficients below `tol` relative to the largest one.
    pub fn trim_rel(&self, tol: f64) -> Self {
        let m = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut v = self.coeffs.clone();
        while v.len() > 1 && v.last().unwrap().norm() <= tol * m {
            v.pop();
        }
        Poly::new(v)
    }

    fn eval_scale(&self, w: C64) -> f64 {
        let r = w.norm();
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * r + c.norm();
        }
        acc
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})w"),
                _ => format!("({c})w^{k}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// All roots of `p` with multiplicity (Aberth–Ehrlich iteration).
pub fn poly_roots(p: &Poly) -> Result<Vec<C64>> {
    let p = Poly::new(p.coeffs.clone());
    let mut roots = Vec::new();
    let mut start = 0;
    while start < p.degree() && p.coeffs[start] == ZERO {
        roots.push(ZERO);
        start += 1;
    }
    let q = Poly::new(p.coeffs[start..].to_vec());
    let n = q.degree();
    if n == 0 {
        return Ok(roots);
    }
    let lead = q.lead();
    let q = q.scale(lead.inv());
    if n == 1 {
        roots.push(-q.coeffs[0]);
        return Ok(roots);
    }
    let radius = (0..n)
        .map(|k| (q.coeffs[k].norm()).powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for attempt in 0..8 {
        let mut z: Vec<C64> = (0..n)
            .map(|k| {
                let jitter = if attempt == 0 { 0.0 } else { rng.gen::<f64>() };
                let ang = 2.0 * std::f64::consts::PI * (k as f64 + 0.25 + jitter) / n as f64 + 0.4;
                C64::from_polar(radius * (1.0 + 0.1 * jitter), ang)
            })
            .collect();
        if aberth(&q, &mut z, 500) {
            for r in z.iter_mut() {
                polish(&q, r);
            }
            let ok = z
                .iter()
                .all(|&r| q.eval(r).norm() <= EPS_ROOT * q.eval_scale(r).max(1.0) * 1e2);
            if ok {
                roots.extend(z);
                return Ok(roots);
            }
        }
    }
    Err(Error::NonConvergence("poly_roots".into()))
}

fn aberth(q: &Poly, z: &mut [C64], maxit: usize) -> bool {
    let n = z.len();
    for _ in 0..maxit {
        let mut done = true;
        for k in 0..n {
            let (pv, dv) = q.eval_with_deriv(z[k]);
            if pv.norm() <= 1e-3 * EPS_ROOT * q.eval_scale(z[k]) {
                continue;
            }
            let ratio = pv / dv;
            let mut s = ZERO;
            for j in 0..n {
                if j != k {
                    s += (z[k] - z[j]).inv();
                }
            }
            let step = ratio / (ONE - ratio * s);
            if !step.re.is_finite() || !step.im.is_finite() {
                return false;
            }
            z[k] -= step;
            if step.norm() > 1e-15 * (1.0 + z[k].norm()) {
                done = false;
            }
        }
        if done {
            return true;
        }
    }
    z.iter()
        .all(|&r| q.eval(r).norm() <= EPS_ROOT * q.eval_scale(r).max(1.0) * 1e2)
}

fn polish(q: &Poly, r: &mut C64) {
    for _ in 0..3 {
        let (pv, dv) = q.eval_with_deriv(*r);
        if dv.norm() < 1e-300 {
            return;
        }
        let step = pv / dv;
        let cand = *r - step;
        if q.eval(cand).norm() < pv.norm() {
            *r = cand;
        } else {
            return;
        }
    }
}

/// Location of a pole; infinity is a tag, never a float.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Location {
    Finite(C64),
    Infinity,
}

/// Principal part Σ_{k=1}^{order} coeffs[k−1]/(w − p)^k at a finite pole, or
/// Σ coeffs[k−1] w^k at infinity.
#[derive(Clone, Debug, PartialEq)]
pub struct PolePart {
    pub location: Location,
    pub order: usize,
    pub coeffs: Vec<C64>,
}

impl PolePart {
    pub fn simple(p: C64, residue: C64) -> Self {
        PolePart { location: Location::Finite(p), order: 1, coeffs: vec![residue] }
    }

    pub fn at(p: C64, coeffs: Vec<C64>) -> Self {
        PolePart { location: Location::Finite(p), order: coeffs.len(), coeffs }
    }

    pub fn point(&self) -> Option<C64> {
        match self.location {
            Location::Finite(p) => Some(p),
            Location::Infinity => None,
        }
    }

    pub fn residue(&self) -> C64 {
        self.coeffs[0]
    }

    pub fn eval(&self, w: C64) -> C64 {
        match self.location {
            Location::Finite(p) => {
                let t = (w - p).inv();
                let mut acc = ZERO;
                for c in self.coeffs.iter().rev() {
                    acc = (acc + c) * t;
                }
                acc
            }
            Location::Infinity => {
                let mut acc = ZERO;
                for c in self.coeffs.iter().rev() {
                    acc = (acc + c) * w;
                }
                acc
            }
        }
    }
}

/// Rational function num/den with a lazily filled principal-part cache.
#[derive(Clone, Debug)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
    poles: OnceLock<Vec<PolePart>>,
}

impl PartialEq for RationalFn {
    fn eq(&self, o: &Self) -> bool {
        self.num == o.num && self.den == o.den
    }
}

impl RationalFn {
    /// Builds num/den, normalizes den to be monic and cancels common roots.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::NonFinite("zero denominator".into()));
        }
        let (n, d) = reduce(&num, &den);
        Ok(Self::raw(n, d))
    }

    fn raw(num: Poly, den: Poly) -> Self {
        let l = den.lead();
        let num = num.scale(l.inv());
        let den = den.scale(l.inv());
        let num = if num.is_zero() { Poly::zero() } else { num };
        RationalFn { num, den, poles: OnceLock::new() }
    }

    pub fn from_poly(p: Poly) -> Self {
        Self::with_cache(p, Poly::constant(ONE), Vec::new())
    }

    pub fn constant(a: C64) -> Self {
        Self::from_poly(Poly::constant(a))
    }

    pub fn zero() -> Self {
        Self::constant(ZERO)
    }

    /// The identity w ↦ w.
    pub fn identity() -> Self {
        Self::from_poly(Poly::monomial(ONE, 1))
    }

    /// a/(w − p)^k
    pub fn pole(a: C64, p: C64, k: usize) -> Self {
        let mut coeffs = vec![ZERO; k];
        coeffs[k - 1] = a;
        Self::from_parts(Poly::zero(), vec![PolePart::at(p, coeffs)])
    }

    fn with_cache(num: Poly, den: Poly, parts: Vec<PolePart>) -> Self {
        let r = Self::raw(num, den);
        let _ = r.poles.set(parts);
        r
    }

    /// Reassembles poly + Σ principal parts (finite poles only).
    pub fn from_parts(poly: Poly, parts: Vec<PolePart>) -> Self {
        let parts: Vec<PolePart> = parts.into_iter().filter_map(trim_part).collect();
        let mut den = Poly::constant(ONE);
        for pp in &parts {
            den = den.mul(&Poly::linear_root(pp.point().unwrap()).pow(pp.order));
        }
        let mut num = poly.mul(&den);
        for (i, pp) in parts.iter().enumerate() {
            let p = pp.point().unwrap();
            let mut others = Poly::constant(ONE);
            for (j, q) in parts.iter().enumerate() {
                if j != i {
                    others = others.mul(&Poly::linear_root(q.point().unwrap()).pow(q.order));
                }
            }
            for (k, c) in pp.coeffs.iter().enumerate() {
                let m = pp.order - (k + 1);
                let term = others.mul(&Poly::linear_root(p).pow(m)).scale(*c);
                num = num.add(&term);
            }
        }
        Self::with_cache(num, den, parts)
    }

    /// num/den whose poles are known to lie at `locs` (with multiplicity);
    /// principal parts are computed by Taylor expansion there.
    pub fn with_poles(num: Poly, den: Poly, locs: &[(C64, usize)]) -> Self {
        let (poly, _) = num.divrem(&den);
        let parts = principal_parts_at(&num, &den, locs);
        Self::from_parts(poly, parts)
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn cached_parts(&self) -> Option<&[PolePart]> {
        if self.poles.get().is_none() {
            if let Ok(p) = compute_parts(&self.num, &self.den) {
                let _ = self.poles.set(p);
            }
        }
        self.poles.get().map(|v| v.as_slice())
    }

    pub fn pole_locations(&self) -> Vec<(C64, usize)> {
        self.cached_parts()
            .map(|ps| ps.iter().map(|p| (p.point().unwrap(), p.order)).collect())
            .unwrap_or_default()
    }

    pub fn eval(&self, w: C64) -> Result<C64> {
        if let Some(parts) = self.cached_parts() {
            for pp in parts {
                let p = pp.point().unwrap();
                let d = (w - p).norm();
                if d < EPS_POLE * (1.0 + w.norm()) {
                    return Err(Error::PoleProximity { w, pole: p, dist: d });
                }
            }
        }
        Ok(self.eval_unchecked(w))
    }

    pub fn eval_unchecked(&self, w: C64) -> C64 {
        if w.norm() > 1.0 {
            // evaluate in 1/w to avoid overflow for large arguments
            let u = w.inv();
            let dn = self.num.degree();
            let dd = self.den.degree();
            let n = self.num.reversed(dn).eval(u);
            let d = self.den.reversed(dd).eval(u);
            let k = dn as i32 - dd as i32;
            n / d * w.powi(k)
        } else {
            self.num.eval(w) / self.den.eval(w)
        }
    }

    /// Value at infinity: None if there is a pole there.
    pub fn at_infinity(&self) -> Option<C64> {
        let dn = self.num.degree();
        let dd = self.den.degree();
        if self.num.is_zero() || dn < dd {
            Some(ZERO)
        } else if dn == dd {
            Some(self.num.lead() / self.den.lead())
        } else {
            None
        }
    }

    pub fn poly_part(&self) -> Poly {
        self.num.divrem(&self.den).0
    }

    pub fn scale(&self, a: C64) -> Self {
        match self.poles.get() {
            Some(parts) => Self::from_parts(
                self.poly_part().scale(a),
                parts
                    .iter()
                    .map(|p| PolePart::at(p.point().unwrap(), p.coeffs.iter().map(|c| c * a).collect()))
                    .collect(),
            ),
            None => Self::raw(self.num.scale(a), self.den.clone()),
        }
    }

    pub fn add(&self, o: &RationalFn) -> Self {
        self.combine(o, ONE)
    }

    pub fn sub(&self, o: &RationalFn) -> Self {
        self.combine(o, -ONE)
    }

    fn combine(&self, o: &RationalFn, sign: C64) -> Self {
        match (self.cached_parts(), o.cached_parts()) {
            (Some(a), Some(b)) => {
                let mut parts: Vec<PolePart> = a.to_vec();
                for q in b {
                    let qp = q.point().unwrap();
                    let sc: Vec<C64> = q.coeffs.iter().map(|c| c * sign).collect();
                    match parts
                        .iter_mut()
                        .find(|p| (p.point().unwrap() - qp).norm() <= EPS_CLUSTER * (1.0 + qp.norm()))
                    {
                        Some(p) => {
                            let n = p.order.max(q.order);
                            p.coeffs.resize(n, ZERO);
                            for (k, c) in sc.into_iter().enumerate() {
                                p.coeffs[k] += c;
                            }
                            p.order = n;
                        }
                        None => parts.push(PolePart::at(qp, sc)),
                    }
                }
                let poly = self.poly_part().add(&o.poly_part().scale(sign));
                Self::from_parts(poly, parts)
            }
            _ => {
                let num = self.num.mul(&o.den).add(&o.num.mul(&self.den).scale(sign));
                Self::new(num, self.den.mul(&o.den)).unwrap()
            }
        }
    }

    pub fn mul(&self, o: &RationalFn) -> Self {
        let num = self.num.mul(&o.num);
        let den = self.den.mul(&o.den);
        match (self.cached_parts(), o.cached_parts()) {
            (Some(a), Some(b)) => {
                let locs = merge_locs(a, b, true);
                Self::with_poles(num, den, &locs)
            }
            _ => Self::new(num, den).unwrap(),
        }
    }

    /// w·f(w)
    pub fn mul_w(&self) -> Self {
        self.mul(&Self::identity())
    }

    /// Substitutes w ↦ a·w.
    pub fn scale_arg(&self, a: C64) -> Self {
        let num = self.num.scale_arg(a);
        let den = self.den.scale_arg(a);
        match self.cached_parts() {
            Some(parts) => {
                let locs: Vec<(C64, usize)> =
                    parts.iter().map(|p| (p.point().unwrap() / a, p.order)).collect();
                Self::with_poles(num, den, &locs)
            }
            None => Self::new(num, den).unwrap(),
        }
    }

    /// f(1/u) as a rational function of u.
    pub fn at_reciprocal(&self) -> Self {
        let dn = self.num.degree();
        let dd = self.den.degree();
        let m = dn.max(dd);
        let num = self.num.reversed(m);
        let den = self.den.reversed(m);
        let locs = self.reciprocal_locs(|p| p.inv());
        match locs {
            Some(locs) => Self::with_poles(num, den, &locs),
            None => Self::new(num, den).unwrap(),
        }
    }

    fn reciprocal_locs(&self, map: impl Fn(C64) -> C64) -> Option<Vec<(C64, usize)>> {
        let parts = self.cached_parts()?;
        let mut locs: Vec<(C64, usize)> = parts
            .iter()
            .filter(|p| p.point().unwrap() != ZERO)
            .map(|p| (map(p.point().unwrap()), p.order))
            .collect();
        let d = self.poly_part().degree();
        if !self.poly_part().is_zero() && d >= 1 {
            locs.push((ZERO, d));
        }
        Some(locs)
    }

    pub fn derivative(&self) -> Self {
        match self.cached_parts() {
            Some(parts) => {
                let poly = self.poly_part().derivative();
                let parts = parts
                    .iter()
                    .map(|pp| {
                        let mut c = vec![ZERO; pp.order + 1];
                        for (k, a) in pp.coeffs.iter().enumerate() {
                            c[k + 1] = -(k as f64 + 1.0) * a;
                        }
                        PolePart::at(pp.point().unwrap(), c)
                    })
                    .collect();
                Self::from_parts(poly, parts)
            }
            None => {
                let num = self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative()));
                Self::new(num, self.den.mul(&self.den)).unwrap()
            }
        }
    }

    /// Reflection f^#(z) = conj(f(1/conj z)).
    pub fn reflect(&self) -> Self {
        let dn = self.num.degree();
        let dd = self.den.degree();
        let m = dn.max(dd);
        let mut num = self.num.conj().reversed(m).coeffs;
        let mut den = self.den.conj().reversed(m).coeffs;
        while num.len() > 1 && den.len() > 1 && num[0] == ZERO && den[0] == ZERO {
            num.remove(0);
            den.remove(0);
        }
        let (num, den) = (Poly::new(num), Poly::new(den));
        match self.reciprocal_locs(|p| p.conj().inv()) {
            Some(locs) => Self::with_poles(num, den, &locs),
            None => Self::new(num, den).unwrap(),
        }
    }

    /// Composition with a Möbius map z ↦ (a z + b)/(c z + d).
    pub fn compose_mobius(&self, a: C64, b: C64, cc: C64, d: C64) -> Self {
        let gn = Poly::new(vec![b, a]);
        let gd = Poly::new(vec![d, cc]);
        let m = self.num.degree().max(self.den.degree());
        let hom = |p: &Poly| {
            let mut acc = Poly::zero();
            for (j, c) in p.coeffs.iter().enumerate() {
                acc = acc.add(&gn.pow(j).mul(&gd.pow(m - j)).scale(*c));
            }
            acc
        };
        let num = hom(&self.num);
        let den = hom(&self.den);
        // preimages of poles: z = (d p − b)/(a − c p); infinity ↦ −d/c
        let locs = self.cached_parts().map(|parts| {
            let mut locs: Vec<(C64, usize)> = Vec::new();
            for pp in parts {
                let p = pp.point().unwrap();
                let den = a - cc * p;
                if den.norm() > 1e-300 {
                    locs.push(((d * p - b) / den, pp.order));
                }
            }
            let pd = self.poly_part();
            if !pd.is_zero() && pd.degree() >= 1 && cc.norm() > 0.0 {
                locs.push((-d / cc, pd.degree()));
            }
            locs
        });
        match locs {
            Some(locs) => Self::with_poles(num, den, &locs),
            None => Self::new(num, den).unwrap(),
        }
    }

    /// Composition z ↦ f(a z^k).
    pub fn compose_power(&self, a: C64, k: usize) -> Self {
        let g = Poly::monomial(a, k);
        let num = self.num.compose(&g);
        let den = self.den.compose(&g);
        let locs = self.cached_parts().map(|parts| {
            let mut locs = Vec::new();
            for pp in parts {
                let p = pp.point().unwrap() / a;
                if p == ZERO {
                    locs.push((ZERO, pp.order * k));
                    continue;
                }
                let r = p.norm().powf(1.0 / k as f64);
                let t = p.arg() / k as f64;
                for j in 0..k {
                    let ang = t + 2.0 * std::f64::consts::PI * j as f64 / k as f64;
                    locs.push((C64::from_polar(r, ang), pp.order));
                }
            }
            locs
        });
        match locs {
            Some(locs) => Self::with_poles(num, den, &locs),
            None => Self::new(num, den).unwrap(),
        }
    }

    /// Taylor coefficients of f(a + t), n terms; a must not be a pole.
    pub fn taylor(&self, a: C64, n: usize) -> Vec<C64> {
        crate::series::div(&self.num.shift(a).coeffs, &self.den.shift(a).coeffs, n)
    }

    /// f(1/u) = u^s · Σ_j a_j u^j; returns (s, a) with n terms.
    pub fn laurent_inf(&self, n: usize) -> (i64, Vec<C64>) {
        let dn = self.num.degree();
        let dd = self.den.degree();
        let rn = self.num.reversed(dn);
        let rd = self.den.reversed(dd);
        (dd as i64 - dn as i64, crate::series::div(&rn.coeffs, &rd.coeffs, n))
    }

    /// Max coefficient mismatch between principal-part decompositions.
    pub fn distance(&self, o: &RationalFn) -> f64 {
        let d = self.sub(o);
        let mut m = d.poly_part().coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if let Some(parts) = d.cached_parts() {
            for p in parts {
                for c in &p.coeffs {
                    m = m.max(c.norm());
                }
            }
        }
        m
    }
}

fn trim_part(pp: PolePart) -> Option<PolePart> {
    let scale = pp.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut c = pp.coeffs;
    while let Some(last) = c.last() {
        if last.norm() <= 1e-14 * scale || *last == ZERO {
            c.pop();
        } else {
            break;
        }
    }
    if c.is_empty() || scale == 0.0 {
        return None;
    }
    Some(PolePart { location: pp.location, order: c.len(), coeffs: c })
}

fn merge_locs(a: &[PolePart], b: &[PolePart], multiply: bool) -> Vec<(C64, usize)> {
    let mut locs: Vec<(C64, usize)> = a.iter().map(|p| (p.point().unwrap(), p.order)).collect();
    for q in b {
        let qp = q.point().unwrap();
        if let Some(e) = locs
            .iter_mut()
            .find(|(p, _)| (*p - qp).norm() <= EPS_CLUSTER * (1.0 + qp.norm()))
        {
            e.1 = if multiply { e.1 + q.order } else { e.1.max(q.order) };
        } else {
            locs.push((qp, q.order));
        }
    }
    locs
}

/// Principal parts of num/den at the given pole locations.
pub fn principal_parts_at(num: &Poly, den: &Poly, locs: &[(C64, usize)]) -> Vec<PolePart> {
    let mut out = Vec::new();
    for &(a, m) in locs {
        let mut dt = den.clone();
        for _ in 0..m {
            dt = dt.deflate(a);
        }
        let ns = num.shift(a);
        let ds = dt.shift(a);
        let g = crate::series::div(&ns.coeffs, &ds.coeffs, m);
        let coeffs: Vec<C64> = (1..=m).map(|k| g[m - k]).collect();
        out.push(PolePart::at(a, coeffs));
    }
    out
}

fn compute_parts(num: &Poly, den: &Poly) -> Result<Vec<PolePart>> {
    if den.degree() == 0 {
        return Ok(Vec::new());
    }
    let roots = poly_roots(den)?;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if (roots[i] - roots[j]).norm() < EPS_CLUSTER * (1.0 + roots[i].norm()) {
                return Err(Error::ClusteredPoles(roots[i], roots[j]));
            }
        }
    }
    let locs: Vec<(C64, usize)> = roots.iter().map(|&r| (r, 1)).collect();
    Ok(principal_parts_at(num, den, &locs))
}

/// Decomposition f = poly_part + Σ parts; res_inf = −[w⁻¹] of f at infinity.
pub fn rat_principal_parts(f: &RationalFn) -> Result<(Poly, Vec<PolePart>, C64)> {
    let parts = match f.poles.get() {
        Some(p) => p.clone(),
        None => {
            let p = compute_parts(&f.num, &f.den)?;
            let _ = f.poles.set(p.clone());
            p
        }
    };
    let res_inf = -parts.iter().map(|p| p.coeffs[0]).sum::<C64>();
    Ok((f.poly_part(), parts, res_inf))
}

pub fn rat_eval(f: &RationalFn, w: C64) -> Result<C64> {
    f.eval(w)
}

pub fn rat_derivative(f: &RationalFn) -> RationalFn {
    f.derivative()
}

pub fn rat_reflect(f: &RationalFn) -> RationalFn {
    f.reflect()
}

/// Cancels approximately common roots of num and den.
fn reduce(num: &Poly, den: &Poly) -> (Poly, Poly) {
    if num.is_zero() {
        return (Poly::zero(), Poly::constant(ONE));
    }
    if num.degree() == 0 || den.degree() == 0 {
        return (num.clone(), den.clone());
    }
    let (Ok(nr), Ok(dr)) = (poly_roots(num), poly_roots(den)) else {
        return (num.clone(), den.clone());
    };
    let mut used = vec![false; nr.len()];
    let mut n = num.clone();
    let mut d = den.clone();
    for &r in &dr {
        let tol = 1e-6 * (1.0 + r.norm());
        if let Some(j) = (0..nr.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| (nr[a] - r).norm().partial_cmp(&(nr[b] - r).norm()).unwrap())
        {
            if (nr[j] - r).norm() < tol {
                used[j] = true;
                let c = (nr[j] + r) * 0.5;
                n = n.deflate(c);
                d = d.deflate(c);
            }
        }
    }
    (n, d)
}

#[derive(Serialize, Deserialize)]
struct RationalJson {
    num: Vec<[f64; 2]>,
    den: Vec<[f64; 2]>,
}

impl Serialize for RationalFn {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let conv = |p: &Poly| p.coeffs.iter().map(|c| [c.re, c.im]).collect();
        RationalJson { num: conv(&self.num), den: conv(&self.den) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalFn {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = RationalJson::deserialize(d)?;
        let conv = |v: Vec<[f64; 2]>| Poly::new(v.into_iter().map(|[a, b]| C64::new(a, b)).collect());
        RationalFn::new(conv(j.num), conv(j.den)).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] / [{}]", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rand_rat(seed: u64, deg: usize) -> RationalFn {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = || c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let num = Poly::new((0..=deg).map(|_| g()).collect());
        let den = Poly::new((0..=deg).map(|_| g()).collect());
        RationalFn::new(num, den).unwrap()
    }

    #[test]
    fn eval_simple() {
        let f = RationalFn::pole(c(1.0, 0.0), c(0.0, 0.0), 1);
        assert!((f.eval(c(2.0, 0.0)).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        let e = (-1.0f64).exp();
        let g = RationalFn::pole(c(4.0, 0.0), c(e, 0.0), 1);
        let v = g.eval(c(0.0, 0.0)).unwrap();
        assert!((v - c(-4.0 / e, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn eval_near_pole_errors() {
        let f = RationalFn::pole(c(1.0, 0.0), c(0.3, 0.0), 1);
        assert!(matches!(f.eval(c(0.3 + 1e-12, 0.0)), Err(Error::PoleProximity { .. })));
    }

    #[test]
    fn eval_matches_horner() {
        for seed in 0..10 {
            let f = rand_rat(seed, 5);
            let w = c(0.37 + seed as f64 * 0.1, -0.21);
            let direct = f.num().eval(w) / f.den().eval(w);
            let v = f.eval(w).unwrap();
            assert!((v - direct).norm() <= 1e-12 * (1.0 + direct.norm()));
        }
    }

    #[test]
    fn derivative_basics() {
        let f = RationalFn::from_poly(Poly::monomial(c(1.0, 0.0), 2));
        let d = f.derivative();
        assert!(d.distance(&RationalFn::from_poly(Poly::monomial(c(2.0, 0.0), 1))) < 1e-14);
        let a = c(0.2, 0.5);
        let g = RationalFn::pole(c(1.0, 0.0), a, 1).derivative();
        assert!(g.distance(&RationalFn::pole(c(-1.0, 0.0), a, 2)) < 1e-12);
    }

    #[test]
    fn derivative_finite_difference() {
        for seed in 0..5 {
            let f = rand_rat(100 + seed, 4);
            let d = f.derivative();
            for k in 0..10 {
                let w = c(1.5 * (k as f64 * 0.7).cos(), 1.5 * (k as f64 * 0.7).sin());
                let h = 1e-5;
                let fd = (f.eval_unchecked(w + h) - f.eval_unchecked(w - h)) / (2.0 * h);
                let ex = d.eval_unchecked(w);
                assert!((fd - ex).norm() <= 1e-6 * (1.0 + ex.norm()), "{fd} {ex}");
            }
        }
    }

    #[test]
    fn reflect_examples() {
        let z = RationalFn::identity().reflect();
        assert!(z.distance(&RationalFn::pole(c(1.0, 0.0), c(0.0, 0.0), 1)) < 1e-14);
        let k = RationalFn::constant(c(1.0, 2.0)).reflect();
        assert!(k.distance(&RationalFn::constant(c(1.0, -2.0))) < 1e-15);
        // Blaschke factor reflects to its reciprocal
        let lam = c(0.4, 0.1);
        let eps = lam.conj() / lam.norm();
        let b = RationalFn::new(
            Poly::new(vec![-lam * eps, eps]),
            Poly::new(vec![c(-1.0, 0.0), lam.conj()]),
        )
        .unwrap();
        let br = b.reflect();
        for k in 0..8 {
            let z = C64::from_polar(0.7, k as f64);
            let v = br.eval(z).unwrap() * b.eval(z).unwrap();
            assert!((v - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn principal_parts_examples() {
        let e = (-1.0f64).exp();
        let f = RationalFn::new(Poly::constant(c(4.0, 0.0)), Poly::linear_root(c(e, 0.0))).unwrap();
        let (poly, parts, _) = rat_principal_parts(&f).unwrap();
        assert!(poly.is_zero());
        assert_eq!(parts.len(), 1);
        assert!((parts[0].point().unwrap() - e).norm() < 1e-15);
        assert!((parts[0].residue() - 4.0).norm() < 1e-14);

        let g = RationalFn::new(Poly::constant(c(1.0, 0.0)), Poly::new(vec![c(-1.0, 0.0), ZERO, c(1.0, 0.0)]))
            .unwrap();
        let (_, parts, _) = rat_principal_parts(&g).unwrap();
        for p in parts {
            let loc = p.point().unwrap();
            let want = if loc.re > 0.0 { 0.5 } else { -0.5 };
            assert!((p.residue() - want).norm() < 1e-14);
        }

        let alpha = c(0.7, 0.2);
        let h = RationalFn::new(Poly::constant(alpha), Poly::linear_root(c(1.0, 0.3))).unwrap();
        let (_, _, res_inf) = rat_principal_parts(&h).unwrap();
        assert!((res_inf + alpha).norm() < 1e-14);
    }

    #[test]
    fn clustered_poles_reported() {
        let den = Poly::from_roots(&[c(0.5, 0.0), c(0.5 + 1e-10, 0.0)]);
        let f = RationalFn::raw(Poly::constant(c(1.0, 0.0)), den);
        assert!(matches!(rat_principal_parts(&f), Err(Error::ClusteredPoles(..))));
    }

    #[test]
    fn double_pole_from_known_location() {
        let p = c(0.3, -0.2);
        let den = Poly::linear_root(p).pow(2);
        let f = RationalFn::with_poles(Poly::new(vec![c(1.0, 0.0), c(2.0, 0.0)]), den, &[(p, 2)]);
        let parts = f.cached_parts().unwrap();
        // (1 + 2w)/(w−p)² = 2/(w−p) + (1+2p)/(w−p)²
        assert!((parts[0].coeffs[0] - 2.0).norm() < 1e-13);
        assert!((parts[0].coeffs[1] - (1.0 + 2.0 * p)).norm() < 1e-13);
    }

    #[test]
    fn roots_examples() {
        let mut r = poly_roots(&Poly::new(vec![c(1.0, 0.0), ZERO, c(1.0, 0.0)])).unwrap();
        r.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((r[0] - c(0.0, -1.0)).norm() < 1e-12 && (r[1] - c(0.0, 1.0)).norm() < 1e-12);
        let p = Poly::from_roots(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let mut r = poly_roots(&p).unwrap();
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (k, x) in r.iter().enumerate() {
            assert!((x - (k as f64 + 1.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn roots_random_degree8() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let p = Poly::new((0..=8).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect());
            let r = poly_roots(&p).unwrap();
            assert_eq!(r.len(), 8);
            for x in r {
                assert!(p.eval(x).norm() < 1e-10 * p.eval_scale(x).max(1.0));
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let f = rand_rat(3, 3);
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.starts_with("{\"num\":[["));
        let g: RationalFn = serde_json::from_str(&s).unwrap();
        assert!(f.distance(&g) < 1e-10);
    }

    #[test]
    fn poly_shift_and_divrem() {
        let p = Poly::new(vec![c(1.0, 0.0), c(-2.0, 1.0), c(0.5, 0.0), c(3.0, 0.0)]);
        let a = c(0.3, 0.7);
        let s = p.shift(a);
        let t = c(0.11, -0.4);
        assert!((s.eval(t) - p.eval(a + t)).norm() < 1e-13);
        let d = Poly::new(vec![c(0.2, 0.0), c(1.0, 1.0)]);
        let (q, r) = p.divrem(&d);
        let back = q.mul(&d).add(&r);
        assert!(back.sub(&p).norm1() < 1e-13);
    }

    proptest! {
        #[test]
        fn reflect_involution(seed in 0u64..500) {
            let f = rand_rat(seed, 3);
            let g = f.reflect().reflect();
            prop_assert!(f.distance(&g) < 1e-8);
        }

        #[test]
        fn parts_reassemble(seed in 0u64..500) {
            let f = rand_rat(seed, 4);
            let (poly, parts, _) = rat_principal_parts(&f).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
            for _ in 0..20 {
                let w = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                let Ok(v) = f.eval(w) else { continue };
                if parts.iter().any(|p| (w - p.point().unwrap()).norm() < 1e-3) { continue; }
                let s = poly.eval(w) + parts.iter().map(|p| p.eval(w)).sum::<C64>();
                prop_assert!((s - v).norm() <= 1e-10 * (1.0 + v.norm()) * 1e2);
            }
        }

        #[test]
        fn derivative_linear_and_product(seed in 0u64..300) {
            let f = rand_rat(seed, 2);
            let g = rand_rat(seed + 1000, 2);
            let a = c(0.3, -1.1);
            let w = c(1.7, 1.3);
            let lin = f.scale(a).add(&g).derivative().eval_unchecked(w);
            let lin2 = a * f.derivative().eval_unchecked(w) + g.derivative().eval_unchecked(w);
            prop_assert!((lin - lin2).norm() <= 1e-10 * (1.0 + lin.norm()) * 1e2);
            let pr = f.mul(&g).derivative().eval_unchecked(w);
            let pr2 = f.derivative().eval_unchecked(w) * g.eval_unchecked(w)
                + f.eval_unchecked(w) * g.derivative().eval_unchecked(w);
            prop_assert!((pr - pr2).norm() <= 1e-8 * (1.0 + pr.norm()));
        }
    }
}
