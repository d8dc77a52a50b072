//! Hyperboloidal slices `Sigma_tau = {t = sqrt(tau^2 + r^2)}` in `d = 3`,
//! Lorentz boosts acting on radial fields, and weighted norms.
//!
//! A radial field restricted to a slice is stored as `f(r) = u(w(r), r)` and
//! `g(r) = u_t(w(r), r)`. Boosts are tangent to the slice, so every `L^beta u`
//! follows from `f` alone through `L^i u = x^i D f` with `D = (w/r) d/dr`:
//!
//! * `L^j L^i u = t delta_ij A + x^i x^j B` with `A = D f`, `B = D A`;
//! * `L^k L^j L^i u = delta_ij x^k P + (delta_ik x^j + delta_jk x^i) Q + x^i x^j x^k C`
//!   with `P = A + t B`, `Q = t B`, `C = D B`.
//!
//! Time derivatives of boosted fields also need `g`:
//! `d_t A = D g + f'/r - g/w` and `d_t B = D(d_t A) + A'/r - d_t A / w`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn w_tau(tau: f64, r: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    if r < 0.0 {
        return Err(Error::Domain(format!("radius must be non-negative, got {r}")));
    }
    Ok(tau.hypot(r))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlicePoint {
    pub tau: f64,
    pub r: f64,
    pub t: f64,
    pub weight_w: f64,
    pub vol_weight: f64,
}

impl SlicePoint {
    pub fn new(tau: f64, r: f64) -> Result<Self> {
        let w = w_tau(tau, r)?;
        Ok(Self { tau, r, t: w, weight_w: w, vol_weight: tau / w })
    }
}

/// Slice restriction of all `n` components on the grid `r_j = j dr`.
///
/// Component 0 is the wave unknown. Derivatives along the slice are taken
/// from the stored values, so only `u` and `u_t` are kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceField {
    pub tau: f64,
    pub dr: f64,
    /// `u[e][j]`
    pub u: Vec<Vec<f64>>,
    /// `ut[e][j]`
    pub ut: Vec<Vec<f64>>,
}

impl SliceField {
    pub fn zeros(tau: f64, dr: f64, n: usize, len: usize) -> Self {
        Self { tau, dr, u: vec![vec![0.0; len]; n], ut: vec![vec![0.0; len]; n] }
    }

    /// Samples closed-form `u(t, r)` and `u_t(t, r)` on the slice.
    pub fn from_fn(
        tau: f64,
        dr: f64,
        len: usize,
        n: usize,
        u: impl Fn(usize, f64, f64) -> f64,
        ut: impl Fn(usize, f64, f64) -> f64,
    ) -> Self {
        let mut s = Self::zeros(tau, dr, n, len);
        for j in 0..len {
            let r = j as f64 * dr;
            let t = tau.hypot(r);
            for e in 0..n {
                s.u[e][j] = u(e, t, r);
                s.ut[e][j] = ut(e, t, r);
            }
        }
        s
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn len(&self) -> usize {
        self.u.first().map(Vec::len).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn r(&self, j: usize) -> f64 {
        j as f64 * self.dr
    }

    pub fn w(&self, j: usize) -> f64 {
        self.tau.hypot(self.r(j))
    }

    pub fn scaled(&self, s: f64) -> Self {
        let m = |v: &Vec<Vec<f64>>| v.iter().map(|c| c.iter().map(|x| s * x).collect()).collect();
        Self { tau: self.tau, dr: self.dr, u: m(&self.u), ut: m(&self.ut) }
    }

    pub fn is_zero(&self) -> bool {
        self.u.iter().chain(&self.ut).all(|c| c.iter().all(|x| *x == 0.0))
    }

    /// Largest radius carrying a nonzero value.
    pub fn support_radius(&self) -> f64 {
        let mut last = 0;
        for c in self.u.iter().chain(&self.ut) {
            if let Some(j) = c.iter().rposition(|x| *x != 0.0) {
                last = last.max(j);
            }
        }
        self.r(last)
    }
}

/// `h'` by fourth-order differences: centered with even extension about
/// `r = 0`, one-sided at the last two points.
pub fn radial_derivative(dr: f64, h: &[f64]) -> Vec<f64> {
    let n = h.len();
    let at = |j: isize| -> f64 { h.get(j.unsigned_abs()).copied().unwrap_or(0.0) };
    let mut d: Vec<f64> = (0..n as isize)
        .map(|j| (-at(j + 2) + 8.0 * at(j + 1) - 8.0 * at(j - 1) + at(j - 2)) / (12.0 * dr))
        .collect();
    if n >= 5 {
        let k = n - 1;
        d[k] = (25.0 * h[k] - 48.0 * h[k - 1] + 36.0 * h[k - 2] - 16.0 * h[k - 3] + 3.0 * h[k - 4]) / (12.0 * dr);
        let k = n - 2;
        d[k] = (3.0 * h[k + 1] + 10.0 * h[k] - 18.0 * h[k - 1] + 6.0 * h[k - 2] - h[k - 3]) / (12.0 * dr);
    }
    d
}

/// `h'/r`, with the even-extension limit `h''(0)` at the origin.
pub fn over_r_derivative(dr: f64, h: &[f64]) -> Vec<f64> {
    let mut d = radial_derivative(dr, h);
    for (j, v) in d.iter_mut().enumerate().skip(1) {
        *v /= j as f64 * dr;
    }
    if !h.is_empty() {
        let at = |j: usize| h.get(j).copied().unwrap_or(0.0);
        d[0] = (16.0 * at(1) - at(2) - 15.0 * at(0)) / (6.0 * dr * dr);
    }
    d
}

/// Slice derivative `D h = (w/r) h'`.
pub fn boost_derivative(tau: f64, dr: f64, h: &[f64]) -> Vec<f64> {
    let mut d = over_r_derivative(dr, h);
    for (j, v) in d.iter_mut().enumerate() {
        *v *= tau.hypot(j as f64 * dr);
    }
    d
}

/// Rotation-summed squared boost derivatives of one slice function, per grid point.
/// `sums[k][j] = sum_{|beta| = k} |L^beta h|^2 (r_j)` for `k = 0..=order`.
pub fn boost_sums(tau: f64, dr: f64, h: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = h.len();
    let mut out = vec![h.iter().map(|x| x * x).collect::<Vec<_>>()];
    if order == 0 {
        return out;
    }
    let a = boost_derivative(tau, dr, h);
    let r = |j: usize| j as f64 * dr;
    let w = |j: usize| tau.hypot(r(j));
    out.push((0..n).map(|j| (r(j) * a[j]).powi(2)).collect());
    if order == 1 {
        return out;
    }
    let b = boost_derivative(tau, dr, &a);
    out.push(
        (0..n)
            .map(|j| {
                let (r2, w) = (r(j) * r(j), w(j));
                3.0 * w * w * a[j] * a[j] + 2.0 * w * a[j] * r2 * b[j] + r2 * r2 * b[j] * b[j]
            })
            .collect(),
    );
    if order == 2 {
        return out;
    }
    let c = boost_derivative(tau, dr, &b);
    out.push(
        (0..n)
            .map(|j| {
                let (r2, w) = (r(j) * r(j), w(j));
                let p = a[j] + w * b[j];
                let q = w * b[j];
                let cc = c[j];
                3.0 * r2 * p * p + 8.0 * r2 * q * q + 4.0 * r2 * p * q
                    + r2 * r2 * r2 * cc * cc
                    + 2.0 * r2 * r2 * p * cc
                    + 4.0 * r2 * r2 * q * cc
            })
            .collect(),
    );
    out
}

/// Intermediate slice profiles of one component used for time derivatives of boosts.
#[derive(Debug, Clone)]
pub struct TimeBoostProfile {
    /// `L^i u = x^i a`
    pub a: Vec<f64>,
    /// `L^j L^i u = t delta a + x x b`
    pub b: Vec<f64>,
    /// `d_t L^i u = x^i e`
    pub e: Vec<f64>,
    /// `d_t L^j L^i u = delta p2 + x x q2`
    pub p2: Vec<f64>,
    pub q2: Vec<f64>,
}

pub fn time_boost_profile(tau: f64, dr: f64, f: &[f64], g: &[f64]) -> TimeBoostProfile {
    let n = f.len();
    let w = |j: usize| tau.hypot(j as f64 * dr);
    let a = boost_derivative(tau, dr, f);
    let b = boost_derivative(tau, dr, &a);
    let dg = boost_derivative(tau, dr, g);
    let fr = over_r_derivative(dr, f);
    let e: Vec<f64> = (0..n).map(|j| dg[j] + fr[j] - g[j] / w(j)).collect();
    let de = boost_derivative(tau, dr, &e);
    let ar = over_r_derivative(dr, &a);
    let q2: Vec<f64> = (0..n).map(|j| de[j] + ar[j] - e[j] / w(j)).collect();
    let p2: Vec<f64> = (0..n).map(|j| a[j] + w(j) * e[j]).collect();
    TimeBoostProfile { a, b, e, p2, q2 }
}

/// Rotation-summed boost quantities of one component at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostNorms {
    pub u2: f64,
    pub lu2: f64,
    pub llu2: f64,
    pub dtu2: f64,
    pub dt_lu2: f64,
    pub dt_llu2: f64,
}

pub fn boost_norms(field: &SliceField, component: usize, index: usize) -> Result<BoostNorms> {
    if component >= field.n() || index >= field.len() {
        return Err(Error::Range(format!(
            "component {component} / index {index} outside field of {} x {}",
            field.n(),
            field.len()
        )));
    }
    let (tau, dr) = (field.tau, field.dr);
    let f = &field.u[component];
    let g = &field.ut[component];
    let s = boost_sums(tau, dr, f, 2);
    let p = time_boost_profile(tau, dr, f, g);
    let r2 = field.r(index).powi(2);
    Ok(BoostNorms {
        u2: s[0][index],
        lu2: s[1][index],
        llu2: s[2][index],
        dtu2: g[index] * g[index],
        dt_lu2: r2 * p.e[index].powi(2),
        dt_llu2: 3.0 * p.p2[index].powi(2) + 2.0 * r2 * p.p2[index] * p.q2[index] + r2 * r2 * p.q2[index].powi(2),
    })
}

/// Which components enter a norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Selector {
    Wave,
    Kg(usize),
    KgAll,
    All,
}

impl Selector {
    fn components(self, n: usize) -> Vec<usize> {
        match self {
            Selector::Wave => vec![0],
            Selector::Kg(i) => vec![i],
            Selector::KgAll => (1..n).collect(),
            Selector::All => (0..n).collect(),
        }
    }
}

/// Composite trapezoid rule on `r_j = j dr`.
pub fn trapezoid(dr: f64, y: &[f64]) -> f64 {
    match y.len() {
        0 | 1 => 0.0,
        n => dr * (y.iter().sum::<f64>() - 0.5 * (y[0] + y[n - 1])),
    }
}

/// `sum_e sum_{|beta|=order} |L^beta h_e|^2` per grid point for the selected slice functions.
fn pointwise_sums(field: &SliceField, sel: Selector, order: usize, dt: bool) -> Vec<f64> {
    let mut total = vec![0.0; field.len()];
    for e in sel.components(field.n()) {
        let h = if dt { &field.ut[e] } else { &field.u[e] };
        let s = boost_sums(field.tau, field.dr, h, order);
        for (t, v) in total.iter_mut().zip(&s[order]) {
            *t += v;
        }
    }
    total
}

fn integrate_weighted(field: &SliceField, density: &[f64], p: f64, alpha: f64) -> f64 {
    let tau = field.tau;
    let y: Vec<f64> = density
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let r = field.r(j);
            let w = field.w(j);
            4.0 * PI * (tau / w) * r * r * w.powf(alpha) * s.powf(0.5 * p)
        })
        .collect();
    trapezoid(field.dr, &y)
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("exponent p must lie in [1, inf), got {p}")))
    }
}

/// `( int w^alpha (sum_{|beta|=order} |L^beta u|^2)^{p/2} dvol )^{1/p}`.
pub fn weighted_norm(field: &SliceField, sel: Selector, p: f64, alpha: f64, order: usize) -> Result<f64> {
    check_p(p)?;
    if field.is_empty() {
        return Ok(0.0);
    }
    let s = pointwise_sums(field, sel, order, false);
    Ok(integrate_weighted(field, &s, p, alpha).powf(1.0 / p))
}

/// As [`weighted_norm`] for the boosted time derivative `L^beta (d_t u)`.
pub fn weighted_norm_dt(field: &SliceField, sel: Selector, p: f64, alpha: f64, order: usize) -> Result<f64> {
    check_p(p)?;
    if field.is_empty() {
        return Ok(0.0);
    }
    let s = pointwise_sums(field, sel, order, true);
    Ok(integrate_weighted(field, &s, p, alpha).powf(1.0 / p))
}

/// Inhomogeneous `W^{k,2}_alpha` norm, `(sum_{j<=k} ||u||^2_{W^{j,2}_alpha})^{1/2}`.
pub fn sobolev_norm(field: &SliceField, sel: Selector, alpha: f64, k: usize, dt: bool) -> f64 {
    let mut sq = 0.0;
    for j in 0..=k {
        let s = pointwise_sums(field, sel, j, dt);
        sq += integrate_weighted(field, &s, 2.0, alpha);
    }
    sq.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SobolevKind {
    /// `tau^{1/2} ||u w^{(2+l)/2}||_inf <~ ||u||_{W^{2,2}_l}`
    Morrey { l: f64 },
    /// `tau^{1/2-1/r} ||u||_{W^{k,r}_{r/2-2}} <~ ||u||_{W^{k,2}_{-1}}^{(6-r)/2r} ||u||_{W^{k+1,2}_{-1}}^{(3r-6)/2r}`
    GnsWave { k: usize },
    /// `tau^{1/2-1/r} ||u||_{W^{k,r}_1} <~ ||u||_{W^{k,2}_1}^{(6-r)/2r} ||u||_{W^{k+1,2}_{-1}}^{(3r-6)/2r}`
    GnsKg { k: usize },
    /// `||u||_{L^2_{-1}} <= 2 ||u||_{W^{1,2}_{-1}}`
    Hardy,
}

/// Left side over right side of the selected inequality for the wave component
/// of `field` (the `u` slot only).
pub fn sobolev_ratio(field: &SliceField, kind: SobolevKind, r_exp: f64) -> Result<f64> {
    let tau = field.tau;
    let sel = Selector::Wave;
    let (lhs, rhs) = match kind {
        SobolevKind::Hardy => (weighted_norm(field, sel, 2.0, -1.0, 0)?, weighted_norm(field, sel, 2.0, -1.0, 1)?),
        SobolevKind::Morrey { l } => {
            let f = &field.u[0];
            let sup = (0..field.len()).map(|j| f[j].abs() * field.w(j).powf(0.5 * (2.0 + l))).fold(0.0, f64::max);
            (tau.sqrt() * sup, sobolev_norm(field, sel, l, 2, false))
        }
        SobolevKind::GnsWave { k } | SobolevKind::GnsKg { k } => {
            if !(2.0..=6.0).contains(&r_exp) {
                return Err(Error::Domain(format!("r_exp must lie in [2, 6], got {r_exp}")));
            }
            let (a_lhs, a_low) = match kind {
                SobolevKind::GnsWave { .. } => (0.5 * r_exp - 2.0, -1.0),
                _ => (1.0, 1.0),
            };
            let lhs = tau.powf(0.5 - 1.0 / r_exp) * weighted_norm(field, sel, r_exp, a_lhs, k)?;
            let low = weighted_norm(field, sel, 2.0, a_low, k)?;
            let high = weighted_norm(field, sel, 2.0, -1.0, k + 1)?;
            let e1 = (6.0 - r_exp) / (2.0 * r_exp);
            let e2 = (3.0 * r_exp - 6.0) / (2.0 * r_exp);
            (lhs, low.powf(e1) * high.powf(e2))
        }
    };
    if !(rhs > 0.0) || !rhs.is_finite() {
        return Err(Error::UndefinedRatio(format!("{kind:?}: right-hand side is {rhs}")));
    }
    Ok(lhs / rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w_tau_examples() {
        assert_eq!(w_tau(2.0, 0.0).unwrap(), 2.0);
        assert!((w_tau(1.0, 3f64.sqrt()).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(w_tau(3.0, 4.0).unwrap(), 5.0);
        assert!(w_tau(0.0, 1.0).is_err());
        assert!(w_tau(-1.0, 1.0).is_err());
    }

    #[test]
    fn slice_point_invariants() {
        let p = SlicePoint::new(3.0, 4.0).unwrap();
        assert!((p.t * p.t - p.r * p.r - 9.0).abs() < 1e-12);
        assert_eq!(p.vol_weight, 0.6);
        assert_eq!(SlicePoint::new(3.0, 0.0).unwrap().vol_weight, 1.0);
    }

    #[test]
    fn boosts_of_simple_fields() {
        let dr = 0.01;
        let len = 400;
        let f = SliceField::from_fn(2.0, dr, len, 1, |_, t, r| t * t - r * r, |_, t, _| 2.0 * t);
        let s = boost_sums(2.0, dr, &f.u[0], 2);
        assert!(s[1].iter().take(len - 2).all(|v| v.abs() < 1e-18));
        let f = SliceField::from_fn(2.0, dr, len, 1, |_, t, _| t, |_, _, _| 1.0);
        let s = boost_sums(2.0, dr, &f.u[0], 1);
        for j in 0..len - 2 {
            let r = j as f64 * dr;
            assert!((s[1][j] - r * r).abs() < 1e-8 * (1.0 + r * r), "{j} {} {}", s[1][j], r * r);
        }
    }

    #[test]
    fn polynomial_time_boosts() {
        // u = t |x|^2: L u = x (2t^2 + r^2), d_t L u = x 4t, d_t LL u: p2 = 2t^2 + r^2 + 4t^2, q2 = 6.
        let (tau, dr) = (1.5, 0.005);
        let f = SliceField::from_fn(tau, dr, 600, 1, |_, t, r| t * r * r, |_, _, r| r * r);
        let p = time_boost_profile(tau, dr, &f.u[0], &f.ut[0]);
        for j in [0usize, 1, 50, 300] {
            let r = j as f64 * dr;
            let t = tau.hypot(r);
            assert!((p.a[j] - (2.0 * t * t + r * r)).abs() < 1e-4);
            assert!((p.e[j] - 4.0 * t).abs() < 1e-4);
            assert!((p.q2[j] - 6.0).abs() < 1e-3, "{j} {}", p.q2[j]);
            assert!((p.p2[j] - (6.0 * t * t + r * r)).abs() < 1e-3);
        }
    }

    #[test]
    fn zero_and_scaling_norms() {
        let z = SliceField::zeros(2.0, 0.01, 3, 100);
        for order in 0..3 {
            assert_eq!(weighted_norm(&z, Selector::All, 2.0, -1.0, order).unwrap(), 0.0);
        }
        let f = SliceField::from_fn(2.0, 0.01, 500, 1, |_, _, r| (-r * r).exp(), |_, _, _| 0.0);
        for order in 0..3 {
            let a = weighted_norm(&f, Selector::Wave, 3.0, 0.5, order).unwrap();
            let b = weighted_norm(&f.scaled(2.0), Selector::Wave, 3.0, 0.5, order).unwrap();
            assert!((b - 2.0 * a).abs() <= 1e-14 * b);
        }
    }

    #[test]
    fn hardy_on_gaussian() {
        let f = SliceField::from_fn(2.0, 0.01, 800, 1, |_, _, r| (-r * r).exp(), |_, _, _| 0.0);
        let ratio = sobolev_ratio(&f, SobolevKind::Hardy, 2.0).unwrap();
        assert!(ratio <= 2.0, "{ratio}");
        let r2 = sobolev_ratio(&f.scaled(2.0), SobolevKind::Hardy, 2.0).unwrap();
        assert!((ratio - r2).abs() < 1e-14);
        assert!(matches!(
            sobolev_ratio(&SliceField::zeros(2.0, 0.01, 1, 10), SobolevKind::Hardy, 2.0),
            Err(Error::UndefinedRatio(_))
        ));
    }
}
