//! Spaceform metrics in Fermi coordinates about a geodesic, Christoffel jets
//! by finite differences, and the curvature identities they satisfy.
//!
//! Coordinates are `x = (x1, x_perp)`; index 0 is the geodesic direction.

use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pde::{Case, CouplingCoefficients};

/// Fermi chart of `S^n` (`curvature_sign = 1`), `H^n` (`-1`) or flat space (`0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceformChart {
    pub curvature_sign: i32,
    pub target_dim: usize,
    pub validity_radius: f64,
}

impl SpaceformChart {
    pub fn new(curvature_sign: i32, target_dim: usize, validity_radius: f64) -> Result<Self> {
        if !matches!(curvature_sign, -1..=1) {
            return Err(Error::Domain(format!(
                "curvature sign must be -1, 0 or +1, got {curvature_sign}"
            )));
        }
        if target_dim < 2 {
            return Err(Error::Domain(format!("target dimension must be >= 2, got {target_dim}")));
        }
        if !(validity_radius > 0.0 && validity_radius.is_finite()) {
            return Err(Error::Domain(format!(
                "validity radius must be finite and positive, got {validity_radius}"
            )));
        }
        if curvature_sign == 1 && validity_radius > std::f64::consts::FRAC_PI_2 {
            return Err(Error::Domain(format!(
                "sphere chart validity radius {validity_radius} exceeds the focal radius pi/2"
            )));
        }
        Ok(Self { curvature_sign, target_dim, validity_radius })
    }

    pub fn hyperbolic(n: usize) -> Self {
        Self::new(-1, n, 1.0).expect("valid hyperbolic chart")
    }

    pub fn sphere(n: usize) -> Self {
        Self::new(1, n, 1.0).expect("valid sphere chart")
    }

    pub fn flat(n: usize) -> Self {
        Self::new(0, n, 1.0).expect("valid flat chart")
    }

    pub fn label(&self) -> String {
        let s = match self.curvature_sign {
            1 => "S",
            -1 => "H",
            _ => "R",
        };
        format!("{s}{}", self.target_dim)
    }
}

/// Metric components at a point of the chart.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricValue {
    pub point: Vec<f64>,
    /// Row-major `n x n`.
    pub components: Vec<f64>,
    pub dim: usize,
}

impl MetricValue {
    pub fn identity(n: usize) -> Self {
        let mut components = vec![0.0; n * n];
        for i in 0..n {
            components[i * n + i] = 1.0;
        }
        Self { point: vec![0.0; n], components, dim: n }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.components[i * self.dim + j]
    }

    pub fn is_positive_definite(&self) -> bool {
        DMatrix::from_row_slice(self.dim, self.dim, &self.components).cholesky().is_some()
    }
}

// (sinh x / x)^2 - 1 and (sin x / x)^2 - 1, divided by x^2.
fn warp_excess(kappa: i32, rho: f64) -> f64 {
    if kappa == 0 {
        return 0.0;
    }
    if rho < 0.1 {
        // (sinh x/x)^2 = sum_{k>=1} 2^{2k-1} x^{2k-2} / (2k)!
        let x2 = rho * rho;
        let sign = if kappa < 0 { 1.0 } else { -1.0 };
        let mut sum = 0.0;
        let mut term = 8.0 / 24.0;
        let mut pow = 1.0;
        let mut alt = sign;
        for k in 2..14u32 {
            sum += alt * term * pow;
            let kk = k as f64;
            term *= 4.0 / ((2.0 * kk + 1.0) * (2.0 * kk + 2.0));
            pow *= x2;
            alt *= sign;
        }
        sum
    } else {
        let s = if kappa < 0 { rho.sinh() / rho } else { rho.sin() / rho };
        (s * s - 1.0) / (rho * rho)
    }
}

/// Exact Fermi metric.
pub fn metric_at(chart: &SpaceformChart, point: &[f64]) -> Result<MetricValue> {
    let n = chart.target_dim;
    if point.len() != n {
        return Err(Error::Domain(format!("point has {} coordinates, chart needs {n}", point.len())));
    }
    let rho = point[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
    if rho >= chart.validity_radius {
        return Err(Error::Domain(format!(
            "normal radius |x_perp| = {rho} is outside the validity radius {}",
            chart.validity_radius
        )));
    }
    let mut g = vec![0.0; n * n];
    g[0] = match chart.curvature_sign {
        -1 => rho.cosh().powi(2),
        1 => rho.cos().powi(2),
        _ => 1.0,
    };
    let f = warp_excess(chart.curvature_sign, rho);
    for a in 1..n {
        for b in 1..n {
            let delta = if a == b { 1.0 } else { 0.0 };
            g[a * n + b] = delta + f * (rho * rho * delta - point[a] * point[b]);
        }
    }
    Ok(MetricValue { point: point.to_vec(), components: g, dim: n })
}

/// `R_ijkl = kappa (g_ik g_jl - g_il g_jk)`, flattened row-major.
pub fn riemann_spaceform(kappa: i32, g: &MetricValue) -> Vec<f64> {
    let n = g.dim;
    let k = kappa as f64;
    let mut r = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for a in 0..n {
                for b in 0..n {
                    r[((i * n + j) * n + a) * n + b] =
                        k * (g.get(i, a) * g.get(j, b) - g.get(i, b) * g.get(j, a));
                }
            }
        }
    }
    r
}

/// Christoffel symbols `Gamma^k_ij` at a point, flattened as `[k][i][j]`,
/// from centered differences of the metric with step `h`.
pub fn christoffel_at(chart: &SpaceformChart, point: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = chart.target_dim;
    let g = metric_at(chart, point)?;
    let ginv = DMatrix::from_row_slice(n, n, &g.components)
        .try_inverse()
        .ok_or_else(|| Error::Domain("singular metric".into()))?;
    // dg[l][i][j] = d_l g_ij
    let mut dg = vec![0.0; n * n * n];
    let mut p = point.to_vec();
    for l in 0..n {
        p[l] = point[l] + h;
        let gp = metric_at(chart, &p)?;
        p[l] = point[l] - h;
        let gm = metric_at(chart, &p)?;
        p[l] = point[l];
        for ij in 0..n * n {
            dg[l * n * n + ij] = (gp.components[ij] - gm.components[ij]) / (2.0 * h);
        }
    }
    let d = |l: usize, i: usize, j: usize| dg[(l * n + i) * n + j];
    let mut gamma = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += ginv[(k, l)] * (d(i, j, l) + d(j, i, l) - d(l, i, j));
                }
                gamma[(k * n + i) * n + j] = 0.5 * s;
                gamma[(k * n + j) * n + i] = 0.5 * s;
            }
        }
    }
    Ok(gamma)
}

/// Christoffel symbols and their derivatives up to order 3 on the geodesic
/// (at `x1 = 0`; the spaceform metrics do not depend on `x1`).
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelJet {
    pub chart: SpaceformChart,
    pub dim: usize,
    pub step: f64,
    /// `[k][i][j]`
    pub gamma0: Vec<f64>,
    /// `[m][k][i][j]`
    pub d1: Vec<f64>,
    /// `[m][p][k][i][j]`
    pub d2: Vec<f64>,
    /// `[m][p][q][k][i][j]`
    pub d3: Vec<f64>,
    /// `R_ijkl` on the geodesic.
    pub riemann: Vec<f64>,
}

impl ChristoffelJet {
    fn g3(&self, k: usize, i: usize, j: usize) -> usize {
        (k * self.dim + i) * self.dim + j
    }
    pub fn gamma(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma0[self.g3(k, i, j)]
    }
    pub fn dgamma(&self, m: usize, k: usize, i: usize, j: usize) -> f64 {
        let n3 = self.dim.pow(3);
        self.d1[m * n3 + self.g3(k, i, j)]
    }
    pub fn d2gamma(&self, m: usize, p: usize, k: usize, i: usize, j: usize) -> f64 {
        let n3 = self.dim.pow(3);
        self.d2[(m * self.dim + p) * n3 + self.g3(k, i, j)]
    }
    pub fn d3gamma(&self, m: usize, p: usize, q: usize, k: usize, i: usize, j: usize) -> f64 {
        let n = self.dim;
        let n3 = n.pow(3);
        self.d3[((m * n + p) * n + q) * n3 + self.g3(k, i, j)]
    }
    pub fn riemann_at(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.dim;
        self.riemann[((i * n + j) * n + k) * n + l]
    }
}

// 1D centered stencils for derivative orders 1..3 as (offset, weight * h^order).
fn stencil_1d(order: usize) -> &'static [(i32, f64)] {
    match order {
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        _ => &[(0, 1.0)],
    }
}

struct GammaCache<'a> {
    chart: &'a SpaceformChart,
    h: f64,
    table: HashMap<Vec<i32>, Vec<f64>>,
}

impl GammaCache<'_> {
    fn at(&mut self, offset: &[i32]) -> Result<&Vec<f64>> {
        if !self.table.contains_key(offset) {
            let p: Vec<f64> = offset.iter().map(|&o| o as f64 * self.h).collect();
            let g = christoffel_at(self.chart, &p, self.h)?;
            self.table.insert(offset.to_vec(), g);
        }
        Ok(&self.table[offset])
    }

    /// Mixed partial derivative of every Gamma entry along the listed directions.
    fn derivative(&mut self, dirs: &[usize]) -> Result<Vec<f64>> {
        let n = self.chart.target_dim;
        let mut counts = vec![0usize; n];
        for &d in dirs {
            counts[d] += 1;
        }
        let mut terms: Vec<(Vec<i32>, f64)> = vec![(vec![0; n], 1.0)];
        for (d, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mut next = Vec::new();
            for (off, w) in &terms {
                for &(o, sw) in stencil_1d(c) {
                    let mut off2 = off.clone();
                    off2[d] = o;
                    next.push((off2, w * sw));
                }
            }
            terms = next;
        }
        let scale = self.h.powi(dirs.len() as i32);
        let mut out = vec![0.0; n * n * n];
        for (off, w) in terms {
            let g = self.at(&off)?;
            for (o, v) in out.iter_mut().zip(g) {
                *o += w * v;
            }
        }
        for o in &mut out {
            *o /= scale;
        }
        Ok(out)
    }
}

/// Christoffel jet on the geodesic by nested centered differences with step `step`.
pub fn christoffel_jet(chart: &SpaceformChart, step: f64) -> Result<ChristoffelJet> {
    if !(step > 0.0 && step < chart.validity_radius / 8.0) {
        return Err(Error::Domain(format!(
            "finite-difference step {step} must lie in (0, validity_radius/8 = {})",
            chart.validity_radius / 8.0
        )));
    }
    let n = chart.target_dim;
    let n3 = n * n * n;
    let mut cache = GammaCache { chart, h: step, table: HashMap::new() };
    let gamma0 = cache.at(&vec![0; n])?.clone();

    let mut d1 = vec![0.0; n * n3];
    for m in 0..n {
        let v = cache.derivative(&[m])?;
        d1[m * n3..(m + 1) * n3].copy_from_slice(&v);
    }

    let mut d2 = vec![0.0; n * n * n3];
    for m in 0..n {
        for p in m..n {
            let v = cache.derivative(&[m, p])?;
            for (a, b) in [(m, p), (p, m)] {
                let base = (a * n + b) * n3;
                d2[base..base + n3].copy_from_slice(&v);
            }
        }
    }

    let mut d3 = vec![0.0; n * n * n * n3];
    for m in 0..n {
        for p in m..n {
            for q in p..n {
                let v = cache.derivative(&[m, p, q])?;
                for (a, b, c) in [(m, p, q), (m, q, p), (p, m, q), (p, q, m), (q, m, p), (q, p, m)] {
                    let base = ((a * n + b) * n + c) * n3;
                    d3[base..base + n3].copy_from_slice(&v);
                }
            }
        }
    }

    let riemann = riemann_spaceform(chart.curvature_sign, &MetricValue::identity(n));
    Ok(ChristoffelJet { chart: *chart, dim: n, step, gamma0, d1, d2, d3, riemann })
}

/// Riemann tensor `R_ijkl = <R(X_i, X_j) X_l, X_k>` at a point by finite
/// differences of the metric, where `R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]`.
/// With this index placement a spaceform satisfies `R_ijkl = kappa (g_ik g_jl - g_il g_jk)`.
pub fn riemann_fd(chart: &SpaceformChart, point: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = chart.target_dim;
    let n3 = n * n * n;
    let gam = christoffel_at(chart, point, h)?;
    let g = metric_at(chart, point)?;
    // dgam[m][k][i][j] = d_m Gamma^k_ij
    let mut dgam = vec![0.0; n * n3];
    let mut p = point.to_vec();
    for m in 0..n {
        p[m] = point[m] + h;
        let gp = christoffel_at(chart, &p, h)?;
        p[m] = point[m] - h;
        let gm = christoffel_at(chart, &p, h)?;
        p[m] = point[m];
        for idx in 0..n3 {
            dgam[m * n3 + idx] = (gp[idx] - gm[idx]) / (2.0 * h);
        }
    }
    let gi = |k: usize, i: usize, j: usize| gam[(k * n + i) * n + j];
    let dg = |m: usize, k: usize, i: usize, j: usize| dgam[m * n3 + (k * n + i) * n + j];
    // up[l][k][i][j] = R^l_{k i j}, R(X_i,X_j)X_k = R^l_{kij} X_l
    let mut out = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                for k in 0..n {
                    let mut s = 0.0;
                    for a in 0..n {
                        let mut up = dg(i, a, j, l) - dg(j, a, i, l);
                        for b in 0..n {
                            up += gi(a, i, b) * gi(b, j, l) - gi(a, j, b) * gi(b, i, l);
                        }
                        s += g.get(k, a) * up;
                    }
                    out[((i * n + j) * n + k) * n + l] = s;
                }
            }
        }
    }
    Ok(out)
}

/// Sign `s` with `d_m Gamma^i_{k1} = s R_{m1ki}` on the geodesic, determined
/// on the closed-form `H^2` chart.
pub fn calibrate_sign_convention() -> i32 {
    let jet = christoffel_jet(&SpaceformChart::hyperbolic(2), 1e-3).expect("H2 jet");
    let lhs = jet.dgamma(1, 1, 0, 0);
    let rhs = jet.riemann_at(1, 0, 0, 1);
    if lhs * rhs >= 0.0 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullStructureReport {
    pub chart: String,
    pub step: f64,
    pub tol: f64,
    pub gamma0_max: f64,
    pub metric_delta_max: f64,
    pub metric_derivative_max: f64,
    /// max over q = 1, 2, 3 of `|d_1^q Gamma|`
    pub weaknull_residual: f64,
    /// `[d2_{1m} Gamma^._{.1}, d2_{pm} Gamma^._{11}, d3_{1..} Gamma^._{11}]`
    pub weaknull2_residuals: [f64; 3],
    pub christoffder2_residual: f64,
    pub antisymmetry_residual: f64,
    pub sign_convention: i32,
    pub pass: bool,
}

/// Residuals of the on-geodesic identities for a spaceform jet.
pub fn verify_null_structure(jet: &ChristoffelJet, tol: f64) -> NullStructureReport {
    let n = jet.dim;
    let chart = &jet.chart;
    let h = jet.step;
    let sign = if chart.curvature_sign == 0 { 1 } else { calibrate_sign_convention() };

    let mut metric_delta_max = 0.0f64;
    let mut metric_derivative_max = 0.0f64;
    for &x1 in &[-0.7, 0.0, 0.3, 1.9] {
        let mut p = vec![0.0; n];
        p[0] = x1;
        if let Ok(g) = metric_at(chart, &p) {
            for i in 0..n {
                for j in 0..n {
                    let d = if i == j { 1.0 } else { 0.0 };
                    metric_delta_max = metric_delta_max.max((g.get(i, j) - d).abs());
                }
            }
        }
        for l in 0..n {
            let mut pp = p.clone();
            pp[l] += h;
            let mut pm = p.clone();
            pm[l] -= h;
            if let (Ok(gp), Ok(gm)) = (metric_at(chart, &pp), metric_at(chart, &pm)) {
                for (a, b) in gp.components.iter().zip(&gm.components) {
                    metric_derivative_max = metric_derivative_max.max(((a - b) / (2.0 * h)).abs());
                }
            }
        }
    }

    let gamma0_max = jet.gamma0.iter().fold(0.0f64, |a, v| a.max(v.abs()));

    let mut weaknull = 0.0f64;
    let mut w2 = [0.0f64; 3];
    let mut cd2 = 0.0f64;
    let mut anti = 0.0f64;
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                weaknull = weaknull
                    .max(jet.dgamma(0, k, i, j).abs())
                    .max(jet.d2gamma(0, 0, k, i, j).abs())
                    .max(jet.d3gamma(0, 0, 0, k, i, j).abs());
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for m in 1..n {
                w2[0] = w2[0].max(jet.d2gamma(0, m, a, b, 0).abs());
                for p in 1..n {
                    w2[1] = w2[1].max(jet.d2gamma(p, m, a, 0, 0).abs());
                }
            }
            for c in 0..n {
                w2[2] = w2[2].max(jet.d3gamma(0, b, c, a, 0, 0).abs());
            }
        }
    }
    for m in 0..n {
        anti = anti.max(jet.dgamma(m, 0, 0, 0).abs());
        for k in 0..n {
            for i in 0..n {
                let lhs = jet.dgamma(m, i, k, 0);
                let rhs = sign as f64 * jet.riemann_at(m, 0, k, i);
                cd2 = cd2.max((lhs - rhs).abs());
            }
        }
    }
    let all = [
        gamma0_max,
        metric_delta_max,
        metric_derivative_max,
        weaknull,
        w2[0],
        w2[1],
        w2[2],
        cd2,
        anti,
    ];
    NullStructureReport {
        chart: chart.label(),
        step: h,
        tol,
        gamma0_max,
        metric_delta_max,
        metric_derivative_max,
        weaknull_residual: weaknull,
        weaknull2_residuals: w2,
        christoffder2_residual: cd2,
        antisymmetry_residual: anti,
        sign_convention: sign,
        pass: all.iter().all(|r| *r <= tol),
    }
}

/// Coefficients of the truncated system read off from the jet.
///
/// Writing the equations as `box u^e - mass_e u^e = F^e`, the Taylor expansion of
/// `Gamma(u_perp)` gives `mass = -sigma d_2 Gamma^2_{11}` and
/// `quad_sign = -2 sigma d_2 Gamma^1_{21}`; cubic tables carry the Taylor factorials.
pub fn coupling_from_geometry(jet: &ChristoffelJet, case: Case) -> Result<CouplingCoefficients> {
    let n = jet.dim;
    let sigma = case.sigma() as f64;
    let kg_mass = -sigma * jet.dgamma(1, 1, 0, 0);
    if kg_mass <= 0.0 {
        return Err(Error::Config(format!(
            "Klein-Gordon mass not positive: {kg_mass:+.6} for {} with {} background",
            jet.chart.label(),
            case.name()
        )));
    }
    let quad_sign = -2.0 * sigma * jet.dgamma(1, 0, 1, 0);
    let nk = n - 1;
    let mut c = CouplingCoefficients::zeros(case, n);
    c.sigma = case.sigma();
    c.kg_mass = kg_mass;
    c.quad_sign = quad_sign;
    for e in 0..n {
        for m in 0..nk {
            for p in 0..nk {
                for q in 0..nk {
                    *c.uuu_mut(e, m, p, q) = -sigma * jet.d3gamma(m + 1, p + 1, q + 1, e, 0, 0) / 6.0;
                }
                for j in 0..n {
                    *c.uup_mut(e, m, p, j) = -sigma * jet.d2gamma(m + 1, p + 1, e, j, 0);
                }
            }
            for j in 0..n {
                for k in 0..n {
                    *c.null_mut(e, m, j, k) = -jet.dgamma(m + 1, e, j, k);
                }
            }
        }
    }
    Ok(c)
}
