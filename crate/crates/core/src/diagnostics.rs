//! Energies on hyperboloidal slices, the energy identity, estimate ratios,
//! pointwise bounds, decay fits and the bootstrap criteria.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foliation::{boost_derivative, boost_sums, radial_derivative, time_boost_profile, trapezoid, SliceField};
use crate::pde::{add_cubic, add_quadratic, Case, CouplingCoefficients};
use crate::solver::{Evolution, RunConfig, SeriesSample};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub tau: f64,
    pub e_wave: f64,
    pub e_kg: Vec<f64>,
    /// `sqrt(E_wave^2 + sum E_kg^2)`
    pub e_total: f64,
    /// Total energies of order 0, 1, 2.
    pub frak_e: [f64; 3],
    /// `sup |u_perp| w^{3/2}`
    pub sup_kg_w32: f64,
    /// `sup (|L u| + tau |d_t u|) w^{1/2}`
    pub sup_lu_w12: f64,
}

struct SliceIntegrals<'a> {
    field: &'a SliceField,
    /// `u_sums[e][k][j]`, `k <= 3`
    u_sums: Vec<Vec<Vec<f64>>>,
    /// `g_sums[e][k][j]`, `k <= 2`
    g_sums: Vec<Vec<Vec<f64>>>,
}

impl<'a> SliceIntegrals<'a> {
    fn new(field: &'a SliceField, u_order: usize, g_order: usize) -> Self {
        let (tau, dr) = (field.tau, field.dr);
        let u_sums = field.u.iter().map(|f| boost_sums(tau, dr, f, u_order)).collect();
        let g_sums = field.ut.iter().map(|g| boost_sums(tau, dr, g, g_order)).collect();
        Self { field, u_sums, g_sums }
    }

    /// `int w^alpha sum_{e in comps} sum_{|beta|=k} |L^beta h_e|^2 dvol`
    fn integral(&self, comps: std::ops::Range<usize>, k: usize, alpha: f64, dt: bool) -> f64 {
        let f = self.field;
        let tau = f.tau;
        let sums = if dt { &self.g_sums } else { &self.u_sums };
        let y: Vec<f64> = (0..f.len())
            .map(|j| {
                let s: f64 = comps.clone().map(|e| sums[e][k][j]).sum();
                let (r, w) = (f.r(j), f.w(j));
                4.0 * PI * (tau / w) * r * r * w.powf(alpha) * s
            })
            .collect();
        trapezoid(f.dr, &y)
    }
}

pub fn energies(slice: &SliceField) -> EnergyReport {
    let n = slice.n();
    let tau = slice.tau;
    let ints = SliceIntegrals::new(slice, 3, 2);
    let one = |e: usize| -> f64 {
        let r = e..e + 1;
        let mut s = ints.integral(r.clone(), 1, -1.0, false) / tau + tau * ints.integral(r.clone(), 0, -1.0, true);
        if e > 0 {
            s += ints.integral(r, 0, 1.0, false) / tau;
        }
        s
    };
    let e_wave_sq = one(0);
    let e_kg_sq: Vec<f64> = (1..n).map(one).collect();
    let e_total = (e_wave_sq + e_kg_sq.iter().sum::<f64>()).sqrt();

    let mut frak = [0.0; 3];
    let mut acc_u = ints.integral(0..n, 0, -1.0, false);
    let mut acc_g = 0.0;
    let mut acc_kg = 0.0;
    for (k, fe) in frak.iter_mut().enumerate() {
        acc_u += ints.integral(0..n, k + 1, -1.0, false);
        acc_g += ints.integral(0..n, k, -1.0, true);
        acc_kg += ints.integral(1..n, k, 1.0, false);
        *fe = (acc_u / tau + tau * acc_g + acc_kg / tau).sqrt();
    }

    let mut sup_kg = 0.0f64;
    let mut sup_l = 0.0f64;
    for j in 0..slice.len() {
        let w = slice.w(j);
        let kg: f64 = (1..n).map(|e| slice.u[e][j].powi(2)).sum::<f64>().sqrt();
        sup_kg = sup_kg.max(kg * w.powf(1.5));
        let lu: f64 = (0..n).map(|e| ints.u_sums[e][1][j]).sum::<f64>().sqrt();
        let dtu: f64 = (0..n).map(|e| slice.ut[e][j].powi(2)).sum::<f64>().sqrt();
        sup_l = sup_l.max((lu + tau * dtu) * w.sqrt());
    }

    EnergyReport {
        tau,
        e_wave: e_wave_sq.sqrt(),
        e_kg: e_kg_sq.iter().map(|x| x.sqrt()).collect(),
        e_total,
        frak_e: frak,
        sup_kg_w32: sup_kg,
        sup_lu_w12: sup_l,
    }
}

/// `|E(tau1)^2 - E(tau0)^2 - flux| / E(tau0)^2`, where `flux` is the energy
/// supplied by the nonlinearity between the two slices.
pub fn energy_identity_residual(e0: f64, e1: f64, flux: f64) -> f64 {
    let d = e0 * e0;
    let num = (e1 * e1 - e0 * e0 - flux).abs();
    if d == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        num / d
    }
}

/// Energy supplied between the slices with accumulated source integrals `phi0`
/// and `phi1` (`int int sum_e F^e d_t u^e`); `box u - m u = F` gives `-2 (phi1 - phi0)`.
pub fn flux_between(phi0: f64, phi1: f64) -> f64 {
    -2.0 * (phi1 - phi0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Nonlinearity {
    Quad,
    Cubic,
}

/// Quadratic or cubic part of `F^e` on the slice, per component.
pub fn slice_nonlinearity(slice: &SliceField, c: &CouplingCoefficients, which: Nonlinearity) -> Vec<Vec<f64>> {
    let n = slice.n();
    let len = slice.len();
    let du: Vec<Vec<f64>> = slice.u.iter().map(|f| radial_derivative(slice.dr, f)).collect();
    let mut out = vec![vec![0.0; len]; n];
    let mut uu = vec![0.0; n];
    let mut dl = vec![0.0; n];
    let mut ur = vec![0.0; n];
    let mut g = vec![0.0; n];
    let mut mjk = vec![0.0; n * n];
    let mut f = vec![0.0; n];
    for j in 0..len {
        let (r, w) = (slice.r(j), slice.w(j));
        for e in 0..n {
            uu[e] = slice.u[e][j];
            g[e] = slice.ut[e][j];
            ur[e] = du[e][j] - (r / w) * g[e];
            dl[e] = match c.case {
                Case::Timelike => g[e],
                Case::Spacelike => ur[e],
            };
        }
        f.fill(0.0);
        match which {
            Nonlinearity::Quad => add_quadratic(c, &uu, &dl, &mut f),
            Nonlinearity::Cubic => {
                for a in 0..n {
                    for b in 0..n {
                        mjk[a * n + b] = -g[a] * g[b] + ur[a] * ur[b];
                    }
                }
                add_cubic(c, &uu, &dl, &mjk, &mut f);
            }
        }
        for e in 0..n {
            out[e][j] = f[e];
        }
    }
    out
}

/// `int | sum_{|alpha|=m} sum_e L^alpha F^e d_t L^alpha u^e | dvol` for the selected part of `F`.
pub fn estimate_lhs(slice: &SliceField, c: &CouplingCoefficients, which: Nonlinearity, m: usize) -> Result<f64> {
    if m > 2 {
        return Err(Error::Domain(format!("estimate order m = {m} must be 0, 1 or 2")));
    }
    let (tau, dr) = (slice.tau, slice.dr);
    let n = slice.n();
    let len = slice.len();
    let f = slice_nonlinearity(slice, c, which);
    let mut dens = vec![0.0; len];
    for e in 0..n {
        match m {
            0 => {
                for j in 0..len {
                    dens[j] += f[e][j] * slice.ut[e][j];
                }
            }
            _ => {
                let a = boost_derivative(tau, dr, &f[e]);
                let p = time_boost_profile(tau, dr, &slice.u[e], &slice.ut[e]);
                if m == 1 {
                    for j in 0..len {
                        dens[j] += slice.r(j).powi(2) * a[j] * p.e[j];
                    }
                } else {
                    let b = boost_derivative(tau, dr, &a);
                    for j in 0..len {
                        let (r2, t) = (slice.r(j).powi(2), slice.w(j));
                        dens[j] += 3.0 * t * a[j] * p.p2[j]
                            + r2 * (t * a[j] * p.q2[j] + b[j] * p.p2[j])
                            + r2 * r2 * b[j] * p.q2[j];
                    }
                }
            }
        }
    }
    let y: Vec<f64> = (0..len)
        .map(|j| {
            let (r, w) = (slice.r(j), slice.w(j));
            4.0 * PI * (tau / w) * r * r * dens[j].abs()
        })
        .collect();
    Ok(trapezoid(dr, &y))
}

/// Right side of the energy estimate for the selected nonlinearity at order `m`.
pub fn estimate_rhs(case: Case, which: Nonlinearity, m: usize, tau: f64, e: [f64; 3]) -> f64 {
    let [e0, e1, e2] = e;
    let em = e[m.min(2)];
    let p = |x: f64| tau.powf(x);
    let tl_cubic = || match m {
        0 | 1 => p(-3.0) * em * em * e2 * e2,
        _ => {
            p(-3.0) * e2.powi(4)
                + p(-2.0) * e0.powf(0.25) * e1 * e2.powf(2.75)
                + p(-1.5) * e1 * e1 * e2 * e2
                + p(-2.5) * e1 * e2.powi(3)
        }
    };
    match (case, which) {
        (Case::Timelike, Nonlinearity::Quad) => match m {
            0 => p(-1.5) * e2 * e0 * e0,
            1 => p(-1.5) * e1 * e1 * e2,
            _ => p(-1.5) * e2.powi(3) + p(-1.0) * e1 * e2 * e2 + p(-1.0) * e1 * e1 * e2,
        },
        (Case::Timelike, Nonlinearity::Cubic) => tl_cubic(),
        (Case::Spacelike, Nonlinearity::Quad) => match m {
            0 | 1 => p(-1.5) * e2 * em * em,
            _ => p(-1.0) * e1 * e2 * e2 + p(-1.5) * e2.powi(3),
        },
        (Case::Spacelike, Nonlinearity::Cubic) => {
            let c1 = match m {
                0 | 1 => p(-3.0) * e2 * e2 * em * em,
                _ => p(-2.0) * e2.powi(3) * e1 + p(-3.0) * e2.powi(4),
            };
            c1 + tl_cubic()
        }
    }
}

/// LHS / RHS of the energy estimate on one slice.
pub fn estimate_check(slice: &SliceField, c: &CouplingCoefficients, which: Nonlinearity, m: usize) -> Result<f64> {
    let rep = energies(slice);
    estimate_check_with(slice, &rep, c, which, m)
}

pub fn estimate_check_with(
    slice: &SliceField,
    rep: &EnergyReport,
    c: &CouplingCoefficients,
    which: Nonlinearity,
    m: usize,
) -> Result<f64> {
    let rhs = estimate_rhs(c.case, which, m, slice.tau, rep.frak_e);
    if !(rhs > 0.0) {
        return Err(Error::UndefinedRatio(format!("estimate right-hand side is {rhs} at tau = {}", slice.tau)));
    }
    Ok(estimate_lhs(slice, c, which, m)? / rhs)
}

/// `[sup |u_perp| w^{3/2} / E_2, sup (|Lu| + tau |d_t u|) w^{1/2} / E_2]`
pub fn pointwise_check(report: &EnergyReport) -> Result<[f64; 2]> {
    let e2 = report.frak_e[2];
    if !(e2 > 0.0) {
        return Err(Error::UndefinedRatio(format!("zero energy at tau = {}", report.tau)));
    }
    Ok([report.sup_kg_w32 / e2, report.sup_lu_w12 / e2])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub series: Vec<(f64, f64)>,
    pub exponent: f64,
    pub prefactor: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
}

/// Least-squares power law `y = C x^p` in log-log coordinates.
pub fn decay_fit(series: &[(f64, f64)]) -> Result<DecayFit> {
    if series.len() < 5 {
        return Err(Error::Domain(format!("decay fit needs at least 5 points, got {}", series.len())));
    }
    if let Some(&(x, y)) = series.iter().find(|(x, y)| !(*x > 0.0) || !(*y > 0.0)) {
        return Err(Error::Domain(format!("decay fit needs positive data, got ({x}, {y})")));
    }
    let pts: Vec<(f64, f64)> = series.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("decay fit needs distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let res = (pts.iter().map(|p| (p.1 - icpt - slope * p.0).powi(2)).sum::<f64>() / k).sqrt();
    Ok(DecayFit { series: series.to_vec(), exponent: slope, prefactor: icpt.exp(), residual: res })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapParams {
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapReport {
    pub pass: bool,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    /// `(tau, energy order)` of the first violated bound.
    pub first_violation: Option<(f64, usize)>,
    pub e2_growth_exponent: Option<f64>,
}

/// `E_0 <= delta`, `E_1 <= delta`, `E_2 <= delta tau^gamma` for every recorded `tau`.
pub fn bootstrap_check(taus: &[f64], frak: &[[f64; 3]], params: BootstrapParams) -> BootstrapReport {
    let mut first_violation = None;
    for (&tau, e) in taus.iter().zip(frak) {
        let bounds = [params.delta, params.delta, params.delta * tau.powf(params.gamma)];
        if let Some(k) = (0..3).find(|&k| !(e[k] <= bounds[k])) {
            first_violation = Some((tau, k));
            break;
        }
    }
    let pts: Vec<(f64, f64)> = taus.iter().zip(frak).map(|(t, e)| (*t, e[2])).collect();
    BootstrapReport {
        pass: first_violation.is_none(),
        gamma: params.gamma,
        delta: params.delta,
        epsilon: params.epsilon,
        first_violation,
        e2_growth_exponent: decay_fit(&pts).ok().map(|f| f.exponent),
    }
}

/// Per-slice record of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceReport {
    #[serde(flatten)]
    pub energy: EnergyReport,
    pub pointwise: Option<[f64; 2]>,
    /// Estimate ratios for `m = 0, 1, 2`.
    pub quad: [Option<f64>; 3],
    pub cubic: [Option<f64>; 3],
    /// Accumulated nonlinear source below this slice.
    pub source_integral: f64,
    /// Energy identity residual relative to the first slice.
    pub identity_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFits {
    /// `sup_{r <= v t} |u_perp|` against `t`
    pub kg_sup: Option<DecayFit>,
    /// `sup_{r <= v t} |d_t u_perp|` against `t`
    pub dt_kg_sup: Option<DecayFit>,
    /// `t^{1/2} sup_r |L u^1|` against `t`
    pub l_wave_scaled: Option<DecayFit>,
    /// `sup_r |u_perp|` over the whole grid
    pub kg_sup_global: Option<DecayFit>,
    pub dt_kg_sup_global: Option<DecayFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config_hash: String,
    pub case: Case,
    pub epsilon: f64,
    pub dr: f64,
    pub tau: Vec<f64>,
    #[serde(rename = "E0")]
    pub e0: Vec<f64>,
    #[serde(rename = "E1")]
    pub e1: Vec<f64>,
    #[serde(rename = "E2")]
    pub e2: Vec<f64>,
    pub slices: Vec<SliceReport>,
    pub decay_fits: DecayFits,
    pub bootstrap: BootstrapReport,
    /// `max E_0 / E_0(first slice)`
    pub e0_growth: Option<f64>,
    pub max_identity_residual: Option<f64>,
    /// Log-log trend slopes of the estimate ratios against `tau`.
    pub quad_trend: [Option<f64>; 3],
    pub cubic_trend: [Option<f64>; 3],
    pub pointwise_trend: [Option<f64>; 2],
    pub blowup: Option<f64>,
    pub missing_slices: Vec<f64>,
}

impl RunReport {
    /// Checks enabled for a single run: no blow-up, every slice completed,
    /// bootstrap bounds satisfied.
    pub fn passed(&self) -> bool {
        self.blowup.is_none() && self.missing_slices.is_empty() && self.bootstrap.pass
    }
}

fn trend<I: Iterator<Item = Option<f64>>>(taus: &[f64], values: I) -> Option<f64> {
    let pts: Option<Vec<(f64, f64)>> = taus.iter().zip(values).map(|(t, v)| v.map(|v| (*t, v))).collect();
    decay_fit(&pts?).ok().map(|f| f.exponent)
}

fn fit_window(series: &[SeriesSample], window: [f64; 2], f: impl Fn(&SeriesSample) -> f64) -> Option<DecayFit> {
    let pts: Vec<(f64, f64)> =
        series.iter().filter(|s| s.t >= window[0] - 1e-9 && s.t <= window[1] + 1e-9).map(|s| (s.t, f(s))).collect();
    decay_fit(&pts).ok()
}

/// Diagnostics for every completed slice and the run-level fits.
pub fn analyze(ev: &Evolution, config: &RunConfig) -> RunReport {
    let c = &ev.coeffs;
    let mut slices = Vec::new();
    let mut missing = Vec::new();
    let mut first: Option<(f64, f64)> = None;
    for (k, s) in ev.slices.iter().enumerate() {
        let Some(s) = s else {
            missing.push(ev.taus[k]);
            continue;
        };
        let energy = energies(s);
        let pointwise = pointwise_check(&energy).ok();
        let mut quad = [None; 3];
        let mut cubic = [None; 3];
        if config.estimates {
            for m in 0..3 {
                quad[m] = estimate_check_with(s, &energy, c, Nonlinearity::Quad, m).ok();
                cubic[m] = estimate_check_with(s, &energy, c, Nonlinearity::Cubic, m).ok();
            }
        }
        let phi = ev.flux[k];
        let identity_residual = match first {
            None => {
                first = Some((energy.e_total, phi));
                None
            }
            Some((e0, phi0)) => Some(energy_identity_residual(e0, energy.e_total, flux_between(phi0, phi))),
        };
        slices.push(SliceReport { energy, pointwise, quad, cubic, source_integral: phi, identity_residual });
    }
    let tau: Vec<f64> = slices.iter().map(|s| s.energy.tau).collect();
    let frak: Vec<[f64; 3]> = slices.iter().map(|s| s.energy.frak_e).collect();
    let delta = frak.first().map(|e| 4.0 * e[2]).unwrap_or(0.0);
    let bootstrap = bootstrap_check(&tau, &frak, BootstrapParams { gamma: config.gamma, delta, epsilon: config.epsilon });
    let e0_growth = frak.first().filter(|e| e[0] > 0.0).map(|e| frak.iter().map(|f| f[0]).fold(0.0, f64::max) / e[0]);
    let max_identity_residual = slices.iter().filter_map(|s| s.identity_residual).reduce(f64::max);
    let w = config.decay_window;
    let decay_fits = DecayFits {
        kg_sup: fit_window(&ev.series, w, |s| s.sup_kg_cone),
        dt_kg_sup: fit_window(&ev.series, w, |s| s.sup_dt_kg_cone),
        l_wave_scaled: fit_window(&ev.series, w, |s| s.t.sqrt() * s.sup_l_wave),
        kg_sup_global: fit_window(&ev.series, w, |s| s.sup_kg),
        dt_kg_sup_global: fit_window(&ev.series, w, |s| s.sup_dt_kg),
    };
    let quad_trend = [0, 1, 2].map(|m| trend(&tau, slices.iter().map(|s| s.quad[m])));
    let cubic_trend = [0, 1, 2].map(|m| trend(&tau, slices.iter().map(|s| s.cubic[m])));
    let pointwise_trend = [0, 1].map(|i| trend(&tau, slices.iter().map(|s| s.pointwise.map(|p| p[i]))));
    RunReport {
        config_hash: config.hash(),
        case: config.case,
        epsilon: config.epsilon,
        dr: config.dr,
        e0: frak.iter().map(|e| e[0]).collect(),
        e1: frak.iter().map(|e| e[1]).collect(),
        e2: frak.iter().map(|e| e[2]).collect(),
        tau,
        slices,
        decay_fits,
        bootstrap,
        e0_growth,
        max_identity_residual,
        quad_trend,
        cubic_trend,
        pointwise_trend,
        blowup: ev.blowup,
        missing_slices: missing,
    }
}

/// Runs and analyzes one configuration.
pub fn evolve(config: &RunConfig) -> Result<(Evolution, RunReport)> {
    let ev = crate::solver::run(config)?;
    let rep = analyze(&ev, config);
    Ok((ev, rep))
}

/// Twenty profiles concentrating at the origin of `Sigma_tau`: Gaussians
/// `exp(-(r/a)^2)` and compact bumps `(1 - (r/a)^2)^4`, widths `a` from 1 down to 0.1.
pub fn inequality_family(tau: f64) -> Vec<SliceField> {
    let (dr, len) = (0.0025, 1601);
    (0..20)
        .map(|k| {
            let a = 10f64.powf(-((k % 10) as f64) / 9.0);
            if k < 10 {
                SliceField::from_fn(tau, dr, len, 1, move |_, _, r| (-(r / a).powi(2)).exp(), |_, _, _| 0.0)
            } else {
                SliceField::from_fn(tau, dr, len, 1, move |_, _, r| crate::solver::bump(r / a, 1.0), |_, _, _| 0.0)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityRow {
    pub tau: f64,
    pub kind: String,
    pub r_exp: Option<f64>,
    pub min: f64,
    pub max: f64,
    pub spread: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub rows: Vec<InequalityRow>,
    pub hardy_bound: f64,
    pub spread_bound: f64,
    pub pass: bool,
}

/// Ratios of every inequality over the test family. Hardy rows pass when the
/// maximum is at most `hardy_bound`, the others when `max / min <= spread_bound`.
pub fn inequality_suite(taus: &[f64], hardy_bound: f64, spread_bound: f64) -> Result<InequalityReport> {
    use crate::foliation::{sobolev_ratio, SobolevKind};
    let mut kinds: Vec<(SobolevKind, Option<f64>, String)> = vec![
        (SobolevKind::Hardy, None, "hardy".into()),
        (SobolevKind::Morrey { l: -1.0 }, None, "morrey_l=-1".into()),
        (SobolevKind::Morrey { l: 1.0 }, None, "morrey_l=1".into()),
    ];
    for r in [2.0, 3.0, 4.0, 6.0] {
        kinds.push((SobolevKind::GnsWave { k: 0 }, Some(r), "gns_wave".into()));
        kinds.push((SobolevKind::GnsKg { k: 0 }, Some(r), "gns_kg".into()));
    }
    let mut rows = Vec::new();
    for &tau in taus {
        let family = inequality_family(tau);
        for (kind, r_exp, name) in &kinds {
            let ratios = family
                .iter()
                .map(|f| sobolev_ratio(f, *kind, r_exp.unwrap_or(2.0)))
                .collect::<Result<Vec<f64>>>()?;
            let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
            let max = ratios.iter().copied().fold(0.0, f64::max);
            let spread = max / min;
            let pass = if matches!(kind, SobolevKind::Hardy) { max <= hardy_bound } else { spread <= spread_bound };
            rows.push(InequalityRow { tau, kind: name.clone(), r_exp: *r_exp, min, max, spread, pass });
        }
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(InequalityReport { rows, hardy_bound, spread_bound, pass })
}
