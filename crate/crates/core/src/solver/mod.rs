//! Method-of-lines evolution of the truncated system in radial symmetry,
//! starting from compactly supported data at `t_start`, with hyperboloidal
//! slices interpolated on the fly.
//!
//! The spacelike system singles out the `x1` direction; in radial symmetry the
//! derivative `d_{x1}` in its nonlinearity is replaced by `d_r`.

pub mod cartesian;
mod config;

use std::collections::VecDeque;

pub use config::{Preset, Profile, RunConfig};

use crate::error::{Error, Result};
use crate::foliation::SliceField;
use crate::pde::{add_cubic, add_quadratic, Case, CouplingCoefficients};

/// All components `u[e]` and `v[e] = d_t u[e]` on `r_j = j dr`, `j = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFieldState {
    pub t: f64,
    pub dr: f64,
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
}

impl RadialFieldState {
    pub fn zeros(t: f64, dr: f64, n: usize, points: usize) -> Self {
        Self { t, dr, u: vec![vec![0.0; points]; n], v: vec![vec![0.0; points]; n] }
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn points(&self) -> usize {
        self.u.first().map(Vec::len).unwrap_or(0)
    }

    pub fn max_abs(&self) -> f64 {
        self.u.iter().chain(&self.v).flatten().fold(0.0f64, |a, x| a.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.v).flatten().all(|x| x.is_finite())
    }

    /// `int 4 pi r^2 (v^2 + u_r^2)/2 dr` of one component on the constant-`t` slice.
    pub fn flat_energy(&self, e: usize, mass: f64) -> f64 {
        let n = self.points();
        let dr = self.dr;
        let u = &self.u[e];
        let v = &self.v[e];
        let y: Vec<f64> = (0..n)
            .map(|j| {
                let up = if j + 1 < n { u[j + 1] } else { 0.0 };
                let um = if j == 0 { u[1.min(n - 1)] } else { u[j - 1] };
                let ur = (up - um) / (2.0 * dr);
                let r = j as f64 * dr;
                2.0 * std::f64::consts::PI * r * r * (v[j] * v[j] + ur * ur + mass * u[j] * u[j])
            })
            .collect();
        crate::foliation::trapezoid(dr, &y)
    }
}

/// Smooth bump `(1 - (r/R)^2)^4` on `r < R`.
pub fn bump(r: f64, radius: f64) -> f64 {
    if r >= radius {
        0.0
    } else {
        let s = 1.0 - (r / radius).powi(2);
        s * s * s * s
    }
}

pub fn init_data(config: &RunConfig) -> Result<RadialFieldState> {
    config.validate()?;
    let n = config.target_dim;
    let points = config.grid_points();
    let mut s = RadialFieldState::zeros(config.t_start, config.dr, n, points);
    let eps = config.epsilon;
    for j in 0..points {
        let b = bump(j as f64 * config.dr, config.support_radius);
        if b == 0.0 {
            continue;
        }
        for e in 0..n {
            s.u[e][j] = eps * b;
            s.v[e][j] = config.profile.velocity(e, eps * b);
        }
    }
    Ok(s)
}

/// Linear masses per component: wave first, then the Klein-Gordon mass.
fn masses(c: &CouplingCoefficients) -> Vec<f64> {
    (0..c.n).map(|e| if e == 0 { 0.0 } else { c.kg_mass }).collect()
}

const MAXN: usize = 5;

/// Time derivative of `(u, v)` on points `0..=last`; also the nonlinear source
/// density `sum_e F^e v^e` in `source` when requested.
fn operator_window(
    c: &CouplingCoefficients,
    mass: &[f64],
    dr: f64,
    u: &[Vec<f64>],
    v: &[Vec<f64>],
    lo: usize,
    last: usize,
    du: &mut [Vec<f64>],
    dv: &mut [Vec<f64>],
    mut source: Option<&mut [f64]>,
) {
    let n = c.n;
    let points = u[0].len();
    let nonlinear = c.quad_sign != 0.0 || c.has_cubic();
    let cubic = c.has_cubic();
    let spacelike = c.case == Case::Spacelike;
    let inv_dr2 = 1.0 / (dr * dr);
    let inv_2dr = 0.5 / dr;
    let mut uu = [0.0; MAXN];
    let mut vv = [0.0; MAXN];
    let mut ur = [0.0; MAXN];
    let mut lap = [0.0; MAXN];
    let mut f = [0.0; MAXN];
    let mut mjk = [0.0; MAXN * MAXN];
    for j in lo..=last {
        let boundary = j + 1 == points;
        for e in 0..n {
            let ue = &u[e];
            let u0 = ue[j];
            let up = if j + 1 < points { ue[j + 1] } else { 0.0 };
            let um = if j == 0 { up } else { ue[j - 1] };
            uu[e] = u0;
            vv[e] = v[e][j];
            ur[e] = (up - um) * inv_2dr;
            lap[e] = if j == 0 {
                6.0 * (up - u0) * inv_dr2
            } else {
                (up - 2.0 * u0 + um) * inv_dr2 + (up - um) * inv_dr2 / j as f64
            };
        }
        f[..n].fill(0.0);
        if nonlinear {
            let dl = if spacelike { &ur } else { &vv };
            add_quadratic(c, &uu[..n], &dl[..n], &mut f[..n]);
            if cubic {
                for a in 0..n {
                    for b in 0..n {
                        mjk[a * n + b] = -vv[a] * vv[b] + ur[a] * ur[b];
                    }
                }
                add_cubic(c, &uu[..n], &dl[..n], &mjk[..n * n], &mut f[..n]);
            }
        }
        if let Some(src) = source.as_deref_mut() {
            src[j] = (0..n).map(|e| f[e] * vv[e]).sum();
        }
        for e in 0..n {
            if boundary {
                du[e][j] = 0.0;
                dv[e][j] = 0.0;
            } else {
                du[e][j] = vv[e];
                dv[e][j] = lap[e] - mass[e] * uu[e] - f[e];
            }
        }
    }
}

/// Time derivative of the state on the full grid: `(v, Lap u - mass u - F)`,
/// with homogeneous Dirichlet data at the last grid point.
pub fn spatial_operator(state: &RadialFieldState, c: &CouplingCoefficients) -> RadialFieldState {
    let mut out = RadialFieldState::zeros(state.t, state.dr, state.n(), state.points());
    let (mut du, mut dv) = (std::mem::take(&mut out.u), std::mem::take(&mut out.v));
    operator_window(c, &masses(c), state.dr, &state.u, &state.v, 0, state.points() - 1, &mut du, &mut dv, None);
    out.u = du;
    out.v = dv;
    out
}

/// Scratch space for windowed RK4 steps.
struct Stepper {
    coeffs: CouplingCoefficients,
    mass: Vec<f64>,
    dr: f64,
    ku: Vec<Vec<f64>>,
    kv: Vec<Vec<f64>>,
    su: Vec<Vec<f64>>,
    sv: Vec<Vec<f64>>,
    source: Vec<f64>,
}

impl Stepper {
    fn new(coeffs: &CouplingCoefficients, dr: f64, n: usize, points: usize) -> Self {
        let z = || vec![vec![0.0; points]; n];
        Self {
            coeffs: coeffs.clone(),
            mass: masses(coeffs),
            dr,
            ku: z(),
            kv: z(),
            su: z(),
            sv: z(),
            source: vec![0.0; points],
        }
    }

    /// Advances `(u, v)` from `src` into `dst` on points `lo..=last`. Fills
    /// `self.source` with the nonlinear source density at the initial level.
    fn step(&mut self, src: &RadialFieldState, dst: &mut RadialFieldState, dt: f64, lo: usize, last: usize) {
        let n = src.n();
        let w = [dt / 6.0, dt / 3.0, dt / 3.0, dt / 6.0];
        let c = [0.5 * dt, 0.5 * dt, dt];
        let frozen = lo.saturating_sub(FROZEN_COPY);
        for e in 0..n {
            dst.u[e][frozen..=last].copy_from_slice(&src.u[e][frozen..=last]);
            dst.v[e][frozen..=last].copy_from_slice(&src.v[e][frozen..=last]);
            if lo > 0 {
                self.su[e][lo - 1] = src.u[e][lo - 1];
                self.sv[e][lo - 1] = src.v[e][lo - 1];
            }
        }
        for stage in 0..4 {
            {
                let (u, v) = if stage == 0 { (&src.u, &src.v) } else { (&self.su, &self.sv) };
                let source = if stage == 0 { Some(&mut self.source[..]) } else { None };
                operator_window(&self.coeffs, &self.mass, self.dr, u, v, lo, last, &mut self.ku, &mut self.kv, source);
            }
            for e in 0..n {
                for j in lo..=last {
                    dst.u[e][j] += w[stage] * self.ku[e][j];
                    dst.v[e][j] += w[stage] * self.kv[e][j];
                }
                if stage < 3 {
                    for j in lo..=last {
                        self.su[e][j] = src.u[e][j] + c[stage] * self.ku[e][j];
                        self.sv[e][j] = src.v[e][j] + c[stage] * self.kv[e][j];
                    }
                }
            }
        }
        dst.t = src.t + dt;
    }
}

/// One classical RK4 step on the full grid.
pub fn step_rk4(state: &RadialFieldState, dt: f64, c: &CouplingCoefficients) -> Result<RadialFieldState> {
    let mut st = Stepper::new(c, state.dr, state.n(), state.points());
    let mut out = state.clone();
    st.step(state, &mut out, dt, 0, state.points() - 1);
    if !out.is_finite() {
        return Err(Error::BlowUp { t: out.t });
    }
    Ok(out)
}

/// Cubic Lagrange weights on nodes 0, 1, 2, 3 at position `s`.
fn lagrange4(s: f64) -> [f64; 4] {
    [
        -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0,
        s * (s - 2.0) * (s - 3.0) / 2.0,
        -s * (s - 1.0) * (s - 3.0) / 2.0,
        s * (s - 1.0) * (s - 2.0) / 6.0,
    ]
}

/// Uniformly spaced time levels.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub t0: f64,
    pub dt: f64,
    /// Index of the first stored level.
    pub first: usize,
    pub levels: VecDeque<RadialFieldState>,
    pub capacity: Option<usize>,
}

impl Trajectory {
    pub fn new(initial: RadialFieldState, dt: f64, capacity: Option<usize>) -> Self {
        let t0 = initial.t;
        let mut levels = VecDeque::new();
        levels.push_back(initial);
        Self { t0, dt, first: 0, levels, capacity }
    }

    pub fn time(&self, level: usize) -> f64 {
        self.t0 + level as f64 * self.dt
    }

    pub fn push(&mut self, mut state: RadialFieldState) {
        let next = self.first + self.levels.len();
        state.t = self.time(next);
        self.levels.push_back(state);
        if let Some(cap) = self.capacity {
            while self.levels.len() > cap.max(4) {
                self.levels.pop_front();
                self.first += 1;
            }
        }
    }

    pub fn last_level(&self) -> usize {
        self.first + self.levels.len() - 1
    }

    fn window_for(&self, t: f64) -> Option<usize> {
        let last = self.last_level();
        if self.levels.len() < 4 {
            return None;
        }
        let k = ((t - self.t0) / self.dt).floor() as isize;
        let base = (k - 1).clamp(self.first as isize, last as isize - 3) as usize;
        let lo = self.time(base) - 1e-9 * self.dt;
        let hi = self.time(base + 3) + 1e-9 * self.dt;
        if t < lo || t > hi {
            None
        } else {
            Some(base)
        }
    }

    /// Slice `Sigma_tau` on grid indices `0..len`, cubic in time.
    pub fn extract_slice(&self, tau: f64, len: usize) -> Result<SliceField> {
        let proto = &self.levels[0];
        let dr = proto.dr;
        let len = len.min(proto.points());
        let n = proto.n();
        let mut s = SliceField::zeros(tau, dr, n, len);
        for j in 0..len {
            let t = tau.hypot(j as f64 * dr);
            let base = self.window_for(t).ok_or_else(|| {
                Error::Range(format!(
                    "slice tau = {tau} needs history over t in [{tau}, {:.6}], stored levels cover [{:.6}, {:.6}]",
                    tau.hypot((len - 1) as f64 * dr),
                    self.time(self.first),
                    self.time(self.last_level())
                ))
            })?;
            let wts = lagrange4((t - self.time(base)) / self.dt);
            for e in 0..n {
                let (mut a, mut b) = (0.0, 0.0);
                for (q, wq) in wts.iter().enumerate() {
                    let lv = &self.levels[base - self.first + q];
                    a += wq * lv.u[e][j];
                    b += wq * lv.v[e][j];
                }
                s.u[e][j] = a;
                s.ut[e][j] = b;
            }
        }
        Ok(s)
    }
}

/// Largest radius on `Sigma_tau` reached by data supported in `r <= radius` at `t_start`.
pub fn slice_support(tau: f64, t_start: f64, radius: f64) -> f64 {
    let s = t_start - radius;
    (0.5 * (tau * tau / s - s)).max(0.0)
}

/// Grid length used for the slice `tau`.
pub fn slice_len(config: &RunConfig, tau: f64) -> usize {
    let last = (slice_support(tau, config.t_start, config.support_radius) / config.dr).ceil() as usize + SLICE_MARGIN;
    (last + 1).min(config.grid_points())
}

const SLICE_MARGIN: usize = 8;
const WINDOW_MARGIN: usize = 32;
/// Cells kept active inside the innermost hyperboloid once the interior is frozen.
const INTERIOR_MARGIN: usize = 64;
const FROZEN_COPY: usize = 4;

/// Distance kept ahead of the light-cone front: a fixed number of cells plus
/// 24 widths of the dispersive front tail `(dr^2 t / 8)^{1/3}`.
pub fn front_margin(dr: f64, elapsed: f64) -> f64 {
    WINDOW_MARGIN as f64 * dr + 24.0 * (dr * dr * elapsed.max(0.0) / 8.0).cbrt()
}

/// Latest time needed to interpolate the slice `tau`.
pub fn slice_end_time(config: &RunConfig, tau: f64) -> f64 {
    let len = slice_len(config, tau);
    tau.hypot((len - 1) as f64 * config.dr)
}

struct SliceSampler {
    field: SliceField,
    next: usize,
}

/// Samples recorded on constant-`t` levels.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SeriesSample {
    pub t: f64,
    /// `sup_r |u_perp|`
    pub sup_kg: f64,
    /// `sup_r |d_t u_perp|`
    pub sup_dt_kg: f64,
    /// `sup_r |L u^1| = sup_r |r u_t + t u_r|`
    pub sup_l_wave: f64,
    /// `sup_r |u^1|`
    pub sup_wave: f64,
    /// `sup_{r <= v t} |u_perp|` for the configured ray speed `v`
    pub sup_kg_cone: f64,
    /// `sup_{r <= v t} |d_t u_perp|`
    pub sup_dt_kg_cone: f64,
}

fn sample_series(s: &RadialFieldState, t: f64, ray_speed: f64) -> SeriesSample {
    let n = s.n();
    let points = s.points();
    let dr = s.dr;
    let mut out = SeriesSample {
        t,
        sup_kg: 0.0,
        sup_dt_kg: 0.0,
        sup_l_wave: 0.0,
        sup_wave: 0.0,
        sup_kg_cone: 0.0,
        sup_dt_kg_cone: 0.0,
    };
    for j in 0..points {
        let (mut a, mut b) = (0.0, 0.0);
        for e in 1..n {
            a += s.u[e][j] * s.u[e][j];
            b += s.v[e][j] * s.v[e][j];
        }
        out.sup_kg = out.sup_kg.max(a.sqrt());
        out.sup_dt_kg = out.sup_dt_kg.max(b.sqrt());
        if j as f64 * dr <= ray_speed * t {
            out.sup_kg_cone = out.sup_kg_cone.max(a.sqrt());
            out.sup_dt_kg_cone = out.sup_dt_kg_cone.max(b.sqrt());
        }
        let u = &s.u[0];
        let up = if j + 1 < points { u[j + 1] } else { 0.0 };
        let um = if j == 0 { up } else { u[j - 1] };
        let ur = (up - um) / (2.0 * dr);
        let r = j as f64 * dr;
        out.sup_l_wave = out.sup_l_wave.max((r * s.v[0][j] + t * ur).abs());
        out.sup_wave = out.sup_wave.max(u[j].abs());
    }
    out
}

/// Raw output of a run.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub coeffs: CouplingCoefficients,
    pub taus: Vec<f64>,
    /// Completed slices, in the order of `taus`; `None` if the run stopped first.
    pub slices: Vec<Option<SliceField>>,
    /// `int int_{t >= t_start, tau' < tau} sum_e F^e d_t u^e d^4x` per slice.
    pub flux: Vec<f64>,
    pub series: Vec<SeriesSample>,
    pub blowup: Option<f64>,
    pub checkpoints: Vec<RadialFieldState>,
    pub final_state: RadialFieldState,
    pub steps: usize,
}

const BLOWUP_AMPLITUDE: f64 = 1e6;

/// Runs `t_start -> t_end`, interpolating every requested slice.
pub fn run(config: &RunConfig) -> Result<Evolution> {
    config.validate()?;
    let coeffs = config.coefficients()?;
    let n = config.target_dim;
    let dr = config.dr;
    let dt = config.dt();
    let points = config.grid_points();
    let steps = ((config.t_end - config.t_start) / dt).round() as usize;
    let t_of = |k: usize| config.t_start + k as f64 * dt;

    let mut ring: Vec<RadialFieldState> = (0..4).map(|_| RadialFieldState::zeros(config.t_start, dr, n, points)).collect();
    ring[0] = init_data(config)?;
    let mut stepper = Stepper::new(&coeffs, dr, n, points);

    let mut samplers: Vec<SliceSampler> = config
        .taus
        .iter()
        .map(|&tau| SliceSampler { field: SliceField::zeros(tau, dr, n, slice_len(config, tau)), next: 0 })
        .collect();
    let mut flux = vec![0.0; config.taus.len()];
    let mut prev_rate: Option<Vec<f64>> = None;
    let mut series = Vec::new();
    let series_every = ((config.series_dt / dt).round() as usize).max(1);
    let checkpoint_every = config.checkpoint_every.map(|c| ((c / dt).round() as usize).max(1));
    let mut checkpoints = Vec::new();
    let mut blowup = None;
    let mut cum = vec![0.0; points];

    let window = |t: f64| -> usize {
        let reach = config.support_radius + (t - config.t_start) + front_margin(dr, t - config.t_start);
        ((reach / dr).ceil() as usize).min(points - 1)
    };
    let tau_max = config.taus.iter().copied().fold(f64::NAN, f64::max);
    let t_full = config.decay_window[1].max(config.t_start);
    let interior = |t: f64| -> usize {
        if !config.trim_interior || !(t > t_full) || !(t > tau_max) {
            return 0;
        }
        let r = (t * t - tau_max * tau_max).sqrt();
        ((r / dr).floor() as usize).saturating_sub(INTERIOR_MARGIN)
    };

    let mut done = 0usize;
    for k in 0..=steps {
        let cur = k % 4;
        // slices whose interpolation stencil ends at level k
        if k >= 3 {
            for smp in samplers.iter_mut() {
                let len = smp.field.len();
                while smp.next < len {
                    let j = smp.next;
                    let t = smp.field.tau.hypot(j as f64 * dr);
                    let lvl = ((t - config.t_start) / dt).floor().max(0.0) as usize;
                    if (lvl + 2).max(3) > k {
                        break;
                    }
                    let base = k - 3;
                    let wts = lagrange4((t - t_of(base)) / dt);
                    for e in 0..n {
                        let (mut a, mut b) = (0.0, 0.0);
                        for (q, wq) in wts.iter().enumerate() {
                            let lv = &ring[(base + q) % 4];
                            a += wq * lv.u[e][j];
                            b += wq * lv.v[e][j];
                        }
                        smp.field.u[e][j] = a;
                        smp.field.ut[e][j] = b;
                    }
                    smp.next += 1;
                }
            }
        }
        if k % series_every == 0 && interior(t_of(k)) == 0 {
            series.push(sample_series(&ring[cur], t_of(k), config.ray_speed));
        }
        if let Some(ce) = checkpoint_every {
            if k % ce == 0 {
                let mut c = ring[cur].clone();
                c.t = t_of(k);
                checkpoints.push(c);
            }
        }
        if k == steps {
            // source at the final level for the time quadrature
            let last = window(t_of(k));
            operator_window(
                &stepper.coeffs,
                &stepper.mass,
                dr,
                &ring[cur].u,
                &ring[cur].v,
                interior(t_of(k)),
                last,
                &mut stepper.ku,
                &mut stepper.kv,
                Some(&mut stepper.source[..]),
            );
            let rate = slice_flux_rates(config, t_of(k), &stepper.source[..=last], &mut cum);
            if let Some(p) = &prev_rate {
                for (f, (a, b)) in flux.iter_mut().zip(p.iter().zip(&rate)) {
                    *f += 0.5 * dt * (a + b);
                }
            }
            done = k;
            break;
        }
        let last = window(t_of(k + 1));
        let lo = interior(t_of(k)).min(last);
        stepper.source[..lo].fill(0.0);
        let (src, dst) = split_ring(&mut ring, cur, (k + 1) % 4);
        stepper.step(src, dst, dt, lo, last);
        dst.t = t_of(k + 1);
        let rate = slice_flux_rates(config, t_of(k), &stepper.source[..=last], &mut cum);
        if let Some(p) = &prev_rate {
            for (f, (a, b)) in flux.iter_mut().zip(p.iter().zip(&rate)) {
                *f += 0.5 * dt * (a + b);
            }
        }
        prev_rate = Some(rate);
        let bad = (0..n).any(|e| {
            dst.u[e][lo..=last].iter().chain(&dst.v[e][lo..=last]).any(|x| !x.is_finite() || x.abs() > BLOWUP_AMPLITUDE)
        });
        if bad {
            blowup = Some(t_of(k + 1));
            done = k + 1;
            break;
        }
        done = k + 1;
    }

    let slices = samplers
        .into_iter()
        .map(|s| if s.next == s.field.len() { Some(s.field) } else { None })
        .collect();
    let mut final_state = ring[done % 4].clone();
    final_state.t = t_of(done);
    Ok(Evolution {
        coeffs,
        taus: config.taus.clone(),
        slices,
        flux,
        series,
        blowup,
        checkpoints,
        final_state,
        steps: done,
    })
}

fn split_ring(ring: &mut [RadialFieldState], a: usize, b: usize) -> (&RadialFieldState, &mut RadialFieldState) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = ring.split_at_mut(b);
        (&lo[a], &mut hi[0])
    } else {
        let (lo, hi) = ring.split_at_mut(a);
        (&hi[0], &mut lo[b])
    }
}

/// `int_{r > sqrt(t^2 - tau^2)} 4 pi r^2 G dr` for every slice.
fn slice_flux_rates(config: &RunConfig, t: f64, g: &[f64], cum: &mut [f64]) -> Vec<f64> {
    let dr = config.dr;
    let m = g.len();
    cum[0] = 0.0;
    for j in 1..m {
        let (r0, r1) = ((j - 1) as f64 * dr, j as f64 * dr);
        cum[j] = cum[j - 1] + 0.5 * dr * 4.0 * std::f64::consts::PI * (r0 * r0 * g[j - 1] + r1 * r1 * g[j]);
    }
    let total = cum[m - 1];
    config
        .taus
        .iter()
        .map(|&tau| {
            let rho = (t * t - tau * tau).max(0.0).sqrt();
            let x = rho / dr;
            let i = x.floor() as usize;
            if i + 1 >= m {
                0.0
            } else {
                let s = x - i as f64;
                total - (cum[i] * (1.0 - s) + cum[i + 1] * s)
            }
        })
        .collect()
}

/// Max-norm residual of the discrete operator applied to `(1 - r^2)^4 cos t`
/// at time `t` against the analytic `Lap u - mass u`, nonlinearities off.
pub fn manufactured_residual(c: &CouplingCoefficients, dr: f64, t: f64) -> f64 {
    let c = c.clone().without_quadratic().without_cubic();
    let points = (1.5 / dr).round() as usize + 1;
    let n = c.n;
    let mut s = RadialFieldState::zeros(t, dr, n, points);
    for j in 0..points {
        let b = bump(j as f64 * dr, 1.0);
        for e in 0..n {
            s.u[e][j] = b * t.cos();
            s.v[e][j] = -b * t.sin();
        }
    }
    let d = spatial_operator(&s, &c);
    let mass = masses(&c);
    let mut res = 0.0f64;
    for j in 0..points {
        let r = j as f64 * dr;
        let q = (1.0 - r * r).max(0.0);
        let lap = -24.0 * q.powi(3) + 48.0 * r * r * q * q;
        for e in 0..n {
            let exact = (lap - mass[e] * bump(r, 1.0)) * t.cos();
            res = res.max((d.v[e][j] - exact).abs());
        }
    }
    res
}
