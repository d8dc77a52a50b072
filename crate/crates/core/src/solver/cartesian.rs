//! Full 3D Cartesian evolution on one octant with even reflection through the
//! coordinate planes, used as an independent check of the radial solver.
//! Sixth-order stencils and RK4. Timelike systems only: the spacelike
//! nonlinearity is odd in `x1` and breaks the reflection symmetry.

use crate::error::{Error, Result};
use crate::pde::{add_cubic, add_quadratic, Case, CouplingCoefficients};
use crate::solver::{bump, RadialFieldState, RunConfig};

#[derive(Debug, Clone)]
pub struct CartesianState {
    pub t: f64,
    pub h: f64,
    pub m: usize,
    /// `u[e][(i * m + j) * m + k]` at `(i h, j h, k h)`
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
}

impl CartesianState {
    pub fn radius(&self, idx: usize) -> f64 {
        let m = self.m;
        let (i, j, k) = (idx / (m * m), (idx / m) % m, idx % m);
        self.h * ((i * i + j * j + k * k) as f64).sqrt()
    }
}

fn at(m: usize, f: &[f64], i: isize, j: isize, k: isize) -> f64 {
    let mi = m as isize;
    let (i, j, k) = (i.abs(), j.abs(), k.abs());
    if i >= mi || j >= mi || k >= mi {
        0.0
    } else {
        f[((i * mi + j) * mi + k) as usize]
    }
}

fn operator(c: &CouplingCoefficients, mass: &[f64], s: &CartesianState, u: &[Vec<f64>], v: &[Vec<f64>], du: &mut [Vec<f64>], dv: &mut [Vec<f64>]) {
    let n = c.n;
    let m = s.m;
    let h = s.h;
    let d2 = 1.0 / (180.0 * h * h);
    let d1 = 1.0 / (60.0 * h);
    let mut uu = vec![0.0; n];
    let mut vv = vec![0.0; n];
    let mut grad = vec![[0.0f64; 3]; n];
    let mut lap = vec![0.0; n];
    let mut f = vec![0.0; n];
    let mut mjk = vec![0.0; n * n];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let idx = (i * m + j) * m + k;
                let (ii, jj, kk) = (i as isize, j as isize, k as isize);
                for e in 0..n {
                    let fe = &u[e];
                    let c0 = fe[idx];
                    let mut l = -3.0 * 490.0 * c0;
                    let dirs = [(1isize, 0isize, 0isize), (0, 1, 0), (0, 0, 1)];
                    for (a, (di, dj, dk)) in dirs.iter().enumerate() {
                        let p1 = at(m, fe, ii + di, jj + dj, kk + dk);
                        let p2 = at(m, fe, ii + 2 * di, jj + 2 * dj, kk + 2 * dk);
                        let m1 = at(m, fe, ii - di, jj - dj, kk - dk);
                        let m2 = at(m, fe, ii - 2 * di, jj - 2 * dj, kk - 2 * dk);
                        let p3 = at(m, fe, ii + 3 * di, jj + 3 * dj, kk + 3 * dk);
                        let m3 = at(m, fe, ii - 3 * di, jj - 3 * dj, kk - 3 * dk);
                        l += 2.0 * (p3 + m3) - 27.0 * (p2 + m2) + 270.0 * (p1 + m1);
                        grad[e][a] = (p3 - m3 - 9.0 * (p2 - m2) + 45.0 * (p1 - m1)) * d1;
                    }
                    lap[e] = l * d2;
                    uu[e] = c0;
                    vv[e] = v[e][idx];
                }
                f.fill(0.0);
                add_quadratic(c, &uu, &vv, &mut f);
                if c.has_cubic() {
                    for a in 0..n {
                        for b in 0..n {
                            let g: f64 = (0..3).map(|q| grad[a][q] * grad[b][q]).sum();
                            mjk[a * n + b] = -vv[a] * vv[b] + g;
                        }
                    }
                    add_cubic(c, &uu, &vv, &mjk, &mut f);
                }
                for e in 0..n {
                    du[e][idx] = vv[e];
                    dv[e][idx] = lap[e] - mass[e] * uu[e] - f[e];
                }
            }
        }
    }
}

/// Evolves the configured data on an `m^3` octant grid of half-width `half_width`
/// from `t_start` to `t_final`.
pub fn cartesian_run(config: &RunConfig, m: usize, half_width: f64, t_final: f64, cfl: f64) -> Result<CartesianState> {
    config.validate()?;
    let c = config.coefficients()?;
    if c.case != Case::Timelike {
        return Err(Error::Config("the Cartesian check supports the timelike system only".into()));
    }
    let n = c.n;
    let h = half_width / (m as f64 - 1.0);
    let total = m * m * m;
    let mut s = CartesianState { t: config.t_start, h, m, u: vec![vec![0.0; total]; n], v: vec![vec![0.0; total]; n] };
    for idx in 0..total {
        let b = bump(s.radius(idx), config.support_radius) * config.epsilon;
        for e in 0..n {
            s.u[e][idx] = b;
            s.v[e][idx] = config.profile.velocity(e, b);
        }
    }
    let mass: Vec<f64> = (0..n).map(|e| if e == 0 { 0.0 } else { c.kg_mass }).collect();
    let steps = ((t_final - config.t_start) / (cfl * h)).ceil() as usize;
    let dt = (t_final - config.t_start) / steps as f64;
    let z = || vec![vec![0.0; total]; n];
    let (mut ku, mut kv, mut su, mut sv) = (z(), z(), z(), z());
    let (mut au, mut av) = (s.u.clone(), s.v.clone());
    for _ in 0..steps {
        au.clone_from(&s.u);
        av.clone_from(&s.v);
        let w = [dt / 6.0, dt / 3.0, dt / 3.0, dt / 6.0];
        let cs = [0.5 * dt, 0.5 * dt, dt];
        for stage in 0..4 {
            if stage == 0 {
                operator(&c, &mass, &s, &s.u, &s.v, &mut ku, &mut kv);
            } else {
                operator(&c, &mass, &s, &su, &sv, &mut ku, &mut kv);
            }
            for e in 0..n {
                for i in 0..total {
                    au[e][i] += w[stage] * ku[e][i];
                    av[e][i] += w[stage] * kv[e][i];
                }
                if stage < 3 {
                    for i in 0..total {
                        su[e][i] = s.u[e][i] + cs[stage] * ku[e][i];
                        sv[e][i] = s.v[e][i] + cs[stage] * kv[e][i];
                    }
                }
            }
        }
        std::mem::swap(&mut s.u, &mut au);
        std::mem::swap(&mut s.v, &mut av);
        s.t += dt;
    }
    Ok(s)
}

/// Radial profile at radius `rho` by cubic interpolation with even extension.
pub fn radial_sample(f: &[f64], dr: f64, rho: f64) -> f64 {
    let x = rho / dr;
    let j = x.floor() as isize;
    let s = x - j as f64;
    let get = |i: isize| -> f64 {
        let i = i.unsigned_abs();
        f.get(i).copied().unwrap_or(0.0)
    };
    let (a, b, c, d) = (get(j - 1), get(j), get(j + 1), get(j + 2));
    let w = [-s * (s - 1.0) * (s - 2.0) / 6.0, (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0, -(s + 1.0) * s * (s - 2.0) / 2.0, (s + 1.0) * s * (s - 1.0) / 6.0];
    w[0] * a + w[1] * b + w[2] * c + w[3] * d
}

/// Relative discrete L^2 difference of all `u` components between the
/// Cartesian state and a radial state evaluated at the same points.
pub fn relative_difference(cart: &CartesianState, radial: &RadialFieldState) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for e in 0..cart.u.len() {
        for idx in 0..cart.u[e].len() {
            let r = radial_sample(&radial.u[e], radial.dr, cart.radius(idx));
            num += (cart.u[e][idx] - r).powi(2);
            den += r * r;
        }
    }
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (num / den).sqrt()
    }
}
