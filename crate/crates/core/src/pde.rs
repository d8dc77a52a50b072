//! Right-hand sides of the truncated wave / Klein-Gordon system
//! `box u^1 = F^1`, `box u^i - mass u^i = F^i`.
//!
//! Component 0 is the wave unknown `u^1`; components `1..n` are the
//! Klein-Gordon unknowns. Undifferentiated factors only ever range over the
//! Klein-Gordon components.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Timelike,
    Spacelike,
}

impl Case {
    /// Minkowski length squared of the background line.
    pub fn sigma(self) -> i32 {
        match self {
            Case::Timelike => -1,
            Case::Spacelike => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Case::Timelike => "timelike",
            Case::Spacelike => "spacelike",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "timelike" | "tl" | "TL" => Ok(Case::Timelike),
            "spacelike" | "sl" | "SL" => Ok(Case::Spacelike),
            _ => Err(Error::Config(format!("unknown case '{s}', expected timelike or spacelike"))),
        }
    }
}

/// Constants of the truncated system.
///
/// Quadratic part: `F^1 = quad_sign <u_perp, d_l u_perp>`, `F^i = -quad_sign u^i d_l u^1`,
/// where `d_l` is `d_t` (timelike) or `d_{x1}` (spacelike).
/// Cubic part of equation `e`:
/// `sum c_uuu[e][m][p][q] u^m u^p u^q + sum c_uup[e][m][p][j] u^m u^p d_l u^j
///  + sum c_null[e][m][j][k] u^m M(Du^j, Du^k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingCoefficients {
    pub case: Case,
    pub sigma: i32,
    pub kg_mass: f64,
    pub quad_sign: f64,
    pub n: usize,
    c_uuu: Vec<f64>,
    c_uup: Vec<f64>,
    c_null: Vec<f64>,
}

impl CouplingCoefficients {
    pub fn zeros(case: Case, n: usize) -> Self {
        let k = n - 1;
        Self {
            case,
            sigma: case.sigma(),
            kg_mass: 1.0,
            quad_sign: 0.0,
            n,
            c_uuu: vec![0.0; n * k * k * k],
            c_uup: vec![0.0; n * k * k * n],
            c_null: vec![0.0; n * k * n * n],
        }
    }

    /// Schematic system: unit mass, `quad_sign = -2` (timelike) / `+2` (spacelike),
    /// every cubic coefficient 1.
    pub fn model(case: Case, n: usize) -> Result<Self> {
        check_dim(n)?;
        let mut c = Self::zeros(case, n);
        c.quad_sign = match case {
            Case::Timelike => -2.0,
            Case::Spacelike => 2.0,
        };
        c.c_uuu.fill(1.0);
        c.c_uup.fill(1.0);
        c.c_null.fill(1.0);
        Ok(c)
    }

    pub fn without_cubic(mut self) -> Self {
        self.c_uuu.fill(0.0);
        self.c_uup.fill(0.0);
        self.c_null.fill(0.0);
        self
    }

    pub fn without_quadratic(mut self) -> Self {
        self.quad_sign = 0.0;
        self
    }

    fn k(&self) -> usize {
        self.n - 1
    }

    pub fn uuu(&self, e: usize, m: usize, p: usize, q: usize) -> f64 {
        let k = self.k();
        self.c_uuu[((e * k + m) * k + p) * k + q]
    }
    pub fn uuu_mut(&mut self, e: usize, m: usize, p: usize, q: usize) -> &mut f64 {
        let k = self.k();
        &mut self.c_uuu[((e * k + m) * k + p) * k + q]
    }
    pub fn uup(&self, e: usize, m: usize, p: usize, j: usize) -> f64 {
        let (k, n) = (self.k(), self.n);
        self.c_uup[((e * k + m) * k + p) * n + j]
    }
    pub fn uup_mut(&mut self, e: usize, m: usize, p: usize, j: usize) -> &mut f64 {
        let (k, n) = (self.k(), self.n);
        &mut self.c_uup[((e * k + m) * k + p) * n + j]
    }
    pub fn null(&self, e: usize, m: usize, j: usize, k2: usize) -> f64 {
        let (k, n) = (self.k(), self.n);
        self.c_null[((e * k + m) * n + j) * n + k2]
    }
    pub fn null_mut(&mut self, e: usize, m: usize, j: usize, k2: usize) -> &mut f64 {
        let (k, n) = (self.k(), self.n);
        &mut self.c_null[((e * k + m) * n + j) * n + k2]
    }

    pub fn has_cubic(&self) -> bool {
        self.c_uuu.iter().chain(&self.c_uup).chain(&self.c_null).any(|v| *v != 0.0)
    }

    /// Preset file form: `{"case", "sigma", "kg_mass", "quad_sign", "c_uuu", "c_null", "c_uup"}`
    /// with tables nested `[equation][..][..][..]`.
    pub fn to_json(&self) -> Value {
        let (n, k) = (self.n, self.k());
        let uuu: Vec<Vec<Vec<Vec<f64>>>> = (0..n)
            .map(|e| (0..k).map(|m| (0..k).map(|p| (0..k).map(|q| self.uuu(e, m, p, q)).collect()).collect()).collect())
            .collect();
        let uup: Vec<Vec<Vec<Vec<f64>>>> = (0..n)
            .map(|e| (0..k).map(|m| (0..k).map(|p| (0..n).map(|j| self.uup(e, m, p, j)).collect()).collect()).collect())
            .collect();
        let null_table: Vec<Vec<Vec<Vec<f64>>>> = (0..n)
            .map(|e| (0..k).map(|m| (0..n).map(|j| (0..n).map(|q| self.null(e, m, j, q)).collect()).collect()).collect())
            .collect();
        serde_json::json!({
            "case": self.case,
            "sigma": self.sigma,
            "kg_mass": self.kg_mass,
            "quad_sign": self.quad_sign,
            "c_uuu": uuu,
            "c_null": null_table,
            "c_uup": uup,
        })
    }

    /// Parse a preset. Tables may be per equation (4 levels) or shared by all
    /// equations (3 levels); `kg_mass` and `quad_sign` default to the model values.
    pub fn from_json(v: &Value) -> Result<Self> {
        let case = Case::parse(v.get("case").and_then(Value::as_str).ok_or_else(|| cfg("missing \"case\""))?)?;
        let sigma = v.get("sigma").and_then(Value::as_i64).ok_or_else(|| cfg("missing \"sigma\""))? as i32;
        if sigma != case.sigma() {
            return Err(cfg(&format!("sigma {sigma} inconsistent with case {}", case.name())));
        }
        let uuu = v.get("c_uuu").ok_or_else(|| cfg("missing \"c_uuu\""))?;
        let k = first_len(uuu, 3)?;
        let n = k + 1;
        check_dim(n)?;
        let mut c = Self::model(case, n)?;
        if let Some(m) = v.get("kg_mass") {
            c.kg_mass = m.as_f64().ok_or_else(|| cfg("kg_mass must be a number"))?;
        }
        if let Some(q) = v.get("quad_sign") {
            c.quad_sign = q.as_f64().ok_or_else(|| cfg("quad_sign must be a number"))?;
        }
        if c.kg_mass <= 0.0 {
            return Err(cfg("Klein-Gordon mass not positive"));
        }
        c.c_uuu = read_table(uuu, n, [k, k, k], "c_uuu")?;
        c.c_uup = read_table(v.get("c_uup").ok_or_else(|| cfg("missing \"c_uup\""))?, n, [k, k, n], "c_uup")?;
        c.c_null = read_table(v.get("c_null").ok_or_else(|| cfg("missing \"c_null\""))?, n, [k, n, n], "c_null")?;
        Ok(c)
    }
}

fn cfg(msg: &str) -> Error {
    Error::Config(msg.to_string())
}

fn check_dim(n: usize) -> Result<()> {
    if (2..=5).contains(&n) {
        Ok(())
    } else {
        Err(Error::Config(format!("target dimension n = {n} outside 2..=5")))
    }
}

fn depth(v: &Value) -> usize {
    match v {
        Value::Array(a) => 1 + a.first().map(depth).unwrap_or(0),
        _ => 0,
    }
}

// Length of the `m` index: the first level of a shared table, second of a per-equation one.
fn first_len(v: &Value, shared_depth: usize) -> Result<usize> {
    let a = v.as_array().ok_or_else(|| cfg("c_uuu must be an array"))?;
    if depth(v) == shared_depth {
        Ok(a.len())
    } else {
        a.first().and_then(Value::as_array).map(|x| x.len()).ok_or_else(|| cfg("c_uuu is empty"))
    }
}

fn read_table(v: &Value, n: usize, dims: [usize; 3], name: &str) -> Result<Vec<f64>> {
    let flat3 = |t: &Value| -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(dims.iter().product());
        let a = t.as_array().filter(|a| a.len() == dims[0]);
        let a = a.ok_or_else(|| cfg(&format!("{name}: expected {} rows", dims[0])))?;
        for b in a {
            let b = b.as_array().filter(|b| b.len() == dims[1]);
            let b = b.ok_or_else(|| cfg(&format!("{name}: expected {} columns", dims[1])))?;
            for c in b {
                let c = c.as_array().filter(|c| c.len() == dims[2]);
                let c = c.ok_or_else(|| cfg(&format!("{name}: expected {} entries", dims[2])))?;
                for x in c {
                    out.push(x.as_f64().ok_or_else(|| cfg(&format!("{name}: non-numeric entry")))?);
                }
            }
        }
        Ok(out)
    };
    match depth(v) {
        3 => {
            let one = flat3(v)?;
            Ok((0..n).flat_map(|_| one.iter().copied()).collect())
        }
        4 => {
            let a = v.as_array().filter(|a| a.len() == n);
            let a = a.ok_or_else(|| cfg(&format!("{name}: expected one table per equation ({n})")))?;
            let mut out = Vec::new();
            for t in a {
                out.extend(flat3(t)?);
            }
            Ok(out)
        }
        d => Err(cfg(&format!("{name}: nesting depth {d}, expected 3 or 4"))),
    }
}

/// Pointwise values and spacetime gradients `(d_t, d_x1, d_x2, d_x3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointState {
    pub u1: f64,
    pub vec_u: Vec<f64>,
    pub du1: [f64; 4],
    pub dvec_u: Vec<[f64; 4]>,
}

impl PointState {
    pub fn zero(n: usize) -> Self {
        Self { u1: 0.0, vec_u: vec![0.0; n - 1], du1: [0.0; 4], dvec_u: vec![[0.0; 4]; n - 1] }
    }

    pub fn n(&self) -> usize {
        self.vec_u.len() + 1
    }

    fn values(&self) -> Vec<f64> {
        std::iter::once(self.u1).chain(self.vec_u.iter().copied()).collect()
    }

    fn grad(&self, j: usize) -> &[f64; 4] {
        if j == 0 {
            &self.du1
        } else {
            &self.dvec_u[j - 1]
        }
    }
}

/// `M(Du, Dv) = -u_t v_t + sum_i u_{x^i} v_{x^i}`.
pub fn null_form(du: &[f64], dv: &[f64]) -> f64 {
    -du[0] * dv[0] + du[1..].iter().zip(&dv[1..]).map(|(a, b)| a * b).sum::<f64>()
}

/// Adds the quadratic terms to `out`; `u` and `dl` hold all `n` components.
#[inline]
pub fn add_quadratic(c: &CouplingCoefficients, u: &[f64], dl: &[f64], out: &mut [f64]) {
    if c.quad_sign == 0.0 {
        return;
    }
    let n = c.n;
    let mut dot = 0.0;
    for i in 1..n {
        dot += u[i] * dl[i];
    }
    out[0] += c.quad_sign * dot;
    for i in 1..n {
        out[i] -= c.quad_sign * u[i] * dl[0];
    }
}

/// Adds the cubic terms to `out`; `mjk` is the `n x n` table of `M(Du^j, Du^k)`.
#[inline]
pub fn add_cubic(c: &CouplingCoefficients, u: &[f64], dl: &[f64], mjk: &[f64], out: &mut [f64]) {
    let n = c.n;
    let k = n - 1;
    let ub = &u[1..];
    for (e, o) in out.iter_mut().enumerate().take(n) {
        let mut acc = 0.0;
        for m in 0..k {
            let mut inner = 0.0;
            for p in 0..k {
                let mut s = 0.0;
                let bu = ((e * k + m) * k + p) * k;
                for q in 0..k {
                    s += c.c_uuu[bu + q] * ub[q];
                }
                let bp = ((e * k + m) * k + p) * n;
                for j in 0..n {
                    s += c.c_uup[bp + j] * dl[j];
                }
                inner += ub[p] * s;
            }
            let bn = (e * k + m) * n * n;
            for jk in 0..n * n {
                inner += c.c_null[bn + jk] * mjk[jk];
            }
            acc += ub[m] * inner;
        }
        *o += acc;
    }
}

fn rhs_along(s: &PointState, c: &CouplingCoefficients, dir: usize) -> (f64, Vec<f64>) {
    let n = s.n();
    let u = s.values();
    let dl: Vec<f64> = (0..n).map(|j| s.grad(j)[dir]).collect();
    let mut mjk = vec![0.0; n * n];
    for j in 0..n {
        for k in 0..n {
            mjk[j * n + k] = null_form(s.grad(j), s.grad(k));
        }
    }
    let mut out = vec![0.0; n];
    add_quadratic(c, &u, &dl, &mut out);
    add_cubic(c, &u, &dl, &mjk, &mut out);
    (out[0], out[1..].to_vec())
}

/// Timelike background: quadratic and `u u d_l u` terms use `d_t`.
pub fn rhs_timelike(s: &PointState, c: &CouplingCoefficients) -> (f64, Vec<f64>) {
    rhs_along(s, c, 0)
}

/// Spacelike background: quadratic and `u u d_l u` terms use `d_{x1}`.
pub fn rhs_spacelike(s: &PointState, c: &CouplingCoefficients) -> (f64, Vec<f64>) {
    rhs_along(s, c, 1)
}

pub fn rhs(s: &PointState, c: &CouplingCoefficients) -> (f64, Vec<f64>) {
    match c.case {
        Case::Timelike => rhs_timelike(s, c),
        Case::Spacelike => rhs_spacelike(s, c),
    }
}

/// `-2 <u, u_t> u1_t + 2 <u1_t u, u_t>`; zero in exact arithmetic.
pub fn quadratic_cancellation_residual(ubar: &[f64], dt_ubar: &[f64], dt_u1: f64) -> f64 {
    let a: f64 = ubar.iter().zip(dt_ubar).map(|(u, v)| u * v).sum();
    let b: f64 = ubar.iter().zip(dt_ubar).map(|(u, v)| (dt_u1 * u) * v).sum();
    -2.0 * a * dt_u1 + 2.0 * b
}
