use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{christoffel_jet, coupling_from_geometry, SpaceformChart};
use crate::pde::{Case, CouplingCoefficients};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// `u = eps b(r)`, `u_t = 0`
    Bump,
    /// `u = u_t = eps b(r)`
    BumpVelocity,
    /// `u = eps b(r)`; only the wave component moves: `u^1_t = eps b(r)`, `u_perp_t = 0`
    WaveVelocity,
}

impl Profile {
    /// Initial `d_t u^e` where the bump equals `b` (already scaled by `eps`).
    pub fn velocity(self, component: usize, b: f64) -> f64 {
        match (self, component) {
            (Profile::Bump, _) => 0.0,
            (Profile::BumpVelocity, _) | (Profile::WaveVelocity, 0) => b,
            (Profile::WaveVelocity, _) => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Unit cubic coefficients.
    Model,
    /// Coefficients from the Christoffel jet of the spaceform with positive mass
    /// for the chosen case (`S^n` timelike, `H^n` spacelike).
    Geometric,
    /// Coefficients read from `coefficients_path`.
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub case: Case,
    pub preset: Preset,
    pub coefficients_path: Option<String>,
    pub target_dim: usize,
    pub jet_step: f64,
    pub quadratic: bool,
    pub cubic: bool,
    pub dr: f64,
    /// Defaults to the light-cone reach at `t_end` plus a margin.
    pub r_max: Option<f64>,
    pub t_start: f64,
    pub t_end: f64,
    pub cfl: f64,
    pub epsilon: f64,
    pub profile: Profile,
    pub support_radius: f64,
    pub taus: Vec<f64>,
    /// Spacing of the constant-`t` sup-norm series.
    pub series_dt: f64,
    pub gamma: f64,
    /// Time window for decay fits.
    pub decay_window: [f64; 2],
    /// Aperture `r <= ray_speed t` of the cone used for the Klein-Gordon decay fits.
    pub ray_speed: f64,
    /// Stop updating points inside the last slice once the decay window has passed.
    pub trim_interior: bool,
    pub checkpoint_every: Option<f64>,
    /// Evaluate the quadratic / cubic estimate ratios on each slice.
    pub estimates: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            case: Case::Timelike,
            preset: Preset::Model,
            coefficients_path: None,
            target_dim: 3,
            jet_step: 1e-3,
            quadratic: true,
            cubic: true,
            dr: 0.02,
            r_max: None,
            t_start: 2.0,
            t_end: 40.0,
            cfl: 0.5,
            epsilon: 1e-3,
            profile: Profile::WaveVelocity,
            support_radius: 1.0,
            taus: vec![2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0],
            series_dt: 0.25,
            gamma: 0.45,
            decay_window: [10.0, 40.0],
            ray_speed: 0.4,
            trim_interior: true,
            checkpoint_every: None,
            estimates: true,
        }
    }
}

impl RunConfig {
    pub fn dt(&self) -> f64 {
        self.cfl * self.dr
    }

    pub fn r_max(&self) -> f64 {
        let elapsed = self.t_end - self.t_start;
        self.r_max.unwrap_or(self.support_radius + elapsed + super::front_margin(self.dr, elapsed) + 8.0 * self.dr)
    }

    pub fn grid_points(&self) -> usize {
        (self.r_max() / self.dr).ceil() as usize + 1
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.dr > 0.0 && self.dr.is_finite()) {
            return bad(format!("dr must be positive, got {}", self.dr));
        }
        if !(self.cfl > 0.0 && self.cfl <= 0.5) {
            return bad(format!("cfl must lie in (0, 0.5], got {}", self.cfl));
        }
        if !(self.t_start > 0.0) || !(self.t_end > self.t_start) {
            return bad(format!("need 0 < t_start < t_end, got {} and {}", self.t_start, self.t_end));
        }
        if !(self.support_radius > 0.0 && self.support_radius <= 1.0) {
            return bad(format!("support radius must lie in (0, 1], got {}", self.support_radius));
        }
        if self.support_radius >= self.t_start {
            return bad("support radius must be smaller than t_start".into());
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be finite and non-negative, got {}", self.epsilon));
        }
        if !(2..=5).contains(&self.target_dim) {
            return bad(format!("target_dim must lie in 2..=5, got {}", self.target_dim));
        }
        let reach = self.support_radius + (self.t_end - self.t_start);
        if self.r_max() < reach {
            return bad(format!("r_max = {} is inside the light cone reach {reach} at t_end", self.r_max()));
        }
        if !(self.series_dt > 0.0) {
            return bad("series_dt must be positive".into());
        }
        if !(self.ray_speed > 0.0 && self.ray_speed < 1.0) {
            return bad(format!("ray_speed must lie in (0, 1), got {}", self.ray_speed));
        }
        if !(self.gamma > 0.0 && self.gamma < 0.5) {
            return bad(format!("gamma must lie in (0, 1/2), got {}", self.gamma));
        }
        if self.preset == Preset::File && self.coefficients_path.is_none() {
            return bad("preset \"file\" needs coefficients_path".into());
        }
        for w in self.taus.windows(2) {
            if w[1] <= w[0] {
                return bad("taus must be strictly increasing".into());
            }
        }
        for &tau in &self.taus {
            if tau < self.t_start {
                return bad(format!("slice tau = {tau} lies partly before t_start = {}", self.t_start));
            }
            let need = super::slice_end_time(self, tau) + 3.0 * self.dt();
            if need > self.t_end {
                return Err(Error::Range(format!(
                    "slice tau = {tau} needs history over t in [{tau}, {need:.3}] but t_end = {}",
                    self.t_end
                )));
            }
        }
        Ok(())
    }

    pub fn coefficients(&self) -> Result<CouplingCoefficients> {
        let c = match self.preset {
            Preset::Model => CouplingCoefficients::model(self.case, self.target_dim)?,
            Preset::Geometric => {
                let chart = match self.case {
                    Case::Timelike => SpaceformChart::sphere(self.target_dim),
                    Case::Spacelike => SpaceformChart::hyperbolic(self.target_dim),
                };
                let jet = christoffel_jet(&chart, self.jet_step)?;
                coupling_from_geometry(&jet, self.case)?
            }
            Preset::File => {
                let path = self.coefficients_path.as_deref().unwrap_or_default();
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read coefficients file {path}: {e}")))?;
                let v: Value = serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("coefficients file {path}: {e}")))?;
                let c = CouplingCoefficients::from_json(&v)?;
                if c.case != self.case || c.n != self.target_dim {
                    return Err(Error::Config(format!(
                        "coefficients file {path} is for {} with n = {}, run is {} with n = {}",
                        c.case.name(),
                        c.n,
                        self.case.name(),
                        self.target_dim
                    )));
                }
                c
            }
        };
        let c = if self.quadratic { c } else { c.without_quadratic() };
        Ok(if self.cubic { c } else { c.without_cubic() })
    }

    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    /// Parses TOML (`.toml`) or JSON text.
    pub fn parse(text: &str, toml_syntax: bool) -> Result<Value> {
        if toml_syntax {
            let v: toml::Value = toml::from_str(text).map_err(|e| Error::Config(format!("malformed TOML: {e}")))?;
            serde_json::to_value(v).map_err(|e| Error::Config(e.to_string()))
        } else {
            serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed JSON: {e}")))
        }
    }

    pub fn from_value(v: Value) -> Result<Self> {
        serde_json::from_value(v).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid_and_hash_is_stable() {
        let c = RunConfig::default();
        c.validate().unwrap();
        assert_eq!(c.hash(), RunConfig::default().hash());
        let d = RunConfig { epsilon: 2e-3, ..RunConfig::default() };
        assert_ne!(c.hash(), d.hash());
    }

    #[test]
    fn slices_need_history() {
        let c = RunConfig { taus: vec![2.0, 30.0], ..RunConfig::default() };
        assert!(matches!(c.validate(), Err(Error::Range(_))));
    }

    #[test]
    fn toml_and_json_agree() {
        let a = RunConfig::parse("case = \"spacelike\"\nepsilon = 0.002\n", true).unwrap();
        let b = RunConfig::parse("{\"case\": \"spacelike\", \"epsilon\": 0.002}", false).unwrap();
        assert_eq!(RunConfig::from_value(a).unwrap(), RunConfig::from_value(b).unwrap());
        assert!(RunConfig::from_value(serde_json::json!({"bogus": 1})).is_err());
    }
}
