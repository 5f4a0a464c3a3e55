//! Experiment configuration (TOML) and shipped presets.
//!
//! Every physical quantity carries its unit in the key name: angular
//! frequencies as `*_GHz_times_2pi` (the value f means ω = 2π·f rad/ns),
//! times as `*_ns`, angles as `*_rad`, ratios as `*_dimensionless`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::analysis::NoiseConfig;
use crate::codes::GateSpec;
use crate::dynamics::{DecoherenceRates, PropagationOptions};
use crate::error::{Error, Result};
use crate::ode::OdeOptions;
use crate::pulse::{cat_target, RwaScope, superposition_target, DEFAULT_GRID_POINTS};
use crate::rabi::{CavityMode, RabiModel, DEFAULT_BIMODAL_CUTOFF, DEFAULT_CUTOFF};

const TWO_PI: f64 = 2.0 * PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub model: ModelConfig,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prep: Option<PrepConfig>,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub decoherence: DecoherenceSection,
    #[serde(default)]
    pub propagation: PropagationSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub rwa: RwaSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// One entry per cavity mode (ω_c, or ω_a and ω_b).
    #[serde(rename = "omega_c_GHz_times_2pi")]
    pub omega_c: Vec<f64>,
    #[serde(rename = "omega_q_GHz_times_2pi")]
    pub omega_q: f64,
    /// g_i in units of the first mode frequency.
    #[serde(rename = "g_over_omega_c_dimensionless")]
    pub g_ratio: Vec<f64>,
    /// Fock states kept per mode; defaults to 20 (one mode) or 10 (two modes).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fock_cutoff: Option<usize>,
    /// Explicit ω_μ; by default it is tuned from the schedule's m and k_max.
    #[serde(default, rename = "omega_mu_GHz_times_2pi", skip_serializing_if = "Option::is_none")]
    pub omega_mu: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleConfig {
    pub t_f_ns: f64,
    /// Intermediate dressed level.
    pub m: usize,
    /// Largest photon number addressed per mode.
    pub k_max: usize,
    pub grid_points: usize,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self { t_f_ns: 150.0, m: 2, k_max: 4, grid_points: DEFAULT_GRID_POINTS }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    Single,
    Two,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateConfig {
    pub kind: GateKind,
    pub theta_s_rad: f64,
    #[serde(default)]
    pub theta_rad: f64,
    #[serde(default)]
    pub phi_rad: f64,
    #[serde(default)]
    pub theta0_rad: f64,
    #[serde(default)]
    pub theta1_rad: f64,
    #[serde(default)]
    pub theta2_rad: f64,
}

impl GateConfig {
    pub fn spec(&self) -> Result<GateSpec> {
        match self.kind {
            GateKind::Single => GateSpec::single(self.theta_s_rad, self.theta_rad, self.phi_rad),
            GateKind::Two => GateSpec::two(self.theta_s_rad, self.theta0_rad, self.theta1_rad, self.theta2_rad, self.phi_rad),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrepTarget {
    /// (|0̃⟩ + √2|1̃⟩)/√3.
    Superposition,
    /// Even cat of amplitude η.
    Cat,
    /// Explicit β̃_f and ε list.
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrepConfig {
    pub target: PrepTarget,
    #[serde(default = "default_eta")]
    pub eta_dimensionless: f64,
    /// Largest k′ kept in the cat expansion.
    #[serde(default = "default_cat_kmax")]
    pub cat_k_max: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_f_rad: Option<f64>,
    /// (k′, ε_{k′}) pairs for the custom target.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub epsilon: Vec<(usize, f64)>,
    #[serde(default = "default_wigner_points")]
    pub wigner_points: usize,
    #[serde(default = "default_wigner_extent")]
    pub wigner_extent: f64,
}

fn default_eta() -> f64 {
    SQRT_2
}
fn default_cat_kmax() -> usize {
    8
}
fn default_wigner_points() -> usize {
    81
}
fn default_wigner_extent() -> f64 {
    3.0
}

impl PrepConfig {
    /// β̃_f and the ε list.
    pub fn target_parameters(&self) -> Result<(f64, Vec<(usize, f64)>)> {
        match self.target {
            PrepTarget::Superposition => Ok(superposition_target()),
            PrepTarget::Cat => {
                if !(self.eta_dimensionless > 0.0) {
                    return Err(Error::Configuration("cat amplitude must be > 0".into()));
                }
                Ok(cat_target(self.eta_dimensionless, self.cat_k_max))
            }
            PrepTarget::Custom => {
                let beta = self
                    .beta_f_rad
                    .ok_or_else(|| Error::Configuration("custom prep needs beta_f_rad".into()))?;
                if self.epsilon.is_empty() {
                    return Err(Error::InvalidTarget("custom prep needs a non-empty epsilon list".into()));
                }
                Ok((beta, self.epsilon.clone()))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    pub delta_i_dimensionless: f64,
    pub snr_dimensionless: f64,
    pub snr_db: bool,
    /// AWGN realisations; 0 disables the Monte Carlo.
    pub samples: usize,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self { delta_i_dimensionless: 0.0, snr_dimensionless: 15.0, snr_db: false, samples: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecoherenceSection {
    pub enabled: bool,
    #[serde(rename = "kappa_GHz_times_2pi")]
    pub kappa: f64,
    #[serde(rename = "kappa_phi_GHz_times_2pi")]
    pub kappa_phi: f64,
    #[serde(rename = "gamma_g_GHz_times_2pi")]
    pub gamma_g: f64,
    #[serde(rename = "gamma_mu_GHz_times_2pi")]
    pub gamma_mu: f64,
    #[serde(rename = "gamma_g_phi_GHz_times_2pi")]
    pub gamma_g_phi: f64,
    #[serde(rename = "gamma_mu_phi_GHz_times_2pi")]
    pub gamma_mu_phi: f64,
    /// Logical input amplitudes (re, im) for the output-state fidelity.
    pub input_state: Vec<(f64, f64)>,
}

impl Default for DecoherenceSection {
    fn default() -> Self {
        Self {
            enabled: false,
            kappa: 0.33e-6,
            kappa_phi: 0.3e-6,
            gamma_g: 8e-6,
            gamma_mu: 8e-6,
            gamma_g_phi: 8e-6,
            gamma_mu_phi: 8e-6,
            input_state: vec![(1.0, 0.0), (0.0, 0.0)],
        }
    }
}

impl DecoherenceSection {
    pub fn rates(&self) -> DecoherenceRates {
        DecoherenceRates {
            kappa: TWO_PI * self.kappa,
            kappa_phi: TWO_PI * self.kappa_phi,
            gamma_g: TWO_PI * self.gamma_g,
            gamma_mu: TWO_PI * self.gamma_mu,
            gamma_g_phi: TWO_PI * self.gamma_g_phi,
            gamma_mu_phi: TWO_PI * self.gamma_mu_phi,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropagationSection {
    /// Run the dynamics; `false` only synthesises pulses and phases.
    pub dynamics: bool,
    /// Eigenbasis truncation for pure-state runs (all states when absent).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis_size: Option<usize>,
    pub master_basis_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rtol: Option<f64>,
    pub samples: usize,
}

impl Default for PropagationSection {
    fn default() -> Self {
        Self { dynamics: true, basis_size: None, master_basis_size: 40, rtol: None, samples: 101 }
    }
}

impl PropagationSection {
    pub fn pure(&self) -> PropagationOptions {
        let ode = self.rtol.map_or(OdeOptions::pure(), |r| OdeOptions::pure().with_rtol(r));
        PropagationOptions { ode, basis_size: self.basis_size, samples: self.samples }
    }

    pub fn master(&self) -> PropagationOptions {
        let ode = self.rtol.map_or(OdeOptions::master(), |r| OdeOptions::master().with_rtol(r));
        PropagationOptions { ode, basis_size: Some(self.master_basis_size), samples: self.samples }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    pub g_min_dimensionless: f64,
    pub g_max_dimensionless: f64,
    pub points: usize,
    /// Dressed levels written per g.
    #[serde(default = "default_levels")]
    pub levels: usize,
    /// Dressed levels whose c_n^m curves are written.
    #[serde(default = "default_coeff_levels")]
    pub coefficient_levels: Vec<usize>,
    #[serde(default = "default_coeff_fock")]
    pub coefficient_fock: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crossing: Option<CrossingSearch>,
}

fn default_levels() -> usize {
    8
}
fn default_coeff_levels() -> Vec<usize> {
    vec![0, 2]
}
fn default_coeff_fock() -> Vec<usize> {
    vec![0, 2, 4]
}

/// Bisection for the coupling where |c_n^m| first exceeds a threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingSearch {
    pub m: usize,
    pub n: usize,
    pub g_lo_dimensionless: f64,
    pub g_hi_dimensionless: f64,
    pub threshold_dimensionless: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMetric {
    /// Average gate fidelity.
    FBar,
    /// Output-state fidelity under the master equation.
    FOut,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    /// Dotted config paths set together to each value.
    pub keys: Vec<String>,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub metric: SweepMetric,
    pub axes: Vec<SweepAxis>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RwaSection {
    pub ratio_max_dimensionless: f64,
    /// Highest dressed level included; defaults to the whole spectrum.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_level: Option<usize>,
    pub scope: RwaScope,
}

impl Default for RwaSection {
    fn default() -> Self {
        Self { ratio_max_dimensionless: 0.1, max_level: None, scope: RwaScope::Populated }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Configuration(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.model;
        if m.omega_c.is_empty() || m.omega_c.len() > 2 || m.omega_c.len() != m.g_ratio.len() {
            return Err(Error::Configuration(
                "model needs one or two cavity modes with one coupling each".into(),
            ));
        }
        if !(self.schedule.t_f_ns > 0.0) {
            return Err(Error::Configuration(format!("t_f_ns = {} must be > 0", self.schedule.t_f_ns)));
        }
        if self.schedule.grid_points < 3 {
            return Err(Error::Configuration("grid_points must be >= 3".into()));
        }
        if self.gate.is_some() && self.prep.is_some() {
            return Err(Error::Configuration("a config describes either a gate or a preparation".into()));
        }
        if let Some(g) = &self.gate {
            let spec = g.spec()?;
            if spec.dim() == 4 && m.omega_c.len() != 2 {
                return Err(Error::Configuration("two-qubit gates need two cavity modes".into()));
            }
        }
        if let Some(p) = &self.prep {
            p.target_parameters()?;
        }
        if self.noise.samples > 0 {
            self.noise_config().validate()?;
        }
        self.decoherence.rates().validate()?;
        if self.decoherence.input_state.len() != self.logical_dim() {
            return Err(Error::Configuration(format!(
                "decoherence.input_state needs {} amplitudes",
                self.logical_dim()
            )));
        }
        if let Some(s) = &self.spectrum {
            if s.points == 0 || s.g_max_dimensionless < s.g_min_dimensionless {
                return Err(Error::Configuration("spectrum sweep needs points >= 1 and g_max >= g_min".into()));
            }
        }
        if let Some(s) = &self.sweep {
            if s.axes.is_empty() || s.axes.iter().any(|a| a.keys.is_empty() || a.values.is_empty()) {
                return Err(Error::Configuration("every sweep axis needs keys and values".into()));
            }
        }
        self.model()?;
        Ok(())
    }

    fn logical_dim(&self) -> usize {
        match &self.gate {
            Some(g) if g.kind == GateKind::Two => 4,
            _ => 2,
        }
    }

    /// The untuned model at the configured coupling.
    pub fn base_model(&self) -> Result<RabiModel> {
        let m = &self.model;
        let cutoff = m
            .fock_cutoff
            .unwrap_or(if m.omega_c.len() == 1 { DEFAULT_CUTOFF } else { DEFAULT_BIMODAL_CUTOFF });
        let w1 = TWO_PI * m.omega_c[0];
        let modes = m
            .omega_c
            .iter()
            .zip(&m.g_ratio)
            .map(|(&w, &g)| CavityMode { omega: TWO_PI * w, g: g * w1, cutoff })
            .collect();
        RabiModel::new(modes, TWO_PI * m.omega_q)
    }

    /// Model with ω_μ set explicitly or tuned to the schedule.
    pub fn model(&self) -> Result<RabiModel> {
        let base = self.base_model()?;
        match self.model.omega_mu {
            Some(w) => Ok(base.with_omega_mu(TWO_PI * w)),
            None => base.tuned(self.schedule.m, self.tuned_k_max()),
        }
    }

    fn tuned_k_max(&self) -> usize {
        match &self.prep {
            Some(p) => self.prep_k_max(p),
            None => self.schedule.k_max,
        }
    }

    fn prep_k_max(&self, p: &PrepConfig) -> usize {
        p.target_parameters()
            .map(|(_, eps)| eps.iter().map(|e| e.0).max().unwrap_or(0))
            .unwrap_or(self.schedule.k_max)
    }

    pub fn noise_config(&self) -> NoiseConfig {
        NoiseConfig {
            delta_i: self.noise.delta_i_dimensionless,
            snr: self.noise.snr_dimensionless,
            snr_db: self.noise.snr_db,
            samples: self.noise.samples,
            seed: self.seed,
        }
    }

    /// Copy with dotted-path keys set to `value`.
    pub fn with_overrides(&self, keys: &[String], value: f64) -> Result<Self> {
        let mut doc = toml::Value::try_from(self).map_err(|e| Error::Configuration(e.to_string()))?;
        for key in keys {
            set_path(&mut doc, key, value)?;
        }
        let cfg: Self = doc.try_into()?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn set_path(doc: &mut toml::Value, key: &str, value: f64) -> Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().ok_or_else(|| Error::Configuration("empty sweep key".into()))?;
    let mut node = doc;
    for p in parts {
        let table = node
            .as_table_mut()
            .ok_or_else(|| Error::Configuration(format!("sweep key {key}: {p} is not a table")))?;
        node = table
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::map::Map::new()));
    }
    let table = node
        .as_table_mut()
        .ok_or_else(|| Error::Configuration(format!("sweep key {key} does not name a table entry")))?;
    let new = match table.get(last) {
        Some(toml::Value::Integer(_)) if value.fract() == 0.0 => toml::Value::Integer(value as i64),
        Some(toml::Value::Array(a)) => toml::Value::Array(vec![toml::Value::Float(value); a.len()]),
        _ => toml::Value::Float(value),
    };
    table.insert(last.to_string(), new);
    Ok(())
}

/// Shipped presets as (name, TOML text).
pub const PRESETS: &[(&str, &str)] = &[
    ("fig1a", include_str!("../presets/fig1a.toml")),
    ("fig1b", include_str!("../presets/fig1b.toml")),
    ("fig2", include_str!("../presets/fig2.toml")),
    ("fig3b", include_str!("../presets/fig3b.toml")),
    ("fig4a", include_str!("../presets/fig4a.toml")),
    ("fig4b", include_str!("../presets/fig4b.toml")),
    ("fig5a", include_str!("../presets/fig5a.toml")),
    ("fig5b", include_str!("../presets/fig5b.toml")),
    ("fig6", include_str!("../presets/fig6.toml")),
    ("hadamard-T150", include_str!("../presets/hadamard-T150.toml")),
    ("hadamard-T35-pulses", include_str!("../presets/hadamard-T35-pulses.toml")),
    ("cnot-T750", include_str!("../presets/cnot-T750.toml")),
    ("table1-cnot", include_str!("../presets/table1-cnot.toml")),
    ("table1-swap", include_str!("../presets/table1-swap.toml")),
    ("table1-sqrtswap", include_str!("../presets/table1-sqrtswap.toml")),
    ("table2-2010-tl", include_str!("../presets/table2-2010-tl.toml")),
    ("table2-2010-le", include_str!("../presets/table2-2010-le.toml")),
    ("table2-2017-le134", include_str!("../presets/table2-2017-le134.toml")),
    ("table2-2017-le086", include_str!("../presets/table2-2017-le086.toml")),
    ("table2-2017-tr", include_str!("../presets/table2-2017-tr.toml")),
    ("table2-2018-le", include_str!("../presets/table2-2018-le.toml")),
];

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let text = PRESETS
        .iter()
        .find(|p| p.0 == name)
        .map(|p| p.1)
        .ok_or_else(|| Error::Configuration(format!("unknown preset {name}")))?;
    ExperimentConfig::from_toml(text)
}
