//! Invariant-based pulse synthesis.
//!
//! Gate schedules follow φ = π sin²(πt/T), β = (4/3)sin³φ − 2Θ_s·[t ≥ T/2].
//! The effective drive Ξe^{iφ₂} = Ω_s + iΩ_p moves the system along the
//! invariant eigenpath cos(φ/2)|b⟩ − e^{iβ}sin(φ/2)|ζ⟩ under
//! H_eff = (Ξ/2)(e^{iφ₂}|μ⟩|b⟩⟨ζ| + h.c.).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::codes::GateSpec;
use crate::error::{Error, Result};
use crate::linalg::{c64, cis, CMatrix};
use crate::ode::{Dopri5, OdeOptions};
use crate::rabi::{drive_frequencies, DressedSpectrum};

/// Default number of uniform samples per schedule.
pub const DEFAULT_GRID_POINTS: usize = 4001;
/// Coefficients below this magnitude make synthesis singular.
pub const SINGULAR_COEFF: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AuxKind {
    /// Sensitivity-nulling holonomic gate.
    Gate { theta_s: f64 },
    /// β = 0 then −2Θ_s at T/2 with no sin³ shaping. Implements the same
    /// gate but is first-order sensitive to amplitude errors.
    Stepped { theta_s: f64 },
    /// Logistic β̃ and Gaussian φ̃ for state preparation.
    Prep { beta_f: f64, phi0: f64, tau: f64, tau_c: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxiliarySchedule {
    pub t_f: f64,
    pub kind: AuxKind,
}

/// Auxiliary angles and their time derivatives at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuxPoint {
    pub phi: f64,
    pub dphi: f64,
    pub beta: f64,
    pub dbeta: f64,
}

impl AuxiliarySchedule {
    pub fn gate(theta_s: f64, t_f: f64) -> Result<Self> {
        check_duration(t_f)?;
        Ok(Self { t_f, kind: AuxKind::Gate { theta_s } })
    }

    pub fn stepped(theta_s: f64, t_f: f64) -> Result<Self> {
        check_duration(t_f)?;
        Ok(Self { t_f, kind: AuxKind::Stepped { theta_s } })
    }

    /// Prep schedule with the default shape (φ̃₀, τ, τ_c) = (π/5, 0.115T, 0.3T).
    pub fn prep(beta_f: f64, t_f: f64) -> Result<Self> {
        check_duration(t_f)?;
        Ok(Self {
            t_f,
            kind: AuxKind::Prep { beta_f, phi0: PI / 5.0, tau: 0.115 * t_f, tau_c: 0.3 * t_f },
        })
    }

    pub fn is_gate(&self) -> bool {
        !matches!(self.kind, AuxKind::Prep { .. })
    }

    pub fn theta_s(&self) -> Option<f64> {
        match self.kind {
            AuxKind::Gate { theta_s } | AuxKind::Stepped { theta_s } => Some(theta_s),
            AuxKind::Prep { .. } => None,
        }
    }

    /// Evaluate on the branch containing `t`; T/2 belongs to the second half.
    pub fn at(&self, t: f64) -> AuxPoint {
        self.eval(t, t >= 0.5 * self.t_f)
    }

    /// Evaluate with an explicit branch choice, for the left and right
    /// limits at T/2.
    pub fn eval(&self, t: f64, second_half: bool) -> AuxPoint {
        let t_f = self.t_f;
        match self.kind {
            AuxKind::Gate { theta_s } | AuxKind::Stepped { theta_s } => {
                let w = PI / t_f;
                let s = (w * t).sin();
                let phi = PI * s * s;
                let dphi = PI * w * (2.0 * w * t).sin();
                let shift = if second_half { -2.0 * theta_s } else { 0.0 };
                if matches!(self.kind, AuxKind::Gate { .. }) {
                    let (sp, cp) = phi.sin_cos();
                    AuxPoint {
                        phi,
                        dphi,
                        beta: 4.0 / 3.0 * sp.powi(3) + shift,
                        dbeta: 4.0 * sp * sp * cp * dphi,
                    }
                } else {
                    AuxPoint { phi, dphi, beta: shift, dbeta: 0.0 }
                }
            }
            AuxKind::Prep { beta_f, phi0, tau, tau_c } => {
                let x = t - 0.5 * t_f;
                let sig = 1.0 / (1.0 + (-x / tau).exp());
                let g = (-(x / tau_c).powi(2)).exp();
                AuxPoint {
                    phi: phi0 * g,
                    dphi: -2.0 * x / (tau_c * tau_c) * phi0 * g,
                    beta: beta_f * sig,
                    dbeta: beta_f * sig * (1.0 - sig) / tau,
                }
            }
        }
    }

    /// β̇·tanφ for gate kinds, evaluated without dividing by cosφ.
    fn dbeta_tan(&self, p: &AuxPoint) -> f64 {
        match self.kind {
            AuxKind::Gate { .. } => 4.0 * p.phi.sin().powi(3) * p.dphi,
            _ => 0.0,
        }
    }

    /// Sample times: `n` uniform points with T/2 listed twice (left then right).
    pub fn grid(&self, n: usize) -> Vec<GridPoint> {
        let n = n.max(3);
        let half = 0.5 * self.t_f;
        let mut out = Vec::with_capacity(n + 2);
        let mut placed_half = false;
        for i in 0..n {
            let t = if i == n - 1 { self.t_f } else { self.t_f * i as f64 / (n - 1) as f64 };
            if !placed_half && t >= half - 1e-12 * self.t_f {
                out.push(GridPoint { t: half, second_half: false });
                out.push(GridPoint { t: half, second_half: true });
                placed_half = true;
                if (t - half).abs() <= 1e-12 * self.t_f {
                    continue;
                }
            }
            out.push(GridPoint { t, second_half: t >= half });
        }
        out
    }
}

fn check_duration(t_f: f64) -> Result<()> {
    if t_f > 0.0 && t_f.is_finite() {
        Ok(())
    } else {
        Err(Error::Configuration(format!("schedule duration {t_f} ns must be > 0")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub t: f64,
    pub second_half: bool,
}

/// (Ω_p, Ω_s) at a point.
///
/// Gate kinds use Ω_p = φ̇cosβ − β̇tanφ·sinβ, Ω_s = β̇tanφ·cosβ + φ̇sinβ, which
/// are finite everywhere. Prep uses Ω_p = 2(β̇cotφ·sinβ + φ̇cosβ),
/// Ω_s = 2(β̇cotφ·cosβ − φ̇sinβ); φ̃ never reaches zero.
pub fn omega_p_omega_s(aux: &AuxiliarySchedule, p: &AuxPoint) -> (f64, f64) {
    let (sb, cb) = p.beta.sin_cos();
    match aux.kind {
        AuxKind::Prep { .. } => {
            let bc = p.dbeta / p.phi.tan();
            (2.0 * (bc * sb + p.dphi * cb), 2.0 * (bc * cb - p.dphi * sb))
        }
        _ => {
            let bt = aux.dbeta_tan(p);
            (p.dphi * cb - bt * sb, bt * cb + p.dphi * sb)
        }
    }
}

/// Ξe^{iφ₂} = Ω_s + iΩ_p.
pub fn effective_drive_at(aux: &AuxiliarySchedule, p: &AuxPoint) -> C64 {
    let (op, os) = omega_p_omega_s(aux, p);
    C64::new(os, op)
}

/// Ξ and φ₂ sampled on a grid, φ₂ unwrapped within each half.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveDrive {
    pub t: Vec<f64>,
    pub xi: Vec<f64>,
    pub phi2: Vec<f64>,
}

pub fn effective_drive(aux: &AuxiliarySchedule, grid: &[GridPoint]) -> EffectiveDrive {
    let mut out = EffectiveDrive { t: vec![], xi: vec![], phi2: vec![] };
    let mut prev: Option<(bool, f64)> = None;
    for gp in grid {
        let p = aux.eval(gp.t, gp.second_half);
        let z = effective_drive_at(aux, &p);
        let mut ph = phi2_at(aux, &p, gp.second_half, z);
        if let Some((side, last)) = prev {
            if side == gp.second_half {
                ph = unwrap_near(ph, last);
            }
        }
        prev = Some((gp.second_half, ph));
        out.t.push(gp.t);
        out.xi.push(z.norm());
        out.phi2.push(ph);
    }
    out
}

/// φ₂ including the limits where Ξ vanishes. For gate kinds
/// Ξe^{iφ₂} = e^{−iβ}(β̇tanφ + iφ̇) with β̇tanφ = 4sin³φ·φ̇ sharing the sign of
/// φ̇, which is positive on the first half and negative on the second.
fn phi2_at(aux: &AuxiliarySchedule, p: &AuxPoint, second_half: bool, z: C64) -> f64 {
    let ratio = match aux.kind {
        AuxKind::Gate { .. } => 4.0 * p.phi.sin().powi(3),
        AuxKind::Stepped { .. } => 0.0,
        AuxKind::Prep { .. } => return z.arg(),
    };
    let s: f64 = if second_half { -1.0 } else { 1.0 };
    s.atan2(s * ratio) - p.beta
}

fn unwrap_near(ph: f64, reference: f64) -> f64 {
    ph + 2.0 * PI * ((reference - ph) / (2.0 * PI)).round()
}

/// Which auxiliary combination a tone carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Envelope {
    /// Ξe^{iφ₂}.
    Effective,
    /// Ω_p (prep pump on |μ,0⟩).
    Pump,
    /// Ω_s (prep Stokes tones).
    Stokes,
}

/// One drive tone Ω_k cos(ω_k t + φ_k). Its complex envelope is
/// Ω_k e^{iφ_k} = gain·e^{i·phase_offset}·(envelope value).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tone {
    /// Photon number(s) of the |μ, k⟩ level the tone addresses.
    pub k: Vec<usize>,
    /// Carrier frequency ω_k (rad/ns).
    pub omega: f64,
    /// Signed amplitude factor; the intended coupling is c_k·Ω_k.
    pub gain: f64,
    pub phase_offset: f64,
    pub envelope: Envelope,
}

impl Tone {
    pub fn label(&self) -> String {
        self.k.iter().map(|k| k.to_string()).collect::<Vec<_>>().join("_")
    }
}

/// Additive amplitude noise per tone on a uniform time grid, interpolated
/// linearly in between.
#[derive(Clone, Debug, PartialEq)]
pub struct ToneNoise {
    pub t_f: f64,
    /// values[tone][j] at t_j = j·t_f/(len − 1).
    pub values: Vec<Vec<f64>>,
}

impl ToneNoise {
    fn at(&self, tone: usize, t: f64) -> f64 {
        let v = &self.values[tone];
        let n = v.len();
        if n < 2 {
            return v.first().copied().unwrap_or(0.0);
        }
        let x = (t / self.t_f).clamp(0.0, 1.0) * (n - 1) as f64;
        let j = (x.floor() as usize).min(n - 2);
        let f = x - j as f64;
        v[j] * (1.0 - f) + v[j + 1] * f
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PulseSchedule {
    pub aux: AuxiliarySchedule,
    pub tones: Vec<Tone>,
    /// Intermediate dressed level.
    pub m: usize,
    /// Global amplitude multiplier 1 + δ.
    pub amplitude_scale: f64,
    pub noise: Option<ToneNoise>,
    pub grid_points: usize,
}

impl PulseSchedule {
    pub fn t_f(&self) -> f64 {
        self.aux.t_f
    }

    /// Copy with every amplitude scaled by (1 + δ).
    pub fn with_error(&self, delta: f64) -> Self {
        let mut s = self.clone();
        s.amplitude_scale = 1.0 + delta;
        s
    }

    pub fn with_noise(&self, noise: ToneNoise) -> Self {
        let mut s = self.clone();
        s.noise = Some(noise);
        s
    }

    /// Copy with all amplitudes set to zero.
    pub fn silenced(&self) -> Self {
        let mut s = self.clone();
        s.amplitude_scale = 0.0;
        s.noise = None;
        s
    }

    pub fn grid(&self) -> Vec<GridPoint> {
        self.aux.grid(self.grid_points)
    }

    fn base(&self, p: &AuxPoint, envelope: Envelope) -> C64 {
        match envelope {
            Envelope::Effective => effective_drive_at(&self.aux, p),
            Envelope::Pump => C64::new(omega_p_omega_s(&self.aux, p).0, 0.0),
            Envelope::Stokes => C64::new(omega_p_omega_s(&self.aux, p).1, 0.0),
        }
    }

    /// Signed amplitude Ω_k and phase φ_k of a tone without error or noise.
    pub fn amplitude_phase(&self, tone: usize, t: f64, second_half: bool) -> (f64, f64) {
        let p = self.aux.eval(t, second_half);
        let tn = &self.tones[tone];
        let b = self.base(&p, tn.envelope);
        match tn.envelope {
            Envelope::Effective => (tn.gain * b.norm(), b.arg() + tn.phase_offset),
            _ => (tn.gain * b.re, tn.phase_offset),
        }
    }

    /// Complex envelopes Ω_k e^{iφ_k} at t including error and noise.
    pub fn envelopes_into(&self, t: f64, out: &mut [C64]) {
        let p = self.aux.at(t);
        let mut cache: [Option<C64>; 3] = [None; 3];
        for (i, tn) in self.tones.iter().enumerate() {
            let slot = tn.envelope as usize;
            let b = *cache[slot].get_or_insert_with(|| self.base(&p, tn.envelope));
            let mut env = b * tn.gain * cis(tn.phase_offset);
            if let Some(noise) = &self.noise {
                let n = noise.at(i, t);
                let unit = if b.norm() > 0.0 { b / b.norm() } else { C64::new(1.0, 0.0) };
                let sign = if tn.envelope == Envelope::Effective { 1.0 } else { b.re.signum() };
                env += unit * sign * n * cis(tn.phase_offset);
            }
            out[i] = env * self.amplitude_scale;
        }
    }

    pub fn envelopes(&self, t: f64) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.tones.len()];
        self.envelopes_into(t, &mut v);
        v
    }

    /// Lab-frame drive Ω(t) = Σ_k Ω_k cos(ω_k t + φ_k).
    pub fn drive(&self, t: f64) -> f64 {
        self.envelopes(t)
            .iter()
            .zip(&self.tones)
            .map(|(e, tn)| (e * cis(tn.omega * t)).re)
            .sum()
    }

    /// Largest |Ω_k| per tone over the grid, including the amplitude scale.
    pub fn peak_amplitudes(&self) -> Vec<f64> {
        let grid = self.grid();
        (0..self.tones.len())
            .map(|k| {
                grid.iter()
                    .map(|g| self.amplitude_phase(k, g.t, g.second_half).0.abs())
                    .fold(0.0, f64::max)
                    * self.amplitude_scale.abs()
            })
            .collect()
    }

    /// Per-grid-point amplitude and phase traces for export.
    pub fn traces(&self) -> PulseTraces {
        let grid = self.grid();
        let drive = effective_drive(&self.aux, &grid);
        let mut amplitude = vec![Vec::with_capacity(grid.len()); self.tones.len()];
        let mut phase = vec![Vec::with_capacity(grid.len()); self.tones.len()];
        for (j, g) in grid.iter().enumerate() {
            for k in 0..self.tones.len() {
                let (a, ph) = self.amplitude_phase(k, g.t, g.second_half);
                amplitude[k].push(a * self.amplitude_scale);
                let ph = match self.tones[k].envelope {
                    Envelope::Effective => drive.phi2[j] + self.tones[k].phase_offset,
                    _ => ph,
                };
                phase[k].push(ph);
            }
        }
        PulseTraces { t: drive.t.clone(), xi: drive.xi, phi2: drive.phi2, amplitude, phase }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PulseTraces {
    pub t: Vec<f64>,
    pub xi: Vec<f64>,
    pub phi2: Vec<f64>,
    pub amplitude: Vec<Vec<f64>>,
    pub phase: Vec<Vec<f64>>,
}

fn coefficient(spectrum: &DressedSpectrum, m: usize, k: &[usize]) -> Result<f64> {
    if k.iter().zip(&spectrum.layout.fock_cutoffs).any(|(&n, &c)| n >= c) {
        return Err(Error::Configuration(format!("photon number {k:?} beyond cutoff")));
    }
    let c = spectrum.c(m, k);
    if c.abs() < SINGULAR_COEFF {
        let idx = k.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        return Err(Error::SingularSynthesis { name: format!("c_{{{idx}}}^{m}"), value: c });
    }
    Ok(c)
}

fn tones_from(
    spectrum: &DressedSpectrum,
    m: usize,
    plan: Vec<(Vec<usize>, f64, f64, Envelope)>,
) -> Result<Vec<Tone>> {
    let ks: Vec<Vec<usize>> = plan.iter().map(|p| p.0.clone()).collect();
    let omegas = drive_frequencies(spectrum, m, &ks)?;
    plan.into_iter()
        .zip(omegas)
        .map(|((k, weight, offset, envelope), omega)| {
            let c = coefficient(spectrum, m, &k)?;
            Ok(Tone { k, omega, gain: weight / c, phase_offset: offset, envelope })
        })
        .collect()
}

/// Three tones k ∈ {0, 2, 4} coupling cos(θ/2)|0̃⟩ + e^{−iφ}sin(θ/2)|1̃⟩ to ζ_m:
/// c_0Ω_0 = c_4Ω_4 = Ξcos(θ/2)/√2, c_2Ω_2 = Ξsin(θ/2), φ_0 = φ_4 = φ₂ + φ,
/// φ_2 = φ₂.
pub fn synthesize_single_qubit(
    spec: &GateSpec,
    spectrum: &DressedSpectrum,
    m: usize,
    t_f: f64,
) -> Result<PulseSchedule> {
    let GateSpec::Single { theta_s, theta, phi } = *spec else {
        return Err(Error::InvalidTarget("single-qubit synthesis needs a single-qubit spec".into()));
    };
    spec.validate()?;
    if spectrum.mode_omegas.len() != 1 {
        return Err(Error::Configuration("single-qubit synthesis needs a single-mode spectrum".into()));
    }
    let (s, c) = (theta / 2.0).sin_cos();
    let plan = vec![
        (vec![0], c * FRAC_1_SQRT_2, phi, Envelope::Effective),
        (vec![2], s, 0.0, Envelope::Effective),
        (vec![4], c * FRAC_1_SQRT_2, phi, Envelope::Effective),
    ];
    Ok(PulseSchedule {
        aux: AuxiliarySchedule::gate(theta_s, t_f)?,
        tones: tones_from(spectrum, m, plan)?,
        m,
        amplitude_scale: 1.0,
        noise: None,
        grid_points: DEFAULT_GRID_POINTS,
    })
}

/// Nine tones (k_a, k_b) ∈ {0, 2, 4}² coupling |b′⟩ to ζ′_m with
/// Ξ′₀e^{iφ₂} = Ω_s + iΩ_p.
pub fn synthesize_two_qubit(
    spec: &GateSpec,
    spectrum: &DressedSpectrum,
    m: usize,
    t_f: f64,
) -> Result<PulseSchedule> {
    let GateSpec::Two { theta_s, theta0, theta1, theta2, phi } = *spec else {
        return Err(Error::InvalidTarget("two-qubit synthesis needs a two-qubit spec".into()));
    };
    spec.validate()?;
    if spectrum.mode_omegas.len() != 2 {
        return Err(Error::Configuration("two-qubit synthesis needs a bimodal spectrum".into()));
    }
    let (s0, c0) = (theta0 / 2.0).sin_cos();
    let (s1, c1) = (theta1 / 2.0).sin_cos();
    let (s2, c2) = (theta2 / 2.0).sin_cos();
    // weights are Ξ_xy / Ξ′ divided by the Fock multiplicity of each logical word
    let w00 = c0 * c1 / 2.0;
    let w01 = c0 * s1 * FRAC_1_SQRT_2;
    let w10 = s0 * c2 * FRAC_1_SQRT_2;
    let w11 = s0 * s2;
    let mut plan = Vec::with_capacity(9);
    for ka in [0usize, 2, 4] {
        for kb in [0usize, 2, 4] {
            let (w, off) = match (ka == 2, kb == 2) {
                (false, false) => (w00, 0.0),
                (false, true) => (w01, phi),
                (true, false) => (w10, phi),
                (true, true) => (w11, phi),
            };
            plan.push((vec![ka, kb], w, off, Envelope::Effective));
        }
    }
    Ok(PulseSchedule {
        aux: AuxiliarySchedule::gate(theta_s, t_f)?,
        tones: tones_from(spectrum, m, plan)?,
        m,
        amplitude_scale: 1.0,
        noise: None,
        grid_points: DEFAULT_GRID_POINTS,
    })
}

/// Prep schedule: c_0Ω_0 = Ω_p (φ_0 = 0) and c_{k′}Ω_{k′} = ε_{k′}Ω_s (φ_{k′} = π),
/// steering |μ,0⟩ to cosβ̃_f|0⟩ + sinβ̃_f Σ ε_{k′}|k′⟩.
pub fn prep_schedule(
    beta_f: f64,
    epsilons: &[(usize, f64)],
    t_f: f64,
    spectrum: &DressedSpectrum,
    m: usize,
) -> Result<PulseSchedule> {
    if epsilons.is_empty() {
        return Err(Error::InvalidTarget("prep needs at least one epsilon".into()));
    }
    let norm: f64 = epsilons.iter().map(|e| e.1 * e.1).sum();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidTarget(format!("sum |epsilon|^2 = {norm}, expected 1")));
    }
    if epsilons.iter().any(|e| e.0 == 0 || e.0 % 2 == 1) {
        return Err(Error::InvalidTarget("epsilon indices must be even and nonzero".into()));
    }
    if spectrum.mode_omegas.len() != 1 {
        return Err(Error::Configuration("prep needs a single-mode spectrum".into()));
    }
    let mut plan = vec![(vec![0], 1.0, 0.0, Envelope::Pump)];
    for &(k, e) in epsilons {
        plan.push((vec![k], e, PI, Envelope::Stokes));
    }
    Ok(PulseSchedule {
        aux: AuxiliarySchedule::prep(beta_f, t_f)?,
        tones: tones_from(spectrum, m, plan)?,
        m,
        amplitude_scale: 1.0,
        noise: None,
        grid_points: DEFAULT_GRID_POINTS,
    })
}

/// β̃_f and ε for (|0̃⟩ + √2|1̃⟩)/√3.
pub fn superposition_target() -> (f64, Vec<(usize, f64)>) {
    ((1.0f64 / 6.0).sqrt().acos(), vec![(2, 2.0 / 5f64.sqrt()), (4, 1.0 / 5f64.sqrt())])
}

/// β̃_f and ε for the even cat of amplitude η truncated to k′ ≤ k_max.
///
/// ε_{k′} ∝ η^{k′}cotβ̃_f/√(k′!), renormalised over the retained k′.
pub fn cat_target(eta: f64, k_max: usize) -> (f64, Vec<(usize, f64)>) {
    let beta_f = (1.0 / (eta * eta).cosh()).sqrt().acos();
    let cot = 1.0 / beta_f.tan();
    let mut eps: Vec<(usize, f64)> = (1..=k_max / 2)
        .map(|j| {
            let k = 2 * j;
            (k, eta.powi(k as i32) * cot / factorial(k).sqrt())
        })
        .collect();
    let norm = eps.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt();
    for e in &mut eps {
        e.1 /= norm;
    }
    (beta_f, eps)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Dynamic and geometric phases of the ψ_− eigenpath.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseTraces {
    pub t: Vec<f64>,
    pub theta_dyn: Vec<f64>,
    pub theta_geo: Vec<f64>,
    /// R_− = ϑ_− + Θ_−.
    pub r: Vec<f64>,
}

impl PhaseTraces {
    pub fn final_dynamic(&self) -> f64 {
        *self.theta_dyn.last().unwrap_or(&0.0)
    }

    pub fn final_geometric(&self) -> f64 {
        *self.theta_geo.last().unwrap_or(&0.0)
    }
}

const PHASE_OPTS: OdeOptions = OdeOptions { rtol: 1e-12, atol: 1e-14, h_max: None, max_steps: 10_000_000 };

/// ϑ̇_− = (β̇/2)sinφ·tanφ, Θ̇_− = −(β̇/2)(1 − cosφ), integrated on each half
/// with the β step at T/2 contributing its delta-function share.
pub fn lewis_riesenfeld_phases(aux: &AuxiliarySchedule, grid_points: usize) -> Result<PhaseTraces> {
    if !aux.is_gate() {
        return Err(Error::Configuration("Lewis-Riesenfeld phases need a gate schedule".into()));
    }
    let grid = aux.grid(grid_points);
    let mut f = |t: f64, _y: &[C64], dy: &mut [C64]| {
        let p = aux.at(t);
        // β̇ sinφ tanφ = β̇tanφ · sinφ, finite through φ = π/2
        let bt = aux.dbeta_tan(&p);
        dy[0] = C64::new(0.5 * bt * p.phi.sin(), 0.0);
        dy[1] = C64::new(-0.5 * p.dbeta * (1.0 - p.phi.cos()), 0.0);
    };
    let mut y = vec![C64::new(0.0, 0.0); 2];
    let mut ode = Dopri5::new(2, PHASE_OPTS);
    let mut out = PhaseTraces { t: vec![], theta_dyn: vec![], theta_geo: vec![], r: vec![] };
    let mut prev: Option<GridPoint> = None;
    for g in &grid {
        if let Some(pg) = prev {
            if pg.t == g.t && !pg.second_half && g.second_half {
                let (dd, dg) = jump_contribution(aux);
                y[0] += dd;
                y[1] += dg;
            } else {
                ode.advance(&mut f, pg.t, g.t, &mut y)?;
            }
        }
        out.t.push(g.t);
        out.theta_dyn.push(y[0].re);
        out.theta_geo.push(y[1].re);
        out.r.push(y[0].re + y[1].re);
        prev = Some(*g);
    }
    if ode.stats.max_error > 1.0 {
        return Err(Error::Numeric(format!("phase quadrature error {:e}", ode.stats.max_error)));
    }
    Ok(out)
}

/// Largest entry of ∂_tI − i[I, H_eff] over a grid, with I = −cosφ σ_z +
/// sinφ(e^{−iβ}|b⟩⟨ζ| + h.c.) and H_eff = ½(Ξe^{iφ₂}|b⟩⟨ζ| + h.c.); the time
/// derivative is a central difference kept inside each half. Returns
/// (residual, max Ξ).
pub fn invariant_residual(aux: &AuxiliarySchedule, grid_points: usize) -> Result<(f64, f64)> {
    if !aux.is_gate() {
        return Err(Error::Configuration("invariant residual needs a gate schedule".into()));
    }
    let inv = |t: f64, second: bool| {
        let p = aux.eval(t, second);
        let (s, c) = p.phi.sin_cos();
        CMatrix::from_row_slice(2, 2, &[c64(-c, 0.0), cis(-p.beta) * s, cis(p.beta) * s, c64(c, 0.0)])
    };
    let ham = |t: f64, second: bool| {
        let z = effective_drive_at(aux, &aux.eval(t, second)) * 0.5;
        CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), z, z.conj(), c64(0.0, 0.0)])
    };
    let grid = aux.grid(grid_points);
    let xi_max = effective_drive(aux, &grid).xi.iter().cloned().fold(0.0, f64::max);
    let (t_f, half) = (aux.t_f, 0.5 * aux.t_f);
    let h = 1e-5 * t_f / 35.0;
    let mut worst: f64 = 0.0;
    for g in grid.iter().filter(|g| g.t > h && g.t < t_f - h && (g.t - half).abs() > h) {
        let d = (inv(g.t + h, g.second_half) - inv(g.t - h, g.second_half)) / c64(2.0 * h, 0.0);
        let i = inv(g.t, g.second_half);
        let hh = ham(g.t, g.second_half);
        let rhs = (&i * &hh - &hh * &i) * c64(0.0, 1.0);
        worst = worst.max((d - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    Ok((worst, xi_max))
}

/// Phase increments (Δϑ_−, ΔΘ_−) from the β step at T/2.
fn jump_contribution(aux: &AuxiliarySchedule) -> (f64, f64) {
    let half = 0.5 * aux.t_f;
    let left = aux.eval(half, false);
    let right = aux.eval(half, true);
    let db = right.beta - left.beta;
    let phi = left.phi;
    // sinφ·tanφ with φ = π exactly is zero; avoid tan(π) round-off
    let sin_tan = if (phi - PI).abs() < 1e-12 { 0.0 } else { phi.sin() * phi.tan() };
    (0.5 * db * sin_tan, -0.5 * db * (1.0 - phi.cos()))
}

/// q_i = |∫ e^{iβ + 2iR_−} φ̇ sin²φ dt|², split at T/2.
pub fn sensitivity_integral(aux: &AuxiliarySchedule) -> Result<C64> {
    if !aux.is_gate() {
        return Err(Error::Configuration("sensitivity needs a gate schedule".into()));
    }
    let half = 0.5 * aux.t_f;
    let mut y = vec![C64::new(0.0, 0.0); 2];
    let mut ode = Dopri5::new(2, PHASE_OPTS);
    for (a, b, second) in [(0.0, half, false), (half, aux.t_f, true)] {
        let mut f = |t: f64, y: &[C64], dy: &mut [C64]| {
            let p = aux.eval(t, second);
            let bt = aux.dbeta_tan(&p);
            let dr = 0.5 * bt * p.phi.sin() - 0.5 * p.dbeta * (1.0 - p.phi.cos());
            dy[0] = C64::new(dr, 0.0);
            dy[1] = cis(p.beta + 2.0 * y[0].re) * (p.dphi * p.phi.sin().powi(2));
        };
        if second {
            let (dd, dg) = jump_contribution(aux);
            y[0] += dd + dg;
        }
        ode.advance(&mut f, a, b, &mut y)?;
    }
    Ok(y[1])
}

/// Result of the rotating-wave validity check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RwaReport {
    pub pass: bool,
    pub ratio_max: f64,
    /// Largest c·Ω_max/|Δ| found.
    pub worst_ratio: f64,
    pub worst: Option<RwaTransition>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RwaTransition {
    pub tone: Vec<usize>,
    pub dressed_level: usize,
    pub fock: Vec<usize>,
    pub detuning: f64,
    pub coupling: f64,
    pub counter_rotating: bool,
}

/// For each tone k, dressed level m′ ≤ `max_level` and μ-sector Fock state n,
/// compare c_n^{m′}·max Ω_k with the detuning of |μ,n⟩ ↔ ζ_{m′} from the tone,
/// Δ = E_{m′} − ω_μ − Σ n_i ω_i − ω_k, and with its counter-rotating partner
/// Δ + 2ω_k. The resonant (m′ = m, n = k) transition is skipped.
pub fn rwa_check(
    schedule: &PulseSchedule,
    spectrum: &DressedSpectrum,
    ratio_max: f64,
    max_level: usize,
) -> RwaReport {
    rwa_check_scoped(schedule, spectrum, ratio_max, max_level, RwaScope::All)
}

/// Which transitions the rotating-wave check inspects.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RwaScope {
    /// Every retained |μ,n⟩ ↔ ζ_{m′} pair.
    All,
    /// Only pairs touching a state the schedule can populate: an addressed
    /// |μ,k⟩ or the intermediate ζ_m.
    #[default]
    Populated,
}

pub fn rwa_check_scoped(
    schedule: &PulseSchedule,
    spectrum: &DressedSpectrum,
    ratio_max: f64,
    max_level: usize,
    scope: RwaScope,
) -> RwaReport {
    let peaks = schedule.peak_amplitudes();
    let nc = spectrum.layout.cavity_dim();
    let addressed: Vec<usize> = schedule.tones.iter().map(|t| spectrum.layout.fock_index(&t.k)).collect();
    let mut worst_ratio = 0.0;
    let mut worst = None;
    for (tone, peak) in schedule.tones.iter().zip(&peaks) {
        let k_idx = spectrum.layout.fock_index(&tone.k);
        for mp in 0..=max_level.min(spectrum.dressed_count() - 1) {
            for n in 0..nc {
                if mp == schedule.m && n == k_idx {
                    continue;
                }
                if scope == RwaScope::Populated && mp != schedule.m && !addressed.contains(&n) {
                    continue;
                }
                let c = spectrum.c_coeffs[mp][n].abs();
                if c == 0.0 {
                    continue;
                }
                let det = spectrum.energies[mp] - spectrum.mu_energies[n] - tone.omega;
                for (d, counter) in [(det, false), (det + 2.0 * tone.omega, true)] {
                    let ratio = c * peak / d.abs();
                    if ratio > worst_ratio {
                        worst_ratio = ratio;
                        worst = Some(RwaTransition {
                            tone: tone.k.clone(),
                            dressed_level: mp,
                            fock: spectrum.layout.fock_numbers(n),
                            detuning: d,
                            coupling: c * peak,
                            counter_rotating: counter,
                        });
                    }
                }
            }
        }
    }
    RwaReport { pass: worst_ratio <= ratio_max, ratio_max, worst_ratio, worst }
}
