//! Gate and state metrics: average gate fidelity, output-state fidelity,
//! systematic-error and AWGN studies, Fock populations and Wigner functions.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::{binomial_codewords, target_unitary, two_mode_basis, GateSpec};
use crate::dynamics::{
    extract_propagator, propagate_master, DecoherenceRates, PropagationOptions, System,
};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, HilbertLayout, MU};
use crate::pulse::{sensitivity_integral, synthesize_single_qubit, synthesize_two_qubit, AuxiliarySchedule, PulseSchedule, ToneNoise};
use crate::rabi::RabiModel;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FidelityReport {
    pub f_bar: f64,
    pub f_out: Option<f64>,
    /// Subspace dimension D.
    pub dim: usize,
    /// Tr(MM†).
    pub trace_mm: f64,
    /// |Tr M|².
    pub trace_m_sq: f64,
    /// 1 − Tr(MM†)/D.
    pub leakage: f64,
}

/// F̄ = [Tr(MM†) + |Tr M|²]/(D² + D) with M = P U_T† U P.
pub fn average_gate_fidelity(u_actual: &CMatrix, u_target: &CMatrix, projector: &CMatrix) -> Result<FidelityReport> {
    let n = projector.nrows();
    for m in [u_actual, u_target, projector] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::Contract(format!("matrix shape {}x{} does not match projector {n}x{n}", m.nrows(), m.ncols())));
        }
    }
    let idem = linalg::max_abs(&(projector * projector - projector));
    let herm = linalg::hermiticity_defect(projector);
    if idem > 1e-10 || herm > 1e-10 {
        return Err(Error::Contract(format!("projector not idempotent/Hermitian ({idem:e}, {herm:e})")));
    }
    let d = projector.trace().re.round() as usize;
    if d == 0 {
        return Err(Error::Contract("projector has rank 0".into()));
    }
    let m = projector * u_target.adjoint() * u_actual * projector;
    let trace_mm = (&m * m.adjoint()).trace().re;
    let trace_m_sq = m.trace().norm_sqr();
    let df = d as f64;
    Ok(FidelityReport {
        f_bar: (trace_mm + trace_m_sq) / (df * df + df),
        f_out: None,
        dim: d,
        trace_mm,
        trace_m_sq,
        leakage: 1.0 - trace_mm / df,
    })
}

/// F̄ for matrices already restricted to the computational subspace.
pub fn subspace_fidelity(u_actual: &CMatrix, u_target: &CMatrix) -> Result<FidelityReport> {
    let d = u_target.nrows();
    average_gate_fidelity(u_actual, u_target, &CMatrix::identity(d, d))
}

/// ⟨ψ|ρ|ψ⟩.
pub fn state_fidelity(rho: &CMatrix, psi: &CVector) -> f64 {
    (psi.adjoint() * rho * psi)[(0, 0)].re
}

fn random_state<R: rand::Rng>(d: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(d, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let n = v.norm();
    v / C64::new(n, 0.0)
}

/// Monte-Carlo mean of |⟨ψ|U_T†U|ψ⟩|² over Haar-random ψ in the subspace.
pub fn haar_average_fidelity(u_actual: &CMatrix, u_target: &CMatrix, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let m = u_target.adjoint() * u_actual;
    let total: f64 = (0..samples)
        .map(|_| {
            let psi = random_state(m.nrows(), &mut rng);
            linalg::inner(&psi, &(&m * &psi)).norm_sqr()
        })
        .sum();
    total / samples as f64
}

/// A gate to be evaluated: model, drive, logical basis and target.
#[derive(Clone, Debug)]
pub struct GateProblem {
    pub system: System,
    pub spec: GateSpec,
    pub schedule: PulseSchedule,
    /// Logical basis states |μ⟩⊗|L⟩ on the full space.
    pub basis: Vec<CVector>,
    pub target: CMatrix,
}

impl GateProblem {
    pub fn single_qubit(model: RabiModel, spec: GateSpec, m: usize, t_f: f64) -> Result<Self> {
        let system = System::new(model)?;
        let schedule = synthesize_single_qubit(&spec, &system.spectrum, m, t_f)?;
        let code = binomial_codewords(system.layout().fock_cutoffs[0])?;
        let basis = code.basis().iter().map(|c| system.layout().embed(MU, c)).collect();
        let target = target_unitary(&spec);
        Ok(Self { system, spec, schedule, basis, target })
    }

    pub fn two_qubit(model: RabiModel, spec: GateSpec, m: usize, t_f: f64) -> Result<Self> {
        let system = System::new(model)?;
        let schedule = synthesize_two_qubit(&spec, &system.spectrum, m, t_f)?;
        let cut = &system.layout().fock_cutoffs;
        let basis = two_mode_basis(&binomial_codewords(cut[0])?, &binomial_codewords(cut[1])?)
            .iter()
            .map(|c| system.layout().embed(MU, c))
            .collect();
        let target = target_unitary(&spec);
        Ok(Self { system, spec, schedule, basis, target })
    }

    /// Restricted interaction-frame propagator for `schedule`.
    pub fn propagator(&self, schedule: &PulseSchedule, opts: &PropagationOptions) -> Result<CMatrix> {
        extract_propagator(&self.system, schedule, &self.basis, opts)
    }

    pub fn fidelity_of(&self, schedule: &PulseSchedule, opts: &PropagationOptions) -> Result<FidelityReport> {
        subspace_fidelity(&self.propagator(schedule, opts)?, &self.target)
    }

    pub fn fidelity(&self, opts: &PropagationOptions) -> Result<FidelityReport> {
        self.fidelity_of(&self.schedule, opts)
    }

    /// Full-space embedding of a logical state.
    pub fn embed_logical(&self, logical: &CVector) -> CVector {
        self.basis.iter().zip(logical.iter()).fold(CVector::zeros(self.basis[0].len()), |acc, (b, a)| acc + b * *a)
    }

    /// F_out = ⟨ψ_out|ρ(t_f)|ψ_out⟩ with ψ_out = U_T ψ_in, under the master
    /// equation with amplitude error δ.
    pub fn output_fidelity(
        &self,
        logical_in: &CVector,
        rates: &DecoherenceRates,
        delta: f64,
        opts: &PropagationOptions,
    ) -> Result<f64> {
        let psi_in = self.embed_logical(logical_in);
        let psi_out = self.embed_logical(&(&self.target * logical_in));
        let rho0 = &psi_in * psi_in.adjoint();
        let res = propagate_master(&self.system, &self.schedule.with_error(delta), &rho0, rates, opts)?;
        Ok(state_fidelity(&res.final_density(), &psi_out))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub delta: f64,
    pub f_bar: f64,
}

/// F̄(δ) with every amplitude scaled by (1 + δ).
pub fn systematic_error_sweep(problem: &GateProblem, deltas: &[f64], opts: &PropagationOptions) -> Result<Vec<SweepPoint>> {
    deltas
        .par_iter()
        .map(|&delta| {
            let f = problem.fidelity_of(&problem.schedule.with_error(delta), opts)?;
            Ok(SweepPoint { delta, f_bar: f.f_bar })
        })
        .collect()
}

/// q_i = |∫ e^{i(β + 2R_−)} φ̇ sin²φ dt|².
pub fn error_sensitivity(aux: &AuxiliarySchedule) -> Result<f64> {
    Ok(sensitivity_integral(aux)?.norm_sqr())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub delta_i: f64,
    /// Signal-to-noise ratio r (signal power over noise power).
    pub snr: f64,
    /// Interpret `snr` in decibels.
    #[serde(default)]
    pub snr_db: bool,
    pub samples: usize,
    pub seed: u64,
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Configuration("noise samples must be >= 1".into()));
        }
        if !self.snr_db && !(self.snr > 0.0) {
            return Err(Error::Configuration(format!("snr must be > 0, got {}", self.snr)));
        }
        Ok(())
    }

    /// Linear power ratio.
    pub fn power_ratio(&self) -> f64 {
        if self.snr_db {
            10f64.powf(self.snr / 10.0)
        } else {
            self.snr
        }
    }
}

/// White Gaussian noise on every tone's amplitude grid, σ² = ⟨Ω_k²⟩/r.
pub fn awgn_noise(schedule: &PulseSchedule, power_ratio: f64, seed: u64, sample: u64) -> ToneNoise {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(sample);
    let n = schedule.grid_points.max(2);
    let t_f = schedule.t_f();
    let values = (0..schedule.tones.len())
        .map(|k| {
            let clean: Vec<f64> = (0..n)
                .map(|j| {
                    let t = t_f * j as f64 / (n - 1) as f64;
                    schedule.amplitude_phase(k, t, t >= 0.5 * t_f).0
                })
                .collect();
            let power = clean.iter().map(|x| x * x).sum::<f64>() / n as f64;
            let sigma = (power / power_ratio).sqrt();
            let dist = Normal::new(0.0, sigma).unwrap_or(Normal::new(0.0, 0.0).unwrap());
            (0..n).map(|_| dist.sample(&mut rng)).collect()
        })
        .collect();
    ToneNoise { t_f, values }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub fidelities: Vec<f64>,
    pub mean: f64,
    pub stddev: f64,
}

/// Average gate fidelity over independent AWGN realisations; sample i uses
/// stream i of the seeded generator, so the result does not depend on the
/// worker count.
pub fn awgn_monte_carlo(problem: &GateProblem, cfg: &NoiseConfig, opts: &PropagationOptions) -> Result<MonteCarloReport> {
    cfg.validate()?;
    let base = problem.schedule.with_error(cfg.delta_i);
    let r = cfg.power_ratio();
    let fidelities: Vec<f64> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| {
            let noisy = base.with_noise(awgn_noise(&base, r, cfg.seed, i));
            Ok(problem.fidelity_of(&noisy, opts)?.f_bar)
        })
        .collect::<Result<_>>()?;
    let n = fidelities.len() as f64;
    let mean = fidelities.iter().sum::<f64>() / n;
    let var = if fidelities.len() > 1 {
        fidelities.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(MonteCarloReport { fidelities, mean, stddev: var.sqrt() })
}

/// Reduced cavity density matrix Tr_atom ρ.
pub fn reduced_cavity(rho: &CMatrix, layout: &HilbertLayout) -> CMatrix {
    let d = layout.cavity_dim();
    CMatrix::from_fn(d, d, |i, j| (0..3).map(|a| rho[(a * d + i, a * d + j)]).sum())
}

/// P_n = ⟨atom, n|ρ|atom, n⟩ over the flat Fock index n.
pub fn fock_populations(rho: &CMatrix, layout: &HilbertLayout, atom: usize) -> Vec<f64> {
    let d = layout.cavity_dim();
    (0..d).map(|n| rho[(atom * d + n, atom * d + n)].re).collect()
}

pub fn fock_populations_pure(psi: &CVector, layout: &HilbertLayout, atom: usize) -> Vec<f64> {
    let d = layout.cavity_dim();
    (0..d).map(|n| psi[atom * d + n].norm_sqr()).collect()
}

/// Wigner function sampled on a rectangular grid; values[i][j] is at
/// α = re[j] + i·im[i].
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl WignerGrid {
    /// Riemann sum of W over the grid.
    pub fn integral(&self) -> f64 {
        let step = |v: &[f64]| if v.len() > 1 { (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64 } else { 1.0 };
        let area = step(&self.re) * step(&self.im);
        self.values.iter().flatten().sum::<f64>() * area
    }

    pub fn at(&self, i_im: usize, j_re: usize) -> f64 {
        self.values[i_im][j_re]
    }

    /// Long-form CSV with columns alpha_re, alpha_im, w.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("alpha_re,alpha_im,w\n");
        for (i, y) in self.im.iter().enumerate() {
            for (j, x) in self.re.iter().enumerate() {
                let _ = writeln!(s, "{x},{y},{:e}", self.values[i][j]);
            }
        }
        s
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Matrix elements ⟨m|D(β)|n⟩ for m, n < dim, built column by column from
/// D(β)|0⟩ via D a† = (a† − β*) D; no enlarged Fock space is needed.
pub fn displacement_elements(beta: C64, dim: usize) -> CMatrix {
    let mut d = CMatrix::zeros(dim, dim);
    if dim == 0 {
        return d;
    }
    d.set_column(0, &linalg::coherent_amplitudes(beta, dim));
    let bc = beta.conj();
    for n in 0..dim - 1 {
        let s = 1.0 / ((n + 1) as f64).sqrt();
        for m in 0..dim {
            let up = if m > 0 { d[(m - 1, n)] * (m as f64).sqrt() } else { C64::new(0.0, 0.0) };
            d[(m, n + 1)] = (up - bc * d[(m, n)]) * s;
        }
    }
    d
}

/// W(α) = (2/π) Tr[D†(α) ρ D(α) e^{iπa†a}] for a single-mode cavity state,
/// evaluated as (2/π) Tr[ρ D(2α) Π] with Π = diag((−1)ⁿ).
pub fn wigner(rho: &CMatrix, re: &[f64], im: &[f64]) -> Result<WignerGrid> {
    let n = rho.nrows();
    if rho.ncols() != n {
        return Err(Error::InvalidDimension(format!("density matrix is {}x{}", n, rho.ncols())));
    }
    let mut values = vec![vec![0.0; re.len()]; im.len()];
    for (i, &y) in im.iter().enumerate() {
        for (j, &x) in re.iter().enumerate() {
            let d = displacement_elements(C64::new(2.0 * x, 2.0 * y), n);
            let mut acc = C64::new(0.0, 0.0);
            for col in 0..n {
                let mut s = C64::new(0.0, 0.0);
                for m in 0..n {
                    s += rho[(col, m)] * d[(m, col)];
                }
                acc += if col % 2 == 0 { s } else { -s };
            }
            values[i][j] = 2.0 / std::f64::consts::PI * acc.re;
        }
    }
    Ok(WignerGrid { re: re.to_vec(), im: im.to_vec(), values })
}

/// Normalised even cat N(|η⟩ + |−η⟩) for real η on a truncated Fock space.
pub fn even_cat(eta: f64, cutoff: usize) -> CVector {
    let a = linalg::coherent_amplitudes(C64::new(eta, 0.0), cutoff);
    let b = linalg::coherent_amplitudes(C64::new(-eta, 0.0), cutoff);
    let v = a + b;
    let n = v.norm();
    v / C64::new(n, 0.0)
}

/// Closed-form Wigner function of the even cat with real amplitude η.
pub fn even_cat_wigner(eta: f64, alpha: C64) -> f64 {
    let norm = 1.0 / (2.0 * (1.0 + (-2.0 * eta * eta).exp()));
    let g = |z: C64| (-2.0 * z.norm_sqr()).exp();
    let e = C64::new(eta, 0.0);
    2.0 / std::f64::consts::PI
        * norm
        * (g(alpha - e) + g(alpha + e) + 2.0 * g(alpha) * (4.0 * eta * alpha.im).cos())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapEntry {
    pub spec: GateSpec,
    pub clean: f64,
    pub with_error: f64,
}

/// 1 − F̄ for each single-qubit spec, without and with amplitude error δ.
pub fn infidelity_map(
    model: &RabiModel,
    specs: &[GateSpec],
    m: usize,
    t_f: f64,
    delta: f64,
    opts: &PropagationOptions,
) -> Result<Vec<MapEntry>> {
    let system = System::new(model.clone())?;
    specs
        .par_iter()
        .map(|spec| {
            let schedule = synthesize_single_qubit(spec, &system.spectrum, m, t_f)?;
            let code = binomial_codewords(system.layout().fock_cutoffs[0])?;
            let problem = GateProblem {
                system: system.clone(),
                spec: *spec,
                schedule,
                basis: code.basis().iter().map(|c| system.layout().embed(MU, c)).collect(),
                target: target_unitary(spec),
            };
            let clean = 1.0 - problem.fidelity(opts)?.f_bar;
            let with_error = 1.0 - problem.fidelity_of(&problem.schedule.with_error(delta), opts)?.f_bar;
            Ok(MapEntry { spec: *spec, clean, with_error })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn fidelity_examples() {
        let ut = target_unitary(&GateSpec::hadamard());
        let id = CMatrix::identity(2, 2);
        assert_eq!(subspace_fidelity(&ut, &ut).unwrap().f_bar, 1.0);
        let f = subspace_fidelity(&id, &ut).unwrap();
        let tr = ut.adjoint().trace().norm_sqr();
        assert!((f.f_bar - (2.0 + tr) / 6.0).abs() < 1e-15);
        // half the subspace leaks out
        let mut u = CMatrix::identity(3, 3);
        u[(1, 1)] = c(0.0, 0.0);
        u[(2, 2)] = c(0.0, 0.0);
        u[(2, 1)] = c(1.0, 0.0);
        u[(1, 2)] = c(1.0, 0.0);
        let mut p = CMatrix::zeros(3, 3);
        p[(0, 0)] = c(1.0, 0.0);
        p[(1, 1)] = c(1.0, 0.0);
        let r = average_gate_fidelity(&u, &CMatrix::identity(3, 3), &p).unwrap();
        assert!(r.trace_mm < 2.0 && r.f_bar < 1.0 && r.dim == 2);
        p[(0, 1)] = c(0.5, 0.0);
        assert!(matches!(average_gate_fidelity(&u, &u, &p), Err(Error::Contract(_))));
    }

    #[test]
    fn haar_average_matches_formula() {
        let ut = target_unitary(&GateSpec::hadamard());
        let h = CMatrix::from_row_slice(2, 2, &[c(0.12, 0.0), c(0.03, -0.09), c(0.03, 0.09), c(-0.06, 0.0)]);
        let u = linalg::expm_hermitian(&h, 1.0).unwrap() * &ut;
        let formula = subspace_fidelity(&u, &ut).unwrap().f_bar;
        let mc = haar_average_fidelity(&u, &ut, 1000, 7);
        assert!((formula - mc).abs() < 2e-3, "{formula} vs {mc}");
    }

    #[test]
    fn populations_examples() {
        let layout = HilbertLayout::new(vec![8]).unwrap();
        let code = binomial_codewords(8).unwrap();
        let logical = CVector::from_vec(vec![c(1.0 / 3f64.sqrt(), 0.0), c((2.0f64 / 3.0).sqrt(), 0.0)]);
        let psi = layout.embed(MU, &code.encode(&logical));
        let p = fock_populations_pure(&psi, &layout, MU);
        assert!((p[0] - 1.0 / 6.0).abs() < 1e-14 && (p[2] - 2.0 / 3.0).abs() < 1e-14 && (p[4] - 1.0 / 6.0).abs() < 1e-14);
        let rho = &psi * psi.adjoint();
        let red = reduced_cavity(&rho, &layout);
        let pr = fock_populations(&rho, &layout, MU);
        for n in 0..8 {
            assert_eq!(pr[n], red[(n, n)].re);
        }
        let cat = even_cat(2f64.sqrt(), 30);
        for k in (0..12).step_by(2) {
            let exact = 2f64.powi(k as i32) / crate::pulse::factorial(k) / 2f64.cosh();
            assert!((cat[k].norm_sqr() - exact).abs() < 1e-10);
        }
    }

    #[test]
    fn wigner_reference_values() {
        let mut vac = CMatrix::zeros(6, 6);
        vac[(0, 0)] = c(1.0, 0.0);
        let w = wigner(&vac, &[0.0], &[0.0]).unwrap();
        assert!((w.at(0, 0) - 2.0 / PI).abs() < 1e-10);
        let mut one = CMatrix::zeros(6, 6);
        one[(1, 1)] = c(1.0, 0.0);
        let w = wigner(&one, &[0.0], &[0.0]).unwrap();
        assert!((w.at(0, 0) + 2.0 / PI).abs() < 1e-10);
        // vacuum Gaussian away from the origin
        let w = wigner(&vac, &[0.7], &[-0.4]).unwrap();
        assert!((w.at(0, 0) - 2.0 / PI * (-2.0 * 0.65f64).exp()).abs() < 1e-10);
        // recurrence agrees with the matrix exponential
        let beta = c(0.9, -1.3);
        let exact = linalg::displacement(beta, 60).unwrap();
        let rec = displacement_elements(beta, 12);
        for m in 0..12 {
            for k in 0..12 {
                assert!((exact[(m, k)] - rec[(m, k)]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn cat_wigner_matches_closed_form() {
        let eta = 2f64.sqrt();
        let cat = even_cat(eta, 30);
        let rho = &cat * cat.adjoint();
        let axis = linspace(-3.0, 3.0, 21);
        let w = wigner(&rho, &axis, &axis).unwrap();
        for (i, y) in axis.iter().enumerate() {
            for (j, x) in axis.iter().enumerate() {
                assert!((w.at(i, j) - even_cat_wigner(eta, c(*x, *y))).abs() < 1e-3);
            }
        }
        assert!(w.at(10, 10) > 0.0);
        let fine = linspace(-4.0, 4.0, 81);
        let w = wigner(&rho, &fine, &fine).unwrap();
        assert!((w.integral() - 1.0).abs() < 1e-2);
    }

    #[test]
    fn awgn_is_deterministic_and_scaled() {
        let model = RabiModel::single_mode(2.0 * PI * 6.25, 2.0 * PI * 6.25, 0.8 * 2.0 * PI * 6.25, 12).unwrap().tuned(2, 4).unwrap();
        let sys = System::new(model).unwrap();
        let mut sched = synthesize_single_qubit(&GateSpec::hadamard(), &sys.spectrum, 2, 50.0).unwrap();
        sched.grid_points = 2001;
        let a = awgn_noise(&sched, 15.0, 3, 1);
        let b = awgn_noise(&sched, 15.0, 3, 1);
        let other = awgn_noise(&sched, 15.0, 3, 2);
        assert_eq!(a, b);
        assert_ne!(a, other);
        for k in 0..sched.tones.len() {
            let clean: Vec<f64> = (0..2001)
                .map(|j| {
                    let t = 50.0 * j as f64 / 2000.0;
                    sched.amplitude_phase(k, t, t >= 25.0).0
                })
                .collect();
            let ps = clean.iter().map(|x| x * x).sum::<f64>() / 2001.0;
            let pn = a.values[k].iter().map(|x| x * x).sum::<f64>() / 2001.0;
            assert!((ps / pn / 15.0 - 1.0).abs() < 0.15, "tone {k}: {}", ps / pn);
        }
        let cfg = NoiseConfig { delta_i: 0.0, snr: 10.0, snr_db: true, samples: 1, seed: 0 };
        assert!((cfg.power_ratio() - 10.0).abs() < 1e-12);
        assert!(NoiseConfig { samples: 0, ..cfg }.validate().is_err());
    }

    #[test]
    fn sensitivity_wrappers() {
        let aux = AuxiliarySchedule::gate(PI / 2.0, 1.0).unwrap();
        assert!(error_sensitivity(&aux).unwrap() < 1e-3);
        let q1 = error_sensitivity(&AuxiliarySchedule::stepped(PI / 2.0, 1.0).unwrap()).unwrap();
        let q2 = error_sensitivity(&AuxiliarySchedule::stepped(PI / 2.0, 137.0).unwrap()).unwrap();
        assert!(q1 > 0.1 && (q1 - q2).abs() < 1e-12);
    }
}
