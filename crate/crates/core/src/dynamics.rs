//! Time evolution under H_tot(t) = H_0 + Ω(t)(|μ⟩⟨g| + |g⟩⟨μ|), under the
//! effective Hamiltonian, and under the eigenbasis Lindblad equation.
//!
//! States are propagated in the interaction picture of H_0, in coordinates
//! of its eigenbasis: a_j(t) = e^{iξ_j t}⟨𝓔_j|ψ(t)⟩. There
//! H_I(t) = Ω(t)·P(t)VP(t)† with P = diag(e^{iξ_j t}) and V the drive operator,
//! which only couples |μ,n⟩ to ζ_m with element c_n^m. No rotating-wave
//! approximation is made.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, HilbertLayout, E, G, MU};
use crate::ode::{integrate_piecewise, OdeOptions, OdeStats};
use crate::pulse::PulseSchedule;
use crate::rabi::{dressed_spectrum, DressedSpectrum, Eigenbasis, RabiModel, Sector};

/// Default eigenbasis truncation for density-matrix runs.
pub const DEFAULT_MASTER_BASIS: usize = 40;

/// Model plus its diagonalisation, shared by all propagations.
#[derive(Clone, Debug)]
pub struct System {
    pub model: RabiModel,
    pub spectrum: DressedSpectrum,
    pub eigenbasis: Eigenbasis,
}

impl System {
    pub fn new(model: RabiModel) -> Result<Self> {
        let spectrum = dressed_spectrum(&model)?;
        let eigenbasis = spectrum.eigenbasis();
        Ok(Self { model, spectrum, eigenbasis })
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.spectrum.layout
    }

    pub fn drive_basis(&self, size: Option<usize>) -> DriveBasis {
        DriveBasis::new(self, size)
    }
}

/// Eigenbasis (possibly truncated to the lowest states) with the drive
/// operator expressed in it.
#[derive(Clone, Debug)]
pub struct DriveBasis {
    pub energies: Vec<f64>,
    pub sectors: Vec<Sector>,
    /// Columns are the basis vectors on the full space.
    pub vectors: CMatrix,
    /// Nonzero V_ij with i < j; V is real symmetric.
    pub couplings: Vec<(usize, usize, f64)>,
}

impl DriveBasis {
    fn new(system: &System, size: Option<usize>) -> Self {
        let eb = match size {
            Some(k) => system.eigenbasis.truncated(k),
            None => system.eigenbasis.clone(),
        };
        let spec = &system.spectrum;
        let mut couplings = Vec::new();
        for i in 0..eb.dim() {
            for j in i + 1..eb.dim() {
                let c = match (eb.sectors[i], eb.sectors[j]) {
                    (Sector::Mu(n), Sector::Dressed(m)) | (Sector::Dressed(m), Sector::Mu(n)) => spec.c_coeffs[m][n],
                    _ => 0.0,
                };
                if c != 0.0 {
                    couplings.push((i, j, c));
                }
            }
        }
        Self { energies: eb.energies, sectors: eb.sectors, vectors: eb.vectors, couplings }
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Basis coordinates of a full-space vector; fails if the vector leaks
    /// out of a truncated basis.
    pub fn coordinates(&self, psi: &CVector) -> Result<CVector> {
        let a = self.vectors.adjoint() * psi;
        let lost = psi.norm_squared() - a.norm_squared();
        if lost > 1e-10 {
            return Err(Error::Truncation(format!("state has weight {lost:e} outside the propagation basis")));
        }
        Ok(a)
    }

    /// Full-space vector from basis coordinates.
    pub fn expand(&self, a: &CVector) -> CVector {
        &self.vectors * a
    }

    fn phases(&self, t: f64, out: &mut [C64]) {
        for (p, &e) in out.iter_mut().zip(&self.energies) {
            *p = C64::from_polar(1.0, e * t);
        }
    }
}

/// Lab-frame drive strength Ω(t) for a schedule.
fn lab_drive(schedule: &PulseSchedule, t: f64, env: &mut [C64]) -> f64 {
    schedule.envelopes_into(t, env);
    env.iter()
        .zip(&schedule.tones)
        .map(|(e, tn)| (e * C64::from_polar(1.0, tn.omega * t)).re)
        .sum()
}

/// H_0 + Ω(t)(|μ⟩⟨g| + |g⟩⟨μ|) ⊗ I on the full space.
pub fn h_total_at(model: &RabiModel, schedule: &PulseSchedule, t: f64) -> Result<CMatrix> {
    if !(0.0..=schedule.t_f()).contains(&t) {
        return Err(Error::Range { t, t_f: schedule.t_f() });
    }
    let layout = model.layout();
    let omega = schedule.drive(t);
    let x = layout.atom_op(MU, G) + layout.atom_op(G, MU);
    Ok(model.build_h0()? + x * C64::new(omega, 0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceRates {
    /// Cavity decay κ (rad/ns).
    pub kappa: f64,
    /// Cavity dephasing κ^φ.
    pub kappa_phi: f64,
    /// |e⟩ → |g⟩ relaxation γ_g.
    pub gamma_g: f64,
    /// |g⟩ → |μ⟩ relaxation γ_μ.
    pub gamma_mu: f64,
    pub gamma_g_phi: f64,
    pub gamma_mu_phi: f64,
}

impl DecoherenceRates {
    pub fn zero() -> Self {
        Self { kappa: 0.0, kappa_phi: 0.0, gamma_g: 0.0, gamma_mu: 0.0, gamma_g_phi: 0.0, gamma_mu_phi: 0.0 }
    }

    /// 2π × (0.33, 0.3, 8, 8, 8, 8) kHz.
    pub fn superconducting() -> Self {
        let k = 2.0 * std::f64::consts::PI * 1e-6;
        Self {
            kappa: 0.33 * k,
            kappa_phi: 0.3 * k,
            gamma_g: 8.0 * k,
            gamma_mu: 8.0 * k,
            gamma_g_phi: 8.0 * k,
            gamma_mu_phi: 8.0 * k,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.kappa, self.kappa_phi, self.gamma_g, self.gamma_mu, self.gamma_g_phi, self.gamma_mu_phi];
        if all.iter().all(|r| *r >= 0.0 && r.is_finite()) {
            Ok(())
        } else {
            Err(Error::Configuration(format!("decoherence rates must be >= 0: {all:?}")))
        }
    }
}

/// Eigenbasis dissipators: dephasing operators Σ_j l_j|𝓔_j⟩⟨𝓔_j| and
/// downward jumps |𝓔_{j′}⟩⟨𝓔_j| (j > j′) with summed rates.
#[derive(Clone, Debug)]
pub struct Dissipators {
    /// One vector of l_j = √Λ_ν^{jj} per dephasing channel.
    pub dephasing: Vec<Vec<f64>>,
    /// (j, j′, Σ_ν′ Γ_ν′^{jj′}) with j > j′.
    pub jumps: Vec<(usize, usize, f64)>,
    pub dim: usize,
}

impl Dissipators {
    pub fn is_empty(&self) -> bool {
        self.jumps.is_empty() && self.dephasing.iter().all(|l| l.iter().all(|&x| x == 0.0))
    }

    /// Explicit collapse operators in the basis, each with unit prefactor.
    pub fn operators(&self) -> Vec<CMatrix> {
        let d = self.dim;
        let mut ops: Vec<CMatrix> = self
            .dephasing
            .iter()
            .map(|l| CMatrix::from_diagonal(&CVector::from_iterator(d, l.iter().map(|&x| C64::new(x, 0.0)))))
            .collect();
        for &(j, jp, rate) in &self.jumps {
            let mut o = CMatrix::zeros(d, d);
            o[(jp, j)] = C64::new(rate.sqrt(), 0.0);
            ops.push(o);
        }
        ops
    }
}

fn cavity_operators(layout: &HilbertLayout) -> (Vec<CMatrix>, Vec<CMatrix>) {
    let mut number = Vec::new();
    let mut quadrature = Vec::new();
    for i in 0..layout.modes() {
        let a = layout.mode_annihilation(i);
        number.push(a.adjoint() * &a);
        quadrature.push(&a + a.adjoint());
    }
    (number, quadrature)
}

/// Build the dissipators of the master equation in `basis`.
///
/// Λ: (κ^φ, a†a), (κ, a + a†), (γ_g^φ, σ_g^z), (γ_μ^φ, σ_μ^z) on the diagonal.
/// Γ: (κ^φ, a†a), (κ, a + a†), (γ_g, σ_g^x), (γ_μ, σ_μ^x), (γ_g^φ, σ_g^z),
/// (γ_μ^φ, σ_μ^z) between j > j′. With two cavity modes each mode contributes
/// its own cavity channels at the same rates.
pub fn lindblad_rates(system: &System, basis: &DriveBasis, rates: &DecoherenceRates) -> Result<Dissipators> {
    rates.validate()?;
    let layout = system.layout();
    let (number, quadrature) = cavity_operators(layout);
    let sz_g = layout.atom_op(E, E) - layout.atom_op(G, G);
    let sz_mu = layout.atom_op(G, G) - layout.atom_op(MU, MU);
    let sx_g = layout.atom_op(G, E) + layout.atom_op(E, G);
    let sx_mu = layout.atom_op(MU, G) + layout.atom_op(G, MU);

    let mut deph_channels: Vec<(f64, &CMatrix)> = Vec::new();
    let mut jump_channels: Vec<(f64, &CMatrix)> = Vec::new();
    for (n, q) in number.iter().zip(&quadrature) {
        deph_channels.push((rates.kappa_phi, n));
        deph_channels.push((rates.kappa, q));
        jump_channels.push((rates.kappa_phi, n));
        jump_channels.push((rates.kappa, q));
    }
    deph_channels.push((rates.gamma_g_phi, &sz_g));
    deph_channels.push((rates.gamma_mu_phi, &sz_mu));
    jump_channels.push((rates.gamma_g, &sx_g));
    jump_channels.push((rates.gamma_mu, &sx_mu));
    jump_channels.push((rates.gamma_g_phi, &sz_g));
    jump_channels.push((rates.gamma_mu_phi, &sz_mu));

    let b = &basis.vectors;
    let bd = b.adjoint();
    let d = basis.dim();
    let mut dephasing = Vec::new();
    for (rate, op) in deph_channels {
        if rate == 0.0 {
            continue;
        }
        let m = &bd * (op * b);
        dephasing.push((0..d).map(|j| (rate * m[(j, j)].norm_sqr()).sqrt()).collect());
    }
    let mut total = nalgebra::DMatrix::<f64>::zeros(d, d);
    for (rate, op) in jump_channels {
        if rate == 0.0 {
            continue;
        }
        let m = &bd * (op * b);
        for j in 0..d {
            for jp in 0..j {
                total[(j, jp)] += rate * m[(jp, j)].norm_sqr();
            }
        }
    }
    let mut jumps = Vec::new();
    for j in 0..d {
        for jp in 0..j {
            if total[(j, jp)] > 0.0 {
                jumps.push((j, jp, total[(j, jp)]));
            }
        }
    }
    Ok(Dissipators { dephasing, jumps, dim: d })
}

/// Options shared by all propagators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagationOptions {
    pub ode: OdeOptions,
    /// Keep only the lowest eigenstates; `None` keeps all.
    pub basis_size: Option<usize>,
    /// Number of uniform time-series samples.
    pub samples: usize,
}

impl PropagationOptions {
    pub fn pure() -> Self {
        Self { ode: OdeOptions::pure(), basis_size: None, samples: 101 }
    }

    pub fn master() -> Self {
        Self { ode: OdeOptions::master(), basis_size: Some(DEFAULT_MASTER_BASIS), samples: 101 }
    }
}

#[derive(Clone, Debug)]
pub enum FinalState {
    /// Interaction-picture basis coordinates, one column per propagated state.
    Pure(CMatrix),
    /// Interaction-picture density matrix in basis coordinates.
    Mixed(CMatrix),
}

#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub basis: DriveBasis,
    pub times: Vec<f64>,
    /// populations[s][j]: population of basis state j at sample s (first
    /// column for multi-state runs).
    pub populations: Vec<Vec<f64>>,
    pub final_state: FinalState,
    pub stats: OdeStats,
    /// Largest |‖ψ‖² − 1| (pure) or |Tr ρ − 1| (mixed) over the samples.
    pub norm_drift: f64,
}

impl EvolutionResult {
    /// Final state on the full space in the interaction frame (first column).
    pub fn final_vector(&self) -> Option<CVector> {
        match &self.final_state {
            FinalState::Pure(a) => Some(self.basis.expand(&a.column(0).into_owned())),
            FinalState::Mixed(_) => None,
        }
    }

    /// Final density matrix on the full space in the interaction frame.
    pub fn final_density(&self) -> CMatrix {
        let b = &self.basis.vectors;
        match &self.final_state {
            FinalState::Pure(a) => {
                let v = b * a.column(0);
                &v * v.adjoint()
            }
            FinalState::Mixed(rho) => b * rho * b.adjoint(),
        }
    }
}

fn breakpoints(t_f: f64, samples: usize) -> (Vec<f64>, Vec<bool>) {
    let n = samples.max(2);
    let mut ts: Vec<f64> = (0..n).map(|i| t_f * i as f64 / (n - 1) as f64).collect();
    let mut keep = vec![true; n];
    let half = 0.5 * t_f;
    if !ts.iter().any(|&t| (t - half).abs() < 1e-12 * t_f) {
        let pos = ts.iter().position(|&t| t > half).unwrap_or(n);
        ts.insert(pos, half);
        keep.insert(pos, false);
    }
    (ts, keep)
}

/// Pure-state Schrödinger propagation of several initial states at once.
fn propagate_columns(
    system: &System,
    schedule: &PulseSchedule,
    initial: &[CVector],
    opts: &PropagationOptions,
) -> Result<EvolutionResult> {
    let basis = system.drive_basis(opts.basis_size);
    let d = basis.dim();
    let cols = initial.len();
    let mut y = vec![C64::new(0.0, 0.0); d * cols];
    let mut norms0 = Vec::with_capacity(cols);
    for (c, psi) in initial.iter().enumerate() {
        let a = basis.coordinates(psi)?;
        norms0.push(a.norm_squared());
        y[c * d..(c + 1) * d].copy_from_slice(a.as_slice());
    }
    let mut env = vec![C64::new(0.0, 0.0); schedule.tones.len()];
    let mut p = vec![C64::new(0.0, 0.0); d];
    let mut w = vec![C64::new(0.0, 0.0); d];
    let couplings = basis.couplings.clone();
    let mut rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
        let omega = lab_drive(schedule, t, &mut env);
        basis.phases(t, &mut p);
        let mi = C64::new(0.0, -omega);
        for c in 0..cols {
            let yc = &y[c * d..(c + 1) * d];
            for j in 0..d {
                w[j] = p[j].conj() * yc[j];
            }
            let dc = &mut dy[c * d..(c + 1) * d];
            dc.fill(C64::new(0.0, 0.0));
            for &(i, j, v) in &couplings {
                dc[i] += w[j] * v;
                dc[j] += w[i] * v;
            }
            for i in 0..d {
                dc[i] *= mi * p[i];
            }
        }
    };
    let (ts, keep) = breakpoints(schedule.t_f(), opts.samples);
    let mut times = Vec::new();
    let mut populations = Vec::new();
    let mut drift: f64 = 0.0;
    let stats = integrate_piecewise(&mut rhs, &ts, &mut y, opts.ode, |i, t, y| {
        for (c, n0) in norms0.iter().enumerate() {
            let n: f64 = y[c * d..(c + 1) * d].iter().map(|z| z.norm_sqr()).sum();
            drift = drift.max((n - n0).abs());
        }
        if keep[i] {
            times.push(t);
            populations.push(y[..d].iter().map(|z| z.norm_sqr()).collect());
        }
    })?;
    if drift > 1e-8 {
        return Err(Error::Numeric(format!("norm drift {drift:e} exceeds 1e-8")));
    }
    let fin = CMatrix::from_column_slice(d, cols, &y);
    Ok(EvolutionResult { basis, times, populations, final_state: FinalState::Pure(fin), stats, norm_drift: drift })
}

/// Solve iψ̇ = H_tot(t)ψ from a full-space initial state.
pub fn propagate_schrodinger(
    system: &System,
    schedule: &PulseSchedule,
    psi0: &CVector,
    opts: &PropagationOptions,
) -> Result<EvolutionResult> {
    let n = psi0.norm();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::Contract(format!("initial state norm {n} != 1")));
    }
    propagate_columns(system, schedule, std::slice::from_ref(psi0), opts)
}

/// U[i, j] = ⟨basis_i|U_I(T)|basis_j⟩ in the interaction frame.
pub fn extract_propagator(
    system: &System,
    schedule: &PulseSchedule,
    basis_states: &[CVector],
    opts: &PropagationOptions,
) -> Result<CMatrix> {
    let gram = CMatrix::from_fn(basis_states.len(), basis_states.len(), |i, j| {
        linalg::inner(&basis_states[i], &basis_states[j])
    });
    let defect = (gram - CMatrix::identity(basis_states.len(), basis_states.len()))
        .iter()
        .fold(0.0_f64, |m, z| m.max(z.norm()));
    if defect > 1e-10 {
        return Err(Error::Contract(format!("propagator basis not orthonormal ({defect:e})")));
    }
    let res = propagate_columns(system, schedule, basis_states, opts)?;
    let FinalState::Pure(fin) = &res.final_state else { unreachable!() };
    let coords: Vec<CVector> = basis_states.iter().map(|b| res.basis.coordinates(b)).collect::<Result<_>>()?;
    Ok(CMatrix::from_fn(basis_states.len(), basis_states.len(), |i, j| {
        coords[i].dotc(&fin.column(j))
    }))
}

/// Evolve within {|μ,k⟩ for the scheduled k} ∪ {ζ_m} under
/// H_eff = ½Σ_k c_k^m Ω_k e^{iφ_k}|μ,k⟩⟨ζ_m| + h.c.
///
/// The initial state is projected onto that subspace; the result is reported
/// on the full space in the interaction frame.
pub fn propagate_effective(
    system: &System,
    schedule: &PulseSchedule,
    psi0: &CVector,
    opts: &PropagationOptions,
) -> Result<EvolutionResult> {
    let spec = &system.spectrum;
    let layout = spec.layout.clone();
    let m = schedule.m;
    let mut vectors = Vec::new();
    let mut energies = Vec::new();
    let mut sectors = Vec::new();
    let mut cs = Vec::new();
    for tone in &schedule.tones {
        let n = layout.fock_index(&tone.k);
        vectors.push(layout.ket(MU, &tone.k));
        energies.push(spec.mu_energies[n]);
        sectors.push(Sector::Mu(n));
        cs.push(spec.c_coeffs[m][n]);
    }
    vectors.push(spec.states[m].clone());
    energies.push(spec.energies[m]);
    sectors.push(Sector::Dressed(m));
    let d = vectors.len();
    let z = d - 1;
    let couplings = (0..z).map(|i| (i, z, cs[i])).collect();
    let basis = DriveBasis { energies, sectors, vectors: CMatrix::from_columns(&vectors), couplings };

    let a0 = basis.vectors.adjoint() * psi0;
    let mut y: Vec<C64> = a0.iter().cloned().collect();
    let norm0 = a0.norm_squared();
    let mut env = vec![C64::new(0.0, 0.0); schedule.tones.len()];
    let mut rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
        schedule.envelopes_into(t, &mut env);
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..z {
            let h = env[k] * (0.5 * cs[k]);
            dy[k] = C64::new(0.0, -1.0) * h * y[z];
            acc += h.conj() * y[k];
        }
        dy[z] = C64::new(0.0, -1.0) * acc;
    };
    let (ts, keep) = breakpoints(schedule.t_f(), opts.samples);
    let mut times = Vec::new();
    let mut populations = Vec::new();
    let mut drift: f64 = 0.0;
    let stats = integrate_piecewise(&mut rhs, &ts, &mut y, opts.ode, |i, t, y| {
        let n: f64 = y.iter().map(|z| z.norm_sqr()).sum();
        drift = drift.max((n - norm0).abs());
        if keep[i] {
            times.push(t);
            populations.push(y.iter().map(|z| z.norm_sqr()).collect());
        }
    })?;
    let fin = CMatrix::from_column_slice(d, 1, &y);
    Ok(EvolutionResult { basis, times, populations, final_state: FinalState::Pure(fin), stats, norm_drift: drift })
}

/// Precomputed dissipator action on a flat row-major density matrix.
struct DissipatorKernel {
    d: usize,
    /// Σ_ν (l_a l_b − (l_a² + l_b²)/2) − (out_a + out_b)/2, row-major.
    decay: Vec<f64>,
    jumps: Vec<(usize, usize, f64)>,
}

impl DissipatorKernel {
    fn new(dis: &Dissipators) -> Self {
        let d = dis.dim;
        let mut out = vec![0.0; d];
        for &(j, _, r) in &dis.jumps {
            out[j] += r;
        }
        let mut decay = vec![0.0; d * d];
        for a in 0..d {
            for b in 0..d {
                let mut v = -0.5 * (out[a] + out[b]);
                for l in &dis.dephasing {
                    v += l[a] * l[b] - 0.5 * (l[a] * l[a] + l[b] * l[b]);
                }
                decay[a * d + b] = v;
            }
        }
        Self { d, decay, jumps: dis.jumps.clone() }
    }

    fn apply(&self, rho: &[C64], out: &mut [C64]) {
        for (o, (r, k)) in out.iter_mut().zip(rho.iter().zip(&self.decay)) {
            *o += r * k;
        }
        for &(j, jp, rate) in &self.jumps {
            out[jp * self.d + jp] += rho[j * self.d + j] * rate;
        }
    }
}

/// Integrate ρ̇ = −i[H_tot, ρ] + dissipators in the (truncated) eigenbasis.
pub fn propagate_master(
    system: &System,
    schedule: &PulseSchedule,
    rho0: &CMatrix,
    rates: &DecoherenceRates,
    opts: &PropagationOptions,
) -> Result<EvolutionResult> {
    let herm = linalg::hermiticity_defect(rho0);
    let tr = rho0.trace();
    if herm > 1e-10 || (tr - 1.0).norm() > 1e-10 {
        return Err(Error::Contract(format!("initial density matrix invalid (hermiticity {herm:e}, trace {tr})")));
    }
    let basis = system.drive_basis(opts.basis_size);
    let d = basis.dim();
    let rho_b = basis.vectors.adjoint() * rho0 * &basis.vectors;
    let lost = 1.0 - rho_b.trace().re;
    if lost > 1e-10 {
        return Err(Error::Truncation(format!("initial state has weight {lost:e} outside the propagation basis")));
    }
    let kernel = DissipatorKernel::new(&lindblad_rates(system, &basis, rates)?);
    // row-major flat storage
    let mut y: Vec<C64> = (0..d * d).map(|k| rho_b[(k / d, k % d)]).collect();
    let mut env = vec![C64::new(0.0, 0.0); schedule.tones.len()];
    let mut p = vec![C64::new(0.0, 0.0); d];
    let mut sigma = vec![C64::new(0.0, 0.0); d * d];
    let couplings = basis.couplings.clone();
    let mut rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
        let omega = lab_drive(schedule, t, &mut env);
        basis.phases(t, &mut p);
        for a in 0..d {
            let pa = p[a].conj();
            for b in 0..d {
                sigma[a * d + b] = pa * y[a * d + b] * p[b];
            }
        }
        dy.fill(C64::new(0.0, 0.0));
        // commutator V σ − σ V, V real symmetric
        for &(i, j, v) in &couplings {
            for b in 0..d {
                dy[i * d + b] += sigma[j * d + b] * v;
                dy[j * d + b] += sigma[i * d + b] * v;
            }
            for a in 0..d {
                dy[a * d + j] -= sigma[a * d + i] * v;
                dy[a * d + i] -= sigma[a * d + j] * v;
            }
        }
        let mi = C64::new(0.0, -omega);
        for a in 0..d {
            let pa = p[a] * mi;
            for b in 0..d {
                dy[a * d + b] *= pa * p[b].conj();
            }
        }
        kernel.apply(y, dy);
    };
    let (ts, keep) = breakpoints(schedule.t_f(), opts.samples);
    let mut times = Vec::new();
    let mut populations = Vec::new();
    let mut drift: f64 = 0.0;
    let stats = integrate_piecewise(&mut rhs, &ts, &mut y, opts.ode, |i, t, y| {
        let tr: f64 = (0..d).map(|a| y[a * d + a].re).sum();
        drift = drift.max((tr - 1.0).abs());
        if keep[i] {
            times.push(t);
            populations.push((0..d).map(|a| y[a * d + a].re).collect());
        }
    })?;
    let rho = CMatrix::from_row_slice(d, d, &y);
    let rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
    if drift > 1e-7 {
        return Err(Error::Numeric(format!("trace drift {drift:e} exceeds 1e-7")));
    }
    let min_eig = linalg::eigh(&rho)?.values.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_eig < -1e-6 {
        return Err(Error::Numeric(format!("density matrix lost positivity (eigenvalue {min_eig:e})")));
    }
    Ok(EvolutionResult { basis, times, populations, final_state: FinalState::Mixed(rho), stats, norm_drift: drift })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{binomial_codewords, GateSpec};
    use crate::pulse::synthesize_single_qubit;
    use std::f64::consts::PI;

    const WC: f64 = 2.0 * PI * 6.25;

    fn system(g: f64, cutoff: usize) -> System {
        let model = RabiModel::single_mode(WC, WC, g * WC, cutoff).unwrap().tuned(2, 4).unwrap();
        System::new(model).unwrap()
    }

    fn mu_code_state(sys: &System, logical: [C64; 2]) -> CVector {
        let code = binomial_codewords(sys.layout().fock_cutoffs[0]).unwrap();
        let cav = code.encode(&CVector::from_vec(logical.to_vec()));
        sys.layout().embed(MU, &cav)
    }

    #[test]
    fn drive_hamiltonian_examples() {
        let sys = system(0.8, 10);
        let sched = synthesize_single_qubit(&GateSpec::hadamard(), &sys.spectrum, 2, 35.0).unwrap();
        let h0 = sys.model.build_h0().unwrap();
        let silent = sched.silenced();
        assert_eq!(h_total_at(&sys.model, &silent, 3.0).unwrap(), h0);
        for i in 0..50 {
            let h = h_total_at(&sys.model, &sched, 35.0 * i as f64 / 49.0).unwrap();
            assert!(linalg::hermiticity_defect(&h) == 0.0);
        }
        assert!(matches!(h_total_at(&sys.model, &sched, 36.0), Err(Error::Range { .. })));
    }

    #[test]
    fn stationary_dressed_state() {
        let sys = system(0.8, 12);
        let sched = synthesize_single_qubit(&GateSpec::hadamard(), &sys.spectrum, 2, 20.0).unwrap().silenced();
        let psi0 = sys.spectrum.states[2].clone();
        let res = propagate_schrodinger(&sys, &sched, &psi0, &PropagationOptions::pure()).unwrap();
        // interaction frame removes e^{−iE_2 t}
        let fin = res.final_vector().unwrap();
        assert!((linalg::inner(&psi0, &fin).norm() - 1.0).abs() < 1e-8);
    }

    /// The interaction-picture propagator agrees with brute-force lab-frame
    /// integration of H_tot(t).
    #[test]
    fn interaction_picture_matches_lab_frame() {
        let sys = system(0.8, 8);
        let mut sched = synthesize_single_qubit(&GateSpec::hadamard(), &sys.spectrum, 2, 4.0).unwrap();
        sched.amplitude_scale = 3.0;
        let psi0 = mu_code_state(&sys, [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let res = propagate_schrodinger(&sys, &sched, &psi0, &PropagationOptions::pure()).unwrap();
        let FinalState::Pure(a) = &res.final_state else { panic!() };
        let mut lab = CVector::zeros(psi0.len());
        for j in 0..res.basis.dim() {
            let ph = C64::from_polar(1.0, -res.basis.energies[j] * 4.0);
            lab += res.basis.vectors.column(j) * (a[(j, 0)] * ph);
        }
        let h0 = sys.model.build_h0().unwrap();
        let x = sys.layout().atom_op(MU, G) + sys.layout().atom_op(G, MU);
        let mut y: Vec<C64> = psi0.iter().cloned().collect();
        let mut f = |t: f64, y: &[C64], dy: &mut [C64]| {
            let h = &h0 + &x * C64::new(sched.drive(t), 0.0);
            let v = h * CVector::from_column_slice(y);
            for (d, z) in dy.iter_mut().zip(v.iter()) {
                *d = C64::new(0.0, -1.0) * z;
            }
        };
        integrate_piecewise(&mut f, &[0.0, 2.0, 4.0], &mut y, OdeOptions::pure().with_rtol(1e-11), |_, _, _| {}).unwrap();
        let brute = CVector::from_vec(y);
        let diff = (&brute - &lab).norm();
        assert!(diff < 1e-6, "lab vs interaction picture {diff:e}");
        assert!((1.0 - linalg::inner(&psi0, &lab).norm()) > 1e-3, "drive had no effect");
    }

    #[test]
    fn zero_drive_propagator_is_diagonal() {
        let sys = system(0.8, 10);
        let sched = synthesize_single_qubit(&GateSpec::hadamard(), &sys.spectrum, 2, 10.0).unwrap().silenced();
        let b = vec![
            mu_code_state(&sys, [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]),
            mu_code_state(&sys, [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]),
        ];
        let u = extract_propagator(&sys, &sched, &b, &PropagationOptions::pure()).unwrap();
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-8 && (u[(1, 1)].norm() - 1.0).abs() < 1e-8);
        assert!(u[(0, 1)].norm() < 1e-8 && u[(1, 0)].norm() < 1e-8);
    }

    #[test]
    fn propagator_basis_permutation() {
        let sys = system(0.8, 10);
        let sched = synthesize_single_qubit(&GateSpec::hadamard(), &sys.spectrum, 2, 20.0).unwrap();
        let b0 = mu_code_state(&sys, [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let b1 = mu_code_state(&sys, [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        let opts = PropagationOptions::pure();
        let u = extract_propagator(&sys, &sched, &[b0.clone(), b1.clone()], &opts).unwrap();
        let v = extract_propagator(&sys, &sched, &[b1, b0], &opts).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((u[(i, j)] - v[(1 - i, 1 - j)]).norm() < 1e-7);
            }
        }
    }

    #[test]
    fn dissipator_structure() {
        let sys = system(0.8, 10);
        let basis = sys.drive_basis(Some(20));
        let rates = DecoherenceRates {
            kappa: 0.1,
            kappa_phi: 0.2,
            gamma_g: 0.3,
            gamma_mu: 0.4,
            gamma_g_phi: 0.5,
            gamma_mu_phi: 0.6,
        };
        let dis = lindblad_rates(&sys, &basis, &rates).unwrap();
        // nothing leaves the ground state
        assert!(dis.jumps.iter().all(|&(j, jp, _)| j > jp));
        assert!(dis.jumps.iter().all(|&(j, _, _)| j != 0));
        // each D[O] is trace preserving on a random Hermitian matrix
        let d = basis.dim();
        let rho = CMatrix::from_fn(d, d, |i, j| C64::new(((i * 7 + j * 3) % 5) as f64, (i as f64 - j as f64) * 0.1));
        let rho = &rho + rho.adjoint();
        for o in dis.operators() {
            let od = o.adjoint();
            let dr = &o * &rho * &od - (&rho * &od * &o + &od * &o * &rho) * C64::new(0.5, 0.0);
            assert!(dr.trace().norm() < 1e-12);
        }
        // the fast kernel agrees with explicit operators
        let kernel = DissipatorKernel::new(&dis);
        let flat: Vec<C64> = (0..d * d).map(|k| rho[(k / d, k % d)]).collect();
        let mut fast = vec![C64::new(0.0, 0.0); d * d];
        kernel.apply(&flat, &mut fast);
        let mut slow = CMatrix::zeros(d, d);
        for o in dis.operators() {
            let od = o.adjoint();
            slow += &o * &rho * &od - (&rho * &od * &o + &od * &o * &rho) * C64::new(0.5, 0.0);
        }
        for k in 0..d * d {
            assert!((fast[k] - slow[(k / d, k % d)]).norm() < 1e-12);
        }
        assert!(lindblad_rates(&sys, &basis, &DecoherenceRates::zero()).unwrap().is_empty());
    }

    #[test]
    fn bare_cavity_decay_rates() {
        let model = RabiModel::single_mode(1.0, 0.7, 0.0, 6).unwrap().with_omega_mu(-3.3);
        let sys = System::new(model).unwrap();
        let basis = sys.drive_basis(None);
        let rates = DecoherenceRates { kappa: 0.01, ..DecoherenceRates::zero() };
        let dis = lindblad_rates(&sys, &basis, &rates).unwrap();
        for &(j, jp, r) in &dis.jumps {
            let a = sys.layout().mode_annihilation(0);
            let me = linalg::inner(&basis.vectors.column(jp).into_owned(), &(&a * basis.vectors.column(j)));
            assert!((r - 0.01 * me.norm_sqr()).abs() < 1e-14);
        }
        assert!(!dis.jumps.is_empty());
    }

    #[test]
    fn master_without_rates_matches_schrodinger() {
        let sys = system(0.8, 12);
        let sched = synthesize_single_qubit(&GateSpec::hadamard(), &sys.spectrum, 2, 20.0).unwrap();
        let psi0 = mu_code_state(&sys, [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let mut opts = PropagationOptions::master();
        opts.basis_size = Some(24);
        let rho0 = &psi0 * psi0.adjoint();
        let res = propagate_master(&sys, &sched, &rho0, &DecoherenceRates::zero(), &opts).unwrap();
        let mut popts = PropagationOptions::pure();
        popts.basis_size = Some(24);
        let pure = propagate_schrodinger(&sys, &sched, &psi0, &popts).unwrap();
        let v = pure.final_vector().unwrap();
        let f = (v.adjoint() * res.final_density() * &v)[(0, 0)].re;
        assert!((f - 1.0).abs() < 1e-7, "{f}");
        assert!(res.norm_drift < 1e-7);
    }
}
