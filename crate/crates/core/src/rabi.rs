//! Quantum Rabi model with an extra uncoupled atomic level |μ⟩.
//!
//! H_0 = H_R + ω_μ|μ⟩⟨μ| with
//! H_R = Σ_i ω_i a_i†a_i + (ω_q/2)σ_g^z + Σ_i g_i(a_i + a_i†)σ_g^x.
//! Units are rad/ns throughout (ħ = 1).

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, HilbertLayout, E, G, MU};

/// Default single-mode Fock cutoff.
pub const DEFAULT_CUTOFF: usize = 20;
/// Default per-mode cutoff for the bimodal cavity.
pub const DEFAULT_BIMODAL_CUTOFF: usize = 10;
/// μ-population threshold separating the two sectors.
pub const SECTOR_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CavityMode {
    /// Mode frequency (rad/ns).
    pub omega: f64,
    /// Coupling to the g–e transition (rad/ns).
    pub g: f64,
    pub cutoff: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RabiModel {
    pub modes: Vec<CavityMode>,
    pub omega_q: f64,
    /// Energy of |μ⟩ (rad/ns). Not required to be positive.
    pub omega_mu: f64,
    /// True when `omega_mu` was placed by [`RabiModel::tuned`].
    pub omega_mu_tuned: bool,
}

impl RabiModel {
    pub fn single_mode(omega_c: f64, omega_q: f64, g: f64, cutoff: usize) -> Result<Self> {
        Self::new(
            vec![CavityMode { omega: omega_c, g, cutoff }],
            omega_q,
        )
    }

    pub fn bimodal(
        omega_a: f64,
        omega_b: f64,
        omega_q: f64,
        g_a: f64,
        g_b: f64,
        cutoff: usize,
    ) -> Result<Self> {
        Self::new(
            vec![
                CavityMode { omega: omega_a, g: g_a, cutoff },
                CavityMode { omega: omega_b, g: g_b, cutoff },
            ],
            omega_q,
        )
    }

    pub fn new(modes: Vec<CavityMode>, omega_q: f64) -> Result<Self> {
        let model = Self {
            modes,
            omega_q,
            omega_mu: 0.0,
            omega_mu_tuned: false,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        HilbertLayout::new(self.modes.iter().map(|m| m.cutoff).collect())?;
        if !(self.omega_q > 0.0 && self.omega_q.is_finite()) {
            return Err(Error::Configuration(format!("omega_q = {} must be > 0", self.omega_q)));
        }
        for m in &self.modes {
            if !(m.omega > 0.0 && m.omega.is_finite()) {
                return Err(Error::Configuration(format!("mode frequency {} must be > 0", m.omega)));
            }
            if !(m.g >= 0.0 && m.g.is_finite()) {
                return Err(Error::Configuration(format!("coupling {} must be >= 0", m.g)));
            }
        }
        if !self.omega_mu.is_finite() {
            return Err(Error::Configuration("omega_mu must be finite".into()));
        }
        Ok(())
    }

    pub fn layout(&self) -> HilbertLayout {
        HilbertLayout {
            fock_cutoffs: self.modes.iter().map(|m| m.cutoff).collect(),
        }
    }

    pub fn mode_omegas(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.omega).collect()
    }

    pub fn with_omega_mu(mut self, omega_mu: f64) -> Self {
        self.omega_mu = omega_mu;
        self.omega_mu_tuned = false;
        self
    }

    /// Same model with every coupling replaced by `g`.
    pub fn with_coupling(&self, g: f64) -> Self {
        let mut m = self.clone();
        for mode in &mut m.modes {
            mode.g = g;
        }
        m
    }

    /// Place ω_μ so the highest scheduled μ level sits 0.25 ω_1 below the
    /// intermediate dressed state `m`.
    ///
    /// Single mode: ω_μ = E_m − (k_max + 0.25)ω_c. Bimodal: the k_max photons
    /// are counted on both modes, ω_μ = E'_m − k_max(ω_a + ω_b) − 0.25ω_a.
    pub fn tuned(mut self, m: usize, k_max: usize) -> Result<Self> {
        let spec = dressed_spectrum(&self)?;
        let e_m = *spec.energies.get(m).ok_or_else(|| {
            Error::Configuration(format!("dressed level {m} outside spectrum"))
        })?;
        let omegas = self.mode_omegas();
        self.omega_mu = if omegas.len() == 1 {
            choose_omega_mu(e_m, k_max, omegas[0])
        } else {
            e_m - k_max as f64 * omegas.iter().sum::<f64>() - 0.25 * omegas[0]
        };
        self.omega_mu_tuned = true;
        Ok(self)
    }

    /// H_R on the full three-level space. The cavity term acts on every atomic
    /// level, so |μ⟩|n⟩ carries n·ω_c.
    pub fn build_hr(&self) -> CMatrix {
        let layout = self.layout();
        let dim = layout.total_dim();
        let mut h = CMatrix::zeros(dim, dim);
        let ge = layout.atom_op(G, E) + layout.atom_op(E, G);
        let sz = layout.atom_op(E, E) - layout.atom_op(G, G);
        h += sz * C64::new(self.omega_q / 2.0, 0.0);
        for (i, mode) in self.modes.iter().enumerate() {
            let a = layout.mode_annihilation(i);
            let num = a.adjoint() * &a;
            h += num * C64::new(mode.omega, 0.0);
            let x = &a + a.adjoint();
            h += &ge * x * C64::new(mode.g, 0.0);
        }
        h
    }

    /// H_0 = H_R + ω_μ|μ⟩⟨μ|.
    pub fn build_h0(&self) -> Result<CMatrix> {
        self.validate()?;
        let layout = self.layout();
        let mut h = self.build_hr();
        h += layout.atom_op(MU, MU) * C64::new(self.omega_mu, 0.0);
        Ok(h)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sector {
    /// Dressed state ζ_m of H_R.
    Dressed(usize),
    /// Noninteracting |μ⟩|n⟩, flat cavity index.
    Mu(usize),
}

/// All eigenstates of H_0 in ascending energy, with their sector labels.
#[derive(Clone, Debug)]
pub struct Eigenbasis {
    pub energies: Vec<f64>,
    pub sectors: Vec<Sector>,
    /// Eigenvectors as columns on the full space.
    pub vectors: CMatrix,
}

impl Eigenbasis {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Keep only the lowest `k` eigenstates.
    pub fn truncated(&self, k: usize) -> Eigenbasis {
        let k = k.min(self.dim());
        Eigenbasis {
            energies: self.energies[..k].to_vec(),
            sectors: self.sectors[..k].to_vec(),
            vectors: self.vectors.columns(0, k).into_owned(),
        }
    }

    pub fn position(&self, sector: Sector) -> Option<usize> {
        self.sectors.iter().position(|&s| s == sector)
    }
}

/// Dressed-state data of a [`RabiModel`].
#[derive(Clone, Debug)]
pub struct DressedSpectrum {
    pub layout: HilbertLayout,
    pub omega_mu: f64,
    pub mode_omegas: Vec<f64>,
    /// Dressed energies E_m, ascending.
    pub energies: Vec<f64>,
    /// Dressed states ζ_m on the full space.
    pub states: Vec<CVector>,
    /// c_coeffs[m][n] = ⟨ζ_m|g⟩|n⟩ with n a flat cavity index.
    pub c_coeffs: Vec<Vec<f64>>,
    /// d_coeffs[m][n] = ⟨ζ_m|e⟩|n⟩.
    pub d_coeffs: Vec<Vec<f64>>,
    /// Energies ω_μ + Σ n_i ω_i of the noninteracting states, flat cavity index.
    pub mu_energies: Vec<f64>,
}

impl DressedSpectrum {
    pub fn dressed_count(&self) -> usize {
        self.energies.len()
    }

    /// c coefficient for a Fock multi-index.
    pub fn c(&self, m: usize, ns: &[usize]) -> f64 {
        self.c_coeffs[m][self.layout.fock_index(ns)]
    }

    pub fn d(&self, m: usize, ns: &[usize]) -> f64 {
        self.d_coeffs[m][self.layout.fock_index(ns)]
    }

    /// Energy of |μ⟩|ns⟩.
    pub fn mu_energy(&self, ns: &[usize]) -> f64 {
        self.mu_energies[self.layout.fock_index(ns)]
    }

    /// Both sectors merged, ascending in energy.
    pub fn eigenbasis(&self) -> Eigenbasis {
        let dim = self.layout.total_dim();
        let mut entries: Vec<(f64, Sector)> = self
            .energies
            .iter()
            .enumerate()
            .map(|(m, &e)| (e, Sector::Dressed(m)))
            .chain(
                self.mu_energies
                    .iter()
                    .enumerate()
                    .map(|(n, &e)| (e, Sector::Mu(n))),
            )
            .collect();
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut vectors = CMatrix::zeros(dim, entries.len());
        for (j, (_, sector)) in entries.iter().enumerate() {
            match *sector {
                Sector::Dressed(m) => vectors.set_column(j, &self.states[m]),
                Sector::Mu(n) => vectors[(MU * self.layout.cavity_dim() + n, j)] = C64::new(1.0, 0.0),
            }
        }
        Eigenbasis {
            energies: entries.iter().map(|e| e.0).collect(),
            sectors: entries.iter().map(|e| e.1).collect(),
            vectors,
        }
    }
}

/// Diagonalise H_0 and split its eigenstates into the dressed and μ sectors.
///
/// H_0 is block diagonal in the atomic μ projector, so the {g, e} block is
/// diagonalised on its own; this keeps accidental degeneracies between the
/// two sectors from mixing eigenvectors.
pub fn dressed_spectrum(model: &RabiModel) -> Result<DressedSpectrum> {
    let h0 = model.build_h0()?;
    let defect = linalg::hermiticity_defect(&h0);
    if defect > linalg::HERMITIAN_TOL {
        return Err(Error::Contract(format!("H_0 not Hermitian: {defect:e}")));
    }
    let layout = model.layout();
    let nc = layout.cavity_dim();
    // off-diagonal μ couplings must vanish identically
    let mu_block_leak = (0..nc)
        .flat_map(|i| (nc..3 * nc).map(move |j| (i, j)))
        .fold(0.0_f64, |m, (i, j)| m.max(h0[(i, j)].norm()));
    if mu_block_leak != 0.0 {
        return Err(Error::Contract(format!(
            "H_0 couples |mu> to the interacting sector ({mu_block_leak:e})"
        )));
    }
    let block = h0.view((nc, nc), (2 * nc, 2 * nc)).into_owned();
    let eig = linalg::eigh(&block)?;

    let mut energies = Vec::with_capacity(2 * nc);
    let mut states = Vec::with_capacity(2 * nc);
    let mut c_coeffs = Vec::with_capacity(2 * nc);
    let mut d_coeffs = Vec::with_capacity(2 * nc);
    for m in 0..2 * nc {
        let col = eig.vectors.column(m);
        let mut full = CVector::zeros(3 * nc);
        full.rows_mut(nc, 2 * nc).copy_from(&col);
        let mu_pop: f64 = (0..nc).map(|i| full[i].norm_sqr()).sum();
        if mu_pop > SECTOR_TOL {
            return Err(Error::Classification { index: m, mu_population: mu_pop });
        }
        let imag = col.iter().fold(0.0_f64, |a, z| a.max(z.im.abs()));
        if imag > 1e-12 {
            return Err(Error::Numeric(format!("dressed state {m} is not real ({imag:e})")));
        }
        energies.push(eig.values[m]);
        c_coeffs.push((0..nc).map(|n| full[layout.index(G, &layout.fock_numbers(n))].re).collect());
        d_coeffs.push((0..nc).map(|n| full[layout.index(E, &layout.fock_numbers(n))].re).collect());
        states.push(full);
    }
    let omegas = model.mode_omegas();
    let mu_energies = (0..nc)
        .map(|n| {
            let ns = layout.fock_numbers(n);
            model.omega_mu + ns.iter().zip(&omegas).map(|(&k, &w)| k as f64 * w).sum::<f64>()
        })
        .collect();
    Ok(DressedSpectrum {
        layout,
        omega_mu: model.omega_mu,
        mode_omegas: omegas,
        energies,
        states,
        c_coeffs,
        d_coeffs,
        mu_energies,
    })
}

/// ω_μ = E_m − (k_max + 0.25)ω_c.
pub fn choose_omega_mu(energy_m: f64, k_max: usize, omega_c: f64) -> f64 {
    energy_m - (k_max as f64 + 0.25) * omega_c
}

/// Tone frequencies ω_k = E_m − ω_μ − Σ_i k_i ω_i for each photon multi-index.
pub fn drive_frequencies(spectrum: &DressedSpectrum, m: usize, ks: &[Vec<usize>]) -> Result<Vec<f64>> {
    let e_m = *spectrum
        .energies
        .get(m)
        .ok_or_else(|| Error::Configuration(format!("dressed level {m} outside spectrum")))?;
    ks.iter()
        .map(|k| {
            if k.len() != spectrum.mode_omegas.len() {
                return Err(Error::Configuration(format!("photon index {k:?} does not match mode count")));
            }
            let w = e_m
                - spectrum.omega_mu
                - k.iter().zip(&spectrum.mode_omegas).map(|(&n, &w)| n as f64 * w).sum::<f64>();
            if w > 0.0 {
                Ok(w)
            } else {
                Err(Error::Configuration(format!("tone {k:?} has nonpositive frequency {w}")))
            }
        })
        .collect()
}

/// Dressed spectra over a coupling sweep with overlap-based level tracking.
#[derive(Clone, Debug)]
pub struct SpectrumSweep {
    pub g_values: Vec<f64>,
    /// energies[i][m]: m-th dressed energy (ascending) at g_values[i].
    pub energies: Vec<Vec<f64>>,
    /// c[i][m][n] for the ascending-index dressed states.
    pub c_coeffs: Vec<Vec<Vec<f64>>>,
    /// labels[i][m]: tracked level label of the m-th ascending state at g_values[i].
    pub labels: Vec<Vec<usize>>,
    /// Smallest matched overlap between consecutive columns.
    pub min_overlap: f64,
}

pub fn spectrum_sweep(template: &RabiModel, g_values: &[f64]) -> Result<SpectrumSweep> {
    if g_values.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Configuration("g_values must be ascending".into()));
    }
    use rayon::prelude::*;
    let spectra: Vec<DressedSpectrum> = g_values
        .par_iter()
        .map(|&g| dressed_spectrum(&template.with_coupling(g)))
        .collect::<Result<_>>()?;

    let mut labels: Vec<Vec<usize>> = Vec::with_capacity(spectra.len());
    let mut min_overlap = 1.0_f64;
    for (i, spec) in spectra.iter().enumerate() {
        if i == 0 {
            labels.push((0..spec.dressed_count()).collect());
            continue;
        }
        let prev = &spectra[i - 1];
        let overlaps = overlap_matrix(prev, spec);
        let matching = greedy_matching(&overlaps);
        let mut lab = vec![0; spec.dressed_count()];
        for (a, b) in matching.iter().enumerate() {
            lab[*b] = labels[i - 1][a];
            min_overlap = min_overlap.min(overlaps[(a, *b)]);
        }
        labels.push(lab);
    }
    Ok(SpectrumSweep {
        g_values: g_values.to_vec(),
        energies: spectra.iter().map(|s| s.energies.clone()).collect(),
        c_coeffs: spectra.iter().map(|s| s.c_coeffs.clone()).collect(),
        labels,
        min_overlap,
    })
}

fn overlap_matrix(a: &DressedSpectrum, b: &DressedSpectrum) -> DMatrix<f64> {
    let n = a.dressed_count();
    DMatrix::from_fn(n, n, |i, j| linalg::inner(&a.states[i], &b.states[j]).norm())
}

/// Greedy maximum-overlap assignment; returns, for each row, its column.
fn greedy_matching(overlaps: &DMatrix<f64>) -> Vec<usize> {
    let n = overlaps.nrows();
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    pairs.sort_by(|&(i, j), &(k, l)| overlaps[(k, l)].total_cmp(&overlaps[(i, j)]));
    let mut row_used = vec![false; n];
    let mut col_used = vec![false; n];
    let mut out = vec![usize::MAX; n];
    for (i, j) in pairs {
        if !row_used[i] && !col_used[j] {
            row_used[i] = true;
            col_used[j] = true;
            out[i] = j;
        }
    }
    out
}

/// Coupling at which |c_n^m| (ascending-index labelling) first exceeds
/// `threshold`, located by bisection on [g_lo, g_hi] to within `tol`.
pub fn locate_coefficient_jump(
    template: &RabiModel,
    m: usize,
    n: usize,
    g_lo: f64,
    g_hi: f64,
    threshold: f64,
    tol: f64,
) -> Result<f64> {
    let above = |g: f64| -> Result<bool> {
        let s = dressed_spectrum(&template.with_coupling(g))?;
        Ok(s.c_coeffs[m][n].abs() > threshold)
    };
    let (mut lo, mut hi) = (g_lo, g_hi);
    if above(lo)? || !above(hi)? {
        return Err(Error::Numeric(format!(
            "no coefficient jump of c_{n}^{m} bracketed in [{g_lo}, {g_hi}]"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if above(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const WC: f64 = 2.0 * PI * 6.25;

    #[test]
    fn decoupled_single_mode_spectrum() {
        let model = RabiModel::single_mode(1.0, 0.7, 0.0, 8).unwrap().with_omega_mu(-2.3);
        let s = dressed_spectrum(&model).unwrap();
        let mut expected: Vec<f64> = (0..8)
            .flat_map(|n| [n as f64 - 0.35, n as f64 + 0.35])
            .collect();
        expected.sort_by(f64::total_cmp);
        for (e, x) in s.energies.iter().zip(&expected) {
            assert!((e - x).abs() < 1e-12);
        }
        for n in 0..8 {
            assert!((s.mu_energies[n] - (-2.3 + n as f64)).abs() < 1e-12);
        }
        // lowest dressed state is |g,0>
        assert!((s.c_coeffs[0][0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decoupled_bimodal_spectrum() {
        let model = RabiModel::bimodal(1.0, 0.9, 0.8, 0.0, 0.0, 4).unwrap().with_omega_mu(0.1);
        let s = dressed_spectrum(&model).unwrap();
        let mut expected = Vec::new();
        for na in 0..4 {
            for nb in 0..4 {
                let base = na as f64 + 0.9 * nb as f64;
                expected.push(base - 0.4);
                expected.push(base + 0.4);
            }
        }
        expected.sort_by(f64::total_cmp);
        for (e, x) in s.energies.iter().zip(&expected) {
            assert!((e - x).abs() < 1e-12);
        }
        assert!((s.mu_energy(&[2, 3]) - (0.1 + 2.0 + 2.7)).abs() < 1e-12);
    }

    #[test]
    fn bloch_siegert_ground_shift() {
        let model = RabiModel::single_mode(WC, WC, 0.8 * WC, 20).unwrap();
        let s = dressed_spectrum(&model).unwrap();
        assert!(s.energies[0] < -WC / 2.0);
        // oracle: plain eigh of the interacting block assembled by hand
        let nc = 20;
        let mut h = CMatrix::zeros(2 * nc, 2 * nc);
        for n in 0..nc {
            h[(n, n)] = C64::new(n as f64 * WC - WC / 2.0, 0.0);
            h[(nc + n, nc + n)] = C64::new(n as f64 * WC + WC / 2.0, 0.0);
            if n + 1 < nc {
                let v = 0.8 * WC * ((n + 1) as f64).sqrt();
                h[(n, nc + n + 1)] = C64::new(v, 0.0);
                h[(nc + n + 1, n)] = C64::new(v, 0.0);
                h[(n + 1, nc + n)] = C64::new(v, 0.0);
                h[(nc + n, n + 1)] = C64::new(v, 0.0);
            }
        }
        let e = linalg::eigh(&h).unwrap();
        for m in 0..10 {
            assert!((e.values[m] - s.energies[m]).abs() < 1e-9 * WC);
        }
    }

    #[test]
    fn dressed_state_normalisation_and_parity() {
        let model = RabiModel::single_mode(WC, WC, 0.8 * WC, 20).unwrap();
        let s = dressed_spectrum(&model).unwrap();
        for m in 0..s.dressed_count() {
            let norm: f64 = s.c_coeffs[m].iter().chain(&s.d_coeffs[m]).map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-9);
            // g-components and e-components live on opposite photon parity
            let c_par: Vec<usize> = (0..20).filter(|&n| s.c_coeffs[m][n].abs() > 1e-9).map(|n| n % 2).collect();
            let d_par: Vec<usize> = (0..20).filter(|&n| s.d_coeffs[m][n].abs() > 1e-9).map(|n| n % 2).collect();
            assert!(c_par.windows(2).all(|w| w[0] == w[1]));
            assert!(d_par.windows(2).all(|w| w[0] == w[1]));
            if let (Some(c), Some(d)) = (c_par.first(), d_par.first()) {
                assert_ne!(c, d);
            }
        }
    }

    #[test]
    fn zeta2_code_coefficients_at_strong_coupling() {
        let model = RabiModel::single_mode(WC, WC, 0.8 * WC, 20).unwrap();
        let s = dressed_spectrum(&model).unwrap();
        for n in [0, 2, 4] {
            assert!(s.c_coeffs[2][n].abs() > 0.1, "c_{n}^2 = {}", s.c_coeffs[2][n]);
        }
    }

    #[test]
    fn weak_coupling_limit() {
        let model = RabiModel::single_mode(WC, WC, 1e-6 * WC, 12).unwrap();
        let s = dressed_spectrum(&model).unwrap();
        assert!((s.c_coeffs[0][0].abs() - 1.0).abs() < 1e-9);
        for n in 1..12 {
            assert!(s.c_coeffs[0][n].abs() < 1e-5);
        }
    }

    #[test]
    fn omega_mu_and_tones() {
        assert_eq!(choose_omega_mu(10.0, 4, 1.0), 5.75);
        let model = RabiModel::single_mode(1.0, 1.0, 0.8, 20).unwrap().tuned(2, 4).unwrap();
        let s = dressed_spectrum(&model).unwrap();
        assert!((s.energies[2] - (s.mu_energy(&[4]) + 0.25)).abs() < 1e-12);
        let w = drive_frequencies(&s, 2, &[vec![0], vec![2], vec![4]]).unwrap();
        assert!((w[2] - 0.25).abs() < 1e-12);
        assert!((w[0] - w[1] - 2.0).abs() < 1e-12 && (w[1] - w[2] - 2.0).abs() < 1e-12);
        assert!(drive_frequencies(&s, 2, &[vec![5]]).is_err());
    }

    #[test]
    fn bimodal_tones_distinct() {
        let model = RabiModel::bimodal(1.0, 0.9, 1.0, 1.3, 1.3, 6).unwrap().tuned(0, 4).unwrap();
        let s = dressed_spectrum(&model).unwrap();
        let ks: Vec<Vec<usize>> = [0, 2, 4]
            .iter()
            .flat_map(|&a| [0, 2, 4].iter().map(move |&b| vec![a, b]))
            .collect();
        let w = drive_frequencies(&s, 0, &ks).unwrap();
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                assert!((w[i] - w[j]).abs() >= 0.1 - 1e-12);
            }
        }
        assert!((w[8] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn sweep_tracking_is_a_bijection() {
        let model = RabiModel::single_mode(1.0, 0.7, 0.0, 12).unwrap();
        let gs: Vec<f64> = (0..=40).map(|i| i as f64 * 0.01).collect();
        let sw = spectrum_sweep(&model, &gs).unwrap();
        for lab in &sw.labels {
            let mut sorted = lab.clone();
            sorted.sort();
            assert_eq!(sorted, (0..24).collect::<Vec<_>>());
        }
        assert!(sw.min_overlap >= 0.9);
        assert!(spectrum_sweep(&model, &[0.2, 0.1]).is_err());
    }
}
