//! Binomial codewords, photon loss and bright/dark bases.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, cis, CMatrix, CVector};

/// Logical codewords of one cavity mode, as Fock-space vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeWords {
    pub zero: CVector,
    pub one: CVector,
    pub cutoff: usize,
}

impl CodeWords {
    /// Map logical amplitudes (a₀, a₁) to a₀|0̃⟩ + a₁|1̃⟩.
    pub fn encode(&self, logical: &CVector) -> CVector {
        &self.zero * logical[0] + &self.one * logical[1]
    }

    /// Columns |0̃⟩, |1̃⟩.
    pub fn basis(&self) -> Vec<CVector> {
        vec![self.zero.clone(), self.one.clone()]
    }
}

/// |0̃⟩ = (|0⟩ + |4⟩)/√2, |1̃⟩ = |2⟩.
pub fn binomial_codewords(cutoff: usize) -> Result<CodeWords> {
    if cutoff < 5 {
        return Err(Error::InvalidDimension(format!("binomial code needs cutoff >= 5, got {cutoff}")));
    }
    let mut zero = CVector::zeros(cutoff);
    zero[0] = C64::new(FRAC_1_SQRT_2, 0.0);
    zero[4] = C64::new(FRAC_1_SQRT_2, 0.0);
    let mut one = CVector::zeros(cutoff);
    one[2] = C64::new(1.0, 0.0);
    Ok(CodeWords { zero, one, cutoff })
}

/// Product basis (0̃0̃, 0̃1̃, 1̃0̃, 1̃1̃) on the two-mode cavity space, mode a slow.
pub fn two_mode_basis(a: &CodeWords, b: &CodeWords) -> Vec<CVector> {
    let ka = a.basis();
    let kb = b.basis();
    let mut out = Vec::with_capacity(4);
    for x in &ka {
        for y in &kb {
            out.push(x.kronecker(y));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct KnillLaflammeReport {
    /// values[i][j] = ⟨i|a†a|j⟩ over the two codewords.
    pub values: [[C64; 2]; 2],
    pub pass: bool,
}

pub fn knill_laflamme_check(code: &CodeWords) -> KnillLaflammeReport {
    let words = code.basis();
    let num = CVector::from_fn(code.cutoff, |n, _| C64::new(n as f64, 0.0));
    let mut values = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let nj = words[j].component_mul(&num);
            values[i][j] = linalg::inner(&words[i], &nj);
        }
    }
    let tol = 1e-10;
    let pass = (values[0][0] - values[1][1]).norm() <= tol
        && values[0][1].norm() <= tol
        && values[1][0].norm() <= tol;
    KnillLaflammeReport { values, pass }
}

/// a|ψ⟩/‖a|ψ⟩‖ on a single-mode Fock vector.
pub fn apply_photon_loss(state: &CVector) -> Result<CVector> {
    let n = state.len();
    let mut out = CVector::zeros(n);
    for k in 1..n {
        out[k - 1] = state[k] * (k as f64).sqrt();
    }
    let norm = out.norm();
    if norm < 1e-14 {
        return Err(Error::ZeroNorm("photon loss on a vacuum-only state".into()));
    }
    Ok(out / C64::new(norm, 0.0))
}

/// Holonomic gate parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GateSpec {
    Single { theta_s: f64, theta: f64, phi: f64 },
    Two { theta_s: f64, theta0: f64, theta1: f64, theta2: f64, phi: f64 },
}

impl GateSpec {
    pub fn single(theta_s: f64, theta: f64, phi: f64) -> Result<Self> {
        let s = GateSpec::Single { theta_s, theta, phi };
        s.validate()?;
        Ok(s)
    }

    pub fn two(theta_s: f64, theta0: f64, theta1: f64, theta2: f64, phi: f64) -> Result<Self> {
        let s = GateSpec::Two { theta_s, theta0, theta1, theta2, phi };
        s.validate()?;
        Ok(s)
    }

    /// (Θ_s, θ, φ) = (π/2, π/4, 0).
    pub fn hadamard() -> Self {
        GateSpec::Single { theta_s: PI / 2.0, theta: PI / 4.0, phi: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let (ts, rest): (f64, Vec<f64>) = match *self {
            GateSpec::Single { theta_s, theta, phi } => (theta_s, vec![theta, phi]),
            GateSpec::Two { theta_s, theta0, theta1, theta2, phi } => {
                (theta_s, vec![theta0, theta1, theta2, phi])
            }
        };
        if !ts.is_finite() || rest.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidTarget("gate angles must be finite".into()));
        }
        if !(ts > -PI && ts <= PI) {
            return Err(Error::InvalidTarget(format!("theta_s = {ts} outside (-pi, pi]")));
        }
        Ok(())
    }

    pub fn theta_s(&self) -> f64 {
        match *self {
            GateSpec::Single { theta_s, .. } | GateSpec::Two { theta_s, .. } => theta_s,
        }
    }

    pub fn phi(&self) -> f64 {
        match *self {
            GateSpec::Single { phi, .. } | GateSpec::Two { phi, .. } => phi,
        }
    }

    /// Logical dimension (2 or 4).
    pub fn dim(&self) -> usize {
        match self {
            GateSpec::Single { .. } => 2,
            GateSpec::Two { .. } => 4,
        }
    }
}

/// Single-qubit bright and dark states in the (|0̃⟩, |1̃⟩) basis.
#[derive(Clone, Debug, PartialEq)]
pub struct BrightDark {
    pub bright: CVector,
    pub dark: CVector,
}

/// |b⟩ = e^{−iφ}sin(θ/2)|0̃⟩ + cos(θ/2)|1̃⟩, |d⟩ = e^{−iφ}cos(θ/2)|0̃⟩ − sin(θ/2)|1̃⟩.
pub fn bright_dark(spec: &GateSpec) -> Result<BrightDark> {
    let GateSpec::Single { theta, phi, .. } = *spec else {
        return Err(Error::InvalidTarget("bright_dark needs a single-qubit spec".into()));
    };
    let (s, c) = (theta / 2.0).sin_cos();
    let e = cis(-phi);
    Ok(BrightDark {
        bright: CVector::from_vec(vec![e * s, C64::new(c, 0.0)]),
        dark: CVector::from_vec(vec![e * c, C64::new(-s, 0.0)]),
    })
}

/// Two-qubit bright state and its three orthogonal partners, basis
/// (0̃0̃, 0̃1̃, 1̃0̃, 1̃1̃).
#[derive(Clone, Debug, PartialEq)]
pub struct BrightDarkTwo {
    pub bright: CVector,
    pub d1: CVector,
    pub d2: CVector,
    pub d3: CVector,
}

impl BrightDarkTwo {
    pub fn as_columns(&self) -> CMatrix {
        CMatrix::from_columns(&[self.bright.clone(), self.d1.clone(), self.d2.clone(), self.d3.clone()])
    }
}

pub fn bright_dark_two_qubit(spec: &GateSpec) -> Result<BrightDarkTwo> {
    let GateSpec::Two { theta0, theta1, theta2, phi, .. } = *spec else {
        return Err(Error::InvalidTarget("bright_dark_two_qubit needs a two-qubit spec".into()));
    };
    let (s0, c0) = (theta0 / 2.0).sin_cos();
    let (s1, c1) = (theta1 / 2.0).sin_cos();
    let (s2, c2) = (theta2 / 2.0).sin_cos();
    let e = cis(-phi);
    let v = |a: f64, b: f64, c: f64, d: f64| {
        CVector::from_vec(vec![e * a, C64::new(b, 0.0), C64::new(c, 0.0), C64::new(d, 0.0)])
    };
    Ok(BrightDarkTwo {
        bright: v(c0 * c1, c0 * s1, s0 * c2, s0 * s2),
        d1: v(s0 * c1, s0 * s1, -c0 * c2, -c0 * s2),
        d2: v(c0 * s1, -c0 * c1, s0 * s2, -s0 * c2),
        d3: v(s0 * s1, -s0 * c1, -c0 * s2, c0 * c2),
    })
}

/// Logical state that picks up e^{2iΘ_s} under a cyclic gate for `spec`.
///
/// Single qubit: cos(θ/2)|0̃⟩ + e^{−iφ}sin(θ/2)|1̃⟩, the vector for which the
/// printed single-qubit gate equals e^{−iΘ_s}[I + (e^{2iΘ_s} − 1)|v⟩⟨v|].
/// Two qubits: the bright state |b′⟩.
pub fn driven_state(spec: &GateSpec) -> CVector {
    match *spec {
        GateSpec::Single { theta, phi, .. } => {
            let (s, c) = (theta / 2.0).sin_cos();
            CVector::from_vec(vec![C64::new(c, 0.0), cis(-phi) * s])
        }
        GateSpec::Two { .. } => bright_dark_two_qubit(spec).expect("two-qubit spec").bright,
    }
}

/// Target gate in the logical product basis.
pub fn target_unitary(spec: &GateSpec) -> CMatrix {
    match *spec {
        GateSpec::Single { theta_s, theta, phi } => {
            let (ss, cs) = theta_s.sin_cos();
            let i = C64::new(0.0, 1.0);
            CMatrix::from_row_slice(
                2,
                2,
                &[
                    cs + i * ss * theta.cos(),
                    i * ss * theta.sin() * cis(phi),
                    i * ss * theta.sin() * cis(-phi),
                    cs - i * ss * theta.cos(),
                ],
            )
        }
        GateSpec::Two { theta_s, .. } => {
            let b = driven_state(spec);
            CMatrix::identity(4, 4) + linalg::outer(&b, &b) * (cis(2.0 * theta_s) - 1.0)
        }
    }
}
