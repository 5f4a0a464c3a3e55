//! Dense complex linear algebra and operator construction.
//!
//! Every operator in the crate is a plain `DMatrix<C64>`. Tensor products are
//! ordered atom ⊗ mode-a ⊗ mode-b, with atomic levels indexed μ = 0, g = 1,
//! e = 2 (see [`HilbertLayout`]).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const ORTHONORMAL_TOL: f64 = 1e-10;

pub const ATOM_LEVELS: usize = 3;
pub const MU: usize = 0;
pub const G: usize = 1;
pub const E: usize = 2;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cis(phase: f64) -> C64 {
    C64::from_polar(1.0, phase)
}

/// Tensor-product layout of the three-level atom and one or two cavity modes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertLayout {
    pub fock_cutoffs: Vec<usize>,
}

impl HilbertLayout {
    pub fn new(fock_cutoffs: Vec<usize>) -> Result<Self> {
        if fock_cutoffs.is_empty() || fock_cutoffs.len() > 2 {
            return Err(Error::InvalidLayout(format!(
                "expected one or two cavity modes, got {}",
                fock_cutoffs.len()
            )));
        }
        if let Some(&n) = fock_cutoffs.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidDimension(format!("fock cutoff {n} < 2")));
        }
        Ok(Self { fock_cutoffs })
    }

    pub fn modes(&self) -> usize {
        self.fock_cutoffs.len()
    }

    /// Dimension of the cavity factor.
    pub fn cavity_dim(&self) -> usize {
        self.fock_cutoffs.iter().product()
    }

    pub fn total_dim(&self) -> usize {
        ATOM_LEVELS * self.cavity_dim()
    }

    /// Flat cavity index of a Fock multi-index (mode a is the slow index).
    pub fn fock_index(&self, ns: &[usize]) -> usize {
        debug_assert_eq!(ns.len(), self.modes());
        ns.iter()
            .zip(&self.fock_cutoffs)
            .fold(0, |acc, (&n, &cut)| acc * cut + n)
    }

    /// Inverse of [`fock_index`](Self::fock_index).
    pub fn fock_numbers(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.modes()];
        for (slot, &cut) in out.iter_mut().zip(&self.fock_cutoffs).rev() {
            *slot = idx % cut;
            idx /= cut;
        }
        out
    }

    pub fn index(&self, atom: usize, ns: &[usize]) -> usize {
        atom * self.cavity_dim() + self.fock_index(ns)
    }

    /// Basis ket |atom⟩ ⊗ |ns⟩.
    pub fn ket(&self, atom: usize, ns: &[usize]) -> CVector {
        let mut v = CVector::zeros(self.total_dim());
        v[self.index(atom, ns)] = C64::new(1.0, 0.0);
        v
    }

    /// Embed a cavity state as |atom⟩ ⊗ |cavity⟩.
    pub fn embed(&self, atom: usize, cavity: &CVector) -> CVector {
        assert_eq!(cavity.len(), self.cavity_dim());
        let mut v = CVector::zeros(self.total_dim());
        let off = atom * self.cavity_dim();
        v.rows_mut(off, cavity.len()).copy_from(cavity);
        v
    }

    /// Annihilation operator of cavity mode `mode` on the full space.
    pub fn mode_annihilation(&self, mode: usize) -> CMatrix {
        let mut op = CMatrix::identity(ATOM_LEVELS, ATOM_LEVELS);
        for (k, &cut) in self.fock_cutoffs.iter().enumerate() {
            let factor = if k == mode {
                annihilation_unchecked(cut)
            } else {
                CMatrix::identity(cut, cut)
            };
            op = kron(&op, &factor);
        }
        op
    }

    /// Atomic operator |i⟩⟨j| ⊗ I_cavity.
    pub fn atom_op(&self, i: usize, j: usize) -> CMatrix {
        let mut a = CMatrix::zeros(ATOM_LEVELS, ATOM_LEVELS);
        a[(i, j)] = C64::new(1.0, 0.0);
        kron(&a, &CMatrix::identity(self.cavity_dim(), self.cavity_dim()))
    }
}

fn annihilation_unchecked(cutoff: usize) -> CMatrix {
    let mut a = CMatrix::zeros(cutoff, cutoff);
    for n in 1..cutoff {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Truncated annihilation operator with ⟨n−1|a|n⟩ = √n.
pub fn annihilation(cutoff: usize) -> Result<CMatrix> {
    if cutoff < 2 {
        return Err(Error::InvalidDimension(format!("cutoff {cutoff} < 2")));
    }
    Ok(annihilation_unchecked(cutoff))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn dagger(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Largest elementwise |A − A†|.
pub fn hermiticity_defect(a: &CMatrix) -> f64 {
    assert_eq!(a.nrows(), a.ncols());
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Hermitian eigendecomposition with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

/// Diagonalise a Hermitian matrix.
///
/// Eigenvalues come back in ascending order and each eigenvector is gauge-fixed
/// so that its largest-magnitude component is real and positive (ties go to
/// the lowest index).
pub fn eigh(h: &CMatrix) -> Result<Eigh> {
    if h.nrows() != h.ncols() {
        return Err(Error::Contract(format!(
            "eigh needs a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let defect = hermiticity_defect(h);
    if defect > HERMITIAN_TOL {
        return Err(Error::Contract(format!(
            "eigh input is not Hermitian (max |H - H†| = {defect:e})"
        )));
    }
    let n = h.nrows();
    let is_real = h.iter().all(|z| z.im == 0.0);
    let (values, vectors): (Vec<f64>, CMatrix) = if is_real {
        let re = h.map(|z| z.re);
        let eig = SymmetricEigen::new(re);
        (
            eig.eigenvalues.iter().copied().collect(),
            eig.eigenvectors.map(|x| C64::new(x, 0.0)),
        )
    } else {
        let eig = SymmetricEigen::new(h.clone());
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut sorted = CMatrix::zeros(n, n);
    let mut sorted_vals = Vec::with_capacity(n);
    for (col, &src) in order.iter().enumerate() {
        sorted_vals.push(values[src]);
        let mut v = vectors.column(src).into_owned();
        gauge_fix(&mut v);
        sorted.set_column(col, &v);
    }
    Ok(Eigh {
        values: sorted_vals,
        vectors: sorted,
    })
}

/// Rotate a vector so its largest-magnitude component is real positive.
pub fn gauge_fix(v: &mut CVector) {
    let mut best = 0usize;
    let mut best_abs = -1.0;
    for (i, z) in v.iter().enumerate() {
        // relative slack so near-ties resolve to the lowest index reproducibly
        if z.norm() > best_abs * (1.0 + 1e-9) {
            best_abs = z.norm();
            best = i;
        }
    }
    if best_abs > 0.0 {
        let phase = v[best].conj() / v[best].norm();
        *v *= phase;
        v[best] = C64::new(v[best].re, 0.0);
    }
}

/// Exponential of a Hermitian generator: exp(−i·scale·H).
pub fn expm_hermitian(h: &CMatrix, scale: f64) -> Result<CMatrix> {
    let eig = eigh(h)?;
    let n = h.nrows();
    let mut scaled = eig.vectors.clone();
    for j in 0..n {
        let ph = cis(-scale * eig.values[j]);
        for i in 0..n {
            scaled[(i, j)] *= ph;
        }
    }
    Ok(scaled * eig.vectors.adjoint())
}

/// Coherent-state amplitude ⟨n|α⟩ = e^{−|α|²/2} αⁿ/√n!.
pub fn coherent_amplitudes(alpha: C64, cutoff: usize) -> CVector {
    let mut v = CVector::zeros(cutoff);
    let mut amp = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..cutoff {
        v[n] = amp;
        amp *= alpha / ((n + 1) as f64).sqrt();
    }
    v
}

/// Displacement operator D(α) = exp(α a† − α* a) on a truncated Fock space.
///
/// Fails with [`Error::Truncation`] when D(α)|0⟩ deviates from the analytic
/// coherent state by more than 1e-6 in any component, or misses more than
/// 1e-6 of its norm.
pub fn displacement(alpha: C64, cutoff: usize) -> Result<CMatrix> {
    let a = annihilation(cutoff)?;
    // α a† − α* a = −i K with K = i(α a† − α* a) Hermitian
    let gen = (a.adjoint() * alpha - &a * alpha.conj()) * C64::new(0.0, 1.0);
    let d = expm_hermitian(&gen, 1.0)?;
    let exact = coherent_amplitudes(alpha, cutoff);
    let col = d.column(0);
    let deviation = col
        .iter()
        .zip(exact.iter())
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).norm()));
    let missing = 1.0 - exact.norm_squared();
    if deviation > 1e-6 || missing > 1e-6 {
        return Err(Error::Truncation(format!(
            "displacement alpha = {alpha} at cutoff {cutoff}: deviation {deviation:e}, missing norm {missing:e}"
        )));
    }
    Ok(d)
}

pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.dotc(b)
}

/// Outer product |a⟩⟨b|.
pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
    a * b.adjoint()
}

/// Largest elementwise deviation of V†V from the identity.
pub fn orthonormality_defect(v: &CMatrix) -> f64 {
    let g = v.adjoint() * v;
    let n = g.nrows();
    max_abs(&(g - CMatrix::identity(n, n)))
}

pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    u.nrows() == u.ncols() && orthonormality_defect(u) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(m: &[&[f64]]) -> CMatrix {
        let r = m.len();
        let c = m[0].len();
        CMatrix::from_fn(r, c, |i, j| C64::new(m[i][j], 0.0))
    }

    #[test]
    fn annihilation_entries() {
        let a2 = annihilation(2).unwrap();
        assert_eq!(a2, real(&[&[0.0, 1.0], &[0.0, 0.0]]));
        let a3 = annihilation(3).unwrap();
        assert!((a3[(1, 2)].re - 1.41421356).abs() < 1e-8);
        let a5 = annihilation(5).unwrap();
        let num = a5.adjoint() * &a5;
        for n in 0..5 {
            assert!((num[(n, n)].re - n as f64).abs() < 1e-14);
        }
        assert!(matches!(annihilation(1), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn commutator_has_single_corner_defect() {
        let n = 7;
        let a = annihilation(n).unwrap();
        let c = commutator(&a, &a.adjoint());
        for i in 0..n {
            for j in 0..n {
                let expected = match (i == j, i == n - 1) {
                    (true, true) => -((n - 1) as f64),
                    (true, false) => 1.0,
                    _ => 0.0,
                };
                assert!((c[(i, j)] - C64::new(expected, 0.0)).norm() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn kron_examples() {
        let i2 = CMatrix::identity(2, 2);
        let i3 = CMatrix::identity(3, 3);
        assert_eq!(kron(&i2, &i3), CMatrix::identity(6, 6));
        let sz = real(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let k = kron(&sz, &i2);
        let diag: Vec<f64> = (0..4).map(|i| k[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
        let a = annihilation(2).unwrap();
        let aa = kron(&a, &a);
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (i, j) == (0, 3) { 1.0 } else { 0.0 };
                assert_eq!(aa[(i, j)].re, expected);
            }
        }
    }

    #[test]
    fn eigh_examples() {
        let d = real(&[&[3.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 2.0]]);
        let e = eigh(&d).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);

        let sx = real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = eigh(&sx).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // gauge: largest component real positive, ties to the first index
        assert!((e.vectors[(0, 0)].re - s).abs() < 1e-12);
        assert!((e.vectors[(1, 0)].re + s).abs() < 1e-12);
        assert!((e.vectors[(0, 1)].re - s).abs() < 1e-12);
        assert!((e.vectors[(1, 1)].re - s).abs() < 1e-12);

        let bad = real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(eigh(&bad), Err(Error::Contract(_))));
    }

    #[test]
    fn eigh_complex_reconstructs() {
        let n = 12;
        let mut h = CMatrix::from_fn(n, n, |i, j| {
            C64::new(((i * 7 + j * 3) % 11) as f64 / 5.0, ((i + 2 * j) % 5) as f64 / 3.0)
        });
        h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
        let e = eigh(&h).unwrap();
        assert!(orthonormality_defect(&e.vectors) < 1e-10);
        let lam = CMatrix::from_diagonal(&CVector::from_iterator(
            n,
            e.values.iter().map(|&x| C64::new(x, 0.0)),
        ));
        let rec = &e.vectors * lam * e.vectors.adjoint();
        assert!(max_abs(&(rec - &h)) < 1e-9);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        for j in 0..n {
            let col = e.vectors.column(j);
            let (imax, _) = col
                .iter()
                .enumerate()
                .fold((0, -1.0), |(bi, bv), (i, z)| if z.norm() > bv * (1.0 + 1e-9) { (i, z.norm()) } else { (bi, bv) });
            assert!(col[imax].im.abs() < 1e-14 && col[imax].re > 0.0);
        }
    }

    #[test]
    fn displacement_examples() {
        let d0 = displacement(C64::new(0.0, 0.0), 10).unwrap();
        assert!(max_abs(&(d0 - CMatrix::identity(10, 10))) < 1e-14);

        let d1 = displacement(C64::new(1.0, 0.0), 30).unwrap();
        assert!((d1[(0, 0)].re - 0.60653066).abs() < 1e-8);

        let r2 = 2f64.sqrt();
        let dp = displacement(C64::new(r2, 0.0), 30).unwrap();
        let dm = displacement(C64::new(-r2, 0.0), 30).unwrap();
        assert!(max_abs(&(dp * dm - CMatrix::identity(30, 30))) < 1e-6);

        assert!(matches!(
            displacement(C64::new(3.0, 0.0), 8),
            Err(Error::Truncation(_))
        ));
    }

    #[test]
    fn layout_indexing() {
        let l = HilbertLayout::new(vec![4, 3]).unwrap();
        assert_eq!(l.total_dim(), 36);
        assert_eq!(l.fock_index(&[2, 1]), 7);
        assert_eq!(l.fock_numbers(7), vec![2, 1]);
        assert_eq!(l.index(E, &[2, 1]), 24 + 7);
        assert!(HilbertLayout::new(vec![]).is_err());
        assert!(HilbertLayout::new(vec![1]).is_err());
        // a on mode b commutes with a on mode a
        let a = l.mode_annihilation(0);
        let b = l.mode_annihilation(1);
        assert!(max_abs(&commutator(&a, &b)) < 1e-14);
    }
}
