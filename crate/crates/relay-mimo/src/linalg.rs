//! Dense complex matrices and the structured operations the rest of the
//! crate is built on: Kronecker products, column-wise vectorization and
//! Hermitian inverse square roots.
//!
//! Storage is column-major throughout, so `vec` is literally a reshape.

use nalgebra::{Complex, DMatrix};
use thiserror::Error;

pub type C64 = Complex<f64>;

/// Relative Frobenius tolerance for the Hermitian check in [`ComplexMatrix::herm_inv_sqrt`].
pub const HERMITIAN_TOL: f64 = 1e-8;
/// Pivot threshold (relative to the Frobenius norm) below which a matrix is
/// treated as singular.
pub const SINGULAR_TOL: f64 = 1e-12;
/// Default eigenvalue floor for inverse square roots.
pub const DEFAULT_EIG_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not Hermitian (relative asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Dense complex matrix, column-major, double precision.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<C64>,
}

impl ComplexMatrix {
    pub fn from_inner(inner: DMatrix<C64>) -> Self {
        Self { inner }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_inner(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_inner(DMatrix::identity(n, n))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self::from_inner(DMatrix::from_fn(rows, cols, f))
    }

    /// Builds from a row-major slice of (re, im) pairs; convenient in tests.
    pub fn from_rows(rows: usize, cols: usize, data: &[C64]) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self::from_fn(rows, cols, |r, c| data[r * cols + c])
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |r, c| if r == c { entries[r] } else { C64::new(0.0, 0.0) })
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.inner[(r, c)]
    }

    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.inner[(r, c)] = v;
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub fn is_finite(&self) -> bool {
        self.inner.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        Self::from_inner(self.inner.kronecker(&other.inner))
    }

    /// Column-wise vectorization: columns stacked top to bottom.
    pub fn vec(&self) -> ComplexMatrix {
        let n = self.rows() * self.cols();
        Self::from_inner(DMatrix::from_column_slice(n, 1, self.inner.as_slice()))
    }

    /// Inverse of `vec` for a target shape.
    pub fn unvec(&self, rows: usize, cols: usize) -> ComplexMatrix {
        assert_eq!(self.rows() * self.cols(), rows * cols);
        Self::from_inner(DMatrix::from_column_slice(rows, cols, self.inner.as_slice()))
    }

    pub fn transpose(&self) -> ComplexMatrix {
        Self::from_inner(self.inner.transpose())
    }

    pub fn conj(&self) -> ComplexMatrix {
        Self::from_inner(self.inner.map(|z| z.conj()))
    }

    pub fn conj_transpose(&self) -> ComplexMatrix {
        Self::from_inner(self.inner.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.inner.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: C64) -> ComplexMatrix {
        Self::from_inner(self.inner.map(|z| z * s))
    }

    pub fn scale_re(&self, s: f64) -> ComplexMatrix {
        self.scale(C64::new(s, 0.0))
    }

    /// Inverse via pivoted LU. Fails if any pivot falls below
    /// `SINGULAR_TOL * ||a||_F`.
    pub fn inverse(&self) -> Result<ComplexMatrix, LinalgError> {
        if self.rows() != self.cols() {
            return Err(LinalgError::DimensionMismatch(format!(
                "inverse of {}x{} matrix",
                self.rows(),
                self.cols()
            )));
        }
        let norm = self.frobenius_norm();
        let lu = self.inner.clone().lu();
        let u = lu.u();
        let min_pivot = (0..u.nrows().min(u.ncols()))
            .map(|i| u[(i, i)].norm())
            .fold(f64::INFINITY, f64::min);
        if !(min_pivot > SINGULAR_TOL * norm) {
            return Err(LinalgError::Singular);
        }
        lu.try_inverse().map(Self::from_inner).ok_or(LinalgError::Singular)
    }

    /// Solves `self * x = rhs`.
    pub fn solve(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        Ok(&self.inverse()? * rhs)
    }

    /// Real eigenvalues and eigenvectors of a Hermitian matrix.
    fn herm_eigen(&self) -> Result<(Vec<f64>, DMatrix<C64>), LinalgError> {
        let norm = self.frobenius_norm();
        let asym = (self.clone() - self.conj_transpose()).frobenius_norm();
        if norm > 0.0 && asym / norm > HERMITIAN_TOL {
            return Err(LinalgError::NotHermitian(asym / norm));
        }
        // Symmetrize so the eigensolver sees an exactly Hermitian input.
        let h = (self.inner.clone() + self.inner.adjoint()).map(|z| z * C64::new(0.5, 0.0));
        let eig = nalgebra::SymmetricEigen::new(h);
        Ok((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors))
    }

    /// Inverse matrix square root of a Hermitian PSD matrix, eigenvalues
    /// clamped to at least `eps`. Returns `M` with `M a Mᴴ ≈ I` on the
    /// non-degenerate eigenspace.
    pub fn herm_inv_sqrt(&self, eps: f64) -> Result<ComplexMatrix, LinalgError> {
        assert!(eps > 0.0, "eigenvalue floor must be positive");
        let (vals, vecs) = self.herm_eigen()?;
        let d = DMatrix::from_fn(vals.len(), vals.len(), |r, c| {
            if r == c {
                C64::new(1.0 / vals[r].max(eps).sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Ok(Self::from_inner(&vecs * d * vecs.adjoint()))
    }

    /// Hermitian PSD matrix square root (same clamping convention).
    pub fn herm_sqrt(&self, eps: f64) -> Result<ComplexMatrix, LinalgError> {
        assert!(eps > 0.0);
        let (vals, vecs) = self.herm_eigen()?;
        let d = DMatrix::from_fn(vals.len(), vals.len(), |r, c| {
            if r == c {
                C64::new(vals[r].max(eps.min(vals[r].abs().max(0.0))).max(0.0).sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Ok(Self::from_inner(&vecs * d * vecs.adjoint()))
    }

    /// Normalized DFT matrix, unitary for any dimension.
    pub fn unitary_dft(n: usize) -> ComplexMatrix {
        let scale = 1.0 / (n as f64).sqrt();
        Self::from_fn(n, n, |r, c| {
            let phase = -2.0 * std::f64::consts::PI * (r * c) as f64 / n as f64;
            C64::new(phase.cos() * scale, phase.sin() * scale)
        })
    }

    /// Maximum entrywise modulus of the difference; `inf` norm used in tests.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        (self.clone() - other.clone())
            .inner
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> Self::Output {
        ComplexMatrix::from_inner(self.inner + rhs.inner)
    }
}

impl std::ops::Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> Self::Output {
        ComplexMatrix::from_inner(self.inner - rhs.inner)
    }
}

impl std::ops::Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> Self::Output {
        ComplexMatrix::from_inner(self.inner * rhs.inner)
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> Self::Output {
        ComplexMatrix::from_inner(&self.inner * &rhs.inner)
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
    }

    #[test]
    fn kron_identity_cases() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let m = random_matrix(&mut rng, 3, 2);
        assert_eq!(ComplexMatrix::identity(1).kron(&m), m);
        let d = ComplexMatrix::identity(2).kron(&ComplexMatrix::from_rows(1, 1, &[c(2.0, 0.0)]));
        assert_eq!(d, ComplexMatrix::diagonal(&[c(2.0, 0.0), c(2.0, 0.0)]));
    }

    #[test]
    fn kron_matches_index_loop_oracle() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let a = random_matrix(&mut rng, 3, 2);
        let b = random_matrix(&mut rng, 2, 2);
        let k = a.kron(&b);
        // Brute-force oracle straight from the definition a_ij * B.
        for i in 0..3 {
            for j in 0..2 {
                for p in 0..2 {
                    for q in 0..2 {
                        let expect = a.get(i, j) * b.get(p, q);
                        let got = k.get(i * 2 + p, j * 2 + q);
                        assert!((expect - got).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn kron_is_bilinear() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 2, 3);
        let b = random_matrix(&mut rng, 2, 3);
        let cmat = random_matrix(&mut rng, 3, 2);
        let lhs = (a.clone() + b.clone()).kron(&cmat);
        let rhs = a.kron(&cmat) + b.kron(&cmat);
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn vec_definition_and_identity() {
        let m = ComplexMatrix::from_rows(
            2,
            2,
            &[c(1.0, 0.0), c(3.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)],
        );
        let v = m.vec();
        let expect: Vec<f64> = vec![1.0, 2.0, 3.0, 4.0];
        for (i, e) in expect.iter().enumerate() {
            assert_eq!(v.get(i, 0), c(*e, 0.0));
        }
        let col = ComplexMatrix::from_rows(3, 1, &[c(1.0, 1.0), c(2.0, 0.0), c(0.0, 3.0)]);
        assert_eq!(col.vec(), col);
    }

    #[test]
    fn vec_kronecker_identity() {
        // vec(A X Bᵀ) = (B ⊗ A) vec(X)
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let a = random_matrix(&mut rng, 3, 3);
        let x = random_matrix(&mut rng, 3, 3);
        let b = random_matrix(&mut rng, 3, 3);
        let lhs = (&(&a * &x) * &b.transpose()).vec();
        let rhs = &b.kron(&a) * &x.vec();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn herm_inv_sqrt_trivial_cases() {
        let i4 = ComplexMatrix::identity(4);
        let m = i4.herm_inv_sqrt(DEFAULT_EIG_FLOOR).unwrap();
        assert!(m.max_abs_diff(&i4) < 1e-12);

        let d = ComplexMatrix::diagonal(&[c(4.0, 0.0), c(9.0, 0.0)]);
        let m = d.herm_inv_sqrt(DEFAULT_EIG_FLOOR).unwrap();
        let expect = ComplexMatrix::diagonal(&[c(0.5, 0.0), c(1.0 / 3.0, 0.0)]);
        assert!(m.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn herm_inv_sqrt_reconstruction() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let x = random_matrix(&mut rng, 4, 4);
        let h = (&x * &x.conj_transpose()) + ComplexMatrix::identity(4);
        let m = h.herm_inv_sqrt(DEFAULT_EIG_FLOOR).unwrap();
        // output is Hermitian
        assert!(m.max_abs_diff(&m.conj_transpose()) < 1e-10);
        // M H Mᴴ = I
        let recon = &(&m * &h) * &m.conj_transpose();
        assert!(recon.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-10);
    }

    #[test]
    fn herm_inv_sqrt_rejects_non_hermitian() {
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let x = random_matrix(&mut rng, 3, 3);
        match x.herm_inv_sqrt(DEFAULT_EIG_FLOOR) {
            Err(LinalgError::NotHermitian(_)) => {}
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn inverse_and_trace() {
        let i3 = ComplexMatrix::identity(3);
        assert!(i3.inverse().unwrap().max_abs_diff(&i3) < 1e-14);
        let d = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(d.trace(), c(6.0, 0.0));

        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let a = random_matrix(&mut rng, 4, 4) + ComplexMatrix::identity(4).scale_re(2.0);
        let prod = &a.inverse().unwrap() * &a;
        assert!(prod.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-10);
    }

    #[test]
    fn singular_matrix_rejected() {
        let z = ComplexMatrix::zeros(3, 3);
        assert_eq!(z.inverse().unwrap_err(), LinalgError::Singular);
    }

    #[test]
    fn dft_is_unitary() {
        for n in 1..6 {
            let f = ComplexMatrix::unitary_dft(n);
            let p = &f * &f.conj_transpose();
            assert!(p.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-12);
        }
    }
}
