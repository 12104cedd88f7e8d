//! Channel estimation: least-squares individual estimates from phase 1 and
//! generalized least-squares cascaded estimates from phases 2-3, plus the
//! noise whitener built from them.

use thiserror::Error;

use crate::linalg::{ComplexMatrix, LinalgError};

#[derive(Debug, Error)]
pub enum EstimationError {
    #[error("received matrix is {got_rows}x{got_cols}, pilot implies {want_rows}x{want_cols}")]
    DimensionMismatch {
        got_rows: usize,
        got_cols: usize,
        want_rows: usize,
        want_cols: usize,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn check_shapes(
    received: &ComplexMatrix,
    pilot: &ComplexMatrix,
) -> Result<(), EstimationError> {
    if received.cols() != pilot.cols() {
        return Err(EstimationError::DimensionMismatch {
            got_rows: received.rows(),
            got_cols: received.cols(),
            want_rows: received.rows(),
            want_cols: pilot.cols(),
        });
    }
    Ok(())
}

/// Least-squares estimate of `H` from `R = H S + N`:
/// `Ĥ = R Sᴴ (S Sᴴ)⁻¹`. With white noise and orthogonal pilot columns
/// this coincides with the ML estimate.
pub fn estimate_individual(
    received: &ComplexMatrix,
    pilot: &ComplexMatrix,
) -> Result<ComplexMatrix, EstimationError> {
    check_shapes(received, pilot)?;
    let sh = pilot.conj_transpose();
    let gram = pilot * &sh;
    Ok(&(received * &sh) * &gram.inverse()?)
}

/// Cascaded estimate of `G` from `R = G C_p + Ñ` via the closed-form
/// `Ĝ = R C_pᴴ (C_p C_pᴴ)⁻¹`. Because `C_p C_pᴴ` is a scaled identity for
/// the repeated unitary pilots used here, this equals the GLS estimator for
/// any noise covariance of the form `I ⊗ Σ` (see
/// [`estimate_cascaded_gls`], kept as an oracle).
pub fn estimate_cascaded(
    received: &ComplexMatrix,
    pilot: &ComplexMatrix,
) -> Result<ComplexMatrix, EstimationError> {
    estimate_individual(received, pilot)
}

/// Vectorized GLS estimator
/// `ĝ = (C̃ᴴ K̃⁻¹ C̃)⁻¹ C̃ᴴ K̃⁻¹ vec(R)` with `C̃ = C_pᵀ ⊗ I` and an
/// arbitrary positive-definite noise covariance `K̃`. Exists to cross-check
/// [`estimate_cascaded`]; quadratic in the problem size, so only for tests
/// and small systems.
pub fn estimate_cascaded_gls(
    received: &ComplexMatrix,
    pilot: &ComplexMatrix,
    noise_cov: &ComplexMatrix,
) -> Result<ComplexMatrix, EstimationError> {
    check_shapes(received, pilot)?;
    let n_rx = received.rows();
    let c_tilde = pilot.transpose().kron(&ComplexMatrix::identity(n_rx));
    let r_vec = received.vec();
    let k_inv = noise_cov.inverse()?;
    let ch = c_tilde.conj_transpose();
    let normal = &(&ch * &k_inv) * &c_tilde;
    let rhs = &(&ch * &k_inv) * &r_vec;
    let g_vec = normal.solve(&rhs)?;
    Ok(g_vec.unvec(n_rx, pilot.rows()))
}

/// Per-slot whitening matrix `W = (a² Ĥ Ĥᴴ + I)^{-1/2}`. The full
/// block-diagonal whitener for a `T`-slot codeword is `I_T ⊗ W` because the
/// received covariance is `K̂ = a² (I_T ⊗ Ĥ Ĥᴴ) + I`.
pub fn whitener(a: f64, h_hat: &ComplexMatrix) -> Result<ComplexMatrix, EstimationError> {
    let n = h_hat.rows();
    let k = (h_hat * &h_hat.conj_transpose()).scale_re(a * a) + ComplexMatrix::identity(n);
    Ok(k.herm_inv_sqrt(crate::linalg::DEFAULT_EIG_FLOOR)?)
}
