//! I.i.d. Rayleigh MIMO channel and AWGN sampling.

use crate::linalg::ComplexMatrix;
use crate::rng::RngStream;

/// One draw of the two user-to-relay channels. The reverse channel is the
/// transpose of the forward channel (reciprocity), so a single matrix per
/// user serves both directions.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    /// `N_1 x N_r` relay-to-User-1 channel.
    pub h1: ComplexMatrix,
    /// `N_2 x N_r` relay-to-User-2 channel.
    pub h2: ComplexMatrix,
}

impl ChannelRealization {
    /// User-`u` (1-based) channel matrix.
    pub fn h(&self, user: usize) -> &ComplexMatrix {
        match user {
            1 => &self.h1,
            2 => &self.h2,
            _ => panic!("user index must be 1 or 2"),
        }
    }

    /// Own cascaded channel `G_i = H_i H_iᵀ`.
    pub fn g_own(&self, user: usize) -> ComplexMatrix {
        let h = self.h(user);
        h * &h.transpose()
    }

    /// Cross cascaded channel `G_{i,j} = H_i H_jᵀ`.
    pub fn g_cross(&self, user: usize) -> ComplexMatrix {
        let (hi, hj) = match user {
            1 => (&self.h1, &self.h2),
            2 => (&self.h2, &self.h1),
            _ => panic!("user index must be 1 or 2"),
        };
        hi * &hj.transpose()
    }
}

/// Draws both channels with i.i.d. unit-variance circular Gaussian entries.
pub fn sample_channel(n1: usize, n2: usize, nr: usize, rng: &mut RngStream) -> ChannelRealization {
    assert!(n1 >= 1 && n2 >= 1 && nr >= 1);
    ChannelRealization {
        h1: rng.complex_gaussian_matrix(n1, nr),
        h2: rng.complex_gaussian_matrix(n2, nr),
    }
}

/// Unit-variance complex AWGN matrix.
pub fn sample_awgn(rows: usize, cols: usize, rng: &mut RngStream) -> ComplexMatrix {
    rng.complex_gaussian_matrix(rows, cols)
}
