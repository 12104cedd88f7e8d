//! Linear OSTBC encoding via dispersion matrices, plus Gray-mapped
//! constellations.

use num_complex::Complex;
use thiserror::Error;

use crate::linalg::{c, C64, ComplexMatrix};

#[derive(Debug, Error, PartialEq)]
pub enum CodecError {
    #[error("expected {expected} symbols, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported constellation order {0}")]
    UnsupportedOrder(usize),
}

/// A linear OSTBC described by its dispersion matrices: the codeword for
/// symbols `c_1..c_M` is `C = Σ_n Re(c_n) A_n + j Im(c_n) B_n`.
#[derive(Debug, Clone)]
pub struct OstbcCode {
    pub n_tx: usize,
    pub t_slots: usize,
    pub m_symbols: usize,
    pub dispersion_a: Vec<ComplexMatrix>,
    pub dispersion_b: Vec<ComplexMatrix>,
}

impl OstbcCode {
    /// Code rate `R = M / T`.
    pub fn rate(&self) -> f64 {
        self.m_symbols as f64 / self.t_slots as f64
    }

    /// The 2-antenna Alamouti code, fixed repo-wide as
    /// `[[c1, -c2*], [c2, c1*]]`.
    pub fn alamouti() -> Self {
        let m = |d: [[f64; 2]; 2]| {
            ComplexMatrix::from_fn(2, 2, |r, cidx| c(d[r][cidx], 0.0))
        };
        OstbcCode {
            n_tx: 2,
            t_slots: 2,
            m_symbols: 2,
            dispersion_a: vec![m([[1.0, 0.0], [0.0, 1.0]]), m([[0.0, -1.0], [1.0, 0.0]])],
            dispersion_b: vec![m([[1.0, 0.0], [0.0, -1.0]]), m([[0.0, 1.0], [1.0, 0.0]])],
        }
    }

    /// Encodes unit-energy symbols scaled to `symbol_energy` per symbol.
    pub fn encode(&self, symbols: &[C64], symbol_energy: f64) -> Result<ComplexMatrix, CodecError> {
        if symbols.len() != self.m_symbols {
            return Err(CodecError::DimensionMismatch {
                expected: self.m_symbols,
                got: symbols.len(),
            });
        }
        let amp = symbol_energy.sqrt();
        let mut out = ComplexMatrix::zeros(self.n_tx, self.t_slots);
        for (n, s) in symbols.iter().enumerate() {
            let s = s * amp;
            out = out
                + self.dispersion_a[n].scale(c(s.re, 0.0))
                + self.dispersion_b[n].scale(c(0.0, s.im));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstellationKind {
    Psk(usize),
    Qam(usize),
}

/// Unit-average-energy constellation with Gray bit labels.
#[derive(Debug, Clone)]
pub struct Constellation {
    pub kind: ConstellationKind,
    points: Vec<C64>,
    /// `labels[k]` is the Gray bit label of point `k`.
    labels: Vec<u32>,
}

fn gray(x: u32) -> u32 {
    x ^ (x >> 1)
}

impl Constellation {
    pub fn psk(m: usize) -> Result<Self, CodecError> {
        if ![2, 4, 8, 16].contains(&m) {
            return Err(CodecError::UnsupportedOrder(m));
        }
        let points = (0..m)
            .map(|k| {
                let phase = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                Complex::new(phase.cos(), phase.sin())
            })
            .collect();
        let labels = (0..m as u32).map(gray).collect();
        Ok(Self { kind: ConstellationKind::Psk(m), points, labels })
    }

    pub fn qam(m: usize) -> Result<Self, CodecError> {
        if ![4, 16, 64].contains(&m) {
            return Err(CodecError::UnsupportedOrder(m));
        }
        let side = (m as f64).sqrt().round() as u32;
        // Exact normalization: E|x|^2 = 2(M-1)/3 for the unnormalized grid.
        let scale = (3.0 / (2.0 * (m as f64 - 1.0))).sqrt();
        let mut points = Vec::with_capacity(m);
        let mut labels = Vec::with_capacity(m);
        let half_bits = (side as f64).log2() as u32;
        for i in 0..side {
            for q in 0..side {
                let re = (2.0 * i as f64 - (side as f64 - 1.0)) * scale;
                let im = (2.0 * q as f64 - (side as f64 - 1.0)) * scale;
                points.push(Complex::new(re, im));
                labels.push((gray(i) << half_bits) | gray(q));
            }
        }
        Ok(Self { kind: ConstellationKind::Qam(m), points, labels })
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.order().trailing_zeros() as usize
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn point(&self, index: usize) -> C64 {
        self.points[index]
    }

    pub fn label(&self, index: usize) -> u32 {
        self.labels[index]
    }

    /// Point index whose Gray label equals the packed bits.
    pub fn index_from_bits(&self, bits: u32) -> usize {
        self.labels.iter().position(|&l| l == bits).expect("label in range")
    }

    /// Nearest point in Euclidean distance; ties broken by lowest index.
    pub fn demap(&self, z: C64) -> usize {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (k, p) in self.points.iter().enumerate() {
            let d = (z - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = k;
            }
        }
        best
    }

    /// Hamming distance between the labels of two point indices.
    pub fn bit_errors(&self, a: usize, b: usize) -> u32 {
        (self.labels[a] ^ self.labels[b]).count_ones()
    }
}
