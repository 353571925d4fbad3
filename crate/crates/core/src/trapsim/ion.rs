use crate::embedding::{EncodedVector, ENCODED_PAIR_DIM};
use crate::error::{Error, Result};
use crate::qmath::{ComplexMatrix, ComplexVector, ONE, ZERO};

use super::pulse::{Pulse, PulseSequence};

/// Default motional cutoff: Fock levels `0..=8`.
pub const DEFAULT_FOCK_CUTOFF: usize = 8;
/// Population allowed in the top two Fock levels.
pub const TAIL_LIMIT: f64 = 1e-8;
pub const INTERNAL_LEVELS: usize = 4;

/// Index of `|n_internal, m_motional>` in the ion space.
#[inline]
pub fn ion_index(internal: usize, motional: usize, cutoff: usize) -> usize {
    internal * (cutoff + 1) + motional
}

#[inline]
pub fn ion_dim(cutoff: usize) -> usize {
    INTERNAL_LEVELS * (cutoff + 1)
}

pub fn check_cutoff(cutoff: usize) -> Result<()> {
    if cutoff < 2 {
        return Err(Error::InvalidArgument(format!(
            "Fock cutoff must be at least 2 (got {cutoff})"
        )));
    }
    Ok(())
}

/// State of one ion: four internal levels (x) Fock levels `0..=cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct IonState {
    cutoff: usize,
    amplitudes: ComplexVector,
}

impl IonState {
    /// `|0_A, 0_B>`, the sideband-cooled starting point.
    pub fn ground(cutoff: usize) -> Result<Self> {
        Self::basis(0, 0, cutoff)
    }

    pub fn basis(internal: usize, motional: usize, cutoff: usize) -> Result<Self> {
        check_cutoff(cutoff)?;
        if internal >= INTERNAL_LEVELS || motional > cutoff {
            return Err(Error::InvalidArgument(format!(
                "basis state |{internal}, {motional}> outside the truncated space"
            )));
        }
        let mut amplitudes = ComplexVector::from_element(ion_dim(cutoff), ZERO);
        amplitudes[ion_index(internal, motional, cutoff)] = ONE;
        Ok(Self { cutoff, amplitudes })
    }

    pub fn new(amplitudes: ComplexVector, cutoff: usize) -> Result<Self> {
        check_cutoff(cutoff)?;
        if amplitudes.len() != ion_dim(cutoff) {
            return Err(Error::DimensionMismatch {
                expected: ion_dim(cutoff),
                got: amplitudes.len(),
            });
        }
        let norm2 = amplitudes.norm_squared();
        if (norm2 - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(Self { cutoff, amplitudes })
    }

    /// Lift an 8-dimensional encoded pair (`m_B` in {0, 1}) into the ion space.
    pub fn from_encoded(v: &EncodedVector, cutoff: usize) -> Result<Self> {
        check_cutoff(cutoff)?;
        if v.dim() != ENCODED_PAIR_DIM {
            return Err(Error::DimensionMismatch {
                expected: ENCODED_PAIR_DIM,
                got: v.dim(),
            });
        }
        let mut amplitudes = ComplexVector::from_element(ion_dim(cutoff), ZERO);
        for n in 0..INTERNAL_LEVELS {
            for m in 0..2 {
                amplitudes[ion_index(n, m, cutoff)] = v.amplitudes()[2 * n + m];
            }
        }
        Self::new(amplitudes, cutoff)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, internal: usize, motional: usize) -> crate::qmath::C64 {
        self.amplitudes[ion_index(internal, motional, self.cutoff)]
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn apply_unitary(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.nrows() != self.amplitudes.len() || u.ncols() != self.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                got: u.nrows(),
            });
        }
        Ok(Self {
            cutoff: self.cutoff,
            amplitudes: u * &self.amplitudes,
        })
    }

    pub fn apply_pulse(&self, pulse: &Pulse) -> Result<Self> {
        let u = pulse.unitary(self.cutoff)?;
        self.apply_unitary(&u)
    }

    /// Apply pulses in sequence order (first listed acts first).
    pub fn apply_sequence(&self, seq: &PulseSequence) -> Result<Self> {
        seq.pulses()
            .iter()
            .try_fold(self.clone(), |state, p| state.apply_pulse(p))
    }

    /// Population in Fock levels `cutoff - 1` and `cutoff`.
    pub fn tail_population(&self) -> f64 {
        let mut tail = 0.0;
        for n in 0..INTERNAL_LEVELS {
            for m in (self.cutoff - 1)..=self.cutoff {
                tail += self.amplitude(n, m).norm_sqr();
            }
        }
        tail
    }

    pub fn check_truncation(&self) -> Result<()> {
        let tail = self.tail_population();
        if tail > TAIL_LIMIT {
            return Err(Error::Truncation {
                tail,
                limit: TAIL_LIMIT,
            });
        }
        Ok(())
    }

    /// Components with `m_B` in {0, 1}, in encoded-pair ordering `2 n + m`.
    pub fn encoded_components(&self) -> ComplexVector {
        ComplexVector::from_fn(ENCODED_PAIR_DIM, |k, _| {
            self.amplitude(k / 2, k % 2)
        })
    }

    /// `|<psi_bar| v>|^2` against an encoded-pair measurement state.
    pub fn population(&self, measured: &EncodedVector) -> Result<f64> {
        if measured.dim() != ENCODED_PAIR_DIM {
            return Err(Error::DimensionMismatch {
                expected: ENCODED_PAIR_DIM,
                got: measured.dim(),
            });
        }
        Ok(measured.amplitudes().dotc(&self.encoded_components()).norm_sqr())
    }

    /// `max over phase of |<a|b>|^2`, i.e. overlap insensitive to a global phase.
    pub fn fidelity(&self, other: &IonState) -> Result<f64> {
        if other.amplitudes.len() != self.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                got: other.amplitudes.len(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes).norm_sqr())
    }
}
