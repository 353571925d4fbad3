//! Real-amplitude embedding of a qubit into four levels.
//!
//! `alpha|up> + beta|down>` is stored as the real vector
//! `(Re alpha, Re beta, Im alpha, Im beta)`, so the anti-unitary spin flip
//! becomes the real signed permutation returned by [`encoded_unot`].
//! Encoded pairs use internal-major ordering: `|n_A, m_B>` sits at index
//! `2 n + m`.

use log::warn;

use crate::error::{Error, Result};
use crate::qmath::{c, trace, ComplexMatrix, ComplexVector, DensityOperator, PureState, I, ONE};
use crate::spinstates::{bloch_state, SpinPairEnsemble};

pub const ENCODED_QUBIT_DIM: usize = 4;
pub const ENCODED_PAIR_DIM: usize = 8;
/// Decoded traces further than this from 1 are reported as leakage.
pub const LEAKAGE_TOL: f64 = 1e-8;
/// Below this decoded trace there is nothing left to renormalize.
pub const MIN_DECODED_TRACE: f64 = 1e-6;

/// A unit vector on one encoded spin (dim 4) or an encoded pair (dim 8).
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedVector {
    amplitudes: ComplexVector,
}

impl EncodedVector {
    pub fn new(amplitudes: ComplexVector) -> Result<Self> {
        let len = amplitudes.len();
        if len != ENCODED_QUBIT_DIM && len != ENCODED_PAIR_DIM {
            return Err(Error::DimensionMismatch {
                expected: ENCODED_PAIR_DIM,
                got: len,
            });
        }
        let norm2 = amplitudes.norm_squared();
        if (norm2 - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Largest imaginary part of any amplitude.
    pub fn max_imaginary(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

/// The fixed 4x8 decoding matrix; row `j` is `e_j + i e_{j+4}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodingMap {
    matrix: ComplexMatrix,
}

impl Default for DecodingMap {
    fn default() -> Self {
        let mut matrix = ComplexMatrix::zeros(4, 8);
        for j in 0..4 {
            matrix[(j, j)] = ONE;
            matrix[(j, j + 4)] = I;
        }
        Self { matrix }
    }
}

impl DecodingMap {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `W^H |psi> / sqrt 2`, the encoded state whose population equals
    /// `<psi| rho |psi> / 2`.
    pub fn measured_state(&self, psi: &PureState) -> Result<EncodedVector> {
        if psi.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: psi.dim(),
            });
        }
        EncodedVector::new((self.matrix.adjoint() * psi.amplitudes()).unscale(2f64.sqrt()))
    }
}

/// Embed a logical qubit as `(Re a, Re b, Im a, Im b)`.
pub fn encode_qubit(phi: &PureState) -> Result<EncodedVector> {
    if phi.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: phi.dim(),
        });
    }
    let a = phi.amplitudes()[0];
    let b = phi.amplitudes()[1];
    EncodedVector::new(ComplexVector::from_column_slice(&[
        c(a.re, 0.0),
        c(b.re, 0.0),
        c(a.im, 0.0),
        c(b.im, 0.0),
    ]))
}

/// Inverse of [`encode_qubit`] on real encoded vectors.
pub fn decode_qubit(v: &EncodedVector) -> Result<PureState> {
    if v.dim() != ENCODED_QUBIT_DIM {
        return Err(Error::DimensionMismatch {
            expected: ENCODED_QUBIT_DIM,
            got: v.dim(),
        });
    }
    let a = v.amplitudes();
    PureState::from_slice(&[a[0] + I * a[2], a[1] + I * a[3]])
}

/// The encoded spin flip `|1><0| - |0><1| - |3><2| + |2><3|`.
pub fn encoded_unot() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(1, 0)] = ONE;
    m[(0, 1)] = -ONE;
    m[(3, 2)] = -ONE;
    m[(2, 3)] = ONE;
    m
}

/// Encoded UNOT acting on spin A of an encoded pair (identity on B).
pub fn encoded_unot_on_pair() -> ComplexMatrix {
    encoded_unot().kronecker(&ComplexMatrix::identity(2, 2))
}

/// `sum_k w_k (M|a_k>)(M|a_k>)^H (x) |b_k><b_k|`.
pub fn encode_pair(ensemble: &SpinPairEnsemble) -> Result<DensityOperator> {
    let mut acc = ComplexMatrix::zeros(ENCODED_PAIR_DIM, ENCODED_PAIR_DIM);
    for m in ensemble.members() {
        let v = encode_pure_pair(&bloch_state(&m.dir_a), &bloch_state(&m.dir_b))?;
        let amp = v.amplitudes();
        acc += (amp * amp.adjoint()).scale(m.weight);
    }
    DensityOperator::new(acc)
}

/// `M|a> (x) |b>` for a product pure pair.
pub fn encode_pure_pair(a: &PureState, b: &PureState) -> Result<EncodedVector> {
    if b.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: b.dim(),
        });
    }
    let ea = encode_qubit(a)?;
    EncodedVector::new(ea.amplitudes().kronecker(b.amplitudes()))
}

/// `rho = W rho_bar W^H`, renormalized with a warning when the encoded
/// state has leaked off the encoded manifold.
pub fn decode_pair(rho_bar: &DensityOperator) -> Result<DensityOperator> {
    if rho_bar.dim() != ENCODED_PAIR_DIM {
        return Err(Error::DimensionMismatch {
            expected: ENCODED_PAIR_DIM,
            got: rho_bar.dim(),
        });
    }
    let w = DecodingMap::default();
    let decoded = w.matrix() * rho_bar.matrix() * w.matrix().adjoint();
    let tr = trace(&decoded).re;
    if tr < MIN_DECODED_TRACE {
        return Err(Error::Decoding(tr));
    }
    if (tr - 1.0).abs() > LEAKAGE_TOL {
        warn!(target: "unotsim::embedding", "decoded trace {tr:.3e} differs from 1; renormalizing (leakage outside the encoded manifold)");
    }
    let decoded = decoded.unscale(tr);
    let decoded = (&decoded + decoded.adjoint()).scale(0.5);
    DensityOperator::new(decoded)
}

/// Same as [`decode_pair`] but also returns the raw decoded trace.
pub fn decode_pair_with_trace(rho_bar: &DensityOperator) -> Result<(DensityOperator, f64)> {
    let w = DecodingMap::default();
    if rho_bar.dim() != ENCODED_PAIR_DIM {
        return Err(Error::DimensionMismatch {
            expected: ENCODED_PAIR_DIM,
            got: rho_bar.dim(),
        });
    }
    let tr = trace(&(w.matrix() * rho_bar.matrix() * w.matrix().adjoint())).re;
    Ok((decode_pair(rho_bar)?, tr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{max_abs_diff, trace_distance, ZERO};
    use crate::spinstates::{rho_aligned, BlochDirection};
    use std::f64::consts::FRAC_1_SQRT_2 as H;

    fn amps(v: &EncodedVector) -> Vec<crate::qmath::C64> {
        v.amplitudes().iter().copied().collect()
    }

    fn assert_vec(v: &EncodedVector, expected: &[crate::qmath::C64]) {
        for (x, y) in amps(v).iter().zip(expected) {
            assert!((x - y).norm() < 1e-14, "{:?} vs {:?}", amps(v), expected);
        }
    }

    #[test]
    fn encode_examples() {
        assert_vec(&encode_qubit(&PureState::basis(2, 0)).unwrap(), &[ONE, ZERO, ZERO, ZERO]);
        let plus_y = PureState::from_slice(&[c(H, 0.0), c(0.0, H)]).unwrap();
        assert_vec(&encode_qubit(&plus_y).unwrap(), &[c(H, 0.0), ZERO, ZERO, c(H, 0.0)]);
        let minus_y = PureState::from_slice(&[c(H, 0.0), c(0.0, -H)]).unwrap();
        assert_vec(&encode_qubit(&minus_y).unwrap(), &[c(H, 0.0), ZERO, ZERO, c(-H, 0.0)]);
    }

    #[test]
    fn embedding_is_not_complex_linear() {
        let up = PureState::basis(2, 0);
        let i_up = PureState::from_slice(&[I, ZERO]).unwrap();
        let lhs = encode_qubit(&i_up).unwrap();
        let rhs = encode_qubit(&up).unwrap().amplitudes().map(|z| z * I);
        assert!((lhs.amplitudes() - rhs).norm() > 0.5);
    }

    #[test]
    fn encoded_unot_structure() {
        let t = encoded_unot();
        let out = &t * encode_qubit(&PureState::basis(2, 0)).unwrap().amplitudes();
        assert!((out[1] - ONE).norm() < 1e-15 && out[0].norm() < 1e-15);
        let sq = &t * &t;
        assert!(max_abs_diff(&sq, &ComplexMatrix::identity(4, 4).scale(-1.0)) < 1e-15);
    }

    #[test]
    fn decoding_map_is_scaled_coisometry() {
        let w = DecodingMap::default();
        let wwh = w.matrix() * w.matrix().adjoint();
        assert!(max_abs_diff(&wwh, &ComplexMatrix::identity(4, 4).scale(2.0)) <= 1e-12);
    }

    #[test]
    fn decode_basis_pair() {
        let e = SpinPairEnsemble::uniform(&[(BlochDirection::Z, BlochDirection::Z)]).unwrap();
        let enc = encode_pair(&e).unwrap();
        assert!((enc.matrix()[(0, 0)] - ONE).norm() < 1e-15);
        let dec = decode_pair(&enc).unwrap();
        let expected = DensityOperator::from_pure(&PureState::basis(4, 0));
        assert!(max_abs_diff(dec.matrix(), expected.matrix()) < 1e-15);
    }

    #[test]
    fn minus_z_plus_z_encodes_to_level_one() {
        let e = SpinPairEnsemble::uniform(&[(BlochDirection::MINUS_Z, BlochDirection::Z)]).unwrap();
        let enc = encode_pair(&e).unwrap();
        // |1_A, 0_B> is index 2.
        assert!((enc.matrix()[(2, 2)] - ONE).norm() < 1e-15);
    }

    #[test]
    fn aligned_round_trip() {
        let e = SpinPairEnsemble::six_direction(crate::spinstates::EnsembleKind::Aligned);
        let dec = decode_pair(&encode_pair(&e).unwrap()).unwrap();
        assert!(trace_distance(&dec, &rho_aligned()).unwrap() <= 1e-12);
    }

    #[test]
    fn decode_rejects_vanishing_trace() {
        // Population only on a vector annihilated by W.
        let mut v = ComplexVector::zeros(8);
        v[0] = c(H, 0.0);
        v[4] = c(0.0, H);
        let rho = DensityOperator::from_pure(&PureState::new(v).unwrap());
        assert!(matches!(decode_pair(&rho), Err(Error::Decoding(_))));
    }

    #[test]
    fn decode_renormalizes_leaky_state() {
        let mut v = ComplexVector::zeros(8);
        v[0] = c(H, 0.0);
        v[4] = c(0.0, -H);
        let rho = DensityOperator::from_pure(&PureState::new(v).unwrap());
        let (dec, tr) = decode_pair_with_trace(&rho).unwrap();
        assert!((tr - 2.0).abs() < 1e-12);
        assert!((crate::qmath::trace(dec.matrix()).re - 1.0).abs() < 1e-12);
    }
}
