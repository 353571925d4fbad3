use std::f64::consts::FRAC_1_SQRT_2;

use crate::embedding::{DecodingMap, EncodedVector};
use crate::error::{Error, Result};
use crate::qmath::{c, DensityOperator, PureState, C64, ONE, ZERO};

pub const SETTING_COUNT: usize = 17;

/// Off-diagonal index pairs `(i, j)`, `i < j`, in the order used by
/// [`PopulationFormula`].
pub const OFF_DIAGONAL: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Linear functional of the matrix elements of a logical pair state, written
/// `rho_ii = z_i`, `rho_ij = x_ij - i y_ij` for `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PopulationFormula {
    pub z: [f64; 4],
    pub x: [f64; 6],
    pub y: [f64; 6],
}

impl PopulationFormula {
    pub fn evaluate(&self, rho: &DensityOperator) -> f64 {
        let m = rho.matrix();
        let mut v = 0.0;
        for i in 0..4 {
            v += self.z[i] * m[(i, i)].re;
        }
        for (k, &(i, j)) in OFF_DIAGONAL.iter().enumerate() {
            // rho_ij = x - i y
            v += self.x[k] * m[(i, j)].re - self.y[k] * m[(i, j)].im;
        }
        v
    }

    /// The 16 coefficients as `(z0..z3, x01..x23, y01..y23)`.
    pub fn coefficients(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        out[..4].copy_from_slice(&self.z);
        out[4..10].copy_from_slice(&self.x);
        out[10..].copy_from_slice(&self.y);
        out
    }
}

/// One population measured during tomography.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSetting {
    pub index: usize,
    pub target_logical: PureState,
    pub target_encoded: EncodedVector,
    pub formula: PopulationFormula,
}

fn pair_index(i: usize, j: usize) -> usize {
    OFF_DIAGONAL
        .iter()
        .position(|&p| p == (i, j))
        .expect("i < j < 4")
}

fn diag(i: usize) -> PopulationFormula {
    let mut f = PopulationFormula::default();
    f.z[i] = 0.5;
    f
}

/// `(z_i + z_j)/4 + sign * {x|y}_ij / 2`.
fn coherence(i: usize, j: usize, imaginary: bool, sign: f64) -> PopulationFormula {
    let mut f = PopulationFormula::default();
    f.z[i] = 0.25;
    f.z[j] = 0.25;
    let k = pair_index(i, j);
    if imaginary {
        f.y[k] = 0.5 * sign;
    } else {
        f.x[k] = 0.5 * sign;
    }
    f
}

/// `(|i> + a |j>)/sqrt 2` in the logical basis `|up up>, |up down>, |down up>, |down down>`.
fn superposition(i: usize, j: usize, a: C64) -> PureState {
    let mut amp = [ZERO; 4];
    amp[i] = c(FRAC_1_SQRT_2, 0.0);
    amp[j] = a * FRAC_1_SQRT_2;
    PureState::from_slice(&amp).expect("unit norm")
}

/// The 17 measured populations `P_j = <psi_j| rho |psi_j> / 2`.
pub fn measurement_settings() -> Vec<MeasurementSetting> {
    let i = c(0.0, 1.0);
    let rows: [(PureState, PopulationFormula); SETTING_COUNT] = [
        (PureState::basis(4, 0), diag(0)),
        (PureState::basis(4, 1), diag(1)),
        (PureState::basis(4, 2), diag(2)),
        (PureState::basis(4, 3), diag(3)),
        // |z>|x>, |z>|y>
        (superposition(0, 1, ONE), coherence(0, 1, false, 1.0)),
        (superposition(0, 1, i), coherence(0, 1, true, 1.0)),
        // |x>|z>, |y>|z>
        (superposition(0, 2, ONE), coherence(0, 2, false, 1.0)),
        (superposition(0, 2, i), coherence(0, 2, true, 1.0)),
        // Phi+, Phi-, (|up up> + i|down down>)/sqrt 2
        (superposition(0, 3, ONE), coherence(0, 3, false, 1.0)),
        (superposition(0, 3, -ONE), coherence(0, 3, false, -1.0)),
        (superposition(0, 3, i), coherence(0, 3, true, 1.0)),
        // Psi+, (|up down> + i|down up>)/sqrt 2
        (superposition(1, 2, ONE), coherence(1, 2, false, 1.0)),
        (superposition(1, 2, i), coherence(1, 2, true, 1.0)),
        // |x>|-z>, |y>|-z>
        (superposition(1, 3, ONE), coherence(1, 3, false, 1.0)),
        (superposition(1, 3, i), coherence(1, 3, true, 1.0)),
        // |-z>|x>, |-z>|y>
        (superposition(2, 3, ONE), coherence(2, 3, false, 1.0)),
        (superposition(2, 3, i), coherence(2, 3, true, 1.0)),
    ];
    let w = DecodingMap::default();
    rows.into_iter()
        .enumerate()
        .map(|(index, (psi, formula))| MeasurementSetting {
            index,
            target_encoded: w.measured_state(&psi).expect("dimension 4"),
            target_logical: psi,
            formula,
        })
        .collect()
}

/// `<psi_j| rho |psi_j> / 2`.
pub fn ideal_population(rho: &DensityOperator, j: usize) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    let settings = measurement_settings();
    let s = settings.get(j).ok_or_else(|| {
        Error::InvalidArgument(format!("setting index {j} out of range 0..{SETTING_COUNT}"))
    })?;
    Ok(rho.expectation(s.target_logical.amplitudes()) / 2.0)
}

/// All 17 ideal populations of `rho`.
pub fn ideal_populations(rho: &DensityOperator) -> Result<[f64; SETTING_COUNT]> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    let mut out = [0.0; SETTING_COUNT];
    for (o, s) in out.iter_mut().zip(measurement_settings()) {
        *o = s.formula.evaluate(rho);
    }
    Ok(out)
}

/// Bell-basis populations `(Phi+, Phi-, Psi+, Psi-)` from settings 8, 9, 11;
/// the singlet follows from completeness.
pub fn bell_populations(p: &[f64; SETTING_COUNT]) -> [f64; 4] {
    let (phi_plus, phi_minus, psi_plus) = (2.0 * p[8], 2.0 * p[9], 2.0 * p[11]);
    [phi_plus, phi_minus, psi_plus, 1.0 - phi_plus - phi_minus - psi_plus]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinstates::rho_aligned;

    #[test]
    fn printed_rows() {
        let s = measurement_settings();
        assert_eq!(s.len(), SETTING_COUNT);
        assert_eq!(s[0].formula.z, [0.5, 0.0, 0.0, 0.0]);
        assert_eq!(s[4].formula.z, [0.25, 0.25, 0.0, 0.0]);
        assert_eq!(s[4].formula.x[0], 0.5);
        for row in &s {
            assert!((row.target_encoded.amplitudes().norm_squared() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn measured_state_column() {
        // Row 1: (|0> - i|2>)_A |0>_B / sqrt 2 in encoded ordering 2n + m.
        let s = measurement_settings();
        let v = s[0].target_encoded.amplitudes();
        let h = FRAC_1_SQRT_2;
        assert!((v[0] - c(h, 0.0)).norm() < 1e-12);
        assert!((v[4] - c(0.0, -h)).norm() < 1e-12);
        // Row 11: ((|0> - i|2>)|0> + (i|1> + |3>)|1>) / 2
        let v = s[10].target_encoded.amplitudes();
        let want = [c(0.5, 0.0), ZERO, ZERO, c(0.0, 0.5), c(0.0, -0.5), ZERO, ZERO, c(0.5, 0.0)];
        for (a, b) in v.iter().zip(want) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn aligned_populations() {
        let rho = rho_aligned();
        assert!((ideal_population(&rho, 0).unwrap() - 1.0 / 6.0).abs() < 1e-12);
        assert!((ideal_population(&rho, 8).unwrap() - 1.0 / 6.0).abs() < 1e-12);
        assert!(ideal_population(&rho, 17).is_err());
    }
}
