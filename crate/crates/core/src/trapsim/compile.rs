use std::f64::consts::PI;

use crate::embedding::encoded_unot;
use crate::error::{Error, Result};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::qmath::{ComplexMatrix, C64};

use super::ops::microwave_internal;
use super::pulse::{Pulse, PulseKind, PulseSequence};

pub const COMPILE_TOL: f64 = 1e-9;
const PHASE_GRID: usize = 8;

/// Internal-level product `U_4 U_3 U_2 U_1` of a microwave-only sequence.
pub fn internal_unitary(seq: &PulseSequence) -> Result<ComplexMatrix> {
    let mut acc = ComplexMatrix::identity(4, 4);
    for p in seq.pulses() {
        let PulseKind::Microwave(n) = p.kind() else {
            return Err(Error::InvalidArgument(
                "internal product defined for microwave pulses only".into(),
            ));
        };
        acc = microwave_internal(n, p.chi(), p.phi())? * acc;
    }
    Ok(acc)
}

/// `max |U - g T|` with the unit phase `g` aligning `U` to `T`.
pub fn phase_corrected_deviation(u: &ComplexMatrix, target: &ComplexMatrix) -> f64 {
    let overlap = (target.adjoint() * u).trace();
    let g = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    (u - target * g).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn product(levels: &[u8; 4], phases: &[f64]) -> ComplexMatrix {
    let mut acc = ComplexMatrix::identity(4, 4);
    for (&n, &phi) in levels.iter().zip(phases) {
        acc = microwave_internal(n, PI, phi).expect("valid level") * acc;
    }
    acc
}

/// Four microwave pi pulses realizing the encoded spin flip up to a global
/// phase. Grid search over levels and an 8-point phase grid, first hit in
/// lexicographic order, refined with Nelder-Mead when no grid point is exact.
pub fn compile_encoded_unot() -> Result<PulseSequence> {
    let target = encoded_unot();
    let grid: Vec<f64> = (0..PHASE_GRID).map(|k| 2.0 * PI * k as f64 / PHASE_GRID as f64).collect();
    let pulses: Vec<Vec<ComplexMatrix>> = (1..=3u8)
        .map(|n| grid.iter().map(|&p| microwave_internal(n, PI, p).expect("valid level")).collect())
        .collect();

    let mut best: Option<(f64, [u8; 4], [f64; 4])> = None;
    'search: for code in 0..81usize {
        let levels = [
            (code / 27 % 3) as u8 + 1,
            (code / 9 % 3) as u8 + 1,
            (code / 3 % 3) as u8 + 1,
            (code % 3) as u8 + 1,
        ];
        for pcode in 0..PHASE_GRID.pow(4) {
            let idx = [
                pcode / 512 % 8,
                pcode / 64 % 8,
                pcode / 8 % 8,
                pcode % 8,
            ];
            let mut u = pulses[levels[0] as usize - 1][idx[0]].clone();
            for k in 1..4 {
                u = &pulses[levels[k] as usize - 1][idx[k]] * u;
            }
            let dev = phase_corrected_deviation(&u, &target);
            if best.as_ref().is_none_or(|(d, _, _)| dev < *d) {
                best = Some((dev, levels, idx.map(|i| grid[i])));
                if dev <= COMPILE_TOL {
                    break 'search;
                }
            }
        }
    }
    let (mut dev, levels, mut phases) = best.expect("non-empty search space");

    if dev > COMPILE_TOL {
        let opts = NelderMeadOptions {
            f_tol: 1e-16,
            x_tol: 1e-12,
            max_iterations: 20_000,
            adaptive: true,
        };
        let min = nelder_mead(
            |x| phase_corrected_deviation(&product(&levels, x), &target),
            &phases,
            &[0.1; 4],
            &opts,
        );
        if min.value < dev {
            dev = min.value;
            phases.copy_from_slice(&min.x);
        }
    }
    if dev > COMPILE_TOL {
        return Err(Error::Compilation(dev));
    }
    let pulses = levels
        .iter()
        .zip(phases)
        .map(|(&n, phi)| Pulse::microwave(n, PI, phi))
        .collect::<Result<Vec<_>>>()?;
    Ok(PulseSequence::new("encoded-unot", pulses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{decode_pair, encode_pair};
    use crate::qmath::{trace_distance, DensityOperator};
    use crate::spinstates::{rho_aligned, EnsembleKind, SpinPairEnsemble};
    use crate::trapsim::ion::{ion_dim, ion_index, DEFAULT_FOCK_CUTOFF as N};

    #[test]
    fn compiled_sequence_matches_target() {
        let seq = compile_encoded_unot().unwrap();
        assert_eq!(seq.len(), 4);
        assert!(seq.pulses().iter().all(|p| p.chi() == PI));
        let u = internal_unitary(&seq).unwrap();
        assert!(phase_corrected_deviation(&u, &encoded_unot()) <= COMPILE_TOL);
        // Deterministic.
        assert_eq!(compile_encoded_unot().unwrap(), seq);
    }

    #[test]
    fn compiled_sequence_flips_the_ensemble() {
        let seq = compile_encoded_unot().unwrap();
        let full = seq.unitary(N).unwrap();
        // Restrict to m_B in {0, 1}: the encoded pair space.
        let dim = ion_dim(N);
        assert_eq!(full.nrows(), dim);
        let u8 = ComplexMatrix::from_fn(8, 8, |r, c| {
            full[(ion_index(r / 2, r % 2, N), ion_index(c / 2, c % 2, N))]
        });
        let rho_bar = encode_pair(&SpinPairEnsemble::six_direction(EnsembleKind::Antialigned)).unwrap();
        let out = DensityOperator::new(&u8 * rho_bar.matrix() * u8.adjoint()).unwrap();
        let decoded = decode_pair(&out).unwrap();
        assert!(trace_distance(&decoded, &rho_aligned()).unwrap() <= 1e-9);
    }

    #[test]
    fn deviation_ignores_global_phase() {
        let t = encoded_unot();
        let u = &t * C64::new(0.0, -1.0);
        assert!(phase_corrected_deviation(&u, &t) < 1e-15);
        assert!(phase_corrected_deviation(&ComplexMatrix::identity(4, 4), &t) > 0.5);
    }
}
