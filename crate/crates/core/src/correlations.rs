//! Total, classical and quantum correlations of two-qubit states.
//!
//! Classical correlation `J(B|A)` is the largest entropy reduction on the
//! unmeasured side over rank-1 projective measurements of the measured
//! qubit. It is located by a Fibonacci-sphere grid followed by Nelder–Mead
//! refinement on the polar/azimuthal angles. Discord is `I - J`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::qmath::{
    partial_trace, pauli_x, pauli_y, pauli_z, von_neumann_entropy, ComplexMatrix,
    DensityOperator, Subsystem,
};

/// Number of directions in the coarse global search.
pub const GRID_DIRECTIONS: usize = 400;
/// Outcomes rarer than this contribute nothing to the conditional entropy.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-12;

/// A rank-1 projective qubit measurement along a Bloch direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementBasis {
    /// Polar angle in `[0, pi]`.
    pub theta: f64,
    /// Azimuth in `[0, 2 pi)`.
    pub phi: f64,
}

impl MeasurementBasis {
    pub fn new(theta: f64, phi: f64) -> Self {
        // Fold arbitrary angles back onto the canonical chart.
        let (x, y, z) = (theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
        let theta = z.clamp(-1.0, 1.0).acos();
        let mut phi = y.atan2(x);
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        if phi >= 2.0 * PI {
            phi -= 2.0 * PI;
        }
        Self { theta, phi }
    }

    pub fn z() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    pub fn direction(&self) -> [f64; 3] {
        [
            self.theta.sin() * self.phi.cos(),
            self.theta.sin() * self.phi.sin(),
            self.theta.cos(),
        ]
    }

    /// `(Pi_+, Pi_-)` with `Pi_+- = (I +- n.sigma)/2`.
    pub fn projectors(&self) -> (ComplexMatrix, ComplexMatrix) {
        let [x, y, z] = self.direction();
        let n_sigma = pauli_x().scale(x) + pauli_y().scale(y) + pauli_z().scale(z);
        let id = ComplexMatrix::identity(2, 2);
        ((&id + &n_sigma).scale(0.5), (&id - &n_sigma).scale(0.5))
    }
}

/// `I`, `J` and `delta` for one state and one measured side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub mutual_information: f64,
    pub classical: f64,
    pub discord: f64,
    pub argmax_basis: MeasurementBasis,
    pub measured_side: Subsystem,
}

fn check_dims(rho: &DensityOperator, dims: (usize, usize)) -> Result<()> {
    if dims.0 * dims.1 != rho.dim() || dims.0 == 0 || dims.1 == 0 {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: dims.0 * dims.1,
        });
    }
    Ok(())
}

/// `S(A) + S(B) - S(AB)` in bits.
pub fn mutual_information(rho: &DensityOperator, dims: (usize, usize)) -> Result<f64> {
    check_dims(rho, dims)?;
    let sa = von_neumann_entropy(&partial_trace(rho, dims, Subsystem::A)?);
    let sb = von_neumann_entropy(&partial_trace(rho, dims, Subsystem::B)?);
    Ok(sa + sb - von_neumann_entropy(rho))
}

/// Entropy reduction on the unmeasured side for one projective basis on
/// the measured qubit: `S(B) - sum_a p_a S(B|a)`.
pub fn conditional_j(
    rho: &DensityOperator,
    dims: (usize, usize),
    measured: Subsystem,
    basis: &MeasurementBasis,
) -> Result<f64> {
    check_dims(rho, dims)?;
    let (dm, du) = match measured {
        Subsystem::A => dims,
        Subsystem::B => (dims.1, dims.0),
    };
    if dm != 2 {
        return Err(Error::InvalidArgument(format!(
            "measured subsystem must be a qubit (dimension {dm})"
        )));
    }
    let unmeasured = partial_trace(rho, dims, measured.other())?;
    let s_unmeasured = von_neumann_entropy(&unmeasured);

    let (plus, minus) = basis.projectors();
    let mut conditional = 0.0;
    for proj in [plus, minus] {
        let (p, state) = conditional_state(rho.matrix(), dims, measured, &proj, du);
        if p < MIN_OUTCOME_PROBABILITY {
            continue;
        }
        conditional += p * von_neumann_entropy(&state);
    }
    Ok(s_unmeasured - conditional)
}

/// Outcome probability and post-measurement state of the unmeasured side.
fn conditional_state(
    m: &ComplexMatrix,
    dims: (usize, usize),
    measured: Subsystem,
    proj: &ComplexMatrix,
    du: usize,
) -> (f64, DensityOperator) {
    let db = dims.1;
    // tr_measured[(proj (x) I) rho], with index layout a * db + b.
    let mut block = ComplexMatrix::zeros(du, du);
    for i in 0..du {
        for j in 0..du {
            let mut acc = crate::qmath::ZERO;
            for s in 0..2 {
                for t in 0..2 {
                    let (row, col) = match measured {
                        Subsystem::A => (t * db + i, s * db + j),
                        Subsystem::B => (i * db + t, j * db + s),
                    };
                    acc += proj[(s, t)] * m[(row, col)];
                }
            }
            block[(i, j)] = acc;
        }
    }
    let p = crate::qmath::trace(&block).re;
    if p < MIN_OUTCOME_PROBABILITY {
        return (p.max(0.0), DensityOperator::maximally_mixed(du));
    }
    let block = block.unscale(p);
    let block = (&block + block.adjoint()).scale(0.5);
    let state = DensityOperator::new(block).unwrap_or_else(|_| DensityOperator::maximally_mixed(du));
    (p, state)
}

/// Directions of a Fibonacci lattice on the sphere, as `(theta, phi)`.
pub fn fibonacci_sphere(count: usize) -> Vec<MeasurementBasis> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let phi = (i as f64 * golden).rem_euclid(2.0 * PI);
            MeasurementBasis::new(z.clamp(-1.0, 1.0).acos(), phi)
        })
        .collect()
}

/// Deterministic max: larger value wins, ties go to smaller theta then phi.
fn better(a: (f64, MeasurementBasis), b: (f64, MeasurementBasis)) -> (f64, MeasurementBasis) {
    use std::cmp::Ordering::*;
    match a.0.total_cmp(&b.0) {
        Greater => a,
        Less => b,
        Equal => match a.1.theta.total_cmp(&b.1.theta).then(a.1.phi.total_cmp(&b.1.phi)) {
            Greater => b,
            _ => a,
        },
    }
}

/// Supremum of [`conditional_j`] over projective bases, with the maximizing basis.
pub fn classical_correlation(
    rho: &DensityOperator,
    dims: (usize, usize),
    measured: Subsystem,
) -> Result<(f64, MeasurementBasis)> {
    // Surface dimension errors before fanning out.
    conditional_j(rho, dims, measured, &MeasurementBasis::z())?;

    let grid = fibonacci_sphere(GRID_DIRECTIONS);
    let (grid_best, grid_basis) = grid
        .par_iter()
        .map(|b| {
            let v = conditional_j(rho, dims, measured, b).unwrap_or(f64::NEG_INFINITY);
            (v, *b)
        })
        .reduce(|| (f64::NEG_INFINITY, MeasurementBasis::z()), better);

    let objective = |x: &[f64]| {
        -conditional_j(rho, dims, measured, &MeasurementBasis::new(x[0], x[1]))
            .unwrap_or(f64::NEG_INFINITY)
    };
    let spacing = (4.0 * PI / GRID_DIRECTIONS as f64).sqrt();
    let opts = NelderMeadOptions {
        f_tol: 1e-14,
        x_tol: 1e-8,
        max_iterations: 2_000,
        adaptive: false,
    };
    let refined = nelder_mead(
        objective,
        &[grid_basis.theta, grid_basis.phi],
        &[spacing, spacing],
        &opts,
    );
    let refined_basis = MeasurementBasis::new(refined.x[0], refined.x[1]);
    let refined_value = -refined.value;

    Ok(if refined_value > grid_best {
        (refined_value, refined_basis)
    } else {
        (grid_best, grid_basis)
    })
}

/// Mutual information, classical correlation and discord for a two-qubit state.
pub fn discord(rho: &DensityOperator, measured: Subsystem) -> Result<CorrelationReport> {
    discord_with_dims(rho, (2, 2), measured)
}

pub fn discord_with_dims(
    rho: &DensityOperator,
    dims: (usize, usize),
    measured: Subsystem,
) -> Result<CorrelationReport> {
    let mutual_information = mutual_information(rho, dims)?;
    let (classical, argmax_basis) = classical_correlation(rho, dims, measured)?;
    Ok(CorrelationReport {
        mutual_information,
        classical,
        discord: mutual_information - classical,
        argmax_basis,
        measured_side: measured,
    })
}

/// `S(sum_i p_i rho_i) - sum_i p_i S(rho_i)`.
pub fn holevo_chi(ensemble: &[(f64, DensityOperator)]) -> Result<f64> {
    let first = ensemble
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty ensemble".into()))?;
    let dim = first.1.dim();
    if let Some((_, bad)) = ensemble.iter().find(|(_, r)| r.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bad.dim(),
        });
    }
    let total: f64 = ensemble.iter().map(|(p, _)| p).sum();
    if ensemble.iter().any(|(p, _)| *p < 0.0) || (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "probabilities must be non-negative and sum to 1 (sum = {total})"
        )));
    }
    let refs: Vec<(f64, &DensityOperator)> = ensemble.iter().map(|(p, r)| (*p, r)).collect();
    let average = DensityOperator::mixture(&refs)?;
    let mean_entropy: f64 = ensemble
        .iter()
        .map(|(p, r)| p * von_neumann_entropy(r))
        .sum();
    Ok(von_neumann_entropy(&average) - mean_entropy)
}
