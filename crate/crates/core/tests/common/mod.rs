#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use unotsim::qmath::{c, ComplexMatrix, ComplexVector, DensityOperator, PureState};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Ginibre-distributed density operator of full rank.
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DensityOperator {
    let g = gaussian_matrix(rng, dim, dim);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let m = m.unscale(tr);
    DensityOperator::new((&m + m.adjoint()).scale(0.5)).unwrap()
}

pub fn random_pure(rng: &mut ChaCha8Rng, dim: usize) -> PureState {
    let v: ComplexVector = gaussian_matrix(rng, dim, 1).column(0).into_owned();
    PureState::normalized(v).unwrap()
}

/// Haar-random unitary via QR of a Ginibre matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let qr = gaussian_matrix(rng, dim, dim).qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = ComplexMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            r[(i, i)] / r[(i, i)].norm()
        } else {
            c(0.0, 0.0)
        }
    });
    q * phases
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, dim, dim);
    (&g + g.adjoint()).scale(0.5)
}

/// Random mixture of one to six product pure states.
pub fn random_separable(rng: &mut ChaCha8Rng) -> DensityOperator {
    let terms = rng.random_range(1..=6);
    let weights: Vec<f64> = (0..terms).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let states: Vec<DensityOperator> = (0..terms)
        .map(|_| {
            let a = random_pure(rng, 2);
            let b = random_pure(rng, 2);
            DensityOperator::from_pure(&a.tensor(&b))
        })
        .collect();
    let members: Vec<(f64, &DensityOperator)> =
        weights.iter().map(|w| w / total).zip(states.iter()).collect();
    DensityOperator::mixture(&members).unwrap()
}
