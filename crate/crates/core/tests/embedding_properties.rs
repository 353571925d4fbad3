mod common;

use common::{random_pure, random_separable, rng};
use rand::Rng;
use unotsim::embedding::{
    decode_pair, encode_pair, encode_pure_pair, encode_qubit, encoded_unot, encoded_unot_on_pair,
    DecodingMap,
};
use unotsim::qmath::{c, max_abs_diff, trace_distance, ComplexMatrix, DensityOperator, PureState, Subsystem};
use unotsim::spinstates::{
    bloch_state, ensemble_state, rho_aligned, rho_antialigned, unot_apply, unot_pure, BlochDirection,
    EnsembleKind, SpinPairEnsemble,
};
use unotsim::tomography::measurement_settings;

#[test]
fn encoded_flip_commutes_with_embedding() {
    let mut r = rng(201);
    let theta = encoded_unot();
    for _ in 0..1000 {
        let phi = random_pure(&mut r, 2);
        let lhs = &theta * encode_qubit(&phi).unwrap().amplitudes();
        let rhs = encode_qubit(&unot_pure(&phi).unwrap()).unwrap();
        assert!((lhs - rhs.amplitudes()).norm() <= 1e-12);
    }
}

#[test]
fn encoded_flip_squares_to_minus_identity() {
    let t = encoded_unot();
    assert!(max_abs_diff(&(&t * &t), &(-ComplexMatrix::identity(4, 4))) < 1e-15);
}

#[test]
fn simulated_flip_on_density_operators() {
    for (from, to) in [
        (EnsembleKind::Antialigned, EnsembleKind::Aligned),
        (EnsembleKind::Aligned, EnsembleKind::Antialigned),
    ] {
        let rho_bar = encode_pair(&SpinPairEnsemble::six_direction(from)).unwrap();
        let out = rho_bar.conjugate_by(&encoded_unot_on_pair()).unwrap();
        let decoded = decode_pair(&out).unwrap();
        assert!(trace_distance(&decoded, &ensemble_state(to)).unwrap() <= 1e-10);
    }
}

#[test]
fn embedding_preserves_norm_and_is_real() {
    let mut r = rng(202);
    for _ in 0..200 {
        let phi = random_pure(&mut r, 2);
        let v = encode_qubit(&phi).unwrap();
        assert!((v.amplitudes().norm() - 1.0).abs() <= 1e-12);
        assert!(v.max_imaginary() <= 1e-12);
    }
    let up = PureState::basis(2, 0);
    let i_up = PureState::from_slice(&[c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
    let scaled = encode_qubit(&up).unwrap().amplitudes() * c(0.0, 1.0);
    assert!((encode_qubit(&i_up).unwrap().amplitudes() - scaled).norm() > 0.5);
}

#[test]
fn decoding_is_linear() {
    let mut r = rng(203);
    for _ in 0..20 {
        // Mixtures of encoded product pairs stay on the encoded manifold.
        let mk = |r: &mut rand_chacha::ChaCha8Rng| {
            let v = encode_pure_pair(&random_pure(r, 2), &random_pure(r, 2)).unwrap();
            DensityOperator::new(v.amplitudes() * v.amplitudes().adjoint()).unwrap()
        };
        let (r1, r2) = (mk(&mut r), mk(&mut r));
        let a = r.random_range(0.0..1.0);
        let mix = DensityOperator::mixture(&[(a, &r1), (1.0 - a, &r2)]).unwrap();
        let lhs = decode_pair(&mix).unwrap();
        let d1 = decode_pair(&r1).unwrap();
        let d2 = decode_pair(&r2).unwrap();
        let rhs = d1.matrix().scale(a) + d2.matrix().scale(1.0 - a);
        assert!(max_abs_diff(lhs.matrix(), &rhs) <= 1e-12);
    }
}

#[test]
fn decoding_map_and_measured_states() {
    let w = DecodingMap::default();
    let wwh = w.matrix() * w.matrix().adjoint();
    assert!(max_abs_diff(&wwh, &ComplexMatrix::identity(4, 4).scale(2.0)) <= 1e-12);
    for s in measurement_settings() {
        assert!((s.target_encoded.amplitudes().norm_squared() - 1.0).abs() <= 1e-12);
    }
    let rho_bar = encode_pair(&SpinPairEnsemble::six_direction(EnsembleKind::Aligned)).unwrap();
    assert!(trace_distance(&decode_pair(&rho_bar).unwrap(), &rho_aligned()).unwrap() <= 1e-12);
}

#[test]
fn spin_flip_properties() {
    let mut r = rng(204);
    // A local flip is a partial transpose, so only separable inputs stay positive.
    for _ in 0..50 {
        let rho = random_separable(&mut r);
        for side in [Subsystem::A, Subsystem::B] {
            let once = unot_apply(&rho, (2, 2), side).unwrap();
            let twice = unot_apply(&once, (2, 2), side).unwrap();
            assert!(max_abs_diff(twice.matrix(), rho.matrix()) <= 1e-12);
        }
        // Flipping both spins is a global anti-unitary and keeps the spectrum.
        let both = unot_apply(&unot_apply(&rho, (2, 2), Subsystem::A).unwrap(), (2, 2), Subsystem::B).unwrap();
        for (a, b) in rho.eigenvalues().iter().zip(both.eigenvalues()) {
            assert!((a - b).abs() <= 1e-10);
        }
    }
    // A one-sided flip does not: {1/2, 1/6, 1/6, 1/6} becomes {0, 1/3, 1/3, 1/3}.
    let local = unot_apply(&rho_antialigned(), (2, 2), Subsystem::A).unwrap();
    assert!(local.eigenvalues()[0].abs() < 1e-12);
    assert!((rho_antialigned().eigenvalues()[3] - 0.5).abs() < 1e-12);
    let up_up = unot_apply(&rho_aligned(), (2, 2), Subsystem::A).unwrap();
    assert!(trace_distance(&up_up, &rho_antialigned()).unwrap() <= 1e-12);
    for rho in [rho_aligned(), rho_antialigned()] {
        for keep in [Subsystem::A, Subsystem::B] {
            let m = unotsim::qmath::partial_trace(&rho, (2, 2), keep).unwrap();
            assert!(max_abs_diff(m.matrix(), &ComplexMatrix::identity(2, 2).scale(0.5)) <= 1e-12);
        }
    }
}

#[test]
fn flip_of_xz_mixture_is_a_local_rotation() {
    let xx = bloch_state(&BlochDirection::X).tensor(&bloch_state(&BlochDirection::X));
    let zz = bloch_state(&BlochDirection::Z).tensor(&bloch_state(&BlochDirection::Z));
    let rho = DensityOperator::mixture(&[
        (0.5, &DensityOperator::from_pure(&xx)),
        (0.5, &DensityOperator::from_pure(&zz)),
    ])
    .unwrap();
    let flipped = unot_apply(&rho, (2, 2), Subsystem::A).unwrap();
    // R_y(pi) = [[0, -1], [1, 0]]
    let ry = ComplexMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let rotated = rho.conjugate_by(&ry.kronecker(&ComplexMatrix::identity(2, 2))).unwrap();
    assert!(trace_distance(&flipped, &rotated).unwrap() <= 1e-12);
}
