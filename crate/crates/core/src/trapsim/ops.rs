use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::qmath::{cis, expm_anti_hermitian, ComplexMatrix, ZERO};

use super::ion::{check_cutoff, ion_dim, ion_index, INTERNAL_LEVELS};
use super::pulse::{Pulse, PulseSequence};

/// Microwave rotation `exp[-i chi/2 (e^{-i phi}|n><0| + h.c.)]` on the
/// internal levels, identity on the motion.
pub fn microwave(level: u8, chi: f64, phi: f64, cutoff: usize) -> Result<ComplexMatrix> {
    let internal = microwave_internal(level, chi, phi)?;
    check_cutoff(cutoff)?;
    Ok(internal.kronecker(&ComplexMatrix::identity(cutoff + 1, cutoff + 1)))
}

/// The 4x4 internal-level part of [`microwave`].
pub fn microwave_internal(level: u8, chi: f64, phi: f64) -> Result<ComplexMatrix> {
    if !(1..=3).contains(&level) {
        return Err(Error::InvalidArgument(format!(
            "microwave level must be 1, 2 or 3 (got {level})"
        )));
    }
    let n = level as usize;
    // generator = -i chi/2 (e^{-i phi}|n><0| + e^{i phi}|0><n|)
    let mut g = ComplexMatrix::from_element(INTERNAL_LEVELS, INTERNAL_LEVELS, ZERO);
    let scale = crate::qmath::c(0.0, -chi / 2.0);
    g[(n, 0)] = scale * cis(-phi);
    g[(0, n)] = scale * cis(phi);
    expm_anti_hermitian(&g)
}

/// Red sideband `exp[chi/2 (e^{-i phi} s+ a - e^{i phi} s- a^dag)]` with
/// `s+ = |2><0|` on the truncated space.
pub fn red_sideband(chi: f64, phi: f64, cutoff: usize) -> Result<ComplexMatrix> {
    check_cutoff(cutoff)?;
    let dim = ion_dim(cutoff);
    let mut g = ComplexMatrix::from_element(dim, dim, ZERO);
    for m in 0..cutoff {
        // s+ a |0, m+1> = sqrt(m+1) |2, m>
        let rate = ((m + 1) as f64).sqrt();
        let lower = ion_index(0, m + 1, cutoff);
        let upper = ion_index(2, m, cutoff);
        g[(upper, lower)] = cis(-phi) * (chi / 2.0 * rate);
        g[(lower, upper)] = -cis(phi) * (chi / 2.0 * rate);
    }
    expm_anti_hermitian(&g)
}

/// Smallest `chi > 0` transferring `|0, m+1>` fully to `|2, m>`, located by
/// bisection on the simulated sideband unitary (expected `pi / sqrt(m+1)`).
pub fn sideband_pi_angle(m: usize, cutoff: usize) -> Result<f64> {
    if m + 1 > cutoff {
        return Err(Error::InvalidArgument(format!(
            "manifold m = {m} needs a cutoff above {m} (got {cutoff})"
        )));
    }
    let stay = |chi: f64| -> Result<f64> {
        let u = red_sideband(chi, 0.0, cutoff)?;
        let k = ion_index(0, m + 1, cutoff);
        Ok(u[(k, k)].re)
    };
    // The diagonal amplitude is cos(rate chi / 2); bracket its first zero
    // between 0 and 3 pi / (2 rate) without assuming the rate.
    let (mut lo, mut hi) = (0.0f64, 1.5 * PI / ((m + 1) as f64).sqrt());
    if stay(hi)? > 0.0 {
        return Err(Error::InvalidArgument(format!("no pi transfer bracketed on manifold {m}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if stay(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Three-pulse composite: `RSB(pi/2, phi)`, `RSB(pi/sqrt2, phi + pi/2)`,
/// `RSB(pi/2, phi)`.
pub fn flip_sequence(phi: f64) -> PulseSequence {
    PulseSequence::new(
        "FLIP",
        vec![
            Pulse::red_sideband(PI / 2.0, phi),
            Pulse::red_sideband(PI / SQRT_2, phi + PI / 2.0),
            Pulse::red_sideband(PI / 2.0, phi),
        ],
    )
}

pub fn flip(phi: f64, cutoff: usize) -> Result<ComplexMatrix> {
    check_cutoff(cutoff)?;
    flip_sequence(phi).unitary(cutoff)
}

/// Solution of the SWAP design equations
/// `sin(pi/sqrt2) cos(alpha) = sin(chi/4)` and
/// `tan(pi/sqrt2) cos(phi - gamma) = tan(chi/4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapParameters {
    pub alpha: f64,
    pub gamma: f64,
    /// Largest absolute residual of the two equations.
    pub residual: f64,
}

/// Root of `a cos x = b` on `[0, pi]` by bisection.
fn solve_cos(a: f64, b: f64) -> Option<f64> {
    if a == 0.0 || (b / a).abs() > 1.0 + 1e-15 {
        return None;
    }
    // f is monotone on [0, pi].
    let f = |x: f64| a * x.cos() - b;
    let (mut lo, mut hi) = (0.0f64, PI);
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Solve the SWAP design equations, choosing the branch whose composite
/// realizes the requested `|0,1> -> cos(chi/2)|0,1> + e^{-i phi} sin(chi/2)|2,0>`.
pub fn swap_parameters(chi: f64, phi: f64) -> Result<SwapParameters> {
    let s = (PI / SQRT_2).sin();
    let t = (PI / SQRT_2).tan();
    let domain = || Error::SwapDomain { chi, phi };
    if !chi.is_finite() || !phi.is_finite() {
        return Err(domain());
    }
    let alpha = solve_cos(s, (chi / 4.0).sin()).ok_or_else(domain)?;
    let offset = solve_cos(t, (chi / 4.0).tan()).ok_or_else(domain)?;
    if (chi / 4.0).cos() <= 0.0 {
        return Err(domain());
    }

    let residual = |alpha: f64, gamma: f64| {
        let r1 = s * alpha.cos() - (chi / 4.0).sin();
        let r2 = t * (phi - gamma).cos() - (chi / 4.0).tan();
        r1.abs().max(r2.abs())
    };
    // Both equations are even in their unknown, so there are two candidate
    // branches; the manifold m = 0 picks the one with the right phase.
    let candidates = [(alpha, phi - offset), (-alpha, phi + offset)];
    let target = [(chi / 2.0).cos(), 0.0, (chi / 2.0).sin() * (-phi).cos(), (chi / 2.0).sin() * (-phi).sin()];
    let mut best: Option<(f64, SwapParameters)> = None;
    for (a, g) in candidates {
        let [u00, u10] = swap_block_m0(a, g);
        let err = (u00.re - target[0]).abs()
            + (u00.im - target[1]).abs()
            + (u10.re - target[2]).abs()
            + (u10.im - target[3]).abs();
        let params = SwapParameters {
            alpha: a,
            gamma: g,
            residual: residual(a, g),
        };
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((err, params));
        }
    }
    let (_, params) = best.expect("two candidates");
    if params.residual > 1e-12 {
        return Err(domain());
    }
    Ok(params)
}

/// First column of the SWAP composite on the `{|0,1>, |2,0>}` block (rate 1).
fn swap_block_m0(alpha: f64, gamma: f64) -> [crate::qmath::C64; 2] {
    // One sideband pulse on a rate-1 manifold, basis (|0,1>, |2,0>).
    let pulse = |theta: f64, phase: f64| {
        let (c, s) = (theta.cos(), theta.sin());
        [
            [crate::qmath::c(c, 0.0), -cis(phase) * s],
            [cis(-phase) * s, crate::qmath::c(c, 0.0)],
        ]
    };
    let seq = [
        pulse(PI / (2.0 * SQRT_2), gamma),
        pulse(PI / SQRT_2, 2.0 * alpha + gamma),
        pulse(PI / (2.0 * SQRT_2), gamma),
    ];
    let mut v = [crate::qmath::c(1.0, 0.0), ZERO];
    for m in seq {
        v = [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]];
    }
    v
}

pub fn swap_sequence(chi: f64, phi: f64) -> Result<PulseSequence> {
    let p = swap_parameters(chi, phi)?;
    Ok(PulseSequence::new(
        "SWAP",
        vec![
            Pulse::red_sideband(PI / SQRT_2, p.gamma),
            Pulse::red_sideband(SQRT_2 * PI, 2.0 * p.alpha + p.gamma),
            Pulse::red_sideband(PI / SQRT_2, p.gamma),
        ],
    ))
}

pub fn swap(chi: f64, phi: f64, cutoff: usize) -> Result<ComplexMatrix> {
    check_cutoff(cutoff)?;
    swap_sequence(chi, phi)?.unitary(cutoff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{c, max_abs_diff, unitarity_defect, C64};
    use crate::trapsim::ion::IonState;

    const N: usize = 8;

    fn amp(u: &ComplexMatrix, to: (usize, usize), from: (usize, usize)) -> C64 {
        u[(ion_index(to.0, to.1, N), ion_index(from.0, from.1, N))]
    }

    #[test]
    fn microwave_closed_form() {
        let (chi, phi) = (1.3, 0.4);
        for n in 1..=3u8 {
            let u = microwave_internal(n, chi, phi).unwrap();
            let k = n as usize;
            let (co, si) = ((chi / 2.0).cos(), (chi / 2.0).sin());
            assert!((u[(0, 0)] - c(co, 0.0)).norm() < 1e-14);
            assert!((u[(k, 0)] - c(0.0, -1.0) * cis(-phi) * si).norm() < 1e-14);
            assert!((u[(0, k)] - c(0.0, -1.0) * cis(phi) * si).norm() < 1e-14);
            for j in (1..4).filter(|&j| j != k) {
                assert!((u[(j, j)] - c(1.0, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn microwave_examples() {
        let id = microwave(2, 0.0, 1.0, N).unwrap();
        assert!(max_abs_diff(&id, &ComplexMatrix::identity(ion_dim(N), ion_dim(N))) < 1e-14);

        let u = microwave(1, PI, 0.0, N).unwrap();
        assert!((amp(&u, (1, 0), (0, 0)) - c(0.0, -1.0)).norm() < 1e-14);

        let u = microwave(2, PI / 2.0, PI / 2.0, N).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((amp(&u, (0, 0), (0, 0)) - c(h, 0.0)).norm() < 1e-14);
        assert!((amp(&u, (2, 0), (0, 0)) - c(-h, 0.0)).norm() < 1e-14);

        assert!(microwave(0, PI, 0.0, N).is_err());
        assert!(microwave(4, PI, 0.0, N).is_err());
    }

    #[test]
    fn sideband_matches_two_level_closed_form() {
        let (chi, phi) = (0.9, 1.7);
        let u = red_sideband(chi, phi, N).unwrap();
        assert!(unitarity_defect(&u) < 1e-12);
        for m in 0..N {
            let theta = chi / 2.0 * ((m + 1) as f64).sqrt();
            let lower = (0, m + 1);
            let upper = (2, m);
            assert!((amp(&u, lower, lower) - c(theta.cos(), 0.0)).norm() < 1e-12);
            assert!((amp(&u, upper, lower) - cis(-phi) * theta.sin()).norm() < 1e-12);
            assert!((amp(&u, lower, upper) + cis(phi) * theta.sin()).norm() < 1e-12);
        }
        // Uncoupled levels.
        for m in 0..=N {
            assert!((amp(&u, (1, m), (1, m)) - c(1.0, 0.0)).norm() < 1e-12);
            assert!((amp(&u, (3, m), (3, m)) - c(1.0, 0.0)).norm() < 1e-12);
        }
        assert!((amp(&u, (0, 0), (0, 0)) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn sideband_examples() {
        let u = red_sideband(PI, 0.0, N).unwrap();
        assert!((amp(&u, (0, 1), (2, 0)) + c(1.0, 0.0)).norm() < 1e-12);
        let u = red_sideband(PI / SQRT_2, 0.0, N).unwrap();
        assert!(amp(&u, (2, 1), (2, 1)).norm() < 1e-12);
        assert!(red_sideband(PI, 0.0, 1).is_err());
    }

    #[test]
    fn flip_moves_populations() {
        let u = flip(0.3, N).unwrap();
        assert!(unitarity_defect(&u) < 1e-12);
        assert!((amp(&u, (0, 0), (0, 0)) - c(1.0, 0.0)).norm() < 1e-12);
        assert!((amp(&u, (2, 0), (0, 1)).norm() - 1.0).abs() < 1e-12);
        assert!((amp(&u, (2, 1), (0, 2)).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn swap_parameters_satisfy_design_equations() {
        for (chi, phi) in [(0.0, 0.0), (PI / 2.0, 0.3), (PI, 0.0), (1.0, 1.0), (2.5, 5.0)] {
            let p = swap_parameters(chi, phi).unwrap();
            assert!(p.residual <= 1e-12, "{chi} {phi} {p:?}");
        }
        assert!(matches!(swap_parameters(3.9, 0.0), Err(Error::SwapDomain { .. })));
        assert!(matches!(swap_parameters(f64::NAN, 0.0), Err(Error::SwapDomain { .. })));
    }

    #[test]
    fn swap_zero_angle_is_identity_on_block() {
        let u = swap(0.0, 0.7, N).unwrap();
        assert!((amp(&u, (0, 1), (0, 1)) - c(1.0, 0.0)).norm() < 1e-9);
        assert!((amp(&u, (2, 0), (2, 0)) - c(1.0, 0.0)).norm() < 1e-9);
        assert!(amp(&u, (2, 0), (0, 1)).norm() < 1e-9);
    }

    #[test]
    fn swap_keeps_truncation_healthy() {
        let u = swap(1.2, 0.4, N).unwrap();
        for (n, m) in [(0, 0), (0, 1), (2, 0), (2, 1), (1, 1), (3, 0)] {
            let s = IonState::basis(n, m, N).unwrap().apply_unitary(&u).unwrap();
            s.check_truncation().unwrap();
        }
    }
}
