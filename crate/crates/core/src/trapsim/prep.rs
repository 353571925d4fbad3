use std::f64::consts::PI;

use crate::embedding::{encode_pure_pair, EncodedVector};
use crate::error::{Error, Result};
use crate::spinstates::{bloch_state, BlochDirection};

use super::ion::IonState;
use super::pulse::{Pulse, PulseSequence};

/// One row of the preparation table: a product pair and the pulses that
/// produce its encoded form from `|0_A, 0_B>`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrepRow {
    pub dir_a: BlochDirection,
    pub dir_b: BlochDirection,
    pub sequence: PulseSequence,
}

enum Step {
    Mw(u8, f64, f64),
    Rsb(f64, f64),
}

fn row(dir_a: BlochDirection, dir_b: BlochDirection, steps: &[Step]) -> PrepRow {
    let pulses = steps
        .iter()
        .map(|s| match *s {
            Step::Mw(n, chi, phi) => Pulse::microwave(n, chi, phi).expect("valid table pulse"),
            Step::Rsb(chi, phi) => Pulse::red_sideband(chi, phi),
        })
        .collect();
    let label = format!(
        "{},{}",
        dir_a.cardinal_label().unwrap_or("?"),
        dir_b.cardinal_label().unwrap_or("?")
    );
    PrepRow {
        dir_a,
        dir_b,
        sequence: PulseSequence::new(label, pulses),
    }
}

/// The twelve aligned and antialigned cardinal pairs.
pub fn preparation_table() -> Vec<PrepRow> {
    use BlochDirection as D;
    use Step::{Mw, Rsb};
    let h = PI / 2.0;
    vec![
        row(D::X, D::X, &[Mw(2, h, h), Rsb(PI, 0.0), Mw(1, h, -h)]),
        row(D::MINUS_X, D::MINUS_X, &[Mw(2, h, -h), Rsb(PI, 0.0), Mw(1, h, h)]),
        row(D::Y, D::Y, &[Mw(2, h, 0.0), Rsb(PI, 0.0), Mw(3, h, -h)]),
        row(D::MINUS_Y, D::MINUS_Y, &[Mw(2, h, PI), Rsb(PI, 0.0), Mw(3, h, h)]),
        row(D::Z, D::Z, &[]),
        row(D::MINUS_Z, D::MINUS_Z, &[Mw(2, PI, 0.0), Rsb(PI, 0.0), Mw(1, PI, 0.0)]),
        row(D::MINUS_X, D::X, &[Mw(2, h, h), Rsb(PI, 0.0), Mw(1, h, h)]),
        row(D::X, D::MINUS_X, &[Mw(2, h, -h), Rsb(PI, 0.0), Mw(1, h, -h)]),
        row(D::MINUS_Y, D::Y, &[Mw(2, h, 0.0), Rsb(PI, 0.0), Mw(3, h, h)]),
        row(D::Y, D::MINUS_Y, &[Mw(2, h, PI), Rsb(PI, 0.0), Mw(3, h, -h)]),
        row(D::MINUS_Z, D::Z, &[Mw(1, PI, -h)]),
        row(D::Z, D::MINUS_Z, &[Mw(2, PI, h), Rsb(PI, 0.0)]),
    ]
}

fn same_direction(a: &BlochDirection, b: &BlochDirection) -> bool {
    a.vector()
        .iter()
        .zip(b.vector())
        .all(|(x, y)| (x - y).abs() < 1e-12)
}

pub fn preparation_sequence(dir_a: &BlochDirection, dir_b: &BlochDirection) -> Result<PulseSequence> {
    preparation_table()
        .into_iter()
        .find(|r| same_direction(&r.dir_a, dir_a) && same_direction(&r.dir_b, dir_b))
        .map(|r| r.sequence)
        .ok_or_else(|| {
            Error::InvalidArgument(format!("no preparation sequence for pair ({dir_a}, {dir_b})"))
        })
}

/// `M|a> (x) |b>`, the encoded form a preparation should reach.
pub fn encoded_target(dir_a: &BlochDirection, dir_b: &BlochDirection) -> Result<EncodedVector> {
    encode_pure_pair(&bloch_state(dir_a), &bloch_state(dir_b))
}

/// Run the table sequence for `(dir_a, dir_b)` from `|0_A, 0_B>`.
pub fn prepare_pair(dir_a: &BlochDirection, dir_b: &BlochDirection, cutoff: usize) -> Result<IonState> {
    let seq = preparation_sequence(dir_a, dir_b)?;
    let state = IonState::ground(cutoff)?.apply_sequence(&seq)?;
    state.check_truncation()?;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{c, C64};
    use crate::trapsim::ion::DEFAULT_FOCK_CUTOFF as N;

    #[test]
    fn table_covers_both_ensembles() {
        let table = preparation_table();
        assert_eq!(table.len(), 12);
        for d in BlochDirection::CARDINAL {
            assert!(preparation_sequence(&d, &d).is_ok());
            assert!(preparation_sequence(&d.antipode(), &d).is_ok());
        }
        assert!(preparation_sequence(&BlochDirection::X, &BlochDirection::Y).is_err());
    }

    #[test]
    fn every_row_reaches_its_encoded_form() {
        for r in preparation_table() {
            let s = prepare_pair(&r.dir_a, &r.dir_b, N).unwrap();
            let target = IonState::from_encoded(&encoded_target(&r.dir_a, &r.dir_b).unwrap(), N).unwrap();
            let f = s.fidelity(&target).unwrap();
            assert!(f >= 1.0 - 1e-9, "{}: fidelity {f}", r.sequence.label());
        }
    }

    #[test]
    fn small_examples() {
        let s = prepare_pair(&BlochDirection::Z, &BlochDirection::Z, N).unwrap();
        assert_eq!(s, IonState::ground(N).unwrap());

        let s = prepare_pair(&BlochDirection::MINUS_Z, &BlochDirection::Z, N).unwrap();
        assert!((s.amplitude(1, 0) - c(1.0, 0.0)).norm() < 1e-12);

        // Exact amplitudes, not just up to a global phase.
        let s = prepare_pair(&BlochDirection::X, &BlochDirection::X, N).unwrap();
        let want: [(usize, usize, C64); 4] =
            [(0, 0, c(0.5, 0.0)), (0, 1, c(0.5, 0.0)), (1, 0, c(0.5, 0.0)), (1, 1, c(0.5, 0.0))];
        for (n, m, a) in want {
            assert!((s.amplitude(n, m) - a).norm() < 1e-12);
        }
    }
}
