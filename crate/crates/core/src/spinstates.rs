//! Bloch-direction spin states, the six-direction pair ensembles, and the
//! universal spin flip (UNOT) acting on logical qubits.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{c, ComplexMatrix, DensityOperator, PureState, Subsystem, ONE, ZERO};

/// A unit vector on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochDirection([f64; 3]);

impl BlochDirection {
    pub const X: Self = Self([1.0, 0.0, 0.0]);
    pub const MINUS_X: Self = Self([-1.0, 0.0, 0.0]);
    pub const Y: Self = Self([0.0, 1.0, 0.0]);
    pub const MINUS_Y: Self = Self([0.0, -1.0, 0.0]);
    pub const Z: Self = Self([0.0, 0.0, 1.0]);
    pub const MINUS_Z: Self = Self([0.0, 0.0, -1.0]);

    /// The six coordinate directions, in the order +x, -x, +y, -y, +z, -z.
    pub const CARDINAL: [Self; 6] = [
        Self::X,
        Self::MINUS_X,
        Self::Y,
        Self::MINUS_Y,
        Self::Z,
        Self::MINUS_Z,
    ];

    pub fn new(n: [f64; 3]) -> Result<Self> {
        let norm = n.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "Bloch direction must be a unit vector (|n| = {norm})"
            )));
        }
        Ok(Self(n))
    }

    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self([
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        ])
    }

    pub fn vector(&self) -> [f64; 3] {
        self.0
    }

    pub fn antipode(&self) -> Self {
        Self([-self.0[0], -self.0[1], -self.0[2]])
    }

    fn is_close(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0).all(|(a, b)| (a - b).abs() < 1e-12)
    }

    /// Short label for the six coordinate directions, `None` otherwise.
    pub fn cardinal_label(&self) -> Option<&'static str> {
        const LABELS: [&str; 6] = ["+x", "-x", "+y", "-y", "+z", "-z"];
        Self::CARDINAL
            .iter()
            .position(|d| d.is_close(self))
            .map(|i| LABELS[i])
    }
}

impl fmt::Display for BlochDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.cardinal_label() {
            Some(label) => f.write_str(label),
            None => write!(f, "({:.6}, {:.6}, {:.6})", self.0[0], self.0[1], self.0[2]),
        }
    }
}

/// `|n>` with a real, non-negative up amplitude; `-z` maps to `|down>` exactly.
pub fn bloch_state(n: &BlochDirection) -> PureState {
    let [x, y, z] = n.0;
    if (z + 1.0).abs() < 1e-15 {
        return PureState::basis(2, 1);
    }
    let up = ((1.0 + z) / 2.0).sqrt();
    // down amplitude = (x + i y) / (2 up)
    let down = c(x, y) / (2.0 * up);
    PureState::normalized(nalgebra::DVector::from_column_slice(&[c(up, 0.0), down]))
        .expect("non-zero Bloch state")
}

/// Which six-direction ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKind {
    /// Both spins along `n`.
    Aligned,
    /// Spin A along `-n`, spin B along `n`.
    Antialigned,
}

impl EnsembleKind {
    pub fn label(self) -> &'static str {
        match self {
            EnsembleKind::Aligned => "aligned",
            EnsembleKind::Antialigned => "antialigned",
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            EnsembleKind::Aligned => EnsembleKind::Antialigned,
            EnsembleKind::Antialigned => EnsembleKind::Aligned,
        }
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aligned" => Ok(EnsembleKind::Aligned),
            "antialigned" | "anti-aligned" => Ok(EnsembleKind::Antialigned),
            other => Err(Error::Parse(format!("unknown ensemble `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairMember {
    pub weight: f64,
    pub dir_a: BlochDirection,
    pub dir_b: BlochDirection,
}

/// A discrete probabilistic mixture of product pure spin pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinPairEnsemble {
    members: Vec<PairMember>,
}

impl SpinPairEnsemble {
    pub fn new(members: Vec<PairMember>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidArgument("ensemble has no members".into()));
        }
        if members.iter().any(|m| !(m.weight >= 0.0)) {
            return Err(Error::InvalidArgument("negative ensemble weight".into()));
        }
        let total: f64 = members.iter().map(|m| m.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "ensemble weights sum to {total}"
            )));
        }
        Ok(Self { members })
    }

    /// Equal-weight ensemble over the given direction pairs.
    pub fn uniform(pairs: &[(BlochDirection, BlochDirection)]) -> Result<Self> {
        let w = 1.0 / pairs.len() as f64;
        Self::new(
            pairs
                .iter()
                .map(|&(dir_a, dir_b)| PairMember {
                    weight: w,
                    dir_a,
                    dir_b,
                })
                .collect(),
        )
    }

    pub fn six_direction(kind: EnsembleKind) -> Self {
        let pairs: Vec<_> = BlochDirection::CARDINAL
            .iter()
            .map(|&n| match kind {
                EnsembleKind::Aligned => (n, n),
                EnsembleKind::Antialigned => (n.antipode(), n),
            })
            .collect();
        Self::uniform(&pairs).expect("six equal weights")
    }

    pub fn members(&self) -> &[PairMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Per-member density operators `|a><a| (x) |b><b|`.
    pub fn member_states(&self) -> Vec<(f64, DensityOperator)> {
        self.members
            .iter()
            .map(|m| {
                let psi = bloch_state(&m.dir_a).tensor(&bloch_state(&m.dir_b));
                (m.weight, DensityOperator::from_pure(&psi))
            })
            .collect()
    }
}

/// `sum_k w_k |a_k><a_k| (x) |b_k><b_k|`.
pub fn ensemble_density(ensemble: &SpinPairEnsemble) -> DensityOperator {
    let states = ensemble.member_states();
    let refs: Vec<(f64, &DensityOperator)> = states.iter().map(|(w, r)| (*w, r)).collect();
    DensityOperator::mixture(&refs).expect("valid ensemble")
}

/// The aligned six-direction state.
pub fn rho_aligned() -> DensityOperator {
    ensemble_density(&SpinPairEnsemble::six_direction(EnsembleKind::Aligned))
}

/// The anti-aligned six-direction state.
pub fn rho_antialigned() -> DensityOperator {
    ensemble_density(&SpinPairEnsemble::six_direction(EnsembleKind::Antialigned))
}

pub fn ensemble_state(kind: EnsembleKind) -> DensityOperator {
    match kind {
        EnsembleKind::Aligned => rho_aligned(),
        EnsembleKind::Antialigned => rho_antialigned(),
    }
}

/// The unitary part of the spin flip: `|down><up| - |up><down|`.
pub fn unot_unitary() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, -ONE, ONE, ZERO])
}

/// The spin flip on a pure qubit: `a|up> + b|down>  ->  -b*|up> + a*|down>`.
pub fn unot_pure(phi: &PureState) -> Result<PureState> {
    if phi.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: phi.dim(),
        });
    }
    let a = phi.amplitudes()[0];
    let b = phi.amplitudes()[1];
    PureState::from_slice(&[-b.conj(), a.conj()])
}

/// Apply the spin flip to one qubit factor of a bipartite density operator.
///
/// Conjugation in the computational basis becomes a partial transpose on
/// the target factor, followed by the flip unitary on that factor.
pub fn unot_apply(
    rho: &DensityOperator,
    dims: (usize, usize),
    target: Subsystem,
) -> Result<DensityOperator> {
    let (da, db) = dims;
    if da * db != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: da * db,
        });
    }
    let target_dim = match target {
        Subsystem::A => da,
        Subsystem::B => db,
    };
    if target_dim != 2 {
        return Err(Error::InvalidArgument(format!(
            "UNOT target must be a qubit (dimension {target_dim})"
        )));
    }
    let m = rho.matrix();
    let n = rho.dim();
    let transposed = ComplexMatrix::from_fn(n, n, |r, col| {
        let (ra, rb) = (r / db, r % db);
        let (ca, cb) = (col / db, col % db);
        match target {
            Subsystem::A => m[(ca * db + rb, ra * db + cb)],
            Subsystem::B => m[(ra * db + cb, ca * db + rb)],
        }
    });
    let flip = match target {
        Subsystem::A => unot_unitary().kronecker(&ComplexMatrix::identity(db, db)),
        Subsystem::B => ComplexMatrix::identity(da, da).kronecker(&unot_unitary()),
    };
    DensityOperator::new(&flip * transposed * flip.adjoint())
}

/// `sum_i p_i |i><i|_A (x) rho_i^B` over the computational basis of A.
pub fn quantum_classical_state(
    probabilities: &[f64],
    blocks: &[DensityOperator],
) -> Result<DensityOperator> {
    if probabilities.len() != 2 || blocks.len() != 2 {
        return Err(Error::InvalidArgument(
            "quantum-classical state needs two probabilities and two blocks".into(),
        ));
    }
    if let Some(b) = blocks.iter().find(|b| b.dim() != 2) {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: b.dim(),
        });
    }
    let total: f64 = probabilities.iter().sum();
    if probabilities.iter().any(|p| *p < 0.0) || (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "probabilities must be non-negative and sum to 1 (sum = {total})"
        )));
    }
    let mut acc = ComplexMatrix::zeros(4, 4);
    for (i, (p, block)) in probabilities.iter().zip(blocks).enumerate() {
        let proj = DensityOperator::from_pure(&PureState::basis(2, i));
        acc += proj.tensor(block).matrix().scale(*p);
    }
    DensityOperator::new(acc)
}
