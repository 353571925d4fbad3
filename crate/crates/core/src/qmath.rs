//! Dense complex linear algebra and the entropy and fidelity functionals
//! every other module builds on.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. [`DensityOperator`] and
//! [`PureState`] are validated wrappers; once constructed they are
//! immutable and every function here is pure.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Tolerance for Hermiticity, trace and positivity checks on density operators.
pub const STATE_TOL: f64 = 1e-10;
/// Negative eigenvalues above `-ENTROPY_CLAMP` are treated as zero.
pub const ENTROPY_CLAMP: f64 = 1e-10;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cis(phase: f64) -> C64 {
    C64::from_polar(1.0, phase)
}

/// One half of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
}

/// Which fidelity convention to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FidelityConvention {
    /// `[tr sqrt(sqrt(rho) sigma sqrt(rho))]^2`
    #[default]
    Squared,
    /// `tr sqrt(sqrt(rho) sigma sqrt(rho))`
    Root,
}

pub fn check_square_finite(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Largest entrywise modulus of `m - m^H`.
pub fn hermitian_defect(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Hermitian eigendecomposition with eigenvalues in ascending order.
///
/// The returned columns of the eigenvector matrix are orthonormal and
/// `h = V diag(lambda) V^H`.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_square_finite(h)?;
    let defect = hermitian_defect(h);
    if defect > STATE_TOL {
        return Err(Error::NotHermitian(defect));
    }
    // Symmetrize so round-off in the input cannot leak into the solver.
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    Ok((values, vectors))
}

/// Apply a real function to a Hermitian matrix through its spectrum.
pub fn hermitian_function(h: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let (values, vectors) = eig_hermitian(h)?;
    let n = values.len();
    let mut scaled = vectors.clone();
    for (k, &v) in values.iter().enumerate() {
        let fv = f(v);
        for r in 0..n {
            scaled[(r, k)] *= fv;
        }
    }
    Ok(&scaled * vectors.adjoint())
}

/// `exp(generator)` for an anti-Hermitian generator, via the spectrum of
/// the Hermitian matrix `i * generator`.
pub fn expm_anti_hermitian(generator: &ComplexMatrix) -> Result<ComplexMatrix> {
    let h = generator.map(|z| z * I);
    let (values, vectors) = eig_hermitian(&h)?;
    let n = values.len();
    let mut scaled = vectors.clone();
    for (k, &v) in values.iter().enumerate() {
        let phase = cis(-v);
        for r in 0..n {
            scaled[(r, k)] *= phase;
        }
    }
    Ok(&scaled * vectors.adjoint())
}

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: ComplexVector,
}

impl PureState {
    pub fn new(amplitudes: ComplexVector) -> Result<Self> {
        let norm2 = amplitudes.norm_squared();
        if !norm2.is_finite() || (norm2 - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(Self { amplitudes })
    }

    pub fn from_slice(amplitudes: &[C64]) -> Result<Self> {
        Self::new(ComplexVector::from_column_slice(amplitudes))
    }

    /// Normalize an arbitrary nonzero vector.
    pub fn normalized(amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = ComplexVector::zeros(dim);
        v[index] = ONE;
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn projector(&self) -> ComplexMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validate and wrap `matrix`.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        check_square_finite(&matrix)?;
        let defect = hermitian_defect(&matrix);
        if defect > STATE_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = trace(&matrix);
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let (values, _) = eig_hermitian(&matrix)?;
        if values[0] < -STATE_TOL {
            return Err(Error::NotPsd(values[0]));
        }
        Ok(Self { matrix })
    }

    pub fn from_pure(state: &PureState) -> Self {
        Self {
            matrix: state.projector(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim, dim).unscale(dim as f64),
        }
    }

    /// Convex combination of density operators of equal dimension.
    pub fn mixture(members: &[(f64, &DensityOperator)]) -> Result<Self> {
        let dim = members
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?
            .1
            .dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (w, rho) in members {
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: rho.dim(),
                });
            }
            acc += rho.matrix.scale(*w);
        }
        Self::new(acc)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eig_hermitian(&self.matrix)
            .expect("validated density operator")
            .0
    }

    /// `U rho U^H` for a unitary of matching dimension.
    pub fn conjugate_by(&self, unitary: &ComplexMatrix) -> Result<Self> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: unitary.nrows(),
            });
        }
        Self::new(unitary * &self.matrix * unitary.adjoint())
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        DensityOperator {
            matrix: kron(&self.matrix, &other.matrix),
        }
    }

    /// `<psi| rho |psi>` (real part; the imaginary part vanishes for Hermitian rho).
    pub fn expectation(&self, psi: &ComplexVector) -> f64 {
        psi.dotc(&(&self.matrix * psi)).re
    }
}

/// Von Neumann entropy in bits. Eigenvalues in `[-1e-10, 0)` count as zero.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues())
}

pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Trace out one factor of a `dims.0 x dims.1` bipartite operator.
pub fn partial_trace(
    rho: &DensityOperator,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<DensityOperator> {
    let (da, db) = dims;
    if da * db != rho.dim() || da == 0 || db == 0 {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: da * db,
        });
    }
    let m = rho.matrix();
    let reduced = match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(db, db, |i, j| {
            (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()
        }),
    };
    DensityOperator::new(reduced)
}

/// Uhlmann fidelity under the requested convention.
pub fn fidelity_with(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    convention: FidelityConvention,
) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let sqrt_rho = hermitian_function(rho.matrix(), |l| l.max(0.0).sqrt())?;
    let inner = &sqrt_rho * sigma.matrix() * &sqrt_rho;
    let inner = (&inner + inner.adjoint()).scale(0.5);
    let (values, _) = eig_hermitian(&inner)?;
    // Eigenvalues below the round-off floor are zero; their square roots would not be.
    let floor = 64.0 * f64::EPSILON * values.iter().fold(1.0f64, |m, &l| m.max(l.abs()));
    let root: f64 = values
        .iter()
        .map(|&l| if l > floor { l.sqrt() } else { 0.0 })
        .sum();
    let root = root.clamp(0.0, 1.0);
    Ok(match convention {
        FidelityConvention::Squared => root * root,
        FidelityConvention::Root => root,
    })
}

/// Squared-convention fidelity.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    fidelity_with(rho, sigma, FidelityConvention::Squared)
}

/// `||rho - sigma||_1 / 2`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let diff = rho.matrix() - sigma.matrix();
    let (values, _) = eig_hermitian(&diff)?;
    Ok(0.5 * values.iter().map(|l| l.abs()).sum::<f64>())
}

/// Largest entrywise deviation of `U^H U` from the identity.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let n = u.nrows();
    max_abs_diff(&(u.adjoint() * u), &ComplexMatrix::identity(n, n))
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bell_phi_plus() -> DensityOperator {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = PureState::from_slice(&[c(h, 0.0), ZERO, ZERO, c(h, 0.0)]).unwrap();
        DensityOperator::from_pure(&psi)
    }

    #[test]
    fn identity_and_pauli_spectra() {
        let (l, _) = eig_hermitian(&ComplexMatrix::identity(2, 2)).unwrap();
        assert_abs_diff_eq!(l[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(l[1], 1.0, epsilon = 1e-14);
        let (l, _) = eig_hermitian(&pauli_x()).unwrap();
        assert_abs_diff_eq!(l[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(l[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn entropy_edge_cases() {
        let pure = DensityOperator::from_pure(&PureState::basis(3, 1));
        assert_abs_diff_eq!(von_neumann_entropy(&pure), 0.0, epsilon = 1e-12);
        let mixed = DensityOperator::maximally_mixed(2);
        assert_abs_diff_eq!(von_neumann_entropy(&mixed), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(entropy_of_spectrum(&[-5e-11, 1.0]), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn density_validation() {
        let not_unit = ComplexMatrix::identity(2, 2);
        assert!(matches!(DensityOperator::new(not_unit), Err(Error::InvalidTrace(_))));
        let negative = ComplexMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), ZERO, ZERO, c(-0.5, 0.0)]);
        assert!(matches!(DensityOperator::new(negative), Err(Error::NotPsd(_))));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(DensityOperator::new(rect), Err(Error::NotSquare { .. })));
        let mut nan = ComplexMatrix::identity(2, 2).unscale(2.0);
        nan[(0, 1)] = c(f64::NAN, 0.0);
        assert!(matches!(DensityOperator::new(nan), Err(Error::NonFinite)));
    }

    #[test]
    fn partial_trace_cases() {
        let a = DensityOperator::from_pure(&PureState::basis(2, 0));
        let b = DensityOperator::maximally_mixed(3);
        let ab = a.tensor(&b);
        let ra = partial_trace(&ab, (2, 3), Subsystem::A).unwrap();
        assert!(max_abs_diff(ra.matrix(), a.matrix()) < 1e-14);
        let rb = partial_trace(&ab, (2, 3), Subsystem::B).unwrap();
        assert!(max_abs_diff(rb.matrix(), b.matrix()) < 1e-14);

        let bell = partial_trace(&bell_phi_plus(), (2, 2), Subsystem::A).unwrap();
        assert!(max_abs_diff(bell.matrix(), DensityOperator::maximally_mixed(2).matrix()) < 1e-14);

        assert!(matches!(
            partial_trace(&ab, (2, 2), Subsystem::A),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fidelity_cases() {
        let up = DensityOperator::from_pure(&PureState::basis(2, 0));
        let down = DensityOperator::from_pure(&PureState::basis(2, 1));
        let mixed = DensityOperator::maximally_mixed(2);
        assert_abs_diff_eq!(fidelity(&up, &up).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fidelity(&up, &down).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fidelity(&mixed, &up).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(
            fidelity_with(&mixed, &up, FidelityConvention::Root).unwrap(),
            0.5f64.sqrt(),
            epsilon = 1e-12
        );
        assert!(fidelity(&up, &bell_phi_plus()).is_err());
    }

    #[test]
    fn expm_of_pauli_generator() {
        // exp(-i t X) = cos t I - i sin t X
        let t = 0.7f64;
        let g = pauli_x().map(|z| z * (-I) * t);
        let u = expm_anti_hermitian(&g).unwrap();
        let expected = ComplexMatrix::identity(2, 2).scale(t.cos()) - pauli_x().map(|z| z * I * t.sin());
        assert!(max_abs_diff(&u, &expected) < 1e-14);
        assert!(unitarity_defect(&u) < 1e-14);
    }
}
