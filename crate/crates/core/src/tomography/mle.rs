use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::{nelder_mead, quasi_newton, Minimum, NelderMeadOptions, QuasiNewtonOptions};
use crate::qmath::{c, eig_hermitian, ComplexMatrix, DensityOperator, ZERO};

use super::dataset::{TomographyDataset, PAIR_COUNT};
use super::settings::{ideal_populations, measurement_settings, OFF_DIAGONAL, SETTING_COUNT};

pub const PARAMETER_COUNT: usize = 16;
pub const START_COUNT: usize = 5;
/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.96;
pub const ITERATION_CAP: usize = 20_000;
/// Simplex iterations before each gradient polish.
const SEGMENT: usize = 5_000;
/// Gradient norm accepted as stationary; the difference-gradient floor is near 1e-6.
pub const GRADIENT_TOL: f64 = 1e-4;
const PERTURBATION_SEED: u64 = 0x5EED_7017;

/// Estimated populations with their standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    pub populations: [f64; SETTING_COUNT],
    pub sigma: [f64; SETTING_COUNT],
}

impl Observations {
    /// Binomial standard error with effective sample size `n_eff`, floored at
    /// `1 / (2 n_eff)`.
    pub fn binomial(populations: [f64; SETTING_COUNT], n_eff: f64) -> Self {
        let floor = 1.0 / (2.0 * n_eff);
        let sigma = populations.map(|p| ((p * (1.0 - p)).max(0.0) / n_eff).sqrt().max(floor));
        Self { populations, sigma }
    }

    pub fn from_dataset(ds: &TomographyDataset) -> Self {
        Self::binomial(ds.populations(), (PAIR_COUNT as u64 * ds.shots) as f64)
    }

    /// Noise-free populations of `rho` with the error model of `shots` per cell.
    pub fn exact(rho: &DensityOperator, shots: u64) -> Result<Self> {
        Ok(Self::binomial(ideal_populations(rho)?, (PAIR_COUNT as u64 * shots) as f64))
    }

    /// `sum_j (P_j(rho) - P_j^E)^2 / (2 Delta_j^2)` with `Delta_j = 1.96 sigma_j`.
    pub fn objective(&self, rho: &DensityOperator) -> f64 {
        objective_with(&formula_table(), self, rho.matrix())
    }
}

type FormulaTable = [[f64; PARAMETER_COUNT]; SETTING_COUNT];

fn formula_table() -> FormulaTable {
    let mut t = [[0.0; PARAMETER_COUNT]; SETTING_COUNT];
    for (row, s) in t.iter_mut().zip(measurement_settings()) {
        *row = s.formula.coefficients();
    }
    t
}

/// `(z0..z3, x01..x23, y01..y23)` of a Hermitian matrix.
fn matrix_coordinates(m: &ComplexMatrix) -> [f64; PARAMETER_COUNT] {
    let mut v = [0.0; PARAMETER_COUNT];
    for i in 0..4 {
        v[i] = m[(i, i)].re;
    }
    for (k, &(i, j)) in OFF_DIAGONAL.iter().enumerate() {
        v[4 + k] = m[(i, j)].re;
        v[10 + k] = -m[(i, j)].im;
    }
    v
}

fn objective_with(table: &FormulaTable, obs: &Observations, m: &ComplexMatrix) -> f64 {
    let coords = matrix_coordinates(m);
    let mut total = 0.0;
    for ((row, sigma), observed) in table.iter().zip(&obs.sigma).zip(&obs.populations) {
        let p: f64 = row.iter().zip(&coords).map(|(a, b)| a * b).sum();
        let delta = Z_95 * sigma;
        total += (p - observed).powi(2) / (2.0 * delta * delta);
    }
    total
}

/// Lower-triangular `T` from 16 reals: 4 diagonal entries, then the real and
/// imaginary parts of the 6 strictly-lower entries.
fn lower_triangular(params: &[f64]) -> ComplexMatrix {
    let mut t = ComplexMatrix::from_element(4, 4, ZERO);
    for i in 0..4 {
        t[(i, i)] = c(params[i], 0.0);
    }
    for (k, &(col, row)) in OFF_DIAGONAL.iter().enumerate() {
        t[(row, col)] = c(params[4 + 2 * k], params[5 + 2 * k]);
    }
    t
}

fn parameters_of(t: &ComplexMatrix) -> [f64; PARAMETER_COUNT] {
    let mut p = [0.0; PARAMETER_COUNT];
    for i in 0..4 {
        p[i] = t[(i, i)].re;
    }
    for (k, &(col, row)) in OFF_DIAGONAL.iter().enumerate() {
        p[4 + 2 * k] = t[(row, col)].re;
        p[5 + 2 * k] = t[(row, col)].im;
    }
    p
}

/// `T^H T / tr(T^H T)`; `None` when `T` vanishes.
fn density_matrix(params: &[f64]) -> Option<ComplexMatrix> {
    let t = lower_triangular(params);
    let m = t.adjoint() * t;
    let tr = m.trace().re;
    (tr > 1e-300 && tr.is_finite()).then(|| m.unscale(tr))
}

/// Parameters `T` (lower-triangular) with `T^H T = rho`, via Cholesky of the
/// index-reversed matrix.
fn parameters_for(rho: &ComplexMatrix) -> [f64; PARAMETER_COUNT] {
    // Mix in a little identity so Cholesky succeeds at the PSD boundary.
    let m = rho.scale(1.0 - 1e-6) + ComplexMatrix::identity(4, 4).scale(1e-6 / 4.0);
    let rev = ComplexMatrix::from_fn(4, 4, |i, j| m[(3 - i, 3 - j)]);
    let l = rev
        .cholesky()
        .map(|ch| ch.l())
        .unwrap_or_else(|| ComplexMatrix::identity(4, 4).scale(0.5));
    // rev = L L^H  =>  rho = (J L J)(J L J)^H  with J L J upper, so T = (J L J)^H.
    let jlj = ComplexMatrix::from_fn(4, 4, |i, j| l[(3 - i, 3 - j)]);
    parameters_of(&jlj.adjoint())
}

/// Least-squares inversion of the 17 populations plus unit trace, projected
/// onto the density operators by clipping negative eigenvalues.
pub fn linear_inversion(obs: &Observations) -> Result<DensityOperator> {
    let table = formula_table();
    let a = nalgebra::DMatrix::<f64>::from_fn(SETTING_COUNT + 1, PARAMETER_COUNT, |r, col| {
        if r < SETTING_COUNT {
            table[r][col]
        } else if col < 4 {
            1.0
        } else {
            0.0
        }
    });
    let mut b = nalgebra::DVector::<f64>::zeros(SETTING_COUNT + 1);
    for j in 0..SETTING_COUNT {
        b[j] = obs.populations[j];
    }
    b[SETTING_COUNT] = 1.0;
    let x = a
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|e| Error::InvalidArgument(format!("linear inversion failed: {e}")))?;
    let mut m = ComplexMatrix::from_element(4, 4, ZERO);
    for i in 0..4 {
        m[(i, i)] = c(x[i], 0.0);
    }
    for (k, &(i, j)) in OFF_DIAGONAL.iter().enumerate() {
        m[(i, j)] = c(x[4 + k], -x[10 + k]);
        m[(j, i)] = c(x[4 + k], x[10 + k]);
    }
    let (vals, vecs) = eig_hermitian(&m)?;
    let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Ok(DensityOperator::maximally_mixed(4));
    }
    let mut out = ComplexMatrix::from_element(4, 4, ZERO);
    for (k, &v) in clipped.iter().enumerate() {
        let col = vecs.column(k);
        out += (col * col.adjoint()).scale(v / total);
    }
    DensityOperator::new((&out + out.adjoint()).scale(0.5))
}

/// Output of the maximum-likelihood fit.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub rho_hat: DensityOperator,
    pub objective_value: f64,
    pub iterations: usize,
    /// Which of the multi-starts produced the optimum.
    pub best_start: usize,
}

impl Reconstruction {
    pub fn to_record(&self) -> ReconstructionRecord {
        ReconstructionRecord::new(&self.rho_hat, self.objective_value)
    }
}

/// JSON form of a reconstructed operator, row-major `(re, im)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionRecord {
    pub dim: usize,
    pub rho: Vec<[f64; 2]>,
    pub objective_value: f64,
}

impl ReconstructionRecord {
    pub fn new(rho: &DensityOperator, objective_value: f64) -> Self {
        let m = rho.matrix();
        let dim = m.nrows();
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push([m[(i, j)].re, m[(i, j)].im]);
            }
        }
        Self {
            dim,
            rho: entries,
            objective_value,
        }
    }

    pub fn density_operator(&self) -> Result<DensityOperator> {
        if self.rho.len() != self.dim * self.dim {
            return Err(Error::Parse(format!(
                "expected {} matrix entries, got {}",
                self.dim * self.dim,
                self.rho.len()
            )));
        }
        DensityOperator::new(ComplexMatrix::from_fn(self.dim, self.dim, |i, j| {
            let [re, im] = self.rho[i * self.dim + j];
            c(re, im)
        }))
    }
}

fn fit_options() -> NelderMeadOptions {
    NelderMeadOptions {
        f_tol: 1e-12,
        x_tol: 1e-7,
        max_iterations: ITERATION_CAP,
        adaptive: true,
    }
}

/// Maximum-likelihood fit of the populations over `T^H T / tr`.
pub fn reconstruct_observations(obs: &Observations) -> Result<Reconstruction> {
    let table = formula_table();
    // The penalty fixes the scale of T, which the normalised state ignores.
    let objective = |p: &[f64]| match density_matrix(p) {
        Some(m) => {
            let norm: f64 = p.iter().map(|v| v * v).sum();
            objective_with(&table, obs, &m) + (norm - 1.0).powi(2)
        }
        None => f64::INFINITY,
    };

    let mixed = parameters_for(&ComplexMatrix::identity(4, 4).scale(0.25));
    let linear = parameters_for(linear_inversion(obs)?.matrix());
    let mut rng = ChaCha8Rng::seed_from_u64(PERTURBATION_SEED);
    let mut starts = vec![mixed, linear];
    for _ in 0..START_COUNT - 2 {
        let mut p = linear;
        for v in p.iter_mut() {
            *v += rng.random_range(-0.1..0.1);
        }
        starts.push(p);
    }

    let opts = fit_options();
    let polish = QuasiNewtonOptions {
        grad_tol: GRADIENT_TOL,
        ..QuasiNewtonOptions::default()
    };
    let mut best: Option<(usize, Minimum)> = None;
    let mut iterations = 0;
    for (index, x0) in starts.iter().enumerate() {
        // Alternate a simplex search with a gradient polish until stationary.
        let mut step = vec![0.05; PARAMETER_COUNT];
        let mut run = Minimum {
            x: x0.to_vec(),
            value: objective(x0),
            iterations: 0,
            converged: false,
        };
        let mut used = 0;
        while used < ITERATION_CAP {
            let segment = NelderMeadOptions {
                max_iterations: SEGMENT.min(ITERATION_CAP - used),
                ..opts
            };
            let coarse = nelder_mead(objective, &run.x, &step, &segment);
            let fine = quasi_newton(objective, &coarse.x, &polish);
            used += coarse.iterations + fine.iterations;
            let converged = fine.converged;
            run = if fine.value <= coarse.value { fine } else { coarse };
            if converged {
                run.converged = true;
                break;
            }
            step = run.x.iter().map(|v| 1e-3 * v.abs().max(1e-2)).collect();
        }
        iterations += used;
        if best.as_ref().is_none_or(|(_, b)| run.value < b.value) {
            best = Some((index, run));
        }
    }
    let (best_start, min) = best.expect("at least one start");
    if !min.converged {
        return Err(Error::NoConvergence {
            iterations,
            best_objective: min.value,
            best_point: min.x,
        });
    }
    let m = density_matrix(&min.x).ok_or(Error::NonFinite)?;
    let rho_hat = DensityOperator::new((&m + m.adjoint()).scale(0.5))?;
    Ok(Reconstruction {
        objective_value: objective_with(&table, obs, rho_hat.matrix()),
        rho_hat,
        iterations,
        best_start,
    })
}

pub fn reconstruct_mle(dataset: &TomographyDataset) -> Result<Reconstruction> {
    dataset.validate()?;
    reconstruct_observations(&Observations::from_dataset(dataset))
}
