use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlations::discord;
use crate::error::{Error, Result};
use crate::qmath::{fidelity, DensityOperator, Subsystem};

use super::dataset::{cell_rng, derive_seed, sample_binomial, TomographyDataset};
use super::mle::{reconstruct_mle, Reconstruction};

pub const MIN_RESAMPLES: usize = 50;
pub const DEFAULT_RESAMPLES: usize = 200;
/// Fraction of failed replicas above which the estimate is rejected.
pub const MAX_FAILURE_FRACTION: f64 = 0.10;

/// Quantities tracked per reconstructed state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateQuantities {
    pub fidelity: f64,
    pub mutual_information: f64,
    pub classical: f64,
    pub discord: f64,
}

impl StateQuantities {
    /// Correlations of `rho` (A measured) and its fidelity with `target`.
    pub fn of(rho: &DensityOperator, target: &DensityOperator) -> Result<Self> {
        let report = discord(rho, Subsystem::A)?;
        Ok(Self {
            fidelity: fidelity(rho, target)?,
            mutual_information: report.mutual_information,
            classical: report.classical,
            discord: report.discord,
        })
    }
}

/// Central 95% interval of a bootstrap sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
    pub half_width: f64,
}

impl Interval {
    pub fn from_samples(values: &[f64]) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let lower = quantile(&v, 0.025);
        let upper = quantile(&v, 0.975);
        Self {
            lower,
            upper,
            half_width: 0.5 * (upper - lower),
        }
    }
}

/// Linear-interpolated quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let t = pos - lo as f64;
    sorted[lo] * (1.0 - t) + sorted[hi] * t
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloErrors {
    pub resamples: usize,
    pub failures: usize,
    pub fidelity: Interval,
    pub mutual_information: Interval,
    pub classical: Interval,
    pub discord: Interval,
    /// Per-replica values in replica order, `None` for failed replicas.
    pub replicas: Vec<Option<StateQuantities>>,
}

/// Counts redrawn from `Binomial(n, k/n)` per cell.
pub fn resample_dataset(dataset: &TomographyDataset, replica: usize) -> Result<TomographyDataset> {
    let seed = derive_seed(dataset.seed, replica as u64 + 1);
    let counts = dataset
        .counts
        .iter()
        .enumerate()
        .map(|(pair, row)| {
            row.iter()
                .enumerate()
                .map(|(setting, &k)| {
                    let mut rng = cell_rng(seed, pair, setting);
                    sample_binomial(&mut rng, dataset.shots, k as f64 / dataset.shots as f64)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TomographyDataset {
        counts,
        seed,
        ..dataset.clone()
    })
}

/// Parametric bootstrap of fidelity (against `target`), I, J and discord.
pub fn monte_carlo_errors(
    dataset: &TomographyDataset,
    resamples: usize,
    target: &DensityOperator,
) -> Result<MonteCarloErrors> {
    if resamples < MIN_RESAMPLES {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_RESAMPLES} resamples required (got {resamples})"
        )));
    }
    dataset.validate()?;
    let replicas: Vec<Option<StateQuantities>> = (0..resamples)
        .into_par_iter()
        .map(|r| {
            let outcome = resample_dataset(dataset, r)
                .and_then(|ds| reconstruct_mle(&ds))
                .and_then(|rec: Reconstruction| StateQuantities::of(&rec.rho_hat, target));
            match outcome {
                Ok(q) => Some(q),
                Err(e) => {
                    log::warn!(target: "unotsim::tomography", "bootstrap replica {r} failed: {e}");
                    None
                }
            }
        })
        .collect();
    let failures = replicas.iter().filter(|r| r.is_none()).count();
    if failures as f64 > MAX_FAILURE_FRACTION * resamples as f64 {
        return Err(Error::Bootstrap {
            failed: failures,
            total: resamples,
        });
    }
    let ok: Vec<StateQuantities> = replicas.iter().flatten().copied().collect();
    let column = |f: fn(&StateQuantities) -> f64| Interval::from_samples(&ok.iter().map(f).collect::<Vec<_>>());
    Ok(MonteCarloErrors {
        resamples,
        failures,
        fidelity: column(|q| q.fidelity),
        mutual_information: column(|q| q.mutual_information),
        classical: column(|q| q.classical),
        discord: column(|q| q.discord),
        replicas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        let v: Vec<f64> = (0..=100).map(f64::from).collect();
        assert_eq!(quantile(&v, 0.5), 50.0);
        assert!((quantile(&v, 0.025) - 2.5).abs() < 1e-12);
        let iv = Interval::from_samples(&v);
        assert!((iv.half_width - 47.5).abs() < 1e-12);
    }

    #[test]
    fn resample_is_deterministic() {
        let ds = TomographyDataset {
            version: super::super::dataset::DATASET_VERSION,
            ensemble_label: crate::spinstates::EnsembleKind::Aligned,
            seed: 3,
            shots: 100,
            counts: vec![vec![50; 17]; 6],
            unot_applied: false,
        };
        assert_eq!(resample_dataset(&ds, 4).unwrap(), resample_dataset(&ds, 4).unwrap());
        assert_ne!(resample_dataset(&ds, 4).unwrap(), resample_dataset(&ds, 5).unwrap());
        assert!(monte_carlo_errors(&ds, 10, &crate::spinstates::rho_aligned()).is_err());
    }
}
