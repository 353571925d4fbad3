//! Population tomography of the logical spin pair: the 17 measured
//! populations, binomial shot noise, maximum-likelihood reconstruction and
//! bootstrap confidence intervals.

mod bootstrap;
mod dataset;
mod mle;
mod settings;

pub use bootstrap::{
    monte_carlo_errors, quantile, resample_dataset, Interval, MonteCarloErrors, StateQuantities,
    DEFAULT_RESAMPLES, MAX_FAILURE_FRACTION, MIN_RESAMPLES,
};
pub use dataset::{
    cell_rng, derive_seed, pair_populations, sample_binomial, simulate_dataset, SimulationConfig,
    TomographyDataset, DATASET_VERSION, PAIR_COUNT,
};
pub use mle::{
    linear_inversion, reconstruct_mle, reconstruct_observations, Observations, Reconstruction,
    ReconstructionRecord, GRADIENT_TOL, ITERATION_CAP, PARAMETER_COUNT, START_COUNT, Z_95,
};
pub use settings::{
    bell_populations, ideal_population, ideal_populations, measurement_settings, MeasurementSetting,
    PopulationFormula, OFF_DIAGONAL, SETTING_COUNT,
};
