use serde::{Deserialize, Serialize};
use unotsim::spinstates::{ensemble_state, EnsembleKind, SpinPairEnsemble};
use unotsim::tomography::{
    derive_seed, monte_carlo_errors, pair_populations, reconstruct_mle, simulate_dataset, Interval,
    MonteCarloErrors, ReconstructionRecord, SimulationConfig, StateQuantities, TomographyDataset,
};
use unotsim::trapsim::compile_encoded_unot;

use crate::config::RunConfig;
use crate::error::{at, CliResult, Stage};
use crate::report::Report;
use crate::theory::{compute_theory, discrepancy_flags};

/// Seed tag of the after-flip dataset. Bootstrap replicas use tags from 1.
const AFTER_TAG: u64 = 0;

/// Point estimate with its 95% bootstrap interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub half_width: f64,
}

impl Estimate {
    pub fn new(value: f64, interval: Interval) -> Self {
        Self {
            value,
            lower: interval.lower,
            upper: interval.upper,
            half_width: interval.half_width,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Reconstructed state compared against its ideal counterpart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateEstimate {
    /// Ideal state the reconstruction is compared with.
    pub target: EnsembleKind,
    pub unot_applied: bool,
    pub dataset_seed: u64,
    pub objective_value: f64,
    pub failed_replicas: usize,
    pub fidelity: Estimate,
    pub mutual_information: Estimate,
    pub classical: Estimate,
    pub discord: Estimate,
}

/// After-minus-before changes, with intervals from paired replicas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangeBlock {
    pub mutual_information: Estimate,
    pub classical: Estimate,
    pub discord: Estimate,
    /// Before and after J half-widths added in quadrature.
    pub classical_combined_half_width: f64,
    pub classical_preserved: bool,
    pub theory_discord_change: f64,
    pub discord_change_covers_theory: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentBlock {
    pub config: RunConfig,
    pub total_trials: u64,
    pub before: StateEstimate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub after: Option<StateEstimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub change: Option<ChangeBlock>,
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: Report,
    pub datasets: Vec<TomographyDataset>,
    pub reconstructions: Vec<ReconstructionRecord>,
}

struct Measured {
    dataset: TomographyDataset,
    record: ReconstructionRecord,
    estimate: StateEstimate,
    errors: MonteCarloErrors,
}

fn measure(
    ensemble: &SpinPairEnsemble,
    sim: &SimulationConfig,
    target: EnsembleKind,
    resamples: usize,
) -> CliResult<Measured> {
    let dataset = at(Stage::Simulate, simulate_dataset(ensemble, sim))?;
    let rec = at(Stage::Reconstruct, reconstruct_mle(&dataset))?;
    let ideal = ensemble_state(target);
    let point = at(Stage::Correlations, StateQuantities::of(&rec.rho_hat, &ideal))?;
    let errors = at(Stage::Bootstrap, monte_carlo_errors(&dataset, resamples, &ideal))?;
    log::info!(
        "{} (unot {}): fidelity {:.4}, {} failed replicas",
        target,
        sim.apply_unot,
        point.fidelity,
        errors.failures
    );
    let estimate = StateEstimate {
        target,
        unot_applied: sim.apply_unot,
        dataset_seed: sim.seed,
        objective_value: rec.objective_value,
        failed_replicas: errors.failures,
        fidelity: Estimate::new(point.fidelity, errors.fidelity),
        mutual_information: Estimate::new(point.mutual_information, errors.mutual_information),
        classical: Estimate::new(point.classical, errors.classical),
        discord: Estimate::new(point.discord, errors.discord),
    };
    Ok(Measured {
        record: rec.to_record(),
        dataset,
        estimate,
        errors,
    })
}

fn paired(
    before: &MonteCarloErrors,
    after: &MonteCarloErrors,
    value: f64,
    f: fn(&StateQuantities) -> f64,
) -> Estimate {
    let diffs: Vec<f64> = before
        .replicas
        .iter()
        .zip(&after.replicas)
        .filter_map(|(b, a)| Some(f(a.as_ref()?) - f(b.as_ref()?)))
        .collect();
    Estimate::new(value, Interval::from_samples(&diffs))
}

fn change_block(before: &Measured, after: &Measured, theory_discord_change: f64) -> ChangeBlock {
    let (b, a) = (&before.estimate, &after.estimate);
    let classical = paired(
        &before.errors,
        &after.errors,
        a.classical.value - b.classical.value,
        |q| q.classical,
    );
    let discord = paired(
        &before.errors,
        &after.errors,
        a.discord.value - b.discord.value,
        |q| q.discord,
    );
    let combined = b.classical.half_width.hypot(a.classical.half_width);
    ChangeBlock {
        mutual_information: paired(
            &before.errors,
            &after.errors,
            a.mutual_information.value - b.mutual_information.value,
            |q| q.mutual_information,
        ),
        classical_preserved: classical.value.abs() <= combined,
        classical,
        classical_combined_half_width: combined,
        theory_discord_change,
        discord_change_covers_theory: discord.contains(theory_discord_change),
        discord,
    }
}

/// Prepare, optionally flip, sample, reconstruct and bootstrap one ensemble.
pub fn run_pipeline(config: &RunConfig) -> CliResult<RunOutput> {
    config.validate()?;
    let theory = compute_theory()?;
    let ensemble = SpinPairEnsemble::six_direction(config.state);
    let base = SimulationConfig {
        shots: config.shots,
        seed: config.seed,
        fock_cutoff: config.fock_cutoff,
        apply_unot: false,
    };
    at(Stage::Prepare, pair_populations(&ensemble, &base))?;
    let before = measure(&ensemble, &base, config.state, config.resamples)?;

    let after = if config.apply_unot {
        at(Stage::Compile, compile_encoded_unot())?;
        let sim = SimulationConfig {
            seed: derive_seed(config.seed, AFTER_TAG),
            apply_unot: true,
            ..base
        };
        Some(measure(&ensemble, &sim, config.state.flipped(), config.resamples)?)
    } else {
        None
    };

    let change = after.as_ref().map(|a| {
        let expected = theory.state(a.estimate.target).discord - theory.state(config.state).discord;
        change_block(&before, a, expected)
    });
    let mut datasets = vec![before.dataset.clone()];
    let mut reconstructions = vec![before.record.clone()];
    if let Some(a) = &after {
        datasets.push(a.dataset.clone());
        reconstructions.push(a.record.clone());
    }
    let experiment = ExperimentBlock {
        config: config.clone(),
        total_trials: datasets.iter().map(|d| d.total_trials()).sum(),
        before: before.estimate,
        after: after.map(|a| a.estimate),
        change,
    };
    Ok(RunOutput {
        report: Report::new(theory, Some(experiment), discrepancy_flags(&theory)),
        datasets,
        reconstructions,
    })
}
