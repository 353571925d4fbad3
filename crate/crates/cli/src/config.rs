use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use unotsim::spinstates::EnsembleKind;
use unotsim::tomography::{DEFAULT_RESAMPLES, MIN_RESAMPLES};

use crate::error::{CliError, CliResult};

pub const DEFAULT_SHOTS: u64 = 1000;
pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_FOCK_CUTOFF: usize = 8;
pub const MIN_FOCK_CUTOFF: usize = 4;

/// Settings of one simulated experiment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub state: EnsembleKind,
    pub apply_unot: bool,
    pub shots: u64,
    pub seed: u64,
    pub resamples: usize,
    pub fock_cutoff: usize,
    #[serde(skip)]
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(state: EnsembleKind) -> Self {
        Self {
            state,
            apply_unot: false,
            shots: DEFAULT_SHOTS,
            seed: DEFAULT_SEED,
            resamples: DEFAULT_RESAMPLES,
            fock_cutoff: DEFAULT_FOCK_CUTOFF,
            output_path: None,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.shots < 1 {
            return Err(CliError::Config("shots must be at least 1".into()));
        }
        if self.resamples < MIN_RESAMPLES {
            return Err(CliError::Config(format!(
                "resamples must be at least {MIN_RESAMPLES} (got {})",
                self.resamples
            )));
        }
        if self.fock_cutoff < MIN_FOCK_CUTOFF {
            return Err(CliError::Config(format!(
                "fock cutoff must be at least {MIN_FOCK_CUTOFF} (got {})",
                self.fock_cutoff
            )));
        }
        Ok(())
    }
}
