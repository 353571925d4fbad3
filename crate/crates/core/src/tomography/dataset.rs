use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spinstates::{EnsembleKind, SpinPairEnsemble};
use crate::trapsim::{compile_encoded_unot, prepare_pair, IonState, DEFAULT_FOCK_CUTOFF};

use super::settings::{measurement_settings, SETTING_COUNT};

pub const DATASET_VERSION: u32 = 1;
pub const PAIR_COUNT: usize = 6;

/// Binomial counts for each (pair, setting) cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TomographyDataset {
    pub version: u32,
    pub ensemble_label: EnsembleKind,
    pub seed: u64,
    pub shots: u64,
    /// `counts[pair][setting]`.
    pub counts: Vec<Vec<u64>>,
    /// Whether the encoded flip was applied before readout.
    #[serde(default)]
    pub unot_applied: bool,
}

impl TomographyDataset {
    pub fn validate(&self) -> Result<()> {
        if self.version != DATASET_VERSION {
            return Err(Error::Parse(format!(
                "unsupported dataset version {} (expected {DATASET_VERSION})",
                self.version
            )));
        }
        if self.shots == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        if self.counts.len() != PAIR_COUNT || self.counts.iter().any(|r| r.len() != SETTING_COUNT) {
            return Err(Error::Parse(format!(
                "counts must be {PAIR_COUNT} rows of {SETTING_COUNT} entries"
            )));
        }
        if let Some(k) = self.counts.iter().flatten().find(|&&k| k > self.shots) {
            return Err(Error::Parse(format!("count {k} exceeds shots {}", self.shots)));
        }
        Ok(())
    }

    pub fn total_trials(&self) -> u64 {
        (PAIR_COUNT * SETTING_COUNT) as u64 * self.shots
    }

    /// `P_j^E`: mean over pairs of `k / n`.
    pub fn populations(&self) -> [f64; SETTING_COUNT] {
        let mut p = [0.0; SETTING_COUNT];
        for row in &self.counts {
            for (pj, &k) in p.iter_mut().zip(row) {
                *pj += k as f64 / self.shots as f64;
            }
        }
        p.map(|v| v / PAIR_COUNT as f64)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ds: Self = serde_json::from_str(text)?;
        ds.validate()?;
        Ok(ds)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub shots: u64,
    pub seed: u64,
    pub fock_cutoff: usize,
    pub apply_unot: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            shots: 1000,
            seed: 0,
            fock_cutoff: DEFAULT_FOCK_CUTOFF,
            apply_unot: false,
        }
    }
}

/// Mix a seed with a tag (splitmix64 finalizer) for independent substreams.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for one (pair, setting) cell.
pub fn cell_rng(seed: u64, pair: usize, setting: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((pair * SETTING_COUNT + setting) as u64);
    rng
}

pub fn sample_binomial(rng: &mut ChaCha8Rng, n: u64, p: f64) -> Result<u64> {
    let p = p.clamp(0.0, 1.0);
    let dist = Binomial::new(n, p)
        .map_err(|e| Error::InvalidArgument(format!("binomial({n}, {p}): {e}")))?;
    Ok(dist.sample(rng))
}

fn ensemble_kind(ensemble: &SpinPairEnsemble) -> Result<EnsembleKind> {
    for kind in [EnsembleKind::Aligned, EnsembleKind::Antialigned] {
        let reference = SpinPairEnsemble::six_direction(kind);
        let matches = ensemble.members().iter().all(|m| {
            reference.members().iter().any(|r| {
                r.dir_a.vector() == m.dir_a.vector() && r.dir_b.vector() == m.dir_b.vector()
            })
        });
        if matches {
            return Ok(kind);
        }
    }
    Err(Error::InvalidArgument(
        "ensemble is not one of the six-direction aligned/antialigned ensembles".into(),
    ))
}

/// Exact encoded populations `<psi_bar_j| v_pair>|^2` per pair and setting.
pub fn pair_populations(ensemble: &SpinPairEnsemble, config: &SimulationConfig) -> Result<Vec<[f64; SETTING_COUNT]>> {
    if ensemble.len() != PAIR_COUNT {
        return Err(Error::InvalidArgument(format!(
            "ensemble must have {PAIR_COUNT} members (got {})",
            ensemble.len()
        )));
    }
    let w0 = ensemble.members()[0].weight;
    if ensemble.members().iter().any(|m| (m.weight - w0).abs() > 1e-12) {
        return Err(Error::InvalidArgument("ensemble members must have equal weight".into()));
    }
    let settings = measurement_settings();
    let flip = if config.apply_unot {
        Some(compile_encoded_unot()?)
    } else {
        None
    };
    ensemble
        .members()
        .iter()
        .map(|m| {
            let mut state: IonState = prepare_pair(&m.dir_a, &m.dir_b, config.fock_cutoff)?;
            if let Some(seq) = &flip {
                state = state.apply_sequence(seq)?;
                state.check_truncation()?;
            }
            let mut p = [0.0; SETTING_COUNT];
            for (pj, s) in p.iter_mut().zip(&settings) {
                *pj = state.population(&s.target_encoded)?;
            }
            Ok(p)
        })
        .collect()
}

/// Prepare each pair on the simulated ion, optionally flip, and sample
/// `Binomial(shots, p)` per cell.
pub fn simulate_dataset(ensemble: &SpinPairEnsemble, config: &SimulationConfig) -> Result<TomographyDataset> {
    if config.shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let kind = ensemble_kind(ensemble)?;
    let probs = pair_populations(ensemble, config)?;
    let mut counts = Vec::with_capacity(PAIR_COUNT);
    for (pair, row) in probs.iter().enumerate() {
        let mut out = Vec::with_capacity(SETTING_COUNT);
        for (setting, &p) in row.iter().enumerate() {
            let mut rng = cell_rng(config.seed, pair, setting);
            out.push(sample_binomial(&mut rng, config.shots, p)?);
        }
        counts.push(out);
    }
    Ok(TomographyDataset {
        version: DATASET_VERSION,
        ensemble_label: kind,
        seed: config.seed,
        shots: config.shots,
        counts,
        unot_applied: config.apply_unot,
    })
}
