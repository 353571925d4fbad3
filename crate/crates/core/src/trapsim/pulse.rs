use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::ComplexMatrix;

use super::ops::{microwave, red_sideband};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PulseKind {
    /// Resonant drive `|0> <-> |n>`, `n` in {1, 2, 3}.
    Microwave(u8),
    /// Red sideband `|0, m+1> <-> |2, m>`.
    RedSideband,
}

/// One ideal pulse: rotation angle `chi`, phase `phi` in `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    kind: PulseKind,
    chi: f64,
    phi: f64,
}

pub fn reduce_phase(phi: f64) -> f64 {
    let r = phi.rem_euclid(2.0 * PI);
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

impl Pulse {
    pub fn new(kind: PulseKind, chi: f64, phi: f64) -> Result<Self> {
        if let PulseKind::Microwave(n) = kind {
            if !(1..=3).contains(&n) {
                return Err(Error::InvalidArgument(format!(
                    "microwave level must be 1, 2 or 3 (got {n})"
                )));
            }
        }
        if !chi.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidArgument("pulse angles must be finite".into()));
        }
        Ok(Self {
            kind,
            chi,
            phi: reduce_phase(phi),
        })
    }

    pub fn microwave(level: u8, chi: f64, phi: f64) -> Result<Self> {
        Self::new(PulseKind::Microwave(level), chi, phi)
    }

    pub fn red_sideband(chi: f64, phi: f64) -> Self {
        Self::new(PulseKind::RedSideband, chi, phi).expect("finite sideband angles")
    }

    pub fn kind(&self) -> PulseKind {
        self.kind
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Full-space unitary, served from the shared cache.
    pub fn unitary(&self, cutoff: usize) -> Result<Arc<ComplexMatrix>> {
        global_cache().get_or_build(self, cutoff)
    }
}

impl fmt::Display for Pulse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PulseKind::Microwave(n) => write!(f, "R{}({},{})", n, self.chi, self.phi),
            PulseKind::RedSideband => write!(f, "RSB({},{})", self.chi, self.phi),
        }
    }
}

impl FromStr for Pulse {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("malformed pulse `{s}`"));
        let open = s.find('(').ok_or_else(bad)?;
        if !s.ends_with(')') {
            return Err(bad());
        }
        let name = &s[..open];
        let args: Vec<&str> = s[open + 1..s.len() - 1].split(',').collect();
        if args.len() != 2 {
            return Err(bad());
        }
        let chi: f64 = args[0].trim().parse().map_err(|_| bad())?;
        let phi: f64 = args[1].trim().parse().map_err(|_| bad())?;
        let kind = match name {
            "RSB" => PulseKind::RedSideband,
            "R1" => PulseKind::Microwave(1),
            "R2" => PulseKind::Microwave(2),
            "R3" => PulseKind::Microwave(3),
            _ => return Err(bad()),
        };
        Pulse::new(kind, chi, phi)
    }
}

/// An ordered list of pulses; the first listed pulse acts first.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PulseSequence {
    label: String,
    pulses: Vec<Pulse>,
}

impl PulseSequence {
    pub fn new(label: impl Into<String>, pulses: Vec<Pulse>) -> Self {
        Self {
            label: label.into(),
            pulses,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    pub fn push(&mut self, pulse: Pulse) {
        self.pulses.push(pulse);
    }

    /// Product `U_k ... U_1` on the full ion space.
    pub fn unitary(&self, cutoff: usize) -> Result<ComplexMatrix> {
        let dim = super::ion::ion_dim(cutoff);
        let mut acc = ComplexMatrix::identity(dim, dim);
        for p in &self.pulses {
            acc = p.unitary(cutoff)?.as_ref() * acc;
        }
        Ok(acc)
    }
}

impl fmt::Display for PulseSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# {}", self.label)?;
        for p in &self.pulses {
            writeln!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for PulseSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut label = String::new();
        let mut pulses = Vec::new();
        for line in s.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if label.is_empty() {
                    label = rest.trim().to_string();
                }
                continue;
            }
            pulses.push(line.parse()?);
        }
        Ok(Self { label, pulses })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct CacheKey {
    kind: PulseKind,
    chi: u64,
    phi: u64,
    cutoff: usize,
}

/// Compiled pulse unitaries keyed by `(kind, chi, phi, cutoff)`.
///
/// Readers share the lock; a miss builds outside the lock and the first
/// writer to insert wins.
#[derive(Debug, Default)]
pub struct UnitaryCache {
    entries: RwLock<HashMap<CacheKey, Arc<ComplexMatrix>>>,
}

impl UnitaryCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.read().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get_or_build(&self, pulse: &Pulse, cutoff: usize) -> Result<Arc<ComplexMatrix>> {
        let key = CacheKey {
            kind: pulse.kind,
            chi: pulse.chi.to_bits(),
            phi: pulse.phi.to_bits(),
            cutoff,
        };
        if let Some(u) = self.entries.read().ok().and_then(|m| m.get(&key).cloned()) {
            return Ok(u);
        }
        let built = Arc::new(match pulse.kind {
            PulseKind::Microwave(n) => microwave(n, pulse.chi, pulse.phi, cutoff)?,
            PulseKind::RedSideband => red_sideband(pulse.chi, pulse.phi, cutoff)?,
        });
        let mut guard = self
            .entries
            .write()
            .unwrap_or_else(|poisoned| poisoned.into_inner());
        Ok(guard.entry(key).or_insert(built).clone())
    }
}

pub fn global_cache() -> &'static UnitaryCache {
    static CACHE: OnceLock<UnitaryCache> = OnceLock::new();
    CACHE.get_or_init(UnitaryCache::new)
}
