use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use unotsim::spinstates::EnsembleKind;

use crate::error::{CliError, CliResult};
use crate::run::{Estimate, ExperimentBlock, RunOutput, StateEstimate};
use crate::theory::TheoryBlock;

pub const REPORT_VERSION: u32 = 1;
pub const SUMMARY_VERSION: u32 = 1;
/// Cell text for quantities an input does not provide.
pub const ABSENT: &str = "absent";

pub const REPORT_FILE: &str = "report.json";
pub const THEORY_CSV: &str = "theory.csv";
pub const FIGURE4_CSV: &str = "figure4.csv";
pub const FIGURE3_CSV: &str = "figure3.csv";
pub const RUNS_CSV: &str = "runs.csv";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: u32,
    pub theory: TheoryBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentBlock>,
    pub discrepancy_flags: Vec<String>,
}

impl Report {
    pub fn new(theory: TheoryBlock, experiment: Option<ExperimentBlock>, flags: Vec<String>) -> Self {
        Self {
            version: REPORT_VERSION,
            theory,
            experiment,
            discrepancy_flags: flags,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Parse and check the schema version, naming the offending field on failure.
    pub fn from_json(path: &Path, text: &str) -> CliResult<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let report: Report = serde_path_to_error::deserialize(de).map_err(|e| CliError::Input {
            path: path.to_path_buf(),
            message: format!("field `{}`: {}", e.path(), e.inner()),
        })?;
        if report.version != REPORT_VERSION {
            return Err(CliError::Input {
                path: path.to_path_buf(),
                message: format!(
                    "field `version`: unsupported report version {} (expected {REPORT_VERSION})",
                    report.version
                ),
            });
        }
        Ok(report)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Input {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::from_json(path, &text)
    }
}

fn output_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Output {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn write_file(dir: &Path, name: &str, contents: &[u8]) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| output_error(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| output_error(&path, e))?;
    Ok(path)
}

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn num(x: f64) -> String {
    x.to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| ABSENT.to_string(), num)
}

/// `quantity,aligned,antialigned,difference`.
pub fn theory_csv(theory: &TheoryBlock) -> Vec<u8> {
    let (a, d) = (&theory.aligned, &theory.antialigned);
    let rows = vec![
        vec!["I".into(), num(a.mutual_information), num(d.mutual_information), num(theory.delta_mutual_information)],
        vec!["J".into(), num(a.classical), num(d.classical), num(a.classical - d.classical)],
        vec!["delta".into(), num(a.discord), num(d.discord), num(theory.delta_discord)],
        vec!["chi".into(), num(a.holevo), num(d.holevo), num(-theory.delta_holevo)],
    ];
    csv_bytes(&["quantity", "aligned", "antialigned", "difference"], &rows)
}

/// `report.json`, `theory.csv`, and for runs the datasets and reconstructions.
pub fn write_report_outputs(dir: &Path, report: &Report) -> CliResult<()> {
    write_file(dir, REPORT_FILE, report.to_json().as_bytes())?;
    write_file(dir, THEORY_CSV, &theory_csv(&report.theory))?;
    Ok(())
}

pub fn write_run_outputs(dir: &Path, out: &RunOutput) -> CliResult<()> {
    write_report_outputs(dir, &out.report)?;
    let names = ["before", "after"];
    for (ds, name) in out.datasets.iter().zip(names) {
        let text = ds.to_json().map_err(|e| output_error(dir, e))?;
        write_file(dir, &format!("dataset_{name}.json"), text.as_bytes())?;
    }
    for (rec, name) in out.reconstructions.iter().zip(names) {
        let text = serde_json::to_string_pretty(rec).map_err(|e| output_error(dir, e))?;
        write_file(dir, &format!("reconstruction_{name}.json"), text.as_bytes())?;
    }
    Ok(())
}

/// State estimate of `run` for ideal state `kind`, if the run produced one.
fn estimate_for(run: &ExperimentBlock, kind: EnsembleKind) -> Option<&StateEstimate> {
    std::iter::once(&run.before)
        .chain(run.after.as_ref())
        .find(|s| s.target == kind)
}

type Accessor = fn(&StateEstimate) -> Estimate;

const QUANTITIES: [(&str, Accessor); 3] = [
    ("J", |s| s.classical),
    ("delta", |s| s.discord),
    ("I", |s| s.mutual_information),
];

fn theory_value(theory: &TheoryBlock, quantity: &str, kind: EnsembleKind) -> f64 {
    let s = theory.state(kind);
    match quantity {
        "J" => s.classical,
        "delta" => s.discord,
        _ => s.mutual_information,
    }
}

/// Theory against the experiments started from each ensemble, per quantity and state.
pub fn figure4_csv(theory: &TheoryBlock, runs: &[&ExperimentBlock]) -> Vec<u8> {
    let from = |start: EnsembleKind| runs.iter().copied().find(|r| r.config.state == start);
    let (from_anti, from_aligned) = (from(EnsembleKind::Antialigned), from(EnsembleKind::Aligned));
    let mut rows = Vec::new();
    for (name, get) in QUANTITIES {
        for kind in [EnsembleKind::Antialigned, EnsembleKind::Aligned] {
            let mut row = vec![name.to_string(), kind.to_string(), num(theory_value(theory, name, kind))];
            for run in [from_anti, from_aligned] {
                let e = run.and_then(|r| estimate_for(r, kind)).map(get);
                row.push(opt(e.map(|e| e.value)));
                row.push(opt(e.map(|e| e.half_width)));
            }
            rows.push(row);
        }
    }
    csv_bytes(
        &[
            "quantity",
            "state",
            "theory",
            "from_antialigned",
            "from_antialigned_half_width",
            "from_aligned",
            "from_aligned_half_width",
        ],
        &rows,
    )
}

/// Fidelities of the prepared and final states per run.
pub fn figure3_csv(runs: &[(&str, &ExperimentBlock)]) -> Vec<u8> {
    let rows = runs
        .iter()
        .map(|(input, r)| {
            let after = r.after.as_ref();
            vec![
                input.to_string(),
                r.before.target.to_string(),
                num(r.before.fidelity.value),
                num(r.before.fidelity.half_width),
                after.map_or_else(|| ABSENT.to_string(), |a| a.target.to_string()),
                opt(after.map(|a| a.fidelity.value)),
                opt(after.map(|a| a.fidelity.half_width)),
            ]
        })
        .collect::<Vec<_>>();
    csv_bytes(
        &[
            "input",
            "prepared",
            "fidelity_prepared",
            "fidelity_prepared_half_width",
            "final",
            "fidelity_final",
            "fidelity_final_half_width",
        ],
        &rows,
    )
}

/// One row per run with before/after values, half-widths and changes.
pub fn runs_csv(runs: &[(&str, &ExperimentBlock)]) -> Vec<u8> {
    let mut header: Vec<String> = ["input", "state", "apply_unot", "seed", "shots", "resamples"]
        .map(String::from)
        .to_vec();
    for (name, _) in QUANTITIES {
        for when in ["before", "after"] {
            header.push(format!("{name}_{when}"));
            header.push(format!("{name}_{when}_half_width"));
        }
    }
    header.extend(
        ["J_change", "J_combined_half_width", "delta_change", "delta_change_half_width"].map(String::from),
    );
    let rows = runs
        .iter()
        .map(|(input, r)| {
            let c = &r.config;
            let mut row = vec![
                input.to_string(),
                c.state.to_string(),
                c.apply_unot.to_string(),
                c.seed.to_string(),
                c.shots.to_string(),
                c.resamples.to_string(),
            ];
            for (_, get) in QUANTITIES {
                for s in [Some(&r.before), r.after.as_ref()] {
                    row.push(opt(s.map(|s| get(s).value)));
                    row.push(opt(s.map(|s| get(s).half_width)));
                }
            }
            let ch = r.change.as_ref();
            row.push(opt(ch.map(|c| c.classical.value)));
            row.push(opt(ch.map(|c| c.classical_combined_half_width)));
            row.push(opt(ch.map(|c| c.discord.value)));
            row.push(opt(ch.map(|c| c.discord.half_width)));
            row
        })
        .collect::<Vec<_>>();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_bytes(&header, &rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub input: String,
    pub state: EnsembleKind,
    pub apply_unot: bool,
    pub seed: u64,
    pub fidelity_prepared: f64,
    pub fidelity_final: Option<f64>,
    pub classical_change: Option<f64>,
    pub classical_combined_half_width: Option<f64>,
    pub classical_preserved: Option<bool>,
    pub discord_change: Option<Estimate>,
    pub discord_change_covers_theory: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub version: u32,
    pub inputs: Vec<String>,
    pub theory: TheoryBlock,
    pub runs: Vec<RunSummary>,
    pub discrepancy_flags: Vec<String>,
}

/// Read result files and write the report tables into `dir`.
pub fn build_report(inputs: &[PathBuf], dir: &Path) -> CliResult<Summary> {
    if inputs.is_empty() {
        return Err(CliError::Config("report needs at least one input file".into()));
    }
    let reports = inputs
        .iter()
        .map(|p| Report::read(p))
        .collect::<CliResult<Vec<_>>>()?;
    let labels: Vec<String> = inputs.iter().map(|p| p.display().to_string()).collect();
    let theory = reports[0].theory;
    let runs: Vec<(&str, &ExperimentBlock)> = labels
        .iter()
        .zip(&reports)
        .filter_map(|(l, r)| Some((l.as_str(), r.experiment.as_ref()?)))
        .collect();
    let blocks: Vec<&ExperimentBlock> = runs.iter().map(|(_, r)| *r).collect();

    write_file(dir, FIGURE4_CSV, &figure4_csv(&theory, &blocks))?;
    write_file(dir, FIGURE3_CSV, &figure3_csv(&runs))?;
    write_file(dir, RUNS_CSV, &runs_csv(&runs))?;

    let mut flags: Vec<String> = Vec::new();
    for f in reports.iter().flat_map(|r| &r.discrepancy_flags) {
        if !flags.contains(f) {
            flags.push(f.clone());
        }
    }
    let summary = Summary {
        version: SUMMARY_VERSION,
        inputs: labels.clone(),
        theory,
        runs: runs
            .iter()
            .map(|(input, r)| RunSummary {
                input: input.to_string(),
                state: r.config.state,
                apply_unot: r.config.apply_unot,
                seed: r.config.seed,
                fidelity_prepared: r.before.fidelity.value,
                fidelity_final: r.after.as_ref().map(|a| a.fidelity.value),
                classical_change: r.change.as_ref().map(|c| c.classical.value),
                classical_combined_half_width: r.change.as_ref().map(|c| c.classical_combined_half_width),
                classical_preserved: r.change.as_ref().map(|c| c.classical_preserved),
                discord_change: r.change.as_ref().map(|c| c.discord),
                discord_change_covers_theory: r.change.as_ref().map(|c| c.discord_change_covers_theory),
            })
            .collect(),
        discrepancy_flags: flags,
    };
    let mut text = serde_json::to_string_pretty(&summary).map_err(|e| output_error(dir, e))?;
    text.push('\n');
    write_file(dir, SUMMARY_FILE, text.as_bytes())?;
    Ok(summary)
}
