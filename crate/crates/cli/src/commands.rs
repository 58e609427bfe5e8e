use std::fs;
use std::path::{Path, PathBuf};

use affectwear_core::features::{all_feature_names, extract_session_features, FeatureGroup};
use affectwear_core::mlbench::{
    assemble_matrix, loocv_grid_search, markdown_table, EvalReport, MlError, ModelKind,
};
use affectwear_core::session::{
    load_manifest, load_session, validate_session, write_channel_csv, write_manifest, ManifestEntry, SessionError,
    ValidationReport,
};
use affectwear_core::synth::{generate_cohort_sessions, SynthError, MANIFEST_FILE};
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{features_csv, parse_features_csv, write_atomic, write_json};

pub const FEATURES_FILE: &str = "features.csv";
pub const VALIDATION_FILE: &str = "validation.json";
pub const BENCH_DIR: &str = "bench";
pub const REPORT_FILE: &str = "report.md";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub n_ok: usize,
    pub n_excluded: usize,
    pub subjects: Vec<ValidationReport>,
}

impl ValidationSummary {
    fn new(subjects: Vec<ValidationReport>) -> Self {
        let n_ok = subjects.iter().filter(|r| r.is_ok()).count();
        Self {
            n_ok,
            n_excluded: subjects.len() - n_ok,
            subjects,
        }
    }
}

/// Writes the cohort under `paths.data_root` and returns the manifest path.
pub fn cmd_synth(config: &RunConfig) -> CliResult<PathBuf> {
    let members = generate_cohort_sessions(&config.cohort_spec()).map_err(|e| match e {
        SynthError::Io { path, source } => CliError::Io { path, source },
        other => CliError::Config(other.to_string()),
    })?;
    let root = &config.paths.data_root;
    members.par_iter().try_for_each(|m| {
        let dir = root.join(&m.session.subject_id);
        m.session
            .channels()
            .try_for_each(|ch| write_atomic(&dir.join(ch.kind.file_name()), write_channel_csv(ch).as_bytes()))
    })?;
    let entries: Vec<ManifestEntry> = members
        .iter()
        .map(|m| ManifestEntry {
            subject_id: m.session.subject_id.clone(),
            label: m.session.label,
        })
        .collect();
    let manifest = root.join(MANIFEST_FILE);
    write_atomic(&manifest, write_manifest(&entries).as_bytes())?;
    Ok(manifest)
}

fn read_manifest(config: &RunConfig) -> CliResult<Vec<ManifestEntry>> {
    let path = config.paths.manifest_path();
    load_manifest(&path).map_err(|e| match e {
        SessionError::Io { path, source } => CliError::Io { path, source },
        other => CliError::Config(format!("{}: {other}", path.display())),
    })
}

/// Session loading and validation outcome for one manifest entry.
enum Checked {
    Ok(Box<affectwear_core::session::Session>),
    Excluded,
}

fn check_subject(config: &RunConfig, entry: &ManifestEntry) -> (Checked, ValidationReport) {
    let root = &config.paths.data_root;
    let dir = root.join(&entry.subject_id);
    match load_session(&dir, &entry.subject_id, entry.label) {
        Ok(session) => {
            let report = validate_session(&session, &config.validation);
            if report.is_ok() {
                (Checked::Ok(Box::new(session)), report)
            } else {
                (Checked::Excluded, report)
            }
        }
        Err(e) => {
            // keep reports free of machine-specific paths
            let reason = e.to_string().replace(&root.display().to_string(), "<data_root>");
            (Checked::Excluded, ValidationReport::from_reasons(&entry.subject_id, vec![reason]))
        }
    }
}

fn check_all(config: &RunConfig) -> CliResult<Vec<(Checked, ValidationReport)>> {
    let entries = read_manifest(config)?;
    if !config.paths.data_root.is_dir() {
        return Err(CliError::Io {
            path: config.paths.data_root.clone(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "data root is not a directory"),
        });
    }
    Ok(entries.par_iter().map(|e| check_subject(config, e)).collect())
}

fn log_exclusions(summary: &ValidationSummary) {
    for r in summary.subjects.iter().filter(|r| !r.is_ok()) {
        warn!("{} excluded: {}", r.subject_id, r.reasons.join("; "));
    }
}

pub fn cmd_validate(config: &RunConfig) -> CliResult<ValidationSummary> {
    let checked = check_all(config)?;
    let summary = ValidationSummary::new(checked.into_iter().map(|(_, r)| r).collect());
    log_exclusions(&summary);
    write_json(&config.paths.out.join(VALIDATION_FILE), &summary)?;
    if summary.n_ok == 0 {
        return Err(CliError::Empty("every session was excluded".into()));
    }
    Ok(summary)
}

/// Extracts features for every valid session into `features.csv`.
pub fn cmd_extract(config: &RunConfig) -> CliResult<ValidationSummary> {
    let checked = check_all(config)?;
    let params = config.feature_params();
    let rows: Vec<_> = checked
        .par_iter()
        .filter_map(|(c, _)| match c {
            Checked::Ok(s) => Some((
                s.subject_id.clone(),
                s.label,
                extract_session_features(s, &params).values,
            )),
            Checked::Excluded => None,
        })
        .collect();
    let summary = ValidationSummary::new(checked.into_iter().map(|(_, r)| r).collect());
    log_exclusions(&summary);
    let out = &config.paths.out;
    write_json(&out.join(VALIDATION_FILE), &summary)?;
    if rows.is_empty() {
        return Err(CliError::Empty("every session was excluded".into()));
    }
    write_atomic(&out.join(FEATURES_FILE), features_csv(&all_feature_names(), &rows).as_bytes())?;
    info!("extracted {} sessions, excluded {}", summary.n_ok, summary.n_excluded);
    Ok(summary)
}

pub fn report_path(out: &Path, group: FeatureGroup, kind: ModelKind) -> PathBuf {
    out.join(BENCH_DIR).join(group.as_str()).join(format!("{}.json", kind.as_str()))
}

pub fn table_path(out: &Path, group: FeatureGroup) -> PathBuf {
    out.join(BENCH_DIR).join(format!("{}.md", group.as_str()))
}

pub fn table_title(group: FeatureGroup) -> String {
    let name = match group {
        FeatureGroup::HrvTime => "Time-domain HRV",
        FeatureGroup::HrvFreq => "Frequency-domain HRV",
        FeatureGroup::Eda => "EDA",
        FeatureGroup::Acc => "ACC",
        FeatureGroup::Temp => "TEMP",
        FeatureGroup::All => "All",
    };
    format!("{name} features")
}

/// LOOCV grid search of every configured model on every configured
/// selector. Returns the reports grouped by selector.
pub fn cmd_bench(config: &RunConfig) -> CliResult<Vec<(FeatureGroup, Vec<EvalReport>)>> {
    let out = &config.paths.out;
    let path = out.join(FEATURES_FILE);
    let text = fs::read_to_string(&path).map_err(CliError::io(&path))?;
    let subjects = parse_features_csv(&text)?;
    let bench = &config.bench;
    let mut results = Vec::new();
    for &group in &bench.features {
        let matrix = assemble_matrix(&subjects, group, bench.positive_class).map_err(|e| match e {
            MlError::ClassUnderpopulated { .. } => CliError::Empty(e.to_string()),
            other => CliError::Config(other.to_string()),
        })?;
        let reports: Vec<EvalReport> = bench
            .models
            .par_iter()
            .map(|&kind| {
                loocv_grid_search(&matrix, kind, &bench.grid.specs(kind), bench.seed).map_err(|e| match e {
                    MlError::EmptyGrid | MlError::UnknownModel(_) => CliError::Config(format!("{kind}: {e}")),
                    other => CliError::Empty(format!("{group}/{kind}: {other}")),
                })
            })
            .collect::<CliResult<_>>()?;
        for r in &reports {
            write_json(&report_path(out, group, r.model_kind), r)?;
        }
        write_atomic(&table_path(out, group), markdown_table(&table_title(group), &reports).as_bytes())?;
        results.push((group, reports));
    }
    Ok(results)
}

/// Rebuilds the tables from stored reports into `report.md`.
pub fn cmd_report(config: &RunConfig) -> CliResult<String> {
    let out = &config.paths.out;
    let mut doc = String::new();
    for &group in &config.bench.features {
        let mut reports = Vec::new();
        for &kind in &config.bench.models {
            let path = report_path(out, group, kind);
            if !path.is_file() {
                continue;
            }
            let text = fs::read_to_string(&path).map_err(CliError::io(&path))?;
            let r: EvalReport = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            reports.push(r);
        }
        if reports.is_empty() {
            continue;
        }
        if !doc.is_empty() {
            doc.push('\n');
        }
        doc.push_str(&markdown_table(&table_title(group), &reports));
    }
    if doc.is_empty() {
        return Err(CliError::Empty(format!("no bench reports under {}", out.join(BENCH_DIR).display())));
    }
    write_atomic(&out.join(REPORT_FILE), doc.as_bytes())?;
    Ok(doc)
}
