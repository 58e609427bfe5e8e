//! Empatica-style session ingestion: per-channel CSV files, a label
//! manifest, and the validation rules that decide which sessions are usable.
//!
//! Channel CSV layout: line 1 is the integer UTC start timestamp, line 2 the
//! sample rate in Hz (ACC repeats both three times, comma separated), and
//! every following line is one comma-separated sample vector.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("line {line}: expected {expected} columns, found {found}")]
    WidthMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: non-finite or unparseable sample {value:?}")]
    NonFiniteSample { line: usize, value: String },
    #[error("channel has no samples")]
    EmptyBody,
    #[error("missing channel file {0}")]
    MissingChannelFile(PathBuf),
    #[error("{path}: {source}")]
    Channel {
        path: PathBuf,
        #[source]
        source: Box<SessionError>,
    },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("invalid label {0:?}; expected unipolar or bipolar")]
    InvalidLabel(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ChannelKind {
    Bvp,
    Eda,
    Acc,
    Temp,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 4] = [
        ChannelKind::Bvp,
        ChannelKind::Eda,
        ChannelKind::Acc,
        ChannelKind::Temp,
    ];

    pub fn width(self) -> usize {
        match self {
            ChannelKind::Acc => 3,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Bvp => "BVP",
            ChannelKind::Eda => "EDA",
            ChannelKind::Acc => "ACC",
            ChannelKind::Temp => "TEMP",
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.csv", self.name())
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One uniformly sampled sensor stream. Samples are stored row-major;
/// ACC rows have three values, every other kind one.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalChannel {
    pub kind: ChannelKind,
    pub start_time: i64,
    pub sample_rate: f64,
    values: Vec<f64>,
}

impl SignalChannel {
    /// Builds a channel from row-major values. Panics if the value count is
    /// not a multiple of the kind's width.
    pub fn new(kind: ChannelKind, start_time: i64, sample_rate: f64, values: Vec<f64>) -> Self {
        assert_eq!(
            values.len() % kind.width(),
            0,
            "{kind} values must come in rows of {}",
            kind.width()
        );
        Self {
            kind,
            start_time,
            sample_rate,
            values,
        }
    }

    pub fn from_axes(start_time: i64, sample_rate: f64, x: &[f64], y: &[f64], z: &[f64]) -> Self {
        assert!(x.len() == y.len() && y.len() == z.len());
        let values = x
            .iter()
            .zip(y)
            .zip(z)
            .flat_map(|((a, b), c)| [*a, *b, *c])
            .collect();
        Self::new(ChannelKind::Acc, start_time, sample_rate, values)
    }

    pub fn width(&self) -> usize {
        self.kind.width()
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.width()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn duration_seconds(&self) -> f64 {
        self.len() as f64 / self.sample_rate
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.width())
    }

    /// Copy of column `index` (0 for single-width channels).
    pub fn column(&self, index: usize) -> Vec<f64> {
        assert!(index < self.width());
        self.rows().map(|r| r[index]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Unipolar,
    Bipolar,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Unipolar => "unipolar",
            Label::Bipolar => "bipolar",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = SessionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "unipolar" => Ok(Label::Unipolar),
            "bipolar" => Ok(Label::Bipolar),
            _ => Err(SessionError::InvalidLabel(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub subject_id: String,
    pub label: Label,
    pub bvp: SignalChannel,
    pub eda: SignalChannel,
    pub acc: SignalChannel,
    pub temp: SignalChannel,
}

impl Session {
    pub fn channel(&self, kind: ChannelKind) -> &SignalChannel {
        match kind {
            ChannelKind::Bvp => &self.bvp,
            ChannelKind::Eda => &self.eda,
            ChannelKind::Acc => &self.acc,
            ChannelKind::Temp => &self.temp,
        }
    }

    pub fn channels(&self) -> impl Iterator<Item = &SignalChannel> {
        ChannelKind::ALL.into_iter().map(|k| self.channel(k))
    }
}

fn parse_header_line(line: Option<&str>, what: &str, width: usize) -> Result<Vec<String>, SessionError> {
    let line = line.ok_or_else(|| SessionError::MalformedHeader(format!("missing {what} line")))?;
    let fields: Vec<String> = line.split(',').map(|f| f.trim().to_string()).collect();
    if fields.len() != width || fields.iter().any(String::is_empty) {
        return Err(SessionError::MalformedHeader(format!(
            "{what} line {line:?} must have {width} value(s)"
        )));
    }
    Ok(fields)
}

fn parse_start_time(field: &str) -> Option<i64> {
    if let Ok(v) = field.parse::<i64>() {
        return Some(v);
    }
    // E4 exports write the timestamp as e.g. "1581246953.000000".
    let v = field.parse::<f64>().ok()?;
    (v.is_finite() && v.fract() == 0.0 && v.abs() < 9.0e15).then_some(v as i64)
}

/// Parses one channel CSV.
pub fn parse_channel_csv(content: &str, kind: ChannelKind) -> Result<SignalChannel, SessionError> {
    let width = kind.width();
    let mut lines = content.lines().map(|l| l.strip_suffix('\r').unwrap_or(l));

    let start_fields = parse_header_line(lines.next(), "start time", width)?;
    let start_time = parse_start_time(&start_fields[0]).ok_or_else(|| {
        SessionError::MalformedHeader(format!("start time {:?} is not an integer", start_fields[0]))
    })?;

    let rate_fields = parse_header_line(lines.next(), "sample rate", width)?;
    let sample_rate: f64 = rate_fields[0]
        .parse()
        .ok()
        .filter(|r: &f64| r.is_finite() && *r > 0.0)
        .ok_or_else(|| {
            SessionError::MalformedHeader(format!("sample rate {:?} is not a positive number", rate_fields[0]))
        })?;

    let mut values = Vec::new();
    for (offset, line) in lines.enumerate() {
        let line_no = offset + 3;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != width {
            return Err(SessionError::WidthMismatch {
                line: line_no,
                expected: width,
                found: fields.len(),
            });
        }
        for f in fields {
            let v: f64 = f
                .trim()
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| SessionError::NonFiniteSample {
                    line: line_no,
                    value: f.trim().to_string(),
                })?;
            values.push(v);
        }
    }
    if values.is_empty() {
        return Err(SessionError::EmptyBody);
    }
    Ok(SignalChannel::new(kind, start_time, sample_rate, values))
}

/// Serialises a channel in the same layout [`parse_channel_csv`] reads.
/// Values use the shortest representation that parses back exactly.
pub fn write_channel_csv(channel: &SignalChannel) -> String {
    use std::fmt::Write;
    let width = channel.width();
    let repeat = |v: String| vec![v; width].join(",");
    let mut out = String::with_capacity(channel.values.len() * 12);
    out.push_str(&repeat(channel.start_time.to_string()));
    out.push('\n');
    out.push_str(&repeat(format!("{:?}", channel.sample_rate)));
    out.push('\n');
    for row in channel.rows() {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{v:?}").unwrap();
        }
        out.push('\n');
    }
    out
}

fn read_to_string(path: &Path) -> Result<String, SessionError> {
    fs::read_to_string(path).map_err(|source| SessionError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads `BVP.csv`, `EDA.csv`, `ACC.csv` and `TEMP.csv` from `dir`.
pub fn load_session(dir: &Path, subject_id: &str, label: Label) -> Result<Session, SessionError> {
    let load = |kind: ChannelKind| -> Result<SignalChannel, SessionError> {
        let path = dir.join(kind.file_name());
        if !path.is_file() {
            return Err(SessionError::MissingChannelFile(path));
        }
        let content = read_to_string(&path)?;
        parse_channel_csv(&content, kind).map_err(|e| SessionError::Channel {
            path,
            source: Box::new(e),
        })
    };
    Ok(Session {
        subject_id: subject_id.to_string(),
        label,
        bvp: load(ChannelKind::Bvp)?,
        eda: load(ChannelKind::Eda)?,
        acc: load(ChannelKind::Acc)?,
        temp: load(ChannelKind::Temp)?,
    })
}

/// Writes the four channel files of `session` into `dir`, creating it.
pub fn write_session(dir: &Path, session: &Session) -> Result<(), SessionError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| SessionError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for channel in session.channels() {
        let path = dir.join(channel.kind.file_name());
        fs::write(&path, write_channel_csv(channel)).map_err(io_err(&path))?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub subject_id: String,
    pub label: Label,
}

pub const MANIFEST_HEADER: &str = "subject_id,label";

pub fn parse_manifest(content: &str) -> Result<Vec<ManifestEntry>, SessionError> {
    let mut lines = content
        .lines()
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, header)) if header.replace(' ', "").eq_ignore_ascii_case(MANIFEST_HEADER) => {}
        other => {
            return Err(SessionError::Manifest(format!(
                "expected header {MANIFEST_HEADER:?}, found {:?}",
                other.map(|(_, l)| l).unwrap_or("")
            )))
        }
    }
    let mut entries: Vec<ManifestEntry> = Vec::new();
    for (idx, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [subject_id, label] = fields.as_slice() else {
            return Err(SessionError::Manifest(format!(
                "line {}: expected 2 columns, found {}",
                idx + 1,
                fields.len()
            )));
        };
        if subject_id.is_empty() {
            return Err(SessionError::Manifest(format!("line {}: empty subject_id", idx + 1)));
        }
        if entries.iter().any(|e| e.subject_id == *subject_id) {
            return Err(SessionError::Manifest(format!("duplicate subject_id {subject_id:?}")));
        }
        entries.push(ManifestEntry {
            subject_id: subject_id.to_string(),
            label: label.parse()?,
        });
    }
    Ok(entries)
}

pub fn write_manifest(entries: &[ManifestEntry]) -> String {
    let mut out = String::from(MANIFEST_HEADER);
    out.push('\n');
    for e in entries {
        out.push_str(&format!("{},{}\n", e.subject_id, e.label));
    }
    out
}

pub fn load_manifest(path: &Path) -> Result<Vec<ManifestEntry>, SessionError> {
    parse_manifest(&read_to_string(path)?)
}

// ---------------------------------------------------------------------------
// Validation

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ValidationPolicy {
    pub min_duration_seconds: f64,
    pub max_duration_skew_seconds: f64,
}

impl Default for ValidationPolicy {
    fn default() -> Self {
        Self {
            min_duration_seconds: 60.0,
            max_duration_skew_seconds: 5.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValidationStatus {
    Ok,
    Excluded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub subject_id: String,
    pub status: ValidationStatus,
    pub reasons: Vec<String>,
}

impl ValidationReport {
    pub fn from_reasons(subject_id: &str, reasons: Vec<String>) -> Self {
        let status = if reasons.is_empty() {
            ValidationStatus::Ok
        } else {
            ValidationStatus::Excluded
        };
        Self {
            subject_id: subject_id.to_string(),
            status,
            reasons,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == ValidationStatus::Ok
    }
}

pub fn validate_session(session: &Session, policy: &ValidationPolicy) -> ValidationReport {
    let mut reasons = Vec::new();
    for ch in session.channels() {
        if ch.values().iter().any(|v| v.is_nan()) {
            reasons.push(format!("{} contains NaN", ch.kind));
        }
        let duration = ch.duration_seconds();
        if duration < policy.min_duration_seconds {
            reasons.push(format!(
                "{} channel too short ({duration:.1} s < {} s)",
                ch.kind, policy.min_duration_seconds
            ));
        }
    }
    let bvp = session.bvp.values();
    if let Some(&first) = bvp.first() {
        if bvp.iter().all(|&v| v == first) {
            reasons.push("constant BVP".to_string());
        }
    }
    let durations: Vec<f64> = session.channels().map(SignalChannel::duration_seconds).collect();
    let longest = durations.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let shortest = durations.iter().copied().fold(f64::INFINITY, f64::min);
    if longest - shortest > policy.max_duration_skew_seconds {
        reasons.push(format!(
            "channel durations disagree by {:.1} s (> {} s)",
            longest - shortest,
            policy.max_duration_skew_seconds
        ));
    }
    ValidationReport::from_reasons(&session.subject_id, reasons)
}
