//! CSV samples, JSON moments and the JSON dictionary format.

use std::fs;
use std::io::Write;
use std::path::Path;

use optdict_core::{DMatrix, DVector, Dictionary, MomentEstimate, SampleSet, Tolerances};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};

/// Version tag written to and required from dictionary files.
pub const DICTIONARY_VERSION: u32 = 1;

fn read_text(path: &Path) -> AppResult<String> {
    fs::read_to_string(path).map_err(|e| AppError::io(path, e))
}

/// Writes `contents` to `path`, creating or truncating it.
pub fn write_text(path: &Path, contents: &str) -> AppResult<()> {
    let mut file = fs::File::create(path).map_err(|e| AppError::io(path, e))?;
    file.write_all(contents.as_bytes()).map_err(|e| AppError::io(path, e))
}

/// Parses comma-separated samples, one per row. A first row with any
/// non-numeric field is taken as a header and skipped.
pub fn parse_samples(text: &str, path: &Path) -> AppResult<SampleSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<DVector<f64>> = Vec::new();
    let mut width = None;
    for (index, record) in reader.records().enumerate() {
        let record = record.map_err(|e| AppError::parse(path, e.to_string()))?;
        let line = record.position().map_or(index as u64 + 1, |p| p.line());
        if index == 0 && record.iter().any(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        if record.iter().all(str::is_empty) {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(AppError::parse(
                path,
                format!("ragged row at row {line}: {} fields, expected {expected}", record.len()),
            ));
        }
        let mut row = Vec::with_capacity(expected);
        for (col, field) in record.iter().enumerate() {
            match field.parse::<f64>() {
                Ok(v) if v.is_finite() => row.push(v),
                Ok(_) => {
                    return Err(AppError::parse(
                        path,
                        format!("non-finite value {field:?} at row {line}, column {}", col + 1),
                    ))
                }
                Err(_) => {
                    return Err(AppError::parse(
                        path,
                        format!("non-numeric field {field:?} at row {line}, column {}", col + 1),
                    ))
                }
            }
        }
        rows.push(DVector::from_vec(row));
    }
    if rows.is_empty() {
        return Err(AppError::parse(path, "no sample rows"));
    }
    Ok(SampleSet::new(rows)?)
}

pub fn load_samples(path: &Path) -> AppResult<SampleSet> {
    parse_samples(&read_text(path)?, path)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixFile {
    Bare(Vec<Vec<f64>>),
    Keyed { covariance: Vec<Vec<f64>> },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum VectorFile {
    Bare(Vec<f64>),
    Keyed { mean: Vec<f64> },
}

fn rows_to_matrix(rows: &[Vec<f64>], path: &Path, what: &str) -> AppResult<DMatrix<f64>> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if n == 0 || cols == 0 {
        return Err(AppError::schema(path, format!("{what} is empty")));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != cols) {
        return Err(AppError::schema(path, format!("{what} row {} has {} entries, expected {cols}", i + 1, rows[i].len())));
    }
    Ok(DMatrix::from_fn(n, cols, |i, j| rows[i][j]))
}

fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Covariance from `[[...], ...]` or `{"covariance": [[...], ...]}`.
pub fn load_covariance(path: &Path) -> AppResult<DMatrix<f64>> {
    let file: MatrixFile = serde_json::from_str(&read_text(path)?).map_err(|_| {
        AppError::schema(path, "expected an array of rows or an object with a \"covariance\" key")
    })?;
    let rows = match file {
        MatrixFile::Bare(rows) | MatrixFile::Keyed { covariance: rows } => rows,
    };
    rows_to_matrix(&rows, path, "covariance")
}

/// Mean from `[...]` or `{"mean": [...]}`.
pub fn load_mean(path: &Path) -> AppResult<DVector<f64>> {
    let file: VectorFile = serde_json::from_str(&read_text(path)?)
        .map_err(|_| AppError::schema(path, "expected an array or an object with a \"mean\" key"))?;
    let (VectorFile::Bare(v) | VectorFile::Keyed { mean: v }) = file;
    Ok(DVector::from_vec(v))
}

/// Moments from a covariance file and an optional mean file (zero mean
/// when absent).
pub fn load_moments(cov: &Path, mean: Option<&Path>) -> AppResult<MomentEstimate> {
    let covariance = load_covariance(cov)?;
    let mean = match mean {
        Some(p) => load_mean(p)?,
        None => DVector::zeros(covariance.nrows()),
    };
    Ok(MomentEstimate::new(mean, covariance)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceRecord {
    pub majorization: f64,
    pub partition: f64,
    pub case_split: f64,
    pub sqrt_clamp: f64,
    pub reorthogonalize: f64,
    pub orthogonality_failure: f64,
    pub rank: f64,
    pub drop: f64,
    pub representation: f64,
}

impl From<&Tolerances> for ToleranceRecord {
    fn from(t: &Tolerances) -> Self {
        ToleranceRecord {
            majorization: t.majorization,
            partition: t.partition,
            case_split: t.case_split,
            sqrt_clamp: t.sqrt_clamp,
            reorthogonalize: t.reorthogonalize,
            orthogonality_failure: t.orthogonality_failure,
            rank: t.rank,
            drop: t.drop,
            representation: t.representation,
        }
    }
}

impl From<&ToleranceRecord> for Tolerances {
    fn from(t: &ToleranceRecord) -> Self {
        Tolerances {
            majorization: t.majorization,
            partition: t.partition,
            case_split: t.case_split,
            sqrt_clamp: t.sqrt_clamp,
            reorthogonalize: t.reorthogonalize,
            orthogonality_failure: t.orthogonality_failure,
            rank: t.rank,
            drop: t.drop,
            representation: t.representation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DictionaryMeta {
    pub version: u32,
    pub tolerances: ToleranceRecord,
}

/// On-disk dictionary. `vectors` holds one dictionary vector per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DictionaryFile {
    pub center: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub lengths: Vec<f64>,
    pub spectrum: Vec<f64>,
    pub frame_operator: Vec<Vec<f64>>,
    pub cost: f64,
    pub meta: DictionaryMeta,
}

impl DictionaryFile {
    pub fn from_dictionary(dict: &Dictionary, tol: &Tolerances) -> Self {
        DictionaryFile {
            center: dict.center().iter().copied().collect(),
            vectors: dict.vectors().column_iter().map(|c| c.iter().copied().collect()).collect(),
            lengths: dict.profile().to_vec(),
            spectrum: dict.spectrum().lambda_star.clone(),
            frame_operator: matrix_to_rows(dict.frame_operator()),
            cost: dict.cost(),
            meta: DictionaryMeta {
                version: DICTIONARY_VERSION,
                tolerances: tol.into(),
            },
        }
    }

    /// Rebuilds the dictionary, re-checking every invariant.
    pub fn into_dictionary(self, path: &Path) -> AppResult<(Dictionary, Tolerances)> {
        if self.meta.version != DICTIONARY_VERSION {
            return Err(AppError::schema(
                path,
                format!("unsupported version {}, expected {DICTIONARY_VERSION}", self.meta.version),
            ));
        }
        let tol = Tolerances::from(&self.meta.tolerances);
        let n = self.center.len();
        if let Some(i) = self.vectors.iter().position(|v| v.len() != n) {
            return Err(AppError::schema(
                path,
                format!("vector {} has {} entries, center has {n}", i + 1, self.vectors[i].len()),
            ));
        }
        let k = self.vectors.len();
        let vectors = DMatrix::from_fn(n, k, |i, j| self.vectors[j][i]);
        let frame = rows_to_matrix(&self.frame_operator, path, "frame_operator")?;
        let dict = Dictionary::from_parts(
            DVector::from_vec(self.center),
            vectors,
            self.lengths,
            self.spectrum,
            frame,
            self.cost,
            &tol,
        )?;
        Ok((dict, tol))
    }
}

pub fn dictionary_to_json(dict: &Dictionary, tol: &Tolerances) -> String {
    let mut text = serde_json::to_string_pretty(&DictionaryFile::from_dictionary(dict, tol))
        .expect("dictionary serializes");
    text.push('\n');
    text
}

pub fn save_dictionary(dict: &Dictionary, tol: &Tolerances, path: &Path) -> AppResult<()> {
    write_text(path, &dictionary_to_json(dict, tol))
}

pub fn dictionary_from_json(text: &str, path: &Path) -> AppResult<(Dictionary, Tolerances)> {
    let file: DictionaryFile = serde_json::from_str(text).map_err(|e| AppError::schema(path, e.to_string()))?;
    file.into_dictionary(path)
}

pub fn load_dictionary(path: &Path) -> AppResult<(Dictionary, Tolerances)> {
    dictionary_from_json(&read_text(path)?, path)
}
