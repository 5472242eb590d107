use std::fs;
use std::path::Path;

use optdict::io::{
    dictionary_from_json, dictionary_to_json, load_covariance, load_dictionary, load_mean, load_moments,
    load_samples, parse_samples, save_dictionary,
};
use optdict::AppError;
use optdict_core::dictionary::build_optimal_dictionary;
use optdict_core::samples::empirical_moments;
use optdict_core::{CovarianceDivisor, DMatrix, DVector, Error, LengthProfile, MomentEstimate, Tolerances};
use serde_json::Value;

fn parse(text: &str) -> Result<optdict_core::SampleSet, AppError> {
    parse_samples(text, Path::new("samples.csv"))
}

fn r2_dictionary() -> optdict_core::Dictionary {
    let moments = MomentEstimate::new(
        DVector::from_row_slice(&[-0.75, 0.5]),
        DMatrix::from_row_slice(2, 2, &[6.7708, 3.125, 3.125, 4.5833]),
    )
    .unwrap();
    build_optimal_dictionary(&moments, &LengthProfile::new(vec![2.0, 1.0, 1.0]).unwrap(), &Tolerances::default())
        .unwrap()
}

#[test]
fn plain_rows() {
    let s = parse("0,2\n0,2\n").unwrap();
    assert_eq!((s.len(), s.dim()), (2, 2));
}

#[test]
fn header_skipped() {
    let s = parse("x,y\n1,2\n3,4\n").unwrap();
    assert_eq!(s.len(), 2);
    assert_eq!(s.rows()[1].as_slice(), &[3.0, 4.0]);
}

#[test]
fn ragged_row_reported() {
    let err = parse("1,2\n1\n").unwrap_err();
    assert!(err.to_string().contains("ragged row at row 2"), "{err}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn non_numeric_field_located() {
    let err = parse("1,2\n3,abc\n").unwrap_err();
    assert!(err.to_string().contains("row 2, column 2"), "{err}");
    let err = parse("1,2\n3,NaN\n").unwrap_err();
    assert!(err.to_string().contains("non-finite"), "{err}");
}

#[test]
fn empty_file_rejected() {
    assert!(parse("").is_err());
    assert!(parse("x,y\n").is_err());
}

#[test]
fn empirical_moments_from_csv() {
    let s = parse("1,0\n-1,0\n").unwrap();
    let m = empirical_moments(&s, CovarianceDivisor::Population).unwrap();
    assert_eq!(m.mean().as_slice(), &[0.0, 0.0]);
    assert_eq!(m.covariance(), &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
}

#[test]
fn missing_file_is_io_error() {
    let err = load_samples(Path::new("/nonexistent/samples.csv")).unwrap_err();
    assert_eq!(err.exit_code(), 4);
}

#[test]
fn moment_files() {
    let dir = tempfile::tempdir().unwrap();
    let cov = dir.path().join("cov.json");
    let mean = dir.path().join("mean.json");
    fs::write(&cov, "{\"covariance\": [[2, 0], [0, 1]]}").unwrap();
    fs::write(&mean, "[1, -1]").unwrap();
    assert_eq!(load_covariance(&cov).unwrap(), DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]));
    assert_eq!(load_mean(&mean).unwrap().as_slice(), &[1.0, -1.0]);
    let m = load_moments(&cov, Some(&mean)).unwrap();
    assert_eq!(m.dim(), 2);
    fs::write(&cov, "[[1, 2], [3]]").unwrap();
    assert!(matches!(load_covariance(&cov), Err(AppError::Schema { .. })));
    fs::write(&cov, "[[1, 2], [3, 1]]").unwrap();
    assert!(matches!(
        load_moments(&cov, None),
        Err(AppError::Core(Error::NotSymmetric { .. }))
    ));
}

#[test]
fn dictionary_round_trip() {
    let dict = r2_dictionary();
    let tol = Tolerances::default();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dict.json");
    save_dictionary(&dict, &tol, &path).unwrap();
    let (back, back_tol) = load_dictionary(&path).unwrap();
    assert_eq!(back, dict);
    assert_eq!(back_tol, tol);
    assert_eq!(back.cost().to_bits(), dict.cost().to_bits());
    assert_eq!(dictionary_to_json(&back, &back_tol), fs::read_to_string(&path).unwrap());
}

#[test]
fn dictionary_schema_fields() {
    let json: Value = serde_json::from_str(&dictionary_to_json(&r2_dictionary(), &Tolerances::default())).unwrap();
    for key in ["center", "vectors", "lengths", "spectrum", "frame_operator", "cost", "meta"] {
        assert!(json.get(key).is_some(), "{key}");
    }
    assert_eq!(json["vectors"].as_array().unwrap().len(), 3);
    assert_eq!(json["vectors"][0].as_array().unwrap().len(), 2);
    assert_eq!(json["meta"]["version"], 1);
    assert!(json["meta"]["tolerances"]["rank"].is_number());
}

#[test]
fn tampered_length_names_invariant() {
    let text = dictionary_to_json(&r2_dictionary(), &Tolerances::default());
    let mut json: Value = serde_json::from_str(&text).unwrap();
    json["lengths"][0] = Value::from(2.5);
    let err = dictionary_from_json(&json.to_string(), Path::new("dict.json")).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("squared norm of each vector equals its length"), "{err}");
}

#[test]
fn missing_center_is_schema_error() {
    let text = dictionary_to_json(&r2_dictionary(), &Tolerances::default());
    let mut json: Value = serde_json::from_str(&text).unwrap();
    json.as_object_mut().unwrap().remove("center");
    let err = dictionary_from_json(&json.to_string(), Path::new("dict.json")).unwrap_err();
    assert!(matches!(err, AppError::Schema { .. }));
    assert!(err.to_string().contains("center"), "{err}");
}

#[test]
fn unknown_version_rejected() {
    let text = dictionary_to_json(&r2_dictionary(), &Tolerances::default());
    let mut json: Value = serde_json::from_str(&text).unwrap();
    json["meta"]["version"] = Value::from(99);
    assert!(matches!(
        dictionary_from_json(&json.to_string(), Path::new("dict.json")),
        Err(AppError::Schema { .. })
    ));
}
