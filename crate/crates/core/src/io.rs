//! JSON file formats.
//!
//! A matrix is `{"dim": d, "re": [[...]], "im": [[...]]}` with `d` rows of
//! `d` entries each; `im` may be omitted for real matrices. An ensemble file
//! is `{"priors": [...], "states": [matrix, ...]}` and a code file is
//! `{"M": m, "outputs": [matrix, ...]}` with optional `"labels"`.
//! Errors name the offending field and index, e.g. `states[1].re[0]`.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::channel::CqCodebookInstance;
use crate::error::{QhtError, Result};
use crate::mary::Ensemble;
use crate::operator::{CMatrix, DensityOperator, HermitianOperator};

/// On-disk form of a square complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let d = m.nrows();
        let re = (0..d).map(|i| (0..d).map(|j| m[(i, j)].re).collect()).collect();
        let im = (0..d).map(|i| (0..d).map(|j| m[(i, j)].im).collect()).collect();
        MatrixFile { dim: d, re, im: Some(im) }
    }

    pub fn from_operator(op: &HermitianOperator) -> Self {
        Self::from_matrix(op.matrix())
    }

    /// Checks the shape and assembles the matrix; `field` prefixes errors.
    pub fn to_matrix(&self, field: &str) -> Result<CMatrix> {
        let d = self.dim;
        if d == 0 {
            return Err(QhtError::format(format!("{field}.dim"), "must be positive"));
        }
        check_rows(&self.re, d, &format!("{field}.re"))?;
        if let Some(im) = &self.im {
            check_rows(im, d, &format!("{field}.im"))?;
        }
        Ok(CMatrix::from_fn(d, d, |i, j| {
            let im = self.im.as_ref().map_or(0.0, |m| m[i][j]);
            Complex64::new(self.re[i][j], im)
        }))
    }

    pub fn to_operator(&self, field: &str) -> Result<HermitianOperator> {
        HermitianOperator::new(self.to_matrix(field)?).map_err(|e| e.at(field))
    }

    pub fn to_density(&self, field: &str) -> Result<DensityOperator> {
        DensityOperator::new(self.to_operator(field)?).map_err(|e| e.at(field))
    }
}

fn check_rows(rows: &[Vec<f64>], d: usize, field: &str) -> Result<()> {
    if rows.len() != d {
        return Err(QhtError::format(field, format!("has {} rows, expected {d}", rows.len())));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != d {
            return Err(QhtError::format(
                format!("{field}[{i}]"),
                format!("has {} entries, expected {d}", row.len()),
            ));
        }
        if let Some(j) = row.iter().position(|x| !x.is_finite()) {
            return Err(QhtError::format(format!("{field}[{i}][{j}]"), "is not finite"));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleFile {
    pub priors: Vec<f64>,
    pub states: Vec<MatrixFile>,
}

impl EnsembleFile {
    pub fn from_ensemble(e: &Ensemble) -> Self {
        EnsembleFile {
            priors: e.priors().to_vec(),
            states: e.states().iter().map(|s| MatrixFile::from_operator(s)).collect(),
        }
    }

    pub fn to_ensemble(&self) -> Result<Ensemble> {
        let states = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| s.to_density(&format!("states[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(self.priors.clone(), states).map_err(|e| e.at("priors"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeFile {
    #[serde(rename = "M")]
    pub m: usize,
    pub outputs: Vec<MatrixFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl CodeFile {
    pub fn from_code(code: &CqCodebookInstance) -> Self {
        CodeFile {
            m: code.len(),
            outputs: code.outputs().iter().map(|w| MatrixFile::from_operator(w)).collect(),
            labels: code.labels().map(|l| l.to_vec()),
        }
    }

    pub fn to_code(&self) -> Result<CqCodebookInstance> {
        if self.m != self.outputs.len() {
            return Err(QhtError::format(
                "M",
                format!("is {} but {} outputs are given", self.m, self.outputs.len()),
            ));
        }
        let outputs = self
            .outputs
            .iter()
            .enumerate()
            .map(|(i, w)| w.to_density(&format!("outputs[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let code = CqCodebookInstance::new(outputs)?;
        match &self.labels {
            Some(l) => code.with_labels(l.clone()).map_err(|e| e.at("labels")),
            None => Ok(code),
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| QhtError::format(&name, e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| QhtError::format(&name, e.to_string()))
}

fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.at(path.display().to_string()))
}

pub fn load_matrix(path: &Path) -> Result<HermitianOperator> {
    let f: MatrixFile = read_json(path)?;
    in_file(path, f.to_operator("matrix"))
}

pub fn load_density(path: &Path) -> Result<DensityOperator> {
    let f: MatrixFile = read_json(path)?;
    in_file(path, f.to_density("matrix"))
}

pub fn load_ensemble(path: &Path) -> Result<Ensemble> {
    let f: EnsembleFile = read_json(path)?;
    in_file(path, f.to_ensemble())
}

pub fn load_code(path: &Path) -> Result<CqCodebookInstance> {
    let f: CodeFile = read_json(path)?;
    in_file(path, f.to_code())
}

/// Shortest text that parses back to `x`, as in the JSON output (`0.25`,
/// `1e-12`); non-finite values print as `inf`, `-inf` or `NaN`.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        serde_json::to_string(&x).unwrap_or_else(|_| x.to_string())
    } else {
        x.to_string()
    }
}

/// Writes any serializable value as pretty JSON followed by a newline.
pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_density;

    fn parse<T: DeserializeOwned>(s: &str) -> T {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn matrix_round_trip_is_exact() {
        let rho = random_density(3, 2, 17).unwrap();
        let text = serde_json::to_string(&MatrixFile::from_operator(&rho)).unwrap();
        let back = parse::<MatrixFile>(&text).to_density("m").unwrap();
        assert_eq!(back.matrix(), rho.matrix());
    }

    #[test]
    fn imaginary_part_is_optional() {
        let f: MatrixFile = parse(r#"{"dim": 2, "re": [[0.5, 0], [0, 0.5]]}"#);
        assert!(f.to_density("m").is_ok());
    }

    #[test]
    fn shape_errors_name_the_field() {
        let f: MatrixFile = parse(r#"{"dim": 2, "re": [[1, 0], [0]], "im": [[0, 0], [0, 0]]}"#);
        let msg = f.to_matrix("states[3]").unwrap_err().to_string();
        assert!(msg.starts_with("states[3].re[1]"), "{msg}");
        let f: MatrixFile = parse(r#"{"dim": 2, "re": [[1, 0], [0, 0]], "im": [[0, 0]]}"#);
        let msg = f.to_matrix("m").unwrap_err().to_string();
        assert!(msg.starts_with("m.im"), "{msg}");
    }

    #[test]
    fn non_density_reports_trace_and_eigenvalue() {
        let f: MatrixFile = parse(r#"{"dim": 2, "re": [[1.5, 0], [0, -0.25]]}"#);
        let msg = f.to_density("states[0]").unwrap_err().to_string();
        assert!(msg.contains("states[0]") && msg.contains("trace = 1.25") && msg.contains("-2.5e-1"), "{msg}");
    }

    #[test]
    fn ensemble_and_code_files() {
        let e: EnsembleFile = parse(
            r#"{"priors": [0.5, 0.5], "states": [
                {"dim": 2, "re": [[1, 0], [0, 0]]},
                {"dim": 2, "re": [[0.5, 0.5], [0.5, 0.5]]}]}"#,
        );
        assert_eq!(e.to_ensemble().unwrap().len(), 2);
        let bad: EnsembleFile = parse(r#"{"priors": [0.5, 0.6], "states": [
                {"dim": 1, "re": [[1]]}, {"dim": 1, "re": [[1]]}]}"#);
        assert!(bad.to_ensemble().unwrap_err().to_string().starts_with("priors"));

        let c: CodeFile = parse(r#"{"M": 2, "outputs": [{"dim": 1, "re": [[1]]}]}"#);
        assert!(c.to_code().unwrap_err().to_string().starts_with("M"));
        let c: CodeFile = parse(r#"{"M": 1, "outputs": [{"dim": 1, "re": [[1]]}], "labels": ["x"]}"#);
        let code = c.to_code().unwrap();
        let again: CodeFile = parse(&serde_json::to_string(&CodeFile::from_code(&code)).unwrap());
        assert_eq!(again.to_code().unwrap(), code);
    }
}
