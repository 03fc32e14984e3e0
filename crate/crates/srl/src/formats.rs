//! JSON input files: matrix sets, operator families and cocycle specs.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use srl_core::cocycle::{CocycleSpec, DrivingSystem, FourierCocycle};
use srl_core::jsr::MatrixSet;
use srl_core::opshift::{OperatorFamily, ShiftFinRankOperator};
use srl_core::Matrix;

pub type Rows = Vec<Vec<f64>>;

/// A file that could not be read or does not match its schema.
#[derive(Debug)]
pub struct InputError {
    pub path: PathBuf,
    /// 1-based position reported by the parser; 0 when unknown.
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "{}:{}:{}: {}", self.path.display(), self.line, self.column, self.message)
        } else {
            write!(f, "{}: {}", self.path.display(), self.message)
        }
    }
}

impl std::error::Error for InputError {}

impl InputError {
    fn semantic(path: &Path, message: String) -> Self {
        InputError { path: path.to_path_buf(), line: 0, column: 0, message }
    }
}

/// Parses `bytes` as `T`, keeping the parser's line and column on failure.
pub fn parse<T: DeserializeOwned>(path: &Path, bytes: &[u8]) -> Result<T, InputError> {
    serde_json::from_slice(bytes).map_err(|e| {
        let full = e.to_string();
        // serde_json appends " at line L column C"; the position is reported separately
        let message = match full.rfind(" at line ") {
            Some(i) => full[..i].to_string(),
            None => full,
        };
        InputError { path: path.to_path_buf(), line: e.line(), column: e.column(), message }
    })
}

/// Reads and parses a file, returning the raw bytes for hashing as well.
pub fn read<T: DeserializeOwned>(path: &Path) -> Result<(T, Vec<u8>), InputError> {
    let bytes = std::fs::read(path).map_err(|e| InputError::semantic(path, e.to_string()))?;
    let value = parse(path, &bytes)?;
    Ok((value, bytes))
}

fn to_matrix(rows: &Rows, dim: usize, field: &str) -> Result<Matrix, String> {
    if rows.len() != dim {
        return Err(format!("{field}: expected {dim} rows, found {}", rows.len()));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != dim {
            return Err(format!("{field}[{i}]: expected {dim} entries, found {}", r.len()));
        }
    }
    Matrix::from_rows(rows).map_err(|e| format!("{field}: {e}"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSetFile {
    pub dim: usize,
    pub matrices: Vec<Rows>,
    #[serde(default)]
    pub label: String,
}

impl MatrixSetFile {
    pub fn to_set(&self) -> Result<MatrixSet, String> {
        if self.dim == 0 {
            return Err("dim: must be at least 1".into());
        }
        if self.matrices.is_empty() {
            return Err("matrices: the member list is empty".into());
        }
        let ms = self
            .matrices
            .iter()
            .enumerate()
            .map(|(i, m)| to_matrix(m, self.dim, &format!("matrices[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        MatrixSet::new(ms, self.label.clone()).map_err(|e| e.to_string())
    }

    pub fn from_set(set: &MatrixSet) -> Self {
        MatrixSetFile {
            dim: set.dim(),
            matrices: set.members().iter().map(Matrix::to_rows).collect(),
            label: set.label().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    #[serde(default)]
    pub finite_part: Vec<(usize, usize, f64)>,
    #[serde(default)]
    pub diag_prefix: Vec<f64>,
    pub tail_weight: f64,
    pub shift_power: usize,
}

impl OperatorFile {
    pub fn to_operator(&self) -> Result<ShiftFinRankOperator, srl_core::Error> {
        ShiftFinRankOperator::new(&self.finite_part, self.diag_prefix.clone(), self.tail_weight, self.shift_power)
    }

    pub fn from_operator(l: &ShiftFinRankOperator) -> Self {
        OperatorFile {
            finite_part: l.finite_entries().collect(),
            diag_prefix: l.diag_prefix().to_vec(),
            tail_weight: l.tail_weight(),
            shift_power: l.shift_power(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFamilyFile {
    pub members: Vec<OperatorFile>,
    #[serde(default)]
    pub label: String,
}

impl OperatorFamilyFile {
    pub fn to_family(&self) -> Result<OperatorFamily, String> {
        if self.members.is_empty() {
            return Err("members: the member list is empty".into());
        }
        let ms = self
            .members
            .iter()
            .enumerate()
            .map(|(i, m)| m.to_operator().map_err(|e| format!("members[{i}]: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        OperatorFamily::new(ms, self.label.clone()).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DriverFile {
    FullShift { probs: Vec<f64> },
    MarkovShift { transition: Rows, stationary: Vec<f64> },
    CircleRotation { angle: f64 },
}

impl DriverFile {
    pub fn to_system(&self, seed: u64) -> Result<DrivingSystem, String> {
        let sys = match self {
            DriverFile::FullShift { probs } => DrivingSystem::full_shift(probs.clone(), seed),
            DriverFile::MarkovShift { transition, stationary } => {
                let p = to_matrix(transition, stationary.len(), "driver.transition")?;
                DrivingSystem::markov_shift(p, stationary.clone(), seed)
            }
            DriverFile::CircleRotation { angle } => DrivingSystem::circle_rotation(*angle, seed),
        };
        sys.map_err(|e| format!("driver: {e}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierFile {
    pub constant: Rows,
    #[serde(default)]
    pub cos: Vec<Rows>,
    #[serde(default)]
    pub sin: Vec<Rows>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleSpecFile {
    pub driver: DriverFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Rows>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fourier: Option<FourierFile>,
    pub dim: usize,
}

impl CocycleSpecFile {
    pub fn to_cocycle(&self) -> Result<CocycleSpec, String> {
        let d = self.dim;
        if d == 0 {
            return Err("dim: must be at least 1".into());
        }
        let list = |ms: &[Rows], field: &str| -> Result<Vec<Matrix>, String> {
            ms.iter().enumerate().map(|(i, m)| to_matrix(m, d, &format!("{field}[{i}]"))).collect()
        };
        let spec = match (&self.generators, &self.fourier) {
            (Some(g), None) => {
                if g.is_empty() {
                    return Err("generators: the generator list is empty".into());
                }
                CocycleSpec::symbols(list(g, "generators")?)
            }
            (None, Some(f)) => CocycleSpec::fourier(FourierCocycle {
                constant: to_matrix(&f.constant, d, "fourier.constant")?,
                cos: list(&f.cos, "fourier.cos")?,
                sin: list(&f.sin, "fourier.sin")?,
            }),
            (Some(_), Some(_)) => return Err("give either `generators` or `fourier`, not both".into()),
            (None, None) => return Err("missing `generators` or `fourier`".into()),
        };
        spec.map_err(|e| e.to_string())
    }

    /// Driver and cocycle for one seed, checked for compatibility.
    pub fn build(&self, seed: u64) -> Result<(DrivingSystem, CocycleSpec), String> {
        let coc = self.to_cocycle()?;
        let sys = self.driver.to_system(seed)?;
        coc.check_driver(&sys).map_err(|e| e.to_string())?;
        Ok((sys, coc))
    }
}

/// Turns a schema-level failure into an [`InputError`] naming the file.
pub fn invalid(path: &Path, message: String) -> InputError {
    InputError::semantic(path, message)
}

/// Canonical pretty-printed form; parsing it back gives the same value.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("file types serialize infallibly") + "\n"
}
