//! Serialization layer: JSON schemas for the domain types, atomic file
//! writes, and plain CSV tables.
//!
//! Every JSON payload written by this crate carries `schema_version` so that
//! downstream tooling can detect format drift. The DTO structs here mirror
//! the domain types field by field; conversions back into domain types go
//! through the validating constructors, so a hand-edited file cannot smuggle
//! in an inconsistent object.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, FdAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Unitary};
use crate::reps::{Homomorphism, Representation};
use crate::transport::{FiniteMetricSpace, Measure};

pub const SCHEMA_VERSION: u32 = 1;

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Writes bytes to `path` atomically: a temp file in the same directory is
/// flushed first and then renamed over the target.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = tmp_path(path);
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Serializes `value` as pretty JSON with a trailing newline, atomically.
pub fn write_json_atomic<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::config(format!("cannot serialize {}: {e}", path.display())))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Reads and deserializes a JSON file.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::config(format!("{}: {e}", path.display())))
}

/// Writes a CSV table: header row, comma separator, `.` decimal separator
/// (the default float formatting), UTF-8, atomically.
pub fn write_csv_atomic(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len(), "csv row width mismatch");
        text.push_str(&row.join(","));
        text.push('\n');
    }
    write_atomic(path, text.as_bytes())
}

/// A square complex matrix as row-major `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        MatrixJson {
            dim: m.dim(),
            entries: m.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let entries: Vec<Complex64> = self
            .entries
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(self.dim, entries)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub block_dims: Vec<usize>,
}

impl AlgebraJson {
    pub fn from_algebra(a: &FdAlgebra) -> Self {
        AlgebraJson { block_dims: a.block_dims().to_vec() }
    }

    pub fn to_algebra(&self) -> Result<FdAlgebra> {
        FdAlgebra::new(self.block_dims.clone())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElementJson {
    pub blocks: Vec<MatrixJson>,
}

impl ElementJson {
    pub fn from_element(x: &AlgebraElement) -> Self {
        ElementJson {
            blocks: x.blocks().iter().map(MatrixJson::from_matrix).collect(),
        }
    }

    pub fn to_element(&self, algebra: &FdAlgebra) -> Result<AlgebraElement> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.to_matrix())
            .collect::<Result<Vec<_>>>()?;
        AlgebraElement::new(algebra.clone(), blocks)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepresentationJson {
    pub multiplicities: Vec<usize>,
    pub conjugator: MatrixJson,
}

impl RepresentationJson {
    pub fn from_representation(pi: &Representation) -> Self {
        RepresentationJson {
            multiplicities: pi.multiplicities().to_vec(),
            conjugator: MatrixJson::from_matrix(pi.conjugator().matrix()),
        }
    }

    pub fn to_representation(&self, algebra: &FdAlgebra) -> Result<Representation> {
        let conjugator = Unitary::new(self.conjugator.to_matrix()?)?;
        Representation::new(algebra.clone(), self.multiplicities.clone(), conjugator)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HomomorphismJson {
    pub source: AlgebraJson,
    pub target: AlgebraJson,
    pub multiplicity_matrix: Vec<Vec<usize>>,
    pub conjugators: Vec<MatrixJson>,
}

impl HomomorphismJson {
    pub fn from_homomorphism(alpha: &Homomorphism) -> Self {
        HomomorphismJson {
            source: AlgebraJson::from_algebra(alpha.source()),
            target: AlgebraJson::from_algebra(alpha.target()),
            multiplicity_matrix: alpha.multiplicity_matrix().to_vec(),
            conjugators: alpha
                .conjugators()
                .iter()
                .map(|u| MatrixJson::from_matrix(u.matrix()))
                .collect(),
        }
    }

    pub fn to_homomorphism(&self) -> Result<Homomorphism> {
        let conjugators = self
            .conjugators
            .iter()
            .map(|m| Unitary::new(m.to_matrix()?))
            .collect::<Result<Vec<_>>>()?;
        Homomorphism::new(
            self.source.to_algebra()?,
            self.target.to_algebra()?,
            self.multiplicity_matrix.clone(),
            conjugators,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceJson {
    pub points: Vec<String>,
    pub dist: Vec<Vec<f64>>,
}

impl SpaceJson {
    pub fn from_space(space: &FiniteMetricSpace) -> Self {
        let n = space.len();
        SpaceJson {
            points: space.points().to_vec(),
            dist: (0..n)
                .map(|i| (0..n).map(|j| space.dist(i, j)).collect())
                .collect(),
        }
    }

    pub fn to_space(&self) -> Result<FiniteMetricSpace> {
        FiniteMetricSpace::new(self.points.clone(), &self.dist)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureJson {
    pub weights: Vec<f64>,
}

impl MeasureJson {
    pub fn from_measure(mu: &Measure) -> Self {
        MeasureJson { weights: mu.weights().to_vec() }
    }

    pub fn to_measure(&self, space: &FiniteMetricSpace) -> Result<Measure> {
        Measure::new(space, self.weights.clone())
    }
}
