//! JSON fixture schemas, canonical serialization and atomic writes.
//!
//! Canonical form is `serde_json` pretty printing with a trailing newline.
//! Floats are written in the shortest representation that parses back to the
//! same `f64`, so parse followed by serialize reproduces a canonical file byte
//! for byte.

use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{FiniteFrame, ObliqueDualPair};
use crate::linalg::{Matrix, Subspace, Tolerance, Vector};
use crate::measure::DiscreteMeasure;
use crate::transport::Coupling;

/// A subspace given by spanning vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceFile {
    pub ambient_dim: usize,
    pub span: Vec<Vec<f64>>,
}

/// Frame vectors together with the subspace they are meant to span. Without
/// `subspace` the frame spans its own linear hull.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameFile {
    pub ambient_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace: Option<Vec<Vec<f64>>>,
    pub vectors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFile {
    pub synthesis: FrameFile,
    pub analysis: FrameFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

/// Bare list of vectors, used for dual-family parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorsFile {
    pub vectors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    pub ambient_dim: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

/// Pairs are `[x, y, weight]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingFile {
    pub pairs: Vec<(Vec<f64>, Vec<f64>, f64)>,
}

pub fn to_vec(x: &Vector) -> Vec<f64> {
    x.iter().copied().collect()
}

pub fn matrix_rows(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn vectors_from(rows: &[Vec<f64>], n: usize, what: &str) -> Result<Vec<Vector>> {
    rows.iter()
        .enumerate()
        .map(|(k, r)| {
            if r.len() == n {
                Ok(Vector::from_column_slice(r))
            } else {
                Err(Error::Parse(format!("{what}[{k}] has {} entries, ambient_dim is {n}", r.len())))
            }
        })
        .collect()
}

impl SubspaceFile {
    pub fn from_subspace(s: &Subspace) -> Self {
        Self { ambient_dim: s.ambient_dim(), span: s.basis().column_iter().map(|c| c.iter().copied().collect()).collect() }
    }

    pub fn to_subspace(&self, tol: &Tolerance) -> Result<Subspace> {
        if self.span.is_empty() {
            return Err(Error::Parse("span must list at least one vector".into()));
        }
        Subspace::span(&vectors_from(&self.span, self.ambient_dim, "span")?, tol)
    }
}

impl FrameFile {
    pub fn from_frame(f: &FiniteFrame) -> Self {
        Self {
            ambient_dim: f.ambient_dim(),
            subspace: Some(SubspaceFile::from_subspace(f.subspace()).span),
            vectors: f.vectors().iter().map(to_vec).collect(),
        }
    }

    pub fn to_frame(&self, tol: &Tolerance) -> Result<FiniteFrame> {
        let vectors = vectors_from(&self.vectors, self.ambient_dim, "vectors")?;
        match &self.subspace {
            Some(span) => {
                let w = SubspaceFile { ambient_dim: self.ambient_dim, span: span.clone() }.to_subspace(tol)?;
                FiniteFrame::new(vectors, w, tol)
            }
            None => FiniteFrame::spanning(vectors, tol),
        }
    }
}

impl PairFile {
    pub fn from_pair(p: &ObliqueDualPair) -> Self {
        Self {
            synthesis: FrameFile::from_frame(&p.synthesis),
            analysis: FrameFile::from_frame(&p.analysis),
            residual: Some(p.residual),
        }
    }

    pub fn to_pair(&self, tol: &Tolerance) -> Result<ObliqueDualPair> {
        ObliqueDualPair::new(self.synthesis.to_frame(tol)?, self.analysis.to_frame(tol)?, tol)
    }
}

impl MeasureFile {
    pub fn from_measure(mu: &DiscreteMeasure) -> Self {
        Self { ambient_dim: mu.ambient_dim(), points: mu.points().iter().map(to_vec).collect(), weights: mu.weights().to_vec() }
    }

    pub fn to_measure(&self) -> Result<DiscreteMeasure> {
        let points = vectors_from(&self.points, self.ambient_dim, "points")?;
        DiscreteMeasure::new(points, self.weights.clone()).map_err(|e| match e {
            Error::InvalidMeasure(m) => Error::Parse(format!("invalid measure: {m}")),
            other => other,
        })
    }
}

impl CouplingFile {
    pub fn from_coupling(g: &Coupling) -> Self {
        Self { pairs: g.pairs().iter().map(|(x, y, w)| (to_vec(x), to_vec(y), *w)).collect() }
    }

    pub fn to_coupling(&self) -> Result<Coupling> {
        let pairs = self
            .pairs
            .iter()
            .map(|(x, y, w)| (Vector::from_column_slice(x), Vector::from_column_slice(y), *w))
            .collect();
        Coupling::new(pairs).map_err(|e| match e {
            Error::InvalidMeasure(m) => Error::Parse(format!("invalid coupling: {m}")),
            other => other,
        })
    }
}

/// Parses a JSON document; errors carry the serde diagnostic (field name, line, column).
pub fn parse_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_fixture<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_str(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn read_measure(path: &Path) -> Result<DiscreteMeasure> {
    parse_fixture::<MeasureFile>(path)?.to_measure().map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn read_coupling(path: &Path) -> Result<Coupling> {
    parse_fixture::<CouplingFile>(path)?.to_coupling()
}

pub fn read_subspace(path: &Path, tol: &Tolerance) -> Result<Subspace> {
    parse_fixture::<SubspaceFile>(path)?.to_subspace(tol)
}

pub fn read_frame(path: &Path, tol: &Tolerance) -> Result<FiniteFrame> {
    parse_fixture::<FrameFile>(path)?.to_frame(tol)
}

pub fn read_pair(path: &Path, tol: &Tolerance) -> Result<ObliqueDualPair> {
    parse_fixture::<PairFile>(path)?.to_pair(tol)
}

/// Canonical pretty JSON with a trailing newline.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes `contents` through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}
