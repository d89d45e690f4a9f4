//! Instance files and atomic output.
//!
//! ```json
//! { "kind": "euclidean", "dim": 2, "clients": [[0,0],[1,0]], "facilities": [[0,1]],
//!   "k": 1, "r": 0.5, "z": 1.0 }
//! { "kind": "matrix", "clients": [0,1], "facilities": [2], "dist": [[...]], "k": 1, "r": 0.5 }
//! ```
//!
//! A Euclidean instance without `facilities` (or with an empty list) is continuous:
//! every point of `R^dim` is a candidate center.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Instance, MetricSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Euclidean,
    Matrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointList {
    Indices(Vec<usize>),
    Coords(Vec<Vec<f64>>),
}

fn default_z() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub clients: PointList,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facilities: Option<PointList>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<Vec<Vec<f64>>>,
    pub k: usize,
    pub r: f64,
    #[serde(default = "default_z")]
    pub z: f64,
    /// Triangle-inequality validation on load; defaults to on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check_triangle: Option<bool>,
}

impl InstanceFile {
    pub fn into_instance(&self) -> Result<Instance> {
        let space = match self.kind {
            Kind::Euclidean => {
                let dim = self.dim.ok_or_else(|| {
                    Error::InvalidInstance("euclidean instances need \"dim\"".into())
                })?;
                let clients = match &self.clients {
                    PointList::Coords(c) => c.as_slice(),
                    PointList::Indices(i) if i.is_empty() => &[],
                    PointList::Indices(_) => {
                        return Err(Error::InvalidInstance(
                            "euclidean clients must be coordinate arrays".into(),
                        ))
                    }
                };
                let facilities = match &self.facilities {
                    None => None,
                    Some(PointList::Indices(i)) if i.is_empty() => None,
                    Some(PointList::Coords(c)) if c.is_empty() => None,
                    Some(PointList::Coords(c)) => Some(c.as_slice()),
                    Some(PointList::Indices(_)) => {
                        return Err(Error::InvalidInstance(
                            "euclidean facilities must be coordinate arrays".into(),
                        ))
                    }
                };
                MetricSpace::euclidean(dim, clients, facilities)?
            }
            Kind::Matrix => {
                let dist = self.dist.as_ref().ok_or_else(|| {
                    Error::InvalidInstance("matrix instances need \"dist\"".into())
                })?;
                let rows = |list: Option<&PointList>, what: &str| match list {
                    Some(PointList::Indices(i)) => Ok(i.clone()),
                    Some(PointList::Coords(c)) if c.is_empty() => Ok(Vec::new()),
                    _ => Err(Error::InvalidInstance(format!(
                        "matrix {what} must be row indices"
                    ))),
                };
                MetricSpace::matrix(
                    dist,
                    rows(Some(&self.clients), "clients")?,
                    rows(self.facilities.as_ref(), "facilities")?,
                    self.check_triangle.unwrap_or(true),
                )?
            }
        };
        Instance::new(space, self.k, self.r, self.z)
    }

    pub fn from_instance(inst: &Instance) -> Self {
        let base = |kind| InstanceFile {
            kind,
            dim: None,
            clients: PointList::Indices(Vec::new()),
            facilities: None,
            dist: None,
            k: inst.k,
            r: inst.r,
            z: inst.z,
            check_triangle: None,
        };
        if let Some((dim, clients, facilities)) = inst.space.euclidean_parts() {
            InstanceFile {
                dim: Some(dim),
                clients: PointList::Coords(clients),
                facilities: facilities.map(PointList::Coords),
                ..base(Kind::Euclidean)
            }
        } else {
            let (dist, c, f) = inst.space.matrix_parts().expect("matrix backend");
            InstanceFile {
                clients: PointList::Indices(c),
                facilities: Some(PointList::Indices(f)),
                dist: Some(dist),
                ..base(Kind::Matrix)
            }
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    InstanceFile::load(path)?.into_instance()
}

/// Writes `bytes` to `path` through a temporary file in the same directory and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
