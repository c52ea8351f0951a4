//! File formats: crystal descriptions, realizations and CSV tables.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bloch::{ForceDefault, ForceModel};
use crate::error::{Result, XtalError};
use crate::graph::{maximal_abelian_voltages, FiniteGraph, VoltageAssignment};
use crate::linalg;
use crate::realization::{standard_realization, Realization};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub id: u32,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub id: u32,
    pub tail: u32,
    pub head: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub voltage: Option<Vec<i64>>,
    /// Rows of the n x n force constant matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub force: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForceDefaultName {
    #[default]
    Normalized,
    Identity,
}

impl From<ForceDefaultName> for ForceDefault {
    fn from(n: ForceDefaultName) -> Self {
        match n {
            ForceDefaultName::Normalized => ForceDefault::Normalized,
            ForceDefaultName::Identity => ForceDefault::Identity,
        }
    }
}

/// On-disk crystal description. Voltages are given on every edge or on
/// none; without them the maximal abelian cover is used and `dim` must be
/// the first Betti number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalFile {
    pub name: String,
    pub dim: usize,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default)]
    pub force_default: ForceDefaultName,
}

fn parse_error(e: serde_json::Error) -> XtalError {
    XtalError::input(format!("line {} column {}", e.line(), e.column()), e.to_string())
}

impl CrystalFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(parse_error)
    }

    pub fn read(path: &Path) -> Result<Self> {
        CrystalFile::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("crystal serializes");
        s.push('\n');
        s
    }

    pub fn build(&self) -> Result<Crystal> {
        let vertices: Vec<(u32, f64)> = self.vertices.iter().map(|v| (v.id, v.mass)).collect();
        let edges: Vec<(u32, u32, u32)> = self.edges.iter().map(|e| (e.id, e.tail, e.head)).collect();
        let graph = FiniteGraph::new(&vertices, &edges)?;

        // records re-indexed into the graph's edge order
        let mut ordered: Vec<&EdgeRecord> = self.edges.iter().collect();
        ordered.sort_by_key(|e| graph.edge_index(e.id).expect("edge was accepted"));

        let with_voltage = ordered.iter().filter(|e| e.voltage.is_some()).count();
        let voltages = if with_voltage == 0 {
            let va = maximal_abelian_voltages(&graph)?;
            if va.dim() != self.dim {
                return Err(XtalError::input(
                    "dim",
                    format!(
                        "without voltages dim must equal the first Betti number {}, got {}",
                        va.dim(),
                        self.dim
                    ),
                ));
            }
            va
        } else if with_voltage == ordered.len() {
            let vs = ordered.iter().map(|e| e.voltage.clone().expect("present")).collect();
            VoltageAssignment::new(&graph, self.dim, vs)?
        } else {
            let missing = ordered.iter().find(|e| e.voltage.is_none()).expect("some missing");
            return Err(XtalError::input(
                format!("edges[id={}].voltage", missing.id),
                "voltages must be given on all edges or on none",
            ));
        };

        let realization = standard_realization(&graph, &voltages)?;
        let forces = ordered
            .iter()
            .map(|e| {
                e.force
                    .as_ref()
                    .map(|rows| linalg::from_rows(rows, &format!("edges[id={}].force", e.id)))
                    .transpose()
            })
            .collect::<Result<Vec<_>>>()?;
        let model = ForceModel::new(graph, voltages, realization, forces, self.force_default.into())?;
        Ok(Crystal {
            name: self.name.clone(),
            model,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Crystal {
    pub name: String,
    pub model: ForceModel,
}

impl Crystal {
    pub fn from_json(text: &str) -> Result<Self> {
        CrystalFile::from_json(text)?.build()
    }

    pub fn read(path: &Path) -> Result<Self> {
        CrystalFile::read(path)?.build()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositionRecord {
    pub vertex: u32,
    pub position: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeVectorRecord {
    pub edge: u32,
    pub vector: Vec<f64>,
}

/// Serialized realization; `period_basis` lists rows, its columns are the
/// periods of the deck generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealizationFile {
    pub dim: usize,
    pub period_basis: Vec<Vec<f64>>,
    pub positions: Vec<PositionRecord>,
    pub edge_vectors: Vec<EdgeVectorRecord>,
    pub ortho_constant: f64,
}

impl RealizationFile {
    pub fn new(g: &FiniteGraph, r: &Realization) -> Self {
        // + 0.0 turns -0.0 into 0.0
        let vec = |v: &DVector<f64>| v.iter().map(|x| x + 0.0).collect::<Vec<f64>>();
        RealizationFile {
            dim: r.dim,
            period_basis: linalg::to_rows(&r.period_basis.map(|x| x + 0.0)),
            positions: g
                .vertices()
                .iter()
                .zip(&r.positions)
                .map(|(v, p)| PositionRecord {
                    vertex: v.id,
                    position: vec(p),
                })
                .collect(),
            edge_vectors: g
                .edges()
                .iter()
                .zip(&r.edge_vectors)
                .map(|(e, v)| EdgeVectorRecord {
                    edge: e.id,
                    vector: vec(v),
                })
                .collect(),
            ortho_constant: r.ortho_constant,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: RealizationFile = serde_json::from_str(text).map_err(parse_error)?;
        f.validate()?;
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("realization serializes");
        s.push('\n');
        s
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim;
        let b = linalg::from_rows(&self.period_basis, "period_basis")?;
        if b.shape() != (n, n) {
            return Err(XtalError::input("period_basis", format!("expected {n}x{n}")));
        }
        for (i, p) in self.positions.iter().enumerate() {
            if p.position.len() != n {
                return Err(XtalError::input(
                    format!("positions[{i}]"),
                    format!("expected {n} components"),
                ));
            }
        }
        for (i, v) in self.edge_vectors.iter().enumerate() {
            if v.vector.len() != n {
                return Err(XtalError::input(
                    format!("edge_vectors[{i}]"),
                    format!("expected {n} components"),
                ));
            }
        }
        Ok(())
    }

    /// Rebuilds a [`Realization`] indexed like `g`.
    pub fn to_realization(&self, g: &FiniteGraph) -> Result<Realization> {
        let n = self.dim;
        let mut positions = vec![None; g.vertex_count()];
        for p in &self.positions {
            let x = g
                .vertex_index(p.vertex)
                .ok_or_else(|| XtalError::input(format!("positions[vertex={}]", p.vertex), "unknown vertex"))?;
            positions[x] = Some(DVector::from_column_slice(&p.position));
        }
        let mut edge_vectors = vec![None; g.edge_count()];
        for v in &self.edge_vectors {
            let e = g
                .edge_index(v.edge)
                .ok_or_else(|| XtalError::input(format!("edge_vectors[edge={}]", v.edge), "unknown edge"))?;
            edge_vectors[e] = Some(DVector::from_column_slice(&v.vector));
        }
        let positions = positions
            .into_iter()
            .enumerate()
            .map(|(x, p)| {
                p.ok_or_else(|| XtalError::input("positions", format!("missing vertex {}", g.vertices()[x].id)))
            })
            .collect::<Result<Vec<_>>>()?;
        let edge_vectors = edge_vectors
            .into_iter()
            .enumerate()
            .map(|(e, v)| {
                v.ok_or_else(|| XtalError::input("edge_vectors", format!("missing edge {}", g.edges()[e].id)))
            })
            .collect::<Result<Vec<_>>>()?;
        let period_basis: DMatrix<f64> = linalg::from_rows(&self.period_basis, "period_basis")?;
        if period_basis.nrows() != n {
            return Err(XtalError::DimensionMismatch {
                expected: n,
                got: period_basis.nrows(),
            });
        }
        Ok(Realization {
            dim: n,
            edge_vectors,
            positions,
            period_basis,
            ortho_constant: self.ortho_constant,
        })
    }
}

/// Shortest round-trip representation of a float.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

/// Comma separated table with a header row.
pub fn csv(header: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
