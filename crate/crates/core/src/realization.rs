//! Standard (harmonic) periodic realizations.
//!
//! The 1-chain space R^E carries the inner product in which edges are
//! orthonormal. For a cover with voltage map mu, let W be the span of the
//! orthogonal projections onto the cycle space Z of the n coordinate
//! functionals e -> voltage(e)_k. W is the orthogonal complement, inside Z,
//! of the real span of the kernel H. The edge vector v(e) is the coordinate
//! vector of the projection of e onto W in an orthonormal basis of W.
//!
//! This gives Sum_e v(e) v(e)^T = I over geometric edges, and every
//! coboundary is orthogonal to Z, so the realization is harmonic.

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, XtalError};
use crate::graph::{cycle_basis, FiniteGraph, OrientedEdge, VoltageAssignment};
use crate::lattice::Lattice;
use crate::linalg;

/// Singular values of the projected voltage functionals below this mean
/// the crystal is degenerate.
pub const RANK_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub dim: usize,
    /// v(e) for the reference orientation of each geometric edge.
    pub edge_vectors: Vec<DVector<f64>>,
    /// Fundamental-domain positions; the lowest-id vertex sits at the origin.
    pub positions: Vec<DVector<f64>>,
    /// Columns are the images of the standard generators of Z^n.
    pub period_basis: DMatrix<f64>,
    pub ortho_constant: f64,
}

impl Realization {
    pub fn edge_vector(&self, oe: OrientedEdge) -> DVector<f64> {
        let v = &self.edge_vectors[oe.edge];
        if oe.reversed {
            -v
        } else {
            v.clone()
        }
    }

    /// Period map applied to an integer vector.
    pub fn period(&self, deck: &[i64]) -> DVector<f64> {
        let d = DVector::from_iterator(deck.len(), deck.iter().map(|&k| k as f64));
        &self.period_basis * d
    }

    pub fn period_lattice(&self) -> Result<Lattice> {
        Lattice::new(self.period_basis.clone())
    }

    /// Lattice L* dual to the period lattice; its points index the
    /// characters of the deck group.
    pub fn dual_period_lattice(&self) -> Result<Lattice> {
        Ok(self.period_lattice()?.dual())
    }
}

pub fn standard_realization(g: &FiniteGraph, va: &VoltageAssignment) -> Result<Realization> {
    let n = va.dim();
    let m = g.edge_count();
    let basis = cycle_basis(g)?;
    va.check_spanning(&basis)?;

    let cycles = DMatrix::from_fn(m, basis.len(), |e, j| basis.cycles[j][e] as f64);
    let (z_basis, _) = linalg::gram_schmidt(&cycles);

    let functionals = DMatrix::from_fn(m, n, |e, k| va.of_edge(e)[k] as f64);
    let projected = &z_basis * (z_basis.transpose() * &functionals);
    let smallest = linalg::singular_values(&projected)[0];
    if smallest < RANK_THRESHOLD {
        return Err(XtalError::Degenerate(format!(
            "projected cycle space has numerical rank < {n} (smallest singular value {smallest:e})"
        )));
    }

    // projected = q r. For a cycle z, q^T z = r^{-T} (projected^T z) = r^{-T} mu(z),
    // so the period map is r^{-T}.
    let (q, r) = linalg::gram_schmidt(&projected);
    let period_basis = r
        .transpose()
        .try_inverse()
        .ok_or_else(|| XtalError::Degenerate("period map is singular".into()))?;

    let edge_vectors: Vec<DVector<f64>> = (0..m).map(|e| q.row(e).transpose().into_owned()).collect();

    let mut positions = vec![DVector::<f64>::zeros(n); g.vertex_count()];
    for &x in basis.tree.order.iter().skip(1) {
        let oe = basis.tree.parent[x].expect("non-root vertex has a parent");
        let from = g.origin(oe);
        let v = if oe.reversed {
            -&edge_vectors[oe.edge]
        } else {
            edge_vectors[oe.edge].clone()
        };
        let shift = {
            let volt = va.voltage(oe);
            let d = DVector::from_iterator(n, volt.iter().map(|&k| k as f64));
            &period_basis * d
        };
        positions[x] = &positions[from] + v - shift;
    }

    let mut realization = Realization {
        dim: n,
        edge_vectors,
        positions,
        period_basis,
        ortho_constant: 0.0,
    };
    realization.ortho_constant = orthogonality_constant(&realization).constant;
    Ok(realization)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub per_vertex: Vec<DVector<f64>>,
    pub max_norm: f64,
}

/// Discrete Laplacian of the realization at each vertex:
/// Sum over oriented edges leaving x of v(e).
pub fn laplacian_residual(g: &FiniteGraph, r: &Realization) -> Residual {
    let per_vertex: Vec<DVector<f64>> = (0..g.vertex_count())
        .map(|x| {
            g.outgoing(x)
                .into_iter()
                .fold(DVector::zeros(r.dim), |acc, oe| acc + r.edge_vector(oe))
        })
        .collect();
    let max_norm = per_vertex.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Residual { per_vertex, max_norm }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orthogonality {
    pub constant: f64,
    /// max |M - cI| entrywise.
    pub deviation: f64,
}

/// M = Sum over geometric edges of v v^T; c = tr M / n.
pub fn orthogonality_constant(r: &Realization) -> Orthogonality {
    let n = r.dim;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for v in &r.edge_vectors {
        m += v * v.transpose();
    }
    let constant = m.trace() / n as f64;
    let deviation = linalg::max_abs(&(m - DMatrix::identity(n, n) * constant));
    Orthogonality { constant, deviation }
}

/// Largest |pos(head) - pos(tail) + rho(voltage(e)) - v(e)| over edges.
pub fn equivariance_defect(g: &FiniteGraph, va: &VoltageAssignment, r: &Realization) -> f64 {
    (0..g.edge_count())
        .map(|e| {
            let edge = g.edges()[e];
            let lhs = &r.positions[edge.head] - &r.positions[edge.tail] + r.period(va.of_edge(e));
            (lhs - &r.edge_vectors[e]).norm()
        })
        .fold(0.0, f64::max)
}
