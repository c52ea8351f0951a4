//! Force models, the acoustic matrix A_chi and the Bloch fibers of the
//! elastic Laplacian.
//!
//! Edge sums over E0 run over geometric edges, one term each. The fiber
//! operator sums over oriented edges, so each geometric edge enters it
//! twice.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, XtalError};
use crate::graph::{FiniteGraph, VoltageAssignment};
use crate::linalg;
use crate::realization::Realization;

pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Eigenvalues of -D_chi below this count as zero modes.
pub const ZERO_MODE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForceDefault {
    /// A(e) = 3 m(V0) / (2 pi^2 n) I_n, so tr A(e) = 3 m(V0) / (2 pi^2).
    Normalized,
    Identity,
}

/// A realized crystal together with its per-edge force constants.
#[derive(Debug, Clone)]
pub struct ForceModel {
    graph: FiniteGraph,
    voltages: VoltageAssignment,
    realization: Realization,
    forces: Vec<DMatrix<f64>>,
    cell_mass: f64,
}

impl ForceModel {
    /// `forces[e]` overrides the default for edge index `e` when present.
    pub fn new(
        graph: FiniteGraph,
        voltages: VoltageAssignment,
        realization: Realization,
        forces: Vec<Option<DMatrix<f64>>>,
        default: ForceDefault,
    ) -> Result<Self> {
        let n = realization.dim;
        if voltages.dim() != n {
            return Err(XtalError::DimensionMismatch {
                expected: n,
                got: voltages.dim(),
            });
        }
        if forces.len() != graph.edge_count() {
            return Err(XtalError::input(
                "edges",
                format!("expected {} force entries, got {}", graph.edge_count(), forces.len()),
            ));
        }
        let cell_mass = graph.cell_mass();
        let fallback = match default {
            ForceDefault::Normalized => DMatrix::identity(n, n) * (3.0 * cell_mass / (2.0 * PI * PI * n as f64)),
            ForceDefault::Identity => DMatrix::identity(n, n),
        };
        let mut checked = Vec::with_capacity(forces.len());
        for (e, a) in forces.into_iter().enumerate() {
            let id = graph.edges()[e].id;
            let a = a.unwrap_or_else(|| fallback.clone());
            check_force(&a, n, &format!("edges[id={id}].force"))?;
            checked.push(a);
        }
        Ok(ForceModel {
            graph,
            voltages,
            realization,
            forces: checked,
            cell_mass,
        })
    }

    pub fn with_default(
        graph: FiniteGraph,
        voltages: VoltageAssignment,
        realization: Realization,
        default: ForceDefault,
    ) -> Result<Self> {
        let m = graph.edge_count();
        ForceModel::new(graph, voltages, realization, vec![None; m], default)
    }

    pub fn dim(&self) -> usize {
        self.realization.dim
    }

    pub fn graph(&self) -> &FiniteGraph {
        &self.graph
    }

    pub fn voltages(&self) -> &VoltageAssignment {
        &self.voltages
    }

    pub fn realization(&self) -> &Realization {
        &self.realization
    }

    pub fn force(&self, e: usize) -> &DMatrix<f64> {
        &self.forces[e]
    }

    pub fn forces(&self) -> &[DMatrix<f64>] {
        &self.forces
    }

    pub fn cell_mass(&self) -> f64 {
        self.cell_mass
    }

    /// Size of the fiber operator, n * |V0|.
    pub fn band_count(&self) -> usize {
        self.dim() * self.graph.vertex_count()
    }

    fn check_dim(&self, chi: &DVector<f64>) -> Result<()> {
        if chi.len() != self.dim() {
            return Err(XtalError::DimensionMismatch {
                expected: self.dim(),
                got: chi.len(),
            });
        }
        Ok(())
    }
}

fn check_force(a: &DMatrix<f64>, n: usize, field: &str) -> Result<()> {
    if a.shape() != (n, n) {
        return Err(XtalError::input(
            field,
            format!("expected a {n}x{n} matrix, got {}x{}", a.nrows(), a.ncols()),
        ));
    }
    let asym = linalg::max_abs(&(a - a.transpose()));
    if asym > SYMMETRY_TOLERANCE * linalg::max_abs(a).max(1.0) {
        return Err(XtalError::input(
            field,
            format!("matrix is not symmetric (defect {asym:e})"),
        ));
    }
    let smallest = linalg::symmetric_eigenvalues(a)?[0];
    if !(smallest > 0.0) {
        return Err(XtalError::input(
            field,
            format!("matrix is not positive definite (smallest eigenvalue {smallest:e})"),
        ));
    }
    Ok(())
}

/// A_chi = (2 pi^2 / m(V0)) Sum_e (chi . v(e))^2 A(e).
pub fn a_chi(fm: &ForceModel, chi: &DVector<f64>) -> Result<DMatrix<f64>> {
    fm.check_dim(chi)?;
    let n = fm.dim();
    let mut acc = DMatrix::<f64>::zeros(n, n);
    for (v, a) in fm.realization.edge_vectors.iter().zip(&fm.forces) {
        let p = chi.dot(v);
        acc += a * (p * p);
    }
    Ok(acc * (2.0 * PI * PI / fm.cell_mass))
}

/// s_i(chi)^2, ascending.
pub fn acoustic_speeds_sq(fm: &ForceModel, chi: &DVector<f64>) -> Result<Vec<f64>> {
    linalg::symmetric_eigenvalues(&a_chi(fm, chi)?)
}

/// s_i(chi), ascending. Tiny negative rounding is clamped to zero.
pub fn acoustic_speeds(fm: &ForceModel, chi: &DVector<f64>) -> Result<Vec<f64>> {
    Ok(acoustic_speeds_sq(fm, chi)?
        .into_iter()
        .map(|s| s.max(0.0).sqrt())
        .collect())
}

/// s_i(chi) / (2 pi |chi|).
pub fn phase_velocity(fm: &ForceModel, chi: &DVector<f64>) -> Result<Vec<f64>> {
    let norm = chi.norm();
    if norm == 0.0 {
        return Err(XtalError::Domain("phase velocity is undefined at chi = 0".into()));
    }
    Ok(acoustic_speeds(fm, chi)?
        .into_iter()
        .map(|s| s / (2.0 * PI * norm))
        .collect())
}

/// Mass-weighted fiber operator M^{-1/2} K_chi M^{-1/2} of -D at character
/// chi, of size n |V0|. Its spectrum is that of -D_chi.
///
/// K_chi has block rows Sum_{o(e)=x} A(e) (u(x) - phase(e) u(t(e))) with
/// phase(e) = exp(2 pi i chi . rho(voltage(e))), so the operator is exactly
/// periodic under chi -> chi + L*.
pub fn dynamical_matrix(fm: &ForceModel, chi: &DVector<f64>) -> Result<DMatrix<Complex64>> {
    fm.check_dim(chi)?;
    let g = &fm.graph;
    let n = fm.dim();
    let size = fm.band_count();
    let mut k = DMatrix::<Complex64>::zeros(size, size);
    for oe in g.oriented_edges() {
        let x = g.origin(oe);
        let y = g.terminus(oe);
        let a = &fm.forces[oe.edge];
        let shift = fm.realization.period(&fm.voltages.voltage(oe));
        let phase = Complex64::from_polar(1.0, 2.0 * PI * chi.dot(&shift));
        for i in 0..n {
            for j in 0..n {
                let aij = a[(i, j)];
                k[(x * n + i, x * n + j)] += aij;
                k[(x * n + i, y * n + j)] -= phase * aij;
            }
        }
    }
    let inv_sqrt_mass: Vec<f64> = (0..size).map(|r| 1.0 / g.mass(r / n).sqrt()).collect();
    for r in 0..size {
        for c in 0..size {
            k[(r, c)] *= inv_sqrt_mass[r] * inv_sqrt_mass[c];
        }
    }
    Ok(k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionPoint {
    pub chi: DVector<f64>,
    pub acoustic_speeds_sq: Vec<f64>,
    /// Ascending eigenvalues of -D_chi; empty when only the acoustic part
    /// was requested.
    pub band_freqs_sq: Vec<f64>,
}

pub fn dispersion(fm: &ForceModel, chi: &DVector<f64>) -> Result<DispersionPoint> {
    let band_freqs_sq = linalg::hermitian_eigenvalues(&dynamical_matrix(fm, chi)?)?;
    Ok(DispersionPoint {
        chi: chi.clone(),
        acoustic_speeds_sq: acoustic_speeds_sq(fm, chi)?,
        band_freqs_sq,
    })
}

/// Evenly spaced samples from `from` to `to` inclusive.
pub fn band_sweep(
    fm: &ForceModel,
    from: &DVector<f64>,
    to: &DVector<f64>,
    steps: usize,
    full: bool,
) -> Result<Vec<DispersionPoint>> {
    fm.check_dim(from)?;
    fm.check_dim(to)?;
    if steps < 2 {
        return Err(XtalError::input("steps", "need at least 2 sample points"));
    }
    (0..steps)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 / (steps - 1) as f64;
            let chi = from + (to - from) * t;
            if full {
                dispersion(fm, &chi)
            } else {
                Ok(DispersionPoint {
                    acoustic_speeds_sq: acoustic_speeds_sq(fm, &chi)?,
                    chi,
                    band_freqs_sq: Vec::new(),
                })
            }
        })
        .collect()
}

/// Ratios omega_i(t chi)^2 / (t^2 s_i(chi)^2) over the n acoustic branches.
pub fn acoustic_limit_ratios(fm: &ForceModel, chi: &DVector<f64>, t: f64) -> Result<Vec<f64>> {
    let speeds = acoustic_speeds_sq(fm, chi)?;
    let bands = linalg::hermitian_eigenvalues(&dynamical_matrix(fm, &(chi * t))?)?;
    Ok(bands.iter().zip(&speeds).map(|(w, s)| w / (t * t * s)).collect())
}

pub fn zero_mode_count(bands: &[f64]) -> usize {
    bands.iter().filter(|w| w.abs() < ZERO_MODE_TOLERANCE).count()
}
