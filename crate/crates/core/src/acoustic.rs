//! Integrated acoustic phase velocities along closed geodesics of the
//! character torus, and the integrated acoustic spectrum.
//!
//! A geodesic with deck vector lambda is parametrized as t -> t lambda on
//! [0, 1] and integrated against dt. Since s_i(t lambda)^2 = t^2 s_i(lambda)^2,
//! the integral is tr(A_lambda) / 3.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::bloch::{a_chi, acoustic_speeds_sq, ForceModel};
use crate::error::{Result, XtalError};
use crate::lattice::{primitive_geodesics, Geodesic, Lattice};
use crate::linalg;
use crate::spectrum::{SpectrumKind, SpectrumSet};

/// Default Simpson sample count for the quadrature route.
pub const DEFAULT_SAMPLES: usize = 101;

#[derive(Debug, Clone, PartialEq)]
pub struct AspEntry {
    pub geodesic: Geodesic,
    pub value_quadrature: f64,
    pub value_closed_form: f64,
}

impl AspEntry {
    pub fn relative_gap(&self) -> f64 {
        let scale = self.value_closed_form.abs().max(f64::MIN_POSITIVE);
        (self.value_quadrature - self.value_closed_form).abs() / scale
    }
}

fn check_geodesic(geo: &Geodesic) -> Result<()> {
    if geo.deck_vector.iter().all(|&k| k == 0) {
        return Err(XtalError::Domain("geodesic has a zero deck vector".into()));
    }
    Ok(())
}

/// Composite Simpson integration of t -> Sum_i s_i(t lambda)^2 over [0, 1],
/// the speeds coming from the eigensolver at each node.
pub fn integrated_velocity(fm: &ForceModel, geo: &Geodesic, samples: usize) -> Result<f64> {
    check_geodesic(geo)?;
    if samples < 3 || samples.is_multiple_of(2) {
        return Err(XtalError::input(
            "samples",
            format!("Simpson's rule needs an odd sample count >= 3, got {samples}"),
        ));
    }
    let intervals = samples - 1;
    let h = 1.0 / intervals as f64;
    let mut acc = 0.0;
    for k in 0..samples {
        let t = k as f64 * h;
        let f: f64 = acoustic_speeds_sq(fm, &(&geo.vector * t))?.iter().sum();
        let w = if k == 0 || k == intervals {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * f;
    }
    Ok(acc * h / 3.0)
}

/// tr(A_lambda) / 3 = (2 pi^2 / (3 m(V0))) Sum_e (lambda . v(e))^2 tr A(e).
pub fn integrated_velocity_closed_form(fm: &ForceModel, geo: &Geodesic) -> Result<f64> {
    check_geodesic(geo)?;
    Ok(a_chi(fm, &geo.vector)?.trace() / 3.0)
}

/// Symmetric matrix G of the quadratic form lambda -> tr(A_lambda) / 3.
pub fn closed_form_matrix(fm: &ForceModel) -> DMatrix<f64> {
    let n = fm.dim();
    let mut g = DMatrix::<f64>::zeros(n, n);
    for (e, v) in fm.realization().edge_vectors.iter().enumerate() {
        g += v * v.transpose() * fm.force(e).trace();
    }
    g * (2.0 * PI * PI / (3.0 * fm.cell_mass()))
}

/// Sum_e (lambda . v(e))^2 over geometric edges.
pub fn edge_projection_sum(fm: &ForceModel, lambda: &DVector<f64>) -> f64 {
    fm.realization()
        .edge_vectors
        .iter()
        .map(|v| lambda.dot(v).powi(2))
        .sum()
}

/// How geodesics are indexed when building the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Indexing {
    /// Primitive deck vectors, one per ± pair.
    PrimitiveOnly,
    /// Every nonzero vector of L*, ± counted separately.
    FullLattice,
}

/// Geodesics of the character torus with |lambda| <= radius.
pub fn geodesics(dual: &Lattice, radius: f64, indexing: Indexing) -> Result<Vec<Geodesic>> {
    match indexing {
        Indexing::PrimitiveOnly => primitive_geodesics(dual, radius),
        Indexing::FullLattice => Ok(dual
            .enumerate(radius)?
            .iter()
            .map(Geodesic::from_lattice_vector)
            .collect()),
    }
}

/// Per-geodesic values by both routes. `samples = None` skips quadrature
/// and copies the closed form into `value_quadrature`.
pub fn asp_entries(
    fm: &ForceModel,
    dual: &Lattice,
    radius: f64,
    indexing: Indexing,
    samples: Option<usize>,
) -> Result<Vec<AspEntry>> {
    if dual.dim() != fm.dim() {
        return Err(XtalError::DimensionMismatch {
            expected: fm.dim(),
            got: dual.dim(),
        });
    }
    geodesics(dual, radius, indexing)?
        .into_par_iter()
        .map(|geodesic| {
            let value_closed_form = integrated_velocity_closed_form(fm, &geodesic)?;
            let value_quadrature = match samples {
                Some(s) => integrated_velocity(fm, &geodesic, s)?,
                None => value_closed_form,
            };
            Ok(AspEntry {
                geodesic,
                value_quadrature,
                value_closed_form,
            })
        })
        .collect()
}

/// Closed-form integrated acoustic spectrum over geodesics with
/// |lambda| <= radius. Values below `q_min * radius^2` are complete, where
/// q_min is the smallest eigenvalue of [`closed_form_matrix`].
pub fn acoustic_spectrum(fm: &ForceModel, dual: &Lattice, radius: f64, indexing: Indexing) -> Result<SpectrumSet> {
    let entries = asp_entries(fm, dual, radius, indexing, None)?;
    Ok(spectrum_from_entries(fm, radius, &entries))
}

pub fn spectrum_from_entries(fm: &ForceModel, radius: f64, entries: &[AspEntry]) -> SpectrumSet {
    let q_min = linalg::symmetric_eigenvalues(&closed_form_matrix(fm))
        .map(|ev| ev[0].max(0.0))
        .unwrap_or(0.0);
    SpectrumSet::from_values(
        SpectrumKind::Acoustic,
        q_min * radius * radius,
        entries.iter().map(|e| e.value_closed_form),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationReport {
    /// Per edge index: |tr A(e) - target| / target.
    pub per_edge: Vec<f64>,
    pub max_deviation: f64,
    /// 3 m(V0) / (2 pi^2).
    pub target_trace: f64,
}

/// Deviation of each tr A(e) from 3 m(V0) / (2 pi^2).
pub fn normalization_check(fm: &ForceModel) -> NormalizationReport {
    let target_trace = 3.0 * fm.cell_mass() / (2.0 * PI * PI);
    let per_edge: Vec<f64> = fm
        .forces()
        .iter()
        .map(|a| (a.trace() - target_trace).abs() / target_trace)
        .collect();
    let max_deviation = per_edge.iter().copied().fold(0.0, f64::max);
    NormalizationReport {
        per_edge,
        max_deviation,
        target_trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::ForceDefault;
    use crate::graph::{maximal_abelian_voltages, FiniteGraph};
    use crate::realization::standard_realization;

    fn model(vertices: &[(u32, f64)], edges: &[(u32, u32, u32)], forces: Vec<Option<DMatrix<f64>>>) -> ForceModel {
        let g = FiniteGraph::new(vertices, edges).unwrap();
        let va = maximal_abelian_voltages(&g).unwrap();
        let r = standard_realization(&g, &va).unwrap();
        ForceModel::new(g, va, r, forces, ForceDefault::Normalized).unwrap()
    }

    fn square() -> ForceModel {
        model(&[(0, 1.0)], &[(0, 0, 0), (1, 0, 0)], vec![None, None])
    }

    fn geo(fm: &ForceModel, coeffs: &[i64]) -> Geodesic {
        let dual = fm.realization().dual_period_lattice().unwrap();
        let vector = dual.point(coeffs);
        Geodesic {
            deck_vector: coeffs.to_vec(),
            length: vector.norm(),
            vector,
            primitive: crate::lattice::gcd_all(coeffs) == 1,
        }
    }

    #[test]
    fn square_integrals() {
        let fm = square();
        let g = geo(&fm, &[1, 0]);
        let q = integrated_velocity(&fm, &g, 101).unwrap();
        assert!((q - 1.0).abs() < 1e-10);
        assert!((integrated_velocity_closed_form(&fm, &g).unwrap() - 1.0).abs() < 1e-14);
        let g = geo(&fm, &[1, 1]);
        assert!((integrated_velocity(&fm, &g, 101).unwrap() - 2.0).abs() < 1e-10);
        let coarse = integrated_velocity(&fm, &g, 3).unwrap();
        let fine = integrated_velocity(&fm, &g, 5).unwrap();
        assert!((coarse - fine).abs() < 1e-12);
    }

    #[test]
    fn bad_arguments() {
        let fm = square();
        let g = geo(&fm, &[1, 0]);
        assert!(integrated_velocity(&fm, &g, 4).is_err());
        assert!(integrated_velocity(&fm, &g, 1).is_err());
        let zero = geo(&fm, &[0, 0]);
        assert!(integrated_velocity_closed_form(&fm, &zero).is_err());
    }

    #[test]
    fn honeycomb_closed_form_is_squared_length() {
        let fm = model(&[(0, 1.0), (1, 1.0)], &[(0, 0, 1), (1, 0, 1), (2, 0, 1)], vec![None; 3]);
        for c in [[1, 0], [2, -1], [3, 5]] {
            let g = geo(&fm, &c);
            let v = integrated_velocity_closed_form(&fm, &g).unwrap();
            assert!((v - g.length * g.length).abs() < 1e-12 * v);
        }
    }

    #[test]
    fn square_spectrum() {
        let fm = square();
        let dual = fm.realization().dual_period_lattice().unwrap();
        let full = acoustic_spectrum(&fm, &dual, 2.3, Indexing::FullLattice).unwrap();
        let expect = [(1.0, 4), (2.0, 4), (4.0, 4), (5.0, 8)];
        assert_eq!(full.len(), 4);
        for ((v, k), (ev, ek)) in full.entries.iter().zip(expect) {
            assert!((v - ev).abs() < 1e-12 && *k == ek, "{v} {k}");
        }
        assert!((full.cutoff - 2.3 * 2.3).abs() < 1e-12);

        let prim = acoustic_spectrum(&fm, &dual, 2.3, Indexing::PrimitiveOnly).unwrap();
        let mult: Vec<u64> = prim.entries.iter().map(|e| e.1).collect();
        assert_eq!(mult, vec![2, 2, 4]);

        assert!(acoustic_spectrum(&fm, &dual, 0.5, Indexing::FullLattice)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn normalization() {
        assert_eq!(normalization_check(&square()).max_deviation, 0.0);

        let a = DMatrix::<f64>::identity(2, 2) * 2.0;
        let fm = model(&[(0, 1.0)], &[(0, 0, 0), (1, 0, 0)], vec![Some(a.clone()), Some(a)]);
        let expect = (4.0 * 2.0 * PI * PI / 3.0 - 1.0).abs();
        assert!((normalization_check(&fm).max_deviation - expect).abs() < 1e-12);

        // A(e) = I_3 on a three-loop bouquet of mass 2 pi^2: tr A = 3 = target
        let g = FiniteGraph::new(&[(0, 2.0 * PI * PI)], &[(0, 0, 0), (1, 0, 0), (2, 0, 0)]).unwrap();
        let va = maximal_abelian_voltages(&g).unwrap();
        let r = standard_realization(&g, &va).unwrap();
        let fm = ForceModel::with_default(g, va, r, ForceDefault::Identity).unwrap();
        assert!(normalization_check(&fm).max_deviation < 1e-15);
    }
}
