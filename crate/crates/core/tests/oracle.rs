//! Library results against independent brute-force computations on random
//! small graphs and lattices.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use xtal::acoustic::{edge_projection_sum, integrated_velocity_closed_form};
use xtal::bloch::{dynamical_matrix, ForceDefault, ForceModel};
use xtal::graph::{maximal_abelian_voltages, FiniteGraph};
use xtal::lattice::{Geodesic, Lattice};
use xtal::realization::{equivariance_defect, laplacian_residual, orthogonality_constant, standard_realization};
use xtal::theta_inverse::theta_check;

/// Connected multigraph: a random tree on `n` vertices plus `extra` random
/// edges (loops allowed), so the first Betti number is `extra`.
fn graph_strategy() -> impl Strategy<Value = (usize, Vec<(u32, u32)>)> {
    (1usize..=4, 1usize..=3).prop_flat_map(|(n, extra)| {
        let tree = proptest::collection::vec(any::<prop::sample::Index>(), n - 1);
        let more = proptest::collection::vec((0..n as u32, 0..n as u32), extra);
        (Just(n), tree, more).prop_map(|(n, tree, more)| {
            let mut edges: Vec<(u32, u32)> = tree
                .iter()
                .enumerate()
                .map(|(i, ix)| (ix.index(i + 1) as u32, i as u32 + 1))
                .collect();
            edges.extend(more);
            (n, edges)
        })
    })
}

fn build(n: usize, edges: &[(u32, u32)]) -> FiniteGraph {
    let vs: Vec<(u32, f64)> = (0..n as u32).map(|i| (i, 1.0 + i as f64)).collect();
    let es: Vec<(u32, u32, u32)> = edges.iter().enumerate().map(|(i, &(t, h))| (i as u32, t, h)).collect();
    FiniteGraph::new(&vs, &es).unwrap()
}

/// Orthogonal projection of R^E onto ker(incidence), via the pseudo-inverse.
fn cycle_projection(g: &FiniteGraph) -> DMatrix<f64> {
    let m = g.edge_count();
    let mut d = DMatrix::<f64>::zeros(g.vertex_count(), m);
    for (e, edge) in g.edges().iter().enumerate() {
        d[(edge.head, e)] += 1.0;
        d[(edge.tail, e)] -= 1.0;
    }
    let pinv = d.clone().pseudo_inverse(1e-12).unwrap();
    DMatrix::identity(m, m) - pinv * d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_gram_is_cycle_projection((n, edges) in graph_strategy()) {
        let g = build(n, &edges);
        let va = maximal_abelian_voltages(&g).unwrap();
        let r = standard_realization(&g, &va).unwrap();
        let m = g.edge_count();
        let gram = DMatrix::from_fn(m, m, |i, j| r.edge_vectors[i].dot(&r.edge_vectors[j]));
        let p = cycle_projection(&g);
        prop_assert!((gram - p).abs().max() < 1e-10);
    }

    #[test]
    fn realization_is_harmonic_and_equivariant((n, edges) in graph_strategy()) {
        let g = build(n, &edges);
        let va = maximal_abelian_voltages(&g).unwrap();
        let r = standard_realization(&g, &va).unwrap();
        prop_assert!(laplacian_residual(&g, &r).max_norm < 1e-10);
        let o = orthogonality_constant(&r);
        prop_assert!((o.constant - 1.0).abs() < 1e-10 && o.deviation < 1e-10);
        prop_assert!(equivariance_defect(&g, &va, &r) < 1e-10);
    }

    #[test]
    fn normalized_asp_is_edge_projection_sum((n, edges) in graph_strategy(), seed in proptest::collection::vec(-3i64..=3, 3)) {
        let g = build(n, &edges);
        let va = maximal_abelian_voltages(&g).unwrap();
        let r = standard_realization(&g, &va).unwrap();
        let dim = r.dim;
        let dual = r.dual_period_lattice().unwrap();
        let coeffs: Vec<i64> = seed.iter().copied().cycle().take(dim).collect();
        prop_assume!(coeffs.iter().any(|&c| c != 0));
        let fm = ForceModel::with_default(g, va, r, ForceDefault::Normalized).unwrap();
        let vector = dual.point(&coeffs);
        let geo = Geodesic { deck_vector: coeffs.clone(), length: vector.norm(), vector: vector.clone(), primitive: false };
        let a = integrated_velocity_closed_form(&fm, &geo).unwrap();
        let s = edge_projection_sum(&fm, &vector);
        prop_assert!((a - s).abs() <= 1e-10 * s);
        prop_assert!((s - vector.norm_squared()).abs() <= 1e-10 * s);
    }

    #[test]
    fn dynamical_matrix_is_deck_periodic((n, edges) in graph_strategy(), x in -1.0f64..1.0, shift in -2i64..=2) {
        let g = build(n, &edges);
        let va = maximal_abelian_voltages(&g).unwrap();
        let r = standard_realization(&g, &va).unwrap();
        let dim = r.dim;
        let dual = r.dual_period_lattice().unwrap();
        let fm = ForceModel::with_default(g, va, r, ForceDefault::Identity).unwrap();
        let chi = DVector::from_element(dim, x);
        let mut coeffs = vec![0; dim];
        coeffs[0] = shift;
        let moved = &chi + dual.point(&coeffs);
        let d0 = dynamical_matrix(&fm, &chi).unwrap();
        let d1 = dynamical_matrix(&fm, &moved).unwrap();
        prop_assert!((d0 - d1).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-9);
    }

    #[test]
    fn poisson_identity_on_random_lattices(a in 0.5f64..2.0, b in -0.5f64..0.5, c in 0.5f64..2.0, t in 0.05f64..1.0) {
        let l = Lattice::from_generators(&[vec![a, 0.0], vec![b, c]]).unwrap();
        let r = theta_check(&l, t, 1e-12).unwrap();
        prop_assert!(r.relative_error <= 1e-8, "{r:?}");
    }
}
