//! Finite base graphs, their cycle spaces and the voltage data that defines
//! an abelian cover.
//!
//! Everything here is exact integer arithmetic. Edges are stored once, as
//! undirected geometric edges with a reference orientation (tail → head);
//! the two orientations of an edge are addressed through [`OrientedEdge`].

use std::collections::VecDeque;

use crate::error::{Result, XtalError};

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: u32,
    pub mass: f64,
}

/// Geometric edge. `tail` and `head` are vertex indices, not ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub id: u32,
    pub tail: usize,
    pub head: usize,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

/// One of the two orientations of a geometric edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrientedEdge {
    pub edge: usize,
    pub reversed: bool,
}

impl OrientedEdge {
    pub fn forward(edge: usize) -> Self {
        OrientedEdge { edge, reversed: false }
    }

    pub fn backward(edge: usize) -> Self {
        OrientedEdge { edge, reversed: true }
    }

    pub fn reverse(self) -> Self {
        OrientedEdge {
            edge: self.edge,
            reversed: !self.reversed,
        }
    }

    /// +1 for the reference orientation, -1 for its reversal.
    pub fn sign(self) -> i64 {
        if self.reversed {
            -1
        } else {
            1
        }
    }
}

/// The base graph X0: vertices with masses, undirected edges, connected.
///
/// Vertices and edges are kept sorted by id; indices into [`vertices`] and
/// [`edges`] are what the rest of the crate uses.
///
/// [`vertices`]: FiniteGraph::vertices
/// [`edges`]: FiniteGraph::edges
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl FiniteGraph {
    /// Validates and builds a graph from `(id, mass)` vertices and
    /// `(id, tail id, head id)` edges.
    pub fn new(vertices: &[(u32, f64)], edges: &[(u32, u32, u32)]) -> Result<Self> {
        if vertices.is_empty() {
            return Err(XtalError::input("vertices", "graph has no vertices"));
        }
        let mut verts: Vec<Vertex> = vertices.iter().map(|&(id, mass)| Vertex { id, mass }).collect();
        verts.sort_by_key(|v| v.id);
        for pair in verts.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(XtalError::input(
                    format!("vertices[id={}]", pair[0].id),
                    "duplicate vertex id",
                ));
            }
        }
        for v in &verts {
            if !(v.mass > 0.0 && v.mass.is_finite()) {
                return Err(XtalError::input(
                    format!("vertices[id={}].mass", v.id),
                    format!("mass must be positive and finite, got {}", v.mass),
                ));
            }
        }

        let index_of = |id: u32, field: String| -> Result<usize> {
            verts
                .binary_search_by_key(&id, |v| v.id)
                .map_err(|_| XtalError::input(field, format!("unknown vertex id {id}")))
        };

        let mut sorted_edges: Vec<(u32, u32, u32)> = edges.to_vec();
        sorted_edges.sort_by_key(|e| e.0);
        let mut es = Vec::with_capacity(sorted_edges.len());
        for (k, &(id, tail, head)) in sorted_edges.iter().enumerate() {
            if k > 0 && sorted_edges[k - 1].0 == id {
                return Err(XtalError::input(format!("edges[id={id}]"), "duplicate edge id"));
            }
            let tail = index_of(tail, format!("edges[id={id}].tail"))?;
            let head = index_of(head, format!("edges[id={id}].head"))?;
            es.push(Edge { id, tail, head });
        }

        let g = FiniteGraph {
            vertices: verts,
            edges: es,
        };
        g.check_connected()?;
        Ok(g)
    }

    fn check_connected(&self) -> Result<()> {
        let seen = self.reachable_from(0);
        match seen.iter().position(|&s| !s) {
            None => Ok(()),
            Some(x) => Err(XtalError::Disconnected {
                root: self.vertices[0].id,
                vertex: self.vertices[x].id,
            }),
        }
    }

    fn reachable_from(&self, root: usize) -> Vec<bool> {
        let mut seen = vec![false; self.vertices.len()];
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            for oe in self.outgoing(x) {
                let y = self.terminus(oe);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// First Betti number |E| - |V| + 1.
    pub fn betti_number(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    pub fn vertex_index(&self, id: u32) -> Option<usize> {
        self.vertices.binary_search_by_key(&id, |v| v.id).ok()
    }

    pub fn edge_index(&self, id: u32) -> Option<usize> {
        self.edges.binary_search_by_key(&id, |e| e.id).ok()
    }

    pub fn mass(&self, x: usize) -> f64 {
        self.vertices[x].mass
    }

    /// m(V0), the total mass of the fundamental cell.
    pub fn cell_mass(&self) -> f64 {
        self.vertices.iter().map(|v| v.mass).sum()
    }

    pub fn origin(&self, oe: OrientedEdge) -> usize {
        let e = &self.edges[oe.edge];
        if oe.reversed {
            e.head
        } else {
            e.tail
        }
    }

    pub fn terminus(&self, oe: OrientedEdge) -> usize {
        let e = &self.edges[oe.edge];
        if oe.reversed {
            e.tail
        } else {
            e.head
        }
    }

    /// Both orientations of every edge, in edge order.
    pub fn oriented_edges(&self) -> impl Iterator<Item = OrientedEdge> + '_ {
        (0..self.edges.len()).flat_map(|e| [OrientedEdge::forward(e), OrientedEdge::backward(e)])
    }

    /// Oriented edges whose origin is `x`, in increasing edge index. A loop
    /// at `x` contributes both of its orientations.
    pub fn outgoing(&self, x: usize) -> Vec<OrientedEdge> {
        let mut out = Vec::new();
        for (k, e) in self.edges.iter().enumerate() {
            if e.tail == x {
                out.push(OrientedEdge::forward(k));
            }
            if e.head == x {
                out.push(OrientedEdge::backward(k));
            }
        }
        out
    }

    /// Signed boundary of a 1-chain given as coefficients on reference
    /// orientations.
    pub fn boundary(&self, chain: &[i64]) -> Vec<i64> {
        let mut b = vec![0i64; self.vertices.len()];
        for (e, &k) in self.edges.iter().zip(chain) {
            b[e.head] += k;
            b[e.tail] -= k;
        }
        b
    }
}

/// Breadth-first spanning tree rooted at the lowest vertex id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    /// Tree edge indices, ascending.
    pub edges: Vec<usize>,
    /// Non-tree edge indices, ascending.
    pub chords: Vec<usize>,
    /// For each vertex, the oriented tree edge arriving from its parent.
    pub parent: Vec<Option<OrientedEdge>>,
    /// Vertices in BFS visiting order, root first.
    pub order: Vec<usize>,
}

impl SpanningTree {
    /// Oriented tree path from the root to `x`.
    pub fn path_from_root(&self, g: &FiniteGraph, x: usize) -> Vec<OrientedEdge> {
        let mut path = Vec::new();
        let mut cur = x;
        while let Some(oe) = self.parent[cur] {
            path.push(oe);
            cur = g.origin(oe);
        }
        path.reverse();
        path
    }
}

/// Spanning tree by BFS from vertex index 0; at each vertex incident edges
/// are scanned in increasing edge id.
pub fn spanning_tree(g: &FiniteGraph) -> Result<SpanningTree> {
    let n = g.vertex_count();
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut in_tree = vec![false; g.edge_count()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(x) = queue.pop_front() {
        order.push(x);
        for oe in g.outgoing(x) {
            let y = g.terminus(oe);
            if !seen[y] {
                seen[y] = true;
                parent[y] = Some(oe);
                in_tree[oe.edge] = true;
                queue.push_back(y);
            }
        }
    }
    if let Some(x) = seen.iter().position(|&s| !s) {
        return Err(XtalError::Disconnected {
            root: g.vertices()[0].id,
            vertex: g.vertices()[x].id,
        });
    }
    let (edges, chords): (Vec<usize>, Vec<usize>) = (0..g.edge_count()).partition(|&e| in_tree[e]);
    Ok(SpanningTree {
        edges,
        chords,
        parent,
        order,
    })
}

/// Fundamental cycles of a spanning tree: a Z-basis of H1(X0, Z).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleBasis {
    pub tree: SpanningTree,
    /// One integer 1-chain per chord (coefficients on reference
    /// orientations), in chord order.
    pub cycles: Vec<Vec<i64>>,
}

impl CycleBasis {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }
}

/// The fundamental cycle of chord `e` runs along `e` and back through the
/// tree: z = e + path(root → tail) - path(root → head).
pub fn cycle_basis(g: &FiniteGraph) -> Result<CycleBasis> {
    let tree = spanning_tree(g)?;
    let mut cycles = Vec::with_capacity(tree.chords.len());
    for &c in &tree.chords {
        let mut z = vec![0i64; g.edge_count()];
        z[c] += 1;
        let edge = g.edges()[c];
        for oe in tree.path_from_root(g, edge.tail) {
            z[oe.edge] += oe.sign();
        }
        for oe in tree.path_from_root(g, edge.head) {
            z[oe.edge] -= oe.sign();
        }
        cycles.push(z);
    }
    Ok(CycleBasis { tree, cycles })
}

/// Integer voltages on reference orientations; the reversed orientation
/// carries the negated vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoltageAssignment {
    dim: usize,
    voltages: Vec<Vec<i64>>,
}

impl VoltageAssignment {
    pub fn new(g: &FiniteGraph, dim: usize, voltages: Vec<Vec<i64>>) -> Result<Self> {
        if dim == 0 {
            return Err(XtalError::input("dim", "dimension must be at least 1"));
        }
        if voltages.len() != g.edge_count() {
            return Err(XtalError::input(
                "edges",
                format!("expected {} voltages, got {}", g.edge_count(), voltages.len()),
            ));
        }
        for (e, v) in g.edges().iter().zip(&voltages) {
            if v.len() != dim {
                return Err(XtalError::input(
                    format!("edges[id={}].voltage", e.id),
                    format!("expected {dim} components, got {}", v.len()),
                ));
            }
        }
        Ok(VoltageAssignment { dim, voltages })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Voltage of the reference orientation of edge index `e`.
    pub fn of_edge(&self, e: usize) -> &[i64] {
        &self.voltages[e]
    }

    pub fn voltage(&self, oe: OrientedEdge) -> Vec<i64> {
        let s = oe.sign();
        self.voltages[oe.edge].iter().map(|&x| s * x).collect()
    }

    /// Image of a 1-chain in Z^n.
    pub fn image(&self, chain: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.dim];
        for (v, &k) in self.voltages.iter().zip(chain) {
            for (o, &x) in out.iter_mut().zip(v) {
                *o += k * x;
            }
        }
        out
    }

    /// Index of the subgroup of Z^n generated by the images of the
    /// fundamental cycles (1 means the cover is connected with deck group
    /// Z^n, 0 means rank deficient).
    pub fn cycle_image_index(&self, basis: &CycleBasis) -> u64 {
        let gens: Vec<Vec<i64>> = basis.cycles.iter().map(|z| self.image(z)).collect();
        sublattice_index(&gens, self.dim)
    }

    pub fn check_spanning(&self, basis: &CycleBasis) -> Result<()> {
        match self.cycle_image_index(basis) {
            1 => Ok(()),
            index => Err(XtalError::VoltagesNotSpanning { dim: self.dim, index }),
        }
    }
}

/// Maximal abelian cover: chords map to the standard basis of Z^{b1} in
/// chord order, tree edges to zero.
pub fn maximal_abelian_voltages(g: &FiniteGraph) -> Result<VoltageAssignment> {
    let basis = cycle_basis(g)?;
    let n = basis.len();
    if n == 0 {
        return Err(XtalError::Degenerate(
            "base graph is a tree; its maximal abelian cover is finite".into(),
        ));
    }
    let mut voltages = vec![vec![0i64; n]; g.edge_count()];
    for (j, &c) in basis.tree.chords.iter().enumerate() {
        voltages[c][j] = 1;
    }
    VoltageAssignment::new(g, n, voltages)
}

/// Index [Z^n : span(gens)], or 0 when the generators have rank < n.
/// Integer row reduction by repeated Euclidean steps.
pub fn sublattice_index(gens: &[Vec<i64>], dim: usize) -> u64 {
    let mut rows: Vec<Vec<i128>> = gens.iter().map(|g| g.iter().map(|&x| x as i128).collect()).collect();
    let mut index: i128 = 1;
    for (pivot_row, col) in (0..dim).enumerate() {
        loop {
            let best = (pivot_row..rows.len())
                .filter(|&r| rows[r][col] != 0)
                .min_by_key(|&r| rows[r][col].abs());
            let Some(best) = best else {
                return 0;
            };
            rows.swap(pivot_row, best);
            let p = rows[pivot_row][col];
            let mut done = true;
            for r in pivot_row + 1..rows.len() {
                let q = rows[r][col] / p;
                if q != 0 {
                    let pivot = rows[pivot_row].clone();
                    for (x, p) in rows[r][col..dim].iter_mut().zip(&pivot[col..dim]) {
                        *x -= q * p;
                    }
                }
                if rows[r][col] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        index *= rows[pivot_row][col].abs();
    }
    u64::try_from(index).unwrap_or(u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bouquet() -> FiniteGraph {
        FiniteGraph::new(&[(0, 1.0)], &[(0, 0, 0), (1, 0, 0)]).unwrap()
    }

    fn theta() -> FiniteGraph {
        FiniteGraph::new(&[(0, 1.0), (1, 1.0)], &[(0, 0, 1), (1, 0, 1), (2, 0, 1)]).unwrap()
    }

    fn k4() -> FiniteGraph {
        let v: Vec<(u32, f64)> = (0..4).map(|i| (i, 1.0)).collect();
        FiniteGraph::new(&v, &[(0, 0, 1), (1, 0, 2), (2, 0, 3), (3, 1, 2), (4, 1, 3), (5, 2, 3)]).unwrap()
    }

    #[test]
    fn build_counts() {
        let b = bouquet();
        assert_eq!((b.vertex_count(), b.edge_count(), b.betti_number()), (1, 2, 2));
        let t = theta();
        assert_eq!((t.vertex_count(), t.edge_count(), t.betti_number()), (2, 3, 2));
        assert_eq!(k4().betti_number(), 3);
    }

    #[test]
    fn build_errors() {
        let dup_v = FiniteGraph::new(&[(0, 1.0), (0, 1.0)], &[]);
        assert!(matches!(dup_v, Err(XtalError::Input { .. })));
        let dup_e = FiniteGraph::new(&[(0, 1.0)], &[(3, 0, 0), (3, 0, 0)]);
        assert!(matches!(dup_e, Err(XtalError::Input { .. })));
        let dangling = FiniteGraph::new(&[(0, 1.0)], &[(0, 0, 7)]);
        match dangling {
            Err(XtalError::Input { field, .. }) => assert_eq!(field, "edges[id=0].head"),
            other => panic!("unexpected {other:?}"),
        }
        let bad_mass = FiniteGraph::new(&[(0, 0.0)], &[(0, 0, 0)]);
        assert!(matches!(bad_mass, Err(XtalError::Input { .. })));
        let split = FiniteGraph::new(&[(0, 1.0), (1, 1.0)], &[(0, 0, 0), (1, 1, 1)]);
        assert!(matches!(split, Err(XtalError::Disconnected { root: 0, vertex: 1 })));
    }

    #[test]
    fn trees() {
        let t = spanning_tree(&theta()).unwrap();
        assert_eq!(t.edges, vec![0]);
        assert_eq!(t.chords, vec![1, 2]);

        let b = spanning_tree(&bouquet()).unwrap();
        assert!(b.edges.is_empty());
        assert_eq!(b.chords, vec![0, 1]);

        let k = spanning_tree(&k4()).unwrap();
        assert_eq!(k.edges, vec![0, 1, 2]);
        assert_eq!(k.chords, vec![3, 4, 5]);
    }

    #[test]
    fn fundamental_cycles() {
        let g = theta();
        let cb = cycle_basis(&g).unwrap();
        assert_eq!(cb.cycles, vec![vec![-1, 1, 0], vec![-1, 0, 1]]);

        let cb = cycle_basis(&bouquet()).unwrap();
        assert_eq!(cb.cycles, vec![vec![1, 0], vec![0, 1]]);

        // chord 3 = (1,2): e3 + e0 - e1, a triangle 0-1-2
        let g = k4();
        let cb = cycle_basis(&g).unwrap();
        assert_eq!(
            cb.cycles,
            vec![
                vec![1, -1, 0, 1, 0, 0],
                vec![1, 0, -1, 0, 1, 0],
                vec![0, 1, -1, 0, 0, 1],
            ]
        );
        for z in &cb.cycles {
            assert!(g.boundary(z).iter().all(|&b| b == 0));
            assert_eq!(z.iter().filter(|&&k| k != 0).count(), 3);
        }
    }

    #[test]
    fn maximal_voltages() {
        let g = theta();
        let va = maximal_abelian_voltages(&g).unwrap();
        assert_eq!(va.dim(), 2);
        assert_eq!(va.of_edge(0), &[0, 0]);
        assert_eq!(va.of_edge(1), &[1, 0]);
        assert_eq!(va.of_edge(2), &[0, 1]);
        assert_eq!(va.voltage(OrientedEdge::backward(1)), vec![-1, 0]);

        let va = maximal_abelian_voltages(&bouquet()).unwrap();
        assert_eq!(va.of_edge(0), &[1, 0]);
        assert_eq!(va.of_edge(1), &[0, 1]);

        let g = k4();
        let va = maximal_abelian_voltages(&g).unwrap();
        for e in 0..3 {
            assert_eq!(va.of_edge(e), &[0, 0, 0]);
        }
        assert_eq!(va.of_edge(3), &[1, 0, 0]);
        assert_eq!(va.of_edge(4), &[0, 1, 0]);
        assert_eq!(va.of_edge(5), &[0, 0, 1]);
        let cb = cycle_basis(&g).unwrap();
        for (j, z) in cb.cycles.iter().enumerate() {
            let mut unit = vec![0; 3];
            unit[j] = 1;
            assert_eq!(va.image(z), unit);
        }
        assert_eq!(va.cycle_image_index(&cb), 1);
    }

    #[test]
    fn tree_has_no_cover() {
        let g = FiniteGraph::new(&[(0, 1.0), (1, 1.0)], &[(0, 0, 1)]).unwrap();
        assert!(matches!(maximal_abelian_voltages(&g), Err(XtalError::Degenerate(_))));
    }

    #[test]
    fn voltage_dimension_checked() {
        let g = bouquet();
        let err = VoltageAssignment::new(&g, 2, vec![vec![1, 0], vec![1]]).unwrap_err();
        match err {
            XtalError::Input { field, .. } => assert_eq!(field, "edges[id=1].voltage"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn index_of_sublattices() {
        assert_eq!(sublattice_index(&[vec![1, 0], vec![0, 1]], 2), 1);
        assert_eq!(sublattice_index(&[vec![2, 0], vec![0, 1]], 2), 2);
        assert_eq!(sublattice_index(&[vec![2, 1], vec![1, 1]], 2), 1);
        assert_eq!(sublattice_index(&[vec![4, 6], vec![6, 9], vec![2, 3]], 2), 0);
        assert_eq!(sublattice_index(&[vec![3, 0], vec![0, 2], vec![1, 1]], 2), 1);
        assert_eq!(sublattice_index(&[vec![1, 1]], 2), 0);
    }

    #[test]
    fn non_spanning_voltages_rejected() {
        let g = bouquet();
        let va = VoltageAssignment::new(&g, 2, vec![vec![2, 0], vec![0, 1]]).unwrap();
        let cb = cycle_basis(&g).unwrap();
        assert!(matches!(
            va.check_spanning(&cb),
            Err(XtalError::VoltagesNotSpanning { index: 2, .. })
        ));
    }
}
