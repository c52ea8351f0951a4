//! Full-rank lattices in R^n: duals, ball enumeration, length spectra and
//! the primitive geodesics of the character torus.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Result, XtalError};
use crate::spectrum::{SpectrumKind, SpectrumSet};

/// Default cap on the number of coefficient-box points visited by one
/// enumeration.
pub const DEFAULT_POINT_BUDGET: u64 = 10_000_000;

/// A lattice given by a basis matrix whose columns are the generators.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    basis: DMatrix<f64>,
    inverse: DMatrix<f64>,
    volume: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeVector {
    /// Integer coordinates in the lattice basis.
    pub coeffs: Vec<i64>,
    pub vector: DVector<f64>,
    pub norm_sq: f64,
}

impl LatticeVector {
    pub fn length(&self) -> f64 {
        self.norm_sq.sqrt()
    }
}

impl Lattice {
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        if !basis.is_square() || basis.nrows() == 0 {
            return Err(XtalError::input(
                "basis",
                format!(
                    "expected a nonempty square matrix, got {}x{}",
                    basis.nrows(),
                    basis.ncols()
                ),
            ));
        }
        if basis.iter().any(|x| !x.is_finite()) {
            return Err(XtalError::input("basis", "entries must be finite"));
        }
        let det = basis.determinant();
        let scale: f64 = basis.column_iter().map(|c| c.norm()).product();
        if !(det.abs() > 1e-12 * scale) {
            return Err(XtalError::SingularBasis { det });
        }
        let inverse = basis.clone().try_inverse().ok_or(XtalError::SingularBasis { det })?;
        Ok(Lattice {
            basis,
            inverse,
            volume: det.abs(),
        })
    }

    /// Lattice generated by the given vectors (each becomes a basis column).
    pub fn from_generators(generators: &[Vec<f64>]) -> Result<Self> {
        let n = generators.len();
        if let Some(bad) = generators.iter().position(|g| g.len() != n) {
            return Err(XtalError::input(
                format!("basis[{bad}]"),
                format!("expected {n} components, got {}", generators[bad].len()),
            ));
        }
        Lattice::new(DMatrix::from_fn(n, n, |i, j| generators[j][i]))
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn gram(&self) -> DMatrix<f64> {
        self.basis.transpose() * &self.basis
    }

    /// Reciprocal lattice {x : x.y in Z for all y in L}; basis B^{-T}.
    pub fn dual(&self) -> Lattice {
        let basis = self.inverse.transpose();
        Lattice {
            inverse: self.basis.transpose(),
            volume: 1.0 / self.volume,
            basis,
        }
    }

    pub fn point(&self, coeffs: &[i64]) -> DVector<f64> {
        let c = DVector::from_iterator(coeffs.len(), coeffs.iter().map(|&k| k as f64));
        &self.basis * c
    }

    /// Per-coordinate bounds |c_i| <= radius * |row_i(B^{-1})|.
    fn coefficient_bounds(&self, radius: f64) -> Vec<i64> {
        self.inverse
            .row_iter()
            .map(|row| (radius * row.norm() * (1.0 + 1e-12)).floor() as i64)
            .collect()
    }

    /// All nonzero lattice vectors with |v| <= radius, sorted by length then
    /// by coefficients.
    pub fn enumerate(&self, radius: f64) -> Result<Vec<LatticeVector>> {
        self.enumerate_with_budget(radius, DEFAULT_POINT_BUDGET)
    }

    pub fn enumerate_with_budget(&self, radius: f64, budget: u64) -> Result<Vec<LatticeVector>> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(XtalError::input(
                "radius",
                format!("radius must be positive, got {radius}"),
            ));
        }
        let bounds = self.coefficient_bounds(radius);
        let needed: u128 = bounds.iter().map(|&b| (2 * b + 1) as u128).product();
        if needed > budget as u128 {
            return Err(XtalError::Budget { needed, budget });
        }
        let n = self.dim();
        let r2 = radius * radius;
        let first = bounds[0];
        let mut out: Vec<LatticeVector> = (-first..=first)
            .into_par_iter()
            .flat_map_iter(|c0| {
                let mut found = Vec::new();
                let mut coeffs = vec![0i64; n];
                coeffs[0] = c0;
                for (k, b) in bounds.iter().enumerate().skip(1) {
                    coeffs[k] = -b;
                }
                loop {
                    if coeffs.iter().any(|&c| c != 0) {
                        let vector = self.point(&coeffs);
                        let norm_sq = vector.norm_squared();
                        if norm_sq <= r2 {
                            found.push(LatticeVector {
                                coeffs: coeffs.clone(),
                                vector,
                                norm_sq,
                            });
                        }
                    }
                    // odometer over coordinates 1..n
                    let mut k = n;
                    loop {
                        if k == 1 {
                            return found;
                        }
                        k -= 1;
                        if coeffs[k] < bounds[k] {
                            coeffs[k] += 1;
                            break;
                        }
                        coeffs[k] = -bounds[k];
                    }
                }
            })
            .collect();
        out.sort_by(|a, b| a.norm_sq.total_cmp(&b.norm_sq).then_with(|| a.coeffs.cmp(&b.coeffs)));
        Ok(out)
    }

    /// Length of a shortest nonzero vector.
    pub fn shortest_length(&self) -> Result<f64> {
        // some basis column is no shorter than a shortest vector
        let radius = self.basis.column_iter().map(|c| c.norm()).fold(f64::INFINITY, f64::min);
        let vs = self.enumerate(radius)?;
        Ok(vs.first().map_or(radius, LatticeVector::length))
    }
}

pub fn dual_lattice(l: &Lattice) -> Lattice {
    l.dual()
}

/// Distinct lengths with multiplicities (±v counted separately),
/// complete up to `radius`.
pub fn length_spectrum(l: &Lattice, radius: f64) -> Result<SpectrumSet> {
    let vs = l.enumerate(radius)?;
    Ok(SpectrumSet::from_values(
        SpectrumKind::LatticeLengths,
        radius,
        vs.iter().map(LatticeVector::length),
    ))
}

/// Squared lengths |v|^2 of nonzero vectors, complete below `radius^2`.
pub fn squared_length_spectrum(l: &Lattice, radius: f64) -> Result<SpectrumSet> {
    let vs = l.enumerate(radius)?;
    Ok(SpectrumSet::from_values(
        SpectrumKind::SquaredLengths,
        radius * radius,
        vs.iter().map(|v| v.norm_sq),
    ))
}

/// Laplace eigenvalues 4 pi^2 |y|^2, y in L*, of the flat torus R^n / L up
/// to `max_eigenvalue` (zero included, with multiplicity one).
pub fn torus_eigenvalues(l: &Lattice, max_eigenvalue: f64) -> Result<SpectrumSet> {
    let four_pi_sq = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
    let radius = (max_eigenvalue / four_pi_sq).sqrt();
    let vs = l.dual().enumerate(radius)?;
    Ok(SpectrumSet::from_values(
        SpectrumKind::TorusEigenvalues,
        max_eigenvalue,
        std::iter::once(0.0).chain(vs.iter().map(|v| four_pi_sq * v.norm_sq)),
    ))
}

/// A closed geodesic of the character torus through the identity, given by
/// its deck vector in L*.
#[derive(Debug, Clone, PartialEq)]
pub struct Geodesic {
    /// Integer coordinates in the dual basis.
    pub deck_vector: Vec<i64>,
    /// The deck vector in R^n.
    pub vector: DVector<f64>,
    pub length: f64,
    pub primitive: bool,
}

impl Geodesic {
    pub fn from_lattice_vector(v: &LatticeVector) -> Self {
        Geodesic {
            primitive: gcd_all(&v.coeffs) == 1,
            deck_vector: v.coeffs.clone(),
            vector: v.vector.clone(),
            length: v.length(),
        }
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn gcd_all(xs: &[i64]) -> i64 {
    xs.iter().fold(0, |g, &x| gcd(g, x))
}

/// First nonzero coordinate positive: the canonical sign representative.
fn is_canonical_sign(coeffs: &[i64]) -> bool {
    coeffs.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

/// Primitive vectors of `dual` with |y| <= radius, one per ± pair.
pub fn primitive_geodesics(dual: &Lattice, radius: f64) -> Result<Vec<Geodesic>> {
    Ok(dual
        .enumerate(radius)?
        .iter()
        .filter(|v| is_canonical_sign(&v.coeffs) && gcd_all(&v.coeffs) == 1)
        .map(Geodesic::from_lattice_vector)
        .collect())
}

/// Parses a basis written as semicolon-separated generator vectors with
/// comma-separated components, e.g. `"1,0;0.5,0.8660254037844386"`.
pub fn parse_generators(text: &str) -> Result<Vec<Vec<f64>>> {
    text.split(';')
        .enumerate()
        .map(|(i, row)| {
            row.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|e| XtalError::input(format!("basis[{i}]"), format!("cannot parse {x:?}: {e}")))
                })
                .collect()
        })
        .collect()
}
