use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Result, XtalError};
use crate::lattice::Lattice;

/// Both sides of
/// Sum_{y in L*} exp(-4 pi^2 |y|^2 t) = Vol(L) / (4 pi t)^{n/2} Sum_{s in L} exp(-|s|^2 / (4t)).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaReport {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub volume: f64,
    pub truncation_radius_primal: f64,
    pub truncation_radius_dual: f64,
    pub terms_primal: usize,
    pub terms_dual: usize,
    /// Bound on |(lhs - rhs) truncated - (lhs - rhs) exact|.
    pub tail_bound: f64,
    /// |lhs - rhs| / |lhs| of the truncated sums.
    pub relative_error: f64,
}

/// Truncated Gaussian sums, terms sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaSides {
    /// exp(-4 pi^2 |y|^2 t) for y in L*, |y| <= dual radius, origin included.
    pub dual_terms: Vec<f64>,
    /// exp(-|s|^2 / (4t)) for s in L, |s| <= primal radius, origin included.
    pub primal_terms: Vec<f64>,
    /// Vol(L) / (4 pi t)^{n/2}.
    pub prefactor: f64,
}

impl ThetaSides {
    pub fn lhs(&self) -> f64 {
        self.dual_terms.iter().sum()
    }

    pub fn rhs(&self) -> f64 {
        self.prefactor * self.primal_terms.iter().sum::<f64>()
    }
}

/// Upper bound on Sum_{v in L, |v| > radius} exp(-a |v|^2).
///
/// Balls of radius lambda1/2 around lattice points are disjoint, so at most
/// (1 + 2r/lambda1)^n points have |v| <= r. The tail is split into shells of
/// width lambda1; shell ratios decrease monotonically, which bounds the
/// remainder by a geometric series.
pub fn gaussian_tail_bound(dim: usize, shortest: f64, a: f64, radius: f64) -> f64 {
    let count = |r: f64| (1.0 + 2.0 * r / shortest).powi(dim as i32);
    let term = |k: usize| {
        let inner = radius + k as f64 * shortest;
        count(inner + shortest) * (-a * inner * inner).exp()
    };
    let mut total = 0.0;
    let mut current = term(0);
    for k in 0..100_000 {
        let next = term(k + 1);
        total += current;
        if current == 0.0 {
            return total;
        }
        let ratio = next / current;
        if ratio < 0.5 {
            return total + current * ratio / (1.0 - ratio);
        }
        current = next;
    }
    f64::INFINITY
}

/// Smallest radius (to bisection precision) whose tail bound is <= target.
pub fn truncation_radius(dim: usize, shortest: f64, a: f64, target: f64) -> f64 {
    let bound = |r: f64| gaussian_tail_bound(dim, shortest, a, r);
    let mut hi = shortest.max((target.recip().ln().max(1.0) / a).sqrt());
    while bound(hi) > target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if bound(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

fn gaussian_terms(l: &Lattice, a: f64, radius: f64) -> Result<Vec<f64>> {
    let mut terms: Vec<f64> = std::iter::once(1.0)
        .chain(l.enumerate(radius)?.iter().map(|v| (-a * v.norm_sq).exp()))
        .collect();
    terms.sort_by(f64::total_cmp);
    Ok(terms)
}

/// Evaluates both truncated sides at the given radii.
pub fn theta_sides(l: &Lattice, t: f64, radius_primal: f64, radius_dual: f64) -> Result<ThetaSides> {
    check_t(t)?;
    let n = l.dim() as i32;
    let dual = l.dual();
    Ok(ThetaSides {
        dual_terms: gaussian_terms(&dual, 4.0 * PI * PI * t, radius_dual)?,
        primal_terms: gaussian_terms(l, 1.0 / (4.0 * t), radius_primal)?,
        prefactor: l.volume() / (4.0 * PI * t).powf(n as f64 / 2.0),
    })
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(XtalError::input("t", format!("t must be positive, got {t}")));
    }
    Ok(())
}

/// Picks truncation radii so that each side's neglected tail is below
/// `target_tail`, then evaluates both sides.
pub fn theta_check(l: &Lattice, t: f64, target_tail: f64) -> Result<ThetaReport> {
    check_t(t)?;
    if !(target_tail > 0.0) {
        return Err(XtalError::input(
            "tail",
            format!("target tail must be positive, got {target_tail}"),
        ));
    }
    let n = l.dim();
    let dual = l.dual();
    let a_dual = 4.0 * PI * PI * t;
    let a_primal = 1.0 / (4.0 * t);
    let prefactor = l.volume() / (4.0 * PI * t).powf(n as f64 / 2.0);

    let shortest_primal = l.shortest_length()?;
    let shortest_dual = dual.shortest_length()?;
    let radius_dual = truncation_radius(n, shortest_dual, a_dual, target_tail);
    let radius_primal = truncation_radius(n, shortest_primal, a_primal, target_tail / prefactor.max(1.0));

    let sides = theta_sides(l, t, radius_primal, radius_dual)?;
    let lhs = sides.lhs();
    let rhs = sides.rhs();
    let tail_bound = gaussian_tail_bound(n, shortest_dual, a_dual, radius_dual)
        + prefactor * gaussian_tail_bound(n, shortest_primal, a_primal, radius_primal);
    Ok(ThetaReport {
        t,
        lhs,
        rhs,
        volume: l.volume(),
        truncation_radius_primal: radius_primal,
        truncation_radius_dual: radius_dual,
        terms_primal: sides.primal_terms.len(),
        terms_dual: sides.dual_terms.len(),
        tail_bound,
        relative_error: (lhs - rhs).abs() / lhs.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn square() -> Lattice {
        Lattice::new(DMatrix::identity(2, 2)).unwrap()
    }

    fn hexagonal() -> Lattice {
        Lattice::from_generators(&[vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]]).unwrap()
    }

    /// Independent double sum over a coefficient box far larger than needed.
    fn box_sum(l: &Lattice, a: f64, span: i64) -> f64 {
        let mut terms = Vec::new();
        for i in -span..=span {
            for j in -span..=span {
                terms.push((-a * l.point(&[i, j]).norm_squared()).exp());
            }
        }
        terms.sort_by(f64::total_cmp);
        terms.iter().sum()
    }

    #[test]
    fn tail_bound_dominates_actual_tail() {
        let l = square();
        for (a, r) in [(0.5, 2.0), (0.25, 3.0), (2.0, 1.0)] {
            let actual: f64 = box_sum(&l, a, 40)
                - 1.0
                - l.enumerate(r)
                    .unwrap()
                    .iter()
                    .map(|v| (-a * v.norm_sq).exp())
                    .sum::<f64>();
            let bound = gaussian_tail_bound(2, 1.0, a, r);
            assert!(bound >= actual, "a={a} r={r}: bound {bound} < tail {actual}");
        }
    }

    #[test]
    fn self_dual_fixed_point_is_term_by_term() {
        let t = 1.0 / (4.0 * PI);
        let sides = theta_sides(&square(), t, 6.0, 6.0).unwrap();
        assert_eq!(sides.prefactor, 1.0);
        assert_eq!(sides.dual_terms, sides.primal_terms);
        let report = theta_check(&square(), t, 1e-12).unwrap();
        assert!(report.relative_error <= 1e-12);
    }

    #[test]
    fn matches_direct_double_sums() {
        for (l, t) in [(square(), 0.1), (hexagonal(), 0.2)] {
            let report = theta_check(&l, t, 1e-12).unwrap();
            assert!(report.relative_error <= 1e-10, "{report:?}");
            let lhs = box_sum(&l.dual(), 4.0 * PI * PI * t, 30);
            let rhs = l.volume() / (4.0 * PI * t) * box_sum(&l, 1.0 / (4.0 * t), 30);
            assert!((report.lhs - lhs).abs() <= 1e-12 + report.tail_bound);
            assert!((report.rhs - rhs).abs() <= 1e-12 + report.tail_bound);
            assert!(report.tail_bound <= 2e-12 * (1.0 + l.volume() / (4.0 * PI * t)));
        }
    }

    #[test]
    fn rejects_bad_t() {
        assert!(theta_check(&square(), 0.0, 1e-12).is_err());
        assert!(theta_check(&square(), -1.0, 1e-12).is_err());
        assert!(theta_check(&square(), 0.1, 0.0).is_err());
    }
}
