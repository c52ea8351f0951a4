//! Inverse problems without a harmonic embedding: the four-vector model in
//! R^3 and the binary quadratic form model.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, XtalError};
use crate::spectrum::{approx_equal, SpectrumKind, SpectrumSet, MERGE_TOLERANCE};

/// Three orthonormal edge vectors plus a unit vector v4; L = Z^3 and
/// Asp = { |chi|^2 + (chi . v4)^2 }.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example1Geometry {
    pub v4: [f64; 3],
}

impl Example1Geometry {
    /// v4 at the same angle arccos(-1/sqrt 3) with each axis.
    pub fn equal_angles() -> Self {
        let s = -1.0 / 3f64.sqrt();
        Example1Geometry { v4: [s, s, s] }
    }

    /// Unit vector along `dir`.
    pub fn new(dir: [f64; 3]) -> Result<Self> {
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(XtalError::input("v4", "direction must be a nonzero finite vector"));
        }
        Ok(Example1Geometry {
            v4: dir.map(|x| x / norm),
        })
    }

    /// Direction (1, sqrt 2, sqrt 3) / sqrt 6: chi . v4 vanishes only at
    /// chi = 0 and chi is never parallel to v4.
    pub fn irrational() -> Self {
        Example1Geometry::new([1.0, 2f64.sqrt(), 3f64.sqrt()]).expect("nonzero")
    }

    pub fn asp_value(&self, chi: [i64; 3]) -> f64 {
        let norm_sq = chi.iter().map(|&x| x * x).sum::<i64>() as f64;
        let p: f64 = chi.iter().zip(&self.v4).map(|(&c, v)| c as f64 * v).sum();
        norm_sq + p * p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Example1Sample {
    pub value: f64,
    /// Distinct |chi|^2 realizing `value`.
    pub true_norm_sq: Vec<u64>,
}

/// The `count` smallest distinct values of the model spectrum with their
/// ground-truth |chi|^2.
pub fn example1_forward(geom: &Example1Geometry, count: usize) -> Vec<Example1Sample> {
    let mut bound: i64 = 4;
    loop {
        // values <= bound are complete: value >= |chi|^2
        let span = (bound as f64).sqrt().floor() as i64;
        let mut pts: Vec<(f64, u64)> = Vec::new();
        for a in -span..=span {
            for b in -span..=span {
                for c in -span..=span {
                    let n2 = a * a + b * b + c * c;
                    if n2 == 0 || n2 > bound {
                        continue;
                    }
                    let v = geom.asp_value([a, b, c]);
                    if v <= bound as f64 {
                        pts.push((v, n2 as u64));
                    }
                }
            }
        }
        pts.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        let mut samples: Vec<Example1Sample> = Vec::new();
        for (v, n2) in pts {
            match samples.last_mut() {
                Some(last) if approx_equal(last.value, v, MERGE_TOLERANCE) => {
                    if !last.true_norm_sq.contains(&n2) {
                        last.true_norm_sq.push(n2);
                    }
                }
                _ => samples.push(Example1Sample {
                    value: v,
                    true_norm_sq: vec![n2],
                }),
            }
        }
        if samples.len() >= count {
            samples.truncate(count);
            return samples;
        }
        bound *= 2;
    }
}

pub fn example1_spectrum(samples: &[Example1Sample]) -> SpectrumSet {
    let cutoff = samples.last().map_or(0.0, |s| s.value);
    SpectrumSet::from_values(SpectrumKind::Acoustic, cutoff, samples.iter().map(|s| s.value))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Example1Candidate {
    /// Candidate |chi|^2.
    pub norm_sq: u64,
    /// Its square root, the candidate |chi|.
    pub length: f64,
    /// value / norm_sq, inside the window.
    pub divisor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Example1Element {
    pub value: f64,
    pub candidates: Vec<Example1Candidate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Example1Report {
    pub window: (f64, f64),
    pub elements: Vec<Example1Element>,
    /// Indices of elements admitting no integer in the window.
    pub flagged: Vec<usize>,
    /// Divisors admitted by at least two elements, with element counts,
    /// most shared first.
    pub shared_divisors: Vec<(f64, usize)>,
}

impl Example1Report {
    /// Every element admits at least one candidate.
    pub fn consistent(&self) -> bool {
        self.flagged.is_empty()
    }
}

/// Integers k with value / hi < k < value / lo for every spectrum value.
pub fn example1_candidates(asp: &SpectrumSet, lo: f64, hi: f64) -> Result<Example1Report> {
    if asp.is_empty() {
        return Err(XtalError::Domain("acoustic spectrum is empty".into()));
    }
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(XtalError::input(
            "window",
            format!("need 0 < lo < hi, got ({lo}, {hi})"),
        ));
    }
    let mut elements = Vec::with_capacity(asp.len());
    for (i, value) in asp.values().enumerate() {
        if !(value > 0.0) {
            return Err(XtalError::input(format!("entries[{i}]"), "values must be positive"));
        }
        let first = (value / hi).floor() as u64 + 1;
        let last = (value / lo).ceil() as u64 - 1;
        let candidates = (first..=last)
            .filter(|&k| {
                let d = value / k as f64;
                d > lo && d < hi
            })
            .map(|k| Example1Candidate {
                norm_sq: k,
                length: (k as f64).sqrt(),
                divisor: value / k as f64,
            })
            .collect();
        elements.push(Example1Element { value, candidates });
    }
    let flagged = elements
        .iter()
        .enumerate()
        .filter(|(_, e)| e.candidates.is_empty())
        .map(|(i, _)| i)
        .collect();

    let mut divisors: Vec<(f64, usize)> = elements
        .iter()
        .enumerate()
        .flat_map(|(i, e)| e.candidates.iter().map(move |c| (c.divisor, i)))
        .collect();
    divisors.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut shared: Vec<(f64, usize)> = Vec::new();
    let mut last_element: Option<usize> = None;
    for (d, i) in divisors {
        match shared.last_mut() {
            Some(s) if approx_equal(s.0, d, MERGE_TOLERANCE) => {
                if last_element != Some(i) {
                    s.1 += 1;
                }
            }
            _ => shared.push((d, 1)),
        }
        last_element = Some(i);
    }
    shared.retain(|s| s.1 >= 2);
    shared.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.total_cmp(&b.0)));

    Ok(Example1Report {
        window: (lo, hi),
        elements,
        flagged,
        shared_divisors: shared,
    })
}

/// alpha k^2 + beta l^2 + 2 gamma k l, integer products formed first so the
/// value is exactly symmetric under (alpha, k) <-> (beta, l).
pub fn form_value(alpha: f64, beta: f64, gamma: f64, k: i64, l: i64) -> f64 {
    alpha * (k * k) as f64 + beta * (l * l) as f64 + 2.0 * gamma * (k * l) as f64
}

/// M = { m (alpha k^2 + beta l^2 + 2 gamma k l) : |k|, |l| <= bound },
/// sorted and deduplicated.
pub fn example2_forward(m: i64, alpha: f64, beta: f64, gamma: f64, bound: i64) -> Result<Vec<f64>> {
    if bound <= 0 {
        return Err(XtalError::input(
            "k",
            format!("coefficient bound must be positive, got {bound}"),
        ));
    }
    Ok(forward_values(m, alpha, beta, gamma, bound))
}

fn forward_values(m: i64, alpha: f64, beta: f64, gamma: f64, bound: i64) -> Vec<f64> {
    let scale = m as f64;
    let mut vals: Vec<f64> = (-bound..=bound)
        .flat_map(|k| (-bound..=bound).map(move |l| scale * form_value(alpha, beta, gamma, k, l)))
        .collect();
    vals.sort_by(f64::total_cmp);
    dedup_sorted(&mut vals);
    vals
}

fn dedup_sorted(vals: &mut Vec<f64>) {
    let mut out: Vec<f64> = Vec::with_capacity(vals.len());
    for &v in vals.iter() {
        match out.last() {
            Some(&last) if (v - last).abs() <= MERGE_TOLERANCE * v.abs().max(last.abs()).max(1.0) => {}
            _ => out.push(v),
        }
    }
    *vals = out;
}

/// Symmetric Hausdorff distance between two sorted nonempty sets.
pub fn hausdorff(a: &[f64], b: &[f64]) -> f64 {
    fn directed(from: &[f64], to: &[f64]) -> f64 {
        from.iter()
            .map(|&x| {
                let i = to.partition_point(|&y| y < x);
                let right = to.get(i).map_or(f64::INFINITY, |&y| y - x);
                let left = if i > 0 { x - to[i - 1] } else { f64::INFINITY };
                right.min(left)
            })
            .fold(0.0, f64::max)
    }
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() {
            0.0
        } else {
            f64::INFINITY
        };
    }
    directed(a, b).max(directed(b, a))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TupleCandidate {
    pub m: i64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Hausdorff distance between the generated set and the target.
    pub score: f64,
    /// alpha beta >= gamma^2.
    pub positive_semidefinite: bool,
    /// min(alpha, beta), reported when gamma > 0.
    pub min_scaled: Option<f64>,
    /// Smallest nonzero element of the generated set divided by m.
    pub observed_min_scaled: Option<f64>,
}

impl TupleCandidate {
    /// (m alpha, m beta, m gamma), the invariant of m-rescaling.
    pub fn normalized(&self) -> [f64; 3] {
        let m = self.m as f64;
        [m * self.alpha, m * self.beta, m * self.gamma]
    }

    /// Same tuple up to m-rescaling and the alpha/beta swap.
    pub fn same_class(&self, other: &TupleCandidate, tol: f64) -> bool {
        let a = self.normalized();
        let b = other.normalized();
        let close = |x: f64, y: f64| (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0);
        let direct = close(a[0], b[0]) && close(a[1], b[1]) && close(a[2], b[2]);
        let swapped = close(a[0], b[1]) && close(a[1], b[0]) && close(a[2], b[2]);
        direct || swapped
    }
}

/// An evenly spaced axis `lo, lo + step, ...` up to `hi` inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl GridAxis {
    pub fn values(&self) -> Vec<f64> {
        if self.step <= 0.0 || self.hi < self.lo {
            return vec![self.lo];
        }
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.lo + i as f64 * self.step).collect()
    }

    /// Parses `lo:hi:step`, or a single value.
    pub fn parse(text: &str, field: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| XtalError::input(field, format!("cannot parse {s:?}: {e}")))
        };
        match parts.as_slice() {
            [v] => {
                let v = num(v)?;
                Ok(GridAxis {
                    lo: v,
                    hi: v,
                    step: 1.0,
                })
            }
            [lo, hi, step] => {
                let axis = GridAxis {
                    lo: num(lo)?,
                    hi: num(hi)?,
                    step: num(step)?,
                };
                if !(axis.step > 0.0) || axis.hi < axis.lo {
                    return Err(XtalError::input(field, "need lo <= hi and step > 0"));
                }
                Ok(axis)
            }
            _ => Err(XtalError::input(field, format!("expected lo:hi:step, got {text:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TupleGrid {
    pub m: Vec<i64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl TupleGrid {
    pub fn from_axes(m: &GridAxis, alpha: &GridAxis, beta: &GridAxis, gamma: &GridAxis) -> Result<Self> {
        let ms: Vec<i64> = m.values().iter().map(|v| v.round() as i64).collect();
        if ms.iter().zip(m.values()).any(|(&i, v)| (i as f64 - v).abs() > 1e-9) {
            return Err(XtalError::input("m", "m axis must take integer values"));
        }
        Ok(TupleGrid {
            m: ms,
            alpha: alpha.values(),
            beta: beta.values(),
            gamma: gamma.values(),
        })
    }

    pub fn len(&self) -> usize {
        self.m.len() * self.alpha.len() * self.beta.len() * self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, idx: usize) -> (i64, f64, f64, f64) {
        let ng = self.gamma.len();
        let nb = self.beta.len();
        let na = self.alpha.len();
        let g = idx % ng;
        let b = (idx / ng) % nb;
        let a = (idx / (ng * nb)) % na;
        let m = idx / (ng * nb * na);
        (self.m[m], self.alpha[a], self.beta[b], self.gamma[g])
    }
}

fn candidate(m: i64, alpha: f64, beta: f64, gamma: f64, values: &[f64], score: f64) -> TupleCandidate {
    let observed_min_scaled = values
        .iter()
        .copied()
        .filter(|v| v.abs() > MERGE_TOLERANCE)
        .map(|v| v.abs())
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))))
        .map(|v| v / (m as f64).abs());
    TupleCandidate {
        m,
        alpha,
        beta,
        gamma,
        score,
        positive_semidefinite: alpha * beta >= gamma * gamma,
        min_scaled: (gamma > 0.0).then(|| alpha.min(beta)),
        observed_min_scaled,
    }
}

/// Evaluates a single tuple against a target set.
pub fn score_tuple(target: &[f64], m: i64, alpha: f64, beta: f64, gamma: f64, bound: i64) -> Result<TupleCandidate> {
    let values = example2_forward(m, alpha, beta, gamma, bound)?;
    let score = hausdorff(&values, target);
    Ok(candidate(m, alpha, beta, gamma, &values, score))
}

/// Brute-force scan of the grid; returns every tuple whose generated set
/// lies within Hausdorff distance `tol` of `target`, in grid order.
pub fn example2_search(target: &[f64], grid: &TupleGrid, bound: i64, tol: f64) -> Result<Vec<TupleCandidate>> {
    if grid.is_empty() {
        return Err(XtalError::input("grid", "search grid is empty"));
    }
    if bound <= 0 {
        return Err(XtalError::input(
            "k",
            format!("coefficient bound must be positive, got {bound}"),
        ));
    }
    if target.is_empty() {
        return Err(XtalError::input("target", "target set is empty"));
    }
    let mut sorted = target.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok((0..grid.len())
        .into_par_iter()
        .filter_map(|idx| {
            let (m, alpha, beta, gamma) = grid.get(idx);
            let values = forward_values(m, alpha, beta, gamma, bound);
            let score = hausdorff(&values, &sorted);
            (score <= tol).then(|| candidate(m, alpha, beta, gamma, &values, score))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_arithmetic() {
        let asp = SpectrumSet::from_values(SpectrumKind::Acoustic, 4.0, [1.0, 3.5]);
        let r = example1_candidates(&asp, 1.0, 2.0).unwrap();
        assert!(r.elements[0].candidates.is_empty());
        let ks: Vec<u64> = r.elements[1].candidates.iter().map(|c| c.norm_sq).collect();
        assert_eq!(ks, vec![2, 3]);
        let ds: Vec<f64> = r.elements[1].candidates.iter().map(|c| c.divisor).collect();
        assert!((ds[0] - 1.75).abs() < 1e-15 && (ds[1] - 7.0 / 6.0).abs() < 1e-15);
        assert_eq!(r.flagged, vec![0]);
        assert!(!r.consistent());
    }

    #[test]
    fn example1_errors() {
        let empty = SpectrumSet::empty(SpectrumKind::Acoustic, 1.0);
        assert!(example1_candidates(&empty, 1.0, 2.0).is_err());
        let asp = SpectrumSet::from_values(SpectrumKind::Acoustic, 4.0, [3.5]);
        assert!(example1_candidates(&asp, 2.0, 1.0).is_err());
    }

    #[test]
    fn forward_then_invert_contains_truth() {
        let geom = Example1Geometry::irrational();
        let samples = example1_forward(&geom, 30);
        assert_eq!(samples.len(), 30);
        let report = example1_candidates(&example1_spectrum(&samples), 1.0, 2.0).unwrap();
        for (s, e) in samples.iter().zip(&report.elements) {
            for k in &s.true_norm_sq {
                assert!(e.candidates.iter().any(|c| c.norm_sq == *k), "value {}", s.value);
            }
        }
    }

    #[test]
    fn equal_angle_direction() {
        let g = Example1Geometry::equal_angles();
        for axis in 0..3 {
            assert!((g.v4[axis] + 1.0 / 3f64.sqrt()).abs() < 1e-15);
        }
        // chi orthogonal to v4 has divisor exactly 1, outside the open window
        assert!((g.asp_value([1, -1, 0]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn forward_sums_of_two_squares() {
        let m = example2_forward(1, 1.0, 1.0, 0.0, 2).unwrap();
        assert_eq!(m, vec![0.0, 1.0, 2.0, 4.0, 5.0, 8.0]);
        assert!(example2_forward(1, 1.0, 1.0, 0.0, 0).is_err());
    }

    #[test]
    fn forward_symmetries() {
        let (a, b, g) = (1.5, 0.75, 0.25);
        assert_eq!(
            example2_forward(1, a, b, g, 3).unwrap(),
            example2_forward(1, b, a, g, 3).unwrap()
        );
        assert_eq!(
            example2_forward(2, a, b, g, 3).unwrap(),
            example2_forward(1, 2.0 * a, 2.0 * b, 2.0 * g, 3).unwrap()
        );
    }

    #[test]
    fn hausdorff_distance() {
        assert_eq!(hausdorff(&[0.0, 1.0], &[0.0, 1.0]), 0.0);
        assert_eq!(hausdorff(&[0.0, 1.0], &[0.0, 1.0, 3.0]), 2.0);
        assert_eq!(hausdorff(&[0.0], &[]), f64::INFINITY);
    }

    #[test]
    fn axis_parsing() {
        let a = GridAxis::parse("0.1:2.1:0.1", "alpha").unwrap();
        assert_eq!(a.values().len(), 21);
        assert_eq!(GridAxis::parse("3", "m").unwrap().values(), vec![3.0]);
        assert!(GridAxis::parse("1:0:1", "m").is_err());
        assert!(GridAxis::parse("1:2", "m").is_err());
        let m = GridAxis::parse("0.5:1.5:0.5", "m").unwrap();
        assert!(TupleGrid::from_axes(&m, &a, &a, &a).is_err());
    }

    #[test]
    fn search_finds_swap_class() {
        let target = example2_forward(1, 2.0, 1.0, 0.5, 3).unwrap();
        let ax = |s: &str| GridAxis::parse(s, "x").unwrap();
        let grid = TupleGrid::from_axes(&ax("1:2:1"), &ax("0.5:2.5:0.5"), &ax("0.5:2.5:0.5"), &ax("0:1:0.25")).unwrap();
        let found = example2_search(&target, &grid, 3, 1e-9).unwrap();
        let truth = score_tuple(&target, 1, 2.0, 1.0, 0.5, 3).unwrap();
        assert!(found
            .iter()
            .any(|c| (c.m, c.alpha, c.beta, c.gamma) == (1, 2.0, 1.0, 0.5)));
        assert!(found
            .iter()
            .any(|c| (c.m, c.alpha, c.beta, c.gamma) == (1, 1.0, 2.0, 0.5)));
        assert!(found.iter().all(|c| c.same_class(&truth, 1e-9)));
        assert_eq!(truth.min_scaled, Some(1.0));
    }

    #[test]
    fn off_grid_truth_not_found() {
        let target = example2_forward(1, 1.3, 0.7, 0.11, 2).unwrap();
        let ax = |s: &str| GridAxis::parse(s, "x").unwrap();
        let grid = TupleGrid::from_axes(&ax("1:2:1"), &ax("0.5:2.5:0.5"), &ax("0.5:2.5:0.5"), &ax("0:1:0.25")).unwrap();
        assert!(example2_search(&target, &grid, 2, 0.0).unwrap().is_empty());
    }
}
