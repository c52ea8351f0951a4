//! Multisets of nonnegative reals with a completeness cutoff.

use serde::{Deserialize, Serialize};

use crate::error::{Result, XtalError};

/// Relative tolerance under which two values are merged into one entry.
pub const MERGE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumKind {
    LatticeLengths,
    SquaredLengths,
    Acoustic,
    TorusEigenvalues,
}

/// Sorted `(value, multiplicity)` entries. Every value strictly below
/// `cutoff` is present with its full multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSet {
    pub kind: SpectrumKind,
    pub cutoff: f64,
    pub entries: Vec<(f64, u64)>,
}

pub fn approx_equal(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

impl SpectrumSet {
    pub fn empty(kind: SpectrumKind, cutoff: f64) -> Self {
        SpectrumSet {
            kind,
            cutoff,
            entries: Vec::new(),
        }
    }

    /// Sorts and merges values closer than [`MERGE_TOLERANCE`], each value
    /// counted once.
    pub fn from_values(kind: SpectrumKind, cutoff: f64, values: impl IntoIterator<Item = f64>) -> Self {
        Self::from_weighted(kind, cutoff, values.into_iter().map(|v| (v, 1)))
    }

    pub fn from_weighted(kind: SpectrumKind, cutoff: f64, weighted: impl IntoIterator<Item = (f64, u64)>) -> Self {
        let mut items: Vec<(f64, u64)> = weighted.into_iter().collect();
        items.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut entries: Vec<(f64, u64)> = Vec::new();
        for (v, k) in items {
            match entries.last_mut() {
                Some(last) if approx_equal(last.0, v, MERGE_TOLERANCE) => last.1 += k,
                _ => entries.push((v, k)),
            }
        }
        SpectrumSet { kind, cutoff, entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    /// Total number of elements counted with multiplicity.
    pub fn total_count(&self) -> u64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// Same values, every multiplicity set to one.
    pub fn as_set(&self) -> SpectrumSet {
        SpectrumSet {
            kind: self.kind,
            cutoff: self.cutoff,
            entries: self.entries.iter().map(|&(v, _)| (v, 1)).collect(),
        }
    }

    /// Entries strictly below `bound`; the cutoff shrinks accordingly.
    pub fn below(&self, bound: f64) -> SpectrumSet {
        SpectrumSet {
            kind: self.kind,
            cutoff: self.cutoff.min(bound),
            entries: self.entries.iter().copied().filter(|e| e.0 < bound).collect(),
        }
    }

    /// Entry-for-entry comparison: same length, same multiplicities, values
    /// within `rel`. Kinds and cutoffs are not compared.
    pub fn matches(&self, other: &SpectrumSet, rel: f64) -> bool {
        self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.1 == b.1 && approx_equal(a.0, b.0, rel))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cutoff >= 0.0) {
            return Err(XtalError::input("cutoff", "cutoff must be nonnegative"));
        }
        for (i, &(v, k)) in self.entries.iter().enumerate() {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(XtalError::input(
                    format!("entries[{i}]"),
                    format!("value must be finite and nonnegative, got {v}"),
                ));
            }
            if k == 0 {
                return Err(XtalError::input(
                    format!("entries[{i}]"),
                    "multiplicity must be positive",
                ));
            }
            if i > 0 && !(v > self.entries[i - 1].0) {
                return Err(XtalError::input(
                    format!("entries[{i}]"),
                    "values must be strictly increasing",
                ));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spectrum serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: SpectrumSet = serde_json::from_str(text)
            .map_err(|e| XtalError::input(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
        s.validate()?;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn merges_close_values() {
        let s = SpectrumSet::from_values(SpectrumKind::Acoustic, 10.0, [2.0, 1.0, 1.0 + 1e-12, 2.0]);
        assert_eq!(s.entries, vec![(1.0, 2), (2.0, 2)]);
        assert_eq!(s.total_count(), 4);
        assert_eq!(s.as_set().entries, vec![(1.0, 1), (2.0, 1)]);
    }

    #[test]
    fn json_layout() {
        let s = SpectrumSet::from_values(SpectrumKind::LatticeLengths, 2.5, [1.0, 1.0, 2.0_f64.sqrt()]);
        let j = s.to_json();
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(v["kind"], "lattice-lengths");
        assert_eq!(v["cutoff"], 2.5);
        assert_eq!(v["entries"][0][0], 1.0);
        assert_eq!(v["entries"][0][1], 2);
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys.len(), 3);
    }

    #[test]
    fn validation() {
        let bad = r#"{"kind":"acoustic","cutoff":1.0,"entries":[[2.0,1],[1.0,1]]}"#;
        assert!(SpectrumSet::from_json(bad).is_err());
        let bad = r#"{"kind":"acoustic","cutoff":1.0,"entries":[[-1.0,1]]}"#;
        assert!(SpectrumSet::from_json(bad).is_err());
        let bad = r#"{"kind":"nope","cutoff":1.0,"entries":[]}"#;
        assert!(SpectrumSet::from_json(bad).is_err());
    }

    proptest! {
        #[test]
        fn json_round_trip_is_byte_identical(values in proptest::collection::vec(0.0f64..1e6, 0..40)) {
            let s = SpectrumSet::from_values(SpectrumKind::SquaredLengths, 1e6, values);
            let text = s.to_json();
            let back = SpectrumSet::from_json(&text).unwrap();
            prop_assert_eq!(&back, &s);
            prop_assert_eq!(back.to_json(), text);
        }

        #[test]
        fn entries_strictly_increasing(values in proptest::collection::vec(0.0f64..100.0, 0..60)) {
            let s = SpectrumSet::from_values(SpectrumKind::Acoustic, 100.0, values.clone());
            prop_assert!(s.validate().is_ok());
            prop_assert_eq!(s.total_count(), values.len() as u64);
        }
    }
}
