use serde::Serialize;

use crate::error::{Result, XtalError};
use crate::spectrum::{SpectrumKind, SpectrumSet};

/// Divides by the orthogonality constant and takes square roots: a
/// full-lattice acoustic spectrum of a standard realization becomes the
/// length spectrum of L*, complete below sqrt(cutoff / c).
pub fn recover_lsp(asp: &SpectrumSet, c: f64) -> Result<SpectrumSet> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(XtalError::input(
            "c",
            format!("scale constant must be positive, got {c}"),
        ));
    }
    if let Some(i) = asp.entries.iter().position(|e| !(e.0 >= 0.0)) {
        return Err(XtalError::input(
            format!("entries[{i}]"),
            format!("acoustic value must be nonnegative, got {}", asp.entries[i].0),
        ));
    }
    Ok(SpectrumSet::from_weighted(
        SpectrumKind::LatticeLengths,
        (asp.cutoff / c).sqrt(),
        asp.entries.iter().map(|&(a, k)| ((a / c).sqrt(), k)),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleEstimate {
    /// Ratio of the smallest entries.
    pub c: f64,
    /// Largest relative spread of entry-wise ratios from `c` over the
    /// compared prefix.
    pub spread: f64,
    pub compared: usize,
}

/// Diagnostic guess of c from an acoustic spectrum and a candidate
/// squared-length spectrum, comparing the first `prefix` entries.
pub fn estimate_scale(asp: &SpectrumSet, candidate: &SpectrumSet, prefix: usize) -> Result<ScaleEstimate> {
    let compared = prefix.min(asp.len()).min(candidate.len());
    if compared == 0 {
        return Err(XtalError::Domain("need at least one entry in both spectra".into()));
    }
    let ratios: Vec<f64> = asp
        .values()
        .zip(candidate.values())
        .take(compared)
        .map(|(a, b)| a / b)
        .collect();
    let c = ratios[0];
    let spread = ratios.iter().map(|r| (r - c).abs() / c).fold(0.0, f64::max);
    Ok(ScaleEstimate { c, spread, compared })
}
