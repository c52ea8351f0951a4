//! Example crystals shipped with the library.

use crate::error::Result;
use crate::io::Crystal;

pub const SQUARE: &str = include_str!("../crystals/square.json");
pub const HONEYCOMB: &str = include_str!("../crystals/honeycomb.json");
pub const DIAMOND: &str = include_str!("../crystals/diamond.json");
pub const CHAIN: &str = include_str!("../crystals/chain.json");

/// `(name, json)` for every bundled crystal.
pub const ALL: [(&str, &str); 4] = [
    ("square", SQUARE),
    ("honeycomb", HONEYCOMB),
    ("diamond", DIAMOND),
    ("chain", CHAIN),
];

pub fn load(name: &str) -> Option<Result<Crystal>> {
    ALL.iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| Crystal::from_json(text))
}

pub fn all() -> Result<Vec<Crystal>> {
    ALL.iter().map(|(_, text)| Crystal::from_json(text)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realization::{laplacian_residual, orthogonality_constant};

    #[test]
    fn all_bundled_are_harmonic() {
        for c in all().unwrap() {
            let r = c.model.realization();
            assert!(laplacian_residual(c.model.graph(), r).max_norm < 1e-10, "{}", c.name);
            let o = orthogonality_constant(r);
            assert!((o.constant - 1.0).abs() < 1e-12 && o.deviation < 1e-10, "{}", c.name);
        }
        assert!(load("nope").is_none());
        assert_eq!(load("diamond").unwrap().unwrap().model.dim(), 3);
    }
}
