//! Outputs for crystals whose realizations are exact in floating point.

use std::path::Path;
use std::process::Command;

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn xtal(args: &[&str]) -> String {
    let crystals = Path::new(env!("CARGO_MANIFEST_DIR")).join("crystals");
    let args: Vec<String> = args
        .iter()
        .map(|a| match a.strip_prefix('@') {
            Some(name) => crystals.join(format!("{name}.json")).to_string_lossy().into_owned(),
            None => a.to_string(),
        })
        .collect();
    let out = Command::new(env!("CARGO_BIN_EXE_xtal")).args(&args).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn square_realization() {
    assert_eq!(xtal(&["realize", "@square"]), golden("square_realization.json"));
}

#[test]
fn square_asp() {
    assert_eq!(xtal(&["asp", "@square", "--cutoff", "2.3"]), golden("square_asp.json"));
}

#[test]
fn chain_bands() {
    assert_eq!(
        xtal(&["bands", "@chain", "--from", "0", "--to", "1", "--steps", "5"]),
        golden("chain_bands.csv")
    );
}

#[test]
fn golden_files_round_trip() {
    let r = golden("square_realization.json");
    assert_eq!(xtal::io::RealizationFile::from_json(&r).unwrap().to_json(), r);
    let s = golden("square_asp.json");
    assert_eq!(xtal::spectrum::SpectrumSet::from_json(&s).unwrap().to_json(), s);
}
