//! Command-line front end. Data goes to `--out` or stdout, human summaries
//! to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use serde::Serialize;

use crate::acoustic::{asp_entries, spectrum_from_entries, Indexing};
use crate::bloch::band_sweep;
use crate::error::{Result, XtalError};
use crate::io::{csv, Crystal, RealizationFile};
use crate::lattice::{parse_generators, Lattice};
use crate::realization::{equivariance_defect, laplacian_residual, orthogonality_constant};
use crate::spectrum::{SpectrumKind, SpectrumSet};
use crate::theta_inverse::{
    example1_candidates, example1_forward, example1_spectrum, example2_forward, example2_search, recover_lsp,
    theta_check, Example1Geometry, GridAxis, TupleGrid,
};

/// Residual and orthogonality threshold for a successful `realize`.
pub const REALIZE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(
    name = "xtal",
    version,
    about = "Harmonic crystal lattices and their acoustic spectra"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the standard realization of a crystal.
    Realize(RealizeArgs),
    /// Sample acoustic speeds (and optionally all bands) along a segment.
    Bands(BandsArgs),
    /// Integrated acoustic spectrum up to a geodesic length cutoff.
    Asp(AspArgs),
    /// Check the Poisson identity for a lattice's theta functions.
    Theta(ThetaArgs),
    /// Recover lengths or model parameters from an acoustic spectrum.
    Invert(InvertArgs),
    /// Generate synthetic spectra for the generalized models.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct RealizeArgs {
    /// Crystal JSON file.
    pub file: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Check and re-emit a previously written realization instead of
    /// computing one.
    #[arg(long)]
    pub load: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BandsArgs {
    pub file: PathBuf,
    /// Start point, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub from: String,
    /// End point, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub to: String,
    #[arg(long)]
    pub steps: usize,
    /// Add the eigenvalues of the full dynamical matrix.
    #[arg(long)]
    pub full: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AspArgs {
    pub file: PathBuf,
    /// Largest geodesic length |lambda|.
    #[arg(long, allow_hyphen_values = true)]
    pub cutoff: f64,
    /// Index by primitive geodesics only.
    #[arg(long)]
    pub primitive: bool,
    /// Also integrate numerically with this many Simpson nodes and report
    /// the deviation from the closed form.
    #[arg(long)]
    pub quadrature: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThetaArgs {
    /// Crystal JSON file; its period lattice is used.
    #[arg(conflicts_with = "lattice", required_unless_present = "lattice")]
    pub file: Option<PathBuf>,
    /// Lattice generators as rows, e.g. "1,0;0,1".
    #[arg(long, allow_hyphen_values = true)]
    pub lattice: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: f64,
    /// Target bound on each side's neglected tail.
    #[arg(long, default_value_t = 1e-12)]
    pub tail: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    /// Spectrum JSON file.
    pub file: PathBuf,
    /// Orthogonality constant used by the default length recovery.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Candidate table for the four-vector model.
    #[arg(long, conflicts_with = "example2")]
    pub example1: bool,
    /// Divisor window "lo,hi" for --example1.
    #[arg(long, default_value = "1,2")]
    pub window: String,
    /// Grid search for the quadratic form model.
    #[arg(long)]
    pub example2: bool,
    /// Grid axes as lo:hi:step or a single value.
    #[arg(long, default_value = "1:3:1")]
    pub m: String,
    #[arg(long, default_value = "0.1:2.1:0.1")]
    pub alpha: String,
    #[arg(long, default_value = "0.1:2.1:0.1")]
    pub beta: String,
    #[arg(long, default_value = "0:1:0.05")]
    pub gamma: String,
    /// Coefficient bound |k|, |l| <= K.
    #[arg(long, default_value_t = 3)]
    pub k: i64,
    /// Hausdorff distance accepted as a match.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(subcommand)]
    pub model: SynthModel,
}

#[derive(Debug, Subcommand)]
pub enum SynthModel {
    /// Smallest values of the four-vector model.
    Example1 {
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Direction of the fourth vector; defaults to (1, sqrt 2, sqrt 3).
        #[arg(long, allow_hyphen_values = true)]
        v4: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Values of m (alpha k^2 + beta l^2 + 2 gamma k l).
    Example2 {
        #[arg(long, default_value_t = 1)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, default_value_t = 3)]
        k: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    crate::parallel::configure_from_env();
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> Result<i32> {
    match command {
        Command::Realize(a) => realize(a),
        Command::Bands(a) => bands(a),
        Command::Asp(a) => asp(a),
        Command::Theta(a) => theta(a),
        Command::Invert(a) => invert(a),
        Command::Synth(a) => synth(a),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

/// Comma separated floats.
pub fn parse_vector(text: &str, field: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| XtalError::input(field, format!("cannot parse {:?}: {e}", s.trim())))
        })
        .collect()
}

fn realize(a: &RealizeArgs) -> Result<i32> {
    let crystal = Crystal::read(&a.file)?;
    let g = crystal.model.graph();
    let va = crystal.model.voltages();
    let r = match &a.load {
        Some(path) => {
            let loaded = RealizationFile::from_json(&std::fs::read_to_string(path)?)?;
            if loaded.dim != crystal.model.dim() {
                return Err(XtalError::DimensionMismatch {
                    expected: crystal.model.dim(),
                    got: loaded.dim,
                });
            }
            loaded.to_realization(g)?
        }
        None => crystal.model.realization().clone(),
    };
    let residual = laplacian_residual(g, &r);
    let ortho = orthogonality_constant(&r);
    let defect = equivariance_defect(g, va, &r);

    eprintln!(
        "crystal {} (n = {}, |V| = {}, |E| = {})",
        crystal.name,
        r.dim,
        g.vertex_count(),
        g.edge_count()
    );
    eprintln!("orthogonality constant c = {}", ortho.constant);
    eprintln!("orthogonality deviation = {:e}", ortho.deviation);
    eprintln!("max Laplacian residual = {:e}", residual.max_norm);
    eprintln!("equivariance defect = {:e}", defect);
    for (e, v) in g.edges().iter().zip(&r.edge_vectors) {
        eprintln!("edge {}: |v| = {}", e.id, v.norm());
    }
    for i in 0..g.edge_count() {
        for j in i + 1..g.edge_count() {
            let (u, w) = (&r.edge_vectors[i], &r.edge_vectors[j]);
            let cos = (u.dot(w) / (u.norm() * w.norm())).clamp(-1.0, 1.0);
            eprintln!(
                "angle(edge {}, edge {}) = {} deg",
                g.edges()[i].id,
                g.edges()[j].id,
                cos.acos().to_degrees()
            );
        }
    }
    emit(a.out.as_deref(), &RealizationFile::new(g, &r).to_json())?;

    if residual.max_norm < REALIZE_TOLERANCE && ortho.deviation < REALIZE_TOLERANCE {
        Ok(0)
    } else {
        eprintln!("error: realization is not harmonic within {REALIZE_TOLERANCE:e}");
        Ok(3)
    }
}

fn bands(a: &BandsArgs) -> Result<i32> {
    let crystal = Crystal::read(&a.file)?;
    let fm = &crystal.model;
    let from = DVector::from_vec(parse_vector(&a.from, "from")?);
    let to = DVector::from_vec(parse_vector(&a.to, "to")?);
    if from == to {
        eprintln!("warning: --from equals --to, every row is the same point");
    }
    let points = band_sweep(fm, &from, &to, a.steps, a.full)?;
    let n = fm.dim();
    let mut header: Vec<String> = (1..=n).map(|i| format!("chi_{i}")).collect();
    header.extend((1..=n).map(|i| format!("s{i}_sq")));
    if a.full {
        header.extend((1..=fm.band_count()).map(|i| format!("omega{i}_sq")));
    }
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            p.chi
                .iter()
                .chain(&p.acoustic_speeds_sq)
                .chain(&p.band_freqs_sq)
                .copied()
                .collect()
        })
        .collect();
    emit(a.out.as_deref(), &csv(&header, &rows))?;
    eprintln!("{} sample points, {} columns", rows.len(), header.len());
    Ok(0)
}

fn asp(a: &AspArgs) -> Result<i32> {
    if !(a.cutoff > 0.0 && a.cutoff.is_finite()) {
        return Err(XtalError::input(
            "cutoff",
            format!("cutoff must be positive, got {}", a.cutoff),
        ));
    }
    let crystal = Crystal::read(&a.file)?;
    let fm = &crystal.model;
    let dual = fm.realization().dual_period_lattice()?;
    let indexing = if a.primitive {
        Indexing::PrimitiveOnly
    } else {
        Indexing::FullLattice
    };
    let entries = asp_entries(fm, &dual, a.cutoff, indexing, a.quadrature)?;
    let spectrum = spectrum_from_entries(fm, a.cutoff, &entries);
    if a.quadrature.is_some() {
        let worst = entries.iter().map(|e| e.relative_gap()).fold(0.0, f64::max);
        eprintln!("max relative deviation quadrature vs closed form = {worst:e}");
    }
    if spectrum.is_empty() {
        eprintln!("warning: no geodesic with length <= {}", a.cutoff);
    }
    eprintln!(
        "{} geodesics, {} distinct values, complete below {}",
        entries.len(),
        spectrum.len(),
        spectrum.cutoff
    );
    emit(a.out.as_deref(), &spectrum.to_json())?;
    Ok(0)
}

fn theta(a: &ThetaArgs) -> Result<i32> {
    let lattice = match (&a.lattice, &a.file) {
        (Some(rows), _) => Lattice::from_generators(&parse_generators(rows)?)?,
        (None, Some(path)) => Crystal::read(path)?.model.realization().period_lattice()?,
        (None, None) => return Err(XtalError::input("lattice", "give --lattice or a crystal file")),
    };
    let report = theta_check(&lattice, a.t, a.tail)?;
    eprintln!("lhs = {}", report.lhs);
    eprintln!("rhs = {}", report.rhs);
    eprintln!("relative error = {:e}", report.relative_error);
    eprintln!(
        "truncation radii: primal {} ({} terms), dual {} ({} terms)",
        report.truncation_radius_primal, report.terms_primal, report.truncation_radius_dual, report.terms_dual
    );
    emit(a.out.as_deref(), &to_json(&report))?;
    Ok(0)
}

fn parse_window(text: &str) -> Result<(f64, f64)> {
    match parse_vector(text, "window")?.as_slice() {
        [lo, hi] => Ok((*lo, *hi)),
        _ => Err(XtalError::input("window", format!("expected lo,hi, got {text:?}"))),
    }
}

fn invert(a: &InvertArgs) -> Result<i32> {
    let spectrum = SpectrumSet::from_json(&std::fs::read_to_string(&a.file)?)?;
    if a.example1 {
        let (lo, hi) = parse_window(&a.window)?;
        let report = example1_candidates(&spectrum, lo, hi)?;
        eprintln!(
            "{} values, {} without candidates, {} shared divisors",
            report.elements.len(),
            report.flagged.len(),
            report.shared_divisors.len()
        );
        emit(a.out.as_deref(), &to_json(&report))?;
    } else if a.example2 {
        let grid = TupleGrid::from_axes(
            &GridAxis::parse(&a.m, "m")?,
            &GridAxis::parse(&a.alpha, "alpha")?,
            &GridAxis::parse(&a.beta, "beta")?,
            &GridAxis::parse(&a.gamma, "gamma")?,
        )?;
        let target: Vec<f64> = spectrum.values().collect();
        let matches = example2_search(&target, &grid, a.k, a.tol)?;
        eprintln!(
            "{} of {} grid tuples match within {:e}",
            matches.len(),
            grid.len(),
            a.tol
        );
        emit(a.out.as_deref(), &to_json(&matches))?;
    } else {
        let c = a.c.ok_or_else(|| XtalError::input("c", "length recovery needs --c"))?;
        let lengths = recover_lsp(&spectrum, c)?;
        eprintln!("{} lengths, complete below {}", lengths.len(), lengths.cutoff);
        emit(a.out.as_deref(), &lengths.to_json())?;
    }
    Ok(0)
}

fn synth(a: &SynthArgs) -> Result<i32> {
    match &a.model {
        SynthModel::Example1 { count, v4, out } => {
            let geom = match v4 {
                Some(text) => match parse_vector(text, "v4")?.as_slice() {
                    [x, y, z] => Example1Geometry::new([*x, *y, *z])?,
                    _ => return Err(XtalError::input("v4", "expected three components")),
                },
                None => Example1Geometry::irrational(),
            };
            if *count == 0 {
                return Err(XtalError::input("count", "count must be positive"));
            }
            let samples = example1_forward(&geom, *count);
            for s in &samples {
                eprintln!("{} <- |chi|^2 in {:?}", s.value, s.true_norm_sq);
            }
            emit(out.as_deref(), &example1_spectrum(&samples).to_json())?;
        }
        SynthModel::Example2 {
            m,
            alpha,
            beta,
            gamma,
            k,
            out,
        } => {
            let values = example2_forward(*m, *alpha, *beta, *gamma, *k)?;
            eprintln!("{} distinct values", values.len());
            // box truncation gives no completeness guarantee
            let s = SpectrumSet::from_values(SpectrumKind::Acoustic, 0.0, values);
            emit(out.as_deref(), &s.to_json())?;
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["xtal", "nope"]), 2);
        assert_eq!(run(["xtal", "theta", "--t", "0.1"]), 2);
        assert_eq!(run(["xtal", "--help"]), 0);
    }

    #[test]
    fn vectors_and_windows() {
        assert_eq!(parse_vector("0.5, -1", "from").unwrap(), vec![0.5, -1.0]);
        assert!(parse_vector("0.5,,1", "from").is_err());
        assert_eq!(parse_window("1,2").unwrap(), (1.0, 2.0));
        assert!(parse_window("1").is_err());
    }
}
