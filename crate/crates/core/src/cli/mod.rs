//! The `tlsc` command line: construct codes, print bounds and reference
//! tables, decode vector files and run channel simulations.

mod tables;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{grid_lower_bound, upper_bound, write_reports_csv, CenterDensityTable, FaceRule};
use crate::codec::{
    awgn_trial, cyclic_code_on, derived_beta, grid_code, load_codebook, quotient_code, save_codebook,
    sliced_code, AwgnConfig, DecodeMode, LayerContent, TorusCode, PUBLISHED_LEECH_BETA,
};
use crate::error::{Error, Result};
use crate::geometry::distance;
use crate::lattice::Bundled;
use crate::layering::{external_layers, parse_points, permutation_layers, polygon2d_layers, LayerFamily, SLICE_RULE};

pub use tables::{reference_cells, ReferenceCell};

/// Exit status when `tables --strict` finds a deviation.
pub const EXIT_DEVIATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "tlsc", version, about = "Torus layer spherical codes")]
pub struct Cli {
    /// Worker threads for searches and simulations.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Prefix CSV output with a generation-time comment line.
    #[arg(long, global = true)]
    pub timestamp: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a code and write its JSON description.
    Construct(ConstructArgs),
    /// Grid lower and packing upper bounds per layer, as CSV.
    Bounds(BoundsArgs),
    /// Decode a file of vectors against a saved code.
    Decode(DecodeArgs),
    /// Symbol error rates over a Gaussian channel, as CSV.
    Simulate(SimulateArgs),
    /// Regenerate the reference tables and compare each cell.
    Tables(TablesArgs),
    /// Codes on S^4 built from parallel rings of 4-D codes.
    Slice(SliceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Cyclic,
    Grid,
    Quotient,
}

#[derive(Debug, Clone, Args)]
pub struct CodeSpec {
    /// Ambient dimension 2L.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Minimum distance.
    #[arg(long)]
    pub dmin: Option<f64>,
    #[arg(long, value_enum, default_value = "cyclic")]
    pub kind: Kind,
    /// Lattice for quotient layers: z<n>, d4, e8 or leech.
    #[arg(long, default_value = "leech")]
    pub lattice: String,
    /// Use the published Leech scale 0.10187 instead of the per-axis rule.
    #[arg(long)]
    pub published_beta: bool,
    /// Explicit lattice minimum distance.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Layer radii, one per line, instead of the built-in families.
    #[arg(long)]
    pub layers: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub spec: CodeSpec,
    /// Output JSON path.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Minimum distances, comma separated.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub dmin: Vec<f64>,
    /// Upper bound as a maximum over all faces.
    #[arg(long)]
    pub max_face_rule: bool,
    /// Report both face rules.
    #[arg(long)]
    pub both_rules: bool,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    /// Code JSON written by `construct`.
    #[arg(long)]
    pub code: PathBuf,
    /// One vector per line.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "ml")]
    pub mode: DecodeMode,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeChoice {
    Fast,
    Ml,
    Both,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Saved code; otherwise the code is built from the flags below.
    #[arg(long)]
    pub code: Option<PathBuf>,
    #[command(flatten)]
    pub spec: CodeSpec,
    /// SNR values in dB, comma separated.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub snr: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "both")]
    pub mode: ModeChoice,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    /// Exit with status 3 when a cell deviates beyond its tolerance.
    #[arg(long)]
    pub strict: bool,
    /// Skip the slowest rows (d = 0.01 and the smallest sliced codes).
    #[arg(long)]
    pub quick: bool,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SliceArgs {
    /// Odd ambient dimension; only 5 is supported.
    #[arg(long, default_value_t = 5)]
    pub dim: usize,
    #[arg(long)]
    pub dmin: f64,
    /// Check all pairwise distances of the lifted code.
    #[arg(long)]
    pub verify: bool,
}

/// Parses the arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// 1 for I/O failures, 2 for everything the caller can fix by changing input.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 1,
        _ => 2,
    }
}

/// Runs a parsed command, writing results to `out` (or to `--out` files).
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    // output is buffered so the command can run inside a sized thread pool
    let work = || -> Result<(i32, Vec<u8>)> {
        let mut buf = Vec::new();
        let code = match &cli.command {
            Command::Construct(a) => construct(cli, a, &mut buf),
            Command::Bounds(a) => bounds(cli, a, &mut buf),
            Command::Decode(a) => decode(cli, a, &mut buf),
            Command::Simulate(a) => simulate(cli, a, &mut buf),
            Command::Tables(a) => tables::run(cli, a, &mut buf),
            Command::Slice(a) => slice(a, &mut buf),
        }?;
        Ok((code, buf))
    };
    let (code, buf) = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }?;
    out.write_all(&buf)?;
    Ok(code)
}

fn timestamp_line(cli: &Cli) -> Option<String> {
    cli.timestamp.then(|| {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        format!("# generated at unix time {secs}\n")
    })
}

/// Writes CSV text to `--out` or to `out`, with the optional timestamp line.
fn emit(cli: &Cli, path: Option<&PathBuf>, body: &[u8], out: &mut dyn Write) -> Result<()> {
    let mut text = timestamp_line(cli).unwrap_or_default().into_bytes();
    text.extend_from_slice(body);
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(&text)?,
    }
    Ok(())
}

fn layer_family(spec: &CodeSpec) -> Result<LayerFamily> {
    let dim = spec.dim.ok_or_else(|| Error::InvalidParameter("--dim is required".into()))?;
    let d = spec.dmin.ok_or_else(|| Error::InvalidParameter("--dmin is required".into()))?;
    if dim % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "dimension {dim} is odd; use the slice command for odd spheres"
        )));
    }
    if dim < 4 {
        return Err(Error::InvalidParameter(format!("dimension {dim} below 4")));
    }
    let l = dim / 2;
    match &spec.layers {
        Some(p) => external_layers(l, d, &parse_points(&fs::read_to_string(p)?)?),
        None if l == 2 => polygon2d_layers(d),
        None => permutation_layers(l, d),
    }
}

/// Builds the code described by the flags.
pub fn build_code(spec: &CodeSpec) -> Result<TorusCode> {
    let family = layer_family(spec)?;
    match spec.kind {
        Kind::Cyclic => {
            if family.dim_l != 2 {
                return Err(Error::InvalidParameter("cyclic layers need --dim 4".into()));
            }
            cyclic_code_on(&family)
        }
        Kind::Grid => grid_code(&family),
        Kind::Quotient => {
            let lattice = Bundled::parse(&spec.lattice)?;
            if lattice.dim() != family.dim_l {
                return Err(Error::InvalidParameter(format!(
                    "lattice {} has dimension {} but layers have {}",
                    lattice.name(),
                    lattice.dim(),
                    family.dim_l
                )));
            }
            let beta = match (spec.beta, spec.published_beta) {
                (Some(b), _) => b,
                (None, true) if lattice == Bundled::Leech => PUBLISHED_LEECH_BETA,
                (None, true) => {
                    return Err(Error::InvalidParameter("--published-beta applies to the Leech lattice".into()))
                }
                (None, false) => derived_beta(&family)?,
            };
            quotient_code(&family, lattice, beta)
        }
    }
}

fn construct(_cli: &Cli, a: &ConstructArgs, out: &mut dyn Write) -> Result<i32> {
    let code = build_code(&a.spec)?;
    for (i, l) in code.layers.iter().enumerate() {
        match &l.content {
            LayerContent::Cyclic(c) => {
                let (c1, c2) = c.radius();
                writeln!(
                    out,
                    "layer {i}: alpha={:.6} cos={:.6} sin={:.6} dmin={:.6} M={} generators=({},{})",
                    c.alpha, c1, c2, c.dmin_achieved, c.order_m, c.generators.0, c.generators.1
                )?;
            }
            LayerContent::Grid(g) => {
                let counts: Vec<String> = g.counts.iter().map(u64::to_string).collect();
                writeln!(out, "layer {i}: grid counts=({}) M={}", counts.join(","), l.cardinality)?;
            }
            LayerContent::Quotient(q) => {
                writeln!(
                    out,
                    "layer {i}: {} beta={} counts=({}) factors=({}) M={}",
                    q.lattice.name(),
                    q.beta,
                    tables::runs(&q.fit.counts),
                    tables::runs(&q.group.nontrivial_factors()),
                    l.cardinality
                )?;
            }
        }
    }
    writeln!(out, "layers={} total={}", code.layers.len(), code.total_m)?;
    if let Some(p) = &a.out {
        save_codebook(&code, p)?;
    }
    Ok(0)
}

fn bounds(cli: &Cli, a: &BoundsArgs, out: &mut dyn Write) -> Result<i32> {
    if a.dmin.is_empty() {
        return Err(Error::InvalidParameter("no distances given".into()));
    }
    let table = CenterDensityTable::standard();
    let rules: Vec<FaceRule> = if a.both_rules {
        vec![FaceRule::ProjectOnZero, FaceRule::MaxOverFaces]
    } else if a.max_face_rule {
        vec![FaceRule::MaxOverFaces]
    } else {
        vec![FaceRule::ProjectOnZero]
    };
    let mut reports = Vec::new();
    for &d in &a.dmin {
        let family = polygon2d_layers(d)?;
        reports.push(grid_lower_bound(&family, d)?);
        for &r in &rules {
            reports.push(upper_bound(&family, d, &table, r)?);
        }
    }
    let mut body = Vec::new();
    write_reports_csv(&reports, &mut body)?;
    emit(cli, a.out.as_ref(), &body, out)?;
    Ok(0)
}

#[derive(Serialize)]
struct DecodeRow {
    vector: usize,
    layer: usize,
    label: String,
    distance: f64,
    certified: bool,
    tori_examined: usize,
    degenerate: bool,
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

fn decode(cli: &Cli, a: &DecodeArgs, out: &mut dyn Write) -> Result<i32> {
    let code = load_codebook(&a.code)?;
    let vectors = parse_points(&fs::read_to_string(&a.input)?)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for (i, x) in vectors.iter().enumerate() {
        let r = code.decode(x, a.mode).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        w.serialize(DecodeRow {
            vector: i + 1,
            layer: r.label.layer,
            label: r.label.to_string(),
            distance: r.distance,
            certified: r.ml_certified,
            tori_examined: r.tori_examined,
            degenerate: r.degenerate,
        })
        .map_err(csv_error)?;
    }
    let body = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    emit(cli, a.out.as_ref(), &body, out)?;
    Ok(0)
}

#[derive(Serialize)]
struct SimRow {
    snr_db: f64,
    mode: DecodeMode,
    trials: u64,
    errors: u64,
    rate: f64,
    ci_low: f64,
    ci_high: f64,
    certified: u64,
}

fn simulate(cli: &Cli, a: &SimulateArgs, out: &mut dyn Write) -> Result<i32> {
    let code = match &a.code {
        Some(p) => load_codebook(p)?,
        None => build_code(&a.spec)?,
    };
    let modes = match a.mode {
        ModeChoice::Fast => vec![DecodeMode::Fast],
        ModeChoice::Ml => vec![DecodeMode::Ml],
        ModeChoice::Both => vec![DecodeMode::Fast, DecodeMode::Ml],
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    for &snr_db in &a.snr {
        let cfg = AwgnConfig { snr_db, trials: a.trials, seed: a.seed, modes: modes.clone(), threads: None };
        let report = awgn_trial(&code, &cfg)?;
        for s in report.stats {
            w.serialize(SimRow {
                snr_db,
                mode: s.mode,
                trials: s.trials,
                errors: s.errors,
                rate: s.rate,
                ci_low: s.ci_low,
                ci_high: s.ci_high,
                certified: s.certified,
            })
            .map_err(csv_error)?;
        }
    }
    let body = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    emit(cli, a.out.as_ref(), &body, out)?;
    Ok(0)
}

fn slice(a: &SliceArgs, out: &mut dyn Write) -> Result<i32> {
    if a.dim != 5 {
        return Err(Error::InvalidParameter(format!("slice supports dimension 5, got {}", a.dim)));
    }
    let code = sliced_code(a.dmin)?;
    writeln!(out, "# rule: {SLICE_RULE}")?;
    for (i, r) in code.rings.iter().enumerate() {
        let (kind, count) = match &r.content {
            crate::layering::RingContent::Code(c) => ("code", c.total_m.to_string()),
            crate::layering::RingContent::Antipodal => ("antipodal", "2".into()),
            crate::layering::RingContent::Single => ("single", "1".into()),
        };
        writeln!(
            out,
            "ring {i}: height={:.6} radius={:.6} {kind} points={count}",
            r.height, r.ring_radius
        )?;
    }
    if let Some(cell) = reference_cells()?
        .into_iter()
        .find(|c| c.table == "sizes-5d" && c.row.parse::<f64>().ok() == Some(a.dmin))
    {
        let ours = code.total.to_string().parse::<f64>().unwrap_or(f64::NAN);
        let theirs = cell.value.parse::<f64>().unwrap_or(f64::NAN);
        writeln!(out, "published={} deviation={:+.2}%", cell.value, 100.0 * (ours / theirs - 1.0))?;
    }
    if a.verify {
        let pts = code.points(crate::codec::BRUTE_FORCE_CAP)?;
        let mut best = f64::INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                best = best.min(distance(&pts[i], &pts[j]));
            }
        }
        writeln!(out, "verified min distance={best:.6}")?;
        if best < a.dmin - 1e-9 {
            return Err(Error::InvalidParameter(format!("sliced code distance {best} below {}", a.dmin)));
        }
    }
    writeln!(out, "rings={} total={}", code.rings.len(), code.total)?;
    Ok(0)
}
