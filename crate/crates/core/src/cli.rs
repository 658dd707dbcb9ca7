//! Command-line front end: spectra, root sets, the identity suite and thermodynamic curves.

use crate::bae::{
    bae_residuals, charge_from_roots, energy_from_roots, momentum_from_roots, residual_norm,
    solve_bae, RootSet, RootSource, ACCEPT_TOL, SOLVER_TOL,
};
use crate::error::{Error, Result};
use crate::lattice::{ModelParams, MAX_SITES};
use crate::spectrum::{eigenvalue_functions, joint_eigenbasis, EigenvalueFunction, ExactSpectrum};
use crate::thermo::{
    dispersion_curve, ground_energy_density, linear_grid, ExcitationKind, ThermoParams,
    DEFAULT_QUAD_TOL,
};
use crate::verify::{run_suite, VerifyOptions, VerifyReport};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Widest gamma for which type I curves are emitted.
pub const TYPE_ONE_GAMMA_MAX: f64 = 1.5;

#[derive(Parser, Debug)]
#[command(
    name = "chiral-chain",
    version,
    about = "Exact solution toolkit for the chiral antiperiodic spin chain"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact spectrum with per-state zero roots.
    Spectrum(SpectrumArgs),
    /// Integrability identity suite.
    Verify(VerifyArgs),
    /// Bethe root sets refined by Newton iteration, with E, k and q per state.
    Bae(BaeArgs),
    /// Thermodynamic-limit curves.
    #[command(subcommand)]
    Thermo(ThermoCommand),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Number of sites 2N.
    #[arg(long)]
    pub sites: usize,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub a: C64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub eta: C64,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Seed for the random spectral point used to split degenerate levels.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Skip root extraction.
    #[arg(long)]
    pub energies_only: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 4)]
    pub sites: usize,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0.2")]
    pub a: C64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0.6i")]
    pub eta: C64,
    /// Run 2N = 4, 6 in both hermitian regimes instead of the given point.
    #[arg(long)]
    pub sweep: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub points: usize,
    #[arg(long, hide = true)]
    pub inject_sign_error: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SeedSource {
    Ed,
    File,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StateSelection {
    All,
    Ground,
}

#[derive(Args, Debug)]
pub struct BaeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "ed")]
    pub seed_source: SeedSource,
    /// JSON root set (or list of root sets) for --seed-source file.
    #[arg(long)]
    pub roots: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "all")]
    pub states: StateSelection,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Subcommand, Debug)]
pub enum ThermoCommand {
    /// Ground-state energy density along a range of a or of gamma.
    Gs(GsArgs),
    /// Dispersion curve of one excitation branch.
    Dispersion(DispersionArgs),
}

#[derive(Args, Debug)]
pub struct GsArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// lo:hi:step
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true, conflicts_with = "a")]
    pub a_range: Option<Grid>,
    #[arg(long, value_parser = parse_range, conflicts_with = "gamma")]
    pub gamma_range: Option<Grid>,
    #[arg(long, default_value_t = DEFAULT_QUAD_TOL)]
    pub quad_tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct DispersionArgs {
    /// Branch: 1, 2 or 3.
    #[arg(long = "type", value_parser = clap::value_parser!(u8).range(1..=3))]
    pub kind: u8,
    /// String length for type 3.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "-8:8:0.02")]
    pub lambda_range: Grid,
    #[arg(long, default_value_t = DEFAULT_QUAD_TOL)]
    pub quad_tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Parses `0.6i`, `-i`, `0.2+0.3i`, `1e-3-2e-1i` and plain reals.
pub fn parse_complex(s: &str) -> std::result::Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse complex number '{s}'");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return t
            .parse::<f64>()
            .map(|x| C64::new(x, 0.0))
            .map_err(|_| bad());
    };
    // Split at the last sign that is not the leading one and not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |x: &str| -> std::result::Result<f64, String> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(C64::new(re, imag(&body[k..])?))
        }
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

/// Sample points of a `lo:hi:step` range.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid(pub Vec<f64>);

/// Parses `lo:hi:step` into the grid it describes.
pub fn parse_range(s: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected lo:hi:step, got '{s}'"));
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number '{p}' in '{s}'"))
        })
        .collect::<std::result::Result<_, _>>()?;
    linear_grid(v[0], v[1], v[2])
        .map(Grid)
        .map_err(|e| e.to_string())
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn fmt_num(x: f64) -> String {
    round12(x).to_string()
}

fn fmt_complex(z: C64) -> String {
    let floor = 1e-13 * z.norm().max(1.0);
    let clean = |x: f64| if x.abs() < floor { 0.0 } else { round12(x) };
    let (re, im) = (clean(z.re), clean(z.im));
    if im < 0.0 || (im == 0.0 && im.is_sign_negative()) {
        format!("{re}{im}i")
    } else {
        format!("{re}+{im}i")
    }
}

fn fmt_list(v: &[C64]) -> String {
    v.iter()
        .map(|&z| fmt_complex(z))
        .collect::<Vec<_>>()
        .join(";")
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(x) = n.as_f64() {
                if !(n.is_i64() || n.is_u64()) {
                    if let Some(m) = serde_json::Number::from_f64(round12(x)) {
                        *n = m;
                    }
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Provenance block written at the top of every artifact.
#[derive(Clone, Debug, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub parameters: Value,
    pub tolerances: Value,
}

impl Header {
    fn new(command: &str, parameters: Value, tolerances: Value) -> Self {
        Self {
            tool: "chiral-chain",
            version: VERSION,
            command: command.to_string(),
            parameters,
            tolerances,
        }
    }

    fn csv_lines(&self) -> String {
        format!(
            "# {} {} {}\n# parameters: {}\n# tolerances: {}\n",
            self.tool, self.version, self.command, self.parameters, self.tolerances
        )
    }
}

fn envelope(header: &Header, data: &impl Serialize) -> Result<String> {
    let mut v = json!({ "header": header, "data": data });
    round_value(&mut v);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

fn emit(out: &OutputArgs, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match &out.output {
        Some(path) => write_file(path, text),
        None => {
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

fn model(m: &ModelArgs) -> Result<ModelParams> {
    if !m.sites.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "the number of sites must be even, got {}",
            m.sites
        )));
    }
    if m.sites > MAX_SITES {
        return Err(Error::SizeLimit {
            dim: 1usize.checked_shl(m.sites as u32).unwrap_or(usize::MAX),
            cap: 1 << MAX_SITES,
        });
    }
    ModelParams::new(m.sites / 2, m.a, m.eta)
}

fn model_json(p: &ModelParams) -> Value {
    json!({
        "sites": p.sites(),
        "a": fmt_complex(p.a),
        "eta": fmt_complex(p.eta),
    })
}

fn require_hermitian(p: &ModelParams) -> Result<()> {
    if !p.is_hermitian_regime() {
        return Err(Error::Domain(
            "needs a real with eta imaginary, or a imaginary with eta real".into(),
        ));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
struct StateRow {
    state: usize,
    level: usize,
    energy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    z: Option<Vec<C64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    w: Option<Vec<C64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda0_sq: Option<C64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda0: Option<C64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    w0: Option<C64>,
}

#[derive(Clone, Debug, Serialize)]
struct LevelRow {
    level: usize,
    energy: f64,
    degeneracy: usize,
    states: Vec<usize>,
}

fn state_row(spec: &ExactSpectrum, state: usize, f: Option<&EigenvalueFunction>) -> StateRow {
    StateRow {
        state,
        level: spec.state_level[state],
        energy: spec.energy_of_state(state),
        z: f.map(|f| f.z.clone()),
        w: f.map(|f| f.w.clone()),
        lambda0_sq: f.map(|f| f.lambda0_sq),
        lambda0: f.map(|f| f.lambda0),
        w0: f.map(|f| f.w0),
    }
}

fn cmd_spectrum(args: &SpectrumArgs, stdout: &mut dyn Write) -> Result<()> {
    let p = model(&args.model)?;
    require_hermitian(&p)?;
    let spec = joint_eigenbasis(&p, args.seed)?;
    let functions = if args.energies_only {
        None
    } else {
        Some(eigenvalue_functions(&spec)?)
    };
    let levels: Vec<LevelRow> = spec
        .records
        .iter()
        .map(|r| LevelRow {
            level: r.level,
            energy: r.energy,
            degeneracy: r.degeneracy,
            states: r.eigenvector_ids.clone(),
        })
        .collect();
    let mut states: Vec<StateRow> = (0..spec.state_count())
        .map(|s| state_row(&spec, s, functions.as_ref().map(|fs| &fs[s])))
        .collect();
    states.sort_by_key(|r| (r.level, r.state));
    let header = Header::new(
        "spectrum",
        json!({ "model": model_json(&p), "seed": args.seed, "u0": fmt_complex(spec.u0) }),
        json!({ "energy_cluster": 1e-9, "extraction_fit": 1e-8 }),
    );
    let text = match args.out.format.unwrap_or(Format::Json) {
        Format::Json => envelope(&header, &json!({ "levels": levels, "states": states }))?,
        Format::Csv => {
            let mut s = header.csv_lines();
            s.push_str("level,state,energy,degeneracy,lambda0_sq,w0,z,w\n");
            for r in &states {
                let deg = spec.records[r.level].degeneracy;
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.level + 1,
                    r.state,
                    fmt_num(r.energy),
                    deg,
                    r.lambda0_sq.map(fmt_complex).unwrap_or_default(),
                    r.w0.map(fmt_complex).unwrap_or_default(),
                    r.z.as_deref().map(fmt_list).unwrap_or_default(),
                    r.w.as_deref().map(fmt_list).unwrap_or_default(),
                ));
            }
            s
        }
    };
    emit(&args.out, &text, stdout)
}

fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let points = if args.sweep {
        let mut v = Vec::new();
        for half in [2, 3] {
            v.push(ModelParams::new(
                half,
                C64::new(0.2, 0.0),
                C64::new(0.0, 0.6),
            )?);
            v.push(ModelParams::new(
                half,
                C64::new(0.0, 0.2),
                C64::new(0.6, 0.0),
            )?);
        }
        v
    } else {
        vec![model(&ModelArgs {
            sites: args.sites,
            a: args.a,
            eta: args.eta,
        })?]
    };
    let opts = VerifyOptions {
        seed: args.seed,
        points: args.points,
        inject_sign_error: args.inject_sign_error,
    };
    let reports: Vec<VerifyReport> = points
        .iter()
        .map(|p| run_suite(p, &opts))
        .collect::<Result<_>>()?;
    let header = Header::new(
        "verify",
        json!({
            "models": points.iter().map(model_json).collect::<Vec<_>>(),
            "seed": args.seed,
            "points": args.points,
            "inject_sign_error": args.inject_sign_error,
        }),
        json!({ "per_check": "see each check" }),
    );
    let text = match args.out.format.unwrap_or(Format::Json) {
        Format::Json => envelope(&header, &reports)?,
        Format::Csv => {
            let mut s = header.csv_lines();
            s.push_str("sites,a,eta,check,residual,tolerance,passed\n");
            for r in &reports {
                for c in &r.checks {
                    s.push_str(&format!(
                        "{},{},{},{},{:.3e},{:.0e},{}\n",
                        r.params.sites(),
                        fmt_complex(r.params.a),
                        fmt_complex(r.params.eta),
                        c.name,
                        c.residual,
                        c.tolerance,
                        c.passed
                    ));
                }
            }
            s
        }
    };
    emit(&args.out, &text, stdout)?;
    let failed: Vec<String> = reports
        .iter()
        .flat_map(|r| {
            r.failures().into_iter().map(move |c| {
                format!(
                    "2N={} a={} eta={}: {} residual {:.3e} (tolerance {:.0e})",
                    r.params.sites(),
                    fmt_complex(r.params.a),
                    fmt_complex(r.params.eta),
                    c.name,
                    c.residual,
                    c.tolerance
                )
            })
        })
        .collect();
    if !failed.is_empty() {
        for f in &failed {
            writeln!(stderr, "FAIL {f}")?;
        }
        return Err(Error::Verification(failed.join("; ")));
    }
    Ok(())
}

/// A real number or an [re, im] pair.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
enum Num {
    Real(f64),
    Pair(C64),
}

impl From<Num> for C64 {
    fn from(n: Num) -> C64 {
        match n {
            Num::Real(x) => C64::new(x, 0.0),
            Num::Pair(z) => z,
        }
    }
}

/// Hand-entered root set.
#[derive(Clone, Debug, Deserialize)]
struct RootFile {
    z: Vec<Num>,
    w: Vec<Num>,
    lambda0_sq: Num,
    #[serde(default)]
    w0: Option<Num>,
    #[serde(default)]
    lambda0: Option<Num>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RootFileSet {
    Many(Vec<RootFile>),
    One(RootFile),
}

#[derive(Clone, Debug, Serialize)]
struct BaeRow {
    #[serde(skip_serializing_if = "Option::is_none")]
    state: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    level: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy_ed: Option<f64>,
    seed_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    roots: Option<RootSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    momentum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    charge: Option<C64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn solve_row(seed: &RootSet, p: &ModelParams) -> (BaeRow, Option<Error>) {
    let seed_residual = bae_residuals(seed, p)
        .map(|r| residual_norm(&r))
        .unwrap_or(f64::INFINITY);
    let mut row = BaeRow {
        state: None,
        level: None,
        energy_ed: None,
        seed_residual,
        roots: None,
        energy: None,
        momentum: None,
        charge: None,
        error: None,
    };
    let mut failure = None;
    match solve_bae(seed, p) {
        Ok(r) => {
            let observables = (|| -> Result<(f64, f64)> {
                Ok((energy_from_roots(&r.z, p)?, momentum_from_roots(&r.z, p)?))
            })();
            match observables {
                Ok((e, k)) => {
                    row.energy = Some(e);
                    row.momentum = Some(k);
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row.charge = charge_from_roots(&r.z, r.lambda0, p).ok();
            row.roots = Some(r);
        }
        Err(e) => {
            row.error = Some(e.to_string());
            failure = Some(e);
        }
    }
    (row, failure)
}

fn cmd_bae(args: &BaeArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let p = model(&args.model)?;
    let mut rows = Vec::new();
    let mut fatal = Vec::new();
    match args.seed_source {
        SeedSource::Ed => {
            require_hermitian(&p)?;
            let spec = joint_eigenbasis(&p, args.seed)?;
            let functions = eigenvalue_functions(&spec)?;
            for f in &functions {
                if args.states == StateSelection::Ground && f.level != 0 {
                    continue;
                }
                let seed = RootSet::from_eigenvalue_function(f, &p)?;
                let (mut row, failure) = solve_row(&seed, &p);
                row.state = Some(f.state);
                row.level = Some(f.level);
                row.energy_ed = Some(f.energy);
                if let (0, Some(e)) = (f.level, failure) {
                    fatal.push((format!("state {}", f.state), e));
                }
                rows.push(row);
            }
        }
        SeedSource::File => {
            let path = args
                .roots
                .as_ref()
                .ok_or_else(|| Error::Domain("--seed-source file needs --roots <path>".into()))?;
            let text = std::fs::read_to_string(path)?;
            let sets = match serde_json::from_str::<RootFileSet>(&text)? {
                RootFileSet::Many(v) => v,
                RootFileSet::One(r) => vec![r],
            };
            for (k, r) in sets.into_iter().enumerate() {
                let seed = RootSet {
                    z: r.z.into_iter().map(C64::from).collect(),
                    w: r.w.into_iter().map(C64::from).collect(),
                    lambda0_sq: r.lambda0_sq.into(),
                    w0: r.w0.map_or(C64::new(1.0, 0.0), C64::from),
                    residual_norm: 0.0,
                    source: RootSource::Table,
                    lambda0: r.lambda0.map(C64::from),
                };
                let (row, failure) = solve_row(&seed, &p);
                if let Some(e) = failure {
                    fatal.push((format!("entry {k}"), e));
                }
                rows.push(row);
            }
        }
    }
    let header = Header::new(
        "bae",
        json!({
            "model": model_json(&p),
            "seed_source": format!("{:?}", args.seed_source).to_lowercase(),
            "states": format!("{:?}", args.states).to_lowercase(),
            "seed": args.seed,
        }),
        json!({ "solver": SOLVER_TOL, "accept": ACCEPT_TOL }),
    );
    let text = match args.out.format.unwrap_or(Format::Json) {
        Format::Json => envelope(&header, &rows)?,
        Format::Csv => {
            let mut s = header.csv_lines();
            s.push_str(
                "state,level,seed_residual,residual,energy,momentum,charge,lambda0_sq,z,w,error\n",
            );
            let opt = |x: Option<f64>| x.map(fmt_num).unwrap_or_default();
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{:.3e},{},{},{},{},{},{},{},{}\n",
                    r.state.map(|x| x.to_string()).unwrap_or_default(),
                    r.level.map(|x| (x + 1).to_string()).unwrap_or_default(),
                    r.seed_residual,
                    r.roots
                        .as_ref()
                        .map(|x| format!("{:.3e}", x.residual_norm))
                        .unwrap_or_default(),
                    opt(r.energy),
                    opt(r.momentum),
                    r.charge.map(fmt_complex).unwrap_or_default(),
                    r.roots
                        .as_ref()
                        .map(|x| fmt_complex(x.lambda0_sq))
                        .unwrap_or_default(),
                    r.roots.as_ref().map(|x| fmt_list(&x.z)).unwrap_or_default(),
                    r.roots.as_ref().map(|x| fmt_list(&x.w)).unwrap_or_default(),
                    r.error.clone().unwrap_or_default().replace(',', ";"),
                ));
            }
            s
        }
    };
    emit(&args.out, &text, stdout)?;
    for (label, e) in &fatal {
        writeln!(stderr, "{label}: {e}")?;
    }
    match fatal.into_iter().next() {
        Some((_, e)) => Err(e),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, Serialize)]
struct GsRow {
    a: f64,
    gamma: f64,
    e_g: f64,
}

#[derive(Clone, Debug, Serialize)]
struct Failure {
    a: f64,
    gamma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    message: String,
}

fn cmd_gs(args: &GsArgs, stdout: &mut dyn Write) -> Result<()> {
    let pairs: Vec<(f64, f64)> = match (&args.a_range, args.a, &args.gamma_range, args.gamma) {
        (Some(r), None, None, Some(g)) => r.0.iter().map(|&a| (a, g)).collect(),
        (None, Some(a), Some(r), None) => r.0.iter().map(|&g| (a, g)).collect(),
        (None, Some(a), None, Some(g)) => vec![(a, g)],
        _ => {
            return Err(Error::Domain(
                "give --gamma with --a-range, --a with --gamma-range, or --a with --gamma".into(),
            ))
        }
    };
    let results: Vec<(f64, f64, Result<f64>)> = pairs
        .par_iter()
        .map(|&(a, g)| {
            let e =
                ThermoParams::with_tol(a, g, args.quad_tol).and_then(|t| ground_energy_density(&t));
            (a, g, e)
        })
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (a, g, r) in results {
        match r {
            Ok(e_g) => rows.push(GsRow { a, gamma: g, e_g }),
            Err(e) => failures.push(Failure {
                a,
                gamma: g,
                lambda: None,
                message: e.to_string(),
            }),
        }
    }
    let header = Header::new(
        "thermo gs",
        json!({ "a": args.a, "gamma": args.gamma, "a_range": args.a_range.as_ref().map(|r| r.0.len()),
                "gamma_range": args.gamma_range.as_ref().map(|r| r.0.len()) }),
        json!({ "quad_tol": args.quad_tol }),
    );
    let text = match args.out.format.unwrap_or(Format::Csv) {
        Format::Json => envelope(&header, &json!({ "samples": rows, "failures": failures }))?,
        Format::Csv => {
            let mut s = header.csv_lines();
            for f in &failures {
                s.push_str(&format!(
                    "# failed a={} gamma={}: {}\n",
                    f.a, f.gamma, f.message
                ));
            }
            s.push_str("a,gamma,e_g\n");
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{}\n",
                    fmt_num(r.a),
                    fmt_num(r.gamma),
                    fmt_num(r.e_g)
                ));
            }
            s
        }
    };
    emit(&args.out, &text, stdout)
}

fn cmd_dispersion(args: &DispersionArgs, stdout: &mut dyn Write) -> Result<()> {
    let t = ThermoParams::with_tol(args.a, args.gamma, args.quad_tol)?;
    let kind = match args.kind {
        1 => {
            if args.gamma > TYPE_ONE_GAMMA_MAX {
                return Err(Error::Domain(format!(
                    "type 1 curves are emitted for gamma <= {TYPE_ONE_GAMMA_MAX}, got {}",
                    args.gamma
                )));
            }
            ExcitationKind::I
        }
        2 => {
            if args.gamma >= 2.0 * PI / 3.0 {
                return Err(Error::Domain(format!(
                    "type 2 needs gamma < 2 pi/3 (decay of cosh((pi - 3 gamma) tau)/sinh(pi tau)), got {}",
                    args.gamma
                )));
            }
            ExcitationKind::II
        }
        _ => {
            let n = args
                .n
                .ok_or_else(|| Error::Domain("type 3 needs --n".into()))?;
            if n < 3 {
                return Err(Error::Domain(format!("type 3 needs n >= 3, got {n}")));
            }
            ExcitationKind::III { n }
        }
    };
    let curve = dispersion_curve(kind, &t, &args.lambda_range.0);
    let failures: Vec<Failure> = curve
        .failures
        .iter()
        .map(|f| Failure {
            a: args.a,
            gamma: args.gamma,
            lambda: Some(f.lambda),
            message: f.message.clone(),
        })
        .collect();
    let header = Header::new(
        "thermo dispersion",
        json!({ "type": args.kind, "n": args.n, "a": args.a, "gamma": args.gamma,
                "lambda_points": args.lambda_range.0.len() }),
        json!({ "quad_tol": args.quad_tol }),
    );
    let text = match args.out.format.unwrap_or(Format::Csv) {
        Format::Json => envelope(
            &header,
            &json!({ "samples": curve.samples, "failures": failures }),
        )?,
        Format::Csv => {
            let mut s = header.csv_lines();
            for f in &failures {
                s.push_str(&format!(
                    "# failed lambda={}: {}\n",
                    f.lambda.unwrap_or(f64::NAN),
                    f.message
                ));
            }
            s.push_str("kind,n,lambda,delta_e,k,a,gamma\n");
            let n = kind
                .string_length()
                .map(|n| n.to_string())
                .unwrap_or_default();
            for x in &curve.samples {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    kind,
                    n,
                    fmt_num(x.lambda),
                    fmt_num(x.delta_e),
                    fmt_num(x.k),
                    fmt_num(args.a),
                    fmt_num(args.gamma)
                ));
            }
            s
        }
    };
    emit(&args.out, &text, stdout)
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout, stderr),
        Command::Bae(a) => cmd_bae(a, stdout, stderr),
        Command::Thermo(ThermoCommand::Gs(a)) => cmd_gs(a, stdout),
        Command::Thermo(ThermoCommand::Dispersion(a)) => cmd_dispersion(a, stdout),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bae::tables::table_two;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["chiral-chain"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn complex_literals() {
        let cases = [
            ("0.6i", c(0.0, 0.6)),
            ("0.2", c(0.2, 0.0)),
            ("0.2+0.3i", c(0.2, 0.3)),
            ("-0.2-0.3i", c(-0.2, -0.3)),
            ("i", c(0.0, 1.0)),
            ("-i", c(0.0, -1.0)),
            ("1e-3+2e-1i", c(1e-3, 0.2)),
            ("-1.5e+2i", c(0.0, -150.0)),
            ("0.5-i", c(0.5, -1.0)),
        ];
        for (s, want) in cases {
            assert_eq!(parse_complex(s).unwrap(), want, "{s}");
        }
        for s in ["", "x", "0.2+", "1+2+3i", "ii"] {
            assert!(parse_complex(s).is_err(), "{s}");
        }
    }

    #[test]
    fn ranges_and_rounding() {
        assert_eq!(parse_range("0:1:0.25").unwrap().0.len(), 5);
        assert_eq!(parse_range("-1:1:1").unwrap().0, vec![-1.0, 0.0, 1.0]);
        assert!(parse_range("0:1").is_err());
        assert!(parse_range("0:1:0").is_err());
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(-1.23456789012345e-7), -1.23456789012e-7);
    }

    #[test]
    fn spectrum_csv_lists_every_state() {
        let (code, out, err) = run_capture(&[
            "spectrum", "--sites", "4", "--a", "0.2", "--eta", "0.6i", "--format", "csv",
        ]);
        assert_eq!(code, 0, "{err}");
        let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
        assert!(rows[0].starts_with("level,state,energy"));
        assert_eq!(rows.len(), 17);
        let energies: Vec<f64> = rows[1..]
            .iter()
            .map(|r| r.split(',').nth(2).unwrap().parse().unwrap())
            .collect();
        assert!(energies.windows(2).all(|w| w[0] <= w[1] + 1e-9));
        let trace: f64 = energies.iter().sum();
        assert!(trace.abs() < 1e-8);
    }

    #[test]
    fn spectrum_json_envelope() {
        let (code, out, _) =
            run_capture(&["spectrum", "--sites", "4", "--a", "0.2", "--eta", "0.6i"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["header"]["command"], "spectrum");
        assert_eq!(v["header"]["version"], VERSION);
        assert_eq!(v["data"]["states"].as_array().unwrap().len(), 16);
        assert_eq!(v["data"]["states"][0]["z"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn argument_errors_exit_one() {
        assert_eq!(
            run_capture(&["spectrum", "--sites", "5", "--a", "0.2", "--eta", "0.6i"]).0,
            1
        );
        assert_eq!(
            run_capture(&["spectrum", "--sites", "14", "--a", "0.2", "--eta", "0.6i"]).0,
            1
        );
        assert_eq!(
            run_capture(&["spectrum", "--sites", "2", "--a", "0.2", "--eta", "0.6i"]).0,
            1
        );
        assert_eq!(
            run_capture(&["spectrum", "--sites", "4", "--a", "0.3+0.1i", "--eta", "0.6i"]).0,
            1
        );
        assert_eq!(run_capture(&["spectrum", "--sites", "4"]).0, 1);
        assert_eq!(run_capture(&["bogus"]).0, 1);
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("thermo"));
    }

    #[test]
    fn verify_passes_and_negative_control_fails() {
        let (code, out, err) = run_capture(&["verify"]);
        assert_eq!(code, 0, "{err}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["data"][0]["checks"].as_array().unwrap().len(), 13);

        let (code, _, err) = run_capture(&["verify", "--inject-sign-error", "--format", "csv"]);
        assert_eq!(code, 4);
        assert!(err.contains("yang-baxter"));
        assert!(err.contains("residual"));
    }

    #[test]
    fn verify_sweep_covers_both_regimes() {
        let (code, out, err) = run_capture(&["verify", "--sweep", "--format", "csv"]);
        assert_eq!(code, 0, "{err}");
        let rows = out.lines().filter(|l| !l.starts_with('#')).count() - 1;
        assert_eq!(rows, 4 * 13);
    }

    #[test]
    fn bae_from_ed_ground() {
        let (code, out, err) = run_capture(&[
            "bae", "--sites", "4", "--a", "0.2", "--eta", "0.6i", "--states", "ground",
        ]);
        assert_eq!(code, 0, "{err}");
        let v: Value = serde_json::from_str(&out).unwrap();
        let rows = v["data"].as_array().unwrap();
        assert!(!rows.is_empty());
        for r in rows {
            let e = r["energy"].as_f64().unwrap();
            let e_ed = r["energy_ed"].as_f64().unwrap();
            assert!((e - e_ed).abs() < 1e-8, "{e} vs {e_ed}");
            assert!(r["roots"]["residual_norm"].as_f64().unwrap() < ACCEPT_TOL);
            assert!(!r["charge"].is_null());
        }
    }

    #[test]
    fn bae_round_trip_all_states() {
        let (code, out, err) = run_capture(&["bae", "--sites", "4", "--a", "0.2", "--eta", "0.6i"]);
        assert_eq!(code, 0, "{err}");
        let v: Value = serde_json::from_str(&out).unwrap();
        let rows = v["data"].as_array().unwrap();
        assert_eq!(rows.len(), 16);
        for r in rows {
            let (e, e_ed) = (
                r["energy"].as_f64().unwrap(),
                r["energy_ed"].as_f64().unwrap(),
            );
            assert!(
                (e - e_ed).abs() < 1e-8,
                "state {}: {e} vs {e_ed}",
                r["state"]
            );
        }
    }

    #[test]
    fn bae_ground_roots_real_at_eight_sites() {
        let (code, out, err) = run_capture(&[
            "bae", "--sites", "8", "--a", "0.2", "--eta", "0.6i", "--states", "ground",
        ]);
        assert_eq!(code, 0, "{err}");
        let v: Value = serde_json::from_str(&out).unwrap();
        for r in v["data"].as_array().unwrap() {
            let z = r["roots"]["z"].as_array().unwrap();
            assert_eq!(z.len(), 7);
            for root in z {
                assert!(root[1].as_f64().unwrap().abs() < 1e-8, "{root}");
            }
        }
    }

    #[test]
    fn spectrum_at_zero_a_is_xxz() {
        let (code, out, _) = run_capture(&[
            "spectrum",
            "--sites",
            "6",
            "--a",
            "0",
            "--eta",
            "0.6i",
            "--energies-only",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let mut got: Vec<f64> = v["data"]["states"]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| s["energy"].as_f64().unwrap())
            .collect();
        got.sort_by(f64::total_cmp);
        let h = crate::lattice::xxz_antiperiodic(3, c(0.0, 0.6)).unwrap();
        let want = crate::linalg::eigenvalues_hermitian(&h).unwrap();
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-9, "{g} vs {w}");
        }
    }

    #[test]
    fn bae_from_file_row() {
        let row = &table_two()[7];
        let path = std::env::temp_dir().join(format!("chiral-roots-{}.json", std::process::id()));
        let pair = |z: C64| json!([z.re, z.im]);
        let body = json!({
            "z": row.z.iter().map(|&z| pair(z)).collect::<Vec<_>>(),
            "w": row.w.iter().map(|&z| pair(z)).collect::<Vec<_>>(),
            "lambda0_sq": row.lambda0_sq,
        });
        std::fs::write(&path, body.to_string()).unwrap();
        let (code, out, err) = run_capture(&[
            "bae",
            "--sites",
            "4",
            "--a",
            "0.2i",
            "--eta",
            "0.6",
            "--seed-source",
            "file",
            "--roots",
            path.to_str().unwrap(),
            "--format",
            "csv",
        ]);
        std::fs::remove_file(&path).ok();
        assert_eq!(code, 0, "{err}");
        let line = out
            .lines()
            .find(|l| !l.starts_with('#') && !l.starts_with("state"))
            .unwrap();
        let fields: Vec<&str> = line.split(',').collect();
        let seed_residual: f64 = fields[2].parse().unwrap();
        assert!(seed_residual < 1e-3);
        let e: f64 = fields[4].parse().unwrap();
        assert!((e - row.energy).abs() < 1e-3, "{e} vs {}", row.energy);
        assert_eq!(fields[6], "", "charge needs the sign of lambda0");
    }

    #[test]
    fn bae_missing_file_is_io_error() {
        let (code, _, _) = run_capture(&[
            "bae",
            "--sites",
            "4",
            "--a",
            "0.2",
            "--eta",
            "0.6i",
            "--seed-source",
            "file",
            "--roots",
            "/nonexistent/roots.json",
        ]);
        assert_eq!(code, 3);
    }

    #[test]
    fn thermo_gs_range() {
        let (code, out, err) =
            run_capture(&["thermo", "gs", "--gamma", "0.6", "--a-range", "0:0.4:0.2"]);
        assert_eq!(code, 0, "{err}");
        let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], "a,gamma,e_g");
        assert_eq!(rows.len(), 4);
        let e: f64 = rows[2].split(',').nth(2).unwrap().parse().unwrap();
        assert!((e + 1.3349978773762208).abs() < 1e-9);
        assert_eq!(run_capture(&["thermo", "gs", "--gamma", "0.6"]).0, 1);
        assert_eq!(
            run_capture(&["thermo", "gs", "--a", "0.1", "--gamma", "3.5"]).0,
            0
        );
    }

    #[test]
    fn thermo_dispersion_type_three() {
        let (code, out, err) = run_capture(&[
            "thermo",
            "dispersion",
            "--type",
            "3",
            "--n",
            "5",
            "--a",
            "0.6",
            "--gamma",
            "0.4",
            "--lambda-range",
            "-2:2:0.5",
        ]);
        assert_eq!(code, 0, "{err}");
        let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], "kind,n,lambda,delta_e,k,a,gamma");
        assert_eq!(rows.len(), 10);
        for r in &rows[1..] {
            let f: Vec<&str> = r.split(',').collect();
            assert_eq!(f[0], "III");
            assert_eq!(f[1], "5");
            assert!(f[3].parse::<f64>().unwrap().is_finite());
            assert!(f[4].parse::<f64>().unwrap().abs() <= PI + 1e-12);
        }
    }

    #[test]
    fn thermo_dispersion_domain_checks() {
        let base = [
            "thermo",
            "dispersion",
            "--a",
            "0.2",
            "--lambda-range",
            "0:1:0.5",
        ];
        let with = |extra: &[&str]| {
            let mut v = base.to_vec();
            v.extend_from_slice(extra);
            run_capture(&v).0
        };
        assert_eq!(with(&["--type", "1", "--gamma", "1.6"]), 1);
        assert_eq!(with(&["--type", "2", "--gamma", "2.1"]), 1);
        assert_eq!(with(&["--type", "3", "--n", "2", "--gamma", "0.4"]), 1);
        assert_eq!(with(&["--type", "3", "--gamma", "0.4"]), 1);
        assert_eq!(with(&["--type", "4", "--gamma", "0.4"]), 1);
        assert_eq!(with(&["--type", "2", "--gamma", "0.6"]), 0);
    }

    #[test]
    fn output_file_written() {
        let path = std::env::temp_dir().join(format!("chiral-gs-{}.json", std::process::id()));
        let (code, out, _) = run_capture(&[
            "thermo",
            "gs",
            "--a",
            "0.2",
            "--gamma",
            "0.6",
            "--format",
            "json",
            "-o",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        assert!(out.is_empty());
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        std::fs::remove_file(&path).ok();
        assert_eq!(v["header"]["command"], "thermo gs");
        assert_eq!(v["data"]["samples"].as_array().unwrap().len(), 1);
    }
}
