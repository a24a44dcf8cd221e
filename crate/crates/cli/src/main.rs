//! skinband command line: complex Bloch spectra, winding maps, skin-effect
//! metrics, band-merging scans, and edge-state reports for the gauged 1D
//! crystal H = -(d/dx + beta)^2 + V(x).
//!
//! Every run writes one artifact file per result (CSV for curves, JSON for
//! scalars) plus `<artifact>.meta.json` holding {version, subcommand,
//! config, wall_time_s}. Artifacts contain no timestamps: identical configs
//! give byte-identical artifacts. Flags override values from `--config`;
//! the fully resolved configuration is echoed into the metadata and can be
//! replayed verbatim with `--config`.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use skinband::bloch::{band_intervals, pbc_spectrum, BlochConfig, SpectrumCurves};
use skinband::io::{
    fmt_f64, read_tabulated_csv, write_eigenvector_csv, write_json, write_spectrum_csv,
    WindingRecord,
};
use skinband::models::{
    dirac_beta_c, dirac_ep_check, dirac_gap_width, lame2_beta_c, lame2_beta_of_ki, DiracParams,
    Lame2Params,
};
use skinband::potentials::Potential;
use skinband::realspace::{obc_spectrum, skin_metrics, Boundary, GridSpec};
use skinband::topology::{
    beta_critical_scan, classify_sibc, classify_sibc_grid, edge_state_profile_with,
    winding_number,
};
use skinband::{Complex64, Error};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Parser, Debug)]
#[command(
    name = "skinband",
    version,
    about = "Complex band structure, winding, and skin-effect toolkit for 1D gauged crystals"
)]
struct Cli {
    /// JSON config file; command-line flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Bloch spectrum over the Brillouin zone as k,band,re_e,im_e CSV
    Spectrum(SpectrumCmd),
    /// Real band intervals of the Hermitian (beta = 0) problem as JSON
    Bands(BandsCmd),
    /// Spectral winding number at one base energy or over a rectangular grid
    Winding(WindingCmd),
    /// Open-chain eigenvector localization metrics
    Skin(SkinCmd),
    /// Classify a base energy against the semi-infinite-boundary spectrum
    Edge(EdgeCmd),
    /// Bisect the gauge field at which the spectrum merges into a target
    /// number of connected components
    Merge(MergeCmd),
    /// Closed-form merging threshold of the two-gap elliptic potential
    MergeTheory(MergeTheoryCmd),
    /// Two-band shallow-lattice model: gap closing and exceptional point
    Dirac(DiracCmd),
}

#[derive(Args, Debug, Default)]
struct PotentialArgs {
    /// Potential kind: lame | double-well | mathieu | free | table
    #[arg(long)]
    potential: Option<String>,
    /// Lame index (lame only)
    #[arg(long = "N")]
    n: Option<u32>,
    /// Elliptic parameter in (0, 1) (lame only; fixes the period a = 2K(m))
    #[arg(long)]
    m: Option<f64>,
    /// Gaussian well width (double-well only)
    #[arg(long)]
    sigma: Option<f64>,
    /// Cosine amplitude (mathieu only)
    #[arg(long)]
    v0: Option<f64>,
    /// Lattice period
    #[arg(long)]
    a: Option<f64>,
    /// CSV file with one period of uniform x,V samples (table only)
    #[arg(long)]
    table: Option<String>,
}

#[derive(Args, Debug, Default)]
struct BlochArgs {
    /// Imaginary gauge field; negative values are mirror-reduced
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Plane-wave cutoff; the basis holds 2 n_pw + 1 waves
    #[arg(long)]
    n_pw: Option<usize>,
    /// Brillouin-zone sample count
    #[arg(long)]
    k_points: Option<usize>,
}

#[derive(Args, Debug)]
struct SpectrumCmd {
    #[command(flatten)]
    pot: PotentialArgs,
    #[command(flatten)]
    bloch: BlochArgs,
    /// Output CSV path [default: spectrum.csv]
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct BandsCmd {
    #[command(flatten)]
    pot: PotentialArgs,
    #[command(flatten)]
    bloch: BlochArgs,
    /// Output JSON path [default: bands.json]
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct WindingCmd {
    #[command(flatten)]
    pot: PotentialArgs,
    #[command(flatten)]
    bloch: BlochArgs,
    /// Single base energy "re,im"; on-spectrum points are a hard error
    #[arg(long, allow_hyphen_values = true)]
    e_b: Option<String>,
    /// Rectangular base-energy grid "re0,re1,nre,im0,im1,nim" (re-major
    /// order); uncertifiable points get null entries
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Also classify every point against the SIBC spectrum
    #[arg(long)]
    classify: bool,
    /// Gauge subdivisions of [0, beta] for the classification scan
    #[arg(long)]
    n_scan: Option<usize>,
    /// Output JSON path [default: winding.json]
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct SkinCmd {
    #[command(flatten)]
    pot: PotentialArgs,
    /// Imaginary gauge field; the sign selects the pinned wall
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Crystal length in cells
    #[arg(long = "M")]
    cells: Option<usize>,
    /// Grid nodes per cell
    #[arg(long = "P")]
    points_per_cell: Option<usize>,
    /// Eigenvector selector: "mid" or a 0-based index into the ascending
    /// open-chain spectrum
    #[arg(long)]
    mode: Option<String>,
    /// Also write the selected eigenvector as x,re_psi,im_psi,abs_psi CSV
    #[arg(long)]
    dump_vector: Option<String>,
    /// Output JSON path [default: skin.json]
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct EdgeCmd {
    #[command(flatten)]
    pot: PotentialArgs,
    #[command(flatten)]
    bloch: BlochArgs,
    /// Base energy "re,im"
    #[arg(long, allow_hyphen_values = true)]
    e_b: Option<String>,
    /// Synthesize the localized edge state and write its profile CSV here
    #[arg(long)]
    profile_out: Option<String>,
    /// Profile length in cells
    #[arg(long)]
    cells: Option<usize>,
    /// Profile nodes per cell
    #[arg(long)]
    points_per_cell: Option<usize>,
    /// Output JSON path [default: edge.json]
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct MergeCmd {
    #[command(flatten)]
    pot: PotentialArgs,
    #[command(flatten)]
    bloch: BlochArgs,
    /// Lower edge of the gauge bracket
    #[arg(long, allow_hyphen_values = true)]
    beta_lo: Option<f64>,
    /// Upper edge of the gauge bracket
    #[arg(long, allow_hyphen_values = true)]
    beta_hi: Option<f64>,
    /// Component count to bisect to [default: 1]
    #[arg(long)]
    target: Option<usize>,
    /// Output JSON path [default: merge.json]
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct MergeTheoryCmd {
    /// Elliptic parameter in (0, 1); the period is 2K(m)
    #[arg(long)]
    m: Option<f64>,
    /// Period (alternative to --m; must be >= 2)
    #[arg(long)]
    a: Option<f64>,
    /// Write the channel-opening curve beta(k_I) as ki,beta CSV here
    #[arg(long)]
    curve_out: Option<String>,
    /// Interior points in the curve CSV [default: 256]
    #[arg(long)]
    curve_points: Option<usize>,
    /// Output JSON path [default: merge_theory.json]
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct DiracCmd {
    /// Lattice depth [default: 0.1]
    #[arg(long)]
    v0: Option<f64>,
    /// Lattice period [default: 2 pi]
    #[arg(long)]
    a: Option<f64>,
    /// Also report the first-gap width at this gauge value
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Output JSON path [default: dirac.json]
    #[arg(long)]
    out: Option<String>,
}

/// Serializable mirror of every flag. The config file uses the same field
/// names; flags override file values field by field, and the merged result
/// is echoed to the metadata, so a run can be replayed exactly from its own
/// metadata. Unknown keys in the file are rejected.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RunConfig {
    potential: Option<String>,
    n: Option<u32>,
    m: Option<f64>,
    sigma: Option<f64>,
    v0: Option<f64>,
    a: Option<f64>,
    table: Option<String>,
    beta: Option<f64>,
    n_pw: Option<usize>,
    k_points: Option<usize>,
    e_b: Option<[f64; 2]>,
    grid: Option<[f64; 6]>,
    classify: Option<bool>,
    n_scan: Option<usize>,
    cells: Option<usize>,
    points_per_cell: Option<usize>,
    mode: Option<String>,
    beta_lo: Option<f64>,
    beta_hi: Option<f64>,
    target: Option<usize>,
    curve_points: Option<usize>,
    out: Option<String>,
    dump_vector: Option<String>,
    profile_out: Option<String>,
    curve_out: Option<String>,
}

impl RunConfig {
    /// Field-wise merge: `self` (flags) wins over `under` (config file).
    fn overlay(self, under: RunConfig) -> RunConfig {
        RunConfig {
            potential: self.potential.or(under.potential),
            n: self.n.or(under.n),
            m: self.m.or(under.m),
            sigma: self.sigma.or(under.sigma),
            v0: self.v0.or(under.v0),
            a: self.a.or(under.a),
            table: self.table.or(under.table),
            beta: self.beta.or(under.beta),
            n_pw: self.n_pw.or(under.n_pw),
            k_points: self.k_points.or(under.k_points),
            e_b: self.e_b.or(under.e_b),
            grid: self.grid.or(under.grid),
            classify: self.classify.or(under.classify),
            n_scan: self.n_scan.or(under.n_scan),
            cells: self.cells.or(under.cells),
            points_per_cell: self.points_per_cell.or(under.points_per_cell),
            mode: self.mode.or(under.mode),
            beta_lo: self.beta_lo.or(under.beta_lo),
            beta_hi: self.beta_hi.or(under.beta_hi),
            target: self.target.or(under.target),
            curve_points: self.curve_points.or(under.curve_points),
            out: self.out.or(under.out),
            dump_vector: self.dump_vector.or(under.dump_vector),
            profile_out: self.profile_out.or(under.profile_out),
            curve_out: self.curve_out.or(under.curve_out),
        }
    }
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Lib(Error::Domain(_)) => 3,
            Failure::Lib(Error::Numerical(_)) => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

struct Artifact {
    path: PathBuf,
    bytes: Vec<u8>,
}

impl Artifact {
    fn new(path: impl Into<PathBuf>, bytes: Vec<u8>) -> Artifact {
        Artifact {
            path: path.into(),
            bytes,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("SKINBAND_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = skinband::configure_threads(n);
            }
            _ => {
                eprintln!("error: SKINBAND_THREADS must be a positive integer, got {v:?}");
                return ExitCode::from(2);
            }
        }
    }
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let t0 = Instant::now();
    let file_cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                Failure::Usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            serde_json::from_str::<RunConfig>(&text)
                .map_err(|e| Failure::Usage(format!("bad config file: {e}")))?
        }
        None => RunConfig::default(),
    };
    let (name, flag_cfg) = flags_to_config(&cli.cmd)?;
    let mut cfg = flag_cfg.overlay(file_cfg);

    let artifacts = match &cli.cmd {
        Cmd::Spectrum(_) => run_spectrum(&mut cfg),
        Cmd::Bands(_) => run_bands(&mut cfg),
        Cmd::Winding(_) => run_winding(&mut cfg),
        Cmd::Skin(_) => run_skin(&mut cfg),
        Cmd::Edge(_) => run_edge(&mut cfg),
        Cmd::Merge(_) => run_merge(&mut cfg),
        Cmd::MergeTheory(_) => run_merge_theory(&mut cfg),
        Cmd::Dirac(_) => run_dirac(&mut cfg),
    }?;

    write_all_or_none(&artifacts)?;

    let meta = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": name,
        "config": cfg,
        "wall_time_s": t0.elapsed().as_secs_f64(),
    });
    let meta_path = format!("{}.meta.json", cfg.out.as_deref().unwrap_or(name));
    let mut buf = Vec::new();
    write_json(&mut buf, &meta)?;
    if let Err(e) = fs::write(&meta_path, &buf) {
        let _ = fs::remove_file(&meta_path);
        for a in &artifacts {
            let _ = fs::remove_file(&a.path);
        }
        return Err(Failure::Lib(Error::Numerical(format!(
            "writing {meta_path} failed: {e}"
        ))));
    }
    Ok(())
}

/// Lowers the parsed flags into the serializable config. Only syntactic
/// work happens here (pair/grid strings to numbers); value validation is
/// the owning module's job.
fn flags_to_config(cmd: &Cmd) -> Result<(&'static str, RunConfig), Failure> {
    let mut c = RunConfig::default();
    let name = match cmd {
        Cmd::Spectrum(s) => {
            apply_pot(&s.pot, &mut c);
            apply_bloch(&s.bloch, &mut c);
            c.out = s.out.clone();
            "spectrum"
        }
        Cmd::Bands(s) => {
            apply_pot(&s.pot, &mut c);
            apply_bloch(&s.bloch, &mut c);
            c.out = s.out.clone();
            "bands"
        }
        Cmd::Winding(s) => {
            apply_pot(&s.pot, &mut c);
            apply_bloch(&s.bloch, &mut c);
            c.e_b = s.e_b.as_deref().map(parse_pair).transpose()?;
            c.grid = s.grid.as_deref().map(parse_grid6).transpose()?;
            c.classify = s.classify.then_some(true);
            c.n_scan = s.n_scan;
            c.out = s.out.clone();
            "winding"
        }
        Cmd::Skin(s) => {
            apply_pot(&s.pot, &mut c);
            c.beta = s.beta;
            c.cells = s.cells;
            c.points_per_cell = s.points_per_cell;
            c.mode = s.mode.clone();
            c.dump_vector = s.dump_vector.clone();
            c.out = s.out.clone();
            "skin"
        }
        Cmd::Edge(s) => {
            apply_pot(&s.pot, &mut c);
            apply_bloch(&s.bloch, &mut c);
            c.e_b = s.e_b.as_deref().map(parse_pair).transpose()?;
            c.profile_out = s.profile_out.clone();
            c.cells = s.cells;
            c.points_per_cell = s.points_per_cell;
            c.out = s.out.clone();
            "edge"
        }
        Cmd::Merge(s) => {
            apply_pot(&s.pot, &mut c);
            apply_bloch(&s.bloch, &mut c);
            c.beta_lo = s.beta_lo;
            c.beta_hi = s.beta_hi;
            c.target = s.target;
            c.out = s.out.clone();
            "merge"
        }
        Cmd::MergeTheory(s) => {
            c.m = s.m;
            c.a = s.a;
            c.curve_out = s.curve_out.clone();
            c.curve_points = s.curve_points;
            c.out = s.out.clone();
            "merge-theory"
        }
        Cmd::Dirac(s) => {
            c.v0 = s.v0;
            c.a = s.a;
            c.beta = s.beta;
            c.out = s.out.clone();
            "dirac"
        }
    };
    Ok((name, c))
}

fn apply_pot(p: &PotentialArgs, c: &mut RunConfig) {
    c.potential = p.potential.clone();
    c.n = p.n;
    c.m = p.m;
    c.sigma = p.sigma;
    c.v0 = p.v0;
    c.a = p.a;
    c.table = p.table.clone();
}

fn apply_bloch(b: &BlochArgs, c: &mut RunConfig) {
    c.beta = b.beta;
    c.n_pw = b.n_pw;
    c.k_points = b.k_points;
}

fn parse_pair(s: &str) -> Result<[f64; 2], Failure> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() == 2 {
        if let (Ok(re), Ok(im)) = (parts[0].trim().parse(), parts[1].trim().parse()) {
            return Ok([re, im]);
        }
    }
    Err(Failure::Usage(format!(
        "expected a complex pair \"re,im\", got {s:?}"
    )))
}

fn parse_grid6(s: &str) -> Result<[f64; 6], Failure> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() == 6 {
        let mut out = [0.0; 6];
        if parts
            .iter()
            .zip(out.iter_mut())
            .all(|(p, slot)| match p.trim().parse() {
                Ok(v) => {
                    *slot = v;
                    true
                }
                Err(_) => false,
            })
        {
            return Ok(out);
        }
    }
    Err(Failure::Usage(format!(
        "expected a grid \"re0,re1,nre,im0,im1,nim\", got {s:?}"
    )))
}

fn require<T>(v: Option<T>, what: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("missing required parameter {what}")))
}

/// Builds the potential and writes every resolved default back into the
/// config so the metadata echo replays exactly.
fn build_potential(cfg: &mut RunConfig) -> Result<Potential, Failure> {
    let kind = cfg
        .potential
        .get_or_insert_with(|| "mathieu".to_string())
        .clone();
    match kind.as_str() {
        "lame" => {
            let index = *cfg.n.get_or_insert(2);
            let m = require(cfg.m, "--m (elliptic parameter)")?;
            let p = Potential::lame(index, m)?;
            reconcile_period(cfg, &p)?;
            Ok(p)
        }
        "double-well" => {
            let sigma = require(cfg.sigma, "--sigma (well width)")?;
            let a = *cfg.a.get_or_insert(10.0);
            Ok(Potential::double_well(sigma, a)?)
        }
        "mathieu" => {
            let v0 = *cfg.v0.get_or_insert(1.0);
            let a = *cfg.a.get_or_insert(TWO_PI);
            Ok(Potential::mathieu(v0, a)?)
        }
        "free" => {
            let a = *cfg.a.get_or_insert(TWO_PI);
            Ok(Potential::free(a)?)
        }
        "table" => {
            let path = require(cfg.table.clone(), "--table (sample CSV)")?;
            let file = fs::File::open(&path)
                .map_err(|e| Failure::Usage(format!("cannot open table {path}: {e}")))?;
            let samples = read_tabulated_csv(std::io::BufReader::new(file))?;
            let p = Potential::tabulated(&samples)?;
            reconcile_period(cfg, &p)?;
            Ok(p)
        }
        other => Err(Failure::Usage(format!(
            "unknown potential kind {other:?}; expected lame | double-well | mathieu | free | table"
        ))),
    }
}

/// lame and table fix the period themselves; an explicit --a must agree.
fn reconcile_period(cfg: &mut RunConfig, p: &Potential) -> Result<(), Failure> {
    match cfg.a {
        None => {
            cfg.a = Some(p.period());
            Ok(())
        }
        Some(a) if (a - p.period()).abs() <= 1e-9 * p.period() => Ok(()),
        Some(a) => Err(Failure::Usage(format!(
            "--a {a} conflicts with the potential's own period {}",
            p.period()
        ))),
    }
}

/// Gauge sign reduction: spectra at -beta are pointwise conjugates of those
/// at +beta (the Bloch matrix at -beta is the transpose of the conjugated
/// matrix at +beta), so every Bloch-side computation runs at |beta| and the
/// sign is restored in the output where it matters.
fn effective_beta(cfg: &mut RunConfig) -> (f64, bool) {
    let b = *cfg.beta.get_or_insert(0.0);
    (b.abs(), b < 0.0)
}

fn bloch_config(cfg: &mut RunConfig, d_npw: usize, d_k: usize, beta: f64) -> BlochConfig {
    BlochConfig {
        n_pw: *cfg.n_pw.get_or_insert(d_npw),
        k_points: *cfg.k_points.get_or_insert(d_k),
        beta,
    }
}

fn out_path(cfg: &mut RunConfig, default: &str) -> String {
    cfg.out.get_or_insert_with(|| default.to_string()).clone()
}

fn run_spectrum(cfg: &mut RunConfig) -> Result<Vec<Artifact>, Failure> {
    let p = build_potential(cfg)?;
    let (beta, mirrored) = effective_beta(cfg);
    let bc = bloch_config(cfg, 64, 512, beta);
    let curves = pbc_spectrum(&p, &bc)?;
    let out = out_path(cfg, "spectrum.csv");
    let mut bytes = Vec::new();
    if mirrored {
        write_spectrum_csv_conj(&mut bytes, &curves)?;
    } else {
        write_spectrum_csv(&mut bytes, &curves)?;
    }
    Ok(vec![Artifact::new(out, bytes)])
}

/// io::write_spectrum_csv with the imaginary parts negated, for the
/// mirror-reduced negative-gauge runs. Same schema, same formatting.
fn write_spectrum_csv_conj(w: &mut impl Write, curves: &SpectrumCurves) -> skinband::Result<()> {
    let io_err = |e: std::io::Error| Error::Numerical(format!("io failure: {e}"));
    writeln!(w, "k,band,re_e,im_e").map_err(io_err)?;
    for band in 0..curves.n_bands() {
        for i in 0..curves.k_count() {
            let e = curves.point(band, i);
            writeln!(
                w,
                "{},{band},{},{}",
                fmt_f64(curves.k_at(i)),
                fmt_f64(e.re),
                fmt_f64(-e.im)
            )
            .map_err(io_err)?;
        }
    }
    Ok(())
}

fn run_bands(cfg: &mut RunConfig) -> Result<Vec<Artifact>, Failure> {
    let p = build_potential(cfg)?;
    let n_pw = *cfg.n_pw.get_or_insert(64);
    let k_points = *cfg.k_points.get_or_insert(512);
    let intervals = band_intervals(&p, n_pw, k_points)?;
    let out = out_path(cfg, "bands.json");
    let mut bytes = Vec::new();
    write_json(&mut bytes, &intervals)?;
    Ok(vec![Artifact::new(out, bytes)])
}

fn run_winding(cfg: &mut RunConfig) -> Result<Vec<Artifact>, Failure> {
    let p = build_potential(cfg)?;
    let (beta, mirrored) = effective_beta(cfg);
    let bc = bloch_config(cfg, 16, 256, beta);
    let classify = *cfg.classify.get_or_insert(false);
    let sign = if mirrored { -1i64 } else { 1 };
    let mirror = |z: Complex64| if mirrored { z.conj() } else { z };
    let curves = pbc_spectrum(&p, &bc)?;
    let out = out_path(cfg, "winding.json");
    let mut bytes = Vec::new();

    match (cfg.e_b, cfg.grid) {
        (Some(pair), None) => {
            let z = mirror(Complex64::new(pair[0], pair[1]));
            let wr = winding_number(&curves, z)?;
            let mut rec = WindingRecord {
                e_b_re: pair[0],
                e_b_im: pair[1],
                w: Some(sign * wr.w),
                residual: Some(wr.residual),
                in_sibc: None,
                beta_prime: None,
                decay_rate: None,
            };
            if classify {
                let cls = classify_sibc(&p, beta, z, &bc)?;
                rec.in_sibc = Some(cls.is_in_sibc_spectrum);
                rec.beta_prime = cls.beta_prime;
                rec.decay_rate = cls.decay_rate;
            }
            write_json(&mut bytes, &rec)?;
        }
        (None, Some(g)) => {
            let points = expand_grid(g)?;
            let mut recs: Vec<WindingRecord> = points
                .iter()
                .map(|&(re, im)| {
                    let mut rec = WindingRecord {
                        e_b_re: re,
                        e_b_im: im,
                        w: None,
                        residual: None,
                        in_sibc: None,
                        beta_prime: None,
                        decay_rate: None,
                    };
                    // points too close to the curve to certify stay null
                    if let Ok(wr) = winding_number(&curves, mirror(Complex64::new(re, im))) {
                        rec.w = Some(sign * wr.w);
                        rec.residual = Some(wr.residual);
                    }
                    rec
                })
                .collect();
            if classify {
                let n_scan = *cfg.n_scan.get_or_insert(16);
                let zs: Vec<Complex64> = points
                    .iter()
                    .map(|&(re, im)| mirror(Complex64::new(re, im)))
                    .collect();
                let cls = classify_sibc_grid(&p, beta, &zs, &bc, n_scan)?;
                for (rec, c) in recs.iter_mut().zip(&cls) {
                    rec.in_sibc = Some(c.is_in_sibc_spectrum);
                    rec.beta_prime = c.beta_prime;
                    rec.decay_rate = c.decay_rate;
                }
            }
            write_json(&mut bytes, &recs)?;
        }
        (Some(_), Some(_)) => {
            return Err(Failure::Usage(
                "--e-b and --grid are mutually exclusive".into(),
            ))
        }
        (None, None) => {
            return Err(Failure::Usage(
                "winding needs --e-b \"re,im\" or --grid \"re0,re1,nre,im0,im1,nim\"".into(),
            ))
        }
    }
    Ok(vec![Artifact::new(out, bytes)])
}

/// Row-major expansion (outer re, inner im) of [re0, re1, nre, im0, im1, nim].
fn expand_grid(g: [f64; 6]) -> Result<Vec<(f64, f64)>, Failure> {
    let [re0, re1, nre, im0, im1, nim] = g;
    let check = |n: f64, axis: &str| -> Result<usize, Failure> {
        if n.fract() == 0.0 && (1.0..=100_000.0).contains(&n) {
            Ok(n as usize)
        } else {
            Err(Failure::Usage(format!(
                "{axis} count must be a positive integer, got {n}"
            )))
        }
    };
    let nre = check(nre, "re")?;
    let nim = check(nim, "im")?;
    let coord = |lo: f64, hi: f64, i: usize, n: usize| {
        if n == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    };
    let mut out = Vec::with_capacity(nre * nim);
    for i in 0..nre {
        for j in 0..nim {
            out.push((coord(re0, re1, i, nre), coord(im0, im1, j, nim)));
        }
    }
    Ok(out)
}

fn run_skin(cfg: &mut RunConfig) -> Result<Vec<Artifact>, Failure> {
    let p = build_potential(cfg)?;
    // realspace handles either sign natively; no mirror reduction here
    let beta = *cfg.beta.get_or_insert(0.0);
    let cells = *cfg.cells.get_or_insert(8);
    let ppc = *cfg.points_per_cell.get_or_insert(64);
    let g = GridSpec::for_potential(&p, cells, ppc, Boundary::Open)?;
    let (vals, vecs) = obc_spectrum(&p, beta, &g)?;
    let mode = cfg.mode.get_or_insert_with(|| "mid".to_string()).clone();
    let idx = if mode == "mid" {
        g.n_nodes() / 2
    } else {
        mode.parse::<usize>().map_err(|_| {
            Failure::Lib(Error::Domain(format!(
                "mode must be \"mid\" or a 0-based index, got {mode:?}"
            )))
        })?
    };
    if idx >= vals.len() {
        return Err(Failure::Lib(Error::Domain(format!(
            "mode index {idx} out of range: the chain has {} states",
            vals.len()
        ))));
    }
    let profile = skin_metrics(&vecs[idx], &g)?;
    let report = json!({
        "mode_index": idx,
        "eigenvalue_re": vals[idx].re,
        "eigenvalue_im": vals[idx].im,
        "center_of_mass": profile.center_of_mass,
        "ipr": profile.ipr,
        "fitted_decay": profile.fitted_decay,
        "fit_quality": profile.fit_quality,
        "n_nodes": g.n_nodes(),
        "length": g.length(),
    });
    let out = out_path(cfg, "skin.json");
    let mut bytes = Vec::new();
    write_json(&mut bytes, &report)?;
    let mut artifacts = vec![Artifact::new(out, bytes)];
    if let Some(path) = cfg.dump_vector.clone() {
        let xs: Vec<f64> = (0..g.n_nodes()).map(|j| g.node_x(j)).collect();
        let mut b = Vec::new();
        write_eigenvector_csv(&mut b, &xs, &vecs[idx])?;
        artifacts.push(Artifact::new(path, b));
    }
    Ok(artifacts)
}

fn run_edge(cfg: &mut RunConfig) -> Result<Vec<Artifact>, Failure> {
    let p = build_potential(cfg)?;
    let (beta, mirrored) = effective_beta(cfg);
    let bc = bloch_config(cfg, 16, 256, beta);
    let pair = require(cfg.e_b, "--e-b (base energy)")?;
    let z0 = Complex64::new(pair[0], pair[1]);
    let z = if mirrored { z0.conj() } else { z0 };
    let cls = classify_sibc(&p, beta, z, &bc)?;
    let mut report = json!({
        "e_b_re": pair[0],
        "e_b_im": pair[1],
        "beta": cfg.beta.unwrap(),
        "mirrored": mirrored,
        "is_in_sibc_spectrum": cls.is_in_sibc_spectrum,
        "boundary_flag": cls.boundary_flag,
        "beta_prime": cls.beta_prime,
        "decay_rate": cls.decay_rate,
    });
    let mut artifacts = Vec::new();
    if let Some(ppath) = cfg.profile_out.clone() {
        if mirrored {
            return Err(Failure::Lib(Error::Domain(
                "edge-state synthesis needs beta > 0 (the half-line wall sits at x = 0)".into(),
            )));
        }
        if !cls.is_in_sibc_spectrum || cls.boundary_flag {
            return Err(Failure::Lib(Error::Domain(
                "base energy is not an interior SIBC point; no localized edge state exists".into(),
            )));
        }
        let cells = *cfg.cells.get_or_insert(8);
        let ppc = *cfg.points_per_cell.get_or_insert(128);
        let h = p.period() / ppc as f64;
        let xs: Vec<f64> = (0..cells * ppc).map(|j| j as f64 * h).collect();
        let prof = edge_state_profile_with(&p, beta, z, cls.beta_prime.unwrap(), &bc, &xs)?;
        report["profile_residual"] = json!(prof.residual);
        report["k_prime"] = json!(prof.k_prime);
        let mut b = Vec::new();
        write_eigenvector_csv(&mut b, &xs, &prof.psi)?;
        artifacts.push(Artifact::new(ppath, b));
    }
    let out = out_path(cfg, "edge.json");
    let mut bytes = Vec::new();
    write_json(&mut bytes, &report)?;
    artifacts.insert(0, Artifact::new(out, bytes));
    Ok(artifacts)
}

fn run_merge(cfg: &mut RunConfig) -> Result<Vec<Artifact>, Failure> {
    let p = build_potential(cfg)?;
    let lo_raw = require(cfg.beta_lo, "--beta-lo")?;
    let hi_raw = require(cfg.beta_hi, "--beta-hi")?;
    // mirror reduction maps the bracket onto the positive axis
    let (lo, hi) = {
        let (l, h) = (lo_raw.abs(), hi_raw.abs());
        if l <= h {
            (l, h)
        } else {
            (h, l)
        }
    };
    let target = *cfg.target.get_or_insert(1);
    let bc = bloch_config(cfg, 24, 256, 0.0);
    let beta_c = beta_critical_scan(&p, &bc, lo, hi, target)?;
    let report = json!({
        "beta_c": beta_c,
        "target": target,
        "beta_lo": lo,
        "beta_hi": hi,
    });
    let out = out_path(cfg, "merge.json");
    let mut bytes = Vec::new();
    write_json(&mut bytes, &report)?;
    Ok(vec![Artifact::new(out, bytes)])
}

fn run_merge_theory(cfg: &mut RunConfig) -> Result<Vec<Artifact>, Failure> {
    let prm = match (cfg.m, cfg.a) {
        (Some(m), None) => {
            let prm = Lame2Params::from_parameter(m)?;
            cfg.a = Some(prm.a);
            prm
        }
        (None, Some(a)) => Lame2Params::new(a)?,
        (Some(m), Some(a)) => {
            // both provided (e.g. replaying echoed metadata): must agree
            let prm = Lame2Params::from_parameter(m)?;
            if (a - prm.a).abs() > 1e-9 * prm.a {
                return Err(Failure::Usage(format!(
                    "--a {a} conflicts with 2K(m) = {} for --m {m}",
                    prm.a
                )));
            }
            prm
        }
        (None, None) => {
            return Err(Failure::Usage(
                "merge-theory needs --m (elliptic parameter) or --a (period)".into(),
            ))
        }
    };
    let beta_c = lame2_beta_c(prm);
    let report = json!({
        "a": prm.a,
        "m": cfg.m,
        "beta_c": beta_c,
    });
    let out = out_path(cfg, "merge_theory.json");
    let mut bytes = Vec::new();
    write_json(&mut bytes, &report)?;
    let mut artifacts = vec![Artifact::new(out, bytes)];
    if let Some(cpath) = cfg.curve_out.clone() {
        let n = *cfg.curve_points.get_or_insert(256);
        let io_err = |e: std::io::Error| Error::Numerical(format!("io failure: {e}"));
        let mut b = Vec::new();
        writeln!(b, "ki,beta").map_err(io_err)?;
        for i in 1..=n {
            let ki = i as f64 / (n + 1) as f64;
            let beta = lame2_beta_of_ki(ki, prm)?;
            writeln!(b, "{},{}", fmt_f64(ki), fmt_f64(beta)).map_err(io_err)?;
        }
        artifacts.push(Artifact::new(cpath, b));
    }
    Ok(artifacts)
}

fn run_dirac(cfg: &mut RunConfig) -> Result<Vec<Artifact>, Failure> {
    let v0 = *cfg.v0.get_or_insert(0.1);
    let a = *cfg.a.get_or_insert(TWO_PI);
    let prm = DiracParams::new(v0, a)?;
    let ep = dirac_ep_check(prm)?;
    let mut report = json!({
        "v0": v0,
        "a": a,
        "k0": prm.k0(),
        "e1": prm.e1(),
        "shallowness": prm.shallowness(),
        "beta_c": dirac_beta_c(prm),
        "exceptional_point": ep,
    });
    if let Some(beta) = cfg.beta {
        let (width, closed) = dirac_gap_width(beta, prm);
        report["gap"] = json!({
            "beta": beta,
            "width": width,
            "closed": closed,
        });
    }
    let out = out_path(cfg, "dirac.json");
    let mut bytes = Vec::new();
    write_json(&mut bytes, &report)?;
    Ok(vec![Artifact::new(out, bytes)])
}

/// Commits every artifact or none: a failed write removes both the partial
/// file and anything committed before it.
fn write_all_or_none(artifacts: &[Artifact]) -> Result<(), Failure> {
    for (i, a) in artifacts.iter().enumerate() {
        if let Err(e) = fs::write(&a.path, &a.bytes) {
            let _ = fs::remove_file(&a.path);
            for done in &artifacts[..i] {
                let _ = fs::remove_file(&done.path);
            }
            return Err(Failure::Lib(Error::Numerical(format!(
                "writing {} failed: {e}",
                a.path.display()
            ))));
        }
    }
    Ok(())
}
