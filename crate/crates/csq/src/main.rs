//! csq: quantize observables, evaluate symbols, and reproduce the spectral
//! studies as plain data files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use csq::distrib::{quantize_distribution, Measure, PhaseSpaceDistribution};
use csq::error::{CsqError, Result};
use csq::expr::{ExprContext, Expression};
use csq::fock::FockOperator;
use csq::io::{atomic_write_bytes, csv_document, read_operator, OperatorFile};
use csq::linalg::{hermitian_eigen, spectral_norm};
use csq::quantize::{
    build_angle_operator, build_free_hamiltonian, build_harmonic_hamiltonian,
    build_time_operator, fourier_coeffs_pv, quantize_angular, quantize_general,
    quantize_isotropic, QuadratureSpec,
};
use csq::spectra::{padded_time_commutator, time_commutator_study};
use csq::symbols::{angle_symbol_series, lower_symbol, time_symbol_series, TruncationPolicy};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Parser)]
#[command(
    name = "csq",
    version,
    about = "Coherent-state quantization toolbox",
    max_term_width = 100
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quantize an observable and write the operator as JSON.
    Quantize(QuantizeArgs),
    /// Evaluate the lower symbol of an operator on a polar grid (CSV).
    Symbol(SymbolArgs),
    /// Eigenvalues of a Hermitian operator (CSV).
    Spectrum(SpectrumArgs),
    /// Time-commutator truncation study across orders (JSON report).
    Study(StudyArgs),
    /// Reproduce the five reference figures as CSV data files.
    Figures(FiguresArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// Named operator: angle, time, free_hamiltonian, harmonic_hamiltonian,
    /// q, p, modulus_squared
    #[arg(long)]
    builtin: Option<String>,
    /// Radial profile h(u), e.g. "u^2 + 1" (variables: u, r)
    #[arg(long)]
    isotropic: Option<String>,
    /// Angular profile g(theta), e.g. "sin(theta)" (variable: theta)
    #[arg(long)]
    angular: Option<String>,
    /// Full-plane observable f(z, zbar), e.g. "z*zbar" (variables: u, theta,
    /// z, zbar, r)
    #[arg(long)]
    general: Option<String>,
    /// Dirac-derivative combo "COEFF:B,A[;COEFF:B,A...]" meaning
    /// sum of COEFF * d^A/dzbar^A d^B/dz^B delta2(z)
    #[arg(long)]
    dirac: Option<String>,
}

#[derive(Args)]
struct QuantizeArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Truncation order (matrix dimension)
    #[arg(long, default_value_t = 100)]
    order: usize,
    /// Measure convention for --dirac: "plain" (d2z) or "pi" (d2z/pi)
    #[arg(long, default_value = "plain")]
    measure: String,
    /// Scale parameter used by the harmonic_hamiltonian builtin
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SymbolArgs {
    /// Operator JSON file produced by `csq quantize`
    input: Option<PathBuf>,
    /// Named operator instead of a file
    #[arg(long)]
    builtin: Option<String>,
    /// Truncation order for --builtin
    #[arg(long, default_value_t = 100)]
    order: usize,
    /// Scale parameter: the symbol is evaluated at z/sqrt(hbar)
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    /// Radial grid START:END:COUNT (inclusive)
    #[arg(long, default_value = "0:4:41")]
    r_grid: String,
    /// Angular grid START:END:COUNT (inclusive)
    #[arg(long, default_value = "0:6.283185307179586:73")]
    theta_grid: String,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Operator JSON file produced by `csq quantize`
    input: Option<PathBuf>,
    /// Named operator instead of a file
    #[arg(long)]
    builtin: Option<String>,
    /// Truncation order for --builtin
    #[arg(long, default_value_t = 100)]
    order: usize,
    /// Scale parameter used by the harmonic_hamiltonian builtin
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StudyArgs {
    /// Orders to visit, START:END:STEP
    #[arg(long, default_value = "10:100:10")]
    orders: String,
    /// Build padding: commutators are formed at order + pad, then cropped
    #[arg(long, default_value_t = 4)]
    pad: usize,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FiguresArgs {
    /// Figure number 1..5
    #[arg(long)]
    which: u32,
    /// Truncation order for figures 3 and 4
    #[arg(long, default_value_t = 100)]
    order: usize,
    /// Build padding for commutator figures
    #[arg(long, default_value_t = 4)]
    pad: usize,
    /// Radial grid override START:END:COUNT (figure 1 surface)
    #[arg(long)]
    r_grid: Option<String>,
    /// Angular grid override START:END:COUNT (figures 1 and 2)
    #[arg(long)]
    theta_grid: Option<String>,
    /// Output CSV path; companion files add a suffix before the extension
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    if let Err(e) = configure_threads() {
        eprintln!("csq: {e}");
        return ExitCode::from(2);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ CsqError::Parse(_)) => {
            eprintln!("csq: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("csq: {e}");
            ExitCode::from(3)
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(raw) = std::env::var("CSQ_THREADS") {
        let n: usize = raw
            .parse()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| {
                CsqError::Parse(format!("CSQ_THREADS must be a positive integer, got `{raw}`"))
            })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CsqError::Parse(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Quantize(a) => cmd_quantize(a),
        Command::Symbol(a) => cmd_symbol(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Study(a) => cmd_study(a),
        Command::Figures(a) => cmd_figures(a),
    }
}

/// Inclusive linear grid from "START:END:COUNT".
fn parse_grid(spec: &str, flag: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CsqError::Parse(format!(
            "{flag} expects START:END:COUNT, got `{spec}`"
        )));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| CsqError::Parse(format!("{flag}: bad START `{}`", parts[0])))?;
    let end: f64 = parts[1]
        .parse()
        .map_err(|_| CsqError::Parse(format!("{flag}: bad END `{}`", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| CsqError::Parse(format!("{flag}: bad COUNT `{}`", parts[2])))?;
    if count == 0 || !start.is_finite() || !end.is_finite() {
        return Err(CsqError::Parse(format!("{flag}: empty or non-finite grid `{spec}`")));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let h = (end - start) / (count - 1) as f64;
    Ok((0..count).map(|k| start + h * k as f64).collect())
}

/// Order list from "START:END:STEP".
fn parse_orders(spec: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CsqError::Parse(format!(
            "--orders expects START:END:STEP, got `{spec}`"
        )));
    }
    let nums: Vec<usize> = parts
        .iter()
        .map(|p| {
            p.parse()
                .map_err(|_| CsqError::Parse(format!("--orders: bad integer `{p}`")))
        })
        .collect::<Result<_>>()?;
    let (start, end, step) = (nums[0], nums[1], nums[2]);
    if step == 0 || start > end {
        return Err(CsqError::Parse(format!("--orders: empty range `{spec}`")));
    }
    Ok((start..=end).step_by(step).collect())
}

fn parse_dirac(spec: &str, measure: Measure) -> Result<PhaseSpaceDistribution> {
    let mut t = PhaseSpaceDistribution::new(measure);
    for term in spec.split(';') {
        let term = term.trim();
        if term.is_empty() {
            return Err(CsqError::Parse(format!("--dirac: empty term in `{spec}`")));
        }
        let (coeff_str, orders_str) = term.split_once(':').ok_or_else(|| {
            CsqError::Parse(format!("--dirac term `{term}` must look like COEFF:B,A"))
        })?;
        let coeff: f64 = coeff_str.trim().parse().map_err(|_| {
            CsqError::Parse(format!("--dirac: bad coefficient `{coeff_str}`"))
        })?;
        let (b_str, a_str) = orders_str.split_once(',').ok_or_else(|| {
            CsqError::Parse(format!("--dirac term `{term}` must list B,A after the colon"))
        })?;
        let b: u32 = b_str.trim().parse().map_err(|_| {
            CsqError::Parse(format!("--dirac: bad derivative order `{b_str}`"))
        })?;
        let a: u32 = a_str.trim().parse().map_err(|_| {
            CsqError::Parse(format!("--dirac: bad derivative order `{a_str}`"))
        })?;
        t.add_term(a, b, Complex64::new(coeff, 0.0));
    }
    Ok(t)
}

fn parse_measure(name: &str) -> Result<Measure> {
    match name {
        "plain" => Ok(Measure::Plain),
        "pi" => Ok(Measure::OverPi),
        other => Err(CsqError::Parse(format!(
            "--measure must be `plain` or `pi`, got `{other}`"
        ))),
    }
}

fn build_builtin(name: &str, order: usize, hbar: f64) -> Result<FockOperator> {
    let mut op = match name {
        "angle" => build_angle_operator(order)?,
        "time" => build_time_operator(order)?,
        "free_hamiltonian" => build_free_hamiltonian(order)?,
        "harmonic_hamiltonian" => build_harmonic_hamiltonian(order, hbar)?,
        "q" => FockOperator::position(order),
        "p" => FockOperator::momentum(order),
        "modulus_squared" => {
            quantize_isotropic(|u| u, order, QuadratureSpec::for_order(order).n_radial)?
        }
        other => {
            return Err(CsqError::Parse(format!(
                "unknown builtin `{other}` (have: angle, time, free_hamiltonian, \
                 harmonic_hamiltonian, q, p, modulus_squared)"
            )))
        }
    };
    op.provenance = format!("builtin:{name}");
    Ok(op)
}

fn quantize_from_source(
    source: &SourceArgs,
    order: usize,
    measure_flag: &str,
    hbar: f64,
) -> Result<FockOperator> {
    let given = [
        source.builtin.is_some(),
        source.isotropic.is_some(),
        source.angular.is_some(),
        source.general.is_some(),
        source.dirac.is_some(),
    ]
    .iter()
    .filter(|&&g| g)
    .count();
    if given != 1 {
        return Err(CsqError::Parse(
            "give exactly one of --builtin, --isotropic, --angular, --general, --dirac".into(),
        ));
    }
    if measure_flag != "plain" && source.dirac.is_none() {
        return Err(CsqError::Parse(
            "--measure applies only to --dirac observables".into(),
        ));
    }
    if order == 0 {
        return Err(CsqError::Parse("--order must be at least 1".into()));
    }

    if let Some(name) = &source.builtin {
        return build_builtin(name, order, hbar);
    }
    if let Some(text) = &source.isotropic {
        let e = Expression::parse(text, ExprContext::Isotropic)?;
        let mut op =
            quantize_isotropic(|u| e.eval_radial(u), order, QuadratureSpec::for_order(order).n_radial)?;
        op.provenance = format!("isotropic:{text}");
        return Ok(op);
    }
    if let Some(text) = &source.angular {
        let e = Expression::parse(text, ExprContext::Angular)?;
        let coeffs = fourier_coeffs_pv(|t| e.eval_angular(t), order.saturating_sub(1))?;
        let mut op = quantize_angular(&coeffs, order)?;
        op.provenance = format!("angular:{text}");
        return Ok(op);
    }
    if let Some(text) = &source.general {
        let e = Expression::parse(text, ExprContext::General)?;
        let spec = QuadratureSpec::for_order(order);
        let mut op = quantize_general(|z| e.eval_complex(z), order, &spec)?;
        op.provenance = format!("general:{text}");
        return Ok(op);
    }
    let spec_text = source.dirac.as_ref().expect("one source is set");
    let t = parse_dirac(spec_text, parse_measure(measure_flag)?)?;
    let mut op = quantize_distribution(&t, order)?;
    op.provenance = format!("dirac:{spec_text};measure={measure_flag}");
    Ok(op)
}

fn emit_bytes(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => atomic_write_bytes(path, bytes),
        None => {
            use std::io::Write as _;
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn cmd_quantize(a: QuantizeArgs) -> Result<()> {
    let op = quantize_from_source(&a.source, a.order, &a.measure, a.hbar)?;
    let mut text = serde_json::to_string(&OperatorFile::from_operator(&op))?;
    text.push('\n');
    emit_bytes(a.out.as_deref(), text.as_bytes())
}

fn load_operator(
    input: Option<&Path>,
    builtin: Option<&str>,
    order: usize,
    hbar: f64,
) -> Result<FockOperator> {
    match (input, builtin) {
        (Some(path), None) => read_operator(path),
        (None, Some(name)) => build_builtin(name, order, hbar),
        _ => Err(CsqError::Parse(
            "give either an operator file or --builtin, not both".into(),
        )),
    }
}

fn cmd_symbol(a: SymbolArgs) -> Result<()> {
    let op = load_operator(a.input.as_deref(), a.builtin.as_deref(), a.order, a.hbar)?;
    let r_grid = parse_grid(&a.r_grid, "--r-grid")?;
    let theta_grid = parse_grid(&a.theta_grid, "--theta-grid")?;
    let mut rows = Vec::with_capacity(r_grid.len() * theta_grid.len());
    for &r in &r_grid {
        for &th in &theta_grid {
            let z = Complex64::from_polar(r, th);
            let v = lower_symbol(&op, z, a.hbar, TruncationPolicy::default())?;
            rows.push(vec![r, th, v.re, v.im]);
        }
    }
    let doc = csv_document(
        &[format!("source={}; order={}; pad=0", op.provenance, op.order)],
        "r,theta,re,im",
        &rows,
    );
    emit_bytes(a.out.as_deref(), doc.as_bytes())
}

fn cmd_spectrum(a: SpectrumArgs) -> Result<()> {
    let op = load_operator(a.input.as_deref(), a.builtin.as_deref(), a.order, a.hbar)?;
    if !op.hermitian {
        return Err(CsqError::Domain(
            "spectrum needs a Hermitian operator; this file is not flagged Hermitian".into(),
        ));
    }
    let eig = hermitian_eigen(&op.matrix)?;
    let rows: Vec<Vec<f64>> = eig
        .values
        .iter()
        .enumerate()
        .map(|(k, &v)| vec![k as f64, v])
        .collect();
    let doc = csv_document(
        &[format!("source={}; order={}; pad=0", op.provenance, op.order)],
        "index,eigenvalue",
        &rows,
    );
    emit_bytes(a.out.as_deref(), doc.as_bytes())
}

fn cmd_study(a: StudyArgs) -> Result<()> {
    let orders = parse_orders(&a.orders)?;
    let report = time_commutator_study(&orders, a.pad)?;
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    emit_bytes(a.out.as_deref(), text.as_bytes())
}

/// OUT with `suffix` inserted before the extension: plot.csv -> plot_hist.csv.
fn companion_path(out: &Path, suffix: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut name = format!("{stem}{suffix}");
    if let Some(ext) = out.extension() {
        name.push('.');
        name.push_str(&ext.to_string_lossy());
    }
    out.with_file_name(name)
}

fn cmd_figures(a: FiguresArgs) -> Result<()> {
    match a.which {
        1 => fig_angle_symbol(&a),
        2 => fig_time_vs_cot(&a),
        3 => fig_commutator_magnitudes(&a),
        4 => fig_commutator_spectrum(&a),
        5 => fig_norm_growth(&a),
        other => Err(CsqError::Parse(format!(
            "--which must be 1..5, got {other}"
        ))),
    }
}

/// Default angular grid: 256 points on [0, 2pi), endpoint excluded.
fn default_theta_grid() -> Vec<f64> {
    (0..256).map(|k| TWO_PI * k as f64 / 256.0).collect()
}

fn fig_angle_symbol(a: &FiguresArgs) -> Result<()> {
    let thetas = match &a.theta_grid {
        Some(s) => parse_grid(s, "--theta-grid")?,
        None => default_theta_grid(),
    };
    let rs = match &a.r_grid {
        Some(s) => parse_grid(s, "--r-grid")?,
        None => (0..41).map(|k| k as f64 / 40.0).collect(),
    };

    // curves at the three reference radii; the series is the untruncated symbol
    let radii = [0.5, 1.0, 5.0];
    let mut rows = Vec::with_capacity(thetas.len());
    for &th in &thetas {
        let mut row = vec![th];
        for &r in &radii {
            row.push(angle_symbol_series(r, th)?);
        }
        rows.push(row);
    }
    let doc = csv_document(
        &["source=angle; order=exact; pad=0".to_string()],
        "theta,angle_r0.5,angle_r1,angle_r5",
        &rows,
    );
    atomic_write_bytes(&a.out, doc.as_bytes())?;

    let mut surface = Vec::with_capacity(rs.len() * thetas.len());
    for &r in &rs {
        for &th in &thetas {
            surface.push(vec![r, th, angle_symbol_series(r, th)?]);
        }
    }
    let sdoc = csv_document(
        &["source=angle; order=exact; pad=0".to_string()],
        "r,theta,angle",
        &surface,
    );
    atomic_write_bytes(&companion_path(&a.out, "_surface"), sdoc.as_bytes())
}

fn fig_time_vs_cot(a: &FiguresArgs) -> Result<()> {
    let thetas = match &a.theta_grid {
        Some(s) => parse_grid(s, "--theta-grid")?,
        None => {
            // interior of (0, pi); cot diverges at the ends
            let n = 179;
            let lo = std::f64::consts::PI / 180.0;
            let hi = std::f64::consts::PI - lo;
            let h = (hi - lo) / (n - 1) as f64;
            (0..n).map(|k| lo + h * k as f64).collect()
        }
    };
    let mut rows = Vec::with_capacity(thetas.len());
    for &th in &thetas {
        rows.push(vec![
            th,
            th.cos() / th.sin(),
            time_symbol_series(2.0, th)?,
            time_symbol_series(8.0, th)?,
        ]);
    }
    let doc = csv_document(
        &["source=time; order=exact; pad=0".to_string()],
        "theta,cot,time_r2,time_r8",
        &rows,
    );
    atomic_write_bytes(&a.out, doc.as_bytes())
}

fn fig_commutator_magnitudes(a: &FiguresArgs) -> Result<()> {
    let c = padded_time_commutator(a.order, a.pad)?;
    let n = c.order;
    let mut rows = Vec::with_capacity(n * n);
    for m in 0..n {
        for k in 0..n {
            rows.push(vec![m as f64, k as f64, c.matrix[(m, k)].norm()]);
        }
    }
    let doc = csv_document(
        &[format!("source=time_commutator; order={}; pad={}", a.order, a.pad)],
        "m,n,abs",
        &rows,
    );
    atomic_write_bytes(&a.out, doc.as_bytes())
}

fn fig_commutator_spectrum(a: &FiguresArgs) -> Result<()> {
    let c = padded_time_commutator(a.order, a.pad)?;
    let ic = c.matrix.scale(Complex64::new(0.0, 1.0));
    let eig = hermitian_eigen(&ic)?;
    let rows: Vec<Vec<f64>> = eig
        .values
        .iter()
        .enumerate()
        .map(|(k, &v)| vec![k as f64, v])
        .collect();
    let header = format!(
        "source=i_time_commutator; order={}; pad={}",
        a.order, a.pad
    );
    let doc = csv_document(&[header.clone()], "index,eigenvalue", &rows);
    atomic_write_bytes(&a.out, doc.as_bytes())?;

    // histogram over fixed-width bins, empty bins included
    let width = 0.01;
    let lo = (eig.values[0] / width).floor() as i64;
    let hi = (eig.values[eig.values.len() - 1] / width).floor() as i64;
    let mut counts = vec![0usize; (hi - lo + 1) as usize];
    for &v in &eig.values {
        counts[((v / width).floor() as i64 - lo) as usize] += 1;
    }
    let hrows: Vec<Vec<f64>> = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| vec![(lo + k as i64) as f64 * width, c as f64])
        .collect();
    let hdoc = csv_document(&[header], "bin_lo,count", &hrows);
    atomic_write_bytes(&companion_path(&a.out, "_hist"), hdoc.as_bytes())
}

fn fig_norm_growth(a: &FiguresArgs) -> Result<()> {
    let mut rows = Vec::new();
    for n in (10..=100).step_by(10) {
        let c = padded_time_commutator(n, a.pad)?;
        let mut d = c.matrix.clone();
        for k in 0..n {
            d[(k, k)] += Complex64::new(0.0, 1.0);
        }
        rows.push(vec![n as f64, spectral_norm(&d)?]);
    }
    let doc = csv_document(
        &[format!("source=time_commutator_norm; order=10:100:10; pad={}", a.pad)],
        "order,lambda_max",
        &rows,
    );
    atomic_write_bytes(&a.out, doc.as_bytes())
}
