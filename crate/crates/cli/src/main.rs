//! Command line front end: each verb reads one JSON run document, measures
//! the quantities it advertises, optionally writes CSV/JSON artifacts, and
//! exits 0 only when every checked claim holds.
//!
//! Exit codes: 0 pass, 1 claim violated, 2 usage or config error,
//! 3 numerical failure inside a solver.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use repmetric::algebra::{AlgebraElement, GeneratingSet};
use repmetric::duality::{
    delta_curve, function_modulus, complex_function_modulus, lip_regularize,
    reconstruct_modulus, sandwich_check, sandwich_family, RealFunctionOnSpace,
};
use repmetric::gallery::run_scenario;
use repmetric::io::{
    read_json, write_csv_atomic, write_json_atomic, AlgebraJson, ElementJson, MeasureJson,
    RepresentationJson, SpaceJson, SCHEMA_VERSION,
};
use repmetric::modulus::{concave_majorant, empirical_moduli, modulus_calculus_report, ConcaveFn};
use repmetric::reps::{rep_distance, sample_rep_pairs, Representation};
use repmetric::transport::{kantorovich, kantorovich_primal_oracle, Measure};
use repmetric::{Complex64, Error, Result};

const DEFAULT_TOLERANCE: f64 = 1e-9;
const DEFAULT_SAMPLE_COUNT: usize = 200;
const DEFAULT_PERTURBATION: f64 = 0.3;

#[derive(Parser)]
#[command(name = "repmetric", version, about = "Representation metric laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pairwise d_K distances for a representation list, with axiom checks.
    Metric(CommonArgs),
    /// Empirical moduli of continuity and the calculus residual report.
    Modulus(CommonArgs),
    /// Function modulus, delta curve, regularization and sandwich report.
    Duality(CommonArgs),
    /// Pairwise Kantorovich distances with dual certificates.
    Transport(CommonArgs),
    /// Scripted certification scenarios with pinned claims.
    Gallery(GalleryArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Run document (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed from the run document.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for artifacts; overrides the run document.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the residual tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct GalleryArgs {
    /// Scenario name; overrides the run document.
    scenario: Option<String>,
    /// Run document (JSON); optional, defaults apply without it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Recorded for provenance; scenarios are deterministic.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for result.json and the pairwise table.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Metric(args) => run_metric(&args),
        Command::Modulus(args) => run_modulus(&args),
        Command::Duality(args) => run_duality(&args),
        Command::Transport(args) => run_transport(&args),
        Command::Gallery(args) => run_gallery(&args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// Numerical breakdowns get their own exit code; everything else that the
/// library rejects is a config problem.
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::NonFinite { .. } | Error::NotUnitary { .. } | Error::SolverFailure { .. } => 3,
        _ => 2,
    }
}

fn config_error(details: impl Into<String>) -> Error {
    Error::ConfigError { details: details.into() }
}

fn require_seed(flag: Option<u64>, doc: Option<u64>) -> Result<u64> {
    flag.or(doc).ok_or_else(|| config_error("seed is required (--seed or the seed field)"))
}

fn ensure_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        source: e,
    })
}

fn verdict_word(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricDoc {
    seed: Option<u64>,
    tolerance: Option<f64>,
    out: Option<PathBuf>,
    algebra: AlgebraJson,
    generators: Vec<ElementJson>,
    representations: Vec<RepresentationJson>,
}

fn run_metric(args: &CommonArgs) -> Result<bool> {
    let doc: MetricDoc = read_json(&args.config)?;
    let seed = require_seed(args.seed, doc.seed)?;
    let tolerance = args.tolerance.or(doc.tolerance).unwrap_or(DEFAULT_TOLERANCE);
    let out = args.out.clone().or(doc.out);

    let algebra = doc.algebra.to_algebra()?;
    if doc.generators.is_empty() {
        return Err(config_error("at least one generator is required"));
    }
    if doc.representations.is_empty() {
        return Err(config_error("at least one representation is required"));
    }
    let elements = doc
        .generators
        .iter()
        .map(|e| e.to_element(&algebra))
        .collect::<Result<Vec<_>>>()?;
    let k = GeneratingSet::new(algebra.clone(), elements)?;
    let reps = doc
        .representations
        .iter()
        .map(|r| r.to_representation(&algebra))
        .collect::<Result<Vec<Representation>>>()?;

    let n = reps.len();
    let mut matrix = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in i..n {
            let d = rep_distance(&reps[i], &reps[j], &k)?;
            matrix[i][j] = d;
            matrix[j][i] = d;
        }
    }

    let mut diagonal_residual = 0.0f64;
    for (i, row) in matrix.iter().enumerate() {
        diagonal_residual = diagonal_residual.max(row[i].abs());
    }
    let mut triangle_residual = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                triangle_residual =
                    triangle_residual.max(matrix[i][j] - matrix[i][l] - matrix[l][j]);
            }
        }
    }
    triangle_residual = triangle_residual.max(0.0);
    let pass = diagonal_residual <= tolerance && triangle_residual <= tolerance;

    if let Some(dir) = out {
        ensure_out_dir(&dir)?;
        let mut rows = Vec::new();
        for i in 0..n {
            for j in 0..n {
                rows.push(vec![format!("{i}"), format!("{j}"), format!("{}", matrix[i][j])]);
            }
        }
        write_csv_atomic(&dir.join("distances.csv"), &["i", "j", "distance"], &rows)?;
        write_json_atomic(
            &dir.join("report.json"),
            &serde_json::json!({
                "schema_version": SCHEMA_VERSION,
                "command": "metric",
                "seed": seed,
                "representations": n,
                "diagonal_residual": diagonal_residual,
                "triangle_residual": triangle_residual,
                "tolerance": tolerance,
                "verdict": verdict_word(pass),
            }),
        )?;
    }
    println!(
        "metric: {n} representations, triangle residual {triangle_residual:.3e} \
         (tol {tolerance:.0e}) .. {}",
        verdict_word(pass)
    );
    Ok(pass)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModulusDoc {
    seed: Option<u64>,
    tolerance: Option<f64>,
    out: Option<PathBuf>,
    algebra: AlgebraJson,
    generators: Vec<ElementJson>,
    elements: Vec<ElementJson>,
    multiplicities: Option<Vec<usize>>,
    sample_count: Option<usize>,
    perturbation_scale: Option<f64>,
    lambda: Option<[f64; 2]>,
}

fn run_modulus(args: &CommonArgs) -> Result<bool> {
    let doc: ModulusDoc = read_json(&args.config)?;
    let seed = require_seed(args.seed, doc.seed)?;
    let tolerance = args.tolerance.or(doc.tolerance).unwrap_or(DEFAULT_TOLERANCE);
    let out = args.out.clone().or(doc.out);
    let sample_count = doc.sample_count.unwrap_or(DEFAULT_SAMPLE_COUNT);
    if sample_count == 0 {
        return Err(config_error("sample_count must be at least 1"));
    }
    let scale = doc.perturbation_scale.unwrap_or(DEFAULT_PERTURBATION);
    let [l_re, l_im] = doc.lambda.unwrap_or([0.7, -0.4]);

    let algebra = doc.algebra.to_algebra()?;
    if doc.generators.is_empty() {
        return Err(config_error("at least one generator is required"));
    }
    if doc.elements.is_empty() {
        return Err(config_error("at least one element is required"));
    }
    let k = GeneratingSet::new(
        algebra.clone(),
        doc.generators
            .iter()
            .map(|e| e.to_element(&algebra))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let elements = doc
        .elements
        .iter()
        .map(|e| e.to_element(&algebra))
        .collect::<Result<Vec<AlgebraElement>>>()?;
    let mults = doc.multiplicities.unwrap_or_else(|| vec![1; algebra.num_blocks()]);

    let pairs = sample_rep_pairs(&algebra, &mults, sample_count, seed, scale)?;
    let moduli = empirical_moduli(&pairs, &k, &elements)?;
    let hulls = moduli.iter().map(concave_majorant).collect::<Result<Vec<ConcaveFn>>>()?;

    let a = &elements[0];
    let b = elements.get(1).unwrap_or(a);
    let report = modulus_calculus_report(&pairs, &k, a, b, Complex64::new(l_re, l_im))?;
    let pass = report.max_equality_residual() <= tolerance
        && report.max_inequality_residual() <= tolerance;

    if let Some(dir) = out {
        ensure_out_dir(&dir)?;
        let mut rows = Vec::new();
        for (idx, (modulus, hull)) in moduli.iter().zip(&hulls).enumerate() {
            for &(t, v) in modulus.samples() {
                rows.push(vec![
                    format!("{idx}"),
                    "sample".into(),
                    format!("{t}"),
                    format!("{v}"),
                ]);
            }
            for &(t, v) in hull.breakpoints() {
                rows.push(vec![
                    format!("{idx}"),
                    "hull".into(),
                    format!("{t}"),
                    format!("{v}"),
                ]);
            }
        }
        write_csv_atomic(&dir.join("curves.csv"), &["element", "kind", "t", "value"], &rows)?;
        write_json_atomic(
            &dir.join("report.json"),
            &serde_json::json!({
                "schema_version": SCHEMA_VERSION,
                "command": "modulus",
                "seed": seed,
                "sample_count": report.sample_count,
                "shift_residual": report.shift_residual,
                "adjoint_residual": report.adjoint_residual,
                "scaling_residual": report.scaling_residual,
                "sum_residual": report.sum_residual,
                "product_residual": report.product_residual,
                "tolerance": tolerance,
                "verdict": verdict_word(pass),
            }),
        )?;
    }
    println!(
        "modulus: {} elements on {} pairs, equalities {:.3e}, inequalities {:.3e} \
         (tol {tolerance:.0e}) .. {}",
        elements.len(),
        sample_count,
        report.max_equality_residual(),
        report.max_inequality_residual(),
        verdict_word(pass)
    );
    Ok(pass)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DualityDoc {
    seed: Option<u64>,
    tolerance: Option<f64>,
    out: Option<PathBuf>,
    space: SpaceJson,
    re: Vec<f64>,
    im: Option<Vec<f64>>,
    multiplicities: Option<Vec<usize>>,
    sample_count: Option<usize>,
    perturbation_scale: Option<f64>,
}

fn run_duality(args: &CommonArgs) -> Result<bool> {
    let doc: DualityDoc = read_json(&args.config)?;
    let seed = require_seed(args.seed, doc.seed)?;
    let tolerance = args.tolerance.or(doc.tolerance).unwrap_or(DEFAULT_TOLERANCE);
    let out = args.out.clone().or(doc.out);
    let sample_count = doc.sample_count.unwrap_or(40);
    if sample_count == 0 {
        return Err(config_error("sample_count must be at least 1"));
    }
    let scale = doc.perturbation_scale.unwrap_or(DEFAULT_PERTURBATION);

    let space = doc.space.to_space()?;
    let re = RealFunctionOnSpace::new(&space, doc.re.clone())?;
    let im_values = doc.im.clone().unwrap_or_else(|| vec![0.0; space.len()]);
    let im = RealFunctionOnSpace::new(&space, im_values)?;

    let omega_re = function_modulus(&re)?;
    let omega_im = function_modulus(&im)?;
    let omega_c = complex_function_modulus(&re, &im)?;

    // Round-trip: the modulus must come back from its dual description.
    let mut reconstruction_residual = 0.0f64;
    for omega in [&omega_re, &omega_im, &omega_c] {
        let delta = delta_curve(omega);
        let t_grid: Vec<f64> = omega.breakpoints().iter().map(|&(t, _)| t).collect();
        let back = reconstruct_modulus(&delta, &t_grid)?;
        for (&(_, v), &r) in omega.breakpoints().iter().zip(back.values()) {
            reconstruction_residual = reconstruction_residual.max((r - v).abs());
        }
    }

    // Regularization at every positive hull slope of each part.
    let mut lip_residual = 0.0f64;
    let mut sup_gap = 0.0f64;
    for (f, omega) in [(&re, &omega_re), (&im, &omega_im)] {
        for s in omega.slopes() {
            if s <= 0.0 {
                continue;
            }
            let reg = lip_regularize(f, s, omega)?;
            lip_residual = lip_residual.max(reg.lip_residual);
            sup_gap = sup_gap.max(reg.sup_deviation - reg.delta);
        }
    }
    sup_gap = sup_gap.max(0.0);

    let k = sandwich_family(&re, &im)?;
    let mults = doc.multiplicities.unwrap_or_else(|| vec![1; space.len()]);
    let pairs = sample_rep_pairs(&space.algebra(), &mults, sample_count, seed, scale)?;
    let sandwich = sandwich_check(&re, &im, &pairs, &k)?;
    let sandwich_residual = sandwich
        .re_residual
        .max(sandwich.im_residual)
        .max(sandwich.complex_residual);

    let pass = reconstruction_residual <= tolerance
        && lip_residual <= tolerance
        && sup_gap <= tolerance
        && sandwich_residual <= tolerance;

    if let Some(dir) = out {
        ensure_out_dir(&dir)?;
        let parts: [(&str, &ConcaveFn); 3] =
            [("re", &omega_re), ("im", &omega_im), ("complex", &omega_c)];
        let mut modulus_rows = Vec::new();
        let mut delta_rows = Vec::new();
        for (name, omega) in parts {
            for &(t, v) in omega.breakpoints() {
                modulus_rows.push(vec![name.into(), format!("{t}"), format!("{v}")]);
            }
            let delta = delta_curve(omega);
            for (&s, &d) in delta.grid().iter().zip(delta.values()) {
                delta_rows.push(vec![name.into(), format!("{s}"), format!("{d}")]);
            }
        }
        write_csv_atomic(&dir.join("moduli.csv"), &["part", "t", "omega"], &modulus_rows)?;
        write_csv_atomic(&dir.join("delta.csv"), &["part", "s", "delta"], &delta_rows)?;
        write_json_atomic(
            &dir.join("report.json"),
            &serde_json::json!({
                "schema_version": SCHEMA_VERSION,
                "command": "duality",
                "seed": seed,
                "sample_count": sandwich.samples,
                "reconstruction_residual": reconstruction_residual,
                "lip_residual": lip_residual,
                "sup_gap": sup_gap,
                "sandwich_re_residual": sandwich.re_residual,
                "sandwich_im_residual": sandwich.im_residual,
                "sandwich_complex_residual": sandwich.complex_residual,
                "tolerance": tolerance,
                "verdict": verdict_word(pass),
            }),
        )?;
    }
    println!(
        "duality: reconstruction {reconstruction_residual:.3e}, lip {lip_residual:.3e}, \
         sandwich {sandwich_residual:.3e} on {} pairs (tol {tolerance:.0e}) .. {}",
        sandwich.samples,
        verdict_word(pass)
    );
    Ok(pass)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TransportDoc {
    seed: Option<u64>,
    tolerance: Option<f64>,
    out: Option<PathBuf>,
    space: SpaceJson,
    measures: Vec<MeasureJson>,
}

fn run_transport(args: &CommonArgs) -> Result<bool> {
    let doc: TransportDoc = read_json(&args.config)?;
    let seed = require_seed(args.seed, doc.seed)?;
    let tolerance = args.tolerance.or(doc.tolerance).unwrap_or(DEFAULT_TOLERANCE);
    let out = args.out.clone().or(doc.out);

    let space = doc.space.to_space()?;
    if doc.measures.len() < 2 {
        return Err(config_error("at least two measures are required"));
    }
    let measures = doc
        .measures
        .iter()
        .map(|m| m.to_measure(&space))
        .collect::<Result<Vec<Measure>>>()?;

    let n = measures.len();
    let mut matrix = vec![vec![0.0f64; n]; n];
    let mut certificates: Vec<(usize, usize, Vec<f64>)> = Vec::new();
    let mut max_gap = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let dual = kantorovich(&measures[i], &measures[j])?;
            let primal = kantorovich_primal_oracle(&measures[i], &measures[j])?;
            max_gap = max_gap.max((dual.value - primal).abs());
            matrix[i][j] = dual.value;
            matrix[j][i] = dual.value;
            certificates.push((i, j, dual.potential));
        }
    }
    let pass = max_gap <= tolerance;

    if let Some(dir) = out {
        ensure_out_dir(&dir)?;
        let mut rows = Vec::new();
        for i in 0..n {
            for j in 0..n {
                rows.push(vec![format!("{i}"), format!("{j}"), format!("{}", matrix[i][j])]);
            }
        }
        write_csv_atomic(&dir.join("matrix.csv"), &["i", "j", "distance"], &rows)?;
        let mut cert_rows = Vec::new();
        for (i, j, potential) in &certificates {
            for (x, value) in potential.iter().enumerate() {
                cert_rows.push(vec![
                    format!("{i}"),
                    format!("{j}"),
                    space.label(x).to_string(),
                    format!("{value}"),
                ]);
            }
        }
        write_csv_atomic(
            &dir.join("certificates.csv"),
            &["i", "j", "point", "potential"],
            &cert_rows,
        )?;
        write_json_atomic(
            &dir.join("report.json"),
            &serde_json::json!({
                "schema_version": SCHEMA_VERSION,
                "command": "transport",
                "seed": seed,
                "measures": n,
                "max_duality_gap": max_gap,
                "tolerance": tolerance,
                "verdict": verdict_word(pass),
            }),
        )?;
    }
    println!(
        "transport: {n} measures, worst duality gap {max_gap:.3e} (tol {tolerance:.0e}) .. {}",
        verdict_word(pass)
    );
    Ok(pass)
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct GalleryDoc {
    seed: Option<u64>,
    out: Option<PathBuf>,
    scenario: Option<String>,
    config: Option<serde_json::Value>,
}

fn run_gallery(args: &GalleryArgs) -> Result<bool> {
    let doc: GalleryDoc = match &args.config {
        Some(path) => read_json(path)?,
        None => GalleryDoc::default(),
    };
    let seed = require_seed(args.seed, doc.seed)?;
    let scenario = args
        .scenario
        .clone()
        .or(doc.scenario)
        .ok_or_else(|| config_error("scenario name is required (positional or config field)"))?;
    let out = args.out.clone().or(doc.out);
    let config = doc.config.unwrap_or_else(|| serde_json::json!({}));

    let result = run_scenario(&scenario, &config, out.as_deref())?;
    println!(
        "gallery {}: claimed {}, measured {} (tol {:.0e}, seed {seed}) .. {}",
        result.scenario,
        result.claimed,
        result.measured,
        result.tolerance,
        verdict_word(result.verdict)
    );
    Ok(result.verdict)
}
