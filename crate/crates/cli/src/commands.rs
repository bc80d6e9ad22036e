//! One function per CLI verb. Each returns the run status; errors become
//! exit code 1 in `main`.

use std::path::{Path, PathBuf};

use aluthge_core::aluthge::{iterate, IterationConfig, IterationTrace, StepRecord, StopReason};
use aluthge_core::analysis::{
    continuity_probe, finite_section_study, gelfand_radius, normality_defect, riesz_split,
    spectrum_distance, yamazaki_radius, ContinuityRow, Perturbation, SectionRecord, SpectrumReport,
};
use aluthge_core::generators::{OperatorFamily, SequenceRule};
use aluthge_core::linalg::spectral_radius;
use aluthge_core::{ComplexMatrix, C64};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::{
    Common, ContinuityArgs, GenArgs, GenKind, IterateArgs, RadiusArgs, SectionsArgs, SpectrumArgs,
    SplitArgs, SuiteArgs,
};
use crate::error::{CliError, CliResult, Status};
use crate::io::{csv_text, read_matrix, trace_csv, write_json, write_text, MatrixFile};
use crate::spec::{Analysis, ExperimentSpec, Format, Source};
use crate::suite::{run_suite, SuiteOptions};

fn load_source(common: &Common) -> CliResult<Source> {
    let path = common
        .input
        .as_deref()
        .ok_or_else(|| CliError::input("--input", "an input file is required"))?;
    Source::load(path)
}

fn load_matrix(common: &Common) -> CliResult<(Source, ComplexMatrix)> {
    let source = load_source(common)?;
    let m = source.matrix(common.dim)?;
    Ok((source, m))
}

/// Experiment config (or defaults) with `--max-iter` / `--tol` applied.
pub fn effective_config(
    common: &Common,
    spec: Option<&ExperimentSpec>,
) -> CliResult<IterationConfig> {
    let mut cfg = spec.map(|s| s.config.clone()).unwrap_or_default();
    if let Some(m) = common.max_iter {
        cfg.max_iter = m;
    }
    if let Some(t) = common.tol {
        cfg.tol_step = t;
    }
    cfg.validate().map_err(|e| {
        let field = if common.max_iter == Some(0) {
            "--max-iter"
        } else if common.tol.is_some() {
            "--tol"
        } else {
            "config"
        };
        CliError::input(field, e.to_string())
    })?;
    Ok(cfg)
}

fn format_of(common: &Common, spec: Option<&ExperimentSpec>) -> Format {
    common
        .format
        .or_else(|| spec.and_then(|s| s.output.as_ref().map(|o| o.format)))
        .unwrap_or_default()
}

fn out_path(common: &Common, spec: Option<&ExperimentSpec>) -> Option<PathBuf> {
    common
        .out
        .clone()
        .or_else(|| spec.and_then(|s| s.output.as_ref().map(|o| o.path.clone())))
}

fn seed_of(common: &Common, spec: Option<&ExperimentSpec>) -> Option<u64> {
    common.seed.or_else(|| spec.and_then(|s| s.seed))
}

/// Writes a verb's report to `--out`, to `<output.path>/<verb>.<ext>` when
/// the experiment names an output directory, or to stdout.
fn emit<T: Serialize>(
    verb: &str,
    common: &Common,
    spec: Option<&ExperimentSpec>,
    report: &T,
    csv: impl FnOnce() -> CliResult<String>,
) -> CliResult<()> {
    let format = format_of(common, spec);
    let ext = match format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    let out = common.out.clone().or_else(|| {
        spec.and_then(|s| s.output.as_ref())
            .map(|o| o.path.join(format!("{verb}.{ext}")))
    });
    match format {
        Format::Json => write_json(out.as_deref(), report),
        Format::Csv => write_text(out.as_deref(), &csv()?),
    }
}

fn eig_rows(tag: &str, eigs: &[C64]) -> Vec<Vec<String>> {
    eigs.iter()
        .map(|z| vec![tag.to_string(), z.re.to_string(), z.im.to_string()])
        .collect()
}

// ---------------------------------------------------------------- gen

fn parse_rule(text: &str) -> CliResult<SequenceRule> {
    let bad = || CliError::input("--rule", format!("cannot parse `{text}`"));
    let (name, arg) = match text.split_once(':') {
        Some((n, a)) => (n, Some(a.parse::<f64>().map_err(|_| bad())?)),
        None => (text, None),
    };
    match (name, arg) {
        ("harmonic", p) => Ok(SequenceRule::Harmonic {
            power: p.unwrap_or(1.0),
            scale: 1.0,
        }),
        ("geometric", Some(ratio)) => Ok(SequenceRule::Geometric { ratio, scale: 1.0 }),
        ("constant", Some(value)) => Ok(SequenceRule::Constant { value }),
        _ => Err(bad()),
    }
}

fn sequence(args: &GenArgs) -> CliResult<SequenceRule> {
    match (&args.values, &args.rule) {
        (Some(v), None) => Ok(SequenceRule::Explicit { values: v.clone() }),
        (None, Some(r)) => parse_rule(r),
        (Some(_), Some(_)) => Err(CliError::input(
            "--values",
            "give --values or --rule, not both",
        )),
        (None, None) => Err(CliError::input(
            "--values",
            "this kind needs --values or --rule",
        )),
    }
}

pub fn gen_family(args: &GenArgs) -> CliResult<OperatorFamily> {
    Ok(match args.kind {
        GenKind::Shift => OperatorFamily::WeightedShift {
            weights: sequence(args)?,
        },
        GenKind::Diagonal => OperatorFamily::Diagonal {
            diagonal: sequence(args)?,
        },
        GenKind::Jordan => {
            let lambda = match args.lambda.as_deref() {
                None => [0.0, 0.0],
                Some([re]) => [*re, 0.0],
                Some([re, im]) => [*re, *im],
                Some(_) => return Err(CliError::input("--lambda", "expected re or re,im")),
            };
            OperatorFamily::Jordan { lambda }
        }
        GenKind::RandomCompact => OperatorFamily::RandomCompact {
            decay: sequence(args)?,
            seed: args
                .common
                .seed
                .ok_or_else(|| CliError::input("--seed", "random-compact needs a seed"))?,
        },
    })
}

pub fn cmd_gen(args: &GenArgs) -> CliResult<Status> {
    let dim = args
        .common
        .dim
        .ok_or_else(|| CliError::input("--dim", "required"))?;
    if args.common.format == Some(Format::Csv) {
        return Err(CliError::input("--format", "gen writes matrix JSON only"));
    }
    let family = gen_family(args)?;
    let m = family
        .instantiate(dim)
        .map_err(|e| CliError::input("--values", e.to_string()))?;
    write_json(args.common.out.as_deref(), &MatrixFile::from_matrix(&m))?;
    Ok(Status::Success)
}

// ---------------------------------------------------------------- iterate

#[derive(Debug, Serialize)]
pub struct IterationSummary {
    pub converged: bool,
    pub stop_reason: StopReason,
    /// Index at which the final run of sub-tolerance steps began when
    /// converged; otherwise the number of steps taken.
    pub iterations: usize,
    pub steps_run: usize,
    pub tol_step: f64,
    pub max_iter: usize,
    pub initial_norm: f64,
    pub final_norm: f64,
    pub normality_defect: f64,
    pub input_normality_defect: f64,
    pub worst_norm_growth: f64,
    pub spectral_radius: f64,
    pub borderline_rank_steps: usize,
    pub spectrum: SpectrumReport,
    pub limit: MatrixFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analyses: Option<Map<String, Value>>,
}

impl IterationSummary {
    pub fn new(
        t: &ComplexMatrix,
        trace: &IterationTrace,
        cfg: &IterationConfig,
    ) -> CliResult<Self> {
        Ok(IterationSummary {
            converged: trace.converged,
            stop_reason: trace.stop_reason,
            iterations: trace.converged_at.unwrap_or(trace.iterations()),
            steps_run: trace.iterations(),
            tol_step: cfg.tol_step,
            max_iter: cfg.max_iter,
            initial_norm: trace.initial_norm,
            final_norm: trace.final_norm(),
            normality_defect: normality_defect(&trace.limit),
            input_normality_defect: trace.initial_defect,
            worst_norm_growth: trace.worst_norm_growth(),
            spectral_radius: spectral_radius(t)?,
            borderline_rank_steps: trace.steps.iter().filter(|s| s.borderline).count(),
            spectrum: spectrum_distance(t, &trace.limit)?,
            limit: MatrixFile::from_matrix(&trace.limit),
            analyses: None,
        })
    }
}

fn run_analyses(
    spec: &ExperimentSpec,
    t: &ComplexMatrix,
    trace: &IterationTrace,
    cfg: &IterationConfig,
    seed: Option<u64>,
) -> CliResult<Map<String, Value>> {
    let mut out = Map::new();
    for (k, analysis) in spec.analyses.iter().enumerate() {
        let field = format!("analyses[{k}]");
        let value = match analysis {
            Analysis::Trace => serde_json::to_value(&trace.steps)?,
            Analysis::Spectrum => serde_json::to_value(spectrum_distance(t, &trace.limit)?)?,
            Analysis::Radius { n_max } => serde_json::to_value(
                RadiusReport::new(t, trace, *n_max).map_err(|e| at(&field, e))?,
            )?,
            Analysis::Split { threshold } => {
                serde_json::to_value(SplitReport::new(t, *threshold).map_err(|e| at(&field, e))?)?
            }
            Analysis::Continuity {
                epsilons,
                trials,
                perturbation,
            } => {
                let seed = seed.ok_or_else(|| CliError::input("seed", "required"))?;
                serde_json::to_value(
                    ContinuityReport::new(t, epsilons, *trials, seed, *perturbation)
                        .map_err(|e| at(&field, e))?,
                )?
            }
            Analysis::Sections { dims } => serde_json::to_value(
                sections_report(&spec.family()?, dims, cfg).map_err(|e| at(&field, e))?,
            )?,
        };
        let key = match analysis {
            Analysis::Trace => "trace",
            Analysis::Spectrum => "spectrum",
            Analysis::Radius { .. } => "radius",
            Analysis::Split { .. } => "split",
            Analysis::Continuity { .. } => "continuity",
            Analysis::Sections { .. } => "sections",
        };
        let key = if out.contains_key(key) {
            format!("{key}_{k}")
        } else {
            key.to_string()
        };
        out.insert(key, value);
    }
    Ok(out)
}

/// Relocates core parameter errors to the analysis that caused them.
fn at(field: &str, e: CliError) -> CliError {
    match e {
        CliError::Core(c) => CliError::input(field, c.to_string()),
        other => other,
    }
}

fn trace_json(steps: &[StepRecord]) -> Vec<Value> {
    steps
        .iter()
        .map(|s| {
            serde_json::json!({
                "iter": s.index,
                "op_norm": s.op_norm,
                "step_delta": s.step_delta,
                "normality_defect": s.normality_defect,
            })
        })
        .collect()
}

pub fn cmd_iterate(args: &IterateArgs) -> CliResult<Status> {
    let common = &args.common;
    let (source, t) = load_matrix(common)?;
    let spec = source.experiment();
    let cfg = effective_config(common, spec)?;
    let trace = iterate(&t, &cfg)?;

    let mut summary = IterationSummary::new(&t, &trace, &cfg)?;
    if let Some(spec) = spec.filter(|s| !s.analyses.is_empty()) {
        summary.analyses = Some(run_analyses(
            spec,
            &t,
            &trace,
            &cfg,
            seed_of(common, Some(spec)),
        )?);
    }

    match out_path(common, spec) {
        Some(dir) => {
            write_json(Some(&dir.join("summary.json")), &summary)?;
            match format_of(common, spec) {
                Format::Csv => write_text(Some(&dir.join("trace.csv")), &trace_csv(&trace)?)?,
                Format::Json => {
                    write_json(Some(&dir.join("trace.json")), &trace_json(&trace.steps))?
                }
            }
        }
        None => write_json(None, &summary)?,
    }
    Ok(Status::from_converged(trace.converged))
}

// ---------------------------------------------------------------- spectrum

#[derive(Debug, Serialize)]
struct SpectrumOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stop_reason: Option<StopReason>,
    #[serde(flatten)]
    report: SpectrumReport,
}

pub fn cmd_spectrum(args: &SpectrumArgs) -> CliResult<Status> {
    let common = &args.common;
    let (source, t) = load_matrix(common)?;
    let spec = source.experiment();
    let (output, status) = match &args.other {
        Some(path) => {
            let other = read_matrix(path)?;
            if other.dim() != t.dim() {
                return Err(CliError::input(
                    "--other",
                    format!("dimension {} does not match {}", other.dim(), t.dim()),
                ));
            }
            let report = spectrum_distance(&t, &other)?;
            (
                SpectrumOutput {
                    converged: None,
                    stop_reason: None,
                    report,
                },
                Status::Success,
            )
        }
        None => {
            let cfg = effective_config(common, spec)?;
            let trace = iterate(&t, &cfg)?;
            (
                SpectrumOutput {
                    converged: Some(trace.converged),
                    stop_reason: Some(trace.stop_reason),
                    report: spectrum_distance(&t, &trace.limit)?,
                },
                Status::from_converged(trace.converged),
            )
        }
    };
    emit("spectrum", common, spec, &output, || {
        let mut rows = eig_rows("input", &output.report.input_eigs);
        rows.extend(eig_rows("other", &output.report.limit_eigs));
        csv_text(&["which", "re", "im"], rows)
    })?;
    Ok(status)
}

// ---------------------------------------------------------------- radius

#[derive(Debug, Serialize)]
pub struct RadiusReport {
    pub spectral_radius: f64,
    /// `‖Tⁿ‖^{1/n}` for `n = 1..=n_max`.
    pub gelfand: Vec<f64>,
    pub yamazaki: f64,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub iterations: usize,
}

impl RadiusReport {
    pub fn new(t: &ComplexMatrix, trace: &IterationTrace, n_max: usize) -> CliResult<Self> {
        Ok(RadiusReport {
            spectral_radius: spectral_radius(t)?,
            gelfand: gelfand_radius(t, n_max)?,
            yamazaki: yamazaki_radius(trace),
            converged: trace.converged,
            stop_reason: trace.stop_reason,
            iterations: trace.converged_at.unwrap_or(trace.iterations()),
        })
    }
}

pub fn cmd_radius(args: &RadiusArgs) -> CliResult<Status> {
    let common = &args.common;
    let (source, t) = load_matrix(common)?;
    let spec = source.experiment();
    let cfg = effective_config(common, spec)?;
    let trace = iterate(&t, &cfg)?;
    let report = RadiusReport::new(&t, &trace, args.n_max).map_err(|e| at("--n-max", e))?;
    emit("radius", common, spec, &report, || {
        csv_text(
            &["n", "gelfand"],
            report
                .gelfand
                .iter()
                .enumerate()
                .map(|(i, g)| vec![(i + 1).to_string(), g.to_string()]),
        )
    })?;
    Ok(Status::from_converged(trace.converged))
}

// ---------------------------------------------------------------- split

#[derive(Debug, Serialize)]
pub struct SplitReport {
    pub threshold: f64,
    pub residual: f64,
    pub outer_dim: usize,
    pub outer: Option<MatrixFile>,
    pub inner: Option<MatrixFile>,
    pub transform: MatrixFile,
    pub outer_eigs: Vec<C64>,
    pub inner_eigs: Vec<C64>,
}

impl SplitReport {
    pub fn new(t: &ComplexMatrix, threshold: f64) -> CliResult<Self> {
        let s = riesz_split(t, threshold)?;
        Ok(SplitReport {
            threshold: s.threshold,
            residual: s.residual,
            outer_dim: s.outer_dim(),
            outer: s.outer.as_ref().map(MatrixFile::from_matrix),
            inner: s.inner.as_ref().map(MatrixFile::from_matrix),
            transform: MatrixFile::from_matrix(&s.transform),
            outer_eigs: s.outer_eigs,
            inner_eigs: s.inner_eigs,
        })
    }
}

pub fn cmd_split(args: &SplitArgs) -> CliResult<Status> {
    let common = &args.common;
    let (source, t) = load_matrix(common)?;
    let spec = source.experiment();
    let report = SplitReport::new(&t, args.threshold).map_err(|e| at("--threshold", e))?;
    emit("split", common, spec, &report, || {
        let mut rows = eig_rows("outer", &report.outer_eigs);
        rows.extend(eig_rows("inner", &report.inner_eigs));
        csv_text(&["block", "re", "im"], rows)
    })?;
    Ok(Status::Success)
}

// ---------------------------------------------------------------- continuity

#[derive(Debug, Serialize)]
pub struct ContinuityReport {
    pub seed: u64,
    pub trials: usize,
    pub perturbation: Perturbation,
    pub operator_norm: f64,
    pub rows: Vec<ContinuityRow>,
}

impl ContinuityReport {
    pub fn new(
        t: &ComplexMatrix,
        epsilons: &[f64],
        trials: usize,
        seed: u64,
        perturbation: Perturbation,
    ) -> CliResult<Self> {
        Ok(ContinuityReport {
            seed,
            trials,
            perturbation,
            operator_norm: aluthge_core::linalg::op_norm(t),
            rows: continuity_probe(t, epsilons, trials, seed, perturbation)?,
        })
    }
}

pub fn cmd_continuity(args: &ContinuityArgs) -> CliResult<Status> {
    let common = &args.common;
    let (source, t) = load_matrix(common)?;
    let spec = source.experiment();
    let seed = seed_of(common, spec)
        .ok_or_else(|| CliError::input("--seed", "continuity draws random perturbations"))?;
    let report = ContinuityReport::new(
        &t,
        &args.epsilons,
        args.trials,
        seed,
        args.perturbation.into(),
    )
    .map_err(|e| at("--epsilons", e))?;
    emit("continuity", common, spec, &report, || {
        csv_text(
            &["epsilon", "displacement"],
            report
                .rows
                .iter()
                .map(|r| vec![r.epsilon.to_string(), r.displacement.to_string()]),
        )
    })?;
    Ok(Status::Success)
}

// ---------------------------------------------------------------- sections

#[derive(Debug, Serialize)]
pub struct SectionOutput {
    pub dim: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub iterations: usize,
    pub normality_defect: f64,
    pub worst_norm_growth: f64,
    pub corner_deviation: Option<f64>,
    pub spectrum: SpectrumReport,
    pub limit: MatrixFile,
}

impl From<SectionRecord> for SectionOutput {
    fn from(r: SectionRecord) -> Self {
        SectionOutput {
            dim: r.dim,
            converged: r.converged,
            stop_reason: r.stop_reason,
            iterations: r.iterations,
            normality_defect: r.normality_defect,
            worst_norm_growth: r.worst_norm_growth,
            corner_deviation: r.corner_deviation,
            spectrum: r.spectrum,
            limit: MatrixFile::from_matrix(&r.limit),
        }
    }
}

pub fn sections_report(
    family: &OperatorFamily,
    dims: &[usize],
    cfg: &IterationConfig,
) -> CliResult<Vec<SectionOutput>> {
    Ok(finite_section_study(family, dims, cfg)?
        .into_iter()
        .map(SectionOutput::from)
        .collect())
}

pub fn cmd_sections(args: &SectionsArgs) -> CliResult<Status> {
    let common = &args.common;
    let source = load_source(common)?;
    let spec = source.experiment();
    let family = match &source {
        Source::Family(f) => f.clone(),
        Source::Experiment(s) => s.family()?,
        Source::Matrix(m) => OperatorFamily::CustomMatrix {
            dim: m.dim(),
            data: MatrixFile::from_matrix(m).data,
        },
    };
    let dims = match (&args.dims, spec) {
        (Some(d), _) => d.clone(),
        (None, Some(s)) => s
            .analyses
            .iter()
            .find_map(|a| match a {
                Analysis::Sections { dims } => Some(dims.clone()),
                _ => None,
            })
            .ok_or_else(|| CliError::input("--dims", "required"))?,
        (None, None) => return Err(CliError::input("--dims", "required")),
    };
    let cfg = effective_config(common, spec)?;
    let records = sections_report(&family, &dims, &cfg).map_err(|e| at("--dims", e))?;
    let all_converged = records.iter().all(|r| r.converged);
    emit("sections", common, spec, &records, || {
        csv_text(
            &[
                "dim",
                "converged",
                "stop_reason",
                "iterations",
                "normality_defect",
                "matching_distance",
                "hausdorff",
                "corner_deviation",
            ],
            records.iter().map(|r| {
                vec![
                    r.dim.to_string(),
                    r.converged.to_string(),
                    r.stop_reason.as_str().to_string(),
                    r.iterations.to_string(),
                    r.normality_defect.to_string(),
                    r.spectrum.matching_distance.to_string(),
                    r.spectrum.hausdorff.to_string(),
                    r.corner_deviation
                        .map(|d| d.to_string())
                        .unwrap_or_default(),
                ]
            }),
        )
    })?;
    Ok(Status::from_converged(all_converged))
}

// ---------------------------------------------------------------- suite

pub const SUITE_REPORT: &str = "suite_report.json";

pub fn cmd_suite(args: &SuiteArgs) -> CliResult<Status> {
    let common = &args.common;
    let dir: &Path = common
        .out
        .as_deref()
        .ok_or_else(|| CliError::input("--out", "the suite needs an output directory"))?;
    if common.format == Some(Format::Csv) {
        return Err(CliError::input("--format", "the suite report is JSON only"));
    }
    let mut opts = SuiteOptions {
        config: effective_config(common, None)?,
        ..Default::default()
    };
    if let Some(seed) = common.seed {
        opts.seed = seed;
    }
    if let Some(ids) = &args.criteria {
        opts = opts
            .only(ids)
            .map_err(|m| CliError::input("--criteria", m))?;
    }
    let report = run_suite(&opts)?;
    write_json(Some(&dir.join(SUITE_REPORT)), &report)?;
    for line in report.lines() {
        eprintln!("{line}");
    }
    Ok(if report.passed {
        Status::Success
    } else {
        Status::Shortfall
    })
}
