//! Acceptance battery behind `aluthge suite`.
//!
//! Every randomized case draws from `seeded_rng(base + offset + i)`, so a
//! report is a pure function of [`SuiteOptions`] apart from its wall-clock
//! fields. Criterion 11 reruns the other criteria and compares the numbers.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use aluthge_core::aluthge::{
    aluthge, aluthge_powers, iterate, sandwich, IterationConfig, StopReason,
};
use aluthge_core::analysis::{
    continuity_probe, finite_section_study, gelfand_radius, matching_distance, normality_defect,
    riesz_split, spectrum_distance, Perturbation,
};
use aluthge_core::generators::{
    complex_gaussian, jordan_block, random_gaussian_matrix, random_rank_deficient, random_unitary,
    seeded_rng, weighted_shift, OperatorFamily, SequenceRule, Term,
};
use aluthge_core::linalg::{eigenvalues, hermitian_eig, op_norm, spectral_radius};
use aluthge_core::polar::polar_decompose;
use aluthge_core::{ComplexMatrix, Result, C64};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

pub const DEFAULT_SEED: u64 = 20_240_917;

pub const CRITERIA: [(u8, &str); 11] = [
    (1, "matrix_convergence"),
    (2, "spectrum_preservation"),
    (3, "quasinilpotent_collapse"),
    (4, "norm_monotonicity"),
    (5, "spectral_radius_law"),
    (6, "continuity"),
    (7, "block_decomposition"),
    (8, "riesz_split"),
    (9, "finite_sections"),
    (10, "polar_correctness"),
    (11, "determinism"),
];

const CORPUS_SIZE: u64 = 200;
const POLAR_CASES: u64 = 200;
const BLOCK_PAIRS: u64 = 50;
const SPLIT_CASES: u64 = 50;
const MAX_LISTED_FAILURES: usize = 10;

// seed offsets keep the batteries on disjoint streams
const CORPUS_OFFSET: u64 = 0;
const CONTINUITY_OFFSET: u64 = 10_000;
const BLOCK_OFFSET: u64 = 20_000;
const SPLIT_OFFSET: u64 = 30_000;
const POLAR_OFFSET: u64 = 40_000;

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub seed: u64,
    pub config: IterationConfig,
    pub criteria: BTreeSet<u8>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: DEFAULT_SEED,
            config: IterationConfig::default(),
            criteria: CRITERIA.iter().map(|c| c.0).collect(),
        }
    }
}

impl SuiteOptions {
    pub fn only(mut self, ids: &[u8]) -> std::result::Result<Self, String> {
        if ids.is_empty() {
            return Err("at least one criterion is required".into());
        }
        if let Some(bad) = ids.iter().find(|&&i| !(1..=11).contains(&i)) {
            return Err(format!("unknown criterion {bad}; expected 1-11"));
        }
        self.criteria = ids.iter().copied().collect();
        Ok(self)
    }

    fn wants(&self, ids: &[u8]) -> bool {
        ids.iter().any(|i| self.criteria.contains(i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "<")]
    Below,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub worst: f64,
    pub relation: Relation,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: &'static str, worst: f64, limit: f64) -> Self {
        Check {
            name,
            worst,
            relation: Relation::AtMost,
            limit,
            passed: worst <= limit,
        }
    }

    pub fn below(name: &'static str, worst: f64, limit: f64) -> Self {
        Check {
            name,
            worst,
            relation: Relation::Below,
            limit,
            passed: worst < limit,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Informational values that do not gate the criterion.
    pub measured: BTreeMap<&'static str, f64>,
    pub failures: Vec<String>,
}

impl CriterionReport {
    fn new(
        id: u8,
        checks: Vec<Check>,
        measured: BTreeMap<&'static str, f64>,
        mut failures: Vec<String>,
    ) -> Self {
        let name = CRITERIA[(id - 1) as usize].1;
        let total = failures.len();
        if total > MAX_LISTED_FAILURES {
            failures.truncate(MAX_LISTED_FAILURES);
            failures.push(format!("... {} more", total - MAX_LISTED_FAILURES));
        }
        CriterionReport {
            id,
            name,
            passed: checks.iter().all(|c| c.passed),
            checks,
            measured,
            failures,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn line(&self) -> String {
        let checks: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                let rel = match c.relation {
                    Relation::AtMost => "<=",
                    Relation::Below => "<",
                };
                let mark = if c.passed { "" } else { " (violated)" };
                format!("{} {:.3e} {rel} {:.0e}{mark}", c.name, c.worst, c.limit)
            })
            .collect();
        format!(
            "criterion {:>2} {} {}: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            checks.join("; ")
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub tol_step: f64,
    pub max_iter: usize,
    pub passed: bool,
    /// `id:name` of each failing criterion.
    pub failed: Vec<String>,
    pub criteria: Vec<CriterionReport>,
    pub wall_clock_s: BTreeMap<&'static str, f64>,
}

impl SuiteReport {
    pub fn lines(&self) -> Vec<String> {
        let mut out: Vec<String> = self.criteria.iter().map(CriterionReport::line).collect();
        out.push(if self.passed {
            "suite PASS".to_string()
        } else {
            format!("suite FAIL: {}", self.failed.join(", "))
        });
        out
    }

    pub fn criterion(&self, id: u8) -> Option<&CriterionReport> {
        self.criteria.iter().find(|c| c.id == id)
    }
}

/// The report as JSON with every `wall_clock_s` entry removed.
pub fn numeric_fields<T: Serialize>(report: &T) -> Value {
    fn strip(v: &mut Value) {
        match v {
            Value::Object(map) => {
                map.remove("wall_clock_s");
                map.values_mut().for_each(strip);
            }
            Value::Array(items) => items.iter_mut().for_each(strip),
            _ => {}
        }
    }
    let mut v = serde_json::to_value(report).expect("report serializes");
    strip(&mut v);
    v
}

/// Number of leaves that differ between two JSON documents.
fn mismatched_leaves(a: &Value, b: &Value) -> usize {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            let keys: BTreeSet<&String> = x.keys().chain(y.keys()).collect();
            keys.into_iter()
                .map(|k| match (x.get(k), y.get(k)) {
                    (Some(p), Some(q)) => mismatched_leaves(p, q),
                    _ => 1,
                })
                .sum()
        }
        (Value::Array(x), Value::Array(y)) => {
            let common: usize = x.iter().zip(y).map(|(p, q)| mismatched_leaves(p, q)).sum();
            common + x.len().abs_diff(y.len())
        }
        (p, q) => usize::from(p != q),
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

// ---------------------------------------------------------------- batteries

/// Scalars kept from one random-corpus iteration.
struct CorpusCase {
    seed: u64,
    dim: usize,
    norm: f64,
    converged: bool,
    stop_reason: StopReason,
    iterations: usize,
    defect: f64,
    matching: f64,
    hausdorff: f64,
    final_norm: f64,
    rho: f64,
    gelfand64: f64,
    growth: f64,
}

fn corpus(opts: &SuiteOptions) -> Result<Vec<CorpusCase>> {
    (0..CORPUS_SIZE)
        .into_par_iter()
        .map(|i| {
            let seed = opts.seed.wrapping_add(CORPUS_OFFSET + i);
            let dim = 2 + (i % 11) as usize;
            let t = random_gaussian_matrix(dim, &mut seeded_rng(seed))?;
            let trace = iterate(&t, &opts.config)?;
            let spectrum = spectrum_distance(&t, &trace.limit)?;
            Ok(CorpusCase {
                seed,
                dim,
                norm: trace.initial_norm,
                converged: trace.converged,
                stop_reason: trace.stop_reason,
                iterations: trace.iterations(),
                defect: normality_defect(&trace.limit),
                matching: spectrum.matching_distance,
                hausdorff: spectrum.hausdorff,
                final_norm: trace.final_norm(),
                rho: spectral_radius(&t)?,
                gelfand64: gelfand_radius(&t, 64)?[63],
                growth: trace.worst_norm_growth(),
            })
        })
        .collect()
}

struct CollapseCase {
    label: String,
    scale: f64,
    limit_norm: f64,
    converged: bool,
    growth: f64,
}

fn quasinilpotent(opts: &SuiteOptions) -> Result<(Vec<CollapseCase>, f64)> {
    let mut inputs = Vec::new();
    for n in 2..=8 {
        inputs.push((
            format!("jordan(0, {n})"),
            jordan_block(C64::new(0.0, 0.0), n)?,
        ));
    }
    for n in [4usize, 8, 16] {
        let w: Vec<C64> = (1..n).map(|k| C64::new(1.0 / k as f64, 0.0)).collect();
        inputs.push((format!("weighted_shift(1/k, {n})"), weighted_shift(&w, n)?));
    }
    let cases = inputs
        .into_par_iter()
        .map(|(label, t)| {
            let trace = iterate(&t, &opts.config)?;
            Ok(CollapseCase {
                label,
                scale: trace.initial_norm.max(1.0),
                limit_norm: op_norm(&trace.limit),
                converged: trace.converged,
                growth: trace.worst_norm_growth(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let j2_step = op_norm(&aluthge(&jordan_block(C64::new(0.0, 0.0), 2)?)?);
    Ok((cases, j2_step))
}

fn section_family() -> OperatorFamily {
    OperatorFamily::Combination {
        terms: vec![
            Term {
                coefficient: 1.0,
                family: OperatorFamily::Diagonal {
                    diagonal: SequenceRule::harmonic(),
                },
            },
            Term {
                coefficient: 0.2,
                family: OperatorFamily::WeightedShift {
                    weights: SequenceRule::Harmonic {
                        power: 2.0,
                        scale: 1.0,
                    },
                },
            },
        ],
    }
}

struct BlockCase {
    label: String,
    deviation_rel: f64,
    growth: f64,
}

fn growth_of(norms: &[f64]) -> f64 {
    norms
        .windows(2)
        .map(|w| match (w[0] == 0.0, w[1] == 0.0) {
            (true, true) => 0.0,
            (true, false) => f64::INFINITY,
            _ => w[1] / w[0] - 1.0,
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn blocks(opts: &SuiteOptions) -> Result<Vec<BlockCase>> {
    (0..BLOCK_PAIRS)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded_rng(opts.seed.wrapping_add(BLOCK_OFFSET + i));
            let (da, db) = (2 + (i % 5) as usize, 2 + ((i / 5) % 5) as usize);
            let a = random_gaussian_matrix(da, &mut rng)?;
            let b = random_gaussian_matrix(db, &mut rng)?;
            let t = ComplexMatrix::direct_sum(&a, &b);
            let (pa, pb, pt) = (
                aluthge_powers(&a, 20)?,
                aluthge_powers(&b, 20)?,
                aluthge_powers(&t, 20)?,
            );
            let scale = op_norm(&a).max(op_norm(&b));
            let deviation = max_of(
                pt.iter()
                    .zip(pa.iter().zip(&pb))
                    .map(|(m, (x, y))| op_norm(&(m - &ComplexMatrix::direct_sum(x, y)))),
            );
            let norms: Vec<f64> = std::iter::once(op_norm(&t))
                .chain(pt.iter().map(op_norm))
                .collect();
            Ok(BlockCase {
                label: format!("pair {i} ({da}+{db})"),
                deviation_rel: deviation / scale,
                growth: growth_of(&norms),
            })
        })
        .collect()
}

// ---------------------------------------------------------------- criteria

fn c1(cases: &[CorpusCase], cfg: &IterationConfig) -> CriterionReport {
    let failures: Vec<String> = cases
        .iter()
        .filter(|c| !c.converged)
        .map(|c| {
            format!(
                "seed {} dim {}: {} after {} steps",
                c.seed,
                c.dim,
                c.stop_reason.as_str(),
                c.iterations
            )
        })
        .collect();
    let not_converged = failures.len() as f64;
    let mut measured = BTreeMap::new();
    measured.insert(
        "max_iterations",
        max_of(cases.iter().map(|c| c.iterations as f64)),
    );
    measured.insert("max_iter", cfg.max_iter as f64);
    CriterionReport::new(
        1,
        vec![
            Check::at_most("not_converged", not_converged, 0.0),
            Check::at_most(
                "normality_defect_rel",
                max_of(cases.iter().map(|c| c.defect / c.norm)),
                1e-8,
            ),
        ],
        measured,
        failures,
    )
}

fn c2(cases: &[CorpusCase]) -> CriterionReport {
    let rel = |c: &CorpusCase| c.matching / c.norm.max(1.0);
    let failures = cases
        .iter()
        .filter(|c| rel(c) > 1e-6)
        .map(|c| format!("seed {} dim {}: matching {:.3e}", c.seed, c.dim, c.matching))
        .collect();
    let mut measured = BTreeMap::new();
    measured.insert(
        "hausdorff_rel",
        max_of(cases.iter().map(|c| c.hausdorff / c.norm.max(1.0))),
    );
    CriterionReport::new(
        2,
        vec![Check::at_most(
            "matching_distance_rel",
            max_of(cases.iter().map(rel)),
            1e-6,
        )],
        measured,
        failures,
    )
}

fn c3(cases: &[CollapseCase], j2_step: f64) -> CriterionReport {
    let rel = |c: &CollapseCase| c.limit_norm / c.scale;
    let mut failures: Vec<String> = cases
        .iter()
        .filter(|c| rel(c) > 1e-10)
        .map(|c| format!("{}: limit norm {:.3e}", c.label, c.limit_norm))
        .collect();
    failures.extend(
        cases
            .iter()
            .filter(|c| !c.converged)
            .map(|c| format!("{}: iteration did not converge", c.label)),
    );
    CriterionReport::new(
        3,
        vec![
            Check::at_most("limit_norm_rel", max_of(cases.iter().map(rel)), 1e-10),
            Check::at_most("jordan2_one_step_norm", j2_step, 1e-14),
        ],
        BTreeMap::new(),
        failures,
    )
}

fn c4(sources: &[(&'static str, Vec<(String, f64)>)]) -> CriterionReport {
    let mut measured = BTreeMap::new();
    let mut failures = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for (name, growths) in sources {
        let w = growths
            .iter()
            .map(|g| g.1)
            .fold(f64::NEG_INFINITY, f64::max);
        measured.insert(*name, w);
        worst = worst.max(w);
        failures.extend(
            growths
                .iter()
                .filter(|g| g.1 > 1e-12)
                .map(|g| format!("{name} {}: growth {:.3e}", g.0, g.1)),
        );
    }
    CriterionReport::new(
        4,
        vec![Check::at_most("norm_growth", worst, 1e-12)],
        measured,
        failures,
    )
}

fn c5(cases: &[CorpusCase]) -> CriterionReport {
    let yam = |c: &CorpusCase| (c.final_norm - c.rho).abs() / c.norm.max(1.0);
    let gel = |c: &CorpusCase| (c.gelfand64 - c.rho).abs() / c.rho;
    let mut failures: Vec<String> = cases
        .iter()
        .filter(|c| c.converged && yam(c) > 1e-6)
        .map(|c| format!("seed {} dim {}: yamazaki {:.3e}", c.seed, c.dim, yam(c)))
        .collect();
    let gelfand_misses: Vec<&CorpusCase> = cases.iter().filter(|c| gel(c) > 1e-2).collect();
    failures.extend(gelfand_misses.iter().map(|c| {
        format!(
            "seed {} dim {}: gelfand(64) rel {:.3e}",
            c.seed,
            c.dim,
            gel(c)
        )
    }));
    let mut measured = BTreeMap::new();
    measured.insert("gelfand_violations", gelfand_misses.len() as f64);
    measured.insert(
        "converged_traces",
        cases.iter().filter(|c| c.converged).count() as f64,
    );
    CriterionReport::new(
        5,
        vec![
            Check::at_most(
                "yamazaki_rel",
                max_of(cases.iter().filter(|c| c.converged).map(yam)),
                1e-6,
            ),
            Check::at_most("gelfand_n64_rel", max_of(cases.iter().map(gel)), 1e-2),
        ],
        measured,
        failures,
    )
}

fn c6(opts: &SuiteOptions) -> Result<CriterionReport> {
    let eps: Vec<f64> = (2..=8).map(|k| 10f64.powi(-k)).collect();
    let probe =
        |t: &ComplexMatrix, seed: u64| continuity_probe(t, &eps, 5, seed, Perturbation::Dense);

    let full = (0..10u64)
        .into_par_iter()
        .map(|i| {
            let seed = opts.seed.wrapping_add(CONTINUITY_OFFSET + i);
            let t = random_gaussian_matrix(8, &mut seeded_rng(seed))?;
            let rows = probe(&t, seed)?;
            Ok((seed, op_norm(&t), rows))
        })
        .collect::<Result<Vec<_>>>()?;
    let deficient = (0..5u64)
        .into_par_iter()
        .map(|i| {
            let seed = opts.seed.wrapping_add(CONTINUITY_OFFSET + 100 + i);
            let t = random_rank_deficient(8, 3 + i as usize, &mut seeded_rng(seed))?;
            let rows = probe(&t, seed)?;
            Ok((seed, op_norm(&t), rows))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut failures = Vec::new();
    let mut bad_steps = 0usize;
    for (seed, _, rows) in &full {
        let d: Vec<f64> = rows.iter().map(|r| r.displacement).collect();
        let bad =
            d.iter().filter(|&&x| x <= 0.0).count() + d.windows(2).filter(|w| w[1] >= w[0]).count();
        if bad > 0 {
            let shown: Vec<String> = d.iter().map(|x| format!("{x:.3e}")).collect();
            failures.push(format!(
                "full-rank seed {seed}: displacements [{}]",
                shown.join(", ")
            ));
        }
        bad_steps += bad;
    }
    let last = |rows: &[aluthge_core::analysis::ContinuityRow]| {
        rows.last().map_or(0.0, |r| r.displacement)
    };
    let full_final = max_of(full.iter().map(|(_, n, rows)| last(rows) / n));
    let deficient_final = max_of(deficient.iter().map(|(_, n, rows)| last(rows) / n));
    for (seed, n, rows) in &deficient {
        if last(rows) / n > 1e-3 {
            failures.push(format!(
                "rank-deficient seed {seed}: final {:.3e}",
                last(rows)
            ));
        }
    }
    let eps_min = eps[eps.len() - 1];
    let mut measured = BTreeMap::new();
    measured.insert(
        "full_rank_ratio_at_min_eps",
        max_of(full.iter().map(|(_, _, rows)| last(rows) / eps_min)),
    );
    measured.insert(
        "rank_deficient_ratio_at_min_eps",
        max_of(deficient.iter().map(|(_, _, rows)| last(rows) / eps_min)),
    );
    Ok(CriterionReport::new(
        6,
        vec![
            Check::at_most("full_rank_non_decreasing_steps", bad_steps as f64, 0.0),
            Check::at_most("full_rank_final_rel", full_final, 1e-4),
            Check::at_most("rank_deficient_final_rel", deficient_final, 1e-3),
        ],
        measured,
        failures,
    ))
}

fn c7(cases: &[BlockCase]) -> CriterionReport {
    let failures = cases
        .iter()
        .filter(|c| c.deviation_rel > 1e-8)
        .map(|c| format!("{}: deviation {:.3e}", c.label, c.deviation_rel))
        .collect();
    CriterionReport::new(
        7,
        vec![Check::at_most(
            "block_commutation_rel",
            max_of(cases.iter().map(|c| c.deviation_rel)),
            1e-8,
        )],
        BTreeMap::new(),
        failures,
    )
}

/// `Q (D + N) Q*` with eigenvalue moduli roughly halving and strictly upper
/// `N`; returns the matrix, its constructed eigenvalues and a threshold in
/// the gap after the `split`-th largest modulus.
fn separated_matrix(dim: usize, split: usize, seed: u64) -> Result<(ComplexMatrix, Vec<C64>, f64)> {
    let mut rng = seeded_rng(seed);
    let g = complex_gaussian(dim, &mut rng);
    let q = random_unitary(dim, &mut rng)?;
    let eigs: Vec<C64> = (0..dim)
        .map(|k| {
            let z = g[(k, k)];
            let phase = if z.norm() > 0.0 {
                z / z.norm()
            } else {
                C64::new(1.0, 0.0)
            };
            let modulus = 2f64.powi(1 - k as i32) * (1.0 + 0.25 * z.re.tanh());
            phase * modulus
        })
        .collect();
    let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        entries[i * dim + i] = eigs[i];
        for j in i + 1..dim {
            entries[i * dim + j] = g[(i, j)] * 0.5;
        }
    }
    let upper = ComplexMatrix::from_row_major(dim, &entries)?;
    let t = &(&q * &upper) * &q.adjoint();
    let mut moduli: Vec<f64> = eigs.iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    let r = (moduli[split - 1] * moduli[split]).sqrt();
    Ok((t, eigs, r))
}

fn c8(opts: &SuiteOptions) -> Result<CriterionReport> {
    let results = (0..SPLIT_CASES)
        .into_par_iter()
        .map(|i| {
            let dim = 3 + (i % 6) as usize;
            let split = 1 + (i as usize % (dim - 1));
            let seed = opts.seed.wrapping_add(SPLIT_OFFSET + i);
            let (t, constructed, r) = separated_matrix(dim, split, seed)?;
            let norm = op_norm(&t);
            let eigs = eigenvalues(&t)?;
            let expected_outer = eigs.iter().filter(|z| z.norm() > r).count();
            let label = format!("seed {seed} dim {dim} r {r:.4}");
            let s = match riesz_split(&t, r) {
                Ok(s) => s,
                Err(e) => return Ok((label, Some(format!("rejected: {e}")), f64::INFINITY, f64::INFINITY)),
            };
            let outer = match &s.outer {
                Some(m) => eigenvalues(m)?,
                None => Vec::new(),
            };
            let inner = match &s.inner {
                Some(m) => eigenvalues(m)?,
                None => Vec::new(),
            };
            let mut problem = None;
            if s.outer_dim() != expected_outer || expected_outer != split {
                problem = Some(format!(
                    "outer block has {} eigenvalues, eigenvalues(T) has {expected_outer} beyond r, constructed {split}",
                    s.outer_dim()
                ));
            } else if outer.iter().any(|z| z.norm() <= r) || inner.iter().any(|z| z.norm() > r) {
                problem = Some("block eigenvalue on the wrong side of the circle".into());
            }
            let blocks: Vec<C64> = outer.iter().chain(&inner).copied().collect();
            let matching = matching_distance(&blocks, &eigs)?.max(matching_distance(&blocks, &constructed)?);
            Ok((label, problem, s.residual / norm, matching / norm.max(1.0)))
        })
        .collect::<Result<Vec<_>>>()?;

    let failures: Vec<String> = results
        .iter()
        .filter_map(|(label, p, res, _)| match p {
            Some(p) => Some(format!("{label}: {p}")),
            None if *res > 1e-8 => Some(format!("{label}: residual {res:.3e}")),
            None => None,
        })
        .collect();
    let mismatches = results.iter().filter(|r| r.1.is_some()).count();
    let mut measured = BTreeMap::new();
    measured.insert(
        "block_spectrum_matching_rel",
        max_of(results.iter().map(|r| r.3)),
    );
    Ok(CriterionReport::new(
        8,
        vec![
            Check::at_most("partition_mismatches", mismatches as f64, 0.0),
            Check::at_most("residual_rel", max_of(results.iter().map(|r| r.2)), 1e-8),
        ],
        measured,
        failures,
    ))
}

struct SectionsOutcome {
    report: CriterionReport,
    growth: Vec<(String, f64)>,
}

fn c9(opts: &SuiteOptions) -> Result<SectionsOutcome> {
    let records = finite_section_study(&section_family(), &[4, 8, 16], &opts.config)?;
    let mut failures = Vec::new();
    let mut measured = BTreeMap::new();
    let mut defect = 0f64;
    let mut matching = 0f64;
    for r in &records {
        let scale = op_norm(&r.section).max(1.0);
        defect = defect.max(r.normality_defect / scale);
        matching = matching.max(r.spectrum.matching_distance);
        if !r.converged {
            failures.push(format!(
                "N={}: {} after {} steps",
                r.dim,
                r.stop_reason.as_str(),
                r.iterations
            ));
        }
        let key: &'static str = match r.dim {
            4 => "iterations_4",
            8 => "iterations_8",
            _ => "iterations_16",
        };
        measured.insert(key, r.iterations as f64);
    }
    let devs: Vec<f64> = records.iter().filter_map(|r| r.corner_deviation).collect();
    if let [d8, d16] = devs[..] {
        measured.insert("corner_deviation_8", d8);
        measured.insert("corner_deviation_16", d16);
    }
    let increase = devs
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let not_converged = records.iter().filter(|r| !r.converged).count();
    let growth = records
        .iter()
        .map(|r| (format!("N={}", r.dim), r.worst_norm_growth))
        .collect();
    Ok(SectionsOutcome {
        report: CriterionReport::new(
            9,
            vec![
                Check::at_most("not_converged", not_converged as f64, 0.0),
                Check::at_most("normality_defect_rel", defect, 1e-8),
                Check::at_most("matching_distance", matching, 1e-6),
                Check::below("corner_deviation_increase", increase, 0.0),
            ],
            measured,
            failures,
        ),
        growth,
    })
}

struct PolarCase {
    label: String,
    reconstruction: f64,
    projection: f64,
    kernel: f64,
    invariance: f64,
    unitary: Option<f64>,
}

fn polar_case(i: u64, seed: u64) -> Result<PolarCase> {
    let dim = 2 + (i % 15) as usize;
    let mut rng = seeded_rng(seed);
    let (t, label) = if i.is_multiple_of(3) {
        let rank = (i / 3) as usize % dim;
        (
            random_rank_deficient(dim, rank, &mut rng)?,
            format!("seed {seed} dim {dim} rank {rank}"),
        )
    } else {
        (
            random_gaussian_matrix(dim, &mut rng)?,
            format!("seed {seed} dim {dim}"),
        )
    };
    let parts = polar_decompose(&t, None)?;
    let scale = parts.norm().max(1.0);
    let u = &parts.isometry;

    let reconstruction = op_norm(&(&(u * &parts.modulus) - &t));
    let proj = &u.adjoint() * u;
    let idempotent = op_norm(&(&(&proj * &proj) - &proj));
    let hermitian = op_norm(&(&proj - &proj.adjoint()));
    let rank_gap = (proj.trace().re - parts.rank as f64).abs();

    // kernel of |T| from its own eigendecomposition, independent of the SVD
    let eig = hermitian_eig(&parts.modulus)?;
    let vecs = eig.eigenvectors.as_matrix();
    let mut kernel = 0f64;
    for k in 0..dim - parts.rank {
        let x = vecs.column(k).into_owned();
        kernel = kernel.max((u.as_matrix() * x).norm());
    }

    let root = parts.modulus_power(0.5)?;
    let invariance = op_norm(&(&sandwich(&root, u) - &sandwich(&root, &parts.unitary_extension())));

    let unitary = (parts.rank == dim).then(|| {
        let eye = ComplexMatrix::identity(dim).expect("dim >= 1");
        op_norm(&(&proj - &eye)).max(op_norm(&(&(u * &u.adjoint()) - &eye)))
    });

    Ok(PolarCase {
        label,
        reconstruction: reconstruction / scale,
        projection: idempotent.max(hermitian).max(rank_gap) / scale,
        kernel: kernel / scale,
        invariance: invariance / scale,
        unitary,
    })
}

fn c10(opts: &SuiteOptions) -> Result<CriterionReport> {
    let cases = (0..POLAR_CASES)
        .into_par_iter()
        .map(|i| polar_case(i, opts.seed.wrapping_add(POLAR_OFFSET + i)))
        .collect::<Result<Vec<_>>>()?;
    let tol = 1e-10;
    let failures = cases
        .iter()
        .filter(|c| {
            c.reconstruction
                .max(c.projection)
                .max(c.kernel)
                .max(c.invariance)
                > tol
                || c.unitary.is_some_and(|u| u > tol)
        })
        .map(|c| {
            format!(
                "{}: recon {:.2e} proj {:.2e} kernel {:.2e} delta {:.2e}",
                c.label, c.reconstruction, c.projection, c.kernel, c.invariance
            )
        })
        .collect();
    Ok(CriterionReport::new(
        10,
        vec![
            Check::at_most(
                "reconstruction_rel",
                max_of(cases.iter().map(|c| c.reconstruction)),
                tol,
            ),
            Check::at_most(
                "projection_rel",
                max_of(cases.iter().map(|c| c.projection)),
                tol,
            ),
            Check::at_most(
                "kernel_alignment_rel",
                max_of(cases.iter().map(|c| c.kernel)),
                tol,
            ),
            Check::at_most(
                "extension_invariance_rel",
                max_of(cases.iter().map(|c| c.invariance)),
                tol,
            ),
            Check::at_most(
                "invertible_unitarity",
                max_of(cases.iter().filter_map(|c| c.unitary)),
                tol,
            ),
        ],
        BTreeMap::new(),
        failures,
    ))
}

/// Criteria 1-10 (those selected), in id order.
fn run_pass(opts: &SuiteOptions) -> Result<Vec<CriterionReport>> {
    let mut out = Vec::new();
    let mut growth: Vec<(&'static str, Vec<(String, f64)>)> = Vec::new();
    let monotone = opts.wants(&[4]);

    if opts.wants(&[1, 2, 4, 5]) {
        let cases = corpus(opts)?;
        if opts.wants(&[1]) {
            out.push(c1(&cases, &opts.config));
        }
        if opts.wants(&[2]) {
            out.push(c2(&cases));
        }
        if opts.wants(&[5]) {
            out.push(c5(&cases));
        }
        growth.push((
            "random_corpus",
            cases
                .iter()
                .map(|c| (format!("seed {}", c.seed), c.growth))
                .collect(),
        ));
    }
    if opts.wants(&[3, 4]) {
        let (cases, j2) = quasinilpotent(opts)?;
        if opts.wants(&[3]) {
            out.push(c3(&cases, j2));
        }
        growth.push((
            "quasinilpotent",
            cases.iter().map(|c| (c.label.clone(), c.growth)).collect(),
        ));
    }
    if opts.wants(&[6]) {
        out.push(c6(opts)?);
    }
    if opts.wants(&[7, 4]) {
        let cases = blocks(opts)?;
        if opts.wants(&[7]) {
            out.push(c7(&cases));
        }
        growth.push((
            "block_pairs",
            cases.iter().map(|c| (c.label.clone(), c.growth)).collect(),
        ));
    }
    if opts.wants(&[8]) {
        out.push(c8(opts)?);
    }
    if opts.wants(&[9, 4]) {
        let s = c9(opts)?;
        if opts.wants(&[9]) {
            out.push(s.report);
        }
        growth.push(("finite_sections", s.growth));
    }
    if opts.wants(&[10]) {
        out.push(c10(opts)?);
    }
    if monotone {
        out.push(c4(&growth));
    }
    out.sort_by_key(|c| c.id);
    Ok(out)
}

pub fn run_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut wall = BTreeMap::new();

    let determinism = opts.criteria.contains(&11);
    let mut pass_opts = opts.clone();
    pass_opts.criteria.remove(&11);
    if pass_opts.criteria.is_empty() {
        pass_opts.criteria = (1..=10).collect();
    }

    let mut criteria = run_pass(&pass_opts)?;
    wall.insert("pass_1", start.elapsed().as_secs_f64());

    if determinism {
        let second_start = Instant::now();
        let again = run_pass(&pass_opts)?;
        wall.insert("pass_2", second_start.elapsed().as_secs_f64());
        let mismatched = mismatched_leaves(&numeric_fields(&criteria), &numeric_fields(&again));
        let mut measured = BTreeMap::new();
        measured.insert("compared_criteria", criteria.len() as f64);
        let failures = if mismatched > 0 {
            vec![format!(
                "{mismatched} numeric fields differ between two runs"
            )]
        } else {
            Vec::new()
        };
        let report = CriterionReport::new(
            11,
            vec![Check::at_most("mismatched_fields", mismatched as f64, 0.0)],
            measured,
            failures,
        );
        if !opts.criteria.iter().any(|&c| c != 11) {
            criteria.clear();
        }
        criteria.push(report);
    }
    wall.insert("total", start.elapsed().as_secs_f64());

    let failed: Vec<String> = criteria
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}:{}", c.id, c.name))
        .collect();
    Ok(SuiteReport {
        seed: opts.seed,
        tol_step: opts.config.tol_step,
        max_iter: opts.config.max_iter,
        passed: failed.is_empty(),
        failed,
        criteria,
        wall_clock_s: wall,
    })
}
