//! Per-instance verification and family sweeps.
//!
//! The harness separates two kinds of statements. Hard properties are
//! consequences of a correct implementation: a Hamiltonian digraph's guess
//! embeds feasibly, certified optima never exceed the true tour optimum,
//! and every solver outcome re-verifies. Measured claims are the encoding's
//! contested assertions: feasibility implying Hamiltonicity, solver points
//! decomposing into solution grids, optimum equality, and the grid/cycle
//! counting ratio. Measured claims get verdicts with re-verified witnesses,
//! never presupposed answers; solver anomalies surface in a dedicated
//! report field rather than silently.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compat::{
    build_compat_matrix, check_solution_grid, zero_indices, CompatError,
};
use crate::decompose::{
    decompose_point_trusted, verify_combination, verify_witness, DecompositionOutcome,
};
use crate::graph::{Digraph, Permutation, WeightError, WeightMatrix};
use crate::guard::guards_overridden;
use crate::oracle::{
    count_grids_vs_cycles, enumerate_cycles, held_karp, OracleError, GRID_COUNT_GUARD,
};
use crate::polytope::{
    apply_cuts, build_hull_system, build_objective, evaluate_point, guess_point,
    LinearSystem, ObjectiveReading, PolytopeError, RationalPoint,
};
use crate::rational::{format_rational, ExtRational, Rational};
use crate::solver::{
    minimize, solve_feasibility, verify_certificate, SolveStatus, SolverError,
};

pub const REPORT_SCHEMA: &str = "hamlp-report/1";
pub const EXHAUSTIVE_SWEEP_GUARD: usize = 4;
/// Cycles listed per report; counts stay exact beyond the cap.
pub const REPORT_CYCLE_CAP: usize = 12;

/// Claim names used as verdict keys in reports.
pub mod claims {
    /// A Hamiltonian digraph's cut system is feasible and the embedded
    /// guess verifies (hard property).
    pub const FORWARD_SOUNDNESS: &str = "forward_soundness";
    /// A feasible cut system implies a Hamiltonian cycle (measured).
    pub const CONVERSE_FEASIBILITY: &str = "converse_feasibility";
    /// Every solver point decomposes into solution grids (measured).
    pub const DECOMPOSABILITY: &str = "decomposability";
    /// Certified minimum equals the exact tour optimum (measured).
    pub const OPTIMUM_EQUALITY: &str = "optimum_equality";
    /// Grid count equals n times the cycle count (measured).
    pub const GRID_COUNT_RATIO: &str = "grid_count_ratio";

    pub const ALL: [&str; 5] = [
        FORWARD_SOUNDNESS,
        CONVERSE_FEASIBILITY,
        DECOMPOSABILITY,
        OPTIMUM_EQUALITY,
        GRID_COUNT_RATIO,
    ];
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Weights(#[from] WeightError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Compat(#[from] CompatError),
    #[error("exhaustive sweep needs n <= {guard}; got n = {n}")]
    SweepGuard { n: usize, guard: usize },
    #[error("arc probability {0} is not a rational in [0, 1] with a denominator below 2^32")]
    InvalidProbability(String),
    #[error("random weights need an explicit range; exhaustive sweeps take none or unit")]
    InvalidWeightScheme,
    #[error("claim `{claim}` is not violated on this instance")]
    NoViolation { claim: String },
    #[error("unknown claim `{0}`")]
    UnknownClaim(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Consistent,
    Violated,
    NotApplicable,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::Violated => "violated",
            Verdict::NotApplicable => "not-applicable",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct OracleSummary {
    pub hamiltonian: bool,
    pub cycle_count: u64,
    pub cycles: Vec<Vec<usize>>,
    pub cycles_truncated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimum: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal_cycle: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ObjectiveReadings {
    pub restricted: Option<String>,
    pub literal: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CombinationTermDoc {
    pub weight: String,
    pub perm: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct WitnessDoc {
    pub residual: BTreeMap<String, String>,
    pub dead_end_position: usize,
    pub dead_end_prefix: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct DecompositionReport {
    /// `decomposed`, `undecomposable`, or `not-applicable`.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<CombinationTermDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDoc>,
    /// Whether every term passed the solution-grid test.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grids_consistent: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct InstanceReport {
    pub schema: String,
    pub fingerprint: String,
    pub n: usize,
    pub oracle: OracleSummary,
    pub lp_feasible: bool,
    /// Certified optimum under the restricted reading; `inf` when the cut
    /// system is infeasible; absent without weights.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lp_optimum: Option<String>,
    pub objective_reading: ObjectiveReadings,
    pub decomposition: DecompositionReport,
    pub verdicts: BTreeMap<String, Verdict>,
    pub witnesses: BTreeMap<String, serde_json::Value>,
    pub anomalies: Vec<String>,
}

impl InstanceReport {
    pub fn verdict(&self, claim: &str) -> Option<Verdict> {
        self.verdicts.get(claim).copied()
    }

    pub fn violated_claims(&self) -> Vec<String> {
        self.verdicts
            .iter()
            .filter(|(_, v)| **v == Verdict::Violated)
            .map(|(k, _)| k.clone())
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        text.push('\n');
        text
    }
}

fn point_json(pt: &RationalPoint) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for (var, value) in pt.support() {
        map.insert(var.name(), serde_json::Value::String(format_rational(value)));
    }
    serde_json::Value::Object(map)
}

fn ext_string(value: &ExtRational) -> String {
    value.to_string()
}

/// Full verification pipeline for one digraph with optional weights.
pub fn verify_instance(
    g: &Digraph,
    w: Option<&WeightMatrix>,
) -> Result<InstanceReport, HarnessError> {
    let n = g.n();
    let mut anomalies: Vec<String> = Vec::new();
    let mut verdicts: BTreeMap<String, Verdict> = BTreeMap::new();
    let mut witnesses: BTreeMap<String, serde_json::Value> = BTreeMap::new();

    if let Some(w) = w {
        w.check_consistent(g)?;
    }

    // Ground truth first.
    let enumerated = enumerate_cycles(g, REPORT_CYCLE_CAP)?;
    let tour_oracle = w.map(|w| held_karp(g, w)).transpose()?;
    let oracle = OracleSummary {
        hamiltonian: enumerated.hamiltonian,
        cycle_count: enumerated.cycle_count,
        cycles: enumerated.cycles.iter().map(|c| c.to_one_based()).collect(),
        cycles_truncated: enumerated.cycles_truncated,
        optimum: tour_oracle
            .as_ref()
            .and_then(|r| r.optimum.as_ref())
            .map(ext_string),
        optimal_cycle: tour_oracle
            .as_ref()
            .and_then(|r| r.optimal_cycle.as_ref())
            .map(|c| c.to_one_based()),
    };

    // Encoding and cut system.
    let compat = build_compat_matrix(g);
    let cuts = zero_indices(&compat);
    let hull = build_hull_system(n)?;
    let cut_system = apply_cuts(&hull, &cuts)?;

    let feasibility = solve_feasibility(&cut_system)?;
    if !verify_certificate(&cut_system, &feasibility) {
        anomalies.push(format!(
            "feasibility outcome `{}` failed certificate verification",
            feasibility.status
        ));
    }
    let lp_feasible = feasibility.status == SolveStatus::Feasible;

    // Hamiltonian implies feasible, and the embedded guess must verify.
    if oracle.hamiltonian {
        let cycle = enumerated.cycles.first().expect("hamiltonian instances list a cycle");
        let embedded = Permutation::new(cycle.vertices().to_vec())
            .expect("a Hamiltonian cycle is a bijection");
        let embed_report = evaluate_point(&cut_system, &guess_point(&embedded))?;
        if lp_feasible && embed_report.feasible {
            verdicts.insert(claims::FORWARD_SOUNDNESS.into(), Verdict::Consistent);
        } else {
            verdicts.insert(claims::FORWARD_SOUNDNESS.into(), Verdict::Violated);
            anomalies.push(
                "Hamiltonian instance without feasible embedding: implementation defect"
                    .to_string(),
            );
            witnesses.insert(
                claims::FORWARD_SOUNDNESS.into(),
                serde_json::json!({
                    "oracle_cycle": cycle.to_one_based(),
                    "solver_status": feasibility.status.to_string(),
                    "embedded_guess_feasible": embed_report.feasible,
                }),
            );
        }
    } else {
        verdicts.insert(claims::FORWARD_SOUNDNESS.into(), Verdict::NotApplicable);
    }

    // Feasible implies Hamiltonian: the measured converse.
    if lp_feasible {
        if oracle.hamiltonian {
            verdicts.insert(claims::CONVERSE_FEASIBILITY.into(), Verdict::Consistent);
        } else {
            verdicts.insert(claims::CONVERSE_FEASIBILITY.into(), Verdict::Violated);
            let point = feasibility.point.as_ref().expect("feasible outcomes carry points");
            let re_verified = evaluate_point(&cut_system, point)?.feasible;
            if !re_verified {
                anomalies.push("converse witness failed re-verification".to_string());
            }
            witnesses.insert(
                claims::CONVERSE_FEASIBILITY.into(),
                serde_json::json!({
                    "feasible_point": point_json(point),
                    "point_re_verified": re_verified,
                    "oracle_cycle_count": oracle.cycle_count,
                }),
            );
        }
    } else {
        verdicts.insert(claims::CONVERSE_FEASIBILITY.into(), Verdict::Consistent);
    }

    // Decomposability of the solver's point.
    let decomposition = match &feasibility.point {
        Some(point) if lp_feasible => match decompose_point_trusted(point) {
            Ok(DecompositionOutcome::Combination(combination)) => {
                if !verify_combination(point, &combination) {
                    anomalies.push("combination failed exact re-summation".to_string());
                }
                let grids_ok = combination
                    .terms
                    .iter()
                    .all(|(_, p)| check_solution_grid(p, &compat).unwrap_or(false));
                verdicts.insert(
                    claims::DECOMPOSABILITY.into(),
                    if grids_ok { Verdict::Consistent } else { Verdict::Violated },
                );
                if !grids_ok {
                    witnesses.insert(
                        claims::DECOMPOSABILITY.into(),
                        serde_json::json!({
                            "reason": "a combination term is not a solution grid",
                        }),
                    );
                }
                DecompositionReport {
                    status: "decomposed".into(),
                    terms: Some(
                        combination
                            .terms
                            .iter()
                            .map(|(weight, p)| CombinationTermDoc {
                                weight: format_rational(weight),
                                perm: p.to_one_based(),
                            })
                            .collect(),
                    ),
                    witness: None,
                    grids_consistent: Some(grids_ok),
                }
            }
            Ok(DecompositionOutcome::Witness(witness)) => {
                if !verify_witness(&witness) {
                    anomalies.push("decomposition witness failed re-verification".to_string());
                }
                verdicts.insert(claims::DECOMPOSABILITY.into(), Verdict::Violated);
                let residual: BTreeMap<String, String> = witness
                    .residual
                    .support()
                    .map(|(var, value)| (var.name(), format_rational(value)))
                    .collect();
                witnesses.insert(
                    claims::DECOMPOSABILITY.into(),
                    serde_json::json!({ "location": "decomposition.witness" }),
                );
                DecompositionReport {
                    status: "undecomposable".into(),
                    terms: None,
                    witness: Some(WitnessDoc {
                        residual,
                        dead_end_position: witness.dead_end_position + 1,
                        dead_end_prefix: witness
                            .dead_end_prefix
                            .iter()
                            .map(|v| v + 1)
                            .collect(),
                    }),
                    grids_consistent: None,
                }
            }
            Err(err) => {
                anomalies.push(format!("decomposition aborted: {err}"));
                verdicts.insert(claims::DECOMPOSABILITY.into(), Verdict::NotApplicable);
                DecompositionReport {
                    status: "not-applicable".into(),
                    terms: None,
                    witness: None,
                    grids_consistent: None,
                }
            }
        },
        _ => {
            verdicts.insert(claims::DECOMPOSABILITY.into(), Verdict::NotApplicable);
            DecompositionReport {
                status: "not-applicable".into(),
                terms: None,
                witness: None,
                grids_consistent: None,
            }
        }
    };

    // Optimum comparison under both readings.
    let mut lp_optimum: Option<String> = None;
    let mut objective_reading = ObjectiveReadings { restricted: None, literal: None };
    match w {
        None => {
            verdicts.insert(claims::OPTIMUM_EQUALITY.into(), Verdict::NotApplicable);
        }
        Some(w) => {
            let oracle_optimum = tour_oracle
                .as_ref()
                .and_then(|r| r.optimum.clone())
                .expect("tour oracle ran with weights");
            let restricted =
                solve_reading(&cut_system, w, ObjectiveReading::Restricted, &mut anomalies)?;
            match &restricted {
                ReadingOutcome::Optimal { value, point } => {
                    let text = format_rational(value);
                    lp_optimum = Some(text.clone());
                    objective_reading.restricted = Some(text);
                    let verdict = match &oracle_optimum {
                        ExtRational::Finite(best) => {
                            if value > best {
                                anomalies.push(
                                    "certified optimum above the oracle optimum: \
                                     embedding defect"
                                        .to_string(),
                                );
                            }
                            if value == best {
                                Verdict::Consistent
                            } else {
                                Verdict::Violated
                            }
                        }
                        ExtRational::Infinite => Verdict::Violated,
                    };
                    verdicts.insert(claims::OPTIMUM_EQUALITY.into(), verdict);
                    if verdict == Verdict::Violated {
                        witnesses.insert(
                            claims::OPTIMUM_EQUALITY.into(),
                            serde_json::json!({
                                "lp_optimum": format_rational(value),
                                "oracle_optimum": ext_string(&oracle_optimum),
                                "optimal_point": point_json(point),
                                "oracle_cycle": oracle.optimal_cycle.clone(),
                            }),
                        );
                    }
                }
                ReadingOutcome::Infeasible => {
                    lp_optimum = Some("inf".into());
                    objective_reading.restricted = Some("inf".into());
                    let verdict = if oracle_optimum.is_finite() {
                        // would contradict the embedding; already an anomaly
                        Verdict::Violated
                    } else {
                        Verdict::Consistent
                    };
                    verdicts.insert(claims::OPTIMUM_EQUALITY.into(), verdict);
                }
                ReadingOutcome::Anomalous => {
                    verdicts.insert(claims::OPTIMUM_EQUALITY.into(), Verdict::NotApplicable);
                }
                ReadingOutcome::NotBuildable => {
                    anomalies.push(
                        "restricted objective not buildable on consistent inputs".to_string(),
                    );
                    verdicts.insert(claims::OPTIMUM_EQUALITY.into(), Verdict::NotApplicable);
                }
            }
            let literal =
                solve_reading(&cut_system, w, ObjectiveReading::Literal, &mut anomalies)?;
            objective_reading.literal = match &literal {
                ReadingOutcome::Optimal { value, .. } => Some(format_rational(value)),
                ReadingOutcome::Infeasible => Some("inf".into()),
                ReadingOutcome::NotBuildable | ReadingOutcome::Anomalous => None,
            };
        }
    }

    // Counting ratio.
    if n <= GRID_COUNT_GUARD || guards_overridden() {
        let check = count_grids_vs_cycles(g)?;
        verdicts.insert(
            claims::GRID_COUNT_RATIO.into(),
            if check.consistent { Verdict::Consistent } else { Verdict::Violated },
        );
        if !check.consistent {
            witnesses.insert(
                claims::GRID_COUNT_RATIO.into(),
                serde_json::json!({
                    "grid_count": check.grid_count,
                    "cycle_count": check.cycle_count,
                }),
            );
        }
    } else {
        verdicts.insert(claims::GRID_COUNT_RATIO.into(), Verdict::NotApplicable);
    }

    Ok(InstanceReport {
        schema: REPORT_SCHEMA.into(),
        fingerprint: g.fingerprint(),
        n,
        oracle,
        lp_feasible,
        lp_optimum,
        objective_reading,
        decomposition,
        verdicts,
        witnesses,
        anomalies,
    })
}

enum ReadingOutcome {
    Optimal { value: Rational, point: RationalPoint },
    Infeasible,
    NotBuildable,
    Anomalous,
}

fn solve_reading(
    cut_system: &LinearSystem,
    w: &WeightMatrix,
    reading: ObjectiveReading,
    anomalies: &mut Vec<String>,
) -> Result<ReadingOutcome, HarnessError> {
    let sys = match build_objective(cut_system, w, reading) {
        Ok(sys) => sys,
        Err(PolytopeError::InfiniteCoefficient { .. }) => {
            return Ok(ReadingOutcome::NotBuildable)
        }
        Err(other) => return Err(other.into()),
    };
    let outcome = minimize(&sys)?;
    if !verify_certificate(&sys, &outcome) {
        anomalies.push(format!(
            "{reading} objective outcome `{}` failed certificate verification",
            outcome.status
        ));
        return Ok(ReadingOutcome::Anomalous);
    }
    match outcome.status {
        SolveStatus::Optimal => Ok(ReadingOutcome::Optimal {
            value: outcome.objective_value.expect("optimal outcomes carry values"),
            point: outcome.point.expect("optimal outcomes carry points"),
        }),
        SolveStatus::Infeasible => Ok(ReadingOutcome::Infeasible),
        SolveStatus::Unbounded | SolveStatus::Feasible => {
            anomalies.push(format!(
                "{reading} objective produced status `{}` on a polytope",
                outcome.status
            ));
            Ok(ReadingOutcome::Anomalous)
        }
    }
}

/// How sweep instances are weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightScheme {
    None,
    Unit,
    UniformRange { lo: i64, hi: i64 },
}

impl WeightScheme {
    fn describe(&self) -> String {
        match self {
            WeightScheme::None => "none".into(),
            WeightScheme::Unit => "unit".into(),
            WeightScheme::UniformRange { lo, hi } => format!("uniform[{lo},{hi}]"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub mode: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arc_probability: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub weights: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct InstanceDigest {
    pub index: usize,
    pub fingerprint: String,
    pub hamiltonian: bool,
    pub lp_feasible: bool,
    pub verdicts: BTreeMap<String, Verdict>,
    pub anomaly_count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ViolationRef {
    pub index: usize,
    pub fingerprint: String,
    pub claims: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct Diagnostics {
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SweepReport {
    pub schema: String,
    pub generator: GeneratorSpec,
    pub instance_count: usize,
    /// claim -> verdict -> count
    pub tallies: BTreeMap<String, BTreeMap<String, u64>>,
    pub violations: Vec<ViolationRef>,
    pub anomaly_count: usize,
    pub instances: Vec<InstanceDigest>,
    /// Timing only; excluded from reproducibility comparisons.
    pub diagnostics: Diagnostics,
}

impl SweepReport {
    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        text.push('\n');
        text
    }

    /// Copy with timing zeroed, for byte-identical comparisons.
    pub fn without_diagnostics(&self) -> SweepReport {
        let mut copy = self.clone();
        copy.diagnostics = Diagnostics::default();
        copy
    }
}

/// A sweep's report plus the full per-instance reports of every violation.
#[derive(Debug)]
pub struct SweepOutput {
    pub report: SweepReport,
    pub violation_reports: Vec<(usize, InstanceReport)>,
}

fn run_sweep(
    generator: GeneratorSpec,
    instances: Vec<(Digraph, Option<WeightMatrix>)>,
) -> Result<SweepOutput, HarnessError> {
    let started = Instant::now();
    let reports: Result<Vec<InstanceReport>, HarnessError> = instances
        .par_iter()
        .map(|(g, w)| verify_instance(g, w.as_ref()))
        .collect();
    let reports = reports?;

    let mut tallies: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    for claim in claims::ALL {
        tallies.insert(claim.into(), BTreeMap::new());
    }
    let mut digests = Vec::with_capacity(reports.len());
    let mut violations = Vec::new();
    let mut violation_reports = Vec::new();
    let mut anomaly_count = 0usize;
    for (index, report) in reports.into_iter().enumerate() {
        for (claim, verdict) in &report.verdicts {
            *tallies
                .entry(claim.clone())
                .or_default()
                .entry(verdict.as_str().to_string())
                .or_insert(0) += 1;
        }
        anomaly_count += report.anomalies.len();
        let violated = report.violated_claims();
        digests.push(InstanceDigest {
            index,
            fingerprint: report.fingerprint.clone(),
            hamiltonian: report.oracle.hamiltonian,
            lp_feasible: report.lp_feasible,
            verdicts: report.verdicts.clone(),
            anomaly_count: report.anomalies.len(),
        });
        if !violated.is_empty() {
            violations.push(ViolationRef {
                index,
                fingerprint: report.fingerprint.clone(),
                claims: violated,
            });
            violation_reports.push((index, report));
        }
    }
    digests.sort_by(|a, b| (&a.fingerprint, a.index).cmp(&(&b.fingerprint, b.index)));
    violations.sort_by(|a, b| (&a.fingerprint, a.index).cmp(&(&b.fingerprint, b.index)));
    violation_reports.sort_by_key(|(index, _)| *index);

    let instance_count = digests.len();
    Ok(SweepOutput {
        report: SweepReport {
            schema: REPORT_SCHEMA.into(),
            generator,
            instance_count,
            tallies,
            violations,
            anomaly_count,
            instances: digests,
            diagnostics: Diagnostics { elapsed_ms: started.elapsed().as_millis() },
        },
        violation_reports,
    })
}

/// Every labeled digraph on `n` vertices, in mask order of the off-diagonal
/// slots. `2^(n(n-1))` instances; guarded at n = 4.
pub fn sweep_exhaustive(n: usize, weights: WeightScheme) -> Result<SweepOutput, HarnessError> {
    if n > EXHAUSTIVE_SWEEP_GUARD && !guards_overridden() {
        return Err(HarnessError::SweepGuard { n, guard: EXHAUSTIVE_SWEEP_GUARD });
    }
    if matches!(weights, WeightScheme::UniformRange { .. }) {
        return Err(HarnessError::InvalidWeightScheme);
    }
    let slots: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .collect();
    let total = 1usize << slots.len();
    let mut instances = Vec::with_capacity(total);
    for mask in 0..total {
        let mut g = Digraph::empty(n).expect("sweep sizes start at 2");
        for (bit, &(i, j)) in slots.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                g.set_arc(i, j, true);
            }
        }
        let w = match weights {
            WeightScheme::None => None,
            WeightScheme::Unit => Some(WeightMatrix::unit_for(&g)),
            WeightScheme::UniformRange { .. } => unreachable!("rejected above"),
        };
        instances.push((g, w));
    }
    run_sweep(
        GeneratorSpec {
            mode: "exhaustive".into(),
            n,
            count: Some(total),
            arc_probability: None,
            seed: None,
            weights: weights.describe(),
        },
        instances,
    )
}

#[derive(Debug, Clone)]
pub struct RandomSweepSpec {
    pub n: usize,
    pub count: usize,
    pub arc_probability: Rational,
    pub seed: u64,
    pub weights: WeightScheme,
}

/// Deterministic pseudo-random instance stream: a fixed seed reproduces the
/// same digraphs, weights, and verdicts.
pub fn sweep_random(spec: &RandomSweepSpec) -> Result<SweepOutput, HarnessError> {
    let instances = random_instances(spec)?;
    run_sweep(
        GeneratorSpec {
            mode: "random".into(),
            n: spec.n,
            count: Some(spec.count),
            arc_probability: Some(format_rational(&spec.arc_probability)),
            seed: Some(spec.seed),
            weights: spec.weights.describe(),
        },
        instances,
    )
}

/// The instance stream behind [`sweep_random`], usable on its own.
pub fn random_instances(
    spec: &RandomSweepSpec,
) -> Result<Vec<(Digraph, Option<WeightMatrix>)>, HarnessError> {
    let p = &spec.arc_probability;
    let bad = || HarnessError::InvalidProbability(format_rational(p));
    if p.is_negative() || p > &Rational::from_integer(1.into()) {
        return Err(bad());
    }
    let numer: u64 = p.numer().try_into().map_err(|_| bad())?;
    let denom: u64 = p.denom().try_into().map_err(|_| bad())?;
    if denom > u64::from(u32::MAX) {
        return Err(bad());
    }
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    let mut instances = Vec::with_capacity(spec.count);
    for _ in 0..spec.count {
        let mut g = Digraph::empty(n).expect("spec sizes start at 2");
        for i in 0..n {
            for j in 0..n {
                // exact Bernoulli(p): one uniform draw below the denominator
                if i != j && rng.gen_range(0..denom) < numer {
                    g.set_arc(i, j, true);
                }
            }
        }
        let w = match spec.weights {
            WeightScheme::None => None,
            WeightScheme::Unit => Some(WeightMatrix::unit_for(&g)),
            WeightScheme::UniformRange { lo, hi } => {
                let mut w = WeightMatrix::unit_for(&g);
                for i in 0..n {
                    for j in 0..n {
                        if i != j && g.has_arc(i, j) {
                            let value = rng.gen_range(lo..=hi);
                            w.set(i, j, ExtRational::Finite(crate::rational::rat_int(value)));
                        }
                    }
                }
                Some(w)
            }
        };
        instances.push((g, w));
    }
    Ok(instances)
}

/// Greedy arc minimization under an arbitrary persistence predicate:
/// removes arcs in row-major order while `keep` stays true, repeating
/// passes until no single arc can be removed.
pub fn minimize_by(g: &Digraph, keep: impl Fn(&Digraph) -> bool) -> Digraph {
    let mut current = g.clone();
    loop {
        let mut changed = false;
        let arcs: Vec<(usize, usize)> = current.arcs().collect();
        for (i, j) in arcs {
            let candidate = current.without_arc(i, j);
            if keep(&candidate) {
                current = candidate;
                changed = true;
            }
        }
        if !changed {
            return current;
        }
    }
}

/// Shrinks a violating digraph to an arc-minimal one that still violates
/// `claim`, re-verifying after every removal.
pub fn minimize_witness(
    g: &Digraph,
    w: Option<&WeightMatrix>,
    claim: &str,
) -> Result<Digraph, HarnessError> {
    if !claims::ALL.contains(&claim) {
        return Err(HarnessError::UnknownClaim(claim.to_string()));
    }
    let violated = |g: &Digraph| -> Result<bool, HarnessError> {
        let w_for = w.map(|w| restrict_weights(w, g));
        let report = verify_instance(g, w_for.as_ref())?;
        Ok(report.verdict(claim) == Some(Verdict::Violated))
    };
    if !violated(g)? {
        return Err(HarnessError::NoViolation { claim: claim.to_string() });
    }
    Ok(minimize_by(g, |candidate| violated(candidate).unwrap_or(false)))
}

fn restrict_weights(w: &WeightMatrix, g: &Digraph) -> WeightMatrix {
    let n = g.n();
    let mut out = WeightMatrix::unit_for(g);
    for i in 0..n {
        for j in 0..n {
            if i != j && g.has_arc(i, j) {
                out.set(i, j, w.get(i, j).clone());
            }
        }
    }
    out
}
