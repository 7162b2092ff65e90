//! Sweeps comparing the closed-form predictions with oracle counts.
//!
//! Pairs are not comparable across primes directly, so they are grouped by
//! their numeric profile ([`PairLocusSpec`]): the predictions depend only on
//! the profile, and per-pair counts within a group are fitted as functions of
//! `q` when they agree across the group.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    admissible_pairs, check_budget, classify, count_lg_points, fiber_of, fit_count_polynomial, CountPolynomial,
    OracleError, DEFAULT_BUDGET,
};
use crate::chain::{make_nested_chain, ChainSpec};
use crate::invariants::PairInvariants;
use crate::linalg::Subspace;
use crate::strata::{fiber_bound_of, pair_locus_report, stratum_report, PairLocusSpec, StrataError, StratumReport, StratumSpec};

/// Stratum evaluator under test; [`stratum_report`] in normal use.
pub type Predictor = dyn Fn(&PairLocusSpec, &StratumSpec) -> Result<StratumReport, StrataError> + Sync;

/// A nested model `S_i = {1..sizes[i-1]}` in dimension `d`, at rank `r`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModelSpec {
    pub d: usize,
    pub sizes: Vec<usize>,
    pub r: usize,
}

impl ModelSpec {
    pub fn n(&self) -> usize {
        self.sizes.len() + 1
    }

    pub fn id(&self) -> String {
        let sizes: Vec<String> = self.sizes.iter().map(ToString::to_string).collect();
        format!("d={} n={} r={} sizes={}", self.d, self.n(), self.r, sizes.join(","))
    }

    pub fn chain_spec(&self, p: u32, seed: Option<u64>) -> ChainSpec {
        let spec = ChainSpec::from_sizes(p, self.d, &self.sizes);
        match seed {
            Some(s) => spec.with_seed(s),
            None => spec,
        }
    }
}

/// Every nested model with `2 ≤ d ≤ d_max`, `3 ≤ n ≤ n_max` and
/// `1 ≤ r ≤ min(r_max, d-1)`.
pub fn nested_family(d_max: usize, n_max: usize, r_max: usize) -> Vec<ModelSpec> {
    fn sequences(len: usize, lo: usize, hi: usize) -> Vec<Vec<usize>> {
        if len == 0 {
            return vec![Vec::new()];
        }
        (lo..=hi)
            .flat_map(|k| {
                sequences(len - 1, k, hi).into_iter().map(move |mut rest| {
                    rest.insert(0, k);
                    rest
                })
            })
            .collect()
    }
    let mut out = Vec::new();
    for d in 2..=d_max {
        for n in 3..=n_max {
            for sizes in sequences(n - 1, 0, d) {
                for r in 1..=r_max.min(d - 1) {
                    out.push(ModelSpec {
                        d,
                        sizes: sizes.clone(),
                        r,
                    });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub models: Vec<ModelSpec>,
    pub primes: Vec<u32>,
    /// Extra primes tried, in order, while some predicted-nonempty stratum
    /// has no points.
    pub escalation: Vec<u32>,
    pub budget: u128,
    /// Conjugation seed; each (model, prime) derives its own from it.
    pub seed: Option<u64>,
}

impl VerifyConfig {
    pub fn new(models: Vec<ModelSpec>, primes: Vec<u32>) -> Self {
        let escalation = [11, 13].into_iter().filter(|p| !primes.contains(p)).collect();
        Self {
            models,
            primes,
            escalation,
            budget: DEFAULT_BUDGET,
            seed: None,
        }
    }

    fn derived_seed(&self, model: usize, p: u32) -> Option<u64> {
        self.seed
            .map(|s| s.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add((model as u64) << 20 | u64::from(p)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Predicted nonempty, witnessed, counts fit with degree = dimension.
    Confirmed,
    /// Predicted nonempty and witnessed; counts did not fit a polynomial
    /// with a spare sample, so only non-emptiness is confirmed.
    WitnessedNoFit,
    /// Predicted nonempty and witnessed, but pairs of the same profile had
    /// different counts at some prime, so no fit was attempted.
    NonUniform,
    /// Predicted nonempty, no point at any sampled prime.
    Unwitnessed,
    /// Predicted empty but points were found.
    EmptyViolated,
    /// Exact fit whose degree differs from the predicted dimension.
    DegreeMismatch,
}

impl Verdict {
    pub fn is_failure(self) -> bool {
        matches!(self, Verdict::EmptyViolated | Verdict::DegreeMismatch)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PredictedStratum {
    pub nonempty: bool,
    pub dim: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StratumRow {
    pub key: String,
    pub predicted: PredictedStratum,
    /// Points per pair at each prime (the maximum when not uniform).
    pub counts: BTreeMap<u32, u64>,
    pub uniform: bool,
    pub degree: Option<usize>,
    pub exact_fit: bool,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Representative {
    pub prime: u32,
    pub v1: Vec<Vec<u32>>,
    pub vn: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairEntry {
    pub model: String,
    pub pair: Representative,
    pub profile: PairLocusSpec,
    pub pairs_per_prime: BTreeMap<u32, u64>,
    pub bound: i64,
    pub locus_dimension: i64,
    pub locus_nonempty: bool,
    pub locus_degree: Option<usize>,
    pub locus_exact_fit: bool,
    pub fiber_counts: BTreeMap<u32, u64>,
    pub fiber_uniform: bool,
    pub fiber_degree: Option<usize>,
    pub fiber_exact_fit: bool,
    pub max_realized_dim: Option<i64>,
    pub bound_ok: bool,
    pub locus_ok: bool,
    pub strata: Vec<StratumRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelReport {
    pub model: String,
    pub expected_degree: usize,
    pub lg_counts: BTreeMap<u32, u64>,
    pub fiber_sums: BTreeMap<u32, u64>,
    pub lg_fit: Option<CountPolynomial>,
    pub lg_degree_ok: Option<bool>,
    pub sums_match: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub model: String,
    pub prime: u32,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerifySummary {
    pub models: usize,
    pub pair_groups: usize,
    pub pairs_examined: u64,
    pub points_examined: u64,
    pub strata_listed: usize,
    pub confirmed: usize,
    pub witnessed_no_fit: usize,
    pub nonuniform: usize,
    pub unwitnessed: usize,
    pub empty_confirmed: usize,
    pub empty_violations: usize,
    pub degree_mismatches: usize,
    pub bound_violations: usize,
    pub locus_failures: usize,
    pub lg_degree_failures: usize,
    pub lg_sum_mismatches: usize,
    pub lemma_failures: u64,
    pub structure_failures: u64,
    pub truncated: bool,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub models: Vec<ModelReport>,
    pub pairs: Vec<PairEntry>,
    pub truncations: Vec<Truncation>,
    pub warnings: Vec<String>,
    pub summary: VerifySummary,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.summary.failures == 0
    }
}

/// Per-pair stratum counts (nonzero entries only).
type Outcome = BTreeMap<StratumSpec, u64>;

#[derive(Debug, Clone)]
struct GroupAtPrime {
    pairs: u64,
    representative: (Subspace, Subspace),
    outcomes: BTreeMap<Outcome, u64>,
}

#[derive(Debug, Clone, Default)]
struct JobOutcome {
    lg_count: u64,
    fiber_sum: u64,
    pairs: u64,
    groups: BTreeMap<PairLocusSpec, GroupAtPrime>,
    lemma_failures: u64,
    structure_failures: u64,
}

fn run_job(model: &ModelSpec, p: u32, seed: Option<u64>, budget: u128) -> Result<JobOutcome, OracleError> {
    let chain = make_nested_chain(&model.chain_spec(p, seed))?;
    check_budget(&chain, model.r, budget)?;
    let pairs = admissible_pairs(&chain, model.r)?;
    let per_pair = pairs
        .par_iter()
        .map(|(v1, vn)| {
            let inv = PairInvariants::compute(&chain, model.r, v1, vn)?;
            let structure_ok = inv.check_structure() && inv.check_two_routes()?;
            let tuples = fiber_of(&chain, &inv)?;
            let (outcome, lemma_failures) = classify(&inv, &tuples)?;
            Ok((PairLocusSpec::from_invariants(&inv), outcome, lemma_failures, structure_ok))
        })
        .collect::<Result<Vec<_>, OracleError>>()?;
    let mut out = JobOutcome {
        lg_count: count_lg_points(&chain, model.r, budget)?,
        pairs: pairs.len() as u64,
        ..Default::default()
    };
    for ((profile, outcome, lemma_failures, structure_ok), (v1, vn)) in per_pair.into_iter().zip(pairs) {
        out.fiber_sum += outcome.values().sum::<u64>();
        out.lemma_failures += lemma_failures;
        out.structure_failures += u64::from(!structure_ok);
        let group = out.groups.entry(profile).or_insert_with(|| GroupAtPrime {
            pairs: 0,
            representative: (v1, vn),
            outcomes: BTreeMap::new(),
        });
        group.pairs += 1;
        *group.outcomes.entry(outcome).or_default() += 1;
    }
    Ok(out)
}

/// Everything gathered for one model across primes.
struct ModelData {
    jobs: BTreeMap<u32, JobOutcome>,
    truncations: Vec<Truncation>,
}

impl ModelData {
    fn profiles(&self) -> BTreeMap<&PairLocusSpec, BTreeMap<u32, &GroupAtPrime>> {
        let mut out: BTreeMap<&PairLocusSpec, BTreeMap<u32, &GroupAtPrime>> = BTreeMap::new();
        for (&p, job) in &self.jobs {
            for (profile, g) in &job.groups {
                out.entry(profile).or_default().insert(p, g);
            }
        }
        out
    }

    /// Predicted-nonempty strata with no point yet, as (profile, key).
    fn unwitnessed(&self, model: &ModelSpec, predictor: &Predictor) -> usize {
        let keys = StratumSpec::all(model.n(), model.r);
        let mut missing = 0;
        for (profile, per) in self.profiles() {
            let seen: BTreeSet<&StratumSpec> = per.values().flat_map(|g| g.outcomes.keys().flat_map(|o| o.keys())).collect();
            missing += keys
                .iter()
                .filter(|k| !seen.contains(k))
                .filter(|k| predictor(profile, k).map(|rep| rep.nonempty).unwrap_or(false))
                .count();
        }
        missing
    }
}

fn collect_model(cfg: &VerifyConfig, idx: usize, model: &ModelSpec, primes: &[u32]) -> Result<ModelData, OracleError> {
    let results: Vec<(u32, Result<JobOutcome, OracleError>)> = primes
        .par_iter()
        .map(|&p| (p, run_job(model, p, cfg.derived_seed(idx, p), cfg.budget)))
        .collect();
    let mut data = ModelData {
        jobs: BTreeMap::new(),
        truncations: Vec::new(),
    };
    for (p, res) in results {
        match res {
            Ok(job) => {
                data.jobs.insert(p, job);
            }
            Err(e @ OracleError::OverBudget { .. }) => data.truncations.push(Truncation {
                model: model.id(),
                prime: p,
                reason: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    Ok(data)
}

/// Runs the sweep with the theorem's stratum evaluator.
pub fn verify_configuration(cfg: &VerifyConfig) -> Result<VerifyReport, OracleError> {
    verify_configuration_with(cfg, &stratum_report)
}

/// Runs the sweep with an arbitrary stratum evaluator.
pub fn verify_configuration_with(cfg: &VerifyConfig, predictor: &Predictor) -> Result<VerifyReport, OracleError> {
    let datas: Vec<ModelData> = cfg
        .models
        .par_iter()
        .enumerate()
        .map(|(idx, model)| {
            let mut data = collect_model(cfg, idx, model, &cfg.primes)?;
            for &p in &cfg.escalation {
                if data.unwitnessed(model, predictor) == 0 {
                    break;
                }
                let extra = collect_model(cfg, idx, model, &[p])?;
                data.jobs.extend(extra.jobs);
                data.truncations.extend(extra.truncations);
            }
            Ok(data)
        })
        .collect::<Result<_, OracleError>>()?;

    let mut report = VerifyReport {
        config: cfg.clone(),
        models: Vec::new(),
        pairs: Vec::new(),
        truncations: Vec::new(),
        warnings: Vec::new(),
        summary: VerifySummary {
            models: cfg.models.len(),
            ..Default::default()
        },
    };
    for (model, data) in cfg.models.iter().zip(&datas) {
        summarize_model(model, data, predictor, &mut report)?;
        report.truncations.extend(data.truncations.iter().cloned());
    }
    let s = &mut report.summary;
    s.truncated = !report.truncations.is_empty();
    s.failures = s.empty_violations
        + s.degree_mismatches
        + s.bound_violations
        + s.locus_failures
        + s.lg_degree_failures
        + s.lg_sum_mismatches
        + s.lemma_failures as usize
        + s.structure_failures as usize;
    Ok(report)
}

fn fit(counts: &BTreeMap<u32, u64>) -> (Option<usize>, bool) {
    match fit_count_polynomial(counts) {
        Ok(poly) => (poly.degree, poly.exact_fit),
        Err(_) => (None, false),
    }
}

fn summarize_model(
    model: &ModelSpec,
    data: &ModelData,
    predictor: &Predictor,
    report: &mut VerifyReport,
) -> Result<(), OracleError> {
    let id = model.id();
    let d = model.d as i64;
    let expected_degree = model.r * (model.d - model.r);
    let lg_counts: BTreeMap<u32, u64> = data.jobs.iter().map(|(&p, j)| (p, j.lg_count)).collect();
    let fiber_sums: BTreeMap<u32, u64> = data.jobs.iter().map(|(&p, j)| (p, j.fiber_sum)).collect();
    let lg_fit = fit_count_polynomial(&lg_counts).ok();
    let lg_degree_ok = lg_fit
        .as_ref()
        .filter(|f| f.exact_fit)
        .map(|f| f.degree == Some(expected_degree));
    let sums_match = lg_counts == fiber_sums;
    let s = &mut report.summary;
    s.lg_degree_failures += usize::from(lg_degree_ok == Some(false));
    s.lg_sum_mismatches += usize::from(!sums_match);
    if lg_fit.as_ref().is_some_and(|f| !f.exact_fit) {
        report.warnings.push(format!("{id}: total LG counts {lg_counts:?} do not fit a polynomial"));
    }
    for job in data.jobs.values() {
        s.pairs_examined += job.pairs;
        s.points_examined += job.fiber_sum;
        s.lemma_failures += job.lemma_failures;
        s.structure_failures += job.structure_failures;
    }
    report.models.push(ModelReport {
        model: id.clone(),
        expected_degree,
        lg_counts,
        fiber_sums,
        lg_fit,
        lg_degree_ok,
        sums_match,
    });

    let keys = StratumSpec::all(model.n(), model.r);
    for (profile, per) in data.profiles() {
        let (&rep_p, rep_group) = per.iter().next().expect("profile seen at some prime");
        let pairs_per_prime: BTreeMap<u32, u64> = per.iter().map(|(&p, g)| (p, g.pairs)).collect();
        let bound = fiber_bound_of(profile, d)?;
        let locus = pair_locus_report(profile)?;
        let (locus_degree, locus_exact_fit) = fit(&pairs_per_prime);
        let locus_ok = locus.nonempty && (!locus_exact_fit || locus_degree == Some(locus.dimension.max(0) as usize));

        let fiber_uniform = per.values().all(|g| g.outcomes.len() == 1);
        let fiber_counts: BTreeMap<u32, u64> = per
            .iter()
            .map(|(&p, g)| (p, g.outcomes.keys().map(|o| o.values().sum::<u64>()).max().unwrap_or(0)))
            .collect();
        let (fiber_degree, fiber_exact_fit) = if fiber_uniform { fit(&fiber_counts) } else { (None, false) };

        let mut rows = Vec::new();
        let mut max_realized_dim: Option<i64> = None;
        let mut max_realized_degree: Option<usize> = None;
        let s = &mut report.summary;
        for key in &keys {
            let pred = predictor(profile, key)?;
            let counts: BTreeMap<u32, u64> = per
                .iter()
                .map(|(&p, g)| (p, g.outcomes.keys().map(|o| o.get(key).copied().unwrap_or(0)).max().unwrap_or(0)))
                .collect();
            let uniform = per.values().all(|g| {
                let vals: BTreeSet<u64> = g.outcomes.keys().map(|o| o.get(key).copied().unwrap_or(0)).collect();
                vals.len() == 1
            });
            let witnessed = counts.values().any(|&c| c > 0);
            if !pred.nonempty && !witnessed {
                s.empty_confirmed += 1;
                continue;
            }
            let (degree, exact_fit) = if uniform && witnessed { fit(&counts) } else { (None, false) };
            if witnessed {
                max_realized_dim = max_realized_dim.max(Some(pred.dimension));
                if exact_fit {
                    max_realized_degree = max_realized_degree.max(degree);
                }
            }
            let verdict = if !pred.nonempty {
                Verdict::EmptyViolated
            } else if !witnessed {
                Verdict::Unwitnessed
            } else if !uniform {
                Verdict::NonUniform
            } else if !exact_fit {
                Verdict::WitnessedNoFit
            } else if degree.map(|x| x as i64) == Some(pred.dimension) {
                Verdict::Confirmed
            } else {
                Verdict::DegreeMismatch
            };
            match verdict {
                Verdict::Confirmed => s.confirmed += 1,
                Verdict::WitnessedNoFit => s.witnessed_no_fit += 1,
                Verdict::NonUniform => s.nonuniform += 1,
                Verdict::Unwitnessed => {
                    s.unwitnessed += 1;
                    report
                        .warnings
                        .push(format!("{id}: stratum {key} predicted nonempty but unwitnessed (profile {profile:?})"));
                }
                Verdict::EmptyViolated => s.empty_violations += 1,
                Verdict::DegreeMismatch => s.degree_mismatches += 1,
            }
            rows.push(StratumRow {
                key: key.to_string(),
                predicted: PredictedStratum {
                    nonempty: pred.nonempty,
                    dim: pred.dimension,
                },
                counts,
                uniform,
                degree,
                exact_fit,
                verdict,
            });
        }
        s.strata_listed += rows.len();
        let bound_ok = max_realized_dim.is_none_or(|m| m <= bound)
            && max_realized_degree.is_none_or(|m| m as i64 <= bound)
            && (!fiber_exact_fit || fiber_degree.is_none_or(|m| m as i64 <= bound));
        s.bound_violations += usize::from(!bound_ok);
        s.locus_failures += usize::from(!locus_ok);
        s.pair_groups += 1;
        report.pairs.push(PairEntry {
            model: id.clone(),
            pair: Representative {
                prime: rep_p,
                v1: rep_group.representative.0.basis().to_rows(),
                vn: rep_group.representative.1.basis().to_rows(),
            },
            profile: profile.clone(),
            pairs_per_prime,
            bound,
            locus_dimension: locus.dimension,
            locus_nonempty: locus.nonempty,
            locus_degree,
            locus_exact_fit,
            fiber_counts,
            fiber_uniform,
            fiber_degree,
            fiber_exact_fit,
            max_realized_dim,
            bound_ok,
            locus_ok,
            strata: rows,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyConfig {
        let model = ModelSpec {
            d: 2,
            sizes: vec![1, 1],
            r: 1,
        };
        VerifyConfig::new(vec![model], vec![2, 3, 5, 7])
    }

    #[test]
    fn family_enumeration() {
        // Non-decreasing size pairs in 0..=2: six models.
        assert_eq!(nested_family(2, 3, 1).len(), 6);
        let fam = nested_family(3, 4, 2);
        assert!(fam.iter().all(|m| m.r < m.d && (3..=4).contains(&m.n())));
    }

    #[test]
    fn small_model_passes() {
        let rep = verify_configuration(&small()).unwrap();
        assert!(rep.passed(), "{:#?}", rep.summary);
        assert_eq!(rep.summary.unwitnessed, 0);
        assert_eq!(rep.models[0].lg_counts, BTreeMap::from([(2, 7), (3, 10), (5, 16), (7, 22)]));
        assert_eq!(rep.models[0].lg_degree_ok, Some(true));
        assert!(rep.summary.confirmed > 0);
    }

    #[test]
    fn flipped_condition_is_caught() {
        let flipped = |p: &PairLocusSpec, s: &StratumSpec| {
            let mut rep = stratum_report(p, s)?;
            for c in &mut rep.conditions {
                c.c4 = !c.c4;
            }
            rep.nonempty = rep.conditions.iter().all(|c| c.all());
            Ok(rep)
        };
        let rep = verify_configuration_with(&small(), &flipped).unwrap();
        assert!(!rep.passed());
        assert!(rep.summary.empty_violations > 0);
    }

    #[test]
    fn budget_truncates() {
        let mut cfg = small();
        cfg.budget = 5;
        let rep = verify_configuration(&cfg).unwrap();
        assert!(rep.summary.truncated);
        assert!(rep.truncations.iter().any(|t| t.prime == 7));
    }
}
