//! Brute-force ground truth over small prime fields.
//!
//! Linked points are enumerated depth first. Given `V_i`, the next entry
//! `V_{i+1}` must contain `f_i(V_i)` and lie inside `g_i^{-1}(V_i)`, so it
//! ranges over the subspaces between those two. For fibers the interior
//! entries are further confined to the linking spaces of the pair.

mod fit;
mod verify;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::chain::{ChainError, LinkedChain};
use crate::invariants::{admissibility, point_invariants_unchecked, InvariantsError, PairInvariants};
use crate::linalg::{enumerate_between, enumerate_subspaces, gaussian_binomial, image, preimage, LinalgError, Subspace};
use crate::strata::{StrataError, StratumSpec};

pub use fit::{fit_count_polynomial, fit_count_polynomial_expecting, CountPolynomial, FitError};
pub use verify::{
    nested_family, verify_configuration, verify_configuration_with, ModelReport, ModelSpec, PairEntry,
    PredictedStratum, Predictor, Representative, StratumRow, Truncation, Verdict, VerifyConfig, VerifyReport,
    VerifySummary,
};

/// Largest Grassmannian (in points) the oracle enumerates by default.
pub const DEFAULT_BUDGET: u128 = 1_000_000;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "LGLAB_BUDGET";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Invariants(#[from] InvariantsError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("Grassmannian G({r}, {d}) over F_{p} has {count} points, over the budget of {budget}")]
    OverBudget { d: usize, r: usize, p: u32, count: u128, budget: u128 },
    #[error("subspace rank r = {r} must satisfy 0 < r < d = {d}")]
    RankOutOfRange { r: usize, d: usize },
    #[error(transparent)]
    Strata(#[from] StrataError),
    #[error("invalid budget {0:?}")]
    BadBudget(String),
}

/// Parses a budget written as an integer or in `1e6` notation.
pub fn parse_budget(s: &str) -> Result<u128, OracleError> {
    let bad = || OracleError::BadBudget(s.to_string());
    let t = s.trim();
    let value = match t.split_once(['e', 'E']) {
        Some((mant, exp)) => {
            let m: u128 = mant.parse().map_err(|_| bad())?;
            let e: u32 = exp.parse().map_err(|_| bad())?;
            10u128.checked_pow(e).and_then(|x| x.checked_mul(m)).ok_or_else(bad)?
        }
        None => t.parse().map_err(|_| bad())?,
    };
    if value == 0 {
        return Err(bad());
    }
    Ok(value)
}

/// The budget from [`BUDGET_ENV`] if set, else [`DEFAULT_BUDGET`].
pub fn budget_from_env() -> Result<u128, OracleError> {
    match std::env::var(BUDGET_ENV) {
        Ok(s) => parse_budget(&s),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn check_budget(chain: &LinkedChain, r: usize, budget: u128) -> Result<(), OracleError> {
    let (d, p) = (chain.d(), chain.field().p());
    let count = gaussian_binomial(d, r, p.into())?;
    if count > budget {
        return Err(OracleError::OverBudget { d, r, p, count, budget });
    }
    Ok(())
}

fn check_rank(chain: &LinkedChain, r: usize) -> Result<(), OracleError> {
    if r == 0 || r >= chain.d() {
        return Err(OracleError::RankOutOfRange { r, d: chain.d() });
    }
    Ok(())
}

/// Depth-first extension of `prefix` to full linked tuples. `bounds[k]`
/// optionally confines entry `k` (0-based); `last` pins the final entry.
fn extend(
    chain: &LinkedChain,
    r: usize,
    prefix: &mut Vec<Subspace>,
    bounds: &[Option<Subspace>],
    last: Option<&Subspace>,
    visit: &mut dyn FnMut(&[Subspace]),
) -> Result<(), OracleError> {
    let k = prefix.len();
    let n = chain.n();
    if k == n {
        visit(prefix);
        return Ok(());
    }
    let prev = &prefix[k - 1];
    let lower = image(chain.f(k), prev)?;
    let mut upper = preimage(chain.g(k), prev)?;
    if let Some(b) = &bounds[k] {
        upper = upper.intersect(b)?;
    }
    if k == n - 1 {
        if let Some(vn) = last {
            if vn.contains(&lower) && upper.contains(vn) {
                prefix.push(vn.clone());
                visit(prefix);
                prefix.pop();
            }
            return Ok(());
        }
    }
    if !upper.contains(&lower) {
        return Ok(());
    }
    for next in enumerate_between(&lower, &upper, r)? {
        prefix.push(next);
        extend(chain, r, prefix, bounds, last, visit)?;
        prefix.pop();
    }
    Ok(())
}

/// Every linked tuple `(V_1, …, V_n)` of rank `r`, in enumeration order.
pub fn enum_lg_points(chain: &LinkedChain, r: usize, budget: u128) -> Result<Vec<Vec<Subspace>>, OracleError> {
    chain.require_analysis_ready()?;
    check_rank(chain, r)?;
    check_budget(chain, r, budget)?;
    let bounds = vec![None; chain.n()];
    let mut out = Vec::new();
    for v1 in enumerate_subspaces(chain.field(), chain.d(), r)? {
        let mut prefix = vec![v1];
        extend(chain, r, &mut prefix, &bounds, None, &mut |t| out.push(t.to_vec()))?;
    }
    Ok(out)
}

/// `|LG(F_p)|` without materialising the tuples; parallel over `V_1`.
pub fn count_lg_points(chain: &LinkedChain, r: usize, budget: u128) -> Result<u64, OracleError> {
    chain.require_analysis_ready()?;
    check_rank(chain, r)?;
    check_budget(chain, r, budget)?;
    let firsts: Vec<Subspace> = enumerate_subspaces(chain.field(), chain.d(), r)?.collect();
    let bounds = vec![None; chain.n()];
    firsts
        .into_par_iter()
        .map(|v1| {
            let mut count = 0u64;
            extend(chain, r, &mut vec![v1], &bounds, None, &mut |_| count += 1)?;
            Ok(count)
        })
        .sum()
}

/// Result of enumerating the fiber over `(V_1, V_n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FiberEnumeration {
    /// The pair violates an admissibility containment, so the fiber is
    /// empty for that reason.
    Inadmissible(String),
    /// The pair is admissible; the list may still be empty.
    Points(Vec<Vec<Subspace>>),
}

impl FiberEnumeration {
    pub fn points(&self) -> &[Vec<Subspace>] {
        match self {
            Self::Inadmissible(_) => &[],
            Self::Points(p) => p,
        }
    }

    pub fn diagnostic(&self) -> &str {
        match self {
            Self::Inadmissible(why) => why,
            Self::Points(p) if p.is_empty() => "admissible but empty",
            Self::Points(_) => "admissible",
        }
    }
}

/// Linked tuples with the given endpoints.
pub fn enum_fiber(
    chain: &LinkedChain,
    r: usize,
    v1: &Subspace,
    vn: &Subspace,
    budget: u128,
) -> Result<FiberEnumeration, OracleError> {
    chain.require_analysis_ready()?;
    check_rank(chain, r)?;
    check_budget(chain, r, budget)?;
    match PairInvariants::compute(chain, r, v1, vn) {
        Ok(inv) => Ok(FiberEnumeration::Points(fiber_of(chain, &inv)?)),
        Err(InvariantsError::Inadmissible(why)) => Ok(FiberEnumeration::Inadmissible(why.to_string())),
        Err(e) => Err(e.into()),
    }
}

pub(crate) fn fiber_of(chain: &LinkedChain, inv: &PairInvariants) -> Result<Vec<Vec<Subspace>>, OracleError> {
    let n = chain.n();
    let mut bounds = vec![None; n];
    for (i, slot) in bounds.iter_mut().enumerate().take(n - 1).skip(1) {
        *slot = Some(inv.interior(i + 1).linking_space.clone());
    }
    let mut out = Vec::new();
    let mut prefix = vec![inv.v1().clone()];
    extend(chain, inv.r(), &mut prefix, &bounds, Some(inv.vn()), &mut |t| out.push(t.to_vec()))?;
    Ok(out)
}

/// Stratum counts of fibers, keyed by prime.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FiberCensus {
    pub totals: BTreeMap<u32, u64>,
    pub strata: BTreeMap<String, BTreeMap<u32, u64>>,
    /// Points failing the injectivity or common-image checks.
    pub lemma_failures: u64,
}

impl FiberCensus {
    /// Adds `other`, summing counts prime by prime.
    pub fn merge(&mut self, other: &FiberCensus) {
        for (&q, &c) in &other.totals {
            *self.totals.entry(q).or_default() += c;
        }
        for (key, per) in &other.strata {
            let slot = self.strata.entry(key.clone()).or_default();
            for (&q, &c) in per {
                *slot.entry(q).or_default() += c;
            }
        }
        self.lemma_failures += other.lemma_failures;
    }

    /// Sum over strata equals the total, at every prime.
    pub fn reconciles(&self) -> bool {
        self.totals.iter().all(|(q, &t)| {
            let sum: u64 = self.strata.values().filter_map(|per| per.get(q)).sum();
            sum == t
        })
    }
}

/// Stratum key of every point of one fiber.
pub(crate) fn classify(inv: &PairInvariants, tuples: &[Vec<Subspace>]) -> Result<(BTreeMap<StratumSpec, u64>, u64), OracleError> {
    let mut counts = BTreeMap::new();
    let mut lemma_failures = 0;
    for t in tuples {
        let pt = point_invariants_unchecked(inv, t)?;
        if !(pt.lemma1 && pt.lemma4) {
            lemma_failures += 1;
        }
        *counts.entry(StratumSpec::new(pt.key())).or_default() += 1;
    }
    Ok((counts, lemma_failures))
}

/// Classifies the points of one fiber over `F_p` by stratum.
pub fn stratify(inv: &PairInvariants, tuples: &[Vec<Subspace>]) -> Result<FiberCensus, OracleError> {
    let p = inv.v1().field().p();
    let (counts, lemma_failures) = classify(inv, tuples)?;
    let mut census = FiberCensus {
        lemma_failures,
        ..Default::default()
    };
    if !tuples.is_empty() {
        census.totals.insert(p, tuples.len() as u64);
    }
    for (key, c) in counts {
        census.strata.insert(key.to_string(), BTreeMap::from([(p, c)]));
    }
    Ok(census)
}

/// Every admissible pair of rank `r` (checked against the chain only).
pub(crate) fn admissible_pairs(chain: &LinkedChain, r: usize) -> Result<Vec<(Subspace, Subspace)>, OracleError> {
    let all: Vec<Subspace> = enumerate_subspaces(chain.field(), chain.d(), r)?.collect();
    let to_last = chain.to_last(1);
    let to_first = chain.to_first(chain.n());
    let mut out = Vec::new();
    for v1 in &all {
        let fwd = image(to_last, v1)?;
        for vn in all.iter().filter(|vn| vn.contains(&fwd)) {
            if v1.contains(&image(to_first, vn)?) {
                debug_assert!(admissibility(chain, v1, vn).is_ok());
                out.push((v1.clone(), vn.clone()));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{make_nested_chain, ChainSpec};
    use crate::field::PrimeField;

    fn model(p: u32) -> LinkedChain {
        make_nested_chain(&ChainSpec::from_sizes(p, 2, &[1, 1])).unwrap()
    }

    fn line(p: u32, v: [u32; 2]) -> Subspace {
        Subspace::from_rows(PrimeField::new(p).unwrap(), 2, vec![v.to_vec()]).unwrap()
    }

    #[test]
    fn lg_counts_of_small_model() {
        for (p, want) in [(2, 7), (3, 10), (5, 16), (7, 22)] {
            let c = model(p);
            assert_eq!(enum_lg_points(&c, 1, DEFAULT_BUDGET).unwrap().len() as u64, want);
            assert_eq!(count_lg_points(&c, 1, DEFAULT_BUDGET).unwrap(), want);
        }
    }

    #[test]
    fn enumerated_points_are_linked_and_distinct() {
        let c = model(3);
        let pts = enum_lg_points(&c, 1, DEFAULT_BUDGET).unwrap();
        for t in &pts {
            crate::invariants::check_linked(&c, 1, t).unwrap();
        }
        let set: std::collections::BTreeSet<_> = pts.iter().collect();
        assert_eq!(set.len(), pts.len());
    }

    #[test]
    fn fiber_examples() {
        let c = model(2);
        let f = enum_fiber(&c, 1, &line(2, [0, 1]), &line(2, [1, 0]), DEFAULT_BUDGET).unwrap();
        assert_eq!(f.points().len(), 3);
        let f = enum_fiber(&c, 1, &line(2, [1, 0]), &line(2, [1, 0]), DEFAULT_BUDGET).unwrap();
        assert_eq!(f.points().len(), 1);
        let f = enum_fiber(&c, 1, &line(2, [1, 0]), &line(2, [0, 1]), DEFAULT_BUDGET).unwrap();
        assert!(matches!(f, FiberEnumeration::Inadmissible(_)));
        assert!(f.diagnostic().contains("not contained"));
    }

    #[test]
    fn fibers_are_restrictions_of_the_full_enumeration() {
        let c = make_nested_chain(&ChainSpec::from_sizes(3, 3, &[1, 2, 2]).with_seed(9)).unwrap();
        let all = enum_lg_points(&c, 1, DEFAULT_BUDGET).unwrap();
        let mut total = 0;
        for (v1, vn) in admissible_pairs(&c, 1).unwrap() {
            let fib = enum_fiber(&c, 1, &v1, &vn, DEFAULT_BUDGET).unwrap();
            let want: Vec<_> = all.iter().filter(|t| t[0] == v1 && t[3] == vn).cloned().collect();
            let mut got = fib.points().to_vec();
            got.sort();
            let mut want = want;
            want.sort();
            assert_eq!(got, want);
            total += got.len();
        }
        assert_eq!(total, all.len());
    }

    #[test]
    fn census_of_transverse_fiber() {
        for (p, mixed) in [(2, 1), (5, 4)] {
            let c = model(p);
            let inv = PairInvariants::compute(&c, 1, &line(p, [0, 1]), &line(p, [1, 0])).unwrap();
            let tuples = fiber_of(&c, &inv).unwrap();
            let census = stratify(&inv, &tuples).unwrap();
            assert!(census.reconciles());
            assert_eq!(census.lemma_failures, 0);
            assert_eq!(census.strata["1,0,0"][&p], 1);
            assert_eq!(census.strata["0,1,0"][&p], 1);
            assert_eq!(census.strata["1,1,0"][&p], mixed);
        }
    }

    #[test]
    fn empty_fiber_gives_empty_census() {
        let c = model(2);
        let inv = PairInvariants::compute(&c, 1, &line(2, [1, 0]), &line(2, [1, 0])).unwrap();
        let census = stratify(&inv, &[]).unwrap();
        assert!(census.totals.is_empty() && census.strata.is_empty());
    }

    #[test]
    fn budget_guard() {
        let c = model(7);
        assert!(matches!(enum_lg_points(&c, 1, 5), Err(OracleError::OverBudget { count: 8, .. })));
        assert_eq!(parse_budget("1e6").unwrap(), 1_000_000);
        assert_eq!(parse_budget("2500").unwrap(), 2500);
        assert!(parse_budget("0").is_err());
        assert!(parse_budget("lots").is_err());
    }
}
