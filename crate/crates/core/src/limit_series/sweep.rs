//! Seeded sweeps over sampled pairs. Case `k` of a sweep draws from its own
//! generator derived from `(seed, k)`, so results do not depend on thread
//! scheduling and any single case can be replayed.

use rayon::prelude::*;
use serde::Serialize;

use super::sample::{SampledCase, Sampler};
use super::{
    crude_excess, fiber_bound_eh, gluing_profile, refined_case_split, rho_additivity, verify_crude_identity, CrudeIdentity,
    EhPair, GluingProfile, LimitSeriesError, ReducibleCurveData, RhoAdditivity,
};

/// Seed of case `k` in a sweep seeded with `seed`.
pub fn case_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (k as u64).wrapping_mul(0xD1B5_4A32_D192_ED03)
}

fn run_cases<T: Send>(
    seed: u64,
    cases: usize,
    f: impl Fn(&mut Sampler) -> Result<T, LimitSeriesError> + Sync,
) -> Result<Vec<T>, LimitSeriesError> {
    (0..cases)
        .into_par_iter()
        .map(|k| f(&mut Sampler::new(case_seed(seed, k))))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityFailure {
    pub case: usize,
    pub pair: EhPair,
    pub deg_dy: i64,
    pub deg_dz: i64,
    pub identity: CrudeIdentity,
    pub bound: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentitySweep {
    pub seed: u64,
    pub cases: usize,
    pub refined: usize,
    pub max_excess: i64,
    pub failures: Vec<IdentityFailure>,
}

pub fn identity_sweep(seed: u64, cases: usize) -> Result<IdentitySweep, LimitSeriesError> {
    let results = run_cases(seed, cases, |s| {
        let SampledCase { pair, deg_dy, deg_dz } = s.compatible_pair();
        let identity = verify_crude_identity(&pair, deg_dy, deg_dz)?;
        let bound = fiber_bound_eh(&pair, deg_dy, deg_dz)?;
        Ok((pair, deg_dy, deg_dz, identity, bound))
    })?;
    let mut sweep = IdentitySweep {
        seed,
        cases,
        refined: 0,
        max_excess: 0,
        failures: Vec::new(),
    };
    for (case, (pair, deg_dy, deg_dz, identity, bound)) in results.into_iter().enumerate() {
        let excess = crude_excess(&pair);
        sweep.refined += usize::from(excess == 0);
        sweep.max_excess = sweep.max_excess.max(excess);
        if !identity.holds || bound != excess {
            sweep.failures.push(IdentityFailure {
                case,
                pair,
                deg_dy,
                deg_dz,
                identity,
                bound,
            });
        }
    }
    Ok(sweep)
}

#[derive(Debug, Clone, Serialize)]
pub struct AdditivityFailure {
    pub case: usize,
    pub data: ReducibleCurveData,
    pub result: RhoAdditivity,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdditivitySweep {
    pub seed: u64,
    pub cases: usize,
    pub failures: Vec<AdditivityFailure>,
}

pub fn additivity_sweep(seed: u64, cases: usize) -> Result<AdditivitySweep, LimitSeriesError> {
    let results = run_cases(seed, cases, |s| {
        let data = s.reducible_curve();
        let result = rho_additivity(&data)?;
        Ok((data, result))
    })?;
    let failures = results
        .into_iter()
        .enumerate()
        .filter(|(_, (_, res))| !res.holds)
        .map(|(case, (data, result))| AdditivityFailure { case, data, result })
        .collect();
    Ok(AdditivitySweep { seed, cases, failures })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GluingKind {
    /// Refined pairs, checked against the `r+1` / `r+2` case split.
    Refined,
    /// Excess-one pairs, checked for a unique smoothing.
    ExcessOne,
}

#[derive(Debug, Clone, Serialize)]
pub struct GluingFailure {
    pub case: usize,
    pub pair: EhPair,
    pub profile: GluingProfile,
    pub expected_sums: Option<Vec<i64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GluingSweep {
    pub seed: u64,
    pub cases: usize,
    pub kind: GluingKind,
    pub failures: Vec<GluingFailure>,
}

pub fn gluing_sweep(seed: u64, cases: usize, kind: GluingKind) -> Result<GluingSweep, LimitSeriesError> {
    let results = run_cases(seed, cases, |s| {
        let pair = match kind {
            GluingKind::Refined => s.refined_pair().pair,
            GluingKind::ExcessOne => s.excess_one_pair().pair,
        };
        let profile = gluing_profile(&pair)?;
        Ok((pair, profile))
    })?;
    let mut failures = Vec::new();
    for (case, (pair, profile)) in results.into_iter().enumerate() {
        match kind {
            GluingKind::Refined => {
                let expected = refined_case_split(&pair);
                if profile.sums != expected {
                    failures.push(GluingFailure {
                        case,
                        pair,
                        profile,
                        expected_sums: Some(expected),
                    });
                }
            }
            GluingKind::ExcessOne => {
                if !profile.unique_smoothing {
                    failures.push(GluingFailure {
                        case,
                        pair,
                        profile,
                        expected_sums: None,
                    });
                }
            }
        }
    }
    Ok(GluingSweep {
        seed,
        cases,
        kind,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweeps_pass() {
        assert!(identity_sweep(1, 100).unwrap().failures.is_empty());
        assert!(additivity_sweep(1, 100).unwrap().failures.is_empty());
        assert!(gluing_sweep(1, 100, GluingKind::Refined).unwrap().failures.is_empty());
        assert!(gluing_sweep(1, 100, GluingKind::ExcessOne).unwrap().failures.is_empty());
    }

    #[test]
    fn sweeps_are_reproducible() {
        let a = serde_json::to_string(&identity_sweep(5, 50).unwrap()).unwrap();
        let b = serde_json::to_string(&identity_sweep(5, 50).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
