//! Reading files and parsing flag values, with errors naming their source.

use std::path::Path;

use lglab_core::chain::{ChainInput, LinkedChain};
use lglab_core::field::{is_prime, MAX_PRIME};
use lglab_core::limit_series::VanishingSeq;
use lglab_core::linalg::Subspace;
use lglab_core::oracle::{budget_from_env, parse_budget, BUDGET_ENV};
use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::InputError;

pub fn read_json(path: &Path, field: &str) -> Result<Value, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError::new(field, format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| InputError::new(field, format!("malformed JSON in {}: {e}", path.display())))
}

pub fn from_value<T: DeserializeOwned>(v: Value, field: &str, what: &str) -> Result<T, InputError> {
    serde_json::from_value(v).map_err(|e| InputError::new(field, format!("not a valid {what}: {e}")))
}

/// A chain file, or a `chain make` report (whose `results.chain` is used).
pub fn load_chain_input(path: &Path, field: &str) -> Result<ChainInput, InputError> {
    let mut v = read_json(path, field)?;
    if let Some(inner) = v.pointer("/results/chain") {
        v = inner.clone();
    }
    from_value(v, field, "chain (expected a nested model or explicit maps)")
}

pub fn load_chain(path: &Path, field: &str) -> Result<LinkedChain, InputError> {
    load_chain_input(path, field)?.build().map_err(|e| InputError::new(field, e))
}

pub fn load_subspace(path: &Path, field: &str) -> Result<Subspace, InputError> {
    from_value(read_json(path, field)?, field, "subspace {\"p\", \"ambient\", \"rows\"}")
}

pub fn int_list<T: std::str::FromStr>(s: &str, field: &str) -> Result<Vec<T>, InputError>
where
    T::Err: std::fmt::Display,
{
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|e| InputError::new(field, format!("{x:?}: {e}"))))
        .collect()
}

pub fn primes(s: &str, field: &str) -> Result<Vec<u32>, InputError> {
    let ps: Vec<u32> = int_list(s, field)?;
    for (k, &p) in ps.iter().enumerate() {
        if p >= MAX_PRIME || !is_prime(p) {
            return Err(InputError::new(field, format!("{p} is not a prime below {MAX_PRIME}")));
        }
        if ps[..k].contains(&p) {
            return Err(InputError::new(field, format!("{p} is listed twice")));
        }
    }
    Ok(ps)
}

pub fn budget(flag: Option<&str>) -> Result<u128, InputError> {
    match flag {
        Some(s) => parse_budget(s).map_err(|e| InputError::new("--budget", e)),
        None => budget_from_env().map_err(|e| InputError::new(BUDGET_ENV, e)),
    }
}

pub fn sequence(s: &str, d: i64, field: &str) -> Result<VanishingSeq, InputError> {
    VanishingSeq::new(int_list(s, field)?, d).map_err(|e| InputError::new(field, e))
}
