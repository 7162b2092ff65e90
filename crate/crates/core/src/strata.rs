//! Closed-form stratum, pair-locus and fiber-dimension formulas.
//!
//! Everything here is integer arithmetic on a [`PairLocusSpec`], the numeric
//! shadow of a pair `(V_1, V_n)`. A spec can be read off actual
//! [`PairInvariants`] or written down directly (the limit-series dictionary
//! does the latter), so the same evaluators serve both.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::invariants::{PairInvariants, StratumEntry};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrataError {
    #[error("{field} has length {found}, expected {expected}")]
    Length { field: &'static str, expected: usize, found: usize },
    #[error("chain length n = {0} is below 2")]
    TooShort(usize),
    #[error("chain length n = {0} leaves no interior index")]
    NoInterior(usize),
    #[error("invalid spec: {0}")]
    Invalid(String),
    #[error("cannot parse stratum spec: {0}")]
    Parse(String),
}

/// Prescribed `(d_{V_{1,i}}, d_{V_{n,i}}, d_{Z_i})` for `i = 2..n-1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StratumSpec {
    pub entries: Vec<StratumEntry>,
}

impl StratumSpec {
    pub fn new(entries: Vec<StratumEntry>) -> Self {
        Self { entries }
    }

    /// All keys with entries in `0..=r`, in lexicographic order.
    pub fn all(n: usize, r: usize) -> Vec<StratumSpec> {
        let m = n.saturating_sub(2);
        let per: Vec<StratumEntry> = (0..=r)
            .flat_map(|a| (0..=r).flat_map(move |b| (0..=r).map(move |c| (a, b, c))))
            .collect();
        let mut out = vec![Vec::new()];
        for _ in 0..m {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<StratumEntry>| {
                    per.iter().map(move |&e| {
                        let mut v = prefix.clone();
                        v.push(e);
                        v
                    })
                })
                .collect();
        }
        out.into_iter().map(StratumSpec::new).collect()
    }
}

impl fmt::Display for StratumSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|(a, b, c)| format!("{a},{b},{c}")).collect();
        f.write_str(&parts.join(";"))
    }
}

/// Parses `"a,b,c;a,b,c;..."`, one triple per interior index.
impl FromStr for StratumSpec {
    type Err = StrataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut entries = Vec::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let nums = part
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| StrataError::Parse(format!("{part:?}: {e}")))?;
            match nums[..] {
                [a, b, c] => entries.push((a, b, c)),
                _ => return Err(StrataError::Parse(format!("{part:?} is not a triple"))),
            }
        }
        Ok(Self { entries })
    }
}

/// Numeric data of a pair: the prescribed dimensions together with the
/// ambient dimensions they are measured against.
///
/// Index conventions: `vbar1`, `vbarn` hold `i = 1..n`; `zbar`, `ztilde`
/// hold `i = 2..n-1`; `img_to_first` holds `dim g_{i-1,1}(E_i)` for
/// `i = 2..n` and `img_to_last` holds `dim f_{i,n-1}(E_i)` for `i = 1..n-1`.
/// The missing boundary values are fixed by the conventions
/// `d_{g_{0,1}(E_1)} = d_{V_{n,1}} + d_{ker f_1}` and
/// `d_{f_{n,n-1}(E_n)} = d_{V_{1,n}} + d_{ker g_{n-1}}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PairLocusSpec {
    pub n: usize,
    pub r: i64,
    pub vbar1: Vec<i64>,
    pub vbarn: Vec<i64>,
    pub v1n: i64,
    pub vn1: i64,
    pub zbar: Vec<i64>,
    pub ztilde: Vec<i64>,
    pub img_to_first: Vec<i64>,
    pub img_to_last: Vec<i64>,
    pub ker_f1: i64,
    pub ker_g_last: i64,
}

impl PairLocusSpec {
    pub fn from_invariants(inv: &PairInvariants) -> Self {
        let n = inv.n();
        let dim = |x: usize| x as i64;
        Self {
            n,
            r: dim(inv.r()),
            vbar1: (1..=n).map(|i| dim(inv.vbar1(i).dim())).collect(),
            vbarn: (1..=n).map(|i| dim(inv.vbarn(i).dim())).collect(),
            v1n: dim(inv.v1n().dim()),
            vn1: dim(inv.vn1().dim()),
            zbar: (2..n).map(|i| dim(inv.zbar_dim(i))).collect(),
            ztilde: (2..n).map(|i| dim(inv.interior(i).ztilde_dim)).collect(),
            img_to_first: (2..=n).map(|i| dim(inv.img_to_first_dim(i))).collect(),
            img_to_last: (1..n).map(|i| dim(inv.img_to_last_dim(i))).collect(),
            ker_f1: dim(inv.ker_f1_dim()),
            ker_g_last: dim(inv.ker_g_last_dim()),
        }
    }

    /// Checks array lengths, the `d_{V̄_{1,1}} = d_{V̄_{n,n}} = r` convention
    /// and that no input or derived dimension is negative.
    pub fn validate(&self) -> Result<(), StrataError> {
        let n = self.n;
        if n < 2 {
            return Err(StrataError::TooShort(n));
        }
        let lens: [(&'static str, usize, usize); 6] = [
            ("vbar1", n, self.vbar1.len()),
            ("vbarn", n, self.vbarn.len()),
            ("zbar", n - 2, self.zbar.len()),
            ("ztilde", n - 2, self.ztilde.len()),
            ("img_to_first", n - 1, self.img_to_first.len()),
            ("img_to_last", n - 1, self.img_to_last.len()),
        ];
        for (field, expected, found) in lens {
            if expected != found {
                return Err(StrataError::Length { field, expected, found });
            }
        }
        if self.vbar1[0] != self.r || self.vbarn[n - 1] != self.r {
            return Err(StrataError::Invalid(format!(
                "d(V̄_1,1) = {} and d(V̄_n,n) = {} must both equal r = {}",
                self.vbar1[0],
                self.vbarn[n - 1],
                self.r
            )));
        }
        let scalars = [self.r, self.v1n, self.vn1, self.ker_f1, self.ker_g_last];
        let arrays = [&self.vbar1, &self.vbarn, &self.zbar, &self.ztilde, &self.img_to_first, &self.img_to_last];
        if scalars.iter().chain(arrays.into_iter().flatten()).any(|&x| x < 0) {
            return Err(StrataError::Invalid("negative dimension in input".into()));
        }
        for i in 1..=n {
            if self.zbar1(i) < 0 {
                return Err(StrataError::Invalid(format!("d(Z̄_1,{i}) = {} < 0", self.zbar1(i))));
            }
            if self.zbarn(i) < 0 {
                return Err(StrataError::Invalid(format!("d(Z̄_n,{i}) = {} < 0", self.zbarn(i))));
            }
        }
        for i in 2..n {
            if self.zbar_cap(i) < 0 {
                return Err(StrataError::Invalid(format!("d(Z̄_1,{i} ∩ Z̄_n,{i}) = {} < 0", self.zbar_cap(i))));
            }
        }
        Ok(())
    }

    /// `d_{V̄_{1,i}}` for `i = 1..n+1` (zero at `n+1`).
    pub fn vbar1_at(&self, i: usize) -> i64 {
        if i > self.n {
            0
        } else {
            self.vbar1[i - 1]
        }
    }

    /// `d_{V̄_{n,i}}` for `i = 0..n` (zero at `0`).
    pub fn vbarn_at(&self, i: usize) -> i64 {
        if i == 0 {
            0
        } else {
            self.vbarn[i - 1]
        }
    }

    pub fn zbar1(&self, i: usize) -> i64 {
        self.vbar1_at(i) - self.vbar1_at(i + 1)
    }

    pub fn zbarn(&self, i: usize) -> i64 {
        self.vbarn_at(i) - self.vbarn_at(i - 1)
    }

    pub fn zbar_at(&self, i: usize) -> i64 {
        self.zbar[i - 2]
    }

    pub fn ztilde_at(&self, i: usize) -> i64 {
        self.ztilde[i - 2]
    }

    /// `d_{Z̄_{1,i} ∩ Z̄_{n,i}}` for interior `i`.
    pub fn zbar_cap(&self, i: usize) -> i64 {
        self.zbar1(i) + self.zbarn(i) - self.zbar_at(i)
    }

    /// `d_{g_{i-1,1}(E_i)}`, with the convention at `i = 1`.
    pub fn first_ambient(&self, i: usize) -> i64 {
        if i == 1 {
            self.vn1 + self.ker_f1
        } else {
            self.img_to_first[i - 2]
        }
    }

    /// `d_{f_{i,n-1}(E_i)}`, with the convention at `i = n`.
    pub fn last_ambient(&self, i: usize) -> i64 {
        if i == self.n {
            self.v1n + self.ker_g_last
        } else {
            self.img_to_last[i - 1]
        }
    }

    /// `Σ_{i=1}^n [d_{Z̄_{1,i}}(d_{g_{i-1,1}(E_i)} - d_{V̄_{1,i}}) + d_{Z̄_{n,i}}(d_{f_{i,n-1}(E_i)} - d_{V̄_{n,i}})]`.
    pub fn graded_sum(&self) -> i64 {
        (1..=self.n)
            .map(|i| {
                self.zbar1(i) * (self.first_ambient(i) - self.vbar1_at(i))
                    + self.zbarn(i) * (self.last_ambient(i) - self.vbarn_at(i))
            })
            .sum()
    }

    /// `d_{V_{1,n}}(d_{V̄_{1,n}} - d_{V_{1,n}}) + d_{V_{n,1}}(d_{V̄_{n,1}} - d_{V_{n,1}})`.
    pub fn boundary_terms(&self) -> i64 {
        self.v1n * (self.vbar1_at(self.n) - self.v1n) + self.vn1 * (self.vbarn_at(1) - self.vn1)
    }

    /// `Σ_{i=2}^{n-1} d_{Z̄_{1,i} ∩ Z̄_{n,i}}(d_{Z̃_i} - d_{Z̄_i})`.
    pub fn overlap_terms(&self) -> i64 {
        (2..self.n)
            .map(|i| self.zbar_cap(i) * (self.ztilde_at(i) - self.zbar_at(i)))
            .sum()
    }
}

/// Verdicts of conditions 1 to 6 at one interior index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StratumConditions {
    pub i: usize,
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
    pub c4: bool,
    pub c5: bool,
    pub c6: bool,
}

impl StratumConditions {
    pub fn all(&self) -> bool {
        self.c1 && self.c2 && self.c3 && self.c4 && self.c5 && self.c6
    }

    /// Numbers (1 to 6) of the failing conditions.
    pub fn failing(&self) -> Vec<u8> {
        [self.c1, self.c2, self.c3, self.c4, self.c5, self.c6]
            .iter()
            .zip(1u8..)
            .filter(|(ok, _)| !**ok)
            .map(|(_, k)| k)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StratumReport {
    pub conditions: Vec<StratumConditions>,
    pub nonempty: bool,
    pub dimension: i64,
}

/// Non-emptiness and dimension of the stratum `spec` in the fiber over the
/// pair described by `profile`.
pub fn stratum_report(profile: &PairLocusSpec, spec: &StratumSpec) -> Result<StratumReport, StrataError> {
    profile.validate()?;
    let n = profile.n;
    if n < 3 {
        return Err(StrataError::NoInterior(n));
    }
    if spec.entries.len() != n - 2 {
        return Err(StrataError::Length {
            field: "stratum spec",
            expected: n - 2,
            found: spec.entries.len(),
        });
    }
    let r = profile.r;
    // d_{V_{1,i}} and d_{V_{n,i}} for i = 1..n, with the boundary values
    // d_{V_{1,n}} = dim V_{1,n} and d_{V_{n,1}} = dim V_{n,1}.
    let dv1 = |i: usize| -> i64 {
        if i == n {
            profile.v1n
        } else {
            spec.entries[i - 2].0 as i64
        }
    };
    let dvn = |i: usize| -> i64 {
        if i == 1 {
            profile.vn1
        } else {
            spec.entries[i - 2].1 as i64
        }
    };
    let dz = |i: usize| spec.entries[i - 2].2 as i64;

    let mut conditions = Vec::with_capacity(n - 2);
    let mut dimension = 0;
    for i in 2..n {
        let cap = profile.zbar_cap(i);
        let above1 = profile.vbar1_at(i + 1);
        let belown = profile.vbarn_at(i - 1);
        let (a, b, z) = (dv1(i), dvn(i), dz(i));
        conditions.push(StratumConditions {
            i,
            c1: z <= cap,
            c2: above1 >= a - z && a - z >= dv1(i + 1),
            c3: belown >= b - z && b - z >= dvn(i - 1),
            c4: a + b - z >= r,
            c5: r >= dv1(i + 1) + b,
            c6: r >= a + dvn(i - 1),
        });
        dimension += z * (cap - z)
            + (a - dv1(i + 1)) * (above1 - a + z)
            + (b - dvn(i - 1)) * (belown - b + z)
            + (r - dv1(i + 1) - dvn(i - 1)) * (a + b - z - r);
    }
    let nonempty = conditions.iter().all(StratumConditions::all);
    Ok(StratumReport {
        conditions,
        nonempty,
        dimension,
    })
}

/// Convenience wrapper over actual invariants.
pub fn stratum_report_for(inv: &PairInvariants, spec: &StratumSpec) -> Result<StratumReport, StrataError> {
    stratum_report(&PairLocusSpec::from_invariants(inv), spec)
}

/// One of the nine pair-locus condition families. `index` is `None` for the
/// families that do not depend on an interior index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LocusCondition {
    pub condition: u8,
    pub index: Option<usize>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairLocusReport {
    pub conditions: Vec<LocusCondition>,
    pub nonempty: bool,
    pub dimension: i64,
}

/// Non-emptiness and dimension of the locus of pairs with the numeric
/// profile `spec`.
pub fn pair_locus_report(spec: &PairLocusSpec) -> Result<PairLocusReport, StrataError> {
    spec.validate()?;
    let n = spec.n;
    let mut conditions = Vec::new();
    let mut push = |condition: u8, index: Option<usize>, passed: bool| {
        conditions.push(LocusCondition {
            condition,
            index,
            passed,
        })
    };
    for i in 2..n {
        let (z1, zn, cap, zt) = (spec.zbar1(i), spec.zbarn(i), spec.zbar_cap(i), spec.ztilde_at(i));
        push(1, Some(i), cap <= z1 && z1 <= zt);
        push(2, Some(i), cap <= zn && zn <= zt);
        push(3, Some(i), z1 + zn <= zt + cap);
    }
    push(4, None, spec.vn1 <= spec.vbarn_at(1) && spec.vbarn_at(1) <= spec.last_ambient(1));
    push(5, None, spec.v1n <= spec.vbar1_at(n) && spec.vbar1_at(n) <= spec.first_ambient(n));
    for i in 2..n {
        push(
            6,
            Some(i),
            spec.vbar1_at(i + 1) <= spec.vbar1_at(i)
                && spec.vbar1_at(i) <= spec.first_ambient(i) + spec.zbar1(i) - spec.ztilde_at(i),
        );
        push(
            7,
            Some(i),
            spec.vbarn_at(i - 1) <= spec.vbarn_at(i)
                && spec.vbarn_at(i) <= spec.last_ambient(i) + spec.zbarn(i) - spec.ztilde_at(i),
        );
    }
    push(
        8,
        None,
        spec.vbar1_at(2) + spec.vn1 <= spec.vbar1_at(1) && spec.vbar1_at(1) <= spec.first_ambient(1),
    );
    push(
        9,
        None,
        spec.vbarn_at(n - 1) + spec.v1n <= spec.vbarn_at(n) && spec.vbarn_at(n) <= spec.last_ambient(n),
    );
    conditions.sort_by_key(|c| (c.condition, c.index));
    let nonempty = conditions.iter().all(|c| c.passed);
    Ok(PairLocusReport {
        conditions,
        nonempty,
        dimension: spec.graded_sum() + spec.boundary_terms() - spec.overlap_terms(),
    })
}

/// Upper bound for the dimension of the fiber over a pair with profile
/// `spec`, where `ambient = d` is the dimension of each `E_i`.
pub fn fiber_bound_of(spec: &PairLocusSpec, d: i64) -> Result<i64, StrataError> {
    spec.validate()?;
    let r = spec.r;
    Ok(r * (d - r) - spec.boundary_terms() + spec.overlap_terms() - spec.graded_sum())
}

pub fn fiber_bound(inv: &PairInvariants) -> i64 {
    fiber_bound_of(&PairLocusSpec::from_invariants(inv), inv.d() as i64)
        .expect("profiles of actual pairs are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{make_nested_chain, ChainSpec, LinkedChain};
    use crate::field::PrimeField;
    use crate::linalg::Subspace;

    fn model() -> LinkedChain {
        make_nested_chain(&ChainSpec::from_sizes(2, 2, &[1, 1])).unwrap()
    }

    fn line(v: [u32; 2]) -> Subspace {
        Subspace::from_rows(PrimeField::new(2).unwrap(), 2, vec![v.to_vec()]).unwrap()
    }

    fn transverse() -> PairInvariants {
        PairInvariants::compute(&model(), 1, &line([0, 1]), &line([1, 0])).unwrap()
    }

    fn repeated() -> PairInvariants {
        PairInvariants::compute(&model(), 1, &line([1, 0]), &line([1, 0])).unwrap()
    }

    #[test]
    fn stratum_examples() {
        let inv = transverse();
        let rep = stratum_report_for(&inv, &"1,1,0".parse().unwrap()).unwrap();
        assert!(rep.nonempty);
        assert_eq!(rep.dimension, 1);
        let rep = stratum_report_for(&inv, &"1,0,0".parse().unwrap()).unwrap();
        assert!(rep.nonempty);
        assert_eq!(rep.dimension, 0);
        let rep = stratum_report_for(&inv, &"0,0,0".parse().unwrap()).unwrap();
        assert!(!rep.nonempty);
        assert_eq!(rep.conditions[0].failing(), vec![4]);
    }

    #[test]
    fn stratum_spec_length_checked() {
        let inv = transverse();
        assert!(matches!(
            stratum_report_for(&inv, &"1,1,0;1,1,0".parse().unwrap()),
            Err(StrataError::Length { .. })
        ));
    }

    #[test]
    fn spec_parsing_round_trips() {
        let s: StratumSpec = "1,0,0; 0,1,1".parse().unwrap();
        assert_eq!(s.entries, vec![(1, 0, 0), (0, 1, 1)]);
        assert_eq!(s.to_string().parse::<StratumSpec>().unwrap(), s);
        assert!("1,2".parse::<StratumSpec>().is_err());
        assert!("a,b,c".parse::<StratumSpec>().is_err());
    }

    #[test]
    fn all_keys_enumerated() {
        assert_eq!(StratumSpec::all(3, 1).len(), 8);
        assert_eq!(StratumSpec::all(4, 1).len(), 64);
        assert_eq!(StratumSpec::all(4, 2).len(), 27 * 27);
    }

    #[test]
    fn pair_locus_examples() {
        let a = pair_locus_report(&PairLocusSpec::from_invariants(&transverse())).unwrap();
        assert!(a.nonempty);
        assert_eq!(a.dimension, 0);
        let b = pair_locus_report(&PairLocusSpec::from_invariants(&repeated())).unwrap();
        assert!(b.nonempty);
        assert_eq!(b.dimension, 1);
    }

    #[test]
    fn image_larger_than_closure_is_empty() {
        let mut spec = PairLocusSpec::from_invariants(&transverse());
        spec.vn1 = 2;
        let rep = pair_locus_report(&spec).unwrap();
        assert!(!rep.nonempty);
        assert!(rep.conditions.iter().any(|c| c.condition == 4 && !c.passed));
    }

    #[test]
    fn negative_derived_dimension_is_invalid() {
        let mut spec = PairLocusSpec::from_invariants(&transverse());
        spec.vbar1[1] = 0; // V̄_{1,2} = 0 but V̄_{1,3} = 1
        assert!(matches!(pair_locus_report(&spec), Err(StrataError::Invalid(_))));
    }

    #[test]
    fn fiber_bound_examples() {
        assert_eq!(fiber_bound(&transverse()), 1);
        assert_eq!(fiber_bound(&repeated()), 0);
    }

    #[test]
    fn fiber_bound_plus_locus_is_grassmannian() {
        for inv in [transverse(), repeated()] {
            let spec = PairLocusSpec::from_invariants(&inv);
            let locus = pair_locus_report(&spec).unwrap().dimension;
            assert_eq!(fiber_bound(&inv) + locus, 1);
        }
    }

    #[test]
    fn formula_cap_matches_actual_intersection() {
        for inv in [transverse(), repeated()] {
            let spec = PairLocusSpec::from_invariants(&inv);
            for i in 2..inv.n() {
                assert_eq!(spec.zbar_cap(i), inv.interior(i).zbar_cap_dim as i64);
            }
        }
    }
}
