//! Linked chains `E_1 ⇄ E_2 ⇄ … ⇄ E_n` of `d`-dimensional spaces over F_p.
//!
//! Positions are 1-based throughout: `f(i)` maps `E_i → E_{i+1}` and `g(i)`
//! maps `E_{i+1} → E_i` for `1 ≤ i ≤ n-1`. A chain is *linked* when
//!
//! * (I) `f_i g_i = g_i f_i = s · id`;
//! * (II) at `s = 0`, `rank f_i + rank g_i = d` (with (I) this forces
//!   `ker f_i = im g_i` and `ker g_i = im f_i`);
//! * (III) `rank(f_{i+1} f_i) = rank f_i` and `rank(g_i g_{i+1}) = rank g_{i+1}`.
//!
//! These are the rank forms of the conditions at a single field point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldError, PrimeField};
use crate::linalg::{LinalgError, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("chain length n = {0} is too short (need n >= 2)")]
    TooShort(usize),
    #[error("analysis requires n > 2, got n = {0}")]
    NeedsInterior(usize),
    #[error("expected {expected} {which} maps, found {found}")]
    MapCount { which: &'static str, expected: usize, found: usize },
    #[error("{which}_{index} is {rows}x{cols}, expected {d}x{d}")]
    MapShape { which: &'static str, index: usize, rows: usize, cols: usize, d: usize },
    #[error("subsets are not nested: S_{index} is not contained in S_{next}", next = index + 1)]
    NotNested { index: usize },
    #[error("subset S_{index} contains coordinate {coord} outside 1..={d}")]
    CoordinateOutOfRange { index: usize, coord: usize, d: usize },
    #[error("expected {expected} subsets, found {found}")]
    SubsetCount { expected: usize, found: usize },
    #[error("operation requires s = 0, chain has s = {0}")]
    NonZeroScalar(u32),
    #[error("chain fails the linked-chain axioms")]
    AxiomsFailed,
    #[error("composite index out of range: i = {i}, j = {j}, n = {n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },
    #[error("unknown chain model {0:?}")]
    UnknownModel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Forward,
    Backward,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkedChain {
    field: PrimeField,
    n: usize,
    d: usize,
    s: u32,
    f: Vec<Matrix>,
    g: Vec<Matrix>,
    // to_last[i-1] = f_{i,n-1}, to_first[i-1] = g_{i-1,1}, for i = 1..=n.
    to_last: Vec<Matrix>,
    to_first: Vec<Matrix>,
}

impl LinkedChain {
    /// Assembles a chain from explicit maps. Only shapes are validated here;
    /// use [`LinkedChain::axiom_report`] for the linking conditions.
    pub fn from_maps(field: PrimeField, d: usize, s: u32, f: Vec<Matrix>, g: Vec<Matrix>) -> Result<Self, ChainError> {
        let n = f.len() + 1;
        if f.is_empty() {
            return Err(ChainError::TooShort(n));
        }
        if g.len() != f.len() {
            return Err(ChainError::MapCount {
                which: "g",
                expected: f.len(),
                found: g.len(),
            });
        }
        for (which, maps) in [("f", &f), ("g", &g)] {
            for (k, m) in maps.iter().enumerate() {
                if m.rows() != d || m.cols() != d {
                    return Err(ChainError::MapShape {
                        which,
                        index: k + 1,
                        rows: m.rows(),
                        cols: m.cols(),
                        d,
                    });
                }
                if m.field() != field {
                    return Err(LinalgError::FieldMismatch {
                        left: field.p(),
                        right: m.field().p(),
                    }
                    .into());
                }
            }
        }
        let id = Matrix::identity(field, d);
        let mut to_last = vec![id.clone(); n];
        for i in (1..n).rev() {
            to_last[i - 1] = to_last[i].mul(&f[i - 1])?;
        }
        let mut to_first = vec![id; n];
        for i in 2..=n {
            to_first[i - 1] = to_first[i - 2].mul(&g[i - 2])?;
        }
        Ok(Self {
            field,
            n,
            d,
            s: s % field.p(),
            f,
            g,
            to_last,
            to_first,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    /// `f_i : E_i → E_{i+1}`, `1 ≤ i ≤ n-1`.
    pub fn f(&self, i: usize) -> &Matrix {
        &self.f[i - 1]
    }

    /// `g_i : E_{i+1} → E_i`, `1 ≤ i ≤ n-1`.
    pub fn g(&self, i: usize) -> &Matrix {
        &self.g[i - 1]
    }

    pub fn forward_maps(&self) -> &[Matrix] {
        &self.f
    }

    pub fn backward_maps(&self) -> &[Matrix] {
        &self.g
    }

    /// `f_{i,n-1} : E_i → E_n` (identity for `i = n`).
    pub fn to_last(&self, i: usize) -> &Matrix {
        &self.to_last[i - 1]
    }

    /// `g_{i-1,1} : E_i → E_1` (identity for `i = 1`).
    pub fn to_first(&self, i: usize) -> &Matrix {
        &self.to_first[i - 1]
    }

    /// `f_{i,j} = f_j ∘ … ∘ f_i` (forward) or `g_{j,i} = g_i ∘ … ∘ g_j`
    /// (backward). `j = i - 1` is the empty composite, i.e. the identity.
    pub fn composite(&self, kind: MapKind, i: usize, j: usize) -> Result<Matrix, ChainError> {
        if i == 0 || i > self.n || j + 1 < i || j > self.n - 1 {
            return Err(ChainError::IndexOutOfRange { i, j, n: self.n });
        }
        let mut acc = Matrix::identity(self.field, self.d);
        for k in i..=j {
            acc = match kind {
                MapKind::Forward => self.f(k).mul(&acc)?,
                MapKind::Backward => acc.mul(self.g(k))?,
            };
        }
        Ok(acc)
    }

    pub fn axiom_report(&self) -> AxiomReport {
        let mut checks = Vec::new();
        let scalar = Matrix::scalar(self.field, self.d, self.s);
        for i in 1..self.n {
            let fg = self.f(i).mul(self.g(i)).expect("square maps");
            let gf = self.g(i).mul(self.f(i)).expect("square maps");
            let witness = if fg != scalar {
                Some(Witness::Product {
                    product: format!("f_{i} g_{i}"),
                    rows: fg.to_rows(),
                })
            } else if gf != scalar {
                Some(Witness::Product {
                    product: format!("g_{i} f_{i}"),
                    rows: gf.to_rows(),
                })
            } else {
                None
            };
            checks.push(AxiomCheck::new(Axiom::I, i, witness));
        }
        for i in 1..self.n {
            let rf = self.f(i).rank();
            let rg = self.g(i).rank();
            // Away from s = 0 the condition only asks rank f + rank g >= d.
            let ok = if self.s == 0 { rf + rg == self.d } else { rf + rg >= self.d };
            let witness = (!ok).then(|| Witness::Ranks {
                left: format!("rank f_{i}"),
                left_rank: rf,
                right: format!("rank g_{i}"),
                right_rank: rg,
            });
            checks.push(AxiomCheck::new(Axiom::II, i, witness));
        }
        for i in 1..self.n.saturating_sub(1) {
            let rf = self.f(i).rank();
            let rff = self.f(i + 1).mul(self.f(i)).expect("square maps").rank();
            let rg = self.g(i + 1).rank();
            let rgg = self.g(i).mul(self.g(i + 1)).expect("square maps").rank();
            let witness = if rff != rf {
                Some(Witness::Ranks {
                    left: format!("rank f_{} f_{i}", i + 1),
                    left_rank: rff,
                    right: format!("rank f_{i}"),
                    right_rank: rf,
                })
            } else if rgg != rg {
                Some(Witness::Ranks {
                    left: format!("rank g_{i} g_{}", i + 1),
                    left_rank: rgg,
                    right: format!("rank g_{}", i + 1),
                    right_rank: rg,
                })
            } else {
                None
            };
            checks.push(AxiomCheck::new(Axiom::III, i, witness));
        }
        AxiomReport { checks }
    }

    /// Guards the invariant and stratum computations: `s = 0`, `n > 2` and
    /// all axioms hold.
    pub fn require_analysis_ready(&self) -> Result<(), ChainError> {
        if self.n <= 2 {
            return Err(ChainError::NeedsInterior(self.n));
        }
        if self.s != 0 {
            return Err(ChainError::NonZeroScalar(self.s));
        }
        if !self.axiom_report().all_pass() {
            return Err(ChainError::AxiomsFailed);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axiom {
    I,
    II,
    III,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Product { product: String, rows: Vec<Vec<u32>> },
    Ranks { left: String, left_rank: usize, right: String, right_rank: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub condition: Axiom,
    pub index: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl AxiomCheck {
    fn new(condition: Axiom, index: usize, witness: Option<Witness>) -> Self {
        Self {
            condition,
            index,
            passed: witness.is_none(),
            witness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn passes(&self, axiom: Axiom) -> bool {
        self.checks.iter().filter(|c| c.condition == axiom).all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Pass/fail pattern without witnesses, for comparing verdicts.
    pub fn verdicts(&self) -> Vec<(Axiom, usize, bool)> {
        self.checks.iter().map(|c| (c.condition, c.index, c.passed)).collect()
    }
}

/// Nested-projection model: `f_i` projects onto the coordinates in `S_i`,
/// `g_i` onto the complement, optionally conjugated by seeded random
/// automorphisms of each `E_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub p: u32,
    pub d: usize,
    pub n: usize,
    /// `S_1 ⊆ … ⊆ S_{n-1}`, coordinates 1-based.
    pub subsets: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ChainSpec {
    /// Canonical nested model with `S_i = {1, …, sizes[i-1]}`.
    pub fn from_sizes(p: u32, d: usize, sizes: &[usize]) -> Self {
        Self {
            p,
            d,
            n: sizes.len() + 1,
            subsets: sizes.iter().map(|&k| (1..=k).collect()).collect(),
            seed: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.subsets.iter().map(Vec::len).collect()
    }

    fn validate(&self) -> Result<PrimeField, ChainError> {
        let field = PrimeField::new(self.p)?;
        if self.n < 2 {
            return Err(ChainError::TooShort(self.n));
        }
        if self.subsets.len() != self.n - 1 {
            return Err(ChainError::SubsetCount {
                expected: self.n - 1,
                found: self.subsets.len(),
            });
        }
        for (k, s) in self.subsets.iter().enumerate() {
            if let Some(&c) = s.iter().find(|&&c| c == 0 || c > self.d) {
                return Err(ChainError::CoordinateOutOfRange {
                    index: k + 1,
                    coord: c,
                    d: self.d,
                });
            }
        }
        for (k, pair) in self.subsets.windows(2).enumerate() {
            if !pair[0].iter().all(|c| pair[1].contains(c)) {
                return Err(ChainError::NotNested { index: k + 1 });
            }
        }
        Ok(field)
    }
}

pub fn make_nested_chain(spec: &ChainSpec) -> Result<LinkedChain, ChainError> {
    let field = spec.validate()?;
    let d = spec.d;
    let mut f = Vec::with_capacity(spec.n - 1);
    let mut g = Vec::with_capacity(spec.n - 1);
    for s in &spec.subsets {
        let fd: Vec<u32> = (1..=d).map(|c| u32::from(s.contains(&c))).collect();
        let gd: Vec<u32> = fd.iter().map(|&x| 1 - x).collect();
        f.push(Matrix::diagonal(field, &fd)?);
        g.push(Matrix::diagonal(field, &gd)?);
    }
    if let Some(seed) = spec.seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let autos: Vec<(Matrix, Matrix)> = (0..spec.n).map(|_| random_invertible(field, d, &mut rng)).collect();
        for i in 0..spec.n - 1 {
            let (a_i, a_i_inv) = &autos[i];
            let (a_next, a_next_inv) = &autos[i + 1];
            f[i] = a_next.mul(&f[i])?.mul(a_i_inv)?;
            g[i] = a_i.mul(&g[i])?.mul(a_next_inv)?;
        }
    }
    LinkedChain::from_maps(field, d, 0, f, g)
}

/// Uniformly random invertible matrix (rejection sampling) and its inverse.
pub fn random_invertible(field: PrimeField, d: usize, rng: &mut impl Rng) -> (Matrix, Matrix) {
    loop {
        let rows: Vec<Vec<u32>> = (0..d).map(|_| (0..d).map(|_| rng.gen_range(0..field.p())).collect()).collect();
        let m = Matrix::from_rows(field, d, rows).expect("entries reduced");
        if let Some(inv) = m.inverse() {
            return (m, inv);
        }
    }
}

/// Chain JSON: either a nested model or explicit maps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChainInput {
    Nested {
        model: String,
        #[serde(flatten)]
        spec: ChainSpec,
    },
    Explicit {
        p: u32,
        d: usize,
        n: usize,
        #[serde(default)]
        s: u32,
        f: Vec<Vec<Vec<u32>>>,
        g: Vec<Vec<Vec<u32>>>,
    },
}

impl ChainInput {
    pub fn build(&self) -> Result<LinkedChain, ChainError> {
        match self {
            ChainInput::Nested { model, spec } => {
                if model != "nested" {
                    return Err(ChainError::UnknownModel(model.clone()));
                }
                make_nested_chain(spec)
            }
            ChainInput::Explicit { p, d, n, s, f, g } => {
                let field = PrimeField::new(*p)?;
                let to_maps = |maps: &[Vec<Vec<u32>>]| -> Result<Vec<Matrix>, ChainError> {
                    maps.iter()
                        .map(|rows| Matrix::from_rows(field, *d, rows.clone()).map_err(ChainError::from))
                        .collect()
                };
                let (fm, gm) = (to_maps(f)?, to_maps(g)?);
                if fm.len() + 1 != *n {
                    return Err(ChainError::MapCount {
                        which: "f",
                        expected: n.saturating_sub(1),
                        found: fm.len(),
                    });
                }
                LinkedChain::from_maps(field, *d, *s, fm, gm)
            }
        }
    }

    pub fn explicit(chain: &LinkedChain) -> Self {
        ChainInput::Explicit {
            p: chain.field().p(),
            d: chain.d(),
            n: chain.n(),
            s: chain.s(),
            f: chain.forward_maps().iter().map(Matrix::to_rows).collect(),
            g: chain.backward_maps().iter().map(Matrix::to_rows).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_model(seed: Option<u64>) -> LinkedChain {
        let mut spec = ChainSpec {
            p: 2,
            d: 2,
            n: 3,
            subsets: vec![vec![1], vec![1]],
            seed: None,
        };
        spec.seed = seed;
        make_nested_chain(&spec).unwrap()
    }

    #[test]
    fn nested_model_is_diagonal_and_linked() {
        let c = small_model(None);
        let field = c.field();
        assert_eq!(c.f(1), &Matrix::diagonal(field, &[1, 0]).unwrap());
        assert_eq!(c.g(2), &Matrix::diagonal(field, &[0, 1]).unwrap());
        assert!(c.axiom_report().all_pass());
    }

    #[test]
    fn non_nested_subsets_rejected() {
        let spec = ChainSpec {
            p: 2,
            d: 2,
            n: 3,
            subsets: vec![vec![1], vec![2]],
            seed: None,
        };
        assert_eq!(make_nested_chain(&spec), Err(ChainError::NotNested { index: 1 }));
    }

    #[test]
    fn non_nested_maps_fail_condition_three() {
        // Same maps as the rejected spec, assembled by hand.
        let field = PrimeField::new(2).unwrap();
        let diag = |a, b| Matrix::diagonal(field, &[a, b]).unwrap();
        let c = LinkedChain::from_maps(field, 2, 0, vec![diag(1, 0), diag(0, 1)], vec![diag(0, 1), diag(1, 0)]).unwrap();
        let report = c.axiom_report();
        assert!(report.passes(Axiom::I));
        assert!(report.passes(Axiom::II));
        assert!(!report.passes(Axiom::III));
    }

    #[test]
    fn conjugation_preserves_verdict() {
        let plain = small_model(None).axiom_report().verdicts();
        for seed in 0..10 {
            assert_eq!(small_model(Some(seed)).axiom_report().verdicts(), plain);
        }
    }

    #[test]
    fn idempotent_pair_fails_condition_one() {
        let field = PrimeField::new(2).unwrap();
        let e = Matrix::diagonal(field, &[1, 0]).unwrap();
        let c = LinkedChain::from_maps(field, 2, 0, vec![e.clone()], vec![e]).unwrap();
        let report = c.axiom_report();
        assert!(!report.passes(Axiom::I));
        let fail = report.failures().next().unwrap();
        assert_eq!(fail.index, 1);
        assert!(matches!(fail.witness, Some(Witness::Product { .. })));
    }

    #[test]
    fn zero_backward_map_fails_condition_two() {
        let mut c = small_model(None);
        let field = c.field();
        c = LinkedChain::from_maps(
            field,
            2,
            0,
            c.forward_maps().to_vec(),
            vec![Matrix::zeros(field, 2, 2), c.g(2).clone()],
        )
        .unwrap();
        let report = c.axiom_report();
        assert!(report.passes(Axiom::I));
        assert!(!report.passes(Axiom::II));
        let fail = report.failures().find(|c| c.condition == Axiom::II).unwrap();
        assert_eq!(
            fail.witness,
            Some(Witness::Ranks {
                left: "rank f_1".into(),
                left_rank: 1,
                right: "rank g_1".into(),
                right_rank: 0
            })
        );
    }

    #[test]
    fn composites() {
        let c = small_model(None);
        let id = Matrix::identity(c.field(), 2);
        assert_eq!(&c.composite(MapKind::Forward, 1, 1).unwrap(), c.f(1));
        assert_eq!(c.composite(MapKind::Forward, 3, 2).unwrap(), id);
        assert_eq!(c.composite(MapKind::Backward, 1, 0).unwrap(), id);
        assert_eq!(c.composite(MapKind::Forward, 1, 2).unwrap(), Matrix::diagonal(c.field(), &[1, 0]).unwrap());
        assert_eq!(&c.composite(MapKind::Forward, 1, 2).unwrap(), c.to_last(1));
        assert_eq!(&c.composite(MapKind::Backward, 1, 2).unwrap(), c.to_first(3));
        assert!(c.composite(MapKind::Forward, 1, 3).is_err());
        assert!(c.composite(MapKind::Forward, 0, 1).is_err());
        assert!(c.composite(MapKind::Backward, 3, 1).is_err());
    }

    #[test]
    fn analysis_guard() {
        assert!(small_model(None).require_analysis_ready().is_ok());
        let field = PrimeField::new(3).unwrap();
        let c = LinkedChain::from_maps(
            field,
            1,
            2,
            vec![Matrix::scalar(field, 1, 1), Matrix::scalar(field, 1, 1)],
            vec![Matrix::scalar(field, 1, 2), Matrix::scalar(field, 1, 2)],
        )
        .unwrap();
        assert!(c.axiom_report().all_pass());
        assert_eq!(c.require_analysis_ready(), Err(ChainError::NonZeroScalar(2)));
    }

    #[test]
    fn chain_json_forms() {
        let nested: ChainInput =
            serde_json::from_str(r#"{"model":"nested","p":2,"d":2,"n":3,"subsets":[[1],[1]]}"#).unwrap();
        let c = nested.build().unwrap();
        let explicit = ChainInput::explicit(&c);
        let text = serde_json::to_string(&explicit).unwrap();
        let back: ChainInput = serde_json::from_str(&text).unwrap();
        assert_eq!(back.build().unwrap(), c);
        let bad: ChainInput =
            serde_json::from_str(r#"{"model":"twisted","p":2,"d":2,"n":3,"subsets":[[1],[1]]}"#).unwrap();
        assert!(matches!(bad.build(), Err(ChainError::UnknownModel(_))));
    }
}
