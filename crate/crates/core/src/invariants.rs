//! Derived spaces attached to a pair `(V_1, V_n)` and to full linked tuples.
//!
//! For a chain with `s = 0` and an admissible pair we build
//!
//! * the filtrations `V̄_{1,i} = V_1 ∩ im g_{i-1,1}` and
//!   `V̄_{n,i} = V_n ∩ im f_{i,n-1}`;
//! * `V_{1,n} = g_{n-1,1}(V_n)` and `V_{n,1} = f_{1,n-1}(V_1)`;
//! * for interior `i`, the cokernel `Z̄_i` of
//!   `g_{i-1,1}^{-1}(V_1) ∩ f_{i,n-1}^{-1}(V_n) → V̄_{1,i} ⊕ V̄_{n,i}` and the
//!   images `Z̄_{1,i}`, `Z̄_{n,i}` of the two summands;
//! * `dim Z̃_i = dim f_{i,n-1}(E_i) + dim g_{i-1,1}(E_i) - d`.
//!
//! The external direct sum `V̄_{1,i} ⊕ V̄_{n,i}` is realised in coordinates
//! with respect to the canonical bases of the two summands.

use serde::Serialize;
use thiserror::Error;

use crate::chain::{ChainError, LinkedChain};
use crate::linalg::{image, kernel, preimage, LinalgError, Matrix, Quotient, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantsError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("subspace rank r = {r} must satisfy 0 < r < d = {d}")]
    RankOutOfRange { r: usize, d: usize },
    #[error("{which} has dimension {found}, expected {expected}")]
    WrongDimension { which: String, expected: usize, found: usize },
    #[error("{which} lives in F_{found_p}^{found_ambient}, expected F_{p}^{d}")]
    WrongAmbient { which: String, p: u32, d: usize, found_p: u32, found_ambient: usize },
    #[error("pair is not admissible: {0}")]
    Inadmissible(&'static str),
    #[error("tuple has {found} entries, chain has n = {n}")]
    TupleLength { n: usize, found: usize },
    #[error("tuple is not linked at index {index}: {direction}")]
    NotLinked { index: usize, direction: &'static str },
}

/// A chain together with the endpoints `(V_1, V_n)` of rank `r`.
#[derive(Debug, Clone)]
pub struct PairConfig<'a> {
    pub chain: &'a LinkedChain,
    pub r: usize,
    pub v1: Subspace,
    pub vn: Subspace,
}

impl<'a> PairConfig<'a> {
    pub fn new(chain: &'a LinkedChain, r: usize, v1: Subspace, vn: Subspace) -> Result<Self, InvariantsError> {
        check_rank(chain, r)?;
        check_member(chain, r, &v1, "V_1")?;
        check_member(chain, r, &vn, "V_n")?;
        Ok(Self { chain, r, v1, vn })
    }

    /// `f_{1,n-1}(V_1) ⊆ V_n` and `g_{n-1,1}(V_n) ⊆ V_1`.
    pub fn admissible(&self) -> bool {
        admissibility(self.chain, &self.v1, &self.vn).is_ok()
    }
}

fn check_rank(chain: &LinkedChain, r: usize) -> Result<(), InvariantsError> {
    if r == 0 || r >= chain.d() {
        return Err(InvariantsError::RankOutOfRange { r, d: chain.d() });
    }
    Ok(())
}

fn check_member(chain: &LinkedChain, r: usize, v: &Subspace, which: &str) -> Result<(), InvariantsError> {
    if v.field() != chain.field() || v.ambient_dim() != chain.d() {
        return Err(InvariantsError::WrongAmbient {
            which: which.to_string(),
            p: chain.field().p(),
            d: chain.d(),
            found_p: v.field().p(),
            found_ambient: v.ambient_dim(),
        });
    }
    if v.dim() != r {
        return Err(InvariantsError::WrongDimension {
            which: which.to_string(),
            expected: r,
            found: v.dim(),
        });
    }
    Ok(())
}

pub(crate) fn admissibility(chain: &LinkedChain, v1: &Subspace, vn: &Subspace) -> Result<(), InvariantsError> {
    let n = chain.n();
    if !vn.contains(&image(chain.to_last(1), v1)?) {
        return Err(InvariantsError::Inadmissible("f_{1,n-1}(V_1) is not contained in V_n"));
    }
    if !v1.contains(&image(chain.to_first(n), vn)?) {
        return Err(InvariantsError::Inadmissible("g_{n-1,1}(V_n) is not contained in V_1"));
    }
    Ok(())
}

pub fn admissible(pair: &PairConfig<'_>) -> bool {
    pair.admissible()
}

/// Data attached to an interior index `2 ≤ i ≤ n-1`.
#[derive(Debug, Clone)]
pub struct InteriorData {
    /// `g_{i-1,1}^{-1}(V_1) ∩ f_{i,n-1}^{-1}(V_n) ⊆ E_i`.
    pub linking_space: Subspace,
    /// Image of the linking space in `V̄_{1,i} ⊕ V̄_{n,i}`.
    pub relations: Subspace,
    pub zbar: Quotient,
    pub zbar1: Subspace,
    pub zbarn: Subspace,
    pub zbar_cap_dim: usize,
    pub ztilde_dim: usize,
}

#[derive(Debug, Clone)]
pub struct PairInvariants {
    n: usize,
    d: usize,
    r: usize,
    v1: Subspace,
    vn: Subspace,
    vbar1: Vec<Subspace>,
    vbarn: Vec<Subspace>,
    v1n: Subspace,
    vn1: Subspace,
    interior: Vec<InteriorData>,
    img_to_first: Vec<usize>,
    img_to_last: Vec<usize>,
    ker_f1: usize,
    ker_g_last: usize,
    to_first: Vec<Matrix>,
    to_last: Vec<Matrix>,
}

pub fn pair_invariants(pair: &PairConfig<'_>) -> Result<PairInvariants, InvariantsError> {
    PairInvariants::compute(pair.chain, pair.r, &pair.v1, &pair.vn)
}

impl PairInvariants {
    pub fn compute(chain: &LinkedChain, r: usize, v1: &Subspace, vn: &Subspace) -> Result<Self, InvariantsError> {
        chain.require_analysis_ready()?;
        check_rank(chain, r)?;
        check_member(chain, r, v1, "V_1")?;
        check_member(chain, r, vn, "V_n")?;
        admissibility(chain, v1, vn)?;
        let n = chain.n();
        let d = chain.d();
        let field = chain.field();
        let full = Subspace::full(field, d);

        let mut vbar1 = Vec::with_capacity(n);
        let mut vbarn = Vec::with_capacity(n);
        let mut img_to_first = Vec::with_capacity(n);
        let mut img_to_last = Vec::with_capacity(n);
        for i in 1..=n {
            let im_g = image(chain.to_first(i), &full)?;
            let im_f = image(chain.to_last(i), &full)?;
            img_to_first.push(im_g.dim());
            img_to_last.push(im_f.dim());
            vbar1.push(v1.intersect(&im_g)?);
            vbarn.push(vn.intersect(&im_f)?);
        }
        let v1n = image(chain.to_first(n), vn)?;
        let vn1 = image(chain.to_last(1), v1)?;

        let mut out = Self {
            n,
            d,
            r,
            v1: v1.clone(),
            vn: vn.clone(),
            vbar1,
            vbarn,
            v1n,
            vn1,
            interior: Vec::with_capacity(n - 2),
            img_to_first,
            img_to_last,
            ker_f1: kernel(chain.f(1)).dim(),
            ker_g_last: kernel(chain.g(n - 1)).dim(),
            to_first: (1..=n).map(|i| chain.to_first(i).clone()).collect(),
            to_last: (1..=n).map(|i| chain.to_last(i).clone()).collect(),
        };
        for i in 2..n {
            let linking_space = preimage(chain.to_first(i), v1)?.intersect(&preimage(chain.to_last(i), vn)?)?;
            let a = out.vbar1(i).dim();
            let b = out.vbarn(i).dim();
            let rows = (0..linking_space.dim())
                .map(|k| out.embed(i, linking_space.basis().row(k)))
                .collect::<Result<Vec<_>, _>>()?;
            let relations = Subspace::from_rows(field, a + b, rows)?;
            let zbar = Quotient::new(a + b, &relations)?;
            let first: Vec<usize> = (0..a).collect();
            let second: Vec<usize> = (a..a + b).collect();
            let zbar1 = zbar.push(&Subspace::coordinate(field, a + b, &first)?)?;
            let zbarn = zbar.push(&Subspace::coordinate(field, a + b, &second)?)?;
            let zbar_cap_dim = zbar1.intersect(&zbarn)?.dim();
            let ztilde_dim = out.img_to_last[i - 1] + out.img_to_first[i - 1] - d;
            out.interior.push(InteriorData {
                linking_space,
                relations,
                zbar,
                zbar1,
                zbarn,
                zbar_cap_dim,
                ztilde_dim,
            });
        }
        Ok(out)
    }

    /// Coordinates of `(g_{i-1,1} v, f_{i,n-1} v)` in `V̄_{1,i} ⊕ V̄_{n,i}`.
    fn embed(&self, i: usize, v: &[u32]) -> Result<Vec<u32>, InvariantsError> {
        let gv = self.to_first[i - 1].apply(v)?;
        let fv = self.to_last[i - 1].apply(v)?;
        let mut c = self
            .vbar1(i)
            .coordinates(&gv)
            .ok_or(InvariantsError::NotLinked {
                index: i,
                direction: "g_{i-1,1}(v) lies outside V̄_{1,i}",
            })?;
        c.extend(self.vbarn(i).coordinates(&fv).ok_or(InvariantsError::NotLinked {
            index: i,
            direction: "f_{i,n-1}(v) lies outside V̄_{n,i}",
        })?);
        Ok(c)
    }

    /// Direct sum `A ⊕ B ⊆ V̄_{1,i} ⊕ V̄_{n,i}` for `A ⊆ V̄_{1,i}`, `B ⊆ V̄_{n,i}`.
    fn direct_sum(&self, i: usize, a: &Subspace, b: &Subspace) -> Result<Subspace, InvariantsError> {
        let (ka, kb) = (self.vbar1(i).dim(), self.vbarn(i).dim());
        let mut rows = Vec::with_capacity(a.dim() + b.dim());
        for k in 0..a.dim() {
            let mut c = self.vbar1(i).coordinates(a.basis().row(k)).ok_or(InvariantsError::NotLinked {
                index: i,
                direction: "V_{1,i} is not contained in V̄_{1,i}",
            })?;
            c.resize(ka + kb, 0);
            rows.push(c);
        }
        for k in 0..b.dim() {
            let c = self.vbarn(i).coordinates(b.basis().row(k)).ok_or(InvariantsError::NotLinked {
                index: i,
                direction: "V_{n,i} is not contained in V̄_{n,i}",
            })?;
            let mut row = vec![0; ka];
            row.extend(c);
            rows.push(row);
        }
        Ok(Subspace::from_rows(self.v1.field(), ka + kb, rows)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn v1(&self) -> &Subspace {
        &self.v1
    }

    pub fn vn(&self) -> &Subspace {
        &self.vn
    }

    /// `V̄_{1,i}`, `1 ≤ i ≤ n`.
    pub fn vbar1(&self, i: usize) -> &Subspace {
        &self.vbar1[i - 1]
    }

    /// `V̄_{n,i}`, `1 ≤ i ≤ n`.
    pub fn vbarn(&self, i: usize) -> &Subspace {
        &self.vbarn[i - 1]
    }

    pub fn v1n(&self) -> &Subspace {
        &self.v1n
    }

    pub fn vn1(&self) -> &Subspace {
        &self.vn1
    }

    /// Interior data for `2 ≤ i ≤ n-1`.
    pub fn interior(&self, i: usize) -> &InteriorData {
        &self.interior[i - 2]
    }

    /// `dim g_{i-1,1}(E_i)` as an actual image (so `d` at `i = 1`).
    pub fn img_to_first_dim(&self, i: usize) -> usize {
        self.img_to_first[i - 1]
    }

    /// `dim f_{i,n-1}(E_i)` as an actual image (so `d` at `i = n`).
    pub fn img_to_last_dim(&self, i: usize) -> usize {
        self.img_to_last[i - 1]
    }

    pub fn ker_f1_dim(&self) -> usize {
        self.ker_f1
    }

    pub fn ker_g_last_dim(&self) -> usize {
        self.ker_g_last
    }

    pub fn zbar_dim(&self, i: usize) -> usize {
        self.interior(i).zbar.target_dim()
    }

    /// Filtration containments, the exact sequences of the `Z̄_{1,i}` and
    /// `Z̄_{n,i}`, and `Z̄_{1,i} + Z̄_{n,i} = Z̄_i`.
    pub fn check_structure(&self) -> bool {
        let n = self.n;
        let chain1 = self.vbar1(n).contains(&self.v1n)
            && (1..n).all(|i| self.vbar1(i).contains(self.vbar1(i + 1)))
            && self.vbar1(1) == &self.v1;
        let chainn = self.vbarn(1).contains(&self.vn1)
            && (1..n).all(|i| self.vbarn(i + 1).contains(self.vbarn(i)))
            && self.vbarn(n) == &self.vn;
        let exact = (2..n).all(|i| {
            let z = self.interior(i);
            z.zbar1.dim() + self.vbar1(i + 1).dim() == self.vbar1(i).dim()
                && z.zbarn.dim() + self.vbarn(i - 1).dim() == self.vbarn(i).dim()
                && z.zbar1.sum(&z.zbarn).map(|s| s.dim() == z.zbar.target_dim()).unwrap_or(false)
        });
        chain1 && chainn && exact
    }

    /// Recomputes each `V̄_{1,i}` as `g_{i-1,1}(g_{i-1,1}^{-1}(V_1))` and each
    /// step as `V̄_{1,i} ∩ g_{i,1}(E_{i+1})` (and symmetrically for `V_n`),
    /// comparing with the stored intersections.
    pub fn check_two_routes(&self) -> Result<bool, InvariantsError> {
        let n = self.n;
        let field = self.v1.field();
        let full = Subspace::full(field, self.d);
        for i in 1..=n {
            let g = &self.to_first[i - 1];
            let f = &self.to_last[i - 1];
            if &image(g, &preimage(g, &self.v1)?)? != self.vbar1(i) {
                return Ok(false);
            }
            if &image(f, &preimage(f, &self.vn)?)? != self.vbarn(i) {
                return Ok(false);
            }
        }
        for i in 2..n {
            let next = self.vbar1(i).intersect(&image(&self.to_first[i], &full)?)?;
            let prev = self.vbarn(i).intersect(&image(&self.to_last[i - 2], &full)?)?;
            if &next != self.vbar1(i + 1) || &prev != self.vbarn(i - 1) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn summary(&self) -> PairInvariantsSummary {
        let n = self.n;
        PairInvariantsSummary {
            n,
            d: self.d,
            r: self.r,
            v1: self.v1.clone(),
            vn: self.vn.clone(),
            vbar1_dims: (1..=n).map(|i| self.vbar1(i).dim()).collect(),
            vbarn_dims: (1..=n).map(|i| self.vbarn(i).dim()).collect(),
            v1n_dim: self.v1n.dim(),
            vn1_dim: self.vn1.dim(),
            zbar_dims: (2..n).map(|i| self.zbar_dim(i)).collect(),
            zbar1_dims: (2..n).map(|i| self.interior(i).zbar1.dim()).collect(),
            zbarn_dims: (2..n).map(|i| self.interior(i).zbarn.dim()).collect(),
            zbar_cap_dims: (2..n).map(|i| self.interior(i).zbar_cap_dim).collect(),
            ztilde_dims: (2..n).map(|i| self.interior(i).ztilde_dim).collect(),
            img_to_first_dims: self.img_to_first.clone(),
            img_to_last_dims: self.img_to_last.clone(),
            ker_f1_dim: self.ker_f1,
            ker_g_last_dim: self.ker_g_last,
            vbar1: self.vbar1.clone(),
            vbarn: self.vbarn.clone(),
            v1n: self.v1n.clone(),
            vn1: self.vn1.clone(),
            zbar_projections: self.interior.iter().map(|z| z.zbar.projection().clone()).collect(),
        }
    }
}

/// Serializable view of [`PairInvariants`]. Arrays indexed by `i = 1..n`
/// start at `i = 1`; interior arrays start at `i = 2`.
#[derive(Debug, Clone, Serialize)]
pub struct PairInvariantsSummary {
    pub n: usize,
    pub d: usize,
    pub r: usize,
    pub v1: Subspace,
    pub vn: Subspace,
    pub vbar1_dims: Vec<usize>,
    pub vbarn_dims: Vec<usize>,
    pub v1n_dim: usize,
    pub vn1_dim: usize,
    pub zbar_dims: Vec<usize>,
    pub zbar1_dims: Vec<usize>,
    pub zbarn_dims: Vec<usize>,
    pub zbar_cap_dims: Vec<usize>,
    pub ztilde_dims: Vec<usize>,
    pub img_to_first_dims: Vec<usize>,
    pub img_to_last_dims: Vec<usize>,
    pub ker_f1_dim: usize,
    pub ker_g_last_dim: usize,
    pub vbar1: Vec<Subspace>,
    pub vbarn: Vec<Subspace>,
    pub v1n: Subspace,
    pub vn1: Subspace,
    pub zbar_projections: Vec<Matrix>,
}

/// `(dim V_{1,i}, dim V_{n,i}, dim Z_i)` for one interior index.
pub type StratumEntry = (usize, usize, usize);

/// Per-point invariants of a linked tuple `(V_1, …, V_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointInvariants {
    /// `dim g_{i-1,1}(V_i)` for `i = 1..n`.
    pub v1i_dims: Vec<usize>,
    /// `dim f_{i,n-1}(V_i)` for `i = 1..n`.
    pub vni_dims: Vec<usize>,
    /// `dim Z_i` for interior `i = 2..n-1`.
    pub zi_dims: Vec<usize>,
    pub lemma1: bool,
    pub lemma4: bool,
}

impl PointInvariants {
    /// Stratum key: one entry per interior index.
    pub fn key(&self) -> Vec<StratumEntry> {
        let n = self.v1i_dims.len();
        (2..n)
            .map(|i| (self.v1i_dims[i - 1], self.vni_dims[i - 1], self.zi_dims[i - 2]))
            .collect()
    }
}

/// Checks that `tuple` is a linked point of rank `r`.
pub fn check_linked(chain: &LinkedChain, r: usize, tuple: &[Subspace]) -> Result<(), InvariantsError> {
    let n = chain.n();
    if tuple.len() != n {
        return Err(InvariantsError::TupleLength { n, found: tuple.len() });
    }
    for (k, v) in tuple.iter().enumerate() {
        check_member(chain, r, v, &format!("V_{}", k + 1))?;
    }
    for i in 1..n {
        if !tuple[i].contains(&image(chain.f(i), &tuple[i - 1])?) {
            return Err(InvariantsError::NotLinked {
                index: i,
                direction: "f_i(V_i) is not contained in V_{i+1}",
            });
        }
        if !tuple[i - 1].contains(&image(chain.g(i), &tuple[i])?) {
            return Err(InvariantsError::NotLinked {
                index: i,
                direction: "g_i(V_{i+1}) is not contained in V_i",
            });
        }
    }
    Ok(())
}

/// Invariants of a linked tuple whose endpoints are the pair of `inv`.
/// Validates linkage and evaluates both lemma checks.
pub fn point_invariants(
    chain: &LinkedChain,
    inv: &PairInvariants,
    tuple: &[Subspace],
) -> Result<PointInvariants, InvariantsError> {
    check_linked(chain, inv.r, tuple)?;
    if tuple[0] != inv.v1 || tuple[inv.n - 1] != inv.vn {
        return Err(InvariantsError::Inadmissible("tuple endpoints differ from the pair"));
    }
    point_invariants_unchecked(inv, tuple)
}

/// As [`point_invariants`] without re-validating linkage.
pub fn point_invariants_unchecked(inv: &PairInvariants, tuple: &[Subspace]) -> Result<PointInvariants, InvariantsError> {
    let n = inv.n;
    let mut v1i_dims = Vec::with_capacity(n);
    let mut vni_dims = Vec::with_capacity(n);
    let mut zi_dims = Vec::with_capacity(n.saturating_sub(2));
    let mut lemma1 = true;
    let mut lemma4 = true;
    for i in 1..=n {
        let vi = &tuple[i - 1];
        let v1i = image(&inv.to_first[i - 1], vi)?;
        let vni = image(&inv.to_last[i - 1], vi)?;
        v1i_dims.push(v1i.dim());
        vni_dims.push(vni.dim());
        if i == 1 || i == n {
            continue;
        }
        let z = inv.interior(i);
        // V_i must lie in the linking space and embed injectively.
        let joint = inv.to_first[i - 1].vstack(&inv.to_last[i - 1])?;
        lemma1 &= z.linking_space.contains(vi) && image(&joint, vi)?.dim() == vi.dim();
        let both = inv.direct_sum(i, &v1i, &vni)?;
        let zi = z.zbar.push(&both)?;
        let from1 = z.zbar.push(&inv.direct_sum(i, &v1i, &Subspace::zero(vi.field(), inv.d))?)?;
        let fromn = z.zbar.push(&inv.direct_sum(i, &Subspace::zero(vi.field(), inv.d), &vni)?)?;
        lemma4 &= from1 == zi && fromn == zi && z.zbar1.contains(&zi) && z.zbarn.contains(&zi);
        zi_dims.push(zi.dim());
    }
    Ok(PointInvariants {
        v1i_dims,
        vni_dims,
        zi_dims,
        lemma1,
        lemma4,
    })
}

pub fn verify_lemma1(chain: &LinkedChain, inv: &PairInvariants, tuple: &[Subspace]) -> Result<bool, InvariantsError> {
    Ok(point_invariants(chain, inv, tuple)?.lemma1)
}

pub fn verify_lemma4(chain: &LinkedChain, inv: &PairInvariants, tuple: &[Subspace]) -> Result<bool, InvariantsError> {
    Ok(point_invariants(chain, inv, tuple)?.lemma4)
}
