//! Limit-linear-series numerics on a curve with two components `Y`, `Z`
//! meeting at one node.
//!
//! Vanishing sequences at the node are translated into the numeric profile
//! of a pair on a linked Grassmannian of length `n' = d + 1` and rank
//! `r' = r + 1`, so the fiber bound of [`crate::strata`] applies directly.

pub mod pieri;
pub mod sample;
pub mod sweep;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::strata::{fiber_bound_of, PairLocusSpec, StrataError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LimitSeriesError {
    #[error("vanishing sequence {seq:?}: {why}")]
    BadSequence { seq: Vec<i64>, why: String },
    #[error("sequences have lengths {left} and {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("pair is not compatible at the node (a^Y_{j} + a^Z_(r-{j}) = {sum} < d = {d})")]
    Incompatible { j: usize, sum: i64, d: i64 },
    #[error("twist degree for {side} is {deg}, below the threshold {threshold}")]
    BelowThreshold { side: char, deg: i64, threshold: i64 },
    #[error("out of scope: {0}")]
    OutOfScope(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Strata(#[from] StrataError),
}

/// Strictly increasing vanishing orders `a_0 < … < a_r` in `[0, d]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VanishingSeq {
    a: Vec<i64>,
}

impl VanishingSeq {
    pub fn new(a: Vec<i64>, d: i64) -> Result<Self, LimitSeriesError> {
        let bad = |why: &str| LimitSeriesError::BadSequence {
            seq: a.clone(),
            why: why.to_string(),
        };
        if a.is_empty() {
            return Err(bad("empty"));
        }
        if a[0] < 0 {
            return Err(bad("negative order"));
        }
        if a.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("not strictly increasing"));
        }
        if *a.last().unwrap() > d {
            return Err(bad("order exceeds d"));
        }
        Ok(Self { a })
    }

    /// The unramified sequence `0, 1, …, r`.
    pub fn unramified(r: usize) -> Self {
        Self {
            a: (0..=r as i64).collect(),
        }
    }

    /// Vanishing sequence of the ramification sequence `alpha`.
    pub fn from_ramification(alpha: &[i64], d: i64) -> Result<Self, LimitSeriesError> {
        if alpha.windows(2).any(|w| w[0] > w[1]) {
            return Err(LimitSeriesError::BadSequence {
                seq: alpha.to_vec(),
                why: "ramification sequence decreases".into(),
            });
        }
        Self::new(alpha.iter().zip(0..).map(|(x, j)| x + j).collect(), d)
    }

    pub fn orders(&self) -> &[i64] {
        &self.a
    }

    pub fn r(&self) -> usize {
        self.a.len() - 1
    }

    /// `α_j = a_j - j`.
    pub fn ramification(&self) -> Vec<i64> {
        self.a.iter().zip(0..).map(|(x, j)| x - j).collect()
    }

    pub fn weight(&self) -> i64 {
        self.ramification().iter().sum()
    }

    fn count(&self, pred: impl Fn(i64) -> bool) -> i64 {
        self.a.iter().filter(|&&x| pred(x)).count() as i64
    }
}

/// Brill–Noether number `(r+1)(d-r) - r g - Σ α`.
pub fn rho(g: i64, r: i64, d: i64, points: &[VanishingSeq]) -> Result<i64, LimitSeriesError> {
    if r < 0 || d < r || g < 0 {
        return Err(LimitSeriesError::Invalid(format!("need 0 ≤ r ≤ d and g ≥ 0 (g={g}, r={r}, d={d})")));
    }
    let mut total = 0;
    for p in points {
        if p.r() as i64 != r {
            return Err(LimitSeriesError::LengthMismatch {
                left: p.a.len(),
                right: r as usize + 1,
            });
        }
        if p.a.last().copied().unwrap_or(0) > d {
            return Err(LimitSeriesError::BadSequence {
                seq: p.a.clone(),
                why: "order exceeds d".into(),
            });
        }
        total += p.weight();
    }
    Ok((r + 1) * (d - r) - r * g - total)
}

/// Vanishing data of a pair of linear series at the node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EhPair {
    pub r: usize,
    pub d: i64,
    pub a_y: VanishingSeq,
    pub a_z: VanishingSeq,
    pub g_y: i64,
    pub g_z: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum EhClass {
    Incompatible,
    Refined,
    Crude { excess: i64 },
}

impl EhPair {
    pub fn new(d: i64, a_y: VanishingSeq, a_z: VanishingSeq, g_y: i64, g_z: i64) -> Result<Self, LimitSeriesError> {
        if a_y.a.len() != a_z.a.len() {
            return Err(LimitSeriesError::LengthMismatch {
                left: a_y.a.len(),
                right: a_z.a.len(),
            });
        }
        for s in [&a_y, &a_z] {
            if *s.a.last().unwrap() > d {
                return Err(LimitSeriesError::BadSequence {
                    seq: s.a.clone(),
                    why: "order exceeds d".into(),
                });
            }
        }
        if g_y < 0 || g_z < 0 {
            return Err(LimitSeriesError::Invalid("negative genus".into()));
        }
        Ok(Self {
            r: a_y.r(),
            d,
            a_y,
            a_z,
            g_y,
            g_z,
        })
    }

    pub fn g(&self) -> i64 {
        self.g_y + self.g_z
    }

    /// `a^Y_j + a^Z_{r-j} - d` for `j = 0..r`.
    pub fn node_terms(&self) -> Vec<i64> {
        let r = self.r;
        (0..=r).map(|j| self.a_y.a[j] + self.a_z.a[r - j] - self.d).collect()
    }

    pub fn compatible(&self) -> bool {
        self.node_terms().iter().all(|&t| t >= 0)
    }

    pub fn require_compatible(&self) -> Result<(), LimitSeriesError> {
        match self.node_terms().iter().position(|&t| t < 0) {
            None => Ok(()),
            Some(j) => Err(LimitSeriesError::Incompatible {
                j,
                sum: self.node_terms()[j] + self.d,
                d: self.d,
            }),
        }
    }
}

/// `Σ_j (a^Y_j + a^Z_{r-j} - d)`.
pub fn crude_excess(pair: &EhPair) -> i64 {
    pair.node_terms().iter().sum()
}

pub fn eh_classify(pair: &EhPair) -> EhClass {
    if !pair.compatible() {
        EhClass::Incompatible
    } else {
        match crude_excess(pair) {
            0 => EhClass::Refined,
            excess => EhClass::Crude { excess },
        }
    }
}

/// Smallest twist degree accepted for a component of genus `g`.
pub fn twist_threshold(d: i64, g: i64) -> i64 {
    2 * d + g + 1
}

/// Linked-Grassmannian numerics of an Eisenbud–Harris pair.
///
/// Arrays follow [`PairLocusSpec`]: `vbar1`, `vbarn` hold `i = 1..n'`,
/// `img_to_first` holds `i = 2..n'`, `img_to_last` holds `i = 1..n'-1`,
/// `ztilde` holds `i = 2..n'-1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwistDictionary {
    pub n_prime: usize,
    pub r_prime: i64,
    pub deg_dy: i64,
    pub deg_dz: i64,
    pub deg_d: i64,
    pub d_prime: i64,
    pub vbar1: Vec<i64>,
    pub vbarn: Vec<i64>,
    pub img_to_first: Vec<i64>,
    pub img_to_last: Vec<i64>,
    pub ztilde: Vec<i64>,
    pub v1n: i64,
    pub vn1: i64,
    /// `d(g_{0,1}(E_1))`.
    pub first_boundary: i64,
    /// `d(f_{n',n'-1}(E_{n'}))`.
    pub last_boundary: i64,
    pub margin_y: i64,
    pub margin_z: i64,
}

pub fn translate(pair: &EhPair, deg_dy: i64, deg_dz: i64) -> Result<TwistDictionary, LimitSeriesError> {
    let d = pair.d;
    let (ty, tz) = (twist_threshold(d, pair.g_y), twist_threshold(d, pair.g_z));
    if deg_dy < ty {
        return Err(LimitSeriesError::BelowThreshold {
            side: 'Y',
            deg: deg_dy,
            threshold: ty,
        });
    }
    if deg_dz < tz {
        return Err(LimitSeriesError::BelowThreshold {
            side: 'Z',
            deg: deg_dz,
            threshold: tz,
        });
    }
    if d < 1 {
        return Err(LimitSeriesError::Invalid("d must be at least 1".into()));
    }
    let n = (d + 1) as usize;
    let np = n as i64;
    let (ay, az) = (&pair.a_y, &pair.a_z);
    let hy = d + deg_dy + 1 - pair.g_y;
    let hz = d + deg_dz + 1 - pair.g_z;
    let vn1 = ay.count(|x| x <= 0);
    let v1n = az.count(|x| x <= 0);
    Ok(TwistDictionary {
        n_prime: n,
        r_prime: pair.r as i64 + 1,
        deg_dy,
        deg_dz,
        deg_d: deg_dy + deg_dz,
        d_prime: d + deg_dy + deg_dz + 1 - pair.g(),
        vbar1: (1..=np).map(|i| ay.count(|x| x >= i - 1)).collect(),
        vbarn: (1..=np).map(|i| az.count(|x| x >= np - i)).collect(),
        img_to_first: (2..=np).map(|i| hy - i + 1).collect(),
        img_to_last: (1..np).map(|i| hz - (np - i)).collect(),
        ztilde: vec![1; n.saturating_sub(2)],
        v1n,
        vn1,
        first_boundary: hy - 1 + vn1,
        last_boundary: hz - 1 + v1n,
        margin_y: deg_dy - ty,
        margin_z: deg_dz - tz,
    })
}

impl TwistDictionary {
    /// The pair profile, with `d(Z̄_i)` taken as `max(d(Z̄_{1,i}), d(Z̄_{n',i}))`,
    /// the only value allowed once `d(Z̃_i) = 1` (it must contain both
    /// images and embed in `Z̃_i`).
    pub fn profile(&self) -> PairLocusSpec {
        let n = self.n_prime;
        let mut spec = PairLocusSpec {
            n,
            r: self.r_prime,
            vbar1: self.vbar1.clone(),
            vbarn: self.vbarn.clone(),
            v1n: self.v1n,
            vn1: self.vn1,
            zbar: vec![0; n.saturating_sub(2)],
            ztilde: self.ztilde.clone(),
            img_to_first: self.img_to_first.clone(),
            img_to_last: self.img_to_last.clone(),
            ker_f1: self.first_boundary - self.vn1,
            ker_g_last: self.last_boundary - self.v1n,
        };
        for i in 2..n {
            spec.zbar[i - 2] = spec.zbar1(i).max(spec.zbarn(i));
        }
        spec
    }
}

/// Term-by-term record of the crude bound computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrudeIdentity {
    pub excess: i64,
    pub r_prime: i64,
    pub d_prime: i64,
    /// `r'(d' - r')`.
    pub grassmannian_dim: i64,
    /// The first sum of the fiber bound.
    pub graded_sum: i64,
    /// The same sum written per vanishing order, as in the proof.
    pub split_sum: i64,
    pub delta_y: i64,
    pub delta_z: i64,
    pub boundary_terms: i64,
    pub overlap_terms: i64,
    /// The full fiber bound evaluated on the translated profile.
    pub fiber_bound: i64,
    pub holds: bool,
}

/// Recomputes the fiber bound through the dictionary and checks that it
/// collapses to the crude excess.
pub fn verify_crude_identity(pair: &EhPair, deg_dy: i64, deg_dz: i64) -> Result<CrudeIdentity, LimitSeriesError> {
    pair.require_compatible()?;
    let dict = translate(pair, deg_dy, deg_dz)?;
    let spec = dict.profile();
    let n = dict.n_prime;
    let d = pair.d;
    let r = pair.r as i64;
    let excess = crude_excess(pair);
    let hy = d + deg_dy + 1 - pair.g_y;
    let hz = d + deg_dz + 1 - pair.g_z;
    let delta_y = spec.zbar1(1) * (spec.first_ambient(1) - hy);
    let delta_z = spec.zbarn(n) * (spec.last_ambient(n) - hz);
    let split_sum: i64 = (0..=pair.r)
        .map(|j| {
            let j = j as i64;
            (hy - pair.a_y.a[j as usize] - (r + 1 - j)) + (hz - pair.a_z.a[j as usize] - (r + 1 - j))
        })
        .sum();
    let graded_sum = spec.graded_sum();
    let boundary_terms = spec.boundary_terms();
    let overlap_terms = spec.overlap_terms();
    let fiber_bound = fiber_bound_of(&spec, dict.d_prime)?;
    let grassmannian_dim = dict.r_prime * (dict.d_prime - dict.r_prime);
    let holds = graded_sum == grassmannian_dim - excess
        && graded_sum == split_sum + delta_y + delta_z
        && delta_y == 0
        && delta_z == 0
        && boundary_terms == 0
        && overlap_terms == 0
        && fiber_bound == excess;
    Ok(CrudeIdentity {
        excess,
        r_prime: dict.r_prime,
        d_prime: dict.d_prime,
        grassmannian_dim,
        graded_sum,
        split_sum,
        delta_y,
        delta_z,
        boundary_terms,
        overlap_terms,
        fiber_bound,
        holds,
    })
}

/// Upper bound on the dimension of crude limit series over `pair`.
pub fn fiber_bound_eh(pair: &EhPair, deg_dy: i64, deg_dz: i64) -> Result<i64, LimitSeriesError> {
    pair.require_compatible()?;
    translate(pair, deg_dy, deg_dz)?;
    Ok(crude_excess(pair))
}

/// Marked points on the two components plus the node data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducibleCurveData {
    pub pair: EhPair,
    pub points_y: Vec<VanishingSeq>,
    pub points_z: Vec<VanishingSeq>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RhoAdditivity {
    pub rho_x: i64,
    pub rho_y: i64,
    pub rho_z: i64,
    /// `Σ_j (α^Y_j + α^Z_{r-j} - (d - r))` at the node.
    pub node_excess: i64,
    /// The same quantity written with vanishing orders.
    pub crude_excess: i64,
    pub holds: bool,
}

pub fn rho_additivity(data: &ReducibleCurveData) -> Result<RhoAdditivity, LimitSeriesError> {
    let pair = &data.pair;
    let (r, d) = (pair.r as i64, pair.d);
    let mut y_points = data.points_y.clone();
    y_points.push(pair.a_y.clone());
    let mut z_points = data.points_z.clone();
    z_points.push(pair.a_z.clone());
    let marked: Vec<VanishingSeq> = data.points_y.iter().chain(&data.points_z).cloned().collect();
    let rho_y = rho(pair.g_y, r, d, &y_points)?;
    let rho_z = rho(pair.g_z, r, d, &z_points)?;
    let rho_x = rho(pair.g(), r, d, &marked)?;
    let (al_y, al_z) = (pair.a_y.ramification(), pair.a_z.ramification());
    let node_excess: i64 = (0..=pair.r).map(|j| al_y[j] + al_z[pair.r - j] - (d - r)).sum();
    let crude = crude_excess(pair);
    Ok(RhoAdditivity {
        rho_x,
        rho_y,
        rho_z,
        node_excess,
        crude_excess: crude,
        holds: rho_x == rho_y + rho_z + node_excess && node_excess == crude,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Genus0Result {
    pub rho: i64,
    pub nonempty: bool,
    /// The intersection number, when `ρ = 0`.
    pub intersection_number: Option<u128>,
    /// Schubert calculus describes the space only in characteristic zero.
    pub validity: &'static str,
}

/// Non-emptiness of linear series on `P^1` with the given ramification,
/// each point being unramified or of the form `0, 1, …, 1`.
pub fn genus0_nonempty(r: usize, d: i64, points: &[VanishingSeq]) -> Result<Genus0Result, LimitSeriesError> {
    if d < r as i64 {
        return Err(LimitSeriesError::Invalid(format!("d = {d} is below r = {r}")));
    }
    let special: Vec<i64> = std::iter::once(0).chain(std::iter::repeat_n(1, r)).collect();
    let mut count = 0;
    for p in points {
        if p.r() != r {
            return Err(LimitSeriesError::LengthMismatch {
                left: p.a.len(),
                right: r + 1,
            });
        }
        let alpha = p.ramification();
        if alpha == special && r > 0 {
            count += 1;
        } else if alpha.iter().any(|&x| x != 0) {
            return Err(LimitSeriesError::OutOfScope(format!(
                "ramification {alpha:?} is not of the form 0,1,…,1"
            )));
        }
    }
    let rho_value = rho(0, r as i64, d, points)?;
    // In the dual Grassmannian each point imposes the special class σ_r,
    // with Schubert classes in a (d - r) × (r + 1) box.
    let rows = (d - r as i64) as usize;
    let product = pieri::pieri_multiply(rows, r + 1, &vec![r; count]);
    Ok(Genus0Result {
        rho: rho_value,
        nonempty: !product.is_empty(),
        intersection_number: (rho_value == 0).then(|| product.values().sum()),
        validity: "characteristic 0",
    })
}

/// Convenience form of [`genus0_nonempty`] with `k` points of type `0,1,…,1`.
pub fn genus0_special(r: usize, d: i64, k: usize) -> Result<Genus0Result, LimitSeriesError> {
    let mut a: Vec<i64> = vec![0];
    a.extend((2..=r as i64 + 1).take(r));
    let p = VanishingSeq::new(a, d.max(r as i64 + 1))?;
    genus0_nonempty(r, d, &vec![p; k])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Genus1Result {
    pub rho: i64,
    pub nonempty: bool,
    pub dimension: Option<i64>,
    pub diagnostic: String,
}

/// Linear series on a genus-one curve with one marked point of vanishing
/// sequence `a`.
pub fn genus1_case(a: &VanishingSeq, r: usize, d: i64) -> Result<Genus1Result, LimitSeriesError> {
    let rho_value = rho(1, r as i64, d, std::slice::from_ref(a))?;
    if rho_value < 0 {
        return Ok(Genus1Result {
            rho: rho_value,
            nonempty: false,
            dimension: None,
            diagnostic: "ρ < 0".into(),
        });
    }
    let o = a.orders();
    let excluded = r >= 1 && o[r] == d && o[r - 1] == d - 1;
    Ok(Genus1Result {
        rho: rho_value,
        nonempty: !excluded,
        dimension: (!excluded).then_some(rho_value),
        diagnostic: if excluded {
            "a_r = d and a_(r-1) = d-1".into()
        } else {
            "nonempty".into()
        },
    })
}

/// Direct check on a genus-one curve: a complete series of degree `d` has
/// vanishing orders `{0, …, d-1}` at a point, or `{0, …, d-2, d}` when the
/// line bundle is `O(d·p)`; a subseries with sequence `a` exists iff `a`
/// lies in one of these.
pub fn genus1_oracle(a: &VanishingSeq, d: i64) -> bool {
    let o = a.orders();
    o.iter().all(|&x| x < d) || o.iter().all(|&x| x != d - 1 && x <= d)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Genus1Mismatch {
    pub r: usize,
    pub d: i64,
    pub a: Vec<i64>,
    pub formula: bool,
    pub oracle: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Genus1Scan {
    pub r_max: usize,
    pub d_max: i64,
    pub sequences: usize,
    pub excluded: usize,
    pub negative_rho: usize,
    /// Sequences with `ρ < 0` that the direct check nevertheless realizes.
    pub negative_rho_realized: usize,
    pub mismatches: Vec<Genus1Mismatch>,
}

/// Every sequence with `r ≤ r_max`, `r ≤ d ≤ d_max`, compared against
/// [`genus1_oracle`].
pub fn genus1_scan(r_max: usize, d_max: i64) -> Result<Genus1Scan, LimitSeriesError> {
    let mut scan = Genus1Scan {
        r_max,
        d_max,
        sequences: 0,
        excluded: 0,
        negative_rho: 0,
        negative_rho_realized: 0,
        mismatches: Vec::new(),
    };
    for r in 0..=r_max {
        for d in (r as i64).max(1)..=d_max {
            for a in increasing_sequences(r + 1, d) {
                let a = VanishingSeq::new(a, d)?;
                let res = genus1_case(&a, r, d)?;
                let oracle = genus1_oracle(&a, d);
                scan.sequences += 1;
                if res.rho < 0 {
                    scan.negative_rho += 1;
                    scan.negative_rho_realized += usize::from(oracle);
                } else if !res.nonempty {
                    scan.excluded += 1;
                }
                if res.nonempty != oracle {
                    scan.mismatches.push(Genus1Mismatch {
                        r,
                        d,
                        a: a.orders().to_vec(),
                        formula: res.nonempty,
                        oracle,
                    });
                }
            }
        }
    }
    Ok(scan)
}

/// All strictly increasing sequences of length `len` in `[0, d]`, in
/// lexicographic order.
pub fn increasing_sequences(len: usize, d: i64) -> Vec<Vec<i64>> {
    fn go(start: i64, len: usize, d: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for x in start..=d {
            cur.push(x);
            go(x + 1, len, d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, len, d, &mut Vec::with_capacity(len), &mut out);
    out
}

/// `d^Y_i`, `d^Z_i` and their sums for `i = 0..d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GluingProfile {
    pub dy: Vec<i64>,
    pub dz: Vec<i64>,
    pub sums: Vec<i64>,
    /// Indices `i` with `d^Y_i + d^Z_i = r + 2`.
    pub peaks: Vec<i64>,
    /// Every sum is at most `r + 2`, and each peak sits at some `a^Y_j` or
    /// some `d - a^Z_{r-j}`.
    pub profile_condition: bool,
    /// Every node term is `0` except at most one equal to `1`.
    pub codimension_one: bool,
    pub unique_smoothing: bool,
}

pub fn gluing_profile(pair: &EhPair) -> Result<GluingProfile, LimitSeriesError> {
    pair.require_compatible()?;
    let (d, r) = (pair.d, pair.r as i64);
    let dy: Vec<i64> = (0..=d).map(|i| pair.a_y.count(|x| x >= i)).collect();
    let dz: Vec<i64> = (0..=d).map(|i| pair.a_z.count(|x| x >= d - i)).collect();
    let sums: Vec<i64> = dy.iter().zip(&dz).map(|(a, b)| a + b).collect();
    let peaks: Vec<i64> = (0..=d).filter(|&i| sums[i as usize] == r + 2).collect();
    let allowed = |i: i64| pair.a_y.orders().contains(&i) || pair.a_z.orders().iter().any(|&z| d - z == i);
    let profile_condition = sums.iter().all(|&s| s <= r + 2) && peaks.iter().all(|&i| allowed(i));
    let terms = pair.node_terms();
    let codimension_one = terms.iter().all(|&t| t == 0 || t == 1) && terms.iter().filter(|&&t| t == 1).count() <= 1;
    Ok(GluingProfile {
        dy,
        dz,
        sums,
        peaks,
        profile_condition,
        codimension_one,
        unique_smoothing: profile_condition && codimension_one,
    })
}

pub fn unique_smoothing(pair: &EhPair) -> Result<bool, LimitSeriesError> {
    Ok(gluing_profile(pair)?.unique_smoothing)
}

/// The case split for refined pairs: `r + 2` exactly at the `i` with
/// `i = a^Y_j = d - a^Z_{r-j}` for some `j`, else `r + 1`.
pub fn refined_case_split(pair: &EhPair) -> Vec<i64> {
    let (d, r) = (pair.d, pair.r);
    (0..=d)
        .map(|i| {
            let hit = (0..=r).any(|j| pair.a_y.orders()[j] == i && d - pair.a_z.orders()[r - j] == i);
            r as i64 + if hit { 2 } else { 1 }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(a: &[i64], d: i64) -> VanishingSeq {
        VanishingSeq::new(a.to_vec(), d).unwrap()
    }

    fn pair(d: i64, ay: &[i64], az: &[i64]) -> EhPair {
        EhPair::new(d, seq(ay, d), seq(az, d), 0, 0).unwrap()
    }

    #[test]
    fn sequence_validation() {
        assert!(VanishingSeq::new(vec![0, 0], 3).is_err());
        assert!(VanishingSeq::new(vec![1, 4], 3).is_err());
        assert!(VanishingSeq::new(vec![-1, 2], 3).is_err());
        assert_eq!(seq(&[1, 3, 4], 5).ramification(), vec![1, 2, 2]);
        assert_eq!(VanishingSeq::from_ramification(&[0, 1, 1], 4).unwrap().orders(), &[0, 2, 3]);
        assert!(VanishingSeq::from_ramification(&[1, 0], 4).is_err());
    }

    #[test]
    fn rho_values() {
        assert_eq!(rho(0, 1, 2, &[]).unwrap(), 2);
        assert_eq!(rho(0, 1, 3, &[]).unwrap(), 4);
        let p = seq(&[0, 2], 3);
        assert_eq!(rho(0, 1, 3, &vec![p; 4]).unwrap(), 0);
        assert_eq!(rho(0, 2, 2, &[]).unwrap(), 0);
        assert!(rho(0, 1, 3, &[seq(&[0, 1, 2], 3)]).is_err());
    }

    #[test]
    fn classification() {
        assert_eq!(eh_classify(&pair(4, &[1, 3], &[1, 3])), EhClass::Refined);
        let p = pair(4, &[2, 3], &[1, 3]);
        assert_eq!(eh_classify(&p), EhClass::Crude { excess: 1 });
        assert_eq!(crude_excess(&p), 1);
        assert_eq!(eh_classify(&pair(4, &[1], &[2])), EhClass::Incompatible);
    }

    #[test]
    fn dictionary_example() {
        let p = EhPair::new(2, seq(&[0, 2], 2), seq(&[0, 2], 2), 1, 1).unwrap();
        let t = translate(&p, 7, 7).unwrap();
        assert_eq!(t.vbar1, vec![2, 1, 1]);
        assert_eq!(t.vn1, 1);
        assert_eq!(t.d_prime, 15);
        assert_eq!(t.ztilde, vec![1]);
        assert_eq!((t.margin_y, t.margin_z), (1, 1));
        assert!(matches!(translate(&p, 5, 7), Err(LimitSeriesError::BelowThreshold { side: 'Y', .. })));
    }

    #[test]
    fn node_order_positive_means_no_image() {
        let p = pair(3, &[1, 3], &[0, 2]);
        let t = translate(&p, 10, 10).unwrap();
        assert_eq!(t.vn1, 0);
        assert_eq!(t.v1n, 1);
    }

    #[test]
    fn dictionary_filtrations_are_monotone() {
        let p = EhPair::new(6, seq(&[0, 2, 5], 6), seq(&[1, 4, 6], 6), 2, 1).unwrap();
        let t = translate(&p, 20, 20).unwrap();
        assert!(t.vbar1.windows(2).all(|w| w[0] >= w[1]));
        assert!(t.vbarn.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn crude_identity_examples() {
        let refined = EhPair::new(2, seq(&[0, 2], 2), seq(&[0, 2], 2), 1, 1).unwrap();
        let id = verify_crude_identity(&refined, 7, 7).unwrap();
        assert!(id.holds, "{id:?}");
        assert_eq!(id.fiber_bound, 0);
        let crude = pair(4, &[2, 3], &[1, 3]);
        assert_eq!(fiber_bound_eh(&crude, 9, 9).unwrap(), 1);
        assert!(verify_crude_identity(&crude, 9, 9).unwrap().holds);
        assert!(fiber_bound_eh(&pair(4, &[1], &[2]), 9, 9).is_err());
    }

    #[test]
    fn additivity_examples() {
        let refined = ReducibleCurveData {
            pair: EhPair::new(3, seq(&[1, 3], 3), seq(&[0, 2], 3), 1, 1).unwrap(),
            points_y: vec![],
            points_z: vec![seq(&[0, 2], 3)],
        };
        let rep = rho_additivity(&refined).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.rho_x, rep.rho_y + rep.rho_z);
        let crude = ReducibleCurveData {
            pair: EhPair::new(3, seq(&[1, 3], 3), seq(&[1, 2], 3), 1, 1).unwrap(),
            points_y: vec![],
            points_z: vec![],
        };
        let rep = rho_additivity(&crude).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.rho_x, rep.rho_y + rep.rho_z + 1);
    }

    #[test]
    fn genus0_examples() {
        let res = genus0_special(1, 3, 4).unwrap();
        assert!(res.nonempty);
        assert_eq!(res.rho, 0);
        assert_eq!(res.intersection_number, Some(2));
        assert!(!genus0_special(1, 3, 5).unwrap().nonempty);
        let none = genus0_special(2, 4, 0).unwrap();
        assert!(none.nonempty && none.rho == 6);
        let odd = seq(&[1, 2], 3);
        assert!(matches!(genus0_nonempty(1, 3, &[odd]), Err(LimitSeriesError::OutOfScope(_))));
        assert!(genus0_nonempty(1, 3, &[seq(&[0, 1], 3)]).unwrap().nonempty);
    }

    #[test]
    fn genus1_examples() {
        let d = 5;
        let blocked = genus1_case(&seq(&[0, d - 1, d], d), 2, d).unwrap();
        assert_eq!(blocked.rho, 1);
        assert!(!blocked.nonempty);
        let negative = genus1_case(&seq(&[d - 1, d], d), 1, d).unwrap();
        assert!(negative.rho < 0 && !negative.nonempty);
        let open = genus1_case(&seq(&[0, 1], d), 1, d).unwrap();
        assert!(open.nonempty);
        assert_eq!(open.dimension, Some(2 * 4 - 1));
        assert!(genus1_case(&seq(&[d - 2, d], d), 1, d).unwrap().nonempty);
    }

    #[test]
    fn genus1_scan_agrees_with_direct_check() {
        let scan = genus1_scan(2, 6).unwrap();
        assert!(scan.mismatches.is_empty(), "{:?}", scan.mismatches);
        assert!(scan.excluded > 0);
        assert_eq!(scan.negative_rho_realized, 0);
        assert_eq!(increasing_sequences(2, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn gluing_examples() {
        let refined = pair(4, &[1, 3], &[1, 3]);
        let prof = gluing_profile(&refined).unwrap();
        assert!(prof.unique_smoothing);
        assert_eq!(prof.sums, refined_case_split(&refined));
        let bumped = pair(4, &[2, 3], &[1, 3]);
        assert!(unique_smoothing(&bumped).unwrap());
        let concentrated = pair(4, &[2, 4], &[1, 3]);
        let prof = gluing_profile(&concentrated).unwrap();
        assert_eq!(crude_excess(&concentrated), 2);
        assert!(!prof.unique_smoothing);
    }
}
