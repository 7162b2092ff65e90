//! Deterministic enumeration of Grassmannian points over F_p.
//!
//! Each `r`-dimensional subspace of `F_p^d` has a unique RREF basis, fixed by
//! its pivot columns and the entries in the free positions (to the right of
//! each pivot, outside the other pivot columns). Enumeration walks pivot
//! patterns in lexicographic order and, within a pattern, the free entries as
//! a mixed-radix counter with the last position fastest.

use super::{LinalgError, Matrix, Subspace};
use crate::field::PrimeField;

/// Number of `r`-dimensional subspaces of `F_q^d` (the Gaussian binomial
/// coefficient evaluated at `q`).
pub fn gaussian_binomial(d: usize, r: usize, q: u64) -> Result<u128, LinalgError> {
    if r > d {
        return Err(LinalgError::RankTooLarge { r, d });
    }
    let q = q as u128;
    let pow = |e: usize| -> Result<u128, LinalgError> {
        let mut acc: u128 = 1;
        for _ in 0..e {
            acc = acc.checked_mul(q).ok_or(LinalgError::Overflow)?;
        }
        Ok(acc)
    };
    // [d, i+1]_q = [d, i]_q * (q^{d-i} - 1) / (q^{i+1} - 1); every partial
    // result is itself a Gaussian binomial, so the division is exact.
    let mut acc: u128 = 1;
    for i in 0..r {
        let num = pow(d - i)? - 1;
        let den = pow(i + 1)? - 1;
        acc = acc.checked_mul(num).ok_or(LinalgError::Overflow)? / den;
    }
    Ok(acc)
}

/// Lexicographic iterator over `r`-subsets of `0..d`.
#[derive(Debug, Clone)]
pub struct PatternIter {
    d: usize,
    current: Option<Vec<usize>>,
}

pub fn pivot_patterns(d: usize, r: usize) -> PatternIter {
    PatternIter {
        d,
        current: (r <= d).then(|| (0..r).collect()),
    }
}

impl Iterator for PatternIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Self::Item> {
        let out = self.current.take()?;
        let r = out.len();
        let mut next = out.clone();
        let mut k = r;
        while k > 0 {
            k -= 1;
            if next[k] < self.d - r + k {
                next[k] += 1;
                for j in k + 1..r {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                return Some(out);
            }
        }
        Some(out)
    }
}

/// Iterator over all `r`-dimensional subspaces of `F_p^d`.
#[derive(Debug, Clone)]
pub struct SubspaceIter {
    field: PrimeField,
    d: usize,
    patterns: PatternIter,
    pivots: Vec<usize>,
    free: Vec<(usize, usize)>,
    counter: Vec<u32>,
    exhausted: bool,
}

impl SubspaceIter {
    /// Restricts the iteration to subspaces with exactly the given pivot
    /// columns, for partitioned (parallel) enumeration.
    pub fn with_pattern(field: PrimeField, d: usize, pivots: Vec<usize>) -> Self {
        let mut it = Self {
            field,
            d,
            patterns: PatternIter { d, current: None },
            pivots: Vec::new(),
            free: Vec::new(),
            counter: Vec::new(),
            exhausted: true,
        };
        it.load(pivots);
        it
    }

    fn load(&mut self, pivots: Vec<usize>) {
        self.free = pivots
            .iter()
            .enumerate()
            .flat_map(|(row, &pc)| {
                let pivots = &pivots;
                (pc + 1..self.d)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (row, c))
            })
            .collect();
        self.counter = vec![0; self.free.len()];
        self.pivots = pivots;
        self.exhausted = false;
    }

    fn build(&self) -> Subspace {
        let r = self.pivots.len();
        let mut data = vec![0u32; r * self.d];
        for (row, &pc) in self.pivots.iter().enumerate() {
            data[row * self.d + pc] = 1;
        }
        for (&(row, c), &v) in self.free.iter().zip(&self.counter) {
            data[row * self.d + c] = v;
        }
        Subspace::from_rref_unchecked(Matrix::from_raw(self.field, r, self.d, data), self.pivots.clone())
    }

    fn advance(&mut self) -> bool {
        let p = self.field.p();
        for slot in self.counter.iter_mut().rev() {
            *slot += 1;
            if *slot < p {
                return true;
            }
            *slot = 0;
        }
        false
    }
}

impl Iterator for SubspaceIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        if self.exhausted {
            let pivots = self.patterns.next()?;
            self.load(pivots);
        }
        let out = self.build();
        if !self.advance() {
            self.exhausted = true;
        }
        Some(out)
    }
}

/// All `r`-dimensional subspaces of `F_p^d`, each exactly once.
pub fn enumerate_subspaces(field: PrimeField, d: usize, r: usize) -> Result<SubspaceIter, LinalgError> {
    if r > d {
        return Err(LinalgError::RankTooLarge { r, d });
    }
    Ok(SubspaceIter {
        field,
        d,
        patterns: pivot_patterns(d, r),
        pivots: Vec::new(),
        free: Vec::new(),
        counter: Vec::new(),
        exhausted: true,
    })
}

/// All `r`-dimensional `V` with `lower ⊆ V ⊆ upper`.
///
/// A complement `C` of `lower` inside `upper` is fixed once; the subspaces
/// between the two are in bijection with the `(r - dim lower)`-dimensional
/// subspaces of `C`.
pub fn enumerate_between(
    lower: &Subspace,
    upper: &Subspace,
    r: usize,
) -> Result<impl Iterator<Item = Subspace>, LinalgError> {
    if !upper.contains(lower) {
        return Err(LinalgError::NotContained);
    }
    let field = lower.field();
    let d = lower.ambient_dim();
    let mut span = lower.clone();
    let mut complement = Vec::new();
    for k in 0..upper.dim() {
        let v = upper.basis().row(k);
        if !span.contains_vector(v) {
            complement.push(v.to_vec());
            span = Subspace::from_matrix(&span.basis().vstack(&Matrix::from_raw(field, 1, d, v.to_vec()))?);
        }
    }
    let m = complement.len();
    let k = lower.dim();
    let inner_rank = r.checked_sub(k);
    let complement = Matrix::from_rows(field, d, complement)?;
    let lower_basis = lower.basis().clone();
    let inner = match inner_rank {
        Some(ir) if ir <= m => Some(enumerate_subspaces(field, m, ir)?),
        _ => None,
    };
    Ok(inner.into_iter().flatten().map(move |s| {
        let lifted = s.basis().mul(&complement).expect("complement width matches");
        let stacked = lower_basis.vstack(&lifted).expect("same ambient");
        Subspace::from_matrix(&stacked)
    }))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn lines_in_f2_squared() {
        let all: Vec<_> = enumerate_subspaces(f(2), 2, 1).unwrap().collect();
        let expected = vec![
            Subspace::from_rows(f(2), 2, vec![vec![1, 0]]).unwrap(),
            Subspace::from_rows(f(2), 2, vec![vec![1, 1]]).unwrap(),
            Subspace::from_rows(f(2), 2, vec![vec![0, 1]]).unwrap(),
        ];
        assert_eq!(all, expected);
        assert_eq!(gaussian_binomial(2, 1, 2).unwrap(), 3);
    }

    #[test]
    fn planes_in_f2_fourth() {
        let all: BTreeSet<_> = enumerate_subspaces(f(2), 4, 2).unwrap().collect();
        assert_eq!(all.len(), 35);
        assert_eq!(gaussian_binomial(4, 2, 2).unwrap(), 35);
    }

    #[test]
    fn rank_zero_is_the_zero_subspace() {
        let all: Vec<_> = enumerate_subspaces(f(3), 4, 0).unwrap().collect();
        assert_eq!(all, vec![Subspace::zero(f(3), 4)]);
        assert_eq!(gaussian_binomial(4, 0, 3).unwrap(), 1);
    }

    #[test]
    fn rank_above_ambient_rejected() {
        assert!(matches!(enumerate_subspaces(f(2), 2, 3), Err(LinalgError::RankTooLarge { .. })));
        assert!(gaussian_binomial(2, 3, 2).is_err());
    }

    #[test]
    fn pattern_partition_covers_everything() {
        let whole: Vec<_> = enumerate_subspaces(f(3), 4, 2).unwrap().collect();
        let parts: Vec<_> = pivot_patterns(4, 2)
            .flat_map(|pat| SubspaceIter::with_pattern(f(3), 4, pat))
            .collect();
        assert_eq!(whole, parts);
    }

    #[test]
    fn between_matches_filtered_enumeration() {
        let field = f(3);
        let lower = Subspace::from_rows(field, 4, vec![vec![1, 2, 0, 1]]).unwrap();
        let upper = Subspace::from_rows(field, 4, vec![vec![1, 2, 0, 1], vec![0, 1, 1, 0], vec![0, 0, 0, 1]]).unwrap();
        let got: BTreeSet<_> = enumerate_between(&lower, &upper, 2).unwrap().collect();
        let want: BTreeSet<_> = enumerate_subspaces(field, 4, 2)
            .unwrap()
            .filter(|v| v.contains(&lower) && upper.contains(v))
            .collect();
        assert_eq!(got, want);
        assert_eq!(got.len() as u128, gaussian_binomial(2, 1, 3).unwrap());
    }
}
