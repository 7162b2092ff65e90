use std::fmt;

use serde::{Deserialize, Serialize};

use super::{LinalgError, Matrix};
use crate::field::PrimeField;

/// A subspace of `F_p^ambient`, held as the RREF of a basis (no zero rows).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
    pivots: Vec<usize>,
}

impl Subspace {
    /// Row space of `m`, in canonical form.
    pub fn from_matrix(m: &Matrix) -> Self {
        let (basis, pivots) = m.row_reduce();
        Self {
            ambient: m.cols(),
            basis,
            pivots,
        }
    }

    pub fn from_rows(field: PrimeField, ambient: usize, rows: Vec<Vec<u32>>) -> Result<Self, LinalgError> {
        Ok(Self::from_matrix(&Matrix::from_rows(field, ambient, rows)?))
    }

    /// Caller guarantees `basis` is already in RREF without zero rows.
    pub(crate) fn from_rref_unchecked(basis: Matrix, pivots: Vec<usize>) -> Self {
        debug_assert_eq!(basis.row_reduce().1, pivots);
        Self {
            ambient: basis.cols(),
            basis,
            pivots,
        }
    }

    pub fn zero(field: PrimeField, ambient: usize) -> Self {
        Self {
            ambient,
            basis: Matrix::zeros(field, 0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: PrimeField, ambient: usize) -> Self {
        Self {
            ambient,
            basis: Matrix::identity(field, ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Span of the given standard basis vectors (0-based coordinates).
    pub fn coordinate(field: PrimeField, ambient: usize, coords: &[usize]) -> Result<Self, LinalgError> {
        let rows = coords
            .iter()
            .map(|&c| {
                if c >= ambient {
                    return Err(LinalgError::RankTooLarge { r: c + 1, d: ambient });
                }
                let mut v = vec![0; ambient];
                v[c] = 1;
                Ok(v)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(field, ambient, rows)
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.basis.field()
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    #[inline]
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    #[inline]
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.pivots.is_empty()
    }

    /// Coordinates of `v` in the canonical basis, or `None` if `v` is not in
    /// the subspace. For an RREF basis these are the entries of `v` at the
    /// pivot columns.
    pub fn coordinates(&self, v: &[u32]) -> Option<Vec<u32>> {
        if v.len() != self.ambient {
            return None;
        }
        let f = self.field();
        let coords: Vec<u32> = self.pivots.iter().map(|&c| v[c]).collect();
        let mut residual = v.to_vec();
        for (k, &c) in coords.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (slot, &b) in residual.iter_mut().zip(self.basis.row(k)) {
                *slot = f.sub(*slot, f.mul(c, b));
            }
        }
        residual.iter().all(|&x| x == 0).then_some(coords)
    }

    pub fn contains_vector(&self, v: &[u32]) -> bool {
        self.coordinates(v).is_some()
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Subspace) -> bool {
        other.ambient == self.ambient
            && other.field() == self.field()
            && (0..other.dim()).all(|k| self.contains_vector(other.basis.row(k)))
    }

    fn check_compatible(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.field() != other.field() {
            return Err(LinalgError::FieldMismatch {
                left: self.field().p(),
                right: other.field().p(),
            });
        }
        if self.ambient != other.ambient {
            return Err(LinalgError::DimensionMismatch {
                op: "subspace lattice",
                left: self.ambient,
                right: other.ambient,
            });
        }
        Ok(())
    }

    /// Sum and intersection at once, by the Zassenhaus block reduction
    /// `[[A, A], [B, 0]]`.
    pub fn sum_and_intersection(&self, other: &Subspace) -> Result<(Subspace, Subspace), LinalgError> {
        self.check_compatible(other)?;
        let d = self.ambient;
        let f = self.field();
        let rows = self.dim() + other.dim();
        let mut block = Matrix::zeros(f, rows, 2 * d);
        for k in 0..self.dim() {
            for (c, &v) in self.basis.row(k).iter().enumerate() {
                block.set(k, c, v)?;
                block.set(k, d + c, v)?;
            }
        }
        for k in 0..other.dim() {
            for (c, &v) in other.basis.row(k).iter().enumerate() {
                block.set(self.dim() + k, c, v)?;
            }
        }
        let (red, pivots) = block.row_reduce();
        let mut sum_rows = Vec::new();
        let mut cap_rows = Vec::new();
        for (k, &pc) in pivots.iter().enumerate() {
            let row = red.row(k);
            if pc < d {
                sum_rows.push(row[..d].to_vec());
            } else {
                cap_rows.push(row[d..].to_vec());
            }
        }
        Ok((
            Subspace::from_rows(f, d, sum_rows)?,
            Subspace::from_rows(f, d, cap_rows)?,
        ))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_compatible(other)?;
        Ok(Subspace::from_matrix(&self.basis.vstack(&other.basis)?))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        Ok(self.sum_and_intersection(other)?.1)
    }

    /// `{y : y·x = 0 for all x in self}` under the standard dot product.
    pub fn annihilator(&self) -> Subspace {
        if self.is_zero() {
            return Subspace::full(self.field(), self.ambient);
        }
        Subspace::from_matrix(&self.basis.null_space())
    }
}

/// `map(s)`. `map` must have `s.ambient_dim()` columns.
pub fn image(map: &Matrix, s: &Subspace) -> Result<Subspace, LinalgError> {
    if map.cols() != s.ambient_dim() {
        return Err(LinalgError::DimensionMismatch {
            op: "image",
            left: map.cols(),
            right: s.ambient_dim(),
        });
    }
    if s.is_zero() {
        return Ok(Subspace::zero(map.field(), map.rows()));
    }
    // Rows of B * M^T are the images of the basis rows.
    let imgs = s.basis().mul(&map.transpose())?;
    Ok(Subspace::from_matrix(&imgs))
}

/// `map^{-1}(s)`. `map` must have `s.ambient_dim()` rows.
pub fn preimage(map: &Matrix, s: &Subspace) -> Result<Subspace, LinalgError> {
    if map.rows() != s.ambient_dim() {
        return Err(LinalgError::DimensionMismatch {
            op: "preimage",
            left: map.rows(),
            right: s.ambient_dim(),
        });
    }
    let ann = s.annihilator();
    if ann.is_zero() {
        return Ok(Subspace::full(map.field(), map.cols()));
    }
    // x lies in the preimage iff every annihilator row kills map * x.
    Ok(kernel(&ann.basis().mul(map)?))
}

pub fn kernel(map: &Matrix) -> Subspace {
    if map.rows() == 0 {
        return Subspace::full(map.field(), map.cols());
    }
    Subspace::from_matrix(&map.null_space())
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace[F_{}^{}; dim {}]", self.field().p(), self.ambient, self.dim())?;
        f.debug_list().entries((0..self.dim()).map(|r| self.basis.row(r))).finish()
    }
}

/// JSON form `{"p": .., "ambient": .., "rows": [[..], ..]}`; any spanning set
/// is accepted and canonicalised on read.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub p: u32,
    pub ambient: usize,
    pub rows: Vec<Vec<u32>>,
}

impl From<&Subspace> for SubspaceJson {
    fn from(s: &Subspace) -> Self {
        Self {
            p: s.field().p(),
            ambient: s.ambient,
            rows: s.basis.to_rows(),
        }
    }
}

impl TryFrom<SubspaceJson> for Subspace {
    type Error = LinalgError;

    fn try_from(j: SubspaceJson) -> Result<Self, Self::Error> {
        let field = PrimeField::new(j.p)?;
        Subspace::from_rows(field, j.ambient, j.rows)
    }
}

impl Serialize for Subspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SubspaceJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subspace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = SubspaceJson::deserialize(d)?;
        Subspace::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> PrimeField {
        PrimeField::new(2).unwrap()
    }

    fn line(v: Vec<u32>) -> Subspace {
        let n = v.len();
        Subspace::from_rows(f2(), n, vec![v]).unwrap()
    }

    #[test]
    fn distinct_lines_in_plane() {
        let a = line(vec![1, 0]);
        let b = line(vec![1, 1]);
        assert!(a.intersect(&b).unwrap().is_zero());
        assert_eq!(a.sum(&b).unwrap(), Subspace::full(f2(), 2));
    }

    #[test]
    fn equal_inputs() {
        let a = line(vec![1, 1]);
        assert_eq!(a.intersect(&a).unwrap(), a);
        assert_eq!(a.sum(&a).unwrap(), a);
    }

    #[test]
    fn image_of_diagonal_projection() {
        let map = Matrix::diagonal(f2(), &[1, 0]).unwrap();
        assert_eq!(image(&map, &line(vec![1, 1])).unwrap(), line(vec![1, 0]));
    }

    #[test]
    fn kernel_of_zero_map_is_everything() {
        let zero = Matrix::zeros(f2(), 3, 3);
        assert_eq!(kernel(&zero), Subspace::full(f2(), 3));
    }

    #[test]
    fn preimage_of_line_under_projection() {
        let map = Matrix::diagonal(f2(), &[1, 0]).unwrap();
        assert_eq!(preimage(&map, &line(vec![1, 0])).unwrap(), Subspace::full(f2(), 2));
        assert_eq!(preimage(&map, &line(vec![0, 1])).unwrap(), line(vec![0, 1]));
    }

    #[test]
    fn canonical_form_ignores_spanning_set() {
        let f3 = PrimeField::new(3).unwrap();
        let a = Subspace::from_rows(f3, 3, vec![vec![1, 2, 0], vec![0, 1, 1]]).unwrap();
        let b = Subspace::from_rows(f3, 3, vec![vec![1, 0, 1], vec![2, 0, 2], vec![0, 2, 2]]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ambient_mismatch_rejected() {
        let a = line(vec![1, 0]);
        let b = line(vec![1, 0, 0]);
        assert!(matches!(a.sum(&b), Err(LinalgError::DimensionMismatch { .. })));
        assert!(matches!(a.intersect(&b), Err(LinalgError::DimensionMismatch { .. })));
    }

    #[test]
    fn coordinates_in_rref_basis() {
        let f5 = PrimeField::new(5).unwrap();
        let s = Subspace::from_rows(f5, 3, vec![vec![1, 0, 2], vec![0, 1, 3]]).unwrap();
        assert_eq!(s.coordinates(&[2, 4, 1]), Some(vec![2, 4]));
        assert_eq!(s.coordinates(&[1, 1, 1]), None);
    }

    #[test]
    fn json_roundtrip_canonicalises() {
        let j = r#"{"p":3,"ambient":2,"rows":[[2,2],[1,1]]}"#;
        let s: Subspace = serde_json::from_str(j).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"p":3,"ambient":2,"rows":[[1,1]]}"#);
    }
}
