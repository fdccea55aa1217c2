//! Simplicial cones, the cover of `cone(W)` by its invertible column subsets,
//! and integer translations that push a cone inside the intersection of
//! several of its own translates.

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{cap_exceeded, Error, Result};
use crate::linalg::{self, binomial};
use crate::matrix::IntegerMatrix;

pub const DEFAULT_COVER_CAP: u64 = 200_000;

/// `K = cone(v¹,…,vᵐ)` for linearly independent integer vectors.
///
/// Outer facet normals are stored scaled to integers: row `i` is `aⁱ` with
/// `aⁱ·vʲ = 0` for `i ≠ j` and `aⁱ·vⁱ = −|det|`, so `K = {x : aⁱ·x ≤ 0 ∀i}`.
#[derive(Clone, Debug)]
pub struct SimplicialCone {
    columns: Vec<usize>,
    basis: IntegerMatrix,
    det: BigInt,
    normals: IntegerMatrix,
}

impl SimplicialCone {
    /// `columns` records where the basis vectors came from (indices into
    /// the source matrix); it is carried along but not interpreted.
    pub fn new(basis: IntegerMatrix, columns: Vec<usize>) -> Result<Self> {
        let (det, adj) = linalg::adjugate(&basis)?;
        if det.is_zero() {
            return Err(Error::Singular);
        }
        let scale = if det.is_negative() { BigInt::one() } else { -BigInt::one() };
        Ok(SimplicialCone {
            columns,
            normals: adj.scaled(&scale),
            basis,
            det,
        })
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let basis = IntegerMatrix::from_rows(rows);
        let cols = (0..basis.cols()).collect();
        SimplicialCone::new(basis, cols)
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    pub fn basis(&self) -> &IntegerMatrix {
        &self.basis
    }

    pub fn det(&self) -> &BigInt {
        &self.det
    }

    pub fn abs_det(&self) -> BigInt {
        self.det.abs()
    }

    pub fn outer_normals(&self) -> &IntegerMatrix {
        &self.normals
    }

    /// `|det| · basis⁻¹ x`: basis coordinates scaled to integers.
    pub fn scaled_coordinates(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.normals
            .mul_vec(x)
            .expect("dimension")
            .into_iter()
            .map(|v| -v)
            .collect()
    }

    /// Exact basis coordinates of a rational point.
    pub fn coordinates(&self, x: &[BigRational]) -> Vec<BigRational> {
        let d = BigRational::from_integer(self.abs_det());
        (0..self.dim())
            .map(|i| {
                let s: BigRational = self
                    .normals
                    .row(i)
                    .iter()
                    .zip(x)
                    .map(|(a, xi)| BigRational::from_integer(a.clone()) * xi)
                    .sum();
                -s / &d
            })
            .collect()
    }

    /// Membership via nonnegativity of the basis coordinates.
    pub fn contains(&self, x: &[BigRational]) -> bool {
        x.len() == self.dim() && self.coordinates(x).iter().all(|c| !c.is_negative())
    }

    /// Membership via the halfspace description `aⁱ·x ≤ 0`.
    pub fn contains_by_normals(&self, x: &[BigRational]) -> bool {
        x.len() == self.dim()
            && (0..self.dim()).all(|i| {
                let s: BigRational = self
                    .normals
                    .row(i)
                    .iter()
                    .zip(x)
                    .map(|(a, xi)| BigRational::from_integer(a.clone()) * xi)
                    .sum();
                !s.is_positive()
            })
    }

    pub fn contains_int(&self, x: &[BigInt]) -> bool {
        x.len() == self.dim() && self.scaled_coordinates(x).iter().all(|c| !c.is_negative())
    }

    /// Whether `x ∈ K + shift`.
    pub fn contains_shifted(&self, x: &[BigInt], shift: &[BigInt]) -> bool {
        let d: Vec<BigInt> = x.iter().zip(shift).map(|(a, b)| a - b).collect();
        self.contains_int(&d)
    }

    /// `Σ kᵢ vⁱ`.
    pub fn combine(&self, k: &[BigInt]) -> Vec<BigInt> {
        self.basis.mul_vec(k).expect("dimension")
    }

    /// Basis coordinates of an integer vector when they are all integers.
    pub fn integer_coordinates(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let d = self.abs_det();
        self.scaled_coordinates(x)
            .into_iter()
            .map(|v| {
                let (q, r) = v.div_rem(&d);
                r.is_zero().then_some(q)
            })
            .collect()
    }

    fn dot_normal(&self, i: usize, x: &[BigRational]) -> BigRational {
        self.normals
            .row(i)
            .iter()
            .zip(x)
            .map(|(a, xi)| BigRational::from_integer(a.clone()) * xi)
            .sum()
    }

    /// A point of `K ∩ (K + x) ∩ (K + y)`, namely `x + Σ λⱼ rʲ` with
    /// `rʲ := vʲ` and
    /// `λⱼ = max{0, −aʲ·x / aʲ·rʲ}` when `aʲ·(x−y) ≤ 0`,
    /// `λⱼ = max{−aʲ·(x−y) / aʲ·rʲ, −aʲ·x / aʲ·rʲ}` otherwise.
    pub fn two_translate_point(&self, x: &[BigRational], y: &[BigRational]) -> Vec<BigRational> {
        let diff: Vec<BigRational> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        let mut p = x.to_vec();
        for j in 0..self.dim() {
            let vj: Vec<BigRational> = self
                .basis
                .column(j)
                .into_iter()
                .map(BigRational::from_integer)
                .collect();
            let ar = self.dot_normal(j, &vj);
            let from_x = -self.dot_normal(j, x) / &ar;
            let a_diff = self.dot_normal(j, &diff);
            let lambda = if a_diff.is_positive() {
                (-a_diff / &ar).max(from_x)
            } else {
                from_x.max(BigRational::zero())
            };
            for (pi, vi) in p.iter_mut().zip(&vj) {
                *pi += &lambda * vi;
            }
        }
        p
    }

    /// An integer point `z = Σ kᵢ vⁱ` (`kᵢ ≥ 0`) with
    /// `K + z ⊆ K ∩ ⋂ (K + xⁱ)`.
    ///
    /// The two-translate construction is folded over `xs`, keeping a point
    /// `w` with `K + w` inside every translate seen so far, and the basis
    /// coordinates of the final `w` are rounded up.
    pub fn overlap_translate(&self, xs: &[Vec<BigInt>]) -> Result<OverlapShift> {
        let m = self.dim();
        let mut w = vec![BigRational::zero(); m];
        for x in xs {
            if x.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: x.len(),
                });
            }
            let xq: Vec<BigRational> = x.iter().cloned().map(BigRational::from_integer).collect();
            w = self.two_translate_point(&w, &xq);
        }
        let multipliers: Vec<BigInt> = self.coordinates(&w).iter().map(|c| c.ceil().to_integer()).collect();
        let point = self.combine(&multipliers);
        let shift = OverlapShift { point, multipliers };
        if !shift.verify(self, xs) {
            return Err(Error::Invariant("overlap translation failed its containment check".into()));
        }
        Ok(shift)
    }
}

/// Result of [`SimplicialCone::overlap_translate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapShift {
    pub point: Vec<BigInt>,
    /// Nonnegative basis coordinates of `point`.
    pub multipliers: Vec<BigInt>,
}

impl OverlapShift {
    /// Exact check of `z ∈ K` and `z − xⁱ ∈ K` for every `i`, which is
    /// equivalent to `K + z ⊆ K ∩ ⋂ (K + xⁱ)` because `K + K = K`.
    pub fn verify(&self, cone: &SimplicialCone, xs: &[Vec<BigInt>]) -> bool {
        self.multipliers.iter().all(|k| !k.is_negative())
            && cone.contains_int(&self.point)
            && xs.iter().all(|x| cone.contains_shifted(&self.point, x))
    }
}

/// `cone(W)` as the union of `cone(W')` over all invertible `m`-column
/// subsets `W'`, in lexicographic order of column indices.
#[derive(Clone, Debug)]
pub struct ConeCover {
    pub subcones: Vec<SimplicialCone>,
    pub source: IntegerMatrix,
}

impl ConeCover {
    /// Index of the first subcone containing `x`.
    pub fn locate(&self, x: &[BigInt]) -> Option<usize> {
        self.subcones.iter().position(|k| k.contains_int(x))
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.locate(x).is_some()
    }
}

pub fn caratheodory_cover(w: &IntegerMatrix, cap: u64) -> Result<ConeCover> {
    let (m, n) = (w.rows(), w.cols());
    let count = binomial(n as u64, m as u64);
    if count > cap as u128 {
        return Err(cap_exceeded("cone cover subsets", count, cap));
    }
    let mut subcones = Vec::new();
    for cols in (0..n).combinations(m) {
        let basis = w.select_columns(&cols)?;
        if linalg::det(&basis)?.is_zero() {
            continue;
        }
        subcones.push(SimplicialCone::new(basis, cols)?);
    }
    if subcones.is_empty() {
        return Err(Error::RankDeficient);
    }
    Ok(ConeCover {
        subcones,
        source: w.clone(),
    })
}

/// `cone(A) = cone(W)` for `W` a column subset of `A`: every column of `A`
/// must lie in a subcone of the cover of `W`.
pub fn cone_equal(a: &IntegerMatrix, w: &IntegerMatrix, cap: u64) -> Result<bool> {
    Ok(first_uncovered_column(a, w, cap)?.is_none())
}

pub(crate) fn first_uncovered_column(
    a: &IntegerMatrix,
    w: &IntegerMatrix,
    cap: u64,
) -> Result<Option<usize>> {
    if a.rows() != w.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: w.rows(),
        });
    }
    let a_cols = a.columns();
    if let Some(missing) = w.columns().iter().position(|c| !a_cols.contains(c)) {
        return Err(Error::InvalidParameters(format!(
            "column {missing} of W is not a column of A"
        )));
    }
    let cover = caratheodory_cover(w, cap)?;
    Ok(a_cols.iter().position(|c| !cover.contains(c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::int_vec;

    fn qv(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
    }

    #[test]
    fn contains_examples() {
        let orthant = SimplicialCone::from_rows(&[[1, 0], [0, 1]]).unwrap();
        assert!(orthant.contains(&qv(&[2, 5])));
        assert!(!orthant.contains(&qv(&[-1, 0])));
        let k = SimplicialCone::from_rows(&[[1, 1], [0, 2]]).unwrap();
        assert!(k.contains(&qv(&[1, 1])));
        assert_eq!(
            k.coordinates(&qv(&[1, 1])),
            vec![BigRational::new(1.into(), 2.into()); 2]
        );
        assert!(!k.contains(&qv(&[0, 1])));
        assert!(k.contains_by_normals(&qv(&[1, 1])));
    }

    #[test]
    fn normals_are_dual_to_basis() {
        let k = SimplicialCone::from_rows(&[[2, -1, 0], [1, 3, 1], [0, 1, 4]]).unwrap();
        let d = k.abs_det();
        for i in 0..3 {
            for j in 0..3 {
                let dot: BigInt = k
                    .outer_normals()
                    .row(i)
                    .iter()
                    .zip(k.basis().column(j))
                    .map(|(a, v)| a * v)
                    .sum();
                let want = if i == j { -d.clone() } else { BigInt::zero() };
                assert_eq!(dot, want);
            }
        }
    }

    #[test]
    fn cover_examples() {
        let id = caratheodory_cover(&IntegerMatrix::identity(2), 100).unwrap();
        assert_eq!(id.subcones.len(), 1);

        let a = IntegerMatrix::from_rows(&[[1, 0, 0, 0], [0, 3, 2, -6]]);
        let c = caratheodory_cover(&a, 100).unwrap();
        let cols: Vec<Vec<usize>> = c.subcones.iter().map(|k| k.columns().to_vec()).collect();
        assert_eq!(cols, vec![vec![0, 1], vec![0, 2], vec![0, 3]]);

        let at = IntegerMatrix::from_rows(&[[3, 2, -6]]);
        assert_eq!(caratheodory_cover(&at, 100).unwrap().subcones.len(), 3);
        assert!(caratheodory_cover(&a, 2).is_err());
    }

    #[test]
    fn cone_equal_examples() {
        let a = IntegerMatrix::from_rows(&[[1, 0, 1], [0, 1, 1]]);
        assert!(cone_equal(&a, &a, 100).unwrap());
        let w = a.select_columns(&[0, 1]).unwrap();
        assert!(cone_equal(&a, &w, 100).unwrap());
        let b = IntegerMatrix::from_rows(&[[1, 0, -1], [0, 1, 0]]);
        let w = b.select_columns(&[0, 1]).unwrap();
        assert!(!cone_equal(&b, &w, 100).unwrap());
    }

    #[test]
    fn overlap_examples() {
        let orthant = SimplicialCone::from_rows(&[[1, 0], [0, 1]]).unwrap();
        let z = orthant
            .overlap_translate(&[int_vec(&[-1, 0]), int_vec(&[0, -1])])
            .unwrap();
        assert_eq!(z.point, int_vec(&[0, 0]));
        let z = orthant
            .overlap_translate(&[int_vec(&[1, -1]), int_vec(&[-1, 1])])
            .unwrap();
        assert_eq!(z.point, int_vec(&[1, 1]));
        let z = orthant.overlap_translate(&[]).unwrap();
        assert_eq!(z.point, int_vec(&[0, 0]));
    }
}
