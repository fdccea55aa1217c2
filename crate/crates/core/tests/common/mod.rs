//! Fixtures shared by the integration test targets.
#![allow(dead_code)]

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sparsebound::linalg;
use sparsebound::matrix::IntegerMatrix;
use sparsebound::solver::{build_plan, Mode, PlanConfig};

pub const SUITE_SEED: u64 = 0x5EED_0001;

/// Largest `|det|` of an `m × m` submatrix accepted into the random suite.
pub fn det_cap(m: usize) -> i64 {
    match m {
        1 => 5,
        2 => 40,
        _ => 60,
    }
}

/// Determinant by cofactor expansion, independent of the library's
/// elimination code.
pub fn cofactor_det(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    if n == 1 {
        return rows[0][0].clone();
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<BigInt>> = rows[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| v.clone()).collect())
                .collect();
            let term = &rows[0][j] * cofactor_det(&minor);
            if j % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum()
}

/// All `m × m` minors of `a`, by cofactor expansion.
pub fn all_minors(a: &IntegerMatrix) -> Vec<BigInt> {
    let m = a.rows();
    (0..a.cols())
        .combinations(m)
        .map(|cols| {
            let rows: Vec<Vec<BigInt>> = (0..m)
                .map(|i| cols.iter().map(|&j| a.get(i, j).clone()).collect())
                .collect();
            cofactor_det(&rows)
        })
        .collect()
}

fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> IntegerMatrix {
    let rows: Vec<Vec<i64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(-5..=5)).collect())
        .collect();
    IntegerMatrix::from_rows(&rows)
}

fn acceptable(a: &IntegerMatrix) -> bool {
    let m = a.rows();
    if a.columns().iter().any(|c| c.iter().all(Zero::is_zero)) {
        return false;
    }
    if linalg::rank(a) < m {
        return false;
    }
    let cap = BigInt::from(det_cap(m));
    if all_minors(a).iter().any(|d| d.abs() > cap) {
        return false;
    }
    [Mode::I, Mode::II]
        .iter()
        .all(|&mode| build_plan(a, None, mode, &PlanConfig::default()).is_ok())
}

/// The random certificate suite: 10 matrices with one row, 10 with two and
/// 5 with three, entries in `[−5, 5]`, at most 6 columns, plus two matrices
/// with all entries doubled so that the column lattice is proper.
pub fn random_suite() -> Vec<IntegerMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    let mut out = Vec::new();
    for (m, count, n_range) in [(1usize, 10usize, 2..=4usize), (2, 10, 3..=5), (3, 5, 4..=5)] {
        let mut found = 0;
        while found < count {
            let n = rng.gen_range(n_range.clone());
            let a = random_matrix(&mut rng, m, n);
            if acceptable(&a) {
                out.push(a);
                found += 1;
            }
        }
    }
    let two = BigInt::from(2);
    let first_1 = out.iter().find(|a| a.rows() == 1).unwrap().scaled(&two);
    let first_2 = out.iter().find(|a| a.rows() == 2).unwrap().scaled(&two);
    out.push(first_1);
    out.push(first_2);
    out
}

/// All integer points of `{−t,…,t}^m`.
pub fn box_points(t: i64, m: usize) -> Vec<Vec<BigInt>> {
    (0..m)
        .map(|_| -t..=t)
        .multi_cartesian_product()
        .map(|p| p.into_iter().map(BigInt::from).collect())
        .collect()
}

/// `x = basis · λ` solved with rationals by Cramer's rule on cofactor
/// determinants; used as an independent cone-membership check.
pub fn cramer_coordinates(basis: &IntegerMatrix, x: &[BigRational]) -> Vec<BigRational> {
    let m = basis.rows();
    let d = cofactor_det(&basis.to_rows());
    assert!(!d.is_zero());
    let den = BigRational::from_integer(d);
    (0..m)
        .map(|j| {
            // Replace column j by x, scaled to clear denominators.
            let lcm = x.iter().fold(BigInt::one(), |l, v| num_integer::Integer::lcm(&l, v.denom()));
            let rows: Vec<Vec<BigInt>> = (0..m)
                .map(|i| {
                    (0..m)
                        .map(|k| {
                            if k == j {
                                (&x[i] * BigRational::from_integer(lcm.clone())).to_integer()
                            } else {
                                basis.get(i, k).clone()
                            }
                        })
                        .collect()
                })
                .collect();
            BigRational::from_integer(cofactor_det(&rows)) / &den / BigRational::from_integer(lcm)
        })
        .collect()
}

pub fn in_cone_independent(basis: &IntegerMatrix, x: &[BigInt]) -> bool {
    let xq: Vec<BigRational> = x.iter().cloned().map(BigRational::from_integer).collect();
    cramer_coordinates(basis, &xq).iter().all(|c| !c.is_negative())
}
