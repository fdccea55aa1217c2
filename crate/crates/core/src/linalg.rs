//! Exact integer and rational linear algebra.
//!
//! Everything here works over [`BigInt`]/[`BigRational`]; there is no floating
//! point anywhere. Determinants use fraction-free (Bareiss) elimination,
//! lattices are represented by their column Hermite normal form, and the
//! residue groups of `residue` are built on the Smith normal form below.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{cap_exceeded, Error, Result};
use crate::matrix::IntegerMatrix;

/// Exact determinant by Bareiss elimination.
pub fn det(m: &IntegerMatrix) -> Result<BigInt> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut a = m.to_rows();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    negate = !negate;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if negate { -d } else { d })
}

pub fn rank(m: &IntegerMatrix) -> usize {
    let mut a = m.to_rows();
    let (rows, cols) = (m.rows(), m.cols());
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        for i in r + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let (piv, lead) = (a[r][c].clone(), a[i][c].clone());
            for j in c..cols {
                let v = &a[i][j] * &piv - &lead * &a[r][j];
                a[i][j] = v;
            }
            let g = a[i].iter().fold(BigInt::zero(), |g, v| g.gcd(v));
            if !g.is_zero() && !g.is_one() {
                for v in a[i].iter_mut() {
                    *v = &*v / &g;
                }
            }
        }
        r += 1;
    }
    r
}

/// Adjugate and determinant of a square matrix: `m · adj = det · I`.
pub fn adjugate(m: &IntegerMatrix) -> Result<(BigInt, IntegerMatrix)> {
    let d = det(m)?;
    let n = m.rows();
    if d.is_zero() {
        // Cofactor expansion keeps the singular case exact.
        let mut adj = IntegerMatrix::zeros(n, n);
        if n == 1 {
            adj.set(0, 0, BigInt::one());
            return Ok((d, adj));
        }
        for i in 0..n {
            for j in 0..n {
                let minor_rows: Vec<Vec<BigInt>> = (0..n)
                    .filter(|&r| r != j)
                    .map(|r| {
                        (0..n)
                            .filter(|&c| c != i)
                            .map(|c| m.get(r, c).clone())
                            .collect()
                    })
                    .collect();
                let flat = minor_rows.into_iter().flatten().collect();
                let minor = IntegerMatrix::new(n - 1, n - 1, flat)?;
                let c = det(&minor)?;
                adj.set(i, j, if (i + j) % 2 == 0 { c } else { -c });
            }
        }
        return Ok((d, adj));
    }
    let inv = inverse_rational(m)?.ok_or(Error::Singular)?;
    let mut adj = IntegerMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = &inv[i][j] * BigRational::from_integer(d.clone());
            debug_assert!(v.is_integer());
            adj.set(i, j, v.to_integer());
        }
    }
    Ok((d, adj))
}

fn inverse_rational(m: &IntegerMatrix) -> Result<Option<Vec<Vec<BigRational>>>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..2 * n)
                .map(|j| {
                    if j < n {
                        BigRational::from_integer(m.get(i, j).clone())
                    } else if j - n == i {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Ok(None);
        };
        a.swap(p, c);
        let piv = a[c][c].clone();
        for v in a[c].iter_mut() {
            *v = &*v / &piv;
        }
        for i in 0..n {
            if i == c || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in 0..2 * n {
                let v = &a[i][j] - &f * &a[c][j];
                a[i][j] = v;
            }
        }
    }
    Ok(Some(a.into_iter().map(|r| r[n..].to_vec()).collect()))
}

/// Exact rational solution of `m x = b`. For non-square or singular systems
/// a particular solution (free variables set to zero) is returned when the
/// system is consistent.
pub fn solve_rational(m: &IntegerMatrix, b: &[BigInt]) -> Option<Vec<BigRational>> {
    if b.len() != m.rows() {
        return None;
    }
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| {
            m.row(i)
                .iter()
                .chain(std::iter::once(&b[i]))
                .map(|v| BigRational::from_integer(v.clone()))
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        let piv = a[r][c].clone();
        for v in a[r].iter_mut() {
            *v = &*v / &piv;
        }
        for i in 0..rows {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in c..=cols {
                let v = &a[i][j] - &f * &a[r][j];
                a[i][j] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if a[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = a[i][cols].clone();
    }
    Some(x)
}

/// Column Hermite normal form `h = original · u` with `u` unimodular.
#[derive(Clone, Debug)]
pub struct HnfResult {
    pub h: IntegerMatrix,
    pub u: IntegerMatrix,
    /// `(row, column)` of each pivot; pivot columns are `0..rank`.
    pub pivots: Vec<(usize, usize)>,
}

impl HnfResult {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Column-style Hermite normal form.
///
/// The result is lower echelon: column `k` has its first nonzero entry (the
/// positive pivot) in row `pivots[k].0`, pivot rows strictly increase, the
/// trailing `cols - rank` columns are zero, and every entry to the left of a
/// pivot in its row lies in `[0, pivot)`. That makes `h` canonical for the
/// column lattice.
pub fn hnf(m: &IntegerMatrix) -> HnfResult {
    let (rows, cols) = (m.rows(), m.cols());
    let mut h = m.columns();
    let mut u = IntegerMatrix::identity(cols).columns();
    let mut pivots = Vec::new();
    let mut c = 0;

    for i in 0..rows {
        if c == cols {
            break;
        }
        for j in c + 1..cols {
            if h[j][i].is_zero() {
                continue;
            }
            if h[c][i].is_zero() {
                h.swap(c, j);
                u.swap(c, j);
                continue;
            }
            let (a, b) = (h[c][i].clone(), h[j][i].clone());
            let eg = a.extended_gcd(&b);
            let (ag, bg) = (&a / &eg.gcd, &b / &eg.gcd);
            combine_columns(&mut h, c, j, &eg.x, &eg.y, &bg, &ag);
            combine_columns(&mut u, c, j, &eg.x, &eg.y, &bg, &ag);
        }
        if h[c][i].is_zero() {
            continue;
        }
        if h[c][i].is_negative() {
            negate(&mut h[c]);
            negate(&mut u[c]);
        }
        let p = h[c][i].clone();
        for k in 0..c {
            let q = h[k][i].div_floor(&p);
            if q.is_zero() {
                continue;
            }
            axpy_column(&mut h, k, c, &q);
            axpy_column(&mut u, k, c, &q);
        }
        pivots.push((i, c));
        c += 1;
    }

    HnfResult {
        h: IntegerMatrix::from_columns(rows, &h).expect("shape preserved"),
        u: IntegerMatrix::from_columns(cols, &u).expect("shape preserved"),
        pivots,
    }
}

// (col_c, col_j) <- (s col_c + t col_j, -bg col_c + ag col_j)
fn combine_columns(
    cols: &mut [Vec<BigInt>],
    c: usize,
    j: usize,
    s: &BigInt,
    t: &BigInt,
    bg: &BigInt,
    ag: &BigInt,
) {
    for r in 0..cols[c].len() {
        let (x, y) = (cols[c][r].clone(), cols[j][r].clone());
        cols[c][r] = s * &x + t * &y;
        cols[j][r] = ag * &y - bg * &x;
    }
}

// col_k -= q col_c
fn axpy_column(cols: &mut [Vec<BigInt>], k: usize, c: usize, q: &BigInt) {
    for r in 0..cols[k].len() {
        let v = &cols[k][r] - q * &cols[c][r];
        cols[k][r] = v;
    }
}

fn negate(v: &mut [BigInt]) {
    for x in v.iter_mut() {
        *x = -&*x;
    }
}

/// A lattice in `Z^m`, stored as the nonzero columns of its column HNF.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    dim: usize,
    basis: Vec<Vec<BigInt>>,
    pivot_rows: Vec<usize>,
}

impl Lattice {
    pub fn from_generators(dim: usize, generators: &[Vec<BigInt>]) -> Result<Self> {
        if generators.is_empty() {
            return Ok(Lattice {
                dim,
                basis: Vec::new(),
                pivot_rows: Vec::new(),
            });
        }
        let m = IntegerMatrix::from_columns(dim, generators)?;
        Ok(Lattice::from_matrix(&m))
    }

    pub fn from_matrix(m: &IntegerMatrix) -> Self {
        let res = hnf(m);
        let basis = (0..res.rank()).map(|j| res.h.column(j)).collect();
        Lattice {
            dim: m.rows(),
            basis,
            pivot_rows: res.pivots.iter().map(|p| p.0).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim
    }

    /// Canonical (HNF) basis vectors.
    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    /// Index `[Z^m : Λ]` for a full-rank lattice (product of the pivots).
    pub fn index(&self) -> Option<BigInt> {
        self.is_full_rank().then(|| {
            self.basis
                .iter()
                .zip(&self.pivot_rows)
                .map(|(col, &r)| col[r].clone())
                .product()
        })
    }

    /// Coordinates of `b` in the HNF basis, or `None` when `b ∉ Λ`.
    pub fn coordinates(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        if b.len() != self.dim {
            return None;
        }
        let mut y: Vec<BigInt> = Vec::with_capacity(self.basis.len());
        let mut next = 0;
        for (i, bi) in b.iter().enumerate() {
            let s: BigInt = y
                .iter()
                .enumerate()
                .map(|(k, yk)| yk * &self.basis[k][i])
                .sum();
            if next < self.pivot_rows.len() && self.pivot_rows[next] == i {
                let (q, r) = (bi - &s).div_rem(&self.basis[next][i]);
                if !r.is_zero() {
                    return None;
                }
                y.push(q);
                next += 1;
            } else if *bi != s {
                return None;
            }
        }
        Some(y)
    }

    pub fn contains(&self, b: &[BigInt]) -> bool {
        self.coordinates(b).is_some()
    }
}

/// All integer solutions of `m x = b`: `particular + kernel · Z^k`.
#[derive(Clone, Debug)]
pub struct IntegerSolutions {
    pub particular: Vec<BigInt>,
    pub kernel: Vec<Vec<BigInt>>,
}

/// Reusable integer parametrization of `{x ∈ Z^n : m x = b}` for varying `b`.
#[derive(Clone, Debug)]
pub struct IntegerSystem {
    rows: usize,
    lattice: Lattice,
    image_part: Vec<Vec<BigInt>>,
    kernel: Vec<Vec<BigInt>>,
}

impl IntegerSystem {
    pub fn new(m: &IntegerMatrix) -> Self {
        let res = hnf(m);
        let r = res.rank();
        let ucols = res.u.columns();
        IntegerSystem {
            rows: m.rows(),
            lattice: Lattice {
                dim: m.rows(),
                basis: (0..r).map(|j| res.h.column(j)).collect(),
                pivot_rows: res.pivots.iter().map(|p| p.0).collect(),
            },
            image_part: ucols[..r].to_vec(),
            kernel: ucols[r..].to_vec(),
        }
    }

    pub fn kernel(&self) -> &[Vec<BigInt>] {
        &self.kernel
    }

    pub fn image_lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// A particular integer solution, or `None` when `b` is outside the
    /// column lattice.
    pub fn particular(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        if b.len() != self.rows {
            return None;
        }
        let y = self.lattice.coordinates(b)?;
        let n = self
            .image_part
            .first()
            .or(self.kernel.first())
            .map(|c| c.len())
            .unwrap_or(0);
        let mut x = vec![BigInt::zero(); n];
        for (yk, col) in y.iter().zip(&self.image_part) {
            for (xi, ci) in x.iter_mut().zip(col) {
                *xi += yk * ci;
            }
        }
        Some(x)
    }
}

pub fn solve_integer(m: &IntegerMatrix, b: &[BigInt]) -> Option<IntegerSolutions> {
    let sys = IntegerSystem::new(m);
    let particular = sys.particular(b)?;
    Some(IntegerSolutions {
        particular,
        kernel: sys.kernel,
    })
}

/// Smith normal form data: `left · m · right = diag(diagonal)` with unimodular
/// `left`. Only the left transform is kept.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    pub left: IntegerMatrix,
}

/// Smith normal form of an invertible square matrix.
pub fn smith(m: &IntegerMatrix) -> Result<SmithForm> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut a = m.to_rows();
    let mut left = IntegerMatrix::identity(n).to_rows();

    for k in 0..n {
        loop {
            let Some((pi, pj)) = (k..n)
                .cartesian_product(k..n)
                .filter(|&(i, j)| !a[i][j].is_zero())
                .min_by(|&(i, j), &(p, q)| a[i][j].abs().cmp(&a[p][q].abs()))
            else {
                return Err(Error::Singular);
            };
            a.swap(pi, k);
            left.swap(pi, k);
            for row in a.iter_mut() {
                row.swap(pj, k);
            }

            let mut clean = true;
            for i in k + 1..n {
                let q = &a[i][k] / &a[k][k];
                if !q.is_zero() {
                    for j in 0..n {
                        let v = &a[i][j] - &q * &a[k][j];
                        a[i][j] = v;
                        let w = &left[i][j] - &q * &left[k][j];
                        left[i][j] = w;
                    }
                }
                clean &= a[i][k].is_zero();
            }
            for j in k + 1..n {
                let q = &a[k][j] / &a[k][k];
                if !q.is_zero() {
                    for row in a.iter_mut() {
                        let v = &row[j] - &q * &row[k];
                        row[j] = v;
                    }
                }
                clean &= a[k][j].is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (k + 1..n)
                .cartesian_product(k + 1..n)
                .find(|&(i, j)| !(&a[i][j] % &a[k][k]).is_zero());
            match bad {
                Some((i, _)) => {
                    for j in 0..n {
                        let v = &a[k][j] + &a[i][j];
                        a[k][j] = v;
                        let w = &left[k][j] + &left[i][j];
                        left[k][j] = w;
                    }
                }
                None => break,
            }
        }
        if a[k][k].is_negative() {
            negate(&mut a[k]);
            negate(&mut left[k]);
        }
    }

    let flat = left.into_iter().flatten().collect();
    Ok(SmithForm {
        diagonal: (0..n).map(|k| a[k][k].clone()).collect(),
        left: IntegerMatrix::new(n, n, flat)?,
    })
}

/// Configuration for prime factorization.
#[derive(Clone, Debug)]
pub struct FactorConfig {
    /// Trial division by every candidate below this bound is always done.
    pub small_bound: u64,
    /// A cofactor left after the small pass that still needs trial division
    /// must not exceed this ceiling.
    pub ceiling: BigInt,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            small_bound: 1 << 16,
            ceiling: BigInt::from(1_000_000_000u64),
        }
    }
}

/// Prime factorization `n = Π p^e` by trial division.
pub fn factorize(n: &BigInt, cfg: &FactorConfig) -> Result<BTreeMap<BigInt, u32>> {
    if !n.is_positive() {
        return Err(Error::NonPositive(n.clone()));
    }
    let mut rem = n.clone();
    let mut out = BTreeMap::new();
    let pull = |rem: &mut BigInt, d: &BigInt, out: &mut BTreeMap<BigInt, u32>| {
        while (&*rem % d).is_zero() {
            *rem = &*rem / d;
            *out.entry(d.clone()).or_insert(0) += 1;
        }
    };

    let mut d = BigInt::from(2u32);
    let small = BigInt::from(cfg.small_bound);
    let mut checked_ceiling = false;
    loop {
        if &d * &d > rem {
            break;
        }
        if d >= small && !checked_ceiling {
            if rem > cfg.ceiling {
                return Err(Error::FactorizationIncomplete(rem));
            }
            checked_ceiling = true;
        }
        pull(&mut rem, &d, &mut out);
        d += if d == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    if rem > BigInt::one() {
        *out.entry(rem).or_insert(0) += 1;
    }
    Ok(out)
}

/// Number of prime factors counted with multiplicity; `omega(1) = 0`.
pub fn omega(n: &BigInt) -> Result<u32> {
    omega_with(n, &FactorConfig::default())
}

pub fn omega_with(n: &BigInt, cfg: &FactorConfig) -> Result<u32> {
    Ok(factorize(n, cfg)?.values().sum())
}

/// Exact floor of `log2(q)` for a positive rational `q`.
pub fn floor_log2(q: &BigRational) -> Option<i64> {
    if !q.is_positive() {
        return None;
    }
    let (num, den) = (q.numer(), q.denom());
    let mut k = num.bits() as i64 - den.bits() as i64;
    let holds = |k: i64| -> bool {
        // 2^k <= num/den
        if k >= 0 {
            (den << (k as usize)) <= *num
        } else {
            *den <= (num << ((-k) as usize))
        }
    };
    while !holds(k) {
        k -= 1;
    }
    while holds(k + 1) {
        k += 1;
    }
    Some(k)
}

#[derive(Clone, Debug)]
pub struct MinorConfig {
    /// Maximum number of `m`-column subsets to enumerate.
    pub max_subsets: u64,
    pub factor: FactorConfig,
}

impl Default for MinorConfig {
    fn default() -> Self {
        MinorConfig {
            max_subsets: 200_000,
            factor: FactorConfig::default(),
        }
    }
}

/// Determinant statistics over all `m × m` column submatrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinorStats {
    /// Absolute values of the nonzero maximal minors (Δ).
    pub delta_set: BTreeSet<BigInt>,
    /// Prime-factor counts, with multiplicity, of the members of Δ (Φ).
    pub phi_set: BTreeSet<u32>,
    pub delta_max: BigInt,
    pub delta_min: BigInt,
    pub phi_max: u32,
    pub phi_min: u32,
    /// gcd of all maximal minors.
    pub minor_gcd: BigInt,
    /// `det(A Aᵀ)`.
    pub gram_det: BigInt,
    /// Σ of squared maximal minors, zero minors included.
    pub minor_square_sum: BigInt,
    pub subsets_examined: u64,
    pub invertible_subsets: u64,
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| {
        acc.saturating_mul((n - i) as u128) / (i as u128 + 1)
    })
}

pub fn minor_stats(w: &IntegerMatrix) -> Result<MinorStats> {
    minor_stats_with(w, &MinorConfig::default())
}

pub fn minor_stats_with(w: &IntegerMatrix, cfg: &MinorConfig) -> Result<MinorStats> {
    let (m, n) = (w.rows(), w.cols());
    if rank(w) < m {
        return Err(Error::RankDeficient);
    }
    let count = binomial(n as u64, m as u64);
    if count > cfg.max_subsets as u128 {
        return Err(cap_exceeded("minor enumeration", count, cfg.max_subsets));
    }
    let subsets: Vec<Vec<usize>> = (0..n).combinations(m).collect();
    let dets: Vec<BigInt> = subsets
        .par_iter()
        .map(|s| det(&w.select_columns(s).expect("valid indices")))
        .collect::<Result<_>>()?;

    let mut delta_set = BTreeSet::new();
    let mut minor_gcd = BigInt::zero();
    let mut minor_square_sum = BigInt::zero();
    let mut invertible = 0u64;
    for d in &dets {
        minor_square_sum += d * d;
        if !d.is_zero() {
            invertible += 1;
            delta_set.insert(d.abs());
            minor_gcd = minor_gcd.gcd(d);
        }
    }
    let mut phi_set = BTreeSet::new();
    for d in &delta_set {
        phi_set.insert(omega_with(d, &cfg.factor)?);
    }

    Ok(MinorStats {
        delta_max: delta_set.last().cloned().ok_or(Error::RankDeficient)?,
        delta_min: delta_set.first().cloned().ok_or(Error::RankDeficient)?,
        phi_max: *phi_set.last().expect("nonempty"),
        phi_min: *phi_set.first().expect("nonempty"),
        delta_set,
        phi_set,
        minor_gcd,
        gram_det: det(&w.gram())?,
        minor_square_sum,
        subsets_examined: dets.len() as u64,
        invertible_subsets: invertible,
    })
}

/// Converts a BigInt to i128, failing loudly instead of wrapping.
pub(crate) fn to_i128(v: &BigInt, ctx: &'static str) -> Result<i128> {
    v.to_i128().ok_or(Error::Overflow(ctx))
}
