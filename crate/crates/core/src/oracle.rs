//! Exact ground truth for `P(A,b) = {x ∈ Z^n_{≥0} : Ax = b}` and for the
//! minimum support `σ(A,b)`.
//!
//! Feasibility of a column-restricted system `A_S x = b, x ≥ 0` is decided
//! exactly. Integer solutions are parametrized as `x₀ + K y` through the
//! column HNF of `A_S`. If `{x ≥ 0 : A_S x = 0}` contains a nonzero ray `r`,
//! every solution can be reduced by `r` until some `x_j < r_j`, so the search
//! branches on `x_j ∈ {0,…,r_j−1}` for `j ∈ supp(r)` and recurses on the
//! smaller column set. Once no ray remains the solution set is a polytope and
//! its integer points are enumerated with Fourier–Motzkin bounds.
//!
//! Work caps turn into `Unknown` outcomes; they never produce a wrong answer.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, RwLock};

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{cap_exceeded, Error, Result};
use crate::linalg::IntegerSystem;
use crate::matrix::IntegerMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleCaps {
    /// Largest column set a single restricted system may have.
    pub max_columns: usize,
    /// Work budget per query (enumerated kernel points plus branch nodes).
    pub max_points: u64,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            max_columns: 12,
            max_points: 10_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<BigInt>),
    Infeasible,
    Unknown,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaValue {
    Finite(usize),
    Infinite,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaResult {
    pub value: SigmaValue,
    pub witness: Option<Vec<BigInt>>,
    pub work_caps_hit: bool,
    /// Every support subset smaller than the reported value was proven
    /// infeasible.
    pub exhaustive: bool,
}

/// Outcome of a support search restricted to a maximum cardinality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundedSigma {
    /// Exact σ together with a witness of that support.
    Exact(usize, Vec<BigInt>),
    /// Every subset up to the limit is infeasible.
    Above(usize),
    /// A cap was hit before the question was settled.
    Unknown,
}

enum Search {
    Found(Vec<BigInt>),
    Empty,
    Capped,
}

struct Prepared {
    system: IntegerSystem,
    cols: Vec<usize>,
    ray: Option<Vec<BigInt>>,
}

/// Exact feasibility and support oracle for a fixed matrix.
pub struct Oracle {
    a: IntegerMatrix,
    columns: Vec<Vec<BigInt>>,
    caps: OracleCaps,
    /// Nonnegative circuits of `A`: primitive `r ≥ 0` with `A r = 0` and
    /// minimal support.
    rays: Vec<Vec<BigInt>>,
    prepared: RwLock<HashMap<u64, Arc<Prepared>>>,
}

impl Oracle {
    pub fn new(a: &IntegerMatrix, caps: OracleCaps) -> Result<Self> {
        let n = a.cols();
        if n > 63 {
            return Err(cap_exceeded("oracle column count", n, 63));
        }
        let rays = nonnegative_circuits(a)?;
        Ok(Oracle {
            a: a.clone(),
            columns: a.columns(),
            caps,
            rays,
            prepared: RwLock::new(HashMap::new()),
        })
    }

    pub fn matrix(&self) -> &IntegerMatrix {
        &self.a
    }

    pub fn caps(&self) -> &OracleCaps {
        &self.caps
    }

    pub fn rays(&self) -> &[Vec<BigInt>] {
        &self.rays
    }

    fn check_dim(&self, b: &[BigInt]) -> Result<()> {
        if b.len() != self.a.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.a.rows(),
                found: b.len(),
            });
        }
        Ok(())
    }

    fn full_mask(&self) -> u64 {
        (1u64 << self.a.cols()) - 1
    }

    fn prepared(&self, mask: u64) -> Arc<Prepared> {
        if let Some(p) = self.prepared.read().expect("lock").get(&mask) {
            return p.clone();
        }
        let cols: Vec<usize> = (0..self.a.cols()).filter(|j| mask >> j & 1 == 1).collect();
        let sub = self.a.select_columns(&cols).expect("nonempty mask");
        let ray = self
            .rays
            .iter()
            .filter(|r| {
                r.iter()
                    .enumerate()
                    .all(|(j, v)| v.is_zero() || mask >> j & 1 == 1)
            })
            .min_by_key(|r| r.iter().sum::<BigInt>())
            .cloned();
        let p = Arc::new(Prepared {
            system: IntegerSystem::new(&sub),
            cols,
            ray,
        });
        self.prepared
            .write()
            .expect("lock")
            .entry(mask)
            .or_insert(p)
            .clone()
    }

    /// Decides `P(A_S, b) ≠ ∅` for the columns in `mask`.
    fn search(&self, mask: u64, b: &[BigInt], budget: &mut u64) -> Search {
        if mask == 0 {
            return if b.iter().all(Zero::is_zero) {
                Search::Found(vec![BigInt::zero(); self.a.cols()])
            } else {
                Search::Empty
            };
        }
        if mask.count_ones() as usize > self.caps.max_columns {
            return Search::Capped;
        }
        if *budget == 0 {
            return Search::Capped;
        }
        *budget -= 1;

        let p = self.prepared(mask);
        let Some(x0) = p.system.particular(b) else {
            return Search::Empty;
        };
        let embed = |xs: &[BigInt]| {
            let mut x = vec![BigInt::zero(); self.a.cols()];
            for (&c, v) in p.cols.iter().zip(xs) {
                x[c] = v.clone();
            }
            x
        };
        let kernel = p.system.kernel();
        if kernel.is_empty() {
            return if x0.iter().all(|v| !v.is_negative()) {
                Search::Found(embed(&x0))
            } else {
                Search::Empty
            };
        }

        if let Some(ray) = &p.ray {
            // Some coordinate in supp(ray) is below its ray entry.
            let mut capped = false;
            for (j, rj) in ray.iter().enumerate() {
                if rj.is_zero() {
                    continue;
                }
                let mut v = BigInt::zero();
                while &v < rj {
                    let b2: Vec<BigInt> =
                        b.iter().zip(&self.columns[j]).map(|(bi, aj)| bi - &v * aj).collect();
                    match self.search(mask & !(1u64 << j), &b2, budget) {
                        Search::Found(mut x) => {
                            x[j] += &v;
                            return Search::Found(x);
                        }
                        Search::Capped => capped = true,
                        Search::Empty => {}
                    }
                    v += 1;
                }
            }
            return if capped { Search::Capped } else { Search::Empty };
        }

        // Bounded: x0 + K y ≥ 0 describes a polytope in y.
        let f = kernel.len();
        let cons: Vec<Constraint> = (0..x0.len())
            .map(|i| Constraint {
                coeffs: (0..f).map(|l| kernel[l][i].clone()).collect(),
                rhs: -x0[i].clone(),
            })
            .collect();
        let mut y = Vec::with_capacity(f);
        match enumerate_first(&cons, &mut y, budget) {
            Some(Ok(y)) => {
                let mut x = x0.clone();
                for (yl, kl) in y.iter().zip(kernel) {
                    for (xi, ki) in x.iter_mut().zip(kl) {
                        *xi += yl * ki;
                    }
                }
                debug_assert!(x.iter().all(|v| !v.is_negative()));
                Search::Found(embed(&x))
            }
            Some(Err(())) => Search::Capped,
            None => Search::Empty,
        }
    }

    fn outcome(&self, s: Search) -> Feasibility {
        match s {
            Search::Found(x) => Feasibility::Feasible(x),
            Search::Empty => Feasibility::Infeasible,
            Search::Capped => Feasibility::Unknown,
        }
    }

    /// Feasibility of the full system.
    pub fn feasible(&self, b: &[BigInt]) -> Result<Feasibility> {
        self.check_dim(b)?;
        let mut budget = self.caps.max_points;
        Ok(self.outcome(self.search(self.full_mask(), b, &mut budget)))
    }

    /// Feasibility using only the listed columns.
    pub fn feasible_on(&self, cols: &[usize], b: &[BigInt]) -> Result<Feasibility> {
        self.check_dim(b)?;
        let mut mask = 0u64;
        for &c in cols {
            if c >= self.a.cols() {
                return Err(Error::InvalidParameters(format!("column {c} out of range")));
            }
            mask |= 1 << c;
        }
        let mut budget = self.caps.max_points;
        Ok(self.outcome(self.search(mask, b, &mut budget)))
    }

    /// Searches supports of size `0..=limit` in increasing cardinality
    /// (lexicographic within each size).
    pub fn sigma_up_to(&self, b: &[BigInt], limit: usize) -> Result<BoundedSigma> {
        self.check_dim(b)?;
        let n = self.a.cols();
        let mut capped = false;
        for k in 0..=limit.min(n) {
            for subset in (0..n).combinations(k) {
                let mask = subset.iter().fold(0u64, |m, &c| m | 1 << c);
                let mut budget = self.caps.max_points;
                match self.search(mask, b, &mut budget) {
                    Search::Found(x) if !capped => return Ok(BoundedSigma::Exact(k, x)),
                    Search::Found(_) => return Ok(BoundedSigma::Unknown),
                    Search::Capped => capped = true,
                    Search::Empty => {}
                }
            }
        }
        Ok(if capped {
            BoundedSigma::Unknown
        } else {
            BoundedSigma::Above(limit.min(n))
        })
    }

    /// Exact `σ(A,b)`.
    pub fn sigma(&self, b: &[BigInt]) -> Result<SigmaResult> {
        let full = self.feasible(b)?;
        let upper = match &full {
            Feasibility::Infeasible => {
                return Ok(SigmaResult {
                    value: SigmaValue::Infinite,
                    witness: None,
                    work_caps_hit: false,
                    exhaustive: true,
                })
            }
            Feasibility::Feasible(x) => Some(x.clone()),
            Feasibility::Unknown => None,
        };
        let limit = match &upper {
            Some(x) => support_size(x).saturating_sub(1),
            None => self.a.cols(),
        };
        let res = match (self.sigma_up_to(b, limit)?, upper) {
            (BoundedSigma::Exact(k, x), _) => SigmaResult {
                value: SigmaValue::Finite(k),
                witness: Some(x),
                work_caps_hit: false,
                exhaustive: true,
            },
            (BoundedSigma::Above(_), Some(x)) => SigmaResult {
                value: SigmaValue::Finite(support_size(&x)),
                witness: Some(x),
                work_caps_hit: false,
                exhaustive: true,
            },
            (BoundedSigma::Above(_), None) => SigmaResult {
                // Every support was searched exhaustively without a hit, yet
                // the full system was undecided: only possible through caps.
                value: SigmaValue::Unknown,
                witness: None,
                work_caps_hit: true,
                exhaustive: false,
            },
            (BoundedSigma::Unknown, x) => SigmaResult {
                value: SigmaValue::Unknown,
                witness: x,
                work_caps_hit: true,
                exhaustive: false,
            },
        };
        Ok(res)
    }
}

pub fn support_size(x: &[BigInt]) -> usize {
    x.iter().filter(|v| !v.is_zero()).count()
}

/// Nonnegative circuits of `A`: minimal-support `r ≥ 0`, `r ≠ 0`, `A r = 0`.
fn nonnegative_circuits(a: &IntegerMatrix) -> Result<Vec<Vec<BigInt>>> {
    let n = a.cols();
    let max_size = (a.rows() + 1).min(n);
    let mut out = Vec::new();
    for k in 1..=max_size {
        for cols in (0..n).combinations(k) {
            let sub = a.select_columns(&cols)?;
            let sys = IntegerSystem::new(&sub);
            let [kv] = sys.kernel() else {
                continue;
            };
            if kv.iter().any(Zero::is_zero) {
                continue;
            }
            let positive = kv.iter().all(|v| v.is_positive());
            let negative = kv.iter().all(|v| v.is_negative());
            if !positive && !negative {
                continue;
            }
            let mut r = vec![BigInt::zero(); n];
            for (&c, v) in cols.iter().zip(kv) {
                r[c] = v.abs();
            }
            out.push(r);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Constraint {
    /// `coeffs · y ≥ rhs`.
    coeffs: Vec<BigInt>,
    rhs: BigInt,
}

impl Constraint {
    /// Divides by the content of the coefficients, tightening the right-hand
    /// side for integer points. Returns `None` if the constraint is trivially
    /// violated and `Some(None)` if it is trivially satisfied.
    fn normalize(mut self) -> Option<Option<Constraint>> {
        let g = self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if g.is_zero() {
            return if self.rhs.is_positive() { None } else { Some(None) };
        }
        if !g.is_one() {
            for c in self.coeffs.iter_mut() {
                *c = &*c / &g;
            }
            self.rhs = self.rhs.div_ceil(&g);
        }
        Some(Some(self))
    }
}

const FM_CONSTRAINT_LIMIT: usize = 20_000;

/// Bounds on the first variable of the integer points of `cons`, by
/// eliminating the remaining variables. `Ok(None)` means provably empty.
fn first_variable_bounds(cons: &[Constraint]) -> std::result::Result<Option<(BigInt, BigInt)>, ()> {
    let f = cons.first().map(|c| c.coeffs.len()).unwrap_or(0);
    let mut cur: Vec<Constraint> = Vec::new();
    for c in cons {
        match c.clone().normalize() {
            None => return Ok(None),
            Some(Some(c)) => cur.push(c),
            Some(None) => {}
        }
    }
    for v in (1..f).rev() {
        let (mut pos, mut neg, mut next) = (Vec::new(), Vec::new(), HashSet::new());
        for c in cur {
            match c.coeffs[v].sign() {
                num_bigint::Sign::Plus => pos.push(c),
                num_bigint::Sign::Minus => neg.push(c),
                num_bigint::Sign::NoSign => {
                    next.insert(c);
                }
            }
        }
        if pos.len() * neg.len() + next.len() > FM_CONSTRAINT_LIMIT {
            return Err(());
        }
        for p in &pos {
            for q in &neg {
                let (cp, cq) = (&p.coeffs[v], -&q.coeffs[v]);
                let combined = Constraint {
                    coeffs: p
                        .coeffs
                        .iter()
                        .zip(&q.coeffs)
                        .map(|(a, b)| &cq * a + cp * b)
                        .collect(),
                    rhs: &cq * &p.rhs + cp * &q.rhs,
                };
                match combined.normalize() {
                    None => return Ok(None),
                    Some(Some(c)) => {
                        next.insert(c);
                    }
                    Some(None) => {}
                }
            }
        }
        cur = next.into_iter().collect();
    }
    let (mut lo, mut hi): (Option<BigInt>, Option<BigInt>) = (None, None);
    for c in &cur {
        let a = &c.coeffs[0];
        if a.is_positive() {
            let b = c.rhs.div_ceil(a);
            lo = Some(lo.map_or(b.clone(), |l| l.max(b)));
        } else if a.is_negative() {
            let b = c.rhs.div_floor(a);
            hi = Some(hi.map_or(b.clone(), |h| h.min(b)));
        }
    }
    match (lo, hi) {
        (Some(l), Some(h)) => Ok((l <= h).then_some((l, h))),
        // Unbounded direction: only reachable if the ray list was incomplete.
        _ => Err(()),
    }
}

/// First integer point of a bounded polytope in lexicographic order.
/// `None` when empty, `Some(Err(()))` when a cap is hit.
fn enumerate_first(
    cons: &[Constraint],
    prefix: &mut Vec<BigInt>,
    budget: &mut u64,
) -> Option<std::result::Result<Vec<BigInt>, ()>> {
    let f = cons.first().map(|c| c.coeffs.len()).unwrap_or(0);
    if f == 0 {
        return cons
            .iter()
            .all(|c| !c.rhs.is_positive())
            .then(|| Ok(prefix.clone()));
    }
    let (lo, hi) = match first_variable_bounds(cons) {
        Ok(Some(b)) => b,
        Ok(None) => return None,
        Err(()) => return Some(Err(())),
    };
    let mut v = lo;
    while v <= hi {
        if *budget == 0 {
            return Some(Err(()));
        }
        *budget -= 1;
        let reduced: Vec<Constraint> = cons
            .iter()
            .map(|c| Constraint {
                coeffs: c.coeffs[1..].to_vec(),
                rhs: &c.rhs - &c.coeffs[0] * &v,
            })
            .collect();
        prefix.push(v.clone());
        match enumerate_first(&reduced, prefix, budget) {
            Some(r) => return Some(r),
            None => {
                prefix.pop();
            }
        }
        v += 1;
    }
    None
}

pub fn feasible(a: &IntegerMatrix, b: &[BigInt], caps: &OracleCaps) -> Result<Feasibility> {
    Oracle::new(a, caps.clone())?.feasible(b)
}

pub fn sigma_exact(a: &IntegerMatrix, b: &[BigInt], caps: &OracleCaps) -> Result<SigmaResult> {
    Oracle::new(a, caps.clone())?.sigma(b)
}

/// Largest integer that is not a nonnegative integer combination of `coins`.
pub fn frobenius_number(coins: &[u64]) -> Result<u64> {
    if coins.is_empty() {
        return Err(Error::InvalidParameters("no coins".into()));
    }
    if let Some(&c) = coins.iter().find(|&&c| c < 2) {
        return Err(Error::InvalidCoin(c));
    }
    let g = coins.iter().fold(0u64, |g, &c| g.gcd(&c));
    if g != 1 {
        return Err(Error::CoinGcd(g));
    }
    let (lo, hi) = (*coins.iter().min().unwrap(), *coins.iter().max().unwrap());
    let bound = lo
        .checked_mul(hi)
        .filter(|&b| b <= 100_000_000)
        .ok_or_else(|| cap_exceeded("frobenius table", format!("{lo}*{hi}"), 100_000_000))?
        as usize;
    let mut reach = vec![false; bound + 1];
    reach[0] = true;
    for v in 1..=bound {
        reach[v] = coins
            .iter()
            .any(|&c| c as usize <= v && reach[v - c as usize]);
    }
    // `lo` consecutive representable values make every larger value
    // representable.
    debug_assert!(reach[bound + 1 - lo as usize..].iter().all(|&r| r));
    let last = (0..=bound).rev().find(|&v| !reach[v]).ok_or_else(|| {
        Error::Invariant("every value representable despite coins ≥ 2".into())
    })?;
    Ok(last as u64)
}
