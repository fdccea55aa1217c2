//! Finite-box measurements of how often sparse solutions exist.
//!
//! Everything here is exact: counts are integers and ratios are reduced
//! fractions. Density sweeps enumerate `{−t,…,t}^m` exhaustively when it is
//! small enough and otherwise draw a seeded uniform sample.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{cap_exceeded, Error, Result};
use crate::linalg::{self, to_i128, Lattice};
use crate::matrix::IntegerMatrix;
use crate::oracle::{self, BoundedSigma, Feasibility, Oracle};
use crate::solver::{solve_sparse, Mode, Outcome, Plan};

pub const DEFAULT_BOX_CAP: u64 = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Enumeration {
    Exhaustive,
    Sampled { sample_size: u64, seed: u64 },
}

impl fmt::Display for Enumeration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Enumeration::Exhaustive => f.write_str("exhaustive"),
            Enumeration::Sampled { sample_size, seed } => {
                write!(f, "sampled {sample_size} seed {seed}")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub t_schedule: Vec<u64>,
    pub k_list: Vec<usize>,
    /// Largest box enumerated exhaustively.
    pub box_cap: u64,
    /// Points drawn per `t` when the box exceeds `box_cap`.
    pub sample_size: u64,
    pub seed: u64,
}

impl SweepConfig {
    pub fn new(t_schedule: Vec<u64>, k_list: Vec<usize>) -> Self {
        SweepConfig {
            t_schedule,
            k_list,
            box_cap: DEFAULT_BOX_CAP,
            sample_size: 100_000,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.t_schedule.is_empty() || self.t_schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameters(
                "t schedule must be nonempty and strictly increasing".into(),
            ));
        }
        if self.k_list.is_empty() {
            return Err(Error::InvalidParameters("k list is empty".into()));
        }
        if self.box_cap == 0 || self.sample_size == 0 {
            return Err(Error::InvalidParameters("caps must be positive".into()));
        }
        Ok(())
    }
}

/// Counts for one box radius.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRow {
    pub t: u64,
    pub mode: Mode,
    pub enumeration: Enumeration,
    /// Points examined (the whole box, or the sample).
    pub n_box: u64,
    pub n_feasible: u64,
    /// Feasible points certified by the sparse solver.
    pub n_covered: u64,
    /// Points whose feasibility or support could not be settled within the
    /// oracle caps. They are excluded from every other count.
    pub n_unknown: u64,
    /// Oracle-exact `|{b : σ(A,b) ≤ k}|`.
    pub n_sigma_le: BTreeMap<usize, u64>,
    /// `|{b : certificate support ≤ k}|`, a lower bound for `n_sigma_le`.
    pub n_cert_le: BTreeMap<usize, u64>,
}

impl SweepRow {
    /// `n_sigma_le(k) / n_feasible`, undefined when nothing is feasible.
    pub fn ratio(&self, k: usize) -> Option<BigRational> {
        let num = *self.n_sigma_le.get(&k)?;
        (self.n_feasible > 0).then(|| BigRational::new(num.into(), self.n_feasible.into()))
    }
}

/// What is known about one right-hand side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PointStatus {
    Infeasible,
    /// Feasible with `lo ≤ σ ≤ hi`; `cert` is the certificate support when
    /// the solver covered the point.
    Feasible {
        lo: usize,
        hi: usize,
        cert: Option<usize>,
    },
    Unknown,
}

fn classify(plan: &Plan, oracle: &Oracle, b: &[BigInt], k_max: usize) -> Result<PointStatus> {
    let n = plan.matrix().cols();
    match solve_sparse(plan, b)? {
        Outcome::Infeasible(_) => Ok(PointStatus::Infeasible),
        Outcome::Certificate(c) => {
            let s = c.support.len();
            if s == 0 {
                return Ok(PointStatus::Feasible { lo: 0, hi: 0, cert: Some(0) });
            }
            let limit = (s - 1).min(k_max);
            Ok(match oracle.sigma_up_to(b, limit)? {
                BoundedSigma::Exact(k, _) => PointStatus::Feasible { lo: k, hi: k, cert: Some(s) },
                BoundedSigma::Above(l) if l + 1 == s => {
                    PointStatus::Feasible { lo: s, hi: s, cert: Some(s) }
                }
                BoundedSigma::Above(l) => PointStatus::Feasible { lo: l + 1, hi: s, cert: Some(s) },
                // Feasibility is certified even if the exact support is not.
                BoundedSigma::Unknown => PointStatus::Feasible { lo: 0, hi: s, cert: Some(s) },
            })
        }
        Outcome::Uncovered => Ok(match oracle.sigma_up_to(b, k_max)? {
            BoundedSigma::Exact(k, _) => PointStatus::Feasible { lo: k, hi: k, cert: None },
            BoundedSigma::Above(l) => match oracle.feasible(b)? {
                Feasibility::Feasible(x) => PointStatus::Feasible {
                    lo: l + 1,
                    hi: oracle::support_size(&x),
                    cert: None,
                },
                Feasibility::Infeasible => PointStatus::Infeasible,
                Feasibility::Unknown => PointStatus::Unknown,
            },
            BoundedSigma::Unknown => match oracle.feasible(b)? {
                Feasibility::Infeasible => PointStatus::Infeasible,
                Feasibility::Feasible(x) => PointStatus::Feasible {
                    lo: 0,
                    hi: oracle::support_size(&x).min(n),
                    cert: None,
                },
                Feasibility::Unknown => PointStatus::Unknown,
            },
        }),
    }
}

#[derive(Clone, Debug, Default)]
struct Tally {
    feasible: u64,
    covered: u64,
    unknown: u64,
    sigma_le: Vec<u64>,
    cert_le: Vec<u64>,
}

impl Tally {
    fn new(k: usize) -> Self {
        Tally {
            sigma_le: vec![0; k],
            cert_le: vec![0; k],
            ..Tally::default()
        }
    }

    fn add(mut self, status: PointStatus, k_list: &[usize]) -> Self {
        match status {
            PointStatus::Infeasible => {}
            PointStatus::Unknown => self.unknown += 1,
            PointStatus::Feasible { lo, hi, cert } => {
                // A point whose σ straddles some k is not decided for that k.
                if k_list.iter().any(|&k| lo <= k && k < hi) {
                    self.unknown += 1;
                    return self;
                }
                self.feasible += 1;
                if cert.is_some() {
                    self.covered += 1;
                }
                for (i, &k) in k_list.iter().enumerate() {
                    if hi <= k {
                        self.sigma_le[i] += 1;
                    }
                    if cert.is_some_and(|c| c <= k) {
                        self.cert_le[i] += 1;
                    }
                }
            }
        }
        self
    }

    fn merge(mut self, o: Tally) -> Self {
        self.feasible += o.feasible;
        self.covered += o.covered;
        self.unknown += o.unknown;
        for (a, b) in self.sigma_le.iter_mut().zip(o.sigma_le) {
            *a += b;
        }
        for (a, b) in self.cert_le.iter_mut().zip(o.cert_le) {
            *a += b;
        }
        self
    }
}

/// Number of points of `{−t,…,t}^m`, if it fits in a `u64`.
pub fn box_size(t: u64, m: usize) -> Option<u64> {
    (2 * t + 1).checked_pow(m as u32)
}

fn box_point(mut idx: u64, t: u64, m: usize) -> Vec<BigInt> {
    let side = 2 * t + 1;
    (0..m)
        .map(|_| {
            let v = (idx % side) as i64 - t as i64;
            idx /= side;
            BigInt::from(v)
        })
        .collect()
}

pub fn density_sweep(plan: &Plan, oracle: &Oracle, cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let m = plan.matrix().rows();
    let k_max = *cfg.k_list.iter().max().expect("validated");
    let mut rows = Vec::with_capacity(cfg.t_schedule.len());
    for &t in &cfg.t_schedule {
        let size = box_size(t, m).filter(|&s| s <= cfg.box_cap);
        let (enumeration, points): (Enumeration, Vec<Vec<BigInt>>) = match size {
            Some(s) => (Enumeration::Exhaustive, (0..s).map(|i| box_point(i, t, m)).collect()),
            None => {
                let seed = cfg.seed.wrapping_add(t);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let t = t as i64;
                let pts = (0..cfg.sample_size)
                    .map(|_| (0..m).map(|_| BigInt::from(rng.gen_range(-t..=t))).collect())
                    .collect();
                (
                    Enumeration::Sampled {
                        sample_size: cfg.sample_size,
                        seed,
                    },
                    pts,
                )
            }
        };
        let tally = points
            .par_iter()
            .map(|b| classify(plan, oracle, b, k_max))
            .try_fold(
                || Tally::new(cfg.k_list.len()),
                |acc, s| s.map(|s| acc.add(s, &cfg.k_list)),
            )
            .try_reduce(|| Tally::new(cfg.k_list.len()), |a, b| Ok(a.merge(b)))?;
        rows.push(SweepRow {
            t,
            mode: plan.mode(),
            enumeration,
            n_box: points.len() as u64,
            n_feasible: tally.feasible,
            n_covered: tally.covered,
            n_unknown: tally.unknown,
            n_sigma_le: cfg.k_list.iter().copied().zip(tally.sigma_le).collect(),
            n_cert_le: cfg.k_list.iter().copied().zip(tally.cert_le).collect(),
        });
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "t,mode,n_box,n_feasible,n_covered,k,n_sigma_le_k,ratio_num,ratio_den";

/// One CSV line per `(t, k)`. Ratio fields are empty when nothing in the
/// box is feasible.
pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        for (&k, &count) in &r.n_sigma_le {
            let (num, den) = match r.ratio(k) {
                Some(q) => (q.numer().to_string(), q.denom().to_string()),
                None => (String::new(), String::new()),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.t, r.mode, r.n_box, r.n_feasible, r.n_covered, k, count, num, den
            );
        }
    }
    out
}

/// Line-oriented dump including certificate-based counts and unknowns.
pub fn rows_to_records(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    for r in rows {
        let _ = writeln!(out, "t {}", r.t);
        let _ = writeln!(out, "mode {}", r.mode);
        let _ = writeln!(out, "enumeration {}", r.enumeration);
        let _ = writeln!(out, "n_box {}", r.n_box);
        let _ = writeln!(out, "n_feasible {}", r.n_feasible);
        let _ = writeln!(out, "n_covered {}", r.n_covered);
        let _ = writeln!(out, "n_unknown {}", r.n_unknown);
        for (&k, &count) in &r.n_sigma_le {
            let ratio = r.ratio(k).map_or_else(|| "undefined".to_string(), |q| q.to_string());
            let _ = writeln!(
                out,
                "k {k} sigma_le {count} certificate_le {} ratio {ratio}",
                r.n_cert_le[&k]
            );
        }
        out.push('\n');
    }
    out
}

/// Finite-t stand-in for the asymptotic support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaAsyEstimate {
    /// Smallest `k` whose ratio at the largest `t` is at least `1 − ε` and
    /// never decreased along the schedule.
    pub k_hat: Option<usize>,
    pub epsilon: BigRational,
    pub final_ratios: BTreeMap<usize, Option<BigRational>>,
    pub diagnostics: Vec<String>,
}

impl fmt::Display for SigmaAsyEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.k_hat {
            Some(k) => writeln!(f, "k_hat (estimate, not a proof): {k}")?,
            None => writeln!(f, "k_hat (estimate, not a proof): none")?,
        }
        writeln!(f, "epsilon: {}", self.epsilon)?;
        for (k, r) in &self.final_ratios {
            match r {
                Some(q) => writeln!(f, "final ratio k={k}: {q}")?,
                None => writeln!(f, "final ratio k={k}: undefined")?,
            }
        }
        for d in &self.diagnostics {
            writeln!(f, "diagnostic: {d}")?;
        }
        Ok(())
    }
}

pub fn sigma_asy_estimate(rows: &[SweepRow], epsilon: &BigRational) -> Result<SigmaAsyEstimate> {
    if rows.len() < 2 {
        return Err(Error::InvalidParameters("estimate needs at least two sweep rows".into()));
    }
    let mut diagnostics = Vec::new();
    for r in rows {
        if let Enumeration::Sampled { sample_size, seed } = r.enumeration {
            diagnostics.push(format!("t={} sampled ({sample_size} points, seed {seed})", r.t));
        }
        if r.n_unknown > 0 {
            diagnostics.push(format!("t={} has {} undecided points", r.t, r.n_unknown));
        }
    }
    let last = rows.last().expect("nonempty");
    let threshold = BigRational::one() - epsilon;
    let mut k_hat = None;
    let mut final_ratios = BTreeMap::new();
    for &k in last.n_sigma_le.keys() {
        let series: Vec<BigRational> = rows.iter().filter_map(|r| r.ratio(k)).collect();
        let monotone = series.windows(2).all(|w| w[0] <= w[1]);
        if !monotone {
            diagnostics.push(format!("ratio for k={k} is not monotone over the schedule"));
        }
        let fin = last.ratio(k);
        if k_hat.is_none() && monotone && fin.as_ref().is_some_and(|q| *q >= threshold) {
            k_hat = Some(k);
        }
        final_ratios.insert(k, fin);
    }
    Ok(SigmaAsyEstimate {
        k_hat,
        epsilon: epsilon.clone(),
        final_ratios,
        diagnostics,
    })
}

/// Parses `0.01`, `1/100` or `0` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidParameters(format!("not a rational number: `{s}`"));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let n = BigInt::from_str(&digits).map_err(|_| bad())?;
    let d = num_traits::pow(BigInt::from(10), frac.len());
    Ok(BigRational::new(n, d))
}

/// Lattice points of `Λ` in `t·P`, `P = {Σ λ_w w : λ ∈ [0,1]}`, for
/// linearly independent `generators`. Counted by scanning the bounding box.
pub fn ehrhart_count(lattice: &Lattice, generators: &[Vec<BigInt>], t: u64, cap: u64) -> Result<u64> {
    let m = lattice.dim();
    if generators.is_empty() {
        return Ok(1);
    }
    let g = IntegerMatrix::from_columns(m, generators)?;
    if linalg::rank(&g) != generators.len() {
        return Err(Error::InvalidParameters("parallelepiped generators are dependent".into()));
    }
    let tb = BigInt::from(t);
    let (mut lo, mut hi) = (vec![BigInt::zero(); m], vec![BigInt::zero(); m]);
    for w in generators {
        for i in 0..m {
            if w[i].is_negative() {
                lo[i] += &tb * &w[i];
            } else {
                hi[i] += &tb * &w[i];
            }
        }
    }
    let mut total = BigInt::one();
    for i in 0..m {
        total *= &hi[i] - &lo[i] + 1;
    }
    if total > BigInt::from(cap) {
        return Err(cap_exceeded("ehrhart box points", &total, cap));
    }
    let total = total.to_u64().expect("below cap");
    let tq = BigRational::from_integer(tb);
    let mut count = 0u64;
    for idx in 0..total {
        let mut rest = idx;
        let x: Vec<BigInt> = (0..m)
            .map(|i| {
                let side = (&hi[i] - &lo[i] + 1u32).to_u64().expect("below cap");
                let v = &lo[i] + rest % side;
                rest /= side;
                v
            })
            .collect();
        if !lattice.contains(&x) {
            continue;
        }
        let Some(lambda) = linalg::solve_rational(&g, &x) else {
            continue;
        };
        if lambda.iter().all(|l| !l.is_negative() && *l <= tq) {
            count += 1;
        }
    }
    Ok(count)
}

/// Points of `{−t,…,t}^m ∩ Λ` in the translated and untranslated subcones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma4Ratio {
    pub t: u64,
    pub translated: u128,
    pub untranslated: u128,
}

impl Lemma4Ratio {
    pub fn ratio(&self) -> Option<BigRational> {
        (self.untranslated > 0)
            .then(|| BigRational::new(self.translated.into(), self.untranslated.into()))
    }
}

struct ConeRows {
    normals: Vec<Vec<i128>>,
    /// `aʲ · z` for each normal.
    offsets: Vec<i128>,
}

/// Exact count by sweeping lines along the last coordinate: for each prefix
/// the cones cut out integer intervals and `Λ` a residue class.
pub fn lemma4_ratio(plan: &Plan, t: u64, cap: u64) -> Result<Lemma4Ratio> {
    let m = plan.matrix().rows();
    let lattice = plan.lattice();
    if !lattice.is_full_rank() {
        return Err(Error::Invariant("feasibility lattice is not full rank".into()));
    }
    let prefixes = box_size(t, m - 1).filter(|&p| p <= cap).ok_or_else(|| {
        cap_exceeded("lemma 4 line prefixes", format!("(2*{t}+1)^{}", m - 1), cap)
    })?;
    let ti = t as i128;

    let basis: Vec<Vec<i128>> = lattice
        .basis()
        .iter()
        .map(|c| c.iter().map(|v| to_i128(v, "lattice basis")).collect())
        .collect::<Result<_>>()?;
    let mut magnitude: i128 = 0;
    let mut build = |shifted: bool| -> Result<Vec<ConeRows>> {
        plan.subcones()
            .iter()
            .map(|sp| {
                let normals: Vec<Vec<i128>> = sp
                    .cone
                    .outer_normals()
                    .to_rows()
                    .iter()
                    .map(|r| r.iter().map(|v| to_i128(v, "cone normal")).collect())
                    .collect::<Result<_>>()?;
                let z: Vec<i128> = if shifted {
                    sp.z().iter().map(|v| to_i128(v, "shift")).collect::<Result<_>>()?
                } else {
                    vec![0; m]
                };
                let zmax = z.iter().map(|v| v.abs()).max().unwrap_or(0);
                for a in &normals {
                    let amax = a.iter().map(|v| v.abs()).max().unwrap_or(0);
                    let bound = amax
                        .checked_mul(ti + zmax)
                        .and_then(|v| v.checked_mul(2 * m as i128 + 2))
                        .ok_or(Error::Overflow("lemma 4 line sweep"))?;
                    magnitude = magnitude.max(bound);
                }
                let offsets = normals
                    .iter()
                    .map(|a| a.iter().zip(&z).map(|(x, y)| x * y).sum())
                    .collect();
                Ok(ConeRows { normals, offsets })
            })
            .collect()
    };
    let plain = build(false)?;
    let shifted = build(true)?;
    if magnitude > i128::MAX / 4 {
        return Err(Error::Overflow("lemma 4 line sweep"));
    }

    let (translated, untranslated) = (0..prefixes)
        .into_par_iter()
        .map(|idx| {
            let prefix: Vec<i128> = box_point(idx, t, m - 1)
                .iter()
                .map(|v| v.to_i128().expect("box coordinate"))
                .collect();
            let Some((r, h)) = last_coordinate_class(&basis, &prefix) else {
                return (0u128, 0u128);
            };
            (
                count_line(&shifted, &prefix, ti, r, h),
                count_line(&plain, &prefix, ti, r, h),
            )
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(Lemma4Ratio {
        t,
        translated,
        untranslated,
    })
}

/// For a full-rank lower-triangular HNF basis: the residue class `r mod h`
/// of admissible last coordinates above `prefix`, or `None` if the prefix
/// itself is not a lattice projection.
fn last_coordinate_class(basis: &[Vec<i128>], prefix: &[i128]) -> Option<(i128, i128)> {
    let m = basis.len();
    let mut y = Vec::with_capacity(m - 1);
    for (i, &bi) in prefix.iter().enumerate() {
        let s: i128 = y.iter().enumerate().map(|(k, yk)| yk * basis[k][i]).sum();
        let p = basis[i][i];
        if (bi - s) % p != 0 {
            return None;
        }
        y.push((bi - s) / p);
    }
    let r: i128 = y.iter().enumerate().map(|(k, yk)| yk * basis[k][m - 1]).sum();
    let h = basis[m - 1][m - 1];
    Some((r.rem_euclid(h), h))
}

fn count_line(cones: &[ConeRows], prefix: &[i128], t: i128, r: i128, h: i128) -> u128 {
    let last = prefix.len();
    let mut intervals: Vec<(i128, i128)> = Vec::with_capacity(cones.len());
    'cone: for c in cones {
        let (mut lo, mut hi) = (-t, t);
        for (a, off) in c.normals.iter().zip(&c.offsets) {
            // a·(b − z) ≤ 0  ⇔  a_last · s ≤ a·z − Σ_{l<last} a_l b_l
            let rhs = off - a[..last].iter().zip(prefix).map(|(x, y)| x * y).sum::<i128>();
            let coeff = a[last];
            if coeff > 0 {
                hi = hi.min(Integer::div_floor(&rhs, &coeff));
            } else if coeff < 0 {
                lo = lo.max(Integer::div_ceil(&rhs, &coeff));
            } else if rhs < 0 {
                continue 'cone;
            }
        }
        if lo <= hi {
            intervals.push((lo, hi));
        }
    }
    intervals.sort_unstable();
    let mut total = 0u128;
    let mut cur: Option<(i128, i128)> = None;
    let count = |(lo, hi): (i128, i128)| -> u128 {
        // s ≡ r mod h within [lo, hi]
        (Integer::div_floor(&(hi - r), &h) - Integer::div_floor(&(lo - 1 - r), &h)) as u128
    };
    for (lo, hi) in intervals {
        cur = match cur {
            Some((cl, ch)) if lo <= ch + 1 => Some((cl, ch.max(hi))),
            Some(done) => {
                total += count(done);
                Some((lo, hi))
            }
            None => Some((lo, hi)),
        };
    }
    if let Some(done) = cur {
        total += count(done);
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrimorialKind {
    /// The single row `[q₁, …, q_d, −δ]`.
    Atilde,
    /// `[[I^{m−1}, 0], [0, Ã]]`.
    A,
    /// `[[U, A], [1…1, 0…0]]` with `U = [I^m | 0]`.
    B,
}

impl FromStr for PrimorialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "atilde" => Ok(PrimorialKind::Atilde),
            "a" => Ok(PrimorialKind::A),
            "b" => Ok(PrimorialKind::B),
            _ => Err(Error::InvalidParameters(format!("unknown instance kind `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimorialInstance {
    pub kind: PrimorialKind,
    pub m: usize,
    pub d: usize,
    pub primes: Vec<u64>,
    /// `qᵢ = Π_{j≠i} p_j`.
    pub q: Vec<u64>,
    pub delta: u64,
    /// Frobenius number of the `q`; `None` for `d = 1`, where `q = (1)`.
    pub frobenius: Option<u64>,
    pub matrix: IntegerMatrix,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|k| k * k <= p).all(|k| p % k != 0)
}

/// The first `d` primes.
pub fn first_primes(d: usize) -> Vec<u64> {
    (2..).filter(|&p| is_prime(p)).take(d).collect()
}

pub fn gen_primorial(
    kind: PrimorialKind,
    m: usize,
    d: usize,
    primes: Option<&[u64]>,
) -> Result<PrimorialInstance> {
    let invalid = |msg: String| Err(Error::InvalidParameters(msg));
    if d == 0 {
        return invalid("d must be at least 1".into());
    }
    if m == 0 {
        return invalid("m must be at least 1".into());
    }
    if kind == PrimorialKind::Atilde && m != 1 {
        return invalid("the single-row instance has m = 1".into());
    }
    if kind == PrimorialKind::B && d < m + 3 {
        return invalid(format!("kind B needs d ≥ m + 3, got m = {m}, d = {d}"));
    }
    let primes = primes.map_or_else(|| first_primes(d), <[u64]>::to_vec);
    if primes.len() != d {
        return invalid(format!("expected {d} primes, got {}", primes.len()));
    }
    if let Some(&p) = primes.iter().find(|&&p| !is_prime(p)) {
        return invalid(format!("{p} is not prime"));
    }
    let mut sorted = primes.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != d {
        return invalid("primes must be distinct".into());
    }
    let delta = primes
        .iter()
        .try_fold(1u64, |acc, &p| acc.checked_mul(p))
        .ok_or(Error::Overflow("primorial product"))?;
    let q: Vec<u64> = primes.iter().map(|p| delta / p).collect();
    let frobenius = if d == 1 { None } else { Some(oracle::frobenius_number(&q)?) };

    let mut atilde: Vec<i64> = q.iter().map(|&v| v as i64).collect();
    atilde.push(-(delta as i64));

    // A is m × (m + d): identity block then Ã in the last row.
    let a_rows: Vec<Vec<i64>> = (0..m)
        .map(|i| {
            let mut row = vec![0i64; m + d];
            if i + 1 < m {
                row[i] = 1;
            } else {
                row[m - 1..].copy_from_slice(&atilde);
            }
            row
        })
        .collect();

    let rows: Vec<Vec<i64>> = match kind {
        PrimorialKind::Atilde => vec![atilde],
        PrimorialKind::A => a_rows,
        PrimorialKind::B => {
            let mut rows: Vec<Vec<i64>> = a_rows
                .iter()
                .enumerate()
                .map(|(i, ar)| {
                    let mut u = vec![0i64; m + 1];
                    u[i] = 1;
                    u.extend_from_slice(ar);
                    u
                })
                .collect();
            let mut e = vec![1i64; m + 1];
            e.extend(std::iter::repeat(0).take(m + d));
            rows.push(e);
            rows
        }
    };
    Ok(PrimorialInstance {
        kind,
        m,
        d,
        primes,
        q,
        delta,
        frobenius,
        matrix: IntegerMatrix::from_rows(&rows),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::minor_stats;
    use crate::matrix::int_vec;
    use crate::oracle::OracleCaps;
    use crate::solver::{build_plan, PlanConfig};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn sweep(a: &IntegerMatrix, ts: Vec<u64>, ks: Vec<usize>) -> Vec<SweepRow> {
        let plan = build_plan(a, None, Mode::I, &PlanConfig::default()).unwrap();
        let oracle = Oracle::new(a, OracleCaps::default()).unwrap();
        density_sweep(&plan, &oracle, &SweepConfig::new(ts, ks)).unwrap()
    }

    #[test]
    fn identity_sweep() {
        let rows = sweep(&IntegerMatrix::identity(2), vec![2, 3], vec![1, 2]);
        let r = &rows[1];
        assert_eq!(r.n_box, 49);
        assert_eq!(r.n_feasible, 16);
        assert_eq!(r.ratio(2), Some(q(1, 1)));
        // σ ≤ 1 only on the axes: 1 + 3 + 3 points.
        assert_eq!(r.n_sigma_le[&1], 7);
        assert_eq!(r.enumeration, Enumeration::Exhaustive);
        let est = sigma_asy_estimate(&rows, &q(1, 100)).unwrap();
        assert_eq!(est.k_hat, Some(2));
    }

    #[test]
    fn atilde_sweep() {
        let a = IntegerMatrix::from_rows(&[[3, 2, -6]]);
        let rows = sweep(&a, vec![60], vec![1, 2, 3]);
        assert_eq!(rows[0].n_feasible, 121);
        assert_eq!(rows[0].ratio(3), Some(q(1, 1)));
        assert_eq!(rows[0].n_unknown, 0);
    }

    #[test]
    fn sampled_sweeps_are_reproducible() {
        let a = IntegerMatrix::from_rows(&[[1, 0, 0, 0], [0, 3, 2, -6]]);
        let plan = build_plan(&a, None, Mode::I, &PlanConfig::default()).unwrap();
        let oracle = Oracle::new(&a, OracleCaps::default()).unwrap();
        let mut cfg = SweepConfig::new(vec![50], vec![3, 4]);
        cfg.box_cap = 100;
        cfg.sample_size = 300;
        cfg.seed = 7;
        let r1 = density_sweep(&plan, &oracle, &cfg).unwrap();
        let r2 = density_sweep(&plan, &oracle, &cfg).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1[0].n_box, 300);
        assert!(matches!(r1[0].enumeration, Enumeration::Sampled { seed: 57, .. }));
    }

    #[test]
    fn csv_has_exact_header_and_fractions() {
        let rows = sweep(&IntegerMatrix::identity(2), vec![3], vec![1, 2]);
        let csv = rows_to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("3,i,49,16,16,1,7,7,16"));
        assert_eq!(lines.next(), Some("3,i,49,16,16,2,16,1,1"));
        assert!(rows_to_records(&rows).contains("certificate_le"));
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("0.01").unwrap(), q(1, 100));
        assert_eq!(parse_rational("1/12").unwrap(), q(1, 12));
        assert_eq!(parse_rational("0").unwrap(), q(0, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn ehrhart_examples() {
        let z2 = Lattice::from_generators(2, &[int_vec(&[1, 0]), int_vec(&[0, 1])]).unwrap();
        let e = [int_vec(&[1, 0]), int_vec(&[0, 1])];
        assert_eq!(ehrhart_count(&z2, &e, 3, 1_000_000).unwrap(), 16);
        assert_eq!(ehrhart_count(&z2, &e[..1], 5, 1_000_000).unwrap(), 6);
        let l = Lattice::from_generators(2, &[int_vec(&[2, 0]), int_vec(&[0, 1])]).unwrap();
        let g = [int_vec(&[2, 0]), int_vec(&[0, 1])];
        assert_eq!(ehrhart_count(&l, &g, 2, 1_000_000).unwrap(), 9);
        assert!(ehrhart_count(&z2, &[int_vec(&[1, 1]), int_vec(&[2, 2])], 2, 100).is_err());
        assert!(ehrhart_count(&z2, &e, 100, 10).is_err());
    }

    /// Direct count over the box, sharing nothing with the line sweep.
    fn brute_lemma4(plan: &Plan, t: i64) -> (u128, u128) {
        let m = plan.matrix().rows();
        let side = (2 * t + 1) as u64;
        let (mut num, mut den) = (0, 0);
        for idx in 0..side.pow(m as u32) {
            let b = box_point(idx, t as u64, m);
            if !plan.lattice().contains(&b) {
                continue;
            }
            if plan.in_translated_cone(&b) {
                num += 1;
            }
            if plan.in_cone(&b) {
                den += 1;
            }
        }
        (num, den)
    }

    #[test]
    fn lemma4_examples() {
        let id = build_plan(&IntegerMatrix::identity(2), None, Mode::I, &PlanConfig::default()).unwrap();
        assert_eq!(lemma4_ratio(&id, 7, 1 << 20).unwrap().ratio(), Some(q(1, 1)));

        let a = IntegerMatrix::from_rows(&[[1, 0, 0, 0], [0, 3, 2, -6]]);
        let plan = build_plan(&a, None, Mode::I, &PlanConfig::default()).unwrap();
        let mut prev = BigRational::zero();
        for t in [6, 12, 24, 48] {
            let r = lemma4_ratio(&plan, t, 1 << 20).unwrap();
            let (num, den) = brute_lemma4(&plan, t as i64);
            assert_eq!((r.translated, r.untranslated), (num, den));
            let ratio = r.ratio().unwrap();
            assert!(ratio > prev && ratio <= q(1, 1));
            prev = ratio;
        }

        for rows in [
            vec![vec![2i64, 1, -1], vec![1, 3, 2]],
            vec![vec![2, 0, 1], vec![0, 2, 1]],
            vec![vec![3, -1, 0], vec![1, 1, 2], vec![0, 1, 1]],
        ] {
            let a = IntegerMatrix::from_rows(&rows);
            let plan = build_plan(&a, None, Mode::II, &PlanConfig::default()).unwrap();
            for t in [3, 8] {
                let r = lemma4_ratio(&plan, t, 1 << 20).unwrap();
                assert_eq!((r.translated, r.untranslated), brute_lemma4(&plan, t as i64));
            }
        }
    }

    #[test]
    fn orthant_with_unit_shift() {
        // cone(e₁, e₂) with z = (1,1): count {1..10}² against {0..10}².
        let a = IntegerMatrix::identity(2);
        let sp = build_plan(&a, None, Mode::I, &PlanConfig::default()).unwrap();
        let cone = &sp.subcones()[0].cone;
        let shifted = ConeRows {
            normals: cone
                .outer_normals()
                .to_rows()
                .iter()
                .map(|r| r.iter().map(|v| v.to_i128().unwrap()).collect())
                .collect(),
            offsets: vec![-1, -1],
        };
        let plain = ConeRows {
            normals: shifted.normals.clone(),
            offsets: vec![0, 0],
        };
        let (mut num, mut den) = (0, 0);
        for p in -10..=10 {
            num += count_line(std::slice::from_ref(&shifted), &[p], 10, 0, 1);
            den += count_line(std::slice::from_ref(&plain), &[p], 10, 0, 1);
        }
        assert_eq!(BigRational::new(num.into(), den.into()), q(100, 121));
    }

    #[test]
    fn primorial_examples() {
        let at = gen_primorial(PrimorialKind::Atilde, 1, 2, Some(&[2, 3])).unwrap();
        assert_eq!(at.matrix, IntegerMatrix::from_rows(&[[3, 2, -6]]));
        assert_eq!(at.frobenius, Some(1));
        assert_eq!(at.delta, 6);

        let a = gen_primorial(PrimorialKind::A, 2, 2, Some(&[2, 3])).unwrap();
        assert_eq!(a.matrix, IntegerMatrix::from_rows(&[[1, 0, 0, 0], [0, 3, 2, -6]]));
        assert_eq!(minor_stats(&a.matrix).unwrap().phi_max, 2);

        let b = gen_primorial(PrimorialKind::B, 1, 4, Some(&[2, 3, 5, 7])).unwrap();
        assert_eq!(b.matrix.rows(), 2);
        assert_eq!(b.matrix.cols(), 2 * 1 + 1 + 4);
        assert_eq!(
            b.matrix,
            IntegerMatrix::from_rows(&[[1, 0, 105, 70, 42, 30, -210], [1, 1, 0, 0, 0, 0, 0]])
        );
        assert_eq!(minor_stats(&b.matrix).unwrap().phi_min, 0);

        let big = gen_primorial(PrimorialKind::A, 3, 3, None).unwrap();
        assert_eq!(big.matrix.cols(), 6);
        assert_eq!(big.primes, vec![2, 3, 5]);
        assert_eq!(big.frobenius, Some(oracle::frobenius_number(&[15, 10, 6]).unwrap()));

        assert!(gen_primorial(PrimorialKind::B, 1, 3, None).is_err());
        assert!(gen_primorial(PrimorialKind::A, 2, 2, Some(&[2, 2])).is_err());
        assert!(gen_primorial(PrimorialKind::A, 2, 2, Some(&[2, 4])).is_err());
        assert!(gen_primorial(PrimorialKind::A, 2, 0, None).is_err());
        assert_eq!(gen_primorial(PrimorialKind::Atilde, 1, 1, None).unwrap().frobenius, None);
    }
}
