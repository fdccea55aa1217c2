//! Sparse certificates for `Ax = b, x ∈ Z^n_{≥0}`.
//!
//! A [`Plan`] covers `cone(A)` by simplicial subcones `cone(Wⁱ)` of a column
//! subset `W`. For each subcone it stores a small generator set of the
//! residue group `G_{Wⁱ}(A)`, one nonnegative representative `x^g` per coset
//! and a shift `zⁱ`. Every `b ∈ Λ ∩ (cone(Wⁱ) + zⁱ)` is then written as
//! `x^g` plus a nonnegative integer combination of the columns of `Wⁱ`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use sha2::{Digest, Sha256};

use crate::error::{cap_exceeded, Error, Result};
use crate::geometry::{self, OverlapShift, SimplicialCone, DEFAULT_COVER_CAP};
use crate::linalg::{self, FactorConfig, Lattice, MinorStats};
use crate::matrix::{format_vector, IntegerMatrix};
use crate::residue::{GroupElement, ResidueGroup, DEFAULT_GROUP_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Support at most `m + φⁱ` for the subcone used.
    I,
    /// Support at most `2m + φ^min`.
    II,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::I => "i",
            Mode::II => "ii",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "i" | "I" | "1" => Ok(Mode::I),
            "ii" | "II" | "2" => Ok(Mode::II),
            _ => Err(Error::InvalidParameters(format!("unknown mode `{s}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PlanConfig {
    pub group_cap: u64,
    pub cover_cap: u64,
    pub factor: FactorConfig,
}

impl Default for PlanConfig {
    fn default() -> Self {
        PlanConfig {
            group_cap: DEFAULT_GROUP_CAP,
            cover_cap: DEFAULT_COVER_CAP,
            factor: FactorConfig::default(),
        }
    }
}

/// Representative of one coset of `Λ / lattice(Wⁱ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetEntry {
    pub element: GroupElement,
    /// `x^g`.
    pub point: Vec<BigInt>,
    /// Coefficients of `x^g` on the subcone's generators. `None` for
    /// representatives relocated in mode (ii).
    pub p: Option<Vec<BigInt>>,
    /// `x^g − g` in `Wⁱ`-coordinates.
    pub tau: Vec<BigInt>,
    /// Nonnegative `c ∈ Z^n` with `A c = x^g`.
    pub combination: Vec<BigInt>,
}

impl CosetEntry {
    pub fn support(&self) -> usize {
        self.combination.iter().filter(|v| !v.is_zero()).count()
    }
}

#[derive(Clone, Debug)]
pub struct SubconePlan {
    /// `cone(Wⁱ)`; its column indices refer to `A`.
    pub cone: SimplicialCone,
    pub group: ResidueGroup,
    pub phi: u32,
    /// Column indices of `A` chosen as generators of `G_{Wⁱ}(A)`.
    pub generators: Vec<usize>,
    pub coset_table: BTreeMap<GroupElement, CosetEntry>,
    pub shift: OverlapShift,
    /// `Λ` as built from this subcone alone.
    pub lattice: Lattice,
}

impl SubconePlan {
    pub fn z(&self) -> &[BigInt] {
        &self.shift.point
    }

    /// Certificate for `b` from this subcone, if `b ∈ cone(Wⁱ) + zⁱ` and
    /// `b ∈ Λ`.
    fn assemble(&self, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
        if !self.lattice.contains(b) || !self.cone.contains_shifted(b, self.z()) {
            return Ok(None);
        }
        let g = self.group.residue(b)?;
        let entry = self
            .coset_table
            .get(&g)
            .ok_or_else(|| Error::Invariant(format!("no coset representative for {:?}", g.vec)))?;
        let rest: Vec<BigInt> = b.iter().zip(&entry.point).map(|(x, y)| x - y).collect();
        let lambda = self
            .cone
            .integer_coordinates(&rest)
            .filter(|l| l.iter().all(|v| !v.is_negative()))
            .ok_or_else(|| Error::Invariant("b − x^g is not a nonnegative lattice(Wⁱ) point".into()))?;
        let mut x = entry.combination.clone();
        for (&c, l) in self.cone.columns().iter().zip(&lambda) {
            x[c] += l;
        }
        Ok(Some(x))
    }
}

#[derive(Clone, Debug)]
pub struct Plan {
    a: IntegerMatrix,
    w_cols: Vec<usize>,
    mode: Mode,
    lattice: Lattice,
    subcones: Vec<SubconePlan>,
    phi_min: u32,
    phi_max: u32,
}

impl Plan {
    pub fn matrix(&self) -> &IntegerMatrix {
        &self.a
    }

    pub fn w_columns(&self) -> &[usize] {
        &self.w_cols
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// The feasibility lattice `Λ`.
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Subcones in dispatch order.
    pub fn subcones(&self) -> &[SubconePlan] {
        &self.subcones
    }

    pub fn phi_min(&self) -> u32 {
        self.phi_min
    }

    pub fn phi_max(&self) -> u32 {
        self.phi_max
    }

    pub fn bound_for(&self, subcone: usize) -> usize {
        let m = self.a.rows();
        match self.mode {
            Mode::I => m + self.subcones[subcone].phi as usize,
            Mode::II => 2 * m + self.phi_min as usize,
        }
    }

    /// Whether `b` lies in some untranslated subcone, i.e. in `cone(A)`.
    pub fn in_cone(&self, b: &[BigInt]) -> bool {
        self.subcones.iter().any(|s| s.cone.contains_int(b))
    }

    /// Whether `b` lies in some translated subcone `cone(Wⁱ) + zⁱ`.
    pub fn in_translated_cone(&self, b: &[BigInt]) -> bool {
        self.subcones.iter().any(|s| s.cone.contains_shifted(b, s.z()))
    }
}

/// Builds the plan for `A` with `W` given by column indices (all of `A` when
/// `None`).
pub fn build_plan(
    a: &IntegerMatrix,
    w_cols: Option<&[usize]>,
    mode: Mode,
    cfg: &PlanConfig,
) -> Result<Plan> {
    let m = a.rows();
    if linalg::rank(a) < m {
        return Err(Error::RankDeficient);
    }
    let w_cols: Vec<usize> = match w_cols {
        Some(c) => c.to_vec(),
        None => (0..a.cols()).collect(),
    };
    if let Some(&c) = w_cols.iter().find(|&&c| c >= a.cols()) {
        return Err(Error::InvalidParameters(format!("W column {c} out of range")));
    }
    let w = a.select_columns(&w_cols)?;
    if let Some(j) = geometry::first_uncovered_column(a, &w, cfg.cover_cap)? {
        return Err(Error::ConeMismatch(j));
    }
    let cover = geometry::caratheodory_cover(&w, cfg.cover_cap)?;
    let a_columns = a.columns();

    let mut subcones = Vec::with_capacity(cover.subcones.len());
    for sub in &cover.subcones {
        let cols: Vec<usize> = sub.columns().iter().map(|&c| w_cols[c]).collect();
        let cone = SimplicialCone::new(sub.basis().clone(), cols)?;
        subcones.push(plan_subcone(a, &a_columns, cone, cfg)?);
    }

    // Λ does not depend on the subcone it is built from.
    let lattice = subcones[0].lattice.clone();
    if let Some(bad) = subcones.iter().position(|s| s.lattice != lattice) {
        return Err(Error::Invariant(format!(
            "feasibility lattice of subcone {bad} differs from subcone 0"
        )));
    }
    let phi_min = subcones.iter().map(|s| s.phi).min().unwrap_or(0);
    let phi_max = subcones.iter().map(|s| s.phi).max().unwrap_or(0);

    if mode == Mode::II {
        subcones.sort_by_key(|s| s.phi);
        let (first, rest) = subcones.split_first_mut().expect("nonempty cover");
        for sp in rest {
            relocate(first, sp, m + phi_min as usize)?;
        }
    }

    Ok(Plan {
        a: a.clone(),
        w_cols,
        mode,
        lattice,
        subcones,
        phi_min,
        phi_max,
    })
}

fn plan_subcone(
    a: &IntegerMatrix,
    a_columns: &[Vec<BigInt>],
    cone: SimplicialCone,
    cfg: &PlanConfig,
) -> Result<SubconePlan> {
    let m = a.rows();
    let group = ResidueGroup::new(cone.basis())?;
    if group.order() > &BigInt::from(cfg.group_cap) {
        return Err(cap_exceeded("group order", group.order(), cfg.group_cap));
    }
    let phi = linalg::omega_with(group.order(), &cfg.factor)?;
    let generators = group.select_generator_indices(a_columns)?;
    if generators.len() > phi as usize {
        return Err(Error::Invariant(format!(
            "{} generators exceed φ = {phi}",
            generators.len()
        )));
    }
    let gen_vecs: Vec<Vec<BigInt>> = generators.iter().map(|&j| a_columns[j].clone()).collect();
    let reach = group.nonneg_reach(&gen_vecs, cfg.group_cap)?;

    let mut coset_table = BTreeMap::new();
    for (g, p) in reach {
        let mut point = vec![BigInt::zero(); m];
        let mut combination = vec![BigInt::zero(); a.cols()];
        for ((&j, v), pl) in generators.iter().zip(&gen_vecs).zip(&p) {
            for (x, vi) in point.iter_mut().zip(v) {
                *x += pl * vi;
            }
            combination[j] += pl;
        }
        let tau = coset_offset(&cone, &point, &g)?;
        coset_table.insert(
            g.clone(),
            CosetEntry {
                element: g,
                point,
                p: Some(p),
                tau,
                combination,
            },
        );
    }
    let points: Vec<Vec<BigInt>> = coset_table.values().map(|e| e.point.clone()).collect();
    let shift = cone.overlap_translate(&points)?;

    let mut lat_gens = gen_vecs;
    lat_gens.extend(cone.basis().columns());
    let lattice = Lattice::from_generators(m, &lat_gens)?;

    Ok(SubconePlan {
        cone,
        group,
        phi,
        generators,
        coset_table,
        shift,
        lattice,
    })
}

fn coset_offset(cone: &SimplicialCone, point: &[BigInt], g: &GroupElement) -> Result<Vec<BigInt>> {
    let diff: Vec<BigInt> = point.iter().zip(&g.vec).map(|(x, y)| x - y).collect();
    cone.integer_coordinates(&diff)
        .ok_or_else(|| Error::Invariant("representative outside its coset".into()))
}

const RELOCATION_DOUBLINGS: u32 = 512;

/// Replaces each representative of `sp` whose combination is wider than
/// `max_support` by a point of the same coset inside `cone(W¹) + z¹`,
/// expanded through `first`, then recomputes the shift of `sp`.
fn relocate(first: &SubconePlan, sp: &mut SubconePlan, max_support: usize) -> Result<()> {
    let m = first.cone.dim();
    let mut direction = vec![BigInt::zero(); m];
    for v in first.cone.basis().columns() {
        for (d, vi) in direction.iter_mut().zip(v) {
            *d += vi;
        }
    }
    let abs_det = sp.cone.abs_det();
    for entry in sp.coset_table.values_mut() {
        if entry.support() <= max_support {
            continue;
        }
        let mut scale = BigInt::from(1);
        let mut placed = None;
        for _ in 0..RELOCATION_DOUBLINGS {
            // Round c − x down onto lattice(Wⁱ): y stays within one
            // parallelepiped of the target c.
            let target: Vec<BigInt> = first
                .z()
                .iter()
                .zip(&direction)
                .map(|(z, d)| z + &scale * d)
                .collect();
            let diff: Vec<BigInt> = target.iter().zip(&entry.point).map(|(c, x)| c - x).collect();
            let k: Vec<BigInt> = sp
                .cone
                .scaled_coordinates(&diff)
                .into_iter()
                .map(|v| num_integer::Integer::div_floor(&v, &abs_det))
                .collect();
            let step = sp.cone.combine(&k);
            let y: Vec<BigInt> = entry.point.iter().zip(&step).map(|(x, s)| x + s).collect();
            if first.cone.contains_shifted(&y, first.z()) {
                placed = Some(y);
                break;
            }
            scale *= 2;
        }
        let y = placed.ok_or_else(|| Error::Invariant("relocation did not terminate".into()))?;
        let combination = first
            .assemble(&y)?
            .ok_or_else(|| Error::Invariant("relocated point not certified by subcone 1".into()))?;
        entry.tau = coset_offset(&sp.cone, &y, &entry.element)?;
        entry.point = y;
        entry.p = None;
        entry.combination = combination;
    }
    let points: Vec<Vec<BigInt>> = sp.coset_table.values().map(|e| e.point.clone()).collect();
    sp.shift = sp.cone.overlap_translate(&points)?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseCertificate {
    pub b: Vec<BigInt>,
    pub x: Vec<BigInt>,
    pub support: Vec<usize>,
    pub bound_claimed: usize,
    pub mode: Mode,
    pub subcone: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InfeasibleReason {
    /// `b ∉ Λ`.
    NotInLattice,
    /// `b ∉ cone(A)`.
    OutsideCone,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Certificate(SparseCertificate),
    Infeasible(InfeasibleReason),
    /// `b ∈ Λ ∩ cone(A)` but in no translated subcone.
    Uncovered,
}

pub fn solve_sparse(plan: &Plan, b: &[BigInt]) -> Result<Outcome> {
    let m = plan.a.rows();
    if b.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: b.len(),
        });
    }
    if !plan.lattice.contains(b) {
        return Ok(Outcome::Infeasible(InfeasibleReason::NotInLattice));
    }
    if !plan.in_cone(b) {
        return Ok(Outcome::Infeasible(InfeasibleReason::OutsideCone));
    }
    for (i, sp) in plan.subcones.iter().enumerate() {
        if let Some(x) = sp.assemble(b)? {
            let support = support_of(&x);
            let cert = SparseCertificate {
                b: b.to_vec(),
                x,
                support,
                bound_claimed: plan.bound_for(i),
                mode: plan.mode,
                subcone: i,
            };
            if cert.support.len() > cert.bound_claimed {
                return Err(Error::Invariant(format!(
                    "support {} exceeds claimed bound {}",
                    cert.support.len(),
                    cert.bound_claimed
                )));
            }
            return Ok(Outcome::Certificate(cert));
        }
    }
    Ok(Outcome::Uncovered)
}

fn support_of(x: &[BigInt]) -> Vec<usize> {
    x.iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, _)| i)
        .collect()
}

/// Independent re-check of a certificate against `A` and `b`.
pub fn verify_certificate(a: &IntegerMatrix, b: &[BigInt], cert: &SparseCertificate) -> bool {
    if cert.x.len() != a.cols() || cert.b != b {
        return false;
    }
    if cert.x.iter().any(|v| v.is_negative()) {
        return false;
    }
    if cert.support != support_of(&cert.x) || cert.support.len() > cert.bound_claimed {
        return false;
    }
    matches!(a.mul_vec(&cert.x), Ok(ax) if ax == b)
}

impl SparseCertificate {
    /// Line-oriented record: `b`, `x` (sparse `index:value`), `support`,
    /// `bound`, `mode`, `subcone`.
    pub fn to_record(&self) -> String {
        let xs: Vec<String> = self
            .x
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| format!("{i}:{v}"))
            .collect();
        let support: Vec<String> = self.support.iter().map(|i| i.to_string()).collect();
        format!(
            "b {}\nx {}\nsupport {}\nbound {}\nmode {}\nsubcone {}\n",
            format_vector(&self.b),
            xs.join(" "),
            support.join(" "),
            self.bound_claimed,
            self.mode,
            self.subcone
        )
        .replace(" \n", "\n")
    }
}

/// Parses every certificate record in `text`; `n` is the column count of
/// the matrix the certificates refer to. Records are separated by blank
/// lines and `#` starts a comment.
pub fn parse_certificates(text: &str, n: usize) -> Result<Vec<SparseCertificate>> {
    #[derive(Default)]
    struct Partial {
        b: Option<Vec<BigInt>>,
        x: Option<Vec<BigInt>>,
        support: Option<Vec<usize>>,
        bound: Option<usize>,
        mode: Option<Mode>,
        subcone: Option<usize>,
        start: usize,
    }
    fn finish(p: Partial) -> Result<SparseCertificate> {
        let missing = |what: &str| Error::Parse {
            line: p.start,
            msg: format!("certificate record missing `{what}`"),
        };
        Ok(SparseCertificate {
            b: p.b.clone().ok_or_else(|| missing("b"))?,
            x: p.x.clone().ok_or_else(|| missing("x"))?,
            support: p.support.clone().ok_or_else(|| missing("support"))?,
            bound_claimed: p.bound.ok_or_else(|| missing("bound"))?,
            mode: p.mode.ok_or_else(|| missing("mode"))?,
            subcone: p.subcone.ok_or_else(|| missing("subcone"))?,
        })
    }

    let mut out = Vec::new();
    let mut cur: Option<Partial> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            if let Some(p) = cur.take() {
                out.push(finish(p)?);
            }
            continue;
        }
        let p = cur.get_or_insert_with(|| Partial {
            start: line_no,
            ..Partial::default()
        });
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let int = |t: &str| BigInt::from_str(t).map_err(|_| err(format!("not an integer: `{t}`")));
        let idx = |t: &str| t.parse::<usize>().map_err(|_| err(format!("not an index: `{t}`")));
        match key {
            "b" => p.b = Some(rest.split_whitespace().map(int).collect::<Result<_>>()?),
            "x" => {
                let mut x = vec![BigInt::zero(); n];
                for tok in rest.split_whitespace() {
                    let (i, v) = tok
                        .split_once(':')
                        .ok_or_else(|| err(format!("expected index:value, found `{tok}`")))?;
                    let i = idx(i)?;
                    if i >= n {
                        return Err(err(format!("index {i} out of range for {n} columns")));
                    }
                    x[i] = int(v)?;
                }
                p.x = Some(x);
            }
            "support" => p.support = Some(rest.split_whitespace().map(idx).collect::<Result<_>>()?),
            "bound" => p.bound = Some(idx(rest.trim())?),
            "mode" => p.mode = Some(Mode::from_str(rest.trim()).map_err(|e| err(e.to_string()))?),
            "subcone" => p.subcone = Some(idx(rest.trim())?),
            other => return Err(err(format!("unknown record field `{other}`"))),
        }
    }
    if let Some(p) = cur.take() {
        out.push(finish(p)?);
    }
    Ok(out)
}

/// Half-open bracket `[lo, hi)` around a base-2 logarithm, or the exact
/// value when `lo == hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Log2Bracket {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Log2Bracket {
    /// Bracket of `log₂(q)` for `q > 0`.
    pub fn of(q: &BigRational) -> Option<Self> {
        let k = linalg::floor_log2(q)?;
        let lo = BigRational::from_integer(BigInt::from(k));
        let exact = pow2(k) == *q;
        let hi = if exact { lo.clone() } else { &lo + BigRational::from_integer(1.into()) };
        Some(Log2Bracket { lo, hi })
    }

    /// Bracket of `log₂(√q)`.
    pub fn of_sqrt(q: &BigRational) -> Option<Self> {
        let b = Log2Bracket::of(q)?;
        let half = BigRational::new(1.into(), 2.into());
        Some(Log2Bracket {
            lo: b.lo * &half,
            hi: b.hi * &half,
        })
    }

    pub fn shifted(&self, by: usize) -> Self {
        let k = BigRational::from_integer(BigInt::from(by));
        Log2Bracket {
            lo: &self.lo + &k,
            hi: &self.hi + &k,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

fn pow2(k: i64) -> BigRational {
    let one = BigInt::from(1);
    if k >= 0 {
        BigRational::from_integer(one << k as usize)
    } else {
        BigRational::new(one.clone(), one << (-k) as usize)
    }
}

impl fmt::Display for Log2Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{}, {})", self.lo, self.hi)
        }
    }
}

/// Support bounds implied by the minor statistics of `W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportBounds {
    pub m: usize,
    /// `m + φ^max(W)`.
    pub mode_i: usize,
    /// `2m + φ^min(W)`.
    pub mode_ii: usize,
    /// `m + log₂ δ^max(W)`.
    pub relaxed_i: Log2Bracket,
    /// `2m + log₂ δ^min(W)`.
    pub relaxed_ii: Log2Bracket,
    /// `m + log₂(g⁻¹ √det(AAᵀ))`.
    pub gram: Log2Bracket,
    /// `m + log₂(g⁻¹ δ^max)`; not backed by a proof.
    pub remark_i: Log2Bracket,
    /// `2m + log₂(g⁻¹ δ^min)`; not backed by a proof.
    pub remark_ii: Log2Bracket,
}

pub fn support_bounds(stats: &MinorStats, m: usize) -> SupportBounds {
    let q = |v: &BigInt| BigRational::from_integer(v.clone());
    let g = q(&stats.minor_gcd);
    let br = |v: &BigRational| Log2Bracket::of(v).expect("positive minor data");
    SupportBounds {
        m,
        mode_i: m + stats.phi_max as usize,
        mode_ii: 2 * m + stats.phi_min as usize,
        relaxed_i: br(&q(&stats.delta_max)).shifted(m),
        relaxed_ii: br(&q(&stats.delta_min)).shifted(2 * m),
        gram: Log2Bracket::of_sqrt(&(q(&stats.gram_det) / (&g * &g)))
            .expect("positive Gram determinant")
            .shifted(m),
        remark_i: br(&(q(&stats.delta_max) / &g)).shifted(m),
        remark_ii: br(&(q(&stats.delta_min) / &g)).shifted(2 * m),
    }
}

impl fmt::Display for SupportBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "bound (i): {}", self.mode_i)?;
        writeln!(f, "bound (ii): {}", self.mode_ii)?;
        writeln!(f, "bound (i) log2 relaxation: {}", self.relaxed_i)?;
        writeln!(f, "bound (ii) log2 relaxation: {}", self.relaxed_ii)?;
        writeln!(f, "gram bound m + log2(sqrt(det(AA^T))/g): {}", self.gram)?;
        writeln!(f, "g-divided bound (i) [no proof]: {}", self.remark_i)?;
        writeln!(f, "g-divided bound (ii) [no proof]: {}", self.remark_ii)
    }
}

/// In-process plan cache keyed by the matrix content hash, `W` and mode.
#[derive(Default)]
pub struct PlanCache {
    plans: Mutex<HashMap<([u8; 32], Vec<usize>, Mode), Arc<Plan>>>,
}

impl PlanCache {
    pub fn new() -> Self {
        PlanCache::default()
    }

    pub fn key(a: &IntegerMatrix) -> [u8; 32] {
        Sha256::digest(a.to_text().as_bytes()).into()
    }

    pub fn get_or_build(
        &self,
        a: &IntegerMatrix,
        w_cols: Option<&[usize]>,
        mode: Mode,
        cfg: &PlanConfig,
    ) -> Result<Arc<Plan>> {
        let w: Vec<usize> = w_cols.map_or_else(|| (0..a.cols()).collect(), <[usize]>::to_vec);
        let key = (PlanCache::key(a), w.clone(), mode);
        if let Some(p) = self.plans.lock().expect("lock").get(&key) {
            return Ok(p.clone());
        }
        let plan = Arc::new(build_plan(a, Some(&w), mode, cfg)?);
        self.plans.lock().expect("lock").insert(key, plan.clone());
        Ok(plan)
    }

    pub fn len(&self) -> usize {
        self.plans.lock().expect("lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
