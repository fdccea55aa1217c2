//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

mod common;

use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sparsebound::asymptotics::{
    density_sweep, gen_primorial, lemma4_ratio, sigma_asy_estimate, PrimorialKind, SweepConfig,
};
use sparsebound::geometry::SimplicialCone;
use sparsebound::linalg::{self, minor_stats, omega};
use sparsebound::matrix::{int_vec, IntegerMatrix};
use sparsebound::oracle::{frobenius_number, Feasibility, Oracle, OracleCaps, SigmaValue};
use sparsebound::residue::ResidueGroup;
use sparsebound::solver::{build_plan, solve_sparse, verify_certificate, Mode, Outcome, Plan, PlanConfig};

use common::{all_minors, box_points, cofactor_det, in_cone_independent, random_suite};

type Verdict = Result<String, String>;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let el = start.elapsed();
    if el > limit {
        Err(format!("{what} took {el:.1?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

/// Results of solving every `b` in the box of one suite matrix.
struct BoxAudit {
    certificates: usize,
    infeasible_declared: usize,
    not_in_lattice: usize,
    uncovered: usize,
    violations: Vec<String>,
    disagreements: Vec<String>,
}

fn audit(a: &IntegerMatrix, mode: Mode, with_oracle: bool) -> BoxAudit {
    let plan = build_plan(a, None, mode, &PlanConfig::default()).expect("suite plan");
    let oracle = Oracle::new(a, OracleCaps::default()).unwrap();
    let m = a.rows();
    let bound = match mode {
        Mode::I => m + plan.phi_max() as usize,
        Mode::II => 2 * m + plan.phi_min() as usize,
    };
    let mut r = BoxAudit {
        certificates: 0,
        infeasible_declared: 0,
        not_in_lattice: 0,
        uncovered: 0,
        violations: Vec::new(),
        disagreements: Vec::new(),
    };
    for b in box_points(20, m) {
        match solve_sparse(&plan, &b).unwrap() {
            Outcome::Certificate(c) => {
                r.certificates += 1;
                if !verify_certificate(a, &b, &c) || c.support.len() > bound {
                    r.violations.push(format!("A={a:?} b={b:?} cert={c:?}"));
                    continue;
                }
                if with_oracle {
                    match oracle.sigma(&b).unwrap().value {
                        SigmaValue::Finite(s) if s <= c.support.len() => {}
                        other => r.violations.push(format!("A={a:?} b={b:?} oracle {other:?}")),
                    }
                }
            }
            Outcome::Infeasible(reason) => {
                r.infeasible_declared += 1;
                if reason == sparsebound::solver::InfeasibleReason::NotInLattice {
                    r.not_in_lattice += 1;
                }
                if with_oracle && oracle.feasible(&b).unwrap() != Feasibility::Infeasible {
                    r.disagreements.push(format!("A={a:?} b={b:?} {reason:?}"));
                }
            }
            Outcome::Uncovered => r.uncovered += 1,
        }
    }
    r
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let a = IntegerMatrix::from_rows(&[[3, 2, -6]]);
    let oracle = Oracle::new(&a, OracleCaps::default()).unwrap();
    let mut checked = 0;
    for b in -60i64..=60 {
        if b < 0 && b.rem_euclid(6) == 1 {
            let r = oracle.sigma(&int_vec(&[b])).unwrap();
            if r.value != SigmaValue::Finite(3) || !r.exhaustive {
                return Err(format!("b={b}: {:?}", r.value));
            }
            checked += 1;
        }
    }
    within(start, Duration::from_secs(10), "criterion 1")?;
    Ok(format!("{checked} right-hand sides, all σ = 3, {:.2?}", start.elapsed()))
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let inst = gen_primorial(PrimorialKind::A, 2, 2, Some(&[2, 3])).unwrap();
    let a = &inst.matrix;
    let plan = build_plan(a, None, Mode::I, &PlanConfig::default()).unwrap();
    let oracle = Oracle::new(a, OracleCaps::default()).unwrap();
    let rows = density_sweep(&plan, &oracle, &SweepConfig::new(vec![6, 12, 24, 48], vec![3, 4])).unwrap();
    let bbar = inst.frobenius.unwrap();
    let mut detail = Vec::new();
    for r in &rows {
        if r.n_unknown > 0 {
            return Err(format!("t={} has {} undecided points", r.t, r.n_unknown));
        }
        let r3 = r.ratio(3).unwrap();
        let r4 = r.ratio(4).unwrap();
        if r.t > bbar && r4 != q(1, 1) {
            return Err(format!("t={}: ratio(k=4) = {r4}", r.t));
        }
        if r3 > q(93, 100) {
            return Err(format!("t={}: ratio(k=3) = {r3} > 0.93", r.t));
        }
        detail.push(format!("t={} r3={r3}", r.t));
    }
    let est = sigma_asy_estimate(&rows, &q(1, 100)).unwrap();
    if est.k_hat != Some(4) {
        return Err(format!("k_hat = {:?}", est.k_hat));
    }
    within(start, Duration::from_secs(300), "criterion 2")?;
    Ok(format!("{}; k_hat = 4, {:.2?}", detail.join(", "), start.elapsed()))
}

fn criterion_3_and_9(suite: &[IntegerMatrix]) -> (Verdict, Verdict) {
    let start = Instant::now();
    let (mut certs, mut uncovered, mut infeasible, mut lattice) = (0, 0, 0, 0);
    let mut violations = Vec::new();
    let mut disagreements = Vec::new();
    for a in suite {
        let r = audit(a, Mode::I, true);
        certs += r.certificates;
        uncovered += r.uncovered;
        infeasible += r.infeasible_declared;
        lattice += r.not_in_lattice;
        violations.extend(r.violations);
        disagreements.extend(r.disagreements);
    }
    let elapsed = start.elapsed();
    let c3 = if !violations.is_empty() {
        Err(format!("{} violations, first: {}", violations.len(), violations[0]))
    } else if suite.len() < 25 {
        Err(format!("suite has only {} matrices", suite.len()))
    } else {
        within(start, Duration::from_secs(600), "criterion 3").map(|_| {
            format!(
                "{} matrices, {certs} certificates, {uncovered} uncovered, 0 violations, {elapsed:.1?}",
                suite.len()
            )
        })
    };
    let c9 = if !disagreements.is_empty() {
        Err(format!("{} disagreements, first: {}", disagreements.len(), disagreements[0]))
    } else if lattice == 0 {
        Err("no right-hand side was outside the lattice; the check was vacuous".into())
    } else {
        Ok(format!("{infeasible} infeasible declarations ({lattice} by lattice), all confirmed"))
    };
    (c3, c9)
}

fn criterion_4(suite: &[IntegerMatrix]) -> Verdict {
    let start = Instant::now();
    let mut certs = 0;
    for a in suite {
        let r = audit(a, Mode::II, false);
        if let Some(v) = r.violations.first() {
            return Err(format!("mode (ii) violation: {v}"));
        }
        certs += r.certificates;
    }
    // B instance, m = 1, d = 4: two rows, φ^min(B) = 0.
    let inst = gen_primorial(PrimorialKind::B, 1, 4, Some(&[2, 3, 5, 7])).unwrap();
    let b_mat = &inst.matrix;
    let m = inst.m;
    let plan = build_plan(b_mat, None, Mode::II, &PlanConfig::default()).unwrap();
    if plan.phi_min() != 0 {
        return Err(format!("φ^min(B) = {}", plan.phi_min()));
    }
    let mut b_certs = 0;
    for b in box_points(20, 2) {
        if let Outcome::Certificate(c) = solve_sparse(&plan, &b).unwrap() {
            if !verify_certificate(b_mat, &b, &c) || c.support.len() > 2 * m + 2 {
                return Err(format!("B certificate {c:?}"));
            }
            b_certs += 1;
        }
    }
    let oracle = Oracle::new(b_mat, OracleCaps::default()).unwrap();
    for k in 1..=3i64 {
        let w = int_vec(&[1 - 210 * k, 0]);
        let s = oracle.sigma(&w).unwrap();
        if s.value != SigmaValue::Finite(m + inst.d) || !s.exhaustive {
            return Err(format!("σ(B, {w:?}) = {:?}", s.value));
        }
    }
    Ok(format!(
        "{certs} suite certificates ≤ 2m+φ^min; B: {b_certs} certificates ≤ {}, witnesses σ = {} ({:.1?})",
        2 * m + 2,
        m + inst.d,
        start.elapsed()
    ))
}

/// Largest coordinate of any shift, which sets the scale of the schedule.
fn shift_scale(plan: &Plan) -> u64 {
    plan.subcones()
        .iter()
        .flat_map(|s| s.z().iter())
        .map(|v| v.abs())
        .max()
        .unwrap_or_else(BigInt::zero)
        .max(BigInt::one())
        .try_into()
        .expect("small shift")
}

fn criterion_5(suite: &[IntegerMatrix]) -> Verdict {
    let start = Instant::now();
    let mut finals = Vec::new();
    for a in suite {
        let plan = build_plan(a, None, Mode::I, &PlanConfig::default()).unwrap();
        let s = shift_scale(&plan);
        let ratios: Vec<BigRational> = [4u64, 8, 16, 32]
            .iter()
            .map(|&f| lemma4_ratio(&plan, s * f, 100_000_000).unwrap().ratio().unwrap())
            .collect();
        if ratios.iter().any(|r| *r > q(1, 1)) {
            return Err(format!("ratio above 1 for {a:?}"));
        }
        let tail = &ratios[ratios.len() - 3..];
        if !tail.windows(2).all(|w| w[0] <= w[1]) {
            return Err(format!("A={a:?}: last three ratios not nondecreasing: {ratios:?}"));
        }
        let last = ratios.last().unwrap();
        if *last < q(9, 10) {
            return Err(format!("A={a:?}: final ratio {last} < 9/10 (scale {s})"));
        }
        finals.push(last.clone());
    }
    let worst = finals.iter().min().unwrap();
    Ok(format!(
        "{} instances, worst final ratio {worst} ({:.1?})",
        finals.len(),
        start.elapsed()
    ))
}

fn random_invertible(rng: &mut ChaCha8Rng, m: usize, entry: i64, max_det: i64) -> IntegerMatrix {
    loop {
        let rows: Vec<Vec<i64>> = (0..m)
            .map(|_| (0..m).map(|_| rng.gen_range(-entry..=entry)).collect())
            .collect();
        let w = IntegerMatrix::from_rows(&rows);
        let d = cofactor_det(&w.to_rows()).abs();
        if !d.is_zero() && d <= BigInt::from(max_det) {
            return w;
        }
    }
}

fn random_vec(rng: &mut ChaCha8Rng, m: usize, r: i64) -> Vec<BigInt> {
    (0..m).map(|_| BigInt::from(rng.gen_range(-r..=r))).collect()
}

/// Residues reachable from 0 by adding generator residues, computed with
/// `residue` on integer sums only.
fn closure(g: &ResidueGroup, gens: &[Vec<BigInt>]) -> BTreeSet<Vec<BigInt>> {
    let zero = vec![BigInt::zero(); g.dim()];
    let mut seen = BTreeSet::from([zero.clone()]);
    let mut stack = vec![zero];
    while let Some(v) = stack.pop() {
        for s in gens {
            let sum: Vec<BigInt> = v.iter().zip(s).map(|(a, b)| a + b).collect();
            let r = g.residue(&sum).unwrap().vec;
            if seen.insert(r.clone()) {
                stack.push(r);
            }
        }
    }
    seen
}

fn parallelepiped_points(w: &IntegerMatrix) -> usize {
    let m = w.rows();
    let (mut lo, mut hi) = (vec![0i64; m], vec![0i64; m]);
    for j in 0..m {
        for i in 0..m {
            let v: i64 = w.get(i, j).try_into().unwrap();
            if v < 0 {
                lo[i] += v;
            } else {
                hi[i] += v;
            }
        }
    }
    let ranges: Vec<std::ops::RangeInclusive<i64>> = (0..m).map(|i| lo[i]..=hi[i]).collect();
    use itertools::Itertools;
    ranges
        .into_iter()
        .multi_cartesian_product()
        .filter(|p| {
            let x: Vec<BigRational> = p.iter().map(|&v| BigRational::from_integer(v.into())).collect();
            common::cramer_coordinates(w, &x)
                .iter()
                .all(|c| !c.is_negative() && *c < BigRational::one())
        })
        .count()
}

fn criterion_6() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for trial in 0..100 {
        let m = 1 + trial % 3;
        let w = random_invertible(&mut rng, m, 6, 200);
        let g = ResidueGroup::new(&w).unwrap();
        let det = cofactor_det(&w.to_rows()).abs();
        let elems = g.enumerate(1_000).unwrap();
        let distinct: HashSet<_> = elems.iter().map(|e| e.vec.clone()).collect();
        if BigInt::from(elems.len()) != det || distinct.len() != elems.len() {
            return Err(format!("W={w:?}: enumerated {} elements, |det| = {det}", elems.len()));
        }
        if BigInt::from(parallelepiped_points(&w)) != det {
            return Err(format!("W={w:?}: parallelepiped count differs from |det|"));
        }
        for _ in 0..100 {
            let (b1, b2) = (random_vec(&mut rng, m, 50), random_vec(&mut rng, m, 50));
            let sum: Vec<BigInt> = b1.iter().zip(&b2).map(|(a, b)| a + b).collect();
            let lhs = g.residue(&sum).unwrap();
            let rhs = g.add(&g.residue(&b1).unwrap(), &g.residue(&b2).unwrap()).unwrap();
            if lhs != rhs {
                return Err(format!("W={w:?}: residue not additive at {b1:?}, {b2:?}"));
            }
        }
        let candidates: Vec<Vec<BigInt>> = (0..6).map(|_| random_vec(&mut rng, m, 10)).collect();
        let chosen = g.select_generators(&candidates).unwrap();
        if chosen.len() as u32 > omega(&det).unwrap() {
            return Err(format!("W={w:?}: {} generators > Ω(|det|)", chosen.len()));
        }
        if closure(&g, &chosen) != closure(&g, &candidates) {
            return Err(format!("W={w:?}: chosen generators span a smaller subgroup"));
        }
    }
    within(start, Duration::from_secs(60), "criterion 6")?;
    Ok(format!("100 groups, 10000 additivity checks ({:.1?})", start.elapsed()))
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..100 {
        let m = 1 + trial % 4;
        let w = random_invertible(&mut rng, m, 4, i64::MAX);
        let cone = SimplicialCone::new(w.clone(), (0..m).collect()).unwrap();
        let k = 1 + rng.gen_range(0..5);
        let xs: Vec<Vec<BigInt>> = (0..k).map(|_| random_vec(&mut rng, m, 20)).collect();
        let z = cone.overlap_translate(&xs).map_err(|e| format!("W={w:?}: {e}"))?.point;
        if !in_cone_independent(&w, &z) {
            return Err(format!("W={w:?} xs={xs:?}: z ∉ K"));
        }
        for x in &xs {
            let d: Vec<BigInt> = z.iter().zip(x).map(|(a, b)| a - b).collect();
            if !in_cone_independent(&w, &d) {
                return Err(format!("W={w:?} x={x:?}: z − x ∉ K"));
            }
        }
    }
    Ok("100 instances, z ∈ K and z − xⁱ ∈ K in every case".into())
}

fn criterion_8(suite: &[IntegerMatrix]) -> Verdict {
    for a in suite {
        let minors = all_minors(a);
        let squares: BigInt = minors.iter().map(|d| d * d).sum();
        let gram = linalg::det(&a.gram()).unwrap();
        let stats = minor_stats(a).unwrap();
        if gram != squares || stats.gram_det != squares || stats.minor_square_sum != squares {
            return Err(format!("A={a:?}: det(AAᵀ) = {gram}, Σ minors² = {squares}"));
        }
        let dmax = minors.iter().map(|d| d.abs()).max().unwrap();
        if &dmax * &dmax > gram || dmax != stats.delta_max {
            return Err(format!("A={a:?}: δ^max = {dmax}"));
        }
    }
    Ok(format!("{} matrices, exact equality and (δ^max)² ≤ det(AAᵀ)", suite.len()))
}

fn representable(v: u64, coins: &[u64]) -> bool {
    match coins.split_first() {
        None => v == 0,
        Some((&c, rest)) => (0..=v / c).any(|k| representable(v - k * c, rest)),
    }
}

fn criterion_10() -> Verdict {
    for (coins, want) in [(vec![2u64, 3], 1u64), (vec![3, 5], 7), (vec![6, 10, 15], 29)] {
        let got = frobenius_number(&coins).map_err(|e| e.to_string())?;
        if got != want || representable(got, &coins) || !(got + 1..=got + coins[0]).all(|v| representable(v, &coins)) {
            return Err(format!("frobenius({coins:?}) = {got}, expected {want}"));
        }
    }
    let mut checked = 0;
    for primes in [vec![2u64, 3], vec![2, 3, 5], vec![3, 5, 7], vec![2, 3, 5, 7]] {
        let inst = gen_primorial(PrimorialKind::Atilde, 1, primes.len(), Some(&primes)).unwrap();
        let bbar = inst.frobenius.unwrap() as i64;
        let oracle = Oracle::new(&inst.matrix, OracleCaps::default()).unwrap();
        let q_cols: Vec<usize> = (0..inst.d).collect();
        if oracle.feasible_on(&q_cols, &int_vec(&[bbar])).unwrap() != Feasibility::Infeasible {
            return Err(format!("{primes:?}: b̄ = {bbar} is representable"));
        }
        for b in bbar + 1..=bbar + 200 {
            if !oracle.feasible_on(&q_cols, &int_vec(&[b])).unwrap().is_feasible() {
                return Err(format!("{primes:?}: b = {b} > b̄ not representable"));
            }
            if !oracle.feasible(&int_vec(&[b])).unwrap().is_feasible() {
                return Err(format!("{primes:?}: P(Ã, {b}) empty"));
            }
            checked += 1;
        }
    }
    Ok(format!("3 coin sets exact; {checked} right-hand sides above b̄ feasible"))
}

fn report(n: u32, name: &str, verdict: &Verdict) -> bool {
    match verdict {
        Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
        Err(detail) => println!("criterion {n:>2} FAIL  {name}: {detail}"),
    }
    verdict.is_ok()
}

fn main() {
    let suite = random_suite();
    let mut passed = 0;
    passed += report(1, "single-row primorial support", &criterion_1()) as usize;
    passed += report(2, "stacked primorial density", &criterion_2()) as usize;
    let (c3, c9) = criterion_3_and_9(&suite);
    passed += report(3, "mode (i) certificate suite", &c3) as usize;
    passed += report(4, "mode (ii) suite and B instance", &criterion_4(&suite)) as usize;
    passed += report(5, "translated-subcone coverage", &criterion_5(&suite)) as usize;
    passed += report(6, "residue group laws", &criterion_6()) as usize;
    passed += report(7, "overlap translation", &criterion_7()) as usize;
    passed += report(8, "Cauchy-Binet", &criterion_8(&suite)) as usize;
    passed += report(9, "lattice infeasibility soundness", &c9) as usize;
    passed += report(10, "Frobenius numbers", &criterion_10()) as usize;
    println!("acceptance: {passed} passed, {} failed", 10 - passed);
    if passed < 10 {
        std::process::exit(1);
    }
}
