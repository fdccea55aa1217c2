//! Fraction of feasible right-hand sides in growing boxes that admit a
//! solution of support at most k, and the resulting asymptotic estimate.
use num_rational::BigRational;
use sparsebound::asymptotics::{density_sweep, rows_to_csv, sigma_asy_estimate, SweepConfig};
use sparsebound::oracle::{Oracle, OracleCaps};
use sparsebound::solver::{build_plan, Mode, PlanConfig};
use sparsebound::IntegerMatrix;

fn main() -> sparsebound::Result<()> {
    let a = IntegerMatrix::from_rows(&[[3, 2, -6]]);
    let plan = build_plan(&a, None, Mode::I, &PlanConfig::default())?;
    let oracle = Oracle::new(&a, OracleCaps::default())?;
    let cfg = SweepConfig::new(vec![10, 100, 1000], vec![1, 2, 3]);
    let rows = density_sweep(&plan, &oracle, &cfg)?;
    print!("{}", rows_to_csv(&rows));
    let est = sigma_asy_estimate(&rows, &BigRational::new(1.into(), 100.into()))?;
    println!("estimated asymptotic support: {:?}", est.k_hat);
    Ok(())
}
