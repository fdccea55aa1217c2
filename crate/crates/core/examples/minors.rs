//! Minor statistics of a small matrix and the support bounds derived from them.
use sparsebound::linalg::minor_stats;
use sparsebound::solver::support_bounds;
use sparsebound::IntegerMatrix;

fn main() -> sparsebound::Result<()> {
    let a = IntegerMatrix::from_rows(&[[6, 10, 15, 0], [0, 0, 0, 1]]);
    let stats = minor_stats(&a)?;
    println!("Delta = {:?}", stats.delta_set);
    println!("Phi   = {:?}", stats.phi_set);
    println!("gcd of minors = {}, det(AA^T) = {}", stats.minor_gcd, stats.gram_det);
    println!("{}", support_bounds(&stats, a.rows()));
    Ok(())
}
