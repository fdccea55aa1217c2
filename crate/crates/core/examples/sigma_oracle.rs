//! Exact minimum support of a nonnegative integer solution, and a Frobenius
//! number computed by dynamic programming.
use sparsebound::matrix::int_vec;
use sparsebound::oracle::{frobenius_number, Oracle, OracleCaps};
use sparsebound::IntegerMatrix;

fn main() -> sparsebound::Result<()> {
    let a = IntegerMatrix::from_rows(&[[3, 2, -6]]);
    let oracle = Oracle::new(&a, OracleCaps::default())?;
    for b in [-5, -11, 4, 7] {
        let r = oracle.sigma(&int_vec(&[b]))?;
        println!("sigma(b = {b}) = {:?}, witness {:?}", r.value, r.witness);
    }
    println!("Frobenius number of (6, 10, 15) = {}", frobenius_number(&[6, 10, 15])?);
    Ok(())
}
