//! Lower-bound instances built from products of distinct primes, checked
//! against the exact oracle.
use sparsebound::asymptotics::{gen_primorial, PrimorialKind};
use sparsebound::matrix::int_vec;
use sparsebound::oracle::{Oracle, OracleCaps};

fn main() -> sparsebound::Result<()> {
    let inst = gen_primorial(PrimorialKind::Atilde, 1, 3, None)?;
    print!("{}", inst.matrix.to_text());
    println!("primes {:?}, q {:?}, Frobenius {:?}", inst.primes, inst.q, inst.frobenius);

    // Right-hand sides congruent to 1 mod delta, far on the negative side,
    // need every column.
    let oracle = Oracle::new(&inst.matrix, OracleCaps::default())?;
    let delta = inst.delta as i64;
    for k in 1..=3 {
        let b = 1 - k * delta;
        println!("sigma({b}) = {:?}", oracle.sigma(&int_vec(&[b]))?.value);
    }
    Ok(())
}
