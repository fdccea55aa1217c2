//! The finite group Z^m / W Z^m: Smith invariants, residues and a small
//! generating set taken from candidate vectors.
use sparsebound::matrix::{format_vector, int_vec};
use sparsebound::residue::ResidueGroup;
use sparsebound::IntegerMatrix;

fn main() -> sparsebound::Result<()> {
    let w = IntegerMatrix::from_rows(&[[4, 2], [0, 6]]);
    let g = ResidueGroup::new(&w)?;
    println!("order {} with invariants {:?}", g.order(), g.snf_diag());

    for b in [[1, 0], [5, 7], [-3, 2]] {
        let r = g.residue(&int_vec(&b))?;
        println!("residue of ({}, {}) = [{}]", b[0], b[1], format_vector(&r.vec));
    }

    let candidates = vec![int_vec(&[1, 0]), int_vec(&[0, 1]), int_vec(&[1, 1])];
    let gens = g.select_generator_indices(&candidates)?;
    println!("generators chosen: {gens:?}");
    let reach = g.nonneg_reach(&g.select_generators(&candidates)?, 10_000)?;
    println!("{} elements reached by nonnegative combinations", reach.len());
    Ok(())
}
