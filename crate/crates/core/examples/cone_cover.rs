//! Covering a cone by simplicial subcones and finding a common translate
//! inside several shifted copies of one subcone.
use sparsebound::geometry::{caratheodory_cover, SimplicialCone};
use sparsebound::matrix::{format_vector, int_vec};
use sparsebound::IntegerMatrix;

fn main() -> sparsebound::Result<()> {
    let w = IntegerMatrix::from_rows(&[[1, 0, 1], [0, 1, 1]]);
    let cover = caratheodory_cover(&w, 1_000)?;
    for b in [[3, 1], [1, 3], [-1, 2]] {
        match cover.locate(&int_vec(&b)) {
            Some(i) => println!("({}, {}) lies in subcone {i}", b[0], b[1]),
            None => println!("({}, {}) is outside the cone", b[0], b[1]),
        }
    }

    let k = SimplicialCone::from_rows(&[[2, 1], [0, 3]])?;
    let xs = vec![int_vec(&[1, 2]), int_vec(&[-4, 1]), int_vec(&[3, -1])];
    let shift = k.overlap_translate(&xs)?;
    println!(
        "z = ({}) with multipliers ({}), verified: {}",
        format_vector(&shift.point),
        format_vector(&shift.multipliers),
        shift.verify(&k, &xs)
    );
    Ok(())
}
