//! Build a solve plan once, then certify sparse nonnegative solutions for a
//! batch of right-hand sides and check each certificate independently.
use sparsebound::matrix::int_vec;
use sparsebound::solver::{build_plan, solve_sparse, verify_certificate, Mode, Outcome, PlanConfig};
use sparsebound::IntegerMatrix;

fn main() -> sparsebound::Result<()> {
    let a = IntegerMatrix::from_rows(&[[3, 2, -6, 0, 0, 0], [0, 0, 0, 3, 2, -6]]);
    for mode in [Mode::I, Mode::II] {
        let plan = build_plan(&a, None, mode, &PlanConfig::default())?;
        println!("mode {mode}: {} subcones, phi in [{}, {}]", plan.subcones().len(), plan.phi_min(), plan.phi_max());
        for b in [[5, 12], [-7, 1], [1, 1], [40, -13]] {
            let b = int_vec(&b);
            match solve_sparse(&plan, &b)? {
                Outcome::Certificate(c) => {
                    assert!(verify_certificate(&a, &b, &c));
                    print!("{}", c.to_record());
                }
                other => println!("b {:?}: {other:?}", b),
            }
        }
    }
    Ok(())
}
