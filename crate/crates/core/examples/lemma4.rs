//! How much of each subcone's lattice points the translated subcones keep,
//! counted exactly on growing boxes.
use sparsebound::asymptotics::lemma4_ratio;
use sparsebound::solver::{build_plan, Mode, PlanConfig};
use sparsebound::IntegerMatrix;

fn main() -> sparsebound::Result<()> {
    let a = IntegerMatrix::from_rows(&[[1, 2, 3, 3], [5, 1, 4, 4]]);
    let plan = build_plan(&a, None, Mode::I, &PlanConfig::default())?;
    for sp in plan.subcones() {
        println!("subcone {:?} shifted by {:?}", sp.cone.columns(), sp.z());
    }
    for t in [50, 200, 800, 3200] {
        let r = lemma4_ratio(&plan, t, 100_000_000)?;
        let approx = r.translated as f64 / r.untranslated as f64;
        println!("t = {t:>5}: {} / {} = {approx:.4}", r.translated, r.untranslated);
    }
    Ok(())
}
