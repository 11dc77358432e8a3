//! Decides memoryless strategy formulas by enumerating tables directly.
//!
//! The witness for the first formula is the interesting part: a1 cannot
//! tell q2 from q3, yet playing m1 from both closes a loop that must pass
//! through the goal. The second formula fails because no single table
//! reaches f in exactly three steps from both members of the class.

use atlsc::game::Cgso;
use atlsc::logic::StateFormula;
use atlsc::strategy::{check_memoryless, CheckOptions};

fn main() -> anyhow::Result<()> {
    let src = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/games/reach.game"
    ))?;
    let g = Cgso::parse(&src)?;
    let at = g.init().expect("reach.game declares init");

    for raw in ["<<a1>>_0 F f", "<<a1>>_0 X X X f"] {
        let phi = StateFormula::parse(raw)?;
        let r = check_memoryless(&g, &phi, at, CheckOptions::default())?;
        println!("{raw}  =>  {}", r.holds);
        for table in &r.witness {
            println!("  {}", table.render(&g));
        }
        println!(
            "  ({} tables tried, {} states touched)",
            r.stats.tables_enumerated, r.stats.states_explored
        );
    }
    Ok(())
}
