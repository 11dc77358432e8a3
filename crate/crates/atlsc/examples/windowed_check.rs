//! Checks memoryful formulas against strategies over bounded histories.
//!
//! A window of length k lets a strategy react to the last k observation
//! classes rather than just the current one. On `fork.game` that split
//! matters: after any first step a1 can force f in one more move, but no
//! strategy fixed before the first step forces f two moves out, because
//! the committed choice is wrong in one of the two branches.

use atlsc::game::Cgso;
use atlsc::logic::StateFormula;
use atlsc::strategy::{check_windowed, CheckOptions};

fn main() -> anyhow::Result<()> {
    let fork = Cgso::parse(&std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/games/fork.game"
    ))?)?;
    let at = fork.init().expect("fork.game declares init");
    let phi = StateFormula::parse("(A X (<<a1>> X f)) & !(<<a1>> X X f)")?;
    let r = check_windowed(&fork, &phi, at, 3, CheckOptions::default())?;
    println!("fork.game, window 3: {phi}  =>  {}", r.holds);

    let reach = Cgso::parse(&std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/games/reach.game"
    ))?)?;
    let at = reach.init().expect("reach.game declares init");
    for (raw, k) in [("<<a1>> F f", 2), ("<<a1>> X X X f", 3)] {
        let phi = StateFormula::parse(raw)?;
        let r = check_windowed(&reach, &phi, at, k, CheckOptions::default())?;
        println!("reach.game, window {k}: {raw}  =>  {}", r.holds);
        for table in &r.witness {
            println!("  {}", table.render(&reach));
        }
    }
    Ok(())
}
