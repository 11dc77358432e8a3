//! Serializes joint moves into rounds and rechecks the same property.
//!
//! Each original state q grows intermediate states q+m recording the first
//! agent's committed move; the marker prop `mid` holds there. A formula on
//! the original game maps over by relativizing every step: X becomes a
//! block of X's crossing the round, and state formulas are pinned to
//! `!mid` so they are read only at round boundaries. One original step
//! takes p transitions, so a window of k steps becomes p * k.

use atlsc::game::{AgentId, Cgso};
use atlsc::logic::{translate_turn_based, StateFormula};
use atlsc::strategy::{check_windowed, CheckOptions};

fn main() -> anyhow::Result<()> {
    let src = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/games/reach.game"
    ))?;
    let g = Cgso::parse(&src)?;
    let p = g.agents().len();
    let order: Vec<AgentId> = (0..p).map(AgentId).collect();
    let tb = g.to_turn_based(&order)?;
    println!("{} states -> {} after serialization", g.n_states(), tb.n_states());

    let phi = StateFormula::parse("<<a1>> F f")?;
    let shifted = translate_turn_based(&phi, p, "mid");
    println!("original:   {phi}");
    println!("serialized: {shifted}");

    let k = 2;
    let before = check_windowed(&g, &phi, g.init().unwrap(), k, CheckOptions::default())?;
    let after = check_windowed(&tb, &shifted, tb.init().unwrap(), p * k, CheckOptions::default())?;
    println!("window {k} on the original:  {}", before.holds);
    println!("window {} on the serialized: {}", p * k, after.holds);
    Ok(())
}
