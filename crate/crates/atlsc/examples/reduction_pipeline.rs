//! Compiles a strategy formula to a quantified one and solves that instead.
//!
//! The pipeline: take the underlying structure of the game (state and
//! observation atoms added), rewrite each `<<A>>_0` into a block of
//! propositional quantifiers that pick a move table, then hand the result
//! to the quantified-logic engine. The quantifier witnesses read back
//! directly as the strategy: each `m#agent@move` extension lists the
//! states where that table plays that move.

use atlsc::game::Cgso;
use atlsc::logic::StateFormula;
use atlsc::qctl::{check_structure, QctlOptions};
use atlsc::reduce::build_memoryless_reduction;

fn main() -> anyhow::Result<()> {
    let src = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/games/reach.game"
    ))?;
    let g = Cgso::parse(&src)?;
    let at = g.init().expect("reach.game declares init");
    let phi = StateFormula::parse("<<a1>>_0 F f")?;

    let red = build_memoryless_reduction(&g, &phi, at)?;
    println!(
        "input: {} nodes   compiled: {} nodes over {} structure states",
        phi.count_nodes(),
        red.formula.count_nodes(),
        red.structure.n_states()
    );

    let rat = red.structure.state_id(&red.at).unwrap();
    let out = check_structure(&red.structure, &red.formula, rat, QctlOptions::default())?;
    println!("verdict at {}: {}", red.at, out.holds);
    for (prop, ext) in &out.witness {
        println!("  {prop} holds on {{{}}}", ext.join(" "));
    }
    Ok(())
}
