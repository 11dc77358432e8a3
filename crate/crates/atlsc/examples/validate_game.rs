//! Loads a game from text and runs the structural checks.

use atlsc::game::Cgso;

fn main() -> anyhow::Result<()> {
    let src = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/games/reach.game"
    ))?;
    let g = Cgso::parse(&src)?;
    let issues = g.validate();
    println!(
        "reach.game: {} states, {} agents, {} diagnostics",
        g.n_states(),
        g.agents().len(),
        issues.len()
    );

    // A deliberately broken game: q1 has no outgoing edge and the
    // observation classes miss a state.
    let broken = "\
agents: a1
moves: m1
props: g
states: q0 q1
init: q0
obs a1: {q0}
edge q0 * -> q1
";
    let b = Cgso::parse(broken)?;
    println!("\nbroken game:");
    for d in b.validate() {
        println!("  {d}");
    }
    Ok(())
}
