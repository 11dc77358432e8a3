//! Emits the unfolding-based translation for memoryful strategies.
//!
//! This output is meant for inspection or an external solver, not for the
//! bundled engine: the formula speaks about the infinite unfolding of the
//! observation quotient, where each `q#i@k` atom traces which concrete
//! state a branch is in at quantifier level k. Deciding it needs a solver
//! that quantifies over tree labelings; ours quantifies over structure
//! labelings only.

use atlsc::game::Cgso;
use atlsc::logic::StateFormula;
use atlsc::reduce::build_uniform_reduction;

fn main() -> anyhow::Result<()> {
    let src = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/games/reach.game"
    ))?;
    let g = Cgso::parse(&src)?;
    let at = g.init().expect("reach.game declares init");
    let phi = StateFormula::parse("<<a1>> F f")?;

    let red = build_uniform_reduction(&g, &phi, at)?;
    println!(
        "{} input nodes become {} output nodes on a {}-class quotient\n",
        phi.count_nodes(),
        red.formula.count_nodes(),
        red.structure.n_states()
    );
    print!("{}", red.render());
    Ok(())
}
