//! Collapses a uniform game to its observation classes.
//!
//! Every agent sees the same partition in `reach.game`, so the quotient is
//! well defined: one node per class, labeled with `s#i` atoms naming the
//! member states, and an edge wherever some pair of members has one.

use atlsc::game::Cgso;

fn main() -> anyhow::Result<()> {
    let src = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/games/reach.game"
    ))?;
    let g = Cgso::parse(&src)?;
    let q = g.quotient()?;

    println!("{} states fold into {} classes\n", g.n_states(), q.n_states());
    print!("{}", q.to_text());
    Ok(())
}
