//! Quantified branching-time formulas on a plain structure.
//!
//! `exists P. ...` asks for a labeling of P under which the body holds;
//! the engine reports the labeling it found. The `ex1` helper builds
//! "exactly one successor satisfies phi" out of a quantifier, which is
//! the workhorse behind path-shaped constraints elsewhere in the crate.

use std::collections::BTreeSet;

use atlsc::kripke::KripkeStructure;
use atlsc::logic::{ex1, StateFormula};
use atlsc::qctl::{check_structure, QctlOptions};

const STRUCTURE: &str = "\
props: g
states: n0 n1 n2 n3
init: n0
label n1: g
label n2: g
label n3: g
trans n0: n1 n2
trans n1: n3
trans n2: n3
trans n3: n3
";

fn main() -> anyhow::Result<()> {
    let k = KripkeStructure::parse(STRUCTURE)?;
    let n0 = k.state_id("n0").unwrap();

    // Smallest self-sustaining set through n0: the engine scans labelings
    // in ascending order, so the reported extension is minimal.
    let phi = StateFormula::parse("exists P. (P & A G (P -> E X P))")?;
    let out = check_structure(&k, &phi, n0, QctlOptions::default())?;
    println!("{phi}  =>  {}", out.holds);
    for (prop, ext) in &out.witness {
        println!("  {prop} = {{{}}}", ext.join(" "));
    }

    // Quantifier duality: the two phrasings must agree everywhere.
    let dual = StateFormula::parse("! forall P. ! (P & A G (P -> E X P))")?;
    let out2 = check_structure(&k, &dual, n0, QctlOptions::default())?;
    println!("{dual}  =>  {}", out2.holds);

    // n0 has two g-successors, n1 has exactly one.
    let mut used = BTreeSet::new();
    let unique = ex1(StateFormula::prop("g"), &mut used);
    for name in ["n0", "n1"] {
        let at = k.state_id(name).unwrap();
        let r = check_structure(&k, &unique, at, QctlOptions::default())?;
        println!("exactly one g-successor at {name}: {}", r.holds);
    }
    Ok(())
}
