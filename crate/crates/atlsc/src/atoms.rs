//! Reserved atom families used by the compilation into quantified CTL*.
//!
//! Every generated name contains a `#`, which user-declared props may not,
//! so the families can never collide with game vocabulary. Naming is purely
//! positional and therefore deterministic:
//!
//! * `q#<i>@<k>` — path atom for state index `i` at quantifier level `k`
//! * `m#<agent>@<move>` — move-choice atom
//! * `s#<i>` — class-membership atom for state index `i` on quotient nodes
//! * `p#<state>` — current-state atom on the underlying Kripke structure
//! * `o#<agent>@<c>` — observation-class atom for class index `c`
//! * `#u<n>` — bound props introduced by [`crate::logic::ex1`]

/// Path atom `q#i@k`: the branch labeled at level `k` passes through state `i`.
pub fn path_atom(state_index: usize, level: usize) -> String {
    format!("q#{state_index}@{level}")
}

/// Move atom `m#agent@move`: the labeled strategy picks `move` here.
pub fn move_atom(agent: &str, mv: &str) -> String {
    format!("m#{agent}@{mv}")
}

/// Class atom `s#i`: this quotient node contains state `i`.
pub fn class_atom(state_index: usize) -> String {
    format!("s#{state_index}")
}

/// State atom `p#q`: the structure is currently at state `q`.
pub fn state_atom(state: &str) -> String {
    format!("p#{state}")
}

/// Observation atom `o#agent@c`: the current state sits in class `c` of
/// `agent`'s partition.
pub fn obs_atom(agent: &str, class_index: usize) -> String {
    format!("o#{agent}@{class_index}")
}

/// A prop name of the form `#u<n>` not occurring in `used`.
pub fn fresh_bound_prop(used: &std::collections::BTreeSet<String>) -> String {
    for n in 0.. {
        let cand = format!("#u{n}");
        if !used.contains(&cand) {
            return cand;
        }
    }
    unreachable!()
}

/// True for names reserved for generated atoms.
pub fn is_reserved(name: &str) -> bool {
    name.contains('#')
}
