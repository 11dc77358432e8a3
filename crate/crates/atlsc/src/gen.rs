//! Seeded random games, structures, and formulas for crosschecks.
//!
//! Everything here is deterministic in the seed, so a failing case from a
//! randomized run can be replayed by number. Sizes are kept small on
//! purpose: the direct engine and the quantifier enumeration both grow fast,
//! and the point of these inputs is disagreement hunting, not load.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{AgentId, Cgso, MoveId, StateId};
use crate::kripke::KripkeStructure;
use crate::logic::{PathFormula, StateFormula};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct GameSpec {
    pub max_states: usize,
    pub n_agents: usize,
    pub n_moves: usize,
    pub n_props: usize,
    /// Restrict to shared observation partitions; otherwise a coin decides
    /// between one shared partition and independent per-agent ones.
    pub uniform_only: bool,
}

impl Default for GameSpec {
    fn default() -> Self {
        GameSpec {
            max_states: 4,
            n_agents: 2,
            n_moves: 2,
            n_props: 2,
            uniform_only: false,
        }
    }
}

pub fn random_game<R: Rng>(rng: &mut R, spec: &GameSpec) -> Cgso {
    let n = rng.random_range(1..=spec.max_states);
    let states: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let agents: Vec<String> = (1..=spec.n_agents).map(|i| format!("a{i}")).collect();
    let moves: Vec<String> = (1..=spec.n_moves).map(|i| format!("m{i}")).collect();
    let props: Vec<String> = (1..=spec.n_props).map(|i| format!("p{i}")).collect();
    let mut b = Cgso::builder(agents, moves, props, states).expect("well-formed names");
    for q in 0..n {
        for p in 0..spec.n_props {
            if rng.random_bool(0.5) {
                b.label(StateId(q), p);
            }
        }
    }
    let n_vec = spec.n_moves.pow(spec.n_agents as u32);
    for q in 0..n {
        for idx in 0..n_vec {
            let mut rest = idx;
            let pattern: Vec<Option<MoveId>> = (0..spec.n_agents)
                .map(|_| {
                    let m = rest % spec.n_moves;
                    rest /= spec.n_moves;
                    Some(MoveId(m))
                })
                .collect();
            b.edge(StateId(q), &pattern, StateId(rng.random_range(0..n)));
        }
    }
    if spec.uniform_only || rng.random_bool(0.5) {
        b.obs_uniform(random_partition(rng, n));
    } else {
        for a in 0..spec.n_agents {
            b.obs_agent(AgentId(a), random_partition(rng, n));
        }
    }
    b.init(StateId(0));
    b.finish()
}

fn random_partition<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<StateId>> {
    let mut blocks: Vec<Vec<StateId>> = Vec::new();
    for q in 0..n {
        let k = rng.random_range(0..=blocks.len());
        if k == blocks.len() {
            blocks.push(vec![StateId(q)]);
        } else {
            blocks[k].push(StateId(q));
        }
    }
    blocks
}

pub struct FormulaSpec {
    /// Deepest nesting of strategy quantifiers.
    pub strat_depth: usize,
    /// Deepest nesting of temporal operators.
    pub temporal_depth: usize,
    /// Emit `_0` quantifiers instead of unrestricted ones.
    pub memoryless: bool,
    /// Largest coalition put under a strategy quantifier. Enumeration cost
    /// is exponential in this, so crosschecks keep it at one.
    pub max_coalition: usize,
    /// Node budget; boolean connectives stop when it runs out.
    pub size: usize,
    /// Mix in `exists`/`forall` prop quantifiers (for round-trip tests, not
    /// for game checking).
    pub prop_quantifiers: bool,
}

impl Default for FormulaSpec {
    fn default() -> Self {
        FormulaSpec {
            strat_depth: 2,
            temporal_depth: 3,
            memoryless: true,
            max_coalition: 1,
            size: 12,
            prop_quantifiers: false,
        }
    }
}

pub fn random_state_formula<R: Rng>(
    rng: &mut R,
    agents: &[String],
    props: &[String],
    spec: &FormulaSpec,
) -> StateFormula {
    let mut fuel = spec.size;
    let props: Vec<String> = props.to_vec();
    state_node(
        rng,
        agents,
        &props,
        &mut fuel,
        spec.strat_depth,
        spec.temporal_depth,
        spec,
    )
}

fn state_node<R: Rng>(
    rng: &mut R,
    agents: &[String],
    props: &[String],
    fuel: &mut usize,
    strat: usize,
    temp: usize,
    spec: &FormulaSpec,
) -> StateFormula {
    if *fuel == 0 {
        return leaf(rng, props);
    }
    *fuel -= 1;
    match rng.random_range(0..100u32) {
        0..25 => leaf(rng, props),
        25..40 => state_node(rng, agents, props, fuel, strat, temp, spec).not(),
        40..64 => {
            let a = state_node(rng, agents, props, fuel, strat, temp, spec);
            let b = state_node(rng, agents, props, fuel, strat, temp, spec);
            match rng.random_range(0..3u32) {
                0 => a.and(b),
                1 => a.or(b),
                _ => a.implies(b),
            }
        }
        64..74 => {
            let coalition = random_coalition(rng, agents, agents.len());
            let body = state_node(rng, agents, props, fuel, strat, temp, spec);
            StateFormula::Relax {
                coalition,
                complement: rng.random_bool(0.3),
                body: Box::new(body),
            }
        }
        74..82 if spec.prop_quantifiers => {
            let bound = format!("Z{}", rng.random_range(1..4u32));
            let mut inner = props.to_vec();
            if !inner.contains(&bound) {
                inner.push(bound.clone());
            }
            let body = state_node(rng, agents, &inner, fuel, strat, temp, spec);
            if rng.random_bool(0.5) {
                StateFormula::exists(bound, body)
            } else {
                StateFormula::forall(bound, body)
            }
        }
        _ if strat > 0 => {
            let coalition = random_coalition(rng, agents, spec.max_coalition);
            let body = path_node(rng, agents, props, fuel, strat - 1, temp, spec);
            StateFormula::StratQ {
                coalition,
                complement: false,
                memoryless: spec.memoryless,
                body: Box::new(body),
            }
        }
        _ => leaf(rng, props),
    }
}

fn path_node<R: Rng>(
    rng: &mut R,
    agents: &[String],
    props: &[String],
    fuel: &mut usize,
    strat: usize,
    temp: usize,
    spec: &FormulaSpec,
) -> PathFormula {
    if *fuel == 0 || temp == 0 {
        return PathFormula::state(state_node(rng, agents, props, fuel, strat, 0, spec));
    }
    *fuel -= 1;
    let sub = |rng: &mut R, fuel: &mut usize, temp: usize| {
        path_node(rng, agents, props, fuel, strat, temp, spec)
    };
    match rng.random_range(0..100u32) {
        0..25 => PathFormula::state(state_node(rng, agents, props, fuel, strat, temp, spec)),
        25..35 => sub(rng, fuel, temp - 1).not(),
        35..50 => {
            let a = sub(rng, fuel, temp);
            let b = sub(rng, fuel, temp);
            match rng.random_range(0..3u32) {
                0 => a.and(b),
                1 => a.or(b),
                _ => a.implies(b),
            }
        }
        50..70 => sub(rng, fuel, temp - 1).next(),
        70..85 => sub(rng, fuel, temp - 1).until(sub(rng, fuel, temp - 1)),
        85..93 => sub(rng, fuel, temp - 1).eventually(),
        _ => sub(rng, fuel, temp - 1).always(),
    }
}

fn leaf<R: Rng>(rng: &mut R, props: &[String]) -> StateFormula {
    if props.is_empty() || rng.random_range(0..10u32) == 0 {
        if rng.random_bool(0.5) {
            StateFormula::True
        } else {
            StateFormula::False
        }
    } else {
        StateFormula::prop(&props[rng.random_range(0..props.len())])
    }
}

fn random_coalition<R: Rng>(rng: &mut R, agents: &[String], max: usize) -> BTreeSet<String> {
    let k = rng.random_range(0..=max.min(agents.len()));
    let mut out = BTreeSet::new();
    while out.len() < k {
        out.insert(agents[rng.random_range(0..agents.len())].clone());
    }
    out
}

/// A total structure: every state keeps at least one successor.
pub fn random_kripke<R: Rng>(rng: &mut R, n_states: usize, props: &[&str]) -> KripkeStructure {
    let names: Vec<String> = (0..n_states).map(|i| format!("q{i}")).collect();
    let plist: Vec<String> = props.iter().map(|s| s.to_string()).collect();
    let labels: Vec<BTreeSet<usize>> = (0..n_states)
        .map(|_| (0..plist.len()).filter(|_| rng.random_bool(0.5)).collect())
        .collect();
    let transitions: Vec<Vec<StateId>> = (0..n_states)
        .map(|_| {
            let mut succ: Vec<StateId> = (0..n_states)
                .filter(|_| rng.random_bool(0.4))
                .map(StateId)
                .collect();
            if succ.is_empty() {
                succ.push(StateId(rng.random_range(0..n_states)));
            }
            succ
        })
        .collect();
    KripkeStructure::new(names, plist, labels, transitions, Some(StateId(0)))
        .expect("well-formed structure")
}

/// Pure linear-time formula: leaves are props and constants only, so a lasso
/// oracle can evaluate it without touching branching operators.
pub fn random_ltl<R: Rng>(rng: &mut R, props: &[&str], depth: usize) -> PathFormula {
    let leaf = |rng: &mut R| {
        PathFormula::state(if rng.random_range(0..8u32) == 0 {
            StateFormula::True
        } else {
            StateFormula::prop(props[rng.random_range(0..props.len())])
        })
    };
    if depth == 0 {
        return leaf(rng);
    }
    match rng.random_range(0..100u32) {
        0..15 => leaf(rng),
        15..30 => random_ltl(rng, props, depth - 1).not(),
        30..48 => {
            let a = random_ltl(rng, props, depth - 1);
            let b = random_ltl(rng, props, depth - 1);
            if rng.random_bool(0.5) {
                a.and(b)
            } else {
                a.or(b)
            }
        }
        48..68 => random_ltl(rng, props, depth - 1).next(),
        68..86 => random_ltl(rng, props, depth - 1).until(random_ltl(rng, props, depth - 1)),
        86..93 => random_ltl(rng, props, depth - 1).eventually(),
        _ => random_ltl(rng, props, depth - 1).always(),
    }
}

/// Branching-time formula over plain structures: booleans plus `E`/`A`
/// around small linear cores. Used for quantifier duality checks.
pub fn random_branching<R: Rng>(rng: &mut R, props: &[&str], depth: usize) -> StateFormula {
    if depth == 0 {
        return if rng.random_range(0..6u32) == 0 {
            StateFormula::True
        } else {
            StateFormula::prop(props[rng.random_range(0..props.len())])
        };
    }
    match rng.random_range(0..100u32) {
        0..20 => random_branching(rng, props, depth - 1),
        20..35 => random_branching(rng, props, depth - 1).not(),
        35..55 => {
            let a = random_branching(rng, props, depth - 1);
            let b = random_branching(rng, props, depth - 1);
            if rng.random_bool(0.5) {
                a.and(b)
            } else {
                a.or(b)
            }
        }
        55..78 => StateFormula::exists_path(random_ltl(rng, props, depth - 1)),
        _ => StateFormula::all_paths(random_ltl(rng, props, depth - 1)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_reproduces_everything() {
        let spec = GameSpec::default();
        let fspec = FormulaSpec::default();
        let mut a = rng(7);
        let mut b = rng(7);
        for _ in 0..20 {
            let ga = random_game(&mut a, &spec);
            let gb = random_game(&mut b, &spec);
            assert_eq!(ga.to_text(), gb.to_text());
            let fa = random_state_formula(&mut a, ga.agents(), ga.props(), &fspec);
            let fb = random_state_formula(&mut b, gb.agents(), gb.props(), &fspec);
            assert_eq!(fa, fb);
        }
    }

    #[test]
    fn random_games_pass_validation() {
        let mut r = rng(11);
        let spec = GameSpec::default();
        for i in 0..100 {
            let g = random_game(&mut r, &spec);
            let issues = g.validate();
            assert!(issues.is_empty(), "game {i} invalid: {issues:?}");
        }
    }

    #[test]
    fn formula_budgets_hold() {
        let mut r = rng(13);
        let spec = FormulaSpec::default();
        let agents = vec!["a1".to_string(), "a2".to_string()];
        let props = vec!["p1".to_string(), "p2".to_string()];
        for _ in 0..200 {
            let f = random_state_formula(&mut r, &agents, &props, &spec);
            assert!(f.strat_depth() <= 2, "too deep: {f}");
            assert!(f.memoryless_shaped(), "memoryful quantifier in {f}");
        }
    }

    #[test]
    fn generated_formulas_round_trip() {
        let mut r = rng(17);
        let agents = vec!["a1".to_string(), "a2".to_string()];
        let props = vec!["p1".to_string(), "p2".to_string()];
        for memoryless in [false, true] {
            let spec = FormulaSpec {
                memoryless,
                prop_quantifiers: true,
                ..FormulaSpec::default()
            };
            for _ in 0..250 {
                let f = random_state_formula(&mut r, &agents, &props, &spec);
                let printed = f.to_string();
                let back = StateFormula::parse(&printed)
                    .unwrap_or_else(|e| panic!("reparse of `{printed}` failed: {e}"));
                assert_eq!(back, f, "round trip changed `{printed}`");
            }
        }
    }
}
