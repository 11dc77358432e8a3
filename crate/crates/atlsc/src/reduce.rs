//! Compilation of strategy quantifiers into prop-quantified CTL*.
//!
//! Two builders for two semantics. [`build_memoryless_reduction`] rewrites a
//! formula with `_0` quantifiers onto the game's underlying structure, where
//! an existentially quantified `m#` prop family describes one memoryless
//! strategy pointwise. The output is a plain quantified formula that
//! [`crate::qctl`] can check directly, and on a positive verdict the first
//! witness extensions of the `m#` chain read back as the chosen strategy.
//!
//! [`build_uniform_reduction`] rewrites unrestricted quantifiers onto the
//! observation quotient of a uniform game. There a quantified `q#i@k` family
//! marks, per quantifier level `k`, one branch of the quotient's unfolding,
//! and move props are re-quantified at each level so an inner quantifier for
//! the same agent replaces the outer strategy. Branch props only mean
//! something on the unfolding, so this output is for emission and
//! inspection; feeding it to the structure checker would answer a different
//! question.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::atoms;
use crate::game::{AgentId, Cgso, GameOpError, MoveId, StateId};
use crate::kripke::KripkeStructure;
use crate::logic::{self, Coalition, PathFormula, StateFormula};

#[derive(Debug, Error)]
pub enum ReduceError {
    #[error("prop `{0}` contains `#`, which is reserved for generated atoms")]
    ReservedProp(String),
    #[error("unknown prop `{0}`")]
    UnknownProp(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Game(#[from] GameOpError),
}

/// A compiled check: a plain structure, a prop-quantified formula, and the
/// structure state the formula talks about.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub structure: KripkeStructure,
    pub formula: StateFormula,
    pub at: String,
}

impl Reduction {
    /// Text form used by the translation output: evaluation point and
    /// formula up front, then the structure in its own format.
    pub fn render(&self) -> String {
        format!(
            "at: {}\nformula: {}\n\n{}",
            self.at,
            self.formula,
            self.structure.to_text()
        )
    }
}

/// Compiles a formula whose strategy quantifiers are all memoryless onto
/// the underlying structure of `g`. The result can be run with
/// [`crate::qctl::check_structure`] at the state named [`Reduction::at`].
pub fn build_memoryless_reduction(
    g: &Cgso,
    phi: &StateFormula,
    at: StateId,
) -> Result<Reduction, ReduceError> {
    vet(g, phi)?;
    let agents: BTreeSet<String> = g.agents().iter().cloned().collect();
    let phi = phi.eliminate_complements(&agents);
    if !phi.memoryless_shaped() {
        return Err(ReduceError::Unsupported(
            "only `_0` quantifiers fit on the underlying structure; \
             unrestricted ones go through the quotient translation"
                .into(),
        ));
    }
    let structure = g.underlying_kripke()?;
    let formula = hat_state(g, &phi, &Coalition::new())?;
    Ok(Reduction {
        structure,
        formula,
        at: g.state_name(at).to_string(),
    })
}

/// Compiles a formula with unrestricted strategy quantifiers onto the
/// observation quotient of a uniform game, anchored at the class of `at`.
/// Quantified branch props describe the quotient's unfolding, so the result
/// is meant for inspection rather than for the structure checker.
pub fn build_uniform_reduction(
    g: &Cgso,
    phi: &StateFormula,
    at: StateId,
) -> Result<Reduction, ReduceError> {
    vet(g, phi)?;
    vet_tree(phi)?;
    let structure = g.quotient()?;
    let agents: BTreeSet<String> = g.agents().iter().cloned().collect();
    let phi = phi.eliminate_complements(&agents);
    let body = tilde_state(g, &phi, &Coalition::new(), 0)?;
    let anchor = atoms::path_atom(at.0, 0);
    let formula = StateFormula::exists(&anchor, body.and(StateFormula::prop(&anchor)));
    let class = g
        .obs(AgentId(0))
        .class_of(at)
        .expect("partition coverage checked by the quotient");
    Ok(Reduction {
        structure,
        formula,
        at: format!("C{class}"),
    })
}

/// Memoryless strategy shell for `coalition`: every member always has
/// exactly one `m#` prop set, uniformly across each observation class.
pub fn phi_strat_memoryless(g: &Cgso, coalition: &Coalition) -> StateFormula {
    let mut parts = Vec::new();
    for name in coalition {
        let a = g.agent_id(name).expect("vetted agent");
        let props = move_props(g, name);
        parts.push(ag(exactly_one(&props)));
        for c in 0..g.obs(a).classes().len() {
            let seen = StateFormula::prop(atoms::obs_atom(name, c));
            for mp in &props {
                let pick = StateFormula::prop(mp);
                parts.push(
                    ef(seen.clone().and(pick.clone()))
                        .implies(ag(seen.clone().implies(pick))),
                );
            }
        }
    }
    and_all(parts)
}

/// Paths that follow the `m#` labels of every agent in `constrained`: at
/// each step, the step taken matches some edge whose moves for those agents
/// are the ones currently labeled. Edges are deduplicated by their
/// projection onto `constrained` and their target, so unconstrained agents
/// keep their full range of effects without inflating the formula.
pub fn phi_out_memoryless(g: &Cgso, constrained: &Coalition) -> PathFormula {
    let members = resolve(g, constrained);
    let mut conjs = Vec::new();
    for q in 0..g.n_states() {
        let q = StateId(q);
        let mut seen = BTreeSet::new();
        let mut arms = Vec::new();
        for mv in g.move_vectors() {
            let Some(t) = g.successor(q, &mv) else { continue };
            let proj: Vec<MoveId> = members.iter().map(|&(_, a)| mv[a.0]).collect();
            if !seen.insert((proj, t)) {
                continue;
            }
            let picks = and_all(
                members
                    .iter()
                    .map(|&(name, a)| {
                        StateFormula::prop(atoms::move_atom(name, g.move_name(mv[a.0])))
                    })
                    .collect(),
            );
            let step = PathFormula::state(StateFormula::prop(atoms::state_atom(
                g.state_name(t),
            )))
            .next();
            arms.push(if matches!(picks, StateFormula::True) {
                step
            } else {
                PathFormula::state(picks).and(step)
            });
        }
        conjs.push(
            PathFormula::state(StateFormula::prop(atoms::state_atom(g.state_name(q))))
                .implies(path_or_all(arms)),
        );
    }
    path_and_all(conjs).always()
}

/// Strategy shell on the quotient: each member always has exactly one `m#`
/// prop set. Nodes of the unfolding are observation histories, so there is
/// no separate uniformity clause here.
pub fn phi_strat_tree(g: &Cgso, coalition: &Coalition) -> StateFormula {
    and_all(
        coalition
            .iter()
            .map(|name| ag(exactly_one(&move_props(g, name))))
            .collect(),
    )
}

/// The level-`level` branch props trace one infinite path of the unfolding:
/// always exactly one holds, it agrees with the node's class, and exactly
/// one successor continues the branch.
pub fn phi_path_tree(g: &Cgso, level: usize) -> StateFormula {
    let s = g.n_states();
    let here: Vec<String> = (0..s).map(|i| atoms::path_atom(i, level)).collect();
    let one = or_all(
        (0..s)
            .map(|i| {
                let mut conj = vec![
                    StateFormula::prop(&here[i]),
                    StateFormula::prop(atoms::class_atom(i)),
                ];
                for (j, other) in here.iter().enumerate() {
                    if j != i {
                        conj.push(StateFormula::prop(other).not());
                    }
                }
                and_all(conj)
            })
            .collect(),
    );
    let mut used: BTreeSet<String> = here.iter().cloned().collect();
    let branch = logic::ex1(
        or_all(here.iter().map(StateFormula::prop).collect()),
        &mut used,
    );
    eg(one.and(branch))
}

/// The level-`level` branch follows moves labeled for `constrained` agents,
/// deduplicated the same way as [`phi_out_memoryless`].
pub fn phi_out_tree(g: &Cgso, level: usize, constrained: &Coalition) -> StateFormula {
    let members = resolve(g, constrained);
    let mut arms = Vec::new();
    for q in 0..g.n_states() {
        let mut seen = BTreeSet::new();
        for mv in g.move_vectors() {
            let Some(t) = g.successor(StateId(q), &mv) else { continue };
            let proj: Vec<MoveId> = members.iter().map(|&(_, a)| mv[a.0]).collect();
            if !seen.insert((proj, t)) {
                continue;
            }
            let mut conj = vec![StateFormula::prop(atoms::path_atom(q, level))];
            for &(name, a) in &members {
                conj.push(StateFormula::prop(atoms::move_atom(
                    name,
                    g.move_name(mv[a.0]),
                )));
            }
            conj.push(ex(StateFormula::prop(atoms::path_atom(t.0, level))));
            arms.push(and_all(conj));
        }
    }
    eg(or_all(arms))
}

fn hat_state(g: &Cgso, phi: &StateFormula, ctx: &Coalition) -> Result<StateFormula, ReduceError> {
    Ok(match phi {
        StateFormula::True | StateFormula::False | StateFormula::Prop(_) => phi.clone(),
        StateFormula::Not(a) => hat_state(g, a, ctx)?.not(),
        StateFormula::And(a, b) => hat_state(g, a, ctx)?.and(hat_state(g, b, ctx)?),
        StateFormula::Or(a, b) => hat_state(g, a, ctx)?.or(hat_state(g, b, ctx)?),
        StateFormula::Implies(a, b) => {
            hat_state(g, a, ctx)?.implies(hat_state(g, b, ctx)?)
        }
        StateFormula::Relax { coalition, body, .. } => {
            let ctx: Coalition = ctx.difference(coalition).cloned().collect();
            hat_state(g, body, &ctx)?
        }
        StateFormula::StratQ { coalition, body, .. } if coalition.is_empty() => {
            let body = hat_path(g, body, ctx)?;
            if ctx.is_empty() {
                // an empty context constrains nothing, so the outcome guard
                // would be satisfied by every real path anyway
                StateFormula::all_paths(body)
            } else {
                StateFormula::all_paths(phi_out_memoryless(g, ctx).implies(body))
            }
        }
        StateFormula::StratQ { coalition, body, .. } => {
            let joined: Coalition = ctx.union(coalition).cloned().collect();
            let body = hat_path(g, body, &joined)?;
            let outcome =
                StateFormula::all_paths(phi_out_memoryless(g, &joined).implies(body));
            // the strategy shell goes first so an invalid `m#` valuation is
            // dismissed before the outcome clause is ever evaluated
            let shell = and_all(vec![phi_strat_memoryless(g, coalition), outcome]);
            let mut props = Vec::new();
            for name in coalition {
                props.extend(move_props(g, name));
            }
            exists_chain(props, shell)
        }
        // input-level prop quantifiers carry over verbatim; the vet pass
        // guarantees they shadow nothing the translation introduces
        StateFormula::Exists { prop, body } => StateFormula::Exists {
            prop: prop.clone(),
            body: Box::new(hat_state(g, body, ctx)?),
        },
        StateFormula::Forall { prop, body } => StateFormula::Forall {
            prop: prop.clone(),
            body: Box::new(hat_state(g, body, ctx)?),
        },
    })
}

fn hat_path(g: &Cgso, phi: &PathFormula, ctx: &Coalition) -> Result<PathFormula, ReduceError> {
    Ok(match phi {
        PathFormula::State(s) => PathFormula::state(hat_state(g, s, ctx)?),
        PathFormula::Not(a) => hat_path(g, a, ctx)?.not(),
        PathFormula::And(a, b) => hat_path(g, a, ctx)?.and(hat_path(g, b, ctx)?),
        PathFormula::Or(a, b) => hat_path(g, a, ctx)?.or(hat_path(g, b, ctx)?),
        PathFormula::Implies(a, b) => hat_path(g, a, ctx)?.implies(hat_path(g, b, ctx)?),
        PathFormula::Next(a) => hat_path(g, a, ctx)?.next(),
        PathFormula::Until(a, b) => hat_path(g, a, ctx)?.until(hat_path(g, b, ctx)?),
    })
}

fn tilde_state(
    g: &Cgso,
    phi: &StateFormula,
    ctx: &Coalition,
    level: usize,
) -> Result<StateFormula, ReduceError> {
    Ok(match phi {
        StateFormula::True | StateFormula::False => phi.clone(),
        StateFormula::Prop(p) => {
            let pid = g.prop_id(p).expect("vetted prop");
            or_all(
                (0..g.n_states())
                    .filter(|&i| g.has_prop(StateId(i), pid))
                    .map(|i| StateFormula::prop(atoms::path_atom(i, level)))
                    .collect(),
            )
        }
        StateFormula::Not(a) => tilde_state(g, a, ctx, level)?.not(),
        StateFormula::And(a, b) => {
            tilde_state(g, a, ctx, level)?.and(tilde_state(g, b, ctx, level)?)
        }
        StateFormula::Or(a, b) => {
            tilde_state(g, a, ctx, level)?.or(tilde_state(g, b, ctx, level)?)
        }
        StateFormula::Implies(a, b) => {
            tilde_state(g, a, ctx, level)?.implies(tilde_state(g, b, ctx, level)?)
        }
        StateFormula::Relax { coalition, body, .. } => {
            let ctx: Coalition = ctx.difference(coalition).cloned().collect();
            tilde_state(g, body, &ctx, level)?
        }
        StateFormula::StratQ { coalition, body, .. } => {
            diamond(g, coalition, body, ctx, level)?
        }
        StateFormula::Exists { .. } | StateFormula::Forall { .. } => {
            unreachable!("rejected by vet_tree first")
        }
    })
}

/// One strategy quantifier on the quotient. The move props picked here are
/// the same family an outer quantifier for the same agent used, so the
/// inner binding replaces the outer strategy on the subtree it scopes over.
fn diamond(
    g: &Cgso,
    coalition: &Coalition,
    body: &PathFormula,
    ctx: &Coalition,
    level: usize,
) -> Result<StateFormula, ReduceError> {
    let s = g.n_states();
    let next = level + 1;
    let joined: Coalition = ctx.union(coalition).cloned().collect();

    let cont = tilde_path(g, body, &joined, next)?;
    let on_branch = or_all(
        (0..s)
            .map(|i| StateFormula::prop(atoms::path_atom(i, next)))
            .collect(),
    );
    let trail = StateFormula::all_paths(
        PathFormula::state(on_branch).always().implies(cont),
    );

    let handoff = or_all(
        (0..s)
            .map(|i| {
                StateFormula::prop(atoms::path_atom(i, level))
                    .and(StateFormula::prop(atoms::path_atom(i, next)))
            })
            .collect(),
    );
    let guard = and_all(vec![
        phi_path_tree(g, next),
        handoff,
        phi_out_tree(g, next, &joined),
    ]);

    let quantified = forall_chain(
        (0..s).map(|i| atoms::path_atom(i, next)).collect(),
        guard.implies(trail),
    );
    let shell = and_all(vec![phi_strat_tree(g, coalition), quantified]);
    let mut props = Vec::new();
    for name in coalition {
        props.extend(move_props(g, name));
    }
    Ok(exists_chain(props, shell))
}

fn tilde_path(
    g: &Cgso,
    phi: &PathFormula,
    ctx: &Coalition,
    level: usize,
) -> Result<PathFormula, ReduceError> {
    Ok(match phi {
        PathFormula::State(s) => PathFormula::state(tilde_state(g, s, ctx, level)?),
        PathFormula::Not(a) => tilde_path(g, a, ctx, level)?.not(),
        PathFormula::And(a, b) => {
            tilde_path(g, a, ctx, level)?.and(tilde_path(g, b, ctx, level)?)
        }
        PathFormula::Or(a, b) => {
            tilde_path(g, a, ctx, level)?.or(tilde_path(g, b, ctx, level)?)
        }
        PathFormula::Implies(a, b) => {
            tilde_path(g, a, ctx, level)?.implies(tilde_path(g, b, ctx, level)?)
        }
        PathFormula::Next(a) => tilde_path(g, a, ctx, level)?.next(),
        PathFormula::Until(a, b) => {
            tilde_path(g, a, ctx, level)?.until(tilde_path(g, b, ctx, level)?)
        }
    })
}

fn vet(g: &Cgso, phi: &StateFormula) -> Result<(), ReduceError> {
    for p in g.props() {
        if atoms::is_reserved(p) {
            return Err(ReduceError::ReservedProp(p.clone()));
        }
    }
    vet_state(g, phi, &mut Vec::new())
}

fn vet_state(g: &Cgso, phi: &StateFormula, scope: &mut Vec<String>) -> Result<(), ReduceError> {
    match phi {
        StateFormula::True | StateFormula::False => Ok(()),
        StateFormula::Prop(p) => {
            if atoms::is_reserved(p) {
                return Err(ReduceError::ReservedProp(p.clone()));
            }
            if g.prop_id(p).is_none() && !scope.contains(p) {
                return Err(ReduceError::UnknownProp(p.clone()));
            }
            Ok(())
        }
        StateFormula::Not(a) => vet_state(g, a, scope),
        StateFormula::And(a, b)
        | StateFormula::Or(a, b)
        | StateFormula::Implies(a, b) => {
            vet_state(g, a, scope)?;
            vet_state(g, b, scope)
        }
        StateFormula::StratQ { coalition, body, .. } => {
            vet_agents(g, coalition)?;
            vet_path(g, body, scope)
        }
        StateFormula::Relax { coalition, body, .. } => {
            vet_agents(g, coalition)?;
            vet_state(g, body, scope)
        }
        StateFormula::Exists { prop, body } | StateFormula::Forall { prop, body } => {
            if atoms::is_reserved(prop) {
                return Err(ReduceError::ReservedProp(prop.clone()));
            }
            if g.prop_id(prop).is_some() {
                return Err(ReduceError::Unsupported(format!(
                    "quantified prop `{prop}` shadows a game proposition"
                )));
            }
            scope.push(prop.clone());
            let r = vet_state(g, body, scope);
            scope.pop();
            r
        }
    }
}

fn vet_path(g: &Cgso, phi: &PathFormula, scope: &mut Vec<String>) -> Result<(), ReduceError> {
    match phi {
        PathFormula::State(s) => vet_state(g, s, scope),
        PathFormula::Not(a) | PathFormula::Next(a) => vet_path(g, a, scope),
        PathFormula::And(a, b)
        | PathFormula::Or(a, b)
        | PathFormula::Implies(a, b)
        | PathFormula::Until(a, b) => {
            vet_path(g, a, scope)?;
            vet_path(g, b, scope)
        }
    }
}

fn vet_agents(g: &Cgso, coalition: &Coalition) -> Result<(), ReduceError> {
    for name in coalition {
        if g.agent_id(name).is_none() {
            return Err(ReduceError::UnknownAgent(name.clone()));
        }
    }
    Ok(())
}

fn vet_tree(phi: &StateFormula) -> Result<(), ReduceError> {
    match phi {
        StateFormula::True | StateFormula::False | StateFormula::Prop(_) => Ok(()),
        StateFormula::Not(a) => vet_tree(a),
        StateFormula::And(a, b)
        | StateFormula::Or(a, b)
        | StateFormula::Implies(a, b) => {
            vet_tree(a)?;
            vet_tree(b)
        }
        StateFormula::StratQ {
            coalition,
            memoryless,
            body,
            ..
        } => {
            if *memoryless && !coalition.is_empty() {
                return Err(ReduceError::Unsupported(
                    "`_0` quantifiers fit the underlying-structure reduction, \
                     not the quotient translation"
                        .into(),
                ));
            }
            vet_tree_path(body)
        }
        StateFormula::Relax { body, .. } => vet_tree(body),
        StateFormula::Exists { .. } | StateFormula::Forall { .. } => {
            Err(ReduceError::Unsupported(
                "the quotient translation takes strategy quantifiers only"
                    .into(),
            ))
        }
    }
}

fn vet_tree_path(phi: &PathFormula) -> Result<(), ReduceError> {
    match phi {
        PathFormula::State(s) => vet_tree(s),
        PathFormula::Not(a) | PathFormula::Next(a) => vet_tree_path(a),
        PathFormula::And(a, b)
        | PathFormula::Or(a, b)
        | PathFormula::Implies(a, b)
        | PathFormula::Until(a, b) => {
            vet_tree_path(a)?;
            vet_tree_path(b)
        }
    }
}

fn resolve<'g>(g: &'g Cgso, coalition: &'g Coalition) -> Vec<(&'g str, AgentId)> {
    coalition
        .iter()
        .map(|n| (n.as_str(), g.agent_id(n).expect("vetted agent")))
        .collect()
}

fn move_props(g: &Cgso, agent: &str) -> Vec<String> {
    g.moves().iter().map(|m| atoms::move_atom(agent, m)).collect()
}

fn exactly_one(props: &[String]) -> StateFormula {
    or_all(
        (0..props.len())
            .map(|i| {
                let mut conj = vec![StateFormula::prop(&props[i])];
                for (j, other) in props.iter().enumerate() {
                    if j != i {
                        conj.push(StateFormula::prop(other).not());
                    }
                }
                and_all(conj)
            })
            .collect(),
    )
}

fn and_all(parts: Vec<StateFormula>) -> StateFormula {
    let mut it = parts
        .into_iter()
        .filter(|p| !matches!(p, StateFormula::True));
    match it.next() {
        None => StateFormula::True,
        Some(first) => it.fold(first, StateFormula::and),
    }
}

fn or_all(parts: Vec<StateFormula>) -> StateFormula {
    let mut it = parts
        .into_iter()
        .filter(|p| !matches!(p, StateFormula::False));
    match it.next() {
        None => StateFormula::False,
        Some(first) => it.fold(first, StateFormula::or),
    }
}

fn path_and_all(parts: Vec<PathFormula>) -> PathFormula {
    let mut it = parts.into_iter();
    match it.next() {
        None => PathFormula::state(StateFormula::True),
        Some(first) => it.fold(first, PathFormula::and),
    }
}

fn path_or_all(parts: Vec<PathFormula>) -> PathFormula {
    let mut it = parts.into_iter();
    match it.next() {
        None => PathFormula::state(StateFormula::False),
        Some(first) => it.fold(first, PathFormula::or),
    }
}

fn exists_chain(props: Vec<String>, body: StateFormula) -> StateFormula {
    props
        .into_iter()
        .rev()
        .fold(body, |acc, p| StateFormula::exists(p, acc))
}

fn forall_chain(props: Vec<String>, body: StateFormula) -> StateFormula {
    props
        .into_iter()
        .rev()
        .fold(body, |acc, p| StateFormula::forall(p, acc))
}

fn ag(phi: StateFormula) -> StateFormula {
    StateFormula::all_paths(PathFormula::state(phi).always())
}

fn ef(phi: StateFormula) -> StateFormula {
    StateFormula::exists_path(PathFormula::state(phi).eventually())
}

fn eg(phi: StateFormula) -> StateFormula {
    StateFormula::exists_path(PathFormula::state(phi).always())
}

fn ex(phi: StateFormula) -> StateFormula {
    StateFormula::exists_path(PathFormula::state(phi).next())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qctl::{self, QctlOptions};
    use crate::strategy::{check_memoryless, CheckOptions};

    fn game(name: &str) -> Cgso {
        let path = format!("{}/games/{name}", env!("CARGO_MANIFEST_DIR"));
        Cgso::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
    }

    fn f(s: &str) -> StateFormula {
        StateFormula::parse(s).unwrap()
    }

    fn run(g: &Cgso, spec: &str) -> (bool, Vec<(String, Vec<String>)>) {
        let at = g.init().unwrap();
        let red = build_memoryless_reduction(g, &f(spec), at).unwrap();
        let at = red.structure.state_id(&red.at).unwrap();
        let out =
            qctl::check_structure(&red.structure, &red.formula, at, QctlOptions::default())
                .unwrap();
        (out.holds, out.witness)
    }

    #[test]
    fn reduction_and_direct_engine_agree_on_reach() {
        let g = game("reach.game");
        let q0 = g.init().unwrap();
        let cases = [
            ("<<a1>>_0 F f", true),
            ("<<a1>>_0 X X X f", false),
            ("<<a2>>_0 X P", true),
            ("E F f", true),
            ("A F P", true),
            ("A F f", false),
            ("<<a1>>_0 <<>> F f", true),
            ("<<a1>>_0 relax(a1) <<>> F f", false),
            ("<<a1>>_0 keep(a1) <<>> F f", true),
        ];
        for (spec, expect) in cases {
            let (holds, _) = run(&g, spec);
            assert_eq!(holds, expect, "reduction verdict for `{spec}`");
            let direct = check_memoryless(&g, &f(spec), q0, CheckOptions::default()).unwrap();
            assert_eq!(direct.holds, expect, "direct verdict for `{spec}`");
        }
    }

    #[test]
    fn first_witness_reads_back_as_the_chosen_strategy() {
        let g = game("reach.game");
        let (holds, wit) = run(&g, "<<a1>>_0 F f");
        assert!(holds);
        let strings: Vec<(String, Vec<String>)> = vec![
            ("m#a1@m1".into(), vec!["q2".into(), "q3".into()]),
            ("m#a1@m2".into(), vec![]),
            (
                "m#a1@m3".into(),
                vec!["q0".into(), "q1".into(), "q4".into(), "q5".into()],
            ),
        ];
        assert_eq!(wit, strings);
    }

    #[test]
    fn tree_output_lands_on_the_quotient_with_an_anchored_branch() {
        let g = game("reach.game");
        let q0 = g.state_id("q0").unwrap();
        let red = build_uniform_reduction(&g, &f("<<a1>> F f"), q0).unwrap();
        assert_eq!(red.at, "C0");
        assert_eq!(red.structure.states(), ["C0", "C1"]);
        let body = match &red.formula {
            StateFormula::Exists { prop, body } => {
                assert_eq!(prop, "q#0@0");
                body
            }
            other => panic!("expected an anchored existential, got {other}"),
        };
        let text = body.to_string();
        for needle in ["m#a1@m1", "m#a1@m3", "q#0@1", "q#5@1", "s#0", "#u0"] {
            assert!(text.contains(needle), "missing `{needle}` in {text}");
        }
        assert!(!text.contains("o#"), "quotient output must not use obs atoms");
        assert!(!text.contains("p#"), "quotient output must not use state atoms");
    }

    #[test]
    fn outcome_arms_deduplicate_by_projection_and_target() {
        let g = game("reach.game");
        // distinct (projection, target) pairs across all six states:
        // 10 with nobody constrained, 24 for {a1}, all 54 for both agents
        for (names, arms) in [(vec![], 10), (vec!["a1"], 24), (vec!["a1", "a2"], 54)] {
            let c: Coalition = names.iter().map(|s| s.to_string()).collect();
            let flat = phi_out_memoryless(&g, &c).to_string();
            assert_eq!(flat.matches("X p#").count(), arms, "structure arms for {c:?}");
            let tree = phi_out_tree(&g, 1, &c).to_string();
            assert_eq!(tree.matches("X q#").count(), arms, "tree arms for {c:?}");
        }
    }

    #[test]
    fn quotient_translation_needs_a_uniform_game() {
        let mut b = Cgso::builder(
            vec!["a1".into(), "a2".into()],
            vec!["m1".into(), "m2".into()],
            vec!["g".into()],
            vec!["s0".into(), "s1".into()],
        )
        .unwrap();
        b.edge(StateId(0), &[None, None], StateId(1));
        b.edge(StateId(1), &[None, None], StateId(1));
        b.obs_agent(AgentId(0), vec![vec![StateId(0), StateId(1)]]);
        let g = b.finish();
        let err = build_uniform_reduction(&g, &f("<<a1>> F g"), StateId(0)).unwrap_err();
        assert!(matches!(err, ReduceError::Game(GameOpError::NotUniform)));
    }

    #[test]
    fn each_builder_rejects_the_other_quantifier_flavor() {
        let g = game("reach.game");
        let q0 = g.state_id("q0").unwrap();
        assert!(matches!(
            build_memoryless_reduction(&g, &f("<<a1>> F f"), q0),
            Err(ReduceError::Unsupported(_))
        ));
        assert!(matches!(
            build_uniform_reduction(&g, &f("<<a1>>_0 F f"), q0),
            Err(ReduceError::Unsupported(_))
        ));
    }

    #[test]
    fn vetting_catches_unknown_and_reserved_names() {
        let g = game("reach.game");
        let q0 = g.state_id("q0").unwrap();
        assert!(matches!(
            build_memoryless_reduction(&g, &f("<<a1>>_0 F nope"), q0),
            Err(ReduceError::UnknownProp(p)) if p == "nope"
        ));
        assert!(matches!(
            build_memoryless_reduction(&g, &f("<<zz>>_0 X P"), q0),
            Err(ReduceError::UnknownAgent(a)) if a == "zz"
        ));
        assert!(matches!(
            build_memoryless_reduction(&g, &f("<<co zz>>_0 X P"), q0),
            Err(ReduceError::UnknownAgent(_))
        ));
        assert!(matches!(
            build_memoryless_reduction(&g, &f("E F q#0@0"), q0),
            Err(ReduceError::ReservedProp(_))
        ));
        assert!(matches!(
            build_memoryless_reduction(&g, &f("exists P. E F P"), q0),
            Err(ReduceError::Unsupported(_))
        ));
        assert!(matches!(
            build_uniform_reduction(&g, &f("exists Z. E F Z"), q0),
            Err(ReduceError::Unsupported(_))
        ));
        let hashed = "agents: a\nmoves: m\nprops: x#y\nstates: s\n\
                      obs uniform: {s}\nedge s * -> s\n";
        let g2 = Cgso::parse(hashed).unwrap();
        assert!(matches!(
            build_memoryless_reduction(&g2, &f("E F x#y"), StateId(0)),
            Err(ReduceError::ReservedProp(p)) if p == "x#y"
        ));
    }

    #[test]
    fn fresh_prop_quantifiers_ride_along_to_the_structure() {
        let g = game("reach.game");
        // a set containing q0 and closed under some successor exists
        let (holds, _) = run(&g, "exists Z. (Z & A G (Z -> E X Z))");
        assert!(holds);
        let (holds, _) = run(&g, "exists Z. (Z & !Z)");
        assert!(!holds);
        // quantified props and strategy tables mix in one formula
        let (holds, wit) = run(&g, "exists Z. (!Z & <<a1>>_0 F (Z | f))");
        assert!(holds);
        assert!(wit.iter().any(|(p, _)| p == "m#a1@m1"));
    }
}
