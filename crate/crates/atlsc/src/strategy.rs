//! Direct checking on the game itself.
//!
//! Strategies are finite tables from observation windows to moves. A
//! quantifier enumerates every table over the windows its coalition can
//! reach (lexicographically, first move first, so reported witnesses are
//! canonical), installs the candidate into the strategy context, and asks
//! whether all outcomes of the pruned system satisfy the body. Memoryless
//! tables key on the current observation class alone; windowed tables on
//! the last `k` classes, which makes the memoryful fragment approximate
//! but keeps it finite. Outcome nodes are state windows of the same
//! length, so nested quantifiers start from the history suffix their
//! enclosing play has already produced.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::automata::Arena;
use crate::bitset::BitSet;
use crate::game::{AgentId, Cgso, DiagnosticKind, MoveId, StateId};
use crate::logic::{PathFormula, StateFormula};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    Memoryless,
    Windowed { k: usize },
}

/// One agent's strategy: observation windows (class indices, oldest first)
/// to moves. Windows absent from the map leave the agent unconstrained
/// there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyTable {
    pub agent: AgentId,
    pub kind: StrategyKind,
    pub map: BTreeMap<Vec<u32>, MoveId>,
}

impl StrategyTable {
    pub fn window_len(&self) -> usize {
        match self.kind {
            StrategyKind::Memoryless => 1,
            StrategyKind::Windowed { k } => k,
        }
    }

    /// `strategy a1 memoryless: {q2 q3} -> m1` or
    /// `strategy a1 window3: (C0 C1) -> m2`, entries in key order.
    pub fn render(&self, g: &Cgso) -> String {
        let mut entries = Vec::new();
        for (key, mv) in &self.map {
            let lhs = match self.kind {
                StrategyKind::Memoryless => {
                    let class = &g.obs(self.agent).classes()[key[0] as usize];
                    let names: Vec<&str> =
                        class.iter().map(|q| g.state_name(*q)).collect();
                    format!("{{{}}}", names.join(" "))
                }
                StrategyKind::Windowed { .. } => {
                    let names: Vec<String> =
                        key.iter().map(|c| format!("C{c}")).collect();
                    format!("({})", names.join(" "))
                }
            };
            entries.push(format!("{lhs} -> {}", g.move_name(*mv)));
        }
        let kind = match self.kind {
            StrategyKind::Memoryless => "memoryless".to_string(),
            StrategyKind::Windowed { k } => format!("window{k}"),
        };
        format!(
            "strategy {} {kind}: {}",
            g.agent_name(self.agent),
            entries.join(", ")
        )
    }
}

/// The commitments currently in force, at most one table per agent.
#[derive(Debug, Clone, Default)]
pub struct StrategyContext {
    pub tables: BTreeMap<AgentId, StrategyTable>,
}

impl StrategyContext {
    pub fn insert(&mut self, table: StrategyTable) {
        self.tables.insert(table.agent, table);
    }

    pub fn remove(&mut self, agent: AgentId) {
        self.tables.remove(&agent);
    }

    fn hash64(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for (a, t) in &self.tables {
            a.0.hash(&mut h);
            t.kind.hash(&mut h);
            for (k, m) in &t.map {
                k.hash(&mut h);
                m.0.hash(&mut h);
            }
        }
        h.finish()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    /// Cap on distinct windows per pruned system.
    pub max_window_nodes: usize,
    /// Cap on strategy tables tried across the whole check.
    pub max_tables: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            max_window_nodes: 100_000,
            max_tables: 2_000_000,
        }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("game is unusable for checking: {0}")]
    BadGame(String),
    #[error("unknown proposition `{0}`")]
    UnknownProp(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("resource limit hit: {0}")]
    ResourceLimit(String),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EngineStats {
    pub states_explored: usize,
    pub tables_enumerated: u64,
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub holds: bool,
    /// Tables of the outermost quantifier's first successful assignment,
    /// empty when the formula does not start with one or does not hold.
    pub witness: Vec<StrategyTable>,
    pub stats: EngineStats,
}

/// Checks a memoryless-shaped formula, with every quantifier ranging over
/// memoryless observation-based strategies.
pub fn check_memoryless(
    g: &Cgso,
    phi: &StateFormula,
    at: StateId,
    opts: CheckOptions,
) -> Result<CheckResult, EngineError> {
    run(g, phi, at, 1, true, opts)
}

/// Checks any formula, approximating memoryful quantifiers by strategies
/// that see the last `k` observation classes.
pub fn check_windowed(
    g: &Cgso,
    phi: &StateFormula,
    at: StateId,
    k: usize,
    opts: CheckOptions,
) -> Result<CheckResult, EngineError> {
    if k == 0 {
        return Err(EngineError::Unsupported(
            "window length must be at least 1".to_string(),
        ));
    }
    run(g, phi, at, k, false, opts)
}

fn run(
    g: &Cgso,
    phi: &StateFormula,
    at: StateId,
    cap: usize,
    memoryless_only: bool,
    opts: CheckOptions,
) -> Result<CheckResult, EngineError> {
    for d in g.validate() {
        match d.kind {
            DiagnosticKind::IncompleteEdg | DiagnosticKind::PartitionCoverage => {
                return Err(EngineError::BadGame(d.message));
            }
            _ => {}
        }
    }
    vet_state(g, phi)?;
    let agents: BTreeSet<String> = g.agents().iter().cloned().collect();
    let phi = phi.eliminate_complements(&agents);
    if memoryless_only && !phi.memoryless_shaped() {
        return Err(EngineError::Unsupported(
            "the memoryless engine needs every quantifier marked `_0`".to_string(),
        ));
    }
    let matters = move_matters(g);
    let mut eng = Engine {
        g,
        cap,
        opts,
        matters,
        stats: EngineStats::default(),
        memo: HashMap::new(),
        root_witness: Vec::new(),
    };
    let ctx = StrategyContext::default();
    let anchor = vec![at];
    let holds = match &phi {
        StateFormula::StratQ {
            coalition,
            memoryless,
            body,
            ..
        } if !coalition.is_empty() => {
            eng.quantify(&ctx, &anchor, coalition, *memoryless, body, true)?
        }
        _ => eng.check_state(&ctx, ctx.hash64(), &anchor, &phi)?,
    };
    Ok(CheckResult {
        holds,
        witness: std::mem::take(&mut eng.root_witness),
        stats: eng.stats,
    })
}

fn vet_state(g: &Cgso, phi: &StateFormula) -> Result<(), EngineError> {
    match phi {
        StateFormula::True | StateFormula::False => Ok(()),
        StateFormula::Prop(p) => {
            if g.prop_id(p).is_some() {
                Ok(())
            } else {
                Err(EngineError::UnknownProp(p.clone()))
            }
        }
        StateFormula::Not(a) => vet_state(g, a),
        StateFormula::And(a, b) | StateFormula::Or(a, b) | StateFormula::Implies(a, b) => {
            vet_state(g, a)?;
            vet_state(g, b)
        }
        StateFormula::StratQ {
            coalition, body, ..
        } => {
            for a in coalition {
                if g.agent_id(a).is_none() {
                    return Err(EngineError::UnknownAgent(a.clone()));
                }
            }
            vet_path(g, body)
        }
        StateFormula::Relax {
            coalition, body, ..
        } => {
            for a in coalition {
                if g.agent_id(a).is_none() {
                    return Err(EngineError::UnknownAgent(a.clone()));
                }
            }
            vet_state(g, body)
        }
        StateFormula::Exists { .. } | StateFormula::Forall { .. } => Err(
            EngineError::Unsupported(
                "propositional quantification needs the symbolic engine".to_string(),
            ),
        ),
    }
}

fn vet_path(g: &Cgso, phi: &PathFormula) -> Result<(), EngineError> {
    match phi {
        PathFormula::State(s) => vet_state(g, s),
        PathFormula::Not(a) | PathFormula::Next(a) => vet_path(g, a),
        PathFormula::And(a, b)
        | PathFormula::Or(a, b)
        | PathFormula::Implies(a, b)
        | PathFormula::Until(a, b) => {
            vet_path(g, a)?;
            vet_path(g, b)
        }
    }
}

/// `matters[q][a]`: whether agent `a`'s component can change the successor
/// of `q`. Windows where it cannot need no table entry.
fn move_matters(g: &Cgso) -> Vec<Vec<bool>> {
    let mut out = vec![vec![false; g.n_agents()]; g.n_states()];
    for (q, row) in out.iter_mut().enumerate() {
        for (a, flag) in row.iter_mut().enumerate() {
            'outer: for mv in g.move_vectors() {
                let base = g.successor(StateId(q), &mv);
                let mut alt = mv.clone();
                for m in 0..g.n_moves() {
                    alt[a] = MoveId(m);
                    if g.successor(StateId(q), &alt) != base {
                        *flag = true;
                        break 'outer;
                    }
                }
            }
        }
    }
    out
}

struct Pruned {
    nodes: Vec<Vec<StateId>>,
    succ: Vec<Vec<StateId>>,
}

struct Engine<'g> {
    g: &'g Cgso,
    cap: usize,
    opts: CheckOptions,
    matters: Vec<Vec<bool>>,
    stats: EngineStats,
    memo: HashMap<(usize, u64, Vec<StateId>), bool>,
    root_witness: Vec<StrategyTable>,
}

impl<'g> Engine<'g> {
    /// The observation-class window agent `a` sees at history suffix `w`,
    /// truncated to the last `cap` entries.
    fn project(&self, w: &[StateId], a: AgentId, cap: usize) -> Vec<u32> {
        let start = w.len().saturating_sub(cap);
        w[start..]
            .iter()
            .map(|q| self.g.obs(a).class_of(*q).expect("validated partition") as u32)
            .collect()
    }

    fn allowed_moves(&self, ctx: &StrategyContext, w: &[StateId], a: usize) -> Vec<MoveId> {
        if let Some(t) = ctx.tables.get(&AgentId(a)) {
            let key = self.project(w, AgentId(a), t.window_len());
            if let Some(m) = t.map.get(&key) {
                return vec![*m];
            }
        }
        (0..self.g.n_moves()).map(MoveId).collect()
    }

    /// Window successors of `w` permitted by the context.
    fn window_successors(
        &self,
        ctx: &StrategyContext,
        w: &[StateId],
    ) -> Result<Vec<Vec<StateId>>, EngineError> {
        let q = *w.last().expect("windows are nonempty");
        let allowed: Vec<Vec<MoveId>> = (0..self.g.n_agents())
            .map(|a| self.allowed_moves(ctx, w, a))
            .collect();
        let mut targets = BTreeSet::new();
        let mut mv = vec![MoveId(0); self.g.n_agents()];
        let mut idx = vec![0usize; self.g.n_agents()];
        loop {
            for a in 0..self.g.n_agents() {
                mv[a] = allowed[a][idx[a]];
            }
            match self.g.successor(q, &mv) {
                Some(t) => {
                    targets.insert(t);
                }
                None => {
                    return Err(EngineError::BadGame(format!(
                        "no transition from {} under some move vector",
                        self.g.state_name(q)
                    )));
                }
            }
            // odometer over the allowed-move lists
            let mut a = self.g.n_agents();
            loop {
                if a == 0 {
                    break;
                }
                a -= 1;
                idx[a] += 1;
                if idx[a] < allowed[a].len() {
                    break;
                }
                idx[a] = 0;
            }
            if idx.iter().all(|i| *i == 0) {
                break;
            }
        }
        Ok(targets
            .into_iter()
            .map(|t| {
                let mut next = w.to_vec();
                next.push(t);
                if next.len() > self.cap {
                    next.remove(0);
                }
                next
            })
            .collect())
    }

    /// Breadth-first closure of windows reachable from `anchor` under the
    /// context. The anchor is node 0.
    fn explore(
        &mut self,
        ctx: &StrategyContext,
        anchor: &[StateId],
    ) -> Result<Pruned, EngineError> {
        let mut nodes: Vec<Vec<StateId>> = vec![anchor.to_vec()];
        let mut index: HashMap<Vec<StateId>, usize> = HashMap::new();
        index.insert(anchor.to_vec(), 0);
        let mut succ: Vec<Vec<StateId>> = Vec::new();
        let mut i = 0;
        while i < nodes.len() {
            let w = nodes[i].clone();
            let mut out = Vec::new();
            for next in self.window_successors(ctx, &w)? {
                let id = match index.get(&next) {
                    Some(id) => *id,
                    None => {
                        let id = nodes.len();
                        if id == self.opts.max_window_nodes {
                            return Err(EngineError::ResourceLimit(format!(
                                "more than {} windows",
                                self.opts.max_window_nodes
                            )));
                        }
                        nodes.push(next.clone());
                        index.insert(next, id);
                        id
                    }
                };
                out.push(StateId(id));
            }
            succ.push(out);
            i += 1;
        }
        self.stats.states_explored += nodes.len();
        Ok(Pruned { nodes, succ })
    }

    fn check_state(
        &mut self,
        ctx: &StrategyContext,
        ctx_hash: u64,
        w: &[StateId],
        phi: &StateFormula,
    ) -> Result<bool, EngineError> {
        match phi {
            StateFormula::True => Ok(true),
            StateFormula::False => Ok(false),
            StateFormula::Prop(p) => {
                let q = *w.last().expect("windows are nonempty");
                match self.g.prop_id(p) {
                    Some(id) => Ok(self.g.has_prop(q, id)),
                    None => Err(EngineError::UnknownProp(p.clone())),
                }
            }
            StateFormula::Not(a) => Ok(!self.check_state(ctx, ctx_hash, w, a)?),
            StateFormula::And(a, b) => Ok(self.check_state(ctx, ctx_hash, w, a)?
                && self.check_state(ctx, ctx_hash, w, b)?),
            StateFormula::Or(a, b) => Ok(self.check_state(ctx, ctx_hash, w, a)?
                || self.check_state(ctx, ctx_hash, w, b)?),
            StateFormula::Implies(a, b) => Ok(!self.check_state(ctx, ctx_hash, w, a)?
                || self.check_state(ctx, ctx_hash, w, b)?),
            StateFormula::Relax {
                coalition, body, ..
            } => {
                let mut inner = ctx.clone();
                for a in coalition {
                    if let Some(id) = self.g.agent_id(a) {
                        inner.remove(id);
                    }
                }
                let h = inner.hash64();
                self.check_state(&inner, h, w, body)
            }
            StateFormula::StratQ {
                coalition,
                memoryless,
                body,
                ..
            } => {
                let key = (phi as *const StateFormula as usize, ctx_hash, w.to_vec());
                if let Some(hit) = self.memo.get(&key) {
                    return Ok(*hit);
                }
                let held = if coalition.is_empty() {
                    self.check_path_all(ctx, ctx_hash, w, body)?
                } else {
                    self.quantify(ctx, w, coalition, *memoryless, body, false)?
                };
                self.memo.insert(key, held);
                Ok(held)
            }
            StateFormula::Exists { .. } | StateFormula::Forall { .. } => Err(
                EngineError::Unsupported(
                    "propositional quantification needs the symbolic engine".to_string(),
                ),
            ),
        }
    }

    /// Does every outcome of the context from `w` satisfy the path formula?
    fn check_path_all(
        &mut self,
        ctx: &StrategyContext,
        ctx_hash: u64,
        w: &[StateId],
        body: &PathFormula,
    ) -> Result<bool, EngineError> {
        let pruned = self.explore(ctx, w)?;
        let mut arena = Arena::new();
        let mut atoms: Vec<BitSet> = Vec::new();
        let mut failure: Option<EngineError> = None;
        let n = pruned.nodes.len();
        let root = {
            let mut atomize = |s: &StateFormula| -> usize {
                let mut ext = BitSet::empty(n);
                for (i, node) in pruned.nodes.iter().enumerate() {
                    match self.check_state(ctx, ctx_hash, node, s) {
                        Ok(true) => ext.insert(i),
                        Ok(false) => {}
                        Err(e) => {
                            if failure.is_none() {
                                failure = Some(e);
                            }
                            break;
                        }
                    }
                }
                atoms.push(ext);
                atoms.len() - 1
            };
            // a violating path exists iff some path satisfies the negation
            arena.intern_path(body, false, &mut atomize)
        };
        if let Some(e) = failure {
            return Err(e);
        }
        let ep = crate::automata::exists_path(&arena, root, &pruned.succ, &atoms);
        Ok(!ep.sat.contains(0))
    }

    /// Enumerates joint tables for the coalition and installs the first one
    /// under which all outcomes satisfy the body.
    fn quantify(
        &mut self,
        ctx: &StrategyContext,
        w: &[StateId],
        coalition: &BTreeSet<String>,
        memoryless: bool,
        body: &PathFormula,
        record: bool,
    ) -> Result<bool, EngineError> {
        let members: Vec<AgentId> = coalition
            .iter()
            .map(|a| {
                self.g
                    .agent_id(a)
                    .ok_or_else(|| EngineError::UnknownAgent(a.clone()))
            })
            .collect::<Result<_, _>>()?;
        let kind = if memoryless {
            StrategyKind::Memoryless
        } else {
            StrategyKind::Windowed { k: self.cap }
        };
        let window_len = match kind {
            StrategyKind::Memoryless => 1,
            StrategyKind::Windowed { k } => k,
        };

        // windows the coalition may have to act in, discovered with its
        // members unconstrained
        let mut free = ctx.clone();
        for a in &members {
            free.remove(*a);
        }
        let discovered = self.explore(&free, w)?;
        let mut keys: Vec<BTreeSet<Vec<u32>>> = vec![BTreeSet::new(); members.len()];
        for node in &discovered.nodes {
            let q = *node.last().expect("windows are nonempty");
            for (i, a) in members.iter().enumerate() {
                if self.matters[q.0][a.0] {
                    keys[i].insert(self.project(node, *a, window_len));
                }
            }
        }
        let slots: Vec<(usize, Vec<u32>)> = members
            .iter()
            .enumerate()
            .flat_map(|(i, _)| keys[i].iter().map(move |k| (i, k.clone())))
            .collect();

        let r = self.g.n_moves();
        let mut choice = vec![0usize; slots.len()];
        loop {
            self.stats.tables_enumerated += 1;
            if self.stats.tables_enumerated > self.opts.max_tables {
                return Err(EngineError::ResourceLimit(format!(
                    "more than {} strategy tables",
                    self.opts.max_tables
                )));
            }
            let mut tables: Vec<StrategyTable> = members
                .iter()
                .map(|a| StrategyTable {
                    agent: *a,
                    kind,
                    map: BTreeMap::new(),
                })
                .collect();
            for (s, (i, key)) in slots.iter().enumerate() {
                tables[*i].map.insert(key.clone(), MoveId(choice[s]));
            }
            let mut inner = ctx.clone();
            for t in &tables {
                inner.insert(t.clone());
            }
            let h = inner.hash64();
            if self.check_path_all(&inner, h, w, body)? {
                if record {
                    self.root_witness = tables;
                }
                return Ok(true);
            }
            // lexicographic odometer, last slot fastest
            let mut s = slots.len();
            loop {
                if s == 0 {
                    return Ok(false);
                }
                s -= 1;
                choice[s] += 1;
                if choice[s] < r {
                    break;
                }
                choice[s] = 0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn game(name: &str) -> Cgso {
        let path = format!("{}/games/{name}", env!("CARGO_MANIFEST_DIR"));
        Cgso::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
    }

    fn f(s: &str) -> StateFormula {
        StateFormula::parse(s).unwrap()
    }

    #[test]
    fn memoryless_reachability_with_canonical_witness() {
        let g = game("reach.game");
        let q0 = g.state_id("q0").unwrap();
        let r = check_memoryless(&g, &f("<<a1>>_0 F f"), q0, CheckOptions::default()).unwrap();
        assert!(r.holds);
        assert_eq!(r.witness.len(), 1);
        // only the {q2 q3} class matters to a1's moves, and the scan tries
        // m1 there first
        assert_eq!(
            r.witness[0].render(&g),
            "strategy a1 memoryless: {q2 q3} -> m1"
        );
    }

    #[test]
    fn memoryless_three_step_reachability_fails() {
        let g = game("reach.game");
        let q0 = g.state_id("q0").unwrap();
        let r = check_memoryless(&g, &f("<<a1>>_0 X X X f"), q0, CheckOptions::default())
            .unwrap();
        assert!(!r.holds);
        assert!(r.witness.is_empty());
    }

    #[test]
    fn windowed_strategies_recover_three_step_reachability() {
        let g = game("reach.game");
        let q0 = g.state_id("q0").unwrap();
        let r = check_windowed(&g, &f("<<a1>> X X X f"), q0, 3, CheckOptions::default())
            .unwrap();
        assert!(r.holds);
        assert_eq!(r.witness.len(), 1);
        let table = &r.witness[0];
        assert_eq!(table.kind, StrategyKind::Windowed { k: 3 });
        // the class seen after q0 -> q1 -> q3 must divert to q5 while the
        // shorter branches keep playing m1
        assert_eq!(
            table.map.get(&vec![0, 0, 1]),
            Some(&MoveId(1)),
            "full table: {}",
            table.render(&g)
        );
    }

    #[test]
    fn windowed_reachability_holds_with_two_step_memory() {
        let g = game("reach.game");
        let q0 = g.state_id("q0").unwrap();
        let r =
            check_windowed(&g, &f("<<a1>> F f"), q0, 2, CheckOptions::default()).unwrap();
        assert!(r.holds);
    }

    #[test]
    fn split_knowledge_separates_inner_and_outer_quantifiers() {
        let g = game("fork.game");
        let q0 = g.state_id("q0").unwrap();
        let phi = f("A X (<<a1>> X f) & !<<a1>> X X f");
        let r = check_windowed(&g, &phi, q0, 3, CheckOptions::default()).unwrap();
        assert!(r.holds);
    }

    #[test]
    fn plain_path_quantifiers_work_in_both_engines() {
        let g = game("reach.game");
        let q0 = g.state_id("q0").unwrap();
        for phi in ["E F f", "A F P", "!A F f", "E X P"] {
            let m = check_memoryless(&g, &f(phi), q0, CheckOptions::default()).unwrap();
            let w = check_windowed(&g, &f(phi), q0, 3, CheckOptions::default()).unwrap();
            assert!(m.holds, "{phi} via memoryless");
            assert!(w.holds, "{phi} via windowed");
        }
    }

    #[test]
    fn empty_coalition_quantifies_over_context_outcomes() {
        let g = game("reach.game");
        let q0 = g.state_id("q0").unwrap();
        // committing a1 first makes the inner outcome quantifier see only
        // the pruned plays, so these two are equivalent
        let direct = check_memoryless(&g, &f("<<a1>>_0 F f"), q0, CheckOptions::default())
            .unwrap();
        let nested =
            check_memoryless(&g, &f("<<a1>>_0 <<>> F f"), q0, CheckOptions::default())
                .unwrap();
        assert_eq!(direct.holds, nested.holds);
        // relaxing a1 drops the commitment again: some unconstrained play
        // loops in q4 forever
        let relaxed = check_memoryless(
            &g,
            &f("<<a1>>_0 relax(a1) <<>> F f"),
            q0,
            CheckOptions::default(),
        )
        .unwrap();
        assert!(!relaxed.holds);
        // keep(a1) relaxes everyone else, which here is nothing
        let kept = check_memoryless(
            &g,
            &f("<<a1>>_0 keep(a1) <<>> F f"),
            q0,
            CheckOptions::default(),
        )
        .unwrap();
        assert!(kept.holds);
    }

    #[test]
    fn memoryless_engine_rejects_memoryful_quantifiers() {
        let g = game("reach.game");
        let q0 = g.state_id("q0").unwrap();
        let e = check_memoryless(&g, &f("<<a1>> F f"), q0, CheckOptions::default())
            .unwrap_err();
        assert!(matches!(e, EngineError::Unsupported(_)));
    }

    #[test]
    fn unknown_names_error_out() {
        let g = game("reach.game");
        let q0 = g.state_id("q0").unwrap();
        let e = check_memoryless(&g, &f("<<zz>>_0 X f"), q0, CheckOptions::default())
            .unwrap_err();
        assert!(matches!(e, EngineError::UnknownAgent(a) if a == "zz"));
        let e = check_memoryless(&g, &f("<<a1>>_0 X nope"), q0, CheckOptions::default())
            .unwrap_err();
        assert!(matches!(e, EngineError::UnknownProp(p) if p == "nope"));
        let e = check_memoryless(&g, &f("exists Z. Z"), q0, CheckOptions::default())
            .unwrap_err();
        assert!(matches!(e, EngineError::Unsupported(_)));
    }

    #[test]
    fn table_cap_stops_runaway_enumeration() {
        let g = game("reach.game");
        let q0 = g.state_id("q0").unwrap();
        let opts = CheckOptions {
            max_tables: 2,
            ..CheckOptions::default()
        };
        let e = check_memoryless(&g, &f("<<a1>>_0 X X X f"), q0, opts).unwrap_err();
        assert!(matches!(e, EngineError::ResourceLimit(_)));
    }

    #[test]
    fn stats_count_windows_and_tables() {
        let g = game("reach.game");
        let q0 = g.state_id("q0").unwrap();
        let r = check_memoryless(&g, &f("<<a1>>_0 X X X f"), q0, CheckOptions::default())
            .unwrap();
        // one class where a1's move matters, three moves, no early exit
        assert_eq!(r.stats.tables_enumerated, 3);
        assert!(r.stats.states_explored > 0);
    }
}
