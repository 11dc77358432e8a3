//! Existential path checking on finite structures.
//!
//! A path formula whose state subformulas have been reduced to atoms is put
//! into negation normal form over a small hash-consed arena, and then, rather
//! than building a standalone automaton, its tableau expansion is interleaved
//! with the structure: obligations are discharged against one concrete state
//! at a time, so disjunctions collapse as soon as a literal meets a label.
//! Acceptance is transition-based (an edge is good for an until it does not
//! postpone) and degeneralized with the usual round-robin counter. A state
//! admits a satisfying path exactly when its initial product node reaches a
//! cycle through an accepting edge.

use std::collections::{BTreeSet, HashMap};

use crate::bitset::BitSet;
use crate::game::StateId;
use crate::logic::{PathFormula, StateFormula};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct LtlId(u32);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum LtlNode {
    True,
    False,
    Pos(usize),
    Neg(usize),
    And(LtlId, LtlId),
    Or(LtlId, LtlId),
    Next(LtlId),
    Until(LtlId, LtlId),
    Release(LtlId, LtlId),
}

#[derive(Default)]
pub(crate) struct Arena {
    nodes: Vec<LtlNode>,
    memo: HashMap<LtlNode, LtlId>,
    untils: HashMap<LtlId, usize>,
}

impl Arena {
    pub(crate) fn new() -> Arena {
        Arena::default()
    }

    fn intern(&mut self, node: LtlNode) -> LtlId {
        if let Some(id) = self.memo.get(&node) {
            return *id;
        }
        let id = LtlId(self.nodes.len() as u32);
        self.nodes.push(node.clone());
        self.memo.insert(node.clone(), id);
        if matches!(node, LtlNode::Until(..)) {
            let idx = self.untils.len();
            self.untils.insert(id, idx);
        }
        id
    }

    fn tt(&mut self) -> LtlId {
        self.intern(LtlNode::True)
    }

    fn ff(&mut self) -> LtlId {
        self.intern(LtlNode::False)
    }

    fn and(&mut self, a: LtlId, b: LtlId) -> LtlId {
        match (&self.nodes[a.0 as usize], &self.nodes[b.0 as usize]) {
            (LtlNode::True, _) => b,
            (_, LtlNode::True) => a,
            (LtlNode::False, _) | (_, LtlNode::False) => self.ff(),
            _ => self.intern(LtlNode::And(a, b)),
        }
    }

    fn or(&mut self, a: LtlId, b: LtlId) -> LtlId {
        match (&self.nodes[a.0 as usize], &self.nodes[b.0 as usize]) {
            (LtlNode::False, _) => b,
            (_, LtlNode::False) => a,
            (LtlNode::True, _) | (_, LtlNode::True) => self.tt(),
            _ => self.intern(LtlNode::Or(a, b)),
        }
    }

    /// Negation normal form of `phi` (negated when `positive` is false).
    /// Each embedded state formula other than a literal constant goes through
    /// `atom`, which returns the index of its precomputed extension.
    pub(crate) fn intern_path(
        &mut self,
        phi: &PathFormula,
        positive: bool,
        atom: &mut dyn FnMut(&StateFormula) -> usize,
    ) -> LtlId {
        match phi {
            PathFormula::State(s) => match &**s {
                StateFormula::True => {
                    if positive {
                        self.tt()
                    } else {
                        self.ff()
                    }
                }
                StateFormula::False => {
                    if positive {
                        self.ff()
                    } else {
                        self.tt()
                    }
                }
                StateFormula::Not(inner) => {
                    let flipped = PathFormula::State(inner.clone());
                    self.intern_path(&flipped, !positive, atom)
                }
                other => {
                    let a = atom(other);
                    self.intern(if positive {
                        LtlNode::Pos(a)
                    } else {
                        LtlNode::Neg(a)
                    })
                }
            },
            PathFormula::Not(x) => self.intern_path(x, !positive, atom),
            PathFormula::And(a, b) => {
                let l = self.intern_path(a, positive, atom);
                let r = self.intern_path(b, positive, atom);
                if positive {
                    self.and(l, r)
                } else {
                    self.or(l, r)
                }
            }
            PathFormula::Or(a, b) => {
                let l = self.intern_path(a, positive, atom);
                let r = self.intern_path(b, positive, atom);
                if positive {
                    self.or(l, r)
                } else {
                    self.and(l, r)
                }
            }
            PathFormula::Implies(a, b) => {
                let l = self.intern_path(a, !positive, atom);
                let r = self.intern_path(b, positive, atom);
                if positive {
                    self.or(l, r)
                } else {
                    self.and(l, r)
                }
            }
            PathFormula::Next(x) => {
                let inner = self.intern_path(x, positive, atom);
                self.intern(LtlNode::Next(inner))
            }
            PathFormula::Until(a, b) => {
                let l = self.intern_path(a, positive, atom);
                let r = self.intern_path(b, positive, atom);
                self.intern(if positive {
                    LtlNode::Until(l, r)
                } else {
                    LtlNode::Release(l, r)
                })
            }
        }
    }

    fn n_untils(&self) -> usize {
        self.untils.len()
    }
}

#[derive(Clone)]
struct Branch {
    todo: Vec<LtlId>,
    seen: BTreeSet<LtlId>,
    next: BTreeSet<LtlId>,
    delayed: u64,
}

/// Discharges a set of obligations against one state, producing the possible
/// next-step obligation sets together with the untils each choice postponed.
fn expand(
    arena: &Arena,
    holds: &dyn Fn(usize) -> bool,
    now: &[LtlId],
) -> Vec<(BTreeSet<LtlId>, u64)> {
    let mut done: Vec<(BTreeSet<LtlId>, u64)> = Vec::new();
    let mut work = vec![Branch {
        todo: now.to_vec(),
        seen: BTreeSet::new(),
        next: BTreeSet::new(),
        delayed: 0,
    }];
    while let Some(mut br) = work.pop() {
        let Some(id) = br.todo.pop() else {
            if !done.iter().any(|(n, d)| *n == br.next && *d == br.delayed) {
                done.push((br.next, br.delayed));
            }
            continue;
        };
        if !br.seen.insert(id) {
            work.push(br);
            continue;
        }
        match arena.nodes[id.0 as usize] {
            LtlNode::True => work.push(br),
            LtlNode::False => {}
            LtlNode::Pos(p) => {
                if holds(p) {
                    work.push(br);
                }
            }
            LtlNode::Neg(p) => {
                if !holds(p) {
                    work.push(br);
                }
            }
            LtlNode::And(a, b) => {
                br.todo.push(a);
                br.todo.push(b);
                work.push(br);
            }
            LtlNode::Or(a, b) => {
                let mut other = br.clone();
                br.todo.push(a);
                other.todo.push(b);
                work.push(br);
                work.push(other);
            }
            LtlNode::Next(a) => {
                br.next.insert(a);
                work.push(br);
            }
            LtlNode::Until(a, b) => {
                let mut delay = br.clone();
                br.todo.push(b);
                work.push(br);
                delay.todo.push(a);
                delay.next.insert(id);
                delay.delayed |= 1 << arena.untils[&id];
                work.push(delay);
            }
            LtlNode::Release(a, b) => {
                let mut hold = br.clone();
                br.todo.push(b);
                br.todo.push(a);
                work.push(br);
                hold.todo.push(b);
                hold.next.insert(id);
                work.push(hold);
            }
        }
    }
    done
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct NodeKey {
    q: u32,
    obligations: Box<[LtlId]>,
    counter: u32,
}

/// The product reachable from every initial node, analyzed for accepting
/// cycles. `sat` holds the per-state verdicts; the graph is kept so a witness
/// lasso can be read back out.
pub(crate) struct ExistsPath {
    pub(crate) sat: BitSet,
    node_state: Vec<u32>,
    adj: Vec<Vec<(usize, bool)>>,
    reaches_good: Vec<bool>,
    in_good_scc: Vec<bool>,
    scc: Vec<usize>,
    init: Vec<usize>,
}

/// For every structure state, decides whether some infinite path from it
/// satisfies `root`. `atoms[i]` is the extension of atom `i`; `succ` must be
/// total.
pub(crate) fn exists_path(
    arena: &Arena,
    root: LtlId,
    succ: &[Vec<StateId>],
    atoms: &[BitSet],
) -> ExistsPath {
    let n = succ.len();
    let k = arena.n_untils();
    let mut nodes: Vec<NodeKey> = Vec::new();
    let mut index: HashMap<NodeKey, usize> = HashMap::new();
    let mut adj: Vec<Vec<(usize, bool)>> = Vec::new();
    let mut work: Vec<usize> = Vec::new();
    let mut intern = |key: NodeKey,
                      nodes: &mut Vec<NodeKey>,
                      adj: &mut Vec<Vec<(usize, bool)>>,
                      work: &mut Vec<usize>|
     -> usize {
        if let Some(i) = index.get(&key) {
            return *i;
        }
        let i = nodes.len();
        nodes.push(key.clone());
        adj.push(Vec::new());
        index.insert(key, i);
        work.push(i);
        i
    };

    let mut init = Vec::with_capacity(n);
    for q in 0..n {
        let key = NodeKey {
            q: q as u32,
            obligations: Box::new([root]),
            counter: 0,
        };
        init.push(intern(key, &mut nodes, &mut adj, &mut work));
    }

    while let Some(i) = work.pop() {
        let key = nodes[i].clone();
        let q = key.q as usize;
        let holds = |p: usize| atoms[p].contains(q);
        let branches = expand(arena, &holds, &key.obligations);
        for (next, delayed) in branches {
            let (accepting, counter) = if k == 0 {
                (true, 0)
            } else if delayed & (1 << key.counter) == 0 {
                let c = (key.counter + 1) % k as u32;
                (c == 0, c)
            } else {
                (false, key.counter)
            };
            let obligations: Box<[LtlId]> = next.iter().copied().collect();
            for q2 in &succ[q] {
                let j = intern(
                    NodeKey {
                        q: q2.0 as u32,
                        obligations: obligations.clone(),
                        counter,
                    },
                    &mut nodes,
                    &mut adj,
                    &mut work,
                );
                adj[i].push((j, accepting));
            }
        }
    }

    let scc = tarjan(&adj);
    let n_scc = scc.iter().copied().max().map(|m| m + 1).unwrap_or(0);
    let mut good = vec![false; n_scc];
    for (i, outs) in adj.iter().enumerate() {
        for (j, acc) in outs {
            if *acc && scc[i] == scc[*j] {
                good[scc[i]] = true;
            }
        }
    }
    let in_good_scc: Vec<bool> = (0..nodes.len()).map(|i| good[scc[i]]).collect();

    // nodes that can reach a good component, by reverse reachability
    let mut radj: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (i, outs) in adj.iter().enumerate() {
        for (j, _) in outs {
            radj[*j].push(i);
        }
    }
    let mut reaches_good = in_good_scc.clone();
    let mut queue: Vec<usize> = (0..nodes.len()).filter(|i| reaches_good[*i]).collect();
    while let Some(i) = queue.pop() {
        for &p in &radj[i] {
            if !reaches_good[p] {
                reaches_good[p] = true;
                queue.push(p);
            }
        }
    }

    let mut sat = BitSet::empty(n);
    for (q, i) in init.iter().enumerate() {
        if reaches_good[*i] {
            sat.insert(q);
        }
    }
    ExistsPath {
        sat,
        node_state: nodes.iter().map(|k| k.q).collect(),
        adj,
        reaches_good,
        in_good_scc,
        scc,
        init,
    }
}

impl ExistsPath {
    /// A lasso from `q` whose run is accepting: the stem ends where the loop
    /// closes, and the loop contains an accepting edge. Returns the projected
    /// state sequences `(stem, cycle)`; the path is `stem` followed by
    /// `cycle` forever, with `cycle` re-entered from its first state.
    pub(crate) fn witness(&self, q: StateId) -> Option<(Vec<StateId>, Vec<StateId>)> {
        let start = self.init[q.0];
        if !self.reaches_good[start] {
            return None;
        }
        // walk to the source of an accepting edge inside a good component
        let is_target = |i: usize| {
            self.in_good_scc[i]
                && self.adj[i]
                    .iter()
                    .any(|(j, acc)| *acc && self.scc[*j] == self.scc[i])
        };
        let stem_nodes = bfs_path(&self.adj, start, &is_target, None)?;
        let u = *stem_nodes.last().unwrap();
        let (v, _) = *self.adj[u]
            .iter()
            .find(|(j, acc)| *acc && self.scc[*j] == self.scc[u])
            .unwrap();
        // close the loop inside the component
        let cycle_nodes = if v == u {
            vec![v]
        } else {
            bfs_path(&self.adj, v, &|i| i == u, Some((&self.scc, self.scc[u])))?
        };
        let stem = stem_nodes
            .iter()
            .map(|i| StateId(self.node_state[*i] as usize))
            .collect();
        let cycle = cycle_nodes
            .iter()
            .map(|i| StateId(self.node_state[*i] as usize))
            .collect();
        Some((stem, cycle))
    }
}

/// Shortest node path from `start` to any target, optionally confined to one
/// strongly connected component. Includes both endpoints.
fn bfs_path(
    adj: &[Vec<(usize, bool)>],
    start: usize,
    is_target: &dyn Fn(usize) -> bool,
    within: Option<(&[usize], usize)>,
) -> Option<Vec<usize>> {
    let allowed = |i: usize| within.map(|(scc, c)| scc[i] == c).unwrap_or(true);
    if !allowed(start) {
        return None;
    }
    let mut parent: HashMap<usize, usize> = HashMap::new();
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(start);
    parent.insert(start, start);
    while let Some(i) = queue.pop_front() {
        if is_target(i) {
            let mut path = vec![i];
            let mut cur = i;
            while cur != start {
                cur = parent[&cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for (j, _) in &adj[i] {
            if allowed(*j) && !parent.contains_key(j) {
                parent.insert(*j, i);
                queue.push_back(*j);
            }
        }
    }
    None
}

/// Iterative Tarjan; returns the component index of every node, in reverse
/// topological order of discovery.
fn tarjan(adj: &[Vec<(usize, bool)>]) -> Vec<usize> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut scc = vec![usize::MAX; n];
    let mut next_index = 0usize;
    let mut n_scc = 0usize;

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        // call frames: (node, next child position)
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&mut (v, ref mut child)) = frames.last_mut() {
            if *child == 0 {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if *child < adj[v].len() {
                let (w, _) = adj[v][*child];
                *child += 1;
                if index[w] == usize::MAX {
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        scc[w] = n_scc;
                        if w == v {
                            break;
                        }
                    }
                    n_scc += 1;
                }
                frames.pop();
                if let Some(&mut (parent, _)) = frames.last_mut() {
                    low[parent] = low[parent].min(low[v]);
                }
            }
        }
    }
    scc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::StateFormula;

    /// Two states, `p` on q1, edges q0 -> q1 -> q1 plus whatever `extra` adds.
    fn chain(extra: &[(usize, usize)]) -> (Vec<Vec<StateId>>, Vec<BitSet>) {
        let mut succ = vec![vec![StateId(1)], vec![StateId(1)]];
        for (a, b) in extra {
            succ[*a].push(StateId(*b));
        }
        let mut p = BitSet::empty(2);
        p.insert(1);
        (succ, vec![p])
    }

    fn build(formula: &str, names: &[&str]) -> (Arena, LtlId) {
        // wrap in <<>> to get a path formula through the parser
        let phi = StateFormula::parse(&format!("<<>> ({formula})")).unwrap();
        let StateFormula::StratQ { body, .. } = phi else {
            unreachable!()
        };
        let mut arena = Arena::new();
        let mut atom = |s: &StateFormula| match s {
            StateFormula::Prop(p) => names.iter().position(|n| n == p).expect("known atom"),
            _ => panic!("unexpected embedded formula {s}"),
        };
        let root = arena.intern_path(&body, true, &mut atom);
        (arena, root)
    }

    #[test]
    fn eventually_reaches_forward() {
        let (succ, atoms) = chain(&[]);
        let (arena, root) = build("F p", &["p"]);
        let out = exists_path(&arena, root, &succ, &atoms);
        assert!(out.sat.contains(0));
        assert!(out.sat.contains(1));
    }

    #[test]
    fn globally_needs_an_invariant_loop() {
        // q0 has p and a self loop; q1 lacks p
        let succ = vec![vec![StateId(0), StateId(1)], vec![StateId(1)]];
        let mut p = BitSet::empty(2);
        p.insert(0);
        let (arena, root) = build("G p", &["p"]);
        let out = exists_path(&arena, root, &succ, &[p]);
        assert!(out.sat.contains(0));
        assert!(!out.sat.contains(1));
    }

    #[test]
    fn next_counts_one_step() {
        let (succ, atoms) = chain(&[]);
        let (arena, root) = build("X p", &["p"]);
        let out = exists_path(&arena, root, &succ, &atoms);
        assert!(out.sat.contains(0));
        assert!(out.sat.contains(1));
        let (arena, root) = build("X !p", &["p"]);
        let out = exists_path(&arena, root, &succ, &atoms);
        assert!(!out.sat.contains(0));
        assert!(!out.sat.contains(1));
    }

    #[test]
    fn until_respects_the_left_side() {
        // q0(a) -> q1(nothing) -> q2(b), and loops
        let succ = vec![vec![StateId(1)], vec![StateId(2)], vec![StateId(2)]];
        let mut a = BitSet::empty(3);
        a.insert(0);
        let mut b = BitSet::empty(3);
        b.insert(2);
        let (arena, root) = build("a U b", &["a", "b"]);
        let out = exists_path(&arena, root, &succ, &[a, b]);
        assert!(!out.sat.contains(0), "a fails at q1 before b arrives");
        assert!(!out.sat.contains(1));
        assert!(out.sat.contains(2));
    }

    #[test]
    fn conjunction_of_two_eventualities_wraps_the_counter() {
        // a ring q0 -> q1 -> q0 with a on q0 and b on q1
        let succ = vec![vec![StateId(1)], vec![StateId(0)]];
        let mut a = BitSet::empty(2);
        a.insert(0);
        let mut b = BitSet::empty(2);
        b.insert(1);
        let (arena, root) = build("F a & F b", &["a", "b"]);
        let out = exists_path(&arena, root, &succ, &[a.clone(), b.clone()]);
        assert!(out.sat.contains(0));
        assert!(out.sat.contains(1));
        // and the dual pair is unreachable
        let (arena, root) = build("F a & F b & X X !a", &["a", "b"]);
        let out = exists_path(&arena, root, &succ, &[a, b]);
        assert!(!out.sat.contains(0), "two steps from q0 is q0 again, which has a");
        assert!(out.sat.contains(1));
    }

    #[test]
    fn negated_until_becomes_release() {
        // !(true U !p) should behave exactly like G p
        let succ = vec![vec![StateId(0), StateId(1)], vec![StateId(1)]];
        let mut p = BitSet::empty(2);
        p.insert(0);
        let (arena, root) = build("!(true U !p)", &["p"]);
        let out = exists_path(&arena, root, &succ, &[p]);
        assert!(out.sat.contains(0));
        assert!(!out.sat.contains(1));
    }

    #[test]
    fn witness_lasso_is_a_real_path() {
        let succ = vec![
            vec![StateId(1), StateId(2)],
            vec![StateId(1)],
            vec![StateId(2)],
        ];
        let mut p = BitSet::empty(3);
        p.insert(2);
        let (arena, root) = build("F p", &["p"]);
        let out = exists_path(&arena, root, &succ, &[p.clone()]);
        let (stem, cycle) = out.witness(StateId(0)).expect("q0 satisfies E F p");
        assert_eq!(stem.first(), Some(&StateId(0)));
        assert!(!cycle.is_empty());
        // every consecutive pair, including the wrap, is a transition
        let mut full: Vec<StateId> = stem.clone();
        full.extend(cycle.iter().copied());
        full.extend(cycle.iter().copied());
        for w in full.windows(2) {
            assert!(
                succ[w[0].0].contains(&w[1]),
                "lasso steps outside the structure: {w:?}"
            );
        }
        // the cycle must visit p forever, given F p and this stem choice
        assert!(cycle.iter().any(|q| p.contains(q.0)) || stem.iter().any(|q| p.contains(q.0)));
    }

    #[test]
    fn no_witness_when_unsatisfied() {
        let (succ, atoms) = chain(&[]);
        let (arena, root) = build("G !p", &["p"]);
        let out = exists_path(&arena, root, &succ, &atoms);
        assert!(!out.sat.contains(0));
        assert!(out.witness(StateId(0)).is_none());
    }
}
