//! Concurrent game structures with partial observation.
//!
//! A game consists of states, agents, a shared move alphabet, a total
//! transition table `edg` mapping a state and one move per agent to a
//! successor, propositional labels, and one observation partition per agent.
//! The plain transition relation is always derived from `edg`, never stored.
//!
//! Games are built through [`GameBuilder`] (used by the text-format parser in
//! this module and by the random generator) and checked by [`Cgso::validate`],
//! which reports every violated structural invariant instead of failing fast.

mod text;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::atoms;
use crate::kripke::KripkeStructure;

/// Index into the state list of a game or Kripke structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub usize);

/// Index into the agent list of a game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentId(pub usize);

/// Index into the move alphabet of a game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MoveId(pub usize);

/// One agent's observation partition: a list of blocks of states.
///
/// Valid partitions cover every state exactly once; [`Cgso::validate`]
/// reports the states that break this. Blocks are kept in canonical order
/// (sorted members, blocks ordered by smallest member) once valid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationPartition {
    classes: Vec<Vec<StateId>>,
}

impl ObservationPartition {
    pub fn new(classes: Vec<Vec<StateId>>) -> Self {
        ObservationPartition { classes }
    }

    /// The identity partition: every state alone in its block.
    pub fn identity(n_states: usize) -> Self {
        ObservationPartition {
            classes: (0..n_states).map(|i| vec![StateId(i)]).collect(),
        }
    }

    pub fn classes(&self) -> &[Vec<StateId>] {
        &self.classes
    }

    /// Index of the first block containing `q`, if any.
    pub fn class_of(&self, q: StateId) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&q))
    }

    /// True when the blocks partition `0..n_states` exactly.
    pub fn covers_exactly(&self, n_states: usize) -> bool {
        let mut seen = vec![false; n_states];
        for c in &self.classes {
            if c.is_empty() {
                return false;
            }
            for q in c {
                if q.0 >= n_states || seen[q.0] {
                    return false;
                }
                seen[q.0] = true;
            }
        }
        seen.into_iter().all(|s| s)
    }

    fn canonicalize(&mut self) {
        for c in self.classes.iter_mut() {
            c.sort();
            c.dedup();
        }
        self.classes.retain(|c| !c.is_empty());
        self.classes.sort_by_key(|c| c[0]);
    }

    /// Set-family equality, ignoring block and member order.
    pub fn same_family(&self, other: &ObservationPartition) -> bool {
        let norm = |p: &ObservationPartition| -> BTreeSet<Vec<StateId>> {
            p.classes
                .iter()
                .map(|c| {
                    let mut c = c.clone();
                    c.sort();
                    c
                })
                .collect()
        };
        norm(self) == norm(other)
    }
}

/// Kinds of structural violations reported by [`Cgso::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    IncompleteEdg,
    PartitionCoverage,
    TurnBasedOwnership,
    ReservedProp,
}

/// One structural violation with a human-readable description.
#[derive(Debug, Clone)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

/// Errors from game operations whose preconditions are not met.
#[derive(Debug, Error)]
pub enum GameOpError {
    #[error("observation partitions differ between agents; operation needs a uniform game")]
    NotUniform,
    #[error("game is structurally invalid: {0}")]
    InvalidGame(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("agent order must list every agent exactly once, got {0}")]
    BadAgentOrder(String),
}

/// A concurrent game structure with partial observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Cgso {
    states: Vec<String>,
    props: Vec<String>,
    labels: Vec<BTreeSet<usize>>,
    agents: Vec<String>,
    moves: Vec<String>,
    /// `edg[q][mv_index]`; `None` marks entries never covered by an edge rule.
    edg: Vec<Vec<Option<StateId>>>,
    obs: Vec<ObservationPartition>,
    owner: Option<Vec<AgentId>>,
    init: Option<StateId>,
}

impl Cgso {
    pub fn builder(
        agents: Vec<String>,
        moves: Vec<String>,
        props: Vec<String>,
        states: Vec<String>,
    ) -> Result<GameBuilder, String> {
        GameBuilder::new(agents, moves, props, states)
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.0]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name).map(StateId)
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn agent_name(&self, a: AgentId) -> &str {
        &self.agents[a.0]
    }

    pub fn agent_id(&self, name: &str) -> Option<AgentId> {
        self.agents.iter().position(|s| s == name).map(AgentId)
    }

    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn moves(&self) -> &[String] {
        &self.moves
    }

    pub fn move_name(&self, m: MoveId) -> &str {
        &self.moves[m.0]
    }

    pub fn move_id(&self, name: &str) -> Option<MoveId> {
        self.moves.iter().position(|s| s == name).map(MoveId)
    }

    pub fn n_moves(&self) -> usize {
        self.moves.len()
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn prop_id(&self, name: &str) -> Option<usize> {
        self.props.iter().position(|s| s == name)
    }

    pub fn label_set(&self, q: StateId) -> &BTreeSet<usize> {
        &self.labels[q.0]
    }

    pub fn has_prop(&self, q: StateId, prop: usize) -> bool {
        self.labels[q.0].contains(&prop)
    }

    pub fn obs(&self, a: AgentId) -> &ObservationPartition {
        &self.obs[a.0]
    }

    pub fn owner(&self, q: StateId) -> Option<AgentId> {
        self.owner.as_ref().map(|o| o[q.0])
    }

    pub fn has_owners(&self) -> bool {
        self.owner.is_some()
    }

    pub fn init(&self) -> Option<StateId> {
        self.init
    }

    /// Packs one move per agent (agent order) into an `edg` column index.
    /// Agent 0 is the most significant digit, so ascending indices enumerate
    /// move vectors in lexicographic order.
    pub fn mv_index(&self, mv: &[MoveId]) -> usize {
        debug_assert_eq!(mv.len(), self.agents.len());
        let r = self.moves.len();
        mv.iter().fold(0, |acc, m| acc * r + m.0)
    }

    /// Inverse of [`Cgso::mv_index`].
    pub fn mv_from_index(&self, mut idx: usize) -> Vec<MoveId> {
        let r = self.moves.len();
        let p = self.agents.len();
        let mut mv = vec![MoveId(0); p];
        for a in (0..p).rev() {
            mv[a] = MoveId(idx % r);
            idx /= r;
        }
        mv
    }

    pub fn n_move_vectors(&self) -> usize {
        self.moves.len().pow(self.agents.len() as u32)
    }

    /// All move vectors in lexicographic (agent-major) order.
    pub fn move_vectors(&self) -> impl Iterator<Item = Vec<MoveId>> + '_ {
        (0..self.n_move_vectors()).map(|i| self.mv_from_index(i))
    }

    pub fn successor(&self, q: StateId, mv: &[MoveId]) -> Option<StateId> {
        self.edg[q.0][self.mv_index(mv)]
    }

    fn successor_by_index(&self, q: StateId, idx: usize) -> Option<StateId> {
        self.edg[q.0][idx]
    }

    /// Distinct successors of `q` under the derived transition relation,
    /// ascending by state index.
    pub fn derived_successors(&self, q: StateId) -> Vec<StateId> {
        let mut out: Vec<StateId> = self.edg[q.0].iter().flatten().copied().collect();
        out.sort();
        out.dedup();
        out
    }

    /// True when some move vector takes `from` to `to`.
    pub fn has_transition(&self, from: StateId, to: StateId) -> bool {
        self.edg[from.0].contains(&Some(to))
    }

    fn require_total(&self) -> Result<(), GameOpError> {
        for q in 0..self.states.len() {
            if let Some(i) = self.edg[q].iter().position(|t| t.is_none()) {
                let mv = self.mv_from_index(i);
                return Err(GameOpError::InvalidGame(format!(
                    "edg({}, {}) is undefined",
                    self.states[q],
                    self.render_mv(&mv)
                )));
            }
        }
        Ok(())
    }

    fn require_valid_obs(&self) -> Result<(), GameOpError> {
        for (a, p) in self.obs.iter().enumerate() {
            if !p.covers_exactly(self.states.len()) {
                return Err(GameOpError::InvalidGame(format!(
                    "observation partition of {} does not cover the states exactly once",
                    self.agents[a]
                )));
            }
        }
        Ok(())
    }

    fn render_mv(&self, mv: &[MoveId]) -> String {
        mv.iter()
            .map(|m| self.moves[m.0].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Checks every structural invariant and returns one diagnostic per
    /// violation. An empty result means the game is well-formed.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for p in &self.props {
            if p.contains('#') {
                out.push(Diagnostic {
                    kind: DiagnosticKind::ReservedProp,
                    message: format!(
                        "prop `{p}` uses the reserved `#` character; such names are generated internally"
                    ),
                });
            }
        }
        for q in 0..self.states.len() {
            for (i, t) in self.edg[q].iter().enumerate() {
                if t.is_none() {
                    let mv = self.mv_from_index(i);
                    out.push(Diagnostic {
                        kind: DiagnosticKind::IncompleteEdg,
                        message: format!(
                            "no edge covers state {} with moves {}",
                            self.states[q],
                            self.render_mv(&mv)
                        ),
                    });
                }
            }
        }
        for (a, p) in self.obs.iter().enumerate() {
            let mut seen = vec![0usize; self.states.len()];
            for c in p.classes() {
                for q in c {
                    if q.0 < seen.len() {
                        seen[q.0] += 1;
                    }
                }
                if c.is_empty() {
                    out.push(Diagnostic {
                        kind: DiagnosticKind::PartitionCoverage,
                        message: format!("observation partition of {} has an empty class", self.agents[a]),
                    });
                }
            }
            for (q, n) in seen.iter().enumerate() {
                if *n == 0 {
                    out.push(Diagnostic {
                        kind: DiagnosticKind::PartitionCoverage,
                        message: format!(
                            "state {} is missing from the observation partition of {}",
                            self.states[q], self.agents[a]
                        ),
                    });
                } else if *n > 1 {
                    out.push(Diagnostic {
                        kind: DiagnosticKind::PartitionCoverage,
                        message: format!(
                            "state {} appears in several classes of the observation partition of {}",
                            self.states[q], self.agents[a]
                        ),
                    });
                }
            }
        }
        if let Some(owner) = &self.owner {
            for (q, &own) in owner.iter().enumerate() {
                // successors may depend only on the owner's move component
                'moves: for m in 0..self.moves.len() {
                    let mut target: Option<Option<StateId>> = None;
                    for idx in 0..self.n_move_vectors() {
                        let mv = self.mv_from_index(idx);
                        if mv[own.0].0 != m {
                            continue;
                        }
                        let t = self.edg[q][idx];
                        match target {
                            None => target = Some(t),
                            Some(prev) if prev != t => {
                                out.push(Diagnostic {
                                    kind: DiagnosticKind::TurnBasedOwnership,
                                    message: format!(
                                        "state {} is owned by {} but its successor also depends on other agents' moves",
                                        self.states[q], self.agents[own.0]
                                    ),
                                });
                                break 'moves;
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
        out
    }

    /// True when all agents observe through the same partition.
    pub fn is_uniform(&self) -> bool {
        self.obs
            .windows(2)
            .all(|w| w[0].same_family(&w[1]))
    }

    /// The canonical block order used by quotients and windowed strategies:
    /// the first agent's partition (all partitions agree as set families on a
    /// uniform game, and blocks are stored in canonical order).
    pub fn uniform_classes(&self) -> Result<&[Vec<StateId>], GameOpError> {
        if !self.is_uniform() {
            return Err(GameOpError::NotUniform);
        }
        self.require_valid_obs()?;
        Ok(self.obs[0].classes())
    }

    /// Quotient of a uniform game by its observation relation: one node per
    /// class, labeled with the class-membership atoms `s#i`, and a complete
    /// transition relation over the nodes.
    pub fn quotient(&self) -> Result<KripkeStructure, GameOpError> {
        let classes = self.uniform_classes()?.to_vec();
        let names: Vec<String> = (0..classes.len()).map(|c| format!("C{c}")).collect();
        let props: Vec<String> = (0..self.states.len()).map(atoms::class_atom).collect();
        let labels: Vec<BTreeSet<usize>> = classes
            .iter()
            .map(|c| c.iter().map(|q| q.0).collect())
            .collect();
        let all: Vec<StateId> = (0..classes.len()).map(StateId).collect();
        let transitions = vec![all; classes.len()];
        KripkeStructure::new(names, props, labels, transitions, None)
            .map_err(|e| GameOpError::InvalidGame(e.to_string()))
    }

    /// The Kripke structure underlying the game: same states, derived
    /// transitions, and labels extended with one atom `p#q` per state plus
    /// one atom `o#a@c` per agent and observation class.
    pub fn underlying_kripke(&self) -> Result<KripkeStructure, GameOpError> {
        self.require_total()?;
        self.require_valid_obs()?;
        let mut props = self.props.clone();
        let state_base = props.len();
        for q in &self.states {
            props.push(atoms::state_atom(q));
        }
        let mut obs_base = vec![0usize; self.agents.len()];
        for (a, agent) in self.agents.iter().enumerate() {
            obs_base[a] = props.len();
            for c in 0..self.obs[a].classes().len() {
                props.push(atoms::obs_atom(agent, c));
            }
        }
        let mut labels = self.labels.clone();
        for (q, label) in labels.iter_mut().enumerate() {
            label.insert(state_base + q);
            for (base, part) in obs_base.iter().zip(&self.obs) {
                let c = part
                    .class_of(StateId(q))
                    .expect("partitions checked above");
                label.insert(base + c);
            }
        }
        let transitions: Vec<Vec<StateId>> = (0..self.states.len())
            .map(|q| self.derived_successors(StateId(q)))
            .collect();
        KripkeStructure::new(self.states.clone(), props, labels, transitions, self.init)
            .map_err(|e| GameOpError::InvalidGame(e.to_string()))
    }

    /// Splits every joint move into a round of single-agent moves, in the
    /// given agent order. Original states keep their labels and are owned by
    /// the first agent of the order; each intermediate state records the
    /// moves picked so far, carries the marker prop `mid`, and is owned by
    /// the agent due next. Intermediate states at the same depth form one
    /// observation class per agent, so uniformity is preserved.
    pub fn to_turn_based(&self, order: &[AgentId]) -> Result<Cgso, GameOpError> {
        self.require_total()?;
        self.require_valid_obs()?;
        let p = self.agents.len();
        let r = self.moves.len();
        {
            let mut seen = vec![false; p];
            for a in order {
                if a.0 >= p || seen[a.0] {
                    return Err(GameOpError::BadAgentOrder(format!(
                        "{:?}",
                        order.iter().map(|a| a.0).collect::<Vec<_>>()
                    )));
                }
                seen[a.0] = true;
            }
            if order.len() != p {
                return Err(GameOpError::BadAgentOrder(format!(
                    "{:?}",
                    order.iter().map(|a| a.0).collect::<Vec<_>>()
                )));
            }
        }

        // state list: originals first, then per original all proper move
        // prefixes grouped by depth, lexicographic within a depth
        let mut states = self.states.clone();
        let mut inter_index = Vec::new(); // (original, prefix) -> id, in push order
        for q in 0..self.states.len() {
            for depth in 1..p {
                let mut prefix = vec![0usize; depth];
                loop {
                    let name = {
                        let mut s = self.states[q].clone();
                        for m in &prefix {
                            s.push('+');
                            s.push_str(&self.moves[*m]);
                        }
                        s
                    };
                    states.push(name);
                    inter_index.push((q, prefix.clone()));
                    // odometer over the prefix
                    let mut i = depth;
                    loop {
                        if i == 0 {
                            break;
                        }
                        i -= 1;
                        prefix[i] += 1;
                        if prefix[i] < r {
                            break;
                        }
                        prefix[i] = 0;
                    }
                    if prefix.iter().all(|m| *m == 0) {
                        break;
                    }
                }
            }
        }
        let n_orig = self.states.len();
        let id_of = |q: usize, prefix: &[usize]| -> StateId {
            if prefix.is_empty() {
                return StateId(q);
            }
            // intermediates for original q start after those of originals 0..q
            let per_orig: usize = (1..p).map(|d| r.pow(d as u32)).sum();
            let mut off = q * per_orig;
            for d in 1..prefix.len() {
                off += r.pow(d as u32);
            }
            let mut idx = 0usize;
            for m in prefix {
                idx = idx * r + m;
            }
            StateId(n_orig + off + idx)
        };

        let mut props = self.props.clone();
        let mut labels: Vec<BTreeSet<usize>> = self.labels.clone();
        labels.resize(states.len(), BTreeSet::new());
        if states.len() > n_orig {
            let mid = match props.iter().position(|x| x == "mid") {
                Some(i) => i,
                None => {
                    props.push("mid".to_string());
                    props.len() - 1
                }
            };
            for l in labels.iter_mut().skip(n_orig) {
                l.insert(mid);
            }
        }

        let mut owner = vec![AgentId(0); states.len()];
        owner[..n_orig].fill(order[0]);
        for (i, (_, prefix)) in inter_index.iter().enumerate() {
            owner[n_orig + i] = order[prefix.len()];
        }

        // edg: successor depends only on the owner's move
        let n_mv = self.n_move_vectors();
        let mut edg = vec![vec![None; n_mv]; states.len()];
        let fill = |edg: &mut Vec<Vec<Option<StateId>>>, q: usize, own: AgentId, f: &dyn Fn(usize) -> StateId| {
            for (idx, slot) in edg[q].iter_mut().enumerate() {
                let mv = self.mv_from_index(idx);
                *slot = Some(f(mv[own.0].0));
            }
        };
        for q in 0..n_orig {
            if p == 1 {
                let game = &self;
                fill(&mut edg, q, order[0], &|m| {
                    game.successor_by_index(StateId(q), m).expect("total")
                });
            } else {
                fill(&mut edg, q, order[0], &|m| id_of(q, &[m]));
            }
        }
        for (i, (q, prefix)) in inter_index.iter().enumerate() {
            let depth = prefix.len();
            let sid = n_orig + i;
            if depth < p - 1 {
                fill(&mut edg, sid, order[depth], &|m| {
                    let mut ext = prefix.clone();
                    ext.push(m);
                    id_of(*q, &ext)
                });
            } else {
                let game = &self;
                fill(&mut edg, sid, order[depth], &|m| {
                    let mut mv = vec![MoveId(0); p];
                    for (j, chosen) in prefix.iter().enumerate() {
                        mv[order[j].0] = MoveId(*chosen);
                    }
                    mv[order[depth].0] = MoveId(m);
                    game.successor(StateId(*q), &mv).expect("total")
                });
            }
        }

        // observation: original classes survive; one class per depth
        let mut obs = Vec::with_capacity(p);
        for a in 0..p {
            let mut classes = self.obs[a].classes().to_vec();
            for depth in 1..p {
                let mut c = Vec::new();
                for (i, (_, prefix)) in inter_index.iter().enumerate() {
                    if prefix.len() == depth {
                        c.push(StateId(n_orig + i));
                    }
                }
                classes.push(c);
            }
            let mut part = ObservationPartition::new(classes);
            part.canonicalize();
            obs.push(part);
        }

        Ok(Cgso {
            states,
            props,
            labels,
            agents: self.agents.clone(),
            moves: self.moves.clone(),
            edg,
            obs,
            owner: Some(owner),
            init: self.init,
        })
    }

    /// True when two finite paths are indistinguishable to `agent`: same
    /// length and classwise-equal under its observation partition. Both
    /// sequences must be genuine paths of the derived transition relation.
    pub fn path_equivalent(
        &self,
        agent: AgentId,
        a: &[StateId],
        b: &[StateId],
    ) -> Result<bool, GameOpError> {
        if agent.0 >= self.agents.len() {
            return Err(GameOpError::UnknownAgent(format!("#{}", agent.0)));
        }
        self.require_valid_obs()?;
        for (tag, path) in [("first", a), ("second", b)] {
            if path.is_empty() {
                return Err(GameOpError::InvalidPath(format!("{tag} path is empty")));
            }
            for w in path.windows(2) {
                if !self.has_transition(w[0], w[1]) {
                    return Err(GameOpError::InvalidPath(format!(
                        "{tag} path takes a step {} -> {} that no move vector produces",
                        self.state_name(w[0]),
                        self.state_name(w[1])
                    )));
                }
            }
        }
        if a.len() != b.len() {
            return Ok(false);
        }
        let part = &self.obs[agent.0];
        Ok(a.iter()
            .zip(b)
            .all(|(x, y)| part.class_of(*x) == part.class_of(*y)))
    }
}

/// Incremental construction of a [`Cgso`], with first-match-wins edge rules.
pub struct GameBuilder {
    game: Cgso,
}

impl GameBuilder {
    pub fn new(
        agents: Vec<String>,
        moves: Vec<String>,
        props: Vec<String>,
        states: Vec<String>,
    ) -> Result<Self, String> {
        for (kind, names) in [
            ("agent", &agents),
            ("move", &moves),
            ("prop", &props),
            ("state", &states),
        ] {
            let mut seen = BTreeSet::new();
            for n in names {
                if !is_identifier(n) {
                    return Err(format!("invalid {kind} name `{n}`"));
                }
                if !seen.insert(n.clone()) {
                    return Err(format!("duplicate {kind} name `{n}`"));
                }
            }
        }
        if agents.is_empty() {
            return Err("a game needs at least one agent".into());
        }
        if moves.is_empty() {
            return Err("a game needs at least one move".into());
        }
        if states.is_empty() {
            return Err("a game needs at least one state".into());
        }
        let n_mv = moves.len().pow(agents.len() as u32);
        let n = states.len();
        let obs = vec![ObservationPartition::identity(n); agents.len()];
        Ok(GameBuilder {
            game: Cgso {
                labels: vec![BTreeSet::new(); n],
                edg: vec![vec![None; n_mv]; n],
                states,
                props,
                agents,
                moves,
                obs,
                owner: None,
                init: None,
            },
        })
    }

    pub fn label(&mut self, q: StateId, prop: usize) {
        self.game.labels[q.0].insert(prop);
    }

    /// Adds an edge rule: `pattern` gives one move per agent, `None` being a
    /// wildcard. Entries already covered by an earlier rule are kept.
    pub fn edge(&mut self, q: StateId, pattern: &[Option<MoveId>], target: StateId) {
        debug_assert_eq!(pattern.len(), self.game.agents.len());
        for idx in 0..self.game.n_move_vectors() {
            let mv = self.game.mv_from_index(idx);
            let matches = mv
                .iter()
                .zip(pattern)
                .all(|(m, p)| p.map(|pm| pm == *m).unwrap_or(true));
            if matches && self.game.edg[q.0][idx].is_none() {
                self.game.edg[q.0][idx] = Some(target);
            }
        }
    }

    pub fn obs_uniform(&mut self, classes: Vec<Vec<StateId>>) {
        let part = ObservationPartition::new(classes);
        for o in self.game.obs.iter_mut() {
            *o = part.clone();
        }
    }

    pub fn obs_agent(&mut self, a: AgentId, classes: Vec<Vec<StateId>>) {
        self.game.obs[a.0] = ObservationPartition::new(classes);
    }

    pub fn owner(&mut self, q: StateId, a: AgentId) {
        let owner = self
            .game
            .owner
            .get_or_insert_with(|| vec![AgentId(0); self.game.states.len()]);
        owner[q.0] = a;
    }

    pub fn init(&mut self, q: StateId) {
        self.game.init = Some(q);
    }

    /// Finishes the build. Partitions that cover the states exactly once are
    /// put into canonical order; anything else is left as given so that
    /// [`Cgso::validate`] can point at the original blocks.
    pub fn finish(mut self) -> Cgso {
        let n = self.game.states.len();
        for o in self.game.obs.iter_mut() {
            if o.covers_exactly(n) {
                o.canonicalize();
            }
        }
        self.game
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '+' || c == '#' || c == '@')
}

pub use text::ParseError;
pub(crate) use text::strip_comment;

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Cgso {
        // two agents, two moves, three states; edg(q, (x, y)) = by table
        let mut b = Cgso::builder(
            vec!["a1".into(), "a2".into()],
            vec!["m1".into(), "m2".into()],
            vec!["p".into()],
            vec!["q0".into(), "q1".into(), "q2".into()],
        )
        .unwrap();
        b.label(StateId(2), 0);
        b.edge(StateId(0), &[Some(MoveId(0)), None], StateId(1));
        b.edge(StateId(0), &[None, None], StateId(2));
        b.edge(StateId(1), &[None, Some(MoveId(0))], StateId(1));
        b.edge(StateId(1), &[None, None], StateId(2));
        b.edge(StateId(2), &[None, None], StateId(2));
        b.obs_uniform(vec![vec![StateId(0)], vec![StateId(1), StateId(2)]]);
        b.init(StateId(0));
        b.finish()
    }

    #[test]
    fn first_match_wins_on_edges() {
        let g = tiny();
        assert_eq!(
            g.successor(StateId(0), &[MoveId(0), MoveId(1)]),
            Some(StateId(1))
        );
        assert_eq!(
            g.successor(StateId(0), &[MoveId(1), MoveId(0)]),
            Some(StateId(2))
        );
        assert!(g.validate().is_empty());
    }

    #[test]
    fn incomplete_edg_is_reported_per_entry() {
        let mut b = Cgso::builder(
            vec!["a1".into()],
            vec!["m1".into(), "m2".into()],
            vec![],
            vec!["q0".into()],
        )
        .unwrap();
        b.edge(StateId(0), &[Some(MoveId(0))], StateId(0));
        let g = b.finish();
        let d = g.validate();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, DiagnosticKind::IncompleteEdg);
        assert!(d[0].message.contains("q0"));
        assert!(d[0].message.contains("m2"));
    }

    #[test]
    fn reserved_prop_names_flagged() {
        let b = Cgso::builder(
            vec!["a1".into()],
            vec!["m1".into()],
            vec!["q#0@1".into()],
            vec!["q0".into()],
        )
        .unwrap();
        let mut g = b.finish();
        g.edg[0][0] = Some(StateId(0));
        let d = g.validate();
        assert!(d.iter().any(|d| d.kind == DiagnosticKind::ReservedProp));
    }

    #[test]
    fn derived_successors_deduplicate() {
        let g = tiny();
        assert_eq!(
            g.derived_successors(StateId(0)),
            vec![StateId(1), StateId(2)]
        );
        assert_eq!(g.derived_successors(StateId(2)), vec![StateId(2)]);
    }

    #[test]
    fn path_equivalence_checks_paths_first() {
        let g = tiny();
        let err = g
            .path_equivalent(AgentId(0), &[StateId(2), StateId(0)], &[StateId(2)])
            .unwrap_err();
        assert!(matches!(err, GameOpError::InvalidPath(_)));
        // q0 q1 vs q0 q2: q1 and q2 share a class
        let eq = g
            .path_equivalent(
                AgentId(0),
                &[StateId(0), StateId(1)],
                &[StateId(0), StateId(2)],
            )
            .unwrap();
        assert!(eq);
        let diff = g
            .path_equivalent(AgentId(0), &[StateId(0)], &[StateId(0), StateId(2)])
            .unwrap();
        assert!(!diff);
    }

    #[test]
    fn quotient_of_uniform_game_is_complete_graph() {
        let g = tiny();
        let k = g.quotient().unwrap();
        assert_eq!(k.n_states(), 2);
        assert_eq!(k.states(), &["C0".to_string(), "C1".to_string()]);
        // every node sees every node
        for q in 0..2 {
            assert_eq!(k.successors(StateId(q)).len(), 2);
        }
        // C0 = {q0} labeled s#0, C1 = {q1,q2} labeled s#1 s#2
        assert!(k.state_has_prop(StateId(0), "s#0"));
        assert!(k.state_has_prop(StateId(1), "s#1"));
        assert!(k.state_has_prop(StateId(1), "s#2"));
        assert!(!k.state_has_prop(StateId(0), "s#2"));
    }

    #[test]
    fn underlying_kripke_carries_state_and_class_atoms() {
        let g = tiny();
        let k = g.underlying_kripke().unwrap();
        assert_eq!(k.n_states(), 3);
        assert!(k.state_has_prop(StateId(2), "p"));
        assert!(k.state_has_prop(StateId(1), "p#q1"));
        assert!(!k.state_has_prop(StateId(1), "p#q2"));
        // q1 and q2 share the class with index 1 for both agents
        assert!(k.state_has_prop(StateId(1), "o#a1@1"));
        assert!(k.state_has_prop(StateId(2), "o#a2@1"));
        assert!(k.state_has_prop(StateId(0), "o#a1@0"));
        assert_eq!(k.successors(StateId(0)), &[StateId(1), StateId(2)]);
    }

    #[test]
    fn turn_based_expansion_counts_and_owners() {
        let g = tiny();
        let tb = g
            .to_turn_based(&[AgentId(0), AgentId(1)])
            .expect("transformable");
        // 3 originals + 3 * 2 intermediates
        assert_eq!(tb.n_states(), 9);
        assert!(tb.validate().is_empty());
        assert!(tb.is_uniform());
        assert_eq!(tb.owner(StateId(0)), Some(AgentId(0)));
        let mid_id = tb.prop_id("mid").unwrap();
        let inter = tb.state_id("q0+m1").unwrap();
        assert!(tb.has_prop(inter, mid_id));
        assert_eq!(tb.owner(inter), Some(AgentId(1)));
        // q0 under a1's m1 goes to the recorder state, then a2 decides;
        // at q0 only a1's move matters, so both a2 replies land on q1
        assert_eq!(tb.successor(StateId(0), &[MoveId(0), MoveId(1)]), Some(inter));
        assert_eq!(tb.successor(inter, &[MoveId(0), MoveId(0)]), Some(StateId(1)));
        assert_eq!(tb.successor(inter, &[MoveId(1), MoveId(1)]), Some(StateId(1)));
        // at q1 the second component decides: (m2, m1) -> q1, (m2, m2) -> q2
        let inter = tb.state_id("q1+m2").unwrap();
        assert_eq!(tb.successor(StateId(1), &[MoveId(1), MoveId(0)]), Some(inter));
        assert_eq!(tb.successor(inter, &[MoveId(0), MoveId(0)]), Some(StateId(1)));
        assert_eq!(tb.successor(inter, &[MoveId(0), MoveId(1)]), Some(StateId(2)));
    }

    #[test]
    fn turn_based_single_agent_adds_no_states() {
        let mut b = Cgso::builder(
            vec!["a1".into()],
            vec!["m1".into(), "m2".into()],
            vec![],
            vec!["q0".into(), "q1".into()],
        )
        .unwrap();
        b.edge(StateId(0), &[Some(MoveId(0))], StateId(0));
        b.edge(StateId(0), &[Some(MoveId(1))], StateId(1));
        b.edge(StateId(1), &[None], StateId(1));
        let g = b.finish();
        let tb = g.to_turn_based(&[AgentId(0)]).unwrap();
        assert_eq!(tb.n_states(), 2);
        assert_eq!(tb.owner(StateId(1)), Some(AgentId(0)));
        assert_eq!(tb.successor(StateId(0), &[MoveId(1)]), Some(StateId(1)));
    }
}
