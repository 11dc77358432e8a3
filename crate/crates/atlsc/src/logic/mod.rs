//! ATL with strategy contexts, plus the propositional quantification that the
//! reductions target.
//!
//! State and path formulas are separate types. `F`, `G`, `[[..]]`, `E` and
//! `A` are surface sugar: the parser expands them and the printer folds them
//! back, so `parse` and `to_string` are mutually inverse on the core types.
//! Boolean combinations of state formulas appearing in path position are
//! collapsed into a single embedded state formula (the maximal state
//! reading), which keeps the translations small.

use std::collections::BTreeSet;

use crate::atoms;

mod parse;
mod print;

pub use parse::LogicError;

pub type Coalition = BTreeSet<String>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateFormula {
    True,
    False,
    Prop(String),
    Not(Box<StateFormula>),
    And(Box<StateFormula>, Box<StateFormula>),
    Or(Box<StateFormula>, Box<StateFormula>),
    Implies(Box<StateFormula>, Box<StateFormula>),
    /// `<<A>>` / `<<A>>_0` / `<<co A>>`: the named coalition (or its
    /// complement) gets fresh strategies, memoryful or memoryless, and the
    /// body is evaluated on the outcomes of the updated context.
    StratQ {
        coalition: Coalition,
        complement: bool,
        memoryless: bool,
        body: Box<PathFormula>,
    },
    /// `relax(A)` / `keep(A)`: drops the strategies of `A` (or of everyone
    /// but `A`) from the context.
    Relax {
        coalition: Coalition,
        complement: bool,
        body: Box<StateFormula>,
    },
    Exists {
        prop: String,
        body: Box<StateFormula>,
    },
    Forall {
        prop: String,
        body: Box<StateFormula>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathFormula {
    State(Box<StateFormula>),
    Not(Box<PathFormula>),
    And(Box<PathFormula>, Box<PathFormula>),
    Or(Box<PathFormula>, Box<PathFormula>),
    Implies(Box<PathFormula>, Box<PathFormula>),
    Next(Box<PathFormula>),
    Until(Box<PathFormula>, Box<PathFormula>),
}

impl StateFormula {
    pub fn parse(input: &str) -> Result<StateFormula, LogicError> {
        parse::state_formula(input)
    }

    pub fn prop(name: impl Into<String>) -> StateFormula {
        StateFormula::Prop(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> StateFormula {
        StateFormula::Not(Box::new(self))
    }

    pub fn and(self, other: StateFormula) -> StateFormula {
        StateFormula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: StateFormula) -> StateFormula {
        StateFormula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: StateFormula) -> StateFormula {
        StateFormula::Implies(Box::new(self), Box::new(other))
    }

    pub fn stratq<I, S>(coalition: I, memoryless: bool, body: PathFormula) -> StateFormula
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        StateFormula::StratQ {
            coalition: coalition.into_iter().map(Into::into).collect(),
            complement: false,
            memoryless,
            body: Box::new(body),
        }
    }

    /// `A body`: clear the context, then quantify over all outcomes of the
    /// empty context, i.e. over every path.
    pub fn all_paths(body: PathFormula) -> StateFormula {
        StateFormula::Relax {
            coalition: Coalition::new(),
            complement: true,
            body: Box::new(StateFormula::StratQ {
                coalition: Coalition::new(),
                complement: false,
                memoryless: false,
                body: Box::new(body),
            }),
        }
    }

    /// `E body`, as the dual of [`StateFormula::all_paths`].
    pub fn exists_path(body: PathFormula) -> StateFormula {
        StateFormula::all_paths(body.not()).not()
    }

    pub fn exists(prop: impl Into<String>, body: StateFormula) -> StateFormula {
        StateFormula::Exists {
            prop: prop.into(),
            body: Box::new(body),
        }
    }

    pub fn forall(prop: impl Into<String>, body: StateFormula) -> StateFormula {
        StateFormula::Forall {
            prop: prop.into(),
            body: Box::new(body),
        }
    }

    /// Maximum nesting of strategy quantifiers.
    pub fn strat_depth(&self) -> usize {
        match self {
            StateFormula::True | StateFormula::False | StateFormula::Prop(_) => 0,
            StateFormula::Not(a) => a.strat_depth(),
            StateFormula::And(a, b)
            | StateFormula::Or(a, b)
            | StateFormula::Implies(a, b) => a.strat_depth().max(b.strat_depth()),
            StateFormula::StratQ { body, .. } => 1 + body.strat_depth(),
            StateFormula::Relax { body, .. }
            | StateFormula::Exists { body, .. }
            | StateFormula::Forall { body, .. } => body.strat_depth(),
        }
    }

    /// True when every strategy quantifier in the formula is memoryless,
    /// apart from the trivial `<<>>` that merely quantifies over outcomes.
    pub fn memoryless_shaped(&self) -> bool {
        match self {
            StateFormula::True | StateFormula::False | StateFormula::Prop(_) => true,
            StateFormula::Not(a) => a.memoryless_shaped(),
            StateFormula::And(a, b)
            | StateFormula::Or(a, b)
            | StateFormula::Implies(a, b) => a.memoryless_shaped() && b.memoryless_shaped(),
            StateFormula::StratQ {
                coalition,
                complement,
                memoryless,
                body,
            } => {
                (*memoryless || (coalition.is_empty() && !complement))
                    && body.memoryless_shaped()
            }
            StateFormula::Relax { body, .. }
            | StateFormula::Exists { body, .. }
            | StateFormula::Forall { body, .. } => body.memoryless_shaped(),
        }
    }

    /// True when the formula binds a proposition with `exists` or `forall`.
    pub fn has_prop_quantifiers(&self) -> bool {
        match self {
            StateFormula::True | StateFormula::False | StateFormula::Prop(_) => false,
            StateFormula::Not(a) => a.has_prop_quantifiers(),
            StateFormula::And(a, b)
            | StateFormula::Or(a, b)
            | StateFormula::Implies(a, b) => {
                a.has_prop_quantifiers() || b.has_prop_quantifiers()
            }
            StateFormula::StratQ { body, .. } => body.has_prop_quantifiers(),
            StateFormula::Relax { body, .. } => body.has_prop_quantifiers(),
            StateFormula::Exists { .. } | StateFormula::Forall { .. } => true,
        }
    }

    /// Every proposition name occurring in the formula, bound or free.
    pub fn props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out
    }

    pub(crate) fn collect_props(&self, out: &mut BTreeSet<String>) {
        match self {
            StateFormula::True | StateFormula::False => {}
            StateFormula::Prop(p) => {
                out.insert(p.clone());
            }
            StateFormula::Not(a) => a.collect_props(out),
            StateFormula::And(a, b)
            | StateFormula::Or(a, b)
            | StateFormula::Implies(a, b) => {
                a.collect_props(out);
                b.collect_props(out);
            }
            StateFormula::StratQ { body, .. } => body.collect_props(out),
            StateFormula::Relax { body, .. } => body.collect_props(out),
            StateFormula::Exists { prop, body } | StateFormula::Forall { prop, body } => {
                out.insert(prop.clone());
                body.collect_props(out);
            }
        }
    }

    /// Number of syntax-tree nodes, used to measure translation output.
    pub fn count_nodes(&self) -> usize {
        match self {
            StateFormula::True | StateFormula::False | StateFormula::Prop(_) => 1,
            StateFormula::Not(a) => 1 + a.count_nodes(),
            StateFormula::And(a, b)
            | StateFormula::Or(a, b)
            | StateFormula::Implies(a, b) => 1 + a.count_nodes() + b.count_nodes(),
            StateFormula::StratQ { body, .. } => 1 + body.count_nodes(),
            StateFormula::Relax { body, .. } => 1 + body.count_nodes(),
            StateFormula::Exists { body, .. } | StateFormula::Forall { body, .. } => {
                1 + body.count_nodes()
            }
        }
    }

    /// Resolves `<<co A>>` and `keep(A)` against a concrete agent set.
    pub fn eliminate_complements(&self, agents: &BTreeSet<String>) -> StateFormula {
        let co = |coalition: &Coalition, complement: bool| -> Coalition {
            if complement {
                agents.difference(coalition).cloned().collect()
            } else {
                coalition.clone()
            }
        };
        match self {
            StateFormula::True | StateFormula::False | StateFormula::Prop(_) => self.clone(),
            StateFormula::Not(a) => a.eliminate_complements(agents).not(),
            StateFormula::And(a, b) => a
                .eliminate_complements(agents)
                .and(b.eliminate_complements(agents)),
            StateFormula::Or(a, b) => a
                .eliminate_complements(agents)
                .or(b.eliminate_complements(agents)),
            StateFormula::Implies(a, b) => a
                .eliminate_complements(agents)
                .implies(b.eliminate_complements(agents)),
            StateFormula::StratQ {
                coalition,
                complement,
                memoryless,
                body,
            } => StateFormula::StratQ {
                coalition: co(coalition, *complement),
                complement: false,
                memoryless: *memoryless,
                body: Box::new(body.eliminate_complements(agents)),
            },
            StateFormula::Relax {
                coalition,
                complement,
                body,
            } => StateFormula::Relax {
                coalition: co(coalition, *complement),
                complement: false,
                body: Box::new(body.eliminate_complements(agents)),
            },
            StateFormula::Exists { prop, body } => StateFormula::Exists {
                prop: prop.clone(),
                body: Box::new(body.eliminate_complements(agents)),
            },
            StateFormula::Forall { prop, body } => StateFormula::Forall {
                prop: prop.clone(),
                body: Box::new(body.eliminate_complements(agents)),
            },
        }
    }
}

impl PathFormula {
    pub fn state(s: StateFormula) -> PathFormula {
        PathFormula::State(Box::new(s))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> PathFormula {
        match self {
            PathFormula::State(s) => PathFormula::State(Box::new(s.not())),
            other => PathFormula::Not(Box::new(other)),
        }
    }

    pub fn and(self, other: PathFormula) -> PathFormula {
        match (self, other) {
            (PathFormula::State(a), PathFormula::State(b)) => {
                PathFormula::State(Box::new(a.and(*b)))
            }
            (a, b) => PathFormula::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn or(self, other: PathFormula) -> PathFormula {
        match (self, other) {
            (PathFormula::State(a), PathFormula::State(b)) => {
                PathFormula::State(Box::new(a.or(*b)))
            }
            (a, b) => PathFormula::Or(Box::new(a), Box::new(b)),
        }
    }

    pub fn implies(self, other: PathFormula) -> PathFormula {
        match (self, other) {
            (PathFormula::State(a), PathFormula::State(b)) => {
                PathFormula::State(Box::new(a.implies(*b)))
            }
            (a, b) => PathFormula::Implies(Box::new(a), Box::new(b)),
        }
    }

    pub fn next(self) -> PathFormula {
        PathFormula::Next(Box::new(self))
    }

    pub fn until(self, other: PathFormula) -> PathFormula {
        PathFormula::Until(Box::new(self), Box::new(other))
    }

    /// `F self`
    pub fn eventually(self) -> PathFormula {
        PathFormula::state(StateFormula::True).until(self)
    }

    /// `G self`
    pub fn always(self) -> PathFormula {
        self.not().eventually().not()
    }

    pub fn strat_depth(&self) -> usize {
        match self {
            PathFormula::State(s) => s.strat_depth(),
            PathFormula::Not(a) | PathFormula::Next(a) => a.strat_depth(),
            PathFormula::And(a, b)
            | PathFormula::Or(a, b)
            | PathFormula::Implies(a, b)
            | PathFormula::Until(a, b) => a.strat_depth().max(b.strat_depth()),
        }
    }

    pub fn memoryless_shaped(&self) -> bool {
        match self {
            PathFormula::State(s) => s.memoryless_shaped(),
            PathFormula::Not(a) | PathFormula::Next(a) => a.memoryless_shaped(),
            PathFormula::And(a, b)
            | PathFormula::Or(a, b)
            | PathFormula::Implies(a, b)
            | PathFormula::Until(a, b) => a.memoryless_shaped() && b.memoryless_shaped(),
        }
    }

    pub fn has_prop_quantifiers(&self) -> bool {
        match self {
            PathFormula::State(s) => s.has_prop_quantifiers(),
            PathFormula::Not(a) | PathFormula::Next(a) => a.has_prop_quantifiers(),
            PathFormula::And(a, b)
            | PathFormula::Or(a, b)
            | PathFormula::Implies(a, b)
            | PathFormula::Until(a, b) => {
                a.has_prop_quantifiers() || b.has_prop_quantifiers()
            }
        }
    }

    pub(crate) fn collect_props(&self, out: &mut BTreeSet<String>) {
        match self {
            PathFormula::State(s) => s.collect_props(out),
            PathFormula::Not(a) | PathFormula::Next(a) => a.collect_props(out),
            PathFormula::And(a, b)
            | PathFormula::Or(a, b)
            | PathFormula::Implies(a, b)
            | PathFormula::Until(a, b) => {
                a.collect_props(out);
                b.collect_props(out);
            }
        }
    }

    /// Number of syntax-tree nodes, used to measure translation output.
    pub fn count_nodes(&self) -> usize {
        match self {
            PathFormula::State(s) => 1 + s.count_nodes(),
            PathFormula::Not(a) | PathFormula::Next(a) => 1 + a.count_nodes(),
            PathFormula::And(a, b)
            | PathFormula::Or(a, b)
            | PathFormula::Implies(a, b)
            | PathFormula::Until(a, b) => 1 + a.count_nodes() + b.count_nodes(),
        }
    }

    pub fn eliminate_complements(&self, agents: &BTreeSet<String>) -> PathFormula {
        match self {
            PathFormula::State(s) => {
                PathFormula::State(Box::new(s.eliminate_complements(agents)))
            }
            PathFormula::Not(a) => {
                PathFormula::Not(Box::new(a.eliminate_complements(agents)))
            }
            PathFormula::Next(a) => a.eliminate_complements(agents).next(),
            PathFormula::And(a, b) => PathFormula::And(
                Box::new(a.eliminate_complements(agents)),
                Box::new(b.eliminate_complements(agents)),
            ),
            PathFormula::Or(a, b) => PathFormula::Or(
                Box::new(a.eliminate_complements(agents)),
                Box::new(b.eliminate_complements(agents)),
            ),
            PathFormula::Implies(a, b) => PathFormula::Implies(
                Box::new(a.eliminate_complements(agents)),
                Box::new(b.eliminate_complements(agents)),
            ),
            PathFormula::Until(a, b) => a
                .eliminate_complements(agents)
                .until(b.eliminate_complements(agents)),
        }
    }
}

/// `EX phi` restricted to exactly one successor: some successor satisfies
/// `phi`, and any proposition that can mark a `phi`-successor must mark all
/// of them. With zero or two or more `phi`-successors this is false, which
/// is what makes it usable for carving single branches out of a structure.
///
/// The bound proposition is drawn from `used` and recorded there.
pub fn ex1(phi: StateFormula, used: &mut BTreeSet<String>) -> StateFormula {
    let p = atoms::fresh_bound_prop(used);
    used.insert(p.clone());
    let some = StateFormula::exists_path(PathFormula::state(phi.clone()).next());
    let can_mark =
        StateFormula::exists_path(PathFormula::state(phi.clone().and(StateFormula::prop(&p))).next());
    let marks_all = StateFormula::all_paths(
        PathFormula::state(phi.implies(StateFormula::prop(&p))).next(),
    );
    some.and(StateFormula::forall(p, can_mark.implies(marks_all)))
}

/// Rewrites a formula for the turn-based expansion of a game: one step of
/// the original machine is `steps` consecutive steps there, and `mid` holds
/// exactly on the inserted intermediate states. With a single agent the
/// expansion inserts no states and the formula passes through unchanged.
pub fn translate_turn_based(phi: &StateFormula, steps: usize, mid: &str) -> StateFormula {
    if steps <= 1 {
        return phi.clone();
    }
    tb_state(phi, steps, mid)
}

fn tb_state(phi: &StateFormula, steps: usize, mid: &str) -> StateFormula {
    match phi {
        StateFormula::True | StateFormula::False | StateFormula::Prop(_) => phi.clone(),
        StateFormula::Not(a) => tb_state(a, steps, mid).not(),
        StateFormula::And(a, b) => tb_state(a, steps, mid).and(tb_state(b, steps, mid)),
        StateFormula::Or(a, b) => tb_state(a, steps, mid).or(tb_state(b, steps, mid)),
        StateFormula::Implies(a, b) => tb_state(a, steps, mid).implies(tb_state(b, steps, mid)),
        StateFormula::StratQ {
            coalition,
            complement,
            memoryless,
            body,
        } => StateFormula::StratQ {
            coalition: coalition.clone(),
            complement: *complement,
            memoryless: *memoryless,
            body: Box::new(tb_path(body, steps, mid)),
        },
        StateFormula::Relax {
            coalition,
            complement,
            body,
        } => StateFormula::Relax {
            coalition: coalition.clone(),
            complement: *complement,
            body: Box::new(tb_state(body, steps, mid)),
        },
        StateFormula::Exists { prop, body } => StateFormula::Exists {
            prop: prop.clone(),
            body: Box::new(tb_state(body, steps, mid)),
        },
        StateFormula::Forall { prop, body } => StateFormula::Forall {
            prop: prop.clone(),
            body: Box::new(tb_state(body, steps, mid)),
        },
    }
}

fn tb_path(phi: &PathFormula, steps: usize, mid: &str) -> PathFormula {
    match phi {
        PathFormula::State(s) => PathFormula::state(tb_state(s, steps, mid)),
        PathFormula::Not(a) => tb_path(a, steps, mid).not(),
        PathFormula::And(a, b) => tb_path(a, steps, mid).and(tb_path(b, steps, mid)),
        PathFormula::Or(a, b) => tb_path(a, steps, mid).or(tb_path(b, steps, mid)),
        PathFormula::Implies(a, b) => tb_path(a, steps, mid).implies(tb_path(b, steps, mid)),
        PathFormula::Next(a) => {
            let mut out = tb_path(a, steps, mid);
            for _ in 0..steps {
                out = out.next();
            }
            out
        }
        PathFormula::Until(a, b) => {
            let hold = or_lax(
                PathFormula::state(StateFormula::prop(mid)),
                tb_path(a, steps, mid),
            );
            let settle = and_lax(
                PathFormula::state(StateFormula::prop(mid).not()),
                tb_path(b, steps, mid),
            );
            hold.until(settle)
        }
    }
}

fn or_lax(a: PathFormula, b: PathFormula) -> PathFormula {
    match (&a, &b) {
        (PathFormula::State(s), _) if **s == StateFormula::True => a,
        (_, PathFormula::State(s)) if **s == StateFormula::True => b,
        (PathFormula::State(s), _) if **s == StateFormula::False => b,
        (_, PathFormula::State(s)) if **s == StateFormula::False => a,
        _ => a.or(b),
    }
}

fn and_lax(a: PathFormula, b: PathFormula) -> PathFormula {
    match (&a, &b) {
        (PathFormula::State(s), _) if **s == StateFormula::True => b,
        (_, PathFormula::State(s)) if **s == StateFormula::True => a,
        (PathFormula::State(s), _) if **s == StateFormula::False => a,
        (_, PathFormula::State(s)) if **s == StateFormula::False => b,
        _ => a.and(b),
    }
}
