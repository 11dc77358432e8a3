//! QCTL* over finite structures.
//!
//! Propositional quantifiers range over arbitrary labelings of the given
//! structure (the structure semantics): `exists P. phi` enumerates all
//! 2^|Q| extensions of `P`. Path quantification reduces to a product
//! construction against the path formula, with a direct fixpoint shortcut for
//! the `EX` / `EU` / `ER` shapes that dominate generated formulas. Results
//! of quantifier and path nodes are memoized against the extensions of the
//! quantified propositions they can actually see, so re-evaluating a block
//! under a fresh outer valuation costs nothing when the block does not
//! mention the changed propositions.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap};
use std::hash::{Hash, Hasher};
use std::rc::Rc;

use thiserror::Error;

use crate::automata::{self, Arena};
use crate::bitset::BitSet;
use crate::game::StateId;
use crate::kripke::KripkeStructure;
use crate::logic::{PathFormula, StateFormula};

#[derive(Debug, Clone, Copy)]
pub struct QctlOptions {
    /// Maximum nesting of `exists`/`forall` during evaluation.
    pub max_quantifier_depth: usize,
}

impl Default for QctlOptions {
    fn default() -> Self {
        QctlOptions {
            max_quantifier_depth: 8,
        }
    }
}

#[derive(Debug, Error)]
pub enum QctlError {
    #[error("proposition `{0}` is neither declared by the structure nor bound by a quantifier")]
    UnknownProp(String),
    #[error("quantifier nesting exceeds the limit of {0}")]
    QuantifierDepth(usize),
    #[error("a strategy quantifier over agents has no meaning on a plain structure")]
    CoalitionOnStructure,
    #[error("propositional quantification is limited to 64 states, the structure has {0}")]
    TooManyStates(usize),
}

/// Verdict of [`check_structure`], with the extensions the outermost
/// existential chain was satisfied by.
#[derive(Debug, Clone)]
pub struct QctlOutcome {
    pub holds: bool,
    pub witness: Vec<(String, Vec<String>)>,
}

/// States satisfying `phi`.
pub fn sat_states(
    k: &KripkeStructure,
    phi: &StateFormula,
    opts: QctlOptions,
) -> Result<BitSet, QctlError> {
    walk_state(k, phi, &mut Vec::new())?;
    let mut ev = Eval::new(k, opts);
    ev.sat(phi)
}

/// Decides `phi` at one state and reports the valuations chosen for the
/// outermost existential quantifiers on the successful branch.
pub fn check_structure(
    k: &KripkeStructure,
    phi: &StateFormula,
    at: StateId,
    opts: QctlOptions,
) -> Result<QctlOutcome, QctlError> {
    walk_state(k, phi, &mut Vec::new())?;
    let mut ev = Eval::new(k, opts);
    let mut wit: Vec<(String, BitSet)> = Vec::new();
    let holds = ev.holds_at(phi, at, &mut wit)?;
    let witness = wit
        .into_iter()
        .map(|(p, ext)| {
            let names = ext
                .iter()
                .map(|q| k.states()[q].clone())
                .collect::<Vec<_>>();
            (p, names)
        })
        .collect();
    Ok(QctlOutcome { holds, witness })
}

/// `(stem, cycle)` state sequences naming an ultimately periodic path: the
/// stem followed by the cycle repeated forever.
pub type Lasso = (Vec<StateId>, Vec<StateId>);

/// A lasso from `at` satisfying the path formula, if any. Exposed so the
/// engine's own evidence can be validated by an independent evaluator.
pub fn exists_path_witness(
    k: &KripkeStructure,
    body: &PathFormula,
    at: StateId,
    opts: QctlOptions,
) -> Result<Option<Lasso>, QctlError> {
    walk_path(k, body, &mut Vec::new())?;
    let mut ev = Eval::new(k, opts);
    let ep = ev.product(body, true)?;
    Ok(ep.witness(at))
}

fn walk_state(
    k: &KripkeStructure,
    phi: &StateFormula,
    bound: &mut Vec<String>,
) -> Result<(), QctlError> {
    match phi {
        StateFormula::True | StateFormula::False => Ok(()),
        StateFormula::Prop(p) => {
            if bound.iter().any(|b| b == p) || k.prop_id(p).is_some() {
                Ok(())
            } else {
                Err(QctlError::UnknownProp(p.clone()))
            }
        }
        StateFormula::Not(a) => walk_state(k, a, bound),
        StateFormula::And(a, b) | StateFormula::Or(a, b) | StateFormula::Implies(a, b) => {
            walk_state(k, a, bound)?;
            walk_state(k, b, bound)
        }
        StateFormula::StratQ { body, .. } => walk_path(k, body, bound),
        StateFormula::Relax { body, .. } => walk_state(k, body, bound),
        StateFormula::Exists { prop, body } | StateFormula::Forall { prop, body } => {
            bound.push(prop.clone());
            let r = walk_state(k, body, bound);
            bound.pop();
            r
        }
    }
}

fn walk_path(
    k: &KripkeStructure,
    phi: &PathFormula,
    bound: &mut Vec<String>,
) -> Result<(), QctlError> {
    match phi {
        PathFormula::State(s) => walk_state(k, s, bound),
        PathFormula::Not(a) | PathFormula::Next(a) => walk_path(k, a, bound),
        PathFormula::And(a, b)
        | PathFormula::Or(a, b)
        | PathFormula::Implies(a, b)
        | PathFormula::Until(a, b) => {
            walk_path(k, a, bound)?;
            walk_path(k, b, bound)
        }
    }
}

struct Eval<'a> {
    k: &'a KripkeStructure,
    opts: QctlOptions,
    base: HashMap<String, BitSet>,
    succ: Vec<Vec<StateId>>,
    env: HashMap<String, BitSet>,
    depth: usize,
    memo: HashMap<(usize, u64), BitSet>,
    props_of: HashMap<usize, Rc<Vec<String>>>,
}

impl<'a> Eval<'a> {
    fn new(k: &'a KripkeStructure, opts: QctlOptions) -> Eval<'a> {
        let n = k.n_states();
        let mut base = HashMap::new();
        for (p, name) in k.props().iter().enumerate() {
            let mut ext = BitSet::empty(n);
            for q in 0..n {
                if k.has_prop(StateId(q), p) {
                    ext.insert(q);
                }
            }
            base.insert(name.clone(), ext);
        }
        let succ = (0..n).map(|q| k.successors(StateId(q)).to_vec()).collect();
        Eval {
            k,
            opts,
            base,
            succ,
            env: HashMap::new(),
            depth: 0,
            memo: HashMap::new(),
            props_of: HashMap::new(),
        }
    }

    fn n(&self) -> usize {
        self.k.n_states()
    }

    /// Hash of the current extensions of every quantified proposition the
    /// node mentions; the memo key component that varies with the env.
    fn fingerprint(&self, props: &[String]) -> u64 {
        let mut h = DefaultHasher::new();
        for p in props {
            if let Some(ext) = self.env.get(p) {
                p.hash(&mut h);
                ext.hash(&mut h);
            }
        }
        h.finish()
    }

    fn state_props(&mut self, phi: &StateFormula) -> Rc<Vec<String>> {
        self.props_of
            .entry(phi as *const StateFormula as usize)
            .or_insert_with(|| {
                let mut set = BTreeSet::new();
                phi.collect_props(&mut set);
                Rc::new(set.into_iter().collect())
            })
            .clone()
    }

    fn prop_ext(&self, name: &str) -> Result<BitSet, QctlError> {
        if let Some(ext) = self.env.get(name) {
            return Ok(ext.clone());
        }
        match self.base.get(name) {
            Some(ext) => Ok(ext.clone()),
            None => Err(QctlError::UnknownProp(name.to_string())),
        }
    }

    fn sat(&mut self, phi: &StateFormula) -> Result<BitSet, QctlError> {
        match phi {
            StateFormula::True => Ok(BitSet::full(self.n())),
            StateFormula::False => Ok(BitSet::empty(self.n())),
            StateFormula::Prop(p) => self.prop_ext(p),
            StateFormula::Not(a) => {
                let mut out = self.sat(a)?;
                out.negate();
                Ok(out)
            }
            StateFormula::And(a, b) => {
                let mut out = self.sat(a)?;
                if out.is_empty() {
                    return Ok(out);
                }
                out.intersect_with(&self.sat(b)?);
                Ok(out)
            }
            StateFormula::Or(a, b) => {
                let mut out = self.sat(a)?;
                if out.count() == self.n() {
                    return Ok(out);
                }
                out.union_with(&self.sat(b)?);
                Ok(out)
            }
            StateFormula::Implies(a, b) => {
                let mut out = self.sat(a)?;
                out.negate();
                if out.count() == self.n() {
                    return Ok(out);
                }
                out.union_with(&self.sat(b)?);
                Ok(out)
            }
            StateFormula::Relax { body, .. } => self.sat(body),
            StateFormula::StratQ {
                coalition,
                complement,
                body,
                ..
            } => {
                if !coalition.is_empty() || *complement {
                    return Err(QctlError::CoalitionOnStructure);
                }
                let props = self.state_props(phi);
                let key = (phi as *const StateFormula as usize, self.fingerprint(&props));
                if let Some(hit) = self.memo.get(&key) {
                    return Ok(hit.clone());
                }
                // all paths satisfy body <=> no path satisfies its negation
                let mut out = self.epath_sat(body, false)?;
                out.negate();
                self.memo.insert(key, out.clone());
                Ok(out)
            }
            StateFormula::Exists { prop, body } => self.quantify(phi, prop, body, true),
            StateFormula::Forall { prop, body } => self.quantify(phi, prop, body, false),
        }
    }

    fn quantify(
        &mut self,
        whole: &StateFormula,
        prop: &str,
        body: &StateFormula,
        is_exists: bool,
    ) -> Result<BitSet, QctlError> {
        let props = self.state_props(whole);
        let key = (
            whole as *const StateFormula as usize,
            self.fingerprint(&props),
        );
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        if self.n() > 64 {
            return Err(QctlError::TooManyStates(self.n()));
        }
        if self.depth == self.opts.max_quantifier_depth {
            return Err(QctlError::QuantifierDepth(self.depth));
        }
        self.depth += 1;
        let saved = self.env.get(prop).cloned();
        let mut acc = if is_exists {
            BitSet::empty(self.n())
        } else {
            BitSet::full(self.n())
        };
        let mut result = Ok(());
        for mask in 0u64..(1u64 << self.n()) {
            self.env
                .insert(prop.to_string(), BitSet::from_mask(self.n(), mask));
            match self.sat(body) {
                Ok(s) => {
                    if is_exists {
                        acc.union_with(&s);
                        if acc.count() == self.n() {
                            break;
                        }
                    } else {
                        acc.intersect_with(&s);
                        if acc.is_empty() {
                            break;
                        }
                    }
                }
                Err(e) => {
                    result = Err(e);
                    break;
                }
            }
        }
        match saved {
            Some(old) => {
                self.env.insert(prop.to_string(), old);
            }
            None => {
                self.env.remove(prop);
            }
        }
        self.depth -= 1;
        result?;
        self.memo.insert(key, acc.clone());
        Ok(acc)
    }

    /// Like `sat` membership at one state, but existential quantifiers above
    /// any path quantifier stop at the first extension that works and record
    /// it. Failed branches leave the witness list untouched.
    fn holds_at(
        &mut self,
        phi: &StateFormula,
        at: StateId,
        wit: &mut Vec<(String, BitSet)>,
    ) -> Result<bool, QctlError> {
        let mark = wit.len();
        let held = match phi {
            StateFormula::And(a, b) => {
                self.holds_at(a, at, wit)? && self.holds_at(b, at, wit)?
            }
            StateFormula::Or(a, b) => {
                self.holds_at(a, at, wit)? || self.holds_at(b, at, wit)?
            }
            StateFormula::Exists { prop, body } => {
                if self.n() > 64 {
                    return Err(QctlError::TooManyStates(self.n()));
                }
                if self.depth == self.opts.max_quantifier_depth {
                    return Err(QctlError::QuantifierDepth(self.depth));
                }
                self.depth += 1;
                let saved = self.env.get(prop).cloned();
                let mut found = false;
                let mut result = Ok(());
                for mask in 0u64..(1u64 << self.n()) {
                    let ext = BitSet::from_mask(self.n(), mask);
                    self.env.insert(prop.clone(), ext.clone());
                    match self.holds_at(body, at, wit) {
                        Ok(true) => {
                            // `mark` is where this frame started, so the
                            // outer prop of a chain lands before inner ones
                            wit.insert(mark, (prop.clone(), ext));
                            found = true;
                            break;
                        }
                        Ok(false) => {}
                        Err(e) => {
                            result = Err(e);
                            break;
                        }
                    }
                }
                match saved {
                    Some(old) => {
                        self.env.insert(prop.clone(), old);
                    }
                    None => {
                        self.env.remove(prop);
                    }
                }
                self.depth -= 1;
                result?;
                found
            }
            _ => self.sat(phi)?.contains(at.0),
        };
        if !held {
            wit.truncate(mark);
        }
        Ok(held)
    }

    /// States from which some path satisfies the formula (negated first when
    /// `positive` is false). Fixpoint shortcuts cover the pure-state shapes.
    fn epath_sat(&mut self, body: &PathFormula, positive: bool) -> Result<BitSet, QctlError> {
        if let Some(fast) = self.fast_epath(body, positive)? {
            return Ok(fast);
        }
        let ep = self.product(body, positive)?;
        Ok(ep.sat)
    }

    fn fast_epath(
        &mut self,
        body: &PathFormula,
        positive: bool,
    ) -> Result<Option<BitSet>, QctlError> {
        match body {
            PathFormula::Not(x) => self.fast_epath(x, !positive),
            PathFormula::State(s) => {
                let mut ext = self.sat(s)?;
                if !positive {
                    ext.negate();
                }
                Ok(Some(ext))
            }
            PathFormula::Next(x) => {
                let PathFormula::State(s) = &**x else {
                    return Ok(None);
                };
                let mut target = self.sat(s)?;
                if !positive {
                    target.negate();
                }
                Ok(Some(self.pre_image(&target)))
            }
            PathFormula::Until(a, b) => {
                let (PathFormula::State(sa), PathFormula::State(sb)) = (&**a, &**b) else {
                    return Ok(None);
                };
                let mut ea = self.sat(sa)?;
                let mut eb = self.sat(sb)?;
                if positive {
                    Ok(Some(self.eu(&ea, &eb)))
                } else {
                    // E !(a U b) = E (!a R !b)
                    ea.negate();
                    eb.negate();
                    Ok(Some(self.er(&ea, &eb)))
                }
            }
            _ => Ok(None),
        }
    }

    /// States with a successor inside `target`.
    fn pre_image(&self, target: &BitSet) -> BitSet {
        let mut out = BitSet::empty(self.n());
        for q in 0..self.n() {
            if self.succ[q].iter().any(|s| target.contains(s.0)) {
                out.insert(q);
            }
        }
        out
    }

    /// Least fixpoint of `Z = b | (a & EX Z)`.
    fn eu(&self, a: &BitSet, b: &BitSet) -> BitSet {
        let mut z = b.clone();
        loop {
            let mut step = self.pre_image(&z);
            step.intersect_with(a);
            step.union_with(&z);
            if step == z {
                return z;
            }
            z = step;
        }
    }

    /// Greatest fixpoint of `Z = b & (a | EX Z)`.
    fn er(&self, a: &BitSet, b: &BitSet) -> BitSet {
        let mut z = b.clone();
        loop {
            let mut step = self.pre_image(&z);
            step.union_with(a);
            step.intersect_with(b);
            if step == z {
                return z;
            }
            z = step;
        }
    }

    fn product(
        &mut self,
        body: &PathFormula,
        positive: bool,
    ) -> Result<automata::ExistsPath, QctlError> {
        let mut arena = Arena::new();
        let mut atoms: Vec<BitSet> = Vec::new();
        let mut failure: Option<QctlError> = None;
        let n = self.n();
        let root = {
            let mut atomize = |s: &StateFormula| -> usize {
                match self.sat(s) {
                    Ok(ext) => {
                        atoms.push(ext);
                        atoms.len() - 1
                    }
                    Err(e) => {
                        if failure.is_none() {
                            failure = Some(e);
                        }
                        atoms.push(BitSet::empty(n));
                        atoms.len() - 1
                    }
                }
            };
            arena.intern_path(body, positive, &mut atomize)
        };
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(automata::exists_path(&arena, root, &self.succ, &atoms))
    }
}
