//! Plain Kripke structures: the target of every compilation step and the
//! input of the quantified CTL* engine.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::game::{is_identifier, StateId};

#[derive(Debug, Error)]
pub enum KripkeError {
    #[error("state {0} has no successor; structures must be total")]
    NotTotal(String),
    #[error("{0}")]
    Malformed(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A finite total Kripke structure with named states and props.
#[derive(Debug, Clone, PartialEq)]
pub struct KripkeStructure {
    states: Vec<String>,
    props: Vec<String>,
    labels: Vec<BTreeSet<usize>>,
    transitions: Vec<Vec<StateId>>,
    init: Option<StateId>,
}

impl KripkeStructure {
    pub fn new(
        states: Vec<String>,
        props: Vec<String>,
        labels: Vec<BTreeSet<usize>>,
        transitions: Vec<Vec<StateId>>,
        init: Option<StateId>,
    ) -> Result<Self, KripkeError> {
        if labels.len() != states.len() || transitions.len() != states.len() {
            return Err(KripkeError::Malformed(
                "labels and transitions must cover every state".into(),
            ));
        }
        for (q, succ) in transitions.iter().enumerate() {
            if succ.is_empty() {
                return Err(KripkeError::NotTotal(states[q].clone()));
            }
            for t in succ {
                if t.0 >= states.len() {
                    return Err(KripkeError::Malformed(format!(
                        "transition from {} to unknown state index {}",
                        states[q], t.0
                    )));
                }
            }
        }
        for l in &labels {
            for p in l {
                if *p >= props.len() {
                    return Err(KripkeError::Malformed(format!("label index {p} out of range")));
                }
            }
        }
        Ok(KripkeStructure {
            states,
            props,
            labels,
            transitions,
            init,
        })
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
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

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn prop_id(&self, name: &str) -> Option<usize> {
        self.props.iter().position(|p| p == name)
    }

    pub fn label_set(&self, q: StateId) -> &BTreeSet<usize> {
        &self.labels[q.0]
    }

    pub fn has_prop(&self, q: StateId, prop: usize) -> bool {
        self.labels[q.0].contains(&prop)
    }

    pub fn state_has_prop(&self, q: StateId, prop: &str) -> bool {
        self.prop_id(prop).is_some_and(|p| self.has_prop(q, p))
    }

    pub fn successors(&self, q: StateId) -> &[StateId] {
        &self.transitions[q.0]
    }

    pub fn init(&self) -> Option<StateId> {
        self.init
    }

    /// Total node count of the structure description, used by emission-size
    /// checks: one per state plus one per transition plus one per label.
    pub fn description_size(&self) -> usize {
        self.states.len()
            + self.transitions.iter().map(Vec::len).sum::<usize>()
            + self.labels.iter().map(BTreeSet::len).sum::<usize>()
    }

    /// Serializes to the text format shared with games: `props:`/`states:`
    /// head, `label` lines, and one `trans` line per state.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("props:");
        for p in &self.props {
            out.push(' ');
            out.push_str(p);
        }
        out.push('\n');
        out.push_str("states:");
        for s in &self.states {
            out.push(' ');
            out.push_str(s);
        }
        out.push('\n');
        if let Some(q) = self.init {
            out.push_str(&format!("init: {}\n", self.states[q.0]));
        }
        for (q, l) in self.labels.iter().enumerate() {
            if l.is_empty() {
                continue;
            }
            out.push_str(&format!("label {}:", self.states[q]));
            for p in l {
                out.push(' ');
                out.push_str(&self.props[*p]);
            }
            out.push('\n');
        }
        for (q, succ) in self.transitions.iter().enumerate() {
            out.push_str(&format!("trans {}:", self.states[q]));
            for t in succ {
                out.push(' ');
                out.push_str(&self.states[t.0]);
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(input: &str) -> Result<Self, KripkeError> {
        let mut props: Option<Vec<String>> = None;
        let mut states: Option<Vec<String>> = None;
        let mut labels: Vec<BTreeSet<usize>> = Vec::new();
        let mut transitions: Vec<Vec<StateId>> = Vec::new();
        let mut init = None;

        let err = |line: usize, message: String| KripkeError::Parse { line, message };
        for (ln, raw) in input.lines().enumerate() {
            let line = crate::game::strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let ln = ln + 1;
            let (head, rest) = match line.split_once(':') {
                Some(x) => x,
                None => return Err(err(ln, format!("expected `key: ...`, got `{line}`"))),
            };
            let head = head.trim();
            let fields: Vec<&str> = rest.split_whitespace().collect();
            match head.split_whitespace().collect::<Vec<_>>().as_slice() {
                ["props"] => {
                    if props.is_some() {
                        return Err(err(ln, "duplicate props line".into()));
                    }
                    for f in &fields {
                        if !is_identifier(f) {
                            return Err(err(ln, format!("invalid prop name `{f}`")));
                        }
                    }
                    props = Some(fields.iter().map(|s| s.to_string()).collect());
                }
                ["states"] => {
                    if states.is_some() {
                        return Err(err(ln, "duplicate states line".into()));
                    }
                    for f in &fields {
                        if !is_identifier(f) {
                            return Err(err(ln, format!("invalid state name `{f}`")));
                        }
                    }
                    let v: Vec<String> = fields.iter().map(|s| s.to_string()).collect();
                    labels = vec![BTreeSet::new(); v.len()];
                    transitions = vec![Vec::new(); v.len()];
                    states = Some(v);
                }
                ["init"] => {
                    let states = states
                        .as_ref()
                        .ok_or_else(|| err(ln, "init before states".into()))?;
                    if fields.len() != 1 {
                        return Err(err(ln, "init takes exactly one state".into()));
                    }
                    let q = states
                        .iter()
                        .position(|s| s == fields[0])
                        .ok_or_else(|| err(ln, format!("unknown state `{}`", fields[0])))?;
                    init = Some(StateId(q));
                }
                ["label", q] => {
                    let (states, props) = match (&states, &props) {
                        (Some(s), Some(p)) => (s, p),
                        _ => return Err(err(ln, "label before states/props".into())),
                    };
                    let qi = states
                        .iter()
                        .position(|s| s == q)
                        .ok_or_else(|| err(ln, format!("unknown state `{q}`")))?;
                    for f in &fields {
                        let p = props
                            .iter()
                            .position(|x| x == f)
                            .ok_or_else(|| err(ln, format!("unknown prop `{f}`")))?;
                        labels[qi].insert(p);
                    }
                }
                ["trans", q] => {
                    let states = states
                        .as_ref()
                        .ok_or_else(|| err(ln, "trans before states".into()))?;
                    let qi = states
                        .iter()
                        .position(|s| s == q)
                        .ok_or_else(|| err(ln, format!("unknown state `{q}`")))?;
                    for f in &fields {
                        let t = states
                            .iter()
                            .position(|s| s == f)
                            .ok_or_else(|| err(ln, format!("unknown state `{f}`")))?;
                        transitions[qi].push(StateId(t));
                    }
                }
                _ => return Err(err(ln, format!("unknown directive `{head}`"))),
            }
        }
        let states = states.ok_or(KripkeError::Malformed("missing states line".into()))?;
        let props = props.unwrap_or_default();
        KripkeStructure::new(states, props, labels, transitions, init)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_roundtrip_preserves_structure() {
        let k = KripkeStructure::new(
            vec!["q0".into(), "q1".into()],
            vec!["p".into(), "s#0".into()],
            vec![BTreeSet::from([0]), BTreeSet::from([0, 1])],
            vec![vec![StateId(1)], vec![StateId(0), StateId(1)]],
            Some(StateId(0)),
        )
        .unwrap();
        let text = k.to_text();
        let back = KripkeStructure::parse(&text).unwrap();
        assert_eq!(k, back);
    }

    #[test]
    fn totality_is_enforced() {
        let e = KripkeStructure::new(
            vec!["q0".into()],
            vec![],
            vec![BTreeSet::new()],
            vec![vec![]],
            None,
        )
        .unwrap_err();
        assert!(matches!(e, KripkeError::NotTotal(_)));
    }

    #[test]
    fn parse_rejects_unknown_names() {
        let e = KripkeStructure::parse("states: q0\ntrans q0: q9\n").unwrap_err();
        assert!(matches!(e, KripkeError::Parse { line: 2, .. }));
    }

    #[test]
    fn hash_is_literal_inside_tokens() {
        let k = KripkeStructure::parse(
            "props: s#0 # trailing comment\nstates: q0\nlabel q0: s#0\ntrans q0: q0\n",
        )
        .unwrap();
        assert_eq!(k.props(), &["s#0".to_string()]);
        assert!(k.state_has_prop(StateId(0), "s#0"));
    }
}
