//! Text format for games.
//!
//! ```text
//! # comment
//! agents: a1 a2
//! moves: m1 m2 m3
//! props: P f
//! states: q0 q1 q2
//! init: q0
//! label q2: P
//! obs uniform: {q0 q1} {q2}        (or `obs a1: ...` per agent)
//! owner q0: a2
//! edge q0 m3 m1 -> q2              (one move per agent, declared order)
//! edge q0 * * -> q1                (wildcard; first matching rule wins)
//! ```
//!
//! A `#` opens a comment only at the start of a whitespace-separated token;
//! inside a token it is literal, which lets generated atom names round-trip
//! through the shared Kripke format.

use thiserror::Error;

use super::{Cgso, GameBuilder, MoveId, StateId};

#[derive(Debug, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

/// Removes a trailing comment: everything from the first `#` that starts a
/// token.
pub(crate) fn strip_comment(line: &str) -> &str {
    let bytes = line.as_bytes();
    for (i, b) in bytes.iter().enumerate() {
        if *b == b'#' && (i == 0 || bytes[i - 1].is_ascii_whitespace()) {
            return &line[..i];
        }
    }
    line
}

impl Cgso {
    pub fn parse(input: &str) -> Result<Cgso, ParseError> {
        let err = |line: usize, message: String| ParseError { line, message };
        let lines: Vec<(usize, &str)> = input
            .lines()
            .enumerate()
            .map(|(i, raw)| (i + 1, strip_comment(raw).trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();

        // headers first: the four name lists may appear anywhere but at most
        // once each
        let mut header: std::collections::BTreeMap<&str, (usize, Vec<String>)> = Default::default();
        for &(ln, line) in &lines {
            let Some((key, rest)) = line.split_once(':') else {
                continue;
            };
            let key = key.trim();
            if matches!(key, "agents" | "moves" | "props" | "states") {
                let fields = rest.split_whitespace().map(str::to_string).collect();
                if header.insert(key, (ln, fields)).is_some() {
                    return Err(err(ln, format!("duplicate `{key}` line")));
                }
            }
        }
        let take = |key: &str| -> Vec<String> {
            header.get(key).map(|(_, v)| v.clone()).unwrap_or_default()
        };
        let mut b = GameBuilder::new(take("agents"), take("moves"), take("props"), take("states"))
            .map_err(|m| err(lines.first().map(|l| l.0).unwrap_or(1), m))?;

        for &(ln, line) in &lines {
            let words: Vec<&str> = line.split_whitespace().collect();
            if words[0] == "edge" {
                parse_edge(&mut b, &words).map_err(|m| err(ln, m))?;
                continue;
            }
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| err(ln, format!("expected `key: ...`, got `{line}`")))?;
            let keywords: Vec<&str> = key.split_whitespace().collect();
            let fields: Vec<&str> = rest.split_whitespace().collect();
            match keywords.as_slice() {
                ["agents"] | ["moves"] | ["props"] | ["states"] => {}
                ["init"] => {
                    if fields.len() != 1 {
                        return Err(err(ln, "init takes exactly one state".into()));
                    }
                    let q = state_id(&b, fields[0]).map_err(|m| err(ln, m))?;
                    b.init(q);
                }
                ["label", q] => {
                    let q = state_id(&b, q).map_err(|m| err(ln, m))?;
                    for f in &fields {
                        let p = b
                            .game
                            .prop_id(f)
                            .ok_or_else(|| err(ln, format!("unknown prop `{f}`")))?;
                        b.label(q, p);
                    }
                }
                ["owner", q] => {
                    if fields.len() != 1 {
                        return Err(err(ln, "owner takes exactly one agent".into()));
                    }
                    let q = state_id(&b, q).map_err(|m| err(ln, m))?;
                    let a = b
                        .game
                        .agent_id(fields[0])
                        .ok_or_else(|| err(ln, format!("unknown agent `{}`", fields[0])))?;
                    b.owner(q, a);
                }
                ["obs", which] => {
                    let classes = parse_classes(rest, &b.game).map_err(|m| err(ln, m))?;
                    if *which == "uniform" {
                        b.obs_uniform(classes);
                    } else {
                        let a = b
                            .game
                            .agent_id(which)
                            .ok_or_else(|| err(ln, format!("unknown agent `{which}`")))?;
                        b.obs_agent(a, classes);
                    }
                }
                _ => return Err(err(ln, format!("unknown directive `{key}`"))),
            }
        }
        Ok(b.finish())
    }

    /// Serializes in the input format. Partitions identical across agents are
    /// written as a single `obs uniform` line; edge rules are compressed to
    /// one rule per owner move when an ownership map is present.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let list = |items: &[String]| items.join(" ");
        out.push_str(&format!("agents: {}\n", list(&self.agents)));
        out.push_str(&format!("moves: {}\n", list(&self.moves)));
        if !self.props.is_empty() {
            out.push_str(&format!("props: {}\n", list(&self.props)));
        }
        out.push_str(&format!("states: {}\n", list(&self.states)));
        if let Some(q) = self.init {
            out.push_str(&format!("init: {}\n", self.states[q.0]));
        }
        for (q, l) in self.labels.iter().enumerate() {
            if l.is_empty() {
                continue;
            }
            let props: Vec<&str> = l.iter().map(|p| self.props[*p].as_str()).collect();
            out.push_str(&format!("label {}: {}\n", self.states[q], props.join(" ")));
        }
        let render_classes = |p: &super::ObservationPartition| {
            p.classes()
                .iter()
                .map(|c| {
                    let names: Vec<&str> = c.iter().map(|q| self.states[q.0].as_str()).collect();
                    format!("{{{}}}", names.join(" "))
                })
                .collect::<Vec<_>>()
                .join(" ")
        };
        if self.obs.windows(2).all(|w| w[0] == w[1]) {
            out.push_str(&format!("obs uniform: {}\n", render_classes(&self.obs[0])));
        } else {
            for (a, p) in self.obs.iter().enumerate() {
                out.push_str(&format!("obs {}: {}\n", self.agents[a], render_classes(p)));
            }
        }
        if let Some(owner) = &self.owner {
            for (q, a) in owner.iter().enumerate() {
                out.push_str(&format!("owner {}: {}\n", self.states[q], self.agents[a.0]));
            }
        }
        let compress = self.owner.is_some()
            && self.require_total().is_ok()
            && !self
                .validate()
                .iter()
                .any(|d| d.kind == super::DiagnosticKind::TurnBasedOwnership);
        for q in 0..self.states.len() {
            if compress {
                let own = self.owner.as_ref().unwrap()[q];
                for m in 0..self.moves.len() {
                    let mut mv = vec![MoveId(0); self.agents.len()];
                    mv[own.0] = MoveId(m);
                    let target = self.successor(StateId(q), &mv).expect("total");
                    let cells: Vec<&str> = (0..self.agents.len())
                        .map(|a| if a == own.0 { self.moves[m].as_str() } else { "*" })
                        .collect();
                    out.push_str(&format!(
                        "edge {} {} -> {}\n",
                        self.states[q],
                        cells.join(" "),
                        self.states[target.0]
                    ));
                }
            } else {
                for idx in 0..self.n_move_vectors() {
                    if let Some(target) = self.edg[q][idx] {
                        let mv = self.mv_from_index(idx);
                        out.push_str(&format!(
                            "edge {} {} -> {}\n",
                            self.states[q],
                            self.render_mv(&mv),
                            self.states[target.0]
                        ));
                    }
                }
            }
        }
        out
    }
}

fn state_id(b: &GameBuilder, name: &str) -> Result<StateId, String> {
    b.game
        .state_id(name)
        .ok_or_else(|| format!("unknown state `{name}`"))
}

fn parse_edge(b: &mut GameBuilder, words: &[&str]) -> Result<(), String> {
    let arrow = words
        .iter()
        .position(|w| *w == "->")
        .ok_or_else(|| "edge line needs `->`".to_string())?;
    if words.len() != arrow + 2 || arrow < 2 {
        return Err("edge takes a state, one move per agent, `->`, and a target".into());
    }
    let q = state_id(b, words[1])?;
    let moves = &words[2..arrow];
    if moves.len() != b.game.n_agents() {
        return Err(format!(
            "edge needs one move per agent ({}), got {}",
            b.game.n_agents(),
            moves.len()
        ));
    }
    let mut pattern = Vec::with_capacity(moves.len());
    for m in moves {
        if *m == "*" {
            pattern.push(None);
        } else {
            let id = b
                .game
                .move_id(m)
                .ok_or_else(|| format!("unknown move `{m}`"))?;
            pattern.push(Some(id));
        }
    }
    let target = state_id(b, words[arrow + 1])?;
    b.edge(q, &pattern, target);
    Ok(())
}

fn parse_classes(input: &str, game: &Cgso) -> Result<Vec<Vec<StateId>>, String> {
    let mut classes = Vec::new();
    let mut rest = input.trim();
    while !rest.is_empty() {
        if !rest.starts_with('{') {
            return Err(format!("expected `{{` in class list, got `{rest}`"));
        }
        let end = rest
            .find('}')
            .ok_or_else(|| "unclosed `{` in class list".to_string())?;
        let mut class = Vec::new();
        for name in rest[1..end].split_whitespace() {
            let q = game
                .state_id(name)
                .ok_or_else(|| format!("unknown state `{name}` in class"))?;
            class.push(q);
        }
        classes.push(class);
        rest = rest[end + 1..].trim_start();
    }
    if classes.is_empty() {
        return Err("empty class list".into());
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::super::DiagnosticKind;
    use super::*;

    const TINY: &str = "\
# a tiny demo
agents: a1 a2
moves: m1 m2
props: p
states: q0 q1 q2
init: q0
label q2: p
obs uniform: {q0} {q1 q2}
edge q0 m1 * -> q1
edge q0 * * -> q2
edge q1 * * -> q2
edge q2 * * -> q2
";

    #[test]
    fn parse_and_roundtrip() {
        let g = Cgso::parse(TINY).unwrap();
        assert!(g.validate().is_empty());
        assert_eq!(g.n_states(), 3);
        assert_eq!(g.init(), g.state_id("q0"));
        let back = Cgso::parse(&g.to_text()).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn owner_compression_roundtrips() {
        let src = std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/games/reach.game"
        ))
        .unwrap();
        let g = Cgso::parse(&src).unwrap();
        assert!(g.validate().is_empty());
        assert!(g.to_text().contains("edge q0 * m1 -> q1"));
        let back = Cgso::parse(&g.to_text()).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn missing_edges_surface_in_validate_not_parse() {
        let partial = TINY.replace("edge q1 * * -> q2\n", "");
        let g = Cgso::parse(&partial).unwrap();
        let d = g.validate();
        assert!(!d.is_empty());
        assert!(d.iter().all(|d| d.kind == DiagnosticKind::IncompleteEdg));
        assert!(d[0].message.contains("q1"));
    }

    #[test]
    fn unknown_names_are_parse_errors() {
        let e = Cgso::parse(&TINY.replace("label q2: p", "label q9: p")).unwrap_err();
        assert!(e.message.contains("q9"));
        let e = Cgso::parse(&TINY.replace("edge q0 m1 * -> q1", "edge q0 m9 * -> q1")).unwrap_err();
        assert!(e.message.contains("m9"));
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let commented = format!("# header\n\n{TINY}\n# trailing\n");
        let g = Cgso::parse(&commented).unwrap();
        assert_eq!(g.n_states(), 3);
    }

    #[test]
    fn sharp_is_literal_inside_tokens() {
        let src = TINY.replace("props: p", "props: p s#0").replace(
            "label q2: p",
            "label q2: p s#0 # trailing note",
        );
        let g = Cgso::parse(&src).unwrap();
        let s = g.prop_id("s#0").unwrap();
        assert!(g.has_prop(g.state_id("q2").unwrap(), s));
    }
}
