//! Lexer and recursive-descent parser.
//!
//! Parsing happens on an unsorted tree first; sorting it into state and path
//! formulas is a second step, so misplaced temporal operators are reported
//! with a position instead of a generic syntax error.

use std::fmt;

use super::{Coalition, PathFormula, StateFormula};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicError {
    pub pos: usize,
    pub message: String,
}

impl fmt::Display for LogicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column {}: {}", self.pos + 1, self.message)
    }
}

impl std::error::Error for LogicError {}

fn err<T>(pos: usize, message: impl Into<String>) -> Result<T, LogicError> {
    Err(LogicError {
        pos,
        message: message.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Exists,
    Forall,
    RelaxKw,
    KeepKw,
    Next,
    UntilOp,
    Finally,
    Globally,
    ExistsPath,
    AllPaths,
    Bang,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
    Comma,
    Dot,
    LAngles,
    RAngles(bool),
    LBrackets,
    RBrackets(bool),
}

fn lex(input: &str) -> Result<Vec<(usize, Tok)>, LogicError> {
    let b = input.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    let ident_start = |c: u8| c.is_ascii_alphabetic() || c == b'_' || c == b'#';
    let ident_cont = |c: u8| {
        c.is_ascii_alphanumeric() || matches!(c, b'_' | b'+' | b'#' | b'@')
    };
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'!' => {
                i += 1;
                Tok::Bang
            }
            b'&' => {
                i += 1;
                Tok::Amp
            }
            b'|' => {
                i += 1;
                Tok::Pipe
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b',' => {
                i += 1;
                Tok::Comma
            }
            b'.' => {
                i += 1;
                Tok::Dot
            }
            b'-' => {
                if b.get(i + 1) == Some(&b'>') {
                    i += 2;
                    Tok::Arrow
                } else {
                    return err(i, "expected `->`");
                }
            }
            b'<' => {
                if b.get(i + 1) == Some(&b'<') {
                    i += 2;
                    Tok::LAngles
                } else {
                    return err(i, "expected `<<`");
                }
            }
            b'>' => {
                if b.get(i + 1) == Some(&b'>') {
                    i += 2;
                    if b.get(i) == Some(&b'_') && b.get(i + 1) == Some(&b'0') {
                        i += 2;
                        Tok::RAngles(true)
                    } else {
                        Tok::RAngles(false)
                    }
                } else {
                    return err(i, "expected `>>`");
                }
            }
            b'[' => {
                if b.get(i + 1) == Some(&b'[') {
                    i += 2;
                    Tok::LBrackets
                } else {
                    return err(i, "expected `[[`");
                }
            }
            b']' => {
                if b.get(i + 1) == Some(&b']') {
                    i += 2;
                    if b.get(i) == Some(&b'_') && b.get(i + 1) == Some(&b'0') {
                        i += 2;
                        Tok::RBrackets(true)
                    } else {
                        Tok::RBrackets(false)
                    }
                } else {
                    return err(i, "expected `]]`");
                }
            }
            c if ident_start(c) => {
                let mut j = i + 1;
                while j < b.len() && ident_cont(b[j]) {
                    j += 1;
                }
                let word = &input[i..j];
                i = j;
                match word {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "exists" => Tok::Exists,
                    "forall" => Tok::Forall,
                    "relax" => Tok::RelaxKw,
                    "keep" => Tok::KeepKw,
                    "X" => Tok::Next,
                    "U" => Tok::UntilOp,
                    "F" => Tok::Finally,
                    "G" => Tok::Globally,
                    "E" => Tok::ExistsPath,
                    "A" => Tok::AllPaths,
                    _ => Tok::Ident(word.to_string()),
                }
            }
            _ => return err(i, format!("unexpected character `{}`", c as char)),
        };
        toks.push((start, tok));
    }
    Ok(toks)
}

/// Parse tree before the state/path split.
struct PTree {
    pos: usize,
    node: PNode,
}

enum PNode {
    True,
    False,
    Prop(String),
    Not(Box<PTree>),
    And(Box<PTree>, Box<PTree>),
    Or(Box<PTree>, Box<PTree>),
    Implies(Box<PTree>, Box<PTree>),
    Next(Box<PTree>),
    Until(Box<PTree>, Box<PTree>),
    StratQ {
        coalition: Coalition,
        complement: bool,
        memoryless: bool,
        body: Box<PTree>,
    },
    Relax {
        coalition: Coalition,
        complement: bool,
        body: Box<PTree>,
    },
    Exists(String, Box<PTree>),
    Forall(String, Box<PTree>),
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), LogicError> {
        if self.peek() == Some(want) {
            self.i += 1;
            Ok(())
        } else {
            err(self.pos(), format!("expected {what}"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, LogicError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.i += 1;
                Ok(s)
            }
            _ => err(self.pos(), format!("expected {what}")),
        }
    }

    fn implies(&mut self) -> Result<PTree, LogicError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Arrow) {
            let pos = self.pos();
            self.i += 1;
            let rhs = self.implies()?;
            return Ok(PTree {
                pos,
                node: PNode::Implies(Box::new(lhs), Box::new(rhs)),
            });
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<PTree, LogicError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Pipe) {
            let pos = self.pos();
            self.i += 1;
            let rhs = self.and()?;
            lhs = PTree {
                pos,
                node: PNode::Or(Box::new(lhs), Box::new(rhs)),
            };
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<PTree, LogicError> {
        let mut lhs = self.until()?;
        while self.peek() == Some(&Tok::Amp) {
            let pos = self.pos();
            self.i += 1;
            let rhs = self.until()?;
            lhs = PTree {
                pos,
                node: PNode::And(Box::new(lhs), Box::new(rhs)),
            };
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<PTree, LogicError> {
        let lhs = self.unary()?;
        if self.peek() == Some(&Tok::UntilOp) {
            let pos = self.pos();
            self.i += 1;
            let rhs = self.until()?;
            return Ok(PTree {
                pos,
                node: PNode::Until(Box::new(lhs), Box::new(rhs)),
            });
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<PTree, LogicError> {
        let pos = self.pos();
        let node = match self.peek() {
            Some(Tok::Bang) => {
                self.i += 1;
                PNode::Not(Box::new(self.unary()?))
            }
            Some(Tok::Next) => {
                self.i += 1;
                PNode::Next(Box::new(self.unary()?))
            }
            Some(Tok::Finally) => {
                self.i += 1;
                let body = self.unary()?;
                PNode::Until(
                    Box::new(PTree {
                        pos,
                        node: PNode::True,
                    }),
                    Box::new(body),
                )
            }
            Some(Tok::Globally) => {
                self.i += 1;
                let body = self.unary()?;
                // G p = !(true U !p)
                let not_body = PTree {
                    pos,
                    node: PNode::Not(Box::new(body)),
                };
                let until = PTree {
                    pos,
                    node: PNode::Until(
                        Box::new(PTree {
                            pos,
                            node: PNode::True,
                        }),
                        Box::new(not_body),
                    ),
                };
                PNode::Not(Box::new(until))
            }
            Some(Tok::AllPaths) => {
                self.i += 1;
                let body = self.unary()?;
                all_paths_node(pos, body)
            }
            Some(Tok::ExistsPath) => {
                self.i += 1;
                let body = self.unary()?;
                let not_body = PTree {
                    pos,
                    node: PNode::Not(Box::new(body)),
                };
                PNode::Not(Box::new(PTree {
                    pos,
                    node: all_paths_node(pos, not_body),
                }))
            }
            Some(Tok::LAngles) => {
                self.i += 1;
                let (coalition, complement) = self.coalition()?;
                let memoryless = match self.peek() {
                    Some(&Tok::RAngles(m)) => {
                        self.i += 1;
                        m
                    }
                    _ => return err(self.pos(), "expected `>>` after the coalition"),
                };
                PNode::StratQ {
                    coalition,
                    complement,
                    memoryless,
                    body: Box::new(self.unary()?),
                }
            }
            Some(Tok::LBrackets) => {
                self.i += 1;
                let (coalition, complement) = self.coalition()?;
                let memoryless = match self.peek() {
                    Some(&Tok::RBrackets(m)) => {
                        self.i += 1;
                        m
                    }
                    _ => return err(self.pos(), "expected `]]` after the coalition"),
                };
                let body = self.unary()?;
                let not_body = PTree {
                    pos,
                    node: PNode::Not(Box::new(body)),
                };
                PNode::Not(Box::new(PTree {
                    pos,
                    node: PNode::StratQ {
                        coalition,
                        complement,
                        memoryless,
                        body: Box::new(not_body),
                    },
                }))
            }
            Some(Tok::RelaxKw) | Some(Tok::KeepKw) => {
                let complement = self.peek() == Some(&Tok::KeepKw);
                self.i += 1;
                self.expect(&Tok::LParen, "`(` after relax/keep")?;
                let mut coalition = Coalition::new();
                while self.peek() != Some(&Tok::RParen) {
                    coalition.insert(self.ident("an agent name")?);
                    if self.peek() == Some(&Tok::Comma) {
                        self.i += 1;
                    } else {
                        break;
                    }
                }
                self.expect(&Tok::RParen, "`)` to close the agent list")?;
                PNode::Relax {
                    coalition,
                    complement,
                    body: Box::new(self.unary()?),
                }
            }
            Some(Tok::Exists) | Some(Tok::Forall) => {
                let is_exists = self.peek() == Some(&Tok::Exists);
                self.i += 1;
                let prop = self.ident("a proposition name")?;
                self.expect(&Tok::Dot, "`.` after the bound proposition")?;
                let body = Box::new(self.unary()?);
                if is_exists {
                    PNode::Exists(prop, body)
                } else {
                    PNode::Forall(prop, body)
                }
            }
            Some(Tok::True) => {
                self.i += 1;
                PNode::True
            }
            Some(Tok::False) => {
                self.i += 1;
                PNode::False
            }
            Some(Tok::Ident(_)) => {
                let name = self.ident("a proposition")?;
                PNode::Prop(name)
            }
            Some(Tok::LParen) => {
                self.i += 1;
                let inner = self.implies()?;
                self.expect(&Tok::RParen, "`)`")?;
                return Ok(inner);
            }
            _ => return err(pos, "expected a formula"),
        };
        Ok(PTree { pos, node })
    }

    fn coalition(&mut self) -> Result<(Coalition, bool), LogicError> {
        let complement = if let Some(Tok::Ident(w)) = self.peek() {
            if w == "co" {
                self.i += 1;
                true
            } else {
                false
            }
        } else {
            false
        };
        let mut coalition = Coalition::new();
        while let Some(Tok::Ident(_)) = self.peek() {
            coalition.insert(self.ident("an agent name")?);
            if self.peek() == Some(&Tok::Comma) {
                self.i += 1;
            } else {
                break;
            }
        }
        Ok((coalition, complement))
    }
}

fn all_paths_node(pos: usize, body: PTree) -> PNode {
    PNode::Relax {
        coalition: Coalition::new(),
        complement: true,
        body: Box::new(PTree {
            pos,
            node: PNode::StratQ {
                coalition: Coalition::new(),
                complement: false,
                memoryless: false,
                body: Box::new(body),
            },
        }),
    }
}

fn to_state(t: PTree) -> Result<StateFormula, LogicError> {
    match t.node {
        PNode::True => Ok(StateFormula::True),
        PNode::False => Ok(StateFormula::False),
        PNode::Prop(p) => Ok(StateFormula::Prop(p)),
        PNode::Not(a) => Ok(to_state(*a)?.not()),
        PNode::And(a, b) => Ok(to_state(*a)?.and(to_state(*b)?)),
        PNode::Or(a, b) => Ok(to_state(*a)?.or(to_state(*b)?)),
        PNode::Implies(a, b) => Ok(to_state(*a)?.implies(to_state(*b)?)),
        PNode::Next(_) => err(t.pos, "`X` needs an enclosing path quantifier"),
        PNode::Until(..) => err(t.pos, "`U` needs an enclosing path quantifier"),
        PNode::StratQ {
            coalition,
            complement,
            memoryless,
            body,
        } => Ok(StateFormula::StratQ {
            coalition,
            complement,
            memoryless,
            body: Box::new(to_path(*body)?),
        }),
        PNode::Relax {
            coalition,
            complement,
            body,
        } => Ok(StateFormula::Relax {
            coalition,
            complement,
            body: Box::new(to_state(*body)?),
        }),
        PNode::Exists(p, body) => Ok(StateFormula::exists(p, to_state(*body)?)),
        PNode::Forall(p, body) => Ok(StateFormula::forall(p, to_state(*body)?)),
    }
}

fn to_path(t: PTree) -> Result<PathFormula, LogicError> {
    match t.node {
        PNode::Not(a) => Ok(to_path(*a)?.not()),
        PNode::And(a, b) => Ok(to_path(*a)?.and(to_path(*b)?)),
        PNode::Or(a, b) => Ok(to_path(*a)?.or(to_path(*b)?)),
        PNode::Implies(a, b) => Ok(to_path(*a)?.implies(to_path(*b)?)),
        PNode::Next(a) => Ok(to_path(*a)?.next()),
        PNode::Until(a, b) => Ok(to_path(*a)?.until(to_path(*b)?)),
        _ => Ok(PathFormula::state(to_state(t)?)),
    }
}

pub(super) fn state_formula(input: &str) -> Result<StateFormula, LogicError> {
    let toks = lex(input)?;
    let mut p = Parser {
        toks,
        i: 0,
        end: input.len(),
    };
    let tree = p.implies()?;
    if p.i != p.toks.len() {
        return err(p.pos(), "unexpected trailing input");
    }
    to_state(tree)
}

#[cfg(test)]
mod tests {
    use super::super::{PathFormula, StateFormula};

    fn p(s: &str) -> StateFormula {
        StateFormula::parse(s).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(p("a -> b -> c"), p("a -> (b -> c)"));
        assert_eq!(p("a | b & c"), p("a | (b & c)"));
        assert_eq!(p("a & b | c"), p("(a & b) | c"));
        assert_eq!(p("a & b & c"), p("(a & b) & c"));
        assert_eq!(p("!a & b"), p("(!a) & b"));
        assert_eq!(
            p("<<a1>> (x U y & z)"),
            p("<<a1>> ((x U y) & z)")
        );
        assert_eq!(
            p("<<a1>> (x U y U z)"),
            p("<<a1>> (x U (y U z))")
        );
    }

    #[test]
    fn prefix_operators_bind_one_unary_argument() {
        // <<a1>> grabs only `x`, the `U` then fails to find a path context
        let e = StateFormula::parse("<<a1>> x U y").unwrap_err();
        assert!(e.message.contains("`U`"));
        assert!(e.pos > 0);
    }

    #[test]
    fn maximal_state_reading_is_canonical() {
        let phi = p("<<a1>> ((x & y) U q)");
        let StateFormula::StratQ { body, .. } = &phi else {
            panic!("not a quantifier");
        };
        let PathFormula::Until(lhs, _) = &**body else {
            panic!("not an until");
        };
        assert!(matches!(&**lhs, PathFormula::State(_)));
        // without parentheses, `U` binds tighter than `&`
        assert_eq!(p("<<a1>> (x & y U q)"), p("<<a1>> (x & (y U q))"));
    }

    #[test]
    fn sugar_expansion() {
        assert_eq!(p("<<a1>> F x"), p("<<a1>> (true U x)"));
        assert_eq!(p("<<a1>> G x"), p("<<a1>> !(true U !x)"));
        assert_eq!(p("[[a1]] X x"), p("!<<a1>> !X x"));
        assert_eq!(p("[[a1,a2]]_0 X x"), p("!<<a2,a1>>_0 !X x"));
        assert_eq!(p("E X x"), p("!A !X x"));
    }

    #[test]
    fn coalition_forms() {
        let phi = p("<<co>> X x");
        assert!(matches!(
            phi,
            StateFormula::StratQ {
                complement: true, ..
            }
        ));
        assert_eq!(p("<<a1, a2>> X x"), p("<<a2,a1>> X x"));
        assert_eq!(p("<<>> X x"), StateFormula::stratq::<_, String>([], false, PathFormula::state(p("x")).next()));
        assert!(matches!(
            p("keep() x"),
            StateFormula::Relax {
                complement: true, ..
            }
        ));
    }

    #[test]
    fn error_positions_point_at_the_problem() {
        let e = StateFormula::parse("x & (y | )").unwrap_err();
        assert_eq!(e.pos, 9);
        let e = StateFormula::parse("x U y").unwrap_err();
        assert_eq!(e.pos, 2);
        assert!(e.message.contains("path quantifier"));
        let e = StateFormula::parse("exists P (x)").unwrap_err();
        assert!(e.message.contains('.'));
    }

    #[test]
    fn quantifier_binds_sharp_names() {
        let phi = p("exists #u0. (#u0 -> <<a1>>_0 X #u0)");
        assert!(phi.props().contains("#u0"));
    }

    #[test]
    fn rejects_stray_input() {
        assert!(StateFormula::parse("x y").is_err());
        assert!(StateFormula::parse("").is_err());
        assert!(StateFormula::parse("x &").is_err());
        assert!(StateFormula::parse("<a1> X x").is_err());
    }
}
