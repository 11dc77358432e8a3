//! Display impls. Printing folds derived operators back into their surface
//! form and inserts the fewest parentheses the precedence table allows, so
//! the output reparses to the same tree.

use std::fmt;

use super::{Coalition, PathFormula, StateFormula};

// precedence levels: -> 0, | 1, & 2, U 3, prefix 4, atoms 5
const IMPLIES: usize = 0;
const OR: usize = 1;
const AND: usize = 2;
const UNTIL: usize = 3;
const UNARY: usize = 4;
const ATOM: usize = 5;

impl fmt::Display for StateFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_state(self, f, 0)
    }
}

impl fmt::Display for PathFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_path(self, f, 0)
    }
}

/// Strips one negation, looking through the state embedding.
fn un_not(p: &PathFormula) -> Option<PathFormula> {
    match p {
        PathFormula::Not(x) => Some((**x).clone()),
        PathFormula::State(s) => match &**s {
            StateFormula::Not(inner) => Some(PathFormula::State(inner.clone())),
            _ => None,
        },
        _ => None,
    }
}

/// `keep() <<>> body`, the shape `A` expands to.
fn as_all_paths(phi: &StateFormula) -> Option<&PathFormula> {
    let StateFormula::Relax {
        coalition,
        complement: true,
        body,
    } = phi
    else {
        return None;
    };
    if !coalition.is_empty() {
        return None;
    }
    let StateFormula::StratQ {
        coalition,
        complement: false,
        memoryless: false,
        body,
    } = &**body
    else {
        return None;
    };
    if !coalition.is_empty() {
        return None;
    }
    Some(body)
}

fn state_level(phi: &StateFormula) -> usize {
    match phi {
        StateFormula::True | StateFormula::False | StateFormula::Prop(_) => ATOM,
        StateFormula::Not(_)
        | StateFormula::StratQ { .. }
        | StateFormula::Relax { .. }
        | StateFormula::Exists { .. }
        | StateFormula::Forall { .. } => UNARY,
        StateFormula::And(..) => AND,
        StateFormula::Or(..) => OR,
        StateFormula::Implies(..) => IMPLIES,
    }
}

fn path_level(phi: &PathFormula) -> usize {
    match phi {
        PathFormula::State(s) => state_level(s),
        PathFormula::Not(_) | PathFormula::Next(_) => UNARY,
        PathFormula::Until(l, _) => {
            if matches!(&**l, PathFormula::State(s) if **s == StateFormula::True) {
                UNARY // prints as `F`
            } else {
                UNTIL
            }
        }
        PathFormula::And(..) => AND,
        PathFormula::Or(..) => OR,
        PathFormula::Implies(..) => IMPLIES,
    }
}

fn write_state(phi: &StateFormula, f: &mut fmt::Formatter<'_>, min: usize) -> fmt::Result {
    if state_level(phi) < min {
        f.write_str("(")?;
        write_state(phi, f, 0)?;
        return f.write_str(")");
    }
    match phi {
        StateFormula::True => f.write_str("true"),
        StateFormula::False => f.write_str("false"),
        StateFormula::Prop(p) => f.write_str(p),
        StateFormula::Not(x) => {
            if let StateFormula::StratQ {
                coalition,
                complement,
                memoryless,
                body,
            } = &**x
            {
                if let Some(inner) = un_not(body) {
                    f.write_str("[[")?;
                    write_coalition(f, coalition, *complement)?;
                    f.write_str("]]")?;
                    if *memoryless {
                        f.write_str("_0")?;
                    }
                    f.write_str(" ")?;
                    return write_path(&inner, f, UNARY);
                }
            }
            if let Some(body) = as_all_paths(x) {
                if let Some(inner) = un_not(body) {
                    f.write_str("E ")?;
                    return write_path(&inner, f, UNARY);
                }
            }
            f.write_str("!")?;
            write_state(x, f, UNARY)
        }
        StateFormula::And(a, b) => {
            write_state(a, f, AND)?;
            f.write_str(" & ")?;
            write_state(b, f, AND + 1)
        }
        StateFormula::Or(a, b) => {
            write_state(a, f, OR)?;
            f.write_str(" | ")?;
            write_state(b, f, OR + 1)
        }
        StateFormula::Implies(a, b) => {
            write_state(a, f, IMPLIES + 1)?;
            f.write_str(" -> ")?;
            write_state(b, f, IMPLIES)
        }
        StateFormula::StratQ {
            coalition,
            complement,
            memoryless,
            body,
        } => {
            f.write_str("<<")?;
            write_coalition(f, coalition, *complement)?;
            f.write_str(">>")?;
            if *memoryless {
                f.write_str("_0")?;
            }
            f.write_str(" ")?;
            write_path(body, f, UNARY)
        }
        StateFormula::Relax {
            coalition,
            complement,
            body,
        } => {
            if let Some(inner) = as_all_paths(phi) {
                f.write_str("A ")?;
                return write_path(inner, f, UNARY);
            }
            f.write_str(if *complement { "keep(" } else { "relax(" })?;
            let mut first = true;
            for a in coalition {
                if !first {
                    f.write_str(",")?;
                }
                f.write_str(a)?;
                first = false;
            }
            f.write_str(") ")?;
            write_state(body, f, UNARY)
        }
        StateFormula::Exists { prop, body } => {
            write!(f, "exists {prop}. ")?;
            write_state(body, f, UNARY)
        }
        StateFormula::Forall { prop, body } => {
            write!(f, "forall {prop}. ")?;
            write_state(body, f, UNARY)
        }
    }
}

fn write_path(phi: &PathFormula, f: &mut fmt::Formatter<'_>, min: usize) -> fmt::Result {
    if path_level(phi) < min {
        f.write_str("(")?;
        write_path(phi, f, 0)?;
        return f.write_str(")");
    }
    match phi {
        PathFormula::State(s) => write_state(s, f, min),
        PathFormula::Not(x) => {
            if let PathFormula::Until(l, r) = &**x {
                let left_true =
                    matches!(&**l, PathFormula::State(s) if **s == StateFormula::True);
                if left_true {
                    if let Some(inner) = un_not(r) {
                        f.write_str("G ")?;
                        return write_path(&inner, f, UNARY);
                    }
                }
            }
            f.write_str("!")?;
            write_path(x, f, UNARY)
        }
        PathFormula::Next(x) => {
            f.write_str("X ")?;
            write_path(x, f, UNARY)
        }
        PathFormula::Until(a, b) => {
            if matches!(&**a, PathFormula::State(s) if **s == StateFormula::True) {
                f.write_str("F ")?;
                return write_path(b, f, UNARY);
            }
            write_path(a, f, UNTIL + 1)?;
            f.write_str(" U ")?;
            write_path(b, f, UNTIL)
        }
        PathFormula::And(a, b) => {
            write_path(a, f, AND)?;
            f.write_str(" & ")?;
            write_path(b, f, AND + 1)
        }
        PathFormula::Or(a, b) => {
            write_path(a, f, OR)?;
            f.write_str(" | ")?;
            write_path(b, f, OR + 1)
        }
        PathFormula::Implies(a, b) => {
            write_path(a, f, IMPLIES + 1)?;
            f.write_str(" -> ")?;
            write_path(b, f, IMPLIES)
        }
    }
}

fn write_coalition(
    f: &mut fmt::Formatter<'_>,
    coalition: &Coalition,
    complement: bool,
) -> fmt::Result {
    if complement {
        f.write_str("co")?;
        if !coalition.is_empty() {
            f.write_str(" ")?;
        }
    }
    let mut first = true;
    for a in coalition {
        if !first {
            f.write_str(",")?;
        }
        f.write_str(a)?;
        first = false;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::StateFormula;

    /// Strings already in canonical form survive a parse/print cycle
    /// byte for byte.
    #[test]
    fn canonical_strings_are_fixed_points() {
        for s in [
            "p & q | r -> s",
            "!(p | q) & false",
            "<<a1>> F f",
            "<<a1,a2>>_0 X (p U q)",
            "<<co a1>> G (p -> q)",
            "<<>> X true",
            "[[a1]] F f",
            "[[a1,a2]]_0 X p",
            "E (p U q)",
            "A X !p",
            "E F p",
            "A G (p -> E X q)",
            "exists Z. (Z & E F Z)",
            "forall Z. A G (Z -> p)",
            "relax(a1) keep() <<co a2>>_0 (p U X q)",
            "<<a1>> ((p U q) U q U p)",
            "<<a1>> (p & X q U r)",
            "<<a1>> G F p",
            "!<<a1>> X p",
            "keep() <<>>_0 X p",
        ] {
            let ast = StateFormula::parse(s).unwrap();
            assert_eq!(ast.to_string(), s, "print is not a fixed point for `{s}`");
        }
    }

    /// Whatever shape the input has, print and reparse give it back.
    #[test]
    fn print_then_parse_is_identity() {
        for s in [
            "((p))",
            "!!p",
            "<<a1>> (true U x)",
            "<<a1>> !(true U !x)",
            "!<<a1>> !F f",
            "keep() <<>> X p",
            "!keep() <<>> !X p",
            "<<a1>> (F p & G q)",
            "[[co]] (p U (q U r))",
            "exists #u0. (#u0 -> A X #u0)",
            "<<a1>> X X X f",
            "A ((p -> q) U r)",
        ] {
            let ast = StateFormula::parse(s).unwrap();
            let printed = ast.to_string();
            let reparsed = StateFormula::parse(&printed)
                .unwrap_or_else(|e| panic!("`{printed}` does not reparse: {e}"));
            assert_eq!(reparsed, ast, "`{s}` -> `{printed}` changed the tree");
        }
    }

    #[test]
    fn sugar_is_preferred_on_output() {
        let checks = [
            ("true U x", "F x"),
            ("!(true U !x)", "G x"),
            ("!<<a1>> !X x", "[[a1]] X x"),
            ("keep() <<>> X p", "A X p"),
            ("!keep() <<>> !X p", "E X p"),
        ];
        for (input, want) in checks {
            let got = StateFormula::parse(&format!("<<a1>> ({input})"))
                .or_else(|_| StateFormula::parse(input))
                .unwrap()
                .to_string();
            assert!(
                got.contains(want),
                "`{input}` prints as `{got}`, expected `{want}` inside"
            );
        }
    }
}
