use super::parser::{resolve, NameKind};
use super::Formula;
use crate::graph::Signature;

const OR: u8 = 1;
const AND: u8 = 2;
const UNARY: u8 = 3;

/// Prints `f` in the concrete syntax accepted by [`parse`](super::parse).
///
/// At arity 1 the `@0` suffix is dropped wherever the short name resolves
/// back to the same symbol.
pub fn print(f: &Formula, sig: &Signature, arity: usize) -> String {
    let mut out = String::new();
    Printer {
        short: (arity == 1).then_some(sig),
    }
    .go(f, OR, true, &mut out);
    out
}

/// Prints with every index explicit; needs no signature.
pub fn print_raw(f: &Formula) -> String {
    let mut out = String::new();
    Printer { short: None }.go(f, OR, true, &mut out);
    out
}

struct Printer<'a> {
    short: Option<&'a Signature>,
}

impl Printer<'_> {
    fn name(&self, name: &str, index: usize, kind: NameKind, out: &mut String) {
        out.push_str(name);
        if let (Some(sig), 0) = (self.short, index) {
            if resolve(name, kind, sig, 1).is_ok_and(|(n, i)| n == name && i == 0) {
                return;
            }
        }
        out.push('@');
        out.push_str(&index.to_string());
    }

    /// `prec` is the weakest operator allowed without parentheses; `open`
    /// says nothing follows, so a fixpoint body may run to the end.
    fn go(&self, f: &Formula, prec: u8, open: bool, out: &mut String) {
        match f {
            Formula::True => out.push_str("tt"),
            Formula::False => out.push_str("ff"),
            Formula::Color { color, index } => self.name(color, *index, NameKind::Color, out),
            Formula::Var(x) => out.push_str(x),
            Formula::Not(g) => {
                out.push('~');
                self.go(g, UNARY, open, out);
            }
            Formula::Diamond { action, index, body } => {
                out.push('<');
                self.name(action, *index, NameKind::Action, out);
                out.push('>');
                self.go(body, UNARY, open, out);
            }
            Formula::Box { action, index, body } => {
                out.push('[');
                self.name(action, *index, NameKind::Action, out);
                out.push(']');
                self.go(body, UNARY, open, out);
            }
            Formula::Replace { map, body } => {
                out.push_str("%{");
                let parts: Vec<String> = map.iter().map(|k| k.to_string()).collect();
                out.push_str(&parts.join(","));
                out.push('}');
                self.go(body, UNARY, open, out);
            }
            Formula::Mu { var, body } | Formula::Nu { var, body } => {
                let kw = if matches!(f, Formula::Mu { .. }) { "mu" } else { "nu" };
                if !open {
                    out.push('(');
                }
                out.push_str(kw);
                out.push(' ');
                out.push_str(var);
                out.push_str(". ");
                self.go(body, OR, true, out);
                if !open {
                    out.push(')');
                }
            }
            Formula::And(g, h) | Formula::Or(g, h) => {
                let (own, sym) = if matches!(f, Formula::And(..)) {
                    (AND, " & ")
                } else {
                    (OR, " | ")
                };
                let paren = prec > own;
                if paren {
                    out.push('(');
                }
                self.go(g, own, false, out);
                out.push_str(sym);
                self.go(h, own + 1, paren || open, out);
                if paren {
                    out.push(')');
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse;

    fn sig() -> Signature {
        Signature::new(["a", "b"], ["f"]).unwrap()
    }

    #[test]
    fn round_trips_examples() {
        let s = Signature::new(["a"], ["f"]).unwrap();
        let text = "<a@0>(f@0 & <a@1>[a@1]f@1)";
        let f = parse(text, &s, 2).unwrap();
        assert_eq!(print(&f, &s, 2), text);
        let text = "mu X. f | <a>X | <b>X";
        let g = parse(text, &sig(), 1).unwrap();
        assert_eq!(print(&g, &sig(), 1), text);
        assert_eq!(print_raw(&g), "mu X. f@0 | <a@0>X | <b@0>X");
    }

    #[test]
    fn replacement_syntax() {
        let f = Formula::replace(vec![1, 0], Formula::color("f", 0));
        assert_eq!(print(&f, &sig(), 2), "%{1,0}f@0");
    }

    #[test]
    fn parenthesizes_only_where_needed() {
        let x = || Formula::color("f", 0);
        let cases = [
            Formula::and(Formula::or(x(), x()), x()),
            Formula::or(x(), Formula::or(x(), x())),
            Formula::and(x(), Formula::and(x(), x())),
            Formula::and(Formula::mu("X", Formula::var("X")), x()),
            Formula::not(Formula::and(x(), x())),
            Formula::and(x(), Formula::not(Formula::nu("Y", Formula::and(Formula::var("Y"), x())))),
            Formula::or(Formula::and(x(), Formula::nu("Y", Formula::var("Y"))), x()),
        ];
        let expected = [
            "(f | f) & f",
            "f | (f | f)",
            "f & (f & f)",
            "(mu X. X) & f",
            "~(f & f)",
            "f & ~nu Y. Y & f",
            "f & (nu Y. Y) | f",
        ];
        for (f, e) in cases.iter().zip(expected) {
            assert_eq!(print(f, &sig(), 1), e);
            assert_eq!(&parse(e, &sig(), 1).unwrap(), f);
        }
    }

    #[test]
    fn lifted_names_at_arity_one() {
        let lifted = sig().lift(2).unwrap();
        let f = Formula::diamond("rst@1", 0, Formula::color("f@0", 0));
        assert_eq!(print(&f, &lifted, 1), "<rst@1>f@0");
        assert_eq!(print_raw(&f), "<rst@1@0>f@0@0");
        assert_eq!(parse(&print_raw(&f), &lifted, 1).unwrap(), f);
    }
}
