//! Pretty-printer producing text that parses back to the same term.

use crate::term::Term;

// Precedence levels, loosest first. An operand is parenthesized when its own
// level is below the level its position requires.
const TOP: u8 = 0;
const OR: u8 = 1;
const AND: u8 = 2;
const CMP: u8 = 3;
const ADD: u8 = 4;
const MUL: u8 = 5;
const APP: u8 = 6;
const POSTFIX: u8 = 7;
const ATOM: u8 = 8;

fn infix_level(op: &str) -> Option<u8> {
    Some(match op {
        "or" => OR,
        "and" => AND,
        ">" | "<" | "==" => CMP,
        "+" | "-" => ADD,
        "*" | "/" => MUL,
        _ => return None,
    })
}

/// Renders a term in concrete syntax.
pub fn pretty(t: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, t, TOP);
    out
}

fn level_of(t: &Term) -> u8 {
    match t {
        Term::Abs(..) | Term::Let(..) | Term::LetEv(..) | Term::LetRec(..) | Term::Cond(..) => TOP,
        Term::App(..) => match binary_op(t) {
            Some((op, _, _)) => infix_level(op).unwrap(),
            None => APP,
        },
        Term::Select(..) => POSTFIX,
        _ => ATOM,
    }
}

/// `App(App(Var op, a), b)` for an infix operator `op`.
fn binary_op(t: &Term) -> Option<(&str, &Term, &Term)> {
    if let Term::App(f, b) = t {
        if let Term::App(g, a) = &**f {
            if let Term::Var(op) = &**g {
                if infix_level(op).is_some() {
                    return Some((op.as_str(), a, b));
                }
            }
        }
    }
    None
}

fn write_term(out: &mut String, t: &Term, need: u8) {
    let own = level_of(t);
    if own < need {
        out.push('(');
        write_bare(out, t);
        out.push(')');
    } else {
        write_bare(out, t);
    }
}

fn write_bare(out: &mut String, t: &Term) {
    match t {
        Term::Const(l) => out.push_str(&l.to_string()),
        Term::Var(x) => {
            if infix_level(x).is_some() {
                out.push('(');
                out.push_str(x);
                out.push(')');
            } else {
                out.push_str(x);
            }
        }
        Term::App(f, a) => {
            if let Some((op, l, r)) = binary_op(t) {
                let lvl = infix_level(op).unwrap();
                // Comparisons do not associate; the others associate left.
                let left_need = if lvl == CMP { CMP + 1 } else { lvl };
                write_term(out, l, left_need);
                out.push(' ');
                out.push_str(op);
                out.push(' ');
                write_term(out, r, lvl + 1);
            } else {
                write_term(out, f, APP);
                out.push(' ');
                write_term(out, a, POSTFIX);
            }
        }
        Term::Abs(..) => {
            let mut params = Vec::new();
            let mut body = t;
            while let Term::Abs(x, b) = body {
                params.push(x.as_str());
                body = b;
            }
            out.push('λ');
            out.push_str(&params.join(" "));
            out.push_str(". ");
            write_term(out, body, TOP);
        }
        Term::Cond(g, a, b) => {
            out.push_str("if ");
            write_term(out, g, TOP);
            out.push_str(" then ");
            write_term(out, a, TOP);
            out.push_str(" else ");
            write_term(out, b, TOP);
        }
        Term::Let(x, m, n) => write_let(out, "let", x, m, n),
        Term::LetEv(x, m, n) => write_let(out, "letEv", x, m, n),
        Term::LetRec(x, m, n) => write_let(out, "letrec", x, m, n),
        Term::Record(fields) => {
            if let [(l1, a), (l2, b)] = fields.as_slice() {
                if l1 == "fst" && l2 == "snd" {
                    out.push('(');
                    write_term(out, a, TOP);
                    out.push_str(", ");
                    write_term(out, b, TOP);
                    out.push(')');
                    return;
                }
            }
            out.push('{');
            for (i, (l, v)) in fields.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(l);
                out.push_str(" = ");
                write_term(out, v, TOP);
            }
            out.push('}');
        }
        Term::Select(m, l) => {
            write_term(out, m, POSTFIX);
            out.push('.');
            out.push_str(l);
        }
        Term::Modify(m, l, n) => {
            out.push_str("modify(");
            write_term(out, m, TOP);
            out.push_str(", ");
            out.push_str(l);
            out.push_str(", ");
            write_term(out, n, TOP);
            out.push(')');
        }
        Term::Fix(f, x, body) => {
            out.push_str("(letrec ");
            out.push_str(f);
            out.push_str(" = λ");
            out.push_str(x);
            out.push_str(". ");
            write_term(out, body, TOP);
            out.push_str(" in ");
            out.push_str(f);
            out.push(')');
        }
    }
}

fn write_let(out: &mut String, kw: &str, x: &str, m: &Term, n: &Term) {
    out.push_str(kw);
    out.push(' ');
    out.push_str(x);
    let mut bound = m;
    while let Term::Abs(p, b) = bound {
        out.push(' ');
        out.push_str(p);
        bound = b;
    }
    out.push_str(" = ");
    write_term(out, bound, TOP);
    out.push_str(" in ");
    write_term(out, n, TOP);
}
