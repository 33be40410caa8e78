//! Concrete syntax: s-expressions, one form per grammar production, plus
//! the sugar forms (expanded at parse time) and world literals.
//!
//! `parse_term(print_term(t)) == t` for every term; printing always emits
//! core forms, never sugar.

use std::fmt;

use num_bigint::BigUint;

use crate::term::{self, ChoiceName, Term};
use crate::world::{Cell, RefWorld, Restriction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("{pos}: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: unknown form `{head}`")]
    UnknownForm { pos: Pos, head: String },
    #[error("{pos}: `{form}` expects {expected}, got {got} argument(s)")]
    Arity {
        pos: Pos,
        form: String,
        expected: &'static str,
        got: usize,
    },
}

fn syntax(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        pos,
        msg: msg.into(),
    }
}

#[derive(Debug, Clone)]
enum SExp {
    Atom(String, Pos),
    List(Vec<SExp>, Pos),
}

struct Lexer<'a> {
    src: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    col: usize,
}

#[derive(Debug)]
enum Token {
    LParen(Pos),
    RParen(Pos),
    Atom(String, Pos),
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            chars: src.char_indices().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<(usize, char)> {
        let next = self.chars.next();
        if let Some((_, c)) = next {
            if c == '\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
        next
    }

    fn next_token(&mut self) -> Result<Option<Token>, ParseError> {
        loop {
            let pos = Pos {
                line: self.line,
                col: self.col,
            };
            match self.chars.peek().copied() {
                None => return Ok(None),
                Some((_, c)) if c.is_whitespace() => {
                    self.bump();
                }
                Some((_, ';')) => {
                    while let Some((_, c)) = self.chars.peek().copied() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some((_, '(')) => {
                    self.bump();
                    return Ok(Some(Token::LParen(pos)));
                }
                Some((_, ')')) => {
                    self.bump();
                    return Ok(Some(Token::RParen(pos)));
                }
                Some((start, c)) => {
                    if c == '(' || c == ')' {
                        unreachable!();
                    }
                    let mut end = start + c.len_utf8();
                    self.bump();
                    while let Some((i, d)) = self.chars.peek().copied() {
                        if d.is_whitespace() || d == '(' || d == ')' || d == ';' {
                            break;
                        }
                        end = i + d.len_utf8();
                        self.bump();
                    }
                    return Ok(Some(Token::Atom(self.src[start..end].to_string(), pos)));
                }
            }
        }
    }
}

fn parse_sexp(src: &str) -> Result<SExp, ParseError> {
    let mut lexer = Lexer::new(src);
    let mut stack: Vec<(Vec<SExp>, Pos)> = Vec::new();
    let mut result: Option<SExp> = None;
    loop {
        let tok = lexer.next_token()?;
        let eof_pos = Pos {
            line: lexer.line,
            col: lexer.col,
        };
        match tok {
            None => {
                if let Some((_, p)) = stack.last() {
                    return Err(syntax(*p, "unclosed `(`"));
                }
                return result.ok_or_else(|| syntax(eof_pos, "empty input"));
            }
            Some(tok) => {
                if result.is_some() && stack.is_empty() {
                    let p = match &tok {
                        Token::LParen(p) | Token::RParen(p) | Token::Atom(_, p) => *p,
                    };
                    return Err(syntax(p, "trailing content after the first form"));
                }
                match tok {
                    Token::LParen(p) => stack.push((Vec::new(), p)),
                    Token::RParen(p) => match stack.pop() {
                        None => return Err(syntax(p, "unexpected `)`")),
                        Some((items, start)) => {
                            let node = SExp::List(items, start);
                            match stack.last_mut() {
                                Some((parent, _)) => parent.push(node),
                                None => result = Some(node),
                            }
                        }
                    },
                    Token::Atom(a, p) => {
                        let node = SExp::Atom(a, p);
                        match stack.last_mut() {
                            Some((parent, _)) => parent.push(node),
                            None => result = Some(node),
                        }
                    }
                }
            }
        }
    }
}

const KEYWORDS: &[&str] = &[
    "lam", "app", "pair", "spread", "inl", "inr", "decide", "num", "succ", "natrec", "fix",
    "let", "star", "name", "read", "choose", "fresh", "ite", "seq", "iflt", "true", "false",
    "pi", "sum", "set", "union", "eq", "univ", "nat", "isect", "qsquash", "noread", "nowrite",
    "pure", "world", "cell",
];

fn ident(atom: &str, pos: Pos) -> Result<String, ParseError> {
    let mut chars = atom.chars();
    let ok_head = chars.next().is_some_and(|c| c.is_alphabetic() || c == '_');
    let ok_rest = atom
        .chars()
        .skip(1)
        .all(|c| c.is_alphanumeric() || c == '_' || c == '\'');
    if !ok_head || !ok_rest {
        return Err(syntax(pos, format!("`{atom}` is not a valid variable name")));
    }
    if KEYWORDS.contains(&atom) {
        return Err(syntax(pos, format!("`{atom}` is a reserved word")));
    }
    Ok(atom.to_string())
}

fn natural(atom: &str, pos: Pos) -> Result<BigUint, ParseError> {
    if atom.is_empty() || !atom.chars().all(|c| c.is_ascii_digit()) {
        return Err(syntax(pos, format!("`{atom}` is not a natural number")));
    }
    atom.parse()
        .map_err(|_| syntax(pos, format!("`{atom}` is not a natural number")))
}

fn small_natural(atom: &str, pos: Pos, what: &str) -> Result<u64, ParseError> {
    if atom.is_empty() || !atom.chars().all(|c| c.is_ascii_digit()) {
        return Err(syntax(pos, format!("`{atom}` is not a natural number")));
    }
    atom.parse()
        .map_err(|_| syntax(pos, format!("{what} `{atom}` does not fit in 64 bits")))
}

fn expect_atom<'s>(e: &'s SExp, what: &str) -> Result<(&'s str, Pos), ParseError> {
    match e {
        SExp::Atom(a, p) => Ok((a, *p)),
        SExp::List(_, p) => Err(syntax(*p, format!("expected {what}, found a list"))),
    }
}

fn arity(
    form: &str,
    pos: Pos,
    args: &[SExp],
    expected: usize,
    desc: &'static str,
) -> Result<(), ParseError> {
    if args.len() != expected {
        return Err(ParseError::Arity {
            pos,
            form: form.to_string(),
            expected: desc,
            got: args.len(),
        });
    }
    Ok(())
}

fn lower(e: &SExp) -> Result<Term, ParseError> {
    match e {
        SExp::Atom(a, p) => match a.as_str() {
            "star" => Ok(Term::Star),
            "true" => Ok(term::btrue()),
            "false" => Ok(term::bfalse()),
            "nat" => Ok(Term::Nat),
            "noread" => Ok(Term::NoRead),
            "nowrite" => Ok(Term::NoWrite),
            "pure" => Ok(Term::Pure),
            _ => Ok(Term::Var(ident(a, *p)?)),
        },
        SExp::List(items, p) => {
            let (head, hpos) = match items.first() {
                Some(h) => expect_atom(h, "a form head")?,
                None => return Err(syntax(*p, "empty form `()`")),
            };
            let args = &items[1..];
            let binder = |e: &SExp| -> Result<String, ParseError> {
                let (a, ap) = expect_atom(e, "a variable")?;
                ident(a, ap)
            };
            match head {
                "lam" => {
                    arity(head, *p, args, 2, "a variable and a body")?;
                    Ok(term::lam(&binder(&args[0])?, lower(&args[1])?))
                }
                "app" => {
                    arity(head, *p, args, 2, "a function and an argument")?;
                    Ok(term::app(lower(&args[0])?, lower(&args[1])?))
                }
                "pair" => {
                    arity(head, *p, args, 2, "two components")?;
                    Ok(term::pair(lower(&args[0])?, lower(&args[1])?))
                }
                "spread" => {
                    arity(head, *p, args, 4, "a scrutinee, two variables and a body")?;
                    Ok(term::spread(
                        lower(&args[0])?,
                        &binder(&args[1])?,
                        &binder(&args[2])?,
                        lower(&args[3])?,
                    ))
                }
                "inl" => {
                    arity(head, *p, args, 1, "one argument")?;
                    Ok(term::inl(lower(&args[0])?))
                }
                "inr" => {
                    arity(head, *p, args, 1, "one argument")?;
                    Ok(term::inr(lower(&args[0])?))
                }
                "decide" => {
                    arity(head, *p, args, 5, "a scrutinee and two variable/branch pairs")?;
                    Ok(term::decide(
                        lower(&args[0])?,
                        &binder(&args[1])?,
                        lower(&args[2])?,
                        &binder(&args[3])?,
                        lower(&args[4])?,
                    ))
                }
                "num" => {
                    arity(head, *p, args, 1, "a numeral")?;
                    let (a, ap) = expect_atom(&args[0], "a numeral")?;
                    Ok(Term::Num(natural(a, ap)?))
                }
                "succ" => {
                    arity(head, *p, args, 1, "one argument")?;
                    Ok(term::succ(lower(&args[0])?))
                }
                "natrec" => {
                    arity(head, *p, args, 3, "a scrutinee, a zero case and a successor case")?;
                    Ok(term::natrec(
                        lower(&args[0])?,
                        lower(&args[1])?,
                        lower(&args[2])?,
                    ))
                }
                "fix" => {
                    arity(head, *p, args, 1, "one argument")?;
                    Ok(term::fix(lower(&args[0])?))
                }
                "let" => {
                    arity(head, *p, args, 3, "a variable, a bound term and a body")?;
                    Ok(term::let_(
                        &binder(&args[0])?,
                        lower(&args[1])?,
                        lower(&args[2])?,
                    ))
                }
                "name" => {
                    arity(head, *p, args, 1, "a choice-name id")?;
                    let (a, ap) = expect_atom(&args[0], "a choice-name id")?;
                    Ok(Term::Name(ChoiceName(small_natural(a, ap, "choice name")?)))
                }
                "read" => {
                    arity(head, *p, args, 1, "one argument")?;
                    Ok(term::read(lower(&args[0])?))
                }
                "choose" => {
                    arity(head, *p, args, 2, "a target and a value")?;
                    Ok(term::choose(lower(&args[0])?, lower(&args[1])?))
                }
                "fresh" => {
                    arity(head, *p, args, 2, "a variable and a body")?;
                    Ok(term::fresh(&binder(&args[0])?, lower(&args[1])?))
                }
                // sugar, expanded here
                "ite" => {
                    arity(head, *p, args, 3, "a condition and two branches")?;
                    Ok(term::ite(lower(&args[0])?, lower(&args[1])?, lower(&args[2])?))
                }
                "seq" => {
                    arity(head, *p, args, 2, "two terms")?;
                    Ok(term::seq(lower(&args[0])?, lower(&args[1])?))
                }
                "iflt" => {
                    arity(head, *p, args, 4, "two numbers and two branches")?;
                    Ok(term::iflt(
                        lower(&args[0])?,
                        lower(&args[1])?,
                        lower(&args[2])?,
                        lower(&args[3])?,
                    ))
                }
                // type constructors
                "pi" | "sum" | "set" => {
                    arity(head, *p, args, 3, "a variable, a domain and a codomain")?;
                    let x = binder(&args[0])?;
                    let dom = Box::new(lower(&args[1])?);
                    let cod = Box::new(lower(&args[2])?);
                    Ok(match head {
                        "pi" => Term::Pi { x, dom, cod },
                        "sum" => Term::Sum { x, dom, cod },
                        _ => Term::Set { x, dom, cod },
                    })
                }
                "union" => {
                    arity(head, *p, args, 2, "two types")?;
                    Ok(Term::Union(
                        Box::new(lower(&args[0])?),
                        Box::new(lower(&args[1])?),
                    ))
                }
                "isect" => {
                    arity(head, *p, args, 2, "two types")?;
                    Ok(Term::Isect(
                        Box::new(lower(&args[0])?),
                        Box::new(lower(&args[1])?),
                    ))
                }
                "eq" => {
                    arity(head, *p, args, 3, "a type and two terms")?;
                    Ok(Term::Eq {
                        ty: Box::new(lower(&args[0])?),
                        lhs: Box::new(lower(&args[1])?),
                        rhs: Box::new(lower(&args[2])?),
                    })
                }
                "univ" => {
                    arity(head, *p, args, 1, "a level")?;
                    let (a, ap) = expect_atom(&args[0], "a level")?;
                    Ok(Term::Universe(small_natural(a, ap, "universe level")?))
                }
                "qsquash" => {
                    arity(head, *p, args, 1, "a type")?;
                    Ok(Term::QSquash(Box::new(lower(&args[0])?)))
                }
                _ => Err(ParseError::UnknownForm {
                    pos: hpos,
                    head: head.to_string(),
                }),
            }
        }
    }
}

/// Parse a single term.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    lower(&parse_sexp(src)?)
}

/// Parse a world literal: `(world (cell <name> nat <value> [<mutable>]) ...)`.
/// The mutability flag defaults to `true`.
pub fn parse_world(src: &str) -> Result<RefWorld, ParseError> {
    let e = parse_sexp(src)?;
    let (items, pos) = match &e {
        SExp::List(items, p) => (items, *p),
        SExp::Atom(_, p) => return Err(syntax(*p, "expected `(world ...)`")),
    };
    match items.first() {
        Some(h) if matches!(expect_atom(h, "")?, ("world", _)) => {}
        _ => return Err(syntax(pos, "expected `(world ...)`")),
    }
    let mut cells = Vec::new();
    for item in &items[1..] {
        let (fields, cpos) = match item {
            SExp::List(fields, p) => (fields, *p),
            SExp::Atom(_, p) => return Err(syntax(*p, "expected `(cell ...)`")),
        };
        match fields.first() {
            Some(h) if matches!(expect_atom(h, "")?, ("cell", _)) => {}
            _ => return Err(syntax(cpos, "expected `(cell ...)`")),
        }
        let args = &fields[1..];
        if args.len() != 3 && args.len() != 4 {
            return Err(ParseError::Arity {
                pos: cpos,
                form: "cell".to_string(),
                expected: "a name, a restriction, a value and an optional mutability flag",
                got: args.len(),
            });
        }
        let (id, idp) = expect_atom(&args[0], "a cell name")?;
        let name = ChoiceName(small_natural(id, idp, "cell name")?);
        let (r, rp) = expect_atom(&args[1], "a restriction")?;
        let restriction = match r {
            "nat" => Restriction::NatOnly,
            other => return Err(syntax(rp, format!("unknown restriction `{other}`"))),
        };
        let (v, vp) = expect_atom(&args[2], "a value")?;
        let value = natural(v, vp)?;
        let mutable = match args.get(3) {
            None => true,
            Some(a) => {
                let (m, mp) = expect_atom(a, "a mutability flag")?;
                match m {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(syntax(mp, format!("expected true/false, got `{other}`")))
                    }
                }
            }
        };
        cells.push(Cell {
            name,
            restriction,
            value,
            mutable,
        });
    }
    RefWorld::from_cells(cells).map_err(|e| syntax(pos, e.to_string()))
}

/// Canonical core-form printing; the inverse of `parse_term` up to sugar.
pub fn print_term(t: &Term) -> String {
    let mut s = String::new();
    write_term(&mut s, t);
    s
}

fn write_term(out: &mut String, t: &Term) {
    use std::fmt::Write;
    match t {
        Term::Var(x) => out.push_str(x),
        Term::Lam(x, b) => {
            write!(out, "(lam {x} ").unwrap();
            write_term(out, b);
            out.push(')');
        }
        Term::App(f, a) => write2(out, "app", f, a),
        Term::Pair(a, b) => write2(out, "pair", a, b),
        Term::Spread { scrut, x, y, body } => {
            out.push_str("(spread ");
            write_term(out, scrut);
            write!(out, " {x} {y} ").unwrap();
            write_term(out, body);
            out.push(')');
        }
        Term::Inl(t) => write1(out, "inl", t),
        Term::Inr(t) => write1(out, "inr", t),
        Term::Decide {
            scrut,
            x,
            left,
            y,
            right,
        } => {
            out.push_str("(decide ");
            write_term(out, scrut);
            write!(out, " {x} ").unwrap();
            write_term(out, left);
            write!(out, " {y} ").unwrap();
            write_term(out, right);
            out.push(')');
        }
        Term::Num(n) => write!(out, "(num {n})").unwrap(),
        Term::Succ(t) => write1(out, "succ", t),
        Term::NatRec { scrut, zero, succ } => {
            out.push_str("(natrec ");
            write_term(out, scrut);
            out.push(' ');
            write_term(out, zero);
            out.push(' ');
            write_term(out, succ);
            out.push(')');
        }
        Term::Fix(t) => write1(out, "fix", t),
        Term::Let { x, bound, body } => {
            write!(out, "(let {x} ").unwrap();
            write_term(out, bound);
            out.push(' ');
            write_term(out, body);
            out.push(')');
        }
        Term::Star => out.push_str("star"),
        Term::Name(k) => write!(out, "(name {k})").unwrap(),
        Term::Read(t) => write1(out, "read", t),
        Term::Choose { target, value } => write2(out, "choose", target, value),
        Term::Fresh { x, body } => {
            write!(out, "(fresh {x} ").unwrap();
            write_term(out, body);
            out.push(')');
        }
        Term::Pi { x, dom, cod } => write_binder_ty(out, "pi", x, dom, cod),
        Term::Sum { x, dom, cod } => write_binder_ty(out, "sum", x, dom, cod),
        Term::Set { x, dom, cod } => write_binder_ty(out, "set", x, dom, cod),
        Term::Union(a, b) => write2(out, "union", a, b),
        Term::Isect(a, b) => write2(out, "isect", a, b),
        Term::Eq { ty, lhs, rhs } => {
            out.push_str("(eq ");
            write_term(out, ty);
            out.push(' ');
            write_term(out, lhs);
            out.push(' ');
            write_term(out, rhs);
            out.push(')');
        }
        Term::Universe(i) => write!(out, "(univ {i})").unwrap(),
        Term::Nat => out.push_str("nat"),
        Term::QSquash(t) => write1(out, "qsquash", t),
        Term::NoRead => out.push_str("noread"),
        Term::NoWrite => out.push_str("nowrite"),
        Term::Pure => out.push_str("pure"),
    }
}

fn write1(out: &mut String, head: &str, a: &Term) {
    out.push('(');
    out.push_str(head);
    out.push(' ');
    write_term(out, a);
    out.push(')');
}

fn write2(out: &mut String, head: &str, a: &Term, b: &Term) {
    out.push('(');
    out.push_str(head);
    out.push(' ');
    write_term(out, a);
    out.push(' ');
    write_term(out, b);
    out.push(')');
}

fn write_binder_ty(out: &mut String, head: &str, x: &str, dom: &Term, cod: &Term) {
    use std::fmt::Write;
    write!(out, "({head} {x} ").unwrap();
    write_term(out, dom);
    out.push(' ');
    write_term(out, cod);
    out.push(')');
}

pub fn print_world(w: &RefWorld) -> String {
    use std::fmt::Write;
    let mut s = String::from("(world");
    for c in &w.cells {
        write!(
            s,
            " (cell {} nat {} {})",
            c.name,
            c.value,
            if c.mutable { "true" } else { "false" }
        )
        .unwrap();
    }
    s.push(')');
    s
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::*;

    #[test]
    fn parses_application_of_identity() {
        let t = parse_term("(app (lam x x) (num 0))").unwrap();
        assert_eq!(t, app(lam("x", var("x")), num(0)));
    }

    #[test]
    fn iflt_expands_to_ite_of_lt() {
        let t = parse_term("(iflt (read (name 0)) (num 1) (num 0) (num 1))").unwrap();
        let expected = iflt(read(name(0)), num(1), num(0), num(1));
        assert_eq!(t, expected);
        assert!(matches!(t, Term::Decide { .. }));
    }

    #[test]
    fn booleans_expand_to_injections() {
        assert_eq!(parse_term("true").unwrap(), btrue());
        assert_eq!(parse_term("false").unwrap(), bfalse());
    }

    #[test]
    fn every_production_round_trips() {
        let samples = [
            "(lam x x)",
            "(app f x)",
            "(pair (num 1) star)",
            "(spread p a b (app a b))",
            "(inl star)",
            "(inr (num 2))",
            "(decide s x x y y)",
            "(num 12345678901234567890123456789)",
            "(succ (num 0))",
            "(natrec (num 2) (num 0) (lam m (lam r m)))",
            "(fix (lam x x))",
            "(let x (num 1) (succ x))",
            "star",
            "(name 7)",
            "(read (name 7))",
            "(choose (name 7) (num 3))",
            "(fresh x (read x))",
            "(pi x nat nat)",
            "(sum x nat (univ 1))",
            "(set x nat x)",
            "(union nat nat)",
            "(eq nat (num 0) (num 1))",
            "(univ 3)",
            "nat",
            "(isect nat noread)",
            "(qsquash nat)",
            "noread",
            "nowrite",
            "pure",
        ];
        for s in samples {
            let t = parse_term(s).unwrap();
            let printed = print_term(&t);
            let back = parse_term(&printed).unwrap();
            assert_eq!(t, back, "round-trip failed for {s}");
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_term("(app (lam x x)") {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos.line, 1),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(matches!(
            parse_term("(frobnicate x)"),
            Err(ParseError::UnknownForm { .. })
        ));
        assert!(matches!(
            parse_term("(lam x)"),
            Err(ParseError::Arity { .. })
        ));
        assert!(parse_term("(lam lam x)").is_err());
        assert!(parse_term("(num -1)").is_err());
        assert!(parse_term("%probe").is_err());
    }

    #[test]
    fn world_literals() {
        let w = parse_world("(world (cell 0 nat 3 true) (cell 1 nat 0 false))").unwrap();
        assert_eq!(w.cells.len(), 2);
        assert!(!w.cells[1].mutable);
        assert_eq!(parse_world(&print_world(&w)).unwrap(), w);

        let d = parse_world("(world (cell 4 nat 9))").unwrap();
        assert!(d.cells[0].mutable);

        assert!(parse_world("(world (cell 0 nat 1) (cell 0 nat 2))").is_err());
        assert!(parse_world("(world (cell 0 bool 1))").is_err());
    }

    #[test]
    fn comments_and_whitespace() {
        let t = parse_term("; a program\n(app (lam x x)\n  (num 0)) ; done").unwrap();
        assert_eq!(t, app(lam("x", var("x")), num(0)));
    }
}
