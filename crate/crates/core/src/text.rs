//! Concrete syntax: parser and pretty-printer.
//!
//! ```text
//! process   := sum ("|" sum)*
//! sum       := postfixed ("+" postfixed)*
//! postfixed := prefixed ("\" name)*
//! prefixed  := "0" | "ok" | guard "." prefixed | "[" name "=" name "]" prefixed
//!            | "new" name ("," name)* "." prefixed | "!" prefixed
//!            | name "[" process? "]" | "(" process ")"
//! guard     := subject "(" name ")" | subject "(" name "in" "{" names "}" ")"
//!            | subject "!" "<" name ">" | "tau" | ("in"|"out"|"open") name
//!            | "(" name ")" | "<" name ">"
//! subject   := name ("*" name)*  |  "(" name ("*" name)* ")"
//! name      := ident ("#" digits)?
//! ```
//!
//! Outputs and capabilities without a `.` continuation are sugar for `.0`.
//! Success is spelled `ok`.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{ensure_well_formed, Error, Result};
use crate::syntax::{CalculusId, ChannelSubject, Name, Process};

const KEYWORDS: [&str; 6] = ["new", "tau", "in", "out", "open", "ok"];

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Indexed(String, u32),
    Zero,
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, column);
        let err = |message: String| Error::Syntax { line: tl, column: tc, message };
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let ident: String = chars[start..i].iter().collect();
            let tok = if i < chars.len() && chars[i] == '#' {
                let dstart = i + 1;
                let mut j = dstart;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j == dstart {
                    return Err(err(format!("expected digits after '{ident}#'")));
                }
                let digits: String = chars[dstart..j].iter().collect();
                let idx = digits.parse().map_err(|_| err(format!("index {digits} out of range")))?;
                i = j;
                Tok::Indexed(ident, idx)
            } else {
                Tok::Ident(ident)
            };
            column += i - start;
            out.push(Token { tok, line: tl, column: tc });
            continue;
        }
        if c == '0' {
            if i + 1 < chars.len() && chars[i + 1].is_ascii_alphanumeric() {
                return Err(err("names may not start with a digit".into()));
            }
            out.push(Token { tok: Tok::Zero, line: tl, column: tc });
            i += 1;
            column += 1;
            continue;
        }
        if "|+\\.[]=(),!<>*{}".contains(c) {
            out.push(Token { tok: Tok::Sym(c), line: tl, column: tc });
            i += 1;
            column += 1;
            continue;
        }
        return Err(err(format!("unexpected character '{c}'")));
    }
    out.push(Token { tok: Tok::End, line, column });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = &self.toks[self.pos];
        Err(Error::Syntax { line: t.line, column: t.column, message: message.into() })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, c: char) -> bool {
        *self.peek() == Tok::Sym(c)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.is_sym(c) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected '{c}', found {}", describe(self.peek())))
        }
    }

    fn is_name_at(&self, k: usize) -> bool {
        match self.peek_at(k) {
            Tok::Ident(s) => !KEYWORDS.contains(&s.as_str()),
            Tok::Indexed(..) => true,
            _ => false,
        }
    }

    fn name(&mut self) -> Result<Name> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(Name::new(&s))
            }
            Tok::Indexed(s, i) => {
                self.bump();
                Ok(Name::indexed(&s, i))
            }
            t => self.error(format!("expected a name, found {}", describe(&t))),
        }
    }

    fn process(&mut self) -> Result<Process> {
        let mut p = self.sum()?;
        while self.is_sym('|') {
            self.bump();
            p = Process::par(p, self.sum()?);
        }
        Ok(p)
    }

    fn sum(&mut self) -> Result<Process> {
        let mut p = self.postfixed()?;
        while self.is_sym('+') {
            self.bump();
            p = Process::sum(p, self.postfixed()?);
        }
        Ok(p)
    }

    fn postfixed(&mut self) -> Result<Process> {
        let mut p = self.prefixed()?;
        while self.is_sym('\\') {
            self.bump();
            p = Process::block(p, self.name()?);
        }
        Ok(p)
    }

    fn continuation(&mut self) -> Result<Process> {
        self.expect('.')?;
        self.prefixed()
    }

    fn optional_continuation(&mut self) -> Result<Process> {
        if self.is_sym('.') {
            self.continuation()
        } else {
            Ok(Process::Nil)
        }
    }

    fn prefixed(&mut self) -> Result<Process> {
        match self.peek().clone() {
            Tok::Zero => {
                self.bump();
                Ok(Process::Nil)
            }
            Tok::Ident(kw) if kw == "ok" => {
                self.bump();
                Ok(Process::Success)
            }
            Tok::Ident(kw) if kw == "tau" => {
                self.bump();
                Ok(Process::tau(self.continuation()?))
            }
            Tok::Ident(kw) if kw == "new" => {
                self.bump();
                let mut binders = vec![self.name()?];
                while self.is_sym(',') {
                    self.bump();
                    binders.push(self.name()?);
                }
                let body = self.continuation()?;
                Ok(Process::restrict_all(binders, body))
            }
            Tok::Ident(kw) if kw == "in" || kw == "out" || kw == "open" => {
                self.bump();
                let n = self.name()?;
                let cont = Box::new(self.optional_continuation()?);
                Ok(match kw.as_str() {
                    "in" => Process::CapIn(n, cont),
                    "out" => Process::CapOut(n, cont),
                    _ => Process::CapOpen(n, cont),
                })
            }
            Tok::Sym('[') => {
                self.bump();
                let a = self.name()?;
                self.expect('=')?;
                let b = self.name()?;
                self.expect(']')?;
                Ok(Process::matching(a, b, self.prefixed()?))
            }
            Tok::Sym('!') => {
                self.bump();
                Ok(Process::repl(self.prefixed()?))
            }
            Tok::Sym('<') => {
                self.bump();
                let y = self.name()?;
                self.expect('>')?;
                Ok(Process::AnonOutput(y))
            }
            Tok::Sym('(') => self.paren(),
            Tok::Ident(_) | Tok::Indexed(..) if self.is_name_at(0) => {
                if *self.peek_at(1) == Tok::Sym('[') {
                    let n = self.name()?;
                    self.bump();
                    let body = if self.is_sym(']') { Process::Nil } else { self.process()? };
                    self.expect(']')?;
                    return Ok(Process::ambient(n, body));
                }
                let mut parts = vec![self.name()?];
                while self.is_sym('*') {
                    self.bump();
                    parts.push(self.name()?);
                }
                self.guard_rest(ChannelSubject(parts))
            }
            t => self.error(format!("expected a process, found {}", describe(&t))),
        }
    }

    fn paren(&mut self) -> Result<Process> {
        // "(" is ambiguous: anonymous input, parenthesised subject, or grouping.
        let name_then = |p: &Parser, c: char| p.is_name_at(1) && *p.peek_at(2) == Tok::Sym(c);
        if name_then(self, ')') && *self.peek_at(3) == Tok::Sym('.') {
            self.bump();
            let z = self.name()?;
            self.expect(')')?;
            return Ok(Process::AnonInput(z, Box::new(self.continuation()?)));
        }
        let subject_follows = matches!(self.peek_at(3), Tok::Sym('(') | Tok::Sym('!'));
        if name_then(self, '*') || (name_then(self, ')') && subject_follows) {
            self.bump();
            let mut parts = vec![self.name()?];
            while self.is_sym('*') {
                self.bump();
                parts.push(self.name()?);
            }
            self.expect(')')?;
            return self.guard_rest(ChannelSubject(parts));
        }
        self.bump();
        let p = self.process()?;
        self.expect(')')?;
        Ok(p)
    }

    fn guard_rest(&mut self, subject: ChannelSubject) -> Result<Process> {
        if self.is_sym('(') {
            self.bump();
            let x = self.name()?;
            if self.is_kw("in") {
                self.bump();
                self.expect('{')?;
                let mut allowed = BTreeSet::new();
                if !self.is_sym('}') {
                    allowed.insert(self.name()?);
                    while self.is_sym(',') {
                        self.bump();
                        allowed.insert(self.name()?);
                    }
                }
                self.expect('}')?;
                self.expect(')')?;
                let cont = self.continuation()?;
                return Ok(Process::SelectiveInput(subject, x, allowed, Box::new(cont)));
            }
            self.expect(')')?;
            return Ok(Process::input(subject, x, self.continuation()?));
        }
        if self.is_sym('!') {
            self.bump();
            self.expect('<')?;
            let y = self.name()?;
            self.expect('>')?;
            let cont = self.optional_continuation()?;
            return Ok(Process::output(subject, y, cont));
        }
        self.error(format!("expected '(' or '!' after channel subject, found {}", describe(self.peek())))
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Indexed(s, i) => format!("'{s}#{i}'"),
        Tok::Zero => "'0'".into(),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::End => "end of input".into(),
    }
}

/// Parse without a calculus check. Holes are not expressible.
pub fn parse_process(text: &str) -> Result<Process> {
    let mut parser = Parser { toks: lex(text)?, pos: 0 };
    let p = parser.process()?;
    if *parser.peek() != Tok::End {
        return parser.error(format!("unexpected {} after process", describe(parser.peek())));
    }
    Ok(p)
}

/// Parse and check that every constructor is admitted by `calc`.
pub fn parse_term(text: &str, calc: CalculusId) -> Result<Process> {
    let p = parse_process(text)?;
    ensure_well_formed(&p, calc)?;
    Ok(p)
}

pub fn format_term(p: &Process) -> String {
    p.to_string()
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(f, self, Level::Process)
    }
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Level {
    Process,
    Sum,
    Postfixed,
    Prefixed,
}

fn write_subject(f: &mut fmt::Formatter<'_>, s: &ChannelSubject) -> fmt::Result {
    if s.len() == 1 {
        return write!(f, "{}", s.parts()[0]);
    }
    f.write_str("(")?;
    for (i, n) in s.parts().iter().enumerate() {
        if i > 0 {
            f.write_str("*")?;
        }
        write!(f, "{n}")?;
    }
    f.write_str(")")
}

fn write_at(f: &mut fmt::Formatter<'_>, p: &Process, at: Level) -> fmt::Result {
    use Process::*;
    let needs = match p {
        Par(..) => Level::Process,
        Sum(..) => Level::Sum,
        Block(..) => Level::Postfixed,
        _ => Level::Prefixed,
    };
    if at > needs {
        f.write_str("(")?;
        write_at(f, p, needs)?;
        return f.write_str(")");
    }
    match p {
        Nil => f.write_str("0"),
        Success => f.write_str("ok"),
        Hole(i) => write!(f, "[·]{i}"),
        Par(l, r) => {
            write_at(f, l, Level::Process)?;
            f.write_str(" | ")?;
            write_at(f, r, Level::Sum)
        }
        Sum(l, r) => {
            write_at(f, l, Level::Sum)?;
            f.write_str(" + ")?;
            write_at(f, r, Level::Postfixed)
        }
        Block(body, n) => {
            write_at(f, body, Level::Postfixed)?;
            write!(f, "\\{n}")
        }
        Input(s, x, c) => {
            write_subject(f, s)?;
            write!(f, "({x}).")?;
            write_at(f, c, Level::Prefixed)
        }
        SelectiveInput(s, x, allowed, c) => {
            write_subject(f, s)?;
            write!(f, "({x} in {{")?;
            for (i, n) in allowed.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{n}")?;
            }
            f.write_str("}).")?;
            write_at(f, c, Level::Prefixed)
        }
        Output(s, y, c) => {
            write_subject(f, s)?;
            write!(f, "!<{y}>.")?;
            write_at(f, c, Level::Prefixed)
        }
        Tau(c) => {
            f.write_str("tau.")?;
            write_at(f, c, Level::Prefixed)
        }
        Match(a, b, c) => {
            write!(f, "[{a}={b}]")?;
            write_at(f, c, Level::Prefixed)
        }
        Restrict(..) => {
            let mut binders = Vec::new();
            let mut body = p;
            while let Restrict(z, inner) = body {
                binders.push(z.to_string());
                body = inner;
            }
            write!(f, "new {}.", binders.join(","))?;
            write_at(f, body, Level::Prefixed)
        }
        Repl(c) => {
            f.write_str("!")?;
            write_at(f, c, Level::Prefixed)
        }
        Ambient(n, c) => {
            write!(f, "{n}[")?;
            if **c != Nil {
                write_at(f, c, Level::Process)?;
            }
            f.write_str("]")
        }
        CapIn(n, c) | CapOut(n, c) | CapOpen(n, c) => {
            let kw = match p {
                CapIn(..) => "in",
                CapOut(..) => "out",
                _ => "open",
            };
            write!(f, "{kw} {n}.")?;
            write_at(f, c, Level::Prefixed)
        }
        AnonInput(z, c) => {
            write!(f, "({z}).")?;
            write_at(f, c, Level::Prefixed)
        }
        AnonOutput(y) => write!(f, "<{y}>"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::alpha_eq;

    fn n(s: &str) -> Name {
        Name::new(s)
    }

    #[test]
    fn parses_parallel_io() {
        let p = parse_term("a!<b>.0 | a(x).ok", CalculusId::Pix).unwrap();
        let expected = Process::par(
            Process::output(n("a"), n("b"), Process::Nil),
            Process::input(n("a"), n("x"), Process::Success),
        );
        assert_eq!(p, expected);
    }

    #[test]
    fn unterminated_match_is_a_syntax_error() {
        assert!(matches!(parse_term("[a=b", CalculusId::Pi), Err(Error::Syntax { .. })));
    }

    #[test]
    fn composite_subject_outside_poly_is_ill_formed() {
        let err = parse_term("x*a(z).ok", CalculusId::Pix).unwrap_err();
        assert!(matches!(err, Error::IllFormed { calculus: CalculusId::Pix, .. }), "{err}");
        assert!(parse_term("x*a(z).ok", CalculusId::PiPoly).is_ok());
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse_process("a!<b>.0 |\n  a(x).").unwrap_err();
        assert_eq!(err, Error::Syntax { line: 2, column: 8, message: "expected a process, found end of input".into() });
    }

    #[test]
    fn prints_basic_forms() {
        assert_eq!(Process::tau(Process::Success).to_string(), "tau.ok");
        assert_eq!(Process::matching(n("a"), n("b"), Process::Success).to_string(), "[a=b]ok");
    }

    #[test]
    fn precedence() {
        let p = parse_process("a!<b> + tau.0 | c(x).ok\\c").unwrap();
        let expected = Process::par(
            Process::sum(Process::output(n("a"), n("b"), Process::Nil), Process::tau(Process::Nil)),
            Process::block(Process::input(n("c"), n("x"), Process::Success), n("c")),
        );
        assert_eq!(p, expected);
        let q = parse_process("new a.x!<a>.0 | x(b).ok").unwrap();
        assert!(matches!(q, Process::Par(..)));
    }

    #[test]
    fn variant_syntax_round_trips() {
        for text in [
            "new x.((x*b)!<y>.0 | (x*a)(z).ok)",
            "new x.(x!<a>.0 | x(y in {b}).ok)",
            "new x,y.(x[open a.y[out x.0] | b[]] | open y.open x.ok)",
            "(a!<y>.0 | b(z).0)\\a\\b",
            "m[in n.0 | (z).<z>] | n[]",
            "!(tau.0) + [a=a](ok | 0)",
            "a#2(b#1).b#1!<a#2>.0",
        ] {
            let p = parse_process(text).unwrap();
            let printed = format_term(&p);
            let q = parse_process(&printed).unwrap();
            assert!(alpha_eq(&p, &q), "{text} -> {printed}");
        }
    }

    #[test]
    fn polyadic_match_clause_prints_as_expected() {
        let p = parse_term("new x.((x*b)!<y> | (x*a)(z).ok)", CalculusId::PiPoly).unwrap();
        assert_eq!(format_term(&p), "new x.((x*b)!<y>.0 | (x*a)(z).ok)");
    }

    #[test]
    fn keywords_are_not_names() {
        assert!(parse_process("new(x).0").is_err());
        assert!(parse_process("ok!<a>").is_err());
    }
}
