//! Interpretations files and the mapping sidecar.
//!
//! An interpretations file is a sequence of ground Prolog-style facts. Each
//! example is delimited by `begin(model(Id)).` and `end(model(Id)).`; facts
//! outside any block are background knowledge shared by every example.
//! `%` starts a comment.
//!
//! ```text
//! begin(model(m1)).
//! atom(m1, a1, c, 22).
//! bond(m1, a1, a2, 7).
//! end(model(m1)).
//! ```

use std::fs;
use std::path::Path;

use tic_core::dataset::{MappedAttribute, MappedKind};
use tic_core::{Constant, FactMapping, GroundFact, Role};

use crate::error::{Result, TicError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Atom(String),
    Var(String),
    Num(f64),
    Open,
    Close,
    Comma,
    Dot,
}

#[derive(Debug, Clone, PartialEq)]
enum PTerm {
    Const(Constant),
    Var(String),
    Compound(String, Vec<PTerm>),
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

pub(crate) fn syntax(path: &Path, line: usize, column: usize, message: impl Into<String>) -> TicError {
    TicError::Syntax { path: path.to_path_buf(), line, column, message: message.into() }
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0, line: 1, col: 1 }
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek_char()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_blank(&mut self) {
        while let Some(c) = self.peek_char() {
            if c == '%' {
                while self.peek_char().is_some_and(|c| c != '\n') {
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    /// Next token with its line and column, or `None` at end of input.
    fn next(&mut self, path: &Path) -> Result<Option<(Tok, usize, usize)>> {
        self.skip_blank();
        let (line, col) = (self.line, self.col);
        let Some(c) = self.peek_char() else { return Ok(None) };
        let tok = match c {
            '(' => {
                self.bump();
                Tok::Open
            }
            ')' => {
                self.bump();
                Tok::Close
            }
            ',' => {
                self.bump();
                Tok::Comma
            }
            '.' => {
                self.bump();
                Tok::Dot
            }
            '\'' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        Some('\'') if self.peek_char() == Some('\'') => {
                            self.bump();
                            s.push('\'');
                        }
                        Some('\'') => break,
                        Some(c) => s.push(c),
                        None => return Err(syntax(path, line, col, "unterminated quoted atom")),
                    }
                }
                Tok::Atom(s)
            }
            c if c.is_ascii_digit() || c == '-' || c == '+' => {
                let start = self.pos;
                self.bump();
                while let Some(c) = self.peek_char() {
                    let exp_sign =
                        (c == '-' || c == '+') && matches!(self.src[..self.pos].chars().last(), Some('e' | 'E'));
                    // a dot only continues a number when a digit follows
                    let frac = c == '.' && self.src[self.pos + 1..].starts_with(|d: char| d.is_ascii_digit());
                    if c.is_ascii_digit() || c == 'e' || c == 'E' || exp_sign || frac {
                        self.bump();
                    } else {
                        break;
                    }
                }
                let text = &self.src[start..self.pos];
                match text.parse::<f64>() {
                    Ok(x) if x.is_finite() => Tok::Num(x),
                    _ => return Err(syntax(path, line, col, format!("bad number `{text}`"))),
                }
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.peek_char().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                    self.bump();
                }
                let word = self.src[start..self.pos].to_string();
                if c.is_uppercase() || c == '_' {
                    Tok::Var(word)
                } else {
                    Tok::Atom(word)
                }
            }
            other => return Err(syntax(path, line, col, format!("unexpected character `{other}`"))),
        };
        Ok(Some((tok, line, col)))
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    path: &'a Path,
    ahead: Option<(Tok, usize, usize)>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, path: &'a Path) -> Self {
        Parser { lex: Lexer::new(src), path, ahead: None }
    }

    fn peek(&mut self) -> Result<Option<&(Tok, usize, usize)>> {
        if self.ahead.is_none() {
            self.ahead = self.lex.next(self.path)?;
        }
        Ok(self.ahead.as_ref())
    }

    fn take(&mut self) -> Result<Option<(Tok, usize, usize)>> {
        self.peek()?;
        Ok(self.ahead.take())
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        match self.take()? {
            Some((t, _, _)) if t == want => Ok(()),
            Some((t, l, c)) => Err(syntax(self.path, l, c, format!("expected {what}, found {t:?}"))),
            None => Err(syntax(self.path, self.lex.line, self.lex.col, format!("expected {what}, found end of input"))),
        }
    }

    fn term(&mut self) -> Result<PTerm> {
        match self.take()? {
            Some((Tok::Num(x), _, _)) => Ok(PTerm::Const(Constant::Number(x))),
            Some((Tok::Var(v), _, _)) => Ok(PTerm::Var(v)),
            Some((Tok::Atom(a), _, _)) => {
                if matches!(self.peek()?, Some((Tok::Open, _, _))) {
                    self.take()?;
                    let args = self.args()?;
                    Ok(PTerm::Compound(a, args))
                } else {
                    Ok(PTerm::Const(Constant::Symbol(a)))
                }
            }
            Some((t, l, c)) => Err(syntax(self.path, l, c, format!("expected a term, found {t:?}"))),
            None => Err(syntax(self.path, self.lex.line, self.lex.col, "expected a term, found end of input")),
        }
    }

    /// Arguments after an opening parenthesis, through the closing one.
    fn args(&mut self) -> Result<Vec<PTerm>> {
        let mut args = vec![self.term()?];
        loop {
            match self.take()? {
                Some((Tok::Comma, _, _)) => args.push(self.term()?),
                Some((Tok::Close, _, _)) => return Ok(args),
                Some((t, l, c)) => return Err(syntax(self.path, l, c, format!("expected `,` or `)`, found {t:?}"))),
                None => return Err(syntax(self.path, self.lex.line, self.lex.col, "unclosed `(`")),
            }
        }
    }

    /// Next clause with the position it starts at.
    fn clause(&mut self) -> Result<Option<(PTerm, usize, usize)>> {
        let Some(&(_, line, col)) = self.peek()? else { return Ok(None) };
        let t = self.term()?;
        self.expect(Tok::Dot, "`.`")?;
        Ok(Some((t, line, col)))
    }
}

fn model_id(t: &PTerm, marker: &str) -> Option<String> {
    match t {
        PTerm::Compound(f, args) if f == marker && args.len() == 1 => match &args[0] {
            PTerm::Compound(m, inner) if m == "model" && inner.len() == 1 => match &inner[0] {
                PTerm::Const(c) => Some(c.to_string()),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

fn ground(t: PTerm, path: &Path, line: usize, col: usize) -> Result<GroundFact> {
    let (functor, args) = match t {
        PTerm::Const(Constant::Symbol(s)) => (s, Vec::new()),
        PTerm::Compound(f, args) => (f, args),
        _ => return Err(syntax(path, line, col, "a fact must start with an atom")),
    };
    let args = args
        .into_iter()
        .map(|a| match a {
            PTerm::Const(c) => Ok(c),
            PTerm::Var(v) => {
                Err(syntax(path, line, col, format!("fact `{functor}` contains variable {v}; facts must be ground")))
            }
            PTerm::Compound(g, _) => {
                Err(syntax(path, line, col, format!("nested term `{g}(...)` in fact `{functor}`")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GroundFact::new(functor, args))
}

pub type Interpretations = Vec<(String, Vec<GroundFact>)>;

pub fn read_interpretations(path: &Path) -> Result<Interpretations> {
    let text = fs::read_to_string(path).map_err(|e| TicError::io(path, e))?;
    parse_interpretations(&text, path)
}

pub fn parse_interpretations(text: &str, path: &Path) -> Result<Interpretations> {
    let mut p = Parser::new(text, path);
    let mut models: Interpretations = Vec::new();
    let mut background: Vec<GroundFact> = Vec::new();
    let mut open: Option<(String, Vec<GroundFact>, usize, usize)> = None;
    while let Some((t, line, col)) = p.clause()? {
        if let Some(id) = model_id(&t, "begin") {
            if let Some((cur, ..)) = &open {
                return Err(syntax(path, line, col, format!("model `{id}` begins inside model `{cur}`")));
            }
            if models.iter().any(|(m, _)| *m == id) {
                return Err(syntax(path, line, col, format!("model `{id}` defined twice")));
            }
            open = Some((id, Vec::new(), line, col));
        } else if let Some(id) = model_id(&t, "end") {
            match open.take() {
                Some((cur, facts, ..)) if cur == id => models.push((cur, facts)),
                Some((cur, ..)) => return Err(syntax(path, line, col, format!("end of `{id}` closes model `{cur}`"))),
                None => return Err(syntax(path, line, col, format!("end of `{id}` without begin"))),
            }
        } else {
            let fact = ground(t, path, line, col)?;
            match &mut open {
                Some((_, facts, ..)) => facts.push(fact),
                None => background.push(fact),
            }
        }
    }
    if let Some((id, _, line, col)) = open {
        return Err(syntax(path, line, col, format!("model `{id}` is never closed")));
    }
    if !background.is_empty() {
        for (_, facts) in &mut models {
            facts.extend(background.iter().cloned());
        }
    }
    Ok(models)
}

/// Mapping sidecar: one declaration per line,
///
/// ```text
/// attribute logp from logp/2 numeric
/// attribute active from active/2 nominal class
/// ```
///
/// The last argument of the named fact becomes the attribute value. An
/// optional final word sets the role (`class` or `key`).
pub fn read_mapping(path: &Path) -> Result<FactMapping> {
    let text = fs::read_to_string(path).map_err(|e| TicError::io(path, e))?;
    parse_mapping(&text, path)
}

pub fn parse_mapping(text: &str, path: &Path) -> Result<FactMapping> {
    let mut attributes: Vec<MappedAttribute> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('%').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: &str| syntax(path, i + 1, 1, m.to_string());
        let words: Vec<&str> = line.split_whitespace().collect();
        let [kw, name, from, spec, kind, rest @ ..] = words.as_slice() else {
            return Err(err("expected `attribute <name> from <functor>/<arity> <numeric|nominal> [class|key]`"));
        };
        if *kw != "attribute" || *from != "from" || rest.len() > 1 {
            return Err(err("expected `attribute <name> from <functor>/<arity> <numeric|nominal> [class|key]`"));
        }
        let (functor, arity) = spec.rsplit_once('/').ok_or_else(|| err("expected <functor>/<arity>"))?;
        let arity: usize = arity.parse().map_err(|_| err("arity must be a positive integer"))?;
        if arity == 0 {
            return Err(err("arity must be a positive integer"));
        }
        let kind = match *kind {
            "numeric" => MappedKind::Numeric,
            "nominal" => MappedKind::Nominal,
            other => return Err(err(&format!("unknown kind `{other}`"))),
        };
        let role = match rest.first().copied() {
            None => Role::Descriptive,
            Some("class") => Role::Class,
            Some("key") => Role::Key,
            Some(other) => return Err(err(&format!("unknown role `{other}`"))),
        };
        if attributes.iter().any(|a| a.name == *name) {
            return Err(err(&format!("attribute `{name}` declared twice")));
        }
        attributes.push(MappedAttribute { name: name.to_string(), functor: functor.to_string(), arity, kind, role });
    }
    Ok(FactMapping { attributes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Interpretations> {
        parse_interpretations(text, Path::new("i.pl"))
    }

    #[test]
    fn blocks_and_background() {
        let m = parse(
            "% molecules\nelement(c).\nbegin(model(m1)).\natom(a1, c, 22).\nbond(a1,a2,'x y').\nend(model(m1)).\n\
             begin(model(2)). lumo(-1.25e0). end(model(2)).",
        )
        .unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].0, "m1");
        assert_eq!(m[0].1.len(), 3);
        assert_eq!(m[0].1[0].to_string(), "atom(a1,c,22)");
        assert_eq!(m[0].1[1].args[2], Constant::symbol("x y"));
        assert_eq!(m[1].0, "2");
        assert_eq!(m[1].1[0].args[0], Constant::Number(-1.25));
        assert_eq!(m[1].1[1].functor, "element");
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("begin(model(a)).\np(X).\nend(model(a)).").unwrap_err();
        assert!(matches!(e, TicError::Syntax { line: 2, .. }), "{e}");
        assert!(parse("begin(model(a)).\np(1).").is_err());
        assert!(parse("end(model(a)).").is_err());
        assert!(parse("begin(model(a)). end(model(a)). begin(model(a)). end(model(a)).").is_err());
        assert!(parse("begin(model(a)). begin(model(b)).").is_err());
        assert!(parse("p(1)").is_err());
        assert!(parse("p(1,.").is_err());
    }

    #[test]
    fn mapping_lines() {
        let m = parse_mapping(
            "% lifted\nattribute logp from logp/1 numeric\nattribute act from active/1 nominal class\n",
            Path::new("m"),
        )
        .unwrap();
        assert_eq!(m.attributes.len(), 2);
        assert_eq!(m.attributes[1].role, Role::Class);
        assert!(parse_mapping("attribute x from x numeric", Path::new("m")).is_err());
        assert!(parse_mapping("attribute x from x/1 real", Path::new("m")).is_err());
        assert!(parse_mapping("attribute x from x/0 numeric", Path::new("m")).is_err());
    }

    #[test]
    fn lifted_dataset() {
        let models = parse("begin(model(a)). logp(a, 1.5). end(model(a)). begin(model(b)). end(model(b)).").unwrap();
        let map = parse_mapping("attribute logp from logp/2 numeric", Path::new("m")).unwrap();
        let ds = map.lift(models).unwrap();
        assert_eq!(ds.value(0, 0), tic_core::Cell::Number(1.5));
        assert!(ds.value(1, 0).is_missing());
        assert_eq!(ds.example(1).name(), Some("b"));
    }
}
