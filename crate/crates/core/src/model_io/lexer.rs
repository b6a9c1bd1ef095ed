use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    /// Unsigned integer literal, kept as text so it can also serve as a name.
    Number(String),
    Sym(&'static str),
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const SYMBOLS: &[&str] = &["->", "{", "}", ":", ";", ",", "*", "=", "+", "-", "/", "(", ")", "|"];

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (ln, line) in src.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && (chars[i].is_alphabetic() || chars[i] == '_') {
                    return Err(Error::Parse { line: ln + 1, col, msg: "names must not start with a digit".into() });
                }
                out.push(Token { tok: Tok::Number(chars[start..i].iter().collect()), line: ln + 1, col });
                continue;
            }
            if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line: ln + 1, col });
                continue;
            }
            let rest: String = chars[i..].iter().take(2).collect();
            match SYMBOLS.iter().find(|s| rest.starts_with(*s)) {
                Some(s) => {
                    out.push(Token { tok: Tok::Sym(s), line: ln + 1, col });
                    i += s.chars().count();
                }
                None => return Err(Error::Parse { line: ln + 1, col, msg: format!("unexpected character {c:?}") }),
            }
        }
    }
    Ok(out)
}

/// Cursor over a token stream with positioned diagnostics.
pub(crate) struct Cursor {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Cursor {
    pub fn new(src: &str) -> Result<Self> {
        let toks = tokenize(src)?;
        let lines = src.lines().count().max(1);
        let last = src.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
        Ok(Self { toks, pos: 0, end: (lines, last) })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn position(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|t| (t.line, t.col)).unwrap_or(self.end)
    }

    pub fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (line, col) = self.position();
        Err(Error::Parse { line, col, msg: msg.into() })
    }

    pub fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    pub fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, sym: &str) -> Result<()> {
        if self.eat(sym) {
            Ok(())
        } else {
            self.error(format!("expected '{sym}'"))
        }
    }

    pub fn keyword(&mut self, kw: &str) -> Result<()> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => self.error(format!("expected '{kw}'")),
        }
    }

    /// A basis name: identifier or bare integer literal such as `1`.
    pub fn name(&mut self) -> Result<(String, (usize, usize))> {
        let at = self.position();
        match self.peek().cloned() {
            Some(Tok::Ident(s)) | Some(Tok::Number(s)) => {
                self.pos += 1;
                Ok((s, at))
            }
            _ => self.error("expected a name"),
        }
    }

    pub fn integer(&mut self) -> Result<i64> {
        let neg = self.eat("-");
        match self.peek().cloned() {
            Some(Tok::Number(s)) => {
                self.pos += 1;
                let v: i64 = s.parse().map_err(|_| crate::error::Error::Parse {
                    line: self.end.0,
                    col: self.end.1,
                    msg: format!("integer out of range: {s}"),
                })?;
                Ok(if neg { -v } else { v })
            }
            _ => self.error("expected an integer"),
        }
    }
}
