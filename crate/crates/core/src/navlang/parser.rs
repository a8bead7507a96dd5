//! Recursive-descent parser for navigational expressions.
//!
//! ```text
//! expr := alt
//! alt  := seq ('|' seq)*
//! seq  := post ('/' post)*
//! post := atom ('*' | '+' | '?' | '{' m (',' n)? '}')*
//! atom := label | '_' | '[' key '=' value ']' | '(' expr ')'
//! ```
//!
//! Labels, keys and values are bare words or single-quoted strings with
//! backslash escapes. Whitespace between tokens is ignored.

use super::ast::{is_word_char, NavExpression, MAX_REPEAT};
use crate::error::{Error, Result};

pub fn parse(src: &str) -> Result<NavExpression> {
    let mut p = Parser { src, pos: 0 };
    let e = p.alt()?;
    p.skip_ws();
    if let Some(c) = p.peek() {
        return Err(Error::syntax(p.pos, format!("unexpected `{c}`")));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn eat(&mut self, want: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(want) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, want: char) -> Result<()> {
        if self.eat(want) {
            return Ok(());
        }
        Err(match self.peek() {
            Some(c) => Error::syntax(self.pos, format!("expected `{want}`, found `{c}`")),
            None => Error::syntax(self.pos, format!("expected `{want}`, found end of input")),
        })
    }

    fn alt(&mut self) -> Result<NavExpression> {
        let mut e = self.seq()?;
        while self.eat('|') {
            e = NavExpression::alt(e, self.seq()?);
        }
        Ok(e)
    }

    fn seq(&mut self) -> Result<NavExpression> {
        let mut e = self.post()?;
        while self.eat('/') {
            e = NavExpression::concat(e, self.post()?);
        }
        Ok(e)
    }

    fn post(&mut self) -> Result<NavExpression> {
        let mut e = self.atom()?;
        loop {
            self.skip_ws();
            e = match self.peek() {
                Some('*') => {
                    self.bump();
                    NavExpression::star(e)
                }
                Some('+') => {
                    self.bump();
                    NavExpression::plus(e)
                }
                Some('?') => {
                    self.bump();
                    NavExpression::optional(e)
                }
                Some('{') => {
                    let start = self.pos;
                    self.bump();
                    let min = self.number()?;
                    let max = if self.eat(',') { self.number()? } else { min };
                    self.expect('}')?;
                    if min > max || max > MAX_REPEAT {
                        return Err(Error::syntax(
                            start,
                            format!("repetition bounds {{{min},{max}}} must satisfy 0 <= min <= max <= {MAX_REPEAT}"),
                        ));
                    }
                    NavExpression::repeat(e, min, max)
                }
                _ => return Ok(e),
            };
        }
    }

    fn number(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        if start == self.pos {
            return Err(Error::syntax(start, "expected a number"));
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| Error::syntax(start, "repetition bound out of range"))
    }

    fn atom(&mut self) -> Result<NavExpression> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some('(') => {
                self.bump();
                let e = self.alt()?;
                self.expect(')')?;
                Ok(e)
            }
            Some('[') => {
                self.bump();
                let key = self.word()?;
                self.expect('=')?;
                let value = self.word()?;
                self.expect(']')?;
                if key.is_empty() || value.is_empty() {
                    return Err(Error::syntax(
                        start,
                        "node test key and value must be non-empty",
                    ));
                }
                Ok(NavExpression::NodeTest(key, value))
            }
            Some('\'') => Ok(NavExpression::Label(self.quoted()?)),
            Some(c) if is_word_char(c) => {
                let w = self.bare();
                if w == "_" {
                    Ok(NavExpression::AnyLabel)
                } else {
                    Ok(NavExpression::Label(w))
                }
            }
            Some(c) => Err(Error::syntax(start, format!("unexpected `{c}`"))),
            None => Err(Error::syntax(start, "unexpected end of input")),
        }
    }

    fn word(&mut self) -> Result<String> {
        self.skip_ws();
        match self.peek() {
            Some('\'') => self.quoted(),
            Some(c) if is_word_char(c) => Ok(self.bare()),
            Some(c) => Err(Error::syntax(self.pos, format!("unexpected `{c}`"))),
            None => Err(Error::syntax(self.pos, "unexpected end of input")),
        }
    }

    fn bare(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(is_word_char) {
            self.bump();
        }
        self.src[start..self.pos].to_owned()
    }

    fn quoted(&mut self) -> Result<String> {
        let start = self.pos;
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('\'') => return Ok(out),
                Some('\\') => match self.bump() {
                    Some(c) => out.push(c),
                    None => break,
                },
                Some(c) => out.push(c),
                None => break,
            }
        }
        Err(Error::syntax(start, "unterminated quoted string"))
    }
}
