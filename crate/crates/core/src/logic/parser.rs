//! Recursive-descent parser.
//!
//! ```text
//! iff   := imp ("<->" imp)*
//! imp   := or ("->" imp)?
//! or    := and ("|" and)*
//! and   := unary ("&" unary)*
//! unary := "~" unary | "T" | "F" | "p" digits | "(" iff ")"
//!        | op "(" iff "," iff ")"      op ∈ dia box wbox wdia diaU boxU
//! ```

use super::formula::Formula;
use crate::error::{Error, Result};

pub fn parse(text: &str) -> Result<Formula> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let phi = p.iff()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(phi)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{tok}`")))
        }
    }

    fn iff(&mut self) -> Result<Formula> {
        let mut lhs = self.imp()?;
        while self.eat("<->") {
            let rhs = self.imp()?;
            lhs = lhs.iff(rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula> {
        let lhs = self.or()?;
        if self.eat("->") {
            let rhs = self.imp()?;
            return Ok(lhs.imp(rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut lhs = self.and()?;
        while self.eat("|") {
            lhs = lhs.or(self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.eat("&") {
            lhs = lhs.and(self.unary()?);
        }
        Ok(lhs)
    }

    fn ident(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii")
    }

    fn unary(&mut self) -> Result<Formula> {
        self.skip_ws();
        let start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            return Err(self.error("unexpected end of input"));
        };
        match c {
            b'~' => {
                self.pos += 1;
                Ok(self.unary()?.not())
            }
            b'(' => {
                self.pos += 1;
                let phi = self.iff()?;
                self.expect(")")?;
                Ok(phi)
            }
            c if c.is_ascii_alphabetic() => {
                let word = self.ident().to_string();
                let binary: Option<fn(Formula, Formula) -> Formula> = match word.as_str() {
                    "T" => return Ok(Formula::top()),
                    "F" => return Ok(Formula::bot()),
                    "dia" => Some(Formula::dia),
                    "box" => Some(Formula::boxx),
                    "wbox" => Some(Formula::wbox),
                    "wdia" => Some(Formula::wdia),
                    "diaU" => Some(Formula::dia_u),
                    "boxU" => Some(Formula::box_u),
                    _ => None,
                };
                if let Some(make) = binary {
                    self.expect("(")?;
                    let a = self.iff()?;
                    self.expect(",")?;
                    let b = self.iff()?;
                    self.expect(")")?;
                    return Ok(make(a, b));
                }
                if let Some(digits) = word.strip_prefix('p') {
                    if !digits.is_empty() && digits.bytes().all(|d| d.is_ascii_digit()) {
                        if let Ok(k) = digits.parse::<usize>() {
                            return Ok(Formula::var(k));
                        }
                    }
                }
                self.pos = start;
                Err(self.error(&format!("unknown identifier `{word}`")))
            }
            _ => Err(self.error("expected a formula")),
        }
    }
}
