//! Expressions over Thompson's group F.
//!
//! ```text
//! query  := expr | characters(expr) | in-npq(expr, p, q) | eval(expr, x)
//! expr   := factor ('*'? factor)*          composition; the right factor acts first
//! factor := atom ('^' int)?
//! atom   := A | B | sigma | id | (expr) | [(x,y), ...]
//!         | inverse(expr) | compose(expr, expr) | comm(expr, expr) | i0(expr) | i1(expr)
//! ```
//!
//! Breakpoint literals use the same notation the tool prints.

use anyhow::{anyhow, bail, Result};
use grouptk::thompson::{
    commutator, compose, embed_i0, embed_i1, inverse, power, standard_a, standard_b, standard_sigma, Dyadic,
    DyadicPL,
};

#[derive(Debug)]
pub enum Query {
    Element(DyadicPL),
    Characters(DyadicPL),
    InNpq(DyadicPL, i64, i64),
    Eval(DyadicPL, Dyadic),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

pub fn parse_query(src: &str) -> Result<Query> {
    let mut p = Parser { src, pos: 0 };
    let q = p.query()?;
    p.skip_ws();
    if p.pos != src.len() {
        bail!("unexpected input at column {}: {:?}", p.pos + 1, &src[p.pos..]);
    }
    Ok(q)
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(anyhow!("expected {c:?} at column {}", self.pos + 1))
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let mut end = 0;
        for (i, c) in rest.char_indices() {
            let ok = if i == 0 { c.is_ascii_alphabetic() } else { c.is_ascii_alphanumeric() || c == '_' || c == '-' };
            if !ok {
                break;
            }
            end = i + c.len_utf8();
        }
        (end > 0).then(|| {
            self.pos += end;
            rest[..end].to_string()
        })
    }

    /// A run of characters that may form a number or dyadic literal.
    fn number_text(&mut self) -> Result<&str> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let len = rest
            .char_indices()
            .find(|&(i, c)| !(c.is_ascii_digit() || c == '/' || c == '^' || (i == 0 && c == '-')))
            .map_or(rest.len(), |(i, _)| i);
        if len == 0 {
            bail!("expected a number at column {}", start + 1);
        }
        self.pos += len;
        Ok(&rest[..len])
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let len = rest
            .char_indices()
            .find(|&(i, c)| !(c.is_ascii_digit() || (i == 0 && c == '-')))
            .map_or(rest.len(), |(i, _)| i);
        self.pos += len;
        rest[..len].parse().map_err(|_| anyhow!("expected an integer at column {}", start + 1))
    }

    fn dyadic(&mut self) -> Result<Dyadic> {
        let col = self.pos + 1;
        let text = self.number_text()?;
        text.parse().map_err(|e| anyhow!("column {col}: {e}"))
    }

    fn query(&mut self) -> Result<Query> {
        let save = self.pos;
        match self.ident().as_deref() {
            Some("characters") => {
                self.expect('(')?;
                let f = self.expr()?;
                self.expect(')')?;
                Ok(Query::Characters(f))
            }
            Some("in-npq") => {
                self.expect('(')?;
                let f = self.expr()?;
                self.expect(',')?;
                let p = self.int()?;
                self.expect(',')?;
                let q = self.int()?;
                self.expect(')')?;
                Ok(Query::InNpq(f, p, q))
            }
            Some("eval") => {
                self.expect('(')?;
                let f = self.expr()?;
                self.expect(',')?;
                let x = self.dyadic()?;
                self.expect(')')?;
                Ok(Query::Eval(f, x))
            }
            _ => {
                self.pos = save;
                Ok(Query::Element(self.expr()?))
            }
        }
    }

    fn expr(&mut self) -> Result<DyadicPL> {
        let mut acc = self.factor()?;
        loop {
            self.eat('*');
            self.skip_ws();
            match self.peek() {
                Some(c) if c.is_ascii_alphabetic() || c == '(' || c == '[' => {
                    let next = self.factor()?;
                    acc = compose(&acc, &next);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<DyadicPL> {
        let base = self.atom()?;
        if self.eat('^') {
            let k = self.int()?;
            return Ok(power(&base, k));
        }
        Ok(base)
    }

    fn unary(&mut self, f: fn(&DyadicPL) -> DyadicPL) -> Result<DyadicPL> {
        self.expect('(')?;
        let x = self.expr()?;
        self.expect(')')?;
        Ok(f(&x))
    }

    fn binary(&mut self, f: fn(&DyadicPL, &DyadicPL) -> DyadicPL) -> Result<DyadicPL> {
        self.expect('(')?;
        let x = self.expr()?;
        self.expect(',')?;
        let y = self.expr()?;
        self.expect(')')?;
        Ok(f(&x, &y))
    }

    fn atom(&mut self) -> Result<DyadicPL> {
        if self.eat('(') {
            let x = self.expr()?;
            self.expect(')')?;
            return Ok(x);
        }
        if self.eat('[') {
            let mut points = Vec::new();
            loop {
                self.expect('(')?;
                let x = self.dyadic()?;
                self.expect(',')?;
                let y = self.dyadic()?;
                self.expect(')')?;
                points.push((x, y));
                if !self.eat(',') {
                    break;
                }
            }
            self.expect(']')?;
            return DyadicPL::new(points).map_err(|e| anyhow!("breakpoint literal: {e}"));
        }
        let col = self.pos + 1;
        match self.ident().as_deref() {
            Some("A") => Ok(standard_a()),
            Some("B") => Ok(standard_b()),
            Some("sigma") => Ok(standard_sigma()),
            Some("id") => Ok(DyadicPL::identity()),
            Some("inverse") => self.unary(inverse),
            Some("i0") => self.unary(embed_i0),
            Some("i1") => self.unary(embed_i1),
            Some("compose") => self.binary(compose),
            Some("comm") => self.binary(commutator),
            Some(other) => bail!("unknown name {other:?} at column {col}"),
            None => bail!("expected an element at column {col}"),
        }
    }
}
