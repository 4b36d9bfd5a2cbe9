//! Tiny expression grammar for relation lists on the command line:
//! integer literals, the generator `a`, `+`, `-`, `*`, `^`, parentheses,
//! and juxtaposition as multiplication (so `2a^2` parses as 2 * a^2).
//! Exponentiation binds tightest, then multiplication, then sums.

use theta_engine::rings::{CoeffElem, CoeffRingSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Token {
    Int(i128),
    A,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<Token>, String> {
    let mut tokens = Vec::new();
    let mut chars = src.chars().peekable();
    while let Some(&ch) = chars.peek() {
        match ch {
            c if c.is_whitespace() => {
                chars.next();
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        digits.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let v: i128 = digits
                    .parse()
                    .map_err(|_| format!("integer literal `{digits}` is out of range"))?;
                tokens.push(Token::Int(v));
            }
            'a' => {
                chars.next();
                tokens.push(Token::A);
            }
            '+' => {
                chars.next();
                tokens.push(Token::Plus);
            }
            '-' => {
                chars.next();
                tokens.push(Token::Minus);
            }
            '*' => {
                chars.next();
                tokens.push(Token::Star);
            }
            '^' => {
                chars.next();
                tokens.push(Token::Caret);
            }
            '(' => {
                chars.next();
                tokens.push(Token::LParen);
            }
            ')' => {
                chars.next();
                tokens.push(Token::RParen);
            }
            other => return Err(format!("unexpected character `{other}`")),
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    spec: CoeffRingSpec,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<Token> {
        self.tokens.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.peek();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<CoeffElem, String> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.next();
                    acc = acc.add(&self.term()?);
                }
                Some(Token::Minus) => {
                    self.next();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<CoeffElem, String> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.next();
                    acc = acc.mul(&self.unary()?);
                }
                // Juxtaposition: a factor starting right after another one
                // multiplies, so `2a^2` and `2(1 + a)` need no `*`.
                Some(Token::Int(_)) | Some(Token::A) | Some(Token::LParen) => {
                    acc = acc.mul(&self.unary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<CoeffElem, String> {
        if self.peek() == Some(Token::Minus) {
            self.next();
            return Ok(self.unary()?.neg());
        }
        let base = self.atom()?;
        if self.peek() == Some(Token::Caret) {
            self.next();
            match self.next() {
                Some(Token::Int(e)) if (0..=1_000_000).contains(&e) => {
                    return Ok(base.pow(e as usize));
                }
                Some(Token::Int(e)) => {
                    return Err(format!("exponent {e} is out of range"));
                }
                _ => return Err("`^` must be followed by an integer exponent".into()),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<CoeffElem, String> {
        match self.next() {
            Some(Token::Int(v)) => Ok(CoeffElem::from_int(self.spec, v)),
            Some(Token::A) => Ok(CoeffElem::a_power(self.spec, 1)),
            Some(Token::LParen) => {
                let e = self.expr()?;
                if self.next() != Some(Token::RParen) {
                    return Err("missing `)`".into());
                }
                Ok(e)
            }
            Some(t) => Err(format!("unexpected token {t:?}")),
            None => Err("unexpected end of expression".into()),
        }
    }
}

/// Parse one relation expression into a coefficient-ring element.
pub fn parse_relation(src: &str, spec: CoeffRingSpec) -> Result<CoeffElem, String> {
    let tokens = lex(src)?;
    if tokens.is_empty() {
        return Err("empty expression".into());
    }
    let mut p = Parser { tokens: &tokens, pos: 0, spec };
    let e = p.expr()?;
    if p.pos != tokens.len() {
        return Err(format!("trailing input after position {}", p.pos));
    }
    Ok(e)
}

#[cfg(test)]
mod test {
    use super::*;

    fn spec() -> CoeffRingSpec {
        CoeffRingSpec::new(2, 8, 8).unwrap()
    }

    #[test]
    fn literals_and_monomials() {
        let s = spec();
        assert_eq!(parse_relation("4", s).unwrap(), CoeffElem::from_int(s, 4));
        assert_eq!(parse_relation("a", s).unwrap(), CoeffElem::a_power(s, 1));
        assert_eq!(
            parse_relation("2a^2", s).unwrap(),
            CoeffElem::monomial(s, 2, 2)
        );
        assert_eq!(
            parse_relation("2 * a ^ 2", s).unwrap(),
            CoeffElem::monomial(s, 2, 2)
        );
    }

    #[test]
    fn sums_differences_parens() {
        let s = spec();
        assert_eq!(
            parse_relation("2 + a^3", s).unwrap(),
            CoeffElem::from_int(s, 2).add(&CoeffElem::a_power(s, 3))
        );
        assert_eq!(
            parse_relation("(1 + a)^2 - 2a", s).unwrap(),
            CoeffElem::from_int(s, 1).add(&CoeffElem::a_power(s, 2))
        );
        assert_eq!(parse_relation("-2", s).unwrap(), CoeffElem::from_int(s, -2));
    }

    #[test]
    fn display_round_trips() {
        let s = spec();
        for e in [
            CoeffElem::from_int(s, 5),
            CoeffElem::monomial(s, 2, 2),
            CoeffElem::from_coeff_list(s, &[2, 0, 0, 1]),
            CoeffElem::from_coeff_list(s, &[0, 3, 0, 0, 0, 7]),
        ] {
            let shown = e.to_string();
            assert_eq!(parse_relation(&shown, s).unwrap(), e, "round trip of {shown}");
        }
    }

    #[test]
    fn rejects_malformed_input() {
        let s = spec();
        for bad in ["", "4 +", "b", "a^a", "(2", "2)", "^3", "99999999999999999999999999999999999999999"] {
            assert!(parse_relation(bad, s).is_err(), "must reject {bad:?}");
        }
    }
}
