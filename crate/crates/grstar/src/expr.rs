//! Expression language for elements of the graded algebra.
//!
//! Grammar: letters `X1..Xl`; infix `*` is the ⋆ product and `.` is the
//! • product; `+`, `-` and rational literals `p/q`; `cup` and `cup^r`
//! (•-powers, `cup^0 = 1`, negative powers are 0); `adj(e)` for the
//! involution; `Z(Xi)` for the normalized Z vector of a letter; parentheses.
//! Precedence: function forms and `^` bind tightest, then `.`, then `*`,
//! then `+`/`-`. Whitespace is ignored.
//!
//! The two product symbols are deliberately distinct: the source notation
//! overloads one symbol for both products, which is exactly the ambiguity an
//! expression language must not have.

use std::fmt;
use std::str::FromStr;

use grstar_core::ncpoly::{Context, GrElement};
use grstar_core::scalars::{FieldScalar, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Literal(Rational),
    Letter(u8),
    Star(Box<Expr>, Box<Expr>),
    Bullet(Box<Expr>, Box<Expr>),
    Sum(Box<Expr>, Box<Expr>),
    Diff(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Involution(Box<Expr>),
    Cup,
    CupPow(i64),
    ZOf(u8),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.pos, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Rat(Rational),
    Letter(u8),
    Cup,
    Adj,
    Z,
    Star,
    Dot,
    Plus,
    Minus,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            '.' => {
                out.push((i, Tok::Dot));
                i += 1;
            }
            '+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            '^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let mut text = &src[start..i];
                // rational literal p/q
                if i < bytes.len() && bytes[i] == b'/' {
                    let mut j = i + 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    if j == i + 1 {
                        return Err(ParseError {
                            pos: i,
                            message: "expected denominator digits after '/'".into(),
                        });
                    }
                    text = &src[start..j];
                    i = j;
                }
                let q = Rational::from_str(text).map_err(|e| ParseError {
                    pos: start,
                    message: format!("bad rational literal: {e}"),
                })?;
                out.push((start, Tok::Rat(q)));
            }
            'X' | 'x' => {
                let start = i;
                i += 1;
                let ds = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if ds == i {
                    return Err(ParseError {
                        pos: start,
                        message: "expected letter index after 'X'".into(),
                    });
                }
                let idx: u32 = src[ds..i].parse().map_err(|_| ParseError {
                    pos: ds,
                    message: "letter index too large".into(),
                })?;
                if idx == 0 || idx > u8::MAX as u32 {
                    return Err(ParseError {
                        pos: ds,
                        message: "letter index out of range".into(),
                    });
                }
                out.push((start, Tok::Letter(idx as u8)));
            }
            _ => {
                let rest = &src[i..];
                if let Some(r) = rest.strip_prefix("cup") {
                    let _ = r;
                    out.push((i, Tok::Cup));
                    i += 3;
                } else if rest.starts_with("adj") {
                    out.push((i, Tok::Adj));
                    i += 3;
                } else if rest.starts_with('Z') {
                    out.push((i, Tok::Z));
                    i += 1;
                } else {
                    return Err(ParseError {
                        pos: i,
                        message: format!("unexpected character '{c}'"),
                    });
                }
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    end: usize,
    letters: u8,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(ParseError {
                pos: self.here(),
                message: format!("expected {what}"),
            })
        }
    }

    fn check_letter(&self, pos: usize, i: u8) -> Result<u8, ParseError> {
        if i == 0 || i > self.letters {
            Err(ParseError {
                pos,
                message: format!("letter X{} out of range (l = {})", i, self.letters),
            })
        } else {
            Ok(i)
        }
    }

    // expr := ['-'] term (('+' | '-') term)*
    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = Expr::Sum(Box::new(acc), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = Expr::Diff(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    // term := factor ('*' factor)*
    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            acc = Expr::Star(Box::new(acc), Box::new(self.factor()?));
        }
        Ok(acc)
    }

    // factor := atom ('.' atom)*
    fn factor(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.atom()?;
        while self.peek() == Some(&Tok::Dot) {
            self.pos += 1;
            acc = Expr::Bullet(Box::new(acc), Box::new(self.atom()?));
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Rat(q)) => Ok(Expr::Literal(q)),
            Some(Tok::Letter(i)) => Ok(Expr::Letter(self.check_letter(pos, i)?)),
            Some(Tok::Cup) => {
                if self.peek() == Some(&Tok::Caret) {
                    self.pos += 1;
                    let neg = if self.peek() == Some(&Tok::Minus) {
                        self.pos += 1;
                        true
                    } else {
                        false
                    };
                    let ppos = self.here();
                    match self.bump() {
                        Some(Tok::Rat(q)) if q.is_integer() => {
                            let r: i64 = q.to_integer().try_into().map_err(|_| ParseError {
                                pos: ppos,
                                message: "cup power too large".into(),
                            })?;
                            Ok(Expr::CupPow(if neg { -r } else { r }))
                        }
                        _ => Err(ParseError {
                            pos: ppos,
                            message: "expected integer cup power".into(),
                        }),
                    }
                } else {
                    Ok(Expr::Cup)
                }
            }
            Some(Tok::Adj) => {
                self.expect(Tok::LParen, "'(' after adj")?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Expr::Involution(Box::new(inner)))
            }
            Some(Tok::Z) => {
                self.expect(Tok::LParen, "'(' after Z")?;
                let lpos = self.here();
                match self.bump() {
                    Some(Tok::Letter(i)) => {
                        let i = self.check_letter(lpos, i)?;
                        self.expect(Tok::RParen, "')'")?;
                        Ok(Expr::ZOf(i))
                    }
                    _ => Err(ParseError {
                        pos: lpos,
                        message: "Z takes a letter argument".into(),
                    }),
                }
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            _ => Err(ParseError {
                pos,
                message: "expected an expression".into(),
            }),
        }
    }
}

/// Parses an expression, validating letter indices against `letters`.
pub fn parse(src: &str, letters: u8) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        end: src.len(),
        letters,
    };
    let e = p.expr()?;
    if p.pos != toks.len() {
        return Err(ParseError {
            pos: p.here(),
            message: "trailing input".into(),
        });
    }
    Ok(e)
}

/// Canonical printing; `parse(print(e))` is the identity on ASTs built from
/// the grammar's canonical forms.
pub fn print(e: &Expr) -> String {
    // precedence levels: 0 sums, 1 star, 2 bullet, 3 atoms
    fn go(e: &Expr, out: &mut String, level: u8) {
        let mine = match e {
            Expr::Sum(..) | Expr::Diff(..) | Expr::Neg(..) => 0,
            Expr::Star(..) => 1,
            Expr::Bullet(..) => 2,
            _ => 3,
        };
        let need_parens = mine < level;
        if need_parens {
            out.push('(');
        }
        match e {
            Expr::Literal(q) => out.push_str(&q.to_string()),
            Expr::Letter(i) => out.push_str(&format!("X{i}")),
            Expr::Star(a, b) => {
                go(a, out, 1);
                out.push_str(" * ");
                go(b, out, 2);
            }
            Expr::Bullet(a, b) => {
                go(a, out, 2);
                out.push('.');
                go(b, out, 3);
            }
            Expr::Sum(a, b) => {
                go(a, out, 0);
                out.push_str(" + ");
                go(b, out, 1);
            }
            Expr::Diff(a, b) => {
                go(a, out, 0);
                out.push_str(" - ");
                go(b, out, 1);
            }
            Expr::Neg(a) => {
                out.push('-');
                go(a, out, 1);
            }
            Expr::Involution(a) => {
                out.push_str("adj(");
                go(a, out, 0);
                out.push(')');
            }
            Expr::Cup => out.push_str("cup"),
            Expr::CupPow(r) => out.push_str(&format!("cup^{r}")),
            Expr::ZOf(i) => out.push_str(&format!("Z(X{i})")),
        }
        if need_parens {
            out.push(')');
        }
    }
    let mut s = String::new();
    go(e, &mut s, 0);
    s
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalError(pub String);

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for EvalError {}

/// Evaluates an expression to a graded element.
pub fn eval(e: &Expr, ctx: &Context) -> Result<GrElement, EvalError> {
    match e {
        Expr::Literal(q) => Ok(&GrElement::one(ctx) * &FieldScalar::from_rational(ctx.scalars(), q.clone())),
        Expr::Letter(i) => GrElement::letter(ctx, *i).map_err(|e| EvalError(e.to_string())),
        Expr::Star(a, b) => Ok(eval(a, ctx)?.star(&eval(b, ctx)?)),
        Expr::Bullet(a, b) => Ok(eval(a, ctx)?.bullet(&eval(b, ctx)?)),
        Expr::Sum(a, b) => Ok(&eval(a, ctx)? + &eval(b, ctx)?),
        Expr::Diff(a, b) => Ok(&eval(a, ctx)? - &eval(b, ctx)?),
        Expr::Neg(a) => Ok(-&eval(a, ctx)?),
        Expr::Involution(a) => Ok(eval(a, ctx)?.involution()),
        Expr::Cup => Ok(GrElement::cup(ctx)),
        Expr::CupPow(r) => Ok(GrElement::cup_pow(ctx, *r)),
        Expr::ZOf(i) => {
            let b = GrElement::letter(ctx, *i).map_err(|e| EvalError(e.to_string()))?;
            let (zt, _) = grstar_core::ncpoly::z_vector(&b).map_err(|e| EvalError(e.to_string()))?;
            let norm = FieldScalar::sqrt_delta_minus_inv(ctx.scalars());
            let inv = norm
                .inv()
                .map_err(|_| EvalError("Z undefined at delta = 1".into()))?;
            Ok(&zt * &inv)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use grstar_core::ncpoly::Word;

    #[test]
    fn parses_intro_example() {
        let ctx = Context::new(3);
        let e = parse("X1.X2.X3 * X3.X2", 3).unwrap();
        let v = eval(&e, &ctx).unwrap();
        let mut expect = GrElement::word(&ctx, Word::new(vec![1, 2, 3, 3, 2]));
        expect += &GrElement::word(&ctx, Word::new(vec![1, 2, 2]));
        expect += &GrElement::word(&ctx, Word::new(vec![1]));
        assert_eq!(v, expect);
    }

    #[test]
    fn cup_powers_and_adj() {
        let ctx = Context::new(2);
        assert_eq!(
            eval(&parse("cup^0", 2).unwrap(), &ctx).unwrap(),
            GrElement::one(&ctx)
        );
        assert!(eval(&parse("cup^-1", 2).unwrap(), &ctx).unwrap().is_zero());
        assert_eq!(
            eval(&parse("cup^2", 2).unwrap(), &ctx).unwrap(),
            GrElement::cup_pow(&ctx, 2)
        );
        assert_eq!(
            eval(&parse("adj(X1.X2)", 2).unwrap(), &ctx).unwrap(),
            GrElement::word(&ctx, Word::new(vec![2, 1]))
        );
    }

    #[test]
    fn precedence_dot_tighter_than_star() {
        let ctx = Context::new(2);
        let a = eval(&parse("X1.X1 * X2.X2", 2).unwrap(), &ctx).unwrap();
        let direct = GrElement::word(&ctx, Word::new(vec![1, 1]))
            .star(&GrElement::word(&ctx, Word::new(vec![2, 2])));
        assert_eq!(a, direct);
        let b = eval(&parse("1/2 * cup + X1 - X1", 2).unwrap(), &ctx).unwrap();
        let half_cup = eval(&parse("1/2*cup", 2).unwrap(), &ctx).unwrap();
        assert_eq!(b, half_cup);
    }

    #[test]
    fn z_of_letter_is_unit() {
        let ctx = Context::new(2);
        let z = eval(&parse("Z(X1)", 2).unwrap(), &ctx).unwrap();
        assert!(z.norm_sq().is_one());
    }

    #[test]
    fn errors_carry_positions() {
        assert!(parse("X0", 2).is_err());
        assert!(parse("X3", 2).is_err());
        let e = parse("X1 * ", 2).unwrap_err();
        assert_eq!(e.pos, 5);
        assert!(parse("cup^x", 2).is_err());
        assert!(parse("X1 X2", 2).is_err());
        assert!(parse("1/", 2).is_err());
    }

    #[test]
    fn print_parse_round_trip_manual() {
        for src in [
            "X1 * X2 + cup^3 - adj(X1.X2)",
            "Z(X1).cup",
            "1/2 * (X1 + X2)",
            "-X1 + 3/4",
        ] {
            let e = parse(src, 2).unwrap();
            let printed = print(&e);
            let e2 = parse(&printed, 2).unwrap();
            assert_eq!(e, e2, "{} -> {}", src, printed);
        }
    }
}
