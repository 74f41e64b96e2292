//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := ("-")? power
//! power  := atom ("^" factor)?
//! atom   := number | "pi" | "e" | "x" | "y" | "z"
//!         | func "(" expr ("," expr)? ")" | "(" expr ")"
//! ```
//!
//! Numbers are decimal literals `12`, `1.5`, `.5`, optionally followed by an
//! exponent `e-3`. An `e` that is not followed by digits ends the literal, so
//! `2e` is a number followed by the constant `e` (a syntax error, since there
//! is no implicit multiplication).

use super::ast::{BinOp, Constant, Expr, Func, Var};
use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::End => "end of input".into(),
    }
}

fn syntax(offset: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        offset,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Tok::Plus, i)),
            b'-' => out.push((Tok::Minus, i)),
            b'*' => out.push((Tok::Star, i)),
            b'/' => out.push((Tok::Slash, i)),
            b'^' => out.push((Tok::Caret, i)),
            b'(' => out.push((Tok::LParen, i)),
            b')' => out.push((Tok::RParen, i)),
            b',' => out.push((Tok::Comma, i)),
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lexeme = &text[start..i];
                let value: f64 = lexeme
                    .parse()
                    .map_err(|_| syntax(start, format!("malformed number `{lexeme}`")))?;
                if !value.is_finite() {
                    return Err(syntax(start, format!("number `{lexeme}` overflows")));
                }
                out.push((Tok::Num(value), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(syntax(i, format!("unexpected character `{ch}`")));
            }
        }
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(
                self.offset(),
                format!(
                    "expected {}, found {}",
                    describe(&want),
                    describe(self.peek())
                ),
            ))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::binary(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::binary(op, lhs, self.factor()?);
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            Ok(Expr::Neg(Box::new(self.power()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.factor()?;
            Ok(Expr::binary(BinOp::Pow, base, exponent))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (tok, offset) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => self.identifier(name, offset),
            other => Err(syntax(
                offset,
                format!("expected an operand, found {}", describe(&other)),
            )),
        }
    }

    fn identifier(&mut self, name: String, offset: usize) -> Result<Expr, ParseError> {
        match name.as_str() {
            "x" => return Ok(Expr::Var(Var::X)),
            "y" => return Ok(Expr::Var(Var::Y)),
            "z" => return Ok(Expr::Var(Var::Z)),
            "pi" => return Ok(Expr::Const(Constant::Pi)),
            "e" => return Ok(Expr::Const(Constant::E)),
            _ => {}
        }
        let func = Func::from_name(&name);
        if func.is_none() && name != "atan2" {
            return Err(ParseError::UnknownIdentifier { name, offset });
        }
        if *self.peek() != Tok::LParen {
            return Err(syntax(
                self.offset(),
                format!("expected `(` after function `{name}`"),
            ));
        }
        self.bump();
        let mut args = vec![self.expr()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.expr()?);
        }
        self.expect(Tok::RParen)?;
        let expected = if func.is_some() { 1 } else { 2 };
        if args.len() != expected {
            return Err(ParseError::Arity {
                func: name,
                expected,
                found: args.len(),
                offset,
            });
        }
        let mut args = args.into_iter();
        let first = Box::new(args.next().unwrap());
        Ok(match func {
            Some(f) => Expr::Call(f, first),
            None => Expr::Atan2(first, Box::new(args.next().unwrap())),
        })
    }
}

/// Parses a scalar expression in `x`, `y`, `z`.
pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    let mut parser = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let expr = parser.expr()?;
    match parser.peek() {
        Tok::End => Ok(expr),
        other => Err(syntax(
            parser.offset(),
            format!("unexpected {}", describe(other)),
        )),
    }
}

/// Splits `a,b,c` at commas that are not nested inside parentheses.
/// Returns the pieces with their byte offsets in `text`.
pub fn split_top_level(text: &str) -> Vec<(&str, usize)> {
    let mut depth = 0i32;
    let mut start = 0;
    let mut parts = Vec::new();
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push((&text[start..i], start));
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push((&text[start..], start));
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse_expression(s).unwrap()
    }

    #[test]
    fn single_function() {
        assert_eq!(
            p("cos(z)"),
            Expr::Call(Func::Cos, Box::new(Expr::Var(Var::Z)))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(p("-x^2"), p("-(x^2)"));
        assert_eq!(p("2^3^2"), p("2^(3^2)"));
        assert_eq!(p("x - y - z"), p("(x - y) - z"));
        assert_eq!(p("x / y * z"), p("(x / y) * z"));
        assert_eq!(p("-x*y"), p("(-x)*y"));
        assert_eq!(p("x^-y"), p("x^(-y)"));
        assert_eq!(p("x + 2*y"), p("x + (2*y)"));
    }

    #[test]
    fn number_forms() {
        assert_eq!(p("1.5e-3"), Expr::Num(1.5e-3));
        assert_eq!(p(".5"), Expr::Num(0.5));
        assert_eq!(p("3E2"), Expr::Num(300.0));
    }

    #[test]
    fn implicit_multiplication_is_rejected() {
        assert!(matches!(
            parse_expression("2x"),
            Err(ParseError::Syntax { offset: 1, .. })
        ));
        assert!(matches!(
            parse_expression("2e"),
            Err(ParseError::Syntax { offset: 1, .. })
        ));
        assert!(matches!(
            parse_expression("x y"),
            Err(ParseError::Syntax { offset: 2, .. })
        ));
    }

    #[test]
    fn error_offsets() {
        assert_eq!(
            parse_expression("x + foo(1)"),
            Err(ParseError::UnknownIdentifier {
                name: "foo".into(),
                offset: 4
            })
        );
        assert!(matches!(
            parse_expression("sin(x, y)"),
            Err(ParseError::Arity {
                expected: 1,
                found: 2,
                offset: 0,
                ..
            })
        ));
        assert!(matches!(
            parse_expression("z*atan2(x)"),
            Err(ParseError::Arity {
                expected: 2,
                found: 1,
                offset: 2,
                ..
            })
        ));
        assert!(matches!(
            parse_expression("(x + 1"),
            Err(ParseError::Syntax { offset: 6, .. })
        ));
        assert!(matches!(
            parse_expression("x $ 1"),
            Err(ParseError::Syntax { offset: 2, .. })
        ));
        assert!(matches!(
            parse_expression("--x"),
            Err(ParseError::Syntax { offset: 1, .. })
        ));
        assert!(matches!(
            parse_expression("sin x"),
            Err(ParseError::Syntax { offset: 4, .. })
        ));
        assert!(matches!(
            parse_expression(""),
            Err(ParseError::Syntax { offset: 0, .. })
        ));
        assert!(matches!(
            parse_expression("1e999"),
            Err(ParseError::Syntax { offset: 0, .. })
        ));
    }

    #[test]
    fn top_level_split_respects_parentheses() {
        let parts: Vec<&str> = split_top_level("atan2(y, x),-sin(z),0")
            .into_iter()
            .map(|(s, _)| s)
            .collect();
        assert_eq!(parts, vec!["atan2(y, x)", "-sin(z)", "0"]);
    }

    #[test]
    fn printing_reparses() {
        for s in [
            "cos(z)",
            "-x^2",
            "(-x)^2",
            "2^3^2",
            "(2^3)^2",
            "x - (y - z)",
            "x / (y * z)",
            "-(-x)",
            "atan2(-y, x)",
            "z*x - y",
            "cos(z + z^3/3)",
            "1e-7*x + pi - e",
            "x^-y^2",
        ] {
            let once = p(s);
            let printed = once.to_string();
            assert_eq!(p(&printed), once, "{s} printed as {printed}");
        }
        assert_eq!(p("(x)*((y))").to_string(), "x*y");
    }
}
