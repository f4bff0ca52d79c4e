//! Prefix-notation reader for symbol expressions.
//!
//! ```text
//! expr  := atom | "(" op expr* ")"
//! atom  := number | x | xi | eta | x1 | x2 | xi1 | xi2 | eta1 | eta2
//!        | i | pi | bxi | beta | bxieta
//! op    := + | * | - | / | pow | rpow | exp | sin | cos | ln | step | dstep
//! ```
//! `pow` takes an integer exponent, `rpow` a real one, `dstep` an integer order.

use super::expr::{Bracket, SymbolExpr, Var};
use crate::error::{Error, Result};
use crate::fourier::C64;

#[derive(Clone, Debug)]
struct Token {
    text: String,
    offset: usize,
}

fn tokenize(src: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in src.char_indices() {
        if ch == '(' || ch == ')' || ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: src[s..i].to_string(),
                    offset: s,
                });
            }
            if !ch.is_whitespace() {
                out.push(Token {
                    text: ch.to_string(),
                    offset: i,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: src[s..].to_string(),
            offset: s,
        });
    }
    out
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

fn err(tok: &Token, message: impl Into<String>) -> Error {
    Error::Parse {
        token: tok.text.clone(),
        offset: tok.offset,
        message: message.into(),
    }
}

impl Parser {
    fn next(&mut self) -> Result<Token> {
        let t = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::Parse {
                token: String::new(),
                offset: self.end,
                message: "unexpected end of input".into(),
            })?;
        self.pos += 1;
        Ok(t)
    }

    fn peek_is_close(&self) -> bool {
        self.tokens.get(self.pos).is_some_and(|t| t.text == ")")
    }

    fn expr(&mut self) -> Result<SymbolExpr> {
        let tok = self.next()?;
        match tok.text.as_str() {
            "(" => self.application(),
            ")" => Err(err(&tok, "unexpected closing parenthesis")),
            _ => atom(&tok),
        }
    }

    fn args_until_close(&mut self) -> Result<Vec<SymbolExpr>> {
        let mut args = Vec::new();
        while !self.peek_is_close() {
            args.push(self.expr()?);
        }
        self.pos += 1;
        Ok(args)
    }

    fn number(&mut self) -> Result<(f64, Token)> {
        let tok = self.next()?;
        let v = tok
            .text
            .parse::<f64>()
            .map_err(|_| err(&tok, "expected a number"))?;
        Ok((v, tok))
    }

    fn close(&mut self) -> Result<()> {
        let tok = self.next()?;
        if tok.text == ")" {
            Ok(())
        } else {
            Err(err(&tok, "expected `)`"))
        }
    }

    fn application(&mut self) -> Result<SymbolExpr> {
        let head = self.next()?;
        let unary = |p: &mut Parser, f: fn(&SymbolExpr) -> SymbolExpr| -> Result<SymbolExpr> {
            let a = p.expr()?;
            p.close()?;
            Ok(f(&a))
        };
        match head.text.as_str() {
            "+" => Ok(SymbolExpr::sum(self.args_until_close()?)),
            "*" => Ok(SymbolExpr::product(self.args_until_close()?)),
            "-" => {
                let mut args = self.args_until_close()?;
                match args.len() {
                    0 => Err(err(&head, "`-` needs at least one argument")),
                    1 => Ok(-args.pop().unwrap()),
                    _ => {
                        let first = args.remove(0);
                        Ok(first - SymbolExpr::sum(args))
                    }
                }
            }
            "/" => {
                let args = self.args_until_close()?;
                if args.len() != 2 {
                    return Err(err(&head, "`/` takes exactly two arguments"));
                }
                Ok(args[0].clone() * args[1].powi(-1))
            }
            "pow" => {
                let base = self.expr()?;
                let (k, tok) = self.number()?;
                if k.fract() != 0.0 || k.abs() > 1024.0 {
                    return Err(err(&tok, "`pow` needs an integer exponent"));
                }
                self.close()?;
                Ok(base.powi(k as i32))
            }
            "rpow" => {
                let base = self.expr()?;
                let (r, _) = self.number()?;
                self.close()?;
                Ok(base.powf(r))
            }
            "dstep" => {
                let (k, tok) = self.number()?;
                if k.fract() != 0.0 || !(0.0..=64.0).contains(&k) {
                    return Err(err(&tok, "`dstep` needs a small nonnegative integer order"));
                }
                let a = self.expr()?;
                self.close()?;
                Ok(a.smooth_step_derivative(k as u32))
            }
            "exp" => unary(self, SymbolExpr::exp),
            "sin" => unary(self, SymbolExpr::sin),
            "cos" => unary(self, SymbolExpr::cos),
            "ln" => unary(self, SymbolExpr::ln),
            "step" => unary(self, SymbolExpr::smooth_step),
            _ => Err(err(&head, "unknown operator")),
        }
    }
}

fn atom(tok: &Token) -> Result<SymbolExpr> {
    let e = match tok.text.as_str() {
        "x" | "x1" => SymbolExpr::var(Var::X(0)),
        "x2" => SymbolExpr::var(Var::X(1)),
        "xi" | "xi1" => SymbolExpr::var(Var::Xi(0)),
        "xi2" => SymbolExpr::var(Var::Xi(1)),
        "eta" | "eta1" => SymbolExpr::var(Var::Eta(0)),
        "eta2" => SymbolExpr::var(Var::Eta(1)),
        "i" => SymbolExpr::i(),
        "pi" => SymbolExpr::real(std::f64::consts::PI),
        "bxi" => SymbolExpr::bracket(Bracket::Xi),
        "beta" => SymbolExpr::bracket(Bracket::Eta),
        "bxieta" => SymbolExpr::bracket(Bracket::XiEta),
        text => match text.parse::<f64>() {
            Ok(v) if v.is_finite() => SymbolExpr::constant(C64::new(v, 0.0)),
            _ => return Err(err(tok, "unknown atom")),
        },
    };
    Ok(e)
}

/// Parse a prefix-notation expression.
pub fn parse_expr(src: &str) -> Result<SymbolExpr> {
    let mut p = Parser {
        tokens: tokenize(src),
        pos: 0,
        end: src.len(),
    };
    let e = p.expr()?;
    if let Some(tok) = p.tokens.get(p.pos) {
        return Err(err(tok, "trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::tape::Point;

    fn eval1(src: &str, x: f64, xi: f64, eta: f64) -> C64 {
        parse_expr(src).unwrap().eval(1, &Point::d1(x, xi, eta))
    }

    #[test]
    fn parses_basic_forms() {
        assert_eq!(eval1("(+ 1 2 3)", 0.0, 0.0, 0.0), C64::new(6.0, 0.0));
        assert_eq!(eval1("(* i xi)", 0.0, 2.0, 0.0), C64::new(0.0, 2.0));
        assert_eq!(eval1("(- xi eta)", 0.0, 5.0, 2.0), C64::new(3.0, 0.0));
        assert_eq!(eval1("(- eta)", 0.0, 0.0, 2.0), C64::new(-2.0, 0.0));
        assert!((eval1("(/ 1 (pow bxieta 2))", 0.0, 1.0, 1.0) - 1.0 / 3.0).norm() < 1e-15);
        let v = eval1("(rpow bxieta 0.5)", 0.0, 1.0, 1.0);
        assert!((v.re - 3f64.sqrt().sqrt()).abs() < 1e-15);
        let v = eval1("(exp (* i (sin x)))", 1.0, 0.0, 0.0);
        assert!((v - C64::new(0.0, 1f64.sin()).exp()).norm() < 1e-15);
        assert_eq!(eval1("(step 1.5)", 0.0, 0.0, 0.0), C64::new(1.0, 0.0));
    }

    #[test]
    fn dstep_matches_derivative_of_step() {
        let a = eval1("(dstep 1 x)", 0.3, 0.0, 0.0);
        let want = crate::symbol::smooth::smooth_step(0.3, 1);
        assert!((a.re - want).abs() < 1e-12);
    }

    #[test]
    fn errors_name_token_and_offset() {
        match parse_expr("(+ xi zeta)") {
            Err(Error::Parse { token, offset, .. }) => {
                assert_eq!(token, "zeta");
                assert_eq!(offset, 6);
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse_expr("(frob x)") {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "frob"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_expr("(+ x"), Err(Error::Parse { .. })));
        assert!(matches!(parse_expr("x )"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_expr("(pow x 1.5)"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn display_round_trips() {
        let src = "(* (+ 1 (pow (sin x) 2)) (rpow bxieta -1.5) (step (- 2 xi)))";
        let e = parse_expr(src).unwrap();
        let again = parse_expr(&e.to_string()).unwrap();
        for &(x, xi, eta) in &[(0.3, 0.5, -1.0), (1.0, 1.7, 2.0)] {
            let p = Point::d1(x, xi, eta);
            assert!((e.eval(1, &p) - again.eval(1, &p)).norm() < 1e-14);
        }
    }
}
