//! Text form of operators: parser, elaborator and printer.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' ['-'] int)?
//! atom   := int ['/' int] | 'a' | 'b' | 'w2' | 'r' | 'z' | 'zeta' | 'i'
//!         | 'dr' | 'dphi' | 'R' | 'I' | 'S' | 'Dr' | 'Dphi' | 'Hk' | 'HkExt' | 'Xk'
//!         | trig '(' 'phi' ['+' [int '*'] 'pi' '/' 'k'] ')' | '(' expr ')'
//! ```
//!
//! Multiplication is always explicit. `r`, `z`, `zeta` and other invertible
//! parameter-free coefficients admit negative powers; generators do not.

mod lexer;
mod pretty;

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::builders::Builders;
use crate::coeffring::{trig, Coefficient, Mono, TrigKind, ZRat};
use crate::cyclofield::FieldCtx;
use crate::error::{Error, Result};
use crate::opalgebra::{OpExpr, OpKey};
use crate::optree::OpTree;
use lexer::{tokenize, Tok, Token};

pub use pretty::{pretty, pretty_first_term, pretty_scalar, pretty_zrat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    Dr,
    Dphi,
    Rot,
    Refl,
    S,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    A,
    B,
    W2,
    R,
    Z,
    Zeta,
    ImagUnit,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AstKind {
    /// Signed summands.
    Sum(Vec<(bool, Ast)>),
    Product(Vec<Ast>),
    Power(Box<Ast>, i64),
    Rational(u64, u64),
    Symbol(Symbol),
    Gen(Generator),
    Named(String),
    Trig {
        kind: TrigKind,
        shift: i64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ast {
    pub kind: AstKind,
    pub pos: usize,
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn pos(&self) -> usize {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn expect_ident(&mut self, name: &str) -> Result<()> {
        match self.peek() {
            Tok::Ident(s) if s == name => {
                self.bump();
                Ok(())
            }
            _ => self.err(format!("expected '{name}'")),
        }
    }

    fn int(&mut self) -> Result<u64> {
        match *self.peek() {
            Tok::Int(v) => {
                self.bump();
                Ok(v)
            }
            _ => self.err("expected integer"),
        }
    }

    fn expr(&mut self) -> Result<Ast> {
        let pos = self.pos();
        let mut items = Vec::new();
        let mut neg = false;
        if *self.peek() == Tok::Minus {
            self.bump();
            neg = true;
        }
        items.push((neg, self.term()?));
        loop {
            match self.peek() {
                Tok::Plus => neg = false,
                Tok::Minus => neg = true,
                _ => break,
            }
            self.bump();
            items.push((neg, self.term()?));
        }
        if items.len() == 1 && !items[0].0 {
            return Ok(items.pop().unwrap().1);
        }
        Ok(Ast { kind: AstKind::Sum(items), pos })
    }

    fn term(&mut self) -> Result<Ast> {
        let pos = self.pos();
        let mut factors = vec![self.factor()?];
        while *self.peek() == Tok::Star {
            self.bump();
            factors.push(self.factor()?);
        }
        if factors.len() == 1 {
            return Ok(factors.pop().unwrap());
        }
        Ok(Ast { kind: AstKind::Product(factors), pos })
    }

    fn factor(&mut self) -> Result<Ast> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let at = self.pos();
        let n = self.int()?;
        let n = i64::try_from(n).map_err(|_| Error::Parse { pos: at, msg: "exponent too large".into() })?;
        let pos = base.pos;
        Ok(Ast { kind: AstKind::Power(Box::new(base), if neg { -n } else { n }), pos })
    }

    fn atom(&mut self) -> Result<Ast> {
        let pos = self.pos();
        let kind = match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                if *self.peek() == Tok::Slash {
                    self.bump();
                    let at = self.pos();
                    let d = self.int()?;
                    if d == 0 {
                        return Err(Error::Parse { pos: at, msg: "zero denominator".into() });
                    }
                    AstKind::Rational(n, d)
                } else {
                    AstKind::Rational(n, 1)
                }
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                return Ok(inner);
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "a" => AstKind::Symbol(Symbol::A),
                    "b" => AstKind::Symbol(Symbol::B),
                    "w2" => AstKind::Symbol(Symbol::W2),
                    "r" => AstKind::Symbol(Symbol::R),
                    "z" => AstKind::Symbol(Symbol::Z),
                    "zeta" => AstKind::Symbol(Symbol::Zeta),
                    "i" => AstKind::Symbol(Symbol::ImagUnit),
                    "dr" => AstKind::Gen(Generator::Dr),
                    "dphi" => AstKind::Gen(Generator::Dphi),
                    "R" => AstKind::Gen(Generator::Rot),
                    "I" => AstKind::Gen(Generator::Refl),
                    "S" => AstKind::Gen(Generator::S),
                    "Dr" | "Dphi" | "Hk" | "HkExt" | "Xk" => AstKind::Named(name),
                    other => match other.parse::<TrigKind>() {
                        Ok(kind) => self.trig_args(kind)?,
                        Err(()) => return Err(Error::Parse { pos, msg: format!("unknown identifier '{other}'") }),
                    },
                }
            }
            Tok::End => return self.err("unexpected end of input"),
            _ => return self.err("expected an operand"),
        };
        Ok(Ast { kind, pos })
    }

    fn trig_args(&mut self, kind: TrigKind) -> Result<AstKind> {
        self.expect(Tok::LParen, "'(' after trigonometric name")?;
        self.expect_ident("phi")?;
        let mut shift = 0i64;
        if *self.peek() == Tok::Plus {
            self.bump();
            let at = self.pos();
            if let Tok::Int(n) = *self.peek() {
                self.bump();
                self.expect(Tok::Star, "'*'")?;
                shift = n as i64;
            } else {
                shift = 1;
            }
            self.expect_ident("pi")?;
            self.expect(Tok::Slash, "'/'")?;
            self.expect_ident("k")?;
            if !kind.is_shifted() && shift != 0 {
                return Err(Error::Parse { pos: at, msg: format!("'{kind}' takes no shift") });
            }
        }
        self.expect(Tok::RParen, "')'")?;
        Ok(AstKind::Trig { kind, shift })
    }
}

/// Parses text into an AST; errors carry byte offsets.
pub fn parse(text: &str) -> Result<Ast> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, at: 0 };
    let ast = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err("unexpected token after expression");
    }
    Ok(ast)
}

/// Elaborates an AST into a normal-ordered operator.
pub fn elaborate(ast: &Ast, ctx: &Arc<FieldCtx>) -> Result<OpExpr> {
    elaborate_with(ast, &Builders::new(ctx))
}

/// Elaborates with the given (possibly mutated) builders for named operators.
pub fn elaborate_with(ast: &Ast, b: &Builders) -> Result<OpExpr> {
    let ctx = b.ctx();
    let c: &FieldCtx = ctx;
    Ok(match &ast.kind {
        AstKind::Sum(items) => {
            let parts = items
                .iter()
                .map(|(neg, x)| elaborate_with(x, b).map(|v| if *neg { v.neg() } else { v }))
                .collect::<Result<Vec<_>>>()?;
            OpExpr::sum_of(ctx, &parts)?
        }
        AstKind::Product(fs) => {
            let mut acc = OpExpr::one(ctx);
            for f in fs {
                acc = acc.mul(&elaborate_with(f, b)?)?;
            }
            acc
        }
        AstKind::Power(base, n) => {
            let x = elaborate_with(base, b)?;
            if *n >= 0 {
                x.pow(*n as u32)?
            } else {
                invert_coefficient(&x)
                    .map_err(|e| Error::Parse { pos: ast.pos, msg: format!("negative power: {e}") })?
                    .pow(n.unsigned_abs() as u32)?
            }
        }
        AstKind::Rational(n, d) => {
            let q = BigRational::new(BigInt::from(*n), BigInt::from(*d));
            OpExpr::scalar(ctx, c.from_rational(&q))
        }
        AstKind::Symbol(s) => match s {
            Symbol::A => OpExpr::param_a(ctx),
            Symbol::B => OpExpr::param_b(ctx),
            Symbol::W2 => OpExpr::param_w2(ctx),
            Symbol::R => OpExpr::r_pow(ctx, 1),
            Symbol::Z => OpExpr::zrat(ctx, ZRat::z_pow(1, c)),
            Symbol::Zeta => OpExpr::scalar(ctx, c.root_power(1)),
            Symbol::ImagUnit => OpExpr::scalar(ctx, c.imag_unit()),
        },
        AstKind::Gen(g) => match g {
            Generator::Dr => OpExpr::dr(ctx),
            Generator::Dphi => OpExpr::dphi(ctx),
            Generator::Rot => OpExpr::rot(ctx, 1),
            Generator::Refl => OpExpr::refl(ctx),
            Generator::S => b.s()?,
        },
        AstKind::Named(name) => b.named(name)?.expect("parser only admits known names"),
        AstKind::Trig { kind, shift } => OpExpr::zrat(ctx, trig(*kind, *shift, c)?),
    })
}

/// Parse and elaborate in one step.
pub fn parse_expr(text: &str, ctx: &Arc<FieldCtx>) -> Result<OpExpr> {
    elaborate(&parse(text)?, ctx)
}

/// Keeps the sum and product structure of the text as an unevaluated tree.
pub fn elaborate_tree(ast: &Ast, b: &Builders) -> Result<OpTree> {
    Ok(match &ast.kind {
        AstKind::Sum(items) => OpTree::Sum(
            items
                .iter()
                .map(|(neg, x)| elaborate_tree(x, b).map(|t| if *neg { t.neg() } else { t }))
                .collect::<Result<_>>()?,
        ),
        AstKind::Product(fs) => OpTree::Prod(fs.iter().map(|f| elaborate_tree(f, b)).collect::<Result<_>>()?),
        AstKind::Power(base, n) if *n >= 0 => elaborate_tree(base, b)?.pow(*n as usize),
        _ => OpTree::Leaf(elaborate_with(ast, b)?),
    })
}

/// Parse into an unevaluated tree, for the numeric oracle.
pub fn parse_tree(text: &str, ctx: &Arc<FieldCtx>) -> Result<OpTree> {
    elaborate_tree(&parse(text)?, &Builders::new(ctx))
}

/// Inverse of a single parameter-free coefficient term `c r^m`.
fn invert_coefficient(x: &OpExpr) -> Result<OpExpr> {
    let ctx = x.ctx();
    let mut entries = x.entries();
    let (key, mono, f) = match (entries.next(), entries.next()) {
        (Some(e), None) => e,
        (None, _) => return Err(Error::ZeroInverse),
        _ => return Err(Error::NotInvertible("sum of several terms".into())),
    };
    if key != OpKey::IDENTITY {
        return Err(Error::NotInvertible("generators admit nonnegative powers only".into()));
    }
    if !mono.is_parameter_free() {
        return Err(Error::NotInvertible("parameters a, b, w2 are not invertible".into()));
    }
    let inv = f.inv(ctx)?;
    Ok(OpExpr::term(ctx, OpKey::IDENTITY, Coefficient::from_zrat(Mono::r(-mono.m), inv)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{build_dr, build_s};
    use num_complex::Complex64;

    fn ctx(k: usize) -> Arc<FieldCtx> {
        Arc::new(FieldCtx::new(k).unwrap())
    }

    #[test]
    fn dr_display_k3() {
        let c = ctx(3);
        let x = parse_expr("dr - r^-1*(a*R + b)*(1 + R^2 + R^4)*I", &c).unwrap();
        assert_eq!(x, build_dr(&c));
    }

    #[test]
    fn reflection_squared() {
        let c = ctx(5);
        assert_eq!(parse_expr("I*I", &c).unwrap(), OpExpr::one(&c));
    }

    #[test]
    fn shifted_tan_numeric() {
        let c = ctx(3);
        let x = parse_expr("tan(phi + 2*pi/k)", &c).unwrap();
        let f = x.entries().next().unwrap().2.clone();
        for phi in [0.1, 0.25, 0.33, 0.6, 1.2] {
            let v = f.eval(Complex64::from_polar(1.0, phi), &c);
            let want = (phi + 2.0 * std::f64::consts::PI / 3.0).tan();
            assert!((v.re - want).abs() < 1e-10 && v.im.abs() < 1e-10);
        }
        assert_eq!(
            parse_expr("tan(phi + pi/k)", &c).unwrap(),
            OpExpr::zrat(&c, trig(TrigKind::TanShift, 1, &c).unwrap())
        );
    }

    #[test]
    fn s_prints_canonically() {
        let c = ctx(4);
        assert_eq!(pretty(&build_s(&c).unwrap()), "1 + R^4");
        assert!(matches!(parse_expr("S", &ctx(3)), Err(Error::ParityMismatch { .. })));
    }

    #[test]
    fn errors_are_positioned() {
        let c = ctx(2);
        let cases =
            [("a +", 3), ("a b", 2), ("(a + b", 6), ("dr^-1", 0), ("tank(phi + pi/k)", 11), ("foo", 0), ("3/0", 2)];
        for (src, pos) in cases {
            match parse_expr(src, &c) {
                Err(Error::Parse { pos: p, .. }) => assert_eq!(p, pos, "{src}"),
                other => panic!("{src}: {other:?}"),
            }
        }
        assert!(parse_expr("a^-1", &c).is_err());
    }

    #[test]
    fn negative_powers_of_coefficients() {
        let c = ctx(3);
        let x = parse_expr("(z - zeta^2)^-2*(z - zeta^2)^2", &c).unwrap();
        assert_eq!(x, OpExpr::one(&c));
        assert_eq!(parse_expr("r^-2*r^2", &c).unwrap(), OpExpr::one(&c));
    }

    #[test]
    fn tree_elaboration_agrees() {
        let c = ctx(3);
        for src in ["Dr*Dphi - Dphi*Dr", "-(a + b)^2*r^-2 + tan(phi)*dphi*I", "Hk"] {
            assert_eq!(parse_tree(src, &c).unwrap().eval(&c).unwrap(), parse_expr(src, &c).unwrap(), "{src}");
        }
    }

    #[test]
    fn named_operators() {
        let c = ctx(4);
        assert_eq!(parse_expr("Dr", &c).unwrap(), build_dr(&c));
        let x = parse_expr("HkExt - Hk", &c).unwrap();
        assert!(!x.is_zero());
    }
}
