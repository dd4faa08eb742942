//! The shared expression language: parser, evaluator and canonical printer.
//!
//! Tokens: `z1..`, `th1..` (coordinates), `Dz1..`, `Dth1..` (derivatives),
//! `dz1..`, `dth1..` (1-forms), `Pz1..`, `Pth1..` (polyfield generators),
//! `Ber`, rational literals `a/b`, operators `+ - * ^`, tensor separator
//! `@`, and operator calls `D(..)`, `delta(..)`, `dhat(..)`, `deltahat(..)`,
//! `H(..)`, `K(..)`, `hk(..)`, `LieX[..](..)`. `*` binds tighter than `@`,
//! which binds tighter than `+`/`-`.

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::berezin::{self, BerSection, IntegralForm};
use crate::coord::{self, Dims, Var};
use crate::forms::{FormElem, FormMonomial};
use crate::polyfields::{self, PolyElem, PolyMonomial, VectorField};
use crate::scalar::{self, Scalar};
use crate::superpoly::{SuperMonomial, SuperPoly};
use crate::universal::SpencerElem;
use crate::virtual_double::VirtualForm;
use crate::universal::UdrElem;
use crate::weyl::{DerMonomial, WeylOp};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Scalar),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    At,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "parse error at {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            '^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            '@' => {
                out.push((i, Tok::At));
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
            '[' => {
                out.push((i, Tok::LBracket));
                i += 1;
            }
            ']' => {
                out.push((i, Tok::RBracket));
                i += 1;
            }
            ',' => {
                out.push((i, Tok::Comma));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let numer: BigInt = text[start..i].parse().unwrap();
                let mut denom = BigInt::one();
                if i < bytes.len() && bytes[i] == b'/' {
                    let mut j = i + 1;
                    let dstart = j;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    if j > dstart {
                        denom = text[dstart..j].parse().unwrap();
                        i = j;
                    }
                }
                if denom.is_zero() {
                    return Err(ParseError {
                        position: start,
                        message: "zero denominator".into(),
                    });
                }
                out.push((start, Tok::Num(BigRational::new(numer, denom))));
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric()) {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            _ => {
                return Err(ParseError {
                    position: i,
                    message: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(out)
}

/// Generator families of the expression language.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    Coord(Var),
    Der(Var),
    Form(Var),
    PolyGen(Var),
    Ber,
}

/// Classifies an identifier as a generator, if it is one.
pub fn classify_ident(name: &str) -> Option<GenKind> {
    if name == "Ber" {
        return Some(GenKind::Ber);
    }
    let parse_idx = |s: &str| -> Option<usize> {
        let n: usize = s.parse().ok()?;
        (n >= 1).then(|| n - 1)
    };
    for (prefix, make) in [
        ("dz", 2usize),
        ("dth", 3),
        ("Dz", 0),
        ("Dth", 1),
        ("Pz", 4),
        ("Pth", 5),
        ("z", 6),
        ("th", 7),
    ] {
        if let Some(rest) = name.strip_prefix(prefix) {
            if let Some(i) = parse_idx(rest) {
                return Some(match make {
                    0 => GenKind::Der(Var::Z(i)),
                    1 => GenKind::Der(Var::Theta(i)),
                    2 => GenKind::Form(Var::Z(i)),
                    3 => GenKind::Form(Var::Theta(i)),
                    4 => GenKind::PolyGen(Var::Z(i)),
                    5 => GenKind::PolyGen(Var::Theta(i)),
                    6 => GenKind::Coord(Var::Z(i)),
                    _ => GenKind::Coord(Var::Theta(i)),
                });
            }
        }
    }
    None
}

/// Parses a bare coordinate name (`z1`, `th2`).
pub fn parse_var(name: &str) -> Option<Var> {
    match classify_ident(name) {
        Some(GenKind::Coord(v)) => Some(v),
        _ => None,
    }
}

/// Scans for the smallest dims covering every generator index used.
pub fn infer_dims(text: &str) -> Dims {
    let mut p = 1;
    let mut q = 1;
    if let Ok(tokens) = lex(text) {
        for (_, t) in tokens {
            if let Tok::Ident(name) = t {
                if let Some(kind) = classify_ident(&name) {
                    let v = match kind {
                        GenKind::Coord(v)
                        | GenKind::Der(v)
                        | GenKind::Form(v)
                        | GenKind::PolyGen(v) => v,
                        GenKind::Ber => continue,
                    };
                    match v {
                        Var::Z(i) => p = p.max(i + 1),
                        Var::Theta(a) => q = q.max(a + 1),
                    }
                }
            }
        }
    }
    Dims::new(p, q)
}

/// A primitive (single tensor slot) value.
#[derive(Debug, Clone)]
pub enum Prim {
    Fn(SuperPoly),
    Form(FormElem),
    Weyl(WeylOp),
    Poly(PolyElem),
    Ber(BerSection),
}

impl Prim {
    fn one(dims: Dims) -> Prim {
        Prim::Fn(SuperPoly::one(dims))
    }

    fn neg(self) -> Prim {
        match self {
            Prim::Fn(f) => Prim::Fn(f.neg()),
            Prim::Form(f) => Prim::Form(f.neg()),
            Prim::Weyl(w) => Prim::Weyl(w.neg()),
            Prim::Poly(t) => Prim::Poly(t.neg()),
            Prim::Ber(b) => Prim::Ber(b.neg()),
        }
    }

    fn family(&self) -> &'static str {
        match self {
            Prim::Fn(_) => "function",
            Prim::Form(_) => "form",
            Prim::Weyl(_) => "operator",
            Prim::Poly(_) => "polyfield",
            Prim::Ber(_) => "Ber section",
        }
    }

    fn to_form(&self) -> Option<FormElem> {
        match self {
            Prim::Fn(f) => Some(FormElem::from_poly(f)),
            Prim::Form(f) => Some(f.clone()),
            _ => None,
        }
    }

    fn to_weyl(&self) -> Option<WeylOp> {
        match self {
            Prim::Fn(f) => Some(WeylOp::from_poly(f)),
            Prim::Weyl(w) => Some(w.clone()),
            _ => None,
        }
    }

    fn to_poly(&self) -> Option<PolyElem> {
        match self {
            Prim::Fn(f) => Some(PolyElem::from_poly(f)),
            Prim::Poly(t) => Some(t.clone()),
            _ => None,
        }
    }

    fn mul(self, rhs: Prim, pos: usize) -> Result<Prim, ParseError> {
        use Prim::*;
        let err = |a: &Prim, b: &Prim| ParseError {
            position: pos,
            message: format!("cannot multiply {} by {}", a.family(), b.family()),
        };
        Ok(match (self, rhs) {
            (Fn(a), Fn(b)) => Fn(a.mul(&b)),
            (Fn(a), Form(b)) => Form(FormElem::from_poly(&a).mul(&b)),
            (Form(a), Fn(b)) => Form(a.mul(&FormElem::from_poly(&b))),
            (Form(a), Form(b)) => Form(a.mul(&b)),
            (Fn(a), Weyl(b)) => Weyl(b.left_mul_poly(&a)),
            (Weyl(a), Fn(b)) => Weyl(a.compose(&WeylOp::from_poly(&b))),
            (Weyl(a), Weyl(b)) => Weyl(a.compose(&b)),
            (Fn(a), Poly(b)) => Poly(b.mul_fn_left(&a)),
            (Poly(a), Fn(b)) => Poly(a.mul(&PolyElem::from_poly(&b))),
            (Poly(a), Poly(b)) => Poly(a.mul(&b)),
            (Ber(a), Fn(b)) => Ber(a.mul_fn(&b)),
            (Fn(a), Ber(b)) => {
                // f . phi g = (-1)^{|f||phi g|} phi g f
                let phi = berezin::phi_parity(b.dims);
                let (ge, go) = b.coeff.parity_parts();
                let (fe, fo) = a.parity_parts();
                let mut out = SuperPoly::zero(b.dims);
                for (g, gp) in [(ge, phi), (go, !phi)] {
                    for (f, fp) in [(fe.clone(), false), (fo.clone(), true)] {
                        let prod = g.mul(&f);
                        out = out.add(&if gp && fp { prod.neg() } else { prod });
                    }
                }
                Ber(BerSection::new(out))
            }
            (a, b) => return Err(err(&a, &b)),
        })
    }

    fn add(self, rhs: Prim, pos: usize) -> Result<Prim, ParseError> {
        use Prim::*;
        let err = |a: &Prim, b: &Prim| ParseError {
            position: pos,
            message: format!("cannot add {} and {}", a.family(), b.family()),
        };
        Ok(match (self, rhs) {
            (Fn(a), Fn(b)) => Fn(a.add(&b)),
            (Fn(a), Form(b)) => Form(FormElem::from_poly(&a).add(&b)),
            (Form(a), Fn(b)) => Form(a.add(&FormElem::from_poly(&b))),
            (Form(a), Form(b)) => Form(a.add(&b)),
            (Fn(a), Weyl(b)) => Weyl(WeylOp::from_poly(&a).add(&b)),
            (Weyl(a), Fn(b)) => Weyl(a.add(&WeylOp::from_poly(&b))),
            (Weyl(a), Weyl(b)) => Weyl(a.add(&b)),
            (Fn(a), Poly(b)) => Poly(PolyElem::from_poly(&a).add(&b)),
            (Poly(a), Fn(b)) => Poly(a.add(&PolyElem::from_poly(&b))),
            (Poly(a), Poly(b)) => Poly(a.add(&b)),
            (Ber(a), Ber(b)) => Ber(a.add(&b)),
            (a, b) => return Err(err(&a, &b)),
        })
    }
}

/// Evaluated expression values. Tensors keep their slot presentation until
/// an operator or classification forces an interpretation.
#[derive(Debug, Clone)]
pub enum Value {
    Prim(Prim),
    /// Sum of tensor terms, each a tuple of 2 or 3 primitive slots.
    Tensor(Vec<Vec<Prim>>),
}

impl Value {
    fn neg(self) -> Value {
        match self {
            Value::Prim(p) => Value::Prim(p.neg()),
            Value::Tensor(terms) => Value::Tensor(
                terms
                    .into_iter()
                    .map(|mut t| {
                        let first = std::mem::replace(&mut t[0], Prim::Fn(SuperPoly::zero(Dims::new(1, 1))));
                        t[0] = first.neg();
                        t
                    })
                    .collect(),
            ),
        }
    }
}

/// Typed result of evaluating an expression.
#[derive(Debug, Clone)]
pub enum EvalResult {
    Fn(SuperPoly),
    Form(FormElem),
    Weyl(WeylOp),
    Poly(PolyElem),
    Ber(BerSection),
    Udr(UdrElem),
    Spencer(SpencerElem),
    Integral(IntegralForm),
    Virtual(VirtualForm),
}

pub struct Evaluator {
    pub dims: Dims,
}

impl Evaluator {
    pub fn new(dims: Dims) -> Self {
        Evaluator { dims }
    }

    /// Parses and evaluates, returning the typed result.
    pub fn eval(&self, text: &str) -> Result<EvalResult, ParseError> {
        let tokens = lex(text)?;
        let mut parser = Parser {
            dims: self.dims,
            tokens,
            pos: 0,
        };
        let result = parser.parse_call_or_expr()?;
        parser.expect_end()?;
        Ok(result)
    }

    /// Parses, evaluates and renders the canonical form.
    pub fn eval_to_string(&self, text: &str) -> Result<String, ParseError> {
        Ok(render_result(&self.eval(text)?))
    }
}

/// Parses an expression that must evaluate to a plain function.
pub fn parse_poly(dims: Dims, text: &str) -> Result<SuperPoly, String> {
    match Evaluator::new(dims).eval(text) {
        Ok(EvalResult::Fn(f)) => Ok(f),
        Ok(_) => Err(format!("`{text}` is not a plain polynomial")),
        Err(e) => Err(e.to_string()),
    }
}

struct Parser {
    dims: Dims,
    tokens: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or_else(|| self.tokens.last().map(|(p, _)| p + 1).unwrap_or(0))
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.here(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {tok:?}"))
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            Err(ParseError {
                position: self.here(),
                message: "trailing input".into(),
            })
        }
    }

    /// Top level: either an operator call or a bare expression.
    fn parse_call_or_expr(&mut self) -> Result<EvalResult, ParseError> {
        if let Some(Tok::Ident(name)) = self.peek() {
            let name = name.clone();
            if is_operator(&name)
                && matches!(
                    self.tokens.get(self.pos + 1).map(|(_, t)| t),
                    Some(Tok::LParen) | Some(Tok::LBracket)
                )
            {
                self.pos += 1;
                return self.parse_operator(&name);
            }
        }
        let v = self.parse_expr()?;
        self.classify(v)
    }

    fn parse_operator(&mut self, name: &str) -> Result<EvalResult, ParseError> {
        let pos = self.here();
        if name == "LieX" {
            self.expect(Tok::LBracket)?;
            let field = self.parse_expr()?;
            self.expect(Tok::RBracket)?;
            self.expect(Tok::LParen)?;
            let arg = self.parse_expr()?;
            self.expect(Tok::RParen)?;
            return self.apply_lie(field, arg, pos);
        }
        self.expect(Tok::LParen)?;
        let first = self.parse_expr()?;
        let second = if self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            Some(self.parse_expr()?)
        } else {
            None
        };
        self.expect(Tok::RParen)?;
        let arg = match second {
            None => first,
            Some(snd) => join_tensor(first, snd),
        };
        self.apply_operator(name, arg, pos)
    }

    fn parse_expr(&mut self) -> Result<Value, ParseError> {
        let mut acc = self.parse_tensor_term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.parse_tensor_term()?;
                    acc = self.add_values(acc, rhs)?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.parse_tensor_term()?.neg();
                    acc = self.add_values(acc, rhs)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn parse_tensor_term(&mut self) -> Result<Value, ParseError> {
        let mut negate = false;
        while self.peek() == Some(&Tok::Minus) {
            negate = !negate;
            self.pos += 1;
        }
        let mut slots = vec![self.parse_product()?];
        while self.peek() == Some(&Tok::At) {
            self.pos += 1;
            slots.push(self.parse_product()?);
        }
        let value = if slots.len() == 1 {
            Value::Prim(slots.pop().unwrap())
        } else {
            Value::Tensor(vec![slots])
        };
        Ok(if negate { value.neg() } else { value })
    }

    fn parse_product(&mut self) -> Result<Prim, ParseError> {
        let pos = self.here();
        let mut acc = self.parse_factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let rhs = self.parse_factor()?;
            acc = acc.mul(rhs, pos)?;
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<Prim, ParseError> {
        let base = self.parse_atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let pos = self.here();
            let Some(Tok::Num(n)) = self.bump() else {
                return self.err("expected integer exponent");
            };
            if !n.is_integer() || n.is_negative() {
                return Err(ParseError {
                    position: pos,
                    message: "exponent must be a non-negative integer".into(),
                });
            }
            let e: u32 = n.to_integer().try_into().map_err(|_| ParseError {
                position: pos,
                message: "exponent too large".into(),
            })?;
            let mut acc = Prim::one(self.dims);
            for _ in 0..e {
                acc = acc.mul(base.clone(), pos)?;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Prim, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Num(c)) => Ok(Prim::Fn(SuperPoly::constant(self.dims, c))),
            Some(Tok::Minus) => {
                let inner = self.parse_factor()?;
                Ok(inner.neg())
            }
            Some(Tok::LParen) => {
                let v = self.parse_expr()?;
                self.expect(Tok::RParen)?;
                match v {
                    Value::Prim(p) => Ok(p),
                    Value::Tensor(_) => Err(ParseError {
                        position: pos,
                        message: "tensor expression cannot be a factor".into(),
                    }),
                }
            }
            Some(Tok::Ident(name)) => match classify_ident(&name) {
                Some(kind) => self.gen_prim(kind, pos),
                None => Err(ParseError {
                    position: pos,
                    message: format!("unknown identifier `{name}`"),
                }),
            },
            other => Err(ParseError {
                position: pos,
                message: format!("unexpected token {other:?}"),
            }),
        }
    }

    fn gen_prim(&self, kind: GenKind, pos: usize) -> Result<Prim, ParseError> {
        let check = |v: Var| -> Result<Var, ParseError> {
            let ok = match v {
                Var::Z(i) => i < self.dims.p,
                Var::Theta(a) => a < self.dims.q,
            };
            if ok {
                Ok(v)
            } else {
                Err(ParseError {
                    position: pos,
                    message: format!("index out of range for dims {:?}", self.dims),
                })
            }
        };
        Ok(match kind {
            GenKind::Coord(v) => Prim::Fn(SuperPoly::var(self.dims, check(v)?)),
            GenKind::Der(v) => Prim::Weyl(WeylOp::derivative(self.dims, check(v)?)),
            GenKind::Form(v) => Prim::Form(FormElem::gen(self.dims, check(v)?)),
            GenKind::PolyGen(v) => Prim::Poly(PolyElem::gen(self.dims, check(v)?)),
            GenKind::Ber => Prim::Ber(BerSection::generator(self.dims)),
        })
    }

    fn add_values(&self, a: Value, b: Value) -> Result<Value, ParseError> {
        let pos = self.here();
        Ok(match (a, b) {
            (Value::Prim(x), Value::Prim(y)) => Value::Prim(x.add(y, pos)?),
            (Value::Tensor(mut xs), Value::Tensor(ys)) => {
                if let (Some(x), Some(y)) = (xs.first(), ys.first()) {
                    if x.len() != y.len() {
                        return self.err("tensor terms have different slot counts");
                    }
                }
                xs.extend(ys);
                Value::Tensor(xs)
            }
            _ => return self.err("cannot add a tensor and a non-tensor"),
        })
    }

    /// Sorts a bare value into a typed result.
    fn classify(&self, v: Value) -> Result<EvalResult, ParseError> {
        let dims = self.dims;
        match v {
            Value::Prim(Prim::Fn(f)) => Ok(EvalResult::Fn(f)),
            Value::Prim(Prim::Form(f)) => Ok(EvalResult::Form(f)),
            Value::Prim(Prim::Weyl(w)) => Ok(EvalResult::Weyl(w)),
            Value::Prim(Prim::Poly(t)) => Ok(EvalResult::Poly(t)),
            Value::Prim(Prim::Ber(b)) => Ok(EvalResult::Ber(b)),
            Value::Tensor(terms) => {
                let slots = terms.first().map(|t| t.len()).unwrap_or(2);
                if slots == 3 {
                    return Ok(EvalResult::Virtual(to_virtual(dims, &terms, self.here())?));
                }
                let has_ber = terms
                    .iter()
                    .any(|t| matches!(t[0], Prim::Ber(_)));
                if has_ber {
                    return Ok(EvalResult::Integral(to_integral(dims, &terms, self.here())?));
                }
                let first_is_formish = terms.iter().any(|t| matches!(t[0], Prim::Form(_)));
                let second_is_polyish = terms.iter().any(|t| matches!(t[1], Prim::Poly(_)));
                let first_is_weylish = terms.iter().any(|t| matches!(t[0], Prim::Weyl(_)));
                if first_is_formish || (!second_is_polyish && !first_is_weylish) {
                    Ok(EvalResult::Udr(to_udr(dims, &terms, self.here())?))
                } else {
                    Ok(EvalResult::Spencer(to_spencer(dims, &terms, self.here())?))
                }
            }
        }
    }

    fn apply_operator(
        &self,
        name: &str,
        arg: Value,
        pos: usize,
    ) -> Result<EvalResult, ParseError> {
        let dims = self.dims;
        match name {
            "D" => match arg {
                Value::Prim(Prim::Form(f)) => Ok(EvalResult::Form(f.exterior_d())),
                Value::Prim(Prim::Fn(f)) => {
                    Ok(EvalResult::Form(FormElem::from_poly(&f).exterior_d()))
                }
                Value::Tensor(terms) => {
                    Ok(EvalResult::Udr(to_udr(dims, &terms, pos)?.big_d()))
                }
                _ => Err(ParseError {
                    position: pos,
                    message: "D expects a form or `form @ operator`".into(),
                }),
            },
            "delta" => match arg {
                Value::Tensor(terms) => {
                    if terms.iter().any(|t| matches!(t[0], Prim::Ber(_))) {
                        Ok(EvalResult::Integral(berezin::integral_delta(&to_integral(
                            dims, &terms, pos,
                        )?)))
                    } else {
                        Ok(EvalResult::Spencer(
                            to_spencer(dims, &terms, pos)?.spencer_delta(),
                        ))
                    }
                }
                Value::Prim(Prim::Ber(b)) => Ok(EvalResult::Integral(berezin::integral_delta(
                    &IntegralForm::from_section(&b),
                ))),
                _ => Err(ParseError {
                    position: pos,
                    message: "delta expects `operator @ polyfield` or a Ber form".into(),
                }),
            },
            "dhat" => Ok(EvalResult::Virtual(self.expect_virtual(arg, pos)?.d_hat())),
            "deltahat" => Ok(EvalResult::Virtual(
                self.expect_virtual(arg, pos)?.delta_hat(),
            )),
            "H" => match arg {
                Value::Tensor(terms) => Ok(EvalResult::Udr(
                    to_udr(dims, &terms, pos)?
                        .to_co()
                        .homotopy_h()
                        .to_canonical(),
                )),
                _ => Err(ParseError {
                    position: pos,
                    message: "H expects `form @ operator`".into(),
                }),
            },
            "K" => match arg {
                Value::Tensor(terms) => Ok(EvalResult::Spencer(
                    to_spencer(dims, &terms, pos)?.homotopy_k(),
                )),
                _ => Err(ParseError {
                    position: pos,
                    message: "K expects `operator @ polyfield`".into(),
                }),
            },
            "hk" => match arg {
                Value::Tensor(terms) => {
                    let s = to_integral(dims, &terms, pos)?;
                    crate::poincare::poincare_h(&s)
                        .map(EvalResult::Integral)
                        .map_err(|e| ParseError {
                            position: pos,
                            message: e.to_string(),
                        })
                }
                Value::Prim(Prim::Ber(b)) => crate::poincare::poincare_h(
                    &IntegralForm::from_section(&b),
                )
                .map(EvalResult::Integral)
                .map_err(|e| ParseError {
                    position: pos,
                    message: e.to_string(),
                }),
                _ => Err(ParseError {
                    position: pos,
                    message: "hk expects an integral form".into(),
                }),
            },
            _ => Err(ParseError {
                position: pos,
                message: format!("unknown operator `{name}`"),
            }),
        }
    }

    fn expect_virtual(&self, arg: Value, pos: usize) -> Result<VirtualForm, ParseError> {
        match arg {
            Value::Tensor(terms) if terms.iter().all(|t| t.len() == 3) => {
                to_virtual(self.dims, &terms, pos)
            }
            _ => Err(ParseError {
                position: pos,
                message: "expected `form @ operator @ polyfield`".into(),
            }),
        }
    }

    fn apply_lie(&self, field: Value, arg: Value, pos: usize) -> Result<EvalResult, ParseError> {
        let Value::Prim(p) = field else {
            return Err(ParseError {
                position: pos,
                message: "LieX expects a vector field".into(),
            });
        };
        let Some(op) = p.to_weyl() else {
            return Err(ParseError {
                position: pos,
                message: "LieX expects a vector field".into(),
            });
        };
        let Some(x) = VectorField::from_weyl(&op) else {
            return Err(ParseError {
                position: pos,
                message: "LieX field must be first-order".into(),
            });
        };
        match arg {
            Value::Prim(Prim::Poly(tau)) => {
                Ok(EvalResult::Poly(polyfields::lie_derivative(&x, &tau)))
            }
            Value::Prim(Prim::Fn(f)) => Ok(EvalResult::Fn(x.apply(&f))),
            Value::Prim(Prim::Ber(b)) => Ok(EvalResult::Ber(berezin::ber_lie(&x, &b))),
            Value::Prim(Prim::Form(omega)) => {
                Ok(EvalResult::Form(polyfields::lie_on_one_form(&x, &omega)))
            }
            _ => Err(ParseError {
                position: pos,
                message: "LieX applies to polyfields, functions, 1-forms or Ber sections".into(),
            }),
        }
    }
}

fn is_operator(name: &str) -> bool {
    matches!(
        name,
        "D" | "delta" | "dhat" | "deltahat" | "H" | "K" | "hk" | "LieX"
    )
}

fn join_tensor(first: Value, second: Value) -> Value {
    // two-argument operator form `op(a, b)` means `a @ b`
    match (first, second) {
        (Value::Prim(a), Value::Prim(b)) => Value::Tensor(vec![vec![a, b]]),
        (Value::Tensor(terms), Value::Prim(b)) => Value::Tensor(
            terms
                .into_iter()
                .map(|mut t| {
                    t.push(b.clone());
                    t
                })
                .collect(),
        ),
        (a, _) => a,
    }
}

fn to_udr(dims: Dims, terms: &[Vec<Prim>], pos: usize) -> Result<UdrElem, ParseError> {
    let mut pairs = Vec::new();
    for t in terms {
        if t.len() != 2 {
            return Err(ParseError {
                position: pos,
                message: "expected two tensor slots".into(),
            });
        }
        let omega = t[0].to_form().ok_or_else(|| ParseError {
            position: pos,
            message: format!("first slot must be a form, got {}", t[0].family()),
        })?;
        let op = t[1].to_weyl().ok_or_else(|| ParseError {
            position: pos,
            message: format!("second slot must be an operator, got {}", t[1].family()),
        })?;
        pairs.push((omega, op));
    }
    Ok(UdrElem::normalize(dims, &pairs))
}

fn to_spencer(dims: Dims, terms: &[Vec<Prim>], pos: usize) -> Result<SpencerElem, ParseError> {
    let mut pairs = Vec::new();
    for t in terms {
        if t.len() != 2 {
            return Err(ParseError {
                position: pos,
                message: "expected two tensor slots".into(),
            });
        }
        let op = t[0].to_weyl().ok_or_else(|| ParseError {
            position: pos,
            message: format!("first slot must be an operator, got {}", t[0].family()),
        })?;
        let tau = t[1].to_poly().ok_or_else(|| ParseError {
            position: pos,
            message: format!("second slot must be a polyfield, got {}", t[1].family()),
        })?;
        pairs.push((op, tau));
    }
    Ok(SpencerElem::normalize(dims, &pairs))
}

fn to_integral(dims: Dims, terms: &[Vec<Prim>], pos: usize) -> Result<IntegralForm, ParseError> {
    let mut out = IntegralForm::zero(dims);
    for t in terms {
        if t.len() != 2 {
            return Err(ParseError {
                position: pos,
                message: "expected `Ber section @ polyfield`".into(),
            });
        }
        let Prim::Ber(b) = &t[0] else {
            return Err(ParseError {
                position: pos,
                message: format!("first slot must be a Ber section, got {}", t[0].family()),
            });
        };
        let tau = t[1].to_poly().ok_or_else(|| ParseError {
            position: pos,
            message: format!("second slot must be a polyfield, got {}", t[1].family()),
        })?;
        // phi f (x) g P^I = phi (f g') (x) P^I via the right module structure
        for (pm, coeff) in &tau.terms {
            out.add_term(pm.clone(), b.coeff.mul(coeff));
        }
    }
    Ok(out)
}

fn to_virtual(dims: Dims, terms: &[Vec<Prim>], pos: usize) -> Result<VirtualForm, ParseError> {
    let mut triples = Vec::new();
    for t in terms {
        if t.len() != 3 {
            return Err(ParseError {
                position: pos,
                message: "expected three tensor slots".into(),
            });
        }
        let omega = t[0].to_form().ok_or_else(|| ParseError {
            position: pos,
            message: format!("first slot must be a form, got {}", t[0].family()),
        })?;
        let op = t[1].to_weyl().ok_or_else(|| ParseError {
            position: pos,
            message: format!("second slot must be an operator, got {}", t[1].family()),
        })?;
        let tau = t[2].to_poly().ok_or_else(|| ParseError {
            position: pos,
            message: format!("third slot must be a polyfield, got {}", t[2].family()),
        })?;
        triples.push((omega, op, tau));
    }
    Ok(VirtualForm::normalize(dims, &triples))
}

// ---------------------------------------------------------------------------
// canonical printing

fn push_factor(body: &mut String, factor: &str) {
    if !body.is_empty() {
        body.push('*');
    }
    body.push_str(factor);
}

fn render_exps(body: &mut String, prefix: &str, exps: &[u8]) {
    for (i, &e) in exps.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let f = if e == 1 {
            format!("{prefix}{}", i + 1)
        } else {
            format!("{prefix}{}^{e}", i + 1)
        };
        push_factor(body, &f);
    }
}

fn render_set(body: &mut String, prefix: &str, set: u16) {
    for i in coord::set_iter(set) {
        push_factor(body, &format!("{prefix}{}", i + 1));
    }
}

fn super_monomial_str(m: &SuperMonomial) -> String {
    let mut body = String::new();
    render_exps(&mut body, "z", &m.z);
    render_set(&mut body, "th", m.theta);
    body
}

fn form_monomial_str(m: &FormMonomial) -> String {
    let mut body = String::new();
    render_exps(&mut body, "dth", &m.dth);
    render_set(&mut body, "dz", m.dz);
    body
}

fn der_monomial_str(m: &DerMonomial) -> String {
    let mut body = String::new();
    render_exps(&mut body, "Dz", &m.dz);
    render_set(&mut body, "Dth", m.dth);
    body
}

fn poly_monomial_str(m: &PolyMonomial) -> String {
    let mut body = String::new();
    render_exps(&mut body, "Pth", &m.pth);
    render_set(&mut body, "Pz", m.pz);
    body
}

/// One printed term: sign handled by the caller, body is `*`-joined.
fn term_string(coeff: &Scalar, factors: &[String]) -> (bool, String) {
    let neg = coeff.is_negative();
    let abs = if neg { -coeff.clone() } else { coeff.clone() };
    let mut body = String::new();
    let nonempty: Vec<&String> = factors.iter().filter(|f| !f.is_empty()).collect();
    if !abs.is_one() || nonempty.is_empty() {
        push_factor(&mut body, &scalar::render(&abs));
    }
    for f in nonempty {
        push_factor(&mut body, f);
    }
    (neg, body)
}

fn join_terms(terms: Vec<(bool, String)>) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (neg, body)) in terms.into_iter().enumerate() {
        if i == 0 {
            if neg {
                out.push_str("- ");
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&body);
    }
    out
}

pub fn render_poly(f: &SuperPoly) -> String {
    let terms = f
        .terms
        .iter()
        .map(|(m, c)| term_string(c, &[super_monomial_str(m)]))
        .collect();
    join_terms(terms)
}

pub fn render_form(e: &FormElem) -> String {
    let mut terms = Vec::new();
    for (m, f) in &e.terms {
        for (fm, c) in &f.terms {
            terms.push(term_string(
                c,
                &[form_monomial_str(m), super_monomial_str(fm)],
            ));
        }
    }
    join_terms(terms)
}

pub fn render_weyl(op: &WeylOp) -> String {
    let terms = op
        .terms
        .iter()
        .map(|((xm, dm), c)| {
            term_string(c, &[super_monomial_str(xm), der_monomial_str(dm)])
        })
        .collect();
    join_terms(terms)
}

pub fn render_polyfield(t: &PolyElem) -> String {
    let mut terms = Vec::new();
    for (pm, f) in &t.terms {
        for (fm, c) in &f.terms {
            terms.push(term_string(
                c,
                &[super_monomial_str(fm), poly_monomial_str(pm)],
            ));
        }
    }
    join_terms(terms)
}

pub fn render_ber(b: &BerSection) -> String {
    let terms = b
        .coeff
        .terms
        .iter()
        .map(|(m, c)| {
            let mono = super_monomial_str(m);
            let mut factors = vec!["Ber".to_string()];
            if !mono.is_empty() {
                factors.push(mono);
            }
            let (neg, mut body) = term_string(c, &[]);
            // coefficient precedes Ber only when it is not +-1
            let joined = factors.join("*");
            if body.is_empty() || body == "1" {
                body = joined;
            } else {
                body = format!("{body}*{joined}");
            }
            (neg, body)
        })
        .collect();
    join_terms(terms)
}

fn tensor_term(slots: &[String]) -> String {
    slots.join(" @ ")
}

fn unit_if_empty(s: String) -> String {
    if s.is_empty() {
        "1".to_string()
    } else {
        s
    }
}

pub fn render_udr(e: &UdrElem) -> String {
    let mut terms = Vec::new();
    for ((fm, xm, dm), c) in &e.terms {
        let (neg, weyl_body) =
            term_string(c, &[super_monomial_str(xm), der_monomial_str(dm)]);
        let slots = vec![
            unit_if_empty(form_monomial_str(fm)),
            unit_if_empty(weyl_body),
        ];
        terms.push((neg, tensor_term(&slots)));
    }
    join_terms(terms)
}

pub fn render_spencer(e: &SpencerElem) -> String {
    let mut terms = Vec::new();
    for ((xm, dm, pm), c) in &e.terms {
        let (neg, weyl_body) =
            term_string(c, &[super_monomial_str(xm), der_monomial_str(dm)]);
        let slots = vec![
            unit_if_empty(weyl_body),
            unit_if_empty(poly_monomial_str(pm)),
        ];
        terms.push((neg, tensor_term(&slots)));
    }
    join_terms(terms)
}

pub fn render_integral(s: &IntegralForm) -> String {
    let mut terms = Vec::new();
    for (pm, f) in &s.terms {
        for (fm, c) in &f.terms {
            let (neg, coeff_body) = term_string(c, &[]);
            let mono = super_monomial_str(fm);
            let mut ber = "Ber".to_string();
            if !(coeff_body.is_empty() || coeff_body == "1") {
                ber = format!("{coeff_body}*Ber");
            }
            if !mono.is_empty() {
                ber = format!("{ber}*{mono}");
            }
            let slots = vec![ber, unit_if_empty(poly_monomial_str(pm))];
            terms.push((neg, tensor_term(&slots)));
        }
    }
    join_terms(terms)
}

pub fn render_virtual(v: &VirtualForm) -> String {
    let mut terms = Vec::new();
    for ((fm, xm, dm, pm), c) in &v.terms {
        let (neg, weyl_body) =
            term_string(c, &[super_monomial_str(xm), der_monomial_str(dm)]);
        let slots = vec![
            unit_if_empty(form_monomial_str(fm)),
            unit_if_empty(weyl_body),
            unit_if_empty(poly_monomial_str(pm)),
        ];
        terms.push((neg, tensor_term(&slots)));
    }
    join_terms(terms)
}

pub fn render_result(r: &EvalResult) -> String {
    match r {
        EvalResult::Fn(f) => render_poly(f),
        EvalResult::Form(e) => render_form(e),
        EvalResult::Weyl(op) => render_weyl(op),
        EvalResult::Poly(t) => render_polyfield(t),
        EvalResult::Ber(b) => render_ber(b),
        EvalResult::Udr(e) => render_udr(e),
        EvalResult::Spencer(e) => render_spencer(e),
        EvalResult::Integral(s) => render_integral(s),
        EvalResult::Virtual(v) => render_virtual(v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(dims: Dims, text: &str) -> String {
        Evaluator::new(dims).eval_to_string(text).unwrap()
    }

    #[test]
    fn spec_examples() {
        let d = Dims::new(1, 1);
        assert_eq!(ev(d, "D( dz1 @ Dth1 )"), "0");
        assert_eq!(ev(d, "K( Dz1 @ 1 )"), "1 @ Pz1");
        assert_eq!(ev(d, "delta( Ber * z1 , Pz1 )"), "- Ber @ 1");
    }

    #[test]
    fn polynomial_arithmetic() {
        let d = Dims::new(1, 2);
        assert_eq!(ev(d, "th2 * th1"), "- th1*th2");
        assert_eq!(ev(d, "(z1 + th1) * (z1 - th1)"), "z1^2");
        assert_eq!(ev(d, "3/2 * z1^2 - 1/2 * z1^2"), "z1^2");
        assert_eq!(ev(d, "th1^2"), "0");
    }

    #[test]
    fn weyl_normal_ordering() {
        let d = Dims::new(1, 1);
        assert_eq!(ev(d, "Dz1 * z1"), "1 + z1*Dz1");
        assert_eq!(ev(d, "Dth1 * th1"), "1 - th1*Dth1");
    }

    #[test]
    fn d_on_udr() {
        let d = Dims::new(1, 1);
        assert_eq!(ev(d, "D( 1 @ 1 )"), "dz1 @ Dz1 + dth1 @ Dth1");
        assert_eq!(
            ev(d, "D( z1 @ 1 )"),
            "dz1 @ 1 + dz1 @ z1*Dz1 + dth1 @ z1*Dth1"
        );
    }

    #[test]
    fn round_trip_is_fixpoint() {
        let d = Dims::new(2, 2);
        let ev = Evaluator::new(d);
        for text in [
            "th2 * th1 * z1 - 2*z2",
            "Dz1 * z1 * Dth2 + th1*Dth1",
            "dz1 @ z1*Dz1 - dth2 @ Dth1",
            "z1*Dz1 @ Pz1*Pth2 + 1 @ 1",
            "Ber*z1*th1 @ Pz1 - 2*Ber @ Pth1",
            "dz1 @ Dth1 @ Pz1 + dth1^2 @ z1^2 @ 1",
            "LieX[z1*Dz1](z1 * Pz1)",
        ] {
            let once = ev.eval_to_string(text).unwrap();
            let twice = ev.eval_to_string(&once).unwrap();
            assert_eq!(once, twice, "fixpoint for `{text}`");
        }
    }

    #[test]
    fn lie_operator() {
        let d = Dims::new(1, 1);
        assert_eq!(ev(d, "LieX[z1*Dz1](Pz1)"), "- Pz1");
        assert_eq!(ev(d, "LieX[th1*Dz1](Pth1)"), "Pz1");
    }

    #[test]
    fn parse_errors_carry_position() {
        let d = Dims::new(1, 1);
        let err = Evaluator::new(d).eval("z1 + ?").unwrap_err();
        assert_eq!(err.position, 5);
        assert!(Evaluator::new(d).eval("z1 *").is_err());
        assert!(Evaluator::new(d).eval("qq(1)").is_err());
        // unknown operator name in call position
        let err = Evaluator::new(d).eval("Q( 1 @ 1 )").unwrap_err();
        assert!(err.message.contains("unknown identifier"));
    }

    #[test]
    fn dims_inference() {
        assert_eq!(infer_dims("z1 * th3 + Pz2"), Dims::new(2, 3));
        assert_eq!(infer_dims("Ber"), Dims::new(1, 1));
    }

    #[test]
    fn hk_on_integral() {
        let d = Dims::new(1, 1);
        // h(phi (x) 1) = -1/2 Ber z1 @ Pz1 + 1/2 Ber th1 @ Pth1
        assert_eq!(
            ev(d, "hk( Ber @ 1 )"),
            "- 1/2*Ber*z1 @ Pz1 + 1/2*Ber*th1 @ Pth1"
        );
    }
}
