//! The text format for algebra descriptions: parser with positioned
//! diagnostics, canonical serializer, and the bundled example corpus.
//!
//! One format serves algebras, coalgebras, cochains and windows; blocks are
//! optional. Generator degrees are declared in the algebra (cobar)
//! convention, so the differential block satisfies `|dc| = |c| + 1`; explicit
//! `delta[j]` blocks carry the same data and merge into the differential.
//! Coefficients in GF(p) documents are written as integers and reduced at
//! parse time.
//!
//! ```text
//! # comment
//! field Q;                      # or GF(2)
//! vertices 1+, 2-;
//! gen c12 : 1 -> 2, deg 0;      # optional: , weight w
//! d c1 = e(1) + s1 + c12 c21;   # juxtaposition or * both multiply
//! delta[2] k1 = - s1 t1;        # arity-tagged coproduct table entry
//! aug s1 = -1;
//! twist into hopf_small { c2 = a2v; }
//! window -6 .. 0 maxlen 8;
//! ```

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::ground::{Decoration, GenSym, GradedModule, GroundRing, Quiver};
use crate::ncalg::{Derivation, Element, Word};
use crate::scalars::{FieldSpec, Scalar};

const MAX_PAREN_DEPTH: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
}

impl ParseError {
    fn new(pos: Pos, message: impl Into<String>) -> Self {
        ParseError { pos, message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ParseError {}

// ---------------------------------------------------------------- lexer --

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Colon,
    Arrow,
    Comma,
    Semi,
    Eq,
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    DotDot,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier {}", s),
            Tok::Int(n) => write!(f, "integer {}", n),
            Tok::Colon => write!(f, "':'"),
            Tok::Arrow => write!(f, "'->'"),
            Tok::Comma => write!(f, "','"),
            Tok::Semi => write!(f, "';'"),
            Tok::Eq => write!(f, "'='"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Slash => write!(f, "'/'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::LBrace => write!(f, "'{{'"),
            Tok::RBrace => write!(f, "'}}'"),
            Tok::LBracket => write!(f, "'['"),
            Tok::RBracket => write!(f, "']'"),
            Tok::DotDot => write!(f, "'..'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

struct Lexer<'a> {
    chars: core::iter::Peekable<core::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl Lexer<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next();
        if c == Some('\n') {
            self.line += 1;
            self.col = 1;
        } else if c.is_some() {
            self.col += 1;
        }
        c
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut lx = Lexer { chars: text.chars().peekable(), line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        let pos = Pos { line: lx.line, col: lx.col };
        let Some(&c) = lx.chars.peek() else {
            out.push((Tok::Eof, pos));
            return Ok(out);
        };
        if c.is_whitespace() {
            lx.bump();
            continue;
        }
        if c == '#' {
            while let Some(c) = lx.bump() {
                if c == '\n' {
                    break;
                }
            }
            continue;
        }
        if c.is_ascii_digit() {
            let mut n: i64 = 0;
            while let Some(&d) = lx.chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                lx.bump();
                n = n
                    .checked_mul(10)
                    .and_then(|n| n.checked_add((d as u8 - b'0') as i64))
                    .ok_or(ParseError::new(pos, "integer literal too large"))?;
            }
            out.push((Tok::Int(n), pos));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = lx.chars.peek() {
                if d.is_alphanumeric() || d == '_' {
                    s.push(d);
                    lx.bump();
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(s), pos));
            continue;
        }
        lx.bump();
        let tok = match c {
            ':' => Tok::Colon,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '=' => Tok::Eq,
            '+' => Tok::Plus,
            '-' => {
                if lx.chars.peek() == Some(&'>') {
                    lx.bump();
                    Tok::Arrow
                } else {
                    Tok::Minus
                }
            }
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '.' => {
                if lx.chars.peek() == Some(&'.') {
                    lx.bump();
                    Tok::DotDot
                } else {
                    return Err(ParseError::new(pos, "unexpected '.'"));
                }
            }
            other => {
                return Err(ParseError::new(
                    pos,
                    alloc::format!("unexpected character {:?}", other),
                ))
            }
        };
        out.push((tok, pos));
    }
}

// ----------------------------------------------------------------- ast --

#[derive(Clone, Debug)]
enum Expr {
    Num { pos: Pos, num: i64, den: i64 },
    Gen { pos: Pos, name: String },
    Idem { pos: Pos, vertex: String },
    Prod(Vec<Expr>),
    /// (negated, term) pairs.
    Sum(Vec<(bool, Expr)>),
}

impl Expr {
    fn pos(&self) -> Pos {
        match self {
            Expr::Num { pos, .. } | Expr::Gen { pos, .. } | Expr::Idem { pos, .. } => *pos,
            Expr::Prod(fs) => fs[0].pos(),
            Expr::Sum(ts) => ts[0].1.pos(),
        }
    }
}

#[derive(Clone, Debug)]
struct GenDecl {
    pos: Pos,
    name: String,
    src: String,
    dst: String,
    degree: i64,
    weight: Option<i64>,
}

#[derive(Clone, Debug)]
struct DocAst {
    field: Option<FieldSpec>,
    vertices: Vec<(String, Decoration, Pos)>,
    gens: Vec<GenDecl>,
    /// (generator, pos, arity restriction, rhs); arity `None` for `d`.
    diffs: Vec<(String, Pos, Option<u8>, Expr)>,
    augs: Vec<(String, Pos, Expr)>,
    twist: Option<(String, Pos, Vec<(String, Pos, Expr)>)>,
    window: Option<(i64, i64, usize)>,
}

// --------------------------------------------------------------- parser --

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos, ParseError> {
        let (t, pos) = self.next();
        if t == tok {
            Ok(pos)
        } else {
            Err(ParseError::new(pos, alloc::format!("expected {}, found {}", tok, t)))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        let (t, pos) = self.next();
        match t {
            Tok::Ident(s) => Ok((s, pos)),
            other => {
                Err(ParseError::new(pos, alloc::format!("expected identifier, found {}", other)))
            }
        }
    }

    /// A vertex id is an identifier or a bare integer.
    fn vertex_name(&mut self) -> Result<(String, Pos), ParseError> {
        let (t, pos) = self.next();
        match t {
            Tok::Ident(s) => Ok((s, pos)),
            Tok::Int(n) => Ok((alloc::format!("{}", n), pos)),
            other => {
                Err(ParseError::new(pos, alloc::format!("expected vertex id, found {}", other)))
            }
        }
    }

    fn signed_int(&mut self) -> Result<(i64, Pos), ParseError> {
        let neg = if *self.peek() == Tok::Minus {
            self.next();
            true
        } else {
            false
        };
        let (t, pos) = self.next();
        match t {
            Tok::Int(n) => Ok((if neg { -n } else { n }, pos)),
            other => Err(ParseError::new(pos, alloc::format!("expected integer, found {}", other))),
        }
    }

    fn document(&mut self) -> Result<DocAst, ParseError> {
        let mut doc = DocAst {
            field: None,
            vertices: Vec::new(),
            gens: Vec::new(),
            diffs: Vec::new(),
            augs: Vec::new(),
            twist: None,
            window: None,
        };
        loop {
            let pos = self.pos();
            match self.peek().clone() {
                Tok::Eof => return Ok(doc),
                Tok::Ident(kw) => match kw.as_str() {
                    "field" => {
                        self.next();
                        let (name, npos) = self.ident()?;
                        let spec = match name.as_str() {
                            "Q" | "q" => FieldSpec::Rationals,
                            "GF" | "gf" => {
                                self.expect(Tok::LParen)?;
                                let (p, ppos) = self.signed_int()?;
                                self.expect(Tok::RParen)?;
                                if p < 2 {
                                    return Err(ParseError::new(ppos, "modulus must be >= 2"));
                                }
                                let spec = FieldSpec::PrimeField(p as u64);
                                if spec.validate().is_err() {
                                    return Err(ParseError::new(
                                        ppos,
                                        alloc::format!("{} is not prime", p),
                                    ));
                                }
                                spec
                            }
                            other => {
                                return Err(ParseError::new(
                                    npos,
                                    alloc::format!(
                                        "unknown field {} (expected Q or GF(p))",
                                        other
                                    ),
                                ))
                            }
                        };
                        if doc.field.is_some() {
                            return Err(ParseError::new(pos, "duplicate field declaration"));
                        }
                        doc.field = Some(spec);
                        self.expect(Tok::Semi)?;
                    }
                    "vertices" => {
                        self.next();
                        loop {
                            let (name, vpos) = self.vertex_name()?;
                            let (t, dpos) = self.next();
                            let dec = match t {
                                Tok::Plus => Decoration::Plus,
                                Tok::Minus => Decoration::Minus,
                                other => {
                                    return Err(ParseError::new(
                                        dpos,
                                        alloc::format!(
                                            "expected + or - decoration, found {}",
                                            other
                                        ),
                                    ))
                                }
                            };
                            doc.vertices.push((name, dec, vpos));
                            match self.next() {
                                (Tok::Comma, _) => continue,
                                (Tok::Semi, _) => break,
                                (other, opos) => {
                                    return Err(ParseError::new(
                                        opos,
                                        alloc::format!("expected ',' or ';', found {}", other),
                                    ))
                                }
                            }
                        }
                    }
                    "gen" => {
                        self.next();
                        let (name, npos) = self.ident()?;
                        self.expect(Tok::Colon)?;
                        let (src, _) = self.vertex_name()?;
                        self.expect(Tok::Arrow)?;
                        let (dst, _) = self.vertex_name()?;
                        self.expect(Tok::Comma)?;
                        let (kw, kpos) = self.ident()?;
                        if kw != "deg" {
                            return Err(ParseError::new(kpos, "expected 'deg'"));
                        }
                        let (degree, _) = self.signed_int()?;
                        let mut weight = None;
                        if *self.peek() == Tok::Comma {
                            self.next();
                            let (kw, kpos) = self.ident()?;
                            if kw != "weight" {
                                return Err(ParseError::new(kpos, "expected 'weight'"));
                            }
                            let (w, _) = self.signed_int()?;
                            weight = Some(w);
                        }
                        self.expect(Tok::Semi)?;
                        doc.gens.push(GenDecl { pos: npos, name, src, dst, degree, weight });
                    }
                    "d" => {
                        self.next();
                        let (name, npos) = self.ident()?;
                        self.expect(Tok::Eq)?;
                        let rhs = self.expr(0)?;
                        self.expect(Tok::Semi)?;
                        doc.diffs.push((name, npos, None, rhs));
                    }
                    "delta" => {
                        self.next();
                        self.expect(Tok::LBracket)?;
                        let (arity, apos) = self.signed_int()?;
                        if !(1..=32).contains(&arity) {
                            return Err(ParseError::new(apos, "delta arity must be in 1..=32"));
                        }
                        self.expect(Tok::RBracket)?;
                        let (name, npos) = self.ident()?;
                        self.expect(Tok::Eq)?;
                        let rhs = self.expr(0)?;
                        self.expect(Tok::Semi)?;
                        doc.diffs.push((name, npos, Some(arity as u8), rhs));
                    }
                    "aug" => {
                        self.next();
                        let (name, npos) = self.ident()?;
                        self.expect(Tok::Eq)?;
                        let rhs = self.expr(0)?;
                        self.expect(Tok::Semi)?;
                        doc.augs.push((name, npos, rhs));
                    }
                    "twist" => {
                        self.next();
                        let (kw, kpos) = self.ident()?;
                        if kw != "into" {
                            return Err(ParseError::new(kpos, "expected 'into'"));
                        }
                        let (target, tpos) = self.ident()?;
                        self.expect(Tok::LBrace)?;
                        let mut entries = Vec::new();
                        while *self.peek() != Tok::RBrace {
                            if *self.peek() == Tok::Eof {
                                return Err(ParseError::new(self.pos(), "unterminated twist block"));
                            }
                            let (name, npos) = self.ident()?;
                            self.expect(Tok::Eq)?;
                            let rhs = self.expr(0)?;
                            self.expect(Tok::Semi)?;
                            entries.push((name, npos, rhs));
                        }
                        self.expect(Tok::RBrace)?;
                        if doc.twist.is_some() {
                            return Err(ParseError::new(pos, "duplicate twist block"));
                        }
                        doc.twist = Some((target, tpos, entries));
                    }
                    "window" => {
                        self.next();
                        let (lo, _) = self.signed_int()?;
                        self.expect(Tok::DotDot)?;
                        let (hi, hpos) = self.signed_int()?;
                        let (kw, kpos) = self.ident()?;
                        if kw != "maxlen" {
                            return Err(ParseError::new(kpos, "expected 'maxlen'"));
                        }
                        let (ml, mpos) = self.signed_int()?;
                        self.expect(Tok::Semi)?;
                        if lo > hi {
                            return Err(ParseError::new(hpos, "window bounds out of order"));
                        }
                        if ml < 0 {
                            return Err(ParseError::new(mpos, "maxlen must be nonnegative"));
                        }
                        if doc.window.is_some() {
                            return Err(ParseError::new(pos, "duplicate window declaration"));
                        }
                        doc.window = Some((lo, hi, ml as usize));
                    }
                    other => {
                        return Err(ParseError::new(
                            pos,
                            alloc::format!("unknown statement keyword {}", other),
                        ))
                    }
                },
                other => {
                    return Err(ParseError::new(
                        pos,
                        alloc::format!("expected a statement, found {}", other),
                    ))
                }
            }
        }
    }

    fn expr(&mut self, depth: usize) -> Result<Expr, ParseError> {
        if depth > MAX_PAREN_DEPTH {
            return Err(ParseError::new(self.pos(), "expression nesting too deep"));
        }
        let mut terms = Vec::new();
        let mut neg = match self.peek() {
            Tok::Minus => {
                self.next();
                true
            }
            Tok::Plus => {
                self.next();
                false
            }
            _ => false,
        };
        loop {
            let term = self.term(depth)?;
            terms.push((neg, term));
            match self.peek() {
                Tok::Plus => {
                    self.next();
                    neg = false;
                }
                Tok::Minus => {
                    self.next();
                    neg = true;
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 && !terms[0].0 {
            terms.pop().unwrap().1
        } else {
            Expr::Sum(terms)
        })
    }

    fn term(&mut self, depth: usize) -> Result<Expr, ParseError> {
        let mut factors = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Int(num) => {
                    let pos = self.pos();
                    self.next();
                    let den = if *self.peek() == Tok::Slash {
                        self.next();
                        let (t, dpos) = self.next();
                        match t {
                            Tok::Int(0) => return Err(ParseError::new(dpos, "zero denominator")),
                            Tok::Int(d) => d,
                            other => {
                                return Err(ParseError::new(
                                    dpos,
                                    alloc::format!("expected denominator, found {}", other),
                                ))
                            }
                        }
                    } else {
                        1
                    };
                    factors.push(Expr::Num { pos, num, den });
                }
                Tok::Ident(name) => {
                    let pos = self.pos();
                    self.next();
                    if name == "e" && *self.peek() == Tok::LParen {
                        self.next();
                        let (vertex, _) = self.vertex_name()?;
                        self.expect(Tok::RParen)?;
                        factors.push(Expr::Idem { pos, vertex });
                    } else {
                        factors.push(Expr::Gen { pos, name });
                    }
                }
                Tok::LParen => {
                    self.next();
                    let inner = self.expr(depth + 1)?;
                    self.expect(Tok::RParen)?;
                    factors.push(inner);
                }
                Tok::Star => {
                    if factors.is_empty() {
                        return Err(ParseError::new(self.pos(), "'*' needs a left factor"));
                    }
                    self.next();
                }
                _ => break,
            }
        }
        match factors.len() {
            0 => Err(ParseError::new(self.pos(), "expected an expression term")),
            1 => Ok(factors.pop().unwrap()),
            _ => Ok(Expr::Prod(factors)),
        }
    }
}

// ------------------------------------------------------------ validation --

/// A twisting-cochain block: values live in the target document's algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistDecl {
    pub target: String,
    /// source generator -> element of the target quiver (zeros dropped)
    pub values: BTreeMap<u32, Element>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowDecl {
    pub d_min: i64,
    pub d_max: i64,
    pub max_len: usize,
}

/// A validated document: a free DG-presentation (generator degrees in the
/// algebra convention), plus optional augmentation, twisting cochain and
/// window defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecDoc {
    pub name: String,
    pub field: FieldSpec,
    pub module: GradedModule,
    pub differential: Derivation,
    pub augmentation: BTreeMap<u32, Scalar>,
    pub twist: Option<TwistDecl>,
    pub window: Option<WindowDecl>,
}

impl SpecDoc {
    pub fn quiver(&self) -> &alloc::sync::Arc<Quiver> {
        &self.module.quiver
    }

    /// The coaugmented coalgebra this document presents the cobar of
    /// (generator degrees shifted down by one, coproducts read off the
    /// word-length parts of the differential).
    pub fn coalgebra(&self) -> crate::ainfty::AInfCoalg {
        crate::ainfty::AInfCoalg::from_ce_presentation(
            self.quiver(),
            &self.differential,
            &self.field,
            &self.name,
        )
    }

    /// The same document over another exact field.
    pub fn with_field(&self, field: FieldSpec) -> Result<SpecDoc, crate::ainfty::StructureError> {
        let mut images = BTreeMap::new();
        for (g, img) in self.differential.images.iter() {
            images.insert(*g, crate::ainfty::convert_element_to_field(img, &field)?);
        }
        let mut augmentation = BTreeMap::new();
        for (g, v) in self.augmentation.iter() {
            augmentation.insert(*g, crate::ainfty::convert_scalar_to_field(v, &field)?);
        }
        let twist = match &self.twist {
            None => None,
            Some(t) => {
                let mut values = BTreeMap::new();
                for (g, e) in t.values.iter() {
                    values.insert(*g, crate::ainfty::convert_element_to_field(e, &field)?);
                }
                Some(TwistDecl { target: t.target.clone(), values })
            }
        };
        Ok(SpecDoc {
            name: self.name.clone(),
            field,
            module: self.module.clone(),
            differential: Derivation::new(images, 1),
            augmentation,
            twist,
            window: self.window,
        })
    }
}

struct Validator<'a> {
    resolver: &'a mut dyn FnMut(&str) -> Option<SpecDoc>,
}

impl Validator<'_> {
    fn eval(
        &self,
        expr: &Expr,
        quiver: &Quiver,
        field: &FieldSpec,
    ) -> Result<Element, ParseError> {
        match expr {
            Expr::Num { pos, num, den } => {
                let s = field
                    .from_ratio(*num, *den)
                    .map_err(|e| ParseError::new(*pos, alloc::format!("bad coefficient: {}", e)))?;
                Ok(Element::unit(quiver, field).scale(&s))
            }
            Expr::Gen { pos, name } => match quiver.gen_by_name(name) {
                Some(id) => Ok(Element::generator(id, field)),
                None => Err(ParseError::new(*pos, alloc::format!("unknown generator {}", name))),
            },
            Expr::Idem { pos, vertex } => match quiver.ring.vertex_index(vertex) {
                Some(v) => Ok(Element::idem(v, field)),
                None => Err(ParseError::new(*pos, alloc::format!("unknown vertex {}", vertex))),
            },
            Expr::Prod(factors) => {
                let mut acc = Element::unit(quiver, field);
                for f in factors {
                    let rhs = self.eval(f, quiver, field)?;
                    acc = acc.mul(&rhs, quiver);
                }
                Ok(acc)
            }
            Expr::Sum(terms) => {
                let mut acc = Element::zero();
                for (neg, t) in terms {
                    let v = self.eval(t, quiver, field)?;
                    acc = if *neg { acc.sub(&v) } else { acc.add(&v) };
                }
                Ok(acc)
            }
        }
    }

    fn validate(&mut self, ast: DocAst, name: &str) -> Result<SpecDoc, ParseError> {
        let field = ast.field.unwrap_or(FieldSpec::Rationals);
        if ast.vertices.is_empty() {
            return Err(ParseError::new(Pos { line: 1, col: 1 }, "document declares no vertices"));
        }
        let mut vertices = Vec::new();
        for (vname, dec, vpos) in ast.vertices.iter() {
            if vertices.iter().any(|(n, _): &(String, Decoration)| n == vname) {
                return Err(ParseError::new(*vpos, alloc::format!("duplicate vertex {}", vname)));
            }
            vertices.push((vname.clone(), *dec));
        }
        let ring = GroundRing::new(vertices)
            .map_err(|e| ParseError::new(Pos { line: 1, col: 1 }, alloc::format!("{}", e)))?;
        let mut gens = Vec::new();
        for g in ast.gens.iter() {
            if g.name == "e" {
                return Err(ParseError::new(g.pos, "generator name 'e' is reserved"));
            }
            if ast.gens.iter().take_while(|h| h.name != g.name).count() != ast
                .gens
                .iter()
                .position(|h| core::ptr::eq(h, g))
                .unwrap_or(0)
            {
                return Err(ParseError::new(g.pos, alloc::format!("duplicate generator {}", g.name)));
            }
            let src = ring
                .vertex_index(&g.src)
                .ok_or_else(|| ParseError::new(g.pos, alloc::format!("unknown vertex {}", g.src)))?;
            let dst = ring
                .vertex_index(&g.dst)
                .ok_or_else(|| ParseError::new(g.pos, alloc::format!("unknown vertex {}", g.dst)))?;
            gens.push(GenSym {
                name: g.name.clone(),
                src,
                dst,
                degree: g.degree,
                weight: g.weight,
            });
        }
        let quiver = Quiver::new(ring, gens).map_err(|e| {
            let pos = ast.gens.first().map(|g| g.pos).unwrap_or(Pos { line: 1, col: 1 });
            ParseError::new(pos, alloc::format!("{}", e))
        })?;
        let quiver = alloc::sync::Arc::new(quiver);

        // differential and delta blocks merge into one derivation
        let mut images: BTreeMap<u32, Element> = BTreeMap::new();
        for (gname, pos, arity, rhs) in ast.diffs.iter() {
            let gid = quiver.gen_by_name(gname).ok_or_else(|| {
                ParseError::new(*pos, alloc::format!("unknown generator {}", gname))
            })?;
            let gs = quiver.gen(gid).clone();
            let value = self.eval(rhs, &quiver, &field)?;
            for (w, _) in value.terms() {
                if let Some(want) = arity {
                    if w.len() != *want as usize {
                        return Err(ParseError::new(
                            rhs.pos(),
                            alloc::format!(
                                "delta[{}] {} contains a length-{} word",
                                want,
                                gname,
                                w.len()
                            ),
                        ));
                    }
                }
                if w.degree(&quiver) != gs.degree + 1 {
                    return Err(ParseError::new(
                        rhs.pos(),
                        alloc::format!(
                            "degree mismatch in d {}: term {} has degree {}, expected {}",
                            gname,
                            w.display(&quiver),
                            w.degree(&quiver),
                            gs.degree + 1
                        ),
                    ));
                }
                if w.src(&quiver) != gs.src || w.dst(&quiver) != gs.dst {
                    return Err(ParseError::new(
                        rhs.pos(),
                        alloc::format!(
                            "slot mismatch in d {}: term {} does not lie in ({} -> {})",
                            gname,
                            w.display(&quiver),
                            quiver.ring.vertex_name(gs.src),
                            quiver.ring.vertex_name(gs.dst)
                        ),
                    ));
                }
            }
            match images.get(&gid) {
                None => {
                    images.insert(gid, value);
                }
                Some(old) if arity.is_some() => {
                    let merged = old.add(&value);
                    images.insert(gid, merged);
                }
                Some(_) => {
                    return Err(ParseError::new(
                        *pos,
                        alloc::format!("duplicate differential for {}", gname),
                    ))
                }
            }
        }
        images.retain(|_, v| !v.is_zero());
        let differential = Derivation::new(images, 1);

        let mut augmentation = BTreeMap::new();
        for (gname, pos, rhs) in ast.augs.iter() {
            let gid = quiver.gen_by_name(gname).ok_or_else(|| {
                ParseError::new(*pos, alloc::format!("unknown generator {}", gname))
            })?;
            let gs = quiver.gen(gid);
            if gs.degree != 0 || gs.src != gs.dst {
                return Err(ParseError::new(
                    *pos,
                    alloc::format!("augmentation on {} (must be degree 0, diagonal)", gname),
                ));
            }
            let value = self.eval(rhs, &quiver, &field)?;
            let mut scalar: Option<Scalar> = None;
            for (w, c) in value.terms() {
                match w {
                    Word::Idem(_) => match &scalar {
                        None => scalar = Some(c.clone()),
                        Some(s) if s == c => {}
                        _ => {
                            return Err(ParseError::new(
                                rhs.pos(),
                                "augmentation value must be a scalar",
                            ))
                        }
                    },
                    _ => {
                        return Err(ParseError::new(
                            rhs.pos(),
                            "augmentation value must be a scalar",
                        ))
                    }
                }
            }
            let s = scalar.unwrap_or(field.zero());
            if !s.is_zero() && augmentation.insert(gid, s).is_some() {
                return Err(ParseError::new(
                    *pos,
                    alloc::format!("duplicate augmentation for {}", gname),
                ));
            }
        }

        let twist = match ast.twist {
            None => None,
            Some((target, tpos, entries)) => {
                let target_doc = (self.resolver)(&target).ok_or_else(|| {
                    ParseError::new(tpos, alloc::format!("unknown twist target {}", target))
                })?;
                let tq = target_doc.quiver();
                let mut values = BTreeMap::new();
                for (gname, pos, rhs) in entries.iter() {
                    let gid = quiver.gen_by_name(gname).ok_or_else(|| {
                        ParseError::new(*pos, alloc::format!("unknown generator {}", gname))
                    })?;
                    let gs = quiver.gen(gid);
                    let value = self.eval(rhs, tq, &target_doc.field)?;
                    let value = crate::ainfty::convert_element_to_field(&value, &field)
                        .map_err(|e| ParseError::new(*pos, alloc::format!("{}", e)))?;
                    for (w, _) in value.terms() {
                        if w.degree(tq) != gs.degree {
                            return Err(ParseError::new(
                                rhs.pos(),
                                alloc::format!(
                                    "twist value for {} has degree {}, expected {}",
                                    gname,
                                    w.degree(tq),
                                    gs.degree
                                ),
                            ));
                        }
                        if w.src(tq) != gs.src || w.dst(tq) != gs.dst {
                            return Err(ParseError::new(
                                rhs.pos(),
                                alloc::format!("twist value for {} leaves its slot", gname),
                            ));
                        }
                    }
                    if !value.is_zero() && values.insert(gid, value).is_some() {
                        return Err(ParseError::new(
                            *pos,
                            alloc::format!("duplicate twist value for {}", gname),
                        ));
                    }
                }
                Some(TwistDecl { target, values })
            }
        };

        let window =
            ast.window.map(|(lo, hi, ml)| WindowDecl { d_min: lo, d_max: hi, max_len: ml });

        Ok(SpecDoc {
            name: name.to_string(),
            field,
            module: GradedModule { quiver, includes_idempotents: true },
            differential,
            augmentation,
            twist,
            window,
        })
    }
}

/// Parses a standalone expression against a document's generators (used by
/// the command-line driver for rewrite rules and primitive targets).
pub fn parse_expression(text: &str, doc: &SpecDoc) -> Result<Element, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0 };
    let expr = p.expr(0)?;
    if *p.peek() != Tok::Eof {
        return Err(ParseError::new(p.pos(), "trailing input after expression"));
    }
    let mut none = |_: &str| None;
    let v = Validator { resolver: &mut none };
    v.eval(&expr, doc.quiver(), &doc.field)
}

/// Parses and validates a document. Twist targets resolve against the
/// bundled corpus.
pub fn parse(text: &str, name: &str) -> Result<SpecDoc, ParseError> {
    let mut corpus = |id: &str| load_example(id).ok();
    parse_with_resolver(text, name, &mut corpus)
}

/// Parses with a custom twist-target resolver.
pub fn parse_with_resolver(
    text: &str,
    name: &str,
    resolver: &mut dyn FnMut(&str) -> Option<SpecDoc>,
) -> Result<SpecDoc, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0 };
    let ast = p.document()?;
    Validator { resolver }.validate(ast, name)
}

// ------------------------------------------------------------ serializer --

/// Canonical text for a document; `parse(serialize(doc))` is structurally
/// equal to `doc`. Terms serialize in the canonical order (length, then
/// lexicographic by declaration).
pub fn serialize(doc: &SpecDoc) -> String {
    use core::fmt::Write;
    let q = doc.quiver();
    let mut out = String::new();
    let _ = writeln!(out, "field {};", doc.field);
    let verts: Vec<String> =
        q.ring.vertices().map(|(_, n, d)| alloc::format!("{}{}", n, d)).collect();
    let _ = writeln!(out, "vertices {};", verts.join(", "));
    for (_, g) in q.gens() {
        let weight = match g.weight {
            Some(w) => alloc::format!(", weight {}", w),
            None => String::new(),
        };
        let _ = writeln!(
            out,
            "gen {} : {} -> {}, deg {}{};",
            g.name,
            q.ring.vertex_name(g.src),
            q.ring.vertex_name(g.dst),
            g.degree,
            weight
        );
    }
    for (gid, g) in q.gens() {
        if let Some(img) = doc.differential.image_of(gid) {
            if !img.is_zero() {
                let _ = writeln!(out, "d {} = {};", g.name, img.display(q));
            }
        }
    }
    for (gid, g) in q.gens() {
        if let Some(v) = doc.augmentation.get(&gid) {
            if !v.is_zero() {
                let _ = writeln!(out, "aug {} = {};", g.name, v);
            }
        }
    }
    if let Some(t) = &doc.twist {
        let _ = writeln!(out, "twist into {} {{", t.target);
        if let Ok(target) = load_example(&t.target) {
            for (gid, g) in q.gens() {
                if let Some(v) = t.values.get(&gid) {
                    let _ = writeln!(out, "  {} = {};", g.name, v.display(target.quiver()));
                }
            }
        }
        let _ = writeln!(out, "}}");
    }
    if let Some(w) = &doc.window {
        let _ = writeln!(out, "window {} .. {} maxlen {};", w.d_min, w.d_max, w.max_len);
    }
    out
}

// --------------------------------------------------------------- corpus --

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExampleError {
    Unknown(String),
    Invalid(String, ParseError),
}

impl fmt::Display for ExampleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExampleError::Unknown(id) => write!(f, "unknown example id {}", id),
            ExampleError::Invalid(id, e) => write!(f, "bundled example {} invalid: {}", id, e),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ExampleError {}

const CORPUS: &[(&str, &str)] = &[
    ("unknot", include_str!("../corpus/unknot.alg")),
    ("unknot_plus", include_str!("../corpus/unknot_plus.alg")),
    ("unknot_filling", include_str!("../corpus/unknot_filling.alg")),
    ("hopf", include_str!("../corpus/hopf.alg")),
    ("hopf_reduced", include_str!("../corpus/hopf_reduced.alg")),
    ("hopf_small", include_str!("../corpus/hopf_small.alg")),
    ("hopf_parallel", include_str!("../corpus/hopf_parallel.alg")),
    ("s1_model", include_str!("../corpus/s1_model.alg")),
    ("trefoil", include_str!("../corpus/trefoil.alg")),
    ("mirror72", include_str!("../corpus/mirror72.alg")),
];

/// The bundled example ids. The products-of-spheres family is addressed as
/// `spheres_<m>_<k>` for m >= 2, k >= 1; three representatives are listed.
pub fn example_ids() -> Vec<String> {
    let mut ids: Vec<String> = CORPUS.iter().map(|(id, _)| id.to_string()).collect();
    ids.push("unknot_minus".to_string());
    ids.push("spheres_2_1".to_string());
    ids.push("spheres_2_2".to_string());
    ids.push("spheres_3_2".to_string());
    ids.sort();
    ids
}

/// Renders the products-of-spheres document for `S^k x S^(m-1)`: the printed
/// sign expressions `(-1)^(km)` and `(-1)^(k(m-1))` expand at load time.
fn spheres_text(m: i64, k: i64) -> String {
    let bs1 = if (k * m) % 2 == 0 { "-" } else { "+" };
    let s2s1 = if (k * (m - 1)) % 2 == 0 { "+" } else { "-" };
    alloc::format!(
        "# Products of spheres, plus decoration, parallel copies (m = {m}, k = {k}).\n\
         field Q;\n\
         vertices 1+;\n\
         gen s1 : 1 -> 1, deg {};\n\
         gen s2 : 1 -> 1, deg {};\n\
         gen y : 1 -> 1, deg {};\n\
         gen a : 1 -> 1, deg {};\n\
         gen b : 1 -> 1, deg {};\n\
         d a = y {bs1} b s1 - s1 b;\n\
         d y = s1 s2 {s2s1} s2 s1;\n\
         d b = s2;\n",
        1 - k,
        2 - m,
        2 - m - k,
        1 - m - k,
        1 - m,
    )
}

/// Loads a bundled example by id.
pub fn load_example(id: &str) -> Result<SpecDoc, ExampleError> {
    let canonical = if id == "unknot_minus" { "unknot" } else { id };
    if let Some((_, text)) = CORPUS.iter().find(|(name, _)| *name == canonical) {
        return parse(text, canonical).map_err(|e| ExampleError::Invalid(canonical.to_string(), e));
    }
    if let Some(rest) = canonical.strip_prefix("spheres_") {
        let parts: Vec<&str> = rest.split('_').collect();
        if parts.len() == 2 {
            if let (Ok(m), Ok(k)) = (parts[0].parse::<i64>(), parts[1].parse::<i64>()) {
                if m >= 2 && k >= 1 && m + k <= 40 {
                    let text = spheres_text(m, k);
                    return parse(&text, canonical)
                        .map_err(|e| ExampleError::Invalid(canonical.to_string(), e));
                }
            }
        }
    }
    Err(ExampleError::Unknown(id.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    #[test]
    fn hopf_document_matches_the_printed_table() {
        let doc = load_example("hopf").unwrap();
        let q = doc.quiver();
        assert_eq!(q.gen_count(), 9);
        assert_eq!(q.ring.vertex_count(), 2);
        let id = |n: &str| q.gen_by_name(n).unwrap();
        let dc1 = doc.differential.image_of(id("c1")).unwrap();
        assert_eq!(format!("{}", dc1.display(q)), "e(1) + s1 + c12*c21");
        let du1 = doc.differential.image_of(id("u1")).unwrap();
        assert_eq!(format!("{}", du1.display(q)), "-s1*l1 + k1*s1");
        assert_eq!(doc.augmentation[&id("s1")], doc.field.from_integer(-1));
        assert_eq!(doc.augmentation[&id("t1")], doc.field.from_integer(-1));
    }

    #[test]
    fn s1_model_differential() {
        let doc = load_example("s1_model").unwrap();
        let q = doc.quiver();
        let dk1 = doc.differential.image_of(q.gen_by_name("k1").unwrap()).unwrap();
        assert_eq!(format!("{}", dk1.display(q)), "e(1) - s1*t1");
    }

    #[test]
    fn unknown_example_is_an_error() {
        assert!(matches!(load_example("bogus"), Err(ExampleError::Unknown(_))));
    }

    #[test]
    fn unknown_generator_has_a_position() {
        let text = "field Q;\nvertices 1-;\ngen c1 : 1 -> 1, deg -1;\nd c1 = s1 + c12*c21;\n";
        let err = parse(text, "t").unwrap_err();
        assert_eq!(err.pos.line, 4);
        assert!(err.message.contains("unknown generator"));
    }

    #[test]
    fn degree_mismatch_is_a_semantic_error() {
        let text =
            "field Q;\nvertices 1-;\ngen x : 1 -> 1, deg -1;\ngen y : 1 -> 1, deg -1;\nd x = y;\n";
        let err = parse(text, "t").unwrap_err();
        assert!(err.message.contains("degree mismatch"), "{}", err.message);
    }

    #[test]
    fn slot_mismatch_is_a_semantic_error() {
        let text = "field Q;\nvertices 1-, 2-;\ngen x : 1 -> 1, deg -1;\ngen y : 1 -> 2, deg 0;\nd x = y;\n";
        let err = parse(text, "t").unwrap_err();
        assert!(err.message.contains("slot mismatch"), "{}", err.message);
    }

    #[test]
    fn gfp_coefficients_reduce_at_parse_time() {
        let text = "field GF(5);\nvertices 1-;\ngen x : 1 -> 1, deg -1;\ngen y : 1 -> 1, deg 0;\nd x = 7 y;\n";
        let doc = parse(text, "t").unwrap();
        let q = doc.quiver();
        let dx = doc.differential.image_of(q.gen_by_name("x").unwrap()).unwrap();
        let y = Word::Path(alloc::vec![q.gen_by_name("y").unwrap()]);
        assert_eq!(dx.coeff(&y), Some(&doc.field.from_integer(2)));
    }

    #[test]
    fn delta_blocks_merge_into_the_differential() {
        let a = "field Q;\nvertices 1-;\ngen c : 1 -> 1, deg -1;\ngen s : 1 -> 1, deg 0;\nd c = s + s s;\n";
        let b = "field Q;\nvertices 1-;\ngen c : 1 -> 1, deg -1;\ngen s : 1 -> 1, deg 0;\ndelta[1] c = s;\ndelta[2] c = s s;\n";
        let da = parse(a, "t").unwrap();
        let db = parse(b, "t").unwrap();
        assert_eq!(da.differential, db.differential);
        let bad = "field Q;\nvertices 1-;\ngen c : 1 -> 1, deg -1;\ngen s : 1 -> 1, deg 0;\ndelta[2] c = s;\n";
        assert!(parse(bad, "t").is_err());
    }

    #[test]
    fn corpus_round_trips() {
        for id in example_ids() {
            let doc = load_example(&id).unwrap();
            let text = serialize(&doc);
            let back = parse(&text, &doc.name).unwrap();
            assert_eq!(doc, back, "round trip of {}", id);
        }
    }

    #[test]
    fn spheres_signs_expand_by_parity() {
        // k*m odd at (3, 1): + b s1; k*(m-1) even: + s2 s1
        let doc = load_example("spheres_3_1").unwrap();
        let q = doc.quiver();
        let id = |n: &str| q.gen_by_name(n).unwrap();
        let da = doc.differential.image_of(id("a")).unwrap();
        assert_eq!(format!("{}", da.display(q)), "y - s1*b + b*s1");
        let dy = doc.differential.image_of(id("y")).unwrap();
        assert_eq!(format!("{}", dy.display(q)), "s1*s2 + s2*s1");
        // k*m even at (2, 1): - b s1; k*(m-1) odd: - s2 s1
        let doc = load_example("spheres_2_1").unwrap();
        let q = doc.quiver();
        let id = |n: &str| q.gen_by_name(n).unwrap();
        let da = doc.differential.image_of(id("a")).unwrap();
        assert_eq!(format!("{}", da.display(q)), "y - s1*b - b*s1");
        let dy = doc.differential.image_of(id("y")).unwrap();
        assert_eq!(format!("{}", dy.display(q)), "s1*s2 - s2*s1");
    }

    #[test]
    fn twist_values_resolve_in_the_target() {
        let doc = load_example("hopf_reduced").unwrap();
        let twist = doc.twist.as_ref().unwrap();
        assert_eq!(twist.target, "hopf_small");
        let target = load_example("hopf_small").unwrap();
        let tq = target.quiver();
        let q = doc.quiver();
        let u1 = q.gen_by_name("u1").unwrap();
        assert_eq!(format!("{}", twist.values[&u1].display(tq)), "a12v*a2v*a2v*a21v");
        // explicit zero entries are normalized away
        let c1 = q.gen_by_name("c1").unwrap();
        assert!(!twist.values.contains_key(&c1));
    }

    #[test]
    fn random_documents_round_trip() {
        // 200 pseudo-random documents: random quivers with degree-consistent
        // differentials built from enumerated pair words.
        let mut state = 7u64;
        let mut next = move || {
            state = state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^ (z >> 31)
        };
        for case in 0..200 {
            let nv = 1 + (next() % 2) as usize;
            let ng = 1 + (next() % 5) as usize;
            let mut text = String::from("field Q;\nvertices ");
            for v in 0..nv {
                if v > 0 {
                    text.push_str(", ");
                }
                text.push_str(&format!("{}{}", v + 1, if next() % 2 == 0 { "-" } else { "+" }));
            }
            text.push_str(";\n");
            let mut degs = alloc::vec::Vec::new();
            let mut ends = alloc::vec::Vec::new();
            for g in 0..ng {
                let deg = -((next() % 3) as i64);
                let src = 1 + (next() as usize % nv);
                let dst = 1 + (next() as usize % nv);
                degs.push(deg);
                ends.push((src, dst));
                text.push_str(&format!("gen g{} : {} -> {}, deg {};\n", g, src, dst, deg));
            }
            for g in 0..ng {
                let want = degs[g] + 1;
                let mut terms = alloc::vec::Vec::new();
                for a in 0..ng {
                    for b in 0..ng {
                        if ends[a].1 == ends[b].0
                            && ends[a].0 == ends[g].0
                            && ends[b].1 == ends[g].1
                            && degs[a] + degs[b] == want
                            && next() % 3 == 0
                        {
                            terms.push(format!("g{} g{}", a, b));
                        }
                    }
                }
                if want == 0 && ends[g].0 == ends[g].1 && next() % 4 == 0 {
                    terms.push(format!("e({})", ends[g].0));
                }
                if !terms.is_empty() {
                    text.push_str(&format!("d g{} = {};\n", g, terms.join(" + ")));
                }
            }
            let doc = parse(&text, "rand")
                .unwrap_or_else(|e| panic!("case {} failed to parse: {}\n{}", case, e, text));
            let back = parse(&serialize(&doc), "rand").unwrap();
            assert_eq!(doc, back, "case {}", case);
        }
    }

    proptest::proptest! {
        /// The parser returns a diagnostic or a document, but never panics,
        /// on arbitrary input and on mutations of a real document.
        #[test]
        fn parser_never_panics(garbage in "\\PC*", cut in 0usize..400) {
            let _ = parse(&garbage, "fuzz");
            let real = include_str!("../corpus/hopf_reduced.alg");
            let mutated: String = real.chars().take(cut).chain(garbage.chars()).collect();
            let _ = parse(&mutated, "fuzz");
        }
    }
}
