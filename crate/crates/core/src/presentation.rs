//! Data model and parser for graded-algebra presentations, graded
//! automorphisms, and run configuration.
//!
//! File format (UTF-8, one statement per line, `#` starts a comment):
//!
//! ```text
//! field Q            | field F <p>
//! gen <name> <degree>
//! rel <polynomial expression using + - * ^ scalars and parentheses>
//! aut <name> : <gen> -> <poly> ; <gen> -> <poly> ; ...
//! cap internal <n>
//! cap homological <n>
//! ```
//!
//! Generators must be declared before they are used; the field line must
//! precede relations and automorphisms. An `aut` statement must give an image
//! for every generator. Relations must be homogeneous of internal degree at
//! least 2. An automorphism named `mu` is treated downstream as the declared
//! Nakayama automorphism of A.

use crate::error::{Error, Result};
use crate::freealg::{deglex_compare, Field, FieldScalar, NcPoly, Word};
use crate::groebner::GroebnerData;
use crate::linalg::{inverse, Mat};
use std::cmp::Ordering;
use std::collections::BTreeMap;

pub const DEFAULT_CAP_INTERNAL: u32 = 10;
pub const DEFAULT_CAP_HOMOLOGICAL: u32 = 5;

/// One graded generator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

/// A graded algebra automorphism given by one homogeneous image per
/// generator, of the same internal degree as that generator. Extends
/// multiplicatively to the whole algebra.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AutomorphismSpec {
    images: Vec<NcPoly>,
}

/// A finitely presented connected graded algebra, together with declared
/// automorphisms and truncation caps.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlgebraPresentation {
    pub field: Field,
    pub generators: Vec<Generator>,
    pub relations: Vec<NcPoly>,
    pub declared_autos: Vec<(String, AutomorphismSpec)>,
    pub cap_internal: u32,
    pub cap_homological: u32,
}

impl AlgebraPresentation {
    pub fn gen_degrees(&self) -> Vec<u32> {
        self.generators.iter().map(|g| g.degree).collect()
    }

    pub fn gen_names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.name.clone()).collect()
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn declared_auto(&self, name: &str) -> Option<&AutomorphismSpec> {
        self.declared_autos
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, a)| a)
    }

    /// True when every generator has internal degree 1 (the hypothesis for
    /// the degree-one Nakayama identities).
    pub fn generated_in_degree_one(&self) -> bool {
        self.generators.iter().all(|g| g.degree == 1)
    }

    /// Canonical text form. Parsing the result reproduces this presentation,
    /// and printing is idempotent on its own output.
    pub fn print_canonical(&self) -> String {
        let names = self.gen_names();
        let mut out = String::new();
        out.push_str(&format!("field {}\n", match self.field {
            Field::Q => "Q".to_string(),
            Field::Fp(p) => format!("F {p}"),
        }));
        for g in &self.generators {
            out.push_str(&format!("gen {} {}\n", g.name, g.degree));
        }
        out.push_str(&format!("cap internal {}\n", self.cap_internal));
        out.push_str(&format!("cap homological {}\n", self.cap_homological));
        for r in &self.relations {
            out.push_str(&format!("rel {}\n", r.display_with(&names)));
        }
        for (name, a) in &self.declared_autos {
            let imgs: Vec<String> = self
                .generators
                .iter()
                .enumerate()
                .map(|(i, g)| format!("{} -> {}", g.name, a.images[i].display_with(&names)))
                .collect();
            out.push_str(&format!("aut {} : {}\n", name, imgs.join(" ; ")));
        }
        out
    }
}

impl AutomorphismSpec {
    /// Validated constructor: one image per generator, homogeneous of the
    /// generator's degree.
    pub fn new(images: Vec<NcPoly>, pres: &AlgebraPresentation) -> Result<AutomorphismSpec> {
        if images.len() != pres.generators.len() {
            return Err(Error::DimensionMismatch(format!(
                "automorphism gives {} images for {} generators",
                images.len(),
                pres.generators.len()
            )));
        }
        for (i, img) in images.iter().enumerate() {
            if img.field() != pres.field {
                return Err(Error::FieldMismatch(img.field().name(), pres.field.name()));
            }
            let want = pres.generators[i].degree;
            if !img.is_zero() && img.homogeneous_degree() != Some(want) {
                return Err(Error::InhomogeneousRelation(format!(
                    "image of {} must be homogeneous of degree {}",
                    pres.generators[i].name, want
                )));
            }
        }
        Ok(AutomorphismSpec { images })
    }

    /// The scaling automorphism x |-> c^{|x|} x on each generator.
    pub fn xi(pres: &AlgebraPresentation, c: &FieldScalar) -> Result<AutomorphismSpec> {
        if c.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let degs = pres.gen_degrees();
        let images = (0..pres.generators.len())
            .map(|i| {
                let s = c.pow(degs[i] as i64)?;
                Ok(NcPoly::generator(pres.field, i as u32, &degs).scale(&s))
            })
            .collect::<Result<Vec<_>>>()?;
        AutomorphismSpec::new(images, pres)
    }

    /// Diagonal automorphism x_i |-> s_i x_i.
    pub fn diagonal(pres: &AlgebraPresentation, scalars: &[FieldScalar]) -> Result<AutomorphismSpec> {
        if scalars.len() != pres.generators.len() {
            return Err(Error::DimensionMismatch("one scalar per generator".into()));
        }
        let degs = pres.gen_degrees();
        let images = scalars
            .iter()
            .enumerate()
            .map(|(i, s)| NcPoly::generator(pres.field, i as u32, &degs).scale(s))
            .collect();
        AutomorphismSpec::new(images, pres)
    }

    /// Linear automorphism on a presentation all of whose generators sit in
    /// one common degree: x_c |-> sum_r M[r][c] x_r.
    pub fn linear(pres: &AlgebraPresentation, m: &Mat) -> Result<AutomorphismSpec> {
        let n = pres.generators.len();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch("square generator matrix".into()));
        }
        let degs = pres.gen_degrees();
        if !degs.windows(2).all(|w| w[0] == w[1]) {
            return Err(Error::DimensionMismatch(
                "linear automorphism requires generators of equal degree".into(),
            ));
        }
        let images = (0..n)
            .map(|c| {
                let mut p = NcPoly::zero(pres.field);
                for r in 0..n {
                    p = p.add(&NcPoly::generator(pres.field, r as u32, &degs).scale(m.get(r, c)))?;
                }
                Ok(p)
            })
            .collect::<Result<Vec<_>>>()?;
        AutomorphismSpec::new(images, pres)
    }

    pub fn identity(pres: &AlgebraPresentation) -> AutomorphismSpec {
        let degs = pres.gen_degrees();
        let images = (0..pres.generators.len())
            .map(|i| NcPoly::generator(pres.field, i as u32, &degs))
            .collect();
        AutomorphismSpec { images }
    }

    pub fn images(&self) -> &[NcPoly] {
        &self.images
    }

    pub fn is_identity(&self, pres: &AlgebraPresentation) -> bool {
        *self == AutomorphismSpec::identity(pres)
    }

    /// Composite (self . other): apply `other` first, then `self`.
    pub fn compose(&self, other: &AutomorphismSpec) -> Result<AutomorphismSpec> {
        let images = other
            .images
            .iter()
            .map(|img| apply_automorphism(self, img))
            .collect::<Result<Vec<_>>>()?;
        Ok(AutomorphismSpec { images })
    }

    /// Matrix of the generator-linear part in one generator degree `d`:
    /// entry (r, c) is the coefficient of the single-letter word x_r in the
    /// image of x_c, over generators of degree d only.
    pub fn generator_block(&self, pres: &AlgebraPresentation, d: u32) -> Mat {
        let idxs: Vec<usize> = pres
            .generators
            .iter()
            .enumerate()
            .filter(|(_, g)| g.degree == d)
            .map(|(i, _)| i)
            .collect();
        let degs = pres.gen_degrees();
        let mut m = Mat::zeros(pres.field, idxs.len(), idxs.len());
        for (cc, &c) in idxs.iter().enumerate() {
            for (rr, &r) in idxs.iter().enumerate() {
                let w = Word::gen(r as u32, degs[r]);
                m.set(rr, cc, self.images[c].coeff(&w));
            }
        }
        m
    }

    /// True when the image of every single generator is a scalar multiple
    /// c^{deg} of that generator for one common base scalar c; returns c.
    pub fn as_xi_scalar(&self, pres: &AlgebraPresentation) -> Option<FieldScalar> {
        let degs = pres.gen_degrees();
        let mut base: Option<FieldScalar> = None;
        for (i, img) in self.images.iter().enumerate() {
            if img.num_terms() != 1 {
                return None;
            }
            let w = Word::gen(i as u32, degs[i]);
            let c = img.coeff(&w);
            if c.is_zero() {
                return None;
            }
            // c must equal base^{deg_i}; recover and cross-check the base.
            match degs[i] {
                1 => match &base {
                    None => base = Some(c),
                    Some(b) => {
                        if *b != c {
                            return None;
                        }
                    }
                },
                d => {
                    let b = base.clone()?;
                    if b.pow(d as i64).ok()? != c {
                        return None;
                    }
                }
            }
        }
        base
    }
}

/// The unique algebra-map extension of the generator images, applied to `p`.
pub fn apply_automorphism(sigma: &AutomorphismSpec, p: &NcPoly) -> Result<NcPoly> {
    let field = p.field();
    let mut out = NcPoly::zero(field);
    for (w, c) in p.terms() {
        let mut prod = NcPoly::one(field);
        for &letter in w.letters() {
            prod = prod.mul(&sigma.images[letter as usize])?;
        }
        out = out.add(&prod.scale(c))?;
    }
    Ok(out)
}

/// True iff sigma maps every relation into the relation ideal (normal form
/// zero) and the generator-linear block in each generator degree is
/// invertible. Errors when the Gröbner data is not complete far enough to
/// reduce some image.
pub fn check_is_automorphism(
    sigma: &AutomorphismSpec,
    pres: &AlgebraPresentation,
    gb: &GroebnerData,
) -> Result<bool> {
    for rel in &pres.relations {
        let image = apply_automorphism(sigma, rel)?;
        if let Some(d) = image.homogeneous_degree() {
            if d > gb.complete_to_degree {
                return Err(Error::CapExceeded {
                    context: "automorphism check".into(),
                    needed: d,
                    cap: gb.complete_to_degree,
                });
            }
        }
        if !gb.normal_form(&image)?.is_zero() {
            return Ok(false);
        }
    }
    let mut degrees: Vec<u32> = pres.generators.iter().map(|g| g.degree).collect();
    degrees.sort_unstable();
    degrees.dedup();
    for d in degrees {
        if inverse(&sigma.generator_block(pres, d)).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `check_is_automorphism` as a precondition: error when it fails.
pub fn require_automorphism(
    name: &str,
    sigma: &AutomorphismSpec,
    pres: &AlgebraPresentation,
    gb: &GroebnerData,
) -> Result<()> {
    if check_is_automorphism(sigma, pres, gb)? {
        Ok(())
    } else {
        Err(Error::NotAnAutomorphism(
            name.to_string(),
            "a relation image has nonzero normal form or the generator block is singular".into(),
        ))
    }
}

// ---- Parser ----

#[derive(Clone, PartialEq, Debug)]
enum Tok {
    Ident(String),
    Int(i64),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    Semi,
    Colon,
    Arrow,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    col: usize,
}

fn lex_line(line: &str, lineno: usize) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0usize;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => {
                i += 1;
            }
            '+' => {
                out.push(Spanned { tok: Tok::Plus, col });
                i += 1;
            }
            '-' => {
                if i + 1 < chars.len() && chars[i + 1] == '>' {
                    out.push(Spanned { tok: Tok::Arrow, col });
                    i += 2;
                } else {
                    out.push(Spanned { tok: Tok::Minus, col });
                    i += 1;
                }
            }
            '*' => {
                out.push(Spanned { tok: Tok::Star, col });
                i += 1;
            }
            '^' => {
                out.push(Spanned { tok: Tok::Caret, col });
                i += 1;
            }
            '/' => {
                out.push(Spanned { tok: Tok::Slash, col });
                i += 1;
            }
            '(' => {
                out.push(Spanned { tok: Tok::LParen, col });
                i += 1;
            }
            ')' => {
                out.push(Spanned { tok: Tok::RParen, col });
                i += 1;
            }
            ';' => {
                out.push(Spanned { tok: Tok::Semi, col });
                i += 1;
            }
            ':' => {
                out.push(Spanned { tok: Tok::Colon, col });
                i += 1;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let v = text.parse::<i64>().map_err(|_| Error::Parse {
                    line: lineno,
                    col,
                    msg: format!("integer literal `{text}` out of range"),
                })?;
                out.push(Spanned { tok: Tok::Int(v), col });
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                out.push(Spanned { tok: Tok::Ident(text), col });
            }
            other => {
                return Err(Error::Parse {
                    line: lineno,
                    col,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

struct ExprParser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    line: usize,
    field: Field,
    gen_lookup: &'a BTreeMap<String, usize>,
    gen_degrees: &'a [u32],
}

impl<'a> ExprParser<'a> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let col = self
            .toks
            .get(self.pos)
            .map(|s| s.col)
            .unwrap_or_else(|| self.toks.last().map(|s| s.col + 1).unwrap_or(1));
        Error::Parse { line: self.line, col, msg: msg.into() }
    }

    fn eat(&mut self, want: &Tok, what: &str) -> Result<()> {
        match self.peek() {
            Some(s) if s.tok == *want => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn parse_expr(&mut self) -> Result<NcPoly> {
        let mut acc = self.parse_term()?;
        loop {
            match self.peek().map(|s| s.tok.clone()) {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.parse_term()?)?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.parse_term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<NcPoly> {
        let mut acc = self.parse_factor()?;
        while matches!(self.peek().map(|s| &s.tok), Some(Tok::Star)) {
            self.pos += 1;
            acc = acc.mul(&self.parse_factor()?)?;
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<NcPoly> {
        if matches!(self.peek().map(|s| &s.tok), Some(Tok::Minus)) {
            self.pos += 1;
            return Ok(self.parse_factor()?.neg());
        }
        let mut base = self.parse_primary()?;
        if matches!(self.peek().map(|s| &s.tok), Some(Tok::Caret)) {
            self.pos += 1;
            let e = match self.peek().map(|s| s.tok.clone()) {
                Some(Tok::Int(v)) if v >= 0 => {
                    self.pos += 1;
                    v as u32
                }
                _ => return Err(self.err("expected a nonnegative integer exponent")),
            };
            let mut acc = NcPoly::one(self.field);
            for _ in 0..e {
                acc = acc.mul(&base)?;
            }
            base = acc;
        }
        Ok(base)
    }

    fn parse_primary(&mut self) -> Result<NcPoly> {
        match self.peek().map(|s| s.tok.clone()) {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                if matches!(self.peek().map(|s| &s.tok), Some(Tok::Slash)) {
                    self.pos += 1;
                    match self.peek().map(|s| s.tok.clone()) {
                        Some(Tok::Int(d)) => {
                            self.pos += 1;
                            let c = FieldScalar::from_ratio(self.field, n, d)
                                .map_err(|_| self.err("denominator vanishes in the field"))?;
                            Ok(NcPoly::monomial(self.field, Word::empty(), c))
                        }
                        _ => Err(self.err("expected an integer denominator")),
                    }
                } else {
                    Ok(NcPoly::monomial(
                        self.field,
                        Word::empty(),
                        FieldScalar::from_i64(self.field, n),
                    ))
                }
            }
            Some(Tok::Ident(name)) => {
                let col = self.peek().unwrap().col;
                self.pos += 1;
                match self.gen_lookup.get(&name) {
                    Some(&i) => Ok(NcPoly::generator(self.field, i as u32, self.gen_degrees)),
                    None => Err(Error::Parse {
                        line: self.line,
                        col,
                        msg: format!("unknown generator `{name}`"),
                    }),
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.parse_expr()?;
                self.eat(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.err("expected a scalar, generator, or `(`")),
        }
    }
}

/// Parse one element expression (same grammar as the right-hand side of a
/// relation) against an existing presentation.
pub fn parse_element(text: &str, pres: &AlgebraPresentation) -> Result<NcPoly> {
    let toks = lex_line(text, 1)?;
    let gen_lookup: BTreeMap<String, usize> = pres
        .generators
        .iter()
        .enumerate()
        .map(|(i, g)| (g.name.clone(), i))
        .collect();
    let gen_degrees = pres.gen_degrees();
    let mut parser = ExprParser {
        toks: &toks,
        pos: 0,
        line: 1,
        field: pres.field,
        gen_lookup: &gen_lookup,
        gen_degrees: &gen_degrees,
    };
    let poly = parser.parse_expr()?;
    if parser.pos != toks.len() {
        return Err(parser.err("trailing tokens after the expression"));
    }
    Ok(poly)
}

/// Parse a presentation file. Statements may arrive in any order subject to:
/// the field line precedes relations and automorphisms, and generators are
/// declared before use. The caps default to 10 (internal) and 5
/// (homological) when absent.
pub fn parse_presentation(text: &str) -> Result<AlgebraPresentation> {
    parse_presentation_with_field(text, None)
}

/// Same as [`parse_presentation`] with the scalar field overridden: scalar
/// literals in the file are interpreted in `field` instead.
pub fn parse_presentation_with_field(
    text: &str,
    field_override: Option<Field>,
) -> Result<AlgebraPresentation> {
    let mut field: Option<Field> = field_override;
    let mut field_from_file = false;
    let mut generators: Vec<Generator> = Vec::new();
    let mut gen_lookup: BTreeMap<String, usize> = BTreeMap::new();
    let mut gen_degrees: Vec<u32> = Vec::new();
    let mut relations: Vec<NcPoly> = Vec::new();
    let mut autos: Vec<(String, Vec<NcPoly>)> = Vec::new();
    let mut cap_internal: Option<u32> = None;
    let mut cap_homological: Option<u32> = None;

    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let toks = lex_line(raw_line, lineno)?;
        if toks.is_empty() {
            continue;
        }
        let head = match &toks[0].tok {
            Tok::Ident(s) => s.clone(),
            _ => {
                return Err(Error::Parse {
                    line: lineno,
                    col: toks[0].col,
                    msg: "expected a statement keyword (field, gen, rel, aut, cap)".into(),
                })
            }
        };
        let perr = |col: usize, msg: String| Error::Parse { line: lineno, col, msg };
        match head.as_str() {
            "field" => {
                if field_from_file {
                    return Err(perr(toks[0].col, "duplicate field statement".into()));
                }
                field_from_file = true;
                let parsed = match toks.get(1).map(|s| s.tok.clone()) {
                    Some(Tok::Ident(s)) if s == "Q" => {
                        if toks.len() > 2 {
                            return Err(perr(toks[2].col, "trailing tokens after field Q".into()));
                        }
                        Field::Q
                    }
                    Some(Tok::Ident(s)) if s == "F" => match toks.get(2).map(|s| s.tok.clone()) {
                        Some(Tok::Int(p)) if p > 1 => {
                            if toks.len() > 3 {
                                return Err(perr(toks[3].col, "trailing tokens after field F <p>".into()));
                            }
                            Field::fp(p as u64)?
                        }
                        _ => return Err(perr(toks.get(2).map(|s| s.col).unwrap_or(1), "expected a prime after `field F`".into())),
                    },
                    _ => return Err(perr(toks.get(1).map(|s| s.col).unwrap_or(1), "expected `Q` or `F <p>`".into())),
                };
                if field.is_none() {
                    field = Some(parsed);
                }
            }
            "gen" => {
                let name = match toks.get(1).map(|s| s.tok.clone()) {
                    Some(Tok::Ident(n)) => n,
                    _ => return Err(perr(toks.get(1).map(|s| s.col).unwrap_or(1), "expected a generator name".into())),
                };
                let degree = match toks.get(2).map(|s| s.tok.clone()) {
                    Some(Tok::Int(d)) => {
                        if d < 1 {
                            return Err(Error::NonpositiveDegree(name));
                        }
                        d as u32
                    }
                    _ => return Err(perr(toks.get(2).map(|s| s.col).unwrap_or(1), "expected an integer degree".into())),
                };
                if toks.len() > 3 {
                    return Err(perr(toks[3].col, "trailing tokens after gen statement".into()));
                }
                if gen_lookup.contains_key(&name) {
                    return Err(perr(toks[1].col, format!("duplicate generator `{name}`")));
                }
                gen_lookup.insert(name.clone(), generators.len());
                gen_degrees.push(degree);
                generators.push(Generator { name, degree });
            }
            "rel" => {
                let f = field.ok_or_else(|| perr(toks[0].col, "field must be declared before relations".into()))?;
                let mut p = ExprParser {
                    toks: &toks[1..],
                    pos: 0,
                    line: lineno,
                    field: f,
                    gen_lookup: &gen_lookup,
                    gen_degrees: &gen_degrees,
                };
                let poly = p.parse_expr()?;
                if p.pos != p.toks.len() {
                    return Err(p.err("trailing tokens after relation"));
                }
                if poly.is_zero() {
                    return Err(perr(toks[0].col, "relation is identically zero".into()));
                }
                match poly.homogeneous_degree() {
                    Some(d) if d >= 2 => relations.push(poly),
                    _ => {
                        let names: Vec<String> = generators.iter().map(|g| g.name.clone()).collect();
                        return Err(Error::InhomogeneousRelation(format!(
                            "{} (line {lineno}): relations must be homogeneous of degree >= 2",
                            poly.display_with(&names)
                        )));
                    }
                }
            }
            "aut" => {
                let f = field.ok_or_else(|| perr(toks[0].col, "field must be declared before automorphisms".into()))?;
                let name = match toks.get(1).map(|s| s.tok.clone()) {
                    Some(Tok::Ident(n)) => n,
                    _ => return Err(perr(toks.get(1).map(|s| s.col).unwrap_or(1), "expected an automorphism name".into())),
                };
                if autos.iter().any(|(n, _)| *n == name) {
                    return Err(perr(toks[1].col, format!("duplicate automorphism `{name}`")));
                }
                let mut p = ExprParser {
                    toks: &toks[2..],
                    pos: 0,
                    line: lineno,
                    field: f,
                    gen_lookup: &gen_lookup,
                    gen_degrees: &gen_degrees,
                };
                p.eat(&Tok::Colon, "`:`")?;
                let mut images: Vec<Option<NcPoly>> = vec![None; generators.len()];
                loop {
                    let gen_name = match p.peek().map(|s| s.tok.clone()) {
                        Some(Tok::Ident(n)) => {
                            p.pos += 1;
                            n
                        }
                        _ => return Err(p.err("expected a generator name")),
                    };
                    let gi = *gen_lookup
                        .get(&gen_name)
                        .ok_or_else(|| p.err(format!("unknown generator `{gen_name}`")))?;
                    p.eat(&Tok::Arrow, "`->`")?;
                    let img = p.parse_expr()?;
                    if images[gi].is_some() {
                        return Err(p.err(format!("generator `{gen_name}` mapped twice")));
                    }
                    images[gi] = Some(img);
                    match p.peek().map(|s| s.tok.clone()) {
                        Some(Tok::Semi) => {
                            p.pos += 1;
                        }
                        None => break,
                        _ => return Err(p.err("expected `;` or end of line")),
                    }
                }
                let mut fixed = Vec::with_capacity(generators.len());
                for (i, img) in images.into_iter().enumerate() {
                    match img {
                        Some(x) => fixed.push(x),
                        None => {
                            return Err(perr(
                                toks[0].col,
                                format!("automorphism `{name}` gives no image for `{}`", generators[i].name),
                            ))
                        }
                    }
                }
                autos.push((name, fixed));
            }
            "cap" => {
                let which = match toks.get(1).map(|s| s.tok.clone()) {
                    Some(Tok::Ident(w)) => w,
                    _ => return Err(perr(toks.get(1).map(|s| s.col).unwrap_or(1), "expected `internal` or `homological`".into())),
                };
                let n = match toks.get(2).map(|s| s.tok.clone()) {
                    Some(Tok::Int(v)) if v >= 1 => v as u32,
                    _ => return Err(perr(toks.get(2).map(|s| s.col).unwrap_or(1), "expected an integer >= 1".into())),
                };
                match which.as_str() {
                    "internal" => {
                        if cap_internal.replace(n).is_some() {
                            return Err(perr(toks[1].col, "duplicate `cap internal`".into()));
                        }
                    }
                    "homological" => {
                        if cap_homological.replace(n).is_some() {
                            return Err(perr(toks[1].col, "duplicate `cap homological`".into()));
                        }
                    }
                    other => return Err(perr(toks[1].col, format!("unknown cap kind `{other}`"))),
                }
            }
            other => {
                return Err(perr(toks[0].col, format!("unknown statement `{other}`")));
            }
        }
    }

    let field = field.ok_or(Error::Parse { line: 1, col: 1, msg: "missing field statement".into() })?;
    let mut pres = AlgebraPresentation {
        field,
        generators,
        relations,
        declared_autos: Vec::new(),
        cap_internal: cap_internal.unwrap_or(DEFAULT_CAP_INTERNAL),
        cap_homological: cap_homological.unwrap_or(DEFAULT_CAP_HOMOLOGICAL),
    };
    for (name, images) in autos {
        let spec = AutomorphismSpec::new(images, &pres)?;
        pres.declared_autos.push((name, spec));
    }
    // Deterministic relation order: sort by (degree, leading word), then by
    // the full term list; input order is not meaningful.
    pres.relations.sort_by(|a, b| {
        let da = a.homogeneous_degree().unwrap_or(0);
        let db = b.homogeneous_degree().unwrap_or(0);
        da.cmp(&db).then_with(|| {
            let la = a.lead().map(|(w, _)| w.clone()).unwrap_or_else(Word::empty);
            let lb = b.lead().map(|(w, _)| w.clone()).unwrap_or_else(Word::empty);
            deglex_compare(&la, &lb).then_with(|| compare_term_lists(a, b))
        })
    });
    Ok(pres)
}

fn compare_term_lists(a: &NcPoly, b: &NcPoly) -> Ordering {
    let wa: Vec<_> = a.terms().map(|(w, _)| w.clone()).collect();
    let wb: Vec<_> = b.terms().map(|(w, _)| w.clone()).collect();
    wa.cmp(&wb)
}
