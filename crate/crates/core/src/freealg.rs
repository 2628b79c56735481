//! Exact scalar arithmetic and free-algebra (noncommutative polynomial)
//! arithmetic over Q or F_p.
//!
//! `FieldScalar` holds an arbitrary-precision rational (always reduced, with
//! positive denominator) or a residue class in [0, p). `Word` is a sequence of
//! 0-based generator indices with its internal degree cached. `NcPoly` is a
//! finite map from words to nonzero scalars; zero coefficients are never
//! stored.

use crate::error::{Error, Result};
use num::{BigInt, BigRational, One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// The coefficient field: the rationals or a prime field.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Field {
    Q,
    Fp(u64),
}

impl Field {
    /// Construct F_p, rejecting composite moduli.
    pub fn fp(p: u64) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Field::Fp(p))
    }

    pub fn name(&self) -> String {
        match self {
            Field::Q => "Q".to_string(),
            Field::Fp(p) => format!("F_{p}"),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// An exact element of Q or of F_p.
///
/// Invariants: rationals are reduced with positive denominator (maintained by
/// `BigRational`); F_p values lie in [0, p).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum FieldScalar {
    Q(BigRational),
    Fp { p: u64, val: u64 },
}

impl FieldScalar {
    pub fn field(&self) -> Field {
        match self {
            FieldScalar::Q(_) => Field::Q,
            FieldScalar::Fp { p, .. } => Field::Fp(*p),
        }
    }

    pub fn zero(field: Field) -> FieldScalar {
        match field {
            Field::Q => FieldScalar::Q(BigRational::zero()),
            Field::Fp(p) => FieldScalar::Fp { p, val: 0 },
        }
    }

    pub fn one(field: Field) -> FieldScalar {
        match field {
            Field::Q => FieldScalar::Q(BigRational::one()),
            Field::Fp(p) => FieldScalar::Fp { p, val: 1 },
        }
    }

    pub fn from_i64(field: Field, v: i64) -> FieldScalar {
        match field {
            Field::Q => FieldScalar::Q(BigRational::from(BigInt::from(v))),
            Field::Fp(p) => {
                let m = v.rem_euclid(p as i64) as u64;
                FieldScalar::Fp { p, val: m % p }
            }
        }
    }

    /// num/den as a field element; errors when den vanishes in the field.
    pub fn from_ratio(field: Field, num: i64, den: i64) -> Result<FieldScalar> {
        let d = FieldScalar::from_i64(field, den);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(FieldScalar::from_i64(field, num).mul(&d.inv()?))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldScalar::Q(r) => r.is_zero(),
            FieldScalar::Fp { val, .. } => *val == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldScalar::Q(r) => r.is_one(),
            FieldScalar::Fp { val, .. } => *val == 1,
        }
    }

    fn assert_same_field(&self, other: &FieldScalar) {
        debug_assert!(
            self.field() == other.field(),
            "scalar field mismatch: {} vs {}",
            self.field(),
            other.field()
        );
    }

    pub fn add(&self, other: &FieldScalar) -> FieldScalar {
        self.assert_same_field(other);
        match (self, other) {
            (FieldScalar::Q(a), FieldScalar::Q(b)) => FieldScalar::Q(a + b),
            (FieldScalar::Fp { p, val: a }, FieldScalar::Fp { val: b, .. }) => FieldScalar::Fp {
                p: *p,
                val: ((*a as u128 + *b as u128) % *p as u128) as u64,
            },
            _ => unreachable!("mixed scalar fields"),
        }
    }

    pub fn sub(&self, other: &FieldScalar) -> FieldScalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FieldScalar {
        match self {
            FieldScalar::Q(a) => FieldScalar::Q(-a),
            FieldScalar::Fp { p, val } => FieldScalar::Fp {
                p: *p,
                val: if *val == 0 { 0 } else { p - val },
            },
        }
    }

    pub fn mul(&self, other: &FieldScalar) -> FieldScalar {
        self.assert_same_field(other);
        match (self, other) {
            (FieldScalar::Q(a), FieldScalar::Q(b)) => FieldScalar::Q(a * b),
            (FieldScalar::Fp { p, val: a }, FieldScalar::Fp { val: b, .. }) => FieldScalar::Fp {
                p: *p,
                val: ((*a as u128 * *b as u128) % *p as u128) as u64,
            },
            _ => unreachable!("mixed scalar fields"),
        }
    }

    pub fn inv(&self) -> Result<FieldScalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            FieldScalar::Q(a) => FieldScalar::Q(a.recip()),
            FieldScalar::Fp { p, val } => {
                // p is prime, so a^(p-2) inverts a.
                let mut base = *val as u128;
                let modulus = *p as u128;
                let mut e = p - 2;
                let mut acc: u128 = 1;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = acc * base % modulus;
                    }
                    base = base * base % modulus;
                    e >>= 1;
                }
                FieldScalar::Fp { p: *p, val: acc as u64 }
            }
        })
    }

    pub fn div(&self, other: &FieldScalar) -> Result<FieldScalar> {
        Ok(self.mul(&other.inv()?))
    }

    /// Integer power; negative exponents invert (error on zero base).
    pub fn pow(&self, e: i64) -> Result<FieldScalar> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = FieldScalar::one(self.field());
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }
}

impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldScalar::Q(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            FieldScalar::Fp { val, .. } => write!(f, "{val}"),
        }
    }
}

/// A monomial of the free algebra: a sequence of generator indices with its
/// internal degree (sum of the generator degrees) cached.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Word {
    letters: Vec<u32>,
    degree: u32,
}

impl Word {
    pub fn empty() -> Word {
        Word { letters: Vec::new(), degree: 0 }
    }

    /// Single-letter word for generator `i` of the given internal degree.
    pub fn gen(i: u32, degree: u32) -> Word {
        Word { letters: vec![i], degree }
    }

    pub fn from_letters(letters: &[u32], gen_degrees: &[u32]) -> Word {
        let degree = letters.iter().map(|&i| gen_degrees[i as usize]).sum();
        Word { letters: letters.to_vec(), degree }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters, degree: self.degree + other.degree }
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// `prefix . self . suffix` as letter sequences of known degree.
    pub fn sandwich(&self, prefix: &[u32], suffix: &[u32], gen_degrees: &[u32]) -> Word {
        let mut letters = Vec::with_capacity(prefix.len() + self.letters.len() + suffix.len());
        letters.extend_from_slice(prefix);
        letters.extend_from_slice(&self.letters);
        letters.extend_from_slice(suffix);
        Word::from_letters(&letters, gen_degrees)
    }
}

/// Degree-lexicographic order: first by internal degree, then by word
/// length, then lexicographically by generator index. Total, and compatible
/// with concatenation on both sides.
pub fn deglex_compare(u: &Word, v: &Word) -> Ordering {
    u.degree
        .cmp(&v.degree)
        .then_with(|| u.letters.len().cmp(&v.letters.len()))
        .then_with(|| u.letters.cmp(&v.letters))
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        deglex_compare(self, other)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An element of the free algebra: a finite map from words to nonzero
/// scalars. The map is deglex-ordered, so the last entry is the leading term.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NcPoly {
    field: Field,
    terms: BTreeMap<Word, FieldScalar>,
}

impl NcPoly {
    pub fn zero(field: Field) -> NcPoly {
        NcPoly { field, terms: BTreeMap::new() }
    }

    pub fn one(field: Field) -> NcPoly {
        NcPoly::monomial(field, Word::empty(), FieldScalar::one(field))
    }

    pub fn monomial(field: Field, word: Word, coeff: FieldScalar) -> NcPoly {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(word, coeff);
        }
        NcPoly { field, terms }
    }

    /// The generator `i` as a polynomial.
    pub fn generator(field: Field, i: u32, gen_degrees: &[u32]) -> NcPoly {
        NcPoly::monomial(field, Word::gen(i, gen_degrees[i as usize]), FieldScalar::one(field))
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &FieldScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> FieldScalar {
        self.terms.get(w).cloned().unwrap_or_else(|| FieldScalar::zero(self.field))
    }

    /// Leading (deglex-largest) term, if any.
    pub fn lead(&self) -> Option<(&Word, &FieldScalar)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, word: Word, coeff: FieldScalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&coeff);
                if s.is_zero() {
                    e.remove();
                } else {
                    e.insert(s);
                }
            }
        }
    }

    fn check_field(&self, other: &NcPoly) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.name(), other.field.name()));
        }
        Ok(())
    }

    pub fn add(&self, other: &NcPoly) -> Result<NcPoly> {
        self.check_field(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &NcPoly) -> Result<NcPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> NcPoly {
        let terms = self.terms.iter().map(|(w, c)| (w.clone(), c.neg())).collect();
        NcPoly { field: self.field, terms }
    }

    pub fn scale(&self, s: &FieldScalar) -> NcPoly {
        if s.is_zero() {
            return NcPoly::zero(self.field);
        }
        let terms = self.terms.iter().map(|(w, c)| (w.clone(), c.mul(s))).collect();
        NcPoly { field: self.field, terms }
    }

    pub fn mul(&self, other: &NcPoly) -> Result<NcPoly> {
        self.check_field(other)?;
        let mut out = NcPoly::zero(self.field);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.concat(v), a.mul(b));
            }
        }
        Ok(out)
    }

    /// Internal degree when homogeneous and nonzero; `None` otherwise.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys();
        let first = it.next()?.degree();
        for w in it {
            if w.degree() != first {
                return None;
            }
        }
        Some(first)
    }

    /// Zero counts as homogeneous (of every degree).
    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    /// Divide by the leading coefficient.
    pub fn make_monic(&self) -> Result<NcPoly> {
        match self.lead() {
            None => Ok(self.clone()),
            Some((_, c)) => {
                let inv = c.inv()?;
                Ok(self.scale(&inv))
            }
        }
    }

    /// Render with generator names, terms in descending deglex order, runs of
    /// a generator collapsed with `^`. The output parses back to this
    /// polynomial.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (w, c)) in self.terms.iter().rev().enumerate() {
            let (sign, mag) = match c {
                FieldScalar::Q(r) => {
                    if r.is_negative() {
                        ("-", FieldScalar::Q(-r))
                    } else {
                        ("+", c.clone())
                    }
                }
                FieldScalar::Fp { .. } => ("+", c.clone()),
            };
            if idx == 0 {
                if sign == "-" {
                    out.push('-');
                }
            } else {
                out.push_str(if sign == "-" { " - " } else { " + " });
            }
            let word_str = display_word(w, names);
            if w.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&word_str);
            } else {
                out.push_str(&format!("{mag}*{word_str}"));
            }
        }
        out
    }
}

/// Render a single word with generator names, collapsing repeated letters
/// with `^` (the same convention `NcPoly::display_with` uses).
pub fn display_word(w: &Word, names: &[String]) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    let ls = w.letters();
    while i < ls.len() {
        let mut j = i;
        while j < ls.len() && ls[j] == ls[i] {
            j += 1;
        }
        let name = &names[ls[i] as usize];
        if j - i == 1 {
            parts.push(name.clone());
        } else {
            parts.push(format!("{}^{}", name, j - i));
        }
        i = j;
    }
    parts.join("*")
}

/// Coefficientwise sum; zero terms dropped. Errors on field mismatch.
pub fn poly_add(p: &NcPoly, q: &NcPoly) -> Result<NcPoly> {
    p.add(q)
}

/// Word-concatenation product, bilinearly extended. Errors on field mismatch.
pub fn poly_mul(p: &NcPoly, q: &NcPoly) -> Result<NcPoly> {
    p.mul(q)
}
