//! Truncated two-sided Gröbner bases for graded quotients of free algebras.
//!
//! Completion runs by resolving overlap ambiguities in increasing degree and
//! stops at a hard internal-degree cap, so it always terminates. The
//! resulting rewriting system is confluent on all words of degree at most
//! `complete_to_degree`: every element of degree within the cap has a unique
//! normal form, independent of reduction order. Rules are kept monic,
//! interreduced (no lead is a subword of another lead, all tails fully
//! reduced), and sorted by their leading word, which makes the rule set the
//! canonical reduced basis of the truncated ideal.

use crate::error::{Error, Result};
use crate::freealg::{deglex_compare, Field, FieldScalar, NcPoly, Word};
use crate::linalg::Mat;
use crate::presentation::AlgebraPresentation;
use std::collections::BTreeMap;

/// One rewrite rule `lead -> tail` with `lead` monic and every word of
/// `tail` strictly smaller than `lead` in degree-lexicographic order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Rule {
    pub lead: Word,
    pub tail: NcPoly,
}

/// A Gröbner basis of the relation ideal, complete up to a degree cap,
/// together with the normal-word bases of the quotient algebra.
#[derive(Clone, Debug)]
pub struct GroebnerData {
    field: Field,
    gen_degrees: Vec<u32>,
    rules: Vec<Rule>,
    /// All overlap ambiguities of degree at most this bound reduce to zero.
    pub complete_to_degree: u32,
    /// True when some overlap ambiguity above the cap was skipped, i.e. the
    /// basis is potentially incomplete beyond `complete_to_degree`.
    pub truncated: bool,
    normal_words: Vec<Vec<Word>>,
    word_index: Vec<BTreeMap<Word, usize>>,
}

impl GroebnerData {
    pub fn field(&self) -> Field {
        self.field
    }

    pub fn num_gens(&self) -> usize {
        self.gen_degrees.len()
    }

    pub fn gen_degrees(&self) -> &[u32] {
        &self.gen_degrees
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// The normal words of internal degree `d`, sorted in increasing
    /// degree-lexicographic order. These form a basis of the quotient in
    /// that degree.
    pub fn basis_of_degree(&self, d: u32) -> Result<&[Word]> {
        if d > self.complete_to_degree {
            return Err(Error::CapExceeded {
                context: "basis of degree".into(),
                needed: d,
                cap: self.complete_to_degree,
            });
        }
        Ok(&self.normal_words[d as usize])
    }

    /// Dimension of the quotient algebra in degree `d`.
    pub fn dim(&self, d: u32) -> Result<usize> {
        Ok(self.basis_of_degree(d)?.len())
    }

    /// Dimensions of the quotient in degrees `0..=up_to`.
    pub fn hilbert_dims(&self, up_to: u32) -> Result<Vec<usize>> {
        (0..=up_to).map(|d| self.dim(d)).collect()
    }

    /// Position of a normal word within its degree basis.
    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.word_index
            .get(w.degree() as usize)
            .and_then(|m| m.get(w))
            .copied()
    }

    /// Unique normal form of `p` modulo the relation ideal. Errors when a
    /// term's degree exceeds the completion bound, where uniqueness is no
    /// longer certified.
    pub fn normal_form(&self, p: &NcPoly) -> Result<NcPoly> {
        if p.field() != self.field {
            return Err(Error::FieldMismatch(p.field().name(), self.field.name()));
        }
        if let Some((w, _)) = p.lead() {
            if w.degree() > self.complete_to_degree {
                return Err(Error::CapExceeded {
                    context: "normal form".into(),
                    needed: w.degree(),
                    cap: self.complete_to_degree,
                });
            }
        }
        Ok(reduce_full(p, &self.rules, &self.gen_degrees))
    }

    /// Coordinate vector of a homogeneous element in the degree-`d` normal
    /// basis. The element is reduced first; a degree mismatch is an error.
    pub fn coords_in_degree(&self, p: &NcPoly, d: u32) -> Result<Vec<FieldScalar>> {
        let nf = self.normal_form(p)?;
        let basis = self.basis_of_degree(d)?;
        let mut v = vec![FieldScalar::zero(self.field); basis.len()];
        for (w, c) in nf.terms() {
            if w.degree() != d {
                return Err(Error::DimensionMismatch(format!(
                    "element has a term of degree {} in a degree-{} coordinate slot",
                    w.degree(),
                    d
                )));
            }
            let i = self
                .index_of(w)
                .ok_or_else(|| Error::Internal("normal form lies outside the normal basis".into()))?;
            v[i] = c.clone();
        }
        Ok(v)
    }

    /// Element with the given coordinates in the degree-`d` normal basis.
    pub fn element_from_coords(&self, v: &[FieldScalar], d: u32) -> Result<NcPoly> {
        let basis = self.basis_of_degree(d)?;
        if v.len() != basis.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates for a dimension-{} space",
                v.len(),
                basis.len()
            )));
        }
        let mut p = NcPoly::zero(self.field);
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                p = p.add(&NcPoly::monomial(self.field, basis[i].clone(), c.clone()))?;
            }
        }
        Ok(p)
    }

    /// Matrix of left multiplication by a homogeneous `p` from degree `n` to
    /// degree `n + deg p`, in normal bases: column `c` holds the coordinates
    /// of `p * basis_n[c]`.
    pub fn left_mult_matrix(&self, p: &NcPoly, n: u32) -> Result<Mat> {
        self.mult_matrix(p, n, true)
    }

    /// Matrix of right multiplication by a homogeneous `p` from degree `n`
    /// to degree `n + deg p`: column `c` holds the coordinates of
    /// `basis_n[c] * p`.
    pub fn right_mult_matrix(&self, p: &NcPoly, n: u32) -> Result<Mat> {
        self.mult_matrix(p, n, false)
    }

    fn mult_matrix(&self, p: &NcPoly, n: u32, left: bool) -> Result<Mat> {
        let d = match p.homogeneous_degree() {
            Some(d) => d,
            None if p.is_zero() => 0,
            None => return Err(Error::InhomogeneousRelation("multiplication by an inhomogeneous element".into())),
        };
        let src = self.basis_of_degree(n)?.to_vec();
        let target_deg = n + d;
        let tgt_len = self.dim(target_deg)?;
        let mut m = Mat::zeros(self.field, tgt_len, src.len());
        for (c, w) in src.iter().enumerate() {
            let wp = NcPoly::monomial(self.field, w.clone(), FieldScalar::one(self.field));
            let prod = if left { p.mul(&wp)? } else { wp.mul(p)? };
            for (r, coeff) in self.coords_in_degree(&prod, target_deg)?.into_iter().enumerate() {
                if !coeff.is_zero() {
                    m.set(r, c, coeff);
                }
            }
        }
        Ok(m)
    }
}

// ---- Reduction ----

/// Fully reduce `p` by the rule set. Deterministic: always rewrites the
/// largest reducible word, at its leftmost reducible position, by the
/// first matching rule in sorted order.
fn reduce_full(p: &NcPoly, rules: &[Rule], gen_degrees: &[u32]) -> NcPoly {
    let field = p.field();
    let mut cur = p.clone();
    'outer: loop {
        // Scan words from largest to smallest for a reducible occurrence.
        let words: Vec<(Word, FieldScalar)> =
            cur.terms().map(|(w, c)| (w.clone(), c.clone())).collect();
        for (w, coeff) in words.into_iter().rev() {
            if let Some((rule, at)) = find_occurrence(&w, rules) {
                let prefix = &w.letters()[..at];
                let suffix = &w.letters()[at + rule.lead.len()..];
                // w = prefix * lead * suffix, so the term rewrites to
                // coeff * prefix * tail * suffix.
                let mut repl = NcPoly::monomial(
                    field,
                    Word::from_letters(prefix, gen_degrees),
                    coeff.clone(),
                );
                repl = repl.mul(&rule.tail).expect("same field");
                repl = repl
                    .mul(&NcPoly::monomial(
                        field,
                        Word::from_letters(suffix, gen_degrees),
                        FieldScalar::one(field),
                    ))
                    .expect("same field");
                let removed = NcPoly::monomial(field, w, coeff);
                cur = cur.sub(&removed).expect("same field");
                cur = cur.add(&repl).expect("same field");
                continue 'outer;
            }
        }
        return cur;
    }
}

/// Leftmost occurrence of any rule lead inside `w`, first matching rule
/// winning at equal positions.
fn find_occurrence<'a>(w: &Word, rules: &'a [Rule]) -> Option<(&'a Rule, usize)> {
    let letters = w.letters();
    let mut best: Option<(&Rule, usize)> = None;
    for rule in rules {
        let k = rule.lead.len();
        if k == 0 || k > letters.len() {
            continue;
        }
        let pat = rule.lead.letters();
        for at in 0..=letters.len() - k {
            if &letters[at..at + k] == pat {
                match best {
                    Some((_, b)) if b <= at => {}
                    _ => best = Some((rule, at)),
                }
                break;
            }
        }
    }
    best
}

fn poly_to_rule(p: &NcPoly) -> Result<Rule> {
    let monic = p.make_monic()?;
    let (lead, _) = monic.lead().expect("nonzero");
    let lead = lead.clone();
    let tail = monic
        .sub(&NcPoly::monomial(monic.field(), lead.clone(), FieldScalar::one(monic.field())))
        .expect("same field")
        .neg();
    Ok(Rule { lead, tail })
}

fn sort_rules(rules: &mut [Rule]) {
    rules.sort_by(|a, b| deglex_compare(&a.lead, &b.lead));
}

/// Interreduce until stable: drop rules whose lead is reducible by the
/// others, fully reduce every tail, keep everything monic and sorted.
fn interreduce(rules: &mut Vec<Rule>, gen_degrees: &[u32]) -> Result<()> {
    loop {
        sort_rules(rules);
        let mut changed = false;
        let mut next: Vec<Rule> = Vec::with_capacity(rules.len());
        for i in 0..rules.len() {
            let others: Vec<Rule> = rules
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, r)| r.clone())
                .collect();
            let r = &rules[i];
            let field = r.tail.field();
            let as_poly = NcPoly::monomial(field, r.lead.clone(), FieldScalar::one(field))
                .sub(&r.tail)?;
            let reduced = reduce_full(&as_poly, &others, gen_degrees);
            if reduced.is_zero() {
                changed = true;
                continue;
            }
            let new_rule = poly_to_rule(&reduced)?;
            if new_rule.lead != r.lead || new_rule.tail != r.tail {
                changed = true;
            }
            next.push(new_rule);
        }
        // Deduplicate identical rules that may appear during completion.
        sort_rules(&mut next);
        next.dedup();
        *rules = next;
        if !changed {
            return Ok(());
        }
    }
}

/// Proper overlaps between two leads: positions where a nonempty proper
/// suffix of `u` equals a proper prefix of `v`. Returns the shared-piece
/// lengths.
fn overlap_lengths(u: &Word, v: &Word) -> Vec<usize> {
    let (lu, lv) = (u.len(), v.len());
    let mut out = Vec::new();
    if lu == 0 || lv == 0 {
        return out;
    }
    for s in 1..lu.min(lv) {
        if u.letters()[lu - s..] == v.letters()[..s] {
            out.push(s);
        }
    }
    out
}

/// Compute the reduced Gröbner basis of the relation ideal, complete up to
/// internal degree `cap`.
pub fn compute_gb(pres: &AlgebraPresentation, cap: u32) -> Result<GroebnerData> {
    let field = pres.field;
    let gen_degrees = pres.gen_degrees();
    for rel in &pres.relations {
        let d = rel.homogeneous_degree().unwrap_or(0);
        if d > cap {
            return Err(Error::CapExceeded {
                context: "relation degree".into(),
                needed: d,
                cap,
            });
        }
    }

    let mut rules: Vec<Rule> = Vec::new();
    for rel in &pres.relations {
        let reduced = reduce_full(rel, &rules, &gen_degrees);
        if !reduced.is_zero() {
            rules.push(poly_to_rule(&reduced)?);
        }
    }
    interreduce(&mut rules, &gen_degrees)?;

    let mut truncated = false;
    loop {
        let mut new_polys: Vec<NcPoly> = Vec::new();
        for i in 0..rules.len() {
            for j in 0..rules.len() {
                let (u, v) = (&rules[i], &rules[j]);
                for s in overlap_lengths(&u.lead, &v.lead) {
                    let w_degree = u.lead.degree() + v.lead.degree()
                        - u.lead.letters()[u.lead.len() - s..]
                            .iter()
                            .map(|&t| gen_degrees[t as usize])
                            .sum::<u32>();
                    if w_degree > cap {
                        truncated = true;
                        continue;
                    }
                    // Overlap word a·s·b with lead_u = a·s and lead_v = s·b;
                    // the ambiguity reduces to a·tail_v - tail_u·b.
                    let a = Word::from_letters(&u.lead.letters()[..u.lead.len() - s], &gen_degrees);
                    let b = Word::from_letters(&v.lead.letters()[s..], &gen_degrees);
                    let a_poly = NcPoly::monomial(field, a, FieldScalar::one(field));
                    let b_poly = NcPoly::monomial(field, b, FieldScalar::one(field));
                    let s_elem = a_poly.mul(&v.tail)?.sub(&u.tail.mul(&b_poly)?)?;
                    let nf = reduce_full(&s_elem, &rules, &gen_degrees);
                    if !nf.is_zero() {
                        new_polys.push(nf);
                    }
                }
            }
        }
        if new_polys.is_empty() {
            break;
        }
        new_polys.sort_by(|a, b| {
            let la = a.lead().map(|(w, _)| w.clone()).unwrap_or_else(Word::empty);
            let lb = b.lead().map(|(w, _)| w.clone()).unwrap_or_else(Word::empty);
            deglex_compare(&la, &lb)
        });
        for p in new_polys {
            let reduced = reduce_full(&p, &rules, &gen_degrees);
            if !reduced.is_zero() {
                rules.push(poly_to_rule(&reduced)?);
            }
        }
        interreduce(&mut rules, &gen_degrees)?;
    }

    // Enumerate normal words degree by degree: a word all of whose proper
    // subwords are normal is reducible only via a lead that is one of its
    // suffixes.
    let lead_set: Vec<&Word> = rules.iter().map(|r| &r.lead).collect();
    let mut normal_words: Vec<Vec<Word>> = vec![Vec::new(); cap as usize + 1];
    normal_words[0].push(Word::empty());
    for d in 0..cap {
        // Every normal word of degree nd arises uniquely by appending one
        // letter to a normal word (its own prefix) of degree nd - deg(t),
        // so one pass per source degree enumerates each word exactly once.
        let sources = normal_words[d as usize].clone();
        for w in sources {
            for (t, &td) in gen_degrees.iter().enumerate() {
                let nd = d + td;
                if nd > cap {
                    continue;
                }
                let mut letters = w.letters().to_vec();
                letters.push(t as u32);
                let ok = lead_set.iter().all(|lead| {
                    let k = lead.len();
                    k == 0 || k > letters.len() || letters[letters.len() - k..] != *lead.letters()
                });
                if ok {
                    normal_words[nd as usize].push(Word::from_letters(&letters, &gen_degrees));
                }
            }
        }
    }
    for bucket in normal_words.iter_mut() {
        bucket.sort_by(deglex_compare);
    }
    let word_index = normal_words
        .iter()
        .map(|bucket| {
            bucket
                .iter()
                .enumerate()
                .map(|(i, w)| (w.clone(), i))
                .collect::<BTreeMap<Word, usize>>()
        })
        .collect();

    Ok(GroebnerData {
        field,
        gen_degrees,
        rules,
        complete_to_degree: cap,
        truncated,
        normal_words,
        word_index,
    })
}
