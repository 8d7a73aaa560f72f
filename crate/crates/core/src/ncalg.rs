//! The free (path) algebra over the ground ring: composable words, products,
//! Leibniz-extended derivations, generator substitutions, bounded rewriting,
//! and primitive search by exact linear solve.
//!
//! Products of non-composable paths are 0, never an error; that is the
//! `k`-bimodule tensor semantics. Degrees entering Leibniz signs are always
//! the stored generator degrees, i.e. the degrees after whatever shift the
//! ambient construction applied.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::ground::Quiver;
use crate::scalars::{FieldSpec, Scalar, SparseMatrix};

/// A basis monomial: an idempotent `e_v` or a nonempty composable
/// generator path, stored in left-to-right composition order
/// (`dst(g_i) = src(g_{i+1})`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Word {
    Idem(u32),
    Path(Vec<u32>),
}

impl Word {
    pub fn len(&self) -> usize {
        match self {
            Word::Idem(_) => 0,
            Word::Path(gens) => gens.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn src(&self, q: &Quiver) -> u32 {
        match self {
            Word::Idem(v) => *v,
            Word::Path(gens) => q.gen(gens[0]).src,
        }
    }

    pub fn dst(&self, q: &Quiver) -> u32 {
        match self {
            Word::Idem(v) => *v,
            Word::Path(gens) => q.gen(gens[gens.len() - 1]).dst,
        }
    }

    pub fn degree(&self, q: &Quiver) -> i64 {
        match self {
            Word::Idem(_) => 0,
            Word::Path(gens) => gens.iter().map(|g| q.gen(*g).degree).sum(),
        }
    }

    pub fn composable(&self, q: &Quiver) -> bool {
        match self {
            Word::Idem(_) => true,
            Word::Path(gens) => {
                !gens.is_empty()
                    && gens.windows(2).all(|w| q.gen(w[0]).dst == q.gen(w[1]).src)
            }
        }
    }

    /// Concatenation; `None` when endpoints do not match (the product is 0).
    pub fn concat(&self, other: &Word, q: &Quiver) -> Option<Word> {
        if self.dst(q) != other.src(q) {
            return None;
        }
        Some(match (self, other) {
            (Word::Idem(_), w) => w.clone(),
            (w, Word::Idem(_)) => w.clone(),
            (Word::Path(a), Word::Path(b)) => {
                let mut gens = a.clone();
                gens.extend_from_slice(b);
                Word::Path(gens)
            }
        })
    }

    pub fn display<'a>(&'a self, q: &'a Quiver) -> WordDisplay<'a> {
        WordDisplay { word: self, quiver: q }
    }
}

// Deterministic basis order: length first, then left-to-right by generator
// declaration index; idempotents sort before all paths, by vertex.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Word::Idem(a), Word::Idem(b)) => a.cmp(b),
            (Word::Idem(_), Word::Path(_)) => Ordering::Less,
            (Word::Path(_), Word::Idem(_)) => Ordering::Greater,
            (Word::Path(a), Word::Path(b)) => a.len().cmp(&b.len()).then_with(|| a.cmp(b)),
        }
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    quiver: &'a Quiver,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.word {
            Word::Idem(v) => write!(f, "e({})", self.quiver.ring.vertex_name(*v)),
            Word::Path(gens) => {
                for (i, g) in gens.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{}", self.quiver.gen(*g).name)?;
                }
                Ok(())
            }
        }
    }
}

/// A finite `K`-linear combination of composable words. Zero coefficients are
/// never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Element {
    terms: BTreeMap<Word, Scalar>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn from_word(w: Word, coeff: Scalar) -> Self {
        let mut e = Element::zero();
        e.add_term(w, coeff);
        e
    }

    pub fn generator(id: u32, field: &FieldSpec) -> Self {
        Element::from_word(Word::Path(vec![id]), field.one())
    }

    pub fn idem(v: u32, field: &FieldSpec) -> Self {
        Element::from_word(Word::Idem(v), field.one())
    }

    /// The unit `1 = Σ_v e_v`.
    pub fn unit(q: &Quiver, field: &FieldSpec) -> Self {
        let mut e = Element::zero();
        for (v, _, _) in q.ring.vertices() {
            e.add_term(Word::Idem(v), field.one());
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, w: &Word) -> Option<&Scalar> {
        self.terms.get(w)
    }

    pub fn add_term(&mut self, w: Word, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.remove(&w) {
            None => {
                self.terms.insert(w, coeff);
            }
            Some(old) => {
                let s = old.add(&coeff);
                if !s.is_zero() {
                    self.terms.insert(w, s);
                }
            }
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (w, c) in other.terms.iter() {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Element {
        Element { terms: self.terms.iter().map(|(w, c)| (w.clone(), c.neg())).collect() }
    }

    pub fn scale(&self, s: &Scalar) -> Element {
        if s.is_zero() {
            return Element::zero();
        }
        Element { terms: self.terms.iter().map(|(w, c)| (w.clone(), c.mul(s))).collect() }
    }

    /// Bilinear extension of word concatenation; non-composable products
    /// vanish.
    pub fn mul(&self, other: &Element, q: &Quiver) -> Element {
        let mut out = Element::zero();
        for (wa, ca) in self.terms.iter() {
            for (wb, cb) in other.terms.iter() {
                if let Some(w) = wa.concat(wb, q) {
                    out.add_term(w, ca.mul(cb));
                }
            }
        }
        out
    }

    /// The maximal word degree check: an element is homogeneous of degree `d`
    /// when every term has that degree.
    pub fn homogeneous_degree(&self, q: &Quiver) -> Option<i64> {
        let mut deg = None;
        for (w, _) in self.terms.iter() {
            let d = w.degree(q);
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return None,
                _ => {}
            }
        }
        deg
    }

    pub fn max_len(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    pub fn display<'a>(&'a self, q: &'a Quiver) -> ElementDisplay<'a> {
        ElementDisplay { element: self, quiver: q }
    }
}

pub struct ElementDisplay<'a> {
    element: &'a Element,
    quiver: &'a Quiver,
}

impl fmt::Display for ElementDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.element.is_zero() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.element.terms.iter().enumerate() {
            let coeff = alloc::format!("{}", c);
            if i == 0 {
                if coeff == "1" {
                    write!(f, "{}", w.display(self.quiver))?;
                } else if coeff == "-1" {
                    write!(f, "-{}", w.display(self.quiver))?;
                } else {
                    write!(f, "{}*{}", coeff, w.display(self.quiver))?;
                }
            } else if let Some(tail) = coeff.strip_prefix('-') {
                if tail == "1" {
                    write!(f, " - {}", w.display(self.quiver))?;
                } else {
                    write!(f, " - {}*{}", tail, w.display(self.quiver))?;
                }
            } else if coeff == "1" {
                write!(f, " + {}", w.display(self.quiver))?;
            } else {
                write!(f, " + {}*{}", coeff, w.display(self.quiver))?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgError {
    MissingImage(String),
    SlotMismatch { gen: String, detail: String },
    NotClosed(String),
}

impl fmt::Display for AlgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgError::MissingImage(g) => write!(f, "derivation has no image for generator {}", g),
            AlgError::SlotMismatch { gen, detail } => {
                write!(f, "substitution image for {} leaves its slot: {}", gen, detail)
            }
            AlgError::NotClosed(w) => write!(f, "target is not closed: d(target) = {}", w),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for AlgError {}

/// A derivation given by its values on generators, extended by the graded
/// Leibniz rule `d(xy) = (dx)y + (-1)^{|x| deg(d)} x(dy)`. Idempotents map
/// to 0. Generators without a stored image map to 0 when `total` is false;
/// with `total` set, a missing image is an error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub images: BTreeMap<u32, Element>,
    pub degree: i64,
}

impl Derivation {
    pub fn new(images: BTreeMap<u32, Element>, degree: i64) -> Self {
        Derivation { images, degree }
    }

    pub fn zero(degree: i64) -> Self {
        Derivation { images: BTreeMap::new(), degree }
    }

    pub fn image_of(&self, gen: u32) -> Option<&Element> {
        self.images.get(&gen)
    }

    /// Leibniz extension to an arbitrary element.
    pub fn apply(&self, x: &Element, q: &Quiver) -> Element {
        let mut out = Element::zero();
        let odd = self.degree.rem_euclid(2) == 1;
        for (w, c) in x.terms.iter() {
            let Word::Path(gens) = w else { continue };
            let mut prefix_degree: i64 = 0;
            for (i, g) in gens.iter().enumerate() {
                if let Some(dg) = self.images.get(g) {
                    if !dg.is_zero() {
                        let mut term = dg.clone();
                        if !gens[..i].is_empty() {
                            let prefix = Element::from_word(
                                Word::Path(gens[..i].to_vec()),
                                c.field().one(),
                            );
                            term = prefix.mul(&term, q);
                        }
                        if i + 1 < gens.len() {
                            let suffix = Element::from_word(
                                Word::Path(gens[i + 1..].to_vec()),
                                c.field().one(),
                            );
                            term = term.mul(&suffix, q);
                        }
                        let mut coeff = c.clone();
                        if odd && prefix_degree.rem_euclid(2) == 1 {
                            coeff = coeff.neg();
                        }
                        out = out.add(&term.scale(&coeff));
                    }
                }
                prefix_degree += q.gen(*g).degree;
            }
        }
        out
    }

    /// `apply`, but a generator occurring in `x` without a stored image is an
    /// error rather than implicitly closed.
    pub fn apply_total(&self, x: &Element, q: &Quiver) -> Result<Element, AlgError> {
        for (w, _) in x.terms.iter() {
            if let Word::Path(gens) = w {
                for g in gens {
                    if !self.images.contains_key(g) {
                        return Err(AlgError::MissingImage(q.gen(*g).name.clone()));
                    }
                }
            }
        }
        Ok(self.apply(x, q))
    }
}

/// Extends a generator substitution to an algebra endomorphism and applies it.
/// Generators absent from `subst` are fixed. Every image must stay in its
/// generator's `(src, dst, degree)` slot.
pub fn gen_automorphism(
    subst: &BTreeMap<u32, Element>,
    x: &Element,
    q: &Quiver,
) -> Result<Element, AlgError> {
    for (g, image) in subst.iter() {
        let gs = q.gen(*g);
        for (w, _) in image.terms.iter() {
            let ok = w.src(q) == gs.src && w.dst(q) == gs.dst && w.degree(q) == gs.degree;
            if !ok {
                return Err(AlgError::SlotMismatch {
                    gen: gs.name.clone(),
                    detail: alloc::format!("term {}", w.display(q)),
                });
            }
        }
    }
    let field = match x.terms.iter().next() {
        None => return Ok(Element::zero()),
        Some((_, c)) => c.field(),
    };
    let mut out = Element::zero();
    for (w, c) in x.terms.iter() {
        let mut acc = match w {
            Word::Idem(v) => Element::idem(*v, &field),
            Word::Path(gens) => {
                let mut acc = Element::idem(q.gen(gens[0]).src, &field);
                for g in gens {
                    let factor = match subst.get(g) {
                        Some(image) => image.clone(),
                        None => Element::generator(*g, &field),
                    };
                    acc = acc.mul(&factor, q);
                }
                acc
            }
        };
        acc = acc.scale(c);
        out = out.add(&acc);
    }
    Ok(out)
}

/// One rewrite rule: a single-word left side and its replacement.
#[derive(Clone, Debug)]
pub struct RewriteRule {
    pub lhs: Vec<u32>,
    pub rhs: Element,
}

#[derive(Clone, Debug)]
pub struct NormalForm {
    pub nf: Element,
    pub stable: bool,
}

/// Leftmost-innermost rewriting under the declared monomial order. Rewrites
/// until no rule applies; a word growing past `max_len` stops rewriting of
/// that branch and clears the `stable` flag. Verdicts past the bound are
/// "inconclusive", never guessed.
pub fn normal_form(rules: &[RewriteRule], x: &Element, q: &Quiver, max_len: usize) -> NormalForm {
    let mut stable = true;
    let mut done = Element::zero();
    // worklist of unprocessed terms
    let mut work: Vec<(Word, Scalar)> =
        x.terms.iter().map(|(w, c)| (w.clone(), c.clone())).collect();
    // generous budget; hitting it only clears `stable`
    let mut budget: usize = 10_000 + 1_000 * x.term_count().max(1);

    while let Some((w, c)) = work.pop() {
        if budget == 0 {
            stable = false;
            done.add_term(w, c);
            continue;
        }
        budget -= 1;
        let Word::Path(gens) = &w else {
            done.add_term(w, c);
            continue;
        };
        if gens.len() > max_len {
            stable = false;
            done.add_term(w.clone(), c);
            continue;
        }
        // leftmost match; rules tried in declaration order at each position
        let mut hit = None;
        'scan: for start in 0..gens.len() {
            for rule in rules {
                let end = start + rule.lhs.len();
                if end <= gens.len() && gens[start..end] == rule.lhs[..] {
                    hit = Some((start, end, rule));
                    break 'scan;
                }
            }
        }
        match hit {
            None => done.add_term(w.clone(), c),
            Some((start, end, rule)) => {
                let mut replaced = rule.rhs.clone();
                if start > 0 {
                    let prefix =
                        Element::from_word(Word::Path(gens[..start].to_vec()), c.field().one());
                    replaced = prefix.mul(&replaced, q);
                }
                if end < gens.len() {
                    let suffix =
                        Element::from_word(Word::Path(gens[end..].to_vec()), c.field().one());
                    replaced = replaced.mul(&suffix, q);
                }
                for (rw, rc) in replaced.terms.iter() {
                    work.push((rw.clone(), rc.mul(&c)));
                }
            }
        }
    }
    NormalForm { nf: done, stable }
}

/// Enumerates composable words (paths only) with length in `1..=max_len`;
/// `keep` filters by (degree, word) and `prune` can cut branches early.
pub fn enumerate_words<F: FnMut(&Word, i64) -> bool>(
    q: &Quiver,
    max_len: usize,
    mut keep: F,
) -> Vec<Word> {
    let mut out = Vec::new();
    let (mut min_gen, mut max_gen) = (i64::MAX, i64::MIN);
    for (_, g) in q.gens() {
        min_gen = min_gen.min(g.degree);
        max_gen = max_gen.max(g.degree);
    }
    if q.gen_count() == 0 || max_len == 0 {
        return out;
    }
    // successor table by source vertex
    let mut by_src: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for (i, g) in q.gens() {
        by_src.entry(g.src).or_default().push(i);
    }
    let mut stack: Vec<(Vec<u32>, i64)> = Vec::new();
    for (i, g) in q.gens() {
        stack.push((vec![i], g.degree));
    }
    stack.reverse();
    while let Some((gens, degree)) = stack.pop() {
        let w = Word::Path(gens.clone());
        if keep(&w, degree) {
            out.push(w);
        }
        if gens.len() < max_len {
            let dst = q.gen(*gens.last().unwrap()).dst;
            if let Some(next) = by_src.get(&dst) {
                for g in next.iter().rev() {
                    let mut ext = gens.clone();
                    ext.push(*g);
                    stack.push((ext, degree + q.gen(*g).degree));
                }
            }
        }
    }
    out.sort();
    out
}

#[derive(Clone, Debug)]
pub struct PrimitiveSearch {
    pub primitive: Option<Element>,
    /// Number of candidate words in the solve.
    pub candidates: usize,
}

/// Searches for `x` with `d(x) = target` among words of the given degree and
/// length at most `max_len`, in the `(src, dst)` slots occurring in `target`.
/// The target must be `d`-closed. `None` certifies that no primitive exists
/// within the bound.
pub fn find_primitive(
    d: &Derivation,
    target: &Element,
    degree: i64,
    max_len: usize,
    q: &Quiver,
    field: &FieldSpec,
) -> Result<PrimitiveSearch, AlgError> {
    let closed = d.apply(target, q);
    if !closed.is_zero() {
        return Err(AlgError::NotClosed(alloc::format!("{}", closed.display(q))));
    }
    if target.is_zero() {
        return Ok(PrimitiveSearch { primitive: Some(Element::zero()), candidates: 0 });
    }
    let mut slots: Vec<(u32, u32)> = Vec::new();
    for (w, _) in target.terms() {
        let s = (w.src(q), w.dst(q));
        if !slots.contains(&s) {
            slots.push(s);
        }
    }
    let candidates = enumerate_words(q, max_len, |w, deg| {
        deg == degree && slots.contains(&(w.src(q), w.dst(q)))
    });
    // Assemble d over the candidate basis and solve d(x) = target exactly.
    let mut row_index: BTreeMap<Word, usize> = BTreeMap::new();
    let mut images: Vec<Element> = Vec::with_capacity(candidates.len());
    for w in candidates.iter() {
        let img = d.apply(&Element::from_word(w.clone(), field.one()), q);
        for (iw, _) in img.terms() {
            let next = row_index.len();
            row_index.entry(iw.clone()).or_insert(next);
        }
        images.push(img);
    }
    for (w, _) in target.terms() {
        let next = row_index.len();
        row_index.entry(w.clone()).or_insert(next);
    }
    let mut m = SparseMatrix::new(row_index.len(), candidates.len());
    for (col, img) in images.iter().enumerate() {
        for (w, c) in img.terms() {
            m.add_entry(row_index[w], col, c.clone());
        }
    }
    let mut b = vec![field.zero(); row_index.len()];
    for (w, c) in target.terms() {
        b[row_index[w]] = c.clone();
    }
    let outcome = crate::scalars::solve_linear(&m, Some(&b), field)
        .expect("dimensions consistent by construction");
    let primitive = outcome.solution.map(|x| {
        let mut e = Element::zero();
        for (col, w) in candidates.iter().enumerate() {
            e.add_term(w.clone(), x[col].clone());
        }
        e
    });
    Ok(PrimitiveSearch { primitive, candidates: candidates.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::{build_ground, Decoration};
    use alloc::string::ToString;
    use alloc::sync::Arc;

    const Q: FieldSpec = FieldSpec::Rationals;

    /// Hopf CE presentation: generator degrees are the shifted (algebra)
    /// degrees, matching the printed differential.
    fn hopf_ce() -> Arc<Quiver> {
        let verts =
            vec![("1".to_string(), Decoration::Plus), ("2".to_string(), Decoration::Minus)];
        let gens = [
            ("c1", "1", "1", -1),
            ("c2", "2", "2", -1),
            ("c12", "1", "2", 0),
            ("c21", "2", "1", 0),
            ("s1", "1", "1", 0),
            ("t1", "1", "1", 0),
            ("k1", "1", "1", -1),
            ("l1", "1", "1", -1),
            ("u1", "1", "1", -2),
        ]
        .into_iter()
        .map(|(n, s, d, deg)| (n.to_string(), s.to_string(), d.to_string(), deg, None))
        .collect();
        let (_, module) = build_ground(verts, gens).unwrap();
        module.quiver
    }

    fn gen(q: &Quiver, name: &str) -> Element {
        Element::generator(q.gen_by_name(name).unwrap(), &Q)
    }

    fn word(q: &Quiver, names: &[&str]) -> Element {
        let gens: Vec<u32> = names.iter().map(|n| q.gen_by_name(n).unwrap()).collect();
        Element::from_word(Word::Path(gens), Q.one())
    }

    /// The first printed Hopf differential (with idempotent terms).
    fn hopf_d(q: &Quiver) -> Derivation {
        let e1 = Element::idem(0, &Q);
        let mut images = BTreeMap::new();
        let mut set = |name: &str, img: Element| {
            images.insert(q.gen_by_name(name).unwrap(), img);
        };
        set("c1", e1.add(&gen(q, "s1")).add(&word(q, &["c12", "c21"])));
        set("c2", word(q, &["c21", "c12"]));
        set("k1", e1.sub(&word(q, &["s1", "t1"])));
        set("l1", e1.sub(&word(q, &["t1", "s1"])));
        set("u1", word(q, &["k1", "s1"]).sub(&word(q, &["s1", "l1"])));
        set("c12", Element::zero());
        set("c21", Element::zero());
        set("s1", Element::zero());
        set("t1", Element::zero());
        Derivation::new(images, 1)
    }

    /// The second printed Hopf differential (after the change of variables).
    fn hopf_d_reduced(q: &Quiver) -> Derivation {
        let mut images = BTreeMap::new();
        let mut set = |name: &str, img: Element| {
            images.insert(q.gen_by_name(name).unwrap(), img);
        };
        set("c1", gen(q, "s1").add(&word(q, &["c12", "c21"])));
        set("c2", word(q, &["c21", "c12"]));
        set("k1", gen(q, "s1").add(&gen(q, "t1")).sub(&word(q, &["s1", "t1"])));
        set("l1", gen(q, "s1").add(&gen(q, "t1")).sub(&word(q, &["t1", "s1"])));
        set(
            "u1",
            gen(q, "l1")
                .sub(&gen(q, "k1"))
                .add(&word(q, &["k1", "s1"]))
                .sub(&word(q, &["s1", "l1"])),
        );
        set("c12", Element::zero());
        set("c21", Element::zero());
        set("s1", Element::zero());
        set("t1", Element::zero());
        Derivation::new(images, 1)
    }

    #[test]
    fn products_concatenate_composable_paths() {
        let q = hopf_ce();
        let p = gen(&q, "c12").mul(&gen(&q, "c21"), &q);
        assert_eq!(p, word(&q, &["c12", "c21"]));
        // idempotent action: e_v w = w iff w starts at v
        let e1 = Element::idem(0, &Q);
        let e2 = Element::idem(1, &Q);
        assert_eq!(e1.mul(&gen(&q, "c12"), &q), gen(&q, "c12"));
        assert!(e2.mul(&gen(&q, "c12"), &q).is_zero());
        // non-composable endpoints vanish
        assert!(gen(&q, "c12").mul(&gen(&q, "c12"), &q).is_zero());
    }

    #[test]
    fn mul_is_associative_on_short_words() {
        let q = hopf_ce();
        let words = enumerate_words(&q, 2, |_, _| true);
        let elems: Vec<Element> =
            words.iter().map(|w| Element::from_word(w.clone(), Q.one())).collect();
        // all triples of words up to length 2 (length-4 products), plus a
        // sample of longer ones below
        for a in elems.iter() {
            for b in elems.iter() {
                for c in elems.iter() {
                    let left = a.mul(b, &q).mul(c, &q);
                    let right = a.mul(&b.mul(c, &q), &q);
                    assert_eq!(left, right);
                }
            }
        }
    }

    #[test]
    fn hopf_differential_squares_to_zero() {
        let q = hopf_ce();
        for d in [hopf_d(&q), hopf_d_reduced(&q)] {
            for (id, g) in q.gens() {
                let dg = d.image_of(id).cloned().unwrap_or_default();
                let dd = d.apply(&dg, &q);
                assert!(dd.is_zero(), "d^2({}) = {}", g.name, dd.display(&q));
            }
        }
    }

    #[test]
    fn leibniz_with_closed_right_factor() {
        // d(k1 s1) = (dk1) s1 with ds1 = 0, for the reduced differential:
        // (s1 + t1 - s1t1) s1
        let q = hopf_ce();
        let d = hopf_d_reduced(&q);
        let got = d.apply(&word(&q, &["k1", "s1"]), &q);
        let want = gen(&q, "s1")
            .add(&gen(&q, "t1"))
            .sub(&word(&q, &["s1", "t1"]))
            .mul(&gen(&q, "s1"), &q);
        assert_eq!(got, want);
    }

    #[test]
    fn leibniz_rule_holds_on_random_pairs() {
        let q = hopf_ce();
        let d = hopf_d_reduced(&q);
        let words = enumerate_words(&q, 3, |_, _| true);
        for (i, wa) in words.iter().enumerate().step_by(7) {
            for wb in words.iter().skip(i % 5).step_by(11) {
                let a = Element::from_word(wa.clone(), Q.one());
                let b = Element::from_word(wb.clone(), Q.one());
                let lhs = d.apply(&a.mul(&b, &q), &q);
                let mut rhs = d.apply(&a, &q).mul(&b, &q);
                let sign_a = wa.degree(&q).rem_euclid(2) == 1;
                let adb = a.mul(&d.apply(&b, &q), &q);
                rhs = if sign_a { rhs.sub(&adb) } else { rhs.add(&adb) };
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn derivation_kills_idempotents() {
        let q = hopf_ce();
        let d = hopf_d(&q);
        assert!(d.apply(&Element::idem(0, &Q), &q).is_zero());
    }

    #[test]
    fn missing_image_is_an_error() {
        let q = hopf_ce();
        let d = Derivation::zero(1);
        assert!(matches!(
            d.apply_total(&gen(&q, "c1"), &q),
            Err(AlgError::MissingImage(_))
        ));
    }

    /// The change of variables s1 -> s1 - e1, t1 -> t1 - e1 maps the first
    /// printed differential table onto the second, term for term.
    #[test]
    fn change_of_variables_reduces_the_differential() {
        let q = hopf_ce();
        let e1 = Element::idem(0, &Q);
        let mut subst = BTreeMap::new();
        subst.insert(q.gen_by_name("s1").unwrap(), gen(&q, "s1").sub(&e1));
        subst.insert(q.gen_by_name("t1").unwrap(), gen(&q, "t1").sub(&e1));
        let d1 = hopf_d(&q);
        let d2 = hopf_d_reduced(&q);
        for name in ["c1", "c2", "k1", "l1", "u1"] {
            let id = q.gen_by_name(name).unwrap();
            let mapped = gen_automorphism(&subst, d1.image_of(id).unwrap(), &q).unwrap();
            assert_eq!(&mapped, d2.image_of(id).unwrap(), "d{}", name);
        }
    }

    #[test]
    fn identity_substitution_is_identity() {
        let q = hopf_ce();
        let x = word(&q, &["k1", "s1"]).add(&gen(&q, "c1").scale(&Q.from_integer(-3)));
        assert_eq!(gen_automorphism(&BTreeMap::new(), &x, &q).unwrap(), x);
    }

    #[test]
    fn triangular_substitution_composes_with_inverse_to_identity() {
        let q = hopf_ce();
        let e1 = Element::idem(0, &Q);
        let s1 = q.gen_by_name("s1").unwrap();
        let t1 = q.gen_by_name("t1").unwrap();
        let mut fwd = BTreeMap::new();
        fwd.insert(s1, gen(&q, "s1").sub(&e1));
        fwd.insert(t1, gen(&q, "t1").sub(&e1));
        let mut back = BTreeMap::new();
        back.insert(s1, gen(&q, "s1").add(&e1));
        back.insert(t1, gen(&q, "t1").add(&e1));
        for (id, _) in q.gens() {
            let x = Element::generator(id, &Q);
            let round = gen_automorphism(&back, &gen_automorphism(&fwd, &x, &q).unwrap(), &q)
                .unwrap();
            assert_eq!(round, x);
        }
    }

    #[test]
    fn slot_mismatch_is_rejected() {
        let q = hopf_ce();
        let mut subst = BTreeMap::new();
        // u1 has degree -2; s1 has degree 0: not a slot-preserving image
        subst.insert(q.gen_by_name("s1").unwrap(), gen(&q, "u1"));
        assert!(matches!(
            gen_automorphism(&subst, &gen(&q, "s1"), &q),
            Err(AlgError::SlotMismatch { .. })
        ));
    }

    /// Rewriting in <b3, b4> with b3 b4 -> -1 (the mirror-7_2 quotient).
    fn b34() -> Arc<Quiver> {
        let verts = vec![("1".to_string(), Decoration::Minus)];
        let gens = [("b3", 0i64), ("b4", 0i64)]
            .into_iter()
            .map(|(n, deg)| (n.to_string(), "1".to_string(), "1".to_string(), deg, None))
            .collect();
        let (_, module) = build_ground(verts, gens).unwrap();
        module.quiver
    }

    #[test]
    fn rewrite_single_step() {
        let q = b34();
        let b3 = q.gen_by_name("b3").unwrap();
        let b4 = q.gen_by_name("b4").unwrap();
        let rules = vec![RewriteRule {
            lhs: vec![b3, b4],
            rhs: Element::idem(0, &Q).neg(),
        }];
        // b3 b4 b3 -> -b3
        let x = Element::from_word(Word::Path(vec![b3, b4, b3]), Q.one());
        let nf = normal_form(&rules, &x, &q, 6);
        assert!(nf.stable);
        assert_eq!(nf.nf, Element::generator(b3, &Q).neg());
        // b4 b3 is already normal
        let y = Element::from_word(Word::Path(vec![b4, b3]), Q.one());
        let nf = normal_form(&rules, &y, &q, 6);
        assert!(nf.stable);
        assert_eq!(nf.nf, y);
        // empty rule set: identity
        let nf = normal_form(&[], &x, &q, 6);
        assert!(nf.stable);
        assert_eq!(nf.nf, x);
    }

    #[test]
    fn normal_form_is_idempotent_when_stable() {
        let q = b34();
        let b3 = q.gen_by_name("b3").unwrap();
        let b4 = q.gen_by_name("b4").unwrap();
        let rules = vec![RewriteRule {
            lhs: vec![b3, b4],
            rhs: Element::idem(0, &Q).neg(),
        }];
        let x = Element::from_word(Word::Path(vec![b3, b3, b4, b4, b3, b4]), Q.one());
        let nf = normal_form(&rules, &x, &q, 8);
        assert!(nf.stable);
        let again = normal_form(&rules, &nf.nf, &q, 8);
        assert!(again.stable);
        assert_eq!(again.nf, nf.nf);
    }

    #[test]
    fn primitive_search_finds_k1() {
        let q = hopf_ce();
        let d = hopf_d_reduced(&q);
        // target = dk1: the solver must return some x with d(x) = target
        let target = gen(&q, "s1").add(&gen(&q, "t1")).sub(&word(&q, &["s1", "t1"]));
        let found = find_primitive(&d, &target, -1, 3, &q, &Q).unwrap();
        let x = found.primitive.expect("dk1 is exactly this element");
        assert_eq!(d.apply(&x, &q), target);
        // target = 0 gives 0
        let zero = find_primitive(&d, &Element::zero(), -1, 3, &q, &Q).unwrap();
        assert_eq!(zero.primitive.unwrap(), Element::zero());
    }

    #[test]
    fn primitive_search_rejects_non_closed_targets() {
        let q = hopf_ce();
        let d = hopf_d_reduced(&q);
        let target = gen(&q, "k1");
        assert!(matches!(
            find_primitive(&d, &target, -1, 3, &q, &Q),
            Err(AlgError::NotClosed(_))
        ));
    }

    #[test]
    fn word_order_is_length_then_lex() {
        let q = hopf_ce();
        let words = enumerate_words(&q, 2, |_, _| true);
        for pair in words.windows(2) {
            assert!(pair[0] < pair[1]);
            assert!(pair[0].len() <= pair[1].len());
        }
    }
}
