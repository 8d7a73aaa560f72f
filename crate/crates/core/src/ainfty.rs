//! A-infinity algebras and coalgebras as finite-support structure tables,
//! with relation checkers, dualization, augmentation enumeration, and a
//! bounded sign-repair search for printed tables whose orientation signs are
//! implicit.
//!
//! Conventions. Operation tables are keyed by the input tuple written as a
//! composable word in textual order; `m_2(x, y)` is stored under the word
//! `x y`. The checker evaluates
//!
//! `Σ_{i,j} (-1)^{|a_1|+…+|a_j|-j} m_{d-i+1}(a_d,…,m_i(a_{j+i},…,a_{j+1}),…,a_1)`
//!
//! where the written tuple `(a_d, …, a_1)` is the textual word and the sign
//! collects the degrees of the rightmost `j` entries. Coalgebra tables store
//! the reduced coproducts; counit and coaugmentation are strict and implicit.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::ground::{dual_module, DualSide, GradedModule, Quiver};
use crate::ncalg::{enumerate_words, Derivation, Element, Word};
use crate::scalars::{FieldSpec, Scalar};

/// A strictly unital A-infinity algebra presented by structure tables on a
/// generator basis. Tables are keyed on non-idempotent generators only; unit
/// behaviour (`m_1(1) = 0`, two-sided `m_2` unitality, higher operations
/// annihilating the unit) is built into evaluation.
#[derive(Clone, Debug)]
pub struct AInfAlg {
    pub module: GradedModule,
    /// input word (textual order) -> module element (words of length <= 1)
    pub ops: BTreeMap<Vec<u32>, Element>,
    pub field: FieldSpec,
    /// Values of a strict augmentation on generators; generators absent from
    /// the map augment to 0. `None` means "augmented by projection to k".
    pub augmentation: Option<BTreeMap<u32, Scalar>>,
    pub name: String,
}

/// A strictly counital, coaugmented A-infinity coalgebra presented by its
/// reduced coproduct tables.
#[derive(Clone, Debug)]
pub struct AInfCoalg {
    pub module: GradedModule,
    /// generator -> arity -> tensor (an element all of whose words have
    /// length equal to the arity)
    pub cops: BTreeMap<u32, BTreeMap<u8, Element>>,
    pub field: FieldSpec,
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StructureError {
    BadOpDegree { key: String, expected: i64, got: i64 },
    BadOpSlot { key: String, detail: String },
    BadOpShape { key: String, detail: String },
    AugmentationOffDiagonal(String),
    EnumerationOverRationals,
    DenominatorDivisibleByP(String),
    NotConilpotent(String),
}

impl fmt::Display for StructureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureError::BadOpDegree { key, expected, got } => {
                write!(f, "operation on {} has degree {}, expected {}", key, got, expected)
            }
            StructureError::BadOpSlot { key, detail } => {
                write!(f, "operation on {} leaves its slot: {}", key, detail)
            }
            StructureError::BadOpShape { key, detail } => {
                write!(f, "operation on {} malformed: {}", key, detail)
            }
            StructureError::AugmentationOffDiagonal(g) => {
                write!(f, "augmentation nonzero on mixed or graded generator {}", g)
            }
            StructureError::EnumerationOverRationals => {
                write!(f, "augmentation enumeration requires a finite field; over Q only verification of a supplied candidate is possible")
            }
            StructureError::DenominatorDivisibleByP(s) => {
                write!(f, "coefficient {} does not reduce mod p", s)
            }
            StructureError::NotConilpotent(g) => {
                write!(f, "no conilpotency order: cycle through generator {}", g)
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for StructureError {}

#[derive(Clone, Debug)]
pub struct RelationWitness {
    /// The failing input tuple, as generator names in written order.
    pub tuple: Vec<String>,
    /// The nonzero residue of the relation on that tuple.
    pub residue: Element,
}

#[derive(Clone, Debug)]
pub struct RelationReport {
    pub ok: bool,
    pub witnesses: Vec<RelationWitness>,
}

impl AInfAlg {
    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.module.quiver
    }

    /// Structural validation: every table value is a module element of the
    /// right degree and slot, keyed by a composable word.
    pub fn validate(&self) -> Result<(), StructureError> {
        let q = self.quiver();
        for (key, value) in self.ops.iter() {
            let word = Word::Path(key.clone());
            let keyname = alloc::format!("{}", word.display(q));
            if !word.composable(q) {
                return Err(StructureError::BadOpShape {
                    key: keyname,
                    detail: String::from("input word is not composable"),
                });
            }
            let arity = key.len() as i64;
            let expected = word.degree(q) + 2 - arity;
            for (w, _) in value.terms() {
                if w.len() > 1 {
                    return Err(StructureError::BadOpShape {
                        key: keyname,
                        detail: String::from("value is not a module element"),
                    });
                }
                if w.degree(q) != expected {
                    return Err(StructureError::BadOpDegree {
                        key: keyname,
                        expected,
                        got: w.degree(q),
                    });
                }
                if w.src(q) != word.src(q) || w.dst(q) != word.dst(q) {
                    return Err(StructureError::BadOpSlot {
                        key: keyname,
                        detail: alloc::format!("term {}", w.display(q)),
                    });
                }
            }
        }
        if let Some(aug) = &self.augmentation {
            for (g, v) in aug.iter() {
                let gs = self.quiver().gen(*g);
                if !v.is_zero() && (gs.src != gs.dst || gs.degree != 0) {
                    return Err(StructureError::AugmentationOffDiagonal(gs.name.clone()));
                }
            }
        }
        Ok(())
    }

    /// Table lookup on a generator tuple; zero when absent.
    pub fn op_on_gens(&self, gens: &[u32]) -> Element {
        self.ops.get(gens).cloned().unwrap_or_default()
    }

    /// Evaluates `m_arity` on a tuple of module basis entries (generators or
    /// idempotents), applying the strict unit rules.
    pub fn op_on_tuple(&self, entries: &[Word]) -> Element {
        let q = self.quiver();
        let idems: Vec<usize> = entries
            .iter()
            .enumerate()
            .filter(|(_, w)| matches!(w, Word::Idem(_)))
            .map(|(i, _)| i)
            .collect();
        if idems.is_empty() {
            let gens: Vec<u32> = entries
                .iter()
                .map(|w| match w {
                    Word::Path(g) => g[0],
                    Word::Idem(_) => unreachable!(),
                })
                .collect();
            // tensors over k vanish on non-composable tuples
            if !Word::Path(gens.clone()).composable(q) {
                return Element::zero();
            }
            return self.op_on_gens(&gens);
        }
        match entries.len() {
            1 => Element::zero(), // m_1(e_v) = 0
            2 => {
                // strict two-sided unitality
                let (a, b) = (&entries[0], &entries[1]);
                match (a, b) {
                    (Word::Idem(v), Word::Idem(w)) => {
                        if v == w {
                            Element::idem(*v, &self.field)
                        } else {
                            Element::zero()
                        }
                    }
                    (Word::Idem(v), x) => {
                        // the left unit rule carries (-1)^{|x|} so that the
                        // ordinary (d-form) product is strictly unital, i.e.
                        // matches path concatenation on the nose
                        if x.src(q) == *v {
                            let one = self.field.one();
                            let c = if x.degree(q).rem_euclid(2) == 1 { one.neg() } else { one };
                            Element::from_word(x.clone(), c)
                        } else {
                            Element::zero()
                        }
                    }
                    (x, Word::Idem(v)) => {
                        if x.dst(q) == *v {
                            Element::from_word(x.clone(), self.field.one())
                        } else {
                            Element::zero()
                        }
                    }
                    _ => unreachable!(),
                }
            }
            _ => Element::zero(), // higher operations annihilate the unit
        }
    }

    /// `m_1` extended to module elements.
    pub fn m1(&self, x: &Element) -> Element {
        let mut out = Element::zero();
        for (w, c) in x.terms() {
            out = out.add(&self.op_on_tuple(core::slice::from_ref(w)).scale(c));
        }
        out
    }

    /// `m_2` extended bilinearly to module elements.
    pub fn m2(&self, x: &Element, y: &Element) -> Element {
        let mut out = Element::zero();
        for (wx, cx) in x.terms() {
            for (wy, cy) in y.terms() {
                let v = self.op_on_tuple(&[wx.clone(), wy.clone()]);
                out = out.add(&v.scale(&cx.mul(cy)));
            }
        }
        out
    }

    /// The ordinary differential `d a = (-1)^{|a|} m_1(a)` of the associated
    /// DG-algebra, on homogeneous module elements.
    pub fn d_form_differential(&self, x: &Element) -> Element {
        let q = self.quiver();
        let mut out = Element::zero();
        for (w, c) in x.terms() {
            let img = self.op_on_tuple(core::slice::from_ref(w));
            let signed = if w.degree(q).rem_euclid(2) == 1 { img.neg() } else { img };
            out = out.add(&signed.scale(c));
        }
        out
    }

    /// The ordinary product `x·y = (-1)^{|y|} m_2(x, y)`.
    pub fn d_form_product(&self, x: &Element, y: &Element) -> Element {
        let q = self.quiver();
        let mut out = Element::zero();
        for (wx, cx) in x.terms() {
            for (wy, cy) in y.terms() {
                let mut v = self.op_on_tuple(&[wx.clone(), wy.clone()]);
                if wy.degree(q).rem_euclid(2) == 1 {
                    v = v.neg();
                }
                out = out.add(&v.scale(&cx.mul(cy)));
            }
        }
        out
    }

    /// Augmentation value of a generator (0 when unset).
    pub fn aug_value(&self, g: u32) -> Scalar {
        self.augmentation
            .as_ref()
            .and_then(|m| m.get(&g).cloned())
            .unwrap_or(self.field.zero())
    }

    /// The module as a chain complex: basis per degree (idempotents in degree
    /// 0), differential the d-form `m_1`.
    pub fn module_window(
        &self,
        d_min: i64,
        d_max: i64,
    ) -> Result<crate::homology::ChainWindow, crate::homology::WindowError> {
        let q = self.quiver().clone();
        let mut basis: BTreeMap<i64, Vec<String>> = BTreeMap::new();
        let mut words: BTreeMap<(i64, String), Word> = BTreeMap::new();
        for k in (d_min - 1)..=d_max {
            basis.insert(k, Vec::new());
        }
        if (d_min - 1..=d_max).contains(&0) {
            for (v, name, _) in q.ring.vertices() {
                let label = alloc::format!("e({})", name);
                basis.get_mut(&0).unwrap().push(label.clone());
                words.insert((0, label), Word::Idem(v));
            }
        }
        for (i, g) in q.gens() {
            if (d_min - 1..=d_max).contains(&g.degree) {
                basis.get_mut(&g.degree).unwrap().push(g.name.clone());
                words.insert((g.degree, g.name.clone()), Word::Path(vec![i]));
            }
        }
        let complete: BTreeMap<i64, bool> =
            ((d_min - 2)..=(d_max + 1)).map(|k| (k, true)).collect();
        let this = self.clone();
        let qq = q.clone();
        crate::homology::ChainWindow::assemble(
            d_min,
            d_max,
            1,
            self.field,
            alloc::format!("module:{}", self.name),
            basis,
            complete,
            move |k, label| {
                let Some(w) = words.get(&(k, String::from(label))) else { return vec![] };
                let img = this.d_form_differential(&Element::from_word(w.clone(), this.field.one()));
                img.terms()
                    .map(|(iw, c)| (alloc::format!("{}", iw.display(&qq)), c.clone()))
                    .collect()
            },
        )
    }

    /// Converts every coefficient into `field`. Fails when a rational
    /// denominator vanishes mod p.
    pub fn to_field(&self, field: &FieldSpec) -> Result<AInfAlg, StructureError> {
        let mut ops = BTreeMap::new();
        for (k, v) in self.ops.iter() {
            ops.insert(k.clone(), convert_element(v, field)?);
        }
        let augmentation = match &self.augmentation {
            None => None,
            Some(m) => {
                let mut out = BTreeMap::new();
                for (g, s) in m.iter() {
                    out.insert(*g, convert_scalar(s, field)?);
                }
                Some(out)
            }
        };
        Ok(AInfAlg { module: self.module.clone(), ops, field: *field, augmentation, name: self.name.clone() })
    }
}

impl AInfCoalg {
    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.module.quiver
    }

    pub fn delta(&self, g: u32, arity: u8) -> Element {
        self.cops
            .get(&g)
            .and_then(|m| m.get(&arity))
            .cloned()
            .unwrap_or_default()
    }

    pub fn max_arity(&self) -> u8 {
        self.cops
            .values()
            .flat_map(|m| m.keys().copied())
            .max()
            .unwrap_or(0)
    }

    pub fn validate(&self) -> Result<(), StructureError> {
        let q = self.quiver();
        for (g, table) in self.cops.iter() {
            let gs = q.gen(*g);
            for (arity, value) in table.iter() {
                let expected = gs.degree + 2 - *arity as i64;
                for (w, _) in value.terms() {
                    if w.len() != *arity as usize {
                        return Err(StructureError::BadOpShape {
                            key: gs.name.clone(),
                            detail: alloc::format!(
                                "arity-{} tensor contains a length-{} word",
                                arity,
                                w.len()
                            ),
                        });
                    }
                    if w.degree(q) != expected {
                        return Err(StructureError::BadOpDegree {
                            key: gs.name.clone(),
                            expected,
                            got: w.degree(q),
                        });
                    }
                    if w.src(q) != gs.src || w.dst(q) != gs.dst {
                        return Err(StructureError::BadOpSlot {
                            key: gs.name.clone(),
                            detail: alloc::format!("term {}", w.display(q)),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// A total order on generators exhibiting conilpotency: every reduced
    /// coproduct of a generator is supported on strictly earlier ones.
    pub fn conilpotency_order(&self) -> Result<Vec<u32>, StructureError> {
        let q = self.quiver();
        let n = q.gen_count();
        // edges g -> factor for every factor occurring in some Δ(g)
        let mut deps: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for (g, table) in self.cops.iter() {
            let mut ds = Vec::new();
            for value in table.values() {
                for (w, _) in value.terms() {
                    if let Word::Path(gens) = w {
                        for x in gens {
                            if !ds.contains(x) {
                                ds.push(*x);
                            }
                        }
                    }
                }
            }
            deps.insert(*g, ds);
        }
        // Kahn: repeatedly emit a generator all of whose dependencies are out
        let mut emitted = vec![false; n];
        let mut order = Vec::new();
        loop {
            let mut advanced = false;
            for g in 0..n as u32 {
                if emitted[g as usize] {
                    continue;
                }
                let ok = deps
                    .get(&g)
                    .map(|ds| ds.iter().all(|x| emitted[*x as usize]))
                    .unwrap_or(true);
                if ok {
                    emitted[g as usize] = true;
                    order.push(g);
                    advanced = true;
                }
            }
            if order.len() == n {
                return Ok(order);
            }
            if !advanced {
                let stuck = (0..n as u32).find(|g| !emitted[*g as usize]).unwrap();
                return Err(StructureError::NotConilpotent(q.gen(stuck).name.clone()));
            }
        }
    }

    /// Reads the reduced coproduct tables off a free DG-presentation: the
    /// arity-j part of `d(c)` (words of length j) is `Δ_j(c)`, with the
    /// generator degrees shifted down by one. This inverts the cobar
    /// construction.
    pub fn from_ce_presentation(
        ce_quiver: &Arc<Quiver>,
        d: &Derivation,
        field: &FieldSpec,
        name: &str,
    ) -> AInfCoalg {
        let coalg_quiver = Arc::new(ce_quiver.shifted(-1));
        let mut cops: BTreeMap<u32, BTreeMap<u8, Element>> = BTreeMap::new();
        for (g, _) in ce_quiver.gens() {
            let Some(img) = d.image_of(g) else { continue };
            let mut by_arity: BTreeMap<u8, Element> = BTreeMap::new();
            for (w, c) in img.terms() {
                let arity = w.len() as u8; // idempotent terms are arity 0 (curvature)
                by_arity
                    .entry(arity)
                    .or_insert_with(Element::zero)
                    .add_term(w.clone(), c.clone());
            }
            by_arity.retain(|_, v| !v.is_zero());
            if !by_arity.is_empty() {
                cops.insert(g, by_arity);
            }
        }
        AInfCoalg {
            module: GradedModule { quiver: coalg_quiver, includes_idempotents: true },
            cops,
            field: *field,
            name: String::from(name),
        }
    }

    /// True when some generator has a curvature term (`Δ_0 != 0`); such data
    /// must be repaired through an augmentation shift before use.
    pub fn has_curvature(&self) -> bool {
        self.cops.values().any(|t| t.contains_key(&0))
    }

    pub fn to_field(&self, field: &FieldSpec) -> Result<AInfCoalg, StructureError> {
        let mut cops = BTreeMap::new();
        for (g, table) in self.cops.iter() {
            let mut out = BTreeMap::new();
            for (a, v) in table.iter() {
                out.insert(*a, convert_element(v, field)?);
            }
            cops.insert(*g, out);
        }
        Ok(AInfCoalg { module: self.module.clone(), cops, field: *field, name: self.name.clone() })
    }
}

/// Re-expresses a scalar in another exact field; reduction mod p fails on
/// denominators divisible by p.
pub fn convert_scalar_to_field(s: &Scalar, field: &FieldSpec) -> Result<Scalar, StructureError> {
    convert_scalar(s, field)
}

/// Re-expresses an element coefficientwise in another exact field.
pub fn convert_element_to_field(e: &Element, field: &FieldSpec) -> Result<Element, StructureError> {
    convert_element(e, field)
}

fn convert_scalar(s: &Scalar, field: &FieldSpec) -> Result<Scalar, StructureError> {
    match (s, field) {
        (Scalar::Rational(r), FieldSpec::Rationals) => Ok(Scalar::Rational(r.clone())),
        (Scalar::Prime { value, modulus }, FieldSpec::PrimeField(p)) if modulus == p => {
            Ok(s.clone())
        }
        (Scalar::Rational(r), FieldSpec::PrimeField(_)) => {
            use num_traits::ToPrimitive;
            let numer = r.numer();
            let denom = r.denom();
            let reduce = |x: &num_bigint::BigInt| -> i64 {
                // reduce a bigint mod p through i64-safe remainder
                let p = match field {
                    FieldSpec::PrimeField(p) => *p as i64,
                    _ => unreachable!(),
                };
                (x % p).to_i64().unwrap_or(0)
            };
            let n = field.from_integer(reduce(numer));
            let d = field.from_integer(reduce(denom));
            if d.is_zero() {
                return Err(StructureError::DenominatorDivisibleByP(alloc::format!("{}", s)));
            }
            Ok(n.mul(&d.inv()))
        }
        (Scalar::Prime { .. }, _) => Err(StructureError::DenominatorDivisibleByP(
            String::from("cannot lift a residue to another field"),
        )),
    }
}

fn convert_element(e: &Element, field: &FieldSpec) -> Result<Element, StructureError> {
    let mut out = Element::zero();
    for (w, c) in e.terms() {
        out.add_term(w.clone(), convert_scalar(c, field)?);
    }
    Ok(out)
}

/// Evaluates the A-infinity relations on every composable generator tuple up
/// to `max_arity`; `ok` iff every residue vanishes.
pub fn check_ainf(a: &AInfAlg, max_arity: usize) -> RelationReport {
    let q = a.quiver();
    let mut witnesses = Vec::new();
    for d in 1..=max_arity {
        let tuples = enumerate_words(q, d, |w, _| w.len() == d);
        for tuple in tuples {
            let Word::Path(gens) = &tuple else { continue };
            let mut total = Element::zero();
            for i in 1..=d {
                for j in 0..=(d - i) {
                    // inner slice: written positions [d-j-i, d-j)
                    let lo = d - j - i;
                    let hi = d - j;
                    let inner = a.op_on_gens(&gens[lo..hi]);
                    if inner.is_zero() {
                        continue;
                    }
                    // sign from the rightmost j written entries
                    let mut exp: i64 = -(j as i64);
                    for g in &gens[d - j..] {
                        exp += q.gen(*g).degree;
                    }
                    let negate = exp.rem_euclid(2) == 1;
                    for (w, c) in inner.terms() {
                        let mut entries: Vec<Word> = Vec::with_capacity(d - i + 1);
                        for g in &gens[..lo] {
                            entries.push(Word::Path(vec![*g]));
                        }
                        entries.push(w.clone());
                        for g in &gens[hi..] {
                            entries.push(Word::Path(vec![*g]));
                        }
                        let outer = a.op_on_tuple(&entries);
                        let mut coeff = c.clone();
                        if negate {
                            coeff = coeff.neg();
                        }
                        total = total.add(&outer.scale(&coeff));
                    }
                }
            }
            if !total.is_zero() {
                witnesses.push(RelationWitness {
                    tuple: gens.iter().map(|g| q.gen(*g).name.clone()).collect(),
                    residue: total,
                });
            }
        }
    }
    RelationReport { ok: witnesses.is_empty(), witnesses }
}

/// Evaluates the co-A-infinity relations on every generator up to the given
/// total arity.
pub fn check_coainf(c: &AInfCoalg, max_arity: usize) -> RelationReport {
    let q = c.quiver();
    let mut witnesses = Vec::new();
    for (g, _) in q.gens() {
        for d in 1..=max_arity {
            let mut total = Element::zero();
            for i in 1..=d {
                let outer_arity = (d - i + 1) as u8;
                let outer = c.delta(g, outer_arity);
                if outer.is_zero() {
                    continue;
                }
                for (w, coef) in outer.terms() {
                    let Word::Path(factors) = w else { continue };
                    for j in 0..=(d - i) {
                        // the factor at distance j from the right end
                        let pos = factors.len() - 1 - j;
                        let inner = c.delta(factors[pos], i as u8);
                        if inner.is_zero() {
                            continue;
                        }
                        let mut exp: i64 = -(j as i64);
                        for f in &factors[pos + 1..] {
                            exp += q.gen(*f).degree;
                        }
                        let negate = exp.rem_euclid(2) == 1;
                        for (z, cz) in inner.terms() {
                            let Word::Path(zg) = z else { continue };
                            let mut gens = factors[..pos].to_vec();
                            gens.extend_from_slice(zg);
                            gens.extend_from_slice(&factors[pos + 1..]);
                            let mut coeff = coef.mul(cz);
                            if negate {
                                coeff = coeff.neg();
                            }
                            total.add_term(Word::Path(gens), coeff);
                        }
                    }
                }
            }
            if !total.is_zero() {
                witnesses.push(RelationWitness {
                    tuple: vec![q.gen(g).name.clone(), alloc::format!("arity {}", d)],
                    residue: total,
                });
            }
        }
    }
    RelationReport { ok: witnesses.is_empty(), witnesses }
}

/// Dualizes a coalgebra into an algebra:
/// `m_i(a_i,…,a_1)(c) = (-1)^{|c|} (a_i ⊗ … ⊗ a_1) Δ_i(c)`, pairing `a_1`
/// with the first tensor factor. On basis duals this sends the coproduct
/// term `coef·(x_1 ⊗ … ⊗ x_i)` of `Δ_i(c)` to the table entry
/// `m_i(x_i^, …, x_1^) += (-1)^{|c|} coef · c^`. The `side` records which of
/// the two k-linear duals is meant; on basis tables both produce the same
/// structure constants.
pub fn dualize_coalgebra(c: &AInfCoalg, side: DualSide) -> AInfAlg {
    let q = c.quiver();
    let dual = dual_module(&c.module, side);
    let mut ops: BTreeMap<Vec<u32>, Element> = BTreeMap::new();
    for (g, table) in c.cops.iter() {
        let gdeg = q.gen(*g).degree;
        let sign = gdeg.rem_euclid(2) == 1;
        let dual_g = dual
            .quiver
            .gen_by_name(&crate::ground::dual_name(&q.gen(*g).name))
            .expect("dual generator");
        for (_arity, value) in table.iter() {
            for (w, coef) in value.terms() {
                let Word::Path(factors) = w else { continue };
                let key: Vec<u32> = factors
                    .iter()
                    .rev()
                    .map(|x| {
                        dual.quiver
                            .gen_by_name(&crate::ground::dual_name(&q.gen(*x).name))
                            .expect("dual generator")
                    })
                    .collect();
                let mut coeff = coef.clone();
                if sign {
                    coeff = coeff.neg();
                }
                ops.entry(key)
                    .or_insert_with(Element::zero)
                    .add_term(Word::Path(vec![dual_g]), coeff);
            }
        }
    }
    ops.retain(|_, v| !v.is_zero());
    AInfAlg {
        module: dual,
        ops,
        field: c.field,
        augmentation: None,
        name: alloc::format!("{}^dual", c.name),
    }
}

/// Dualizes a locally finite algebra into a coalgebra; inverse to
/// `dualize_coalgebra` on basis tables.
pub fn dualize_algebra(a: &AInfAlg, side: DualSide) -> AInfCoalg {
    let q = a.quiver();
    let dual = dual_module(&a.module, side);
    let mut cops: BTreeMap<u32, BTreeMap<u8, Element>> = BTreeMap::new();
    for (key, value) in a.ops.iter() {
        let arity = key.len() as u8;
        let dual_factors: Vec<u32> = key
            .iter()
            .rev()
            .map(|x| {
                dual.quiver
                    .gen_by_name(&crate::ground::dual_name(&q.gen(*x).name))
                    .expect("dual generator")
            })
            .collect();
        for (w, coef) in value.terms() {
            let Word::Path(gens) = w else { continue };
            let g = gens[0];
            let dual_g = dual
                .quiver
                .gen_by_name(&crate::ground::dual_name(&q.gen(g).name))
                .expect("dual generator");
            let gdeg = dual.quiver.gen(dual_g).degree;
            let mut coeff = coef.clone();
            if gdeg.rem_euclid(2) == 1 {
                coeff = coeff.neg();
            }
            cops.entry(dual_g)
                .or_insert_with(BTreeMap::new)
                .entry(arity)
                .or_insert_with(Element::zero)
                .add_term(Word::Path(dual_factors.clone()), coeff);
        }
    }
    for table in cops.values_mut() {
        table.retain(|_, v| !v.is_zero());
    }
    cops.retain(|_, t| !t.is_empty());
    AInfCoalg {
        module: dual,
        cops,
        field: a.field,
        name: alloc::format!("{}^dual", a.name),
    }
}

/// An augmentation, as its values on the degree-0 diagonal generators.
pub type AugMap = BTreeMap<u32, Scalar>;

/// All augmentations of a free DG-presentation over a finite field: maps
/// `ε` on degree-0 diagonal generators (all other generators forced to 0)
/// with `ε(dc) = 0` for every degree -1 generator. Over the rationals only
/// verification of a supplied candidate is available.
pub fn enumerate_augmentations(
    quiver: &Quiver,
    d: &Derivation,
    field: &FieldSpec,
) -> Result<Vec<AugMap>, StructureError> {
    let FieldSpec::PrimeField(p) = field else {
        return Err(StructureError::EnumerationOverRationals);
    };
    let unknowns: Vec<u32> = quiver
        .gens()
        .filter(|(_, g)| g.degree == 0 && g.src == g.dst)
        .map(|(i, _)| i)
        .collect();
    let mut out = Vec::new();
    let total: u128 = (*p as u128).pow(unknowns.len() as u32);
    for idx in 0..total {
        let mut assignment: AugMap = BTreeMap::new();
        let mut rest = idx;
        for g in unknowns.iter() {
            let v = (rest % *p as u128) as i64;
            rest /= *p as u128;
            let s = field.from_integer(v);
            if !s.is_zero() {
                assignment.insert(*g, s);
            }
        }
        if augmentation_holds(quiver, d, field, &assignment) {
            out.push(assignment);
        }
    }
    Ok(out)
}

/// Checks `ε ∘ d = 0` for the multiplicative extension of the given values.
pub fn augmentation_holds(
    quiver: &Quiver,
    d: &Derivation,
    field: &FieldSpec,
    values: &AugMap,
) -> bool {
    let eval_gen = |g: u32| -> Scalar {
        let gs = quiver.gen(g);
        if gs.degree != 0 || gs.src != gs.dst {
            return field.zero();
        }
        values.get(&g).cloned().unwrap_or(field.zero())
    };
    for (g, gs) in quiver.gens() {
        if gs.degree != -1 || gs.src != gs.dst {
            continue;
        }
        let Some(img) = d.image_of(g) else { continue };
        let mut total = field.zero();
        for (w, c) in img.terms() {
            let contribution = match w {
                Word::Idem(_) => c.clone(),
                Word::Path(gens) => {
                    let mut acc = c.clone();
                    for x in gens {
                        acc = acc.mul(&eval_gen(*x));
                        if acc.is_zero() {
                            break;
                        }
                    }
                    acc
                }
            };
            total = total.add(&contribution);
        }
        if !total.is_zero() {
            return false;
        }
    }
    true
}

/// What sign-repair operates on.
#[derive(Clone, Debug)]
pub enum RepairTarget {
    Alg(AInfAlg),
    Coalg(AInfCoalg),
    /// A free DG-presentation checked through `d∘d = 0` on generators.
    Differential { quiver: Arc<Quiver>, d: Derivation },
}

/// One flippable structure-constant entry, addressed positionally.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairEntry {
    pub key: String,
    pub word: String,
}

#[derive(Clone, Debug)]
pub struct RepairOutcome {
    /// `Some(entries)`: flipping exactly these signs makes the check pass
    /// over Q. `None`: the budget was exhausted.
    pub assignment: Option<Vec<RepairEntry>>,
    pub subsets_tried: usize,
    pub mod2_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepairError {
    FailsMod2(String),
    NotRational,
}

impl fmt::Display for RepairError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepairError::FailsMod2(w) => {
                write!(f, "structure fails already over GF(2): {}", w)
            }
            RepairError::NotRational => write!(f, "sign repair needs rational input"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for RepairError {}

impl RepairTarget {
    fn field(&self) -> FieldSpec {
        match self {
            RepairTarget::Alg(a) => a.field,
            RepairTarget::Coalg(c) => c.field,
            RepairTarget::Differential { d, .. } => d
                .images
                .values()
                .flat_map(|e| e.terms())
                .map(|(_, c)| c.field())
                .next()
                .unwrap_or(FieldSpec::Rationals),
        }
    }

    fn entries(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        match self {
            RepairTarget::Alg(a) => {
                let q = a.quiver();
                for (key, value) in a.ops.iter() {
                    let keyname = alloc::format!("m{}({})", key.len(), Word::Path(key.clone()).display(q));
                    for (w, _) in value.terms() {
                        out.push((keyname.clone(), alloc::format!("{}", w.display(q))));
                    }
                }
            }
            RepairTarget::Coalg(c) => {
                let q = c.quiver();
                for (g, table) in c.cops.iter() {
                    for (arity, value) in table.iter() {
                        let keyname = alloc::format!("delta{}({})", arity, q.gen(*g).name);
                        for (w, _) in value.terms() {
                            out.push((keyname.clone(), alloc::format!("{}", w.display(q))));
                        }
                    }
                }
            }
            RepairTarget::Differential { quiver, d } => {
                for (g, img) in d.images.iter() {
                    let keyname = alloc::format!("d({})", quiver.gen(*g).name);
                    for (w, _) in img.terms() {
                        out.push((keyname.clone(), alloc::format!("{}", w.display(quiver))));
                    }
                }
            }
        }
        out
    }

    fn with_flips(&self, flips: &[usize]) -> RepairTarget {
        let mut i = 0usize;
        let flip_set: alloc::collections::BTreeSet<usize> = flips.iter().copied().collect();
        match self {
            RepairTarget::Alg(a) => {
                let mut out = a.clone();
                for value in out.ops.values_mut() {
                    let mut replaced = Element::zero();
                    for (w, c) in value.terms() {
                        let c = if flip_set.contains(&i) { c.neg() } else { c.clone() };
                        replaced.add_term(w.clone(), c);
                        i += 1;
                    }
                    *value = replaced;
                }
                RepairTarget::Alg(out)
            }
            RepairTarget::Coalg(c) => {
                let mut out = c.clone();
                for table in out.cops.values_mut() {
                    for value in table.values_mut() {
                        let mut replaced = Element::zero();
                        for (w, s) in value.terms() {
                            let s = if flip_set.contains(&i) { s.neg() } else { s.clone() };
                            replaced.add_term(w.clone(), s);
                            i += 1;
                        }
                        *value = replaced;
                    }
                }
                RepairTarget::Coalg(out)
            }
            RepairTarget::Differential { quiver, d } => {
                let mut images = BTreeMap::new();
                for (g, img) in d.images.iter() {
                    let mut replaced = Element::zero();
                    for (w, c) in img.terms() {
                        let c = if flip_set.contains(&i) { c.neg() } else { c.clone() };
                        replaced.add_term(w.clone(), c);
                        i += 1;
                    }
                    images.insert(*g, replaced);
                }
                RepairTarget::Differential {
                    quiver: quiver.clone(),
                    d: Derivation::new(images, d.degree),
                }
            }
        }
    }

    fn passes(&self, max_arity: usize) -> bool {
        match self {
            RepairTarget::Alg(a) => check_ainf(a, max_arity).ok,
            RepairTarget::Coalg(c) => check_coainf(c, max_arity).ok,
            RepairTarget::Differential { quiver, d } => quiver.gens().all(|(g, _)| {
                let img = d.image_of(g).cloned().unwrap_or_default();
                d.apply(&img, quiver).is_zero()
            }),
        }
    }

    fn reduced_mod2(&self) -> Result<RepairTarget, StructureError> {
        let gf2 = FieldSpec::PrimeField(2);
        Ok(match self {
            RepairTarget::Alg(a) => RepairTarget::Alg(a.to_field(&gf2)?),
            RepairTarget::Coalg(c) => RepairTarget::Coalg(c.to_field(&gf2)?),
            RepairTarget::Differential { quiver, d } => {
                let mut images = BTreeMap::new();
                for (g, img) in d.images.iter() {
                    images.insert(*g, convert_element(img, &gf2)?);
                }
                RepairTarget::Differential {
                    quiver: quiver.clone(),
                    d: Derivation::new(images, d.degree),
                }
            }
        })
    }
}

/// Searches sign flips on stored structure constants (at most `budget` of
/// them) for an assignment that makes the checker pass over Q. The mod-2
/// check is re-confirmed first; a structure that fails mod 2 cannot be a
/// sign problem. Exhaustion is a valid outcome. The search order is
/// deterministic: subsets by size, then lexicographically.
pub fn sign_repair(
    target: &RepairTarget,
    max_arity: usize,
    budget: usize,
) -> Result<RepairOutcome, RepairError> {
    if target.field() != FieldSpec::Rationals {
        return Err(RepairError::NotRational);
    }
    let mod2 = target
        .reduced_mod2()
        .map_err(|e| RepairError::FailsMod2(alloc::format!("{}", e)))?;
    if !mod2.passes(max_arity) {
        return Err(RepairError::FailsMod2(String::from("relation residue nonzero mod 2")));
    }
    let entries = target.entries();
    let mut tried = 0usize;
    // size-0 subset: the input may already be consistent
    if target.passes(max_arity) {
        return Ok(RepairOutcome { assignment: Some(Vec::new()), subsets_tried: 1, mod2_ok: true });
    }
    tried += 1;
    let n = entries.len();
    let mut combo: Vec<usize> = Vec::new();
    for size in 1..=budget.min(n) {
        combo.clear();
        combo.extend(0..size);
        loop {
            tried += 1;
            let flipped = target.with_flips(&combo);
            if flipped.passes(max_arity) {
                let assignment = combo
                    .iter()
                    .map(|i| RepairEntry {
                        key: entries[*i].0.clone(),
                        word: entries[*i].1.clone(),
                    })
                    .collect();
                return Ok(RepairOutcome {
                    assignment: Some(assignment),
                    subsets_tried: tried,
                    mod2_ok: true,
                });
            }
            // next combination
            let mut i = size;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if combo[i] != i + n - size {
                    combo[i] += 1;
                    for j in i + 1..size {
                        combo[j] = combo[j - 1] + 1;
                    }
                    break;
                }
                if i == 0 {
                    combo.clear();
                    break;
                }
            }
            if combo.is_empty() {
                break;
            }
        }
    }
    Ok(RepairOutcome { assignment: None, subsets_tried: tried, mod2_ok: true })
}
