//! Formal (free) cubical chains: the cubical boundary, the cross product,
//! Pontryagin composition of loop-valued components, and the Serre diagonal,
//! verified as combinatorial identities.
//!
//! No topological space is modeled. A cube is a tuple of formal components,
//! each a free symbol restricted along face maps; restrictions are stored as
//! coordinate assignments, so the cubical face identities hold by
//! construction. The normalized complex kills cubes with an unused free
//! coordinate.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// A declared formal cube symbol: a name and its dimension.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FormalCube {
    pub label: String,
    pub dim: usize,
}

/// One coordinate slot of a component: either the i-th free coordinate of
/// the ambient cube, or a fixed endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Coord {
    Free(usize),
    Fixed(u8),
}

/// One factor of a (product) cube: a restricted symbol, or a Pontryagin
/// composite of two components of the same space.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Component {
    Sym { cube: usize, assignment: Vec<Coord> },
    Composite(Box<Component>, Box<Component>),
}

impl Component {
    fn substitute(&self, free: usize, value: u8) -> Component {
        match self {
            Component::Sym { cube, assignment } => Component::Sym {
                cube: *cube,
                assignment: assignment
                    .iter()
                    .map(|c| match c {
                        Coord::Free(i) if *i == free => Coord::Fixed(value),
                        Coord::Free(i) if *i > free => Coord::Free(i - 1),
                        other => *other,
                    })
                    .collect(),
            },
            Component::Composite(a, b) => Component::Composite(
                Box::new(a.substitute(free, value)),
                Box::new(b.substitute(free, value)),
            ),
        }
    }

    fn shift_frees(&self, by: usize) -> Component {
        match self {
            Component::Sym { cube, assignment } => Component::Sym {
                cube: *cube,
                assignment: assignment
                    .iter()
                    .map(|c| match c {
                        Coord::Free(i) => Coord::Free(i + by),
                        other => *other,
                    })
                    .collect(),
            },
            Component::Composite(a, b) => Component::Composite(
                Box::new(a.shift_frees(by)),
                Box::new(b.shift_frees(by)),
            ),
        }
    }

    fn collect_frees(&self, out: &mut alloc::collections::BTreeSet<usize>) {
        match self {
            Component::Sym { assignment, .. } => {
                for c in assignment {
                    if let Coord::Free(i) = c {
                        out.insert(*i);
                    }
                }
            }
            Component::Composite(a, b) => {
                a.collect_frees(out);
                b.collect_frees(out);
            }
        }
    }
}

/// A formal cube of dimension `dim` mapping into a product of spaces, one
/// component per factor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cube {
    pub dim: usize,
    pub components: Vec<Component>,
}

impl Cube {
    /// A fresh symbol viewed as a single-component cube.
    pub fn symbol(id: usize, dim: usize) -> Cube {
        Cube {
            dim,
            components: vec![Component::Sym {
                cube: id,
                assignment: (0..dim).map(Coord::Free).collect(),
            }],
        }
    }

    /// A product cube `(σ, τ, …)` on shared coordinates: every symbol
    /// depends on all `dim` coordinates.
    pub fn shared(ids: &[usize], dim: usize) -> Cube {
        Cube {
            dim,
            components: ids
                .iter()
                .map(|id| Component::Sym {
                    cube: *id,
                    assignment: (0..dim).map(Coord::Free).collect(),
                })
                .collect(),
        }
    }

    /// The face `∂_i^ε` (1-based i), fixing the i-th free coordinate.
    pub fn face(&self, i: usize, value: u8) -> Cube {
        Cube {
            dim: self.dim - 1,
            components: self
                .components
                .iter()
                .map(|c| c.substitute(i - 1, value))
                .collect(),
        }
    }

    /// A cube is degenerate when some free coordinate is unused by every
    /// component; the normalized complex kills it.
    pub fn is_degenerate(&self) -> bool {
        let mut used = alloc::collections::BTreeSet::new();
        for c in self.components.iter() {
            c.collect_frees(&mut used);
        }
        (0..self.dim).any(|i| !used.contains(&i))
    }
}

/// A tensor product of cubes (one factor per tensor slot).
pub type TensorTerm = Vec<Cube>;

/// An integer chain of tensor terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Chain {
    terms: BTreeMap<TensorTerm, i64>,
}

impl Chain {
    pub fn zero() -> Chain {
        Chain::default()
    }

    pub fn of(cube: Cube) -> Chain {
        Chain::of_tensor(vec![cube], 1)
    }

    pub fn of_tensor(t: TensorTerm, coeff: i64) -> Chain {
        let mut c = Chain::zero();
        c.add_term(t, coeff);
        c
    }

    pub fn add_term(&mut self, t: TensorTerm, coeff: i64) {
        if coeff == 0 || t.iter().any(|c| c.is_degenerate()) {
            return;
        }
        let entry = self.terms.entry(t).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            let key = self
                .terms
                .iter()
                .find(|(_, v)| **v == 0)
                .map(|(k, _)| k.clone());
            if let Some(key) = key {
                self.terms.remove(&key);
            }
        }
    }

    pub fn add(&self, other: &Chain) -> Chain {
        let mut out = self.clone();
        for (t, c) in other.terms.iter() {
            out.add_term(t.clone(), *c);
        }
        out
    }

    pub fn negate(&self) -> Chain {
        Chain { terms: self.terms.iter().map(|(t, c)| (t.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Chain) -> Chain {
        self.add(&other.negate())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TensorTerm, &i64)> {
        self.terms.iter()
    }

    /// Applies a cube-level map to the tensor slot `slot` of each term,
    /// with the Koszul sign of a degree-`op_degree` operator crossing the
    /// slots to its left.
    fn map_slot<F>(&self, slot: usize, op_degree: i64, f: F) -> Chain
    where
        F: Fn(&Cube) -> Vec<(TensorTerm, i64)>,
    {
        let mut out = Chain::zero();
        for (t, coeff) in self.terms.iter() {
            if slot >= t.len() {
                continue;
            }
            let crossed: i64 = t[..slot].iter().map(|c| c.dim as i64).sum();
            let sign = if (crossed * op_degree).rem_euclid(2) == 1 { -1 } else { 1 };
            for (replacement, c2) in f(&t[slot]) {
                let mut nt = t[..slot].to_vec();
                nt.extend(replacement);
                nt.extend_from_slice(&t[slot + 1..]);
                out.add_term(nt, coeff * c2 * sign);
            }
        }
        out
    }
}

/// The cubical boundary `∂c = Σ_i (-1)^i (∂_i^1 - ∂_i^0) c`, extended to
/// tensors with the Koszul rule.
pub fn boundary(chain: &Chain) -> Chain {
    let mut out = Chain::zero();
    for (t, coeff) in chain.terms.iter() {
        for slot in 0..t.len() {
            let crossed: i64 = t[..slot].iter().map(|c| c.dim as i64).sum();
            let outer = if crossed.rem_euclid(2) == 1 { -1 } else { 1 };
            let cube = &t[slot];
            for i in 1..=cube.dim {
                let sign = if (i as i64).rem_euclid(2) == 1 { -1 } else { 1 };
                for (value, vsign) in [(1u8, 1i64), (0u8, -1)] {
                    let face = cube.face(i, value);
                    let mut nt = t[..slot].to_vec();
                    nt.push(face);
                    nt.extend_from_slice(&t[slot + 1..]);
                    out.add_term(nt, coeff * outer * sign * vsign);
                }
            }
        }
    }
    out
}

/// The cross product: formal product cube of dimension `dim a + dim b` with
/// the components of `b` shifted past those of `a`. Bilinear.
pub fn cross(a: &Chain, b: &Chain) -> Chain {
    let mut out = Chain::zero();
    for (ta, ca) in a.terms.iter() {
        for (tb, cb) in b.terms.iter() {
            // cross of single-slot tensors only: both sides must be plain
            // cubes, not tensors
            if ta.len() != 1 || tb.len() != 1 {
                continue;
            }
            let (x, y) = (&ta[0], &tb[0]);
            let mut components = x.components.clone();
            components.extend(y.components.iter().map(|c| c.shift_frees(x.dim)));
            out.add_term(
                vec![Cube { dim: x.dim + y.dim, components }],
                ca * cb,
            );
        }
    }
    out
}

/// Pontryagin composition of adjacent components `at` and `at+1` (mapping to
/// the same loop space) of each single-cube term.
pub fn compose_components(chain: &Chain, at: usize) -> Chain {
    let mut out = Chain::zero();
    for (t, coeff) in chain.terms.iter() {
        if t.len() != 1 {
            continue;
        }
        let cube = &t[0];
        let mut components = cube.components[..at].to_vec();
        components.push(Component::Composite(
            Box::new(cube.components[at].clone()),
            Box::new(cube.components[at + 1].clone()),
        ));
        components.extend_from_slice(&cube.components[at + 2..]);
        out.add_term(vec![Cube { dim: cube.dim, components }], *coeff);
    }
    out
}

/// Composition in a tensor slot (for the reshuffled composition chain).
pub fn compose_in_slot(chain: &Chain, slot: usize, at: usize) -> Chain {
    chain.map_slot(slot, 0, |cube| {
        let mut components = cube.components[..at].to_vec();
        components.push(Component::Composite(
            Box::new(cube.components[at].clone()),
            Box::new(cube.components[at + 1].clone()),
        ));
        components.extend_from_slice(&cube.components[at + 2..]);
        vec![(vec![Cube { dim: cube.dim, components }], 1)]
    })
}

/// The sign of the shuffle permutation `(J, J')` of `{1..n}`.
fn shuffle_sign(j: &[usize], jprime: &[usize]) -> i64 {
    // inversions between the two sorted blocks
    let mut inv = 0usize;
    for a in j.iter() {
        for b in jprime.iter() {
            if b < a {
                inv += 1;
            }
        }
    }
    if inv % 2 == 1 {
        -1
    } else {
        1
    }
}

/// The Serre diagonal, splitting the first `k` components from the rest:
/// `η(σ,τ) = Σ_J (-1)^{J J'} (σ∘ι_J^0) ⊗ (τ∘ι_{J'}^1)`, where coordinates
/// outside `J` are fixed to 0 on the left factor and coordinates outside
/// `J'` to 1 on the right. Degenerate factors die in the normalized complex.
pub fn serre_diagonal_split(chain: &Chain, k: usize) -> Chain {
    let mut out = Chain::zero();
    for (t, coeff) in chain.terms.iter() {
        if t.len() != 1 {
            continue;
        }
        let cube = &t[0];
        let n = cube.dim;
        for mask in 0..(1u32 << n) {
            let j: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let jprime: Vec<usize> = (0..n).filter(|i| mask & (1 << i) == 0).collect();
            let sign = shuffle_sign(&j, &jprime);
            // left: restrict to J (others fixed 0), components 0..k
            let left = restrict(cube, &cube.components[..k], &j, 0);
            // right: restrict to J' (others fixed 1), components k..
            let right = restrict(cube, &cube.components[k..], &jprime, 1);
            out.add_term(vec![left, right], coeff * sign);
        }
    }
    out
}

/// Serre diagonal splitting off the first component.
pub fn serre_diagonal(chain: &Chain) -> Chain {
    serre_diagonal_split(chain, 1)
}

fn restrict(cube: &Cube, components: &[Component], keep: &[usize], fix_to: u8) -> Cube {
    let mut comps = components.to_vec();
    // fix the complement, from the highest index down so renumbering is
    // stable, then the kept coordinates renumber to 0..keep.len()
    for i in (0..cube.dim).rev() {
        if !keep.contains(&i) {
            comps = comps.iter().map(|c| c.substitute(i, fix_to)).collect();
        }
    }
    Cube { dim: keep.len(), components: comps }
}

/// Applies the Serre diagonal to a tensor slot (for associativity checks).
pub fn serre_in_slot(chain: &Chain, slot: usize, k: usize) -> Chain {
    chain.map_slot(slot, 0, |cube| {
        let single = Chain::of(cube.clone());
        serre_diagonal_split(&single, k)
            .terms
            .into_iter()
            .collect::<Vec<_>>()
            .into_iter()
            .map(|(t, c)| (t, c))
            .collect()
    })
}

/// Renders a transcript of the identities the module verifies, for the CLI
/// demo command.
pub fn demo_transcript() -> (bool, String) {
    use core::fmt::Write;
    let mut out = String::new();
    let mut all_ok = true;
    let mut record = |name: &str, ok: bool, out: &mut String| {
        let _ = writeln!(out, "{}: {}", name, if ok { "ok" } else { "FAILED" });
    };

    // boundary squares to zero on a formal 3-cube and on products
    let c3 = Chain::of(Cube::symbol(0, 3));
    let ok = boundary(&boundary(&c3)).is_zero();
    all_ok &= ok;
    record("del del = 0 on a formal 3-cube", ok, &mut out);
    let pair = Chain::of(Cube::shared(&[0, 1], 3));
    let ok = boundary(&boundary(&pair)).is_zero();
    all_ok &= ok;
    record("del del = 0 on a formal product 3-cube", ok, &mut out);

    // Leibniz for the cross product, dims <= 2
    let mut ok = true;
    for p in 0..=2usize {
        for q in 0..=2usize {
            let a = Chain::of(Cube::symbol(0, p));
            let b = Chain::of(Cube::symbol(1, q));
            let lhs = boundary(&cross(&a, &b));
            let sign = if p % 2 == 1 { -1 } else { 1 };
            let mut rhs = cross(&boundary(&a), &b);
            let axdb = cross(&a, &boundary(&b));
            for (t, c) in axdb.terms() {
                rhs.add_term(t.clone(), c * sign);
            }
            ok &= lhs == rhs;
        }
    }
    all_ok &= ok;
    record("del(a x b) = del(a) x b + (-1)^dim a x del(b), dims <= 2", ok, &mut out);

    // Serre diagonal: chain map and associativity on dims <= 3
    let mut chain_ok = true;
    let mut assoc_ok = true;
    for n in 0..=3usize {
        let pair = Chain::of(Cube::shared(&[0, 1], n));
        let lhs = boundary(&serre_diagonal(&pair));
        let rhs = serre_diagonal(&boundary(&pair));
        chain_ok &= lhs == rhs;

        let triple = Chain::of(Cube::shared(&[0, 1, 2], n));
        let left = serre_in_slot(&serre_diagonal_split(&triple, 2), 0, 1);
        let right = serre_in_slot(&serre_diagonal_split(&triple, 1), 1, 1);
        assoc_ok &= left == right;
    }
    all_ok &= chain_ok && assoc_ok;
    record("del ∘ eta = eta ∘ del on product cubes of dim <= 3", chain_ok, &mut out);
    record("(eta ⊗ id) ∘ eta = (id ⊗ eta) ∘ eta on triples of dim <= 3", assoc_ok, &mut out);

    // compatibility with the cross product: the two composition chains of
    // the loop-space product comparison agree on a test pair
    let ok = compositions_agree(1, 1);
    all_ok &= ok;
    record("eta is compatible with x and Pontryagin composition", ok, &mut out);

    (all_ok, out)
}

/// The two composition chains around `eta` and the Pontryagin product: maps
/// `C(Ωu × Ωv) ⊗ C(Ωv × Ωw) -> C(Ωu) ⊗ C(Ωv) ⊗ C(Ωw)` built either by
/// crossing first and splitting after, or splitting first and composing in
/// the middle. Returns whether they agree on a formal test pair of the
/// given dimensions.
pub fn compositions_agree(p: usize, q: usize) -> bool {
    // test pair: (σ,τ): I^p -> Ωu × Ωv and (τ',ρ): I^q -> Ωv × Ωw
    let st = Cube::shared(&[0, 1], p);
    let tr = Cube::shared(&[2, 3], q);

    // chain 1: × then compose the two middle components, then split twice
    let crossed = cross(&Chain::of(st.clone()), &Chain::of(tr.clone()));
    let composed = compose_components(&crossed, 1);
    let first_split = serre_diagonal_split(&composed, 1);
    let chain1 = serre_in_slot(&first_split, 1, 1);

    // chain 2: η ⊗ η, then × the two middle tensor factors, then compose
    let left = serre_diagonal(&Chain::of(st));
    let right = serre_diagonal(&Chain::of(tr));
    // tensor the two 2-tensors into a 4-tensor with Koszul-free juxtaposition
    let mut four = Chain::zero();
    for (tl, cl) in left.terms() {
        for (tr2, cr) in right.terms() {
            let mut t = tl.clone();
            t.extend(tr2.iter().cloned());
            four.add_term(t, cl * cr);
        }
    }
    // × of tensor slots 1 and 2: merge the two cubes into one product cube
    let mut merged = Chain::zero();
    for (t, c) in four.terms() {
        let (a, b) = (&t[1], &t[2]);
        let mut components = a.components.clone();
        components.extend(b.components.iter().map(|x| x.shift_frees(a.dim)));
        let prod = Cube { dim: a.dim + b.dim, components };
        // Koszul sign: the × operator has degree 0, no sign
        merged.add_term(vec![t[0].clone(), prod, t[3].clone()], *c);
    }
    let chain2 = compose_in_slot(&merged, 1, 0);

    chain1 == chain2
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Sym { cube, assignment } => {
                write!(f, "s{}(", cube)?;
                for (i, c) in assignment.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    match c {
                        Coord::Free(x) => write!(f, "x{}", x)?,
                        Coord::Fixed(v) => write!(f, "{}", v)?,
                    }
                }
                write!(f, ")")
            }
            Component::Composite(a, b) => write!(f, "{}·{}", a, b),
        }
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, ")[dim {}]", self.dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_cube_boundary_is_the_two_vertices() {
        // ∂σ = σ(1) - σ(0) from the i = 1 term of the formula
        let c = Chain::of(Cube::symbol(0, 1));
        let b = boundary(&c);
        assert_eq!(b.term_count(), 2);
        let mut signs = alloc::vec::Vec::new();
        for (t, c) in b.terms() {
            assert_eq!(t[0].dim, 0);
            signs.push(*c);
        }
        signs.sort();
        assert_eq!(signs, alloc::vec![-1, 1]);
        // 0-cubes are cycles
        let z = Chain::of(Cube::symbol(0, 0));
        assert!(boundary(&z).is_zero());
    }

    #[test]
    fn boundary_squares_to_zero_up_to_dim_three() {
        for n in 0..=3usize {
            let c = Chain::of(Cube::symbol(0, n));
            assert!(boundary(&boundary(&c)).is_zero(), "dim {}", n);
            let p = Chain::of(Cube::shared(&[0, 1], n));
            assert!(boundary(&boundary(&p)).is_zero(), "product dim {}", n);
        }
    }

    #[test]
    fn cross_is_bilinear_and_leibniz() {
        let a = Chain::of(Cube::symbol(0, 2));
        let b = Chain::of(Cube::symbol(1, 1));
        let ab = cross(&a, &b);
        for (t, _) in ab.terms() {
            assert_eq!(t[0].dim, 3);
            assert_eq!(t[0].components.len(), 2);
        }
        assert!(cross(&a, &Chain::zero()).is_zero());
        for p in 0..=2usize {
            for q in 0..=2usize {
                let a = Chain::of(Cube::symbol(0, p));
                let b = Chain::of(Cube::symbol(1, q));
                let lhs = boundary(&cross(&a, &b));
                let sign = if p % 2 == 1 { -1 } else { 1 };
                let mut rhs = cross(&boundary(&a), &b);
                for (t, c) in cross(&a, &boundary(&b)).terms() {
                    rhs.add_term(t.clone(), c * sign);
                }
                assert_eq!(lhs, rhs, "dims {} {}", p, q);
            }
        }
    }

    #[test]
    fn serre_diagonal_in_low_dimensions() {
        // n = 0: only J = ∅, η(σ,τ) = σ ⊗ τ
        let pair = Chain::of(Cube::shared(&[0, 1], 0));
        let eta = serre_diagonal(&pair);
        assert_eq!(eta.term_count(), 1);
        // n = 1: two subsets of {1}
        let pair = Chain::of(Cube::shared(&[0, 1], 1));
        let eta = serre_diagonal(&pair);
        assert_eq!(eta.term_count(), 2);
        for (t, c) in eta.terms() {
            assert_eq!(*c, 1);
            assert_eq!(t[0].dim + t[1].dim, 1);
        }
    }

    #[test]
    fn serre_diagonal_is_a_chain_map() {
        for n in 0..=3usize {
            let pair = Chain::of(Cube::shared(&[0, 1], n));
            let lhs = boundary(&serre_diagonal(&pair));
            let rhs = serre_diagonal(&boundary(&pair));
            assert_eq!(lhs, rhs, "dim {}", n);
        }
    }

    #[test]
    fn serre_diagonal_is_strictly_associative() {
        for n in 0..=3usize {
            let triple = Chain::of(Cube::shared(&[0, 1, 2], n));
            let left = serre_in_slot(&serre_diagonal_split(&triple, 2), 0, 1);
            let right = serre_in_slot(&serre_diagonal_split(&triple, 1), 1, 1);
            assert_eq!(left, right, "dim {}", n);
        }
    }

    #[test]
    fn eta_of_a_cross_is_the_tensor_after_normalization() {
        // η(σ × τ) = σ ⊗ τ: all other subsets produce degenerate factors
        for p in 0..=2usize {
            for q in 0..=2usize {
                let s = Chain::of(Cube::symbol(0, p));
                let t = Chain::of(Cube::symbol(1, q));
                // a cross of single-component cubes into X × Y
                let st = cross(&s, &t);
                let eta = serre_diagonal(&st);
                assert_eq!(eta.term_count(), 1, "dims {} {}", p, q);
                let ((term, coeff),) = {
                    let mut it = eta.terms();
                    (it.next().unwrap(),)
                };
                assert_eq!(*coeff, 1);
                assert_eq!(term[0].dim, p);
                assert_eq!(term[1].dim, q);
            }
        }
    }

    #[test]
    fn composition_chains_agree() {
        for p in 0..=2usize {
            for q in 0..=1usize {
                assert!(compositions_agree(p, q), "dims {} {}", p, q);
            }
        }
    }

    #[test]
    fn transcript_reports_all_green() {
        let (ok, text) = demo_transcript();
        assert!(ok, "{}", text);
        assert!(text.contains("ok"));
    }
}
