//! The semisimple ground ring `k = ⊕_v K e_v`, graded quiver generators,
//! module predicates, and the grading / moduli-dimension calculators.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

/// Sign decoration of a vertex (a component of the Legendrian).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decoration {
    Plus,
    Minus,
}

impl fmt::Display for Decoration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decoration::Plus => write!(f, "+"),
            Decoration::Minus => write!(f, "-"),
        }
    }
}

/// The ground ring: an ordered list of decorated vertices, one orthogonal
/// idempotent `e_v` per vertex. Orthogonality (`e_v e_w = 0` for `v != w`,
/// `e_v^2 = e_v`) is enforced by the path-multiplication rules in `ncalg`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundRing {
    vertices: Vec<(String, Decoration)>,
}

impl GroundRing {
    pub fn new(vertices: Vec<(String, Decoration)>) -> Result<Self, GroundError> {
        for (i, (name, _)) in vertices.iter().enumerate() {
            if vertices[..i].iter().any(|(n, _)| n == name) {
                return Err(GroundError::DuplicateVertex(name.clone()));
            }
        }
        Ok(GroundRing { vertices })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_name(&self, v: u32) -> &str {
        &self.vertices[v as usize].0
    }

    pub fn decoration(&self, v: u32) -> Decoration {
        self.vertices[v as usize].1
    }

    pub fn vertex_index(&self, name: &str) -> Option<u32> {
        self.vertices.iter().position(|(n, _)| n == name).map(|i| i as u32)
    }

    pub fn vertices(&self) -> impl Iterator<Item = (u32, &str, Decoration)> {
        self.vertices.iter().enumerate().map(|(i, (n, d))| (i as u32, n.as_str(), *d))
    }
}

/// A graded quiver generator: an arrow `src -> dst` with a (cohomological)
/// degree and an optional weight used only by truncation bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenSym {
    pub name: String,
    pub src: u32,
    pub dst: u32,
    pub degree: i64,
    pub weight: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroundError {
    DuplicateVertex(String),
    DuplicateGenerator(String),
    UnknownVertex(String),
    InfiniteDegreeSlot(i64),
}

impl fmt::Display for GroundError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundError::DuplicateVertex(v) => write!(f, "duplicate vertex id {}", v),
            GroundError::DuplicateGenerator(g) => write!(f, "duplicate generator name {}", g),
            GroundError::UnknownVertex(v) => write!(f, "unknown vertex {}", v),
            GroundError::InfiniteDegreeSlot(d) => {
                write!(f, "degree slot {} is not finite-dimensional", d)
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GroundError {}

/// A validated quiver: the ground ring plus its generator table. This is the
/// shared context that words, elements and derivations refer into.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    pub ring: GroundRing,
    gens: Vec<GenSym>,
    by_name: BTreeMap<String, u32>,
}

impl Quiver {
    pub fn new(ring: GroundRing, gens: Vec<GenSym>) -> Result<Self, GroundError> {
        let mut by_name = BTreeMap::new();
        for (i, g) in gens.iter().enumerate() {
            if g.src as usize >= ring.vertex_count() {
                return Err(GroundError::UnknownVertex(alloc::format!("#{}", g.src)));
            }
            if g.dst as usize >= ring.vertex_count() {
                return Err(GroundError::UnknownVertex(alloc::format!("#{}", g.dst)));
            }
            if by_name.insert(g.name.clone(), i as u32).is_some() {
                return Err(GroundError::DuplicateGenerator(g.name.clone()));
            }
        }
        Ok(Quiver { ring, gens, by_name })
    }

    pub fn gen_count(&self) -> usize {
        self.gens.len()
    }

    pub fn gen(&self, id: u32) -> &GenSym {
        &self.gens[id as usize]
    }

    pub fn gen_by_name(&self, name: &str) -> Option<u32> {
        self.by_name.get(name).copied()
    }

    pub fn gens(&self) -> impl Iterator<Item = (u32, &GenSym)> {
        self.gens.iter().enumerate().map(|(i, g)| (i as u32, g))
    }

    /// A copy of this quiver with every generator degree shifted by `s`.
    pub fn shifted(&self, s: i64) -> Quiver {
        let gens = self
            .gens
            .iter()
            .map(|g| GenSym { degree: g.degree + s, ..g.clone() })
            .collect();
        Quiver { ring: self.ring.clone(), gens, by_name: self.by_name.clone() }
    }
}

/// A graded `k`-bimodule presented by generators; `includes_idempotents`
/// records whether the degree-0 copy of `k` is part of the module (as in a
/// coaugmented coalgebra) or not (a plain generator span).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedModule {
    pub quiver: Arc<Quiver>,
    pub includes_idempotents: bool,
}

/// Builds and validates ground data from names.
pub fn build_ground(
    vertices: Vec<(String, Decoration)>,
    generators: Vec<(String, String, String, i64, Option<i64>)>,
) -> Result<(GroundRing, GradedModule), GroundError> {
    let ring = GroundRing::new(vertices)?;
    let mut gens = Vec::new();
    for (name, src, dst, degree, weight) in generators {
        let src = ring.vertex_index(&src).ok_or(GroundError::UnknownVertex(src))?;
        let dst = ring.vertex_index(&dst).ok_or(GroundError::UnknownVertex(dst))?;
        gens.push(GenSym { name, src, dst, degree, weight });
    }
    let quiver = Quiver::new(ring.clone(), gens)?;
    Ok((ring, GradedModule { quiver: Arc::new(quiver), includes_idempotents: true }))
}

/// Which of the two `k`-linear duals to take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualSide {
    Left,
    Right,
}

/// The graded dual of a generator span: degrees negate and endpoints
/// transpose. Locally finite by construction (finitely many generators), so
/// no degree slot can fail to dualize.
pub fn dual_module(m: &GradedModule, _side: DualSide) -> GradedModule {
    let gens = m
        .quiver
        .gens
        .iter()
        .map(|g| GenSym {
            name: dual_name(&g.name),
            src: g.dst,
            dst: g.src,
            degree: -g.degree,
            weight: g.weight,
        })
        .collect();
    let quiver = Quiver::new(m.quiver.ring.clone(), gens).expect("dual of a valid quiver");
    GradedModule { quiver: Arc::new(quiver), includes_idempotents: m.includes_idempotents }
}

/// `c` -> `cv`, `cv` -> `c`: double duals get their original names back.
pub fn dual_name(name: &str) -> String {
    match name.strip_suffix('v') {
        Some(base) if !base.is_empty() => String::from(base),
        _ => alloc::format!("{}v", name),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModulePredicates {
    pub connected: bool,
    pub simply_connected: bool,
    pub locally_finite: bool,
}

/// Connectivity and finiteness of the generator degree distribution.
///
/// `connected`: the degree-0 part is exactly `k` (no degree-0 generators) and
/// generator degrees lie all on one side of 0. `simply_connected`: connected
/// and the degree adjacent to 0 on the support side vanishes as well.
/// `locally_finite`: finitely many generators per degree, true by
/// construction here.
pub fn module_predicates(m: &GradedModule) -> ModulePredicates {
    let degrees: Vec<i64> = m.quiver.gens.iter().map(|g| g.degree).collect();
    let has_zero = degrees.iter().any(|d| *d == 0);
    let has_pos = degrees.iter().any(|d| *d > 0);
    let has_neg = degrees.iter().any(|d| *d < 0);
    let connected = !has_zero && !(has_pos && has_neg);
    let simply_connected = connected
        && if has_neg {
            !degrees.iter().any(|d| *d == -1)
        } else {
            !degrees.iter().any(|d| *d == 1)
        };
    ModulePredicates { connected, simply_connected, locally_finite: true }
}

/// Grading conversions and formal-dimension formulas for the moduli spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DimQuery {
    /// `|c| = -CZ(c)`.
    CzFromDegree(i64),
    DegreeFromCz(i64),
    /// `|c|_Leg = -|c| - 1`.
    LegFromDegree(i64),
    DegreeFromLeg(i64),
    /// Disks in the filling: `(n-3) - Σ_j (|a_j| - (n-2))`.
    DimFilling { n: i64, punctures: Vec<i64> },
    /// Disks in the symplectization: `(n-3) + Σ_{neg} (|c_j|+1) - Σ_{pos} (|c_j|-(n-2))`.
    DimSymplectization { n: i64, positive: Vec<i64>, negative: Vec<i64> },
    /// Disks with corners on the dual disks:
    /// `1 - Σ_r (|c_r|-(n-2)) + Σ_s (|c_{0;s}|+1)`.
    DimCocore { n: i64, chords: Vec<i64>, constant_chords: Vec<i64> },
    /// The filled cocore version:
    /// `1 - Σ_r (|c_r|-(n-2)) - Σ_s (|x_{0;s}|-(n-2))`.
    DimCocoreFilled { n: i64, chords: Vec<i64>, intersections: Vec<i64> },
}

/// Evaluates one grading conversion or dimension formula.
pub fn cz_and_dim(query: &DimQuery) -> i64 {
    match query {
        DimQuery::CzFromDegree(d) => -d,
        DimQuery::DegreeFromCz(cz) => -cz,
        DimQuery::LegFromDegree(d) => -d - 1,
        DimQuery::DegreeFromLeg(l) => -l - 1,
        DimQuery::DimFilling { n, punctures } => {
            (n - 3) - punctures.iter().map(|a| a - (n - 2)).sum::<i64>()
        }
        DimQuery::DimSymplectization { n, positive, negative } => {
            (n - 3) + negative.iter().map(|c| c + 1).sum::<i64>()
                - positive.iter().map(|c| c - (n - 2)).sum::<i64>()
        }
        DimQuery::DimCocore { n, chords, constant_chords } => {
            1 - chords.iter().map(|c| c - (n - 2)).sum::<i64>()
                + constant_chords.iter().map(|c| c + 1).sum::<i64>()
        }
        DimQuery::DimCocoreFilled { n, chords, intersections } => {
            1 - chords.iter().map(|c| c - (n - 2)).sum::<i64>()
                - intersections.iter().map(|x| x - (n - 2)).sum::<i64>()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn hopf_gens() -> Vec<(String, String, String, i64, Option<i64>)> {
        // LC_* gradings: chords one degree below the CE presentation.
        [
            ("c1", "1", "1", -2),
            ("c2", "2", "2", -2),
            ("c12", "1", "2", -1),
            ("c21", "2", "1", -1),
            ("s1", "1", "1", -1),
            ("t1", "1", "1", -1),
            ("k1", "1", "1", -2),
            ("l1", "1", "1", -2),
            ("u1", "1", "1", -3),
        ]
        .into_iter()
        .map(|(n, s, d, deg)| (n.to_string(), s.to_string(), d.to_string(), deg, None))
        .collect()
    }

    fn hopf_vertices() -> Vec<(String, Decoration)> {
        vec![("1".to_string(), Decoration::Plus), ("2".to_string(), Decoration::Minus)]
    }

    #[test]
    fn builds_hopf_ground_data() {
        let (ring, module) = build_ground(hopf_vertices(), hopf_gens()).unwrap();
        assert_eq!(ring.vertex_count(), 2);
        assert_eq!(module.quiver.gen_count(), 9);
        let u1 = module.quiver.gen(module.quiver.gen_by_name("u1").unwrap());
        assert_eq!(u1.degree, -3);
    }

    #[test]
    fn empty_generator_list_is_just_k() {
        let (_, module) = build_ground(hopf_vertices(), vec![]).unwrap();
        assert_eq!(module.quiver.gen_count(), 0);
        let p = module_predicates(&module);
        assert!(p.connected && p.simply_connected && p.locally_finite);
    }

    #[test]
    fn unknown_vertex_is_an_error() {
        let gens = vec![("c".to_string(), "3".to_string(), "1".to_string(), -2, None)];
        assert!(matches!(
            build_ground(hopf_vertices(), gens),
            Err(GroundError::UnknownVertex(_))
        ));
    }

    #[test]
    fn duplicate_names_are_errors() {
        let mut gens = hopf_gens();
        gens.push(gens[0].clone());
        assert!(matches!(
            build_ground(hopf_vertices(), gens),
            Err(GroundError::DuplicateGenerator(_))
        ));
        let verts =
            vec![("1".to_string(), Decoration::Plus), ("1".to_string(), Decoration::Minus)];
        assert!(matches!(build_ground(verts, vec![]), Err(GroundError::DuplicateVertex(_))));
    }

    #[test]
    fn dual_negates_degrees_and_transposes_endpoints() {
        let (_, module) = build_ground(hopf_vertices(), hopf_gens()).unwrap();
        let dual = dual_module(&module, DualSide::Left);
        let c12v = dual.quiver.gen(dual.quiver.gen_by_name("c12v").unwrap());
        assert_eq!(c12v.degree, 1);
        assert_eq!((c12v.src, c12v.dst), (1, 0));
        let u1v = dual.quiver.gen(dual.quiver.gen_by_name("u1v").unwrap());
        assert_eq!(u1v.degree, 3);
        // double dual restores generator data
        let double = dual_module(&dual, DualSide::Right);
        for (i, g) in module.quiver.gens() {
            let h = double.quiver.gen(i);
            assert_eq!((&g.name, g.src, g.dst, g.degree), (&h.name, h.src, h.dst, h.degree));
        }
    }

    #[test]
    fn dual_of_k_is_k() {
        let (_, module) = build_ground(hopf_vertices(), vec![]).unwrap();
        let dual = dual_module(&module, DualSide::Left);
        assert_eq!(dual.quiver.gen_count(), 0);
    }

    #[test]
    fn predicates_on_degree_distributions() {
        // all generators in degrees <= -2: simply connected
        let gens = vec![
            ("a".to_string(), "1".to_string(), "1".to_string(), -2, None),
            ("b".to_string(), "1".to_string(), "1".to_string(), -5, None),
        ];
        let (_, m) = build_ground(hopf_vertices(), gens).unwrap();
        let p = module_predicates(&m);
        assert!(p.connected && p.simply_connected);

        // Hopf LC has degree -1 generators: connected but not simply
        let (_, hopf) = build_ground(hopf_vertices(), hopf_gens()).unwrap();
        let p = module_predicates(&hopf);
        assert!(p.connected);
        assert!(!p.simply_connected);

        // a degree-0 generator breaks connectedness
        let gens = vec![
            ("x".to_string(), "1".to_string(), "1".to_string(), 0, None),
            ("y".to_string(), "1".to_string(), "1".to_string(), -1, None),
            ("z".to_string(), "1".to_string(), "1".to_string(), -2, None),
        ];
        let (_, m) = build_ground(hopf_vertices(), gens).unwrap();
        assert!(!module_predicates(&m).connected);
    }

    #[test]
    fn grading_conversions() {
        // the unknot chord: |c| = -2 gives |c|_Leg = 1
        assert_eq!(cz_and_dim(&DimQuery::LegFromDegree(-2)), 1);
        for d in -50..=50 {
            let cz = cz_and_dim(&DimQuery::CzFromDegree(d));
            assert_eq!(cz_and_dim(&DimQuery::DegreeFromCz(cz)), d);
            let leg = cz_and_dim(&DimQuery::LegFromDegree(d));
            assert_eq!(cz_and_dim(&DimQuery::DegreeFromLeg(leg)), d);
        }
    }

    #[test]
    fn dimension_formulas() {
        // symplectization, n = 3, one positive puncture of degree -3
        assert_eq!(
            cz_and_dim(&DimQuery::DimSymplectization {
                n: 3,
                positive: vec![-3],
                negative: vec![]
            }),
            4
        );
        // filling, n = 2, a single puncture of degree -2
        assert_eq!(cz_and_dim(&DimQuery::DimFilling { n: 2, punctures: vec![-2] }), 1);
    }
}
