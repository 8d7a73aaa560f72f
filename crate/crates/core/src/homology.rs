//! Windowed graded chain complexes over an exact field: basis assembly,
//! Betti numbers, d-squared diagnostics, and quasi-isomorphism verdicts.
//!
//! Windows are honest truncations. A degree is *certified* only when the
//! enumeration at it and its neighbours is provably complete and no
//! differential image was clipped by the window; ranks at uncertified
//! degrees are reported but flagged. Assemblers pad one degree below the
//! requested window so that incoming boundaries at the bottom edge are known.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::scalars::{rank, solve_linear, FieldSpec, Scalar, SparseMatrix};

/// A truncated graded chain complex with deterministic basis order.
/// The differential raises degree by 1.
#[derive(Clone, Debug)]
pub struct ChainWindow {
    /// Reported degree range.
    pub d_min: i64,
    pub d_max: i64,
    /// Lowest degree actually enumerated (one below `d_min` when padded).
    pub pad_min: i64,
    pub max_len: usize,
    pub field: FieldSpec,
    pub provenance: String,
    basis: BTreeMap<i64, Vec<String>>,
    index: BTreeMap<i64, BTreeMap<String, usize>>,
    /// `diff[k]`: matrix of `d` from degree `k` to `k+1`
    /// (rows = dim at `k+1`, cols = dim at `k`).
    diff: BTreeMap<i64, SparseMatrix>,
    complete: BTreeMap<i64, bool>,
    clipped: BTreeMap<i64, bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WindowError {
    EmptyWindow,
    DSquaredNonzero { degree: i64, monomial: String },
    NotAChainMap { degree: i64, detail: String },
    DegreeOutOfWindow(i64),
}

impl fmt::Display for WindowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowError::EmptyWindow => write!(f, "empty degree window"),
            WindowError::DSquaredNonzero { degree, monomial } => {
                write!(f, "d^2 != 0 at degree {} on {}", degree, monomial)
            }
            WindowError::NotAChainMap { degree, detail } => {
                write!(f, "not a chain map at degree {}: {}", degree, detail)
            }
            WindowError::DegreeOutOfWindow(k) => write!(f, "degree {} outside window", k),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for WindowError {}

impl ChainWindow {
    /// Assembles a window from a basis and a differential closure.
    ///
    /// `basis[k]` lists labels in their deterministic order for every degree
    /// in `[d_min - 1, d_max]` (missing degrees are empty). `complete[k]`
    /// says the enumeration at `k` provably contains *every* basis word of the
    /// source complex in that degree. `d_of(k, label)` returns the
    /// differential of that basis element as (label-at-degree-k+1, coeff)
    /// pairs; images that do not resolve to an enumerated label clip the
    /// window and are recorded, not dropped silently into the ranks.
    pub fn assemble<F>(
        d_min: i64,
        d_max: i64,
        max_len: usize,
        field: FieldSpec,
        provenance: String,
        basis: BTreeMap<i64, Vec<String>>,
        complete: BTreeMap<i64, bool>,
        mut d_of: F,
    ) -> Result<ChainWindow, WindowError>
    where
        F: FnMut(i64, &str) -> Vec<(String, Scalar)>,
    {
        if d_min > d_max {
            return Err(WindowError::EmptyWindow);
        }
        let pad_min = d_min - 1;
        let mut index: BTreeMap<i64, BTreeMap<String, usize>> = BTreeMap::new();
        for (k, labels) in basis.iter() {
            let mut m = BTreeMap::new();
            for (i, l) in labels.iter().enumerate() {
                m.insert(l.clone(), i);
            }
            index.insert(*k, m);
        }
        let empty: Vec<String> = Vec::new();
        let mut diff = BTreeMap::new();
        let mut clipped: BTreeMap<i64, bool> = BTreeMap::new();
        for k in pad_min..=d_max {
            let src = basis.get(&k).unwrap_or(&empty);
            let n_dst = basis.get(&(k + 1)).map(|v| v.len()).unwrap_or(0);
            let mut m = SparseMatrix::new(n_dst, src.len());
            let mut clip = false;
            for (col, label) in src.iter().enumerate() {
                for (target, coeff) in d_of(k, label) {
                    if coeff.is_zero() {
                        continue;
                    }
                    match index.get(&(k + 1)).and_then(|ix| ix.get(&target)) {
                        Some(row) => m.add_entry(*row, col, coeff),
                        None => clip = true,
                    }
                }
            }
            clipped.insert(k, clip);
            diff.insert(k, m);
        }
        Ok(ChainWindow {
            d_min,
            d_max,
            pad_min,
            max_len,
            field,
            provenance,
            basis,
            index,
            diff,
            complete,
            clipped,
        })
    }

    pub fn dim(&self, k: i64) -> usize {
        self.basis.get(&k).map(|v| v.len()).unwrap_or(0)
    }

    pub fn basis_at(&self, k: i64) -> &[String] {
        self.basis.get(&k).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn basis_index(&self, k: i64, label: &str) -> Option<usize> {
        self.index.get(&k).and_then(|ix| ix.get(label)).copied()
    }

    pub fn differential(&self, k: i64) -> Option<&SparseMatrix> {
        self.diff.get(&k)
    }

    pub fn is_complete(&self, k: i64) -> bool {
        self.complete.get(&k).copied().unwrap_or(false)
    }

    pub fn is_clipped(&self, k: i64) -> bool {
        self.clipped.get(&k).copied().unwrap_or(false)
    }

    /// Exact homology rank at every reported degree, via rank-nullity on the
    /// sparse differentials. Fails when `d^2 != 0` within the window.
    pub fn betti(&self) -> Result<BTreeMap<i64, usize>, WindowError> {
        if let Some(fail) = self.d_squared_failures().first() {
            return Err(WindowError::DSquaredNonzero {
                degree: fail.degree,
                monomial: fail.monomial.clone(),
            });
        }
        let mut out = BTreeMap::new();
        for k in self.d_min..=self.d_max {
            out.insert(k, self.betti_at(k));
        }
        Ok(out)
    }

    fn rank_at(&self, k: i64) -> usize {
        self.diff.get(&k).map(|m| rank(m, &self.field)).unwrap_or(0)
    }

    fn betti_at(&self, k: i64) -> usize {
        let dim = self.dim(k);
        let out_rank = self.rank_at(k);
        let in_rank = self.rank_at(k - 1);
        dim - out_rank - in_rank
    }

    /// A degree is certified when its rank computation cannot be disturbed by
    /// anything outside the window: the enumerations at `k-1`, `k`, `k+1` are
    /// complete and no image from `k-1` or `k` was clipped.
    pub fn certified(&self, k: i64) -> bool {
        self.is_complete(k - 1)
            && self.is_complete(k)
            && self.is_complete(k + 1)
            && !self.is_clipped(k - 1)
            && !self.is_clipped(k)
            && k - 1 >= self.pad_min
    }

    /// Evaluates `d∘d` on every basis word; nonzero images are the sign-audit
    /// primitive. Degrees whose differential was clipped by the window are
    /// skipped: a truncated image says nothing about the square.
    pub fn d_squared_failures(&self) -> Vec<DSquaredFailure> {
        let mut out = Vec::new();
        for k in self.pad_min..=self.d_max {
            if self.is_clipped(k) || self.is_clipped(k + 1) {
                continue;
            }
            let (Some(d0), Some(d1)) = (self.diff.get(&k), self.diff.get(&(k + 1))) else {
                continue;
            };
            if d0.rows != d1.cols {
                continue;
            }
            let dd = d1.compose(d0).expect("dimensions checked");
            if dd.is_zero() {
                continue;
            }
            for ((row, col), v) in dd.entries() {
                out.push(DSquaredFailure {
                    degree: k,
                    monomial: self.basis_at(k)[*col].clone(),
                    image: self.basis_at(k + 2)[*row].clone(),
                    coeff: v.clone(),
                });
            }
        }
        out
    }

    /// Basis vectors spanning the cycles at degree `k`.
    pub fn cycle_basis(&self, k: i64) -> Vec<Vec<Scalar>> {
        match self.diff.get(&k) {
            None => {
                // no outgoing differential enumerated: everything is a cycle
                let n = self.dim(k);
                (0..n)
                    .map(|i| {
                        let mut v = vec![self.field.zero(); n];
                        v[i] = self.field.one();
                        v
                    })
                    .collect()
            }
            Some(m) => solve_linear(m, None, &self.field)
                .expect("well-formed matrix")
                .kernel_basis,
        }
    }

    /// A nonzero homology class representative at degree `k`, when one
    /// exists: a cycle that is provably not a boundary within the window.
    pub fn homology_witness(&self, k: i64) -> Option<Vec<(String, Scalar)>> {
        let cycles = self.cycle_basis(k);
        let boundary = self.diff.get(&(k - 1));
        for z in cycles {
            let in_image = match boundary {
                None => false,
                Some(b) => solve_linear(b, Some(&z), &self.field)
                    .map(|o| o.solution.is_some())
                    .unwrap_or(false),
            };
            if !in_image {
                let labels = self.basis_at(k);
                return Some(
                    z.iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(i, c)| (labels[i].clone(), c.clone()))
                        .collect(),
                );
            }
        }
        None
    }

    /// `Σ (-1)^k dim_k = Σ (-1)^k betti_k` whenever the window is closed
    /// under `d` (no clipping, complete everywhere); `None` otherwise.
    pub fn euler_identity_holds(&self) -> Option<bool> {
        for k in self.pad_min..=self.d_max {
            if self.is_clipped(k) || !self.is_complete(k) {
                return None;
            }
        }
        let betti = self.betti().ok()?;
        let mut chi_dim: i64 = 0;
        let mut chi_b: i64 = 0;
        for k in self.d_min..=self.d_max {
            let sign = if k.rem_euclid(2) == 0 { 1 } else { -1 };
            chi_dim += sign * self.dim(k) as i64;
            chi_b += sign * betti[&k] as i64;
        }
        Some(chi_dim == chi_b)
    }
}

#[derive(Clone, Debug)]
pub struct DSquaredFailure {
    pub degree: i64,
    pub monomial: String,
    pub image: String,
    pub coeff: Scalar,
}

/// A degreewise linear map between two windows, `f[k]: src_k -> dst_k`.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub matrices: BTreeMap<i64, SparseMatrix>,
}

impl ChainMap {
    /// Builds the map from a closure giving the image of each source basis
    /// label as (dst label, coeff) pairs. Images outside the destination
    /// basis are an error.
    pub fn from_images<F>(
        src: &ChainWindow,
        dst: &ChainWindow,
        mut image_of: F,
    ) -> Result<ChainMap, WindowError>
    where
        F: FnMut(i64, &str) -> Vec<(String, Scalar)>,
    {
        let mut matrices = BTreeMap::new();
        for k in src.pad_min..=src.d_max {
            let mut m = SparseMatrix::new(dst.dim(k), src.dim(k));
            for (col, label) in src.basis_at(k).iter().enumerate() {
                for (target, coeff) in image_of(k, label) {
                    if coeff.is_zero() {
                        continue;
                    }
                    let row =
                        dst.basis_index(k, &target).ok_or(WindowError::NotAChainMap {
                            degree: k,
                            detail: alloc::format!("image term {} not in target window", target),
                        })?;
                    m.add_entry(row, col, coeff);
                }
            }
            matrices.insert(k, m);
        }
        Ok(ChainMap { matrices })
    }
}

#[derive(Clone, Debug)]
pub struct DegreeRanks {
    pub src_homology: usize,
    pub dst_homology: usize,
    pub induced_rank: usize,
    pub iso: bool,
    pub certified: bool,
}

#[derive(Clone, Debug)]
pub struct QuasiIsoReport {
    /// Isomorphism on every certified degree of the reported window.
    pub verdict: bool,
    pub rank_table: BTreeMap<i64, DegreeRanks>,
}

/// Checks that `f` commutes with the differentials on the window, then
/// computes the induced map on windowed homology degree by degree.
pub fn quasi_iso(
    f: &ChainMap,
    src: &ChainWindow,
    dst: &ChainWindow,
) -> Result<QuasiIsoReport, WindowError> {
    // chain-map check first
    for k in src.pad_min..src.d_max {
        let (Some(fk), Some(fk1)) = (f.matrices.get(&k), f.matrices.get(&(k + 1))) else {
            continue;
        };
        let (Some(ds), Some(dd)) = (src.differential(k), dst.differential(k)) else { continue };
        let left = dd.compose(fk).map_err(|_| WindowError::NotAChainMap {
            degree: k,
            detail: String::from("dimension mismatch"),
        })?;
        let right = fk1.compose(ds).map_err(|_| WindowError::NotAChainMap {
            degree: k,
            detail: String::from("dimension mismatch"),
        })?;
        if left != right {
            // name one witness basis element
            let mut witness = String::from("?");
            'outer: for col in 0..src.dim(k) {
                for row in 0..dst.dim(k + 1) {
                    if left.get(row, col) != right.get(row, col) {
                        witness = src.basis_at(k)[col].clone();
                        break 'outer;
                    }
                }
            }
            return Err(WindowError::NotAChainMap {
                degree: k,
                detail: alloc::format!("d∘f != f∘d on {}", witness),
            });
        }
    }

    let field = src.field;
    let mut rank_table = BTreeMap::new();
    let lo = src.d_min.max(dst.d_min);
    let hi = src.d_max.min(dst.d_max);
    let mut verdict = true;
    for k in lo..=hi {
        let src_h = {
            let dim = src.dim(k);
            dim - src.differential(k).map(|m| rank(m, &field)).unwrap_or(0)
                - src.differential(k - 1).map(|m| rank(m, &field)).unwrap_or(0)
        };
        let dst_h = {
            let dim = dst.dim(k);
            dim - dst.differential(k).map(|m| rank(m, &field)).unwrap_or(0)
                - dst.differential(k - 1).map(|m| rank(m, &field)).unwrap_or(0)
        };
        // induced rank: rank([B_dst | f(Z_src)]) - rank(B_dst)
        let cycles = src.cycle_basis(k);
        let fk = f.matrices.get(&k);
        let mut mapped: Vec<Vec<Scalar>> = Vec::new();
        for z in cycles.iter() {
            let img = match fk {
                Some(m) => m.apply(z, &field).expect("chain map dimensions"),
                None => vec![field.zero(); dst.dim(k)],
            };
            mapped.push(img);
        }
        let boundary_cols: Vec<Vec<Scalar>> = match dst.differential(k - 1) {
            None => Vec::new(),
            Some(b) => (0..b.cols)
                .map(|j| {
                    let mut e = vec![field.zero(); b.cols];
                    e[j] = field.one();
                    b.apply(&e, &field).expect("dims")
                })
                .collect(),
        };
        let rows = dst.dim(k);
        let pack = |cols: &[Vec<Scalar>]| -> SparseMatrix {
            let mut m = SparseMatrix::new(rows, cols.len());
            for (j, col) in cols.iter().enumerate() {
                for (i, v) in col.iter().enumerate() {
                    if !v.is_zero() {
                        m.add_entry(i, j, v.clone());
                    }
                }
            }
            m
        };
        let rank_b = rank(&pack(&boundary_cols), &field);
        let mut all = boundary_cols.clone();
        all.extend(mapped);
        let induced = rank(&pack(&all), &field) - rank_b;
        let certified = src.certified(k) && dst.certified(k);
        let iso = induced == src_h && induced == dst_h;
        if certified && !iso {
            verdict = false;
        }
        rank_table.insert(
            k,
            DegreeRanks {
                src_homology: src_h,
                dst_homology: dst_h,
                induced_rank: induced,
                iso,
                certified,
            },
        );
    }
    Ok(QuasiIsoReport { verdict, rank_table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    const F: FieldSpec = FieldSpec::Rationals;

    fn basis(entries: &[(i64, &[&str])]) -> BTreeMap<i64, Vec<String>> {
        entries
            .iter()
            .map(|(k, ls)| (*k, ls.iter().map(|s| s.to_string()).collect()))
            .collect()
    }

    fn all_complete(range: core::ops::RangeInclusive<i64>) -> BTreeMap<i64, bool> {
        range.map(|k| (k, true)).collect()
    }

    #[test]
    fn zero_differential_betti_equals_dimensions() {
        let b = basis(&[(-2, &["x"]), (-1, &["y", "z"]), (0, &["w"])]);
        let w = ChainWindow::assemble(
            -2,
            0,
            4,
            F,
            "test".into(),
            b,
            all_complete(-3..=1),
            |_, _| vec![],
        )
        .unwrap();
        let betti = w.betti().unwrap();
        assert_eq!(betti[&-2], 1);
        assert_eq!(betti[&-1], 2);
        assert_eq!(betti[&0], 1);
        assert!(w.certified(-1));
        assert_eq!(w.euler_identity_holds(), Some(true));
    }

    #[test]
    fn two_term_complex() {
        // d(x) = y: homology vanishes
        let b = basis(&[(-1, &["x"]), (0, &["y"])]);
        let w = ChainWindow::assemble(
            -1,
            0,
            4,
            F,
            "test".into(),
            b,
            all_complete(-2..=1),
            |k, l| {
                if k == -1 && l == "x" {
                    vec![("y".to_string(), F.one())]
                } else {
                    vec![]
                }
            },
        )
        .unwrap();
        let betti = w.betti().unwrap();
        assert_eq!(betti[&-1], 0);
        assert_eq!(betti[&0], 0);
        assert!(w.d_squared_failures().is_empty());
    }

    #[test]
    fn d_squared_failure_is_reported_with_witness() {
        let b = basis(&[(0, &["a"]), (1, &["b"]), (2, &["c"])]);
        let w = ChainWindow::assemble(
            0,
            2,
            4,
            F,
            "corrupt".into(),
            b,
            all_complete(-1..=3),
            |k, _| match k {
                0 => vec![("b".to_string(), F.one())],
                1 => vec![("c".to_string(), F.one())],
                _ => vec![],
            },
        )
        .unwrap();
        let fails = w.d_squared_failures();
        assert_eq!(fails.len(), 1);
        assert_eq!(fails[0].monomial, "a");
        assert_eq!(fails[0].image, "c");
        assert!(w.betti().is_err());
    }

    #[test]
    fn clipping_marks_degrees_uncertified() {
        // d at the top degree leaves the window
        let b = basis(&[(-1, &["x"]), (0, &["y"])]);
        let w = ChainWindow::assemble(
            -1,
            0,
            4,
            F,
            "clip".into(),
            b,
            all_complete(-2..=1),
            |k, l| {
                if k == 0 && l == "y" {
                    vec![("outside".to_string(), F.one())]
                } else {
                    vec![]
                }
            },
        )
        .unwrap();
        assert!(w.is_clipped(0));
        assert!(!w.certified(0));
        assert!(w.euler_identity_holds().is_none());
    }

    #[test]
    fn homology_witness_identifies_a_cycle() {
        let b = basis(&[(0, &["a", "b"])]);
        let w = ChainWindow::assemble(
            0,
            0,
            4,
            F,
            "free".into(),
            b,
            all_complete(-1..=1),
            |_, _| vec![],
        )
        .unwrap();
        let witness = w.homology_witness(0).unwrap();
        assert!(!witness.is_empty());
    }

    #[test]
    fn identity_map_is_a_quasi_iso() {
        let b = basis(&[(-1, &["x"]), (0, &["y", "z"])]);
        let mk = || {
            ChainWindow::assemble(
                -1,
                0,
                4,
                F,
                "t".into(),
                b.clone(),
                all_complete(-2..=1),
                |k, l| {
                    if k == -1 && l == "x" {
                        vec![("y".to_string(), F.one())]
                    } else {
                        vec![]
                    }
                },
            )
            .unwrap()
        };
        let (src, dst) = (mk(), mk());
        let f =
            ChainMap::from_images(&src, &dst, |_, l| vec![(l.to_string(), F.one())]).unwrap();
        let report = quasi_iso(&f, &src, &dst).unwrap();
        assert!(report.verdict);
        assert_eq!(report.rank_table[&0].dst_homology, 1);

        // the zero map between complexes with nonzero homology is not
        let zero = ChainMap::from_images(&src, &dst, |_, _| vec![]).unwrap();
        let report = quasi_iso(&zero, &src, &dst).unwrap();
        assert!(!report.verdict);
    }

    #[test]
    fn non_chain_maps_are_rejected_with_witness() {
        let b = basis(&[(-1, &["x"]), (0, &["y"])]);
        let mk = |with_d: bool| {
            ChainWindow::assemble(
                -1,
                0,
                4,
                F,
                "t".into(),
                b.clone(),
                all_complete(-2..=1),
                move |k, l| {
                    if with_d && k == -1 && l == "x" {
                        vec![("y".to_string(), F.one())]
                    } else {
                        vec![]
                    }
                },
            )
            .unwrap()
        };
        let src = mk(true);
        let dst = mk(false);
        let f =
            ChainMap::from_images(&src, &dst, |_, l| vec![(l.to_string(), F.one())]).unwrap();
        assert!(matches!(quasi_iso(&f, &src, &dst), Err(WindowError::NotAChainMap { .. })));
    }

    fn dense_rank_of(m: &SparseMatrix, field: &FieldSpec) -> usize {
        let mut dense: Vec<Vec<Scalar>> = (0..m.rows)
            .map(|r| {
                (0..m.cols).map(|c| m.get(r, c).cloned().unwrap_or(field.zero())).collect()
            })
            .collect();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..m.cols {
            let Some(p) = (row..m.rows).find(|r| !dense[*r][col].is_zero()) else { continue };
            dense.swap(row, p);
            let inv = dense[row][col].inv();
            for c in 0..m.cols {
                dense[row][c] = dense[row][c].mul(&inv);
            }
            for r in 0..m.rows {
                if r != row && !dense[r][col].is_zero() {
                    let f = dense[r][col].clone();
                    for c in 0..m.cols {
                        let delta = f.mul(&dense[row][c]).neg();
                        dense[r][c] = dense[r][c].add(&delta);
                    }
                }
            }
            rank += 1;
            row += 1;
            if row == m.rows {
                break;
            }
        }
        rank
    }

    /// Random three-term complexes (d1∘d0 = 0 by construction) against a
    /// dense elimination oracle, over Q and GF(2).
    #[test]
    fn random_complexes_match_dense_oracle() {
        for field in [FieldSpec::Rationals, FieldSpec::PrimeField(2)] {
            let mut state = 42u64;
            let mut next = move || {
                state = state.wrapping_add(0x9e3779b97f4a7c15);
                let mut z = state;
                z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
                z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
                z ^ (z >> 31)
            };
            for _case in 0..30 {
                let n0 = 2 + (next() % 6) as usize;
                let n1 = 2 + (next() % 8) as usize;
                let n2 = 2 + (next() % 6) as usize;
                let mut d0 = SparseMatrix::new(n1, n0);
                for r in 0..n1 {
                    for c in 0..n0 {
                        if next() % 3 == 0 {
                            d0.add_entry(r, c, field.from_integer((next() % 5) as i64 - 2));
                        }
                    }
                }
                // rows of d1 must annihilate im(d0): build them from the
                // left kernel of d0 (the kernel of its transpose)
                let mut d0t = SparseMatrix::new(n0, n1);
                for ((r, c), v) in d0.entries() {
                    d0t.add_entry(*c, *r, v.clone());
                }
                let lk = solve_linear(&d0t, None, &field).unwrap().kernel_basis;
                let mut d1 = SparseMatrix::new(n2, n1);
                for r in 0..n2 {
                    for v in lk.iter() {
                        if next() % 2 == 0 {
                            let s = field.from_integer((next() % 5) as i64 - 2);
                            for (c, x) in v.iter().enumerate() {
                                d1.add_entry(r, c, s.mul(x));
                            }
                        }
                    }
                }
                assert!(d1.compose(&d0).unwrap().is_zero());

                let labels = |n: usize, p: &str| -> Vec<String> {
                    (0..n).map(|i| alloc::format!("{}{}", p, i)).collect()
                };
                let mut basis = BTreeMap::new();
                basis.insert(0i64, labels(n0, "a"));
                basis.insert(1, labels(n1, "b"));
                basis.insert(2, labels(n2, "c"));
                let d0c = d0.clone();
                let d1c = d1.clone();
                let w = ChainWindow::assemble(
                    0,
                    2,
                    4,
                    field,
                    "random".into(),
                    basis,
                    all_complete(-1..=3),
                    move |k, l| {
                        let (m, prefix) = match k {
                            0 => (&d0c, "b"),
                            1 => (&d1c, "c"),
                            _ => return vec![],
                        };
                        let col: usize = l[1..].parse().unwrap();
                        let mut out = vec![];
                        for ((r, c), v) in m.entries() {
                            if *c == col {
                                out.push((alloc::format!("{}{}", prefix, r), v.clone()));
                            }
                        }
                        out
                    },
                )
                .unwrap();
                let betti = w.betti().unwrap();
                let r0 = dense_rank_of(&d0, &field);
                let r1 = dense_rank_of(&d1, &field);
                assert_eq!(betti[&0], n0 - r0);
                assert_eq!(betti[&1], n1 - r0 - r1);
                assert_eq!(betti[&2], n2 - r1);
                assert_eq!(w.euler_identity_holds(), Some(true));
            }
        }
    }
}
