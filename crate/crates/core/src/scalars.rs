//! Exact field arithmetic (arbitrary-precision rationals and prime fields)
//! and sparse exact linear solving.
//!
//! Every verdict downstream is an equality of exact scalars, so there is no
//! floating point anywhere. Elimination uses Markowitz-style least-fill
//! pivoting with a deterministic tie-break so results are reproducible
//! run-to-run.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Which exact field coefficients live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FieldSpec {
    Rationals,
    PrimeField(u64),
}

impl FieldSpec {
    /// Validates the spec: the modulus of a prime field must be prime.
    pub fn validate(&self) -> Result<(), FieldError> {
        match self {
            FieldSpec::Rationals => Ok(()),
            FieldSpec::PrimeField(p) => {
                if is_prime_u64(*p) {
                    Ok(())
                } else {
                    Err(FieldError::NotPrime(*p))
                }
            }
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rational(BigRational::zero()),
            FieldSpec::PrimeField(p) => Scalar::Prime { value: 0, modulus: *p },
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rational(BigRational::one()),
            FieldSpec::PrimeField(p) => Scalar::Prime { value: 1 % p, modulus: *p },
        }
    }

    /// The image of the integer `n` in this field.
    pub fn from_integer(&self, n: i64) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
            FieldSpec::PrimeField(p) => {
                let r = n.rem_euclid(*p as i64) as u64;
                Scalar::Prime { value: r, modulus: *p }
            }
        }
    }

    /// The fraction `num/den` in this field. Fails in GF(p) when `den ≡ 0`.
    pub fn from_ratio(&self, num: i64, den: i64) -> Result<Scalar, FieldError> {
        if den == 0 {
            return Err(FieldError::DivisionByZero);
        }
        match self {
            FieldSpec::Rationals => Ok(Scalar::Rational(BigRational::new(
                BigInt::from(num),
                BigInt::from(den),
            ))),
            FieldSpec::PrimeField(_) => {
                let d = self.from_integer(den);
                let n = self.from_integer(num);
                n.checked_mul(&d.checked_inv()?)
            }
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::PrimeField(p) => write!(f, "GF({})", p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldError {
    NotPrime(u64),
    DivisionByZero,
    MixedFields(String),
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::NotPrime(p) => write!(f, "{} is not prime", p),
            FieldError::DivisionByZero => write!(f, "inversion of zero"),
            FieldError::MixedFields(s) => write!(f, "mixed field specs: {}", s),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for FieldError {}

/// An exact field element: a reduced rational or a residue in `[0, p)`.
///
/// Prime-field scalars carry their modulus so that cross-field mixing is
/// detectable. All structures in this crate keep every scalar in one field;
/// the unchecked operators panic on a mix, the `checked_*` variants report it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Rational(BigRational),
    Prime { value: u64, modulus: u64 },
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rational(_) => FieldSpec::Rationals,
            Scalar::Prime { modulus, .. } => FieldSpec::PrimeField(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Prime { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Prime { value, .. } => *value == 1,
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a + b)),
            (Scalar::Prime { value: a, modulus: p }, Scalar::Prime { value: b, modulus: q })
                if p == q =>
            {
                Ok(Scalar::Prime { value: add_mod(*a, *b, *p), modulus: *p })
            }
            _ => Err(mix(self, other)),
        }
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a * b)),
            (Scalar::Prime { value: a, modulus: p }, Scalar::Prime { value: b, modulus: q })
                if p == q =>
            {
                Ok(Scalar::Prime { value: mul_mod(*a, *b, *p), modulus: *p })
            }
            _ => Err(mix(self, other)),
        }
    }

    pub fn checked_neg(&self) -> Result<Scalar, FieldError> {
        Ok(match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Prime { value, modulus } => Scalar::Prime {
                value: if *value == 0 { 0 } else { modulus - value },
                modulus: *modulus,
            },
        })
    }

    pub fn checked_inv(&self) -> Result<Scalar, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rational(a) => Scalar::Rational(a.recip()),
            Scalar::Prime { value, modulus } => Scalar::Prime {
                value: inv_mod(*value, *modulus),
                modulus: *modulus,
            },
        })
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        self.checked_add(other).expect("scalar addition across fields")
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        self.checked_mul(other).expect("scalar multiplication across fields")
    }

    pub fn neg(&self) -> Scalar {
        self.checked_neg().expect("negation")
    }

    pub fn inv(&self) -> Scalar {
        self.checked_inv().expect("inversion of zero scalar")
    }

    pub fn div(&self, other: &Scalar) -> Scalar {
        self.mul(&other.inv())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Prime { value, .. } => write!(f, "{}", value),
        }
    }
}

/// The four field operations behind one checked entry point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Neg,
    Inv,
}

/// Checked field arithmetic: rejects zero inversion and mixed field specs.
/// `Neg` and `Inv` ignore the second operand.
pub fn field_arith(a: &Scalar, b: &Scalar, op: FieldOp) -> Result<Scalar, FieldError> {
    match op {
        FieldOp::Add => a.checked_add(b),
        FieldOp::Mul => a.checked_mul(b),
        FieldOp::Neg => a.checked_neg(),
        FieldOp::Inv => a.checked_inv(),
    }
}

fn mix(a: &Scalar, b: &Scalar) -> FieldError {
    FieldError::MixedFields(alloc::format!("{} vs {}", a.field(), b.field()))
}

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin, exact for all u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A sparse matrix over one exact field. No duplicate positions, no stored
/// zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveError {
    DimensionMismatch { expected: usize, got: usize },
    OutOfBounds { row: usize, col: usize },
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {}, got {}", expected, got)
            }
            SolveError::OutOfBounds { row, col } => {
                write!(f, "entry ({}, {}) out of bounds", row, col)
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SolveError {}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: BTreeMap::new() }
    }

    /// Adds `v` to the entry at `(row, col)`, dropping it if the sum is zero.
    pub fn add_entry(&mut self, row: usize, col: usize, v: Scalar) {
        assert!(row < self.rows && col < self.cols, "entry out of bounds");
        if v.is_zero() {
            return;
        }
        match self.entries.remove(&(row, col)) {
            None => {
                self.entries.insert((row, col), v);
            }
            Some(old) => {
                let s = old.add(&v);
                if !s.is_zero() {
                    self.entries.insert((row, col), s);
                }
            }
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Option<&Scalar> {
        self.entries.get(&(row, col))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Scalar)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Matrix product `self * other` (`self: m×n`, `other: n×k`).
    pub fn compose(&self, other: &SparseMatrix) -> Result<SparseMatrix, SolveError> {
        if self.cols != other.rows {
            return Err(SolveError::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = SparseMatrix::new(self.rows, other.cols);
        // group other's entries by row
        let mut by_row: BTreeMap<usize, Vec<(usize, &Scalar)>> = BTreeMap::new();
        for ((r, c), v) in other.entries.iter() {
            by_row.entry(*r).or_default().push((*c, v));
        }
        for ((r, mid), a) in self.entries.iter() {
            if let Some(row) = by_row.get(mid) {
                for (c, b) in row {
                    out.add_entry(*r, *c, a.mul(b));
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, vector: &[Scalar], field: &FieldSpec) -> Result<Vec<Scalar>, SolveError> {
        if vector.len() != self.cols {
            return Err(SolveError::DimensionMismatch { expected: self.cols, got: vector.len() });
        }
        let mut out = vec![field.zero(); self.rows];
        for ((r, c), v) in self.entries.iter() {
            out[*r] = out[*r].add(&v.mul(&vector[*c]));
        }
        Ok(out)
    }
}

/// Result of an exact linear solve.
#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub rank: usize,
    /// One solution of `M x = b` when `b` was supplied and the system is
    /// consistent; `None` otherwise.
    pub solution: Option<Vec<Scalar>>,
    /// When `b` was supplied and the system is inconsistent, the index of a
    /// row certifying `0 = nonzero` after elimination.
    pub inconsistent_row: Option<usize>,
    /// Vectors spanning `ker M`, one per free column, in ascending column
    /// order.
    pub kernel_basis: Vec<Vec<Scalar>>,
}

struct Elimination {
    row_data: Vec<BTreeMap<usize, Scalar>>,
    pivots: Vec<(usize, usize)>,
    rhs: Option<Vec<Scalar>>,
    field: FieldSpec,
}

/// Row-reduces `m` (carrying `b` along when given) with Markowitz least-fill
/// pivoting, deterministic tie-break by (row, col).
fn eliminate(m: &SparseMatrix, b: Option<&[Scalar]>, field: &FieldSpec) -> Elimination {
    let mut rows: Vec<BTreeMap<usize, Scalar>> = vec![BTreeMap::new(); m.rows];
    let mut col_count = vec![0usize; m.cols];
    for ((r, c), v) in m.entries.iter() {
        rows[*r].insert(*c, v.clone());
        col_count[*c] += 1;
    }
    let mut rhs = b.map(|v| v.to_vec());
    let mut row_active = vec![true; m.rows];
    let mut col_active = vec![true; m.cols];
    let mut pivots = Vec::new();

    loop {
        // Markowitz: among active nonzero entries, minimize
        // (nnz(row)-1)*(nnz(col)-1); ties by (row, col).
        let mut best: Option<(usize, usize, usize)> = None;
        for (r, row) in rows.iter().enumerate() {
            if !row_active[r] || row.is_empty() {
                continue;
            }
            let rn = row.len();
            for (c, _) in row.iter() {
                if !col_active[*c] {
                    continue;
                }
                let score = (rn - 1) * (col_count[*c].saturating_sub(1));
                match best {
                    None => best = Some((score, r, *c)),
                    Some((s, br, bc)) => {
                        if score < s || (score == s && (r, *c) < (br, bc)) {
                            best = Some((score, r, *c));
                        }
                    }
                }
            }
        }
        let Some((_, pr, pc)) = best else { break };

        // Normalize the pivot row.
        let pv = rows[pr].get(&pc).expect("pivot entry").clone();
        let pv_inv = pv.inv();
        let prow: Vec<(usize, Scalar)> =
            rows[pr].iter().map(|(c, v)| (*c, v.mul(&pv_inv))).collect();
        for (c, _) in rows[pr].iter() {
            col_count[*c] -= 1;
        }
        rows[pr] = prow.iter().cloned().collect();
        for (c, _) in rows[pr].iter() {
            col_count[*c] += 1;
        }
        if let Some(rhs) = rhs.as_mut() {
            rhs[pr] = rhs[pr].mul(&pv_inv);
        }

        // Eliminate the pivot column from every other row (Gauss-Jordan, so
        // that back-substitution is immediate).
        let prow = rows[pr].clone();
        let prhs = rhs.as_ref().map(|v| v[pr].clone());
        for r in 0..rows.len() {
            if r == pr {
                continue;
            }
            let Some(factor) = rows[r].get(&pc).cloned() else { continue };
            for (c, _) in rows[r].iter() {
                col_count[*c] -= 1;
            }
            let mut updated = core::mem::take(&mut rows[r]);
            for (c, v) in prow.iter() {
                let delta = factor.mul(v).neg();
                match updated.remove(c) {
                    None => {
                        if !delta.is_zero() {
                            updated.insert(*c, delta);
                        }
                    }
                    Some(old) => {
                        let s = old.add(&delta);
                        if !s.is_zero() {
                            updated.insert(*c, s);
                        }
                    }
                }
            }
            rows[r] = updated;
            for (c, _) in rows[r].iter() {
                col_count[*c] += 1;
            }
            if let (Some(rhs), Some(pb)) = (rhs.as_mut(), prhs.as_ref()) {
                let delta = factor.mul(pb).neg();
                rhs[r] = rhs[r].add(&delta);
            }
        }

        pivots.push((pr, pc));
        row_active[pr] = false;
        col_active[pc] = false;
    }

    Elimination { row_data: rows, pivots, rhs, field: *field }
}

/// Exact rank, one solution of `M x = b` (when `b` is given) or an
/// inconsistency certificate, and a kernel basis.
pub fn solve_linear(
    m: &SparseMatrix,
    b: Option<&[Scalar]>,
    field: &FieldSpec,
) -> Result<SolveOutcome, SolveError> {
    if let Some(b) = b {
        if b.len() != m.rows {
            return Err(SolveError::DimensionMismatch { expected: m.rows, got: b.len() });
        }
    }
    let elim = eliminate(m, b, field);
    let rank = elim.pivots.len();

    let mut pivot_col_of_row: BTreeMap<usize, usize> = BTreeMap::new();
    let mut pivot_row_of_col: BTreeMap<usize, usize> = BTreeMap::new();
    for (r, c) in elim.pivots.iter() {
        pivot_col_of_row.insert(*r, *c);
        pivot_row_of_col.insert(*c, *r);
    }

    let mut solution = None;
    let mut inconsistent_row = None;
    if let Some(rhs) = elim.rhs.as_ref() {
        // A zero row with nonzero rhs certifies inconsistency.
        for r in 0..m.rows {
            if !pivot_col_of_row.contains_key(&r) && elim.row_data[r].is_empty() && !rhs[r].is_zero()
            {
                inconsistent_row = Some(r);
                break;
            }
        }
        if inconsistent_row.is_none() {
            let mut x = vec![elim.field.zero(); m.cols];
            for (r, c) in elim.pivots.iter() {
                x[*c] = rhs[*r].clone();
            }
            solution = Some(x);
        }
    }

    let mut kernel_basis = Vec::new();
    for free in 0..m.cols {
        if pivot_row_of_col.contains_key(&free) {
            continue;
        }
        let mut v = vec![elim.field.zero(); m.cols];
        v[free] = elim.field.one();
        for (r, c) in elim.pivots.iter() {
            if let Some(coef) = elim.row_data[*r].get(&free) {
                v[*c] = coef.neg();
            }
        }
        kernel_basis.push(v);
    }

    Ok(SolveOutcome { rank, solution, inconsistent_row, kernel_basis })
}

/// Rank only, without carrying a right-hand side.
pub fn rank(m: &SparseMatrix, field: &FieldSpec) -> usize {
    eliminate(m, None, field).pivots.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        FieldSpec::Rationals.from_ratio(n, d).unwrap()
    }

    #[test]
    fn rational_arithmetic_is_exact() {
        // 1/3 + 1/6 = 1/2
        assert_eq!(q(1, 3).add(&q(1, 6)), q(1, 2));
        let x = q(-7, 3);
        assert!(x.mul(&x.inv()).is_one());
    }

    #[test]
    fn prime_field_inverse() {
        let gf5 = FieldSpec::PrimeField(5);
        let two = gf5.from_integer(2);
        assert_eq!(two.inv(), gf5.from_integer(3));
        assert!(gf5.zero().checked_inv().is_err());
    }

    #[test]
    fn mixing_fields_is_an_error() {
        let a = FieldSpec::Rationals.one();
        let b = FieldSpec::PrimeField(5).one();
        assert!(matches!(field_arith(&a, &b, FieldOp::Add), Err(FieldError::MixedFields(_))));
        assert!(matches!(
            field_arith(
                &FieldSpec::PrimeField(3).one(),
                &FieldSpec::PrimeField(5).one(),
                FieldOp::Mul
            ),
            Err(FieldError::MixedFields(_))
        ));
    }

    #[test]
    fn primality() {
        for p in [2u64, 3, 5, 7, 101, 65537] {
            assert!(is_prime_u64(p), "{} is prime", p);
        }
        for n in [0u64, 1, 4, 9, 91, 65536, 6700417 * 3] {
            assert!(!is_prime_u64(n), "{} is not prime", n);
        }
        assert!(FieldSpec::PrimeField(6).validate().is_err());
    }

    #[test]
    fn identity_solve() {
        let f = FieldSpec::Rationals;
        let mut m = SparseMatrix::new(3, 3);
        for i in 0..3 {
            m.add_entry(i, i, f.one());
        }
        let b = [f.from_integer(1), f.from_integer(2), f.from_integer(3)];
        let out = solve_linear(&m, Some(&b), &f).unwrap();
        assert_eq!(out.rank, 3);
        assert_eq!(out.solution.unwrap(), b.to_vec());
        assert!(out.kernel_basis.is_empty());
    }

    #[test]
    fn rank_one_kernel() {
        // [[1,1],[2,2]] over Q: rank 1, kernel spanned by (1,-1) up to scale.
        let f = FieldSpec::Rationals;
        let mut m = SparseMatrix::new(2, 2);
        m.add_entry(0, 0, f.one());
        m.add_entry(0, 1, f.one());
        m.add_entry(1, 0, f.from_integer(2));
        m.add_entry(1, 1, f.from_integer(2));
        let out = solve_linear(&m, None, &f).unwrap();
        assert_eq!(out.rank, 1);
        assert_eq!(out.kernel_basis.len(), 1);
        let k = &out.kernel_basis[0];
        // kernel vector is a nonzero multiple of (1, -1)
        assert_eq!(k[0].neg(), k[1]);
        assert!(!k[0].is_zero());
        let img = m.apply(k, &f).unwrap();
        assert!(img.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn inconsistent_system_is_certified() {
        let f = FieldSpec::Rationals;
        let mut m = SparseMatrix::new(2, 1);
        m.add_entry(0, 0, f.one());
        m.add_entry(1, 0, f.one());
        let b = [f.one(), f.from_integer(2)];
        let out = solve_linear(&m, Some(&b), &f).unwrap();
        assert!(out.solution.is_none());
        assert!(out.inconsistent_row.is_some());
    }

    // --- dense elimination oracle (independent of the sparse path) ---

    fn dense_rank(mut m: Vec<Vec<Scalar>>, _field: &FieldSpec) -> usize {
        let rows = m.len();
        if rows == 0 {
            return 0;
        }
        let cols = m[0].len();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..cols {
            let Some(p) = (row..rows).find(|r| !m[*r][col].is_zero()) else { continue };
            m.swap(row, p);
            let inv = m[row][col].inv();
            for c in 0..cols {
                m[row][c] = m[row][c].mul(&inv);
            }
            for r in 0..rows {
                if r != row && !m[r][col].is_zero() {
                    let factor = m[r][col].clone();
                    for c in 0..cols {
                        let delta = factor.mul(&m[row][c]).neg();
                        m[r][c] = m[r][c].add(&delta);
                    }
                }
            }
            rank += 1;
            row += 1;
            if row == rows {
                break;
            }
        }
        rank
    }

    fn random_matrix(seed: u64, rows: usize, cols: usize, field: &FieldSpec) -> SparseMatrix {
        // splitmix64
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^ (z >> 31)
        };
        let mut m = SparseMatrix::new(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                let x = next();
                if x % 3 == 0 {
                    let v = match field {
                        FieldSpec::Rationals => field.from_integer((x % 7) as i64 - 3),
                        FieldSpec::PrimeField(p) => field.from_integer((x % p) as i64),
                    };
                    m.add_entry(r, c, v);
                }
            }
        }
        m
    }

    #[test]
    fn random_gf2_rank_matches_dense_oracle() {
        let f = FieldSpec::PrimeField(2);
        for seed in 0..8 {
            let m = random_matrix(seed, 20, 20, &f);
            let dense: Vec<Vec<Scalar>> = (0..20)
                .map(|r| (0..20).map(|c| m.get(r, c).cloned().unwrap_or(f.zero())).collect())
                .collect();
            assert_eq!(rank(&m, &f), dense_rank(dense, &f), "seed {}", seed);
        }
    }

    #[test]
    fn rank_nullity_holds() {
        for (seed, field) in [(1u64, FieldSpec::Rationals), (2, FieldSpec::PrimeField(5))] {
            for n in [3usize, 7, 12] {
                let m = random_matrix(seed + n as u64, n, n + 2, &field);
                let out = solve_linear(&m, None, &field).unwrap();
                assert_eq!(out.rank + out.kernel_basis.len(), m.cols);
                for k in out.kernel_basis.iter() {
                    assert!(m.apply(k, &field).unwrap().iter().all(|v| v.is_zero()));
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn solve_agrees_with_dense_oracle(seed in 0u64..200, rows in 1usize..12, cols in 1usize..12, modulus in proptest::sample::select(vec![0u64, 2, 3, 7])) {
            let field = if modulus == 0 { FieldSpec::Rationals } else { FieldSpec::PrimeField(modulus) };
            let m = random_matrix(seed, rows, cols, &field);
            let dense: Vec<Vec<Scalar>> = (0..rows)
                .map(|r| (0..cols).map(|c| m.get(r, c).cloned().unwrap_or(field.zero())).collect())
                .collect();
            let out = solve_linear(&m, None, &field).unwrap();
            proptest::prop_assert_eq!(out.rank, dense_rank(dense, &field));
            proptest::prop_assert_eq!(out.rank + out.kernel_basis.len(), cols);
        }
    }
}
