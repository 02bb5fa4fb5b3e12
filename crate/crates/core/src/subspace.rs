//! Linear subspaces of `F_q^n` in canonical RREF form, affine cosets, and
//! exhaustive enumeration of the Grassmannian.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Elem, Field};
use crate::matgf::{MatError, Matrix, Rref};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubspaceError {
    #[error("generators span only the zero vector")]
    ZeroSpan,
    #[error("vector of length {got} in ambient dimension {n}")]
    Length { n: usize, got: usize },
    #[error("subspaces live in different ambient spaces")]
    AmbientMismatch,
    #[error("vector already lies in the subspace")]
    AlreadyContained,
    #[error("declared dimension {declared} but the basis has rank {rank}")]
    DeclaredDimension { declared: usize, rank: usize },
    #[error(transparent)]
    Mat(#[from] MatError),
}

/// A `k`-dimensional subspace, stored as its unique reduced row echelon basis.
/// Two subspaces are equal exactly when their bases are entry-wise equal.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    basis: Matrix,
    pivots: Vec<usize>,
}

/// Wire form `{"n", "k", "basis": [[codes]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub n: usize,
    pub k: usize,
    pub basis: Vec<Vec<u32>>,
}

impl Subspace {
    /// Canonical span of the given vectors.
    pub fn from_generators(
        field: &Field,
        n: usize,
        vectors: &[Vec<Elem>],
    ) -> Result<Subspace, SubspaceError> {
        if let Some(v) = vectors.iter().find(|v| v.len() != n) {
            return Err(SubspaceError::Length { n, got: v.len() });
        }
        Subspace::from_matrix(&Matrix::from_rows(field, n, vectors)?)
    }

    /// Canonical row space of `m`.
    pub fn from_matrix(m: &Matrix) -> Result<Subspace, SubspaceError> {
        let Rref {
            matrix,
            rank,
            pivots,
        } = m.rref();
        if rank == 0 {
            return Err(SubspaceError::ZeroSpan);
        }
        Ok(Subspace {
            basis: matrix.take_rows(rank),
            pivots,
        })
    }

    pub fn field(&self) -> &Field {
        self.basis.field()
    }

    pub fn n(&self) -> usize {
        self.basis.cols()
    }

    pub fn k(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Columns without a pivot, in increasing order.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.n()];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.n()).filter(|&c| !is_pivot[c]).collect()
    }

    /// The representative of `v + S` that vanishes on every pivot column.
    /// It is also the lexicographically smallest member of the coset.
    pub fn reduce(&self, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(
            v.len(),
            self.n(),
            "vector length must match the ambient dimension"
        );
        let f = self.field();
        let mut out = v.to_vec();
        for (r, &p) in self.pivots.iter().enumerate() {
            let c = out[p];
            if c.is_zero() {
                continue;
            }
            let nc = f.neg(c);
            for (o, &b) in out.iter_mut().zip(self.basis.row(r)).skip(p) {
                *o = f.add(*o, f.mul(nc, b));
            }
        }
        out
    }

    pub fn contains(&self, v: &[Elem]) -> bool {
        self.reduce(v).iter().all(|e| e.is_zero())
    }

    /// Position of the coset `v + S` among the `q^(n-k)` cosets, ordered like their
    /// canonical representatives (free coordinates read as base-q digits, most significant first).
    pub fn coset_index(&self, v: &[Elem]) -> u64 {
        let r = self.reduce(v);
        let q = self.field().q() as u64;
        self.free_columns()
            .iter()
            .fold(0, |acc, &c| acc * q + r[c].code() as u64)
    }

    /// Inverse of [`Subspace::coset_index`].
    pub fn coset_rep_from_index(&self, mut index: u64) -> Vec<Elem> {
        let q = self.field().q() as u64;
        let mut rep = vec![Elem::ZERO; self.n()];
        for &c in self.free_columns().iter().rev() {
            rep[c] = Elem::from_code((index % q) as u32);
            index /= q;
        }
        rep
    }

    pub fn coset_count(&self) -> u64 {
        (self.field().q() as u64).pow((self.n() - self.k()) as u32)
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), SubspaceError> {
        if self.field() == other.field() && self.n() == other.n() {
            Ok(())
        } else {
            Err(SubspaceError::AmbientMismatch)
        }
    }

    /// `A ∩ B = {0}`.
    pub fn trivially_intersects(&self, other: &Subspace) -> Result<bool, SubspaceError> {
        self.check_ambient(other)?;
        Ok(self.basis.vstack(&other.basis)?.rank() == self.k() + other.k())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, SubspaceError> {
        self.check_ambient(other)?;
        Subspace::from_matrix(&self.basis.vstack(&other.basis)?)
    }

    /// `A ∩ B` computed as the annihilator of `A^⊥ + B^⊥`; `None` when the intersection is zero.
    pub fn intersection(&self, other: &Subspace) -> Result<Option<Subspace>, SubspaceError> {
        self.check_ambient(other)?;
        let dual = self
            .basis
            .kernel_basis()
            .vstack(&other.basis.kernel_basis())?;
        let meet = if dual.rows() == 0 {
            Matrix::identity(self.field(), self.n())
        } else {
            dual.kernel_basis()
        };
        match Subspace::from_matrix(&meet) {
            Ok(s) => Ok(Some(s)),
            Err(SubspaceError::ZeroSpan) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// `span(S ∪ {u})` for `u ∉ S`.
    pub fn span_with(&self, u: &[Elem]) -> Result<Subspace, SubspaceError> {
        if u.len() != self.n() {
            return Err(SubspaceError::Length {
                n: self.n(),
                got: u.len(),
            });
        }
        if self.contains(u) {
            return Err(SubspaceError::AlreadyContained);
        }
        let extra = Matrix::from_rows(self.field(), self.n(), &[u.to_vec()])?;
        Subspace::from_matrix(&self.basis.vstack(&extra)?)
    }

    /// All `q^k` vectors of the subspace, as combinations of the basis rows with
    /// coefficient tuples in lexicographic order (so the zero vector comes first).
    pub fn points(&self) -> Vec<Vec<Elem>> {
        let f = self.field();
        let (k, n) = (self.k(), self.n());
        let q = f.q();
        let mut out = Vec::with_capacity((q as usize).pow(k as u32));
        let mut coeffs = vec![0u32; k];
        loop {
            let mut v = vec![Elem::ZERO; n];
            for (r, &c) in coeffs.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let c = Elem::from_code(c);
                for (o, &b) in v.iter_mut().zip(self.basis.row(r)) {
                    *o = f.add(*o, f.mul(c, b));
                }
            }
            out.push(v);
            if !odometer(&mut coeffs, q) {
                break;
            }
        }
        out
    }

    /// Nonzero vectors of the subspace, in the order of [`Subspace::points`].
    pub fn nonzero_points(&self) -> Vec<Vec<Elem>> {
        let mut pts = self.points();
        pts.remove(0);
        pts
    }

    pub fn to_json(&self) -> SubspaceJson {
        SubspaceJson {
            n: self.n(),
            k: self.k(),
            basis: (0..self.k())
                .map(|r| self.basis.row(r).iter().map(|e| e.code()).collect())
                .collect(),
        }
    }

    pub fn from_json(field: &Field, json: &SubspaceJson) -> Result<Subspace, SubspaceError> {
        let rows = json
            .basis
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&c| field.elem(c as u64))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(MatError::from)?;
        let s = Subspace::from_generators(field, json.n, &rows)?;
        if s.k() != json.k {
            return Err(SubspaceError::DeclaredDimension {
                declared: json.k,
                rank: s.k(),
            });
        }
        Ok(s)
    }
}

impl std::fmt::Debug for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Subspace(n={}, k={}, basis={:?})",
            self.n(),
            self.k(),
            self.to_json().basis
        )
    }
}

impl std::hash::Hash for Subspace {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.n().hash(state);
        self.basis.entries().hash(state);
    }
}

/// Every vector of `F_q^n` in lexicographic order (first coordinate most significant).
pub fn vectors(field: &Field, n: usize) -> impl Iterator<Item = Vec<Elem>> {
    let q = field.q() as u64;
    let total = q.pow(n as u32);
    (0..total).map(move |i| vector_from_index(q, n, i))
}

/// Position of `v` in the order of [`vectors`].
pub fn vector_index(q: u32, v: &[Elem]) -> u64 {
    v.iter().fold(0, |acc, e| acc * q as u64 + e.code() as u64)
}

/// Inverse of [`vector_index`].
pub fn vector_from_index(q: u64, n: usize, mut index: u64) -> Vec<Elem> {
    let mut v = vec![Elem::ZERO; n];
    for slot in v.iter_mut().rev() {
        *slot = Elem::from_code((index % q) as u32);
        index /= q;
    }
    v
}

/// Advances a base-`q` counter with the last digit fastest. Returns false on wrap-around.
pub(crate) fn odometer(digits: &mut [u32], q: u32) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < q {
            return true;
        }
        *d = 0;
    }
    false
}

/// An affine subspace `rep + sub`.
#[derive(Debug, Clone)]
pub struct AffineCoset {
    pub rep: Vec<Elem>,
    pub sub: Subspace,
}

impl AffineCoset {
    pub fn new(rep: Vec<Elem>, sub: Subspace) -> AffineCoset {
        AffineCoset { rep, sub }
    }

    /// Lexicographically smallest member of the coset.
    pub fn canonical_rep(&self) -> Vec<Elem> {
        self.sub.reduce(&self.rep)
    }

    pub fn contains(&self, v: &[Elem]) -> bool {
        let f = self.sub.field();
        let diff: Vec<Elem> = v
            .iter()
            .zip(&self.rep)
            .map(|(&a, &b)| f.sub(a, b))
            .collect();
        self.sub.contains(&diff)
    }

    /// Every point `rep + s`, `s ∈ sub`.
    pub fn points(&self) -> Vec<Vec<Elem>> {
        let f = self.sub.field();
        self.sub
            .points()
            .into_iter()
            .map(|s| {
                s.iter()
                    .zip(&self.rep)
                    .map(|(&a, &b)| f.add(a, b))
                    .collect()
            })
            .collect()
    }
}

impl PartialEq for AffineCoset {
    fn eq(&self, other: &AffineCoset) -> bool {
        self.sub == other.sub && self.canonical_rep() == other.canonical_rep()
    }
}

impl Eq for AffineCoset {}

/// Number of `k`-dimensional subspaces of `F_q^n`, or `None` on overflow.
pub fn gaussian_binomial(q: u64, n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let q = q as u128;
    // row[j] = [m choose j]_q, advanced by [m, j] = [m-1, j-1] + q^j [m-1, j]
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for m in 1..=n {
        for j in (1..=k.min(m)).rev() {
            row[j] = q
                .checked_pow(j as u32)?
                .checked_mul(row[j])?
                .checked_add(row[j - 1])?;
        }
    }
    Some(row[k])
}

/// Iterator over every `k`-subspace of `F_q^n`, ordered by pivot pattern (combinations in
/// lexicographic order) and then by the free entries read row-major as base-q digits.
pub struct SubspaceIter {
    field: Field,
    n: usize,
    k: usize,
    pivots: Vec<usize>,
    free: Vec<(usize, usize)>,
    codes: Vec<u32>,
    done: bool,
}

pub fn enumerate_subspaces(field: &Field, n: usize, k: usize) -> SubspaceIter {
    let valid = k >= 1 && k <= n;
    let pivots: Vec<usize> = (0..k).collect();
    let free = if valid {
        free_positions(n, &pivots)
    } else {
        Vec::new()
    };
    SubspaceIter {
        field: field.clone(),
        n,
        k,
        codes: vec![0; free.len()],
        pivots,
        free,
        done: !valid,
    }
}

fn free_positions(n: usize, pivots: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (r, &p) in pivots.iter().enumerate() {
        for c in p + 1..n {
            if !pivots.contains(&c) {
                out.push((r, c));
            }
        }
    }
    out
}

fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    for i in (0..k).rev() {
        if comb[i] < n - k + i {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

impl Iterator for SubspaceIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        if self.done {
            return None;
        }
        let mut basis = Matrix::zeros(&self.field, self.k, self.n);
        for (r, &p) in self.pivots.iter().enumerate() {
            basis.set(r, p, Elem::ONE);
        }
        for (&(r, c), &code) in self.free.iter().zip(&self.codes) {
            basis.set(r, c, Elem::from_code(code));
        }
        let out = Subspace {
            basis,
            pivots: self.pivots.clone(),
        };
        if !odometer(&mut self.codes, self.field.q()) {
            if next_combination(&mut self.pivots, self.n) {
                self.free = free_positions(self.n, &self.pivots);
                self.codes = vec![0; self.free.len()];
            } else {
                self.done = true;
            }
        }
        Some(out)
    }
}
