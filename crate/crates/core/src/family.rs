//! Families of `k`-subspaces: partial-spread checking and exact computation of the
//! almost-affinely-disjoint and almost-sparse parameters, with witnesses.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::bound_theorem1;
use crate::gf::{Elem, Field, FieldSpec, GfError};
use crate::matgf::{rref_in_place, MatError};
use crate::subspace::{
    enumerate_subspaces, gaussian_binomial, odometer, Subspace, SubspaceError, SubspaceJson,
};

/// Upper limit on the number of `(k+1)`-subspaces the almost-sparse verifier will enumerate.
pub const DEFAULT_ENUMERATION_GUARD: u128 = 10_000_000;

/// Enumerated subspaces are handed to worker threads in batches of this size.
const AS_CHUNK: usize = 2048;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("need 2k < n, got n={n}, k={k}")]
    Dimensions { n: usize, k: usize },
    #[error("member {index} does not match the family parameters")]
    MemberShape { index: usize },
    #[error("members {first} and {second} are the same subspace")]
    Duplicate { first: usize, second: usize },
    #[error("members {0} and {1} intersect non-trivially")]
    NotPartialSpread(usize, usize),
    #[error("member index {index} out of range for a family of {len}")]
    Index { index: usize, len: usize },
    #[error("vector lies inside member {0}")]
    VectorInMember(usize),
    #[error("enumeration of {count} subspaces exceeds the guard {guard}")]
    GuardExceeded { count: u128, guard: u128 },
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
    #[error(transparent)]
    Gf(#[from] GfError),
}

impl From<MatError> for FamilyError {
    fn from(e: MatError) -> FamilyError {
        FamilyError::Subspace(e.into())
    }
}

/// An ordered collection of distinct `k`-subspaces of `F_q^n` with `2k < n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    field: Field,
    n: usize,
    k: usize,
    members: Vec<Subspace>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyJson {
    pub field: FieldSpec,
    pub n: usize,
    pub k: usize,
    pub members: Vec<SubspaceJson>,
}

impl Family {
    pub fn new(
        field: &Field,
        n: usize,
        k: usize,
        members: Vec<Subspace>,
    ) -> Result<Family, FamilyError> {
        if k == 0 || 2 * k >= n {
            return Err(FamilyError::Dimensions { n, k });
        }
        let mut seen: HashMap<&Subspace, usize> = HashMap::with_capacity(members.len());
        for (index, s) in members.iter().enumerate() {
            if s.field() != field || s.n() != n || s.k() != k {
                return Err(FamilyError::MemberShape { index });
            }
            if let Some(&first) = seen.get(s) {
                return Err(FamilyError::Duplicate {
                    first,
                    second: index,
                });
            }
            seen.insert(s, index);
        }
        Ok(Family {
            field: field.clone(),
            n,
            k,
            members,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Subspace] {
        &self.members
    }

    pub fn member(&self, i: usize) -> Result<&Subspace, FamilyError> {
        self.members.get(i).ok_or(FamilyError::Index {
            index: i,
            len: self.len(),
        })
    }

    /// The family with member `i` removed.
    pub fn without(&self, i: usize) -> Family {
        let mut members = self.members.clone();
        members.remove(i);
        Family {
            members,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> FamilyJson {
        FamilyJson {
            field: self.field.spec(),
            n: self.n,
            k: self.k,
            members: self.members.iter().map(Subspace::to_json).collect(),
        }
    }

    pub fn from_json(json: &FamilyJson) -> Result<Family, FamilyError> {
        let field = Field::from_spec(&json.field)?;
        Family::from_json_with_field(&field, json)
    }

    pub fn from_json_with_field(field: &Field, json: &FamilyJson) -> Result<Family, FamilyError> {
        let members = json
            .members
            .iter()
            .map(|m| Subspace::from_json(field, m))
            .collect::<Result<Vec<_>, _>>()?;
        Family::new(field, json.n, json.k, members)
    }
}

/// Outcome of the partial-spread test; the witness is the first offending pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpreadCheck {
    pub is_partial_spread: bool,
    pub witness: Option<(usize, usize)>,
}

/// Pairwise trivial-intersection test over all members, first violation in member order.
pub fn check_partial_spread(family: &Family) -> SpreadCheck {
    let data = MemberData::build(family);
    let m = family.len();
    let witness = (0..m)
        .into_par_iter()
        .filter_map(|i| {
            (i + 1..m)
                .find(|&j| data.quotient_rank(family, i, j) < family.k())
                .map(|j| (i, j))
        })
        .min();
    SpreadCheck {
        is_partial_spread: witness.is_none(),
        witness,
    }
}

/// Number of members met by the affine subspace `u + S_i`. The member `S_i` itself is never
/// counted: with `u ∉ S_i` the coset is disjoint from it.
pub fn coset_hits(family: &Family, i: usize, u: &[Elem]) -> Result<usize, FamilyError> {
    let si = family.member(i)?;
    if u.len() != family.n() {
        return Err(SubspaceError::Length {
            n: family.n(),
            got: u.len(),
        }
        .into());
    }
    if si.contains(u) {
        return Err(FamilyError::VectorInMember(i));
    }
    // (u + S_i) meets S_j exactly when u ∈ S_i + S_j.
    let mut hits = 0;
    for (j, sj) in family.members().iter().enumerate() {
        if j != i && si.sum(sj)?.contains(u) {
            hits += 1;
        }
    }
    Ok(hits)
}

/// A coset `rep + S_member` attaining the almost-affinely-disjoint parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AadWitness {
    pub member: usize,
    pub rep: Vec<Elem>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AadResult {
    pub l: usize,
    pub witness: Option<AadWitness>,
}

/// Exact maximum of [`coset_hits`] over every member and every coset outside it.
///
/// For each ordered pair `(i, j)` the cosets of `S_i` inside `S_i + S_j` are exactly
/// `v + S_i` for `v ∈ S_j`, one per vector since `S_i ∩ S_j = 0`. Counting them per coset
/// index replaces a rank test per `(u, j)` pair.
pub fn compute_l_aad(family: &Family) -> Result<AadResult, FamilyError> {
    let spread = check_partial_spread(family);
    if let Some((i, j)) = spread.witness {
        return Err(FamilyError::NotPartialSpread(i, j));
    }
    if family.is_empty() {
        return Ok(AadResult {
            l: 0,
            witness: None,
        });
    }
    let data = MemberData::build(family);
    let counts = coset_counts_all(family, &data);
    let per_member: Vec<(u32, u64)> = counts
        .par_iter()
        .map(|c| {
            // index 0 is S_i itself
            let mut best = (c[1], 1u64);
            for (idx, &v) in c.iter().enumerate().skip(2) {
                if v > best.0 {
                    best = (v, idx as u64);
                }
            }
            best
        })
        .collect();
    let (member, &(l, idx)) = per_member
        .iter()
        .enumerate()
        .fold(None::<(usize, &(u32, u64))>, |acc, (i, cur)| match acc {
            Some((_, b)) if b.0 >= cur.0 => acc,
            _ => Some((i, cur)),
        })
        .expect("family is nonempty");
    let rep = family.members()[member].coset_rep_from_index(idx);
    Ok(AadResult {
        l: l as usize,
        witness: Some(AadWitness { member, rep }),
    })
}

/// Coset-hit counters for every member, indexed by coset index.
pub(crate) fn coset_counts_all(family: &Family, data: &MemberData) -> Vec<Vec<u32>> {
    (0..family.len())
        .into_par_iter()
        .map(|i| {
            let mut counts = vec![0u32; data.coset_count as usize];
            for j in 0..family.len() {
                if j != i {
                    data.for_each_coset_of_pair(family, i, j, |idx| counts[idx as usize] += 1);
                }
            }
            counts
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsResult {
    pub l: usize,
    pub witness: Option<Subspace>,
}

/// Exact maximum, over every `(k+1)`-subspace `V`, of the number of members meeting `V`
/// non-trivially. Uses full enumeration of the Grassmannian.
pub fn compute_l_as(family: &Family) -> Result<AsResult, FamilyError> {
    compute_l_as_with_guard(family, DEFAULT_ENUMERATION_GUARD)
}

pub fn compute_l_as_with_guard(family: &Family, guard: u128) -> Result<AsResult, FamilyError> {
    let spread = check_partial_spread(family);
    if let Some((i, j)) = spread.witness {
        return Err(FamilyError::NotPartialSpread(i, j));
    }
    let (n, k) = (family.n(), family.k());
    let count = gaussian_binomial(family.field().q() as u64, n, k + 1).unwrap_or(u128::MAX);
    if count > guard {
        return Err(FamilyError::GuardExceeded { count, guard });
    }
    if family.is_empty() {
        return Ok(AsResult {
            l: 0,
            witness: None,
        });
    }
    let field = family.field();
    let bases: Vec<Vec<Elem>> = family
        .members()
        .iter()
        .map(|s| s.basis().entries().to_vec())
        .collect();
    let mut best: Option<(usize, Subspace)> = None;
    let mut iter = enumerate_subspaces(field, n, k + 1);
    loop {
        let chunk: Vec<Subspace> = iter.by_ref().take(AS_CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        let hits: Vec<usize> = chunk
            .par_iter()
            .map(|v| members_met(field, v, &bases, k))
            .collect();
        for (h, v) in hits.into_iter().zip(chunk) {
            if best.as_ref().is_none_or(|(b, _)| h > *b) {
                best = Some((h, v));
            }
        }
    }
    let (l, witness) = best.expect("the Grassmannian is nonempty");
    Ok(AsResult {
        l,
        witness: Some(witness),
    })
}

/// Number of members (given by their `k x n` bases) meeting `v` non-trivially.
pub fn members_met(field: &Field, v: &Subspace, bases: &[Vec<Elem>], k: usize) -> usize {
    let n = v.n();
    // Rows of `dual` span V^⊥; x ∈ V iff dual·x = 0.
    let dual = v.basis().kernel_basis();
    let d = dual.rows();
    let mut scratch = vec![Elem::ZERO; d * k];
    bases
        .iter()
        .filter(|b| {
            for r in 0..d {
                let h = dual.row(r);
                for t in 0..k {
                    let row = &b[t * n..(t + 1) * n];
                    scratch[r * k + t] = h
                        .iter()
                        .zip(row)
                        .fold(Elem::ZERO, |acc, (&x, &y)| field.add(acc, field.mul(x, y)));
                }
            }
            // S ∩ V ≠ 0 iff the image of S's basis under V^⊥ loses rank.
            rref_in_place(field, &mut scratch, d, k).len() < k
        })
        .count()
}

/// Per-member data for the hot loops: pivots, free columns and the quotient map
/// `F_q^n → F_q^(n-k)` sending a vector to the free coordinates of its coset representative.
pub(crate) struct MemberData {
    q: u32,
    pub(crate) coset_count: u64,
    quotient: Vec<Vec<Vec<Elem>>>,
}

impl MemberData {
    pub(crate) fn build(family: &Family) -> MemberData {
        let q = family.field().q();
        let (n, k) = (family.n(), family.k());
        let quotient = family
            .members()
            .iter()
            .map(|s| {
                let free = s.free_columns();
                // image of each member of every other subspace is computed from the images of
                // the unit vectors
                (0..n)
                    .map(|c| {
                        let mut e = vec![Elem::ZERO; n];
                        e[c] = Elem::ONE;
                        let r = s.reduce(&e);
                        free.iter().map(|&fc| r[fc]).collect::<Vec<_>>()
                    })
                    .collect()
            })
            .collect();
        MemberData {
            q,
            coset_count: (q as u64).pow((n - k) as u32),
            quotient,
        }
    }

    /// Images of `S_j`'s basis rows in `F_q^n / S_i`, as a `k x (n-k)` row-major buffer.
    fn images(&self, family: &Family, i: usize, j: usize) -> Vec<Elem> {
        let f = family.field();
        let (n, k) = (family.n(), family.k());
        let w = n - k;
        let qmap = &self.quotient[i];
        let basis = family.members()[j].basis();
        let mut out = vec![Elem::ZERO; k * w];
        for t in 0..k {
            let row = basis.row(t);
            for (c, &x) in row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (o, &y) in out[t * w..(t + 1) * w].iter_mut().zip(&qmap[c]) {
                    *o = f.add(*o, f.mul(x, y));
                }
            }
        }
        out
    }

    /// Rank of `S_j` in the quotient by `S_i`; equals `k` iff the two meet trivially.
    pub(crate) fn quotient_rank(&self, family: &Family, i: usize, j: usize) -> usize {
        let k = family.k();
        let w = family.n() - k;
        let mut img = self.images(family, i, j);
        rref_in_place(family.field(), &mut img, k, w).len()
    }

    /// Calls `hit` with the coset index of `v + S_i` for every nonzero `v ∈ S_j`.
    pub(crate) fn for_each_coset_of_pair(
        &self,
        family: &Family,
        i: usize,
        j: usize,
        mut hit: impl FnMut(u64),
    ) {
        let f = family.field();
        let k = family.k();
        let w = family.n() - k;
        let img = self.images(family, i, j);
        let q = self.q;
        let mut coeffs = vec![0u32; k];
        let mut acc = vec![Elem::ZERO; w];
        while odometer(&mut coeffs, q) {
            acc.iter_mut().for_each(|a| *a = Elem::ZERO);
            for (t, &c) in coeffs.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let c = Elem::from_code(c);
                for (a, &y) in acc.iter_mut().zip(&img[t * w..(t + 1) * w]) {
                    *a = f.add(*a, f.mul(c, y));
                }
            }
            hit(acc.iter().fold(0u64, |x, e| x * q as u64 + e.code() as u64));
        }
    }
}

/// Which properties [`verify_family`] should compute.
#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub aad: bool,
    pub almost_sparse: bool,
    pub enumeration_guard: u128,
}

impl Default for VerifyOptions {
    fn default() -> VerifyOptions {
        VerifyOptions {
            aad: true,
            almost_sparse: true,
            enumeration_guard: DEFAULT_ENUMERATION_GUARD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AadEntry {
    pub value: usize,
    pub member: Option<usize>,
    pub rep: Option<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsEntry {
    pub value: usize,
    pub witness: Option<SubspaceJson>,
}

/// Exact parameters of a family together with the witnesses that realize them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub size: usize,
    pub is_partial_spread: bool,
    pub spread_witness: Option<(usize, usize)>,
    pub l_aad: Option<AadEntry>,
    pub l_as: Option<AsEntry>,
    pub bound_thm1: Option<u128>,
    pub bound_satisfied: Option<bool>,
}

pub fn verify_family(
    family: &Family,
    opts: &VerifyOptions,
) -> Result<VerificationReport, FamilyError> {
    let spread = check_partial_spread(family);
    let mut report = VerificationReport {
        size: family.len(),
        is_partial_spread: spread.is_partial_spread,
        spread_witness: spread.witness,
        l_aad: None,
        l_as: None,
        bound_thm1: None,
        bound_satisfied: None,
    };
    if !spread.is_partial_spread {
        return Ok(report);
    }
    if opts.aad {
        let aad = compute_l_aad(family)?;
        let bound = bound_theorem1(
            family.n(),
            family.k(),
            aad.l as u64,
            family.field().q() as u64,
        );
        report.bound_thm1 = Some(bound);
        report.bound_satisfied = Some(family.len() as u128 <= bound);
        report.l_aad = Some(AadEntry {
            value: aad.l,
            member: aad.witness.as_ref().map(|w| w.member),
            rep: aad
                .witness
                .map(|w| w.rep.iter().map(|e| e.code()).collect()),
        });
    }
    if opts.almost_sparse {
        let las = compute_l_as_with_guard(family, opts.enumeration_guard)?;
        report.l_as = Some(AsEntry {
            value: las.l,
            witness: las.witness.map(|w| w.to_json()),
        });
    }
    Ok(report)
}

/// Outcome of the relation checks between the two parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub holds: bool,
    pub diagnostics: Vec<String>,
}

/// `L_aad ≤ L_as - 1`, and for lines additionally `L_as ≤ L_aad + 1`.
pub fn check_relations(family: &Family, l_aad: usize, l_as: usize) -> RelationCheck {
    let mut diagnostics = Vec::new();
    if l_aad + 1 > l_as {
        diagnostics.push(format!(
            "L_aad = {l_aad} exceeds L_as - 1 = {}",
            l_as as i64 - 1
        ));
    }
    if family.k() == 1 && l_as > l_aad + 1 {
        diagnostics.push(format!(
            "k = 1 but L_as = {l_as} exceeds L_aad + 1 = {}",
            l_aad + 1
        ));
    }
    RelationCheck {
        holds: diagnostics.is_empty(),
        diagnostics,
    }
}

/// `|F| ≤ 1 + L (q^(n-k) - 1)/(q^k - 1)`.
pub fn verify_theorem1(family: &Family, l: usize) -> bool {
    family.len() as u128
        <= bound_theorem1(family.n(), family.k(), l as u64, family.field().q() as u64)
}
