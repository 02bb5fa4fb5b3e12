//! Systematic primitive batch codes built from an AAD family.
//!
//! Information bits sit on the `q^n` points of `F_q^n` (in lexicographic order). Every coset
//! `v + S` of every member `S` gets one parity bit, the XOR of the information bits on it.
//! A requested bit `x_u` can be read directly or recovered from the parity of `u + S` together
//! with the other information bits of that coset.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::family::{compute_l_aad, Family, FamilyError};
use crate::subspace::{vector_from_index, vector_index};

/// Largest number of information bits a batch code will lay out.
pub const MAX_INFO_BITS: u64 = 1 << 20;
/// Largest number of request multisets checked in exhaustive verification.
pub const MAX_EXHAUSTIVE_REQUESTS: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BatchError {
    #[error("{what} = {count} exceeds the limit {limit}")]
    TooLarge {
        what: &'static str,
        count: u128,
        limit: u128,
    },
    #[error("input has {got} bits, expected {expected}")]
    Length { got: usize, expected: usize },
    #[error("information index {index} out of range (K = {k})")]
    Index { index: usize, k: usize },
    #[error("request multisets must have size at least 1")]
    EmptyRequest,
    #[error(transparent)]
    Family(#[from] FamilyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase")]
pub enum Rule {
    /// Read the information bit itself.
    Direct,
    /// XOR the parity of the coset through the requested point with the coset's other bits.
    Parity { member: usize },
}

/// Positions whose XOR reproduces a requested information bit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoverySet {
    pub rule: Rule,
    pub positions: Vec<usize>,
}

impl RecoverySet {
    pub fn decode(&self, codeword: &[bool]) -> bool {
        self.positions
            .iter()
            .fold(false, |acc, &p| acc ^ codeword[p])
    }
}

#[derive(Debug, Clone)]
pub struct BatchCode {
    family: Family,
    l_aad: usize,
    info_len: usize,
    cosets_per_member: usize,
    /// `coset_of[i][x]`: coset index of point `x` with respect to member `i`.
    coset_of: Vec<Vec<u32>>,
    /// `coset_points[i][c]`: information positions on coset `c` of member `i`.
    coset_points: Vec<Vec<Vec<usize>>>,
}

impl BatchCode {
    /// Lays out the code; the family must be a partial spread.
    pub fn new(family: &Family) -> Result<BatchCode, BatchError> {
        let l_aad = compute_l_aad(family)?.l;
        let q = family.field().q() as u64;
        let info = (q as u128).pow(family.n() as u32);
        if info > MAX_INFO_BITS as u128 {
            return Err(BatchError::TooLarge {
                what: "information length q^n",
                count: info,
                limit: MAX_INFO_BITS as u128,
            });
        }
        let info_len = info as usize;
        let cosets_per_member = q.pow((family.n() - family.k()) as u32) as usize;
        let mut coset_of = Vec::with_capacity(family.len());
        let mut coset_points = Vec::with_capacity(family.len());
        for s in family.members() {
            let mut of = Vec::with_capacity(info_len);
            let mut pts = vec![Vec::new(); cosets_per_member];
            for x in 0..info_len {
                let c = s.coset_index(&vector_from_index(q, family.n(), x as u64)) as usize;
                of.push(c as u32);
                pts[c].push(x);
            }
            coset_of.push(of);
            coset_points.push(pts);
        }
        Ok(BatchCode {
            family: family.clone(),
            l_aad,
            info_len,
            cosets_per_member,
            coset_of,
            coset_points,
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn l_aad(&self) -> usize {
        self.l_aad
    }

    /// `K = q^n`.
    pub fn info_len(&self) -> usize {
        self.info_len
    }

    /// `N = q^n + |F| q^(n-k)`.
    pub fn len(&self) -> usize {
        self.info_len + self.parity_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn parity_count(&self) -> usize {
        self.family.len() * self.cosets_per_member
    }

    /// `floor(|F| / L)`; a family with `L = 0` is treated as `L = 1`.
    pub fn batch_size(&self) -> usize {
        self.family.len() / self.l_aad.max(1)
    }

    pub fn parity_position(&self, member: usize, coset: usize) -> usize {
        self.info_len + member * self.cosets_per_member + coset
    }

    pub fn encode(&self, x: &[bool]) -> Result<Vec<bool>, BatchError> {
        if x.len() != self.info_len {
            return Err(BatchError::Length {
                got: x.len(),
                expected: self.info_len,
            });
        }
        let mut y = Vec::with_capacity(self.len());
        y.extend_from_slice(x);
        for pts in &self.coset_points {
            for coset in pts {
                y.push(coset.iter().fold(false, |acc, &p| acc ^ x[p]));
            }
        }
        Ok(y)
    }

    /// The singleton `{idx}` followed by one parity-based set per member.
    pub fn recovery_sets_for(&self, idx: usize) -> Result<Vec<RecoverySet>, BatchError> {
        if idx >= self.info_len {
            return Err(BatchError::Index {
                index: idx,
                k: self.info_len,
            });
        }
        let mut out = Vec::with_capacity(1 + self.family.len());
        out.push(RecoverySet {
            rule: Rule::Direct,
            positions: vec![idx],
        });
        for member in 0..self.family.len() {
            let c = self.coset_of[member][idx] as usize;
            let mut positions: Vec<usize> = self.coset_points[member][c]
                .iter()
                .copied()
                .filter(|&p| p != idx)
                .collect();
            positions.push(self.parity_position(member, c));
            out.push(RecoverySet {
                rule: Rule::Parity { member },
                positions,
            });
        }
        Ok(out)
    }

    /// Pairwise disjoint recovery sets serving every request (with multiplicity), if any exist.
    pub fn plan(&self, requests: &[usize]) -> Result<Option<Vec<RecoverySet>>, BatchError> {
        let candidates = requests
            .iter()
            .map(|&r| self.recovery_sets_for(r))
            .collect::<Result<Vec<_>, _>>()?;
        let mut used = vec![false; self.len()];
        let mut choice = Vec::with_capacity(requests.len());
        Ok(assign(&candidates, 0, &mut used, &mut choice).then(|| {
            choice
                .iter()
                .zip(&candidates)
                .map(|(&c, cands)| cands[c].clone())
                .collect()
        }))
    }

    pub fn layout(&self) -> BatchLayout {
        let q = self.family.field().q() as u64;
        let n = self.family.n();
        let mut parities = Vec::with_capacity(self.parity_count());
        for (member, s) in self.family.members().iter().enumerate() {
            for c in 0..self.cosets_per_member {
                parities.push(ParityEntry {
                    position: self.parity_position(member, c),
                    member,
                    rep: s
                        .coset_rep_from_index(c as u64)
                        .iter()
                        .map(|e| e.code())
                        .collect(),
                });
            }
        }
        BatchLayout {
            q: q as u32,
            n,
            k: self.family.k(),
            info_len: self.info_len,
            len: self.len(),
            l_aad: self.l_aad,
            s: self.batch_size(),
            info_positions: (0..self.info_len)
                .map(|x| {
                    vector_from_index(q, n, x as u64)
                        .iter()
                        .map(|e| e.code())
                        .collect()
                })
                .collect(),
            parities,
        }
    }
}

fn assign(
    cands: &[Vec<RecoverySet>],
    t: usize,
    used: &mut [bool],
    choice: &mut Vec<usize>,
) -> bool {
    if t == cands.len() {
        return true;
    }
    for (ci, set) in cands[t].iter().enumerate() {
        if set.positions.iter().any(|&p| used[p]) {
            continue;
        }
        set.positions.iter().for_each(|&p| used[p] = true);
        choice.push(ci);
        if assign(cands, t + 1, used, choice) {
            return true;
        }
        choice.pop();
        set.positions.iter().for_each(|&p| used[p] = false);
    }
    false
}

/// Position map of a batch code. Parities are ordered by member index, then by the
/// lexicographic order of the coset's canonical representative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchLayout {
    pub q: u32,
    pub n: usize,
    pub k: usize,
    #[serde(rename = "K")]
    pub info_len: usize,
    #[serde(rename = "N")]
    pub len: usize,
    #[serde(rename = "L")]
    pub l_aad: usize,
    pub s: usize,
    /// Point of `F_q^n` carried by information position `i`.
    pub info_positions: Vec<Vec<u32>>,
    pub parities: Vec<ParityEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityEntry {
    pub position: usize,
    pub member: usize,
    pub rep: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    Exhaustive,
    Sampled { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchVerification {
    pub s: usize,
    pub verified: bool,
    pub checked: u64,
    pub counterexample: Option<Vec<usize>>,
}

/// `C(a, b)` without overflow for the sizes used here; `None` if it overflows.
fn binomial(a: u128, b: u128) -> Option<u128> {
    let mut r: u128 = 1;
    for i in 0..b {
        r = r.checked_mul(a - i)? / (i + 1);
    }
    Some(r)
}

/// Checks that every multiset of `s` requested positions admits disjoint recovery sets.
pub fn verify_batch(
    code: &BatchCode,
    s: usize,
    mode: VerifyMode,
) -> Result<BatchVerification, BatchError> {
    if s == 0 {
        return Err(BatchError::EmptyRequest);
    }
    let k = code.info_len();
    let requests: Vec<Vec<usize>> = match mode {
        VerifyMode::Exhaustive => {
            let count = binomial((k + s - 1) as u128, s as u128).unwrap_or(u128::MAX);
            if count > MAX_EXHAUSTIVE_REQUESTS {
                return Err(BatchError::TooLarge {
                    what: "request multisets",
                    count,
                    limit: MAX_EXHAUSTIVE_REQUESTS,
                });
            }
            multisets(k, s)
        }
        VerifyMode::Sampled { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..trials)
                .map(|_| {
                    let mut r: Vec<usize> = (0..s).map(|_| rng.gen_range(0..k)).collect();
                    r.sort_unstable();
                    r
                })
                .collect()
        }
    };
    let failure = requests
        .par_iter()
        .position_first(|r| !matches!(code.plan(r), Ok(Some(_))));
    Ok(BatchVerification {
        s,
        verified: failure.is_none(),
        checked: requests.len() as u64,
        counterexample: failure.map(|i| requests[i].clone()),
    })
}

/// All non-decreasing sequences of length `s` over `0..k`, lexicographically.
fn multisets(k: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; s];
    loop {
        out.push(cur.clone());
        let Some(i) = (0..s).rev().find(|&i| cur[i] + 1 < k) else {
            return out;
        };
        let v = cur[i] + 1;
        cur[i..].iter_mut().for_each(|c| *c = v);
    }
}

/// Information position of a point of `F_q^n`.
pub fn info_position(q: u32, point: &[crate::gf::Elem]) -> usize {
    vector_index(q, point) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{Elem, Field};
    use crate::subspace::Subspace;

    fn four_lines() -> Family {
        let f = Field::new(2, 1).unwrap();
        let members = [[1u32, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]]
            .iter()
            .map(|c| {
                let v: Vec<Elem> = c.iter().map(|&x| f.elem(x as u64).unwrap()).collect();
                Subspace::from_generators(&f, 3, &[v]).unwrap()
            })
            .collect();
        Family::new(&f, 3, 1, members).unwrap()
    }

    #[test]
    fn lengths_follow_the_formula() {
        let code = BatchCode::new(&four_lines()).unwrap();
        assert_eq!(code.info_len(), 8);
        assert_eq!(code.len(), 24);
        assert_eq!(code.l_aad(), 1);
        assert_eq!(code.batch_size(), 4);
    }

    #[test]
    fn zero_input_encodes_to_zero() {
        let code = BatchCode::new(&four_lines()).unwrap();
        assert!(code.encode(&[false; 8]).unwrap().iter().all(|&b| !b));
        assert!(matches!(
            code.encode(&[false; 7]),
            Err(BatchError::Length { .. })
        ));
    }

    #[test]
    fn single_bit_flips_one_parity_per_member() {
        let code = BatchCode::new(&four_lines()).unwrap();
        for i in 0..8 {
            let mut x = [false; 8];
            x[i] = true;
            let y = code.encode(&x).unwrap();
            assert_eq!(y[8..].iter().filter(|&&b| b).count(), 4);
        }
    }

    #[test]
    fn recovery_sets_through_the_origin() {
        let code = BatchCode::new(&four_lines()).unwrap();
        let sets = code.recovery_sets_for(0).unwrap();
        assert_eq!(sets.len(), 5);
        assert_eq!(sets[0].positions, vec![0]);
        for s in &sets[1..] {
            assert_eq!(s.positions.len(), 2);
        }
        for a in 1..5 {
            for b in a + 1..5 {
                assert!(sets[a]
                    .positions
                    .iter()
                    .all(|p| !sets[b].positions.contains(p)));
            }
        }
        assert!(code.recovery_sets_for(8).is_err());
    }

    #[test]
    fn layout_orders_parities() {
        let code = BatchCode::new(&four_lines()).unwrap();
        let layout = code.layout();
        assert_eq!(layout.parities.len(), 16);
        assert_eq!(layout.parities[0].position, 8);
        assert_eq!(layout.parities[0].rep, vec![0, 0, 0]);
        // member 0 is span(e_1): representatives vanish on the first coordinate
        assert_eq!(layout.parities[3].rep, vec![0, 1, 1]);
        assert_eq!(layout.info_positions[5], vec![1, 0, 1]);
    }

    #[test]
    fn multiset_enumeration() {
        assert_eq!(multisets(8, 4).len(), 330);
        assert_eq!(
            multisets(3, 2),
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![0, 2],
                vec![1, 1],
                vec![1, 2],
                vec![2, 2]
            ]
        );
        assert_eq!(binomial(11, 4), Some(330));
    }

    #[test]
    fn singleton_requests_always_succeed() {
        let code = BatchCode::new(&four_lines()).unwrap();
        let v = verify_batch(&code, 1, VerifyMode::Exhaustive).unwrap();
        assert!(v.verified);
        assert_eq!(v.checked, 8);
        assert_eq!(
            verify_batch(&code, 0, VerifyMode::Exhaustive),
            Err(BatchError::EmptyRequest)
        );
    }

    #[test]
    fn oversubscribed_requests_fail() {
        // Six copies of one bit need six disjoint sets, but only 1 + |F| = 5 exist.
        let code = BatchCode::new(&four_lines()).unwrap();
        assert_eq!(code.plan(&[3; 6]).unwrap(), None);
        assert!(code.plan(&[3; 5]).unwrap().is_some());
    }
}
