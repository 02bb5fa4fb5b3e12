//! Family builders (Reed-Solomon based, parity-check columns, random sampling with
//! pruning) and closed-form bound calculators.

use num_bigint::BigUint;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::family::{
    check_partial_spread, compute_l_as_with_guard, Family, FamilyError, DEFAULT_ENUMERATION_GUARD,
};
use crate::gf::{Elem, Field};
use crate::matgf::{MatError, Matrix};
use crate::subspace::{odometer, Subspace, SubspaceError};

/// Largest number of codewords or samples a builder will materialize.
pub const DEFAULT_BUILD_GUARD: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructionError {
    #[error("need 2k < n, got n={n}, k={k}")]
    Dimensions { n: usize, k: usize },
    #[error("q < nk: q={q}, nk={nk}")]
    FieldTooSmall { q: u32, nk: usize },
    #[error("index j={j} outside [1, {k}]")]
    IndexOutOfRange { j: usize, k: usize },
    #[error("codeword of length {got}, expected {expected}")]
    CodewordLength { got: usize, expected: usize },
    #[error("sample size q^({exponent}) rounds down to zero")]
    EmptySample { exponent: String },
    #[error("{what} = {count} exceeds the size guard {guard}")]
    TooLarge {
        what: &'static str,
        count: u128,
        guard: u128,
    },
    #[error("parity-check columns {start}..{end} are linearly dependent")]
    DependentColumns { start: usize, end: usize },
    #[error("parity-check matrix has {cols} columns, fewer than k={k}")]
    TooFewColumns { cols: usize, k: usize },
    #[error("pruning did not reach L_as <= {target} within {rounds} rounds (L_as = {reached})")]
    PruningExhausted {
        target: usize,
        rounds: usize,
        reached: usize,
        partial: Box<RandomFamily>,
    },
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
}

fn check_rs_params(field: &Field, n: usize, k: usize) -> Result<(), ConstructionError> {
    if k == 0 || 2 * k >= n {
        return Err(ConstructionError::Dimensions { n, k });
    }
    if (field.q() as usize) < n * k {
        return Err(ConstructionError::FieldTooSmall {
            q: field.q(),
            nk: n * k,
        });
    }
    Ok(())
}

/// The `[n-k-1, n-2k, k]_q` Reed-Solomon code behind the explicit construction.
///
/// Its parity-check matrix has `k-1` rows; row `t` (from 0) holds `gamma^((col-1) t)`. For
/// `k = 1` there are no parity checks and the code is all of `F_q^(n-2)`.
#[derive(Debug, Clone)]
pub struct RsCode {
    field: Field,
    n: usize,
    k: usize,
    parity_check: Matrix,
    generator: Matrix,
}

impl RsCode {
    pub fn new(field: &Field, n: usize, k: usize) -> Result<RsCode, ConstructionError> {
        check_rs_params(field, n, k)?;
        let len = n - k - 1;
        let mut parity_check = Matrix::zeros(field, k - 1, len);
        for t in 0..k - 1 {
            for col in 0..len {
                parity_check.set(t, col, field.gamma_pow((col * t) as i64));
            }
        }
        let generator = parity_check.kernel_basis();
        Ok(RsCode {
            field: field.clone(),
            n,
            k,
            parity_check,
            generator,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn length(&self) -> usize {
        self.n - self.k - 1
    }

    pub fn dimension(&self) -> usize {
        self.generator.rows()
    }

    pub fn parity_check(&self) -> &Matrix {
        &self.parity_check
    }

    /// Canonical (RREF) generator: the kernel basis of the parity-check matrix.
    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn codeword_count(&self) -> u128 {
        (self.field.q() as u128).pow(self.dimension() as u32)
    }

    /// `message · G`.
    pub fn encode(&self, message: &[Elem]) -> Vec<Elem> {
        let f = &self.field;
        let mut out = vec![Elem::ZERO; self.length()];
        for (r, &m) in message.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            for (o, &g) in out.iter_mut().zip(self.generator.row(r)) {
                *o = f.add(*o, f.mul(m, g));
            }
        }
        out
    }

    /// Every codeword, messages taken in lexicographic order.
    pub fn codewords(&self) -> Result<Vec<Vec<Elem>>, ConstructionError> {
        let count = self.codeword_count();
        if count > DEFAULT_BUILD_GUARD as u128 {
            return Err(ConstructionError::TooLarge {
                what: "codeword count",
                count,
                guard: DEFAULT_BUILD_GUARD as u128,
            });
        }
        let mut msg = vec![0u32; self.dimension()];
        let mut out = Vec::with_capacity(count as usize);
        loop {
            let m: Vec<Elem> = msg.iter().map(|&c| Elem::from_code(c)).collect();
            out.push(self.encode(&m));
            if !odometer(&mut msg, self.field.q()) {
                break;
            }
        }
        Ok(out)
    }

    fn check_index(&self, j: usize, x: &[Elem]) -> Result<(), ConstructionError> {
        if j == 0 || j > self.k {
            return Err(ConstructionError::IndexOutOfRange { j, k: self.k });
        }
        if x.len() != self.length() {
            return Err(ConstructionError::CodewordLength {
                got: x.len(),
                expected: self.length(),
            });
        }
        Ok(())
    }

    /// `Γ_j(x)`: entry `p` (from 1) is `gamma^(p(j-1)) x_p`.
    pub fn gamma_map(&self, j: usize, x: &[Elem]) -> Result<Vec<Elem>, ConstructionError> {
        self.check_index(j, x)?;
        let f = &self.field;
        Ok(x.iter()
            .enumerate()
            .map(|(i, &xp)| f.mul(f.gamma_pow(((i + 1) * (j - 1)) as i64), xp))
            .collect())
    }

    /// `h_j(x) = sum_p x_p^((j-1)(n-k-1) + p + 1)`.
    pub fn h_func(&self, j: usize, x: &[Elem]) -> Result<Elem, ConstructionError> {
        self.check_index(j, x)?;
        let f = &self.field;
        let len = self.length();
        Ok(x.iter().enumerate().fold(Elem::ZERO, |acc, (i, &xp)| {
            let e = (j - 1) * len + (i + 1) + 1;
            f.add(acc, f.pow(xp, e as u64))
        }))
    }

    /// Spanning vectors `(e_j | Γ_j(c) | h_j(c))`, `j = 1..k`, of the member built from `c`.
    pub fn member_generators(&self, c: &[Elem]) -> Result<Vec<Vec<Elem>>, ConstructionError> {
        (1..=self.k)
            .map(|j| {
                let mut v = vec![Elem::ZERO; self.k];
                v[j - 1] = Elem::ONE;
                v.extend(self.gamma_map(j, c)?);
                v.push(self.h_func(j, c)?);
                Ok(v)
            })
            .collect()
    }
}

/// Minimum Hamming weight over nonzero codewords.
pub fn min_weight(codewords: &[Vec<Elem>]) -> Option<usize> {
    codewords
        .iter()
        .map(|c| c.iter().filter(|e| !e.is_zero()).count())
        .filter(|&w| w > 0)
        .min()
}

/// The explicit Reed-Solomon family: `q^(n-2k)` members, one per codeword.
pub fn build_rs_family(field: &Field, n: usize, k: usize) -> Result<Family, ConstructionError> {
    let code = RsCode::new(field, n, k)?;
    let members = code
        .codewords()?
        .iter()
        .map(|c| {
            Ok(Subspace::from_generators(
                field,
                n,
                &code.member_generators(c)?,
            )?)
        })
        .collect::<Result<Vec<_>, ConstructionError>>()?;
    Ok(Family::new(field, n, k, members)?)
}

/// A `rows x nodes` Vandermonde matrix whose column for node `a` is `(1, a, a^2, ...)`.
pub fn vandermonde(field: &Field, rows: usize, nodes: &[Elem]) -> Matrix {
    let mut m = Matrix::zeros(field, rows, nodes.len());
    for (c, &a) in nodes.iter().enumerate() {
        for r in 0..rows {
            m.set(r, c, field.pow(a, r as u64));
        }
    }
    m
}

/// Members spanned by consecutive groups of `k` columns of a parity-check matrix,
/// living in `F_q^rows`. Trailing columns that do not fill a group are ignored.
pub fn build_code_based_family(h: &Matrix, k: usize) -> Result<Family, ConstructionError> {
    let n = h.rows();
    if k == 0 || 2 * k >= n {
        return Err(ConstructionError::Dimensions { n, k });
    }
    if h.cols() < k {
        return Err(ConstructionError::TooFewColumns { cols: h.cols(), k });
    }
    let members = (0..h.cols() / k)
        .map(|g| {
            let cols: Vec<Vec<Elem>> = (g * k..(g + 1) * k).map(|c| h.column(c)).collect();
            let s = Subspace::from_generators(h.field(), n, &cols)?;
            if s.k() < k {
                return Err(ConstructionError::DependentColumns {
                    start: g * k,
                    end: (g + 1) * k,
                });
            }
            Ok(s)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Family::new(h.field(), n, k, members)?)
}

/// `n - 2k - (n-k)(k+1)/(L+1)`.
pub fn random_lower_exponent(n: usize, k: usize, l: usize) -> Ratio<i64> {
    let (n, k, l) = (n as i64, k as i64, l as i64);
    Ratio::from_integer(n - 2 * k) - Ratio::new((n - k) * (k + 1), l + 1)
}

/// `floor(q^e)` for a rational exponent, exactly. Zero for negative exponents.
pub fn floor_rational_power(q: u64, e: Ratio<i64>) -> BigUint {
    if *e.numer() < 0 {
        return BigUint::from(0u32);
    }
    let num = *e.numer() as u32;
    let den = *e.denom() as u32;
    BigUint::from(q).pow(num).nth_root(den)
}

/// Parameters of the randomized almost-sparse construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomParams {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub seed: u64,
    pub max_rounds: usize,
}

/// Output of the randomized construction with its bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomFamily {
    pub family: Family,
    pub sampled: usize,
    pub removed_intersecting: usize,
    pub pruned: usize,
    pub l_as: usize,
}

/// Samples `M = floor(q^(n-2k-(n-k)(k+1)/(L+1)))` uniform `k`-subspaces, deletes one member
/// of every non-trivially intersecting pair, then deletes members met by an overfull
/// `(k+1)`-subspace until the almost-sparse parameter is at most `L`.
pub fn build_random_family(
    field: &Field,
    params: &RandomParams,
) -> Result<RandomFamily, ConstructionError> {
    let RandomParams {
        n,
        k,
        l,
        seed,
        max_rounds,
    } = *params;
    if k == 0 || 2 * k >= n {
        return Err(ConstructionError::Dimensions { n, k });
    }
    let exponent = random_lower_exponent(n, k, l);
    let m = floor_rational_power(field.q() as u64, exponent);
    if m == BigUint::from(0u32) {
        return Err(ConstructionError::EmptySample {
            exponent: exponent.to_string(),
        });
    }
    let sampled: usize = match u64::try_from(&m) {
        Ok(v) if v <= DEFAULT_BUILD_GUARD => v as usize,
        _ => {
            return Err(ConstructionError::TooLarge {
                what: "sample size",
                count: u128::try_from(&m).unwrap_or(u128::MAX),
                guard: DEFAULT_BUILD_GUARD as u128,
            })
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<Subspace> = (0..sampled)
        .map(|_| sample_subspace(field, n, k, &mut rng))
        .collect();

    let mut alive = vec![true; sampled];
    for i in 0..sampled {
        if !alive[i] {
            continue;
        }
        for j in i + 1..sampled {
            if alive[j] && !samples[i].trivially_intersects(&samples[j])? {
                alive[j] = false;
            }
        }
    }
    let members: Vec<Subspace> = samples
        .into_iter()
        .zip(&alive)
        .filter(|(_, &a)| a)
        .map(|(s, _)| s)
        .collect();
    let removed_intersecting = sampled - members.len();
    let mut family = Family::new(field, n, k, members)?;
    debug_assert!(check_partial_spread(&family).is_partial_spread);

    let mut pruned = 0;
    loop {
        let las = compute_l_as_with_guard(&family, DEFAULT_ENUMERATION_GUARD)?;
        if las.l <= l {
            return Ok(RandomFamily {
                family,
                sampled,
                removed_intersecting,
                pruned,
                l_as: las.l,
            });
        }
        if pruned == max_rounds {
            let partial = RandomFamily {
                family,
                sampled,
                removed_intersecting,
                pruned,
                l_as: las.l,
            };
            return Err(ConstructionError::PruningExhausted {
                target: l,
                rounds: max_rounds,
                reached: las.l,
                partial: Box::new(partial),
            });
        }
        let v = las.witness.expect("a nonempty family has a witness");
        let victim = (0..family.len())
            .rev()
            .find(|&i| !family.members()[i].trivially_intersects(&v).unwrap_or(true))
            .expect("the witness meets at least one member");
        family = family.without(victim);
        pruned += 1;
    }
}

/// Uniform `k`-subspace: a uniform `k x n` matrix conditioned on full rank, canonicalized.
/// Every subspace has the same number of bases, so rejection sampling is uniform.
fn sample_subspace(field: &Field, n: usize, k: usize, rng: &mut ChaCha8Rng) -> Subspace {
    let q = field.q();
    loop {
        let entries: Vec<Elem> = (0..n * k)
            .map(|_| Elem::from_code(rng.gen_range(0..q)))
            .collect();
        let m = Matrix::new(field, k, n, entries).expect("entries are in range");
        if m.rank() == k {
            return Subspace::from_matrix(&m).expect("full-rank matrix spans a subspace");
        }
    }
}

/// `floor(1 + L (q^(n-k) - 1)/(q^k - 1))`, the largest size compatible with an `[n,k,L]_q`
/// almost-affinely-disjoint family.
pub fn bound_theorem1(n: usize, k: usize, l: u64, q: u64) -> u128 {
    let (num, den) = bound_ratio(n, k, q);
    1 + (l as u128 * num) / den
}

/// Same bound without the partial-spread requirement: `floor(L (q^(n-k)-1)/(q^k-1)) + L + 1`.
pub fn bound_theorem1_no_spread(n: usize, k: usize, l: u64, q: u64) -> u128 {
    let (num, den) = bound_ratio(n, k, q);
    (l as u128 * num) / den + l as u128 + 1
}

fn bound_ratio(n: usize, k: usize, q: u64) -> (u128, u128) {
    let q = q as u128;
    (q.pow((n - k) as u32) - 1, q.pow(k as u32) - 1)
}

/// Guaranteed AAD parameter of the explicit construction, known for `k = 1, 2`.
pub fn theorem3_l(n: usize, k: usize) -> Option<u64> {
    let n = n as u64;
    match k {
        1 => Some(n - 1),
        2 => Some(1 + 2 * (n - 2) * (2 * n - 5)),
        _ => None,
    }
}

/// `log_q |F|` rounded to six decimals, as an exact rational.
pub fn growth_diagnostic(family: &Family) -> Option<Ratio<i64>> {
    if family.is_empty() {
        return None;
    }
    let x = (family.len() as f64).ln() / (family.field().q() as f64).ln();
    Some(Ratio::new((x * 1e6).round() as i64, 1_000_000))
}

/// Closed-form quantities for a parameter set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsTable {
    pub n: usize,
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub q: u64,
    pub thm1: u128,
    pub thm1_no_spread: u128,
    pub random_lower_exponent: String,
    pub random_sample_size: String,
    pub theorem3_l: Option<u64>,
}

pub fn bounds_table(
    n: usize,
    k: usize,
    l: usize,
    q: u64,
) -> Result<BoundsTable, ConstructionError> {
    if k == 0 || 2 * k >= n {
        return Err(ConstructionError::Dimensions { n, k });
    }
    let e = random_lower_exponent(n, k, l);
    Ok(BoundsTable {
        n,
        k,
        l,
        q,
        thm1: bound_theorem1(n, k, l as u64, q),
        thm1_no_spread: bound_theorem1_no_spread(n, k, l as u64, q),
        random_lower_exponent: e.to_string(),
        random_sample_size: floor_rational_power(q, e).to_string(),
        theorem3_l: theorem3_l(n, k),
    })
}
