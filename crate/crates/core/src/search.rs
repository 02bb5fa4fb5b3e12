//! Search for maximum-size AAD families at desk-scale parameters.
//!
//! The exhaustive mode is a depth-first branch and bound over all `k`-subspaces in canonical
//! order. A partial family is extended only while it stays a partial spread whose coset-hit
//! counters never exceed `L`; branches that cannot beat the incumbent are cut, and the search
//! stops as soon as the incumbent reaches the closed-form upper bound.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::bound_theorem1;
use crate::family::{Family, FamilyError, FamilyJson, MemberData};
use crate::gf::Field;
use crate::subspace::{enumerate_subspaces, gaussian_binomial};

/// Exhaustive search refuses Grassmannians larger than this.
pub const EXHAUSTIVE_SUBSPACE_LIMIT: u128 = 10_000;
/// Greedy search refuses Grassmannians larger than this.
pub const GREEDY_SUBSPACE_LIMIT: u128 = 200_000;
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("need 2k < n, got n={n}, k={k}")]
    Dimensions { n: usize, k: usize },
    #[error("{count} candidate subspaces exceed the search limit {limit}")]
    TooManySubspaces { count: u128, limit: u128 },
    #[error(transparent)]
    Family(#[from] FamilyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exhaustive,
    Greedy,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub field: Field,
    pub mode: SearchMode,
    pub node_budget: u64,
    /// Fix the first member to the smallest subspace in canonical order.
    pub symmetry_break: bool,
}

impl SearchConfig {
    pub fn new(field: &Field, n: usize, k: usize, l: usize) -> SearchConfig {
        SearchConfig {
            n,
            k,
            l,
            field: field.clone(),
            mode: SearchMode::Exhaustive,
            node_budget: DEFAULT_NODE_BUDGET,
            symmetry_break: true,
        }
    }

    fn bound(&self) -> u128 {
        bound_theorem1(self.n, self.k, self.l as u64, self.field.q() as u64)
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub size: usize,
    pub family: Family,
    pub optimality_proven: bool,
    pub nodes: u64,
    pub bound: u128,
}

/// Machine-readable record of a search run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchCertificate {
    pub n: usize,
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub q: u32,
    pub mode: SearchMode,
    #[serde(rename = "max")]
    pub optimum: usize,
    pub bound: u128,
    pub proven: bool,
    /// The optimum equals the closed-form upper bound.
    pub tight: bool,
    pub nodes: u64,
    pub family: FamilyJson,
}

impl SearchOutcome {
    pub fn certificate(&self, cfg: &SearchConfig) -> SearchCertificate {
        SearchCertificate {
            n: cfg.n,
            k: cfg.k,
            l: cfg.l,
            q: cfg.field.q(),
            mode: cfg.mode,
            optimum: self.size,
            bound: self.bound,
            proven: self.optimality_proven,
            tight: self.size as u128 == self.bound,
            nodes: self.nodes,
            family: self.family.to_json(),
        }
    }
}

/// All `k`-subspaces in canonical order with the per-member tables the verifiers use.
struct Pool {
    all: Family,
    data: MemberData,
}

impl Pool {
    fn build(cfg: &SearchConfig, limit: u128) -> Result<Pool, SearchError> {
        if cfg.k == 0 || 2 * cfg.k >= cfg.n {
            return Err(SearchError::Dimensions { n: cfg.n, k: cfg.k });
        }
        let count = gaussian_binomial(cfg.field.q() as u64, cfg.n, cfg.k).unwrap_or(u128::MAX);
        if count > limit {
            return Err(SearchError::TooManySubspaces { count, limit });
        }
        let members = enumerate_subspaces(&cfg.field, cfg.n, cfg.k).collect();
        let all = Family::new(&cfg.field, cfg.n, cfg.k, members)?;
        let data = MemberData::build(&all);
        Ok(Pool { all, data })
    }

    fn compatible(&self, a: usize, b: usize) -> bool {
        self.data.quotient_rank(&self.all, a, b) == self.all.k()
    }

    fn family_of(&self, chosen: &[usize]) -> Family {
        let mut idx = chosen.to_vec();
        idx.sort_unstable();
        let members = idx.iter().map(|&i| self.all.members()[i].clone()).collect();
        Family::new(self.all.field(), self.all.n(), self.all.k(), members)
            .expect("pool members are distinct")
    }
}

/// A growing family together with its coset-hit counters.
struct Partial<'a> {
    pool: &'a Pool,
    limit: u32,
    chosen: Vec<usize>,
    counts: Vec<Vec<u32>>,
}

impl<'a> Partial<'a> {
    fn new(pool: &'a Pool, l: usize) -> Partial<'a> {
        Partial {
            pool,
            limit: l as u32,
            chosen: Vec::new(),
            counts: Vec::new(),
        }
    }

    /// Adds `c` if every coset counter stays within `L`. The caller guarantees `c` meets
    /// every chosen member trivially.
    fn try_push(&mut self, c: usize) -> bool {
        let pool = self.pool;
        let limit = self.limit;
        let mut own = vec![0u32; pool.data.coset_count as usize];
        let mut ok = true;
        for (t, &i) in self.chosen.iter().enumerate() {
            let counts = &mut self.counts[t];
            pool.data.for_each_coset_of_pair(&pool.all, i, c, |idx| {
                counts[idx as usize] += 1;
                ok &= counts[idx as usize] <= limit;
            });
            pool.data.for_each_coset_of_pair(&pool.all, c, i, |idx| {
                own[idx as usize] += 1;
                ok &= own[idx as usize] <= limit;
            });
        }
        self.chosen.push(c);
        self.counts.push(own);
        if !ok {
            self.pop();
        }
        ok
    }

    fn pop(&mut self) {
        let pool = self.pool;
        let c = self.chosen.pop().expect("nonempty partial family");
        self.counts.pop();
        for (t, &i) in self.chosen.iter().enumerate() {
            let counts = &mut self.counts[t];
            pool.data
                .for_each_coset_of_pair(&pool.all, i, c, |idx| counts[idx as usize] -= 1);
        }
    }
}

struct Dfs<'a> {
    partial: Partial<'a>,
    best: Vec<usize>,
    bound: u128,
    nodes: u64,
    budget: u64,
    aborted: bool,
    done: bool,
}

impl Dfs<'_> {
    fn run(&mut self, candidates: &[usize]) {
        if self.partial.chosen.len() > self.best.len() {
            self.best = self.partial.chosen.clone();
            if self.best.len() as u128 >= self.bound {
                self.done = true;
                return;
            }
        }
        for (t, &c) in candidates.iter().enumerate() {
            if self.done || self.aborted {
                return;
            }
            if self.partial.chosen.len() + (candidates.len() - t) <= self.best.len() {
                return;
            }
            if self.nodes >= self.budget {
                self.aborted = true;
                return;
            }
            self.nodes += 1;
            if !self.partial.try_push(c) {
                continue;
            }
            let pool = self.partial.pool;
            let rest: Vec<usize> = candidates[t + 1..]
                .iter()
                .copied()
                .filter(|&d| pool.compatible(c, d))
                .collect();
            self.run(&rest);
            self.partial.pop();
        }
    }
}

/// Largest family of `k`-subspaces that is an `[n,k,L]_q`-AAD family, by branch and bound.
/// `optimality_proven` is false when the node budget ran out first.
pub fn exhaustive_max_family(cfg: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    let pool = Pool::build(cfg, EXHAUSTIVE_SUBSPACE_LIMIT)?;
    let total = pool.all.len();
    let bound = cfg.bound();
    let mut dfs = Dfs {
        partial: Partial::new(&pool, cfg.l),
        best: Vec::new(),
        bound,
        nodes: 0,
        budget: cfg.node_budget,
        aborted: false,
        done: false,
    };
    if cfg.symmetry_break {
        // The general linear group acts transitively on k-subspaces, so some optimum
        // contains the first one.
        dfs.nodes += 1;
        assert!(
            dfs.partial.try_push(0),
            "a single subspace is always feasible"
        );
        let rest: Vec<usize> = (1..total).filter(|&d| pool.compatible(0, d)).collect();
        dfs.run(&rest);
    } else {
        let all: Vec<usize> = (0..total).collect();
        dfs.run(&all);
    }
    let family = pool.family_of(&dfs.best);
    Ok(SearchOutcome {
        size: family.len(),
        family,
        optimality_proven: !dfs.aborted || dfs.done,
        nodes: dfs.nodes,
        bound,
    })
}

/// Randomized greedy insertion over a seeded shuffle of the canonical order.
pub fn greedy_max_family(cfg: &SearchConfig, seed: u64) -> Result<SearchOutcome, SearchError> {
    let pool = Pool::build(cfg, GREEDY_SUBSPACE_LIMIT)?;
    let mut order: Vec<usize> = (0..pool.all.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut partial = Partial::new(&pool, cfg.l);
    let mut nodes = 0;
    for c in order {
        nodes += 1;
        if partial.chosen.iter().all(|&i| pool.compatible(i, c)) {
            partial.try_push(c);
        }
    }
    let family = pool.family_of(&partial.chosen);
    let bound = cfg.bound();
    Ok(SearchOutcome {
        size: family.len(),
        optimality_proven: family.len() as u128 >= bound,
        family,
        nodes,
        bound,
    })
}

/// Runs the mode selected in `cfg`; `seed` only matters for greedy search.
pub fn run_search(cfg: &SearchConfig, seed: u64) -> Result<SearchOutcome, SearchError> {
    match cfg.mode {
        SearchMode::Exhaustive => exhaustive_max_family(cfg),
        SearchMode::Greedy => greedy_max_family(cfg, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{check_partial_spread, compute_l_aad};

    #[test]
    fn fano_plane_optimum_meets_the_bound() {
        let f2 = Field::new(2, 1).unwrap();
        let cfg = SearchConfig::new(&f2, 3, 1, 1);
        let out = exhaustive_max_family(&cfg).unwrap();
        assert_eq!(out.size, 4);
        assert!(out.optimality_proven);
        assert_eq!(out.bound, 4);
        assert!(out.certificate(&cfg).tight);
        assert!(compute_l_aad(&out.family).unwrap().l <= 1);
    }

    #[test]
    fn zero_l_allows_a_single_member() {
        let f2 = Field::new(2, 1).unwrap();
        let out = exhaustive_max_family(&SearchConfig::new(&f2, 3, 1, 0)).unwrap();
        assert_eq!(out.size, 1);
        assert!(out.optimality_proven);
    }

    #[test]
    fn symmetry_breaking_preserves_the_optimum() {
        for q in [2u64, 3] {
            let f = Field::new(q, 1).unwrap();
            let mut cfg = SearchConfig::new(&f, 3, 1, 1);
            let with = exhaustive_max_family(&cfg).unwrap();
            cfg.symmetry_break = false;
            let without = exhaustive_max_family(&cfg).unwrap();
            assert_eq!(with.size, without.size, "q={q}");
            assert!(with.optimality_proven && without.optimality_proven);
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let f3 = Field::new(3, 1).unwrap();
        let mut cfg = SearchConfig::new(&f3, 3, 1, 2);
        cfg.node_budget = 3;
        let out = exhaustive_max_family(&cfg).unwrap();
        assert!(!out.optimality_proven);
        assert!(out.size >= 1);
        assert!(compute_l_aad(&out.family).unwrap().l <= 2);
    }

    #[test]
    fn greedy_is_feasible_reproducible_and_not_above_optimum() {
        let f3 = Field::new(3, 1).unwrap();
        let cfg = SearchConfig {
            mode: SearchMode::Greedy,
            ..SearchConfig::new(&f3, 3, 1, 1)
        };
        let a = greedy_max_family(&cfg, 11).unwrap();
        let b = greedy_max_family(&cfg, 11).unwrap();
        assert_eq!(a.family, b.family);
        assert!(check_partial_spread(&a.family).is_partial_spread);
        assert!(compute_l_aad(&a.family).unwrap().l <= 1);
        let opt = exhaustive_max_family(&SearchConfig::new(&f3, 3, 1, 1)).unwrap();
        assert!(a.size <= opt.size);
    }

    #[test]
    fn limits_are_enforced() {
        let f5 = Field::new(5, 1).unwrap();
        let cfg = SearchConfig::new(&f5, 7, 1, 1);
        assert!(matches!(
            exhaustive_max_family(&cfg),
            Err(SearchError::TooManySubspaces { .. })
        ));
        assert!(matches!(
            exhaustive_max_family(&SearchConfig::new(&f5, 2, 1, 1)),
            Err(SearchError::Dimensions { .. })
        ));
    }
}
