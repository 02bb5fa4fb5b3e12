mod common;

use std::collections::HashSet;

use common::{brute_l_aad, codes, coset_points, field, meet_points, point_set, random_spread};
use subspace_forge::family::compute_l_as;
use subspace_forge::search::{exhaustive_max_family, greedy_max_family, SearchConfig};
use subspace_forge::{
    check_partial_spread, compute_l_aad, coset_hits, enumerate_subspaces, gaussian_binomial,
    verify_theorem1, AffineCoset,
};

#[test]
fn coset_hits_match_point_enumeration() {
    for seed in 0..40u64 {
        let q = [2u64, 3, 4][seed as usize % 3];
        let (n, k) = [(3, 1), (4, 1), (5, 2)][(seed / 3) as usize % 3];
        if q == 4 && n == 5 {
            continue;
        }
        let f = field(q);
        let fam = random_spread(&f, n, k, 6, seed);
        let sets: Vec<HashSet<Vec<u32>>> = fam.members().iter().map(point_set).collect();
        for (i, s) in fam.members().iter().enumerate() {
            for c in 1..s.coset_count() {
                let u = s.coset_rep_from_index(c);
                let pts: Vec<Vec<u32>> = coset_points(s, &u).iter().map(|p| codes(p)).collect();
                let slow = (0..fam.len())
                    .filter(|&j| j != i && pts.iter().any(|p| sets[j].contains(p)))
                    .count();
                assert_eq!(
                    coset_hits(&fam, i, &u).unwrap(),
                    slow,
                    "seed {seed} member {i} coset {c}"
                );
            }
        }
    }
}

#[test]
fn l_aad_matches_definition() {
    for seed in 0..30u64 {
        let q = [2u64, 3][seed as usize % 2];
        let n = [3, 4][(seed / 2) as usize % 2];
        let f = field(q);
        let fam = random_spread(&f, n, 1, 2 + seed as usize % 7, seed);
        let aad = compute_l_aad(&fam).unwrap();
        assert_eq!(aad.l, brute_l_aad(&fam), "seed {seed}");
        if let Some(w) = aad.witness {
            assert_eq!(coset_hits(&fam, w.member, &w.rep).unwrap(), aad.l);
        }
    }
    let f = field(2);
    let fam = random_spread(&f, 5, 2, 5, 1);
    assert_eq!(compute_l_aad(&fam).unwrap().l, brute_l_aad(&fam));
}

#[test]
fn l_as_matches_definition() {
    for seed in 0..20u64 {
        let q = [2u64, 3][seed as usize % 2];
        let (n, k) = [(3, 1), (4, 1), (5, 2)][(seed / 2) as usize % 3];
        if q == 3 && n == 5 {
            continue;
        }
        let f = field(q);
        let fam = random_spread(&f, n, k, 5, seed);
        let slow = enumerate_subspaces(&f, n, k + 1)
            .map(|v| fam.members().iter().filter(|s| meet_points(&v, s)).count())
            .max()
            .unwrap();
        let fast = compute_l_as(&fam).unwrap();
        assert_eq!(fast.l, slow, "seed {seed}");
        let w = fast.witness.unwrap();
        assert_eq!(
            fam.members().iter().filter(|s| meet_points(&w, s)).count(),
            slow
        );
    }
}

#[test]
fn spread_check_matches_point_enumeration() {
    let f = field(2);
    let all: Vec<_> = enumerate_subspaces(&f, 5, 2).collect();
    for start in (0..all.len()).step_by(31) {
        let members: Vec<_> = all
            .iter()
            .cycle()
            .skip(start)
            .step_by(17)
            .take(6)
            .cloned()
            .collect();
        let fam = subspace_forge::Family::new(&f, 5, 2, members).unwrap();
        let expected = (0..fam.len()).all(|i| {
            (i + 1..fam.len()).all(|j| !meet_points(&fam.members()[i], &fam.members()[j]))
        });
        let got = check_partial_spread(&fam);
        assert_eq!(got.is_partial_spread, expected);
        if let Some((i, j)) = got.witness {
            assert!(meet_points(&fam.members()[i], &fam.members()[j]));
        }
    }
}

#[test]
fn enumeration_matches_gaussian_binomials() {
    for q in [2u64, 3, 4, 5] {
        let f = field(q);
        for n in 1..=5 {
            for k in 1..=n.min(3) {
                let list: Vec<_> = enumerate_subspaces(&f, n, k).collect();
                let distinct: HashSet<_> = list.iter().cloned().collect();
                assert_eq!(distinct.len(), list.len());
                assert_eq!(
                    Some(list.len() as u128),
                    gaussian_binomial(q, n, k),
                    "q={q} n={n} k={k}"
                );
            }
        }
    }
    assert_eq!(gaussian_binomial(2, 3, 1), Some(7));
    assert_eq!(gaussian_binomial(5, 4, 2), Some(806));
    assert_eq!(gaussian_binomial(3, 13, 12), Some(797_161));
}

#[test]
fn canonical_coset_rep_is_lex_smallest() {
    let f = field(3);
    let fam = random_spread(&f, 4, 1, 4, 5);
    for s in fam.members() {
        for c in 0..s.coset_count() {
            let u = s.coset_rep_from_index(c);
            let smallest = coset_points(s, &u).iter().map(|p| codes(p)).min().unwrap();
            assert_eq!(
                codes(&AffineCoset::new(u.clone(), s.clone()).canonical_rep()),
                smallest
            );
            assert_eq!(s.coset_index(&u), c);
        }
    }
}

#[test]
fn searched_families_respect_the_bound() {
    for (n, k, q) in [(3usize, 1usize, 2u64), (3, 1, 3), (4, 1, 2), (5, 2, 2)] {
        let f = field(q);
        for l in 0..=3 {
            let mut cfg = SearchConfig::new(&f, n, k, l);
            cfg.node_budget = 50_000;
            for out in [
                exhaustive_max_family(&cfg).unwrap(),
                greedy_max_family(&cfg, l as u64).unwrap(),
            ] {
                let got = compute_l_aad(&out.family).unwrap().l;
                assert!(got <= l, "n={n} k={k} q={q} L={l}: family has L_aad {got}");
                assert!(check_partial_spread(&out.family).is_partial_spread);
                assert!(verify_theorem1(&out.family, got));
                assert!(out.size as u128 <= out.bound);
            }
        }
    }
}

#[test]
fn symmetry_breaking_keeps_the_optimum() {
    for q in [2u64, 3] {
        let f = field(q);
        let mut cfg = SearchConfig::new(&f, 3, 1, 1);
        let with = exhaustive_max_family(&cfg).unwrap();
        cfg.symmetry_break = false;
        let without = exhaustive_max_family(&cfg).unwrap();
        assert!(with.optimality_proven && without.optimality_proven);
        assert_eq!(with.size, without.size, "q={q}");
    }
}
