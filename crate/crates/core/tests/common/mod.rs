#![allow(dead_code)]

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subspace_forge::{Elem, Family, Field, Matrix, Subspace};

pub fn field(q: u64) -> Field {
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).unwrap();
    let m = (1..).find(|&m| p.pow(m) == q).unwrap();
    Field::new(p, m).unwrap()
}

pub fn codes(v: &[Elem]) -> Vec<u32> {
    v.iter().map(|e| e.code()).collect()
}

pub fn random_vector(f: &Field, n: usize, rng: &mut ChaCha8Rng) -> Vec<Elem> {
    (0..n)
        .map(|_| f.elem(rng.gen_range(0..f.q() as u64)).unwrap())
        .collect()
}

pub fn random_subspace(f: &Field, n: usize, k: usize, rng: &mut ChaCha8Rng) -> Subspace {
    loop {
        let gens: Vec<Vec<Elem>> = (0..k).map(|_| random_vector(f, n, rng)).collect();
        if Matrix::from_rows(f, n, &gens).unwrap().rank() == k {
            return Subspace::from_generators(f, n, &gens).unwrap();
        }
    }
}

/// A random partial spread grown by rejection: members meeting an earlier one are skipped.
pub fn random_spread(f: &Field, n: usize, k: usize, size: usize, seed: u64) -> Family {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut members: Vec<Subspace> = Vec::new();
    let mut seen = HashSet::new();
    for _ in 0..size * 20 {
        if members.len() == size {
            break;
        }
        let s = random_subspace(f, n, k, &mut rng);
        if seen.contains(&s) || members.iter().any(|m| meet_points(m, &s)) {
            continue;
        }
        seen.insert(s.clone());
        members.push(s);
    }
    Family::new(f, n, k, members).unwrap()
}

/// Every point `sum_i c_i b_i` of the span of `basis`.
pub fn span_points(f: &Field, n: usize, basis: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    let q = f.q() as u64;
    let total = q.pow(basis.len() as u32);
    (0..total)
        .map(|mut idx| {
            let mut p = vec![f.elem(0).unwrap(); n];
            for b in basis {
                let c = f.elem(idx % q).unwrap();
                idx /= q;
                for (x, &y) in p.iter_mut().zip(b) {
                    *x = f.add(*x, f.mul(c, y));
                }
            }
            p
        })
        .collect()
}

pub fn point_set(s: &Subspace) -> HashSet<Vec<u32>> {
    span_points(s.field(), s.n(), &s.basis().row_vecs())
        .iter()
        .map(|p| codes(p))
        .collect()
}

/// Whether two subspaces share a nonzero point, by listing points.
pub fn meet_points(a: &Subspace, b: &Subspace) -> bool {
    let pa = point_set(a);
    point_set(b)
        .iter()
        .any(|p| p.iter().any(|&c| c != 0) && pa.contains(p))
}

/// Points of `u + S`.
pub fn coset_points(s: &Subspace, u: &[Elem]) -> Vec<Vec<Elem>> {
    let f = s.field();
    span_points(f, s.n(), &s.basis().row_vecs())
        .into_iter()
        .map(|p| p.iter().zip(u).map(|(&a, &b)| f.add(a, b)).collect())
        .collect()
}

/// L_aad from the definition: for every member and every vector outside it, count the other
/// members its coset meets.
pub fn brute_l_aad(fam: &Family) -> usize {
    let f = fam.field();
    let sets: Vec<HashSet<Vec<u32>>> = fam.members().iter().map(point_set).collect();
    let all = span_points(f, fam.n(), &identity_rows(f, fam.n()));
    let mut best = 0;
    for (i, s) in fam.members().iter().enumerate() {
        for u in &all {
            if sets[i].contains(&codes(u)) {
                continue;
            }
            let pts: Vec<Vec<u32>> = coset_points(s, u).iter().map(|p| codes(p)).collect();
            let hits = (0..fam.len())
                .filter(|&j| j != i && pts.iter().any(|p| sets[j].contains(p)))
                .count();
            best = best.max(hits);
        }
    }
    best
}

pub fn identity_rows(f: &Field, n: usize) -> Vec<Vec<Elem>> {
    (0..n)
        .map(|i| (0..n).map(|j| f.elem((i == j) as u64).unwrap()).collect())
        .collect()
}
