// The seeded randomized construction: sample, drop intersecting pairs, prune to L_as <= L.
use subspace_forge::constructions::random_lower_exponent;
use subspace_forge::{
    build_random_family, check_partial_spread, compute_l_aad, Field, RandomParams,
};

fn main() {
    let f = Field::new(5, 1).unwrap();
    for seed in 0..4 {
        let params = RandomParams {
            n: 5,
            k: 1,
            l: 7,
            seed,
            max_rounds: 1000,
        };
        let r = build_random_family(&f, &params).unwrap();
        println!(
            "seed {seed}: sampled {} (q^{}), removed {} intersecting, pruned {}, |F| = {}, L_as = {}, L_aad = {}, spread {}",
            r.sampled,
            random_lower_exponent(5, 1, 7),
            r.removed_intersecting,
            r.pruned,
            r.family.len(),
            r.l_as,
            compute_l_aad(&r.family).unwrap().l,
            check_partial_spread(&r.family).is_partial_spread,
        );
    }

    let tight = RandomParams {
        n: 5,
        k: 1,
        l: 1,
        seed: 0,
        max_rounds: 0,
    };
    match build_random_family(&f, &tight) {
        Ok(r) => println!("L = 1 reached without pruning: |F| = {}", r.family.len()),
        Err(e) => println!("L = 1 with no pruning rounds: {e}"),
    }
}
