// The Reed-Solomon based construction: one k-subspace per codeword, checked exactly.
use subspace_forge::{
    build_rs_family, check_partial_spread, compute_l_aad, theorem3_l, Field, RsCode,
};

fn main() {
    for (n, k, p, m) in [
        (3usize, 1usize, 5u64, 1u32),
        (4, 1, 7, 1),
        (5, 2, 11, 1),
        (3, 1, 2, 3),
    ] {
        let f = Field::new(p, m).unwrap();
        let code = RsCode::new(&f, n, k).unwrap();
        let family = build_rs_family(&f, n, k).unwrap();
        let spread = check_partial_spread(&family);
        let aad = compute_l_aad(&family).unwrap();
        println!(
            "n={n} k={k} q={}: code [{}, {}], |F| = {}, partial spread {}, L_aad = {} (guarantee {})",
            f.q(),
            code.length(),
            code.dimension(),
            family.len(),
            spread.is_partial_spread,
            aad.l,
            theorem3_l(n, k).unwrap(),
        );
        if let Some(w) = aad.witness {
            let rep: Vec<u32> = w.rep.iter().map(|e| e.code()).collect();
            println!("  attained by the coset {rep:?} + S_{}", w.member);
        }
    }

    let too_small = Field::new(2, 1).unwrap();
    println!(
        "q=2, n=3: {}",
        build_rs_family(&too_small, 3, 1).unwrap_err()
    );
}
