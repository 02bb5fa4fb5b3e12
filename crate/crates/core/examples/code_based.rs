// Members from consecutive columns of a parity-check matrix; distance 3k+1 forces L = 1.
use subspace_forge::constructions::{min_weight, vandermonde};
use subspace_forge::{build_code_based_family, compute_l_aad, Field};

fn main() {
    for p in [5u64, 7] {
        let f = Field::new(p, 1).unwrap();
        let nodes: Vec<_> = f.elements().collect();
        let h = vandermonde(&f, 3, &nodes);
        let family = build_code_based_family(&h, 1).unwrap();
        println!(
            "q = {p}: 3 x {} Vandermonde, |F| = {}, L_aad = {}",
            h.cols(),
            family.len(),
            compute_l_aad(&family).unwrap().l
        );
    }

    // Columns are the points; any three are independent, so the kernel code has distance 4.
    let f = Field::new(5, 1).unwrap();
    let nodes: Vec<_> = f.elements().collect();
    let h = vandermonde(&f, 3, &nodes);
    let code: Vec<_> = subspace_forge::subspace::vectors(&f, h.cols())
        .filter(|c| h.mul_vec(c).unwrap().iter().all(|e| e.is_zero()))
        .collect();
    println!(
        "kernel of H over F_5: {} codewords, minimum weight {:?}",
        code.len(),
        min_weight(&code)
    );
}
