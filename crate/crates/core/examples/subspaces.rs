// Grassmannian enumeration, canonical bases and affine cosets.
use subspace_forge::{enumerate_subspaces, gaussian_binomial, AffineCoset, Field, Subspace};

fn main() {
    let f2 = Field::new(2, 1).unwrap();
    println!("lines of F_2^3:");
    for s in enumerate_subspaces(&f2, 3, 1) {
        println!(
            "  {:?}",
            s.basis().row_vecs()[0]
                .iter()
                .map(|e| e.code())
                .collect::<Vec<_>>()
        );
    }

    let f5 = Field::new(5, 1).unwrap();
    let planes = enumerate_subspaces(&f5, 4, 2).count();
    println!(
        "planes of F_5^4: {planes} (Gaussian binomial {:?})",
        gaussian_binomial(5, 4, 2)
    );

    let v = |codes: &[u64]| {
        codes
            .iter()
            .map(|&c| f5.elem(c).unwrap())
            .collect::<Vec<_>>()
    };
    let a = Subspace::from_generators(&f5, 4, &[v(&[1, 2, 0, 0]), v(&[0, 0, 1, 3])]).unwrap();
    let b = Subspace::from_generators(&f5, 4, &[v(&[2, 4, 1, 3]), v(&[0, 0, 2, 1])]).unwrap();
    println!("same plane from different generators: {}", a == b);

    let u = v(&[3, 1, 4, 1]);
    let coset = AffineCoset::new(u.clone(), a.clone());
    let rep: Vec<u32> = coset.canonical_rep().iter().map(|e| e.code()).collect();
    println!(
        "coset of (3,1,4,1): canonical rep {rep:?}, index {} of {}",
        a.coset_index(&u),
        a.coset_count()
    );
    assert_eq!(coset.points().len(), 25);
}
