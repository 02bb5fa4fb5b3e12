// Exact parameters of a hand-built family: the four lines of F_2^3 through e1, e2, e3, 111.
use subspace_forge::family::compute_l_as;
use subspace_forge::{
    check_relations, compute_l_aad, coset_hits, verify_family, Family, Field, Subspace,
    VerifyOptions,
};

fn main() {
    let f = Field::new(2, 1).unwrap();
    let line = |codes: [u64; 3]| {
        let v = codes.iter().map(|&c| f.elem(c).unwrap()).collect();
        Subspace::from_generators(&f, 3, &[v]).unwrap()
    };
    let family = Family::new(
        &f,
        3,
        1,
        vec![
            line([1, 0, 0]),
            line([0, 1, 0]),
            line([0, 0, 1]),
            line([1, 1, 1]),
        ],
    )
    .unwrap();

    let u: Vec<_> = [0u64, 1, 1].iter().map(|&c| f.elem(c).unwrap()).collect();
    println!(
        "(0,1,1) + S_0 meets {} other members",
        coset_hits(&family, 0, &u).unwrap()
    );

    let aad = compute_l_aad(&family).unwrap();
    let las = compute_l_as(&family).unwrap();
    println!("L_aad = {}, L_as = {}", aad.l, las.l);
    println!("relations: {:?}", check_relations(&family, aad.l, las.l));

    let report = verify_family(&family, &VerifyOptions::default()).unwrap();
    println!("{}", serde_json::to_string_pretty(&report).unwrap());

    let text = serde_json::to_string(&family.to_json()).unwrap();
    let back = Family::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back, family);
}
