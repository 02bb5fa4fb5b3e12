// Arithmetic in GF(9): the chosen modulus, the primitive element and its powers.
use subspace_forge::Field;

fn main() {
    let f = Field::new(3, 2).unwrap();
    let spec = f.spec();
    println!(
        "GF({}) modulus (low degree first) {:?}, gamma = {}",
        f.q(),
        spec.modulus,
        f.gamma()
    );

    let powers: Vec<String> = (0..f.q() as i64 - 1)
        .map(|e| f.gamma_pow(e).to_string())
        .collect();
    println!("gamma^0..gamma^{}: {}", f.q() - 2, powers.join(" "));

    let a = f.elem(5).unwrap();
    let b = f.elem(7).unwrap();
    let inv = f.inv(a).unwrap();
    println!(
        "{a} + {b} = {}, {a} * {b} = {}, 1/{a} = {inv}",
        f.add(a, b),
        f.mul(a, b)
    );
    assert_eq!(f.mul(a, inv), f.elem(1).unwrap());
    assert!(f.inv(f.elem(0).unwrap()).is_err());

    for q in [2u64, 4, 5, 7, 8, 11, 13] {
        let (p, m) = subspace_forge::cli::prime_power(q).unwrap();
        let g = Field::new(p, m).unwrap();
        println!("q = {q:>2}: gamma = {}", g.gamma());
    }
}
