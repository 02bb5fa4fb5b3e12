// Closed-form bounds for a few parameter sets.
use subspace_forge::constructions::bounds_table;

fn main() {
    println!(
        "{:>2} {:>2} {:>3} {:>3} {:>8} {:>10} {:>10} {:>8} {:>6}",
        "n", "k", "L", "q", "thm1", "no-spread", "exponent", "M", "thm3"
    );
    for (n, k, l, q) in [
        (3, 1, 1, 2),
        (3, 1, 1, 5),
        (5, 1, 7, 5),
        (5, 2, 31, 11),
        (7, 3, 5, 23),
        (6, 2, 3, 4),
    ] {
        let t = bounds_table(n, k, l, q).unwrap();
        let thm3 = t.theorem3_l.map_or("-".to_string(), |v| v.to_string());
        println!(
            "{:>2} {:>2} {:>3} {:>3} {:>8} {:>10} {:>10} {:>8} {:>6}",
            t.n,
            t.k,
            t.l,
            t.q,
            t.thm1,
            t.thm1_no_spread,
            t.random_lower_exponent,
            t.random_sample_size,
            thm3
        );
    }
}
