// Branch and bound for the largest AAD family, compared with the closed-form bound.
use subspace_forge::search::{exhaustive_max_family, greedy_max_family, SearchConfig};
use subspace_forge::Field;

fn main() {
    for (n, k, l, p) in [
        (3usize, 1usize, 0usize, 2u64),
        (3, 1, 1, 2),
        (3, 1, 2, 2),
        (3, 1, 1, 3),
        (3, 1, 2, 3),
    ] {
        let f = Field::new(p, 1).unwrap();
        let cfg = SearchConfig::new(&f, n, k, l);
        let out = exhaustive_max_family(&cfg).unwrap();
        let greedy = greedy_max_family(&cfg, 7).unwrap();
        let cert = out.certificate(&cfg);
        println!(
            "n={n} k={k} L={l} q={p}: max {} (proven {}), bound {}, tight {}, greedy {}, {} nodes",
            cert.optimum, cert.proven, cert.bound, cert.tight, greedy.size, cert.nodes
        );
    }
}
