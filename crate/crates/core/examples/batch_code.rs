// The batch code of the four-line family: encode, plan disjoint recovery, verify all requests.
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subspace_forge::batch::{verify_batch, BatchCode, VerifyMode};
use subspace_forge::search::{exhaustive_max_family, SearchConfig};
use subspace_forge::Field;

fn main() {
    let f = Field::new(2, 1).unwrap();
    let family = exhaustive_max_family(&SearchConfig::new(&f, 3, 1, 1))
        .unwrap()
        .family;
    let code = BatchCode::new(&family).unwrap();
    println!(
        "K = {}, N = {}, L = {}, s = {}",
        code.info_len(),
        code.len(),
        code.l_aad(),
        code.batch_size()
    );

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x: Vec<bool> = (0..code.info_len()).map(|_| rng.gen()).collect();
    let y = code.encode(&x).unwrap();
    let requests = [5, 5, 5, 2];
    let plan = code
        .plan(&requests)
        .unwrap()
        .expect("four requests are always served");
    for (r, set) in requests.iter().zip(&plan) {
        println!(
            "x[{r}] = {} from {:?} via {:?}",
            set.decode(&y) as u8,
            set.positions,
            set.rule
        );
        assert_eq!(set.decode(&y), x[*r]);
    }

    for s in 1..=code.batch_size() + 1 {
        let v = verify_batch(&code, s, VerifyMode::Exhaustive).unwrap();
        println!(
            "s = {s}: {} multisets, all served {}, counterexample {:?}",
            v.checked, v.verified, v.counterexample
        );
    }
}
