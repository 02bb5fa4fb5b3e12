mod common;

use common::{field, meet_points, random_spread, random_subspace};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use subspace_forge::batch::{verify_batch, BatchCode, VerifyMode};
use subspace_forge::family::compute_l_as;
use subspace_forge::{compute_l_aad, Field, Matrix, Subspace};

fn small_field() -> impl Strategy<Value = Field> {
    prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9]).prop_map(field)
}

fn matrix() -> impl Strategy<Value = Matrix> {
    (small_field(), 1usize..5, 1usize..6).prop_flat_map(|(f, r, c)| {
        prop::collection::vec(0..f.q(), r * c)
            .prop_map(move |codes| Matrix::from_codes(&f, r, c, &codes).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms(q in prop::sample::select(vec![2u64, 3, 4, 8, 9, 25, 27, 49]), a: u64, b: u64, c: u64) {
        let f = field(q);
        let [a, b, c] = [a, b, c].map(|x| f.elem(x % q).unwrap());
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), f.elem(0).unwrap());
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.elem(1).unwrap());
            prop_assert_eq!(f.pow(a, q - 1), f.elem(1).unwrap());
        }
    }

    #[test]
    fn rref_is_idempotent(m in matrix()) {
        let once = m.rref();
        let twice = once.matrix.rref();
        prop_assert_eq!(&once.matrix, &twice.matrix);
        prop_assert_eq!(once.rank, twice.rank);
    }

    #[test]
    fn rank_nullity(m in matrix()) {
        let kernel = m.kernel_basis();
        prop_assert_eq!(m.rank() + kernel.rows(), m.cols());
        prop_assert_eq!(m.rank(), m.transpose().rank());
        for v in kernel.row_vecs() {
            prop_assert!(m.mul_vec(&v).unwrap().iter().all(|e| e.is_zero()));
        }
    }

    #[test]
    fn dimension_formula(seed: u64, q in prop::sample::select(vec![2u64, 3, 4, 5]), n in 2usize..6) {
        let f = field(q);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_subspace(&f, n, 1 + seed as usize % (n - 1), &mut rng);
        let b = random_subspace(&f, n, 1 + (seed / 7) as usize % (n - 1), &mut rng);
        let sum = a.sum(&b).unwrap();
        let meet = a.intersection(&b).unwrap().map_or(0, |s| s.k());
        prop_assert_eq!(sum.k() + meet, a.k() + b.k());
    }

    #[test]
    fn basis_change_keeps_the_subspace(seed: u64, q in prop::sample::select(vec![2u64, 3, 5, 8]), n in 2usize..6) {
        let f = field(q);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = 1 + seed as usize % (n - 1);
        let s = random_subspace(&f, n, k, &mut rng);
        let g = random_subspace(&f, k, k, &mut rng);
        // g spans F_q^k, so its basis is an invertible k x k change of basis.
        let mixed = g.basis().mul(s.basis()).unwrap();
        let t = Subspace::from_matrix(&mixed).unwrap();
        prop_assert_eq!(&t, &s);
        prop_assert_eq!(t.basis(), s.basis());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn trivial_intersection_iff_zero_meet(seed: u64, q in prop::sample::select(vec![2u64, 3, 4]), n in 3usize..6) {
        let f = field(q);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = 1 + seed as usize % (n / 2);
        let a = random_subspace(&f, n, k, &mut rng);
        let b = random_subspace(&f, n, k, &mut rng);
        let trivial = a.trivially_intersects(&b).unwrap();
        prop_assert_eq!(trivial, a.intersection(&b).unwrap().is_none());
        if n <= 4 {
            prop_assert_eq!(trivial, !meet_points(&a, &b));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn removing_members_never_raises_parameters(seed: u64, q in prop::sample::select(vec![2u64, 3]), drop in 0usize..8) {
        let f = field(q);
        let fam = random_spread(&f, 4, 1, 8, seed);
        let smaller = fam.without(drop % fam.len());
        prop_assert!(compute_l_aad(&smaller).unwrap().l <= compute_l_aad(&fam).unwrap().l);
        prop_assert!(compute_l_as(&smaller).unwrap().l <= compute_l_as(&fam).unwrap().l);
    }

    #[test]
    fn l_aad_is_below_l_as(seed: u64, q in prop::sample::select(vec![2u64, 3]), size in 1usize..9) {
        let f = field(q);
        let fam = random_spread(&f, 5, 2, size, seed);
        prop_assert!(compute_l_aad(&fam).unwrap().l < compute_l_as(&fam).unwrap().l);
    }
}

fn four_lines() -> BatchCode {
    let f = field(2);
    let fam = subspace_forge::search::exhaustive_max_family(
        &subspace_forge::search::SearchConfig::new(&f, 3, 1, 1),
    )
    .unwrap()
    .family;
    BatchCode::new(&fam).unwrap()
}

#[test]
fn batch_recovery_sets_decode() {
    use rand::Rng;
    let code = four_lines();
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    for _ in 0..1000 {
        let x: Vec<bool> = (0..code.info_len()).map(|_| rng.gen()).collect();
        let y = code.encode(&x).unwrap();
        assert_eq!(&y[..code.info_len()], &x[..]);
        for (i, &bit) in x.iter().enumerate() {
            for set in code.recovery_sets_for(i).unwrap() {
                assert_eq!(set.decode(&y), bit);
            }
        }
    }
}

#[test]
fn batch_verification_is_monotone() {
    let code = four_lines();
    let mut previous = true;
    for s in 1..=6 {
        let v = verify_batch(&code, s, VerifyMode::Exhaustive).unwrap();
        assert!(
            previous || !v.verified,
            "s={s} verified after a smaller s failed"
        );
        previous = v.verified;
        if let Some(bad) = &v.counterexample {
            assert_eq!(code.plan(bad).unwrap(), None);
        }
    }
    assert!(
        !verify_batch(&code, 6, VerifyMode::Exhaustive)
            .unwrap()
            .verified
    );
    let sampled = verify_batch(
        &code,
        4,
        VerifyMode::Sampled {
            trials: 200,
            seed: 3,
        },
    )
    .unwrap();
    assert!(sampled.verified && sampled.checked == 200);
}

#[test]
fn batch_lengths_follow_the_formula() {
    for (q, n, k, size) in [(2u64, 4usize, 1usize, 6usize), (3, 3, 1, 5), (2, 5, 2, 4)] {
        let f = field(q);
        let fam = random_spread(&f, n, k, size, 9);
        let code = BatchCode::new(&fam).unwrap();
        let qn = q.pow(n as u32) as usize;
        assert_eq!(code.len(), qn + fam.len() * q.pow((n - k) as u32) as usize);
        assert_eq!(code.layout().parities.len(), code.parity_count());
    }
}
