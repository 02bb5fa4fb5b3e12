// Row reduction, rank and kernels over GF(5).
use subspace_forge::{Field, Matrix};

fn main() {
    let f = Field::new(5, 1).unwrap();
    let m = Matrix::from_codes(&f, 3, 4, &[1, 2, 3, 4, 2, 4, 1, 3, 0, 1, 1, 1]).unwrap();
    let r = m.rref();
    println!("rank {}, pivots {:?}", r.rank, r.pivots);
    for row in r.matrix.row_vecs() {
        println!("  {:?}", row.iter().map(|e| e.code()).collect::<Vec<_>>());
    }

    let kernel = m.kernel_basis();
    println!("kernel dimension {}", kernel.rows());
    for v in kernel.row_vecs() {
        let image = m.mul_vec(&v).unwrap();
        assert!(image.iter().all(|e| e.is_zero()));
        println!(
            "  {:?} maps to 0",
            v.iter().map(|e| e.code()).collect::<Vec<_>>()
        );
    }
    assert_eq!(r.rank + kernel.rows(), m.cols());
}
