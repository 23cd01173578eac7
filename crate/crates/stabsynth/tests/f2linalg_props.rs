mod common;

use common::*;
use proptest::prelude::*;
use stabsynth::f2linalg::{lpl_decompose, lpu_decompose, symmetric_udu, BinMatrix};

fn unitriangular(m: &BinMatrix, lower: bool) -> bool {
    (0..m.rows()).all(|i| m.get(i, i)) && if lower { m.is_lower_triangular() } else { m.is_upper_triangular() }
}

proptest! {
    #[test]
    fn mul_matches_reference(r in 1usize..80, k in 1usize..80, c in 1usize..80, seed: u64) {
        let mut g = rng(seed);
        let a = random_matrix(r, k, &mut g);
        let b = random_matrix(k, c, &mut g);
        prop_assert_eq!(a.mul(&b).unwrap(), naive_mul(&a, &b));
    }

    #[test]
    fn mul_associative(n in 1usize..70, seed: u64) {
        let mut g = rng(seed);
        let (a, b, c) = (random_matrix(n, n, &mut g), random_matrix(n, n, &mut g), random_matrix(n, n, &mut g));
        prop_assert_eq!(a.dot(&b).dot(&c), a.dot(&b.dot(&c)));
    }

    #[test]
    fn invert_involutive(n in 1usize..70, seed: u64) {
        let m = random_invertible(n, &mut rng(seed));
        let inv = m.invert().unwrap();
        prop_assert!(m.dot(&inv).is_identity());
        prop_assert_eq!(inv.invert().unwrap(), m);
    }

    #[test]
    fn lpu_recomposes(n in 1usize..24, density in 0.0f64..1.0, seed: u64) {
        use rand::Rng;
        let mut g = rng(seed);
        let m = BinMatrix::from_fn(n, n, |_, _| g.gen_bool(density));
        let (l, p, u) = lpu_decompose(&m).unwrap();
        prop_assert!(unitriangular(&l, true));
        prop_assert!(unitriangular(&u, false));
        prop_assert_eq!(p.rank(), m.rank());
        prop_assert_eq!(naive_mul(&l, &naive_mul(&p.to_matrix(), &u)), m);
    }

    #[test]
    fn lpl_recomposes(n in 1usize..24, density in 0.0f64..1.0, seed: u64) {
        use rand::Rng;
        let mut g = rng(seed);
        let m = BinMatrix::from_fn(n, n, |_, _| g.gen_bool(density));
        let (l1, p, l2) = lpl_decompose(&m).unwrap();
        prop_assert!(unitriangular(&l1, true));
        prop_assert!(unitriangular(&l2, true));
        prop_assert_eq!(p.rank(), m.rank());
        prop_assert_eq!(naive_mul(&l1, &naive_mul(&p.to_matrix(), &l2)), m);
    }

    #[test]
    fn udu_contract(n in 1usize..40, seed: u64) {
        let a = random_symmetric(n, &mut rng(seed));
        let (u, lam) = symmetric_udu(&a).unwrap();
        prop_assert!(unitriangular(&u, false));
        prop_assert!(u.invert().is_ok());
        prop_assert!(lam.is_diagonal());
        prop_assert_eq!(a.add(&naive_mul(&u, &u.transpose())).unwrap(), lam);
    }
}

#[test]
fn rank_of_known_matrices() {
    assert_eq!(BinMatrix::zeros(5, 3).rank(), 0);
    assert_eq!(BinMatrix::identity(100).rank(), 100);
    assert_eq!(BinMatrix::from_rows(&[[1, 1, 0], [0, 1, 1], [1, 0, 1]]).rank(), 2);
}
