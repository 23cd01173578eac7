mod common;

use common::*;
use proptest::prelude::*;
use stabsynth::clifford::{classify_subgroup, is_symplectic, StageTag, Subgroup, SymplecticMat};
use stabsynth::f2linalg::BinMatrix;
use stabsynth::synthesis::{
    bruhat_decompose, nine_stage, random_borel, random_symplectic, seven_stage, symplectic_lpu, weyl_cell,
};

use StageTag::*;

const NINE: [StageTag; 9] = [C, P, C, P, H, P, C, P, C];
const SEVEN: [StageTag; 7] = [C, Cz, P, H, P, Cz, C];

fn in_c_down(m: &SymplecticMat) -> bool {
    classify_subgroup(m).contains(&Subgroup::CDown)
}

fn in_borel(m: &SymplecticMat) -> bool {
    classify_subgroup(m).contains(&Subgroup::Borel)
}

fn sp2() -> Vec<SymplecticMat> {
    (0..16u32)
        .map(|k| BinMatrix::from_fn(2, 2, |i, j| k >> (2 * i + j) & 1 == 1))
        .filter(|m| is_symplectic(m).unwrap())
        .map(|m| SymplecticMat::new(m).unwrap())
        .collect()
}

#[test]
fn sp2_has_six_elements_all_synthesized() {
    let all = sp2();
    assert_eq!(all.len(), 6);
    for m in all {
        let nine = nine_stage(&m).unwrap();
        assert_eq!(nine.tags(), NINE.to_vec());
        assert_eq!(nine.to_symplectic(), m);
        let seven = seven_stage(&m).unwrap();
        assert_eq!(seven.tags(), SEVEN.to_vec());
        assert_eq!(seven.to_symplectic(), m);
    }
}

proptest! {
    #[test]
    fn layered_forms_recompose(n in 1usize..=8, seed: u64) {
        let m = random_symplectic(n, &mut rng(seed));
        let nine = nine_stage(&m).unwrap();
        prop_assert_eq!(nine.tags(), NINE.to_vec());
        prop_assert_eq!(nine.to_symplectic(), m.clone());
        let seven = seven_stage(&m).unwrap();
        prop_assert_eq!(seven.tags(), SEVEN.to_vec());
        prop_assert_eq!(seven.to_symplectic(), m);
    }

    #[test]
    fn nine_stage_linear_layers(n in 1usize..=8, seed: u64) {
        let m = random_symplectic(n, &mut rng(seed));
        let nine = nine_stage(&m).unwrap();
        let layer = |i: usize| nine.stages[i].1.to_symplectic();
        for i in [0, 2, 8] {
            prop_assert!(in_c_down(&layer(i)), "stage {i}");
        }
        // the layer after the Hadamards also carries the Bruhat permutation
        let pi = bruhat_decompose(&m).unwrap().pi;
        let perm = SymplecticMat::permutation(&pi);
        prop_assert!(in_c_down(&perm.inverse().compose(&layer(6))));
        let identity = pi.iter().enumerate().all(|(i, &p)| i == p);
        // Q·L is lower unitriangular only for Q = I
        prop_assert_eq!(in_c_down(&layer(6)), identity);
    }

    #[test]
    fn bruhat_factors(n in 1usize..=10, seed: u64) {
        let m = random_symplectic(n, &mut rng(seed));
        let f = bruhat_decompose(&m).unwrap();
        prop_assert!(in_borel(&f.w1));
        prop_assert!(in_borel(&f.w2));
        prop_assert_eq!(f.recompose(), m);
    }

    #[test]
    fn lpu_of_lower_half(n in 1usize..=10, seed: u64) {
        let m = random_symplectic(n, &mut rng(seed));
        let f = symplectic_lpu(&m.lower_half()).unwrap();
        prop_assert!(f.l.is_lower_triangular());
        prop_assert!(f.u.is_upper_triangular());
        prop_assert!(f.d1.is_symmetric());
        prop_assert_eq!(f.recompose(), m.lower_half());
    }

    #[test]
    fn cell_invariant_under_borel(n in 1usize..=8, seed: u64) {
        let mut g = rng(seed);
        let m = random_symplectic(n, &mut g);
        let (b1, b2) = (random_borel(n, &mut g), random_borel(n, &mut g));
        let cell = weyl_cell(&m).unwrap();
        let moved = weyl_cell(&b1.compose(&m).compose(&b2)).unwrap();
        prop_assert_eq!(moved.k, cell.k);
        prop_assert_eq!(moved.pi(), cell.pi());
        prop_assert_eq!(moved, cell);
    }

    #[test]
    fn cell_k_subadditive(n in 1usize..=8, seed: u64) {
        let mut g = rng(seed);
        let (m1, m2) = (random_symplectic(n, &mut g), random_symplectic(n, &mut g));
        let k = |m: &SymplecticMat| weyl_cell(m).unwrap().k;
        prop_assert!(k(&m1.compose(&m2)) <= k(&m1) + k(&m2));
    }

    #[test]
    fn cell_representative_in_same_cell(n in 1usize..=8, seed: u64) {
        let m = random_symplectic(n, &mut rng(seed));
        let cell = weyl_cell(&m).unwrap();
        prop_assert_eq!(weyl_cell(&cell.representative()).unwrap(), cell);
    }
}
