use proptest::prelude::*;

use spectral_lattice::harness::generate::{case_rng, generic, positive, projection};
use spectral_lattice::{
    affine_image, loewner_leq, proj_join, proj_leq, proj_meet, spectral_inf, spectral_leq, spectral_sup,
    HermitianMatrix, Tolerances,
};

fn set(seed: u64, dim: usize, count: usize) -> Vec<HermitianMatrix> {
    let mut rng = case_rng(seed, 0);
    (0..count).map(|_| generic(&mut rng, dim, 1e-3)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bounds_bracket_every_member(seed in any::<u64>(), dim in 1usize..=5, count in 1usize..=4) {
        let t = Tolerances::default();
        let ms = set(seed, dim, count);
        let sup = spectral_sup(&ms, &t).unwrap();
        let inf = spectral_inf(&ms, &t).unwrap();
        for x in &ms {
            prop_assert!(spectral_leq(x, &sup, &t).unwrap().holds);
            prop_assert!(spectral_leq(&inf, x, &t).unwrap().holds);
            prop_assert!(loewner_leq(x, &sup, &t).unwrap());
            prop_assert!(loewner_leq(&inf, x, &t).unwrap());
        }
    }

    #[test]
    fn inf_is_negated_sup_of_negation(seed in any::<u64>(), dim in 1usize..=5, count in 1usize..=4) {
        let t = Tolerances::default();
        let ms = set(seed, dim, count);
        let negated: Vec<_> = ms.iter().map(HermitianMatrix::neg).collect();
        let lhs = spectral_inf(&ms, &t).unwrap();
        let rhs = spectral_sup(&negated, &t).unwrap().neg();
        prop_assert!(lhs.distance(&rhs).unwrap() < 1e-9);
    }

    #[test]
    fn bounds_commute_with_positive_affine_maps(
        seed in any::<u64>(),
        dim in 1usize..=5,
        alpha in 0.1f64..5.0,
        beta in -5.0f64..5.0,
    ) {
        let t = Tolerances::default();
        let ms = set(seed, dim, 3);
        let mapped = affine_image(&ms, alpha, beta).unwrap();
        let sup = spectral_sup(&ms, &t).unwrap().affine(alpha, beta);
        let inf = spectral_inf(&ms, &t).unwrap().affine(alpha, beta);
        prop_assert!(spectral_sup(&mapped, &t).unwrap().distance(&sup).unwrap() < 1e-7);
        prop_assert!(spectral_inf(&mapped, &t).unwrap().distance(&inf).unwrap() < 1e-7);
    }

    #[test]
    fn order_is_reflexive_and_implies_loewner(seed in any::<u64>(), dim in 1usize..=5) {
        let t = Tolerances::default();
        let mut rng = case_rng(seed, 0);
        let x = positive(&mut rng, dim, 1e-3);
        let r = generic(&mut rng, dim, 1e-3);
        prop_assert!(spectral_leq(&x, &x, &t).unwrap().holds);
        let y = spectral_sup(&[x.clone(), r], &t).unwrap();
        prop_assert!(spectral_leq(&x, &y, &t).unwrap().holds);
        prop_assert!(loewner_leq(&x, &y, &t).unwrap());
    }

    #[test]
    fn sup_of_pair_is_symmetric_and_idempotent(seed in any::<u64>(), dim in 1usize..=5) {
        let t = Tolerances::default();
        let ms = set(seed, dim, 2);
        let ab = spectral_sup(&ms, &t).unwrap();
        let ba = spectral_sup(&[ms[1].clone(), ms[0].clone()], &t).unwrap();
        prop_assert!(ab.distance(&ba).unwrap() < 1e-9);
        let again = spectral_sup(&[ab.clone(), ms[0].clone()], &t).unwrap();
        prop_assert!(again.distance(&ab).unwrap() < 1e-9);
    }

    #[test]
    fn projection_meet_and_join_bracket(seed in any::<u64>(), dim in 1usize..=6) {
        let t = Tolerances::default();
        let mut rng = case_rng(seed, 0);
        let pair = [projection(&mut rng, dim), projection(&mut rng, dim)];
        let meet = proj_meet(&pair, &t).unwrap();
        let join = proj_join(&pair, &t).unwrap();
        for p in &pair {
            prop_assert!(proj_leq(&meet, p, &t).unwrap());
            prop_assert!(proj_leq(p, &join, &t).unwrap());
        }
        prop_assert_eq!(meet.rank() + join.rank(), pair[0].rank() + pair[1].rank());
    }
}
