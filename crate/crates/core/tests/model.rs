use bifree::base_algebra::{Bimodule, OperatorSpace, PairOfBFaces};
use bifree::bnc_core::{enumerate_bnc, kreweras, BncPartition, ShadingMap, Side, SideMap};
use bifree::lr_diagrams::{enumerate_lr, lateral_coefficients, two_sums_check};
use bifree::moment_cumulant::{
    bifree_sweep, bnc_list, joint_moment, universal_rhs, FamilyGens, OperatorTuple, SweepConfig,
};
use bifree::operator_model::{expansion_check, mu_ops, FreeProduct};
use bifree::suites::{render_report, run_suite, SuiteParams};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn chi_strategy(max: usize) -> impl Strategy<Value = SideMap> {
    prop::collection::vec(any::<bool>(), 1..=max)
        .prop_map(|v| SideMap::new(v.into_iter().map(|l| if l { Side::Left } else { Side::Right }).collect()))
}

fn families(seed: u64, depth: usize) -> (Arc<FreeProduct>, Vec<FamilyGens<FreeProduct>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let comps: Vec<Arc<Bimodule>> = (0..2).map(|_| Arc::new(Bimodule::random(2, 1, &mut rng))).collect();
    let fp = Arc::new(FreeProduct::new(comps.clone(), depth).unwrap());
    let fams = comps
        .iter()
        .enumerate()
        .map(|(k, x)| fp.lift_pair(k, &PairOfBFaces::random(x.clone(), 1, 1, 2, &mut rng)).unwrap())
        .collect();
    (fp, fams)
}

fn word(fams: &[FamilyGens<FreeProduct>], chi: &SideMap, eps: &ShadingMap) -> Vec<bifree::operator_model::FpOp> {
    (0..chi.len()).map(|k| fams[eps.label(k)].gens(chi.side(k))[0].clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn depth_soundness(seed in 0u64..1000, chi in chi_strategy(4), shades in prop::collection::vec(0usize..2, 4)) {
        let eps = ShadingMap::new(shades[..chi.len()].to_vec());
        let (fp, fams) = families(seed, chi.len());
        let (fp2, fams2) = families(seed, chi.len() + 1);
        let a = fp.expect_word(&word(&fams, &chi, &eps).iter().collect::<Vec<_>>()).unwrap();
        let b = fp2.expect_word(&word(&fams2, &chi, &eps).iter().collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn free_product_moments_obey_universal_polynomials(seed in 0u64..1000, chi in chi_strategy(4), shades in prop::collection::vec(0usize..2, 4)) {
        let eps = ShadingMap::new(shades[..chi.len()].to_vec());
        let (fp, fams) = families(seed, chi.len());
        let t = OperatorTuple::new_unchecked(fp.clone(), chi.clone(), word(&fams, &chi, &eps)).unwrap();
        prop_assert_eq!(joint_moment(&t).unwrap(), universal_rhs(&eps, &t).unwrap());
    }

    #[test]
    fn expansion_lemma(seed in 0u64..1000, chi in chi_strategy(3), shades in prop::collection::vec(0usize..2, 3)) {
        let eps = ShadingMap::new(shades[..chi.len()].to_vec());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let comps: Vec<Arc<Bimodule>> = (0..2).map(|_| Arc::new(Bimodule::random(2, 1, &mut rng))).collect();
        let fp = FreeProduct::new(comps.clone(), chi.len()).unwrap();
        let ops: Vec<_> = (0..chi.len())
            .map(|k| match chi.side(k) {
                Side::Left => comps[eps.label(k)].random_left_operator(2, &mut rng),
                Side::Right => comps[eps.label(k)].random_right_operator(2, &mut rng),
            })
            .collect();
        prop_assert_eq!(mu_ops(&fp, &chi, &eps, &ops).unwrap().len(), chi.len());
        prop_assert!(expansion_check(&fp, &chi, &eps, &ops).unwrap().equal);
    }

    #[test]
    fn lr_counts_and_closure(chi in chi_strategy(4), shades in prop::collection::vec(0usize..3, 4)) {
        let eps = ShadingMap::new(shades[..chi.len()].to_vec());
        let lr = enumerate_lr(&chi, &eps).unwrap();
        prop_assert_eq!(lr.len(), 1 << chi.len());
        let lat = lateral_coefficients(&chi, &eps).unwrap();
        for d in &lr {
            prop_assert!(lat.iter().any(|(e, _)| e == d), "{} {:?} not in {:?}", d, d, lat.iter().map(|x| x.0.to_string()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn two_sums_below_shading(chi in chi_strategy(4), shades in prop::collection::vec(0usize..2, 4)) {
        let eps = ShadingMap::new(shades[..chi.len()].to_vec());
        for pi in bnc_list(&chi).unwrap().iter().filter(|p| p.partition().refines(&eps.as_partition())) {
            let s = two_sums_check(pi, &eps).unwrap();
            prop_assert!(s.equal());
        }
    }

    #[test]
    fn kreweras_reverses_order(chi in chi_strategy(5)) {
        let all = enumerate_bnc(&chi).unwrap();
        for a in &all {
            let ka = kreweras(a);
            prop_assert_eq!(ka.num_blocks() + a.num_blocks(), chi.len() + 1);
            for b in &all {
                if a.partition().refines(b.partition()) {
                    prop_assert!(kreweras(b).partition().refines(ka.partition()));
                }
            }
        }
    }
}

#[test]
fn bifree_families_have_clean_reports() {
    let (fp, fams) = families(5, 3);
    let r = bifree_sweep(&fp, &fams, &SweepConfig { max_order: 3, ..Default::default() }).unwrap();
    assert!(r.is_clean());
    assert!(r.checked() > 0);
}

#[test]
fn zero_and_one_are_extremes() {
    let chi = SideMap::parse("lrrl").unwrap();
    let all = enumerate_bnc(&chi).unwrap();
    let (zero, one) = (BncPartition::zero(&chi), BncPartition::one(&chi));
    for p in &all {
        assert!(zero.partition().refines(p.partition()) && p.partition().refines(one.partition()));
    }
    assert_eq!(kreweras(&zero).partition(), one.partition());
}

#[test]
fn quick_suites_pass() {
    let p = SuiteParams { seed: 1, max_n: Some(3), depth: None, window: Some(4), budget: Some(20) };
    for k in 1..=12 {
        let r = run_suite(k, &p).unwrap();
        assert!(r.passed(), "{}", render_report(&r));
    }
}
