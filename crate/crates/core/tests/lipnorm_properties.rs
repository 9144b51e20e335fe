//! Norm identities and axioms of the decreasing-regularity norms.

use lipscale::collection::{LipParams, WhitneyCollection};
use lipscale::element::Element;
use lipscale::lipnorm::{lip_norm_finite, lip_norm_fixedspace};
use lipscale::multi_index::IndexTable;
use lipscale::scale::{Scale, SobolevSmoothing};
use lipscale::whitney::ClosedSet;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn random_collection(seed: u64, gamma: f64) -> WhitneyCollection {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = LipParams {
        k: 1,
        rho: 1.5,
        gamma,
        delta: 0.75,
        sigma: 2.0,
    };
    let scale = Scale::SobolevTorus {
        dim: 1,
        smoothing: SobolevSmoothing::BracketSharp,
        a0: 0.0,
    };
    let set = ClosedSet::new(vec![vec![0.0], vec![0.8], vec![-1.3]]).unwrap();
    let table = IndexTable::get(1, params.k);
    let mut data = BTreeMap::new();
    for p in 0..set.len() {
        for j in table.indices() {
            let modes = (0..4).map(|_| {
                (
                    vec![rng.random_range(-10i64..=10)],
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                )
            });
            data.insert((p, j.clone()), Element::from_modes(modes));
        }
    }
    WhitneyCollection::new(params, scale, set, data).unwrap()
}

#[test]
fn fixedspace_identity_on_finite_sets() {
    // the full norm is the max of the fixed-space norm at sigma_rho and the
    // decreasing-index sup part
    for seed in 0..20u64 {
        let f = random_collection(seed, 1.0);
        let full = lip_norm_finite(&f).unwrap();
        let fixed = lip_norm_fixedspace(&f, f.params().sigma_rho()).unwrap();
        let rebuilt = fixed.norm.max(full.sup_part);
        assert!(
            (full.norm - rebuilt).abs() <= 1e-12 * full.norm.max(1.0),
            "seed {seed}: {} vs {}",
            full.norm,
            rebuilt
        );
        assert!(fixed.norm <= full.norm + 1e-12);
    }
}

#[test]
fn homogeneity() {
    let f = random_collection(3, 2.0);
    let zero = WhitneyCollection::zero(*f.params(), f.scale().clone(), f.set().clone()).unwrap();
    let scaled = f.linear_combination(-2.5, &zero, 0.0).unwrap();
    let base = lip_norm_finite(&f).unwrap();
    let after = lip_norm_finite(&scaled).unwrap();
    assert!((after.norm - 2.5 * base.norm).abs() <= 1e-12 * base.norm.max(1.0));
    assert!((after.sup_part - 2.5 * base.sup_part).abs() <= 1e-12 * base.sup_part.max(1.0));
}

#[test]
fn triangle_inequality() {
    for seed in 0..10u64 {
        let f = random_collection(2 * seed, 1.0);
        let g_data = random_collection(2 * seed + 1, 1.0);
        let g = WhitneyCollection::new(
            *f.params(),
            f.scale().clone(),
            f.set().clone(),
            g_data.data().clone(),
        )
        .unwrap();
        let sum = f.linear_combination(1.0, &g, 1.0).unwrap();
        let nf = lip_norm_finite(&f).unwrap().norm;
        let ng = lip_norm_finite(&g).unwrap().norm;
        let ns = lip_norm_finite(&sum).unwrap().norm;
        assert!(ns <= nf + ng + 1e-12 * (nf + ng).max(1.0), "seed {seed}");
    }
}

mod smoothing_linearity {
    use lipscale::element::Element;
    use lipscale::scale::{Scale, SobolevSmoothing};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn arb_element(scale: &'static str) -> impl Strategy<Value = Element> {
        proptest::collection::btree_map(
            match scale {
                "lp" => (1i64..=24).prop_map(|k| vec![k]).boxed(),
                _ => (-24i64..=24).prop_map(|k| vec![k]).boxed(),
            },
            (-8i32..=8, -8i32..=8).prop_map(|(re, im)| Complex64::new(re as f64, im as f64)),
            1..12,
        )
        .prop_map(Element::Modes)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        // sharp cuts and truncations multiply coefficients by 0 or 1, so
        // linear combinations commute with them with no floating-point
        // slack at all
        #[test]
        fn sharp_smoothing_is_exactly_linear(
            u in arb_element("sobolev"),
            v in arb_element("sobolev"),
            theta in prop_oneof![Just(1.0f64), Just(1.5), Just(4.0), Just(64.0)],
            alpha in -4i32..=4,
            beta in -4i32..=4,
        ) {
            for scale in [
                Scale::SobolevTorus {
                    dim: 1,
                    smoothing: SobolevSmoothing::BracketSharp,
                    a0: 0.0,
                },
                Scale::SobolevTorus {
                    dim: 1,
                    smoothing: SobolevSmoothing::EuclidSharp,
                    a0: 0.0,
                },
                Scale::PolyDecay { dim: 1, site_scale: 1.0 },
            ] {
                let mut combo = u.scale(alpha as f64);
                combo.axpy(beta as f64, &v);
                let lhs = scale.smooth(theta, &combo).unwrap();
                let mut rhs = scale.smooth(theta, &u).unwrap().scale(alpha as f64);
                rhs.axpy(beta as f64, &scale.smooth(theta, &v).unwrap());
                let mut diff = lhs.sub(&rhs);
                diff.prune();
                prop_assert!(diff.is_zero(), "scale {scale:?}");
            }
        }

        // the smooth multiplier takes real values in (0, 1), so linearity
        // holds up to reassociation of the products (one ulp per entry)
        #[test]
        fn smooth_multiplier_is_linear_to_roundoff(
            u in arb_element("sobolev"),
            v in arb_element("sobolev"),
            theta in prop_oneof![Just(1.0f64), Just(1.5), Just(4.0), Just(64.0)],
            alpha in -4i32..=4,
            beta in -4i32..=4,
        ) {
            let scale = Scale::SobolevTorus {
                dim: 1,
                smoothing: SobolevSmoothing::SmoothCutoff,
                a0: 0.0,
            };
            let mut combo = u.scale(alpha as f64);
            combo.axpy(beta as f64, &v);
            let lhs = scale.smooth(theta, &combo).unwrap();
            let mut rhs = scale.smooth(theta, &u).unwrap().scale(alpha as f64);
            rhs.axpy(beta as f64, &scale.smooth(theta, &v).unwrap());
            let diff = lhs.sub(&rhs);
            let num = scale.norm(0.0, &diff).unwrap();
            let den = scale.norm(0.0, &lhs).unwrap().max(scale.norm(0.0, &rhs).unwrap());
            prop_assert!(num <= 4.0 * f64::EPSILON * den.max(1.0), "gap {num:.3e}");
        }
    }
}

#[test]
fn witnesses_reproduce_reported_values() {
    let f = random_collection(11, 1.5);
    let report = lip_norm_finite(&f).unwrap();
    let params = *f.params();

    let sup = report.sup_witness.as_ref().expect("sup witness");
    let p = f.set().position(&sup.point).expect("witness point in set");
    let order: usize = sup.j.iter().sum();
    let recomputed = params.gamma.powi(order as i32)
        * f.scale()
            .norm(params.sigma_m(order), f.value(p, &sup.j))
            .unwrap();
    assert_eq!(recomputed, sup.value);

    let rem = report
        .remainder_witness
        .as_ref()
        .expect("remainder witness");
    let x_idx = f.set().position(&rem.x).unwrap();
    let y_idx = f.set().position(&rem.y).unwrap();
    let gap: f64 = rem
        .x
        .iter()
        .zip(&rem.y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let order: usize = rem.j.iter().sum();
    let r = f.taylor_remainder(&rem.j, x_idx, y_idx).unwrap();
    let recomputed = params.gamma.powf(params.rho)
        * f.scale().norm(params.sigma_rho(), &r).unwrap()
        / gap.powf(params.rho - order as f64);
    assert_eq!(recomputed, rem.value);
}
