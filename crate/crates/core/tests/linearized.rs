use std::collections::HashSet;

use proptest::prelude::*;
use scattered_core::{fqlinalg, Fe, FieldTower, LinearizedPoly};

fn elem(tw: &FieldTower, mut i: u64) -> Fe {
    i %= tw.order();
    let digits: Vec<u64> = (0..tw.degree())
        .map(|_| {
            let d = i % tw.p();
            i /= tw.p();
            d
        })
        .collect();
    tw.from_digits(&digits).unwrap()
}

fn poly(tw: &FieldTower, raw: &[u64]) -> LinearizedPoly {
    LinearizedPoly::new(tw, raw.iter().map(|&i| elem(tw, i)).collect()).unwrap()
}

fn towers() -> [FieldTower; 3] {
    [
        FieldTower::new(3, 1, 4).unwrap(),
        FieldTower::new(2, 2, 3).unwrap(),
        FieldTower::new(5, 1, 3).unwrap(),
    ]
}

fn arb_poly() -> impl Strategy<Value = (usize, Vec<u64>)> {
    (0usize..3).prop_flat_map(|w| {
        let n = towers()[w].n();
        (Just(w), prop::collection::vec(any::<u64>(), n))
    })
}

/// Sparse polynomials hit the singular case often enough to exercise it.
fn arb_sparse_poly() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(prop_oneof![Just(0u64), Just(1u64), any::<u64>()], 4)
}

#[test]
fn rejects_wrong_length() {
    let tw = FieldTower::new(3, 1, 4).unwrap();
    assert!(LinearizedPoly::new(&tw, vec![Fe::ONE; 3]).is_err());
}

#[test]
fn json_round_trip() {
    let tw = FieldTower::new(3, 1, 4).unwrap();
    let f = poly(&tw, &[5, 0, 17, 80]);
    for fmt in [scattered_core::ElementFormat::Digits, scattered_core::ElementFormat::Gk] {
        assert_eq!(LinearizedPoly::from_json(&tw, &f.to_json(&tw, fmt)).unwrap(), f);
    }
}

#[test]
fn zero_has_no_delta_profile() {
    let tw = FieldTower::new(3, 1, 4).unwrap();
    assert!(LinearizedPoly::zero(&tw).delta_profile().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluation_is_fq_linear((w, raw) in arb_poly(), i in any::<u64>(), j in any::<u64>(), c in 0u64..4) {
        let tw = &towers()[w];
        let f = poly(tw, &raw);
        let (x, y) = (elem(tw, i), elem(tw, j));
        let lambda = tw.subfield_elements(1).unwrap()[(c as usize) % tw.q() as usize];
        prop_assert_eq!(f.eval(tw, tw.add(x, y)), tw.add(f.eval(tw, x), f.eval(tw, y)));
        prop_assert_eq!(f.eval(tw, tw.mul(lambda, x)), tw.mul(lambda, f.eval(tw, x)));
    }

    #[test]
    fn composition_is_evaluation_composition((w, a) in arb_poly(), b in prop::collection::vec(any::<u64>(), 4), c in prop::collection::vec(any::<u64>(), 4)) {
        let tw = &towers()[w];
        let n = tw.n();
        let (f, g, h) = (poly(tw, &a), poly(tw, &b[..n]), poly(tw, &c[..n]));
        let fg = f.compose(tw, &g);
        for x in tw.elements().step_by(3) {
            prop_assert_eq!(fg.eval(tw, x), f.eval(tw, g.eval(tw, x)));
        }
        prop_assert_eq!(fg.compose(tw, &h), f.compose(tw, &g.compose(tw, &h)));
        let id = LinearizedPoly::identity(tw);
        prop_assert_eq!(f.compose(tw, &id), f.clone());
        prop_assert_eq!(id.compose(tw, &f), f);
    }

    #[test]
    fn rank_nullity_against_image_count((w, raw) in arb_poly()) {
        let tw = &towers()[w];
        let f = poly(tw, &raw);
        let image: HashSet<Fe> = tw.elements().map(|x| f.eval(tw, x)).collect();
        let kernel = tw.elements().filter(|&x| f.eval(tw, x).is_zero()).count() as u64;
        prop_assert_eq!(image.len() as u64, tw.q_pow(f.rank(tw)));
        prop_assert_eq!(kernel, tw.q_pow(f.kernel_dim(tw)));
        prop_assert_eq!(f.rank(tw) + f.kernel_dim(tw), tw.n());
    }

    #[test]
    fn invert_agrees_with_kernel_and_matrix(raw in arb_sparse_poly()) {
        let tw = FieldTower::new(3, 1, 4).unwrap();
        let f = poly(&tw, &raw);
        let injective = tw.nonzero_elements().all(|x| !f.eval(&tw, x).is_zero());
        let nonsingular = fqlinalg::rank(&tw, &f.to_default_matrix(&tw)) == tw.n();
        prop_assert_eq!(injective, nonsingular);
        match f.invert(&tw) {
            Ok(g) => {
                prop_assert!(injective);
                prop_assert_eq!(f.compose(&tw, &g), LinearizedPoly::identity(&tw));
                prop_assert_eq!(g.compose(&tw, &f), LinearizedPoly::identity(&tw));
            }
            Err(_) => prop_assert!(!injective),
        }
    }

    #[test]
    fn matrix_round_trip((w, raw) in arb_poly()) {
        let tw = &towers()[w];
        let f = poly(tw, &raw);
        let basis = tw.fq_basis().to_vec();
        let m = f.to_matrix(tw, &basis).unwrap();
        prop_assert_eq!(LinearizedPoly::from_matrix(tw, &m, &basis).unwrap(), f);
    }

    #[test]
    fn delta_profile_survives_rescaling((w, raw) in arb_poly(), a in any::<u64>(), b in any::<u64>()) {
        let tw = &towers()[w];
        let f = poly(tw, &raw);
        let (a, b) = (elem(tw, a), elem(tw, b));
        prop_assume!(!f.is_zero() && !a.is_zero() && !b.is_zero());
        let g = f.scale(tw, a).rescale_input(tw, b);
        prop_assert_eq!(g.support(), f.support());
        prop_assert_eq!(g.delta_profile().unwrap(), f.delta_profile().unwrap());
        for x in tw.elements().step_by(5) {
            prop_assert_eq!(g.eval(tw, x), tw.mul(a, f.eval(tw, tw.mul(b, x))));
        }
    }
}
