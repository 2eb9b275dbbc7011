use std::collections::HashSet;

use proptest::prelude::*;
use scattered_core::mat2::ProjPoint;
use scattered_core::{scatter, Fe, FieldTower, LinearizedPoly};

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

/// Slopes f(x)/x, counted directly.
fn slope_count(tw: &FieldTower, f: &LinearizedPoly) -> usize {
    tw.nonzero_elements().map(|x| tw.div(f.eval(tw, x), x)).collect::<HashSet<_>>().len()
}

fn points_count(tw: &FieldTower) -> usize {
    ((tw.order() - 1) / (tw.q() - 1)) as usize
}

#[test]
fn monomials() {
    let tw = FieldTower::new(2, 1, 6).unwrap();
    for s in 0..6 {
        let f = LinearizedPoly::monomial(&tw, s, Fe::ONE);
        let coprime = [1, 5].contains(&s);
        assert_eq!(scatter::is_scattered(&tw, &f), coprime, "s = {s}");
        assert_eq!(scatter::linear_set(&tw, &f).size(), slope_count(&tw, &f));
    }
}

#[test]
fn kernel_shows_as_slope_zero() {
    let tw = FieldTower::new(3, 1, 3).unwrap();
    // x^q - x kills F_q
    let f = LinearizedPoly::new(&tw, vec![tw.neg(Fe::ONE), Fe::ONE, Fe::ZERO]).unwrap();
    let ls = scatter::linear_set(&tw, &f);
    assert!(ls.contains(&tw, ProjPoint::Affine(Fe::ZERO)));
    assert!(!ls.contains(&tw, ProjPoint::Infinity));
    let g = LinearizedPoly::monomial(&tw, 1, Fe::ONE);
    assert!(!scatter::linear_set(&tw, &g).contains(&tw, ProjPoint::Affine(Fe::ZERO)));
}

#[test]
fn meet_dimension_is_at_most_one_when_scattered() {
    let tw = FieldTower::new(3, 1, 4).unwrap();
    let f = LinearizedPoly::monomial(&tw, 1, Fe::ONE);
    for x in tw.nonzero_elements().step_by(11) {
        let pt = ProjPoint::of(&tw, (x, f.eval(&tw, x))).unwrap();
        assert_eq!(scatter::meet_dimension(&tw, &f, pt), 1);
    }
    for y in tw.elements().step_by(7) {
        assert!(scatter::meet_dimension(&tw, &f, ProjPoint::Affine(y)) <= 1);
    }
    let g = LinearizedPoly::monomial(&tw, 2, Fe::ONE);
    let pt = ProjPoint::of(&tw, (Fe::ONE, Fe::ONE)).unwrap();
    assert_eq!(scatter::meet_dimension(&tw, &g, pt), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn three_scatteredness_tests_agree(raw in prop::collection::vec(any::<u64>(), 4), which in 0usize..2) {
        let tw = [FieldTower::new(3, 1, 4).unwrap(), FieldTower::new(2, 2, 4).unwrap()];
        let tw = &tw[which];
        let f = poly(tw, &raw);
        let naive = slope_count(tw, &f) == points_count(tw);
        prop_assert_eq!(scatter::is_scattered(tw, &f), naive);
        prop_assert_eq!(scatter::is_scattered_pairwise(tw, &f), naive);
        let ls = scatter::linear_set(tw, &f);
        prop_assert_eq!(ls.size(), slope_count(tw, &f));
    }

    #[test]
    fn scatteredness_is_invariant_under_rescaling(raw in prop::collection::vec(any::<u64>(), 4), a in 1u64.., b in 1u64..) {
        let tw = FieldTower::new(3, 1, 4).unwrap();
        let f = poly(&tw, &raw);
        let (a, b) = (elem(&tw, a), elem(&tw, b));
        prop_assume!(!a.is_zero() && !b.is_zero());
        let g = f.scale(&tw, a).rescale_input(&tw, b);
        prop_assert_eq!(scatter::is_scattered(&tw, &g), scatter::is_scattered(&tw, &f));
        prop_assert_eq!(scatter::linear_set(&tw, &g).size(), scatter::linear_set(&tw, &f).size());
    }
}
