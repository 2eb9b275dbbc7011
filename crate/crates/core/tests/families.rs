use std::collections::BTreeSet;

use proptest::prelude::*;
use scattered_core::families::{self, Validity};
use scattered_core::mat2::Mat2;
use scattered_core::{scatter, stabilizer, Fe, FieldTower};

fn stabilizer_set(tw: &FieldTower, f: &scattered_core::LinearizedPoly) -> BTreeSet<Mat2> {
    let space = stabilizer::stabilizer_space(tw, f);
    space.elements(tw).filter(|m| !m.is_zero()).collect()
}

#[test]
fn computed_stabilizers_equal_the_predicted_sets() {
    let t54 = FieldTower::new(5, 1, 4).unwrap();
    let t55 = FieldTower::new(5, 1, 5).unwrap();
    let t34 = FieldTower::new(3, 1, 4).unwrap();
    let t56 = FieldTower::new(5, 1, 6).unwrap();
    let mut instances = vec![
        (&t54, families::pseudoregulus(&t54, 1).unwrap()),
        (&t54, families::pseudoregulus(&t54, 3).unwrap()),
        (&t34, families::pseudoregulus(&t34, 1).unwrap()),
        (&t56, families::find_half_degree(&t56, 1).unwrap()),
    ];
    for tw in [&t54, &t55, &t34] {
        for d in families::lp_deltas(tw).take(2) {
            instances.push((tw, families::lunardon_polverino(tw, 1, d).unwrap()));
        }
    }
    for d in families::trinomial_deltas(&t56) {
        instances.push((&t56, families::trinomial(&t56, d).unwrap()));
    }
    for h in families::psi_hs(&t56, 3).take(3) {
        instances.push((&t56, families::psi(&t56, h, 3, 1).unwrap()));
    }
    for (tw, inst) in instances {
        assert!(scatter::is_scattered(tw, &inst.poly), "{:?}", inst.family);
        let predicted: BTreeSet<Mat2> = inst.predicted.elements(tw).unwrap().into_iter().collect();
        assert_eq!(predicted.len() as u64, inst.predicted.group_order(tw));
        assert_eq!(stabilizer_set(tw, &inst.poly), predicted, "{:?}", inst.family);
    }
}

#[test]
fn checked_instances_are_scattered() {
    let t56 = FieldTower::new(5, 1, 6).unwrap();
    for h in families::psi_hs(&t56, 3).take(4) {
        let inst = families::psi(&t56, h, 3, 1).unwrap();
        assert_eq!(inst.validity, Validity::Checked);
        assert!(scatter::is_scattered(&t56, &inst.poly));
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    let t54 = FieldTower::new(5, 1, 4).unwrap();
    assert!(families::pseudoregulus(&t54, 2).is_err());
    let t56 = FieldTower::new(5, 1, 6).unwrap();
    assert!(families::psi(&t56, Fe::ONE, 3, 1).is_err());
    assert!(families::psi(&t56, families::psi_hs(&t56, 3).next().unwrap(), 3, 2).is_err());
}

#[test]
fn subfield_specialization_of_psi() {
    // h with h^2 = -1 in F_q; then G_psi = {(α, -4η; η, α) : α in F_q, η^q + η = 0}
    let tw = FieldTower::new(5, 1, 6).unwrap();
    let h = tw.from_int(2);
    let inst = families::psi(&tw, h, 3, 1).unwrap();
    let minus_four = tw.from_int(-4);
    let mut expected = BTreeSet::new();
    for alpha in tw.subfield_elements(1).unwrap() {
        for eta in families::anti_fixed(&tw, 1) {
            let m = Mat2::new(alpha, tw.mul(minus_four, eta), eta, alpha);
            if !m.is_zero() {
                expected.insert(m);
            }
        }
    }
    assert_eq!(expected.len(), 24);
    assert_eq!(stabilizer_set(&tw, &inst.poly), expected);
}

/// The coefficient identity used to pin down the off-diagonal entries of
/// stabilizer elements of ψ for odd t, and the resulting matrices.
#[test]
fn off_diagonal_identity_for_odd_t() {
    let tw = FieldTower::new(5, 1, 6).unwrap();
    let (t, s) = (3usize, 1usize);
    let qs = |k: usize| tw.q_pow(k) as u128;
    let ord = (tw.order() - 1) as u128;
    // h^(±q^k) with negative exponents taken mod the group order
    let hp = |h: Fe, k: usize| tw.pow(h, qs(k));
    let hm = |h: Fe, k: usize| tw.pow(h, ord - qs(k) % ord);
    for h in families::psi_hs(&tw, t).take(4) {
        let f = families::psi(&tw, h, t, s).unwrap().poly;
        let space = stabilizer::stabilizer_space(&tw, &f);
        for xi in families::anti_fixed(&tw, s) {
            let gamma = tw.div(xi, tw.sub(hp(h, s), hm(h, (2 * t - 1) * s)));
            let g = |k: usize| tw.frob(gamma, k);
            // h^(q^a - 1) and h^(1 - q^a)
            let up = |a: usize| tw.div(hp(h, a), h);
            let down = |a: usize| tw.mul(h, hm(h, a));
            let beta = [
                tw.mul(g(s), up(s)),
                tw.neg(tw.mul(g(s * (t - 1)), up(s * (t - 1)))),
                tw.neg(tw.mul(down(s * (t + 1)), g(s * (t + 1)))),
                tw.mul(down(s * (2 * t - 1)), g(s * (2 * t - 1))),
            ]
            .into_iter()
            .fold(Fe::ZERO, |a, b| tw.add(a, b));
            let closed = tw.mul(xi, tw.add(hp(h, s), hp(h, s * (t - 1))));
            assert_eq!(beta, closed);
            for alpha in tw.subfield_elements(1).unwrap() {
                assert!(space.contains(&tw, &Mat2::new(alpha, beta, gamma, alpha)));
            }
        }
    }
}

proptest! {
    #[test]
    fn fq_plus_anti_fixed_conjugates(a in 0i64..5, k in 0usize..5) {
        let tw = FieldTower::new(5, 1, 6).unwrap();
        let xis = families::anti_fixed(&tw, 1);
        prop_assert_eq!(xis.len() as u64, tw.q());
        let (alpha, xi) = (tw.from_int(a), xis[k]);
        prop_assert_eq!(tw.frob(tw.add(alpha, xi), 1), tw.sub(alpha, xi));
    }
}
