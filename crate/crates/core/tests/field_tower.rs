use proptest::prelude::*;
use scattered_core::{Fe, FieldSpec, FieldTower};

fn elem(tw: &FieldTower, mut i: u64) -> Fe {
    i %= tw.order();
    let mut digits = Vec::new();
    for _ in 0..tw.degree() {
        digits.push(i % tw.p());
        i /= tw.p();
    }
    tw.from_digits(&digits).unwrap()
}

/// Schoolbook product modulo the tower's modulus, on digit vectors.
fn naive_mul(tw: &FieldTower, a: Fe, b: Fe) -> Vec<u64> {
    let p = tw.p();
    let (da, db) = (tw.digits(a), tw.digits(b));
    let m = tw.modulus();
    let d = m.len() - 1;
    let mut prod = vec![0u64; 2 * d];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    let lead_inv = (1..p).find(|&c| c * m[d] % p == 1).unwrap();
    for k in (d..2 * d).rev() {
        let c = prod[k] * lead_inv % p;
        if c == 0 {
            continue;
        }
        for (j, &mj) in m.iter().enumerate() {
            prod[k - d + j] = (prod[k - d + j] + p * p - c * mj % p) % p;
        }
    }
    prod.truncate(d);
    prod
}

fn towers() -> Vec<FieldTower> {
    vec![
        FieldTower::new(2, 1, 5).unwrap(),
        FieldTower::new(3, 1, 4).unwrap(),
        FieldTower::new(5, 1, 4).unwrap(),
        FieldTower::new(2, 2, 3).unwrap(),
        FieldTower::new(3, 2, 2).unwrap(),
        FieldTower::new(5, 1, 6).unwrap(),
    ]
}

#[test]
fn multiplication_matches_schoolbook() {
    for tw in towers() {
        for i in (0..tw.order()).step_by(7) {
            for j in (0..tw.order()).step_by(13) {
                let (a, b) = (elem(&tw, i), elem(&tw, j));
                assert_eq!(tw.digits(tw.mul(a, b)), naive_mul(&tw, a, b));
            }
        }
    }
}

#[test]
fn every_nonzero_element_is_invertible() {
    // an irreducible modulus makes every nonzero element invertible
    for tw in towers() {
        for x in tw.nonzero_elements() {
            assert_eq!(tw.mul(x, tw.inv(x)), Fe::ONE);
        }
    }
}

#[test]
fn subfield_sizes_and_primitive_orders() {
    let tw = FieldTower::new(2, 1, 6).unwrap();
    for t in [1, 2, 3, 6] {
        let brute = tw.elements().filter(|&x| tw.frob(x, t) == x).count() as u64;
        assert_eq!(brute, tw.q_pow(t));
        assert_eq!(tw.subfield_elements(t).unwrap().len() as u64, brute);
        let g = tw.subfield_primitive(t).unwrap();
        let order = (1..=tw.q_pow(t)).find(|&k| tw.pow(g, k as u128) == Fe::ONE).unwrap();
        assert_eq!(order, tw.q_pow(t) - 1);
    }
    assert!(tw.subfield_elements(4).is_err());
}

#[test]
fn generator_is_primitive_and_dlog_inverts_gpow() {
    for tw in towers() {
        let g = tw.generator();
        assert_eq!(tw.mult_order(g), tw.order() - 1);
        for k in (0..tw.order() - 1).step_by(5) {
            assert_eq!(tw.dlog(tw.gpow(k)), Some(k));
        }
        assert_eq!(tw.dlog(Fe::ZERO), None);
    }
}

#[test]
fn spec_round_trip_and_seeded_moduli() {
    let tw = FieldTower::with_seed(3, 1, 4, 2).unwrap();
    let again = FieldTower::from_spec(&tw.spec()).unwrap();
    assert_eq!(tw.modulus(), again.modulus());
    assert_ne!(tw.modulus(), FieldTower::new(3, 1, 4).unwrap().modulus());
    let reducible = FieldSpec { p: 5, e: 1, n: 4, modulus: Some(vec![1, 0, 0, 0, 1]), seed: None };
    assert!(FieldTower::from_spec(&reducible).is_err());
}

#[test]
fn element_text_round_trip() {
    let tw = FieldTower::new(5, 1, 4).unwrap();
    for x in tw.elements() {
        let gk = tw.format_gk(x);
        assert_eq!(tw.parse_gk(&gk).unwrap(), x);
        assert_eq!(tw.parse_element(&tw.to_json_digits(x)).unwrap(), x);
    }
}

#[test]
fn square_roots_and_quadratics() {
    for tw in towers() {
        for a in tw.elements() {
            match tw.sqrt(a) {
                Some(r) => assert_eq!(tw.mul(r, r), a),
                None => assert!(tw.elements().all(|r| tw.mul(r, r) != a)),
            }
        }
    }
}

proptest! {
    #[test]
    fn field_axioms(i in any::<u64>(), j in any::<u64>(), k in any::<u64>(), which in 0usize..6) {
        let tws = towers();
        let tw = &tws[which];
        let (a, b, c) = (elem(tw, i), elem(tw, j), elem(tw, k));
        prop_assert_eq!(tw.mul(tw.mul(a, b), c), tw.mul(a, tw.mul(b, c)));
        prop_assert_eq!(tw.add(tw.add(a, b), c), tw.add(a, tw.add(b, c)));
        prop_assert_eq!(tw.mul(a, tw.add(b, c)), tw.add(tw.mul(a, b), tw.mul(a, c)));
        prop_assert_eq!(tw.mul(a, b), tw.mul(b, a));
        prop_assert_eq!(tw.add(a, tw.neg(a)), Fe::ZERO);
        prop_assert_eq!(tw.sub(a, b), tw.add(a, tw.neg(b)));
        if !a.is_zero() {
            prop_assert_eq!(tw.mul(a, tw.inv(a)), Fe::ONE);
            prop_assert_eq!(tw.mul(tw.div(b, a), a), b);
        }
    }

    #[test]
    fn frobenius_is_additive_with_order_n(i in any::<u64>(), j in any::<u64>(), k in 0usize..12, which in 0usize..6) {
        let tws = towers();
        let tw = &tws[which];
        let (a, b) = (elem(tw, i), elem(tw, j));
        prop_assert_eq!(tw.frob(a, tw.n()), a);
        prop_assert_eq!(tw.frob(tw.add(a, b), k), tw.add(tw.frob(a, k), tw.frob(b, k)));
        prop_assert_eq!(tw.frob(a, k), tw.pow(a, (tw.q() as u128).pow(k as u32)));
    }

    #[test]
    fn relative_norm_is_multiplicative(i in any::<u64>(), j in any::<u64>()) {
        let tw = FieldTower::new(5, 1, 6).unwrap();
        let (a, b) = (elem(&tw, i), elem(&tw, j));
        for t in [1, 2, 3, 6] {
            let n = |x| tw.norm(x, t).unwrap();
            prop_assert_eq!(n(tw.mul(a, b)), tw.mul(n(a), n(b)));
            prop_assert!(tw.in_subfield(n(a), t).unwrap());
        }
    }
}
