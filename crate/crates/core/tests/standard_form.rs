use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scattered_core::mat2::Mat2;
use scattered_core::selftest::random_element;
use scattered_core::standard_form::{self, Mode};
use scattered_core::{families, scatter, stabilizer, FieldTower, LinearizedPoly};

/// Catalog members with a nontrivial stabilizer field.
fn catalog() -> Vec<(FieldTower, Vec<LinearizedPoly>)> {
    let t54 = FieldTower::new(5, 1, 4).unwrap();
    let t34 = FieldTower::new(3, 1, 4).unwrap();
    let t56 = FieldTower::new(5, 1, 6).unwrap();
    let lp = |tw: &FieldTower| {
        let d = families::lp_deltas(tw).next().unwrap();
        families::lunardon_polverino(tw, 1, d).unwrap().poly
    };
    let p54 = vec![
        families::pseudoregulus(&t54, 1).unwrap().poly,
        families::pseudoregulus(&t54, 3).unwrap().poly,
        lp(&t54),
    ];
    let p34 = vec![lp(&t34)];
    let mut p56: Vec<LinearizedPoly> =
        families::psi_hs(&t56, 3).take(2).map(|h| families::psi(&t56, h, 3, 1).unwrap().poly).collect();
    p56.push(families::find_half_degree(&t56, 1).unwrap().poly);
    for d in families::trinomial_deltas(&t56).into_iter().take(1) {
        p56.push(families::trinomial(&t56, d).unwrap().poly);
    }
    vec![(t54, p54), (t34, p34), (t56, p56)]
}

#[test]
fn standard_form_structure_on_the_catalog() {
    for (tw, polys) in catalog() {
        for f in polys {
            let sf = standard_form::to_standard_form(&tw, &f).unwrap();
            let t = stabilizer::analyze(&tw, &f).unwrap().certificate.unwrap().t;
            assert_eq!(sf.t, t);
            assert_eq!(sf.h.delta_profile().unwrap().t_h, t);
            // U_f P^-1 = U_h, on every vector
            let p_inv = sf.p.inverse(&tw).unwrap();
            for x in tw.elements() {
                let (u, v) = p_inv.apply(&tw, (x, f.eval(&tw, x)));
                assert_eq!(sf.h.eval(&tw, u), v);
            }
            let gh = stabilizer::stabilizer_of_scattered(&tw, &sf.h).unwrap();
            assert_eq!(gh.order(&tw), tw.q_pow(t) as u128);
            for m in gh.elements(&tw) {
                assert!(m.is_diagonal());
                assert_eq!(tw.frob(m.a, sf.s), m.d);
                assert!(tw.in_subfield(m.a, t).unwrap());
            }
            // standard forms are bijective
            assert!(sf.h.invert(&tw).is_ok());
        }
    }
}

#[test]
fn canonical_form_absorbs_rescaling_and_inversion() {
    let tw = FieldTower::new(5, 1, 6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = families::psi_hs(&tw, 3).next().unwrap();
    let sf = standard_form::to_standard_form(&tw, &families::psi(&tw, h, 3, 1).unwrap().poly).unwrap();
    let base = standard_form::canonicalize(&tw, &sf.h).unwrap();
    for _ in 0..4 {
        let (a, b) = (random_element(&tw, &mut rng), random_element(&tw, &mut rng));
        if a.is_zero() || b.is_zero() {
            continue;
        }
        let g = sf.h.scale(&tw, a).rescale_input(&tw, b);
        assert_eq!(standard_form::canonicalize(&tw, &g).unwrap().poly, base.poly);
        let gi = sf.h.invert(&tw).unwrap().scale(&tw, a).rescale_input(&tw, b);
        assert_eq!(standard_form::canonicalize(&tw, &gi).unwrap().poly, base.poly);
    }
    // the witness carries U_h onto U_canonical
    let w = base.witness(&tw);
    for x in tw.elements().step_by(17) {
        let (u, v) = w.apply(&tw, (x, sf.h.eval(&tw, x)));
        assert_eq!(base.poly.eval(&tw, u), v);
    }
}

#[test]
fn conjugates_keep_their_invariants_and_are_equivalent() {
    let tw = FieldTower::new(5, 1, 4).unwrap();
    let d = families::lp_deltas(&tw).next().unwrap();
    let f = families::lunardon_polverino(&tw, 1, d).unwrap().poly;
    let base = stabilizer::analyze(&tw, &f).unwrap().certificate.unwrap().t;
    let size = scatter::linear_set(&tw, &f).size();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 5 {
        let p = Mat2::new(
            random_element(&tw, &mut rng),
            random_element(&tw, &mut rng),
            random_element(&tw, &mut rng),
            random_element(&tw, &mut rng),
        );
        if p.inverse(&tw).is_none() {
            continue;
        }
        let Ok(g) = standard_form::conjugate_by(&tw, &f, &p) else { continue };
        assert!(scatter::is_scattered(&tw, &g));
        assert_eq!(scatter::linear_set(&tw, &g).size(), size);
        assert_eq!(stabilizer::analyze(&tw, &g).unwrap().certificate.unwrap().t, base);
        let eq = standard_form::gl_equivalent(&tw, &f, &g).unwrap();
        assert_eq!(eq.equivalent, Some(true));
        assert!(standard_form::verify_witness(&tw, &f, &g, eq.witness.as_ref().unwrap()));
        let back = standard_form::gl_equivalent(&tw, &g, &f).unwrap();
        assert_eq!(back.equivalent, Some(true));
        checked += 1;
    }
    let refl = standard_form::gammal_equivalent(&tw, &f, &f).unwrap();
    assert_eq!(refl.equivalent, Some(true));
}

#[test]
fn pseudoregulus_and_lp_are_inequivalent() {
    let tw = FieldTower::new(5, 1, 4).unwrap();
    let pr = families::pseudoregulus(&tw, 1).unwrap().poly;
    let d = families::lp_deltas(&tw).next().unwrap();
    let lp = families::lunardon_polverino(&tw, 1, d).unwrap().poly;
    let eq = standard_form::gammal_equivalent(&tw, &pr, &lp).unwrap();
    assert_eq!(eq.equivalent, Some(false));
    assert_eq!(eq.mode, Mode::GammaL);
}

#[test]
fn outside_the_class_is_refused() {
    let tw = FieldTower::new(5, 1, 5).unwrap();
    let d = families::lp_deltas(&tw).next().unwrap();
    let lp = families::lunardon_polverino(&tw, 1, d).unwrap().poly;
    assert!(!standard_form::in_class_s(&tw, &lp).unwrap());
    let err = standard_form::to_standard_form(&tw, &lp).unwrap_err();
    assert_eq!(err.code(), "NotInS");
}

#[test]
fn closed_form_for_psi_matches() {
    let tw = FieldTower::new(5, 1, 6).unwrap();
    for h in families::psi_hs(&tw, 3).take(3) {
        let sf = standard_form::to_standard_form(&tw, &families::psi(&tw, h, 3, 1).unwrap().poly).unwrap();
        let closed = families::psi_standard_form_closed(&tw, h, 3, 1).unwrap();
        assert_eq!(closed.delta_profile().unwrap().t_h, 2);
        assert_eq!(
            standard_form::canonicalize(&tw, &closed).unwrap().poly,
            standard_form::canonicalize(&tw, &sf.h).unwrap().poly
        );
    }
}
