use std::collections::{HashMap, HashSet};

use scattered_core::mat2::{Mat2, ProjPoint};
use scattered_core::plane::{self, Component, PlaneCase};
use scattered_core::{families, Fe, FieldTower, LinearizedPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Key {
    Line(Option<Fe>),
    Scaled(u64),
}

/// Component of a nonzero vector from the definition: an F_(q^n)-line whose
/// slope misses `L_f`, or `λ U_f` keyed by the class of `λ` mod F_q^*.
struct Oracle<'a> {
    tw: &'a FieldTower,
    f: &'a LinearizedPoly,
    slope_witness: HashMap<Fe, Fe>,
}

impl<'a> Oracle<'a> {
    fn new(tw: &'a FieldTower, f: &'a LinearizedPoly) -> Self {
        let mut slope_witness = HashMap::new();
        for u in tw.nonzero_elements() {
            slope_witness.entry(tw.div(f.eval(tw, u), u)).or_insert(u);
        }
        Oracle { tw, f, slope_witness }
    }

    fn key(&self, (x, y): (Fe, Fe)) -> Key {
        let tw = self.tw;
        if x.is_zero() {
            return Key::Line(None);
        }
        let m = tw.div(y, x);
        match self.slope_witness.get(&m) {
            None => Key::Line(Some(m)),
            Some(&u) => {
                let lambda = tw.div(x, u);
                assert_eq!(tw.mul(lambda, self.f.eval(tw, tw.div(x, lambda))), y);
                let classes = (tw.order() - 1) / (tw.q() - 1);
                Key::Scaled(tw.dlog(lambda).unwrap() % classes)
            }
        }
    }
}

fn lp54() -> (FieldTower, LinearizedPoly) {
    let tw = FieldTower::new(5, 1, 4).unwrap();
    let d = families::lp_deltas(&tw).next().unwrap();
    let f = families::lunardon_polverino(&tw, 1, d).unwrap().poly;
    (tw, f)
}

fn psi56() -> (FieldTower, LinearizedPoly) {
    let tw = FieldTower::new(5, 1, 6).unwrap();
    let h = families::psi_hs(&tw, 3).next().unwrap();
    let f = families::psi(&tw, h, 3, 1).unwrap().poly;
    (tw, f)
}

#[test]
fn spread_partitions_the_plane() {
    let (tw, f) = lp54();
    let spread = plane::build_spread(&tw, &f).unwrap();
    let oracle = Oracle::new(&tw, &f);
    let mut sizes: HashMap<Key, u64> = HashMap::new();
    let mut matching: HashMap<Key, Component> = HashMap::new();
    for x in tw.elements() {
        for y in tw.elements() {
            if x.is_zero() && y.is_zero() {
                continue;
            }
            let key = oracle.key((x, y));
            *sizes.entry(key).or_default() += 1;
            let c = spread.component_of(&tw, (x, y)).unwrap();
            assert_eq!(*matching.entry(key).or_insert(c), c);
        }
    }
    assert_eq!(sizes.len() as u64, tw.order() + 1);
    assert!(sizes.values().all(|&s| s == tw.order() - 1));
    let distinct: HashSet<Component> = matching.values().copied().collect();
    assert_eq!(distinct.len(), sizes.len());
    let comps: HashSet<Component> = spread.components().iter().copied().collect();
    assert_eq!(comps, distinct);
    let audit = spread.audit(&tw).unwrap();
    assert!(audit.ok(&tw));
    assert_eq!(audit.overlaps, 0);
}

#[test]
fn collineation_generators_permute_components() {
    let (tw, f) = lp54();
    let spread = plane::build_spread(&tw, &f).unwrap();
    let oracle = Oracle::new(&tw, &f);
    let report = plane::classify_central_collineations(&tw, &f).unwrap();
    let mut maps: Vec<Mat2> = vec![Mat2::scalar(tw.generator())];
    maps.extend(report.groups.iter().filter_map(|g| g.generator));
    for m in maps {
        for &c in spread.components().iter().step_by(7) {
            let basis = spread.fq_basis(&tw, c);
            let sum = basis.iter().fold((Fe::ZERO, Fe::ZERO), |a, v| (tw.add(a.0, v.0), tw.add(a.1, v.1)));
            let image: HashSet<Key> =
                basis.iter().chain([&sum]).map(|&v| oracle.key(m.apply(&tw, v))).collect();
            assert_eq!(image.len(), 1);
        }
    }
}

fn check_homologies(tw: &FieldTower, f: &LinearizedPoly, expected_order: u64) {
    let report = plane::classify_central_collineations(tw, f).unwrap();
    assert_eq!(report.case, PlaneCase::Homologies);
    assert_eq!(report.elations, 0);
    assert_eq!(report.groups.len(), 2);
    assert!(report.consistent());
    let spread = plane::build_spread(tw, f).unwrap();
    for g in &report.groups {
        assert_eq!(g.order, expected_order);
        let gen = g.generator.unwrap();
        // the generator has exactly the group order
        let mut m = gen;
        for _ in 1..g.order {
            assert_ne!(m, Mat2::IDENTITY);
            m = m.mul(tw, &gen);
        }
        assert_eq!(m, Mat2::IDENTITY);
        // axis fixed pointwise, center line fixed as a set
        let (ax, ay) = g.axis.vector();
        for u in tw.elements() {
            let v = (tw.mul(u, ax), tw.mul(u, ay));
            assert_eq!(gen.apply(tw, v), v);
        }
        let (cx, cy) = g.center.vector();
        assert_eq!(ProjPoint::of(tw, gen.apply(tw, (cx, cy))), Some(g.center));
        assert!(!spread.on_linear_set(g.center));
        assert!(!spread.on_linear_set(g.axis));
    }
    assert_eq!(report.groups[0].axis, report.groups[1].center);
    assert_eq!(report.groups[1].axis, report.groups[0].center);
    let lf = spread.scattered_count();
    assert_eq!(lf % expected_order, 0);
}

#[test]
fn lp_plane_has_two_homology_groups() {
    let (tw, f) = lp54();
    check_homologies(&tw, &f, 6);
    let group = plane::linear_collineations(&tw, &f).unwrap();
    assert_eq!(group.order, 624 * 6);
    assert!(group.decomposition_ok && group.generators_preserve_spread);
}

#[test]
fn psi_plane_matches_the_transversals() {
    let (tw, f) = psi56();
    check_homologies(&tw, &f, 6);
    let report = plane::classify_central_collineations(&tw, &f).unwrap();
    assert_eq!(report.group.order, 15624 * 24 / 4);
    let (x, y) = report.transversals.unwrap();
    let centers: HashSet<ProjPoint> = report.groups.iter().map(|g| g.center).collect();
    assert_eq!(centers, HashSet::from([x, y]));
}

#[test]
fn odd_degree_lp_plane_has_no_central_collineations() {
    let tw = FieldTower::new(5, 1, 5).unwrap();
    let d = families::lp_deltas(&tw).next().unwrap();
    let f = families::lunardon_polverino(&tw, 1, d).unwrap().poly;
    let report = plane::classify_central_collineations(&tw, &f).unwrap();
    assert_eq!(report.case, PlaneCase::NoCentral);
    assert!(report.groups.is_empty());
    assert_eq!(report.homologies + report.elations, 0);
    assert!(report.consistent());
    assert_eq!(plane::reducibility_witness(&tw, &f).unwrap_err().code(), "NotInS");
}

#[test]
fn kernel_is_exactly_the_fq_scalars() {
    let (tw, f) = lp54();
    let audit = plane::kernel_scalar_audit(&tw, &f).unwrap();
    assert!(audit.ok);
    assert_eq!(audit.fixing.len() as u64, tw.q() - 1);
    for k in audit.fixing {
        assert!(tw.is_in_fq(tw.gpow(k)));
    }
}

#[test]
fn reducibility_witnesses() {
    for (tw, f) in [lp54(), psi56()] {
        let w = plane::reducibility_witness(&tw, &f).unwrap();
        assert!(w.verified(&tw));
        assert_eq!(w.stabilizer_size, tw.q_pow(w.t) - 1);
        // the subgroup is proper and its image under P^-1 conjugation lies in U_f P^-1
        let p = w.p;
        for x in tw.subfield_elements(w.t).unwrap() {
            let (a, b) = p.apply(&tw, (x, w.g.eval(&tw, x)));
            assert_eq!(f.eval(&tw, a), b);
        }
    }
    let tw = FieldTower::new(5, 1, 4).unwrap();
    let pr = families::pseudoregulus(&tw, 1).unwrap().poly;
    assert_eq!(plane::reducibility_witness(&tw, &pr).unwrap_err().code(), "PseudoregulusCase");
}

#[test]
fn semilinear_samples_never_fix_with_nontrivial_automorphism() {
    let (tw, f) = lp54();
    let audit = plane::semilinear_part_audit(&tw, &f, 8, 1).unwrap();
    assert_eq!(audit.violations(), 0);
    assert_eq!(audit.nontrivial_fixers(), 0);
    assert!(audit.trivial_consistent());
}

#[test]
fn refusals() {
    let t34 = FieldTower::new(3, 1, 4).unwrap();
    let f = families::pseudoregulus(&t34, 1).unwrap().poly;
    let err = plane::build_spread(&t34, &f).unwrap_err();
    assert_eq!(err.code(), "SmallQ");
    assert!(err.is_refusal());
    let t52 = FieldTower::new(5, 1, 2).unwrap();
    let g = LinearizedPoly::monomial(&t52, 1, Fe::ONE);
    assert_eq!(plane::build_spread(&t52, &g).unwrap_err().code(), "HallCase");
    let t78 = FieldTower::new(7, 1, 8).unwrap();
    let h = LinearizedPoly::monomial(&t78, 1, Fe::ONE);
    assert_eq!(plane::build_spread(&t78, &h).unwrap_err().code(), "TooLarge");
}
