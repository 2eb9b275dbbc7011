//! The translation plane `A_f` of a scattered polynomial: its spread, its
//! linear collineation group `H_f = F_(q^n)^* G_f`, the affine central
//! collineations, and the invariant-subgroup witness against the generalized
//! André property.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::arith::factorize;
use crate::error::{Error, Result};
use crate::field::{ElementFormat, Fe, FieldTower};
use crate::linearized::{FastEval, LinearizedPoly};
use crate::mat2::{Mat2, ProjPoint};
use crate::scatter;
use crate::stabilizer::{self, FieldCertificate};
use crate::standard_form;

/// Largest `q^n` for which plane operations run.
pub const MAX_PLANE_ORDER: u64 = 1 << 22;
/// Largest `q^n` for the exhaustive spread audit (a bitmap of `q^(2n)` bits).
pub const MAX_AUDIT_ORDER: u64 = 1 << 15;

/// A component of the spread `B_f`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Component {
    /// An F_(q^n)-line off `L_f`.
    Desarguesian(ProjPoint),
    /// `g^k U_f`, `0 <= k < (q^n-1)/(q-1)`.
    Scattered(u64),
}

impl Component {
    pub fn to_json(&self, tw: &FieldTower, fmt: ElementFormat) -> Value {
        match self {
            Component::Desarguesian(pt) => json!({"desarguesian": pt.to_json(tw, fmt)}),
            Component::Scattered(k) => json!({"scattered": format!("g^{k}")}),
        }
    }
}

fn check_plane_field(tw: &FieldTower) -> Result<()> {
    if tw.q() <= 3 {
        return Err(Error::SmallQ { q: tw.q() });
    }
    if tw.n() == 2 {
        return Err(Error::HallCase);
    }
    if tw.n() < 2 {
        return Err(Error::BadParams("plane needs n > 2".into()));
    }
    if tw.order() > MAX_PLANE_ORDER {
        return Err(Error::TooLarge(format!("q^n = {} exceeds {MAX_PLANE_ORDER}", tw.order())));
    }
    Ok(())
}

/// `B_f = (D \ L_f) ∪ {h U_f}`, stored by the slopes of `L_f`.
#[derive(Clone, Debug)]
pub struct Spread {
    f: LinearizedPoly,
    /// Slope `f(x)/x` of `L_f` to the exponent `k` of `x = g^k`.
    slope_rep: HashMap<Fe, u64>,
    classes: u64,
    components: Vec<Component>,
}

pub fn build_spread(tw: &FieldTower, f: &LinearizedPoly) -> Result<Spread> {
    check_plane_field(tw)?;
    let ratios = scatter::ratios(tw, f);
    let classes = ratios.len() as u64;
    let slope_rep: HashMap<Fe, u64> = ratios.into_iter().enumerate().map(|(k, m)| (m, k as u64)).collect();
    if slope_rep.len() as u64 != classes {
        return Err(Error::NotScattered);
    }
    let mut des: Vec<ProjPoint> = tw
        .elements()
        .map(ProjPoint::Affine)
        .chain(std::iter::once(ProjPoint::Infinity))
        .filter(|&pt| !matches!(pt, ProjPoint::Affine(m) if slope_rep.contains_key(&m)))
        .collect();
    des.sort_by_cached_key(|pt| pt.sort_key(tw));
    let components = des
        .into_iter()
        .map(Component::Desarguesian)
        .chain((0..classes).map(Component::Scattered))
        .collect();
    Ok(Spread { f: f.clone(), slope_rep, classes, components })
}

impl Spread {
    pub fn poly(&self) -> &LinearizedPoly {
        &self.f
    }

    pub fn component_count(&self, tw: &FieldTower) -> u64 {
        tw.order() + 1
    }

    pub fn scattered_count(&self) -> u64 {
        self.classes
    }

    pub fn desarguesian_count(&self, tw: &FieldTower) -> u64 {
        tw.order() + 1 - self.classes
    }

    pub fn on_linear_set(&self, pt: ProjPoint) -> bool {
        match pt {
            ProjPoint::Affine(m) => self.slope_rep.contains_key(&m),
            ProjPoint::Infinity => false,
        }
    }

    /// All components: Desarguesian ones in point order, then `g^k U_f` by `k`.
    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// The component through a nonzero vector.
    pub fn component_of(&self, tw: &FieldTower, v: (Fe, Fe)) -> Option<Component> {
        let pt = ProjPoint::of(tw, v)?;
        match pt {
            ProjPoint::Affine(m) => match self.slope_rep.get(&m) {
                Some(&k) => {
                    // v = lambda (x, f(x)) with x = g^k
                    let lambda = tw.div(v.0, tw.gpow(k));
                    let l = tw.dlog(lambda).expect("nonzero");
                    Some(Component::Scattered(l % self.classes))
                }
                None => Some(Component::Desarguesian(pt)),
            },
            ProjPoint::Infinity => Some(Component::Desarguesian(pt)),
        }
    }

    fn span_basis(&self, tw: &FieldTower, c: Component, basis: &[Fe]) -> Vec<(Fe, Fe)> {
        match c {
            Component::Desarguesian(pt) => {
                let (x, y) = pt.vector();
                basis.iter().map(|&u| (tw.mul(u, x), tw.mul(u, y))).collect()
            }
            Component::Scattered(k) => {
                let h = tw.gpow(k);
                basis.iter().map(|&u| (tw.mul(h, u), tw.mul(h, self.f.eval(tw, u)))).collect()
            }
        }
    }

    /// An F_q-basis of the component.
    pub fn fq_basis(&self, tw: &FieldTower, c: Component) -> Vec<(Fe, Fe)> {
        self.span_basis(tw, c, tw.fq_basis())
    }

    /// An F_p-basis of the component.
    pub fn fp_basis(&self, tw: &FieldTower, c: Component) -> Vec<(Fe, Fe)> {
        self.span_basis(tw, c, &tw.fp_basis())
    }

    /// Image of a component under an F_q-semilinear bijection, when it is again
    /// a component.
    pub fn image<F>(&self, tw: &FieldTower, c: Component, map: F) -> Option<Component>
    where
        F: Fn((Fe, Fe)) -> (Fe, Fe),
    {
        let mut target = None;
        for v in self.fq_basis(tw, c) {
            let w = self.component_of(tw, map(v))?;
            match target {
                None => target = Some(w),
                Some(t) if t != w => return None,
                _ => {}
            }
        }
        target
    }

    /// The map sends every component onto a component.
    pub fn preserved_by<F>(&self, tw: &FieldTower, map: F) -> bool
    where
        F: Fn((Fe, Fe)) -> (Fe, Fe) + Sync,
    {
        self.components.par_iter().all(|&c| self.image(tw, c, &map).is_some())
    }

    /// The map sends every component onto itself. Scattered components are
    /// tried first, since only they can fail for scalar maps.
    pub fn fixes_every_component<F>(&self, tw: &FieldTower, map: F) -> bool
    where
        F: Fn((Fe, Fe)) -> (Fe, Fe),
    {
        let split = self.components.len() - self.classes as usize;
        let (des, scat) = self.components.split_at(split);
        scat.iter().chain(des).all(|&c| self.image(tw, c, &map) == Some(c))
    }

    /// Exhaustive check of the spread axioms: marks every nonzero vector of
    /// every component in a bitmap of `F_(q^n)^2`.
    pub fn audit(&self, tw: &FieldTower) -> Result<SpreadAudit> {
        let n_ord = tw.order();
        if n_ord > MAX_AUDIT_ORDER {
            return Err(Error::TooLarge(format!("spread audit needs q^n <= {MAX_AUDIT_ORDER}")));
        }
        let elems: Vec<Fe> = tw.elements().collect();
        let ev = FastEval::new(tw, &self.f);
        let f_table: Vec<Fe> = elems.par_iter().map(|&x| ev.eval(x)).collect();
        let total = (n_ord * n_ord) as usize;
        let bits: Vec<AtomicU64> = (0..total.div_ceil(64)).map(|_| AtomicU64::new(0)).collect();
        let overlaps = AtomicUsize::new(0);
        let mark = |x: Fe, y: Fe| {
            let idx = (x.index() * n_ord + y.index()) as usize;
            let bit = 1u64 << (idx % 64);
            if bits[idx / 64].fetch_or(bit, Ordering::Relaxed) & bit != 0 {
                overlaps.fetch_add(1, Ordering::Relaxed);
            }
        };
        let comps = &self.components;
        comps.par_iter().for_each(|&c| match c {
            Component::Desarguesian(pt) => {
                let (x, y) = pt.vector();
                for &l in &elems[1..] {
                    mark(tw.mul(l, x), tw.mul(l, y));
                }
            }
            Component::Scattered(k) => {
                let h = tw.gpow(k);
                for &z in &elems[1..] {
                    mark(tw.mul(h, z), tw.mul(h, f_table[z.index() as usize]));
                }
            }
        });
        let covered: u64 = bits.iter().map(|b| b.load(Ordering::Relaxed).count_ones() as u64).sum();
        let origin_marked = bits[0].load(Ordering::Relaxed) & 1 != 0;
        Ok(SpreadAudit {
            components: comps.len() as u64,
            desarguesian: self.desarguesian_count(tw),
            scattered: self.classes,
            overlaps: overlaps.into_inner() as u64,
            covered_nonzero: covered - origin_marked as u64,
            nonzero_vectors: n_ord * n_ord - 1,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpreadAudit {
    pub components: u64,
    pub desarguesian: u64,
    pub scattered: u64,
    /// Nonzero vectors lying on two components (counted per extra hit).
    pub overlaps: u64,
    pub covered_nonzero: u64,
    pub nonzero_vectors: u64,
}

impl SpreadAudit {
    pub fn ok(&self, tw: &FieldTower) -> bool {
        self.components == tw.order() + 1
            && self.overlaps == 0
            && self.covered_nonzero == self.nonzero_vectors
    }

    pub fn to_json(&self) -> Value {
        json!({
            "components": self.components,
            "desarguesian": self.desarguesian,
            "scattered": self.scattered,
            "overlaps": self.overlaps,
            "covered_nonzero": self.covered_nonzero,
            "nonzero_vectors": self.nonzero_vectors,
        })
    }
}

struct Setup {
    spread: Spread,
    cert: FieldCertificate,
}

fn setup(tw: &FieldTower, f: &LinearizedPoly) -> Result<Setup> {
    let spread = build_spread(tw, f)?;
    let mf = stabilizer::stabilizer_of_scattered(tw, f)?;
    let cert = stabilizer::verify_field(tw, &mf)?;
    Ok(Setup { spread, cert })
}

/// `d Γ^j` for `d = g^k`, `k < (q^n-1)/(q-1)`, and `Γ` generating `G_f`.
fn h_f_elements(tw: &FieldTower, cert: &FieldCertificate) -> Vec<Mat2> {
    let g_order = tw.q_pow(cert.t) - 1;
    let mut g_f = Vec::with_capacity(g_order as usize);
    let mut m = Mat2::IDENTITY;
    for _ in 0..g_order {
        g_f.push(m);
        m = m.mul(tw, &cert.generator);
    }
    let classes = scatter::projective_count(tw);
    (0..classes)
        .into_par_iter()
        .flat_map_iter(|k| {
            let d = tw.gpow(k);
            g_f.iter().map(move |m| m.scale(tw, d)).collect::<Vec<_>>()
        })
        .collect()
}

/// `H_f = F_(q^n)^* G_f`, the linear collineations of `A_f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollineationGroup {
    pub t: usize,
    pub order: u128,
    /// `q^n - 1`: the scalar maps.
    pub scalar_part: u64,
    /// `(q^t-1)/(q-1)`.
    pub homology_part: u64,
    /// The products `d M` (with `d` modulo F_q^*) are pairwise distinct.
    pub decomposition_ok: bool,
    /// `g I` and a generator of `G_f` both permute the components.
    pub generators_preserve_spread: bool,
}

pub fn linear_collineations(tw: &FieldTower, f: &LinearizedPoly) -> Result<CollineationGroup> {
    let st = setup(tw, f)?;
    Ok(collineations_of(tw, &st, &h_f_elements(tw, &st.cert)))
}

fn collineations_of(tw: &FieldTower, st: &Setup, elems: &[Mat2]) -> CollineationGroup {
    let distinct: HashSet<&Mat2> = elems.iter().collect();
    let homology_part = (tw.q_pow(st.cert.t) - 1) / (tw.q() - 1);
    let scalar_part = tw.order() - 1;
    let order = scalar_part as u128 * homology_part as u128;
    let g = tw.generator();
    let gen = st.cert.generator;
    let generators_preserve_spread = st.spread.preserved_by(tw, |(x, y)| (tw.mul(g, x), tw.mul(g, y)))
        && st.spread.preserved_by(tw, |v| gen.apply(tw, v));
    CollineationGroup {
        t: st.cert.t,
        order,
        scalar_part,
        homology_part,
        decomposition_ok: distinct.len() as u128 == order,
        generators_preserve_spread,
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum PlaneCase {
    /// `G_f` is `F_q^*`: no affine central collineations.
    NoCentral,
    /// `G_f` is `F_(q^t)^*`, `t > 1`: two symmetric homology groups.
    Homologies,
}

impl PlaneCase {
    pub fn label(self) -> &'static str {
        match self {
            PlaneCase::NoCentral => "i",
            PlaneCase::Homologies => "ii",
        }
    }
}

/// The affine homologies of `A_f` sharing one center (and hence one axis),
/// together with the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyGroup {
    pub center: ProjPoint,
    pub axis: ProjPoint,
    pub order: u64,
    pub cyclic: bool,
    pub generator: Option<Mat2>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyReport {
    pub case: PlaneCase,
    pub t: usize,
    pub x: Option<ProjPoint>,
    pub y: Option<ProjPoint>,
    /// Groups ordered by center.
    pub groups: Vec<HomologyGroup>,
    pub homologies: u64,
    pub elations: u64,
    pub group: CollineationGroup,
    /// The common eigen-directions of `G_f`, when `t > 1`.
    pub transversals: Option<(ProjPoint, ProjPoint)>,
    pub axes_swapped: bool,
    pub centers_off_linear_set: bool,
    /// `(q^t-1)/(q-1)` divides `|L_f|` and `|L_f \ {X, Y}|`.
    pub orbit_divisibility: bool,
}

fn matrix_order_is(tw: &FieldTower, m: &Mat2, order: u64) -> bool {
    m.pow(tw, order) == Mat2::IDENTITY
        && factorize(order).iter().all(|&(r, _)| m.pow(tw, order / r) != Mat2::IDENTITY)
}

/// Axis and center of a nonidentity linear map, when it is central.
fn central_data(tw: &FieldTower, spread: &Spread, a: &Mat2) -> Option<(ProjPoint, ProjPoint)> {
    let b = a.sub(tw, &Mat2::IDENTITY);
    if b.is_zero() || !b.det(tw).is_zero() {
        return None;
    }
    // left kernel of the rank-one matrix b, and its row space
    let kernel = if !b.c.is_zero() || !b.a.is_zero() { (b.c, tw.neg(b.a)) } else { (b.d, tw.neg(b.b)) };
    let row = if !b.a.is_zero() || !b.b.is_zero() { (b.a, b.b) } else { (b.c, b.d) };
    let axis = ProjPoint::of(tw, kernel)?;
    let center = ProjPoint::of(tw, row)?;
    // lines through the origin inside L_f are not components
    (!spread.on_linear_set(axis) && !spread.on_linear_set(center)).then_some((axis, center))
}

/// A center with the (axis, matrix) pairs of its homologies.
type CenterMembers = (ProjPoint, Vec<(ProjPoint, Mat2)>);

/// Enumerates `H_f` and classifies its affine central collineations.
pub fn classify_central_collineations(tw: &FieldTower, f: &LinearizedPoly) -> Result<HomologyReport> {
    let st = setup(tw, f)?;
    let elems = h_f_elements(tw, &st.cert);
    let group = collineations_of(tw, &st, &elems);
    let central: Vec<(ProjPoint, ProjPoint, Mat2)> = elems
        .par_iter()
        .filter_map(|a| central_data(tw, &st.spread, a).map(|(ax, c)| (ax, c, *a)))
        .collect();
    let elations = central.iter().filter(|(ax, c, _)| ax == c).count() as u64;
    let mut by_center: BTreeMap<(u8, u64), CenterMembers> = BTreeMap::new();
    for &(ax, c, m) in central.iter().filter(|(ax, c, _)| ax != c) {
        by_center.entry(c.sort_key(tw)).or_insert_with(|| (c, Vec::new())).1.push((ax, m));
    }
    let mut groups = Vec::new();
    let mut homologies = 0;
    for (_, (center, members)) in by_center {
        homologies += members.len() as u64;
        let axes: HashSet<ProjPoint> = members.iter().map(|&(ax, _)| ax).collect();
        let order = members.len() as u64 + 1;
        let generator = members.iter().map(|&(_, m)| m).find(|m| matrix_order_is(tw, m, order));
        let cyclic = axes.len() == 1
            && generator.is_some_and(|gen| {
                let powers: HashSet<Mat2> = (1..order).map(|i| gen.pow(tw, i)).collect();
                members.iter().all(|(_, m)| powers.contains(m))
            });
        groups.push(HomologyGroup {
            center,
            axis: if axes.len() == 1 { *axes.iter().next().unwrap() } else { center },
            order,
            cyclic,
            generator,
        });
    }
    let transversals = if st.cert.t > 1 { Some(stabilizer::transversal_points(tw, f)?) } else { None };
    let axes_swapped = groups.len() == 2 && groups[0].axis == groups[1].center && groups[1].axis == groups[0].center;
    let centers_off_linear_set = groups.iter().all(|g| !st.spread.on_linear_set(g.center));
    let m = group.homology_part;
    let lf = st.spread.scattered_count();
    let on_lf = groups.iter().filter(|g| st.spread.on_linear_set(g.center)).count() as u64;
    Ok(HomologyReport {
        case: if st.cert.t == 1 { PlaneCase::NoCentral } else { PlaneCase::Homologies },
        t: st.cert.t,
        x: groups.first().map(|g| g.center),
        y: groups.get(1).map(|g| g.center),
        homologies,
        elations,
        transversals,
        axes_swapped,
        centers_off_linear_set,
        orbit_divisibility: lf % m == 0 && (lf - on_lf).is_multiple_of(m),
        groups,
        group,
    })
}

impl HomologyReport {
    pub fn homology_group_order(&self) -> u64 {
        self.group.homology_part
    }

    /// Every structural claim holds for this plane.
    pub fn consistent(&self) -> bool {
        let group_ok = self.group.decomposition_ok && self.group.generators_preserve_spread;
        match self.case {
            PlaneCase::NoCentral => group_ok && self.groups.is_empty() && self.elations == 0,
            PlaneCase::Homologies => {
                let centers: HashSet<ProjPoint> = self.groups.iter().map(|g| g.center).collect();
                let expected: HashSet<ProjPoint> =
                    self.transversals.iter().flat_map(|&(a, b)| [a, b]).collect();
                group_ok
                    && self.groups.len() == 2
                    && self.groups.iter().all(|g| g.cyclic && g.order == self.group.homology_part)
                    && self.axes_swapped
                    && self.elations == 0
                    && self.centers_off_linear_set
                    && self.orbit_divisibility
                    && centers == expected
            }
        }
    }

    pub fn to_json(&self, tw: &FieldTower, fmt: ElementFormat) -> Value {
        let pt = |p: Option<ProjPoint>| p.map_or(Value::Null, |p| p.to_json(tw, fmt));
        json!({
            "case": self.case.label(),
            "t": self.t,
            "X": pt(self.x),
            "Y": pt(self.y),
            "homology_group_order": self.homology_group_order(),
            "homologies": self.homologies,
            "elations": self.elations,
            "H_f_order": stabilizer::order_json(self.group.order),
            "decomposition_ok": self.group.decomposition_ok,
            "generators_preserve_spread": self.group.generators_preserve_spread,
            "axes_swapped": self.axes_swapped,
            "groups": self.groups.iter().map(|g| json!({
                "center": g.center.to_json(tw, fmt),
                "axis": g.axis.to_json(tw, fmt),
                "order": g.order,
                "cyclic": g.cyclic,
                "generator": g.generator.map_or(Value::Null, |m| m.to_json(tw, fmt)),
            })).collect::<Vec<_>>(),
            "consistent": self.consistent(),
        })
    }
}

/// One semilinear map `v -> v^(p^k) A` fixing a component pointwise, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemilinearSample {
    pub component: Component,
    pub k: usize,
    pub matrix: Option<Mat2>,
    /// `Some(true)` when the pointwise-fixing map also permutes `B_f`.
    pub stabilizes: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemilinearAudit {
    pub samples: Vec<SemilinearSample>,
}

impl SemilinearAudit {
    /// Pointwise-fixing maps with a nontrivial automorphism that permute `B_f`.
    pub fn violations(&self) -> usize {
        self.samples.iter().filter(|s| s.k != 0 && s.stabilizes == Some(true)).count()
    }

    /// Pointwise-fixing maps found for nontrivial automorphisms.
    pub fn nontrivial_fixers(&self) -> usize {
        self.samples.iter().filter(|s| s.k != 0 && s.matrix.is_some()).count()
    }

    /// With `k = 0` the only pointwise-fixing map is the identity, which lies in `H_f`.
    pub fn trivial_consistent(&self) -> bool {
        self.samples
            .iter()
            .filter(|s| s.k == 0)
            .all(|s| s.matrix.is_none_or(|m| m == Mat2::IDENTITY) && s.stabilizes != Some(false))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "samples": self.samples.len(),
            "nontrivial_fixers": self.nontrivial_fixers(),
            "violations": self.violations(),
            "trivial_consistent": self.trivial_consistent(),
        })
    }
}

fn frob_vec(tw: &FieldTower, v: (Fe, Fe), k: usize) -> (Fe, Fe) {
    (tw.frob_p(v.0, k), tw.frob_p(v.1, k))
}

fn semilinear_sample(tw: &FieldTower, spread: &Spread, c: Component, k: usize) -> SemilinearSample {
    let basis = spread.fp_basis(tw, c);
    let det = |u: (Fe, Fe), v: (Fe, Fe)| tw.sub(tw.mul(u.0, v.1), tw.mul(u.1, v.0));
    let w1 = basis[0];
    let matrix = basis.iter().find(|&&w| !det(w1, w).is_zero()).and_then(|&w2| {
        // rows: sigma(w_i) A = w_i
        let src = Mat2::from_rows(frob_vec(tw, w1, k), frob_vec(tw, w2, k));
        let dst = Mat2::from_rows(w1, w2);
        let a = src.inverse(tw)?.mul(tw, &dst);
        basis.iter().all(|&w| a.apply(tw, frob_vec(tw, w, k)) == w).then_some(a)
    });
    // An F_(q^n)-line is fixed pointwise only for the trivial automorphism,
    // in which case any A fixing it pointwise is a homology or the identity.
    let matrix = match matrix {
        None if basis.iter().all(|&w| det(w1, w).is_zero()) && k == 0 => None,
        m => m,
    };
    let stabilizes = matrix.map(|a| spread.preserved_by(tw, |v| a.apply(tw, frob_vec(tw, v, k))));
    SemilinearSample { component: c, k, matrix, stabilizes }
}

/// Samples semilinear maps that fix a component pointwise and checks that
/// none with a nontrivial automorphism permutes `B_f`.
pub fn semilinear_part_audit(
    tw: &FieldTower,
    f: &LinearizedPoly,
    sample_size: usize,
    seed: u64,
) -> Result<SemilinearAudit> {
    let st = setup(tw, f)?;
    let spread = &st.spread;
    let comps = spread.components();
    let ep = tw.degree();
    let mut plan: Vec<(Component, usize)> = vec![(Component::Scattered(0), 0)];
    if st.cert.t == tw.n() {
        let mf = stabilizer::stabilizer_of_scattered(tw, f)?;
        let d = stabilizer::diagonalize(tw, &mf, &st.cert)?;
        let e = tw.e() as usize;
        plan.push((Component::Scattered(0), e * d.s % ep));
        plan.push((Component::Scattered(0), e * (tw.n() - d.s) % ep));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..sample_size {
        let c = comps[rng.gen_range(0..comps.len())];
        plan.push((c, rng.gen_range(1..ep)));
    }
    let samples = plan.into_iter().map(|(c, k)| semilinear_sample(tw, spread, c, k)).collect();
    Ok(SemilinearAudit { samples })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelAudit {
    /// Exponents `k` such that `(x, y) -> g^k (x, y)` fixes every component.
    pub fixing: Vec<u64>,
    pub ok: bool,
}

/// Among the maps `(x, y) -> a (x, y)`, exactly those with `a` in F_q^* fix
/// every component.
pub fn kernel_scalar_audit(tw: &FieldTower, f: &LinearizedPoly) -> Result<KernelAudit> {
    let spread = build_spread(tw, f)?;
    let mut fixing: Vec<u64> = (0..tw.order() - 1)
        .into_par_iter()
        .filter(|&k| {
            let a = tw.gpow(k);
            spread.fixes_every_component(tw, |(x, y)| (tw.mul(a, x), tw.mul(a, y)))
        })
        .collect();
    fixing.sort_unstable();
    let step = scatter::projective_count(tw);
    let expected: Vec<u64> = (0..tw.q() - 1).map(|i| i * step).collect();
    Ok(KernelAudit { ok: fixing == expected, fixing })
}

/// `W = {(x, g(x))}`, a component of the conjugated spread `B_f P^-1`, and its
/// proper subgroup `{(x, g(x)) : x in F_(q^t)}` invariant under the stabilizer
/// of `W` in `P H_f P^-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AndreWitness {
    pub t: usize,
    pub s: usize,
    pub g: LinearizedPoly,
    pub p: Mat2,
    /// `U_f P^-1 = W`, checked on an F_p-basis.
    pub component_ok: bool,
    /// Elements of `P H_f P^-1` stabilizing `W`.
    pub stabilizer_size: u64,
    pub invariant: bool,
}

impl AndreWitness {
    pub fn verified(&self, tw: &FieldTower) -> bool {
        self.component_ok && self.invariant && self.stabilizer_size == tw.q_pow(self.t) - 1 && self.t < tw.n()
    }

    pub fn to_json(&self, tw: &FieldTower, fmt: ElementFormat) -> Value {
        json!({
            "t": self.t,
            "s": self.s,
            "g": self.g.to_json(tw, fmt)["coeffs"],
            "P": self.p.to_json(tw, fmt),
            "subgroup_fq_dim": self.t,
            "stabilizer_size": self.stabilizer_size,
            "verified": self.verified(tw),
        })
    }
}

pub fn reducibility_witness(tw: &FieldTower, f: &LinearizedPoly) -> Result<AndreWitness> {
    let st = setup(tw, f)?;
    if st.cert.t == 1 {
        return Err(Error::NotInS);
    }
    if st.cert.t == tw.n() {
        return Err(Error::PseudoregulusCase);
    }
    let sf = standard_form::to_standard_form(tw, f)?;
    let (g, p, t) = (&sf.h, sf.p, sf.t);
    let p_inv = p.inverse(tw).expect("nonsingular");
    let on_w = |v: (Fe, Fe)| g.eval(tw, v.0) == v.1;
    let component_ok = tw.fp_basis().into_iter().all(|u| on_w(p_inv.apply(tw, (u, f.eval(tw, u)))));
    let w_basis: Vec<(Fe, Fe)> = tw.fq_basis().iter().map(|&x| (x, g.eval(tw, x))).collect();
    let omega = tw.subfield_primitive(t)?;
    let s_basis: Vec<(Fe, Fe)> = (0..t)
        .map(|j| tw.pow(omega, j as u128))
        .map(|x| (x, g.eval(tw, x)))
        .collect();
    let in_s = |v: (Fe, Fe)| tw.in_subfield(v.0, t).unwrap_or(false) && on_w(v);
    let stabilizers: Vec<Mat2> = h_f_elements(tw, &st.cert)
        .into_par_iter()
        .map(|a| p.mul(tw, &a).mul(tw, &p_inv))
        .filter(|a| w_basis.iter().all(|&w| on_w(a.apply(tw, w))))
        .collect();
    let invariant = stabilizers.iter().all(|a| s_basis.iter().all(|&v| in_s(a.apply(tw, v))));
    Ok(AndreWitness {
        t,
        s: sf.s,
        g: g.clone(),
        p,
        component_ok,
        stabilizer_size: stabilizers.len() as u64,
        invariant,
    })
}

/// Plane analysis as emitted by the CLI.
pub fn analyze(tw: &FieldTower, f: &LinearizedPoly, fmt: ElementFormat) -> Result<Value> {
    let report = classify_central_collineations(tw, f)?;
    let mut v = report.to_json(tw, fmt);
    v["andre_witness"] = match reducibility_witness(tw, f) {
        Ok(w) => w.to_json(tw, fmt),
        Err(Error::PseudoregulusCase) => json!("pseudoregulus"),
        Err(Error::NotInS) => Value::Null,
        Err(e) => return Err(e),
    };
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pseudoregulus(tw: &FieldTower) -> LinearizedPoly {
        LinearizedPoly::monomial(tw, 1, Fe::ONE)
    }

    #[test]
    fn refusals() {
        let tw = FieldTower::new(3, 1, 4).unwrap();
        assert_eq!(build_spread(&tw, &pseudoregulus(&tw)).unwrap_err(), Error::SmallQ { q: 3 });
        let tw = FieldTower::new(5, 1, 2).unwrap();
        assert_eq!(build_spread(&tw, &pseudoregulus(&tw)).unwrap_err(), Error::HallCase);
        let tw = FieldTower::new(5, 1, 4).unwrap();
        let bad = LinearizedPoly::monomial(&tw, 2, Fe::ONE);
        assert_eq!(build_spread(&tw, &bad).unwrap_err(), Error::NotScattered);
    }

    #[test]
    fn pseudoregulus_spread() {
        let tw = FieldTower::new(5, 1, 4).unwrap();
        let sp = build_spread(&tw, &pseudoregulus(&tw)).unwrap();
        assert_eq!(sp.components().len(), 626);
        assert_eq!(sp.scattered_count(), 156);
        assert_eq!(sp.desarguesian_count(&tw), 470);
        assert!(sp.audit(&tw).unwrap().ok(&tw));
        let v = (tw.gpow(17), tw.gpow(17 * 5));
        assert_eq!(sp.component_of(&tw, v), Some(Component::Scattered(0)));
    }

    #[test]
    fn kernel_scalars() {
        let tw = FieldTower::new(5, 1, 4).unwrap();
        let audit = kernel_scalar_audit(&tw, &pseudoregulus(&tw)).unwrap();
        assert!(audit.ok);
        assert_eq!(audit.fixing.len(), 4);
    }
}
