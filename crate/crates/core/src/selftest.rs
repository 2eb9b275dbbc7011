//! Self-test suite: the acceptance criteria at their smallest parameters, each
//! producing a one-line pass/fail verdict.

use std::collections::BTreeSet;
use std::rc::Rc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::families;
use crate::field::{Fe, FieldTower};
use crate::linearized::LinearizedPoly;
use crate::mat2::{Mat2, ProjPoint};
use crate::mrd;
use crate::plane;
use crate::scatter;
use crate::stabilizer;
use crate::standard_form;

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let limit = self.limit.map_or(String::new(), |l| format!(" / limit {}s", l.as_secs()));
        format!(
            "[{}] {:>2} {} ({:.2}s{}): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            limit,
            self.detail
        )
    }
}

pub const CRITERIA: [(u8, &str, Option<u64>); 11] = [
    (1, "pseudoregulus stabilizer", Some(5)),
    (2, "Lunardon-Polverino dichotomy", Some(10)),
    (3, "psi stabilizer", Some(30)),
    (4, "diagonalization identity", None),
    (5, "standard form closed forms", None),
    (6, "standard form structure", None),
    (7, "MRD and right idealizer", Some(10)),
    (8, "plane central collineations", Some(60)),
    (9, "André exclusion witness", None),
    (10, "oracle cross-validation", None),
    (11, "property suites", None),
];

/// Criteria run under `quick`.
pub const QUICK: [u8; 7] = [1, 2, 3, 4, 7, 9, 10];

pub fn run_criterion(id: u8, quick: bool) -> Option<CriterionResult> {
    let &(id, name, limit) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let outcome = match id {
        1 => pseudoregulus_stabilizer(),
        2 => lp_dichotomy(),
        3 => psi_stabilizer(),
        4 => diagonalization_identity(),
        5 => closed_forms(),
        6 => standard_form_structure(),
        7 => mrd_check(),
        8 => plane_structure(),
        9 => andre_witness(),
        10 => oracles(if quick { 10 } else { 50 }),
        _ => properties(quick),
    };
    let elapsed = start.elapsed();
    let limit = limit.map(Duration::from_secs);
    let (mut passed, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(e) => (false, e.to_string()),
    };
    if let Some(l) = limit.filter(|&l| elapsed > l) {
        passed = false;
        detail = format!("{detail}; exceeded {}s", l.as_secs());
    }
    Some(CriterionResult { id, name, passed, detail, elapsed, limit })
}

pub fn run(quick: bool) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .map(|c| c.0)
        .filter(|id| !quick || QUICK.contains(id))
        .filter_map(|id| run_criterion(id, quick))
        .collect()
}

fn fail(msg: impl Into<String>) -> Error {
    Error::Mismatch(msg.into())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(fail(msg()))
    }
}

fn stabilizer_set(tw: &FieldTower, f: &LinearizedPoly) -> BTreeSet<Mat2> {
    stabilizer::stabilizer_space(tw, f).elements(tw).filter(|m| !m.is_zero()).collect()
}

fn diag_frobenius(tw: &FieldTower, t: usize, s: usize) -> Result<BTreeSet<Mat2>> {
    Ok(tw
        .nonzero_elements()
        .filter(|&a| tw.in_subfield(a, t).unwrap_or(false))
        .map(|a| Mat2::diag(a, tw.frob(a, s)))
        .collect::<BTreeSet<_>>())
        .and_then(|set| if set.is_empty() { Err(fail("empty subfield")) } else { Ok(set) })
}

/// `{ξ : ξ^(q^s) + ξ = 0}` by exhaustive scan.
fn anti_fixed(tw: &FieldTower, s: usize) -> Vec<Fe> {
    tw.elements().filter(|&x| tw.add(tw.frob(x, s), x).is_zero()).collect()
}

fn pseudoregulus_stabilizer() -> Result<String> {
    let tw = FieldTower::new(5, 1, 4)?;
    for s in [1, 3] {
        let f = LinearizedPoly::monomial(&tw, s, Fe::ONE);
        let got = stabilizer_set(&tw, &f);
        let want = diag_frobenius(&tw, 4, s)?;
        ensure(got.len() == 624 && got == want, || format!("s = {s}: |G_f| = {}", got.len()))?;
    }
    Ok("(5,4) s = 1, 3: G_f = {diag(α, α^(q^s))}, order 624".into())
}

fn lp_dichotomy() -> Result<String> {
    let tw = FieldTower::new(5, 1, 4)?;
    let deltas: Vec<Fe> = families::lp_deltas(&tw).step_by(97).take(3).collect();
    for &d in &deltas {
        let inst = families::lunardon_polverino(&tw, 1, d)?;
        let got = stabilizer_set(&tw, &inst.poly);
        ensure(got.len() == 24 && got == diag_frobenius(&tw, 2, 1)?, || {
            format!("(5,4) δ = {}: |G_f| = {}", tw.format_gk(d), got.len())
        })?;
    }
    let tw5 = FieldTower::new(5, 1, 5)?;
    let d = families::lp_deltas(&tw5).next().ok_or_else(|| fail("no δ"))?;
    let inst = families::lunardon_polverino(&tw5, 1, d)?;
    let got = stabilizer_set(&tw5, &inst.poly);
    let scalars: BTreeSet<Mat2> = (1..5).map(|c| Mat2::scalar(tw5.from_int(c))).collect();
    ensure(got.len() == 4 && got == scalars, || format!("(5,5): |G_f| = {}", got.len()))?;
    Ok(format!("(5,4): {} δ give order 24 diagonal over F_25; (5,5): order 4 scalars", deltas.len()))
}

fn psi_set(tw: &FieldTower, theta: Fe, s: usize) -> BTreeSet<Mat2> {
    let xis = anti_fixed(tw, s);
    let mut out = BTreeSet::new();
    for a in (0..tw.q() as i64).map(|c| tw.from_int(c)) {
        for &xi in &xis {
            if !(a.is_zero() && xi.is_zero()) {
                out.insert(Mat2::new(a, tw.mul(xi, theta), tw.div(xi, theta), a));
            }
        }
    }
    out
}

fn psi_tower() -> Result<FieldTower> {
    FieldTower::new(5, 1, 6)
}

fn psi_stabilizer() -> Result<String> {
    let tw = psi_tower()?;
    let hs: Vec<Fe> = families::psi_hs(&tw, 3).step_by(37).take(3).collect();
    for &h in &hs {
        let psi = families::psi_poly(&tw, h, 3, 1);
        let theta = tw.add(tw.frob(h, 1), tw.frob(h, 2));
        let got = stabilizer_set(&tw, &psi);
        ensure(got.len() == 24 && got == psi_set(&tw, theta, 1), || {
            format!("h = {}: |G_ψ| = {}", tw.format_gk(h), got.len())
        })?;
    }
    // h in F_(q^3): then h^2 = -1, so h lies in F_q
    let h = families::psi_hs(&tw, 3)
        .find(|&h| tw.in_subfield(h, 3).unwrap_or(false))
        .ok_or_else(|| fail("no h in F_(q^3)"))?;
    let got = stabilizer_set(&tw, &families::psi_poly(&tw, h, 3, 1));
    let minus_four = tw.from_int(-4);
    let mut want = BTreeSet::new();
    for a in (0..5).map(|c| tw.from_int(c)) {
        for eta in anti_fixed(&tw, 1) {
            if !(a.is_zero() && eta.is_zero()) {
                want.insert(Mat2::new(a, tw.mul(minus_four, eta), eta, a));
            }
        }
    }
    ensure(got == want, || format!("h = {} in F_(q^3): specialization differs", tw.format_gk(h)))?;
    Ok(format!("(5,6) t = 3: {} h match the ξ, θ set (order 24); h in F_(q^3) matches (α, -4η; η, α)", hs.len()))
}

fn diagonalization_identity() -> Result<String> {
    let tw = psi_tower()?;
    let h = families::psi_hs(&tw, 3).next().ok_or_else(|| fail("no h"))?;
    let theta = tw.add(tw.frob(h, 1), tw.frob(h, 2));
    let p = Mat2::new(Fe::ONE, theta, Fe::ONE, tw.neg(theta));
    let p_inv = p.inverse(&tw).ok_or_else(|| fail("P singular"))?;
    let got: BTreeSet<Mat2> = stabilizer_set(&tw, &families::psi_poly(&tw, h, 3, 1))
        .iter()
        .map(|m| p.mul(&tw, m).mul(&tw, &p_inv))
        .collect();
    ensure(got == diag_frobenius(&tw, 2, 1)?, || "P G_ψ P^-1 differs from {diag(a, a^q)}".into())?;
    Ok("P = (1 θ; 1 -θ) maps G_ψ onto {diag(a, a^q) : a in F_25^*}".into())
}

fn closed_forms() -> Result<String> {
    let tw = psi_tower()?;
    let hs: Vec<Fe> = families::psi_hs(&tw, 3).step_by(29).take(4).collect();
    for &h in &hs {
        let sf = standard_form::to_standard_form(&tw, &families::psi_poly(&tw, h, 3, 1))?;
        let closed = standard_form::canonicalize(&tw, &families::psi_standard_form_trinomial(&tw, h, 1))?;
        ensure(sf.h == closed.poly, || format!("h = {}: trinomial differs", tw.format_gk(h)))?;
    }
    let tw13 = FieldTower::new(13, 1, 6)?;
    let rho = tw13.from_int(5);
    let sf = standard_form::to_standard_form(&tw13, &families::psi_poly(&tw13, rho, 3, 1))?;
    let series = standard_form::canonicalize(&tw13, &families::psi_standard_form_series(&tw13, rho, 3, 1)?)?;
    ensure(sf.h == series.poly, || "q = 13: series form differs".into())?;
    Ok(format!("(5,6): {} h match the trinomial; (13,6) ρ = 5 matches the series", hs.len()))
}

fn catalog() -> Result<Vec<(Rc<FieldTower>, &'static str, LinearizedPoly)>> {
    let mut out = Vec::new();
    let t54 = Rc::new(FieldTower::new(5, 1, 4)?);
    for s in [1, 3] {
        out.push((t54.clone(), "pseudoregulus (5,4)", families::pseudoregulus(&t54, s)?.poly));
    }
    let d = families::lp_deltas(&t54).next().ok_or_else(|| fail("no δ"))?;
    out.push((t54.clone(), "Lunardon-Polverino (5,4)", families::lunardon_polverino(&t54, 1, d)?.poly));
    let t34 = Rc::new(FieldTower::new(3, 1, 4)?);
    out.push((t34.clone(), "pseudoregulus (3,4)", families::pseudoregulus(&t34, 1)?.poly));
    let d = families::lp_deltas(&t34).next().ok_or_else(|| fail("no δ"))?;
    out.push((t34.clone(), "Lunardon-Polverino (3,4)", families::lunardon_polverino(&t34, 1, d)?.poly));
    let t56 = Rc::new(psi_tower()?);
    out.push((t56.clone(), "half-degree (5,6)", families::find_half_degree(&t56, 1)?.poly));
    for d in families::trinomial_deltas(&t56) {
        out.push((t56.clone(), "trinomial (5,6)", families::trinomial(&t56, d)?.poly));
    }
    let h = families::psi_hs(&t56, 3).next().ok_or_else(|| fail("no h"))?;
    out.push((t56.clone(), "psi (5,6)", families::psi(&t56, h, 3, 1)?.poly));
    Ok(out)
}

fn standard_form_structure() -> Result<String> {
    let cat = catalog()?;
    for (tw, name, f) in &cat {
        let mf = stabilizer::stabilizer_of_scattered(tw, f)?;
        let t = stabilizer::verify_field(tw, &mf)?.t;
        let sf = standard_form::to_standard_form(tw, f)?;
        let (s_h, t_h) = sf.h.standard_form_params()?;
        ensure(t_h == t && sf.t == t, || format!("{name}: t_h = {t_h}, t = {t}"))?;
        let g_h = stabilizer_set(tw, &sf.h);
        ensure(g_h.iter().all(|m| m.is_diagonal()), || format!("{name}: G_h not diagonal"))?;
        ensure(g_h == diag_frobenius(tw, t, s_h)?, || format!("{name}: G_h is not {{diag(α, α^(q^s))}}"))?;
    }
    Ok(format!("{} catalog instances: t_h = t and G_h = {{diag(α, α^(q^s))}}", cat.len()))
}

fn mrd_check() -> Result<String> {
    let mut checked = 0;
    for (tw, name, f) in catalog()?.iter().filter(|(tw, _, _)| tw.n() == 4) {
        let d = mrd::min_distance(tw, &mrd::RdCode::new(f.clone()), mrd::DEFAULT_EXACT_BOUND)?;
        ensure(d == tw.n() - 1, || format!("{name}: minimum distance {d}"))?;
        let m = mrd::check_idealizer_matches_stabilizer(tw, f)?;
        ensure(m.idealizer_order == m.stabilizer_order, || format!("{name}: orders differ"))?;
        checked += 1;
    }
    Ok(format!("{checked} instances at (3,4), (5,4): d = n - 1 and |I_R| = |G_f ∪ {{O}}|"))
}

fn plane_structure() -> Result<String> {
    let tw = psi_tower()?;
    let h = families::psi_hs(&tw, 3).next().ok_or_else(|| fail("no h"))?;
    let theta = tw.add(tw.frob(h, 1), tw.frob(h, 2));
    let report = plane::classify_central_collineations(&tw, &families::psi_poly(&tw, h, 3, 1))?;
    let centers: BTreeSet<(u8, u64)> = report.groups.iter().map(|g| g.center.sort_key(&tw)).collect();
    let want: BTreeSet<(u8, u64)> =
        [theta, tw.neg(theta)].iter().map(|&m| ProjPoint::Affine(m).sort_key(&tw)).collect();
    ensure(centers == want, || "homology centers are not <(1, ±θ)>".into())?;
    ensure(report.groups.iter().all(|g| g.order == 6 && g.cyclic), || "homology groups are not cyclic of order 6".into())?;
    ensure(report.axes_swapped && report.elations == 0, || "axes/coaxes or elations wrong".into())?;
    ensure(report.group.order == 15624 * 24 / 4 && report.group.decomposition_ok, || {
        format!("|H_f| = {}", report.group.order)
    })?;
    ensure(report.consistent(), || "report inconsistent".into())?;
    let tw5 = FieldTower::new(5, 1, 5)?;
    let d = families::lp_deltas(&tw5).next().ok_or_else(|| fail("no δ"))?;
    let lp = plane::classify_central_collineations(&tw5, &families::lunardon_polverino(&tw5, 1, d)?.poly)?;
    ensure(lp.homologies == 0 && lp.elations == 0 && lp.consistent(), || "(5,5) LP has central collineations".into())?;
    Ok("(5,6) ψ: centers <(1, ±θ)>, two cyclic groups of order 6, no elations, |H_f| = 93744; (5,5) LP: none".into())
}

fn andre_witness() -> Result<String> {
    let tw = psi_tower()?;
    let h = families::psi_hs(&tw, 3).next().ok_or_else(|| fail("no h"))?;
    let w = plane::reducibility_witness(&tw, &families::psi_poly(&tw, h, 3, 1))?;
    ensure(w.verified(&tw), || "ψ witness not verified".into())?;
    let t54 = FieldTower::new(5, 1, 4)?;
    let d = families::lp_deltas(&t54).next().ok_or_else(|| fail("no δ"))?;
    let w = plane::reducibility_witness(&t54, &families::lunardon_polverino(&t54, 1, d)?.poly)?;
    ensure(w.verified(&t54) && w.t == 2, || "LP witness not verified".into())?;
    let pr = plane::reducibility_witness(&t54, &families::pseudoregulus(&t54, 1)?.poly);
    ensure(pr == Err(Error::PseudoregulusCase), || "pseudoregulus not flagged".into())?;
    Ok("ψ (5,6) and LP (5,4): invariant {(x, g(x)) : x in F_(q^2)} verified; pseudoregulus flagged".into())
}

pub fn random_element(tw: &FieldTower, rng: &mut ChaCha8Rng) -> Fe {
    let k = rng.gen_range(0..tw.order());
    if k == tw.order() - 1 {
        Fe::ZERO
    } else {
        tw.gpow(k)
    }
}

/// Random q-polynomial: dense, or supported on one to three random exponents.
pub fn random_poly(tw: &FieldTower, rng: &mut ChaCha8Rng) -> LinearizedPoly {
    if rng.gen_bool(0.5) {
        let coeffs = (0..tw.n()).map(|_| random_element(tw, rng)).collect();
        LinearizedPoly::new(tw, coeffs).expect("length n")
    } else {
        let terms: Vec<(usize, Fe)> =
            (0..rng.gen_range(1..=3)).map(|_| (rng.gen_range(0..tw.n()), random_element(tw, rng))).collect();
        LinearizedPoly::from_terms(tw, &terms)
    }
}

fn oracles(samples: usize) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ca7);
    let mut scattered = 0;
    for (p, n) in [(3, 3), (3, 4)] {
        let tw = FieldTower::new(p, 1, n)?;
        for _ in 0..samples {
            let f = random_poly(&tw, &mut rng);
            let fast = scatter::is_scattered(&tw, &f);
            ensure(fast == scatter::is_scattered_pairwise(&tw, &f), || {
                format!("({p},{n}) {}: fiber count and pairwise test disagree", f.display(&tw))
            })?;
            scattered += fast as usize;
        }
    }
    let tw = FieldTower::new(2, 1, 4)?;
    let mut polys: Vec<LinearizedPoly> = (0..samples).map(|_| random_poly(&tw, &mut rng)).collect();
    polys.push(LinearizedPoly::monomial(&tw, 1, Fe::ONE));
    for f in &polys {
        let code = mrd::RdCode::new(f.clone());
        let fast = mrd::min_distance(&tw, &code, mrd::DEFAULT_EXACT_BOUND)?;
        let naive = mrd::min_distance_naive(&tw, &code, mrd::DEFAULT_EXACT_BOUND)?;
        ensure(fast == naive, || format!("(2,4) {}: {fast} vs {naive}", f.display(&tw)))?;
    }
    Ok(format!(
        "{} polynomials at (3,3), (3,4) ({scattered} scattered) agree; {} codes at (2,4) agree",
        2 * samples,
        polys.len()
    ))
}

fn field_axioms(tw: &FieldTower, rng: &mut ChaCha8Rng, trials: usize) -> Result<()> {
    for _ in 0..trials {
        let (a, b, c) = (random_element(tw, rng), random_element(tw, rng), random_element(tw, rng));
        ensure(tw.mul(a, tw.add(b, c)) == tw.add(tw.mul(a, b), tw.mul(a, c)), || "distributivity".into())?;
        ensure(tw.mul(tw.mul(a, b), c) == tw.mul(a, tw.mul(b, c)), || "associativity".into())?;
        ensure(tw.add(tw.add(a, b), c) == tw.add(a, tw.add(b, c)), || "additive associativity".into())?;
        ensure(tw.add(a, tw.neg(a)).is_zero(), || "negation".into())?;
        if !a.is_zero() {
            ensure(tw.mul(a, tw.inv(a)) == Fe::ONE, || "inverse".into())?;
        }
        ensure(tw.frob(a, tw.n()) == a, || "Frobenius order".into())?;
        ensure(tw.frob_p(tw.add(a, b), 1) == tw.add(tw.frob_p(a, 1), tw.frob_p(b, 1)), || "Frobenius additivity".into())?;
        for t in (1..=tw.n()).filter(|t| tw.n().is_multiple_of(*t)) {
            ensure(tw.norm(tw.mul(a, b), t)? == tw.mul(tw.norm(a, t)?, tw.norm(b, t)?), || "norm multiplicativity".into())?;
        }
    }
    Ok(())
}

fn poly_properties(tw: &FieldTower, rng: &mut ChaCha8Rng, trials: usize) -> Result<()> {
    for _ in 0..trials {
        let (f, g, h) = (random_poly(tw, rng), random_poly(tw, rng), random_poly(tw, rng));
        ensure(f.compose(tw, &g).compose(tw, &h) == f.compose(tw, &g.compose(tw, &h)), || "compose associativity".into())?;
        let x = random_element(tw, rng);
        ensure(f.compose(tw, &g).eval(tw, x) == f.eval(tw, g.eval(tw, x)), || "compose evaluation".into())?;
        if let Ok(fi) = f.invert(tw) {
            ensure(fi.compose(tw, &f) == LinearizedPoly::identity(tw), || "left inverse".into())?;
            ensure(f.compose(tw, &fi) == LinearizedPoly::identity(tw), || "right inverse".into())?;
        } else {
            ensure(f.rank(tw) < tw.n(), || "invert refused a bijection".into())?;
        }
    }
    Ok(())
}

/// Random scattered polynomials found by search, with their stabilizer degree.
fn scattered_search(tw: &FieldTower, rng: &mut ChaCha8Rng, count: usize) -> Result<usize> {
    let mut found = 0;
    let mut tries = 0;
    while found < count {
        tries += 1;
        if tries > 200 * count {
            return Err(fail(format!("only {found} scattered polynomials in {tries} tries")));
        }
        let f = random_poly(tw, rng);
        if f.is_zero() || !scatter::is_scattered(tw, &f) {
            continue;
        }
        let mf = stabilizer::stabilizer_of_scattered(tw, &f)?;
        let cert = stabilizer::verify_field(tw, &mf)?;
        ensure(mf.order(tw) == tw.q_pow(cert.t) as u128 && tw.n().is_multiple_of(cert.t), || {
            format!("{}: |G_f ∪ {{O}}| = {}", f.display(tw), mf.order(tw))
        })?;
        found += 1;
    }
    Ok(found)
}

fn properties(quick: bool) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x11);
    let trials = if quick { 50 } else { 300 };
    for (p, e, n) in [(2, 1, 5), (3, 1, 4), (5, 1, 4), (2, 2, 3), (3, 2, 2), (7, 1, 3)] {
        let tw = FieldTower::new(p, e, n)?;
        field_axioms(&tw, &mut rng, trials)?;
        poly_properties(&tw, &mut rng, trials / 5)?;
    }
    let t54 = FieldTower::new(5, 1, 4)?;
    let d = families::lp_deltas(&t54).next().ok_or_else(|| fail("no δ"))?;
    let mut audits = 0;
    for f in [families::pseudoregulus(&t54, 1)?.poly, families::lunardon_polverino(&t54, 1, d)?.poly] {
        let a = plane::build_spread(&t54, &f)?.audit(&t54)?;
        ensure(a.ok(&t54), || format!("spread audit failed: {a:?}"))?;
        audits += 1;
    }
    if !quick {
        let tw = psi_tower()?;
        let h = families::psi_hs(&tw, 3).next().ok_or_else(|| fail("no h"))?;
        let a = plane::build_spread(&tw, &families::psi_poly(&tw, h, 3, 1))?.audit(&tw)?;
        ensure(a.ok(&tw), || format!("ψ spread audit failed: {a:?}"))?;
        audits += 1;
    }
    let count = if quick { 5 } else { 20 };
    for (p, n) in [(3, 4), (5, 4)] {
        scattered_search(&FieldTower::new(p, 1, n)?, &mut rng, count)?;
    }
    Ok(format!(
        "field, Frobenius, norm, composition and inversion laws; {audits} spread audits; {count} random scattered polynomials per field have |G_f ∪ {{O}}| = q^t"
    ))
}
