//! The known families of scattered polynomials, with predicted stabilizers
//! and closed-form standard forms.

use serde_json::{json, Value};

use crate::arith::gcd_usize;
use crate::error::{Error, Result};
use crate::field::{ElementFormat, Fe, FieldTower};
use crate::linearized::LinearizedPoly;
use crate::mat2::Mat2;
use crate::scatter;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// `x^(q^s)`
    Pseudoregulus = 1,
    /// `x^(q^s) + δ x^(q^(n-s))`
    LunardonPolverino = 2,
    /// `δ x^(q^s) + x^(q^(s+n/2))`, n in {6, 8}
    HalfDegree = 3,
    /// `x^q + x^(q^3) + δ x^(q^5)` over F_(q^6)
    Trinomial = 4,
    /// `ψ_(h,t,s)`, n = 2t
    Psi = 5,
}

impl Family {
    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Pseudoregulus => "pseudoregulus",
            Family::LunardonPolverino => "lunardon-polverino",
            Family::HalfDegree => "half-degree",
            Family::Trinomial => "trinomial",
            Family::Psi => "psi",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    /// All stated parameter conditions were verified.
    Checked,
    /// Some conditions are unknown; scatteredness was verified by computation.
    ComputationOnly,
}

/// Expected `G_f` (nonzero elements).
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum PredictedShape {
    /// `{diag(α, α^(q^s)) : α in F_(q^t)^*}`
    DiagonalFrobenius { t: usize, s: usize },
    /// `{(α, ξθ; ξ/θ, α) : α in F_q, ξ^(q^s) = -ξ, (α, ξ) != (0, 0)}`
    PsiOdd { theta: Fe, s: usize },
}

impl PredictedShape {
    /// Degree over F_q of the matrix field `G_f ∪ {O}`.
    pub fn t(&self) -> usize {
        match *self {
            PredictedShape::DiagonalFrobenius { t, .. } => t,
            PredictedShape::PsiOdd { .. } => 2,
        }
    }

    /// `|G_f| = q^t - 1`.
    pub fn group_order(&self, tw: &FieldTower) -> u64 {
        tw.q_pow(self.t()) - 1
    }

    /// All predicted nonzero matrices.
    pub fn elements(&self, tw: &FieldTower) -> Result<Vec<Mat2>> {
        match *self {
            PredictedShape::DiagonalFrobenius { t, s } => Ok(tw
                .subfield_elements(t)?
                .into_iter()
                .skip(1)
                .map(|a| Mat2::diag(a, tw.frob(a, s)))
                .collect()),
            PredictedShape::PsiOdd { theta, s } => {
                let xis = anti_fixed(tw, s);
                let theta_inv = tw.inv(theta);
                let mut out = Vec::new();
                for alpha in tw.subfield_elements(1)? {
                    for &xi in &xis {
                        if alpha.is_zero() && xi.is_zero() {
                            continue;
                        }
                        out.push(Mat2::new(alpha, tw.mul(xi, theta), tw.mul(xi, theta_inv), alpha));
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn to_json(&self, tw: &FieldTower, fmt: ElementFormat) -> Value {
        match *self {
            PredictedShape::DiagonalFrobenius { t, s } => {
                json!({"shape": "diag-frobenius", "t": t, "s": s, "order": self.group_order(tw)})
            }
            PredictedShape::PsiOdd { theta, s } => json!({
                "shape": "psi-odd",
                "theta": tw.element_json(theta, fmt),
                "s": s,
                "order": self.group_order(tw),
            }),
        }
    }
}

/// `{ξ : ξ^(q^s) = -ξ}`; these lie in F_(q^2) whenever `gcd(s, n/2) = 1`.
pub fn anti_fixed(tw: &FieldTower, s: usize) -> Vec<Fe> {
    let d = gcd_usize(2 * s, tw.n());
    tw.subfield_elements(d)
        .expect("gcd divides n")
        .into_iter()
        .filter(|&x| tw.frob(x, s) == tw.neg(x))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FamilyParams {
    pub s: usize,
    pub t: Option<usize>,
    pub delta: Option<Fe>,
    pub h: Option<Fe>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyInstance {
    pub family: Family,
    pub params: FamilyParams,
    pub poly: LinearizedPoly,
    pub predicted: PredictedShape,
    pub validity: Validity,
}

impl FamilyInstance {
    pub fn to_json(&self, tw: &FieldTower, fmt: ElementFormat) -> Value {
        let mut params = json!({"s": self.params.s});
        if let Some(t) = self.params.t {
            params["t"] = json!(t);
        }
        if let Some(d) = self.params.delta {
            params["delta"] = tw.element_json(d, fmt);
        }
        if let Some(h) = self.params.h {
            params["h"] = tw.element_json(h, fmt);
        }
        json!({
            "family": self.family.id(),
            "name": self.family.name(),
            "params": params,
            "poly": self.poly.to_json(tw, fmt),
            "predicted_stabilizer": self.predicted.to_json(tw, fmt),
            "validity": match self.validity {
                Validity::Checked => "Checked",
                Validity::ComputationOnly => "ComputationOnly",
            },
        })
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::BadParams(msg.into())
}

pub fn pseudoregulus(tw: &FieldTower, s: usize) -> Result<FamilyInstance> {
    let n = tw.n();
    if gcd_usize(s % n, n) != 1 {
        return Err(bad(format!("gcd(s, n) = gcd({s}, {n}) must be 1")));
    }
    Ok(FamilyInstance {
        family: Family::Pseudoregulus,
        params: FamilyParams { s, ..Default::default() },
        poly: LinearizedPoly::monomial(tw, s, Fe::ONE),
        predicted: PredictedShape::DiagonalFrobenius { t: n, s: s % n },
        validity: Validity::Checked,
    })
}

pub fn lunardon_polverino(tw: &FieldTower, s: usize, delta: Fe) -> Result<FamilyInstance> {
    let n = tw.n();
    if gcd_usize(s % n, n) != 1 {
        return Err(bad(format!("gcd(s, n) = gcd({s}, {n}) must be 1")));
    }
    if n <= 3 {
        return Err(bad("n must exceed 3"));
    }
    let norm = tw.norm(delta, 1)?;
    if norm.is_zero() || norm == Fe::ONE {
        return Err(bad("N_(q^n/q)(δ) must not be 0 or 1"));
    }
    let predicted = if n.is_multiple_of(2) {
        PredictedShape::DiagonalFrobenius { t: 2, s: 1 }
    } else {
        PredictedShape::DiagonalFrobenius { t: 1, s: 0 }
    };
    Ok(FamilyInstance {
        family: Family::LunardonPolverino,
        params: FamilyParams { s, delta: Some(delta), ..Default::default() },
        poly: LinearizedPoly::from_terms(tw, &[(s, Fe::ONE), (n - s % n, delta)]),
        predicted,
        validity: Validity::Checked,
    })
}

/// Gated on a scatteredness computation, since not all conditions on δ and q are known.
pub fn half_degree(tw: &FieldTower, s: usize, delta: Fe) -> Result<FamilyInstance> {
    let n = tw.n();
    if n != 6 && n != 8 {
        return Err(bad("n must be 6 or 8"));
    }
    let half = n / 2;
    if gcd_usize(s % half, half) != 1 {
        return Err(bad(format!("gcd(s, n/2) = gcd({s}, {half}) must be 1")));
    }
    let norm = tw.norm(delta, half)?;
    if norm.is_zero() || norm == Fe::ONE {
        return Err(bad("N_(q^n/q^(n/2))(δ) must not be 0 or 1"));
    }
    let poly = LinearizedPoly::from_terms(tw, &[(s, delta), (s + half, Fe::ONE)]);
    if !scatter::is_scattered(tw, &poly) {
        return Err(Error::NotScattered);
    }
    Ok(FamilyInstance {
        family: Family::HalfDegree,
        params: FamilyParams { s, delta: Some(delta), ..Default::default() },
        poly,
        predicted: PredictedShape::DiagonalFrobenius { t: half, s: s % half },
        validity: Validity::ComputationOnly,
    })
}

/// For odd q, requires `δ^2 + δ = 1`; for even q the conditions are unknown and the
/// instance is gated on a scatteredness computation.
pub fn trinomial(tw: &FieldTower, delta: Fe) -> Result<FamilyInstance> {
    if tw.n() != 6 {
        return Err(bad("the trinomial family lives over F_(q^6)"));
    }
    let poly = LinearizedPoly::from_terms(tw, &[(1, Fe::ONE), (3, Fe::ONE), (5, delta)]);
    let validity = if tw.p() == 2 {
        if !scatter::is_scattered(tw, &poly) {
            return Err(Error::NotScattered);
        }
        Validity::ComputationOnly
    } else {
        if tw.add(tw.mul(delta, delta), delta) != Fe::ONE {
            return Err(bad("δ^2 + δ must equal 1"));
        }
        Validity::Checked
    };
    Ok(FamilyInstance {
        family: Family::Trinomial,
        params: FamilyParams { s: 1, delta: Some(delta), ..Default::default() },
        poly,
        predicted: PredictedShape::DiagonalFrobenius { t: 2, s: 1 },
        validity,
    })
}

/// `θ = h^(q^s) + h^(q^(s(t-1)))`.
pub fn psi_theta(tw: &FieldTower, h: Fe, t: usize, s: usize) -> Fe {
    tw.add(tw.frob(h, s), tw.frob(h, s * (t - 1)))
}

/// `ψ_(h,t,s) = x^(q^s) + x^(q^(s(t-1))) + h^(1+q^s) x^(q^(s(t+1))) + h^(1-q^(s(2t-1))) x^(q^(s(2t-1)))`.
pub fn psi_poly(tw: &FieldTower, h: Fe, t: usize, s: usize) -> LinearizedPoly {
    let c2 = tw.mul(h, tw.frob(h, s));
    let c3 = tw.div(h, tw.frob(h, s * (2 * t - 1)));
    LinearizedPoly::from_terms(
        tw,
        &[(s, Fe::ONE), (s * (t - 1), Fe::ONE), (s * (t + 1), c2), (s * (2 * t - 1), c3)],
    )
}

fn check_psi_params(tw: &FieldTower, h: Fe, t: usize, s: usize) -> Result<()> {
    let n = tw.n();
    if n != 2 * t || t < 3 {
        return Err(bad(format!("need n = 2t with t >= 3, got n = {n}, t = {t}")));
    }
    if gcd_usize(s % n, n) != 1 {
        return Err(bad(format!("gcd(s, n) = gcd({s}, {n}) must be 1")));
    }
    if tw.p() == 2 {
        return Err(bad("q must be odd"));
    }
    if h.is_zero() || tw.norm(h, t)? != tw.neg(Fe::ONE) {
        return Err(bad("N_(q^n/q^t)(h) must equal -1"));
    }
    Ok(())
}

pub fn psi(tw: &FieldTower, h: Fe, t: usize, s: usize) -> Result<FamilyInstance> {
    check_psi_params(tw, h, t, s)?;
    let predicted = if t.is_multiple_of(2) {
        PredictedShape::DiagonalFrobenius { t: 2, s: 1 }
    } else {
        PredictedShape::PsiOdd { theta: psi_theta(tw, h, t, s), s }
    };
    Ok(FamilyInstance {
        family: Family::Psi,
        params: FamilyParams { s, t: Some(t), h: Some(h), ..Default::default() },
        poly: psi_poly(tw, h, t, s),
        predicted,
        validity: Validity::Checked,
    })
}

/// For `h = ρ` in F_q with `ρ^2 = -1` and odd `t`:
/// `ρ Σ_(i=1..t) (-1)^i x^(u^(2i-1)) + Σ_(i=1..t-1) (-1)^(i+1) x^(u^(t+2i))`, `u = q^s`.
pub fn psi_standard_form_series(tw: &FieldTower, rho: Fe, t: usize, s: usize) -> Result<LinearizedPoly> {
    if t.is_multiple_of(2) || !tw.is_in_fq(rho) || tw.q() % 4 != 1 || tw.mul(rho, rho) != tw.neg(Fe::ONE) {
        return Err(Error::UnsupportedParams(
            "series form needs odd t, q = 1 mod 4 and h = ρ in F_q with ρ^2 = -1".into(),
        ));
    }
    let neg_rho = tw.neg(rho);
    let mut terms = Vec::new();
    for i in 1..=t {
        terms.push((s * (2 * i - 1), if i % 2 == 0 { rho } else { neg_rho }));
    }
    for i in 1..t {
        terms.push((s * (t + 2 * i), if i % 2 == 1 { Fe::ONE } else { tw.neg(Fe::ONE) }));
    }
    Ok(LinearizedPoly::from_terms(tw, &terms))
}

/// For `t = 3`:
/// `(1 - h^(1+q^(2s))) x^(q^s) + (h + h^2) x^(q^(3s)) + h^(1+q^(2s)) (h + h^(q^s)) x^(q^(5s))`.
pub fn psi_standard_form_trinomial(tw: &FieldTower, h: Fe, s: usize) -> LinearizedPoly {
    let h_q2s = tw.mul(h, tw.frob(h, 2 * s));
    let c1 = tw.sub(Fe::ONE, h_q2s);
    let c3 = tw.add(h, tw.mul(h, h));
    let c5 = tw.mul(h_q2s, tw.add(h, tw.frob(h, s)));
    LinearizedPoly::from_terms(tw, &[(s, c1), (3 * s, c3), (5 * s, c5)])
}

/// The closed-form standard form of `ψ_(h,t,s)`, when one is known.
pub fn psi_standard_form_closed(tw: &FieldTower, h: Fe, t: usize, s: usize) -> Result<LinearizedPoly> {
    check_psi_params(tw, h, t, s)?;
    if let Ok(series) = psi_standard_form_series(tw, h, t, s) {
        return Ok(series);
    }
    if t == 3 {
        return Ok(psi_standard_form_trinomial(tw, h, s));
    }
    Err(Error::UnsupportedParams(format!("no closed form known for t = {t}")))
}

// ---- parameter search, in `g^k` order ----

/// Valid δ for the Lunardon-Polverino family.
pub fn lp_deltas(tw: &FieldTower) -> impl Iterator<Item = Fe> + '_ {
    (0..tw.order() - 1).map(|k| tw.gpow(k)).filter(|&d| tw.norm(d, 1).is_ok_and(|nm| nm != Fe::ONE))
}

/// `h` with `N_(q^n/q^t)(h) = -1`.
pub fn psi_hs(tw: &FieldTower, t: usize) -> impl Iterator<Item = Fe> + '_ {
    let minus_one = tw.neg(Fe::ONE);
    (0..tw.order() - 1)
        .map(|k| tw.gpow(k))
        .filter(move |&h| tw.norm(h, t) == Ok(minus_one))
}

/// Roots of `δ^2 + δ - 1`.
pub fn trinomial_deltas(tw: &FieldTower) -> Vec<Fe> {
    match tw.solve_quadratic(Fe::ONE, tw.neg(Fe::ONE)) {
        Some((a, b)) if a == b => vec![a],
        Some((a, b)) => vec![a, b],
        None => Vec::new(),
    }
}

/// First δ (in `g^k` order) for which the half-degree family is scattered.
pub fn find_half_degree(tw: &FieldTower, s: usize) -> Result<FamilyInstance> {
    let half = tw.n() / 2;
    for k in 0..tw.order() - 1 {
        let delta = tw.gpow(k);
        let norm = tw.norm(delta, half.max(1))?;
        if norm == Fe::ONE {
            continue;
        }
        match half_degree(tw, s, delta) {
            Ok(inst) => return Ok(inst),
            Err(Error::NotScattered) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(bad("no δ gives a scattered polynomial"))
}
