//! Standard forms: GL-normal forms of scattered polynomials whose stabilizer is
//! larger than the scalars, their canonical orbit representatives, and
//! GL / ΓL-equivalence tests built on them.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{ElementFormat, Fe, FieldTower};
use crate::linearized::LinearizedPoly;
use crate::mat2::Mat2;
use crate::stabilizer::{self, Diagonalization, FieldCertificate, MatrixSpace};

const MAX_N: usize = 40;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardFormResult {
    pub h: LinearizedPoly,
    /// `U_f P^-1 = U_h`.
    pub p: Mat2,
    pub s: usize,
    pub t: usize,
    pub canonical: bool,
}

impl StandardFormResult {
    pub fn to_json(&self, tw: &FieldTower, fmt: ElementFormat) -> Value {
        json!({
            "h": self.h.to_json(tw, fmt)["coeffs"],
            "P": self.p.to_json(tw, fmt),
            "s": self.s,
            "t": self.t,
            "canonical": self.canonical,
        })
    }
}

/// Orbit representative `a h(bx)` or `a h^-1(bx)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub poly: LinearizedPoly,
    pub a: Fe,
    pub b: Fe,
    pub inverted: bool,
}

impl Canonical {
    /// `W` with `U_h W = U_poly`.
    pub fn witness(&self, tw: &FieldTower) -> Mat2 {
        let b_inv = tw.inv(self.b);
        if self.inverted {
            Mat2::antidiag(self.a, b_inv)
        } else {
            Mat2::diag(b_inv, self.a)
        }
    }
}

/// `f` is scattered and `|G_f ∪ {O}| > q`.
pub fn in_class_s(tw: &FieldTower, f: &LinearizedPoly) -> Result<bool> {
    let mf = stabilizer::stabilizer_of_scattered(tw, f)?;
    Ok(mf.fp_dim() > tw.e() as usize)
}

struct Analysis {
    mf: MatrixSpace,
    cert: FieldCertificate,
}

fn analyze(tw: &FieldTower, f: &LinearizedPoly) -> Result<Analysis> {
    let mf = stabilizer::stabilizer_of_scattered(tw, f)?;
    let cert = stabilizer::verify_field(tw, &mf)?;
    Ok(Analysis { mf, cert })
}

/// `h = v ∘ u^-1` where `U_f P^-1 = {(u(x), v(x))}`, before canonicalization.
pub fn conjugate_by(tw: &FieldTower, f: &LinearizedPoly, p: &Mat2) -> Result<LinearizedPoly> {
    let q = p.inverse(tw).ok_or_else(|| Error::Mismatch("P is singular".into()))?;
    let id = LinearizedPoly::identity(tw);
    let u = id.scale(tw, q.a).add(tw, &f.scale(tw, q.c));
    let v = id.scale(tw, q.b).add(tw, &f.scale(tw, q.d));
    let u_inv = u.invert(tw).map_err(|_| Error::InternalNonBijective)?;
    Ok(v.compose(tw, &u_inv))
}

fn check_diagonal_image(tw: &FieldTower, mf: &MatrixSpace, p: &Mat2, s: usize, t: usize) -> Result<()> {
    let p_inv = p.inverse(tw).expect("nonsingular");
    for n in mf.basis(tw) {
        let d = p.mul(tw, &n).mul(tw, &p_inv);
        if !d.is_diagonal() || !tw.in_subfield(d.a, t)? || tw.frob(d.a, s) != d.d {
            return Err(Error::Mismatch("conjugated stabilizer is not {diag(α, α^(q^s))}".into()));
        }
    }
    Ok(())
}

pub fn to_standard_form(tw: &FieldTower, f: &LinearizedPoly) -> Result<StandardFormResult> {
    let an = analyze(tw, f)?;
    if an.cert.t == 1 {
        return Err(Error::NotInS);
    }
    let diag: Diagonalization = stabilizer::diagonalize(tw, &an.mf, &an.cert)?;
    let h = conjugate_by(tw, f, &diag.p)?;
    let (s_h, t_h) = h.standard_form_params()?;
    if t_h != an.cert.t || s_h != diag.s % t_h {
        return Err(Error::Mismatch(format!(
            "standard form has (s, t) = ({s_h}, {t_h}), stabilizer gives ({}, {})",
            diag.s, an.cert.t
        )));
    }
    let canon = canonical_orbit(tw, &h, t_h);
    let d_inv = canon.witness(tw).inverse(tw).expect("nonsingular");
    let p = d_inv.mul(tw, &diag.p);
    let (s, t) = canon.poly.standard_form_params()?;
    check_diagonal_image(tw, &an.mf, &p, s, t)?;
    Ok(StandardFormResult { h: canon.poly, p, s, t, canonical: true })
}

/// Canonical representative of `{a h(bx)} ∪ {a h^-1(bx)}` for `h` in standard form.
pub fn canonicalize(tw: &FieldTower, h: &LinearizedPoly) -> Result<Canonical> {
    let (_, t) = h.standard_form_params()?;
    Ok(canonical_orbit(tw, h, t))
}

type Key = ([u64; MAX_N], u64);

/// Smallest `g^k`-ordered coefficient vector of `a h(bx)` with the lowest nonzero
/// coefficient scaled to 1. `t` must divide every support difference, so that
/// `b` only matters modulo `F_(q^t)^*`.
fn branch_min(tw: &FieldTower, h: &LinearizedPoly, t: usize) -> Option<Key> {
    let n = tw.n();
    let n1 = tw.order() - 1;
    let support = h.support();
    let &i0 = support.first()?;
    let logs: Vec<Option<u64>> = h.coeffs().iter().map(|&c| tw.dlog(c)).collect();
    let l0 = logs[i0].expect("nonzero");
    let qpow: Vec<u64> = (0..n).map(|i| tw.q_pow(i) % n1).collect();
    let shift: Vec<u64> = (0..n).map(|i| (qpow[i] + n1 - qpow[i0]) % n1).collect();
    let reps = n1 / (tw.q_pow(t) - 1);
    let key_at = |k: u64| -> Key {
        let mut key = [u64::MAX; MAX_N];
        for i in 0..n {
            key[i] = match logs[i] {
                None => n1,
                Some(l) => {
                    let v = (l as u128 + (n1 - l0) as u128 + k as u128 * shift[i] as u128) % n1 as u128;
                    v as u64
                }
            };
        }
        (key, k)
    };
    (0..reps).into_par_iter().map(key_at).min()
}

/// Orbit minimum over both branches; the direct branch wins ties.
pub fn canonical_orbit(tw: &FieldTower, h: &LinearizedPoly, t: usize) -> Canonical {
    let n = tw.n();
    let direct = branch_min(tw, h, t).expect("nonzero polynomial");
    let inverse = h.invert(tw).ok().map(|hi| {
        let key = branch_min(tw, &hi, t).expect("nonzero polynomial");
        (hi, key)
    });
    let (src, (key, k), inverted) = match inverse {
        Some((hi, ikey)) if ikey.0[..n] < direct.0[..n] => (hi, ikey, true),
        _ => (h.clone(), direct, false),
    };
    let n1 = tw.order() - 1;
    let coeffs: Vec<Fe> =
        key[..n].iter().map(|&l| if l == n1 { Fe::ZERO } else { tw.gpow(l) }).collect();
    let b = tw.gpow(k);
    let i0 = src.support()[0];
    let a = tw.inv(tw.mul(src.coeff(i0), tw.frob(b, i0)));
    Canonical { poly: LinearizedPoly::new(tw, coeffs).expect("length n"), a, b, inverted }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    Gl,
    GammaL,
    Undecidable,
}

/// `φ(v) = v^(p^sigma) W`, mapping `U_f` onto `U_g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub matrix: Mat2,
    pub sigma: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equivalence {
    /// `None` when the question could not be decided.
    pub equivalent: Option<bool>,
    pub mode: Mode,
    pub witness: Option<Witness>,
    pub note: Option<&'static str>,
}

impl Equivalence {
    fn yes(mode: Mode, witness: Witness) -> Self {
        Self { equivalent: Some(true), mode, witness: Some(witness), note: None }
    }

    fn no(mode: Mode, note: Option<&'static str>) -> Self {
        Self { equivalent: Some(false), mode, witness: None, note }
    }

    fn undecidable() -> Self {
        Self { equivalent: None, mode: Mode::Undecidable, witness: None, note: Some("neither polynomial has a standard form") }
    }

    pub fn to_json(&self, tw: &FieldTower, fmt: ElementFormat) -> Value {
        let mut v = json!({
            "equivalent": self.equivalent,
            "mode": match self.mode {
                Mode::Gl => "GL",
                Mode::GammaL => "GammaL",
                Mode::Undecidable => "Undecidable",
            },
            "witness": self.witness.as_ref().map(|w| json!({
                "matrix": w.matrix.to_json(tw, fmt),
                "sigma_p_power": w.sigma,
            })),
        });
        if let Some(note) = self.note {
            v["note"] = json!(note);
        }
        v
    }
}

/// Checks `φ(U_f) ⊆ U_g` on an F_p-basis (enough since `φ` is additive) and that `W` is nonsingular.
pub fn verify_witness(tw: &FieldTower, f: &LinearizedPoly, g: &LinearizedPoly, w: &Witness) -> bool {
    if w.matrix.det(tw).is_zero() {
        return false;
    }
    tw.fp_basis().into_iter().all(|u| {
        let v = (tw.frob_p(u, w.sigma), tw.frob_p(f.eval(tw, u), w.sigma));
        let (x, y) = w.matrix.apply(tw, v);
        g.eval(tw, x) == y
    })
}

enum ClassData {
    InS(StandardFormResult),
    NotInS,
}

fn class_of(tw: &FieldTower, f: &LinearizedPoly) -> Result<ClassData> {
    match to_standard_form(tw, f) {
        Ok(sf) => Ok(ClassData::InS(sf)),
        Err(Error::NotInS) => Ok(ClassData::NotInS),
        Err(e) => Err(e),
    }
}

/// For `f` without a standard form, `W` with `U_f W = U_c`, `c` the orbit minimum.
fn scalar_orbit(tw: &FieldTower, f: &LinearizedPoly) -> (LinearizedPoly, Mat2) {
    let c = canonical_orbit(tw, f, 1);
    let w = c.witness(tw);
    (c.poly, w)
}

pub fn gl_equivalent(tw: &FieldTower, f: &LinearizedPoly, g: &LinearizedPoly) -> Result<Equivalence> {
    match (class_of(tw, f)?, class_of(tw, g)?) {
        (ClassData::InS(sf), ClassData::InS(sg)) => {
            if sf.h != sg.h {
                return Ok(Equivalence::no(Mode::Gl, None));
            }
            let pf_inv = sf.p.inverse(tw).expect("nonsingular");
            Ok(Equivalence::yes(Mode::Gl, Witness { matrix: pf_inv.mul(tw, &sg.p), sigma: 0 }))
        }
        (ClassData::NotInS, ClassData::NotInS) => {
            let (cf, wf) = scalar_orbit(tw, f);
            let (cg, wg) = scalar_orbit(tw, g);
            if cf == cg {
                let w = wf.mul(tw, &wg.inverse(tw).expect("nonsingular"));
                Ok(Equivalence::yes(Mode::Gl, Witness { matrix: w, sigma: 0 }))
            } else {
                Ok(Equivalence::undecidable())
            }
        }
        _ => Ok(Equivalence::no(Mode::Gl, Some("MixedClass"))),
    }
}

pub fn gammal_equivalent(tw: &FieldTower, f: &LinearizedPoly, g: &LinearizedPoly) -> Result<Equivalence> {
    let degree = tw.degree();
    match (class_of(tw, f)?, class_of(tw, g)?) {
        (ClassData::InS(sf), ClassData::InS(sg)) => {
            let pf_inv = sf.p.inverse(tw).expect("nonsingular");
            for k in 0..degree {
                let twisted = sf.h.twist(tw, k);
                let c = canonical_orbit(tw, &twisted, sf.t);
                if c.poly == sg.h {
                    // σ(U_f) σ(P_f^-1) = U_(h_f^σ), then D, then back through P_g
                    let w = pf_inv.frob_p(tw, k).mul(tw, &c.witness(tw)).mul(tw, &sg.p);
                    return Ok(Equivalence::yes(Mode::GammaL, Witness { matrix: w, sigma: k }));
                }
            }
            Ok(Equivalence::no(Mode::GammaL, None))
        }
        (ClassData::NotInS, ClassData::NotInS) => {
            let (cg, wg) = scalar_orbit(tw, g);
            let wg_inv = wg.inverse(tw).expect("nonsingular");
            for k in 0..degree {
                let (cf, wf) = scalar_orbit(tw, &f.twist(tw, k));
                if cf == cg {
                    let w = wf.mul(tw, &wg_inv);
                    return Ok(Equivalence::yes(Mode::GammaL, Witness { matrix: w, sigma: k }));
                }
            }
            Ok(Equivalence::undecidable())
        }
        _ => Ok(Equivalence::no(Mode::GammaL, Some("MixedClass"))),
    }
}
