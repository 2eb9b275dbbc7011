//! The rank-distance code `C_f = <x, f(x)>` over F_(q^n), its minimum distance
//! and its idealizers.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Fe, FieldTower};
use crate::fplinalg::{FpMatrix, FpSpan};
use crate::linearized::LinearizedPoly;
use crate::mat2::Mat2;
use crate::stabilizer::{self, order_json};

/// Largest number of rank computations the exact minimum-distance paths accept.
pub const DEFAULT_EXACT_BOUND: u64 = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RdCode {
    pub f: LinearizedPoly,
}

impl RdCode {
    pub fn new(f: LinearizedPoly) -> Self {
        Self { f }
    }

    /// `a x + b f(x)`.
    pub fn codeword(&self, tw: &FieldTower, a: Fe, b: Fe) -> LinearizedPoly {
        LinearizedPoly::identity(tw).scale(tw, a).add(tw, &self.f.scale(tw, b))
    }

    /// `g = a x + b f` for some `a, b`: solves for `a, b` on two coefficient
    /// slots, then checks every slot.
    pub fn contains(&self, tw: &FieldTower, g: &LinearizedPoly) -> bool {
        let f = &self.f;
        let n = tw.n();
        // coefficient 0: g_0 = a + b f_0; coefficient i > 0: g_i = b f_i
        let b = match (1..n).find(|&i| !f.coeff(i).is_zero()) {
            Some(i) => tw.div(g.coeff(i), f.coeff(i)),
            None => Fe::ZERO,
        };
        let a = tw.sub(g.coeff(0), tw.mul(b, f.coeff(0)));
        self.codeword(tw, a, b) == *g
    }
}

struct RankContext<'a> {
    tw: &'a FieldTower,
    basis: Vec<Fe>,
    images: Vec<Fe>,
}

impl<'a> RankContext<'a> {
    fn new(tw: &'a FieldTower, f: &LinearizedPoly) -> Self {
        let basis = tw.fp_basis();
        let images = basis.iter().map(|&u| f.eval(tw, u)).collect();
        Self { tw, basis, images }
    }

    /// F_q-rank of `a x + b f`.
    fn rank(&self, a: Fe, b: Fe) -> usize {
        let tw = self.tw;
        let cols: Vec<Vec<u64>> = self
            .basis
            .iter()
            .zip(&self.images)
            .map(|(&u, &fu)| tw.digits(tw.add(tw.mul(a, u), tw.mul(b, fu))))
            .collect();
        FpMatrix::from_columns(tw.degree(), tw.p(), &cols).rank() / tw.e() as usize
    }
}

/// Minimum rank over one codeword per F_(q^n)-projective class `(a : b)`,
/// ignoring the zero map.
pub fn min_distance(tw: &FieldTower, code: &RdCode, bound: u64) -> Result<usize> {
    let classes = tw.order() + 1;
    if classes > bound {
        return Err(Error::TooLarge(format!("{classes} projective classes exceed the bound {bound}")));
    }
    let ctx = RankContext::new(tw, &code.f);
    let at_infinity = ctx.rank(Fe::ZERO, Fe::ONE);
    let elems: Vec<Fe> = tw.elements().collect();
    let affine = elems.par_iter().map(|&b| ctx.rank(Fe::ONE, b)).filter(|&r| r > 0).min();
    // a zero codeword (only possible when f is a multiple of x) is not counted
    Ok(affine.into_iter().chain((at_infinity > 0).then_some(at_infinity)).min().unwrap_or(0))
}

/// Minimum rank over all `q^(2n) - 1` nonzero codewords.
pub fn min_distance_naive(tw: &FieldTower, code: &RdCode, bound: u64) -> Result<usize> {
    let total = (tw.order() as u128).pow(2) - 1;
    if total > bound as u128 {
        return Err(Error::TooLarge(format!("{total} codewords exceed the bound {bound}")));
    }
    let ctx = RankContext::new(tw, &code.f);
    let elems: Vec<Fe> = tw.elements().collect();
    Ok(elems
        .par_iter()
        .flat_map_iter(|&a| elems.iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| !(a.is_zero() && b.is_zero()))
        .map(|(a, b)| ctx.rank(a, b))
        .filter(|&r| r > 0)
        .min()
        .unwrap_or(0))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// F_p-subspace of q-polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Idealizer {
    pub side: Side,
    span: FpSpan,
}

fn poly_digits(tw: &FieldTower, g: &LinearizedPoly) -> Vec<u64> {
    g.coeffs().iter().flat_map(|&c| tw.digits(c)).collect()
}

fn poly_from_digits(tw: &FieldTower, v: &[u64]) -> LinearizedPoly {
    let coeffs = v.chunks(tw.degree()).map(|c| tw.from_digits(c).expect("digits in range")).collect();
    LinearizedPoly::new(tw, coeffs).expect("length n")
}

impl Idealizer {
    pub fn fp_dim(&self) -> usize {
        self.span.dim()
    }

    pub fn order(&self, tw: &FieldTower) -> u128 {
        (tw.p() as u128).pow(self.fp_dim() as u32)
    }

    pub fn basis(&self, tw: &FieldTower) -> Vec<LinearizedPoly> {
        self.span.basis().iter().map(|v| poly_from_digits(tw, v)).collect()
    }

    pub fn contains(&self, tw: &FieldTower, g: &LinearizedPoly) -> bool {
        self.span.contains(&poly_digits(tw, g))
    }
}

/// `{φ : c ∘ φ in C_f for all c in C_f}` (right) or `{φ : φ ∘ c in C_f}` (left).
///
/// Each constraint `g_j(φ)` must equal some codeword `a_j x + b_j f`; the
/// unknowns are the F_p-coordinates of `φ`, `a_j` and `b_j`. On the right,
/// `C_f ∘ φ` is spanned by `φ` and `f ∘ φ`; on the left, `φ ∘ (u x)` and
/// `φ ∘ (u f)` are needed for `u` running over an F_p-basis.
pub fn idealizer(tw: &FieldTower, code: &RdCode, side: Side) -> Idealizer {
    let n = tw.n();
    let k = tw.degree();
    let f = &code.f;
    let id = LinearizedPoly::identity(tw);
    let fp = tw.fp_basis();
    let inner: Vec<LinearizedPoly> = match side {
        Side::Right => vec![id.clone(), f.clone()],
        Side::Left => fp.iter().flat_map(|&u| [id.scale(tw, u), f.scale(tw, u)]).collect(),
    };
    let rows = inner.len() * n * k;
    let mut columns: Vec<Vec<u64>> = Vec::with_capacity(n * k + 2 * k * inner.len());
    for i in 0..n {
        for &u in &fp {
            let phi = LinearizedPoly::monomial(tw, i, u);
            let col = inner
                .iter()
                .flat_map(|c| {
                    let g = match side {
                        Side::Right => c.compose(tw, &phi),
                        Side::Left => phi.compose(tw, c),
                    };
                    poly_digits(tw, &g)
                })
                .collect();
            columns.push(col);
        }
    }
    for j in 0..inner.len() {
        for gen in [&id, f] {
            for &u in &fp {
                let mut col = vec![0u64; rows];
                col[j * n * k..(j + 1) * n * k].copy_from_slice(&poly_digits(tw, &gen.scale(tw, tw.neg(u))));
                columns.push(col);
            }
        }
    }
    let system = FpMatrix::from_columns(rows, tw.p(), &columns);
    let projected: Vec<Vec<u64>> = system.kernel().into_iter().map(|v| v[..n * k].to_vec()).collect();
    Idealizer { side, span: FpSpan::new(tw.p(), n * k, &projected) }
}

pub fn right_idealizer(tw: &FieldTower, code: &RdCode) -> Idealizer {
    idealizer(tw, code, Side::Right)
}

pub fn left_idealizer(tw: &FieldTower, code: &RdCode) -> Idealizer {
    idealizer(tw, code, Side::Left)
}

/// `(a b; c d) -> a x + c f(x)`: the first coordinate of `(x, f(x)) M`.
/// Reverses the order of products, which is harmless on commutative fields.
pub fn matrix_to_map(tw: &FieldTower, f: &LinearizedPoly, m: &Mat2) -> LinearizedPoly {
    LinearizedPoly::identity(tw).scale(tw, m.a).add(tw, &f.scale(tw, m.c))
}

fn compose_pow(tw: &FieldTower, g: &LinearizedPoly, mut k: u64) -> LinearizedPoly {
    let mut acc = LinearizedPoly::identity(tw);
    let mut base = g.clone();
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.compose(tw, &base);
        }
        base = base.compose(tw, &base);
        k >>= 1;
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealizerMatch {
    pub stabilizer_order: u128,
    pub idealizer_order: u128,
    pub t: usize,
}

/// `I_R(C_f)` and `G_f ∪ {O}` are fields of the same order, and
/// `M -> a x + c f` carries a generator of one onto a generator of the other.
pub fn check_idealizer_matches_stabilizer(tw: &FieldTower, f: &LinearizedPoly) -> Result<IdealizerMatch> {
    let mf = stabilizer::stabilizer_of_scattered(tw, f)?;
    let cert = stabilizer::verify_field(tw, &mf)?;
    let ir = right_idealizer(tw, &RdCode::new(f.clone()));
    let out = IdealizerMatch { stabilizer_order: mf.order(tw), idealizer_order: ir.order(tw), t: cert.t };
    if out.stabilizer_order != out.idealizer_order {
        return Err(Error::Mismatch(format!(
            "|G_f ∪ {{O}}| = {} but |I_R(C_f)| = {}",
            out.stabilizer_order, out.idealizer_order
        )));
    }
    let basis = ir.basis(tw);
    for (i, x) in basis.iter().enumerate() {
        for y in &basis[i..] {
            let xy = x.compose(tw, y);
            if !ir.contains(tw, &xy) || xy != y.compose(tw, x) {
                return Err(Error::Mismatch("right idealizer is not a commutative ring".into()));
            }
        }
    }
    let images: Vec<LinearizedPoly> = mf.basis(tw).iter().map(|m| matrix_to_map(tw, f, m)).collect();
    if images.iter().any(|g| !ir.contains(tw, g))
        || FpSpan::new(tw.p(), tw.n() * tw.degree(), &images.iter().map(|g| poly_digits(tw, g)).collect::<Vec<_>>()).dim()
            != ir.fp_dim()
    {
        return Err(Error::Mismatch("M -> a x + c f is not onto the idealizer".into()));
    }
    let mb = mf.basis(tw);
    for x in &mb {
        for y in &mb {
            let lhs = matrix_to_map(tw, f, &x.mul(tw, y));
            let rhs = matrix_to_map(tw, f, y).compose(tw, &matrix_to_map(tw, f, x));
            if lhs != rhs {
                return Err(Error::Mismatch("M -> a x + c f does not respect products".into()));
            }
        }
    }
    let gen = matrix_to_map(tw, f, &cert.generator);
    let ord = tw.q_pow(cert.t) - 1;
    let id = LinearizedPoly::identity(tw);
    if compose_pow(tw, &gen, ord) != id
        || crate::arith::factorize(ord).iter().any(|&(r, _)| compose_pow(tw, &gen, ord / r) == id)
    {
        return Err(Error::Mismatch("image of the generator has the wrong order".into()));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MrdReport {
    pub min_distance: usize,
    pub is_mrd: bool,
    pub right_idealizer_order: u128,
    pub left_idealizer_order: u128,
    pub matches_stabilizer: Option<bool>,
}

pub fn analyze(tw: &FieldTower, f: &LinearizedPoly, bound: u64, naive: bool) -> Result<MrdReport> {
    let code = RdCode::new(f.clone());
    let min_distance =
        if naive { min_distance_naive(tw, &code, bound)? } else { min_distance(tw, &code, bound)? };
    let scattered = crate::scatter::is_scattered(tw, f);
    let matches_stabilizer = if scattered {
        Some(match check_idealizer_matches_stabilizer(tw, f) {
            Ok(_) => true,
            Err(Error::Mismatch(_)) => false,
            Err(e) => return Err(e),
        })
    } else {
        None
    };
    Ok(MrdReport {
        min_distance,
        is_mrd: min_distance + 1 == tw.n(),
        right_idealizer_order: right_idealizer(tw, &code).order(tw),
        left_idealizer_order: left_idealizer(tw, &code).order(tw),
        matches_stabilizer,
    })
}

impl MrdReport {
    pub fn to_json(&self) -> Value {
        json!({
            "min_distance": self.min_distance,
            "is_mrd": self.is_mrd,
            "right_idealizer_order": order_json(self.right_idealizer_order),
            "left_idealizer_order": order_json(self.left_idealizer_order),
            "matches_stabilizer": self.matches_stabilizer,
        })
    }
}
