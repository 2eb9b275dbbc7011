//! The stabilizer `G_f` of `U_f` in GL(2, q^n), as the matrix field `G_f ∪ {O}`,
//! and its simultaneous diagonalization.

use serde_json::{json, Value};

use crate::arith::factorize;
use crate::error::{Error, Result};
use crate::field::{ElementFormat, Fe, FieldTower};
use crate::fplinalg::{FpMatrix, FpSpan};
use crate::linearized::LinearizedPoly;
use crate::mat2::{Mat2, ProjPoint};
use crate::scatter;

/// An F_p-subspace of 2x2 matrices over F_(q^n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixSpace {
    span: FpSpan,
}

fn flatten(tw: &FieldTower, m: &Mat2) -> Vec<u64> {
    m.entries().iter().flat_map(|&x| tw.digits(x)).collect()
}

fn unflatten(tw: &FieldTower, v: &[u64]) -> Mat2 {
    let k = tw.degree();
    let e: Vec<Fe> = v.chunks(k).map(|c| tw.from_digits(c).expect("digits in range")).collect();
    Mat2::new(e[0], e[1], e[2], e[3])
}

impl MatrixSpace {
    pub fn from_matrices(tw: &FieldTower, mats: &[Mat2]) -> Self {
        let vecs: Vec<Vec<u64>> = mats.iter().map(|m| flatten(tw, m)).collect();
        Self { span: FpSpan::new(tw.p(), 4 * tw.degree(), &vecs) }
    }

    /// Dimension over F_p.
    pub fn fp_dim(&self) -> usize {
        self.span.dim()
    }

    /// Number of elements, `p^dim`.
    pub fn order(&self, tw: &FieldTower) -> u128 {
        (tw.p() as u128).pow(self.fp_dim() as u32)
    }

    /// Dimension over F_q, when it is a whole number.
    pub fn q_dim(&self, tw: &FieldTower) -> Option<usize> {
        let e = tw.e() as usize;
        self.fp_dim().is_multiple_of(e).then(|| self.fp_dim() / e)
    }

    pub fn basis(&self, tw: &FieldTower) -> Vec<Mat2> {
        self.span.basis().iter().map(|v| unflatten(tw, v)).collect()
    }

    pub fn contains(&self, tw: &FieldTower, m: &Mat2) -> bool {
        self.span.contains(&flatten(tw, m))
    }

    /// All elements, in order of their F_p-coordinates read as base-p integers.
    pub fn elements<'a>(&'a self, tw: &'a FieldTower) -> impl Iterator<Item = Mat2> + 'a {
        let dim = self.fp_dim();
        let p = tw.p();
        let count = p.pow(dim as u32);
        (0..count).map(move |mut k| {
            let coords: Vec<u64> = (0..dim)
                .map(|_| {
                    let c = k % p;
                    k /= p;
                    c
                })
                .collect();
            unflatten(tw, &self.span.combine(&coords))
        })
    }

    pub fn to_json(&self, tw: &FieldTower, fmt: ElementFormat) -> Value {
        json!(self.basis(tw).iter().map(|m| m.to_json(tw, fmt)).collect::<Vec<_>>())
    }
}

/// Solution set of `U_f M ⊆ U_f` over all 2x2 matrices (including singular ones).
#[derive(Clone, Debug)]
pub struct Stabilizer {
    pub space: MatrixSpace,
    /// Whether `f` is scattered; the field structure is only guaranteed then.
    pub scattered: bool,
}

/// Field data of a matrix field `M` of order `q^t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldCertificate {
    pub t: usize,
    /// Element of multiplicative order `q^t - 1`.
    pub generator: Mat2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagonalization {
    /// Rows are common left eigenvectors; `P N P^-1` is diagonal for every `N`.
    pub p: Mat2,
    /// `P N P^-1 = diag(x, x^(q^s))`.
    pub s: usize,
    pub t: usize,
    /// Eigenvalues of the generator, matching the rows of `P`.
    pub eigenvalues: (Fe, Fe),
    pub x: ProjPoint,
    pub y: ProjPoint,
}

/// Solves `f(a x + c f(x)) = b x + d f(x)` as an F_p-linear system in the
/// F_p-coordinates of `a, b, c, d`.
pub fn stabilizer_space(tw: &FieldTower, f: &LinearizedPoly) -> MatrixSpace {
    let n = tw.n();
    let k = tw.degree();
    let basis = tw.fp_basis();
    let mut columns: Vec<Vec<u64>> = Vec::with_capacity(4 * k);
    let coeff_digits = |poly: &LinearizedPoly| -> Vec<u64> {
        poly.coeffs().iter().flat_map(|&c| tw.digits(c)).collect()
    };
    // slot a: f(a x)
    for &u in &basis {
        columns.push(coeff_digits(&f.rescale_input(tw, u)));
    }
    // slot b: -b x
    for &u in &basis {
        columns.push(coeff_digits(&LinearizedPoly::monomial(tw, 0, tw.neg(u))));
    }
    // slot c: f(c f(x))
    for &u in &basis {
        columns.push(coeff_digits(&f.compose(tw, &f.scale(tw, u))));
    }
    // slot d: -d f(x)
    for &u in &basis {
        columns.push(coeff_digits(&f.scale(tw, tw.neg(u))));
    }
    let system = FpMatrix::from_columns(n * k, tw.p(), &columns);
    let kernel = system.kernel();
    MatrixSpace { span: FpSpan::new(tw.p(), 4 * k, &kernel) }
}

pub fn compute_stabilizer(tw: &FieldTower, f: &LinearizedPoly) -> Stabilizer {
    Stabilizer { space: stabilizer_space(tw, f), scattered: scatter::is_scattered(tw, f) }
}

/// Stabilizer of a scattered polynomial; errors on non-scattered input.
pub fn stabilizer_of_scattered(tw: &FieldTower, f: &LinearizedPoly) -> Result<MatrixSpace> {
    let st = compute_stabilizer(tw, f);
    if st.scattered {
        Ok(st.space)
    } else {
        Err(Error::NotScattered)
    }
}

fn is_generator(tw: &FieldTower, m: &Mat2, order: u64, factors: &[(u64, u32)]) -> bool {
    m.pow(tw, order) == Mat2::IDENTITY
        && factors.iter().all(|&(r, _)| m.pow(tw, order / r) != Mat2::IDENTITY)
}

/// Confirms that the space is a field containing the identity and returns its
/// degree over F_q together with a multiplicative generator.
pub fn verify_field(tw: &FieldTower, mf: &MatrixSpace) -> Result<FieldCertificate> {
    let t = mf
        .q_dim(tw)
        .filter(|&t| t > 0 && tw.n().is_multiple_of(t))
        .ok_or_else(|| Error::NotAField(format!("order p^{} is not q^t with t | n", mf.fp_dim())))?;
    if !mf.contains(tw, &Mat2::IDENTITY) {
        return Err(Error::NotAField("identity missing".into()));
    }
    let basis = mf.basis(tw);
    for (i, x) in basis.iter().enumerate() {
        for (j, y) in basis.iter().enumerate().skip(i) {
            let xy = x.mul(tw, y);
            if !mf.contains(tw, &xy) {
                return Err(Error::NotAField(format!("product of basis elements {i} and {j} leaves the set")));
            }
            if xy != y.mul(tw, x) {
                return Err(Error::NotAField(format!("basis elements {i} and {j} do not commute")));
            }
        }
    }
    let group_order = tw.q_pow(t) - 1;
    if group_order == 1 {
        return Ok(FieldCertificate { t, generator: Mat2::IDENTITY });
    }
    let factors = factorize(group_order);
    // A commutative ring of q^t elements with an element of order q^t - 1 is a field.
    let generator = mf
        .elements(tw)
        .skip(1)
        .find(|m| is_generator(tw, m, group_order, &factors))
        .ok_or_else(|| Error::NotAField("no element of order q^t - 1".into()))?;
    Ok(FieldCertificate { t, generator })
}

/// Scales a vector so that its first nonzero coordinate is 1.
fn normalize_row(tw: &FieldTower, v: (Fe, Fe)) -> (Fe, Fe) {
    let lead = if v.0.is_zero() { v.1 } else { v.0 };
    let k = tw.inv(lead);
    (tw.mul(k, v.0), tw.mul(k, v.1))
}

/// Left eigenvector of `m` for eigenvalue `lambda`.
fn left_eigenvector(tw: &FieldTower, m: &Mat2, lambda: Fe) -> (Fe, Fe) {
    let v = (m.c, tw.sub(lambda, m.a));
    if !v.0.is_zero() || !v.1.is_zero() {
        v
    } else {
        (tw.sub(lambda, m.d), m.b)
    }
}

fn row_key(tw: &FieldTower, v: (Fe, Fe)) -> (u8, u64) {
    if v.0 == Fe::ONE {
        (0, tw.gk_key(v.1))
    } else {
        (1, 0)
    }
}

/// Simultaneous diagonalization: `P M P^-1 = {diag(x, x^(q^s)) : x in F_(q^t)}`.
///
/// Rows of `P` are normalized (first nonzero entry 1) and ordered: a row
/// `(1, y)` precedes `(0, 1)`, and two rows `(1, y)` are ordered by `y` in the
/// `g^k` order. A diagonal field therefore yields `P = I`.
pub fn diagonalize(
    tw: &FieldTower,
    mf: &MatrixSpace,
    cert: &FieldCertificate,
) -> Result<Diagonalization> {
    let m = cert.generator;
    if cert.t == 1 || m.is_scalar() {
        return Err(Error::AllScalar);
    }
    let (l1, l2) = tw
        .solve_quadratic(tw.neg(m.trace(tw)), m.det(tw))
        .ok_or_else(|| Error::NonSplitQuadratic("characteristic polynomial is irreducible".into()))?;
    if l1 == l2 {
        return Err(Error::NonSplitQuadratic("repeated eigenvalue".into()));
    }
    let mut rows = [
        (normalize_row(tw, left_eigenvector(tw, &m, l1)), l1),
        (normalize_row(tw, left_eigenvector(tw, &m, l2)), l2),
    ];
    rows.sort_by_key(|(v, _)| row_key(tw, *v));
    let p = Mat2::from_rows(rows[0].0, rows[1].0);
    let p_inv = p
        .inverse(tw)
        .ok_or_else(|| Error::NonSplitQuadratic("eigenvectors are dependent".into()))?;
    let (l1, l2) = (rows[0].1, rows[1].1);
    let t = cert.t;
    let s = (0..t)
        .find(|&s| tw.frob(l1, s) == l2)
        .ok_or_else(|| Error::Mismatch("eigenvalues are not Frobenius conjugates".into()))?;
    for n in mf.basis(tw) {
        let d = p.mul(tw, &n).mul(tw, &p_inv);
        if !d.is_diagonal() || tw.frob(d.a, s) != d.d || !tw.in_subfield(d.a, t)? {
            return Err(Error::Mismatch("basis element is not diagonalized by P".into()));
        }
    }
    Ok(Diagonalization {
        p,
        s,
        t,
        eigenvalues: (l1, l2),
        x: ProjPoint::of(tw, rows[0].0).expect("nonzero row"),
        y: ProjPoint::of(tw, rows[1].0).expect("nonzero row"),
    })
}

/// The two common eigen-directions of `G_f`, checked to lie off `L_f`.
pub fn transversal_points(tw: &FieldTower, f: &LinearizedPoly) -> Result<(ProjPoint, ProjPoint)> {
    let mf = stabilizer_of_scattered(tw, f)?;
    let cert = verify_field(tw, &mf)?;
    if cert.t == 1 {
        return Err(Error::NoTransversals);
    }
    let diag = diagonalize(tw, &mf, &cert)?;
    let ls = scatter::linear_set(tw, f);
    if ls.contains(tw, diag.x) || ls.contains(tw, diag.y) {
        return Err(Error::Mismatch("transversal point lies on the linear set".into()));
    }
    Ok((diag.x, diag.y))
}

/// Full report on `G_f`, as emitted by the CLI.
#[derive(Clone, Debug)]
pub struct StabilizerReport {
    pub stabilizer: Stabilizer,
    pub certificate: Option<FieldCertificate>,
    pub diagonalization: Option<Diagonalization>,
}

pub fn analyze(tw: &FieldTower, f: &LinearizedPoly) -> Result<StabilizerReport> {
    let stabilizer = compute_stabilizer(tw, f);
    let mut certificate = None;
    let mut diagonalization = None;
    if stabilizer.scattered {
        let cert = verify_field(tw, &stabilizer.space)?;
        if cert.t > 1 {
            diagonalization = Some(diagonalize(tw, &stabilizer.space, &cert)?);
        }
        certificate = Some(cert);
    }
    Ok(StabilizerReport { stabilizer, certificate, diagonalization })
}

/// A JSON number when it fits in `u64`, a decimal string otherwise.
pub fn order_json(x: u128) -> Value {
    u64::try_from(x).map_or_else(|_| json!(x.to_string()), |v| json!(v))
}

impl StabilizerReport {
    pub fn to_json(&self, tw: &FieldTower, fmt: ElementFormat) -> Value {
        let space = &self.stabilizer.space;
        let order = space.order(tw);
        let mut v = json!({
            "algebra_order": order_json(order),
            "order": Value::Null,
            "unverified": !self.stabilizer.scattered,
            "diagonalized": self.diagonalization.is_some(),
        });
        if let Some(cert) = &self.certificate {
            v["order"] = order_json(order - 1);
            v["t"] = json!(cert.t);
            v["generator"] = cert.generator.to_json(tw, fmt);
        } else {
            v["fp_basis"] = space.to_json(tw, fmt);
        }
        if let Some(d) = &self.diagonalization {
            v["s"] = json!(d.s);
            v["P"] = d.p.to_json(tw, fmt);
            v["transversals"] = json!([d.x.to_json(tw, fmt), d.y.to_json(tw, fmt)]);
        }
        v
    }
}
