//! 2x2 matrices over F_(q^n) acting on row vectors, and points of PG(1, q^n).

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{ElementFormat, Fe, FieldTower};

/// `(a b; c d)`, acting as `(x, y) -> (x, y) M = (a x + c y, b x + d y)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2 {
    pub a: Fe,
    pub b: Fe,
    pub c: Fe,
    pub d: Fe,
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2 { a: Fe::ZERO, b: Fe::ZERO, c: Fe::ZERO, d: Fe::ZERO };
    pub const IDENTITY: Mat2 = Mat2 { a: Fe::ONE, b: Fe::ZERO, c: Fe::ZERO, d: Fe::ONE };

    pub fn new(a: Fe, b: Fe, c: Fe, d: Fe) -> Self {
        Self { a, b, c, d }
    }

    pub fn diag(x: Fe, y: Fe) -> Self {
        Self::new(x, Fe::ZERO, Fe::ZERO, y)
    }

    pub fn scalar(x: Fe) -> Self {
        Self::diag(x, x)
    }

    /// `(0 b; c 0)`.
    pub fn antidiag(b: Fe, c: Fe) -> Self {
        Self::new(Fe::ZERO, b, c, Fe::ZERO)
    }

    /// Matrix with the given rows.
    pub fn from_rows(r1: (Fe, Fe), r2: (Fe, Fe)) -> Self {
        Self::new(r1.0, r1.1, r2.0, r2.1)
    }

    pub fn rows(&self) -> [(Fe, Fe); 2] {
        [(self.a, self.b), (self.c, self.d)]
    }

    pub fn entries(&self) -> [Fe; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    pub fn is_diagonal(&self) -> bool {
        self.b.is_zero() && self.c.is_zero()
    }

    pub fn is_scalar(&self) -> bool {
        self.is_diagonal() && self.a == self.d
    }

    pub fn add(&self, tw: &FieldTower, o: &Self) -> Self {
        Self::new(tw.add(self.a, o.a), tw.add(self.b, o.b), tw.add(self.c, o.c), tw.add(self.d, o.d))
    }

    pub fn sub(&self, tw: &FieldTower, o: &Self) -> Self {
        Self::new(tw.sub(self.a, o.a), tw.sub(self.b, o.b), tw.sub(self.c, o.c), tw.sub(self.d, o.d))
    }

    pub fn scale(&self, tw: &FieldTower, k: Fe) -> Self {
        Self::new(tw.mul(k, self.a), tw.mul(k, self.b), tw.mul(k, self.c), tw.mul(k, self.d))
    }

    pub fn mul(&self, tw: &FieldTower, o: &Self) -> Self {
        let dot = |x1: Fe, y1: Fe, x2: Fe, y2: Fe| tw.add(tw.mul(x1, x2), tw.mul(y1, y2));
        Self::new(
            dot(self.a, self.b, o.a, o.c),
            dot(self.a, self.b, o.b, o.d),
            dot(self.c, self.d, o.a, o.c),
            dot(self.c, self.d, o.b, o.d),
        )
    }

    pub fn det(&self, tw: &FieldTower) -> Fe {
        tw.sub(tw.mul(self.a, self.d), tw.mul(self.b, self.c))
    }

    pub fn trace(&self, tw: &FieldTower) -> Fe {
        tw.add(self.a, self.d)
    }

    pub fn inverse(&self, tw: &FieldTower) -> Option<Self> {
        let det = self.det(tw);
        if det.is_zero() {
            return None;
        }
        let k = tw.inv(det);
        Some(Self::new(self.d, tw.neg(self.b), tw.neg(self.c), self.a).scale(tw, k))
    }

    pub fn pow(&self, tw: &FieldTower, mut k: u64) -> Self {
        let mut acc = Self::IDENTITY;
        let mut base = *self;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(tw, &base);
            }
            base = base.mul(tw, &base);
            k >>= 1;
        }
        acc
    }

    /// `(x, y) M`.
    pub fn apply(&self, tw: &FieldTower, v: (Fe, Fe)) -> (Fe, Fe) {
        let (x, y) = v;
        (
            tw.add(tw.mul(x, self.a), tw.mul(y, self.c)),
            tw.add(tw.mul(x, self.b), tw.mul(y, self.d)),
        )
    }

    /// Entrywise `x -> x^(p^k)`.
    pub fn frob_p(&self, tw: &FieldTower, k: usize) -> Self {
        Self::new(tw.frob_p(self.a, k), tw.frob_p(self.b, k), tw.frob_p(self.c, k), tw.frob_p(self.d, k))
    }

    pub fn to_json(&self, tw: &FieldTower, fmt: ElementFormat) -> Value {
        let e = |x| tw.element_json(x, fmt);
        json!([[e(self.a), e(self.b)], [e(self.c), e(self.d)]])
    }

    pub fn from_json(tw: &FieldTower, v: &Value) -> Result<Self> {
        let bad = || Error::Parse("matrix must be [[a, b], [c, d]]".into());
        let rows = v.as_array().filter(|r| r.len() == 2).ok_or_else(bad)?;
        let mut out = [Fe::ZERO; 4];
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_array().filter(|r| r.len() == 2).ok_or_else(bad)?;
            for (j, x) in row.iter().enumerate() {
                out[2 * i + j] = tw.parse_element(x)?;
            }
        }
        Ok(Self::new(out[0], out[1], out[2], out[3]))
    }
}

/// A point of PG(1, q^n): `<(1, m)>` or `<(0, 1)>`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProjPoint {
    Affine(Fe),
    Infinity,
}

impl ProjPoint {
    /// The span of a nonzero vector.
    pub fn of(tw: &FieldTower, v: (Fe, Fe)) -> Option<Self> {
        match v {
            (x, y) if !x.is_zero() => Some(Self::Affine(tw.div(y, x))),
            (_, y) if !y.is_zero() => Some(Self::Infinity),
            _ => None,
        }
    }

    /// Normalized spanning vector.
    pub fn vector(&self) -> (Fe, Fe) {
        match *self {
            Self::Affine(m) => (Fe::ONE, m),
            Self::Infinity => (Fe::ZERO, Fe::ONE),
        }
    }

    /// Deterministic total order: affine points by `g^k` order of the slope, infinity last.
    pub fn sort_key(&self, tw: &FieldTower) -> (u8, u64) {
        match *self {
            Self::Affine(m) => (0, tw.gk_key(m)),
            Self::Infinity => (1, 0),
        }
    }

    pub fn to_json(&self, tw: &FieldTower, fmt: ElementFormat) -> Value {
        let (x, y) = self.vector();
        json!([tw.element_json(x, fmt), tw.element_json(y, fmt)])
    }
}
