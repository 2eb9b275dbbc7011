//! q-polynomials of q-degree below n, i.e. F_q-linear endomorphisms of F_(q^n).

use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::gcd_usize;
use crate::error::{Error, Result};
use crate::field::{ElementFormat, Fe, FieldTower};
use crate::fplinalg::FpMatrix;
use crate::fqlinalg::{self, FeMatrix};

/// `sum a_i x^(q^i)` for `i < n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearizedPoly {
    coeffs: Vec<Fe>,
}

/// Pairwise index differences of the support, together with their gcd.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaProfile {
    pub delta_set: Vec<usize>,
    pub t_h: usize,
}

impl DeltaProfile {
    pub fn is_standard(&self) -> bool {
        self.t_h > 1
    }
}

impl LinearizedPoly {
    pub fn new(tw: &FieldTower, coeffs: Vec<Fe>) -> Result<Self> {
        if coeffs.len() != tw.n() {
            return Err(Error::LengthMismatch { expected: tw.n(), got: coeffs.len() });
        }
        Ok(Self { coeffs })
    }

    /// Sum of `c x^(q^i)` terms; exponents are reduced modulo n.
    pub fn from_terms(tw: &FieldTower, terms: &[(usize, Fe)]) -> Self {
        let mut coeffs = vec![Fe::ZERO; tw.n()];
        for &(i, c) in terms {
            let i = i % tw.n();
            coeffs[i] = tw.add(coeffs[i], c);
        }
        Self { coeffs }
    }

    pub fn zero(tw: &FieldTower) -> Self {
        Self { coeffs: vec![Fe::ZERO; tw.n()] }
    }

    pub fn identity(tw: &FieldTower) -> Self {
        Self::monomial(tw, 0, Fe::ONE)
    }

    /// `c x^(q^i)`.
    pub fn monomial(tw: &FieldTower, i: usize, c: Fe) -> Self {
        Self::from_terms(tw, &[(i, c)])
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs[i % self.coeffs.len()]
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn q_degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    /// Indices with nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| !self.coeffs[i].is_zero()).collect()
    }

    pub fn eval(&self, tw: &FieldTower, x: Fe) -> Fe {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(Fe::ZERO, |acc, (i, &c)| tw.add(acc, tw.mul(c, tw.frob(x, i))))
    }

    pub fn add(&self, tw: &FieldTower, other: &Self) -> Self {
        Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| tw.add(a, b)).collect() }
    }

    pub fn sub(&self, tw: &FieldTower, other: &Self) -> Self {
        Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| tw.sub(a, b)).collect() }
    }

    /// `a f(x)`.
    pub fn scale(&self, tw: &FieldTower, a: Fe) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&c| tw.mul(a, c)).collect() }
    }

    /// `f(b x)`.
    pub fn rescale_input(&self, tw: &FieldTower, b: Fe) -> Self {
        Self {
            coeffs: self.coeffs.iter().enumerate().map(|(i, &c)| tw.mul(c, tw.frob(b, i))).collect(),
        }
    }

    /// `f(g(x))` reduced modulo `x^(q^n) - x`.
    pub fn compose(&self, tw: &FieldTower, g: &Self) -> Self {
        let n = self.n();
        let mut coeffs = vec![Fe::ZERO; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in g.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let k = (i + j) % n;
                coeffs[k] = tw.add(coeffs[k], tw.mul(a, tw.frob(b, i)));
            }
        }
        Self { coeffs }
    }

    /// Applies `c -> c^(p^k)` to every coefficient.
    pub fn twist(&self, tw: &FieldTower, k: usize) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&c| tw.frob_p(c, k)).collect() }
    }

    /// Matrix over F_q whose column j holds the coordinates of `f(basis_j)`.
    pub fn to_matrix(&self, tw: &FieldTower, basis: &[Fe]) -> Result<FeMatrix> {
        let dual = tw.dual_basis(basis).ok_or(Error::NotABasis)?;
        let images: Vec<Fe> = basis.iter().map(|&b| self.eval(tw, b)).collect();
        Ok(dual
            .iter()
            .map(|&d| images.iter().map(|&y| tw.trace(tw.mul(d, y))).collect())
            .collect())
    }

    pub fn to_default_matrix(&self, tw: &FieldTower) -> FeMatrix {
        self.to_matrix(tw, tw.fq_basis()).expect("default basis is a basis")
    }

    /// Inverse of [`Self::to_matrix`]: interpolates through the Moore system
    /// `sum_i a_i basis_j^(q^i) = image_j`.
    pub fn from_matrix(tw: &FieldTower, m: &FeMatrix, basis: &[Fe]) -> Result<Self> {
        let n = tw.n();
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(Error::LengthMismatch { expected: n, got: m.len() });
        }
        if tw.dual_basis(basis).is_none() {
            return Err(Error::NotABasis);
        }
        let images: Vec<Fe> = (0..n)
            .map(|j| {
                (0..n).fold(Fe::ZERO, |acc, i| tw.add(acc, tw.mul(m[i][j], basis[i])))
            })
            .collect();
        let moore: FeMatrix =
            basis.iter().map(|&b| (0..n).map(|i| tw.frob(b, i)).collect()).collect();
        let inv = fqlinalg::inverse(tw, &moore).ok_or(Error::NotABasis)?;
        Ok(Self { coeffs: fqlinalg::mul_vec(tw, &inv, &images) })
    }

    /// The map as an F_p-matrix on power-basis digits.
    pub fn fp_matrix(&self, tw: &FieldTower) -> FpMatrix {
        tw.fp_matrix_of(|x| self.eval(tw, x))
    }

    /// Rank as an F_q-linear map.
    pub fn rank(&self, tw: &FieldTower) -> usize {
        self.fp_matrix(tw).rank() / tw.e() as usize
    }

    pub fn kernel_dim(&self, tw: &FieldTower) -> usize {
        tw.n() - self.rank(tw)
    }

    pub fn invert(&self, tw: &FieldTower) -> Result<Self> {
        let m = self.to_default_matrix(tw);
        let inv = fqlinalg::inverse(tw, &m).ok_or(Error::NotBijective)?;
        Self::from_matrix(tw, &inv, tw.fq_basis())
    }

    pub fn delta_profile(&self) -> Result<DeltaProfile> {
        let n = self.n();
        let support = self.support();
        if support.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        let mut delta: Vec<usize> = vec![n];
        for &i in &support {
            for &j in &support {
                if i != j {
                    delta.push((i + n - j) % n);
                }
            }
        }
        delta.sort_unstable();
        delta.dedup();
        let t_h = delta.iter().fold(0, |g, &d| gcd_usize(g, d));
        Ok(DeltaProfile { delta_set: delta, t_h })
    }

    /// `(s, t)` with every nonzero coefficient at an index `= s (mod t)`, `t = t_h > 1`.
    pub fn standard_form_params(&self) -> Result<(usize, usize)> {
        let profile = self.delta_profile()?;
        if !profile.is_standard() {
            return Err(Error::NotStandard);
        }
        let t = profile.t_h;
        Ok((self.support()[0] % t, t))
    }

    pub fn to_json(&self, tw: &FieldTower, fmt: ElementFormat) -> Value {
        json!({ "coeffs": self.coeffs.iter().map(|&c| tw.element_json(c, fmt)).collect::<Vec<_>>() })
    }

    /// Parses `{"coeffs": [...]}` (exactly n entries) or a bare array.
    pub fn from_json(tw: &FieldTower, v: &Value) -> Result<Self> {
        let arr = match v {
            Value::Array(a) => a,
            Value::Object(o) => o
                .get("coeffs")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("polynomial needs a \"coeffs\" array".into()))?,
            _ => return Err(Error::Parse("polynomial must be an object or array".into())),
        };
        let coeffs = arr.iter().map(|c| tw.parse_element(c)).collect::<Result<Vec<_>>>()?;
        Self::new(tw, coeffs)
    }

    /// Human-readable form, e.g. `x^(q^1) + g^7*x^(q^3)`.
    pub fn display(&self, tw: &FieldTower) -> String {
        let terms: Vec<String> = self
            .support()
            .into_iter()
            .map(|i| {
                let c = self.coeffs[i];
                let mono = if i == 0 { "x".to_string() } else { format!("x^(q^{i})") };
                if c == Fe::ONE {
                    mono
                } else {
                    format!("{}*{}", tw.format_gk(c), mono)
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

/// Evaluator for repeated use: goes through the F_p-matrix when the tower has no log tables.
pub struct FastEval<'a> {
    tw: &'a FieldTower,
    poly: &'a LinearizedPoly,
    mat: Option<FpMatrix>,
}

impl<'a> FastEval<'a> {
    pub fn new(tw: &'a FieldTower, poly: &'a LinearizedPoly) -> Self {
        let mat = (!tw.has_log_tables()).then(|| poly.fp_matrix(tw));
        Self { tw, poly, mat }
    }

    #[inline]
    pub fn eval(&self, x: Fe) -> Fe {
        match &self.mat {
            Some(m) => self.tw.apply_fp_matrix(m, x),
            None => self.poly.eval(self.tw, x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tower(p: u64, e: u32, n: usize) -> FieldTower {
        FieldTower::new(p, e, n).unwrap()
    }

    #[test]
    fn evaluate_example() {
        let tw = tower(5, 1, 4);
        let g = tw.generator();
        let f = LinearizedPoly::from_terms(&tw, &[(1, Fe::ONE), (2, g)]);
        // g^5 + g * g^25
        let expected = tw.add(tw.pow(g, 5), tw.mul(g, tw.pow(g, 25)));
        assert_eq!(f.eval(&tw, g), expected);
        assert_eq!(expected, tw.add(tw.gpow(5), tw.gpow(26)));
        let id = LinearizedPoly::identity(&tw);
        assert_eq!(id.eval(&tw, g), g);
    }

    #[test]
    fn compose_matches_pointwise() {
        let tw = tower(3, 1, 3);
        let f = LinearizedPoly::from_terms(&tw, &[(1, Fe::ONE), (0, Fe::ONE)]);
        let g = LinearizedPoly::monomial(&tw, 1, Fe::ONE);
        let fg = f.compose(&tw, &g);
        assert_eq!(fg, LinearizedPoly::from_terms(&tw, &[(2, Fe::ONE), (1, Fe::ONE)]));
        for x in tw.elements() {
            assert_eq!(fg.eval(&tw, x), f.eval(&tw, g.eval(&tw, x)));
        }
        let a = LinearizedPoly::monomial(&tw, 2, Fe::ONE);
        let b = LinearizedPoly::monomial(&tw, 2, Fe::ONE);
        assert_eq!(a.compose(&tw, &b), LinearizedPoly::monomial(&tw, 1, Fe::ONE));
    }

    #[test]
    fn matrix_roundtrip_and_frobenius() {
        let tw = tower(3, 1, 3);
        let frob = LinearizedPoly::monomial(&tw, 1, Fe::ONE);
        let m = frob.to_default_matrix(&tw);
        assert_eq!(LinearizedPoly::from_matrix(&tw, &m, tw.fq_basis()).unwrap(), frob);
        assert_eq!(
            LinearizedPoly::identity(&tw).to_default_matrix(&tw),
            fqlinalg::identity(3)
        );
        assert_eq!(LinearizedPoly::zero(&tw).to_default_matrix(&tw), fqlinalg::zeros(3, 3));
        let collinear = vec![Fe::ONE, tw.from_int(2), tw.root()];
        assert_eq!(frob.to_matrix(&tw, &collinear).unwrap_err(), Error::NotABasis);
    }

    #[test]
    fn frobenius_matrix_agrees_with_tower() {
        let tw = tower(5, 1, 4);
        let f = LinearizedPoly::monomial(&tw, 1, Fe::ONE);
        assert_eq!(&f.fp_matrix(&tw), tw.frobenius_matrix());
    }

    #[test]
    fn inverse_of_monomial() {
        let tw = tower(5, 1, 4);
        let f = LinearizedPoly::monomial(&tw, 1, Fe::ONE);
        assert_eq!(f.invert(&tw).unwrap(), LinearizedPoly::monomial(&tw, 3, Fe::ONE));
        let tr = LinearizedPoly::from_terms(&tw, &(0..4).map(|i| (i, Fe::ONE)).collect::<Vec<_>>());
        assert_eq!(tr.invert(&tw).unwrap_err(), Error::NotBijective);
        assert_eq!(tr.rank(&tw), 1);
    }

    #[test]
    fn delta_profiles() {
        let tw = tower(5, 1, 6);
        let g = tw.generator();
        let lp = LinearizedPoly::from_terms(&tw, &[(1, Fe::ONE), (5, g)]);
        let prof = lp.delta_profile().unwrap();
        assert_eq!(prof.delta_set, vec![2, 4, 6]);
        assert_eq!(prof.t_h, 2);
        assert_eq!(lp.standard_form_params().unwrap(), (1, 2));
        let mono = LinearizedPoly::monomial(&tw, 3, Fe::ONE);
        assert_eq!(mono.delta_profile().unwrap().t_h, 6);
        assert_eq!(mono.standard_form_params().unwrap(), (3, 6));
        assert_eq!(LinearizedPoly::zero(&tw).delta_profile().unwrap_err(), Error::ZeroPolynomial);

        let tw5 = tower(5, 1, 5);
        let odd = LinearizedPoly::from_terms(&tw5, &[(1, Fe::ONE), (4, tw5.generator())]);
        assert_eq!(odd.delta_profile().unwrap().t_h, 1);
        assert_eq!(odd.standard_form_params().unwrap_err(), Error::NotStandard);
    }

    #[test]
    fn json_roundtrip() {
        let tw = tower(5, 1, 4);
        let f = LinearizedPoly::from_terms(&tw, &[(1, Fe::ONE), (3, tw.gpow(9))]);
        for fmt in [ElementFormat::Digits, ElementFormat::Gk] {
            assert_eq!(LinearizedPoly::from_json(&tw, &f.to_json(&tw, fmt)).unwrap(), f);
        }
        assert!(matches!(
            LinearizedPoly::from_json(&tw, &json!({"coeffs": [0, 1]})),
            Err(Error::LengthMismatch { expected: 4, got: 2 })
        ));
        assert_eq!(f.display(&tw), "x^(q^1) + g^9*x^(q^3)");
    }
}
