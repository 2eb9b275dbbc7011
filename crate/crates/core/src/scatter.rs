//! Scatteredness, the linear set L_f and the subspace U_f.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::arith::gcd_usize;
use crate::error::{Error, Result};
use crate::field::{ElementFormat, Fe, FieldTower};
use crate::linearized::{FastEval, LinearizedPoly};
use crate::mat2::ProjPoint;

const CHUNK: u64 = 1 << 12;

/// Points `<(x, f(x))>`, `x != 0`, stored as slopes `f(x)/x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSet {
    /// Distinct slopes in `g^k` order (zero last).
    pub slopes: Vec<Fe>,
    pub scattered: bool,
    /// Always false: `(x, f(x))` with `x != 0` never spans `<(0, 1)>`.
    pub has_infinity: bool,
}

impl LinearSet {
    pub fn size(&self) -> usize {
        self.slopes.len()
    }

    pub fn contains(&self, tw: &FieldTower, pt: ProjPoint) -> bool {
        match pt {
            ProjPoint::Infinity => self.has_infinity,
            ProjPoint::Affine(m) => {
                let key = tw.gk_key(m);
                self.slopes.binary_search_by_key(&key, |&s| tw.gk_key(s)).is_ok()
            }
        }
    }

    pub fn to_json(&self, tw: &FieldTower, emit_points: bool) -> Value {
        let mut v = json!({
            "size": self.size(),
            "scattered": self.scattered,
            "has_infinity": self.has_infinity,
        });
        if emit_points {
            v["slopes"] = self.slopes.iter().map(|&m| tw.element_json(m, ElementFormat::Gk)).collect();
        }
        v
    }
}

/// `(q^n - 1)/(q - 1)`: the number of points of PG(n-1, q), i.e. of `F_(q^n)^* / F_q^*`.
pub fn projective_count(tw: &FieldTower) -> u64 {
    (tw.order() - 1) / (tw.q() - 1)
}

/// `f(x)/x` for `x = g^k`, `0 <= k < (q^n-1)/(q-1)` (one `x` per F_q^*-class).
pub fn ratios(tw: &FieldTower, f: &LinearizedPoly) -> Vec<Fe> {
    let ev = FastEval::new(tw, f);
    let total = projective_count(tw);
    let g = tw.generator();
    let g_inv = tw.inv(g);
    let ev = &ev;
    (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .flat_map_iter(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(total);
            let mut x = tw.gpow(start);
            let mut x_inv = tw.inv(x);
            (start..end).map(move |_| {
                let r = tw.mul(ev.eval(x), x_inv);
                x = tw.mul(x, g);
                x_inv = tw.mul(x_inv, g_inv);
                r
            })
        })
        .collect()
}

fn sorted_distinct(tw: &FieldTower, mut v: Vec<Fe>) -> Vec<Fe> {
    v.par_sort_unstable();
    v.dedup();
    v.sort_by_cached_key(|&m| tw.gk_key(m));
    v
}

/// Every attained value of `f(x)/x` has a fiber of exactly `q - 1` elements.
pub fn is_scattered(tw: &FieldTower, f: &LinearizedPoly) -> bool {
    let mut r = ratios(tw, f);
    let total = r.len();
    r.par_sort_unstable();
    r.dedup();
    r.len() == total
}

pub fn linear_set(tw: &FieldTower, f: &LinearizedPoly) -> LinearSet {
    let r = ratios(tw, f);
    let total = r.len();
    let slopes = sorted_distinct(tw, r);
    LinearSet { scattered: slopes.len() == total, slopes, has_infinity: false }
}

/// Direct use of the definition: `z f(y) = y f(z)` forces `y/z` into F_q. Quadratic in `q^n`.
pub fn is_scattered_pairwise(tw: &FieldTower, f: &LinearizedPoly) -> bool {
    let xs: Vec<Fe> = tw.nonzero_elements().collect();
    let fx: Vec<Fe> = xs.iter().map(|&x| f.eval(tw, x)).collect();
    (0..xs.len()).into_par_iter().all(|i| {
        (0..xs.len()).all(|j| {
            tw.mul(xs[j], fx[i]) != tw.mul(xs[i], fx[j]) || tw.is_in_fq(tw.div(xs[i], xs[j]))
        })
    })
}

/// `v` lies in `U_f = {(x, f(x))}`.
pub fn in_subspace(tw: &FieldTower, f: &LinearizedPoly, v: (Fe, Fe)) -> bool {
    f.eval(tw, v.0) == v.1
}

/// For `y, z != 0` with `g(y)/y = g(z)/z` and `y/z` in `F_(q^s)` (intersected with
/// `F_(q^n)`, i.e. `F_(q^gcd(s, n))`), the ratio `y/z` must lie in F_q.
/// `g` must be `F_(q^t)`-linear: nonzero coefficients only at multiples of `t`.
pub fn is_r_partially_scattered(
    tw: &FieldTower,
    g: &LinearizedPoly,
    t: usize,
    s: usize,
) -> Result<bool> {
    tw.check_divisor(t)?;
    if g.support().iter().any(|&i| i % t != 0) {
        return Err(Error::NotSubfieldLinear { t });
    }
    let d = gcd_usize(s % tw.n(), tw.n());
    let lambdas: Vec<Fe> =
        tw.subfield_elements(d)?.into_iter().filter(|&l| !tw.is_in_fq(l)).collect();
    if lambdas.is_empty() {
        return Ok(true);
    }
    let ev = FastEval::new(tw, g);
    let total = projective_count(tw);
    Ok((0..total).into_par_iter().all(|k| {
        let y = tw.gpow(k);
        let r = tw.div(ev.eval(y), y);
        lambdas.iter().all(|&l| {
            let ly = tw.mul(l, y);
            tw.div(ev.eval(ly), ly) != r
        })
    }))
}

/// `dim_(F_q)` of `U_f` meet the F_(q^n)-span of `v`, by enumeration.
pub fn meet_dimension(tw: &FieldTower, f: &LinearizedPoly, pt: ProjPoint) -> usize {
    let (vx, vy) = pt.vector();
    let count = tw
        .elements()
        .filter(|&lambda| {
            let x = tw.mul(lambda, vx);
            f.eval(tw, x) == tw.mul(lambda, vy)
        })
        .count() as u64;
    let mut dim = 0;
    let mut size = 1u64;
    while size < count {
        size *= tw.q();
        dim += 1;
    }
    dim
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_not_scattered() {
        let tw = FieldTower::new(5, 1, 4).unwrap();
        let id = LinearizedPoly::identity(&tw);
        assert!(!is_scattered(&tw, &id));
        let ls = linear_set(&tw, &id);
        assert_eq!(ls.slopes, vec![Fe::ONE]);
    }

    #[test]
    fn pseudoregulus_is_scattered() {
        let tw = FieldTower::new(5, 1, 4).unwrap();
        for s in [1, 3] {
            let f = LinearizedPoly::monomial(&tw, s, Fe::ONE);
            assert!(is_scattered(&tw, &f));
            assert_eq!(linear_set(&tw, &f).size(), 156);
        }
        assert!(!is_scattered(&tw, &LinearizedPoly::monomial(&tw, 2, Fe::ONE)));
    }

    #[test]
    fn subspace_membership() {
        let tw = FieldTower::new(5, 1, 4).unwrap();
        let f = LinearizedPoly::monomial(&tw, 1, Fe::ONE);
        let g = tw.generator();
        assert!(in_subspace(&tw, &f, (Fe::ZERO, Fe::ZERO)));
        assert!(!in_subspace(&tw, &f, (Fe::ZERO, g)));
        assert!(in_subspace(&tw, &f, (g, tw.pow(g, 5))));
    }

    #[test]
    fn kernel_shows_up_as_slope_zero() {
        let tw = FieldTower::new(3, 1, 3).unwrap();
        // x^3 - x vanishes on F_3
        let f = LinearizedPoly::from_terms(&tw, &[(1, Fe::ONE), (0, tw.from_int(-1))]);
        let ls = linear_set(&tw, &f);
        assert!(ls.contains(&tw, ProjPoint::Affine(Fe::ZERO)));
        assert!(!ls.contains(&tw, ProjPoint::Infinity));
        assert_eq!(*ls.slopes.last().unwrap(), Fe::ZERO);
    }

    #[test]
    fn partial_scatteredness_guards() {
        let tw = FieldTower::new(3, 1, 4).unwrap();
        let id = LinearizedPoly::identity(&tw);
        assert!(is_r_partially_scattered(&tw, &id, 2, 1).unwrap());
        assert!(!is_r_partially_scattered(&tw, &id, 2, 2).unwrap());
        let x_q = LinearizedPoly::monomial(&tw, 1, Fe::ONE);
        assert_eq!(
            is_r_partially_scattered(&tw, &x_q, 2, 1).unwrap_err(),
            Error::NotSubfieldLinear { t: 2 }
        );
    }
}
