//! The tower F_p ⊂ F_q ⊂ F_(q^n). Every element lives in the top field as a
//! packed base-p coordinate vector over the power basis of the modulus;
//! subfields are recognized by membership tests.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::arith::{checked_pow, factorize, is_prime};
use crate::error::{Error, Result};
use crate::fplinalg::FpMatrix;
use crate::fpoly;
use crate::fqlinalg;

/// Largest field the tower agrees to build.
pub const DEFAULT_ELEMENT_BOUND: u64 = 1 << 40;
/// Fields up to this size get exp/log/Zech tables.
pub const LOG_TABLE_BOUND: u64 = 1 << 22;

const MAX_DEGREE: usize = 40;
const NO_LOG: u32 = u32::MAX;

/// An element of F_(q^n): coordinates over F_p packed as `sum c_i p^i`.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fe(u64);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    /// Packed coordinate index in `[0, p^(e n))`.
    pub fn index(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// How elements are written in JSON.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ElementFormat {
    /// Power-basis coordinates, lowest first.
    Digits,
    /// `"g^k"` relative to the tower's generator, `"0"` for zero.
    Gk,
}

/// Serializable description of a tower.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub e: u32,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

struct LogTables {
    exp: Vec<u64>,
    log: Vec<u32>,
    // zech[d] = log(1 + g^d)
    zech: Vec<u32>,
}

pub struct FieldTower {
    p: u64,
    e: u32,
    n: usize,
    m: usize,
    q: u64,
    order: u64,
    modulus: Vec<u64>,
    seed: u64,
    pow_p: Vec<u64>,
    generator: Fe,
    group_factors: Vec<(u64, u32)>,
    q_pow_mod: Vec<u64>,
    frob: Vec<FpMatrix>,
    tables: Option<LogTables>,
    fq_basis: Vec<Fe>,
    fq_dual: Vec<Fe>,
}

impl fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldTower")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("n", &self.n)
            .field("modulus", &self.modulus)
            .field("generator", &self.generator)
            .field("tables", &self.tables.is_some())
            .finish()
    }
}

impl FieldTower {
    pub fn new(p: u64, e: u32, n: usize) -> Result<Self> {
        Self::build(p, e, n, None, 0, DEFAULT_ELEMENT_BOUND)
    }

    pub fn with_seed(p: u64, e: u32, n: usize, seed: u64) -> Result<Self> {
        Self::build(p, e, n, None, seed, DEFAULT_ELEMENT_BOUND)
    }

    pub fn with_bound(p: u64, e: u32, n: usize, seed: u64, bound: u64) -> Result<Self> {
        Self::build(p, e, n, None, seed, bound)
    }

    pub fn with_modulus(p: u64, e: u32, n: usize, modulus: Vec<u64>) -> Result<Self> {
        Self::build(p, e, n, Some(modulus), 0, DEFAULT_ELEMENT_BOUND)
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Self> {
        Self::build(
            spec.p,
            spec.e,
            spec.n,
            spec.modulus.clone(),
            spec.seed.unwrap_or(0),
            DEFAULT_ELEMENT_BOUND,
        )
    }

    fn build(
        p: u64,
        e: u32,
        n: usize,
        modulus: Option<Vec<u64>>,
        seed: u64,
        bound: u64,
    ) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if e == 0 || n < 2 {
            return Err(Error::InvalidField(format!("need e >= 1 and n >= 2, got e = {e}, n = {n}")));
        }
        let m = e as usize * n;
        let order = checked_pow(p, m as u32).unwrap_or(u128::MAX);
        if m > MAX_DEGREE || order > bound as u128 {
            return Err(Error::DegreeTooLarge { order, bound });
        }
        let order = order as u64;
        let modulus = match modulus {
            Some(md) => {
                if md.len() != m + 1 || md[m] != 1 || md.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidField(format!(
                        "modulus must be monic of degree {m} with entries in [0, {p})"
                    )));
                }
                if !fpoly::is_irreducible(&md, p) {
                    return Err(Error::NotIrreducible);
                }
                md
            }
            None => find_irreducible(p, m, seed),
        };
        let pow_p: Vec<u64> = (0..=m as u32).map(|i| p.pow(i)).collect();
        let q = pow_p[e as usize];
        let group_factors = factorize(order - 1);
        let q_pow_mod = (0..=n as u32).map(|k| ((q as u128).pow(k) % (order - 1) as u128) as u64).collect();

        let mut tower = FieldTower {
            p,
            e,
            n,
            m,
            q,
            order,
            modulus,
            seed,
            pow_p,
            generator: Fe::ONE,
            group_factors,
            q_pow_mod,
            frob: Vec::new(),
            tables: None,
            fq_basis: Vec::new(),
            fq_dual: Vec::new(),
        };
        tower.generator = (2..order)
            .map(Fe)
            .find(|&x| tower.is_generator(x))
            .ok_or_else(|| Error::InvalidField("no primitive element found".into()))?;
        tower.frob = (0..n).map(|k| tower.frobenius_matrix_slow(k)).collect();
        if order <= LOG_TABLE_BOUND {
            tower.tables = Some(tower.build_tables());
        }
        let root = Fe(p);
        tower.fq_basis = (0..n).map(|j| tower.pow(root, j as u128)).collect();
        tower.fq_dual = tower.dual_basis(&tower.fq_basis.clone()).ok_or(Error::NotABasis)?;
        Ok(tower)
    }

    fn is_generator(&self, x: Fe) -> bool {
        let n1 = self.order - 1;
        self.group_factors
            .iter()
            .all(|&(r, _)| self.pow_slow(x, (n1 / r) as u128) != Fe::ONE)
    }

    fn frobenius_matrix_slow(&self, k: usize) -> FpMatrix {
        let qk = (self.q as u128).pow(k as u32);
        let cols: Vec<Vec<u64>> = (0..self.m)
            .map(|j| {
                let xj = Fe(self.pow_p[j]);
                self.digits(self.pow_slow(xj, qk))
            })
            .collect();
        FpMatrix::from_columns(self.m, self.p, &cols)
    }

    fn build_tables(&self) -> LogTables {
        let n1 = (self.order - 1) as usize;
        let mut exp = vec![0u64; n1];
        let mut log = vec![NO_LOG; self.order as usize];
        let mut cur = Fe::ONE;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = cur.0;
            log[cur.0 as usize] = i as u32;
            cur = self.mul_slow(cur, self.generator);
        }
        let zech = exp
            .iter()
            .map(|&v| {
                let w = self.plus_one(v);
                if w == 0 {
                    NO_LOG
                } else {
                    log[w as usize]
                }
            })
            .collect();
        LogTables { exp, log, zech }
    }

    #[inline]
    fn plus_one(&self, v: u64) -> u64 {
        if v % self.p == self.p - 1 {
            v - (self.p - 1)
        } else {
            v + 1
        }
    }

    /// Trace-dual of an F_q-basis, or `None` when `basis` is not one.
    pub fn dual_basis(&self, basis: &[Fe]) -> Option<Vec<Fe>> {
        if basis.len() != self.n {
            return None;
        }
        let n = basis.len();
        let gram: Vec<Vec<Fe>> = (0..n)
            .map(|i| (0..n).map(|j| self.trace(self.mul(basis[i], basis[j]))).collect())
            .collect();
        let inv = fqlinalg::inverse(self, &gram)?;
        Some(
            (0..n)
                .map(|j| {
                    (0..n).fold(Fe::ZERO, |acc, i| self.add(acc, self.mul(inv[j][i], basis[i])))
                })
                .collect(),
        )
    }

    // ---- parameters ----

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Degree `e n` of the top field over F_p.
    pub fn degree(&self) -> usize {
        self.m
    }

    /// Number of elements `q^n`.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn generator(&self) -> Fe {
        self.generator
    }

    pub fn has_log_tables(&self) -> bool {
        self.tables.is_some()
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.p,
            e: self.e,
            n: self.n,
            modulus: Some(self.modulus.clone()),
            seed: Some(self.seed),
        }
    }

    /// `q^k` for `k <= n`.
    pub fn q_pow(&self, k: usize) -> u64 {
        self.q.pow(k as u32)
    }

    pub fn check_divisor(&self, t: usize) -> Result<()> {
        if t == 0 || !self.n.is_multiple_of(t) {
            Err(Error::NotADivisor { t, n: self.n })
        } else {
            Ok(())
        }
    }

    // ---- coordinates ----

    pub fn digits(&self, x: Fe) -> Vec<u64> {
        let mut v = x.0;
        (0..self.m)
            .map(|_| {
                let d = v % self.p;
                v /= self.p;
                d
            })
            .collect()
    }

    fn digits_into(&self, x: Fe, out: &mut [u64; MAX_DEGREE]) {
        let mut v = x.0;
        for d in out.iter_mut().take(self.m) {
            *d = v % self.p;
            v /= self.p;
        }
    }

    pub fn from_digits(&self, digits: &[u64]) -> Result<Fe> {
        if digits.len() > self.m {
            return Err(Error::LengthMismatch { expected: self.m, got: digits.len() });
        }
        if let Some(&bad) = digits.iter().find(|&&d| d >= self.p) {
            return Err(Error::Parse(format!("digit {bad} out of range for p = {}", self.p)));
        }
        Ok(self.pack(digits))
    }

    fn pack(&self, digits: &[u64]) -> Fe {
        Fe(digits.iter().zip(&self.pow_p).map(|(d, w)| d * w).sum())
    }

    /// Element of the prime field.
    pub fn from_int(&self, c: i64) -> Fe {
        Fe(c.rem_euclid(self.p as i64) as u64)
    }

    /// The class of `x` in `F_p[x]/(modulus)`.
    pub fn root(&self) -> Fe {
        Fe(self.p)
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.order).map(Fe)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Fe> {
        (1..self.order).map(Fe)
    }

    /// Default F_q-basis `1, x, ..., x^(n-1)`.
    pub fn fq_basis(&self) -> &[Fe] {
        &self.fq_basis
    }

    /// Coordinates (elements of F_q) of `y` over [`Self::fq_basis`].
    pub fn fq_coords(&self, y: Fe) -> Vec<Fe> {
        self.fq_dual.iter().map(|&d| self.trace(self.mul(d, y))).collect()
    }

    pub fn from_fq_coords(&self, coords: &[Fe]) -> Fe {
        coords
            .iter()
            .zip(&self.fq_basis)
            .fold(Fe::ZERO, |acc, (&c, &b)| self.add(acc, self.mul(c, b)))
    }

    /// F_p-matrix of `x -> x^q` over the power basis (column j is the image of `x^j`).
    pub fn frobenius_matrix(&self) -> &FpMatrix {
        &self.frob[1]
    }

    // ---- arithmetic ----

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        if self.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        match &self.tables {
            Some(t) => {
                let n1 = t.exp.len();
                let la = t.log[a.0 as usize] as usize;
                let lb = t.log[b.0 as usize] as usize;
                let d = if lb >= la { lb - la } else { lb + n1 - la };
                let z = t.zech[d];
                if z == NO_LOG {
                    Fe::ZERO
                } else {
                    let s = la + z as usize;
                    Fe(t.exp[if s >= n1 { s - n1 } else { s }])
                }
            }
            None => self.add_slow(a, b),
        }
    }

    fn add_slow(&self, a: Fe, b: Fe) -> Fe {
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u64;
        for &w in &self.pow_p[..self.m] {
            let d = (x % self.p + y % self.p) % self.p;
            out += d * w;
            x /= self.p;
            y /= self.p;
        }
        Fe(out)
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if a.0 == 0 || self.p == 2 {
            return a;
        }
        match &self.tables {
            Some(t) => {
                let n1 = t.exp.len();
                let s = t.log[a.0 as usize] as usize + n1 / 2;
                Fe(t.exp[if s >= n1 { s - n1 } else { s }])
            }
            None => {
                let mut x = a.0;
                let mut out = 0;
                for &w in &self.pow_p[..self.m] {
                    let d = x % self.p;
                    out += ((self.p - d) % self.p) * w;
                    x /= self.p;
                }
                Fe(out)
            }
        }
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        match &self.tables {
            Some(t) => {
                let n1 = t.exp.len();
                let s = t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize;
                Fe(t.exp[if s >= n1 { s - n1 } else { s }])
            }
            None => self.mul_slow(a, b),
        }
    }

    fn mul_slow(&self, a: Fe, b: Fe) -> Fe {
        let m = self.m;
        let p = self.p;
        let mut da = [0u64; MAX_DEGREE];
        let mut db = [0u64; MAX_DEGREE];
        self.digits_into(a, &mut da);
        self.digits_into(b, &mut db);
        let mut prod = [0u64; 2 * MAX_DEGREE];
        for j in 0..m {
            let y = db[j];
            if y == 0 {
                continue;
            }
            for i in 0..m {
                prod[i + j] = (prod[i + j] + da[i] * y) % p;
            }
        }
        for i in (m..2 * m - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..m {
                let sub = c * self.modulus[j] % p;
                prod[i - m + j] = (prod[i - m + j] + p - sub) % p;
            }
            prod[i] = 0;
        }
        self.pack(&prod[..m])
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self, a: Fe) -> Fe {
        assert!(!a.is_zero(), "inverse of zero");
        match &self.tables {
            Some(t) => {
                let n1 = t.exp.len();
                let l = t.log[a.0 as usize] as usize;
                Fe(t.exp[(n1 - l) % n1])
            }
            None => self.pow(a, (self.order - 2) as u128),
        }
    }

    pub fn div(&self, a: Fe, b: Fe) -> Fe {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Fe, k: u128) -> Fe {
        if k == 0 {
            return Fe::ONE;
        }
        if a.is_zero() {
            return Fe::ZERO;
        }
        let n1 = (self.order - 1) as u128;
        match &self.tables {
            Some(t) => {
                let l = t.log[a.0 as usize] as u128;
                Fe(t.exp[((l * (k % n1)) % n1) as usize])
            }
            None => self.pow_slow(a, k % n1),
        }
    }

    fn pow_slow(&self, a: Fe, mut k: u128) -> Fe {
        let mut acc = Fe::ONE;
        let mut base = a;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            k >>= 1;
        }
        acc
    }

    /// Signed power; negative exponents need a nonzero base.
    pub fn pow_i(&self, a: Fe, k: i128) -> Fe {
        if k >= 0 {
            self.pow(a, k as u128)
        } else {
            self.pow(self.inv(a), k.unsigned_abs())
        }
    }

    /// `g^k` for the fixed generator.
    pub fn gpow(&self, k: u64) -> Fe {
        match &self.tables {
            Some(t) => Fe(t.exp[(k % t.exp.len() as u64) as usize]),
            None => self.pow(self.generator, k as u128),
        }
    }

    /// `x^(q^k)`, with `k` reduced modulo `n`.
    #[inline]
    pub fn frob(&self, x: Fe, k: usize) -> Fe {
        let k = k % self.n;
        if k == 0 || x.0 == 0 {
            return x;
        }
        match &self.tables {
            Some(t) => {
                let n1 = t.exp.len() as u64;
                let l = t.log[x.0 as usize] as u64;
                Fe(t.exp[((l as u128 * self.q_pow_mod[k] as u128) % n1 as u128) as usize])
            }
            None => {
                self.apply_fp_matrix(&self.frob[k], x)
            }
        }
    }

    /// `x^(p^k)`, with `k` reduced modulo `e n`.
    pub fn frob_p(&self, x: Fe, k: usize) -> Fe {
        let k = k % self.m;
        if k == 0 {
            x
        } else {
            self.pow(x, self.pow_p[k] as u128)
        }
    }

    /// Absolute trace `F_(q^n) -> F_p`.
    pub fn abs_trace(&self, x: Fe) -> Fe {
        (0..self.m).fold(Fe::ZERO, |acc, i| self.add(acc, self.frob_p(x, i)))
    }

    /// Relative trace `F_(q^n) -> F_q`.
    pub fn trace(&self, x: Fe) -> Fe {
        (0..self.n).fold(Fe::ZERO, |acc, i| self.add(acc, self.frob(x, i)))
    }

    /// `N_(q^n/q^t)(x) = x^((q^n-1)/(q^t-1))`.
    pub fn norm(&self, x: Fe, t: usize) -> Result<Fe> {
        self.check_divisor(t)?;
        let exp = (self.order - 1) / (self.q_pow(t) - 1);
        Ok(self.pow(x, exp as u128))
    }

    /// `x^(q^t) == x`.
    pub fn in_subfield(&self, x: Fe, t: usize) -> Result<bool> {
        self.check_divisor(t)?;
        Ok(self.frob(x, t) == x)
    }

    pub fn is_in_fq(&self, x: Fe) -> bool {
        self.frob(x, 1) == x
    }

    /// `g^((q^n-1)/(q^t-1))`, a generator of `F_(q^t)^*`.
    pub fn subfield_primitive(&self, t: usize) -> Result<Fe> {
        self.check_divisor(t)?;
        Ok(self.gpow((self.order - 1) / (self.q_pow(t) - 1)))
    }

    /// All of F_(q^t): zero first, then powers of the subfield primitive.
    pub fn subfield_elements(&self, t: usize) -> Result<Vec<Fe>> {
        let w = self.subfield_primitive(t)?;
        let size = self.q_pow(t);
        let mut out = Vec::with_capacity(size as usize);
        out.push(Fe::ZERO);
        let mut cur = Fe::ONE;
        for _ in 1..size {
            out.push(cur);
            cur = self.mul(cur, w);
        }
        Ok(out)
    }

    pub fn mult_order(&self, x: Fe) -> u64 {
        assert!(!x.is_zero());
        let mut ord = self.order - 1;
        for &(r, k) in &self.group_factors {
            for _ in 0..k {
                if self.pow(x, (ord / r) as u128) == Fe::ONE {
                    ord /= r;
                } else {
                    break;
                }
            }
        }
        ord
    }

    /// Discrete logarithm to the base of the fixed generator.
    pub fn dlog(&self, x: Fe) -> Option<u64> {
        if x.is_zero() {
            return None;
        }
        match &self.tables {
            Some(t) => Some(t.log[x.0 as usize] as u64),
            None => self.dlog_pohlig_hellman(x),
        }
    }

    fn dlog_pohlig_hellman(&self, y: Fe) -> Option<u64> {
        let n1 = self.order - 1;
        let g_inv = self.inv(self.generator);
        let mut acc: (u128, u128) = (0, 1);
        for &(r, k) in &self.group_factors {
            let gamma = self.pow(self.generator, (n1 / r) as u128);
            let mut x = 0u64;
            let mut rpow = 1u64;
            for _ in 0..k {
                let t = self.mul(self.pow(g_inv, x as u128), y);
                let h = self.pow(t, (n1 / (rpow * r)) as u128);
                let d = self.bsgs(gamma, h, r)?;
                x += d * rpow;
                rpow *= r;
            }
            acc = crt(acc, (x as u128, rpow as u128));
        }
        Some(acc.0 as u64)
    }

    fn bsgs(&self, base: Fe, target: Fe, ord: u64) -> Option<u64> {
        let s = (ord as f64).sqrt().ceil() as u64 + 1;
        let mut baby = HashMap::with_capacity(s as usize);
        let mut cur = Fe::ONE;
        for j in 0..s {
            baby.entry(cur).or_insert(j);
            cur = self.mul(cur, base);
        }
        let giant = self.inv(self.pow(base, s as u128));
        let mut gamma = target;
        for i in 0..=s {
            if let Some(&j) = baby.get(&gamma) {
                return Some((i * s + j) % ord);
            }
            gamma = self.mul(gamma, giant);
        }
        None
    }

    /// A square root, if `a` is a square. Characteristic 2 always succeeds.
    pub fn sqrt(&self, a: Fe) -> Option<Fe> {
        if a.is_zero() {
            return Some(a);
        }
        let big = self.order as u128;
        if self.p == 2 {
            return Some(self.pow(a, big / 2));
        }
        let n1 = big - 1;
        if self.pow(a, n1 / 2) != Fe::ONE {
            return None;
        }
        if big % 4 == 3 {
            return Some(self.pow(a, (big + 1) / 4));
        }
        // Tonelli-Shanks
        let s = n1.trailing_zeros();
        let odd = n1 >> s;
        let minus_one = self.neg(Fe::ONE);
        let z = self
            .nonzero_elements()
            .find(|&z| self.pow(z, n1 / 2) == minus_one)
            .expect("odd-order field has a non-residue");
        let mut m = s;
        let mut c = self.pow(z, odd);
        let mut t = self.pow(a, odd);
        let mut r = self.pow(a, odd.div_ceil(2));
        while t != Fe::ONE {
            let mut i = 0;
            let mut t2 = t;
            while t2 != Fe::ONE {
                t2 = self.mul(t2, t2);
                i += 1;
            }
            let b = self.pow(c, 1u128 << (m - i - 1));
            m = i;
            c = self.mul(b, b);
            t = self.mul(t, c);
            r = self.mul(r, b);
        }
        Some(r)
    }

    /// Roots of `X^2 + b X + c` in F_(q^n), if it splits.
    pub fn solve_quadratic(&self, b: Fe, c: Fe) -> Option<(Fe, Fe)> {
        if self.p != 2 {
            let disc = self.sub(self.mul(b, b), self.mul(self.from_int(4), c));
            let r = self.sqrt(disc)?;
            let half = self.inv(self.from_int(2));
            let nb = self.neg(b);
            return Some((self.mul(self.add(nb, r), half), self.mul(self.sub(nb, r), half)));
        }
        if b.is_zero() {
            let r = self.sqrt(c)?;
            return Some((r, r));
        }
        // X = b Y turns the equation into Y^2 + Y = c / b^2
        let delta = self.div(c, self.mul(b, b));
        if !self.abs_trace(delta).is_zero() {
            return None;
        }
        let tau = self
            .nonzero_elements()
            .find(|&x| self.abs_trace(x) == Fe::ONE)
            .expect("trace is onto");
        let mut y = Fe::ZERO;
        let mut partial = Fe::ZERO;
        for i in 1..self.m {
            partial = self.add(partial, self.frob_p(tau, i - 1));
            y = self.add(y, self.mul(partial, self.frob_p(delta, i)));
        }
        let r1 = self.mul(b, y);
        Some((r1, self.add(r1, b)))
    }

    /// Total order on elements: `g^0 < g^1 < ... < g^(q^n-2) < 0`.
    pub fn gk_key(&self, x: Fe) -> u64 {
        self.dlog(x).unwrap_or(self.order - 1)
    }

    // ---- text formats ----

    /// `"g^k"`, or `"0"`.
    pub fn format_gk(&self, x: Fe) -> String {
        match self.dlog(x) {
            None => "0".to_string(),
            Some(k) => format!("g^{k}"),
        }
    }

    pub fn to_json_digits(&self, x: Fe) -> Value {
        Value::from(self.digits(x))
    }

    pub fn element_json(&self, x: Fe, fmt: ElementFormat) -> Value {
        match fmt {
            ElementFormat::Digits => self.to_json_digits(x),
            ElementFormat::Gk => Value::from(self.format_gk(x)),
        }
    }

    /// F_p-matrix (on power-basis digits) of an F_p-linear map given by its values on `x^j`.
    pub fn fp_matrix_of(&self, images: impl Fn(Fe) -> Fe) -> FpMatrix {
        let cols: Vec<Vec<u64>> =
            (0..self.m).map(|j| self.digits(images(Fe(self.pow_p[j])))).collect();
        FpMatrix::from_columns(self.m, self.p, &cols)
    }

    /// Applies an F_p-matrix built by [`Self::fp_matrix_of`].
    pub fn apply_fp_matrix(&self, mat: &FpMatrix, x: Fe) -> Fe {
        let mut d = [0u64; MAX_DEGREE];
        self.digits_into(x, &mut d);
        let p = self.p;
        let mut out = 0u64;
        for i in 0..self.m {
            let mut acc = 0u64;
            for (j, &dj) in d.iter().enumerate().take(self.m) {
                if dj != 0 {
                    acc = (acc + mat.get(i, j) * dj) % p;
                }
            }
            out += acc * self.pow_p[i];
        }
        Fe(out)
    }

    /// Unit vectors of the power basis over F_p: `x^j` for `j < e n`.
    pub fn fp_basis(&self) -> Vec<Fe> {
        self.pow_p[..self.m].iter().map(|&w| Fe(w)).collect()
    }

    /// Accepts a digit array, `"g^k"`, `"g"`, `"0"`, `"1"`, or an integer (prime-field constant).
    pub fn parse_element(&self, v: &Value) -> Result<Fe> {
        match v {
            Value::Array(items) => {
                let digits = items
                    .iter()
                    .map(|d| d.as_u64().ok_or_else(|| Error::Parse(format!("bad digit {d}"))))
                    .collect::<Result<Vec<_>>>()?;
                self.from_digits(&digits)
            }
            Value::String(s) => self.parse_gk(s),
            Value::Number(num) => num
                .as_i64()
                .map(|c| self.from_int(c))
                .ok_or_else(|| Error::Parse(format!("bad integer {num}"))),
            other => Err(Error::Parse(format!("cannot parse field element from {other}"))),
        }
    }

    pub fn parse_gk(&self, s: &str) -> Result<Fe> {
        let s = s.trim();
        match s {
            "0" => Ok(Fe::ZERO),
            "1" => Ok(Fe::ONE),
            "g" => Ok(self.generator),
            _ => {
                let k = s
                    .strip_prefix("g^")
                    .and_then(|k| k.trim().parse::<u64>().ok())
                    .ok_or_else(|| Error::Parse(format!("expected \"g^k\", got {s:?}")))?;
                Ok(self.gpow(k))
            }
        }
    }
}

fn crt(a: (u128, u128), b: (u128, u128)) -> (u128, u128) {
    let (r1, m1) = a;
    let (r2, m2) = b;
    // m1, m2 coprime; find r = r1 + m1 * k with r = r2 mod m2
    let m1_mod = (m1 % m2) as u64;
    let inv = if m2 == 1 { 0 } else { modinv_u64(m1_mod, m2 as u64) as u128 };
    let diff = (r2 + m2 - r1 % m2) % m2;
    let k = diff * inv % m2;
    (r1 + m1 * k, m1 * m2)
}

fn modinv_u64(a: u64, m: u64) -> u64 {
    // extended Euclid; m need not be prime
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    old_s.rem_euclid(m as i128) as u64
}

/// The `seed`-th monic irreducible of degree `m`, enumerating the lower
/// coefficients `(c_0, ..., c_(m-1))` as base-p integers in increasing order.
fn find_irreducible(p: u64, m: usize, seed: u64) -> Vec<u64> {
    let mut found = 0;
    let mut k = 0u64;
    loop {
        let mut f: Vec<u64> = Vec::with_capacity(m + 1);
        let mut v = k;
        for _ in 0..m {
            f.push(v % p);
            v /= p;
        }
        f.push(1);
        if fpoly::is_irreducible(&f, p) {
            if found == seed {
                return f;
            }
            found += 1;
        }
        k += 1;
    }
}
