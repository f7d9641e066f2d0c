//! Multivariate Laurent polynomials with arbitrary-precision integer
//! coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exponent vector.
pub type Exp = Vec<i32>;

/// Laurent polynomial `Σ c_e x^e` in a fixed number of variables.
///
/// Terms are kept in a `BTreeMap`, so iteration is in lexicographic order of
/// exponent vectors and the last entry is the lex-leading term.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exp, BigInt>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigInt::one())
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, BigInt::one())
    }

    pub fn monomial(exp: Exp, c: BigInt) -> Self {
        let mut p = Self::zero(exp.len());
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exp, BigInt)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            debug_assert_eq!(e.len(), nvars);
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exp, &BigInt)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Exp, BigInt)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, e: &[i32]) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, e: Exp, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_monomial(&self) -> Option<(&Exp, &BigInt)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Lex-leading term.
    pub fn leading(&self) -> Option<(&Exp, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// Lex-trailing term.
    pub fn trailing(&self) -> Option<(&Exp, &BigInt)> {
        self.terms.iter().next()
    }

    /// True iff all coefficients are positive.
    pub fn all_positive(&self) -> bool {
        self.terms.values().all(|c| c.is_positive())
    }

    /// True iff every exponent is non-negative.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x >= 0))
    }

    /// Componentwise minimum exponents (zero vector for the zero polynomial).
    pub fn min_exps(&self) -> Exp {
        let mut m: Option<Exp> = None;
        for e in self.terms.keys() {
            match &mut m {
                None => m = Some(e.clone()),
                Some(m) => m.iter_mut().zip(e).for_each(|(a, &b)| *a = (*a).min(b)),
            }
        }
        m.unwrap_or_else(|| vec![0; self.nvars])
    }

    pub fn max_exps(&self) -> Exp {
        let mut m: Option<Exp> = None;
        for e in self.terms.keys() {
            match &mut m {
                None => m = Some(e.clone()),
                Some(m) => m.iter_mut().zip(e).for_each(|(a, &b)| *a = (*a).max(b)),
            }
        }
        m.unwrap_or_else(|| vec![0; self.nvars])
    }

    /// Multiply by the monomial x^e.
    pub fn shift(&self, e: &[i32]) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, c)| (k.iter().zip(e).map(|(a, b)| a + b).collect(), c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect() }
    }

    /// Exact division of all coefficients by an integer.
    pub fn div_integer(&self, c: &BigInt) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(k, v)| (k.clone(), v / c)).collect() }
    }

    /// Positive gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn pow(&self, n: u32) -> Poly {
        if n == 0 {
            return Poly::one(self.nvars);
        }
        if let Some((e, c)) = self.as_monomial() {
            return Poly::monomial(e.iter().map(|x| x * n as i32).collect(), c.pow(n));
        }
        let mut result = Poly::one(self.nvars);
        let mut base = self.clone();
        let mut k = n;
        loop {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = &base * &base;
        }
        result
    }

    /// Power with possibly negative exponent; only defined for monomials
    /// with unit coefficient when `n < 0`.
    pub fn powi(&self, n: i32) -> Option<Poly> {
        if n >= 0 {
            return Some(self.pow(n as u32));
        }
        let (e, c) = self.as_monomial()?;
        if !c.abs().is_one() {
            return None;
        }
        let sign = if c.is_negative() && n % 2 != 0 { -BigInt::one() } else { BigInt::one() };
        Some(Poly::monomial(e.iter().map(|x| x * n).collect(), sign))
    }

    /// Exact division in the Laurent polynomial ring, or `None` if `other`
    /// does not divide `self`.
    ///
    /// Lex-leading-term division; candidate quotient exponents are confined
    /// to the box allowed by Newton polytopes, which guarantees termination.
    pub fn div_exact(&self, other: &Poly) -> Option<Poly> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero(self.nvars));
        }
        if let Some((e, c)) = other.as_monomial() {
            let neg: Exp = e.iter().map(|x| -x).collect();
            let mut out = Poly::zero(self.nvars);
            for (k, v) in &self.terms {
                let (q, r) = v.div_rem(c);
                if !r.is_zero() {
                    return None;
                }
                out.terms.insert(k.iter().zip(&neg).map(|(a, b)| a + b).collect(), q);
            }
            return Some(out);
        }
        let (amin, amax) = (self.min_exps(), self.max_exps());
        let (bmin, bmax) = (other.min_exps(), other.max_exps());
        let lo: Exp = amin.iter().zip(&bmin).map(|(a, b)| a - b).collect();
        let hi: Exp = amax.iter().zip(&bmax).map(|(a, b)| a - b).collect();
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return None;
        }
        let (lb_exp, lb_c) = other.leading().map(|(e, c)| (e.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((le, lc)) = rem.leading() {
            let qe: Exp = le.iter().zip(&lb_exp).map(|(a, b)| a - b).collect();
            if qe.iter().zip(lo.iter().zip(&hi)).any(|(x, (l, h))| x < l || x > h) {
                return None;
            }
            let (qc, r) = lc.div_rem(&lb_c);
            if !r.is_zero() {
                return None;
            }
            for (be, bc) in &other.terms {
                let e: Exp = be.iter().zip(&qe).map(|(a, b)| a + b).collect();
                rem.add_term(e, -(bc * &qc));
            }
            quot.terms.insert(qe, qc);
        }
        Some(quot)
    }

    /// `x_v ∂/∂x_v`, the logarithmic derivative operator.
    pub fn euler_derivative(&self, v: usize) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e[v] != 0)
                .map(|(e, c)| (e.clone(), c * BigInt::from(e[v])))
                .collect(),
        }
    }

    /// Degree in variable `v` (maximum exponent).
    pub fn degree_in(&self, v: usize) -> i32 {
        self.terms.keys().map(|e| e[v]).max().unwrap_or(0)
    }

    pub fn involves(&self, v: usize) -> bool {
        self.terms.keys().any(|e| e[v] != 0)
    }

    /// Coefficients with respect to `v`: map degree → coefficient (free of v).
    pub fn split_by(&self, v: usize) -> BTreeMap<i32, Poly> {
        let mut out: BTreeMap<i32, Poly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let d = std::mem::replace(&mut e2[v], 0);
            out.entry(d).or_insert_with(|| Poly::zero(self.nvars)).terms.insert(e2, c.clone());
        }
        out
    }

    /// Rename/embed variables: variable `i` becomes variable `map[i]` in a
    /// ring with `nvars` variables.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> Poly {
        let mut out = Poly::zero(nvars);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; nvars];
            for (i, &x) in e.iter().enumerate() {
                e2[map[i]] += x;
            }
            out.add_term(e2, c.clone());
        }
        out
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * e.iter().zip(x).map(|(&k, &v)| v.powi(k)).product::<f64>())
            .sum()
    }

    pub fn eval_c64(&self, x: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * e.iter().zip(x).map(|(&k, v)| v.powi(k)).product::<Complex64>())
            .sum()
    }

    pub fn eval_rational(&self, x: &[BigRational]) -> BigRational {
        let mut s = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = BigRational::from_integer(c.clone());
            for (&k, v) in e.iter().zip(x) {
                if k != 0 {
                    t *= num_traits::pow::Pow::pow(v, k);
                }
            }
            s += t;
        }
        s
    }

    /// Human-readable form with the given variable names.
    pub fn display(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono = monomial_string(e, names);
            let neg = c.is_negative();
            let a = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { "-" } else { "+" });
            }
            if mono.is_empty() {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{a}*{mono}"));
            }
        }
        out
    }
}

pub(crate) fn monomial_string(e: &[i32], names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &k) in e.iter().enumerate() {
        match k {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], k)),
        }
    }
    parts.join("*")
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.display(&names))
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (big, small) = if self.len() >= rhs.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (e, c) in &small.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect() }
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(self.nvars);
        }
        let mut acc: std::collections::HashMap<Exp, BigInt> = std::collections::HashMap::with_capacity(self.len() * rhs.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exp = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_default() += ca * cb;
            }
        }
        Poly { nvars: self.nvars, terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}
