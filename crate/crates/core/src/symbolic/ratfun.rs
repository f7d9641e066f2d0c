//! Rational functions in Laurent variables, kept in a canonical reduced form.
//!
//! Normal form: `num / den` where `num` is a Laurent polynomial, `den` is an
//! honest polynomial without monomial factors, `gcd(num, den) = 1`, and the
//! lex-leading coefficient of `den` is positive. Two equal rational functions
//! therefore have identical representations.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::gcd::poly_gcd;
use super::poly::Poly;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    pub fn zero(nvars: usize) -> Self {
        RatFun { num: Poly::zero(nvars), den: Poly::one(nvars) }
    }

    pub fn one(nvars: usize) -> Self {
        RatFun { num: Poly::one(nvars), den: Poly::one(nvars) }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        RatFun { num: Poly::var(nvars, i), den: Poly::one(nvars) }
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        RatFun { num: Poly::constant(nvars, c), den: Poly::one(nvars) }
    }

    pub fn from_poly(p: Poly) -> Self {
        let n = p.nvars();
        RatFun { num: p, den: Poly::one(n) }
    }

    /// Monomial x^e.
    pub fn monomial(e: Vec<i32>) -> Self {
        Self::from_poly(Poly::monomial(e, BigInt::one()))
    }

    /// Build and normalise `num / den`.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalise(num, den))
    }

    fn normalise(mut num: Poly, mut den: Poly) -> Self {
        let n = num.nvars();
        if num.is_zero() {
            return Self::zero(n);
        }
        // monomial part of the denominator moves to the numerator
        let m = den.min_exps();
        if m.iter().any(|&x| x != 0) {
            let neg: Vec<i32> = m.iter().map(|x| -x).collect();
            den = den.shift(&neg);
            num = num.shift(&neg);
        }
        if !den.is_one() {
            if let Some(c) = den.as_constant() {
                let g = num.content().gcd(&c);
                let s = if c.is_negative() { -g } else { g };
                num = num.div_integer(&s);
                den = Poly::constant(n, c / s);
            } else {
                // polynomial part of the numerator for the gcd
                let nm = num.min_exps();
                let negn: Vec<i32> = nm.iter().map(|x| -x).collect();
                let np = num.shift(&negn);
                let g = poly_gcd(&np, &den);
                if !g.is_one() {
                    num = np.div_exact(&g).expect("gcd divides").shift(&nm);
                    den = den.div_exact(&g).expect("gcd divides");
                }
                if den.leading().is_some_and(|(_, c)| c.is_negative()) {
                    num = -&num;
                    den = -&den;
                }
            }
        }
        debug_assert!(den.is_polynomial() && den.min_exps().iter().all(|&x| x == 0), "den {:?}", den);
        RatFun { num, den }
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True iff the denominator is constant (so the function is a Laurent
    /// polynomial with rational coefficients).
    pub fn is_laurent(&self) -> bool {
        self.den.as_constant().is_some()
    }

    /// Laurent polynomial with positive integer coefficients.
    pub fn is_positive_laurent(&self) -> bool {
        self.den.is_one() && !self.num.is_zero() && self.num.all_positive()
    }

    pub fn recip(&self) -> Result<RatFun> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalise(self.den.clone(), self.num.clone()))
    }

    pub fn powi(&self, k: i32) -> Result<RatFun> {
        if k >= 0 {
            Ok(RatFun { num: self.num.pow(k as u32), den: self.den.pow(k as u32) })
        } else {
            let r = self.recip()?;
            Ok(RatFun { num: r.num.pow((-k) as u32), den: r.den.pow((-k) as u32) })
        }
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.num.eval_f64(x) / self.den.eval_f64(x)
    }

    pub fn eval_c64(&self, x: &[Complex64]) -> Complex64 {
        self.num.eval_c64(x) / self.den.eval_c64(x)
    }

    pub fn eval_rational(&self, x: &[BigRational]) -> Result<BigRational> {
        let d = self.den.eval_rational(x);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval_rational(x) / d)
    }

    /// Logarithmic derivative `x_v ∂_v log f`, returned as a rational function.
    pub fn log_derivative(&self, v: usize) -> RatFun {
        // θ(N/D)/(N/D) = θN/N − θD/D
        let n = self.nvars();
        let a = RatFun { num: self.num.euler_derivative(v), den: Poly::one(n) };
        let b = RatFun { num: self.den.euler_derivative(v), den: Poly::one(n) };
        let t1 = RatFun::normalise(a.num, self.num.clone());
        let t2 = RatFun::normalise(b.num, self.den.clone());
        &t1 - &t2
    }

    /// Numeric logarithmic derivative at a point, without building the
    /// symbolic result: (θN)(x)/N(x) − (θD)(x)/D(x).
    pub fn log_derivative_at(&self, v: usize, x: &[f64]) -> f64 {
        self.num.euler_derivative(v).eval_f64(x) / self.num.eval_f64(x)
            - self.den.euler_derivative(v).eval_f64(x) / self.den.eval_f64(x)
    }

    /// Substitute variable i ↦ `images[i]`; all images share an arity.
    pub fn substitute(&self, images: &[RatFun]) -> Result<RatFun> {
        if images.len() != self.nvars() {
            return Err(Error::InvalidParam(format!("expected {} images, got {}", self.nvars(), images.len())));
        }
        let m = images.first().map_or(0, |r| r.nvars());
        let mut powers = PowerCache::new(images);
        let (nn, nf) = substitute_poly(&self.num, images, &mut powers, m);
        let (dn, df) = substitute_poly(&self.den, images, &mut powers, m);
        // f = (nn · F(nf)) / (dn · F(df)), F(e) = Π p_i^{lo_i} q_i^{−hi_i}
        let mut top = nn;
        let mut bottom = dn;
        for i in 0..images.len() {
            let dp = nf.0[i] - df.0[i]; // exponent of p_i
            let dq = df.1[i] - nf.1[i]; // exponent of q_i  (−hi_num + hi_den)
            if dp > 0 {
                top = &top * &powers.p(i, dp as u32);
            } else if dp < 0 {
                bottom = &bottom * &powers.p(i, (-dp) as u32);
            }
            if dq > 0 {
                top = &top * &powers.q(i, dq as u32);
            } else if dq < 0 {
                bottom = &bottom * &powers.q(i, (-dq) as u32);
            }
        }
        RatFun::new(top, bottom)
    }

    pub fn display(&self, names: &[String]) -> String {
        let n = self.num.display(names);
        if self.den.is_one() {
            n
        } else {
            let wrap = |s: String, p: &Poly| if p.len() > 1 { format!("({s})") } else { s };
            format!("{}/{}", wrap(n, &self.num), wrap(self.den.display(names), &self.den))
        }
    }
}

struct PowerCache<'a> {
    images: &'a [RatFun],
    p: Vec<Vec<Poly>>,
    q: Vec<Vec<Poly>>,
}

impl<'a> PowerCache<'a> {
    fn new(images: &'a [RatFun]) -> Self {
        PowerCache { images, p: vec![Vec::new(); images.len()], q: vec![Vec::new(); images.len()] }
    }

    fn get(cache: &mut Vec<Poly>, base: &Poly, k: u32) -> Poly {
        if cache.is_empty() {
            cache.push(Poly::one(base.nvars()));
        }
        while cache.len() <= k as usize {
            let next = cache.last().unwrap() * base;
            cache.push(next);
        }
        cache[k as usize].clone()
    }

    fn p(&mut self, i: usize, k: u32) -> Poly {
        Self::get(&mut self.p[i], &self.images[i].num, k)
    }

    fn q(&mut self, i: usize, k: u32) -> Poly {
        Self::get(&mut self.q[i], &self.images[i].den, k)
    }
}

/// Returns the polynomial Σ c_e Π p_i^{e_i − lo_i} q_i^{hi_i − e_i} and (lo, hi).
fn substitute_poly(f: &Poly, images: &[RatFun], cache: &mut PowerCache<'_>, m: usize) -> (Poly, (Vec<i32>, Vec<i32>)) {
    let lo = f.min_exps();
    let hi = f.max_exps();
    let mut acc = Poly::zero(m);
    for (e, c) in f.terms() {
        let mut t = Poly::constant(m, c.clone());
        for i in 0..images.len() {
            let a = (e[i] - lo[i]) as u32;
            let b = (hi[i] - e[i]) as u32;
            if a > 0 {
                t = &t * &cache.p(i, a);
            }
            if b > 0 && !images[i].den.is_one() {
                t = &t * &cache.q(i, b);
            }
        }
        acc = &acc + &t;
    }
    // q_i = 1 contributes nothing; record hi as 0 there to keep bookkeeping simple
    let hi = hi.iter().zip(images).map(|(&h, r)| if r.den.is_one() { 0 } else { h }).collect();
    (acc, (lo, hi))
}

impl fmt::Debug for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars()).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.display(&names))
    }
}

impl<'a> Add<&'a RatFun> for &'a RatFun {
    type Output = RatFun;
    fn add(self, rhs: &RatFun) -> RatFun {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RatFun::normalise(&self.num + &rhs.num, self.den.clone());
        }
        let g = poly_gcd(&self.den, &rhs.den);
        let a = rhs.den.div_exact(&g).expect("gcd divides");
        let b = self.den.div_exact(&g).expect("gcd divides");
        RatFun::normalise(&(&self.num * &a) + &(&rhs.num * &b), &self.den * &a)
    }
}

impl<'a> Sub<&'a RatFun> for &'a RatFun {
    type Output = RatFun;
    fn sub(self, rhs: &RatFun) -> RatFun {
        self + &(-rhs)
    }
}

impl Neg for &RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun { num: -&self.num, den: self.den.clone() }
    }
}

impl<'a> Mul<&'a RatFun> for &'a RatFun {
    type Output = RatFun;
    fn mul(self, rhs: &RatFun) -> RatFun {
        if self.is_zero() || rhs.is_zero() {
            return RatFun::zero(self.nvars());
        }
        // cross-cancel before multiplying
        let g1 = poly_gcd(&strip(&self.num), &rhs.den);
        let g2 = poly_gcd(&strip(&rhs.num), &self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = rhs.den.div_exact(&g1).expect("gcd divides");
        let n2 = rhs.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        let mut num = &n1 * &n2;
        let mut den = &d1 * &d2;
        if den.leading().is_some_and(|(_, c)| c.is_negative()) {
            num = -&num;
            den = -&den;
        }
        debug_assert!(den.is_polynomial() && den.min_exps().iter().all(|&x| x == 0), "mul den {:?}", den);
        RatFun { num, den }
    }
}

/// Polynomial part of a Laurent polynomial (monomial factor removed).
fn strip(p: &Poly) -> Poly {
    let m: Vec<i32> = p.min_exps().iter().map(|x| -x).collect();
    p.shift(&m)
}

impl<'a> Div<&'a RatFun> for &'a RatFun {
    type Output = Result<RatFun>;
    fn div(self, rhs: &RatFun) -> Result<RatFun> {
        Ok(self * &rhs.recip()?)
    }
}
