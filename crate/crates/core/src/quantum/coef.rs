//! Coefficients of quantum tori: reduced rational functions of the formal
//! variable t = q^{1/L}.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::symbolic::{Poly, RatFun};

/// A reduced fraction of integer Laurent polynomials in t = q^{1/L}.
///
/// The root order L is carried by the torus, not by the coefficient; all
/// coefficients of one torus share it.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QCoef(RatFun);

impl QCoef {
    pub fn zero() -> Self {
        QCoef(RatFun::zero(1))
    }

    pub fn one() -> Self {
        QCoef(RatFun::one(1))
    }

    pub fn int(c: i64) -> Self {
        QCoef(RatFun::constant(1, BigInt::from(c)))
    }

    /// t^e.
    pub fn t_pow(e: i64) -> Self {
        QCoef(RatFun::monomial(vec![e as i32]))
    }

    /// t^a − t^{−a}.
    pub fn t_minus_inv(a: i64) -> Self {
        &Self::t_pow(a) - &Self::t_pow(-a)
    }

    pub fn from_ratfun(r: RatFun) -> Self {
        assert_eq!(r.nvars(), 1, "coefficients are univariate");
        QCoef(r)
    }

    pub fn as_ratfun(&self) -> &RatFun {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn recip(&self) -> Result<Self> {
        Ok(QCoef(self.0.recip()?))
    }

    /// Bar involution t ↦ t^{−1} (the action of ∗ on scalars).
    pub fn bar(&self) -> Self {
        let inv = RatFun::monomial(vec![-1]);
        QCoef(self.0.substitute(&[inv]).expect("t^{-1} is invertible"))
    }

    /// Value at t = 1, when defined.
    pub fn at_one(&self) -> Result<BigRational> {
        self.0.eval_rational(&[BigRational::one()])
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        self.0.eval_c64(&[t])
    }

    /// If this is ±t^e, return (sign, e).
    pub fn as_signed_power(&self) -> Option<(i64, i64)> {
        if !self.0.den().is_one() {
            return None;
        }
        let (e, c) = self.0.num().as_monomial()?;
        if c.is_one() {
            Some((1, e[0] as i64))
        } else if (-c).is_one() {
            Some((-1, e[0] as i64))
        } else {
            None
        }
    }

    /// Display with `q` when L = 1 and `t` (= q^{1/L}) otherwise.
    pub fn display(&self, root: i64) -> String {
        let name = if root == 1 { "q".to_string() } else { "t".to_string() };
        self.0.display(&[name])
    }
}

impl fmt::Debug for QCoef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(0))
    }
}

impl Add for &QCoef {
    type Output = QCoef;
    fn add(self, rhs: &QCoef) -> QCoef {
        QCoef(&self.0 + &rhs.0)
    }
}

impl Sub for &QCoef {
    type Output = QCoef;
    fn sub(self, rhs: &QCoef) -> QCoef {
        QCoef(&self.0 - &rhs.0)
    }
}

impl Mul for &QCoef {
    type Output = QCoef;
    fn mul(self, rhs: &QCoef) -> QCoef {
        QCoef(&self.0 * &rhs.0)
    }
}

impl Neg for &QCoef {
    type Output = QCoef;
    fn neg(self) -> QCoef {
        QCoef(-&self.0)
    }
}

impl Zero for QCoef {
    fn zero() -> Self {
        QCoef::zero()
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl Add for QCoef {
    type Output = QCoef;
    fn add(self, rhs: QCoef) -> QCoef {
        &self + &rhs
    }
}

/// Polynomial in t from (exponent, coefficient) pairs.
pub fn t_poly(terms: &[(i64, i64)]) -> QCoef {
    QCoef(RatFun::from_poly(Poly::from_terms(1, terms.iter().map(|&(e, c)| (vec![e as i32], BigInt::from(c))))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bar_is_an_involution() {
        let a = (&t_poly(&[(3, 2), (-1, 1)]) * &QCoef::t_minus_inv(2).recip().unwrap()).clone();
        assert_eq!(a.bar().bar(), a);
        assert_ne!(a.bar(), a);
    }

    #[test]
    fn fractions_reduce() {
        // (t² − t^{−2}) / (t − t^{−1}) = t + t^{−1}
        let r = &QCoef::t_minus_inv(2) * &QCoef::t_minus_inv(1).recip().unwrap();
        assert_eq!(r, t_poly(&[(1, 1), (-1, 1)]));
        assert_eq!(QCoef::t_pow(-3).as_signed_power(), Some((1, -3)));
    }
}
