//! Semifields used to evaluate subtraction-free expressions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::ratfun::RatFun;

/// A semifield evaluation context: carrier `Elem` with ⊕, ⊗, ⊘ and positive
/// integer constants.
pub trait Semifield {
    type Elem: Clone;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Image of a positive integer constant.
    fn constant(&self, c: &BigInt) -> Self::Elem;
    fn one(&self) -> Self::Elem {
        self.constant(&BigInt::one())
    }
    fn pow(&self, a: &Self::Elem, k: i32) -> Self::Elem {
        let mut acc = self.one();
        for _ in 0..k.unsigned_abs() {
            acc = self.mul(&acc, a);
        }
        if k < 0 {
            self.div(&self.one(), &acc)
        } else {
            acc
        }
    }
}

/// ℚ_{>0} with ordinary operations.
#[derive(Clone, Copy, Debug, Default)]
pub struct PositiveRationals;

impl Semifield for PositiveRationals {
    type Elem = BigRational;
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn div(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a / b
    }
    fn constant(&self, c: &BigInt) -> BigRational {
        BigRational::from_integer(c.clone())
    }
    fn pow(&self, a: &BigRational, k: i32) -> BigRational {
        num_traits::pow::Pow::pow(a, k)
    }
}

/// ℝ_{>0} in floating point.
#[derive(Clone, Copy, Debug, Default)]
pub struct PositiveReals;

impl Semifield for PositiveReals {
    type Elem = f64;
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn div(&self, a: &f64, b: &f64) -> f64 {
        a / b
    }
    fn constant(&self, c: &BigInt) -> f64 {
        c.to_f64().unwrap_or(f64::INFINITY)
    }
    fn pow(&self, a: &f64, k: i32) -> f64 {
        a.powi(k)
    }
}

/// Max-plus tropical integers: a ⊕ b = max, a ⊗ b = a + b, unit 0.
#[derive(Clone, Copy, Debug, Default)]
pub struct TropicalInt;

impl Semifield for TropicalInt {
    type Elem = i64;
    fn add(&self, a: &i64, b: &i64) -> i64 {
        *a.max(b)
    }
    fn mul(&self, a: &i64, b: &i64) -> i64 {
        a + b
    }
    fn div(&self, a: &i64, b: &i64) -> i64 {
        a - b
    }
    fn constant(&self, _: &BigInt) -> i64 {
        0
    }
    fn pow(&self, a: &i64, k: i32) -> i64 {
        a * k as i64
    }
}

/// Max-plus tropical reals.
#[derive(Clone, Copy, Debug, Default)]
pub struct TropicalReal;

impl Semifield for TropicalReal {
    type Elem = f64;
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a.max(*b)
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn div(&self, a: &f64, b: &f64) -> f64 {
        a - b
    }
    fn constant(&self, _: &BigInt) -> f64 {
        0.0
    }
    fn pow(&self, a: &f64, k: i32) -> f64 {
        a * k as f64
    }
}

/// Rational functions in `nvars` variables (a field, used as the universal
/// target for converting expression DAGs).
#[derive(Clone, Copy, Debug)]
pub struct RationalFunctions {
    pub nvars: usize,
}

impl Semifield for RationalFunctions {
    type Elem = RatFun;
    fn add(&self, a: &RatFun, b: &RatFun) -> RatFun {
        a + b
    }
    fn mul(&self, a: &RatFun, b: &RatFun) -> RatFun {
        a * b
    }
    fn div(&self, a: &RatFun, b: &RatFun) -> RatFun {
        (a / b).expect("subtraction-free expressions never vanish")
    }
    fn constant(&self, c: &BigInt) -> RatFun {
        RatFun::constant(self.nvars, c.clone())
    }
    fn pow(&self, a: &RatFun, k: i32) -> RatFun {
        a.powi(k).expect("subtraction-free expressions never vanish")
    }
}

/// Check the semifield axioms on a triple; returns the names of violated
/// axioms (empty when all hold up to `eq`).
pub fn axiom_violations<S: Semifield>(
    s: &S,
    a: &S::Elem,
    b: &S::Elem,
    c: &S::Elem,
    eq: impl Fn(&S::Elem, &S::Elem) -> bool,
) -> Vec<&'static str> {
    let mut bad = Vec::new();
    if !eq(&s.add(&s.add(a, b), c), &s.add(a, &s.add(b, c))) {
        bad.push("add associative");
    }
    if !eq(&s.add(a, b), &s.add(b, a)) {
        bad.push("add commutative");
    }
    if !eq(&s.mul(&s.mul(a, b), c), &s.mul(a, &s.mul(b, c))) {
        bad.push("mul associative");
    }
    if !eq(&s.mul(a, b), &s.mul(b, a)) {
        bad.push("mul commutative");
    }
    if !eq(&s.mul(a, &s.add(b, c)), &s.add(&s.mul(a, b), &s.mul(a, c))) {
        bad.push("distributive");
    }
    if !eq(&s.mul(&s.div(a, b), b), a) {
        bad.push("division");
    }
    if !eq(&s.mul(a, &s.one()), a) {
        bad.push("unit");
    }
    bad
}

#[cfg(test)]
fn is_zero_rational(x: &BigRational) -> bool {
    num_traits::Zero::is_zero(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn tropical_int_axioms(a in -1000i64..1000, b in -1000i64..1000, c in -1000i64..1000) {
            prop_assert!(axiom_violations(&TropicalInt, &a, &b, &c, |x, y| x == y).is_empty());
        }

        #[test]
        fn tropical_real_axioms(a in -100.0f64..100.0, b in -100.0f64..100.0, c in -100.0f64..100.0) {
            prop_assert!(axiom_violations(&TropicalReal, &a, &b, &c, |x, y| (x - y).abs() < 1e-9).is_empty());
        }

        #[test]
        fn positive_real_axioms(a in 0.01f64..100.0, b in 0.01f64..100.0, c in 0.01f64..100.0) {
            prop_assert!(axiom_violations(&PositiveReals, &a, &b, &c, |x, y| (x - y).abs() <= 1e-12 * x.abs().max(1.0)).is_empty());
        }

        #[test]
        fn positive_rational_axioms(a in 1i64..500, b in 1i64..500, c in 1i64..500, d in 1i64..50) {
            let (a, b, c) = (BigRational::new(a.into(), d.into()), BigRational::new(b.into(), 7.into()), BigRational::from_integer(c.into()));
            prop_assert!(axiom_violations(&PositiveRationals, &a, &b, &c, |x, y| is_zero_rational(&(x - y))).is_empty());
        }
    }
}
