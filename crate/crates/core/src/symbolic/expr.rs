//! Subtraction-free expression DAGs.
//!
//! Nodes are shared through `Arc`, so composing substitutions is cheap and
//! evaluation memoises on node identity.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::poly::Poly;
use super::ratfun::RatFun;
use super::semifield::{RationalFunctions, Semifield};
use crate::error::{Error, Result};

#[derive(Debug)]
pub enum Node {
    Gen(usize),
    /// Positive integer constant.
    Const(BigInt),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Div(Expr, Expr),
    Pow(Expr, i32),
}

/// A node in a subtraction-free expression DAG.
#[derive(Clone, Debug)]
pub struct Expr(Arc<Node>);

impl Expr {
    pub fn gen(i: usize) -> Expr {
        Expr(Arc::new(Node::Gen(i)))
    }

    pub fn constant(c: u64) -> Expr {
        assert!(c > 0, "constants in subtraction-free expressions are positive");
        Expr(Arc::new(Node::Const(BigInt::from(c))))
    }

    pub fn one() -> Expr {
        Self::constant(1)
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        matches!(&*self.0, Node::Const(c) if c.is_one())
    }

    pub fn add(terms: Vec<Expr>) -> Expr {
        match terms.len() {
            0 => panic!("empty sum"),
            1 => terms.into_iter().next().unwrap(),
            _ => Expr(Arc::new(Node::Add(terms))),
        }
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        let factors: Vec<Expr> = factors.into_iter().filter(|f| !f.is_one()).collect();
        match factors.len() {
            0 => Expr::one(),
            1 => factors.into_iter().next().unwrap(),
            _ => Expr(Arc::new(Node::Mul(factors))),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        if b.is_one() {
            a
        } else {
            Expr(Arc::new(Node::Div(a, b)))
        }
    }

    pub fn pow(a: Expr, k: i32) -> Expr {
        match k {
            0 => Expr::one(),
            1 => a,
            _ if a.is_one() => a,
            _ => Expr(Arc::new(Node::Pow(a, k))),
        }
    }

    /// Monomial Π x_i^{e_i}.
    pub fn monomial(e: &[i32]) -> Expr {
        let (pos, neg): (Vec<_>, Vec<_>) = e.iter().enumerate().filter(|(_, &k)| k != 0).partition(|(_, &k)| k > 0);
        let num = Expr::mul(pos.into_iter().map(|(i, &k)| Expr::pow(Expr::gen(i), k)).collect());
        let den = Expr::mul(neg.into_iter().map(|(i, &k)| Expr::pow(Expr::gen(i), -k)).collect());
        Expr::div(num, den)
    }

    /// Convert a polynomial with positive coefficients.
    pub fn from_poly(p: &Poly) -> Result<Expr> {
        if p.is_zero() || !p.all_positive() {
            return Err(Error::Subtraction);
        }
        let terms = p
            .terms()
            .map(|(e, c)| {
                let m = Expr::monomial(e);
                if c.is_one() {
                    m
                } else {
                    Expr::mul(vec![Expr(Arc::new(Node::Const(c.clone()))), m])
                }
            })
            .collect();
        Ok(Expr::add(terms))
    }

    /// Convert a reduced rational function whose numerator and denominator
    /// both have positive coefficients.
    pub fn from_ratfun(r: &RatFun) -> Result<Expr> {
        Ok(Expr::div(Expr::from_poly(r.num())?, Expr::from_poly(r.den())?))
    }

    /// Homomorphic evaluation in a semifield.
    pub fn eval<S: Semifield>(&self, s: &S, point: &[S::Elem]) -> S::Elem {
        let mut memo = HashMap::new();
        self.eval_memo(s, point, &mut memo)
    }

    pub fn eval_memo<S: Semifield>(&self, s: &S, point: &[S::Elem], memo: &mut HashMap<*const Node, S::Elem>) -> S::Elem {
        let key = Arc::as_ptr(&self.0);
        if let Some(v) = memo.get(&key) {
            return v.clone();
        }
        let v = match &*self.0 {
            Node::Gen(i) => point[*i].clone(),
            Node::Const(c) => s.constant(c),
            Node::Add(ts) => {
                let mut acc = ts[0].eval_memo(s, point, memo);
                for t in &ts[1..] {
                    acc = s.add(&acc, &t.eval_memo(s, point, memo));
                }
                acc
            }
            Node::Mul(ts) => {
                let mut acc = ts[0].eval_memo(s, point, memo);
                for t in &ts[1..] {
                    acc = s.mul(&acc, &t.eval_memo(s, point, memo));
                }
                acc
            }
            Node::Div(a, b) => {
                let x = a.eval_memo(s, point, memo);
                let y = b.eval_memo(s, point, memo);
                s.div(&x, &y)
            }
            Node::Pow(a, k) => {
                let x = a.eval_memo(s, point, memo);
                s.pow(&x, *k)
            }
        };
        memo.insert(key, v.clone());
        v
    }

    /// Exact rational function represented by the DAG.
    pub fn to_ratfun(&self, nvars: usize) -> RatFun {
        let point: Vec<RatFun> = (0..nvars).map(|i| RatFun::var(nvars, i)).collect();
        self.eval(&RationalFunctions { nvars }, &point)
    }

    /// Replace every generator `i` by `images[i]`, sharing subgraphs.
    pub fn substitute(&self, images: &[Expr]) -> Expr {
        let mut memo: HashMap<*const Node, Expr> = HashMap::new();
        self.subst_memo(images, &mut memo)
    }

    fn subst_memo(&self, images: &[Expr], memo: &mut HashMap<*const Node, Expr>) -> Expr {
        let key = Arc::as_ptr(&self.0);
        if let Some(v) = memo.get(&key) {
            return v.clone();
        }
        let v = match &*self.0 {
            Node::Gen(i) => images[*i].clone(),
            Node::Const(_) => self.clone(),
            Node::Add(ts) => Expr::add(ts.iter().map(|t| t.subst_memo(images, memo)).collect()),
            Node::Mul(ts) => Expr::mul(ts.iter().map(|t| t.subst_memo(images, memo)).collect()),
            Node::Div(a, b) => Expr::div(a.subst_memo(images, memo), b.subst_memo(images, memo)),
            Node::Pow(a, k) => Expr::pow(a.subst_memo(images, memo), *k),
        };
        memo.insert(key, v.clone());
        v
    }

    /// Number of distinct nodes.
    pub fn size(&self) -> usize {
        fn walk(e: &Expr, seen: &mut std::collections::HashSet<*const Node>) {
            if !seen.insert(Arc::as_ptr(&e.0)) {
                return;
            }
            match &*e.0 {
                Node::Gen(_) | Node::Const(_) => {}
                Node::Add(ts) | Node::Mul(ts) => ts.iter().for_each(|t| walk(t, seen)),
                Node::Div(a, b) => {
                    walk(a, seen);
                    walk(b, seen);
                }
                Node::Pow(a, _) => walk(a, seen),
            }
        }
        let mut seen = std::collections::HashSet::new();
        walk(self, &mut seen);
        seen.len()
    }

    pub fn display(&self, names: &[String]) -> String {
        fn prec(n: &Node) -> u8 {
            match n {
                Node::Add(_) => 1,
                Node::Mul(_) | Node::Div(..) => 2,
                Node::Pow(..) => 3,
                Node::Gen(_) | Node::Const(_) => 4,
            }
        }
        fn go(e: &Expr, names: &[String], out: &mut String) {
            let wrap = |x: &Expr, min: u8, out: &mut String| {
                if prec(&x.0) < min {
                    out.push('(');
                    go(x, names, out);
                    out.push(')');
                } else {
                    go(x, names, out);
                }
            };
            match &*e.0 {
                Node::Gen(i) => out.push_str(&names[*i]),
                Node::Const(c) => out.push_str(&c.to_string()),
                Node::Add(ts) => {
                    for (k, t) in ts.iter().enumerate() {
                        if k > 0 {
                            out.push('+');
                        }
                        go(t, names, out);
                    }
                }
                Node::Mul(ts) => {
                    for (k, t) in ts.iter().enumerate() {
                        if k > 0 {
                            out.push('*');
                        }
                        wrap(t, 2, out);
                    }
                }
                Node::Div(a, b) => {
                    wrap(a, 2, out);
                    out.push('/');
                    wrap(b, 3, out);
                }
                Node::Pow(a, k) => {
                    wrap(a, 4, out);
                    if k.is_negative() {
                        out.push_str(&format!("^({k})"));
                    } else {
                        out.push_str(&format!("^{k}"));
                    }
                }
            }
        }
        let mut s = String::new();
        go(self, names, &mut s);
        s
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names = Vec::new();
        let mut max = 0;
        fn scan(e: &Expr, max: &mut usize) {
            match e.node() {
                Node::Gen(i) => *max = (*max).max(*i + 1),
                Node::Const(_) => {}
                Node::Add(ts) | Node::Mul(ts) => ts.iter().for_each(|t| scan(t, max)),
                Node::Div(a, b) => {
                    scan(a, max);
                    scan(b, max);
                }
                Node::Pow(a, _) => scan(a, max),
            }
        }
        scan(self, &mut max);
        for i in 1..=max {
            names.push(format!("x{i}"));
        }
        write!(f, "{}", self.display(&names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::semifield::{PositiveRationals, PositiveReals, TropicalInt};
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn x2_times_one_plus_x1() -> Expr {
        Expr::mul(vec![Expr::gen(1), Expr::add(vec![Expr::one(), Expr::gen(0)])])
    }

    #[test]
    fn tropical_example() {
        assert_eq!(x2_times_one_plus_x1().eval(&TropicalInt, &[2, 3]), 5);
    }

    #[test]
    fn tropical_monomial_is_linear() {
        let m = Expr::monomial(&[2, -3, 1]);
        assert_eq!(m.eval(&TropicalInt, &[5, 7, -1]), 2 * 5 - 3 * 7 - 1);
    }

    #[test]
    fn display_factored() {
        let names = vec!["X1".to_string(), "X2".to_string()];
        assert_eq!(x2_times_one_plus_x1().display(&names), "X2*(1+X1)");
    }

    #[test]
    fn negative_polynomial_rejected() {
        let p = &Poly::one(1) - &Poly::var(1, 0);
        assert!(matches!(Expr::from_poly(&p), Err(Error::Subtraction)));
    }

    proptest! {
        #[test]
        fn real_and_exact_evaluations_agree(a in 1i64..50, b in 1i64..50, c in 1i64..9) {
            // ((1 + x1)^2 + x0 x1) / (x0 + 3)
            let e = Expr::div(
                Expr::add(vec![Expr::pow(Expr::add(vec![Expr::one(), Expr::gen(1)]), 2), Expr::mul(vec![Expr::gen(0), Expr::gen(1)])]),
                Expr::add(vec![Expr::gen(0), Expr::constant(3)]),
            );
            let q = [BigRational::new(a.into(), c.into()), BigRational::new(b.into(), 3.into())];
            let exact = e.eval(&PositiveRationals, &q);
            let f = [a as f64 / c as f64, b as f64 / 3.0];
            let real = e.eval(&PositiveReals, &f);
            use num_traits::ToPrimitive;
            prop_assert!((exact.to_f64().unwrap() - real).abs() < 1e-12 * real.abs());
            let r = e.to_ratfun(2);
            prop_assert!((r.eval_f64(&f) - real).abs() < 1e-12 * real.abs());
        }
    }
}
