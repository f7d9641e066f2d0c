//! Multivariate polynomial gcd over ℤ by recursive primitive remainder
//! sequences.
//!
//! Inputs are polynomials (non-negative exponents). The result is normalised
//! to a positive lex-leading coefficient.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::Poly;

fn normalise_sign(p: Poly) -> Poly {
    match p.leading() {
        Some((_, c)) if c.is_negative() => -&p,
        _ => p,
    }
}

/// gcd of two polynomials with non-negative exponents.
pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    let n = a.nvars();
    if a.is_zero() {
        return normalise_sign(b.clone());
    }
    if b.is_zero() {
        return normalise_sign(a.clone());
    }
    if a == b {
        return normalise_sign(a.clone());
    }
    if let Some(c) = a.as_constant() {
        return Poly::constant(n, c.gcd(&b.content()));
    }
    if let Some(c) = b.as_constant() {
        return Poly::constant(n, c.gcd(&a.content()));
    }
    // monomial factor common to both
    let (amin, bmin) = (a.min_exps(), b.min_exps());
    let common: Vec<i32> = amin.iter().zip(&bmin).map(|(x, y)| (*x).min(*y)).collect();
    if common.iter().any(|&x| x > 0) {
        let neg: Vec<i32> = common.iter().map(|x| -x).collect();
        return poly_gcd(&a.shift(&neg), &b.shift(&neg)).shift(&common);
    }
    // cheap exact-division shortcuts (the quotient must be a polynomial,
    // not merely a Laurent polynomial)
    let divides = |x: &Poly, y: &Poly| y.div_exact(x).is_some_and(|q| q.is_polynomial());
    if a.len() <= b.len() {
        if divides(a, b) {
            return normalise_sign(a.clone());
        }
    } else if divides(b, a) {
        return normalise_sign(b.clone());
    }
    // pick a variable present in both (by smallest combined degree)
    let shared = (0..n)
        .filter(|&v| a.involves(v) && b.involves(v))
        .min_by_key(|&v| a.degree_in(v) + b.degree_in(v));
    let Some(v) = shared else {
        // gcd is free of every variable that appears in only one argument
        let only_a = (0..n).find(|&v| a.involves(v));
        return match only_a {
            Some(v) => poly_gcd(&content_in(a, v), b),
            None => {
                let v = (0..n).find(|&v| b.involves(v)).expect("non-constant polynomial");
                poly_gcd(a, &content_in(b, v))
            }
        };
    };
    let (ca, cb) = (content_in(a, v), content_in(b, v));
    let c = poly_gcd(&ca, &cb);
    let mut p = a.div_exact(&ca).expect("content divides");
    let mut q = b.div_exact(&cb).expect("content divides");
    if p.degree_in(v) < q.degree_in(v) {
        std::mem::swap(&mut p, &mut q);
    }
    while !q.is_zero() {
        if q.degree_in(v) == 0 {
            // q is a nonzero element free of v; primitive parts are coprime
            p = Poly::one(n);
            break;
        }
        let r = pseudo_remainder(&p, &q, v);
        p = q;
        q = if r.is_zero() { r } else { primitive_in(&r, v) };
    }
    let g = primitive_in(&p, v);
    normalise_sign(&c * &g)
}

/// gcd of the coefficients of `p` viewed as a polynomial in `v`.
pub fn content_in(p: &Poly, v: usize) -> Poly {
    let coeffs = p.split_by(v);
    let mut g = Poly::zero(p.nvars());
    for c in coeffs.values() {
        g = poly_gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

pub fn primitive_in(p: &Poly, v: usize) -> Poly {
    let c = content_in(p, v);
    normalise_sign(p.div_exact(&c).expect("content divides"))
}

/// lc(q)^{deg p − deg q + 1} · p  mod  q, with respect to `v`.
fn pseudo_remainder(p: &Poly, q: &Poly, v: usize) -> Poly {
    let dq = q.degree_in(v);
    let lcq = q.split_by(v).remove(&dq).expect("leading coefficient");
    let mut r = p.clone();
    let mut e = p.degree_in(v) - dq + 1;
    let n = p.nvars();
    while !r.is_zero() && r.degree_in(v) >= dq {
        let dr = r.degree_in(v);
        let lcr = r.split_by(v).remove(&dr).expect("leading coefficient");
        let mut shift = vec![0; n];
        shift[v] = dr - dq;
        r = &(&lcq * &r) - &(&lcr * &q.shift(&shift));
        e -= 1;
    }
    if e > 0 {
        r = &lcq.pow(e as u32) * &r;
    }
    r
}

/// Integer gcd helper used by rational-function normalisation.
pub fn int_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let g = a.gcd(b);
    if g.is_zero() { BigInt::one() } else { g }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::var(3, i)
    }

    fn one() -> Poly {
        Poly::one(3)
    }

    #[test]
    fn gcd_recovers_common_factor() {
        let f = &one() + &(&x(0) * &x(1));
        let g = &(&x(0) + &x(2)) + &Poly::constant(3, BigInt::from(2));
        let h = &(&x(1) - &x(2)).pow(2) + &one();
        let a = &f * &g;
        let b = &f * &h;
        assert_eq!(poly_gcd(&a, &b), f);
        assert_eq!(poly_gcd(&g, &h), one());
    }

    #[test]
    fn gcd_with_integer_content() {
        let a = (&one() + &x(0)).scale(&BigInt::from(6));
        let b = (&(&one() + &x(0)) * &x(1)).scale(&BigInt::from(4));
        assert_eq!(poly_gcd(&a, &b), (&one() + &x(0)).scale(&BigInt::from(2)));
    }

    #[test]
    fn monomial_multiple_is_not_a_divisor() {
        // x1(1+x0) divides (1+x0) only in the Laurent ring
        let a = &x(1) * &(&one() + &x(0));
        let b = &one() + &x(0);
        assert_eq!(poly_gcd(&a, &b), b);
        assert_eq!(poly_gcd(&b, &a), b);
    }

    #[test]
    fn gcd_of_powers() {
        let f = &one() + &x(0);
        let a = f.pow(3);
        let b = &f.pow(2) * &(&one() + &x(1));
        assert_eq!(poly_gcd(&a, &b), f.pow(2));
    }
}
