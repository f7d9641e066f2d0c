//! Truncated power series over a quantum torus, graded by a linear
//! functional on the lattice (typically the coefficient of one basis vector),
//! and the q-exponential Ψ^q.

use super::coef::QCoef;
use super::torus::{Lam, QTorus, QTorusElem};
use crate::error::{Error, Result};

/// Σ c_λ e_λ with all terms of grade g(λ) > `order` discarded.
#[derive(Clone, Debug, PartialEq)]
pub struct QSeries {
    pub elem: QTorusElem,
    pub grading: Lam,
    pub order: i64,
}

impl QSeries {
    pub fn new(elem: QTorusElem, grading: Lam, order: i64) -> Self {
        let mut s = QSeries { elem, grading, order };
        s.truncate();
        s
    }

    pub fn grade(&self, l: &[i64]) -> i64 {
        self.grading.iter().zip(l).map(|(a, b)| a * b).sum()
    }

    fn truncate(&mut self) {
        let (g, o) = (self.grading.clone(), self.order);
        self.elem = self.elem.filter(|l| g.iter().zip(l).map(|(a, b)| a * b).sum::<i64>() <= o);
    }

    pub fn lift(&self, e: QTorusElem) -> QSeries {
        QSeries::new(e, self.grading.clone(), self.order)
    }

    pub fn mul(&self, torus: &QTorus, rhs: &QSeries) -> QSeries {
        // drop terms early: multiply only pairs whose grades fit
        let mut out = QTorusElem::zero();
        for (l, c) in self.elem.terms() {
            let gl = self.grade(l);
            let part = rhs.elem.filter(|m| gl + self.grade(m) <= self.order);
            if part.is_zero() {
                continue;
            }
            out = out.add(&torus.mul(&QTorusElem::term(l.clone(), c.clone()), &part));
        }
        self.lift(out)
    }

    pub fn add(&self, rhs: &QSeries) -> QSeries {
        self.lift(self.elem.add(&rhs.elem))
    }

    pub fn sub(&self, rhs: &QSeries) -> QSeries {
        self.lift(self.elem.sub(&rhs.elem))
    }

    pub fn is_zero(&self) -> bool {
        self.elem.is_zero()
    }

    /// Σ_{n=0}^{order} coeffs[n] · e_{nν}; requires g(ν) ≥ 1 for the sum to be
    /// a series in the grading.
    pub fn geometric(torus: &QTorus, nu: &[i64], coeffs: &[QCoef], grading: Lam, order: i64) -> Result<QSeries> {
        let s = QSeries { elem: QTorusElem::zero(), grading, order };
        let g = s.grade(nu);
        if g < 1 {
            return Err(Error::InvalidParam("series variable must have positive grade".into()));
        }
        let mut elem = QTorusElem::zero();
        for (n, c) in coeffs.iter().enumerate() {
            if (n as i64) * g > order {
                break;
            }
            elem.add_term(nu.iter().map(|x| x * n as i64).collect(), c.clone());
        }
        debug_assert_eq!(torus.rank(), nu.len());
        Ok(s.lift(elem))
    }
}

/// Coefficients c_n of Ψ^q(x) = Π_{k≥1} (1 + q^{2k−1}x)^{−1} = Σ c_n x^n,
/// with q = t^{q_exp}:
/// c_n = q^{−n(n−1)/2} / Π_{k=1}^n (q^k − q^{−k}).
pub fn psi_coefficients(q_exp: i64, order: usize) -> Vec<QCoef> {
    let mut out = vec![QCoef::one()];
    for n in 1..=order as i64 {
        let prev = out.last().unwrap().clone();
        let den = QCoef::t_minus_inv(n * q_exp);
        let step = &QCoef::t_pow(-(n - 1) * q_exp) * &den.recip().expect("q^n ≠ q^-n");
        out.push(&prev * &step);
    }
    out
}

/// Coefficients d_n of Ψ^q(x)^{−1} = Π_{k≥1} (1 + q^{2k−1}x), from
/// P(x) = (1 + qx) P(q²x): d_n (1 − q^{2n}) = q^{2n−1} d_{n−1}.
pub fn psi_inverse_coefficients(q_exp: i64, order: usize) -> Vec<QCoef> {
    let mut out = vec![QCoef::one()];
    for n in 1..=order as i64 {
        let prev = out.last().unwrap().clone();
        let num = QCoef::t_pow((2 * n - 1) * q_exp);
        let den = &QCoef::one() - &QCoef::t_pow(2 * n * q_exp);
        out.push(&(&prev * &num) * &den.recip().expect("1 ≠ q^2n"));
    }
    out
}

/// The coefficients printed in the literal expansion Σ x^n / Π (q^k − q^{−k}),
/// kept for comparison: they agree with Ψ^q only up to n = 1.
pub fn psi_coefficients_literal(q_exp: i64, order: usize) -> Vec<QCoef> {
    let mut out = vec![QCoef::one()];
    for n in 1..=order as i64 {
        let prev = out.last().unwrap().clone();
        out.push(&prev * &QCoef::t_minus_inv(n * q_exp).recip().expect("nonzero"));
    }
    out
}

/// Ψ^{q}(e_ν) as a series, with q = t^{q_exp}.
pub fn psi_q(torus: &QTorus, nu: &[i64], q_exp: i64, grading: Lam, order: i64) -> Result<QSeries> {
    QSeries::geometric(torus, nu, &psi_coefficients(q_exp, order.max(0) as usize), grading, order)
}

pub fn psi_q_inverse(torus: &QTorus, nu: &[i64], q_exp: i64, grading: Lam, order: i64) -> Result<QSeries> {
    QSeries::geometric(torus, nu, &psi_inverse_coefficients(q_exp, order.max(0) as usize), grading, order)
}

/// Coefficient residuals of Ψ^q(q²x) − (1 + qx) Ψ^q(x) in degrees 0..=order;
/// every entry is exactly zero when the difference equation holds.
pub fn psi_difference_residual(coeffs: &[QCoef], q_exp: i64) -> Vec<QCoef> {
    (0..coeffs.len())
        .map(|n| {
            let lhs = &coeffs[n] * &QCoef::t_pow(2 * n as i64 * q_exp);
            let mut rhs = coeffs[n].clone();
            if n > 0 {
                rhs = &rhs + &(&coeffs[n - 1] * &QCoef::t_pow(q_exp));
            }
            &lhs - &rhs
        })
        .collect()
}

/// Number of degrees ≤ `order` in which Ψ^q fails its difference equation.
pub fn psi_q_difference_check(order: usize) -> usize {
    psi_difference_residual(&psi_coefficients(1, order), 1).iter().filter(|c| !c.is_zero()).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feed::Feed;

    #[test]
    fn difference_equation_holds_to_order_20() {
        assert_eq!(psi_q_difference_check(20), 0);
    }

    #[test]
    fn first_coefficients() {
        let c = psi_coefficients(1, 3);
        assert_eq!(c[1], QCoef::t_minus_inv(1).recip().unwrap());
        // the x² coefficient carries an extra q^{−1} relative to the literal expansion
        let lit = psi_coefficients_literal(1, 3);
        assert_eq!(c[1], lit[1]);
        assert_eq!(c[2], &lit[2] * &QCoef::t_pow(-1));
        assert!(psi_difference_residual(&lit, 1).iter().skip(2).any(|r| !r.is_zero()));
    }

    #[test]
    fn inverse_series_is_inverse() {
        let t = QTorus::x_torus(&Feed::rank2(1));
        let (a, b) = (psi_q(&t, &[1, 0], 1, vec![1, 0], 10).unwrap(), psi_q_inverse(&t, &[1, 0], 1, vec![1, 0], 10).unwrap());
        let p = a.mul(&t, &b);
        assert_eq!(p.elem, t.one());
    }

    #[test]
    fn inverse_series_matches_product() {
        // Π_{k=1}^{∞}(1 + q^{2k−1}x): coefficient of x is q/(1 − q²)
        let d = psi_inverse_coefficients(1, 2);
        let expected = &QCoef::t_pow(1) * &(&QCoef::one() - &QCoef::t_pow(2)).recip().unwrap();
        assert_eq!(d[1], expected);
    }
}
