//! The Heisenberg operators x̂_p = 2πiℏ_p∂_p − α_p^+, x̃̂_p = 2πiℏ_p∂_p − α_p^−,
//! b̂_p = a_p on functions of the logarithmic coordinates a_p = log A_p, and
//! their exponentials X̂_p, X̃̂_p, B̂_p and Langlands duals, applied exactly
//! to test functions.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use super::wfunction::{WFunction, WSum};
use crate::error::{Error, Result};
use crate::feed::Feed;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Exchange data, multipliers and ℏ; ℏ_p = ℏ/d_p.
#[derive(Clone, Debug)]
pub struct Heisenberg {
    pub eps: Vec<Vec<i64>>,
    pub d: Vec<f64>,
    pub hbar: f64,
}

impl Heisenberg {
    pub fn new(feed: &Feed, hbar: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParam(format!("ℏ must be positive, got {hbar}")));
        }
        let n = feed.rank();
        let eps = (0..n).map(|i| (0..n).map(|j| feed.eps(i, j)).collect()).collect();
        let d = feed.d().iter().map(|x| *x.numer() as f64 / *x.denom() as f64).collect();
        Ok(Heisenberg { eps, d, hbar })
    }

    pub fn rank(&self) -> usize {
        self.eps.len()
    }

    pub fn hbar_p(&self, p: usize) -> f64 {
        self.hbar / self.d[p]
    }

    pub fn q_p(&self, p: usize) -> Complex64 {
        (I * PI * self.hbar_p(p)).exp()
    }

    /// Coefficients of α_p^+ = Σ_j [ε_pj]_+ a_j.
    pub fn alpha_plus(&self, p: usize) -> Vec<f64> {
        self.eps[p].iter().map(|&e| e.max(0) as f64).collect()
    }

    /// Coefficients of α_p^− = Σ_j [−ε_pj]_+ a_j.
    pub fn alpha_minus(&self, p: usize) -> Vec<f64> {
        self.eps[p].iter().map(|&e| (-e).max(0) as f64).collect()
    }

    fn check(&self, p: usize) -> Result<()> {
        if p >= self.rank() {
            return Err(Error::IndexOutOfRange { index: p, rank: self.rank() });
        }
        Ok(())
    }
}

/// Difference and differential operators built from the generators.
#[derive(Clone, Debug, PartialEq)]
pub enum DiffOperator {
    /// x̂_p
    LogX(usize),
    /// x̃̂_p
    LogXTilde(usize),
    /// b̂_p
    LogB(usize),
    /// X̂_p = exp x̂_p: f ↦ e^{−α_p^+}·f(a + 2πiℏ_p e_p)
    X(usize),
    XInv(usize),
    /// X̃̂_p = exp x̃̂_p
    XTilde(usize),
    /// B̂_p: multiplication by e^{a_p}
    B(usize),
    BInv(usize),
    /// X̂^∨_p = exp(x̂_p/ℏ_p)
    XDual(usize),
    /// B̂^∨_p = exp(b̂_p/ℏ_p)
    BDual(usize),
    Scalar(Complex64),
    Sum(Vec<DiffOperator>),
    /// Composition; the rightmost factor acts first.
    Product(Vec<DiffOperator>),
}

fn linear(coeffs: &[f64], scale: Complex64) -> Vec<Complex64> {
    coeffs.iter().map(|&c| scale * c).collect()
}

fn unit(n: usize, p: usize, s: Complex64) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[p] = s;
    v
}

impl DiffOperator {
    pub fn apply(&self, h: &Heisenberg, w: &WSum) -> Result<WSum> {
        use DiffOperator::*;
        let n = h.rank();
        let one = Complex64::new(1.0, 0.0);
        Ok(match self {
            LogX(p) | LogXTilde(p) => {
                h.check(*p)?;
                let alpha = if matches!(self, LogX(_)) { h.alpha_plus(*p) } else { h.alpha_minus(*p) };
                let s = 2.0 * PI * I * h.hbar_p(*p);
                let neg: Vec<Complex64> = linear(&alpha, -one);
                w.map(|t| {
                    let d = t.derivative(*p);
                    t.with_poly(d.poly.scale(s).add(&t.poly.mul_affine(&neg, Complex64::new(0.0, 0.0))))
                })
            }
            LogB(p) => {
                h.check(*p)?;
                let e = unit(n, *p, one);
                w.map(|t| t.with_poly(t.poly.mul_affine(&e, Complex64::new(0.0, 0.0))))
            }
            X(p) | XTilde(p) | XInv(p) | XDual(p) => {
                h.check(*p)?;
                let alpha = if matches!(self, XTilde(_)) { h.alpha_minus(*p) } else { h.alpha_plus(*p) };
                let (shift, m) = match self {
                    XDual(_) => (2.0 * PI * I, linear(&alpha, Complex64::new(-1.0 / h.hbar_p(*p), 0.0))),
                    XInv(_) => (-2.0 * PI * I * h.hbar_p(*p), linear(&alpha, one)),
                    _ => (2.0 * PI * I * h.hbar_p(*p), linear(&alpha, -one)),
                };
                w.map(|t| t.shift(*p, shift).mul_exp_linear(&m))
            }
            B(p) | BInv(p) | BDual(p) => {
                h.check(*p)?;
                let s = match self {
                    B(_) => one,
                    BInv(_) => -one,
                    _ => Complex64::new(1.0 / h.hbar_p(*p), 0.0),
                };
                let m = unit(n, *p, s);
                w.map(|t| t.mul_exp_linear(&m))
            }
            Scalar(c) => w.scale(*c),
            Sum(ops) => {
                let mut out = WSum { terms: Vec::new() };
                for op in ops {
                    out = out.add(&op.apply(h, w)?);
                }
                out
            }
            Product(ops) => {
                let mut out = w.clone();
                for op in ops.iter().rev() {
                    out = op.apply(h, &out)?;
                }
                out
            }
        })
    }

    /// Commutator [self, other] applied to w.
    pub fn commutator(&self, other: &DiffOperator, h: &Heisenberg, w: &WSum) -> Result<WSum> {
        let ab = self.apply(h, &other.apply(h, w)?)?;
        let ba = other.apply(h, &self.apply(h, w)?)?;
        Ok(ab.add(&ba.scale(Complex64::new(-1.0, 0.0))))
    }
}

/// Deterministic complex sample points in a box around the origin.
pub fn sample_points(n: usize, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..n).map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-0.5..0.5))).collect())
        .collect()
}

/// max |f − g| / max |g| over the sample points.
pub fn relative_difference(
    f: impl Fn(&[Complex64]) -> Complex64,
    g: impl Fn(&[Complex64]) -> Complex64,
    points: &[Vec<Complex64>],
) -> f64 {
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for p in points {
        let (a, b) = (f(p), g(p));
        num = num.max((a - b).norm());
        den = den.max(b.norm());
    }
    num / den.max(f64::MIN_POSITIVE)
}

/// max |f| / max |g| over the sample points.
pub fn relative_size(f: impl Fn(&[Complex64]) -> Complex64, g: impl Fn(&[Complex64]) -> Complex64, points: &[Vec<Complex64>]) -> f64 {
    points.iter().map(|p| f(p).norm()).fold(0.0, f64::max) / points.iter().map(|p| g(p).norm()).fold(f64::MIN_POSITIVE, f64::max)
}

/// Worst residuals of the Heisenberg relations on w:
/// [x̂_p, b̂_q] = 2πiℏ_pδ_pq, [x̂_p, x̂_q] = 2πiℏ ε̂_pq, [x̂_p, x̃̂_q] = 0,
/// and q_p^{−1}X̂_pB̂_p = q_pB̂_pX̂_p.
#[derive(Clone, Debug, PartialEq)]
pub struct HeisenbergResiduals {
    pub x_b: f64,
    pub x_x: f64,
    pub x_xtilde: f64,
    pub q_commutation: f64,
}

pub fn heisenberg_residuals(h: &Heisenberg, w: &WFunction) -> Result<HeisenbergResiduals> {
    use DiffOperator::*;
    let n = h.rank();
    let ws = WSum::from(w.clone());
    let pts = sample_points(n, 12, 17);
    let mut r = HeisenbergResiduals { x_b: 0.0, x_x: 0.0, x_xtilde: 0.0, q_commutation: 0.0 };
    for p in 0..n {
        for q in 0..n {
            let c = LogX(p).commutator(&LogB(q), h, &ws)?;
            let expected = if p == q { 2.0 * PI * I * h.hbar_p(p) } else { Complex64::new(0.0, 0.0) };
            r.x_b = r.x_b.max(relative_size(|a| c.eval(a) - expected * w.eval(a), |a| w.eval(a), &pts));
            let c = LogX(p).commutator(&LogX(q), h, &ws)?;
            let eps_hat = h.eps[p][q] as f64 / h.d[q];
            let expected = 2.0 * PI * I * h.hbar * eps_hat;
            r.x_x = r.x_x.max(relative_size(|a| c.eval(a) - expected * w.eval(a), |a| w.eval(a), &pts));
            let c = LogX(p).commutator(&LogXTilde(q), h, &ws)?;
            r.x_xtilde = r.x_xtilde.max(relative_size(|a| c.eval(a), |a| w.eval(a), &pts));
        }
        let qp = h.q_p(p);
        let lhs = Product(vec![Scalar(1.0 / qp), X(p), B(p)]).apply(h, &ws)?;
        let rhs = Product(vec![Scalar(qp), B(p), X(p)]).apply(h, &ws)?;
        r.q_commutation = r.q_commutation.max(relative_difference(|a| lhs.eval(a), |a| rhs.eval(a), &pts));
    }
    Ok(r)
}

/// Residual of the conjugation between the realization x̂^old_p =
/// πiℏ_p∂_p − Σ_q ε_pq a_q, b̂^old_p = 2a_p and the one above: with
/// (Uf)(u) = e^{φ(u)} f(u/2), φ(u) = Σ_{p,q} d_p|ε_pq| u_p u_q / (8πiℏ),
/// one has U X̂^old_p = X̂_p U and U B̂^old_p = B̂_p U.
pub fn old_realization_residual(h: &Heisenberg, w: &WFunction) -> Result<f64> {
    let n = h.rank();
    let phi = |u: &[Complex64]| -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for p in 0..n {
            for q in 0..n {
                s += h.d[p] * (h.eps[p][q].abs() as f64) * u[p] * u[q];
            }
        }
        s / (8.0 * PI * I * h.hbar)
    };
    // U applied to an arbitrary function of a
    let conj = |f: &dyn Fn(&[Complex64]) -> Complex64, u: &[Complex64]| -> Complex64 {
        let half: Vec<Complex64> = u.iter().map(|x| x / 2.0).collect();
        phi(u).exp() * f(&half)
    };
    let uw = |u: &[Complex64]| conj(&|a: &[Complex64]| w.eval(a), u);
    let pts = sample_points(n, 12, 29);
    let mut worst: f64 = 0.0;
    for p in 0..n {
        let hp = h.hbar_p(p);
        // X̂^old_p f(a) = e^{−Σ_q ε_pq a_q} f(a + πiℏ_p e_p)
        let x_old = |a: &[Complex64]| {
            let lin: Complex64 = (0..n).map(|q| -(h.eps[p][q] as f64) * a[q]).sum();
            let mut s = a.to_vec();
            s[p] += PI * I * hp;
            lin.exp() * w.eval(&s)
        };
        let lhs = |u: &[Complex64]| conj(&x_old, u);
        let ap = h.alpha_plus(p);
        let rhs = |u: &[Complex64]| {
            let lin: Complex64 = (0..n).map(|q| -ap[q] * u[q]).sum();
            let mut s = u.to_vec();
            s[p] += 2.0 * PI * I * hp;
            lin.exp() * uw(&s)
        };
        worst = worst.max(relative_difference(lhs, rhs, &pts));
        let b_old = |a: &[Complex64]| (2.0 * a[p]).exp() * w.eval(a);
        let lhs = |u: &[Complex64]| conj(&b_old, u);
        let rhs = |u: &[Complex64]| u[p].exp() * uw(u);
        worst = worst.max(relative_difference(lhs, rhs, &pts));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::super::wfunction::Poly;
    use super::*;
    use num_rational::Rational64;

    fn feed() -> Feed {
        // skew-symmetrizable with d = (1, 2): d_iε_ij skew
        Feed::new(vec![vec![0, 2, -1], vec![-1, 0, 1], vec![1, -2, 0]], vec![Rational64::from(1), Rational64::from(2), Rational64::from(1)])
            .unwrap()
    }

    fn test_function() -> WFunction {
        let mut p = Poly::constant(3, Complex64::new(1.0, 0.0));
        p.add_term(vec![1, 0, 2], Complex64::new(0.5, -0.2));
        p.add_term(vec![0, 3, 0], Complex64::new(-0.1, 0.0));
        WFunction::new(vec![0.9, 1.1, 0.7], vec![Complex64::new(0.2, 0.0), Complex64::new(-0.4, 0.3), Complex64::new(0.0, 0.0)], p).unwrap()
    }

    #[test]
    fn heisenberg_relations_hold() {
        let h = Heisenberg::new(&feed(), 0.7).unwrap();
        let r = heisenberg_residuals(&h, &test_function()).unwrap();
        assert!(r.x_b < 1e-12, "{r:?}");
        assert!(r.x_x < 1e-12, "{r:?}");
        assert!(r.x_xtilde < 1e-12, "{r:?}");
        assert!(r.q_commutation < 1e-12, "{r:?}");
    }

    #[test]
    fn exponential_matches_shift_formula() {
        // X̂_p w(a) = e^{−α_p^+(a)} w(a + 2πiℏ_p e_p), checked pointwise
        let f = feed();
        let h = Heisenberg::new(&f, 0.7).unwrap();
        let w = test_function();
        let xw = DiffOperator::X(1).apply(&h, &w.clone().into()).unwrap();
        for a in sample_points(3, 5, 3) {
            let alpha: Complex64 = (0..3).map(|j| (f.eps(1, j).max(0) as f64) * a[j]).sum();
            let mut s = a.clone();
            s[1] += 2.0 * PI * I * 0.35;
            let direct = (-alpha).exp() * w.eval(&s);
            assert!((xw.eval(&a) - direct).norm() < 1e-12 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn inverse_and_dual_operators() {
        use DiffOperator::*;
        let h = Heisenberg::new(&feed(), 0.7).unwrap();
        let w: WSum = test_function().into();
        let pts = sample_points(3, 8, 5);
        let back = Product(vec![XInv(2), X(2)]).apply(&h, &w).unwrap();
        assert!(relative_difference(|a| back.eval(a), |a| w.eval(a), &pts) < 1e-12);
        // X̂^∨ and B̂^∨ satisfy the dual q-commutation with q^∨_p = e^{iπ/ℏ_p}
        let qd = (I * PI / h.hbar_p(0)).exp();
        let lhs = Product(vec![Scalar(1.0 / qd), XDual(0), BDual(0)]).apply(&h, &w).unwrap();
        let rhs = Product(vec![Scalar(qd), BDual(0), XDual(0)]).apply(&h, &w).unwrap();
        assert!(relative_difference(|a| lhs.eval(a), |a| rhs.eval(a), &pts) < 1e-12);
        // X̂^∨_p commutes with X̂_q and B̂_q for every q
        for q in 0..3 {
            for op in [X(q), B(q)] {
                let c = XDual(0).commutator(&op, &h, &w).unwrap();
                let one_order = Product(vec![XDual(0), op.clone()]).apply(&h, &w).unwrap();
                assert!(relative_size(|a| c.eval(a), |a| one_order.eval(a), &pts) < 1e-12, "{op:?}");
            }
        }
    }

    #[test]
    fn old_realization_is_conjugate() {
        let h = Heisenberg::new(&feed(), 0.7).unwrap();
        assert!(old_realization_residual(&h, &test_function()).unwrap() < 1e-8);
    }

    #[test]
    fn index_errors() {
        let h = Heisenberg::new(&feed(), 0.7).unwrap();
        assert!(DiffOperator::X(3).apply(&h, &test_function().into()).is_err());
        assert!(Heisenberg::new(&feed(), -1.0).is_err());
    }
}
