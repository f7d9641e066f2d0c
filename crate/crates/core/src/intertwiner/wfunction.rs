//! Test functions P(a)·exp(−Σ α_i(a_i²/2 + b_i a_i)): entire in every
//! variable, closed under complex shifts, multiplication by exponentials of
//! linear forms, differentiation and the partial Fourier transform.

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Multivariate polynomial with complex coefficients, keyed by exponents.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Complex64>,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The coordinate function a_i.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Poly::zero(nvars);
        p.add_term(e, Complex64::new(1.0, 0.0));
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Complex64)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Complex64) {
        debug_assert_eq!(exps.len(), self.nvars);
        let e = self.terms.entry(exps).or_insert(Complex64::new(0.0, 0.0));
        *e += c;
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    /// Multiplication by the affine form c₀ + Σ coeffs_i a_i.
    pub fn mul_affine(&self, coeffs: &[Complex64], c0: Complex64) -> Poly {
        let mut out = self.scale(c0);
        for (i, &ci) in coeffs.iter().enumerate() {
            if ci != Complex64::new(0.0, 0.0) {
                out = out.add(&self.mul(&Poly::var(self.nvars, i)).scale(ci));
            }
        }
        out
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.add_term(e2, c * f64::from(e[i]));
            }
        }
        out
    }

    /// P(a + δ e_i).
    pub fn shift(&self, i: usize, delta: Complex64) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let m = e[i];
            for j in 0..=m {
                let mut e2 = e.clone();
                e2[i] = j;
                out.add_term(e2, c * binomial(m, j) * delta.powu(m - j));
            }
        }
        out
    }

    pub fn eval(&self, a: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| e.iter().zip(a).fold(*c, |acc, (&k, x)| acc * x.powu(k)))
            .sum()
    }

    /// Coefficients of a_i^m as polynomials in the remaining variables.
    fn split(&self, i: usize) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let m = std::mem::replace(&mut e2[i], 0);
            out.entry(m).or_insert_with(|| Poly::zero(self.nvars)).add_term(e2, *c);
        }
        out
    }
}

/// P(a)·exp(−Σ α_i(a_i²/2 + b_i a_i)) with every α_i > 0.
#[derive(Clone, Debug, PartialEq)]
pub struct WFunction {
    pub alpha: Vec<f64>,
    pub b: Vec<Complex64>,
    pub poly: Poly,
}

impl WFunction {
    pub fn new(alpha: Vec<f64>, b: Vec<Complex64>, poly: Poly) -> Result<Self> {
        if alpha.len() != b.len() || poly.nvars() != b.len() {
            return Err(Error::InvalidParam("test-function dimensions disagree".into()));
        }
        if alpha.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
            return Err(Error::InvalidParam(format!("Gaussian widths must be positive, got {alpha:?}")));
        }
        Ok(WFunction { alpha, b, poly })
    }

    /// exp(−α Σ (a_i²/2 + b_i a_i)).
    pub fn gaussian(alpha: f64, b: &[f64]) -> Result<Self> {
        let n = b.len();
        Self::new(vec![alpha; n], b.iter().map(|&x| Complex64::new(x, 0.0)).collect(), Poly::constant(n, Complex64::new(1.0, 0.0)))
    }

    pub fn nvars(&self) -> usize {
        self.b.len()
    }

    pub fn with_poly(&self, poly: Poly) -> Self {
        WFunction { alpha: self.alpha.clone(), b: self.b.clone(), poly }
    }

    pub fn eval(&self, a: &[Complex64]) -> Complex64 {
        let e: Complex64 = (0..self.nvars()).map(|i| -self.alpha[i] * (a[i] * a[i] / 2.0 + self.b[i] * a[i])).sum();
        self.poly.eval(a) * e.exp()
    }

    pub fn eval_real(&self, a: &[f64]) -> Complex64 {
        let z: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.eval(&z)
    }

    /// a ↦ w(a + δ e_i).
    pub fn shift(&self, i: usize, delta: Complex64) -> Self {
        let (al, bi) = (self.alpha[i], self.b[i]);
        let factor = (-al * (delta * delta / 2.0 + bi * delta)).exp();
        let mut b = self.b.clone();
        b[i] += delta;
        WFunction { alpha: self.alpha.clone(), b, poly: self.poly.shift(i, delta).scale(factor) }
    }

    /// Multiplication by exp(Σ m_i a_i).
    pub fn mul_exp_linear(&self, m: &[Complex64]) -> Self {
        let b = self.b.iter().zip(m).zip(&self.alpha).map(|((b, m), al)| b - m / al).collect();
        WFunction { alpha: self.alpha.clone(), b, poly: self.poly.clone() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.with_poly(self.poly.scale(s))
    }

    /// ∂w/∂a_i.
    pub fn derivative(&self, i: usize) -> Self {
        // ∂(P e^E) = (∂P − α_i(a_i + b_i) P) e^E
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.nvars()];
        coeffs[i] = Complex64::new(-self.alpha[i], 0.0);
        let p = self.poly.derivative(i).add(&self.poly.mul_affine(&coeffs, -self.alpha[i] * self.b[i]));
        self.with_poly(p)
    }

    /// Partial Fourier transform along a_k, F(w)(c) = ∫ e^{a_k c/2πiℏ} w da_k,
    /// returned as a test function with c in slot k.
    pub fn fourier(&self, k: usize, hbar: f64) -> Self {
        // ∫ a^m e^{−αa²/2 − βa} da = (−∂_β)^m √(2π/α) e^{β²/2α}, β = αb + iκc
        let (al, b) = (self.alpha[k], self.b[k]);
        let kappa = 1.0 / (2.0 * PI * hbar);
        let parts = self.poly.split(k);
        let max_m = parts.keys().copied().max().unwrap_or(0);
        // h_m(β) as coefficient vectors in β: h_{m+1} = −(h_m′ + β h_m/α)
        let mut h: Vec<Vec<Complex64>> = vec![vec![Complex64::new(1.0, 0.0)]];
        for m in 0..max_m as usize {
            let prev = &h[m];
            let mut next = vec![Complex64::new(0.0, 0.0); prev.len() + 1];
            for (j, &c) in prev.iter().enumerate() {
                if j > 0 {
                    next[j - 1] -= c * j as f64;
                }
                next[j + 1] -= c / al;
            }
            h.push(next);
        }
        let n = self.nvars();
        let beta_poly = Poly::constant(n, al * b).add(&Poly::var(n, k).scale(I * kappa));
        let prefactor = (2.0 * PI / al).sqrt() * (al * b * b / 2.0).exp();
        let mut out = Poly::zero(n);
        for (m, pm) in parts {
            let mut hm = Poly::zero(n);
            let mut power = Poly::constant(n, Complex64::new(1.0, 0.0));
            for &c in &h[m as usize] {
                hm = hm.add(&power.scale(c));
                power = power.mul(&beta_poly);
            }
            out = out.add(&pm.mul(&hm));
        }
        let mut alpha = self.alpha.clone();
        let mut bb = self.b.clone();
        alpha[k] = kappa * kappa / al;
        bb[k] = -I * b * al / kappa;
        WFunction { alpha, b: bb, poly: out.scale(prefactor) }
    }
}

/// A finite sum of test functions (the class is closed under the difference
/// operators only up to sums).
#[derive(Clone, Debug, PartialEq)]
pub struct WSum {
    pub terms: Vec<WFunction>,
}

impl From<WFunction> for WSum {
    fn from(w: WFunction) -> Self {
        WSum { terms: vec![w] }
    }
}

impl WSum {
    pub fn eval(&self, a: &[Complex64]) -> Complex64 {
        self.terms.iter().map(|t| t.eval(a)).sum()
    }

    pub fn eval_real(&self, a: &[f64]) -> Complex64 {
        let z: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.eval(&z)
    }

    pub fn map(&self, f: impl Fn(&WFunction) -> WFunction) -> WSum {
        WSum { terms: self.terms.iter().map(f).collect() }
    }

    pub fn add(&self, other: &WSum) -> WSum {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        WSum { terms }
    }

    pub fn scale(&self, s: Complex64) -> WSum {
        self.map(|t| t.scale(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample() -> WFunction {
        // (1 + 2a₀ − a₀²a₁ + 0.5i a₁³) exp(−0.8(a₀²/2 + 0.3a₀) − 1.3(a₁²/2 − 0.2a₁))
        let mut p = Poly::constant(2, c(1.0, 0.0));
        p.add_term(vec![1, 0], c(2.0, 0.0));
        p.add_term(vec![2, 1], c(-1.0, 0.0));
        p.add_term(vec![0, 3], c(0.0, 0.5));
        WFunction::new(vec![0.8, 1.3], vec![c(0.3, 0.0), c(-0.2, 0.1)], p).unwrap()
    }

    #[test]
    fn rejects_non_positive_width() {
        assert!(WFunction::gaussian(0.0, &[0.0]).is_err());
        assert!(WFunction::gaussian(-1.0, &[0.0]).is_err());
    }

    #[test]
    fn shift_matches_direct_evaluation() {
        let w = sample();
        let d = c(0.4, 2.1);
        let s = w.shift(0, d);
        for a in [[c(0.3, -0.2), c(1.1, 0.4)], [c(-1.5, 0.0), c(0.2, -0.7)]] {
            let direct = w.eval(&[a[0] + d, a[1]]);
            assert!((s.eval(&a) - direct).norm() < 1e-12 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn exponential_multiplication_and_derivative() {
        let w = sample();
        let m = [c(0.5, 0.1), c(-1.0, 0.0)];
        let a = [c(0.7, 0.3), c(-0.4, 0.2)];
        let direct = w.eval(&a) * (m[0] * a[0] + m[1] * a[1]).exp();
        assert!((w.mul_exp_linear(&m).eval(&a) - direct).norm() < 1e-12);
        let h = 1e-5;
        let fd = (w.eval(&[a[0], a[1] + h]) - w.eval(&[a[0], a[1] - h])) / (2.0 * h);
        assert!((w.derivative(1).eval(&a) - fd).norm() < 1e-8);
    }

    #[test]
    fn fourier_matches_quadrature() {
        // independent oracle: trapezoid sum of the defining integral
        let w = sample();
        let hbar = 0.7;
        for k in 0..2 {
            let f = w.fourier(k, hbar);
            for (cv, other) in [(0.9, 0.4), (-2.5, -0.3), (0.0, 1.2)] {
                let step = 0.01;
                let mut sum = c(0.0, 0.0);
                for j in -4000..=4000 {
                    let a = f64::from(j) * step;
                    let mut pt = [c(other, 0.0); 2];
                    pt[k] = c(a, 0.0);
                    sum += w.eval(&pt) * (-I * a * cv / (2.0 * PI * hbar)).exp() * step;
                }
                let mut pt = [c(other, 0.0); 2];
                pt[k] = c(cv, 0.0);
                let exact = f.eval(&pt);
                assert!((exact - sum).norm() < 1e-10, "k={k} c={cv}: {exact} vs {sum}");
            }
        }
    }

    #[test]
    fn gaussian_transform_has_reciprocal_width() {
        let w = WFunction::gaussian(2.0, &[0.0]).unwrap();
        let hbar = 0.5;
        let f = w.fourier(0, hbar);
        let kappa = 1.0 / (2.0 * PI * hbar);
        assert!((f.alpha[0] - kappa * kappa / 2.0).abs() < 1e-15);
        assert!((f.eval_real(&[0.0]) - c((PI).sqrt(), 0.0)).norm() < 1e-14);
    }
}
