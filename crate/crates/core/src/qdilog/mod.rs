//! Numerics for the quantum logarithm φ^ℏ and the non-compact quantum
//! dilogarithm Φ^ℏ:
//!
//! φ^ℏ(z) = −(πℏ/2) ∫_Ω e^{−ipz} / (sh(πp) sh(πℏp)) dp,
//! log Φ^ℏ(z) = −(1/4) ∫_Ω e^{−ipz} / (sh(πp) sh(πℏp)) dp/p,
//!
//! with Ω the real line passing above the origin.
//!
//! Inside the strip |Im z| < π(1 + Re ℏ) the contour is moved to the line
//! Im p = c, strictly between the origin and the nearest poles i and i/ℏ,
//! where the integrand is analytic and exponentially decaying; the trapezoid
//! rule then converges geometrically and is refined until successive
//! halvings agree. For Re z > 0 the line Im p = −c is used instead, with the
//! residue at p = 0 added back in closed form; this avoids the e^{c·Re z}
//! cancellation. Outside the strip, values are continued by the shift
//! relations in z ↦ z + 2πi and z ↦ z + 2πiℏ.

pub mod li2;
pub mod properties;

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub use li2::{li2, L2};
pub use properties::{check_property, default_grid, Property, PropertyReport};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A complex value with an estimated absolute error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EvalResult {
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    pub err: f64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&[z.re, z.im], s)
}

impl EvalResult {
    pub fn exact(value: Complex64) -> Self {
        EvalResult { value, err: 0.0 }
    }
}

/// The Planck constant ℏ with q = e^{iπℏ}, q^∨ = e^{iπ/ℏ}. Real ℏ > 0 for the
/// integral representation; complex ℏ with Re ℏ > 0 is accepted by the
/// integral and Im ℏ > 0 is required by the product formula.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Planck {
    pub hbar: Complex64,
}

impl Planck {
    pub fn new(hbar: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParam(format!("ℏ must be positive, got {hbar}")));
        }
        Ok(Planck { hbar: Complex64::new(hbar, 0.0) })
    }

    pub fn complex(hbar: Complex64) -> Result<Self> {
        if !(hbar.re.is_finite() && hbar.im.is_finite() && hbar.re > 0.0) {
            return Err(Error::InvalidParam(format!("Re ℏ must be positive, got {hbar}")));
        }
        Ok(Planck { hbar })
    }

    pub fn is_real(self) -> bool {
        self.hbar.im == 0.0
    }

    pub fn q(self) -> Complex64 {
        (I * PI * self.hbar).exp()
    }

    pub fn q_dual(self) -> Complex64 {
        (I * PI / self.hbar).exp()
    }

    /// ℏ^∨ = 1/ℏ.
    pub fn dual(self) -> Planck {
        Planck { hbar: 1.0 / self.hbar }
    }

    /// ℏ_k = ℏ/d_k.
    pub fn for_multiplier(self, d: f64) -> Planck {
        Planck { hbar: self.hbar / d }
    }

    /// Half-width π(1 + Re ℏ) of the strip where the integrals converge.
    pub fn strip(self) -> f64 {
        PI * (1.0 + self.hbar.re)
    }
}

/// Which side of the origin the integration line passes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Contour {
    /// Im p = +c: the defining contour itself.
    Above,
    /// Im p = −c plus the residue at p = 0.
    Below,
    /// `Above` for Re z ≤ 0 and `Below` for Re z > 0.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kernel {
    /// φ^ℏ
    Log,
    /// log Φ^ℏ
    Dilog,
}

/// 1 − e^{−u}, accurate for small |u|.
fn one_minus_exp_neg(u: Complex64) -> Complex64 {
    if u.norm() < 1e-2 {
        let mut term = u;
        let mut sum = u;
        for k in 2..=8 {
            term *= -u / k as f64;
            sum += term;
        }
        sum
    } else {
        1.0 - (-u).exp()
    }
}

/// log csch(w) on a branch that is continuous along the integration line
/// (only its exponential is used).
fn ln_csch(w: Complex64) -> Complex64 {
    if w.re >= 0.0 {
        2f64.ln() - w - one_minus_exp_neg(2.0 * w).ln()
    } else {
        I * PI + 2f64.ln() + w - one_minus_exp_neg(-2.0 * w).ln()
    }
}

fn integrand(kind: Kernel, p: Complex64, z: Complex64, hbar: Complex64) -> Complex64 {
    let mut l = -I * p * z + ln_csch(PI * p) + ln_csch(PI * hbar * p);
    if kind == Kernel::Dilog {
        l -= p.ln();
    }
    l.exp()
}

/// Distance c of the integration line from the real axis.
fn line_offset(hbar: Complex64) -> f64 {
    // poles of the integrand off the origin: p = i m and p = i m/ℏ
    0.5 * (1.0f64).min((1.0 / hbar).re)
}

/// Trapezoid rule for ∫ f(x + iσc) dx over the line, refined by halving.
fn line_integral(kind: Kernel, z: Complex64, planck: Planck, sigma: f64) -> Result<EvalResult> {
    let hbar = planck.hbar;
    let c = line_offset(hbar);
    let rate = planck.strip() - z.im.abs();
    if rate < 0.05 {
        return Err(Error::InvalidParam(format!("Im z = {} is outside the convergence strip", z.im)));
    }
    // |integrand| ≲ 4 e^{σ c Re z + π Im ℏ c} e^{−rate |x|}/(π c)²-ish
    let log_scale = (sigma * c * z.re).max(0.0) + PI * hbar.im.abs() * c + 2.0 * (1.0 / (PI * PI * c * c * hbar.norm())).ln().max(0.0);
    let x_max = (40.0 + log_scale) / rate;
    let f = |x: f64| integrand(kind, Complex64::new(x, sigma * c), z, hbar);
    let mut h = c / 3.0;
    let mut n = (x_max / h).ceil() as i64;
    let mut sum: Complex64 = (-n..=n).map(|j| f(j as f64 * h)).sum();
    let mut estimate = sum * h;
    for _ in 0..12 {
        // add midpoints
        let mid: Complex64 = (-n..n).map(|j| f((j as f64 + 0.5) * h)).sum();
        sum += mid;
        h /= 2.0;
        n *= 2;
        let next = sum * h;
        let delta = (next - estimate).norm();
        estimate = next;
        if delta <= 1e-13 * estimate.norm().max(1.0) {
            return Ok(EvalResult { value: estimate, err: delta });
        }
    }
    Err(Error::Reduction(format!("quadrature did not converge at z = {z}")))
}

/// Residue contribution at p = 0 when passing below the origin instead of
/// above: ∫_above = ∫_below − 2πi Res_{p=0}.
fn origin_correction(kind: Kernel, z: Complex64, hbar: Complex64) -> Complex64 {
    match kind {
        // −(πℏ/2)·(−2πi)·Res_0 [e^{−ipz}/(sh sh)], Res_0 = −iz/(π²ℏ)
        Kernel::Log => z,
        // −(1/4)·(−2πi)·Res_0 [e^{−ipz}/(p sh sh)], Res_0 = (−z²/2 − π²(1+ℏ²)/6)/(π²ℏ)
        Kernel::Dilog => z * z / (4.0 * PI * I * hbar) - PI * I / 12.0 * (hbar + 1.0 / hbar),
    }
}

fn direct(kind: Kernel, z: Complex64, planck: Planck, contour: Contour) -> Result<EvalResult> {
    let below = match contour {
        Contour::Above => false,
        Contour::Below => true,
        Contour::Auto => z.re > 0.0,
    };
    let prefactor = match kind {
        Kernel::Log => -PI * planck.hbar / 2.0,
        Kernel::Dilog => Complex64::new(-0.25, 0.0),
    };
    let r = line_integral(kind, z, planck, if below { -1.0 } else { 1.0 })?;
    let mut value = prefactor * r.value;
    if below {
        value += origin_correction(kind, z, planck.hbar);
    }
    Ok(EvalResult { value, err: prefactor.norm() * r.err })
}

/// φ^ℏ(z) by the integral on the chosen contour; |Im z| < π(1 + Re ℏ).
pub fn quantum_log_direct(z: Complex64, planck: Planck, contour: Contour) -> Result<EvalResult> {
    direct(Kernel::Log, z, planck, contour)
}

/// log Φ^ℏ(z) by the integral on the chosen contour; |Im z| < π(1 + Re ℏ).
pub fn log_quantum_dilog_direct(z: Complex64, planck: Planck, contour: Contour) -> Result<EvalResult> {
    direct(Kernel::Dilog, z, planck, contour)
}

/// One continuation step z ↦ z + shift with its multiplier data.
#[derive(Clone, Copy)]
struct Shift {
    amount: Complex64,
    /// true: the 2πiℏ shift (factor 1 + q e^w); false: the 2πi shift
    /// (factor 1 + q^∨ e^{w/ℏ}).
    by_hbar: bool,
}

/// Shifts that move z into |Im z| ≤ π min(1, ℏ) (real ℏ) or |Im z| ≤ π
/// (complex ℏ): returns the base point w and the shift sequence, with
/// z = w + Σ shifts.
fn reduce(z: Complex64, planck: Planck) -> (Complex64, Vec<(Shift, i32)>) {
    let two_pi_i = Shift { amount: 2.0 * PI * I, by_hbar: false };
    let two_pi_i_hbar = Shift { amount: 2.0 * PI * I * planck.hbar, by_hbar: true };
    let mut stages = vec![two_pi_i];
    if planck.is_real() {
        let h = planck.hbar.re;
        stages = if h >= 1.0 { vec![two_pi_i_hbar, two_pi_i] } else { vec![two_pi_i, two_pi_i_hbar] };
    }
    let mut w = z;
    let mut steps = Vec::new();
    for s in stages {
        let half = s.amount.im / 2.0;
        while w.im > half + 1e-12 {
            w -= s.amount;
            steps.push((s, 1));
        }
        while w.im < -half - 1e-12 {
            w += s.amount;
            steps.push((s, -1));
        }
    }
    (w, steps)
}

/// The multiplier of Φ across one shift: Φ(w + S) = Φ(w)·F(w).
fn shift_factor(s: Shift, w: Complex64, planck: Planck) -> Complex64 {
    if s.by_hbar {
        1.0 + planck.q() * w.exp()
    } else {
        1.0 + planck.q_dual() * (w / planck.hbar).exp()
    }
}

/// The increment of φ across one shift: φ(w + S) = φ(w) + T(w), with
/// T = 2πi·(shift/2πi)·F′/F.
fn shift_increment(s: Shift, w: Complex64, planck: Planck) -> Result<Complex64> {
    let (num, den) = if s.by_hbar {
        (2.0 * PI * I * planck.hbar, (-(w + I * PI * planck.hbar)).exp() + 1.0)
    } else {
        (2.0 * PI * I, (-(w + I * PI) / planck.hbar).exp() + 1.0)
    };
    if den.norm() < 1e-8 {
        return Err(Error::NearPole(format!("{w}")));
    }
    Ok(num / den)
}

/// Walk from the base point back to z, applying `step(shift, w, direction)`.
fn continue_from<T>(z: Complex64, planck: Planck, init: impl FnOnce(Complex64) -> Result<T>, mut step: impl FnMut(T, Shift, Complex64, i32) -> Result<T>) -> Result<T> {
    let (w0, steps) = reduce(z, planck);
    let mut acc = init(w0)?;
    let mut w = w0;
    for (s, dir) in steps.into_iter().rev() {
        if dir > 0 {
            // value at w + S from value at w
            acc = step(acc, s, w, 1)?;
            w += s.amount;
        } else {
            // value at w − S from value at w: divide by F(w − S)
            w -= s.amount;
            acc = step(acc, s, w, -1)?;
        }
    }
    Ok(acc)
}

/// φ^ℏ(z) for all z away from its poles.
pub fn quantum_log(z: Complex64, planck: Planck) -> Result<EvalResult> {
    continue_from(
        z,
        planck,
        |w| quantum_log_direct(w, planck, Contour::Auto),
        |acc, s, w, dir| {
            let t = shift_increment(s, w, planck)?;
            Ok(EvalResult { value: acc.value + f64::from(dir) * t, err: acc.err + 4.0 * f64::EPSILON * t.norm() })
        },
    )
}

/// Φ^ℏ(z) for all z away from its poles.
pub fn quantum_dilog(z: Complex64, planck: Planck) -> Result<EvalResult> {
    continue_from(
        z,
        planck,
        |w| {
            let l = log_quantum_dilog_direct(w, planck, Contour::Auto)?;
            let v = l.value.exp();
            Ok(EvalResult { value: v, err: v.norm() * l.err })
        },
        |acc, s, w, dir| {
            let f = shift_factor(s, w, planck);
            if dir > 0 {
                Ok(EvalResult { value: acc.value * f, err: acc.err * f.norm() })
            } else {
                if f.norm() < 1e-8 {
                    return Err(Error::NearPole(format!("{}", w)));
                }
                Ok(EvalResult { value: acc.value / f, err: acc.err / f.norm() })
            }
        },
    )
}

/// A logarithm of Φ^ℏ(z) (principal logarithms of the shift factors are
/// added outside the strip).
pub fn log_quantum_dilog(z: Complex64, planck: Planck) -> Result<EvalResult> {
    continue_from(
        z,
        planck,
        |w| log_quantum_dilog_direct(w, planck, Contour::Auto),
        |acc, s, w, dir| {
            let f = shift_factor(s, w, planck);
            if f.norm() < 1e-8 {
                return Err(Error::NearPole(format!("{w}")));
            }
            Ok(EvalResult { value: acc.value + f64::from(dir) * f.ln(), err: acc.err })
        },
    )
}

/// Φ^ℏ(z) = Ψ^q(e^z)/Ψ^{1/q^∨}(e^{z/ℏ}) with Ψ^Q(x) = Π_{k≥1}(1 + Q^{2k−1}x)^{−1},
/// for Im ℏ > 0 (so |q| < 1 and |1/q^∨| < 1).
pub fn quantum_dilog_product(z: Complex64, planck: Planck) -> Result<EvalResult> {
    if planck.hbar.im <= 0.0 {
        return Err(Error::InvalidParam("the product formula needs Im ℏ > 0".into()));
    }
    let q = planck.q();
    let qd_inv = 1.0 / planck.q_dual();
    // Π (1 + Q^{2k−1} x)
    let product = |big_q: Complex64, x: Complex64| -> Result<Complex64> {
        let q2 = big_q * big_q;
        let mut term = big_q * x;
        let mut p = Complex64::new(1.0, 0.0);
        for _ in 0..2_000_000 {
            p *= 1.0 + term;
            if term.norm() < 1e-18 {
                return Ok(p);
            }
            term *= q2;
        }
        Err(Error::Reduction("infinite product did not converge".into()))
    };
    let num = product(qd_inv, (z / planck.hbar).exp())?;
    let den = product(q, z.exp())?;
    if den.norm() < 1e-12 {
        return Err(Error::NearPole(format!("{z}")));
    }
    let value = num / den;
    Ok(EvalResult { value, err: 1e-15 * value.norm() * 64.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ph(h: f64) -> Planck {
        Planck::new(h).unwrap()
    }

    #[test]
    fn rejects_bad_hbar() {
        assert!(Planck::new(0.0).is_err());
        assert!(Planck::new(-1.0).is_err());
        assert!(Planck::new(f64::NAN).is_err());
        assert!(Planck::complex(c(-0.1, 0.3)).is_err());
    }

    #[test]
    fn dilog_at_origin_hbar_one() {
        let v = quantum_dilog(c(0.0, 0.0), ph(1.0)).unwrap().value;
        let expected = (-I * PI / 12.0).exp();
        assert!((v - expected).norm() < 1e-10, "{v}");
        assert!((v - c(0.965926, -0.258819)).norm() < 1e-6);
    }

    #[test]
    fn log_matches_closed_form_at_hbar_one() {
        for z in [c(1.0, 0.0), c(-1.0, 0.0), c(2.0, 0.5), c(-2.0, 0.5)] {
            let v = quantum_log(z, ph(1.0)).unwrap().value;
            let expected = z / (1.0 - (-z).exp());
            assert!((v - expected).norm() < 1e-9, "{z}: {v} vs {expected}");
        }
    }

    #[test]
    fn unimodular_on_real_line() {
        for h in [0.3, 0.7, 1.7] {
            for x in [-4.0, -1.0, 0.0, 0.5, 3.0, 8.0] {
                let v = quantum_dilog(c(x, 0.0), ph(h)).unwrap().value;
                assert!((v.norm() - 1.0).abs() < 1e-10, "ℏ = {h}, x = {x}");
            }
        }
    }

    #[test]
    fn contours_agree() {
        // the two sides of the origin differ exactly by the closed-form residue
        for h in [0.3, 1.0, 1.7] {
            for z in [c(-1.0, 0.3), c(0.5, -0.7), c(2.0, 1.0)] {
                for kind in [Kernel::Log, Kernel::Dilog] {
                    let a = direct(kind, z, ph(h), Contour::Above).unwrap().value;
                    let b = direct(kind, z, ph(h), Contour::Below).unwrap().value;
                    assert!((a - b).norm() < 1e-10, "{kind:?} ℏ = {h}, z = {z}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn integral_and_product_routes_agree() {
        for h in [c(0.7, 0.3), c(1.0, 0.3), c(0.4, 0.3)] {
            let p = Planck::complex(h).unwrap();
            for z in [c(-2.0, 0.0), c(-0.5, 0.4), c(0.0, 0.0), c(1.0, -0.3), c(2.0, 0.2)] {
                let a = log_quantum_dilog_direct(z, p, Contour::Auto).unwrap().value.exp();
                let b = quantum_dilog_product(z, p).unwrap().value;
                assert!((a - b).norm() < 1e-8 * b.norm().max(1.0), "ℏ = {h}, z = {z}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn continuation_is_consistent_with_direct_values() {
        // points inside the strip but outside the reduced band
        let p = ph(0.7);
        for z in [c(0.3, 2.5), c(-1.0, -3.0), c(1.0, 4.0)] {
            let a = log_quantum_dilog_direct(z, p, Contour::Auto).unwrap().value.exp();
            let b = quantum_dilog(z, p).unwrap().value;
            assert!((a - b).norm() < 1e-9 * b.norm().max(1.0), "{z}");
            let a = quantum_log_direct(z, p, Contour::Auto).unwrap().value;
            let b = quantum_log(z, p).unwrap().value;
            assert!((a - b).norm() < 1e-9 * b.norm().max(1.0), "{z}");
        }
    }

    #[test]
    fn pole_is_reported() {
        let p = ph(0.7);
        let pole = -I * PI * (1.0 + 0.7);
        assert!(matches!(quantum_dilog(pole, p), Err(Error::NearPole(_))));
        assert!(matches!(quantum_log(pole, p), Err(Error::NearPole(_))));
    }

    #[test]
    fn b0_limit() {
        let p = ph(0.7);
        let a = (quantum_dilog(c(-10.0, 0.5), p).unwrap().value - 1.0).norm();
        let b = (quantum_dilog(c(-20.0, 0.5), p).unwrap().value - 1.0).norm();
        assert!(b < a && b < 1e-6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn log_is_log_derivative(x in -3.0f64..3.0, y in -1.0f64..1.0, h in 0.3f64..2.0) {
            // 2πiℏ d log Φ/dz = φ, five-point stencil
            let p = ph(h);
            let z = c(x, y);
            let step = 1e-2;
            let l = |d: f64| log_quantum_dilog_direct(z + d, p, Contour::Above).unwrap().value;
            let deriv = (l(-2.0 * step) - 8.0 * l(-step) + 8.0 * l(step) - l(2.0 * step)) / (12.0 * step);
            let phi = quantum_log_direct(z, p, Contour::Above).unwrap().value;
            prop_assert!((2.0 * PI * I * h * deriv - phi).norm() < 1e-7);
        }

        #[test]
        fn reflection(x in -4.0f64..4.0, y in -1.0f64..1.0, h in 0.2f64..3.0) {
            // both sides on the defining contour, so the residue at 0 is not used
            let p = ph(h);
            let z = c(x, y);
            let f = |w| quantum_log_direct(w, p, Contour::Above).unwrap().value;
            let a = f(z) - f(-z);
            prop_assert!((a - z).norm() < 1e-9);
        }
    }
}
