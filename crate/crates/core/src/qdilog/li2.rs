//! The classical dilogarithm Li₂ on the principal branch (cut [1, ∞)).

use num_complex::Complex64;
use std::f64::consts::PI;

use super::EvalResult;

/// B_{2k} for k = 1..=10.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Li₂(z) = Σ_{n≥0} B_n u^{n+1}/(n+1)! with u = −log(1−z), valid for
/// |z| ≤ 1 and Re z ≤ ½ (then |u| < 1.3, well inside the radius 2π).
fn bernoulli_series(z: Complex64) -> Complex64 {
    let u = -(Complex64::new(1.0, 0.0) - z).ln();
    let u2 = u * u;
    // n = 0 and n = 1 terms
    let mut sum = u - u2 / 4.0;
    let mut power = u; // u^{2k+1}
    let mut fact = 1.0; // (2k+1)!
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let n = 2 * (k + 1) as i32;
        power *= u2;
        fact *= f64::from(n) * f64::from(n + 1);
        sum += power * (*b / fact);
    }
    sum
}

/// Complex dilogarithm Li₂(z) = −∫_0^z log(1−t) dt/t, reduced to the
/// Bernoulli series by inversion (|z| > 1) and reflection (Re z > ½).
pub fn li2(z: Complex64) -> EvalResult {
    let one = Complex64::new(1.0, 0.0);
    let zeta2 = PI * PI / 6.0;
    if z == Complex64::new(0.0, 0.0) {
        return EvalResult::exact(z);
    }
    if z == one {
        return EvalResult::exact(Complex64::new(zeta2, 0.0));
    }
    let value = if z.norm() > 1.0 {
        // Li₂(z) = −Li₂(1/z) − π²/6 − ½ log²(−z)
        let l = (-z).ln();
        -li2(one / z).value - zeta2 - l * l / 2.0
    } else if z.re > 0.5 {
        // Li₂(z) = −Li₂(1−z) + π²/6 − log z · log(1−z)
        -bernoulli_series(one - z) + zeta2 - z.ln() * (one - z).ln()
    } else {
        bernoulli_series(z)
    };
    EvalResult { value, err: 4.0 * f64::EPSILON * value.norm().max(1.0) }
}

/// L₂(x) = ∫_0^x log(1+t) dt/t = −Li₂(−x).
#[allow(non_snake_case)]
pub fn L2(x: Complex64) -> EvalResult {
    let r = li2(-x);
    EvalResult { value: -r.value, err: r.err }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Independent oracle: the defining power series Σ z^k/k².
    fn power_series(z: Complex64) -> Complex64 {
        let mut sum = c(0.0, 0.0);
        let mut p = z;
        for k in 1..20000 {
            let term = p / ((k * k) as f64);
            sum += term;
            if term.norm() < 1e-18 {
                break;
            }
            p *= z;
        }
        sum
    }

    #[test]
    fn special_values() {
        assert!((li2(c(1.0, 0.0)).value - c(PI * PI / 6.0, 0.0)).norm() < 1e-15);
        assert_eq!(li2(c(0.0, 0.0)).value, c(0.0, 0.0));
        // Li₂(½) = π²/12 − ½ log² 2
        let half = PI * PI / 12.0 - 0.5 * 2f64.ln().powi(2);
        assert!((li2(c(0.5, 0.0)).value.re - half).abs() < 1e-14);
    }

    #[test]
    fn minus_one_against_accelerated_series() {
        // η(2) partial sums averaged repeatedly (Euler transform)
        let mut partial = Vec::new();
        let mut s = 0.0;
        for k in 1..=40 {
            s += if k % 2 == 1 { -1.0 } else { 1.0 } / ((k * k) as f64);
            partial.push(s);
        }
        while partial.len() > 1 {
            partial = partial.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        }
        assert!((li2(c(-1.0, 0.0)).value.re - partial[0]).abs() < 1e-10);
        assert!((li2(c(-1.0, 0.0)).value.re + PI * PI / 12.0).abs() < 1e-14);
    }

    #[test]
    fn l2_derivative() {
        // d/dx L₂(x) = log(1+x)/x
        for x in [0.3, 1.0, 2.5, 7.0] {
            let h = 1e-5;
            let d = (L2(c(x + h, 0.0)).value - L2(c(x - h, 0.0)).value) / (2.0 * h);
            assert!((d.re - (1.0 + x).ln() / x).abs() < 1e-8, "{x}");
        }
    }

    proptest! {
        #[test]
        fn matches_power_series_inside_disc(r in 0.0f64..0.95, t in -3.14f64..3.14) {
            let z = Complex64::from_polar(r, t);
            prop_assert!((li2(z).value - power_series(z)).norm() < 1e-12);
        }

        #[test]
        fn derivative_matches(re in -6.0f64..6.0, im in -4.0f64..4.0) {
            // covers all three evaluation regions; stays off the cut [1, ∞)
            let z = c(re, im);
            prop_assume!((z - c(1.0, 0.0)).norm() > 0.2 && z.norm() > 0.1 && (re < 0.9 || im.abs() > 0.2));
            let h = 1e-5;
            let d = (li2(z + h).value - li2(z - h).value) / (2.0 * h);
            let expected = -(c(1.0, 0.0) - z).ln() / z;
            prop_assert!((d - expected).norm() < 1e-7);
        }

        #[test]
        fn continuous_across_region_boundaries(t in 0.05f64..3.1, y in -0.9f64..0.9) {
            // |z| = 1 (inversion) and Re z = ½ (reflection) pin the constants
            for s in [1.0, -1.0] {
                let z = Complex64::from_polar(1.0, s * t);
                prop_assert!((li2(z * (1.0 + 1e-12)).value - li2(z * (1.0 - 1e-12)).value).norm() < 1e-9);
            }
            let w = c(0.5, y);
            prop_assert!((li2(w + 1e-12).value - li2(w - 1e-12).value).norm() < 1e-9);
        }
    }
}
