//! Uniform grids in the logarithmic coordinates and the Fourier transform
//! F(f)(c) = ∫ e^{a c/2πiℏ} f(a) da along one axis, normalized so that the
//! inverse is (1/4π²ℏ) ∫ e^{−a c/2πiℏ} f̂(c) dc.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Samples on a uniform box grid in ℝ^dims (dims ≤ 2), row-major with
/// axis 0 slowest. Index i on an axis sits at center + (i − n/2)·spacing.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub n: usize,
    pub spacing: Vec<f64>,
    pub center: Vec<f64>,
    pub data: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(n: usize, spacing: Vec<f64>, center: Vec<f64>) -> Result<Self> {
        let dims = spacing.len();
        if dims == 0 || dims > 2 || center.len() != dims {
            return Err(Error::InvalidParam(format!("grids have 1 or 2 axes, got {dims}")));
        }
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidParam(format!("grid size must be even and at least 4, got {n}")));
        }
        if spacing.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
            return Err(Error::InvalidParam("grid spacing must be positive".into()));
        }
        Ok(GridFunction { n, spacing, center, data: vec![Complex64::new(0.0, 0.0); n.pow(dims as u32)] })
    }

    pub fn sample(n: usize, spacing: Vec<f64>, center: Vec<f64>, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        let mut g = Self::zeros(n, spacing, center)?;
        let dims = g.dims();
        let mut pt = vec![0.0; dims];
        for idx in 0..g.data.len() {
            for (ax, p) in pt.iter_mut().enumerate() {
                *p = g.coord(ax, g.axis_index(idx, ax));
            }
            g.data[idx] = f(&pt);
        }
        Ok(g)
    }

    pub fn dims(&self) -> usize {
        self.spacing.len()
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.center[axis] + (i as f64 - (self.n / 2) as f64) * self.spacing[axis]
    }

    pub fn axis_index(&self, idx: usize, axis: usize) -> usize {
        if self.dims() == 1 {
            idx
        } else if axis == 0 {
            idx / self.n
        } else {
            idx % self.n
        }
    }

    pub fn flat(&self, i: &[usize]) -> usize {
        if self.dims() == 1 {
            i[0]
        } else {
            i[0] * self.n + i[1]
        }
    }

    fn cell(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn norm(&self) -> f64 {
        (self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.cell()).sqrt()
    }

    /// ⟨f, g⟩ = ∫ f ḡ.
    pub fn inner(&self, other: &GridFunction) -> Complex64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b.conj()).sum::<Complex64>() * self.cell()
    }

    /// ‖f − g‖/‖g‖.
    pub fn relative_distance(&self, other: &GridFunction) -> f64 {
        let diff: f64 = self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = other.data.iter().map(|z| z.norm_sqr()).sum();
        (diff / den).sqrt()
    }

    /// Flat indices of the line along `axis` through transverse index `t`.
    pub fn line_indices(&self, axis: usize, t: usize) -> Vec<usize> {
        match (self.dims(), axis) {
            (1, _) => (0..self.n).collect(),
            (_, 0) => (0..self.n).map(|i| i * self.n + t).collect(),
            _ => (0..self.n).map(|i| t * self.n + i).collect(),
        }
    }

    /// Number of lines along an axis.
    pub fn line_count(&self) -> usize {
        if self.dims() == 1 {
            1
        } else {
            self.n
        }
    }

    /// Apply `f(t, line)` to every line along `axis` in place.
    pub fn map_lines(&mut self, axis: usize, mut f: impl FnMut(usize, &mut [Complex64]) -> Result<()>) -> Result<()> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n];
        for t in 0..self.line_count() {
            let idx = self.line_indices(axis, t);
            for (b, &i) in buf.iter_mut().zip(&idx) {
                *b = self.data[i];
            }
            f(t, &mut buf)?;
            for (b, &i) in buf.iter().zip(&idx) {
                self.data[i] = *b;
            }
        }
        Ok(())
    }
}

/// Centered discrete Fourier transform X_m = Σ_j x_j e^{∓2πi(j−n/2)(m−n/2)/n}
/// (unnormalized in both directions).
pub struct CenteredDft {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl CenteredDft {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        CenteredDft { n, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn process(&self, buf: &mut [Complex64], forward: bool) {
        // (j − n/2)(m − n/2) = jm − (n/2)(j + m) + n²/4
        let half_sign = if (self.n / 2) % 2 == 0 { 1.0 } else { -1.0 };
        for (j, x) in buf.iter_mut().enumerate() {
            if j % 2 == 1 {
                *x = -*x;
            }
        }
        if forward {
            self.forward.process(buf);
        } else {
            self.inverse.process(buf);
        }
        for (m, x) in buf.iter_mut().enumerate() {
            *x *= if m % 2 == 1 { -half_sign } else { half_sign };
        }
    }
}

/// Result of a grid Fourier transform with the spectral-edge monitor.
#[derive(Clone, Debug)]
pub struct FourierGrid {
    pub grid: GridFunction,
    /// Fraction of Σ|f̂|² in the outer sixteenth of the band on each side.
    pub edge_fraction: f64,
    pub aliasing: bool,
}

/// Spectral mass fraction above which the transform is flagged.
pub const ALIASING_THRESHOLD: f64 = 1e-8;

/// Dual spacing Δc = 4π²ℏ/(nΔ).
pub fn dual_spacing(n: usize, spacing: f64, hbar: f64) -> f64 {
    4.0 * PI * PI * hbar / (n as f64 * spacing)
}

/// F along `axis`; the transformed axis has center 0 and spacing Δc.
pub fn fourier_1d(g: &GridFunction, axis: usize, hbar: f64) -> Result<FourierGrid> {
    transform(g, axis, hbar, true, 0.0)
}

/// F⁻¹ along `axis`, producing samples centered at `center`.
pub fn inverse_fourier_1d(g: &GridFunction, axis: usize, hbar: f64, center: f64) -> Result<GridFunction> {
    Ok(transform(g, axis, hbar, false, center)?.grid)
}

fn transform(g: &GridFunction, axis: usize, hbar: f64, forward: bool, new_center: f64) -> Result<FourierGrid> {
    if axis >= g.dims() {
        return Err(Error::IndexOutOfRange { index: axis, rank: g.dims() });
    }
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::InvalidParam(format!("ℏ must be positive, got {hbar}")));
    }
    let n = g.n;
    let dft = CenteredDft::new(n);
    let step = g.spacing[axis];
    let dual = dual_spacing(n, step, hbar);
    let mut out = g.clone();
    out.spacing[axis] = dual;
    out.center[axis] = if forward { 0.0 } else { new_center };
    let kappa = 1.0 / (2.0 * PI * hbar);
    let half = (n / 2) as f64;
    if forward {
        // F(f)(c_m) = Δ e^{−i a₀ c_m κ} Σ_j f_j e^{−2πi j′m′/n}
        let a0 = g.center[axis];
        out.map_lines(axis, |_, line| {
            dft.process(line, true);
            for (m, x) in line.iter_mut().enumerate() {
                let c = (m as f64 - half) * dual;
                *x *= step * Complex64::from_polar(1.0, -a0 * c * kappa);
            }
            Ok(())
        })?;
    } else {
        // f(a_j) = (Δc/4π²ℏ) Σ_m f̂_m e^{i a_j c_m κ}
        let a0 = new_center;
        out.map_lines(axis, |_, line| {
            for (m, x) in line.iter_mut().enumerate() {
                let c = (m as f64 - half) * step;
                *x *= Complex64::from_polar(1.0, a0 * c * kappa);
            }
            dft.process(line, false);
            for x in line.iter_mut() {
                *x *= step * kappa / (2.0 * PI);
            }
            Ok(())
        })?;
    }
    let edge = n / 16;
    let mut total = 0.0;
    let mut outer = 0.0;
    let spectrum = if forward { &out } else { g };
    for t in 0..spectrum.line_count() {
        for (m, &i) in spectrum.line_indices(axis, t).iter().enumerate() {
            let v = spectrum.data[i].norm_sqr();
            total += v;
            if m < edge || m >= n - edge {
                outer += v;
            }
        }
    }
    let edge_fraction = if total > 0.0 { outer / total } else { 0.0 };
    Ok(FourierGrid { grid: out, edge_fraction, aliasing: edge_fraction > ALIASING_THRESHOLD })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_grid(n: usize, step: f64, a0: f64) -> GridFunction {
        GridFunction::sample(n, vec![step], vec![a0], |a| Complex64::new((-(a[0] - 0.3).powi(2) / 2.0).exp(), 0.0)).unwrap()
    }

    #[test]
    fn gaussian_transform_closed_form() {
        // ∫ e^{−iac/2πℏ} e^{−(a−s)²/2} da = √(2π) e^{−iκcs} e^{−κ²c²/2}
        let hbar = 0.6;
        let g = gaussian_grid(256, 0.1, 0.5);
        let f = fourier_1d(&g, 0, hbar).unwrap();
        assert!(!f.aliasing);
        let kappa = 1.0 / (2.0 * PI * hbar);
        for m in [100, 128, 140, 160] {
            let c = f.grid.coord(0, m);
            let exact = (2.0 * PI).sqrt() * Complex64::from_polar((-kappa * kappa * c * c / 2.0).exp(), -kappa * c * 0.3);
            assert!((f.grid.data[m] - exact).norm() < 1e-12, "{m}");
        }
    }

    #[test]
    fn inverse_round_trip_and_parseval() {
        let hbar = 0.7;
        let g = GridFunction::sample(128, vec![0.15, 0.15], vec![0.2, -0.1], |a| {
            Complex64::new((-(a[0] * a[0] + a[1] * a[1]) / 2.0).exp(), a[1] * (-(a[1] * a[1])).exp())
        })
        .unwrap();
        for axis in 0..2 {
            let f = fourier_1d(&g, axis, hbar).unwrap();
            let back = inverse_fourier_1d(&f.grid, axis, hbar, g.center[axis]).unwrap();
            assert!(back.relative_distance(&g) < 1e-10);
            // ‖F f‖² = 4π²ℏ ‖f‖²
            let ratio = f.grid.norm().powi(2) / (4.0 * PI * PI * hbar * g.norm().powi(2));
            assert!((ratio - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn aliasing_is_flagged() {
        // a narrow spike has a flat spectrum reaching the band edge
        let g = GridFunction::sample(64, vec![0.5], vec![0.0], |a| Complex64::new((-a[0] * a[0] * 20.0).exp(), 0.0)).unwrap();
        assert!(fourier_1d(&g, 0, 1.0).unwrap().aliasing);
    }

    #[test]
    fn shape_errors() {
        assert!(GridFunction::zeros(7, vec![0.1], vec![0.0]).is_err());
        assert!(GridFunction::zeros(8, vec![0.1; 3], vec![0.0; 3]).is_err());
        let g = gaussian_grid(16, 0.5, 0.0);
        assert!(fourier_1d(&g, 1, 1.0).is_err());
    }
}
