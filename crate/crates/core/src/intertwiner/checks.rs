//! Numerical evidence for the intertwiner: commutation with the quantum
//! mutation, scalar composites along relations, the integral kernel of K⁻¹,
//! Langlands self-duality of the multiplier, and the difference system.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use super::grid::GridFunction;
use super::kernel::{Direction, GridIntertwiner, Lattice, PhaseForm};
use super::operators::{DiffOperator, Heisenberg};
use super::wfunction::{WFunction, WSum};
use crate::cluster::{ClusterTransformation, Space};
use crate::error::{Error, Result};
use crate::feed::Feed;
use crate::qdilog::{quantum_dilog, Planck};
use crate::quantum::mutation::{quantum_mutation, QuantumMap};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Default grid size per axis.
pub const DEFAULT_GRID: usize = 2048;

/// Transverse sample positions (before rounding to the lattice).
const TRANSVERSE: [f64; 8] = [-2.0, -1.43, -0.86, -0.29, 0.29, 0.86, 1.43, 2.0];

/// Elements A with μ♯_k(A) again a Laurent polynomial, for which
/// K♯Â = (μ♯_k A)^K♯ is checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CommutationItem {
    /// [1] B_i^{±1}, i ≠ k
    TransverseB { i: usize, sign: i32 },
    /// [2] B_k(1 + q_k X̃_k) ↦ B_k(1 + q_k X_k)
    Two,
    /// [3] (1 + q_k X_k)B_k^{−1} ↦ (1 + q_k X̃_k)B_k^{−1}
    Three,
    /// [4] X_k^{±1}
    XPower(i32),
    /// [8] X_i for ε_ik ≤ 0 ↦ X_i Π_{a=1}^{|ε_ik|}(1 + q_k^{2a−1}X_k)
    TransverseX(usize),
}

impl CommutationItem {
    pub fn label(&self) -> String {
        match self {
            CommutationItem::TransverseB { i, sign } => format!("[1] B{}^{}", i + 1, sign),
            CommutationItem::Two => "[2] B_k(1+q_k X~_k)".into(),
            CommutationItem::Three => "[3] (1+q_k X_k)B_k^-1".into(),
            CommutationItem::XPower(s) => format!("[4] X_k^{s}"),
            CommutationItem::TransverseX(i) => format!("[8] X{}", i + 1),
        }
    }

    /// The items applicable to direction k of the feed.
    pub fn applicable(feed: &Feed, k: usize) -> Vec<CommutationItem> {
        let mut out = vec![CommutationItem::Two, CommutationItem::Three, CommutationItem::XPower(1), CommutationItem::XPower(-1)];
        for i in 0..feed.rank() {
            if i != k {
                out.push(CommutationItem::TransverseB { i, sign: 1 });
                out.push(CommutationItem::TransverseB { i, sign: -1 });
                if feed.eps(i, k) <= 0 {
                    out.push(CommutationItem::TransverseX(i));
                }
            }
        }
        out
    }
}

fn transverse_offsets(lattice: &Lattice, rank: usize) -> Vec<i64> {
    if rank == 1 {
        vec![0]
    } else {
        TRANSVERSE.iter().map(|x| (x / lattice.step).round() as i64).collect()
    }
}

/// How the right-hand side (μ♯A)^K♯w is assembled in the dual variable c.
struct RightSide {
    /// evaluate ŵ at c + iγ
    gamma: f64,
    /// evaluate ŵ (and α_k^±) at a_i + iθ in the transverse slot
    theta: f64,
    /// extra factor at the shifted Φ arguments (x⁺, x⁻)
    extra: Box<dyn Fn(Complex64, Complex64) -> Complex64>,
    /// multiplication after returning to the a-side: (a_k, a_i) ↦ factor
    post: Box<dyn Fn(f64, f64) -> Complex64>,
}

/// ‖K♯Âw − (μ♯_k A)^ K♯w‖₂/‖K♯Âw‖₂ on the grid, over eight transverse
/// slices. Âw is evaluated exactly; K♯ on the left is the grid operator,
/// while the right side uses the exact transform of w.
pub fn commutation_residual(feed: &Feed, k: usize, hbar: f64, item: CommutationItem, w: &WFunction, n: usize) -> Result<f64> {
    use DiffOperator::*;
    let rank = feed.rank();
    if w.nvars() != rank {
        return Err(Error::InvalidParam("test function rank differs from the feed".into()));
    }
    let lattice = Lattice::new(feed, hbar, n)?;
    let mut gi = GridIntertwiner::new(lattice);
    let dir = Direction::new(feed, k, &lattice)?;
    let h = Heisenberg::new(feed, hbar)?;
    let qk = h.q_p(k);
    let hk = h.hbar_p(k);
    let other = if rank == 2 { Some(1 - k) } else { None };
    let need_other = |i: usize| -> Result<usize> {
        match other {
            Some(j) if j == i => Ok(j),
            _ => Err(Error::InvalidParam(format!("item needs a transverse index ≠ {k}, got {i}"))),
        }
    };
    let one = Complex64::new(1.0, 0.0);
    let no_post: Box<dyn Fn(f64, f64) -> Complex64> = Box::new(move |_, _| one);
    let (lhs_op, rhs): (DiffOperator, RightSide) = match item {
        CommutationItem::TransverseB { i, sign } => {
            need_other(i)?;
            let op = if sign > 0 { B(i) } else { BInv(i) };
            let s = f64::from(sign.signum());
            (op, RightSide { gamma: 0.0, theta: 0.0, extra: Box::new(move |_, _| one), post: Box::new(move |_, ai| (s * ai).exp().into()) })
        }
        CommutationItem::Two => (
            Product(vec![B(k), Sum(vec![Scalar(one), Product(vec![Scalar(qk), XTilde(k)])])]),
            // B̂_k moves c to c + 2πiℏ (multiplying by e^{a_k} after the
            // inverse transform would amplify the grid's aliasing floor)
            RightSide { gamma: 2.0 * PI * hbar, theta: 0.0, extra: Box::new(move |xp, _| 1.0 + qk * xp.exp()), post: no_post },
        ),
        CommutationItem::Three => (
            Product(vec![Sum(vec![Scalar(one), Product(vec![Scalar(qk), X(k)])]), BInv(k)]),
            // B̂_k⁻¹ moves c to c − 2πiℏ, i.e. the Φ arguments by +2πiℏ_k
            RightSide {
                gamma: -2.0 * PI * hbar,
                theta: 0.0,
                extra: Box::new(move |_, xm| 1.0 + qk * (xm - 2.0 * PI * I * hk).exp()),
                post: no_post,
            },
        ),
        CommutationItem::XPower(s) => {
            let op = if s > 0 { X(k) } else { XInv(k) };
            let s = f64::from(s.signum());
            (op, RightSide { gamma: 0.0, theta: 0.0, extra: Box::new(move |xp, _| (s * xp).exp()), post: no_post })
        }
        CommutationItem::TransverseX(i) => {
            need_other(i)?;
            let e = feed.eps(i, k);
            if e > 0 {
                return Err(Error::InvalidParam(format!("item [8] needs ε_ik ≤ 0, got {e}")));
            }
            let factors: Vec<Complex64> = (1..=-e).map(|a| qk.powf((2 * a - 1) as f64)).collect();
            (
                X(i),
                RightSide {
                    gamma: 0.0,
                    theta: 2.0 * PI * h.hbar_p(i),
                    extra: Box::new(move |xp, _| factors.iter().map(|f| 1.0 + f * xp.exp()).product()),
                    post: no_post,
                },
            )
        }
    };
    let lhs_w = lhs_op.apply(&h, &WSum::from(w.clone()))?;
    let w_hat = w.fourier(k, hbar);
    let step = lattice.step;
    // imaginary parts of the Φ arguments on the right side
    let shift_of = |plus: bool| -> f64 {
        let coeff = match other {
            Some(j) => {
                let e = dir.eps_row[j];
                (if plus { e.max(0) } else { (-e).max(0) }) as f64
            }
            None => 0.0,
        };
        -rhs.gamma / dir.d_k as f64 - coeff * rhs.theta
    };
    let (yp, ym) = (shift_of(true), shift_of(false));
    gi.prepare(&dir)?;
    let half = (n / 2) as i64;
    let reach = half * dir.ratio + half * dir.eps_row.iter().map(|e| e.abs()).sum::<i64>() + 1;
    for y in [yp, ym] {
        gi.tables.ensure(dir.d_k, y, -reach, reach)?;
    }
    let c_step = lattice.c_step();
    let mut num = 0.0;
    let mut den = 0.0;
    for o in transverse_offsets(&lattice, rank) {
        let mut tr = vec![0i64; rank];
        if let Some(j) = other {
            tr[j] = o;
        }
        let aj = o as f64 * step;
        let point = |ak: Complex64, aj: Complex64| -> Vec<Complex64> {
            let mut p = vec![ak; rank];
            if let Some(j) = other {
                p[j] = aj;
            }
            p
        };
        // left: K♯ applied on the grid to exact samples of Âw
        let mut left: Vec<Complex64> = (0..n).map(|i| lhs_w.eval(&point(lattice.coord(i).into(), aj.into()))).collect();
        gi.sharp_line(&dir, &mut left, &tr, false);
        // right: exact ŵ times the transformed multiplier, back by the DFT
        let ip = dir.alpha_index(&tr, true);
        let im = dir.alpha_index(&tr, false);
        let mut right: Vec<Complex64> = (0..n)
            .map(|m| {
                let mo = lattice.offset(m);
                let (p, q) = (dir.argument_index(mo, ip), dir.argument_index(mo, im));
                let xp = Complex64::new(p as f64 * step, yp);
                let xm = Complex64::new(q as f64 * step, ym);
                let ratio = gi.tables.at(dir.d_k, yp, p) / gi.tables.at(dir.d_k, ym, q);
                let c = Complex64::new(mo as f64 * c_step, rhs.gamma);
                let wh = w_hat.eval(&point(c, Complex64::new(aj, rhs.theta)));
                (rhs.extra)(xp, xm) * ratio * wh / step
            })
            .collect();
        gi.dft().process(&mut right, false);
        for (i, x) in right.iter_mut().enumerate() {
            *x *= (rhs.post)(lattice.coord(i), aj) / n as f64;
        }
        for (l, r) in left.iter().zip(&right) {
            num += (l - r).norm_sqr();
            den += l.norm_sqr();
        }
    }
    Ok((num / den).sqrt())
}

/// Composite intertwiner along a transformation, compared with a scalar.
#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    /// λ estimates ⟨Kw, w⟩/⟨w, w⟩ per test function, as [re, im]
    pub lambdas: Vec<[f64; 2]>,
    /// max ||λ| − 1|
    pub abs_dev: f64,
    /// max |arg(λ_i/λ_j)|
    pub phase_spread: f64,
    /// max ‖Kw − λw‖/‖w‖
    pub deviation: f64,
    /// whether the transformation returns to its source feed
    pub closed: bool,
    pub grid: usize,
}

impl RelationReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.closed && self.abs_dev < tol && self.phase_spread < tol && self.deviation < tol
    }
}

/// Two independent test functions on a rank-n lattice.
pub fn default_tests(rank: usize) -> Result<Vec<WFunction>> {
    use super::wfunction::Poly;
    let g1 = WFunction::gaussian(1.0, &vec![0.2; rank])?;
    let mut p = Poly::constant(rank, Complex64::new(1.0, 0.0));
    p.add_term(
        {
            let mut e = vec![0; rank];
            e[0] = 1;
            e
        },
        Complex64::new(0.5, 0.3),
    );
    let b: Vec<Complex64> = (0..rank).map(|i| Complex64::new(if i == 0 { -0.4 } else { 0.3 }, 0.0)).collect();
    let g2 = WFunction::new(vec![0.7; rank], b, p)?;
    Ok(vec![g1, g2])
}

fn sample_on(lattice: &Lattice, w: &WFunction) -> Result<GridFunction> {
    lattice.sample(w.nvars(), |a| w.eval_real(a))
}

/// Compose the intertwiners along `t` and estimate the scalar λ against
/// each test function.
pub fn verify_relation_numeric(t: &ClusterTransformation, hbar: f64, tests: &[WFunction], n: usize) -> Result<RelationReport> {
    if tests.len() < 2 {
        return Err(Error::InvalidParam("λ needs at least two test functions".into()));
    }
    let lattice = Lattice::new(&t.source, hbar, n)?;
    let mut gi = GridIntertwiner::new(lattice);
    let closed = t.target()? == t.source;
    let mut lambdas = Vec::new();
    let mut deviation: f64 = 0.0;
    for w in tests {
        let g = sample_on(&lattice, w)?;
        let v = gi.transformation(t, &g)?;
        let lambda = v.inner(&g) / g.inner(&g);
        let resid = GridFunction { data: v.data.iter().zip(&g.data).map(|(a, b)| a - lambda * b).collect(), ..g.clone() };
        deviation = deviation.max(resid.norm() / g.norm());
        lambdas.push(lambda);
    }
    let abs_dev = lambdas.iter().map(|l| (l.norm() - 1.0).abs()).fold(0.0, f64::max);
    let mut phase_spread: f64 = 0.0;
    for a in &lambdas {
        for b in &lambdas {
            phase_spread = phase_spread.max((a / b).arg().abs());
        }
    }
    Ok(RelationReport { lambdas: lambdas.iter().map(|l| [l.re, l.im]).collect(), abs_dev, phase_spread, deviation, closed, grid: n })
}

/// ‖Kg‖/‖g‖ − 1 for the full intertwiner K = K♯∘K′, worst over directions
/// and five Gaussian inputs.
pub fn unitarity_defect(feed: &Feed, hbar: f64, n: usize) -> Result<f64> {
    let lattice = Lattice::new(feed, hbar, n)?;
    let mut gi = GridIntertwiner::new(lattice);
    let rank = feed.rank();
    let mut worst: f64 = 0.0;
    for (s, width) in [0.8, 1.0, 1.2, 0.9, 1.5].iter().enumerate() {
        let center: Vec<f64> = (0..rank).map(|i| 0.4 * (s as f64 - 2.0) * if i == 0 { 1.0 } else { -0.7 }).collect();
        let g = lattice.sample(rank, |a| {
            let r2: f64 = a.iter().zip(&center).map(|(x, c)| (x - c).powi(2)).sum();
            Complex64::from_polar((-r2 / (2.0 * width * width)).exp(), 0.2 * s as f64 * a[0])
        })?;
        for k in 0..rank {
            let v = gi.mutation(feed, k, &g)?;
            worst = worst.max((v.norm() / g.norm() - 1.0).abs());
        }
    }
    Ok(worst)
}

/// The smooth part of the kernel of K⁻¹.
///
/// K⁻¹f(a′) = ∫ G(a′_k + a_k) f(a_k) da_k with
/// G(s) = (1/4π²ℏ) ∫ R(c)⁻¹ e^{c(s − α_k^−)/2πiℏ} dc and R the K♯ multiplier.
/// Since R⁻¹ → 1 as c → +∞, G = δ(s − α_k^−) + G₁ where G₁ uses R⁻¹ − 1.
/// On a line Im s = y > 0 the c-integrand of G₁ carries e^{cy/2πℏ}: it
/// decays at c → −∞, where R⁻¹ is unimodular, and at c → +∞ as long as
/// y/2πℏ stays below the rate r = min(1, 1/ℏ_k)/d_k at which R⁻¹ − 1
/// vanishes. We take y/2πℏ = r/4: a larger y would amplify the absolute
/// error of Φ near 1 by e^{cy/2πℏ} before the true tail has died out.
#[derive(Clone, Debug)]
pub struct KernelG {
    pub hbar: f64,
    pub alpha_minus: f64,
    /// Im s of the evaluation line
    pub height: f64,
    c_step: f64,
    /// (c, (R⁻¹(c) − 1)·e^{c·height/2πℏ})
    samples: Vec<(f64, Complex64)>,
}

impl KernelG {
    fn rate(hbar_k: f64, d_k: f64) -> f64 {
        (1.0f64).min(1.0 / hbar_k) / d_k
    }

    /// Im s of the evaluation line.
    pub fn height(hbar: f64, hbar_k: f64, d_k: f64) -> f64 {
        0.25 * Self::rate(hbar_k, d_k) * 2.0 * PI * hbar
    }

    /// Sample index range [lo, hi] for c = m·c_step: the integrand is
    /// below e^{−25} of its scale outside.
    pub fn range(hbar_k: f64, d_k: f64, c_step: f64) -> (i64, i64) {
        let r = Self::rate(hbar_k, d_k);
        (-(100.0 / (r * c_step)).ceil() as i64, (34.0 / (r * c_step)).ceil() as i64)
    }

    /// `inverse_ratio(m)` returns R(c_m)⁻¹ at c_m = m·c_step.
    pub fn build(
        hbar: f64,
        hbar_k: f64,
        d_k: f64,
        alpha_minus: f64,
        c_step: f64,
        mut inverse_ratio: impl FnMut(i64) -> Result<Complex64>,
    ) -> Result<Self> {
        let height = Self::height(hbar, hbar_k, d_k);
        let (lo, hi) = Self::range(hbar_k, d_k, c_step);
        let kappa = 1.0 / (2.0 * PI * hbar);
        let mut samples = Vec::with_capacity((hi - lo + 1) as usize);
        for m in lo..=hi {
            let c = m as f64 * c_step;
            samples.push((c, (inverse_ratio(m)? - 1.0) * (c * height * kappa).exp()));
        }
        Ok(KernelG { hbar, alpha_minus, height, c_step, samples })
    }

    /// G₁(σ + i·height).
    pub fn smooth(&self, sigma: f64) -> Complex64 {
        let kappa = 1.0 / (2.0 * PI * self.hbar);
        let phase = -kappa * (sigma - self.alpha_minus);
        let sum: Complex64 = self.samples.iter().map(|(c, v)| v * Complex64::from_polar(1.0, phase * c)).sum();
        sum * self.c_step * kappa / (2.0 * PI)
    }
}

/// G₁ at the point: a_k is taken as a_k + i·height, the transverse
/// coordinates as given (direct Φ evaluations, no lattice).
pub fn kernel_g(feed: &Feed, k: usize, hbar: f64, point: &[f64]) -> Result<(Complex64, f64)> {
    let h = Heisenberg::new(feed, hbar)?;
    if k >= feed.rank() || point.len() != feed.rank() {
        return Err(Error::InvalidParam("point and direction must match the feed rank".into()));
    }
    let dot = |c: Vec<f64>| -> f64 { c.iter().zip(point).enumerate().filter(|(j, _)| *j != k).map(|(_, (a, b))| a * b).sum() };
    let (ap, am) = (dot(h.alpha_plus(k)), dot(h.alpha_minus(k)));
    let hk = h.hbar_p(k);
    let planck = Planck::new(hk)?;
    let c_step = 0.1 * h.d[k];
    let g = KernelG::build(hbar, hk, h.d[k], am, c_step, |m| {
        let x = -(m as f64) * c_step / h.d[k];
        if ap == am {
            return Ok(Complex64::new(1.0, 0.0));
        }
        Ok(quantum_dilog(Complex64::new(x - am, 0.0), planck)?.value / quantum_dilog(Complex64::new(x - ap, 0.0), planck)?.value)
    })?;
    Ok((g.smooth(point[k]), g.height))
}

/// Relative L² difference between K⁻¹w computed on the grid as K′∘(K♯)⁻¹
/// and as the integral operator e^{iΓ(a′)}∫(δ + G₁)(a′_k + a_k)w(a_k)da_k,
/// with Γ the phase of K′, over eight transverse slices.
pub fn kernel_g_consistency(feed: &Feed, k: usize, hbar: f64, w: &WFunction, n: usize) -> Result<f64> {
    let rank = feed.rank();
    if w.nvars() != rank {
        return Err(Error::InvalidParam("test function rank differs from the feed".into()));
    }
    let lattice = Lattice::new(feed, hbar, n)?;
    let mut gi = GridIntertwiner::new(lattice);
    let dir = Direction::new(feed, k, &lattice)?;
    let h = Heisenberg::new(feed, hbar)?;
    let form = PhaseForm::new(feed, hbar);
    let other = if rank == 2 { Some(1 - k) } else { None };
    let step = lattice.step;
    let ni = n as i64;
    // grid route on the whole lattice
    let sampled = sample_on(&lattice, w)?;
    let grid_route = gi.inverse_mutation(feed, k, &sampled)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for o in transverse_offsets(&lattice, rank) {
        let mut tr = vec![0i64; rank];
        let mut line_t = 0;
        if let Some(j) = other {
            tr[j] = o;
            line_t = (o + ni / 2) as usize;
        }
        let aj = o as f64 * step;
        let eval = |ak: Complex64| -> Complex64 {
            let mut p = vec![ak; rank];
            if let Some(j) = other {
                p[j] = aj.into();
            }
            w.eval(&p)
        };
        let am_idx = dir.alpha_index(&tr, false);
        let ip = dir.alpha_index(&tr, true);
        let (lo, hi) = KernelG::range(h.hbar_p(k), h.d[k], dir.d_k as f64 * step);
        let spread = ip.abs() + am_idx.abs() + 1;
        gi.tables.ensure(dir.d_k, 0.0, -hi - spread, -lo + spread)?;
        let g = KernelG::build(hbar, h.hbar_p(k), h.d[k], am_idx as f64 * step, dir.d_k as f64 * step, |m| {
            let (p, q) = (-m - ip, -m - am_idx);
            Ok(if p == q { Complex64::new(1.0, 0.0) } else { gi.tables.at(dir.d_k, 0.0, q) / gi.tables.at(dir.d_k, 0.0, p) })
        })?;
        // contour shifted to Im a_k = y, where G₁ is analytic
        let y = g.height;
        let shifted: Vec<Complex64> = (0..n).map(|i| eval(Complex64::new(lattice.coord(i), y))).collect();
        let peak = shifted.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let support: Vec<usize> = (0..n).filter(|&i| shifted[i].norm() > 1e-17 * peak).collect();
        let g_values: Vec<Complex64> = (0..=2 * n).map(|s| g.smooth((s as i64 - ni) as f64 * step)).collect();
        let idx = grid_route.line_indices(k, line_t);
        let mut point: Vec<f64> = tr.iter().map(|&x| x as f64 * step).collect();
        for (ip2, &flat) in idx.iter().enumerate() {
            let a_prime = lattice.coord(ip2);
            let reflected = am_idx as f64 * step - a_prime;
            point[k] = a_prime;
            let before = form.value(&point);
            point[k] = reflected;
            let phase = Complex64::from_polar(1.0, form.value(&point) - before);
            let conv: Complex64 = support.iter().map(|&i| g_values[ip2 + i] * shifted[i]).sum::<Complex64>() * step;
            let kr = phase * (eval(reflected.into()) + conv);
            let gr = grid_route.data[flat];
            num += (kr - gr).norm_sqr();
            den += gr.norm_sqr();
        }
    }
    Ok((num / den).sqrt())
}

/// |G₁(α_k^− + σ + iy)| at the given offsets σ, transverse coordinates
/// near 1 (at 0 the multiplier is trivial and G₁ vanishes).
pub fn kernel_g_profile(feed: &Feed, k: usize, hbar: f64, offsets: &[f64]) -> Result<Vec<f64>> {
    let lattice = Lattice::new(feed, hbar, 256)?;
    let mut gi = GridIntertwiner::new(lattice);
    let dir = Direction::new(feed, k, &lattice)?;
    let h = Heisenberg::new(feed, hbar)?;
    let mut tr = vec![(1.0 / lattice.step).round() as i64; feed.rank()];
    tr[k] = 0;
    let (ip, im) = (dir.alpha_index(&tr, true), dir.alpha_index(&tr, false));
    let (lo, hi) = KernelG::range(h.hbar_p(k), h.d[k], dir.d_k as f64 * lattice.step);
    let spread = ip.abs() + im.abs() + 1;
    gi.tables.ensure(dir.d_k, 0.0, -hi - spread, -lo + spread)?;
    let g = KernelG::build(hbar, h.hbar_p(k), h.d[k], im as f64 * lattice.step, dir.d_k as f64 * lattice.step, |m| {
        let (p, q) = (-m - ip, -m - im);
        Ok(if p == q { Complex64::new(1.0, 0.0) } else { gi.tables.at(dir.d_k, 0.0, q) / gi.tables.at(dir.d_k, 0.0, p) })
    })?;
    Ok(offsets.iter().map(|s| g.smooth(im as f64 * lattice.step + s).norm()).collect())
}

/// max |R − R^∨| where R^∨ is the K♯ multiplier rebuilt from
/// (1/ℏ_k, x/ℏ_k): Φ^{ℏ}(x) = Φ^{1/ℏ}(x/ℏ) makes them equal.
pub fn langlands_residual(feed: &Feed, k: usize, hbar: f64, n: usize) -> Result<f64> {
    let lattice = Lattice::new(feed, hbar, n)?;
    let mut gi = GridIntertwiner::new(lattice);
    let dir = Direction::new(feed, k, &lattice)?;
    gi.prepare(&dir)?;
    let hk = hbar / dir.d_k as f64;
    let dual = Planck::new(1.0 / hk)?;
    let rank = feed.rank();
    let mut worst: f64 = 0.0;
    for o in [-3i64, 0, 4] {
        let mut tr = vec![0i64; rank];
        if rank == 2 {
            tr[1 - k] = o;
        }
        let (ip, im) = (dir.alpha_index(&tr, true), dir.alpha_index(&tr, false));
        for m in 0..n {
            let mo = lattice.offset(m);
            if (mo as f64 * lattice.c_step()).abs() > 12.0 {
                continue;
            }
            let (p, q) = (dir.argument_index(mo, ip), dir.argument_index(mo, im));
            let r = gi.sharp_multiplier(&dir, m, &tr);
            let phi = |j: i64| -> Result<Complex64> { Ok(quantum_dilog(Complex64::new(j as f64 * lattice.step / hk, 0.0), dual)?.value) };
            let rd = if p == q { Complex64::new(1.0, 0.0) } else { phi(p)? / phi(q)? };
            worst = worst.max((r - rd).norm());
        }
    }
    Ok(worst)
}

/// The holonomic system defining the kernel: for each generator A of the
/// D-torus of μ_k(i), the pair (A, κ(A)) with κ the quantum mutation.
#[derive(Clone, Debug)]
pub struct DifferenceSystem {
    pub pairs: Vec<(String, String)>,
    pub map: QuantumMap,
}

pub fn emit_difference_system(feed: &Feed, k: usize) -> Result<DifferenceSystem> {
    let map = quantum_mutation(feed, k, Space::D)?;
    Ok(DifferenceSystem { pairs: map.display(), map })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::mutation;

    fn w2() -> WFunction {
        default_tests(2).unwrap().remove(1)
    }

    #[test]
    fn commutation_items_rank2() {
        for p in [1, 2] {
            let feed = Feed::rank2(p);
            for k in 0..2 {
                for item in CommutationItem::applicable(&feed, k) {
                    let r = commutation_residual(&feed, k, 0.7, item, &w2(), 256).unwrap();
                    assert!(r < 1e-5, "p={p} k={k} {}: {r:e}", item.label());
                }
            }
        }
    }

    #[test]
    fn wrong_image_is_detected() {
        // B_k alone is not carried to B_k by K♯
        let feed = Feed::rank2(1);
        let r = commutation_residual(&feed, 0, 0.7, CommutationItem::TransverseB { i: 1, sign: 1 }, &w2(), 256).unwrap();
        assert!(r < 1e-5);
        assert!(commutation_residual(&feed, 0, 0.7, CommutationItem::TransverseB { i: 0, sign: 1 }, &w2(), 256).is_err());
        assert!(commutation_residual(&feed, 1, 0.7, CommutationItem::TransverseX(0), &w2(), 256).is_err());
    }

    #[test]
    fn polygon_relations_are_scalar() {
        let tests = default_tests(2).unwrap();
        for p in [0, 1] {
            let t = ClusterTransformation::polygon_relation(p).unwrap();
            let r = verify_relation_numeric(&t, 0.7, &tests, 256).unwrap();
            assert!(r.passes(1e-3), "p={p}: {r:?}");
        }
        let single = ClusterTransformation::rank2_word(1, 1);
        let r = verify_relation_numeric(&single, 0.7, &tests, 256).unwrap();
        assert!(r.deviation > 0.1, "{r:?}");
        assert!(!r.passes(1e-3));
    }

    #[test]
    fn unitarity() {
        assert!(unitarity_defect(&Feed::rank2(2), 0.7, 256).unwrap() < 1e-6);
    }

    #[test]
    fn kernel_routes_agree() {
        let feed = Feed::rank2(1);
        for k in 0..2 {
            let r = kernel_g_consistency(&feed, k, 0.7, &w2(), 256).unwrap();
            assert!(r < 1e-4, "k={k}: {r:e}");
        }
    }

    #[test]
    fn kernel_decays() {
        let prof = kernel_g_profile(&Feed::rank2(1), 0, 0.7, &[0.0, 10.0, -10.0, 20.0, -20.0]).unwrap();
        assert!(prof[3] < 1e-3 * prof[0] && prof[4] < 1e-3 * prof[0], "{prof:?}");
    }

    #[test]
    fn literal_kernel_formula_is_not_the_inverse() {
        // for ε = 0, K is the reflection K′, so the kernel of K⁻¹ is a bare δ
        // and G₁ vanishes; the multiplier Φ(x⁺)⁻¹Φ(x⁻)⁻¹ = Φ(x)⁻² would give
        // a nonzero smooth part
        let (hbar, c_step) = (0.7, 0.3);
        let planck = Planck::new(hbar).unwrap();
        let literal = KernelG::build(hbar, hbar, 1.0, 0.0, c_step, |m| {
            Ok(1.0 / quantum_dilog(Complex64::new(-(m as f64) * c_step, 0.0), planck)?.value.powi(2))
        })
        .unwrap();
        assert!(literal.smooth(0.0).norm() > 1e-3);
        assert!(kernel_g(&Feed::rank2(0), 0, hbar, &[0.3, 0.0]).unwrap().0.norm() < 1e-12);
        // away from ε = 0 the derived kernel is genuinely smooth
        assert!(kernel_g(&Feed::rank2(1), 0, hbar, &[0.3, 1.0]).unwrap().0.norm() > 1e-3);
    }

    #[test]
    fn langlands_self_duality() {
        assert!(langlands_residual(&Feed::rank2(2), 0, 0.7, 256).unwrap() < 1e-6);
    }

    #[test]
    fn difference_system_is_the_quantum_mutation() {
        let feed = Feed::rank2(2);
        for k in 0..2 {
            let sys = emit_difference_system(&feed, k).unwrap();
            assert_eq!(sys.pairs.len(), 4);
            // κ(X′_k) = X_k⁻¹
            let (_, lam) = sys.map.images[2 + k].is_monomial().unwrap();
            let mut expected = vec![0i64; 4];
            expected[2 + k] = -1;
            assert_eq!(lam, &expected);
            assert_eq!(sys.map.specialize().unwrap(), mutation(Space::D, &feed, k).unwrap().images);
        }
    }
}
