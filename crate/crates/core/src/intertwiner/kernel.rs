//! The intertwiner K = K♯∘K′ on a grid.
//!
//! The spacing Δ is chosen with Δ² = 4π²ℏ/(n·L), L the lcm of the
//! multipliers, so the dual spacing is Δc = L·Δ. Then every argument
//! −c/d_k − α_k^± of the quantum dilogarithms in K♯ is an integer multiple
//! of Δ (Φ is tabulated once per ℏ_k), and the linear map behind K′ sends
//! grid points to grid points (an exact index permutation).

use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;

use super::grid::{CenteredDft, GridFunction};
use crate::cluster::{ClusterTransformation, Step};
use crate::error::{Error, Result};
use crate::feed::Feed;
use crate::qdilog::{quantum_dilog, Planck};

/// Grid geometry shared by every axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice {
    pub n: usize,
    pub step: f64,
    pub hbar: f64,
    /// lcm of the multipliers
    pub order: i64,
}

/// Integral multipliers of a feed (the grids need them).
pub fn integral_multipliers(feed: &Feed) -> Result<Vec<i64>> {
    feed.d()
        .iter()
        .map(|x| {
            if *x.denom() == 1 {
                Ok(*x.numer())
            } else {
                Err(Error::InvalidParam(format!("grid intertwiners need integral multipliers, got {x}")))
            }
        })
        .collect()
}

impl Lattice {
    pub fn new(feed: &Feed, hbar: f64, n: usize) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParam(format!("ℏ must be positive, got {hbar}")));
        }
        if n < 16 || n % 2 != 0 {
            return Err(Error::InvalidParam(format!("grid size must be even and at least 16, got {n}")));
        }
        if feed.rank() == 0 || feed.rank() > 2 {
            return Err(Error::InvalidParam(format!("grid intertwiners support ranks 1 and 2, got {}", feed.rank())));
        }
        let order = integral_multipliers(feed)?.into_iter().fold(1i64, |a, b| num_integer::lcm(a, b));
        let step = 2.0 * PI * (hbar / (n as f64 * order as f64)).sqrt();
        Ok(Lattice { n, step, hbar, order })
    }

    pub fn half_width(&self) -> f64 {
        self.step * (self.n / 2) as f64
    }

    /// Signed index i − n/2.
    pub fn offset(&self, i: usize) -> i64 {
        i as i64 - (self.n / 2) as i64
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.offset(i) as f64 * self.step
    }

    pub fn c_step(&self) -> f64 {
        self.step * self.order as f64
    }

    pub fn sample(&self, dims: usize, f: impl Fn(&[f64]) -> Complex64) -> Result<GridFunction> {
        GridFunction::sample(self.n, vec![self.step; dims], vec![0.0; dims], f)
    }
}

/// Φ^{ℏ/d}(j·Δ + i·y) for j in a contiguous range.
#[derive(Clone, Debug)]
struct PhiRow {
    lo: i64,
    values: Vec<Complex64>,
}

/// Tabulated quantum dilogarithms on the lattice, keyed by (d, y).
#[derive(Clone, Debug)]
pub struct PhiTables {
    step: f64,
    hbar: f64,
    rows: HashMap<(i64, u64), PhiRow>,
}

impl PhiTables {
    pub fn new(step: f64, hbar: f64) -> Self {
        PhiTables { step, hbar, rows: HashMap::new() }
    }

    /// Make sure Φ^{ℏ/d}(jΔ + iy) is tabulated for lo ≤ j ≤ hi.
    pub fn ensure(&mut self, d: i64, y: f64, lo: i64, hi: i64) -> Result<()> {
        let planck = Planck::new(self.hbar / d as f64)?;
        let step = self.step;
        let eval = |j: i64| -> Result<Complex64> { Ok(quantum_dilog(Complex64::new(j as f64 * step, y), planck)?.value) };
        let row = self.rows.entry((d, y.to_bits())).or_insert(PhiRow { lo, values: Vec::new() });
        if row.values.is_empty() {
            row.lo = lo;
            row.values = (lo..=hi).map(eval).collect::<Result<_>>()?;
            return Ok(());
        }
        if lo < row.lo {
            let mut front: Vec<Complex64> = (lo..row.lo).map(eval).collect::<Result<_>>()?;
            front.append(&mut row.values);
            row.values = front;
            row.lo = lo;
        }
        let row_hi = row.lo + row.values.len() as i64 - 1;
        if hi > row_hi {
            let back: Vec<Complex64> = (row_hi + 1..=hi).map(eval).collect::<Result<_>>()?;
            row.values.extend(back);
        }
        Ok(())
    }

    /// Tabulated Φ^{ℏ/d}(jΔ + iy); `ensure` must have covered j.
    pub fn at(&self, d: i64, y: f64, j: i64) -> Complex64 {
        let row = &self.rows[&(d, y.to_bits())];
        row.values[(j - row.lo) as usize]
    }

    pub fn len(&self) -> usize {
        self.rows.values().map(|r| r.values.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// S(u) = Σ_{p,q} d_p|ε_pq|u_pu_q/8πℏ, so that φ(u) = −i·S(u).
#[derive(Clone, Debug)]
pub struct PhaseForm {
    weights: Vec<Vec<f64>>,
}

impl PhaseForm {
    pub fn new(feed: &Feed, hbar: f64) -> Self {
        let n = feed.rank();
        let d: Vec<f64> = feed.d().iter().map(|x| *x.numer() as f64 / *x.denom() as f64).collect();
        let weights = (0..n).map(|p| (0..n).map(|q| d[p] * feed.eps(p, q).abs() as f64 / (8.0 * PI * hbar)).collect()).collect();
        PhaseForm { weights }
    }

    pub fn value(&self, u: &[f64]) -> f64 {
        self.weights.iter().enumerate().map(|(p, row)| row.iter().zip(u).map(|(w, uq)| w * u[p] * uq).sum::<f64>()).sum()
    }
}

/// Mutation data in direction k needed on the grid.
#[derive(Clone, Debug)]
pub struct Direction {
    pub k: usize,
    pub d_k: i64,
    /// L/d_k: the lattice index of c/d_k is (m − n/2)·ratio
    pub ratio: i64,
    pub eps_row: Vec<i64>,
}

impl Direction {
    pub fn new(feed: &Feed, k: usize, lattice: &Lattice) -> Result<Self> {
        if k >= feed.rank() {
            return Err(Error::IndexOutOfRange { index: k, rank: feed.rank() });
        }
        let d_k = integral_multipliers(feed)?[k];
        Ok(Direction { k, d_k, ratio: lattice.order / d_k, eps_row: (0..feed.rank()).map(|j| feed.eps(k, j)).collect() })
    }

    /// Lattice index of α_k^+ (plus = true) or α_k^− at the transverse
    /// signed indices (entry k ignored).
    pub fn alpha_index(&self, transverse: &[i64], plus: bool) -> i64 {
        self.eps_row
            .iter()
            .zip(transverse)
            .enumerate()
            .filter(|(j, _)| *j != self.k)
            .map(|(_, (&e, &o))| if plus { e.max(0) * o } else { (-e).max(0) * o })
            .sum()
    }

    /// Lattice index of −c_m/d_k − α for the dual index m.
    pub fn argument_index(&self, m_offset: i64, alpha_index: i64) -> i64 {
        -m_offset * self.ratio - alpha_index
    }

    fn spread(&self) -> i64 {
        self.eps_row.iter().map(|e| e.abs()).sum()
    }
}

/// The intertwiner and its factors acting on grid functions.
pub struct GridIntertwiner {
    pub lattice: Lattice,
    pub tables: PhiTables,
    dft: CenteredDft,
}

impl GridIntertwiner {
    pub fn new(lattice: Lattice) -> Self {
        GridIntertwiner { lattice, tables: PhiTables::new(lattice.step, lattice.hbar), dft: CenteredDft::new(lattice.n) }
    }

    pub fn dft(&self) -> &CenteredDft {
        &self.dft
    }

    fn check(&self, feed: &Feed, g: &GridFunction) -> Result<()> {
        let l = &self.lattice;
        if g.dims() != feed.rank() || g.n != l.n || g.spacing.iter().any(|&s| s != l.step) || g.center.iter().any(|&c| c != 0.0) {
            return Err(Error::InvalidParam("grid function does not live on the intertwiner lattice".into()));
        }
        Ok(())
    }

    /// Tabulate Φ^{ℏ_k} for every argument K♯ in direction k can meet.
    pub fn prepare(&mut self, dir: &Direction) -> Result<()> {
        let half = (self.lattice.n / 2) as i64;
        let reach = half * dir.ratio + half * dir.spread() + 1;
        self.tables.ensure(dir.d_k, 0.0, -reach, reach)
    }

    /// The K♯ multiplier Φ^{ℏ_k}(−c/d_k − α_k^+)/Φ^{ℏ_k}(−c/d_k − α_k^−) at
    /// dual index m and transverse signed indices.
    pub fn sharp_multiplier(&self, dir: &Direction, m: usize, transverse: &[i64]) -> Complex64 {
        let mo = self.lattice.offset(m);
        let p = dir.argument_index(mo, dir.alpha_index(transverse, true));
        let q = dir.argument_index(mo, dir.alpha_index(transverse, false));
        if p == q {
            return Complex64::new(1.0, 0.0);
        }
        self.tables.at(dir.d_k, 0.0, p) / self.tables.at(dir.d_k, 0.0, q)
    }

    /// K♯ (or its inverse) on one line along a_k with fixed transverse indices.
    pub fn sharp_line(&self, dir: &Direction, line: &mut [Complex64], transverse: &[i64], inverse: bool) {
        self.dft.process(line, true);
        for (m, x) in line.iter_mut().enumerate() {
            let r = self.sharp_multiplier(dir, m, transverse);
            *x *= if inverse { 1.0 / r } else { r };
        }
        self.dft.process(line, false);
        let scale = 1.0 / self.lattice.n as f64;
        for x in line.iter_mut() {
            *x *= scale;
        }
    }

    fn transverse(&self, rank: usize, k: usize, t: usize) -> Vec<i64> {
        let mut tr = vec![0; rank];
        if rank == 2 {
            tr[1 - k] = self.lattice.offset(t);
        }
        tr
    }

    /// K♯ in direction k (inverse = true gives its inverse).
    pub fn sharp(&mut self, feed: &Feed, k: usize, g: &GridFunction, inverse: bool) -> Result<GridFunction> {
        self.check(feed, g)?;
        let dir = Direction::new(feed, k, &self.lattice)?;
        self.prepare(&dir)?;
        let mut out = g.clone();
        let rank = feed.rank();
        out.map_lines(k, |t, line| {
            let tr = self.transverse(rank, k, t);
            self.sharp_line(&dir, line, &tr, inverse);
            Ok(())
        })?;
        Ok(out)
    }

    /// K′: pullback along a′_k = α_k^− − a_k, dressed by the unitary phase
    /// e^{φ(a) − φ(a′)} with φ(u) = Σ_{p,q} d_p|ε_pq|u_pu_q/8πiℏ.
    ///
    /// The bare pullback intertwines the monomial part of the mutation only
    /// in the half-shift realization (x̂^old, b̂^old = 2a); conjugating it to
    /// the realization X̂_p = e^{−α_p^+}·(shift by 2πiℏ_p) produces the
    /// phase (|ε| and d are unchanged by mutation, so one form serves both
    /// feeds). Since the phase is odd under a ↦ a′, K′ is still an involution.
    pub fn prime(&self, feed: &Feed, k: usize, g: &GridFunction) -> Result<GridFunction> {
        self.check(feed, g)?;
        let dir = Direction::new(feed, k, &self.lattice)?;
        let n = self.lattice.n as i64;
        let form = PhaseForm::new(feed, self.lattice.hbar);
        let mut out = g.clone();
        let rank = feed.rank();
        for t in 0..g.line_count() {
            let tr = self.transverse(rank, k, t);
            let a = dir.alpha_index(&tr, false);
            let idx = g.line_indices(k, t);
            let mut point: Vec<f64> = tr.iter().map(|&o| o as f64 * self.lattice.step).collect();
            for (i, &flat) in idx.iter().enumerate() {
                // index of α − a_k: n/2 + a − (i − n/2)
                let src = n + a - i as i64;
                point[k] = self.lattice.coord(i);
                let before = form.value(&point);
                point[k] = (a - self.lattice.offset(i)) as f64 * self.lattice.step;
                let after = form.value(&point);
                out.data[flat] = if (0..n).contains(&src) {
                    g.data[idx[src as usize]] * Complex64::from_polar(1.0, after - before)
                } else {
                    Complex64::new(0.0, 0.0)
                };
            }
        }
        Ok(out)
    }

    /// (P f)(a) = f(a′) with a′_i = a_{σ(i)}: the relabelling to the feed
    /// `feed.permute(σ)`.
    pub fn permutation(&self, sigma: &[usize], g: &GridFunction) -> Result<GridFunction> {
        let dims = g.dims();
        if sigma.len() != dims {
            return Err(Error::InvalidParam(format!("{sigma:?} does not permute {dims} axes")));
        }
        if dims == 1 || sigma == [0, 1] {
            return Ok(g.clone());
        }
        let mut out = g.clone();
        let n = g.n;
        for i0 in 0..n {
            for i1 in 0..n {
                let i = [i0, i1];
                out.data[g.flat(&i)] = g.data[g.flat(&[i[sigma[0]], i[sigma[1]]])];
            }
        }
        Ok(out)
    }

    /// K = K♯∘K′: L²(A_{μ_k(i)}) → L²(A_i).
    pub fn mutation(&mut self, feed: &Feed, k: usize, g: &GridFunction) -> Result<GridFunction> {
        let p = self.prime(feed, k, g)?;
        self.sharp(feed, k, &p, false)
    }

    /// K⁻¹ = K′∘(K♯)⁻¹.
    pub fn inverse_mutation(&mut self, feed: &Feed, k: usize, g: &GridFunction) -> Result<GridFunction> {
        let s = self.sharp(feed, k, g, true)?;
        self.prime(feed, k, &s)
    }

    /// The composite intertwiner of a transformation: for feeds
    /// i₀ → i₁ → … → i_m it maps L²(A_{i_m}) → L²(A_{i₀}).
    pub fn transformation(&mut self, t: &ClusterTransformation, g: &GridFunction) -> Result<GridFunction> {
        let feeds = t.feeds()?;
        let mut v = g.clone();
        for (s, step) in t.steps.iter().enumerate().rev() {
            let f = &feeds[s];
            v = match step {
                Step::Mutate(k) => self.mutation(f, *k, &v)?,
                Step::Permute(sigma) => self.permutation(sigma, &v)?,
            };
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(l: &Lattice, dims: usize, center: &[f64], width: f64) -> GridFunction {
        let c = center.to_vec();
        l.sample(dims, move |a| {
            let r2: f64 = a.iter().zip(&c).map(|(x, y)| (x - y).powi(2)).sum();
            Complex64::from_polar((-r2 / (2.0 * width * width)).exp(), 0.3 * a[0])
        })
        .unwrap()
    }

    #[test]
    fn lattice_is_self_dual() {
        let l = Lattice::new(&Feed::rank2(3), 0.7, 256).unwrap();
        assert_eq!(l.order, 3);
        let dual = super::super::grid::dual_spacing(l.n, l.step, l.hbar);
        assert!((dual - l.c_step()).abs() < 1e-12);
        assert!(Lattice::new(&Feed::rank2(1), 0.7, 10).is_err());
    }

    #[test]
    fn sharp_is_unitary_and_trivial_for_zero_row() {
        let feed = Feed::rank2(1);
        let l = Lattice::new(&feed, 0.7, 128).unwrap();
        let mut gi = GridIntertwiner::new(l);
        for (i, c) in [[0.0, 0.0], [0.5, -1.0], [-1.2, 0.7], [2.0, 1.0], [-0.3, -2.0]].iter().enumerate() {
            let g = gaussian(&l, 2, c, 0.8 + 0.2 * i as f64);
            for k in 0..2 {
                let s = gi.sharp(&feed, k, &g, false).unwrap();
                assert!((s.norm() / g.norm() - 1.0).abs() < 1e-10);
                let back = gi.sharp(&feed, k, &s, true).unwrap();
                assert!(back.relative_distance(&g) < 1e-10);
            }
        }
        let zero = Feed::rank2(0);
        let lz = Lattice::new(&zero, 0.7, 64).unwrap();
        let mut gz = GridIntertwiner::new(lz);
        let g = gaussian(&lz, 2, &[0.4, 0.1], 1.0);
        assert!(gz.sharp(&zero, 0, &g, false).unwrap().relative_distance(&g) < 1e-10);
    }

    #[test]
    fn opposite_data_compose_to_identity() {
        // K♯ for ε and for −ε have reciprocal multipliers
        let feed = Feed::rank2(2);
        let l = Lattice::new(&feed, 0.7, 128).unwrap();
        let mut gi = GridIntertwiner::new(l);
        let g = gaussian(&l, 2, &[0.3, -0.4], 1.1);
        let s = gi.sharp(&feed, 0, &g, false).unwrap();
        let back = gi.sharp(&feed.chiral_dual(), 0, &s, false).unwrap();
        assert!(back.relative_distance(&g) < 1e-6);
    }

    #[test]
    fn prime_is_reflection_and_involution() {
        let zero = Feed::rank2(0);
        let l = Lattice::new(&zero, 0.7, 64).unwrap();
        let gi = GridIntertwiner::new(l);
        let g = gaussian(&l, 2, &[0.8, -0.5], 1.0);
        let p = gi.prime(&zero, 0, &g).unwrap();
        let reflected = gaussian(&l, 2, &[-0.8, -0.5], 1.0);
        // the phase e^{0.3 i a₀} flips sign under a₀ ↦ −a₀
        for (i, (x, y)) in p.data.iter().zip(&reflected.data).enumerate() {
            let a0 = g.coord(0, g.axis_index(i, 0));
            if a0 > -l.half_width() + l.step {
                assert!((x - y * Complex64::from_polar(1.0, -0.6 * a0)).norm() < 1e-12);
            }
        }
        let feed = Feed::rank2(3);
        let l = Lattice::new(&feed, 0.7, 128).unwrap();
        let gi = GridIntertwiner::new(l);
        let g = gaussian(&l, 2, &[0.3, 0.2], 1.0);
        for k in 0..2 {
            let p = gi.prime(&feed, k, &g).unwrap();
            assert!((p.norm() / g.norm() - 1.0).abs() < 1e-8);
            assert!(gi.prime(&feed, k, &p).unwrap().relative_distance(&g) < 1e-12);
        }
    }

    #[test]
    fn rejects_foreign_grids() {
        let feed = Feed::rank2(1);
        let l = Lattice::new(&feed, 0.7, 64).unwrap();
        let mut gi = GridIntertwiner::new(l);
        let g = GridFunction::zeros(64, vec![0.1, 0.1], vec![0.0, 0.0]).unwrap();
        assert!(gi.sharp(&feed, 0, &g, false).is_err());
    }
}
