//! Finite-dimensional representations of quantum tori at roots of unity,
//! used as a numeric oracle for relations between noncommutative rational
//! expressions.
//!
//! The scaled form S = L·F is brought to symplectic blocks [[0, s_j], [−s_j, 0]]
//! by an integral change of basis. With t = e^{2πi/N} each block pair
//! (u_j, v_j) must satisfy U V = t^{2 s_j} V U; this is realised by C^{r} and
//! the cyclic shift on ℂ^m with m = N/gcd(N, 2s_j) and r = 2s_j/gcd(N, 2s_j),
//! where C is the clock matrix of order m. Kernel directions act as scalars.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::local::QLocal;
use super::torus::{Lam, QTorus};
use crate::error::{Error, Result};
use crate::linalg::{skew_darboux, unimodular_inverse, IntMatrix};

pub type CMat = DMatrix<Complex64>;

/// Matrices assigned to the generators of a quantum torus, with their
/// inverses, at a fixed value of t = q^{1/L}.
#[derive(Clone, Debug)]
pub struct Rep {
    pub torus: QTorus,
    pub t: Complex64,
    pub gens: Vec<CMat>,
    pub invs: Vec<CMat>,
}

impl Rep {
    pub fn new(torus: QTorus, t: Complex64, gens: Vec<CMat>) -> Result<Self> {
        let invs = gens.iter().map(|g| inverse(g)).collect::<Result<Vec<_>>>()?;
        Ok(Rep { torus, t, gens, invs })
    }

    pub fn dim(&self) -> usize {
        self.gens.first().map_or(1, |g| g.nrows())
    }

    pub fn identity(&self) -> CMat {
        CMat::identity(self.dim(), self.dim())
    }

    /// e_λ = t^{−Σ_{a<b} c_a c_b S_ab} Π_a G_a^{c_a}.
    pub fn mono(&self, lam: &[i64]) -> CMat {
        let mut m = self.identity();
        for (a, &c) in lam.iter().enumerate() {
            let g = if c >= 0 { &self.gens[a] } else { &self.invs[a] };
            for _ in 0..c.abs() {
                m = &m * g;
            }
        }
        m * self.t.powi(-self.torus.ordering_exponent(lam) as i32)
    }

    pub fn eval(&self, e: &QLocal) -> Result<CMat> {
        let mut total = CMat::zeros(self.dim(), self.dim());
        for term in &e.terms {
            let mut m = self.mono(&term.mono) * term.coef.eval(self.t);
            for f in &term.factors {
                let one_plus = self.identity() + self.mono(&f.mono) * self.t.powi(f.shift as i32);
                m = if f.power > 0 { m * one_plus } else { m * inverse(&one_plus)? };
            }
            total += m;
        }
        Ok(total)
    }

    /// max over generator pairs of ‖G_a G_b − t^{2S_ab} G_b G_a‖ relative to
    /// ‖G_a G_b‖.
    pub fn relation_residual(&self) -> f64 {
        relation_residual(&self.torus, self.t, &self.gens)
    }
}

/// Quantum torus relations G_a G_b = t^{2S_ab} G_b G_a for given matrices.
pub fn relation_residual(torus: &QTorus, t: Complex64, gens: &[CMat]) -> f64 {
    let s = torus.scaled_form();
    let mut worst = 0.0f64;
    for a in 0..gens.len() {
        for b in a + 1..gens.len() {
            let ab = &gens[a] * &gens[b];
            let ba = &gens[b] * &gens[a];
            let diff = &ab - ba * t.powi(2 * s[a][b] as i32);
            worst = worst.max(op_norm(&diff) / op_norm(&ab).max(1e-300));
        }
    }
    worst
}

pub fn inverse(m: &CMat) -> Result<CMat> {
    m.clone().try_inverse().ok_or(Error::DivisionByZero)
}

/// Spectral norm (largest singular value), by power iteration on MᴴM from
/// a fixed generic start vector.
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let n = m.ncols();
    let mut v = nalgebra::DVector::from_fn(n, |i, _| Complex64::new(1.0 + 0.37 * i as f64, 0.11 * (i % 7) as f64));
    let mut sigma = 0.0f64;
    for _ in 0..200 {
        let norm = v.norm();
        if norm == 0.0 {
            return 0.0;
        }
        v /= Complex64::new(norm, 0.0);
        let w = m * &v;
        let next = w.norm();
        v = m.adjoint() * w;
        if (next - sigma).abs() <= 1e-13 * next {
            return next;
        }
        sigma = next;
    }
    sigma
}

/// max_a ‖A_a − B_a‖ / ‖B_a‖ (spectral norms).
pub fn max_relative_difference(a: &[CMat], b: &[CMat]) -> f64 {
    a.iter().zip(b).map(|(x, y)| op_norm(&(x - y)) / op_norm(y).max(1e-300)).fold(0.0, f64::max)
}

/// One symplectic block of the model.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    /// s_j in the reduced scaled form.
    pub s: i64,
    /// Size of the clock/shift pair.
    pub m: usize,
    /// Power of the clock matrix.
    pub r: usize,
}

/// A root-of-unity representation of a quantum torus.
#[derive(Clone, Debug)]
pub struct MatrixModel {
    /// t = e^{2πi/N}.
    pub n: usize,
    pub blocks: Vec<Block>,
    /// Darboux basis (rows, in the original coordinates).
    pub darboux: IntMatrix,
    /// Scalar character of every Darboux basis vector.
    pub characters: Vec<Complex64>,
    pub rep: Rep,
}

impl MatrixModel {
    /// Build a model with t = e^{2πi/N}. Every Darboux basis vector is scaled
    /// by a random character c with |c| ∈ [0.5, 2]; such scalings preserve
    /// the relations and keep the factors 1 + q^{odd}·monomial invertible.
    pub fn build(torus: &QTorus, n: usize, seed: u64) -> Result<Self> {
        Self::build_with(torus, n, seed, true)
    }

    /// As `build`, with unit-modulus characters when `scaled` is false.
    pub fn build_with(torus: &QTorus, n: usize, seed: u64, scaled: bool) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParam("root of unity order must be at least 2".into()));
        }
        let rank = torus.rank();
        let s_big: IntMatrix = torus.scaled_form().iter().map(|r| r.iter().map(|&x| x.into()).collect()).collect();
        let (p, svals) = skew_darboux(&s_big);
        let q = unimodular_inverse(&p)?; // e_a = Σ_b q[a][b] v_b
        let mut blocks = Vec::new();
        for s in &svals {
            let s = s.to_i64().expect("small block");
            let g = gcd(n as i64, 2 * s);
            blocks.push(Block { s, m: (n as i64 / g) as usize, r: (2 * s / g) as usize });
        }
        let dim: usize = blocks.iter().map(|b| b.m).product();
        if dim > 4096 {
            return Err(Error::InvalidParam(format!("matrix model of dimension {dim} is too large")));
        }
        let t = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / n as f64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let characters: Vec<Complex64> = (0..rank)
            .map(|_| {
                let modulus = if scaled { rng.gen_range(-std::f64::consts::LN_2..std::f64::consts::LN_2).exp() } else { 1.0 };
                Complex64::from_polar(modulus, rng.gen_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        // matrices of the Darboux basis vectors
        let mut basis_mats = Vec::with_capacity(rank);
        for (j, b) in blocks.iter().enumerate() {
            let (u, v) = clock_shift(b.m, b.r);
            basis_mats.push(embed(&blocks, j, &u) * characters[2 * j]);
            basis_mats.push(embed(&blocks, j, &v) * characters[2 * j + 1]);
        }
        for c in characters.iter().skip(2 * blocks.len()) {
            basis_mats.push(CMat::identity(dim, dim) * *c);
        }
        // reduced form S' = P S Pᵀ for the symmetric normalisation
        let reduced: Vec<Vec<i64>> = (0..rank)
            .map(|a| (0..rank).map(|b| if a % 2 == 0 && b == a + 1 && a / 2 < blocks.len() { blocks[a / 2].s } else if b % 2 == 0 && a == b + 1 && b / 2 < blocks.len() { -blocks[b / 2].s } else { 0 }).collect())
            .collect();
        let reduced_torus = QTorus::new(
            (0..rank).map(|a| format!("v{a}")).collect(),
            &crate::linalg::QMatrix::from_fn(rank, rank, |a, b| {
                num_rational::BigRational::new(reduced[a][b].into(), torus.root().into())
            }),
            torus.root(),
        )?;
        let basis_rep = Rep::new(reduced_torus, t, basis_mats)?;
        let gens: Vec<CMat> = (0..rank)
            .map(|a| {
                let lam: Lam = q[a].iter().map(|x| x.to_i64().expect("small")).collect();
                basis_rep.mono(&lam)
            })
            .collect();
        let rep = Rep::new(torus.clone(), t, gens)?;
        Ok(MatrixModel { n, blocks, darboux: p, characters, rep })
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    num_integer::Integer::gcd(&a, &b)
}

/// (C^r, Σ) on ℂ^m with C = diag(ω^k), ω = e^{2πi/m}, Σ e_k = e_{k+1}:
/// C^r Σ = ω^r Σ C^r.
pub fn clock_shift(m: usize, r: usize) -> (CMat, CMat) {
    let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / m as f64);
    let clock = CMat::from_fn(m, m, |i, j| if i == j { w.powi((r * i % m.max(1)) as i32) } else { Complex64::new(0.0, 0.0) });
    let shift = CMat::from_fn(m, m, |i, j| if i == (j + 1) % m { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
    (clock, shift)
}

/// I ⊗ … ⊗ M (in slot j) ⊗ … ⊗ I.
fn embed(blocks: &[Block], j: usize, m: &CMat) -> CMat {
    let mut out = CMat::identity(1, 1);
    for (i, b) in blocks.iter().enumerate() {
        let factor = if i == j { m.clone() } else { CMat::identity(b.m, b.m) };
        out = out.kronecker(&factor);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feed::Feed;

    #[test]
    fn rank2_clock_shift_relation() {
        let t = QTorus::x_torus(&Feed::skew(vec![vec![0, 1], vec![-1, 0]]).unwrap());
        let m = MatrixModel::build_with(&t, 5, 1, false).unwrap();
        assert_eq!(m.dim(), 5);
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 5.0);
        let (u, v) = (&m.rep.gens[0], &m.rep.gens[1]);
        let diff = u * v - (v * u) * w.powi(2);
        assert!(op_norm(&diff) < 1e-12);
        assert!(m.rep.relation_residual() < 1e-12);
        // unit-modulus entries
        assert!(u.iter().chain(v.iter()).all(|z| z.norm() < 1e-12 || (z.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn kernel_directions_are_scalars() {
        // ε = 0 on the first two directions: X-torus of A1 × A1 is commutative
        let f = Feed::skew(vec![vec![0, 0], vec![0, 0]]).unwrap();
        let t = QTorus::x_torus(&f);
        let m = MatrixModel::build(&t, 7, 3).unwrap();
        assert_eq!(m.dim(), 1);
        // a central element of a rank-3 torus
        let f3 = Feed::skew(vec![vec![0, 1, 1], vec![-1, 0, 0], vec![-1, 0, 0]]).unwrap();
        let t3 = QTorus::x_torus(&f3);
        let m3 = MatrixModel::build(&t3, 5, 4).unwrap();
        let central = m3.rep.mono(&[0, 1, -1]);
        let c = central[(0, 0)];
        assert!(op_norm(&(central - CMat::identity(m3.dim(), m3.dim()) * c)) < 1e-12);
        assert!(m3.rep.relation_residual() < 1e-12);
    }

    #[test]
    fn double_torus_models() {
        for p in 1..=3 {
            let f = Feed::rank2(p);
            let t = QTorus::d_torus(&f);
            for n in [5 * p as usize, 7 * p as usize] {
                let m = MatrixModel::build(&t, n, 11).unwrap();
                assert!(m.rep.relation_residual() < 1e-12, "p = {p}, N = {n}");
            }
        }
    }
}
