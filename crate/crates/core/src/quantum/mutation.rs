//! Quantum mutations of the X- and D-tori: μ^q = μ♯ ∘ μ′, where μ♯ is
//! conjugation by Ψ^{q_k}(X_k)/Ψ^{q_k}(X̃_k) (given by closed product
//! formulas) and μ′ is the monomial isomorphism induced by the mutated basis.

use super::coef::QCoef;
use super::local::{Factor, QLocal};
use super::matrix_model::{CMat, Rep};
use super::series::{psi_q, psi_q_inverse, QSeries};
use super::torus::{Lam, QTorus};
use crate::cluster::Space;
use crate::error::{check_index, Error, Result};
use crate::feed::{pos, Feed};
use crate::symbolic::RatFun;

/// An algebra homomorphism from the (fraction field of the) `domain` torus
/// to the `codomain` torus, given by the images of the domain generators.
#[derive(Clone, Debug)]
pub struct QuantumMap {
    pub domain: QTorus,
    pub codomain: QTorus,
    pub images: Vec<QLocal>,
}

impl QuantumMap {
    pub fn identity(torus: &QTorus) -> Self {
        let images = (0..torus.rank()).map(|i| QLocal::mono(torus.basis(i))).collect();
        QuantumMap { domain: torus.clone(), codomain: torus.clone(), images }
    }

    /// Monomial map e_{e_a} ↦ e_{images[a]}.
    pub fn monomial(domain: QTorus, codomain: QTorus, images: &[Lam]) -> Self {
        QuantumMap { domain, codomain, images: images.iter().map(|l| QLocal::mono(l.clone())).collect() }
    }

    /// `second ∘ self`: apply `self` first (domain → codomain), then
    /// `second` (self.codomain → second.codomain). The images of `self` must
    /// be mapped factor-wise to monomials by `second` unless `self` is
    /// factor-free.
    pub fn then(&self, second: &QuantumMap) -> Result<QuantumMap> {
        let images = self
            .images
            .iter()
            .map(|e| e.apply_hom(&self.codomain, &second.codomain, &second.images))
            .collect::<Result<Vec<_>>>()?;
        Ok(QuantumMap { domain: self.domain.clone(), codomain: second.codomain.clone(), images })
    }

    /// Lattice images when every generator maps to a monomial with
    /// coefficient 1.
    pub fn monomial_images(&self) -> Option<Vec<Lam>> {
        self.images
            .iter()
            .map(|e| match e.is_monomial() {
                Some((c, l)) if c.is_one() => Some(l.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.domain == self.codomain
            && self.monomial_images().is_some_and(|ims| ims.iter().enumerate().all(|(i, l)| *l == self.codomain.basis(i)))
    }

    /// q = 1 specialisation: images as commutative rational functions.
    pub fn specialize(&self) -> Result<Vec<RatFun>> {
        self.images.iter().map(|e| e.specialize(&self.codomain)).collect()
    }

    /// Matrices of the images, given a representation of the codomain.
    pub fn eval(&self, rep: &Rep) -> Result<Vec<CMat>> {
        self.images.iter().map(|e| rep.eval(e)).collect()
    }

    pub fn display(&self) -> Vec<(String, String)> {
        self.domain
            .names()
            .iter()
            .zip(&self.images)
            .map(|(n, e)| (format!("{n}'"), e.display(&self.codomain)))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        for (k, v) in self.display() {
            m.insert(k, serde_json::Value::String(v));
        }
        serde_json::Value::Object(m)
    }
}

/// The quantum torus of a feed for the X- or D-space, with t = q^{1/root}
/// (default: the feed's root order).
pub fn space_torus(feed: &Feed, space: Space, root: Option<i64>) -> Result<QTorus> {
    let root = root.unwrap_or_else(|| feed.q_root_order());
    match space {
        Space::X => QTorus::x_torus_with_root(feed, root),
        Space::D => {
            let t = QTorus::d_torus(feed);
            if t.root() == root {
                Ok(t)
            } else {
                let scale = num_rational::Ratio::new(num_bigint::BigInt::from(1), num_bigint::BigInt::from(t.root()));
                let form = crate::linalg::QMatrix::from_fn(t.rank(), t.rank(), |a, b| {
                    num_rational::BigRational::from_integer(t.scaled_form()[a][b].into()) * &scale
                });
                QTorus::new(t.names().to_vec(), &form, root)
            }
        }
        Space::A => QTorus::a_torus(feed),
    }
}

fn require_xd(space: Space) -> Result<()> {
    if space == Space::A {
        return Err(Error::InvalidParam("quantum mutations are provided for the X- and D-tori".into()));
    }
    Ok(())
}

/// Lattice vector of X̃_k = X_k Π_j B_j^{ε_kj} in the D-torus (order B, X).
pub fn x_tilde_lattice(feed: &Feed, k: usize) -> Lam {
    let n = feed.rank();
    let mut v = vec![0; 2 * n];
    for j in 0..n {
        v[j] = feed.eps(k, j);
    }
    v[n + k] = 1;
    v
}

/// Closed-form X_i ↦ X_i Π_{a=1}^{|ε_ik|} (1 + q_k^{2a−1} X_k) for ε_ik ≤ 0,
/// X_i [Π_{a=1}^{ε_ik} (1 + q_k^{1−2a} X_k)]^{−1} for ε_ik > 0.
fn x_sharp_image(feed: &Feed, k: usize, i: usize, qk: i64, xi: Lam, xk: Lam) -> QLocal {
    let e = feed.eps(i, k);
    let factors: Vec<Factor> = if e <= 0 {
        (1..=-e).map(|a| Factor::new((2 * a - 1) * qk, xk.clone(), 1)).collect()
    } else {
        (1..=e).rev().map(|a| Factor::new((1 - 2 * a) * qk, xk.clone(), -1)).collect()
    };
    QLocal::with_factors(xi, factors)
}

/// μ♯_k as an automorphism of the feed's X- or D-torus.
pub fn quantum_mu_sharp(feed: &Feed, k: usize, space: Space) -> Result<QuantumMap> {
    quantum_mu_sharp_with_root(feed, k, space, None)
}

pub fn quantum_mu_sharp_with_root(feed: &Feed, k: usize, space: Space, root: Option<i64>) -> Result<QuantumMap> {
    require_xd(space)?;
    check_index(k, feed.rank())?;
    let n = feed.rank();
    let torus = space_torus(feed, space, root)?;
    let qk = torus.q_k_exponent(feed.d()[k])?;
    let images = match space {
        Space::X => (0..n).map(|i| x_sharp_image(feed, k, i, qk, torus.basis(i), torus.basis(k))).collect(),
        _ => {
            let mut im: Vec<QLocal> = (0..n)
                .map(|i| {
                    if i == k {
                        QLocal::with_factors(
                            torus.basis(k),
                            vec![Factor::new(qk, torus.basis(n + k), 1), Factor::new(qk, x_tilde_lattice(feed, k), -1)],
                        )
                    } else {
                        QLocal::mono(torus.basis(i))
                    }
                })
                .collect();
            im.extend((0..n).map(|i| x_sharp_image(feed, k, i, qk, torus.basis(n + i), torus.basis(n + k))));
            im
        }
    };
    Ok(QuantumMap { domain: torus.clone(), codomain: torus, images })
}

/// Lattice images of μ′_k: X′_i ↦ e_{e_i + [ε_ik]_+ e_k} (i ≠ k), X′_k ↦ e_{−e_k},
/// and on the D-torus B′_k ↦ e_{−f_k + Σ_j [−ε_kj]_+ f_j}, B′_i ↦ B_i.
pub fn mu_prime_lattice(feed: &Feed, k: usize, space: Space) -> Result<Vec<Lam>> {
    require_xd(space)?;
    check_index(k, feed.rank())?;
    let n = feed.rank();
    let off = if space == Space::D { n } else { 0 };
    let dim = off + n;
    let unit = |a: usize| {
        let mut v = vec![0; dim];
        v[a] = 1;
        v
    };
    let mut out = Vec::with_capacity(dim);
    if space == Space::D {
        for i in 0..n {
            if i == k {
                let mut v = vec![0; dim];
                v[k] = -1;
                for j in 0..n {
                    v[j] += pos(-feed.eps(k, j));
                }
                out.push(v);
            } else {
                out.push(unit(i));
            }
        }
    }
    for i in 0..n {
        let mut v = vec![0; dim];
        if i == k {
            v[off + k] = -1;
        } else {
            v[off + i] = 1;
            v[off + k] = pos(feed.eps(i, k));
        }
        out.push(v);
    }
    Ok(out)
}

/// μ′_k from the mutated torus to the original one.
pub fn quantum_mu_prime(feed: &Feed, k: usize, space: Space) -> Result<QuantumMap> {
    quantum_mu_prime_with_root(feed, k, space, None)
}

pub fn quantum_mu_prime_with_root(feed: &Feed, k: usize, space: Space, root: Option<i64>) -> Result<QuantumMap> {
    let images = mu_prime_lattice(feed, k, space)?;
    let root = root.or(Some(feed.q_root_order()));
    Ok(QuantumMap::monomial(space_torus(&feed.mutate(k)?, space, root)?, space_torus(feed, space, root)?, &images))
}

/// μ^q_k = μ♯_k ∘ μ′_k from the mutated torus to the original one.
pub fn quantum_mutation(feed: &Feed, k: usize, space: Space) -> Result<QuantumMap> {
    quantum_mutation_with_root(feed, k, space, None)
}

pub fn quantum_mutation_with_root(feed: &Feed, k: usize, space: Space, root: Option<i64>) -> Result<QuantumMap> {
    quantum_mu_prime_with_root(feed, k, space, root)?.then(&quantum_mu_sharp_with_root(feed, k, space, root)?)
}

/// Relabelling Y′_i ↦ Y_{σ(i)} from the permuted torus to the original one.
pub fn quantum_permutation(feed: &Feed, sigma: &[usize], space: Space, root: Option<i64>) -> Result<QuantumMap> {
    require_xd(space)?;
    let n = feed.rank();
    let target = feed.permute(sigma)?;
    let blocks = if space == Space::D { 2 } else { 1 };
    let images: Vec<Lam> = (0..blocks)
        .flat_map(|b| {
            sigma.iter().map(move |&s| {
                let mut v = vec![0; blocks * n];
                v[b * n + s] = 1;
                v
            })
        })
        .collect();
    let root = root.or(Some(feed.q_root_order()));
    Ok(QuantumMap::monomial(space_torus(&target, space, root)?, space_torus(feed, space, root)?, &images))
}

/// Outcome of comparing two truncated series computations generator by
/// generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesCheck {
    pub checked: usize,
    pub mismatches: Vec<String>,
}

impl SeriesCheck {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Grading by the exponent of X_k.
fn x_k_grading(feed: &Feed, k: usize, space: Space) -> Lam {
    let n = feed.rank();
    let off = if space == Space::D { n } else { 0 };
    let mut g = vec![0; off + n];
    g[off + k] = 1;
    g
}

/// Compare μ♯ computed as the truncated conjugation by
/// Ψ^{q_k}(X_k)Ψ^{q_k}(X̃_k)^{−1} (just Ψ^{q_k}(X_k) on the X-torus) with the
/// closed formulas, in all degrees ≤ `order` in X_k. Exact in ℚ(q).
pub fn sharp_adjoint_check(feed: &Feed, k: usize, space: Space, order: i64) -> Result<SeriesCheck> {
    require_xd(space)?;
    let sharp = quantum_mu_sharp(feed, k, space)?;
    let torus = &sharp.codomain;
    let n = feed.rank();
    let g = x_k_grading(feed, k, space);
    let qk = torus.q_k_exponent(feed.d()[k])?;
    let xk = if space == Space::D { torus.basis(n + k) } else { torus.basis(k) };
    let mut left = psi_q(torus, &xk, qk, g.clone(), order)?;
    let mut right = psi_q_inverse(torus, &xk, qk, g.clone(), order)?;
    if space == Space::D {
        let xt = x_tilde_lattice(feed, k);
        left = left.mul(torus, &psi_q_inverse(torus, &xt, qk, g.clone(), order)?);
        right = psi_q(torus, &xt, qk, g.clone(), order)?.mul(torus, &right);
    }
    let mut mismatches = Vec::new();
    for (a, image) in sharp.images.iter().enumerate() {
        let gen = left.lift(torus.gen(a));
        let conj = left.mul(torus, &gen).mul(torus, &right);
        let closed = image.expand(torus, &g, order)?;
        if conj != closed {
            mismatches.push(torus.names()[a].clone());
        }
    }
    Ok(SeriesCheck { checked: sharp.images.len(), mismatches })
}

/// On π*(X_i ⊗ 1) = X_i the conjugation by Ψ(X_k)/Ψ(X̃_k) acts as Ad_{Ψ(X_k)}
/// alone, and on π*(1 ⊗ X_i) = X̃_i as Ad_{Ψ(X̃_k)}^{−1} alone (X_i and X̃_j
/// commute). Checked in truncated series.
pub fn pi_intertwining_check(feed: &Feed, k: usize, order: i64) -> Result<SeriesCheck> {
    let torus = QTorus::d_torus(feed);
    let n = feed.rank();
    let g = x_k_grading(feed, k, Space::D);
    let qk = torus.q_k_exponent(feed.d()[k])?;
    let xk = torus.basis(n + k);
    let xt = x_tilde_lattice(feed, k);
    let psi_x = psi_q(&torus, &xk, qk, g.clone(), order)?;
    let psi_x_inv = psi_q_inverse(&torus, &xk, qk, g.clone(), order)?;
    let psi_t = psi_q(&torus, &xt, qk, g.clone(), order)?;
    let psi_t_inv = psi_q_inverse(&torus, &xt, qk, g.clone(), order)?;
    let full = |y: &QSeries| psi_x.mul(&torus, &psi_t_inv).mul(&torus, y).mul(&torus, &psi_t).mul(&torus, &psi_x_inv);
    let mut mismatches = Vec::new();
    for i in 0..n {
        let xi = psi_x.lift(torus.gen(n + i));
        if full(&xi) != psi_x.mul(&torus, &xi).mul(&torus, &psi_x_inv) {
            mismatches.push(format!("X{}", i + 1));
        }
        let xti = psi_x.lift(torus.mono(x_tilde_lattice(feed, i)));
        if full(&xti) != psi_t_inv.mul(&torus, &xti).mul(&torus, &psi_t) {
            mismatches.push(format!("X~{}", i + 1));
        }
    }
    Ok(SeriesCheck { checked: 2 * n, mismatches })
}

/// Coefficient helper for tests and reports: q_k as a power of t.
pub fn q_k(feed: &Feed, k: usize, space: Space) -> Result<QCoef> {
    let t = space_torus(feed, space, None)?;
    Ok(QCoef::t_pow(t.q_k_exponent(feed.d()[k])?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{decompose_mutation, mutation};
    use crate::quantum::torus::respects_forms;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trivial_column_fixes_generators() {
        let f = Feed::skew(vec![vec![0, 1, 0], vec![-1, 0, 0], vec![0, 0, 0]]).unwrap();
        let s = quantum_mu_sharp(&f, 0, Space::X).unwrap();
        assert_eq!(s.images[2], QLocal::mono(vec![0, 0, 1]));
        assert_eq!(s.images[0], QLocal::mono(vec![1, 0, 0]));
    }

    #[test]
    fn closed_forms_display() {
        let f = Feed::rank2(1);
        let s = quantum_mu_sharp(&f, 0, Space::X).unwrap();
        // ε_21 = −1: X2 ↦ X2 (1 + q X1)
        assert_eq!(s.images[1].display(&s.codomain), "e[X2]*(1+q^1*e[X1])");
        let d = quantum_mu_sharp(&f, 0, Space::D).unwrap();
        assert_eq!(d.images[0].display(&d.codomain), "e[B1]*(1+q^1*e[X1])*(1+q^1*e[B2*X1])^-1");
    }

    #[test]
    fn adjoint_action_matches_closed_formulas() {
        for p in 0..=3 {
            let f = Feed::rank2(p);
            for k in 0..2 {
                for space in [Space::X, Space::D] {
                    let c = sharp_adjoint_check(&f, k, space, 8).unwrap();
                    assert!(c.holds(), "p = {p}, k = {k}, {space:?}: {:?}", c.mismatches);
                }
            }
        }
    }

    #[test]
    fn pi_intertwines_conjugations() {
        let f = Feed::rank2(2);
        for k in 0..2 {
            assert!(pi_intertwining_check(&f, k, 6).unwrap().holds());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn specialization_is_classical(seed in 0u64..5000, n in 2usize..4, k in 0usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = Feed::random(&mut rng, n, 2, &[1, 2]);
            let k = k % n;
            for space in [Space::X, Space::D] {
                let (sharp, _) = decompose_mutation(space, &f, k).unwrap();
                prop_assert_eq!(quantum_mu_sharp(&f, k, space).unwrap().specialize().unwrap(), sharp.images.clone());
                let full = mutation(space, &f, k).unwrap();
                prop_assert_eq!(quantum_mutation(&f, k, space).unwrap().specialize().unwrap(), full.images.clone());
            }
        }

        #[test]
        fn mu_prime_respects_forms(seed in 0u64..5000, n in 2usize..5, k in 0usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = Feed::random(&mut rng, n, 2, &[1, 2, 3]);
            let k = k % n;
            for space in [Space::X, Space::D] {
                let m = quantum_mu_prime(&f, k, space).unwrap();
                prop_assert!(respects_forms(&m.domain, &m.codomain, &m.monomial_images().unwrap(), 1));
            }
        }
    }
}
