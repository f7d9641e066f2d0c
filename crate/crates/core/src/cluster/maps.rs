//! The maps p, π, φ, j, i, θ connecting the A-, X- and D-spaces.

use num_traits::ToPrimitive;

use super::mutation::{decompose_mutation, x_tilde};
use super::{names, Space, Substitution};
use crate::error::Result;
use crate::feed::Feed;
use crate::linalg::{int_matrix, integer_kernel};
use crate::symbolic::Expr;

fn monomial(nvars: usize, factors: impl IntoIterator<Item = (usize, i64)>) -> Expr {
    let mut e = vec![0i32; nvars];
    for (i, k) in factors {
        e[i] += k as i32;
    }
    Expr::monomial(&e)
}

fn pair_names(a: &str, b: &str, n: usize) -> Vec<String> {
    let mut v = names(a, n);
    v.extend(names(b, n));
    v
}

/// p: A → X, p*X_k = Π_i A_i^{ε_ki}.
pub fn map_p(feed: &Feed) -> Substitution {
    let n = feed.rank();
    let exprs = (0..n).map(|k| monomial(n, (0..n).map(|i| (i, feed.eps(k, i))))).collect();
    Substitution::from_exprs(Space::A.names(n), Space::X.names(n), exprs)
}

/// p × p: A × A° → X × X°.
pub fn map_p_times_p(feed: &Feed) -> Substitution {
    let n = feed.rank();
    let exprs = (0..2 * n)
        .map(|t| {
            let (off, k) = (t / n * n, t % n);
            monomial(2 * n, (0..n).map(|i| (off + i, feed.eps(k, i))))
        })
        .collect();
    Substitution::from_exprs(pair_names("A", "A°", n), pair_names("X", "X°", n), exprs)
}

/// π: D → X × X°, π*(X_i ⊗ 1) = X_i, π*(1 ⊗ X_i) = X̃_i.
pub fn map_pi(feed: &Feed) -> Substitution {
    let n = feed.rank();
    let mut exprs: Vec<Expr> = (0..n).map(|i| Expr::gen(n + i)).collect();
    exprs.extend((0..n).map(|i| x_tilde(feed, i)));
    Substitution::from_exprs(Space::D.names(n), pair_names("X", "X°", n), exprs)
}

/// φ: A × A° → D, φ*B_i = A°_i/A_i, φ*X_i = Π_j A_j^{ε_ij}.
pub fn map_phi(feed: &Feed) -> Substitution {
    let n = feed.rank();
    let mut exprs: Vec<Expr> = (0..n).map(|i| monomial(2 * n, [(n + i, 1), (i, -1)])).collect();
    exprs.extend((0..n).map(|i| monomial(2 * n, (0..n).map(|j| (j, feed.eps(i, j))))));
    Substitution::from_exprs(pair_names("A", "A°", n), Space::D.names(n), exprs)
}

/// j: X → D, the embedding as the locus B_i = 1.
pub fn map_j(feed: &Feed) -> Substitution {
    let n = feed.rank();
    let mut exprs: Vec<Expr> = (0..n).map(|_| Expr::one()).collect();
    exprs.extend((0..n).map(Expr::gen));
    Substitution::from_exprs(Space::X.names(n), Space::D.names(n), exprs)
}

/// Δ: X → X × X°, the diagonal.
pub fn map_diagonal(n: usize) -> Substitution {
    let exprs = (0..2 * n).map(|t| Expr::gen(t % n)).collect();
    Substitution::from_exprs(Space::X.names(n), pair_names("X", "X°", n), exprs)
}

/// Exchange of the two factors of X × X°.
pub fn map_swap(n: usize) -> Substitution {
    let exprs = (0..2 * n).map(|t| Expr::gen((t + n) % (2 * n))).collect();
    let names = pair_names("X", "X°", n);
    Substitution::from_exprs(names.clone(), names, exprs)
}

/// i: D → D, i*B_i = B_i⁻¹, i*X_i = X̃_i.
pub fn map_i(feed: &Feed) -> Substitution {
    let n = feed.rank();
    let mut exprs: Vec<Expr> = (0..n).map(|i| monomial(2 * n, [(i, -1)])).collect();
    exprs.extend((0..n).map(|i| x_tilde(feed, i)));
    let names = Space::D.names(n);
    Substitution::from_exprs(names.clone(), names, exprs)
}

/// θ: X → H_X. The coordinates of H_X are the characters X^v for v in a
/// saturated basis of Ker p* = {v : Σ_k v_k ε_ki = 0 ∀ i}.
pub fn map_theta(feed: &Feed) -> Substitution {
    let n = feed.rank();
    // (εᵀ v)_i = Σ_k ε_ki v_k
    let et: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|k| feed.eps(k, i)).collect()).collect();
    let kernel = integer_kernel(&int_matrix(&et), n);
    let exprs = kernel
        .iter()
        .map(|v| monomial(n, v.iter().enumerate().map(|(i, c)| (i, c.to_i64().expect("small kernel entries")))))
        .collect::<Vec<_>>();
    let targets = names("H", exprs.len());
    Substitution::from_exprs(Space::X.names(n), targets, exprs)
}

/// θ ∘ μ♯ = θ for the X-space automorphism part in direction k.
pub fn theta_invariant_under_sharp(feed: &Feed, k: usize) -> Result<bool> {
    let (sharp, _) = decompose_mutation(Space::X, feed, k)?;
    let theta = map_theta(feed);
    Ok(sharp.then(&theta)?.same_as(&theta))
}
