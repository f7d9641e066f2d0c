//! Mutation substitutions and their automorphism/monomial decompositions.

use super::{Space, Substitution};
use crate::error::{check_index, Error, Result};
use crate::feed::Feed;
use crate::symbolic::Expr;

fn monomial(nvars: usize, factors: impl IntoIterator<Item = (usize, i64)>) -> Expr {
    let mut e = vec![0i32; nvars];
    for (i, k) in factors {
        e[i] += k as i32;
    }
    Expr::monomial(&e)
}

fn one_plus(x: Expr) -> Expr {
    Expr::add(vec![Expr::one(), x])
}

/// Products 𝔹⁺_k = Π_{ε_kj>0} Y_j^{ε_kj} and 𝔹⁻_k = Π_{ε_kj<0} Y_j^{−ε_kj}
/// over generators `Y_j = offset + j`.
fn plus_minus(feed: &Feed, k: usize, nvars: usize, offset: usize) -> (Expr, Expr) {
    let n = feed.rank();
    let plus = monomial(nvars, (0..n).filter(|&j| feed.eps(k, j) > 0).map(|j| (offset + j, feed.eps(k, j))));
    let minus = monomial(nvars, (0..n).filter(|&j| feed.eps(k, j) < 0).map(|j| (offset + j, -feed.eps(k, j))));
    (plus, minus)
}

/// X̃_i = X_i Π_j B_j^{ε_ij} in the D-generators (B_1..B_n, X_1..X_n).
pub fn x_tilde(feed: &Feed, i: usize) -> Expr {
    let n = feed.rank();
    monomial(2 * n, std::iter::once((n + i, 1)).chain((0..n).map(|j| (j, feed.eps(i, j)))))
}

/// X-part of a mutation, with X_j the generator `offset + j`.
fn x_images(feed: &Feed, k: usize, nvars: usize, offset: usize) -> Vec<Expr> {
    let xk = Expr::gen(offset + k);
    (0..feed.rank())
        .map(|j| {
            let xj = Expr::gen(offset + j);
            let e = feed.eps(j, k);
            if j == k {
                monomial(nvars, [(offset + k, -1)])
            } else if e < 0 {
                Expr::mul(vec![xj, Expr::pow(one_plus(xk.clone()), (-e) as i32)])
            } else if e > 0 {
                let inv = Expr::div(Expr::one(), xk.clone());
                Expr::div(xj, Expr::pow(one_plus(inv), e as i32))
            } else {
                xj
            }
        })
        .collect()
}

/// X_i ↦ X_i (1+X_k)^{−ε_ik}, the automorphism part on X-generators.
fn x_sharp_images(feed: &Feed, k: usize, offset: usize) -> Vec<Expr> {
    let factor = one_plus(Expr::gen(offset + k));
    (0..feed.rank())
        .map(|i| {
            let xi = Expr::gen(offset + i);
            let e = feed.eps(i, k);
            match e.signum() {
                -1 => Expr::mul(vec![xi, Expr::pow(factor.clone(), (-e) as i32)]),
                1 => Expr::div(xi, Expr::pow(factor.clone(), e as i32)),
                _ => xi,
            }
        })
        .collect()
}

/// X′_i ↦ X_i X_k^{[ε_ik]₊}, X′_k ↦ X_k⁻¹.
fn x_prime_images(feed: &Feed, k: usize, nvars: usize, offset: usize) -> Vec<Expr> {
    (0..feed.rank())
        .map(|i| {
            if i == k {
                monomial(nvars, [(offset + k, -1)])
            } else {
                monomial(nvars, [(offset + i, 1), (offset + k, feed.eps(i, k).max(0))])
            }
        })
        .collect()
}

fn sub(space: Space, n: usize, exprs: Vec<Expr>) -> Substitution {
    let names = space.names(n);
    Substitution::from_exprs(names.clone(), names, exprs)
}

/// Pullback of the X-space mutation μ_k.
pub fn x_mutation(feed: &Feed, k: usize) -> Result<Substitution> {
    check_index(k, feed.rank())?;
    let n = feed.rank();
    Ok(sub(Space::X, n, x_images(feed, k, n, 0)))
}

/// Pullback of the A-space mutation: A′_k ↦ (𝔸⁻_k + 𝔸⁺_k)/A_k.
pub fn a_mutation(feed: &Feed, k: usize) -> Result<Substitution> {
    check_index(k, feed.rank())?;
    let n = feed.rank();
    let (plus, minus) = plus_minus(feed, k, n, 0);
    let exprs = (0..n)
        .map(|i| if i == k { Expr::div(Expr::add(vec![minus.clone(), plus.clone()]), Expr::gen(k)) } else { Expr::gen(i) })
        .collect();
    Ok(sub(Space::A, n, exprs))
}

/// Pullback of the D-space mutation on (B_1..B_n, X_1..X_n).
pub fn d_mutation(feed: &Feed, k: usize) -> Result<Substitution> {
    check_index(k, feed.rank())?;
    let n = feed.rank();
    let (plus, minus) = plus_minus(feed, k, 2 * n, 0);
    let xk = Expr::gen(n + k);
    let bk = Expr::div(
        Expr::add(vec![minus, Expr::mul(vec![xk.clone(), plus])]),
        Expr::mul(vec![Expr::gen(k), one_plus(xk)]),
    );
    let mut exprs: Vec<Expr> = (0..n).map(|i| if i == k { bk.clone() } else { Expr::gen(i) }).collect();
    exprs.extend(x_images(feed, k, 2 * n, n));
    Ok(sub(Space::D, n, exprs))
}

/// Mutation substitution on the chosen space.
pub fn mutation(space: Space, feed: &Feed, k: usize) -> Result<Substitution> {
    match space {
        Space::X => x_mutation(feed, k),
        Space::A => a_mutation(feed, k),
        Space::D => d_mutation(feed, k),
    }
}

/// Relabelling Y′_i ↦ Y_{σ(i)} on every family of generators.
pub fn permutation(space: Space, n: usize, sigma: &[usize]) -> Result<Substitution> {
    let mut seen = vec![false; n];
    if sigma.len() != n || sigma.iter().any(|&s| s >= n || std::mem::replace(&mut seen[s], true)) {
        return Err(Error::InvalidParam(format!("{sigma:?} is not a permutation of {n} indices")));
    }
    let blocks = if space == Space::D { 2 } else { 1 };
    let exprs = (0..blocks).flat_map(|b| sigma.iter().map(move |&s| Expr::gen(b * n + s))).collect();
    Ok(sub(space, n, exprs))
}

/// The pair (μ♯, μ′): an automorphism of the source torus followed by the
/// monomial isomorphism to the mutated torus, with μ = compose(μ♯, μ′).
pub fn decompose_mutation(space: Space, feed: &Feed, k: usize) -> Result<(Substitution, Substitution)> {
    check_index(k, feed.rank())?;
    let n = feed.rank();
    let (sharp, prime) = match space {
        Space::X => (x_sharp_images(feed, k, 0), x_prime_images(feed, k, n, 0)),
        Space::A => {
            // A_k ↦ A_k (1 + p*X_k)⁻¹ = A_k 𝔸⁻_k/(𝔸⁻_k + 𝔸⁺_k);  A′_k ↦ 𝔸⁻_k/A_k
            let (plus, minus) = plus_minus(feed, k, n, 0);
            let ak_sharp = Expr::div(
                Expr::mul(vec![Expr::gen(k), minus.clone()]),
                Expr::add(vec![minus.clone(), plus]),
            );
            let sharp = (0..n).map(|i| if i == k { ak_sharp.clone() } else { Expr::gen(i) }).collect();
            let prime = (0..n).map(|i| if i == k { Expr::div(minus.clone(), Expr::gen(k)) } else { Expr::gen(i) }).collect();
            (sharp, prime)
        }
        Space::D => {
            // B_k ↦ B_k (1+X_k)/(1+X̃_k);  B′_k ↦ 𝔹⁻_k/B_k
            let (_, minus) = plus_minus(feed, k, 2 * n, 0);
            let bk_sharp = Expr::div(
                Expr::mul(vec![Expr::gen(k), one_plus(Expr::gen(n + k))]),
                one_plus(x_tilde(feed, k)),
            );
            let mut sharp: Vec<Expr> = (0..n).map(|i| if i == k { bk_sharp.clone() } else { Expr::gen(i) }).collect();
            sharp.extend(x_sharp_images(feed, k, n));
            let mut prime: Vec<Expr> = (0..n).map(|i| if i == k { Expr::div(minus.clone(), Expr::gen(k)) } else { Expr::gen(i) }).collect();
            prime.extend(x_prime_images(feed, k, 2 * n, n));
            (sharp, prime)
        }
    };
    Ok((sub(space, n, sharp), sub(space, n, prime)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{is_positive_laurent, Poly, RatFun};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn a2() -> Feed {
        Feed::rank2(1)
    }

    fn display(s: &Substitution) -> Vec<String> {
        s.exprs.iter().map(|e| e.display(&s.source)).collect()
    }

    /// Independent oracle: X′_i as an explicit quotient of polynomials.
    fn x_oracle(feed: &Feed, k: usize) -> Vec<RatFun> {
        let n = feed.rank();
        let x = |i| Poly::var(n, i);
        (0..n)
            .map(|i| {
                let e = feed.eps(i, k);
                if i == k {
                    RatFun::new(Poly::one(n), x(k)).unwrap()
                } else if e >= 0 {
                    // X_i X_k^e / (1+X_k)^e
                    let num = &x(i) * &x(k).pow(e as u32);
                    RatFun::new(num, (&Poly::one(n) + &x(k)).pow(e as u32)).unwrap()
                } else {
                    RatFun::from_poly(&x(i) * &(&Poly::one(n) + &x(k)).pow((-e) as u32))
                }
            })
            .collect()
    }

    #[test]
    fn rank2_x_mutation_example() {
        let m = x_mutation(&a2(), 0).unwrap();
        assert_eq!(display(&m), vec!["1/X1".to_string(), "X2*(1+X1)".to_string()]);
        assert_eq!(m.images, x_oracle(&a2(), 0));
    }

    #[test]
    fn rank2_a_and_d_examples() {
        let a = a_mutation(&a2(), 0).unwrap();
        assert_eq!(a.exprs[0].display(&a.source), "(1+A2)/A1");
        let d = d_mutation(&a2(), 0).unwrap();
        assert_eq!(d.exprs[0].display(&d.source), "(1+X1*B2)/(B1*(1+X1))");
    }

    #[test]
    fn d_mutation_at_unit_b_reduces_to_x_mutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let f = Feed::random(&mut rng, 3, 2, &[1, 2]);
            let n = f.rank();
            let d = d_mutation(&f, 1).unwrap();
            let x = x_mutation(&f, 1).unwrap();
            // restrict to B = 1: substitute B_j ↦ 1, X_j ↦ X_j
            let restrict: Vec<RatFun> = (0..2 * n).map(|i| if i < n { RatFun::one(n) } else { RatFun::var(n, i - n) }).collect();
            for i in 0..n {
                assert!(d.images[i].substitute(&restrict).unwrap().is_one());
                assert_eq!(d.images[n + i].substitute(&restrict).unwrap(), x.images[i]);
            }
        }
    }

    #[test]
    fn pentagon_orbit_of_a_coordinates() {
        let f = a2();
        let mut feed = f.clone();
        let mut acc = Substitution::identity(Space::A.names(2));
        let mut seen = Vec::new();
        for _ in 0..5 {
            let m = a_mutation(&feed, 0).unwrap();
            let s = permutation(Space::A, 2, &[1, 0]).unwrap();
            acc = acc.then(&m).unwrap().then(&s).unwrap();
            feed = feed.mutate(0).unwrap().permute(&[1, 0]).unwrap();
            for r in &acc.images {
                assert!(is_positive_laurent(r), "{}", r.display(&acc.source));
            }
            seen.push(acc.images[1].display(&acc.source));
        }
        assert!(acc.is_identity());
        let target = RatFun::new(&(&Poly::one(2) + &Poly::var(2, 0)) + &Poly::var(2, 1), &Poly::var(2, 0) * &Poly::var(2, 1)).unwrap();
        assert!(seen.contains(&target.display(&acc.source)), "{seen:?}");
    }

    #[test]
    fn zero_column_is_fixed() {
        let f = Feed::skew(vec![vec![0, 1, 0], vec![-1, 0, 0], vec![0, 0, 0]]).unwrap();
        let m = x_mutation(&f, 0).unwrap();
        assert_eq!(m.images[2], RatFun::var(3, 2));
    }

    fn random_feed(seed: u64, n: usize) -> Feed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Feed::random(&mut rng, n, 2, &[1, 2, 3])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn mutations_are_involutions(seed in 0u64..10_000, n in 2usize..4, k in 0usize..4) {
            let f = random_feed(seed, n);
            let k = k % n;
            for space in [Space::X, Space::A, Space::D] {
                let m1 = mutation(space, &f, k).unwrap();
                let m2 = mutation(space, &f.mutate(k).unwrap(), k).unwrap();
                prop_assert!(m1.then(&m2).unwrap().is_identity(), "{:?} {:?}", space, f);
            }
        }

        #[test]
        fn decomposition_recovers_mutation(seed in 0u64..10_000, n in 2usize..6, k in 0usize..6) {
            let f = random_feed(seed, n);
            let k = k % n;
            for space in [Space::X, Space::A, Space::D] {
                let (sharp, prime) = decompose_mutation(space, &f, k).unwrap();
                let full = mutation(space, &f, k).unwrap();
                prop_assert!(sharp.then(&prime).unwrap().same_as(&full), "{:?} {:?}", space, f);
            }
        }

        #[test]
        fn x_mutation_matches_oracle(seed in 0u64..10_000, n in 2usize..6, k in 0usize..6) {
            let f = random_feed(seed, n);
            let k = k % n;
            prop_assert_eq!(x_mutation(&f, k).unwrap().images, x_oracle(&f, k));
        }
    }
}
