//! Numeric Poisson-map checks in logarithmic coordinates.

use num_traits::ToPrimitive;

use super::{Space, Substitution};
use crate::feed::Feed;
use crate::lattice::double_form;

/// {x_i, x_j} = ε̂_ij for x_i = log X_i.
pub fn x_poisson_matrix(feed: &Feed) -> Vec<Vec<f64>> {
    let n = feed.rank();
    (0..n).map(|i| (0..n).map(|j| feed.eps_hat(i, j).to_f64().unwrap()).collect()).collect()
}

/// Log-coordinate bracket on the D-torus in generator order
/// (b_1..b_n, x_1..x_n): {x_i, x_j} = ε̂_ij, {x_i, b_j} = δ_ij/d_i, {b_i, b_j} = 0.
pub fn double_poisson_matrix(feed: &Feed) -> Vec<Vec<f64>> {
    let n = feed.rank();
    let form = double_form(feed).to_f64(); // order (x, b)
    let reorder = |a: usize| if a < n { n + a } else { a - n };
    (0..2 * n).map(|a| (0..2 * n).map(|b| form[reorder(a)][reorder(b)]).collect()).collect()
}

fn bracket(space: Space, feed: &Feed) -> Vec<Vec<f64>> {
    match space {
        Space::D => double_poisson_matrix(feed),
        _ => x_poisson_matrix(feed),
    }
}

/// max |J Π Jᵀ − Π′| for a substitution from the `source` feed's torus to
/// the `target` feed's torus, at a positive point.
pub fn poisson_residual(space: Space, sub: &Substitution, source: &Feed, target: &Feed, point: &[f64]) -> f64 {
    let j = sub.log_jacobian(point);
    let p = bracket(space, source);
    let p2 = bracket(space, target);
    let m = j.len();
    let mut worst = 0.0f64;
    for a in 0..m {
        for b in 0..m {
            let mut s = 0.0;
            for (c, pc) in p.iter().enumerate() {
                for (d, pcd) in pc.iter().enumerate() {
                    s += j[a][c] * pcd * j[b][d];
                }
            }
            worst = worst.max((s - p2[a][b]).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::mutation;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn mutations_are_poisson(seed in 0u64..10_000, n in 2usize..5, k in 0usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = Feed::random(&mut rng, n, 2, &[1, 2, 3]);
            let k = k % n;
            let g = f.mutate(k).unwrap();
            for space in [Space::X, Space::D] {
                let s = mutation(space, &f, k).unwrap();
                let pt: Vec<f64> = (0..space.nvars(n)).map(|_| rng.gen_range(0.2..5.0)).collect();
                let r = poisson_residual(space, &s, &f, &g, &pt);
                prop_assert!(r < 1e-10, "{:?} residual {}", space, r);
            }
        }
    }
}
