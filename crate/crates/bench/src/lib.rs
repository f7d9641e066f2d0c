//! Fixtures shared by the benchmarks in `benches/`.

use clusterdouble::cluster::ClusterTransformation;
use clusterdouble::surface::Triangulation;
use clusterdouble::Feed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A fixed random feed of the given rank with multipliers in {1, 2}.
pub fn random_feed(rank: usize, seed: u64) -> Feed {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Feed::random(&mut rng, rank, 2, &[1, 2])
}

/// The (h+2)-gon relation of the rank-2 feed with ε₁₂ = 1, −ε₂₁ = p.
pub fn polygon(p: i64) -> ClusterTransformation {
    ClusterTransformation::polygon_relation(p).expect("finite type")
}

/// Fan triangulation of an n-gon.
pub fn disc(n: usize) -> Triangulation {
    Triangulation::polygon(n).expect("n ≥ 3")
}
