//! Feeds: an exchange matrix together with positive rational multipliers.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_index, Error, Result};
use crate::linalg::QMatrix;

/// `[x]_+ = max(x, 0)`.
#[inline]
pub fn pos(x: i64) -> i64 {
    x.max(0)
}

/// A feed `(I, ε, d)`: integer exchange matrix and positive multipliers with
/// `d_i ε_ij = −d_j ε_ji`.
///
/// Indices are 0-based throughout the API.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Feed {
    eps: Vec<Vec<i64>>,
    d: Vec<Rational64>,
    frozen: Vec<usize>,
}

impl Feed {
    pub fn new(eps: Vec<Vec<i64>>, d: Vec<Rational64>) -> Result<Self> {
        Self::with_frozen(eps, d, Vec::new())
    }

    pub fn with_frozen(eps: Vec<Vec<i64>>, d: Vec<Rational64>, frozen: Vec<usize>) -> Result<Self> {
        let n = eps.len();
        if eps.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidFeed("exchange matrix is not square".into()));
        }
        if d.len() != n {
            return Err(Error::InvalidFeed(format!("expected {n} multipliers, got {}", d.len())));
        }
        if let Some(x) = d.iter().find(|x| !x.is_positive()) {
            return Err(Error::InvalidFeed(format!("multiplier {x} is not positive")));
        }
        for i in 0..n {
            for j in 0..n {
                if d[i] * eps[i][j] != -(d[j] * eps[j][i]) {
                    return Err(Error::InvalidFeed(format!(
                        "not skew-symmetrizable at ({i},{j}): d_i·ε_ij = {}, d_j·ε_ji = {}",
                        d[i] * eps[i][j],
                        d[j] * eps[j][i]
                    )));
                }
            }
        }
        if let Some(&f) = frozen.iter().find(|&&f| f >= n) {
            return Err(Error::IndexOutOfRange { index: f, rank: n });
        }
        Ok(Feed { eps, d, frozen })
    }

    /// Feed with all multipliers equal to one (ε must be skew-symmetric).
    pub fn skew(eps: Vec<Vec<i64>>) -> Result<Self> {
        let n = eps.len();
        Self::new(eps, vec![Rational64::one(); n])
    }

    /// The rank-2 feed ε = [[0, p], [−1, 0]], d = (1, p) behind the
    /// (h+2)-gon relations; p = 0 gives A₁×A₁ with d = (1, 1).
    pub fn rank2(p: i64) -> Self {
        let d2 = if p == 0 { 1 } else { p };
        Feed::new(vec![vec![0, p], vec![if p == 0 { 0 } else { -1 }, 0]], vec![Rational64::one(), Rational64::from(d2)])
            .expect("rank-2 feed is valid")
    }

    /// Coxeter number h of the rank-2 feed for p ∈ {0, 1, 2, 3}.
    pub fn coxeter_number(p: i64) -> Option<usize> {
        match p {
            0 => Some(2),
            1 => Some(3),
            2 => Some(4),
            3 => Some(6),
            _ => None,
        }
    }

    /// A random skew-symmetrizable feed with multipliers drawn from `mults`
    /// and |ε_ij| ≤ `max_entry`.
    pub fn random<R: Rng>(rng: &mut R, n: usize, max_entry: i64, mults: &[i64]) -> Self {
        let d: Vec<i64> = (0..n).map(|_| mults[rng.gen_range(0..mults.len())]).collect();
        let mut eps = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                // b = d_i ε_ij must be a multiple of lcm(d_i, d_j)
                let l = d[i].lcm(&d[j]);
                let step_i = l / d[i];
                let step_j = l / d[j];
                let cmax = max_entry / step_i.max(step_j);
                if cmax == 0 {
                    continue;
                }
                let c = rng.gen_range(-cmax..=cmax);
                eps[i][j] = c * step_i;
                eps[j][i] = -c * step_j;
            }
        }
        Feed::new(eps, d.into_iter().map(Rational64::from).collect()).expect("random feed is valid")
    }

    pub fn rank(&self) -> usize {
        self.eps.len()
    }

    pub fn eps(&self, i: usize, j: usize) -> i64 {
        self.eps[i][j]
    }

    pub fn epsilon(&self) -> &[Vec<i64>] {
        &self.eps
    }

    pub fn d(&self) -> &[Rational64] {
        &self.d
    }

    pub fn frozen(&self) -> &[usize] {
        &self.frozen
    }

    pub fn d_big(&self, i: usize) -> BigRational {
        BigRational::new(BigInt::from(*self.d[i].numer()), BigInt::from(*self.d[i].denom()))
    }

    /// ε̂_ij = ε_ij / d_j, the skew-symmetric form on Λ_X.
    pub fn eps_hat(&self, i: usize, j: usize) -> Rational64 {
        Rational64::from(self.eps[i][j]) / self.d[j]
    }

    /// ε̃_ij = d_i ε_ij.
    pub fn eps_tilde(&self, i: usize, j: usize) -> Rational64 {
        self.d[i] * self.eps[i][j]
    }

    pub fn eps_matrix(&self) -> QMatrix {
        QMatrix::from_i64_rows(&self.eps)
    }

    pub fn eps_hat_matrix(&self) -> QMatrix {
        let n = self.rank();
        QMatrix::from_fn(n, n, |i, j| to_big(self.eps_hat(i, j)))
    }

    pub fn eps_tilde_matrix(&self) -> QMatrix {
        let n = self.rank();
        QMatrix::from_fn(n, n, |i, j| to_big(self.eps_tilde(i, j)))
    }

    /// Smallest L with every q_i = q^{1/d_i} and every q^{ε̂_ij} an integral
    /// power of q^{1/L}: the lcm of the multiplier numerators.
    pub fn q_root_order(&self) -> i64 {
        self.d.iter().fold(1i64, |acc, x| acc.lcm(x.numer()))
    }

    /// Mutation in direction `k`.
    pub fn mutate(&self, k: usize) -> Result<Feed> {
        check_index(k, self.rank())?;
        let n = self.rank();
        let e = &self.eps;
        let eps = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == k || j == k {
                            -e[i][j]
                        } else if e[i][k] * e[k][j] <= 0 {
                            e[i][j]
                        } else {
                            e[i][j] + e[i][k].abs() * e[k][j]
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Feed { eps, d: self.d.clone(), frozen: self.frozen.clone() })
    }

    /// Relabelled feed with ε′_ij = ε_{σ(i)σ(j)}, d′_i = d_{σ(i)}.
    pub fn permute(&self, sigma: &[usize]) -> Result<Feed> {
        let n = self.rank();
        let mut seen = vec![false; n];
        if sigma.len() != n || sigma.iter().any(|&s| s >= n || std::mem::replace(&mut seen[s], true)) {
            return Err(Error::InvalidParam(format!("{sigma:?} is not a permutation of {n} indices")));
        }
        let eps = (0..n).map(|i| (0..n).map(|j| self.eps[sigma[i]][sigma[j]]).collect()).collect();
        let d = (0..n).map(|i| self.d[sigma[i]]).collect();
        let inv: Vec<usize> = {
            let mut v = vec![0; n];
            for (i, &s) in sigma.iter().enumerate() {
                v[s] = i;
            }
            v
        };
        let frozen = self.frozen.iter().map(|&f| inv[f]).collect();
        Ok(Feed { eps, d, frozen })
    }

    /// The chiral dual (I, −ε, d).
    pub fn chiral_dual(&self) -> Feed {
        let eps = self.eps.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        Feed { eps, d: self.d.clone(), frozen: self.frozen.clone() }
    }

    /// The Langlands dual (I, −εᵀ, d⁻¹).
    pub fn langlands_dual(&self) -> Feed {
        let n = self.rank();
        let eps = (0..n).map(|i| (0..n).map(|j| -self.eps[j][i]).collect()).collect();
        let d = self.d.iter().map(|x| x.recip()).collect();
        Feed::with_frozen(eps, d, self.frozen.clone()).expect("Langlands dual of a feed is a feed")
    }

    /// Search for σ with `self.permute(σ) == other` (exponential; rank ≤ 8).
    pub fn isomorphism_to(&self, other: &Feed) -> Option<Vec<usize>> {
        let n = self.rank();
        if other.rank() != n {
            return None;
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let mut found = None;
        permutations(&mut perm, 0, &mut |p| {
            if found.is_none() && self.permute(p).map(|f| f.eps == other.eps && f.d == other.d).unwrap_or(false) {
                found = Some(p.to_vec());
            }
        });
        found
    }
}

pub(crate) fn to_big(x: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
}

pub(crate) fn permutations(v: &mut Vec<usize>, start: usize, f: &mut impl FnMut(&[usize])) {
    if start == v.len() {
        f(v);
        return;
    }
    for i in start..v.len() {
        v.swap(start, i);
        permutations(v, start + 1, f);
        v.swap(start, i);
    }
}

impl fmt::Debug for Feed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d: Vec<String> = self.d.iter().map(|x| x.to_string()).collect();
        write!(f, "Feed(ε={:?}, d=[{}])", self.eps, d.join(", "))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Multiplier {
    Int(i64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
struct FeedJson {
    n: usize,
    epsilon: Vec<Vec<i64>>,
    #[serde(default)]
    d: Option<Vec<Multiplier>>,
    #[serde(default)]
    frozen: Vec<usize>,
}

fn parse_ratio(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let (a, b) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let a: i64 = a.trim().parse().map_err(|_| Error::Parse(format!("bad multiplier `{s}`")))?;
    let b: i64 = b.trim().parse().map_err(|_| Error::Parse(format!("bad multiplier `{s}`")))?;
    if b == 0 {
        return Err(Error::Parse(format!("bad multiplier `{s}`")));
    }
    Ok(Rational64::new(a, b))
}

impl Feed {
    /// Parse the on-disk JSON format
    /// `{"n": 2, "epsilon": [[0,1],[-1,0]], "d": ["1","1"], "frozen": []}`.
    /// Missing `d` means all ones.
    pub fn from_json(text: &str) -> Result<Feed> {
        let raw: FeedJson = serde_json::from_str(text)?;
        if raw.epsilon.len() != raw.n {
            return Err(Error::InvalidFeed(format!("n = {} but epsilon has {} rows", raw.n, raw.epsilon.len())));
        }
        let d = match raw.d {
            None => vec![Rational64::one(); raw.n],
            Some(ds) => ds
                .iter()
                .map(|m| match m {
                    Multiplier::Int(i) => Ok(Rational64::from(*i)),
                    Multiplier::Text(s) => parse_ratio(s),
                })
                .collect::<Result<_>>()?,
        };
        Feed::with_frozen(raw.epsilon, d, raw.frozen)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let d: Vec<String> = self
            .d
            .iter()
            .map(|x| if x.denom().is_one() { x.numer().to_string() } else { format!("{}/{}", x.numer(), x.denom()) })
            .collect();
        serde_json::json!({"n": self.rank(), "epsilon": self.eps, "d": d, "frozen": self.frozen})
    }
}

impl Feed {
    /// Disjoint union (block-diagonal exchange matrix).
    pub fn disjoint_union(&self, rhs: &Feed) -> Feed {
        let (n, m) = (self.rank(), rhs.rank());
        let mut eps = vec![vec![0; n + m]; n + m];
        for i in 0..n {
            eps[i][..n].copy_from_slice(&self.eps[i]);
        }
        for i in 0..m {
            eps[n + i][n..].copy_from_slice(&rhs.eps[i]);
        }
        let mut d = self.d.clone();
        d.extend(rhs.d.iter().copied());
        let mut frozen = self.frozen.clone();
        frozen.extend(rhs.frozen.iter().map(|f| f + n));
        Feed { eps, d, frozen }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Independent mutation rule: ε′_ij = ε_ij + (|ε_ik|ε_kj + ε_ik|ε_kj|)/2.
    fn mutate_oracle(e: &[Vec<i64>], k: usize) -> Vec<Vec<i64>> {
        let n = e.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == k || j == k {
                            -e[i][j]
                        } else {
                            e[i][j] + (e[i][k].abs() * e[k][j] + e[i][k] * e[k][j].abs()) / 2
                        }
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn rank2_mutation_flips_sign() {
        let f = Feed::skew(vec![vec![0, 1], vec![-1, 0]]).unwrap();
        assert_eq!(f.mutate(0).unwrap().epsilon(), &[vec![0, -1], vec![1, 0]]);
    }

    #[test]
    fn a3_mutation_at_middle() {
        let f = Feed::skew(vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]]).unwrap();
        let m = f.mutate(1).unwrap();
        assert_eq!(m.epsilon(), &[vec![0, -1, 1], vec![1, 0, -1], vec![-1, 1, 0]]);
        assert_eq!(m.epsilon(), mutate_oracle(f.epsilon(), 1).as_slice());
    }

    #[test]
    fn out_of_range_rejected() {
        let f = Feed::rank2(1);
        assert!(matches!(f.mutate(2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn not_skew_symmetrizable_rejected() {
        assert!(Feed::skew(vec![vec![0, 1], vec![1, 0]]).is_err());
    }

    #[test]
    fn langlands_dual_unit_multipliers_is_transpose_negated() {
        let f = Feed::skew(vec![vec![0, 2, -1], vec![-2, 0, 3], vec![1, -3, 0]]).unwrap();
        let l = f.langlands_dual();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(l.eps(i, j), -f.eps(j, i));
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let f = Feed::rank2(3);
        let g = Feed::from_json(&f.to_json().to_string()).unwrap();
        assert_eq!(f, g);
        let h = Feed::from_json(r#"{"n":2,"epsilon":[[0,1],[-1,0]],"d":["1/2","1/2"]}"#).unwrap();
        assert_eq!(h.d()[0], Rational64::new(1, 2));
    }

    #[test]
    fn isomorphism_search() {
        let f = Feed::rank2(2);
        let g = f.permute(&[1, 0]).unwrap();
        assert_eq!(f.isomorphism_to(&g), Some(vec![1, 0]));
    }

    proptest! {
        #[test]
        fn mutation_is_involutive_and_valid(seed in any::<u64>(), k in 0usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = Feed::random(&mut rng, 4, 3, &[1, 2, 3]);
            let m = f.mutate(k).unwrap();
            // validity: rebuilding checks skew-symmetrizability
            prop_assert!(Feed::new(m.epsilon().to_vec(), m.d().to_vec()).is_ok());
            let oracle = mutate_oracle(f.epsilon(), k);
            prop_assert_eq!(m.epsilon(), oracle.as_slice());
            prop_assert_eq!(m.mutate(k).unwrap(), f);
        }

        #[test]
        fn langlands_dual_commutes_with_mutation(seed in any::<u64>(), k in 0usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = Feed::random(&mut rng, 4, 3, &[1, 2]);
            prop_assert_eq!(f.mutate(k).unwrap().langlands_dual(), f.langlands_dual().mutate(k).unwrap());
            prop_assert_eq!(f.chiral_dual().chiral_dual(), f);
        }
    }
}
