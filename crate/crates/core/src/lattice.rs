//! Lattices attached to a feed and the canonical maps between them.
//!
//! Conventions: a [`LatticeMap`] stores its matrix with *columns* equal to
//! the images of the source basis vectors. The double lattice Λ_D is ordered
//! `e_1..e_n, f_1..f_n`; the target of φ* is ordered `f_1..f_n, f°_1..f°_n`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{check_index, Result};
use crate::feed::{pos, to_big, Feed};
use crate::linalg::{integer_kernel, rat_from_i64, smith_invariants, QMatrix};

/// A lattice with a basis and a skew-symmetric rational form.
#[derive(Clone, Debug, PartialEq)]
pub struct BasedLattice {
    pub labels: Vec<String>,
    pub form: QMatrix,
}

impl BasedLattice {
    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    /// Least N with N·form integral.
    pub fn denominator(&self) -> BigInt {
        self.form.denominator_lcm()
    }

    pub fn is_valid(&self) -> bool {
        self.form.is_skew() && self.form.rows() == self.rank()
    }
}

/// Linear map between based lattices.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeMap {
    pub name: &'static str,
    /// Columns are images of source basis vectors.
    pub matrix: QMatrix,
    pub source: BasedLattice,
    pub target: BasedLattice,
    /// `Some(s)`: the map must satisfy (Mx, My)_target = s·(x, y)_source.
    pub form_sign: Option<i32>,
}

impl LatticeMap {
    /// Images of basis vectors, one row per source basis vector.
    pub fn images(&self) -> Vec<Vec<BigRational>> {
        (0..self.matrix.cols()).map(|j| self.matrix.column(j)).collect()
    }

    /// Residual Mᵀ T M − s·S (zero iff the form condition holds).
    pub fn form_defect(&self) -> Option<QMatrix> {
        let s = self.form_sign?;
        let pulled = &(&self.matrix.transpose() * &self.target.form) * &self.matrix;
        let expected = self.source.form.scale(&rat_from_i64(s as i64));
        Some(&pulled - &expected)
    }

    pub fn respects_forms(&self) -> bool {
        self.form_defect().is_none_or(|d| d.is_zero())
    }

    pub fn compose(&self, first: &LatticeMap) -> LatticeMap {
        LatticeMap {
            name: "composite",
            matrix: &self.matrix * &first.matrix,
            source: first.source.clone(),
            target: self.target.clone(),
            form_sign: match (self.form_sign, first.form_sign) {
                (Some(a), Some(b)) => Some(a * b),
                _ => None,
            },
        }
    }
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn inv_d(feed: &Feed) -> QMatrix {
    let n = feed.rank();
    QMatrix::from_fn(n, n, |i, j| if i == j { to_big(feed.d()[i].recip()) } else { BigRational::zero() })
}

/// Λ_X with basis e_i and form ε̂.
pub fn x_lattice(feed: &Feed) -> BasedLattice {
    BasedLattice { labels: labels("e", feed.rank()), form: feed.eps_hat_matrix() }
}

/// Λ_X with the opposite form.
pub fn x_lattice_op(feed: &Feed) -> BasedLattice {
    BasedLattice { labels: labels("e°", feed.rank()), form: -&feed.eps_hat_matrix() }
}

/// Λ*_X with basis f_i and no form (forms on the dual side are bivectors).
pub fn x_dual_lattice(feed: &Feed) -> BasedLattice {
    let n = feed.rank();
    BasedLattice { labels: labels("f", n), form: QMatrix::zeros(n, n) }
}

/// Form on Λ_D: (e_i,e_j) = ε̂_ij, (e_i,f_j) = δ_ij/d_i, (f_i,f_j) = 0.
pub fn double_form(feed: &Feed) -> QMatrix {
    let n = feed.rank();
    let eh = feed.eps_hat_matrix();
    let di = inv_d(feed);
    QMatrix::from_fn(2 * n, 2 * n, |a, b| match (a < n, b < n) {
        (true, true) => eh.get(a, b).clone(),
        (true, false) => di.get(a, b - n).clone(),
        (false, true) => -di.get(a - n, b).clone(),
        (false, false) => BigRational::zero(),
    })
}

/// Λ_D = Λ_X ⊕ Λ*_X with its canonical form.
pub fn double_lattice(feed: &Feed) -> BasedLattice {
    let mut l = labels("e", feed.rank());
    l.extend(labels("f", feed.rank()));
    BasedLattice { labels: l, form: double_form(feed) }
}

/// t_k: the basis e′ of the mutated feed expressed in the basis e:
/// e′_i = e_i + [ε_ik]_+ e_k (i ≠ k), e′_k = −e_k.
pub fn mutated_basis(k: usize, feed: &Feed) -> Result<LatticeMap> {
    check_index(k, feed.rank())?;
    let n = feed.rank();
    let m = QMatrix::from_fn(n, n, |a, i| {
        let v = if i == k {
            if a == k { -1 } else { 0 }
        } else if a == i {
            1
        } else if a == k {
            pos(feed.eps(i, k))
        } else {
            0
        };
        rat_from_i64(v)
    });
    Ok(LatticeMap {
        name: "t_k",
        matrix: m,
        source: x_lattice(&feed.mutate(k)?),
        target: x_lattice(feed),
        form_sign: Some(1),
    })
}

/// The quasidual basis: f′_k = −f_k + Σ_j [−ε_kj]_+ f_j, f′_i = f_i.
pub fn quasidual_mutated_basis(k: usize, feed: &Feed) -> Result<LatticeMap> {
    check_index(k, feed.rank())?;
    let n = feed.rank();
    let m = QMatrix::from_fn(n, n, |a, i| {
        let v = if i == k {
            if a == k { -1 } else { pos(-feed.eps(k, a)) }
        } else if a == i {
            1
        } else {
            0
        };
        rat_from_i64(v)
    });
    Ok(LatticeMap {
        name: "quasidual t_k",
        matrix: m,
        source: x_dual_lattice(&feed.mutate(k)?),
        target: x_dual_lattice(feed),
        form_sign: None,
    })
}

/// ⟨e′_i, d_j f′_j⟩ for the mutated and quasidual bases (should be δ_ij).
pub fn mutated_pairing(k: usize, feed: &Feed) -> Result<QMatrix> {
    let t = mutated_basis(k, feed)?.matrix;
    let f = quasidual_mutated_basis(k, feed)?.matrix;
    let n = feed.rank();
    Ok(QMatrix::from_fn(n, n, |i, j| {
        let mut s = BigRational::zero();
        for a in 0..n {
            // ⟨e_a, f_a⟩ = 1/d_a
            s += t.get(a, i) * f.get(a, j) / feed.d_big(a);
        }
        s * feed.d_big(j)
    }))
}

/// p*: Λ_X → Λ*_X, e_i ↦ Σ_j ε_ij f_j.
pub fn p_star(feed: &Feed) -> LatticeMap {
    LatticeMap {
        name: "p*",
        matrix: feed.eps_matrix().transpose(),
        source: x_lattice(feed),
        target: x_dual_lattice(feed),
        form_sign: None,
    }
}

/// p* × p*: Λ_X ⊕ Λ_X → Λ*_X ⊕ Λ*_X.
pub fn p_times_p(feed: &Feed) -> LatticeMap {
    let p = feed.eps_matrix().transpose();
    let mut src = x_lattice(feed);
    src.labels.extend(x_lattice_op(feed).labels);
    src.form = QMatrix::block_diag(&x_lattice(feed).form, &x_lattice_op(feed).form);
    let n = feed.rank();
    let mut tl = labels("f", n);
    tl.extend(labels("f°", n));
    LatticeMap {
        name: "p*×p*",
        matrix: QMatrix::block_diag(&p, &p),
        source: src,
        target: BasedLattice { labels: tl, form: QMatrix::zeros(2 * n, 2 * n) },
        form_sign: None,
    }
}

/// π* = (Id, Id + p*): Λ_X ⊕ Λ_X^op → Λ_D.
pub fn pi_star(feed: &Feed) -> LatticeMap {
    let n = feed.rank();
    let m = QMatrix::from_fn(2 * n, 2 * n, |a, c| {
        let (ci, second) = if c < n { (c, false) } else { (c - n, true) };
        let v = if a < n {
            i64::from(a == ci)
        } else if second {
            feed.eps(ci, a - n)
        } else {
            0
        };
        rat_from_i64(v)
    });
    let mut src = x_lattice(feed);
    src.labels.extend(x_lattice_op(feed).labels);
    src.form = QMatrix::block_diag(&x_lattice(feed).form, &x_lattice_op(feed).form);
    LatticeMap { name: "π*", matrix: m, source: src, target: double_lattice(feed), form_sign: Some(1) }
}

/// φ*: Λ_D → Λ*_X ⊕ Λ*_X, e_i ↦ p*(e_i) (first copy), f_j ↦ f°_j − f_j.
pub fn phi_star(feed: &Feed) -> LatticeMap {
    let n = feed.rank();
    let m = QMatrix::from_fn(2 * n, 2 * n, |a, c| {
        let v = if c < n {
            if a < n { feed.eps(c, a) } else { 0 }
        } else {
            let j = c - n;
            if a == j {
                -1
            } else if a == n + j {
                1
            } else {
                0
            }
        };
        rat_from_i64(v)
    });
    let mut tl = labels("f", n);
    tl.extend(labels("f°", n));
    LatticeMap {
        name: "φ*",
        matrix: m,
        source: double_lattice(feed),
        target: BasedLattice { labels: tl, form: QMatrix::zeros(2 * n, 2 * n) },
        form_sign: None,
    }
}

/// i*: Λ_D → Λ_D, f_j ↦ −f_j, e_i ↦ e_i + p*(e_i). Reverses the form.
pub fn i_star(feed: &Feed) -> LatticeMap {
    let n = feed.rank();
    let m = QMatrix::from_fn(2 * n, 2 * n, |a, c| {
        let v = if c < n {
            if a < n {
                i64::from(a == c)
            } else {
                feed.eps(c, a - n)
            }
        } else if a == c {
            -1
        } else {
            0
        };
        rat_from_i64(v)
    });
    LatticeMap { name: "i*", matrix: m, source: double_lattice(feed), target: double_lattice(feed), form_sign: Some(-1) }
}

/// j*: Λ_D → Λ_X, the projection killing Λ*_X.
pub fn j_star(feed: &Feed) -> LatticeMap {
    let n = feed.rank();
    let m = QMatrix::from_fn(n, 2 * n, |a, c| rat_from_i64(i64::from(c < n && a == c)));
    LatticeMap { name: "j*", matrix: m, source: double_lattice(feed), target: x_lattice(feed), form_sign: None }
}

/// The bivector ω_D = −½ Σ ε̃_ij f_i∧f_j − Σ d_i f_i∧e_i as an antisymmetric
/// matrix W (ω = ½ Σ W_ab b_a∧b_b) in the basis e, f.
pub fn omega_d_bivector(feed: &Feed) -> QMatrix {
    let n = feed.rank();
    let et = feed.eps_tilde_matrix();
    QMatrix::from_fn(2 * n, 2 * n, |a, b| match (a < n, b < n) {
        (false, false) => -et.get(a - n, b - n).clone(),
        (true, false) if b - n == a => feed.d_big(a),
        (false, true) if a - n == b => -feed.d_big(b),
        _ => BigRational::zero(),
    })
}

/// Result of inverting ω_D.
#[derive(Clone, Debug)]
pub struct DoubleLatticeData {
    pub bivector: QMatrix,
    /// Dual form −W⁻¹; should coincide with [`double_form`].
    pub dual_form: QMatrix,
}

impl DoubleLatticeData {
    pub fn matches_canonical_form(&self, feed: &Feed) -> bool {
        self.dual_form == double_form(feed)
    }
}

/// Builds ω_D and inverts it.
pub fn omega_d(feed: &Feed) -> Result<DoubleLatticeData> {
    let w = omega_d_bivector(feed);
    let dual_form = -&w.inverse()?;
    Ok(DoubleLatticeData { bivector: w, dual_form })
}

/// Push a bivector forward along a map: M W Mᵀ.
pub fn push_bivector(map: &LatticeMap, w: &QMatrix) -> QMatrix {
    &(&map.matrix * w) * &map.matrix.transpose()
}

/// ω_X − ω°_X as a bivector on Λ*_X ⊕ Λ*_X.
pub fn omega_x_minus_op(feed: &Feed) -> QMatrix {
    let et = feed.eps_tilde_matrix();
    QMatrix::block_diag(&et, &-&et)
}

/// Kernel/cokernel data of p*.
#[derive(Clone, Debug, PartialEq)]
pub struct SmithTori {
    /// Saturated basis of Ker p* (vectors v with vᵀε = 0).
    pub kernel: Vec<Vec<BigInt>>,
    pub image_rank: usize,
    pub coker_free_rank: usize,
    /// Invariant factors > 1 of Coker p*.
    pub coker_torsion: Vec<BigInt>,
}

impl SmithTori {
    pub fn kernel_rank(&self) -> usize {
        self.kernel.len()
    }
}

pub fn smith_tori(feed: &Feed) -> SmithTori {
    let n = feed.rank();
    // matrix of p* (columns = images): εᵀ
    let m: Vec<Vec<BigInt>> = (0..n).map(|a| (0..n).map(|c| BigInt::from(feed.eps(c, a))).collect()).collect();
    let kernel = integer_kernel(&m, n);
    let inv = smith_invariants(&m, n);
    let image_rank = inv.len();
    SmithTori {
        kernel,
        image_rank,
        coker_free_rank: n - image_rank,
        coker_torsion: inv.into_iter().filter(|x| !x.is_one()).collect(),
    }
}

/// A monomial map of tori is surjective iff the character-lattice map is
/// injective, i.e. has full column rank.
pub fn monomial_map_surjective(m: &LatticeMap) -> bool {
    m.matrix.rank() == m.matrix.cols()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn a2() -> Feed {
        Feed::skew(vec![vec![0, 1], vec![-1, 0]]).unwrap()
    }

    fn ints(m: &QMatrix) -> Vec<Vec<i64>> {
        m.to_integer().unwrap().iter().map(|r| r.iter().map(|x| i64::try_from(x).unwrap()).collect()).collect()
    }

    #[test]
    fn mutated_basis_rank2_is_diag_flip() {
        let t = mutated_basis(0, &a2()).unwrap();
        assert_eq!(ints(&t.matrix), vec![vec![-1, 0], vec![0, 1]]);
        assert!(t.respects_forms());
    }

    #[test]
    fn mutated_basis_a3_middle() {
        let f = Feed::skew(vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]]).unwrap();
        let t = mutated_basis(1, &f).unwrap();
        // columns: e′_1 = e_1 + e_2 ([ε_12]_+ = 1), e′_2 = −e_2, e′_3 = e_3
        assert_eq!(ints(&t.matrix), vec![vec![1, 0, 0], vec![1, -1, 0], vec![0, 0, 1]]);
        // brute-force: (e′_i, e′_j) against the mutated ε̂
        let eh = f.eps_hat_matrix();
        let mh = f.mutate(1).unwrap().eps_hat_matrix();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(eh.pair(&t.matrix.column(i), &t.matrix.column(j)), *mh.get(i, j));
            }
        }
    }

    #[test]
    fn quasidual_examples() {
        let f = Feed::skew(vec![vec![0, -1], vec![1, 0]]).unwrap();
        let q = quasidual_mutated_basis(0, &f).unwrap();
        assert_eq!(ints(&q.matrix), vec![vec![-1, 0], vec![1, 1]]);
        let q = quasidual_mutated_basis(0, &a2()).unwrap();
        assert_eq!(ints(&q.matrix), vec![vec![-1, 0], vec![0, 1]]);
    }

    #[test]
    fn p_star_images_are_rows_of_eps() {
        let p = p_star(&a2());
        let imgs: Vec<Vec<BigRational>> = p.images();
        assert_eq!(imgs[0], vec![rat_from_i64(0), rat_from_i64(1)]);
        assert_eq!(imgs[1], vec![rat_from_i64(-1), rat_from_i64(0)]);
        let z = Feed::skew(vec![vec![0, 0], vec![0, 0]]).unwrap();
        assert_eq!(smith_tori(&z).kernel_rank(), 2);
    }

    #[test]
    fn omega_d_rank2_entries() {
        let f = a2();
        let data = omega_d(&f).unwrap();
        assert!(data.matches_canonical_form(&f));
        assert_eq!(*data.dual_form.get(0, 2), rat_from_i64(1));
        assert!(data.dual_form.get(2, 3).is_zero());
    }

    #[test]
    fn smith_tori_examples() {
        let s = smith_tori(&a2());
        assert_eq!(s.kernel_rank(), 0);
        assert!(s.coker_torsion.is_empty());
        assert_eq!(s.coker_free_rank, 0);
        let z = Feed::skew(vec![vec![0; 3]; 3]).unwrap();
        let s = smith_tori(&z);
        assert_eq!((s.kernel_rank(), s.coker_free_rank), (3, 3));
        let t = Feed::skew(vec![vec![0, 2, -2], vec![-2, 0, 2], vec![2, -2, 0]]).unwrap();
        let s = smith_tori(&t);
        assert_eq!(s.kernel_rank(), 1);
        assert_eq!(s.coker_torsion, vec![BigInt::from(2), BigInt::from(2)]);
    }

    #[test]
    fn surjectivity_examples() {
        let f = a2();
        let id = LatticeMap {
            name: "id",
            matrix: QMatrix::identity(2),
            source: x_lattice(&f),
            target: x_lattice(&f),
            form_sign: Some(1),
        };
        assert!(monomial_map_surjective(&id));
        let mut zero = id.clone();
        zero.matrix = QMatrix::zeros(2, 2);
        assert!(!monomial_map_surjective(&zero));
        assert!(monomial_map_surjective(&phi_star(&f)));
    }

    proptest! {
        #[test]
        fn canonical_maps_on_random_feeds(seed in any::<u64>(), k in 0usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = Feed::random(&mut rng, 4, 3, &[1, 2, 3]);
            let n = f.rank();
            // t_k transports the form to the mutated one; t′_k t_k preserves it
            let t = mutated_basis(k, &f).unwrap();
            prop_assert!(t.respects_forms());
            let t2 = mutated_basis(k, &f.mutate(k).unwrap()).unwrap();
            let tt = &t.matrix * &t2.matrix;
            prop_assert_eq!(&(&tt.transpose() * &f.eps_hat_matrix()) * &tt, f.eps_hat_matrix());
            prop_assert_eq!(mutated_pairing(k, &f).unwrap(), QMatrix::identity(n));
            // π* respects forms, i* reverses them and is an involution
            prop_assert!(pi_star(&f).respects_forms());
            let i = i_star(&f);
            prop_assert!(i.respects_forms());
            prop_assert_eq!(&i.matrix * &i.matrix, QMatrix::identity(2 * n));
            // diagrams
            let jp = &j_star(&f).matrix * &pi_star(&f).matrix;
            let idid = QMatrix::from_fn(n, 2 * n, |a, c| rat_from_i64(i64::from(a == c % n)));
            prop_assert_eq!(jp, idid);
            prop_assert_eq!(&phi_star(&f).matrix * &pi_star(&f).matrix, p_times_p(&f).matrix);
            // φ*(ω_D) = ω_X − ω°_X, and ω_D inverts to the canonical form
            let data = omega_d(&f).unwrap();
            prop_assert!(data.matches_canonical_form(&f));
            prop_assert_eq!(push_bivector(&phi_star(&f), &data.bivector), omega_x_minus_op(&f));
            // i* negates the dual form too
            let idf = &(&i.matrix.transpose() * &data.dual_form) * &i.matrix;
            prop_assert_eq!(idf, -&data.dual_form);
            // rank–nullity and rank(p*) = rank(ε)
            let s = smith_tori(&f);
            prop_assert_eq!(s.kernel_rank() + s.image_rank, n);
            prop_assert_eq!(s.image_rank, f.eps_matrix().rank());
        }
    }
}
