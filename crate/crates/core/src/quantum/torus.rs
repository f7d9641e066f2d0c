//! Quantum torus algebras attached to a lattice with a rational skew form.
//!
//! Elements are finite sums Σ c_λ e_λ over the symmetric generators e_λ,
//! multiplied by e_λ e_μ = q^{(λ,μ)} e_{λ+μ}. With this sign the generators
//! X_i = e_{e_i} satisfy X_i X_j = q^{2(e_i,e_j)} X_j X_i, the commutation
//! rule that the μ♯ closed formulas and the p* prefactor are built on.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::coef::QCoef;
use crate::error::{Error, Result};
use crate::feed::Feed;
use crate::lattice::double_form;
use crate::linalg::QMatrix;
use crate::symbolic::{Poly, RatFun};

/// Lattice vector in the torus basis.
pub type Lam = Vec<i64>;

/// A lattice ℤ^n with skew form F, presented by the integral matrix
/// S = L·F; coefficients are rational functions of t = q^{1/L}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QTorus {
    names: Vec<String>,
    scaled: Vec<Vec<i64>>,
    root: i64,
}

impl QTorus {
    /// Torus of `form`, with t = q^{1/root}.
    pub fn new(names: Vec<String>, form: &QMatrix, root: i64) -> Result<Self> {
        if !form.is_skew() || form.rows() != names.len() {
            return Err(Error::InvalidParam("quantum torus form must be skew-symmetric of the lattice rank".into()));
        }
        let l = BigRational::from_integer(BigInt::from(root));
        let scaled = form
            .scale(&l)
            .to_integer()
            .map_err(|_| Error::InvalidParam(format!("form is not integral after scaling by {root}")))?
            .into_iter()
            .map(|r| r.into_iter().map(|x| x.to_i64().expect("small form entries")).collect())
            .collect();
        Ok(QTorus { names, scaled, root })
    }

    /// The quantum X-torus: (e_i, e_j) = ε̂_ij, with root order `root`
    /// (a multiple of the feed's `q_root_order`).
    pub fn x_torus_with_root(feed: &Feed, root: i64) -> Result<Self> {
        let names = (1..=feed.rank()).map(|i| format!("X{i}")).collect();
        Self::new(names, &feed.eps_hat_matrix(), root)
    }

    pub fn x_torus(feed: &Feed) -> Self {
        Self::x_torus_with_root(feed, feed.q_root_order()).expect("ε̂ is integral after scaling by the root order")
    }

    /// The quantum double torus in generator order B_1..B_n, X_1..X_n with
    /// (X_i, X_j) = ε̂_ij, (X_i, B_j) = δ_ij/d_i, (B_i, B_j) = 0.
    pub fn d_torus(feed: &Feed) -> Self {
        let n = feed.rank();
        let f = double_form(feed); // order (e = X, f = B)
        let reorder = |a: usize| if a < n { n + a } else { a - n };
        let form = QMatrix::from_fn(2 * n, 2 * n, |a, b| f.get(reorder(a), reorder(b)).clone());
        let mut names: Vec<String> = (1..=n).map(|i| format!("B{i}")).collect();
        names.extend((1..=n).map(|i| format!("X{i}")));
        Self::new(names, &form, feed.q_root_order()).expect("double form is integral after scaling")
    }

    /// The compatible form on the A-lattice, λ = D^{-1} ε^{-T}, so that
    /// p*: e_i ↦ Σ_k ε_ik a_k respects forms (ε λ εᵀ = ε̂).
    pub fn a_form(feed: &Feed) -> Result<QMatrix> {
        let n = feed.rank();
        let inv_t = feed.eps_matrix().transpose().inverse()?;
        Ok(QMatrix::from_fn(n, n, |i, j| inv_t.get(i, j) / feed.d_big(i)))
    }

    /// Root order shared by the X- and A-tori of a nondegenerate feed.
    pub fn a_root(feed: &Feed) -> Result<i64> {
        let den = Self::a_form(feed)?.denominator_lcm().to_i64().expect("small denominators");
        Ok(feed.q_root_order().lcm(&den))
    }

    /// The quantum A-torus with form λ = D^{-1} ε^{-T}; requires det ε ≠ 0.
    pub fn a_torus(feed: &Feed) -> Result<Self> {
        let names = (1..=feed.rank()).map(|i| format!("A{i}")).collect();
        Self::new(names, &Self::a_form(feed)?, Self::a_root(feed)?)
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// L with t = q^{1/L}.
    pub fn root(&self) -> i64 {
        self.root
    }

    /// The integral matrix S = L·F.
    pub fn scaled_form(&self) -> &[Vec<i64>] {
        &self.scaled
    }

    /// L·(λ, μ).
    pub fn pair(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut s = 0;
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                s += x * self.scaled[i][j] * y;
            }
        }
        s
    }

    /// Exponent of t in q_k = q^{1/d_k}.
    pub fn q_k_exponent(&self, d_k: num_rational::Rational64) -> Result<i64> {
        let e = num_rational::Rational64::from(self.root) / d_k;
        if !e.is_integer() {
            return Err(Error::InvalidParam(format!("q^(1/{d_k}) is not a power of q^(1/{})", self.root)));
        }
        Ok(e.to_integer())
    }

    pub fn basis(&self, i: usize) -> Lam {
        let mut v = vec![0; self.rank()];
        v[i] = 1;
        v
    }

    pub fn mono(&self, lam: Lam) -> QTorusElem {
        QTorusElem::term(lam, QCoef::one())
    }

    pub fn gen(&self, i: usize) -> QTorusElem {
        self.mono(self.basis(i))
    }

    pub fn scalar(&self, c: QCoef) -> QTorusElem {
        QTorusElem::term(vec![0; self.rank()], c)
    }

    pub fn one(&self) -> QTorusElem {
        self.scalar(QCoef::one())
    }

    pub fn mul(&self, a: &QTorusElem, b: &QTorusElem) -> QTorusElem {
        let mut out = QTorusElem::zero();
        for (l, c) in &a.terms {
            for (m, d) in &b.terms {
                let sum: Lam = l.iter().zip(m).map(|(x, y)| x + y).collect();
                out.add_term(sum, &(c * d) * &QCoef::t_pow(self.pair(l, m)));
            }
        }
        out
    }

    pub fn product(&self, factors: &[QTorusElem]) -> QTorusElem {
        factors.iter().fold(self.one(), |acc, f| self.mul(&acc, f))
    }

    /// The q-commutator defect a·b − q^{c}·b·a.
    pub fn commutator(&self, a: &QTorusElem, b: &QTorusElem, c_scaled: i64) -> QTorusElem {
        self.mul(a, b).sub(&self.mul(b, a).scale(&QCoef::t_pow(c_scaled)))
    }

    /// ∗: e_λ ↦ e_λ, t ↦ t^{−1}, extended antilinearly.
    pub fn star(&self, a: &QTorusElem) -> QTorusElem {
        let mut out = QTorusElem::zero();
        for (l, c) in &a.terms {
            out.add_term(l.clone(), c.bar());
        }
        out
    }

    /// Coefficient of each ordered monomial X_1^{c_1}⋯X_n^{c_n}:
    /// e_λ = t^{−Σ_{a<b} c_a c_b S_ab} X_1^{c_1}⋯X_n^{c_n}.
    pub fn normal_order(&self, a: &QTorusElem) -> Vec<(Lam, QCoef)> {
        a.terms.iter().map(|(l, c)| (l.clone(), c * &QCoef::t_pow(-self.ordering_exponent(l)))).collect()
    }

    /// Σ_{a<b} c_a c_b S_ab.
    pub fn ordering_exponent(&self, l: &[i64]) -> i64 {
        let mut s = 0;
        for a in 0..l.len() {
            for b in a + 1..l.len() {
                s += l[a] * l[b] * self.scaled[a][b];
            }
        }
        s
    }

    /// Specialisation q = 1: the commutative Laurent polynomial
    /// Σ c_λ(1) x^λ in the torus generators.
    pub fn specialize(&self, a: &QTorusElem) -> Result<RatFun> {
        let n = self.rank();
        let mut acc = RatFun::zero(n);
        for (l, c) in &a.terms {
            let v = c.at_one()?;
            let e: Vec<i32> = l.iter().map(|&x| x as i32).collect();
            let term = RatFun::new(Poly::monomial(e, v.numer().clone()), Poly::constant(n, v.denom().clone()))?;
            acc = &acc + &term;
        }
        Ok(acc)
    }

    pub fn display(&self, a: &QTorusElem) -> String {
        if a.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = a
            .terms
            .iter()
            .map(|(l, c)| {
                let m = self.display_mono(l);
                if c.is_one() {
                    m
                } else {
                    format!("({})*{}", c.display(self.root), m)
                }
            })
            .collect();
        parts.join(" + ")
    }

    /// `e[X1*X2^-1]`-style name of a symmetric monomial.
    pub fn display_mono(&self, l: &[i64]) -> String {
        let inner: Vec<String> = l
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| if c == 1 { self.names[i].clone() } else { format!("{}^{}", self.names[i], c) })
            .collect();
        if inner.is_empty() {
            "1".into()
        } else {
            format!("e[{}]", inner.join("*"))
        }
    }
}

/// A finite linear combination of symmetric monomials e_λ.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct QTorusElem {
    terms: BTreeMap<Lam, QCoef>,
}

impl QTorusElem {
    pub fn zero() -> Self {
        QTorusElem { terms: BTreeMap::new() }
    }

    pub fn term(lam: Lam, c: QCoef) -> Self {
        let mut e = Self::zero();
        e.add_term(lam, c);
        e
    }

    pub fn add_term(&mut self, lam: Lam, c: QCoef) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&lam) {
            Some(old) => {
                let s = &*old + &c;
                if s.is_zero() {
                    self.terms.remove(&lam);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(lam, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Lam, &QCoef)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, lam: &[i64]) -> QCoef {
        self.terms.get(lam).cloned().unwrap_or_else(QCoef::zero)
    }

    pub fn add(&self, other: &QTorusElem) -> QTorusElem {
        let mut out = self.clone();
        for (l, c) in &other.terms {
            out.add_term(l.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &QTorusElem) -> QTorusElem {
        let mut out = self.clone();
        for (l, c) in &other.terms {
            out.add_term(l.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: &QCoef) -> QTorusElem {
        let mut out = QTorusElem::zero();
        for (l, d) in &self.terms {
            out.add_term(l.clone(), d * c);
        }
        out
    }

    /// Image under a monomial map e_λ ↦ e_{Mλ} (columns of `m` are the images
    /// of basis vectors).
    pub fn map_lattice(&self, images: &[Lam]) -> QTorusElem {
        let mut out = QTorusElem::zero();
        for (l, c) in &self.terms {
            out.add_term(apply_lattice(images, l), c.clone());
        }
        out
    }

    /// Keep only terms satisfying `keep`.
    pub fn filter(&self, keep: impl Fn(&[i64]) -> bool) -> QTorusElem {
        QTorusElem { terms: self.terms.iter().filter(|(l, _)| keep(l)).map(|(l, c)| (l.clone(), c.clone())).collect() }
    }
}

impl fmt::Debug for QTorusElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

/// Σ_a λ_a · images[a].
pub fn apply_lattice(images: &[Lam], l: &[i64]) -> Lam {
    let dim = images.first().map_or(0, |v| v.len());
    let mut out = vec![0; dim];
    for (a, &c) in l.iter().enumerate() {
        if c != 0 {
            for (o, x) in out.iter_mut().zip(&images[a]) {
                *o += c * x;
            }
        }
    }
    out
}

/// Whether a monomial map preserves the scaled forms: S′(Ma, Mb) = sign·S(a, b)
/// on all basis pairs (sign −1 for anti-homomorphisms).
pub fn respects_forms(source: &QTorus, target: &QTorus, images: &[Lam], sign: i64) -> bool {
    let n = source.rank();
    source.root() == target.root()
        && (0..n).all(|a| (0..n).all(|b| target.pair(&images[a], &images[b]) == sign * source.scaled_form()[a][b]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a2() -> QTorus {
        QTorus::x_torus(&Feed::rank2(1))
    }

    #[test]
    fn rank2_product_rule() {
        let t = a2();
        let (x1, x2) = (t.gen(0), t.gen(1));
        let e12 = vec![1, 1];
        assert_eq!(t.mul(&x1, &x2), QTorusElem::term(e12.clone(), QCoef::t_pow(1)));
        assert_eq!(t.mul(&x2, &x1), QTorusElem::term(e12, QCoef::t_pow(-1)));
        // X1 X2 = q² X2 X1, i.e. q^{−ε̂12} X1X2 = q^{−ε̂21} X2X1
        assert!(t.commutator(&x1, &x2, 2).is_zero());
    }

    #[test]
    fn double_relations() {
        let f = Feed::new(vec![vec![0, 1], vec![-3, 0]], vec![3.into(), 1.into()]).unwrap();
        let t = QTorus::d_torus(&f);
        assert_eq!(t.root(), 3);
        let n = 2;
        for i in 0..n {
            let qi = t.q_k_exponent(f.d()[i]).unwrap();
            // X_i B_i = q_i² B_i X_i
            assert!(t.commutator(&t.gen(n + i), &t.gen(i), 2 * qi).is_zero());
            for j in 0..n {
                assert!(t.commutator(&t.gen(i), &t.gen(j), 0).is_zero());
                if i != j {
                    assert!(t.commutator(&t.gen(n + i), &t.gen(j), 0).is_zero());
                }
            }
        }
    }

    #[test]
    fn specialization_is_commutative() {
        let t = a2();
        let a = t.mul(&t.gen(0), &t.gen(1));
        let b = t.mul(&t.gen(1), &t.gen(0));
        assert_eq!(t.specialize(&a).unwrap(), t.specialize(&b).unwrap());
        assert_eq!(t.specialize(&a).unwrap(), RatFun::monomial(vec![1, 1]));
    }

    fn elem() -> impl Strategy<Value = QTorusElem> {
        prop::collection::vec(((-2i64..3, -2i64..3), (-3i64..4, -2i64..3)), 1..4).prop_map(|ts| {
            let mut e = QTorusElem::zero();
            for ((a, b), (p, c)) in ts {
                e.add_term(vec![a, b], &QCoef::t_pow(p) * &QCoef::int(c));
            }
            e
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn associative(a in elem(), b in elem(), c in elem()) {
            let t = a2();
            prop_assert_eq!(t.mul(&t.mul(&a, &b), &c), t.mul(&a, &t.mul(&b, &c)));
        }

        #[test]
        fn star_is_an_antihomomorphic_involution(a in elem(), b in elem()) {
            let t = a2();
            prop_assert_eq!(t.star(&t.star(&a)), a.clone());
            prop_assert_eq!(t.star(&t.mul(&a, &b)), t.mul(&t.star(&b), &t.star(&a)));
        }

        #[test]
        fn normal_order_reconstructs(a in elem()) {
            let t = a2();
            let mut back = QTorusElem::zero();
            for (l, c) in t.normal_order(&a) {
                let ordered = t.product(&[t.mono(vec![l[0], 0]), t.mono(vec![0, l[1]])]);
                back = back.add(&ordered.scale(&c));
            }
            prop_assert_eq!(back, a);
        }
    }
}
