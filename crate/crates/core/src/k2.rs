//! Wedge-product bookkeeping for the K₂ elements W, the 2-forms d log W,
//! and the unitary part of the double.
//!
//! Rational functions enter wedges in factored form: a product of atoms
//! (generators, primes, and primitive polynomials with positive leading
//! coefficient) with integer exponents. Signs are 2-torsion and dropped;
//! coefficients live in ℚ. Polynomial atoms are never factored further —
//! they arise from the construction of the maps.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cluster::{decompose_mutation, mutation, x_tilde, Space, Substitution};
use crate::error::{Error, Result};
use crate::feed::{to_big, Feed};
use crate::symbolic::expr::Node;
use crate::symbolic::{Expr, Poly, RatFun};

/// Multiplicative generator used in factored functions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Prime(BigInt),
    Gen(usize),
    /// Primitive polynomial (no monomial factor, positive lex-leading
    /// coefficient), stored as its sorted term list.
    Poly(Vec<(Vec<i32>, BigInt)>),
}

impl Atom {
    fn poly(&self, nvars: usize) -> Option<Poly> {
        match self {
            Atom::Poly(t) => Some(Poly::from_terms(nvars, t.iter().cloned())),
            _ => None,
        }
    }

    /// Gradient of log(atom) in logarithmic coordinates at `x`.
    pub fn log_gradient(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        match self {
            Atom::Prime(_) => vec![0.0; n],
            Atom::Gen(i) => (0..n).map(|u| if u == *i { 1.0 } else { 0.0 }).collect(),
            Atom::Poly(_) => {
                let p = self.poly(n).expect("polynomial atom");
                let v = p.eval_f64(x);
                (0..n).map(|u| p.euler_derivative(u).eval_f64(x) / v).collect()
            }
        }
    }

    pub fn display(&self, names: &[String]) -> String {
        match self {
            Atom::Prime(p) => p.to_string(),
            Atom::Gen(i) => names[*i].clone(),
            Atom::Poly(t) => {
                let n = t.first().map_or(0, |(e, _)| e.len());
                format!("({})", Poly::from_terms(n, t.iter().cloned()).display(names))
            }
        }
    }
}

/// A nonzero rational function as Π atom^exponent (up to sign).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Factored(BTreeMap<Atom, i64>);

fn prime_factors(mut c: BigInt) -> Vec<(BigInt, i64)> {
    c = c.abs();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= c && p < BigInt::from(1_000_000) {
        let mut k = 0;
        while (&c % &p).is_zero() {
            c /= &p;
            k += 1;
        }
        if k > 0 {
            out.push((p.clone(), k));
        }
        p += 1;
    }
    if c > BigInt::one() {
        out.push((c, 1));
    }
    out
}

impl Factored {
    pub fn one() -> Self {
        Factored(BTreeMap::new())
    }

    pub fn gen(i: usize) -> Self {
        Factored(BTreeMap::from([(Atom::Gen(i), 1)]))
    }

    pub fn atoms(&self) -> &BTreeMap<Atom, i64> {
        &self.0
    }

    fn add_atom(&mut self, a: Atom, k: i64) {
        if k == 0 {
            return;
        }
        let e = self.0.entry(a.clone()).or_insert(0);
        *e += k;
        if *e == 0 {
            self.0.remove(&a);
        }
    }

    pub fn mul(&self, other: &Factored) -> Factored {
        let mut out = self.clone();
        for (a, &k) in &other.0 {
            out.add_atom(a.clone(), k);
        }
        out
    }

    pub fn pow(&self, k: i64) -> Factored {
        if k == 0 {
            return Factored::one();
        }
        Factored(self.0.iter().map(|(a, &e)| (a.clone(), e * k)).collect())
    }

    pub fn inv(&self) -> Factored {
        self.pow(-1)
    }

    /// Monomial × content × primitive part; the sign is dropped.
    pub fn from_poly(p: &Poly) -> Result<Factored> {
        if p.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut out = Factored::one();
        let m = p.min_exps();
        for (i, &e) in m.iter().enumerate() {
            out.add_atom(Atom::Gen(i), e as i64);
        }
        let shifted = p.shift(&m.iter().map(|x| -x).collect::<Vec<_>>());
        let c = shifted.content();
        for (q, k) in prime_factors(c.clone()) {
            out.add_atom(Atom::Prime(q), k);
        }
        let mut prim = shifted.div_integer(&c);
        if prim.as_constant().is_none() {
            if prim.leading().is_some_and(|(_, c)| c.is_negative()) {
                prim = -&prim;
            }
            out.add_atom(Atom::Poly(prim.terms().map(|(e, c)| (e.clone(), c.clone())).collect()), 1);
        }
        Ok(out)
    }

    pub fn from_ratfun(r: &RatFun) -> Result<Factored> {
        Ok(Factored::from_poly(r.num())?.mul(&Factored::from_poly(r.den())?.inv()))
    }

    /// Factor along the structure of a subtraction-free DAG: products,
    /// quotients and powers are split; sums are reduced and factored as
    /// monomial × content × one polynomial atom.
    pub fn from_expr(e: &Expr, nvars: usize) -> Result<Factored> {
        Ok(match e.node() {
            Node::Gen(i) => Factored::gen(*i),
            Node::Const(c) => {
                let mut f = Factored::one();
                for (q, k) in prime_factors(c.clone()) {
                    f.add_atom(Atom::Prime(q), k);
                }
                f
            }
            Node::Mul(ts) => {
                let mut acc = Factored::one();
                for t in ts {
                    acc = acc.mul(&Factored::from_expr(t, nvars)?);
                }
                acc
            }
            Node::Div(a, b) => Factored::from_expr(a, nvars)?.mul(&Factored::from_expr(b, nvars)?.inv()),
            Node::Pow(a, k) => Factored::from_expr(a, nvars)?.pow(*k as i64),
            Node::Add(_) => Factored::from_ratfun(&e.to_ratfun(nvars))?,
        })
    }

    /// Substitute generator atoms by factored images.
    pub fn substitute(&self, images: &[Factored]) -> Result<Factored> {
        let mut out = Factored::one();
        for (a, &k) in &self.0 {
            match a {
                Atom::Gen(i) => out = out.mul(&images[*i].pow(k)),
                Atom::Prime(_) => out.add_atom(a.clone(), k),
                Atom::Poly(_) => return Err(Error::Reduction("cannot substitute into a polynomial atom".into())),
            }
        }
        Ok(out)
    }

    pub fn to_ratfun(&self, nvars: usize) -> RatFun {
        let mut acc = RatFun::one(nvars);
        for (a, &k) in &self.0 {
            let base = match a {
                Atom::Prime(p) => RatFun::constant(nvars, p.clone()),
                Atom::Gen(i) => RatFun::var(nvars, *i),
                Atom::Poly(_) => RatFun::from_poly(a.poly(nvars).unwrap()),
            };
            acc = &acc * &base.powi(k as i32).expect("atoms are nonzero");
        }
        acc
    }
}

/// Element of Λ²(F*) ⊗ ℚ in the atom basis: Σ c_{ab} a∧b with a < b.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct WedgeElem {
    terms: BTreeMap<(Atom, Atom), BigRational>,
}

impl WedgeElem {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<(Atom, Atom), BigRational> {
        &self.terms
    }

    /// Add c · (a ∧ b), reducing by antisymmetry.
    pub fn add_atoms(&mut self, a: &Atom, b: &Atom, c: BigRational) {
        if a == b || c.is_zero() {
            return;
        }
        let (key, c) = if a < b { ((a.clone(), b.clone()), c) } else { ((b.clone(), a.clone()), -c) };
        let e = self.terms.entry(key.clone()).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// f ∧ g expanded bilinearly.
    pub fn wedge(f: &Factored, g: &Factored) -> WedgeElem {
        let mut w = WedgeElem::zero();
        for (a, &x) in f.atoms() {
            for (b, &y) in g.atoms() {
                w.add_atoms(a, b, BigRational::from_integer(BigInt::from(x * y)));
            }
        }
        w
    }

    pub fn scale(&self, c: &BigRational) -> WedgeElem {
        if c.is_zero() {
            return WedgeElem::zero();
        }
        WedgeElem { terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect() }
    }

    pub fn add(&self, other: &WedgeElem) -> WedgeElem {
        let mut out = self.clone();
        for ((a, b), c) in &other.terms {
            out.add_atoms(a, b, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &WedgeElem) -> WedgeElem {
        self.add(&other.scale(&-BigRational::one()))
    }

    /// Pull back along generator images (only generator and prime atoms may
    /// occur in `self`).
    pub fn pullback(&self, images: &[Factored]) -> Result<WedgeElem> {
        let mut out = WedgeElem::zero();
        for ((a, b), c) in &self.terms {
            let fa = Factored(BTreeMap::from([(a.clone(), 1)])).substitute(images)?;
            let fb = Factored(BTreeMap::from([(b.clone(), 1)])).substitute(images)?;
            out = out.add(&WedgeElem::wedge(&fa, &fb).scale(c));
        }
        Ok(out)
    }

    /// The 2-form d log(self) at a positive point, as the antisymmetric
    /// matrix M with Ω = ½ Σ M_uv dz_u ∧ dz_v in logarithmic coordinates.
    pub fn dlog(&self, point: &[f64]) -> FormMatrix {
        let n = point.len();
        let mut m = vec![vec![0.0; n]; n];
        let mut grads: BTreeMap<&Atom, Vec<f64>> = BTreeMap::new();
        for (a, b) in self.terms.keys() {
            for x in [a, b] {
                grads.entry(x).or_insert_with(|| x.log_gradient(point));
            }
        }
        for ((a, b), c) in &self.terms {
            let c = c.to_f64().unwrap();
            let (ga, gb) = (&grads[a], &grads[b]);
            for u in 0..n {
                for v in 0..n {
                    m[u][v] += c * (ga[u] * gb[v] - ga[v] * gb[u]);
                }
            }
        }
        FormMatrix(m)
    }

    pub fn display(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|((a, b), c)| format!("{c}·{}∧{}", a.display(names), b.display(names)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Debug for WedgeElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self
            .terms
            .keys()
            .flat_map(|(a, b)| [a, b])
            .map(|a| match a {
                Atom::Gen(i) => i + 1,
                Atom::Poly(t) => t.first().map_or(0, |(e, _)| e.len()),
                Atom::Prime(_) => 0,
            })
            .max()
            .unwrap_or(0);
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.display(&names))
    }
}

/// Antisymmetric matrix of a 2-form in logarithmic coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct FormMatrix(pub Vec<Vec<f64>>);

impl FormMatrix {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for u in 0..n {
            for v in 0..n {
                worst = worst.max((self.0[u][v] + self.0[v][u]).abs());
            }
        }
        worst
    }

    /// Jᵀ M J for a Jacobian J (rows: target coordinates).
    pub fn pullback(&self, j: &[Vec<f64>]) -> FormMatrix {
        let m = j.first().map_or(0, |r| r.len());
        let n = self.dim();
        let mut out = vec![vec![0.0; m]; m];
        for a in 0..m {
            for b in 0..m {
                let mut s = 0.0;
                for u in 0..n {
                    for v in 0..n {
                        s += j[u][a] * self.0[u][v] * j[v][b];
                    }
                }
                out[a][b] = s;
            }
        }
        FormMatrix(out)
    }

    pub fn max_abs_diff(&self, other: &FormMatrix) -> f64 {
        self.0.iter().zip(&other.0).flat_map(|(r, s)| r.iter().zip(s).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max)
    }
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// W = −½ Σ ε̃_ij B_i∧B_j − Σ d_i B_i∧X_i on (B_1..B_n, X_1..X_n).
pub fn build_w_d(feed: &Feed) -> WedgeElem {
    let n = feed.rank();
    let mut w = WedgeElem::zero();
    for i in 0..n {
        for j in 0..n {
            let c = -half() * to_big(feed.eps_tilde(i, j));
            w.add_atoms(&Atom::Gen(i), &Atom::Gen(j), c);
        }
        w.add_atoms(&Atom::Gen(i), &Atom::Gen(n + i), -feed.d_big(i));
    }
    w
}

/// W_A = ½ Σ ε̃_ij A_i∧A_j.
pub fn build_w_a(feed: &Feed) -> WedgeElem {
    let n = feed.rank();
    let mut w = WedgeElem::zero();
    for i in 0..n {
        for j in 0..n {
            w.add_atoms(&Atom::Gen(i), &Atom::Gen(j), half() * to_big(feed.eps_tilde(i, j)));
        }
    }
    w
}

/// (1+Y) ∧ Y for a subtraction-free Y.
pub fn steinberg(y: &Expr, nvars: usize) -> Result<WedgeElem> {
    let one_plus = Factored::from_expr(&Expr::add(vec![Expr::one(), y.clone()]), nvars)?;
    Ok(WedgeElem::wedge(&one_plus, &Factored::from_expr(y, nvars)?))
}

fn factored_images(s: &Substitution) -> Result<Vec<Factored>> {
    s.exprs.iter().map(|e| Factored::from_expr(e, s.source.len())).collect()
}

/// An asserted identity `actual == expected` in Λ²F*.
#[derive(Clone, Debug)]
pub struct WedgeCheck {
    pub name: String,
    pub actual: WedgeElem,
    pub expected: WedgeElem,
    pub residual: WedgeElem,
}

impl WedgeCheck {
    fn new(name: &str, actual: WedgeElem, expected: WedgeElem) -> Self {
        let residual = actual.sub(&expected);
        WedgeCheck { name: name.into(), actual, expected, residual }
    }

    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }
}

/// μ_k*W_{i′} − W_i against d_k((1+X̃_k)∧X̃_k − (1+X_k)∧X_k), together with
/// the two halves of its proof: the μ♯-difference and the invariance
/// (μ′)*W_{i′} = W_i of the monomial part.
pub fn steinberg_delta(feed: &Feed, k: usize) -> Result<Vec<WedgeCheck>> {
    let n = feed.rank();
    let w = build_w_d(feed);
    let w2 = build_w_d(&feed.mutate(k)?);
    let mu = mutation(Space::D, feed, k)?;
    let (sharp, prime) = decompose_mutation(Space::D, feed, k)?;
    let dk = feed.d_big(k);
    let expected = steinberg(&x_tilde(feed, k), 2 * n)?.sub(&steinberg(&Expr::gen(n + k), 2 * n)?).scale(&dk);
    let lhs = w2.pullback(&factored_images(&mu)?)?.sub(&w);
    let w_sharp = w.pullback(&factored_images(&sharp)?)?;
    Ok(vec![
        WedgeCheck::new("mutation difference", lhs, expected.clone()),
        WedgeCheck::new("sharp difference", w_sharp.sub(&w), expected),
        WedgeCheck::new("monomial part", w2.pullback(&factored_images(&prime)?)?, w),
    ])
}

/// A-space statements: (μ♯)*W_A − W_A = d_k·(1+p*X_k)∧p*X_k and
/// (μ′)*W_{A,i′} = W_{A,i}, checked literally.
pub fn steinberg_delta_a(feed: &Feed, k: usize) -> Result<Vec<WedgeCheck>> {
    let n = feed.rank();
    let w = build_w_a(feed);
    let w2 = build_w_a(&feed.mutate(k)?);
    let (sharp, prime) = decompose_mutation(Space::A, feed, k)?;
    let mut e = vec![0i32; n];
    for (i, x) in e.iter_mut().enumerate() {
        *x = feed.eps(k, i) as i32;
    }
    let p_xk = Expr::monomial(&e);
    let expected = steinberg(&p_xk, n)?.scale(&feed.d_big(k));
    let sharp_diff = w.pullback(&factored_images(&sharp)?)?.sub(&w);
    Ok(vec![
        WedgeCheck::new("sharp difference", sharp_diff, expected),
        WedgeCheck::new("monomial part", w2.pullback(&factored_images(&prime)?)?, w),
    ])
}

/// Matrix of Ω on the D-torus from its closed formula: M_{B_iB_j} = −ε̃_ij,
/// M_{B_iX_i} = −d_i, M_{X_iB_i} = d_i.
pub fn omega_d_matrix(feed: &Feed) -> FormMatrix {
    let n = feed.rank();
    let mut m = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = -feed.eps_tilde(i, j).to_f64().unwrap();
        }
        let d = feed.d()[i].to_f64().unwrap();
        m[i][n + i] = -d;
        m[n + i][i] = d;
    }
    FormMatrix(m)
}

/// Matrix of Ω_A = Σ ε̃_ij d log A_i ∧ d log A_j, i.e. M = 2ε̃.
pub fn omega_a_matrix(feed: &Feed) -> FormMatrix {
    let n = feed.rank();
    FormMatrix((0..n).map(|i| (0..n).map(|j| 2.0 * feed.eps_tilde(i, j).to_f64().unwrap()).collect()).collect())
}

/// max |Jᵀ Ω′ J − Ω| for the mutation μ_k at a positive point, where J is
/// the exact log-Jacobian; the Steinberg terms have vanishing d log.
pub fn pullback_form_numeric(space: Space, feed: &Feed, k: usize, point: &[f64]) -> Result<f64> {
    let mu = mutation(space, feed, k)?;
    let g = feed.mutate(k)?;
    let (omega, omega2) = match space {
        Space::D => (omega_d_matrix(feed), omega_d_matrix(&g)),
        Space::A => (omega_a_matrix(feed), omega_a_matrix(&g)),
        Space::X => return Err(Error::InvalidParam("the X-space carries a Poisson bivector, not a 2-form".into())),
    };
    let j = mu.log_jacobian(point);
    Ok(omega2.pullback(&j).max_abs_diff(&omega))
}

/// Result of the unitary-part checks at one point.
#[derive(Clone, Debug)]
pub struct UnitaryReport {
    /// Defect of |B_i| = 1 and X̄_i/X_i = Π B_j^{ε_ij} at the point.
    pub membership: f64,
    /// Same defect after the D-mutation, in the mutated feed.
    pub mutated_membership: f64,
    /// | |B_k B′_k| − 1 |.
    pub gluing: f64,
    /// max |Re Ω| restricted to D^U.
    pub real_part: f64,
    /// max deviation of Im Ω|_{D^U} from −Σ d_i dθ_i∧dρ_i (B = e^{iθ}, |X| = e^ρ).
    pub imaginary_part: f64,
}

impl UnitaryReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.membership < tol && self.mutated_membership < tol && self.gluing < tol && self.real_part < tol && self.imaginary_part < tol
    }
}

/// Point of D^U with B_i = e^{iθ_i} and |X_i| = e^{ρ_i}.
pub fn unitary_point(feed: &Feed, theta: &[f64], rho: &[f64]) -> Vec<Complex64> {
    let n = feed.rank();
    let mut z: Vec<Complex64> = theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    for i in 0..n {
        let phase: f64 = -0.5 * (0..n).map(|j| feed.eps(i, j) as f64 * theta[j]).sum::<f64>();
        z.push(Complex64::from_polar(rho[i].exp(), phase));
    }
    z
}

/// Defect of the equations |B_i| = 1, X̄_i/X_i = Π_j B_j^{ε_ij}.
pub fn unitary_membership(feed: &Feed, z: &[Complex64]) -> f64 {
    let n = feed.rank();
    let mut worst = 0.0f64;
    for i in 0..n {
        worst = worst.max((z[i].norm() - 1.0).abs());
        let prod: Complex64 = (0..n).map(|j| z[j].powi(feed.eps(i, j) as i32)).product();
        worst = worst.max((z[n + i].conj() / z[n + i] - prod).norm());
    }
    worst
}

/// Membership, gluing and restricted-form checks at the point (θ, ρ).
pub fn unitary_part_check(feed: &Feed, k: usize, theta: &[f64], rho: &[f64]) -> Result<UnitaryReport> {
    let n = feed.rank();
    let z = unitary_point(feed, theta, rho);
    let membership = unitary_membership(feed, &z);
    let mu = mutation(Space::D, feed, k)?;
    let z2: Vec<Complex64> = mu.images.iter().map(|r| r.eval_c64(&z)).collect();
    let mutated_membership = unitary_membership(&feed.mutate(k)?, &z2);
    let gluing = ((z[k] * z2[k]).norm() - 1.0).abs();
    // Jacobian of the log-coordinates (log B, log X) in the real parameters (θ, ρ)
    let i = Complex64::i();
    let mut jac = vec![vec![Complex64::new(0.0, 0.0); 2 * n]; 2 * n];
    for a in 0..n {
        jac[a][a] = i;
        jac[n + a][n + a] = Complex64::new(1.0, 0.0);
        for b in 0..n {
            jac[n + a][b] += i * (-0.5 * feed.eps(a, b) as f64);
        }
    }
    let m = omega_d_matrix(feed).0;
    let (mut real_part, mut imaginary_part) = (0.0f64, 0.0f64);
    for a in 0..2 * n {
        for b in 0..2 * n {
            let mut s = Complex64::new(0.0, 0.0);
            for u in 0..2 * n {
                for v in 0..2 * n {
                    s += jac[u][a] * m[u][v] * jac[v][b];
                }
            }
            let expected = match (a < n, b < n) {
                (true, false) if b == a + n => -feed.d()[a].to_f64().unwrap(),
                (false, true) if a == b + n => feed.d()[b].to_f64().unwrap(),
                _ => 0.0,
            };
            real_part = real_part.max(s.re.abs());
            imaginary_part = imaginary_part.max((s.im - expected).abs());
        }
    }
    Ok(UnitaryReport { membership, mutated_membership, gluing, real_part, imaginary_part })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn random_feed(seed: u64, n: usize) -> Feed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Feed::random(&mut rng, n, 2, &[1, 2, 3])
    }

    #[test]
    fn rank_one_w() {
        let f = Feed::new(vec![vec![0]], vec![num_rational::Rational64::from(3)]).unwrap();
        let mut expected = WedgeElem::zero();
        expected.add_atoms(&Atom::Gen(0), &Atom::Gen(1), rat(-3));
        assert_eq!(build_w_d(&f), expected);
    }

    #[test]
    fn rank_two_w_a() {
        let w = build_w_a(&Feed::rank2(1));
        let mut expected = WedgeElem::zero();
        expected.add_atoms(&Atom::Gen(0), &Atom::Gen(1), rat(1));
        assert_eq!(w, expected);
    }

    #[test]
    fn dlog_of_w_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let f = Feed::random(&mut rng, 3, 2, &[1, 2]);
            let pt: Vec<f64> = (0..6).map(|_| rng.gen_range(0.3..3.0)).collect();
            let m = build_w_d(&f).dlog(&pt);
            assert!(m.antisymmetry_defect() < 1e-14);
            assert!(m.max_abs_diff(&omega_d_matrix(&f)) < 1e-12);
        }
    }

    #[test]
    fn rank_two_mutation_difference_is_a_steinberg_difference() {
        for c in steinberg_delta(&Feed::rank2(1), 0).unwrap() {
            assert!(c.holds(), "{}: {:?}", c.name, c.residual);
        }
    }

    #[test]
    fn isolated_direction_has_only_steinberg_terms() {
        let f = Feed::skew(vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, -1, 0]]).unwrap();
        let checks = steinberg_delta(&f, 0).unwrap();
        assert!(checks.iter().all(WedgeCheck::holds));
        // X̃_0 = X_0 here, so the difference vanishes
        assert!(checks[0].actual.is_zero());
    }

    #[test]
    fn a_space_monomial_part_is_invariant_and_sharp_part_has_opposite_sign() {
        let f = Feed::rank2(2);
        for k in 0..2 {
            let checks = steinberg_delta_a(&f, k).unwrap();
            assert!(checks[1].holds());
            // the literal statement fails; the difference is −d_k(1+p*X_k)∧p*X_k
            assert!(!checks[0].holds());
            assert_eq!(checks[0].actual, checks[0].expected.scale(&rat(-1)));
        }
    }

    #[test]
    fn form_pullback_along_mutations() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let pt: Vec<f64> = (0..4).map(|_| rng.gen_range(0.2..5.0)).collect();
            assert!(pullback_form_numeric(Space::D, &Feed::rank2(1), 0, &pt).unwrap() < 1e-10);
            assert!(pullback_form_numeric(Space::A, &Feed::rank2(3), 1, &pt[..2]).unwrap() < 1e-10);
        }
    }

    /// Central differences in log coordinates, independent of the exact
    /// log-derivative.
    fn fd_log_jacobian(s: &Substitution, x: &[f64]) -> Vec<Vec<f64>> {
        let h: f64 = 1e-6;
        s.images
            .iter()
            .map(|f| {
                (0..x.len())
                    .map(|j| {
                        let (mut a, mut b) = (x.to_vec(), x.to_vec());
                        a[j] *= h.exp();
                        b[j] *= (-h).exp();
                        (f.eval_f64(&a).ln() - f.eval_f64(&b).ln()) / (2.0 * h)
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn exact_jacobian_agrees_with_finite_differences() {
        let f = Feed::rank2(2);
        let s = mutation(Space::D, &f, 1).unwrap();
        let pt = [0.7, 1.9, 2.3, 0.4];
        let a = s.log_jacobian(&pt);
        let b = fd_log_jacobian(&s, &pt);
        for (r, t) in a.iter().zip(&b) {
            for (x, y) in r.iter().zip(t) {
                assert!((x - y).abs() < 1e-7);
            }
        }
        let via_fd = omega_d_matrix(&f.mutate(1).unwrap()).pullback(&b).max_abs_diff(&omega_d_matrix(&f));
        assert!(via_fd < 1e-7);
    }

    #[test]
    fn unitary_part() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10 {
            let f = Feed::random(&mut rng, 3, 2, &[1, 2]);
            let theta: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let rho: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r = unitary_part_check(&f, rng.gen_range(0..3), &theta, &rho).unwrap();
            assert!(r.passes(1e-10), "{r:?}");
        }
    }

    fn arb_factored() -> impl Strategy<Value = Factored> {
        proptest::collection::vec((0usize..4, -3i64..4), 1..4).prop_map(|v| {
            let mut f = Factored::one();
            for (i, k) in v {
                f = f.mul(&Factored::gen(i).pow(k));
            }
            // a polynomial atom 1 + x0 x1
            f.mul(&Factored::from_poly(&(&Poly::one(4) + &(&Poly::var(4, 0) * &Poly::var(4, 1)))).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn wedge_normal_form_is_confluent(f in arb_factored(), g in arb_factored(), h in arb_factored()) {
            // bilinearity in the first slot, antisymmetry, f∧f = 0
            let lhs = WedgeElem::wedge(&f.mul(&g), &h);
            let rhs = WedgeElem::wedge(&f, &h).add(&WedgeElem::wedge(&g, &h));
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(WedgeElem::wedge(&f, &g), WedgeElem::wedge(&g, &f).scale(&rat(-1)));
            prop_assert!(WedgeElem::wedge(&f, &f).is_zero());
            // different grouping of the same sum
            let a = WedgeElem::wedge(&f, &g).add(&WedgeElem::wedge(&g, &h)).add(&WedgeElem::wedge(&h, &f));
            let b = WedgeElem::wedge(&h, &f).add(&WedgeElem::wedge(&f, &g).add(&WedgeElem::wedge(&g, &h)));
            prop_assert_eq!(a, b);
        }

        #[test]
        fn mutation_difference_is_a_steinberg_difference_on_random_feeds(seed in 0u64..10_000, n in 1usize..5, k in 0usize..5) {
            let f = random_feed(seed, n);
            for c in steinberg_delta(&f, k % n).unwrap() {
                prop_assert!(c.holds(), "{} {:?}: {:?}", c.name, f, c.residual);
            }
        }

        #[test]
        fn factored_roundtrip(f in arb_factored()) {
            let r = f.to_ratfun(4);
            prop_assert_eq!(Factored::from_ratfun(&r).unwrap(), f);
        }
    }
}
