//! Localized quantum-torus expressions: sums of terms
//! c · e_μ · Π_j (1 + t^{s_j} e_{ν_j})^{±1}
//! with ordered factors. Monomials are moved past factors with the twist
//! φ(e_ν) e_μ = e_μ φ(q^{2(ν,μ)} e_ν).
//!
//! No general fraction normal form is attempted: adjacent inverse factors
//! cancel syntactically, and everything else is compared by specialisation
//! or in matrix models.

use super::coef::QCoef;
use super::series::QSeries;
use super::torus::{apply_lattice, Lam, QTorus, QTorusElem};
use crate::error::{Error, Result};
use crate::symbolic::{Poly, RatFun};

/// (1 + t^shift e_mono)^power with power = ±1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub shift: i64,
    pub mono: Lam,
    pub power: i32,
}

impl Factor {
    pub fn new(shift: i64, mono: Lam, power: i32) -> Self {
        Factor { shift, mono, power }
    }

    fn inverse_of(&self, other: &Factor) -> bool {
        self.shift == other.shift && self.mono == other.mono && self.power == -other.power
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalTerm {
    pub coef: QCoef,
    pub mono: Lam,
    pub factors: Vec<Factor>,
}

/// A sum of localized terms over one quantum torus.
#[derive(Clone, Debug, PartialEq)]
pub struct QLocal {
    pub terms: Vec<LocalTerm>,
}

impl QLocal {
    pub fn mono(mono: Lam) -> Self {
        QLocal { terms: vec![LocalTerm { coef: QCoef::one(), mono, factors: vec![] }] }
    }

    pub fn from_elem(e: &QTorusElem) -> Self {
        QLocal { terms: e.terms().map(|(l, c)| LocalTerm { coef: c.clone(), mono: l.clone(), factors: vec![] }).collect() }
    }

    /// e_μ · Π factors.
    pub fn with_factors(mono: Lam, factors: Vec<Factor>) -> Self {
        let mut t = LocalTerm { coef: QCoef::one(), mono, factors };
        cancel(&mut t.factors);
        QLocal { terms: vec![t] }
    }

    pub fn is_monomial(&self) -> Option<(&QCoef, &Lam)> {
        match self.terms.as_slice() {
            [t] if t.factors.is_empty() => Some((&t.coef, &t.mono)),
            _ => None,
        }
    }

    pub fn mul(&self, torus: &QTorus, rhs: &QLocal) -> QLocal {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &rhs.terms {
                // a.coef e_a F_a · b.coef e_b F_b = coef · e_a e_b · F_a^{tw} F_b
                let mut factors: Vec<Factor> = a
                    .factors
                    .iter()
                    .map(|f| Factor::new(f.shift + 2 * torus.pair(&f.mono, &b.mono), f.mono.clone(), f.power))
                    .collect();
                factors.extend(b.factors.iter().cloned());
                cancel(&mut factors);
                let mono: Lam = a.mono.iter().zip(&b.mono).map(|(x, y)| x + y).collect();
                let coef = &(&a.coef * &b.coef) * &QCoef::t_pow(torus.pair(&a.mono, &b.mono));
                terms.push(LocalTerm { coef, mono, factors });
            }
        }
        QLocal { terms }
    }

    /// Integer power; negative powers only for single-term expressions.
    pub fn pow(&self, torus: &QTorus, k: i64) -> Result<QLocal> {
        let base = if k < 0 { self.inverse(torus)? } else { self.clone() };
        let mut acc = QLocal::mono(vec![0; torus.rank()]);
        for _ in 0..k.abs() {
            acc = acc.mul(torus, &base);
        }
        Ok(acc)
    }

    /// (c e_μ F_1⋯F_m)^{−1} = F_m^{−1}⋯F_1^{−1} e_{−μ} c^{−1}, with the monomial
    /// moved back to the front.
    pub fn inverse(&self, torus: &QTorus) -> Result<QLocal> {
        let [t] = self.terms.as_slice() else {
            return Err(Error::InvalidParam("only single-term localized expressions are inverted".into()));
        };
        let neg: Lam = t.mono.iter().map(|x| -x).collect();
        let mut factors: Vec<Factor> = t
            .factors
            .iter()
            .rev()
            .map(|f| Factor::new(f.shift + 2 * torus.pair(&f.mono, &neg), f.mono.clone(), -f.power))
            .collect();
        cancel(&mut factors);
        Ok(QLocal { terms: vec![LocalTerm { coef: t.coef.recip()?, mono: neg, factors }] })
    }

    /// Image under a monomial homomorphism e_λ ↦ e_{Mλ}.
    pub fn map_lattice(&self, images: &[Lam]) -> QLocal {
        QLocal {
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let mut factors: Vec<Factor> =
                        t.factors.iter().map(|f| Factor::new(f.shift, apply_lattice(images, &f.mono), f.power)).collect();
                    cancel(&mut factors);
                    LocalTerm { coef: t.coef.clone(), mono: apply_lattice(images, &t.mono), factors }
                })
                .collect(),
        }
    }

    /// Image under a monomial anti-homomorphism e_λ ↦ e_{Mλ} into `target`:
    /// the factor order is reversed and the monomial moved back to the front.
    pub fn map_lattice_anti(&self, target: &QTorus, images: &[Lam]) -> QLocal {
        QLocal {
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let mono = apply_lattice(images, &t.mono);
                    let mut factors: Vec<Factor> = t
                        .factors
                        .iter()
                        .rev()
                        .map(|f| {
                            let nu = apply_lattice(images, &f.mono);
                            Factor::new(f.shift + 2 * target.pair(&nu, &mono), nu, f.power)
                        })
                        .collect();
                    cancel(&mut factors);
                    LocalTerm { coef: t.coef.clone(), mono, factors }
                })
                .collect(),
        }
    }

    /// Apply an algebra homomorphism given by the images of the generators
    /// (each a localized expression over `target`), using the symmetric
    /// normalisation e_λ = t^{−Σ_{a<b} c_a c_b S_ab} Π_a X_a^{c_a}.
    /// Factors must be mapped to monomials (as for μ′ and permutations).
    pub fn apply_hom(&self, source: &QTorus, target: &QTorus, images: &[QLocal]) -> Result<QLocal> {
        let mut out = QLocal { terms: vec![] };
        for t in &self.terms {
            let mut acc = QLocal::mono(vec![0; target.rank()]);
            for (a, &c) in t.mono.iter().enumerate() {
                if c != 0 {
                    acc = acc.mul(target, &images[a].pow(target, c)?);
                }
            }
            let scale = &t.coef * &QCoef::t_pow(-source.ordering_exponent(&t.mono));
            for f in &t.factors {
                let img = QLocal::mono(f.mono.clone()).apply_hom(source, target, images)?;
                let (c, m) = img
                    .is_monomial()
                    .ok_or_else(|| Error::InvalidParam("factor image is not a monomial".into()))?;
                let (sign, e) = c
                    .as_signed_power()
                    .ok_or_else(|| Error::InvalidParam("factor image has a non-monomial coefficient".into()))?;
                if sign != 1 {
                    return Err(Error::InvalidParam("factor image has a negative coefficient".into()));
                }
                let fac = QLocal::with_factors(vec![0; target.rank()], vec![Factor::new(f.shift + e, m.clone(), f.power)]);
                acc = acc.mul(target, &fac);
            }
            for mut term in acc.terms {
                term.coef = &term.coef * &scale;
                out.terms.push(term);
            }
        }
        Ok(out)
    }

    /// Specialisation q = 1 as a commutative rational function.
    pub fn specialize(&self, torus: &QTorus) -> Result<RatFun> {
        let n = torus.rank();
        let mono = |l: &[i64]| RatFun::monomial(l.iter().map(|&x| x as i32).collect());
        let mut acc = RatFun::zero(n);
        for t in &self.terms {
            let v = t.coef.at_one()?;
            let mut term = RatFun::new(Poly::constant(n, v.numer().clone()), Poly::constant(n, v.denom().clone()))?;
            term = &term * &mono(&t.mono);
            for f in &t.factors {
                let one_plus = &RatFun::one(n) + &mono(&f.mono);
                term = &term * &one_plus.powi(f.power)?;
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// Expansion as a truncated series; every factor monomial must have
    /// positive grade (inverse factors expand geometrically).
    pub fn expand(&self, torus: &QTorus, grading: &[i64], order: i64) -> Result<QSeries> {
        let zero = QSeries::new(QTorusElem::zero(), grading.to_vec(), order);
        let mut acc = zero.clone();
        for t in &self.terms {
            let mut s = zero.lift(QTorusElem::term(t.mono.clone(), t.coef.clone()));
            for f in &t.factors {
                let fs = if f.power > 0 {
                    zero.lift(torus.one().add(&QTorusElem::term(f.mono.clone(), QCoef::t_pow(f.shift))))
                } else {
                    let c = QCoef::t_pow(f.shift);
                    let mut coeffs = vec![QCoef::one()];
                    for _ in 0..order.max(0) {
                        let last = coeffs.last().unwrap().clone();
                        coeffs.push(-&(&last * &c));
                    }
                    QSeries::geometric(torus, &f.mono, &coeffs, grading.to_vec(), order)?
                };
                s = s.mul(torus, &fs);
            }
            acc = acc.add(&s);
        }
        Ok(acc)
    }

    pub fn display(&self, torus: &QTorus) -> String {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let mut s = torus.display_mono(&t.mono);
                if !t.coef.is_one() {
                    s = format!("({})*{}", t.coef.display(torus.root()), s);
                }
                for f in &t.factors {
                    let c = if f.shift == 0 {
                        String::new()
                    } else if torus.root() == 1 {
                        format!("q^{}*", f.shift)
                    } else {
                        format!("t^{}*", f.shift)
                    };
                    let base = format!("(1+{c}{})", torus.display_mono(&f.mono));
                    s = if f.power > 0 { format!("{s}*{base}") } else { format!("{s}*{base}^-1") };
                }
                s
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// Total number of factors (a size measure).
    pub fn factor_count(&self) -> usize {
        self.terms.iter().map(|t| t.factors.len()).sum()
    }
}

/// Remove adjacent mutually inverse factors (repeatedly).
fn cancel(factors: &mut Vec<Factor>) {
    let mut out: Vec<Factor> = Vec::with_capacity(factors.len());
    for f in factors.drain(..) {
        if out.last().is_some_and(|g| g.inverse_of(&f)) {
            out.pop();
        } else {
            out.push(f);
        }
    }
    *factors = out;
}
