//! Classical cluster X-, A- and D-spaces as exact birational substitutions.
//!
//! A [`Substitution`] is a pullback: it lists the images of the *target*
//! generators as rational functions (and subtraction-free DAGs) in the
//! *source* generators. `compose(first, second)` is the pullback of the map
//! "apply `first`, then `second`".

mod graph;
mod maps;
mod mutation;
mod poisson;

pub use graph::{exchange_graph, ExchangeGraph};
pub use maps::{
    map_diagonal, map_i, map_j, map_p, map_p_times_p, map_phi, map_pi, map_swap, map_theta, theta_invariant_under_sharp,
};
pub use mutation::{a_mutation, d_mutation, decompose_mutation, mutation, permutation, x_mutation, x_tilde};
pub use poisson::{double_poisson_matrix, poisson_residual, x_poisson_matrix};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feed::Feed;
use crate::symbolic::{Expr, RatFun, Semifield};

/// Which cluster space a substitution acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    X,
    A,
    D,
}

impl Space {
    pub fn nvars(self, rank: usize) -> usize {
        match self {
            Space::D => 2 * rank,
            _ => rank,
        }
    }

    /// Generator names: `X1..Xn`, `A1..An`, or `B1..Bn, X1..Xn` for D.
    pub fn names(self, rank: usize) -> Vec<String> {
        match self {
            Space::X => names("X", rank),
            Space::A => names("A", rank),
            Space::D => {
                let mut v = names("B", rank);
                v.extend(names("X", rank));
                v
            }
        }
    }

    pub fn parse(s: &str) -> Result<Space> {
        match s.to_ascii_uppercase().as_str() {
            "X" => Ok(Space::X),
            "A" => Ok(Space::A),
            "D" => Ok(Space::D),
            _ => Err(Error::Parse(format!("unknown space `{s}` (expected X, A or D)"))),
        }
    }
}

pub(crate) fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Pullback of a birational map between coordinate tori.
#[derive(Clone, Debug)]
pub struct Substitution {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub images: Vec<RatFun>,
    pub exprs: Vec<Expr>,
}

impl Substitution {
    /// Build from subtraction-free expressions in the source generators.
    pub fn from_exprs(source: Vec<String>, target: Vec<String>, exprs: Vec<Expr>) -> Self {
        let n = source.len();
        let images = exprs.iter().map(|e| e.to_ratfun(n)).collect();
        Substitution { source, target, images, exprs }
    }

    pub fn identity(names: Vec<String>) -> Self {
        let exprs = (0..names.len()).map(Expr::gen).collect();
        Self::from_exprs(names.clone(), names, exprs)
    }

    /// Pullback of "`first`, then `second`".
    pub fn compose(first: &Substitution, second: &Substitution) -> Result<Substitution> {
        if second.source.len() != first.target.len() {
            return Err(Error::InvalidParam(format!(
                "cannot compose: {} target generators vs {} source generators",
                first.target.len(),
                second.source.len()
            )));
        }
        let images = second.images.iter().map(|f| f.substitute(&first.images)).collect::<Result<Vec<_>>>()?;
        let exprs = second.exprs.iter().map(|e| e.substitute(&first.exprs)).collect();
        Ok(Substitution { source: first.source.clone(), target: second.target.clone(), images, exprs })
    }

    pub fn then(&self, second: &Substitution) -> Result<Substitution> {
        Self::compose(self, second)
    }

    /// Exact equality of all images.
    pub fn same_as(&self, other: &Substitution) -> bool {
        self.images == other.images
    }

    /// True iff every target generator pulls back to the same-index source
    /// generator.
    pub fn is_identity(&self) -> bool {
        self.images.len() == self.source.len()
            && self.images.iter().enumerate().all(|(i, r)| *r == RatFun::var(self.source.len(), i))
    }

    pub fn eval_f64(&self, point: &[f64]) -> Vec<f64> {
        self.images.iter().map(|r| r.eval_f64(point)).collect()
    }

    /// Evaluate the DAG images in a semifield, sharing one memo table.
    pub fn eval<S: Semifield>(&self, s: &S, point: &[S::Elem]) -> Vec<S::Elem> {
        let mut memo = std::collections::HashMap::new();
        self.exprs.iter().map(|e| e.eval_memo(s, point, &mut memo)).collect()
    }

    /// Jacobian of the map in logarithmic coordinates at a positive point:
    /// `J_ij = ∂ log f_i / ∂ log x_j`, computed exactly then evaluated.
    pub fn log_jacobian(&self, point: &[f64]) -> Vec<Vec<f64>> {
        self.images
            .iter()
            .map(|f| (0..self.source.len()).map(|j| f.log_derivative_at(j, point)).collect())
            .collect()
    }

    /// Map from target names to factored formulas.
    pub fn to_json(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        for (name, e) in self.target.iter().zip(&self.exprs) {
            m.insert(name.clone(), serde_json::Value::String(e.display(&self.source)));
        }
        serde_json::Value::Object(m)
    }

    /// Map from target names to reduced rational functions.
    pub fn to_json_reduced(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        for (name, r) in self.target.iter().zip(&self.images) {
            m.insert(name.clone(), serde_json::Value::String(r.display(&self.source)));
        }
        serde_json::Value::Object(m)
    }
}

/// One step of a cluster transformation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    #[serde(rename = "mut")]
    Mutate(usize),
    #[serde(rename = "perm")]
    Permute(Vec<usize>),
}

/// A sequence of mutations and relabellings starting at a feed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterTransformation {
    pub steps: Vec<Step>,
    #[serde(with = "feed_serde")]
    pub source: Feed,
}

mod feed_serde {
    use super::Feed;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(f: &Feed, s: S) -> Result<S::Ok, S::Error> {
        serde::Serialize::serialize(&f.to_json(), s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Feed, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        Feed::from_json(&v.to_string()).map_err(serde::de::Error::custom)
    }
}

impl ClusterTransformation {
    pub fn new(source: Feed, steps: Vec<Step>) -> Self {
        ClusterTransformation { steps, source }
    }

    /// (σ₁₂ ∘ μ₁)^m on the rank-2 feed with parameter p.
    pub fn rank2_word(p: i64, m: usize) -> Self {
        let steps = (0..m).flat_map(|_| [Step::Mutate(0), Step::Permute(vec![1, 0])]).collect();
        ClusterTransformation { steps, source: Feed::rank2(p) }
    }

    /// The (h+2)-gon relation word for p ∈ {0, 1, 2, 3}.
    pub fn polygon_relation(p: i64) -> Result<Self> {
        let h = Feed::coxeter_number(p).ok_or_else(|| Error::InvalidParam(format!("no (h+2)-gon relation for p = {p}")))?;
        Ok(Self::rank2_word(p, h + 2))
    }

    /// Feeds visited, starting with the source.
    pub fn feeds(&self) -> Result<Vec<Feed>> {
        let mut out = vec![self.source.clone()];
        for s in &self.steps {
            let f = out.last().unwrap();
            out.push(match s {
                Step::Mutate(k) => f.mutate(*k)?,
                Step::Permute(p) => f.permute(p)?,
            });
        }
        Ok(out)
    }

    pub fn target(&self) -> Result<Feed> {
        Ok(self.feeds()?.pop().unwrap())
    }

    /// Composite pullback substitution on the given space.
    pub fn substitution(&self, space: Space) -> Result<Substitution> {
        let n = self.source.rank();
        let mut sub = Substitution::identity(space.names(n));
        let mut feed = self.source.clone();
        for s in &self.steps {
            let (step, next) = match s {
                Step::Mutate(k) => (mutation(space, &feed, *k)?, feed.mutate(*k)?),
                Step::Permute(p) => (permutation(space, n, p)?, feed.permute(p)?),
            };
            sub = Substitution::compose(&sub, &step)?;
            feed = next;
        }
        Ok(sub)
    }

    pub fn inverse(&self) -> Result<Self> {
        let feeds = self.feeds()?;
        let mut steps = Vec::new();
        for s in self.steps.iter().rev() {
            steps.push(match s {
                Step::Mutate(k) => Step::Mutate(*k),
                Step::Permute(p) => {
                    let mut inv = vec![0; p.len()];
                    for (i, &j) in p.iter().enumerate() {
                        inv[j] = i;
                    }
                    Step::Permute(inv)
                }
            });
        }
        Ok(ClusterTransformation { steps, source: feeds.last().unwrap().clone() })
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        ClusterTransformation { steps, source: self.source.clone() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serialisable")
    }
}

/// True iff the transformation returns to the same feed and acts as the
/// identity on both the A- and the X-coordinates.
pub fn is_trivial_classical(t: &ClusterTransformation) -> Result<bool> {
    if t.target()? != t.source {
        return Ok(false);
    }
    Ok(t.substitution(Space::A)?.is_identity() && t.substitution(Space::X)?.is_identity())
}

/// Evaluate a transformation at a point of a semifield.
pub fn apply_transformation<S: Semifield>(t: &ClusterTransformation, space: Space, s: &S, point: &[S::Elem]) -> Result<Vec<S::Elem>> {
    Ok(t.substitution(space)?.eval(s, point))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{PositiveReals, TropicalInt};

    #[test]
    fn polygon_relations_are_trivial() {
        for p in 0..=3 {
            let t = ClusterTransformation::polygon_relation(p).unwrap();
            assert!(is_trivial_classical(&t).unwrap(), "p = {p}");
            assert!(t.substitution(Space::D).unwrap().is_identity(), "D, p = {p}");
        }
    }

    #[test]
    fn shorter_words_are_not_trivial() {
        let t = ClusterTransformation::rank2_word(1, 4);
        assert!(!is_trivial_classical(&t).unwrap());
        let single = ClusterTransformation::new(Feed::rank2(1), vec![Step::Mutate(0)]);
        assert!(!is_trivial_classical(&single).unwrap());
    }

    #[test]
    fn pentagon_word_fixes_points() {
        let t = ClusterTransformation::polygon_relation(1).unwrap();
        let v = apply_transformation(&t, Space::X, &PositiveReals, &[2.0, 3.0]).unwrap();
        assert!((v[0] - 2.0).abs() < 1e-12 && (v[1] - 3.0).abs() < 1e-12);
        for pt in [[1i64, -4], [-3, 7], [0, 0], [5, 5]] {
            assert_eq!(apply_transformation(&t, Space::X, &TropicalInt, &pt).unwrap(), pt.to_vec());
        }
    }

    #[test]
    fn json_roundtrip() {
        let t = ClusterTransformation::polygon_relation(2).unwrap();
        let back = ClusterTransformation::from_json(&t.to_json().to_string()).unwrap();
        assert_eq!(t, back);
        let parsed = ClusterTransformation::from_json(r#"{"steps":[{"mut":0},{"perm":[1,0]}],"source":{"n":2,"epsilon":[[0,1],[-1,0]],"d":["1","1"]}}"#).unwrap();
        assert_eq!(parsed.steps.len(), 2);
    }
}
