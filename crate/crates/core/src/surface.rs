//! Ideal triangulations of surfaces (the m = 2 case): the feed of a
//! triangulation, flips as mutations, the pentagon and rectangle relations
//! among flips, and Dehn twists of an annulus as cluster transformations.
//!
//! A triangulation is a list of triangles, each given by the labels of its
//! three sides in counterclockwise order. A label occurring twice is an
//! internal edge (the two sides are glued reversing orientation), a label
//! occurring once is a boundary edge. Internal edges, sorted by label, are
//! the indices of the feed.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::cluster::{ClusterTransformation, Step};
use crate::error::{Error, Result};
use crate::feed::Feed;

/// A side: (triangle, position 0..3).
type Side = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    triangles: Vec<[usize; 3]>,
    internal: Vec<usize>,
    boundary: Vec<usize>,
    pub genus: usize,
    pub punctures: usize,
    /// Marked points on each boundary component, sorted.
    pub boundary_marked: Vec<usize>,
}

/// Plain disjoint-set forest for the corner identifications.
struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

impl Triangulation {
    /// Validate the gluing and compute the topology.
    pub fn new(triangles: Vec<[usize; 3]>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::InvalidParam("a triangulation needs at least one triangle".into()));
        }
        // canonical form: smallest label first in each triangle, triangles sorted
        let mut triangles: Vec<[usize; 3]> = triangles
            .into_iter()
            .map(|t| {
                let r = (0..3).min_by_key(|&i| t[i]).unwrap();
                [t[r], t[(r + 1) % 3], t[(r + 2) % 3]]
            })
            .collect();
        triangles.sort_unstable();
        let mut sides: BTreeMap<usize, Vec<Side>> = BTreeMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::InvalidParam(format!("triangle {t} {tri:?} is self-folded")));
            }
            for (i, &e) in tri.iter().enumerate() {
                sides.entry(e).or_default().push((t, i));
            }
        }
        let mut internal = Vec::new();
        let mut boundary = Vec::new();
        for (&e, occ) in &sides {
            match occ.len() {
                1 => boundary.push(e),
                2 => internal.push(e),
                n => return Err(Error::InvalidParam(format!("edge {e} bounds {n} triangle sides"))),
            }
        }
        // corners: 3t + i is the start of side i; gluing reverses orientation
        let f = triangles.len();
        let mut uf = UnionFind((0..3 * f).collect());
        let corner = |(t, i): Side| 3 * t + i;
        let next = |(t, i): Side| 3 * t + (i + 1) % 3;
        for &e in &internal {
            let (s, s2) = (sides[&e][0], sides[&e][1]);
            uf.union(corner(s), next(s2));
            uf.union(next(s), corner(s2));
        }
        // connectedness through the internal edges
        let mut comp = UnionFind((0..f).collect());
        for &e in &internal {
            comp.union(sides[&e][0].0, sides[&e][1].0);
        }
        if (0..f).any(|t| comp.find(t) != comp.find(0)) {
            return Err(Error::InvalidParam("the triangulated surface is not connected".into()));
        }
        let vertices: BTreeSet<usize> = (0..3 * f).map(|c| uf.find(c)).collect();
        // boundary components: each boundary vertex has one outgoing boundary edge
        let mut out_edge: HashMap<usize, usize> = HashMap::new();
        for &e in &boundary {
            let s = sides[&e][0];
            let (from, to) = (uf.find(corner(s)), uf.find(next(s)));
            if out_edge.insert(from, to).is_some() {
                return Err(Error::InvalidParam(format!("boundary vertex of edge {e} is not a manifold point")));
            }
        }
        let mut boundary_marked = Vec::new();
        let mut seen = BTreeSet::new();
        for &start in out_edge.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut len = 0;
            let mut v = start;
            loop {
                seen.insert(v);
                len += 1;
                v = *out_edge.get(&v).ok_or_else(|| Error::InvalidParam("boundary does not close up".into()))?;
                if v == start {
                    break;
                }
                if seen.contains(&v) {
                    return Err(Error::InvalidParam("boundary does not close up".into()));
                }
            }
            boundary_marked.push(len);
        }
        boundary_marked.sort_unstable();
        let punctures = vertices.iter().filter(|v| !out_edge.contains_key(v)).count();
        let chi = vertices.len() as i64 - sides.len() as i64 + f as i64;
        let twice_genus = 2 - boundary_marked.len() as i64 - chi;
        if twice_genus < 0 || twice_genus % 2 != 0 {
            return Err(Error::InvalidParam(format!("Euler characteristic {chi} is inconsistent with an orientable surface")));
        }
        Ok(Triangulation { triangles, internal, boundary, genus: (twice_genus / 2) as usize, punctures, boundary_marked })
    }

    /// Disc with n ≥ 3 marked boundary points, fan triangulation from
    /// vertex 0. The diagonal (0, j) has label n − 2 − j, boundary edge
    /// (i, i+1) has label n − 3 + i.
    pub fn polygon(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParam(format!("a polygon needs at least 3 vertices, got {n}")));
        }
        let side = |a: usize, b: usize| -> usize {
            let (a, b) = (a.min(b), a.max(b));
            if a == 0 && b == n - 1 {
                n - 3 + n - 1
            } else if b == a + 1 {
                n - 3 + a
            } else {
                n - 2 - b
            }
        };
        Self::new((1..n - 1).map(|i| [side(0, i), side(i, i + 1), side(i + 1, 0)]).collect())
    }

    /// Annulus with p ≥ 1 marked points on the outer and q ≥ 1 on the inner
    /// boundary. Connecting edges 0..p+q; outer boundary edges p+q..2p+q,
    /// inner boundary edges 2p+q..2p+2q.
    pub fn annulus(p: usize, q: usize) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidParam("each boundary of the annulus needs a marked point".into()));
        }
        let m = p + q;
        let conn = |s: usize| s % m;
        let mut tris = Vec::with_capacity(m);
        for s in 0..p {
            tris.push([m + s, conn(s + 1), conn(s)]);
        }
        for s in p..m {
            tris.push([conn(s + 1), m + p + (s - p), conn(s)]);
        }
        Self::new(tris)
    }

    /// Once-punctured torus: a square with sides a = 0, b = 1 glued in
    /// pairs, cut by the diagonal c = 2.
    pub fn punctured_torus() -> Self {
        Self::new(vec![[0, 1, 2], [2, 0, 1]]).expect("the punctured torus is a valid triangulation")
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Internal edge labels in feed order.
    pub fn internal_edges(&self) -> &[usize] {
        &self.internal
    }

    pub fn boundary_edges(&self) -> &[usize] {
        &self.boundary
    }

    /// Feed index of an internal edge.
    pub fn index_of(&self, edge: usize) -> Result<usize> {
        self.internal
            .binary_search(&edge)
            .map_err(|_| Error::InvalidParam(format!("edge {edge} is not an internal edge")))
    }

    fn sides_of(&self, edge: usize) -> Vec<Side> {
        let mut out = Vec::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for (i, &e) in tri.iter().enumerate() {
                if e == edge {
                    out.push((t, i));
                }
            }
        }
        out
    }

    /// ε_ef = #{triangles in which f immediately follows e counterclockwise}
    /// − #{triangles in which e immediately follows f}; d ≡ 1.
    pub fn feed(&self) -> Feed {
        let n = self.internal.len();
        let mut eps = vec![vec![0i64; n]; n];
        for tri in &self.triangles {
            for i in 0..3 {
                let (e, f) = (tri[i], tri[(i + 1) % 3]);
                if let (Ok(a), Ok(b)) = (self.internal.binary_search(&e), self.internal.binary_search(&f)) {
                    eps[a][b] += 1;
                    eps[b][a] -= 1;
                }
            }
        }
        Feed::skew(eps).expect("signed adjacency is skew-symmetric")
    }

    /// Flip the internal edge: the quadrilateral (e, a, b) ∪ (e, c, d) is
    /// re-cut by the other diagonal, which keeps the label e. Returns the new
    /// triangulation and the corresponding mutation.
    pub fn flip(&self, edge: usize) -> Result<(Triangulation, ClusterTransformation)> {
        let k = self.index_of(edge)?;
        let sides = self.sides_of(edge);
        let ((t, i), (u, j)) = (sides[0], sides[1]);
        if t == u {
            return Err(Error::InvalidParam(format!("edge {edge} borders a self-folded triangle")));
        }
        let rot = |tri: [usize; 3], i: usize| [tri[i], tri[(i + 1) % 3], tri[(i + 2) % 3]];
        let [_, a, b] = rot(self.triangles[t], i);
        let [_, c, d] = rot(self.triangles[u], j);
        let mut triangles = self.triangles.clone();
        triangles[t] = [edge, b, c];
        triangles[u] = [edge, d, a];
        if b == c || d == a {
            return Err(Error::InvalidParam(format!("flipping edge {edge} would create a self-folded triangle")));
        }
        let next = Triangulation::new(triangles)?;
        Ok((next, ClusterTransformation::new(self.feed(), vec![Step::Mutate(k)])))
    }

    /// Internal edges whose flip is defined.
    pub fn flippable_edges(&self) -> Vec<usize> {
        self.internal.iter().copied().filter(|&e| self.flip(e).is_ok()).collect()
    }

    /// Edge map φ: self → other sending triangles to triangles with their
    /// cyclic order, subject to the pinned pairs (e, φ(e)). The surface is
    /// connected, so a pinned edge determines φ; `None` if no such map
    /// exists.
    pub fn isomorphism(&self, other: &Triangulation, pins: &[(usize, usize)]) -> Option<BTreeMap<usize, usize>> {
        if self.triangles.len() != other.triangles.len() || self.internal.len() != other.internal.len() {
            return None;
        }
        let &(e0, f0) = pins.first()?;
        let (t0, i0) = *self.sides_of(e0).first()?;
        let candidates = other.sides_of(f0);
        'candidate: for &(u0, j0) in &candidates {
            // triangle map t ↦ (u, r) with side i ↦ side (i + r) mod 3
            let mut tri_map: Vec<Option<(usize, usize)>> = vec![None; self.triangles.len()];
            let mut used = vec![false; other.triangles.len()];
            tri_map[t0] = Some((u0, (j0 + 3 - i0) % 3));
            used[u0] = true;
            let mut stack = vec![t0];
            while let Some(t) = stack.pop() {
                let (u, r) = tri_map[t].unwrap();
                for i in 0..3 {
                    let e = self.triangles[t][i];
                    let f = other.triangles[u][(i + r) % 3];
                    let mine = self.sides_of(e);
                    let theirs = other.sides_of(f);
                    if mine.len() != theirs.len() {
                        continue 'candidate;
                    }
                    if mine.len() == 2 {
                        let (t2, i2) = if mine[0] == (t, i) { mine[1] } else { mine[0] };
                        let (u2, j2) = if theirs[0] == (u, (i + r) % 3) { theirs[1] } else { theirs[0] };
                        let r2 = (j2 + 3 - i2) % 3;
                        match tri_map[t2] {
                            Some(existing) if existing != (u2, r2) => continue 'candidate,
                            Some(_) => {}
                            None => {
                                if used[u2] {
                                    continue 'candidate;
                                }
                                used[u2] = true;
                                tri_map[t2] = Some((u2, r2));
                                stack.push(t2);
                            }
                        }
                    }
                }
            }
            let mut phi = BTreeMap::new();
            for (t, m) in tri_map.iter().enumerate() {
                let (u, r) = m.expect("connected surface");
                for i in 0..3 {
                    phi.insert(self.triangles[t][i], other.triangles[u][(i + r) % 3]);
                }
            }
            if pins.iter().all(|(e, f)| phi.get(e) == Some(f)) {
                return Some(phi);
            }
        }
        None
    }

    /// Apply a sequence of flips, then relabel so that the result is `target`
    /// with the given pins; the relabelling becomes a final Permute step.
    fn closed_word(&self, flips: &[usize], target: &Triangulation, pins: &[(usize, usize)]) -> Result<FlipWord> {
        let mut current = self.clone();
        for &e in flips {
            current = current.flip(e)?.0;
        }
        let phi = current
            .isomorphism(target, pins)
            .ok_or_else(|| Error::InvalidParam("the flip sequence does not return to the target triangulation".into()))?;
        // σ(i) = index in `current` of φ⁻¹(internal edge i of target)
        let inverse: BTreeMap<usize, usize> = phi.iter().map(|(a, b)| (*b, *a)).collect();
        let sigma = target.internal.iter().map(|f| current.index_of(inverse[f])).collect::<Result<Vec<_>>>()?;
        Ok(FlipWord { start: self.clone(), flips: flips.to_vec(), relabel: Some(sigma) })
    }

    /// The five-flip word around the pentagon formed by two internal edges
    /// that share a triangle, closed by the relabelling that exchanges them.
    pub fn pentagon_word(&self, e: usize, f: usize) -> Result<FlipWord> {
        let pins: Vec<(usize, usize)> = self.triangles.iter().flatten().copied().filter(|&x| x != e && x != f).map(|x| (x, x)).collect::<BTreeSet<_>>().into_iter().collect();
        if pins.is_empty() {
            return Err(Error::InvalidParam("the pentagon needs a surrounding edge".into()));
        }
        for (a, b) in [(e, f), (f, e)] {
            if let Ok(w) = self.closed_word(&[a, b, a, b, a], self, &pins) {
                return Ok(w);
            }
        }
        Err(Error::InvalidParam(format!("edges {e} and {f} do not span a pentagon")))
    }

    /// Flips at two edges not sharing a triangle commute: the word
    /// e, f, e, f returns to the start.
    pub fn rectangle_word(&self, e: usize, f: usize) -> Result<FlipWord> {
        let share = self.triangles.iter().any(|t| t.contains(&e) && t.contains(&f));
        if share || e == f {
            return Err(Error::InvalidParam(format!("edges {e} and {f} share a triangle")));
        }
        let pins: Vec<(usize, usize)> = self.boundary.iter().chain(&self.internal).map(|&x| (x, x)).collect();
        self.closed_word(&[e, f, e, f], self, &pins)
    }

    /// Dehn twist about the core of an `annulus(p, q)` triangulation: the
    /// flips 0, 1, …, p−1 move one inner step of the connecting zig-zag past
    /// all outer steps, which rotates the inner boundary by one marked point
    /// relative to the outer one; the outer boundary is pinned.
    pub fn annulus_twist_word(p: usize, q: usize) -> Result<FlipWord> {
        let t = Triangulation::annulus(p, q)?;
        let m = p + q;
        let pins: Vec<(usize, usize)> = (m..m + p).map(|x| (x, x)).collect();
        let flips: Vec<usize> = (0..p).collect();
        t.closed_word(&flips, &t, &pins)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(TriangulationJson {
            triangles: self.triangles.clone(),
            genus: Some(self.genus),
            punctures: Some(self.punctures),
            marked: Some(self.boundary_marked.clone()),
        })
        .expect("serialisable")
    }

    /// Parse {"triangles": [[e,e,e], …], "genus": g, "punctures": p,
    /// "marked": [..]}; the optional topology fields are checked.
    pub fn from_json(text: &str) -> Result<Self> {
        let j: TriangulationJson = serde_json::from_str(text)?;
        let t = Triangulation::new(j.triangles)?;
        if j.genus.is_some_and(|g| g != t.genus) {
            return Err(Error::InvalidParam(format!("declared genus {:?} but the gluing has genus {}", j.genus, t.genus)));
        }
        if j.punctures.is_some_and(|p| p != t.punctures) {
            return Err(Error::InvalidParam(format!("declared {:?} punctures, found {}", j.punctures, t.punctures)));
        }
        if let Some(mut m) = j.marked {
            m.sort_unstable();
            if m != t.boundary_marked {
                return Err(Error::InvalidParam(format!("declared boundary marked points {m:?}, found {:?}", t.boundary_marked)));
            }
        }
        Ok(t)
    }
}

#[derive(Serialize, Deserialize)]
struct TriangulationJson {
    triangles: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    genus: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    punctures: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    marked: Option<Vec<usize>>,
}

/// A sequence of flips from a triangulation, optionally closed by a
/// relabelling of the internal edges (as feed indices).
#[derive(Clone, Debug)]
pub struct FlipWord {
    pub start: Triangulation,
    /// Edge labels, flipped in order.
    pub flips: Vec<usize>,
    /// σ with feed(end).permute(σ) = feed(start) for closed words.
    pub relabel: Option<Vec<usize>>,
}

impl FlipWord {
    pub fn transformation(&self) -> Result<ClusterTransformation> {
        let mut steps = Vec::with_capacity(self.flips.len() + 1);
        let mut current = self.start.clone();
        for &e in &self.flips {
            steps.push(Step::Mutate(current.index_of(e)?));
            current = current.flip(e)?.0;
        }
        if let Some(s) = &self.relabel {
            steps.push(Step::Permute(s.clone()));
        }
        Ok(ClusterTransformation::new(self.start.feed(), steps))
    }

    /// Triangulation reached by the flips (before relabelling).
    pub fn end(&self) -> Result<Triangulation> {
        let mut current = self.start.clone();
        for &e in &self.flips {
            current = current.flip(e)?.0;
        }
        Ok(current)
    }
}

/// The test corpus: discs, annuli and the once-punctured torus.
pub fn corpus() -> Vec<(String, Triangulation)> {
    let mut out = Vec::new();
    for n in [4, 5, 6, 7] {
        out.push((format!("disc-{n}"), Triangulation::polygon(n).expect("polygon")));
    }
    for (p, q) in [(1, 1), (2, 1), (2, 2), (3, 2)] {
        out.push((format!("annulus-{p}-{q}"), Triangulation::annulus(p, q).expect("annulus")));
    }
    out.push(("punctured-torus".into(), Triangulation::punctured_torus()));
    out
}

/// Every flippable edge of `t`: feed(flip(T, e)) = mutate(feed(T), e).
/// Returns the number of squares checked, or the first failing edge.
pub fn naturality_square(t: &Triangulation) -> Result<std::result::Result<usize, usize>> {
    let feed = t.feed();
    let mut count = 0;
    for e in t.flippable_edges() {
        let (next, _) = t.flip(e)?;
        if next.feed() != feed.mutate(t.index_of(e)?)? {
            return Ok(Err(e));
        }
        count += 1;
    }
    Ok(Ok(count))
}
