//! Breadth-first exploration of X-seeds (feed plus cluster X-coordinates
//! expressed in the initial ones), identified up to relabelling.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use super::{x_mutation, Space, Substitution};
use crate::error::Result;
use crate::feed::{permutations, Feed};
use crate::symbolic::RatFun;

#[derive(Clone, Debug)]
pub struct Seed {
    pub feed: Feed,
    pub coords: Vec<RatFun>,
    pub depth: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExchangeGraph {
    /// Coordinate formulas of each vertex, sorted.
    pub vertices: Vec<Vec<String>>,
    /// Undirected edges (u, v), u < v.
    pub edges: Vec<(usize, usize)>,
    /// False when exploration stopped at the depth or size bound.
    pub complete: bool,
    /// Number of distinct feeds up to isomorphism among the vertices.
    pub feed_classes: usize,
    /// Lengths of the fundamental cycles of the BFS spanning tree.
    pub cycle_lengths: Vec<usize>,
    #[serde(skip)]
    pub seeds: Vec<Seed>,
}

impl ExchangeGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// E − V + 1 for a connected graph.
    pub fn cycle_rank(&self) -> usize {
        (self.edges.len() + 1).saturating_sub(self.vertices.len())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "vertices": self.vertex_count(),
            "edges": self.edge_count(),
            "complete": self.complete,
            "feed_classes": self.feed_classes,
            "cycle_rank": self.cycle_rank(),
            "cycle_lengths": self.cycle_lengths,
            "clusters": self.vertices,
        })
    }
}

/// Canonical representative of a feed under relabelling (all permutations;
/// intended for rank ≤ 8).
pub fn canonical_feed_key(feed: &Feed) -> String {
    let n = feed.rank();
    let mut best: Option<String> = None;
    let mut perm: Vec<usize> = (0..n).collect();
    permutations(&mut perm, 0, &mut |p| {
        let f = feed.permute(p).expect("permutation");
        let key = format!("{:?}", f);
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
    });
    best.unwrap_or_default()
}

fn canonical(feed: &Feed, coords: &[RatFun], names: &[String]) -> Result<(Vec<String>, Feed, Vec<RatFun>)> {
    let shown: Vec<String> = coords.iter().map(|c| c.display(names)).collect();
    let mut order: Vec<usize> = (0..coords.len()).collect();
    order.sort_by(|&a, &b| shown[a].cmp(&shown[b]));
    let key = order.iter().map(|&i| shown[i].clone()).collect();
    Ok((key, feed.permute(&order)?, order.iter().map(|&i| coords[i].clone()).collect()))
}

/// Explore seeds reachable from `feed` by mutations, up to `max_depth`
/// mutations and `max_vertices` vertices.
pub fn exchange_graph(feed: &Feed, max_depth: usize, max_vertices: usize) -> Result<ExchangeGraph> {
    let n = feed.rank();
    let names = Space::X.names(n);
    let id = Substitution::identity(names.clone());
    let (key0, f0, c0) = canonical(feed, &id.images, &names)?;
    let mut index: HashMap<Vec<String>, usize> = HashMap::from([(key0.clone(), 0)]);
    let mut seeds = vec![Seed { feed: f0, coords: c0, depth: 0 }];
    let mut keys = vec![key0];
    let mut parent = vec![usize::MAX];
    let mut edges = BTreeSet::new();
    let mut queue = VecDeque::from([0usize]);
    let mut complete = true;
    while let Some(u) = queue.pop_front() {
        let seed = seeds[u].clone();
        if seed.depth >= max_depth {
            complete = false;
            continue;
        }
        for k in 0..n {
            let m = x_mutation(&seed.feed, k)?;
            let coords = m.images.iter().map(|r| r.substitute(&seed.coords)).collect::<Result<Vec<_>>>()?;
            let (key, f, c) = canonical(&seed.feed.mutate(k)?, &coords, &names)?;
            let v = match index.get(&key) {
                Some(&v) => v,
                None => {
                    if seeds.len() >= max_vertices {
                        complete = false;
                        continue;
                    }
                    let v = seeds.len();
                    index.insert(key.clone(), v);
                    seeds.push(Seed { feed: f, coords: c, depth: seed.depth + 1 });
                    keys.push(key);
                    parent.push(u);
                    queue.push_back(v);
                    v
                }
            };
            if u != v {
                edges.insert((u.min(v), u.max(v)));
            }
        }
    }
    let feed_classes = seeds.iter().map(|s| canonical_feed_key(&s.feed)).collect::<BTreeSet<_>>().len();
    let mut cycle_lengths: Vec<usize> = edges
        .iter()
        .filter(|&&(u, v)| parent[v] != u && parent[u] != v)
        .map(|&(u, v)| {
            let (mut a, mut b, mut len) = (u, v, 1);
            while a != b {
                if seeds[a].depth >= seeds[b].depth {
                    a = parent[a];
                } else {
                    b = parent[b];
                }
                len += 1;
            }
            len
        })
        .collect();
    cycle_lengths.sort_unstable();
    Ok(ExchangeGraph { vertices: keys, edges: edges.into_iter().collect(), complete, feed_classes, cycle_lengths, seeds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_rank2_graphs_are_polygons() {
        for (p, expected) in [(0, 4), (1, 5), (2, 6), (3, 8)] {
            let g = exchange_graph(&Feed::rank2(p), 20, 100).unwrap();
            assert!(g.complete);
            assert_eq!(g.vertex_count(), expected, "p = {p}");
            assert_eq!(g.edge_count(), expected);
            assert_eq!(g.cycle_lengths, vec![expected]);
        }
    }

    #[test]
    fn a2_has_one_feed_class() {
        let g = exchange_graph(&Feed::rank2(1), 20, 100).unwrap();
        assert_eq!(g.feed_classes, 1);
    }

    #[test]
    fn a3_has_fourteen_seeds() {
        let f = Feed::skew(vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]]).unwrap();
        let g = exchange_graph(&f, 30, 1000).unwrap();
        assert!(g.complete);
        assert_eq!(g.vertex_count(), 14);
        assert_eq!(g.edge_count(), 21);
    }

    #[test]
    fn depth_bound_is_reported() {
        let kronecker = Feed::skew(vec![vec![0, 2], vec![-2, 0]]).unwrap();
        let g = exchange_graph(&kronecker, 4, 100).unwrap();
        assert!(!g.complete);
    }
}
