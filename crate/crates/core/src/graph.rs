//! Simple undirected graphs with the structural queries the rest of the
//! crate relies on: neighbourhoods, girth, components, modules, twins,
//! cliques and isomorphism testing at desk scale.

use crate::{Error, Result};
use serde::{Serialize, Serializer};
use std::collections::VecDeque;
use std::fmt;

/// Immutable simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<u32>>,
    edges: Vec<(u32, u32)>,
}

/// A set of vertex ids, kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VertexSet {
    members: Vec<u32>,
}

impl VertexSet {
    pub fn new(members: impl IntoIterator<Item = u32>) -> Self {
        let mut m: Vec<u32> = members.into_iter().collect();
        m.sort_unstable();
        m.dedup();
        VertexSet { members: m }
    }

    pub fn contains(&self, v: u32) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.members.iter().copied()
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }
}

impl FromIterator<u32> for VertexSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        VertexSet::new(iter)
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Length of a shortest cycle, or `Acyclic` for forests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Girth {
    Finite(usize),
    Acyclic,
}

impl Serialize for Girth {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Girth::Finite(g) => s.serialize_u64(*g as u64),
            Girth::Acyclic => s.serialize_str("acyclic"),
        }
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(g) => write!(f, "{g}"),
            Girth::Acyclic => write!(f, "acyclic"),
        }
    }
}

impl Graph {
    /// Build a graph from an edge list. Duplicate edges are collapsed;
    /// loops and out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set: Vec<(u32, u32)> = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::Input(format!("loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::Input(format!(
                    "edge ({u},{v}) out of range for n={n}"
                )));
            }
            let (a, b) = (u.min(v) as u32, u.max(v) as u32);
            set.push((a, b));
        }
        set.sort_unstable();
        set.dedup();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &set {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { n, adj, edges: set })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `Some(d)` iff every vertex has degree exactly `d`.
    pub fn regularity(&self) -> Option<usize> {
        let d = self.adj.first().map(Vec::len)?;
        self.adj.iter().all(|a| a.len() == d).then_some(d)
    }

    pub fn neighbours(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&(v as u32)).is_ok()
    }

    pub fn open_neighbourhood(&self, v: usize) -> VertexSet {
        VertexSet::new(self.adj[v].iter().copied())
    }

    pub fn closed_neighbourhood(&self, v: usize) -> VertexSet {
        VertexSet::new(self.adj[v].iter().copied().chain(std::iter::once(v as u32)))
    }

    /// Vertices at distance exactly two from `v`: outside `N(v)`, sharing a
    /// neighbour with `v`. The vertex `v` itself is excluded, so the result
    /// is disjoint from `N[v]`.
    pub fn second_neighbourhood(&self, v: usize) -> VertexSet {
        let mut out = Vec::new();
        for &u in &self.adj[v] {
            for &w in &self.adj[u as usize] {
                if w as usize != v && !self.has_edge(v, w as usize) {
                    out.push(w);
                }
            }
        }
        VertexSet::new(out)
    }

    /// Shortest cycle length via BFS from every vertex.
    pub fn girth(&self) -> Girth {
        let mut best = usize::MAX;
        let mut dist = vec![usize::MAX; self.n];
        let mut parent = vec![u32::MAX; self.n];
        for root in 0..self.n {
            for d in dist.iter_mut() {
                *d = usize::MAX;
            }
            dist[root] = 0;
            parent[root] = u32::MAX;
            let mut q = VecDeque::new();
            q.push_back(root as u32);
            while let Some(x) = q.pop_front() {
                // No shorter cycle can be found beyond half the best length.
                if 2 * dist[x as usize] + 1 >= best {
                    continue;
                }
                for &y in &self.adj[x as usize] {
                    if dist[y as usize] == usize::MAX {
                        dist[y as usize] = dist[x as usize] + 1;
                        parent[y as usize] = x;
                        q.push_back(y);
                    } else if parent[x as usize] != y {
                        // Non-tree edge: closes a walk through the root of
                        // length dist(x)+dist(y)+1, which contains a cycle.
                        best = best.min(dist[x as usize] + dist[y as usize] + 1);
                    }
                }
            }
        }
        if best == usize::MAX {
            Girth::Acyclic
        } else {
            Girth::Finite(best)
        }
    }

    /// Number of triangles, each counted once.
    pub fn triangle_count(&self) -> u64 {
        let mut count = 0u64;
        for v in 0..self.n {
            let higher: Vec<u32> = self.adj[v]
                .iter()
                .copied()
                .filter(|&u| u as usize > v)
                .collect();
            for (i, &a) in higher.iter().enumerate() {
                for &b in &higher[i + 1..] {
                    if self.has_edge(a as usize, b as usize) {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    pub fn connected_components(&self) -> Vec<VertexSet> {
        let mut comp = vec![usize::MAX; self.n];
        let mut count = 0;
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            comp[s] = count;
            while let Some(x) = stack.pop() {
                for &y in &self.adj[x] {
                    if comp[y as usize] == usize::MAX {
                        comp[y as usize] = count;
                        stack.push(y as usize);
                    }
                }
            }
            count += 1;
        }
        let mut out = vec![Vec::new(); count];
        for (v, &c) in comp.iter().enumerate() {
            out[c].push(v as u32);
        }
        out.into_iter().map(VertexSet::new).collect()
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// True iff every vertex outside `x` is adjacent to all of `x` or to
    /// none of it.
    pub fn is_module(&self, x: &VertexSet) -> Result<bool> {
        if x.is_empty() {
            return Err(Error::Input("module test on empty set".into()));
        }
        if x.iter().any(|v| v as usize >= self.n) {
            return Err(Error::Input("module set out of range".into()));
        }
        for v in 0..self.n {
            if x.contains(v as u32) {
                continue;
            }
            let hits = x.iter().filter(|&u| self.has_edge(v, u as usize)).count();
            if hits != 0 && hits != x.len() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All vertices `w` with `N[w] = N[x]` (always includes `x`).
    pub fn twins(&self, x: usize) -> VertexSet {
        let nx = self.closed_neighbourhood(x);
        let mut out = vec![x as u32];
        for &w in &self.adj[x] {
            if self.closed_neighbourhood(w as usize) == nx {
                out.push(w);
            }
        }
        VertexSet::new(out)
    }

    /// Exact test for a clique on `s` vertices.
    pub fn has_clique(&self, s: usize) -> bool {
        assert!(s >= 1, "clique size must be positive");
        if s == 1 {
            return self.n > 0;
        }
        if s == 2 {
            return !self.edges.is_empty();
        }
        let cand: Vec<u32> = (0..self.n as u32)
            .filter(|&v| self.degree(v as usize) >= s - 1)
            .collect();
        self.clique_search(&[], &cand, s)
    }

    fn clique_search(&self, clique: &[u32], cand: &[u32], s: usize) -> bool {
        if clique.len() == s {
            return true;
        }
        if clique.len() + cand.len() < s {
            return false;
        }
        for (i, &v) in cand.iter().enumerate() {
            let next: Vec<u32> = cand[i + 1..]
                .iter()
                .copied()
                .filter(|&w| self.has_edge(v as usize, w as usize))
                .collect();
            let mut c = clique.to_vec();
            c.push(v);
            if self.clique_search(&c, &next, s) {
                return true;
            }
        }
        false
    }

    /// Induced subgraph on `keep`; second value maps new ids to old ids.
    pub fn induced(&self, keep: &VertexSet) -> (Graph, Vec<u32>) {
        let old: Vec<u32> = keep.members().to_vec();
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in old.iter().enumerate() {
            pos[v as usize] = i;
        }
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|&&(a, b)| pos[a as usize] != usize::MAX && pos[b as usize] != usize::MAX)
            .map(|&(a, b)| (pos[a as usize], pos[b as usize]))
            .collect();
        let g = Graph::new(old.len(), edges).expect("induced subgraph is valid");
        (g, old)
    }

    fn iso_signature(&self) -> Vec<(usize, Vec<usize>)> {
        (0..self.n)
            .map(|v| {
                let mut nd: Vec<usize> = self.adj[v].iter().map(|&u| self.degree(u as usize)).collect();
                nd.sort_unstable();
                (self.degree(v), nd)
            })
            .collect()
    }

    /// Backtracking isomorphism test with degree-based pruning. Intended for
    /// desk-scale graphs (n ≤ ~20).
    pub fn is_isomorphic(&self, other: &Graph) -> bool {
        if self.n != other.n || self.edges.len() != other.edges.len() {
            return false;
        }
        let sa = self.iso_signature();
        let sb = other.iso_signature();
        let mut ka = sa.clone();
        let mut kb = sb.clone();
        ka.sort();
        kb.sort();
        if ka != kb {
            return false;
        }
        let mut order: Vec<u32> = (0..self.n as u32).collect();
        order.sort_by_key(|&v| (usize::MAX - self.degree(v as usize), v));
        let mut mapping = vec![u32::MAX; self.n];
        let mut used = vec![false; self.n];
        self.iso_search(other, &sa, &sb, &order, 0, &mut mapping, &mut used)
    }

    #[allow(clippy::too_many_arguments)]
    fn iso_search(
        &self,
        other: &Graph,
        sa: &[(usize, Vec<usize>)],
        sb: &[(usize, Vec<usize>)],
        order: &[u32],
        i: usize,
        mapping: &mut [u32],
        used: &mut [bool],
    ) -> bool {
        if i == self.n {
            return true;
        }
        let v = order[i] as usize;
        'cand: for w in 0..self.n {
            if used[w] || sa[v] != sb[w] {
                continue;
            }
            for j in 0..i {
                let u = order[j] as usize;
                let adj_here = self.has_edge(v, u);
                let adj_there = other.has_edge(w, mapping[u] as usize);
                if adj_here != adj_there {
                    continue 'cand;
                }
            }
            mapping[v] = w as u32;
            used[w] = true;
            if self.iso_search(other, sa, sb, order, i + 1, mapping, used) {
                return true;
            }
            mapping[v] = u32::MAX;
            used[w] = false;
        }
        false
    }

    /// Text format: header `n m`, then one `u v` line per edge.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for &(a, b) in &self.edges {
            s.push_str(&format!("{a} {b}\n"));
        }
        s
    }

    /// Parse the text format. `#`-prefixed lines and blank lines are
    /// ignored. Files with 1-based vertex labels (some endpoint equal to
    /// `n`, none equal to `0`) are shifted down on load.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut raw: Vec<(usize, usize, usize)> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected two integers, got {line:?}"),
                });
            }
            let a = fields[0].parse::<usize>().map_err(|e| Error::Parse {
                line: idx + 1,
                msg: e.to_string(),
            })?;
            let b = fields[1].parse::<usize>().map_err(|e| Error::Parse {
                line: idx + 1,
                msg: e.to_string(),
            })?;
            if header.is_none() {
                header = Some((a, b));
            } else {
                raw.push((a, b, idx + 1));
            }
        }
        let (n, m) = header.ok_or(Error::Parse {
            line: 0,
            msg: "missing `n m` header".into(),
        })?;
        if raw.len() != m {
            return Err(Error::Parse {
                line: 0,
                msg: format!("header declares {m} edges, found {}", raw.len()),
            });
        }
        let max = raw.iter().map(|&(a, b, _)| a.max(b)).max().unwrap_or(0);
        let min = raw.iter().map(|&(a, b, _)| a.min(b)).min().unwrap_or(0);
        let shift = if max == n && min >= 1 { 1 } else { 0 };
        Graph::new(n, raw.iter().map(|&(a, b, _)| (a - shift, b - shift)))
    }
}
