//! The recolouring meta-graph: one node per proper k-colouring, edges
//! between colourings that differ at exactly one vertex. Frozen colourings
//! are its isolated nodes when k = Δ+1.

use std::collections::HashMap;

use serde::Serialize;

use crate::colouring::{enumerate_with, Filter};
use crate::graph::Graph;
use crate::{Error, Result};

/// All proper k-colourings of a host graph together with the
/// one-vertex-change adjacency between them. States are indexed in
/// enumeration order, which is deterministic for a given host graph.
#[derive(Debug, Clone)]
pub struct RecolouringGraph {
    k: usize,
    host_n: usize,
    states: Vec<Vec<u8>>,
    adj: Vec<Vec<u32>>,
    m: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentSummary {
    pub isolated_count: u64,
    /// Sizes of all components with at least two states, largest first.
    pub nontrivial_components: Vec<usize>,
}

pub fn build_recolouring_graph(g: &Graph, k: usize, budget: u64) -> Result<RecolouringGraph> {
    let mut states: Vec<Vec<u8>> = Vec::new();
    enumerate_with(g, k, Filter::All, budget, |cs| states.push(cs.to_vec()))?;
    let index: HashMap<&[u8], u32> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_slice(), i as u32))
        .collect();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); states.len()];
    let mut m = 0u64;
    let mut probe = vec![0u8; g.n()];
    for (i, state) in states.iter().enumerate() {
        probe.copy_from_slice(state);
        for v in 0..g.n() {
            let original = state[v];
            'col: for c in 1..=k as u8 {
                if c == original {
                    continue;
                }
                for &u in g.neighbours(v) {
                    if state[u as usize] == c {
                        continue 'col;
                    }
                }
                probe[v] = c;
                let j = index[probe.as_slice()];
                // each edge recorded once, from the lower-indexed endpoint
                if (i as u32) < j {
                    adj[i].push(j);
                    adj[j as usize].push(i as u32);
                    m += 1;
                }
            }
            probe[v] = original;
        }
    }
    for nbrs in &mut adj {
        nbrs.sort_unstable();
    }
    Ok(RecolouringGraph { k, host_n: g.n(), states, adj, m })
}

impl RecolouringGraph {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn edge_count(&self) -> u64 {
        self.m
    }

    pub fn state(&self, i: usize) -> &[u8] {
        &self.states[i]
    }

    pub fn states(&self) -> &[Vec<u8>] {
        &self.states
    }

    pub fn neighbours(&self, i: usize) -> &[u32] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn is_isolated(&self, i: usize) -> bool {
        self.adj[i].is_empty()
    }

    fn components(&self) -> Vec<Vec<u32>> {
        let n = self.states.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start as u32];
            let mut head = 0;
            while head < comp.len() {
                let v = comp[head] as usize;
                head += 1;
                for &u in &self.adj[v] {
                    if !seen[u as usize] {
                        seen[u as usize] = true;
                        comp.push(u);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn component_summary(&self) -> ComponentSummary {
        let mut isolated = 0u64;
        let mut sizes = Vec::new();
        for comp in self.components() {
            if comp.len() == 1 {
                isolated += 1;
            } else {
                sizes.push(comp.len());
            }
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        ComponentSummary { isolated_count: isolated, nontrivial_components: sizes }
    }

    /// Exact diameter of the unique component of size ≥ 2, by all-pairs
    /// BFS. Errors when that component does not exist or is not unique, and
    /// refuses to run on more than 10⁶ states.
    pub fn nonfrozen_diameter(&self) -> Result<usize> {
        let nontrivial: Vec<Vec<u32>> = self
            .components()
            .into_iter()
            .filter(|c| c.len() >= 2)
            .collect();
        match nontrivial.len() {
            0 => Err(Error::Structure("no component with at least two states".into())),
            1 => {
                let comp = &nontrivial[0];
                if comp.len() > 1_000_000 {
                    return Err(Error::Unsupported(format!(
                        "diameter refused on {} states (limit 10^6)",
                        comp.len()
                    )));
                }
                let mut dist = vec![u32::MAX; self.states.len()];
                let mut diameter = 0usize;
                for &source in comp {
                    for &v in comp {
                        dist[v as usize] = u32::MAX;
                    }
                    dist[source as usize] = 0;
                    let mut queue = std::collections::VecDeque::from([source]);
                    while let Some(v) = queue.pop_front() {
                        for &u in &self.adj[v as usize] {
                            if dist[u as usize] == u32::MAX {
                                dist[u as usize] = dist[v as usize] + 1;
                                queue.push_back(u);
                            }
                        }
                    }
                    let ecc = comp
                        .iter()
                        .map(|&v| dist[v as usize])
                        .max()
                        .expect("component is nonempty");
                    diameter = diameter.max(ecc as usize);
                }
                Ok(diameter)
            }
            more => Err(Error::Structure(format!(
                "{more} components with at least two states; expected a unique one"
            ))),
        }
    }

    /// The meta-graph as a plain graph (state indices as vertices).
    pub fn to_graph(&self) -> Result<Graph> {
        let mut edges = Vec::with_capacity(self.m as usize);
        for (i, nbrs) in self.adj.iter().enumerate() {
            for &j in nbrs {
                if (i as u32) < j {
                    edges.push((i, j as usize));
                }
            }
        }
        Graph::new(self.states.len(), edges)
    }

    /// Edge-list text in the host graph format, states as ids.
    pub fn to_text(&self) -> Result<String> {
        Ok(self.to_graph()?.to_text())
    }

    /// Sidecar JSON mapping state ids to colour vectors.
    pub fn state_table_json(&self) -> String {
        #[derive(Serialize)]
        struct Table<'a> {
            k: usize,
            host_vertices: usize,
            states: &'a [Vec<u8>],
        }
        serde_json::to_string_pretty(&Table {
            k: self.k,
            host_vertices: self.host_n,
            states: &self.states,
        })
        .expect("state table serializes")
    }
}
