//! Colourings and their predicates (proper / frugal / frozen), exhaustive
//! enumeration with pruning, and the three extension counters used by the
//! ratio arguments: proper extensions, frugal extensions and the
//! order-based degree product.

use crate::graph::{Graph, VertexSet};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

pub const MAX_COLOURS: usize = 255;

/// Total assignment of colours `1..=k` to the vertices of a host graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Colouring {
    k: usize,
    colours: Vec<u8>,
}

impl Colouring {
    pub fn new(k: usize, colours: Vec<u8>) -> Result<Self> {
        if k == 0 || k > MAX_COLOURS {
            return Err(Error::Input(format!("palette size {k} out of range")));
        }
        for (v, &c) in colours.iter().enumerate() {
            if c == 0 || c as usize > k {
                return Err(Error::Input(format!("vertex {v} has colour {c} outside 1..={k}")));
            }
        }
        Ok(Colouring { k, colours })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.colours.len()
    }

    pub fn get(&self, v: usize) -> u8 {
        self.colours[v]
    }

    pub fn colours(&self) -> &[u8] {
        &self.colours
    }

    /// File format: `k` on the first line, then one `vertex colour` line per
    /// vertex. `#` comments and blank lines are ignored.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.k);
        for (v, &c) in self.colours.iter().enumerate() {
            s.push_str(&format!("{v} {c}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut k: Option<usize> = None;
        let mut pairs: Vec<(usize, u8, usize)> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse = |f: &str| -> Result<usize> {
                f.parse::<usize>().map_err(|e| Error::Parse {
                    line: idx + 1,
                    msg: e.to_string(),
                })
            };
            match (k, fields.as_slice()) {
                (None, [one]) => k = Some(parse(one)?),
                (Some(_), [v, c]) => pairs.push((parse(v)?, parse(c)? as u8, idx + 1)),
                _ => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        msg: format!("unexpected line {line:?}"),
                    })
                }
            }
        }
        let k = k.ok_or(Error::Parse {
            line: 0,
            msg: "missing palette size header".into(),
        })?;
        let n = pairs.len();
        let mut colours = vec![0u8; n];
        for (v, c, line) in pairs {
            if v >= n {
                return Err(Error::Parse {
                    line,
                    msg: format!("vertex {v} out of range for {n} assignment lines"),
                });
            }
            if colours[v] != 0 {
                return Err(Error::Parse {
                    line,
                    msg: format!("vertex {v} assigned twice"),
                });
            }
            colours[v] = c;
        }
        Colouring::new(k, colours)
    }
}

/// Colour assignment on a subset of vertices; colour 0 marks "unset".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialColouring {
    k: usize,
    colours: Vec<u8>,
}

impl PartialColouring {
    pub fn empty(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > MAX_COLOURS {
            return Err(Error::Input(format!("palette size {k} out of range")));
        }
        Ok(PartialColouring { k, colours: vec![0; n] })
    }

    /// Partial colouring assigning `colours[v]` wherever it is non-zero.
    pub fn from_slice(k: usize, colours: &[u8]) -> Result<Self> {
        let mut p = PartialColouring::empty(k, colours.len())?;
        for (v, &c) in colours.iter().enumerate() {
            if c != 0 {
                p.set(v, c)?;
            }
        }
        Ok(p)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.colours.len()
    }

    pub fn set(&mut self, v: usize, c: u8) -> Result<()> {
        if c == 0 || c as usize > self.k {
            return Err(Error::Input(format!("colour {c} outside 1..={}", self.k)));
        }
        self.colours[v] = c;
        Ok(())
    }

    pub fn unset(&mut self, v: usize) {
        self.colours[v] = 0;
    }

    pub fn get(&self, v: usize) -> Option<u8> {
        match self.colours[v] {
            0 => None,
            c => Some(c),
        }
    }

    pub fn domain(&self) -> VertexSet {
        VertexSet::new(
            self.colours
                .iter()
                .enumerate()
                .filter(|&(_, &c)| c != 0)
                .map(|(v, _)| v as u32),
        )
    }
}

/// A linear order on the vertices, stored both ways round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearOrder {
    order: Vec<u32>,
    rank: Vec<u32>,
}

impl LinearOrder {
    /// `order[i]` is the vertex in position `i`.
    pub fn new(order: Vec<u32>) -> Result<Self> {
        let n = order.len();
        let mut rank = vec![u32::MAX; n];
        for (pos, &v) in order.iter().enumerate() {
            if v as usize >= n || rank[v as usize] != u32::MAX {
                return Err(Error::Input("order is not a bijection".into()));
            }
            rank[v as usize] = pos as u32;
        }
        Ok(LinearOrder { order, rank })
    }

    pub fn identity(n: usize) -> Self {
        LinearOrder {
            order: (0..n as u32).collect(),
            rank: (0..n as u32).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn rank(&self, v: usize) -> usize {
        self.rank[v] as usize
    }

    pub fn order(&self) -> &[u32] {
        &self.order
    }

    /// The set of the last `len` vertices in the order.
    pub fn suffix(&self, len: usize) -> VertexSet {
        VertexSet::new(self.order[self.order.len() - len..].iter().copied())
    }

    /// Number of neighbours of `v` that come before `v` in this order.
    pub fn preceding_degree(&self, g: &Graph, v: usize) -> usize {
        g.neighbours(v)
            .iter()
            .filter(|&&u| self.rank[u as usize] < self.rank[v])
            .count()
    }
}

pub fn is_proper(g: &Graph, a: &Colouring) -> Result<bool> {
    if a.n() != g.n() {
        return Err(Error::Input(format!(
            "colouring covers {} vertices, graph has {}",
            a.n(),
            g.n()
        )));
    }
    Ok(g
        .edges()
        .iter()
        .all(|&(u, v)| a.get(u as usize) != a.get(v as usize)))
}

/// True iff no colour appears more than once in any open neighbourhood.
/// The input must be proper.
pub fn is_frugal(g: &Graph, a: &Colouring) -> Result<bool> {
    if !is_proper(g, a)? {
        return Err(Error::Input("frugality is defined for proper colourings".into()));
    }
    let mut seen = vec![false; a.k() + 1];
    for v in 0..g.n() {
        for &u in g.neighbours(v) {
            let c = a.get(u as usize) as usize;
            if seen[c] {
                for &w in g.neighbours(v) {
                    seen[a.get(w as usize) as usize] = false;
                }
                return Ok(false);
            }
            seen[c] = true;
        }
        for &u in g.neighbours(v) {
            seen[a.get(u as usize) as usize] = false;
        }
    }
    Ok(true)
}

/// True iff every colour of the palette appears in every closed
/// neighbourhood. Defined only for `k = Δ+1`; the input must be proper.
pub fn is_frozen(g: &Graph, a: &Colouring) -> Result<bool> {
    if a.k() != g.max_degree() + 1 {
        return Err(Error::Input(format!(
            "frozen predicate needs k = max degree + 1 (k={}, Δ={})",
            a.k(),
            g.max_degree()
        )));
    }
    if !is_proper(g, a)? {
        return Err(Error::Input("frozen predicate needs a proper colouring".into()));
    }
    let k = a.k();
    let mut seen = vec![false; k + 1];
    for v in 0..g.n() {
        seen[a.get(v) as usize] = true;
        let mut distinct = 1;
        for &u in g.neighbours(v) {
            let c = a.get(u as usize) as usize;
            if !seen[c] {
                seen[c] = true;
                distinct += 1;
            }
        }
        seen.iter_mut().for_each(|s| *s = false);
        if distinct != k {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Which colourings an enumeration keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Filter {
    All,
    Frugal,
    Frozen,
}

impl std::str::FromStr for Filter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Filter::All),
            "frugal" => Ok(Filter::Frugal),
            "frozen" => Ok(Filter::Frozen),
            other => Err(Error::Input(format!("unknown filter {other:?}"))),
        }
    }
}

/// Result of an exhaustive enumeration: how many colourings matched and how
/// many search nodes were explored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumOutcome {
    pub count: u64,
    pub nodes: u64,
}

/// Backtracking engine shared by `enumerate_with` and the extension
/// counters. Vertices are assigned in descending-degree order (free
/// vertices only); `cnt[v*k + c-1]` tracks how many coloured neighbours of
/// `v` carry colour `c`, which serves both the properness check
/// (`cnt[v][c] == 0`) and the frugality check (`cnt[u][c] == 0` for all
/// neighbours `u`).
struct Enumerator<'a> {
    g: &'a Graph,
    k: usize,
    filter: Filter,
    free: Vec<u32>,
    col: Vec<u8>,
    cnt: Vec<u16>,
    nodes: u64,
    budget: u64,
    count: u64,
}

impl<'a> Enumerator<'a> {
    fn new(g: &'a Graph, k: usize, filter: Filter, fixed: &PartialColouring, budget: u64) -> Self {
        let mut free: Vec<u32> = (0..g.n() as u32)
            .filter(|&v| fixed.get(v as usize).is_none())
            .collect();
        free.sort_by_key(|&v| (usize::MAX - g.degree(v as usize), v));
        let mut col = vec![0u8; g.n()];
        let mut cnt = vec![0u16; g.n() * k];
        for v in 0..g.n() {
            if let Some(c) = fixed.get(v) {
                col[v] = c;
                for &u in g.neighbours(v) {
                    cnt[u as usize * k + (c as usize - 1)] += 1;
                }
            }
        }
        Enumerator { g, k, filter, free, col, cnt, nodes: 0, budget, count: 0 }
    }

    /// True when some open neighbourhood already contains a repeated colour.
    fn seeded_repeat(&self) -> bool {
        self.cnt.iter().any(|&c| c > 1)
    }

    fn frozen_leaf(&self) -> bool {
        let k = self.k;
        for v in 0..self.g.n() {
            let own = self.col[v] as usize;
            for c in 1..=k {
                if c != own && self.cnt[v * k + c - 1] == 0 {
                    return false;
                }
            }
        }
        true
    }

    /// Returns `Ok(false)` when the visitor asked to stop early.
    fn run(&mut self, depth: usize, visit: &mut dyn FnMut(&[u8]) -> bool) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Budget { nodes: self.nodes, partial: self.count });
        }
        if depth == self.free.len() {
            let keep = match self.filter {
                Filter::All | Filter::Frugal => true,
                Filter::Frozen => self.frozen_leaf(),
            };
            if keep {
                self.count += 1;
                return Ok(visit(&self.col));
            }
            return Ok(true);
        }
        let v = self.free[depth] as usize;
        let k = self.k;
        'col: for c in 1..=k as u8 {
            if self.cnt[v * k + (c as usize - 1)] != 0 {
                continue; // a neighbour already has colour c
            }
            if !matches!(self.filter, Filter::All) {
                // Frugality: colour c must not already appear in the
                // neighbourhood of any neighbour of v.
                for &u in self.g.neighbours(v) {
                    if self.cnt[u as usize * k + (c as usize - 1)] != 0 {
                        continue 'col;
                    }
                }
            }
            self.col[v] = c;
            for &u in self.g.neighbours(v) {
                self.cnt[u as usize * k + (c as usize - 1)] += 1;
            }
            let r = self.run(depth + 1, visit);
            for &u in self.g.neighbours(v) {
                self.cnt[u as usize * k + (c as usize - 1)] -= 1;
            }
            self.col[v] = 0;
            if !r? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn check_palette(g: &Graph, k: usize, filter: Filter) -> Result<()> {
    if k == 0 || k > MAX_COLOURS {
        return Err(Error::Input(format!("palette size {k} out of range")));
    }
    if matches!(filter, Filter::Frozen) && k != g.max_degree() + 1 {
        return Err(Error::Input(format!(
            "frozen enumeration needs k = max degree + 1 (k={}, Δ={})",
            k,
            g.max_degree()
        )));
    }
    Ok(())
}

/// Stream every matching colouring through `visit` and return the count.
/// The search is cut off (with the partial count) after `budget` explored
/// nodes. Frozen filtering prunes on frugality — every frozen colouring is
/// frugal because each of the `Δ+1` colours can appear at most once per
/// closed neighbourhood — and applies the full frozen predicate at leaves.
pub fn enumerate_with(
    g: &Graph,
    k: usize,
    filter: Filter,
    budget: u64,
    mut visit: impl FnMut(&[u8]),
) -> Result<EnumOutcome> {
    check_palette(g, k, filter)?;
    let fixed = PartialColouring::empty(k, g.n())?;
    let mut e = Enumerator::new(g, k, filter, &fixed, budget);
    e.run(0, &mut |cs| {
        visit(cs);
        true
    })?;
    Ok(EnumOutcome { count: e.count, nodes: e.nodes })
}

/// Count matching colourings without materialising them.
pub fn count(g: &Graph, k: usize, filter: Filter, budget: u64) -> Result<EnumOutcome> {
    enumerate_with(g, k, filter, budget, |_| {})
}

/// First matching colouring in enumeration order, if any exists within the
/// node budget.
pub fn first_match(g: &Graph, k: usize, filter: Filter, budget: u64) -> Result<Option<Colouring>> {
    check_palette(g, k, filter)?;
    let fixed = PartialColouring::empty(k, g.n())?;
    let mut e = Enumerator::new(g, k, filter, &fixed, budget);
    let mut found: Option<Vec<u8>> = None;
    e.run(0, &mut |cs| {
        found = Some(cs.to_vec());
        false
    })?;
    found.map(|cs| Colouring::new(k, cs)).transpose()
}

/// Parallel count: fans out over the first assigned vertex's colours, one
/// independent search per colour. Each branch gets the full node budget, so
/// in the worst case up to `k * budget` nodes are explored before the
/// budget error surfaces.
pub fn count_parallel(g: &Graph, k: usize, filter: Filter, budget: u64) -> Result<EnumOutcome> {
    use rayon::prelude::*;
    check_palette(g, k, filter)?;
    if g.n() == 0 {
        return count(g, k, filter, budget);
    }
    let first = (0..g.n())
        .max_by_key(|&v| (g.degree(v), usize::MAX - v))
        .expect("nonempty graph");
    let outcomes: Vec<Result<EnumOutcome>> = (1..=k as u8)
        .into_par_iter()
        .map(|c| {
            let mut fixed = PartialColouring::empty(k, g.n())?;
            fixed.set(first, c)?;
            let mut e = Enumerator::new(g, k, filter, &fixed, budget);
            e.run(0, &mut |_| true)?;
            Ok(EnumOutcome { count: e.count, nodes: e.nodes })
        })
        .collect();
    let mut total = EnumOutcome { count: 0, nodes: 0 };
    for o in outcomes {
        let o = o?;
        total.count += o.count;
        total.nodes += o.nodes;
    }
    Ok(total)
}

fn check_extension_inputs(g: &Graph, t: &VertexSet, beta: &PartialColouring) -> Result<()> {
    if beta.n() != g.n() {
        return Err(Error::Input("partial colouring has wrong vertex count".into()));
    }
    if t.iter().any(|v| v as usize >= g.n()) {
        return Err(Error::Input("extension set out of range".into()));
    }
    for v in 0..g.n() {
        let in_t = t.contains(v as u32);
        let coloured = beta.get(v).is_some();
        if in_t == coloured {
            return Err(Error::Input(format!(
                "domain mismatch at vertex {v}: the partial colouring must cover exactly the complement of the extension set"
            )));
        }
    }
    // beta must be proper on its induced subgraph
    for &(u, v) in g.edges() {
        if let (Some(a), Some(b)) = (beta.get(u as usize), beta.get(v as usize)) {
            if a == b {
                return Err(Error::Input(format!(
                    "partial colouring is not proper: edge ({u},{v}) is monochromatic"
                )));
            }
        }
    }
    Ok(())
}

/// Number of proper colourings of the whole graph that agree with `beta`
/// outside `t`.
pub fn ext(g: &Graph, t: &VertexSet, beta: &PartialColouring) -> Result<u64> {
    check_extension_inputs(g, t, beta)?;
    let mut e = Enumerator::new(g, beta.k(), Filter::All, beta, u64::MAX);
    e.run(0, &mut |_| true)?;
    Ok(e.count)
}

/// Number of frugal colourings of the whole graph that agree with `beta`
/// outside `t`. Zero when `beta` already repeats a colour inside some open
/// neighbourhood, since no extension can fix that.
pub fn ext_frugal(g: &Graph, t: &VertexSet, beta: &PartialColouring) -> Result<u64> {
    check_extension_inputs(g, t, beta)?;
    let mut e = Enumerator::new(g, beta.k(), Filter::Frugal, beta, u64::MAX);
    if e.seeded_repeat() {
        return Ok(0);
    }
    e.run(0, &mut |_| true)?;
    Ok(e.count)
}

/// The order-based extension count `∏_{v∈T} (Δ+1 − d_σ(v))`, where
/// `d_σ(v)` counts neighbours of `v` preceding it in `sigma`. The palette
/// is implicitly `Δ(g)+1`; the value does not depend on any colouring.
pub fn ext_degree(g: &Graph, t: &VertexSet, sigma: &LinearOrder) -> Result<u128> {
    if sigma.n() != g.n() {
        return Err(Error::Input("order has wrong vertex count".into()));
    }
    if t.iter().any(|v| v as usize >= g.n()) {
        return Err(Error::Input("extension set out of range".into()));
    }
    let delta = g.max_degree();
    let mut product: u128 = 1;
    for v in t.iter() {
        let d = sigma.preceding_degree(g, v as usize);
        let factor = (delta + 1 - d) as u128;
        product = product
            .checked_mul(factor)
            .ok_or_else(|| Error::Unsupported("degree extension product overflows u128".into()))?;
    }
    Ok(product)
}

/// The set of colours `beta` uses on the distance-two neighbourhood of `x`.
pub fn colour_set_at_distance_two(g: &Graph, x: usize, beta: &PartialColouring) -> Result<Vec<u8>> {
    let second = g.second_neighbourhood(x);
    let mut out = Vec::new();
    for v in second.iter() {
        match beta.get(v as usize) {
            Some(c) => out.push(c),
            None => {
                return Err(Error::Input(format!(
                    "partial colouring does not cover distance-two vertex {v}"
                )))
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Apply a colour permutation inside a module of a frozen colouring. The
/// result is again frozen; callers can (and the tests do) re-check via
/// `is_frozen`.
pub fn permute_module_colours(
    g: &Graph,
    a: &Colouring,
    x: &VertexSet,
    perm: &[u8],
) -> Result<Colouring> {
    if perm.len() != a.k() {
        return Err(Error::Input("permutation length must equal palette size".into()));
    }
    let mut seen = vec![false; a.k() + 1];
    for &p in perm {
        if p == 0 || p as usize > a.k() || seen[p as usize] {
            return Err(Error::Input("not a permutation of the palette".into()));
        }
        seen[p as usize] = true;
    }
    if !g.is_module(x)? {
        return Err(Error::Input("set is not a module".into()));
    }
    if !is_frozen(g, a)? {
        return Err(Error::Input("colouring is not frozen".into()));
    }
    // Freezing survives only when the module's colours are shuffled among
    // themselves: vertices adjacent to the whole module see the same colour
    // set before and after.
    let mut used = vec![false; a.k() + 1];
    for v in x.iter() {
        used[a.get(v as usize) as usize] = true;
    }
    for c in 1..=a.k() {
        if used[c] && !used[perm[c - 1] as usize] {
            return Err(Error::Input(
                "permutation must map the module's colour set onto itself".into(),
            ));
        }
    }
    let mut colours = a.colours().to_vec();
    for v in x.iter() {
        let c = colours[v as usize];
        colours[v as usize] = perm[c as usize - 1];
    }
    Colouring::new(a.k(), colours)
}

/// For a frozen colouring of a regular graph, check that the colour class
/// of `c` has size `n/(Δ+1)` and that its closed neighbourhoods partition
/// the vertex set.
pub fn frozen_class_partition_check(g: &Graph, a: &Colouring, c: u8) -> Result<bool> {
    let delta = match g.regularity() {
        Some(d) => d,
        None => return Err(Error::Input("partition check needs a regular graph".into())),
    };
    if !is_frozen(g, a)? {
        return Err(Error::Input("partition check needs a frozen colouring".into()));
    }
    let class: Vec<usize> = (0..g.n()).filter(|&v| a.get(v) == c).collect();
    if class.len() * (delta + 1) != g.n() {
        return Ok(false);
    }
    let mut covered = vec![false; g.n()];
    for &x in &class {
        for u in g.closed_neighbourhood(x).iter() {
            if covered[u as usize] {
                return Ok(false);
            }
            covered[u as usize] = true;
        }
    }
    Ok(covered.into_iter().all(|b| b))
}
