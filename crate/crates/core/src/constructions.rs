//! Graph generators: the ring-of-cliques family J(ℓ), lifts of complete
//! graphs, random regular graphs via the configuration model, small named
//! graphs, and the distinguished colourings that come with them.
//!
//! Vertex naming convention for J(ℓ) and lifts: `index = fiber·(Δ+1) + row`,
//! with fibers and rows numbered from 0. Human-readable labels (`v_i^j`,
//! 1-based) are available separately for reports.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::colouring::{first_match, Colouring, Filter};
use crate::graph::{Girth, Graph, VertexSet};
use crate::{Error, Result};

/// Ring of ℓ near-cliques: fibers are (Δ+1)-cliques minus the edge between
/// rows 0 and Δ, and row 0 of each fiber is joined to row Δ of the previous
/// fiber (indices mod ℓ). The result is Δ-regular on ℓ(Δ+1) vertices.
pub fn build_j(l: usize, delta: usize) -> Result<Graph> {
    if l < 2 || delta < 2 {
        return Err(Error::Input(format!(
            "ring construction needs at least 2 fibers and degree 2 (got ℓ={l}, Δ={delta})"
        )));
    }
    let rows = delta + 1;
    let idx = |fiber: usize, row: usize| fiber * rows + row;
    let mut edges = Vec::new();
    for fiber in 0..l {
        for a in 0..rows {
            for b in a + 1..rows {
                if a == 0 && b == delta {
                    continue; // the one missing within-fiber edge
                }
                edges.push((idx(fiber, a), idx(fiber, b)));
            }
        }
        edges.push((idx((fiber + 1) % l, 0), idx(fiber, delta)));
    }
    let g = Graph::new(l * rows, edges)?;
    debug_assert_eq!(g.regularity(), Some(delta));
    Ok(g)
}

/// Human-readable labels `v_i^j` (1-based fiber and row) for `build_j`.
pub fn j_vertex_labels(l: usize, delta: usize) -> Vec<String> {
    let rows = delta + 1;
    (0..l * rows)
        .map(|idx| format!("v_{}^{}", idx / rows + 1, idx % rows + 1))
        .collect()
}

/// The colouring of J(ℓ) assigning each vertex its row index (1-based).
/// It is frozen: every closed neighbourhood meets all Δ+1 rows.
pub fn canonical_frozen_of_j(l: usize, delta: usize) -> Result<Colouring> {
    if l < 2 || delta < 2 {
        return Err(Error::Input("ring construction needs ℓ ≥ 2 and Δ ≥ 2".into()));
    }
    let rows = delta + 1;
    Colouring::new(rows, (0..l * rows).map(|idx| (idx % rows) as u8 + 1).collect())
}

/// The middle rows of each fiber form a module of J(ℓ): from outside, its
/// members are adjacent to exactly the same vertices.
pub fn j_module_sets(l: usize, delta: usize) -> Vec<VertexSet> {
    let rows = delta + 1;
    (0..l)
        .map(|fiber| VertexSet::new((1..delta).map(|row| (fiber * rows + row) as u32)))
        .collect()
}

/// The slow-mixing start on J(2k): the row colouring with two changes —
/// fiber 1 row 1 takes colour Δ+1 and fiber 2k row Δ+1 takes colour 1
/// (1-based fibers/rows). Proper, not frozen, and inside the first level
/// set.
pub fn beta_start(k_level: usize, delta: usize) -> Result<(Graph, Colouring)> {
    if k_level < 2 {
        return Err(Error::Input("level parameter must be at least 2".into()));
    }
    let l = 2 * k_level;
    let g = build_j(l, delta)?;
    let rows = delta + 1;
    let base = canonical_frozen_of_j(l, delta)?;
    let mut colours = base.colours().to_vec();
    colours[0] = rows as u8; // fiber 1, row 1
    colours[(l - 1) * rows + delta] = 1; // fiber 2k, row Δ+1
    let beta = Colouring::new(rows, colours)?;
    Ok((g, beta))
}

/// Membership in the i-th level set S_i on J(2k): the row-1 vertex of every
/// fiber j with i+1 ≤ j ≤ 2k+1−i (1-based) has colour 1. The sets are
/// nested: S_1 ⊆ S_2 ⊆ … ⊆ S_k.
pub fn level_set_contains(a: &Colouring, k_level: usize, delta: usize, i: usize) -> Result<bool> {
    level_set_contains_slice(a.colours(), k_level, delta, i)
}

/// Slice form of [`level_set_contains`], usable inside chain-state
/// predicates where only the raw colour vector is available.
pub fn level_set_contains_slice(
    colours: &[u8],
    k_level: usize,
    delta: usize,
    i: usize,
) -> Result<bool> {
    if i < 1 || i > k_level {
        return Err(Error::Input(format!("level {i} outside 1..={k_level}")));
    }
    let rows = delta + 1;
    if colours.len() != 2 * k_level * rows {
        return Err(Error::Input(format!(
            "colouring covers {} vertices, expected {}",
            colours.len(),
            2 * k_level * rows
        )));
    }
    // 0-based fibers i ..= 2k−i
    Ok((i..=2 * k_level - i).all(|fiber| colours[fiber * rows] == 1))
}

/// Pairs `{u,v}` of the complete base graph on `delta+1` vertices, in
/// lexicographic order. Lift matchings are indexed by position in this
/// list.
pub fn base_edges(delta: usize) -> Vec<(usize, usize)> {
    (0..=delta)
        .flat_map(|u| (u + 1..=delta).map(move |v| (u, v)))
        .collect()
}

/// A lift of the complete graph on Δ+1 base vertices: `fibers` copies of
/// each base vertex, one perfect matching between copy sets per base edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftSpec {
    delta: usize,
    fibers: usize,
    /// `matchings[e][a] = b` joins copy `a` of the edge's first endpoint to
    /// copy `b` of its second endpoint; `e` indexes `base_edges(delta)`.
    matchings: Vec<Vec<u32>>,
}

impl LiftSpec {
    pub fn new(delta: usize, fibers: usize, matchings: Vec<Vec<u32>>) -> Result<Self> {
        if fibers == 0 {
            return Err(Error::Input("lift needs at least one copy per base vertex".into()));
        }
        let expected = base_edges(delta).len();
        if matchings.len() != expected {
            return Err(Error::Input(format!(
                "expected {expected} matchings for Δ={delta}, got {}",
                matchings.len()
            )));
        }
        for (e, m) in matchings.iter().enumerate() {
            let mut seen = vec![false; fibers];
            if m.len() != fibers {
                return Err(Error::Input(format!("matching {e} has wrong length")));
            }
            for &b in m {
                if b as usize >= fibers || seen[b as usize] {
                    return Err(Error::Input(format!("matching {e} is not a bijection")));
                }
                seen[b as usize] = true;
            }
        }
        Ok(LiftSpec { delta, fibers, matchings })
    }

    pub fn identity(delta: usize, fibers: usize) -> Self {
        let ident: Vec<u32> = (0..fibers as u32).collect();
        LiftSpec {
            delta,
            fibers,
            matchings: vec![ident; base_edges(delta).len()],
        }
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn fibers(&self) -> usize {
        self.fibers
    }

    pub fn matchings(&self) -> &[Vec<u32>] {
        &self.matchings
    }
}

/// Vertex `(u, a)` (base vertex u, copy a) gets index `a·(Δ+1) + u`.
pub fn build_lift(spec: &LiftSpec) -> Result<Graph> {
    let rows = spec.delta + 1;
    let idx = |copy: usize, base: usize| copy * rows + base;
    let mut edges = Vec::new();
    for (e, &(u, v)) in base_edges(spec.delta).iter().enumerate() {
        for a in 0..spec.fibers {
            edges.push((idx(a, u), idx(spec.matchings[e][a] as usize, v)));
        }
    }
    let g = Graph::new(spec.fibers * rows, edges)?;
    debug_assert_eq!(g.regularity(), Some(spec.delta));
    Ok(g)
}

/// The colouring of any lift that copies a proper colouring of the base
/// clique: every vertex is coloured by its base vertex. Always frozen.
pub fn lift_pullback_colouring(delta: usize, fibers: usize) -> Result<Colouring> {
    let rows = delta + 1;
    Colouring::new(rows, (0..fibers * rows).map(|idx| (idx % rows) as u8 + 1).collect())
}

/// Uniform random lift: each matching an independent uniform permutation.
pub fn random_lift(delta: usize, fibers: usize, seed: u64) -> Result<(LiftSpec, Graph)> {
    if fibers == 0 {
        return Err(Error::Input("lift needs at least one copy per base vertex".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matchings = Vec::with_capacity(base_edges(delta).len());
    for _ in 0..base_edges(delta).len() {
        let mut perm: Vec<u32> = (0..fibers as u32).collect();
        perm.shuffle(&mut rng);
        matchings.push(perm);
    }
    let spec = LiftSpec::new(delta, fibers, matchings)?;
    let g = build_lift(&spec)?;
    Ok((spec, g))
}

/// Uniform random Δ-regular simple graph by the configuration model:
/// pair half-edges uniformly and restart whenever a loop or repeated edge
/// appears. Restarting (rather than repairing) keeps the sample uniform
/// over simple outcomes.
pub fn random_regular(n: usize, delta: usize, seed: u64) -> Result<Graph> {
    if n * delta % 2 != 0 {
        return Err(Error::Input(format!("n·Δ must be even (n={n}, Δ={delta})")));
    }
    if n <= delta {
        return Err(Error::Input(format!("need n > Δ (n={n}, Δ={delta})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<u32> = (0..n * delta).map(|p| (p / delta) as u32).collect();
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n * delta / 2);
    'attempt: for _ in 0..1_000_000u32 {
        points.shuffle(&mut rng);
        edges.clear();
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0] as usize, pair[1] as usize);
            if u == v {
                continue 'attempt; // loop
            }
            edges.push((u.min(v), u.max(v)));
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            continue 'attempt; // repeated edge
        }
        return Graph::new(n, edges.iter().copied());
    }
    Err(Error::Unsupported(
        "configuration model produced no simple graph within the restart cap".into(),
    ))
}

/// If the graph is a lift of a complete graph, return a witnessing
/// decomposition; otherwise `None`. The search looks for a frozen
/// colouring (backtracking with frugality pruning, capped by `budget`
/// nodes); its colour classes are the copy sets and the class-pair perfect
/// matchings are read off directly.
pub fn detect_lift_structure(g: &Graph, budget: u64) -> Result<Option<LiftSpec>> {
    let delta = match g.regularity() {
        Some(d) if d >= 1 => d,
        _ => return Ok(None),
    };
    let rows = delta + 1;
    if g.n() % rows != 0 {
        return Ok(None);
    }
    let fibers = g.n() / rows;
    let frozen = match first_match(g, rows, Filter::Frozen, budget)? {
        Some(a) => a,
        None => return Ok(None),
    };
    // colour classes, each sorted ascending; position within a class is the
    // copy index
    let mut classes: Vec<Vec<u32>> = vec![Vec::new(); rows];
    for v in 0..g.n() {
        classes[frozen.get(v) as usize - 1].push(v as u32);
    }
    if classes.iter().any(|c| c.len() != fibers) {
        return Err(Error::Structure(
            "frozen colouring with unequal colour classes on a regular graph".into(),
        ));
    }
    let mut position = vec![0u32; g.n()];
    for class in &classes {
        for (pos, &v) in class.iter().enumerate() {
            position[v as usize] = pos as u32;
        }
    }
    let mut matchings = Vec::new();
    for (u, v) in base_edges(delta) {
        let mut matching = vec![u32::MAX; fibers];
        for (a, &x) in classes[u].iter().enumerate() {
            let mut image = None;
            for &y in g.neighbours(x as usize) {
                if frozen.get(y as usize) as usize - 1 == v {
                    if image.replace(y).is_some() {
                        return Err(Error::Structure(
                            "frozen colouring repeats a colour in a neighbourhood".into(),
                        ));
                    }
                }
            }
            let y = image.ok_or_else(|| {
                Error::Structure("frozen colouring misses a colour in a neighbourhood".into())
            })?;
            matching[a] = position[y as usize];
        }
        matchings.push(matching);
    }
    Ok(Some(LiftSpec::new(delta, fibers, matchings)?))
}

/// Every labelled simple Δ-regular graph on n vertices, by backtracking:
/// vertex u picks its neighbours among higher-indexed vertices with spare
/// degree. Intended for small n (desk scale).
pub fn labelled_regular_graphs(n: usize, delta: usize) -> Result<Vec<Graph>> {
    if n * delta % 2 != 0 || n <= delta {
        return Err(Error::Input(format!(
            "no Δ-regular graphs on these parameters (n={n}, Δ={delta})"
        )));
    }
    let mut residual = vec![delta; n];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut out = Vec::new();
    fn choose(
        u: usize,
        cands: &[usize],
        start: usize,
        need: usize,
        residual: &mut Vec<usize>,
        edges: &mut Vec<(usize, usize)>,
        out: &mut Vec<Graph>,
        n: usize,
    ) {
        if need == 0 {
            fill(u + 1, residual, edges, out, n);
            return;
        }
        if cands.len() - start < need {
            return;
        }
        for i in start..=cands.len() - need {
            let v = cands[i];
            residual[v] -= 1;
            edges.push((u, v));
            choose(u, cands, i + 1, need - 1, residual, edges, out, n);
            edges.pop();
            residual[v] += 1;
        }
    }
    fn fill(
        u: usize,
        residual: &mut Vec<usize>,
        edges: &mut Vec<(usize, usize)>,
        out: &mut Vec<Graph>,
        n: usize,
    ) {
        if u == n {
            out.push(Graph::new(n, edges.iter().copied()).expect("generated edges are simple"));
            return;
        }
        let need = residual[u];
        let cands: Vec<usize> = (u + 1..n).filter(|&v| residual[v] > 0).collect();
        residual[u] = 0;
        choose(u, &cands, 0, need, residual, edges, out, n);
        residual[u] = need;
    }
    fill(0, &mut residual, &mut edges, &mut out, n);
    Ok(out)
}

/// All lift specs with identity matchings on the base edges at base vertex
/// 0 and arbitrary permutations elsewhere. Re-indexing each copy set
/// through its star matching turns any lift into one of these, so up to
/// isomorphism the list covers all lifts with the given parameters.
pub fn normalized_lift_specs(delta: usize, fibers: usize) -> Vec<LiftSpec> {
    let edges = base_edges(delta);
    let free: Vec<usize> = edges
        .iter()
        .enumerate()
        .filter(|(_, &(u, _))| u != 0)
        .map(|(e, _)| e)
        .collect();
    let mut perms: Vec<Vec<u32>> = Vec::new();
    let mut current: Vec<u32> = (0..fibers as u32).collect();
    permutations(&mut current, 0, &mut perms);
    let ident: Vec<u32> = (0..fibers as u32).collect();
    let mut specs = Vec::new();
    let mut assignment = vec![0usize; free.len()];
    loop {
        let mut matchings = vec![ident.clone(); edges.len()];
        for (slot, &e) in free.iter().enumerate() {
            matchings[e] = perms[assignment[slot]].clone();
        }
        specs.push(LiftSpec { delta, fibers, matchings });
        // odometer over the free edges
        let mut slot = 0;
        loop {
            if slot == free.len() {
                return specs;
            }
            assignment[slot] += 1;
            if assignment[slot] < perms.len() {
                break;
            }
            assignment[slot] = 0;
            slot += 1;
        }
    }
}

fn permutations(current: &mut Vec<u32>, at: usize, out: &mut Vec<Vec<u32>>) {
    if at == current.len() {
        out.push(current.clone());
        return;
    }
    for i in at..current.len() {
        current.swap(at, i);
        permutations(current, at + 1, out);
        current.swap(at, i);
    }
}

/// Cheap isomorphism prescreen: order, size, degree sequence, girth and the
/// multiset of per-vertex triangle counts.
fn iso_invariant(g: &Graph) -> (usize, usize, Vec<usize>, usize, Vec<usize>) {
    let mut degrees: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
    degrees.sort_unstable();
    let girth = match g.girth() {
        Girth::Finite(c) => c,
        Girth::Acyclic => usize::MAX,
    };
    let mut triangles: Vec<usize> = (0..g.n())
        .map(|v| {
            let nbrs = g.neighbours(v);
            let mut t = 0;
            for (i, &a) in nbrs.iter().enumerate() {
                for &b in &nbrs[i + 1..] {
                    if g.has_edge(a as usize, b as usize) {
                        t += 1;
                    }
                }
            }
            t
        })
        .collect();
    triangles.sort_unstable();
    (g.n(), g.m(), degrees, girth, triangles)
}

/// Representatives of the isomorphism classes occurring in the input,
/// keeping first occurrences in order.
pub fn distinct_by_isomorphism(graphs: Vec<Graph>) -> Vec<Graph> {
    let mut reps: Vec<(Graph, (usize, usize, Vec<usize>, usize, Vec<usize>))> = Vec::new();
    for g in graphs {
        let inv = iso_invariant(&g);
        let known = reps
            .iter()
            .any(|(rep, rinv)| *rinv == inv && rep.is_isomorphic(&g));
        if !known {
            reps.push((g, inv));
        }
    }
    reps.into_iter().map(|(g, _)| g).collect()
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::Input("cycle needs at least 3 vertices".into()));
    }
    Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
}

pub fn path(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Input("path needs at least 1 vertex".into()));
    }
    Graph::new(n, (1..n).map(|i| (i - 1, i)))
}

pub fn complete(n: usize) -> Result<Graph> {
    Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

pub fn complete_bipartite(a: usize, b: usize) -> Result<Graph> {
    Graph::new(a + b, (0..a).flat_map(move |u| (a..a + b).map(move |v| (u, v))))
}

/// Outer 5-cycle, inner 5-cycle at step 2, spokes between them.
pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
        edges.push((i, 5 + i));
    }
    Graph::new(10, edges).expect("fixed edge list is valid")
}
