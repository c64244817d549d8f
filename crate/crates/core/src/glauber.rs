//! Single-site dynamics on proper colourings: simulation with a seeded
//! portable generator, exact total-variation mixing profiles on tiny state
//! spaces, escape times from the nested level sets of the ring family, and
//! Monte-Carlo event estimates with binomial confidence intervals.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::colouring::{Colouring, is_proper};
use crate::constructions::{beta_start, build_j, level_set_contains};
use crate::graph::Graph;
use crate::reconfiguration::build_recolouring_graph;
use crate::{Error, Result};

/// Largest state space for which exact transition-matrix work is attempted.
pub const MAX_EXACT_STATES: usize = 10_000;

const Z_95: f64 = 1.959964;

/// The dynamics: each step draws a vertex and a colour independently and
/// uniformly, and recolours the vertex when the colour is absent from its
/// neighbourhood. Blocked proposals still consume a time step. The
/// generator is a fixed portable stream cipher (ChaCha8) so trajectories
/// replay identically across platforms; parallel trials use per-trial
/// stream offsets of the same seed. Proposals are drawn with unbiased
/// range sampling (no modulo bias).
pub struct Chain<'g> {
    graph: &'g Graph,
    k: usize,
    state: Vec<u8>,
    rng: ChaCha8Rng,
    steps: u64,
}

impl<'g> Chain<'g> {
    pub fn new(graph: &'g Graph, start: &Colouring, seed: u64) -> Result<Self> {
        Chain::with_stream(graph, start, seed, 0)
    }

    /// A chain on sub-stream `stream` of `seed`; distinct streams are
    /// independent, scheduling-order independent trials.
    pub fn with_stream(graph: &'g Graph, start: &Colouring, seed: u64, stream: u64) -> Result<Self> {
        if !is_proper(graph, start)? {
            return Err(Error::Input("chain must start at a proper colouring".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Ok(Chain {
            graph,
            k: start.k(),
            state: start.colours().to_vec(),
            rng,
            steps: 0,
        })
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn state(&self) -> &[u8] {
        &self.state
    }

    pub fn colouring(&self) -> Colouring {
        Colouring::new(self.k, self.state.clone()).expect("chain state stays a valid colouring")
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Recolour `v` to `c` if `c` is absent from v's neighbourhood; returns
    /// whether the state changed. Does not advance the step counter.
    pub fn apply_proposal(&mut self, v: usize, c: u8) -> bool {
        let blocked = self
            .graph
            .neighbours(v)
            .iter()
            .any(|&u| self.state[u as usize] == c);
        if blocked || self.state[v] == c {
            return false;
        }
        self.state[v] = c;
        true
    }

    /// One step: sample the vertex, then the colour.
    pub fn step(&mut self) {
        let v = self.rng.random_range(0..self.graph.n());
        let c = self.rng.random_range(1..=self.k as u8);
        self.apply_proposal(v, c);
        self.steps += 1;
    }

    pub fn run(&mut self, steps: u64) {
        for _ in 0..steps {
            self.step();
        }
    }
}

/// Which states an exact computation runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Restrict {
    All,
    /// Drop states with no available move — the frozen states when
    /// k = Δ+1.
    Nonfrozen,
}

impl std::str::FromStr for Restrict {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Restrict::All),
            "nonfrozen" => Ok(Restrict::Nonfrozen),
            other => Err(Error::Input(format!("unknown restriction {other:?}"))),
        }
    }
}

/// Worst-case-start total-variation distance to uniform, per step.
#[derive(Debug, Clone, Serialize)]
pub struct TVProfile {
    /// d[t] for t = 0..=t_max.
    pub d: Vec<f64>,
    /// First t with d(t) ≤ 1/4.
    pub t_mix_quarter: Option<usize>,
    pub states: usize,
}

impl TVProfile {
    pub fn t_mix_at(&self, eps: f64) -> Option<usize> {
        self.d.iter().position(|&x| x <= eps)
    }
}

/// Half the L1 distance; equal to the maximum probability gap over events.
pub fn tv_distance(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Exact distance-to-stationarity profile d(t) = max over starts of the
/// total-variation distance between the t-step distribution and uniform,
/// on the chosen state set. Each state has n·k equally likely proposals;
/// blocked proposals contribute self-loop mass.
pub fn exact_tv_profile(
    g: &Graph,
    k: usize,
    t_max: usize,
    restrict: Restrict,
    budget: u64,
) -> Result<TVProfile> {
    let rg = build_recolouring_graph(g, k, budget)?;
    let keep: Vec<usize> = (0..rg.state_count())
        .filter(|&i| match restrict {
            Restrict::All => true,
            Restrict::Nonfrozen => !rg.is_isolated(i),
        })
        .collect();
    let m = keep.len();
    if m == 0 {
        return Err(Error::Structure("restriction leaves no states".into()));
    }
    if m > MAX_EXACT_STATES {
        return Err(Error::Unsupported(format!(
            "exact profile refused on {m} states (limit {MAX_EXACT_STATES})"
        )));
    }
    let mut local = vec![usize::MAX; rg.state_count()];
    for (slot, &i) in keep.iter().enumerate() {
        local[i] = slot;
    }
    // moves out of a kept state always land in a kept state, so the
    // restricted adjacency is self-contained
    let adj: Vec<Vec<u32>> = keep
        .iter()
        .map(|&i| rg.neighbours(i).iter().map(|&j| local[j as usize] as u32).collect())
        .collect();
    let components = {
        let mut seen = vec![false; m];
        let mut comps = 0usize;
        for s in 0..m {
            if seen[s] {
                continue;
            }
            comps += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &u in &adj[v] {
                    if !seen[u as usize] {
                        seen[u as usize] = true;
                        stack.push(u as usize);
                    }
                }
            }
        }
        comps
    };
    if components != 1 {
        return Err(Error::NotIrreducible { components });
    }
    let move_mass = 1.0 / (g.n() as f64 * k as f64);
    let uniform = 1.0 / m as f64;
    let per_start: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|start| {
            let mut mu = vec![0.0f64; m];
            mu[start] = 1.0;
            let mut next = vec![0.0f64; m];
            let mut ds = Vec::with_capacity(t_max + 1);
            for _t in 0..=t_max {
                ds.push(0.5 * mu.iter().map(|&p| (p - uniform).abs()).sum::<f64>());
                for (y, slot) in next.iter_mut().enumerate() {
                    let stay = 1.0 - adj[y].len() as f64 * move_mass;
                    let inflow: f64 = adj[y].iter().map(|&x| mu[x as usize]).sum();
                    *slot = mu[y] * stay + inflow * move_mass;
                }
                std::mem::swap(&mut mu, &mut next);
            }
            ds
        })
        .collect();
    let mut d = vec![0.0f64; t_max + 1];
    for ds in &per_start {
        for (slot, &v) in d.iter_mut().zip(ds) {
            *slot = slot.max(v);
        }
    }
    for w in d.windows(2) {
        if w[1] > w[0] + 1e-12 {
            return Err(Error::Structure(format!(
                "distance profile increased from {} to {}",
                w[0], w[1]
            )));
        }
    }
    let t_mix_quarter = d.iter().position(|&x| x <= 0.25);
    Ok(TVProfile { d, t_mix_quarter, states: m })
}

/// Steps until the chain's state leaves the i-th level set of the ring
/// family J(2k); 0 if it is already outside. Counted from the current
/// state, not from the chain's creation.
pub fn escape_time(chain: &mut Chain, k_level: usize, i: usize, step_budget: u64) -> Result<u64> {
    let delta = chain
        .graph()
        .regularity()
        .ok_or_else(|| Error::Input("escape times are defined on the ring family".into()))?;
    let expected = build_j(2 * k_level, delta)?;
    if chain.graph().n() != expected.n() || chain.graph().edges() != expected.edges() {
        return Err(Error::Input(format!(
            "escape times need the ring graph J({}) with Δ={delta}",
            2 * k_level
        )));
    }
    let outside = |state: &[u8]| -> Result<bool> {
        let a = Colouring::new(delta + 1, state.to_vec())?;
        Ok(!level_set_contains(&a, k_level, delta, i)?)
    };
    if outside(chain.state())? {
        return Ok(0);
    }
    let mut taken = 0u64;
    loop {
        if taken >= step_budget {
            return Err(Error::Budget { nodes: taken, partial: 0 });
        }
        chain.step();
        taken += 1;
        if outside(chain.state())? {
            return Ok(taken);
        }
    }
}

/// One seeded trajectory from the slow start β on J(2k): the exit times
/// τ_1 ≤ τ_2 ≤ … ≤ τ_k from the nested level sets, all read off a single
/// run. Budget exhaustion reports how many exits were recorded.
pub fn escape_times(
    k_level: usize,
    delta: usize,
    seed: u64,
    stream: u64,
    step_budget: u64,
) -> Result<Vec<u64>> {
    let (g, beta) = beta_start(k_level, delta)?;
    let mut chain = Chain::with_stream(&g, &beta, seed, stream)?;
    let rows = delta + 1;
    let mut taus = Vec::with_capacity(k_level);
    let mut level = 1usize;
    let in_level = |state: &[u8], i: usize| {
        (i..=2 * k_level - i).all(|fiber| state[fiber * rows] == 1)
    };
    while level <= k_level {
        if chain.steps() >= step_budget {
            return Err(Error::Budget { nodes: chain.steps(), partial: taus.len() as u64 });
        }
        chain.step();
        while level <= k_level && !in_level(chain.state(), level) {
            taus.push(chain.steps());
            level += 1;
        }
    }
    Ok(taus)
}

/// Monte-Carlo estimate with a binomial 95% confidence interval (normal
/// approximation), from `trials` independent seeded trajectories.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Estimate {
    pub estimate: f64,
    pub ci95: (f64, f64),
    pub trials: u64,
    pub successes: u64,
}

impl Estimate {
    pub fn from_counts(successes: u64, trials: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::Input("need at least one trial".into()));
        }
        let p = successes as f64 / trials as f64;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        Ok(Estimate {
            estimate: p,
            ci95: ((p - Z_95 * se).max(0.0), (p + Z_95 * se).min(1.0)),
            trials,
            successes,
        })
    }
}

/// Probability that the state at time `t` satisfies `event`, starting from
/// `start`. Trial j runs on RNG stream j of `seed`.
pub fn event_probability_estimate(
    g: &Graph,
    start: &Colouring,
    t: u64,
    event: &(dyn Fn(&[u8]) -> bool + Sync),
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    if trials == 0 {
        return Err(Error::Input("need at least one trial".into()));
    }
    if !is_proper(g, start)? {
        return Err(Error::Input("chain must start at a proper colouring".into()));
    }
    let successes: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut chain = Chain::with_stream(g, start, seed, trial)
                .expect("start validated above");
            chain.run(t);
            u64::from(event(chain.state()))
        })
        .sum();
    Estimate::from_counts(successes, trials)
}

/// How a stationary probability was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StationaryRoute {
    Enumerated,
    ColourSymmetry,
}

#[derive(Debug, Clone, Serialize)]
pub struct StationaryProbability {
    #[serde(serialize_with = "crate::serialize_ratio")]
    pub value: Ratio<u64>,
    pub route: StationaryRoute,
    /// Size of the restricted state set when enumerated.
    pub states: Option<u64>,
}

/// Events with a known exact stationary probability under uniform measure.
pub enum EventSpec<'a> {
    /// Arbitrary predicate; needs full enumeration of the state set.
    Predicate(&'a (dyn Fn(&[u8]) -> bool + Sync)),
    /// "vertex v has colour c": colour relabelling fixes the (restricted)
    /// state set and permutes the k colour values at v, so the probability
    /// is exactly 1/k without enumeration.
    VertexHasColour { v: usize, c: u8 },
}

/// Exact probability of the event under the uniform distribution on the
/// (restricted) proper-colouring state set. Enumerates when it can;
/// vertex-colour events fall back to the colour-symmetry value 1/k when
/// enumeration exceeds the budget.
pub fn stationary_event_probability(
    g: &Graph,
    k: usize,
    restrict: Restrict,
    event: EventSpec,
    budget: u64,
) -> Result<StationaryProbability> {
    let enumerated = stationary_by_enumeration(g, k, restrict, &event, budget);
    match (enumerated, event) {
        (Ok(p), _) => Ok(p),
        (Err(Error::Budget { .. }), EventSpec::VertexHasColour { .. }) => Ok(StationaryProbability {
            value: Ratio::new(1, k as u64),
            route: StationaryRoute::ColourSymmetry,
            states: None,
        }),
        (Err(Error::Budget { .. }), EventSpec::Predicate(_)) => Err(Error::Unsupported(
            "state set exceeds the enumeration budget and the event has no symmetry shortcut"
                .into(),
        )),
        (Err(e), _) => Err(e),
    }
}

fn stationary_by_enumeration(
    g: &Graph,
    k: usize,
    restrict: Restrict,
    event: &EventSpec,
    budget: u64,
) -> Result<StationaryProbability> {
    let mut kept = 0u64;
    let mut hits = 0u64;
    let free_move_exists = |state: &[u8]| -> bool {
        (0..g.n()).any(|v| {
            (1..=k as u8).any(|c| {
                c != state[v] && !g.neighbours(v).iter().any(|&u| state[u as usize] == c)
            })
        })
    };
    crate::colouring::enumerate_with(g, k, crate::colouring::Filter::All, budget, |state| {
        if matches!(restrict, Restrict::Nonfrozen) && !free_move_exists(state) {
            return;
        }
        kept += 1;
        let hit = match event {
            EventSpec::Predicate(f) => f(state),
            EventSpec::VertexHasColour { v, c } => state[*v] == *c,
        };
        if hit {
            hits += 1;
        }
    })?;
    if kept == 0 {
        return Err(Error::Structure("restriction leaves no states".into()));
    }
    Ok(StationaryProbability {
        value: Ratio::new(hits, kept),
        route: StationaryRoute::Enumerated,
        states: Some(kept),
    })
}
