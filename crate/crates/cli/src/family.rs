use std::path::PathBuf;

use clap::Args;
use recolor_core::constructions as cons;
use recolor_core::{Error, Graph, Result};
use serde_json::{json, Value};

/// Where a command's working graph comes from: a file on disk or a named
/// family with parameters. Random families draw from the run's seed, so the
/// same invocation always resolves to the same graph.
#[derive(Args, Debug, Clone, Default)]
pub struct GraphSource {
    /// Graph file in edge-list text format (`n m` header, then `u v` lines).
    #[arg(long, value_name = "PATH", conflicts_with = "family")]
    pub graph: Option<PathBuf>,

    /// Named family: j, cycle, path, complete, complete-bipartite,
    /// petersen, random-regular, random-lift.
    #[arg(long, value_name = "NAME")]
    pub family: Option<String>,

    /// Fiber count ℓ (family j).
    #[arg(long, value_name = "L")]
    pub l: Option<usize>,

    /// Degree parameter Δ (families j, random-regular, random-lift).
    #[arg(long, value_name = "DELTA")]
    pub delta: Option<usize>,

    /// Vertex count (families cycle, path, complete, random-regular).
    #[arg(long, value_name = "N")]
    pub n: Option<usize>,

    /// First side size (family complete-bipartite).
    #[arg(long, value_name = "A")]
    pub a: Option<usize>,

    /// Second side size (family complete-bipartite).
    #[arg(long, value_name = "B")]
    pub b: Option<usize>,

    /// Copies of each base vertex (family random-lift).
    #[arg(long, value_name = "FIBERS")]
    pub fibers: Option<usize>,
}

fn need(v: Option<usize>, flag: &str, family: &str) -> Result<usize> {
    v.ok_or_else(|| Error::Input(format!("family {family:?} needs {flag}")))
}

impl GraphSource {
    /// Resolve to a graph plus a JSON echo of the parameters that produced
    /// it.
    pub fn resolve(&self, seed: u64) -> Result<(Graph, Value)> {
        if let Some(path) = &self.graph {
            let text = std::fs::read_to_string(path)?;
            let g = Graph::from_text(&text)?;
            return Ok((g, json!({ "graph": path.display().to_string() })));
        }
        let family = self
            .family
            .as_deref()
            .ok_or_else(|| Error::Input("need --graph or --family".into()))?;
        match family.to_ascii_lowercase().as_str() {
            "j" => {
                let l = need(self.l, "--l", family)?;
                let delta = need(self.delta, "--delta", family)?;
                Ok((cons::build_j(l, delta)?, json!({"family": "j", "l": l, "delta": delta})))
            }
            "cycle" => {
                let n = need(self.n, "--n", family)?;
                Ok((cons::cycle(n)?, json!({"family": "cycle", "n": n})))
            }
            "path" => {
                let n = need(self.n, "--n", family)?;
                Ok((cons::path(n)?, json!({"family": "path", "n": n})))
            }
            "complete" => {
                let n = need(self.n, "--n", family)?;
                Ok((cons::complete(n)?, json!({"family": "complete", "n": n})))
            }
            "complete-bipartite" => {
                let a = need(self.a, "--a", family)?;
                let b = need(self.b, "--b", family)?;
                Ok((
                    cons::complete_bipartite(a, b)?,
                    json!({"family": "complete-bipartite", "a": a, "b": b}),
                ))
            }
            "petersen" => Ok((cons::petersen(), json!({"family": "petersen"}))),
            "random-regular" => {
                let n = need(self.n, "--n", family)?;
                let delta = need(self.delta, "--delta", family)?;
                Ok((
                    cons::random_regular(n, delta, seed)?,
                    json!({"family": "random-regular", "n": n, "delta": delta}),
                ))
            }
            "random-lift" => {
                let delta = need(self.delta, "--delta", family)?;
                let fibers = need(self.fibers, "--fibers", family)?;
                let (_, g) = cons::random_lift(delta, fibers, seed)?;
                Ok((g, json!({"family": "random-lift", "delta": delta, "fibers": fibers})))
            }
            other => Err(Error::Input(format!("unknown family {other:?}"))),
        }
    }
}
