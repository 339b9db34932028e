//! The guessing graph `G(D, q)`: two states are adjacent when no FDS on `D`
//! can fix both. Its independence and chromatic numbers are `q^g` and `q^b`.

use serde::Serialize;

use crate::digraph::Digraph;
use crate::error::{cap_check, Error, Result};
use crate::fds::{min_translate_cover, state_count, Fds, Group, LogCount, Space};
use crate::ugraph::{SolverStats, UGraph, DEFAULT_NODE_CAP};

/// Cap on `q^n` for the guessing graph.
pub const MAX_GRAPH_STATES: u128 = 4096;

#[derive(Debug, Clone)]
pub struct GuessingGraph {
    digraph: Digraph,
    space: Space,
    graph: UGraph,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Independence {
    pub alpha: u128,
    pub witness: Vec<usize>,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Colouring {
    pub chi: u128,
    pub colours: Vec<usize>,
    pub lower_bound: u128,
    pub nodes: u64,
}

/// Index of `x` restricted to the in-neighbourhood of `v`.
pub fn context(space: &Space, inn: &[usize], x: usize) -> usize {
    inn.iter().fold(0, |acc, &u| acc * space.q() as usize + space.digit(x, u) as usize)
}

impl GuessingGraph {
    pub fn build(d: &Digraph, q: u32) -> Result<GuessingGraph> {
        GuessingGraph::build_with(d, q, MAX_GRAPH_STATES)
    }

    pub fn build_with(d: &Digraph, q: u32, cap: u128) -> Result<GuessingGraph> {
        let size = state_count(q, d.n()).unwrap_or(u128::MAX);
        cap_check("guessing graph q^n", size, cap)?;
        let space = Space::new(q, d.n(), cap)?;
        let mut graph = UGraph::new(space.size());
        for v in 0..d.n() {
            let inn = d.inn(v);
            let mut groups: Vec<Vec<usize>> = vec![Vec::new(); (q as usize).pow(inn.len() as u32)];
            for x in 0..space.size() {
                groups[context(&space, inn, x)].push(x);
            }
            for group in &groups {
                for (i, &x) in group.iter().enumerate() {
                    for &y in &group[i + 1..] {
                        if space.digit(x, v) != space.digit(y, v) {
                            graph.add_edge(x, y);
                        }
                    }
                }
            }
        }
        Ok(GuessingGraph { digraph: d.clone(), space, graph })
    }

    pub fn digraph(&self) -> &Digraph {
        &self.digraph
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn graph(&self) -> &UGraph {
        &self.graph
    }

    pub fn q(&self) -> u32 {
        self.space.q()
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn len(&self) -> usize {
        self.space.size()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn adjacent(&self, x: usize, y: usize) -> bool {
        self.graph.adjacent(x, y)
    }

    /// Exact maximum independent set containing the all-zero state.
    pub fn independence_number(&self) -> Result<Independence> {
        self.independence_number_with(DEFAULT_NODE_CAP)
    }

    pub fn independence_number_with(&self, node_cap: u64) -> Result<Independence> {
        let (witness, SolverStats { nodes }) = self.graph.max_independent_set(Some(0), node_cap)?;
        Ok(Independence { alpha: witness.len() as u128, witness, nodes })
    }

    pub fn chromatic_number(&self) -> Result<Colouring> {
        self.chromatic_number_with(DEFAULT_NODE_CAP)
    }

    pub fn chromatic_number_with(&self, node_cap: u64) -> Result<Colouring> {
        let ind = self.independence_number_with(node_cap)?;
        let size = self.len();
        let lower = size.div_ceil(ind.witness.len()).max(self.graph.greedy_clique().len());
        // translates of an independent set are independent
        let cover = min_translate_cover(&self.space, &Group::Cyclic, &ind.witness, false, node_cap)?;
        let mut colours = vec![usize::MAX; size];
        for (c, &a) in cover.iter().enumerate() {
            for &p in &ind.witness {
                let x = Group::Cyclic.sub_ranks(&self.space, p, a);
                if colours[x] == usize::MAX {
                    colours[x] = c;
                }
            }
        }
        debug_assert!(self.graph.is_proper_colouring(&colours));
        let (chi, colours, stats) = self.graph.chromatic(lower, Some(colours), node_cap)?;
        Ok(Colouring { chi: chi as u128, colours, lower_bound: lower as u128, nodes: stats.nodes + ind.nodes })
    }

    /// DIMACS edge format with 1-based vertices.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("c guessing graph q={} n={}\np edge {} {}\n", self.q(), self.n(), self.len(), self.graph.edge_count());
        for x in 0..self.len() {
            for y in self.graph.neighbours(x).iter().filter(|&y| y > x) {
                out.push_str(&format!("e {} {}\n", x + 1, y + 1));
            }
        }
        out
    }

    /// An FDS in `F(D, q)` fixing every state of an independent set; local
    /// values outside the constrained contexts are 0.
    pub fn fds_fixing(&self, set: &[usize]) -> Result<Fds> {
        if !self.graph.is_independent(set) {
            return Err(Error::Invalid("state set is not independent in the guessing graph".into()));
        }
        let (space, d) = (&self.space, &self.digraph);
        let tables: Vec<Vec<u32>> = (0..d.n())
            .map(|v| {
                let mut t = vec![0; (self.q() as usize).pow(d.inn(v).len() as u32)];
                for &x in set {
                    t[context(space, d.inn(v), x)] = space.digit(x, v);
                }
                t
            })
            .collect();
        let table = (0..space.size())
            .map(|x| (0..d.n()).fold(0, |acc, v| acc + tables[v][context(space, d.inn(v), x)] as usize * space.place(v)) as u32)
            .collect();
        Fds::from_table(self.q(), self.n(), table)
    }
}

pub fn guessing_number(d: &Digraph, q: u32) -> Result<(LogCount, Vec<usize>)> {
    let ind = GuessingGraph::build(d, q)?.independence_number()?;
    Ok((LogCount::new(ind.alpha, q), ind.witness))
}

pub fn public_entropy(d: &Digraph, q: u32) -> Result<(LogCount, Vec<usize>)> {
    let col = GuessingGraph::build(d, q)?.chromatic_number()?;
    Ok((LogCount::new(col.chi, q), col.colours))
}
