//! Undirected graphs on bitset rows with exact clique, independent-set and
//! colouring solvers.

use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// Node budget for the exact solvers.
pub const DEFAULT_NODE_CAP: u64 = 2_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UGraph {
    adj: Vec<BitSet>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub nodes: u64,
}

impl UGraph {
    pub fn new(n: usize) -> UGraph {
        UGraph { adj: vec![BitSet::new(n); n] }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> UGraph {
        let mut g = UGraph::new(n);
        for (a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.adj[a].insert(b);
            self.adj[b].insert(a);
        }
    }

    #[inline]
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    pub fn neighbours(&self, v: usize) -> &BitSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BitSet::count).sum::<usize>() / 2
    }

    pub fn complement(&self) -> UGraph {
        let n = self.len();
        let adj = (0..n)
            .map(|v| {
                let mut row = BitSet::full(n);
                row.difference_with(&self.adj[v]);
                row.remove(v);
                row
            })
            .collect();
        UGraph { adj }
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter().enumerate().all(|(i, &a)| set[i + 1..].iter().all(|&b| a != b && !self.adjacent(a, b)))
    }

    pub fn is_proper_colouring(&self, colours: &[usize]) -> bool {
        colours.len() == self.len()
            && (0..self.len()).all(|v| self.adj[v].iter().all(|u| colours[u] != colours[v]))
    }

    /// Exact maximum clique (greedy-colouring bounded branch and bound).
    /// With `pinned = Some(v)` the search is restricted to cliques containing v.
    pub fn max_clique(&self, pinned: Option<usize>, node_cap: u64) -> Result<(Vec<usize>, SolverStats)> {
        let n = self.len();
        let mut search = CliqueSearch { g: self, best: Vec::new(), current: Vec::new(), nodes: 0, cap: node_cap };
        let candidates = match pinned {
            Some(v) => {
                search.current.push(v);
                self.adj[v].clone()
            }
            None => BitSet::full(n),
        };
        if n > 0 {
            if candidates.is_empty() {
                search.best = search.current.clone();
            } else {
                search.expand(candidates)?;
            }
        }
        let mut best = search.best;
        best.sort_unstable();
        Ok((best, SolverStats { nodes: search.nodes }))
    }

    /// Exact maximum independent set, optionally forced to contain `pinned`.
    pub fn max_independent_set(&self, pinned: Option<usize>, node_cap: u64) -> Result<(Vec<usize>, SolverStats)> {
        self.complement().max_clique(pinned, node_cap)
    }

    /// Largest-first greedy clique; a cheap lower bound for colouring.
    pub fn greedy_clique(&self) -> Vec<usize> {
        let n = self.len();
        let mut best = Vec::new();
        for start in 0..n.min(64) {
            let mut clique = vec![start];
            let mut cand = self.adj[start].clone();
            while let Some(v) = cand.iter().max_by_key(|&u| self.adj[u].intersection_count(&cand)) {
                clique.push(v);
                cand.intersect_with(&self.adj[v]);
            }
            if clique.len() > best.len() {
                best = clique;
            }
        }
        best
    }

    /// DSATUR greedy colouring.
    pub fn dsatur_greedy(&self) -> Vec<usize> {
        let max_degree = (0..self.len()).map(|v| self.degree(v)).max().unwrap_or(0);
        let mut d = Dsatur::new(self, max_degree + 1);
        let mut used = 0;
        for _ in 0..self.len() {
            let v = d.select();
            let c = (0..used).find(|&c| !d.forbidden(v, c)).unwrap_or(used);
            used = used.max(c + 1);
            d.assign(v, c);
        }
        d.colour.iter().map(|c| c.unwrap()).collect()
    }

    /// Exact chromatic number by DSATUR branch and bound.
    ///
    /// `lower_bound` is any valid lower bound supplied by the caller and
    /// `initial` an optional proper colouring used as the first incumbent.
    pub fn chromatic(
        &self,
        lower_bound: usize,
        initial: Option<Vec<usize>>,
        node_cap: u64,
    ) -> Result<(usize, Vec<usize>, SolverStats)> {
        let n = self.len();
        if n == 0 {
            return Ok((0, Vec::new(), SolverStats::default()));
        }
        let mut best = self.dsatur_greedy();
        let mut best_k = count_colours(&best);
        if let Some(init) = initial {
            debug_assert!(self.is_proper_colouring(&init));
            let k = count_colours(&init);
            if k < best_k {
                best = init;
                best_k = k;
            }
        }
        let lb = lower_bound.max(self.greedy_clique().len()).max(1);
        if best_k <= lb {
            return Ok((best_k, normalise(&best), SolverStats::default()));
        }
        let mut search = ColourSearch {
            d: Dsatur::new(self, best_k),
            best_k,
            best,
            lb,
            nodes: 0,
            cap: node_cap,
        };
        search.run(0, 0)?;
        Ok((search.best_k, normalise(&search.best), SolverStats { nodes: search.nodes }))
    }
}

fn count_colours(c: &[usize]) -> usize {
    c.iter().max().map_or(0, |m| m + 1)
}

/// Renumbers colours in order of first appearance.
fn normalise(c: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    c.iter()
        .map(|&x| {
            let k = map.len();
            *map.entry(x).or_insert(k)
        })
        .collect()
}

struct CliqueSearch<'a> {
    g: &'a UGraph,
    best: Vec<usize>,
    current: Vec<usize>,
    nodes: u64,
    cap: u64,
}

impl CliqueSearch<'_> {
    fn expand(&mut self, mut cand: BitSet) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::CapExceeded { what: "clique search nodes", size: self.nodes as u128, cap: self.cap as u128 });
        }
        // greedy colour classes give the bound
        let mut order = Vec::with_capacity(cand.count());
        let mut pool = cand.clone();
        let mut colour = 0;
        while !pool.is_empty() {
            colour += 1;
            let mut avail = pool.clone();
            while let Some(v) = avail.first() {
                avail.remove(v);
                avail.difference_with(&self.g.adj[v]);
                pool.remove(v);
                order.push((v, colour));
            }
        }
        for &(v, c) in order.iter().rev() {
            if self.current.len() + c <= self.best.len() {
                return Ok(());
            }
            self.current.push(v);
            let mut next = cand.clone();
            next.intersect_with(&self.g.adj[v]);
            if next.is_empty() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next)?;
            }
            self.current.pop();
            cand.remove(v);
        }
        Ok(())
    }
}

struct Dsatur<'a> {
    g: &'a UGraph,
    k: usize,
    colour: Vec<Option<usize>>,
    // neighbour colour multiplicities, n * k
    counts: Vec<u16>,
    sat: Vec<usize>,
    free_degree: Vec<usize>,
}

impl<'a> Dsatur<'a> {
    fn new(g: &'a UGraph, k: usize) -> Dsatur<'a> {
        let n = g.len();
        Dsatur {
            g,
            k,
            colour: vec![None; n],
            counts: vec![0; n * k],
            sat: vec![0; n],
            free_degree: (0..n).map(|v| g.degree(v)).collect(),
        }
    }

    #[inline]
    fn forbidden(&self, v: usize, c: usize) -> bool {
        c < self.k && self.counts[v * self.k + c] > 0
    }

    fn select(&self) -> usize {
        let mut best: Option<usize> = None;
        for v in 0..self.g.len() {
            if self.colour[v].is_some() {
                continue;
            }
            best = match best {
                None => Some(v),
                Some(b) if (self.sat[v], self.free_degree[v]) > (self.sat[b], self.free_degree[b]) => Some(v),
                keep => keep,
            };
        }
        best.expect("an uncoloured vertex remains")
    }

    fn assign(&mut self, v: usize, c: usize) {
        self.colour[v] = Some(c);
        for u in self.g.adj[v].iter() {
            self.free_degree[u] -= 1;
            if c < self.k {
                let slot = &mut self.counts[u * self.k + c];
                if *slot == 0 {
                    self.sat[u] += 1;
                }
                *slot += 1;
            }
        }
    }

    fn unassign(&mut self, v: usize) {
        let c = self.colour[v].take().expect("vertex was coloured");
        for u in self.g.adj[v].iter() {
            self.free_degree[u] += 1;
            if c < self.k {
                let slot = &mut self.counts[u * self.k + c];
                *slot -= 1;
                if *slot == 0 {
                    self.sat[u] -= 1;
                }
            }
        }
    }
}

struct ColourSearch<'a> {
    d: Dsatur<'a>,
    best_k: usize,
    best: Vec<usize>,
    lb: usize,
    nodes: u64,
    cap: u64,
}

impl ColourSearch<'_> {
    fn run(&mut self, coloured: usize, used: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::CapExceeded { what: "colouring search nodes", size: self.nodes as u128, cap: self.cap as u128 });
        }
        if used >= self.best_k {
            return Ok(());
        }
        if coloured == self.d.g.len() {
            if used < self.best_k {
                self.best_k = used;
                self.best = self.d.colour.iter().map(|c| c.unwrap()).collect();
            }
            return Ok(());
        }
        let v = self.d.select();
        // a vertex adjacent to best_k - 1 distinct colours forces a new one
        for c in 0..=used {
            if c >= self.best_k - 1 || self.best_k <= self.lb {
                break;
            }
            if c < used && self.d.forbidden(v, c) {
                continue;
            }
            self.d.assign(v, c);
            self.run(coloured + 1, used.max(c + 1))?;
            self.d.unassign(v);
        }
        Ok(())
    }
}
