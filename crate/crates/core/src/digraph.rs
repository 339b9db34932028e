//! Loopless digraphs, their structural parameters and the named families.
//!
//! Undirected graphs are symmetric digraphs: every edge is a digon.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::bitset::BitSet;
use crate::error::{cap_check, Error, Result};
use crate::ffield::is_prime;
use crate::ugraph::{UGraph, DEFAULT_NODE_CAP};

/// Default cap on the number of enumerated chordless cycles.
pub const CYCLE_CAP: usize = 100_000;
/// Exact feedback vertex search works on `u64` vertex masks.
pub const FVS_MAX_VERTICES: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    n: usize,
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digraph(n={}, arcs={:?})", self.n, self.arcs().collect::<Vec<_>>())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleSet {
    pub cycles: Vec<Vec<usize>>,
    pub truncated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Girth {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(g) => write!(f, "{g}"),
            Girth::Infinite => write!(f, "inf"),
        }
    }
}

impl Digraph {
    /// Builds a digraph; duplicate arcs collapse, loops are rejected.
    pub fn new(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Digraph> {
        if n == 0 {
            return Err(Error::Invalid("a digraph needs at least one vertex".into()));
        }
        let mut set = BTreeSet::new();
        for (u, v) in arcs {
            if u >= n || v >= n {
                return Err(Error::Invalid(format!("arc ({u},{v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::Loop { line: 0, vertex: u });
            }
            set.insert((u, v));
        }
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for (u, v) in set {
            out[u].push(v);
            inn[v].push(u);
        }
        for l in inn.iter_mut() {
            l.sort_unstable();
        }
        Ok(Digraph { n, out, inn })
    }

    pub fn empty(n: usize) -> Digraph {
        Digraph::new(n, []).expect("n >= 1")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out.iter().enumerate().flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out[u].binary_search(&v).is_ok()
    }

    /// In-neighbours of `v`, sorted ascending.
    pub fn inn(&self, v: usize) -> &[usize] {
        &self.inn[v]
    }

    pub fn out(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.inn[v].len()
    }

    pub fn max_in_degree(&self) -> usize {
        self.inn.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_out_degree(&self) -> usize {
        self.out.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.arcs().all(|(u, v)| self.has_arc(v, u))
    }

    /// Replaces every arc by a digon.
    pub fn symmetrized(&self) -> Digraph {
        Digraph::new(self.n, self.arcs().flat_map(|(u, v)| [(u, v), (v, u)])).expect("same vertex set")
    }

    pub fn is_subgraph_of(&self, other: &Digraph) -> bool {
        self.n == other.n && self.arcs().all(|(u, v)| other.has_arc(u, v))
    }

    pub fn induced_without(&self, removed: &[usize]) -> Vec<bool> {
        let mut alive = vec![true; self.n];
        for &r in removed {
            alive[r] = false;
        }
        alive
    }

    pub fn adjacency_matrix(&self) -> Vec<Vec<u8>> {
        let mut a = vec![vec![0u8; self.n]; self.n];
        for (u, v) in self.arcs() {
            a[u][v] = 1;
        }
        a
    }

    pub fn is_acyclic_without(&self, removed: &[usize]) -> bool {
        self.topological_order(removed).is_ok()
    }

    /// Kahn's algorithm, smallest available vertex first.
    pub fn topological_order(&self, removed: &[usize]) -> Result<Vec<usize>> {
        let alive = self.induced_without(removed);
        let mut indeg = vec![0usize; self.n];
        for (u, v) in self.arcs() {
            if alive[u] && alive[v] {
                indeg[v] += 1;
            }
        }
        let mut ready: BTreeSet<usize> = (0..self.n).filter(|&v| alive[v] && indeg[v] == 0).collect();
        let mut order = Vec::new();
        while let Some(u) = ready.pop_first() {
            order.push(u);
            for &v in &self.out[u] {
                if alive[v] {
                    indeg[v] -= 1;
                    if indeg[v] == 0 {
                        ready.insert(v);
                    }
                }
            }
        }
        if order.len() == alive.iter().filter(|&&a| a).count() {
            Ok(order)
        } else {
            Err(Error::NotAcyclic)
        }
    }

    pub fn girth(&self) -> Girth {
        let mut best = usize::MAX;
        for s in 0..self.n {
            let mut dist = vec![usize::MAX; self.n];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.out[u] {
                    if v == s {
                        best = best.min(dist[u] + 1);
                    } else if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
        }
        if best == usize::MAX {
            Girth::Infinite
        } else {
            Girth::Finite(best)
        }
    }

    /// Shortest directed cycle inside the vertex mask, as a vertex list.
    fn shortest_cycle_in(&self, alive: u64) -> Option<Vec<usize>> {
        let mut best: Option<Vec<usize>> = None;
        for s in (0..self.n).filter(|&v| alive >> v & 1 == 1) {
            let mut parent = vec![usize::MAX; self.n];
            let mut seen = 0u64 | 1 << s;
            let mut queue = VecDeque::from([s]);
            let mut found = None;
            'bfs: while let Some(u) = queue.pop_front() {
                for &v in &self.out[u] {
                    if alive >> v & 1 == 0 {
                        continue;
                    }
                    if v == s {
                        found = Some(u);
                        break 'bfs;
                    }
                    if seen >> v & 1 == 0 {
                        seen |= 1 << v;
                        parent[v] = u;
                        queue.push_back(v);
                    }
                }
            }
            if let Some(mut u) = found {
                let mut cycle = vec![u];
                while u != s {
                    u = parent[u];
                    cycle.push(u);
                }
                if best.as_ref().is_none_or(|b| cycle.len() < b.len()) {
                    let short = cycle.len() == 2;
                    best = Some(cycle);
                    if short {
                        break;
                    }
                }
            }
        }
        best
    }

    /// Drops vertices that cannot lie on a cycle (no live in- or out-arc).
    fn trim(&self, mut alive: u64) -> u64 {
        loop {
            let mut changed = false;
            for v in 0..self.n {
                if alive >> v & 1 == 0 {
                    continue;
                }
                let has_in = self.inn[v].iter().any(|&u| alive >> u & 1 == 1);
                let has_out = self.out[v].iter().any(|&u| alive >> u & 1 == 1);
                if !has_in || !has_out {
                    alive &= !(1 << v);
                    changed = true;
                }
            }
            if !changed {
                return alive;
            }
        }
    }

    /// Exact minimum feedback vertex set, branching on the vertices of a
    /// shortest cycle under iterative deepening.
    pub fn feedback_vertex_number(&self) -> Result<(usize, Vec<usize>)> {
        cap_check("feedback vertex set vertices", self.n as u128, FVS_MAX_VERTICES as u128)?;
        let all = if self.n == 64 { !0 } else { (1u64 << self.n) - 1 };
        for k in 0..=self.n {
            let mut chosen = Vec::new();
            if self.fvs_within(self.trim(all), k, &mut chosen) {
                chosen.sort_unstable();
                return Ok((k, chosen));
            }
        }
        unreachable!("removing every vertex leaves no cycle")
    }

    fn fvs_within(&self, alive: u64, k: usize, chosen: &mut Vec<usize>) -> bool {
        let Some(cycle) = self.shortest_cycle_in(alive) else {
            return true;
        };
        if k == 0 {
            return false;
        }
        // disjoint cycles each need their own vertex
        if k < self.greedy_disjoint_cycles(alive) {
            return false;
        }
        for &v in &cycle {
            chosen.push(v);
            if self.fvs_within(self.trim(alive & !(1 << v)), k - 1, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    fn greedy_disjoint_cycles(&self, mut alive: u64) -> usize {
        let mut count = 0;
        while let Some(c) = self.shortest_cycle_in(alive) {
            count += 1;
            for v in c {
                alive &= !(1 << v);
            }
        }
        count
    }

    /// All chordless directed cycles, each listed once starting from its
    /// smallest vertex.
    pub fn chordless_cycles(&self, cap: usize) -> CycleSet {
        let mut out = CycleSet { cycles: Vec::new(), truncated: false };
        let mut path = Vec::new();
        for s in 0..self.n {
            path.push(s);
            if !self.extend_chordless(&mut path, cap, &mut out) {
                return out;
            }
            path.pop();
        }
        out
    }

    // returns false once the cap is hit
    fn extend_chordless(&self, path: &mut Vec<usize>, cap: usize, out: &mut CycleSet) -> bool {
        let s = path[0];
        let last = *path.last().unwrap();
        let k = path.len() - 1;
        for &w in &self.out[last] {
            if w <= s || path.contains(&w) {
                continue;
            }
            let mut ok = true;
            for (i, &p) in path.iter().enumerate() {
                // allowed arcs touching w: last -> w, and w -> s
                if i < k && self.has_arc(p, w) {
                    ok = false;
                    break;
                }
                if i > 0 && self.has_arc(w, p) {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            path.push(w);
            if self.has_arc(w, s) {
                if out.cycles.len() >= cap {
                    out.truncated = true;
                    return false;
                }
                out.cycles.push(path.clone());
            } else if !self.extend_chordless(path, cap, out) {
                return false;
            }
            path.pop();
        }
        true
    }

    /// Intersection graph of the chordless cycles.
    pub fn cycle_intersection_graph(&self, cap: usize) -> Result<(Vec<Vec<usize>>, UGraph)> {
        let cs = self.chordless_cycles(cap);
        if cs.truncated {
            return Err(Error::CapExceeded { what: "chordless cycles", size: cap as u128 + 1, cap: cap as u128 });
        }
        let sets: Vec<BitSet> = cs
            .cycles
            .iter()
            .map(|c| {
                let mut b = BitSet::new(self.n);
                c.iter().for_each(|&v| b.insert(v));
                b
            })
            .collect();
        let mut g = UGraph::new(sets.len());
        for a in 0..sets.len() {
            for b in a + 1..sets.len() {
                if !sets[a].is_disjoint(&sets[b]) {
                    g.add_edge(a, b);
                }
            }
        }
        Ok((cs.cycles, g))
    }

    /// Maximum number of vertex-disjoint cycles; chordless cycles suffice.
    pub fn cycle_packing(&self) -> Result<(usize, Vec<Vec<usize>>)> {
        let (cycles, g) = self.cycle_intersection_graph(CYCLE_CAP)?;
        if cycles.is_empty() {
            return Ok((0, Vec::new()));
        }
        let (set, _) = g.max_independent_set(None, DEFAULT_NODE_CAP)?;
        Ok((set.len(), set.into_iter().map(|i| cycles[i].clone()).collect()))
    }

    /// Chromatic number of the chordless-cycle intersection graph, with the
    /// colour class of every chordless cycle.
    pub fn cycle_colouring(&self) -> Result<(usize, Vec<Vec<usize>>, Vec<usize>)> {
        let (cycles, g) = self.cycle_intersection_graph(CYCLE_CAP)?;
        if cycles.is_empty() {
            return Ok((0, cycles, Vec::new()));
        }
        let (k, colours, _) = g.chromatic(1, None, DEFAULT_NODE_CAP)?;
        Ok((k, cycles, colours))
    }

    pub fn cycle_chromatic_index(&self) -> Result<usize> {
        Ok(self.cycle_colouring()?.0)
    }

    /// Strong product; vertex `(u1, u2)` gets index `u1 * n2 + u2`.
    pub fn strong_product(&self, other: &Digraph) -> Digraph {
        let (n1, n2) = (self.n, other.n);
        let mut arcs = Vec::new();
        for u1 in 0..n1 {
            for u2 in 0..n2 {
                let first: Vec<usize> = std::iter::once(u1).chain(self.out[u1].iter().copied()).collect();
                let second: Vec<usize> = std::iter::once(u2).chain(other.out[u2].iter().copied()).collect();
                for &v1 in &first {
                    for &v2 in &second {
                        if (v1, v2) != (u1, u2) {
                            arcs.push((u1 * n2 + u2, v1 * n2 + v2));
                        }
                    }
                }
            }
        }
        Digraph::new(n1 * n2, arcs).expect("product of loopless digraphs is loopless")
    }

    pub fn complete(n: usize) -> Digraph {
        Digraph::new(n, (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))).expect("n >= 1")
    }

    pub fn directed_cycle(n: usize) -> Digraph {
        Digraph::new(n, (0..n).map(|u| (u, (u + 1) % n))).expect("n >= 2")
    }

    pub fn undirected_cycle(n: usize) -> Digraph {
        Digraph::directed_cycle(n).symmetrized()
    }

    pub fn complete_bipartite(m: usize, s: usize) -> Digraph {
        Digraph::new(m + s, (0..m).flat_map(|a| (m..m + s).flat_map(move |b| [(a, b), (b, a)]))).expect("m + s >= 1")
    }

    pub fn paley(p: usize) -> Result<Digraph> {
        if !is_prime(p as u64) || p % 4 != 3 {
            return Err(Error::PaleyNotApplicable(p as u64));
        }
        let squares: BTreeSet<usize> = (1..p).map(|x| x * x % p).collect();
        Ok(Digraph::new(p, (0..p).flat_map(|u| squares.iter().map(move |&d| (u, (u + d) % p)))).expect("p >= 3"))
    }

    /// Circulant digraph of the binary cyclic simplex code of length 2^r - 1:
    /// arcs `v -> v + j` for every nonzero position j of the generator word.
    pub fn simplex(r: u32) -> Result<Digraph> {
        let support = simplex_generator_support(r)?;
        let n = (1usize << r) - 1;
        Ok(Digraph::new(n, (0..n).flat_map(|v| support.iter().filter(|&&j| j != 0).map(move |&j| (v, (v + j) % n))))
            .expect("n >= 3"))
    }

    /// Builds a digraph from the family DSL.
    pub fn family(spec: &str) -> Result<Digraph> {
        let bad = || Error::BadSpec(spec.to_string());
        let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
        let (kind, arg) = spec.split_once(':').ok_or_else(bad)?;
        match kind {
            "K" => {
                let n = num(arg)?;
                if n == 0 {
                    return Err(bad());
                }
                Ok(Digraph::complete(n))
            }
            "Kbip" => {
                let (m, s) = arg.split_once(',').ok_or_else(bad)?;
                let (m, s) = (num(m)?, num(s)?);
                if m + s == 0 {
                    return Err(bad());
                }
                Ok(Digraph::complete_bipartite(m, s))
            }
            "Cdir" | "Cund" => {
                let n = num(arg)?;
                if n < 2 {
                    return Err(bad());
                }
                Ok(if kind == "Cdir" { Digraph::directed_cycle(n) } else { Digraph::undirected_cycle(n) })
            }
            "paley" => Digraph::paley(num(arg)?),
            "simplex" => {
                let r = num(arg)?;
                if !(2..=8).contains(&r) {
                    return Err(bad());
                }
                Digraph::simplex(r as u32)
            }
            "power" => {
                let (base, exp) = arg.rsplit_once('^').ok_or_else(bad)?;
                let k = num(exp)?;
                if k == 0 {
                    return Err(bad());
                }
                let g = Digraph::family(base)?;
                let mut acc = g.clone();
                for _ in 1..k {
                    acc = acc.strong_product(&g);
                }
                Ok(acc)
            }
            _ => Err(bad()),
        }
    }

    /// Parses the text graph format: `n <count>` then one `u v` arc per line,
    /// `#` comments, and an optional `symmetrize` directive.
    pub fn parse(text: &str) -> Result<Digraph> {
        let mut n = None;
        let mut arcs = Vec::new();
        let mut symmetrize = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::Parse { line: line_no, msg: msg.to_string() };
            if line == "symmetrize" || line == "--symmetrize" {
                symmetrize = true;
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match n {
                None => {
                    if toks.len() != 2 || toks[0] != "n" {
                        return Err(err("expected `n <count>`"));
                    }
                    let count = toks[1].parse::<usize>().map_err(|_| err("bad vertex count"))?;
                    if count == 0 {
                        return Err(err("vertex count must be positive"));
                    }
                    n = Some(count);
                }
                Some(count) => {
                    if toks.len() != 2 {
                        return Err(err("expected `u v`"));
                    }
                    let u = toks[0].parse::<usize>().map_err(|_| err("bad vertex"))?;
                    let v = toks[1].parse::<usize>().map_err(|_| err("bad vertex"))?;
                    if u >= count || v >= count {
                        return Err(err("vertex out of range"));
                    }
                    if u == v {
                        return Err(Error::Loop { line: line_no, vertex: u });
                    }
                    arcs.push((u, v));
                }
            }
        }
        let n = n.ok_or(Error::Parse { line: 0, msg: "missing `n <count>` line".into() })?;
        let d = Digraph::new(n, arcs)?;
        Ok(if symmetrize { d.symmetrized() } else { d })
    }

    /// Serializes in the text graph format.
    pub fn to_text(&self) -> String {
        let mut s = format!("n {}\n", self.n);
        for (u, v) in self.arcs() {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }
}

/// Primitive polynomials over GF(2), lowest coefficient first, degree 2..=8.
const PRIMITIVE_GF2: [&[u8]; 7] = [
    &[1, 1, 1],
    &[1, 1, 0, 1],
    &[1, 1, 0, 0, 1],
    &[1, 0, 1, 0, 0, 1],
    &[1, 1, 0, 0, 0, 0, 1],
    &[1, 1, 0, 0, 0, 0, 0, 1],
    &[1, 0, 1, 1, 1, 0, 0, 0, 1],
];

/// Generator word of the cyclic simplex code: g(x) = (x^n - 1) / h(x) with h
/// primitive of degree r. Returns the word of length n = 2^r - 1.
pub fn simplex_generator(r: u32) -> Result<Vec<u8>> {
    if !(2..=8).contains(&r) {
        return Err(Error::BadSpec(format!("simplex:{r}")));
    }
    let h = PRIMITIVE_GF2[(r - 2) as usize];
    let n = (1usize << r) - 1;
    // long division of x^n + 1 by h over GF(2)
    let mut rem = vec![0u8; n + 1];
    rem[0] = 1;
    rem[n] = 1;
    let deg_h = r as usize;
    let mut quot = vec![0u8; n + 1 - deg_h];
    for k in (deg_h..=n).rev() {
        if rem[k] == 1 {
            quot[k - deg_h] = 1;
            for (i, &c) in h.iter().enumerate() {
                rem[k - deg_h + i] ^= c;
            }
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0), "h divides x^n + 1");
    let mut word = vec![0u8; n];
    word[..quot.len()].copy_from_slice(&quot);
    Ok(word)
}

pub fn simplex_generator_support(r: u32) -> Result<Vec<usize>> {
    Ok(simplex_generator(r)?.iter().enumerate().filter(|(_, &c)| c == 1).map(|(i, _)| i).collect())
}
