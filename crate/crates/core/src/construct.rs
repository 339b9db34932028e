//! Explicit FDS families with known metric values.

use std::sync::Arc;

use crate::digraph::{simplex_generator, Digraph, CYCLE_CAP};
use crate::error::{cap_check, Error, Result};
use crate::fds::{state_count, AffineFds, Fds, MAX_TABLE_STATES};
use crate::ffield::{Field, Matrix};
use crate::ugraph::{UGraph, DEFAULT_NODE_CAP};

/// `f_v(x) = -sum_{u != v} x_u mod q` on `K_n`; fixes `q^{n-1}` states.
pub fn clique_guessing(n: usize, q: u32) -> Result<Fds> {
    if n < 2 {
        return Err(Error::Invalid("clique construction needs n >= 2".into()));
    }
    Fds::from_fn(q, n, |x| {
        let total: u32 = x.iter().sum();
        x.iter().map(|&xv| (2 * q * n as u32 - (total - xv)) % q).collect()
    })
}

/// `f_v(x) = v - sum_{u != v} x_u mod q` on `K_q`: exactly one correct guess.
pub fn winkler_clique(q: u32) -> Result<Fds> {
    if q < 2 {
        return Err(Error::Invalid("Winkler construction needs q >= 2".into()));
    }
    Fds::from_fn(q, q as usize, |x| winkler_block(x, q))
}

fn winkler_block(x: &[u32], q: u32) -> Vec<u32> {
    let total: u32 = x.iter().sum();
    let k = x.len() as u32;
    x.iter().enumerate().map(|(v, &xv)| (v as u32 + k * q * q - (total - xv)) % q).collect()
}

/// `floor(n/q)` disjoint Winkler blocks on `K_n`, other vertices constant 0.
pub fn clique_packing_stability(n: usize, q: u32) -> Result<Fds> {
    if q as usize > n {
        return Err(Error::QTooLarge { q, n });
    }
    let blocks: Vec<Vec<usize>> = (0..n / q as usize).map(|b| (b * q as usize..(b + 1) * q as usize).collect()).collect();
    blocks_fds(n, q, &blocks)
}

fn blocks_fds(n: usize, q: u32, blocks: &[Vec<usize>]) -> Result<Fds> {
    Fds::from_fn(q, n, |x| {
        let mut y = vec![0; n];
        for block in blocks {
            let local: Vec<u32> = block.iter().map(|&v| x[v]).collect();
            for (&v, out) in block.iter().zip(winkler_block(&local, q)) {
                y[v] = out;
            }
        }
        y
    })
}

/// `f_0 = x_{n-1} + 1`, `f_i = x_{i-1}` on the directed cycle `0 -> 1 -> ...`.
pub fn negation_cycle(n: usize, q: u32) -> Result<Fds> {
    if n < 2 {
        return Err(Error::Invalid("negation cycle needs n >= 2".into()));
    }
    cycles_fds(n, q, &[(0..n).collect()])
}

/// Negation along each of a family of vertex-disjoint cycles, 0 elsewhere.
pub fn cycles_fds(n: usize, q: u32, cycles: &[Vec<usize>]) -> Result<Fds> {
    let mut pred = vec![None; n];
    for c in cycles {
        for (k, &v) in c.iter().enumerate() {
            if pred[v].is_some() {
                return Err(Error::Invalid("cycles are not vertex-disjoint".into()));
            }
            pred[v] = Some((c[(k + c.len() - 1) % c.len()], k == 0));
        }
    }
    Fds::from_fn(q, n, |x| {
        pred.iter()
            .map(|p| match p {
                Some((u, true)) => (x[*u] + 1) % q,
                Some((u, false)) => x[*u],
                None => 0,
            })
            .collect()
    })
}

/// Negation cycles on a maximum vertex-disjoint cycle packing; `i(f) >= nu`.
pub fn cycle_packing_instability(d: &Digraph, q: u32) -> Result<(usize, Fds)> {
    let (nu, cycles) = d.cycle_packing()?;
    Ok((nu, cycles_fds(d.n(), q, &cycles)?))
}

fn bit(x: u32, b: usize) -> u32 {
    x >> b & 1
}

/// Bit-sliced negation cycles over a colouring of the chordless cycles:
/// `q = 2^chi'` and every agreement set is acyclic.
pub fn chordless_cover_instability(d: &Digraph) -> Result<(u32, Fds)> {
    chordless_cover_with(d, MAX_TABLE_STATES)
}

pub fn chordless_cover_with(d: &Digraph, cap: u128) -> Result<(u32, Fds)> {
    let (chi, cycles, colours) = d.cycle_colouring()?;
    let bits = chi.max(1);
    if bits > 16 {
        return Err(Error::CapExceeded { what: "alphabet 2^chi'", size: 1u128 << bits.min(127), cap: 1 << 16 });
    }
    let q = 1u32 << bits;
    cap_check("state space q^n", state_count(q, d.n()).unwrap_or(u128::MAX), cap)?;
    // rule[v][a] = (predecessor on the colour-a cycle, negate)
    let mut rule: Vec<Vec<Option<(usize, bool)>>> = vec![vec![None; bits]; d.n()];
    for (cycle, &a) in cycles.iter().zip(&colours) {
        for (k, &v) in cycle.iter().enumerate() {
            assert!(rule[v][a].is_none(), "same-colour chordless cycles share vertex {v}");
            rule[v][a] = Some((cycle[(k + cycle.len() - 1) % cycle.len()], k == 0));
        }
    }
    let f = Fds::from_fn(q, d.n(), |x| {
        rule.iter()
            .map(|slices| {
                slices.iter().enumerate().fold(0, |acc, (a, r)| match r {
                    Some((u, neg)) => acc | ((bit(x[*u], a) ^ *neg as u32) << a),
                    None => acc,
                })
            })
            .collect()
    })?;
    Ok((q, f))
}

/// Orientation-negation construction on an undirected graph with `q = 2^Delta`:
/// every agreement set is independent.
pub fn undirected_degree_instability(d: &Digraph) -> Result<(u32, Fds)> {
    if !d.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let delta = d.max_in_degree().max(1);
    if delta > 4 {
        return Err(Error::CapExceeded { what: "alphabet 2^Delta", size: 1 << delta, cap: 16 });
    }
    let q = 1u32 << delta;
    cap_check("state space q^n", state_count(q, d.n()).unwrap_or(u128::MAX), MAX_TABLE_STATES)?;
    // slot of v in the sorted in-neighbourhood of u
    let slot = |u: usize, v: usize| d.inn(u).iter().position(|&w| w == v).expect("symmetric");
    let f = Fds::from_fn(q, d.n(), |x| {
        (0..d.n())
            .map(|v| {
                d.inn(v).iter().enumerate().fold(0, |acc, (b, &u)| {
                    let value = bit(x[u], slot(u, v)) ^ (v < u) as u32;
                    acc | value << b
                })
            })
            .collect()
    })?;
    Ok((q, f))
}

/// Disjoint Winkler blocks on a maximum packing of `q`-cliques of the
/// symmetric part of `d`; `s(f)` is the number of blocks.
pub fn clique_packing_on(d: &Digraph, q: u32) -> Result<(usize, Fds)> {
    let cliques = q_cliques(d, q as usize)?;
    let mut conflict = UGraph::new(cliques.len());
    for i in 0..cliques.len() {
        for j in i + 1..cliques.len() {
            if cliques[i].iter().any(|v| cliques[j].contains(v)) {
                conflict.add_edge(i, j);
            }
        }
    }
    let (chosen, _) = conflict.max_independent_set(None, DEFAULT_NODE_CAP)?;
    let blocks: Vec<Vec<usize>> = chosen.iter().map(|&i| cliques[i].clone()).collect();
    Ok((blocks.len(), blocks_fds(d.n(), q, &blocks)?))
}

fn q_cliques(d: &Digraph, k: usize) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn extend(d: &Digraph, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) -> Result<()> {
        if cur.len() == k {
            if out.len() >= CYCLE_CAP {
                return Err(Error::CapExceeded { what: "clique enumeration", size: out.len() as u128 + 1, cap: CYCLE_CAP as u128 });
            }
            out.push(cur.clone());
            return Ok(());
        }
        for v in start..d.n() {
            if cur.iter().all(|&u| d.has_arc(u, v) && d.has_arc(v, u)) {
                cur.push(v);
                extend(d, k, v + 1, cur, out)?;
                cur.pop();
            }
        }
        Ok(())
    }
    if k <= d.n() {
        extend(d, k, 0, &mut cur, &mut out)?;
    }
    Ok(out)
}

/// Winkler blocks of size at most `q` on greedily chosen disjoint
/// symmetric cliques; each block of size `k` contributes `k - 1` to `i(f)`.
pub fn clique_blocks_instability(d: &Digraph, q: u32) -> Result<Fds> {
    let mut sym = UGraph::new(d.n());
    for (u, v) in d.arcs() {
        if u < v && d.has_arc(v, u) {
            sym.add_edge(u, v);
        }
    }
    let mut free: Vec<bool> = vec![true; d.n()];
    let mut blocks = Vec::new();
    loop {
        let mut best: Vec<usize> = Vec::new();
        for v in (0..d.n()).filter(|&v| free[v]) {
            let mut block = vec![v];
            for u in (v + 1..d.n()).filter(|&u| free[u]) {
                if block.len() < q as usize && block.iter().all(|&w| sym.adjacent(u, w)) {
                    block.push(u);
                }
            }
            if block.len() > best.len() {
                best = block;
            }
        }
        if best.len() < 2 {
            break;
        }
        for &v in &best {
            free[v] = false;
        }
        blocks.push(best);
    }
    blocks_fds(d.n(), q, &blocks)
}

/// `f'(x) = f(min(x, q0 - 1))` on a larger alphabet; agreement sets can only
/// shrink, so `i(f') >= i(f)`.
pub fn lift(f: &Fds, q: u32) -> Result<Fds> {
    let q0 = f.q();
    if q < q0 {
        return Err(Error::Invalid(format!("cannot lift from q = {q0} down to q = {q}")));
    }
    Fds::from_fn(q, f.n(), |x| {
        let clipped: Vec<u32> = x.iter().map(|&d| d.min(q0 - 1)).collect();
        f.apply_digits(&clipped)
    })
}

/// `1 - f(x)` coordinatewise for `q = 2`; swaps stability and instability.
pub fn complement(f: &Fds) -> Result<Fds> {
    if f.q() != 2 {
        return Err(Error::Invalid("complement needs q = 2".into()));
    }
    let all = f.space().size() - 1;
    Fds::from_table(2, f.n(), f.table().iter().map(|&y| (all ^ y as usize) as u32).collect())
}

/// Affine negation cycles over GF(q) on a maximum cycle packing:
/// `f_head = x_pred + 1`, `f_v = x_pred` on the cycle, 0 elsewhere.
pub fn affine_cycle_packing(d: &Digraph, field: Arc<Field>) -> Result<AffineFds> {
    let (_, cycles) = d.cycle_packing()?;
    let n = d.n();
    let mut m = Matrix::zeros(n, n);
    let mut y = vec![0; n];
    for c in &cycles {
        for (k, &v) in c.iter().enumerate() {
            m.set(c[(k + c.len() - 1) % c.len()], v, 1);
            if k == 0 {
                y[v] = 1;
            }
        }
    }
    AffineFds::supported_on(field, m, y, d)
}

/// `f(x) = xM` on `simplex:r` with `M - I` the circulant of the simplex
/// generator, so the difference code is the simplex code.
pub fn simplex_affine(r: u32) -> Result<AffineFds> {
    if !(2..=4).contains(&r) {
        return Err(Error::BadR(r));
    }
    let g = simplex_generator(r)?;
    let n = g.len();
    let mut m = Matrix::zeros(n, n);
    for v in 0..n {
        for (j, &c) in g.iter().enumerate().skip(1) {
            m.set(v, (v + j) % n, c as u32);
        }
    }
    let field = Arc::new(Field::new(2)?);
    AffineFds::supported_on(field, m, vec![0; n], &Digraph::simplex(r)?)
}

/// A deep hole of the difference code; as offset it maximizes instability.
pub fn deepest_offset(f: &AffineFds) -> Result<Vec<u32>> {
    f.difference_code().deep_hole()
}

/// A remoteness centre of the difference code, negated so that as offset it
/// maximizes stability.
pub fn stablest_offset(f: &AffineFds) -> Result<Vec<u32>> {
    let (_, centre) = f.difference_code().remoteness_centre()?;
    Ok(centre.iter().map(|&c| f.field().neg(c)).collect())
}
