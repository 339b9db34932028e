//! Hamming-space codes: ball volumes, covering radius, remoteness, linear
//! codes with coset-leader tables, and the inequality battery.

use std::collections::VecDeque;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{cap_check, Error, Result};
use crate::fds::{state_count, Space};
use crate::ffield::{Field, Matrix};

/// Cap on exhaustive Hamming-space scans.
pub const MAX_SCAN_STATES: u128 = 1 << 20;

/// `sum_{d=0}^{t} C(n, d) (q - 1)^d`; `t` is clamped to `[.., n]` and a
/// negative radius gives 0.
pub fn ball_volume(q: u32, n: usize, t: i64) -> BigUint {
    if t < 0 {
        return BigUint::zero();
    }
    let t = (t as usize).min(n);
    let mut total = BigUint::zero();
    let mut binom = BigUint::one();
    let mut power = BigUint::one();
    for d in 0..=t {
        total += &binom * &power;
        binom = binom * (n - d) / (d + 1);
        power *= q - 1;
    }
    total
}

pub fn pow_big(q: u32, e: usize) -> BigUint {
    BigUint::from(q).pow(e as u32)
}

pub fn binary_entropy(p: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "probability out of range: {p}");
    if p == 0.0 || p == 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// A nonempty set of words of `[q]^n`, stored as sorted ranks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Code {
    q: u32,
    n: usize,
    words: Vec<usize>,
}

impl Code {
    pub fn new(q: u32, n: usize, mut words: Vec<usize>) -> Result<Code> {
        let space = Space::new(q, n, u128::MAX)?;
        if words.is_empty() {
            return Err(Error::Invalid("a code must contain at least one word".into()));
        }
        if words.iter().any(|&w| w >= space.size()) {
            return Err(Error::Invalid("codeword out of range".into()));
        }
        words.sort_unstable();
        words.dedup();
        Ok(Code { q, n, words })
    }

    pub fn from_words(q: u32, n: usize, words: &[Vec<u32>]) -> Result<Code> {
        let space = Space::new(q, n, u128::MAX)?;
        if words.iter().any(|w| w.len() != n || w.iter().any(|&d| d >= q)) {
            return Err(Error::Invalid("codeword has the wrong length or alphabet".into()));
        }
        Code::new(q, n, words.iter().map(|w| space.encode(w)).collect())
    }

    pub fn from_bitset(q: u32, n: usize, words: &BitSet) -> Result<Code> {
        Code::new(q, n, words.iter().collect())
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[usize] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn space(&self, cap: u128) -> Result<Space> {
        Space::new(self.q, self.n, cap)
    }

    /// `{c + a}` under coordinatewise addition mod q.
    pub fn translate(&self, a: usize) -> Code {
        let space = self.space(u128::MAX).expect("valid code");
        let g = crate::fds::Group::Cyclic;
        Code::new(self.q, self.n, self.words.iter().map(|&c| g.add_ranks(&space, c, a)).collect()).expect("nonempty")
    }

    /// Distance from every word of `[q]^n` to the code.
    pub fn distance_map(&self, cap: u128) -> Result<Vec<u8>> {
        let space = self.space(cap)?;
        let mut set = BitSet::new(space.size());
        for &w in &self.words {
            set.insert(w);
        }
        Ok(distance_map(&space, &set))
    }

    pub fn covering_radius(&self) -> Result<usize> {
        Ok(*self.distance_map(MAX_SCAN_STATES)?.iter().max().unwrap() as usize)
    }

    /// Lowest-ranked word at distance `cr` from the code.
    pub fn deep_hole(&self) -> Result<(usize, usize)> {
        let dist = self.distance_map(MAX_SCAN_STATES)?;
        let cr = *dist.iter().max().unwrap();
        Ok((dist.iter().position(|&d| d == cr).unwrap(), cr as usize))
    }

    pub fn remoteness(&self) -> Result<usize> {
        Ok(self.remoteness_centre()?.1)
    }

    /// Lowest-ranked `y` minimizing the distance to the farthest codeword.
    pub fn remoteness_centre(&self) -> Result<(usize, usize)> {
        let space = self.space(MAX_SCAN_STATES)?;
        let mut set = BitSet::new(space.size());
        for &w in &self.words {
            set.insert(w);
        }
        Ok(remoteness_centre(&space, &set))
    }
}

/// Multi-source BFS distances to `set` in the Hamming graph.
pub fn distance_map(space: &Space, set: &BitSet) -> Vec<u8> {
    let size = space.size();
    let mut dist = vec![u8::MAX; size];
    let mut queue = VecDeque::new();
    for w in set.iter() {
        dist[w] = 0;
        queue.push_back(w);
    }
    let q = space.q() as usize;
    while let Some(x) = queue.pop_front() {
        let d = dist[x] + 1;
        for i in 0..space.n() {
            let place = space.place(i);
            let digit = x / place % q;
            let base = x - digit * place;
            for a in 0..q {
                let y = base + a * place;
                if dist[y] == u8::MAX {
                    dist[y] = d;
                    queue.push_back(y);
                }
            }
        }
    }
    dist
}

/// `(centre, rem)` with the lowest-ranked centre; `set` must be nonempty.
pub fn remoteness_centre(space: &Space, set: &BitSet) -> (usize, usize) {
    let n = space.n();
    if space.q() == 2 {
        // the farthest codeword from y is the nearest one to its complement
        let dist = distance_map(space, set);
        let all = space.size() - 1;
        let (y, far) = (0..space.size()).map(|y| (y, n - dist[all ^ y] as usize)).min_by_key(|&(y, r)| (r, y)).unwrap();
        return (y, far);
    }
    let words: Vec<usize> = set.iter().collect();
    (0..space.size())
        .into_par_iter()
        .map(|y| {
            let mut far = 0;
            for &c in &words {
                far = far.max(space.hamming(y, c));
                if far == n {
                    break;
                }
            }
            (far, y)
        })
        .min()
        .map(|(r, y)| (y, r))
        .unwrap()
}

/// Row space of a matrix over GF(q), in reduced row echelon form.
#[derive(Debug, Clone)]
pub struct LinearCode {
    field: Arc<Field>,
    n: usize,
    basis: Vec<Vec<u32>>,
    pivots: Vec<usize>,
    free: Vec<usize>,
}

impl LinearCode {
    pub fn from_generator(field: Arc<Field>, generator: &Matrix) -> LinearCode {
        let (r, pivots) = generator.rref(&field);
        let basis: Vec<Vec<u32>> = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        let n = generator.cols;
        let free = (0..n).filter(|c| !pivots.contains(c)).collect();
        LinearCode { field, n, basis, pivots, free }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.field.order()
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    /// `v` minus its projection onto the pivot coordinates.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let f = &self.field;
        let mut v = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let c = v[p];
            if c != 0 {
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(c, r));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    pub fn coset_count(&self) -> u128 {
        state_count(self.q(), self.free.len()).unwrap_or(u128::MAX)
    }

    /// Index of the coset `v + L` in `[q]^{n-k}`.
    pub fn coset_index(&self, v: &[u32]) -> usize {
        let r = self.reduce(v);
        self.free.iter().fold(0, |acc, &c| acc * self.q() as usize + r[c] as usize)
    }

    /// Minimum weight of every coset, indexed as in `coset_index`.
    pub fn coset_leader_weights(&self) -> Result<Vec<u8>> {
        let k = self.free.len();
        cap_check("cosets q^(n-k)", self.coset_count(), MAX_SCAN_STATES)?;
        if k == 0 {
            return Ok(vec![0]);
        }
        let f = &self.field;
        let space = Space::new(self.q(), k, MAX_SCAN_STATES)?;
        // syndromes of a * e_j restricted to the free coordinates
        let mut moves = Vec::new();
        for j in 0..self.n {
            let mut e = vec![0; self.n];
            e[j] = 1;
            let r = self.reduce(&e);
            let s: Vec<u32> = self.free.iter().map(|&c| r[c]).collect();
            for a in 1..self.q() {
                moves.push(s.iter().map(|&x| f.mul(a, x)).collect::<Vec<u32>>());
            }
        }
        let mut dist = vec![u8::MAX; space.size()];
        dist[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        let mut cur = vec![0; k];
        while let Some(x) = queue.pop_front() {
            space.decode_into(x, &mut cur);
            for m in &moves {
                let y: Vec<u32> = cur.iter().zip(m).map(|(&a, &b)| f.add(a, b)).collect();
                let yi = space.encode(&y);
                if dist[yi] == u8::MAX {
                    dist[yi] = dist[x] + 1;
                    queue.push_back(yi);
                }
            }
        }
        Ok(dist)
    }

    pub fn covering_radius(&self) -> Result<usize> {
        Ok(*self.coset_leader_weights()?.iter().max().unwrap() as usize)
    }

    /// A minimum-weight-maximal coset representative: a deep hole.
    pub fn deep_hole(&self) -> Result<Vec<u32>> {
        let weights = self.coset_leader_weights()?;
        let cr = *weights.iter().max().unwrap();
        let target = weights.iter().position(|&w| w == cr).unwrap();
        let q = self.q() as usize;
        let mut v = vec![0; self.n];
        let mut t = target;
        for &c in self.free.iter().rev() {
            v[c] = (t % q) as u32;
            t /= q;
        }
        Ok(v)
    }

    pub fn coset_min_weight(&self, y: &[u32]) -> Result<usize> {
        Ok(self.coset_leader_weights()?[self.coset_index(y)] as usize)
    }

    /// Every codeword, by enumerating combinations of the basis.
    pub fn codewords(&self) -> Result<Vec<Vec<u32>>> {
        let k = self.dimension();
        cap_check("codewords q^k", state_count(self.q(), k).unwrap_or(u128::MAX), MAX_SCAN_STATES)?;
        let f = &self.field;
        let mut words = vec![vec![0u32; self.n]];
        for row in &self.basis {
            let mut next = Vec::with_capacity(words.len() * self.q() as usize);
            for a in 0..self.q() {
                for w in &words {
                    next.push(w.iter().zip(row).map(|(&x, &r)| f.add(x, f.mul(a, r))).collect());
                }
            }
            words = next;
        }
        Ok(words)
    }

    pub fn coset_max_weight(&self, y: &[u32]) -> Result<usize> {
        let f = &self.field;
        Ok(self
            .codewords()?
            .iter()
            .map(|c| c.iter().zip(y).filter(|&(&a, &b)| f.add(a, b) != 0).count())
            .max()
            .unwrap())
    }

    /// Maximum weight of every coset.
    pub fn coset_max_weights(&self) -> Result<Vec<u8>> {
        let cosets = self.coset_count();
        cap_check("cosets q^(n-k)", cosets, MAX_SCAN_STATES)?;
        if self.q() == 2 {
            // max weight of v + L is n minus the min weight of its complement coset
            let min = self.coset_leader_weights()?;
            let ones = vec![1; self.n];
            return Ok((0..cosets as usize)
                .map(|idx| {
                    let v = self.coset_rep(idx);
                    let comp: Vec<u32> = v.iter().zip(&ones).map(|(&a, &b)| a ^ b).collect();
                    (self.n - min[self.coset_index(&comp)] as usize) as u8
                })
                .collect());
        }
        let space = Space::new(self.q(), self.n, MAX_SCAN_STATES)?;
        let mut max = vec![0u8; cosets as usize];
        let mut v = vec![0; self.n];
        for r in 0..space.size() {
            space.decode_into(r, &mut v);
            let idx = self.coset_index(&v);
            let w = v.iter().filter(|&&d| d != 0).count() as u8;
            max[idx] = max[idx].max(w);
        }
        Ok(max)
    }

    fn coset_rep(&self, idx: usize) -> Vec<u32> {
        let q = self.q() as usize;
        let mut v = vec![0; self.n];
        let mut t = idx;
        for &c in self.free.iter().rev() {
            v[c] = (t % q) as u32;
            t /= q;
        }
        v
    }

    /// `(rem, centre)` over all cosets.
    pub fn remoteness_centre(&self) -> Result<(usize, Vec<u32>)> {
        let max = self.coset_max_weights()?;
        let (idx, &r) = max.iter().enumerate().min_by_key(|&(i, &w)| (w, i)).unwrap();
        // centre y with max_c d(c, y) = max weight of the coset -y + L
        let rep = self.coset_rep(idx);
        let centre = rep.iter().map(|&a| self.field.neg(a)).collect();
        Ok((r as usize, centre))
    }

    pub fn remoteness(&self) -> Result<usize> {
        Ok(self.remoteness_centre()?.0)
    }
}

/// One inequality evaluated on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundReport {
    pub name: String,
    pub left: String,
    pub relation: String,
    pub right: String,
    pub holds: bool,
    pub instance: String,
}

impl BoundReport {
    fn exact(name: &str, instance: &str, left: BigUint, relation: &str, right: BigUint) -> BoundReport {
        let holds = match relation {
            "<=" => left <= right,
            ">=" => left >= right,
            "==" => left == right,
            _ => unreachable!("unknown relation"),
        };
        BoundReport {
            name: name.into(),
            left: left.to_string(),
            relation: relation.into(),
            right: right.to_string(),
            holds,
            instance: instance.into(),
        }
    }

    fn float(name: &str, instance: &str, left: f64, right: f64, tol: f64) -> BoundReport {
        BoundReport {
            name: name.into(),
            left: format!("{left:.12}"),
            relation: "<=".into(),
            right: format!("{right:.12} (tol {tol:e})"),
            holds: left <= right + tol,
            instance: instance.into(),
        }
    }
}

/// Exactly computed quantities for one `(D, q)`; absent fields skip the
/// inequalities that need them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceQuantities {
    pub instance: String,
    pub q: u32,
    pub n: usize,
    pub tau: Option<usize>,
    pub nu: Option<usize>,
    /// `q^g`
    pub alpha: Option<u128>,
    /// `q^b`
    pub chi: Option<u128>,
    pub instability: Option<usize>,
    pub stability: Option<usize>,
    /// `q^l`
    pub l_count: Option<u128>,
    /// `q^c`
    pub c_count: Option<u128>,
}

/// `Q(m) = 2 + sum_{a=1}^m a^a`.
pub fn q_sequence(m: u32) -> BigUint {
    (1..=m).fold(BigUint::from(2u32), |acc, a| acc + BigUint::from(a).pow(a))
}

/// Largest `p` with `p^t <= x`; `t >= 1`.
pub fn integer_root(x: u64, t: u32) -> u64 {
    let mut p = (x as f64).powf(1.0 / t as f64).round() as u64 + 1;
    while p > 0 && BigUint::from(p).pow(t) > BigUint::from(x) {
        p -= 1;
    }
    p
}

fn big(v: impl Into<BigUint>) -> BigUint {
    v.into()
}

/// Every applicable inequality, all in integer form except the logarithmic
/// upper side of the coset/guessing sandwich.
pub fn check_bounds(inst: &InstanceQuantities) -> Result<Vec<BoundReport>> {
    let (q, n, name) = (inst.q, inst.n, inst.instance.as_str());
    if q < 2 || n == 0 {
        return Err(Error::Invalid("instance needs q >= 2 and n >= 1".into()));
    }
    let qn = pow_big(q, n);
    let mut out = Vec::new();
    let mut any = false;

    if let (Some(nu), Some(tau)) = (inst.nu, inst.tau) {
        any = true;
        out.push(BoundReport::exact("nu <= tau", name, big(nu as u64), "<=", big(tau as u64)));
    }
    if let Some(i) = inst.instability {
        if let Some(nu) = inst.nu {
            out.push(BoundReport::exact("nu <= i", name, big(nu as u64), "<=", big(i as u64)));
        }
        if let Some(tau) = inst.tau {
            out.push(BoundReport::exact("i <= tau", name, big(i as u64), "<=", big(tau as u64)));
        }
    }
    if let Some(alpha) = inst.alpha {
        let alpha = big(alpha);
        if let Some(nu) = inst.nu {
            out.push(BoundReport::exact("q^nu <= alpha", name, pow_big(q, nu), "<=", alpha.clone()));
        }
        if let Some(tau) = inst.tau {
            out.push(BoundReport::exact("alpha <= q^tau", name, alpha.clone(), "<=", pow_big(q, tau)));
        }
        if let Some(chi) = inst.chi {
            out.push(BoundReport::exact("alpha * chi >= q^n", name, &alpha * big(chi), ">=", qn.clone()));
        }
        if let (Some(tau), Some(i)) = (inst.tau, inst.instability) {
            let qt = pow_big(q, tau);
            let left = &alpha * (&qt - ball_volume(q, tau, i as i64 - 1));
            out.push(BoundReport::exact("alpha * (q^tau - V(q,tau,i-1)) >= q^tau", name, left, ">=", qt));
        }
        if let (Some(tau), Some(s)) = (inst.tau, inst.stability) {
            let qt = pow_big(q, tau);
            let left = &alpha * ball_volume(q, tau, tau as i64 - s as i64);
            out.push(BoundReport::exact("alpha * V(q,tau,tau-s) >= q^tau", name, left, ">=", qt));
        }
        if let Some(c) = inst.c_count {
            out.push(BoundReport::exact("c * alpha >= q^n", name, big(c) * &alpha, ">=", qn.clone()));
            let a = alpha.to_f64().unwrap();
            let lq = (q as f64).ln();
            let right = n as f64 - a.ln() / lq + (1.0 + q as f64 * (n as f64).ln()).ln() / lq;
            out.push(BoundReport::float("log_q c <= n - log_q alpha + log_q(1 + q ln n)", name, (c as f64).ln() / lq, right, 1e-9));
        }
    }
    if let Some(chi) = inst.chi {
        let chi = big(chi);
        if let Some(tau) = inst.tau {
            out.push(BoundReport::exact("chi >= q^(n-tau)", name, chi.clone(), ">=", pow_big(q, n - tau.min(n))));
        }
        if let Some(l) = inst.l_count {
            out.push(BoundReport::exact("l >= chi", name, big(l), ">=", chi.clone()));
        }
        if let Some(c) = inst.c_count {
            out.push(BoundReport::exact("c >= chi", name, big(c), ">=", chi.clone()));
        }
    }
    if let (Some(s), Some(i)) = (inst.stability, inst.instability) {
        out.push(BoundReport::exact("s + i <= n", name, big((s + i) as u64), "<=", big(n as u64)));
    }
    if let Some(s) = inst.stability {
        out.push(BoundReport::exact("s <= floor(n/q)", name, big(s as u64), "<=", big((n / q as usize) as u64)));
        if let Some(tau) = inst.tau {
            if tau == 0 {
                out.push(BoundReport::exact("s <= tau", name, big(s as u64), "<=", big(0u32)));
            } else {
                let p = integer_root(q as u64 - 1, tau as u32);
                out.push(BoundReport::exact("s * floor((q-1)^(1/tau)) <= tau", name, big(s as u64 * p), "<=", big(tau as u64)));
                for m in 1..=tau as u32 {
                    if q_sequence(m) <= big(q) {
                        out.push(BoundReport::exact(
                            &format!("s <= tau - {m} since Q({m}) <= q"),
                            name,
                            big(s as u64),
                            "<=",
                            big((tau - m as usize) as u64),
                        ));
                    }
                }
            }
        }
    }
    if let Some(l) = inst.l_count {
        let l = big(l);
        if let Some(i) = inst.instability {
            out.push(BoundReport::exact("V(q,n,i) * q^l >= q^n", name, ball_volume(q, n, i as i64) * &l, ">=", qn.clone()));
        }
        if let Some(s) = inst.stability {
            let left = (&qn - ball_volume(q, n, n as i64 - s as i64 - 1)) * &l;
            out.push(BoundReport::exact("(q^n - V(q,n,n-s-1)) * q^l >= q^n", name, left, ">=", qn.clone()));
        }
    }
    any |= !out.is_empty();
    if !any {
        return Err(Error::MissingQuantity("no pair of quantities to compare"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_cr(c: &Code) -> usize {
        let sp = Space::new(c.q(), c.n(), MAX_SCAN_STATES).unwrap();
        (0..sp.size()).map(|y| c.words().iter().map(|&w| sp.hamming(y, w)).min().unwrap()).max().unwrap()
    }

    fn brute_rem(c: &Code) -> usize {
        let sp = Space::new(c.q(), c.n(), MAX_SCAN_STATES).unwrap();
        (0..sp.size()).map(|y| c.words().iter().map(|&w| sp.hamming(y, w)).max().unwrap()).min().unwrap()
    }

    fn simplex_code() -> LinearCode {
        let f = Arc::new(Field::new(2).unwrap());
        let g = Matrix::from_rows(&[vec![1, 1, 1, 0, 1, 0, 0], vec![0, 1, 1, 1, 0, 1, 0], vec![0, 0, 1, 1, 1, 0, 1]]);
        LinearCode::from_generator(f, &g)
    }

    #[test]
    fn ball_volume_examples() {
        assert_eq!(ball_volume(2, 7, 1), big(8u32));
        assert_eq!(ball_volume(3, 2, 1), big(5u32));
        assert_eq!(ball_volume(4, 5, 5), pow_big(4, 5));
        assert_eq!(ball_volume(2, 7, 3), big(64u32));
        assert_eq!(ball_volume(3, 4, -1), big(0u32));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(binary_entropy(0.5), 1.0);
        assert_eq!(binary_entropy(0.0), 0.0);
        assert!((binary_entropy(0.25) - 0.811_278_124_459_132_9).abs() < 1e-12);
    }

    #[test]
    fn radius_examples() {
        // y = 0 is at distance 0 from the only codeword
        let zero = Code::new(2, 5, vec![0]).unwrap();
        assert_eq!((zero.covering_radius().unwrap(), zero.remoteness().unwrap()), (5, 0));
        let all = Code::new(2, 4, (0..16).collect()).unwrap();
        assert_eq!((all.covering_radius().unwrap(), all.remoteness().unwrap()), (0, 4));
        let all3 = Code::new(3, 3, (0..27).collect()).unwrap();
        assert_eq!(all3.remoteness().unwrap(), 3);
        assert!(Code::new(2, 3, vec![]).is_err());
    }

    #[test]
    fn simplex_code_radius() {
        let s = simplex_code();
        assert_eq!(s.dimension(), 3);
        assert_eq!(s.covering_radius().unwrap(), 3);
        let hole = s.deep_hole().unwrap();
        assert_eq!(s.coset_min_weight(&hole).unwrap(), 3);
        // every nonzero simplex word has weight 4
        assert!(s.codewords().unwrap().iter().filter(|w| w.iter().any(|&x| x != 0)).all(|w| w.iter().sum::<u32>() == 4));
        assert_eq!(s.coset_max_weight(&[0; 7]).unwrap(), 4);
        let words: Vec<Vec<u32>> = s.codewords().unwrap();
        let c = Code::from_words(2, 7, &words).unwrap();
        assert_eq!(brute_cr(&c), 3);
        assert_eq!(c.remoteness().unwrap(), s.remoteness().unwrap());
    }

    #[test]
    fn q_sequence_values() {
        let v: Vec<BigUint> = (1..=4).map(q_sequence).collect();
        assert_eq!(v, vec![big(3u32), big(7u32), big(34u32), big(290u32)]);
        assert_eq!(integer_root(7, 2), 2);
        assert_eq!(integer_root(8, 3), 2);
        assert_eq!(integer_root(1, 5), 1);
        assert_eq!(integer_root(26, 3), 2);
    }

    #[test]
    fn clique_instance_holds() {
        let inst = InstanceQuantities {
            instance: "K:3 q=2".into(),
            q: 2,
            n: 3,
            tau: Some(2),
            nu: Some(1),
            alpha: Some(4),
            chi: Some(2),
            instability: Some(1),
            stability: Some(1),
            l_count: Some(2),
            c_count: Some(2),
        };
        let reports = check_bounds(&inst).unwrap();
        assert!(reports.len() > 15);
        assert!(reports.iter().all(|r| r.holds), "{reports:#?}");
        let bad = InstanceQuantities { alpha: Some(16), ..inst };
        assert!(check_bounds(&bad).unwrap().iter().any(|r| !r.holds));
        assert!(matches!(check_bounds(&InstanceQuantities { q: 2, n: 3, ..Default::default() }), Err(Error::MissingQuantity(_))));
    }

    #[test]
    fn sphere_covering_on_simplex_witness() {
        assert!(ball_volume(2, 7, 3) * pow_big(2, 3) >= pow_big(2, 7));
    }

    fn arb_code() -> impl Strategy<Value = Code> {
        (2u32..=3, 1usize..=4).prop_flat_map(|(q, n)| {
            let size = (q as usize).pow(n as u32);
            proptest::collection::vec(0..size, 1..=size.min(12)).prop_map(move |w| Code::new(q, n, w).unwrap())
        })
    }

    proptest! {
        #[test]
        fn exhaustive_radii_match_brute_force(c in arb_code()) {
            prop_assert_eq!(c.covering_radius().unwrap(), brute_cr(&c));
            prop_assert_eq!(c.remoteness().unwrap(), brute_rem(&c));
        }

        #[test]
        fn radii_are_translation_invariant(c in arb_code(), seed in 0usize..1000) {
            let size = (c.q() as usize).pow(c.n() as u32);
            let t = c.translate(seed % size);
            prop_assert_eq!(t.covering_radius().unwrap(), c.covering_radius().unwrap());
            prop_assert_eq!(t.remoteness().unwrap(), c.remoteness().unwrap());
        }

        #[test]
        fn sphere_covering_and_remoteness_bounds(c in arb_code()) {
            let (q, n) = (c.q(), c.n());
            let size = big(c.len() as u64);
            let qn = pow_big(q, n);
            prop_assert!(&size * ball_volume(q, n, c.covering_radius().unwrap() as i64) >= qn);
            let r = c.remoteness().unwrap() as i64;
            prop_assert!(&size * (&qn - ball_volume(q, n, r - 1)) >= qn);
        }

        #[test]
        fn linear_radii_match_exhaustive(q in prop::sample::select(vec![2u64, 3, 4]), n in 1usize..=4, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let field = Arc::new(Field::new(q).unwrap());
            let rows = rng.gen_range(1..=n);
            let mut g = Matrix::zeros(rows, n);
            for r in 0..rows {
                for c in 0..n {
                    g.set(r, c, rng.gen_range(0..q as u32));
                }
            }
            let lin = LinearCode::from_generator(field, &g);
            let code = Code::from_words(q as u32, n, &lin.codewords().unwrap()).unwrap();
            prop_assert_eq!(code.len(), (q as usize).pow(lin.dimension() as u32));
            prop_assert_eq!(lin.covering_radius().unwrap(), brute_cr(&code));
            prop_assert_eq!(lin.remoteness().unwrap(), brute_rem(&code));
            let y: Vec<u32> = (0..n).map(|_| rng.gen_range(0..q as u32)).collect();
            let sp = Space::new(q as u32, n, MAX_SCAN_STATES).unwrap();
            let f = Field::new(q).unwrap();
            let shifted: Vec<usize> = lin.codewords().unwrap().iter().map(|c| {
                sp.encode(&c.iter().zip(&y).map(|(&a, &b)| f.add(a, b)).collect::<Vec<_>>())
            }).collect();
            let min = shifted.iter().map(|&w| sp.weight(w)).min().unwrap();
            let max = shifted.iter().map(|&w| sp.weight(w)).max().unwrap();
            prop_assert_eq!(lin.coset_min_weight(&y).unwrap(), min);
            prop_assert_eq!(lin.coset_max_weight(&y).unwrap(), max);
            prop_assert_eq!(lin.coset_max_weights().unwrap()[lin.coset_index(&y)] as usize, max);
        }
    }
}
